use core::ops::{Add, AddAssign, Div, Mul, Neg, Sub, SubAssign};

#[allow(unused_imports)]
use num_traits::Float;

/// A point (or free vector) in the plane, in meters.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct Point2 {
    pub x: f64,
    pub y: f64,
}

impl Point2 {
    pub const ZERO: Point2 = Point2 { x: 0.0, y: 0.0 };

    #[inline]
    pub const fn new(x: f64, y: f64) -> Self {
        Self { x, y }
    }

    /// Unit vector at angle `theta` from the x-axis.
    #[inline]
    pub fn from_angle(theta: f64) -> Self {
        Self::new(theta.cos(), theta.sin())
    }

    #[inline]
    pub fn dot(self, other: Self) -> f64 {
        self.x * other.x + self.y * other.y
    }

    /// z-component of the 3D cross product.
    #[inline]
    pub fn cross(self, other: Self) -> f64 {
        self.x * other.y - self.y * other.x
    }

    #[inline]
    pub fn norm(self) -> f64 {
        self.x.hypot(self.y)
    }

    #[inline]
    pub fn norm_squared(self) -> f64 {
        self.dot(self)
    }

    #[inline]
    pub fn distance(self, other: Self) -> f64 {
        (self - other).norm()
    }

    /// Counter-clockwise rotation by 90 degrees.
    #[inline]
    pub fn perp(self) -> Self {
        Self::new(-self.y, self.x)
    }

    /// Clockwise rotation by 90 degrees. For a boundary traversed
    /// counter-clockwise this maps the tangent onto the outward normal.
    #[inline]
    pub fn perp_cw(self) -> Self {
        Self::new(self.y, -self.x)
    }

    #[inline]
    pub fn rotate(self, theta: f64) -> Self {
        let (s, c) = theta.sin_cos();
        Self::new(c * self.x - s * self.y, s * self.x + c * self.y)
    }

    /// Returns `self / |self|`, or zero for the zero vector.
    pub fn normalized(self) -> Self {
        let n = self.norm();
        if n > 0.0 {
            self / n
        } else {
            Self::ZERO
        }
    }

    #[inline]
    pub fn angle(self) -> f64 {
        self.y.atan2(self.x)
    }

    #[inline]
    pub fn lerp(self, other: Self, s: f64) -> Self {
        self + (other - self) * s
    }

    #[inline]
    pub fn is_finite(self) -> bool {
        self.x.is_finite() && self.y.is_finite()
    }
}

impl Add for Point2 {
    type Output = Self;
    #[inline]
    fn add(self, rhs: Self) -> Self {
        Self::new(self.x + rhs.x, self.y + rhs.y)
    }
}

impl AddAssign for Point2 {
    #[inline]
    fn add_assign(&mut self, rhs: Self) {
        self.x += rhs.x;
        self.y += rhs.y;
    }
}

impl Sub for Point2 {
    type Output = Self;
    #[inline]
    fn sub(self, rhs: Self) -> Self {
        Self::new(self.x - rhs.x, self.y - rhs.y)
    }
}

impl SubAssign for Point2 {
    #[inline]
    fn sub_assign(&mut self, rhs: Self) {
        self.x -= rhs.x;
        self.y -= rhs.y;
    }
}

impl Mul<f64> for Point2 {
    type Output = Self;
    #[inline]
    fn mul(self, k: f64) -> Self {
        Self::new(self.x * k, self.y * k)
    }
}

impl Mul<Point2> for f64 {
    type Output = Point2;
    #[inline]
    fn mul(self, p: Point2) -> Point2 {
        p * self
    }
}

impl Div<f64> for Point2 {
    type Output = Self;
    #[inline]
    fn div(self, k: f64) -> Self {
        Self::new(self.x / k, self.y / k)
    }
}

impl Neg for Point2 {
    type Output = Self;
    #[inline]
    fn neg(self) -> Self {
        Self::new(-self.x, -self.y)
    }
}

impl core::iter::Sum for Point2 {
    fn sum<I: Iterator<Item = Self>>(iter: I) -> Self {
        iter.fold(Self::ZERO, |a, b| a + b)
    }
}

impl From<(f64, f64)> for Point2 {
    fn from((x, y): (f64, f64)) -> Self {
        Self::new(x, y)
    }
}

/// Row-major 2x2 matrix.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct Mat2(pub [[f64; 2]; 2]);

impl Mat2 {
    pub const IDENTITY: Mat2 = Mat2([[1.0, 0.0], [0.0, 1.0]]);
    pub const ZERO: Mat2 = Mat2([[0.0, 0.0], [0.0, 0.0]]);

    /// Outer product `u v^T`.
    #[inline]
    pub fn outer(u: Point2, v: Point2) -> Self {
        Mat2([[u.x * v.x, u.x * v.y], [u.y * v.x, u.y * v.y]])
    }

    #[inline]
    pub fn transpose(self) -> Self {
        let m = self.0;
        Mat2([[m[0][0], m[1][0]], [m[0][1], m[1][1]]])
    }

    #[inline]
    pub fn mul_vec(self, v: Point2) -> Point2 {
        let m = self.0;
        Point2::new(m[0][0] * v.x + m[0][1] * v.y, m[1][0] * v.x + m[1][1] * v.y)
    }

    #[inline]
    pub fn get(self, row: usize, col: usize) -> f64 {
        self.0[row][col]
    }

    /// Largest absolute entry.
    pub fn max_abs(self) -> f64 {
        self.0.iter().flatten().fold(0.0, |acc: f64, v| acc.max(v.abs()))
    }
}

impl Add for Mat2 {
    type Output = Self;
    fn add(self, rhs: Self) -> Self {
        let (a, b) = (self.0, rhs.0);
        Mat2([
            [a[0][0] + b[0][0], a[0][1] + b[0][1]],
            [a[1][0] + b[1][0], a[1][1] + b[1][1]],
        ])
    }
}

impl Sub for Mat2 {
    type Output = Self;
    fn sub(self, rhs: Self) -> Self {
        self + rhs * -1.0
    }
}

impl Mul<f64> for Mat2 {
    type Output = Self;
    fn mul(self, k: f64) -> Self {
        let a = self.0;
        Mat2([[a[0][0] * k, a[0][1] * k], [a[1][0] * k, a[1][1] * k]])
    }
}

impl Mul<Point2> for Mat2 {
    type Output = Point2;
    fn mul(self, v: Point2) -> Point2 {
        self.mul_vec(v)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn perp_cw_is_outward_for_ccw_tangent() {
        // bottom edge of a CCW square runs +x; outward is -y
        assert_eq!(Point2::new(1.0, 0.0).perp_cw(), Point2::new(0.0, -1.0));
        assert_eq!(Point2::new(1.0, 0.0).perp(), Point2::new(0.0, 1.0));
    }

    #[test]
    fn outer_and_transpose() {
        let m = Mat2::outer(Point2::new(1.0, 2.0), Point2::new(3.0, 4.0));
        assert_eq!(m.0, [[3.0, 4.0], [6.0, 8.0]]);
        assert_eq!(m.transpose().0, [[3.0, 6.0], [4.0, 8.0]]);
        assert_eq!(m * Point2::new(1.0, 0.0), Point2::new(3.0, 6.0));
    }
}
