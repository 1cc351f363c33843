//! Fixed-order quadrature rules.

use super::Point2;

const GL3_NODES: [f64; 3] = [-0.774_596_669_241_483_4, 0.0, 0.774_596_669_241_483_4];
const GL3_WEIGHTS: [f64; 3] = [5.0 / 9.0, 8.0 / 9.0, 5.0 / 9.0];

/// Composite 3-point Gauss-Legendre over `[lo, hi]` split into `panels`
/// equal panels.
pub fn gauss_legendre<F: FnMut(f64) -> f64>(lo: f64, hi: f64, panels: usize, mut f: F) -> f64 {
    let mut acc = 0.0;
    for_each_gl_node(lo, hi, panels, |t, w| acc += w * f(t));
    acc
}

/// Calls `visit(t, weight)` for every node of the composite rule.
pub fn for_each_gl_node<F: FnMut(f64, f64)>(lo: f64, hi: f64, panels: usize, mut visit: F) {
    let panels = panels.max(1);
    let h = (hi - lo) / panels as f64;
    for p in 0..panels {
        let mid = lo + h * (p as f64 + 0.5);
        for k in 0..3 {
            visit(mid + 0.5 * h * GL3_NODES[k], 0.5 * h * GL3_WEIGHTS[k]);
        }
    }
}

/// Degree-5 seven-point rule on the reference triangle, as barycentric
/// coordinates and weights summing to one.
const TRI7: [([f64; 3], f64); 7] = {
    const A1: f64 = 0.059_715_871_789_769_82;
    const B1: f64 = 0.470_142_064_105_115_1;
    const A2: f64 = 0.797_426_985_353_087_3;
    const B2: f64 = 0.101_286_507_323_456_3;
    const W0: f64 = 0.225;
    const W1: f64 = 0.132_394_152_788_506_2;
    const W2: f64 = 0.125_939_180_544_827_1;
    [
        ([1.0 / 3.0, 1.0 / 3.0, 1.0 / 3.0], W0),
        ([A1, B1, B1], W1),
        ([B1, A1, B1], W1),
        ([B1, B1, A1], W1),
        ([A2, B2, B2], W2),
        ([B2, A2, B2], W2),
        ([B2, B2, A2], W2),
    ]
};

/// Integral of `f` over triangle `(p0, p1, p2)`, uniformly subdivided into
/// `k * k` congruent sub-triangles. Signed by orientation.
pub fn triangle_integral<F: FnMut(Point2) -> f64>(p0: Point2, p1: Point2, p2: Point2, k: usize, mut f: F) -> f64 {
    let k = k.max(1);
    let e1 = (p1 - p0) / k as f64;
    let e2 = (p2 - p0) / k as f64;
    let sub_area = 0.5 * e1.cross(e2);
    let mut acc = 0.0;
    let mut rule = |a: Point2, b: Point2, c: Point2| {
        let mut s = 0.0;
        for (bary, w) in TRI7.iter() {
            s += w * f(a * bary[0] + b * bary[1] + c * bary[2]);
        }
        s
    };
    for i in 0..k {
        for j in 0..(k - i) {
            let a = p0 + e1 * i as f64 + e2 * j as f64;
            acc += rule(a, a + e1, a + e2);
            if i + j + 1 < k {
                acc += rule(a + e1, a + e1 + e2, a + e2);
            }
        }
    }
    acc * sub_area
}
