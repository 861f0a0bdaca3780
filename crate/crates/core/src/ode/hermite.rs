/// Position, velocity and acceleration of one component at a knot.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HermiteNode {
    pub x: f64,
    pub q: f64,
    pub v: f64,
    pub a: f64,
}

/// Quintic Hermite interpolant through two nodes, evaluated at `x`.
/// Returns the value and its first three derivatives.
pub fn quintic_hermite(left: &HermiteNode, right: &HermiteNode, x: f64) -> [f64; 4] {
    let h = right.x - left.x;
    let s = (x - left.x) / h;
    let c0 = left.q;
    let c1 = h * left.v;
    let c2 = 0.5 * h * h * left.a;
    let r0 = right.q - c0 - c1 - c2;
    let r1 = h * right.v - c1 - 2.0 * c2;
    let r2 = h * h * right.a - 2.0 * c2;
    let c3 = 10.0 * r0 - 4.0 * r1 + 0.5 * r2;
    let c4 = -15.0 * r0 + 7.0 * r1 - r2;
    let c5 = 6.0 * r0 - 3.0 * r1 + 0.5 * r2;

    let p = c0 + s * (c1 + s * (c2 + s * (c3 + s * (c4 + s * c5))));
    let d1 = c1 + s * (2.0 * c2 + s * (3.0 * c3 + s * (4.0 * c4 + s * 5.0 * c5)));
    let d2 = 2.0 * c2 + s * (6.0 * c3 + s * (12.0 * c4 + s * 20.0 * c5));
    let d3 = 6.0 * c3 + s * (24.0 * c4 + s * 60.0 * c5);
    [p, d1 / h, d2 / (h * h), d3 / (h * h * h)]
}
