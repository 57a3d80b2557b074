//! Gauss–Legendre quadrature: interval rules, adaptive refinement, and the
//! phase-space domain rules (tensor, polar, collapsed-triangle) used to
//! integrate kernels over regions.

use crate::error::{Error, Result};
use crate::scalar::Scalar;

/// Smallest accepted rule order.
pub const MIN_ORDER: usize = 4;
/// Largest accepted rule order (per axis).
pub const MAX_ORDER: usize = 1024;

/// Per-axis node count for domain rules.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct QuadratureSpec {
    order: usize,
}

impl QuadratureSpec {
    pub fn new(order: usize) -> Result<Self> {
        if !(MIN_ORDER..=MAX_ORDER).contains(&order) {
            return Err(Error::QuadratureOrder(order));
        }
        Ok(Self { order })
    }

    pub fn order(&self) -> usize {
        self.order
    }

    /// Same rule family at twice the order, capped at [`MAX_ORDER`].
    pub fn doubled(&self) -> Self {
        Self {
            order: (self.order * 2).min(MAX_ORDER),
        }
    }
}

impl Default for QuadratureSpec {
    fn default() -> Self {
        Self { order: 64 }
    }
}

/// Gauss–Legendre nodes and weights on `[-1, 1]`.
///
/// Computed once per order by Newton iteration on the Legendre polynomial in
/// double precision, then converted to the target scalar; the iteration is
/// deterministic (fixed initial guesses, fixed convergence threshold).
pub fn gauss_legendre<T: Scalar>(order: usize) -> Result<(Vec<T>, Vec<T>)> {
    if !(MIN_ORDER..=MAX_ORDER).contains(&order) {
        return Err(Error::QuadratureOrder(order));
    }
    let n = order;
    let mut nodes = vec![0.0f64; n];
    let mut weights = vec![0.0f64; n];
    for i in 0..n.div_ceil(2) {
        let mut x = (std::f64::consts::PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            // Legendre recurrence for P_n(x) and P_{n-1}(x).
            let mut p0 = 1.0;
            let mut p1 = x;
            for k in 2..=n {
                let kf = k as f64;
                let p2 = ((2.0 * kf - 1.0) * x * p1 - (kf - 1.0) * p0) / kf;
                p0 = p1;
                p1 = p2;
            }
            dp = (n as f64) * (x * p1 - p0) / (x * x - 1.0);
            let dx = p1 / dp;
            x -= dx;
            if dx.abs() < 1e-15 {
                break;
            }
        }
        let w = 2.0 / ((1.0 - x * x) * dp * dp);
        nodes[i] = -x.abs();
        nodes[n - 1 - i] = x.abs();
        weights[i] = w;
        weights[n - 1 - i] = w;
        if n % 2 == 1 && i == n / 2 {
            nodes[i] = 0.0;
            weights[i] = w;
        }
    }
    Ok((
        nodes.into_iter().map(T::from_f64_lossy).collect(),
        weights.into_iter().map(T::from_f64_lossy).collect(),
    ))
}

/// Gauss–Legendre rule affinely mapped to `[a, b]`.
pub fn gauss_legendre_on<T: Scalar>(a: T, b: T, order: usize) -> Result<(Vec<T>, Vec<T>)> {
    let (x, w) = gauss_legendre::<T>(order)?;
    let half = T::from_f64_lossy(0.5);
    let mid = (a + b) * half;
    let rad = (b - a) * half;
    Ok((
        x.iter().map(|&t| mid + rad * t).collect(),
        w.iter().map(|&wi| wi * rad).collect(),
    ))
}

/// Integrates a smooth scalar function over `[a, b]`, doubling the
/// Gauss–Legendre order from 32 until two successive estimates agree to
/// `rel_tol` (relative to `max(1, |I|)`) or the order cap is reached.
pub fn integrate_adaptive<T: Scalar>(
    f: impl Fn(T) -> T,
    a: T,
    b: T,
    rel_tol: T,
) -> Result<T> {
    if !(rel_tol > T::zero()) {
        return Err(Error::Tolerance(rel_tol.to_f64_lossy()));
    }
    let eval = |order: usize| -> Result<T> {
        let (x, w) = gauss_legendre_on(a, b, order)?;
        let mut s = T::zero();
        for (xi, wi) in x.iter().zip(w.iter()) {
            s += *wi * f(*xi);
        }
        Ok(s)
    };
    let mut order = 32usize;
    let mut prev = eval(order)?;
    while order < MAX_ORDER {
        order *= 2;
        let next = eval(order)?;
        let scale = if prev.abs() > T::one() { prev.abs() } else { T::one() };
        if (next - prev).abs() <= rel_tol * scale {
            return Ok(next);
        }
        prev = next;
    }
    Ok(prev)
}

/// Weighted nodes covering a two-dimensional phase-space domain.
#[derive(Clone, Debug)]
pub struct PlaneRule<T> {
    pub nodes: Vec<(T, T)>,
    pub weights: Vec<T>,
}

impl<T: Scalar> PlaneRule<T> {
    pub fn empty() -> Self {
        Self {
            nodes: Vec::new(),
            weights: Vec::new(),
        }
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn weight_sum(&self) -> T {
        let mut s = T::zero();
        for &w in &self.weights {
            s += w;
        }
        s
    }

    pub fn extend(&mut self, other: PlaneRule<T>) {
        self.nodes.extend(other.nodes);
        self.weights.extend(other.weights);
    }
}

/// Weighted nodes along a one-dimensional support (a segment), already mapped
/// to phase-space points.
#[derive(Clone, Debug)]
pub struct LineRule<T> {
    pub points: Vec<(T, T)>,
    pub weights: Vec<T>,
}

/// Tensor Gauss–Legendre rule over the axis-aligned rectangle
/// `[x0, x0+a] × [k0, k0+b]`.
pub fn rectangle_rule<T: Scalar>(
    x0: T,
    k0: T,
    a: T,
    b: T,
    spec: QuadratureSpec,
) -> Result<PlaneRule<T>> {
    let (qx, wx) = gauss_legendre_on(x0, x0 + a, spec.order())?;
    let (qy, wy) = gauss_legendre_on(k0, k0 + b, spec.order())?;
    let mut rule = PlaneRule::empty();
    rule.nodes.reserve(qx.len() * qy.len());
    rule.weights.reserve(qx.len() * qy.len());
    for (i, &x) in qx.iter().enumerate() {
        for (j, &y) in qy.iter().enumerate() {
            rule.nodes.push((x, y));
            rule.weights.push(wx[i] * wy[j]);
        }
    }
    Ok(rule)
}

/// Polar Gauss–Legendre rule over the disk of given center and diameter:
/// Gauss nodes in the radius (with the `r dr` Jacobian folded into the
/// weights) tensored with Gauss nodes in the angle.
pub fn disk_rule<T: Scalar>(
    cx: T,
    cy: T,
    diameter: T,
    spec: QuadratureSpec,
) -> Result<PlaneRule<T>> {
    let radius = diameter * T::from_f64_lossy(0.5);
    let (rs, wr) = gauss_legendre_on(T::zero(), radius, spec.order())?;
    // Angular part: uniform midpoint rule, exact for circular harmonics
    // e^{ikφ} with |k| below the node count (far better than Gauss nodes for
    // the periodic direction; keeps origin-centered operators diagonal to
    // machine precision at every refinement level).
    let n_phi = spec.order();
    let wphi = T::two_pi() / T::from_usize_lossy(n_phi);
    let mut rule = PlaneRule::empty();
    rule.nodes.reserve(rs.len() * n_phi);
    rule.weights.reserve(rs.len() * n_phi);
    for (i, &r) in rs.iter().enumerate() {
        for j in 0..n_phi {
            let phi = T::two_pi() * (T::from_usize_lossy(j) + T::from_f64_lossy(0.5))
                / T::from_usize_lossy(n_phi);
            rule.nodes.push((cx + r * phi.cos(), cy + r * phi.sin()));
            rule.weights.push(wr[i] * r * wphi);
        }
    }
    Ok(rule)
}

/// Collapsed (Duffy-style) tensor rule over the isosceles triangle with apex
/// at the origin, symmetry axis along `+q` rotated by `orientation`, apex
/// angle `apex`, and apothem `a` (distance from apex to the base midpoint):
/// vertices at the origin and `a·(1, ±tan(apex/2))` before rotation.
///
/// Map from the unit square: `x = a·u`, `y = a·u·tan(apex/2)·(2v−1)`, with
/// Jacobian `2a²·tan(apex/2)·u`; the collapse keeps all nodes strictly inside.
pub fn triangle_rule<T: Scalar>(
    a: T,
    apex: T,
    orientation: T,
    spec: QuadratureSpec,
) -> Result<PlaneRule<T>> {
    let half = T::from_f64_lossy(0.5);
    let t = (apex * half).tan();
    let (us, wu) = gauss_legendre_on(T::zero(), T::one(), spec.order())?;
    let (vs, wv) = gauss_legendre_on(T::zero(), T::one(), spec.order())?;
    let (c, s) = (orientation.cos(), orientation.sin());
    let jac = T::from_f64_lossy(2.0) * a * a * t;
    let mut rule = PlaneRule::empty();
    rule.nodes.reserve(us.len() * vs.len());
    rule.weights.reserve(us.len() * vs.len());
    for (i, &u) in us.iter().enumerate() {
        for (j, &v) in vs.iter().enumerate() {
            let x = a * u;
            let y = a * u * t * (T::from_f64_lossy(2.0) * v - T::one());
            rule.nodes.push((c * x - s * y, s * x + c * y));
            rule.weights.push(jac * u * wu[i] * wv[j]);
        }
    }
    Ok(rule)
}

/// One-dimensional Gauss–Legendre rule along a segment of the given length,
/// centered at `center`, with support direction perpendicular to the
/// quadrature axis at angle `theta` (the segment of `seg(L, θ)` runs along
/// `θ + π/2`).
pub fn segment_rule<T: Scalar>(
    length: T,
    theta: T,
    center: (T, T),
    spec: QuadratureSpec,
) -> Result<LineRule<T>> {
    let half = T::from_f64_lossy(0.5);
    let (ss, w) = gauss_legendre_on(-length * half, length * half, spec.order())?;
    let (ux, uy) = (-theta.sin(), theta.cos());
    Ok(LineRule {
        points: ss
            .iter()
            .map(|&s| (center.0 + s * ux, center.1 + s * uy))
            .collect(),
        weights: w,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn nodes_and_weights_match_known_low_orders() {
        let (x, w) = gauss_legendre::<f64>(4).unwrap();
        // classical 4-point rule
        let expect_x = [-0.8611363115940526, -0.3399810435848563, 0.3399810435848563, 0.8611363115940526];
        let expect_w = [0.3478548451374538, 0.6521451548625461, 0.6521451548625461, 0.3478548451374538];
        for i in 0..4 {
            assert!((x[i] - expect_x[i]).abs() < 1e-14);
            assert!((w[i] - expect_w[i]).abs() < 1e-14);
        }
        assert!(gauss_legendre::<f64>(3).is_err());
        assert!(gauss_legendre::<f64>(2048).is_err());
    }

    #[test]
    fn monomial_exactness() {
        let (x, w) = gauss_legendre::<f64>(7).unwrap();
        for k in 0..=13usize {
            let got: f64 = x.iter().zip(&w).map(|(&xi, &wi)| wi * xi.powi(k as i32)).sum();
            let want = if k % 2 == 0 { 2.0 / (k as f64 + 1.0) } else { 0.0 };
            assert!((got - want).abs() < 1e-13, "degree {k}");
        }
    }

    #[test]
    fn adaptive_matches_closed_form() {
        let i = integrate_adaptive(|u: f64| (-u).exp(), 0.0, 1.0, 1e-13).unwrap();
        assert!((i - (1.0 - (-1.0f64).exp())).abs() < 1e-14);
        // oscillatory integrand forces at least one refinement
        let j = integrate_adaptive(|u: f64| (40.0 * u).sin(), 0.0, 1.0, 1e-13).unwrap();
        assert!((j - (1.0 - 40f64.cos()) / 40.0).abs() < 1e-13);
    }

    #[test]
    fn rectangle_rule_sums_to_area() {
        let r = rectangle_rule(0.5f64, -1.0, 2.0, 3.0, QuadratureSpec::default()).unwrap();
        assert!((r.weight_sum() - 6.0).abs() < 1e-12);
        for &(x, y) in &r.nodes {
            assert!(x > 0.5 && x < 2.5 && y > -1.0 && y < 2.0);
        }
    }

    #[test]
    fn disk_rule_sums_to_area_and_stays_inside() {
        let d = disk_rule(1.0f64, -0.5, 2.0, QuadratureSpec::default()).unwrap();
        assert!((d.weight_sum() - std::f64::consts::PI).abs() < 1e-12);
        for &(x, y) in &d.nodes {
            assert!(((x - 1.0).powi(2) + (y + 0.5).powi(2)).sqrt() <= 1.0);
        }
    }

    #[test]
    fn triangle_rule_sums_to_area() {
        // apothem a, apex 2π/M: area a² tan(π/M)
        let a = 0.75f64;
        let m = 5.0f64;
        let apex = 2.0 * std::f64::consts::PI / m;
        let t = triangle_rule(a, apex, 0.4, QuadratureSpec::default()).unwrap();
        let want = a * a * (std::f64::consts::PI / m).tan();
        assert!((t.weight_sum() - want).abs() < 1e-12);
    }

    #[test]
    fn triangle_nodes_inside_wedge() {
        let a = 1.0f64;
        let apex = std::f64::consts::PI / 3.0;
        let t = triangle_rule(a, apex, 0.0, QuadratureSpec::new(16).unwrap()).unwrap();
        let slope = (apex / 2.0).tan();
        for &(x, y) in &t.nodes {
            assert!(x > 0.0 && x < a);
            assert!(y.abs() < x * slope);
        }
    }

    #[test]
    fn segment_rule_runs_perpendicular_to_quadrature_axis() {
        let r = segment_rule(2.0f64, 0.0, (0.0, 0.0), QuadratureSpec::default()).unwrap();
        let wsum: f64 = r.weights.iter().sum();
        assert!((wsum - 2.0).abs() < 1e-13);
        // θ = 0 segment lies along the p-axis
        for &(q, p) in &r.points {
            assert!(q.abs() < 1e-15);
            assert!(p.abs() <= 1.0);
        }
    }
}
