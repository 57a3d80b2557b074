//! Phase-space region algebra: primitives, rigid transforms, and disjoint
//! unions, with exact areas, membership tests, outlines, and quadrature-node
//! generation.
//!
//! Angle conventions follow the operator algebra: `Segment { theta, .. }` and
//! `Line { theta, .. }` are labelled by the quadrature angle θ of the rotated
//! quadrature `Q_θ` occurring in their closed-form operators, so their
//! geometric support runs along the direction `θ + π/2`. A segment of `seg(L,
//! θ=0)` lies along the momentum axis, and `line(θ=0, offset)` is the vertical
//! line `q = offset`.

use crate::error::{Error, Result};
use crate::quadrature::{
    disk_rule, rectangle_rule, segment_rule, triangle_rule, LineRule, PlaneRule, QuadratureSpec,
};
use crate::scalar::Scalar;

/// Dimensionality of a region's support.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum RegionDim {
    /// Isolated points (measure zero; kernel evaluation, no integration).
    Point,
    /// One-dimensional supports: segments and lines (arc-length measure).
    Curve,
    /// Two-dimensional domains (Lebesgue area measure).
    Area,
}

/// Algebraic description of a phase-space domain.
#[derive(Clone, Debug, PartialEq)]
pub enum Region<T: Scalar> {
    /// The single point at the origin.
    PointOrigin,
    /// Straight segment of the given length whose closed-form operator uses
    /// the quadrature angle `theta`; support direction `theta + π/2` through
    /// `center`.
    Segment { length: T, theta: T, center: (T, T) },
    /// The full straight line `{ x·(cos θ, sin θ) = offset }` (support
    /// direction `theta + π/2`).
    Line { theta: T, offset: T },
    /// Axis-aligned rectangle `[x0, x0+a] × [k0, k0+b]`.
    Rectangle { x0: T, k0: T, a: T, b: T },
    /// Disk of the given positive diameter.
    Disk { center: (T, T), diameter: T },
    /// Isosceles triangle with apex at the origin, apothem `a` (apex-to-base
    /// distance along the symmetry axis), full apex angle `apex`, symmetry
    /// axis at angle `orientation` from the `+q` axis.
    IsoTriangle { a: T, apex: T, orientation: T },
    /// Regular `sides`-gon with apothem `a`, one side midpoint on the `+q`
    /// axis: the union of `sides` rotated copies of the canonical triangle.
    CanonicalPolygon { a: T, sides: usize },
    /// Square lattice of `(m+1)²` disks of diameter `d` centered at
    /// `(c + i·d, c + j·d)` for `0 ≤ i, j ≤ m`.
    DiskCluster { c: T, d: T, m: usize },
    /// Rotation about the origin by `angle`, applied to `inner`.
    Rotated { angle: T, inner: Box<Region<T>> },
    /// Point reflection through the origin, applied to `inner`.
    ReflectedOrigin { inner: Box<Region<T>> },
    /// Translation by `shift`, applied to `inner`.
    Displaced { shift: (T, T), inner: Box<Region<T>> },
    /// Union of pairwise-disjoint members (declared, not verified here;
    /// membership tests allow Monte-Carlo auditing).
    Union { members: Vec<Region<T>> },
}

/// Rigid motion `x ↦ R(angle)·x + shift` accumulated while walking transform
/// wrappers (a point reflection is the rotation by π).
#[derive(Clone, Copy, Debug)]
struct Motion<T: Scalar> {
    angle: T,
    shift: (T, T),
}

impl<T: Scalar> Motion<T> {
    fn identity() -> Self {
        Self {
            angle: T::zero(),
            shift: (T::zero(), T::zero()),
        }
    }

    fn apply(&self, p: (T, T)) -> (T, T) {
        let (c, s) = (self.angle.cos(), self.angle.sin());
        (
            c * p.0 - s * p.1 + self.shift.0,
            s * p.0 + c * p.1 + self.shift.1,
        )
    }

    /// `self ∘ rotation(phi)`.
    fn then_rotation(&self, phi: T) -> Self {
        Self {
            angle: self.angle + phi,
            shift: self.shift,
        }
    }

    /// `self ∘ translation(v)`.
    fn then_translation(&self, v: (T, T)) -> Self {
        let (c, s) = (self.angle.cos(), self.angle.sin());
        Self {
            angle: self.angle,
            shift: (
                self.shift.0 + c * v.0 - s * v.1,
                self.shift.1 + s * v.0 + c * v.1,
            ),
        }
    }
}

/// A one-dimensional support resolved to world coordinates.
#[derive(Clone, Debug, PartialEq)]
pub enum CurveComponent<T: Scalar> {
    Segment { length: T, theta: T, center: (T, T) },
    Line { theta: T, offset: T },
}

fn ensure_finite<T: Scalar>(vals: &[T], what: &'static str) -> Result<()> {
    if vals.iter().any(|v| !v.is_finite_scalar()) {
        return Err(Error::NonFinite(what));
    }
    Ok(())
}

fn ensure_positive<T: Scalar>(v: T, what: &str) -> Result<()> {
    if !(v > T::zero() && v.is_finite_scalar()) {
        return Err(Error::InvalidParameter(format!(
            "{what} must be positive and finite, got {}",
            v.to_f64_lossy()
        )));
    }
    Ok(())
}

impl<T: Scalar> Region<T> {
    pub fn point() -> Self {
        Region::PointOrigin
    }

    pub fn segment(length: T, theta: T) -> Result<Self> {
        Self::segment_at(length, theta, (T::zero(), T::zero()))
    }

    pub fn segment_at(length: T, theta: T, center: (T, T)) -> Result<Self> {
        ensure_positive(length, "segment length")?;
        ensure_finite(&[theta, center.0, center.1], "segment parameters")?;
        Ok(Region::Segment {
            length,
            theta,
            center,
        })
    }

    pub fn line(theta: T, offset: T) -> Result<Self> {
        ensure_finite(&[theta, offset], "line parameters")?;
        Ok(Region::Line { theta, offset })
    }

    pub fn rectangle(x0: T, k0: T, a: T, b: T) -> Result<Self> {
        ensure_finite(&[x0, k0], "rectangle corner")?;
        ensure_positive(a, "rectangle side a")?;
        ensure_positive(b, "rectangle side b")?;
        Ok(Region::Rectangle { x0, k0, a, b })
    }

    pub fn disk(cx: T, cy: T, diameter: T) -> Result<Self> {
        ensure_finite(&[cx, cy], "disk center")?;
        ensure_positive(diameter, "disk diameter")?;
        Ok(Region::Disk {
            center: (cx, cy),
            diameter,
        })
    }

    /// Canonical triangle of the regular `sides`-gon: apex angle `2π/sides`,
    /// symmetry axis along `+q`.
    pub fn triangle(a: T, sides: usize) -> Result<Self> {
        if sides < 3 {
            return Err(Error::InvalidParameter(format!(
                "polygon side count must be at least 3, got {sides}"
            )));
        }
        ensure_positive(a, "apothem")?;
        Ok(Region::IsoTriangle {
            a,
            apex: T::two_pi() / T::from_usize_lossy(sides),
            orientation: T::zero(),
        })
    }

    pub fn iso_triangle(a: T, apex: T, orientation: T) -> Result<Self> {
        ensure_positive(a, "apothem")?;
        ensure_finite(&[orientation], "triangle orientation")?;
        if !(apex > T::zero() && apex < T::pi()) {
            return Err(Error::InvalidParameter(format!(
                "apex angle must lie in (0, π), got {}",
                apex.to_f64_lossy()
            )));
        }
        Ok(Region::IsoTriangle {
            a,
            apex,
            orientation,
        })
    }

    pub fn polygon(a: T, sides: usize) -> Result<Self> {
        if sides < 3 {
            return Err(Error::InvalidParameter(format!(
                "polygon side count must be at least 3, got {sides}"
            )));
        }
        ensure_positive(a, "apothem")?;
        Ok(Region::CanonicalPolygon { a, sides })
    }

    pub fn disk_cluster(c: T, d: T, m: usize) -> Result<Self> {
        ensure_finite(&[c], "cluster anchor")?;
        ensure_positive(d, "cluster disk diameter")?;
        Ok(Region::DiskCluster { c, d, m })
    }

    pub fn rotated(angle: T, inner: Region<T>) -> Result<Self> {
        ensure_finite(&[angle], "rotation angle")?;
        Ok(Region::Rotated {
            angle,
            inner: Box::new(inner),
        })
    }

    pub fn reflected(inner: Region<T>) -> Self {
        Region::ReflectedOrigin {
            inner: Box::new(inner),
        }
    }

    pub fn displaced(s: T, t: T, inner: Region<T>) -> Result<Self> {
        ensure_finite(&[s, t], "displacement shift")?;
        Ok(Region::Displaced {
            shift: (s, t),
            inner: Box::new(inner),
        })
    }

    /// Union of members declared pairwise disjoint by the caller. Members
    /// must share a dimensionality; disjointness is not verified analytically
    /// (tests audit it by Monte-Carlo sampling of [`Region::contains`]).
    pub fn union(members: Vec<Region<T>>) -> Result<Self> {
        if members.is_empty() {
            return Err(Error::InvalidParameter(
                "union requires at least one member".into(),
            ));
        }
        let dim = members[0].dimensionality();
        if members.iter().any(|m| m.dimensionality() != dim) {
            return Err(Error::InvalidParameter(
                "union members must share a dimensionality".into(),
            ));
        }
        Ok(Region::Union { members })
    }

    /// Support dimensionality; transforms preserve it, unions are validated
    /// homogeneous at construction.
    pub fn dimensionality(&self) -> RegionDim {
        match self {
            Region::PointOrigin => RegionDim::Point,
            Region::Segment { .. } | Region::Line { .. } => RegionDim::Curve,
            Region::Rectangle { .. }
            | Region::Disk { .. }
            | Region::IsoTriangle { .. }
            | Region::CanonicalPolygon { .. }
            | Region::DiskCluster { .. } => RegionDim::Area,
            Region::Rotated { inner, .. }
            | Region::ReflectedOrigin { inner }
            | Region::Displaced { inner, .. } => inner.dimensionality(),
            Region::Union { members } => members[0].dimensionality(),
        }
    }

    /// Lebesgue measure of the support: area for two-dimensional regions,
    /// length for segments, zero for points. Lines have no finite measure.
    pub fn measure(&self) -> Result<T> {
        match self {
            Region::PointOrigin => Ok(T::zero()),
            Region::Segment { length, .. } => Ok(*length),
            Region::Line { .. } => Err(Error::InfiniteMeasure),
            Region::Rectangle { a, b, .. } => Ok(*a * *b),
            Region::Disk { diameter, .. } => {
                let r = *diameter * T::from_f64_lossy(0.5);
                Ok(T::pi() * r * r)
            }
            Region::IsoTriangle { a, apex, .. } => {
                Ok(*a * *a * (*apex * T::from_f64_lossy(0.5)).tan())
            }
            Region::CanonicalPolygon { a, sides } => {
                let m = T::from_usize_lossy(*sides);
                Ok(m * *a * *a * (T::pi() / m).tan())
            }
            Region::DiskCluster { d, m, .. } => {
                let r = *d * T::from_f64_lossy(0.5);
                let count = T::from_usize_lossy((*m + 1) * (*m + 1));
                Ok(count * T::pi() * r * r)
            }
            Region::Rotated { inner, .. }
            | Region::ReflectedOrigin { inner }
            | Region::Displaced { inner, .. } => inner.measure(),
            Region::Union { members } => {
                let mut s = T::zero();
                for r in members {
                    s += r.measure()?;
                }
                Ok(s)
            }
        }
    }

    /// Exact membership with boundaries counted as inside; transforms apply
    /// the inverse rigid map to the query point.
    pub fn contains(&self, q: T, p: T) -> bool {
        match self {
            Region::PointOrigin => q == T::zero() && p == T::zero(),
            Region::Segment {
                length,
                theta,
                center,
            } => {
                let (dx, dy) = (q - center.0, p - center.1);
                // coordinates along the support direction θ+π/2 and across it
                let along = -theta.sin() * dx + theta.cos() * dy;
                let across = theta.cos() * dx + theta.sin() * dy;
                across == T::zero() && along.abs() <= *length * T::from_f64_lossy(0.5)
            }
            Region::Line { theta, offset } => theta.cos() * q + theta.sin() * p == *offset,
            Region::Rectangle { x0, k0, a, b } => {
                q >= *x0 && q <= *x0 + *a && p >= *k0 && p <= *k0 + *b
            }
            Region::Disk { center, diameter } => {
                let (dx, dy) = (q - center.0, p - center.1);
                let r = *diameter * T::from_f64_lossy(0.5);
                dx * dx + dy * dy <= r * r
            }
            Region::IsoTriangle {
                a,
                apex,
                orientation,
            } => {
                let (c, s) = (orientation.cos(), orientation.sin());
                let x = c * q + s * p;
                let y = -s * q + c * p;
                x >= T::zero() && x <= *a && y.abs() <= x * (*apex * T::from_f64_lossy(0.5)).tan()
            }
            Region::CanonicalPolygon { a, sides } => {
                // inside iff every outward side normal sees the point within
                // apothem distance
                let n = *sides;
                for j in 0..n {
                    let ang = T::two_pi() * T::from_usize_lossy(j) / T::from_usize_lossy(n);
                    if ang.cos() * q + ang.sin() * p > *a {
                        return false;
                    }
                }
                true
            }
            Region::DiskCluster { c, d, m } => {
                let r = *d * T::from_f64_lossy(0.5);
                for i in 0..=*m {
                    for j in 0..=*m {
                        let cx = *c + *d * T::from_usize_lossy(i);
                        let cy = *c + *d * T::from_usize_lossy(j);
                        let (dx, dy) = (q - cx, p - cy);
                        if dx * dx + dy * dy <= r * r {
                            return true;
                        }
                    }
                }
                false
            }
            Region::Rotated { angle, inner } => {
                let (c, s) = (angle.cos(), angle.sin());
                inner.contains(c * q + s * p, -s * q + c * p)
            }
            Region::ReflectedOrigin { inner } => inner.contains(-q, -p),
            Region::Displaced { shift, inner } => inner.contains(q - shift.0, p - shift.1),
            Region::Union { members } => members.iter().any(|r| r.contains(q, p)),
        }
    }

    /// Axis-aligned bounding box `(qmin, pmin, qmax, pmax)`; `None` for
    /// unbounded supports (lines).
    pub fn bounding_box(&self) -> Option<(T, T, T, T)> {
        fn transform_box<T: Scalar>(
            bb: (T, T, T, T),
            f: impl Fn((T, T)) -> (T, T),
        ) -> (T, T, T, T) {
            let corners = [
                f((bb.0, bb.1)),
                f((bb.0, bb.3)),
                f((bb.2, bb.1)),
                f((bb.2, bb.3)),
            ];
            let mut out = (corners[0].0, corners[0].1, corners[0].0, corners[0].1);
            for &(x, y) in &corners[1..] {
                if x < out.0 {
                    out.0 = x;
                }
                if y < out.1 {
                    out.1 = y;
                }
                if x > out.2 {
                    out.2 = x;
                }
                if y > out.3 {
                    out.3 = y;
                }
            }
            out
        }
        let half = T::from_f64_lossy(0.5);
        match self {
            Region::PointOrigin => Some((T::zero(), T::zero(), T::zero(), T::zero())),
            Region::Segment {
                length,
                theta,
                center,
            } => {
                let (ux, uy) = (-theta.sin(), theta.cos());
                let (ex, ey) = ((*length * half * ux).abs(), (*length * half * uy).abs());
                Some((center.0 - ex, center.1 - ey, center.0 + ex, center.1 + ey))
            }
            Region::Line { .. } => None,
            Region::Rectangle { x0, k0, a, b } => Some((*x0, *k0, *x0 + *a, *k0 + *b)),
            Region::Disk { center, diameter } => {
                let r = *diameter * half;
                Some((center.0 - r, center.1 - r, center.0 + r, center.1 + r))
            }
            Region::IsoTriangle {
                a,
                apex,
                orientation,
            } => {
                let t = (*apex * half).tan();
                let base = transform_box((T::zero(), -*a * t, *a, *a * t), |p| {
                    let (c, s) = (orientation.cos(), orientation.sin());
                    (c * p.0 - s * p.1, s * p.0 + c * p.1)
                });
                Some(base)
            }
            Region::CanonicalPolygon { a, sides } => {
                // circumradius bound is exact enough for sampling boxes
                let rc = *a / (T::pi() / T::from_usize_lossy(*sides)).cos();
                Some((-rc, -rc, rc, rc))
            }
            Region::DiskCluster { c, d, m } => {
                let r = *d * half;
                let far = *c + *d * T::from_usize_lossy(*m);
                Some((*c - r, *c - r, far + r, far + r))
            }
            Region::Rotated { angle, inner } => inner.bounding_box().map(|bb| {
                transform_box(bb, |p| {
                    let (c, s) = (angle.cos(), angle.sin());
                    (c * p.0 - s * p.1, s * p.0 + c * p.1)
                })
            }),
            Region::ReflectedOrigin { inner } => inner
                .bounding_box()
                .map(|bb| (-bb.2, -bb.3, -bb.0, -bb.1)),
            Region::Displaced { shift, inner } => inner
                .bounding_box()
                .map(|bb| (bb.0 + shift.0, bb.1 + shift.1, bb.2 + shift.0, bb.3 + shift.1)),
            Region::Union { members } => {
                let mut acc: Option<(T, T, T, T)> = None;
                for m in members {
                    let bb = m.bounding_box()?;
                    acc = Some(match acc {
                        None => bb,
                        Some(a) => (
                            if bb.0 < a.0 { bb.0 } else { a.0 },
                            if bb.1 < a.1 { bb.1 } else { a.1 },
                            if bb.2 > a.2 { bb.2 } else { a.2 },
                            if bb.3 > a.3 { bb.3 } else { a.3 },
                        ),
                    });
                }
                acc
            }
        }
    }

    /// World-coordinate locations of all point components.
    ///
    /// Errors unless the region is zero-dimensional.
    pub fn point_components(&self) -> Result<Vec<(T, T)>> {
        if self.dimensionality() != RegionDim::Point {
            return Err(Error::NoQuadratureRule(
                "point components requested for a non-point region",
            ));
        }
        let mut out = Vec::new();
        self.walk_points(Motion::identity(), &mut out);
        Ok(out)
    }

    fn walk_points(&self, motion: Motion<T>, out: &mut Vec<(T, T)>) {
        match self {
            Region::PointOrigin => out.push(motion.apply((T::zero(), T::zero()))),
            Region::Rotated { angle, inner } => {
                inner.walk_points(motion.then_rotation(*angle), out)
            }
            Region::ReflectedOrigin { inner } => {
                inner.walk_points(motion.then_rotation(T::pi()), out)
            }
            Region::Displaced { shift, inner } => {
                inner.walk_points(motion.then_translation(*shift), out)
            }
            Region::Union { members } => {
                for m in members {
                    m.walk_points(motion, out);
                }
            }
            _ => {}
        }
    }

    /// World-coordinate segment and line components of a one-dimensional
    /// region, with transform wrappers folded into the parameters.
    pub fn curve_components(&self) -> Result<Vec<CurveComponent<T>>> {
        if self.dimensionality() != RegionDim::Curve {
            return Err(Error::NoQuadratureRule(
                "curve components requested for a non-curve region",
            ));
        }
        let mut out = Vec::new();
        self.walk_curves(Motion::identity(), &mut out);
        Ok(out)
    }

    fn walk_curves(&self, motion: Motion<T>, out: &mut Vec<CurveComponent<T>>) {
        match self {
            Region::Segment {
                length,
                theta,
                center,
            } => out.push(CurveComponent::Segment {
                length: *length,
                theta: *theta + motion.angle,
                center: motion.apply(*center),
            }),
            Region::Line { theta, offset } => {
                let theta2 = *theta + motion.angle;
                let offset2 = *offset + theta2.cos() * motion.shift.0 + theta2.sin() * motion.shift.1;
                out.push(CurveComponent::Line {
                    theta: theta2,
                    offset: offset2,
                });
            }
            Region::Rotated { angle, inner } => {
                inner.walk_curves(motion.then_rotation(*angle), out)
            }
            Region::ReflectedOrigin { inner } => {
                inner.walk_curves(motion.then_rotation(T::pi()), out)
            }
            Region::Displaced { shift, inner } => {
                inner.walk_curves(motion.then_translation(*shift), out)
            }
            Region::Union { members } => {
                for m in members {
                    m.walk_curves(motion, out);
                }
            }
            _ => {}
        }
    }

    /// Weighted quadrature nodes covering a two-dimensional region; weights
    /// sum to the area. One-dimensional and point regions have no plane rule.
    pub fn quadrature_nodes(&self, spec: QuadratureSpec) -> Result<PlaneRule<T>> {
        match self.dimensionality() {
            RegionDim::Area => {}
            RegionDim::Curve => {
                if matches!(self, Region::Line { .. }) {
                    return Err(Error::InfiniteMeasure);
                }
                return Err(Error::NoQuadratureRule(
                    "one-dimensional regions use segment rules and closed forms",
                ));
            }
            RegionDim::Point => {
                return Err(Error::NoQuadratureRule(
                    "point regions use the kernel directly",
                ))
            }
        }
        let mut rule = PlaneRule::empty();
        self.walk_plane(Motion::identity(), spec, &mut rule)?;
        Ok(rule)
    }

    fn walk_plane(
        &self,
        motion: Motion<T>,
        spec: QuadratureSpec,
        out: &mut PlaneRule<T>,
    ) -> Result<()> {
        let mut push = |mut rule: PlaneRule<T>| {
            for node in rule.nodes.iter_mut() {
                *node = motion.apply(*node);
            }
            out.extend(rule);
        };
        match self {
            Region::Rectangle { x0, k0, a, b } => {
                push(rectangle_rule(*x0, *k0, *a, *b, spec)?);
                Ok(())
            }
            Region::Disk { center, diameter } => {
                push(disk_rule(center.0, center.1, *diameter, spec)?);
                Ok(())
            }
            Region::IsoTriangle {
                a,
                apex,
                orientation,
            } => {
                push(triangle_rule(*a, *apex, *orientation, spec)?);
                Ok(())
            }
            Region::CanonicalPolygon { a, sides } => {
                let apex = T::two_pi() / T::from_usize_lossy(*sides);
                for j in 0..*sides {
                    let ori = T::two_pi() * T::from_usize_lossy(j) / T::from_usize_lossy(*sides);
                    push(triangle_rule(*a, apex, ori, spec)?);
                }
                Ok(())
            }
            Region::DiskCluster { c, d, m } => {
                for i in 0..=*m {
                    for j in 0..=*m {
                        let cx = *c + *d * T::from_usize_lossy(i);
                        let cy = *c + *d * T::from_usize_lossy(j);
                        push(disk_rule(cx, cy, *d, spec)?);
                    }
                }
                Ok(())
            }
            Region::Rotated { angle, inner } => {
                inner.walk_plane(motion.then_rotation(*angle), spec, out)
            }
            Region::ReflectedOrigin { inner } => {
                inner.walk_plane(motion.then_rotation(T::pi()), spec, out)
            }
            Region::Displaced { shift, inner } => {
                inner.walk_plane(motion.then_translation(*shift), spec, out)
            }
            Region::Union { members } => {
                for m in members {
                    m.walk_plane(motion, spec, out)?;
                }
                Ok(())
            }
            Region::PointOrigin | Region::Segment { .. } | Region::Line { .. } => Ok(()),
        }
    }

    /// Boundary polylines for plot emission (one closed or open polyline per
    /// connected component; lines are drawn over a finite window).
    pub fn outline(&self, samples: usize) -> Vec<Vec<(T, T)>> {
        let mut out = Vec::new();
        self.walk_outline(Motion::identity(), samples.max(2), &mut out);
        out
    }

    fn walk_outline(&self, motion: Motion<T>, samples: usize, out: &mut Vec<Vec<(T, T)>>) {
        let circle = |cx: T, cy: T, r: T, motion: &Motion<T>| -> Vec<(T, T)> {
            (0..=samples)
                .map(|k| {
                    let ang = T::two_pi() * T::from_usize_lossy(k) / T::from_usize_lossy(samples);
                    motion.apply((cx + r * ang.cos(), cy + r * ang.sin()))
                })
                .collect()
        };
        let closed = |pts: Vec<(T, T)>, motion: &Motion<T>| -> Vec<(T, T)> {
            let mut v: Vec<(T, T)> = pts.iter().map(|&p| motion.apply(p)).collect();
            if let Some(&first) = v.first() {
                v.push(first);
            }
            v
        };
        let half = T::from_f64_lossy(0.5);
        match self {
            Region::PointOrigin => out.push(vec![motion.apply((T::zero(), T::zero()))]),
            Region::Segment {
                length,
                theta,
                center,
            } => {
                let (ux, uy) = (-theta.sin(), theta.cos());
                let h = *length * half;
                out.push(vec![
                    motion.apply((center.0 - h * ux, center.1 - h * uy)),
                    motion.apply((center.0 + h * ux, center.1 + h * uy)),
                ]);
            }
            Region::Line { theta, offset } => {
                let (ux, uy) = (-theta.sin(), theta.cos());
                let (bx, by) = (theta.cos() * *offset, theta.sin() * *offset);
                let w = T::from_f64_lossy(8.0);
                out.push(vec![
                    motion.apply((bx - w * ux, by - w * uy)),
                    motion.apply((bx + w * ux, by + w * uy)),
                ]);
            }
            Region::Rectangle { x0, k0, a, b } => out.push(closed(
                vec![
                    (*x0, *k0),
                    (*x0 + *a, *k0),
                    (*x0 + *a, *k0 + *b),
                    (*x0, *k0 + *b),
                ],
                &motion,
            )),
            Region::Disk { center, diameter } => {
                out.push(circle(center.0, center.1, *diameter * half, &motion))
            }
            Region::IsoTriangle {
                a,
                apex,
                orientation,
            } => {
                let t = (*apex * half).tan();
                let (c, s) = (orientation.cos(), orientation.sin());
                let rot = |p: (T, T)| (c * p.0 - s * p.1, s * p.0 + c * p.1);
                out.push(closed(
                    vec![
                        rot((T::zero(), T::zero())),
                        rot((*a, -*a * t)),
                        rot((*a, *a * t)),
                    ],
                    &motion,
                ));
            }
            Region::CanonicalPolygon { a, sides } => {
                let n = *sides;
                let rc = *a / (T::pi() / T::from_usize_lossy(n)).cos();
                let pts: Vec<(T, T)> = (0..n)
                    .map(|j| {
                        let ang = T::pi() / T::from_usize_lossy(n)
                            + T::two_pi() * T::from_usize_lossy(j) / T::from_usize_lossy(n);
                        (rc * ang.cos(), rc * ang.sin())
                    })
                    .collect();
                out.push(closed(pts, &motion));
            }
            Region::DiskCluster { c, d, m } => {
                for i in 0..=*m {
                    for j in 0..=*m {
                        let cx = *c + *d * T::from_usize_lossy(i);
                        let cy = *c + *d * T::from_usize_lossy(j);
                        out.push(circle(cx, cy, *d * half, &motion));
                    }
                }
            }
            Region::Rotated { angle, inner } => {
                inner.walk_outline(motion.then_rotation(*angle), samples, out)
            }
            Region::ReflectedOrigin { inner } => {
                inner.walk_outline(motion.then_rotation(T::pi()), samples, out)
            }
            Region::Displaced { shift, inner } => {
                inner.walk_outline(motion.then_translation(*shift), samples, out)
            }
            Region::Union { members } => {
                for m in members {
                    m.walk_outline(motion, samples, out);
                }
            }
        }
    }

    /// Segment rules (one per segment component) for one-dimensional regions
    /// made of segments; errors if any component is a full line.
    pub fn segment_rules(&self, spec: QuadratureSpec) -> Result<Vec<LineRule<T>>> {
        let comps = self.curve_components()?;
        comps
            .into_iter()
            .map(|c| match c {
                CurveComponent::Segment {
                    length,
                    theta,
                    center,
                } => segment_rule(length, theta, center, spec),
                CurveComponent::Line { .. } => Err(Error::InfiniteMeasure),
            })
            .collect()
    }
}
