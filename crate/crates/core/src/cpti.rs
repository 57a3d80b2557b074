//! Completely positive trace-increasing maps as Kraus sums.
//!
//! A map here is a finite generator list `{V_i}`; it acts on an operator as
//! `ε(X) = Σ V_i X V_i†` and on a state through the dual `ε*(ρ) = Σ V_i† ρ V_i`.
//! The families provided (rotation, origin reflection, displacement, polygon,
//! west/north and their composed tile step) paste rigidly moved copies of a
//! region operator next to the original, which is how polygons are assembled
//! from triangles and how the plane is tiled by doubling rectangles or disk
//! clusters. Block unitary dilations realize each map as a conjugation on a
//! larger space followed by an ancilla partial trace, and the step matrices
//! transport eigenvalue vectors ("quasiprobability masses") across one map
//! application.

use nalgebra::{Complex, DMatrix, DVector};

use crate::error::{Error, Result};
use crate::fock::{
    ancilla_partial_trace, basic_operator, displacement_operator, hermitian_spectrum,
    BasicOperator, FockOperator, Spectrum, TruncationConfig,
};
use crate::geometry::Region;
use crate::scalar::Scalar;

/// Unitarity budget for generators, asserted on the effective block. Exact
/// rotations and the parity are unitary to rounding; truncated displacements
/// leak only near the cutoff, far from the effective block for moderate
/// shifts.
const GENERATOR_UNITARITY_TOL: f64 = 1e-6;

/// Hermiticity/trace budgets for states passed to the dual map.
const DUAL_STATE_HERMITICITY_TOL: f64 = 1e-8;
const DUAL_STATE_TRACE_TOL: f64 = 1e-9;

/// The map families built by [`make_map`].
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum MapKind<T> {
    /// `{1, R(φ)}` — pastes a copy rotated by `φ` about the origin.
    Rotation(T),
    /// `{1, Π}` — pastes the point-reflected copy.
    Reflection,
    /// `{1, D(q′,p′)}` — pastes a copy displaced by `(q′,p′)`.
    Displacement(T, T),
    /// `{R(2πj/M)}`, `j = 0..M−1` — assembles an `M`-gon from a wedge.
    Polygon(usize),
    /// `{1, D(q′,0)}` — doubles a domain along `+q`.
    West(T),
    /// `{1, D(0,p′)}` — doubles a domain along `+p`.
    North(T),
    /// `north(ν) ∘ west(μ)` stored flat as the four products
    /// `{1, D(μ,0), D(0,ν), D(0,ν)D(μ,0)}`, so the step-matrix formulas can
    /// be read term by term.
    TileStep(T, T),
}

/// A Kraus-sum map over the truncated Fock space.
#[derive(Clone, Debug)]
pub struct KrausMap<T: Scalar> {
    generators: Vec<FockOperator<T>>,
    label: String,
    effective_dim: usize,
}

impl<T: Scalar> KrausMap<T> {
    /// Wraps an explicit generator list. Every generator must act on the same
    /// space and be unitary on the effective block within `1e-6`.
    pub fn from_generators(
        generators: Vec<FockOperator<T>>,
        label: impl Into<String>,
        trunc: &TruncationConfig<T>,
    ) -> Result<Self> {
        if generators.is_empty() {
            return Err(Error::EmptyMap);
        }
        let d = trunc.dim();
        let tol = T::from_f64_lossy(GENERATOR_UNITARITY_TOL);
        let eye = FockOperator::identity(d);
        for g in &generators {
            if g.dim() != d {
                return Err(Error::DimensionMismatch {
                    left: g.dim(),
                    right: d,
                });
            }
            let gram = g.adjoint().matmul(g)?;
            let dev = gram.max_abs_diff_block(&eye, trunc.effective_dim())?;
            if dev > tol {
                return Err(Error::InvalidParameter(format!(
                    "kraus generator deviates from unitarity by {:.3e} on the effective block",
                    dev.to_f64_lossy()
                )));
            }
        }
        Ok(Self {
            generators,
            label: label.into(),
            effective_dim: trunc.effective_dim(),
        })
    }

    pub fn generators(&self) -> &[FockOperator<T>] {
        &self.generators
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    pub fn len(&self) -> usize {
        self.generators.len()
    }

    pub fn is_empty(&self) -> bool {
        self.generators.is_empty()
    }

    pub fn dim(&self) -> usize {
        self.generators[0].dim()
    }

    pub fn effective_dim(&self) -> usize {
        self.effective_dim
    }
}

/// Builds one of the standard map families.
pub fn make_map<T: Scalar>(kind: MapKind<T>, trunc: &TruncationConfig<T>) -> Result<KrausMap<T>> {
    let d = trunc.dim();
    let eye = FockOperator::identity(d);
    let check_finite = |v: T, what: &str| -> Result<()> {
        if v.is_finite_scalar() {
            Ok(())
        } else {
            Err(Error::InvalidParameter(format!("non-finite {what}")))
        }
    };
    match kind {
        MapKind::Rotation(phi) => {
            check_finite(phi, "rotation angle")?;
            let r = basic_operator(BasicOperator::Rotation(phi), trunc)?;
            KrausMap::from_generators(
                vec![eye, r],
                format!("rotation {}", phi.to_f64_lossy()),
                trunc,
            )
        }
        MapKind::Reflection => {
            let p = basic_operator(BasicOperator::Parity, trunc)?;
            KrausMap::from_generators(vec![eye, p], "reflection-origin", trunc)
        }
        MapKind::Displacement(q, p) => {
            check_finite(q, "displacement q")?;
            check_finite(p, "displacement p")?;
            let dqp = displacement_operator(q, p, trunc)?;
            KrausMap::from_generators(
                vec![eye, dqp],
                format!("displacement ({},{})", q.to_f64_lossy(), p.to_f64_lossy()),
                trunc,
            )
        }
        MapKind::Polygon(m) => {
            if m < 3 {
                return Err(Error::InvalidParameter(format!(
                    "polygon needs at least 3 sides, got {m}"
                )));
            }
            let step = T::two_pi() / T::from_usize_lossy(m);
            let mut gens = Vec::with_capacity(m);
            for j in 0..m {
                let angle = step * T::from_usize_lossy(j);
                gens.push(basic_operator(BasicOperator::Rotation(angle), trunc)?);
            }
            KrausMap::from_generators(gens, format!("polygon {m}"), trunc)
        }
        MapKind::West(q) => {
            check_finite(q, "west shift")?;
            let dq = displacement_operator(q, T::zero(), trunc)?;
            KrausMap::from_generators(vec![eye, dq], format!("west {}", q.to_f64_lossy()), trunc)
        }
        MapKind::North(p) => {
            check_finite(p, "north shift")?;
            let dp = displacement_operator(T::zero(), p, trunc)?;
            KrausMap::from_generators(vec![eye, dp], format!("north {}", p.to_f64_lossy()), trunc)
        }
        MapKind::TileStep(mu, nu) => {
            check_finite(mu, "tile-step mu")?;
            check_finite(nu, "tile-step nu")?;
            let dmu = displacement_operator(mu, T::zero(), trunc)?;
            let dnu = displacement_operator(T::zero(), nu, trunc)?;
            let both = dnu.matmul(&dmu)?;
            KrausMap::from_generators(
                vec![eye, dmu, dnu, both],
                format!("tile-step ({},{})", mu.to_f64_lossy(), nu.to_f64_lossy()),
                trunc,
            )
        }
    }
}

/// Composition `outer ∘ inner`: generator list of all products
/// `G_outer · G_inner` in fixed (outer-major) order.
pub fn compose<T: Scalar>(
    outer: &KrausMap<T>,
    inner: &KrausMap<T>,
    trunc: &TruncationConfig<T>,
) -> Result<KrausMap<T>> {
    if outer.dim() != inner.dim() {
        return Err(Error::DimensionMismatch {
            left: outer.dim(),
            right: inner.dim(),
        });
    }
    let mut gens = Vec::with_capacity(outer.len() * inner.len());
    for go in outer.generators() {
        for gi in inner.generators() {
            gens.push(go.matmul(gi)?);
        }
    }
    KrausMap::from_generators(gens, "composed", trunc)
}

/// `ε(X) = Σ V_i X V_i†`. Hermiticity of `X` is preserved.
pub fn apply_kraus_map<T: Scalar>(
    map: &KrausMap<T>,
    x: &FockOperator<T>,
) -> Result<FockOperator<T>> {
    if x.dim() != map.dim() {
        return Err(Error::DimensionMismatch {
            left: x.dim(),
            right: map.dim(),
        });
    }
    let mut acc = FockOperator::zero(x.dim());
    for g in map.generators() {
        acc = acc.add(&x.conjugated_by(g)?)?;
    }
    Ok(acc)
}

/// Dual map `ε*(ρ) = Σ V_i† ρ V_i`, so that `Tr(ρ ε(X)) = Tr(ε*(ρ) X)`.
///
/// The input must look like a state: hermitian and unit-trace.
pub fn dual_apply<T: Scalar>(map: &KrausMap<T>, rho: &FockOperator<T>) -> Result<FockOperator<T>> {
    if rho.dim() != map.dim() {
        return Err(Error::DimensionMismatch {
            left: rho.dim(),
            right: map.dim(),
        });
    }
    let herm = rho.hermitian_deviation();
    if herm > T::from_f64_lossy(DUAL_STATE_HERMITICITY_TOL) {
        return Err(Error::NotHermitian {
            deviation: herm.to_f64_lossy(),
            tol: DUAL_STATE_HERMITICITY_TOL,
        });
    }
    let tr = rho.trace();
    let tr_dev = cabs_diff_from_one(tr);
    if tr_dev > T::from_f64_lossy(DUAL_STATE_TRACE_TOL) {
        return Err(Error::InvalidParameter(format!(
            "dual map expects a unit-trace state, trace deviates by {:.3e}",
            tr_dev.to_f64_lossy()
        )));
    }
    let mut acc = FockOperator::zero(rho.dim());
    for g in map.generators() {
        acc = acc.add(&rho.conjugated_by(&g.adjoint())?)?;
    }
    Ok(acc)
}

fn cabs_diff_from_one<T: Scalar>(z: Complex<T>) -> T {
    let re = z.re - T::one();
    let im = z.im;
    (re * re + im * im).sqrt()
}

/// Block-unitary dilation of a two-generator map `{1, G}`:
///
/// ```text
///     V = [ 1   −G† ]
///         [ G    1  ]
/// ```
///
/// `V V† = diag(1 + G†G, 1 + GG†)`, which is `2·1` wherever `G` is unitary,
/// and `Tr_A(V (|0⟩⟨0| ⊗ X) V†) = X + G X G†` identically. The ancilla index
/// is slowest: row `a·dim + n` is `|a⟩ ⊗ |n⟩`.
pub fn dilation_unitary<T: Scalar>(map: &KrausMap<T>) -> Result<DMatrix<Complex<T>>> {
    if map.len() != 2 {
        return Err(Error::DilationShape(format!(
            "two-generator dilation needs exactly 2 generators, got {}",
            map.len()
        )));
    }
    let d = map.dim();
    let eye = FockOperator::identity(d);
    let first_dev = map.generators()[0].max_abs_diff_block(&eye, d)?;
    if first_dev > T::from_f64_lossy(1e-12) {
        return Err(Error::DilationShape(
            "two-generator dilation needs the identity as first generator".into(),
        ));
    }
    let g = map.generators()[1].entries();
    let mut v = DMatrix::from_element(2 * d, 2 * d, Complex::new(T::zero(), T::zero()));
    let one = Complex::new(T::one(), T::zero());
    for n in 0..d {
        v[(n, n)] = one;
        v[(d + n, d + n)] = one;
    }
    for r in 0..d {
        for c in 0..d {
            v[(r, d + c)] = -g[(c, r)].conj();
            v[(d + r, c)] = g[(r, c)];
        }
    }
    Ok(v)
}

/// Block dilation of the `M`-sided polygon map: block `(j,k)` is
/// `ω^{jk} R(2πj/M)` with `ω = e^{2πi/M}`. The discrete-Fourier column phases
/// make `V V† = M·1` exact, and `Tr_A(V (|k⟩⟨k| ⊗ X) V†)` equals the polygon
/// Kraus sum for every ancilla index `k`.
pub fn polygon_dilation<T: Scalar>(
    sides: usize,
    trunc: &TruncationConfig<T>,
) -> Result<DMatrix<Complex<T>>> {
    if sides < 3 {
        return Err(Error::InvalidParameter(format!(
            "polygon needs at least 3 sides, got {sides}"
        )));
    }
    let d = trunc.dim();
    let m = sides;
    let step = T::two_pi() / T::from_usize_lossy(m);
    let mut v = DMatrix::from_element(m * d, m * d, Complex::new(T::zero(), T::zero()));
    for j in 0..m {
        let angle = step * T::from_usize_lossy(j);
        let rj = basic_operator(BasicOperator::Rotation(angle), trunc)?;
        for k in 0..m {
            // ω^{jk} = e^{2πi·jk/M}, reduced mod M to keep the argument small
            let phase_angle = step * T::from_usize_lossy((j * k) % m);
            let phase = Complex::new(phase_angle.cos(), phase_angle.sin());
            for n in 0..d {
                v[(j * d + n, k * d + n)] = phase * rj.entries()[(n, n)];
            }
        }
    }
    Ok(v)
}

/// Applies a dilation: embeds `X` against the ancilla basis state
/// `|ancilla_index⟩`, conjugates by `v`, and traces out the ancilla.
pub fn dilated_apply<T: Scalar>(
    v: &DMatrix<Complex<T>>,
    x: &FockOperator<T>,
    ancilla_index: usize,
    trunc: &TruncationConfig<T>,
) -> Result<FockOperator<T>> {
    let d = x.dim();
    if d != trunc.dim() || v.nrows() != v.ncols() || v.nrows() % d != 0 {
        return Err(Error::DilationShape(format!(
            "dilation block size {}x{} does not stack dimension {d}",
            v.nrows(),
            v.ncols()
        )));
    }
    let m = v.nrows() / d;
    if ancilla_index >= m {
        return Err(Error::DilationShape(format!(
            "ancilla index {ancilla_index} outside ancilla dimension {m}"
        )));
    }
    let mut joint = DMatrix::from_element(m * d, m * d, Complex::new(T::zero(), T::zero()));
    let base = ancilla_index * d;
    for r in 0..d {
        for c in 0..d {
            joint[(base + r, base + c)] = x.entries()[(r, c)];
        }
    }
    let conjugated = v * joint * v.adjoint();
    ancilla_partial_trace(&conjugated, m, trunc)
}

/// Eigenvalue step matrix for one map application: with `V`, `W` the
/// eigenvector matrices of `X` and `ε(X)`,
///
/// ```text
///     S = Σ_G |W† G V|∘²   (elementwise squared modulus)
/// ```
///
/// so that `λ′ = S λ` holds identically and every row/column sums to the
/// generator count wherever the generators are unitary.
#[derive(Clone, Debug)]
pub struct StepMatrix<T: Scalar> {
    entries: DMatrix<T>,
    expected_sum: T,
    effective_dim: usize,
}

impl<T: Scalar> StepMatrix<T> {
    pub fn entries(&self) -> &DMatrix<T> {
        &self.entries
    }

    pub fn expected_sum(&self) -> T {
        self.expected_sum
    }

    pub fn dim(&self) -> usize {
        self.entries.nrows()
    }

    pub fn effective_dim(&self) -> usize {
        self.effective_dim
    }

    /// Most negative entry (zero for an exactly non-negative matrix).
    pub fn min_entry(&self) -> T {
        let mut m = T::zero();
        for v in self.entries.iter() {
            if *v < m {
                m = *v;
            }
        }
        m
    }

    /// Largest deviation of a full row sum from the expected sum, over the
    /// first `block` rows.
    pub fn row_sum_deviation(&self, block: usize) -> T {
        let b = block.min(self.dim());
        let mut worst = T::zero();
        for r in 0..b {
            let mut s = T::zero();
            for c in 0..self.dim() {
                s += self.entries[(r, c)];
            }
            let dev = (s - self.expected_sum).abs();
            if dev > worst {
                worst = dev;
            }
        }
        worst
    }

    /// Largest deviation of a full column sum from the expected sum, over the
    /// first `block` columns.
    pub fn col_sum_deviation(&self, block: usize) -> T {
        let b = block.min(self.dim());
        let mut worst = T::zero();
        for c in 0..b {
            let mut s = T::zero();
            for r in 0..self.dim() {
                s += self.entries[(r, c)];
            }
            let dev = (s - self.expected_sum).abs();
            if dev > worst {
                worst = dev;
            }
        }
        worst
    }

    /// `S · λ`.
    pub fn apply(&self, lambda: &DVector<T>) -> Result<DVector<T>> {
        if lambda.len() != self.dim() {
            return Err(Error::LengthMismatch {
                left: lambda.len(),
                right: self.dim(),
            });
        }
        Ok(&self.entries * lambda)
    }
}

/// Builds the step matrix from a map and the spectra of its input and output.
pub fn step_matrix<T: Scalar>(
    map: &KrausMap<T>,
    input: &Spectrum<T>,
    output: &Spectrum<T>,
) -> Result<StepMatrix<T>> {
    let d = map.dim();
    if input.eigenvectors().nrows() != d || output.eigenvectors().nrows() != d {
        return Err(Error::DimensionMismatch {
            left: input.eigenvectors().nrows(),
            right: d,
        });
    }
    let w_adj = output.eigenvectors().adjoint();
    let mut s = DMatrix::from_element(d, d, T::zero());
    for g in map.generators() {
        let m = &w_adj * g.entries() * input.eigenvectors();
        for r in 0..d {
            for c in 0..d {
                s[(r, c)] += m[(r, c)].norm_sqr();
            }
        }
    }
    Ok(StepMatrix {
        entries: s,
        expected_sum: T::from_usize_lossy(map.len()),
        effective_dim: map.effective_dim(),
    })
}

/// Builds the step matrix with headroom above the operator's cutoff.
///
/// Zero-pads `x` into the `working` truncation, rebuilds the map there,
/// applies it, and assembles the step matrix from the padded spectra. The
/// row/column-sum structure (`2` per generator pair, `4` per tile step) is a
/// property of the maps themselves; evaluating at the original cutoff clips
/// the displaced boundary states and visibly breaks the sums, while a factor
/// of two of headroom restores them to rounding for moderate shifts. The
/// padded input spectrum begins with the same leading eigenvalues as the
/// unpadded one (the pad contributes exact zeros, which sort below every
/// positive eigenvalue), so leading-index assertions refer to the original
/// operator. Returns the step matrix together with the padded input and
/// output spectra.
pub fn step_matrix_with_headroom<T: Scalar>(
    kind: MapKind<T>,
    x: &FockOperator<T>,
    working: &TruncationConfig<T>,
) -> Result<(StepMatrix<T>, Spectrum<T>, Spectrum<T>)> {
    let padded = x.zero_padded(working.dim())?;
    let map = make_map(kind, working)?;
    let out = apply_kraus_map(&map, &padded)?;
    let tol = T::from_f64_lossy(1e-8);
    let v = hermitian_spectrum(&padded, tol)?;
    let w = hermitian_spectrum(&out, tol)?;
    let s = step_matrix(&map, &v, &w)?;
    Ok((s, v, w))
}

/// Transfer of diagonal entries across one map application:
/// `out_k = Σ_G Σ_j |G_{kj}|² d_j`, which equals
/// `diag(ε(diag(d)))` entry by entry.
pub fn diagonal_transfer<T: Scalar>(
    map: &KrausMap<T>,
    diagonal: &DVector<T>,
) -> Result<DVector<T>> {
    let d = map.dim();
    if diagonal.len() != d {
        return Err(Error::LengthMismatch {
            left: diagonal.len(),
            right: d,
        });
    }
    let mut out = DVector::from_element(d, T::zero());
    for g in map.generators() {
        for r in 0..d {
            let mut s = T::zero();
            for c in 0..d {
                s += g.entries()[(r, c)].norm_sqr() * diagonal[c];
            }
            out[r] += s;
        }
    }
    Ok(out)
}

/// One record of a tiling run.
#[derive(Clone, Debug)]
pub struct TileRecord<T: Scalar> {
    /// Domain covered after this step.
    pub region: Region<T>,
    /// Operator after this step.
    pub operator: FockOperator<T>,
    /// Full deterministic spectrum of the operator.
    pub spectrum: Spectrum<T>,
    /// Smallest eigenvalue (quasiprobability-mass lower bound).
    pub lambda_min: T,
    /// Largest eigenvalue (quasiprobability-mass upper bound).
    pub lambda_max: T,
    /// Worst row-sum deviation of the step matrix that produced this record,
    /// measured on the effective block. `None` for the initial record.
    pub row_sum_deviation: Option<T>,
    /// Worst column-sum deviation, as above.
    pub col_sum_deviation: Option<T>,
    /// Eigenvalues of the zero-padded input at the step's working dimension.
    /// Sum-rule comparisons (eigenvalue-vector majorization) must use these
    /// rather than bare-cutoff spectra: with headroom the map is isometric on
    /// everything the input touches, so the sum rules close to rounding,
    /// while clipped spectra miss them by the amplified truncation tail.
    /// `None` for the initial record.
    pub step_input_eigenvalues: Option<DVector<T>>,
    /// Eigenvalues of the step output at the working dimension, as above.
    pub step_output_eigenvalues: Option<DVector<T>>,
}

/// The full history of a west–north tiling run.
#[derive(Clone, Debug)]
pub struct TilingTrace<T: Scalar> {
    steps: Vec<TileRecord<T>>,
    effective_dim: usize,
}

impl<T: Scalar> TilingTrace<T> {
    /// Assembles a trace from prebuilt records, e.g. reloaded from disk.
    pub fn from_records(steps: Vec<TileRecord<T>>, effective_dim: usize) -> Result<Self> {
        if effective_dim == 0 || steps.iter().any(|r| r.operator.dim() < effective_dim) {
            return Err(Error::InvalidParameter(format!(
                "effective dim {effective_dim} must be positive and fit every record"
            )));
        }
        Ok(Self {
            steps,
            effective_dim,
        })
    }

    pub fn steps(&self) -> &[TileRecord<T>] {
        &self.steps
    }

    /// Block size on which the trace's diagnostics were certified.
    pub fn effective_dim(&self) -> usize {
        self.effective_dim
    }

    pub fn len(&self) -> usize {
        self.steps.len()
    }

    pub fn is_empty(&self) -> bool {
        self.steps.is_empty()
    }
}

/// Doubles a domain `steps` times with tile-step maps.
///
/// A rectangle `[x0, x0+A] × [k0, k0+B]` doubles both sides per step
/// (`μ_k = 2^{k−1}A`, `ν_k = 2^{k−1}B`), growing toward `+q` and `+p`. An
/// origin-centered disk of diameter `δ` grows into the square cluster of
/// `(2^k)²` disks with lattice spacing `δ` (`μ_k = ν_k = 2^{k−1}δ`). Every
/// step quadruples the covered area. The initial operator `x0` must represent
/// `r0` at the same truncation.
pub fn tile_run<T: Scalar>(
    x0: &FockOperator<T>,
    r0: &Region<T>,
    steps: usize,
    trunc: &TruncationConfig<T>,
) -> Result<TilingTrace<T>> {
    if x0.dim() != trunc.dim() {
        return Err(Error::DimensionMismatch {
            left: x0.dim(),
            right: trunc.dim(),
        });
    }
    enum Mode<T> {
        Rect { x0: T, k0: T, a: T, b: T },
        Disk { diameter: T },
    }
    let mode = match r0 {
        Region::Rectangle { x0, k0, a, b } => Mode::Rect {
            x0: *x0,
            k0: *k0,
            a: *a,
            b: *b,
        },
        Region::Disk { center, diameter } => {
            if center.0 != T::zero() || center.1 != T::zero() {
                return Err(Error::TilingSeed(
                    "disk tiling starts from an origin-centered disk".into(),
                ));
            }
            Mode::Disk {
                diameter: *diameter,
            }
        }
        _ => {
            return Err(Error::TilingSeed(
                "tiling starts from a rectangle or an origin-centered disk".into(),
            ))
        }
    };
    let spec_tol = T::from_f64_lossy(1e-8);
    let first = hermitian_spectrum(x0, spec_tol)?;
    let mut records = vec![TileRecord {
        region: r0.clone(),
        operator: x0.clone(),
        spectrum: first.clone(),
        lambda_min: first.eigenvalues()[x0.dim() - 1],
        lambda_max: first.eigenvalues()[0],
        row_sum_deviation: None,
        col_sum_deviation: None,
        step_input_eigenvalues: None,
        step_output_eigenvalues: None,
    }];
    let mut current = x0.clone();
    let mut scale = T::one();
    for k in 1..=steps {
        let (mu, nu, region) = match &mode {
            Mode::Rect { x0, k0, a, b } => {
                let mu = scale * *a;
                let nu = scale * *b;
                let two = T::from_f64_lossy(2.0);
                let grown = Region::rectangle(*x0, *k0, two * mu, two * nu)?;
                (mu, nu, grown)
            }
            Mode::Disk { diameter } => {
                let mu = scale * *diameter;
                let m = (1usize << k) - 1;
                let grown = Region::disk_cluster(T::zero(), *diameter, m)?;
                (mu, mu, grown)
            }
        };
        // Each step runs with headroom above the cutoff: the shifts double
        // every round, and at the bare dimension the displaced boundary
        // states clip, corrupting both the generator-unitarity gate and the
        // step-matrix sums. The map acts on the zero-padded operator at the
        // working dimension (certified on the original effective block) and
        // the result is cropped back.
        let working_dim = (2 * trunc.dim()).min(256.max(trunc.dim()));
        let working =
            TruncationConfig::new(working_dim)?.with_effective_dim(trunc.effective_dim())?;
        let padded = current.zero_padded(working.dim())?;
        let map = make_map(MapKind::TileStep(mu, nu), &working)?;
        let out = apply_kraus_map(&map, &padded)?;
        let next = out.truncated(trunc.dim())?;
        let spectrum = hermitian_spectrum(&next, spec_tol)?;
        let before = hermitian_spectrum(&padded, spec_tol)?;
        let after = hermitian_spectrum(&out, spec_tol)?;
        let step = step_matrix(&map, &before, &after)?;
        let eff = trunc.effective_dim();
        records.push(TileRecord {
            region,
            operator: next.clone(),
            spectrum: spectrum.clone(),
            lambda_min: spectrum.eigenvalues()[next.dim() - 1],
            lambda_max: spectrum.eigenvalues()[0],
            row_sum_deviation: Some(step.row_sum_deviation(eff)),
            col_sum_deviation: Some(step.col_sum_deviation(eff)),
            step_input_eigenvalues: Some(before.eigenvalues().clone()),
            step_output_eigenvalues: Some(after.eigenvalues().clone()),
        });
        current = next;
        scale = scale + scale;
    }
    Ok(TilingTrace {
        steps: records,
        effective_dim: trunc.effective_dim(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::quadrature::QuadratureSpec;
    use crate::regionop::build_region_operator;
    use nalgebra::DVector;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    type Cfg = TruncationConfig<f64>;

    fn cfg(d: usize) -> Cfg {
        Cfg::new(d).unwrap()
    }

    fn cx(re: f64, im: f64) -> Complex<f64> {
        Complex::new(re, im)
    }

    fn random_hermitian(dim: usize, rng: &mut ChaCha8Rng) -> FockOperator<f64> {
        let mut m = DMatrix::from_element(dim, dim, cx(0.0, 0.0));
        for r in 0..dim {
            for c in r..dim {
                if r == c {
                    m[(r, c)] = cx(rng.gen_range(-1.0..1.0), 0.0);
                } else {
                    let z = cx(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0));
                    m[(r, c)] = z;
                    m[(c, r)] = z.conj();
                }
            }
        }
        FockOperator::from_matrix(m, &cfg(dim)).unwrap()
    }

    fn random_state(dim: usize, rng: &mut ChaCha8Rng) -> FockOperator<f64> {
        // ρ = A A† / Tr(A A†) is positive semidefinite with unit trace
        let mut a = DMatrix::from_element(dim, dim, cx(0.0, 0.0));
        for r in 0..dim {
            for c in 0..dim {
                a[(r, c)] = cx(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0));
            }
        }
        let rho = &a * a.adjoint();
        let tr: f64 = (0..dim).map(|n| rho[(n, n)].re).sum();
        FockOperator::from_matrix(rho / cx(tr, 0.0), &cfg(dim)).unwrap()
    }

    #[test]
    fn polygon_map_generators_are_rotations() {
        let c = cfg(8);
        let map = make_map(MapKind::Polygon(6), &c).unwrap();
        assert_eq!(map.len(), 6);
        assert_eq!(map.label(), "polygon 6");
        for (j, g) in map.generators().iter().enumerate() {
            for n in 0..8 {
                let want = Complex::from_polar(1.0, std::f64::consts::PI * (j * n) as f64 / 3.0);
                assert!((g.entries()[(n, n)] - want).norm() < 1e-14);
            }
        }
    }

    #[test]
    fn zero_displacement_doubles() {
        let c = cfg(12);
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let x = random_hermitian(12, &mut rng);
        let map = make_map(MapKind::Displacement(0.0, 0.0), &c).unwrap();
        let y = apply_kraus_map(&map, &x).unwrap();
        let want = x.scale_real(2.0);
        assert!(y.max_abs_diff_block(&want, 12).unwrap() < 1e-14);
    }

    #[test]
    fn zero_rotation_doubles() {
        let c = cfg(10);
        let mut rng = ChaCha8Rng::seed_from_u64(8);
        let x = random_hermitian(10, &mut rng);
        let map = make_map(MapKind::Rotation(0.0), &c).unwrap();
        let y = apply_kraus_map(&map, &x).unwrap();
        assert!(y.max_abs_diff_block(&x.scale_real(2.0), 10).unwrap() < 1e-14);
    }

    #[test]
    fn tile_step_equals_composed_north_west() {
        let c = cfg(24);
        let flat = make_map(MapKind::TileStep(0.7, 0.4), &c).unwrap();
        let west = make_map(MapKind::West(0.7), &c).unwrap();
        let north = make_map(MapKind::North(0.4), &c).unwrap();
        let composed = compose(&north, &west, &c).unwrap();
        assert_eq!(flat.len(), 4);
        assert_eq!(composed.len(), 4);
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        let x = random_hermitian(24, &mut rng);
        let a = apply_kraus_map(&flat, &x).unwrap();
        let b = apply_kraus_map(&composed, &x).unwrap();
        assert!(a.max_abs_diff_block(&b, 24).unwrap() < 1e-12);
    }

    #[test]
    fn polygon_trace_scales_by_side_count() {
        let c = cfg(20);
        let mut rng = ChaCha8Rng::seed_from_u64(10);
        let x = random_hermitian(20, &mut rng);
        for m in [3usize, 5, 6] {
            let map = make_map(MapKind::Polygon(m), &c).unwrap();
            let y = apply_kraus_map(&map, &x).unwrap();
            let want = x.trace().re * m as f64;
            let got = y.trace().re;
            assert!(
                (got - want).abs() <= 1e-9 * want.abs().max(1.0),
                "m={m}: {got} vs {want}"
            );
        }
    }

    #[test]
    fn duality_identity_for_every_kind() {
        let c = cfg(16);
        let kinds: Vec<MapKind<f64>> = vec![
            MapKind::Rotation(0.9),
            MapKind::Reflection,
            MapKind::Displacement(0.4, -0.3),
            MapKind::Polygon(5),
            MapKind::West(0.6),
            MapKind::North(-0.5),
            MapKind::TileStep(0.5, 0.5),
        ];
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for kind in kinds {
            let map = make_map(kind, &c).unwrap();
            for _ in 0..3 {
                let rho = random_state(16, &mut rng);
                let x = random_hermitian(16, &mut rng);
                let lhs = rho.matmul(&apply_kraus_map(&map, &x).unwrap()).unwrap();
                let rhs = dual_apply(&map, &rho).unwrap().matmul(&x).unwrap();
                let diff = (lhs.trace() - rhs.trace()).norm();
                assert!(diff < 1e-10, "kind {}: {diff:.3e}", map.label());
            }
        }
    }

    #[test]
    fn dual_of_rotation_rotates_back() {
        let c = cfg(12);
        let map = make_map(MapKind::Rotation(0.7), &c).unwrap();
        let back = make_map(MapKind::Rotation(-0.7), &c).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(12);
        let rho = random_state(12, &mut rng);
        let a = dual_apply(&map, &rho).unwrap();
        let b = apply_kraus_map(&back, &rho).unwrap();
        assert!(a.max_abs_diff_block(&b, 12).unwrap() < 1e-12);
    }

    #[test]
    fn dual_rejects_non_state() {
        let c = cfg(8);
        let map = make_map(MapKind::Reflection, &c).unwrap();
        let not_normalized = FockOperator::<f64>::identity(8);
        assert!(dual_apply(&map, &not_normalized).is_err());
    }

    #[test]
    fn reflection_dilation_is_exact() {
        let c = cfg(16);
        let map = make_map(MapKind::Reflection, &c).unwrap();
        let v = dilation_unitary(&map).unwrap();
        let gram = &v * v.adjoint();
        let mut dev = 0.0f64;
        for r in 0..32 {
            for cc in 0..32 {
                let want = if r == cc { cx(2.0, 0.0) } else { cx(0.0, 0.0) };
                dev = dev.max((gram[(r, cc)] - want).norm());
            }
        }
        assert!(dev < 1e-14, "VV' deviates from 2*identity by {dev:.3e}");
        let mut rng = ChaCha8Rng::seed_from_u64(13);
        let x = random_hermitian(16, &mut rng);
        let via_dilation = dilated_apply(&v, &x, 0, &c).unwrap();
        let via_kraus = apply_kraus_map(&map, &x).unwrap();
        assert!(via_dilation.max_abs_diff_block(&via_kraus, 16).unwrap() < 1e-12);
    }

    #[test]
    fn west_dilation_matches_block_layout() {
        let c = cfg(20);
        let map = make_map(MapKind::West(0.8), &c).unwrap();
        let v = dilation_unitary(&map).unwrap();
        let d_op = displacement_operator(0.8, 0.0, &c).unwrap();
        for r in 0..20 {
            for cc in 0..20 {
                let eye = if r == cc { cx(1.0, 0.0) } else { cx(0.0, 0.0) };
                assert_eq!(v[(r, cc)], eye);
                assert_eq!(v[(20 + r, 20 + cc)], eye);
                assert_eq!(v[(20 + r, cc)], d_op.entries()[(r, cc)]);
                assert_eq!(v[(r, 20 + cc)], -d_op.entries()[(cc, r)].conj());
            }
        }
        let mut rng = ChaCha8Rng::seed_from_u64(14);
        let x = random_hermitian(20, &mut rng);
        let via_dilation = dilated_apply(&v, &x, 0, &c).unwrap();
        let via_kraus = apply_kraus_map(&map, &x).unwrap();
        assert!(via_dilation.max_abs_diff_block(&via_kraus, 20).unwrap() < 1e-12);
    }

    #[test]
    fn dilation_rejects_bad_shapes() {
        let c = cfg(8);
        let polygon = make_map(MapKind::Polygon(3), &c).unwrap();
        assert!(matches!(
            dilation_unitary(&polygon),
            Err(Error::DilationShape(_))
        ));
        // first generator not the identity
        let parity = basic_operator(BasicOperator::Parity, &c).unwrap();
        let swapped = KrausMap::from_generators(
            vec![parity, FockOperator::identity(8)],
            "swapped",
            &c,
        )
        .unwrap();
        assert!(matches!(
            dilation_unitary(&swapped),
            Err(Error::DilationShape(_))
        ));
    }

    #[test]
    fn polygon_dilation_reproduces_kraus_sum() {
        let c = cfg(12);
        let v = polygon_dilation(6, &c).unwrap();
        let gram = &v * v.adjoint();
        let mut dev = 0.0f64;
        for r in 0..72 {
            for cc in 0..72 {
                let want = if r == cc { cx(6.0, 0.0) } else { cx(0.0, 0.0) };
                dev = dev.max((gram[(r, cc)] - want).norm());
            }
        }
        assert!(dev < 1e-13, "VV' deviates from 6*identity by {dev:.3e}");
        let map = make_map(MapKind::Polygon(6), &c).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(15);
        let x = random_hermitian(12, &mut rng);
        let want = apply_kraus_map(&map, &x).unwrap();
        for k in [0usize, 2] {
            let got = dilated_apply(&v, &x, k, &c).unwrap();
            assert!(got.max_abs_diff_block(&want, 12).unwrap() < 1e-12);
        }
        // identity input: result is M * identity
        let got = dilated_apply(&v, &FockOperator::identity(12), 0, &c).unwrap();
        assert!(
            got.max_abs_diff_block(&FockOperator::identity(12).scale_real(6.0), 12)
                .unwrap()
                < 1e-12
        );
    }

    #[test]
    fn hexagon_from_triangle_matches_direct_quadrature() {
        let c = cfg(48);
        let a = 0.75f64.sqrt();
        let triangle = Region::triangle(a, 6).unwrap();
        let hexagon = Region::polygon(a, 6).unwrap();
        let x_tri = build_region_operator(&triangle, &c, QuadratureSpec::default()).unwrap();
        let x_hex = build_region_operator(&hexagon, &c, QuadratureSpec::default()).unwrap();
        // first map pastes the ±60° rotated copies, second the point-reflected
        // half
        let third = std::f64::consts::PI / 3.0;
        let eps1 = KrausMap::from_generators(
            vec![
                FockOperator::identity(48),
                basic_operator(BasicOperator::Rotation(third), &c).unwrap(),
                basic_operator(BasicOperator::Rotation(-third), &c).unwrap(),
            ],
            "triangle-fan",
            &c,
        )
        .unwrap();
        let eps2 = make_map(MapKind::Reflection, &c).unwrap();
        let half = apply_kraus_map(&eps1, &x_tri).unwrap();
        let built = apply_kraus_map(&eps2, &half).unwrap();
        let diff = built.frobenius_diff_block(&x_hex, c.effective_dim()).unwrap();
        assert!(diff < 1e-4, "hexagon mismatch {diff:.3e}");
        // the composed map is the 6-rotation polygon map
        let composed = compose(&eps2, &eps1, &c).unwrap();
        let polygon = make_map(MapKind::Polygon(6), &c).unwrap();
        let via_composed = apply_kraus_map(&composed, &x_tri).unwrap();
        let via_polygon = apply_kraus_map(&polygon, &x_tri).unwrap();
        assert!(via_composed.max_abs_diff_block(&via_polygon, 48).unwrap() < 1e-12);
    }

    #[test]
    fn step_matrix_identity_generators() {
        let c = cfg(16);
        let mut rng = ChaCha8Rng::seed_from_u64(16);
        let x = random_hermitian(16, &mut rng);
        let map = make_map(MapKind::Displacement(0.0, 0.0), &c).unwrap();
        let y = apply_kraus_map(&map, &x).unwrap();
        let v = hermitian_spectrum(&x, 1e-9).unwrap();
        let w = hermitian_spectrum(&y, 1e-9).unwrap();
        let s = step_matrix(&map, &v, &w).unwrap();
        assert!(s.row_sum_deviation(16) < 1e-12);
        assert!(s.col_sum_deviation(16) < 1e-12);
        assert!(s.min_entry() > -1e-12);
        let lhs = s.apply(v.eigenvalues()).unwrap();
        for i in 0..16 {
            assert!((lhs[i] - w.eigenvalues()[i]).abs() < 1e-12);
        }
    }

    #[test]
    fn tile_step_matrix_sums_and_update() {
        let c = cfg(64);
        let rect = Region::rectangle(0.0, 0.0, 0.5, 0.5).unwrap();
        let x = build_region_operator(&rect, &c, QuadratureSpec::default()).unwrap();
        let working = cfg(128);
        let (s, v, w) =
            step_matrix_with_headroom(MapKind::TileStep(0.5, 0.5), &x, &working).unwrap();
        let eff = c.effective_dim();
        assert!(s.min_entry() > -1e-12);
        let row_dev = s.row_sum_deviation(eff);
        let col_dev = s.col_sum_deviation(eff);
        assert!(row_dev < 1e-3, "row sums deviate by {row_dev:.3e}");
        assert!(col_dev < 1e-3, "col sums deviate by {col_dev:.3e}");
        // eigenvalue update is an identity of the finite matrices
        let lhs = s.apply(v.eigenvalues()).unwrap();
        for i in 0..eff {
            assert!(
                (lhs[i] - w.eigenvalues()[i]).abs() < 1e-6,
                "idx {i}: {} vs {}",
                lhs[i],
                w.eigenvalues()[i]
            );
        }
        // the padded input spectrum leads with the unpadded eigenvalues
        let direct = hermitian_spectrum(&x, 1e-8).unwrap();
        for i in 0..eff {
            assert!((v.eigenvalues()[i] - direct.eigenvalues()[i]).abs() < 1e-12);
        }
    }

    #[test]
    fn disk_step_matrix_in_index_order() {
        let c = cfg(32);
        let disk = crate::regionop::origin_disk_operator(0.5, &c).unwrap();
        let map = make_map(MapKind::TileStep(1.0, 1.0), &c).unwrap();
        let y = apply_kraus_map(&map, &disk).unwrap();
        let v = Spectrum::from_diagonal(&disk, 1e-10).unwrap();
        let w = hermitian_spectrum(&y, 1e-8).unwrap();
        let s = step_matrix(&map, &v, &w).unwrap();
        let eff = c.effective_dim();
        assert!(s.col_sum_deviation(eff) < 1e-3);
        let lhs = s.apply(v.eigenvalues()).unwrap();
        for i in 0..eff {
            assert!((lhs[i] - w.eigenvalues()[i]).abs() < 1e-10);
        }
    }

    #[test]
    fn diagonal_transfer_matches_direct_diagonal() {
        let c = cfg(48);
        let disk = crate::regionop::origin_disk_operator(1.0, &c).unwrap();
        let d_vec = disk.diagonal_real();
        let map = make_map(MapKind::TileStep(1.0, 1.0), &c).unwrap();
        let got = diagonal_transfer(&map, &d_vec).unwrap();
        let want = apply_kraus_map(&map, &disk).unwrap().diagonal_real();
        for i in 0..48 {
            assert!(
                (got[i] - want[i]).abs() < 1e-10,
                "idx {i}: {} vs {}",
                got[i],
                want[i]
            );
        }
    }

    #[test]
    fn diagonal_transfer_trivial_maps() {
        let c = cfg(12);
        let d_vec = DVector::from_fn(12, |i, _| 1.0 / (i as f64 + 1.0));
        let rot = make_map(MapKind::Rotation(1.1), &c).unwrap();
        let got = diagonal_transfer(&rot, &d_vec).unwrap();
        for i in 0..12 {
            assert!((got[i] - 2.0 * d_vec[i]).abs() < 1e-14);
        }
    }

    #[test]
    fn tile_run_rectangle_quadruples_area() {
        let c = cfg(32);
        let rect = Region::rectangle(0.0, 0.0, 0.7, 0.5).unwrap();
        let x = build_region_operator(&rect, &c, QuadratureSpec::default()).unwrap();
        let trace = tile_run(&x, &rect, 2, &c).unwrap();
        assert_eq!(trace.len(), 3);
        let want_areas = [0.35, 1.4, 5.6];
        for (rec, want) in trace.steps().iter().zip(want_areas) {
            let area = rec.region.measure().unwrap();
            assert!((area - want).abs() < 1e-12, "{area} vs {want}");
        }
        match &trace.steps()[2].region {
            Region::Rectangle { x0, k0, a, b } => {
                assert_eq!((*x0, *k0), (0.0, 0.0));
                assert!((a - 2.8).abs() < 1e-12 && (b - 2.0).abs() < 1e-12);
            }
            other => panic!("unexpected region {other:?}"),
        }
        for rec in &trace.steps()[1..] {
            assert!(rec.row_sum_deviation.unwrap() < 1e-3);
            assert!(rec.col_sum_deviation.unwrap() < 1e-3);
            assert!(rec.lambda_min <= rec.lambda_max);
        }
    }

    #[test]
    fn tile_run_disk_matches_cluster_quadrature() {
        let c = cfg(48);
        let disk = Region::disk(0.0, 0.0, 1.0).unwrap();
        let x = crate::regionop::origin_disk_operator(0.5, &c).unwrap();
        let trace = tile_run(&x, &disk, 1, &c).unwrap();
        assert_eq!(trace.len(), 2);
        match &trace.steps()[1].region {
            Region::DiskCluster { c: c0, d, m } => {
                assert_eq!((*c0, *d, *m), (0.0, 1.0, 1));
            }
            other => panic!("unexpected region {other:?}"),
        }
        let cluster = Region::disk_cluster(0.0, 1.0, 1).unwrap();
        let direct = build_region_operator(&cluster, &c, QuadratureSpec::default()).unwrap();
        let diff = trace.steps()[1]
            .operator
            .frobenius_diff_block(&direct, c.effective_dim())
            .unwrap();
        assert!(diff < 1e-4, "cluster mismatch {diff:.3e}");
    }

    #[test]
    fn tile_run_zero_steps_keeps_initial_record() {
        let c = cfg(16);
        let rect = Region::rectangle(0.0, 0.0, 1.0, 1.0).unwrap();
        let x = build_region_operator(&rect, &c, QuadratureSpec::default()).unwrap();
        let trace = tile_run(&x, &rect, 0, &c).unwrap();
        assert_eq!(trace.len(), 1);
        assert!(trace.steps()[0].row_sum_deviation.is_none());
    }

    #[test]
    fn tile_run_rejects_bad_seeds() {
        let c = cfg(16);
        let x = FockOperator::<f64>::identity(16);
        let seg = Region::segment(1.0, 0.0).unwrap();
        assert!(matches!(
            tile_run(&x, &seg, 1, &c),
            Err(Error::TilingSeed(_))
        ));
        let off_center = Region::disk(0.5, 0.0, 1.0).unwrap();
        assert!(matches!(
            tile_run(&x, &off_center, 1, &c),
            Err(Error::TilingSeed(_))
        ));
    }

    #[test]
    fn map_construction_rejects_bad_input() {
        let c = cfg(8);
        assert!(matches!(
            KrausMap::<f64>::from_generators(vec![], "empty", &c),
            Err(Error::EmptyMap)
        ));
        let shrunk = FockOperator::<f64>::identity(8).scale_real(0.5);
        assert!(KrausMap::from_generators(vec![shrunk], "shrunk", &c).is_err());
        assert!(make_map(MapKind::Polygon(2), &c).is_err());
        assert!(make_map(MapKind::Rotation(f64::NAN), &c).is_err());
    }

    #[test]
    fn trace_additivity_for_unitary_generators() {
        let c = cfg(24);
        let mut rng = ChaCha8Rng::seed_from_u64(17);
        let x = random_hermitian(24, &mut rng);
        for kind in [MapKind::Rotation(0.4), MapKind::Reflection] {
            let map = make_map(kind, &c).unwrap();
            let y = apply_kraus_map(&map, &x).unwrap();
            let want = x.trace().re * map.len() as f64;
            assert!((y.trace().re - want).abs() < 1e-9 * want.abs().max(1.0));
        }
    }

    #[test]
    fn f32_maps_apply() {
        let c = TruncationConfig::<f32>::new(8).unwrap();
        let map = make_map(MapKind::Rotation(0.5f32), &c).unwrap();
        let x = FockOperator::<f32>::identity(8);
        let y = apply_kraus_map(&map, &x).unwrap();
        assert!((y.trace().re - 16.0).abs() < 1e-4);
    }
}
