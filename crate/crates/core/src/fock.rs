//! Truncated Fock-basis operator algebra.
//!
//! Operators act on `span{|0>, …, |d-1>}` as dense complex matrices. Wherever a
//! closed form for an infinite-dimensional operator exists (displacements via
//! the associated-Laguerre form), the stored matrix is the exact top-left block
//! of that operator. Identities that survive truncation only asymptotically are
//! asserted on the *effective block*, the top-left `effective_dim` sub-matrix
//! configured alongside the dimension.

use nalgebra::{Complex, DMatrix, DVector};

use crate::error::{Error, Result};
use crate::scalar::{cabs, Scalar};

/// Hard cap on the truncation dimension; everything is dense.
pub const MAX_DIM: usize = 256;

/// Truncation parameters shared by every constructor in the crate.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct TruncationConfig<T: Scalar> {
    dim: usize,
    effective_dim: usize,
    tol: T,
}

impl<T: Scalar> TruncationConfig<T> {
    /// `dim`-dimensional truncation with effective block `dim/2` and the
    /// default algebraic tolerance 1e-9.
    pub fn new(dim: usize) -> Result<Self> {
        if !(2..=MAX_DIM).contains(&dim) {
            return Err(Error::TruncationDim(dim));
        }
        Ok(Self {
            dim,
            effective_dim: (dim / 2).max(1),
            tol: T::from_f64_lossy(1e-9),
        })
    }

    /// Overrides the effective block size (must lie in `1..=dim`).
    pub fn with_effective_dim(mut self, effective_dim: usize) -> Result<Self> {
        if effective_dim == 0 || effective_dim > self.dim {
            return Err(Error::EffectiveDim {
                dim: self.dim,
                effective: effective_dim,
            });
        }
        self.effective_dim = effective_dim;
        Ok(self)
    }

    /// Overrides the algebraic tolerance (must be positive and finite).
    pub fn with_tol(mut self, tol: T) -> Result<Self> {
        if !(tol > T::zero() && tol.is_finite_scalar()) {
            return Err(Error::Tolerance(tol.to_f64_lossy()));
        }
        self.tol = tol;
        Ok(self)
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn effective_dim(&self) -> usize {
        self.effective_dim
    }

    pub fn tol(&self) -> T {
        self.tol
    }
}

/// Dense operator on the truncated Fock space.
#[derive(Clone, Debug, PartialEq)]
pub struct FockOperator<T: Scalar> {
    dim: usize,
    entries: DMatrix<Complex<T>>,
    hermitian_hint: bool,
}

impl<T: Scalar> FockOperator<T> {
    /// Wraps a square matrix, validating shape and finiteness; the hermitian
    /// hint is derived by comparing against the adjoint at `cfg.tol()`.
    pub fn from_matrix(entries: DMatrix<Complex<T>>, cfg: &TruncationConfig<T>) -> Result<Self> {
        if entries.nrows() != cfg.dim() || entries.ncols() != cfg.dim() {
            return Err(Error::ShapeMismatch {
                rows: entries.nrows(),
                cols: entries.ncols(),
                dim: cfg.dim(),
            });
        }
        if entries
            .iter()
            .any(|z| !(z.re.is_finite_scalar() && z.im.is_finite_scalar()))
        {
            return Err(Error::NonFinite("operator entries"));
        }
        let mut op = Self::from_parts(entries, false);
        op.hermitian_hint = op.hermitian_deviation() <= cfg.tol();
        Ok(op)
    }

    /// Internal constructor for matrices whose provenance guarantees shape and
    /// finiteness.
    pub(crate) fn from_parts(entries: DMatrix<Complex<T>>, hermitian_hint: bool) -> Self {
        debug_assert_eq!(entries.nrows(), entries.ncols());
        Self {
            dim: entries.nrows(),
            entries,
            hermitian_hint,
        }
    }

    pub fn identity(dim: usize) -> Self {
        Self::from_parts(DMatrix::identity(dim, dim), true)
    }

    pub fn zero(dim: usize) -> Self {
        Self::from_parts(DMatrix::zeros(dim, dim), true)
    }

    /// Embeds the operator into a larger space, zero-filling the new rows and
    /// columns. Useful whenever a computation needs headroom above the
    /// original cutoff (displaced spectra, step-matrix diagnostics).
    pub fn zero_padded(&self, new_dim: usize) -> Result<Self> {
        if new_dim < self.dim {
            return Err(Error::TruncationDim(new_dim));
        }
        let mut m = DMatrix::from_element(new_dim, new_dim, Complex::new(T::zero(), T::zero()));
        m.view_mut((0, 0), (self.dim, self.dim)).copy_from(&self.entries);
        Ok(Self::from_parts(m, self.hermitian_hint))
    }

    /// Crops the operator to its top-left `new_dim` block, the inverse of
    /// [`zero_padded`](Self::zero_padded) for results computed with headroom.
    pub fn truncated(&self, new_dim: usize) -> Result<Self> {
        if new_dim == 0 || new_dim > self.dim {
            return Err(Error::TruncationDim(new_dim));
        }
        Ok(Self::from_parts(self.block(new_dim), self.hermitian_hint))
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn entries(&self) -> &DMatrix<Complex<T>> {
        &self.entries
    }

    pub fn into_entries(self) -> DMatrix<Complex<T>> {
        self.entries
    }

    /// `true` when the constructor established hermiticity within tolerance.
    pub fn hermitian_hint(&self) -> bool {
        self.hermitian_hint
    }

    pub fn adjoint(&self) -> Self {
        Self::from_parts(self.entries.adjoint(), self.hermitian_hint)
    }

    /// Max-entry deviation from the adjoint.
    pub fn hermitian_deviation(&self) -> T {
        let mut dev = T::zero();
        for m in 0..self.dim {
            for n in m..self.dim {
                let d = cabs(self.entries[(m, n)] - self.entries[(n, m)].conj());
                if d > dev {
                    dev = d;
                }
            }
        }
        dev
    }

    pub fn trace(&self) -> Complex<T> {
        let mut t = Complex::new(T::zero(), T::zero());
        for n in 0..self.dim {
            t += self.entries[(n, n)];
        }
        t
    }

    pub fn frobenius_norm(&self) -> T {
        let mut s = T::zero();
        for z in self.entries.iter() {
            s += z.norm_sqr();
        }
        s.sqrt()
    }

    pub fn max_abs(&self) -> T {
        self.entries
            .iter()
            .map(|&z| cabs(z))
            .fold(T::zero(), |a, b| if b > a { b } else { a })
    }

    /// Copy of the top-left `n`-by-`n` block.
    pub fn block(&self, n: usize) -> DMatrix<Complex<T>> {
        self.entries.view((0, 0), (n.min(self.dim), n.min(self.dim))).into_owned()
    }

    /// Real parts of the diagonal.
    pub fn diagonal_real(&self) -> DVector<T> {
        DVector::from_fn(self.dim, |n, _| self.entries[(n, n)].re)
    }

    /// Max-entry difference, over the full matrix.
    pub fn max_abs_diff(&self, other: &Self) -> Result<T> {
        self.max_abs_diff_block(other, self.dim.max(other.dim))
    }

    /// Max-entry difference restricted to the top-left `n`-by-`n` block.
    pub fn max_abs_diff_block(&self, other: &Self, n: usize) -> Result<T> {
        if self.dim != other.dim {
            return Err(Error::DimensionMismatch {
                left: self.dim,
                right: other.dim,
            });
        }
        let n = n.min(self.dim);
        let mut dev = T::zero();
        for m in 0..n {
            for k in 0..n {
                let d = cabs(self.entries[(m, k)] - other.entries[(m, k)]);
                if d > dev {
                    dev = d;
                }
            }
        }
        Ok(dev)
    }

    /// Frobenius norm of the difference restricted to a leading block.
    pub fn frobenius_diff_block(&self, other: &Self, n: usize) -> Result<T> {
        if self.dim != other.dim {
            return Err(Error::DimensionMismatch {
                left: self.dim,
                right: other.dim,
            });
        }
        let n = n.min(self.dim);
        let mut s = T::zero();
        for m in 0..n {
            for k in 0..n {
                s += (self.entries[(m, k)] - other.entries[(m, k)]).norm_sqr();
            }
        }
        Ok(s.sqrt())
    }

    pub fn scale(&self, c: Complex<T>) -> Self {
        Self::from_parts(self.entries.map(|z| z * c), false)
    }

    pub fn scale_real(&self, c: T) -> Self {
        Self::from_parts(
            self.entries.map(|z| z * Complex::new(c, T::zero())),
            self.hermitian_hint,
        )
    }

    /// `U · self · U†`.
    pub fn conjugated_by(&self, u: &Self) -> Result<Self> {
        if self.dim != u.dim {
            return Err(Error::DimensionMismatch {
                left: self.dim,
                right: u.dim,
            });
        }
        let m = &u.entries * &self.entries * u.entries.adjoint();
        Ok(Self::from_parts(m, false))
    }

    /// Matrix product with dimension checking.
    pub fn matmul(&self, other: &Self) -> Result<Self> {
        if self.dim != other.dim {
            return Err(Error::DimensionMismatch {
                left: self.dim,
                right: other.dim,
            });
        }
        Ok(Self::from_parts(&self.entries * &other.entries, false))
    }

    /// Sum with dimension checking; hermiticity of both summands survives.
    pub fn add(&self, other: &Self) -> Result<Self> {
        if self.dim != other.dim {
            return Err(Error::DimensionMismatch {
                left: self.dim,
                right: other.dim,
            });
        }
        Ok(Self::from_parts(
            &self.entries + &other.entries,
            self.hermitian_hint && other.hermitian_hint,
        ))
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        if self.dim != other.dim {
            return Err(Error::DimensionMismatch {
                left: self.dim,
                right: other.dim,
            });
        }
        Ok(Self::from_parts(
            &self.entries - &other.entries,
            self.hermitian_hint && other.hermitian_hint,
        ))
    }

    /// Expectation value `<v| self |v>`.
    pub fn expectation(&self, v: &DVector<Complex<T>>) -> Result<Complex<T>> {
        if v.len() != self.dim {
            return Err(Error::LengthMismatch {
                left: v.len(),
                right: self.dim,
            });
        }
        let av = &self.entries * v;
        Ok(v.dotc(&av))
    }
}

/// Basic operator selector for [`basic_operator`].
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum BasicOperator<T: Scalar> {
    /// Lowering operator `a`, `a|n> = sqrt(n)|n-1>`.
    Annihilation,
    /// Raising operator `a†`.
    Creation,
    /// Position quadrature `Q = (a + a†)/sqrt(2)`.
    Position,
    /// Momentum quadrature `P = i(a† - a)/sqrt(2)`.
    Momentum,
    /// Rotated quadrature `Q_θ = Q cos θ + P sin θ`.
    RotatedQuadrature(T),
    /// Parity `diag((-1)^n)`.
    Parity,
    /// Number-basis rotation `R(θ) = diag(e^{inθ})`.
    Rotation(T),
}

/// Builds one of the standard generators on the truncated space.
///
/// Every matrix is the exact top-left block of its infinite-dimensional
/// counterpart.
pub fn basic_operator<T: Scalar>(
    kind: BasicOperator<T>,
    cfg: &TruncationConfig<T>,
) -> Result<FockOperator<T>> {
    let d = cfg.dim();
    let zero = Complex::new(T::zero(), T::zero());
    let mut m = DMatrix::from_element(d, d, zero);
    let inv_sqrt2 = T::from_f64_lossy(0.5).sqrt();
    match kind {
        BasicOperator::Annihilation => {
            for n in 1..d {
                m[(n - 1, n)] = Complex::new(T::from_usize_lossy(n).sqrt(), T::zero());
            }
            Ok(FockOperator::from_parts(m, false))
        }
        BasicOperator::Creation => {
            for n in 1..d {
                m[(n, n - 1)] = Complex::new(T::from_usize_lossy(n).sqrt(), T::zero());
            }
            Ok(FockOperator::from_parts(m, false))
        }
        BasicOperator::Position => basic_operator(BasicOperator::RotatedQuadrature(T::zero()), cfg),
        BasicOperator::Momentum => {
            basic_operator(BasicOperator::RotatedQuadrature(T::frac_pi_2()), cfg)
        }
        BasicOperator::RotatedQuadrature(theta) => {
            if !theta.is_finite_scalar() {
                return Err(Error::NonFinite("quadrature angle"));
            }
            // (n+1, n) entry e^{iθ} sqrt(n+1)/sqrt(2); hermitian by construction.
            let phase = Complex::new(theta.cos(), theta.sin());
            for n in 0..d - 1 {
                let r = T::from_usize_lossy(n + 1).sqrt() * inv_sqrt2;
                let lower = phase * Complex::new(r, T::zero());
                m[(n + 1, n)] = lower;
                m[(n, n + 1)] = lower.conj();
            }
            Ok(FockOperator::from_parts(m, true))
        }
        BasicOperator::Parity => {
            for n in 0..d {
                let s = if n % 2 == 0 { T::one() } else { -T::one() };
                m[(n, n)] = Complex::new(s, T::zero());
            }
            Ok(FockOperator::from_parts(m, true))
        }
        BasicOperator::Rotation(theta) => {
            if !theta.is_finite_scalar() {
                return Err(Error::NonFinite("rotation angle"));
            }
            for n in 0..d {
                let a = theta * T::from_usize_lossy(n);
                m[(n, n)] = Complex::new(a.cos(), a.sin());
            }
            Ok(FockOperator::from_parts(m, false))
        }
    }
}

/// Associated Laguerre polynomial `L_n^{(k)}(x)` by the stable upward
/// three-term recurrence in `n`.
pub(crate) fn laguerre_assoc<T: Scalar>(n: usize, k: usize, x: T) -> T {
    let kk = T::from_usize_lossy(k);
    let mut prev = T::one();
    if n == 0 {
        return prev;
    }
    let mut cur = T::one() + kk - x;
    for j in 1..n {
        let jj = T::from_usize_lossy(j);
        let next = ((T::from_usize_lossy(2 * j + k + 1) - x) * cur - (jj + kk) * prev)
            / T::from_usize_lossy(j + 1);
        prev = cur;
        cur = next;
    }
    cur
}

/// Displacement operator `D(q, p) = exp(i(pQ - qP))` as the exact top-left
/// block of the infinite-dimensional unitary.
///
/// Matrix elements use the associated-Laguerre closed form with the factorial
/// ratio, power, and Gaussian factors combined in the log domain, so large
/// quantum numbers and large displacements do not overflow.
pub fn displacement_operator<T: Scalar>(
    q: T,
    p: T,
    cfg: &TruncationConfig<T>,
) -> Result<FockOperator<T>> {
    if !(q.is_finite_scalar() && p.is_finite_scalar()) {
        return Err(Error::NonFinite("displacement argument"));
    }
    let d = cfg.dim();
    let inv_sqrt2 = T::from_f64_lossy(0.5).sqrt();
    let alpha = Complex::new(q * inv_sqrt2, p * inv_sqrt2);
    let x = alpha.norm_sqr();
    if x == T::zero() {
        return Ok(FockOperator::identity(d));
    }
    let ln_r = x.sqrt().ln();
    let phi = alpha.im.atan2(alpha.re);
    let half = T::from_f64_lossy(0.5);
    let lgam: Vec<T> = (0..=d)
        .map(|n| T::from_usize_lossy(n + 1).ln_gamma())
        .collect();
    let mut m = DMatrix::from_element(d, d, Complex::new(T::zero(), T::zero()));
    for row in 0..d {
        for col in 0..=row {
            let k = row - col;
            let logmag = half * (lgam[col] - lgam[row]) + T::from_usize_lossy(k) * ln_r - half * x;
            let val = logmag.exp() * laguerre_assoc(col, k, x);
            let ang = phi * T::from_usize_lossy(k);
            let lower = Complex::new(ang.cos(), ang.sin()) * Complex::new(val, T::zero());
            m[(row, col)] = lower;
            if k > 0 {
                // <n|D(α)|m> = (-1)^{m-n} conj(<m|D(α)|n>) for m > n.
                let sign = if k % 2 == 0 { T::one() } else { -T::one() };
                m[(col, row)] = lower.conj() * Complex::new(sign, T::zero());
            }
        }
    }
    Ok(FockOperator::from_parts(m, false))
}

/// Number-basis amplitudes of the coherent state `|z>`:
/// `<n|z> = e^{-|z|²/2} zⁿ/√(n!)`, evaluated in the log domain so large `|z|`
/// and large `n` do not overflow.
pub fn coherent_state_vector<T: Scalar>(
    z: Complex<T>,
    cfg: &TruncationConfig<T>,
) -> Result<DVector<Complex<T>>> {
    if !(z.re.is_finite_scalar() && z.im.is_finite_scalar()) {
        return Err(Error::NonFinite("coherent amplitude"));
    }
    let d = cfg.dim();
    let r2 = z.norm_sqr();
    let mut v = DVector::from_element(d, Complex::new(T::zero(), T::zero()));
    if r2 == T::zero() {
        v[0] = Complex::new(T::one(), T::zero());
        return Ok(v);
    }
    let half = T::from_f64_lossy(0.5);
    let ln_r = half * r2.ln();
    let phi = z.im.atan2(z.re);
    for n in 0..d {
        let nn = T::from_usize_lossy(n);
        let logmag = nn * ln_r - half * r2 - half * T::from_usize_lossy(n + 1).ln_gamma();
        let ang = phi * nn;
        v[n] = Complex::new(ang.cos(), ang.sin()) * Complex::new(logmag.exp(), T::zero());
    }
    Ok(v)
}

/// Number-basis amplitudes of the rotated-quadrature eigenvector `|q_θ>`:
/// `<n|q_θ> = ψ_n(q_θ) e^{inθ}` with `ψ_n` the normalized Hermite function,
/// evaluated by the stable normalized three-term recurrence.
pub fn position_eigenvector_amplitudes<T: Scalar>(
    q: T,
    theta: T,
    cfg: &TruncationConfig<T>,
) -> Result<DVector<Complex<T>>> {
    if !(q.is_finite_scalar() && theta.is_finite_scalar()) {
        return Err(Error::NonFinite("quadrature eigenvector argument"));
    }
    let d = cfg.dim();
    let half = T::from_f64_lossy(0.5);
    let quarter = T::from_f64_lossy(0.25);
    let mut psi = vec![T::zero(); d];
    psi[0] = (-quarter * T::pi().ln() - half * q * q).exp();
    if d > 1 {
        psi[1] = T::from_f64_lossy(2.0).sqrt() * q * psi[0];
    }
    for n in 1..d - 1 {
        let np1 = T::from_usize_lossy(n + 1);
        let a = (T::from_f64_lossy(2.0) / np1).sqrt();
        let b = (T::from_usize_lossy(n) / np1).sqrt();
        psi[n + 1] = a * q * psi[n] - b * psi[n - 1];
    }
    Ok(DVector::from_fn(d, |n, _| {
        let ang = theta * T::from_usize_lossy(n);
        Complex::new(ang.cos(), ang.sin()) * Complex::new(psi[n], T::zero())
    }))
}

/// Deterministic eigendecomposition of a hermitian operator.
#[derive(Clone, Debug)]
pub struct Spectrum<T: Scalar> {
    eigenvalues: DVector<T>,
    eigenvectors: DMatrix<Complex<T>>,
}

impl<T: Scalar> Spectrum<T> {
    /// Eigenvalues in non-increasing order.
    pub fn eigenvalues(&self) -> &DVector<T> {
        &self.eigenvalues
    }

    /// Unitary matrix whose columns align with [`Self::eigenvalues`].
    pub fn eigenvectors(&self) -> &DMatrix<Complex<T>> {
        &self.eigenvectors
    }

    pub fn len(&self) -> usize {
        self.eigenvalues.len()
    }

    pub fn is_empty(&self) -> bool {
        self.eigenvalues.len() == 0
    }

    pub fn lambda_max(&self) -> T {
        self.eigenvalues[0]
    }

    pub fn lambda_min(&self) -> T {
        self.eigenvalues[self.eigenvalues.len() - 1]
    }

    /// `V Λ V†`, for reconstruction checks.
    pub fn reconstruct(&self) -> DMatrix<Complex<T>> {
        let lam = DMatrix::from_diagonal(
            &self.eigenvalues.map(|x| Complex::new(x, T::zero())),
        );
        &self.eigenvectors * lam * self.eigenvectors.adjoint()
    }

    /// Max-entry deviation of `V†V` from the identity.
    pub fn orthonormality_defect(&self) -> T {
        let g = self.eigenvectors.adjoint() * &self.eigenvectors;
        let mut dev = T::zero();
        for m in 0..g.nrows() {
            for n in 0..g.ncols() {
                let target = if m == n { T::one() } else { T::zero() };
                let d = cabs(g[(m, n)] - Complex::new(target, T::zero()));
                if d > dev {
                    dev = d;
                }
            }
        }
        dev
    }

    /// Treats an already-diagonal operator as its own eigendecomposition,
    /// keeping number-basis order (no sorting) and identity eigenvectors.
    pub fn from_diagonal(op: &FockOperator<T>, tol: T) -> Result<Self> {
        let mut off = T::zero();
        let mut imag = T::zero();
        for m in 0..op.dim() {
            for n in 0..op.dim() {
                if m != n {
                    let v = cabs(op.entries()[(m, n)]);
                    if v > off {
                        off = v;
                    }
                } else {
                    let v = op.entries()[(m, n)].im.abs();
                    if v > imag {
                        imag = v;
                    }
                }
            }
        }
        let dev = if off > imag { off } else { imag };
        if dev > tol {
            return Err(Error::NotDiagonal {
                deviation: dev.to_f64_lossy(),
                tol: tol.to_f64_lossy(),
            });
        }
        Ok(Self {
            eigenvalues: op.diagonal_real(),
            eigenvectors: DMatrix::identity(op.dim(), op.dim()),
        })
    }
}

/// Eigendecomposition with a deterministic ordering convention: eigenvalues
/// non-increasing, each eigenvector's first component of modulus above 1e-12
/// made real and positive, exact eigenvalue ties broken by lexicographic order
/// of the phase-fixed eigenvectors. The output is a pure function of the input
/// matrix bits.
///
/// The matrix is normalised to unit peak magnitude and entries more than
/// sixty decades below the peak are flushed to zero before factorisation.
/// Operators assembled with headroom decay to ~1e-160 of their peak in the
/// padding rows, and the underlying QL iteration returns NaN on such extreme
/// dynamic ranges; the flush moves every eigenvalue by less than `dim·1e-60`
/// of the peak, far below any tolerance in this crate.
pub fn hermitian_spectrum<T: Scalar>(op: &FockOperator<T>, tol: T) -> Result<Spectrum<T>> {
    let dev = op.hermitian_deviation();
    if dev > tol {
        return Err(Error::NotHermitian {
            deviation: dev.to_f64_lossy(),
            tol: tol.to_f64_lossy(),
        });
    }
    let d = op.dim();
    let half = Complex::new(T::from_f64_lossy(0.5), T::zero());
    let herm = (op.entries() + op.entries().adjoint()).map(|z| z * half);
    let peak = herm
        .iter()
        .map(|&z| cabs(z))
        .fold(T::zero(), |a, b| if b > a { b } else { a });
    if peak == T::zero() {
        return Ok(Spectrum {
            eigenvalues: DVector::from_element(d, T::zero()),
            eigenvectors: DMatrix::identity(d, d),
        });
    }
    let floor = T::from_f64_lossy(1e-60);
    let inv_peak = Complex::new(T::one() / peak, T::zero());
    let cleaned = herm.map(|z| {
        let s = z * inv_peak;
        if cabs(s) < floor {
            Complex::new(T::zero(), T::zero())
        } else {
            s
        }
    });
    let mut se = cleaned.symmetric_eigen();
    se.eigenvalues *= peak;
    let mut vectors = se.eigenvectors;
    let phase_floor = T::from_f64_lossy(1e-12);
    for j in 0..d {
        let mut col = vectors.column_mut(j);
        if let Some(r) = (0..d).find(|&r| cabs(col[r]) > phase_floor) {
            let pivot = col[r];
            let modulus = cabs(pivot);
            let rot = Complex::new(pivot.re / modulus, -pivot.im / modulus);
            for r in 0..d {
                col[r] *= rot;
            }
        }
    }
    let mut order: Vec<usize> = (0..d).collect();
    order.sort_by(|&a, &b| {
        let la = se.eigenvalues[a];
        let lb = se.eigenvalues[b];
        lb.partial_cmp(&la)
            .expect("finite eigenvalues")
            .then_with(|| {
                for r in 0..d {
                    let za = vectors[(r, a)];
                    let zb = vectors[(r, b)];
                    match za.re.partial_cmp(&zb.re).expect("finite eigenvector") {
                        std::cmp::Ordering::Equal => {}
                        other => return other,
                    }
                    match za.im.partial_cmp(&zb.im).expect("finite eigenvector") {
                        std::cmp::Ordering::Equal => {}
                        other => return other,
                    }
                }
                std::cmp::Ordering::Equal
            })
    });
    let eigenvalues = DVector::from_fn(d, |j, _| se.eigenvalues[order[j]]);
    let eigenvectors = DMatrix::from_fn(d, d, |r, j| vectors[(r, order[j])]);
    Ok(Spectrum {
        eigenvalues,
        eigenvectors,
    })
}

/// Applies a real function to a hermitian operator through its spectrum:
/// `f(A) = V f(Λ) V†`. The function must be total (finite) on the spectrum of
/// the truncated operator.
pub fn spectral_function<T: Scalar>(
    op: &FockOperator<T>,
    f: impl Fn(T) -> T,
    tol: T,
) -> Result<FockOperator<T>> {
    let spec = hermitian_spectrum(op, tol)?;
    let mapped: Vec<T> = spec.eigenvalues().iter().map(|&x| f(x)).collect();
    if mapped.iter().any(|x| !x.is_finite_scalar()) {
        return Err(Error::NonFinite("function of eigenvalue"));
    }
    let lam = DMatrix::from_diagonal(&DVector::from_fn(mapped.len(), |j, _| {
        Complex::new(mapped[j], T::zero())
    }));
    let m = spec.eigenvectors() * lam * spec.eigenvectors().adjoint();
    Ok(FockOperator::from_parts(m, true))
}

/// Entrywise (Hadamard) product.
pub fn hadamard_product<T: Scalar>(
    a: &FockOperator<T>,
    b: &FockOperator<T>,
) -> Result<FockOperator<T>> {
    if a.dim() != b.dim() {
        return Err(Error::DimensionMismatch {
            left: a.dim(),
            right: b.dim(),
        });
    }
    let m = DMatrix::from_fn(a.dim(), a.dim(), |r, c| a.entries()[(r, c)] * b.entries()[(r, c)]);
    Ok(FockOperator::from_parts(
        m,
        a.hermitian_hint() && b.hermitian_hint(),
    ))
}

/// Partial trace over a finite ancilla factor. The joint matrix is indexed
/// with the ancilla slowest: row `i·dim + m` is `|i>⊗|m>`.
pub fn ancilla_partial_trace<T: Scalar>(
    joint: &DMatrix<Complex<T>>,
    ancilla_dim: usize,
    cfg: &TruncationConfig<T>,
) -> Result<FockOperator<T>> {
    let d = cfg.dim();
    if ancilla_dim == 0 || joint.nrows() != ancilla_dim * d || joint.ncols() != ancilla_dim * d {
        return Err(Error::ShapeMismatch {
            rows: joint.nrows(),
            cols: joint.ncols(),
            dim: ancilla_dim * d,
        });
    }
    let mut m = DMatrix::from_element(d, d, Complex::new(T::zero(), T::zero()));
    for i in 0..ancilla_dim {
        let base = i * d;
        for r in 0..d {
            for c in 0..d {
                m[(r, c)] += joint[(base + r, base + c)];
            }
        }
    }
    FockOperator::from_matrix(m, cfg)
}

/// Matrix exponential by Taylor series with scaling and squaring. Deterministic
/// and accurate to a small multiple of machine epsilon for the well-scaled
/// skew-hermitian generators this crate produces.
pub fn matrix_exp<T: Scalar>(a: &DMatrix<Complex<T>>) -> DMatrix<Complex<T>> {
    assert_eq!(a.nrows(), a.ncols(), "matrix_exp needs a square matrix");
    let n = a.nrows();
    let mut norm1 = T::zero();
    for c in 0..n {
        let mut s = T::zero();
        for r in 0..n {
            s += cabs(a[(r, c)]);
        }
        if s > norm1 {
            norm1 = s;
        }
    }
    let half = T::from_f64_lossy(0.5);
    let mut squarings = 0u32;
    let mut scale = T::one();
    while norm1 * scale > half && squarings < 64 {
        scale *= half;
        squarings += 1;
    }
    let scaled = a.map(|z| z * Complex::new(scale, T::zero()));
    let mut sum = DMatrix::identity(n, n);
    let mut term: DMatrix<Complex<T>> = DMatrix::identity(n, n);
    let floor = T::default_epsilon() * T::from_f64_lossy(1e-4);
    for k in 1..=90usize {
        let inv_k = Complex::new(T::one() / T::from_usize_lossy(k), T::zero());
        term = (&term * &scaled).map(|z| z * inv_k);
        sum += &term;
        let tmax = term
            .iter()
            .map(|&z| cabs(z))
            .fold(T::zero(), |acc, v| if v > acc { v } else { acc });
        if tmax <= floor {
            break;
        }
    }
    for _ in 0..squarings {
        sum = &sum * &sum;
    }
    sum
}

#[cfg(test)]
mod tests {
    use super::*;

    type Cfg = TruncationConfig<f64>;

    fn cfg(d: usize) -> Cfg {
        Cfg::new(d).unwrap()
    }

    fn cx(re: f64, im: f64) -> Complex<f64> {
        Complex::new(re, im)
    }

    #[test]
    fn coherent_state_amplitudes() {
        let c = cfg(48);
        let v = coherent_state_vector(cx(0.0, 0.0), &c).unwrap();
        assert_eq!(v[0], cx(1.0, 0.0));
        assert_eq!(v[5], cx(0.0, 0.0));
        // direct factorial evaluation at modest n
        let z = cx(0.8, -0.3);
        let v = coherent_state_vector(z, &c).unwrap();
        let mut fact = 1.0;
        for n in 0..10usize {
            if n > 0 {
                fact *= n as f64;
            }
            let want = z.powu(n as u32) * (-z.norm_sqr() / 2.0).exp() / fact.sqrt();
            assert!((v[n] - want).norm() < 1e-14, "n={n}");
        }
        // normalized to machine precision once the tail is negligible
        assert!((v.norm_squared() - 1.0).abs() < 1e-13);
        // displacement acting on vacuum gives the same state
        let dop = displacement_operator(0.8 * 2f64.sqrt(), -0.3 * 2f64.sqrt(), &c).unwrap();
        let mut vac = DVector::from_element(48, cx(0.0, 0.0));
        vac[0] = cx(1.0, 0.0);
        let dv = dop.entries() * vac;
        assert!((dv - &v).norm() < 1e-12);
    }

    #[test]
    fn truncation_config_validation() {
        assert!(Cfg::new(1).is_err());
        assert!(Cfg::new(257).is_err());
        let c = cfg(24);
        assert_eq!(c.effective_dim(), 12);
        assert!(c.with_effective_dim(0).is_err());
        assert!(cfg(24).with_effective_dim(25).is_err());
        assert!(cfg(24).with_tol(-1.0).is_err());
    }

    #[test]
    fn parity_matrix() {
        let p = basic_operator(BasicOperator::Parity, &cfg(4)).unwrap();
        for n in 0..4 {
            let want = if n % 2 == 0 { 1.0 } else { -1.0 };
            assert_eq!(p.entries()[(n, n)], cx(want, 0.0));
        }
        // parity squares to the identity exactly
        let sq = p.matmul(&p).unwrap();
        assert_eq!(sq.max_abs_diff(&FockOperator::identity(4)).unwrap(), 0.0);
    }

    #[test]
    fn rotation_pi_is_parity() {
        let c = cfg(16);
        let r = basic_operator(BasicOperator::Rotation(std::f64::consts::PI), &c).unwrap();
        let p = basic_operator(BasicOperator::Parity, &c).unwrap();
        assert!(r.max_abs_diff(&p).unwrap() < 1e-13);
    }

    #[test]
    fn rotated_quadrature_at_zero_is_position() {
        let c = cfg(12);
        let q = basic_operator(BasicOperator::Position, &c).unwrap();
        let q0 = basic_operator(BasicOperator::RotatedQuadrature(0.0), &c).unwrap();
        assert_eq!(q.max_abs_diff(&q0).unwrap(), 0.0);
        assert!(q.hermitian_hint());
    }

    #[test]
    fn quadrature_commutator_on_effective_block() {
        let c = cfg(32);
        for theta in [0.0, 0.7, 2.4] {
            let a = basic_operator(BasicOperator::RotatedQuadrature(theta), &c).unwrap();
            let b = basic_operator(
                BasicOperator::RotatedQuadrature(theta + std::f64::consts::FRAC_PI_2),
                &c,
            )
            .unwrap();
            let comm = a.matmul(&b).unwrap().sub(&b.matmul(&a).unwrap()).unwrap();
            let i_id = FockOperator::identity(32).scale(cx(0.0, 1.0));
            let dev = comm.max_abs_diff_block(&i_id, c.effective_dim()).unwrap();
            assert!(dev < 1e-9, "theta {theta}: {dev:.3e}");
        }
    }

    #[test]
    fn rotation_conjugation_rotates_quadrature() {
        let c = cfg(20);
        let theta = 0.9;
        let r = basic_operator(BasicOperator::Rotation(theta), &c).unwrap();
        let q = basic_operator(BasicOperator::Position, &c).unwrap();
        let qt = basic_operator(BasicOperator::RotatedQuadrature(theta), &c).unwrap();
        let rot = q.conjugated_by(&r).unwrap();
        assert!(rot.max_abs_diff(&qt).unwrap() < 1e-14);
    }

    #[test]
    fn displacement_identity_and_vacuum_element() {
        let c = cfg(64);
        let id = displacement_operator(0.0, 0.0, &c).unwrap();
        assert_eq!(id.max_abs_diff(&FockOperator::identity(64)).unwrap(), 0.0);
        // <0|D(1,0)|0> = e^{-1/4}
        let d = displacement_operator(1.0, 0.0, &c).unwrap();
        let got = d.entries()[(0, 0)];
        assert!((got - cx((-0.25f64).exp(), 0.0)).norm() < 1e-15);
        assert!(displacement_operator(f64::NAN, 0.0, &c).is_err());
    }

    #[test]
    fn displacement_block_unitarity() {
        // D†D = 1 on the effective block: truncation spill stays near the cut.
        let c = cfg(48);
        let d = displacement_operator(0.8, -0.4, &c).unwrap();
        let gram = d.adjoint().matmul(&d).unwrap();
        let dev = gram
            .max_abs_diff_block(&FockOperator::identity(48), c.effective_dim())
            .unwrap();
        assert!(dev < 1e-10, "{dev:.3e}");
    }

    #[test]
    fn parity_conjugation_negates_displacement() {
        let c = cfg(24);
        let p = basic_operator(BasicOperator::Parity, &c).unwrap();
        let d = displacement_operator(0.7, 0.3, &c).unwrap();
        let neg = displacement_operator(-0.7, -0.3, &c).unwrap();
        let conj = d.conjugated_by(&p).unwrap();
        assert!(conj.max_abs_diff(&neg).unwrap() < 1e-14);
    }

    #[test]
    fn displacement_composition_phase() {
        let c = cfg(48);
        let (q1, p1, q2, p2) = (0.6, -0.2, -0.3, 0.5);
        let d1 = displacement_operator(q1, p1, &c).unwrap();
        let d2 = displacement_operator(q2, p2, &c).unwrap();
        let d12 = displacement_operator(q1 + q2, p1 + p2, &c).unwrap();
        let a1 = cx(q1, p1) / 2f64.sqrt();
        let a2 = cx(q2, p2) / 2f64.sqrt();
        let phase = cx(0.0, (a1 * a2.conj()).im).exp();
        let prod = d1.matmul(&d2).unwrap();
        let dev = prod
            .max_abs_diff_block(&d12.scale(phase), c.effective_dim())
            .unwrap();
        assert!(dev < 1e-6, "{dev:.3e}");
    }

    #[test]
    fn hermite_amplitudes_basics() {
        let c = cfg(32);
        // psi_1(0) = 0 and psi_0(0) = pi^{-1/4}
        let v = position_eigenvector_amplitudes(0.0, 0.0, &c).unwrap();
        assert!((v[0].re - std::f64::consts::PI.powf(-0.25)).abs() < 1e-15);
        assert!(v[1].norm() < 1e-300);
        // parity flip: Π |q_θ> = |-q_θ>
        let q = 1.3;
        let theta = 0.4;
        let plus = position_eigenvector_amplitudes(q, theta, &c).unwrap();
        let minus = position_eigenvector_amplitudes(-q, theta, &c).unwrap();
        for n in 0..32 {
            let sign = if n % 2 == 0 { 1.0 } else { -1.0 };
            assert!((plus[n] * cx(sign, 0.0) - minus[n]).norm() < 1e-14);
        }
    }

    #[test]
    fn quadrature_eigenvector_residual() {
        // Q_θ |q_θ> ≈ q_θ |q_θ> away from the truncation edge.
        let c = cfg(96);
        let (q, theta) = (1.1, 0.9);
        let v = position_eigenvector_amplitudes(q, theta, &c).unwrap();
        let qt = basic_operator(BasicOperator::RotatedQuadrature(theta), &c).unwrap();
        let av = qt.entries() * &v;
        let mut resid: f64 = 0.0;
        for n in 0..c.effective_dim() {
            resid = resid.max((av[n] - v[n] * cx(q, 0.0)).norm());
        }
        assert!(resid < 1e-9, "{resid:.3e}");
    }

    #[test]
    fn squeezed_exponential_closed_form_matches_amplitudes() {
        // |q_θ> = pi^{-1/4} exp(-q²/2) exp(sqrt2 e^{iθ} q a† - e^{2iθ} a†²/2)|0>,
        // checked at small dimension through a nilpotent matrix exponential.
        let c = cfg(24);
        let (q, theta) = (0.7, 0.9);
        let adag = basic_operator::<f64>(BasicOperator::Creation, &c).unwrap();
        let adag2 = adag.matmul(&adag).unwrap();
        let e_it = cx(0.0, theta).exp();
        let e_2it = cx(0.0, 2.0 * theta).exp();
        let gen = adag.entries() * (e_it * cx(2f64.sqrt() * q, 0.0))
            - adag2.entries() * (e_2it * cx(0.5, 0.0));
        let expg = matrix_exp(&gen);
        let scale = std::f64::consts::PI.powf(-0.25) * (-0.5 * q * q).exp();
        let closed: Vec<Complex<f64>> = (0..24).map(|n| expg[(n, 0)] * cx(scale, 0.0)).collect();
        let v = position_eigenvector_amplitudes(q, theta, &c).unwrap();
        for n in 0..c.effective_dim() {
            assert!((closed[n] - v[n]).norm() < 1e-12, "n = {n}");
        }
    }

    #[test]
    fn spectrum_orders_and_phase_fixes() {
        let c = cfg(3);
        let m = DMatrix::from_diagonal(&DVector::from_vec(vec![cx(1.0, 0.0), cx(3.0, 0.0), cx(2.0, 0.0)]));
        let op = FockOperator::from_matrix(m, &c).unwrap();
        let s = hermitian_spectrum(&op, 1e-9).unwrap();
        assert_eq!(s.eigenvalues().as_slice(), &[3.0, 2.0, 1.0]);
        assert!(s.orthonormality_defect() < 1e-14);
        // reconstruction
        let rec = s.reconstruct();
        let dev = (rec - op.entries()).iter().map(|z| z.norm()).fold(0.0, f64::max);
        assert!(dev < 1e-14);
        // degenerate parity spectrum comes out sorted with deterministic vectors
        let p = basic_operator(BasicOperator::Parity, &cfg(4)).unwrap();
        let sp = hermitian_spectrum(&p, 1e-9).unwrap();
        assert_eq!(sp.eigenvalues().as_slice(), &[1.0, 1.0, -1.0, -1.0]);
    }

    #[test]
    fn spectrum_is_bit_reproducible() {
        let c = cfg(24);
        let d = displacement_operator(0.4, 0.9, &c).unwrap();
        let q = basic_operator(BasicOperator::Position, &c).unwrap();
        let op = q.conjugated_by(&d).unwrap();
        let op = FockOperator::from_matrix(
            (op.entries() + op.entries().adjoint()).map(|z| z * cx(0.5, 0.0)),
            &c,
        )
        .unwrap();
        let s1 = hermitian_spectrum(&op, 1e-9).unwrap();
        let s2 = hermitian_spectrum(&op, 1e-9).unwrap();
        assert_eq!(s1.eigenvalues().as_slice(), s2.eigenvalues().as_slice());
        for (a, b) in s1.eigenvectors().iter().zip(s2.eigenvectors().iter()) {
            assert_eq!(a.re.to_bits(), b.re.to_bits());
            assert_eq!(a.im.to_bits(), b.im.to_bits());
        }
    }

    #[test]
    fn spectrum_rejects_non_hermitian() {
        let c = cfg(4);
        let a = basic_operator::<f64>(BasicOperator::Annihilation, &c).unwrap();
        assert!(matches!(
            hermitian_spectrum(&a, 1e-9),
            Err(Error::NotHermitian { .. })
        ));
    }

    #[test]
    fn spectral_function_identity_and_constant() {
        let c = cfg(16);
        let q = basic_operator(BasicOperator::Position, &c).unwrap();
        let same = spectral_function(&q, |x| x, 1e-9).unwrap();
        assert!(same.max_abs_diff(&q).unwrap() < 1e-13);
        let one = spectral_function(&q, |_| 1.0, 1e-9).unwrap();
        assert!(one.max_abs_diff(&FockOperator::identity(16)).unwrap() < 1e-13);
        assert!(spectral_function(&q, |x| 1.0 / (x - x), 1e-9).is_err());
    }

    #[test]
    fn hadamard_basics() {
        let c = cfg(8);
        let q = basic_operator::<f64>(BasicOperator::Position, &c).unwrap();
        let ones = FockOperator::from_matrix(DMatrix::from_element(8, 8, cx(1.0, 0.0)), &c).unwrap();
        let h = hadamard_product(&q, &ones).unwrap();
        assert!(h.max_abs_diff(&q).unwrap() == 0.0);
        // U ∘ conj(U) of a rotation has unit row sums (diagonal unitary)
        let r = basic_operator(BasicOperator::Rotation(0.3), &c).unwrap();
        let rc = FockOperator::from_parts(r.entries().map(|z| z.conj()), false);
        let s = hadamard_product(&r, &rc).unwrap();
        for n in 0..8 {
            let row: f64 = (0..8).map(|m| s.entries()[(n, m)].re).sum();
            assert!((row - 1.0).abs() < 1e-15);
        }
    }

    #[test]
    fn partial_trace_basics() {
        let c = cfg(4);
        let q = basic_operator::<f64>(BasicOperator::Position, &c).unwrap();
        // |0><0| ⊗ X  →  X
        let mut joint = DMatrix::from_element(8, 8, cx(0.0, 0.0));
        for r in 0..4 {
            for col in 0..4 {
                joint[(r, col)] = q.entries()[(r, col)];
            }
        }
        let back = ancilla_partial_trace(&joint, 2, &c).unwrap();
        assert!(back.max_abs_diff(&q).unwrap() == 0.0);
        // 1_m ⊗ X  →  m X
        let mut joint2 = DMatrix::from_element(8, 8, cx(0.0, 0.0));
        for i in 0..2 {
            for r in 0..4 {
                for col in 0..4 {
                    joint2[(i * 4 + r, i * 4 + col)] = q.entries()[(r, col)];
                }
            }
        }
        let doubled = ancilla_partial_trace(&joint2, 2, &c).unwrap();
        assert!(doubled.max_abs_diff(&q.scale_real(2.0)).unwrap() < 1e-15);
        assert!(ancilla_partial_trace(&joint2, 3, &c).is_err());
    }

    #[test]
    fn matrix_exp_matches_diagonal_closed_form() {
        let m = DMatrix::from_diagonal(&DVector::from_vec(vec![cx(0.0, 1.2), cx(-0.4, 0.0)]));
        let e = matrix_exp(&m);
        assert!((e[(0, 0)] - cx(0.0, 1.2).exp()).norm() < 1e-15);
        assert!((e[(1, 1)] - cx(-0.4, 0.0).exp()).norm() < 1e-15);
        assert!(e[(0, 1)].norm() == 0.0);
    }

    #[test]
    fn f32_instantiation_smoke() {
        let c = TruncationConfig::<f32>::new(8).unwrap();
        let p = basic_operator(BasicOperator::Parity, &c).unwrap();
        let d = displacement_operator(0.5f32, 0.0, &c).unwrap();
        let k = d.matmul(&p).unwrap().matmul(&d.adjoint()).unwrap();
        assert!(k.hermitian_deviation() < 1e-5);
    }
}
