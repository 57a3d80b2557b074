//! Eigenvalue-order statistics for region operators: quasiprobability-mass
//! bounds, majorization comparisons, and the squeezing check over tiling
//! traces.
//!
//! Every comparison here is made on finite spectra. Region operators live in
//! a truncated basis, so order statements are evaluated on the effective
//! block and carry an explicit tolerance that absorbs the truncation tail;
//! tests vary the cutoff to confirm the statements are stable under it.

use core::cmp::Ordering;

use nalgebra::DVector;

use crate::cpti::TilingTrace;
use crate::error::{Error, Result};
use crate::fock::{hermitian_spectrum, FockOperator, Spectrum};
use crate::scalar::Scalar;

/// Hermiticity gate shared by the spectral entry points.
fn hermiticity_tol<T: Scalar>() -> T {
    T::from_f64_lossy(1e-8)
}

/// Eigenvalues of one operator in both sort orders, together with their sum.
///
/// `descending` is non-increasing, `ascending` non-decreasing, and both hold
/// the same multiset, so majorization statements can be read off in whichever
/// order they are phrased.
#[derive(Clone, Debug)]
pub struct OrderedEigenvalues<T: Scalar> {
    descending: DVector<T>,
    ascending: DVector<T>,
    total: T,
}

impl<T: Scalar> OrderedEigenvalues<T> {
    /// Sorts `values` into both orders.
    pub fn new(values: &[T]) -> Self {
        let mut descending = values.to_vec();
        descending.sort_unstable_by(|a, b| b.partial_cmp(a).unwrap_or(Ordering::Equal));
        let mut ascending = descending.clone();
        ascending.reverse();
        let total = values.iter().fold(T::zero(), |s, &v| s + v);
        Self {
            descending: DVector::from_vec(descending),
            ascending: DVector::from_vec(ascending),
            total,
        }
    }

    pub fn from_spectrum(spectrum: &Spectrum<T>) -> Self {
        Self::new(spectrum.eigenvalues().as_slice())
    }

    /// Orders the eigenvalues of the top-left `block` sub-matrix of `op`.
    pub fn of_effective_block(op: &FockOperator<T>, block: usize) -> Result<Self> {
        let sub = op.truncated(block)?;
        let spectrum = hermitian_spectrum(&sub, hermiticity_tol())?;
        Ok(Self::from_spectrum(&spectrum))
    }

    /// Non-increasing order.
    pub fn descending(&self) -> &DVector<T> {
        &self.descending
    }

    /// Non-decreasing order.
    pub fn ascending(&self) -> &DVector<T> {
        &self.ascending
    }

    /// Sum of all eigenvalues.
    pub fn total(&self) -> T {
        self.total
    }

    /// Smallest eigenvalue.
    pub fn min(&self) -> T {
        self.ascending[0]
    }

    /// Largest eigenvalue.
    pub fn max(&self) -> T {
        self.descending[0]
    }

    pub fn len(&self) -> usize {
        self.descending.len()
    }

    pub fn is_empty(&self) -> bool {
        self.descending.is_empty()
    }

    /// Every eigenvalue multiplied by `factor`, re-sorted (a negative factor
    /// reverses the orders).
    pub fn scaled(&self, factor: T) -> Self {
        let values: Vec<T> = self.descending.iter().map(|&v| factor * v).collect();
        Self::new(&values)
    }
}

/// Extremal eigenvalues `(λ_min, λ_max)` of a Hermitian operator.
///
/// For a region operator these bound the quasiprobability mass that any state
/// can assign to the region.
pub fn qpm_bounds<T: Scalar>(k: &FockOperator<T>) -> Result<(T, T)> {
    if k.dim() == 0 {
        return Err(Error::InvalidParameter(
            "qpm bounds need a non-empty operator".into(),
        ));
    }
    let spectrum = hermitian_spectrum(k, hermiticity_tol())?;
    let ev = spectrum.eigenvalues();
    Ok((ev[ev.len() - 1], ev[0]))
}

fn prefix_dominates<T: Scalar>(p: &[T], q: &[T], tol: T, ascending: bool) -> Result<bool> {
    if p.len() != q.len() {
        return Err(Error::LengthMismatch {
            left: p.len(),
            right: q.len(),
        });
    }
    let sort = |values: &[T]| {
        let mut v = values.to_vec();
        v.sort_unstable_by(|a, b| {
            let ord = a.partial_cmp(b).unwrap_or(Ordering::Equal);
            if ascending {
                ord
            } else {
                ord.reverse()
            }
        });
        v
    };
    let ps = sort(p);
    let qs = sort(q);
    let mut sum_p = T::zero();
    let mut sum_q = T::zero();
    let mut dominated = true;
    for i in 0..ps.len() {
        sum_p += ps[i];
        sum_q += qs[i];
        if sum_p < sum_q - tol {
            dominated = false;
        }
    }
    let total_gap = (sum_p - sum_q).abs();
    let total_scale = if sum_p.abs() > T::one() {
        sum_p.abs()
    } else {
        T::one()
    };
    Ok(dominated && total_gap <= tol * total_scale)
}

/// Tests the majorization `p ≻ q` in the usual non-increasing reading.
///
/// Both inputs are sorted internally; the relation holds when every prefix
/// sum of `p↓` reaches the matching prefix sum of `q↓` within `tol` and the
/// totals agree within `tol·max(1, |Σp|)`.
pub fn majorizes<T: Scalar>(p: &[T], q: &[T], tol: T) -> Result<bool> {
    prefix_dominates(p, q, tol, false)
}

/// Tests the non-decreasing-order relation `p↑ ≻ q↑`: every prefix sum of
/// `p↑` reaches the matching prefix sum of `q↑` within `tol`, with the same
/// total agreement as [`majorizes`]. When the totals match exactly this is
/// equivalent to `majorizes(q, p)`; on truncated spectra the two readings
/// differ by the total-sum slack, so both are exposed.
pub fn majorizes_ascending<T: Scalar>(p: &[T], q: &[T], tol: T) -> Result<bool> {
    prefix_dominates(p, q, tol, true)
}

/// Checks both eigenvalue-vector majorization relations, `4λ↓ ≻ λ′↓` and
/// `λ′↑ ≻ 4λ↑`, for every doubling step of a tiling trace.
///
/// The comparison uses the working-dimension spectra stored in the records
/// (zero-padded input versus map output). Those are the vectors for which
/// the flattening argument actually applies in a truncated basis: with
/// headroom the map is isometric on everything the input touches, so the
/// relations hold to rounding, while every bare-cutoff reading misses the
/// total-sum rule by the amplified truncation tail.
pub fn tile_majorization_check<T: Scalar>(trace: &TilingTrace<T>, tol: T) -> Result<bool> {
    let four = T::from_f64_lossy(4.0);
    for record in trace.steps().iter().skip(1) {
        let (input, output) = match (
            record.step_input_eigenvalues.as_ref(),
            record.step_output_eigenvalues.as_ref(),
        ) {
            (Some(i), Some(o)) => (i, o),
            _ => {
                return Err(Error::InvalidParameter(
                    "trace record lacks working-dimension step spectra".into(),
                ))
            }
        };
        let p: Vec<T> = input.iter().map(|&v| four * v).collect();
        let q: Vec<T> = output.iter().copied().collect();
        if !majorizes(&p, &q, tol)? || !majorizes_ascending(&q, &p, tol)? {
            return Ok(false);
        }
    }
    Ok(true)
}

/// Checks the squeezing inequalities `4λ_min ≤ λ′_min ≤ λ′_max ≤ 4λ_max` on
/// every consecutive pair of tiling-trace records, using effective-block
/// spectra.
///
/// The interior inequality is strict only when the new spectrum is
/// non-degenerate within `tol`; finite-precision spectra cannot certify
/// strictness on a degenerate pair, so there it is demoted to `≤`. A trace
/// with fewer than two records holds vacuously.
pub fn squeezing_check<T: Scalar>(trace: &TilingTrace<T>, tol: T) -> Result<bool> {
    let four = T::from_f64_lossy(4.0);
    let eff = trace.effective_dim();
    for pair in trace.steps().windows(2) {
        let prev = OrderedEigenvalues::of_effective_block(&pair[0].operator, eff)?;
        let next = OrderedEigenvalues::of_effective_block(&pair[1].operator, eff)?;
        let (lo, hi) = (next.min(), next.max());
        if four * prev.min() > lo + tol {
            return Ok(false);
        }
        if hi > four * prev.max() + tol {
            return Ok(false);
        }
        let interior_ok = if hi - lo > tol { lo < hi } else { lo <= hi };
        if !interior_ok {
            return Ok(false);
        }
    }
    Ok(true)
}
