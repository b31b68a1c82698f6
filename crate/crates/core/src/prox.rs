//! The quadratically anchored prox-mapping shared by every solver.

use crate::error::{Error, Result};
use crate::point::Point;
use crate::set::FeasibleSet;
use crate::Scalar;

/// Exact minimizer over `set` of
/// `⟨g, u⟩ + ‖u − c‖²/(2η) + Σᵢ (μᵢ/2)‖u − aᵢ‖²`.
///
/// `anchors` lists `(μᵢ, aᵢ)` pairs with `μᵢ ≥ 0`.
pub fn prox_step<S: Scalar>(
    set: &FeasibleSet<S>,
    eta: S,
    center: &[S],
    grad: &[S],
    anchors: &[(S, &[S])],
) -> Result<Point<S>> {
    if !(eta > S::zero()) || !eta.is_finite() {
        return Err(Error::param("eta", format!("must be positive and finite, got {eta}")));
    }
    let d = set.dim();
    Error::check_dim("prox_step center", d, center.len())?;
    Error::check_dim("prox_step gradient", d, grad.len())?;
    for &(w, a) in anchors {
        if !(w >= S::zero()) {
            return Err(Error::param("anchor weight", format!("must be nonnegative, got {w}")));
        }
        Error::check_dim("prox_step anchor", d, a.len())?;
    }
    let mut out = vec![S::zero(); d];
    prox_into(set, eta, center, grad, anchors, &mut out);
    Ok(Point::from_vec_unchecked(out))
}

/// Unchecked kernel of [`prox_step`], writing into `out`.
///
/// Evaluated as `(c + η(Σμᵢaᵢ − g)) / (1 + ηΣμᵢ)`, which reduces to the
/// plain step `c − ηg` when there are no anchors.
pub(crate) fn prox_into<S: Scalar>(
    set: &FeasibleSet<S>,
    eta: S,
    center: &[S],
    grad: &[S],
    anchors: &[(S, &[S])],
    out: &mut [S],
) {
    let total: S = anchors.iter().map(|&(w, _)| w).sum();
    let denom = S::one() + eta * total;
    for i in 0..out.len() {
        let mut pull = -grad[i];
        for &(w, a) in anchors {
            pull += w * a[i];
        }
        let v = center[i] + eta * pull;
        out[i] = if anchors.is_empty() { v } else { v / denom };
    }
    set.project_in_place(out);
}
