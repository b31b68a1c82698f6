//! Compact convex sets with exact Euclidean projections.

use crate::error::{Error, Result};
use crate::linalg;
use crate::point::Point;
use crate::Scalar;

/// A projectable compact convex set.
#[derive(Debug, Clone, PartialEq)]
pub enum FeasibleSet<S> {
    /// `{x : ‖x − center‖ ≤ radius}`
    Ball { center: Vec<S>, radius: S },
    /// `{x : lower ≤ x ≤ upper}` componentwise
    Box { lower: Vec<S>, upper: Vec<S> },
    /// `{x ≥ 0 : Σ xᵢ = scale}` in `dim` coordinates
    Simplex { dim: usize, scale: S },
    /// `A × B`; the first `A.dim()` coordinates belong to `A`
    Product(Box<FeasibleSet<S>>, Box<FeasibleSet<S>>),
}

impl<S: Scalar> FeasibleSet<S> {
    pub fn ball(center: Vec<S>, radius: S) -> Result<Self> {
        if center.is_empty() {
            return Err(Error::param("center", "empty"));
        }
        if !(radius > S::zero()) || !radius.is_finite() {
            return Err(Error::param(
                "radius",
                format!("must be positive and finite, got {radius}"),
            ));
        }
        if !linalg::all_finite(&center) {
            return Err(Error::NonFinite("FeasibleSet::ball"));
        }
        Ok(FeasibleSet::Ball { center, radius })
    }

    /// Ball of radius `radius` centred at the origin of `ℝ^dim`.
    pub fn origin_ball(dim: usize, radius: S) -> Result<Self> {
        Self::ball(vec![S::zero(); dim], radius)
    }

    pub fn cube(lower: Vec<S>, upper: Vec<S>) -> Result<Self> {
        Error::check_dim("FeasibleSet::cube", lower.len(), upper.len())?;
        if lower.is_empty() {
            return Err(Error::param("lower", "empty"));
        }
        if lower
            .iter()
            .zip(&upper)
            .any(|(l, u)| !(l <= u) || !l.is_finite() || !u.is_finite())
        {
            return Err(Error::param("lower", "need finite lower <= upper componentwise"));
        }
        Ok(FeasibleSet::Box { lower, upper })
    }

    pub fn simplex(dim: usize, scale: S) -> Result<Self> {
        if dim == 0 {
            return Err(Error::param("dim", "empty"));
        }
        if !(scale > S::zero()) || !scale.is_finite() {
            return Err(Error::param(
                "scale",
                format!("must be positive and finite, got {scale}"),
            ));
        }
        Ok(FeasibleSet::Simplex { dim, scale })
    }

    pub fn product(a: FeasibleSet<S>, b: FeasibleSet<S>) -> Self {
        FeasibleSet::Product(Box::new(a), Box::new(b))
    }

    pub fn dim(&self) -> usize {
        match self {
            FeasibleSet::Ball { center, .. } => center.len(),
            FeasibleSet::Box { lower, .. } => lower.len(),
            FeasibleSet::Simplex { dim, .. } => *dim,
            FeasibleSet::Product(a, b) => a.dim() + b.dim(),
        }
    }

    /// Euclidean diameter of the set.
    pub fn diameter(&self) -> S {
        match self {
            FeasibleSet::Ball { radius, .. } => *radius + *radius,
            FeasibleSet::Box { lower, upper } => linalg::dist(lower, upper),
            FeasibleSet::Simplex { dim, scale } => {
                if *dim == 1 {
                    S::zero()
                } else {
                    *scale * S::of(2.0).sqrt()
                }
            }
            FeasibleSet::Product(a, b) => a.diameter().hypot(b.diameter()),
        }
    }

    pub fn contains(&self, p: &[S], tol: S) -> bool {
        if p.len() != self.dim() {
            return false;
        }
        match self {
            FeasibleSet::Ball { center, radius } => linalg::dist(p, center) <= *radius + tol,
            FeasibleSet::Box { lower, upper } => p
                .iter()
                .zip(lower.iter().zip(upper))
                .all(|(&v, (&l, &u))| v >= l - tol && v <= u + tol),
            FeasibleSet::Simplex { scale, .. } => {
                p.iter().all(|&v| v >= -tol) && (p.iter().copied().sum::<S>() - *scale).abs() <= tol
            }
            FeasibleSet::Product(a, b) => {
                let (pa, pb) = p.split_at(a.dim());
                a.contains(pa, tol) && b.contains(pb, tol)
            }
        }
    }

    /// Nearest point of the set to `p`.
    pub fn project(&self, p: &Point<S>) -> Result<Point<S>> {
        Error::check_dim("project", self.dim(), p.dim())?;
        let mut out = p.coords().to_vec();
        self.project_in_place(&mut out);
        Ok(Point::from_vec_unchecked(out))
    }

    /// Projects a raw slice, checking its length.
    pub fn project_slice(&self, p: &[S]) -> Result<Vec<S>> {
        Error::check_dim("project", self.dim(), p.len())?;
        let mut out = p.to_vec();
        self.project_in_place(&mut out);
        Ok(out)
    }

    /// Overwrites `p` with its projection. The caller guarantees the length.
    pub fn project_in_place(&self, p: &mut [S]) {
        debug_assert_eq!(p.len(), self.dim());
        match self {
            FeasibleSet::Ball { center, radius } => {
                let d = linalg::dist(p, center);
                if d > *radius {
                    let shrink = *radius / d;
                    for (v, &c) in p.iter_mut().zip(center) {
                        *v = c + (*v - c) * shrink;
                    }
                }
            }
            FeasibleSet::Box { lower, upper } => {
                for (v, (&l, &u)) in p.iter_mut().zip(lower.iter().zip(upper)) {
                    *v = v.max(l).min(u);
                }
            }
            FeasibleSet::Simplex { scale, .. } => project_simplex(p, *scale),
            FeasibleSet::Product(a, b) => {
                let (pa, pb) = p.split_at_mut(a.dim());
                a.project_in_place(pa);
                b.project_in_place(pb);
            }
        }
    }
}

/// Sort-and-threshold projection onto `{x ≥ 0 : Σx = scale}`.
fn project_simplex<S: Scalar>(p: &mut [S], scale: S) {
    let mut sorted = p.to_vec();
    sorted.sort_by(|a, b| b.partial_cmp(a).unwrap_or(std::cmp::Ordering::Equal));
    let mut cumsum = S::zero();
    let mut theta = S::zero();
    for (j, &u) in sorted.iter().enumerate() {
        cumsum += u;
        let t = (cumsum - scale) / S::of_usize(j + 1);
        if u - t > S::zero() {
            theta = t;
        } else {
            break;
        }
    }
    for v in p.iter_mut() {
        *v = (*v - theta).max(S::zero());
    }
}
