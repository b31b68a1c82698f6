use crate::error::{Error, Result};
use crate::linalg;
use crate::Scalar;

/// A primal iterate `x ∈ X ⊆ ℝᵈ`.
#[derive(Debug, Clone, PartialEq)]
pub struct Point<S> {
    coords: Vec<S>,
}

impl<S: Scalar> Point<S> {
    /// Wraps `coords`, rejecting empty or non-finite input.
    pub fn new(coords: Vec<S>) -> Result<Self> {
        if coords.is_empty() {
            return Err(Error::param("coords", "a point needs at least one coordinate"));
        }
        if !linalg::all_finite(&coords) {
            return Err(Error::NonFinite("Point::new"));
        }
        Ok(Self { coords })
    }

    pub fn zeros(dim: usize) -> Self {
        assert!(dim > 0, "a point needs at least one coordinate");
        Self {
            coords: vec![S::zero(); dim],
        }
    }

    pub(crate) fn from_vec_unchecked(coords: Vec<S>) -> Self {
        Self { coords }
    }

    pub fn dim(&self) -> usize {
        self.coords.len()
    }

    pub fn coords(&self) -> &[S] {
        &self.coords
    }

    pub fn into_vec(self) -> Vec<S> {
        self.coords
    }

    pub fn dist_sq(&self, other: &[S]) -> S {
        linalg::dist_sq(&self.coords, other)
    }
}

impl<S> AsRef<[S]> for Point<S> {
    fn as_ref(&self) -> &[S] {
        &self.coords
    }
}

/// A stacked `z = (x, y)` iterate; the first `split` coordinates are `x`.
#[derive(Debug, Clone, PartialEq)]
pub struct PrimalDualPoint<S> {
    coords: Vec<S>,
    split: usize,
}

impl<S: Scalar> PrimalDualPoint<S> {
    pub fn new(coords: Vec<S>, split: usize) -> Result<Self> {
        if split == 0 || split >= coords.len() {
            return Err(Error::param(
                "split",
                format!("need 1 <= split < {}, got {split}", coords.len()),
            ));
        }
        if !linalg::all_finite(&coords) {
            return Err(Error::NonFinite("PrimalDualPoint::new"));
        }
        Ok(Self { coords, split })
    }

    pub fn from_parts(x: &[S], y: &[S]) -> Result<Self> {
        let mut coords = Vec::with_capacity(x.len() + y.len());
        coords.extend_from_slice(x);
        coords.extend_from_slice(y);
        Self::new(coords, x.len())
    }

    pub(crate) fn from_vec_unchecked(coords: Vec<S>, split: usize) -> Self {
        Self { coords, split }
    }

    pub fn split(&self) -> usize {
        self.split
    }

    pub fn dims(&self) -> (usize, usize) {
        (self.split, self.coords.len() - self.split)
    }

    pub fn coords(&self) -> &[S] {
        &self.coords
    }

    pub fn x(&self) -> &[S] {
        &self.coords[..self.split]
    }

    pub fn y(&self) -> &[S] {
        &self.coords[self.split..]
    }

    pub fn dist_sq(&self, other: &[S]) -> S {
        linalg::dist_sq(&self.coords, other)
    }
}

impl<S> AsRef<[S]> for PrimalDualPoint<S> {
    fn as_ref(&self) -> &[S] {
        &self.coords
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rejects_nan_and_empty() {
        assert!(Point::new(vec![1.0, f64::NAN]).is_err());
        assert!(Point::<f64>::new(vec![]).is_err());
        assert!(Point::new(vec![f64::INFINITY]).is_err());
    }

    #[test]
    fn split_bounds() {
        assert!(PrimalDualPoint::new(vec![1.0, 2.0], 0).is_err());
        assert!(PrimalDualPoint::new(vec![1.0, 2.0], 2).is_err());
        let z = PrimalDualPoint::from_parts(&[1.0], &[2.0, 3.0]).unwrap();
        assert_eq!(z.x(), &[1.0]);
        assert_eq!(z.y(), &[2.0, 3.0]);
        assert_eq!(z.dims(), (1, 2));
    }
}
