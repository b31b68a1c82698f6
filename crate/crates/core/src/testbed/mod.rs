//! Synthetic instances with closed-form solutions: strongly convex (or
//! convex) quadratics and bilinearly coupled saddle problems.

pub mod io;
mod quadratic;
mod saddle;

pub use io::{read_instance, write_instance, Instance};
pub use quadratic::{gen_quadratic, QuadraticInstance};
pub use saddle::{gen_saddle, gen_saddle_with, SaddleInstance, SaddleParams};

use nalgebra::{DMatrix, DVector};

use crate::Scalar;

/// Eigenvalue floor used in place of `μ = 0`.
pub const SPECTRUM_FLOOR: f64 = 1e-6;

fn to_f64<S: Scalar>(v: &[S]) -> Vec<f64> {
    v.iter().map(|s| s.as_f64()).collect()
}

fn from_f64<S: Scalar>(v: &[f64]) -> Vec<S> {
    v.iter().map(|&s| S::of(s)).collect()
}

fn dmatrix<S: Scalar>(m: &[S], rows: usize, cols: usize) -> DMatrix<f64> {
    DMatrix::from_row_iterator(rows, cols, m.iter().map(|s| s.as_f64()))
}

fn row_major(m: &DMatrix<f64>) -> Vec<f64> {
    let mut out = Vec::with_capacity(m.nrows() * m.ncols());
    for i in 0..m.nrows() {
        for j in 0..m.ncols() {
            out.push(m[(i, j)]);
        }
    }
    out
}

fn dvector<S: Scalar>(v: &[S]) -> DVector<f64> {
    DVector::from_iterator(v.len(), v.iter().map(|s| s.as_f64()))
}

/// `‖v‖ ≤ r` up to a relative `1e-12`.
fn inside_ball(norm: f64, r: f64) -> bool {
    norm <= r * (1.0 + 1e-12)
}
