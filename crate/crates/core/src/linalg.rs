//! Small dense vector helpers on slices.

use crate::Scalar;

#[inline]
pub fn dot<S: Scalar>(a: &[S], b: &[S]) -> S {
    debug_assert_eq!(a.len(), b.len());
    a.iter().zip(b).fold(S::zero(), |acc, (&x, &y)| acc + x * y)
}

#[inline]
pub fn norm_sq<S: Scalar>(a: &[S]) -> S {
    dot(a, a)
}

#[inline]
pub fn norm<S: Scalar>(a: &[S]) -> S {
    norm_sq(a).sqrt()
}

#[inline]
pub fn dist_sq<S: Scalar>(a: &[S], b: &[S]) -> S {
    debug_assert_eq!(a.len(), b.len());
    a.iter().zip(b).fold(S::zero(), |acc, (&x, &y)| {
        let d = x - y;
        acc + d * d
    })
}

#[inline]
pub fn dist<S: Scalar>(a: &[S], b: &[S]) -> S {
    dist_sq(a, b).sqrt()
}

/// `y += a * x`
#[inline]
pub fn axpy<S: Scalar>(a: S, x: &[S], y: &mut [S]) {
    debug_assert_eq!(x.len(), y.len());
    for (yi, &xi) in y.iter_mut().zip(x) {
        *yi += a * xi;
    }
}

/// Moves `avg` a fraction `w` of the way towards `x`.
#[inline]
pub fn blend_into<S: Scalar>(avg: &mut [S], x: &[S], w: S) {
    debug_assert_eq!(avg.len(), x.len());
    for (a, &xi) in avg.iter_mut().zip(x) {
        *a += w * (xi - *a);
    }
}

/// Dense row-major matrix-vector product `out = m * x`.
pub fn matvec<S: Scalar>(m: &[S], rows: usize, cols: usize, x: &[S], out: &mut [S]) {
    debug_assert_eq!(m.len(), rows * cols);
    debug_assert_eq!(x.len(), cols);
    debug_assert_eq!(out.len(), rows);
    for (i, o) in out.iter_mut().enumerate() {
        *o = dot(&m[i * cols..(i + 1) * cols], x);
    }
}

/// Dense row-major transposed product `out = mᵀ * x`.
pub fn matvec_t<S: Scalar>(m: &[S], rows: usize, cols: usize, x: &[S], out: &mut [S]) {
    debug_assert_eq!(m.len(), rows * cols);
    debug_assert_eq!(x.len(), rows);
    debug_assert_eq!(out.len(), cols);
    out.iter_mut().for_each(|o| *o = S::zero());
    for (i, &xi) in x.iter().enumerate() {
        axpy(xi, &m[i * cols..(i + 1) * cols], out);
    }
}

pub fn all_finite<S: Scalar>(a: &[S]) -> bool {
    a.iter().all(|v| v.is_finite())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn matvec_both_ways() {
        // [[1,2,3],[4,5,6]]
        let m = [1.0, 2.0, 3.0, 4.0, 5.0, 6.0];
        let mut out = [0.0; 2];
        matvec(&m, 2, 3, &[1.0, 0.0, -1.0], &mut out);
        assert_eq!(out, [-2.0, -2.0]);
        let mut out_t = [0.0; 3];
        matvec_t(&m, 2, 3, &[1.0, 1.0], &mut out_t);
        assert_eq!(out_t, [5.0, 7.0, 9.0]);
    }

    #[test]
    fn blend_is_running_mean() {
        let mut avg = vec![0.0];
        for (i, x) in [2.0, 4.0, 6.0].iter().enumerate() {
            blend_into(&mut avg, &[*x], 1.0 / (i as f64 + 1.0));
        }
        assert!((avg[0] - 4.0_f64).abs() < 1e-15);
    }
}
