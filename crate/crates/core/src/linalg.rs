//! Fixed-size helpers for `D x D` matrices with `D` in {1, 2, 3}.

use nalgebra::{SMatrix, SVector};

pub type Point<const D: usize> = SVector<f64, D>;
pub type Mat<const D: usize> = SMatrix<f64, D, D>;

pub fn det<const D: usize>(m: &Mat<D>) -> f64 {
    match D {
        1 => m[(0, 0)],
        2 => m[(0, 0)] * m[(1, 1)] - m[(0, 1)] * m[(1, 0)],
        3 => {
            m[(0, 0)] * (m[(1, 1)] * m[(2, 2)] - m[(1, 2)] * m[(2, 1)])
                - m[(0, 1)] * (m[(1, 0)] * m[(2, 2)] - m[(1, 2)] * m[(2, 0)])
                + m[(0, 2)] * (m[(1, 0)] * m[(2, 1)] - m[(1, 1)] * m[(2, 0)])
        }
        _ => unreachable!("dimension {D} not supported"),
    }
}

/// Inverse by the adjugate; `None` when the determinant is exactly zero.
pub fn inverse<const D: usize>(m: &Mat<D>) -> Option<Mat<D>> {
    let det = det(m);
    if det == 0.0 || !det.is_finite() {
        return None;
    }
    let mut inv = Mat::<D>::zeros();
    match D {
        1 => inv[(0, 0)] = 1.0 / det,
        2 => {
            inv[(0, 0)] = m[(1, 1)] / det;
            inv[(0, 1)] = -m[(0, 1)] / det;
            inv[(1, 0)] = -m[(1, 0)] / det;
            inv[(1, 1)] = m[(0, 0)] / det;
        }
        3 => {
            for i in 0..3 {
                for j in 0..3 {
                    let (r0, r1) = ((j + 1) % 3, (j + 2) % 3);
                    let (c0, c1) = ((i + 1) % 3, (i + 2) % 3);
                    inv[(i, j)] = (m[(r0, c0)] * m[(r1, c1)] - m[(r0, c1)] * m[(r1, c0)]) / det;
                }
            }
        }
        _ => unreachable!("dimension {D} not supported"),
    }
    Some(inv)
}

/// Square root of the Gram determinant of a family of at most two vectors,
/// i.e. the (d-1)-volume scaling of the parameterisation they span.
pub fn gram_sqrt<const D: usize>(tangents: &[Point<D>]) -> f64 {
    match tangents.len() {
        0 => 1.0,
        1 => tangents[0].norm(),
        2 => {
            let (a, b) = (&tangents[0], &tangents[1]);
            let g = a.norm_squared() * b.norm_squared() - a.dot(b).powi(2);
            g.max(0.0).sqrt()
        }
        n => unreachable!("gram determinant of {n} vectors not supported"),
    }
}

/// Frobenius product `A : B`.
pub fn ddot<const D: usize>(a: &Mat<D>, b: &Mat<D>) -> f64 {
    a.component_mul(b).sum()
}
