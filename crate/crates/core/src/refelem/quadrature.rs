//! Collapsed-coordinate (conical product) Gauss rules on simplices.
//!
//! The `d`-simplex is the image of the unit cube under the Duffy map
//! `x = u`, `y = v (1 - u)`, `z = w (1 - u)(1 - v)`, whose Jacobian
//! `(1 - u)^{d-1} (1 - v)^{d-2}` is absorbed into Gauss–Jacobi weights.
//! All weights are positive and a rule with `n` points per direction is
//! exact for total degree `2n - 1`.

use nalgebra::{DMatrix, SymmetricEigen};

use crate::error::{Error, Result};

pub const MAX_QUADRATURE_DEGREE: usize = 20;

#[derive(Clone, Debug)]
pub struct QuadratureRule {
    pub dim: usize,
    pub exact_degree: usize,
    /// Reference Cartesian coordinates, one `Vec` of length `dim` per point.
    pub points: Vec<Vec<f64>>,
    pub weights: Vec<f64>,
}

impl QuadratureRule {
    pub fn len(&self) -> usize {
        self.weights.len()
    }

    pub fn is_empty(&self) -> bool {
        self.weights.is_empty()
    }
}

/// Quadrature exact degree used for assembly and error integrals:
/// `2k + 2(r - 1) + 2`, capped at [`MAX_QUADRATURE_DEGREE`].
pub fn default_quadrature_degree(k: usize, r: usize) -> usize {
    (2 * k + 2 * (r - 1) + 2).min(MAX_QUADRATURE_DEGREE)
}

/// Lebesgue measure of the reference `d`-simplex.
pub fn simplex_measure(d: usize) -> f64 {
    match d {
        0 => 1.0,
        1 => 1.0,
        2 => 0.5,
        3 => 1.0 / 6.0,
        _ => unreachable!(),
    }
}

/// Positive-weight rule on the reference `d`-simplex exact for polynomials of
/// total degree `degree`.
pub fn quadrature_rule(d: usize, degree: usize) -> Result<QuadratureRule> {
    if degree > MAX_QUADRATURE_DEGREE {
        return Err(Error::UnsupportedDegree { dim: d, degree, reason: "quadrature degree exceeds 20" });
    }
    if !(1..=3).contains(&d) {
        return Err(Error::UnsupportedDegree { dim: d, degree, reason: "quadrature dimension must be 1, 2 or 3" });
    }
    let n = (degree.max(1) + 2) / 2;
    let (legendre_x, legendre_w) = gauss_jacobi_unit(n, 0);
    let mut points = Vec::new();
    let mut weights = Vec::new();
    match d {
        1 => {
            for (x, w) in legendre_x.iter().zip(&legendre_w) {
                points.push(vec![*x]);
                weights.push(*w);
            }
        }
        2 => {
            let (ux, uw) = gauss_jacobi_unit(n, 1);
            for (u, wu) in ux.iter().zip(&uw) {
                for (v, wv) in legendre_x.iter().zip(&legendre_w) {
                    points.push(vec![*u, v * (1.0 - u)]);
                    weights.push(wu * wv);
                }
            }
        }
        3 => {
            let (ux, uw) = gauss_jacobi_unit(n, 2);
            let (vx, vw) = gauss_jacobi_unit(n, 1);
            for (u, wu) in ux.iter().zip(&uw) {
                for (v, wv) in vx.iter().zip(&vw) {
                    for (w, ww) in legendre_x.iter().zip(&legendre_w) {
                        points.push(vec![*u, v * (1.0 - u), w * (1.0 - u) * (1.0 - v)]);
                        weights.push(wu * wv * ww);
                    }
                }
            }
        }
        _ => unreachable!(),
    }
    Ok(QuadratureRule { dim: d, exact_degree: degree, points, weights })
}

/// Rule on the reference facet of a `d`-simplex (a `(d-1)`-simplex).
pub fn facet_quadrature(d: usize, degree: usize) -> Result<QuadratureRule> {
    if !(2..=3).contains(&d) {
        return Err(Error::UnsupportedDegree { dim: d, degree, reason: "facet rules need dimension 2 or 3" });
    }
    quadrature_rule(d - 1, degree)
}

/// Local vertices of the facet opposite local vertex `face`, increasing.
pub fn facet_vertices(d: usize, face: usize) -> Vec<usize> {
    (0..=d).filter(|&v| v != face).collect()
}

/// Barycentric coordinates (length `d + 1`) of a facet reference point
/// embedded on the facet opposite local vertex `face`.
pub fn embed_facet_point(d: usize, face: usize, xi: &[f64]) -> Vec<f64> {
    let verts = facet_vertices(d, face);
    let mut mu = Vec::with_capacity(d);
    mu.push(1.0 - xi.iter().sum::<f64>());
    mu.extend_from_slice(xi);
    let mut bary = vec![0.0; d + 1];
    for (m, &v) in verts.iter().enumerate() {
        bary[v] = mu[m];
    }
    bary
}

/// Gauss–Jacobi nodes and weights on `[-1, 1]` for the weight `(1 - x)^α`.
///
/// Golub–Welsch provides the initial nodes; each node is then polished by
/// Newton iterations on `P_n^{(α,0)}` and the weights are taken from the
/// closed form `2^{α+1} / ((1 - x²) P_n'(x)²)`.
pub fn gauss_jacobi(n: usize, alpha: usize) -> (Vec<f64>, Vec<f64>) {
    assert!(n >= 1);
    let a = alpha as f64;
    let mut jac = DMatrix::<f64>::zeros(n, n);
    for i in 0..n {
        let k = i as f64;
        jac[(i, i)] = if i == 0 {
            -a / (a + 2.0)
        } else {
            -(a * a) / ((2.0 * k + a) * (2.0 * k + a + 2.0))
        };
        if i + 1 < n {
            let k = k + 1.0;
            let num = 4.0 * k * (k + a) * k * (k + a);
            let s = 2.0 * k + a;
            let off = (num / (s * s * (s + 1.0) * (s - 1.0))).sqrt();
            jac[(i, i + 1)] = off;
            jac[(i + 1, i)] = off;
        }
    }
    let eig = SymmetricEigen::new(jac);
    let mut nodes: Vec<f64> = eig.eigenvalues.iter().copied().collect();
    nodes.sort_by(|x, y| x.partial_cmp(y).unwrap());

    let mut weights = Vec::with_capacity(n);
    for x in nodes.iter_mut() {
        for _ in 0..3 {
            let (p, dp) = jacobi_with_derivative(n, a, *x);
            let step = p / dp;
            *x -= step;
            if step.abs() < 1e-17 {
                break;
            }
        }
        let (_, dp) = jacobi_with_derivative(n, a, *x);
        weights.push(2f64.powi(alpha as i32 + 1) / ((1.0 - *x * *x) * dp * dp));
    }
    (nodes, weights)
}

/// `P_n^{(α,0)}(x)` and its derivative by the three-term recurrence.
fn jacobi_with_derivative(n: usize, a: f64, x: f64) -> (f64, f64) {
    let mut p_prev = 1.0;
    let mut dp_prev = 0.0;
    let mut p = (a + 1.0) + (a + 2.0) * (x - 1.0) / 2.0;
    let mut dp = (a + 2.0) / 2.0;
    if n == 0 {
        return (1.0, 0.0);
    }
    for k in 2..=n {
        let k = k as f64;
        let s = 2.0 * k + a;
        let c0 = 2.0 * k * (k + a) * (s - 2.0);
        let c1 = (s - 1.0) * s * (s - 2.0);
        let c2 = (s - 1.0) * a * a;
        let c3 = 2.0 * (k + a - 1.0) * (k - 1.0) * s;
        let p_next = ((c1 * x + c2) * p - c3 * p_prev) / c0;
        let dp_next = ((c1 * x + c2) * dp + c1 * p - c3 * dp_prev) / c0;
        p_prev = p;
        dp_prev = dp;
        p = p_next;
        dp = dp_next;
    }
    (p, dp)
}

/// Gauss–Jacobi rule mapped to `[0, 1]` for the weight `(1 - t)^α`.
fn gauss_jacobi_unit(n: usize, alpha: usize) -> (Vec<f64>, Vec<f64>) {
    let (x, w) = gauss_jacobi(n, alpha);
    let scale = 0.5f64.powi(alpha as i32 + 1);
    let t = x.iter().map(|x| (1.0 + x) / 2.0).collect();
    let w = w.iter().map(|w| w * scale).collect();
    (t, w)
}
