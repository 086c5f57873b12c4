use nalgebra::DMatrix;

use super::lattice::Lattice;
use crate::error::{Error, Result};
use crate::linalg::Point;

/// Lagrange basis of degree `k` on the reference `D`-simplex, expressed in
/// the monomial basis through an inverted Vandermonde matrix.
#[derive(Clone, Debug)]
pub struct ReferenceBasis<const D: usize> {
    pub degree: usize,
    pub lattice: Lattice,
    exponents: Vec<[usize; D]>,
    /// `coeffs[m * n + i]`: coefficient of monomial `m` in basis function `i`.
    coeffs: Vec<f64>,
}

/// Basis values and reference gradients tabulated at a list of points,
/// stored point-major.
#[derive(Clone, Debug)]
pub struct Tabulation<const D: usize> {
    pub n_basis: usize,
    pub values: Vec<f64>,
    pub grads: Vec<Point<D>>,
}

impl<const D: usize> Tabulation<D> {
    pub fn values_at(&self, q: usize) -> &[f64] {
        &self.values[q * self.n_basis..(q + 1) * self.n_basis]
    }

    pub fn grads_at(&self, q: usize) -> &[Point<D>] {
        &self.grads[q * self.n_basis..(q + 1) * self.n_basis]
    }

    pub fn n_points(&self) -> usize {
        self.values.len() / self.n_basis.max(1)
    }
}

impl<const D: usize> ReferenceBasis<D> {
    pub fn new(degree: usize) -> Result<Self> {
        let lattice = Lattice::new(D, degree)?;
        let mut exponents = Vec::new();
        let mut e = [0usize; D];
        monomials(&mut exponents, &mut e, 0, degree);
        let n = lattice.len();
        debug_assert_eq!(exponents.len(), n);

        let vandermonde = DMatrix::from_fn(n, n, |i, m| {
            let bary = lattice.barycentric(i);
            let x = Point::<D>::from_fn(|j, _| bary[j + 1]);
            monomial(&x, &exponents[m])
        });
        let inv = vandermonde
            .try_inverse()
            .ok_or(Error::UnsupportedDegree { dim: D, degree, reason: "singular Vandermonde matrix" })?;
        // basis_i(x) = Σ_m inv[(m, i)] x^m
        let mut coeffs = vec![0.0; n * n];
        for m in 0..n {
            for i in 0..n {
                coeffs[m * n + i] = inv[(m, i)];
            }
        }
        Ok(ReferenceBasis { degree, lattice, exponents, coeffs })
    }

    pub fn len(&self) -> usize {
        self.lattice.len()
    }

    pub fn is_empty(&self) -> bool {
        self.lattice.is_empty()
    }

    pub fn node(&self, i: usize) -> Point<D> {
        let bary = self.lattice.barycentric(i);
        Point::<D>::from_fn(|j, _| bary[j + 1])
    }

    pub fn eval_into(&self, x: &Point<D>, values: &mut [f64], grads: &mut [Point<D>]) {
        let n = self.len();
        let k = self.degree;
        let mut powers = [[1.0f64; 8]; D];
        for j in 0..D {
            for e in 1..=k {
                powers[j][e] = powers[j][e - 1] * x[j];
            }
        }
        values[..n].fill(0.0);
        grads[..n].fill(Point::<D>::zeros());
        for (m, exp) in self.exponents.iter().enumerate() {
            let mut val = 1.0;
            for j in 0..D {
                val *= powers[j][exp[j]];
            }
            let mut grad = Point::<D>::zeros();
            for j in 0..D {
                if exp[j] == 0 {
                    continue;
                }
                let mut g = exp[j] as f64 * powers[j][exp[j] - 1];
                for l in 0..D {
                    if l != j {
                        g *= powers[l][exp[l]];
                    }
                }
                grad[j] = g;
            }
            let row = &self.coeffs[m * n..(m + 1) * n];
            for i in 0..n {
                let c = row[i];
                if c != 0.0 {
                    values[i] += c * val;
                    grads[i] += grad * c;
                }
            }
        }
    }

    /// Values and reference-coordinate gradients at `x`. Points outside the
    /// simplex are allowed (extrapolation).
    pub fn eval(&self, x: &Point<D>) -> (Vec<f64>, Vec<Point<D>>) {
        let mut values = vec![0.0; self.len()];
        let mut grads = vec![Point::<D>::zeros(); self.len()];
        self.eval_into(x, &mut values, &mut grads);
        (values, grads)
    }

    pub fn tabulate(&self, points: &[Point<D>]) -> Tabulation<D> {
        let n = self.len();
        let mut values = vec![0.0; n * points.len()];
        let mut grads = vec![Point::<D>::zeros(); n * points.len()];
        for (q, x) in points.iter().enumerate() {
            self.eval_into(x, &mut values[q * n..(q + 1) * n], &mut grads[q * n..(q + 1) * n]);
        }
        Tabulation { n_basis: n, values, grads }
    }
}

fn monomials<const D: usize>(out: &mut Vec<[usize; D]>, e: &mut [usize; D], pos: usize, remaining: usize) {
    if pos == D {
        out.push(*e);
        return;
    }
    for a in 0..=remaining {
        e[pos] = a;
        monomials(out, e, pos + 1, remaining - a);
    }
    e[pos] = 0;
}

fn monomial<const D: usize>(x: &Point<D>, e: &[usize; D]) -> f64 {
    (0..D).map(|j| x[j].powi(e[j] as i32)).product()
}
