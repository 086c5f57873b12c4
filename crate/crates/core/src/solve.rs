//! Solvers for the assembled symmetric positive definite system.

use std::time::Instant;

use faer::linalg::solvers::Solve;
use faer::sparse::{SparseColMat, Triplet};
use faer::Side;

use crate::assemble::{CsrMatrix, SparseSystem};
use crate::error::{Error, Result};

/// Default CG tolerance on the relative residual.
pub const DEFAULT_TOL: f64 = 1e-14;
/// Default size limit of the dense Cholesky solver.
pub const DEFAULT_DENSE_LIMIT: usize = 20_000;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SolverChoice {
    /// Jacobi-preconditioned conjugate gradient.
    Cg,
    /// Sparse Cholesky factorisation.
    Direct,
    /// Dense Cholesky, limited to [`DEFAULT_DENSE_LIMIT`] unknowns.
    Dense,
}

impl std::str::FromStr for SolverChoice {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "cg" => Ok(SolverChoice::Cg),
            "direct" => Ok(SolverChoice::Direct),
            "dense" => Ok(SolverChoice::Dense),
            other => Err(Error::InvalidArgument(format!("unknown solver '{other}' (expected cg, direct or dense)"))),
        }
    }
}

impl std::fmt::Display for SolverChoice {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            SolverChoice::Cg => "cg",
            SolverChoice::Direct => "direct",
            SolverChoice::Dense => "dense",
        })
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SolveStats {
    /// CG iterations; 0 for direct solvers.
    pub iterations: usize,
    /// `|b - A x| / |b|`. For CG this is the recursively updated residual.
    pub final_relative_residual: f64,
    /// Seconds.
    pub wall_time: f64,
}

/// `200 sqrt(n) + 10^4`.
pub fn default_max_iter(n: usize) -> usize {
    (200.0 * (n as f64).sqrt()) as usize + 10_000
}

fn norm(v: &[f64]) -> f64 {
    v.iter().map(|x| x * x).sum::<f64>().sqrt()
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

/// True relative residual `|b - A x| / |b|`.
pub fn relative_residual(matrix: &CsrMatrix, rhs: &[f64], x: &[f64]) -> f64 {
    let ax = matrix.matvec(x);
    let r: Vec<f64> = rhs.iter().zip(&ax).map(|(b, a)| b - a).collect();
    let nb = norm(rhs);
    if nb == 0.0 {
        norm(&r)
    } else {
        norm(&r) / nb
    }
}

/// Conjugate gradient preconditioned by the inverse diagonal.
pub fn cg_jacobi(system: &SparseSystem, tol: f64, max_iter: usize) -> Result<(Vec<f64>, SolveStats)> {
    let start = Instant::now();
    let a = &system.matrix;
    let b = &system.rhs;
    let n = b.len();
    let diag = a.diagonal();
    if let Some(i) = diag.iter().position(|&d| d <= 0.0 || !d.is_finite()) {
        return Err(Error::BreakdownNonSpd(format!("diagonal entry {i} is {}", diag[i])));
    }
    let inv_diag: Vec<f64> = diag.iter().map(|d| 1.0 / d).collect();
    let mut x = vec![0.0; n];
    let nb = norm(b);
    if nb == 0.0 {
        return Ok((x, SolveStats { iterations: 0, final_relative_residual: 0.0, wall_time: start.elapsed().as_secs_f64() }));
    }
    let mut r = b.clone();
    let mut z: Vec<f64> = r.iter().zip(&inv_diag).map(|(r, d)| r * d).collect();
    let mut p = z.clone();
    let mut rz = dot(&r, &z);
    let mut ap = vec![0.0; n];
    let mut rel = 1.0;
    for it in 1..=max_iter {
        a.matvec_into(&p, &mut ap);
        let pap = dot(&p, &ap);
        if pap <= 0.0 || !pap.is_finite() {
            return Err(Error::BreakdownNonSpd(format!("p^T A p = {pap} at iteration {it}")));
        }
        let alpha = rz / pap;
        // The energy norm of the error drops by alpha * r^T z each step.
        debug_assert!(alpha * rz >= 0.0, "energy norm increased at iteration {it}");
        for i in 0..n {
            x[i] += alpha * p[i];
            r[i] -= alpha * ap[i];
        }
        rel = norm(&r) / nb;
        if rel <= tol {
            let stats = SolveStats { iterations: it, final_relative_residual: rel, wall_time: start.elapsed().as_secs_f64() };
            return Ok((x, stats));
        }
        for i in 0..n {
            z[i] = r[i] * inv_diag[i];
        }
        let rz_new = dot(&r, &z);
        let beta = rz_new / rz;
        rz = rz_new;
        for i in 0..n {
            p[i] = z[i] + beta * p[i];
        }
    }
    Err(Error::NoConvergence { iterations: max_iter, residual: rel })
}

/// Dense Cholesky factorisation; refuses systems above `limit` unknowns.
pub fn direct_dense(system: &SparseSystem, limit: usize) -> Result<(Vec<f64>, SolveStats)> {
    let start = Instant::now();
    let n = system.n();
    if n > limit {
        return Err(Error::TooLarge { size: n, limit });
    }
    // Lower triangle, row-major.
    let mut l = vec![0.0; n * n];
    for i in 0..n {
        let (cols, vals) = system.matrix.row(i);
        for (&j, &v) in cols.iter().zip(vals) {
            let j = j as usize;
            if j <= i {
                l[i * n + j] = v;
            }
        }
    }
    for j in 0..n {
        let mut d = l[j * n + j];
        for k in 0..j {
            d -= l[j * n + k] * l[j * n + k];
        }
        if d <= 0.0 || !d.is_finite() {
            return Err(Error::NotSpd { row: j, pivot: d });
        }
        let d = d.sqrt();
        l[j * n + j] = d;
        for i in j + 1..n {
            let mut s = l[i * n + j];
            for k in 0..j {
                s -= l[i * n + k] * l[j * n + k];
            }
            l[i * n + j] = s / d;
        }
    }
    let mut x = system.rhs.clone();
    for i in 0..n {
        let mut s = x[i];
        for k in 0..i {
            s -= l[i * n + k] * x[k];
        }
        x[i] = s / l[i * n + i];
    }
    for i in (0..n).rev() {
        let mut s = x[i];
        for k in i + 1..n {
            s -= l[k * n + i] * x[k];
        }
        x[i] = s / l[i * n + i];
    }
    let rel = relative_residual(&system.matrix, &system.rhs, &x);
    Ok((x, SolveStats { iterations: 0, final_relative_residual: rel, wall_time: start.elapsed().as_secs_f64() }))
}

/// Sparse Cholesky factorisation of the lower triangle.
pub fn direct_sparse(system: &SparseSystem) -> Result<(Vec<f64>, SolveStats)> {
    let start = Instant::now();
    let n = system.n();
    let mut triplets = Vec::with_capacity(system.matrix.nnz() / 2 + n);
    for i in 0..n {
        let (cols, vals) = system.matrix.row(i);
        for (&j, &v) in cols.iter().zip(vals) {
            let j = j as usize;
            if j <= i {
                triplets.push(Triplet::new(i, j, v));
            }
        }
    }
    let a = SparseColMat::<usize, f64>::try_new_from_triplets(n, n, &triplets)
        .map_err(|e| Error::Factorization(format!("{e:?}")))?;
    let llt = a.sp_cholesky(Side::Lower).map_err(|e| match e {
        faer::sparse::linalg::LltError::Numeric(faer::linalg::cholesky::llt::factor::LltError::NonPositivePivot { index }) => {
            Error::NotSpd { row: index, pivot: f64::NAN }
        }
        other => Error::Factorization(format!("{other:?}")),
    })?;
    let mut rhs = faer::Mat::<f64>::from_fn(n, 1, |i, _| system.rhs[i]);
    llt.solve_in_place(&mut rhs);
    let x: Vec<f64> = (0..n).map(|i| rhs[(i, 0)]).collect();
    let rel = relative_residual(&system.matrix, &system.rhs, &x);
    Ok((x, SolveStats { iterations: 0, final_relative_residual: rel, wall_time: start.elapsed().as_secs_f64() }))
}

/// Dispatches to the chosen solver with default parameters.
pub fn solve(system: &SparseSystem, choice: SolverChoice, tol: f64) -> Result<(Vec<f64>, SolveStats)> {
    match choice {
        SolverChoice::Cg => cg_jacobi(system, tol, default_max_iter(system.n())),
        SolverChoice::Direct => direct_sparse(system),
        SolverChoice::Dense => direct_dense(system, DEFAULT_DENSE_LIMIT),
    }
}
