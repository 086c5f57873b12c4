//! Single runs: mesh, curve, assemble, solve and measure errors.

use std::time::Instant;

use crate::assemble::{assemble_system, Discretization, SparseSystem};
use crate::error::{Error, Result};
use crate::errors::{manufactured_case, surface_error, volume_errors, AnyCase, ErrorReport, ManufacturedCase};
use crate::mesh::{curve_mesh, generate_ball_mesh, generate_disk_mesh, AffineMesh, CurvedMesh, MAX_GEOMETRIC_ORDER};
use crate::refelem::MAX_DEGREE;
use crate::solve::{solve, SolveStats, SolverChoice, DEFAULT_TOL};

/// Parameters of one `(case, r, k, level)` run.
#[derive(Clone, Debug, PartialEq)]
pub struct RunConfig {
    pub case: String,
    pub order: usize,
    pub degree: usize,
    pub level: usize,
    pub solver: SolverChoice,
    pub tol: f64,
    /// Overrides the default quadrature degree.
    pub quad_degree: Option<usize>,
}

impl RunConfig {
    pub fn new(case: &str, order: usize, degree: usize, level: usize) -> Self {
        RunConfig {
            case: case.to_string(),
            order,
            degree,
            level,
            solver: SolverChoice::Direct,
            tol: DEFAULT_TOL,
            quad_degree: None,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !(1..=MAX_GEOMETRIC_ORDER).contains(&self.order) {
            return Err(Error::InvalidArgument(format!("geometric order {} outside 1..={MAX_GEOMETRIC_ORDER}", self.order)));
        }
        if !(1..=MAX_DEGREE).contains(&self.degree) {
            return Err(Error::InvalidArgument(format!("finite element degree {} outside 1..={MAX_DEGREE}", self.degree)));
        }
        if !(self.tol > 0.0) {
            return Err(Error::InvalidArgument(format!("tolerance must be positive, got {}", self.tol)));
        }
        Ok(())
    }
}

#[derive(Clone, Debug)]
pub struct RunOutcome {
    pub config: RunConfig,
    pub report: ErrorReport,
    pub n_cells: usize,
    pub n_boundary_facets: usize,
    /// Seconds spent in assembly and in error evaluation.
    pub assembly_time: f64,
    pub error_time: f64,
}

/// Affine meshes of the disk and ball refinement series.
pub fn series_mesh_2d(level: usize) -> Result<AffineMesh<2>> {
    generate_disk_mesh(level)
}

pub fn series_mesh_3d(level: usize) -> Result<AffineMesh<3>> {
    generate_ball_mesh(level)
}

/// Curved mesh, discretisation and assembled system of one run.
pub struct Problem<'a, const D: usize> {
    pub case: &'a ManufacturedCase<D>,
    pub mesh: CurvedMesh<D>,
    pub disc: Discretization<D>,
    pub system: SparseSystem,
}

impl<'a, const D: usize> Problem<'a, D> {
    pub fn new(
        case: &'a ManufacturedCase<D>,
        base: &AffineMesh<D>,
        order: usize,
        degree: usize,
        quad_degree: Option<usize>,
    ) -> Result<Self> {
        Self::from_mesh(case, curve_mesh(base, &case.domain, order)?, degree, quad_degree)
    }

    /// Uses an already curved mesh, e.g. one read from a file.
    pub fn from_mesh(case: &'a ManufacturedCase<D>, mesh: CurvedMesh<D>, degree: usize, quad_degree: Option<usize>) -> Result<Self> {
        let disc = Discretization::new(&mesh, degree, quad_degree)?;
        let system = assemble_system(&mesh, &disc, &case.params, &case.domain, &case.f, &case.g)?;
        Ok(Problem { case, mesh, disc, system })
    }

    pub fn solve(&self, solver: SolverChoice, tol: f64) -> Result<ErrorReport> {
        let (dofs, stats) = solve(&self.system, solver, tol)?;
        self.report(&dofs, Some(stats))
    }

    pub fn report(&self, dofs: &[f64], stats: Option<SolveStats>) -> Result<ErrorReport> {
        let (e_l2_volume, e_h1_semi) = volume_errors(self.case, &self.mesh, &self.disc, dofs)?;
        let e_l2_surface = surface_error(self.case, &self.mesh, &self.disc, dofs)?;
        Ok(ErrorReport { h: self.mesh.h, e_l2_volume, e_h1_semi, e_l2_surface, dofs: dofs.len(), stats })
    }
}

fn run_typed<const D: usize>(case: &ManufacturedCase<D>, base: AffineMesh<D>, config: &RunConfig) -> Result<RunOutcome> {
    let t = Instant::now();
    let problem = Problem::new(case, &base, config.order, config.degree, config.quad_degree)?;
    let assembly_time = t.elapsed().as_secs_f64();
    let t = Instant::now();
    let report = problem.solve(config.solver, config.tol)?;
    let solve_time = report.stats.map_or(0.0, |s| s.wall_time);
    Ok(RunOutcome {
        config: config.clone(),
        report,
        n_cells: base.n_cells(),
        n_boundary_facets: base.boundary_facets.len(),
        assembly_time,
        error_time: t.elapsed().as_secs_f64() - solve_time,
    })
}

pub fn run_case(config: &RunConfig) -> Result<RunOutcome> {
    config.validate()?;
    match manufactured_case(&config.case)? {
        AnyCase::Disk(case) => run_typed(&case, series_mesh_2d(config.level)?, config),
        AnyCase::Ball(case) => run_typed(&case, series_mesh_3d(config.level)?, config),
    }
}
