mod config;
mod study;

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use curvelast::mesh::{curve_mesh, generate_ball_mesh, generate_disk_mesh, read_gmsh, read_native, write_gmsh, write_native};
use curvelast::study::{run_case, Problem, RunConfig};
use curvelast::{AnyCase, CurvedMesh, Domain, ErrorReport, ManufacturedCase, SolverChoice};

use config::{FileConfig, ListSpec, StudyConfig};

#[derive(Debug)]
pub enum CliError {
    Usage(String),
    Numeric(String),
    Io(String),
}

impl CliError {
    fn exit_code(&self) -> u8 {
        match self {
            CliError::Usage(_) => 2,
            CliError::Numeric(_) => 3,
            CliError::Io(_) => 4,
        }
    }
}

impl std::fmt::Display for CliError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            CliError::Usage(m) => write!(f, "usage error: {m}"),
            CliError::Numeric(m) => write!(f, "numerical failure: {m}"),
            CliError::Io(m) => write!(f, "i/o error: {m}"),
        }
    }
}

impl From<curvelast::Error> for CliError {
    fn from(e: curvelast::Error) -> Self {
        use curvelast::Error as E;
        match e {
            E::InvalidArgument(_) | E::UnknownCase(_) | E::UnsupportedDegree { .. } | E::DimensionMismatch { .. } => {
                CliError::Usage(e.to_string())
            }
            E::Io { .. } | E::Parse { .. } | E::UnsupportedElementType(_) => CliError::Io(e.to_string()),
            _ => CliError::Numeric(e.to_string()),
        }
    }
}

#[derive(Parser)]
#[command(name = "curvelast", version, about = "Curved high-order finite elements for linear elasticity with a Robin condition")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum DomainArg {
    Disk,
    Ball,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum MeshFormat {
    Native,
    Gmsh,
}

#[derive(Subcommand)]
enum Command {
    /// Generate and curve a mesh of the refinement series.
    Mesh {
        #[arg(long, value_enum)]
        domain: DomainArg,
        /// Geometric order r.
        #[arg(long, value_parser = clap::value_parser!(u8).range(1..=3))]
        order: u8,
        /// Refinement level n (10 * 2^(n-1) boundary edges).
        #[arg(long, value_parser = clap::value_parser!(u8).range(1..))]
        level: u8,
        #[arg(long, short)]
        output: PathBuf,
        /// Defaults to gmsh for `.msh` files, native otherwise.
        #[arg(long, value_enum)]
        format: Option<MeshFormat>,
    },
    /// Solve one manufactured case and report its errors on one line.
    Solve {
        #[arg(long)]
        case: String,
        #[arg(long, value_parser = clap::value_parser!(u8).range(1..=3), required_unless_present = "mesh")]
        order: Option<u8>,
        /// Finite element degree k.
        #[arg(long, value_parser = clap::value_parser!(u8).range(1..=4))]
        degree: u8,
        #[arg(long, value_parser = clap::value_parser!(u8).range(1..), required_unless_present = "mesh")]
        level: Option<u8>,
        /// Use a mesh file (native or `.msh`) instead of the generated series.
        #[arg(long, conflicts_with_all = ["order", "level"])]
        mesh: Option<PathBuf>,
        #[arg(long, default_value = "cg")]
        solver: String,
        #[arg(long, default_value_t = curvelast::solve::DEFAULT_TOL)]
        tol: f64,
        #[arg(long)]
        quad_degree: Option<usize>,
    },
    /// Run a convergence study and write CSV and plot data.
    Study {
        /// Key-value TOML file; flags override its entries.
        #[arg(long)]
        config: Option<PathBuf>,
        #[arg(long)]
        case: Option<String>,
        /// Geometric orders, e.g. `1-3` or `1,2`.
        #[arg(long)]
        orders: Option<String>,
        /// Finite element degrees, e.g. `1-4`.
        #[arg(long)]
        degrees: Option<String>,
        /// Refinement levels, e.g. `1-6`.
        #[arg(long)]
        levels: Option<String>,
        #[arg(long)]
        solver: Option<String>,
        #[arg(long)]
        tol: Option<f64>,
        #[arg(long)]
        quad_degree: Option<usize>,
        #[arg(long, short)]
        output: Option<PathBuf>,
        #[arg(long)]
        plot_dir: Option<PathBuf>,
    },
    /// Recompute observed orders from a study CSV.
    Orders {
        input: PathBuf,
        /// Fail unless the emitted order columns match to 1e-12.
        #[arg(long)]
        check: bool,
    },
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("info")).format_timestamp(None).init();
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 2 } else { 0 });
        }
    };
    match run(cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("curvelast: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}

fn run(command: Command) -> Result<(), CliError> {
    match command {
        Command::Mesh { domain, order, level, output, format } => cmd_mesh(domain, order as usize, level as usize, &output, format),
        Command::Solve { case, order, degree, level, mesh, solver, tol, quad_degree } => {
            let solver: SolverChoice = solver.parse()?;
            match mesh {
                Some(path) => cmd_solve_file(&case, &path, degree as usize, solver, tol, quad_degree),
                None => {
                    let mut cfg = RunConfig::new(&case, order.unwrap() as usize, degree as usize, level.unwrap() as usize);
                    cfg.solver = solver;
                    cfg.tol = tol;
                    cfg.quad_degree = quad_degree;
                    let outcome = run_case(&cfg)?;
                    println!("{}", solve_line(&case, &format!("order={} level={}", cfg.order, cfg.level), degree as usize, &outcome.report));
                    Ok(())
                }
            }
        }
        Command::Study { config, case, orders, degrees, levels, solver, tol, quad_degree, output, plot_dir } => {
            let file = match config {
                Some(path) => FileConfig::load(&path)?,
                None => FileConfig::default(),
            };
            let flags = FileConfig {
                case,
                orders: orders.map(ListSpec::Text),
                degrees: degrees.map(ListSpec::Text),
                levels: levels.map(ListSpec::Text),
                solver,
                tol,
                quad_degree,
                output,
                plot_dir,
            };
            cmd_study(&StudyConfig::from_file_config(file.overridden_by(flags))?)
        }
        Command::Orders { input, check } => cmd_orders(&input, check),
    }
}

fn is_gmsh(path: &Path) -> bool {
    path.extension().is_some_and(|e| e == "msh")
}

fn cmd_mesh(domain: DomainArg, order: usize, level: usize, output: &Path, format: Option<MeshFormat>) -> Result<(), CliError> {
    let format = format.unwrap_or(if is_gmsh(output) { MeshFormat::Gmsh } else { MeshFormat::Native });
    fn emit<const D: usize>(mesh: &CurvedMesh<D>, output: &Path, format: MeshFormat) -> Result<(), CliError> {
        match format {
            MeshFormat::Native => write_native(mesh, output)?,
            MeshFormat::Gmsh => write_gmsh(mesh, output)?,
        }
        println!(
            "h={} cells={} boundary_facets={} output={}",
            mesh.h,
            mesh.n_cells(),
            mesh.base.boundary_facets.len(),
            output.display()
        );
        Ok(())
    }
    match domain {
        DomainArg::Disk => emit(&curve_mesh(&generate_disk_mesh(level)?, &Domain::unit_disk(), order)?, output, format),
        DomainArg::Ball => emit(&curve_mesh(&generate_ball_mesh(level)?, &Domain::unit_ball(), order)?, output, format),
    }
}

fn solve_line(case: &str, mesh: &str, degree: usize, rep: &ErrorReport) -> String {
    let stats = rep.stats.expect("solved runs carry statistics");
    format!(
        "case={case} {mesh} degree={degree} h={} dofs={} iterations={} residual={:e} wall_time={:.3} e_l2_volume={:e} e_h1_semi={:e} e_l2_surface={:e}",
        rep.h, rep.dofs, stats.iterations, stats.final_relative_residual, stats.wall_time, rep.e_l2_volume, rep.e_h1_semi, rep.e_l2_surface
    )
}

fn cmd_solve_file(case: &str, path: &Path, degree: usize, solver: SolverChoice, tol: f64, quad: Option<usize>) -> Result<(), CliError> {
    fn go<const D: usize>(
        case: &ManufacturedCase<D>,
        path: &Path,
        degree: usize,
        solver: SolverChoice,
        tol: f64,
        quad: Option<usize>,
    ) -> Result<(), CliError> {
        let mesh = if is_gmsh(path) { read_gmsh(path, &case.domain)? } else { read_native(path)? };
        let order = mesh.order;
        let rep = Problem::from_mesh(case, mesh, degree, quad)?.solve(solver, tol)?;
        println!("{}", solve_line(case.name, &format!("order={order} mesh={}", path.display()), degree, &rep));
        Ok(())
    }
    match curvelast::manufactured_case(case)? {
        AnyCase::Disk(c) => go(&c, path, degree, solver, tol, quad),
        AnyCase::Ball(c) => go(&c, path, degree, solver, tol, quad),
    }
}

fn cmd_study(cfg: &StudyConfig) -> Result<(), CliError> {
    let workers = study::worker_count();
    log::info!("study {} with {workers} worker(s); output {}", cfg.case, cfg.output.display());
    let rows = study::run_study(cfg, workers)?;
    study::write_csv(&rows, &cfg.output)?;
    study::write_plot_data(&rows, &cfg.case, &cfg.plot_dir)?;
    print_orders(&rows);
    let failed = rows.iter().filter(|r| r.result.is_err()).count();
    if failed > 0 {
        return Err(CliError::Numeric(format!("{failed} run(s) failed; see the status column of {}", cfg.output.display())));
    }
    Ok(())
}

/// Finest-pair orders per `(r, k)`.
fn print_orders(rows: &[study::Row]) {
    println!("{:>2} {:>2} {:>8} {:>8} {:>8}", "r", "k", "L2", "H1", "L2(G)");
    let mut last: Vec<((usize, usize), Option<[f64; 3]>)> = Vec::new();
    for row in rows {
        match last.last_mut() {
            Some((key, o)) if *key == (row.r, row.k) => {
                if row.orders.is_some() {
                    *o = row.orders;
                }
            }
            _ => last.push(((row.r, row.k), row.orders)),
        }
    }
    for ((r, k), o) in last {
        match o {
            Some([a, b, c]) => println!("{r:>2} {k:>2} {a:>8.2} {b:>8.2} {c:>8.2}"),
            None => println!("{r:>2} {k:>2} {:>8} {:>8} {:>8}", "-", "-", "-"),
        }
    }
}

fn cmd_orders(input: &Path, check: bool) -> Result<(), CliError> {
    let rows = study::read_csv(input)?;
    let mut recomputed = rows.clone();
    study::fill_orders(&mut recomputed)?;
    let mut worst: f64 = 0.0;
    for (a, b) in rows.iter().zip(&recomputed) {
        match (a.orders, b.orders) {
            (Some(x), Some(y)) => {
                for i in 0..3 {
                    worst = worst.max((x[i] - y[i]).abs());
                }
            }
            (None, None) => {}
            _ => worst = f64::INFINITY,
        }
    }
    print_orders(&recomputed);
    println!("max_order_discrepancy={worst:e}");
    if check && worst > 1e-12 {
        return Err(CliError::Numeric(format!("emitted orders differ from recomputed ones by {worst:e}")));
    }
    Ok(())
}
