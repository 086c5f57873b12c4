use std::fs;
use std::path::Path;
use std::sync::atomic::{AtomicUsize, Ordering};
use std::sync::Mutex;

use curvelast::errors::pair_orders;
use curvelast::study::{run_case, RunConfig};
use curvelast::ErrorReport;

use crate::config::StudyConfig;
use crate::CliError;

pub const CSV_HEADER: [&str; 12] = [
    "r",
    "k",
    "level",
    "h",
    "dofs",
    "e_L2_volume",
    "e_H1_semi",
    "e_L2_surface",
    "order_L2",
    "order_H1",
    "order_L2_surface",
    "status",
];

/// Worker cap for concurrent runs.
pub const WORKERS_ENV: &str = "CURVELAST_WORKERS";

pub fn fmt_real(x: f64) -> String {
    format!("{x:.16e}")
}

/// One CSV row.
#[derive(Clone, Debug, PartialEq)]
pub struct Row {
    pub r: usize,
    pub k: usize,
    pub level: usize,
    pub result: Result<ErrorReport, String>,
    /// `(L², H¹, L²(Γ))` order against the previous successful level.
    pub orders: Option<[f64; 3]>,
}

pub fn worker_count() -> usize {
    let available = std::thread::available_parallelism().map_or(1, |n| n.get());
    match std::env::var(WORKERS_ENV).ok().and_then(|v| v.parse::<usize>().ok()) {
        Some(n) if n > 0 => n.min(available),
        _ => available,
    }
}

fn write_atomic(path: &Path, contents: &str) -> Result<(), CliError> {
    let tmp = path.with_extension("tmp");
    fs::write(&tmp, contents).and_then(|_| fs::rename(&tmp, path)).map_err(|e| CliError::Io(format!("{}: {e}", path.display())))
}

fn run_record(cfg: &RunConfig, result: &Result<ErrorReport, String>) -> String {
    let head = format!("case={} r={} k={} level={}", cfg.case, cfg.order, cfg.degree, cfg.level);
    match result {
        Ok(rep) => format!(
            "{head} status=ok h={} dofs={} e_l2_volume={} e_h1_semi={} e_l2_surface={}\n",
            fmt_real(rep.h),
            rep.dofs,
            fmt_real(rep.e_l2_volume),
            fmt_real(rep.e_h1_semi),
            fmt_real(rep.e_l2_surface)
        ),
        Err(msg) => format!("{head} status=failed error={msg:?}\n"),
    }
}

/// Runs every `(r, k, level)` of the study with up to `workers` threads and
/// returns the rows in configuration order. Each finished run is recorded in
/// the runs directory immediately.
pub fn run_study(cfg: &StudyConfig, workers: usize) -> Result<Vec<Row>, CliError> {
    let runs_dir = cfg.runs_dir();
    fs::create_dir_all(&runs_dir).map_err(|e| CliError::Io(format!("{}: {e}", runs_dir.display())))?;
    let mut jobs = Vec::new();
    for &r in &cfg.orders {
        for &k in &cfg.degrees {
            for &level in &cfg.levels {
                let mut run = RunConfig::new(&cfg.case, r, k, level);
                run.solver = cfg.solver;
                run.tol = cfg.tol;
                run.quad_degree = cfg.quad_degree;
                jobs.push(run);
            }
        }
    }
    let results: Mutex<Vec<Option<Result<ErrorReport, String>>>> = Mutex::new(vec![None; jobs.len()]);
    let next = AtomicUsize::new(0);
    let io_error: Mutex<Option<CliError>> = Mutex::new(None);
    std::thread::scope(|s| {
        for _ in 0..workers.clamp(1, jobs.len().max(1)) {
            s.spawn(|| loop {
                let i = next.fetch_add(1, Ordering::SeqCst);
                let Some(job) = jobs.get(i) else { break };
                log::info!("run r={} k={} level={}", job.order, job.degree, job.level);
                let result = run_case(job).map(|o| o.report).map_err(|e| e.to_string());
                match &result {
                    Ok(rep) => log::info!(
                        "done r={} k={} level={}: dofs={} e_L2={:.3e} e_H1={:.3e} e_L2(G)={:.3e}",
                        job.order,
                        job.degree,
                        job.level,
                        rep.dofs,
                        rep.e_l2_volume,
                        rep.e_h1_semi,
                        rep.e_l2_surface
                    ),
                    Err(e) => log::warn!("failed r={} k={} level={}: {e}", job.order, job.degree, job.level),
                }
                let path = runs_dir.join(format!("r{}_k{}_n{}.txt", job.order, job.degree, job.level));
                if let Err(e) = write_atomic(&path, &run_record(job, &result)) {
                    io_error.lock().unwrap().get_or_insert(e);
                }
                results.lock().unwrap()[i] = Some(result);
            });
        }
    });
    if let Some(e) = io_error.into_inner().unwrap() {
        return Err(e);
    }
    let results = results.into_inner().unwrap();
    let mut rows: Vec<Row> = jobs
        .iter()
        .zip(results)
        .map(|(job, res)| Row { r: job.order, k: job.degree, level: job.level, result: res.expect("every job ran"), orders: None })
        .collect();
    fill_orders(&mut rows)?;
    Ok(rows)
}

/// Orders of each successful row against the previous successful row of the
/// same `(r, k)` series.
pub fn fill_orders(rows: &mut [Row]) -> Result<(), CliError> {
    let mut prev: Option<(usize, usize, ErrorReport)> = None;
    for row in rows.iter_mut() {
        row.orders = None;
        let Ok(rep) = &row.result else { continue };
        if let Some((r, k, p)) = &prev {
            if (*r, *k) == (row.r, row.k) {
                let o = |a: f64, b: f64| pair_orders(&[p.h, rep.h], &[a, b]).map(|v| v[0]);
                let orders = [
                    o(p.e_l2_volume, rep.e_l2_volume),
                    o(p.e_h1_semi, rep.e_h1_semi),
                    o(p.e_l2_surface, rep.e_l2_surface),
                ];
                let mut out = [0.0; 3];
                for (slot, v) in out.iter_mut().zip(orders) {
                    *slot = v.map_err(|e| CliError::Numeric(e.to_string()))?;
                }
                row.orders = Some(out);
            }
        }
        prev = Some((row.r, row.k, *rep));
    }
    Ok(())
}

pub fn write_csv(rows: &[Row], path: &Path) -> Result<(), CliError> {
    let io = |e: csv::Error| CliError::Io(format!("{}: {e}", path.display()));
    let mut w = csv::Writer::from_path(path).map_err(io)?;
    w.write_record(CSV_HEADER).map_err(io)?;
    for row in rows {
        let mut rec = vec![row.r.to_string(), row.k.to_string(), row.level.to_string()];
        match &row.result {
            Ok(rep) => {
                rec.extend([fmt_real(rep.h), rep.dofs.to_string()]);
                rec.extend([rep.e_l2_volume, rep.e_h1_semi, rep.e_l2_surface].map(fmt_real));
            }
            Err(_) => rec.extend(std::iter::repeat_n(String::new(), 5)),
        }
        match row.orders {
            Some(o) => rec.extend(o.map(fmt_real)),
            None => rec.extend(std::iter::repeat_n(String::new(), 3)),
        }
        rec.push(match &row.result {
            Ok(_) => "ok".to_string(),
            Err(e) => format!("failed: {e}"),
        });
        w.write_record(&rec).map_err(io)?;
    }
    w.flush().map_err(|e| CliError::Io(format!("{}: {e}", path.display())))
}

/// Rows of a study CSV, with the emitted order columns.
pub fn read_csv(path: &Path) -> Result<Vec<Row>, CliError> {
    let mut rd = csv::Reader::from_path(path).map_err(|e| CliError::Io(format!("{}: {e}", path.display())))?;
    let headers = rd.headers().map_err(|e| CliError::Io(e.to_string()))?.clone();
    if headers.iter().collect::<Vec<_>>() != CSV_HEADER {
        return Err(CliError::Io(format!("{}: unexpected header {:?}", path.display(), headers)));
    }
    let mut rows = Vec::new();
    for (line, rec) in rd.records().enumerate() {
        let rec = rec.map_err(|e| CliError::Io(format!("{}: {e}", path.display())))?;
        let bad = |field: &str| CliError::Io(format!("{}: row {}: bad {field}", path.display(), line + 2));
        let int = |i: usize| rec[i].parse::<usize>().map_err(|_| bad(CSV_HEADER[i]));
        let real = |i: usize| rec[i].parse::<f64>().map_err(|_| bad(CSV_HEADER[i]));
        let result = if &rec[11] == "ok" {
            Ok(ErrorReport { h: real(3)?, dofs: int(4)?, e_l2_volume: real(5)?, e_h1_semi: real(6)?, e_l2_surface: real(7)?, stats: None })
        } else {
            Err(rec[11].trim_start_matches("failed: ").to_string())
        };
        let orders = if rec[8].is_empty() { None } else { Some([real(8)?, real(9)?, real(10)?]) };
        rows.push(Row { r: int(0)?, k: int(1)?, level: int(2)?, result, orders });
    }
    Ok(rows)
}

/// One `log h  log e` file per `(r, k, norm)`.
pub fn write_plot_data(rows: &[Row], case: &str, dir: &Path) -> Result<(), CliError> {
    fs::create_dir_all(dir).map_err(|e| CliError::Io(format!("{}: {e}", dir.display())))?;
    let mut series: Vec<((usize, usize), Vec<&ErrorReport>)> = Vec::new();
    for row in rows {
        let Ok(rep) = &row.result else { continue };
        match series.last_mut() {
            Some((key, reps)) if *key == (row.r, row.k) => reps.push(rep),
            _ => series.push(((row.r, row.k), vec![rep])),
        }
    }
    let norms: [(&str, fn(&ErrorReport) -> f64); 3] =
        [("l2", |r| r.e_l2_volume), ("h1", |r| r.e_h1_semi), ("l2surface", |r| r.e_l2_surface)];
    for ((r, k), reps) in &series {
        for (name, f) in norms {
            let mut text = String::from("# log(h) log(e)\n");
            for rep in reps {
                text.push_str(&format!("{} {}\n", fmt_real(rep.h.ln()), fmt_real(f(rep).ln())));
            }
            write_atomic(&dir.join(format!("{case}_r{r}_k{k}_{name}.dat")), &text)?;
        }
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn rep(h: f64, e: f64) -> ErrorReport {
        ErrorReport { h, e_l2_volume: e, e_h1_semi: e.sqrt(), e_l2_surface: 2.0 * e, dofs: 10, stats: None }
    }

    #[test]
    fn orders_skip_failures_and_series_breaks() {
        let mut rows = vec![
            Row { r: 1, k: 1, level: 1, result: Ok(rep(1.0, 1.0)), orders: None },
            Row { r: 1, k: 1, level: 2, result: Err("boom".into()), orders: None },
            Row { r: 1, k: 1, level: 3, result: Ok(rep(0.25, 1.0 / 16.0)), orders: None },
            Row { r: 1, k: 2, level: 1, result: Ok(rep(1.0, 1.0)), orders: None },
        ];
        fill_orders(&mut rows).unwrap();
        assert_eq!(rows[0].orders, None);
        assert_eq!(rows[1].orders, None);
        assert_eq!(rows[2].orders, Some([2.0, 1.0, 2.0]));
        assert_eq!(rows[3].orders, None);
    }

    #[test]
    fn csv_round_trip() {
        let mut rows = vec![
            Row { r: 2, k: 3, level: 1, result: Ok(rep(0.3, 1e-3)), orders: None },
            Row { r: 2, k: 3, level: 2, result: Ok(rep(0.15, 7e-5)), orders: None },
            Row { r: 2, k: 3, level: 3, result: Err("no convergence, sadly".into()), orders: None },
        ];
        fill_orders(&mut rows).unwrap();
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("s.csv");
        write_csv(&rows, &path).unwrap();
        let back = read_csv(&path).unwrap();
        assert_eq!(back, rows);
        write_plot_data(&rows, "disk2d", &dir.path().join("plots")).unwrap();
        let plot = fs::read_to_string(dir.path().join("plots/disk2d_r2_k3_l2.dat")).unwrap();
        assert_eq!(plot.lines().count(), 3);
    }
}
