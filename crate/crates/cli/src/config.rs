use std::path::{Path, PathBuf};

use curvelast::solve::DEFAULT_TOL;
use curvelast::SolverChoice;
use serde::Deserialize;

use crate::CliError;

/// A list given either as a TOML array or as text such as `1,2,3` or `1-6`.
#[derive(Clone, Debug, Deserialize, PartialEq)]
#[serde(untagged)]
pub enum ListSpec {
    List(Vec<usize>),
    Text(String),
}

impl ListSpec {
    pub fn resolve(&self, what: &str) -> Result<Vec<usize>, CliError> {
        match self {
            ListSpec::List(v) => Ok(v.clone()),
            ListSpec::Text(s) => parse_list(s).map_err(|e| CliError::Usage(format!("{what}: {e}"))),
        }
    }
}

/// Parses `a,b,c`, `a-b`, `a..b` or `a..=b` (ranges inclusive); elements may mix.
pub fn parse_list(text: &str) -> Result<Vec<usize>, String> {
    let mut out = Vec::new();
    for part in text.split(',').map(str::trim).filter(|p| !p.is_empty()) {
        let range = part.split_once("..=").or_else(|| part.split_once("..")).or_else(|| part.split_once('-'));
        let num = |s: &str| s.trim().parse::<usize>().map_err(|_| format!("`{s}` is not a non-negative integer"));
        match range {
            Some((a, b)) => {
                let (a, b) = (num(a)?, num(b)?);
                if a > b {
                    return Err(format!("empty range `{part}`"));
                }
                out.extend(a..=b);
            }
            None => out.push(num(part)?),
        }
    }
    if out.is_empty() {
        return Err(format!("empty list `{text}`"));
    }
    Ok(out)
}

/// Key-value study file; every key is optional and command-line flags win.
#[derive(Clone, Debug, Default, Deserialize, PartialEq)]
#[serde(deny_unknown_fields)]
pub struct FileConfig {
    pub case: Option<String>,
    pub orders: Option<ListSpec>,
    pub degrees: Option<ListSpec>,
    pub levels: Option<ListSpec>,
    pub solver: Option<String>,
    pub tol: Option<f64>,
    pub quad_degree: Option<usize>,
    pub output: Option<PathBuf>,
    pub plot_dir: Option<PathBuf>,
}

impl FileConfig {
    pub fn load(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path).map_err(|e| CliError::Io(format!("{}: {e}", path.display())))?;
        toml::from_str(&text).map_err(|e| CliError::Usage(format!("{}: {e}", path.display())))
    }

    /// Fields of `other` that are set replace ours.
    pub fn overridden_by(self, other: FileConfig) -> FileConfig {
        FileConfig {
            case: other.case.or(self.case),
            orders: other.orders.or(self.orders),
            degrees: other.degrees.or(self.degrees),
            levels: other.levels.or(self.levels),
            solver: other.solver.or(self.solver),
            tol: other.tol.or(self.tol),
            quad_degree: other.quad_degree.or(self.quad_degree),
            output: other.output.or(self.output),
            plot_dir: other.plot_dir.or(self.plot_dir),
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct StudyConfig {
    pub case: String,
    pub orders: Vec<usize>,
    pub degrees: Vec<usize>,
    pub levels: Vec<usize>,
    pub solver: SolverChoice,
    pub tol: f64,
    pub quad_degree: Option<usize>,
    pub output: PathBuf,
    pub plot_dir: PathBuf,
}

impl StudyConfig {
    pub fn from_file_config(fc: FileConfig) -> Result<Self, CliError> {
        let case = fc.case.ok_or_else(|| CliError::Usage("missing case".into()))?;
        let orders = fc.orders.unwrap_or(ListSpec::Text("1-3".into())).resolve("orders")?;
        let degrees = fc.degrees.unwrap_or(ListSpec::Text("1-4".into())).resolve("degrees")?;
        let levels = fc.levels.ok_or_else(|| CliError::Usage("missing levels".into()))?.resolve("levels")?;
        let solver = match fc.solver {
            Some(s) => s.parse().map_err(|e: curvelast::Error| CliError::Usage(e.to_string()))?,
            None => SolverChoice::Cg,
        };
        let output = fc.output.unwrap_or_else(|| PathBuf::from("study.csv"));
        let plot_dir = fc.plot_dir.unwrap_or_else(|| suffixed(&output, ".plots"));
        let cfg = StudyConfig { case, orders, degrees, levels, solver, tol: fc.tol.unwrap_or(DEFAULT_TOL), quad_degree: fc.quad_degree, output, plot_dir };
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<(), CliError> {
        curvelast::manufactured_case(&self.case).map_err(|e| CliError::Usage(e.to_string()))?;
        if let Some(r) = self.orders.iter().find(|r| !(1..=3).contains(*r)) {
            return Err(CliError::Usage(format!("geometric order {r} outside 1..=3")));
        }
        if let Some(k) = self.degrees.iter().find(|k| !(1..=4).contains(*k)) {
            return Err(CliError::Usage(format!("finite element degree {k} outside 1..=4")));
        }
        if self.levels.len() < 2 {
            return Err(CliError::Usage("a study needs at least two levels".into()));
        }
        if self.levels.windows(2).any(|w| w[1] <= w[0]) || self.levels[0] == 0 {
            return Err(CliError::Usage("levels must be positive and strictly increasing".into()));
        }
        if !(self.tol > 0.0) {
            return Err(CliError::Usage(format!("tolerance must be positive, got {}", self.tol)));
        }
        Ok(())
    }

    /// Directory receiving one record per finished run.
    pub fn runs_dir(&self) -> PathBuf {
        suffixed(&self.output, ".runs")
    }
}

fn suffixed(path: &Path, suffix: &str) -> PathBuf {
    let mut s = path.as_os_str().to_owned();
    s.push(suffix);
    PathBuf::from(s)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn lists() {
        assert_eq!(parse_list("1-3").unwrap(), vec![1, 2, 3]);
        assert_eq!(parse_list("1..=2, 5").unwrap(), vec![1, 2, 5]);
        assert_eq!(parse_list("4").unwrap(), vec![4]);
        assert!(parse_list("").is_err());
        assert!(parse_list("3-2").is_err());
        assert!(parse_list("a").is_err());
    }

    #[test]
    fn flags_win_over_file() {
        let file: FileConfig = toml::from_str("case = \"disk2d\"\nlevels = [1, 2, 3]\norders = \"1-2\"\ntol = 1e-10\n").unwrap();
        let flags = FileConfig { levels: Some(ListSpec::Text("2-4".into())), ..Default::default() };
        let cfg = StudyConfig::from_file_config(file.overridden_by(flags)).unwrap();
        assert_eq!(cfg.levels, vec![2, 3, 4]);
        assert_eq!(cfg.orders, vec![1, 2]);
        assert_eq!(cfg.degrees, vec![1, 2, 3, 4]);
        assert_eq!(cfg.tol, 1e-10);
        assert_eq!(cfg.plot_dir, PathBuf::from("study.csv.plots"));
    }

    #[test]
    fn rejects_bad_studies() {
        let base = || FileConfig { case: Some("disk2d".into()), levels: Some(ListSpec::List(vec![1, 2])), ..Default::default() };
        assert!(StudyConfig::from_file_config(base()).is_ok());
        let bad = [
            FileConfig { levels: Some(ListSpec::List(vec![3])), ..base() },
            FileConfig { levels: Some(ListSpec::Text("4-2".into())), ..base() },
            FileConfig { orders: Some(ListSpec::List(vec![4])), ..base() },
            FileConfig { degrees: Some(ListSpec::List(vec![0])), ..base() },
            FileConfig { case: Some("torus".into()), ..base() },
            FileConfig { solver: Some("mumps".into()), ..base() },
        ];
        for fc in bad {
            assert!(matches!(StudyConfig::from_file_config(fc), Err(CliError::Usage(_))));
        }
        assert!(toml::from_str::<FileConfig>("colour = 1").is_err());
    }
}
