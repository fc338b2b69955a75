use std::path::Path;

use ncfa_core::models::parse_real;
use ncfa_core::{ModelSpec, PlanarModel, RegionPoint};
use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Config(String),
    #[error(transparent)]
    Core(#[from] ncfa_core::Error),
    #[error("i/o error on {path}: {source}")]
    Io { path: String, source: std::io::Error },
    #[error("output error: {0}")]
    Output(String),
}

impl CliError {
    pub fn config(msg: impl Into<String>) -> Self {
        CliError::Config(msg.into())
    }
}

pub type CliResult<T> = Result<T, CliError>;

fn read_file(path: &Path) -> CliResult<String> {
    std::fs::read_to_string(path).map_err(|source| CliError::Io { path: path.display().to_string(), source })
}

/// Inline spec (`cyclic:6`) or a `.toml` / `.json` model document.
pub fn load_model_spec(text: &str) -> CliResult<ModelSpec> {
    let path = Path::new(text);
    let ext = path.extension().and_then(|e| e.to_str()).unwrap_or("");
    if matches!(ext, "toml" | "json") || path.is_file() {
        let body = read_file(path)?;
        let spec = if ext == "json" {
            serde_json::from_str(&body).map_err(|e| CliError::config(format!("{}: {e}", path.display())))?
        } else {
            toml::from_str(&body).map_err(|e| CliError::config(format!("{}: {e}", path.display())))?
        };
        return Ok(resolve_relative(spec, path));
    }
    Ok(ModelSpec::parse_inline(text)?)
}

fn resolve_relative(spec: ModelSpec, doc_path: &Path) -> ModelSpec {
    match spec {
        ModelSpec::Nonabelian { irrep_table_path } if irrep_table_path.is_relative() => {
            let base = doc_path.parent().unwrap_or(Path::new("."));
            ModelSpec::Nonabelian { irrep_table_path: base.join(irrep_table_path) }
        }
        other => other,
    }
}

pub fn load_model(text: &str) -> CliResult<PlanarModel> {
    Ok(load_model_spec(text)?.build()?)
}

pub fn real(field: &str, text: &str) -> CliResult<f64> {
    parse_real(text).filter(|v| !v.is_nan()).ok_or_else(|| CliError::config(format!("{field}: cannot parse '{text}' as a number")))
}

/// `start:stop:step`, inclusive of `stop` when it lies on the lattice within 1e-12.
pub fn parse_range(field: &str, text: &str) -> CliResult<Vec<f64>> {
    let parts: Vec<&str> = text.split(':').collect();
    if parts.len() != 3 {
        return Err(CliError::config(format!("{field}: expected start:stop:step, got '{text}'")));
    }
    let start = real(field, parts[0])?;
    let stop = real(field, parts[1])?;
    let step = real(field, parts[2])?;
    if !(start.is_finite() && stop.is_finite() && step.is_finite()) {
        return Err(CliError::config(format!("{field}: bounds and step must be finite in '{text}'")));
    }
    if step <= 0.0 {
        return Err(CliError::config(format!("{field}: step must be positive in '{text}'")));
    }
    if stop < start {
        return Err(CliError::config(format!("{field}: stop is below start in '{text}'")));
    }
    let span = (stop - start) / step;
    let nearest = span.round();
    let count = if (span - nearest).abs() <= 1e-12 * nearest.max(1.0) { nearest } else { span.floor() } as usize + 1;
    Ok((0..count).map(|i| if i + 1 == count && (span - nearest).abs() <= 1e-12 * nearest.max(1.0) { stop } else { start + i as f64 * step }).collect())
}

/// `conjugate:p0:p1:step` gives `(p, p/(p−1))` for `p` on the range.
pub fn parse_pq_grid(text: &str) -> CliResult<Vec<RegionPoint>> {
    let Some(rest) = text.strip_prefix("conjugate:") else {
        return Err(CliError::config(format!("--grid-pq: expected conjugate:p0:p1:step, got '{text}'")));
    };
    let ps = parse_range("--grid-pq", rest)?;
    if ps.iter().any(|&p| p < 1.0) {
        return Err(CliError::config("--grid-pq: conjugate pairs need p >= 1"));
    }
    Ok(ps
        .into_iter()
        .map(|p| {
            let inv_p = 1.0 / p;
            RegionPoint::new(inv_p, 1.0 - inv_p)
        })
        .collect())
}

/// Grid options shared by the grid-driven commands. Axes are in `1/p`, `1/q`.
#[derive(Debug, Clone, Default, clap::Args)]
pub struct GridArgs {
    /// Square grid `start:stop:step` applied to both 1/p and 1/q.
    #[arg(long)]
    pub grid: Option<String>,
    /// Range for the 1/p axis.
    #[arg(long)]
    pub grid_p: Option<String>,
    /// Range for the 1/q axis.
    #[arg(long)]
    pub grid_q: Option<String>,
    /// Conjugate exponent pairs, `conjugate:p0:p1:step`.
    #[arg(long)]
    pub grid_pq: Option<String>,
}

impl GridArgs {
    pub fn points(&self, default: &str) -> CliResult<Vec<RegionPoint>> {
        if let Some(pq) = &self.grid_pq {
            if self.grid.is_some() || self.grid_p.is_some() || self.grid_q.is_some() {
                return Err(CliError::config("--grid-pq cannot be combined with other grid options"));
            }
            return parse_pq_grid(pq);
        }
        let square = self.grid.as_deref().unwrap_or(default);
        let xs = parse_range("--grid-p", self.grid_p.as_deref().unwrap_or(square))?;
        let ys = parse_range("--grid-q", self.grid_q.as_deref().unwrap_or(square))?;
        if self.grid.is_some() && (self.grid_p.is_some() && self.grid_q.is_some()) {
            return Err(CliError::config("--grid is redundant when both --grid-p and --grid-q are given"));
        }
        Ok(xs.iter().flat_map(|&a| ys.iter().map(move |&b| RegionPoint::new(a, b))).collect())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn range_inclusive() {
        assert_eq!(parse_range("g", "0:1.25:0.25").unwrap(), vec![0.0, 0.25, 0.5, 0.75, 1.0, 1.25]);
        assert_eq!(parse_range("g", "0:1:0.3").unwrap().len(), 4);
        let tenth = parse_range("g", "1.0:2.0:0.1").unwrap();
        assert_eq!(tenth.len(), 11);
        assert_eq!(*tenth.last().unwrap(), 2.0);
        assert_eq!(parse_range("g", "0.5:0.5:1").unwrap(), vec![0.5]);
    }

    #[test]
    fn range_rejects_malformed() {
        for bad in ["1:0:0.5", "0:1:0", "0:1:-1", "0:1", "a:1:0.5", "0:inf:1"] {
            assert!(parse_range("g", bad).is_err(), "{bad}");
        }
    }

    #[test]
    fn conjugate_pairs() {
        let pts = parse_pq_grid("conjugate:1:2:0.5").unwrap();
        assert_eq!(pts.len(), 3);
        assert_eq!(pts[0].inv_q, 0.0);
        assert!((pts[1].q() - 3.0).abs() < 1e-12);
        assert!((pts[2].inv_p - 0.5).abs() < 1e-15 && (pts[2].inv_q - 0.5).abs() < 1e-15);
        assert!(parse_pq_grid("1:2:0.5").is_err());
    }

    #[test]
    fn model_specs() {
        assert!(load_model("cyclic:0").is_err());
        assert_eq!(load_model("cyclic:4").unwrap().a_plus().dimension(), 4);
        assert!(load_model("tl:1.2").is_err());
        assert!(load_model("bogus").is_err());
    }
}
