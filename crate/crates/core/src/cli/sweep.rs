use rayon::prelude::*;
use serde::Serialize;
use serde_json::{json, Value};

use super::config::{RunConfig, KEYS};
use super::{run_document, EXIT_OK, EXIT_TOLERANCE};
use crate::error::{param, Result};

/// Largest accepted number of grid points.
pub const MAX_GRID: usize = 10_000;

/// One ranged parameter: `name=v1,v2,...`, `name=a..b` or `name=a..=b`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Axis {
    pub name: String,
    pub values: Vec<String>,
}

impl Axis {
    pub fn parse(text: &str) -> Result<Self> {
        let Some((name, spec)) = text.split_once('=') else {
            return param(format!("axis must look like name=values, got {text:?}"));
        };
        let name = name.trim().replace('-', "_");
        let spec = spec.trim();
        let values = if let Some((a, b)) = spec.split_once("..") {
            let (b, inclusive) = match b.strip_prefix('=') {
                Some(rest) => (rest, true),
                None => (b, false),
            };
            let bound = |s: &str| {
                s.trim()
                    .parse::<i64>()
                    .map_err(|_| crate::Error::Parameter(format!("integer range expected in {text:?}")))
            };
            let (lo, hi) = (bound(a)?, bound(b)?);
            let hi = if inclusive { hi + 1 } else { hi };
            if hi.saturating_sub(lo) > MAX_GRID as i64 {
                return param(format!("axis {name} has more than {MAX_GRID} values"));
            }
            (lo..hi).map(|v| v.to_string()).collect()
        } else if spec.is_empty() {
            Vec::new()
        } else {
            spec.split(',').map(|v| v.trim().to_string()).collect()
        };
        if !KEYS.contains(&name.as_str()) {
            return param(format!("unknown axis {name:?}"));
        }
        if matches!(name.as_str(), "format" | "output") {
            return param(format!("{name} cannot be swept"));
        }
        Ok(Self { name, values })
    }
}

/// Worker count from `PROLATE_WORKERS`, else the number of physical cores.
pub fn worker_count() -> usize {
    std::env::var("PROLATE_WORKERS")
        .ok()
        .and_then(|v| v.trim().parse().ok())
        .filter(|&n: &usize| n > 0)
        .unwrap_or_else(num_cpus::get_physical)
}

/// Axis coordinates of one grid point and its configuration.
pub type GridPoint = (Vec<(String, String)>, RunConfig);

/// Grid points in lexicographic order of the axes, the first axis slowest.
pub fn grid(base: &RunConfig, axes: &[Axis]) -> Result<Vec<GridPoint>> {
    if axes.len() > 2 {
        return param(format!("at most two axes may be swept, got {}", axes.len()));
    }
    let size = axes.iter().map(|a| a.values.len()).product::<usize>();
    if size > MAX_GRID {
        return param(format!("grid has {size} points, more than {MAX_GRID}"));
    }
    let mut points = vec![(Vec::new(), base.clone())];
    for axis in axes {
        let mut next = Vec::with_capacity(points.len() * axis.values.len());
        for (coords, cfg) in &points {
            for v in &axis.values {
                let mut cfg = cfg.clone();
                cfg.set(&axis.name, v)?;
                let mut coords = coords.clone();
                coords.push((axis.name.clone(), v.clone()));
                next.push((coords, cfg));
            }
        }
        points = next;
    }
    for (coords, cfg) in &points {
        cfg.validate().map_err(|e| {
            crate::Error::Parameter(format!("grid point {coords:?}: {e}"))
        })?;
    }
    Ok(points)
}

/// Runs every grid point on a worker pool and assembles the records in
/// grid order. Returns the document and its exit code.
pub fn run_sweep(base: &RunConfig, axes: &[Axis]) -> Result<(Value, i32)> {
    if matches!(base.command.as_str(), "sweep" | "") {
        return param("sweep needs --over <command>");
    }
    let points = grid(base, axes)?;
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(worker_count())
        .build()
        .map_err(|e| crate::Error::Parameter(format!("cannot start worker pool: {e}")))?;
    let runs: Vec<(Value, i32)> = pool.install(|| {
        points
            .par_iter()
            .map(|(coords, cfg)| {
                let point: serde_json::Map<String, Value> = coords
                    .iter()
                    .map(|(k, v)| (k.clone(), Value::String(v.clone())))
                    .collect();
                let (mut doc, code) = run_document(cfg);
                doc["point"] = Value::Object(point);
                (doc, code)
            })
            .collect()
    });
    let code = runs
        .iter()
        .map(|(_, c)| *c)
        .find(|&c| c != EXIT_OK && c != EXIT_TOLERANCE)
        .or_else(|| runs.iter().map(|(_, c)| *c).find(|&c| c == EXIT_TOLERANCE))
        .unwrap_or(EXIT_OK);
    let status = match code {
        EXIT_OK => "ok",
        EXIT_TOLERANCE => "tolerance_failure",
        _ => "error",
    };
    let doc = json!({
        "schema_version": super::SCHEMA_VERSION,
        "command": "sweep",
        "config": base,
        "axes": axes,
        "status": status,
        "records": runs.into_iter().map(|(d, _)| d).collect::<Vec<_>>(),
    });
    Ok((doc, code))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn axis_forms() {
        assert_eq!(Axis::parse("c=0.5,1").unwrap().values, ["0.5", "1"]);
        assert_eq!(Axis::parse("ell=0..3").unwrap().values, ["0", "1", "2"]);
        assert_eq!(Axis::parse("ell=0..=2").unwrap().values, ["0", "1", "2"]);
        assert!(Axis::parse("ell=3..3").unwrap().values.is_empty());
        assert!(Axis::parse("colour=1,2").is_err());
        assert!(Axis::parse("c").is_err());
        assert!(Axis::parse("format=json").is_err());
    }

    #[test]
    fn grid_order_and_limits() {
        let base = RunConfig::defaults("spectrum");
        let axes = [Axis::parse("c=1,2").unwrap(), Axis::parse("ell=0..3").unwrap()];
        let g = grid(&base, &axes).unwrap();
        assert_eq!(g.len(), 6);
        assert_eq!((g[1].1.c, g[1].1.ell), (1.0, 1));
        assert_eq!((g[3].1.c, g[3].1.ell), (2.0, 0));
        let big = [Axis::parse("ell=0..200").unwrap(), Axis::parse("seed=0..100").unwrap()];
        assert!(grid(&base, &big).is_err());
        let three = [axes[0].clone(), axes[1].clone(), axes[0].clone()];
        assert!(grid(&base, &three).is_err());
        let bad = [Axis::parse("d=6..9").unwrap()];
        assert!(grid(&base, &bad).is_err());
    }
}
