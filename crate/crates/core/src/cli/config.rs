use std::fmt;
use std::path::Path;
use std::str::FromStr;

use clap::Args;
use serde::Serialize;

use crate::error::{param, Error, Result};

pub const MAX_D: usize = 7;
pub const MAX_ELL: usize = 50;
pub const MAX_BASIS: usize = 2000;
pub const MAX_QUAD: usize = 4000;
pub const MAX_MODULAR_DIM: usize = 32;
pub const MAX_INSTANCES: usize = 1000;
pub const MAX_VECTORS: usize = 100_000;

/// Keys accepted by [`RunConfig::set`].
pub const KEYS: &[&str] = &[
    "d", "ell", "c", "basis", "n_basis", "quad", "n_quad", "k", "lambda", "lambda_prime", "seed",
    "fn", "function", "momentum", "n", "instances", "vectors", "model", "format", "output",
];

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Json,
    Csv,
}

impl FromStr for Format {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "json" => Ok(Self::Json),
            "csv" => Ok(Self::Csv),
            _ => param(format!("format must be json or csv, got {s:?}")),
        }
    }
}

impl fmt::Display for Format {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Self::Json => "json",
            Self::Csv => "csv",
        })
    }
}

/// Flags shared by every subcommand. Unset flags fall back to the config
/// file, then to the defaults of [`RunConfig`].
#[derive(Debug, Clone, Default, Args)]
pub struct Flags {
    /// Spatial dimension.
    #[arg(long)]
    pub d: Option<usize>,
    /// Angular degree (parity for d = 1).
    #[arg(long)]
    pub ell: Option<usize>,
    /// Bandwidth.
    #[arg(long)]
    pub c: Option<f64>,
    /// Basis size N.
    #[arg(long)]
    pub basis: Option<usize>,
    /// Quadrature points of the Nyström discretization.
    #[arg(long)]
    pub quad: Option<usize>,
    /// Number of eigenpairs to report.
    #[arg(long)]
    pub k: Option<usize>,
    /// Space radius.
    #[arg(long)]
    pub lambda: Option<f64>,
    /// Band radius.
    #[arg(long)]
    pub lambda_prime: Option<f64>,
    #[arg(long)]
    pub seed: Option<u64>,
    /// Field function, e.g. `chi_B`, `gaussian:0.5`, `sector:1:0.3,1`.
    #[arg(long = "fn")]
    pub function: Option<String>,
    /// Momentum function of the wave command, same syntax as `--fn`.
    #[arg(long)]
    pub momentum: Option<String>,
    /// Complex dimension of the modular suites.
    #[arg(long)]
    pub n: Option<usize>,
    /// Number of seeded instances in the modular suites.
    #[arg(long)]
    pub instances: Option<usize>,
    /// Random vectors per instance for the entropy checks.
    #[arg(long)]
    pub vectors: Option<usize>,
    /// Duality model: `random` or `wave`.
    #[arg(long)]
    pub model: Option<String>,
    #[arg(long)]
    pub format: Option<String>,
    /// Output file; standard output when absent.
    #[arg(long)]
    pub output: Option<String>,
    /// File of `key=value` lines.
    #[arg(long)]
    pub config: Option<String>,
}

/// Fully resolved parameters of one run, echoed in every report.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RunConfig {
    pub command: String,
    pub d: usize,
    pub ell: usize,
    pub c: f64,
    pub basis: usize,
    pub quad: usize,
    pub k: usize,
    pub lambda: f64,
    pub lambda_prime: f64,
    pub seed: u64,
    #[serde(rename = "fn")]
    pub function: String,
    pub momentum: String,
    pub n: usize,
    pub instances: usize,
    pub vectors: usize,
    pub model: String,
    pub format: Format,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub output: Option<String>,
}

impl RunConfig {
    pub fn defaults(command: &str) -> Self {
        Self {
            command: command.to_string(),
            d: 1,
            ell: 0,
            c: 1.0,
            basis: 48,
            quad: 200,
            k: 10,
            lambda: 1.0,
            lambda_prime: 1.0,
            seed: 1,
            function: "chi_B".into(),
            momentum: "zero".into(),
            n: 4,
            instances: 20,
            vectors: 1000,
            model: "random".into(),
            format: Format::Json,
            output: None,
        }
    }

    /// Defaults, then the config file, then the flags.
    pub fn resolve(command: &str, flags: &Flags) -> Result<Self> {
        let mut cfg = Self::defaults(command);
        if let Some(path) = &flags.config {
            for (key, value) in read_config_file(Path::new(path))? {
                cfg.set(&key, &value)?;
            }
        }
        cfg.apply_flags(flags)?;
        cfg.validate()?;
        Ok(cfg)
    }

    fn apply_flags(&mut self, f: &Flags) -> Result<()> {
        macro_rules! take {
            ($($field:ident => $target:ident),*) => {
                $(if let Some(v) = &f.$field { self.$target = v.clone(); })*
            };
        }
        take!(d => d, ell => ell, c => c, basis => basis, quad => quad, k => k,
              lambda => lambda, lambda_prime => lambda_prime, seed => seed,
              function => function, momentum => momentum, n => n,
              instances => instances, vectors => vectors, model => model);
        if let Some(fmt) = &f.format {
            self.format = fmt.parse()?;
        }
        if let Some(o) = &f.output {
            self.output = Some(o.clone());
        }
        Ok(())
    }

    /// Sets one parameter from its textual form (config files, sweep axes).
    pub fn set(&mut self, key: &str, value: &str) -> Result<()> {
        fn num<T: FromStr>(key: &str, v: &str) -> Result<T> {
            v.trim()
                .parse()
                .map_err(|_| Error::Parameter(format!("cannot parse {key}={v:?}")))
        }
        let v = value.trim();
        match key.trim().replace('-', "_").as_str() {
            "d" => self.d = num("d", v)?,
            "ell" => self.ell = num("ell", v)?,
            "c" => self.c = num("c", v)?,
            "basis" | "n_basis" => self.basis = num("basis", v)?,
            "quad" | "n_quad" => self.quad = num("quad", v)?,
            "k" => self.k = num("k", v)?,
            "lambda" => self.lambda = num("lambda", v)?,
            "lambda_prime" => self.lambda_prime = num("lambda_prime", v)?,
            "seed" => self.seed = num("seed", v)?,
            "fn" | "function" => self.function = v.to_string(),
            "momentum" => self.momentum = v.to_string(),
            "n" => self.n = num("n", v)?,
            "instances" => self.instances = num("instances", v)?,
            "vectors" => self.vectors = num("vectors", v)?,
            "model" => self.model = v.to_string(),
            "format" => self.format = v.parse()?,
            "output" => self.output = Some(v.to_string()),
            other => return param(format!("unknown configuration key {other:?}")),
        }
        Ok(())
    }

    pub fn validate(&self) -> Result<()> {
        let checks: [(bool, String); 10] = [
            ((1..=MAX_D).contains(&self.d), format!("d must be in 1..={MAX_D}, got {}", self.d)),
            (self.ell <= MAX_ELL, format!("ell must be <= {MAX_ELL}, got {}", self.ell)),
            (self.c.is_finite() && self.c > 0.0, format!("c must be finite and > 0, got {}", self.c)),
            ((4..=MAX_BASIS).contains(&self.basis), format!("basis must be in 4..={MAX_BASIS}, got {}", self.basis)),
            ((8..=MAX_QUAD).contains(&self.quad), format!("quad must be in 8..={MAX_QUAD}, got {}", self.quad)),
            (self.k >= 1 && self.k <= self.basis, format!("k must be in 1..=basis, got {}", self.k)),
            (
                self.lambda.is_finite() && self.lambda > 0.0 && self.lambda_prime.is_finite() && self.lambda_prime > 0.0,
                format!("radii must be finite and > 0, got {} and {}", self.lambda, self.lambda_prime),
            ),
            ((1..=MAX_MODULAR_DIM).contains(&self.n), format!("n must be in 1..={MAX_MODULAR_DIM}, got {}", self.n)),
            ((1..=MAX_INSTANCES).contains(&self.instances), format!("instances must be in 1..={MAX_INSTANCES}, got {}", self.instances)),
            ((1..=MAX_VECTORS).contains(&self.vectors), format!("vectors must be in 1..={MAX_VECTORS}, got {}", self.vectors)),
        ];
        for (ok, msg) in checks {
            if !ok {
                return param(msg);
            }
        }
        if self.model != "random" && self.model != "wave" {
            return param(format!("model must be random or wave, got {:?}", self.model));
        }
        Ok(())
    }
}

/// `key=value` lines; blank lines and `#` comments are skipped.
pub fn read_config_file(path: &Path) -> Result<Vec<(String, String)>> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| Error::Parameter(format!("cannot read config file {}: {e}", path.display())))?;
    parse_config(&text)
}

pub fn parse_config(text: &str) -> Result<Vec<(String, String)>> {
    let mut out = Vec::new();
    for (i, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let Some((k, v)) = line.split_once('=') else {
            return param(format!("config line {}: expected key=value, got {raw:?}", i + 1));
        };
        out.push((k.trim().to_string(), v.trim().to_string()));
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn precedence() {
        let dir = std::env::temp_dir().join(format!("prolate-cfg-{}", std::process::id()));
        std::fs::write(&dir, "# comment\nc = 2.5\nbasis=32\nformat=csv\n").unwrap();
        let flags = Flags {
            basis: Some(64),
            config: Some(dir.to_string_lossy().into_owned()),
            ..Flags::default()
        };
        let cfg = RunConfig::resolve("pswf", &flags).unwrap();
        std::fs::remove_file(&dir).unwrap();
        assert_eq!(cfg.c, 2.5);
        assert_eq!(cfg.basis, 64);
        assert_eq!(cfg.format, Format::Csv);
        assert_eq!(cfg.quad, 200);
    }

    #[test]
    fn rejects_out_of_range() {
        let flags = Flags { d: Some(8), ..Flags::default() };
        assert!(RunConfig::resolve("spectrum", &flags).is_err());
        let flags = Flags { quad: Some(5000), ..Flags::default() };
        assert!(RunConfig::resolve("commutator", &flags).is_err());
        assert!(parse_config("no equals sign").is_err());
        assert!(RunConfig::defaults("x").set("colour", "red").is_err());
    }
}
