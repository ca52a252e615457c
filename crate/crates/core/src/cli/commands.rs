use serde::Serialize;
use serde_json::Value;

use super::config::RunConfig;
use crate::entropy::{
    entropy_report, general_radius_report, wave_entropy, BallFunction, CauchyData, EntropyReport,
    GeneralRadiusReport, WaveEntropy,
};
use crate::error::{param, Error, Result};
use crate::modular::{instance_report, BlockReport, DualityModel, InstanceReport};
use crate::prolate1d::{
    angle_operator_nystrom, assemble_prolate_matrix, commutation_certificate,
    concentration_values, prolate_eigenpairs, CommutationReport,
};
use crate::prolate_nd::certificate::normalized_eigenvectors;
use crate::prolate_nd::{
    assemble_radial_forms, nd_commutation_certificate, sector_hankel_nystrom, SpectralSector,
};

/// Alignment tolerance of the interval certificate.
pub const COMMUTATOR_TOL_1D: f64 = 1e-8;
/// Alignment tolerance of the sector certificates.
pub const COMMUTATOR_TOL_ND: f64 = 1e-6;
/// Relative floor for the smallest form eigenvalue.
pub const POSITIVITY_TOL: f64 = 1e-10;
/// Lower bound on the wave entropy slack.
pub const SLACK_TOL: f64 = -1e-9;

/// Result of one command: the serialized record and the failed checks.
#[derive(Debug, Clone)]
pub struct Outcome {
    pub result: Value,
    pub failures: Vec<String>,
}

impl Outcome {
    fn new<T: Serialize>(record: &T, failures: Vec<String>) -> Result<Self> {
        let result = serde_json::to_value(record)
            .map_err(|e| Error::Data(format!("cannot serialize report: {e}")))?;
        Ok(Self { result, failures })
    }

    pub fn passed(&self) -> bool {
        self.failures.is_empty()
    }
}

pub fn execute(cfg: &RunConfig) -> Result<Outcome> {
    match cfg.command.as_str() {
        "pswf" => pswf(cfg),
        "spectrum" => spectrum(cfg),
        "commutator" => commutator(cfg),
        "entropy" => entropy(cfg),
        "wave" => wave(cfg),
        "modular" => modular(cfg),
        "duality" => duality(cfg),
        other => param(format!("unknown command {other:?}")),
    }
}

fn check(failures: &mut Vec<String>, ok: bool, msg: impl FnOnce() -> String) {
    if !ok {
        failures.push(msg());
    }
}

/// Parses a function description.
///
/// `chi_B`, `zero`, `gaussian:A`, `gaussian_poly:A:c0,c1,..`,
/// `legendre:c0,c1,..` (d = 1), `legendre_mode:N`, `sector:ELL:c0,c1,..`
/// and `pswf:K`, the `K`-th prolate eigenfunction at the configured
/// bandwidth (sector `ell` when `d >= 2`).
pub fn parse_function(spec: &str, cfg: &RunConfig) -> Result<BallFunction> {
    let d = cfg.d;
    let mut parts = spec.trim().splitn(3, ':');
    let name = parts.next().unwrap_or("");
    let first = parts.next();
    let second = parts.next();
    let bad = || Error::Parameter(format!("cannot parse function {spec:?}"));
    let number = |s: Option<&str>| -> Result<f64> { s.ok_or_else(bad)?.trim().parse().map_err(|_| bad()) };
    let index = |s: Option<&str>| -> Result<usize> { s.ok_or_else(bad)?.trim().parse().map_err(|_| bad()) };
    let list = |s: Option<&str>| -> Result<Vec<f64>> {
        s.ok_or_else(bad)?
            .split(',')
            .map(|v| v.trim().parse().map_err(|_| bad()))
            .collect()
    };
    match name {
        "chi_B" | "chi_b" => BallFunction::chi_b(d),
        "zero" => BallFunction::sector(d, 0, vec![0.0]),
        "gaussian" => BallFunction::gaussian(d, number(first)?),
        "gaussian_poly" => BallFunction::gaussian_poly(d, list(second)?, number(first)?),
        "legendre" => {
            if d != 1 {
                return Err(Error::Unsupported("legendre series need d = 1; use sector".into()));
            }
            BallFunction::legendre_series(list(first)?)
        }
        "legendre_mode" => BallFunction::legendre_mode(d, index(first)?),
        "sector" => BallFunction::sector(d, index(first)?, list(second)?),
        "pswf" => {
            let k = index(first)?;
            if k >= cfg.basis {
                return param(format!("pswf index {k} needs basis > {k}"));
            }
            if d == 1 {
                let spec = prolate_eigenpairs(&assemble_prolate_matrix(cfg.c, cfg.basis)?, k + 1)?;
                BallFunction::legendre_series(spec.coefficients.column(k).iter().copied().collect())
            } else {
                let forms = assemble_radial_forms(SpectralSector::new(d, cfg.ell, cfg.c)?, cfg.basis)?;
                let (vecs, _) = normalized_eigenvectors(&forms.w_spectrum()?);
                BallFunction::sector(d, cfg.ell, vecs.column(k).iter().copied().collect())
            }
        }
        _ => Err(bad()),
    }
}

#[derive(Debug, Serialize)]
struct PswfRecord {
    d: usize,
    ell: usize,
    c: f64,
    basis_size: usize,
    /// Eigenvalues of the `−W` form, ascending.
    eigenvalues: Vec<f64>,
    parity: Vec<u8>,
    trusted: Vec<bool>,
    /// Concentration values; absent for even `d`.
    lambda: Option<Vec<f64>>,
    /// Sample points: `x ∈ [−1, 1]` for `d = 1`, `r ∈ [0, 1]` otherwise.
    grid: Vec<f64>,
    /// `values[k][i]` is eigenfunction `k` at `grid[i]`.
    values: Vec<Vec<f64>>,
    warnings: Vec<String>,
}

const GRID_POINTS: usize = 41;

fn pswf(cfg: &RunConfig) -> Result<Outcome> {
    let k = cfg.k;
    let record = if cfg.d == 1 {
        let spec = prolate_eigenpairs(&assemble_prolate_matrix(cfg.c, cfg.basis)?, k)?;
        let grid: Vec<f64> = (0..GRID_POINTS)
            .map(|i| -1.0 + 2.0 * i as f64 / (GRID_POINTS - 1) as f64)
            .collect();
        PswfRecord {
            d: 1,
            ell: 0,
            c: cfg.c,
            basis_size: cfg.basis,
            eigenvalues: spec.eigenvalues[..k].to_vec(),
            parity: spec.parity[..k].to_vec(),
            trusted: spec.trusted[..k].to_vec(),
            lambda: Some(concentration_values(&spec, k)),
            values: (0..k).map(|j| grid.iter().map(|&x| spec.eval(j, x)).collect()).collect(),
            grid,
            warnings: spec.warnings.clone(),
        }
    } else {
        let sector = SpectralSector::new(cfg.d, cfg.ell, cfg.c)?;
        let forms = assemble_radial_forms(sector, cfg.basis)?;
        let (vecs, trusted) = normalized_eigenvectors(&forms.w_spectrum()?);
        let basis = forms.basis();
        let grid: Vec<f64> = (0..GRID_POINTS).map(|i| i as f64 / (GRID_POINTS - 1) as f64).collect();
        let tables: Vec<_> = grid.iter().map(|&r| basis.table(r, cfg.basis)).collect();
        let values = (0..k)
            .map(|j| {
                tables
                    .iter()
                    .map(|t| (0..cfg.basis).map(|n| t.u[n] * vecs[(n, j)]).sum())
                    .collect()
            })
            .collect();
        let lambda = if cfg.d % 2 == 1 {
            let h = sector_hankel_nystrom(sector, cfg.quad)?;
            Some(nd_commutation_certificate(&forms, &h, k)?.lambda)
        } else {
            None
        };
        let mut warnings = Vec::new();
        if let Some(j) = trusted[..k].iter().position(|t| !t) {
            warnings.push(format!("eigenpair {j} fails the coefficient-tail test; increase N"));
        }
        PswfRecord {
            d: cfg.d,
            ell: cfg.ell,
            c: cfg.c,
            basis_size: cfg.basis,
            eigenvalues: forms.w_spectrum()?.eigenvalues[..k].to_vec(),
            parity: vec![(cfg.ell % 2) as u8; k],
            trusted: trusted[..k].to_vec(),
            lambda,
            grid,
            values,
            warnings,
        }
    };
    Outcome::new(&record, Vec::new())
}

#[derive(Debug, Serialize)]
struct SpectrumRecord {
    d: usize,
    ell: usize,
    c: f64,
    basis_size: usize,
    /// Lowest `k` eigenvalues of `−W`.
    w_eigenvalues: Vec<f64>,
    /// Lowest `k` eigenvalues of `−L`.
    l_eigenvalues: Vec<f64>,
    w_min_relative: f64,
    l_min_relative: f64,
    /// Largest entry of `W − L − c²(1 − M)`.
    identity_residual: f64,
    tolerance: f64,
    positive: bool,
}

fn spectrum(cfg: &RunConfig) -> Result<Outcome> {
    let forms = assemble_radial_forms(SpectralSector::new(cfg.d, cfg.ell, cfg.c)?, cfg.basis)?;
    let w = forms.w_spectrum()?.eigenvalues;
    let l = forms.l_spectrum()?.eigenvalues;
    let relative = |e: &[f64]| e[0] / e.iter().fold(f64::MIN_POSITIVE, |m, v| m.max(v.abs()));
    let (wr, lr) = (relative(&w), relative(&l));
    let k = cfg.k.min(w.len());
    let positive = wr >= -POSITIVITY_TOL && lr >= -POSITIVITY_TOL;
    let mut failures = Vec::new();
    check(&mut failures, positive, || {
        format!("negative form eigenvalue: W {wr:.3e}, L {lr:.3e} relative")
    });
    let record = SpectrumRecord {
        d: cfg.d,
        ell: cfg.ell,
        c: cfg.c,
        basis_size: cfg.basis,
        w_eigenvalues: w[..k].to_vec(),
        l_eigenvalues: l[..k].to_vec(),
        w_min_relative: wr,
        l_min_relative: lr,
        identity_residual: forms.identity_residual(),
        tolerance: POSITIVITY_TOL,
        positive,
    };
    Outcome::new(&record, failures)
}

#[derive(Debug, Serialize)]
struct CommutatorRecord {
    #[serde(flatten)]
    report: CommutationReport,
    /// Largest residual over the trusted eigenpairs.
    max_trusted_residual: f64,
    tolerance: f64,
}

/// Alignment certificate; the residual tolerance covers trusted eigenpairs.
pub fn commutator_record(cfg: &RunConfig) -> Result<(CommutationReport, f64, f64)> {
    if cfg.d % 2 == 0 {
        return Err(Error::Unsupported(format!(
            "the Fourier commutation certificate is implemented for odd dimensions only \
             (d = 1, 3, 5, 7); got d = {}",
            cfg.d
        )));
    }
    let (report, tol) = if cfg.d == 1 {
        let pm = assemble_prolate_matrix(cfg.c, cfg.basis)?;
        let t = angle_operator_nystrom(cfg.c, cfg.quad)?;
        (commutation_certificate(&pm, &t, cfg.k)?, COMMUTATOR_TOL_1D)
    } else {
        let sector = SpectralSector::new(cfg.d, cfg.ell, cfg.c)?;
        let forms = assemble_radial_forms(sector, cfg.basis)?;
        let h = sector_hankel_nystrom(sector, cfg.quad)?;
        (nd_commutation_certificate(&forms, &h, cfg.k)?, COMMUTATOR_TOL_ND)
    };
    let worst = report
        .alignment_residuals
        .iter()
        .zip(&report.trusted)
        .filter(|(_, &t)| t)
        .fold(0.0f64, |m, (&r, _)| m.max(r));
    Ok((report, worst, tol))
}

fn commutator(cfg: &RunConfig) -> Result<Outcome> {
    let (report, worst, tol) = commutator_record(cfg)?;
    let mut failures = Vec::new();
    check(&mut failures, worst < tol, || {
        format!("alignment residual {worst:.3e} exceeds {tol:.0e}")
    });
    check(&mut failures, report.ordering_ok, || {
        "concentration values are not strictly decreasing".into()
    });
    let record = CommutatorRecord {
        report,
        max_trusted_residual: worst,
        tolerance: tol,
    };
    Outcome::new(&record, failures)
}

/// Entropies divided by `‖f‖²`.
#[derive(Debug, Serialize)]
struct Normalized {
    born: f64,
    parabolic: f64,
    legendre: f64,
    prolate: f64,
}

#[derive(Debug, Serialize)]
struct EntropyRecord {
    function: BallFunction,
    #[serde(flatten)]
    report: EntropyReport,
    normalized: Option<Normalized>,
    general_radius: Option<GeneralRadiusReport>,
}

/// Relative tolerance for the dilation covariance.
pub const COVARIANCE_TOL: f64 = 1e-10;

fn entropy(cfg: &RunConfig) -> Result<Outcome> {
    let f = parse_function(&cfg.function, cfg)?;
    let report = entropy_report(&f)?;
    let mut failures = Vec::new();
    check(&mut failures, report.balanced, || {
        format!(
            "balance residual {:.3e} exceeds {:.3e}",
            report.balance_residual, report.tolerance
        )
    });
    let general_radius = if cfg.lambda != 1.0 || cfg.lambda_prime != 1.0 {
        let g = general_radius_report(&f, cfg.lambda, cfg.lambda_prime)?;
        check(&mut failures, g.holds, || {
            format!("general-radius residual {:.3e} exceeds {:.3e}", g.residual, g.tolerance)
        });
        check(&mut failures, g.dilation_covariance < COVARIANCE_TOL, || {
            format!("dilation covariance {:.3e}", g.dilation_covariance)
        });
        Some(g)
    } else {
        None
    };
    let norm_sq = report.born / std::f64::consts::PI;
    let normalized = (norm_sq > 0.0).then(|| Normalized {
        born: report.born / norm_sq,
        parabolic: report.parabolic / norm_sq,
        legendre: report.legendre / norm_sq,
        prolate: report.prolate / norm_sq,
    });
    let record = EntropyRecord {
        function: f,
        report,
        normalized,
        general_radius,
    };
    Outcome::new(&record, failures)
}

#[derive(Debug, Serialize)]
struct WaveRecord {
    field: BallFunction,
    momentum: BallFunction,
    #[serde(flatten)]
    report: WaveEntropy,
    tolerance: f64,
}

fn wave(cfg: &RunConfig) -> Result<Outcome> {
    let f = parse_function(&cfg.function, cfg)?;
    let g = parse_function(&cfg.momentum, cfg)?;
    let report = wave_entropy(&CauchyData::new(f.clone(), g.clone())?)?;
    let tol = 1e-10 * (report.entropy.abs() + 1.0);
    let mut failures = Vec::new();
    check(&mut failures, report.cross_form_residual < tol, || {
        format!("cross-form residual {:.3e} exceeds {tol:.3e}", report.cross_form_residual)
    });
    check(&mut failures, report.slack >= SLACK_TOL, || {
        format!("entropy falls below the bound by {:.3e}", -report.slack)
    });
    let record = WaveRecord {
        field: f,
        momentum: g,
        report,
        tolerance: tol,
    };
    Outcome::new(&record, failures)
}

#[derive(Debug, Serialize)]
struct ModularRecord {
    n: usize,
    instances: Vec<InstanceReport>,
    identities_max: f64,
    cutting_agreement_max: Option<f64>,
    entropy_min: f64,
    generator_agreement_max: f64,
    /// Instances per random draw.
    acceptance_rate: f64,
    passed: usize,
}

fn seeds(cfg: &RunConfig) -> impl Iterator<Item = u64> + '_ {
    (0..cfg.instances as u64).map(move |i| cfg.seed.wrapping_add(i))
}

fn modular(cfg: &RunConfig) -> Result<Outcome> {
    let instances = seeds(cfg)
        .map(|s| instance_report(cfg.n, s, cfg.vectors))
        .collect::<Result<Vec<_>>>()?;
    let fold = |f: fn(&InstanceReport) -> f64| instances.iter().map(f).fold(0.0, f64::max);
    let cutting: Vec<f64> = instances.iter().filter_map(|r| r.cutting_agreement).collect();
    let attempts: usize = instances.iter().map(|r| r.attempts).sum();
    let failures = instances
        .iter()
        .filter(|r| !r.passes())
        .map(|r| format!("instance with seed {} fails its checks", r.seed))
        .collect();
    let record = ModularRecord {
        n: cfg.n,
        identities_max: fold(|r| r.identities_max),
        cutting_agreement_max: (!cutting.is_empty()).then(|| cutting.iter().fold(0.0, |m: f64, &v| m.max(v))),
        entropy_min: instances.iter().map(|r| r.entropy_min).fold(f64::INFINITY, f64::min),
        generator_agreement_max: fold(|r| r.generator_agreement),
        acceptance_rate: instances.len() as f64 / attempts as f64,
        passed: instances.iter().filter(|r| r.passes()).count(),
        instances,
    };
    Outcome::new(&record, failures)
}

#[derive(Debug, Serialize)]
struct DualityRecord {
    n: usize,
    model: String,
    instances: Vec<BlockReport>,
    passed: usize,
}

fn duality(cfg: &RunConfig) -> Result<Outcome> {
    let instances = seeds(cfg)
        .map(|s| {
            let m = if cfg.model == "wave" {
                DualityModel::wave(cfg.n, s)?
            } else {
                DualityModel::random(cfg.n, s)?
            };
            m.block_structure_certificate(cfg.vectors, s)
        })
        .collect::<Result<Vec<_>>>()?;
    let failures = instances
        .iter()
        .zip(seeds(cfg))
        .filter(|(r, _)| !r.passes())
        .map(|(_, s)| format!("block structure fails for seed {s}"))
        .collect();
    let record = DualityRecord {
        n: cfg.n,
        model: cfg.model.clone(),
        passed: instances.iter().filter(|r| r.passes()).count(),
        instances,
    };
    Outcome::new(&record, failures)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cfg(command: &str) -> RunConfig {
        RunConfig::defaults(command)
    }

    #[test]
    fn function_specs() {
        let c = cfg("entropy");
        for s in ["chi_B", "zero", "gaussian:0.5", "gaussian_poly:1:1,0,2", "legendre:1,0.5", "legendre_mode:3", "sector:1:0.2,1", "pswf:2"] {
            parse_function(s, &c).unwrap_or_else(|e| panic!("{s}: {e}"));
        }
        for s in ["gaussian", "gaussian:x", "sector:1", "nope", "pswf:99"] {
            assert!(parse_function(s, &c).is_err(), "{s}");
        }
        let mut c3 = cfg("entropy");
        c3.d = 3;
        assert!(matches!(parse_function("legendre:1", &c3), Err(Error::Unsupported(_))));
        assert!(parse_function("pswf:1", &c3).is_ok());
    }

    #[test]
    fn even_dimension_commutator_is_unsupported() {
        let mut c = cfg("commutator");
        c.d = 2;
        let e = execute(&c).unwrap_err();
        assert!(matches!(e, Error::Unsupported(ref m) if m.contains("odd dimensions")));
    }

    #[test]
    fn every_command_runs() {
        for name in ["pswf", "spectrum", "commutator", "entropy", "wave", "modular", "duality"] {
            let mut c = cfg(name);
            c.instances = 2;
            c.vectors = 16;
            c.basis = 24;
            c.quad = 60;
            c.k = 6;
            let o = execute(&c).unwrap();
            assert!(o.passed(), "{name}: {:?}", o.failures);
        }
        let mut c = cfg("pswf");
        c.d = 3;
        c.basis = 16;
        c.quad = 40;
        c.k = 4;
        let o = execute(&c).unwrap();
        assert_eq!(o.result["lambda"].as_array().unwrap().len(), 4);
    }
}
