//! Dispatch a [`RunConfig`] to the library and assemble its report.

use nalgebra::DVector;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;
use serde_json::Value;

use a12::family::{validate_generating, GeneratingFamily, Target};
use a12::homogeneous::{
    build_cartan_datum, build_perturbed_datum, s_curvature_sweep, vanishing_criterion, Criterion,
    HomogeneousDatum, SubspaceDatum,
};
use a12::kvfcl::{classify_candidate, length_deviation, CandidateClass, KillingCandidate, Verdict};
use a12::lie::CompactLieAlgebra;
use a12::norm::{
    cartan_tensor, fundamental_tensor, hessian_fd_oracle, is_riemannian, mean_torsion_fd,
    random_interior_direction, relative_deviation, DatumDecomposition, DEVIATION_FLOOR,
};
use a12::roots::{assertion_scan, RootSystem, ScanReport, Strategy};

use crate::config::{Command, DatumKind, GPrime, RunConfig, StrategyKind};
use crate::error::CliError;

/// Version of the report layout, carried in every report.
pub const SCHEMA_VERSION: &str = "1.0";

/// Sampled `|S|` below which S counts as vanishing for `scurvature`.
const ZERO_S_TOL: f64 = 1e-8;

/// Finite-difference step for the tensor oracles on unit directions.
const FD_STEP: f64 = 1e-5;

#[derive(Debug, Clone, PartialEq)]
pub struct Outcome {
    /// 0 when the checked property holds, 1 when it fails.
    pub exit_code: u8,
    pub report: Value,
}

#[derive(Serialize)]
struct Envelope<T: Serialize> {
    spec_version: &'static str,
    command: String,
    pass: bool,
    #[serde(flatten)]
    body: T,
}

fn outcome<T: Serialize>(command: Command, pass: bool, body: T) -> Result<Outcome, CliError> {
    let report = serde_json::to_value(Envelope {
        spec_version: SCHEMA_VERSION,
        command: command.to_string(),
        pass,
        body,
    })
    .map_err(|e| CliError::Io(e.to_string()))?;
    Ok(Outcome {
        exit_code: u8::from(!pass),
        report,
    })
}

pub fn execute(cfg: &RunConfig) -> Result<Outcome, CliError> {
    match cfg.command {
        Command::ValidateNorm => validate_norm(cfg),
        Command::Tensors => tensors(cfg),
        Command::SCurvature | Command::Vanishing => scurvature(cfg),
        Command::KeyLemma => keylemma(cfg),
        Command::Kvfcl => kvfcl(cfg),
    }
}

fn family(cfg: &RunConfig) -> Result<GeneratingFamily, CliError> {
    let spec = cfg.family.as_deref().expect("checked at parse time");
    Ok(GeneratingFamily::parse(spec)?)
}

#[derive(Serialize)]
struct NormReport {
    family: String,
    valid: bool,
    min_margin: f64,
    argmin: (f64, f64),
    argmin_profile: Target,
    identity_residual: f64,
    grid_size: usize,
    tol: f64,
}

fn validate_norm(cfg: &RunConfig) -> Result<Outcome, CliError> {
    let fam = family(cfg)?;
    let r = validate_generating(&fam, cfg.grid)?;
    let pass = r.valid && r.identity_residual < cfg.tol;
    outcome(
        cfg.command,
        pass,
        NormReport {
            family: fam.spec(),
            valid: r.valid,
            min_margin: r.min_margin,
            argmin: r.argmin,
            argmin_profile: r.argmin_profile,
            identity_residual: r.identity_residual,
            grid_size: r.grid_size,
            tol: cfg.tol,
        },
    )
}

#[derive(Serialize)]
struct TensorReport {
    family: String,
    dims: (usize, usize),
    samples: u64,
    seed: u64,
    max_rel_deviation_g: f64,
    max_rel_deviation_i: f64,
    max_symmetry_residual: f64,
    max_contraction_residual: f64,
    is_riemannian: bool,
    tol: f64,
}

fn tensors(cfg: &RunConfig) -> Result<Outcome, CliError> {
    let fam = family(cfg)?;
    let (n1, n2) = cfg.dims.expect("checked at parse time");
    let datum = DatumDecomposition::new(n1, n2)?;
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let (mut dg, mut di, mut sym, mut contr) = (0.0f64, 0.0f64, 0.0f64, 0.0f64);
    for _ in 0..cfg.samples {
        let y = random_interior_direction(&datum, &mut rng, 0.1);
        let g = fundamental_tensor(&fam, &datum, &y)?;
        let fd = hessian_fd_oracle(&fam, &datum, &y, FD_STEP)?;
        dg = dg.max(relative_deviation(g.g.iter(), fd.g.iter(), DEVIATION_FLOOR));
        let c = cartan_tensor(&fam, &datum, &y)?;
        let i = c.mean_torsion.as_ref().expect("interior direction");
        let ifd = mean_torsion_fd(&fam, &datum, &y, FD_STEP)?;
        di = di.max(relative_deviation(i.iter(), ifd.iter(), DEVIATION_FLOOR));
        sym = sym.max(c.c.symmetry_residual());
        contr = contr.max(c.c.contract_last(&y).amax());
    }
    let riemannian = is_riemannian(&fam, &datum, 20, cfg.seed)?;
    let pass = dg < cfg.tol && di < cfg.tol;
    outcome(
        cfg.command,
        pass,
        TensorReport {
            family: fam.spec(),
            dims: (n1, n2),
            samples: cfg.samples,
            seed: cfg.seed,
            max_rel_deviation_g: dg,
            max_rel_deviation_i: di,
            max_symmetry_residual: sym,
            max_contraction_residual: contr,
            is_riemannian: riemannian,
            tol: cfg.tol,
        },
    )
}

/// Build the homogeneous datum a config describes.
pub fn build_datum(cfg: &RunConfig) -> Result<HomogeneousDatum, CliError> {
    let fam = family(cfg)?;
    let alg = CompactLieAlgebra::parse(cfg.algebra.as_deref().expect("checked at parse time"))?;
    let datum = match cfg.datum.expect("checked at parse time") {
        DatumKind::Cartan => build_cartan_datum(&alg, &fam, &cfg.scalars)?,
        DatumKind::Perturbed => build_perturbed_datum(&alg, &fam)?,
        DatumKind::Explicit => {
            let v2: Vec<DVector<f64>> = cfg
                .v2
                .iter()
                .map(|v| DVector::from_column_slice(v))
                .collect();
            for v in &v2 {
                if v.len() != alg.dim() {
                    return Err(a12::Error::DimensionMismatch {
                        expected: alg.dim(),
                        got: v.len(),
                    }
                    .into());
                }
            }
            let split = SubspaceDatum::bi_invariant(&alg, v2)?;
            HomogeneousDatum::new(alg, split, &fam, None, "explicit")?
        }
    };
    Ok(datum)
}

#[derive(Serialize)]
struct SCurvatureSummary {
    algebra: String,
    family: String,
    datum_kind: String,
    samples: u64,
    seed: u64,
    #[serde(rename = "max_abs_S_closed")]
    max_abs_s_closed: f64,
    #[serde(rename = "max_abs_S_oracle")]
    max_abs_s_oracle: f64,
    max_rel_deviation: f64,
    tol: f64,
    criterion: Criterion,
    /// The criterion and the sampled `|S|` agree.
    consistent: bool,
}

/// `scurvature` passes when closed form and oracle agree to `tol`;
/// `vanishing` passes when the criterion holds and sampled `|S|` stays
/// below `tol`.
fn scurvature(cfg: &RunConfig) -> Result<Outcome, CliError> {
    let datum = build_datum(cfg)?;
    let sweep = s_curvature_sweep(&datum, cfg.samples as usize, cfg.seed)?;
    let criterion = vanishing_criterion(&datum);
    let zero_tol = if cfg.command == Command::Vanishing {
        cfg.tol
    } else {
        ZERO_S_TOL
    };
    let consistent = criterion.holds == (sweep.max_abs_s_oracle < zero_tol);
    let pass = match cfg.command {
        Command::Vanishing => criterion.holds && sweep.max_abs_s_oracle < cfg.tol,
        _ => sweep.max_rel_deviation < cfg.tol,
    };
    outcome(
        cfg.command,
        pass,
        SCurvatureSummary {
            algebra: datum.algebra.spec(),
            family: cfg.family.clone().unwrap_or_default(),
            datum_kind: datum.kind.clone(),
            samples: cfg.samples,
            seed: cfg.seed,
            max_abs_s_closed: sweep.max_abs_s_closed,
            max_abs_s_oracle: sweep.max_abs_s_oracle,
            max_rel_deviation: sweep.max_rel_deviation,
            tol: cfg.tol,
            criterion,
            consistent,
        },
    )
}

fn keylemma(cfg: &RunConfig) -> Result<Outcome, CliError> {
    let rs = RootSystem::parse(cfg.root_type.as_deref().expect("checked at parse time"))?;
    let strategy = match cfg.strategy {
        StrategyKind::ExhaustiveDirections => Strategy::ExhaustiveDirections,
        StrategyKind::Random => Strategy::Random {
            samples: cfg.samples,
            seed: cfg.seed,
        },
    };
    let report: ScanReport = assertion_scan(&rs, strategy)?;
    outcome(cfg.command, report.pass, report)
}

#[derive(Serialize)]
struct KvfclReport {
    algebra: String,
    family: String,
    datum_kind: String,
    samples: u64,
    seed: u64,
    spread: f64,
    min: f64,
    max: f64,
    verdict: Verdict,
    class: CandidateClass,
}

fn kvfcl(cfg: &RunConfig) -> Result<Outcome, CliError> {
    let datum = build_datum(cfg)?;
    let n = datum.dim();
    let vec_of = |v: &Option<Vec<f64>>, key: &'static str| -> Result<DVector<f64>, CliError> {
        match v {
            None => Ok(DVector::zeros(n)),
            Some(v) if v.len() == n => Ok(DVector::from_column_slice(v)),
            Some(v) => Err(CliError::InvalidValue {
                key,
                value: format!("{} entries", v.len()),
                reason: format!("expected {n} frame coordinates"),
                line: None,
            }),
        }
    };
    let x = vec_of(&cfg.x, "x")?;
    let xp = vec_of(&cfg.x_prime, "x_prime")?;
    let g_prime = match cfg.g_prime {
        GPrime::V2 => datum.split.v2.clone(),
        GPrime::None => Vec::new(),
    };
    let cand = KillingCandidate::from_frame(&datum, &x, &xp, g_prime)?;
    let report = length_deviation(&datum, &cand, cfg.samples as usize, cfg.seed)?;
    let class = classify_candidate(&datum, &cand, &report);
    let pass = matches!(class, CandidateClass::Class1 | CandidateClass::Class2);
    outcome(
        cfg.command,
        pass,
        KvfclReport {
            algebra: datum.algebra.spec(),
            family: cfg.family.clone().unwrap_or_default(),
            datum_kind: datum.kind.clone(),
            samples: cfg.samples,
            seed: cfg.seed,
            spread: report.spread,
            min: report.min,
            max: report.max,
            verdict: report.verdict,
            class,
        },
    )
}
