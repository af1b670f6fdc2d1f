//! One function per subcommand. Each resolves its defaults, runs the
//! library, and returns an [`Artifact`].

use std::time::Duration;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use serde_json::{json, Value};

use disclab_core::discrepancy::DiscrepancyField;
use disclab_core::dual::{
    beck_gain_sum, chain_verify, default_scale, halasz_sine, matching_factors, riesz_halasz, riesz_talagrand,
    FactorRange, SignModel,
};
use disclab_core::dyadic::ShapeVector;
use disclab_core::grid::GridBudget;
use disclab_core::hyperbolic::{sup_norm, HaarExpansion};
use disclab_core::points::PointSet;
use disclab_core::smallball::{
    branch_and_bound, exhaustive_min, exponent_fit, local_search, mc_expectation, CoefficientModel, SearchBudget,
};

use crate::config::{Model, NormSpec, Params, SetKind};
use crate::output::{self, Artifact, Sink, Table};
use crate::suite::{self, SuiteConfig};
use crate::CliError;

/// Default `p`-norm grid level per axis for dimension `d`.
pub fn default_lp_level(d: usize) -> u32 {
    match d {
        1 => 16,
        2 => 10,
        3 => 6,
        _ => (20 / d as u32).max(1),
    }
}

const BECK_LADDER: [f64; 3] = [2.0, 4.0, 8.0];

/// Relative tolerance for the identities checked by `riesz`.
const IDENTITY_TOL: f64 = 1e-12;

pub fn dispatch(name: &str, params: &Params, sink: &Sink) -> Result<(), CliError> {
    let artifact = match name {
        "gen" => return gen(params, sink),
        "suite" => return run_suite(params, sink),
        "disc" => disc(params)?,
        "haar" => haar(params)?,
        "riesz" => riesz(params)?,
        "chain" => chain(params)?,
        "smallball" => smallball(params)?,
        "mc" => mc(params)?,
        "beck" => beck(params)?,
        other => return Err(CliError::Usage(format!("unknown command {other}"))),
    };
    sink.emit(name, params, &artifact)?;
    match artifact.failure {
        Some(msg) => Err(CliError::Assertion(msg)),
        None => Ok(()),
    }
}

fn positive(name: &str, v: Option<f64>, default: f64) -> Result<f64, CliError> {
    let v = v.unwrap_or(default);
    if v.is_finite() && v > 0.0 {
        Ok(v)
    } else {
        Err(CliError::Usage(format!("--{name} must be positive, got {v}")))
    }
}

fn positive_count(name: &str, v: Option<usize>, default: usize) -> Result<usize, CliError> {
    match v.unwrap_or(default) {
        0 => Err(CliError::Usage(format!("--{name} must be positive"))),
        v => Ok(v),
    }
}

fn require_n(params: &Params) -> Result<u32, CliError> {
    params.n.ok_or_else(|| CliError::Usage("this command needs --n".into()))
}

fn set_summary(p: &PointSet, shift: Option<u64>) -> Value {
    let mut v = json!({"N": p.len(), "d": p.dim()});
    if let Some(s) = shift {
        v["shift"] = json!(s);
    }
    v
}

fn field(params: &Params) -> Result<(DiscrepancyField, Value), CliError> {
    let (p, shift) = params.point_set()?;
    let summary = set_summary(&p, shift);
    Ok((DiscrepancyField::new(p), summary))
}

fn gen(params: &Params, sink: &Sink) -> Result<(), CliError> {
    let (p, shift) = params.point_set()?;
    if sink.json {
        let mut result = set_summary(&p, shift);
        result["points"] = json!(p.iter().collect::<Vec<_>>());
        return sink.emit("gen", params, &Artifact::new(result)?);
    }
    let mut params = params.clone();
    if params.set == Some(SetKind::VdcShifted) {
        params.shift = shift;
    }
    let header = serde_json::to_string(&json!({
        "tool": output::TOOL,
        "version": output::VERSION,
        "command": "gen",
        "config": params,
    }))
    .map_err(disclab_core::Error::from)?;
    let body = format!("# {header}\n{}", p.to_text());
    match &sink.out {
        Some(path) => output::write_file(path, &body),
        None => output::print(&body),
    }
}

fn disc(params: &Params) -> Result<Artifact, CliError> {
    let budget = GridBudget::default();
    let (f, mut result) = field(params)?;
    let norm = params.norm.unwrap_or(NormSpec::L2);
    result["norm"] = json!(norm.to_string());
    match norm {
        NormSpec::L2 => {
            result["value"] = json!(f.l2_norm_exact()?);
            result["exact"] = json!(true);
        }
        NormSpec::Sup => {
            let s = f.star_discrepancy_exact()?;
            result["value"] = json!(s.value);
            result["exact"] = json!(true);
            result["witness"] = json!(s.witness);
            result["box"] = json!(s.kind);
        }
        NormSpec::L1 | NormSpec::Lp(_) => {
            let p = if let NormSpec::Lp(p) = norm { p } else { 1.0 };
            let level = params.level.unwrap_or_else(|| default_lp_level(f.dim()));
            let seed = params.seed();
            let s = f.lp_norm_sampled(p, level, seed, budget)?;
            result["value"] = json!(s.value);
            result["exact"] = json!(false);
            result["stderr"] = json!(s.stderr);
            result["samples"] = json!(s.samples);
            result["level"] = json!(level);
            result["seed"] = json!(seed);
        }
        NormSpec::Exp(_) | NormSpec::LLogL(_) => {
            let spec = norm.orlicz().expect("Orlicz norm");
            let level = params.level.unwrap_or_else(|| f.default_orlicz_level(budget));
            result["value"] = json!(f.orlicz_norm_sampled(spec, level, budget)?);
            result["exact"] = json!(false);
            result["level"] = json!(level);
        }
    }
    Artifact::new(result)
}

fn haar(params: &Params) -> Result<Artifact, CliError> {
    let (f, mut result) = field(params)?;
    let d = f.dim();
    let n = params.n.unwrap_or_else(|| default_scale(f.n()));
    let mut columns: Vec<String> = (1..=d).map(|j| format!("r_{j}")).collect();
    columns.extend((1..=d).map(|j| format!("k_{j}")));
    columns.push("coefficient".into());
    let mut table = Table {
        columns,
        rows: Vec::new(),
    };
    let mut l1 = 0.0;
    for shape in ShapeVector::with_order(n, d) {
        let coeffs = f.shape_coefficients(&shape)?;
        for (index, c) in coeffs.iter().enumerate() {
            let mut row: Vec<Value> = shape.entries().iter().map(|&r| json!(r)).collect();
            row.extend(shape.position_of(index as u64).into_iter().map(|k| json!(k)));
            row.push(json!(c));
            table.push(row);
            l1 += c.abs();
        }
    }
    result["n"] = json!(n);
    result["rectangles"] = json!(table.rows.len());
    result["l1_coefficients"] = json!(l1);
    result["columns"] = json!(table.columns);
    result["rows"] = json!(table.rows);
    Ok(Artifact::new(result)?.with_table(table))
}

fn close(a: f64, b: f64) -> bool {
    (a - b).abs() < IDENTITY_TOL * b.abs().max(1.0)
}

fn riesz(params: &Params) -> Result<Artifact, CliError> {
    let budget = GridBudget::default();
    match params.method.as_deref().unwrap_or("talagrand") {
        "talagrand" => {
            let n = params.n.unwrap_or(4);
            let model = params.model.unwrap_or(Model::Signs);
            let seed = params.seed();
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let mut e = HaarExpansion::new(2, n)?;
            for shape in ShapeVector::with_order(n, 2) {
                let coeffs = (0..shape.count()?)
                    .map(|_| match model {
                        Model::Signs => {
                            if rng.random::<bool>() {
                                1.0
                            } else {
                                -1.0
                            }
                        }
                        Model::Gaussian => rng.sample(StandardNormal),
                    })
                    .collect();
                e.set_shape(&shape, coeffs)?;
            }
            let cert = riesz_talagrand(n, &matching_factors(&e)?, budget)?;
            let g = e.to_grid(budget)?;
            let pairing = g.inner(&cert.psi)?;
            let expected = e.l1_coefficients() * (-(n as f64)).exp2();
            let sup = sup_norm(&g);
            let ok = cert.min >= 0.0 && close(cert.mean, 1.0) && close(cert.l1, 1.0) && close(pairing, expected);
            let result = json!({
                "variant": "talagrand", "n": n, "seed": seed, "model": model,
                "min": cert.min, "mean": cert.mean, "l1": cert.l1,
                "pairing": pairing, "expected_pairing": expected, "sup": sup,
            });
            Ok(Artifact::new(result)?.fail_unless(ok, || "Riesz product identities violated".into()))
        }
        "halasz" => {
            let (f, mut result) = field(params)?;
            let gamma = params.gamma.unwrap_or(0.1);
            let n = params.n.unwrap_or_else(|| default_scale(f.n()));
            let range = if params.skip_first {
                FactorRange::SkipFirst
            } else {
                FactorRange::AllShapes
            };
            let (_, r) = riesz_halasz(&f, gamma, n, range, budget)?;
            let star = f.star_discrepancy_exact()?.value;
            let ok = r.sup <= r.sup_bound * (1.0 + IDENTITY_TOL) && r.lower_bound <= star * (1.0 + IDENTITY_TOL);
            result["variant"] = json!("halasz");
            result["range"] = json!(range);
            result["report"] = json!(r);
            result["star_discrepancy"] = json!(star);
            Ok(Artifact::new(result)?.fail_unless(ok, || "Halász bounds violated".into()))
        }
        "sine" => {
            let (f, mut result) = field(params)?;
            let c = params.c.unwrap_or(0.1);
            let n = params.n.unwrap_or_else(|| default_scale(f.n()));
            let s = halasz_sine(&f, c, n, budget)?;
            let level = params.level.unwrap_or_else(|| default_lp_level(f.dim()));
            let l1 = f.lp_norm_sampled(1.0, level, params.seed(), budget)?;
            let ok = s.pairing <= l1.value + 3.0 * l1.stderr;
            result["variant"] = json!("sine");
            result["report"] = json!(s);
            result["l1_sampled"] = json!(l1);
            Ok(Artifact::new(result)?.fail_unless(ok, || "sine pairing exceeds the sampled L1 norm".into()))
        }
        other => Err(CliError::Usage(format!(
            "unknown riesz method {other:?}; expected talagrand|halasz|sine"
        ))),
    }
}

fn chain(params: &Params) -> Result<Artifact, CliError> {
    let (f, mut result) = field(params)?;
    let n = params.n.unwrap_or_else(|| default_scale(f.n()));
    let c = chain_verify(&f, n)?;
    let holds = c.holds;
    result["chain"] = json!(c);
    Ok(Artifact::new(result)?.fail_unless(holds, || "Roth chain bound exceeds the exact L2 norm".into()))
}

fn smallball(params: &Params) -> Result<Artifact, CliError> {
    let d = params.d.unwrap_or(2);
    let n = require_n(params)?;
    let r = match params.method.as_deref().unwrap_or("bnb") {
        "exhaustive" => exhaustive_min(n, d)?,
        "bnb" => {
            let secs = positive("budget-seconds", params.budget_seconds, 60.0)?;
            let budget = SearchBudget {
                time: Duration::from_secs_f64(secs),
                ..SearchBudget::default()
            };
            branch_and_bound(n, d, budget)?
        }
        "local" => local_search(n, d, positive_count("restarts", params.restarts, 16)?, params.seed())?,
        other => {
            return Err(CliError::Usage(format!(
                "unknown smallball method {other:?}; expected exhaustive|bnb|local"
            )))
        }
    };
    Artifact::new(r)
}

fn coefficient_model(m: Option<Model>) -> CoefficientModel {
    match m.unwrap_or(Model::Signs) {
        Model::Signs => CoefficientModel::Signs,
        Model::Gaussian => CoefficientModel::Gaussian,
    }
}

fn mc(params: &Params) -> Result<Artifact, CliError> {
    let d = params.d.unwrap_or(2);
    let n = require_n(params)?;
    let n_max = params.n_max.unwrap_or(n);
    if n_max < n {
        return Err(CliError::Usage(format!("--n-max {n_max} is below --n {n}")));
    }
    let trials = positive_count("trials", params.trials, 200)?;
    let model = coefficient_model(params.model);
    let seed = params.seed();
    let mut table = Table::new(&["n", "value", "stderr"]);
    let mut runs = Vec::new();
    let mut series = Vec::new();
    for m in n..=n_max {
        let r = mc_expectation(m, d, trials, seed, model)?;
        table.push(vec![json!(m), json!(r.value), json!(r.stderr)]);
        series.push((m as f64, r.value));
        runs.push(r);
    }
    let mut result = json!({"d": d, "trials": trials, "seed": seed, "runs": runs});
    if series.len() >= 3 && series[0].0 > 0.0 {
        result["exponent_fit"] = json!(exponent_fit(&series)?);
    }
    Ok(Artifact::new(result)?.with_table(table))
}

fn beck(params: &Params) -> Result<Artifact, CliError> {
    let d = params.d.unwrap_or(3);
    let n = require_n(params)?;
    let model = match params.seed {
        Some(seed) => SignModel::Random { seed },
        None => SignModel::Constant(1),
    };
    let (_, r) = beck_gain_sum(n, d, model, &BECK_LADDER, GridBudget::default())?;
    let mut table = Table::new(&["p", "norm", "ratio"]);
    for row in &r.norms {
        table.push(vec![json!(row.p), json!(row.norm), json!(row.ratio)]);
    }
    let result = json!({"signs": model, "report": r});
    Ok(Artifact::new(result)?.with_table(table))
}

fn parse_criteria(spec: Option<&str>) -> Result<Vec<u32>, CliError> {
    let Some(spec) = spec else {
        return Ok(Vec::new());
    };
    let ids: Vec<u32> = spec
        .split(',')
        .map(|s| s.trim().parse::<u32>())
        .collect::<Result<_, _>>()
        .map_err(|_| CliError::Usage(format!("--criteria expects comma-separated numbers, got {spec:?}")))?;
    let known = suite::criteria().len() as u32;
    if let Some(bad) = ids.iter().find(|&&i| i == 0 || i > known) {
        return Err(CliError::Usage(format!("no criterion {bad}; criteria are 1..={known}")));
    }
    Ok(ids)
}

fn run_suite(params: &Params, sink: &Sink) -> Result<(), CliError> {
    let only = parse_criteria(params.criteria.as_deref())?;
    let config = SuiteConfig {
        seed: params.seed(),
        ..SuiteConfig::default()
    }
    .with_overrides(&params.tol)?;
    let report = suite::run(&config, &only, |r| {
        if !sink.json {
            let _ = output::print(&format!("{}\n", r.line()));
        }
    });
    let failed: Vec<String> = report
        .criteria
        .iter()
        .filter(|r| !r.passed)
        .map(|r| r.id.to_string())
        .collect();
    let artifact = Artifact::new(&report)?;
    if sink.json {
        sink.emit("suite", params, &artifact)?;
    } else {
        sink.write_out("suite", params, &artifact)?;
        let passed = report.criteria.len() - failed.len();
        output::print(&format!("{passed}/{} criteria passed\n", report.criteria.len()))?;
    }
    if failed.is_empty() {
        Ok(())
    } else {
        Err(CliError::Assertion(format!("criteria {} failed", failed.join(", "))))
    }
}
