//! The six subcommands. Each builds a report and an exit status; nothing here
//! prints directly.

use coxdeform::cartan::{
    check_vinberg_conditions, classify_group, diagonal_normalize, realize_point_from_cartan, CartanMatrix, CartanTolerance,
};
use coxdeform::linalg::{numerical_rank, RankPolicy};
use coxdeform::lorentz::{self, psi_jacobian, seeds, HyperbolicRealization, NewtonOptions, RealizationChecks};
use coxdeform::matchstats::{estimate_wo_fraction, SamplingMode};
use coxdeform::vinberg::{
    check_rank_sum, check_u_membership, esselmann_family, esselmann_quintic, esselmann_quintic_gradient, family_curve,
    hyperbolic_point, local_deformation_dimension, Grid,
};
use coxdeform::Error;
use serde_json::{json, Value};

use crate::input::{load_matrix, load_orbifold, load_polytope, LoadError, LoadedOrbifold};
use crate::output::{fmt12, render_json, to_json};
use crate::{Cli, Command, Config, Format, Mode};

const INDEXING_NOTE: &str = "facet indices in reports are zero-based; input files number facets from 1";

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Status {
    Success,
    /// Invalid input, or an object that fails the checks asked for.
    Validation,
    /// Divergence, a point that is not a zero, or an uncertain rank.
    Numerical,
}

impl Status {
    pub fn code(self) -> u8 {
        match self {
            Status::Success => 0,
            Status::Validation => 1,
            Status::Numerical => 2,
        }
    }
}

#[derive(Debug)]
pub struct Outcome {
    pub report: Option<String>,
    pub messages: Vec<String>,
    pub status: Status,
}

impl Outcome {
    fn report(text: String, status: Status) -> Outcome {
        Outcome { report: Some(text), messages: Vec::new(), status }
    }

    fn failure(status: Status, message: String) -> Outcome {
        Outcome { report: None, messages: vec![message], status }
    }

    fn note(mut self, message: String) -> Outcome {
        self.messages.push(message);
        self
    }
}

impl From<LoadError> for Outcome {
    fn from(e: LoadError) -> Outcome {
        Outcome::failure(Status::Validation, e.to_string())
    }
}

fn status_of(e: &Error) -> Status {
    match e {
        Error::Divergence(_)
        | Error::NotAZero(_)
        | Error::GaugeNotFree { .. }
        | Error::SamplingStalled(_)
        | Error::CountOverflow
        | Error::InvalidRealization(_) => Status::Numerical,
        _ => Status::Validation,
    }
}

fn core_failure(context: &str, e: Error) -> Outcome {
    Outcome::failure(status_of(&e), format!("error: {context}: {e}"))
}

struct Settings {
    policy: RankPolicy,
    newton: NewtonOptions,
    zero_tol: f64,
}

impl Settings {
    fn new(config: &Config) -> Settings {
        let newton = NewtonOptions {
            tolerance: config.tol / 10.0,
            checks: RealizationChecks { tolerance: config.tol * 10.0, ..RealizationChecks::default() },
            ..NewtonOptions::default()
        };
        Settings { policy: RankPolicy::Relative(config.rank_tol), newton, zero_tol: config.tol }
    }
}

fn config_json(config: &Config) -> Value {
    json!({
        "tol": config.tol,
        "rank_tol": config.rank_tol,
        "seed": config.seed,
        "force": config.force,
    })
}

fn input_json(loaded: &LoadedOrbifold) -> Value {
    json!({ "name": loaded.name, "source": loaded.source, "seed_polytope": loaded.seed })
}

/// A rank decision that is too close to call fails the run unless forced.
fn rank_status(uncertain: bool, config: &Config) -> (Status, Option<String>) {
    if uncertain && !config.force {
        (Status::Numerical, Some("warning: a rank decision is uncertain (gap ratio below 1e3); rerun with --force to accept".into()))
    } else {
        (Status::Success, None)
    }
}

pub fn run(cli: &Cli) -> Outcome {
    let config = &cli.config;
    let result = match &cli.command {
        Command::Check { orbifold } => check(orbifold, config),
        Command::Realize { orbifold, seed_name } => realize(orbifold, seed_name.as_deref(), config),
        Command::Dim { orbifold, seed_name } => dim(orbifold, seed_name.as_deref(), config),
        Command::Cartan { matrix, n } => cartan(matrix, *n, config),
        Command::Curve { family, bounds, res } => curve(family, bounds, *res, config),
        Command::Stats { polytope, d, mode, samples } => stats(polytope, d, *mode, *samples, config),
    };
    result.unwrap_or_else(|outcome| outcome)
}

fn check(spec: &str, config: &Config) -> Result<Outcome, Outcome> {
    let loaded = load_orbifold(spec)?;
    let q = &loaded.orbifold;
    let counts = q.counts();
    let weak = q.weak_order_combinatorial();
    // Tetrahedra fall outside the angle conditions; their Gram matrix decides.
    let (andreev, passed, basis) = if q.dim() == 3 {
        let report = q.andreev_necessary_check().map_err(|e| core_failure("angle conditions", e))?;
        if report.is_tetrahedron {
            let lorentzian = lorentz::realize_simplex(q, Settings::new(config).newton.checks).is_ok();
            (to_json(&report), lorentzian && report.vertex_violations.is_empty(), "gram_matrix_signature")
        } else {
            (to_json(&report), report.passed(), "angle_conditions")
        }
    } else {
        let lorentzian = lorentz::realize(q, None, Settings::new(config).newton).is_ok();
        (Value::String("only defined for three-dimensional orbifolds".into()), lorentzian, "gram_matrix_signature")
    };
    let report = json!({
        "command": "check",
        "input": input_json(&loaded),
        "config": config_json(config),
        "indexing": INDEXING_NOTE,
        "counts": to_json(&counts),
        "delta": counts.delta,
        "formula_dimension": counts.formula_dimension(),
        "naive_dimension": counts.naive_dimension(),
        "truncation": to_json(&q.polytope().is_truncation_polytope()),
        "weakly_orderable": weak.is_ordered(),
        "weak_order": to_json(&weak),
        "valid": passed,
        "validity_basis": basis,
        "andreev": andreev,
    });
    let status = if passed { Status::Success } else { Status::Validation };
    Ok(Outcome::report(render_json(&report), status))
}

fn realize_loaded(
    loaded: &LoadedOrbifold,
    seed_name: Option<&str>,
    settings: &Settings,
) -> Result<(HyperbolicRealization, Value), Outcome> {
    let q = &loaded.orbifold;
    let seed = seed_name.map(str::to_string).or_else(|| loaded.seed.clone());
    let planes = match &seed {
        Some(name) => Some(seeds::named(name).ok_or_else(|| {
            Outcome::failure(
                Status::Validation,
                format!("error: unknown seed polytope {name:?} (known: {})", seeds::SEED_NAMES.join(", ")),
            )
        })?),
        None => None,
    };
    let complete = lorentz::gram_matrix(q).is_complete();
    let r = lorentz::realize(q, planes.as_deref(), settings.newton).map_err(|e| core_failure("realization", e))?;
    let method = if complete {
        json!({ "kind": "gram_matrix" })
    } else {
        json!({ "kind": "continuation", "seed_polytope": seed })
    };
    Ok((r, method))
}

fn realize(spec: &str, seed_name: Option<&str>, config: &Config) -> Result<Outcome, Outcome> {
    let loaded = load_orbifold(spec)?;
    let settings = Settings::new(config);
    let (r, method) = realize_loaded(&loaded, seed_name, &settings)?;
    let gram = r.gram();
    let gram_rows: Vec<Vec<f64>> = gram.row_iter().map(|row| row.iter().copied().collect()).collect();
    let report = json!({
        "command": "realize",
        "input": input_json(&loaded),
        "config": config_json(config),
        "indexing": INDEXING_NOTE,
        "method": method,
        "vertices_ok": r.vertex_flags.iter().all(|v| v.ok()),
        "realization": to_json(&r),
        "gram": to_json(&gram_rows),
    });
    Ok(Outcome::report(render_json(&report), Status::Success))
}

fn dim(spec: &str, seed_name: Option<&str>, config: &Config) -> Result<Outcome, Outcome> {
    let loaded = load_orbifold(spec)?;
    let q = &loaded.orbifold;
    let settings = Settings::new(config);
    let (r, method) = realize_loaded(&loaded, seed_name, &settings)?;
    let p = hyperbolic_point(&r);
    let membership = check_u_membership(q, &p, settings.policy).map_err(|e| core_failure("domain check", e))?;
    let psi = numerical_rank(&psi_jacobian(q, &r.normals).map_err(|e| core_failure("hyperbolic Jacobian", e))?, settings.policy);
    let rank_sum = check_rank_sum(q, &p, settings.policy, settings.zero_tol).map_err(|e| core_failure("rank comparison", e))?;
    let deformation = local_deformation_dimension(q, &p, settings.policy, settings.zero_tol)
        .map_err(|e| core_failure("deformation dimension", e))?;
    let uncertain = psi.uncertain || rank_sum.uncertain || deformation.phi.uncertain;
    let report = json!({
        "command": "dim",
        "input": input_json(&loaded),
        "config": config_json(config),
        "indexing": INDEXING_NOTE,
        "method": method,
        "realization_residual": r.residual,
        "summary": {
            "dimension": deformation.dimension,
            "dimension_is_upper_bound": !deformation.full_rank,
            "formula_dimension": deformation.formula_dimension,
            "agrees_with_formula": deformation.agrees_with_formula,
            "rank_phi": deformation.phi.rank,
            "equations": deformation.counts.equations,
            "full_rank": deformation.full_rank,
            "rank_psi": psi.rank,
            "kernel_psi": psi.kernel_dim(),
            "e2": deformation.counts.e2,
            "rank_sum_holds": rank_sum.holds,
            "weakly_orderable": rank_sum.weakly_orderable,
            "in_domain": membership.passed(),
            "rank_uncertain": uncertain,
        },
        "psi": to_json(&psi),
        "rank_sum": to_json(&rank_sum),
        "deformation": to_json(&deformation),
        "domain": to_json(&membership),
    });
    let (status, warning) = rank_status(uncertain, config);
    let outcome = Outcome::report(render_json(&report), status);
    Ok(match warning {
        Some(w) => outcome.note(w),
        None => outcome,
    })
}

fn cartan(spec: &str, n: Option<usize>, config: &Config) -> Result<Outcome, Outcome> {
    let settings = Settings::new(config);
    let tol = CartanTolerance::default();
    let (source, a, n_hint) = if std::path::Path::new(spec).is_file() || spec.ends_with(".json") {
        let input = load_matrix(spec)?;
        let a = CartanMatrix::from_rows(&input.rows)
            .and_then(|a| if input.orders.is_empty() { Ok(a) } else { a.with_pairs(&input.orders) })
            .map_err(|e| Outcome::failure(Status::Validation, format!("{}: semantic error at /: {e}", input.source)))?;
        (json!({ "source": input.source }), a, input.n)
    } else {
        let loaded = load_orbifold(spec)?;
        let (r, _) = realize_loaded(&loaded, None, &settings)?;
        let p = hyperbolic_point(&r);
        let a = CartanMatrix::new(p.cartan())
            .and_then(|a| a.with_orbifold(&loaded.orbifold))
            .map_err(|e| core_failure("Cartan matrix", e))?;
        (input_json(&loaded), a, Some(loaded.orbifold.dim()))
    };
    let rank = numerical_rank(a.entries(), settings.policy);
    let n = n.or(n_hint).unwrap_or(rank.rank.saturating_sub(1));
    let conditions = check_vinberg_conditions(&a, tol);
    let classification = classify_group(&a, n, tol, settings.policy);
    let normal_form = match diagonal_normalize(&a, tol) {
        Ok(nf) => to_json(&nf),
        Err(e) => json!({ "error": e.to_string() }),
    };
    let factorization = match realize_point_from_cartan(&a, n, tol, settings.policy) {
        Ok(p) => {
            let error = (p.cartan() - a.entries()).amax();
            json!({ "point": to_json(&p), "reconstruction_error": error })
        }
        Err(e) => json!({ "error": e.to_string() }),
    };
    let report = json!({
        "command": "cartan",
        "input": source,
        "config": config_json(config),
        "indexing": INDEXING_NOTE,
        "n": n,
        "matrix": to_json(&a.rows()),
        "conditions_passed": conditions.passed(),
        "conditions": to_json(&conditions),
        "classification": to_json(&classification),
        "normal_form": normal_form,
        "factorization": to_json(&factorization),
    });
    let text = render_json(&report);
    if !conditions.passed() {
        return Ok(Outcome::report(text, Status::Validation));
    }
    let (status, warning) = rank_status(classification.rank.uncertain, config);
    let outcome = Outcome::report(text, status);
    Ok(match warning {
        Some(w) => outcome.note(w),
        None => outcome,
    })
}

fn csv_banner(command: &str, config: &Config) -> String {
    format!("# coxdeform {command} tol={:e} rank_tol={:e} seed={}\n", config.tol, config.rank_tol, config.seed)
}

fn curve(family: &str, bounds: &[f64], res: usize, config: &Config) -> Result<Outcome, Outcome> {
    if family != "esselmann" {
        return Err(Outcome::failure(Status::Validation, format!("error: unknown family {family:?}; only esselmann is available")));
    }
    let grid = Grid::new((bounds[0], bounds[1]), (bounds[2], bounds[3]), res, res)
        .map_err(|e| core_failure("grid", e))?;
    let curve = family_curve(&esselmann_family(), grid).map_err(|e| core_failure("curve", e))?;
    let text = match config.format.unwrap_or(Format::Csv) {
        Format::Csv => csv_banner("curve esselmann", config) + &curve.to_csv(),
        Format::Json => {
            let (gx, gy) = esselmann_quintic_gradient(1.0, 1.0);
            let report = json!({
                "command": "curve",
                "family": family,
                "config": config_json(config),
                "parameters": "x = -a(0,3), y = -a(3,5) after diagonal normalization along the path 0-1-2-3-4-5",
                "singular_point": { "x": 1.0, "y": 1.0, "value": esselmann_quintic(1.0, 1.0), "gradient": [gx, gy] },
                "curve": to_json(&curve),
            });
            render_json(&report)
        }
    };
    Ok(Outcome::report(text, Status::Success))
}

fn stats(spec: &str, ds: &[u32], mode: Mode, samples: usize, config: &Config) -> Result<Outcome, Outcome> {
    let (source, p) = load_polytope(spec)?;
    let sampling = match mode {
        Mode::Exact => SamplingMode::Exact,
        Mode::Montecarlo => SamplingMode::MonteCarlo { samples, seed: config.seed },
    };
    let mut rows = Vec::new();
    let mut results = Vec::new();
    for &d in ds {
        let s = estimate_wo_fraction(&p, d, sampling).map_err(|e| core_failure(&format!("d = {d}"), e))?;
        let (lo, hi) = s.interval.unwrap_or((s.fraction, s.fraction));
        let acceptance = s.sampled.as_ref().map(|c| c.samples as f64 / c.draws.max(1) as f64);
        rows.push(format!("{d},{},{},{}", fmt12(s.fraction), fmt12(lo), fmt12(hi)));
        results.push(json!({
            "d": d,
            "fraction": s.fraction,
            "ci_low": lo,
            "ci_high": hi,
            "acceptance_rate": acceptance,
            "stats": to_json(&s),
        }));
    }
    let text = match config.format.unwrap_or(Format::Json) {
        Format::Csv => csv_banner(&format!("stats {spec}"), config) + "d,fraction,ci_low,ci_high\n" + &rows.join("\n") + "\n",
        Format::Json => render_json(&json!({
            "command": "stats",
            "polytope": source,
            "config": config_json(config),
            "mode": match mode { Mode::Exact => "exact", Mode::Montecarlo => "montecarlo" },
            "samples": if mode == Mode::Exact { Value::Null } else { json!(samples) },
            "counting": "labeled assignments: order assignments that differ by a symmetry of the polytope are counted separately",
            "validity": "an assignment is valid when every vertex group is finite and every prismatic 3- and 4-circuit has angle sum below pi",
            "interval": "95% Wilson score interval",
            "results": to_json(&results),
        })),
    };
    Ok(Outcome::report(text, Status::Success))
}
