//! The fixed reproduction suite: the sharp example constructions, the model
//! fields, ring duality and the extremal weight, one pass/fail row each.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;
use serde_json::json;

use puncture_core::criterion::{
    classify_divergence, criterion_integral, removability_verdict, verify_extremality, ClassifyOptions, Conclusion,
    Divergence, ExtremalityTolerances, Hypotheses, PhiSpec, Route, Subject, VerdictOptions,
};
use puncture_core::differential::{dilatation_sample, inner_dilatation, jacobian, orlicz_energy, JacobianMethod};
use puncture_core::fields::{ball_lp_norm, fmo_classify, DilatationExponent, FmoOptions, FmoVerdict, QField};
use puncture_core::geometry::{AnnulusSpec, DEFAULT_ORDER};
use puncture_core::maps::{LimitSetDescription, MapSpec, Profile};
use puncture_core::modulus::{duality_report, ring_curve_modulus, variational_radial_modulus_oracle};
use puncture_core::{Method, Result};

use crate::config::NumericOptions;
use crate::error::CliError;
use crate::jobs::{json_value, EXPONENT_NOTE};
use crate::report::{csv_text, fmt_float, ReportBundle, Trace};

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SuiteRow {
    pub name: &'static str,
    /// The library routine the row exercises.
    pub operation: &'static str,
    pub method: Method,
    pub value: f64,
    pub reference: f64,
    pub error: f64,
    pub tolerance: f64,
    pub pass: bool,
    pub detail: String,
}

#[derive(Debug, Clone)]
struct Ctx {
    n: usize,
    order: usize,
    seed: u64,
    eps0: f64,
    decades: usize,
    fmo_steps: usize,
    oracle_grid: usize,
}

impl Ctx {
    fn rng(&self, stream: u64) -> ChaCha8Rng {
        let mut rng = ChaCha8Rng::seed_from_u64(self.seed);
        rng.set_stream(stream);
        rng
    }
}

struct Outcome {
    value: f64,
    reference: f64,
    error: f64,
    pass: bool,
    detail: String,
}

type RowFn = fn(&Ctx, f64) -> Result<Outcome>;

struct RowSpec {
    name: &'static str,
    operation: &'static str,
    method: Method,
    tolerance: f64,
    run: RowFn,
}

fn rel_err(a: f64, b: f64) -> f64 {
    (a - b).abs() / b.abs()
}

fn random_point(rng: &mut ChaCha8Rng, n: usize, rmin: f64, rmax: f64) -> Vec<f64> {
    loop {
        let v: Vec<f64> = (0..n).map(|_| rng.gen_range(-1.0..1.0)).collect();
        let len = v.iter().map(|c| c * c).sum::<f64>().sqrt();
        if len > 1e-3 && len <= 1.0 {
            let r = rng.gen_range(rmin..rmax);
            return v.iter().map(|c| c * r / len).collect();
        }
    }
}

fn all_true() -> Hypotheses {
    Hypotheses {
        bounded: Some(true),
        open_discrete_closed: Some(true),
        limit_sets_disjoint: Some(true),
    }
}

/// Closed form of the inner dilatation of the power-shift map.
pub fn power_shift_inner_dilatation(alpha: f64, r: f64, n: usize) -> f64 {
    let ra = r.powf(alpha);
    ((1.0 + ra) / (alpha * ra)).powi(n as i32 - 1)
}

const SHIFT_ALPHAS: [f64; 3] = [0.3, 0.5, 0.9];

fn power_shift_dilatation(ctx: &Ctx, tol: f64, method: JacobianMethod) -> Result<Outcome> {
    let mut worst: f64 = 0.0;
    let mut count = 0;
    for (i, &alpha) in SHIFT_ALPHAS.iter().enumerate() {
        let map = MapSpec::radial(Profile::power_shift(alpha)?, ctx.n)?;
        let mut rng = ctx.rng(100 + i as u64);
        for _ in 0..100 {
            let x = random_point(&mut rng, ctx.n, 0.01, 0.99);
            let r = x.iter().map(|c| c * c).sum::<f64>().sqrt();
            let k = inner_dilatation(&jacobian(&map, &x, method)?)?;
            worst = worst.max(rel_err(k, power_shift_inner_dilatation(alpha, r, ctx.n)));
            count += 1;
        }
    }
    Ok(Outcome {
        value: worst,
        reference: 0.0,
        error: worst,
        pass: worst <= tol,
        detail: format!("{count} points, alpha in {SHIFT_ALPHAS:?}"),
    })
}

fn shift_analytic(ctx: &Ctx, tol: f64) -> Result<Outcome> {
    power_shift_dilatation(ctx, tol, JacobianMethod::Analytic)
}

fn shift_finite_difference(ctx: &Ctx, tol: f64) -> Result<Outcome> {
    power_shift_dilatation(ctx, tol, JacobianMethod::FiniteDifference { h: None })
}

/// The dilatation of the power-shift map with exponent `alpha`, or for
/// `alpha >= 1`, where the map is not defined, its power majorant
/// `(2/alpha)^{n-1} |x|^{-alpha(n-1)}`.
pub fn power_shift_majorant(alpha: f64, n: usize) -> Result<QField> {
    if alpha < 1.0 {
        QField::from_map(
            MapSpec::radial(Profile::power_shift(alpha)?, n)?,
            DilatationExponent::One,
        )
    } else {
        QField::power_log((2.0 / alpha).powi(n as i32 - 1), alpha * (n as f64 - 1.0), 0.0)
    }
}

fn lp_threshold(ctx: &Ctx, _tol: f64) -> Result<Outcome> {
    let n = ctx.n;
    let mut correct = 0;
    let mut total = 0;
    let mut misses = Vec::new();
    for p in [1.0, 2.0, 5.0] {
        let critical = n as f64 / (p * (n as f64 - 1.0));
        for (factor, finite) in [(0.9, true), (1.1, false)] {
            let alpha = factor * critical;
            let q = power_shift_majorant(alpha, n)?;
            let norm = ball_lp_norm(&q, p, 1.0, n, ctx.order)?;
            total += 1;
            if norm.is_finite() == finite {
                correct += 1;
            } else {
                misses.push(format!("p = {p}, alpha = {alpha}"));
            }
        }
    }
    Ok(Outcome {
        value: correct as f64,
        reference: total as f64,
        error: (total - correct) as f64,
        pass: correct == total,
        detail: if misses.is_empty() {
            "finite below the threshold, infinite above".into()
        } else {
            misses.join("; ")
        },
    })
}

fn shift_limit_set(ctx: &Ctx, tol: f64) -> Result<Outcome> {
    let map = MapSpec::radial(Profile::power_shift(0.5)?, ctx.n)?;
    let (radius, detail) = match map.limit_set_at_zero()? {
        LimitSetDescription::SphereSet { radius, .. } => (radius, "sphere".to_string()),
        LimitSetDescription::SinglePoint { .. } => (0.0, "single point".to_string()),
    };
    let error = (radius - 1.0).abs();
    Ok(Outcome {
        value: radius,
        reference: 1.0,
        error,
        pass: error <= tol && !map.extendable_ground_truth()?,
        detail,
    })
}

fn shift_orlicz_bound(ctx: &Ctx, _tol: f64) -> Result<Outcome> {
    let n = ctx.n;
    let map = MapSpec::radial(Profile::power_shift(0.5)?, n)?;
    let region = AnnulusSpec::centered(n, 0.5, 0.9)?;
    let phi = PhiSpec::Power { p: n as f64 };
    let energy = orlicz_energy(&map, &region, &phi, ctx.order)?;
    // the operator norm (1 + r^alpha) / r decreases in r
    let mut x = vec![0.0; n];
    x[0] = region.r1;
    let c = dilatation_sample(&map, &x, JacobianMethod::Analytic)?.operator_norm;
    let bound = phi.eval((n as f64).sqrt() * c) * region.volume();
    Ok(Outcome {
        value: energy,
        reference: bound,
        error: energy / bound,
        pass: energy.is_finite() && energy <= bound,
        detail: "energy over A(0.5, 0.9) against phi(sqrt(n) c) m(A)".into(),
    })
}

fn exp_integral_map(n: usize) -> Result<(QField, MapSpec)> {
    let q = QField::power_log(1.0, 1.0, 0.0)?;
    let map = MapSpec::radial(Profile::exp_integral(q.clone(), n)?, n)?;
    Ok((q, map))
}

fn exp_integral_dilatation(ctx: &Ctx, tol: f64) -> Result<Outcome> {
    let (q, map) = exp_integral_map(ctx.n)?;
    let mut rng = ctx.rng(200);
    let mut worst: f64 = 0.0;
    for _ in 0..100 {
        let x = random_point(&mut rng, ctx.n, 0.01, 0.99);
        let r = x.iter().map(|c| c * c).sum::<f64>().sqrt();
        let k = inner_dilatation(&jacobian(&map, &x, JacobianMethod::Analytic)?)?;
        worst = worst.max(rel_err(k, q.radial_value(r)));
    }
    Ok(Outcome {
        value: worst,
        reference: 0.0,
        error: worst,
        pass: worst <= tol,
        detail: "q = 1/|x| at 100 points".into(),
    })
}

fn exp_integral_lower_bound(ctx: &Ctx, tol: f64) -> Result<Outcome> {
    let (_, map) = exp_integral_map(ctx.n)?;
    let majorant = QField::from_map(map.clone(), DilatationExponent::OneOverNMinusOne)?;
    let check = puncture_core::modulus::lower_q_check_radial(&map, &majorant, 0.01, 0.5)?;
    Ok(Outcome {
        value: check.lhs,
        reference: check.rhs,
        error: check.gap.abs(),
        pass: check.gap.abs() <= tol,
        detail: "image sphere modulus against its majorant bound on (0.01, 0.5)".into(),
    })
}

fn exp_integral_not_extendable(ctx: &Ctx, _tol: f64) -> Result<Outcome> {
    let (q, map) = exp_integral_map(ctx.n)?;
    let div = classify_divergence(&q, ctx.n, &ClassifyOptions::default())?;
    let radius = match map.limit_set_at_zero()? {
        LimitSetDescription::SphereSet { radius, .. } => radius,
        LimitSetDescription::SinglePoint { .. } => 0.0,
    };
    let pass = div.verdict == Divergence::Converges && !map.extendable_ground_truth()?;
    Ok(Outcome {
        value: radius,
        reference: 0.0,
        error: radius,
        pass,
        detail: format!("criterion integral {:?}, limit set radius {radius:.6}", div.verdict),
    })
}

fn log_field_closed_form(ctx: &Ctx, tol: f64) -> Result<Outcome> {
    let n = ctx.n;
    let q = QField::LogPower {
        shift: 0.0,
        power: n as f64 - 1.0,
    };
    let rq = q.radial()?;
    let mut worst: f64 = 0.0;
    for k in 2..=6 {
        let eps = 10f64.powi(-k);
        let exact = ((1.0 / eps).ln() / (1.0 / ctx.eps0).ln()).ln();
        worst = worst.max(rel_err(criterion_integral(&rq, eps, ctx.eps0, n)?, exact));
    }
    let verdict = classify_divergence(
        &QField::power_log(1.0, 0.0, n as f64 - 1.0)?,
        n,
        &ClassifyOptions::default(),
    )?
    .verdict;
    Ok(Outcome {
        value: worst,
        reference: 0.0,
        error: worst,
        pass: worst <= tol && verdict == Divergence::Diverges,
        detail: format!("eps = 1e-2 .. 1e-6, verdict {verdict:?}"),
    })
}

fn unit_field_closed_form(ctx: &Ctx, tol: f64) -> Result<Outcome> {
    let q = QField::constant(1.0)?;
    let rq = q.radial()?;
    let mut worst: f64 = 0.0;
    for k in 2..=6 {
        let eps = 10f64.powi(-k);
        worst = worst.max(rel_err(
            criterion_integral(&rq, eps, ctx.eps0, ctx.n)?,
            (ctx.eps0 / eps).ln(),
        ));
    }
    Ok(Outcome {
        value: worst,
        reference: 0.0,
        error: worst,
        pass: worst <= tol,
        detail: "eps = 1e-2 .. 1e-6".into(),
    })
}

fn verdict_options(ctx: &Ctx, route: Route) -> VerdictOptions {
    VerdictOptions {
        route,
        classify: ClassifyOptions {
            eps0: ctx.eps0,
            decades: ctx.decades,
            ..ClassifyOptions::default()
        },
        fmo: FmoOptions {
            steps: ctx.fmo_steps,
            order: ctx.order,
            ..FmoOptions::default()
        },
    }
}

fn conclusion_row(ctx: &Ctx, q: QField, route: Route) -> Result<Outcome> {
    let phi = PhiSpec::Power { p: ctx.n as f64 };
    let rep = removability_verdict(
        &Subject::Field(q),
        &phi,
        ctx.n,
        all_true(),
        &verdict_options(ctx, route),
    )?;
    let pass = rep.conclusion == Conclusion::Extendable;
    Ok(Outcome {
        value: pass as u8 as f64,
        reference: 1.0,
        error: (!pass) as u8 as f64,
        pass,
        detail: format!("conclusion {:?}", rep.conclusion),
    })
}

fn log_field_conclusion(ctx: &Ctx, _tol: f64) -> Result<Outcome> {
    conclusion_row(
        ctx,
        QField::power_log(1.0, 0.0, ctx.n as f64 - 1.0)?,
        Route::DivergentIntegral,
    )
}

fn fmo_field_conclusion(ctx: &Ctx, _tol: f64) -> Result<Outcome> {
    conclusion_row(ctx, QField::log_inverse(), Route::FiniteMeanOscillation)
}

fn fmo_options(ctx: &Ctx) -> FmoOptions {
    FmoOptions {
        steps: ctx.fmo_steps,
        order: ctx.order,
        ..FmoOptions::default()
    }
}

fn log_field_oscillation(ctx: &Ctx, tol: f64) -> Result<Outcome> {
    let n = ctx.n;
    let rep = fmo_classify(&QField::log_inverse(), &vec![0.0; n], &fmo_options(ctx))?;
    let exact = 2.0 / (n as f64 * std::f64::consts::E);
    let worst = rep
        .trace
        .iter()
        .map(|p| rel_err(p.oscillation, exact))
        .fold(0.0, f64::max);
    Ok(Outcome {
        value: rep.trace.last().map_or(f64::NAN, |p| p.oscillation),
        reference: exact,
        error: worst,
        pass: worst <= tol && rep.verdict == FmoVerdict::Fmo,
        detail: format!("verdict {:?} over {} radii", rep.verdict, rep.trace.len()),
    })
}

fn inverse_distance_not_fmo(ctx: &Ctx, _tol: f64) -> Result<Outcome> {
    let rep = fmo_classify(&QField::power_log(1.0, 1.0, 0.0)?, &vec![0.0; ctx.n], &fmo_options(ctx))?;
    let pass = rep.verdict == FmoVerdict::NotFmo;
    Ok(Outcome {
        value: rep.trace.last().map_or(f64::NAN, |p| p.oscillation),
        reference: f64::INFINITY,
        error: (!pass) as u8 as f64,
        pass,
        detail: format!("verdict {:?}", rep.verdict),
    })
}

fn ring_duality(ctx: &Ctx, tol: f64) -> Result<Outcome> {
    let mut rng = ctx.rng(300);
    let mut worst: f64 = 0.0;
    let mut exact = true;
    for _ in 0..50 {
        let r1 = rng.gen_range(1e-3..0.9);
        let r2 = rng.gen_range(r1 * 1.001..1.0);
        let rep = duality_report(r1, r2, ctx.n)?;
        exact &= rep.capacity_vs_curve == 0.0;
        worst = worst.max(rep.surface_vs_capacity);
    }
    Ok(Outcome {
        value: worst,
        reference: 0.0,
        error: worst,
        pass: exact && worst <= tol,
        detail: "50 random rings; capacity equals curve modulus exactly".into(),
    })
}

fn variational_oracle(ctx: &Ctx, tol: f64) -> Result<Outcome> {
    let (r1, r2) = (0.1, 0.9);
    let exact = ring_curve_modulus(r1, r2, ctx.n)?;
    let oracle = variational_radial_modulus_oracle(r1, r2, ctx.n, ctx.oracle_grid)?;
    let error = rel_err(oracle.modulus, exact);
    Ok(Outcome {
        value: oracle.modulus,
        reference: exact,
        error,
        pass: error <= tol,
        detail: format!("grid {}", oracle.grid_size),
    })
}

fn extremality(ctx: &Ctx, tol: f64) -> Result<Outcome> {
    let q = QField::power_log(1.0, 0.5, 1.0)?;
    let annulus = AnnulusSpec::centered(ctx.n, 0.05, 0.6)?;
    let rep = verify_extremality(
        &q,
        &annulus,
        ctx.order,
        ExtremalityTolerances {
            equality_rel: tol,
            ..ExtremalityTolerances::default()
        },
    )?;
    let others = rep.candidates.iter().all(|c| c.holds);
    Ok(Outcome {
        value: rep.at_extremal,
        reference: rep.minimal_energy,
        error: rep.equality_error,
        pass: rep.equality_holds && others,
        detail: format!("{} alternative weights do no better: {others}", rep.candidates.len()),
    })
}

const ROWS: &[RowSpec] = &[
    RowSpec {
        name: "power-shift inner dilatation, analytic Jacobian",
        operation: "inner_dilatation",
        method: Method::Symbolic,
        tolerance: 1e-10,
        run: shift_analytic,
    },
    RowSpec {
        name: "power-shift inner dilatation, finite differences",
        operation: "inner_dilatation",
        method: Method::Quadrature,
        tolerance: 1e-6,
        run: shift_finite_difference,
    },
    RowSpec {
        name: "power-shift majorant L^p threshold",
        operation: "ball_lp_norm",
        method: Method::Quadrature,
        tolerance: 0.0,
        run: lp_threshold,
    },
    RowSpec {
        name: "power-shift limit set is the unit sphere",
        operation: "limit_set_at_zero",
        method: Method::Quadrature,
        tolerance: 1e-9,
        run: shift_limit_set,
    },
    RowSpec {
        name: "power-shift Orlicz energy bound",
        operation: "orlicz_energy",
        method: Method::Quadrature,
        tolerance: 1.0,
        run: shift_orlicz_bound,
    },
    RowSpec {
        name: "exp-integral map dilatation equals q",
        operation: "inner_dilatation",
        method: Method::Quadrature,
        tolerance: 1e-6,
        run: exp_integral_dilatation,
    },
    RowSpec {
        name: "exp-integral map sphere-modulus equality",
        operation: "lower_q_check_radial",
        method: Method::Quadrature,
        tolerance: 1e-6,
        run: exp_integral_lower_bound,
    },
    RowSpec {
        name: "exp-integral map does not extend",
        operation: "extendable_ground_truth",
        method: Method::Symbolic,
        tolerance: 0.0,
        run: exp_integral_not_extendable,
    },
    RowSpec {
        name: "unit field criterion integral closed form",
        operation: "criterion_integral",
        method: Method::Quadrature,
        tolerance: 1e-8,
        run: unit_field_closed_form,
    },
    RowSpec {
        name: "log^(n-1) field criterion integral diverges",
        operation: "criterion_integral",
        method: Method::Quadrature,
        tolerance: 1e-8,
        run: log_field_closed_form,
    },
    RowSpec {
        name: "log^(n-1) field removability verdict",
        operation: "removability_verdict",
        method: Method::Symbolic,
        tolerance: 0.0,
        run: log_field_conclusion,
    },
    RowSpec {
        name: "log field mean oscillation is constant",
        operation: "fmo_classify",
        method: Method::Quadrature,
        tolerance: 0.05,
        run: log_field_oscillation,
    },
    RowSpec {
        name: "log field removability via mean oscillation",
        operation: "removability_verdict",
        method: Method::Quadrature,
        tolerance: 0.0,
        run: fmo_field_conclusion,
    },
    RowSpec {
        name: "inverse-distance field is not FMO",
        operation: "fmo_classify",
        method: Method::Quadrature,
        tolerance: 0.0,
        run: inverse_distance_not_fmo,
    },
    RowSpec {
        name: "ring capacity and modulus duality",
        operation: "duality_report",
        method: Method::Symbolic,
        tolerance: 1e-12,
        run: ring_duality,
    },
    RowSpec {
        name: "variational modulus oracle",
        operation: "variational_radial_modulus_oracle",
        method: Method::Oracle,
        tolerance: 0.01,
        run: variational_oracle,
    },
    RowSpec {
        name: "extremal weight attains the ring energy bound",
        operation: "verify_extremality",
        method: Method::Quadrature,
        tolerance: 1e-6,
        run: extremality,
    },
];

fn run_row(spec: &RowSpec, ctx: &Ctx) -> SuiteRow {
    let outcome = (spec.run)(ctx, spec.tolerance).unwrap_or_else(|e| Outcome {
        value: f64::NAN,
        reference: f64::NAN,
        error: f64::NAN,
        pass: false,
        detail: format!("error: {e}"),
    });
    SuiteRow {
        name: spec.name,
        operation: spec.operation,
        method: spec.method,
        value: outcome.value,
        reference: outcome.reference,
        error: outcome.error,
        tolerance: spec.tolerance,
        pass: outcome.pass,
        detail: outcome.detail,
    }
}

/// Runs the suite with default options on `workers` threads.
pub fn run_suite(n: usize, workers: Option<usize>) -> std::result::Result<ReportBundle, CliError> {
    run_suite_with(
        n,
        &NumericOptions {
            workers,
            ..NumericOptions::default()
        },
    )
}

pub fn run_suite_with(n: usize, opts: &NumericOptions) -> std::result::Result<ReportBundle, CliError> {
    puncture_core::geometry::Dimension::new(n)?;
    let ctx = Ctx {
        n,
        order: if opts.quad_order == 0 {
            DEFAULT_ORDER
        } else {
            opts.quad_order
        },
        seed: opts.seed,
        eps0: opts.eps0,
        decades: opts.eps_decades,
        fmo_steps: opts.fmo_steps,
        oracle_grid: opts.oracle_grid,
    };
    let run = || ROWS.par_iter().map(|spec| run_row(spec, &ctx)).collect::<Vec<_>>();
    let rows = match opts.workers {
        Some(w) => rayon::ThreadPoolBuilder::new()
            .num_threads(w)
            .build()
            .map_err(|e| CliError::Schema(format!("cannot start {w} workers: {e}")))?
            .install(run),
        None => run(),
    };

    let mut trace = Trace::new(
        "suite",
        &[
            "name",
            "operation",
            "method",
            "value",
            "reference",
            "error",
            "tolerance",
            "pass",
        ],
    );
    let mut summary = Vec::with_capacity(rows.len() + 1);
    for row in &rows {
        trace.push(vec![
            csv_text(row.name),
            row.operation.to_string(),
            json_value(&row.method).as_str().unwrap_or_default().to_string(),
            fmt_float(row.value),
            fmt_float(row.reference),
            fmt_float(row.error),
            fmt_float(row.tolerance),
            row.pass.to_string(),
        ]);
        summary.push(format!(
            "{:<50} {}  error {:.3e}",
            row.name,
            if row.pass { "pass" } else { "FAIL" },
            row.error
        ));
    }
    let passed = rows.iter().filter(|r| r.pass).count();
    summary.push(format!("{passed}/{} rows pass", rows.len()));
    let json_rows: Vec<_> = rows
        .iter()
        .map(|r| {
            json!({
                "name": r.name,
                "operation": r.operation,
                "method": r.method,
                "value": fmt_float(r.value),
                "reference": fmt_float(r.reference),
                "error": fmt_float(r.error),
                "tolerance": r.tolerance,
                "pass": r.pass,
                "detail": r.detail,
            })
        })
        .collect();
    Ok(ReportBundle {
        report: json!({
            "command": "reproduce",
            "n": n,
            "seed": opts.seed,
            "passed": passed,
            "total": rows.len(),
            "rows": json_rows,
            "notes": [EXPONENT_NOTE],
        }),
        traces: vec![trace],
        summary,
    })
}
