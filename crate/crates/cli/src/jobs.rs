use serde_json::{json, Value};

use puncture_core::criterion::{
    classify_divergence, removability_verdict, ClassifyOptions, DivergenceReport, Subject, VerdictOptions,
};
use puncture_core::differential::{dilatation_samples, JacobianMethod};
use puncture_core::fields::{fmo_classify, DilatationExponent, FmoOptions, QField};
use puncture_core::maps::MapSpec;
use puncture_core::modulus::{
    duality_report, image_sphere_family_modulus, lower_q_check_radial, ring_quantities,
    variational_radial_modulus_oracle,
};
use puncture_core::Method;

use crate::config::{Command, JobConfig};
use crate::error::CliError;
use crate::report::{csv_text, fmt_float, ReportBundle, Tagged, Trace};
use crate::suite::run_suite_with;

pub const EXPONENT_NOTE: &str =
    "the criterion integral uses q^(1/(n-1)) throughout, consistent with the sphere-norm lower bound";

/// Runs one job and assembles its report.
pub fn run_job(cfg: &JobConfig) -> Result<ReportBundle, CliError> {
    cfg.validate()?;
    match cfg.command {
        Command::Analyze => analyze(cfg),
        Command::Criterion => criterion(cfg),
        Command::Fmo => fmo(cfg),
        Command::Modulus => modulus(cfg),
        Command::Reproduce => run_suite_with(cfg.n, &cfg.options),
    }
}

fn subject_field(subject: &Subject) -> QField {
    match subject {
        Subject::Map(map) => QField::FromMap {
            map: Box::new(map.clone()),
            exponent: DilatationExponent::One,
            multiplicity: 1,
        },
        Subject::Field(q) => q.clone(),
    }
}

fn analyze(cfg: &JobConfig) -> Result<ReportBundle, CliError> {
    let Some(Subject::Map(map)) = &cfg.subject else {
        unreachable!("validated")
    };
    map.validate()?;
    if map.dim() != cfg.n {
        return Err(puncture_core::Error::DimensionMismatch {
            expected: map.dim(),
            got: cfg.n,
        }
        .into());
    }
    let samples = dilatation_samples(map, &cfg.points, cfg.jacobian)?;
    let method = match cfg.jacobian {
        JacobianMethod::Analytic => Method::Symbolic,
        JacobianMethod::FiniteDifference { .. } => Method::Quadrature,
    };
    let n = cfg.n;
    let mut columns: Vec<String> = (0..n).map(|i| format!("x{i}")).collect();
    columns.extend(
        [
            "inner_dilatation",
            "jac_det_abs",
            "operator_norm",
            "min_stretch",
            "k_mu",
        ]
        .iter()
        .map(|s| s.to_string()),
    );
    let mut trace = Trace {
        name: "dilatation".into(),
        columns,
        rows: Vec::new(),
    };
    let mut rows = Vec::with_capacity(samples.len());
    for s in &samples {
        let mut row: Vec<String> = s.point.iter().map(|&v| fmt_float(v)).collect();
        row.push(fmt_float(s.inner_dilatation));
        row.push(fmt_float(s.jac_det_abs));
        row.push(fmt_float(s.operator_norm));
        row.push(fmt_float(s.min_stretch));
        row.push(s.planar.as_ref().map_or(String::new(), |p| fmt_float(p.k_mu)));
        trace.push(row);
        rows.push(json!({
            "point": s.point,
            "inner_dilatation": Tagged::new("inner_dilatation", method, s.inner_dilatation),
            "singular_values": s.singular_values,
            "jac_det_abs": s.jac_det_abs,
            "planar": s.planar.as_ref().map(|p| json!({
                "mu": [p.mu.re, p.mu.im],
                "k_mu": Tagged::new("complex_dilatation", method, p.k_mu),
            })),
        }));
    }
    let limit_set = match map {
        MapSpec::Radial { .. } => Some(serde_json::to_value(map.limit_set_at_zero()?).expect("serializable")),
        _ => None,
    };
    let max_k = samples
        .iter()
        .map(|s| s.inner_dilatation)
        .fold(f64::NEG_INFINITY, f64::max);
    let summary = vec![
        format!("analyze: {} points, n = {n}", samples.len()),
        format!("max inner dilatation: {}", fmt_float(max_k)),
    ];
    Ok(ReportBundle {
        report: json!({
            "command": "analyze",
            "n": n,
            "subject": map,
            "jacobian": cfg.jacobian,
            "metadata": map.metadata(),
            "limit_set_at_zero": limit_set,
            "samples": rows,
        }),
        traces: vec![trace],
        summary,
    })
}

fn criterion_trace_csv(div: &DivergenceReport) -> Trace {
    let mut trace = Trace::new("criterion", &["epsilon", "integral", "increment"]);
    for p in &div.trace {
        trace.push(vec![
            fmt_float(p.epsilon),
            fmt_float(p.integral),
            fmt_float(p.increment),
        ]);
    }
    trace
}

fn classify_options(cfg: &JobConfig) -> ClassifyOptions {
    ClassifyOptions {
        eps0: cfg.options.eps0,
        decades: cfg.options.eps_decades,
        ..ClassifyOptions::default()
    }
}

fn fmo_options(cfg: &JobConfig) -> FmoOptions {
    FmoOptions {
        steps: cfg.options.fmo_steps,
        order: cfg.options.quad_order,
        ..FmoOptions::default()
    }
}

fn criterion(cfg: &JobConfig) -> Result<ReportBundle, CliError> {
    let subject = cfg.subject.as_ref().expect("validated");
    let n = cfg.n;
    match &cfg.phi {
        None => {
            let q = subject_field(subject);
            q.validate()?;
            let div = classify_divergence(&q, n, &classify_options(cfg))?;
            let summary = vec![format!("criterion integral: {:?} ({:?})", div.verdict, div.method)];
            Ok(ReportBundle {
                report: json!({
                    "command": "criterion",
                    "n": n,
                    "subject": subject,
                    "operation": "classify_divergence",
                    "divergence": div,
                    "notes": [EXPONENT_NOTE],
                }),
                traces: vec![criterion_trace_csv(&div)],
                summary,
            })
        }
        Some(phi) => {
            let opts = VerdictOptions {
                route: cfg.route,
                classify: classify_options(cfg),
                fmo: fmo_options(cfg),
            };
            let rep = removability_verdict(subject, phi, n, cfg.hypotheses, &opts)?;
            let mut traces = vec![criterion_trace_csv(&rep.divergence)];
            if let Some(f) = &rep.fmo {
                traces.push(fmo_trace_csv(&f.trace));
            }
            let summary = vec![
                format!(
                    "criterion integral: {:?} ({:?})",
                    rep.divergence.verdict, rep.divergence.method
                ),
                format!("conclusion: {:?}", rep.conclusion),
            ];
            Ok(ReportBundle {
                report: json!({
                    "command": "criterion",
                    "n": n,
                    "subject": subject,
                    "phi": phi,
                    "operation": "removability_verdict",
                    "report": rep,
                    "notes": [EXPONENT_NOTE],
                }),
                traces,
                summary,
            })
        }
    }
}

fn fmo_trace_csv(points: &[puncture_core::fields::FmoTracePoint]) -> Trace {
    let mut trace = Trace::new("fmo", &["epsilon", "oscillation"]);
    for p in points {
        trace.push(vec![fmt_float(p.epsilon), fmt_float(p.oscillation)]);
    }
    trace
}

fn fmo(cfg: &JobConfig) -> Result<ReportBundle, CliError> {
    let subject = cfg.subject.as_ref().expect("validated");
    let q = subject_field(subject);
    q.validate()?;
    let center = cfg.center.clone().unwrap_or_else(|| vec![0.0; cfg.n]);
    if center.len() != cfg.n {
        return Err(puncture_core::Error::DimensionMismatch {
            expected: cfg.n,
            got: center.len(),
        }
        .into());
    }
    let rep = fmo_classify(&q, &center, &fmo_options(cfg))?;
    let summary = vec![format!("mean oscillation: {:?}", rep.verdict)];
    Ok(ReportBundle {
        report: json!({
            "command": "fmo",
            "n": cfg.n,
            "subject": subject,
            "center": center,
            "operation": "fmo_classify",
            "method": Method::Quadrature,
            "report": rep,
        }),
        traces: vec![fmo_trace_csv(&rep.trace)],
        summary,
    })
}

fn modulus(cfg: &JobConfig) -> Result<ReportBundle, CliError> {
    let ring = cfg.ring.expect("validated");
    let n = cfg.n;
    let q = ring_quantities(ring.r1, ring.r2, n)?;
    let duality = duality_report(ring.r1, ring.r2, n)?;
    let oracle = variational_radial_modulus_oracle(ring.r1, ring.r2, n, cfg.options.oracle_grid)?;
    let oracle_error = (oracle.modulus - q.curve_modulus).abs() / q.curve_modulus;
    let mut report = json!({
        "command": "modulus",
        "n": n,
        "ring": ring,
        "curve_modulus": Tagged::new("ring_curve_modulus", Method::Symbolic, q.curve_modulus),
        "capacity": Tagged::new("ring_capacity", Method::Symbolic, q.capacity),
        "surface_modulus": Tagged::new("sphere_family_modulus", Method::Symbolic, q.surface_modulus),
        "duality": duality,
        "oracle": {
            "modulus": Tagged::new("variational_radial_modulus_oracle", Method::Oracle, oracle.modulus),
            "grid_size": oracle.grid_size,
            "relative_error": oracle_error,
        },
    });
    let mut summary = vec![
        format!("capacity: {}", fmt_float(q.capacity)),
        format!("surface modulus: {}", fmt_float(q.surface_modulus)),
        format!("oracle relative error: {}", fmt_float(oracle_error)),
    ];
    if let Some(Subject::Map(map @ MapSpec::Radial { .. })) = &cfg.subject {
        let image = image_sphere_family_modulus(map, ring.r1, ring.r2)?;
        let majorant = QField::FromMap {
            map: Box::new(map.clone()),
            exponent: DilatationExponent::OneOverNMinusOne,
            multiplicity: 1,
        };
        let check = lower_q_check_radial(map, &majorant, ring.r1, ring.r2)?;
        summary.push(format!("lower bound gap: {}", fmt_float(check.gap)));
        report["image_sphere_modulus"] = json!(Tagged::new("image_sphere_family_modulus", Method::Quadrature, image));
        report["lower_q_check"] = json!({
            "lhs": check.lhs,
            "rhs": check.rhs,
            "gap": check.gap,
            "holds": check.holds,
            "method": Method::Quadrature,
        });
    }
    let mut trace = Trace::new("modulus", &["quantity", "method", "value"]);
    for (name, method, value) in [
        ("curve_modulus", "symbolic", q.curve_modulus),
        ("capacity", "symbolic", q.capacity),
        ("surface_modulus", "symbolic", q.surface_modulus),
        ("oracle_modulus", "oracle", oracle.modulus),
    ] {
        trace.push(vec![csv_text(name), method.to_string(), fmt_float(value)]);
    }
    Ok(ReportBundle {
        report,
        traces: vec![trace],
        summary,
    })
}

pub(crate) fn json_value<T: serde::Serialize>(v: &T) -> Value {
    serde_json::to_value(v).expect("report types serialize")
}
