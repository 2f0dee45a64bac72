use serde::{Deserialize, Serialize};

use super::integral::{classify_divergence, ClassifyOptions, Divergence, DivergenceReport};
use super::phi::{calderon_check, CalderonReport, CalderonVerdict, PhiSpec};
use crate::error::{Error, Result};
use crate::fields::{fmo_classify, DilatationExponent, FmoOptions, FmoReport, FmoVerdict, QField};
use crate::maps::MapSpec;

/// What the criterion is applied to.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Subject {
    /// A map; its majorant is `Q = K_I(., f)`.
    Map(MapSpec),
    /// A majorant field for an unspecified map.
    Field(QField),
}

/// Declared topological hypotheses; `None` means not supplied.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Hypotheses {
    #[serde(default)]
    pub bounded: Option<bool>,
    #[serde(default)]
    pub open_discrete_closed: Option<bool>,
    #[serde(default)]
    pub limit_sets_disjoint: Option<bool>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum HypothesisSource {
    Declared,
    MapMetadata,
    Missing,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct HypothesisCheck {
    pub name: String,
    pub value: Option<bool>,
    pub source: HypothesisSource,
}

/// Which sufficient condition on the majorant to try.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Route {
    /// Divergence of the criterion integral.
    #[default]
    DivergentIntegral,
    /// Finite mean oscillation of the majorant at the puncture.
    FiniteMeanOscillation,
    /// Either of the two.
    Either,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Conclusion {
    /// All hypotheses hold and the majorant condition is met.
    Extendable,
    /// Some hypothesis or the majorant condition fails; the sufficient
    /// condition says nothing.
    NotEstablished,
    /// A hypothesis flag was not supplied.
    IncompleteInput,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CriterionReport {
    pub n: usize,
    pub route: Route,
    pub divergence: DivergenceReport,
    pub fmo: Option<FmoReport>,
    /// `None` in the plane, where no growth condition on `phi` is needed.
    pub calderon: Option<CalderonReport>,
    pub hypotheses: Vec<HypothesisCheck>,
    pub conclusion: Conclusion,
    /// Continuous extendability known independently (radial maps only).
    pub ground_truth: Option<bool>,
    /// False only when the conclusion contradicts the ground truth.
    pub agreement: Option<bool>,
    pub notes: Vec<String>,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct VerdictOptions {
    pub route: Route,
    pub classify: ClassifyOptions,
    pub fmo: FmoOptions,
}

impl Default for VerdictOptions {
    fn default() -> Self {
        Self {
            route: Route::DivergentIntegral,
            classify: ClassifyOptions::default(),
            fmo: FmoOptions::default(),
        }
    }
}

fn hypothesis(name: &str, declared: Option<bool>, from_map: Option<bool>) -> HypothesisCheck {
    let (value, source) = match (declared, from_map) {
        (Some(v), _) => (Some(v), HypothesisSource::Declared),
        (None, Some(v)) => (Some(v), HypothesisSource::MapMetadata),
        (None, None) => (None, HypothesisSource::Missing),
    };
    HypothesisCheck {
        name: name.to_string(),
        value,
        source,
    }
}

/// Applies the removability criterion to a map or majorant field.
pub fn removability_verdict(
    subject: &Subject,
    phi: &PhiSpec,
    n: usize,
    declared: Hypotheses,
    opts: &VerdictOptions,
) -> Result<CriterionReport> {
    let (field, metadata, radial_map) = match subject {
        Subject::Map(map) => {
            map.validate()?;
            if map.dim() != n {
                return Err(Error::DimensionMismatch {
                    expected: map.dim(),
                    got: n,
                });
            }
            let field = QField::FromMap {
                map: Box::new(map.clone()),
                exponent: DilatationExponent::One,
                multiplicity: 1,
            };
            let radial = matches!(map, MapSpec::Radial { .. }).then_some(map);
            (field, Some(map.metadata()), radial)
        }
        Subject::Field(q) => {
            q.validate()?;
            q.check_dim(n)?;
            (q.clone(), None, None)
        }
    };
    let mut notes = Vec::new();

    let calderon = if n >= 3 { Some(calderon_check(phi, n)?) } else { None };
    let hypotheses = vec![
        hypothesis("bounded", declared.bounded, metadata.map(|m| m.bounded)),
        hypothesis(
            "open_discrete_closed",
            declared.open_discrete_closed,
            metadata.map(|m| m.open_discrete_closed),
        ),
        hypothesis(
            "limit_sets_disjoint",
            declared.limit_sets_disjoint,
            metadata.map(|m| m.limit_sets_disjoint),
        ),
    ];

    let divergence = classify_divergence(&field, n, &opts.classify)?;
    let fmo = match opts.route {
        Route::DivergentIntegral => None,
        Route::FiniteMeanOscillation | Route::Either => Some(fmo_classify(&field, &vec![0.0; n], &opts.fmo)?),
    };
    let diverges = divergence.verdict == Divergence::Diverges;
    let fmo_holds = fmo.as_ref().is_some_and(|f| f.verdict == FmoVerdict::Fmo);
    let majorant_ok = match opts.route {
        Route::DivergentIntegral => diverges,
        Route::FiniteMeanOscillation => fmo_holds,
        Route::Either => diverges || fmo_holds,
    };
    let calderon_ok = calderon.as_ref().is_none_or(|c| c.verdict == CalderonVerdict::Holds);

    let conclusion = if hypotheses.iter().any(|h| h.value.is_none()) {
        notes.push("hypothesis flags missing; no conclusion drawn".to_string());
        Conclusion::IncompleteInput
    } else if hypotheses.iter().all(|h| h.value == Some(true)) && calderon_ok && majorant_ok {
        Conclusion::Extendable
    } else {
        if !calderon_ok {
            notes.push("phi does not satisfy the growth condition".to_string());
        }
        if !majorant_ok {
            notes.push("majorant condition not met".to_string());
        }
        if hypotheses.iter().any(|h| h.value == Some(false)) {
            notes.push("a topological hypothesis fails".to_string());
        }
        Conclusion::NotEstablished
    };

    let ground_truth = match radial_map {
        Some(map) => Some(map.extendable_ground_truth()?),
        None => None,
    };
    let agreement = ground_truth.map(|gt| conclusion != Conclusion::Extendable || gt);
    if ground_truth == Some(false) && conclusion == Conclusion::NotEstablished && !majorant_ok {
        notes.push("map does not extend although its dilatation is controlled: sharpness example".to_string());
    }
    Ok(CriterionReport {
        n,
        route: opts.route,
        divergence,
        fmo,
        calderon,
        hypotheses,
        conclusion,
        ground_truth,
        agreement,
        notes,
    })
}
