//! End-to-end identification: structure, estimation and steady-state check.

use crate::analysis::{
    build_continuum_constraint, check_assumption, steady_state_analyze, SteadyStateReport,
};
use crate::compensation::{shift_for_inverse, smooth_quadratic};
use crate::error::{Error, Result};
use crate::estimation::{
    aic_choose_size, constrained_least_squares_named, frols_select, EqualityConstraint,
    SelectionReport,
};
use crate::narx::{
    build_regressor_matrix, generate_term_pool, infer_meta, ExclusionRules, ModelMeta, NarxModel,
    Signal, Term,
};
use crate::scalar::Scalar;

/// How many of the ranked terms to keep.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum SizeRule {
    Aic,
    Fixed(usize),
}

#[derive(Clone, Debug, PartialEq)]
pub enum StructureChoice {
    /// Rank a generated pool by error reduction ratio.
    Select {
        ell: u32,
        n_y: usize,
        n_u: usize,
        exclusions: ExclusionRules,
        max_terms: usize,
        size: SizeRule,
    },
    /// Use the given terms as they are.
    Fixed(Vec<Term>),
}

#[derive(Clone, Debug, PartialEq)]
pub struct IdentifyOptions {
    pub structure: StructureChoice,
    /// Impose a sum of one on the linear output parameters.
    pub continuum_constraint: bool,
    pub tau_d: usize,
    /// Tolerance on the output-parameter sum when classifying steady states.
    pub steady_tol: f64,
}

#[derive(Clone, Debug, PartialEq)]
pub struct Identification<T> {
    pub model: NarxModel<T>,
    pub report: Option<SelectionReport>,
    pub condition: f64,
    pub warnings: Vec<String>,
    /// `None` when the structure falls outside the steady-state assumptions;
    /// the reason is in `warnings`.
    pub steady: Option<SteadyStateReport<T>>,
}

/// Identifies `y` from `u`: chooses the structure, estimates the parameters
/// and classifies the steady-state behavior of the result.
pub fn identify<T: Scalar>(
    u: &Signal<T>,
    y: &Signal<T>,
    opts: &IdentifyOptions,
) -> Result<Identification<T>> {
    let mut warnings = Vec::new();
    let (terms, report) = match &opts.structure {
        StructureChoice::Fixed(terms) => (terms.clone(), None),
        StructureChoice::Select {
            ell,
            n_y,
            n_u,
            exclusions,
            max_terms,
            size,
        } => {
            let pool = generate_term_pool(*ell, *n_y, *n_u, exclusions)?;
            let mut report = frols_select(&pool, u, y, *max_terms)?;
            let n = match size {
                SizeRule::Fixed(n) => (*n).min(report.steps.len()),
                SizeRule::Aic => {
                    let choice = aic_choose_size(&report, u, y)?;
                    report.attach_aic(&choice);
                    warnings.extend(choice.warning.clone());
                    choice.size
                }
            };
            report.chosen_size = Some(n);
            (report.leading_terms(n), Some(report))
        }
    };
    if terms.is_empty() {
        return Err(Error::InvalidArgument("model structure is empty".into()));
    }
    let reg = build_regressor_matrix(&terms, u, y)?;
    let names: Vec<String> = terms.iter().map(Term::to_string).collect();
    let constraint = if opts.continuum_constraint {
        build_continuum_constraint(&terms)?
    } else {
        EqualityConstraint::empty(terms.len())
    };
    let est = constrained_least_squares_named(&reg.psi, &reg.target, &constraint, Some(&names))?;
    warnings.extend(est.warnings.iter().cloned());
    let inferred = infer_meta(&terms, y.sample_time());
    let meta = ModelMeta {
        tau_d: inferred.tau_d.max(opts.tau_d),
        ..inferred
    };
    let model = NarxModel::new(terms, est.theta, meta)?;
    let steady = match check_assumption(model.terms()) {
        Ok(()) => Some(steady_state_analyze(&model, opts.steady_tol)?),
        Err(e) => {
            warnings.push(format!("steady-state analysis skipped: {e}"));
            None
        }
    };
    Ok(Identification {
        model,
        report,
        condition: est.condition,
        warnings,
        steady,
    })
}

/// Identifies the inverse model: the plant output, optionally smoothed and
/// advanced by `tau_s` samples, drives a model whose output is the plant
/// input.
pub fn identify_inverse<T: Scalar>(
    u: &Signal<T>,
    y: &Signal<T>,
    tau_s: usize,
    smoothing_window: Option<usize>,
    opts: &IdentifyOptions,
) -> Result<Identification<T>> {
    let smoothed;
    let y = match smoothing_window {
        Some(w) => {
            smoothed = smooth_quadratic(y, w)?;
            &smoothed
        }
        None => y,
    };
    let (input, target) = shift_for_inverse(u, y, tau_s, opts.tau_d)?;
    let mut id = identify(&input, &target, opts)?;
    id.model = id.model.with_tau_s(tau_s);
    Ok(id)
}
