use std::fmt;

use crate::error::{Error, Result};
use crate::estimation::EqualityConstraint;
use crate::linalg::Matrix;
use crate::narx::model::NarxModel;
use crate::narx::pool::ExclusionRules;
use crate::narx::term::Term;
use crate::scalar::Scalar;

/// Default tolerance on `|sigma_y - 1|` for a continuum of equilibria.
pub const DEFAULT_TOL_EQ: f64 = 1e-9;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SteadyState {
    /// `|sigma_y| < 1`: one equilibrium per constant input.
    SingleFixedPoint,
    /// `sigma_y = 1`: every output level is an equilibrium.
    Continuum,
    /// `|sigma_y| > 1`.
    Diverging,
    /// `sigma_y = -1`: neither convergent nor a continuum.
    Marginal,
}

impl fmt::Display for SteadyState {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            SteadyState::SingleFixedPoint => "single-fixed-point",
            SteadyState::Continuum => "continuum",
            SteadyState::Diverging => "diverging",
            SteadyState::Marginal => "marginal",
        })
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SteadyStateReport<T> {
    pub sigma_y: T,
    pub classification: SteadyState,
}

fn is_linear_output(term: &Term) -> bool {
    term.linear_output_lag().is_some()
}

/// Sum of the parameters of the terms that are a single `y[k-j]`.
pub fn sum_linear_output_params<T: Scalar>(model: &NarxModel<T>) -> T {
    model
        .iter()
        .filter(|(t, _)| is_linear_output(t))
        .fold(T::zero(), |acc, (_, th)| acc + th)
}

/// `S theta = 1` with ones at the linear output terms, which forces the sum
/// of their parameters to one.
pub fn build_continuum_constraint<T: Scalar>(structure: &[Term]) -> Result<EqualityConstraint<T>> {
    let row: Vec<T> = structure
        .iter()
        .map(|t| {
            if is_linear_output(t) {
                T::one()
            } else {
                T::zero()
            }
        })
        .collect();
    if row.iter().all(|&x| x == T::zero()) {
        return Err(Error::structural(
            "structure has no linear output term; the continuum constraint does not apply",
            structure.iter().map(Term::to_string).collect(),
        ));
    }
    EqualityConstraint::new(Matrix::from_rows(&[row]), vec![T::one()])
}

/// Errors with the offending terms if the structure contains regressors
/// that break the continuum-of-equilibria assumptions.
pub fn check_assumption(terms: &[Term]) -> Result<()> {
    let offending = ExclusionRules::full().offending(terms);
    if offending.is_empty() {
        Ok(())
    } else {
        Err(Error::structural(
            "model violates the structural assumptions for steady-state analysis",
            offending,
        ))
    }
}

pub fn steady_state_analyze<T: Scalar>(
    model: &NarxModel<T>,
    tol: f64,
) -> Result<SteadyStateReport<T>> {
    check_assumption(model.terms())?;
    let sigma_y = sum_linear_output_params(model);
    let s = sigma_y.to_f64_lossy();
    let classification = if (s - 1.0).abs() <= tol {
        SteadyState::Continuum
    } else if s.abs() < 1.0 - tol {
        SteadyState::SingleFixedPoint
    } else if s.abs() > 1.0 + tol {
        SteadyState::Diverging
    } else {
        SteadyState::Marginal
    };
    Ok(SteadyStateReport {
        sigma_y,
        classification,
    })
}
