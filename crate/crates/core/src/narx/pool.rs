//! Candidate regressor pools and the structural rules that prune them.

use crate::error::{Error, Result};
use crate::narx::term::{canonicalize, LaggedFactor, SignalKind, Term};

/// Structural exclusion rules applied to candidate terms.
///
/// The first three rules keep identified models consistent with a continuum
/// of equilibria and an affine quasi-static equation. `input_delay` adds the
/// rule needed for algebraic inversion: with delay `d`, any term touching
/// `u[k-d]` must be exactly `u[k-d]` or `phi1[k-d]`, and no term may read a
/// newer input sample.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Default)]
pub struct ExclusionRules {
    /// Drop output powers above one unless an input factor is present:
    /// `y^p`, `y^p * phi1^m`, `y^p * phi2^m` for p > 1.
    pub output_power: bool,
    /// Drop `phi2^m` for m > 1.
    pub sign_power: bool,
    /// Drop pure output-input cross products `y^p * u^m` (no phi factor).
    pub output_input_cross: bool,
    pub input_delay: Option<usize>,
}

impl ExclusionRules {
    pub fn none() -> Self {
        ExclusionRules::default()
    }

    /// Rules (i)-(iii) together.
    pub fn full() -> Self {
        ExclusionRules {
            output_power: true,
            sign_power: true,
            output_input_cross: true,
            input_delay: None,
        }
    }

    pub fn with_input_delay(mut self, delay: usize) -> Self {
        self.input_delay = Some(delay);
        self
    }

    /// Name of the first rule the term violates.
    pub fn violation(&self, term: &Term) -> Option<&'static str> {
        let out = term.degree_of(SignalKind::Output);
        let inp = term.degree_of(SignalKind::Input);
        let phi = term.phi_degree();
        if self.output_power && out > 1 && inp == 0 {
            return Some("output power above one");
        }
        if self.sign_power
            && term
                .factors()
                .iter()
                .any(|f| f.kind == SignalKind::Phi2 && f.power > 1)
        {
            return Some("sign regressor power above one");
        }
        if self.output_input_cross && out >= 1 && inp >= 1 && phi == 0 {
            return Some("output-input cross product");
        }
        if let Some(d) = self.input_delay {
            if let Some(newest) = term.newest_input_lag() {
                if newest < d {
                    return Some("reads input newer than the pure delay");
                }
                if newest == d {
                    let linear = matches!(
                        term.linear_factor(),
                        Some(f) if matches!(f.kind, SignalKind::Input | SignalKind::Phi1)
                    );
                    if !linear {
                        return Some("nonlinear in the delayed input");
                    }
                }
            }
        }
        None
    }

    pub fn excludes(&self, term: &Term) -> bool {
        self.violation(term).is_some()
    }

    /// Lists every term in `terms` that breaks a rule, as `term (rule)`.
    pub fn offending(&self, terms: &[Term]) -> Vec<String> {
        terms
            .iter()
            .filter_map(|t| self.violation(t).map(|why| format!("{t} ({why})")))
            .collect()
    }
}

/// Every canonical term of total degree `<= ell` over
/// `y[k-1..=n_y]`, `u[k-1..=n_u]`, `phi1[k-1..=n_u]`, `phi2[k-1..=n_u]`,
/// minus excluded ones. Ordered by degree, then canonical factor order.
pub fn generate_term_pool(
    ell: u32,
    n_y: usize,
    n_u: usize,
    exclusions: &ExclusionRules,
) -> Result<Vec<Term>> {
    if ell < 1 {
        return Err(Error::InvalidArgument(
            "nonlinear degree must be >= 1".into(),
        ));
    }
    if n_y < 1 || n_u < 1 {
        return Err(Error::InvalidArgument(format!(
            "maximum lags must be >= 1 (n_y = {n_y}, n_u = {n_u})"
        )));
    }
    let mut vars = Vec::new();
    for lag in 1..=n_y {
        vars.push((SignalKind::Output, lag));
    }
    for kind in [SignalKind::Input, SignalKind::Phi1, SignalKind::Phi2] {
        for lag in 1..=n_u {
            vars.push((kind, lag));
        }
    }

    let mut pool = Vec::new();
    let mut stack = Vec::new();
    for degree in 0..=ell as usize {
        multisets(&vars, degree, 0, &mut stack, &mut |idx| {
            let factors = idx
                .iter()
                .map(|&i| LaggedFactor {
                    kind: vars[i].0,
                    lag: vars[i].1,
                    power: 1,
                })
                .collect();
            let term = Term::new(canonicalize(factors)).expect("lags are positive");
            if !exclusions.excludes(&term) {
                pool.push(term);
            }
        });
    }
    pool.sort();
    Ok(pool)
}

fn multisets<V>(
    vars: &[V],
    remaining: usize,
    start: usize,
    stack: &mut Vec<usize>,
    emit: &mut impl FnMut(&[usize]),
) {
    if remaining == 0 {
        emit(stack);
        return;
    }
    for i in start..vars.len() {
        stack.push(i);
        multisets(vars, remaining - 1, i, stack, emit);
        stack.pop();
    }
}
