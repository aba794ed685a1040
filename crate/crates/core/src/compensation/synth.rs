//! Compensator synthesis: rearranging a direct model for its delayed input,
//! or substituting variables in an identified inverse model.

use crate::compensation::law::{CompensatorLaw, LawFactor, LawKind, LawSignal, LawTerm};
use crate::error::{Error, Result};
use crate::linalg::Matrix;
use crate::narx::model::{ModelMeta, NarxModel};
use crate::narx::signal::Signal;
use crate::narx::term::{LaggedFactor, SignalKind, Term};
use crate::scalar::Scalar;

/// Coefficients smaller than this make the direct law undefined.
pub const MIN_DELAY_GAIN: f64 = 1e-12;

/// Where an original model term went during decomposition.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
enum Slot {
    Output(usize),
    Input(usize),
    DelayPhi1,
    Nonlinear(usize),
}

/// Direct model split as `A(q) y[k] = b u[k-tau_d] + B*(q) u[k] + f(...)`.
///
/// A `phi1[k-tau_d]` term `theta (u[k-tau_d] - u[k-tau_d-1])` contributes
/// `theta` to `b_taud` and `-theta` to `B*` at lag `tau_d + 1`.
#[derive(Clone, Debug, PartialEq)]
pub struct DirectDecomposition<T> {
    /// Parameter of `y[k-l]` at index `l - 1`, zero when absent.
    pub a: Vec<T>,
    pub b_taud: T,
    /// Coefficient of `u[k-l]` at index `l - tau_d - 1`.
    pub bstar: Vec<T>,
    /// Nonlinear and constant terms.
    pub f_terms: Vec<(Term, T)>,
    pub tau_d: usize,
    meta: ModelMeta,
    slots: Vec<Slot>,
    linear_u: Vec<T>,
    delay_u: Option<T>,
    delay_phi1: Option<T>,
}

/// Splits a direct model into its linear parts and the remainder.
pub fn decompose_direct<T: Scalar>(model: &NarxModel<T>) -> Result<DirectDecomposition<T>> {
    let tau_d = model.tau_d();
    let mut a = vec![T::zero(); model.n_y()];
    let mut bstar = vec![T::zero(); model.n_u().saturating_sub(tau_d)];
    let mut f_terms = Vec::new();
    let mut slots = Vec::with_capacity(model.len());
    let mut delay_u = None;
    let mut delay_phi1 = None;
    let mut offending = Vec::new();
    for (term, theta) in model.iter() {
        let slot = match term.linear_factor() {
            Some(LaggedFactor {
                kind: SignalKind::Output,
                lag,
                ..
            }) => {
                a[lag - 1] += theta;
                Slot::Output(lag)
            }
            Some(LaggedFactor {
                kind: SignalKind::Input,
                lag,
                ..
            }) if lag == tau_d => {
                delay_u = Some(theta);
                Slot::Input(lag)
            }
            Some(LaggedFactor {
                kind: SignalKind::Input,
                lag,
                ..
            }) => {
                let i = lag - tau_d - 1;
                if bstar.len() <= i {
                    bstar.resize(i + 1, T::zero());
                }
                bstar[i] += theta;
                Slot::Input(lag)
            }
            Some(LaggedFactor {
                kind: SignalKind::Phi1,
                lag,
                ..
            }) if lag == tau_d => {
                delay_phi1 = Some(theta);
                Slot::DelayPhi1
            }
            _ => {
                if term
                    .factors()
                    .iter()
                    .any(|f| f.kind.is_input_derived() && f.lag == tau_d)
                {
                    offending.push(term.to_string());
                }
                f_terms.push((term.clone(), theta));
                Slot::Nonlinear(f_terms.len() - 1)
            }
        };
        slots.push(slot);
    }
    if !offending.is_empty() {
        return Err(Error::structural(
            format!("the delayed input u[k-{tau_d}] must enter only linearly"),
            offending,
        ));
    }
    let linear_u = bstar.clone();
    let b_taud = delay_u.unwrap_or(T::zero()) + delay_phi1.unwrap_or(T::zero());
    if let Some(p) = delay_phi1 {
        if bstar.is_empty() {
            bstar.push(T::zero());
        }
        bstar[0] -= p;
    }
    if !(b_taud.abs().to_f64_lossy() > MIN_DELAY_GAIN) {
        return Err(Error::structural(
            format!("coefficient of u[k-{tau_d}] is zero; the direct law is undefined"),
            Vec::new(),
        ));
    }
    Ok(DirectDecomposition {
        a,
        b_taud,
        bstar,
        f_terms,
        tau_d,
        meta: model.meta(),
        slots,
        linear_u,
        delay_u,
        delay_phi1,
    })
}

impl<T: Scalar> DirectDecomposition<T> {
    /// Rebuilds the model the decomposition came from, in the original term
    /// order and with the original parameters.
    pub fn reassemble(&self) -> Result<NarxModel<T>> {
        let mut terms = Vec::with_capacity(self.slots.len());
        let mut theta = Vec::with_capacity(self.slots.len());
        for slot in &self.slots {
            let (term, value) = match *slot {
                Slot::Output(l) => (Term::single(SignalKind::Output, l), self.a[l - 1]),
                Slot::Input(l) if l == self.tau_d => (
                    Term::single(SignalKind::Input, l),
                    self.delay_u.expect("delay slot is recorded"),
                ),
                Slot::Input(l) => (
                    Term::single(SignalKind::Input, l),
                    self.linear_u[l - self.tau_d - 1],
                ),
                Slot::DelayPhi1 => (
                    Term::single(SignalKind::Phi1, self.tau_d),
                    self.delay_phi1.expect("delay slot is recorded"),
                ),
                Slot::Nonlinear(i) => self.f_terms[i].clone(),
            };
            terms.push(term);
            theta.push(value);
        }
        NarxModel::new(terms, theta, self.meta)
    }
}

fn law_factor(signal: LawSignal, offset: i64, power: u32) -> LawFactor {
    LawFactor {
        signal,
        offset,
        power,
    }
}

/// Direct-model substitution at `k = j + tau_d`: outputs become the
/// reference and inputs become the compensator output.
fn substitute_direct(term: &Term, tau_d: usize) -> LawTerm {
    LawTerm::new(
        term.factors()
            .iter()
            .map(|f| {
                let offset = tau_d as i64 - f.lag as i64;
                let signal = match f.kind {
                    SignalKind::Output => LawSignal::R,
                    SignalKind::Input => LawSignal::M,
                    SignalKind::Phi1 => LawSignal::DM,
                    SignalKind::Phi2 => LawSignal::SM,
                };
                law_factor(signal, offset, f.power)
            })
            .collect(),
    )
}

/// Solves the direct model for `m[j]` assuming the plant output equals the
/// reference: `m[j] = (1/b)[r[j+tau_d] - sum a_l r[j+tau_d-l]
/// - sum B*_l m[j+tau_d-l] - f]`.
pub fn synthesize_direct<T: Scalar>(model: &NarxModel<T>) -> Result<CompensatorLaw<T>> {
    let d = decompose_direct(model)?;
    let tau_d = d.tau_d as i64;
    let mut terms: Vec<(LawTerm, T)> = vec![(LawTerm::single(LawSignal::R, tau_d), T::one())];
    let mut push = |t: LawTerm, c: T| match terms.iter_mut().find(|(x, _)| *x == t) {
        Some((_, acc)) => *acc += c,
        None => terms.push((t, c)),
    };
    for (i, &a) in d.a.iter().enumerate() {
        if a != T::zero() {
            push(LawTerm::single(LawSignal::R, tau_d - 1 - i as i64), -a);
        }
    }
    for (i, &b) in d.bstar.iter().enumerate() {
        if b != T::zero() {
            push(LawTerm::single(LawSignal::M, -1 - i as i64), -b);
        }
    }
    for (term, theta) in &d.f_terms {
        push(substitute_direct(term, d.tau_d), -*theta);
    }
    let law = CompensatorLaw {
        kind: LawKind::Direct,
        gain: T::one() / d.b_taud,
        terms,
        horizon: d.tau_d,
        tau_d: d.tau_d,
        tau_s: model.tau_s(),
        sample_time: model.sample_time(),
    };
    law.validate()?;
    Ok(law)
}

/// Substitutes `m` for the inverse model's output channel and the advanced
/// reference for its input channel. Terms map one to one.
pub fn synthesize_inverse<T: Scalar>(inverse: &NarxModel<T>) -> Result<CompensatorLaw<T>> {
    let tau_s = inverse.tau_s();
    if tau_s < inverse.tau_d() + 1 {
        return Err(Error::Causality(format!(
            "inverse model has tau_s = {tau_s}; it must be at least tau_d + 1 = {}",
            inverse.tau_d() + 1
        )));
    }
    if !inverse
        .terms()
        .iter()
        .any(|t| t.factors().iter().any(|f| f.kind.is_input_derived()))
    {
        return Err(Error::structural(
            "inverse model has no regressor of the plant output",
            inverse.terms().iter().map(Term::to_string).collect(),
        ));
    }
    let terms = inverse
        .iter()
        .map(|(term, theta)| {
            let factors = term
                .factors()
                .iter()
                .map(|f| {
                    let (signal, offset) = match f.kind {
                        SignalKind::Output => (LawSignal::M, -(f.lag as i64)),
                        SignalKind::Input => (LawSignal::R, tau_s as i64 - f.lag as i64),
                        SignalKind::Phi1 => (LawSignal::DR, tau_s as i64 - f.lag as i64),
                        SignalKind::Phi2 => (LawSignal::SR, tau_s as i64 - f.lag as i64),
                    };
                    law_factor(signal, offset, f.power)
                })
                .collect();
            (LawTerm::new(factors), theta)
        })
        .collect();
    let law = CompensatorLaw {
        kind: LawKind::Inverse,
        gain: T::one(),
        terms,
        horizon: tau_s - 1,
        tau_d: inverse.tau_d(),
        tau_s,
        sample_time: inverse.sample_time(),
    };
    law.validate()?;
    Ok(law)
}

/// Builds the inverse identification dataset: the input channel is the
/// plant output advanced by `tau_s` samples and the target is the plant
/// input. Both have `len - tau_s` samples.
pub fn shift_for_inverse<T: Scalar>(
    u: &Signal<T>,
    y: &Signal<T>,
    tau_s: usize,
    tau_d: usize,
) -> Result<(Signal<T>, Signal<T>)> {
    if tau_s < tau_d + 1 {
        return Err(Error::Causality(format!(
            "tau_s = {tau_s} violates tau_s >= tau_d + 1 = {}",
            tau_d + 1
        )));
    }
    if u.len() != y.len() {
        return Err(Error::InvalidArgument(format!(
            "input has {} samples but output has {}",
            u.len(),
            y.len()
        )));
    }
    if y.len() <= tau_s {
        return Err(Error::InsufficientData {
            needed: tau_s + 1,
            got: y.len(),
        });
    }
    let n = y.len() - tau_s;
    Ok((y.slice(tau_s..y.len()), u.slice(0..n)))
}

/// Moving quadratic regression over `window` samples (odd, at least 3).
/// Near the ends the window is shifted to stay inside the record.
pub fn smooth_quadratic<T: Scalar>(x: &Signal<T>, window: usize) -> Result<Signal<T>> {
    if window < 3 || window % 2 == 0 {
        return Err(Error::InvalidArgument(format!(
            "smoothing window must be odd and at least 3, got {window}"
        )));
    }
    let s = x.samples();
    if s.len() < window {
        return Err(Error::InsufficientData {
            needed: window,
            got: s.len(),
        });
    }
    let half = window / 2;
    let design = |center: usize| {
        Matrix::from_columns(vec![
            vec![T::one(); window],
            (0..window)
                .map(|i| T::lit(i as f64 - center as f64))
                .collect(),
            (0..window)
                .map(|i| T::lit((i as f64 - center as f64).powi(2)))
                .collect(),
        ])
    };
    let mut out = Vec::with_capacity(s.len());
    for k in 0..s.len() {
        let start = k.saturating_sub(half).min(s.len() - window);
        let qr = crate::linalg::Qr::new(design(k - start));
        let coef = qr.solve_least_squares(&s[start..start + window]);
        out.push(coef[0]);
    }
    Signal::new(out, x.sample_time())
}
