//! One-step-ahead prediction and free-run simulation.

use crate::error::{Error, Result};
use crate::narx::model::NarxModel;
use crate::narx::regression::Channels;
use crate::narx::signal::{phi_vectors, Signal};
use crate::narx::term::SignalKind;
use crate::scalar::Scalar;

/// Free-run outputs larger than this abort the simulation.
pub const DIVERGENCE_LIMIT: f64 = 1e12;

/// Predicts `y[k]` from measured lagged outputs and inputs.
///
/// The first `model.warmup()` samples carry the measured output unchanged.
pub fn one_step_predict<T: Scalar>(
    model: &NarxModel<T>,
    u: &Signal<T>,
    y: &Signal<T>,
) -> Result<Signal<T>> {
    if u.len() != y.len() {
        return Err(Error::InvalidArgument(format!(
            "input has {} samples but output has {}",
            u.len(),
            y.len()
        )));
    }
    let start = model.warmup();
    if y.len() <= start {
        return Err(Error::InsufficientData {
            needed: start + 1,
            got: y.len(),
        });
    }
    let ch = Channels::new(u.samples(), y.samples());
    let mut out = y.samples()[..start].to_vec();
    out.reserve(y.len() - start);
    for k in start..y.len() {
        out.push(model.evaluate(|kind, lag| ch.at(k, kind, lag)));
    }
    Signal::new(out, y.sample_time())
}

/// Simulates the model feeding back its own output.
///
/// The first `model.warmup()` outputs are initial conditions taken from
/// `y0`; when `y0` is shorter, its last value is held.
pub fn free_run<T: Scalar>(model: &NarxModel<T>, u: &Signal<T>, y0: &[T]) -> Result<Signal<T>> {
    let start = model.warmup();
    if u.len() <= start {
        return Err(Error::InsufficientData {
            needed: start + 1,
            got: u.len(),
        });
    }
    if y0.len() < model.n_y().min(start) || y0.is_empty() {
        return Err(Error::InvalidArgument(format!(
            "free run needs at least {} initial outputs, got {}",
            model.n_y().min(start).max(1),
            y0.len()
        )));
    }
    let limit = T::lit(DIVERGENCE_LIMIT);
    let mut y = vec![T::zero(); u.len()];
    for (k, slot) in y.iter_mut().take(start).enumerate() {
        *slot = y0[k.min(y0.len() - 1)];
    }
    let (phi1, phi2) = phi_vectors(u.samples());
    let us = u.samples();
    for k in start..u.len() {
        let next = model.evaluate(|kind, lag| match kind {
            SignalKind::Output => y[k - lag],
            SignalKind::Input => us[k - lag],
            SignalKind::Phi1 => phi1[k - lag],
            SignalKind::Phi2 => phi2[k - lag],
        });
        if !next.is_finite() || next.abs() > limit {
            return Err(Error::Diverged {
                index: k,
                time: Some(k as f64 * u.sample_time()),
            });
        }
        y[k] = next;
    }
    Signal::new(y, u.sample_time())
}
