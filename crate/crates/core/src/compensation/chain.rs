//! Compensator and plant in series.

use crate::compensation::law::{run_compensator, CompensatorLaw};
use crate::error::{Error, Result};
use crate::metrics::{mape, nsavi, MetricsSummary, NsaviForm};
use crate::narx::signal::Signal;
use crate::plant::{simulate_bouc_wen_grid, BoucWenParams, InputSpec};
use crate::scalar::Scalar;

/// Anything that maps a sampled input sequence to a sampled output of the
/// same length.
pub trait Plant<T> {
    fn respond(&self, m: &Signal<T>) -> Result<Signal<T>>;
}

/// Bouc-Wen plant integrated on a grid of step `dt`; the sampled input is
/// interpolated linearly between samples.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct BoucWenPlant {
    pub params: BoucWenParams,
    pub dt: f64,
}

impl<T: Scalar> Plant<T> for BoucWenPlant {
    fn respond(&self, m: &Signal<T>) -> Result<Signal<T>> {
        if m.is_empty() {
            return Err(Error::InsufficientData { needed: 1, got: 0 });
        }
        let ratio = (m.sample_time() / self.dt).round().max(1.0) as usize;
        let n = (m.len() - 1) * ratio + 1;
        let (_, y) =
            simulate_bouc_wen_grid(&self.params, &InputSpec::Sampled(m.clone()), self.dt, n)?;
        Signal::new(y.into_iter().step_by(ratio).collect(), m.sample_time())
    }
}

/// Signals and indices of one closed-chain run. `y[j]` is compared with
/// `r[j]` over the first `m.len()` samples.
#[derive(Clone, Debug, PartialEq)]
pub struct ChainResult<T> {
    pub m: Signal<T>,
    pub y: Signal<T>,
    pub metrics: MetricsSummary,
}

fn summarize<T: Scalar>(
    r: &Signal<T>,
    m: Signal<T>,
    y: Signal<T>,
    transient_skip: usize,
    form: NsaviForm,
) -> Result<ChainResult<T>> {
    let r = &r.samples()[..m.len()];
    let metrics = MetricsSummary {
        mape: mape(r, y.samples(), transient_skip)?,
        nsavi: nsavi(m.samples(), r, transient_skip, form)?,
        n_samples: m.len() - transient_skip,
        transient_skip,
    };
    Ok(ChainResult { m, y, metrics })
}

/// Runs the compensator on `r`, drives the plant with its output and
/// scores the tracking.
pub fn evaluate_chain<T: Scalar, P: Plant<T> + ?Sized>(
    law: &CompensatorLaw<T>,
    plant: &P,
    r: &Signal<T>,
    m0: &[T],
    transient_skip: usize,
    form: NsaviForm,
) -> Result<ChainResult<T>> {
    let m = run_compensator(law, r, m0)?;
    let y = plant.respond(&m)?;
    summarize(r, m, y, transient_skip, form)
}

/// The uncompensated chain, `m = r`.
pub fn baseline<T: Scalar, P: Plant<T> + ?Sized>(
    plant: &P,
    r: &Signal<T>,
    transient_skip: usize,
    form: NsaviForm,
) -> Result<ChainResult<T>> {
    let y = plant.respond(r)?;
    summarize(r, r.clone(), y, transient_skip, form)
}
