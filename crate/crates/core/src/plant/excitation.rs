use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

use crate::error::{Error, Result};
use crate::narx::signal::Signal;
use crate::plant::bouc_wen::SimConfig;
use crate::plant::filter::Butterworth;
use crate::scalar::Scalar;

/// Name of the noise generator, recorded in dataset metadata.
pub const NOISE_GENERATOR: &str = "chacha8-standard-normal";

/// Low-pass filtered Gaussian noise on the integration grid, scaled so its
/// peak magnitude equals `amplitude`.
pub fn make_filtered_noise_excitation<T: Scalar>(
    cutoff_hz: f64,
    order: usize,
    cfg: &SimConfig,
    amplitude: f64,
) -> Result<Signal<T>> {
    cfg.validate()?;
    let filter = Butterworth::lowpass(order, cutoff_hz, 1.0 / cfg.dt)?;
    let n = cfg.n_fine();
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let white: Vec<f64> = (0..n).map(|_| StandardNormal.sample(&mut rng)).collect();
    let colored = filter.filter(&white);
    let peak = colored.iter().fold(0.0f64, |m, x| m.max(x.abs()));
    if peak == 0.0 {
        return Err(Error::InvalidArgument(
            "filtered noise is identically zero".into(),
        ));
    }
    let k = amplitude / peak;
    Signal::new(colored.iter().map(|&x| T::lit(x * k)).collect(), cfg.dt)
}

/// `offset + amplitude sin(2 pi freq k T_s)` for `k = 0..n_samples`.
pub fn make_sinusoid<T: Scalar>(
    amplitude: f64,
    freq_hz: f64,
    offset: f64,
    cfg: &SimConfig,
) -> Result<Signal<T>> {
    if !(freq_hz >= 0.0) || freq_hz >= 0.5 / cfg.sample_time {
        return Err(Error::InvalidArgument(format!(
            "frequency {freq_hz} Hz must lie below the Nyquist frequency {} Hz",
            0.5 / cfg.sample_time
        )));
    }
    let w = std::f64::consts::TAU * freq_hz * cfg.sample_time;
    let samples = (0..cfg.n_samples())
        .map(|k| T::lit(offset + amplitude * (w * k as f64).sin()))
        .collect();
    Signal::new(samples, cfg.sample_time)
}
