use crate::analysis::signed_area;
use crate::error::{Error, Result};
use crate::plant::bouc_wen::{simulate_bouc_wen, BoucWenParams, InputSpec, SimConfig};

/// Shape of one steady hysteresis loop in the input-output plane.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct LoopGeometry {
    /// `max(u) - min(u)` over the loop.
    pub input_span: f64,
    /// `max(y) - min(y)` over the loop; used as the loop width.
    pub output_span: f64,
    /// Enclosed area (absolute shoelace area).
    pub area: f64,
}

impl LoopGeometry {
    /// Geometry of the closed curve `(u, y)`.
    pub fn of(u: &[f64], y: &[f64]) -> Self {
        let span = |v: &[f64]| {
            let (lo, hi) = v
                .iter()
                .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), &x| {
                    (lo.min(x), hi.max(x))
                });
            hi - lo
        };
        LoopGeometry {
            input_span: span(u),
            output_span: span(y),
            area: signed_area(u, y).abs(),
        }
    }

    pub fn width(&self) -> f64 {
        self.output_span
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct SweepRecord {
    pub beta: f64,
    /// `None` if the run failed; the failure is in `error`.
    pub geometry: Option<LoopGeometry>,
    pub error: Option<String>,
}

/// `beta` values `start, start + step, ...` up to `stop` inclusive.
pub fn beta_grid(start: f64, stop: f64, step: f64) -> Result<Vec<f64>> {
    if !(step > 0.0) || !(stop >= start) || !start.is_finite() || !stop.is_finite() {
        return Err(Error::InvalidArgument(format!(
            "invalid beta range [{start}, {stop}] with step {step}"
        )));
    }
    let count = ((stop - start) / step + 1e-9).floor() as usize + 1;
    Ok((0..count).map(|i| start + i as f64 * step).collect())
}

/// Drives the plant with the sinusoid for `periods` periods for each beta
/// and measures the last period's loop. Runs that fail are recorded and the
/// sweep continues.
pub fn beta_sweep(
    base: &BoucWenParams,
    betas: &[f64],
    amplitude: f64,
    freq_hz: f64,
    periods: usize,
    cfg: &SimConfig,
) -> Result<Vec<SweepRecord>> {
    if periods == 0 || !(freq_hz > 0.0) {
        return Err(Error::InvalidArgument(
            "sweep needs a positive frequency and at least one period".into(),
        ));
    }
    let period_samples = (1.0 / (freq_hz * cfg.sample_time)).round() as usize;
    let run_cfg = SimConfig {
        duration: periods as f64 / freq_hz,
        ..*cfg
    };
    run_cfg.validate()?;
    let input = InputSpec::Sinusoid {
        amplitude,
        freq_hz,
        offset: 0.0,
    };
    let records = betas
        .iter()
        .map(|&beta| {
            let params = BoucWenParams { beta, ..*base };
            match simulate_bouc_wen::<f64>(&params, &input, &run_cfg) {
                Ok(run) => {
                    let n = run.y.len();
                    let start = n.saturating_sub(period_samples);
                    SweepRecord {
                        beta,
                        geometry: Some(LoopGeometry::of(
                            &run.u.samples()[start..],
                            &run.y.samples()[start..],
                        )),
                        error: None,
                    }
                }
                Err(e) => SweepRecord {
                    beta,
                    geometry: None,
                    error: Some(e.to_string()),
                },
            }
        })
        .collect();
    Ok(records)
}
