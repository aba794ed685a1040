//! Configured runs of the benchmark: training data, validation, the
//! closed chain and the sampling-time sweep.

use crate::compensation::{
    baseline, evaluate_chain, shift_for_inverse, synthesize_direct, synthesize_inverse,
    BoucWenPlant, ChainResult, CompensatorLaw,
};
use crate::error::Result;
use crate::io::config::{ExperimentConfig, SinusoidConfig, Strategy};
use crate::metrics::mape;
use crate::narx::{free_run, NarxModel, Signal};
use crate::pipeline::{identify, identify_inverse, Identification};
use crate::plant::{
    beta_grid, beta_sweep, make_filtered_noise_excitation, make_sinusoid, simulate_bouc_wen,
    InputSpec, PlantRun, SimConfig, SweepRecord,
};

/// Plant response to the configured filtered-noise excitation.
pub fn training_run(cfg: &ExperimentConfig, seed: Option<u64>) -> Result<PlantRun<f64>> {
    let plant = cfg.require_plant()?;
    let sim = cfg.sim_config(seed);
    let e = &cfg.excitation;
    let u = make_filtered_noise_excitation::<f64>(e.cutoff_hz, e.order, &sim, e.amplitude)?;
    simulate_bouc_wen(&plant, &InputSpec::Sampled(u), &sim)
}

/// Plant response to a sinusoid, sampled every `sample_time`.
pub fn sinusoid_run(
    cfg: &ExperimentConfig,
    s: &SinusoidConfig,
    sample_time: f64,
) -> Result<PlantRun<f64>> {
    let plant = cfg.require_plant()?;
    let sim = SimConfig {
        sample_time,
        duration: s.duration,
        ..cfg.simulation
    };
    let input = InputSpec::Sinusoid {
        amplitude: s.amplitude,
        freq_hz: s.freq_hz,
        offset: s.offset,
    };
    simulate_bouc_wen(&plant, &input, &sim)
}

/// The sinusoid `s` sampled every `sample_time`.
pub fn sinusoid_signal(
    cfg: &ExperimentConfig,
    s: &SinusoidConfig,
    sample_time: f64,
) -> Result<Signal<f64>> {
    let sim = SimConfig {
        sample_time,
        duration: s.duration,
        ..cfg.simulation
    };
    make_sinusoid(s.amplitude, s.freq_hz, s.offset, &sim)
}

/// Free-run MAPE of a direct model on measured data, started from the
/// measured outputs.
pub fn direct_model_mape(model: &NarxModel<f64>, run: &PlantRun<f64>) -> Result<f64> {
    let sim = free_run(model, &run.u, &run.y.samples()[..model.warmup()])?;
    mape(run.y.samples(), sim.samples(), 0)
}

/// Free-run MAPE of an inverse model: the advanced plant output drives the
/// model and the plant input is the target.
pub fn inverse_model_mape(model: &NarxModel<f64>, run: &PlantRun<f64>) -> Result<f64> {
    let (input, target) = shift_for_inverse(&run.u, &run.y, model.meta().tau_s, 1)?;
    let sim = free_run(model, &input, &target.samples()[..model.warmup()])?;
    mape(target.samples(), sim.samples(), 0)
}

pub fn identify_direct(cfg: &ExperimentConfig, run: &PlantRun<f64>) -> Result<Identification<f64>> {
    identify(&run.u, &run.y, &cfg.direct_options()?)
}

pub fn identify_inverse_model(
    cfg: &ExperimentConfig,
    run: &PlantRun<f64>,
) -> Result<Identification<f64>> {
    identify_inverse(
        &run.u,
        &run.y,
        cfg.inverse.tau_s,
        cfg.inverse.smoothing_window,
        &cfg.inverse_options()?,
    )
}

/// Synthesizes the law for the configured strategy from whichever model it
/// needs.
pub fn synthesize(strategy: Strategy, model: &NarxModel<f64>) -> Result<CompensatorLaw<f64>> {
    match strategy {
        Strategy::Direct => synthesize_direct(model),
        Strategy::Inverse => synthesize_inverse(model),
    }
}

/// Samples in one period of the compensation reference at `sample_time`.
pub fn period_samples(cfg: &ExperimentConfig, sample_time: f64) -> usize {
    let f = cfg.compensation.reference.freq_hz;
    if f > 0.0 {
        (1.0 / (f * sample_time)).round() as usize
    } else {
        0
    }
}

/// Runs the law (or the uncompensated chain when `law` is `None`) against
/// the configured reference and plant.
pub fn run_chain(
    cfg: &ExperimentConfig,
    law: Option<&CompensatorLaw<f64>>,
    reference: &Signal<f64>,
    transient_skip: usize,
) -> Result<ChainResult<f64>> {
    let plant = BoucWenPlant {
        params: cfg.require_plant()?,
        dt: cfg.simulation.dt,
    };
    let form = cfg.metrics.nsavi;
    match law {
        Some(law) => evaluate_chain(
            law,
            &plant,
            reference,
            &cfg.compensation.m0,
            transient_skip,
            form,
        ),
        None => baseline(&plant, reference, transient_skip, form),
    }
}

/// Increment magnitude for the quasi-static branches: the configured value,
/// or the mean `|u[k] - u[k-1]|` of the validation sinusoid.
pub fn analysis_phi1(cfg: &ExperimentConfig) -> Result<f64> {
    if let Some(phi1) = cfg.analysis.phi1 {
        return Ok(phi1);
    }
    let u = sinusoid_signal(cfg, &cfg.validation, cfg.simulation.sample_time)?;
    let u = u.samples();
    let n = u.len().saturating_sub(1).max(1);
    Ok(u.windows(2).map(|w| (w[1] - w[0]).abs()).sum::<f64>() / n as f64)
}

/// Loop geometry for every configured `beta`.
pub fn configured_beta_sweep(cfg: &ExperimentConfig) -> Result<Vec<SweepRecord>> {
    let b = &cfg.beta_sweep;
    let betas = beta_grid(b.start, b.stop, b.step)?;
    beta_sweep(
        &cfg.require_plant()?,
        &betas,
        b.amplitude,
        b.freq_hz,
        b.periods,
        &cfg.simulation,
    )
}

#[derive(Clone, Debug, PartialEq)]
pub struct SamplingRow {
    pub sample_time: f64,
    pub model_mape: Option<f64>,
    pub tracking_mape: Option<f64>,
    /// Why a row is incomplete.
    pub error: Option<String>,
}

/// Identifies the direct model at each sample time, validates it on the
/// validation sinusoid and scores its direct-law compensator.
pub fn sampling_sweep(
    cfg: &ExperimentConfig,
    sample_times: &[f64],
    seed: Option<u64>,
) -> Result<Vec<SamplingRow>> {
    cfg.require_plant()?;
    let rows = sample_times
        .iter()
        .map(|&ts| {
            let mut row = SamplingRow {
                sample_time: ts,
                model_mape: None,
                tracking_mape: None,
                error: None,
            };
            let mut c = cfg.clone();
            c.simulation.sample_time = ts;
            let outcome = (|| -> Result<()> {
                let id = identify_direct(&c, &training_run(&c, seed)?)?;
                row.model_mape = Some(direct_model_mape(
                    &id.model,
                    &sinusoid_run(&c, &c.validation, ts)?,
                )?);
                let law = synthesize_direct(&id.model)?;
                let r = sinusoid_signal(&c, &c.compensation.reference, ts)?;
                let chain = run_chain(&c, Some(&law), &r, period_samples(&c, ts))?;
                row.tracking_mape = Some(chain.metrics.mape);
                Ok(())
            })();
            if let Err(e) = outcome {
                row.error = Some(e.to_string());
            }
            row
        })
        .collect();
    Ok(rows)
}

/// `sample_time,model_mape,tracking_mape,error`; missing values are empty.
pub fn sampling_csv(rows: &[SamplingRow]) -> String {
    let opt = |v: Option<f64>| v.map(|x| x.to_string()).unwrap_or_default();
    let mut s = String::from("sample_time,model_mape,tracking_mape,error\n");
    for r in rows {
        s.push_str(&format!(
            "{},{},{},{}\n",
            r.sample_time,
            opt(r.model_mape),
            opt(r.tracking_mape),
            r.error.as_deref().unwrap_or("").replace(',', ";")
        ));
    }
    s
}
