//! Subcommand bodies. Each reads its inputs, writes its outputs under
//! `--out` and records both in the manifest.

use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use chrono::{SecondsFormat, Utc};
use hysnarx::analysis::{
    check_assumption, loop_orientation, quasi_static_solve, steady_state_analyze, Branch,
};
use hysnarx::compensation::{read_law, write_law, ChainResult, CompensatorLaw};
use hysnarx::experiment::{
    analysis_phi1, configured_beta_sweep, direct_model_mape, identify_direct,
    identify_inverse_model, inverse_model_mape, period_samples, run_chain, sampling_csv,
    sampling_sweep, sinusoid_run, sinusoid_signal, synthesize, training_run,
};
use hysnarx::io::{
    load_experiment_config, parse_experiment_config, read_dataset, read_input, sidecar_path,
    write_dataset, write_input, write_metrics, DatasetMeta, ExperimentConfig, Strategy,
};
use hysnarx::narx::{free_run, read_model, write_model, NarxModel, Signal};
use hysnarx::pipeline::Identification;
use hysnarx::plant::{
    make_filtered_noise_excitation, simulate_bouc_wen, InputSpec, PlantRun, SimConfig, SweepRecord,
    NOISE_GENERATOR,
};
use hysnarx::{mape, MetricsSummary};

use crate::manifest::{Manifest, RunRecord};
use crate::{CliError, Command, Context, PlantSignal, StrategyArg};

pub const REPORT_FORMAT_VERSION: u32 = 1;

struct Ctx {
    cfg: ExperimentConfig,
    seed: u64,
    out: PathBuf,
    inputs: Vec<PathBuf>,
    outputs: Vec<PathBuf>,
}

impl Ctx {
    fn sim(&self) -> SimConfig {
        self.cfg.sim_config(Some(self.seed))
    }

    fn meta(&self, generator: &str) -> DatasetMeta {
        let mut m = DatasetMeta::new(self.cfg.simulation.sample_time, 0);
        m.dt = Some(self.cfg.simulation.dt);
        m.seed = Some(self.seed);
        m.generator = Some(generator.to_string());
        m.plant = self.cfg.plant;
        m
    }

    fn read_text(&mut self, path: &Path) -> Result<String, CliError> {
        self.inputs.push(path.to_path_buf());
        fs::read_to_string(path).context(|| format!("reading {}", path.display()))
    }

    fn write_text(&mut self, name: &str, text: &str) -> Result<PathBuf, CliError> {
        let path = self.out.join(name);
        fs::write(&path, text).context(|| format!("writing {}", path.display()))?;
        self.outputs.push(path.clone());
        Ok(path)
    }

    fn write_dataset(
        &mut self,
        name: &str,
        u: &Signal<f64>,
        y: &Signal<f64>,
        meta: &DatasetMeta,
    ) -> Result<PathBuf, CliError> {
        let path = self.out.join(name);
        write_dataset(&path, u, y, meta).context(|| format!("writing {}", path.display()))?;
        self.outputs.push(path.clone());
        self.outputs.push(sidecar_path(&path));
        Ok(path)
    }

    fn read_dataset(&mut self, path: &Path) -> Result<PlantRun<f64>, CliError> {
        let d = read_dataset::<f64>(path).context(|| format!("reading {}", path.display()))?;
        self.inputs.push(path.to_path_buf());
        if sidecar_path(path).exists() {
            self.inputs.push(sidecar_path(path));
        }
        Ok(PlantRun { u: d.u, y: d.y })
    }

    /// The `u` column of either record layout.
    fn read_input(&mut self, path: &Path) -> Result<Signal<f64>, CliError> {
        let text = fs::read_to_string(path).context(|| format!("reading {}", path.display()))?;
        let u = if text.lines().next().map(str::trim) == Some("time_s,u") {
            read_input::<f64>(path)
                .context(|| format!("reading {}", path.display()))?
                .0
        } else {
            read_dataset::<f64>(path)
                .context(|| format!("reading {}", path.display()))?
                .u
        };
        self.inputs.push(path.to_path_buf());
        if sidecar_path(path).exists() {
            self.inputs.push(sidecar_path(path));
        }
        Ok(u)
    }

    fn read_model(&mut self, path: &Path) -> Result<NarxModel<f64>, CliError> {
        let text = self.read_text(path)?;
        read_model(&text).context(|| format!("parsing model {}", path.display()))
    }
}

pub fn run(
    command: Command,
    config: Option<PathBuf>,
    seed: Option<u64>,
    out: PathBuf,
) -> Result<(), CliError> {
    let started = Utc::now();
    let cfg = match &config {
        Some(p) => load_experiment_config(p).context(|| format!("loading {}", p.display()))?,
        None => parse_experiment_config("")?,
    };
    cfg.validate()?;
    fs::create_dir_all(&out).context(|| format!("creating {}", out.display()))?;
    let mut ctx = Ctx {
        seed: seed.unwrap_or(cfg.simulation.seed),
        cfg,
        out,
        inputs: Vec::new(),
        outputs: Vec::new(),
    };
    if let Some(p) = &config {
        ctx.inputs.push(p.clone());
    }
    let name = command.name();
    match command {
        Command::Excite { duration } => excite(&mut ctx, duration),
        Command::SimulatePlant {
            signal,
            input,
            duration,
            name,
        } => simulate_plant(&mut ctx, signal, input.as_deref(), duration, name),
        Command::Identify {
            data,
            inverse,
            tau_s,
            no_constraint,
            validate,
        } => identify(
            &mut ctx,
            &data,
            inverse,
            tau_s,
            no_constraint,
            validate.as_deref(),
        ),
        Command::Analyze {
            model,
            u_min,
            u_max,
            grid,
            phi1,
            data,
        } => analyze(&mut ctx, &model, u_min, u_max, grid, phi1, data.as_deref()),
        Command::Synthesize { model, strategy } => synthesize_cmd(&mut ctx, &model, strategy),
        Command::Compensate {
            law,
            no_compensation: _,
            reference,
        } => compensate(&mut ctx, law.as_deref(), reference.as_deref()),
        Command::SweepSampling { sample_times } => sweep_sampling(&mut ctx, sample_times),
        Command::Report { no_beta_sweep } => report(&mut ctx, !no_beta_sweep),
    }?;
    let record = RunRecord {
        command: name.to_string(),
        tool_version: env!("CARGO_PKG_VERSION").to_string(),
        config,
        seeds: vec![ctx.seed],
        inputs: ctx.inputs,
        outputs: ctx.outputs,
        started: started.to_rfc3339_opts(SecondsFormat::Millis, true),
        finished: Utc::now().to_rfc3339_opts(SecondsFormat::Millis, true),
    };
    let path = Manifest::append(&ctx.out, record).context(|| "writing manifest".to_string())?;
    println!("manifest: {}", path.display());
    Ok(())
}

fn excite(ctx: &mut Ctx, duration: Option<f64>) -> Result<(), CliError> {
    let mut sim = ctx.sim();
    if let Some(d) = duration {
        sim.duration = d;
    }
    let e = &ctx.cfg.excitation;
    let u = make_filtered_noise_excitation::<f64>(e.cutoff_hz, e.order, &sim, e.amplitude)
        .context(|| "designing the excitation".to_string())?;
    let mut meta = ctx.meta(NOISE_GENERATOR);
    meta.excitation = Some(format!(
        "order-{} Butterworth low-pass at {} Hz, peak {}",
        e.order, e.cutoff_hz, e.amplitude
    ));
    meta.plant = None;
    let path = ctx.out.join("excitation.csv");
    write_input(&path, &u, &meta).context(|| format!("writing {}", path.display()))?;
    ctx.outputs.push(path.clone());
    ctx.outputs.push(sidecar_path(&path));
    println!(
        "{}: {} samples at {} s",
        path.display(),
        u.len(),
        u.sample_time()
    );
    Ok(())
}

/// Output rate and length that a replayed input of `n` samples at
/// `input_ts` covers.
fn replay_config(base: SimConfig, n: usize, input_ts: f64) -> Result<SimConfig, CliError> {
    if n < 2 {
        return Err(CliError::config("input record needs at least two samples"));
    }
    let span = (n - 1) as f64 * input_ts;
    let samples = (span / base.sample_time + 1e-9).floor() as usize + 1;
    Ok(SimConfig {
        duration: samples as f64 * base.sample_time,
        ..base
    })
}

fn simulate_plant(
    ctx: &mut Ctx,
    signal: PlantSignal,
    input: Option<&Path>,
    duration: Option<f64>,
    name: Option<String>,
) -> Result<(), CliError> {
    let plant = ctx.cfg.require_plant()?;
    let (run, stem, generator) = match input {
        Some(path) => {
            let u = ctx.read_input(path)?;
            let sim = replay_config(ctx.sim(), u.len(), u.sample_time())?;
            let run = simulate_bouc_wen(&plant, &InputSpec::Sampled(u), &sim)
                .context(|| format!("simulating the plant on {}", path.display()))?;
            (run, "plant", format!("replay of {}", path.display()))
        }
        None => {
            let mut cfg = ctx.cfg.clone();
            if let Some(d) = duration {
                cfg.simulation.duration = d;
                cfg.validation.duration = d;
                cfg.compensation.reference.duration = d;
            }
            let ts = cfg.simulation.sample_time;
            match signal {
                PlantSignal::Training => (
                    training_run(&cfg, Some(ctx.seed))
                        .context(|| "simulating training data".to_string())?,
                    "training",
                    NOISE_GENERATOR.to_string(),
                ),
                PlantSignal::Validation => (
                    sinusoid_run(&cfg, &cfg.validation, ts)?,
                    "validation",
                    "sinusoid".to_string(),
                ),
                PlantSignal::Reference => (
                    sinusoid_run(&cfg, &cfg.compensation.reference, ts)?,
                    "reference",
                    "sinusoid".to_string(),
                ),
            }
        }
    };
    let stem = name.unwrap_or_else(|| stem.to_string());
    let meta = ctx.meta(&generator);
    let path = ctx.write_dataset(&format!("{stem}.csv"), &run.u, &run.y, &meta)?;
    println!(
        "{}: {} samples at {} s",
        path.display(),
        run.u.len(),
        run.u.sample_time()
    );
    Ok(())
}

fn identification_text(
    direction: &str,
    data: &Path,
    id: &Identification<f64>,
    validation_mape: Option<f64>,
) -> String {
    let mut s = String::new();
    let _ = writeln!(s, "format_version = {REPORT_FORMAT_VERSION}");
    let _ = writeln!(s, "kind = identification");
    let _ = writeln!(s, "direction = {direction}");
    let _ = writeln!(s, "data = {}", data.display());
    let _ = writeln!(s, "n_terms = {}", id.model.len());
    let _ = writeln!(s, "condition = {}", id.condition);
    if let Some(st) = id.steady {
        let _ = writeln!(s, "sigma_y = {}", st.sigma_y);
        let _ = writeln!(s, "steady_state = {}", st.classification);
    }
    if let Some(m) = validation_mape {
        let _ = writeln!(s, "validation_mape = {m}");
    }
    for w in &id.warnings {
        let _ = writeln!(s, "warning = {}", w.replace('\n', " "));
    }
    s
}

fn identify(
    ctx: &mut Ctx,
    data: &Path,
    inverse: bool,
    tau_s: Option<usize>,
    no_constraint: bool,
    validate: Option<&Path>,
) -> Result<(), CliError> {
    let run = ctx.read_dataset(data)?;
    let mut cfg = ctx.cfg.clone();
    if no_constraint {
        cfg.identification.continuum_constraint = false;
    }
    if let Some(t) = tau_s {
        cfg.inverse.tau_s = t;
    }
    let (id, stem, direction) = if inverse {
        let id = identify_inverse_model(&cfg, &run)
            .context(|| format!("identifying the inverse model from {}", data.display()))?;
        (id, "inverse_model", "inverse")
    } else {
        let id = identify_direct(&cfg, &run)
            .context(|| format!("identifying the direct model from {}", data.display()))?;
        (id, "model", "direct")
    };
    let validation_mape = match validate {
        Some(path) => {
            let v = ctx.read_dataset(path)?;
            let m = if inverse {
                inverse_model_mape(&id.model, &v)
            } else {
                direct_model_mape(&id.model, &v)
            };
            Some(m.context(|| format!("validating on {}", path.display()))?)
        }
        None => None,
    };
    let model_path = ctx.write_text(&format!("{stem}.txt"), &write_model(&id.model))?;
    ctx.write_text(
        &format!("{stem}.identification.txt"),
        &identification_text(direction, data, &id, validation_mape),
    )?;
    if let Some(r) = &id.report {
        ctx.write_text(&format!("{stem}.selection.csv"), &r.to_csv())?;
    }
    println!("{}: {} terms", model_path.display(), id.model.len());
    for (t, th) in id.model.iter() {
        println!("  {th:+.6e}  {t}");
    }
    if let Some(st) = id.steady {
        println!(
            "sigma_y = {}, steady state {}",
            st.sigma_y, st.classification
        );
    }
    if let Some(m) = validation_mape {
        println!("validation MAPE = {m:.4}");
    }
    for w in &id.warnings {
        eprintln!("warning: {w}");
    }
    Ok(())
}

fn analyze(
    ctx: &mut Ctx,
    model_path: &Path,
    u_min: Option<f64>,
    u_max: Option<f64>,
    grid: Option<usize>,
    phi1: Option<f64>,
    data: Option<&Path>,
) -> Result<(), CliError> {
    let model = ctx.read_model(model_path)?;
    let a = &ctx.cfg.analysis;
    let (lo, hi) = (u_min.unwrap_or(a.u_min), u_max.unwrap_or(a.u_max));
    let n = grid.unwrap_or(a.grid);
    if n == 0 || !(hi >= lo) {
        return Err(CliError::config(format!(
            "analysis grid needs at least one point on a non-empty range, got {n} on [{lo}, {hi}]"
        )));
    }
    let u: Vec<f64> = if n == 1 {
        vec![lo]
    } else {
        (0..n)
            .map(|i| lo + (hi - lo) * i as f64 / (n - 1) as f64)
            .collect()
    };
    let phi1 = match phi1 {
        Some(p) => p,
        None => analysis_phi1(&ctx.cfg)?,
    };
    check_assumption(model.terms()).context(|| format!("analyzing {}", model_path.display()))?;
    let steady = steady_state_analyze(&model, ctx.cfg.identification.steady_tol)?;
    println!(
        "sigma_y = {}, steady state {}",
        steady.sigma_y, steady.classification
    );
    for (branch, p) in [(Branch::Loading, phi1), (Branch::Unloading, -phi1)] {
        let curve = quasi_static_solve(&model, &u, p, branch)
            .context(|| format!("solving the {branch} branch"))?;
        let path = ctx.write_text(&format!("{branch}.csv"), &curve.to_csv())?;
        let defined = curve.y_tilde.iter().filter(|y| y.is_some()).count();
        let attracting = curve
            .y_tilde
            .iter()
            .zip(&curve.attracting)
            .filter(|(y, a)| y.is_some() && **a)
            .count();
        println!(
            "{}: {defined}/{} points defined, {attracting} attracting (phi1 = {p})",
            path.display(),
            curve.len()
        );
    }
    if let Some(path) = data {
        let run = ctx.read_dataset(path)?;
        let w = model.warmup();
        if run.y.len() < w {
            return Err(CliError::config(format!(
                "{} is shorter than the model's {w} initial samples",
                path.display()
            )));
        }
        let y = free_run(&model, &run.u, &run.y.samples()[..w])
            .context(|| format!("free-running the model on {}", path.display()))?;
        let meta = ctx.meta("free run");
        let out = ctx.write_dataset("free_run.csv", &run.u, &y, &meta)?;
        let period = period_samples(&ctx.cfg, run.u.sample_time()).clamp(2, run.u.len());
        let tail = run.u.len() - period;
        println!(
            "{}: last-period loop {:?}",
            out.display(),
            loop_orientation(&run.u.samples()[tail..], &y.samples()[tail..])
        );
        if let Ok(m) = mape(run.y.samples(), y.samples(), 0) {
            println!("free-run MAPE = {m:.4}");
        }
    }
    Ok(())
}

fn synthesize_cmd(
    ctx: &mut Ctx,
    model_path: &Path,
    strategy: Option<StrategyArg>,
) -> Result<(), CliError> {
    let model = ctx.read_model(model_path)?;
    let strategy = match strategy {
        Some(StrategyArg::Direct) => Strategy::Direct,
        Some(StrategyArg::Inverse) => Strategy::Inverse,
        None => ctx.cfg.compensation.strategy,
    };
    if strategy == Strategy::Direct && model.tau_s() > 0 {
        eprintln!(
            "warning: {} has tau_s = {} and looks like an inverse model",
            model_path.display(),
            model.tau_s()
        );
    }
    let law = synthesize(strategy, &model)
        .context(|| format!("synthesizing a law from {}", model_path.display()))?;
    let path = ctx.write_text("law.txt", &write_law(&law))?;
    println!(
        "{}: {:?} law, {} terms, horizon {}",
        path.display(),
        law.kind,
        law.terms.len(),
        law.horizon
    );
    Ok(())
}

fn chain_csv(r: &Signal<f64>, chain: &ChainResult<f64>) -> String {
    let n = chain.m.len().min(chain.y.len()).min(r.len());
    let ts = r.sample_time();
    let mut s = String::with_capacity(64 * n + 16);
    s.push_str("time_s,r,m,y\n");
    for k in 0..n {
        let _ = writeln!(
            s,
            "{},{},{},{}",
            k as f64 * ts,
            r.samples()[k],
            chain.m.samples()[k],
            chain.y.samples()[k]
        );
    }
    s
}

fn print_metrics(label: &str, m: &MetricsSummary) {
    println!(
        "{label}: MAPE = {:.4}, NSAVI = {:.4} over {} samples after skipping {}",
        m.mape, m.nsavi, m.n_samples, m.transient_skip
    );
}

fn compensate(ctx: &mut Ctx, law: Option<&Path>, reference: Option<&Path>) -> Result<(), CliError> {
    ctx.cfg.require_plant()?;
    let law: Option<CompensatorLaw<f64>> = match law {
        Some(p) => {
            let text = ctx.read_text(p)?;
            Some(read_law(&text).context(|| format!("parsing law {}", p.display()))?)
        }
        None => None,
    };
    let ts = law
        .as_ref()
        .map_or(ctx.cfg.simulation.sample_time, |l| l.sample_time);
    let r = match reference {
        Some(p) => ctx.read_input(p)?,
        None => sinusoid_signal(&ctx.cfg, &ctx.cfg.compensation.reference, ts)?,
    };
    if ((r.sample_time() - ts) / ts).abs() > 1e-9 {
        return Err(CliError::config(format!(
            "reference sample time {} s differs from the law's {ts} s",
            r.sample_time()
        )));
    }
    let skip = if ts == ctx.cfg.simulation.sample_time {
        ctx.cfg.transient_skip()
    } else {
        period_samples(&ctx.cfg, ts)
    };
    let label = law.as_ref().map_or("baseline", |l| match l.kind {
        hysnarx::LawKind::Direct => "direct",
        hysnarx::LawKind::Inverse => "inverse",
    });
    let chain = run_chain(&ctx.cfg, law.as_ref(), &r, skip)
        .context(|| format!("running the {label} chain"))?;
    ctx.write_text("compensation.csv", &chain_csv(&r, &chain))?;
    let path = ctx.write_text("metrics.txt", &write_metrics(label, &chain.metrics))?;
    print_metrics(label, &chain.metrics);
    println!("{}", path.display());
    Ok(())
}

fn sweep_sampling(ctx: &mut Ctx, sample_times: Option<Vec<f64>>) -> Result<(), CliError> {
    let times = sample_times.unwrap_or_else(|| ctx.cfg.sampling_sweep.sample_times.clone());
    if times.is_empty() {
        return Err(CliError::config("no sampling times given"));
    }
    for &ts in &times {
        SimConfig {
            sample_time: ts,
            ..ctx.sim()
        }
        .validate()
        .context(|| format!("checking sampling time {ts} s"))?;
    }
    let rows = sampling_sweep(&ctx.cfg, &times, Some(ctx.seed))?;
    let path = ctx.write_text("sampling_sweep.csv", &sampling_csv(&rows))?;
    for r in &rows {
        match (r.model_mape, r.tracking_mape, &r.error) {
            (Some(m), Some(t), _) => println!(
                "T_s = {} s: model MAPE {m:.4}, tracking MAPE {t:.4}",
                r.sample_time
            ),
            (_, _, e) => println!(
                "T_s = {} s: incomplete ({})",
                r.sample_time,
                e.as_deref().unwrap_or("unknown")
            ),
        }
    }
    println!("{}", path.display());
    Ok(())
}

fn beta_csv(records: &[SweepRecord]) -> String {
    let mut s = String::from("beta,input_span,output_span,area,error\n");
    for r in records {
        match r.geometry {
            Some(g) => {
                let _ = writeln!(
                    s,
                    "{},{},{},{},",
                    r.beta, g.input_span, g.output_span, g.area
                );
            }
            None => {
                let e = r.error.as_deref().unwrap_or("").replace(',', ";");
                let _ = writeln!(s, "{},,,,{e}", r.beta);
            }
        }
    }
    s
}

fn report(ctx: &mut Ctx, with_beta_sweep: bool) -> Result<(), CliError> {
    let cfg = ctx.cfg.clone();
    let ts = cfg.simulation.sample_time;
    let training =
        training_run(&cfg, Some(ctx.seed)).context(|| "simulating training data".to_string())?;
    let meta = ctx.meta(NOISE_GENERATOR);
    let training_path = ctx.write_dataset("training.csv", &training.u, &training.y, &meta)?;
    let direct =
        identify_direct(&cfg, &training).context(|| "identifying the direct model".to_string())?;
    let inverse = identify_inverse_model(&cfg, &training)
        .context(|| "identifying the inverse model".to_string())?;
    let validation = sinusoid_run(&cfg, &cfg.validation, ts)?;
    let meta = ctx.meta("sinusoid");
    ctx.write_dataset("validation.csv", &validation.u, &validation.y, &meta)?;
    let direct_mape = direct_model_mape(&direct.model, &validation)?;
    let inverse_mape = inverse_model_mape(&inverse.model, &validation)?;
    ctx.write_text("model.txt", &write_model(&direct.model))?;
    ctx.write_text("inverse_model.txt", &write_model(&inverse.model))?;
    ctx.write_text(
        "model.identification.txt",
        &identification_text("direct", &training_path, &direct, Some(direct_mape)),
    )?;
    ctx.write_text(
        "inverse_model.identification.txt",
        &identification_text("inverse", &training_path, &inverse, Some(inverse_mape)),
    )?;

    let direct_law = synthesize(Strategy::Direct, &direct.model)?;
    let inverse_law = synthesize(Strategy::Inverse, &inverse.model)?;
    ctx.write_text("direct_law.txt", &write_law(&direct_law))?;
    ctx.write_text("inverse_law.txt", &write_law(&inverse_law))?;
    let r = sinusoid_signal(&cfg, &cfg.compensation.reference, ts)?;
    let skip = cfg.transient_skip();
    let mut chains = Vec::new();
    for (label, law) in [
        ("direct", Some(&direct_law)),
        ("inverse", Some(&inverse_law)),
        ("baseline", None),
    ] {
        let chain =
            run_chain(&cfg, law, &r, skip).context(|| format!("running the {label} chain"))?;
        ctx.write_text(&format!("compensation_{label}.csv"), &chain_csv(&r, &chain))?;
        ctx.write_text(
            &format!("metrics_{label}.txt"),
            &write_metrics(label, &chain.metrics),
        )?;
        chains.push((label, chain.metrics));
    }

    let phi1 = analysis_phi1(&cfg)?;
    let a = &cfg.analysis;
    let grid: Vec<f64> = (0..a.grid.max(1))
        .map(|i| a.u_min + (a.u_max - a.u_min) * i as f64 / (a.grid.max(2) - 1) as f64)
        .collect();
    let mut branches = Vec::new();
    for (branch, p) in [(Branch::Loading, phi1), (Branch::Unloading, -phi1)] {
        let curve = quasi_static_solve(&direct.model, &grid, p, branch)?;
        ctx.write_text(&format!("{branch}.csv"), &curve.to_csv())?;
        let attracting = curve
            .y_tilde
            .iter()
            .zip(&curve.attracting)
            .filter(|(y, a)| y.is_some() && **a)
            .count();
        branches.push((branch, attracting, curve.len()));
    }

    let rows = sampling_sweep(&cfg, &cfg.sampling_sweep.sample_times, Some(ctx.seed))?;
    ctx.write_text("sampling_sweep.csv", &sampling_csv(&rows))?;
    let betas = if with_beta_sweep {
        let records = configured_beta_sweep(&cfg)?;
        ctx.write_text("beta_sweep.csv", &beta_csv(&records))?;
        Some(records)
    } else {
        None
    };

    let mut s = String::new();
    let _ = writeln!(s, "format_version = {REPORT_FORMAT_VERSION}");
    let _ = writeln!(s, "kind = report");
    let _ = writeln!(s, "seed = {}", ctx.seed);
    let _ = writeln!(s, "training_samples = {}", training.u.len());
    for (name, id) in [("direct", &direct), ("inverse", &inverse)] {
        for (i, (t, th)) in id.model.iter().enumerate() {
            let _ = writeln!(s, "{name}.theta{} = {th}  # {t}", i + 1);
        }
        if let Some(st) = id.steady {
            let _ = writeln!(s, "{name}.steady_state = {}", st.classification);
        }
    }
    let _ = writeln!(s, "direct.model_mape = {direct_mape}");
    let _ = writeln!(s, "inverse.model_mape = {inverse_mape}");
    for (label, m) in &chains {
        let _ = writeln!(s, "{label}.tracking_mape = {}", m.mape);
        let _ = writeln!(s, "{label}.nsavi = {}", m.nsavi);
    }
    let _ = writeln!(s, "analysis.phi1 = {phi1}");
    for (branch, attracting, n) in &branches {
        let _ = writeln!(s, "analysis.{branch}.attracting = {attracting}/{n}");
    }
    for r in &rows {
        let v = |x: Option<f64>| x.map_or_else(|| "nan".to_string(), |v| v.to_string());
        let _ = writeln!(
            s,
            "sampling.{}.model_mape = {}",
            r.sample_time,
            v(r.model_mape)
        );
        let _ = writeln!(
            s,
            "sampling.{}.tracking_mape = {}",
            r.sample_time,
            v(r.tracking_mape)
        );
    }
    if let Some(records) = &betas {
        let widths: Vec<f64> = records
            .iter()
            .filter_map(|r| r.geometry.map(|g| g.width()))
            .collect();
        let _ = writeln!(s, "beta_sweep.loops = {}", widths.len());
        if let (Some(first), Some(last)) = (widths.first(), widths.last()) {
            let _ = writeln!(s, "beta_sweep.width_first = {first}");
            let _ = writeln!(s, "beta_sweep.width_last = {last}");
        }
    }
    let path = ctx.write_text("report.txt", &s)?;
    print!("{s}");
    println!("{}", path.display());
    Ok(())
}
