use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::narx::signal::Signal;
use crate::scalar::Scalar;

/// Bouc-Wen actuator `h' = A u' - beta |u'| h - gamma u' |h|`,
/// `y = d_p u - h`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BoucWenParams {
    /// Piezoelectric coefficient, um/V.
    pub d_p: f64,
    /// um/V.
    pub a: f64,
    /// 1/V.
    pub beta: f64,
    /// 1/V.
    pub gamma: f64,
}

impl Default for BoucWenParams {
    fn default() -> Self {
        BoucWenParams {
            d_p: 1.6,
            a: 0.9,
            beta: 0.008,
            gamma: 0.008,
        }
    }
}

impl BoucWenParams {
    pub fn validate(&self) -> Result<()> {
        let all = [self.d_p, self.a, self.beta, self.gamma];
        if all.iter().any(|x| !x.is_finite()) {
            return Err(Error::InvalidArgument(
                "Bouc-Wen parameters must be finite".into(),
            ));
        }
        if self.beta < 0.0 || self.gamma < 0.0 {
            return Err(Error::InvalidArgument(
                "Bouc-Wen beta and gamma must be non-negative".into(),
            ));
        }
        Ok(())
    }
}

/// Integration step, sampling time, record length and noise seed.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SimConfig {
    /// Integration step, s.
    pub dt: f64,
    /// Sampling time, s; an integer multiple of `dt`.
    pub sample_time: f64,
    /// Record length, s.
    pub duration: f64,
    pub seed: u64,
}

impl Default for SimConfig {
    fn default() -> Self {
        SimConfig {
            dt: 0.001,
            sample_time: 0.001,
            duration: 50.0,
            seed: 1,
        }
    }
}

impl SimConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.dt > 0.0 && self.dt.is_finite()) {
            return Err(Error::InvalidArgument("dt must be positive".into()));
        }
        if !(self.duration > 0.0 && self.duration.is_finite()) {
            return Err(Error::InvalidArgument("duration must be positive".into()));
        }
        if self.sample_time < self.dt * (1.0 - 1e-9) {
            return Err(Error::InvalidArgument(format!(
                "sample time {} is shorter than the integration step {}",
                self.sample_time, self.dt
            )));
        }
        let ratio = self.sample_time / self.dt;
        if (ratio - ratio.round()).abs() > 1e-9 * ratio {
            return Err(Error::InvalidArgument(format!(
                "sample time {} is not an integer multiple of dt {}",
                self.sample_time, self.dt
            )));
        }
        if self.n_samples() < 2 {
            return Err(Error::InvalidArgument(
                "duration covers fewer than two samples".into(),
            ));
        }
        Ok(())
    }

    /// Integration steps per sample.
    pub fn decimation(&self) -> usize {
        (self.sample_time / self.dt).round() as usize
    }

    pub fn n_samples(&self) -> usize {
        (self.duration / self.sample_time).round() as usize
    }

    /// Points on the integration grid covering `n_samples` samples.
    pub fn n_fine(&self) -> usize {
        (self.n_samples() - 1) * self.decimation() + 1
    }
}

/// Plant input as a function of time.
#[derive(Clone, Debug, PartialEq)]
pub enum InputSpec<T> {
    /// `offset + amplitude sin(2 pi freq t)` with its exact derivative.
    Sinusoid { amplitude: T, freq_hz: T, offset: T },
    /// Values on the integration grid; the derivative is taken by central
    /// differences (one-sided at the ends).
    Tabulated(Vec<T>),
    /// Samples on a coarser grid, linearly interpolated onto the
    /// integration grid before differentiation.
    Sampled(Signal<T>),
}

/// Input and its derivative at the grid points and at the half steps.
/// Input samples on the integration grid and the input rate between them.
struct Drive<T> {
    u: Vec<T>,
    rate: Rate<T>,
}

enum Rate<T> {
    /// `amplitude * w * cos(w t)`.
    Sinusoid { amplitude: T, w: T, dt: T },
    /// Grid derivative, linearly interpolated inside each step.
    Grid(Vec<T>),
}

impl<T: Scalar> Rate<T> {
    /// Input rate at `t_i + frac * dt`.
    fn at(&self, i: usize, frac: T) -> T {
        match self {
            Rate::Sinusoid { amplitude, w, dt } => {
                let t = (T::lit(i as f64) + frac) * *dt;
                *amplitude * *w * (*w * t).cos()
            }
            Rate::Grid(du) => du[i] + (du[i + 1] - du[i]) * frac,
        }
    }

    /// Fraction of step `i` at which the rate changes sign, if it does so
    /// strictly inside the step.
    fn sign_change(&self, i: usize) -> Option<T> {
        let (d0, d1) = (self.at(i, T::zero()), self.at(i, T::one()));
        if !(d0 * d1 < T::zero()) {
            return None;
        }
        let frac = match self {
            Rate::Sinusoid { w, dt, .. } => {
                let pi = T::PI();
                let half = T::lit(0.5);
                let t0 = T::lit(i as f64) * *dt;
                let n = ((*w * t0 - half * pi) / pi).ceil();
                ((half * pi + n * pi) / *w - t0) / *dt
            }
            Rate::Grid(_) => d0 / (d0 - d1),
        };
        (frac > T::zero() && frac < T::one()).then_some(frac)
    }
}

fn central_difference<T: Scalar>(u: &[T], dt: T) -> Vec<T> {
    let n = u.len();
    if n < 2 {
        return vec![T::zero(); n];
    }
    let two = T::lit(2.0);
    (0..n)
        .map(|i| {
            if i == 0 {
                (u[1] - u[0]) / dt
            } else if i == n - 1 {
                (u[n - 1] - u[n - 2]) / dt
            } else {
                (u[i + 1] - u[i - 1]) / (two * dt)
            }
        })
        .collect()
}

/// Linear interpolation of `samples` (spacing `ratio` grid steps) onto
/// `n` grid points.
pub(crate) fn upsample_linear<T: Scalar>(samples: &[T], ratio: usize, n: usize) -> Vec<T> {
    let mut out = Vec::with_capacity(n);
    for i in 0..n {
        let k = i / ratio;
        let r = i % ratio;
        if r == 0 || k + 1 >= samples.len() {
            out.push(samples[k.min(samples.len() - 1)]);
        } else {
            let w = T::lit(r as f64 / ratio as f64);
            out.push(samples[k] + (samples[k + 1] - samples[k]) * w);
        }
    }
    out
}

impl<T: Scalar> InputSpec<T> {
    fn drive(&self, dt: f64, n: usize) -> Result<Drive<T>> {
        let dt_t = T::lit(dt);
        match self {
            InputSpec::Sinusoid {
                amplitude,
                freq_hz,
                offset,
            } => {
                let w = T::TAU() * *freq_hz;
                let u = (0..n)
                    .map(|i| *offset + *amplitude * (w * T::lit(i as f64 * dt)).sin())
                    .collect();
                Ok(Drive {
                    u,
                    rate: Rate::Sinusoid {
                        amplitude: *amplitude,
                        w,
                        dt: dt_t,
                    },
                })
            }
            InputSpec::Tabulated(values) => {
                if values.len() < n {
                    return Err(Error::InsufficientData {
                        needed: n,
                        got: values.len(),
                    });
                }
                Ok(Self::from_grid(values[..n].to_vec(), dt_t))
            }
            InputSpec::Sampled(sig) => {
                let ratio = sig.sample_time() / dt;
                if ratio < 1.0 - 1e-9 || (ratio - ratio.round()).abs() > 1e-9 * ratio {
                    return Err(Error::InvalidArgument(format!(
                        "input sample time {} is not an integer multiple of dt {dt}",
                        sig.sample_time()
                    )));
                }
                let ratio = ratio.round() as usize;
                let covered = (sig.len().max(1) - 1) * ratio + 1;
                if sig.is_empty() || covered < n {
                    return Err(Error::InsufficientData {
                        needed: (n - 1).div_ceil(ratio) + 1,
                        got: sig.len(),
                    });
                }
                Ok(Self::from_grid(
                    upsample_linear(sig.samples(), ratio, n),
                    dt_t,
                ))
            }
        }
    }

    fn from_grid(u: Vec<T>, dt: T) -> Drive<T> {
        let du = central_difference(&u, dt);
        Drive {
            u,
            rate: Rate::Grid(du),
        }
    }
}

/// Fraction in `(f0, f1)` where the state reaches zero, found by bisection
/// on `advance`, when `h0` and `h1` lie strictly on opposite sides.
fn zero_crossing<T: Scalar>(h0: T, h1: T, f0: T, f1: T, advance: impl Fn(T) -> T) -> Option<T> {
    if !(h0 * h1 < T::zero()) {
        return None;
    }
    let (mut lo, mut hi) = (f0, f1);
    let half = T::lit(0.5);
    for _ in 0..60 {
        let mid = half * (lo + hi);
        if advance(mid) * h0 > T::zero() {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Some(half * (lo + hi))
}

#[derive(Clone, Debug, PartialEq)]
pub struct PlantRun<T> {
    pub u: Signal<T>,
    pub y: Signal<T>,
}

/// Integrates the hysteresis state with classical RK4 from `h(0) = 0` over
/// `n` grid points and returns `(u, y)` on the integration grid.
pub fn simulate_bouc_wen_grid<T: Scalar>(
    params: &BoucWenParams,
    input: &InputSpec<T>,
    dt: f64,
    n: usize,
) -> Result<(Vec<T>, Vec<T>)> {
    params.validate()?;
    if n == 0 {
        return Ok((Vec::new(), Vec::new()));
    }
    let drive = input.drive(dt, n)?;
    let (dp, a, beta, gamma) = (
        T::lit(params.d_p),
        T::lit(params.a),
        T::lit(params.beta),
        T::lit(params.gamma),
    );
    let rhs = |h: T, du: T| a * du - beta * du.abs() * h - gamma * du * h.abs();
    let half = T::lit(0.5);
    let sixth = T::lit(1.0 / 6.0);
    let two = T::lit(2.0);
    let dt_t = T::lit(dt);
    // One RK4 step over the fraction [f0, f1] of grid step i.
    let rk4 = |h: T, i: usize, f0: T, f1: T| {
        let step = (f1 - f0) * dt_t;
        let fm = half * (f0 + f1);
        let (d0, dm, d1) = (
            drive.rate.at(i, f0),
            drive.rate.at(i, fm),
            drive.rate.at(i, f1),
        );
        let k1 = rhs(h, d0);
        let k2 = rhs(h + half * step * k1, dm);
        let k3 = rhs(h + half * step * k2, dm);
        let k4 = rhs(h + step * k3, d1);
        h + step * sixth * (k1 + two * k2 + two * k3 + k4)
    };
    let mut y = Vec::with_capacity(n);
    let mut h = T::zero();
    for i in 0..n {
        if !h.is_finite() {
            return Err(Error::Diverged {
                index: i,
                time: Some(i as f64 * dt),
            });
        }
        y.push(dp * drive.u[i] - h);
        if i + 1 == n {
            break;
        }
        // The right-hand side has kinks where du or h changes sign, so
        // the step is split there to keep each piece smooth.
        let mut f0 = T::zero();
        let mut f1 = drive.rate.sign_change(i).unwrap_or(T::one());
        loop {
            let next = rk4(h, i, f0, f1);
            h = match zero_crossing(h, next, f0, f1, |f| rk4(h, i, f0, f)) {
                Some(c) => rk4(T::zero(), i, c, f1),
                None => next,
            };
            if f1 == T::one() {
                break;
            }
            f0 = f1;
            f1 = T::one();
        }
    }
    Ok((drive.u, y))
}

/// Simulates the plant on the integration grid and keeps every
/// `cfg.decimation()`-th point.
pub fn simulate_bouc_wen<T: Scalar>(
    params: &BoucWenParams,
    input: &InputSpec<T>,
    cfg: &SimConfig,
) -> Result<PlantRun<T>> {
    cfg.validate()?;
    let m = cfg.decimation();
    let (u, y) = simulate_bouc_wen_grid(params, input, cfg.dt, cfg.n_fine())?;
    let pick = |v: Vec<T>| -> Vec<T> { v.into_iter().step_by(m).collect() };
    Ok(PlantRun {
        u: Signal::new(pick(u), cfg.sample_time)?,
        y: Signal::new(pick(y), cfg.sample_time)?,
    })
}
