//! Tracking accuracy and compensation effort indices.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::scalar::Scalar;

/// Mean absolute error as a percentage of the reference range:
/// `100 sum|r - a| / (N (max r - min r))`, after dropping the first
/// `transient_skip` samples of both signals.
pub fn mape<T: Scalar>(reference: &[T], actual: &[T], transient_skip: usize) -> Result<f64> {
    if reference.len() != actual.len() {
        return Err(Error::InvalidArgument(format!(
            "reference has {} samples but actual has {}",
            reference.len(),
            actual.len()
        )));
    }
    if transient_skip >= reference.len() {
        return Err(Error::InsufficientData {
            needed: transient_skip + 1,
            got: reference.len(),
        });
    }
    let r = &reference[transient_skip..];
    let a = &actual[transient_skip..];
    let (lo, hi) = r
        .iter()
        .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), x| {
            let x = x.to_f64_lossy();
            (lo.min(x), hi.max(x))
        });
    let range = hi - lo;
    if !(range > 0.0) {
        return Err(Error::ZeroRange);
    }
    let sum: f64 = r
        .iter()
        .zip(a)
        .map(|(&x, &y)| (x - y).to_f64_lossy().abs())
        .sum();
    Ok(100.0 * sum / (r.len() as f64 * range))
}

/// How the increment ratios of the effort index are aggregated.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize, Default)]
#[serde(rename_all = "kebab-case", tag = "form", deny_unknown_fields)]
pub enum NsaviForm {
    /// `sum|dm| / sum|dr|`; equals one when `m = r`.
    #[default]
    RatioOfSums,
    /// `sum |dm_k| / |dr_k|`, skipping no terms. Reference increments with
    /// magnitude below `epsilon` are an error when `epsilon` is zero and are
    /// clamped to `epsilon` otherwise.
    Pointwise { epsilon: f64 },
}

/// Normalized sum of absolute input variation.
pub fn nsavi<T: Scalar>(m: &[T], r: &[T], transient_skip: usize, form: NsaviForm) -> Result<f64> {
    if m.len() != r.len() {
        return Err(Error::InvalidArgument(format!(
            "input has {} samples but reference has {}",
            m.len(),
            r.len()
        )));
    }
    if transient_skip + 2 > m.len() {
        return Err(Error::InsufficientData {
            needed: transient_skip + 2,
            got: m.len(),
        });
    }
    let m = &m[transient_skip..];
    let r = &r[transient_skip..];
    let inc = |v: &[T], k: usize| (v[k + 1] - v[k]).to_f64_lossy().abs();
    match form {
        NsaviForm::RatioOfSums => {
            let dm: f64 = (0..m.len() - 1).map(|k| inc(m, k)).sum();
            let dr: f64 = (0..r.len() - 1).map(|k| inc(r, k)).sum();
            if dr == 0.0 {
                return Err(Error::ZeroIncrement(transient_skip));
            }
            Ok(dm / dr)
        }
        NsaviForm::Pointwise { epsilon } => {
            let mut acc = 0.0;
            for k in 0..m.len() - 1 {
                let mut d = inc(r, k);
                if d <= epsilon {
                    if epsilon <= 0.0 {
                        return Err(Error::ZeroIncrement(transient_skip + k));
                    }
                    d = epsilon;
                }
                acc += inc(m, k) / d;
            }
            Ok(acc)
        }
    }
}

/// Indices reported for one compensated (or baseline) run.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct MetricsSummary {
    pub mape: f64,
    pub nsavi: f64,
    pub n_samples: usize,
    pub transient_skip: usize,
}
