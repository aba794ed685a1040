use crate::error::{Error, Result};
use crate::scalar::Scalar;

/// Uniformly sampled real sequence.
#[derive(Clone, Debug, PartialEq)]
pub struct Signal<T> {
    samples: Vec<T>,
    sample_time: f64,
}

impl<T: Scalar> Signal<T> {
    pub fn new(samples: Vec<T>, sample_time: f64) -> Result<Self> {
        if !(sample_time > 0.0 && sample_time.is_finite()) {
            return Err(Error::InvalidArgument(format!(
                "sample time must be positive and finite, got {sample_time}"
            )));
        }
        if let Some(i) = samples.iter().position(|x| !x.is_finite()) {
            return Err(Error::InvalidArgument(format!("sample {i} is not finite")));
        }
        Ok(Signal {
            samples,
            sample_time,
        })
    }

    pub fn samples(&self) -> &[T] {
        &self.samples
    }

    pub fn into_samples(self) -> Vec<T> {
        self.samples
    }

    pub fn sample_time(&self) -> f64 {
        self.sample_time
    }

    pub fn len(&self) -> usize {
        self.samples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.samples.is_empty()
    }

    /// Copy of `samples[range]` with the same sample time.
    pub fn slice(&self, range: std::ops::Range<usize>) -> Signal<T> {
        Signal {
            samples: self.samples[range].to_vec(),
            sample_time: self.sample_time,
        }
    }

    /// Keeps every `factor`-th sample, starting at index 0.
    pub fn decimate(&self, factor: usize) -> Result<Signal<T>> {
        if factor == 0 {
            return Err(Error::InvalidArgument("decimation factor 0".into()));
        }
        Ok(Signal {
            samples: self.samples.iter().step_by(factor).copied().collect(),
            sample_time: self.sample_time * factor as f64,
        })
    }

    pub fn duration(&self) -> f64 {
        self.samples.len() as f64 * self.sample_time
    }
}

/// Input differences `phi1[k] = u[k] - u[k-1]` and their signs.
///
/// Index 0 has no predecessor and is defined as zero in both outputs.
pub fn compute_phi<T: Scalar>(u: &Signal<T>) -> Result<(Signal<T>, Signal<T>)> {
    if u.len() < 2 {
        return Err(Error::InsufficientData {
            needed: 2,
            got: u.len(),
        });
    }
    let (phi1, phi2) = phi_vectors(u.samples());
    Ok((
        Signal {
            samples: phi1,
            sample_time: u.sample_time,
        },
        Signal {
            samples: phi2,
            sample_time: u.sample_time,
        },
    ))
}

pub(crate) fn phi_vectors<T: Scalar>(u: &[T]) -> (Vec<T>, Vec<T>) {
    let mut phi1 = vec![T::zero(); u.len()];
    for k in 1..u.len() {
        phi1[k] = u[k] - u[k - 1];
    }
    let phi2 = phi1.iter().map(|d| d.sign3()).collect();
    (phi1, phi2)
}
