use crate::error::{Error, Result};
use crate::narx::term::{SignalKind, Term};
use crate::scalar::Scalar;

/// Polynomial NARX model: `y[k] = sum_i theta[i] * term_i(k)`.
///
/// For inverse models the "input" channel is the plant output advanced by
/// `tau_s` samples and the "output" channel is the plant input.
#[derive(Clone, Debug, PartialEq)]
pub struct NarxModel<T> {
    terms: Vec<Term>,
    theta: Vec<T>,
    n_y: usize,
    n_u: usize,
    tau_d: usize,
    tau_s: usize,
    sample_time: f64,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ModelMeta {
    pub n_y: usize,
    pub n_u: usize,
    pub tau_d: usize,
    pub tau_s: usize,
    pub sample_time: f64,
}

impl<T: Scalar> NarxModel<T> {
    pub fn new(terms: Vec<Term>, theta: Vec<T>, meta: ModelMeta) -> Result<Self> {
        if terms.len() != theta.len() {
            return Err(Error::InvalidArgument(format!(
                "{} terms but {} parameters",
                terms.len(),
                theta.len()
            )));
        }
        if meta.tau_d < 1 {
            return Err(Error::InvalidArgument(
                "pure delay tau_d must be >= 1".into(),
            ));
        }
        if !(meta.sample_time > 0.0) {
            return Err(Error::InvalidArgument(
                "sample time must be positive".into(),
            ));
        }
        let max_lag = meta.n_y.max(meta.n_u);
        for t in &terms {
            for f in t.factors() {
                let limit = if f.kind == SignalKind::Output {
                    meta.n_y
                } else {
                    meta.n_u
                };
                if f.lag > limit || f.lag > max_lag {
                    return Err(Error::InvalidArgument(format!(
                        "term {t} exceeds the declared maximum lag"
                    )));
                }
            }
            if let Some(newest) = t.newest_input_lag() {
                if newest < meta.tau_d {
                    return Err(Error::InvalidArgument(format!(
                        "term {t} reads the input earlier than the pure delay {}",
                        meta.tau_d
                    )));
                }
            }
        }
        if let Some(i) = theta.iter().position(|x| !x.is_finite()) {
            return Err(Error::InvalidArgument(format!(
                "parameter {i} is not finite"
            )));
        }
        Ok(NarxModel {
            terms,
            theta,
            n_y: meta.n_y,
            n_u: meta.n_u,
            tau_d: meta.tau_d,
            tau_s: meta.tau_s,
            sample_time: meta.sample_time,
        })
    }

    /// Builds a model with lags and delay inferred from the terms.
    pub fn from_terms(terms: Vec<Term>, theta: Vec<T>, sample_time: f64) -> Result<Self> {
        let meta = infer_meta(&terms, sample_time);
        NarxModel::new(terms, theta, meta)
    }

    pub fn terms(&self) -> &[Term] {
        &self.terms
    }

    pub fn theta(&self) -> &[T] {
        &self.theta
    }

    pub fn n_y(&self) -> usize {
        self.n_y
    }

    pub fn n_u(&self) -> usize {
        self.n_u
    }

    pub fn tau_d(&self) -> usize {
        self.tau_d
    }

    pub fn tau_s(&self) -> usize {
        self.tau_s
    }

    pub fn sample_time(&self) -> f64 {
        self.sample_time
    }

    pub fn meta(&self) -> ModelMeta {
        ModelMeta {
            n_y: self.n_y,
            n_u: self.n_u,
            tau_d: self.tau_d,
            tau_s: self.tau_s,
            sample_time: self.sample_time,
        }
    }

    pub fn with_theta(&self, theta: Vec<T>) -> Result<Self> {
        NarxModel::new(self.terms.clone(), theta, self.meta())
    }

    pub fn with_tau_s(mut self, tau_s: usize) -> Self {
        self.tau_s = tau_s;
        self
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    /// Samples of history needed before the first prediction.
    pub fn warmup(&self) -> usize {
        warmup_of(&self.terms)
    }

    pub fn iter(&self) -> impl Iterator<Item = (&Term, T)> + '_ {
        self.terms.iter().zip(self.theta.iter().copied())
    }

    pub(crate) fn evaluate(&self, mut value: impl FnMut(SignalKind, usize) -> T) -> T {
        let mut acc = T::zero();
        for (term, th) in self.iter() {
            acc += th * term.eval(&mut value);
        }
        acc
    }
}

/// History needed by a term list; always at least one sample.
pub fn warmup_of(terms: &[Term]) -> usize {
    terms.iter().map(Term::history).max().unwrap_or(0).max(1)
}

pub fn infer_meta(terms: &[Term], sample_time: f64) -> ModelMeta {
    let mut n_y = 0;
    let mut n_u = 0;
    let mut tau_d = usize::MAX;
    for t in terms {
        for f in t.factors() {
            if f.kind == SignalKind::Output {
                n_y = n_y.max(f.lag);
            } else {
                n_u = n_u.max(f.lag);
                tau_d = tau_d.min(f.lag);
            }
        }
    }
    ModelMeta {
        n_y: n_y.max(1),
        n_u: n_u.max(1),
        tau_d: if tau_d == usize::MAX { 1 } else { tau_d },
        tau_s: 0,
        sample_time,
    }
}
