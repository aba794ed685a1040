use crate::error::{Error, Result};
use crate::linalg::Matrix;
use crate::narx::model::warmup_of;
use crate::narx::signal::{phi_vectors, Signal};
use crate::narx::term::{SignalKind, Term};
use crate::scalar::Scalar;

/// Lagged signal lookup shared by regression, prediction and analysis.
pub(crate) struct Channels<'a, T> {
    pub y: &'a [T],
    pub u: &'a [T],
    pub phi1: Vec<T>,
    pub phi2: Vec<T>,
}

impl<'a, T: Scalar> Channels<'a, T> {
    pub fn new(u: &'a [T], y: &'a [T]) -> Self {
        let (phi1, phi2) = phi_vectors(u);
        Channels { y, u, phi1, phi2 }
    }

    #[inline]
    pub fn at(&self, k: usize, kind: SignalKind, lag: usize) -> T {
        let i = k - lag;
        match kind {
            SignalKind::Output => self.y[i],
            SignalKind::Input => self.u[i],
            SignalKind::Phi1 => self.phi1[i],
            SignalKind::Phi2 => self.phi2[i],
        }
    }
}

/// Regressor matrix with its target vector. Row `r` corresponds to time
/// index `start + r`.
#[derive(Clone, Debug)]
pub struct Regression<T> {
    pub psi: Matrix<T>,
    pub target: Vec<T>,
    pub start: usize,
}

/// Evaluates every pool term along the record. Rows begin at the first
/// index where all lagged samples, including the predecessor each
/// difference needs, exist.
pub fn build_regressor_matrix<T: Scalar>(
    pool: &[Term],
    u: &Signal<T>,
    y: &Signal<T>,
) -> Result<Regression<T>> {
    if u.len() != y.len() {
        return Err(Error::InvalidArgument(format!(
            "input has {} samples but output has {}",
            u.len(),
            y.len()
        )));
    }
    let start = warmup_of(pool);
    if y.len() <= start {
        return Err(Error::InsufficientData {
            needed: start + 1,
            got: y.len(),
        });
    }
    let ch = Channels::new(u.samples(), y.samples());
    let rows = y.len() - start;
    let columns = pool
        .iter()
        .map(|term| {
            (start..y.len())
                .map(|k| term.eval(|kind, lag| ch.at(k, kind, lag)))
                .collect()
        })
        .collect();
    Ok(Regression {
        psi: Matrix::from_columns(columns),
        target: y.samples()[start..].to_vec(),
        start: start.min(start + rows),
    })
}
