//! Forward regression with orthogonal least squares and AIC model sizing.

use std::cmp::Ordering;
use std::fmt::Write as _;

use crate::error::{Error, Result};
use crate::estimation::ls::least_squares;
use crate::linalg::{dot, Matrix};
use crate::narx::regression::build_regressor_matrix;
use crate::narx::signal::Signal;
use crate::narx::term::Term;
use crate::scalar::Scalar;

/// Candidates whose orthogonalized energy falls below this fraction of
/// their original energy are treated as linearly dependent.
const DEGENERATE_FRACTION: f64 = 1e-12;
/// Relative ERR difference under which two candidates count as tied.
const TIE_TOLERANCE: f64 = 1e-12;

#[derive(Clone, Debug, PartialEq)]
pub struct SelectionStep {
    pub term: Term,
    /// Position of the term in the candidate pool.
    pub pool_index: usize,
    pub err: f64,
    pub cumulative_err: f64,
}

#[derive(Clone, Debug, PartialEq, Default)]
pub struct SelectionReport {
    pub steps: Vec<SelectionStep>,
    /// AIC of the nested models of size `1..=steps.len()`, once computed.
    pub aic: Vec<f64>,
    pub chosen_size: Option<usize>,
    pub notes: Vec<String>,
}

impl SelectionReport {
    pub fn terms(&self) -> Vec<Term> {
        self.steps.iter().map(|s| s.term.clone()).collect()
    }

    /// Terms of the nested model of size `n`.
    pub fn leading_terms(&self, n: usize) -> Vec<Term> {
        self.steps.iter().take(n).map(|s| s.term.clone()).collect()
    }

    pub fn cumulative_err(&self) -> f64 {
        self.steps.last().map_or(0.0, |s| s.cumulative_err)
    }

    pub fn attach_aic(&mut self, choice: &AicChoice) {
        self.aic = choice.aic.clone();
        self.chosen_size = Some(choice.size);
        if let Some(w) = &choice.warning {
            self.notes.push(w.clone());
        }
    }

    /// Comma-separated table with one row per selected term.
    pub fn to_csv(&self) -> String {
        let mut s = String::from("step,term,err,cumulative_err,aic\n");
        for (i, st) in self.steps.iter().enumerate() {
            let aic = self.aic.get(i).map(|a| a.to_string()).unwrap_or_default();
            let _ = writeln!(
                s,
                "{},{},{},{},{}",
                i + 1,
                st.term,
                st.err,
                st.cumulative_err,
                aic
            );
        }
        s
    }
}

/// Ranks pool terms by error reduction ratio, stopping after `max_terms`
/// selections or when no usable candidate is left.
pub fn frols_select<T: Scalar>(
    pool: &[Term],
    u: &Signal<T>,
    y: &Signal<T>,
    max_terms: usize,
) -> Result<SelectionReport> {
    if pool.is_empty() {
        return Err(Error::InvalidArgument("candidate pool is empty".into()));
    }
    if max_terms == 0 {
        return Err(Error::InvalidArgument("max_terms must be >= 1".into()));
    }
    let reg = build_regressor_matrix(pool, u, y)?;
    frols_matrix(pool, &reg.psi, &reg.target, max_terms)
}

/// FROLS on an explicit regressor matrix whose columns match `pool`.
pub fn frols_matrix<T: Scalar>(
    pool: &[Term],
    psi: &Matrix<T>,
    target: &[T],
    max_terms: usize,
) -> Result<SelectionReport> {
    assert_eq!(pool.len(), psi.cols());
    let yy = dot(target, target);
    if yy == T::zero() {
        return Err(Error::InvalidArgument(
            "target is identically zero; ERR is undefined".into(),
        ));
    }
    let mut cols: Vec<Vec<T>> = (0..psi.cols()).map(|j| psi.col(j).to_vec()).collect();
    let energy: Vec<T> = cols.iter().map(|c| dot(c, c)).collect();
    let mut active: Vec<bool> = vec![true; pool.len()];
    let mut report = SelectionReport::default();
    let mut cumulative = 0.0;

    while report.steps.len() < max_terms {
        let mut best: Option<(usize, f64)> = None;
        for j in 0..pool.len() {
            if !active[j] {
                continue;
            }
            let ww = dot(&cols[j], &cols[j]);
            if !(ww > T::lit(DEGENERATE_FRACTION) * energy[j]) {
                active[j] = false;
                report.notes.push(format!(
                    "skipped {}: orthogonalized regressor vanishes (linearly dependent on selected terms)",
                    pool[j]
                ));
                continue;
            }
            let wy = dot(&cols[j], target);
            let err = (wy * wy / (ww * yy)).to_f64_lossy();
            best = match best {
                None => Some((j, err)),
                Some((b, be)) => {
                    let scale = be.abs().max(err.abs()).max(f64::MIN_POSITIVE);
                    if (err - be).abs() <= TIE_TOLERANCE * scale {
                        if pool[j].tie_order(&pool[b]) == Ordering::Less {
                            Some((j, err))
                        } else {
                            Some((b, be))
                        }
                    } else if err > be {
                        Some((j, err))
                    } else {
                        Some((b, be))
                    }
                }
            };
        }
        let Some((j, err)) = best else {
            report.notes.push(format!(
                "candidate pool exhausted after {} terms",
                report.steps.len()
            ));
            break;
        };
        active[j] = false;
        cumulative += err;
        report.steps.push(SelectionStep {
            term: pool[j].clone(),
            pool_index: j,
            err,
            cumulative_err: cumulative,
        });

        let w = std::mem::take(&mut cols[j]);
        let ww = dot(&w, &w);
        for (k, col) in cols.iter_mut().enumerate() {
            if !active[k] {
                continue;
            }
            let a = dot(&w, col) / ww;
            for (c, &wi) in col.iter_mut().zip(&w) {
                *c -= a * wi;
            }
        }
    }
    Ok(report)
}

#[derive(Clone, Debug, PartialEq)]
pub struct AicChoice {
    pub size: usize,
    /// `AIC(n)` for `n = 1..=aic.len()`.
    pub aic: Vec<f64>,
    pub warning: Option<String>,
}

/// Picks the size minimizing `N ln(var_n) + 2n`, where `variances[n-1]` is
/// the residual variance of the model with `n` terms. Ties go to the smaller
/// model; a minimum at the largest size comes with a warning.
pub fn aic_select(variances: &[f64], n_samples: usize) -> AicChoice {
    let n = n_samples as f64;
    let aic: Vec<f64> = variances
        .iter()
        .enumerate()
        .map(|(i, &v)| n * v.max(f64::MIN_POSITIVE).ln() + 2.0 * (i + 1) as f64)
        .collect();
    let mut size = 1;
    for (i, &a) in aic.iter().enumerate() {
        if a < aic[size - 1] {
            size = i + 1;
        }
    }
    let warning = (aic.len() > 1 && size == aic.len()).then(|| {
        format!(
            "AIC still decreasing at the largest examined size {size}; more terms may be warranted"
        )
    });
    AicChoice { size, aic, warning }
}

/// Refits the nested models of a selection report by least squares and
/// chooses their size with [`aic_select`].
pub fn aic_choose_size<T: Scalar>(
    report: &SelectionReport,
    u: &Signal<T>,
    y: &Signal<T>,
) -> Result<AicChoice> {
    if report.steps.is_empty() {
        return Err(Error::InvalidArgument("selection report is empty".into()));
    }
    let terms = report.terms();
    let reg = build_regressor_matrix(&terms, u, y)?;
    let rows = reg.target.len();
    let mut variances = Vec::with_capacity(terms.len());
    for n in 1..=terms.len() {
        let idx: Vec<usize> = (0..n).collect();
        let sub = reg.psi.select_columns(&idx);
        let est = least_squares(&sub, &reg.target)?;
        let pred = sub.mul_vec(&est.theta);
        let rss = reg.target.iter().zip(&pred).fold(0.0, |acc, (&t, &p)| {
            let r = (t - p).to_f64_lossy();
            acc + r * r
        });
        variances.push(rss / rows as f64);
    }
    Ok(aic_select(&variances, rows))
}
