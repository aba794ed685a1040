use std::fmt::{self, Write as _};

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::narx::model::NarxModel;
use crate::narx::term::SignalKind;
use crate::scalar::Scalar;

/// Quasi-static points whose denominator magnitude is below this are left
/// undefined.
pub const SINGULAR_DENOMINATOR: f64 = 1e-12;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Branch {
    /// `phi2 = +1`.
    Loading,
    /// `phi2 = -1`.
    Unloading,
}

impl Branch {
    pub fn sign<T: Scalar>(self) -> T {
        match self {
            Branch::Loading => T::one(),
            Branch::Unloading => -T::one(),
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Branch::Loading => "loading",
            Branch::Unloading => "unloading",
        }
    }
}

impl fmt::Display for Branch {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct QuasiStaticCurve<T> {
    pub branch: Branch,
    pub phi1: T,
    pub u_grid: Vec<T>,
    /// `None` where the equilibrium equation is singular.
    pub y_tilde: Vec<Option<T>>,
    pub attracting: Vec<bool>,
}

impl<T: Scalar> QuasiStaticCurve<T> {
    pub fn len(&self) -> usize {
        self.u_grid.len()
    }

    pub fn is_empty(&self) -> bool {
        self.u_grid.is_empty()
    }

    /// Columns `u,y_tilde,attracting,branch`; undefined points print `nan`.
    pub fn to_csv(&self) -> String {
        let mut s = String::from("u,y_tilde,attracting,branch\n");
        for i in 0..self.len() {
            let y = self.y_tilde[i].map_or_else(|| "nan".to_string(), |v| v.to_string());
            let _ = writeln!(
                s,
                "{},{},{},{}",
                self.u_grid[i],
                y,
                u8::from(self.attracting[i]),
                self.branch
            );
        }
        s
    }
}

/// Affine decomposition `F = N + sum_j a_j y_j` at a frozen operating point,
/// with `a[j-1]` multiplying `y[k-j]`. `pure` is the part of `sum_j a_j`
/// contributed by bare output lags and `varying` the rest.
struct Affine<T> {
    constant: T,
    a: Vec<T>,
    pure: T,
    varying: T,
}

fn freeze<T: Scalar>(model: &NarxModel<T>, u: T, phi1: T, branch: Branch) -> Result<Affine<T>> {
    let phi2: T = branch.sign();
    let nonaffine: Vec<String> = model
        .terms()
        .iter()
        .filter(|t| t.degree_of(SignalKind::Output) > 1)
        .map(|t| t.to_string())
        .collect();
    if !nonaffine.is_empty() {
        return Err(Error::structural(
            "model is not affine in the output lags; quasi-static solution is not unique",
            nonaffine,
        ));
    }
    let mut constant = T::zero();
    let mut a = vec![T::zero(); model.n_y()];
    let (mut pure, mut varying) = (T::zero(), T::zero());
    for (term, th) in model.iter() {
        let mut out_lag = None;
        let v = term.eval(|kind, lag| match kind {
            SignalKind::Output => {
                out_lag = Some(lag);
                T::one()
            }
            SignalKind::Input => u,
            SignalKind::Phi1 => phi1,
            SignalKind::Phi2 => phi2,
        });
        match out_lag {
            Some(lag) => {
                a[lag - 1] += th * v;
                if term.linear_output_lag().is_some() {
                    pure += th * v;
                } else {
                    varying += th * v;
                }
            }
            None => constant += th * v,
        }
    }
    Ok(Affine {
        constant,
        a,
        pure,
        varying,
    })
}

/// Largest root magnitude of `z^n - a_1 z^(n-1) - ... - a_n`, the spectral
/// radius of the companion matrix of `a`.
pub fn spectral_radius(a: &[f64]) -> f64 {
    let n = a.len();
    match n {
        0 => 0.0,
        1 => a[0].abs(),
        _ => durand_kerner(a)
            .iter()
            .map(|z| z.norm())
            .fold(0.0, f64::max),
    }
}

fn durand_kerner(a: &[f64]) -> Vec<Complex64> {
    let n = a.len();
    let poly = |z: Complex64| {
        let mut p = Complex64::new(1.0, 0.0);
        for &c in a {
            p = p * z - c;
        }
        p
    };
    let bound = 1.0 + a.iter().fold(0.0f64, |m, c| m.max(c.abs()));
    let seed = Complex64::new(0.4, 0.9);
    let mut roots: Vec<Complex64> = (0..n).map(|i| seed.powu(i as u32) * bound).collect();
    for _ in 0..500 {
        let mut delta = 0.0f64;
        for i in 0..n {
            let mut den = Complex64::new(1.0, 0.0);
            for j in 0..n {
                if i != j {
                    den *= roots[i] - roots[j];
                }
            }
            if den.norm() == 0.0 {
                roots[i] += Complex64::new(1e-9, 1e-9);
                continue;
            }
            let step = poly(roots[i]) / den;
            roots[i] -= step;
            delta = delta.max(step.norm());
        }
        if delta < 1e-15 * bound {
            break;
        }
    }
    roots
}

/// True iff the output Jacobian at the frozen operating point has spectral
/// radius strictly below one. The boundary counts as not attracting.
pub fn attracting_test<T: Scalar>(
    model: &NarxModel<T>,
    u: T,
    phi1: T,
    branch: Branch,
) -> Result<bool> {
    let aff = freeze(model, u, phi1, branch)?;
    let a: Vec<f64> = aff.a.iter().map(|x| x.to_f64_lossy()).collect();
    Ok(spectral_radius(&a) < 1.0)
}

/// Solves `y = N(u) + a(u) y` on every grid point, with all output lags set
/// to a common value, the input increment fixed to `phi1` and its sign set
/// by `branch`.
pub fn quasi_static_solve<T: Scalar>(
    model: &NarxModel<T>,
    u_grid: &[T],
    phi1: T,
    branch: Branch,
) -> Result<QuasiStaticCurve<T>> {
    let mut y_tilde = Vec::with_capacity(u_grid.len());
    let mut attracting = Vec::with_capacity(u_grid.len());
    for &u in u_grid {
        let aff = freeze(model, u, phi1, branch)?;
        let den = (T::one() - aff.pure) - aff.varying;
        y_tilde.push(if den.abs() < T::lit(SINGULAR_DENOMINATOR) {
            None
        } else {
            Some(aff.constant / den)
        });
        let a: Vec<f64> = aff.a.iter().map(|x| x.to_f64_lossy()).collect();
        attracting.push(spectral_radius(&a) < 1.0);
    }
    Ok(QuasiStaticCurve {
        branch,
        phi1,
        u_grid: u_grid.to_vec(),
        y_tilde,
        attracting,
    })
}

/// Shoelace signed area of the closed polygon through the points.
/// Positive for counter-clockwise traversal.
pub fn signed_area(x: &[f64], y: &[f64]) -> f64 {
    let n = x.len().min(y.len());
    if n < 3 {
        return 0.0;
    }
    let mut acc = 0.0;
    for i in 0..n {
        let j = (i + 1) % n;
        acc += x[i] * y[j] - x[j] * y[i];
    }
    0.5 * acc
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum LoopOrientation {
    CounterClockwise,
    Clockwise,
    Degenerate,
}

pub fn loop_orientation(x: &[f64], y: &[f64]) -> LoopOrientation {
    let a = signed_area(x, y);
    if a > 0.0 {
        LoopOrientation::CounterClockwise
    } else if a < 0.0 {
        LoopOrientation::Clockwise
    } else {
        LoopOrientation::Degenerate
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn model(terms: &[&str], theta: Vec<f64>) -> NarxModel<f64> {
        NarxModel::from_terms(
            terms.iter().map(|s| s.parse().unwrap()).collect(),
            theta,
            0.001,
        )
        .unwrap()
    }

    #[test]
    fn spectral_radius_of_known_polynomials() {
        // z^2 - 0.5 z - 0.06 = (z - 0.6)(z + 0.1)
        assert!((spectral_radius(&[0.5, 0.06]) - 0.6).abs() < 1e-12);
        // z^2 + 0.25 has roots +-0.5i
        assert!((spectral_radius(&[0.0, -0.25]) - 0.5).abs() < 1e-12);
        assert_eq!(spectral_radius(&[0.5]), 0.5);
    }

    #[test]
    fn boundary_is_not_attracting() {
        let m = model(&["y[k-1]", "phi1[k-1]"], vec![1.0, 0.3]);
        assert!(!attracting_test(&m, 3.0, 0.1, Branch::Loading).unwrap());
        let m = model(&["y[k-1]", "u[k-1]"], vec![0.5, 1.0]);
        assert!(attracting_test(&m, 3.0, 0.1, Branch::Unloading).unwrap());
    }

    #[test]
    fn degenerate_continuum_flags_undefined_points() {
        let m = model(&["y[k-1]", "phi1[k-1]"], vec![1.0, 1.0]);
        let c = quasi_static_solve(&m, &[-1.0, 0.0, 1.0], 0.01, Branch::Loading).unwrap();
        assert!(c.y_tilde.iter().all(Option::is_none));
        assert!(c.to_csv().contains("nan"));
    }

    #[test]
    fn non_affine_model_rejected() {
        let m = model(&["y[k-1]", "y[k-1]^2*u[k-1]"], vec![0.5, 0.1]);
        assert!(matches!(
            quasi_static_solve(&m, &[1.0], 0.1, Branch::Loading),
            Err(Error::Structural { .. })
        ));
    }

    #[test]
    fn orientation_of_unit_square() {
        let x = [0.0, 1.0, 1.0, 0.0];
        let y = [0.0, 0.0, 1.0, 1.0];
        assert_eq!(signed_area(&x, &y), 1.0);
        assert_eq!(loop_orientation(&x, &y), LoopOrientation::CounterClockwise);
        assert_eq!(loop_orientation(&y, &x), LoopOrientation::Clockwise);
    }
}
