use crate::error::{Error, Result};
use crate::linalg::{dot, norm2, Matrix, Qr};
use crate::scalar::Scalar;

/// Condition estimates above this attach a warning to the estimate.
pub const CONDITION_WARNING: f64 = 1e12;

/// Linear equality constraints `S theta = c`.
#[derive(Clone, Debug, PartialEq)]
pub struct EqualityConstraint<T> {
    pub s: Matrix<T>,
    pub c: Vec<T>,
}

impl<T: Scalar> EqualityConstraint<T> {
    pub fn new(s: Matrix<T>, c: Vec<T>) -> Result<Self> {
        if s.rows() != c.len() {
            return Err(Error::InvalidArgument(format!(
                "constraint matrix has {} rows but c has {} entries",
                s.rows(),
                c.len()
            )));
        }
        if s.rows() > s.cols() {
            return Err(Error::InvalidArgument(format!(
                "{} constraints on {} parameters",
                s.rows(),
                s.cols()
            )));
        }
        Ok(EqualityConstraint { s, c })
    }

    /// No constraints on `n` parameters.
    pub fn empty(n: usize) -> Self {
        EqualityConstraint {
            s: Matrix::zeros(0, n),
            c: Vec::new(),
        }
    }

    pub fn len(&self) -> usize {
        self.c.len()
    }

    pub fn is_empty(&self) -> bool {
        self.c.is_empty()
    }

    /// `max_i |(S theta - c)_i|`.
    pub fn residual(&self, theta: &[T]) -> T {
        self.s
            .mul_vec(theta)
            .iter()
            .zip(&self.c)
            .fold(T::zero(), |m, (&a, &b)| m.max((a - b).abs()))
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct Estimate<T> {
    pub theta: Vec<T>,
    /// Ratio of the largest to smallest `|R_jj|` of the column-equilibrated
    /// regressor matrix.
    pub condition: f64,
    pub warnings: Vec<String>,
}

/// QR factorization of the column-equilibrated regressor matrix.
struct Scaled<T> {
    qr: Qr<T>,
    scale: Vec<T>,
    condition: f64,
}

impl<T: Scalar> Scaled<T> {
    fn new(psi: &Matrix<T>, names: Option<&[String]>) -> Result<Self> {
        let (m, n) = (psi.rows(), psi.cols());
        if n == 0 {
            return Err(Error::InvalidArgument(
                "regressor matrix has no columns".into(),
            ));
        }
        if m < n {
            return Err(Error::InsufficientData { needed: n, got: m });
        }
        let name = |j: usize| {
            names
                .and_then(|v| v.get(j).cloned())
                .unwrap_or_else(|| format!("column {j}"))
        };
        let mut a = psi.clone();
        let mut scale = Vec::with_capacity(n);
        let mut dependent = Vec::new();
        for j in 0..n {
            let nrm = norm2(a.col(j));
            if nrm == T::zero() || !nrm.is_finite() {
                dependent.push((j, name(j)));
                scale.push(T::one());
                continue;
            }
            let d = T::one() / nrm;
            a.col_mut(j).iter_mut().for_each(|x| *x *= d);
            scale.push(d);
        }
        let qr = Qr::new(a);
        let tol = T::epsilon() * T::lit((m as f64).sqrt() * 100.0);
        let mut dmax = T::zero();
        let mut dmin = T::infinity();
        for (j, &r) in qr.diag().iter().enumerate() {
            let r = r.abs();
            if r < tol && !dependent.iter().any(|(i, _)| *i == j) {
                dependent.push((j, name(j)));
            }
            dmax = dmax.max(r);
            dmin = dmin.min(r);
        }
        if !dependent.is_empty() {
            dependent.sort();
            return Err(Error::RankDeficient { columns: dependent });
        }
        Ok(Scaled {
            qr,
            scale,
            condition: (dmax / dmin).to_f64_lossy(),
        })
    }

    fn warnings(&self) -> Vec<String> {
        if self.condition > CONDITION_WARNING {
            vec![format!(
                "regressor matrix is ill-conditioned (condition estimate {:.3e})",
                self.condition
            )]
        } else {
            Vec::new()
        }
    }

    fn solve_scaled(&self, y: &[T]) -> Vec<T> {
        self.qr.solve_least_squares(y)
    }

    fn unscale(&self, z: &[T]) -> Vec<T> {
        z.iter().zip(&self.scale).map(|(&z, &d)| z * d).collect()
    }
}

/// Minimizes `||y - Psi theta||` through a Householder QR of the
/// column-equilibrated `Psi`.
pub fn least_squares<T: Scalar>(psi: &Matrix<T>, y: &[T]) -> Result<Estimate<T>> {
    least_squares_named(psi, y, None)
}

/// As [`least_squares`], naming columns in rank-deficiency errors.
pub fn least_squares_named<T: Scalar>(
    psi: &Matrix<T>,
    y: &[T],
    names: Option<&[String]>,
) -> Result<Estimate<T>> {
    check_rows(psi, y)?;
    let sc = Scaled::new(psi, names)?;
    let theta = sc.unscale(&sc.solve_scaled(y));
    Ok(Estimate {
        theta,
        condition: sc.condition,
        warnings: sc.warnings(),
    })
}

fn check_rows<T: Scalar>(psi: &Matrix<T>, y: &[T]) -> Result<()> {
    if psi.rows() != y.len() {
        return Err(Error::InvalidArgument(format!(
            "regressor matrix has {} rows but target has {}",
            psi.rows(),
            y.len()
        )));
    }
    Ok(())
}

/// Least squares subject to `S theta = c`.
///
/// With `Psi D = QR` for the column scaling `D` and `S' = S D`, the update
/// `z = z_LS - R^-1 W (W^T W)^-1 (S' z_LS - c)` with `W = R^-T S'^T` is the
/// closed-form constrained solution written with triangular solves only.
/// One refinement pass removes the round-off left in the constraint.
pub fn constrained_least_squares<T: Scalar>(
    psi: &Matrix<T>,
    y: &[T],
    con: &EqualityConstraint<T>,
) -> Result<Estimate<T>> {
    constrained_least_squares_named(psi, y, con, None)
}

pub fn constrained_least_squares_named<T: Scalar>(
    psi: &Matrix<T>,
    y: &[T],
    con: &EqualityConstraint<T>,
    names: Option<&[String]>,
) -> Result<Estimate<T>> {
    check_rows(psi, y)?;
    let n = psi.cols();
    if con.s.cols() != n {
        return Err(Error::InvalidArgument(format!(
            "constraint has {} columns but the model has {n} parameters",
            con.s.cols()
        )));
    }
    let sc = Scaled::new(psi, names)?;
    let mut z = sc.solve_scaled(y);
    if con.is_empty() {
        return Ok(Estimate {
            theta: sc.unscale(&z),
            condition: sc.condition,
            warnings: sc.warnings(),
        });
    }

    // S' = S D, one row per constraint.
    let nc = con.len();
    let s_rows: Vec<Vec<T>> = (0..nc)
        .map(|i| {
            con.s
                .row(i)
                .iter()
                .zip(&sc.scale)
                .map(|(&s, &d)| s * d)
                .collect()
        })
        .collect();
    let w = Matrix::from_columns(s_rows.iter().map(|row| sc.qr.solve_rt(row)).collect());
    let wqr = Qr::new(w);
    let wmax = wqr.diag().iter().fold(T::zero(), |m, d| m.max(d.abs()));
    let wtol = T::epsilon() * T::lit(100.0 * n as f64) * wmax;
    if wmax == T::zero() || wqr.diag().iter().any(|d| d.abs() <= wtol) {
        return Err(Error::SingularConstraint(
            "S (Psi^T Psi)^-1 S^T is singular; constraint rows are dependent".into(),
        ));
    }

    for _ in 0..2 {
        let resid: Vec<T> = s_rows
            .iter()
            .zip(&con.c)
            .map(|(row, &c)| dot(row, &z) - c)
            .collect();
        // (W^T W)^-1 resid = R_w^-1 R_w^-T resid
        let lambda = wqr.solve_r(&wqr.solve_rt(&resid));
        let corr = sc.qr.solve_r(&w_times(&s_rows, &sc, &lambda));
        for (zi, ci) in z.iter_mut().zip(corr) {
            *zi -= ci;
        }
    }
    Ok(Estimate {
        theta: sc.unscale(&z),
        condition: sc.condition,
        warnings: sc.warnings(),
    })
}

/// `W lambda` where column `i` of `W` is `R^-T s'_i`.
fn w_times<T: Scalar>(s_rows: &[Vec<T>], sc: &Scaled<T>, lambda: &[T]) -> Vec<T> {
    let n = sc.scale.len();
    let mut comb = vec![T::zero(); n];
    for (row, &l) in s_rows.iter().zip(lambda) {
        for (c, &s) in comb.iter_mut().zip(row) {
            *c += s * l;
        }
    }
    sc.qr.solve_rt(&comb)
}
