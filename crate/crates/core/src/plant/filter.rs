//! Digital Butterworth low-pass filters as cascaded second-order sections.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::scalar::Scalar;

/// `H(z) = (b0 + b1 z^-1 + b2 z^-2) / (1 + a1 z^-1 + a2 z^-2)`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Biquad {
    pub b: [f64; 3],
    pub a: [f64; 2],
}

impl Biquad {
    fn response(&self, z_inv: Complex64) -> Complex64 {
        let z2 = z_inv * z_inv;
        (self.b[0] + self.b[1] * z_inv + self.b[2] * z2)
            / (1.0 + self.a[0] * z_inv + self.a[1] * z2)
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct Butterworth {
    sections: Vec<Biquad>,
    poles: Vec<Complex64>,
}

impl Butterworth {
    /// Low-pass of the given order via the bilinear transform with the
    /// cutoff pre-warped, normalized to unit gain at DC.
    pub fn lowpass(order: usize, cutoff_hz: f64, sample_rate_hz: f64) -> Result<Self> {
        if order == 0 {
            return Err(Error::InvalidArgument("filter order must be >= 1".into()));
        }
        if !(cutoff_hz > 0.0) || !(cutoff_hz < 0.5 * sample_rate_hz) {
            return Err(Error::InvalidArgument(format!(
                "cutoff {cutoff_hz} Hz must lie in (0, {}) Hz",
                0.5 * sample_rate_hz
            )));
        }
        let fs2 = 2.0 * sample_rate_hz;
        let wc = fs2 * (std::f64::consts::PI * cutoff_hz / sample_rate_hz).tan();
        let n = order as f64;
        let bilinear = |s: Complex64| (1.0 + s / fs2) / (1.0 - s / fs2);

        let mut sections = Vec::new();
        let mut poles = Vec::new();
        // Upper-half-plane analog poles pair with their conjugates.
        for k in 0..order / 2 {
            let theta = std::f64::consts::PI * (2 * k + 1 + order) as f64 / (2.0 * n);
            let s = Complex64::from_polar(wc, theta);
            let p = bilinear(s);
            poles.push(p);
            poles.push(p.conj());
            let a1 = -2.0 * p.re;
            let a2 = p.norm_sqr();
            let g = (1.0 + a1 + a2) / 4.0;
            sections.push(Biquad {
                b: [g, 2.0 * g, g],
                a: [a1, a2],
            });
        }
        if order % 2 == 1 {
            let p = bilinear(Complex64::new(-wc, 0.0)).re;
            poles.push(Complex64::new(p, 0.0));
            let g = (1.0 - p) / 2.0;
            sections.push(Biquad {
                b: [g, g, 0.0],
                a: [-p, 0.0],
            });
        }
        if let Some(p) = poles.iter().find(|p| p.norm() >= 1.0) {
            return Err(Error::InvalidArgument(format!(
                "filter realization is unstable (pole {p} outside the unit circle)"
            )));
        }
        Ok(Butterworth { sections, poles })
    }

    pub fn sections(&self) -> &[Biquad] {
        &self.sections
    }

    pub fn poles(&self) -> &[Complex64] {
        &self.poles
    }

    /// Complex gain at `freq_hz`.
    pub fn response(&self, freq_hz: f64, sample_rate_hz: f64) -> Complex64 {
        let z_inv = Complex64::from_polar(1.0, -std::f64::consts::TAU * freq_hz / sample_rate_hz);
        self.sections
            .iter()
            .fold(Complex64::new(1.0, 0.0), |acc, s| acc * s.response(z_inv))
    }

    /// Runs the cascade from zero initial state (transposed direct form II).
    pub fn filter<T: Scalar>(&self, x: &[T]) -> Vec<T> {
        let mut out = x.to_vec();
        for s in &self.sections {
            let (b0, b1, b2) = (T::lit(s.b[0]), T::lit(s.b[1]), T::lit(s.b[2]));
            let (a1, a2) = (T::lit(s.a[0]), T::lit(s.a[1]));
            let (mut z1, mut z2) = (T::zero(), T::zero());
            for v in out.iter_mut() {
                let x = *v;
                let y = b0 * x + z1;
                z1 = b1 * x - a1 * y + z2;
                z2 = b2 * x - a2 * y;
                *v = y;
            }
        }
        out
    }
}
