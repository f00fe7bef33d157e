use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::scalar::Real;

pub const MAX_WICK_DEGREE: usize = 8;

/// `:φ_x^k:` normal-ordered with respect to a Gaussian of variance `c`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct WickMonomial<T> {
    pub site: usize,
    pub degree: usize,
    pub variance: T,
}

impl<T: Real> WickMonomial<T> {
    /// Ordinary-power expansion as `(power, coefficient)`, highest power first:
    /// `Σ_m (-1)^m k! / (m! (k-2m)! 2^m) c^m φ^{k-2m}`.
    pub fn expand(&self) -> Vec<(usize, T)> {
        let k = self.degree;
        let mut out = Vec::with_capacity(k / 2 + 1);
        let mut coef = T::one();
        for m in 0..=k / 2 {
            if m > 0 {
                // ratio of consecutive terms
                let num = ((k - 2 * m + 2) * (k - 2 * m + 1)) as f64;
                coef = -coef * T::of(num / (2.0 * m as f64)) * self.variance;
            }
            out.push((k - 2 * m, coef));
        }
        out
    }

    pub fn evaluate(&self, phi: T) -> T {
        self.expand().into_iter().map(|(p, c)| c * phi.powi(p as i32)).sum()
    }
}

pub fn wick_power<T: Real>(site: usize, degree: usize, variance: T) -> Result<WickMonomial<T>> {
    if degree > MAX_WICK_DEGREE {
        return Err(Error::InvalidArgument(format!("Wick degree {degree} above {MAX_WICK_DEGREE}")));
    }
    Ok(WickMonomial { site, degree, variance })
}
