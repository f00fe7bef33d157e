use std::fmt;

use num_rational::BigRational;
use num_traits::ToPrimitive;
use serde::{Deserialize, Serialize};

/// Exact multiple of ½, stored as its numerator; serialized as its value.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Half(pub i64);

impl Serialize for Half {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_f64(self.to_f64())
    }
}

impl<'de> Deserialize<'de> for Half {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let x = f64::deserialize(d)?;
        let twice = 2.0 * x;
        if twice.fract() != 0.0 {
            return Err(serde::de::Error::custom(format!("{x} is not a multiple of 1/2")));
        }
        Ok(Half(twice as i64))
    }
}

impl Half {
    pub fn from_int(x: i64) -> Self {
        Half(2 * x)
    }

    pub fn to_f64(self) -> f64 {
        self.0 as f64 / 2.0
    }

    pub fn as_integer(self) -> Option<i64> {
        (self.0 % 2 == 0).then_some(self.0 / 2)
    }

    pub fn to_rational(self) -> BigRational {
        BigRational::new(self.0.into(), 2.into())
    }

    pub fn is_positive(self) -> bool {
        self.0 > 0
    }
}

impl std::ops::Add for Half {
    type Output = Half;
    fn add(self, o: Half) -> Half {
        Half(self.0 + o.0)
    }
}

impl fmt::Display for Half {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.as_integer() {
            Some(i) => write!(f, "{i}"),
            None => write!(f, "{}/2", self.0),
        }
    }
}

/// Counted statistics of one cluster.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct NodeStats {
    pub couplings: usize,
    pub externals: usize,
    pub external_lines: usize,
}

/// `ρ = -d + (4-d) n + r (d+2)/2 + (d-2) n^e / 2` and the improved `ρ̄`
/// (`+½` on `d = 3` clusters with `(n, r, n^e) = (2, 0, 2)`).
pub fn rho(stats: NodeStats, dim: usize) -> (Half, Half) {
    let d = dim as i64;
    let n = stats.couplings as i64;
    let r = stats.externals as i64;
    let ne = stats.external_lines as i64;
    let twice = -2 * d + 2 * (4 - d) * n + r * (d + 2) + (d - 2) * ne;
    let rho = Half(twice);
    let improved = dim == 3 && (stats.couplings, stats.externals, stats.external_lines) == (2, 0, 2);
    (rho, if improved { rho + Half(1) } else { rho })
}

pub(crate) fn rational_to_f64(x: &BigRational) -> f64 {
    x.to_f64().unwrap_or(f64::NAN)
}
