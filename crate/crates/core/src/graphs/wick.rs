use crate::error::{Error, Result};
use crate::lattice::PropagatorKernel;
use crate::scalar::Real;

pub const WICK_DEGREE_CAP: usize = 12;

/// `E[Π φ_{x_i}^{k_i}]` under the Gaussian measure with covariance `kernel`,
/// by Isserlis recursion on the first factor.
pub fn wick_oracle<T: Real>(factors: &[(usize, usize)], kernel: &PropagatorKernel<T>) -> Result<T> {
    let sites: Vec<usize> = factors
        .iter()
        .flat_map(|&(x, k)| std::iter::repeat_n(x, k))
        .collect();
    if sites.len() > WICK_DEGREE_CAP {
        return Err(Error::SizeGuard(format!(
            "degree {} exceeds the oracle cap {WICK_DEGREE_CAP}",
            sites.len()
        )));
    }
    if sites.len() % 2 == 1 {
        return Ok(T::zero());
    }
    Ok(isserlis(&sites, kernel))
}

fn isserlis<T: Real>(sites: &[usize], kernel: &PropagatorKernel<T>) -> T {
    match sites {
        [] => T::one(),
        [head, rest @ ..] => {
            let mut total = T::zero();
            for i in 0..rest.len() {
                let mut remaining = rest.to_vec();
                let partner = remaining.remove(i);
                total = total + kernel.between(*head, partner) * isserlis(&remaining, kernel);
            }
            total
        }
    }
}
