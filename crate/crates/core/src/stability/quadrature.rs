use nalgebra::{DMatrix, SymmetricEigen};
use rand::Rng;
use rand_distr::StandardNormal;
use statrs::distribution::{ContinuousCDF, Normal};

use super::config::Method;
use crate::error::{Error, Result};
use crate::sampler::rng::aux_rng;

pub const MAX_QUADRATURE_MODES: usize = 8;
/// Cap on the tensor-product node count.
pub const QUADRATURE_POINT_CAP: u64 = 1 << 26;
/// Independent batches behind the sampling error bars.
pub const SAMPLING_BATCHES: usize = 16;

/// Nodes and weights for `∫ g(x) e^{-x²/2} dx / √(2π)` (Golub–Welsch).
pub fn gauss_hermite(n: usize) -> (Vec<f64>, Vec<f64>) {
    let mut jacobi = DMatrix::<f64>::zeros(n, n);
    for k in 1..n {
        let b = (k as f64).sqrt();
        jacobi[(k - 1, k)] = b;
        jacobi[(k, k - 1)] = b;
    }
    let eig = SymmetricEigen::new(jacobi);
    let mut pairs: Vec<(f64, f64)> = (0..n)
        .map(|i| (eig.eigenvalues[i], eig.eigenvectors[(0, i)].powi(2)))
        .collect();
    pairs.sort_by(|a, b| a.0.total_cmp(&b.0));
    pairs.into_iter().unzip()
}

/// Eigenmodes of a covariance matrix: `φ = Σ_k σ_k ξ_k v_k` with `ξ` standard normal.
#[derive(Clone, Debug)]
pub struct ModeBasis {
    pub n_sites: usize,
    /// `(σ_k, v_k)` for the retained modes.
    pub modes: Vec<(f64, Vec<f64>)>,
}

impl ModeBasis {
    pub fn from_covariance(dense: &[Vec<f64>]) -> Self {
        let n = dense.len();
        let m = DMatrix::from_fn(n, n, |i, j| 0.5 * (dense[i][j] + dense[j][i]));
        let eig = SymmetricEigen::new(m);
        let top = eig.eigenvalues.iter().fold(0.0f64, |a, &b| a.max(b));
        let mut modes: Vec<(f64, Vec<f64>)> = (0..n)
            .filter(|&k| eig.eigenvalues[k] > 1e-14 * top)
            .map(|k| (eig.eigenvalues[k].sqrt(), eig.eigenvectors.column(k).iter().copied().collect()))
            .collect();
        modes.sort_by(|a, b| b.0.total_cmp(&a.0));
        Self { n_sites: n, modes }
    }

    fn field(&self, xi: &[f64], out: &mut [f64]) {
        out.iter_mut().for_each(|v| *v = 0.0);
        for ((s, v), &x) in self.modes.iter().zip(xi) {
            for (o, &c) in out.iter_mut().zip(v) {
                *o += s * x * c;
            }
        }
    }
}

/// Batched weighted averages of a vector observable.
#[derive(Clone, Debug)]
pub struct Averages {
    /// `means[b][k]`: batch `b`, observable `k`.
    pub means: Vec<Vec<f64>>,
    pub points: u64,
}

impl Averages {
    pub fn pooled(&self) -> Vec<f64> {
        let nb = self.means.len() as f64;
        let k = self.means[0].len();
        (0..k).map(|i| self.means.iter().map(|m| m[i]).sum::<f64>() / nb).collect()
    }
}

pub fn check_quadrature(basis: &ModeBasis, nodes: usize) -> Result<()> {
    let m = basis.modes.len();
    if m > MAX_QUADRATURE_MODES {
        return Err(Error::SizeGuard(format!("{m} modes exceed the quadrature cap {MAX_QUADRATURE_MODES}")));
    }
    let points = (nodes as u64).checked_pow(m as u32).unwrap_or(u64::MAX);
    if points > QUADRATURE_POINT_CAP {
        return Err(Error::SizeGuard(format!("{nodes}^{m} nodes exceed {QUADRATURE_POINT_CAP}")));
    }
    Ok(())
}

/// Gaussian averages of `obs(φ, out)` by the chosen method.
pub fn average<F>(basis: &ModeBasis, method: Method, nodes: usize, samples: usize, seed: u64, k: usize, mut obs: F) -> Result<Averages>
where
    F: FnMut(&[f64], &mut [f64]),
{
    let m = basis.modes.len();
    let n = basis.n_sites;
    let mut phi = vec![0.0; n];
    let mut buf = vec![0.0; k];
    match method {
        Method::ExactQuadrature => {
            check_quadrature(basis, nodes)?;
            let (x, w) = gauss_hermite(nodes);
            let mut acc = vec![0.0; k];
            let mut idx = vec![0usize; m];
            // partial fields per level avoid recomputing the full mode sum
            let mut partial = vec![vec![0.0; n]; m + 1];
            let mut weight = vec![1.0; m + 1];
            let mut level = 0;
            let mut points = 0u64;
            loop {
                while level < m {
                    let (s, v) = &basis.modes[level];
                    let node = x[idx[level]];
                    let (lo, hi) = partial.split_at_mut(level + 1);
                    for ((o, &p), &c) in hi[0].iter_mut().zip(&lo[level]).zip(v) {
                        *o = p + s * node * c;
                    }
                    weight[level + 1] = weight[level] * w[idx[level]];
                    level += 1;
                }
                obs(&partial[m], &mut buf);
                for (a, b) in acc.iter_mut().zip(&buf) {
                    *a += weight[m] * b;
                }
                points += 1;
                // odometer
                loop {
                    if level == 0 {
                        return Ok(Averages { means: vec![acc], points });
                    }
                    level -= 1;
                    idx[level] += 1;
                    if idx[level] < nodes {
                        break;
                    }
                    idx[level] = 0;
                }
            }
        }
        Method::MonteCarlo | Method::QuasiMonteCarlo => {
            let per = samples.div_ceil(SAMPLING_BATCHES);
            let normal = Normal::standard();
            let primes = first_primes(m);
            let mut xi = vec![0.0; m];
            let mut means = Vec::with_capacity(SAMPLING_BATCHES);
            for b in 0..SAMPLING_BATCHES {
                let mut rng = aux_rng(seed, b as u64);
                let shift: Vec<f64> = (0..m).map(|_| rng.random::<f64>()).collect();
                let mut acc = vec![0.0; k];
                for i in 0..per {
                    if method == Method::MonteCarlo {
                        xi.iter_mut().for_each(|v| *v = rng.sample(StandardNormal));
                    } else {
                        for (d, v) in xi.iter_mut().enumerate() {
                            let u = (radical_inverse(i as u64 + 1, primes[d]) + shift[d]).fract();
                            *v = normal.inverse_cdf(u.clamp(1e-16, 1.0 - 1e-16));
                        }
                    }
                    basis.field(&xi, &mut phi);
                    obs(&phi, &mut buf);
                    for (a, v) in acc.iter_mut().zip(&buf) {
                        *a += v;
                    }
                }
                means.push(acc.into_iter().map(|a| a / per as f64).collect());
            }
            Ok(Averages { means, points: (per * SAMPLING_BATCHES) as u64 })
        }
    }
}

fn radical_inverse(mut i: u64, base: u64) -> f64 {
    let mut out = 0.0;
    let mut f = 1.0 / base as f64;
    while i > 0 {
        out += (i % base) as f64 * f;
        i /= base;
        f /= base as f64;
    }
    out
}

fn first_primes(n: usize) -> Vec<u64> {
    let mut out = Vec::with_capacity(n);
    let mut c = 2u64;
    while out.len() < n {
        if (2..c).take_while(|d| d * d <= c).all(|d| !c.is_multiple_of(d)) {
            out.push(c);
        }
        c += 1;
    }
    out
}
