//! Separable multi-dimensional FFT on the periodic lattice.

use rustfft::num_complex::Complex;
use rustfft::{FftDirection, FftPlanner};

use crate::scalar::Real;

/// In-place unnormalized transform of a row-major `side^dim` array.
/// `Forward` uses `e^{-2πi kj/n}`, `Inverse` uses `e^{+2πi kj/n}`.
pub fn transform<T: Real>(data: &mut [Complex<T>], side: usize, dim: usize, dir: FftDirection) {
    debug_assert_eq!(data.len(), side.pow(dim as u32));
    let mut planner = FftPlanner::<T>::new();
    let fft = planner.plan_fft(side, dir);
    let mut line = vec![Complex::new(T::zero(), T::zero()); side];
    let mut scratch = vec![Complex::new(T::zero(), T::zero()); fft.get_inplace_scratch_len()];
    for axis in 0..dim {
        let stride = side.pow((dim - 1 - axis) as u32);
        let block = stride * side;
        for outer in (0..data.len()).step_by(block) {
            for inner in 0..stride {
                let base = outer + inner;
                for (i, v) in line.iter_mut().enumerate() {
                    *v = data[base + i * stride];
                }
                fft.process_with_scratch(&mut line, &mut scratch);
                for (i, v) in line.iter().enumerate() {
                    data[base + i * stride] = *v;
                }
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn matches_direct_dft_in_2d() {
        let n = 5;
        let vals: Vec<f64> = (0..n * n).map(|i| ((i * 7 + 3) % 11) as f64 - 4.0).collect();
        let mut data: Vec<Complex<f64>> = vals.iter().map(|&v| Complex::new(v, 0.0)).collect();
        transform(&mut data, n, 2, FftDirection::Forward);
        for k0 in 0..n {
            for k1 in 0..n {
                let mut acc = Complex::new(0.0, 0.0);
                for j0 in 0..n {
                    for j1 in 0..n {
                        let ph = -2.0 * std::f64::consts::PI * ((k0 * j0 + k1 * j1) as f64) / n as f64;
                        acc += Complex::new(ph.cos(), ph.sin()) * vals[j0 * n + j1];
                    }
                }
                assert!((acc - data[k0 * n + k1]).norm() < 1e-10);
            }
        }
    }
}
