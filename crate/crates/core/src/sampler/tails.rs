use serde::{Deserialize, Serialize};

use super::hoelder::{cube_norm, default_tau, neighbourhood};
use super::layer::sample_layer;
use crate::error::{Error, Result};
use crate::lattice::LatticeSpec;
use crate::stats::{linear_fit, wilson_interval};

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct TailRow {
    pub b: f64,
    /// Samples with `max_Δ ‖z‖_Δ > B`.
    pub count: usize,
    pub p_within: f64,
    pub p_within_ci: (f64, f64),
    pub cube_exceed_rate: f64,
    pub cube_exceed_ci: (f64, f64),
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct TailStats {
    pub h: usize,
    pub n_samples: usize,
    pub tau: f64,
    pub rows: Vec<TailRow>,
    /// Fit of `log P(exceed)` against `B²` over rows with `0 < count < n`.
    pub slope: Option<f64>,
    pub prefactor: Option<f64>,
    pub fit_points: usize,
}

/// Per-sample maxima and per-cube norms of layer `h` over seeds `seed0..seed0+n`.
pub fn layer_norm_samples(spec: &LatticeSpec, h: usize, n_samples: usize, seed0: u64, tau: f64) -> Result<Vec<Vec<f64>>> {
    let nb = neighbourhood(spec, h);
    let cubes = spec.pavement(h);
    (0..n_samples as u64)
        .map(|i| {
            let l = sample_layer(spec, h, seed0.wrapping_add(i))?;
            Ok(cubes.iter().map(|c| cube_norm(spec, &l.values, &nb, c, tau)).collect())
        })
        .collect()
}

pub fn tail_stats(spec: &LatticeSpec, h: usize, b_grid: &[f64], n_samples: usize, seed0: u64) -> Result<TailStats> {
    if n_samples < 1000 {
        return Err(Error::InvalidArgument(format!("need at least 1000 samples, got {n_samples}")));
    }
    let tau = default_tau(spec.dim);
    let norms = layer_norm_samples(spec, h, n_samples, seed0, tau)?;
    let z = 1.96;
    let mut rows = Vec::with_capacity(b_grid.len());
    for &b in b_grid {
        let count = norms.iter().filter(|cs| cs.iter().any(|&v| v > b)).count();
        let cube_total: usize = norms.iter().map(|cs| cs.len()).sum();
        let cube_hits: usize = norms.iter().map(|cs| cs.iter().filter(|&&v| v > b).count()).sum();
        let within = n_samples - count;
        rows.push(TailRow {
            b,
            count,
            p_within: within as f64 / n_samples as f64,
            p_within_ci: wilson_interval(within, n_samples, z),
            cube_exceed_rate: cube_hits as f64 / cube_total as f64,
            cube_exceed_ci: wilson_interval(cube_hits, cube_total, z),
        });
    }
    let (xs, ys): (Vec<f64>, Vec<f64>) = rows
        .iter()
        .filter(|r| r.count > 0 && r.count < n_samples)
        .map(|r| (r.b * r.b, (r.count as f64 / n_samples as f64).ln()))
        .unzip();
    let fit = if xs.len() >= 3 { linear_fit(&xs, &ys) } else { None };
    Ok(TailStats {
        h,
        n_samples,
        tau,
        rows,
        slope: fit.as_ref().map(|f| f.slope),
        prefactor: fit.as_ref().map(|f| f.intercept.exp()),
        fit_points: xs.len(),
    })
}

impl TailStats {
    /// Slope of the log-exceedance fit, or `DegenerateFit` with fewer than 3 usable points.
    pub fn fitted_slope(&self) -> Result<f64> {
        self.slope.ok_or_else(|| {
            Error::DegenerateFit(format!("{} usable tail points, need 3", self.fit_points))
        })
    }

    pub fn write_csv<W: std::io::Write>(&self, mut w: W) -> Result<()> {
        writeln!(w, "B,count,estimate,ci_lo,ci_hi,cube_rate,cube_ci_lo,cube_ci_hi")?;
        for r in &self.rows {
            writeln!(
                w,
                "{},{},{},{},{},{},{},{}",
                r.b, r.count, r.p_within, r.p_within_ci.0, r.p_within_ci.1,
                r.cube_exceed_rate, r.cube_exceed_ci.0, r.cube_exceed_ci.1
            )?;
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn extremes() {
        let s = LatticeSpec::new(2, 1.0, 1.0, 2.0, 2).unwrap();
        let t = tail_stats(&s, 1, &[0.0, 1e6], 1000, 1).unwrap();
        assert_eq!(t.rows[0].count, 1000);
        assert_eq!(t.rows[0].p_within, 0.0);
        assert_eq!(t.rows[1].count, 0);
        assert_eq!(t.rows[1].p_within, 1.0);
        assert!(t.fitted_slope().is_err());
    }

    #[test]
    fn too_few_samples() {
        let s = LatticeSpec::new(2, 1.0, 1.0, 2.0, 2).unwrap();
        assert!(tail_stats(&s, 1, &[1.0], 10, 1).is_err());
    }

    #[test]
    fn csv_has_header_and_rows() {
        let s = LatticeSpec::new(2, 1.0, 1.0, 2.0, 1).unwrap();
        let t = tail_stats(&s, 1, &[0.5, 1.0], 1000, 3).unwrap();
        let mut buf = Vec::new();
        t.write_csv(&mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        assert_eq!(text.lines().count(), 3);
        assert!(text.starts_with("B,count,estimate"));
    }
}
