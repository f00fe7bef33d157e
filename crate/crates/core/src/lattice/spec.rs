use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::error::{Error, Result};

const INTEGRALITY_TOL: f64 = 1e-9;

/// Periodic lattice discretizing the box of side `box_side`.
///
/// The spacing is tied to the cutoff, `a = 1/(m γ^N)`, so the finest
/// pavement cubes are single sites.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LatticeSpec {
    pub dim: usize,
    /// Physical side of the box; `box_side * mass` must be a positive integer.
    pub box_side: f64,
    pub mass: f64,
    pub gamma: f64,
    pub cutoff: usize,
    #[serde(skip)]
    side: usize,
}

fn as_integer(x: f64) -> Option<usize> {
    let r = x.round();
    if r >= 1.0 && (x - r).abs() <= INTEGRALITY_TOL * r.max(1.0) {
        Some(r as usize)
    } else {
        None
    }
}

impl LatticeSpec {
    pub fn new(dim: usize, box_side: f64, mass: f64, gamma: f64, cutoff: usize) -> Result<Self> {
        if dim < 1 {
            return Err(Error::InvalidLattice("dimension must be positive".into()));
        }
        if !(mass > 0.0 && mass.is_finite()) {
            return Err(Error::InvalidLattice(format!("mass must be positive, got {mass}")));
        }
        if !(gamma > 1.0 && gamma.is_finite()) {
            return Err(Error::InvalidLattice(format!("gamma must exceed 1, got {gamma}")));
        }
        if cutoff < 1 {
            return Err(Error::InvalidLattice("cutoff N must be at least 1".into()));
        }
        if as_integer(box_side * mass).is_none() {
            return Err(Error::InvalidLattice(format!(
                "box side {box_side} is not an integer multiple of 1/m"
            )));
        }
        let sites = box_side * mass * gamma.powi(cutoff as i32);
        let side = as_integer(sites).ok_or_else(|| {
            Error::InvalidLattice(format!("L m gamma^N = {sites} is not a positive integer"))
        })?;
        Ok(Self { dim, box_side, mass, gamma, cutoff, side })
    }

    /// Same box and mass, different cutoff.
    pub fn with_cutoff(&self, cutoff: usize) -> Result<Self> {
        Self::new(self.dim, self.box_side, self.mass, self.gamma, cutoff)
    }

    /// Re-derives the cached site count after deserialization.
    pub fn validated(self) -> Result<Self> {
        Self::new(self.dim, self.box_side, self.mass, self.gamma, self.cutoff)
    }

    pub fn side(&self) -> usize {
        self.side
    }

    pub fn n_sites(&self) -> usize {
        self.side.pow(self.dim as u32)
    }

    pub fn spacing(&self) -> f64 {
        self.box_side / self.side as f64
    }

    /// `a^d`, the lattice measure replacing `dx`.
    pub fn cell_volume(&self) -> f64 {
        self.spacing().powi(self.dim as i32)
    }

    /// `|Λ|`.
    pub fn volume(&self) -> f64 {
        self.box_side.powi(self.dim as i32)
    }

    /// Integer site coordinates of a flat (row-major) index.
    pub fn coords(&self, mut idx: usize) -> Vec<usize> {
        let mut c = vec![0; self.dim];
        for k in (0..self.dim).rev() {
            c[k] = idx % self.side;
            idx /= self.side;
        }
        c
    }

    pub fn index(&self, coords: &[usize]) -> usize {
        coords.iter().fold(0, |acc, &c| acc * self.side + c % self.side)
    }

    /// Flat index of the displacement `y - x` (wrapped).
    pub fn displacement_index(&self, x: usize, y: usize) -> usize {
        let cx = self.coords(x);
        let cy = self.coords(y);
        let n = self.side;
        let d: Vec<usize> = cx.iter().zip(&cy).map(|(a, b)| (b + n - a) % n).collect();
        self.index(&d)
    }

    /// Minimal-image signed components of a displacement index.
    pub fn signed_displacement(&self, idx: usize) -> Vec<i64> {
        let n = self.side as i64;
        self.coords(idx)
            .into_iter()
            .map(|c| {
                let c = c as i64;
                if 2 * c > n {
                    c - n
                } else {
                    c
                }
            })
            .collect()
    }

    /// Euclidean length of a displacement on the periodic torus.
    pub fn torus_length(&self, idx: usize) -> f64 {
        let a = self.spacing();
        self.signed_displacement(idx)
            .iter()
            .map(|&c| (c as f64 * a).powi(2))
            .sum::<f64>()
            .sqrt()
    }

    pub fn torus_distance(&self, x: usize, y: usize) -> f64 {
        self.torus_length(self.displacement_index(x, y))
    }

    /// Integer wave numbers of the mode at flat FFT-ordered index; each
    /// component lies in `(-n/2, n/2]`.
    pub fn wave_numbers(&self, idx: usize) -> Vec<i64> {
        let n = self.side as i64;
        self.coords(idx)
            .into_iter()
            .map(|c| {
                let c = c as i64;
                if 2 * c > n {
                    c - n
                } else {
                    c
                }
            })
            .collect()
    }

    /// `p^2` for the mode at flat index, with `p = 2π k / L`.
    pub fn momentum_sq(&self, idx: usize) -> f64 {
        let unit = 2.0 * std::f64::consts::PI / self.box_side;
        self.wave_numbers(idx).iter().map(|&k| (k as f64 * unit).powi(2)).sum()
    }

    pub fn n_modes(&self) -> usize {
        self.n_sites()
    }

    /// Cube of the pavement `Q_h` (side `γ^{-h}/m`) containing a site.
    pub fn cube_of(&self, site: usize, h: usize) -> Vec<usize> {
        let scale = self.spacing() * self.mass * self.gamma.powi(h as i32);
        self.coords(site)
            .into_iter()
            .map(|c| ((c as f64 * scale) + 1e-9).floor() as usize)
            .collect()
    }

    /// Number of `Q_h` cubes per side.
    pub fn cubes_per_side(&self, h: usize) -> usize {
        (self.box_side * self.mass * self.gamma.powi(h as i32) - 1e-9).ceil() as usize
    }

    /// Sites grouped by `Q_h` cube, in lexicographic cube order.
    pub fn pavement(&self, h: usize) -> Vec<Vec<usize>> {
        let per = self.cubes_per_side(h);
        let mut cubes = vec![Vec::new(); per.pow(self.dim as u32)];
        for s in 0..self.n_sites() {
            let c = self.cube_of(s, h);
            let id = c.iter().fold(0, |acc, &x| acc * per + x.min(per - 1));
            cubes[id].push(s);
        }
        cubes
    }

    /// Hex SHA-256 over the canonical field encoding.
    pub fn canonical_hash(&self) -> String {
        let canon = format!(
            "d={};L={:016x};m={:016x};gamma={:016x};N={}",
            self.dim,
            self.box_side.to_bits(),
            self.mass.to_bits(),
            self.gamma.to_bits(),
            self.cutoff
        );
        Sha256::digest(canon.as_bytes())
            .iter()
            .map(|b| format!("{b:02x}"))
            .collect()
    }
}
