use std::collections::BTreeMap;

use super::element::is_connected;
use super::value::smeared_source;
use crate::error::{Error, Result};
use crate::lattice::PropagatorKernel;
use crate::scalar::Real;

/// A vertex species of a polynomial interaction `Σ_x weight · φ_x^legs`.
#[derive(Clone, Copy, Debug)]
pub struct VertexKind<T> {
    pub legs: usize,
    /// Coefficient in the exponent (already carrying the minus sign of `e^{-V}`).
    pub weight: T,
    /// Power of `λ` carried by one vertex.
    pub order: usize,
    /// Whether two legs of the same vertex may be joined (false for Wick-ordered monomials).
    pub self_lines: bool,
}

/// Labeled line pattern shared by many partial matchings.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub(crate) struct Signature {
    /// `mult[a][b]` for `a ≤ b`.
    pub mult: Vec<Vec<u8>>,
    /// Unmatched (external) legs per vertex.
    pub ext: Vec<u8>,
}

#[derive(Clone, Debug)]
pub(crate) struct Block<T> {
    /// Vertex count per kind.
    pub counts: Vec<usize>,
    /// `Π weight^c / Π c!`
    pub prefactor: T,
    pub signatures: Vec<(Signature, u64)>,
}

/// Connected-graph expansion of `log E exp(Σ_v weight_v aᵈ Σ_x φ_x^{legs})`
/// with a linear source, organized by powers of `λ`.
#[derive(Clone, Debug)]
pub struct SeriesExpansion<T> {
    pub kernel: PropagatorKernel<T>,
    pub order: usize,
    /// Field-independent constant added per order (per unit volume).
    pub constant: Vec<T>,
    pub(crate) blocks: Vec<Vec<Block<T>>>,
}

fn factorial<T: Real>(k: usize) -> T {
    (1..=k).fold(T::one(), |acc, i| acc * T::of_usize(i))
}

fn compositions(kinds: &[(usize, usize)], target: usize) -> Vec<Vec<usize>> {
    // kinds: (index, order)
    fn rec(kinds: &[(usize, usize)], target: usize, acc: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        match kinds.split_first() {
            None => {
                if target == 0 {
                    out.push(acc.clone());
                }
            }
            Some((&(_, order), rest)) => {
                for c in 0..=target / order {
                    acc.push(c);
                    rec(rest, target - c * order, acc, out);
                    acc.pop();
                }
            }
        }
    }
    let mut out = Vec::new();
    rec(kinds, target, &mut Vec::new(), &mut out);
    out
}

fn signatures<T: Real>(kinds: &[VertexKind<T>], counts: &[usize]) -> Vec<(Signature, u64)> {
    let mut owner = Vec::new();
    let mut allow_self = Vec::new();
    for (t, &c) in counts.iter().enumerate() {
        for _ in 0..c {
            let v = allow_self.len();
            allow_self.push(kinds[t].self_lines);
            owner.extend(std::iter::repeat_n(v, kinds[t].legs));
        }
    }
    let nv = allow_self.len();
    let m = owner.len();
    let mut map: BTreeMap<Signature, u64> = BTreeMap::new();
    let mut used = vec![false; m];
    let mut pairs: Vec<(usize, usize)> = Vec::new();

    #[allow(clippy::too_many_arguments)]
    fn rec(
        i: usize,
        owner: &[usize],
        allow_self: &[bool],
        used: &mut [bool],
        pairs: &mut Vec<(usize, usize)>,
        map: &mut BTreeMap<Signature, u64>,
        nv: usize,
    ) {
        let m = owner.len();
        let Some(i) = (i..m).find(|&k| !used[k]) else {
            let lines: Vec<(usize, usize)> = pairs.iter().map(|&(u, v)| (owner[u], owner[v])).collect();
            if nv > 1 && !is_connected(nv, lines.iter().copied()) {
                return;
            }
            let mut mult = vec![vec![0u8; nv]; nv];
            for &(a, b) in &lines {
                mult[a.min(b)][a.max(b)] += 1;
            }
            let mut ext = vec![0u8; nv];
            let matched: Vec<bool> = {
                let mut mk = vec![false; m];
                for &(u, v) in pairs.iter() {
                    mk[u] = true;
                    mk[v] = true;
                }
                mk
            };
            for (leg, &o) in owner.iter().enumerate() {
                if !matched[leg] {
                    ext[o] += 1;
                }
            }
            *map.entry(Signature { mult, ext }).or_insert(0) += 1;
            return;
        };
        // leg i stays external
        used[i] = true;
        rec(i + 1, owner, allow_self, used, pairs, map, nv);
        for j in i + 1..m {
            if used[j] || (owner[i] == owner[j] && !allow_self[owner[i]]) {
                continue;
            }
            used[j] = true;
            pairs.push((i, j));
            rec(i + 1, owner, allow_self, used, pairs, map, nv);
            pairs.pop();
            used[j] = false;
        }
        used[i] = false;
    }
    // "used" marks legs already decided; externals are recovered as unpaired legs
    rec(0, &owner, &allow_self, &mut used, &mut pairs, &mut map, nv);
    map.into_iter().collect()
}

impl<T: Real> SeriesExpansion<T> {
    /// Enumerates all connected vertex patterns through `order`.
    pub fn build(kernel: &PropagatorKernel<T>, kinds: &[VertexKind<T>], constant: Vec<T>, order: usize) -> Result<Self> {
        if kinds.iter().any(|k| k.order == 0) {
            return Err(Error::InvalidArgument("vertex kinds must carry a positive order".into()));
        }
        let indexed: Vec<(usize, usize)> = kinds.iter().enumerate().map(|(i, k)| (i, k.order)).collect();
        let mut blocks = vec![Vec::new()];
        for k in 1..=order {
            let mut level = Vec::new();
            for counts in compositions(&indexed, k) {
                let legs: usize = counts.iter().zip(kinds).map(|(c, kd)| c * kd.legs).sum();
                if legs > 16 {
                    return Err(Error::SizeGuard(format!("{legs} legs at order {k}")));
                }
                let mut prefactor = T::one();
                for (c, kd) in counts.iter().zip(kinds) {
                    prefactor = prefactor * kd.weight.powi(*c as i32) / factorial::<T>(*c);
                }
                let signatures = signatures(kinds, &counts);
                level.push(Block { counts, prefactor, signatures });
            }
            blocks.push(level);
        }
        let mut constant = constant;
        constant.resize(order + 1, T::zero());
        Ok(Self { kernel: kernel.clone(), order, constant, blocks })
    }

    fn volume(&self) -> T {
        T::of(self.kernel.spec.volume())
    }

    /// `(1/|Λ|)` times the order-`k` contribution with exactly `r` source legs
    /// (the field-independent constant is included in `r = 0`).
    pub fn legs(&self, k: usize, r: usize, f: &[T]) -> T {
        let spec = &self.kernel.spec;
        let ad = T::of(spec.cell_volume());
        let vol = self.volume();
        if k == 0 {
            if r != 2 {
                return T::zero();
            }
            let s = smeared_source(&self.kernel, f);
            let fcf: T = f.iter().zip(&s).map(|(&a, &b)| a * b).sum();
            return T::of(0.5) * fcf * ad / vol;
        }
        let src: Vec<T> = smeared_source(&self.kernel, f).into_iter().map(|v| -v).collect();
        let mut total = if r == 0 { self.constant[k] } else { T::zero() };
        for block in &self.blocks[k] {
            let nv: usize = block.counts.iter().sum();
            let mut acc = T::zero();
            for (sig, count) in &block.signatures {
                if sig.ext.iter().map(|&e| e as usize).sum::<usize>() != r {
                    continue;
                }
                acc = acc + T::of(*count as f64) * self.position_sum(sig, &src, r == 0);
            }
            total = total + block.prefactor * acc * ad.powi(nv as i32) / vol;
        }
        total
    }

    /// Whole order-`k` contribution per unit volume.
    pub fn term(&self, k: usize, f: &[T]) -> T {
        (0..=4 * k.max(1)).map(|r| self.legs(k, r, f)).fold(T::zero(), |a, b| a + b)
    }

    fn position_sum(&self, sig: &Signature, src: &[T], pin: bool) -> T {
        let n_sites = self.kernel.spec.n_sites();
        let nv = sig.ext.len();
        let free = if pin { nv - 1 } else { nv };
        let mut pos = vec![0usize; nv];
        let mut total = T::zero();
        for idx in 0..n_sites.pow(free as u32) {
            let mut rest = idx;
            for p in pos.iter_mut().skip(nv - free) {
                *p = rest % n_sites;
                rest /= n_sites;
            }
            total = total + self.pattern_value(sig, &pos, |v| src[pos[v]].powi(sig.ext[v] as i32));
        }
        if pin {
            total * T::of_usize(n_sites)
        } else {
            total
        }
    }

    fn pattern_value(&self, sig: &Signature, pos: &[usize], legs: impl Fn(usize) -> T) -> T {
        let nv = sig.ext.len();
        let mut v = T::one();
        for a in 0..nv {
            for b in a..nv {
                let m = sig.mult[a][b];
                if m > 0 {
                    v = v * self.kernel.between(pos[a], pos[b]).powi(m as i32);
                }
            }
            v = v * legs(a);
        }
        v
    }

    /// Symmetric kernel `S^{(k)}_r(y_1..y_r)` with
    /// `legs(k, r, f) = a^{dr} Σ_y S(y) Π f_{y_i}`.
    pub fn kernel_at(&self, k: usize, points: &[usize]) -> T {
        let spec = &self.kernel.spec;
        let r = points.len();
        let vol = self.volume();
        if k == 0 {
            return if r == 2 { T::of(0.5) * self.kernel.between(points[0], points[1]) / vol } else { T::zero() };
        }
        let ad = T::of(spec.cell_volume());
        let n_sites = spec.n_sites();
        let mut total = T::zero();
        for block in &self.blocks[k] {
            let nv: usize = block.counts.iter().sum();
            let mut acc = T::zero();
            for (sig, count) in &block.signatures {
                if sig.ext.iter().map(|&e| e as usize).sum::<usize>() != r {
                    continue;
                }
                let leg_owner: Vec<usize> = (0..nv).flat_map(|v| std::iter::repeat_n(v, sig.ext[v] as usize)).collect();
                let mut pos = vec![0usize; nv];
                let mut sum = T::zero();
                for idx in 0..n_sites.pow(nv as u32) {
                    let mut rest = idx;
                    for p in pos.iter_mut() {
                        *p = rest % n_sites;
                        rest /= n_sites;
                    }
                    let matrix: Vec<Vec<T>> = leg_owner
                        .iter()
                        .map(|&v| points.iter().map(|&y| -self.kernel.between(pos[v], y)).collect())
                        .collect();
                    sum = sum + self.pattern_value(sig, &pos, |_| T::one()) * permanent(&matrix);
                }
                acc = acc + T::of(*count as f64) * sum;
            }
            total = total + block.prefactor * acc * ad.powi(nv as i32);
        }
        total / (factorial::<T>(r) * vol)
    }
}

/// Permanent by expansion along the first row (sizes up to ~8).
pub(crate) fn permanent<T: Real>(m: &[Vec<T>]) -> T {
    fn rec<T: Real>(m: &[Vec<T>], row: usize, used: &mut Vec<bool>) -> T {
        if row == m.len() {
            return T::one();
        }
        let mut total = T::zero();
        for c in 0..m.len() {
            if !used[c] {
                used[c] = true;
                total = total + m[row][c] * rec(m, row + 1, used);
                used[c] = false;
            }
        }
        total
    }
    rec(m, 0, &mut vec![false; m.len()])
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn single_quartic_patterns() {
        let kinds = [VertexKind { legs: 4, weight: 1.0f64, order: 1, self_lines: true }];
        let sigs = signatures(&kinds, &[1]);
        let total: u64 = sigs.iter().map(|(_, c)| c).sum();
        // partial matchings of 4 objects
        assert_eq!(total, 10);
        let wick = [VertexKind { legs: 4, weight: 1.0f64, order: 1, self_lines: false }];
        let sigs = signatures(&wick, &[1]);
        assert_eq!(sigs.len(), 1);
        assert_eq!(sigs[0].1, 1);
    }

    #[test]
    fn two_wick_quartics_without_legs() {
        let wick = [VertexKind { legs: 4, weight: 1.0f64, order: 1, self_lines: false }];
        let sigs = signatures(&wick, &[2]);
        let vac: u64 = sigs.iter().filter(|(s, _)| s.ext == vec![0, 0]).map(|(_, c)| c).sum();
        assert_eq!(vac, 24);
    }

    #[test]
    fn permanent_small() {
        let m = vec![vec![1.0, 2.0], vec![3.0, 4.0]];
        assert_eq!(permanent(&m), 10.0);
    }
}
