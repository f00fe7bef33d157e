use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Largest half-line count the labeled enumeration accepts.
pub const MAX_HALF_LINES: usize = 16;

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum ElementKind {
    Coupling,
    Mass,
    Vacuum,
    External,
}

impl ElementKind {
    pub fn half_lines(self) -> usize {
        match self {
            ElementKind::Coupling => 4,
            ElementKind::Mass => 2,
            ElementKind::Vacuum => 0,
            ElementKind::External => 1,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct GraphElement {
    pub kind: ElementKind,
    pub label: usize,
}

/// Labeled Feynman graph: elements in the order couplings, masses, externals;
/// half-lines numbered consecutively element by element.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct FeynmanGraph {
    pub elements: Vec<GraphElement>,
    pub pairing: Vec<(usize, usize)>,
    pub connected: bool,
}

fn layout(n: usize, p: usize, r: usize) -> Vec<GraphElement> {
    let kinds = std::iter::repeat_n(ElementKind::Coupling, n)
        .chain(std::iter::repeat_n(ElementKind::Mass, p))
        .chain(std::iter::repeat_n(ElementKind::External, r));
    kinds.enumerate().map(|(label, kind)| GraphElement { kind, label }).collect()
}

fn owners(elements: &[GraphElement]) -> Vec<usize> {
    elements
        .iter()
        .enumerate()
        .flat_map(|(i, e)| std::iter::repeat_n(i, e.kind.half_lines()))
        .collect()
}

impl FeynmanGraph {
    pub fn trivial_vacuum() -> Self {
        Self {
            elements: vec![GraphElement { kind: ElementKind::Vacuum, label: 0 }],
            pairing: Vec::new(),
            connected: true,
        }
    }

    pub fn is_trivial(&self) -> bool {
        self.elements.len() == 1 && self.elements[0].kind == ElementKind::Vacuum
    }

    pub fn count(&self, kind: ElementKind) -> usize {
        self.elements.iter().filter(|e| e.kind == kind).count()
    }

    /// `(n, p, r)`.
    pub fn shape(&self) -> (usize, usize, usize) {
        (self.count(ElementKind::Coupling), self.count(ElementKind::Mass), self.count(ElementKind::External))
    }

    /// Element owning each half-line.
    pub fn half_line_owners(&self) -> Vec<usize> {
        owners(&self.elements)
    }

    /// Lines as element pairs `(a, b)` with `a ≤ b`.
    pub fn lines(&self) -> Vec<(usize, usize)> {
        let own = self.half_line_owners();
        self.pairing
            .iter()
            .map(|&(u, v)| {
                let (a, b) = (own[u], own[v]);
                (a.min(b), a.max(b))
            })
            .collect()
    }

    /// Symmetric multiplicity matrix; the diagonal counts self-lines.
    pub fn adjacency(&self) -> Vec<Vec<u8>> {
        let k = self.elements.len();
        let mut adj = vec![vec![0u8; k]; k];
        for (a, b) in self.lines() {
            adj[a][b] += 1;
            if a != b {
                adj[b][a] += 1;
            }
        }
        adj
    }
}

fn find(parent: &mut [usize], mut x: usize) -> usize {
    while parent[x] != x {
        parent[x] = parent[parent[x]];
        x = parent[x];
    }
    x
}

pub(crate) fn is_connected(n_vertices: usize, lines: impl IntoIterator<Item = (usize, usize)>) -> bool {
    if n_vertices == 0 {
        return false;
    }
    let mut parent: Vec<usize> = (0..n_vertices).collect();
    let mut comps = n_vertices;
    for (a, b) in lines {
        let (ra, rb) = (find(&mut parent, a), find(&mut parent, b));
        if ra != rb {
            parent[ra] = rb;
            comps -= 1;
        }
    }
    comps == 1
}

/// Calls `visit` with every perfect matching of `0..m`.
pub(crate) fn for_each_perfect_matching(m: usize, mut visit: impl FnMut(&[(usize, usize)])) {
    fn rec(free: &mut Vec<usize>, acc: &mut Vec<(usize, usize)>, visit: &mut dyn FnMut(&[(usize, usize)])) {
        if free.is_empty() {
            visit(acc);
            return;
        }
        let first = free.remove(0);
        for i in 0..free.len() {
            let partner = free.remove(i);
            acc.push((first, partner));
            rec(free, acc, visit);
            acc.pop();
            free.insert(i, partner);
        }
        free.insert(0, first);
    }
    let mut free: Vec<usize> = (0..m).collect();
    rec(&mut free, &mut Vec::with_capacity(m / 2), &mut visit);
}

fn check_shape(n: usize, p: usize, r: usize) -> Result<usize> {
    let m = 4 * n + 2 * p + r;
    if m % 2 == 1 {
        return Err(Error::InvalidArgument(format!("odd half-line total {m} for (n,p,r)=({n},{p},{r})")));
    }
    if m > MAX_HALF_LINES {
        return Err(Error::SizeGuard(format!("{m} half-lines exceed the enumeration cap {MAX_HALF_LINES}")));
    }
    Ok(m)
}

/// Every perfect matching of the labeled half-lines, connected or not.
pub fn enumerate_all(n: usize, p: usize, r: usize) -> Result<Vec<FeynmanGraph>> {
    let m = check_shape(n, p, r)?;
    if m == 0 {
        return Ok(vec![FeynmanGraph::trivial_vacuum()]);
    }
    let elements = layout(n, p, r);
    let own = owners(&elements);
    let mut out = Vec::new();
    for_each_perfect_matching(m, |pairs| {
        let connected = is_connected(elements.len(), pairs.iter().map(|&(u, v)| (own[u], own[v])));
        out.push(FeynmanGraph { elements: elements.clone(), pairing: pairs.to_vec(), connected });
    });
    Ok(out)
}

/// Connected labeled matchings; `(0,0,0)` yields the single trivial vacuum graph.
pub fn enumerate_connected(n: usize, p: usize, r: usize) -> Result<Vec<FeynmanGraph>> {
    Ok(enumerate_all(n, p, r)?.into_iter().filter(|g| g.connected).collect())
}

/// `(2k-1)!!`, the number of perfect matchings of `2k` objects.
pub fn double_factorial_odd(k: usize) -> u128 {
    (1..=k as u128).map(|i| 2 * i - 1).product()
}

/// Isomorphism class of labeled graphs (relabelings within each element kind).
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Topology {
    pub shape: (usize, usize, usize),
    pub key: String,
    pub adjacency: Vec<Vec<u8>>,
    /// Labeled matchings in the class.
    pub matchings: usize,
}

fn permutations(items: &[usize]) -> Vec<Vec<usize>> {
    if items.len() <= 1 {
        return vec![items.to_vec()];
    }
    let mut out = Vec::new();
    for i in 0..items.len() {
        let mut rest = items.to_vec();
        let head = rest.remove(i);
        for mut tail in permutations(&rest) {
            tail.insert(0, head);
            out.push(tail);
        }
    }
    out
}

/// Lexicographically smallest adjacency over kind-preserving relabelings.
pub fn canonical_adjacency(g: &FeynmanGraph) -> Vec<Vec<u8>> {
    let adj = g.adjacency();
    let k = g.elements.len();
    let mut blocks: Vec<Vec<Vec<usize>>> = Vec::new();
    let mut start = 0;
    while start < k {
        let kind = g.elements[start].kind;
        let end = (start..k).find(|&i| g.elements[i].kind != kind).unwrap_or(k);
        blocks.push(permutations(&(start..end).collect::<Vec<_>>()));
        start = end;
    }
    let mut best: Option<Vec<Vec<u8>>> = None;
    let mut choice = vec![0usize; blocks.len()];
    loop {
        let perm: Vec<usize> = blocks.iter().zip(&choice).flat_map(|(b, &c)| b[c].iter().copied()).collect();
        let cand: Vec<Vec<u8>> = (0..k).map(|i| (0..k).map(|j| adj[perm[i]][perm[j]]).collect()).collect();
        if best.as_ref().is_none_or(|b| cand < *b) {
            best = Some(cand);
        }
        let mut i = 0;
        loop {
            if i == blocks.len() {
                return best.unwrap_or_default();
            }
            choice[i] += 1;
            if choice[i] < blocks[i].len() {
                break;
            }
            choice[i] = 0;
            i += 1;
        }
    }
}

/// Groups labeled matchings into topologies, ordered by key.
pub fn aggregate_topologies(graphs: &[FeynmanGraph]) -> Vec<Topology> {
    let mut map: BTreeMap<String, Topology> = BTreeMap::new();
    for g in graphs {
        let adj = canonical_adjacency(g);
        let key = format!(
            "{:?}|{}",
            g.shape(),
            adj.iter()
                .map(|row| row.iter().map(|v| v.to_string()).collect::<Vec<_>>().join(""))
                .collect::<Vec<_>>()
                .join("/")
        );
        map.entry(key.clone())
            .or_insert_with(|| Topology { shape: g.shape(), key, adjacency: adj, matchings: 0 })
            .matchings += 1;
    }
    map.into_values().collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn single_coupling_vertex() {
        let gs = enumerate_connected(1, 0, 0).unwrap();
        assert_eq!(gs.len(), 3);
        assert_eq!(aggregate_topologies(&gs).len(), 1);
    }

    #[test]
    fn two_coupling_vertices() {
        let all = enumerate_all(2, 0, 0).unwrap();
        assert_eq!(all.len(), 105);
        let conn: Vec<_> = all.into_iter().filter(|g| g.connected).collect();
        assert_eq!(conn.len(), 96);
        let tops = aggregate_topologies(&conn);
        assert_eq!(tops.len(), 2);
        let mut counts: Vec<usize> = tops.iter().map(|t| t.matchings).collect();
        counts.sort();
        assert_eq!(counts, vec![24, 72]);
    }

    #[test]
    fn two_externals_join() {
        let gs = enumerate_connected(0, 0, 2).unwrap();
        assert_eq!(gs.len(), 1);
        assert_eq!(gs[0].pairing, vec![(0, 1)]);
    }

    #[test]
    fn trivial_vacuum_and_odd_totals() {
        let gs = enumerate_connected(0, 0, 0).unwrap();
        assert_eq!(gs.len(), 1);
        assert!(gs[0].is_trivial());
        assert!(enumerate_connected(1, 0, 1).is_err());
        assert!(matches!(enumerate_all(5, 0, 0), Err(Error::SizeGuard(_))));
    }

    #[test]
    fn matching_counts_are_double_factorials() {
        for k in 1..=6 {
            let mut c = 0u128;
            for_each_perfect_matching(2 * k, |_| c += 1);
            assert_eq!(c, double_factorial_odd(k));
        }
        assert_eq!(double_factorial_odd(6), 10395);
    }

    #[test]
    fn triangle_with_double_lines_count() {
        let gs = enumerate_connected(3, 0, 0).unwrap();
        let tops = aggregate_topologies(&gs);
        let tri = tops
            .iter()
            .find(|t| (0..3).all(|i| t.adjacency[i][i] == 0 && (0..3).all(|j| i == j || t.adjacency[i][j] == 2)))
            .unwrap();
        assert_eq!(tri.matchings, 8 * 216);
    }
}
