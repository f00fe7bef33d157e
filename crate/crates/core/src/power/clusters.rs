use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graphs::{ElementKind, FeynmanGraph, GraphElement};

/// Feynman graph with a scale label in `1..=cutoff` on every line.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct ScaledGraph {
    pub graph: FeynmanGraph,
    /// One label per entry of `graph.pairing`.
    pub scales: Vec<usize>,
    pub cutoff: usize,
}

impl ScaledGraph {
    pub fn new(graph: FeynmanGraph, scales: Vec<usize>, cutoff: usize) -> Result<Self> {
        if scales.len() != graph.pairing.len() {
            return Err(Error::InvalidArgument(format!(
                "{} scale labels for {} lines",
                scales.len(),
                graph.pairing.len()
            )));
        }
        if let Some(&h) = scales.iter().find(|&&h| h == 0 || h > cutoff) {
            return Err(Error::ScaleOutOfRange { h, n: cutoff });
        }
        if graph.elements.iter().any(|e| !matches!(e.kind, ElementKind::Coupling | ElementKind::External)) {
            return Err(Error::InvalidArgument("only coupling and external elements are power counted".into()));
        }
        Ok(Self { graph, scales, cutoff })
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ClusterNode {
    pub scale: usize,
    /// Index of the enclosing node; `None` for the root.
    pub parent: Option<usize>,
    /// Graph elements inside the cluster.
    pub vertices: Vec<usize>,
    /// Immediate subclusters, trivial ones included (`s_v`).
    pub subclusters: usize,
    /// Coupling elements inside (`n_v`).
    pub couplings: usize,
    /// External elements inside (`r_v`).
    pub externals: usize,
    /// Lines with exactly one end in the cluster (`n^e_v`).
    pub external_lines: usize,
    /// Half-lines of lines whose smallest enclosing cluster is this one.
    pub inner_half_lines: usize,
}

impl ClusterNode {
    /// `4 n_v + r_v - n^e_v`.
    pub fn inner_tilde(&self) -> i64 {
        4 * self.couplings as i64 + self.externals as i64 - self.external_lines as i64
    }
}

/// Node 0 is the root (scale 0, not a cluster); nodes `1..` are the
/// nontrivial clusters, parents listed before children. Trivial clusters are
/// the graph elements, at scale `cutoff + 1`.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct ClusterTree {
    pub cutoff: usize,
    pub nodes: Vec<ClusterNode>,
    /// Smallest nontrivial cluster holding each element.
    pub leaf_parent: Vec<usize>,
}

fn components(n: usize, lines: &[(usize, usize)]) -> Vec<usize> {
    let mut parent: Vec<usize> = (0..n).collect();
    fn find(p: &mut [usize], mut x: usize) -> usize {
        while p[x] != x {
            p[x] = p[p[x]];
            x = p[x];
        }
        x
    }
    for &(a, b) in lines {
        let (ra, rb) = (find(&mut parent, a), find(&mut parent, b));
        if ra != rb {
            parent[ra] = rb;
        }
    }
    (0..n).map(|x| find(&mut parent, x)).collect()
}

pub fn build_clusters(sg: &ScaledGraph) -> Result<ClusterTree> {
    let g = &sg.graph;
    let nv = g.elements.len();
    let lines = g.lines();
    if !crate::graphs::is_connected(nv, lines.iter().copied()) {
        return Err(Error::Disconnected);
    }
    let mut nodes = vec![ClusterNode {
        scale: 0,
        parent: None,
        vertices: (0..nv).collect(),
        subclusters: 0,
        couplings: 0,
        externals: 0,
        external_lines: 0,
        inner_half_lines: 0,
    }];
    // current innermost node for every element
    let mut owner = vec![0usize; nv];
    for h in 1..=sg.cutoff {
        let kept: Vec<(usize, usize)> = lines
            .iter()
            .zip(&sg.scales)
            .filter(|(_, &s)| s >= h)
            .map(|(&l, _)| l)
            .collect();
        let comp = components(nv, &kept);
        let mut roots: Vec<usize> = Vec::new();
        for (&(a, _), &s) in lines.iter().zip(&sg.scales) {
            if s == h && !roots.contains(&comp[a]) {
                roots.push(comp[a]);
            }
        }
        roots.sort_unstable();
        for root in roots {
            let vertices: Vec<usize> = (0..nv).filter(|&x| comp[x] == root).collect();
            let parent = owner[vertices[0]];
            let idx = nodes.len();
            nodes.push(ClusterNode {
                scale: h,
                parent: Some(parent),
                vertices: vertices.clone(),
                subclusters: 0,
                couplings: 0,
                externals: 0,
                external_lines: 0,
                inner_half_lines: 0,
            });
            for &x in &vertices {
                owner[x] = idx;
            }
        }
    }

    for i in 1..nodes.len() {
        let inside: Vec<bool> = {
            let mut m = vec![false; nv];
            for &x in &nodes[i].vertices {
                m[x] = true;
            }
            m
        };
        let node = &mut nodes[i];
        node.couplings = node.vertices.iter().filter(|&&x| g.elements[x].kind == ElementKind::Coupling).count();
        node.externals = node.vertices.iter().filter(|&&x| g.elements[x].kind == ElementKind::External).count();
        node.external_lines = lines.iter().filter(|&&(a, b)| inside[a] != inside[b]).count();
    }
    for i in 1..nodes.len() {
        let p = nodes[i].parent.expect("non-root node has a parent");
        nodes[p].subclusters += 1;
    }
    for &o in &owner {
        nodes[o].subclusters += 1;
    }
    for &(a, b) in &lines {
        // smallest cluster with both ends: walk up from the deeper owner
        let mut u = owner[a];
        while !nodes[u].vertices.contains(&b) {
            u = nodes[u].parent.expect("root holds every element");
        }
        nodes[u].inner_half_lines += 2;
    }
    Ok(ClusterTree { cutoff: sg.cutoff, nodes, leaf_parent: owner })
}

/// Both sides of the two scale-exchange identities.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct IdentityReport {
    pub subcluster_lhs: i64,
    pub subcluster_rhs: i64,
    pub inner_lhs: i64,
    pub inner_rhs: i64,
}

impl IdentityReport {
    pub fn holds(&self) -> bool {
        self.subcluster_lhs == self.subcluster_rhs && self.inner_lhs == self.inner_rhs
    }
}

pub fn verify_identities(tree: &ClusterTree) -> IdentityReport {
    let mut r = IdentityReport { subcluster_lhs: 0, subcluster_rhs: 0, inner_lhs: 0, inner_rhs: 0 };
    for v in tree.nodes.iter().skip(1) {
        let h = v.scale as i64;
        let hp = tree.nodes[v.parent.expect("non-root")].scale as i64;
        r.subcluster_lhs += h * (v.subclusters as i64 - 1);
        r.subcluster_rhs += (h - hp) * ((v.couplings + v.externals) as i64 - 1);
        r.inner_lhs += h * v.inner_half_lines as i64;
        r.inner_rhs += (h - hp) * v.inner_tilde();
    }
    r
}

impl ClusterTree {
    /// Nested box rendering: each cluster as `[h: ...]`, elements numbered from 1.
    pub fn boxes(&self) -> String {
        fn render(t: &ClusterTree, i: usize) -> String {
            let mut parts: Vec<(usize, String)> = Vec::new();
            for (j, n) in t.nodes.iter().enumerate() {
                if n.parent == Some(i) {
                    parts.push((n.vertices[0], render(t, j)));
                }
            }
            for (x, &o) in t.leaf_parent.iter().enumerate() {
                if o == i {
                    parts.push((x, (x + 1).to_string()));
                }
            }
            parts.sort();
            let inner: Vec<String> = parts.into_iter().map(|(_, s)| s).collect();
            if i == 0 {
                inner.join(" ")
            } else {
                format!("[{}: {}]", t.nodes[i].scale, inner.join(" "))
            }
        }
        render(self, 0)
    }
}

/// φ⁴ graph with nine vertices whose cluster tree has the nodes
/// `h ⊃ {p, f}`, `p ⊃ {1, q}`, `q ⊃ {2, m}`, `m = {3, 4}`, `f ⊃ {5, 6, t}`, `t = {7, 8, 9}`.
pub fn nine_vertex_example(cutoff: usize) -> Result<ScaledGraph> {
    // (vertex, vertex, scale); each tree line is doubled, 1 and 9 closed at the top scale
    let tree_lines = [(0, 1, 2), (1, 2, 3), (2, 3, 4), (3, 4, 1), (4, 5, 2), (5, 6, 2), (6, 7, 3), (7, 8, 3)];
    let mut used = [0usize; 9];
    let mut pairing = Vec::new();
    let mut scales = Vec::new();
    let mut push = |a: usize, b: usize, s: usize, used: &mut [usize; 9]| {
        pairing.push((4 * a + used[a], 4 * b + used[b]));
        used[a] += 1;
        used[b] += 1;
        scales.push(s);
    };
    for &(a, b, s) in &tree_lines {
        push(a, b, s, &mut used);
        push(a, b, s, &mut used);
    }
    push(0, 8, 1, &mut used);
    push(0, 8, 1, &mut used);
    let graph = FeynmanGraph {
        elements: (0..9).map(|label| GraphElement { kind: ElementKind::Coupling, label }).collect(),
        pairing,
        connected: true,
    };
    ScaledGraph::new(graph, scales, cutoff)
}
