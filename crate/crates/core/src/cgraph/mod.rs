//! Vertex- and edge-colored undirected graphs, their automorphism groups, and
//! the two graph encodings used for LP symmetry.

mod search;

use std::collections::BTreeMap;
use std::fmt::Write as _;

use num_bigint::BigUint;

use crate::exactla::{Rat, RatMatrix};
use crate::lpsolve::LinearProgram;
use crate::permgrp::{Perm, PermGroup};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum GraphError {
    #[error("matrix is not square")]
    NotSquare,
    #[error("matrix is not symmetric")]
    NotSymmetric,
    #[error("self-loop at vertex {0}")]
    SelfLoop(usize),
    #[error("duplicate edge {0}-{1}")]
    DuplicateEdge(usize, usize),
    #[error("vertex {0} out of range")]
    VertexOutOfRange(usize),
    #[error("{0} vertex colors given for {1} vertices")]
    ColorCount(usize, usize),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ColoredGraph {
    n: usize,
    vertex_colors: Vec<u32>,
    edges: Vec<(u32, u32, u32)>,
    adj: Vec<Vec<(u32, u32)>>,
}

/// Maps arbitrary ordered labels to dense ids `0..k`, preserving order.
fn densify<T: Ord + Clone>(labels: &[T]) -> Vec<u32> {
    let mut sorted: Vec<T> = labels.to_vec();
    sorted.sort();
    sorted.dedup();
    labels.iter().map(|l| sorted.binary_search(l).unwrap() as u32).collect()
}

impl ColoredGraph {
    /// Color ids may be any integers; they are renumbered densely from 0 in
    /// increasing order. Edges are unordered pairs.
    pub fn new(n: usize, vertex_colors: &[u32], edges: &[(usize, usize, u32)]) -> Result<ColoredGraph, GraphError> {
        if vertex_colors.len() != n {
            return Err(GraphError::ColorCount(vertex_colors.len(), n));
        }
        let ecol = densify(&edges.iter().map(|e| e.2).collect::<Vec<_>>());
        let mut norm = Vec::with_capacity(edges.len());
        let mut adj: Vec<Vec<(u32, u32)>> = vec![Vec::new(); n];
        for (k, &(u, v, _)) in edges.iter().enumerate() {
            if u >= n || v >= n {
                return Err(GraphError::VertexOutOfRange(u.max(v)));
            }
            if u == v {
                return Err(GraphError::SelfLoop(u));
            }
            let (a, b) = (u.min(v), u.max(v));
            norm.push((a as u32, b as u32, ecol[k]));
            adj[a].push((b as u32, ecol[k]));
            adj[b].push((a as u32, ecol[k]));
        }
        for (v, list) in adj.iter_mut().enumerate() {
            list.sort_unstable();
            if let Some(w) = list.windows(2).find(|w| w[0].0 == w[1].0) {
                return Err(GraphError::DuplicateEdge(v.min(w[0].0 as usize), v.max(w[0].0 as usize)));
            }
        }
        norm.sort_unstable();
        Ok(ColoredGraph { n, vertex_colors: densify(vertex_colors), edges: norm, adj })
    }

    pub fn n_vertices(&self) -> usize {
        self.n
    }

    pub fn vertex_colors(&self) -> &[u32] {
        &self.vertex_colors
    }

    pub fn edges(&self) -> &[(u32, u32, u32)] {
        &self.edges
    }

    pub(crate) fn neighbors(&self, v: usize) -> &[(u32, u32)] {
        &self.adj[v]
    }

    pub fn edge_color(&self, u: usize, v: usize) -> Option<u32> {
        let list = &self.adj[u];
        list.binary_search_by_key(&(v as u32), |e| e.0).ok().map(|i| list[i].1)
    }

    /// Whether `p` preserves vertex colors and maps every edge to an edge of
    /// the same color.
    pub fn is_automorphism(&self, p: &Perm) -> bool {
        p.degree() == self.n
            && (0..self.n).all(|v| self.vertex_colors[v] == self.vertex_colors[p.apply(v)])
            && self.edges.iter().all(|&(u, v, c)| self.edge_color(p.apply(u as usize), p.apply(v as usize)) == Some(c))
    }

    /// Plain-text dump: a `p edge <n> <m>` header, one `n <v> <color>` line
    /// per vertex and one `e <u> <v> <color>` line per edge, vertices 1-based.
    pub fn to_dimacs(&self) -> String {
        let mut s = String::new();
        writeln!(s, "p edge {} {}", self.n, self.edges.len()).unwrap();
        for (v, c) in self.vertex_colors.iter().enumerate() {
            writeln!(s, "n {} {}", v + 1, c).unwrap();
        }
        for &(u, v, c) in &self.edges {
            writeln!(s, "e {} {} {}", u + 1, v + 1, c).unwrap();
        }
        s
    }
}

#[derive(Debug, Clone)]
pub struct AutResult {
    pub generators: Vec<Perm>,
    pub order: BigUint,
}

impl AutResult {
    pub fn group(&self, n: usize) -> PermGroup {
        PermGroup::new(n, self.generators.clone()).expect("generators have graph degree")
    }
}

pub fn automorphisms(g: &ColoredGraph) -> AutResult {
    let generators = search::automorphism_generators(g);
    for p in &generators {
        assert!(g.is_automorphism(p), "search produced a non-automorphism {p}");
    }
    let order = PermGroup::new(g.n, generators.clone()).unwrap().order();
    AutResult { generators, order }
}

/// Dense ids for distinct rational values, ordered by value.
fn value_classes<'a>(vals: impl IntoIterator<Item = &'a Rat>) -> BTreeMap<Rat, u32> {
    let mut m: BTreeMap<Rat, u32> = vals.into_iter().map(|v| (v.clone(), 0)).collect();
    for (i, v) in m.values_mut().enumerate() {
        *v = i as u32;
    }
    m
}

/// Complete graph on the indices of `p`: one edge color per distinct
/// off-diagonal value (zero included), vertex colors combining `colors` with
/// the diagonal value.
pub fn graph_from_matrix(p: &RatMatrix, colors: &[u32]) -> Result<ColoredGraph, GraphError> {
    if p.rows() != p.cols() {
        return Err(GraphError::NotSquare);
    }
    if !p.is_symmetric() {
        return Err(GraphError::NotSymmetric);
    }
    let n = p.rows();
    if colors.len() != n {
        return Err(GraphError::ColorCount(colors.len(), n));
    }
    let off = value_classes((0..n).flat_map(|i| (0..i).map(move |j| (i, j))).map(|(i, j)| &p[(i, j)]));
    let diag = value_classes((0..n).map(|i| &p[(i, i)]));
    let vcol = densify(&(0..n).map(|i| (colors[i], diag[&p[(i, i)]])).collect::<Vec<_>>());
    let mut edges = Vec::with_capacity(n * n.saturating_sub(1) / 2);
    for i in 0..n {
        for j in i + 1..n {
            edges.push((i, j, off[&p[(i, j)]]));
        }
    }
    ColoredGraph::new(n, &vcol, &edges)
}

/// Color classes of a cost vector, ordered by value.
pub fn cost_colors(c: &[Rat]) -> Vec<u32> {
    let cls = value_classes(c);
    c.iter().map(|v| cls[v]).collect()
}

/// Bipartite graph with variable vertices `0..n`, then one vertex per
/// equality row, then one per inequality row. Nonzero coefficients become
/// edges colored by value.
pub fn formulation_graph(l: &LinearProgram) -> ColoredGraph {
    let n = l.n();
    let (me, mi) = (l.eq.rows(), l.ineq.rows());
    let coef = value_classes(l.eq.entries().iter().chain(l.ineq.entries()).filter(|x| !x.is_zero()));
    let rhs_eq = value_classes(&l.eq_rhs);
    let rhs_in = value_classes(&l.ineq_rhs);
    let var = cost_colors(&l.c);
    let k_var = var.iter().max().map_or(0, |&x| x + 1);
    let k_eq = rhs_eq.len() as u32;
    let mut vcol: Vec<u32> = var;
    vcol.extend(l.eq_rhs.iter().map(|b| k_var + rhs_eq[b]));
    vcol.extend(l.ineq_rhs.iter().map(|d| k_var + k_eq + rhs_in[d]));
    let mut edges = Vec::new();
    for (offset, m) in [(n, &l.eq), (n + me, &l.ineq)] {
        for i in 0..m.rows() {
            for j in 0..n {
                let a = &m[(i, j)];
                if !a.is_zero() {
                    edges.push((j, offset + i, coef[a]));
                }
            }
        }
    }
    debug_assert_eq!(vcol.len(), n + me + mi);
    ColoredGraph::new(n + me + mi, &vcol, &edges).expect("bipartite graph is simple")
}

/// Variable permutations that map the constraint system and objective onto
/// themselves (up to reordering rows).
pub fn formulation_group(l: &LinearProgram) -> PermGroup {
    let n = l.n();
    let aut = automorphisms(&formulation_graph(l));
    let gens = aut
        .generators
        .iter()
        .map(|g| Perm::from_images(g.images()[..n].to_vec()).expect("variables map to variables"))
        .collect();
    PermGroup::new(n, gens).unwrap()
}
