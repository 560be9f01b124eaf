//! Individualization-refinement search for automorphism generators.
//!
//! The first path of the search tree is followed to a discrete partition.
//! Then, from the deepest first-path node upward, every other child of the
//! node's target cell that is not already in a known orbit is explored until
//! a leaf equivalent to the first one turns up; the map between the two leaves
//! is then checked to be an automorphism.

use super::ColoredGraph;
use crate::permgrp::{orbits_of, Perm};

type Cells = Vec<Vec<u32>>;

fn mix(x: u64) -> u64 {
    let mut z = x.wrapping_add(0x9e37_79b9_7f4a_7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

struct Refiner<'a> {
    g: &'a ColoredGraph,
    cell_id: Vec<u32>,
    sig: Vec<u64>,
}

impl<'a> Refiner<'a> {
    fn new(g: &'a ColoredGraph) -> Refiner<'a> {
        let n = g.n_vertices();
        Refiner { g, cell_id: vec![0; n], sig: vec![0; n] }
    }

    fn index(&mut self, cells: &Cells) {
        for (ci, c) in cells.iter().enumerate() {
            for &v in c {
                self.cell_id[v as usize] = ci as u32;
            }
        }
    }

    /// Splits cells by the multiset of (neighbor cell, edge color) until
    /// stable. Sub-cells are ordered by signature, which only depends on the
    /// ordered partition, so the result commutes with relabeling.
    fn refine(&mut self, mut cells: Cells) -> Cells {
        loop {
            self.index(&cells);
            for c in &cells {
                if c.len() == 1 {
                    continue;
                }
                for &v in c {
                    let mut h = 0u64;
                    for &(u, col) in self.g.neighbors(v as usize) {
                        h = h.wrapping_add(mix(((self.cell_id[u as usize] as u64) << 32) | col as u64));
                    }
                    self.sig[v as usize] = h;
                }
            }
            let mut changed = false;
            let mut out = Vec::with_capacity(cells.len());
            for mut c in cells {
                if c.len() == 1 {
                    out.push(c);
                    continue;
                }
                let sig = &self.sig;
                c.sort_by_key(|&v| (sig[v as usize], v));
                let mut start = 0;
                for k in 1..=c.len() {
                    if k == c.len() || sig[c[k] as usize] != sig[c[start] as usize] {
                        if start > 0 || k < c.len() {
                            changed = true;
                        }
                        out.push(c[start..k].to_vec());
                        start = k;
                    }
                }
            }
            cells = out;
            if !changed {
                return cells;
            }
        }
    }

    /// Shape plus quotient-graph fingerprint of an equitable partition.
    fn invariant(&mut self, cells: &Cells) -> (Vec<u32>, u64) {
        self.index(cells);
        let shape: Vec<u32> = cells.iter().map(|c| c.len() as u32).collect();
        let mut h = 0u64;
        for (ci, c) in cells.iter().enumerate() {
            let v = c[0] as usize;
            let mut s = mix(self.g.vertex_colors()[v] as u64);
            for &(u, col) in self.g.neighbors(v) {
                s = s.wrapping_add(mix(((self.cell_id[u as usize] as u64) << 32) | col as u64));
            }
            h = mix(h ^ mix(((ci as u64) << 32) ^ s));
        }
        (shape, h)
    }
}

fn individualize(cells: &Cells, t: usize, v: u32) -> Cells {
    let mut out = Vec::with_capacity(cells.len() + 1);
    out.extend_from_slice(&cells[..t]);
    out.push(vec![v]);
    out.push(cells[t].iter().copied().filter(|&x| x != v).collect());
    out.extend_from_slice(&cells[t + 1..]);
    out
}

fn target(cells: &Cells) -> Option<usize> {
    cells.iter().position(|c| c.len() > 1)
}

struct Search<'a> {
    r: Refiner<'a>,
    invariants: Vec<(Vec<u32>, u64)>,
    first_leaf: Vec<u32>,
}

impl<'a> Search<'a> {
    fn leaf_map(&self, cells: &Cells) -> Perm {
        let n = self.first_leaf.len();
        let mut img = vec![0usize; n];
        for (pos, c) in cells.iter().enumerate() {
            img[self.first_leaf[pos] as usize] = c[0] as usize;
        }
        Perm::from_images(img).expect("leaves are bijections")
    }

    fn explore(&mut self, cells: Cells, level: usize) -> Option<Perm> {
        if self.r.invariant(&cells) != self.invariants[level] {
            return None;
        }
        let Some(t) = target(&cells) else {
            let p = self.leaf_map(&cells);
            return self.r.g.is_automorphism(&p).then_some(p);
        };
        for &u in &cells[t].clone() {
            let child = self.r.refine(individualize(&cells, t, u));
            if let Some(p) = self.explore(child, level + 1) {
                return Some(p);
            }
        }
        None
    }
}

pub(super) fn automorphism_generators(g: &ColoredGraph) -> Vec<Perm> {
    let n = g.n_vertices();
    if n <= 1 {
        return vec![];
    }
    let ncol = g.vertex_colors().iter().max().map_or(0, |&c| c as usize + 1);
    let mut init: Cells = vec![Vec::new(); ncol];
    for v in 0..n {
        init[g.vertex_colors()[v] as usize].push(v as u32);
    }
    init.retain(|c| !c.is_empty());
    let mut r = Refiner::new(g);
    let mut path: Vec<(Cells, usize)> = Vec::new();
    let mut invariants = Vec::new();
    let mut cells = r.refine(init);
    loop {
        invariants.push(r.invariant(&cells));
        match target(&cells) {
            Some(t) => {
                let v = cells[t][0];
                let child = r.refine(individualize(&cells, t, v));
                path.push((cells, t));
                cells = child;
            }
            None => break,
        }
    }
    let first_leaf: Vec<u32> = cells.iter().map(|c| c[0]).collect();
    let mut s = Search { r, invariants, first_leaf };
    let mut gens: Vec<Perm> = Vec::new();
    for level in (0..path.len()).rev() {
        let (cells, t) = &path[level];
        let v0 = cells[*t][0] as usize;
        let mut cand: Vec<u32> = cells[*t].clone();
        cand.sort_unstable();
        let mut tried: Vec<usize> = Vec::new();
        for &w in &cand {
            let w = w as usize;
            if w == v0 {
                continue;
            }
            let orb = orbits_of(n, &gens);
            let root = |p: usize| orb.iter().position(|o| o.binary_search(&p).is_ok()).unwrap();
            let rw = root(w);
            if rw == root(v0) || tried.iter().any(|&x| root(x) == rw) {
                continue;
            }
            tried.push(w);
            let child = s.r.refine(individualize(cells, *t, w as u32));
            if let Some(p) = s.explore(child, level + 1) {
                gens.push(p);
            }
        }
    }
    gens
}
