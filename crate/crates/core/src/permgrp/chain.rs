use num_bigint::BigUint;
use num_traits::One;

use super::perm::Perm;

const NONE: u32 = u32::MAX;

/// One level of a stabilizer chain with base point `j` (the base is
/// `0, 1, …, n-1`). The level describes `G_j`, the pointwise stabilizer of
/// `0..j`: its orbit of `j` and a transversal `u_p` with `u_p(j) = p`.
#[derive(Clone, Debug)]
pub(crate) struct Level {
    pub orbit: Vec<u32>,
    slot: Vec<u32>,
    pub trans: Vec<Perm>,
    pub trans_inv: Vec<Perm>,
    gens: Vec<Perm>,
    processed: Vec<usize>,
}

impl Level {
    fn new(n: usize, j: usize) -> Level {
        let mut slot = vec![NONE; n];
        slot[j] = 0;
        Level {
            orbit: vec![j as u32],
            slot,
            trans: vec![Perm::identity(n)],
            trans_inv: vec![Perm::identity(n)],
            gens: Vec::new(),
            processed: Vec::new(),
        }
    }

    #[inline]
    pub fn contains(&self, p: usize) -> bool {
        self.slot[p] != NONE
    }

    /// Transversal element mapping the base point to `p`.
    #[inline]
    pub fn rep(&self, p: usize) -> Option<&Perm> {
        match self.slot[p] {
            NONE => None,
            s => Some(&self.trans[s as usize]),
        }
    }

    #[inline]
    pub fn rep_inv(&self, p: usize) -> Option<&Perm> {
        match self.slot[p] {
            NONE => None,
            s => Some(&self.trans_inv[s as usize]),
        }
    }
}

/// Schreier-Sims stabilizer chain over the fixed base `0..n`.
#[derive(Clone, Debug)]
pub(crate) struct StabChain {
    n: usize,
    pub levels: Vec<Level>,
}

impl StabChain {
    pub fn new(n: usize) -> StabChain {
        StabChain { n, levels: (0..n).map(|j| Level::new(n, j)).collect() }
    }

    pub fn from_generators(n: usize, gens: &[Perm]) -> StabChain {
        let mut c = StabChain::new(n);
        for g in gens {
            c.insert(g);
        }
        c
    }

    pub fn degree(&self) -> usize {
        self.n
    }

    /// Strips `g` through the chain starting at `start`. Returns the residue
    /// and the first level where it could not be stripped (`n` if none).
    pub fn sift(&self, g: &Perm, start: usize) -> (Perm, usize) {
        let mut h = g.clone();
        for j in start..self.n {
            let p = h.apply(j);
            if p == j {
                continue;
            }
            match self.levels[j].rep_inv(p) {
                Some(ui) => h = ui.compose(&h),
                None => return (h, j),
            }
        }
        (h, self.n)
    }

    pub fn contains(&self, g: &Perm) -> bool {
        g.degree() == self.n && self.sift(g, 0).1 == self.n
    }

    /// Adds `g` to the group and completes the chain. Returns false if `g`
    /// was already a member.
    pub fn insert(&mut self, g: &Perm) -> bool {
        let (h, lvl) = self.sift(g, 0);
        if lvl == self.n {
            return false;
        }
        self.add_strong_generator(lvl, h);
        true
    }

    fn add_strong_generator(&mut self, lvl: usize, h: Perm) {
        for j in 0..=lvl {
            self.levels[j].gens.push(h.clone());
            self.levels[j].processed.push(0);
        }
        for j in (0..=lvl).rev() {
            self.close_level(j);
        }
    }

    /// Extends the orbit at level `j` and sifts every new Schreier generator
    /// through the levels below it.
    fn close_level(&mut self, j: usize) {
        loop {
            let mut progressed = false;
            let mut gi = 0;
            while gi < self.levels[j].gens.len() {
                while self.levels[j].processed[gi] < self.levels[j].orbit.len() {
                    let lv = &mut self.levels[j];
                    let pt = lv.orbit[lv.processed[gi]] as usize;
                    lv.processed[gi] += 1;
                    progressed = true;
                    let g = lv.gens[gi].clone();
                    let q = g.apply(pt);
                    let up = lv.rep(pt).expect("orbit point has a transversal").clone();
                    if !lv.contains(q) {
                        let uq = g.compose(&up);
                        let inv = uq.inverse();
                        lv.slot[q] = lv.trans.len() as u32;
                        lv.trans.push(uq);
                        lv.trans_inv.push(inv);
                        lv.orbit.push(q as u32);
                        continue;
                    }
                    let schreier = lv.rep_inv(q).unwrap().compose(&g.compose(&up));
                    if schreier.is_identity() {
                        continue;
                    }
                    let (res, at) = self.sift(&schreier, j + 1);
                    if at < self.n {
                        self.add_strong_generator(at, res);
                    }
                }
                gi += 1;
            }
            if !progressed {
                return;
            }
        }
    }

    pub fn order(&self) -> BigUint {
        let mut o = BigUint::one();
        for l in &self.levels {
            if l.orbit.len() > 1 {
                o *= BigUint::from(l.orbit.len());
            }
        }
        o
    }

    /// Strong generators (those of level 0).
    pub fn strong_generators(&self) -> &[Perm] {
        match self.levels.first() {
            Some(l) => &l.gens,
            None => &[],
        }
    }

    /// Calls `f` on every element; stops early when `f` returns false.
    pub fn for_each_element(&self, mut f: impl FnMut(&Perm) -> bool) {
        let nontrivial: Vec<usize> = (0..self.n).filter(|&j| self.levels[j].orbit.len() > 1).collect();
        fn rec(c: &StabChain, lv: &[usize], w: &Perm, f: &mut dyn FnMut(&Perm) -> bool) -> bool {
            let Some((&j, rest)) = lv.split_first() else {
                return f(w);
            };
            for u in &c.levels[j].trans {
                if !rec(c, rest, &w.compose(u), f) {
                    return false;
                }
            }
            true
        }
        rec(self, &nontrivial, &Perm::identity(self.n), &mut f);
    }
}
