//! Permutation groups given by generators, backed by a stabilizer chain.

pub(crate) mod chain;
mod perm;

use std::collections::{HashSet, VecDeque};

use num_bigint::BigUint;
use num_traits::ToPrimitive;

use crate::exactla::{Rat, RatMatrix};

use chain::StabChain;
pub use perm::Perm;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum PermGroupError {
    #[error("degree mismatch: expected {expected}, found {found}")]
    DegreeMismatch { expected: usize, found: usize },
    #[error("subgroup argument is not contained in the group")]
    NotASubgroup,
    #[error("not a permutation: {0}")]
    NotAPermutation(String),
    #[error("cannot parse permutation {0:?}")]
    Parse(String),
    #[error("group of order {order} exceeds the element cap {cap}")]
    TooLarge { order: BigUint, cap: usize },
}

#[derive(Clone, Debug)]
pub struct PermGroup {
    degree: usize,
    generators: Vec<Perm>,
    chain: StabChain,
}

impl PermGroup {
    pub fn new(degree: usize, generators: Vec<Perm>) -> Result<PermGroup, PermGroupError> {
        if let Some(g) = generators.iter().find(|g| g.degree() != degree) {
            return Err(PermGroupError::DegreeMismatch { expected: degree, found: g.degree() });
        }
        let generators: Vec<Perm> = generators.into_iter().filter(|g| !g.is_identity()).collect();
        let chain = StabChain::from_generators(degree, &generators);
        Ok(PermGroup { degree, generators, chain })
    }

    pub fn trivial(degree: usize) -> PermGroup {
        PermGroup::new(degree, vec![]).unwrap()
    }

    pub fn symmetric(degree: usize) -> PermGroup {
        let mut gens = Vec::new();
        for i in 0..degree.saturating_sub(1) {
            gens.push(Perm::from_cycles(degree, &[vec![i, i + 1]]).unwrap());
        }
        PermGroup::new(degree, gens).unwrap()
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    pub fn generators(&self) -> &[Perm] {
        &self.generators
    }

    pub fn order(&self) -> BigUint {
        self.chain.order()
    }

    pub fn is_trivial(&self) -> bool {
        self.generators.is_empty()
    }

    pub fn contains(&self, p: &Perm) -> bool {
        self.chain.contains(p)
    }

    pub fn is_subgroup_of(&self, other: &PermGroup) -> bool {
        self.degree == other.degree && self.generators.iter().all(|g| other.contains(g))
    }

    pub fn same_group(&self, other: &PermGroup) -> bool {
        self.is_subgroup_of(other) && self.order() == other.order()
    }

    /// Orbit partition, each orbit sorted, orbits ordered by least element.
    pub fn orbits(&self) -> Vec<Vec<usize>> {
        orbits_of(self.degree, &self.generators)
    }

    /// `⟨self, extra⟩`.
    pub fn extended(&self, extra: &[Perm]) -> Result<PermGroup, PermGroupError> {
        let mut gens = self.generators.clone();
        for g in extra {
            if !self.contains(g) {
                gens.push(g.clone());
            }
        }
        PermGroup::new(self.degree, gens)
    }

    /// All elements, in chain order. Fails above `cap` elements.
    pub fn elements(&self, cap: usize) -> Result<Vec<Perm>, PermGroupError> {
        self.check_cap(cap)?;
        let mut out = Vec::new();
        self.chain.for_each_element(|g| {
            out.push(g.clone());
            true
        });
        Ok(out)
    }

    fn check_cap(&self, cap: usize) -> Result<(), PermGroupError> {
        let order = self.order();
        if order.to_usize().is_none_or(|o| o > cap) {
            return Err(PermGroupError::TooLarge { order, cap });
        }
        Ok(())
    }

    /// Level structure of the chain over base `0..n`: orbit of base point `j`
    /// under the pointwise stabilizer of `0..j`, together with transversal
    /// elements.
    pub(crate) fn chain(&self) -> &StabChain {
        &self.chain
    }

    /// Strong generating set relative to base `0..n`.
    pub fn strong_generators(&self) -> &[Perm] {
        self.chain.strong_generators()
    }
}

pub fn orbits_of(n: usize, gens: &[Perm]) -> Vec<Vec<usize>> {
    let mut comp: Vec<usize> = (0..n).collect();
    fn find(c: &mut [usize], mut x: usize) -> usize {
        while c[x] != x {
            c[x] = c[c[x]];
            x = c[x];
        }
        x
    }
    for g in gens {
        for i in 0..n {
            let (a, b) = (find(&mut comp, i), find(&mut comp, g.apply(i)));
            if a != b {
                comp[a.max(b)] = a.min(b);
            }
        }
    }
    let mut by_root: Vec<Vec<usize>> = vec![Vec::new(); n];
    for i in 0..n {
        let r = find(&mut comp, i);
        by_root[r].push(i);
    }
    by_root.into_iter().filter(|o| !o.is_empty()).collect()
}

pub fn generated(degree: usize, gens: Vec<Perm>) -> Result<PermGroup, PermGroupError> {
    PermGroup::new(degree, gens)
}

/// `E` with `E_ij = 1/|O|` when `i, j` share the orbit `O`, else 0.
pub fn orbit_projector(g: &PermGroup) -> RatMatrix {
    let n = g.degree();
    let mut e = RatMatrix::zeros(n, n);
    for o in g.orbits() {
        let v = Rat::new(1, o.len() as i64);
        for &i in &o {
            for &j in &o {
                e[(i, j)] = v.clone();
            }
        }
    }
    e
}

/// `G ∩ H` by backtracking over the stabilizer chain of the smaller group,
/// pruning with base images that `H` cannot realize.
pub fn intersect(g: &PermGroup, h: &PermGroup) -> Result<PermGroup, PermGroupError> {
    if g.degree != h.degree {
        return Err(PermGroupError::DegreeMismatch { expected: g.degree, found: h.degree });
    }
    if g.is_subgroup_of(h) {
        return Ok(g.clone());
    }
    if h.is_subgroup_of(g) {
        return Ok(h.clone());
    }
    let (k, other) = if g.order() <= h.order() { (g, h) } else { (h, g) };
    let n = g.degree;
    let kc = k.chain();
    let hc = other.chain();
    let mut found: Vec<Perm> = Vec::new();
    let mut inter = StabChain::new(n);
    for j in (0..n).rev() {
        let cand: Vec<usize> = {
            let mut c: Vec<usize> = kc.levels[j].orbit.iter().map(|&p| p as usize).filter(|&p| p != j).collect();
            c.sort_unstable();
            c
        };
        if cand.is_empty() {
            continue;
        }
        let mut dead: Vec<usize> = Vec::new();
        for y in cand {
            let orb = orbits_of(n, &found);
            let root = |p: usize| orb.iter().position(|o| o.contains(&p)).unwrap();
            let ry = root(y);
            if ry == root(j) || dead.iter().any(|&d| root(d) == ry) {
                continue;
            }
            match search_coset(kc, hc, j, y) {
                Some(p) => {
                    if inter.insert(&p) {
                        found.push(p);
                    }
                }
                None => dead.push(y),
            }
        }
    }
    PermGroup::new(n, found)
}

/// Some element of `K ∩ H` fixing `0..j` pointwise except mapping `j ↦ y`.
fn search_coset(kc: &StabChain, hc: &StabChain, j: usize, y: usize) -> Option<Perm> {
    let u = kc.levels[j].rep(y)?.clone();
    let img = u.apply(j);
    let eta = hc.levels[j].rep(img)?.clone();
    fn rec(kc: &StabChain, hc: &StabChain, i: usize, w: &Perm, eta: &Perm) -> Option<Perm> {
        let n = kc.degree();
        if i == n {
            return (w == eta).then(|| w.clone());
        }
        let eta_inv = eta.inverse();
        for &yp in &kc.levels[i].orbit {
            let w2 = w.compose(kc.levels[i].rep(yp as usize).unwrap());
            let p = eta_inv.apply(w2.apply(i));
            let Some(v) = hc.levels[i].rep(p) else {
                continue;
            };
            let eta2 = eta.compose(v);
            if let Some(r) = rec(kc, hc, i + 1, &w2, &eta2) {
                return Some(r);
            }
        }
        None
    }
    rec(kc, hc, j + 1, &u, &eta)
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DoubleCoset {
    pub representative: Perm,
    pub size: usize,
}

/// Decomposition of `G` into double cosets `H g H`.
///
/// Elements of `G` are enumerated (up to `cap`), then grown into double cosets
/// by closing under left and right multiplication by generators of `H`.
/// Each representative is the lexicographically least image tuple in its
/// double coset; the identity's coset comes first, the rest follow in
/// representative order.
pub fn double_cosets(g: &PermGroup, h: &PermGroup, cap: usize) -> Result<Vec<DoubleCoset>, PermGroupError> {
    if g.degree != h.degree {
        return Err(PermGroupError::DegreeMismatch { expected: g.degree, found: h.degree });
    }
    if !h.is_subgroup_of(g) {
        return Err(PermGroupError::NotASubgroup);
    }
    let n = g.degree;
    if g.order() == h.order() {
        return Ok(vec![DoubleCoset {
            representative: Perm::identity(n),
            size: g.order().to_usize().unwrap_or(usize::MAX),
        }]);
    }
    let elems = g.elements(cap)?;
    let mut assigned: HashSet<Perm> = HashSet::with_capacity(elems.len());
    let mut out = Vec::new();
    let hgens = h.generators();
    for seed in elems {
        if assigned.contains(&seed) {
            continue;
        }
        let mut queue = VecDeque::from([seed.clone()]);
        assigned.insert(seed.clone());
        let mut best = seed;
        let mut size = 0usize;
        while let Some(x) = queue.pop_front() {
            size += 1;
            if x < best {
                best = x.clone();
            }
            for s in hgens {
                for y in [s.compose(&x), x.compose(s)] {
                    if !assigned.contains(&y) {
                        assigned.insert(y.clone());
                        queue.push_back(y);
                    }
                }
            }
        }
        out.push(DoubleCoset { representative: best, size });
    }
    out.sort_by(|a, b| {
        (!a.representative.is_identity(), &a.representative).cmp(&(!b.representative.is_identity(), &b.representative))
    });
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn p(s: &str, n: usize) -> Perm {
        Perm::parse_cycles(s, n).unwrap()
    }

    fn grp(n: usize, gens: &[&str]) -> PermGroup {
        PermGroup::new(n, gens.iter().map(|s| p(s, n)).collect()).unwrap()
    }

    #[test]
    fn orbit_examples() {
        assert_eq!(grp(3, &["(1,2)"]).orbits(), vec![vec![0, 1], vec![2]]);
        assert_eq!(grp(3, &[]).orbits(), vec![vec![0], vec![1], vec![2]]);
    }

    #[test]
    fn order_and_membership() {
        let s3 = grp(3, &["(1,2)", "(1,2,3)"]);
        assert_eq!(s3.order(), BigUint::from(6u32));
        assert!(s3.contains(&p("(1,3)", 3)));
        assert_eq!(PermGroup::symmetric(7).order(), BigUint::from(5040u32));
        let c = grp(6, &["(1,2,3,4,5,6)"]);
        assert_eq!(c.order(), BigUint::from(6u32));
        assert!(!c.contains(&p("(1,2)", 6)));
        assert!(PermGroup::new(3, vec![Perm::identity(4)]).is_err());
    }

    #[test]
    fn intersect_examples() {
        let s3 = grp(3, &["(1,2)", "(1,2,3)"]);
        assert!(intersect(&s3, &s3).unwrap().same_group(&s3));
        let a = grp(3, &["(1,2)"]);
        let b = grp(3, &["(2,3)"]);
        assert!(intersect(&a, &b).unwrap().is_trivial());
        let s4 = PermGroup::symmetric(4);
        let c4 = grp(4, &["(1,2,3,4)"]);
        assert_eq!(intersect(&s4, &c4).unwrap().order(), BigUint::from(4u32));
        // Two overlapping dihedral groups on 6 points.
        let d6 = grp(6, &["(1,2,3,4,5,6)", "(2,6)(3,5)"]);
        let s = grp(6, &["(1,2)", "(1,2,3)", "(4,5,6)", "(4,5)", "(1,4)(2,5)(3,6)"]);
        let i = intersect(&d6, &s).unwrap();
        let brute = d6.elements(100).unwrap().into_iter().filter(|g| s.contains(g)).count();
        assert_eq!(i.order(), BigUint::from(brute));
    }

    #[test]
    fn double_coset_examples() {
        let s3 = grp(3, &["(1,2)", "(1,2,3)"]);
        let dc = double_cosets(&s3, &s3, 100).unwrap();
        assert_eq!(dc.len(), 1);
        let h = grp(3, &["(1,2)"]);
        let dc = double_cosets(&s3, &h, 100).unwrap();
        assert_eq!(dc.len(), 2);
        assert!(dc[0].representative.is_identity());
        assert_eq!(dc.iter().map(|d| d.size).sum::<usize>(), 6);
        let s4 = PermGroup::symmetric(4);
        assert_eq!(double_cosets(&s4, &PermGroup::trivial(4), 100).unwrap().len(), 24);
        assert_eq!(double_cosets(&h, &s3, 100), Err(PermGroupError::NotASubgroup));
        assert!(matches!(double_cosets(&s4, &h.clone_with_degree(4), 10), Err(PermGroupError::TooLarge { .. })));
    }

    impl PermGroup {
        fn clone_with_degree(&self, n: usize) -> PermGroup {
            let gens = self
                .generators
                .iter()
                .map(|g| {
                    let mut im = g.images();
                    im.extend(self.degree..n);
                    Perm::from_images(im).unwrap()
                })
                .collect();
            PermGroup::new(n, gens).unwrap()
        }
    }

    #[test]
    fn projector_examples() {
        let e = orbit_projector(&grp(3, &["(1,2)"]));
        let h = Rat::new(1, 2);
        let z = Rat::zero();
        assert_eq!(
            e,
            RatMatrix::from_rows(
                vec![
                    vec![h.clone(), h.clone(), z.clone()],
                    vec![h.clone(), h, z.clone()],
                    vec![z.clone(), z, Rat::one()]
                ],
                3
            )
        );
        assert_eq!(orbit_projector(&PermGroup::trivial(3)), RatMatrix::identity(3));
        let e = orbit_projector(&grp(4, &["(1,2,3,4)"]));
        assert!(e.entries().iter().all(|x| *x == Rat::new(1, 4)));
    }
}
