use std::fmt;

use crate::exactla::{Rat, RatMatrix};

use super::PermGroupError;

/// Permutation of `{0, …, n-1}`; `images[i]` is the image of `i`.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Perm {
    images: Vec<u32>,
}

impl Perm {
    pub fn identity(n: usize) -> Perm {
        Perm { images: (0..n as u32).collect() }
    }

    pub fn from_images(images: Vec<usize>) -> Result<Perm, PermGroupError> {
        let n = images.len();
        let mut seen = vec![false; n];
        for &x in &images {
            if x >= n || seen[x] {
                return Err(PermGroupError::NotAPermutation(format!("{images:?}")));
            }
            seen[x] = true;
        }
        Ok(Perm { images: images.into_iter().map(|x| x as u32).collect() })
    }

    /// Builds a permutation of degree `n` from 0-based cycles.
    pub fn from_cycles(n: usize, cycles: &[Vec<usize>]) -> Result<Perm, PermGroupError> {
        let mut img: Vec<usize> = (0..n).collect();
        let mut touched = vec![false; n];
        for cyc in cycles {
            for (k, &a) in cyc.iter().enumerate() {
                if a >= n || touched[a] {
                    return Err(PermGroupError::NotAPermutation(format!("{cycles:?}")));
                }
                touched[a] = true;
                img[a] = cyc[(k + 1) % cyc.len()];
            }
        }
        Perm::from_images(img)
    }

    pub fn degree(&self) -> usize {
        self.images.len()
    }

    #[inline]
    pub fn apply(&self, i: usize) -> usize {
        self.images[i] as usize
    }

    pub fn images(&self) -> Vec<usize> {
        self.images.iter().map(|&x| x as usize).collect()
    }

    pub fn is_identity(&self) -> bool {
        self.images.iter().enumerate().all(|(i, &x)| i as u32 == x)
    }

    /// `self ∘ other`: apply `other` first.
    pub fn compose(&self, other: &Perm) -> Perm {
        debug_assert_eq!(self.degree(), other.degree());
        Perm { images: other.images.iter().map(|&x| self.images[x as usize]).collect() }
    }

    pub fn inverse(&self) -> Perm {
        let mut inv = vec![0u32; self.images.len()];
        for (i, &x) in self.images.iter().enumerate() {
            inv[x as usize] = i as u32;
        }
        Perm { images: inv }
    }

    /// Natural action on coordinate vectors: the entry at `i` moves to
    /// position `self(i)`.
    pub fn act_on<T: Clone>(&self, x: &[T]) -> Vec<T> {
        assert_eq!(x.len(), self.degree());
        let mut out = x.to_vec();
        for (i, v) in x.iter().enumerate() {
            out[self.images[i] as usize] = v.clone();
        }
        out
    }

    /// Permutation matrix `Π` with `Π·x = self.act_on(x)`.
    pub fn matrix(&self) -> RatMatrix {
        let n = self.degree();
        let mut m = RatMatrix::zeros(n, n);
        for i in 0..n {
            m[(self.apply(i), i)] = Rat::one();
        }
        m
    }

    pub fn cycles(&self) -> Vec<Vec<usize>> {
        let n = self.degree();
        let mut seen = vec![false; n];
        let mut out = Vec::new();
        for s in 0..n {
            if seen[s] || self.apply(s) == s {
                continue;
            }
            let mut cyc = vec![s];
            seen[s] = true;
            let mut x = self.apply(s);
            while x != s {
                seen[x] = true;
                cyc.push(x);
                x = self.apply(x);
            }
            out.push(cyc);
        }
        out
    }

    /// Parses 1-based disjoint-cycle notation such as `(1,2,3)(4,5)`; `()`
    /// is the identity. Points may be separated by commas or spaces.
    pub fn parse_cycles(s: &str, n: usize) -> Result<Perm, PermGroupError> {
        let err = || PermGroupError::Parse(s.to_string());
        let t = s.trim();
        let mut cycles = Vec::new();
        let mut rest = t;
        while !rest.is_empty() {
            let body_start = rest.strip_prefix('(').ok_or_else(err)?;
            let close = body_start.find(')').ok_or_else(err)?;
            let body = &body_start[..close];
            let pts: Vec<usize> = body
                .split(|c: char| c == ',' || c.is_whitespace())
                .filter(|p| !p.is_empty())
                .map(|p| p.parse::<usize>().ok().filter(|&v| v >= 1).map(|v| v - 1).ok_or_else(err))
                .collect::<Result<_, _>>()?;
            if !pts.is_empty() {
                cycles.push(pts);
            }
            rest = body_start[close + 1..].trim_start();
        }
        Perm::from_cycles(n, &cycles).map_err(|_| err())
    }
}

impl fmt::Display for Perm {
    /// 1-based disjoint cycles.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let cycles = self.cycles();
        if cycles.is_empty() {
            return write!(f, "()");
        }
        for c in cycles {
            let pts: Vec<String> = c.iter().map(|x| (x + 1).to_string()).collect();
            write!(f, "({})", pts.join(","))?;
        }
        Ok(())
    }
}

impl fmt::Debug for Perm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn compose_order() {
        let a = Perm::from_cycles(3, &[vec![0, 1]]).unwrap();
        let b = Perm::from_cycles(3, &[vec![1, 2]]).unwrap();
        // (a∘b)(1) = a(2) = 2
        assert_eq!(a.compose(&b).apply(1), 2);
        assert_eq!(a.compose(&a.inverse()), Perm::identity(3));
    }

    #[test]
    fn cycle_notation_round_trip() {
        let p = Perm::parse_cycles("(1,3,2)(4 5)", 6).unwrap();
        assert_eq!(p.images(), vec![2, 0, 1, 4, 3, 5]);
        assert_eq!(p.to_string(), "(1,3,2)(4,5)");
        assert_eq!(Perm::parse_cycles(&p.to_string(), 6).unwrap(), p);
        assert_eq!(Perm::parse_cycles("()", 3).unwrap(), Perm::identity(3));
        assert!(Perm::parse_cycles("(1,1)", 3).is_err());
        assert!(Perm::parse_cycles("(0,1)", 3).is_err());
        assert!(Perm::parse_cycles("(1,4)", 3).is_err());
        assert!(Perm::parse_cycles("1,2", 3).is_err());
    }

    #[test]
    fn action_matches_matrix() {
        let p = Perm::parse_cycles("(1,2,3)", 3).unwrap();
        let x: Vec<Rat> = (1..=3).map(Rat::from_int).collect();
        let y = p.act_on(&x);
        // entry 0 moves to position 1
        assert_eq!(y, vec![Rat::from_int(3), Rat::from_int(1), Rat::from_int(2)]);
        assert_eq!(p.matrix().mul_vec(&x), y);
    }
}
