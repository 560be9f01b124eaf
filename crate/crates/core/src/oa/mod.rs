//! Orthogonal arrays: frequency-vector indexing, ILP formulations, strength
//! checks, and the isomorphism and OD-equivalence groups acting on
//! frequency indices.
//!
//! A run (row) with levels `(l_1, …, l_k)` has frequency index
//! `Σ l_j s^{k-j}` (0-based, first factor most significant). For `s = 2`
//! level 0 is coded `+1` and level 1 is coded `-1`.

mod groups;
mod ilp;

pub use groups::{column_swap, iso_group, od_group, r_operation, symbol_permutation};
pub use ilp::{build_ilp_bf, build_ilp_improved, build_ilp_jform, eliminate_basic_variables, Elimination};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum OaError {
    #[error("invalid OA spec: {0}")]
    InvalidSpec(String),
    #[error("level {level} out of range for s = {s}")]
    LevelOutOfRange { level: usize, s: usize },
    #[error("construction requires s = 2")]
    NotBinary,
    #[error("array shape does not match the spec: {0}")]
    Shape(String),
}

/// Parameters of an OA(N, k, s, t) search; `p_max` bounds each frequency.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct OASpec {
    pub n_runs: u64,
    pub k: usize,
    pub s: usize,
    pub t: usize,
    pub lambda: u64,
    pub p_max: u64,
}

impl OASpec {
    /// `p_max` defaults to λ = N / s^t.
    pub fn new(n_runs: u64, k: usize, s: usize, t: usize, p_max: Option<u64>) -> Result<OASpec, OaError> {
        let bad = |m: String| Err(OaError::InvalidSpec(m));
        if s < 2 {
            return bad(format!("s = {s} must be at least 2"));
        }
        if k == 0 || t > k {
            return bad(format!("need 0 <= t <= k and k >= 1, got k = {k}, t = {t}"));
        }
        let st = (s as u64).checked_pow(t as u32).ok_or_else(|| OaError::InvalidSpec("s^t overflows".into()))?;
        if (s as u64).checked_pow(k as u32).is_none_or(|v| v > 1 << 20) {
            return bad(format!("s^k too large for k = {k}, s = {s}"));
        }
        if n_runs == 0 || !n_runs.is_multiple_of(st) {
            return bad(format!("s^t = {st} does not divide N = {n_runs}"));
        }
        let lambda = n_runs / st;
        let p_max = p_max.unwrap_or(lambda);
        if p_max == 0 || p_max > lambda {
            return bad(format!("p_max = {p_max} must lie in 1..={lambda}"));
        }
        Ok(OASpec { n_runs, k, s, t, lambda, p_max })
    }

    /// Number of frequency variables, `s^k`.
    pub fn n_vars(&self) -> usize {
        self.s.pow(self.k as u32)
    }

    /// Rejects specs the ILP builders do not cover: `t = 0`, and
    /// `p_max = λ / s^{k-t}`, where the box bounds make the relaxation
    /// degenerate.
    pub(crate) fn check_buildable(&self) -> Result<(), OaError> {
        if self.t == 0 {
            return Err(OaError::InvalidSpec("strength t must be at least 1".into()));
        }
        let skt = (self.s as u64).pow((self.k - self.t) as u32);
        if self.p_max * skt == self.lambda {
            return Err(OaError::InvalidSpec(format!(
                "p_max = {} equals lambda / s^(k-t) = {}/{}",
                self.p_max, self.lambda, skt
            )));
        }
        Ok(())
    }
}

pub fn freq_index(levels: &[usize], s: usize) -> Result<usize, OaError> {
    let mut idx = 0;
    for &l in levels {
        if l >= s {
            return Err(OaError::LevelOutOfRange { level: l, s });
        }
        idx = idx * s + l;
    }
    Ok(idx)
}

pub fn index_levels(mut index: usize, s: usize, k: usize) -> Vec<usize> {
    let mut out = vec![0; k];
    for j in (0..k).rev() {
        out[j] = index % s;
        index /= s;
    }
    out
}

/// All `r`-subsets of `0..k` in lexicographic order.
pub fn subsets(k: usize, r: usize) -> Vec<Vec<usize>> {
    fn rec(start: usize, k: usize, r: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == r {
            out.push(cur.clone());
            return;
        }
        for i in start..k {
            if k - i < r - cur.len() {
                break;
            }
            cur.push(i);
            rec(i + 1, k, r, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    rec(0, k, r, &mut Vec::new(), &mut out);
    out
}

/// Integer frequency vector of an array given as rows of levels.
pub fn frequency_vector(rows: &[Vec<usize>], k: usize, s: usize) -> Result<Vec<u64>, OaError> {
    let mut x = vec![0u64; s.pow(k as u32)];
    for r in rows {
        if r.len() != k {
            return Err(OaError::Shape(format!("row {r:?} does not have {k} entries")));
        }
        x[freq_index(r, s)?] += 1;
    }
    Ok(x)
}

/// Array with rows in increasing frequency-index order.
pub fn array_from_frequencies(x: &[u64], k: usize, s: usize) -> Vec<Vec<usize>> {
    let mut rows = Vec::new();
    for (i, &c) in x.iter().enumerate() {
        for _ in 0..c {
            rows.push(index_levels(i, s, k));
        }
    }
    rows
}

/// `N × k` array over `{-1, +1}`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SignedArray {
    entries: Vec<Vec<i8>>,
}

impl SignedArray {
    pub fn new(entries: Vec<Vec<i8>>) -> Result<SignedArray, OaError> {
        let k = entries.first().map_or(0, |r| r.len());
        for r in &entries {
            if r.len() != k || r.iter().any(|&v| v != 1 && v != -1) {
                return Err(OaError::Shape("rows must have equal length with entries ±1".into()));
            }
        }
        Ok(SignedArray { entries })
    }

    /// Level 0 becomes +1, level 1 becomes -1.
    pub fn from_levels(rows: &[Vec<usize>]) -> Result<SignedArray, OaError> {
        let entries = rows
            .iter()
            .map(|r| {
                r.iter()
                    .map(|&l| match l {
                        0 => Ok(1),
                        1 => Ok(-1),
                        _ => Err(OaError::NotBinary),
                    })
                    .collect()
            })
            .collect::<Result<_, _>>()?;
        SignedArray::new(entries)
    }

    pub fn to_levels(&self) -> Vec<Vec<usize>> {
        self.entries.iter().map(|r| r.iter().map(|&v| usize::from(v < 0)).collect()).collect()
    }

    pub fn rows(&self) -> &[Vec<i8>] {
        &self.entries
    }

    pub fn n_rows(&self) -> usize {
        self.entries.len()
    }

    pub fn n_cols(&self) -> usize {
        self.entries.first().map_or(0, |r| r.len())
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct JChar {
    pub subset: Vec<usize>,
    pub value: i64,
}

/// `J_r(ℓ) = Σ_rows Π_{j∈ℓ} y_j` for every `ℓ` with `|ℓ| <= r_max`, ordered by
/// size and then lexicographically (`J_0(∅) = N` first).
pub fn j_characteristics(y: &SignedArray, r_max: usize) -> Vec<JChar> {
    let k = y.n_cols();
    let mut out = Vec::new();
    for r in 0..=r_max.min(k) {
        for subset in subsets(k, r) {
            let value = y.rows().iter().map(|row| subset.iter().map(|&j| row[j] as i64).product::<i64>()).sum();
            out.push(JChar { subset, value });
        }
    }
    out
}

/// Direct check that every `t`-column projection contains each `t`-tuple
/// exactly `N / s^t` times.
pub fn is_oa(rows: &[Vec<usize>], spec: &OASpec) -> bool {
    if rows.len() as u64 != spec.n_runs || rows.iter().any(|r| r.len() != spec.k || r.iter().any(|&l| l >= spec.s)) {
        return false;
    }
    let t = spec.t;
    let cells = spec.s.pow(t as u32);
    subsets(spec.k, t).into_iter().all(|cols| {
        let mut count = vec![0u64; cells];
        for r in rows {
            let idx = cols.iter().fold(0, |acc, &c| acc * spec.s + r[c]);
            count[idx] += 1;
        }
        count.iter().all(|&c| c == spec.lambda)
    })
}

pub fn is_oa_frequencies(x: &[u64], spec: &OASpec) -> bool {
    x.len() == spec.n_vars() && is_oa(&array_from_frequencies(x, spec.k, spec.s), spec)
}
