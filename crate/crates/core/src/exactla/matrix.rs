use std::fmt;
use std::ops::{Index, IndexMut};

use super::rat::{denominator_lcm, Rat};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum LinAlgError {
    #[error("Gram matrix A·Aᵀ is singular (A is not of full row rank)")]
    SingularGram,
    #[error("dimension mismatch: {0}")]
    Dimension(String),
}

/// Dense row-major matrix of exact rationals.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct RatMatrix {
    rows: usize,
    cols: usize,
    data: Vec<Rat>,
}

impl RatMatrix {
    pub fn zeros(rows: usize, cols: usize) -> RatMatrix {
        RatMatrix { rows, cols, data: vec![Rat::zero(); rows * cols] }
    }

    pub fn identity(n: usize) -> RatMatrix {
        let mut m = RatMatrix::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = Rat::one();
        }
        m
    }

    pub fn from_rows(rows: Vec<Vec<Rat>>, cols: usize) -> RatMatrix {
        let r = rows.len();
        let mut data = Vec::with_capacity(r * cols);
        for row in rows {
            assert_eq!(row.len(), cols, "ragged matrix rows");
            data.extend(row);
        }
        RatMatrix { rows: r, cols, data }
    }

    pub fn from_i64(rows: &[Vec<i64>]) -> RatMatrix {
        let cols = rows.first().map_or(0, |r| r.len());
        RatMatrix::from_rows(rows.iter().map(|r| r.iter().map(|&x| Rat::from_int(x)).collect()).collect(), cols)
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn row(&self, i: usize) -> &[Rat] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn row_mut(&mut self, i: usize) -> &mut [Rat] {
        &mut self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn row_vecs(&self) -> Vec<Vec<Rat>> {
        (0..self.rows).map(|i| self.row(i).to_vec()).collect()
    }

    pub fn entries(&self) -> &[Rat] {
        &self.data
    }

    pub fn push_row(&mut self, row: Vec<Rat>) {
        assert_eq!(row.len(), self.cols, "row length mismatch");
        self.data.extend(row);
        self.rows += 1;
    }

    /// Rows selected by `idx`, in that order.
    pub fn select_rows(&self, idx: &[usize]) -> RatMatrix {
        RatMatrix::from_rows(idx.iter().map(|&i| self.row(i).to_vec()).collect(), self.cols)
    }

    pub fn swap_rows(&mut self, a: usize, b: usize) {
        if a == b {
            return;
        }
        for j in 0..self.cols {
            self.data.swap(a * self.cols + j, b * self.cols + j);
        }
    }

    pub fn transpose(&self) -> RatMatrix {
        let mut t = RatMatrix::zeros(self.cols, self.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                t[(j, i)] = self[(i, j)].clone();
            }
        }
        t
    }

    pub fn mul(&self, other: &RatMatrix) -> RatMatrix {
        assert_eq!(self.cols, other.rows, "matrix product dimension mismatch");
        let mut out = RatMatrix::zeros(self.rows, other.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = &self[(i, k)];
                if a.is_zero() {
                    continue;
                }
                for j in 0..other.cols {
                    let b = &other[(k, j)];
                    if !b.is_zero() {
                        let p = a * b;
                        out[(i, j)] += &p;
                    }
                }
            }
        }
        out
    }

    pub fn mul_vec(&self, x: &[Rat]) -> Vec<Rat> {
        assert_eq!(self.cols, x.len(), "matrix-vector dimension mismatch");
        (0..self.rows).map(|i| dot(self.row(i), x)).collect()
    }

    pub fn sub(&self, other: &RatMatrix) -> RatMatrix {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols));
        RatMatrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().zip(&other.data).map(|(a, b)| a - b).collect(),
        }
    }

    /// `[self | other]`.
    pub fn hcat(&self, other: &RatMatrix) -> RatMatrix {
        assert_eq!(self.rows, other.rows, "hcat row mismatch");
        let cols = self.cols + other.cols;
        let mut data = Vec::with_capacity(self.rows * cols);
        for i in 0..self.rows {
            data.extend_from_slice(self.row(i));
            data.extend_from_slice(other.row(i));
        }
        RatMatrix { rows: self.rows, cols, data }
    }

    /// `[self; other]`.
    pub fn vcat(&self, other: &RatMatrix) -> RatMatrix {
        assert_eq!(self.cols, other.cols, "vcat column mismatch");
        let mut data = self.data.clone();
        data.extend_from_slice(&other.data);
        RatMatrix { rows: self.rows + other.rows, cols: self.cols, data }
    }

    pub fn is_symmetric(&self) -> bool {
        self.rows == self.cols && (0..self.rows).all(|i| (0..i).all(|j| self[(i, j)] == self[(j, i)]))
    }

    pub fn rank(&self) -> usize {
        rref(self, None).1.len()
    }
}

impl Index<(usize, usize)> for RatMatrix {
    type Output = Rat;
    fn index(&self, (i, j): (usize, usize)) -> &Rat {
        debug_assert!(i < self.rows && j < self.cols);
        &self.data[i * self.cols + j]
    }
}

impl IndexMut<(usize, usize)> for RatMatrix {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut Rat {
        debug_assert!(i < self.rows && j < self.cols);
        &mut self.data[i * self.cols + j]
    }
}

impl fmt::Debug for RatMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "RatMatrix {}x{} [", self.rows, self.cols)?;
        for i in 0..self.rows {
            let cells: Vec<String> = self.row(i).iter().map(|x| x.to_string()).collect();
            writeln!(f, "  [{}]", cells.join(", "))?;
        }
        write!(f, "]")
    }
}

pub fn dot(a: &[Rat], b: &[Rat]) -> Rat {
    let mut s = Rat::zero();
    for (x, y) in a.iter().zip(b) {
        if !x.is_zero() && !y.is_zero() {
            s += &(x * y);
        }
    }
    s
}

/// Reduced row echelon form of `[m | augment]` by Gauss-Jordan elimination.
///
/// Returns the reduced matrix (including the augmented block) and all pivot
/// columns; pivots at index `>= m.cols()` belong to the augmented block.
pub fn rref(m: &RatMatrix, augment: Option<&RatMatrix>) -> (RatMatrix, Vec<usize>) {
    let mut r = match augment {
        Some(a) => m.hcat(a),
        None => m.clone(),
    };
    let (rows, cols) = (r.rows, r.cols);
    let mut pivots = Vec::new();
    let mut pr = 0;
    for col in 0..cols {
        if pr == rows {
            break;
        }
        let Some(p) = (pr..rows).find(|&i| !r[(i, col)].is_zero()) else {
            continue;
        };
        r.swap_rows(pr, p);
        let inv = r[(pr, col)].recip();
        if !inv.is_one() {
            for j in col..cols {
                let v = &r[(pr, j)] * &inv;
                r[(pr, j)] = v;
            }
        }
        let pivot_row: Vec<Rat> = r.row(pr)[col..].to_vec();
        for i in 0..rows {
            if i == pr {
                continue;
            }
            let f = r[(i, col)].clone();
            if f.is_zero() {
                continue;
            }
            for (off, pv) in pivot_row.iter().enumerate() {
                if !pv.is_zero() {
                    let v = &r[(i, col + off)] - &(&f * pv);
                    r[(i, col + off)] = v;
                }
            }
        }
        pivots.push(col);
        pr += 1;
    }
    (r, pivots)
}

/// Indices of a maximal linearly independent subset of rows, preferring
/// lower indices: row `i` is kept iff it is independent of the kept rows
/// before it.
pub fn independent_rows(m: &RatMatrix) -> Vec<usize> {
    rref(&m.transpose(), None).1
}

/// Solves `g · X = rhs` for square nonsingular `g` by fraction-free
/// (Bareiss) elimination on the integer-scaled augmented system, followed by
/// exact back substitution.
pub fn solve_square(g: &RatMatrix, rhs: &RatMatrix) -> Result<RatMatrix, LinAlgError> {
    let p = g.rows;
    if g.cols != p || rhs.rows != p {
        return Err(LinAlgError::Dimension(format!("system {}x{} with rhs {}x{}", g.rows, g.cols, rhs.rows, rhs.cols)));
    }
    let mut m = g.hcat(rhs);
    let w = m.cols;
    // Scaling rows by positive integers leaves the solution unchanged.
    for i in 0..p {
        let l = Rat::from(denominator_lcm(m.row(i)));
        if !l.is_one() {
            for x in m.row_mut(i) {
                *x = &*x * &l;
            }
        }
    }
    let mut prev = Rat::one();
    for k in 0..p {
        let Some(piv) = (k..p).find(|&i| !m[(i, k)].is_zero()) else {
            return Err(LinAlgError::SingularGram);
        };
        m.swap_rows(k, piv);
        for i in k + 1..p {
            for j in k + 1..w {
                let v = &(&(&m[(k, k)] * &m[(i, j)]) - &(&m[(i, k)] * &m[(k, j)])) / &prev;
                debug_assert!(v.is_integer());
                m[(i, j)] = v;
            }
            m[(i, k)] = Rat::zero();
        }
        prev = m[(k, k)].clone();
    }
    let q = rhs.cols;
    let mut x = RatMatrix::zeros(p, q);
    for i in (0..p).rev() {
        for c in 0..q {
            let mut s = m[(i, p + c)].clone();
            for j in i + 1..p {
                if !m[(i, j)].is_zero() {
                    s -= &(&m[(i, j)] * &x[(j, c)]);
                }
            }
            x[(i, c)] = &s / &m[(i, i)];
        }
    }
    Ok(x)
}

/// Orthogonal projector `Aᵀ(AAᵀ)⁻¹A` onto the row space of `a`.
pub fn row_space_projector(a: &RatMatrix) -> Result<RatMatrix, LinAlgError> {
    let n = a.cols;
    if a.rows == 0 {
        return Ok(RatMatrix::zeros(n, n));
    }
    let at = a.transpose();
    let gram = a.mul(&at);
    let x = solve_square(&gram, a)?;
    Ok(at.mul(&x))
}

/// Some solution of `a x = b`, or `None` if the system is inconsistent.
pub fn particular_solution(a: &RatMatrix, b: &[Rat]) -> Option<Vec<Rat>> {
    let n = a.cols;
    let rhs = RatMatrix::from_rows(b.iter().map(|x| vec![x.clone()]).collect(), 1);
    let (r, pivots) = rref(a, Some(&rhs));
    let mut x = vec![Rat::zero(); n];
    for (i, &p) in pivots.iter().enumerate() {
        if p == n {
            return None;
        }
        x[p] = r[(i, n)].clone();
    }
    Some(x)
}
