//! Dense exact matrices and exact rank computation.
//!
//! Rank routines are fraction-free (Bareiss) over the integers, with an
//! optional modular pre-pass used purely as a column selector: a full-rank
//! certificate modulo a prime is already exact evidence of full rank over
//! ℚ, and for rectangular systems it picks the columns the exact
//! elimination then confirms. Nothing here ever rounds.

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};

use crate::scalar::Scalar;

/// Dense row-major matrix over an exact scalar.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct Matrix<T: Scalar> {
    rows: usize,
    cols: usize,
    data: Vec<T>,
}

impl<T: Scalar> Matrix<T> {
    pub fn zero(rows: usize, cols: usize) -> Self {
        Matrix {
            rows,
            cols,
            data: vec![T::zero(); rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Matrix::zero(n, n);
        for i in 0..n {
            m[(i, i)] = T::one();
        }
        m
    }

    pub fn from_rows(rows: Vec<Vec<T>>) -> Self {
        let r = rows.len();
        let c = rows.first().map_or(0, Vec::len);
        assert!(rows.iter().all(|row| row.len() == c));
        Matrix {
            rows: r,
            cols: c,
            data: rows.into_iter().flatten().collect(),
        }
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn row(&self, i: usize) -> &[T] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(Zero::is_zero)
    }

    pub fn add(&self, rhs: &Self) -> Self {
        assert_eq!((self.rows, self.cols), (rhs.rows, rhs.cols));
        Matrix {
            rows: self.rows,
            cols: self.cols,
            data: self
                .data
                .iter()
                .zip(&rhs.data)
                .map(|(a, b)| a.clone() + b.clone())
                .collect(),
        }
    }

    pub fn sub(&self, rhs: &Self) -> Self {
        assert_eq!((self.rows, self.cols), (rhs.rows, rhs.cols));
        Matrix {
            rows: self.rows,
            cols: self.cols,
            data: self
                .data
                .iter()
                .zip(&rhs.data)
                .map(|(a, b)| a.clone() - b.clone())
                .collect(),
        }
    }

    pub fn neg(&self) -> Self {
        Matrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(|a| -a.clone()).collect(),
        }
    }

    pub fn scale(&self, c: &T) -> Self {
        Matrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(|a| a.clone() * c.clone()).collect(),
        }
    }

    pub fn mul(&self, rhs: &Self) -> Self {
        assert_eq!(self.cols, rhs.rows);
        let mut out: Matrix<T> = Matrix::zero(self.rows, rhs.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = &self[(i, k)];
                if a.is_zero() {
                    continue;
                }
                let out_row = i * rhs.cols;
                let rhs_row = k * rhs.cols;
                for j in 0..rhs.cols {
                    let b = &rhs.data[rhs_row + j];
                    if b.is_zero() {
                        continue;
                    }
                    let cur = out.data[out_row + j].clone();
                    out.data[out_row + j] = cur + a.clone() * b.clone();
                }
            }
        }
        out
    }

    pub fn pow(&self, e: u32) -> Self {
        assert_eq!(self.rows, self.cols);
        let mut out = Matrix::identity(self.rows);
        for _ in 0..e {
            out = out.mul(self);
        }
        out
    }

    pub fn map<S: Scalar>(&self, f: impl Fn(&T) -> S) -> Matrix<S> {
        Matrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(f).collect(),
        }
    }

    pub fn flatten(&self) -> Vec<T> {
        self.data.clone()
    }
}

impl<T: Scalar> std::ops::Index<(usize, usize)> for Matrix<T> {
    type Output = T;
    fn index(&self, (i, j): (usize, usize)) -> &T {
        &self.data[i * self.cols + j]
    }
}

impl<T: Scalar> std::ops::IndexMut<(usize, usize)> for Matrix<T> {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut T {
        &mut self.data[i * self.cols + j]
    }
}

/// Exact rank of an integer matrix by fraction-free Bareiss elimination.
pub fn bareiss_rank(rows: &[Vec<BigInt>]) -> usize {
    let mut m: Vec<Vec<BigInt>> = rows.to_vec();
    let nrows = m.len();
    if nrows == 0 {
        return 0;
    }
    let ncols = m[0].len();
    let mut prev = BigInt::one();
    let mut rank = 0usize;
    let mut col = 0usize;
    while rank < nrows && col < ncols {
        // Pivot search in this column, preferring small magnitude.
        let mut pivot: Option<usize> = None;
        for r in rank..nrows {
            if !m[r][col].is_zero()
                && pivot.is_none_or(|p| m[r][col].magnitude() < m[p][col].magnitude())
            {
                pivot = Some(r);
            }
        }
        let Some(p) = pivot else {
            col += 1;
            continue;
        };
        m.swap(rank, p);
        for r in rank + 1..nrows {
            if m[r].iter().skip(col).all(Zero::is_zero) {
                continue;
            }
            for c in col + 1..ncols {
                // Bareiss: every division here is exact.
                let num = &m[rank][col] * &m[r][c] - &m[r][col] * &m[rank][c];
                m[r][c] = num / &prev;
            }
            m[r][col] = BigInt::zero();
        }
        prev = m[rank][col].clone();
        rank += 1;
        col += 1;
    }
    rank
}

const MODULUS: u64 = (1 << 61) - 1;

fn mulmod(a: u64, b: u64) -> u64 {
    ((a as u128 * b as u128) % MODULUS as u128) as u64
}

fn powmod(mut b: u64, mut e: u64) -> u64 {
    let mut acc = 1u64;
    while e > 0 {
        if e & 1 == 1 {
            acc = mulmod(acc, b);
        }
        b = mulmod(b, b);
        e >>= 1;
    }
    acc
}

fn invmod(a: u64) -> u64 {
    powmod(a, MODULUS - 2)
}

fn to_mod(v: &BigInt) -> u64 {
    let r = v % BigInt::from(MODULUS);
    let r = if r.is_negative() {
        r + BigInt::from(MODULUS)
    } else {
        r
    };
    u64::try_from(&r).unwrap()
}

/// Incremental echelon basis modulo 2^61 - 1. Rank modulo a prime is a
/// lower bound for rank over ℚ, so reaching full rank here is an exact
/// full-rank certificate.
pub struct ModularEchelon {
    cols: usize,
    // Reduced rows with their leading-column index.
    rows: Vec<(usize, Vec<u64>)>,
}

impl ModularEchelon {
    pub fn new(cols: usize) -> Self {
        ModularEchelon {
            cols,
            rows: Vec::new(),
        }
    }

    pub fn rank(&self) -> usize {
        self.rows.len()
    }

    /// Reduces `row` against the basis; returns true if it added a new
    /// pivot (i.e. was independent mod p).
    pub fn add_row(&mut self, row: &[BigInt]) -> bool {
        assert_eq!(row.len(), self.cols);
        let mut v: Vec<u64> = row.iter().map(to_mod).collect();
        for (lead, basis) in &self.rows {
            if v[*lead] != 0 {
                let f = v[*lead];
                for (x, b) in v.iter_mut().zip(basis) {
                    *x = (*x + mulmod(MODULUS - f, *b)) % MODULUS;
                }
            }
        }
        match v.iter().position(|&x| x != 0) {
            None => false,
            Some(lead) => {
                let inv = invmod(v[lead]);
                for x in v.iter_mut() {
                    *x = mulmod(*x, inv);
                }
                self.rows.push((lead, v));
                true
            }
        }
    }
}

/// Exact rank of a (possibly very wide) integer matrix.
///
/// A modular echelon pass selects one witness column per pivot; Bareiss on
/// that column subset gives an exact lower bound, the modular rank an exact
/// upper-bound check. The two agree on every matrix this crate builds; if
/// they ever disagreed the exact elimination over all columns would be the
/// fallback, so the result is exact either way.
pub fn exact_rank(rows: &[Vec<BigInt>]) -> usize {
    if rows.is_empty() {
        return 0;
    }
    let cols = rows[0].len();
    let mut ech = ModularEchelon::new(cols);
    for r in rows {
        ech.add_row(r);
    }
    let mod_rank = ech.rank();
    // Witness columns: the pivot columns of the modular echelon.
    let witness: Vec<usize> = ech.rows.iter().map(|(lead, _)| *lead).collect();
    let sub: Vec<Vec<BigInt>> = rows
        .iter()
        .map(|r| witness.iter().map(|&c| r[c].clone()).collect())
        .collect();
    let exact = bareiss_rank(&sub);
    if exact == mod_rank {
        exact
    } else {
        bareiss_rank(rows)
    }
}

/// Sparse square matrix with sorted rows, for the recursive quadratic
/// representations whose generators have very few nonzero entries.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct SparseMatrix<T: Scalar> {
    n: usize,
    rows: Vec<Vec<(u32, T)>>,
}

impl<T: Scalar> SparseMatrix<T> {
    pub fn zero(n: usize) -> Self {
        SparseMatrix {
            n,
            rows: vec![Vec::new(); n],
        }
    }

    pub fn identity(n: usize) -> Self {
        SparseMatrix {
            n,
            rows: (0..n).map(|i| vec![(i as u32, T::one())]).collect(),
        }
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn rows(&self) -> &[Vec<(u32, T)>] {
        &self.rows
    }

    pub fn nnz(&self) -> usize {
        self.rows.iter().map(Vec::len).sum()
    }

    pub fn set(&mut self, i: usize, j: usize, v: T) {
        let row = &mut self.rows[i];
        match row.binary_search_by_key(&(j as u32), |&(c, _)| c) {
            Ok(k) => {
                if v.is_zero() {
                    row.remove(k);
                } else {
                    row[k].1 = v;
                }
            }
            Err(k) => {
                if !v.is_zero() {
                    row.insert(k, (j as u32, v));
                }
            }
        }
    }

    pub fn get(&self, i: usize, j: usize) -> T {
        self.rows[i]
            .binary_search_by_key(&(j as u32), |&(c, _)| c)
            .map(|k| self.rows[i][k].1.clone())
            .unwrap_or_else(|_| T::zero())
    }

    pub fn is_zero(&self) -> bool {
        self.rows.iter().all(Vec::is_empty)
    }

    pub fn mul(&self, rhs: &Self) -> Self {
        assert_eq!(self.n, rhs.n);
        let mut out = SparseMatrix::zero(self.n);
        let mut scratch: Vec<T> = vec![T::zero(); self.n];
        let mut touched: Vec<u32> = Vec::new();
        for i in 0..self.n {
            for (k, a) in &self.rows[i] {
                for (j, b) in &rhs.rows[*k as usize] {
                    let cell = &mut scratch[*j as usize];
                    if cell.is_zero() {
                        touched.push(*j);
                    }
                    *cell = cell.clone() + a.clone() * b.clone();
                }
            }
            touched.sort_unstable();
            let mut row = Vec::with_capacity(touched.len());
            for &j in &touched {
                let v = std::mem::replace(&mut scratch[j as usize], T::zero());
                if !v.is_zero() {
                    row.push((j, v));
                }
            }
            touched.clear();
            out.rows[i] = row;
        }
        out
    }

    pub fn add(&self, rhs: &Self) -> Self {
        self.combine(rhs, |a, b| a + b)
    }

    pub fn sub(&self, rhs: &Self) -> Self {
        self.combine(rhs, |a, b| a - b)
    }

    fn combine(&self, rhs: &Self, f: impl Fn(T, T) -> T) -> Self {
        assert_eq!(self.n, rhs.n);
        let mut out = SparseMatrix::zero(self.n);
        for i in 0..self.n {
            let (ra, rb) = (&self.rows[i], &rhs.rows[i]);
            let mut row = Vec::with_capacity(ra.len() + rb.len());
            let (mut p, mut q) = (0usize, 0usize);
            while p < ra.len() || q < rb.len() {
                let (j, v) = match (ra.get(p), rb.get(q)) {
                    (Some(&(ja, _)), Some(&(jb, _))) if ja == jb => {
                        let v = f(ra[p].1.clone(), rb[q].1.clone());
                        p += 1;
                        q += 1;
                        (ja, v)
                    }
                    (Some(&(ja, _)), Some(&(jb, _))) if ja < jb => {
                        let v = f(ra[p].1.clone(), T::zero());
                        p += 1;
                        (ja, v)
                    }
                    (Some(_), Some(&(jb, _))) => {
                        let v = f(T::zero(), rb[q].1.clone());
                        q += 1;
                        (jb, v)
                    }
                    (Some(&(ja, _)), None) => {
                        let v = f(ra[p].1.clone(), T::zero());
                        p += 1;
                        (ja, v)
                    }
                    (None, Some(&(jb, _))) => {
                        let v = f(T::zero(), rb[q].1.clone());
                        q += 1;
                        (jb, v)
                    }
                    (None, None) => unreachable!(),
                };
                if !v.is_zero() {
                    row.push((j, v));
                }
            }
            out.rows[i] = row;
        }
        out
    }

    pub fn scale(&self, c: &T) -> Self {
        let mut out = self.clone();
        for row in &mut out.rows {
            row.retain_mut(|(_, v)| {
                *v = v.clone() * c.clone();
                !v.is_zero()
            });
        }
        out
    }

    /// Matrix–vector product `self · v`.
    pub fn apply(&self, v: &[T]) -> Vec<T> {
        self.rows
            .iter()
            .map(|row| {
                let mut acc = T::zero();
                for (j, a) in row {
                    acc = acc + a.clone() * v[*j as usize].clone();
                }
                acc
            })
            .collect()
    }

    /// Embeds blocks into a double-size matrix:
    /// `[[tl, 0], [bl, br]]`.
    pub fn lower_block(tl: &Self, bl: &Self, br: &Self) -> Self {
        let n = tl.n;
        let mut out = SparseMatrix::zero(2 * n);
        for i in 0..n {
            out.rows[i] = tl.rows[i].clone();
            let mut row = bl.rows[i].clone();
            row.extend(br.rows[i].iter().map(|&(j, ref v)| (j + n as u32, v.clone())));
            out.rows[n + i] = row;
        }
        out
    }
}

/// Incremental exact row space over the rationals: reduced echelon rows,
/// supporting rank queries and membership tests.
#[derive(Clone, Debug, Default)]
pub struct FractionSpan {
    // (pivot column, row normalized to pivot 1).
    rows: Vec<(usize, Vec<crate::coeff::Coeff>)>,
}

impl FractionSpan {
    pub fn new() -> Self {
        FractionSpan::default()
    }

    pub fn rank(&self) -> usize {
        self.rows.len()
    }

    fn reduced(&self, v: &[crate::coeff::Coeff]) -> Vec<crate::coeff::Coeff> {
        let mut v = v.to_vec();
        for (pivot, row) in &self.rows {
            let f = v[*pivot].clone();
            if !f.is_zero() {
                for (x, b) in v.iter_mut().zip(row) {
                    *x = x.clone() - f.clone() * b.clone();
                }
            }
        }
        v
    }

    pub fn contains(&self, v: &[crate::coeff::Coeff]) -> bool {
        self.reduced(v).iter().all(Zero::is_zero)
    }

    /// Adds `v` to the span; returns true when the rank grew.
    pub fn insert(&mut self, v: &[crate::coeff::Coeff]) -> bool {
        let mut v = self.reduced(v);
        let Some(pivot) = v.iter().position(|x| !x.is_zero()) else {
            return false;
        };
        let inv = crate::coeff::Coeff(
            num_rational::BigRational::one() / v[pivot].0.clone(),
        );
        for x in v.iter_mut() {
            *x = x.clone() * inv.clone();
        }
        self.rows.push((pivot, v));
        true
    }
}

/// Exact rank of a matrix of fractions: rows are cleared to integers (row
/// scaling is rank-preserving), then fraction-free elimination runs.
pub fn fraction_rank(rows: &[Vec<crate::coeff::Coeff>]) -> usize {
    let int_rows: Vec<Vec<BigInt>> = rows
        .iter()
        .map(|r| {
            let mut lcm = BigInt::one();
            for c in r {
                lcm = num_integer::Integer::lcm(&lcm, c.denom());
            }
            r.iter()
                .map(|c| c.numer() * (&lcm / c.denom()))
                .collect()
        })
        .collect();
    exact_rank(&int_rows)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::coeff::Coeff;
    use crate::scalar::Int64;

    fn bi(rows: &[&[i64]]) -> Vec<Vec<BigInt>> {
        rows.iter()
            .map(|r| r.iter().map(|&x| BigInt::from(x)).collect())
            .collect()
    }

    #[test]
    fn bareiss_rank_basics() {
        assert_eq!(bareiss_rank(&bi(&[&[1, 0], &[0, 1]])), 2);
        assert_eq!(bareiss_rank(&bi(&[&[1, 2], &[2, 4]])), 1);
        assert_eq!(bareiss_rank(&bi(&[&[0, 0], &[0, 0]])), 0);
        // Third row is the sum of the first two.
        assert_eq!(
            bareiss_rank(&bi(&[&[2, 3, 5], &[7, 11, 13], &[9, 14, 18]])),
            2
        );
        assert_eq!(
            bareiss_rank(&bi(&[&[2, 3, 5], &[7, 11, 13], &[9, 14, 19]])),
            3
        );
        // Wide matrix with dependent rows.
        assert_eq!(
            bareiss_rank(&bi(&[&[1, 2, 3, 4], &[2, 4, 6, 8], &[0, 1, 0, 1]])),
            2
        );
    }

    #[test]
    fn exact_rank_matches_bareiss() {
        let m = bi(&[&[3, 1, 4, 1], &[5, 9, 2, 6], &[8, 10, 6, 7], &[2, 7, 1, 8]]);
        assert_eq!(exact_rank(&m), bareiss_rank(&m));
        let dep = bi(&[&[1, 2, 3], &[4, 5, 6], &[5, 7, 9]]);
        assert_eq!(exact_rank(&dep), 2);
    }

    #[test]
    fn fraction_span_tracks_rank_and_membership() {
        let mut span = FractionSpan::new();
        let v = |xs: &[(i64, i64)]| -> Vec<Coeff> {
            xs.iter().map(|&(n, d)| Coeff::from_frac(n, d)).collect()
        };
        assert!(span.insert(&v(&[(1, 2), (0, 1), (1, 1)])));
        assert!(span.insert(&v(&[(0, 1), (1, 3), (0, 1)])));
        // A combination of the first two.
        assert!(!span.insert(&v(&[(1, 1), (2, 3), (2, 1)])));
        assert_eq!(span.rank(), 2);
        assert!(span.contains(&v(&[(3, 2), (1, 3), (3, 1)])));
        assert!(!span.contains(&v(&[(0, 1), (0, 1), (1, 1)])));
        assert_eq!(
            fraction_rank(&[
                v(&[(1, 2), (0, 1), (1, 1)]),
                v(&[(0, 1), (1, 3), (0, 1)]),
                v(&[(1, 1), (2, 3), (2, 1)]),
            ]),
            2
        );
    }

    #[test]
    fn matrix_mul_identity() {
        let mut a = Matrix::<Int64>::zero(2, 2);
        a[(0, 0)] = Int64(1);
        a[(0, 1)] = Int64(2);
        a[(1, 0)] = Int64(3);
        a[(1, 1)] = Int64(4);
        let i = Matrix::<Int64>::identity(2);
        assert_eq!(a.mul(&i), a);
        assert_eq!(i.mul(&a), a);
        let sq = a.mul(&a);
        assert_eq!(sq[(0, 0)], Int64(7));
        assert_eq!(sq[(1, 1)], Int64(22));
    }
}
