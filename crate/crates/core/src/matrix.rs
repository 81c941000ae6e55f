//! Dense matrices over an exact field, with zero dimensions allowed.
//!
//! Elimination never pivots on magnitude: the pivot is the first nonzero
//! entry of the pivot column, so results are identical across runs.

use std::fmt;
use std::ops::{Add, Index, Mul, Range, Sub};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::scalar::{primitive_scale, Field, Involution, Scalar};

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Matrix {
    rows: usize,
    cols: usize,
    field: Field,
    data: Vec<Scalar>,
}

/// Where `row_echelon_transform` places the zero rows.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ZeroRows {
    Bottom,
    Top,
}

/// Reduced row echelon form `reduced = transform · A`.
#[derive(Clone, Debug)]
pub struct Rref {
    pub transform: Matrix,
    pub reduced: Matrix,
    pub pivots: Vec<usize>,
}

/// Nullity, *normal nullity, *non-normal nullity and the remaining size.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Invariants {
    pub nu: usize,
    pub zeta: usize,
    pub kappa: usize,
    pub rho: usize,
}

impl Matrix {
    pub fn zeros(rows: usize, cols: usize, field: Field) -> Matrix {
        Matrix { rows, cols, field, data: vec![Scalar::zero(field); rows * cols] }
    }

    pub fn identity(n: usize, field: Field) -> Matrix {
        let mut m = Matrix::zeros(n, n, field);
        for i in 0..n {
            m.data[i * n + i] = Scalar::one(field);
        }
        m
    }

    pub fn from_fn(
        rows: usize,
        cols: usize,
        field: Field,
        mut f: impl FnMut(usize, usize) -> Scalar,
    ) -> Matrix {
        let mut data = Vec::with_capacity(rows * cols);
        for i in 0..rows {
            for j in 0..cols {
                let v = f(i, j);
                debug_assert_eq!(v.field(), field);
                data.push(v);
            }
        }
        Matrix { rows, cols, field, data }
    }

    /// Builds a matrix from row-major entries, checking length and field.
    pub fn from_vec(rows: usize, cols: usize, field: Field, data: Vec<Scalar>) -> Result<Matrix> {
        if data.len() != rows * cols {
            return Err(Error::DimensionMismatch(format!(
                "{} entries for a {rows}x{cols} matrix",
                data.len()
            )));
        }
        if let Some(bad) = data.iter().find(|s| s.field() != field) {
            return Err(Error::FieldMismatch { expected: field.name(), found: bad.field().name() });
        }
        Ok(Matrix { rows, cols, field, data })
    }

    pub fn from_rows(field: Field, rows: Vec<Vec<Scalar>>) -> Result<Matrix> {
        let r = rows.len();
        let c = rows.first().map_or(0, Vec::len);
        if rows.iter().any(|row| row.len() != c) {
            return Err(Error::DimensionMismatch("ragged rows".to_string()));
        }
        Matrix::from_vec(r, c, field, rows.into_iter().flatten().collect())
    }

    /// Integer entries, mostly for tests and examples.
    pub fn from_i64(field: Field, rows: &[&[i64]]) -> Matrix {
        let r = rows.len();
        let c = rows.first().map_or(0, |row| row.len());
        Matrix::from_fn(r, c, field, |i, j| Scalar::from_i64(field, rows[i][j]))
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn field(&self) -> Field {
        self.field
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    pub fn entries(&self) -> &[Scalar] {
        &self.data
    }

    pub fn get(&self, i: usize, j: usize) -> &Scalar {
        &self.data[i * self.cols + j]
    }

    pub fn set(&mut self, i: usize, j: usize, v: Scalar) {
        self.data[i * self.cols + j] = v;
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(Scalar::is_zero)
    }

    pub fn require_square(&self) -> Result<usize> {
        if self.is_square() {
            Ok(self.rows)
        } else {
            Err(Error::NotSquare { rows: self.rows, cols: self.cols })
        }
    }

    pub fn transpose(&self) -> Matrix {
        Matrix::from_fn(self.cols, self.rows, self.field, |i, j| self.get(j, i).clone())
    }

    /// `A*`: the entry-wise conjugate of the transpose.
    pub fn conj_transpose(&self, involution: Involution) -> Matrix {
        Matrix::from_fn(self.cols, self.rows, self.field, |i, j| {
            self.get(j, i).conjugate(involution)
        })
    }

    pub fn scale(&self, s: &Scalar) -> Matrix {
        Matrix {
            data: self.data.iter().map(|x| x * s).collect(),
            ..self.clone()
        }
    }

    pub fn submatrix(&self, rows: Range<usize>, cols: Range<usize>) -> Matrix {
        Matrix::from_fn(rows.len(), cols.len(), self.field, |i, j| {
            self.get(rows.start + i, cols.start + j).clone()
        })
    }

    /// Overwrites the block starting at `(row, col)` with `block`.
    pub fn set_block(&mut self, row: usize, col: usize, block: &Matrix) {
        assert!(row + block.rows <= self.rows && col + block.cols <= self.cols);
        for i in 0..block.rows {
            for j in 0..block.cols {
                self.set(row + i, col + j, block.get(i, j).clone());
            }
        }
    }

    /// `[self; other]`.
    pub fn vstack(&self, other: &Matrix) -> Matrix {
        assert_eq!(self.cols, other.cols, "vstack column mismatch");
        let mut data = self.data.clone();
        data.extend(other.data.iter().cloned());
        Matrix { rows: self.rows + other.rows, cols: self.cols, field: self.field, data }
    }

    /// `[self other]`.
    pub fn hstack(&self, other: &Matrix) -> Matrix {
        assert_eq!(self.rows, other.rows, "hstack row mismatch");
        let mut m = Matrix::zeros(self.rows, self.cols + other.cols, self.field);
        m.set_block(0, 0, self);
        m.set_block(0, self.cols, other);
        m
    }

    /// `self ⊕ other`.
    pub fn direct_sum(&self, other: &Matrix) -> Matrix {
        direct_sum(self.field, &[self.clone(), other.clone()])
    }

    pub fn swap_rows(&mut self, a: usize, b: usize) {
        if a == b {
            return;
        }
        for j in 0..self.cols {
            self.data.swap(a * self.cols + j, b * self.cols + j);
        }
    }

    /// row[target] += factor · row[source]
    pub fn add_row_multiple(&mut self, target: usize, source: usize, factor: &Scalar) {
        if factor.is_zero() {
            return;
        }
        for j in 0..self.cols {
            let s = self.get(source, j);
            if s.is_zero() {
                continue;
            }
            let v = self.get(target, j) + &(factor * s);
            self.set(target, j, v);
        }
    }

    pub fn scale_row(&mut self, row: usize, factor: &Scalar) {
        for j in 0..self.cols {
            let v = self.get(row, j) * factor;
            self.set(row, j, v);
        }
    }

    /// Nonsingular `T` and `r = rank A` such that the rank-many independent
    /// rows of `T·A` sit on top (`Bottom`) or at the bottom (`Top`), with the
    /// zero rows on the other side.
    ///
    /// The rows of `T` for the nonzero part are unit vectors picking a
    /// maximal independent set of rows of `A` (first found, in order), and
    /// each zero row is a multiple of `e_j − Σ c_i e_i`, expressing a
    /// dependent row `j` through that set, scaled to primitive integers
    /// over ℚ and ℚ(i). Hence `T·A·T*` keeps a principal submatrix of `A`
    /// on the diagonal and entries grow only through the coefficients `c`.
    pub fn row_echelon_transform(&self, zeros: ZeroRows) -> (Matrix, usize) {
        let (reduced, independent) = self.transpose().reduced_echelon();
        let rank = independent.len();
        let field = self.field;
        let mut t = Matrix::zeros(self.rows, self.rows, field);
        let (unit_start, null_start) = match zeros {
            ZeroRows::Bottom => (0, rank),
            ZeroRows::Top => (self.rows - rank, 0),
        };
        for (k, &i) in independent.iter().enumerate() {
            t.set(unit_start + k, i, Scalar::one(field));
        }
        let dependent = (0..self.rows).filter(|j| !independent.contains(j));
        for (k, j) in dependent.enumerate() {
            let row = null_start + k;
            t.set(row, j, Scalar::one(field));
            for (p, &i) in independent.iter().enumerate() {
                t.set(row, i, -reduced.get(p, j).clone());
            }
            let entries = &t.data[row * self.rows..(row + 1) * self.rows];
            if let Some(c) = primitive_scale(entries) {
                t.scale_row(row, &Scalar::from_rational(field, c));
            }
        }
        (t, rank)
    }

    /// Gauss–Jordan reduction without a transform: the reduced matrix and
    /// its pivot columns.
    fn reduced_echelon(&self) -> (Matrix, Vec<usize>) {
        let mut a = self.clone();
        let mut pivots = Vec::new();
        let mut r = 0;
        for c in 0..self.cols {
            if r == self.rows {
                break;
            }
            let Some(p) = (r..self.rows).find(|&p| !a.get(p, c).is_zero()) else {
                continue;
            };
            a.swap_rows(r, p);
            let inv = a.get(r, c).inv().expect("nonzero pivot");
            a.scale_row(r, &inv);
            for q in 0..self.rows {
                if q == r || a.get(q, c).is_zero() {
                    continue;
                }
                let f = -a.get(q, c).clone();
                a.add_row_multiple(q, r, &f);
            }
            pivots.push(c);
            r += 1;
        }
        (a, pivots)
    }

    /// Gauss–Jordan reduction with the transform accumulated explicitly.
    pub fn rref_transform(&self) -> Rref {
        let mut a = self.clone();
        let mut t = Matrix::identity(self.rows, self.field);
        let mut pivots = Vec::new();
        let mut r = 0;
        for c in 0..self.cols {
            if r == self.rows {
                break;
            }
            let Some(p) = (r..self.rows).find(|&p| !a.get(p, c).is_zero()) else {
                continue;
            };
            a.swap_rows(r, p);
            t.swap_rows(r, p);
            let inv = a.get(r, c).inv().expect("nonzero pivot");
            a.scale_row(r, &inv);
            t.scale_row(r, &inv);
            for q in 0..self.rows {
                if q == r || a.get(q, c).is_zero() {
                    continue;
                }
                let f = -a.get(q, c).clone();
                a.add_row_multiple(q, r, &f);
                t.add_row_multiple(q, r, &f);
            }
            pivots.push(c);
            r += 1;
        }
        Rref { transform: t, reduced: a, pivots }
    }

    pub fn rank(&self) -> usize {
        let mut a = self.clone();
        let mut r = 0;
        for c in 0..self.cols {
            if r == self.rows {
                break;
            }
            let Some(p) = (r..self.rows).find(|&p| !a.get(p, c).is_zero()) else {
                continue;
            };
            a.swap_rows(r, p);
            let pivot_inv = a.get(r, c).inv().expect("nonzero pivot");
            for q in r + 1..self.rows {
                if !a.get(q, c).is_zero() {
                    let f = -(a.get(q, c) * &pivot_inv);
                    a.add_row_multiple(q, r, &f);
                }
            }
            r += 1;
        }
        r
    }

    pub fn nullity(&self) -> usize {
        self.cols - self.rank()
    }

    /// Columns form a basis of `N(A)`, one per free column in increasing order.
    pub fn nullspace(&self) -> Matrix {
        let rref = self.rref_transform();
        let free: Vec<usize> = (0..self.cols).filter(|c| !rref.pivots.contains(c)).collect();
        let mut basis = Matrix::zeros(self.cols, free.len(), self.field);
        for (k, &fc) in free.iter().enumerate() {
            basis.set(fc, k, Scalar::one(self.field));
            for (row, &pc) in rref.pivots.iter().enumerate() {
                basis.set(pc, k, -rref.reduced.get(row, fc).clone());
            }
        }
        basis
    }

    /// Square with full rank. The 0×0 matrix is nonsingular.
    pub fn is_nonsingular(&self) -> bool {
        self.is_square() && self.rank() == self.rows
    }

    pub fn inverse(&self) -> Result<Matrix> {
        let n = self.require_square()?;
        let rref = self.rref_transform();
        if rref.pivots.len() != n {
            return Err(Error::DivisionByZero);
        }
        Ok(rref.transform)
    }

    /// ν, ζ, κ, ρ of a square matrix; ζ is the nullity of `[A; A*]`.
    pub fn invariants(&self, involution: Involution) -> Result<Invariants> {
        let m = self.require_square()?;
        let nu = self.nullity();
        let zeta = self.vstack(&self.conj_transpose(involution)).nullity();
        let kappa = nu - zeta;
        Ok(Invariants { nu, zeta, kappa, rho: m - kappa - nu })
    }

    /// `X·self·X*`.
    pub fn congruence(&self, x: &Matrix, involution: Involution) -> Matrix {
        &(x * self) * &x.conj_transpose(involution)
    }

    /// Largest absolute entry, as floats (real/imag magnitude for ℚ(i)).
    pub fn max_abs_f64(&self) -> f64 {
        self.data
            .iter()
            .map(|s| {
                let (re, im) = s.to_f64_pair();
                re.hypot(im)
            })
            .fold(0.0, f64::max)
    }

    /// Number of nonzero entries.
    pub fn nnz(&self) -> usize {
        self.data.iter().filter(|s| !s.is_zero()).count()
    }
}

/// Block-diagonal sum; zero-dimension summands only shift the offsets, so
/// `0_{p×0} ⊕ 0_{0×q} = 0_{p×q}`.
pub fn direct_sum(field: Field, blocks: &[Matrix]) -> Matrix {
    let rows = blocks.iter().map(Matrix::rows).sum();
    let cols = blocks.iter().map(Matrix::cols).sum();
    let mut m = Matrix::zeros(rows, cols, field);
    let (mut r, mut c) = (0, 0);
    for b in blocks {
        m.set_block(r, c, b);
        r += b.rows;
        c += b.cols;
    }
    m
}

/// `J_n`: ones on the first superdiagonal. `J_0` is the 0×0 matrix.
pub fn jordan_block(n: usize, field: Field) -> Matrix {
    Matrix::from_fn(n, n, field, |i, j| {
        if j == i + 1 { Scalar::one(field) } else { Scalar::zero(field) }
    })
}

/// `F_n = [I_{n-1} 0]`, of size (n−1)×n.
pub fn f_block(n: usize, field: Field) -> Matrix {
    assert!(n >= 1, "F_n needs n >= 1");
    Matrix::from_fn(n - 1, n, field, |i, j| {
        if i == j { Scalar::one(field) } else { Scalar::zero(field) }
    })
}

/// `G_n = [0 I_{n-1}]`, of size (n−1)×n.
pub fn g_block(n: usize, field: Field) -> Matrix {
    assert!(n >= 1, "G_n needs n >= 1");
    Matrix::from_fn(n - 1, n, field, |i, j| {
        if j == i + 1 { Scalar::one(field) } else { Scalar::zero(field) }
    })
}

/// `[I_rows 0]` of size rows×cols (rows ≤ cols).
pub fn identity_prefix(rows: usize, cols: usize, field: Field) -> Matrix {
    assert!(rows <= cols);
    Matrix::from_fn(rows, cols, field, |i, j| {
        if i == j { Scalar::one(field) } else { Scalar::zero(field) }
    })
}

/// A permutation of `0..n`, stored as `map[old] = new`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Permutation {
    map: Vec<usize>,
}

impl Permutation {
    pub fn identity(n: usize) -> Permutation {
        Permutation { map: (0..n).collect() }
    }

    pub fn from_map(map: Vec<usize>) -> Result<Permutation> {
        let mut seen = vec![false; map.len()];
        for &v in &map {
            if v >= map.len() || std::mem::replace(&mut seen[v], true) {
                return Err(Error::DimensionMismatch(format!("{map:?} is not a permutation")));
            }
        }
        Ok(Permutation { map })
    }

    pub fn len(&self) -> usize {
        self.map.len()
    }

    pub fn is_empty(&self) -> bool {
        self.map.is_empty()
    }

    pub fn apply(&self, old: usize) -> usize {
        self.map[old]
    }

    pub fn as_slice(&self) -> &[usize] {
        &self.map
    }

    /// `P` with `P[map[i], i] = 1`, so `(P·A·Pᵀ)[map[a], map[b]] = A[a, b]`.
    pub fn to_matrix(&self, field: Field) -> Matrix {
        let n = self.map.len();
        let mut p = Matrix::zeros(n, n, field);
        for (old, &new) in self.map.iter().enumerate() {
            p.set(new, old, Scalar::one(field));
        }
        p
    }
}

impl Index<(usize, usize)> for Matrix {
    type Output = Scalar;
    fn index(&self, (i, j): (usize, usize)) -> &Scalar {
        self.get(i, j)
    }
}

impl Mul<&Matrix> for &Matrix {
    type Output = Matrix;

    fn mul(self, rhs: &Matrix) -> Matrix {
        assert_eq!(self.cols, rhs.rows, "matrix product dimension mismatch");
        assert_eq!(self.field, rhs.field, "matrix product field mismatch");
        let mut out = Matrix::zeros(self.rows, rhs.cols, self.field);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self.get(i, k);
                if a.is_zero() {
                    continue;
                }
                let one = a.is_one();
                for j in 0..rhs.cols {
                    let b = rhs.get(k, j);
                    if b.is_zero() {
                        continue;
                    }
                    let term = if one { b.clone() } else { a * b };
                    let idx = i * rhs.cols + j;
                    out.data[idx] = &out.data[idx] + &term;
                }
            }
        }
        out
    }
}

impl Add<&Matrix> for &Matrix {
    type Output = Matrix;
    fn add(self, rhs: &Matrix) -> Matrix {
        assert_eq!((self.rows, self.cols), (rhs.rows, rhs.cols), "sum dimension mismatch");
        Matrix {
            data: self.data.iter().zip(&rhs.data).map(|(a, b)| a + b).collect(),
            ..self.clone()
        }
    }
}

impl Sub<&Matrix> for &Matrix {
    type Output = Matrix;
    fn sub(self, rhs: &Matrix) -> Matrix {
        assert_eq!((self.rows, self.cols), (rhs.rows, rhs.cols), "difference dimension mismatch");
        Matrix {
            data: self.data.iter().zip(&rhs.data).map(|(a, b)| a - b).collect(),
            ..self.clone()
        }
    }
}

impl fmt::Display for Matrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&crate::format::render_matrix(self))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn gauss(rows: &[&[(i64, i64)]]) -> Matrix {
        let r = rows.len();
        let c = rows.first().map_or(0, |x| x.len());
        Matrix::from_fn(r, c, Field::GaussianRational, |i, j| {
            Scalar::gaussian_int(rows[i][j].0, rows[i][j].1)
        })
    }

    fn worked_example() -> Matrix {
        gauss(&[&[(1, 0), (0, -1)], &[(0, 1), (1, 0)]])
    }

    #[test]
    fn conj_transpose_examples() {
        let a = worked_example();
        assert_eq!(a.conj_transpose(Involution::Conjugation), a);
        assert_eq!(
            a.conj_transpose(Involution::Identity),
            gauss(&[&[(1, 0), (0, 1)], &[(0, -1), (1, 0)]])
        );
        let z = Matrix::zeros(3, 0, Field::Rational);
        let zt = z.conj_transpose(Involution::Identity);
        assert_eq!((zt.rows(), zt.cols()), (0, 3));
    }

    #[test]
    fn row_echelon_examples() {
        let a = worked_example();
        let (t, r) = a.row_echelon_transform(ZeroRows::Bottom);
        assert_eq!(r, 1);
        assert_eq!(t, gauss(&[&[(1, 0), (0, 0)], &[(0, -1), (1, 0)]]));
        assert_eq!(&t * &a, gauss(&[&[(1, 0), (0, -1)], &[(0, 0), (0, 0)]]));

        let z = Matrix::zeros(2, 2, Field::Rational);
        let (t, r) = z.row_echelon_transform(ZeroRows::Bottom);
        assert_eq!((t, r), (Matrix::identity(2, Field::Rational), 0));

        let col = Matrix::from_i64(Field::Rational, &[&[0], &[1]]);
        let (t, r) = col.row_echelon_transform(ZeroRows::Top);
        assert_eq!((t, r), (Matrix::identity(2, Field::Rational), 1));
    }

    #[test]
    fn top_echelon_moves_zero_rows_up() {
        let a = Matrix::from_i64(Field::Rational, &[&[1, 2], &[0, 0], &[2, 4], &[0, 3]]);
        let (t, r) = a.row_echelon_transform(ZeroRows::Top);
        assert_eq!(r, 2);
        let ta = &t * &a;
        assert!(ta.submatrix(0..2, 0..2).is_zero());
        assert_eq!(ta.submatrix(2..4, 0..2).rank(), 2);
        assert!(t.is_nonsingular());
    }

    #[test]
    fn invariants_examples() {
        let a = worked_example();
        assert_eq!(
            a.invariants(Involution::Conjugation).unwrap(),
            Invariants { nu: 1, zeta: 1, kappa: 0, rho: 1 }
        );
        assert_eq!(
            a.invariants(Involution::Identity).unwrap(),
            Invariants { nu: 1, zeta: 0, kappa: 1, rho: 0 }
        );
        let j2 = jordan_block(2, Field::Rational);
        assert_eq!(
            j2.invariants(Involution::Identity).unwrap(),
            Invariants { nu: 1, zeta: 0, kappa: 1, rho: 0 }
        );
        assert!(Matrix::zeros(2, 3, Field::Rational).invariants(Involution::Identity).is_err());
    }

    #[test]
    fn block_constructors() {
        let f = Field::Rational;
        assert_eq!(jordan_block(2, f), Matrix::from_i64(f, &[&[0, 1], &[0, 0]]));
        assert_eq!(f_block(2, f), Matrix::from_i64(f, &[&[1, 0]]));
        assert_eq!(g_block(2, f), Matrix::from_i64(f, &[&[0, 1]]));
        let f1 = f_block(1, f);
        assert_eq!((f1.rows(), f1.cols()), (0, 1));
        let s = direct_sum(f, &[Matrix::zeros(2, 0, f), Matrix::zeros(0, 3, f)]);
        assert_eq!(s, Matrix::zeros(2, 3, f));
    }

    #[test]
    fn direct_sum_zero_dimension_conventions() {
        let f = Field::Rational;
        let m = Matrix::from_i64(f, &[&[1, 2]]);
        let below = direct_sum(f, &[m.clone(), Matrix::zeros(2, 0, f)]);
        assert_eq!(below, Matrix::from_i64(f, &[&[1, 2], &[0, 0], &[0, 0]]));
        let right = direct_sum(f, &[m, Matrix::zeros(0, 2, f)]);
        assert_eq!(right, Matrix::from_i64(f, &[&[1, 2, 0, 0]]));
        assert!(Matrix::zeros(0, 0, f).is_nonsingular());
    }

    #[test]
    fn nullspace_uses_free_columns_in_order() {
        let f = Field::Rational;
        let a = Matrix::from_i64(f, &[&[1, 2, 0, 1], &[0, 0, 1, 1]]);
        let ns = a.nullspace();
        assert_eq!(ns.cols(), 2);
        assert!((&a * &ns).is_zero());
        assert_eq!(ns, Matrix::from_i64(f, &[&[-2, -1], &[1, 0], &[0, -1], &[0, 1]]));
    }

    #[test]
    fn inverse_and_permutation() {
        let f = Field::PrimeField(7);
        let a = Matrix::from_i64(f, &[&[2, 1], &[1, 1]]);
        let inv = a.inverse().unwrap();
        assert_eq!(&a * &inv, Matrix::identity(2, f));
        assert!(Matrix::zeros(2, 2, f).inverse().is_err());

        let p = Permutation::from_map(vec![1, 2, 0]).unwrap();
        let j = jordan_block(3, Field::Rational);
        let pm = p.to_matrix(Field::Rational);
        let moved = &(&pm * &j) * &pm.transpose();
        assert!(moved.get(1, 2).is_one() && moved.get(2, 0).is_one());
        assert!(Permutation::from_map(vec![0, 0]).is_err());
    }
}
