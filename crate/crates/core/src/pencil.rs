//! Regularization of *selfadjoint pencils `A + λA*`.
//!
//! A pencil is never stored symbolically: [`Pencil`] holds its two
//! coefficient matrices and identities are checked by evaluation at scalar
//! points together with structural equality of the coefficients.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::matrix::{direct_sum, f_block, g_block, jordan_block, Matrix, Permutation};
use crate::scalar::{Field, FieldSpec, Scalar};
use crate::sparse_form::full_decomposition;

/// The pencil `A + λA*`, represented by `A`.
#[derive(Clone, Debug)]
pub struct SelfadjointPencil {
    pub a: Matrix,
    pub spec: FieldSpec,
}

/// `constant + λ·linear`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Pencil {
    pub constant: Matrix,
    pub linear: Matrix,
}

impl Pencil {
    pub fn new(constant: Matrix, linear: Matrix) -> Pencil {
        assert_eq!((constant.rows(), constant.cols()), (linear.rows(), linear.cols()));
        Pencil { constant, linear }
    }

    pub fn rows(&self) -> usize {
        self.constant.rows()
    }

    pub fn cols(&self) -> usize {
        self.constant.cols()
    }

    pub fn evaluate(&self, lambda: &Scalar) -> Matrix {
        &self.constant + &self.linear.scale(lambda)
    }

    pub fn direct_sum(field: Field, parts: &[Pencil]) -> Pencil {
        let c: Vec<Matrix> = parts.iter().map(|p| p.constant.clone()).collect();
        let l: Vec<Matrix> = parts.iter().map(|p| p.linear.clone()).collect();
        Pencil { constant: direct_sum(field, &c), linear: direct_sum(field, &l) }
    }

    /// `left·(self)·right`, coefficient by coefficient.
    pub fn transform(&self, left: &Matrix, right: &Matrix) -> Pencil {
        Pencil {
            constant: &(left * &self.constant) * right,
            linear: &(left * &self.linear) * right,
        }
    }
}

/// Tag of a singular summand.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
#[serde(tag = "kind", content = "size", rename_all = "kebab-case")]
pub enum PencilBlock {
    /// `J_k + λJ_kᵀ`
    JordanPair(usize),
    /// `(F_ℓ + λG_ℓ) ⊕ (G_ℓᵀ + λF_ℓᵀ)`, replacing `J_{2ℓ-1} + λJ_{2ℓ-1}ᵀ`
    FG(usize),
    /// `(J_ℓ + λI_ℓ) ⊕ (I_ℓ + λJ_ℓ)`, replacing `J_{2ℓ} + λJ_{2ℓ}ᵀ`
    JI(usize),
}

impl PencilBlock {
    /// The strictly equivalent replacement of `JordanPair(k)`.
    pub fn replacement_of(k: usize) -> PencilBlock {
        if k % 2 == 1 { PencilBlock::FG(k.div_ceil(2)) } else { PencilBlock::JI(k / 2) }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct KroneckerBlock {
    pub block: PencilBlock,
    pub multiplicity: usize,
}

#[derive(Clone, Debug)]
pub struct PencilDecomposition {
    pub spec: FieldSpec,
    /// `S` with `S·(A + λA*)·S* = (regular + λ·regular*) ⊕ K`.
    pub transform: Matrix,
    pub regular: Matrix,
    /// `J_k + λJ_kᵀ` summands, in increasing size.
    pub kronecker_blocks: Vec<KroneckerBlock>,
}

impl PencilDecomposition {
    /// Same summands with each Jordan pair replaced per its parity.
    pub fn replaced_blocks(&self) -> Vec<KroneckerBlock> {
        self.kronecker_blocks
            .iter()
            .map(|b| match b.block {
                PencilBlock::JordanPair(k) => KroneckerBlock { block: PencilBlock::replacement_of(k), ..*b },
                _ => *b,
            })
            .collect()
    }

    /// `(regular + λ·regular*) ⊕ ⊕(J_k + λJ_kᵀ)`.
    pub fn reduced_pencil(&self) -> Pencil {
        let field = self.spec.field;
        let mut parts = vec![Pencil::new(self.regular.clone(), self.regular.conj_transpose(self.spec.involution))];
        for b in &self.kronecker_blocks {
            if let PencilBlock::JordanPair(k) = b.block {
                let j = jordan_block(k, field);
                let p = Pencil::new(j.clone(), j.transpose());
                parts.extend(std::iter::repeat_n(p, b.multiplicity));
            }
        }
        Pencil::direct_sum(field, &parts)
    }
}

pub fn pencil_regularize(p: &SelfadjointPencil) -> Result<PencilDecomposition> {
    let d = full_decomposition(&p.a, p.spec.involution)?;
    let kronecker_blocks = d
        .block_sum
        .jordan_multiplicities
        .iter()
        .map(|(&k, &c)| KroneckerBlock { block: PencilBlock::JordanPair(k), multiplicity: c })
        .collect();
    Ok(PencilDecomposition {
        spec: p.spec,
        transform: d.transform,
        regular: d.block_sum.regular_part,
        kronecker_blocks,
    })
}

/// The permutation `f` of `0..k` that sends the units `(i, i+1)` of `J_k` to
/// the units of the interleaved pattern `[[0, G_ℓᵀ], [F_ℓ, 0]]` (k = 2ℓ−1)
/// or `[[0, I_ℓ], [J_ℓ, 0]]` (k = 2ℓ).
///
/// For odd k the unit positions are walked as
/// `(ℓ,2ℓ−1), (2ℓ−1,ℓ−1), (ℓ−1,2ℓ−2), …, (ℓ+1,1)`, for even k as
/// `(1,ℓ+1), (ℓ+1,2), (2,ℓ+2), …, (ℓ,2ℓ)` (1-based).
pub fn kronecker_permutation(k: usize) -> Result<Permutation> {
    if k < 2 {
        return Err(Error::BlockSizeTooSmall(k));
    }
    let l = k.div_ceil(2);
    let f: Vec<usize> = (0..k)
        .map(|i| {
            let j = i / 2;
            match (k % 2, i % 2) {
                (1, 0) => l - j,
                (1, _) => 2 * l - 1 - j,
                (_, 0) => j + 1,
                _ => l + j + 1,
            }
        })
        .map(|one_based| one_based - 1)
        .collect();
    Permutation::from_map(f)
}

/// `[[0, G_ℓᵀ], [F_ℓ, 0]]` for k = 2ℓ−1, `[[0, I_ℓ], [J_ℓ, 0]]` for k = 2ℓ.
pub fn kronecker_pattern(k: usize, field: Field) -> Result<Matrix> {
    if k < 1 {
        return Err(Error::BlockSizeTooSmall(k));
    }
    let l = k.div_ceil(2);
    let (upper, lower) = if k % 2 == 1 {
        (g_block(l, field).transpose(), f_block(l, field))
    } else {
        (Matrix::identity(l, field), jordan_block(l, field))
    };
    let mut m = Matrix::zeros(k, k, field);
    m.set_block(0, k - upper.cols(), &upper);
    m.set_block(upper.rows(), 0, &lower);
    Ok(m)
}

/// A replacement of `J_k + λJ_kᵀ` and the constant matrices witnessing
/// strict equivalence: `left·(J_k + λJ_kᵀ)·right = combined`.
#[derive(Clone, Debug)]
pub struct BlockReplacement {
    pub k: usize,
    pub tag: PencilBlock,
    pub summands: Vec<Pencil>,
    pub combined: Pencil,
    pub permutation: Permutation,
    pub left: Matrix,
    pub right: Matrix,
}

fn reversal(n: usize, field: Field) -> Matrix {
    Permutation::from_map((0..n).rev().collect()).expect("reversal").to_matrix(field)
}

pub fn replace_block(k: usize, field: Field) -> Result<BlockReplacement> {
    if k < 1 {
        return Err(Error::BlockSizeTooSmall(k));
    }
    let l = k.div_ceil(2);
    let tag = PencilBlock::replacement_of(k);
    let summands = if k % 2 == 1 {
        let (f, g) = (f_block(l, field), g_block(l, field));
        vec![Pencil::new(f.clone(), g.clone()), Pencil::new(g.transpose(), f.transpose())]
    } else {
        let (j, i) = (jordan_block(l, field), Matrix::identity(l, field));
        vec![Pencil::new(j.clone(), i.clone()), Pencil::new(i, j)]
    };
    let combined = Pencil::direct_sum(field, &summands);
    let permutation = if k == 1 { Permutation::identity(1) } else { kronecker_permutation(k)? };
    let s = permutation.to_matrix(field);

    // bring the lower block rows of the pattern to the top
    let upper_rows = l;
    let lower_rows = k - l;
    let swap = Permutation::from_map(
        (0..k).map(|i| if i < upper_rows { i + lower_rows } else { i - upper_rows }).collect(),
    )?
    .to_matrix(field);
    let mut left = &swap * &s;
    let mut right = s.transpose();
    if k % 2 == 0 {
        // I + λJᵀ becomes I + λJ under the reversal on both sides
        let fix = direct_sum(field, &[Matrix::identity(l, field), reversal(l, field)]);
        left = &fix * &left;
        right = &right * &fix;
    }
    Ok(BlockReplacement { k, tag, summands, combined, permutation, left, right })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::Involution;

    #[test]
    fn permutation_examples() {
        assert_eq!(kronecker_permutation(2).unwrap(), Permutation::identity(2));
        assert_eq!(kronecker_permutation(4).unwrap().as_slice(), &[0, 2, 1, 3]);
        assert_eq!(kronecker_permutation(3).unwrap().as_slice(), &[1, 2, 0]);
        assert_eq!(kronecker_permutation(1).unwrap_err(), Error::BlockSizeTooSmall(1));
    }

    #[test]
    fn pattern_units_for_k4() {
        let f = Field::Rational;
        let n2 = kronecker_pattern(4, f).unwrap();
        let units: Vec<(usize, usize)> =
            (0..4).flat_map(|i| (0..4).map(move |j| (i, j))).filter(|&(i, j)| n2.get(i, j).is_one()).collect();
        // 1-based {(1,3),(3,2),(2,4)}
        assert_eq!(units, vec![(0, 2), (1, 3), (2, 1)]);
    }

    #[test]
    fn replacement_examples() {
        let f = Field::Rational;
        let r = replace_block(2, f).unwrap();
        assert_eq!(r.tag, PencilBlock::JI(1));
        assert_eq!(r.permutation, Permutation::identity(2));
        assert_eq!(r.combined.constant, Matrix::from_i64(f, &[&[0, 0], &[0, 1]]));
        assert_eq!(r.combined.linear, Matrix::from_i64(f, &[&[1, 0], &[0, 0]]));

        let r = replace_block(1, f).unwrap();
        assert_eq!(r.tag, PencilBlock::FG(1));
        assert_eq!((r.summands[0].rows(), r.summands[0].cols()), (0, 1));
        assert_eq!((r.summands[1].rows(), r.summands[1].cols()), (1, 0));
        assert_eq!(r.combined.constant, Matrix::zeros(1, 1, f));

        let r = replace_block(3, f).unwrap();
        assert_eq!(r.tag, PencilBlock::FG(2));
        assert_eq!(r.summands[0].constant, Matrix::from_i64(f, &[&[1, 0]]));
        assert_eq!(r.summands[0].linear, Matrix::from_i64(f, &[&[0, 1]]));
        assert_eq!(r.permutation.as_slice(), &[1, 2, 0]);
        assert!(replace_block(0, f).is_err());
    }

    #[test]
    fn witnesses_establish_strict_equivalence() {
        let f = Field::Rational;
        for k in 1..=9 {
            let r = replace_block(k, f).unwrap();
            let j = jordan_block(k, f);
            let moved = Pencil::new(j.clone(), j.transpose()).transform(&r.left, &r.right);
            assert_eq!(moved, r.combined, "k = {k}");
            assert!(r.left.is_nonsingular() && r.right.is_nonsingular());
        }
    }

    #[test]
    fn pencil_examples() {
        let f = Field::Rational;
        let p = SelfadjointPencil { a: jordan_block(2, f), spec: FieldSpec::rational() };
        let d = pencil_regularize(&p).unwrap();
        assert_eq!(d.regular.rows(), 0);
        assert_eq!(d.kronecker_blocks, vec![KroneckerBlock { block: PencilBlock::JordanPair(2), multiplicity: 1 }]);
        assert_eq!(d.replaced_blocks()[0].block, PencilBlock::JI(1));

        let g = Field::GaussianRational;
        let a = Matrix::from_fn(2, 2, g, |i, j| match (i, j) {
            (0, 1) => Scalar::gaussian_int(0, -1),
            (1, 0) => Scalar::i(),
            _ => Scalar::one(g),
        });
        let spec = FieldSpec::gaussian(Involution::Conjugation);
        let d = pencil_regularize(&SelfadjointPencil { a: a.clone(), spec }).unwrap();
        assert_eq!(d.regular.rows(), 1);
        assert_eq!(d.kronecker_blocks, vec![KroneckerBlock { block: PencilBlock::JordanPair(1), multiplicity: 1 }]);
        let lambda = Scalar::i();
        let lhs = (&a + &a.conj_transpose(Involution::Conjugation).scale(&lambda)).congruence(&d.transform, Involution::Conjugation);
        assert_eq!(lhs, d.reduced_pencil().evaluate(&lambda));

        let n = Matrix::from_i64(f, &[&[1, 2], &[3, 4]]);
        let d = pencil_regularize(&SelfadjointPencil { a: n.clone(), spec: FieldSpec::rational() }).unwrap();
        assert_eq!(d.regular, n);
        assert!(d.kronecker_blocks.is_empty());
    }
}
