//! The regularization algorithm.
//!
//! Each stage takes a singular square `A` and produces a nonsingular `T`
//! with
//!
//! ```text
//!             [ A_next  B  0 ]
//! T·A·T*  =   [ C       D  E ]  } m_even
//!             [ 0       0  0 ]  } m_odd
//! ```
//!
//! where the rows of `E` and of `[A_next B]` are linearly independent.
//! Stages repeat on `A_next` until it is nonsingular. All transforms in this
//! crate are reported in the row convention `X·A·X*`; the column-convention
//! statement `S*·A·S` is recovered with `S = X*`.

use std::collections::BTreeMap;

use crate::error::{Error, Result};
use crate::matrix::{direct_sum, jordan_block, Matrix, ZeroRows};
use crate::scalar::Involution;

/// One stage of the algorithm on a shrinking block.
#[derive(Clone, Debug)]
pub struct StageRecord {
    /// Nullity of the stage input.
    pub m_odd: usize,
    /// Rank of the block `N` after the first congruence.
    pub m_even: usize,
    /// `(R ⊕ I)·S`, so that `transform · input · transform* = form`.
    pub transform: Matrix,
    /// The stage input in block form.
    pub form: Matrix,
}

impl StageRecord {
    pub fn size(&self) -> usize {
        self.form.rows()
    }

    /// Size of `A_next`.
    pub fn next_size(&self) -> usize {
        self.size() - self.m_odd - self.m_even
    }

    pub fn a_next(&self) -> Matrix {
        let r = self.next_size();
        self.form.submatrix(0..r, 0..r)
    }

    pub fn b(&self) -> Matrix {
        let r = self.next_size();
        self.form.submatrix(0..r, r..r + self.m_even)
    }

    pub fn c(&self) -> Matrix {
        let r = self.next_size();
        self.form.submatrix(r..r + self.m_even, 0..r)
    }

    pub fn d(&self) -> Matrix {
        let r = self.next_size();
        self.form.submatrix(r..r + self.m_even, r..r + self.m_even)
    }

    /// The `m_even × m_odd` block with linearly independent rows.
    pub fn e(&self) -> Matrix {
        let r = self.next_size() + self.m_even;
        self.form.submatrix(r - self.m_even..r, r..self.size())
    }
}

#[derive(Clone, Debug)]
pub struct RegularizationResult {
    pub tau: usize,
    /// `m_1 ≥ m_2 ≥ … ≥ m_{2τ}`.
    pub m: Vec<usize>,
    /// `A_(τ)`, nonsingular, possibly 0×0.
    pub regular_part: Matrix,
    pub stages: Vec<StageRecord>,
}

/// A regular part together with the multiplicities of the singular Jordan
/// blocks `J_k`. Only positive multiplicities are stored.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BlockSum {
    pub regular_part: Matrix,
    pub jordan_multiplicities: BTreeMap<usize, usize>,
}

impl BlockSum {
    pub fn singular_size(&self) -> usize {
        self.jordan_multiplicities.iter().map(|(k, c)| k * c).sum()
    }

    pub fn size(&self) -> usize {
        self.regular_part.rows() + self.singular_size()
    }

    /// Block sizes in layout order: increasing, repeated by multiplicity.
    pub fn block_sizes(&self) -> Vec<usize> {
        self.jordan_multiplicities
            .iter()
            .flat_map(|(&k, &c)| std::iter::repeat_n(k, c))
            .collect()
    }
}

/// `multiplicity(J_k) = m_k − m_{k+1}`, with `m_{2τ+1} = 0`.
pub fn jordan_multiplicities(m: &[usize]) -> BTreeMap<usize, usize> {
    let mut out = BTreeMap::new();
    for k in 0..m.len() {
        let next = m.get(k + 1).copied().unwrap_or(0);
        let count = m[k].saturating_sub(next);
        if count > 0 {
            out.insert(k + 1, count);
        }
    }
    out
}

/// One regularization stage on a singular square matrix.
pub fn stage(a: &Matrix, involution: Involution) -> Result<StageRecord> {
    let n = a.require_square()?;
    let field = a.field();
    let (s, rank) = a.row_echelon_transform(ZeroRows::Bottom);
    if rank == n {
        return Err(Error::NonsingularStage);
    }
    let m_odd = n - rank;
    let first = a.congruence(&s, involution);
    let block_n = first.submatrix(0..rank, rank..n);
    let (r, m_even) = block_n.row_echelon_transform(ZeroRows::Top);
    let transform = &direct_sum(field, &[r, Matrix::identity(m_odd, field)]) * &s;
    let form = a.congruence(&transform, involution);
    Ok(StageRecord { m_odd, m_even, transform, form })
}

/// Runs stages until the working block is nonsingular.
pub fn regularize(a: &Matrix, involution: Involution) -> Result<RegularizationResult> {
    a.require_square()?;
    let mut current = a.clone();
    let mut stages = Vec::new();
    let mut m = Vec::new();
    while !current.is_nonsingular() {
        let rec = stage(&current, involution)?;
        m.push(rec.m_odd);
        m.push(rec.m_even);
        current = rec.a_next();
        stages.push(rec);
    }
    Ok(RegularizationResult { tau: stages.len(), m, regular_part: current, stages })
}

impl RegularizationResult {
    pub fn multiplicities(&self) -> BlockSum {
        BlockSum {
            regular_part: self.regular_part.clone(),
            jordan_multiplicities: jordan_multiplicities(&self.m),
        }
    }
}

/// `regular ⊕ J_1^{[·]} ⊕ J_2^{[·]} ⊕ …` with blocks in increasing size.
pub fn assemble(block_sum: &BlockSum) -> Matrix {
    let field = block_sum.regular_part.field();
    let mut blocks = vec![block_sum.regular_part.clone()];
    blocks.extend(block_sum.block_sizes().into_iter().map(|k| jordan_block(k, field)));
    direct_sum(field, &blocks)
}
