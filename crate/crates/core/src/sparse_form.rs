//! Reduction to the canonical sparse form `A_(τ) ⊕ N` and to the Jordan
//! direct sum `A_(τ) ⊕ M`, with the global transform kept explicit.
//!
//! `N` is block upper triangular with block sizes `m_{2τ}, …, m_2, m_1`
//! (top to bottom) and its only nonzero blocks are `[I_{m_k} 0]` on the
//! first block superdiagonal.

use crate::error::{Error, Result};
use crate::matrix::{direct_sum, identity_prefix, Matrix, Permutation};
use crate::regularize::{jordan_multiplicities, stage, BlockSum, StageRecord};
use crate::scalar::{Field, Involution};

#[derive(Clone, Debug)]
pub struct SparseForm {
    pub regular_part: Matrix,
    pub m: Vec<usize>,
    pub n: Matrix,
    /// `X` with `X·A·X* = regular_part ⊕ n`.
    pub global_transform: Matrix,
}

impl SparseForm {
    pub fn tau(&self) -> usize {
        self.m.len() / 2
    }

    /// `regular_part ⊕ n`.
    pub fn combined(&self) -> Matrix {
        self.regular_part.direct_sum(&self.n)
    }
}

/// `regular_part ⊕ M` together with `X` such that `X·A·X*` equals it.
#[derive(Clone, Debug)]
pub struct Decomposition {
    pub block_sum: BlockSum,
    pub transform: Matrix,
    pub m: Vec<usize>,
}

impl Decomposition {
    pub fn target(&self) -> Matrix {
        crate::regularize::assemble(&self.block_sum)
    }
}

/// `I ⊕ op ⊕ I` inside an `n × n` identity, with `op` starting at `at`.
fn embed(op: &Matrix, at: usize, n: usize) -> Matrix {
    let mut m = Matrix::identity(n, op.field());
    m.set_block(at, at, op);
    m
}

/// Replaces `w` by `p·w·p*` and `x` by `p·x`.
fn apply(w: &mut Matrix, x: &mut Matrix, p: &Matrix, involution: Involution) {
    *w = w.congruence(p, involution);
    *x = p * &*x;
}

/// Nonsingular `V` with `E·V = [I 0]`, for `E` with linearly independent rows.
pub fn right_normalizer(e: &Matrix) -> Result<Matrix> {
    let rref = e.transpose().rref_transform();
    if rref.pivots.len() != e.rows() {
        return Err(Error::DimensionMismatch(format!(
            "block of rank {} does not have {} independent rows",
            rref.pivots.len(),
            e.rows()
        )));
    }
    Ok(rref.transform.transpose())
}

/// Solves `M·Y = rhs` for `M` of full row rank, free variables set to zero.
pub fn solve_full_row_rank(m: &Matrix, rhs: &Matrix) -> Result<Matrix> {
    let rref = m.rref_transform();
    if rref.pivots.len() != m.rows() {
        return Err(Error::DimensionMismatch("coefficient block lacks full row rank".to_string()));
    }
    let reduced_rhs = &rref.transform * rhs;
    let mut y = Matrix::zeros(m.cols(), rhs.cols(), m.field());
    for (row, &pc) in rref.pivots.iter().enumerate() {
        for j in 0..rhs.cols() {
            y.set(pc, j, reduced_rhs.get(row, j).clone());
        }
    }
    Ok(y)
}

/// Takes a stage form with `m_even > 0` to the shape
///
/// ```text
/// [ A_next  B       0      ]
/// [ 0       0       [I 0]  ]
/// [ 0       0       0      ]
/// ```
///
/// Returns the new form and the transform `P` with `P·form·P* = result`.
pub fn reduce_cde(
    form: &Matrix,
    m_odd: usize,
    m_even: usize,
    involution: Involution,
) -> Result<(Matrix, Matrix)> {
    let n = form.require_square()?;
    if m_even == 0 {
        return Err(Error::NothingToReduce);
    }
    if m_even > m_odd || m_odd + m_even > n {
        return Err(Error::DimensionMismatch(format!(
            "block sizes m_odd={m_odd}, m_even={m_even} do not fit a {n}x{n} form"
        )));
    }
    let field = form.field();
    let top = n - m_odd;
    let r = top - m_even;
    let e = form.submatrix(r..top, top..n);
    // column normalization S = I ⊕ V; the bottom rows are zero so S*·A·S = A·S
    let v = right_normalizer(&e)?;
    let p1 = embed(&v, top, n).conj_transpose(involution);
    let mut w = form.clone();
    let mut x = Matrix::identity(n, field);
    apply(&mut w, &mut x, &p1, involution);

    // clear [C D] with the columns holding [I 0]
    let cd = w.submatrix(r..top, 0..top);
    if !cd.is_zero() {
        let mut q = Matrix::identity(n, field);
        q.set_block(top, 0, &cd.scale(&crate::scalar::Scalar::from_i64(field, -1)));
        apply(&mut w, &mut x, &q.conj_transpose(involution), involution);
    }
    Ok((w, x))
}

/// [`reduce_cde`] on a recorded stage, composing with the stage transform.
pub fn reduce_stage(st: &StageRecord, involution: Involution) -> Result<(Matrix, Matrix)> {
    let (w, p) = reduce_cde(&st.form, st.m_odd, st.m_even, involution)?;
    Ok((w, &p * &st.transform))
}

/// Checks that `m` is a non-increasing sequence of even length whose
/// second-to-last entry is positive.
pub fn validate_m_sequence(m: &[usize]) -> Result<()> {
    if m.len() % 2 != 0 {
        return Err(Error::InvalidMSequence(format!("odd length {}", m.len())));
    }
    if m.windows(2).any(|w| w[0] < w[1]) {
        return Err(Error::InvalidMSequence(format!("{m:?} is not non-increasing")));
    }
    if m.len() >= 2 && m[m.len() - 2] == 0 {
        return Err(Error::InvalidMSequence(format!("{m:?} has an empty final odd stage")));
    }
    Ok(())
}

/// Block sizes of `N`, top to bottom: `m_{2τ}, …, m_1`.
fn n_block_sizes(m: &[usize]) -> Vec<usize> {
    m.iter().rev().copied().collect()
}

/// The canonical sparse matrix `N` determined by an m-sequence.
pub fn canonical_n(m: &[usize], field: Field) -> Result<Matrix> {
    validate_m_sequence(m)?;
    let sizes = n_block_sizes(m);
    let total: usize = sizes.iter().sum();
    let mut n = Matrix::zeros(total, total, field);
    let mut offset = 0;
    for b in 0..sizes.len().saturating_sub(1) {
        let (rows, cols) = (sizes[b], sizes[b + 1]);
        n.set_block(offset, offset + rows, &identity_prefix(rows, cols, field));
        offset += rows;
    }
    Ok(n)
}

struct Level {
    size: usize,
    m_odd: usize,
    m_even: usize,
    form: Matrix,
    transform: Matrix,
}

/// Reduces `A` to `A_(τ) ⊕ N` by explicit *congruences.
///
/// The stages are run first, each followed by [`reduce_cde`]; the levels
/// are then processed from the innermost outwards. At each level the
/// already-reduced inner block is embedded, the `B` block is cleared against
/// every inner block row except the last (whose rows stay independent), the
/// disturbed row block is repaired with the columns holding `[I 0]`, and the
/// two affected superdiagonal blocks are normalized back to `[I 0]`.
pub fn canonical_sparse_form(a: &Matrix, involution: Involution) -> Result<SparseForm> {
    a.require_square()?;
    let field = a.field();
    let minus_one = crate::scalar::Scalar::from_i64(field, -1);

    let mut levels = Vec::new();
    let mut current = a.clone();
    while !current.is_nonsingular() {
        let st = stage(&current, involution)?;
        let (form, transform) = if st.m_even > 0 {
            reduce_stage(&st, involution)?
        } else {
            (st.form.clone(), st.transform.clone())
        };
        let r1 = st.next_size();
        current = form.submatrix(0..r1, 0..r1);
        levels.push(Level { size: st.size(), m_odd: st.m_odd, m_even: st.m_even, form, transform });
    }
    let regular_part = current;

    let mut x = Matrix::identity(regular_part.rows(), field);
    let mut inner_blocks: Vec<usize> = Vec::new();
    for level in levels.iter().rev() {
        let n = level.size;
        let r1 = n - level.m_odd - level.m_even;
        let (c0, c1) = (r1, r1 + level.m_even);
        let mut w = level.form.clone();
        let mut xl = level.transform.clone();
        apply(&mut w, &mut xl, &direct_sum(field, &[x, Matrix::identity(n - r1, field)]), involution);

        let last = inner_blocks.last().copied().unwrap_or(0);
        let keep = r1 - last;
        if level.m_even > 0 && keep > 0 {
            let coeff = w.submatrix(0..keep, 0..r1);
            let rhs = w.submatrix(0..keep, c0..c1).scale(&minus_one);
            let y = solve_full_row_rank(&coeff, &rhs)?;
            let mut q = Matrix::identity(n, field);
            q.set_block(0, c0, &y);
            apply(&mut w, &mut xl, &q.conj_transpose(involution), involution);

            let garbage = w.submatrix(c0..c1, 0..c1);
            if !garbage.is_zero() {
                let mut q = Matrix::identity(n, field);
                q.set_block(c1, 0, &garbage.scale(&minus_one));
                apply(&mut w, &mut xl, &q.conj_transpose(involution), involution);
            }
        }
        if level.m_even > 0 && last > 0 {
            let b3 = w.submatrix(keep..r1, c0..c1);
            let v = right_normalizer(&b3)?;
            apply(&mut w, &mut xl, &embed(&v, c0, n).conj_transpose(involution), involution);
            let e = w.submatrix(c0..c1, c1..n);
            let v = right_normalizer(&e)?;
            apply(&mut w, &mut xl, &embed(&v, c1, n).conj_transpose(involution), involution);
        }
        inner_blocks.push(level.m_even);
        inner_blocks.push(level.m_odd);
        x = xl;
    }

    let m: Vec<usize> = levels.iter().flat_map(|l| [l.m_odd, l.m_even]).collect();
    let n = canonical_n(&m, field)?;
    Ok(SparseForm { regular_part, m, n, global_transform: x })
}

/// Permutation `P` with `P·N·Pᵀ = ⊕ J_k^{[m_k − m_{k+1}]}`, blocks in
/// increasing size, chains of equal length ordered by their first row in `N`.
pub fn jordan_permutation(m: &[usize]) -> Result<Permutation> {
    validate_m_sequence(m)?;
    let len = m.len();
    let sizes = n_block_sizes(m);
    let mut offsets = Vec::with_capacity(len);
    let mut acc = 0;
    for s in &sizes {
        offsets.push(acc);
        acc += s;
    }
    // node (k, i): row i of the block of size m_k, k = 1..=len
    let node = |k: usize, i: usize| offsets[len - k] + i;

    let mut chains: Vec<(usize, usize, usize)> = Vec::new(); // (length, start row, i)
    for k in 1..=len {
        let next = m.get(k).copied().unwrap_or(0);
        for i in next..m[k - 1] {
            chains.push((k, node(k, i), i));
        }
    }
    chains.sort_unstable();

    let mut map = vec![0; acc];
    let mut pos = 0;
    for (k, _, i) in chains {
        for t in 0..k {
            map[node(k - t, i)] = pos + t;
        }
        pos += k;
    }
    Permutation::from_map(map)
}

/// `X` with `X·A·X* = A_(τ) ⊕ M`, `M` the Jordan blocks in increasing size.
pub fn full_decomposition(a: &Matrix, involution: Involution) -> Result<Decomposition> {
    let sf = canonical_sparse_form(a, involution)?;
    let field = a.field();
    let p = jordan_permutation(&sf.m)?.to_matrix(field);
    let lift = direct_sum(field, &[Matrix::identity(sf.regular_part.rows(), field), p]);
    let transform = &lift * &sf.global_transform;
    Ok(Decomposition {
        block_sum: BlockSum {
            regular_part: sf.regular_part,
            jordan_multiplicities: jordan_multiplicities(&sf.m),
        },
        transform,
        m: sf.m,
    })
}
