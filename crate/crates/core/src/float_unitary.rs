//! Regularization in floating point with unitary (complex) or orthogonal
//! (real) transformations only.
//!
//! Every rank decision is an SVD followed by a threshold on the singular
//! values. The m-sequence is discontinuous in `A`, so decisions with a
//! singular value within a factor of 10 of the threshold are reported in
//! [`ReducedForm::warnings`]; the decision itself still follows the
//! threshold.

use nalgebra::{ComplexField, DMatrix};
use num_complex::Complex64;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::format::FloatGrid;
use crate::matrix::Matrix;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum FloatMode {
    /// complex entries, `A* = conj(A)ᵀ`
    ComplexConjugation,
    /// complex entries, `A* = Aᵀ`
    ComplexIdentity,
    /// real entries, `A* = Aᵀ`
    RealIdentity,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub enum TolPolicy {
    Fixed(f64),
    /// `max(rows, cols) · ε · σ_max(A)` for the input `A`; the same
    /// threshold is used at every stage.
    RelativeMaxDim,
}

/// Mode plus threshold policy.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct FloatConfig {
    pub mode: FloatMode,
    pub tol_policy: TolPolicy,
}

impl FloatConfig {
    pub fn new(mode: FloatMode) -> FloatConfig {
        FloatConfig { mode, tol_policy: TolPolicy::RelativeMaxDim }
    }

    pub fn with_tol(mode: FloatMode, tol: f64) -> FloatConfig {
        FloatConfig { mode, tol_policy: TolPolicy::Fixed(tol) }
    }
}

/// Factor between the rank threshold and the pattern-zero threshold.
pub const PATTERN_TOL_FACTOR: f64 = 100.0;

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct RankWarning {
    /// 1-based stage index.
    pub stage: usize,
    /// `"nullity"` for the first rank decision of a stage, `"rank-n"` for the second.
    pub decision: &'static str,
    pub sigma: f64,
    pub tol: f64,
}

/// One stage in floating point.
#[derive(Clone, Debug)]
pub struct FloatStage<T: ComplexField> {
    pub m_odd: usize,
    pub m_even: usize,
    /// `(R ⊕ I)·S`.
    pub unitary: DMatrix<T>,
    /// `unitary · A · unitary*`.
    pub form: DMatrix<T>,
    pub warnings: Vec<RankWarning>,
}

#[derive(Clone, Debug)]
pub struct ReducedForm {
    pub mode: FloatMode,
    pub tol: f64,
    pub m: Vec<usize>,
    /// Accumulated unitary/orthogonal `T`.
    pub transform: DMatrix<Complex64>,
    /// `T·A·T*` in the staircase shape.
    pub reduced: DMatrix<Complex64>,
    /// The trailing nonsingular diagonal block.
    pub regular_block: DMatrix<Complex64>,
    /// Largest magnitude among entries the shape requires to be zero.
    pub pattern_residual: f64,
    /// `‖T*T − I‖_max`.
    pub unitarity_residual: f64,
    /// `‖T·A·T* − reduced‖_max`.
    pub reconstruction_residual: f64,
    pub warnings: Vec<RankWarning>,
}

fn star<T: ComplexField>(m: &DMatrix<T>, conjugate: bool) -> DMatrix<T> {
    if conjugate { m.adjoint() } else { m.transpose() }
}

fn uses_conjugation(mode: FloatMode) -> bool {
    mode == FloatMode::ComplexConjugation
}

fn reversal<T: ComplexField>(n: usize) -> DMatrix<T> {
    DMatrix::from_fn(n, n, |i, j| if i + j + 1 == n { T::one() } else { T::zero() })
}

/// Scalars whose singular value decompositions are computed by faer.
trait SvdScalar: ComplexField<RealField = f64> + Copy {
    /// Full left singular basis `U` (columns sorted by decreasing σ) and
    /// the sorted singular values.
    fn left_svd(m: &DMatrix<Self>) -> Result<(DMatrix<Self>, Vec<f64>)>;
}

macro_rules! svd_scalar {
    ($t:ty) => {
        impl SvdScalar for $t {
            fn left_svd(m: &DMatrix<Self>) -> Result<(DMatrix<Self>, Vec<f64>)> {
                let (r, c) = m.shape();
                if r == 0 || c == 0 {
                    return Ok((DMatrix::identity(r, r), Vec::new()));
                }
                let svd = faer::Mat::<$t>::from_fn(r, c, |i, j| m[(i, j)])
                    .svd()
                    .map_err(|e| Error::Svd(format!("{e:?} on a {r}x{c} block")))?;
                let u = svd.U();
                let s = svd.S().column_vector();
                let u = DMatrix::from_fn(r, r, |i, j| u[(i, j)]);
                Ok((u, (0..r.min(c)).map(|k| s[k].real()).collect()))
            }
        }
    };
}

svd_scalar!(f64);
svd_scalar!(Complex64);

fn left_svd<T: SvdScalar>(m: &DMatrix<T>) -> Result<(DMatrix<T>, Vec<f64>)> {
    T::left_svd(m)
}

fn count_above(sv: &[f64], tol: f64, stage: usize, decision: &'static str, warnings: &mut Vec<RankWarning>) -> usize {
    for &s in sv {
        if s > tol / 10.0 && s < tol * 10.0 {
            warnings.push(RankWarning { stage, decision, sigma: s, tol });
        }
    }
    sv.iter().filter(|&&s| s > tol).count()
}

fn stage_impl<T: SvdScalar>(
    a: &DMatrix<T>,
    conjugate: bool,
    tol: f64,
    index: usize,
) -> Result<FloatStage<T>> {
    let n = a.nrows();
    let mut warnings = Vec::new();
    // A = U Σ Vᴴ; S = Uᴴ leaves the zero singular values in the bottom rows of S·A
    let (u, sv) = left_svd(a)?;
    let rank = count_above(&sv, tol, index, "nullity", &mut warnings);
    let m_odd = n - rank;
    let s = u.adjoint();
    let first = &s * a * star(&s, conjugate);
    let block_n = first.view((0, rank), (rank, m_odd)).clone_owned();
    let (un, svn) = left_svd(&block_n)?;
    let m_even = count_above(&svn, tol, index, "rank-n", &mut warnings);
    // the reversal turns the top-heavy Σ·W into zeros-on-top
    let r = reversal::<T>(rank) * un.adjoint();
    let mut lift = DMatrix::<T>::identity(n, n);
    lift.view_mut((0, 0), (rank, rank)).copy_from(&r);
    let unitary = lift * s;
    let form = &unitary * a * star(&unitary, conjugate);
    Ok(FloatStage { m_odd, m_even, unitary, form, warnings })
}

fn check_finite(a: &DMatrix<Complex64>) -> Result<()> {
    for j in 0..a.ncols() {
        for i in 0..a.nrows() {
            let z = a[(i, j)];
            if !z.re.is_finite() || !z.im.is_finite() {
                return Err(Error::NonFinite { row: i, col: j });
            }
        }
    }
    Ok(())
}

fn resolve_tol<T: SvdScalar>(a: &DMatrix<T>, policy: TolPolicy) -> Result<f64> {
    match policy {
        TolPolicy::Fixed(t) if t > 0.0 && t.is_finite() => Ok(t),
        TolPolicy::Fixed(t) => Err(Error::InvalidField(format!("tolerance must be positive, got {t}"))),
        TolPolicy::RelativeMaxDim => {
            if a.is_empty() {
                return Ok(f64::EPSILON);
            }
            let (_, sv) = left_svd(a)?;
            // the zero matrix still gets a positive threshold
            Ok((a.nrows().max(a.ncols()) as f64 * f64::EPSILON * sv[0]).max(f64::MIN_POSITIVE))
        }
    }
}

/// One stage on a square matrix, which must be numerically singular.
pub fn float_stage(a: &DMatrix<Complex64>, config: FloatConfig) -> Result<FloatStage<Complex64>> {
    if !a.is_square() {
        return Err(Error::NotSquare { rows: a.nrows(), cols: a.ncols() });
    }
    check_finite(a)?;
    let conjugate = uses_conjugation(config.mode);
    let st = match config.mode {
        FloatMode::RealIdentity => {
            let real = to_real(a)?;
            let tol = resolve_tol(&real, config.tol_policy)?;
            let st = stage_impl(&real, false, tol, 1)?;
            FloatStage {
                m_odd: st.m_odd,
                m_even: st.m_even,
                unitary: to_complex(&st.unitary),
                form: to_complex(&st.form),
                warnings: st.warnings,
            }
        }
        _ => {
            let tol = resolve_tol(a, config.tol_policy)?;
            stage_impl(a, conjugate, tol, 1)?
        }
    };
    if st.m_odd == 0 {
        return Err(Error::NonsingularStage);
    }
    Ok(st)
}

struct Staircase<T: ComplexField> {
    m: Vec<usize>,
    transform: DMatrix<T>,
    reduced: DMatrix<T>,
    regular_size: usize,
    tol: f64,
    warnings: Vec<RankWarning>,
}

fn staircase<T: SvdScalar>(
    a: &DMatrix<T>,
    conjugate: bool,
    policy: TolPolicy,
) -> Result<Staircase<T>> {
    let n = a.nrows();
    let tol = resolve_tol(a, policy)?;
    let mut transform = DMatrix::<T>::identity(n, n);
    let mut reduced = a.clone();
    let mut m = Vec::new();
    let mut warnings = Vec::new();
    let mut size = n;
    while size > 0 {
        let block = reduced.view((0, 0), (size, size)).clone_owned();
        let st = stage_impl(&block, conjugate, tol, m.len() / 2 + 1)?;
        if st.m_odd == 0 {
            // a nonsingular block's decisions are not part of any stage
            break;
        }
        warnings.extend(st.warnings);
        let mut g = DMatrix::<T>::identity(n, n);
        g.view_mut((0, 0), (size, size)).copy_from(&st.unitary);
        reduced = &g * &reduced * star(&g, conjugate);
        transform = g * transform;
        m.push(st.m_odd);
        m.push(st.m_even);
        size -= st.m_odd + st.m_even;
    }
    Ok(Staircase { m, transform, reduced, regular_size: size, tol, warnings })
}

/// Positions the staircase shape requires to be zero, as
/// `(rows, cols)` ranges.
pub fn pattern_zero_blocks(n: usize, m: &[usize]) -> Vec<(std::ops::Range<usize>, std::ops::Range<usize>)> {
    let mut out = Vec::new();
    let mut prev = n;
    for pair in m.chunks(2) {
        let (m_odd, m_even) = (pair[0], pair[1]);
        let next = prev - m_odd - m_even;
        // zero rows of this stage, within its block
        out.push((next + m_even..prev, 0..prev));
        // zero block to the right of B
        out.push((0..next, next + m_even..prev));
        prev = next;
    }
    out
}

/// The blocks with linearly independent rows, `B_2, B_3, …, B_{2τ}`, as
/// `(rows, cols)` ranges.
pub fn superdiagonal_blocks(n: usize, m: &[usize]) -> Vec<(std::ops::Range<usize>, std::ops::Range<usize>)> {
    let mut sizes = vec![n];
    for pair in m.chunks(2) {
        let prev = *sizes.last().unwrap();
        sizes.push(prev - pair[0] - pair[1]);
    }
    let mut out = Vec::new();
    for (j, pair) in m.chunks(2).enumerate() {
        let (prev, next, m_even) = (sizes[j], sizes[j + 1], pair[1]);
        // E of stage j+1
        out.push((next..next + m_even, next + m_even..prev));
        // zero-row part of the next stage inside B of this stage
        if let Some(after) = m.chunks(2).nth(j + 1) {
            let following = sizes[j + 2];
            out.push((following + after[1]..next, next..next + m_even));
        }
    }
    out
}

fn max_abs_in<T: ComplexField<RealField = f64>>(
    m: &DMatrix<T>,
    blocks: &[(std::ops::Range<usize>, std::ops::Range<usize>)],
) -> f64 {
    let mut worst: f64 = 0.0;
    for (rows, cols) in blocks {
        for i in rows.clone() {
            for j in cols.clone() {
                worst = worst.max(m[(i, j)].clone().modulus());
            }
        }
    }
    worst
}

fn max_abs<T: ComplexField<RealField = f64>>(m: &DMatrix<T>) -> f64 {
    m.iter().map(|z| z.clone().modulus()).fold(0.0, f64::max)
}

fn to_real(a: &DMatrix<Complex64>) -> Result<DMatrix<f64>> {
    if let Some((k, _)) = a.iter().enumerate().find(|(_, z)| z.im != 0.0) {
        let (i, j) = (k % a.nrows(), k / a.nrows());
        return Err(Error::InvalidField(format!("real mode requires real entries; ({i}, {j}) is complex")));
    }
    Ok(a.map(|z| z.re))
}

fn to_complex(a: &DMatrix<f64>) -> DMatrix<Complex64> {
    a.map(|x| Complex64::new(x, 0.0))
}

fn finish<T: SvdScalar>(
    a: &DMatrix<T>,
    sc: Staircase<T>,
    conjugate: bool,
    mode: FloatMode,
    lift: impl Fn(&DMatrix<T>) -> DMatrix<Complex64>,
) -> ReducedForm {
    let n = a.nrows();
    let pattern_residual = max_abs_in(&sc.reduced, &pattern_zero_blocks(n, &sc.m));
    let gram = star(&sc.transform, true) * &sc.transform - DMatrix::<T>::identity(n, n);
    let direct = &sc.transform * a * star(&sc.transform, conjugate);
    let reconstruction_residual = max_abs(&(direct - &sc.reduced));
    let s = sc.regular_size;
    ReducedForm {
        mode,
        tol: sc.tol,
        m: sc.m,
        transform: lift(&sc.transform),
        regular_block: lift(&sc.reduced.view((0, 0), (s, s)).clone_owned()),
        reduced: lift(&sc.reduced),
        pattern_residual,
        unitarity_residual: max_abs(&gram),
        reconstruction_residual,
        warnings: sc.warnings,
    }
}

/// Runs stages on the shrinking leading block until it is numerically
/// nonsingular, accumulating one unitary (or orthogonal) transform.
pub fn float_regularize(a: &DMatrix<Complex64>, config: FloatConfig) -> Result<ReducedForm> {
    if !a.is_square() {
        return Err(Error::NotSquare { rows: a.nrows(), cols: a.ncols() });
    }
    check_finite(a)?;
    match config.mode {
        FloatMode::RealIdentity => {
            let real = to_real(a)?;
            let sc = staircase(&real, false, config.tol_policy)?;
            Ok(finish(&real, sc, false, config.mode, to_complex))
        }
        mode => {
            let conjugate = uses_conjugation(mode);
            let sc = staircase(a, conjugate, config.tol_policy)?;
            Ok(finish(a, sc, conjugate, mode, |m| m.clone()))
        }
    }
}

impl ReducedForm {
    pub fn tau(&self) -> usize {
        self.m.len() / 2
    }

    /// Threshold used when checking pattern zeros.
    pub fn pattern_tol(&self) -> f64 {
        PATTERN_TOL_FACTOR * self.tol
    }

    /// Numerical ranks of `B_2, …, B_{2τ}` paired with their row counts.
    pub fn superdiagonal_ranks(&self) -> Vec<(usize, usize)> {
        superdiagonal_blocks(self.reduced.nrows(), &self.m)
            .into_iter()
            .map(|(rows, cols)| {
                let block = self.reduced.view((rows.start, cols.start), (rows.len(), cols.len())).clone_owned();
                let rank = left_svd(&block)
                    .map(|(_, sv)| sv.iter().filter(|&&s| s > self.tol).count())
                    .unwrap_or(0);
                (rank, rows.len())
            })
            .collect()
    }
}

pub fn from_grid(g: &FloatGrid) -> DMatrix<Complex64> {
    DMatrix::from_row_slice(g.rows, g.cols, &g.entries)
}

/// Float image of an exact matrix over ℚ or ℚ(i).
pub fn from_exact(m: &Matrix) -> DMatrix<Complex64> {
    DMatrix::from_fn(m.rows(), m.cols(), |i, j| {
        let (re, im) = m.get(i, j).to_f64_pair();
        Complex64::new(re, im)
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn real(rows: &[&[f64]]) -> DMatrix<Complex64> {
        DMatrix::from_fn(rows.len(), rows[0].len(), |i, j| Complex64::new(rows[i][j], 0.0))
    }

    #[test]
    fn stage_on_diagonal() {
        let a = real(&[&[1.0, 0.0], &[0.0, 0.0]]);
        let st = float_stage(&a, FloatConfig::new(FloatMode::RealIdentity)).unwrap();
        assert_eq!((st.m_odd, st.m_even), (1, 0));
        assert!((st.form[(0, 0)].re.abs() - 1.0).abs() < 1e-14);
    }

    #[test]
    fn stage_on_j2() {
        let a = real(&[&[0.0, 1.0], &[0.0, 0.0]]);
        let st = float_stage(&a, FloatConfig::new(FloatMode::RealIdentity)).unwrap();
        assert_eq!((st.m_odd, st.m_even), (1, 1));
    }

    #[test]
    fn stage_on_hermitian_example() {
        let i = Complex64::i();
        let one = Complex64::new(1.0, 0.0);
        let a = DMatrix::from_row_slice(2, 2, &[one, -i, i, one]);
        let st = float_stage(&a, FloatConfig::new(FloatMode::ComplexConjugation)).unwrap();
        assert_eq!((st.m_odd, st.m_even), (1, 0));
        let st = float_stage(&a, FloatConfig::new(FloatMode::ComplexIdentity)).unwrap();
        assert_eq!((st.m_odd, st.m_even), (1, 1));
    }

    #[test]
    fn errors() {
        let mut a = real(&[&[1.0, 0.0], &[0.0, 0.0]]);
        a[(1, 0)] = Complex64::new(f64::NAN, 0.0);
        assert_eq!(float_stage(&a, FloatConfig::new(FloatMode::RealIdentity)).unwrap_err(), Error::NonFinite { row: 1, col: 0 });
        let c = DMatrix::from_element(1, 1, Complex64::new(0.0, 1.0));
        assert!(float_regularize(&c, FloatConfig::new(FloatMode::RealIdentity)).is_err());
        let id = real(&[&[1.0, 0.0], &[0.0, 1.0]]);
        assert_eq!(float_stage(&id, FloatConfig::new(FloatMode::RealIdentity)).unwrap_err(), Error::NonsingularStage);
        assert!(float_regularize(&id, FloatConfig::with_tol(FloatMode::RealIdentity, -1.0)).is_err());
    }

    #[test]
    fn j3_staircase() {
        let a = real(&[&[0.0, 1.0, 0.0], &[0.0, 0.0, 1.0], &[0.0, 0.0, 0.0]]);
        let r = float_regularize(&a, FloatConfig::new(FloatMode::RealIdentity)).unwrap();
        assert_eq!(r.m, vec![1, 1, 1, 0]);
        assert!(r.pattern_residual <= 1e-12);
        assert!(r.unitarity_residual <= 1e-12);
        assert_eq!(r.regular_block.nrows(), 0);
        for (rank, rows) in r.superdiagonal_ranks() {
            assert_eq!(rank, rows);
        }
    }

    #[test]
    fn nonsingular_input_has_no_stage() {
        let a = real(&[&[2.0, 1.0], &[1.0, 3.0]]);
        let r = float_regularize(&a, FloatConfig::new(FloatMode::RealIdentity)).unwrap();
        assert!(r.m.is_empty());
        assert_eq!(r.regular_block.nrows(), 2);
        assert!((&r.reduced - &a).iter().all(|z| z.norm() < 1e-14));
    }

    #[test]
    fn pattern_layout_for_two_stages() {
        // n = 5, m = (2, 1, 1, 0): stage sizes 5 -> 2 -> 1
        let z = pattern_zero_blocks(5, &[2, 1, 1, 0]);
        assert_eq!(z, vec![(3..5, 0..5), (0..2, 3..5), (1..2, 0..2), (0..1, 1..2)]);
        let b = superdiagonal_blocks(5, &[2, 1, 1, 0]);
        assert_eq!(b, vec![(2..3, 3..5), (1..2, 2..3), (1..1, 1..2)]);
    }
}
