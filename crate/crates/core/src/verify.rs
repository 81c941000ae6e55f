//! Independent oracles and seeded randomized harnesses.
//!
//! Nothing here calls the reduction code to decide what the right answer
//! is: the nilpotent oracle works from ranks of explicit matrix powers, and
//! the planted cases know their decomposition by construction.

use std::collections::BTreeMap;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::matrix::{direct_sum, jordan_block, Invariants, Matrix};
use crate::regularize::regularize;
use crate::scalar::{Field, FieldSpec, Involution, Scalar};
use crate::sparse_form::full_decomposition;

pub const DEFAULT_ENTRY_BOUND: i64 = 5;

/// Seed, size and field of a random matrix; the same spec always yields the
/// same matrix.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct RandomSpec {
    pub seed: u64,
    pub size: usize,
    pub field: FieldSpec,
    pub entry_bound: i64,
}

impl RandomSpec {
    pub fn new(seed: u64, size: usize, field: FieldSpec) -> RandomSpec {
        RandomSpec { seed, size, field, entry_bound: DEFAULT_ENTRY_BOUND }
    }
}

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Numerators in `[-bound, bound]`, denominators in `[1, bound]`.
pub fn random_scalar<R: Rng>(rng: &mut R, field: Field, bound: i64) -> Scalar {
    let bound = bound.max(1);
    let frac = |rng: &mut R| (rng.gen_range(-bound..=bound), rng.gen_range(1..=bound));
    match field {
        Field::Rational => {
            let (n, d) = frac(rng);
            Scalar::from_ratio(field, n, d)
        }
        Field::GaussianRational => {
            let (a, b) = frac(rng);
            let (c, d) = frac(rng);
            Scalar::from_ratio(field, a, b) + Scalar::from_ratio(field, c, d) * Scalar::i()
        }
        Field::PrimeField(p) => Scalar::from_i64(field, rng.gen_range(0..p as i64)),
    }
}

pub fn random_matrix<R: Rng>(rng: &mut R, rows: usize, cols: usize, field: Field, bound: i64) -> Matrix {
    Matrix::from_fn(rows, cols, field, |_, _| random_scalar(rng, field, bound))
}

/// Rejection-samples until the exact rank equals the size.
pub fn random_nonsingular_with<R: Rng>(rng: &mut R, size: usize, field: Field, bound: i64) -> Matrix {
    loop {
        let m = random_matrix(rng, size, size, field, bound);
        if m.is_nonsingular() {
            return m;
        }
    }
}

pub fn random_nonsingular(spec: &RandomSpec) -> Matrix {
    random_nonsingular_with(&mut rng(spec.seed), spec.size, spec.field.field, spec.entry_bound)
}

/// Non-increasing sequence of even length `2τ` with `1 ≤ τ ≤ max_tau`,
/// `m_1 ≤ max_m1` and `m_{2τ-1} ≥ 1`.
pub fn random_m_sequence<R: Rng>(rng: &mut R, max_tau: usize, max_m1: usize) -> Vec<usize> {
    let tau = rng.gen_range(1..=max_tau.max(1));
    let mut m = Vec::with_capacity(2 * tau);
    let mut prev = rng.gen_range(1..=max_m1.max(1));
    m.push(prev);
    for k in 2..=2 * tau {
        let lower = if k == 2 * tau { 0 } else { 1 };
        prev = rng.gen_range(lower..=prev);
        m.push(prev);
    }
    m
}

/// Random multiset of singular Jordan block sizes with total size
/// `1..=max_total`.
pub fn random_jordan_multiset<R: Rng>(rng: &mut R, max_total: usize) -> BTreeMap<usize, usize> {
    let total = rng.gen_range(1..=max_total.max(1));
    let mut left = total;
    let mut out = BTreeMap::new();
    while left > 0 {
        let k = rng.gen_range(1..=left.min(5));
        *out.entry(k).or_insert(0) += 1;
        left -= k;
    }
    out
}

/// `A = P*·(B ⊕ M₀)·P` with known `B` and `M₀`.
#[derive(Clone, Debug)]
pub struct PlantedCase {
    pub seed: u64,
    pub spec: FieldSpec,
    pub a: Matrix,
    pub regular: Matrix,
    pub blocks: BTreeMap<usize, usize>,
}

pub fn planted_case(
    seed: u64,
    spec: FieldSpec,
    max_regular: usize,
    max_singular: usize,
    bound: i64,
) -> PlantedCase {
    let field = spec.field;
    let mut r = rng(seed);
    let reg_size = r.gen_range(0..=max_regular);
    let regular = random_nonsingular_with(&mut r, reg_size, field, bound);
    let blocks = random_jordan_multiset(&mut r, max_singular);
    let mut parts = vec![regular.clone()];
    for (&k, &c) in &blocks {
        parts.extend(std::iter::repeat_n(jordan_block(k, field), c));
    }
    let core = direct_sum(field, &parts);
    let p = random_nonsingular_with(&mut r, core.rows(), field, bound);
    let a = core.congruence(&p.conj_transpose(spec.involution), spec.involution);
    PlantedCase { seed, spec, a, regular, blocks }
}

/// Jordan structure of a nilpotent matrix from the second differences of
/// `rank(M^k)`.
pub fn nilpotent_jordan_oracle(m: &Matrix) -> Result<BTreeMap<usize, usize>> {
    let n = m.require_square()?;
    let mut ranks = vec![n];
    let mut power = Matrix::identity(n, m.field());
    for _ in 0..n {
        power = &power * m;
        ranks.push(power.rank());
    }
    if *ranks.last().unwrap() != 0 {
        return Err(Error::NotNilpotent);
    }
    ranks.push(0);
    let mut out = BTreeMap::new();
    for k in 1..=n {
        let count = ranks[k - 1] + ranks[k + 1] - 2 * ranks[k];
        if count > 0 {
            out.insert(k, count);
        }
    }
    Ok(out)
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct TransformReport {
    pub ok: bool,
    pub reason: Option<String>,
}

impl TransformReport {
    fn pass() -> TransformReport {
        TransformReport { ok: true, reason: None }
    }

    fn fail(reason: String) -> TransformReport {
        TransformReport { ok: false, reason: Some(reason) }
    }
}

/// Exact check of `X` nonsingular and `X·A·X* = target`.
pub fn check_transform(a: &Matrix, x: &Matrix, target: &Matrix, involution: Involution) -> Result<TransformReport> {
    let n = a.require_square()?;
    if x.rows() != n || x.cols() != n || target.rows() != n || target.cols() != n {
        return Err(Error::DimensionMismatch(format!(
            "A is {n}x{n}, X is {}x{}, target is {}x{}",
            x.rows(),
            x.cols(),
            target.rows(),
            target.cols()
        )));
    }
    if !x.is_nonsingular() {
        return Ok(TransformReport::fail("transform singular".to_string()));
    }
    let got = a.congruence(x, involution);
    for i in 0..n {
        for j in 0..n {
            if got.get(i, j) != target.get(i, j) {
                return Ok(TransformReport::fail(format!(
                    "mismatch at ({i}, {j}): expected {}, found {}",
                    target.get(i, j),
                    got.get(i, j)
                )));
            }
        }
    }
    Ok(TransformReport::pass())
}

#[derive(Clone, Debug, Serialize)]
pub struct TrialFailure {
    pub seed: u64,
    pub reason: String,
}

/// Outcome of a seeded suite; failures list the seeds that reproduce them.
#[derive(Clone, Debug, Serialize)]
pub struct SuiteReport {
    pub name: String,
    pub trials: usize,
    pub failures: Vec<TrialFailure>,
}

impl SuiteReport {
    pub fn passed(&self) -> bool {
        self.failures.is_empty()
    }

    pub fn summary(&self) -> String {
        format!(
            "{} {}: {}/{} trials passed",
            if self.passed() { "PASS" } else { "FAIL" },
            self.name,
            self.trials - self.failures.len(),
            self.trials
        )
    }
}

fn collect(name: &str, trials: usize, outcomes: Vec<(u64, Option<String>)>) -> SuiteReport {
    SuiteReport {
        name: name.to_string(),
        trials,
        failures: outcomes
            .into_iter()
            .filter_map(|(seed, r)| r.map(|reason| TrialFailure { seed, reason }))
            .collect(),
    }
}

/// For random nonsingular `P`, `P*·A·P` must share ν, ζ, κ, ρ, τ, the
/// m-sequence and the regular-part size with `A`.
pub fn invariance_suite(a: &Matrix, involution: Involution, trials: usize, seed: u64) -> Result<SuiteReport> {
    let n = a.require_square()?;
    let base_inv = a.invariants(involution)?;
    let base = regularize(a, involution)?;
    let outcomes = (0..trials as u64)
        .into_par_iter()
        .map(|t| {
            let trial_seed = seed.wrapping_add(t);
            let p = random_nonsingular_with(&mut rng(trial_seed), n, a.field(), DEFAULT_ENTRY_BOUND);
            let moved = a.congruence(&p.conj_transpose(involution), involution);
            let outcome = (|| -> Result<Option<String>> {
                let inv: Invariants = moved.invariants(involution)?;
                if inv != base_inv {
                    return Ok(Some(format!("invariants {inv:?} != {base_inv:?}")));
                }
                let r = regularize(&moved, involution)?;
                if r.tau != base.tau || r.m != base.m || r.regular_part.rows() != base.regular_part.rows() {
                    return Ok(Some(format!(
                        "tau/m/regular size ({}, {:?}, {}) != ({}, {:?}, {})",
                        r.tau,
                        r.m,
                        r.regular_part.rows(),
                        base.tau,
                        base.m,
                        base.regular_part.rows()
                    )));
                }
                Ok(None)
            })();
            (trial_seed, outcome.unwrap_or_else(|e| Some(e.to_string())))
        })
        .collect();
    Ok(collect("invariance", trials, outcomes))
}

/// One planted round trip: the decomposition must recover the planted
/// multiset and regular size, its transform must check exactly, and the
/// rank-power oracle on the computed singular part must agree.
pub fn round_trip_trial(case: &PlantedCase) -> Result<Option<String>> {
    let inv = case.spec.involution;
    let d = full_decomposition(&case.a, inv)?;
    if d.block_sum.jordan_multiplicities != case.blocks {
        return Ok(Some(format!(
            "multiset {:?} != planted {:?}",
            d.block_sum.jordan_multiplicities, case.blocks
        )));
    }
    let s = d.block_sum.regular_part.rows();
    if s != case.regular.rows() {
        return Ok(Some(format!("regular size {s} != planted {}", case.regular.rows())));
    }
    let report = check_transform(&case.a, &d.transform, &d.target(), inv)?;
    if let Some(reason) = report.reason {
        return Ok(Some(reason));
    }
    // the exact check above makes the target equal to X·A·X*
    let reduced = d.target();
    let n = reduced.rows();
    let oracle = nilpotent_jordan_oracle(&reduced.submatrix(s..n, s..n))?;
    if oracle != case.blocks {
        return Ok(Some(format!("oracle {oracle:?} != planted {:?}", case.blocks)));
    }
    Ok(None)
}

/// Seeded planted round trips; trial `t` uses seed `seed + t`.
pub fn round_trip_suite(
    spec: FieldSpec,
    trials: usize,
    seed: u64,
    max_regular: usize,
    max_singular: usize,
) -> SuiteReport {
    let outcomes = (0..trials as u64)
        .into_par_iter()
        .map(|t| {
            let s = seed.wrapping_add(t);
            let case = planted_case(s, spec, max_regular, max_singular, DEFAULT_ENTRY_BOUND);
            (s, round_trip_trial(&case).unwrap_or_else(|e| Some(e.to_string())))
        })
        .collect();
    collect(&format!("round-trip {}/{:?}", spec.field, spec.involution), trials, outcomes)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn oracle_examples() {
        let f = Field::Rational;
        assert_eq!(nilpotent_jordan_oracle(&jordan_block(3, f)).unwrap(), [(3, 1)].into());
        let m = direct_sum(f, &[jordan_block(1, f), jordan_block(2, f)]);
        assert_eq!(nilpotent_jordan_oracle(&m).unwrap(), [(1, 1), (2, 1)].into());
        let n = crate::sparse_form::canonical_n(&[1, 1, 1, 0], f).unwrap();
        assert_eq!(nilpotent_jordan_oracle(&n).unwrap(), [(3, 1)].into());
        assert_eq!(nilpotent_jordan_oracle(&Matrix::identity(2, f)).unwrap_err(), Error::NotNilpotent);
    }

    #[test]
    fn random_nonsingular_is_deterministic() {
        let spec = RandomSpec::new(1, 2, FieldSpec::rational());
        let a = random_nonsingular(&spec);
        assert_eq!(a, random_nonsingular(&spec));
        assert!(a.is_nonsingular());
        let empty = random_nonsingular(&RandomSpec::new(9, 0, FieldSpec::rational()));
        assert_eq!((empty.rows(), empty.cols()), (0, 0));
        let gf7 = FieldSpec::new(Field::PrimeField(7), Involution::Identity).unwrap();
        assert_eq!(random_nonsingular(&RandomSpec::new(3, 3, gf7)).rank(), 3);
    }

    #[test]
    fn check_transform_reports() {
        let f = Field::Rational;
        let j2 = jordan_block(2, f);
        let id = Matrix::identity(2, f);
        assert!(check_transform(&j2, &id, &j2, Involution::Identity).unwrap().ok);
        let singular = Matrix::zeros(2, 2, f);
        let r = check_transform(&j2, &singular, &j2, Involution::Identity).unwrap();
        assert_eq!(r.reason.as_deref(), Some("transform singular"));
        let r = check_transform(&j2, &id, &id, Involution::Identity).unwrap();
        assert!(!r.ok && r.reason.unwrap().starts_with("mismatch at (0, 0)"));
        assert!(check_transform(&j2, &Matrix::identity(3, f), &j2, Involution::Identity).is_err());
    }

    #[test]
    fn invariance_examples() {
        let f = Field::Rational;
        let r = invariance_suite(&jordan_block(2, f), Involution::Identity, 50, 7).unwrap();
        assert!(r.passed(), "{:?}", r.failures);
        let z = Matrix::zeros(3, 3, f);
        assert_eq!(z.invariants(Involution::Identity).unwrap(), Invariants { nu: 3, zeta: 3, kappa: 0, rho: 0 });
        assert!(invariance_suite(&z, Involution::Identity, 10, 1).unwrap().passed());
        assert!(invariance_suite(&Matrix::identity(4, f), Involution::Identity, 10, 1).unwrap().passed());
    }

    #[test]
    fn m_sequences_are_valid() {
        let mut r = rng(11);
        for _ in 0..200 {
            let m = random_m_sequence(&mut r, 4, 5);
            crate::sparse_form::validate_m_sequence(&m).unwrap();
            assert!(m[0] <= 5 && m.len() <= 8);
        }
    }
}
