use congru::float_unitary::{float_regularize, from_exact, FloatConfig, FloatMode};
use congru::format::{parse_matrix, parse_matrix_json, render_matrix, MatrixJson};
use congru::sparse_form::{canonical_n, validate_m_sequence};
use congru::verify::{check_transform, planted_case, random_matrix, random_nonsingular_with, rng};
use congru::{canonical_sparse_form, full_decomposition, regularize, Field, FieldSpec, Involution, Matrix};
use proptest::prelude::*;

fn spec_strategy() -> impl Strategy<Value = FieldSpec> {
    prop_oneof![
        Just(FieldSpec::rational()),
        Just(FieldSpec::gaussian(Involution::Conjugation)),
        Just(FieldSpec::gaussian(Involution::Identity)),
        Just(FieldSpec::new(Field::prime(7).unwrap(), Involution::Identity).unwrap()),
    ]
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(40))]

    #[test]
    fn m_sequence_is_a_congruence_invariant(seed in 0u64..10_000, spec in spec_strategy()) {
        let case = planted_case(seed, spec, 3, 6, 3);
        let inv = spec.involution;
        let base = regularize(&case.a, inv).unwrap();
        let mut r = rng(seed ^ 0x5eed);
        let x = random_nonsingular_with(&mut r, case.a.rows(), spec.field, 3);
        let moved = regularize(&case.a.congruence(&x, inv), inv).unwrap();
        prop_assert_eq!(&base.m, &moved.m);
        prop_assert_eq!(base.regular_part.rows(), moved.regular_part.rows());
        prop_assert_eq!(case.a.invariants(inv).unwrap(), case.a.congruence(&x, inv).invariants(inv).unwrap());
    }

    #[test]
    fn decomposition_transform_is_exact(seed in 0u64..10_000, spec in spec_strategy()) {
        let case = planted_case(seed, spec, 3, 6, 3);
        let d = full_decomposition(&case.a, spec.involution).unwrap();
        let report = check_transform(&case.a, &d.transform, &d.target(), spec.involution).unwrap();
        prop_assert!(report.ok, "{:?}", report.reason);
        prop_assert_eq!(&d.block_sum.jordan_multiplicities, &case.blocks);
        prop_assert_eq!(d.block_sum.regular_part.rows(), case.regular.rows());
    }

    #[test]
    fn sparse_form_agrees_with_regularize(seed in 0u64..10_000, spec in spec_strategy()) {
        let case = planted_case(seed, spec, 3, 6, 3);
        let inv = spec.involution;
        let sf = canonical_sparse_form(&case.a, inv).unwrap();
        let r = regularize(&case.a, inv).unwrap();
        prop_assert_eq!(&sf.m, &r.m);
        prop_assert_eq!(sf.tau(), r.tau);
        prop_assert_eq!(&sf.n, &canonical_n(&sf.m, spec.field).unwrap());
        prop_assert_eq!(case.a.congruence(&sf.global_transform, inv), sf.combined());
    }

    #[test]
    fn nonsingular_matrices_are_fixed_points(seed in 0u64..10_000, size in 0usize..5, spec in spec_strategy()) {
        let a = random_nonsingular_with(&mut rng(seed), size, spec.field, 4);
        let r = regularize(&a, spec.involution).unwrap();
        prop_assert_eq!(r.tau, 0);
        prop_assert!(r.m.is_empty());
        prop_assert_eq!(&r.regular_part, &a);
    }

    #[test]
    fn m_sequences_are_valid(seed in 0u64..10_000, size in 1usize..7, spec in spec_strategy()) {
        let a = random_matrix(&mut rng(seed), size, size, spec.field, 2);
        let r = regularize(&a, spec.involution).unwrap();
        prop_assert!(validate_m_sequence(&r.m).is_ok());
        let singular: usize = r.m.iter().sum();
        prop_assert_eq!(singular + r.regular_part.rows(), size);
    }

    #[test]
    fn text_and_json_round_trip(seed in 0u64..10_000, rows in 0usize..5, cols in 0usize..5, spec in spec_strategy()) {
        let a = random_matrix(&mut rng(seed), rows, cols, spec.field, 50);
        prop_assert_eq!(&parse_matrix(&render_matrix(&a), spec.field).unwrap(), &a);
        let json = serde_json::to_string(&MatrixJson::from_matrix(&a)).unwrap();
        prop_assert_eq!(&parse_matrix_json(&json, spec.field).unwrap(), &a);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(60))]

    #[test]
    fn float_transform_is_unitary(seed in 0u64..10_000, size in 1usize..7) {
        let a = random_matrix(&mut rng(seed), size, size, Field::GaussianRational, 3);
        let f = float_regularize(&from_exact(&a), FloatConfig::new(FloatMode::ComplexConjugation)).unwrap();
        prop_assert!(f.unitarity_residual <= 1e-12);
        prop_assert!(f.reconstruction_residual <= 1e-10 * (1.0 + a.max_abs_f64()));
        let singular: usize = f.m.iter().sum();
        prop_assert_eq!(singular + f.regular_block.nrows(), size);
    }
}

#[test]
fn zero_matrix_is_all_singular() {
    for n in 1..5 {
        let z = Matrix::zeros(n, n, Field::Rational);
        let r = regularize(&z, Involution::Identity).unwrap();
        assert_eq!(r.m, vec![n, 0]);
        assert_eq!(r.regular_part.rows(), 0);
    }
}
