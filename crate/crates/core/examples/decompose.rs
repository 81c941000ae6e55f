// Plant a known Jordan structure behind a random congruence and recover it,
// over ℚ and over GF(7).

use std::collections::BTreeMap;

use congru::verify::{check_transform, random_nonsingular_with, rng};
use congru::{direct_sum, full_decomposition, jordan_block, Field, Involution, Matrix};

fn planted(field: Field, seed: u64) -> (Matrix, BTreeMap<usize, usize>) {
    let mut r = rng(seed);
    let blocks = BTreeMap::from([(1, 1), (2, 1), (3, 1)]);
    let regular = random_nonsingular_with(&mut r, 2, field, 5);
    let core = direct_sum(field, &[regular, jordan_block(1, field), jordan_block(2, field), jordan_block(3, field)]);
    let p = random_nonsingular_with(&mut r, core.rows(), field, 5);
    (core.congruence(&p, Involution::Identity), blocks)
}

pub fn run_example() {
    for field in [Field::Rational, Field::prime(7).unwrap()] {
        let (a, blocks) = planted(field, 11);
        let d = full_decomposition(&a, Involution::Identity).unwrap();
        println!("over {field}: A =\n{a}");
        println!("recovered {:?}, regular part\n{}", d.block_sum.jordan_multiplicities, d.block_sum.regular_part);
        assert_eq!(d.block_sum.jordan_multiplicities, blocks);
        assert_eq!(d.block_sum.regular_part.rows(), 2);
        let report = check_transform(&a, &d.transform, &d.target(), Involution::Identity).unwrap();
        assert!(report.ok, "{:?}", report.reason);
    }
}

fn main() {
    run_example();
}
