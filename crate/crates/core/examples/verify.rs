// Seeded randomized suites: planted round trips and congruence invariance.

use congru::verify::{invariance_suite, round_trip_suite};
use congru::{jordan_block, Field, FieldSpec, Involution};

pub fn run_example() {
    for spec in [FieldSpec::rational(), FieldSpec::gaussian(Involution::Conjugation)] {
        let report = round_trip_suite(spec, 20, 7, 3, 6);
        println!("{}", report.summary());
        assert!(report.passed());
    }
    let report = invariance_suite(&jordan_block(3, Field::Rational), Involution::Identity, 20, 7).unwrap();
    println!("{}", report.summary());
    assert!(report.passed());
}

fn main() {
    run_example();
}
