// The sparse nilpotent part N, its rank powers, and the permutation that
// turns it into a direct sum of Jordan blocks.

use congru::sparse_form::canonical_n;
use congru::{canonical_sparse_form, jordan_block, jordan_permutation, Field, Involution, Matrix};

pub fn run_example() {
    let f = Field::Rational;
    let m = [3, 2, 2, 1];
    let n = canonical_n(&m, f).unwrap();
    println!("N for m = {m:?}:\n{n}");

    let mut power = Matrix::identity(n.rows(), f);
    for k in 1..=m.len() {
        power = &power * &n;
        let expected: usize = m[k..].iter().sum();
        println!("rank N^{k} = {}", power.rank());
        assert_eq!(power.rank(), expected);
    }

    let p = jordan_permutation(&m).unwrap().to_matrix(f);
    let jordan = &(&p * &n) * &p.transpose();
    println!("P·N·Pᵀ =\n{jordan}");

    // the sparse form of J₄ has m = (1, 1, 1, 1)
    let sf = canonical_sparse_form(&jordan_block(4, f), Involution::Identity).unwrap();
    println!("J₄: m = {:?}, X =\n{}", sf.m, sf.global_transform);
    assert_eq!(sf.m, vec![1, 1, 1, 1]);
}

fn main() {
    run_example();
}
