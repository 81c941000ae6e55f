// The 2×2 matrix [[1, −i], [i, 1]] decomposes differently under the two
// involutions of ℚ(i).

use congru::format::parse_matrix;
use congru::{full_decomposition, Field, Involution};

pub fn run_example() {
    let a = parse_matrix("2 2\n1 -i\ni 1\n", Field::GaussianRational).unwrap();

    for inv in [Involution::Conjugation, Involution::Identity] {
        let v = a.invariants(inv).unwrap();
        let d = full_decomposition(&a, inv).unwrap();
        let r = d.block_sum.regular_part.rows();
        println!("{inv:?}: ν={} ζ={} κ={} ρ={}", v.nu, v.zeta, v.kappa, v.rho);
        println!("  regular {r}×{r}, Jordan blocks {:?}", d.block_sum.jordan_multiplicities);
        print!("  X = {}", d.transform);
        assert_eq!(a.congruence(&d.transform, inv), d.target());
    }
}

fn main() {
    run_example();
}
