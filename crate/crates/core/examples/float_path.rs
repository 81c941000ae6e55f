// The staircase reduction with orthogonal transforms only, on a matrix
// orthogonally congruent to I₂ ⊕ J₂.

use congru::float_unitary::{float_regularize, FloatConfig, FloatMode};
use nalgebra::DMatrix;
use num_complex::Complex64;

pub fn run_example() {
    let core = DMatrix::from_row_slice(4, 4, &[
        1.0, 0.0, 0.0, 0.0, //
        0.0, 1.0, 0.0, 0.0, //
        0.0, 0.0, 0.0, 1.0, //
        0.0, 0.0, 0.0, 0.0,
    ]);
    // a rotation mixing all coordinates
    let q = DMatrix::from_fn(4, 4, |i, j| ((i * 4 + j) as f64 * 0.7).sin()).qr().q();
    let a = (&q * core * q.transpose()).map(|x| Complex64::new(x, 0.0));

    let r = float_regularize(&a, FloatConfig::new(FloatMode::RealIdentity)).unwrap();
    println!("m = {:?}, tol = {:e}", r.m, r.tol);
    println!("pattern residual {:e}, unitarity residual {:e}", r.pattern_residual, r.unitarity_residual);
    let sv = r.regular_block.map(|z| z.re).singular_values();
    println!("singular values of the regular block: {sv}");
    assert_eq!(r.m, vec![1, 1]);
    assert!(sv.iter().all(|s| (s - 1.0).abs() < 1e-12));
    assert!(r.pattern_residual <= r.pattern_tol());
}

fn main() {
    run_example();
}
