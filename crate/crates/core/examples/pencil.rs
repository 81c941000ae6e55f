// Regularize the *selfadjoint pencil A + λA* and show the strictly
// equivalent replacements of its Jordan pairs.

use congru::format::parse_matrix;
use congru::pencil::{pencil_regularize, replace_block, Pencil, SelfadjointPencil};
use congru::{Field, FieldSpec, Involution, Scalar};

pub fn run_example() {
    let spec = FieldSpec::gaussian(Involution::Conjugation);
    let a = parse_matrix("3 3\n0 1 i\n0 0 1\n0 0 0\n", spec.field).unwrap();
    let d = pencil_regularize(&SelfadjointPencil { a: a.clone(), spec }).unwrap();
    println!("regular part:\n{}", d.regular);
    println!("blocks: {:?}", d.kronecker_blocks);
    println!("replaced: {:?}", d.replaced_blocks());

    let pencil = Pencil::new(a.clone(), a.conj_transpose(spec.involution));
    let moved = pencil.transform(&d.transform, &d.transform.conj_transpose(spec.involution));
    assert_eq!(moved, d.reduced_pencil());
    let lambda = Scalar::gaussian_int(2, 1);
    assert_eq!(moved.evaluate(&lambda), d.reduced_pencil().evaluate(&lambda));

    for k in 1..=4 {
        let r = replace_block(k, Field::Rational).unwrap();
        println!("k = {k}: {:?}, permutation {:?}", r.tag, r.permutation.as_slice());
        let j = congru::jordan_block(k, Field::Rational);
        assert_eq!(Pencil::new(j.clone(), j.transpose()).transform(&r.left, &r.right), r.combined);
    }
}

fn main() {
    run_example();
}
