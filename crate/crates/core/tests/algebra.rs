mod common;

use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use stringmod::algebra::{parse_algebra_spec, rmatrix_emit, rmatrix_parse, AlgebraElement, RMatrix, StringAlgebra};
use stringmod::gf::FiniteField;

use common::{gp, kronecker};

fn basis_names(r: &StringAlgebra) -> Vec<String> {
    r.path_basis().iter().map(|p| p.render(r.quiver())).collect()
}

fn index(r: &StringAlgebra, name: &str) -> usize {
    basis_names(r).iter().position(|n| n == name).unwrap_or_else(|| panic!("no basis path {name}"))
}

#[test]
fn example_algebra_basis_and_products() {
    let r = gp(2);
    assert_eq!(basis_names(&r), ["e_v", "x", "y"]);
    assert_eq!(r.dim(), 3);
    let (e, x, y) = (index(&r, "e_v"), index(&r, "x"), index(&r, "y"));
    assert_eq!(r.basis_product(x, x), None);
    assert_eq!(r.basis_product(x, y), None);
    assert_eq!(r.basis_product(y, x), None);
    assert_eq!(r.basis_product(e, x), Some(x));
    assert_eq!(r.basis_product(y, e), Some(y));
}

#[test]
fn longer_example_algebra() {
    let f = FiniteField::prime(3).unwrap();
    let r = StringAlgebra::gelfand_ponomarev(f, 2, 3);
    assert_eq!(r.dim(), 4);
    let y = index(&r, "y");
    let yy = r.basis_product(y, y).expect("y^2 survives");
    assert_eq!(r.basis_product(yy, y), None);
    assert_eq!(r.nilpotency_bound(), 3);
}

#[test]
fn kronecker_basis_and_idempotents() {
    let r = kronecker(2);
    assert_eq!(r.dim(), 4);
    let (ea, eb, x) = (index(&r, "e_a"), index(&r, "e_b"), index(&r, "x"));
    assert_eq!(r.basis_product(eb, x), Some(x));
    assert_eq!(r.basis_product(x, ea), Some(x));
    assert_eq!(r.basis_product(ea, x), None);
    assert_eq!(r.basis_product(ea, eb), None);
}

#[test]
fn shipped_spec_files_match_constructors() {
    let root = std::path::Path::new(env!("CARGO_MANIFEST_DIR")).join("../../data/algebras");
    for (file, built) in [("gp22.alg", gp(2)), ("kronecker2.alg", kronecker(2)), ("kronecker3.alg", kronecker(3))] {
        let r = parse_algebra_spec(&std::fs::read_to_string(root.join(file)).unwrap()).unwrap();
        assert_eq!(basis_names(&r), basis_names(&built), "{file}");
        assert_eq!(r.field().order(), built.field().order());
    }
}

#[test]
fn rejects_non_string_algebras() {
    let three_out = "field 2 1\nvertices v\narrow x: v -> v\narrow y: v -> v\narrow z: v -> v\nforbid x x\nforbid y y\nforbid z z\n";
    assert!(parse_algebra_spec(three_out).is_err());
    let not_nilpotent = "field 2 1\nvertices v\narrow x: v -> v\n";
    assert!(parse_algebra_spec(not_nilpotent).is_err());
    assert!(parse_algebra_spec("field 4 1\nvertices v\n").is_err());
    assert!(parse_algebra_spec("vertices v\narrow x: v -> w\n").is_err());
}

#[test]
fn rmatrix_round_trip() {
    let r = gp(3);
    let a = rmatrix_parse("[[e_v - x, y], [0, 2 e_v]]", &r).unwrap();
    assert_eq!((a.rows(), a.cols()), (2, 2));
    assert_eq!(rmatrix_parse(&rmatrix_emit(&a, &r), &r).unwrap(), a);
    assert!(rmatrix_parse("[[e_v, x], [y]]", &r).is_err());
    assert!(rmatrix_parse("[[z]]", &r).is_err());
}

proptest! {
    #[test]
    fn multiplication_is_associative_and_distributive(seed in any::<u64>(), which in 0usize..3) {
        let f = FiniteField::prime(3).unwrap();
        let r = match which {
            0 => StringAlgebra::gelfand_ponomarev(f, 2, 3),
            1 => StringAlgebra::gelfand_ponomarev(f, 3, 3),
            _ => StringAlgebra::kronecker(f),
        };
        let mut g = ChaCha8Rng::seed_from_u64(seed);
        let (a, b, c) = (AlgebraElement::random(&r, &mut g), AlgebraElement::random(&r, &mut g), AlgebraElement::random(&r, &mut g));
        let fld = r.field();
        prop_assert_eq!(a.mul(&b, &r).mul(&c, &r), a.mul(&b.mul(&c, &r), &r));
        prop_assert_eq!(a.mul(&b.add(&c, fld), &r), a.mul(&b, &r).add(&a.mul(&c, &r), fld));
        prop_assert_eq!(r.unit().mul(&a, &r), a.clone());
        prop_assert_eq!(a.mul(&r.unit(), &r), a);
    }

    #[test]
    fn matrix_product_is_associative(seed in any::<u64>()) {
        let r = gp(2);
        let mut g = ChaCha8Rng::seed_from_u64(seed);
        let a = RMatrix::random(2, 3, &r, &mut g);
        let b = RMatrix::random(3, 2, &r, &mut g);
        let c = RMatrix::random(2, 2, &r, &mut g);
        let left = a.mul(&b, &r).unwrap().mul(&c, &r).unwrap();
        let right = a.mul(&b.mul(&c, &r).unwrap(), &r).unwrap();
        prop_assert_eq!(left, right);
        prop_assert!(a.mul(&a, &r).is_err());
    }
}
