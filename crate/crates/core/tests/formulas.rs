//! Cross-validation of the closed-form parameters against the constructed
//! objects: for every buildable scheme in a broad grid, the matrix
//! dimensions, weights, cover size and identity size must equal the
//! formula values exactly, and so must the derived computation load.

use designcoded::binmat::{cover_bibd, cover_subspace, cover_tdesign, cover_transversal, BinaryMatrix, Cover};
use designcoded::caching::{scheme_params, Family};
use designcoded::designs::{construct_affine_bibd, construct_projective_bibd, construct_steiner3, construct_transversal};
use designcoded::gf::{prime_power, FieldTable};
use designcoded::mapreduce::computing_params;
use designcoded::rat::{rat_u64, Rat};
use designcoded::subspace::trivial_subspace_design;

fn check(family: &Family, matrix: &BinaryMatrix, cover: &Cover) {
    let p = scheme_params(family).unwrap();
    assert_eq!(matrix.rows() as u64, p.users, "{family:?} K");
    assert_eq!(rat_u64(matrix.cols() as u64), p.subpacketization, "{family:?} F");
    let z = matrix.constant_row_weight().expect("constant row weight");
    assert_eq!(
        Rat::new((z as u64).into(), (matrix.cols() as u64).into()),
        p.uncached,
        "{family:?} uncached"
    );
    assert_eq!(rat_u64(cover.size() as u64), p.cover_size, "{family:?} S");
    assert_eq!(
        cover.uniform_size.map(|g| rat_u64(g as u64)),
        Some(p.identity_size.clone()),
        "{family:?} g"
    );
    assert_eq!(
        p.rate,
        Rat::new((cover.size() as u64).into(), (matrix.cols() as u64).into()),
        "{family:?} rate"
    );

    let c = computing_params(family).unwrap();
    let w = matrix.constant_col_weight().expect("constant column weight");
    assert_eq!(
        rat_u64((matrix.rows() - w) as u64),
        c.computation_load,
        "{family:?} r"
    );
}

#[test]
fn plane_schemes_match_formulas() {
    for n in [2u64, 3, 4, 5, 7] {
        let d = construct_projective_bibd(n).unwrap();
        let (m, c) = cover_bibd(&d).unwrap();
        check(&Family::Bibd { v: n * n + n + 1, k: n + 1 }, &m, &c);

        let d = construct_affine_bibd(n).unwrap();
        let (m, c) = cover_bibd(&d).unwrap();
        check(&Family::Bibd { v: n * n, k: n }, &m, &c);
    }
}

#[test]
fn transversal_schemes_match_formulas() {
    for n in [2u64, 3, 4, 5, 7] {
        for k in [n, n + 1] {
            let d = construct_transversal(k, n).unwrap();
            let (m, c) = cover_transversal(&d).unwrap();
            check(&Family::Transversal { n, k }, &m, &c);
        }
    }
}

#[test]
fn steiner_schemes_match_formulas() {
    for q in [2u64, 3] {
        let d = construct_steiner3(q).unwrap();
        let (m, c) = cover_tdesign(&d).unwrap();
        check(&Family::TDesign { t: 3, v: q * q + 1, k: q + 1 }, &m, &c);
    }
}

#[test]
fn subspace_schemes_match_formulas() {
    for q in [2u64, 3, 4, 5] {
        let (p, e) = prime_power(q).unwrap();
        let field = FieldTable::new(p, e).unwrap();
        let mut v = 2u64;
        while q.pow(v as u32) <= 128 {
            for k in 2..=v {
                let sd = trivial_subspace_design(&field, v as usize, k as usize).unwrap();
                let (m, c) = cover_subspace(&field, &sd).unwrap();
                check(&Family::Subspace { q, v, t: k, k }, &m, &c);
            }
            v += 1;
        }
    }
}
