//! Cross-module runs for the cosimplicial layer: the counit over the stock
//! algebra corpus, the square-ideal criterion against explicit witnesses,
//! closure of the quotient ideal, the interchange retraction, and
//! naturality of the counit along algebra morphisms.

use sd_core::cosimplicial::{
    abstract_diff, cosimplicial_normalize, counit_check, counit_naturality, denormalize_algebra,
    dga_from_ce, is_infinitesimal, presentation_to_cosimplicial, standard_dga_corpus,
    standard_dga_morphisms, FiniteCosimplicialAlgebra,
};
use sd_core::differentiate::ce_algebra;
use sd_core::dold_kan::{aw, overlapping_basis, sh};
use sd_core::oracle::{
    abelian_constants, bch_order2, commutator_constants, heisenberg_matrix_basis,
    nerve_from_group_law, random_two_step_constants,
};
use sd_core::Q;

use num_traits::{One, Zero};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use std::collections::BTreeMap;

fn abelian_cochains(m: usize) -> FiniteCosimplicialAlgebra<Q> {
    let law = bch_order2(&abelian_constants(m), 2).unwrap();
    let p = nerve_from_group_law(&law, 2).unwrap();
    presentation_to_cosimplicial(&p, 2).unwrap()
}

fn heisenberg_cochains() -> FiniteCosimplicialAlgebra<Q> {
    let k = commutator_constants(&heisenberg_matrix_basis()).unwrap();
    let law = bch_order2(&k, 2).unwrap();
    let p = nerve_from_group_law(&law, 2).unwrap();
    presentation_to_cosimplicial(&p, 2).unwrap()
}

#[test]
fn counit_holds_across_the_corpus() {
    for (name, y) in standard_dga_corpus::<Q>() {
        let report = counit_check(&y).unwrap_or_else(|e| panic!("{name}: {e}"));
        assert!(
            report.ok(),
            "{name}: infinitesimal={} dims_match={} algebra_iso={}",
            report.infinitesimal,
            report.dims_match,
            report.algebra_iso
        );
        // The normalized part of the associated level rings recovers the
        // original graded ranks on the nose.
        let x = denormalize_algebra(&y, y.max_degree()).unwrap();
        let nc = cosimplicial_normalize(&x).unwrap();
        for n in 0..=y.max_degree() {
            assert_eq!(nc.dim(n), y.dim(n), "{name}: normalized rank at level {n}");
        }
    }
}

#[test]
fn overlapping_products_vanish_in_the_level_rings() {
    for (name, y) in standard_dga_corpus::<Q>() {
        let x = denormalize_algebra(&y, y.max_degree()).unwrap();
        for n in 0..=x.cap() {
            for (iu, iv) in overlapping_basis(y.complex(), n) {
                assert!(
                    x.level(n).product[iu][iv].is_empty(),
                    "{name}: level {n} product of overlapping pair ({iu},{iv})"
                );
                assert!(
                    x.level(n).product[iv][iu].is_empty(),
                    "{name}: level {n} product of overlapping pair ({iv},{iu})"
                );
            }
        }
    }
}

#[test]
fn square_ideal_vanishing_matches_the_infinitesimal_test() {
    // Level rings built from graded algebras have no ideal at all.
    for (name, y) in standard_dga_corpus::<Q>() {
        let x = denormalize_algebra(&y, y.max_degree()).unwrap();
        let report = is_infinitesimal(&x).unwrap();
        assert!(report.infinitesimal, "{name}: expected no witness");
        let a = abstract_diff(&x, x.cap()).unwrap();
        assert!(
            a.ideal_dims.iter().all(|&d| d == 0),
            "{name}: ideal dims {:?}",
            a.ideal_dims
        );
    }
    // Function rings on nerves do: the witness pins down a product of two
    // vectors in one codegeneracy kernel with a normalized component, and
    // the quotient ideal is nonzero exactly where the witness lives.
    let fixtures: Vec<(&str, FiniteCosimplicialAlgebra<Q>)> = vec![
        ("line functions", abelian_cochains(1)),
        ("plane functions", abelian_cochains(2)),
        ("heisenberg functions", heisenberg_cochains()),
    ];
    for (name, x) in fixtures {
        let report = is_infinitesimal(&x).unwrap();
        assert!(!report.infinitesimal, "{name}: expected a witness");
        let w = report.witness.expect(name);
        let s = x.codegeneracy(w.level - 1, w.codegeneracy);
        assert!(
            s.apply(&w.left).iter().all(|c| c.is_zero()),
            "{name}: left factor escapes the kernel"
        );
        assert!(
            s.apply(&w.right).iter().all(|c| c.is_zero()),
            "{name}: right factor escapes the kernel"
        );
        assert_eq!(
            w.product,
            x.level(w.level).mul_vec(&w.left, &w.right),
            "{name}: witness product"
        );
        assert!(
            w.normalized_part.iter().any(|c| !c.is_zero()),
            "{name}: witness has no normalized component"
        );
        let a = abstract_diff(&x, x.cap()).unwrap();
        assert!(
            a.ideal_dims[w.level] > 0,
            "{name}: ideal dims {:?} vanish at witness level {}",
            a.ideal_dims,
            w.level
        );
    }
}

#[test]
fn ideal_is_closed_under_differential_and_products() {
    let fixtures: Vec<(&str, FiniteCosimplicialAlgebra<Q>)> = vec![
        ("plane functions", abelian_cochains(2)),
        ("heisenberg functions", heisenberg_cochains()),
    ];
    for (name, x) in fixtures {
        let degree = x.cap();
        let a = abstract_diff(&x, degree).unwrap();
        let nc = a.normalized();
        for n in 0..=degree {
            for v in a.ideal_basis(n) {
                if n < degree {
                    let dv = nc.differentials[n].apply(v);
                    assert!(
                        a.ideal_contains(n + 1, &dv),
                        "{name}: differential leaves the ideal at level {n}"
                    );
                }
                for p in 0..=degree - n {
                    for t in 0..nc.dim(p) {
                        let mut e = vec![Q::zero(); nc.dim(p)];
                        e[t] = Q::one();
                        let left = nc.cup(&x, p, n, &e, v).unwrap();
                        assert!(
                            a.ideal_contains(p + n, &left),
                            "{name}: left product leaves the ideal at level {}",
                            p + n
                        );
                        let right = nc.cup(&x, n, p, v, &e).unwrap();
                        assert!(
                            a.ideal_contains(n + p, &right),
                            "{name}: right product leaves the ideal at level {}",
                            n + p
                        );
                    }
                }
            }
        }
    }
}

#[test]
fn interchange_retracts_the_tensor_embedding() {
    for (name, y) in standard_dga_corpus::<Q>() {
        let c = y.complex();
        for n in 0..=y.max_degree() {
            for p in 0..=n {
                let q = n - p;
                for f in 0..c.rank(p) {
                    for g in 0..c.rank(q) {
                        let t = aw(c, p, q, f, g);
                        let back = sh(c, n, &t);
                        let expected = BTreeMap::from([((p, f, g), Q::one())]);
                        assert_eq!(back, expected, "{name}: slot ({p},{q},{f},{g})");
                    }
                }
            }
        }
    }
}

#[test]
fn counit_is_natural_for_the_morphism_corpus() {
    for (name, y, z, maps) in standard_dga_morphisms::<Q>() {
        assert!(counit_naturality(&y, &z, &maps).unwrap(), "{name}");
    }
}

#[test]
fn random_tower_duals_pass_the_round_trip() {
    let mut rng = ChaCha8Rng::seed_from_u64(117);
    for (v, z) in [(1usize, 1usize), (2, 1), (1, 2), (2, 2)] {
        let k = random_two_step_constants(&mut rng, v, z);
        let law = bch_order2(&k, 2).unwrap();
        let p = nerve_from_group_law(&law, 3).unwrap();
        let ce = ce_algebra(&p, 2).unwrap();
        let y = dga_from_ce(&ce, 2).unwrap();
        let report = counit_check(&y).unwrap();
        assert!(report.ok(), "tower v={v} z={z}");
    }
}
