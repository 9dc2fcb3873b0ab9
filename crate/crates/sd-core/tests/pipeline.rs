//! End-to-end runs: build presentations from independent reference
//! constructions, validate them, differentiate along both routes, and
//! compare the resulting brackets against matrix commutators.

use sd_core::differentiate::{
    bracket_table, canonical_ce_monomials, ce_algebra, check_d_squared, validate_presentation,
    weil_checks, weil_extension,
};
use sd_core::oracle::{
    abelian_constants, bch_order2, commutator_constants, heisenberg_matrix_basis,
    nerve_from_group_law, random_chain_complex, random_conjugated_abelian_law,
    random_two_step_constants, relation_span_corank, so3_constants, tower_from_complex,
};
use sd_core::poly::{GeneratorId, Monomial};
use sd_core::q;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

#[test]
fn abelian_nerve_differentiates_to_exterior_algebra() {
    for m in 1..=2usize {
        let law = bch_order2(&abelian_constants(m), 4).unwrap();
        let p = nerve_from_group_law(&law, 4).unwrap();
        validate_presentation(&p).unwrap();
        let ce = ce_algebra(&p, 1).unwrap();
        for l in 0..m as u32 {
            let d = ce.differential_of(1, l).unwrap();
            assert!(d.is_zero(), "abelian generator xi1:{l} must be closed");
        }
        check_d_squared(&ce, 3).unwrap();
    }
}

#[test]
fn heisenberg_brackets_match_matrix_commutators() {
    let k = commutator_constants(&heisenberg_matrix_basis()).unwrap();
    let law = bch_order2(&k, 4).unwrap();
    let p = nerve_from_group_law(&law, 4).unwrap();
    validate_presentation(&p).unwrap();
    let ce = ce_algebra(&p, 1).unwrap();
    // d(xi_c) = -xi_a xi_b and the other two generators are closed.
    let d_c = ce.differential_of(1, 2).unwrap();
    let ab = Monomial::from_factors(vec![(GeneratorId::xi(1, 0), 1), (GeneratorId::xi(1, 1), 1)])
        .unwrap();
    assert_eq!(d_c.coefficient(&ab), q(-1, 1));
    assert_eq!(d_c.num_terms(), 1);
    assert!(ce.differential_of(1, 0).unwrap().is_zero());
    assert!(ce.differential_of(1, 1).unwrap().is_zero());
    // The extracted bracket equals the commutator table entry for entry.
    let table = bracket_table(&ce, &[1, 1]).unwrap();
    for a in 0..3u32 {
        for b in a + 1..3u32 {
            for out in 0..3u32 {
                let got = table
                    .constants
                    .get(&(vec![a, b], out))
                    .cloned()
                    .unwrap_or_else(|| q(0, 1));
                assert_eq!(
                    got, k.c[a as usize][b as usize][out as usize],
                    "bracket [{a},{b}] -> {out}"
                );
            }
        }
    }
    check_d_squared(&ce, 3).unwrap();
}

#[test]
fn cross_product_brackets_survive_low_truncation() {
    // The order-2 law of a non-nilpotent bracket is associative only below
    // weight 3, so the presentation lives at truncation 2: still enough to
    // differentiate the degree-1 generators.
    let k = so3_constants();
    let law = bch_order2(&k, 2).unwrap();
    let p = nerve_from_group_law(&law, 3).unwrap();
    validate_presentation(&p).unwrap();
    let ce = ce_algebra(&p, 1).unwrap();
    let table = bracket_table(&ce, &[1, 1]).unwrap();
    for a in 0..3u32 {
        for b in a + 1..3u32 {
            for out in 0..3u32 {
                let got = table
                    .constants
                    .get(&(vec![a, b], out))
                    .cloned()
                    .unwrap_or_else(|| q(0, 1));
                assert_eq!(got, k.c[a as usize][b as usize][out as usize]);
            }
        }
    }
}

#[test]
fn random_two_step_nerves_match_their_constants() {
    let mut rng = ChaCha8Rng::seed_from_u64(23);
    for _ in 0..10 {
        let k = random_two_step_constants(&mut rng, 2, 1);
        let law = bch_order2(&k, 4).unwrap();
        let p = nerve_from_group_law(&law, 4).unwrap();
        validate_presentation(&p).unwrap();
        let ce = ce_algebra(&p, 1).unwrap();
        let table = bracket_table(&ce, &[1, 1]).unwrap();
        for a in 0..3u32 {
            for b in a + 1..3u32 {
                for out in 0..3u32 {
                    let got = table
                        .constants
                        .get(&(vec![a, b], out))
                        .cloned()
                        .unwrap_or_else(|| q(0, 1));
                    assert_eq!(got, k.c[a as usize][b as usize][out as usize]);
                }
            }
        }
        check_d_squared(&ce, 3).unwrap();
    }
}

#[test]
fn random_towers_differentiate_consistently() {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    for ranks in [vec![0, 2, 1], vec![0, 1, 2, 2], vec![0, 2, 2, 1]] {
        for _ in 0..4 {
            let e = random_chain_complex(&mut rng, &ranks);
            let degrees = ranks.len() - 1;
            let p = tower_from_complex(&e, (degrees + 1) as u32, degrees + 1).unwrap();
            validate_presentation(&p).unwrap();
            // Route agreement is enforced inside ce_algebra.
            let ce = ce_algebra(&p, degrees).unwrap();
            // For a linear tower the generator differential is the dual
            // boundary: d(xi_n^l) = sum_m boundary[n][l, m] xi_{n+1}^m.
            for n in 1..degrees {
                for l in 0..e.rank(n) {
                    let d = ce.differential_of(n, l as u32).unwrap();
                    for m in 0..e.rank(n + 1) {
                        let mono = Monomial::generator(GeneratorId::xi((n + 1) as u32, m as u32));
                        assert_eq!(
                            d.coefficient(&mono),
                            e.boundary[n][(l, m)],
                            "tower differential entry ({n},{l}) -> {m}"
                        );
                    }
                    assert!(d
                        .terms()
                        .all(|(mono, _)| mono.factors().len() == 1 && mono.degree() == (n + 1) as u32));
                }
            }
            check_d_squared(&ce, degrees.saturating_sub(1).max(1)).unwrap();
        }
    }
}

#[test]
fn conjugated_abelian_nerves_stay_abelian() {
    let mut rng = ChaCha8Rng::seed_from_u64(41);
    for dim in 1..=2usize {
        for _ in 0..5 {
            let law = random_conjugated_abelian_law(&mut rng, dim, 4);
            let p = nerve_from_group_law(&law, 3).unwrap();
            validate_presentation(&p).unwrap();
            let ce = ce_algebra(&p, 1).unwrap();
            for l in 0..dim as u32 {
                assert!(
                    ce.differential_of(1, l).unwrap().is_zero(),
                    "a conjugated abelian law must differentiate to zero brackets"
                );
            }
        }
    }
}

#[test]
fn weil_extension_of_heisenberg_passes_its_checks() {
    let k = commutator_constants(&heisenberg_matrix_basis()).unwrap();
    let law = bch_order2(&k, 4).unwrap();
    let p = nerve_from_group_law(&law, 4).unwrap();
    let ce = ce_algebra(&p, 1).unwrap();
    let w = weil_extension(&ce).unwrap();
    weil_checks(&w).unwrap();
}

#[test]
fn covering_span_coranks_certify_semifreeness() {
    // The dimension of the reduced level-n piece, computed from transposition
    // relations alone, equals the canonical monomial count in degree n.
    for ranks in [vec![0, 1], vec![0, 2], vec![0, 1, 1], vec![0, 2, 1, 1]] {
        for n in 1..=4usize {
            assert_eq!(
                relation_span_corank(n, &ranks),
                canonical_ce_monomials(&ranks, n).len(),
                "ranks {ranks:?}, level {n}"
            );
        }
    }
}
