//! The ten release gates, runnable one by one through `selftest` or all at
//! once from the acceptance test target. Each returns a one-line summary on
//! success and a concrete witness on failure; fixture problems are kept
//! apart from mathematical failures so the exit code can distinguish them.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};
use std::time::Instant;

use num_traits::{One, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use sd_core::cochain::{cup, delta, reduce_mod_jhat, Cochain};
use sd_core::cohomology::{covering_monomial_basis, vanest_compare};
use sd_core::cosimplicial::{
    cosimplicial_normalize, counit_check, odd_line_full_monomial, odd_line_increment_product,
    odd_line_model, standard_dga_corpus,
};
use sd_core::differentiate::{
    bracket_table, canonical_ce_monomials, ce_algebra, ce_differential_direct,
    ce_differential_via_delta, check_d_squared, validate_presentation, weil_bidegree_dimension,
    weil_checks, weil_extension, FramedPresentation,
};
use sd_core::dold_kan::{aw, dk_degeneracy_matrix, dk_face_matrix, sh, ChainComplex, DKLevelBasis};
use sd_core::matrix::Matrix;
use sd_core::oracle::{
    abelian_constants, bch_order2, brute_unravel_sign, commutator_constants,
    heisenberg_matrix_basis, nerve_from_group_law, random_chain_complex,
    random_conjugated_abelian_law, random_two_step_constants, relation_span_corank,
    tower_from_complex,
};
use sd_core::poly::{GeneratorId, GradedPolynomial, Monomial};
use sd_core::simplex::{set_partitions, unravel, Label, LabeledBlockSequence};
use sd_core::{q, Q};

use crate::formats;

pub enum Failure {
    /// The fixture directory is unreadable or a fixture is corrupt.
    Fixture(String),
    /// A mathematical check failed; the string is the witness.
    Check(String),
}

fn chk<T: Into<String>>(m: T) -> Failure {
    Failure::Check(m.into())
}

pub struct Criterion {
    pub name: &'static str,
    pub what: &'static str,
    pub run: fn(&Path) -> Result<String, Failure>,
}

pub fn all() -> Vec<Criterion> {
    vec![
        Criterion {
            name: "example-reproduction",
            what: "coboundary of x^2 on the additive line, and its one closed dual generator",
            run: example_reproduction,
        },
        Criterion {
            name: "bracket-recovery",
            what: "structure constants recovered from the degree-one bracket table",
            run: bracket_recovery,
        },
        Criterion {
            name: "dual-routes",
            what: "direct and coboundary-based differentials agree everywhere",
            run: dual_routes,
        },
        Criterion {
            name: "semi-freeness",
            what: "canonical monomial counts match the relation-span corank",
            run: semi_freeness,
        },
        Criterion {
            name: "dga-certificate",
            what: "d squared vanishes and reduction is graded-commutative on products",
            run: dga_certificate,
        },
        Criterion {
            name: "dold-kan-roundtrip",
            what: "levelwise models satisfy the simplicial identities and normalize back",
            run: dold_kan_roundtrip,
        },
        Criterion {
            name: "interchange-counit",
            what: "shuffle retracts the interchange embedding; counit is an isomorphism",
            run: interchange_counit,
        },
        Criterion {
            name: "unravel-signs",
            what: "fast unraveling matches the brute-force rewrite search",
            run: unravel_signs,
        },
        Criterion {
            name: "vanest-comparison",
            what: "weight-sliced comparison map is an isomorphism on additive nerves",
            run: vanest_comparison,
        },
        Criterion {
            name: "weil-extension",
            what: "bidegree counts and the two anticommuting differentials",
            run: weil_extension_counts,
        },
    ]
}

pub struct Outcome {
    pub name: &'static str,
    pub pass: bool,
    pub fixture_error: bool,
    pub detail: String,
    pub millis: u128,
}

pub fn run_all(fixtures: &Path, filter: Option<&str>) -> Vec<Outcome> {
    let mut out = Vec::new();
    for c in all() {
        if let Some(f) = filter {
            if !c.name.contains(f) {
                continue;
            }
        }
        let t0 = Instant::now();
        let (pass, fixture_error, detail) = match (c.run)(fixtures) {
            Ok(detail) => (true, false, detail),
            Err(Failure::Fixture(m)) => (false, true, m),
            Err(Failure::Check(m)) => (false, false, m),
        };
        out.push(Outcome {
            name: c.name,
            pass,
            fixture_error,
            detail,
            millis: t0.elapsed().as_millis(),
        });
    }
    out
}

/// Fixtures of kind `framed` or `group_law`, as validated presentations.
/// Group laws become two-level nerves: their tangent sits in degree one, so
/// two levels carry every differential.
pub fn fixture_presentations(dir: &Path) -> Result<Vec<(String, FramedPresentation<Q>)>, Failure> {
    let entries = std::fs::read_dir(dir).map_err(|e| {
        Failure::Fixture(format!("cannot read fixture directory {}: {e}", dir.display()))
    })?;
    let mut paths: Vec<PathBuf> = entries
        .filter_map(|e| e.ok().map(|d| d.path()))
        .filter(|p| p.extension().is_some_and(|x| x == "json"))
        .collect();
    paths.sort();
    if paths.is_empty() {
        return Err(Failure::Fixture(format!(
            "no fixtures found in {}",
            dir.display()
        )));
    }
    let mut out = Vec::new();
    for path in paths {
        let name = path
            .file_stem()
            .map(|s| s.to_string_lossy().into_owned())
            .unwrap_or_else(|| path.display().to_string());
        let f = formats::load_presentation(&path).map_err(Failure::Fixture)?;
        match f.kind.as_str() {
            "framed" => {
                let p = formats::build_framed(&f)
                    .and_then(|p| validate_presentation(&p).map(|()| p))
                    .map_err(|e| Failure::Fixture(format!("fixture {name}: {e}")))?;
                out.push((name, p));
            }
            "group_law" => {
                let law = formats::build_group_law(&f)
                    .map_err(|e| Failure::Fixture(format!("fixture {name}: {e}")))?;
                let p = nerve_from_group_law(&law, 2)
                    .map_err(|e| Failure::Fixture(format!("fixture {name}: {e}")))?;
                out.push((name, p));
            }
            "cosimplicial" => {
                let x = formats::build_cosimplicial(&f)
                    .and_then(|x| x.validate().map(|()| x))
                    .map_err(|e| Failure::Fixture(format!("fixture {name}: {e}")))?;
                // Level rings are exercised elsewhere; only their integrity
                // is a fixture concern here.
                drop(x);
            }
            other => {
                return Err(Failure::Fixture(format!(
                    "fixture {name}: unknown kind {other:?}"
                )));
            }
        }
    }
    Ok(out)
}

fn coord(alpha: &[usize], label: u32) -> GeneratorId {
    GeneratorId::coord(alpha.to_vec(), label, false)
}

fn binomial(n: usize, k: usize) -> usize {
    if k > n {
        return 0;
    }
    let mut r = 1usize;
    for i in 0..k {
        r = r * (n - i) / (i + 1);
    }
    r
}

fn example_reproduction(_fixtures: &Path) -> Result<String, Failure> {
    let law = bch_order2(&abelian_constants(1), 4).map_err(chk)?;
    let p = nerve_from_group_law(&law, 4).map_err(chk)?;
    let x = GradedPolynomial::generator(coord(&[1], 0), Some(p.truncation()));
    let f = Cochain::new(1, x.mul(&x));
    let df = delta(&f, &p).map_err(chk)?;
    let mut expect = GradedPolynomial::zero(Some(p.truncation()));
    let m = Monomial::from_factors(vec![(coord(&[1], 0), 1), (coord(&[2], 0), 1)])
        .expect("distinct even coordinates");
    expect.add_term(m, q(-2, 1));
    if df.value != expect {
        return Err(chk(format!(
            "coboundary of the squared coordinate is {}, expected {}",
            df.value, expect
        )));
    }
    let ce = ce_algebra(&p, 1).map_err(chk)?;
    if ce.generators() != vec![(1, 0)] {
        return Err(chk(format!(
            "expected a single degree-one generator, found {:?}",
            ce.generators()
        )));
    }
    let d = ce
        .differential
        .get(&(1, 0))
        .ok_or_else(|| chk("no stored differential for the degree-one generator"))?;
    if !d.is_zero() {
        return Err(chk(format!("the lone generator is not closed: d = {d}")));
    }
    Ok("coboundary of x^2 is -2 x{1}x{2}; the dual algebra is one closed generator".into())
}

fn bracket_recovery(_fixtures: &Path) -> Result<String, Failure> {
    let k = commutator_constants(&heisenberg_matrix_basis()).map_err(chk)?;
    let law = bch_order2(&k, 4).map_err(chk)?;
    let p = nerve_from_group_law(&law, 2).map_err(chk)?;
    let ce = ce_algebra(&p, 1).map_err(chk)?;
    let table = bracket_table(&ce, &[1, 1]).map_err(chk)?;
    let dim = k.dim as u32;
    for a in 0..dim {
        for b in 0..dim {
            for c in 0..dim {
                let expected = k.c[a as usize][b as usize][c as usize].clone();
                let got = if a < b {
                    table
                        .constants
                        .get(&(vec![a, b], c))
                        .cloned()
                        .unwrap_or_else(Q::zero)
                } else if a > b {
                    -table
                        .constants
                        .get(&(vec![b, a], c))
                        .cloned()
                        .unwrap_or_else(Q::zero)
                } else {
                    Q::zero()
                };
                if got != expected {
                    return Err(chk(format!(
                        "bracket constant ({a},{b})->{c} is {got}, commutators give {expected}"
                    )));
                }
            }
        }
    }
    Ok(format!(
        "all {} constants match the matrix commutators (stored differential-to-bracket sign -1)",
        dim * dim * dim
    ))
}

fn routes_agree(p: &FramedPresentation<Q>, max_degree: usize) -> Result<usize, String> {
    let top = max_degree
        .min((p.truncation() as usize).saturating_sub(1))
        .min(p.max_level().saturating_sub(1));
    let mut checked = 0;
    for n in 1..=top {
        for l in 0..p.rank(n) {
            let a = ce_differential_direct(p, n, l as u32)?;
            let b = ce_differential_via_delta(p, n, l as u32)?;
            if a.level != b.level || !a.value.sub(&b.value).is_zero() {
                return Err(format!(
                    "routes disagree on the degree-{n} generator {l}: {} vs {}",
                    a.value, b.value
                ));
            }
            checked += 1;
        }
    }
    Ok(checked)
}

fn dual_routes(fixtures: &Path) -> Result<String, Failure> {
    let stored = fixture_presentations(fixtures)?;
    let mut generators = 0;
    for (name, p) in &stored {
        generators += routes_agree(p, 3).map_err(|e| chk(format!("fixture {name}: {e}")))?;
    }
    let n_fixtures = stored.len();

    let mut rng = ChaCha8Rng::seed_from_u64(0x5eed_0003);
    let mut randomized = 0usize;
    for i in 0..34 {
        let m = 1 + (i % 2);
        let t = 2 + (i % 3) as u32;
        let law = random_conjugated_abelian_law(&mut rng, m, t);
        let p = nerve_from_group_law(&law, 2).map_err(chk)?;
        generators += routes_agree(&p, 3)
            .map_err(|e| chk(format!("conjugated abelian case {i}: {e}")))?;
        randomized += 1;
    }
    for i in 0..33 {
        let k = random_two_step_constants(&mut rng, 1, 1);
        let law = bch_order2(&k, 4).map_err(chk)?;
        let p = nerve_from_group_law(&law, 2).map_err(chk)?;
        generators += routes_agree(&p, 3).map_err(|e| chk(format!("two-step case {i}: {e}")))?;
        randomized += 1;
    }
    for i in 0..33 {
        let degrees = 1 + (i % 3);
        let mut ranks = vec![0usize];
        for _ in 0..degrees {
            ranks.push(rng.gen_range(1..=2));
        }
        let e = random_chain_complex(&mut rng, &ranks);
        let p = tower_from_complex(&e, 4, degrees + 1).map_err(chk)?;
        generators += routes_agree(&p, 3).map_err(|e| chk(format!("tower case {i}: {e}")))?;
        randomized += 1;
    }
    Ok(format!(
        "routes agree on {generators} generators across {n_fixtures} fixtures and {randomized} randomized presentations"
    ))
}

fn semi_freeness(_fixtures: &Path) -> Result<String, Failure> {
    let mut combos = 0;
    for r1 in 0..=2usize {
        for r2 in 0..=2usize {
            for r3 in 0..=2usize {
                for r4 in 0..=2usize {
                    let ranks = vec![0, r1, r2, r3, r4];
                    for n in 1..=4usize {
                        let monomials = canonical_ce_monomials(&ranks, n).len();
                        let corank = relation_span_corank(n, &ranks);
                        if monomials != corank {
                            return Err(chk(format!(
                                "ranks {ranks:?} degree {n}: {monomials} canonical monomials, corank {corank}"
                            )));
                        }
                        combos += 1;
                    }
                }
            }
        }
    }
    Ok(format!(
        "monomial counts equal relation-span coranks in {combos} (ranks, degree) combinations"
    ))
}

fn random_normalized(
    rng: &mut ChaCha8Rng,
    basis: &[Monomial],
    level: usize,
    truncation: u32,
) -> Cochain<Q> {
    let mut v = GradedPolynomial::zero(Some(truncation));
    for _ in 0..rng.gen_range(1..=3) {
        let m = basis[rng.gen_range(0..basis.len())].clone();
        let c = *[-2i64, -1, 1, 2]
            .get(rng.gen_range(0..4))
            .expect("coefficient pool");
        v.add_term(m, q(c, 1));
    }
    if v.is_zero() {
        v.add_term(basis[0].clone(), Q::one());
    }
    Cochain::new(level, v)
}

fn graded_sign_cases(
    p: &FramedPresentation<Q>,
    rng: &mut ChaCha8Rng,
    level_pairs: &[(usize, usize)],
    rounds: usize,
) -> Result<usize, String> {
    let mut bases: BTreeMap<usize, Vec<Monomial>> = BTreeMap::new();
    for &(a, b) in level_pairs {
        for lv in [a, b] {
            bases.entry(lv).or_insert_with(|| {
                let mut basis = covering_monomial_basis(p, lv, lv as u32);
                basis.extend(covering_monomial_basis(p, lv, lv as u32 + 1));
                basis
            });
        }
    }
    let mut done = 0;
    for round in 0..rounds {
        let (lp, lq) = level_pairs[round % level_pairs.len()];
        let f = random_normalized(rng, &bases[&lp], lp, p.truncation());
        let g = random_normalized(rng, &bases[&lq], lq, p.truncation());
        let fg = reduce_mod_jhat(&cup(&f, &g, p)?)?;
        let gf = reduce_mod_jhat(&cup(&g, &f, p)?)?;
        let sign = if (lp * lq) % 2 == 1 { q(-1, 1) } else { Q::one() };
        if !fg.value.sub(&gf.value.scale(&sign)).is_zero() {
            return Err(format!(
                "graded symmetry fails for levels ({lp},{lq}): reduce(f.g) = {}, reduce(g.f) = {}",
                fg.value, gf.value
            ));
        }
        done += 1;
    }
    Ok(done)
}

fn dga_certificate(fixtures: &Path) -> Result<String, Failure> {
    let stored = fixture_presentations(fixtures)?;
    for (name, p) in &stored {
        let top = (p.max_level().saturating_sub(1))
            .min((p.truncation() as usize).saturating_sub(1));
        let store = (1..=top).rev().find(|&k| p.rank(k) > 0).unwrap_or(0);
        if store == 0 {
            continue;
        }
        let ce = ce_algebra(p, store).map_err(|e| chk(format!("fixture {name}: {e}")))?;
        check_d_squared(&ce, 3).map_err(|e| chk(format!("fixture {name}: {e}")))?;
    }

    let mut rng = ChaCha8Rng::seed_from_u64(0x5eed_0005);
    let plane = nerve_from_group_law(&bch_order2(&abelian_constants(2), 4).map_err(chk)?, 4)
        .map_err(chk)?;
    let mut cases = graded_sign_cases(&plane, &mut rng, &[(1, 1), (1, 2), (2, 1), (2, 2)], 60)
        .map_err(chk)?;
    let heis = commutator_constants(&heisenberg_matrix_basis()).map_err(chk)?;
    let heis_nerve =
        nerve_from_group_law(&bch_order2(&heis, 4).map_err(chk)?, 4).map_err(chk)?;
    cases += graded_sign_cases(&heis_nerve, &mut rng, &[(1, 1), (1, 2), (2, 1)], 45)
        .map_err(chk)?;
    Ok(format!(
        "d^2 = 0 through degree 3 on {} fixtures; graded symmetry holds on {cases} random products",
        stored.len()
    ))
}

/// Left-sparse matrix product; the levelwise models are mostly zeros.
fn sparse_mul(a: &Matrix<Q>, b: &Matrix<Q>) -> Matrix<Q> {
    assert_eq!(a.cols, b.rows, "composition shape");
    let mut out: Matrix<Q> = Matrix::zero(a.rows, b.cols);
    for i in 0..a.rows {
        for k in 0..a.cols {
            let aik = &a[(i, k)];
            if aik.is_zero() {
                continue;
            }
            for j in 0..b.cols {
                let bkj = &b[(k, j)];
                if bkj.is_zero() {
                    continue;
                }
                out[(i, j)] = out[(i, j)].clone() + aik.clone() * bkj.clone();
            }
        }
    }
    out
}

fn simplicial_identities(e: &ChainComplex<Q>, levels: usize) -> Result<usize, String> {
    let mut checked = 0;
    for n in 2..=levels {
        for j in 1..=n {
            for i in 0..j {
                let lhs = sparse_mul(&dk_face_matrix(e, n - 1, i), &dk_face_matrix(e, n, j));
                let rhs = sparse_mul(&dk_face_matrix(e, n - 1, j - 1), &dk_face_matrix(e, n, i));
                if lhs != rhs {
                    return Err(format!("face identity d_{i} d_{j} fails at level {n}"));
                }
                checked += 1;
            }
        }
    }
    for n in 0..levels {
        if n + 2 <= levels {
            for j in 0..=n {
                for i in 0..=j {
                    let lhs = sparse_mul(
                        &dk_degeneracy_matrix(e, n + 1, i),
                        &dk_degeneracy_matrix(e, n, j),
                    );
                    let rhs = sparse_mul(
                        &dk_degeneracy_matrix(e, n + 1, j + 1),
                        &dk_degeneracy_matrix(e, n, i),
                    );
                    if lhs != rhs {
                        return Err(format!("degeneracy identity s_{i} s_{j} fails at level {n}"));
                    }
                    checked += 1;
                }
            }
        }
        let dim_n = DKLevelBasis::new(&e.ranks, n).dim();
        for j in 0..=n {
            for i in 0..=n + 1 {
                let got = sparse_mul(&dk_face_matrix(e, n + 1, i), &dk_degeneracy_matrix(e, n, j));
                let expect = if i == j || i == j + 1 {
                    Matrix::identity(dim_n)
                } else if i < j {
                    sparse_mul(&dk_degeneracy_matrix(e, n - 1, j - 1), &dk_face_matrix(e, n, i))
                } else {
                    sparse_mul(&dk_degeneracy_matrix(e, n - 1, j), &dk_face_matrix(e, n, i - 1))
                };
                if got != expect {
                    return Err(format!("mixed identity d_{i} s_{j} fails at level {n}"));
                }
                checked += 1;
            }
        }
    }
    Ok(checked)
}

fn moore_complex_matches(e: &ChainComplex<Q>, levels: usize) -> Result<(), String> {
    for n in 1..=levels {
        let basis = DKLevelBasis::new(&e.ranks, n);
        let full: Vec<usize> = (1..=n).collect();
        let positions: Vec<usize> = basis
            .elems
            .iter()
            .enumerate()
            .filter(|(_, el)| el.alpha == full)
            .map(|(t, _)| t)
            .collect();
        let r_n = e.rank(n);
        if positions.len() != r_n {
            return Err(format!(
                "level {n} has {} fully supported elements, the complex has rank {r_n}",
                positions.len()
            ));
        }
        let lower = DKLevelBasis::new(&e.ranks, n - 1);
        let full_low: Vec<usize> = (1..n).collect();
        let lower_pos: Vec<usize> = lower
            .elems
            .iter()
            .enumerate()
            .filter(|(_, el)| el.alpha == full_low)
            .map(|(t, _)| t)
            .collect();
        for (lab, &t) in positions.iter().enumerate() {
            let mut u = vec![Q::zero(); basis.dim()];
            u[t] = Q::one();
            for i in 1..=n {
                let v = dk_face_matrix(e, n, i).apply(&u);
                if v.iter().any(|c| !c.is_zero()) {
                    return Err(format!(
                        "face {i} does not kill the normalized element {lab} at level {n}"
                    ));
                }
            }
            let v0 = dk_face_matrix(e, n, 0).apply(&u);
            for (s, c) in v0.iter().enumerate() {
                if !c.is_zero() && !lower_pos.contains(&s) {
                    return Err(format!(
                        "the zeroth face leaks outside the normalized part at level {n}"
                    ));
                }
            }
            for (low_lab, &s) in lower_pos.iter().enumerate() {
                let expect = &e.boundary[n - 1][(low_lab, lab)];
                if &v0[s] != expect {
                    return Err(format!(
                        "normalized differential at level {n} gives {} in slot {low_lab}, \
                         the complex stores {expect}",
                        v0[s]
                    ));
                }
            }
        }
    }
    Ok(())
}

fn dold_kan_roundtrip(_fixtures: &Path) -> Result<String, Failure> {
    let mut rng = ChaCha8Rng::seed_from_u64(0x5eed_0006);
    let mut jobs: Vec<(ChainComplex<Q>, usize)> = Vec::new();
    for r1 in 0..=3usize {
        jobs.push((random_chain_complex(&mut rng, &[0, r1]), 4));
        for r2 in 0..=3usize {
            jobs.push((random_chain_complex(&mut rng, &[0, r1, r2]), 4));
            for r3 in 0..=3usize {
                jobs.push((random_chain_complex(&mut rng, &[0, r1, r2, r3]), 4));
            }
        }
    }
    for _ in 0..3 {
        let ranks: Vec<usize> = std::iter::once(0)
            .chain((0..4).map(|_| rng.gen_range(0..=3)))
            .collect();
        jobs.push((random_chain_complex(&mut rng, &ranks), 5));
    }
    for _ in 0..3 {
        let ranks: Vec<usize> = std::iter::once(0)
            .chain((0..5).map(|_| rng.gen_range(0..=3)))
            .collect();
        jobs.push((random_chain_complex(&mut rng, &ranks), 5));
    }
    let complexes = jobs.len();
    let results = sd_core::par::par_map(jobs, |(e, levels)| -> Result<usize, String> {
        let n = simplicial_identities(&e, levels)
            .map_err(|m| format!("ranks {:?}: {m}", e.ranks))?;
        moore_complex_matches(&e, levels).map_err(|m| format!("ranks {:?}: {m}", e.ranks))?;
        Ok(n)
    });
    let mut identities = 0;
    for r in results {
        identities += r.map_err(chk)?;
    }
    Ok(format!(
        "{identities} simplicial identities and the normalization round trip hold on {complexes} complexes"
    ))
}

fn interchange_counit(_fixtures: &Path) -> Result<String, Failure> {
    let corpus = standard_dga_corpus::<Q>();
    let mut members = 0;
    let mut tensor_pairs = 0;
    for (name, y) in &corpus {
        let rep = counit_check(y).map_err(|e| chk(format!("{name}: {e}")))?;
        if !rep.ok() {
            return Err(chk(format!(
                "{name}: counit fails (infinitesimal {}, dims {}, algebra {})",
                rep.infinitesimal, rep.dims_match, rep.algebra_iso
            )));
        }
        members += 1;
        let c = y.complex();
        for n in 0..=y.max_degree() {
            for p in 0..=n {
                let qd = n - p;
                for f in 0..c.rank(p) {
                    for g in 0..c.rank(qd) {
                        let t = aw(c, p, qd, f, g);
                        let got = sh(c, n, &t);
                        let expect = BTreeMap::from([((p, f, g), Q::one())]);
                        if got != expect {
                            return Err(chk(format!(
                                "{name}: shuffle fails to retract the embedding at ({p},{qd},{f},{g})"
                            )));
                        }
                        tensor_pairs += 1;
                    }
                }
            }
        }
    }

    let x = odd_line_model::<Q>(5);
    x.validate().map_err(chk)?;
    let nc = cosimplicial_normalize(&x).map_err(chk)?;
    for n in 0..=5usize {
        let pi = odd_line_full_monomial(&x, n);
        let inc = odd_line_increment_product(&x, n);
        for i in 0..=n {
            let mut eps = vec![Q::zero(); x.level(n).dim];
            eps[1 << i] = Q::one();
            if x.level(n).mul_vec(&eps, &inc) != pi {
                return Err(chk(format!(
                    "coordinate {i} times the increment product is not the full monomial at level {n}"
                )));
            }
        }
        if n >= 1 {
            let prev = odd_line_full_monomial(&x, n - 1);
            if x.delta_matrix(n - 1).apply(&prev) != inc {
                return Err(chk(format!(
                    "coboundary of the level-{} full monomial is not the increment product",
                    n - 1
                )));
            }
        }
    }
    let inc_n = |n: usize| nc.express(n, &odd_line_increment_product(&x, n));
    let pi_n = |n: usize| nc.express(n, &odd_line_full_monomial(&x, n));
    for p in 0..=5usize {
        for qd in 0..=5 - p {
            let got = nc
                .cup(&x, p, qd, &inc_n(p).map_err(chk)?, &inc_n(qd).map_err(chk)?)
                .map_err(chk)?;
            if got != inc_n(p + qd).map_err(chk)? {
                return Err(chk(format!("increment cup fails at ({p},{qd})")));
            }
            let tops = nc
                .cup(&x, p, qd, &pi_n(p).map_err(chk)?, &pi_n(qd).map_err(chk)?)
                .map_err(chk)?;
            if tops.iter().any(|c| !c.is_zero()) {
                return Err(chk(format!("full-monomial cup is nonzero at ({p},{qd})")));
            }
        }
    }
    Ok(format!(
        "counit is an isomorphism on {members} corpus members; shuffle retracts {tensor_pairs} tensors; \
         odd-line identities hold through level 5"
    ))
}

fn unravel_signs(_fixtures: &Path) -> Result<String, Failure> {
    let mut cases: Vec<(LabeledBlockSequence, usize)> = Vec::new();
    for n in 1..=6usize {
        for part in set_partitions(n) {
            let b = part.len();
            for code in 0..3usize.pow(b as u32) {
                let mut c = code;
                let seq: LabeledBlockSequence = part
                    .iter()
                    .map(|blk| {
                        let l = (c % 3) as Label;
                        c /= 3;
                        (blk.clone(), l)
                    })
                    .collect();
                cases.push((seq, n));
            }
        }
    }
    let total = cases.len();
    let results = sd_core::par::par_map(cases, |(seq, n)| -> Result<(), String> {
        let fast = unravel(&seq, n).map_err(|e| e.to_string())?;
        let slow = brute_unravel_sign(&seq, n)?;
        if fast != slow {
            return Err(format!(
                "unraveling disagrees on {seq:?}: {fast:?} vs {slow:?}"
            ));
        }
        Ok(())
    });
    for r in results {
        r.map_err(chk)?;
    }
    Ok(format!(
        "fast and brute-force unraveling agree on all {total} labeled partitions with n <= 6, 3 labels"
    ))
}

fn vanest_comparison(_fixtures: &Path) -> Result<String, Failure> {
    let mut ranks_seen = Vec::new();
    for m in [1usize, 2] {
        let law = bch_order2(&abelian_constants(m), 4).map_err(chk)?;
        let p = nerve_from_group_law(&law, 3).map_err(chk)?;
        let cmp = vanest_compare(&p, 2, 4).map_err(chk)?;
        if !cmp.all_iso() {
            let bad = cmp
                .slots
                .iter()
                .find(|s| !s.iso)
                .expect("all_iso is false, a slot fails");
            return Err(chk(format!(
                "slot (degree {}, weight {}) is not an isomorphism for rank {m}: \
                 cochain {}, dual {}, induced {}",
                bad.degree, bad.weight, bad.cochain_rank, bad.ce_rank, bad.induced_rank
            )));
        }
        let expected = [1, m, m * (m - 1) / 2];
        for k in 0..=2usize {
            let total: usize = cmp
                .slots
                .iter()
                .filter(|s| s.degree == k)
                .map(|s| s.cochain_rank)
                .sum();
            if total != expected[k] {
                return Err(chk(format!(
                    "rank {m}: degree-{k} classes total {total}, expected {}",
                    expected[k]
                )));
            }
            ranks_seen.push(total);
        }
    }
    Ok(format!(
        "all weight slices through 4 are isomorphisms for ranks 1 and 2; totals per degree {ranks_seen:?}"
    ))
}

fn weil_extension_counts(_fixtures: &Path) -> Result<String, Failure> {
    let mut counted = 0;
    for m in 1..=3usize {
        let law = bch_order2(&abelian_constants(m), 2).map_err(chk)?;
        let p = nerve_from_group_law(&law, 2).map_err(chk)?;
        let ce = ce_algebra(&p, 1).map_err(chk)?;
        let w = weil_extension(&ce).map_err(chk)?;
        weil_checks(&w).map_err(chk)?;
        for dp in 0..=4usize {
            for dq in 0..=4 - dp {
                let got = weil_bidegree_dimension(&ce.ranks, dp, dq);
                let expect = if dp >= dq {
                    binomial(m, dp - dq) * binomial(m + dq - 1, dq)
                } else {
                    0
                };
                if got != expect {
                    return Err(chk(format!(
                        "rank {m}: bidegree ({dp},{dq}) has {got} monomials, expected {expect}"
                    )));
                }
                counted += 1;
            }
        }
    }
    Ok(format!(
        "both differentials certified and {counted} bidegree counts match the exterior-symmetric model"
    ))
}
