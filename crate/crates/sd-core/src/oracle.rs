//! Independently computed reference data: polynomial group laws and their
//! nerves, truncated BCH multiplication, commutator constants read off
//! matrix algebras, linear towers built from chain complexes, a brute-force
//! unraveler, relation-span coranks, and seeded random generators for all of
//! them. Everything here is deliberately pedestrian; the point is that none
//! of it shares code with the differentiation pipeline it checks.

use crate::dold_kan::{dk_face_matrix, ChainComplex, DKLevelBasis};
use crate::differentiate::{FramedPresentation, PullbackTable};
use crate::matrix::{Matrix, Quotient};
use crate::poly::{GeneratorId, GradedPolynomial, Monomial};
use crate::scalar::Scalar;
use crate::simplex::{
    classify_sequence, set_partitions, Classification, IndexSubset, Label,
    LabeledBlockSequence, Unraveled,
};
use crate::{q, Q};
use rand::Rng;
use std::collections::BTreeMap;

/// A polynomial group law on affine space, written in the variables
/// `x0..`, `y0..` (slots 0 and 1), truncated in total weight.
#[derive(Clone, Debug)]
pub struct GroupLaw<S> {
    pub dim: usize,
    pub components: Vec<GradedPolynomial<S>>,
    pub truncation: u32,
}

fn slot_vars<S: Scalar>(slot: u8, dim: usize, trunc: u32) -> Vec<GradedPolynomial<S>> {
    (0..dim)
        .map(|c| GradedPolynomial::generator(GeneratorId::var(slot, c as u32), Some(trunc)))
        .collect()
}

/// Substitute vectors for the slot-0 and slot-1 variables of `f`.
fn subst_xy<S: Scalar>(
    f: &GradedPolynomial<S>,
    u: &[GradedPolynomial<S>],
    v: &[GradedPolynomial<S>],
    trunc: u32,
) -> Result<GradedPolynomial<S>, String> {
    let mut images = BTreeMap::new();
    for (c, img) in u.iter().enumerate() {
        images.insert(GeneratorId::var(0, c as u32), img.clone());
    }
    for (c, img) in v.iter().enumerate() {
        images.insert(GeneratorId::var(1, c as u32), img.clone());
    }
    f.substitute(&images, Some(trunc)).map_err(|e| e.to_string())
}

impl<S: Scalar> GroupLaw<S> {
    /// Evaluate the law on two argument vectors.
    pub fn apply(
        &self,
        u: &[GradedPolynomial<S>],
        v: &[GradedPolynomial<S>],
    ) -> Result<Vec<GradedPolynomial<S>>, String> {
        if u.len() != self.dim || v.len() != self.dim {
            return Err("argument dimension mismatch".into());
        }
        self.components
            .iter()
            .map(|f| subst_xy(f, u, v, self.truncation))
            .collect()
    }

    /// Unit laws and associativity, all as polynomial identities modulo the
    /// truncation weight.
    pub fn validate(&self) -> Result<(), String> {
        let t = self.truncation;
        let x = slot_vars::<S>(0, self.dim, t);
        let y = slot_vars::<S>(1, self.dim, t);
        let z = slot_vars::<S>(2, self.dim, t);
        let zero: Vec<GradedPolynomial<S>> =
            vec![GradedPolynomial::zero(Some(t)); self.dim];
        let left_unit = self.apply(&zero, &y)?;
        let right_unit = self.apply(&x, &zero)?;
        for c in 0..self.dim {
            if left_unit[c] != y[c] {
                return Err(format!("left unit law fails in component {c}"));
            }
            if right_unit[c] != x[c] {
                return Err(format!("right unit law fails in component {c}"));
            }
        }
        let xy = self.apply(&x, &y)?;
        let yz = self.apply(&y, &z)?;
        let left = self.apply(&xy, &z)?;
        let right = self.apply(&x, &yz)?;
        for c in 0..self.dim {
            if left[c] != right[c] {
                return Err(format!(
                    "associativity fails in component {c}: {} vs {}",
                    left[c], right[c]
                ));
            }
        }
        Ok(())
    }
}

/// Antisymmetric structure constants `c[a][b][k]` of a bracket on a based
/// vector space.
#[derive(Clone, Debug)]
pub struct LieConstants<S> {
    pub dim: usize,
    pub c: Vec<Vec<Vec<S>>>,
}

impl<S: Scalar> LieConstants<S> {
    pub fn zero(dim: usize) -> Self {
        LieConstants {
            dim,
            c: vec![vec![vec![S::zero(); dim]; dim]; dim],
        }
    }

    pub fn validate(&self) -> Result<(), String> {
        let d = self.dim;
        for a in 0..d {
            for b in 0..d {
                for k in 0..d {
                    let anti = self.c[a][b][k].clone() + self.c[b][a][k].clone();
                    if anti != S::zero() {
                        return Err(format!("bracket not antisymmetric at [{a},{b}] -> {k}"));
                    }
                }
            }
        }
        for a in 0..d {
            for b in 0..d {
                for e in 0..d {
                    for k in 0..d {
                        let mut acc = S::zero();
                        for m in 0..d {
                            acc = acc
                                + self.c[a][b][m].clone() * self.c[m][e][k].clone()
                                + self.c[b][e][m].clone() * self.c[m][a][k].clone()
                                + self.c[e][a][m].clone() * self.c[m][b][k].clone();
                        }
                        if acc != S::zero() {
                            return Err(format!("Jacobi fails on ({a},{b},{e}) -> {k}"));
                        }
                    }
                }
            }
        }
        Ok(())
    }

    /// The bracket of two polynomial vectors in these constants.
    pub fn bracket(
        &self,
        u: &[GradedPolynomial<S>],
        v: &[GradedPolynomial<S>],
        trunc: u32,
    ) -> Vec<GradedPolynomial<S>> {
        let mut out = vec![GradedPolynomial::zero(Some(trunc)); self.dim];
        for a in 0..self.dim {
            for b in 0..self.dim {
                let prod = u[a].mul(&v[b]);
                for k in 0..self.dim {
                    if self.c[a][b][k] != S::zero() {
                        out[k] = out[k].add(&prod.scale(&self.c[a][b][k]));
                    }
                }
            }
        }
        out
    }
}

/// The order-two BCH law of a bracket: `x + y + [x, y]/2`. Exact for
/// two-step nilpotent constants; otherwise associative only below weight 3,
/// so callers must truncate accordingly.
pub fn bch_order2<S: Scalar>(k: &LieConstants<S>, truncation: u32) -> Result<GroupLaw<S>, String> {
    k.validate()?;
    let x = slot_vars::<S>(0, k.dim, truncation);
    let y = slot_vars::<S>(1, k.dim, truncation);
    let br = k.bracket(&x, &y, truncation);
    let half = S::from_int(1) / S::from_int(2);
    let components = (0..k.dim)
        .map(|c| x[c].add(&y[c]).add(&br[c].scale(&half)))
        .collect();
    Ok(GroupLaw {
        dim: k.dim,
        components,
        truncation,
    })
}

/// Solve `m(x, i(x)) = 0` for `i` by weight-by-weight fixed-point iteration.
pub fn formal_inverse<S: Scalar>(law: &GroupLaw<S>) -> Result<Vec<GradedPolynomial<S>>, String> {
    let t = law.truncation;
    let x = slot_vars::<S>(0, law.dim, t);
    let mut inv: Vec<GradedPolynomial<S>> = x.iter().map(|g| g.neg()).collect();
    for _ in 0..=t {
        let m = law.apply(&x, &inv)?;
        inv = (0..law.dim).map(|c| inv[c].sub(&m[c])).collect();
    }
    let residue = law.apply(&x, &inv)?;
    for (c, r) in residue.iter().enumerate() {
        if !r.is_zero() {
            return Err(format!("inverse iteration did not converge in component {c}: {r}"));
        }
    }
    Ok(inv)
}

/// The nerve of a group law in increment coordinates. Chains are composed
/// left to right: the running products are `p_t = m(p_{t-1}, g_t)`, the
/// level-n coordinates are the increments `y_t = p_t - p_{t-1}`, and the
/// zeroth face drops the first edge, so its pullback reads increments off
/// `m(i(p_1), p_{s+1}) - m(i(p_1), p_s)`.
pub fn nerve_from_group_law<S: Scalar>(
    law: &GroupLaw<S>,
    levels: usize,
) -> Result<FramedPresentation<S>, String> {
    law.validate()?;
    let t = law.truncation;
    let inv = formal_inverse(law)?;
    let tangent = ChainComplex::new(vec![0, law.dim], vec![Matrix::zero(0, law.dim)])?;
    let mut tables = Vec::new();
    for n in 1..=levels {
        let mut table: PullbackTable<S> = BTreeMap::new();
        // Running products in the level-n increment coordinates.
        let mut partial: Vec<Vec<GradedPolynomial<S>>> = Vec::with_capacity(n + 1);
        partial.push(vec![GradedPolynomial::zero(Some(t)); law.dim]);
        for s in 1..=n {
            let y_s: Vec<GradedPolynomial<S>> = (0..law.dim)
                .map(|c| {
                    GradedPolynomial::generator(
                        GeneratorId::coord(vec![s], c as u32, false),
                        Some(t),
                    )
                })
                .collect();
            // The law in increment frame is exactly additive along the
            // chain: p_s = p_{s-1} + y_s.
            let prev = partial.last().unwrap();
            partial.push((0..law.dim).map(|c| prev[c].add(&y_s[c])).collect());
        }
        let inv_p1: Vec<GradedPolynomial<S>> = {
            let mut images = BTreeMap::new();
            for c in 0..law.dim {
                images.insert(GeneratorId::var(0, c as u32), partial[1][c].clone());
            }
            inv.iter()
                .map(|f| f.substitute(&images, Some(t)).map_err(|e| e.to_string()))
                .collect::<Result<_, _>>()?
        };
        for s in 1..n {
            let hi = law.apply(&inv_p1, &partial[s + 1])?;
            let lo = law.apply(&inv_p1, &partial[s])?;
            for c in 0..law.dim {
                table.insert((vec![s], c as u32), hi[c].sub(&lo[c]));
            }
        }
        tables.push(table);
    }
    FramedPresentation::new(tangent, t, tables, false)
}

/// Constants of the additive group: everything brackets to zero.
pub fn abelian_constants(dim: usize) -> LieConstants<Q> {
    LieConstants::zero(dim)
}

/// Strictly upper triangular 3x3 matrices: `E12`, `E23`, `E13`.
pub fn heisenberg_matrix_basis() -> Vec<Matrix<Q>> {
    let mut e12 = Matrix::zero(3, 3);
    e12[(0, 1)] = q(1, 1);
    let mut e23 = Matrix::zero(3, 3);
    e23[(1, 2)] = q(1, 1);
    let mut e13 = Matrix::zero(3, 3);
    e13[(0, 2)] = q(1, 1);
    vec![e12, e23, e13]
}

/// Cross-product constants on three-space.
pub fn so3_constants() -> LieConstants<Q> {
    let mut k = LieConstants::zero(3);
    for (a, b, c) in [(0, 1, 2), (1, 2, 0), (2, 0, 1)] {
        k.c[a][b][c] = q(1, 1);
        k.c[b][a][c] = q(-1, 1);
    }
    k
}

/// Structure constants of a list of square matrices under the commutator,
/// solved by exact linear algebra; errors when a commutator leaves the span.
pub fn commutator_constants<S: Scalar>(basis: &[Matrix<S>]) -> Result<LieConstants<S>, String> {
    let m = basis.len();
    if m == 0 {
        return Ok(LieConstants::zero(0));
    }
    let r = basis[0].rows;
    for x in basis {
        if x.rows != r || x.cols != r {
            return Err("basis matrices must be square and equally sized".into());
        }
    }
    let mut span = Matrix::zero(r * r, m);
    for (j, x) in basis.iter().enumerate() {
        for i in 0..r {
            for l in 0..r {
                span[(i * r + l, j)] = x[(i, l)].clone();
            }
        }
    }
    let mut k = LieConstants::zero(m);
    for a in 0..m {
        for b in 0..m {
            let comm = basis[a].mul(&basis[b]).sub(&basis[b].mul(&basis[a]));
            let mut rhs = Matrix::zero(r * r, 1);
            for i in 0..r {
                for l in 0..r {
                    rhs[(i * r + l, 0)] = comm[(i, l)].clone();
                }
            }
            let sol = span
                .solve(&rhs)
                .ok_or_else(|| format!("commutator [{a},{b}] is not in the span"))?;
            for out in 0..m {
                k.c[a][b][out] = sol[(out, 0)].clone();
            }
        }
    }
    k.validate()?;
    Ok(k)
}

/// Linear tower of a chain complex: the zeroth-face table is the transpose
/// of the corresponding Dold-Kan face matrix, so this reuses none of the
/// cochain pullback code.
pub fn tower_from_complex<S: Scalar>(
    e: &ChainComplex<S>,
    truncation: u32,
    levels: usize,
) -> Result<FramedPresentation<S>, String> {
    if e.rank(0) != 0 {
        return Err("tower needs a complex vanishing in degree 0".into());
    }
    let mut tables = Vec::new();
    for n in 1..=levels {
        let lower = DKLevelBasis::new(&e.ranks, n - 1);
        let upper = DKLevelBasis::new(&e.ranks, n);
        let face = dk_face_matrix(e, n, 0);
        let mut table: PullbackTable<S> = BTreeMap::new();
        for (row, elem) in lower.elems.iter().enumerate() {
            let mut poly = GradedPolynomial::zero(Some(truncation));
            for (col, target) in upper.elems.iter().enumerate() {
                let coeff = face[(row, col)].clone();
                if coeff != S::zero() {
                    poly.add_term(
                        Monomial::generator(GeneratorId::coord(
                            target.alpha.clone(),
                            target.label as u32,
                            false,
                        )),
                        coeff,
                    );
                }
            }
            table.insert((elem.alpha.clone(), elem.label as u32), poly);
        }
        tables.push(table);
    }
    FramedPresentation::new(e.clone(), truncation, tables, false)
}

/// Unravel a labeled partition by brute-force search over all transposition
/// rewrites, tracking signs; a sign conflict anywhere in the orbit makes the
/// class zero. Exponential in n, for cross-checking only.
pub fn brute_unravel_sign(
    seq: &LabeledBlockSequence,
    n: usize,
) -> Result<Unraveled, String> {
    if classify_sequence(seq, n) != Classification::Partition {
        return Err("not a partition".into());
    }
    assert!(n <= 8, "brute-force unraveling is exponential; keep n small");
    type State = Vec<(IndexSubset, Label)>;
    let norm = |mut s: State| -> State {
        for (b, _) in s.iter_mut() {
            b.sort_unstable();
        }
        s.sort();
        s
    };
    let start = norm(seq.clone());
    let mut signs: BTreeMap<State, i8> = BTreeMap::new();
    signs.insert(start.clone(), 1);
    let mut queue = vec![start];
    while let Some(st) = queue.pop() {
        let s0 = signs[&st];
        for j in 1..n {
            let bi = st.iter().position(|(b, _)| b.contains(&j)).unwrap();
            let bj = st.iter().position(|(b, _)| b.contains(&(j + 1))).unwrap();
            if bi == bj {
                continue;
            }
            let mut next = st.clone();
            for (b, _) in next.iter_mut() {
                for a in b.iter_mut() {
                    if *a == j {
                        *a = j + 1;
                    } else if *a == j + 1 {
                        *a = j;
                    }
                }
            }
            let next = norm(next);
            match signs.get(&next) {
                Some(&s) if s != -s0 => return Ok(Unraveled::Zero),
                Some(_) => {}
                None => {
                    signs.insert(next.clone(), -s0);
                    queue.push(next);
                }
            }
        }
    }
    for (st, sign) in &signs {
        if !crate::simplex::is_canonical_partition_shape(st) {
            continue;
        }
        let labels_sorted = {
            let mut ok = true;
            let mut i = 0;
            while i < st.len() {
                let k = st[i].0.len();
                let mut j = i;
                while j < st.len() && st[j].0.len() == k {
                    j += 1;
                }
                if st[i..j].windows(2).any(|w| w[0].1 > w[1].1) {
                    ok = false;
                }
                i = j;
            }
            ok
        };
        if labels_sorted {
            return Ok(Unraveled::Canonical {
                seq: st.clone(),
                sign: *sign,
            });
        }
    }
    unreachable!("every orbit without sign conflicts contains the canonical state")
}

/// Dimension left of the covering span after the transposition relations:
/// basis vectors are labeled set partitions of `{1, .., n}`, and each
/// transposition across two blocks identifies a pair up to sign.
pub fn relation_span_corank(n: usize, ranks: &[usize]) -> usize {
    type State = Vec<(IndexSubset, Label)>;
    let rank_of = |k: usize| ranks.get(k).copied().unwrap_or(0);
    let mut states: Vec<State> = Vec::new();
    for blocks in set_partitions(n) {
        if blocks.iter().any(|b| rank_of(b.len()) == 0) {
            continue;
        }
        let mut labelings: Vec<Vec<Label>> = vec![vec![]];
        for b in &blocks {
            let mut next = Vec::new();
            for base in &labelings {
                for l in 0..rank_of(b.len()) as Label {
                    let mut v = base.clone();
                    v.push(l);
                    next.push(v);
                }
            }
            labelings = next;
        }
        for labels in labelings {
            let mut st: State = blocks.iter().cloned().zip(labels).collect();
            st.sort();
            states.push(st);
        }
    }
    states.sort();
    states.dedup();
    let index: BTreeMap<State, usize> = states
        .iter()
        .cloned()
        .enumerate()
        .map(|(i, s)| (s, i))
        .collect();
    let mut rows: Vec<Vec<Q>> = Vec::new();
    for (st, &i) in &index {
        for j in 1..n {
            let bi = st.iter().position(|(b, _)| b.contains(&j)).unwrap();
            let bj = st.iter().position(|(b, _)| b.contains(&(j + 1))).unwrap();
            if bi == bj {
                continue;
            }
            let mut next = st.clone();
            for (b, _) in next.iter_mut() {
                for a in b.iter_mut() {
                    if *a == j {
                        *a = j + 1;
                    } else if *a == j + 1 {
                        *a = j;
                    }
                }
                b.sort_unstable();
            }
            next.sort();
            let t = index[&next];
            let mut row = vec![q(0, 1); states.len()];
            row[i] = row[i].clone() + q(1, 1);
            row[t] = row[t].clone() + q(1, 1);
            rows.push(row);
        }
    }
    if rows.is_empty() {
        return states.len();
    }
    let m = Matrix::from_rows(rows);
    states.len() - m.rank()
}

/// A random chain complex with exact `boundary . boundary = 0`, built by
/// factoring each lower boundary through the cokernel of the one above.
pub fn random_chain_complex<R: Rng>(rng: &mut R, ranks: &[usize]) -> ChainComplex<Q> {
    assert!(ranks.len() >= 2 && ranks[0] == 0);
    let top = ranks.len() - 1;
    let mut boundary: Vec<Matrix<Q>> = vec![Matrix::zero(0, 0); top];
    let rand_entry = |rng: &mut R| q(rng.gen_range(-2..=2), 1);
    boundary[top - 1] = {
        let mut m = Matrix::zero(ranks[top - 1], ranks[top]);
        for i in 0..m.rows {
            for j in 0..m.cols {
                m[(i, j)] = rand_entry(rng);
            }
        }
        m
    };
    for k in (1..top).rev() {
        // boundary[k-1] : degree k -> degree k-1 must kill the image of
        // boundary[k]; compose a random matrix with the quotient projection.
        let image: Vec<Vec<Q>> = (0..ranks[k + 1])
            .map(|j| boundary[k].col(j))
            .collect();
        let quot = Quotient::by_span(ranks[k], &image);
        let qdim = quot.quotient_dim();
        let mut proj = Matrix::zero(qdim, ranks[k]);
        for j in 0..ranks[k] {
            let mut e = vec![q(0, 1); ranks[k]];
            e[j] = q(1, 1);
            for (i, v) in quot.coset_coords(&e).into_iter().enumerate() {
                proj[(i, j)] = v;
            }
        }
        let mut r = Matrix::zero(ranks[k - 1], qdim);
        for i in 0..r.rows {
            for j in 0..r.cols {
                r[(i, j)] = rand_entry(rng);
            }
        }
        boundary[k - 1] = r.mul(&proj);
    }
    ChainComplex::new(ranks.to_vec(), boundary).expect("construction forces exactness")
}

/// Random two-step nilpotent constants: `v` generators bracketing into `z`
/// central directions. Jacobi is automatic.
pub fn random_two_step_constants<R: Rng>(rng: &mut R, v: usize, z: usize) -> LieConstants<Q> {
    let dim = v + z;
    let mut k = LieConstants::zero(dim);
    for a in 0..v {
        for b in a + 1..v {
            for c in 0..z {
                let val = q(rng.gen_range(-2..=2), 1);
                k.c[a][b][v + c] = val.clone();
                k.c[b][a][v + c] = -val;
            }
        }
    }
    k
}

/// A random formal change of coordinates fixing the origin with identity
/// linear part, and the abelian law conjugated by it. The result is a valid
/// group law with genuinely nonlinear structure maps.
pub fn random_conjugated_abelian_law<R: Rng>(
    rng: &mut R,
    dim: usize,
    truncation: u32,
) -> GroupLaw<Q> {
    let t = truncation;
    let x = slot_vars::<Q>(0, dim, t);
    // F = id + sparse higher terms.
    let mut f: Vec<GradedPolynomial<Q>> = x.clone();
    for c in 0..dim {
        for w in 2..=t {
            for _ in 0..2 {
                if rng.gen_bool(0.5) {
                    continue;
                }
                let mut powers: BTreeMap<GeneratorId, u32> = BTreeMap::new();
                for _ in 0..w {
                    let pick = rng.gen_range(0..dim) as u32;
                    *powers.entry(GeneratorId::var(0, pick)).or_insert(0) += 1;
                }
                let mono = Monomial::from_factors(powers.into_iter().collect())
                    .expect("even variables never collide");
                let coeff = q(rng.gen_range(-2..=2), rng.gen_range(1..=2));
                f[c].add_term(mono, coeff);
            }
        }
    }
    // G with F(G) = id, weight by weight.
    let mut g: Vec<GradedPolynomial<Q>> = x.clone();
    for _ in 0..=t {
        let fg = compose_slot0(&f, &g, t);
        g = (0..dim)
            .map(|c| g[c].clone().sub(&fg[c]).add(&x[c]))
            .collect();
    }
    let fg = compose_slot0(&f, &g, t);
    for c in 0..dim {
        assert_eq!(fg[c], x[c], "coordinate change failed to invert");
    }
    // m(x, y) = F(G(x) + G(y)).
    let y = slot_vars::<Q>(1, dim, t);
    let gx = compose_slot0(&g, &x, t);
    let gy = compose_slot0(&g, &y, t);
    let sum: Vec<GradedPolynomial<Q>> =
        (0..dim).map(|c| gx[c].add(&gy[c])).collect();
    let components = compose_slot0(&f, &sum, t);
    GroupLaw {
        dim,
        components,
        truncation: t,
    }
}

fn compose_slot0<S: Scalar>(
    f: &[GradedPolynomial<S>],
    args: &[GradedPolynomial<S>],
    trunc: u32,
) -> Vec<GradedPolynomial<S>> {
    let mut images = BTreeMap::new();
    for (c, a) in args.iter().enumerate() {
        images.insert(GeneratorId::var(0, c as u32), a.clone());
    }
    f.iter()
        .map(|p| {
            p.substitute(&images, Some(trunc))
                .expect("slot-0 composition is total")
        })
        .collect()
}

/// A random normalized cochain at one level: a small sum of labeled
/// partition monomials, coefficients from a fixed rational pool.
pub fn random_normalized_cochain<R: Rng>(
    rng: &mut R,
    p: &FramedPresentation<Q>,
    level: usize,
) -> crate::cochain::Cochain<Q> {
    let pool = [q(1, 1), q(-1, 1), q(2, 1), q(-1, 2), q(3, 1)];
    let parts: Vec<Vec<IndexSubset>> = set_partitions(level)
        .into_iter()
        .filter(|blocks| blocks.iter().all(|b| p.rank(b.len()) > 0))
        .collect();
    let mut value = GradedPolynomial::zero(Some(p.truncation()));
    if parts.is_empty() {
        return crate::cochain::Cochain::new(level, value);
    }
    for _ in 0..rng.gen_range(1..=3) {
        let blocks = &parts[rng.gen_range(0..parts.len())];
        let mut factors: Vec<(GeneratorId, u32)> = Vec::new();
        let mut dead = false;
        for b in blocks {
            let label = rng.gen_range(0..p.rank(b.len())) as u32;
            let g = GeneratorId::coord(b.clone(), label, p.superized());
            if factors.iter().any(|(h, _)| *h == g) {
                dead = true;
                break;
            }
            factors.push((g, 1));
        }
        if dead {
            continue;
        }
        let mono = Monomial::from_factors(factors).expect("distinct blocks");
        value.add_term(mono, pool[rng.gen_range(0..pool.len())].clone());
    }
    crate::cochain::Cochain::new(level, value)
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn abelian_law_and_inverse() {
        let law = bch_order2(&abelian_constants(2), 4).unwrap();
        law.validate().unwrap();
        let inv = formal_inverse(&law).unwrap();
        let x = slot_vars::<Q>(0, 2, 4);
        for c in 0..2 {
            assert_eq!(inv[c], x[c].neg());
        }
    }

    #[test]
    fn two_step_bch_is_associative_at_any_truncation() {
        let k = commutator_constants(&heisenberg_matrix_basis()).unwrap();
        assert_eq!(k.c[0][1][2], q(1, 1));
        assert_eq!(k.c[1][0][2], q(-1, 1));
        assert_eq!(k.c[0][2][1], q(0, 1));
        let law = bch_order2(&k, 4).unwrap();
        law.validate().unwrap();
        let inv = formal_inverse(&law).unwrap();
        let x = slot_vars::<Q>(0, 3, 4);
        for c in 0..3 {
            assert_eq!(inv[c], x[c].neg());
        }
    }

    #[test]
    fn cross_product_law_associates_below_weight_three() {
        let k = so3_constants();
        k.validate().unwrap();
        let law = bch_order2(&k, 2).unwrap();
        law.validate().unwrap();
        // At truncation 3 the order-2 law is visibly non-associative.
        let law3 = bch_order2(&k, 3).unwrap();
        assert!(law3.validate().is_err());
    }

    #[test]
    fn conjugated_abelian_laws_validate() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for _ in 0..5 {
            let law = random_conjugated_abelian_law(&mut rng, 2, 4);
            law.validate().unwrap();
        }
    }

    #[test]
    fn random_complexes_square_to_zero() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for ranks in [vec![0, 2, 2], vec![0, 1, 2, 1], vec![0, 2, 1, 2]] {
            for _ in 0..5 {
                let e = random_chain_complex(&mut rng, &ranks);
                assert_eq!(e.ranks, ranks);
            }
        }
    }

    #[test]
    fn brute_unraveler_matches_on_small_partitions() {
        // Exhaustive cross-check happens in the acceptance suite; this is a
        // smoke test on hand-picked cases.
        let cases: Vec<(LabeledBlockSequence, usize)> = vec![
            (vec![(vec![2], 0), (vec![1], 1)], 2),
            (vec![(vec![1], 0), (vec![2], 0)], 2),
            (vec![(vec![1, 3], 0), (vec![2], 0)], 3),
            (vec![(vec![2, 4], 1), (vec![1, 3], 0)], 4),
            (vec![(vec![1, 4], 0), (vec![2, 3], 0)], 4),
        ];
        for (seq, n) in cases {
            let fast = crate::simplex::unravel(&seq, n).unwrap();
            let slow = brute_unravel_sign(&seq, n).unwrap();
            assert_eq!(fast, slow, "disagreement on {seq:?}");
        }
    }

    #[test]
    fn relation_corank_matches_canonical_count() {
        for n in 1..=4usize {
            for ranks in [vec![0, 1], vec![0, 2], vec![0, 2, 1], vec![0, 1, 0, 1]] {
                let corank = relation_span_corank(n, &ranks);
                let canonical = crate::differentiate::canonical_ce_monomials(&ranks, n).len();
                assert_eq!(corank, canonical, "n={n}, ranks={ranks:?}");
            }
        }
    }
}
