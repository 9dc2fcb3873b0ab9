//! Differentiation of framed presentations.
//!
//! A framed presentation is a simplicial manifold in normal coordinates: all
//! positive faces and all degeneracies act linearly by the Dold-Kan formulas,
//! and the zeroth face is stored explicitly as a polynomial pullback table.
//! Differentiation turns such a presentation into a semi-free differential
//! graded algebra on the duals of the tangent complex. The generator
//! differential is computed along two independent routes and both must agree:
//! once by reading Taylor coefficients straight off the zeroth-face table,
//! once by pushing the tautological coordinate through the full simplicial
//! differential and reducing modulo the differentiating ideal.

use crate::cochain::{self, Cochain, ReducedClass};
use crate::dold_kan::{subsets_by_size, ChainComplex};
use crate::poly::{GenName, GeneratorId, GradedPolynomial, Monomial};
use crate::scalar::Scalar;
use crate::simplex::IndexSubset;
use std::collections::BTreeMap;

pub type CoordKey = (IndexSubset, u32);
pub type PullbackTable<S> = BTreeMap<CoordKey, GradedPolynomial<S>>;

/// Simplicial manifold in normal coordinates. `d0[m-1]` sends each level
/// `m-1` coordinate to its pullback along the zeroth face, a polynomial in
/// the level-`m` coordinates truncated at `truncation` total weight.
#[derive(Clone, Debug)]
pub struct FramedPresentation<S> {
    tangent: ChainComplex<S>,
    truncation: u32,
    d0: Vec<PullbackTable<S>>,
    superized: bool,
}

impl<S: Scalar> FramedPresentation<S> {
    pub fn new(
        tangent: ChainComplex<S>,
        truncation: u32,
        d0: Vec<PullbackTable<S>>,
        superized: bool,
    ) -> Result<Self, String> {
        if tangent.rank(0) != 0 {
            return Err("tangent complex must vanish in degree 0 (level 0 is a point)".into());
        }
        let mut p = FramedPresentation {
            tangent,
            truncation,
            d0,
            superized,
        };
        // Normalize stored polynomials to the declared truncation.
        for table in &mut p.d0 {
            for poly in table.values_mut() {
                *poly = poly.truncate_to(truncation);
            }
        }
        for m in 1..=p.d0.len() {
            let expected = p.coords(m - 1);
            let table = &p.d0[m - 1];
            if table.len() != expected.len() {
                return Err(format!(
                    "level {m} pullback table has {} entries, expected {}",
                    table.len(),
                    expected.len()
                ));
            }
            for key in &expected {
                let Some(poly) = table.get(key) else {
                    return Err(format!(
                        "level {m} pullback table is missing coordinate x{:?}:{}",
                        key.0, key.1
                    ));
                };
                for (mono, _) in poly.terms() {
                    for (g, _) in mono.factors() {
                        if !p.is_valid_coord(g, m) {
                            return Err(format!(
                                "pullback of x{:?}:{} mentions {g}, not a level-{m} coordinate",
                                key.0, key.1
                            ));
                        }
                    }
                }
            }
        }
        Ok(p)
    }

    pub fn tangent(&self) -> &ChainComplex<S> {
        &self.tangent
    }

    pub fn truncation(&self) -> u32 {
        self.truncation
    }

    pub fn superized(&self) -> bool {
        self.superized
    }

    /// Largest level whose zeroth face is stored.
    pub fn max_level(&self) -> usize {
        self.d0.len()
    }

    pub fn rank(&self, k: usize) -> usize {
        self.tangent.rank(k)
    }

    /// Coordinates of the level-`n` ring: nonempty subsets with labels below
    /// the tangent rank of the subset size, in (size, lex, label) order.
    pub fn coords(&self, n: usize) -> Vec<CoordKey> {
        let mut out = Vec::new();
        for alpha in subsets_by_size(n) {
            if alpha.is_empty() {
                continue;
            }
            for label in 0..self.rank(alpha.len()) {
                out.push((alpha.clone(), label as u32));
            }
        }
        out
    }

    pub fn coord_generator(&self, alpha: &IndexSubset, label: u32) -> GeneratorId {
        GeneratorId::coord(alpha.clone(), label, self.superized)
    }

    fn is_valid_coord(&self, g: &GeneratorId, level: usize) -> bool {
        match &g.name {
            GenName::Coord { alpha, label } => {
                !alpha.is_empty()
                    && alpha.iter().all(|&a| a >= 1 && a <= level)
                    && alpha.windows(2).all(|w| w[0] < w[1])
                    && (*label as usize) < self.rank(alpha.len())
                    && *g == self.coord_generator(alpha, *label)
            }
            _ => false,
        }
    }

    /// Pullback along the zeroth face of level `m`, for one level-`m-1`
    /// coordinate.
    pub fn d0_image(&self, m: usize, key: &CoordKey) -> Result<&GradedPolynomial<S>, String> {
        if m == 0 || m > self.d0.len() {
            return Err(format!(
                "no zeroth-face data for level {m} (stored through level {})",
                self.d0.len()
            ));
        }
        self.d0[m - 1]
            .get(key)
            .ok_or_else(|| format!("no pullback entry for x{:?}:{}", key.0, key.1))
    }
}

/// Check a presentation: boundary squares to zero, the zeroth-face table has
/// the required leading term, and every simplicial identity that involves the
/// zeroth face holds as a polynomial identity modulo the truncation.
pub fn validate_presentation<S: Scalar>(p: &FramedPresentation<S>) -> Result<(), String> {
    ChainComplex::new(p.tangent().ranks.clone(), p.tangent().boundary.clone())
        .map_err(|e| format!("tangent complex invalid: {e}"))?;

    let top = p.max_level();
    for m in 1..=top {
        for (alpha, label) in p.coords(m - 1) {
            let poly = p.d0_image(m, &(alpha.clone(), label))?;
            let lead: IndexSubset = alpha.iter().map(|&a| a + 1).collect();
            let lead_gen = Monomial::generator(p.coord_generator(&lead, label));
            let mut covered: IndexSubset = lead.clone();
            covered.insert(0, 1);
            for (mono, coeff) in poly.terms() {
                if *mono == lead_gen {
                    if *coeff != S::one() {
                        return Err(format!(
                            "pullback of x{alpha:?}:{label} at level {m} has leading \
                             coefficient {coeff}, want 1"
                        ));
                    }
                    continue;
                }
                let blocks = cochain::monomial_blocks(mono)?;
                let mut union: IndexSubset = blocks.iter().flat_map(|(b, _)| b.clone()).collect();
                union.sort_unstable();
                union.dedup();
                if !covered.iter().all(|a| union.binary_search(a).is_ok()) {
                    return Err(format!(
                        "pullback of x{alpha:?}:{label} at level {m} has stray term {mono} \
                         whose blocks do not cover {covered:?}"
                    ));
                }
            }
            if poly.coefficient(&lead_gen) != S::one() {
                return Err(format!(
                    "pullback of x{alpha:?}:{label} at level {m} is missing its leading term"
                ));
            }
        }
    }

    // d_0 d_j = d_{j-1} d_0 as maps from level n to level n-2, checked on
    // pullbacks of every level-(n-2) coordinate.
    for n in 2..=top {
        for j in 1..=n {
            for (alpha, label) in p.coords(n - 2) {
                let f = Cochain::coordinate(p, n - 2, &alpha, label);
                let lhs = cochain::face_pullback(&cochain::face_pullback(&f, 0, p)?, j, p)?;
                let rhs = cochain::face_pullback(&cochain::face_pullback(&f, j - 1, p)?, 0, p)?;
                if lhs.value != rhs.value {
                    return Err(format!(
                        "identity d_0 d_{j} = d_{} d_0 fails at level {n} on x{alpha:?}:{label}: \
                         {} vs {}",
                        j - 1,
                        lhs.value,
                        rhs.value
                    ));
                }
            }
        }
    }

    // d_0 s_j = s_{j-1} d_0 (j >= 1) and d_0 s_0 = id as maps from level n to
    // level n, checked on pullbacks of every level-n coordinate.
    for n in 1..top {
        for (alpha, label) in p.coords(n) {
            let f = Cochain::coordinate(p, n, &alpha, label);
            let up = cochain::face_pullback(&f, 0, p)?;
            let back = cochain::degeneracy_pullback(&up, 0);
            if back.value != f.value {
                return Err(format!(
                    "identity d_0 s_0 = id fails at level {n} on x{alpha:?}:{label}: got {}",
                    back.value
                ));
            }
            for j in 1..=n {
                let lhs = cochain::degeneracy_pullback(&up, j);
                let down = cochain::degeneracy_pullback(&f, j - 1);
                let rhs = cochain::face_pullback(&down, 0, p)?;
                if lhs.value != rhs.value {
                    return Err(format!(
                        "identity d_0 s_{j} = s_{} d_0 fails at level {n} on x{alpha:?}:{label}: \
                         {} vs {}",
                        j - 1,
                        lhs.value,
                        rhs.value
                    ));
                }
            }
        }
    }
    Ok(())
}

/// Read the degree-(n+1) differential of the generator `xi_n^label` straight
/// off the zeroth-face table: truncate the pullback of the tautological
/// coordinate to weight n+1, keep the monomials whose blocks partition
/// {1, .., n+1}, and send each through its unraveling sign to the canonical
/// generator monomial.
pub fn ce_differential_direct<S: Scalar>(
    p: &FramedPresentation<S>,
    n: usize,
    label: u32,
) -> Result<ReducedClass<S>, String> {
    if (label as usize) >= p.rank(n) {
        return Err(format!("no generator of degree {n} with label {label}"));
    }
    if p.truncation() < (n + 1) as u32 {
        return Err(format!(
            "truncation {} insufficient for degree {n} (need at least {})",
            p.truncation(),
            n + 1
        ));
    }
    let iota: IndexSubset = (1..=n).collect();
    let g = p
        .d0_image(n + 1, &(iota, label))?
        .truncate_to((n + 1) as u32);
    let mut out = GradedPolynomial::zero(None);
    for (mono, coeff) in g.terms() {
        let seq = cochain::monomial_blocks(mono)?;
        match crate::simplex::classify_sequence(&seq, n + 1) {
            crate::simplex::Classification::NonCovering => continue,
            crate::simplex::Classification::CoveringWithOverlap { .. } => continue,
            crate::simplex::Classification::Partition => {
                match crate::simplex::unravel(&seq, n + 1).map_err(|e| e.to_string())? {
                    crate::simplex::Unraveled::Zero => continue,
                    crate::simplex::Unraveled::Canonical { seq: canon, sign } => {
                        let m = cochain::xi_monomial(&canon);
                        let c = if sign < 0 { -coeff.clone() } else { coeff.clone() };
                        out.add_term(m, c);
                    }
                }
            }
        }
    }
    Ok(ReducedClass {
        level: n + 1,
        value: out,
    })
}

/// Same differential through the independent route: apply the full
/// alternating face sum to the tautological coordinate, then reduce modulo
/// the differentiating ideal. Must agree with the direct route exactly.
pub fn ce_differential_via_delta<S: Scalar>(
    p: &FramedPresentation<S>,
    n: usize,
    label: u32,
) -> Result<ReducedClass<S>, String> {
    if (label as usize) >= p.rank(n) {
        return Err(format!("no generator of degree {n} with label {label}"));
    }
    if p.truncation() < (n + 1) as u32 {
        return Err(format!(
            "truncation {} insufficient for degree {n} (need at least {})",
            p.truncation(),
            n + 1
        ));
    }
    let iota: IndexSubset = (1..=n).collect();
    let f = Cochain::coordinate(p, n, &iota, label);
    let d = cochain::delta(&f, p)?;
    cochain::reduce_mod_jhat(&d)
}

/// The differentiated algebra: one generator per tangent basis element, the
/// differential stored through `max_degree`.
#[derive(Clone, Debug)]
pub struct CEAlgebra<S> {
    pub ranks: Vec<usize>,
    pub superized: bool,
    pub max_degree: usize,
    pub differential: BTreeMap<(usize, u32), GradedPolynomial<S>>,
}

impl<S: Scalar> CEAlgebra<S> {
    /// All generator slots (degree, label), every degree with tangent rank.
    pub fn generators(&self) -> Vec<(usize, u32)> {
        let mut out = Vec::new();
        for (k, &r) in self.ranks.iter().enumerate() {
            if k == 0 {
                continue;
            }
            for l in 0..r {
                out.push((k, l as u32));
            }
        }
        out
    }

    pub fn differential_of(&self, n: usize, label: u32) -> Option<&GradedPolynomial<S>> {
        self.differential.get(&(n, label))
    }

    /// Differential images keyed by generator id, for derivation extension.
    pub fn d_images(&self) -> BTreeMap<GeneratorId, GradedPolynomial<S>> {
        self.differential
            .iter()
            .map(|((n, l), poly)| (GeneratorId::xi(*n as u32, *l), poly.clone()))
            .collect()
    }

    /// Extend the differential to a polynomial as an odd derivation.
    pub fn apply_d(&self, f: &GradedPolynomial<S>) -> Result<GradedPolynomial<S>, String> {
        derivation_apply(&self.d_images(), f)
    }
}

/// Differentiate generators of degree up to `max_degree` by both routes;
/// any disagreement is a hard error carrying both values.
pub fn ce_algebra<S: Scalar>(
    p: &FramedPresentation<S>,
    max_degree: usize,
) -> Result<CEAlgebra<S>, String> {
    let mut differential = BTreeMap::new();
    for n in 1..=max_degree {
        for l in 0..p.rank(n) {
            let direct = ce_differential_direct(p, n, l as u32)?;
            let via = ce_differential_via_delta(p, n, l as u32)?;
            if direct != via {
                return Err(format!(
                    "differential routes disagree for xi{n}:{l}: direct {} vs delta {}",
                    direct.value, via.value
                ));
            }
            differential.insert((n, l as u32), direct.value);
        }
    }
    Ok(CEAlgebra {
        ranks: p.tangent().ranks.clone(),
        superized: p.superized(),
        max_degree,
        differential,
    })
}

/// Apply an odd Koszul derivation given on generators: `D(ab) = D(a)b +
/// (-1)^{|a|} a D(b)`. Every generator occurring in `f` needs an image.
pub fn derivation_apply<S: Scalar>(
    images: &BTreeMap<GeneratorId, GradedPolynomial<S>>,
    f: &GradedPolynomial<S>,
) -> Result<GradedPolynomial<S>, String> {
    let mut out = GradedPolynomial::zero(None);
    for (m, c) in f.terms() {
        let fac = m.factors();
        let mut prefix_odd = false;
        for (t, (g, e)) in fac.iter().enumerate() {
            let img = images
                .get(g)
                .ok_or_else(|| format!("no derivation image for {g}"))?;
            if !img.is_zero() {
                let mut term = GradedPolynomial::constant(
                    if prefix_odd { -c.clone() } else { c.clone() },
                    None,
                );
                term = term.scale(&S::from_int(*e as i64));
                for (gs, es) in fac.iter().take(t) {
                    term = term.mul(&GradedPolynomial::generator(gs.clone(), None).pow(*es));
                }
                term = term.mul(&GradedPolynomial::generator(g.clone(), None).pow(e - 1));
                term = term.mul(img);
                for (gs, es) in fac.iter().skip(t + 1) {
                    term = term.mul(&GradedPolynomial::generator(gs.clone(), None).pow(*es));
                }
                out = out.add(&term);
            }
            if g.parity.is_odd() && e % 2 == 1 {
                prefix_odd = !prefix_odd;
            }
        }
    }
    Ok(out)
}

/// All monomials of the given degree in the listed generators, each of
/// strictly positive degree; odd generators are exponent-capped at one.
pub fn enumerate_monomials_by_degree(gens: &[GeneratorId], degree: u32) -> Vec<Monomial> {
    for g in gens {
        assert!(g.degree > 0, "degree-graded enumeration needs positive degrees");
    }
    let mut out = Vec::new();
    let mut acc: Vec<(GeneratorId, u32)> = Vec::new();
    fn rec(
        gens: &[GeneratorId],
        idx: usize,
        remaining: u32,
        acc: &mut Vec<(GeneratorId, u32)>,
        out: &mut Vec<Monomial>,
    ) {
        if remaining == 0 {
            out.push(Monomial::from_factors(acc.clone()).expect("no odd squares generated"));
            return;
        }
        if idx == gens.len() {
            return;
        }
        let g = &gens[idx];
        let cap = if g.parity.is_odd() {
            1
        } else {
            remaining / g.degree
        };
        for e in 0..=cap {
            if e * g.degree > remaining {
                break;
            }
            if e > 0 {
                acc.push((g.clone(), e));
            }
            rec(gens, idx + 1, remaining - e * g.degree, acc, out);
            if e > 0 {
                acc.pop();
            }
        }
    }
    rec(gens, 0, degree, &mut acc, &mut out);
    out.sort();
    out
}

/// Generator ids `xi_k^l` for every tangent slot.
pub fn xi_generators(ranks: &[usize]) -> Vec<GeneratorId> {
    let mut out = Vec::new();
    for (k, &r) in ranks.iter().enumerate() {
        if k == 0 {
            continue;
        }
        for l in 0..r {
            out.push(GeneratorId::xi(k as u32, l as u32));
        }
    }
    out
}

/// Canonical monomial basis of the differentiated algebra in one degree.
pub fn canonical_ce_monomials(ranks: &[usize], degree: usize) -> Vec<Monomial> {
    enumerate_monomials_by_degree(&xi_generators(ranks), degree as u32)
}

/// Extend the differential to all canonical monomials of degree at most
/// `up_to` and verify it squares to zero; the first nonzero residue is
/// reported with its monomial.
pub fn check_d_squared<S: Scalar>(ce: &CEAlgebra<S>, up_to: usize) -> Result<(), String> {
    for (k, &r) in ce.ranks.iter().enumerate() {
        if k >= 1 && k <= up_to + 1 && r > 0 && ce.differential_of(k, 0).is_none() {
            return Err(format!(
                "square check through degree {up_to} needs differentials through degree {}, \
                 missing degree {k}",
                up_to + 1
            ));
        }
    }
    for degree in 1..=up_to {
        for m in canonical_ce_monomials(&ce.ranks, degree) {
            let mut f = GradedPolynomial::zero(None);
            f.add_term(m.clone(), S::one());
            let once = ce.apply_d(&f)?;
            let twice = ce.apply_d(&once)?;
            if !twice.is_zero() {
                return Err(format!(
                    "differential square is nonzero on {m}: d(d({m})) = {twice}"
                ));
            }
        }
    }
    Ok(())
}

/// Reading convention: a coefficient c on a generator monomial inside the
/// differential corresponds to the structure constant -c of the underlying
/// bracket, following d(omega)(X, Y) = -omega([X, Y]). This single global
/// sign is fixed once and surfaced in reports.
pub const DIFFERENTIAL_TO_BRACKET_SIGN: i64 = -1;

/// Structure constants of one multi-bracket, keyed by canonical input label
/// tuples and the output label.
#[derive(Clone, Debug, PartialEq)]
pub struct BracketTable<S> {
    pub input_degrees: Vec<usize>,
    pub output_degree: usize,
    pub constants: BTreeMap<(Vec<u32>, u32), S>,
}

/// Read the bracket constants for inputs of the given degrees off the
/// canonical differential polynomials.
pub fn bracket_table<S: Scalar>(
    ce: &CEAlgebra<S>,
    input_degrees: &[usize],
) -> Result<BracketTable<S>, String> {
    assert!(!input_degrees.is_empty());
    let mut degs = input_degrees.to_vec();
    degs.sort_unstable();
    let total: usize = degs.iter().sum();
    let out_degree = total - 1;
    let mut constants = BTreeMap::new();
    let out_rank = ce.ranks.get(out_degree).copied().unwrap_or(0);
    if out_rank > 0 && out_degree <= ce.max_degree {
        // Canonical label tuples: non-decreasing on runs of equal degree,
        // strictly increasing when that degree is odd.
        let mut tuples: Vec<Vec<u32>> = vec![vec![]];
        for (pos, &k) in degs.iter().enumerate() {
            let rank_k = ce.ranks.get(k).copied().unwrap_or(0) as u32;
            let odd = k % 2 == 1;
            let mut next = Vec::new();
            for t in &tuples {
                let lo = if pos > 0 && degs[pos - 1] == k {
                    let prev = t[pos - 1];
                    if odd {
                        prev + 1
                    } else {
                        prev
                    }
                } else {
                    0
                };
                for l in lo..rank_k {
                    let mut t2 = t.clone();
                    t2.push(l);
                    next.push(t2);
                }
            }
            tuples = next;
        }
        for out_label in 0..out_rank as u32 {
            let d = ce
                .differential_of(out_degree, out_label)
                .ok_or_else(|| format!("differential of degree {out_degree} not computed"))?;
            for t in &tuples {
                let mut factors: Vec<(GeneratorId, u32)> = Vec::new();
                for (pos, &k) in degs.iter().enumerate() {
                    let g = GeneratorId::xi(k as u32, t[pos]);
                    if let Some(last) = factors.last_mut() {
                        if last.0 == g {
                            last.1 += 1;
                            continue;
                        }
                    }
                    factors.push((g, 1));
                }
                let mono = Monomial::from_factors(factors).expect("canonical tuple");
                let coeff = d.coefficient(&mono);
                let constant = if DIFFERENTIAL_TO_BRACKET_SIGN < 0 {
                    -coeff
                } else {
                    coeff
                };
                constants.insert((t.clone(), out_label), constant);
            }
        }
    }
    Ok(BracketTable {
        input_degrees: degs,
        output_degree: out_degree,
        constants,
    })
}

/// Glue polynomial maps given on coordinate subspaces into one map on the
/// whole space by inclusion-exclusion over the subspace projections.
/// `subspaces[j]` lists the generators spanning the j-th subspace; `maps[j]`
/// is a polynomial supported on those generators.
pub fn inclusion_exclusion_extend<S: Scalar>(
    subspaces: &[Vec<GeneratorId>],
    maps: &[GradedPolynomial<S>],
) -> Result<GradedPolynomial<S>, String> {
    if subspaces.len() != maps.len() || subspaces.is_empty() {
        return Err("need one map per subspace".into());
    }
    let project = |f: &GradedPolynomial<S>, keep: &[GeneratorId]| -> GradedPolynomial<S> {
        let mut images = BTreeMap::new();
        for (m, _) in f.terms() {
            for (g, _) in m.factors() {
                let img = if keep.contains(g) {
                    GradedPolynomial::generator(g.clone(), None)
                } else {
                    GradedPolynomial::zero(None)
                };
                images.insert(g.clone(), img);
            }
        }
        f.substitute(&images, None).expect("projection substitution")
    };
    for (j, f) in maps.iter().enumerate() {
        for (m, _) in f.terms() {
            for (g, _) in m.factors() {
                if !subspaces[j].contains(g) {
                    return Err(format!(
                        "map {j} mentions {g}, outside its declared subspace"
                    ));
                }
            }
        }
    }
    let intersect = |a: &[GeneratorId], b: &[GeneratorId]| -> Vec<GeneratorId> {
        a.iter().filter(|g| b.contains(g)).cloned().collect()
    };
    for i in 0..maps.len() {
        for j in i + 1..maps.len() {
            let common = intersect(&subspaces[i], &subspaces[j]);
            let fi = project(&maps[i], &common);
            let fj = project(&maps[j], &common);
            if fi != fj {
                let witness = fi
                    .sub(&fj)
                    .terms()
                    .next()
                    .map(|(m, _)| m.to_string())
                    .unwrap_or_default();
                return Err(format!(
                    "maps {i} and {j} disagree on their intersection at {witness}"
                ));
            }
        }
    }
    let m = maps.len();
    let mut out = GradedPolynomial::zero(None);
    for mask in 1u32..(1 << m) {
        let members: Vec<usize> = (0..m).filter(|j| mask >> j & 1 == 1).collect();
        let mut common = subspaces[members[0]].clone();
        for &j in &members[1..] {
            common = intersect(&common, &subspaces[j]);
        }
        let term = project(&maps[members[0]], &common);
        if members.len() % 2 == 1 {
            out = out.add(&term);
        } else {
            out = out.sub(&term);
        }
    }
    for (j, f) in maps.iter().enumerate() {
        if project(&out, &subspaces[j]) != *f {
            return Err(format!(
                "assembled map does not restrict to map {j}; inputs were inconsistent"
            ));
        }
    }
    Ok(out)
}

/// Bigraded forms extension: one vertical generator per algebra generator,
/// the vertical differential sending each generator to its partner, and the
/// horizontal differential extending the algebra differential so the two
/// anticommute.
#[derive(Clone, Debug)]
pub struct WeilAlgebra<S> {
    pub ranks: Vec<usize>,
    pub max_degree: usize,
    pub d_h: BTreeMap<GeneratorId, GradedPolynomial<S>>,
    pub d_v: BTreeMap<GeneratorId, GradedPolynomial<S>>,
}

pub fn weil_extension<S: Scalar>(ce: &CEAlgebra<S>) -> Result<WeilAlgebra<S>, String> {
    let mut d_v = BTreeMap::new();
    for g in xi_generators(&ce.ranks) {
        let (deg, lab) = match g.name {
            GenName::Xi { degree, label } => (degree, label),
            _ => unreachable!(),
        };
        d_v.insert(
            g.clone(),
            GradedPolynomial::generator(GeneratorId::dxi(deg, lab), None),
        );
        d_v.insert(GeneratorId::dxi(deg, lab), GradedPolynomial::zero(None));
    }
    let mut d_h = BTreeMap::new();
    for ((n, l), poly) in &ce.differential {
        let xi = GeneratorId::xi(*n as u32, *l);
        d_h.insert(xi, poly.forget_truncation());
        let dv_of_dh = derivation_apply(&d_v, poly)?;
        d_h.insert(GeneratorId::dxi(*n as u32, *l), dv_of_dh.neg());
    }
    Ok(WeilAlgebra {
        ranks: ce.ranks.clone(),
        max_degree: ce.max_degree,
        d_h,
        d_v,
    })
}

/// Certify the two differentials on the stored generators: the vertical one
/// squares to zero, the pair anticommutes, and the horizontal one squares to
/// zero wherever enough differentials are stored to evaluate it.
pub fn weil_checks<S: Scalar>(w: &WeilAlgebra<S>) -> Result<(), String> {
    for (g, img) in &w.d_v {
        let r = derivation_apply(&w.d_v, img)?;
        if !r.is_zero() {
            return Err(format!("vertical differential fails to square to zero on {g}"));
        }
    }
    for (g, img) in &w.d_h {
        // d_h d_v g + d_v d_h g = 0.
        let dv_g = w
            .d_v
            .get(g)
            .ok_or_else(|| format!("no vertical image for {g}"))?;
        let dh_dv = derivation_apply(&w.d_h, dv_g);
        let dv_dh = derivation_apply(&w.d_v, img)?;
        match dh_dv {
            Ok(a) => {
                let r = a.add(&dv_dh);
                if !r.is_zero() {
                    return Err(format!("differentials fail to anticommute on {g}: {r}"));
                }
            }
            // Horizontal images can run off the stored degree range; the
            // anticommutator is then certified only where evaluable.
            Err(_) => continue,
        }
    }
    for (g, img) in &w.d_h {
        if let Ok(r) = derivation_apply(&w.d_h, img) {
            if !r.is_zero() {
                return Err(format!(
                    "horizontal differential fails to square to zero on {g}: {r}"
                ));
            }
        }
    }
    Ok(())
}

/// Monomials of horizontal degree `p` and vertical degree `q`: a generator
/// contributes its degree horizontally, and its vertical partner adds one
/// vertical unit per power.
pub fn weil_monomials(ranks: &[usize], p: usize, q: usize) -> Vec<Monomial> {
    let mut gens: Vec<(GeneratorId, usize, usize)> = Vec::new();
    for (k, &r) in ranks.iter().enumerate() {
        if k == 0 {
            continue;
        }
        for l in 0..r {
            gens.push((GeneratorId::xi(k as u32, l as u32), k, 0));
            gens.push((GeneratorId::dxi(k as u32, l as u32), k, 1));
        }
    }
    let mut out = Vec::new();
    let mut acc: Vec<(GeneratorId, u32)> = Vec::new();
    fn rec(
        gens: &[(GeneratorId, usize, usize)],
        idx: usize,
        hp: usize,
        vq: usize,
        acc: &mut Vec<(GeneratorId, u32)>,
        out: &mut Vec<Monomial>,
    ) {
        if hp == 0 && vq == 0 {
            out.push(Monomial::from_factors(acc.clone()).expect("no odd squares generated"));
            return;
        }
        if idx == gens.len() {
            return;
        }
        let (g, h, v) = &gens[idx];
        let cap_h = if *h > 0 { hp / h } else { usize::MAX };
        let cap_v = if *v > 0 { vq / v } else { usize::MAX };
        let mut cap = cap_h.min(cap_v);
        if g.parity.is_odd() {
            cap = cap.min(1);
        }
        for e in 0..=cap {
            if e * h > hp || e * v > vq {
                break;
            }
            if e > 0 {
                acc.push((g.clone(), e as u32));
            }
            rec(gens, idx + 1, hp - e * h, vq - e * v, acc, out);
            if e > 0 {
                acc.pop();
            }
        }
    }
    rec(&gens, 0, p, q, &mut acc, &mut out);
    out.sort();
    out
}

pub fn weil_bidegree_dimension(ranks: &[usize], p: usize, q: usize) -> usize {
    weil_monomials(ranks, p, q).len()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::{q, Q};

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

    #[test]
    fn monomial_enumeration_counts() {
        // Two odd degree-1 generators and one even degree-2 generator.
        let ranks = vec![0, 2, 1];
        // degree 2: xi1^0 xi1^1, xi2^0.
        assert_eq!(canonical_ce_monomials(&ranks, 2).len(), 2);
        // degree 3: xi1^0 xi2^0, xi1^1 xi2^0; odd squares excluded.
        assert_eq!(canonical_ce_monomials(&ranks, 3).len(), 2);
        // degree 4: xi2^2, xi1^0 xi1^1 xi2.
        assert_eq!(canonical_ce_monomials(&ranks, 4).len(), 2);
    }

    #[test]
    fn derivation_is_koszul() {
        // d(xi1:0) = xi2:0, d(xi1:1) = 0, d(xi2:0) = 0.
        let mut images = BTreeMap::new();
        images.insert(
            GeneratorId::xi(1, 0),
            GradedPolynomial::<Q>::generator(GeneratorId::xi(2, 0), None),
        );
        images.insert(GeneratorId::xi(1, 1), GradedPolynomial::zero(None));
        images.insert(GeneratorId::xi(2, 0), GradedPolynomial::zero(None));
        let a = GradedPolynomial::<Q>::generator(GeneratorId::xi(1, 0), None);
        let b = GradedPolynomial::<Q>::generator(GeneratorId::xi(1, 1), None);
        // d(a b) = d(a) b - a d(b) = xi2 * b.
        let d_ab = derivation_apply(&images, &a.mul(&b)).unwrap();
        let expect = GradedPolynomial::<Q>::generator(GeneratorId::xi(2, 0), None).mul(&b);
        assert_eq!(d_ab, expect);
        // d(b a) = d(b) a - b d(a) = -b xi2 = -xi2 b * (sign of swapping odd past even)…
        let d_ba = derivation_apply(&images, &b.mul(&a)).unwrap();
        assert_eq!(d_ba, expect.neg());
    }

    #[test]
    fn derivation_even_power_rule() {
        // d(x^3) = 3 x^2 dx for an even generator.
        let x = GeneratorId::xi(2, 0);
        let dx = GeneratorId::xi(3, 0);
        let mut images = BTreeMap::new();
        images.insert(x.clone(), GradedPolynomial::<Q>::generator(dx.clone(), None));
        images.insert(dx.clone(), GradedPolynomial::zero(None));
        let f = GradedPolynomial::<Q>::generator(x.clone(), None).pow(3);
        let d = derivation_apply(&images, &f).unwrap();
        let expect = GradedPolynomial::<Q>::generator(x, None)
            .pow(2)
            .mul(&GradedPolynomial::generator(dx, None))
            .scale(&q(3, 1));
        assert_eq!(d, expect);
    }

    #[test]
    fn inclusion_exclusion_small_cases() {
        let g1 = GeneratorId::var(0, 0);
        let g2 = GeneratorId::var(0, 1);
        let p1 = GradedPolynomial::<Q>::generator(g1.clone(), None);
        let p2 = GradedPolynomial::<Q>::generator(g2.clone(), None);
        // Single subspace: the extension is the map itself.
        let single =
            inclusion_exclusion_extend(&[vec![g1.clone()]], &[p1.clone()]).unwrap();
        assert_eq!(single, p1);
        // Two subspaces, maps vanishing on the intersection.
        let sum = inclusion_exclusion_extend(
            &[vec![g1.clone(), g2.clone()], vec![g2.clone()]],
            &[p1.mul(&p2), p2.clone()],
        );
        // p1*p2 restricted to span(g2) is 0, while p2 restricted is p2: the
        // two maps disagree on the intersection, so gluing must refuse.
        assert!(sum.is_err());
        // Identical constant maps glue to the constant.
        let c = GradedPolynomial::<Q>::constant(q(5, 1), None);
        let glued = inclusion_exclusion_extend(
            &[vec![g1.clone()], vec![g2.clone()]],
            &[c.clone(), c.clone()],
        )
        .unwrap();
        assert_eq!(glued, c);
        // Compatible nonconstant maps restrict correctly.
        let f1 = p1.add(&p2);
        let f2 = p2.clone();
        let glued = inclusion_exclusion_extend(
            &[vec![g1.clone(), g2.clone()], vec![g2.clone()]],
            &[f1.clone(), f2],
        )
        .unwrap();
        assert_eq!(glued, f1);
    }

    #[test]
    fn weil_counts_match_exterior_times_symmetric() {
        // Abelian rank-m slot in degree 1: W^{p,q} should count
        // Lambda^{p-q} x Sym^q of an m-dimensional space.
        for m in 1..=3usize {
            let ranks = vec![0, m];
            for p in 0..=4usize {
                for qd in 0..=p {
                    let got = weil_bidegree_dimension(&ranks, p, qd);
                    let want = binomial(m, p - qd) * binomial(m + qd - 1, qd);
                    assert_eq!(got, want, "m={m}, p={p}, q={qd}");
                }
            }
        }
    }

    #[test]
    fn dxi_generators_commute_per_total_degree() {
        // Vertical partners of two degree-1 generators have even total
        // degree, so they commute.
        let a = GradedPolynomial::<Q>::generator(GeneratorId::dxi(1, 0), None);
        let b = GradedPolynomial::<Q>::generator(GeneratorId::dxi(1, 1), None);
        assert_eq!(a.mul(&b), b.mul(&a));
        // A vertical partner of a degree-2 generator is odd.
        let c = GradedPolynomial::<Q>::generator(GeneratorId::dxi(2, 0), None);
        assert!(c.mul(&c).is_zero());
    }
}
