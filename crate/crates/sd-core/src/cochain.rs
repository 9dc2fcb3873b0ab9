//! Cochain calculus over a framed presentation: pullbacks along faces and
//! degeneracies, the simplicial differential, the cup product, the
//! normalization retraction, and reduction modulo the differentiating ideal.
//!
//! Functions on level n are polynomials in the coordinates `x_{alpha, l}`,
//! one for each nonempty subset `alpha` of `{1, .., n}` with tangent rank in
//! size `|alpha|`, truncated at the presentation's total weight.

use crate::differentiate::FramedPresentation;
use crate::poly::{GenName, GeneratorId, GradedPolynomial, Monomial};
use crate::scalar::Scalar;
use crate::simplex::{
    classify_sequence, delta_subset, sigma_subset, Classification, IndexSubset,
    LabeledBlockSequence, Unraveled,
};
use std::collections::BTreeMap;

/// The coordinate ring of one simplicial level.
#[derive(Clone, Debug)]
pub struct LevelCoordinateRing {
    pub level: usize,
    pub ranks: Vec<usize>,
    pub superized: bool,
}

impl LevelCoordinateRing {
    pub fn generators(&self) -> Vec<GeneratorId> {
        let mut out = Vec::new();
        for alpha in crate::dold_kan::subsets_by_size(self.level) {
            if alpha.is_empty() {
                continue;
            }
            let rank = self.ranks.get(alpha.len()).copied().unwrap_or(0);
            for label in 0..rank {
                out.push(GeneratorId::coord(alpha.clone(), label as u32, self.superized));
            }
        }
        out
    }
}

/// A function on one simplicial level.
#[derive(Clone, Debug, PartialEq)]
pub struct Cochain<S> {
    pub level: usize,
    pub value: GradedPolynomial<S>,
}

impl<S: Scalar> Cochain<S> {
    pub fn new(level: usize, value: GradedPolynomial<S>) -> Self {
        Cochain { level, value }
    }

    pub fn zero(p: &FramedPresentation<S>, level: usize) -> Self {
        Cochain {
            level,
            value: GradedPolynomial::zero(Some(p.truncation())),
        }
    }

    /// The tautological coordinate `x_{alpha, label}` as a cochain.
    pub fn coordinate(
        p: &FramedPresentation<S>,
        level: usize,
        alpha: &IndexSubset,
        label: u32,
    ) -> Self {
        Cochain {
            level,
            value: GradedPolynomial::generator(
                p.coord_generator(alpha, label),
                Some(p.truncation()),
            ),
        }
    }
}

/// Block sequence of a coordinate monomial: one (subset, label) entry per
/// factor, repeated by exponent, in the monomial's factor order.
pub fn monomial_blocks(m: &Monomial) -> Result<LabeledBlockSequence, String> {
    let mut seq = Vec::new();
    for (g, e) in m.factors() {
        match &g.name {
            GenName::Coord { alpha, label } => {
                for _ in 0..*e {
                    seq.push((alpha.clone(), *label));
                }
            }
            _ => return Err(format!("{g} is not a level coordinate")),
        }
    }
    Ok(seq)
}

/// The canonical generator monomial of a canonical labeled partition: one
/// `xi` factor of degree `|block|` per block.
pub fn xi_monomial(seq: &LabeledBlockSequence) -> Monomial {
    let mut powers: BTreeMap<GeneratorId, u32> = BTreeMap::new();
    for (block, label) in seq {
        *powers
            .entry(GeneratorId::xi(block.len() as u32, *label))
            .or_insert(0) += 1;
    }
    Monomial::from_factors(powers.into_iter().collect())
        .expect("canonical partition has no repeated odd blocks")
}

/// Pullback along the i-th face of level `f.level + 1`. Positive faces act
/// linearly on coordinates; the zeroth face substitutes the presentation's
/// pullback table.
pub fn face_pullback<S: Scalar>(
    f: &Cochain<S>,
    i: usize,
    p: &FramedPresentation<S>,
) -> Result<Cochain<S>, String> {
    let n = f.level + 1;
    if i > n {
        return Err(format!("face index {i} out of range at level {n}"));
    }
    let mut images: BTreeMap<GeneratorId, GradedPolynomial<S>> = BTreeMap::new();
    for (m, _) in f.value.terms() {
        for (g, _) in m.factors() {
            if images.contains_key(g) {
                continue;
            }
            let GenName::Coord { alpha, label } = &g.name else {
                return Err(format!("{g} is not a level coordinate"));
            };
            let img = if i == 0 {
                p.d0_image(n, &(alpha.clone(), *label))?.clone()
            } else if alpha.binary_search(&i).is_ok() {
                let a = GradedPolynomial::generator(
                    p.coord_generator(&delta_subset(i, alpha), *label),
                    Some(p.truncation()),
                );
                let b = GradedPolynomial::generator(
                    p.coord_generator(&delta_subset(i + 1, alpha), *label),
                    Some(p.truncation()),
                );
                a.add(&b)
            } else {
                GradedPolynomial::generator(
                    p.coord_generator(&delta_subset(i, alpha), *label),
                    Some(p.truncation()),
                )
            };
            images.insert(g.clone(), img);
        }
    }
    let value = f
        .value
        .substitute(&images, Some(p.truncation()))
        .map_err(|e| format!("face pullback failed: {e}"))?;
    Ok(Cochain { level: n, value })
}

/// Pullback along the j-th degeneracy of level `f.level - 1`: coordinates
/// whose subset contains j+1 die, the rest relabel along sigma.
pub fn degeneracy_pullback<S: Scalar>(f: &Cochain<S>, j: usize) -> Cochain<S> {
    assert!(f.level >= 1, "no degeneracies into level 0");
    assert!(j + 1 <= f.level, "degeneracy index {j} out of range at level {}", f.level);
    let mut images: BTreeMap<GeneratorId, GradedPolynomial<S>> = BTreeMap::new();
    let trunc = f.value.truncation();
    for (m, _) in f.value.terms() {
        for (g, _) in m.factors() {
            if images.contains_key(g) {
                continue;
            }
            let GenName::Coord { alpha, label } = &g.name else {
                panic!("{g} is not a level coordinate");
            };
            let img = if alpha.binary_search(&(j + 1)).is_ok() {
                GradedPolynomial::zero(trunc)
            } else {
                let target = sigma_subset(j + 1, alpha);
                let super_flag = g.parity.is_odd();
                GradedPolynomial::generator(
                    GeneratorId::coord(target, *label, super_flag),
                    trunc,
                )
            };
            images.insert(g.clone(), img);
        }
    }
    let value = f
        .value
        .substitute(&images, trunc)
        .expect("degeneracy pullback cannot fail on coordinates");
    Cochain {
        level: f.level - 1,
        value,
    }
}

/// The simplicial differential: the alternating sum of all face pullbacks
/// into the next level.
pub fn delta<S: Scalar>(
    f: &Cochain<S>,
    p: &FramedPresentation<S>,
) -> Result<Cochain<S>, String> {
    let n = f.level;
    let mut out = GradedPolynomial::zero(Some(p.truncation()));
    for i in 0..=n + 1 {
        let pulled = face_pullback(f, i, p)?;
        if i % 2 == 0 {
            out = out.add(&pulled.value);
        } else {
            out = out.sub(&pulled.value);
        }
    }
    Ok(Cochain {
        level: n + 1,
        value: out,
    })
}

/// The cup product: pull the left factor back along the rear faces, the
/// right factor along the front faces, and multiply.
pub fn cup<S: Scalar>(
    f: &Cochain<S>,
    g: &Cochain<S>,
    p: &FramedPresentation<S>,
) -> Result<Cochain<S>, String> {
    let (lp, lq) = (f.level, g.level);
    let mut left = f.clone();
    for _ in 0..lq {
        left = face_pullback(&left, lp + 1, p)?;
    }
    let mut right = g.clone();
    for _ in 0..lp {
        right = face_pullback(&right, 0, p)?;
    }
    Ok(Cochain {
        level: lp + lq,
        value: left.value.mul(&right.value),
    })
}

/// True when every monomial's blocks cover the whole of `{1, .., level}`.
pub fn is_normalized<S: Scalar>(f: &Cochain<S>) -> bool {
    for (m, _) in f.value.terms() {
        match monomial_blocks(m) {
            Ok(seq) => {
                if classify_sequence(&seq, f.level) == Classification::NonCovering {
                    return false;
                }
            }
            Err(_) => return false,
        }
    }
    true
}

/// Project onto normalized cochains along the degenerate ones: subtract, for
/// each degeneracy, the part that factors through it. Identity on normalized
/// cochains, kills every degenerate pullback, and is idempotent.
pub fn normalize_retract<S: Scalar>(
    f: &Cochain<S>,
    p: &FramedPresentation<S>,
) -> Result<Cochain<S>, String> {
    let n = f.level;
    let mut cur = f.clone();
    for j in 1..=n {
        let collapsed = degeneracy_pullback(&cur, j - 1);
        let back = face_pullback(&collapsed, j, p)?;
        cur = Cochain {
            level: n,
            value: cur.value.sub(&back.value),
        };
    }
    Ok(cur)
}

/// A reduced class: a polynomial in the canonical generators, graded by the
/// level it came from.
#[derive(Clone, Debug, PartialEq)]
pub struct ReducedClass<S> {
    pub level: usize,
    pub value: GradedPolynomial<S>,
}

/// Reduce a normalized cochain modulo the differentiating ideal: overlapping
/// covers die, partitions unravel to canonical generator monomials with
/// their transposition signs. A non-covering monomial is a caller error.
pub fn reduce_mod_jhat<S: Scalar>(f: &Cochain<S>) -> Result<ReducedClass<S>, String> {
    let n = f.level;
    let mut out = GradedPolynomial::zero(None);
    for (m, coeff) in f.value.terms() {
        let seq = monomial_blocks(m)?;
        match classify_sequence(&seq, n) {
            Classification::NonCovering => {
                return Err(format!(
                    "monomial {m} does not cover level {n}; normalize before reducing"
                ));
            }
            Classification::CoveringWithOverlap { .. } => continue,
            Classification::Partition => match crate::simplex::unravel(&seq, n)
                .map_err(|e| e.to_string())?
            {
                Unraveled::Zero => continue,
                Unraveled::Canonical { seq: canon, sign } => {
                    let c = if sign < 0 { -coeff.clone() } else { coeff.clone() };
                    out.add_term(xi_monomial(&canon), c);
                }
            },
        }
    }
    Ok(ReducedClass { level: n, value: out })
}

/// The least total weight among the monomials of a cochain.
pub fn total_order<S: Scalar>(f: &Cochain<S>) -> Option<u32> {
    f.value.total_order()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dold_kan::ChainComplex;
    use crate::matrix::Matrix;
    use crate::{q, Q};

    /// The nerve of the additive group on `m` coordinates, in increment
    /// frame: the zeroth face sends each singleton coordinate to the next
    /// increment.
    fn abelian(m: usize, truncation: u32, levels: usize) -> FramedPresentation<Q> {
        let tangent = ChainComplex::new(vec![0, m], vec![Matrix::zero(0, m)]).unwrap();
        let mut tables = Vec::new();
        for level in 1..=levels {
            let mut t: BTreeMap<(IndexSubset, u32), GradedPolynomial<Q>> = BTreeMap::new();
            for s in 1..level {
                for l in 0..m as u32 {
                    t.insert(
                        (vec![s], l),
                        GradedPolynomial::generator(
                            GeneratorId::coord(vec![s + 1], l, false),
                            Some(truncation),
                        ),
                    );
                }
            }
            tables.push(t);
        }
        FramedPresentation::new(tangent, truncation, tables, false).unwrap()
    }

    fn coord(p: &FramedPresentation<Q>, alpha: &[usize], l: u32) -> GradedPolynomial<Q> {
        GradedPolynomial::generator(
            p.coord_generator(&alpha.to_vec(), l),
            Some(p.truncation()),
        )
    }

    #[test]
    fn face_pullbacks_of_the_line() {
        let p = abelian(1, 4, 3);
        let x = Cochain::coordinate(&p, 1, &vec![1], 0);
        // Rear face keeps the first increment.
        let via_d2 = face_pullback(&x, 2, &p).unwrap();
        assert_eq!(via_d2.value, coord(&p, &[1], 0));
        // Middle face merges the two increments.
        let via_d1 = face_pullback(&x, 1, &p).unwrap();
        assert_eq!(via_d1.value, coord(&p, &[1], 0).add(&coord(&p, &[2], 0)));
        // Front face shifts to the second increment.
        let via_d0 = face_pullback(&x, 0, &p).unwrap();
        assert_eq!(via_d0.value, coord(&p, &[2], 0));
        // The differential of the coordinate itself telescopes away.
        let d = delta(&x, &p).unwrap();
        assert!(d.value.is_zero());
    }

    #[test]
    fn abelian_differential_of_x_squared() {
        let p = abelian(1, 4, 3);
        let x = Cochain::coordinate(&p, 1, &vec![1], 0);
        let x2 = Cochain::new(1, x.value.mul(&x.value));
        let d = delta(&x2, &p).unwrap();
        let expect = coord(&p, &[1], 0).mul(&coord(&p, &[2], 0)).scale(&q(-2, 1));
        assert_eq!(d.value, expect);
        // Its class dies: the two singleton blocks carry equal labels.
        let cls = reduce_mod_jhat(&d).unwrap();
        assert!(cls.value.is_zero());
    }

    #[test]
    fn delta_squares_to_zero_and_respects_order() {
        let p = abelian(2, 4, 4);
        let f = Cochain::new(
            1,
            coord(&p, &[1], 0)
                .mul(&coord(&p, &[1], 1))
                .add(&coord(&p, &[1], 0).scale(&q(3, 1))),
        );
        let df = delta(&f, &p).unwrap();
        let ddf = delta(&df, &p).unwrap();
        assert!(ddf.value.is_zero());
        let o_f = total_order(&f).unwrap();
        let o_df = total_order(&df).unwrap();
        assert!(o_df >= o_f);
    }

    #[test]
    fn cup_is_a_leibniz_product() {
        let p = abelian(2, 5, 4);
        let f = Cochain::new(1, coord(&p, &[1], 0));
        let g = Cochain::new(1, coord(&p, &[1], 1));
        let fg = cup(&f, &g, &p).unwrap();
        // Front and rear pullbacks multiply.
        assert_eq!(
            fg.value,
            coord(&p, &[1], 0).mul(&coord(&p, &[2], 1))
        );
        // delta(f cup g) = delta(f) cup g - f cup delta(g) for odd-free
        // coefficients; here both differentials vanish separately.
        let d_fg = delta(&fg, &p).unwrap();
        let df = delta(&f, &p).unwrap();
        let dg = delta(&g, &p).unwrap();
        let lhs = d_fg.value;
        let rhs = cup(&df, &g, &p)
            .unwrap()
            .value
            .sub(&cup(&f, &dg, &p).unwrap().value);
        assert_eq!(lhs, rhs);
    }

    #[test]
    fn leibniz_across_levels() {
        // delta(f cup g) = delta(f) cup g + (-1)^p f cup delta(g).
        let p = abelian(2, 5, 4);
        let f = Cochain::new(1, coord(&p, &[1], 0).mul(&coord(&p, &[1], 1)));
        let g = Cochain::new(2, coord(&p, &[1], 1).mul(&coord(&p, &[2], 0)));
        let d_fg = delta(&cup(&f, &g, &p).unwrap(), &p).unwrap();
        let term1 = cup(&delta(&f, &p).unwrap(), &g, &p).unwrap();
        let term2 = cup(&f, &delta(&g, &p).unwrap(), &p).unwrap();
        let sign = q(if f.level % 2 == 0 { 1 } else { -1 }, 1);
        let expected = term1.value.add(&term2.value.scale(&sign));
        assert_eq!(d_fg.value, expected);
    }

    #[test]
    fn retraction_projects_onto_normalized_cochains() {
        let p = abelian(1, 4, 3);
        // A degenerate cochain: pull a level-1 coordinate up along s_0^*'s
        // section d_1.
        let x = Cochain::coordinate(&p, 1, &vec![1], 0);
        let degenerate = face_pullback(&x, 1, &p).unwrap();
        assert!(!is_normalized(&degenerate));
        let r = normalize_retract(&degenerate, &p).unwrap();
        assert!(r.value.is_zero());
        // A normalized cochain passes through unchanged.
        let good = Cochain::new(
            2,
            coord(&p, &[1], 0).mul(&coord(&p, &[2], 0)),
        );
        let r = normalize_retract(&good, &p).unwrap();
        assert_eq!(r.value, good.value);
        // The retraction is idempotent on a mixed input.
        let mixed = Cochain::new(2, degenerate.value.add(&good.value));
        let r1 = normalize_retract(&mixed, &p).unwrap();
        let r2 = normalize_retract(&r1, &p).unwrap();
        assert_eq!(r1.value, r2.value);
        assert!(is_normalized(&r1));
    }

    #[test]
    fn reduction_signs_follow_transpositions() {
        let p = abelian(2, 4, 3);
        // x_{2,0} x_{1,1} at level 2: blocks ({2},0), ({1},1); sorting the
        // elements needs one transposition, so the class is -xi1:0 xi1:1 ...
        // with labels riding along: blocks become ({1},0),({2},1) after
        // swapping 1 and 2, sign -1, i.e. -(xi1:0)(xi1:1).
        let f = Cochain::new(2, coord(&p, &[2], 0).mul(&coord(&p, &[1], 1)));
        let cls = reduce_mod_jhat(&f).unwrap();
        let mut expect = GradedPolynomial::<Q>::zero(None);
        expect.add_term(
            Monomial::from_factors(vec![
                (GeneratorId::xi(1, 0), 1),
                (GeneratorId::xi(1, 1), 1),
            ])
            .unwrap(),
            q(-1, 1),
        );
        assert_eq!(cls.value, expect);
        // The same monomial with blocks already sorted keeps sign +1.
        let g = Cochain::new(2, coord(&p, &[1], 0).mul(&coord(&p, &[2], 1)));
        let cls = reduce_mod_jhat(&g).unwrap();
        assert_eq!(cls.value, expect.neg());
        // Unnormalized input is the caller's bug.
        let bad = Cochain::new(2, coord(&p, &[1], 0));
        assert!(reduce_mod_jhat(&bad).is_err());
    }
}
