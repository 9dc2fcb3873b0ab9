//! Graded-commutative polynomials with exact coefficients.
//!
//! Generators carry a cohomological degree, a parity driving Koszul signs,
//! and a weight driving truncation. Odd generators square to zero. Monomial
//! keys are kept sorted, so every polynomial has one normal form and maps
//! iterate deterministically.

use crate::scalar::Scalar;
use std::collections::BTreeMap;
use std::fmt;

#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Debug, Hash)]
pub enum Parity {
    Even,
    Odd,
}

impl Parity {
    pub fn of_degree(n: usize) -> Parity {
        if n % 2 == 0 {
            Parity::Even
        } else {
            Parity::Odd
        }
    }

    pub fn is_odd(self) -> bool {
        self == Parity::Odd
    }

    pub fn xor(self, other: Parity) -> Parity {
        if self == other {
            Parity::Even
        } else {
            Parity::Odd
        }
    }
}

/// What a generator refers to. The variants cover every symbol family the
/// crate manipulates; the enum order fixes the display order inside
/// monomials.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Debug, Hash)]
pub enum GenName {
    /// Coordinate `x_{alpha, label}` of a level ring.
    Coord { alpha: Vec<usize>, label: u32 },
    /// Generator `xi_degree^label` of a differentiated algebra.
    Xi { degree: u32, label: u32 },
    /// Vertical differential `d xi_degree^label` of the Weil extension.
    DXi { degree: u32, label: u32 },
    /// Odd-line generator `eps_index`.
    Eps { index: u32 },
    /// Scratch variable for formal group-law work: slot 0 = x, 1 = y, 2 = z.
    Var { slot: u8, comp: u32 },
}

#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Debug, Hash)]
pub struct GeneratorId {
    pub name: GenName,
    pub degree: u32,
    pub parity: Parity,
    pub weight: u32,
}

impl GeneratorId {
    pub fn coord(alpha: Vec<usize>, label: u32, super_flag: bool) -> Self {
        debug_assert!(alpha.windows(2).all(|w| w[0] < w[1]), "alpha must be sorted");
        let w = alpha.len() as u32;
        GeneratorId {
            parity: if super_flag {
                Parity::of_degree(alpha.len())
            } else {
                Parity::Even
            },
            name: GenName::Coord { alpha, label },
            degree: 0,
            weight: w,
        }
    }

    pub fn xi(degree: u32, label: u32) -> Self {
        GeneratorId {
            name: GenName::Xi { degree, label },
            degree,
            parity: Parity::of_degree(degree as usize),
            weight: degree,
        }
    }

    pub fn dxi(degree: u32, label: u32) -> Self {
        GeneratorId {
            name: GenName::DXi { degree, label },
            degree: degree + 1,
            parity: Parity::of_degree(degree as usize + 1),
            weight: degree,
        }
    }

    pub fn eps(index: u32) -> Self {
        GeneratorId {
            name: GenName::Eps { index },
            degree: 0,
            parity: Parity::Odd,
            weight: 1,
        }
    }

    pub fn var(slot: u8, comp: u32) -> Self {
        GeneratorId {
            name: GenName::Var { slot, comp },
            degree: 0,
            parity: Parity::Even,
            weight: 1,
        }
    }
}

impl fmt::Display for GeneratorId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &self.name {
            GenName::Coord { alpha, label } => {
                write!(f, "x{{")?;
                for (i, a) in alpha.iter().enumerate() {
                    if i > 0 {
                        write!(f, ",")?;
                    }
                    write!(f, "{a}")?;
                }
                write!(f, "}}:{label}")
            }
            GenName::Xi { degree, label } => write!(f, "xi{degree}:{label}"),
            GenName::DXi { degree, label } => write!(f, "dxi{degree}:{label}"),
            GenName::Eps { index } => write!(f, "eps{index}"),
            GenName::Var { slot, comp } => {
                let s = ['x', 'y', 'z'][*slot as usize];
                write!(f, "{s}{comp}")
            }
        }
    }
}

/// Product of generator powers, sorted by generator id. Odd generators never
/// exceed exponent one.
#[derive(Clone, PartialEq, Eq, Debug, Hash)]
pub struct Monomial {
    factors: Vec<(GeneratorId, u32)>,
}

impl Monomial {
    pub fn one() -> Self {
        Monomial { factors: vec![] }
    }

    pub fn generator(g: GeneratorId) -> Self {
        Monomial {
            factors: vec![(g, 1)],
        }
    }

    pub fn from_factors(mut factors: Vec<(GeneratorId, u32)>) -> Option<Self> {
        factors.retain(|(_, e)| *e > 0);
        factors.sort_by(|a, b| a.0.cmp(&b.0));
        for w in factors.windows(2) {
            assert!(w[0].0 != w[1].0, "duplicate generator in factor list");
        }
        if factors.iter().any(|(g, e)| g.parity.is_odd() && *e > 1) {
            return None;
        }
        Some(Monomial { factors })
    }

    pub fn factors(&self) -> &[(GeneratorId, u32)] {
        &self.factors
    }

    pub fn is_one(&self) -> bool {
        self.factors.is_empty()
    }

    pub fn weight(&self) -> u32 {
        self.factors.iter().map(|(g, e)| g.weight * e).sum()
    }

    pub fn degree(&self) -> u32 {
        self.factors.iter().map(|(g, e)| g.degree * e).sum()
    }

    pub fn parity(&self) -> Parity {
        let odd_count: u32 = self
            .factors
            .iter()
            .filter(|(g, _)| g.parity.is_odd())
            .map(|(_, e)| e)
            .sum();
        Parity::of_degree(odd_count as usize)
    }

    /// Koszul product. `None` when an odd generator squares.
    pub fn mul(&self, other: &Monomial) -> Option<(Monomial, i8)> {
        let mut out = Vec::with_capacity(self.factors.len() + other.factors.len());
        let mut sign = 1i8;
        // Count of odd generators in self.factors[i..].
        let mut odd_suffix: Vec<u32> = vec![0; self.factors.len() + 1];
        for i in (0..self.factors.len()).rev() {
            odd_suffix[i] =
                odd_suffix[i + 1] + u32::from(self.factors[i].0.parity.is_odd());
        }
        let (mut i, mut j) = (0, 0);
        while i < self.factors.len() || j < other.factors.len() {
            if j == other.factors.len() {
                out.push(self.factors[i].clone());
                i += 1;
            } else if i == self.factors.len() {
                out.push(other.factors[j].clone());
                j += 1;
            } else if self.factors[i].0 <= other.factors[j].0 {
                if self.factors[i].0 == other.factors[j].0 {
                    let (g, ea) = self.factors[i].clone();
                    let eb = other.factors[j].1;
                    if g.parity.is_odd() {
                        return None;
                    }
                    out.push((g, ea + eb));
                    i += 1;
                    j += 1;
                } else {
                    out.push(self.factors[i].clone());
                    i += 1;
                }
            } else {
                let (g, e) = other.factors[j].clone();
                if g.parity.is_odd() && odd_suffix[i] % 2 == 1 {
                    sign = -sign;
                }
                out.push((g, e));
                j += 1;
            }
        }
        Some((Monomial { factors: out }, sign))
    }
}

impl PartialOrd for Monomial {
    fn partial_cmp(&self, other: &Self) -> Option<std::cmp::Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Monomial {
    /// Graded lexicographic: weight first, then the sorted factor lists.
    fn cmp(&self, other: &Self) -> std::cmp::Ordering {
        self.weight()
            .cmp(&other.weight())
            .then_with(|| self.factors.cmp(&other.factors))
    }
}

impl fmt::Display for Monomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.factors.is_empty() {
            return write!(f, "1");
        }
        for (i, (g, e)) in self.factors.iter().enumerate() {
            if i > 0 {
                write!(f, "*")?;
            }
            if *e == 1 {
                write!(f, "{g}")?;
            } else {
                write!(f, "{g}^{e}")?;
            }
        }
        Ok(())
    }
}

#[derive(Clone, PartialEq, Eq, Debug)]
pub enum PolyError {
    MissingImage(String),
    ParityMismatch(String),
    WeightDrop(String),
}

impl fmt::Display for PolyError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            PolyError::MissingImage(g) => write!(f, "no substitution image for {g}"),
            PolyError::ParityMismatch(g) => write!(f, "substitution image of {g} mixes parity"),
            PolyError::WeightDrop(g) => {
                write!(f, "substitution image of {g} has lower weight than {g}")
            }
        }
    }
}

impl std::error::Error for PolyError {}

/// Polynomial with monomials of weight at most `truncation` (when set).
#[derive(Clone, PartialEq, Debug)]
pub struct GradedPolynomial<S> {
    terms: BTreeMap<Monomial, S>,
    truncation: Option<u32>,
}

impl<S: Scalar> GradedPolynomial<S> {
    pub fn zero(truncation: Option<u32>) -> Self {
        GradedPolynomial {
            terms: BTreeMap::new(),
            truncation,
        }
    }

    pub fn constant(c: S, truncation: Option<u32>) -> Self {
        let mut p = Self::zero(truncation);
        p.add_term(Monomial::one(), c);
        p
    }

    pub fn one(truncation: Option<u32>) -> Self {
        Self::constant(S::one(), truncation)
    }

    pub fn generator(g: GeneratorId, truncation: Option<u32>) -> Self {
        let mut p = Self::zero(truncation);
        p.add_term(Monomial::generator(g), S::one());
        p
    }

    pub fn truncation(&self) -> Option<u32> {
        self.truncation
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Monomial, &S)> {
        self.terms.iter()
    }

    pub fn num_terms(&self) -> usize {
        self.terms.len()
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn coefficient(&self, m: &Monomial) -> S {
        self.terms.get(m).cloned().unwrap_or_else(S::zero)
    }

    /// Least weight among monomials; `None` for the zero polynomial.
    pub fn total_order(&self) -> Option<u32> {
        self.terms.keys().map(Monomial::weight).min()
    }

    pub fn add_term(&mut self, m: Monomial, c: S) {
        if c.is_zero() {
            return;
        }
        if let Some(t) = self.truncation {
            if m.weight() > t {
                return;
            }
        }
        let entry = self.terms.entry(m);
        match entry {
            std::collections::btree_map::Entry::Vacant(v) => {
                v.insert(c);
            }
            std::collections::btree_map::Entry::Occupied(mut o) => {
                let sum = o.get().clone() + c;
                if sum.is_zero() {
                    o.remove();
                } else {
                    *o.get_mut() = sum;
                }
            }
        }
    }

    fn merge_truncation(a: Option<u32>, b: Option<u32>) -> Option<u32> {
        match (a, b) {
            (Some(x), Some(y)) => Some(x.min(y)),
            (Some(x), None) | (None, Some(x)) => Some(x),
            (None, None) => None,
        }
    }

    pub fn add(&self, other: &Self) -> Self {
        let mut out = Self::zero(Self::merge_truncation(self.truncation, other.truncation));
        for (m, c) in self.terms.iter().chain(other.terms.iter()) {
            out.add_term(m.clone(), c.clone());
        }
        out
    }

    pub fn neg(&self) -> Self {
        let mut out = Self::zero(self.truncation);
        for (m, c) in &self.terms {
            out.add_term(m.clone(), -c.clone());
        }
        out
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.add(&other.neg())
    }

    pub fn scale(&self, c: &S) -> Self {
        let mut out = Self::zero(self.truncation);
        for (m, k) in &self.terms {
            out.add_term(m.clone(), k.clone() * c.clone());
        }
        out
    }

    pub fn mul(&self, other: &Self) -> Self {
        let mut out = Self::zero(Self::merge_truncation(self.truncation, other.truncation));
        for (ma, ca) in &self.terms {
            for (mb, cb) in &other.terms {
                if let Some(t) = out.truncation {
                    if ma.weight() + mb.weight() > t {
                        continue;
                    }
                }
                if let Some((m, sign)) = ma.mul(mb) {
                    let mut c = ca.clone() * cb.clone();
                    if sign < 0 {
                        c = -c;
                    }
                    out.add_term(m, c);
                }
            }
        }
        out
    }

    pub fn pow(&self, e: u32) -> Self {
        let mut out = Self::one(self.truncation);
        for _ in 0..e {
            out = out.mul(self);
        }
        out
    }

    /// Keep monomials of weight at most `w` and remember the bound.
    pub fn truncate_to(&self, w: u32) -> Self {
        let mut out = Self::zero(Some(
            self.truncation.map_or(w, |t| t.min(w)),
        ));
        for (m, c) in &self.terms {
            out.add_term(m.clone(), c.clone());
        }
        out
    }

    /// Drop the truncation marker without changing the terms.
    pub fn forget_truncation(&self) -> Self {
        let mut out = Self::zero(None);
        for (m, c) in &self.terms {
            out.add_term(m.clone(), c.clone());
        }
        out
    }

    /// Parity-checked homomorphic substitution: every generator that occurs
    /// must have an image of its own parity and of weight at least its own.
    pub fn substitute(
        &self,
        images: &BTreeMap<GeneratorId, GradedPolynomial<S>>,
        truncation: Option<u32>,
    ) -> Result<Self, PolyError> {
        let mut out = Self::zero(truncation);
        for (m, c) in &self.terms {
            let mut acc = Self::constant(c.clone(), truncation);
            for (g, e) in m.factors() {
                let img = images
                    .get(g)
                    .ok_or_else(|| PolyError::MissingImage(g.to_string()))?;
                for im in img.terms.keys() {
                    if im.parity() != g.parity {
                        return Err(PolyError::ParityMismatch(g.to_string()));
                    }
                    if im.weight() < g.weight {
                        return Err(PolyError::WeightDrop(g.to_string()));
                    }
                }
                acc = acc.mul(&img.pow(*e));
                if acc.is_zero() {
                    break;
                }
            }
            out = out.add(&acc);
        }
        Ok(out)
    }

    /// Iterated partial derivative at zero: the coefficient of `m` times the
    /// product of exponent factorials. For square-free `m` this is just the
    /// coefficient.
    pub fn multilinear_coefficient(&self, m: &Monomial) -> S {
        let mut c = self.coefficient(m);
        if c.is_zero() {
            return c;
        }
        for (_, e) in m.factors() {
            for k in 2..=*e {
                c = c * S::from_int(k as i64);
            }
        }
        c
    }

    pub fn map_coeffs<T: Scalar>(&self, f: impl Fn(&S) -> T) -> GradedPolynomial<T> {
        let mut out = GradedPolynomial::zero(self.truncation);
        for (m, c) in &self.terms {
            out.add_term(m.clone(), f(c));
        }
        out
    }
}

impl<S: Scalar> fmt::Display for GradedPolynomial<S> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        for (i, (m, c)) in self.terms.iter().enumerate() {
            let cs = format!("{c}");
            let (sep, body) = if let Some(stripped) = cs.strip_prefix('-') {
                (if i == 0 { "-" } else { " - " }, stripped.to_string())
            } else {
                (if i == 0 { "" } else { " + " }, cs)
            };
            write!(f, "{sep}")?;
            if m.is_one() {
                write!(f, "{body}")?;
            } else if body == "1" {
                write!(f, "{m}")?;
            } else {
                write!(f, "{body}*{m}")?;
            }
        }
        Ok(())
    }
}

/// Free-function aliases for the module-level operation names.
pub fn poly_mul<S: Scalar>(a: &GradedPolynomial<S>, b: &GradedPolynomial<S>) -> GradedPolynomial<S> {
    a.mul(b)
}

pub fn poly_substitute<S: Scalar>(
    f: &GradedPolynomial<S>,
    images: &BTreeMap<GeneratorId, GradedPolynomial<S>>,
    truncation: Option<u32>,
) -> Result<GradedPolynomial<S>, PolyError> {
    f.substitute(images, truncation)
}

pub fn multilinear_coefficient<S: Scalar>(f: &GradedPolynomial<S>, m: &Monomial) -> S {
    f.multilinear_coefficient(m)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::{q, Q};

    fn xi(n: u32, l: u32) -> GeneratorId {
        GeneratorId::xi(n, l)
    }

    #[test]
    fn odd_generators_square_to_zero() {
        let a = GradedPolynomial::<Q>::generator(xi(1, 0), None);
        assert!(a.mul(&a).is_zero());
        let b = GradedPolynomial::<Q>::generator(xi(1, 1), None);
        let ab = a.mul(&b);
        let ba = b.mul(&a);
        assert_eq!(ab, ba.neg());
    }

    #[test]
    fn even_generators_commute() {
        let a = GradedPolynomial::<Q>::generator(xi(2, 0), None);
        let b = GradedPolynomial::<Q>::generator(xi(2, 1), None);
        assert_eq!(a.mul(&b), b.mul(&a));
        assert!(!a.mul(&a).is_zero());
    }

    #[test]
    fn koszul_three_factor_associativity() {
        let gens: Vec<_> = (0..3)
            .map(|l| GradedPolynomial::<Q>::generator(xi(1, l), None))
            .collect();
        let left = gens[0].mul(&gens[1]).mul(&gens[2]);
        let right = gens[0].mul(&gens[1].mul(&gens[2]));
        assert_eq!(left, right);
        let rev = gens[2].mul(&gens[1]).mul(&gens[0]);
        // Reversing three odd factors is an odd permutation of three letters.
        assert_eq!(left, rev.neg());
    }

    #[test]
    fn truncation_is_minimum_of_operands() {
        let x = GeneratorId::var(0, 0);
        let a = GradedPolynomial::<Q>::generator(x.clone(), Some(3));
        let b = GradedPolynomial::<Q>::generator(x.clone(), Some(2));
        let p = a.mul(&b); // weight 2, truncation 2
        assert_eq!(p.truncation(), Some(2));
        assert_eq!(p.coefficient(&Monomial::from_factors(vec![(x, 2)]).unwrap()), q(1, 1));
        let cube = p.mul(&p); // weight 4 > 2: vanishes
        assert!(cube.is_zero());
    }

    #[test]
    fn substitution_is_homomorphic() {
        let x = GeneratorId::var(0, 0);
        let y = GeneratorId::var(1, 0);
        let f = GradedPolynomial::<Q>::generator(x.clone(), None)
            .mul(&GradedPolynomial::generator(x.clone(), None))
            .add(&GradedPolynomial::generator(y.clone(), None).scale(&q(3, 1)));
        let mut images = BTreeMap::new();
        let img_x = GradedPolynomial::<Q>::generator(y.clone(), None)
            .add(&GradedPolynomial::generator(x.clone(), None));
        images.insert(x.clone(), img_x.clone());
        images.insert(y.clone(), GradedPolynomial::generator(y.clone(), None));
        let got = f.substitute(&images, None).unwrap();
        let expect = img_x
            .mul(&img_x)
            .add(&GradedPolynomial::generator(y, None).scale(&q(3, 1)));
        assert_eq!(got, expect);
    }

    #[test]
    fn substitution_rejects_parity_flips() {
        let x = GeneratorId::var(0, 0); // even
        let odd = xi(1, 0);
        let f = GradedPolynomial::<Q>::generator(x.clone(), None);
        let mut images = BTreeMap::new();
        images.insert(x, GradedPolynomial::generator(odd, None));
        assert!(matches!(
            f.substitute(&images, None),
            Err(PolyError::ParityMismatch(_))
        ));
    }

    #[test]
    fn multilinear_coefficient_counts_multiplicity() {
        let y = GeneratorId::var(1, 0);
        let m = Monomial::from_factors(vec![(y.clone(), 2)]).unwrap();
        let f = GradedPolynomial::constant(q(3, 1), None)
            .mul(&GradedPolynomial::generator(y, None).pow(2));
        assert_eq!(f.multilinear_coefficient(&m), q(6, 1));
    }

    #[test]
    fn display_is_stable() {
        let a = GradedPolynomial::<Q>::generator(xi(1, 0), None);
        let b = GradedPolynomial::<Q>::generator(xi(1, 1), None);
        let p = a.mul(&b).scale(&q(-1, 2)).add(&GradedPolynomial::one(None));
        assert_eq!(p.to_string(), "1 - 1/2*xi1:0*xi1:1");
    }
}
