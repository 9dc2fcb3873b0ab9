//! Finite cosimplicial algebras with exact coefficients: a levelwise algebra
//! tied together by coface and codegeneracy matrices. Normalizing gives a
//! cochain complex carrying the cup product. Inside it, the span of products
//! of codegeneracy-kernel pairs generates a differential ideal that measures
//! how far the algebra is from being a denormalized differential graded
//! algebra; `abstract_diff` presents the quotient by that ideal, and
//! `counit_check` confirms the round trip through `denormalize_algebra`
//! recovers the input on the nose.

use std::collections::BTreeMap;

use crate::cochain::{degeneracy_pullback, face_pullback, Cochain};
use crate::differentiate::{enumerate_monomials_by_degree, CEAlgebra, FramedPresentation};
use crate::dold_kan::{
    codk_coface_matrix, codk_codegeneracy_matrix, wedge_sign, CochainComplex, DKLevelBasis,
};
use crate::matrix::{Matrix, Quotient, SpanBuilder};
use crate::poly::{GeneratorId, GradedPolynomial, Monomial, Parity};
use crate::scalar::Scalar;

/// Sparse vector: (index, coefficient) pairs, sorted by index, no zeros.
pub type SparseVec<S> = Vec<(usize, S)>;

fn sparse_from_dense<S: Scalar>(v: &[S]) -> SparseVec<S> {
    v.iter()
        .enumerate()
        .filter(|(_, c)| !c.is_zero())
        .map(|(i, c)| (i, c.clone()))
        .collect()
}

fn sparse_col<S: Scalar>(m: &Matrix<S>, j: usize) -> SparseVec<S> {
    (0..m.rows)
        .filter(|&i| !m[(i, j)].is_zero())
        .map(|i| (i, m[(i, j)].clone()))
        .collect()
}

fn sparse_apply<S: Scalar>(m: &Matrix<S>, v: &[(usize, S)]) -> SparseVec<S> {
    let mut acc: BTreeMap<usize, S> = BTreeMap::new();
    for (j, c) in v {
        for i in 0..m.rows {
            if m[(i, *j)].is_zero() {
                continue;
            }
            let entry = acc.entry(i).or_insert_with(S::zero);
            *entry = entry.clone() + m[(i, *j)].clone() * c.clone();
        }
    }
    acc.into_iter().filter(|(_, c)| !c.is_zero()).collect()
}

fn columns_to_matrix<S: Scalar>(rows: usize, cols: &[Vec<S>]) -> Matrix<S> {
    let mut m = Matrix::zero(rows, cols.len());
    for (j, col) in cols.iter().enumerate() {
        assert_eq!(col.len(), rows);
        for (i, c) in col.iter().enumerate() {
            m[(i, j)] = c.clone();
        }
    }
    m
}

fn solve_vec<S: Scalar>(m: &Matrix<S>, v: &[S]) -> Option<Vec<S>> {
    let rhs = columns_to_matrix(v.len(), &[v.to_vec()]);
    let sol = m.solve(&rhs)?;
    Some(sol.col(0))
}

/// One level of a cosimplicial algebra: a finite-dimensional algebra with a
/// chosen basis, a parity per basis vector, and a sparse product table.
#[derive(Clone, Debug)]
pub struct LevelAlgebra<S> {
    pub dim: usize,
    pub parity: Vec<Parity>,
    pub unit: Vec<S>,
    pub product: Vec<Vec<SparseVec<S>>>,
}

impl<S: Scalar> LevelAlgebra<S> {
    pub fn mul_vec(&self, u: &[S], v: &[S]) -> Vec<S> {
        assert_eq!(u.len(), self.dim);
        assert_eq!(v.len(), self.dim);
        let mut out = vec![S::zero(); self.dim];
        for (i, cu) in u.iter().enumerate() {
            if cu.is_zero() {
                continue;
            }
            for (j, cv) in v.iter().enumerate() {
                if cv.is_zero() {
                    continue;
                }
                for (t, c) in &self.product[i][j] {
                    out[*t] = out[*t].clone() + cu.clone() * cv.clone() * c.clone();
                }
            }
        }
        out
    }

    pub fn mul_sparse(&self, u: &[(usize, S)], v: &[(usize, S)]) -> SparseVec<S> {
        let mut acc: BTreeMap<usize, S> = BTreeMap::new();
        for (i, cu) in u {
            for (j, cv) in v {
                for (t, c) in &self.product[*i][*j] {
                    let entry = acc.entry(*t).or_insert_with(S::zero);
                    *entry = entry.clone() + cu.clone() * cv.clone() * c.clone();
                }
            }
        }
        acc.into_iter().filter(|(_, c)| !c.is_zero()).collect()
    }
}

/// A cosimplicial algebra stored through a level cap. `coface[n][i]` is the
/// matrix of the i-th coface out of level n, `codegeneracy[n][j]` the j-th
/// codegeneracy from level n+1 down to level n.
#[derive(Clone, Debug)]
pub struct FiniteCosimplicialAlgebra<S> {
    pub levels: Vec<LevelAlgebra<S>>,
    pub coface: Vec<Vec<Matrix<S>>>,
    pub codegeneracy: Vec<Vec<Matrix<S>>>,
    pub graded_commutative: bool,
}

impl<S: Scalar> FiniteCosimplicialAlgebra<S> {
    pub fn cap(&self) -> usize {
        self.levels.len() - 1
    }

    pub fn level(&self, n: usize) -> &LevelAlgebra<S> {
        &self.levels[n]
    }

    pub fn coface(&self, n: usize, i: usize) -> &Matrix<S> {
        &self.coface[n][i]
    }

    pub fn codegeneracy(&self, n: usize, j: usize) -> &Matrix<S> {
        &self.codegeneracy[n][j]
    }

    /// Alternating sum of the cofaces out of level n.
    pub fn delta_matrix(&self, n: usize) -> Matrix<S> {
        let mut out = Matrix::zero(self.levels[n + 1].dim, self.levels[n].dim);
        for (i, m) in self.coface[n].iter().enumerate() {
            out = if i % 2 == 0 { out.add(m) } else { out.sub(m) };
        }
        out
    }

    /// All codegeneracies out of level n, stacked vertically.
    pub fn stacked_codegeneracies(&self, n: usize) -> Matrix<S> {
        assert!(n >= 1);
        let below = self.levels[n - 1].dim;
        let mut m = Matrix::zero(n * below, self.levels[n].dim);
        for j in 0..n {
            let s = &self.codegeneracy[n - 1][j];
            for r in 0..below {
                for c in 0..self.levels[n].dim {
                    m[(j * below + r, c)] = s[(r, c)].clone();
                }
            }
        }
        m
    }

    pub fn validate(&self) -> Result<(), String> {
        let cap = self.cap();
        if self.coface.len() != cap || self.codegeneracy.len() != cap {
            return Err("one coface and one codegeneracy family per adjacent level pair".into());
        }
        for (n, lv) in self.levels.iter().enumerate() {
            self.validate_level(n, lv)?;
        }
        for n in 0..cap {
            if self.coface[n].len() != n + 2 {
                return Err(format!("level {n} needs {} cofaces", n + 2));
            }
            if self.codegeneracy[n].len() != n + 1 {
                return Err(format!("level {n} needs {} codegeneracies", n + 1));
            }
            for (i, m) in self.coface[n].iter().enumerate() {
                self.validate_map(m, n, n + 1, &format!("coface {i} at level {n}"))?;
            }
            for (j, m) in self.codegeneracy[n].iter().enumerate() {
                self.validate_map(m, n + 1, n, &format!("codegeneracy {j} at level {}", n + 1))?;
            }
        }
        self.validate_identities()
    }

    fn validate_level(&self, n: usize, lv: &LevelAlgebra<S>) -> Result<(), String> {
        if lv.parity.len() != lv.dim || lv.unit.len() != lv.dim || lv.product.len() != lv.dim {
            return Err(format!("level {n} has inconsistent dimensions"));
        }
        for (i, &p) in lv.parity.iter().enumerate() {
            if p.is_odd() && !lv.unit[i].is_zero() {
                return Err(format!("level {n} unit has an odd component"));
            }
        }
        for i in 0..lv.dim {
            if lv.product[i].len() != lv.dim {
                return Err(format!("level {n} product table is ragged"));
            }
            for j in 0..lv.dim {
                for (t, c) in &lv.product[i][j] {
                    if *t >= lv.dim {
                        return Err(format!("level {n} product entry out of range"));
                    }
                    if c.is_zero() {
                        return Err(format!("level {n} product table stores a zero"));
                    }
                    if lv.parity[*t] != lv.parity[i].xor(lv.parity[j]) {
                        return Err(format!(
                            "level {n} product of basis {i},{j} is not parity homogeneous"
                        ));
                    }
                }
            }
        }
        for i in 0..lv.dim {
            let mut e = vec![S::zero(); lv.dim];
            e[i] = S::one();
            if lv.mul_vec(&lv.unit, &e) != e || lv.mul_vec(&e, &lv.unit) != e {
                return Err(format!("level {n} unit law fails on basis vector {i}"));
            }
        }
        for i in 0..lv.dim {
            for j in 0..lv.dim {
                let pij = &lv.product[i][j];
                let pjk_all = &lv.product[j];
                for k in 0..lv.dim {
                    let pjk = &pjk_all[k];
                    if pij.is_empty() && pjk.is_empty() {
                        continue;
                    }
                    let mut lhs: BTreeMap<usize, S> = BTreeMap::new();
                    for (t, c) in pij {
                        for (u, e) in &lv.product[*t][k] {
                            let entry = lhs.entry(*u).or_insert_with(S::zero);
                            *entry = entry.clone() + c.clone() * e.clone();
                        }
                    }
                    let mut rhs: BTreeMap<usize, S> = BTreeMap::new();
                    for (t, c) in pjk {
                        for (u, e) in &lv.product[i][*t] {
                            let entry = rhs.entry(*u).or_insert_with(S::zero);
                            *entry = entry.clone() + c.clone() * e.clone();
                        }
                    }
                    lhs.retain(|_, c| !c.is_zero());
                    rhs.retain(|_, c| !c.is_zero());
                    if lhs != rhs {
                        return Err(format!(
                            "level {n} product is not associative on basis {i},{j},{k}"
                        ));
                    }
                }
            }
        }
        if self.graded_commutative {
            for i in 0..lv.dim {
                for j in 0..lv.dim {
                    let flip = lv.parity[i].is_odd() && lv.parity[j].is_odd();
                    let mut expect = lv.product[j][i].clone();
                    if flip {
                        for (_, c) in &mut expect {
                            *c = -c.clone();
                        }
                    }
                    if lv.product[i][j] != expect {
                        return Err(format!(
                            "level {n} fails graded commutativity on basis {i},{j}"
                        ));
                    }
                }
            }
        }
        Ok(())
    }

    fn validate_map(
        &self,
        m: &Matrix<S>,
        src: usize,
        dst: usize,
        what: &str,
    ) -> Result<(), String> {
        check_algebra_map(&self.levels[src], &self.levels[dst], m, what)
    }

    fn validate_identities(&self) -> Result<(), String> {
        let cap = self.cap();
        let composite = |m2: &Matrix<S>, m1: &Matrix<S>, c: usize| -> SparseVec<S> {
            sparse_apply(m2, &sparse_col(m1, c))
        };
        for n in 0..cap.saturating_sub(1) {
            let dim = self.levels[n].dim;
            for i in 0..=n + 1 {
                for j in i + 1..=n + 2 {
                    for c in 0..dim {
                        let lhs = composite(&self.coface[n + 1][j], &self.coface[n][i], c);
                        let rhs = composite(&self.coface[n + 1][i], &self.coface[n][j - 1], c);
                        if lhs != rhs {
                            return Err(format!("coface identity fails: n={n} i={i} j={j}"));
                        }
                    }
                }
            }
            let dim2 = self.levels[n + 2].dim;
            for i in 0..=n + 1 {
                for j in i..=n {
                    for c in 0..dim2 {
                        let lhs =
                            composite(&self.codegeneracy[n][j], &self.codegeneracy[n + 1][i], c);
                        let rhs = composite(
                            &self.codegeneracy[n][i],
                            &self.codegeneracy[n + 1][j + 1],
                            c,
                        );
                        if lhs != rhs {
                            return Err(format!("codegeneracy identity fails: n={n} i={i} j={j}"));
                        }
                    }
                }
            }
        }
        for n in 0..cap {
            let dim = self.levels[n].dim;
            for j in 0..=n {
                for i in 0..=n + 1 {
                    for c in 0..dim {
                        let lhs = composite(&self.codegeneracy[n][j], &self.coface[n][i], c);
                        let rhs: SparseVec<S> = if i == j || i == j + 1 {
                            vec![(c, S::one())]
                        } else if i < j {
                            composite(&self.coface[n - 1][i], &self.codegeneracy[n - 1][j - 1], c)
                        } else {
                            composite(&self.coface[n - 1][i - 1], &self.codegeneracy[n - 1][j], c)
                        };
                        if lhs != rhs {
                            return Err(format!("mixed identity fails: n={n} i={i} j={j}"));
                        }
                    }
                }
            }
        }
        Ok(())
    }
}

/// Columns of the kernel of a parity-preserving matrix, computed one parity
/// sector at a time so every basis vector is parity homogeneous.
fn parity_kernel_columns<S: Scalar>(
    m: &Matrix<S>,
    parity: &[Parity],
) -> Vec<(Vec<S>, Parity)> {
    let mut out = Vec::new();
    for par in [Parity::Even, Parity::Odd] {
        let idx: Vec<usize> = (0..m.cols).filter(|&c| parity[c] == par).collect();
        if idx.is_empty() {
            continue;
        }
        let sub = Matrix::from_fn(m.rows, idx.len(), |r, c| m[(r, idx[c])].clone());
        for k in sub.kernel_basis() {
            let mut full = vec![S::zero(); m.cols];
            for (t, c) in k.into_iter().enumerate() {
                full[idx[t]] = c;
            }
            out.push((full, par));
        }
    }
    out
}

/// The normalized cochain complex of a cosimplicial algebra: per-level bases
/// of the joint codegeneracy kernels (in ambient coordinates) together with
/// the restricted alternating-sum differential.
#[derive(Clone, Debug)]
pub struct NormalizedComplex<S> {
    pub bases: Vec<Matrix<S>>,
    pub parities: Vec<Vec<Parity>>,
    pub differentials: Vec<Matrix<S>>,
}

impl<S: Scalar> NormalizedComplex<S> {
    pub fn dim(&self, n: usize) -> usize {
        self.bases[n].cols
    }

    pub fn embed(&self, n: usize, coords: &[S]) -> Vec<S> {
        self.bases[n].apply(coords)
    }

    pub fn express(&self, n: usize, ambient: &[S]) -> Result<Vec<S>, String> {
        solve_vec(&self.bases[n], ambient)
            .ok_or_else(|| format!("vector at level {n} is not normalized"))
    }

    /// Cup product in ambient coordinates of level p+q: rear cofaces on the
    /// left factor, front cofaces on the right, then the level product.
    pub fn cup_ambient(
        &self,
        x: &FiniteCosimplicialAlgebra<S>,
        p: usize,
        q: usize,
        u: &[S],
        v: &[S],
    ) -> Vec<S> {
        assert!(p + q <= x.cap(), "cup lands beyond the level cap");
        let mut left = self.embed(p, u);
        for m in p..p + q {
            left = x.coface(m, p + 1).apply(&left);
        }
        let mut right = self.embed(q, v);
        for m in q..q + p {
            right = x.coface(m, 0).apply(&right);
        }
        x.level(p + q).mul_vec(&left, &right)
    }

    /// Cup product in normalized coordinates.
    pub fn cup(
        &self,
        x: &FiniteCosimplicialAlgebra<S>,
        p: usize,
        q: usize,
        u: &[S],
        v: &[S],
    ) -> Result<Vec<S>, String> {
        self.express(p + q, &self.cup_ambient(x, p, q, u, v))
    }

    /// Express many ambient vectors at once, sharing one elimination.
    fn express_columns(&self, n: usize, cols: &[Vec<S>]) -> Result<Vec<Vec<S>>, String> {
        if cols.is_empty() {
            return Ok(Vec::new());
        }
        let rhs = columns_to_matrix(self.bases[n].rows, cols);
        let sol = self
            .bases[n]
            .solve(&rhs)
            .ok_or_else(|| format!("vector at level {n} is not normalized"))?;
        Ok((0..cols.len()).map(|j| sol.col(j)).collect())
    }
}

pub fn cosimplicial_normalize<S: Scalar>(
    x: &FiniteCosimplicialAlgebra<S>,
) -> Result<NormalizedComplex<S>, String> {
    let cap = x.cap();
    let mut bases = vec![Matrix::identity(x.level(0).dim)];
    let mut parities = vec![x.level(0).parity.clone()];
    for n in 1..=cap {
        let stacked = x.stacked_codegeneracies(n);
        let cols = parity_kernel_columns(&stacked, &x.level(n).parity);
        let dim = x.level(n).dim;
        bases.push(columns_to_matrix(
            dim,
            &cols.iter().map(|(v, _)| v.clone()).collect::<Vec<_>>(),
        ));
        parities.push(cols.into_iter().map(|(_, p)| p).collect());
    }
    let mut differentials = Vec::new();
    for n in 0..cap {
        let rhs = x.delta_matrix(n).mul(&bases[n]);
        let sol = bases[n + 1].solve(&rhs).ok_or_else(|| {
            format!("differential image escapes the normalized part at level {n}")
        })?;
        differentials.push(sol);
    }
    Ok(NormalizedComplex {
        bases,
        parities,
        differentials,
    })
}

/// A pair of elements killed by the same codegeneracy whose product has a
/// nonzero normalized component, exhibiting a nonzero square-kernel ideal.
#[derive(Clone, Debug)]
pub struct InfinitesimalWitness<S> {
    pub level: usize,
    pub codegeneracy: usize,
    pub left: Vec<S>,
    pub right: Vec<S>,
    pub product: Vec<S>,
    pub normalized_part: Vec<S>,
}

#[derive(Clone, Debug)]
pub struct InfinitesimalReport<S> {
    pub infinitesimal: bool,
    pub levels_checked: usize,
    pub witness: Option<InfinitesimalWitness<S>>,
}

/// Per-level data of the square-kernel ideal: the span of all products of
/// two vectors lying in a common codegeneracy kernel, plus enough records to
/// reconstruct individual products.
fn level_square_products<S: Scalar>(
    x: &FiniteCosimplicialAlgebra<S>,
    n: usize,
) -> (SpanBuilder<S>, Vec<(usize, usize, usize)>, Vec<Vec<Vec<S>>>) {
    let dim = x.level(n).dim;
    let kernels: Vec<Vec<Vec<S>>> = (0..n)
        .map(|j| x.codegeneracy(n - 1, j).kernel_basis())
        .collect();
    let mut span = SpanBuilder::new(dim);
    let mut recorded = Vec::new();
    for (j, kb) in kernels.iter().enumerate() {
        for a in 0..kb.len() {
            for b in 0..kb.len() {
                let prod = x.level(n).mul_vec(&kb[a], &kb[b]);
                if prod.iter().all(|c| c.is_zero()) {
                    continue;
                }
                recorded.push((j, a, b));
                span.insert(&prod);
            }
        }
    }
    (span, recorded, kernels)
}

/// Basis (in ambient coordinates) of the intersection of the square-kernel
/// span with the normalized part of level n.
fn level_ideal_basis<S: Scalar>(
    x: &FiniteCosimplicialAlgebra<S>,
    n: usize,
    span: &SpanBuilder<S>,
) -> Vec<Vec<S>> {
    if n == 0 || span.rank() == 0 {
        return Vec::new();
    }
    let dim = x.level(n).dim;
    let p = columns_to_matrix(dim, span.basis());
    let mp = x.stacked_codegeneracies(n).mul(&p);
    mp.kernel_basis().into_iter().map(|k| p.apply(&k)).collect()
}

/// Rows of `C^{-1}` projecting onto normalized coordinates, where the level
/// splits as normalized part plus the span of the positive coface images.
fn normalized_projector<S: Scalar>(
    x: &FiniteCosimplicialAlgebra<S>,
    nc: &NormalizedComplex<S>,
    n: usize,
) -> Result<Matrix<S>, String> {
    let dim = x.level(n).dim;
    let nd = nc.dim(n);
    let mut degenerate = SpanBuilder::new(dim);
    for i in 1..=n {
        let m = x.coface(n - 1, i);
        for c in 0..m.cols {
            degenerate.insert(&m.col(c));
        }
    }
    if nd + degenerate.rank() != dim {
        return Err(format!(
            "level {n} does not split into normalized and degenerate parts"
        ));
    }
    let mut combined = nc.bases[n].clone();
    for col in degenerate.basis() {
        combined = combined.hcat(&columns_to_matrix(dim, &[col.clone()]));
    }
    let inv = combined
        .inverse()
        .ok_or_else(|| format!("normalized and degenerate parts overlap at level {n}"))?;
    Ok(Matrix::from_fn(nd, dim, |r, c| inv[(r, c)].clone()))
}

/// Decide whether every product of two vectors sharing a codegeneracy kernel
/// stays outside the normalized part, through the stored level cap. A
/// failure comes with an explicit product pair.
pub fn is_infinitesimal<S: Scalar>(
    x: &FiniteCosimplicialAlgebra<S>,
) -> Result<InfinitesimalReport<S>, String> {
    let nc = cosimplicial_normalize(x)?;
    for n in 1..=x.cap() {
        let (span, recorded, kernels) = level_square_products(x, n);
        if level_ideal_basis(x, n, &span).is_empty() {
            continue;
        }
        let proj = normalized_projector(x, &nc, n)?;
        for (j, a, b) in &recorded {
            let left = kernels[*j][*a].clone();
            let right = kernels[*j][*b].clone();
            let product = x.level(n).mul_vec(&left, &right);
            let normalized_part = proj.apply(&product);
            if normalized_part.iter().any(|c| !c.is_zero()) {
                return Ok(InfinitesimalReport {
                    infinitesimal: false,
                    levels_checked: x.cap(),
                    witness: Some(InfinitesimalWitness {
                        level: n,
                        codegeneracy: *j,
                        left,
                        right,
                        product,
                        normalized_part,
                    }),
                });
            }
        }
        return Err(format!(
            "square-kernel ideal is nonzero at level {n} but no single product has a \
             normalized component"
        ));
    }
    Ok(InfinitesimalReport {
        infinitesimal: true,
        levels_checked: x.cap(),
        witness: None,
    })
}

/// A differential graded algebra on explicit bases: a cochain complex, a
/// parity per basis vector (the sign rule pairs it with the cohomological
/// degree: basis elements commute up to `(-1)^{pq + P(u)P(v)}`), a unit, and
/// sparse product tables for every degree pair inside the cap. Degrees above
/// the cap are not represented; products landing there are dropped.
#[derive(Clone, Debug)]
pub struct DGAlgebraPresentation<S> {
    complex: CochainComplex<S>,
    parity: Vec<Vec<Parity>>,
    unit: Vec<S>,
    product: Vec<Vec<Vec<Vec<SparseVec<S>>>>>,
    graded_commutative: bool,
}

impl<S: Scalar> DGAlgebraPresentation<S> {
    pub fn new(
        complex: CochainComplex<S>,
        parity: Vec<Vec<Parity>>,
        unit: Vec<S>,
        product: Vec<Vec<Vec<Vec<SparseVec<S>>>>>,
        graded_commutative: bool,
    ) -> Result<Self, String> {
        let p = DGAlgebraPresentation {
            complex,
            parity,
            unit,
            product,
            graded_commutative,
        };
        p.validate()?;
        Ok(p)
    }

    pub fn max_degree(&self) -> usize {
        self.complex.ranks.len() - 1
    }

    pub fn dim(&self, p: usize) -> usize {
        self.complex.rank(p)
    }

    pub fn ranks(&self) -> &[usize] {
        &self.complex.ranks
    }

    pub fn complex(&self) -> &CochainComplex<S> {
        &self.complex
    }

    pub fn differential(&self, p: usize) -> Matrix<S> {
        self.complex.d_from(p)
    }

    pub fn unit(&self) -> &[S] {
        &self.unit
    }

    pub fn parity(&self, p: usize, i: usize) -> Parity {
        self.parity[p][i]
    }

    pub fn graded_commutative(&self) -> bool {
        self.graded_commutative
    }

    pub fn product_entry(&self, a: usize, b: usize, i: usize, j: usize) -> Option<&[(usize, S)]> {
        if a + b > self.max_degree() {
            return None;
        }
        Some(&self.product[a][b][i][j])
    }

    /// Bilinear product of coordinate vectors in degrees a and b. Panics when
    /// the target degree exceeds the cap.
    pub fn multiply(&self, a: usize, b: usize, u: &[S], v: &[S]) -> Vec<S> {
        assert!(a + b <= self.max_degree(), "product beyond the degree cap");
        let mut out = vec![S::zero(); self.dim(a + b)];
        for (i, cu) in u.iter().enumerate() {
            if cu.is_zero() {
                continue;
            }
            for (j, cv) in v.iter().enumerate() {
                if cv.is_zero() {
                    continue;
                }
                for (t, c) in &self.product[a][b][i][j] {
                    out[*t] = out[*t].clone() + cu.clone() * cv.clone() * c.clone();
                }
            }
        }
        out
    }

    fn basis_vec(&self, p: usize, i: usize) -> Vec<S> {
        let mut v = vec![S::zero(); self.dim(p)];
        v[i] = S::one();
        v
    }

    pub fn validate(&self) -> Result<(), String> {
        let dmax = self.max_degree();
        if self.parity.len() != dmax + 1 || self.product.len() != dmax + 1 {
            return Err("parity and product tables must cover every degree".into());
        }
        for p in 0..=dmax {
            if self.parity[p].len() != self.dim(p) {
                return Err(format!("degree {p} parity list has the wrong length"));
            }
            if self.product[p].len() != dmax + 1 - p {
                return Err(format!("degree {p} product table has the wrong width"));
            }
            for q in 0..=dmax - p {
                let tab = &self.product[p][q];
                if tab.len() != self.dim(p) || tab.iter().any(|row| row.len() != self.dim(q)) {
                    return Err(format!("product table {p}x{q} has the wrong shape"));
                }
                for (i, row) in tab.iter().enumerate() {
                    for (j, entry) in row.iter().enumerate() {
                        for (t, c) in entry {
                            if *t >= self.dim(p + q) {
                                return Err(format!("product {p}x{q} entry out of range"));
                            }
                            if c.is_zero() {
                                return Err(format!("product {p}x{q} stores a zero"));
                            }
                            if self.parity[p + q][*t] != self.parity[p][i].xor(self.parity[q][j]) {
                                return Err(format!(
                                    "product of ({p},{i}) and ({q},{j}) is not parity homogeneous"
                                ));
                            }
                        }
                    }
                }
            }
        }
        if self.unit.len() != self.dim(0) {
            return Err("unit has the wrong length".into());
        }
        for (i, c) in self.unit.iter().enumerate() {
            if !c.is_zero() && self.parity[0][i].is_odd() {
                return Err("unit has an odd component".into());
            }
        }
        for p in 0..=dmax {
            for i in 0..self.dim(p) {
                let e = self.basis_vec(p, i);
                if self.multiply(0, p, &self.unit, &e) != e
                    || self.multiply(p, 0, &e, &self.unit) != e
                {
                    return Err(format!("unit law fails in degree {p}"));
                }
            }
        }
        for p in 0..=dmax {
            let d = self.differential(p);
            for c in 0..self.dim(p) {
                for r in 0..d.rows {
                    if !d[(r, c)].is_zero() && self.parity[p + 1][r] != self.parity[p][c] {
                        return Err(format!("differential breaks parity in degree {p}"));
                    }
                }
            }
        }
        for a in 0..=dmax {
            for b in 0..=dmax - a {
                for c in 0..=dmax - a - b {
                    for i in 0..self.dim(a) {
                        for j in 0..self.dim(b) {
                            let ij = self.multiply(a, b, &self.basis_vec(a, i), &self.basis_vec(b, j));
                            for k in 0..self.dim(c) {
                                let jk = self.multiply(b, c, &self.basis_vec(b, j), &self.basis_vec(c, k));
                                let lhs = self.multiply(a + b, c, &ij, &self.basis_vec(c, k));
                                let rhs = self.multiply(a, b + c, &self.basis_vec(a, i), &jk);
                                if lhs != rhs {
                                    return Err(format!(
                                        "associativity fails on ({a},{i})({b},{j})({c},{k})"
                                    ));
                                }
                            }
                        }
                    }
                }
            }
        }
        for a in 0..=dmax {
            for b in 0..dmax.saturating_sub(a) {
                let da = self.differential(a);
                let db = self.differential(b);
                let dab = self.differential(a + b);
                for i in 0..self.dim(a) {
                    for j in 0..self.dim(b) {
                        let prod = self.multiply(a, b, &self.basis_vec(a, i), &self.basis_vec(b, j));
                        let lhs = dab.apply(&prod);
                        let left = self.multiply(a + 1, b, &da.col(i), &self.basis_vec(b, j));
                        let right = self.multiply(a, b + 1, &self.basis_vec(a, i), &db.col(j));
                        let rhs: Vec<S> = left
                            .iter()
                            .zip(&right)
                            .map(|(l, r)| {
                                if a % 2 == 0 {
                                    l.clone() + r.clone()
                                } else {
                                    l.clone() - r.clone()
                                }
                            })
                            .collect();
                        if lhs != rhs {
                            return Err(format!(
                                "Leibniz rule fails on ({a},{i}) and ({b},{j})"
                            ));
                        }
                    }
                }
            }
        }
        if self.graded_commutative {
            for a in 0..=dmax {
                for b in 0..=dmax - a {
                    for i in 0..self.dim(a) {
                        for j in 0..self.dim(b) {
                            let fwd =
                                self.multiply(a, b, &self.basis_vec(a, i), &self.basis_vec(b, j));
                            let bwd =
                                self.multiply(b, a, &self.basis_vec(b, j), &self.basis_vec(a, i));
                            let deg_flip = (a * b) % 2 == 1;
                            let par_flip =
                                self.parity[a][i].is_odd() && self.parity[b][j].is_odd();
                            let expect: Vec<S> = if deg_flip != par_flip {
                                bwd.iter().map(|c| -c.clone()).collect()
                            } else {
                                bwd
                            };
                            if fwd != expect {
                                return Err(format!(
                                    "graded commutativity fails on ({a},{i}) and ({b},{j})"
                                ));
                            }
                        }
                    }
                }
            }
        }
        Ok(())
    }
}

/// Free graded-commutative differential graded algebra on even-intrinsic
/// generators, presented on monomial bases through `max_degree`. The
/// differential is the odd derivation extending the given generator images.
pub fn free_graded_commutative_dga<S: Scalar>(
    generators: &[GeneratorId],
    images: &BTreeMap<GeneratorId, GradedPolynomial<S>>,
    max_degree: usize,
) -> Result<DGAlgebraPresentation<S>, String> {
    let mut bases: Vec<Vec<Monomial>> = vec![vec![Monomial::one()]];
    for d in 1..=max_degree {
        bases.push(enumerate_monomials_by_degree(generators, d as u32));
    }
    monomial_basis_dga(&bases, images)
}

/// Assemble a presentation from explicit monomial bases per degree. Products
/// and differentials whose monomials are missing from the target basis are
/// dropped, presenting the quotient by the span of the omitted monomials;
/// the final validation rejects any choice where that span is not an ideal
/// closed under the differential.
pub fn monomial_basis_dga<S: Scalar>(
    bases: &[Vec<Monomial>],
    images: &BTreeMap<GeneratorId, GradedPolynomial<S>>,
) -> Result<DGAlgebraPresentation<S>, String> {
    let max_degree = bases.len() - 1;
    let ranks: Vec<usize> = bases.iter().map(Vec::len).collect();
    let index: Vec<BTreeMap<&Monomial, usize>> = bases
        .iter()
        .map(|b| b.iter().enumerate().map(|(i, m)| (m, i)).collect())
        .collect();
    let expand = |poly: &GradedPolynomial<S>, degree: usize| -> Vec<S> {
        let mut out = vec![S::zero(); ranks[degree]];
        for (m, c) in poly.terms() {
            if let Some(&i) = index[degree].get(m) {
                out[i] = c.clone();
            }
        }
        out
    };
    let mut d_mats = Vec::new();
    for p in 0..max_degree {
        let mut m = Matrix::zero(ranks[p + 1], ranks[p]);
        for (i, mono) in bases[p].iter().enumerate() {
            let mut f = GradedPolynomial::zero(None);
            f.add_term(mono.clone(), S::one());
            let df = crate::differentiate::derivation_apply(images, &f)?;
            for (r, c) in expand(&df, p + 1).into_iter().enumerate() {
                m[(r, i)] = c;
            }
        }
        d_mats.push(m);
    }
    let complex = CochainComplex::new(ranks.clone(), d_mats)?;
    let mut product = Vec::new();
    for a in 0..=max_degree {
        let mut per_a = Vec::new();
        for b in 0..=max_degree - a {
            let mut tab = vec![vec![Vec::new(); ranks[b]]; ranks[a]];
            for (i, ma) in bases[a].iter().enumerate() {
                for (j, mb) in bases[b].iter().enumerate() {
                    if let Some((m, sign)) = ma.mul(mb) {
                        if let Some(&t) = index[a + b].get(&m) {
                            tab[i][j] = vec![(t, S::from_int(sign as i64))];
                        }
                    }
                }
            }
            per_a.push(tab);
        }
        product.push(per_a);
    }
    let parity = ranks.iter().map(|&r| vec![Parity::Even; r]).collect();
    DGAlgebraPresentation::new(complex, parity, vec![S::one()], product, true)
}

/// The presentation of a differentiated algebra on its canonical monomial
/// bases. Super inputs are refused: their sign rule folds intrinsic parity
/// into the single polynomial parity, which this presentation keeps separate.
pub fn dga_from_ce<S: Scalar>(
    ce: &CEAlgebra<S>,
    max_degree: usize,
) -> Result<DGAlgebraPresentation<S>, String> {
    if ce.superized {
        return Err("presentations of super differentiated algebras are not supported".into());
    }
    if max_degree > ce.max_degree {
        return Err(format!(
            "differentials are stored through degree {}, requested {max_degree}",
            ce.max_degree
        ));
    }
    let gens: Vec<GeneratorId> = ce
        .generators()
        .into_iter()
        .map(|(n, l)| GeneratorId::xi(n as u32, l))
        .collect();
    let mut images = ce.d_images();
    for g in &gens {
        images
            .entry(g.clone())
            .or_insert_with(|| GradedPolynomial::zero(None));
    }
    free_graded_commutative_dga(&gens, &images, max_degree)
}

/// The result of quotienting the normalized complex by the differential
/// ideal generated by the square-kernel intersections.
pub struct AbstractDifferentiation<S> {
    pub dga: DGAlgebraPresentation<S>,
    pub normalized_dims: Vec<usize>,
    pub ideal_dims: Vec<usize>,
    normalized: NormalizedComplex<S>,
    quotients: Vec<Quotient<S>>,
    ideal_bases: Vec<Vec<Vec<S>>>,
}

impl<S: Scalar> AbstractDifferentiation<S> {
    pub fn degree(&self) -> usize {
        self.dga.max_degree()
    }

    pub fn normalized(&self) -> &NormalizedComplex<S> {
        &self.normalized
    }

    /// Quotient coordinates of a normalized-coordinate vector at level n.
    pub fn class_of(&self, n: usize, normalized_coords: &[S]) -> Vec<S> {
        self.quotients[n].coset_coords(normalized_coords)
    }

    /// Normalized-coordinate representative of quotient basis vector t.
    pub fn representative(&self, n: usize, t: usize) -> Vec<S> {
        self.quotients[n].lift(t)
    }

    pub fn ideal_contains(&self, n: usize, normalized_coords: &[S]) -> bool {
        self.quotients[n].contains(normalized_coords)
    }

    pub fn ideal_basis(&self, n: usize) -> &[Vec<S>] {
        &self.ideal_bases[n]
    }
}

/// Quotient the normalized complex by the differential ideal generated by
/// the per-level intersections of squared codegeneracy kernels with the
/// normalized part. The cap must reach the requested degree: the ideal in
/// degree n needs the square spans of levels n and n-1 plus a differential.
pub fn abstract_diff<S: Scalar>(
    x: &FiniteCosimplicialAlgebra<S>,
    degree: usize,
) -> Result<AbstractDifferentiation<S>, String> {
    let cap = x.cap();
    if degree > cap {
        return Err(format!(
            "level cap {cap} is too small to close the differential ideal in degree {degree}"
        ));
    }
    let nc = cosimplicial_normalize(x)?;
    let mut square_ideals: Vec<Vec<Vec<S>>> = Vec::new();
    for n in 0..=degree {
        if n == 0 {
            square_ideals.push(Vec::new());
            continue;
        }
        let (span, _, _) = level_square_products(x, n);
        let mut in_normalized = Vec::new();
        for v in level_ideal_basis(x, n, &span) {
            in_normalized.push(nc.express(n, &v)?);
        }
        square_ideals.push(in_normalized);
    }
    // Closing the ideal: generators are the square-kernel intersections and
    // their differentials; multiplying by every normalized basis vector on
    // both sides spans the two-sided ideal they generate degreewise.
    let generators_at = |q: usize| -> Vec<Vec<S>> {
        let mut g: Vec<Vec<S>> = square_ideals[q].clone();
        if q >= 1 {
            for v in &square_ideals[q - 1] {
                g.push(nc.differentials[q - 1].apply(v));
            }
        }
        g
    };
    let mut ideal_bases: Vec<Vec<Vec<S>>> = Vec::new();
    let mut quotients: Vec<Quotient<S>> = Vec::new();
    for n in 0..=degree {
        let mut products: Vec<Vec<S>> = Vec::new();
        for p in 0..=n {
            let q = n - p;
            let gens_q = generators_at(q);
            if gens_q.is_empty() {
                continue;
            }
            for t in 0..nc.dim(p) {
                let mut e = vec![S::zero(); nc.dim(p)];
                e[t] = S::one();
                for g in &gens_q {
                    products.push(nc.cup_ambient(x, p, q, &e, g));
                    products.push(nc.cup_ambient(x, q, p, g, &e));
                }
            }
        }
        let mut full = SpanBuilder::new(nc.dim(n));
        for v in nc.express_columns(n, &products)? {
            full.insert(&v);
        }
        let basis: Vec<Vec<S>> = full.basis().to_vec();
        quotients.push(Quotient::by_span(nc.dim(n), &basis));
        ideal_bases.push(basis);
    }
    let dims: Vec<usize> = quotients.iter().map(Quotient::quotient_dim).collect();
    let mut d_mats = Vec::new();
    for n in 0..degree {
        let mut m = Matrix::zero(dims[n + 1], dims[n]);
        for t in 0..dims[n] {
            let image = nc.differentials[n].apply(&quotients[n].lift(t));
            for (r, c) in quotients[n + 1].coset_coords(&image).into_iter().enumerate() {
                m[(r, t)] = c;
            }
        }
        d_mats.push(m);
    }
    let complex = CochainComplex::new(dims.clone(), d_mats)?;
    let mut parity: Vec<Vec<Parity>> = Vec::new();
    for n in 0..=degree {
        parity.push(
            quotients[n]
                .free
                .iter()
                .map(|&i| nc.parities[n][i])
                .collect(),
        );
    }
    let mut product = Vec::new();
    for p in 0..=degree {
        let mut per_p = Vec::new();
        for q in 0..=degree - p {
            let mut ambient = Vec::new();
            for i in 0..dims[p] {
                for j in 0..dims[q] {
                    ambient.push(nc.cup_ambient(
                        x,
                        p,
                        q,
                        &quotients[p].lift(i),
                        &quotients[q].lift(j),
                    ));
                }
            }
            let expressed = nc.express_columns(p + q, &ambient)?;
            let mut tab = vec![vec![Vec::new(); dims[q]]; dims[p]];
            for (i, row) in tab.iter_mut().enumerate() {
                for (j, entry) in row.iter_mut().enumerate() {
                    let w = &expressed[i * dims[q] + j];
                    *entry = sparse_from_dense(&quotients[p + q].coset_coords(w));
                }
            }
            per_p.push(tab);
        }
        product.push(per_p);
    }
    let unit_coords = nc.express(0, &x.level(0).unit)?;
    let unit = quotients[0].coset_coords(&unit_coords);
    let dga = DGAlgebraPresentation::new(complex, parity, unit, product, x.graded_commutative)
        .map_err(|e| format!("quotient presentation is inconsistent: {e}"))?;
    let normalized_dims = (0..=degree).map(|n| nc.dim(n)).collect();
    let ideal_dims = quotients.iter().map(Quotient::subspace_dim).collect();
    Ok(AbstractDifferentiation {
        dga,
        normalized_dims,
        ideal_dims,
        normalized: nc,
        quotients,
        ideal_bases,
    })
}

/// The denormalized cosimplicial algebra of a differential graded algebra:
/// level n has basis (subset, label) with the label running over the basis
/// of the degree-|subset| piece, the product wedges disjoint subsets, and
/// the zeroth coface feeds the differential in. Only even intrinsic parity
/// is supported; graded signs come from the cohomological degree.
pub fn denormalize_algebra<S: Scalar>(
    y: &DGAlgebraPresentation<S>,
    cap: usize,
) -> Result<FiniteCosimplicialAlgebra<S>, String> {
    for p in 0..=y.max_degree() {
        for i in 0..y.dim(p) {
            if y.parity(p, i).is_odd() {
                return Err("denormalization needs even intrinsic parity".into());
            }
        }
    }
    let ranks = y.ranks().to_vec();
    let mut levels = Vec::new();
    for n in 0..=cap {
        let basis = DKLevelBasis::new(&ranks, n);
        let dim = basis.dim();
        let mut unit = vec![S::zero(); dim];
        for (l, c) in y.unit().iter().enumerate() {
            unit[basis.position(&Vec::new(), l)] = c.clone();
        }
        let mut table = vec![vec![Vec::new(); dim]; dim];
        for (ia, ea) in basis.elems.iter().enumerate() {
            for (ib, eb) in basis.elems.iter().enumerate() {
                let Some(sign) = wedge_sign(&ea.alpha, &eb.alpha) else {
                    continue;
                };
                let (ka, kb) = (ea.alpha.len(), eb.alpha.len());
                let Some(entry) = y.product_entry(ka, kb, ea.label, eb.label) else {
                    continue;
                };
                let mut union: Vec<usize> =
                    ea.alpha.iter().chain(eb.alpha.iter()).copied().collect();
                union.sort_unstable();
                let mut out = Vec::new();
                for (t, c) in entry {
                    let signed = if sign < 0 { -c.clone() } else { c.clone() };
                    out.push((basis.position(&union, *t), signed));
                }
                out.sort_by_key(|(t, _)| *t);
                table[ia][ib] = out;
            }
        }
        levels.push(LevelAlgebra {
            dim,
            parity: vec![Parity::Even; dim],
            unit,
            product: table,
        });
    }
    let coface = (0..cap)
        .map(|n| {
            (0..=n + 1)
                .map(|i| codk_coface_matrix(y.complex(), n, i))
                .collect()
        })
        .collect();
    let codegeneracy = (0..cap)
        .map(|n| {
            (0..=n)
                .map(|j| codk_codegeneracy_matrix(y.complex(), n, j))
                .collect()
        })
        .collect();
    Ok(FiniteCosimplicialAlgebra {
        levels,
        coface,
        codegeneracy,
        graded_commutative: true,
    })
}

/// The canonical degreewise map from the abstract differentiation of a
/// denormalized algebra back to the algebra it came from: project a
/// representative onto the full-subset coordinates.
pub fn counit_map<S: Scalar>(
    a: &AbstractDifferentiation<S>,
    y: &DGAlgebraPresentation<S>,
) -> Vec<Matrix<S>> {
    let mut maps = Vec::new();
    for n in 0..=a.degree() {
        let basis = DKLevelBasis::new(y.ranks(), n);
        let full: Vec<usize> = (1..=n).collect();
        let mut m = Matrix::zero(y.dim(n), a.dga.dim(n));
        for t in 0..a.dga.dim(n) {
            let ambient = a.normalized.embed(n, &a.representative(n, t));
            for l in 0..y.dim(n) {
                m[(l, t)] = ambient[basis.position(&full, l)].clone();
            }
        }
        maps.push(m);
    }
    maps
}

#[derive(Debug)]
pub struct CounitReport<S> {
    pub infinitesimal: bool,
    pub dims_match: bool,
    pub algebra_iso: bool,
    pub maps: Vec<Matrix<S>>,
}

impl<S> CounitReport<S> {
    pub fn ok(&self) -> bool {
        self.infinitesimal && self.dims_match && self.algebra_iso
    }
}

/// Round-trip check: denormalize, differentiate abstractly, and verify the
/// canonical map back is an isomorphism of differential graded algebras.
pub fn counit_check<S: Scalar>(y: &DGAlgebraPresentation<S>) -> Result<CounitReport<S>, String> {
    let x = denormalize_algebra(y, y.max_degree())?;
    x.validate()?;
    let infinitesimal = is_infinitesimal(&x)?.infinitesimal;
    let a = abstract_diff(&x, y.max_degree())?;
    let maps = counit_map(&a, y);
    let dims_match = (0..=y.max_degree()).all(|n| a.dga.dim(n) == y.dim(n));
    let mut algebra_iso = dims_match;
    if dims_match {
        for m in &maps {
            if m.rows != m.cols || m.inverse().is_none() {
                algebra_iso = false;
            }
        }
    }
    if algebra_iso {
        if maps[0].apply(a.dga.unit()) != y.unit() {
            algebra_iso = false;
        }
        for n in 0..y.max_degree() {
            if maps[n + 1].mul(&a.dga.differential(n)) != y.differential(n).mul(&maps[n]) {
                algebra_iso = false;
            }
        }
        for p in 0..=y.max_degree() {
            for q in 0..=y.max_degree() - p {
                for i in 0..a.dga.dim(p) {
                    for j in 0..a.dga.dim(q) {
                        let mut ei = vec![S::zero(); a.dga.dim(p)];
                        ei[i] = S::one();
                        let mut ej = vec![S::zero(); a.dga.dim(q)];
                        ej[j] = S::one();
                        let through = maps[p + q].apply(&a.dga.multiply(p, q, &ei, &ej));
                        let direct =
                            y.multiply(p, q, &maps[p].apply(&ei), &maps[q].apply(&ej));
                        if through != direct {
                            algebra_iso = false;
                        }
                    }
                }
            }
        }
    }
    Ok(CounitReport {
        infinitesimal,
        dims_match,
        algebra_iso,
        maps,
    })
}

fn mask_wedge_sign(a: usize, b: usize) -> i64 {
    let mut inversions = 0u32;
    let mut i = 0usize;
    let mut aa = a;
    while aa != 0 {
        if aa & 1 == 1 {
            inversions += (b & ((1 << i) - 1)).count_ones();
        }
        aa >>= 1;
        i += 1;
    }
    if inversions % 2 == 0 {
        1
    } else {
        -1
    }
}

/// The cosimplicial algebra of the pair construction on a single odd
/// generator: level n is the exterior algebra on n+1 odd coordinates,
/// indexed by bitmasks, with cofaces repeating and codegeneracies merging
/// adjacent coordinates.
pub fn odd_line_model<S: Scalar>(cap: usize) -> FiniteCosimplicialAlgebra<S> {
    let mut levels = Vec::new();
    for n in 0..=cap {
        let dim = 1usize << (n + 1);
        let parity = (0..dim)
            .map(|m| Parity::of_degree(m.count_ones() as usize))
            .collect();
        let mut unit = vec![S::zero(); dim];
        unit[0] = S::one();
        let mut product = vec![vec![Vec::new(); dim]; dim];
        for (a, row) in product.iter_mut().enumerate() {
            for (b, entry) in row.iter_mut().enumerate() {
                if a & b != 0 {
                    continue;
                }
                *entry = vec![(a | b, S::from_int(mask_wedge_sign(a, b)))];
            }
        }
        levels.push(LevelAlgebra {
            dim,
            parity,
            unit,
            product,
        });
    }
    let monomial_map = |n_src: usize, f: &dyn Fn(usize) -> usize, dim_dst: usize| -> Vec<Option<usize>> {
        // Image mask of each source monomial under a monotone generator map;
        // collisions kill the monomial.
        (0..(1usize << (n_src + 1)))
            .map(|mask| {
                let mut out = 0usize;
                for k in 0..=n_src {
                    if mask >> k & 1 == 1 {
                        let nk = f(k);
                        if out >> nk & 1 == 1 {
                            return None;
                        }
                        out |= 1 << nk;
                    }
                }
                debug_assert!(out < dim_dst);
                Some(out)
            })
            .collect()
    };
    let mut coface = Vec::new();
    let mut codegeneracy = Vec::new();
    for n in 0..cap {
        let dim_n = 1usize << (n + 1);
        let dim_n1 = 1usize << (n + 2);
        let mut faces = Vec::new();
        for i in 0..=n + 1 {
            let images = monomial_map(n, &|k| if k < i { k } else { k + 1 }, dim_n1);
            let mut m = Matrix::zero(dim_n1, dim_n);
            for (c, img) in images.iter().enumerate() {
                if let Some(r) = img {
                    m[(*r, c)] = S::one();
                }
            }
            faces.push(m);
        }
        coface.push(faces);
        let mut degens = Vec::new();
        for j in 0..=n {
            let images = monomial_map(n + 1, &|k| if k <= j { k } else { k - 1 }, dim_n);
            let mut m = Matrix::zero(dim_n, dim_n1);
            for (c, img) in images.iter().enumerate() {
                if let Some(r) = img {
                    m[(*r, c)] = S::one();
                }
            }
            degens.push(m);
        }
        codegeneracy.push(degens);
    }
    FiniteCosimplicialAlgebra {
        levels,
        coface,
        codegeneracy,
        graded_commutative: true,
    }
}

/// The product of all level-n odd coordinates.
pub fn odd_line_full_monomial<S: Scalar>(x: &FiniteCosimplicialAlgebra<S>, n: usize) -> Vec<S> {
    let dim = x.level(n).dim;
    let mut v = vec![S::zero(); dim];
    v[dim - 1] = S::one();
    v
}

/// The product of successive coordinate differences at level n.
pub fn odd_line_increment_product<S: Scalar>(
    x: &FiniteCosimplicialAlgebra<S>,
    n: usize,
) -> Vec<S> {
    let alg = x.level(n);
    let mut acc = alg.unit.clone();
    for t in 1..=n {
        let mut diff = vec![S::zero(); alg.dim];
        diff[1 << t] = S::one();
        diff[1 << (t - 1)] = -S::one();
        acc = alg.mul_vec(&acc, &diff);
    }
    acc
}

fn check_algebra_map<S: Scalar>(
    s: &LevelAlgebra<S>,
    d: &LevelAlgebra<S>,
    m: &Matrix<S>,
    what: &str,
) -> Result<(), String> {
    if m.rows != d.dim || m.cols != s.dim {
        return Err(format!("{what} has the wrong shape"));
    }
    for c in 0..m.cols {
        for r in 0..m.rows {
            if !m[(r, c)].is_zero() && d.parity[r] != s.parity[c] {
                return Err(format!("{what} does not preserve parity"));
            }
        }
    }
    if m.apply(&s.unit) != d.unit {
        return Err(format!("{what} does not preserve the unit"));
    }
    let cols: Vec<SparseVec<S>> = (0..s.dim).map(|j| sparse_col(m, j)).collect();
    for i in 0..s.dim {
        for j in 0..s.dim {
            let image_of_product = sparse_apply(m, &s.product[i][j]);
            let product_of_images = d.mul_sparse(&cols[i], &cols[j]);
            if image_of_product != product_of_images {
                return Err(format!("{what} is not an algebra map on basis {i},{j}"));
            }
        }
    }
    Ok(())
}

/// Monomials of weight at most the presentation's truncation in the level-n
/// coordinates, in the canonical monomial order. This is the basis used by
/// `presentation_to_cosimplicial` for the level-n ring.
pub fn presentation_level_monomials<S: Scalar>(
    p: &FramedPresentation<S>,
    n: usize,
) -> Vec<Monomial> {
    let gens: Vec<GeneratorId> = p
        .coords(n)
        .into_iter()
        .map(|(alpha, label)| p.coord_generator(&alpha, label))
        .collect();
    let budget = p.truncation();
    let mut out = Vec::new();
    let mut acc: Vec<(GeneratorId, u32)> = Vec::new();
    fn rec(
        gens: &[GeneratorId],
        idx: usize,
        budget: u32,
        acc: &mut Vec<(GeneratorId, u32)>,
        out: &mut Vec<Monomial>,
    ) {
        if idx == gens.len() {
            out.push(Monomial::from_factors(acc.clone()).expect("distinct even factors"));
            return;
        }
        let w = gens[idx].weight;
        for e in 0..=budget / w {
            if e > 0 {
                acc.push((gens[idx].clone(), e));
            }
            rec(gens, idx + 1, budget - e * w, acc, out);
            if e > 0 {
                acc.pop();
            }
        }
    }
    rec(&gens, 0, budget, &mut acc, &mut out);
    out.sort();
    out
}

/// The cosimplicial algebra of truncated level coordinate rings of a framed
/// presentation, with faces and degeneracies acting by pullback. Super
/// presentations are refused (level rings would need intrinsic odd basis
/// vectors with a different sign discipline), and the cap cannot exceed the
/// levels whose zeroth face the presentation stores.
pub fn presentation_to_cosimplicial<S: Scalar>(
    p: &FramedPresentation<S>,
    cap: usize,
) -> Result<FiniteCosimplicialAlgebra<S>, String> {
    if p.superized() {
        return Err("level rings of super presentations are not supported".into());
    }
    if cap > p.max_level() {
        return Err(format!(
            "presentation stores pullbacks through level {}, cap {cap} requested",
            p.max_level()
        ));
    }
    let trunc = p.truncation();
    let bases: Vec<Vec<Monomial>> = (0..=cap)
        .map(|n| presentation_level_monomials(p, n))
        .collect();
    let index: Vec<BTreeMap<&Monomial, usize>> = bases
        .iter()
        .map(|b| b.iter().enumerate().map(|(i, m)| (m, i)).collect())
        .collect();
    let expand = |value: &GradedPolynomial<S>, level: usize| -> Result<Vec<S>, String> {
        let mut out = vec![S::zero(); bases[level].len()];
        for (m, c) in value.terms() {
            let Some(&i) = index[level].get(m) else {
                return Err(format!("pullback leaves the level {level} basis"));
            };
            out[i] = c.clone();
        }
        Ok(out)
    };
    let mut levels = Vec::new();
    for n in 0..=cap {
        let dim = bases[n].len();
        let one = index[n][&Monomial::one()];
        let mut unit = vec![S::zero(); dim];
        unit[one] = S::one();
        let mut table = vec![vec![Vec::new(); dim]; dim];
        for (i, ma) in bases[n].iter().enumerate() {
            for (j, mb) in bases[n].iter().enumerate() {
                let Some((m, sign)) = ma.mul(mb) else {
                    continue;
                };
                debug_assert_eq!(sign, 1);
                if m.weight() <= trunc {
                    table[i][j] = vec![(index[n][&m], S::one())];
                }
            }
        }
        levels.push(LevelAlgebra {
            dim,
            parity: vec![Parity::Even; dim],
            unit,
            product: table,
        });
    }
    let mut coface = Vec::new();
    let mut codegeneracy = Vec::new();
    for n in 0..cap {
        let mut faces = Vec::new();
        for i in 0..=n + 1 {
            let mut m = Matrix::zero(bases[n + 1].len(), bases[n].len());
            for (c, mono) in bases[n].iter().enumerate() {
                let mut value = GradedPolynomial::zero(Some(trunc));
                value.add_term(mono.clone(), S::one());
                let f = Cochain::new(n, value);
                let image = face_pullback(&f, i, p)?;
                for (r, coeff) in expand(&image.value, n + 1)?.into_iter().enumerate() {
                    m[(r, c)] = coeff;
                }
            }
            faces.push(m);
        }
        coface.push(faces);
        let mut degens = Vec::new();
        for j in 0..=n {
            let mut m = Matrix::zero(bases[n].len(), bases[n + 1].len());
            for (c, mono) in bases[n + 1].iter().enumerate() {
                let mut value = GradedPolynomial::zero(Some(trunc));
                value.add_term(mono.clone(), S::one());
                let f = Cochain::new(n + 1, value);
                let image = degeneracy_pullback(&f, j);
                for (r, coeff) in expand(&image.value, n)?.into_iter().enumerate() {
                    m[(r, c)] = coeff;
                }
            }
            degens.push(m);
        }
        codegeneracy.push(degens);
    }
    Ok(FiniteCosimplicialAlgebra {
        levels,
        coface,
        codegeneracy,
        graded_commutative: true,
    })
}

#[derive(Clone, Copy, Debug)]
pub struct SmallAlgebraReport {
    /// Level zero is one-dimensional, spanned by the unit.
    pub reduced: bool,
    /// Products of level-one elements killed by the codegeneracy vanish.
    pub degree_one_square_vanishes: bool,
    /// Every level is spanned by products of coface images of levels 0 and 1.
    pub generated_in_low_levels: bool,
}

impl SmallAlgebraReport {
    pub fn small(&self) -> bool {
        self.reduced && self.degree_one_square_vanishes && self.generated_in_low_levels
    }
}

/// Composite coface matrix realizing the injection of the level-1 ring into
/// level n that picks out vertices a < b.
fn vertex_pair_coface<S: Scalar>(
    x: &FiniteCosimplicialAlgebra<S>,
    a: usize,
    b: usize,
    n: usize,
) -> Matrix<S> {
    assert!(a < b && b <= n);
    let mut m = Matrix::identity(x.level(1).dim);
    let mut level = 1;
    for miss in (0..=n).filter(|v| *v != a && *v != b) {
        m = x.coface(level, miss).mul(&m);
        level += 1;
    }
    m
}

/// Check the conditions under which vanishing level-one kernel squares
/// already force the whole algebra to be infinitesimal: a one-dimensional
/// bottom level and generation by the two lowest levels.
pub fn is_reduced_small<S: Scalar>(x: &FiniteCosimplicialAlgebra<S>) -> SmallAlgebraReport {
    let lv0 = x.level(0);
    let reduced = lv0.dim == 1 && !lv0.unit[0].is_zero();
    let mut degree_one_square_vanishes = true;
    if x.cap() >= 1 {
        let kb = x.codegeneracy(0, 0).kernel_basis();
        for u in &kb {
            for v in &kb {
                if x.level(1).mul_vec(u, v).iter().any(|c| !c.is_zero()) {
                    degree_one_square_vanishes = false;
                }
            }
        }
    }
    let mut generated_in_low_levels = true;
    for n in 2..=x.cap() {
        let dim = x.level(n).dim;
        let mut span = SpanBuilder::new(dim);
        span.insert(&x.level(n).unit);
        for a in 0..n {
            for b in a + 1..=n {
                let m = vertex_pair_coface(x, a, b, n);
                for c in 0..m.cols {
                    span.insert(&m.col(c));
                }
            }
        }
        let mut grew = true;
        while grew && span.rank() < dim {
            grew = false;
            let rows: Vec<Vec<S>> = span.basis().to_vec();
            for u in &rows {
                for v in &rows {
                    if span.insert(&x.level(n).mul_vec(u, v)) {
                        grew = true;
                    }
                }
            }
        }
        if span.rank() < dim {
            generated_in_low_levels = false;
        }
    }
    SmallAlgebraReport {
        reduced,
        degree_one_square_vanishes,
        generated_in_low_levels,
    }
}

/// Degreewise maps forming a morphism of differential graded algebras; both
/// presentations must share a degree cap.
pub fn validate_dga_morphism<S: Scalar>(
    y: &DGAlgebraPresentation<S>,
    z: &DGAlgebraPresentation<S>,
    maps: &[Matrix<S>],
) -> Result<(), String> {
    let dmax = y.max_degree();
    if z.max_degree() != dmax {
        return Err("source and target must share a degree cap".into());
    }
    if maps.len() != dmax + 1 {
        return Err("one map per degree".into());
    }
    for (p, m) in maps.iter().enumerate() {
        if m.rows != z.dim(p) || m.cols != y.dim(p) {
            return Err(format!("degree {p} map has the wrong shape"));
        }
        for c in 0..m.cols {
            for r in 0..m.rows {
                if !m[(r, c)].is_zero() && z.parity(p, r) != y.parity(p, c) {
                    return Err(format!("degree {p} map does not preserve parity"));
                }
            }
        }
    }
    if maps[0].apply(y.unit()) != z.unit() {
        return Err("map does not preserve the unit".into());
    }
    for p in 0..dmax {
        if maps[p + 1].mul(&y.differential(p)) != z.differential(p).mul(&maps[p]) {
            return Err(format!("map does not intertwine the degree {p} differential"));
        }
    }
    for p in 0..=dmax {
        for q in 0..=dmax - p {
            for i in 0..y.dim(p) {
                for j in 0..y.dim(q) {
                    let mut ei = vec![S::zero(); y.dim(p)];
                    ei[i] = S::one();
                    let mut ej = vec![S::zero(); y.dim(q)];
                    ej[j] = S::one();
                    let through = maps[p + q].apply(&y.multiply(p, q, &ei, &ej));
                    let direct = z.multiply(p, q, &maps[p].col(i), &maps[q].col(j));
                    if through != direct {
                        return Err(format!(
                            "map is not multiplicative on ({p},{i}) and ({q},{j})"
                        ));
                    }
                }
            }
        }
    }
    Ok(())
}

/// Levelwise matrices of the denormalized morphism: each (subset, label)
/// coordinate maps through the degree-|subset| component.
pub fn denormalize_morphism<S: Scalar>(
    y: &DGAlgebraPresentation<S>,
    z: &DGAlgebraPresentation<S>,
    maps: &[Matrix<S>],
    cap: usize,
) -> Vec<Matrix<S>> {
    let mut out = Vec::new();
    for n in 0..=cap {
        let by = DKLevelBasis::new(y.ranks(), n);
        let bz = DKLevelBasis::new(z.ranks(), n);
        let mut m = Matrix::zero(bz.dim(), by.dim());
        for (c, e) in by.elems.iter().enumerate() {
            let k = e.alpha.len();
            let comp = &maps[k];
            for t in 0..z.ranks()[k] {
                if !comp[(t, e.label)].is_zero() {
                    m[(bz.position(&e.alpha, t), c)] = comp[(t, e.label)].clone();
                }
            }
        }
        out.push(m);
    }
    out
}

/// Levelwise algebra maps commuting with all cofaces and codegeneracies.
pub fn validate_cosimplicial_morphism<S: Scalar>(
    x1: &FiniteCosimplicialAlgebra<S>,
    x2: &FiniteCosimplicialAlgebra<S>,
    maps: &[Matrix<S>],
) -> Result<(), String> {
    let cap = x1.cap();
    if x2.cap() != cap {
        return Err("source and target must share a level cap".into());
    }
    if maps.len() != cap + 1 {
        return Err("one map per level".into());
    }
    for (n, m) in maps.iter().enumerate() {
        check_algebra_map(x1.level(n), x2.level(n), m, &format!("level {n} map"))?;
    }
    for n in 0..cap {
        for i in 0..=n + 1 {
            if maps[n + 1].mul(x1.coface(n, i)) != x2.coface(n, i).mul(&maps[n]) {
                return Err(format!("map does not intertwine coface {i} at level {n}"));
            }
        }
        for j in 0..=n {
            if maps[n].mul(x1.codegeneracy(n, j)) != x2.codegeneracy(n, j).mul(&maps[n + 1]) {
                return Err(format!(
                    "map does not intertwine codegeneracy {j} at level {}",
                    n + 1
                ));
            }
        }
    }
    Ok(())
}

/// The map induced on abstract differentiations by a cosimplicial morphism,
/// in quotient coordinates. Errors when the morphism fails to carry the
/// differential ideal into the target ideal.
pub fn induced_dga_map<S: Scalar>(
    a1: &AbstractDifferentiation<S>,
    a2: &AbstractDifferentiation<S>,
    maps: &[Matrix<S>],
) -> Result<Vec<Matrix<S>>, String> {
    let degree = a1.degree();
    if a2.degree() != degree {
        return Err("differentiations must share a degree cap".into());
    }
    let push = |n: usize, normalized: &[S]| -> Result<Vec<S>, String> {
        let ambient = maps[n].apply(&a1.normalized.embed(n, normalized));
        a2.normalized.express(n, &ambient)
    };
    let mut out = Vec::new();
    for n in 0..=degree {
        for v in a1.ideal_basis(n) {
            if !a2.ideal_contains(n, &push(n, v)?) {
                return Err(format!(
                    "morphism does not carry the level {n} ideal into the target ideal"
                ));
            }
        }
        let mut m = Matrix::zero(a2.dga.dim(n), a1.dga.dim(n));
        for t in 0..a1.dga.dim(n) {
            let image = a2.class_of(n, &push(n, &a1.representative(n, t))?);
            for (r, c) in image.into_iter().enumerate() {
                m[(r, t)] = c;
            }
        }
        out.push(m);
    }
    Ok(out)
}

/// Naturality of the round trip: differentiating the denormalization of a
/// morphism gives back the morphism under the canonical identifications.
pub fn counit_naturality<S: Scalar>(
    y: &DGAlgebraPresentation<S>,
    z: &DGAlgebraPresentation<S>,
    maps: &[Matrix<S>],
) -> Result<bool, String> {
    validate_dga_morphism(y, z, maps)?;
    let degree = y.max_degree();
    let xy = denormalize_algebra(y, degree)?;
    let xz = denormalize_algebra(z, degree)?;
    let km = denormalize_morphism(y, z, maps, degree);
    validate_cosimplicial_morphism(&xy, &xz, &km)?;
    let ay = abstract_diff(&xy, degree)?;
    let az = abstract_diff(&xz, degree)?;
    let induced = induced_dga_map(&ay, &az, &km)?;
    let phi_y = counit_map(&ay, y);
    let phi_z = counit_map(&az, z);
    Ok((0..=degree).all(|n| phi_z[n].mul(&induced[n]) == maps[n].mul(&phi_y[n])))
}

fn mono(factors: &[(GeneratorId, u32)]) -> Monomial {
    Monomial::from_factors(factors.to_vec()).expect("well-formed corpus monomial")
}

fn zero_images<S: Scalar>(
    gens: &[GeneratorId],
) -> BTreeMap<GeneratorId, GradedPolynomial<S>> {
    gens.iter()
        .map(|g| (g.clone(), GradedPolynomial::zero(None)))
        .collect()
}

/// A spread of small differential graded algebras exercising zero ranks,
/// odd and even generators, nonzero differentials, and monomial relations.
pub fn standard_dga_corpus<S: Scalar>() -> Vec<(&'static str, DGAlgebraPresentation<S>)> {
    let xi = GeneratorId::xi;
    let mut out: Vec<(&'static str, DGAlgebraPresentation<S>)> = Vec::new();

    let line = [xi(1, 0)];
    out.push((
        "exterior line",
        free_graded_commutative_dga(&line, &zero_images::<S>(&line), 2).unwrap(),
    ));

    let plane = [xi(1, 0), xi(1, 1)];
    out.push((
        "exterior plane",
        free_graded_commutative_dga(&plane, &zero_images::<S>(&plane), 2).unwrap(),
    ));

    let heis = [xi(1, 0), xi(1, 1), xi(1, 2)];
    let mut images = zero_images::<S>(&heis);
    let mut dc = GradedPolynomial::zero(None);
    dc.add_term(mono(&[(xi(1, 0), 1), (xi(1, 1), 1)]), -S::one());
    images.insert(xi(1, 2), dc);
    out.push((
        "heisenberg dual",
        free_graded_commutative_dga(&heis, &images, 3).unwrap(),
    ));

    let poly2 = [xi(2, 0)];
    out.push((
        "polynomial degree-two class",
        free_graded_commutative_dga(&poly2, &zero_images::<S>(&poly2), 4).unwrap(),
    ));

    let x2 = xi(2, 0);
    out.push((
        "degree-two class with vanishing square",
        monomial_basis_dga(
            &[
                vec![Monomial::one()],
                vec![],
                vec![mono(&[(x2.clone(), 1)])],
                vec![],
                vec![],
            ],
            &zero_images::<S>(&[x2]),
        )
        .unwrap(),
    ));

    let pair = [xi(1, 0), xi(2, 0)];
    let mut images = zero_images::<S>(&pair);
    images.insert(
        xi(1, 0),
        GradedPolynomial::generator(xi(2, 0), None),
    );
    out.push((
        "contractible pair",
        free_graded_commutative_dga(&pair, &images, 4).unwrap(),
    ));

    out.push((
        "odd and even generators, closed",
        free_graded_commutative_dga(&pair, &zero_images::<S>(&pair), 4).unwrap(),
    ));

    let rot = [xi(1, 0), xi(1, 1), xi(1, 2)];
    let mut images = zero_images::<S>(&rot);
    let term = |a: u32, b: u32, neg: bool| {
        let mut p = GradedPolynomial::zero(None);
        p.add_term(
            mono(&[(xi(1, a), 1), (xi(1, b), 1)]),
            if neg { -S::one() } else { S::one() },
        );
        p
    };
    images.insert(xi(1, 0), term(1, 2, true));
    images.insert(xi(1, 1), term(0, 2, false));
    images.insert(xi(1, 2), term(0, 1, true));
    out.push((
        "rotation dual",
        free_graded_commutative_dga(&rot, &images, 3).unwrap(),
    ));

    let mixed = [xi(1, 0), xi(1, 1), xi(2, 0)];
    out.push((
        "two odd and one even, closed",
        free_graded_commutative_dga(&mixed, &zero_images::<S>(&mixed), 3).unwrap(),
    ));

    let exact = [xi(1, 0), xi(2, 0)];
    let mut images = zero_images::<S>(&exact);
    images.insert(
        xi(1, 0),
        GradedPolynomial::generator(xi(2, 0), None),
    );
    out.push((
        "exact odd generator with square-zero image",
        monomial_basis_dga(
            &[
                vec![Monomial::one()],
                vec![mono(&[(xi(1, 0), 1)])],
                vec![mono(&[(xi(2, 0), 1)])],
                vec![mono(&[(xi(1, 0), 1), (xi(2, 0), 1)])],
                vec![],
            ],
            &images,
        )
        .unwrap(),
    ));

    out.push((
        "ground field",
        monomial_basis_dga(&[vec![Monomial::one()]], &BTreeMap::new()).unwrap(),
    ));

    out
}

/// Explicit morphisms between corpus shapes, for naturality checks.
pub fn standard_dga_morphisms<S: Scalar>() -> Vec<(
    &'static str,
    DGAlgebraPresentation<S>,
    DGAlgebraPresentation<S>,
    Vec<Matrix<S>>,
)> {
    let xi = GeneratorId::xi;
    let line = [xi(1, 0)];
    let line_dga =
        || free_graded_commutative_dga(&line, &zero_images::<S>(&line), 2).unwrap();
    let plane = [xi(1, 0), xi(1, 1)];
    let plane_dga =
        || free_graded_commutative_dga(&plane, &zero_images::<S>(&plane), 2).unwrap();
    let heis = [xi(1, 0), xi(1, 1), xi(1, 2)];
    let heis_dga = || {
        let mut images = zero_images::<S>(&heis);
        let mut dc = GradedPolynomial::zero(None);
        dc.add_term(
            Monomial::from_factors(vec![(xi(1, 0), 1), (xi(1, 1), 1)]).unwrap(),
            -S::one(),
        );
        images.insert(xi(1, 2), dc);
        free_graded_commutative_dga(&heis, &images, 3).unwrap()
    };

    let mut out = Vec::new();

    let scale = vec![
        Matrix::identity(1),
        Matrix::from_fn(1, 1, |_, _| S::from_int(2)),
        Matrix::zero(0, 0),
    ];
    out.push(("scaling of the exterior line", line_dga(), line_dga(), scale));

    let mut include1 = Matrix::zero(2, 1);
    include1[(0, 0)] = S::one();
    out.push((
        "inclusion of an exterior line",
        line_dga(),
        plane_dga(),
        vec![Matrix::identity(1), include1, Matrix::zero(1, 0)],
    ));

    let mut project1 = Matrix::zero(1, 2);
    project1[(0, 0)] = S::one();
    out.push((
        "projection onto the first line",
        plane_dga(),
        line_dga(),
        vec![Matrix::identity(1), project1, Matrix::zero(0, 1)],
    ));

    // a -> b, b -> -a, c -> c; induced on ab, ac, bc and on abc.
    let mut turn1 = Matrix::zero(3, 3);
    turn1[(1, 0)] = S::one();
    turn1[(0, 1)] = -S::one();
    turn1[(2, 2)] = S::one();
    let mut turn2 = Matrix::zero(3, 3);
    turn2[(0, 0)] = S::one();
    turn2[(2, 1)] = S::one();
    turn2[(1, 2)] = -S::one();
    let turn3 = Matrix::identity(1);
    out.push((
        "quarter turn of the heisenberg dual",
        heis_dga(),
        heis_dga(),
        vec![Matrix::identity(1), turn1, turn2, turn3],
    ));

    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::oracle::{
        abelian_constants, bch_order2, commutator_constants, heisenberg_matrix_basis,
        nerve_from_group_law,
    };
    use crate::poly::GenName;
    use crate::Q;
    use num_traits::{One, Zero};

    fn basis_vec(dim: usize, i: usize) -> Vec<Q> {
        let mut v = vec![Q::zero(); dim];
        v[i] = Q::one();
        v
    }

    fn is_zero_vec(v: &[Q]) -> bool {
        v.iter().all(|c| c.is_zero())
    }

    #[test]
    fn odd_line_simplicial_structure() {
        let x = odd_line_model::<Q>(3);
        x.validate().unwrap();
        for n in 0..=3usize {
            let pi = odd_line_full_monomial(&x, n);
            let inc = odd_line_increment_product(&x, n);
            for i in 0..=n {
                let eps = basis_vec(x.level(n).dim, 1 << i);
                assert_eq!(x.level(n).mul_vec(&eps, &inc), pi);
            }
            if n >= 1 {
                let prev = odd_line_full_monomial(&x, n - 1);
                assert_eq!(x.delta_matrix(n - 1).apply(&prev), inc);
            }
        }
        // delta of the first coordinate is the first increment.
        let eps0 = basis_vec(2, 1);
        let mut expect = vec![Q::zero(); 4];
        expect[2] = Q::one();
        expect[1] = -Q::one();
        assert_eq!(x.delta_matrix(0).apply(&eps0), expect);
    }

    #[test]
    fn odd_line_normalization_and_cup() {
        let x = odd_line_model::<Q>(4);
        let nc = cosimplicial_normalize(&x).unwrap();
        for n in 0..=4usize {
            assert_eq!(nc.dim(n), 2, "level {n}");
        }
        let inc = |n: usize| nc.express(n, &odd_line_increment_product(&x, n)).unwrap();
        let pi = |n: usize| nc.express(n, &odd_line_full_monomial(&x, n)).unwrap();
        for p in 0..=4usize {
            for q in 0..=4 - p {
                let inc_cup = nc.cup(&x, p, q, &inc(p), &inc(q)).unwrap();
                assert_eq!(inc_cup, inc(p + q), "increments multiply: {p},{q}");
                let pi_cup = nc.cup(&x, p, q, &pi(p), &pi(q)).unwrap();
                assert!(pi_cup.iter().all(|c| c.is_zero()), "top squares vanish");
                let mixed = nc.cup(&x, q, p, &pi(q), &inc(p)).unwrap();
                assert_eq!(mixed, pi(p + q), "top before increment: {p},{q}");
                let swapped = nc.cup(&x, p, q, &inc(p), &pi(q)).unwrap();
                let expect: Vec<Q> = if p % 2 == 1 {
                    pi(p + q).iter().map(|c| -c.clone()).collect()
                } else {
                    pi(p + q)
                };
                assert_eq!(swapped, expect, "increment before top: {p},{q}");
            }
        }
        let report = is_infinitesimal(&x).unwrap();
        assert!(report.infinitesimal);
        assert!(report.witness.is_none());
    }

    #[test]
    fn odd_line_abstract_differentiation() {
        let x = odd_line_model::<Q>(4);
        let a = abstract_diff(&x, 4).unwrap();
        assert_eq!(a.dga.ranks(), &[2, 2, 2, 2, 2]);
        assert_eq!(a.ideal_dims, &[0, 0, 0, 0, 0]);
        assert!(a.dga.graded_commutative());
        // One even and one odd class in every degree.
        for n in 0..=4usize {
            let mut odd = 0;
            for i in 0..2 {
                if a.dga.parity(n, i).is_odd() {
                    odd += 1;
                }
            }
            assert_eq!(odd, 1, "degree {n}");
        }
        // The degree-0 odd class and the degree-1 odd-degree class
        // anticommute, and the odd class squares to zero.
        let nc = a.normalized();
        let eps = a.class_of(0, &nc.express(0, &basis_vec(2, 1)).unwrap());
        let inc1 = a.class_of(1, &nc.express(1, &odd_line_increment_product(&x, 1)).unwrap());
        let fwd = a.dga.multiply(0, 1, &eps, &inc1);
        let bwd = a.dga.multiply(1, 0, &inc1, &eps);
        assert!(!is_zero_vec(&fwd));
        assert_eq!(fwd, bwd.iter().map(|c| -c.clone()).collect::<Vec<_>>());
        assert!(is_zero_vec(&a.dga.multiply(0, 0, &eps, &eps)));
        // The differential never vanishes: it carries the top class of each
        // level to the increment class above it.
        for n in 0..4usize {
            let top = a.class_of(n, &nc.express(n, &odd_line_full_monomial(&x, n)).unwrap());
            let inc_above = a.class_of(
                n + 1,
                &nc.express(n + 1, &odd_line_increment_product(&x, n + 1)).unwrap(),
            );
            assert_eq!(a.dga.differential(n).apply(&top), inc_above);
        }
    }

    #[test]
    fn denormalized_line_counit_and_smallness() {
        let corpus = standard_dga_corpus::<Q>();
        let (_, line) = &corpus[0];
        let x = denormalize_algebra(line, 2).unwrap();
        x.validate().unwrap();
        let nc = cosimplicial_normalize(&x).unwrap();
        assert_eq!(
            (0..=2).map(|n| nc.dim(n)).collect::<Vec<_>>(),
            vec![1, 1, 0],
            "normalizing the denormalization recovers the ranks"
        );
        assert!(is_reduced_small(&x).small());
        let report = counit_check(line).unwrap();
        assert!(report.infinitesimal && report.dims_match && report.algebra_iso);
    }

    fn abelian_cochains(m: usize) -> FiniteCosimplicialAlgebra<Q> {
        let law = bch_order2(&abelian_constants(m), 2).unwrap();
        let p = nerve_from_group_law(&law, 2).unwrap();
        presentation_to_cosimplicial(&p, 2).unwrap()
    }

    #[test]
    fn abelian_cochains_have_a_square_witness() {
        let x = abelian_cochains(1);
        x.validate().unwrap();
        let report = is_infinitesimal(&x).unwrap();
        assert!(!report.infinitesimal);
        let w = report.witness.expect("a witness pair");
        assert_eq!(w.level, 1);
        assert_eq!(w.codegeneracy, 0);
        // Level-1 basis is 1, x, x^2; the witness product is x^2 exactly.
        assert_eq!(w.product, basis_vec(3, 2));
        assert_eq!(x.level(1).mul_vec(&w.left, &w.right), w.product);
        assert!(!is_zero_vec(&w.normalized_part));
        let small = is_reduced_small(&x);
        assert!(small.reduced);
        assert!(!small.degree_one_square_vanishes);
        assert!(!small.small());
    }

    #[test]
    fn abelian_cochains_differentiate_to_exterior_classes() {
        let x = abelian_cochains(1);
        let a = abstract_diff(&x, 2).unwrap();
        assert_eq!(a.dga.ranks(), &[1, 1, 0]);
        assert!(a.dga.differential(0).is_zero());

        let x2 = abelian_cochains(2);
        let a2 = abstract_diff(&x2, 2).unwrap();
        assert_eq!(a2.dga.ranks(), &[1, 2, 1]);
        assert!(a2.dga.differential(0).is_zero());
        assert!(a2.dga.differential(1).is_zero());
        // Anticommuting degree-1 classes with nonzero product.
        let ea = basis_vec(2, 0);
        let eb = basis_vec(2, 1);
        let ab = a2.dga.multiply(1, 1, &ea, &eb);
        let ba = a2.dga.multiply(1, 1, &eb, &ea);
        assert!(!is_zero_vec(&ab));
        assert_eq!(ab, ba.iter().map(|c| -c.clone()).collect::<Vec<_>>());
        assert!(is_zero_vec(&a2.dga.multiply(1, 1, &ea, &ea)));
    }

    #[test]
    fn heisenberg_cochains_match_direct_differentiation() {
        let k = commutator_constants(&heisenberg_matrix_basis()).unwrap();
        let law = bch_order2(&k, 2).unwrap();
        let p = nerve_from_group_law(&law, 2).unwrap();
        let x = presentation_to_cosimplicial(&p, 2).unwrap();
        let a = abstract_diff(&x, 2).unwrap();
        assert_eq!(a.dga.ranks(), &[1, 3, 3]);

        let monomials = presentation_level_monomials(&p, 1);
        let nc = a.normalized();
        let coord_class = |l: usize| -> Vec<Q> {
            let g = p.coord_generator(&vec![1], l as u32);
            let target = Monomial::from_factors(vec![(g, 1)]).unwrap();
            let idx = monomials.iter().position(|m| *m == target).unwrap();
            a.class_of(1, &nc.express(1, &basis_vec(monomials.len(), idx)).unwrap())
        };
        let cup_class = |la: usize, lb: usize| -> Vec<Q> {
            let ca = nc
                .express(
                    1,
                    &basis_vec(
                        monomials.len(),
                        monomials
                            .iter()
                            .position(|m| {
                                *m == Monomial::from_factors(vec![(
                                    p.coord_generator(&vec![1], la as u32),
                                    1,
                                )])
                                .unwrap()
                            })
                            .unwrap(),
                    ),
                )
                .unwrap();
            let cb = nc
                .express(
                    1,
                    &basis_vec(
                        monomials.len(),
                        monomials
                            .iter()
                            .position(|m| {
                                *m == Monomial::from_factors(vec![(
                                    p.coord_generator(&vec![1], lb as u32),
                                    1,
                                )])
                                .unwrap()
                            })
                            .unwrap(),
                    ),
                )
                .unwrap();
            a.class_of(2, &nc.cup(&x, 1, 1, &ca, &cb).unwrap())
        };

        // The quotient differential of each coordinate class must expand, in
        // cup classes, to the polynomial computed by direct differentiation.
        let ce = crate::differentiate::ce_algebra(&p, 2).unwrap();
        for l in 0..3usize {
            let d_class = a.dga.differential(1).apply(&coord_class(l));
            let mut expect = vec![Q::zero(); 3];
            if let Some(poly) = ce.differential_of(1, l as u32) {
                for (m, c) in poly.terms() {
                    let factors = m.factors();
                    assert_eq!(factors.len(), 2, "quadratic differential");
                    let lab = |g: &GeneratorId| match &g.name {
                        GenName::Xi { label, .. } => *label as usize,
                        other => panic!("unexpected generator {other:?}"),
                    };
                    let (ga, gb) = (&factors[0].0, &factors[1].0);
                    let term = cup_class(lab(ga), lab(gb));
                    for (t, e) in term.iter().enumerate() {
                        expect[t] = expect[t].clone() + c.clone() * e.clone();
                    }
                }
            }
            assert_eq!(d_class, expect, "generator {l}");
        }
        // And the heisenberg shape is visible: exactly one generator has a
        // nonzero differential.
        let nonzero = (0..3usize)
            .filter(|&l| !is_zero_vec(&a.dga.differential(1).apply(&coord_class(l))))
            .count();
        assert_eq!(nonzero, 1);
    }

    #[test]
    fn polynomial_class_denormalization_is_infinitesimal_but_not_small() {
        let corpus = standard_dga_corpus::<Q>();
        let (name, poly2) = &corpus[3];
        assert_eq!(*name, "polynomial degree-two class");
        let x = denormalize_algebra(poly2, 4).unwrap();
        x.validate().unwrap();
        assert!(is_infinitesimal(&x).unwrap().infinitesimal);
        let small = is_reduced_small(&x);
        assert!(small.reduced);
        assert!(small.degree_one_square_vanishes);
        assert!(!small.generated_in_low_levels);
        assert!(!small.small());
    }

    #[test]
    fn corpus_validates_and_morphisms_hold() {
        let corpus = standard_dga_corpus::<Q>();
        assert_eq!(corpus.len(), 11);
        for (name, dga) in &corpus {
            assert!(dga.graded_commutative(), "{name}");
            dga.validate().unwrap_or_else(|e| panic!("{name}: {e}"));
        }
        for (name, y, z, maps) in standard_dga_morphisms::<Q>() {
            validate_dga_morphism(&y, &z, &maps).unwrap_or_else(|e| panic!("{name}: {e}"));
        }
    }

    #[test]
    fn dga_validation_rejects_inconsistency() {
        let unit_row = |d: usize| {
            let mut tab = vec![vec![Vec::new(); d]; 1];
            for (j, entry) in tab[0].iter_mut().enumerate() {
                *entry = vec![(j, Q::one())];
            }
            tab
        };
        let col_unit = |d: usize| {
            let mut tab = vec![vec![Vec::new(); 1]; d];
            for (i, row) in tab.iter_mut().enumerate() {
                row[0] = vec![(i, Q::one())];
            }
            tab
        };

        // A differential with d(1) nonzero cannot satisfy the product rule.
        let complex = CochainComplex::new(
            vec![1, 1],
            vec![Matrix::from_fn(1, 1, |_, _| Q::one())],
        )
        .unwrap();
        let product = vec![vec![unit_row(1), unit_row(1)], vec![col_unit(1)]];
        let err = DGAlgebraPresentation::new(
            complex,
            vec![vec![Parity::Even], vec![Parity::Even]],
            vec![Q::one()],
            product,
            false,
        )
        .unwrap_err();
        assert!(err.contains("Leibniz"), "{err}");

        // Two degree-1 classes whose products ignore the sign rule.
        let complex = CochainComplex::new(
            vec![1, 2, 1],
            vec![Matrix::zero(2, 1), Matrix::zero(1, 2)],
        )
        .unwrap();
        // product of the two odd generators recorded symmetrically: wrong.
        let mut oneone = vec![vec![Vec::new(); 2]; 2];
        oneone[0][1] = vec![(0, Q::one())];
        oneone[1][0] = vec![(0, Q::one())];
        let product = vec![
            vec![unit_row(1), unit_row(2), unit_row(1)],
            vec![col_unit(2), oneone],
            vec![col_unit(1)],
        ];
        let err = DGAlgebraPresentation::new(
            complex,
            vec![vec![Parity::Even], vec![Parity::Even; 2], vec![Parity::Even]],
            vec![Q::one()],
            product,
            true,
        )
        .unwrap_err();
        assert!(err.contains("commutativity"), "{err}");
    }
}
