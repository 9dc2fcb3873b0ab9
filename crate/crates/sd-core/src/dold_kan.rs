//! Dold-Kan (de)normalization for chain complexes (simplicial side) and
//! cochain complexes (cosimplicial side), plus the Alexander-Whitney and
//! shuffle maps on normalized tensors.
//!
//! Level n of a denormalized object is the direct sum over subsets
//! `alpha` of `{1, .., n}` of the degree-`|alpha|` component. Faces act by
//! the epi-mono factorization rule: factor the composite of the indexing
//! surjection with the face injection; the identity mono keeps the vector,
//! the mono missing 0 applies the boundary, every other mono kills the
//! summand. In particular the top face annihilates summands whose subset
//! contains the top index.

use crate::matrix::Matrix;
use crate::scalar::Scalar;
use crate::simplex::{
    subset_to_surjection, surjection_to_subset, IndexSubset, OrdinalMap,
};
use std::collections::BTreeMap;

/// Connective chain complex: `boundary[k]` maps degree k+1 to degree k.
#[derive(Clone, PartialEq, Debug)]
pub struct ChainComplex<S> {
    pub ranks: Vec<usize>,
    pub boundary: Vec<Matrix<S>>,
}

impl<S: Scalar> ChainComplex<S> {
    pub fn new(ranks: Vec<usize>, boundary: Vec<Matrix<S>>) -> Result<Self, String> {
        if boundary.len() + 1 != ranks.len().max(1) {
            return Err(format!(
                "expected {} boundary maps for {} ranks",
                ranks.len().saturating_sub(1),
                ranks.len()
            ));
        }
        for (k, b) in boundary.iter().enumerate() {
            if b.rows != ranks[k] || b.cols != ranks[k + 1] {
                return Err(format!("boundary {k} has shape {}x{}", b.rows, b.cols));
            }
        }
        for k in 0..boundary.len().saturating_sub(1) {
            if !boundary[k].mul(&boundary[k + 1]).is_zero() {
                return Err(format!("boundary squared nonzero at degree {}", k + 2));
            }
        }
        Ok(ChainComplex { ranks, boundary })
    }

    /// Complex concentrated nowhere.
    pub fn zero() -> Self {
        ChainComplex {
            ranks: vec![0],
            boundary: vec![],
        }
    }

    pub fn top_degree(&self) -> usize {
        self.ranks.len() - 1
    }

    pub fn rank(&self, k: usize) -> usize {
        self.ranks.get(k).copied().unwrap_or(0)
    }

    /// Boundary out of degree k+1; zero matrix when out of stored range.
    pub fn boundary_from(&self, k1: usize) -> Matrix<S> {
        if k1 >= 1 && k1 <= self.boundary.len() {
            self.boundary[k1 - 1].clone()
        } else {
            Matrix::zero(self.rank(k1.wrapping_sub(1)), self.rank(k1))
        }
    }
}

/// Basis element `v_label (x) e_alpha` of a denormalized level.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Debug)]
pub struct DKBasisElement {
    pub alpha: IndexSubset,
    pub label: usize,
}

/// Ordered basis for one denormalized level: subsets of `{1, .., n}` sorted
/// by (size, lexicographic), labels ascending inside each subset.
#[derive(Clone, Debug)]
pub struct DKLevelBasis {
    pub level: usize,
    pub elems: Vec<DKBasisElement>,
    index: BTreeMap<(IndexSubset, usize), usize>,
}

impl DKLevelBasis {
    pub fn new(ranks: &[usize], n: usize) -> Self {
        let mut elems = Vec::new();
        for alpha in subsets_by_size(n) {
            let k = alpha.len();
            let rank = ranks.get(k).copied().unwrap_or(0);
            for label in 0..rank {
                elems.push(DKBasisElement {
                    alpha: alpha.clone(),
                    label,
                });
            }
        }
        let index = elems
            .iter()
            .enumerate()
            .map(|(i, e)| ((e.alpha.clone(), e.label), i))
            .collect();
        DKLevelBasis {
            level: n,
            elems,
            index,
        }
    }

    pub fn dim(&self) -> usize {
        self.elems.len()
    }

    pub fn position(&self, alpha: &IndexSubset, label: usize) -> usize {
        self.index[&(alpha.clone(), label)]
    }
}

/// All subsets of `{1, .., n}` sorted by (size, lexicographic order).
pub fn subsets_by_size(n: usize) -> Vec<IndexSubset> {
    let mut out: Vec<IndexSubset> = (0..(1u32 << n))
        .map(|bits| (1..=n).filter(|&a| bits >> (a - 1) & 1 == 1).collect())
        .collect();
    out.sort_by(|a, b| a.len().cmp(&b.len()).then_with(|| a.cmp(b)));
    out
}

fn act_on_summand<S: Scalar>(
    e: &ChainComplex<S>,
    theta: &OrdinalMap,
    alpha: &IndexSubset,
    source_level: usize,
) -> Vec<(IndexSubset, Matrix<S>)> {
    // Composite of the indexing surjection with theta, then epi-mono.
    let eta = subset_to_surjection(alpha, source_level);
    let comp = eta.compose(theta);
    let (epi, mono) = comp.epi_mono_factor();
    let beta = surjection_to_subset(&epi);
    let k = alpha.len();
    if mono.is_surjective() {
        vec![(beta, Matrix::identity(e.rank(k)))]
    } else if k >= 1 && mono == OrdinalMap::delta(0, k) {
        vec![(beta, e.boundary_from(k))]
    } else {
        vec![]
    }
}

/// Matrix of the face `d_i : K(E)_n -> K(E)_{n-1}`.
pub fn dk_face_matrix<S: Scalar>(e: &ChainComplex<S>, n: usize, i: usize) -> Matrix<S> {
    assert!(n >= 1 && i <= n);
    let src = DKLevelBasis::new(&e.ranks, n);
    let dst = DKLevelBasis::new(&e.ranks, n - 1);
    let mut m: Matrix<S> = Matrix::zero(dst.dim(), src.dim());
    let delta = OrdinalMap::delta(i, n);
    for elem in &src.elems {
        let col = src.position(&elem.alpha, elem.label);
        for (beta, block) in act_on_summand(e, &delta, &elem.alpha, n) {
            for row_label in 0..block.rows {
                let c = block[(row_label, elem.label)].clone();
                if !c.is_zero() {
                    let row = dst.position(&beta, row_label);
                    m[(row, col)] = m[(row, col)].clone() + c;
                }
            }
        }
    }
    m
}

/// Matrix of the degeneracy `s_j : K(E)_n -> K(E)_{n+1}`.
pub fn dk_degeneracy_matrix<S: Scalar>(e: &ChainComplex<S>, n: usize, j: usize) -> Matrix<S> {
    assert!(j <= n);
    let src = DKLevelBasis::new(&e.ranks, n);
    let dst = DKLevelBasis::new(&e.ranks, n + 1);
    let mut m: Matrix<S> = Matrix::zero(dst.dim(), src.dim());
    let sigma = OrdinalMap::sigma(j, n);
    for elem in &src.elems {
        let col = src.position(&elem.alpha, elem.label);
        for (beta, block) in act_on_summand(e, &sigma, &elem.alpha, n) {
            for row_label in 0..block.rows {
                let c = block[(row_label, elem.label)].clone();
                if !c.is_zero() {
                    let row = dst.position(&beta, row_label);
                    m[(row, col)] = m[(row, col)].clone() + c;
                }
            }
        }
    }
    m
}

/// Simplicial vector space presented by levelwise dimensions and operator
/// matrices: `face[n-1][i]` maps level n to n-1, `degeneracy[n][j]` maps
/// level n to n+1.
#[derive(Clone, Debug)]
pub struct SimplicialVectorSpace<S> {
    pub dims: Vec<usize>,
    pub face: Vec<Vec<Matrix<S>>>,
    pub degeneracy: Vec<Vec<Matrix<S>>>,
}

impl<S: Scalar> SimplicialVectorSpace<S> {
    pub fn top_level(&self) -> usize {
        self.dims.len() - 1
    }

    pub fn face_matrix(&self, n: usize, i: usize) -> &Matrix<S> {
        &self.face[n - 1][i]
    }

    pub fn degeneracy_matrix(&self, n: usize, j: usize) -> &Matrix<S> {
        &self.degeneracy[n][j]
    }

    /// Check every simplicial identity expressible inside the stored levels.
    pub fn validate_identities(&self) -> Result<(), String> {
        let top = self.top_level();
        for n in 2..=top {
            for j in 1..=n {
                for i in 0..j {
                    let lhs = self.face_matrix(n - 1, i).mul(self.face_matrix(n, j));
                    let rhs = self.face_matrix(n - 1, j - 1).mul(self.face_matrix(n, i));
                    if lhs != rhs {
                        return Err(format!("face-face identity fails at n={n}, i={i}, j={j}"));
                    }
                }
            }
        }
        for n in 0..top.saturating_sub(1) {
            for j in 0..=n {
                for i in 0..=j {
                    {
                        let lhs = self
                            .degeneracy_matrix(n + 1, j + 1)
                            .mul(self.degeneracy_matrix(n, i));
                        let rhs = self
                            .degeneracy_matrix(n + 1, i)
                            .mul(self.degeneracy_matrix(n, j));
                        if lhs != rhs {
                            return Err(format!(
                                "degeneracy-degeneracy identity fails at n={n}, i={i}, j={j}"
                            ));
                        }
                    }
                }
            }
        }
        for n in 1..=top.saturating_sub(1) {
            for j in 0..=n {
                for i in 0..=n + 1 {
                    let lhs = self.face_matrix(n + 1, i).mul(self.degeneracy_matrix(n, j));
                    let rhs = if i == j || i == j + 1 {
                        Matrix::identity(self.dims[n])
                    } else if i < j {
                        self.degeneracy_matrix(n - 1, j - 1).mul(self.face_matrix(n, i))
                    } else {
                        self.degeneracy_matrix(n - 1, j).mul(self.face_matrix(n, i - 1))
                    };
                    if lhs != rhs {
                        return Err(format!(
                            "face-degeneracy identity fails at n={n}, i={i}, j={j}"
                        ));
                    }
                }
            }
        }
        Ok(())
    }
}

/// Build `K(E)` through the given top level.
pub fn denormalize<S: Scalar>(e: &ChainComplex<S>, top_level: usize) -> SimplicialVectorSpace<S> {
    let dims = (0..=top_level)
        .map(|n| DKLevelBasis::new(&e.ranks, n).dim())
        .collect();
    let face = (1..=top_level)
        .map(|n| (0..=n).map(|i| dk_face_matrix(e, n, i)).collect())
        .collect();
    let degeneracy = (0..top_level)
        .map(|n| (0..=n).map(|j| dk_degeneracy_matrix(e, n, j)).collect())
        .collect();
    SimplicialVectorSpace {
        dims,
        face,
        degeneracy,
    }
}

/// Normalized chain complex `N(V)_n = ker d_1 .. cap ker d_n` with boundary
/// `d_0`. Returns the complex together with the chosen basis columns of each
/// level's subspace.
pub fn normalize<S: Scalar>(v: &SimplicialVectorSpace<S>) -> (ChainComplex<S>, Vec<Matrix<S>>) {
    let top = v.top_level();
    let mut bases: Vec<Matrix<S>> = Vec::new();
    for n in 0..=top {
        if n == 0 {
            bases.push(Matrix::identity(v.dims[0]));
            continue;
        }
        let mut stacked: Matrix<S> = Matrix::zero(n * v.dims[n - 1], v.dims[n]);
        for i in 1..=n {
            let f = v.face_matrix(n, i);
            for r in 0..v.dims[n - 1] {
                for c in 0..v.dims[n] {
                    stacked[((i - 1) * v.dims[n - 1] + r, c)] = f[(r, c)].clone();
                }
            }
        }
        let kernel = stacked.kernel_basis();
        let mut basis: Matrix<S> = Matrix::zero(v.dims[n], kernel.len());
        for (jcol, vec) in kernel.iter().enumerate() {
            for (irow, entry) in vec.iter().enumerate() {
                basis[(irow, jcol)] = entry.clone();
            }
        }
        bases.push(basis);
    }
    let ranks: Vec<usize> = bases.iter().map(|b| b.cols).collect();
    let mut boundary = Vec::new();
    for n in 1..=top {
        let image = v.face_matrix(n, 0).mul(&bases[n]);
        let in_basis = bases[n - 1]
            .solve(&image)
            .expect("d_0 must map normalized part into normalized part");
        boundary.push(in_basis);
    }
    let complex = ChainComplex::new(ranks, boundary).expect("normalized boundary squares to zero");
    (complex, bases)
}

/// Connective cochain complex: `d[k]` maps degree k to k+1.
#[derive(Clone, PartialEq, Debug)]
pub struct CochainComplex<S> {
    pub ranks: Vec<usize>,
    pub d: Vec<Matrix<S>>,
}

impl<S: Scalar> CochainComplex<S> {
    pub fn new(ranks: Vec<usize>, d: Vec<Matrix<S>>) -> Result<Self, String> {
        if d.len() + 1 != ranks.len().max(1) {
            return Err("wrong number of differentials".into());
        }
        for (k, m) in d.iter().enumerate() {
            if m.rows != ranks[k + 1] || m.cols != ranks[k] {
                return Err(format!("differential {k} has shape {}x{}", m.rows, m.cols));
            }
        }
        for k in 0..d.len().saturating_sub(1) {
            if !d[k + 1].mul(&d[k]).is_zero() {
                return Err(format!("differential squared nonzero at degree {k}"));
            }
        }
        Ok(CochainComplex { ranks, d })
    }

    pub fn rank(&self, k: usize) -> usize {
        self.ranks.get(k).copied().unwrap_or(0)
    }

    pub fn d_from(&self, k: usize) -> Matrix<S> {
        if k < self.d.len() {
            self.d[k].clone()
        } else {
            Matrix::zero(self.rank(k + 1), self.rank(k))
        }
    }
}

/// Sign of sorting the concatenation of two disjoint sorted subsets; `None`
/// when they intersect.
pub fn wedge_sign(alpha: &IndexSubset, beta: &IndexSubset) -> Option<i8> {
    let mut inv = 0usize;
    for &a in alpha {
        if beta.binary_search(&a).is_ok() {
            return None;
        }
        inv += beta.iter().filter(|&&b| b < a).count();
    }
    Some(if inv % 2 == 0 { 1 } else { -1 })
}

/// Matrix of the coface `d^i : K(Y)^n -> K(Y)^{n+1}` of the denormalized
/// cosimplicial vector space of a cochain complex.
pub fn codk_coface_matrix<S: Scalar>(y: &CochainComplex<S>, n: usize, i: usize) -> Matrix<S> {
    assert!(i <= n + 1);
    let src = DKLevelBasis::new(&y.ranks, n);
    let dst = DKLevelBasis::new(&y.ranks, n + 1);
    let mut m: Matrix<S> = Matrix::zero(dst.dim(), src.dim());
    for elem in &src.elems {
        let col = src.position(&elem.alpha, elem.label);
        let k = elem.alpha.len();
        if i == 0 {
            let shifted: IndexSubset = elem.alpha.iter().map(|&a| a + 1).collect();
            let row = dst.position(&shifted, elem.label);
            m[(row, col)] = m[(row, col)].clone() + S::one();
            let with_one: IndexSubset =
                std::iter::once(1).chain(shifted.iter().copied()).collect();
            let dmat = y.d_from(k);
            for t in 0..dmat.rows {
                let c = dmat[(t, elem.label)].clone();
                if !c.is_zero() {
                    let row = dst.position(&with_one, t);
                    m[(row, col)] = m[(row, col)].clone() + c;
                }
            }
        } else if elem.alpha.binary_search(&i).is_err() {
            let beta = crate::simplex::delta_subset(i, &elem.alpha);
            let row = dst.position(&beta, elem.label);
            m[(row, col)] = m[(row, col)].clone() + S::one();
        } else {
            for shift in [i, i + 1] {
                let beta = crate::simplex::delta_subset(shift, &elem.alpha);
                let row = dst.position(&beta, elem.label);
                m[(row, col)] = m[(row, col)].clone() + S::one();
            }
        }
    }
    m
}

/// Matrix of the codegeneracy `s^j : K(Y)^{n+1} -> K(Y)^n`.
pub fn codk_codegeneracy_matrix<S: Scalar>(y: &CochainComplex<S>, n: usize, j: usize) -> Matrix<S> {
    assert!(j <= n);
    let src = DKLevelBasis::new(&y.ranks, n + 1);
    let dst = DKLevelBasis::new(&y.ranks, n);
    let mut m: Matrix<S> = Matrix::zero(dst.dim(), src.dim());
    for elem in &src.elems {
        let col = src.position(&elem.alpha, elem.label);
        if elem.alpha.binary_search(&(j + 1)).is_ok() {
            continue;
        }
        let beta = crate::simplex::sigma_subset(j + 1, &elem.alpha);
        let row = dst.position(&beta, elem.label);
        m[(row, col)] = m[(row, col)].clone() + S::one();
    }
    m
}

/// One coefficient of a tensor over a pair of denormalized level bases.
pub type TensorElement<S> = BTreeMap<(usize, usize), S>;

/// Alexander-Whitney embedding of `Y^p (x) Y^q` into the normalized tensors
/// of the denormalized object: traverse the front face `q` times on the left
/// factor and the zeroth coface `p` times on the right factor.
pub fn aw<S: Scalar>(
    y: &CochainComplex<S>,
    p: usize,
    q: usize,
    f_label: usize,
    g_label: usize,
) -> TensorElement<S> {
    let n = p + q;
    let mut left = vec![S::zero(); DKLevelBasis::new(&y.ranks, p).dim()];
    let basis_p = DKLevelBasis::new(&y.ranks, p);
    left[basis_p.position(&(1..=p).collect(), f_label)] = S::one();
    let mut level = p;
    for _ in 0..q {
        let mat = codk_coface_matrix(y, level, p + 1);
        left = mat.apply(&left);
        level += 1;
    }
    let basis_q = DKLevelBasis::new(&y.ranks, q);
    let mut right = vec![S::zero(); basis_q.dim()];
    right[basis_q.position(&(1..=q).collect(), g_label)] = S::one();
    let mut level = q;
    for _ in 0..p {
        let mat = codk_coface_matrix(y, level, 0);
        right = mat.apply(&right);
        level += 1;
    }
    let basis_n = DKLevelBasis::new(&y.ranks, n);
    let mut out = TensorElement::new();
    for (iu, cu) in left.iter().enumerate() {
        if cu.is_zero() {
            continue;
        }
        for (iv, cv) in right.iter().enumerate() {
            if cv.is_zero() {
                continue;
            }
            let _ = &basis_n;
            out.insert((iu, iv), cu.clone() * cv.clone());
        }
    }
    out
}

/// Normalized shuffle: kills overlapping tensors, sends partition tensors to
/// the signed pair of normalized generators. Output components are keyed by
/// `(p, f_label, g_label)` with `p` the level of the left factor.
pub fn sh<S: Scalar>(
    y: &CochainComplex<S>,
    n: usize,
    t: &TensorElement<S>,
) -> BTreeMap<(usize, usize, usize), S> {
    let basis = DKLevelBasis::new(&y.ranks, n);
    let full: IndexSubset = (1..=n).collect();
    let mut out = BTreeMap::new();
    for ((iu, iv), c) in t {
        if c.is_zero() {
            continue;
        }
        let u = &basis.elems[*iu];
        let v = &basis.elems[*iv];
        let Some(sign) = wedge_sign(&u.alpha, &v.alpha) else {
            continue;
        };
        let mut union: IndexSubset = u.alpha.iter().chain(v.alpha.iter()).copied().collect();
        union.sort_unstable();
        if union != full {
            continue;
        }
        let key = (u.alpha.len(), u.label, v.label);
        let signed = if sign < 0 { -c.clone() } else { c.clone() };
        let entry = out.entry(key).or_insert_with(S::zero);
        *entry = entry.clone() + signed;
        if entry.is_zero() {
            out.remove(&key);
        }
    }
    out
}

/// Basis tensors of the normalized part of the levelwise tensor square:
/// pairs of denormalized basis elements whose subsets cover `{1, .., n}`.
/// The boolean records whether the pair overlaps.
pub fn covering_tensor_basis<S: Scalar>(
    y: &CochainComplex<S>,
    n: usize,
) -> Vec<((usize, usize), bool)> {
    let basis = DKLevelBasis::new(&y.ranks, n);
    let full: IndexSubset = (1..=n).collect();
    let mut out = Vec::new();
    for (iu, u) in basis.elems.iter().enumerate() {
        for (iv, v) in basis.elems.iter().enumerate() {
            let mut union: IndexSubset = u.alpha.iter().chain(v.alpha.iter()).copied().collect();
            union.sort_unstable();
            union.dedup();
            if union == full {
                let overlap = u.alpha.iter().any(|a| v.alpha.binary_search(a).is_ok());
                out.push(((iu, iv), overlap));
            }
        }
    }
    out
}

/// The overlapping tensors alone.
pub fn overlapping_basis<S: Scalar>(y: &CochainComplex<S>, n: usize) -> Vec<(usize, usize)> {
    covering_tensor_basis(y, n)
        .into_iter()
        .filter(|(_, overlap)| *overlap)
        .map(|(pair, _)| pair)
        .collect()
}
