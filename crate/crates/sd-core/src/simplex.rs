//! Combinatorics of the simplex category and of labeled block data.
//!
//! Conventions used throughout the crate:
//! * `[n]` is the ordinal `{0, 1, .., n}`.
//! * Index subsets live inside `{1, .., n}`; the basepoint vertex `0` is
//!   never a member.
//! * A labeled block sequence is an ordered list of (subset, label) pairs.
//!   Blocks of a partition are pairwise disjoint and cover `{1, .., n}`.

use std::fmt;

pub type Label = u32;
pub type IndexSubset = Vec<usize>;
pub type LabeledBlockSequence = Vec<(IndexSubset, Label)>;
/// Non-decreasing part sizes.
pub type IntegerPartition = Vec<usize>;

#[derive(Clone, PartialEq, Eq, Debug)]
pub enum SimplexError {
    NotMonotone,
    OutOfRange(String),
    NotAPartition(String),
}

impl fmt::Display for SimplexError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            SimplexError::NotMonotone => write!(f, "ordinal map values must be non-decreasing"),
            SimplexError::OutOfRange(m) => write!(f, "index out of range: {m}"),
            SimplexError::NotAPartition(m) => write!(f, "expected a labeled partition: {m}"),
        }
    }
}

impl std::error::Error for SimplexError {}

/// Order-preserving map `[domain] -> [codomain]`, stored by its value table.
#[derive(Clone, PartialEq, Eq, Debug, Hash)]
pub struct OrdinalMap {
    codomain: usize,
    values: Vec<usize>,
}

impl OrdinalMap {
    pub fn new(codomain: usize, values: Vec<usize>) -> Result<Self, SimplexError> {
        if values.windows(2).any(|w| w[0] > w[1]) {
            return Err(SimplexError::NotMonotone);
        }
        if values.iter().any(|&v| v > codomain) {
            return Err(SimplexError::OutOfRange(format!(
                "value exceeds codomain {codomain}"
            )));
        }
        Ok(OrdinalMap { codomain, values })
    }

    pub fn identity(n: usize) -> Self {
        OrdinalMap {
            codomain: n,
            values: (0..=n).collect(),
        }
    }

    /// The injection `[n-1] -> [n]` missing `i`.
    pub fn delta(i: usize, n: usize) -> Self {
        assert!(n >= 1 && i <= n, "delta({i}) needs 0 <= i <= {n}");
        OrdinalMap {
            codomain: n,
            values: (0..n).map(|t| if t < i { t } else { t + 1 }).collect(),
        }
    }

    /// The surjection `[n+1] -> [n]` repeating `j`.
    pub fn sigma(j: usize, n: usize) -> Self {
        assert!(j <= n, "sigma({j}) needs 0 <= j <= {n}");
        OrdinalMap {
            codomain: n,
            values: (0..=n + 1).map(|t| if t <= j { t } else { t - 1 }).collect(),
        }
    }

    pub fn domain(&self) -> usize {
        self.values.len() - 1
    }

    pub fn codomain(&self) -> usize {
        self.codomain
    }

    pub fn apply(&self, t: usize) -> usize {
        self.values[t]
    }

    /// `self` after `other`: the composite `[m] -> [n] -> [k]` where `other`
    /// maps into the domain of `self`.
    pub fn compose(&self, other: &OrdinalMap) -> OrdinalMap {
        assert_eq!(other.codomain, self.domain(), "composition level mismatch");
        OrdinalMap {
            codomain: self.codomain,
            values: other.values.iter().map(|&t| self.values[t]).collect(),
        }
    }

    pub fn is_injective(&self) -> bool {
        self.values.windows(2).all(|w| w[0] < w[1])
    }

    pub fn is_surjective(&self) -> bool {
        let mut expect = 0;
        for &v in &self.values {
            if v == expect + 1 {
                expect = v;
            }
        }
        self.values.first() == Some(&0) && expect == self.codomain
    }

    /// Unique factorization `self = mono . epi` with `epi` surjective and
    /// `mono` injective.
    pub fn epi_mono_factor(&self) -> (OrdinalMap, OrdinalMap) {
        let mut image = self.values.clone();
        image.dedup();
        let epi_values = self
            .values
            .iter()
            .map(|&v| image.iter().position(|&w| w == v).unwrap())
            .collect();
        let r = image.len() - 1;
        let epi = OrdinalMap {
            codomain: r,
            values: epi_values,
        };
        let mono = OrdinalMap {
            codomain: self.codomain,
            values: image,
        };
        (epi, mono)
    }

    /// Pointwise image of a subset, with a flag reporting whether two
    /// elements collided (so the image is strictly smaller).
    pub fn apply_to_subset(&self, alpha: &IndexSubset) -> (IndexSubset, bool) {
        let mut image: IndexSubset = alpha.iter().map(|&a| self.values[a]).collect();
        image.sort_unstable();
        image.dedup();
        let dropped = image.len() < alpha.len();
        (image, dropped)
    }
}

/// Pointwise delta on a subset (all elements distinct stay distinct).
pub fn delta_subset(i: usize, alpha: &IndexSubset) -> IndexSubset {
    alpha
        .iter()
        .map(|&a| if a < i { a } else { a + 1 })
        .collect()
}

/// Pointwise sigma on a subset; caller is responsible for collision handling.
pub fn sigma_subset(j: usize, alpha: &IndexSubset) -> IndexSubset {
    let mut out: IndexSubset = alpha
        .iter()
        .map(|&a| if a <= j { a } else { a - 1 })
        .collect();
    out.sort_unstable();
    out.dedup();
    out
}

/// The surjection `[n] -> [k]` encoded by a subset of `{1, .., n}` of size
/// `k`: it increments exactly at the members of the subset.
pub fn subset_to_surjection(alpha: &IndexSubset, n: usize) -> OrdinalMap {
    let mut values = Vec::with_capacity(n + 1);
    let mut height = 0;
    for t in 0..=n {
        if alpha.binary_search(&t).is_ok() {
            height += 1;
        }
        values.push(height);
    }
    OrdinalMap {
        codomain: alpha.len(),
        values,
    }
}

/// Inverse of [`subset_to_surjection`].
pub fn surjection_to_subset(eta: &OrdinalMap) -> IndexSubset {
    (1..=eta.domain())
        .filter(|&t| eta.values[t] > eta.values[t - 1])
        .collect()
}

#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum Classification {
    NonCovering,
    CoveringWithOverlap { min_overlapped: usize },
    Partition,
}

/// Classify a labeled block sequence relative to the ground set `{1, .., n}`.
pub fn classify_sequence(seq: &LabeledBlockSequence, n: usize) -> Classification {
    let mut count = vec![0usize; n + 1];
    for (block, _) in seq {
        for &a in block {
            assert!(a >= 1 && a <= n, "block element {a} outside 1..={n}");
            count[a] += 1;
        }
    }
    if count[1..].iter().any(|&c| c == 0) {
        return Classification::NonCovering;
    }
    match count[1..].iter().position(|&c| c >= 2) {
        Some(p) => Classification::CoveringWithOverlap { min_overlapped: p + 1 },
        None => Classification::Partition,
    }
}

pub fn block_sizes(seq: &LabeledBlockSequence) -> IntegerPartition {
    let mut sizes: Vec<usize> = seq.iter().map(|(b, _)| b.len()).collect();
    sizes.sort_unstable();
    sizes
}

#[derive(Clone, PartialEq, Eq, Debug)]
pub enum Unraveled {
    /// The monomial is its own negative in the quotient (an odd square).
    Zero,
    Canonical {
        seq: LabeledBlockSequence,
        sign: i8,
    },
}

/// Rewrite a labeled partition to the canonical one: blocks become the
/// consecutive intervals of the sorted size sequence, and labels are sorted
/// ascending within each run of equal block size.
///
/// Rewrites used and their costs: reordering the sequence is free; the
/// transposition swapping j, j+1 across two different blocks costs a factor
/// -1; exchanging two adjacent equal-size-k blocks therefore costs (-1)^k.
pub fn unravel(seq: &LabeledBlockSequence, n: usize) -> Result<Unraveled, SimplexError> {
    if classify_sequence(seq, n) != Classification::Partition {
        return Err(SimplexError::NotAPartition(format!("{seq:?} over {{1..{n}}}")));
    }
    let mut blocks = seq.clone();
    // Free pre-sort: by size, then by largest element among equal sizes.
    blocks.sort_by_key(|(b, _)| (b.len(), *b.last().unwrap()));
    let mut sign: i8 = 1;

    // Transposition loop: while some j sits in a later block than j+1, swap
    // the pair j, j+1 pointwise. Each pass costs -1.
    let mut guard = 0usize;
    loop {
        let mut owner = vec![usize::MAX; n + 2];
        for (r, (b, _)) in blocks.iter().enumerate() {
            for &a in b {
                owner[a] = r;
            }
        }
        let j = (1..n).find(|&j| owner[j] > owner[j + 1]);
        let Some(j) = j else { break };
        for (b, _) in blocks.iter_mut() {
            for a in b.iter_mut() {
                if *a == j {
                    *a = j + 1;
                } else if *a == j + 1 {
                    *a = j;
                }
            }
            b.sort_unstable();
        }
        sign = -sign;
        guard += 1;
        assert!(guard <= n * n * (blocks.len() + 1), "transposition loop failed to settle");
    }

    debug_assert!(is_canonical_partition_shape(&blocks));

    // Sort labels within runs of equal block size. Swapping neighbors in a
    // run of size-k blocks costs (-1)^k; an exchange of equal labels in an
    // odd run makes the class equal to its own negative.
    let mut i = 0;
    while i < blocks.len() {
        let k = blocks[i].0.len();
        let mut j = i;
        while j < blocks.len() && blocks[j].0.len() == k {
            j += 1;
        }
        let mut labels: Vec<Label> = blocks[i..j].iter().map(|(_, l)| *l).collect();
        if k % 2 == 1 {
            let mut sorted = labels.clone();
            sorted.sort_unstable();
            if sorted.windows(2).any(|w| w[0] == w[1]) {
                return Ok(Unraveled::Zero);
            }
            // Bubble sort to count inversions mod 2.
            for a in 0..labels.len() {
                for b in 0..labels.len() - 1 - a {
                    if labels[b] > labels[b + 1] {
                        labels.swap(b, b + 1);
                        sign = -sign;
                    }
                }
            }
        } else {
            labels.sort_unstable();
        }
        for (slot, label) in blocks[i..j].iter_mut().zip(labels) {
            slot.1 = label;
        }
        i = j;
    }

    Ok(Unraveled::Canonical { seq: blocks, sign })
}

/// Canonical shape: consecutive intervals with non-decreasing sizes.
pub fn is_canonical_partition_shape(seq: &LabeledBlockSequence) -> bool {
    let mut next = 1;
    let mut prev_len = 0;
    for (b, _) in seq {
        if b.len() < prev_len {
            return false;
        }
        for &a in b {
            if a != next {
                return false;
            }
            next += 1;
        }
        prev_len = b.len();
    }
    true
}

/// The canonical labeled partition for given block sizes and labels: blocks
/// are consecutive intervals.
pub fn canonical_partition(sizes: &[usize], labels: &[Label]) -> LabeledBlockSequence {
    assert_eq!(sizes.len(), labels.len());
    let mut next = 1;
    sizes
        .iter()
        .zip(labels)
        .map(|(&k, &l)| {
            let block: IndexSubset = (next..next + k).collect();
            next += k;
            (block, l)
        })
        .collect()
}

#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum SimplicialOp {
    Face(usize),
    Degeneracy(usize),
}

#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum Direction {
    Horizontal,
    Vertical,
}

/// Reindex a simplicial operator of the decalage bisimplicial object, whose
/// (p, q) level is the (p+q+1)-level of the original object: horizontal
/// operators act through index i+q+1, vertical ones keep their index.
pub fn decalage_reindex(op: SimplicialOp, dir: Direction, q: usize) -> SimplicialOp {
    match (op, dir) {
        (SimplicialOp::Face(i), Direction::Horizontal) => SimplicialOp::Face(i + q + 1),
        (SimplicialOp::Degeneracy(j), Direction::Horizontal) => SimplicialOp::Degeneracy(j + q + 1),
        (op, Direction::Vertical) => op,
    }
}

/// All integer partitions of `n` with non-decreasing parts.
pub fn partitions(n: usize) -> Vec<IntegerPartition> {
    fn go(remaining: usize, min_part: usize, prefix: &mut Vec<usize>, out: &mut Vec<IntegerPartition>) {
        if remaining == 0 {
            out.push(prefix.clone());
            return;
        }
        for part in min_part..=remaining {
            prefix.push(part);
            go(remaining - part, part, prefix, out);
            prefix.pop();
        }
    }
    let mut out = Vec::new();
    go(n, 1, &mut Vec::new(), &mut out);
    out
}

/// All set partitions of `{1, .., n}` as canonically ordered block lists
/// (each block sorted; blocks sorted by least element).
pub fn set_partitions(n: usize) -> Vec<Vec<IndexSubset>> {
    let mut out = Vec::new();
    let mut blocks: Vec<IndexSubset> = Vec::new();
    fn go(next: usize, n: usize, blocks: &mut Vec<IndexSubset>, out: &mut Vec<Vec<IndexSubset>>) {
        if next > n {
            out.push(blocks.clone());
            return;
        }
        for i in 0..blocks.len() {
            blocks[i].push(next);
            go(next + 1, n, blocks, out);
            blocks[i].pop();
        }
        blocks.push(vec![next]);
        go(next + 1, n, blocks, out);
        blocks.pop();
    }
    go(1, n, &mut blocks, &mut out);
    out
}
