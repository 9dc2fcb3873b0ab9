//! JSON formats for presentations on disk and reports emitted by the tool.
//!
//! All rational numbers travel as `"p/q"` strings (or `"p"` when the
//! denominator is one); nothing in these files is ever a float. Maps are
//! `BTreeMap`s throughout so serialized output is byte-deterministic.

use std::collections::BTreeMap;
use std::path::Path;
use std::str::FromStr;

use num_bigint::BigInt;
use serde::{Deserialize, Serialize};

use sd_core::cosimplicial::{FiniteCosimplicialAlgebra, LevelAlgebra};
use sd_core::differentiate::{CoordKey, FramedPresentation, PullbackTable};
use sd_core::dold_kan::ChainComplex;
use sd_core::matrix::Matrix;
use sd_core::oracle::GroupLaw;
use sd_core::poly::{GenName, GeneratorId, GradedPolynomial, Monomial, Parity};
use sd_core::Q;

pub fn parse_q(s: &str) -> Result<Q, String> {
    let (num, den) = match s.split_once('/') {
        Some((n, d)) => (n, d),
        None => (s, "1"),
    };
    let n = BigInt::from_str(num.trim()).map_err(|e| format!("bad numerator in {s:?}: {e}"))?;
    let d = BigInt::from_str(den.trim()).map_err(|e| format!("bad denominator in {s:?}: {e}"))?;
    if d == BigInt::from(0) {
        return Err(format!("zero denominator in {s:?}"));
    }
    Ok(Q::new(n, d))
}

pub fn fmt_q(x: &Q) -> String {
    x.to_string()
}

/// One monomial factor of a level coordinate: block, label, exponent.
pub type CoordFactor = (Vec<usize>, u32, u32);

#[derive(Serialize, Deserialize, Clone)]
#[serde(deny_unknown_fields)]
pub struct TermFile {
    pub monomial: Vec<CoordFactor>,
    pub coeff: String,
}

#[derive(Serialize, Deserialize, Clone)]
#[serde(deny_unknown_fields)]
pub struct PullbackEntry {
    pub coord: (Vec<usize>, u32),
    pub value: Vec<TermFile>,
}

#[derive(Serialize, Deserialize, Clone)]
#[serde(deny_unknown_fields)]
pub struct LawTermFile {
    /// Factors as `["x"|"y", component, exponent]`.
    pub factors: Vec<(String, u32, u32)>,
    pub coeff: String,
}

#[derive(Serialize, Deserialize, Clone)]
#[serde(deny_unknown_fields)]
pub struct GroupLawFile {
    pub dim: usize,
    pub components: Vec<Vec<LawTermFile>>,
}

#[derive(Serialize, Deserialize, Clone)]
#[serde(deny_unknown_fields)]
pub struct LevelFile {
    pub dim: usize,
    /// 0 even, 1 odd, one entry per basis vector.
    pub parity: Vec<u8>,
    pub unit: Vec<String>,
    /// `product[i][j]` is the sparse expansion of e_i * e_j as `[index, coeff]` pairs.
    pub product: Vec<Vec<Vec<(usize, String)>>>,
}

/// A presentation on disk. `kind` selects which fields are read:
/// `"framed"` uses `tangent_ranks`/`boundary`/`truncation`/`d0` (+ `super`),
/// `"group_law"` uses `truncation`/`group_law`, and `"cosimplicial"` uses
/// `levels`/`coface`/`codegeneracy`/`graded_commutative`.
#[derive(Serialize, Deserialize, Clone)]
#[serde(deny_unknown_fields)]
pub struct PresentationFile {
    pub kind: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub tangent_ranks: Option<Vec<usize>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub boundary: Option<Vec<Vec<Vec<String>>>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub truncation: Option<u32>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub d0: Option<Vec<Vec<PullbackEntry>>>,
    #[serde(rename = "super", default, skip_serializing_if = "std::ops::Not::not")]
    pub superized: bool,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub group_law: Option<GroupLawFile>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub levels: Option<Vec<LevelFile>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub coface: Option<Vec<Vec<Vec<Vec<String>>>>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub codegeneracy: Option<Vec<Vec<Vec<Vec<String>>>>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub graded_commutative: Option<bool>,
}

pub fn load_presentation(path: &Path) -> Result<PresentationFile, String> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| format!("cannot read {}: {e}", path.display()))?;
    serde_json::from_str(&text).map_err(|e| format!("cannot parse {}: {e}", path.display()))
}

fn check_block(alpha: &[usize]) -> Result<(), String> {
    if alpha.is_empty() {
        return Err("empty index block in a coordinate".into());
    }
    if alpha[0] == 0 {
        return Err("index blocks are 1-based; found index 0".into());
    }
    if alpha.windows(2).any(|w| w[0] >= w[1]) {
        return Err(format!("index block {alpha:?} is not strictly increasing"));
    }
    Ok(())
}

fn monomial_from_factors(factors: &[CoordFactor], superized: bool) -> Result<Monomial, String> {
    let mut acc: BTreeMap<GeneratorId, u32> = BTreeMap::new();
    for (alpha, label, exp) in factors {
        check_block(alpha)?;
        if *exp == 0 {
            continue;
        }
        let g = GeneratorId::coord(alpha.clone(), *label, superized);
        *acc.entry(g).or_insert(0) += *exp;
    }
    Monomial::from_factors(acc.into_iter().collect())
        .ok_or_else(|| "a square of an odd coordinate appears in a monomial".into())
}

fn poly_from_terms(
    terms: &[TermFile],
    superized: bool,
    truncation: u32,
) -> Result<GradedPolynomial<Q>, String> {
    let mut p = GradedPolynomial::zero(Some(truncation));
    for t in terms {
        let m = monomial_from_factors(&t.monomial, superized)?;
        if m.weight() > truncation {
            return Err(format!(
                "term {m} has weight {} beyond the stated truncation {truncation}",
                m.weight()
            ));
        }
        p.add_term(m, parse_q(&t.coeff)?);
    }
    Ok(p)
}

fn poly_to_terms(p: &GradedPolynomial<Q>) -> Result<Vec<TermFile>, String> {
    let mut out = Vec::new();
    for (m, c) in p.terms() {
        let mut factors = Vec::new();
        for (g, e) in m.factors() {
            match &g.name {
                GenName::Coord { alpha, label } => factors.push((alpha.clone(), *label, *e)),
                other => return Err(format!("non-coordinate generator {other:?} in a pullback")),
            }
        }
        out.push(TermFile {
            monomial: factors,
            coeff: fmt_q(c),
        });
    }
    Ok(out)
}

fn matrix_from_rows(
    rows: &[Vec<String>],
    r: usize,
    c: usize,
    what: &str,
) -> Result<Matrix<Q>, String> {
    if rows.len() != r {
        return Err(format!("{what}: expected {r} rows, found {}", rows.len()));
    }
    let mut m = Matrix::zero(r, c);
    for (i, row) in rows.iter().enumerate() {
        if row.len() != c {
            return Err(format!(
                "{what}: row {i} has {} entries, expected {c}",
                row.len()
            ));
        }
        for (j, s) in row.iter().enumerate() {
            m[(i, j)] = parse_q(s)?;
        }
    }
    Ok(m)
}

pub fn matrix_to_rows(m: &Matrix<Q>) -> Vec<Vec<String>> {
    (0..m.rows)
        .map(|i| (0..m.cols).map(|j| fmt_q(&m[(i, j)])).collect())
        .collect()
}

pub fn vec_q(v: &[Q]) -> String {
    let inner: Vec<String> = v.iter().map(fmt_q).collect();
    format!("[{}]", inner.join(", "))
}

pub fn build_framed(f: &PresentationFile) -> Result<FramedPresentation<Q>, String> {
    let ranks = f
        .tangent_ranks
        .clone()
        .ok_or("framed presentation needs tangent_ranks")?;
    let truncation = f.truncation.ok_or("framed presentation needs a truncation")?;
    let boundary_rows = f.boundary.clone().unwrap_or_default();
    if ranks.is_empty() {
        return Err("tangent_ranks is empty".into());
    }
    let expected = ranks.len().saturating_sub(1);
    if boundary_rows.len() != expected {
        return Err(format!(
            "boundary lists {} matrices, tangent_ranks needs {expected}",
            boundary_rows.len()
        ));
    }
    let mut boundary = Vec::new();
    for (k, rows) in boundary_rows.iter().enumerate() {
        boundary.push(matrix_from_rows(
            rows,
            ranks[k],
            ranks[k + 1],
            &format!("boundary[{k}]"),
        )?);
    }
    let tangent = ChainComplex::new(ranks, boundary)?;
    let tables_in = f.d0.as_ref().ok_or("framed presentation needs d0 tables")?;
    let mut tables: Vec<PullbackTable<Q>> = Vec::new();
    for level in tables_in {
        let mut table: PullbackTable<Q> = BTreeMap::new();
        for entry in level {
            check_block(&entry.coord.0)?;
            let key: CoordKey = (entry.coord.0.clone(), entry.coord.1);
            let poly = poly_from_terms(&entry.value, f.superized, truncation)?;
            if table.insert(key.clone(), poly).is_some() {
                return Err(format!("duplicate pullback entry for x{:?}:{}", key.0, key.1));
            }
        }
        tables.push(table);
    }
    FramedPresentation::new(tangent, truncation, tables, f.superized)
}

pub fn framed_file(p: &FramedPresentation<Q>) -> Result<PresentationFile, String> {
    let ranks = p.tangent().ranks.clone();
    let boundary = p.tangent().boundary.iter().map(matrix_to_rows).collect();
    let mut d0 = Vec::new();
    for m in 1..=p.max_level() {
        let mut level = Vec::new();
        for key in p.coords(m - 1) {
            let poly = p.d0_image(m, &key)?;
            level.push(PullbackEntry {
                coord: key,
                value: poly_to_terms(poly)?,
            });
        }
        d0.push(level);
    }
    Ok(PresentationFile {
        kind: "framed".into(),
        tangent_ranks: Some(ranks),
        boundary: Some(boundary),
        truncation: Some(p.truncation()),
        d0: Some(d0),
        superized: p.superized(),
        group_law: None,
        levels: None,
        coface: None,
        codegeneracy: None,
        graded_commutative: None,
    })
}

pub fn build_group_law(f: &PresentationFile) -> Result<GroupLaw<Q>, String> {
    let law = f.group_law.as_ref().ok_or("group_law presentation needs a group_law table")?;
    let truncation = f.truncation.ok_or("group_law presentation needs a truncation")?;
    if law.components.len() != law.dim {
        return Err(format!(
            "group law lists {} components for dimension {}",
            law.components.len(),
            law.dim
        ));
    }
    let mut components = Vec::new();
    for terms in &law.components {
        let mut p = GradedPolynomial::zero(Some(truncation));
        for t in terms {
            let mut acc: BTreeMap<GeneratorId, u32> = BTreeMap::new();
            for (slot, comp, exp) in &t.factors {
                let s = match slot.as_str() {
                    "x" => 0u8,
                    "y" => 1u8,
                    other => return Err(format!("unknown group-law variable {other:?}")),
                };
                if *comp as usize >= law.dim {
                    return Err(format!("component {comp} out of range for dimension {}", law.dim));
                }
                if *exp == 0 {
                    continue;
                }
                *acc.entry(GeneratorId::var(s, *comp)).or_insert(0) += *exp;
            }
            let m = Monomial::from_factors(acc.into_iter().collect())
                .ok_or("odd variable squared in a group law")?;
            if m.weight() > truncation {
                return Err(format!(
                    "group-law term {m} exceeds the stated truncation {truncation}"
                ));
            }
            p.add_term(m, parse_q(&t.coeff)?);
        }
        components.push(p);
    }
    Ok(GroupLaw {
        dim: law.dim,
        components,
        truncation,
    })
}

pub fn group_law_file(law: &GroupLaw<Q>) -> Result<PresentationFile, String> {
    let mut components = Vec::new();
    for p in &law.components {
        let mut terms = Vec::new();
        for (m, c) in p.terms() {
            let mut factors = Vec::new();
            for (g, e) in m.factors() {
                match &g.name {
                    GenName::Var { slot, comp } => {
                        let name = match slot {
                            0 => "x",
                            1 => "y",
                            _ => return Err(format!("unexpected variable slot {slot}")),
                        };
                        factors.push((name.to_string(), *comp, *e));
                    }
                    other => return Err(format!("non-variable generator {other:?} in a law")),
                }
            }
            terms.push(LawTermFile {
                factors,
                coeff: fmt_q(c),
            });
        }
        components.push(terms);
    }
    Ok(PresentationFile {
        kind: "group_law".into(),
        tangent_ranks: None,
        boundary: None,
        truncation: Some(law.truncation),
        d0: None,
        superized: false,
        group_law: Some(GroupLawFile {
            dim: law.dim,
            components,
        }),
        levels: None,
        coface: None,
        codegeneracy: None,
        graded_commutative: None,
    })
}

pub fn build_cosimplicial(f: &PresentationFile) -> Result<FiniteCosimplicialAlgebra<Q>, String> {
    let levels_in = f.levels.as_ref().ok_or("cosimplicial presentation needs levels")?;
    if levels_in.is_empty() {
        return Err("cosimplicial presentation lists no levels".into());
    }
    let mut levels = Vec::new();
    for (n, lv) in levels_in.iter().enumerate() {
        if lv.parity.len() != lv.dim || lv.unit.len() != lv.dim || lv.product.len() != lv.dim {
            return Err(format!("level {n}: parity/unit/product sizes disagree with dim"));
        }
        let parity = lv
            .parity
            .iter()
            .map(|&b| match b {
                0 => Ok(Parity::Even),
                1 => Ok(Parity::Odd),
                other => Err(format!("level {n}: parity entries are 0 or 1, found {other}")),
            })
            .collect::<Result<Vec<_>, _>>()?;
        let unit = lv.unit.iter().map(|s| parse_q(s)).collect::<Result<Vec<_>, _>>()?;
        let mut product = Vec::new();
        for (i, row) in lv.product.iter().enumerate() {
            if row.len() != lv.dim {
                return Err(format!("level {n}: product row {i} has wrong length"));
            }
            let mut out_row = Vec::new();
            for cell in row {
                let mut sparse = Vec::new();
                for (t, s) in cell {
                    if *t >= lv.dim {
                        return Err(format!("level {n}: product index {t} out of range"));
                    }
                    sparse.push((*t, parse_q(s)?));
                }
                out_row.push(sparse);
            }
            product.push(out_row);
        }
        levels.push(LevelAlgebra {
            dim: lv.dim,
            parity,
            unit,
            product,
        });
    }
    let cap = levels.len() - 1;
    let coface_in = f.coface.as_ref().ok_or("cosimplicial presentation needs coface matrices")?;
    let codeg_in = f
        .codegeneracy
        .as_ref()
        .ok_or("cosimplicial presentation needs codegeneracy matrices")?;
    if coface_in.len() != cap || codeg_in.len() != cap {
        return Err(format!(
            "expected {cap} coface and codegeneracy groups for {} levels",
            levels.len()
        ));
    }
    let mut coface = Vec::new();
    for (n, group) in coface_in.iter().enumerate() {
        if group.len() != n + 2 {
            return Err(format!("coface group at level {n} needs {} maps", n + 2));
        }
        let mut maps = Vec::new();
        for (i, rows) in group.iter().enumerate() {
            maps.push(matrix_from_rows(
                rows,
                levels[n + 1].dim,
                levels[n].dim,
                &format!("coface[{n}][{i}]"),
            )?);
        }
        coface.push(maps);
    }
    let mut codegeneracy = Vec::new();
    for (n, group) in codeg_in.iter().enumerate() {
        if group.len() != n + 1 {
            return Err(format!("codegeneracy group at level {n} needs {} maps", n + 1));
        }
        let mut maps = Vec::new();
        for (j, rows) in group.iter().enumerate() {
            maps.push(matrix_from_rows(
                rows,
                levels[n].dim,
                levels[n + 1].dim,
                &format!("codegeneracy[{n}][{j}]"),
            )?);
        }
        codegeneracy.push(maps);
    }
    Ok(FiniteCosimplicialAlgebra {
        levels,
        coface,
        codegeneracy,
        graded_commutative: f.graded_commutative.unwrap_or(true),
    })
}

pub fn cosimplicial_file(x: &FiniteCosimplicialAlgebra<Q>) -> PresentationFile {
    let levels = x
        .levels
        .iter()
        .map(|lv| LevelFile {
            dim: lv.dim,
            parity: lv.parity.iter().map(|p| if p.is_odd() { 1 } else { 0 }).collect(),
            unit: lv.unit.iter().map(fmt_q).collect(),
            product: lv
                .product
                .iter()
                .map(|row| {
                    row.iter()
                        .map(|cell| cell.iter().map(|(t, c)| (*t, fmt_q(c))).collect())
                        .collect()
                })
                .collect(),
        })
        .collect();
    let coface = x
        .coface
        .iter()
        .map(|group| group.iter().map(matrix_to_rows).collect())
        .collect();
    let codegeneracy = x
        .codegeneracy
        .iter()
        .map(|group| group.iter().map(matrix_to_rows).collect())
        .collect();
    PresentationFile {
        kind: "cosimplicial".into(),
        tangent_ranks: None,
        boundary: None,
        truncation: None,
        d0: None,
        superized: false,
        group_law: None,
        levels: Some(levels),
        coface: Some(coface),
        codegeneracy: Some(codegeneracy),
        graded_commutative: Some(x.graded_commutative),
    }
}

/// Reports.

#[derive(Serialize, Clone)]
pub struct Conventions {
    /// The coefficient the dual differential puts on each structure pair:
    /// d(dual of c) sums `sign * c^c_{ab}` times the degree-one product.
    pub structure_sign: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub truncation: Option<u32>,
}

#[derive(Serialize, Clone)]
pub struct CheckEntry {
    pub name: String,
    pub pass: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub witness: Option<String>,
}

#[derive(Serialize, Clone)]
pub struct SlotEntry {
    pub degree: usize,
    pub weight: u32,
    pub cochain_rank: usize,
    pub ce_rank: usize,
    pub induced_rank: usize,
    pub iso: bool,
}

#[derive(Serialize, Clone)]
pub struct AbstractSection {
    pub infinitesimal: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub witness: Option<String>,
    pub normalized_dims: Vec<usize>,
    pub ideal_dims: Vec<usize>,
    pub quotient_dims: Vec<usize>,
    pub quotient_differential: Vec<Vec<Vec<String>>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub counit: Option<String>,
}

#[derive(Serialize, Clone)]
pub struct ReportFile {
    pub version: String,
    pub command: String,
    pub conventions: Conventions,
    pub generators: Vec<String>,
    pub differential: BTreeMap<String, String>,
    pub bracket_tables: BTreeMap<String, BTreeMap<String, String>>,
    pub checks: Vec<CheckEntry>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub vanest: Option<Vec<SlotEntry>>,
    #[serde(rename = "abstract", skip_serializing_if = "Option::is_none")]
    pub abstract_section: Option<AbstractSection>,
}

impl ReportFile {
    pub fn new(command: &str, truncation: Option<u32>) -> Self {
        ReportFile {
            version: env!("CARGO_PKG_VERSION").to_string(),
            command: command.to_string(),
            conventions: Conventions {
                structure_sign: "-1".into(),
                truncation,
            },
            generators: Vec::new(),
            differential: BTreeMap::new(),
            bracket_tables: BTreeMap::new(),
            checks: Vec::new(),
            vanest: None,
            abstract_section: None,
        }
    }

    pub fn check(&mut self, name: &str, pass: bool, witness: Option<String>) {
        self.checks.push(CheckEntry {
            name: name.to_string(),
            pass,
            witness,
        });
    }

    pub fn all_pass(&self) -> bool {
        self.checks.iter().all(|c| c.pass)
    }

    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("report serialization");
        s.push('\n');
        s
    }
}

pub fn save_json(path: &Path, text: &str) -> Result<(), String> {
    std::fs::write(path, text).map_err(|e| format!("cannot write {}: {e}", path.display()))
}

pub fn presentation_to_json(f: &PresentationFile) -> String {
    let mut s = serde_json::to_string_pretty(f).expect("presentation serialization");
    s.push('\n');
    s
}
