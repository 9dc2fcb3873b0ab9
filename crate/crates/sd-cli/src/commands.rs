//! Subcommand bodies. Each returns a report plus an exit code on success and
//! a plain message for input or usage errors; the caller decides where the
//! JSON and the human-readable lines go.
//!
//! Exit convention: 0 all checks pass, 1 bad input or usage, 2 a
//! mathematical check failed (the report carries the witness).

use std::path::Path;

use sd_core::cosimplicial::{abstract_diff, counit_check, is_infinitesimal};
use sd_core::differentiate::{
    bracket_table, ce_algebra, check_d_squared, validate_presentation, FramedPresentation,
};
use sd_core::cohomology::vanest_compare;
use sd_core::oracle::nerve_from_group_law;
use sd_core::poly::GeneratorId;
use sd_core::Q;

use crate::criteria;
use crate::formats::{
    self, AbstractSection, PresentationFile, ReportFile, SlotEntry,
};

pub struct CommandResult {
    pub report: ReportFile,
    pub lines: Vec<String>,
    pub code: i32,
}

fn term_weight(factors: &[(Vec<usize>, u32, u32)]) -> u32 {
    factors
        .iter()
        .map(|(alpha, _, exp)| alpha.len() as u32 * exp)
        .sum()
}

/// Lower the stated truncation of a stored presentation, dropping terms the
/// new bound excludes. Raising is refused: the discarded terms are gone.
fn retruncate(f: &mut PresentationFile, t: u32) -> Result<(), String> {
    let stored = f
        .truncation
        .ok_or("the input does not state a truncation to adjust")?;
    if t > stored {
        return Err(format!(
            "cannot raise the truncation from {stored} to {t}: terms beyond {stored} were never stored"
        ));
    }
    if let Some(d0) = &mut f.d0 {
        for level in d0 {
            for entry in level {
                entry.value.retain(|term| term_weight(&term.monomial) <= t);
            }
        }
    }
    if let Some(law) = &mut f.group_law {
        for comp in &mut law.components {
            comp.retain(|term| {
                term.factors.iter().map(|(_, _, e)| *e).sum::<u32>() <= t
            });
        }
    }
    f.truncation = Some(t);
    Ok(())
}

/// A framed presentation from either stored kind; group laws get a nerve
/// with the requested number of levels.
fn presentation_for(
    f: &PresentationFile,
    law_levels: usize,
) -> Result<FramedPresentation<Q>, String> {
    match f.kind.as_str() {
        "framed" => formats::build_framed(f),
        "group_law" => {
            let law = formats::build_group_law(f)?;
            nerve_from_group_law(&law, law_levels)
        }
        "cosimplicial" => Err(
            "this command expects a framed presentation or a group law; \
             the input is a cosimplicial level ring (use `abstract`)"
                .into(),
        ),
        other => Err(format!("unknown presentation kind {other:?}")),
    }
}

fn load_for_tower(
    input: &Path,
    truncation: Option<u32>,
    degree: usize,
) -> Result<FramedPresentation<Q>, String> {
    let mut f = formats::load_presentation(input)?;
    if let Some(t) = truncation {
        retruncate(&mut f, t)?;
    }
    if f.kind != "cosimplicial" {
        let eff = f
            .truncation
            .ok_or("the presentation does not state a truncation")?;
        let needed = (degree + 1) as u32;
        if eff < needed {
            return Err(format!(
                "truncation insufficient: degree {degree} needs truncation at least {needed}, \
                 the input provides {eff}"
            ));
        }
    }
    let p = presentation_for(&f, degree + 1)?;
    if p.max_level() < degree + 1 {
        return Err(format!(
            "the presentation stores pullbacks through level {}, degree {degree} needs level {}",
            p.max_level(),
            degree + 1
        ));
    }
    validate_presentation(&p)?;
    Ok(p)
}

pub fn differentiate(
    input: &Path,
    degree: usize,
    truncation: Option<u32>,
) -> Result<CommandResult, String> {
    if degree == 0 {
        return Err("degree must be at least 1".into());
    }
    let p = load_for_tower(input, truncation, degree)?;
    let mut report = ReportFile::new("differentiate", Some(p.truncation()));
    let mut lines = Vec::new();

    let ce = match ce_algebra(&p, degree) {
        Ok(ce) => {
            report.check("dual-routes-agree", true, None);
            ce
        }
        Err(e) => {
            lines.push(format!("dual-route comparison failed: {e}"));
            report.check("dual-routes-agree", false, Some(e));
            return Ok(CommandResult {
                report,
                lines,
                code: 2,
            });
        }
    };

    // The square check needs stored differentials one degree past the last
    // populated rank it touches; clamp to what this run computed.
    let mut square_to = degree;
    while square_to > 0
        && ce.ranks.get(square_to + 1).is_some_and(|&r| r > 0)
        && ce.differential_of(square_to + 1, 0).is_none()
    {
        square_to -= 1;
    }
    if square_to > 0 {
        match check_d_squared(&ce, square_to) {
            Ok(()) => report.check(&format!("d-squared-through-{square_to}"), true, None),
            Err(e) => report.check(&format!("d-squared-through-{square_to}"), false, Some(e)),
        }
    }

    for (k, l) in ce.generators() {
        report
            .generators
            .push(GeneratorId::xi(k as u32, l).to_string());
    }
    for ((k, l), poly) in &ce.differential {
        report.differential.insert(
            GeneratorId::xi(*k as u32, *l).to_string(),
            poly.to_string(),
        );
    }
    for a in 1..=degree {
        for b in a..=degree {
            let out_deg = a + b - 1;
            let rank = |k: usize| ce.ranks.get(k).copied().unwrap_or(0);
            if out_deg > degree || rank(a) == 0 || rank(b) == 0 || rank(out_deg) == 0 {
                continue;
            }
            match bracket_table(&ce, &[a, b]) {
                Ok(t) => {
                    let mut entries = std::collections::BTreeMap::new();
                    for ((labels, out_l), c) in &t.constants {
                        entries.insert(
                            format!(
                                "[{a}:{}, {b}:{}] -> {out_deg}:{out_l}",
                                labels[0], labels[1]
                            ),
                            formats::fmt_q(c),
                        );
                    }
                    report
                        .bracket_tables
                        .insert(format!("degrees ({a},{b})"), entries);
                }
                Err(e) => report.check(&format!("bracket-table-({a},{b})"), false, Some(e)),
            }
        }
    }

    lines.push(format!(
        "{} generators, differentials stored through degree {degree}",
        report.generators.len()
    ));
    for c in &report.checks {
        lines.push(format!(
            "{} {}",
            if c.pass { "ok  " } else { "FAIL" },
            c.name
        ));
    }
    let code = if report.all_pass() { 0 } else { 2 };
    Ok(CommandResult {
        report,
        lines,
        code,
    })
}

fn vanest_input_limitation(msg: &str) -> bool {
    msg.contains("limited to linear faces")
        || msg.contains("need truncation")
        || msg.contains("needs level")
}

pub fn vanest(
    input: &Path,
    degree: usize,
    max_weight: u32,
    truncation: Option<u32>,
) -> Result<CommandResult, String> {
    let p = load_for_tower(input, truncation, degree)?;
    let mut report = ReportFile::new("vanest", Some(p.truncation()));
    let mut lines = Vec::new();
    let cmp = match vanest_compare(&p, degree, max_weight) {
        Ok(cmp) => cmp,
        Err(e) if vanest_input_limitation(&e) => return Err(e),
        Err(e) => {
            lines.push(format!("comparison failed: {e}"));
            report.check("comparison-computed", false, Some(e));
            return Ok(CommandResult {
                report,
                lines,
                code: 2,
            });
        }
    };
    report.check("comparison-computed", true, None);
    let slots: Vec<SlotEntry> = cmp
        .slots
        .iter()
        .map(|s| SlotEntry {
            degree: s.degree,
            weight: s.weight,
            cochain_rank: s.cochain_rank,
            ce_rank: s.ce_rank,
            induced_rank: s.induced_rank,
            iso: s.iso,
        })
        .collect();
    lines.push(format!(
        "{:>6} {:>6} {:>8} {:>6} {:>8} {:>4}",
        "degree", "weight", "cochain", "dual", "induced", "iso"
    ));
    for s in &slots {
        lines.push(format!(
            "{:>6} {:>6} {:>8} {:>6} {:>8} {:>4}",
            s.degree,
            s.weight,
            s.cochain_rank,
            s.ce_rank,
            s.induced_rank,
            if s.iso { "yes" } else { "NO" }
        ));
    }
    let bad = slots.iter().find(|s| !s.iso);
    report.check(
        "weight-slices-isomorphic",
        bad.is_none(),
        bad.map(|s| {
            format!(
                "slot (degree {}, weight {}) has cochain rank {}, dual rank {}, induced rank {}",
                s.degree, s.weight, s.cochain_rank, s.ce_rank, s.induced_rank
            )
        }),
    );
    report.vanest = Some(slots);
    let code = if report.all_pass() { 0 } else { 2 };
    Ok(CommandResult {
        report,
        lines,
        code,
    })
}

pub fn abstract_cmd(input: &Path) -> Result<CommandResult, String> {
    let f = formats::load_presentation(input)?;
    if f.kind != "cosimplicial" {
        return Err(format!(
            "abstract differentiation expects a cosimplicial level-ring input, got kind {:?}",
            f.kind
        ));
    }
    let x = formats::build_cosimplicial(&f)?;
    x.validate()?;
    let mut report = ReportFile::new("abstract", None);
    let mut lines = Vec::new();

    let inf = match is_infinitesimal(&x) {
        Ok(r) => r,
        Err(e) => {
            lines.push(format!("square-ideal analysis failed: {e}"));
            report.check("square-ideal-analysis", false, Some(e));
            return Ok(CommandResult {
                report,
                lines,
                code: 2,
            });
        }
    };
    report.check("square-ideal-analysis", true, None);
    let witness = inf.witness.as_ref().map(|w| {
        format!(
            "level {}, codegeneracy {}: left {}, right {}, product {}, normalized part {}",
            w.level,
            w.codegeneracy,
            formats::vec_q(&w.left),
            formats::vec_q(&w.right),
            formats::vec_q(&w.product),
            formats::vec_q(&w.normalized_part)
        )
    });
    lines.push(if inf.infinitesimal {
        format!("infinitesimal through level {}", inf.levels_checked)
    } else {
        format!(
            "not infinitesimal: {}",
            witness.as_deref().unwrap_or("(no witness recorded)")
        )
    });

    let a = match abstract_diff(&x, x.cap()) {
        Ok(a) => a,
        Err(e) => {
            lines.push(format!("differential-ideal quotient failed: {e}"));
            report.check("differential-ideal-quotient", false, Some(e));
            return Ok(CommandResult {
                report,
                lines,
                code: 2,
            });
        }
    };
    report.check("differential-ideal-quotient", true, None);

    let quotient_dims: Vec<usize> = (0..=a.degree()).map(|n| a.dga.dim(n)).collect();
    let mut quotient_differential = Vec::new();
    for n in 0..a.degree() {
        quotient_differential.push(formats::matrix_to_rows(&a.dga.differential(n)));
    }
    for (n, &d) in quotient_dims.iter().enumerate() {
        for t in 0..d {
            report.generators.push(format!("class{n}:{t}"));
        }
    }
    lines.push(format!(
        "normalized dims {:?}, ideal dims {:?}, quotient dims {:?}",
        a.normalized_dims, a.ideal_dims, quotient_dims
    ));

    let counit = match counit_check(&a.dga) {
        Ok(rep) => {
            report.check("counit-isomorphism", rep.ok(), if rep.ok() {
                None
            } else {
                Some(format!(
                    "infinitesimal {}, dims match {}, algebra isomorphism {}",
                    rep.infinitesimal, rep.dims_match, rep.algebra_iso
                ))
            });
            Some(if rep.ok() {
                "isomorphism".to_string()
            } else {
                "fails".to_string()
            })
        }
        Err(e) => Some(format!("not applicable: {e}")),
    };

    report.abstract_section = Some(AbstractSection {
        infinitesimal: inf.infinitesimal,
        witness,
        normalized_dims: a.normalized_dims.clone(),
        ideal_dims: a.ideal_dims.clone(),
        quotient_dims,
        quotient_differential,
        counit,
    });
    for c in &report.checks {
        lines.push(format!(
            "{} {}",
            if c.pass { "ok  " } else { "FAIL" },
            c.name
        ));
    }
    let code = if report.all_pass() { 0 } else { 2 };
    Ok(CommandResult {
        report,
        lines,
        code,
    })
}

pub fn validate(input: &Path) -> Result<CommandResult, String> {
    let f = formats::load_presentation(input)?;
    let mut report = ReportFile::new("validate", f.truncation);
    match f.kind.as_str() {
        "framed" => {
            let p = formats::build_framed(&f)?;
            match validate_presentation(&p) {
                Ok(()) => report.check("presentation-identities", true, None),
                Err(e) => report.check("presentation-identities", false, Some(e)),
            }
        }
        "group_law" => {
            let law = formats::build_group_law(&f)?;
            match law.validate() {
                Ok(()) => {
                    report.check("group-law-identities", true, None);
                    match nerve_from_group_law(&law, 2).and_then(|p| validate_presentation(&p)) {
                        Ok(()) => report.check("nerve-identities", true, None),
                        Err(e) => report.check("nerve-identities", false, Some(e)),
                    }
                }
                Err(e) => report.check("group-law-identities", false, Some(e)),
            }
        }
        "cosimplicial" => {
            let x = formats::build_cosimplicial(&f)?;
            match x.validate() {
                Ok(()) => report.check("level-ring-identities", true, None),
                Err(e) => report.check("level-ring-identities", false, Some(e)),
            }
        }
        other => return Err(format!("unknown presentation kind {other:?}")),
    }
    let lines: Vec<String> = report
        .checks
        .iter()
        .map(|c| {
            let mut l = format!("{} {}", if c.pass { "ok  " } else { "FAIL" }, c.name);
            if let Some(w) = &c.witness {
                l.push_str(": ");
                l.push_str(w);
            }
            l
        })
        .collect();
    let code = if report.all_pass() { 0 } else { 2 };
    Ok(CommandResult {
        report,
        lines,
        code,
    })
}

pub fn selftest(fixtures: &Path, filter: Option<&str>) -> Result<CommandResult, String> {
    let outcomes = criteria::run_all(fixtures, filter);
    if outcomes.is_empty() {
        return Err(match filter {
            Some(f) => format!("no criterion matches the filter {f:?}"),
            None => "no criteria registered".into(),
        });
    }
    let mut report = ReportFile::new("selftest", None);
    let mut lines = Vec::new();
    let mut fixture_trouble = false;
    for o in &outcomes {
        fixture_trouble |= o.fixture_error;
        lines.push(format!(
            "{} {:<22} {} ({} ms)",
            if o.pass { "pass" } else { "FAIL" },
            o.name,
            o.detail,
            o.millis
        ));
        report.check(
            o.name,
            o.pass,
            if o.pass {
                None
            } else {
                Some(o.detail.clone())
            },
        );
    }
    let code = if fixture_trouble {
        1
    } else if report.all_pass() {
        0
    } else {
        2
    };
    Ok(CommandResult {
        report,
        lines,
        code,
    })
}
