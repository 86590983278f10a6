//! Parser for structured proof responses.
//!
//! The standard task expects three sections — `AXIOMS_USED`, `SIMPLIFY`,
//! `DERIVE` — and the incomplete task expects `MISSING`, `AXIOMS_USEFUL`,
//! `SUSPECTED_MISSING_PARTS`. Model outputs vary in decoration, so matching
//! is deliberately lenient:
//!
//! * section headers match case-insensitively with optional `**`, `##` or `:`;
//! * `AXIOMS_USED` accepts bracketed or bare comma-separated integers;
//! * arrows `→`/`->` and turnstiles `⊢`/`|-` are interchangeable, and
//!   `STEP 1`/`STEP1` both work;
//! * one SIMPLIFY line may carry several comma-separated simplified forms,
//!   which expand into one entry each;
//! * text before the first and after the last section is ignored.
//!
//! A failed parse is the format-correctness signal, not an exception.

use std::collections::BTreeSet;

use thiserror::Error;

use crate::io::dl::parse_dl_axiom;
use crate::io::render_dl;
use crate::model::Axiom;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("format error: {reason}")]
pub struct FormatError {
    pub reason: String,
}

fn format_err(reason: impl Into<String>) -> FormatError {
    FormatError { reason: reason.into() }
}

/// A premise reference inside a DERIVE step.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Ref {
    Axiom(u32),
    Step(u32),
    /// An axiom written out literally; resolved against earlier steps or the
    /// sample axioms at scoring time.
    Literal(Axiom),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SimplifyEntry {
    pub axiom_id: u32,
    pub original_text: String,
    /// `None` when the text does not parse as DL (kept, scored incorrect).
    pub original: Option<Axiom>,
    pub simplified_text: String,
    pub simplified: Option<Axiom>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DeriveStep {
    pub label: u32,
    pub premises: Vec<Ref>,
    pub conclusion: Axiom,
    pub explanation: String,
}

/// A fully parsed standard-task response.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ProofScript {
    pub axioms_used: BTreeSet<u32>,
    pub simplifications: Vec<SimplifyEntry>,
    pub steps: Vec<DeriveStep>,
}

/// Structure-only parse for natural-language samples, where SIMPLIFY and
/// DERIVE bodies cannot be read as DL.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SurfaceScript {
    pub axioms_used: BTreeSet<u32>,
}

/// Parsed response for the logic-completeness task.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct IncompleteResponse {
    pub missing: bool,
    pub useful: BTreeSet<u32>,
    pub suspected: String,
}

/// Case-insensitive ASCII keyword prefix test, safe on multi-byte text.
fn has_prefix(text: &str, keyword: &str) -> bool {
    text.len() >= keyword.len()
        && text.is_char_boundary(keyword.len())
        && text[..keyword.len()].eq_ignore_ascii_case(keyword)
}

/// Strips leading `#`/`*` decorations and checks for `keyword` at the start
/// of the line; returns the same-line remainder on a match.
fn match_header(line: &str, keyword: &str) -> Option<String> {
    let t = line.trim().trim_start_matches(['#', '*']).trim_start();
    if !has_prefix(t, keyword) {
        return None;
    }
    let rest = &t[keyword.len()..];
    if rest.chars().next().is_some_and(|c| c.is_ascii_alphanumeric() || c == '_') {
        return None; // longer identifier, e.g. AXIOMS_USEFUL vs AXIOMS_USED
    }
    let rest = rest.trim_start_matches('*').trim_start();
    let rest = rest.strip_prefix(':').unwrap_or(rest);
    Some(rest.trim().to_string())
}

/// Splits `text` into the requested sections. Each section spans from its
/// header to the next recognized header.
fn sections<'k>(
    text: &str,
    keywords: &[&'k str],
) -> Vec<(&'k str, String, Vec<String>)> {
    let mut found: Vec<(&str, String, Vec<String>)> = Vec::new();
    for line in text.lines() {
        if let Some((keyword, inline)) = keywords
            .iter()
            .find_map(|&k| match_header(line, k).map(|inline| (k, inline)))
        {
            if !found.iter().any(|(k, ..)| *k == keyword) {
                found.push((keyword, inline, Vec::new()));
                continue;
            }
        }
        if let Some(last) = found.last_mut() {
            last.2.push(line.to_string());
        }
    }
    found
}

fn parse_int_list(text: &str) -> Result<BTreeSet<u32>, FormatError> {
    let mut out = BTreeSet::new();
    for token in text.split([',', ' ', '\t']) {
        let token = token.trim_matches(['[', ']', '(', ')', '{', '}', '.', ';']);
        if token.is_empty() {
            continue;
        }
        let value: u32 = token
            .parse()
            .map_err(|_| format_err(format!("'{token}' is not an axiom identifier")))?;
        out.insert(value);
    }
    Ok(out)
}

/// Finds the first arrow or turnstile in `text`, returning the split halves.
fn split_on_separator(text: &str) -> Option<(&str, &str)> {
    let mut best: Option<(usize, usize)> = None; // (byte pos, len)
    for sep in ["→", "⊢", "->", "|-"] {
        if let Some(at) = text.find(sep) {
            if best.is_none_or(|(b, _)| at < b) {
                best = Some((at, sep.len()));
            }
        }
    }
    best.map(|(at, len)| (&text[..at], &text[at + len..]))
}

fn match_step_header(line: &str) -> Option<(u32, &str)> {
    let t = line.trim().trim_start_matches(['#', '*']).trim_start();
    if !has_prefix(t, "STEP") {
        return None;
    }
    let rest = t[4..].trim_start();
    let digits: String = rest.chars().take_while(|c| c.is_ascii_digit()).collect();
    if digits.is_empty() {
        return None;
    }
    let after = rest[digits.len()..].trim_start_matches([':', '.']).trim_start();
    Some((digits.parse().ok()?, after))
}

fn clean_axiom_text(text: &str) -> &str {
    let t = text.trim();
    t.strip_suffix('.').map_or(t, str::trim_end)
}

fn parse_premise(token: &str, before_label: u32) -> Result<Ref, FormatError> {
    let t = token.trim();
    if t.is_empty() {
        return Err(format_err("empty premise"));
    }
    if t.chars().all(|c| c.is_ascii_digit()) {
        return Ok(Ref::Axiom(t.parse().map_err(|_| format_err("premise overflow"))?));
    }
    if t.len() > 4 && has_prefix(t, "STEP") {
        let digits = t[4..].trim_start();
        if let Ok(label) = digits.parse::<u32>() {
            if label >= before_label {
                return Err(format_err(format!(
                    "STEP{label} referenced before it exists (in STEP{before_label})"
                )));
            }
            return Ok(Ref::Step(label));
        }
    }
    match parse_dl_axiom(clean_axiom_text(t)) {
        Ok(axiom) => Ok(Ref::Literal(axiom)),
        Err(_) => Err(format_err(format!("unreadable premise '{t}'"))),
    }
}

fn parse_simplify_lines(
    inline: &str,
    body: &[String],
    strict: bool,
) -> Result<Vec<SimplifyEntry>, FormatError> {
    let mut entries = Vec::new();
    let lines = std::iter::once(inline.to_string()).chain(body.iter().cloned());
    for line in lines {
        let t = line.trim();
        let Some(rest) = t.strip_prefix('[') else { continue };
        let Some(close) = rest.find(']') else { continue };
        let Ok(axiom_id) = rest[..close].trim().parse::<u32>() else { continue };
        let payload = rest[close + 1..].trim_start_matches(':').trim();
        let Some((orig_text, simp_text)) = split_on_separator(payload) else {
            if strict {
                return Err(format_err(format!("SIMPLIFY line for [{axiom_id}] lacks an arrow")));
            }
            continue;
        };
        let original_text = orig_text.trim().to_string();
        let original = parse_dl_axiom(clean_axiom_text(&original_text)).ok();
        for form in simp_text.split(',') {
            let simplified_text = form.trim().to_string();
            if simplified_text.is_empty() {
                continue;
            }
            let simplified = parse_dl_axiom(clean_axiom_text(&simplified_text)).ok();
            if strict && (original.is_none() || simplified.is_none()) {
                return Err(format_err(format!(
                    "SIMPLIFY entry for [{axiom_id}] does not parse as DL"
                )));
            }
            entries.push(SimplifyEntry {
                axiom_id,
                original_text: original_text.clone(),
                original: original.clone(),
                simplified_text,
                simplified,
            });
        }
    }
    Ok(entries)
}

fn parse_derive_lines(inline: &str, body: &[String]) -> Result<Vec<DeriveStep>, FormatError> {
    let mut steps: Vec<DeriveStep> = Vec::new();
    let lines = std::iter::once(inline.to_string()).chain(body.iter().cloned());
    for line in lines {
        if let Some((label, rest)) = match_step_header(&line) {
            if let Some(last) = steps.last() {
                if label <= last.label {
                    return Err(format_err(format!(
                        "step labels must increase (STEP{label} after STEP{})",
                        last.label
                    )));
                }
            }
            let open = rest
                .find('[')
                .ok_or_else(|| format_err(format!("STEP{label} lacks a premise list")))?;
            let close = rest[open..]
                .find(']')
                .map(|i| open + i)
                .ok_or_else(|| format_err(format!("STEP{label} premise list is unterminated")))?;
            let premises = rest[open + 1..close]
                .split(',')
                .map(|tok| parse_premise(tok, label))
                .collect::<Result<Vec<Ref>, _>>()?;
            if premises.is_empty() {
                return Err(format_err(format!("STEP{label} has no premises")));
            }
            let after = rest[close + 1..].trim_start();
            let conclusion_text = match split_on_separator(after) {
                Some((_, conclusion)) => conclusion,
                None => after,
            };
            let conclusion = parse_dl_axiom(clean_axiom_text(conclusion_text)).map_err(|e| {
                format_err(format!("STEP{label} conclusion is not a DL axiom: {e}"))
            })?;
            steps.push(DeriveStep { label, premises, conclusion, explanation: String::new() });
            continue;
        }
        if let Some(rest) = match_header(&line, "EXPLANATION") {
            if let Some(step) = steps.last_mut() {
                if !step.explanation.is_empty() {
                    step.explanation.push(' ');
                }
                step.explanation.push_str(&rest);
            }
            continue;
        }
        // Wrapped explanation text continues the current step.
        let t = line.trim();
        if !t.is_empty() {
            if let Some(step) = steps.last_mut() {
                if !step.explanation.is_empty() {
                    step.explanation.push(' ');
                }
                step.explanation.push_str(t);
            }
        }
    }
    Ok(steps)
}

fn parse_proof_inner(text: &str, strict: bool) -> Result<ProofScript, FormatError> {
    let found = sections(text, &["AXIOMS_USED", "SIMPLIFY", "DERIVE"]);
    let get = |keyword: &str| -> Result<&(&str, String, Vec<String>), FormatError> {
        found
            .iter()
            .find(|(k, ..)| *k == keyword)
            .ok_or_else(|| format_err(format!("missing {keyword}")))
    };
    let (_, used_inline, used_body) = get("AXIOMS_USED")?;
    let (_, simp_inline, simp_body) = get("SIMPLIFY")?;
    let (_, derive_inline, derive_body) = get("DERIVE")?;

    let mut used_text = used_inline.clone();
    for line in used_body {
        used_text.push(' ');
        used_text.push_str(line);
    }
    let axioms_used = parse_int_list(&used_text)
        .map_err(|e| format_err(format!("AXIOMS_USED: {}", e.reason)))?;

    let simplifications = parse_simplify_lines(simp_inline, simp_body, strict)?;
    let steps = parse_derive_lines(derive_inline, derive_body)?;
    Ok(ProofScript { axioms_used, simplifications, steps })
}

/// Parses a standard-task response with the default lenience rules.
pub fn parse_proof(text: &str) -> Result<ProofScript, FormatError> {
    parse_proof_inner(text, false)
}

/// Like [`parse_proof`] but unparseable SIMPLIFY lines fail the format check.
pub fn parse_proof_strict(text: &str) -> Result<ProofScript, FormatError> {
    parse_proof_inner(text, true)
}

/// Structure-only parse for natural-language responses: the three sections
/// must exist and `AXIOMS_USED` must be an integer list.
pub fn parse_proof_surface(text: &str) -> Result<SurfaceScript, FormatError> {
    let found = sections(text, &["AXIOMS_USED", "SIMPLIFY", "DERIVE"]);
    for keyword in ["AXIOMS_USED", "SIMPLIFY", "DERIVE"] {
        if !found.iter().any(|(k, ..)| *k == keyword) {
            return Err(format_err(format!("missing {keyword}")));
        }
    }
    let (_, inline, body) = &found[0];
    let mut used_text = inline.clone();
    for line in body {
        used_text.push(' ');
        used_text.push_str(line);
    }
    Ok(SurfaceScript { axioms_used: parse_int_list(&used_text)? })
}

/// Parses a logic-completeness response.
pub fn parse_incomplete(text: &str) -> Result<IncompleteResponse, FormatError> {
    let found = sections(text, &["MISSING", "AXIOMS_USEFUL", "SUSPECTED_MISSING_PARTS"]);
    let get = |keyword: &str| -> Result<&(&str, String, Vec<String>), FormatError> {
        found
            .iter()
            .find(|(k, ..)| *k == keyword)
            .ok_or_else(|| format_err(format!("missing {keyword}")))
    };

    let (_, missing_text, _) = get("MISSING")?;
    let flag = missing_text.trim().trim_matches(['[', ']', '.', '*']).trim();
    let missing = if flag.eq_ignore_ascii_case("yes") {
        true
    } else if flag.eq_ignore_ascii_case("no") {
        false
    } else {
        return Err(format_err(format!("MISSING must be YES or NO, found '{flag}'")));
    };

    let (_, useful_inline, useful_body) = get("AXIOMS_USEFUL")?;
    let mut useful_text = useful_inline.clone();
    for line in useful_body {
        useful_text.push(' ');
        useful_text.push_str(line);
    }
    let useful = if useful_text.trim().eq_ignore_ascii_case("none") {
        BTreeSet::new()
    } else {
        parse_int_list(&useful_text)
            .map_err(|e| format_err(format!("AXIOMS_USEFUL: {}", e.reason)))?
    };

    let (_, suspected_inline, suspected_body) = get("SUSPECTED_MISSING_PARTS")?;
    let mut suspected = suspected_inline.clone();
    for line in suspected_body {
        let t = line.trim();
        if t.is_empty() {
            continue;
        }
        if !suspected.is_empty() {
            suspected.push(' ');
        }
        suspected.push_str(t);
    }
    Ok(IncompleteResponse { missing, useful, suspected })
}

/// Renders a parsed script back to the canonical ASCII DSL form.
pub fn render_proof(script: &ProofScript) -> String {
    let mut out = String::from("AXIOMS_USED: ");
    let used: Vec<String> = script.axioms_used.iter().map(u32::to_string).collect();
    out.push_str(&used.join(","));
    out.push_str("\n\nSIMPLIFY:\n");
    for entry in &script.simplifications {
        let original = entry
            .original
            .as_ref()
            .map(render_dl)
            .unwrap_or_else(|| entry.original_text.clone());
        let simplified = entry
            .simplified
            .as_ref()
            .map(render_dl)
            .unwrap_or_else(|| entry.simplified_text.clone());
        out.push_str(&format!("[{}] {} -> {}\n", entry.axiom_id, original, simplified));
    }
    out.push_str("\nDERIVE:\n");
    for step in &script.steps {
        let premises: Vec<String> = step
            .premises
            .iter()
            .map(|r| match r {
                Ref::Axiom(i) => i.to_string(),
                Ref::Step(label) => format!("STEP{label}"),
                Ref::Literal(axiom) => render_dl(axiom),
            })
            .collect();
        out.push_str(&format!(
            "STEP{}: [{}] |- {}\n",
            step.label,
            premises.join(","),
            render_dl(&step.conclusion)
        ));
        if !step.explanation.is_empty() {
            out.push_str(&format!("EXPLANATION: {}\n", step.explanation));
        }
    }
    out
}
