//! Compact DL text format: one axiom per line, ASCII keywords with Unicode
//! aliases, `#` comments.
//!
//! ```text
//! axiom       := concept REL concept
//! REL         := "SubClassOf" | "⊑" | "EquivalentTo" | "≡"
//! concept     := conjunct { ("and" | "⊓") conjunct }
//! conjunct    := restriction | primary
//! restriction := IDENT "some" conjunct | "∃" IDENT "." conjunct
//! primary     := IDENT | "Top" | "⊤" | "(" concept ")"
//! ```
//!
//! `some` binds tighter than `and`. Identifiers are
//! `[A-Za-z_][A-Za-z0-9_.:-]*`; single quotes delimit labels with spaces.

use thiserror::Error;

use crate::io::ParseReport;
use crate::model::{is_fresh_name, Axiom, Concept, Ontology};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum DlParseError {
    #[error("syntax error at byte {position}: expected {expected}")]
    Syntax { position: usize, expected: String },
    #[error("non-EL constructor: {0}")]
    NonEl(String),
}

fn syntax(position: usize, expected: impl Into<String>) -> DlParseError {
    DlParseError::Syntax { position, expected: expected.into() }
}

#[derive(Debug, Clone, PartialEq, Eq)]
enum Tok {
    Ident(String),
    SubClassOf,
    EquivalentTo,
    And,
    Some,
    Top,
    Dot,
    LParen,
    RParen,
}

fn is_ident_start(c: char) -> bool {
    c.is_ascii_alphabetic() || c == '_'
}

fn is_ident_continue(c: char) -> bool {
    c.is_ascii_alphanumeric() || matches!(c, '_' | ':' | '-')
}

fn tokenize(line: &str) -> Result<Vec<(usize, Tok)>, DlParseError> {
    let mut tokens = Vec::new();
    let chars: Vec<(usize, char)> = line.char_indices().collect();
    let mut i = 0;
    while i < chars.len() {
        let (pos, c) = chars[i];
        match c {
            '#' => break,
            c if c.is_whitespace() => {
                i += 1;
            }
            '(' => {
                tokens.push((pos, Tok::LParen));
                i += 1;
            }
            ')' => {
                tokens.push((pos, Tok::RParen));
                i += 1;
            }
            '.' => {
                tokens.push((pos, Tok::Dot));
                i += 1;
            }
            '⊑' => {
                tokens.push((pos, Tok::SubClassOf));
                i += 1;
            }
            '≡' => {
                tokens.push((pos, Tok::EquivalentTo));
                i += 1;
            }
            '⊓' => {
                tokens.push((pos, Tok::And));
                i += 1;
            }
            '∃' => {
                tokens.push((pos, Tok::Some));
                i += 1;
            }
            '⊤' => {
                tokens.push((pos, Tok::Top));
                i += 1;
            }
            '⊔' => return Err(DlParseError::NonEl("or".into())),
            '¬' => return Err(DlParseError::NonEl("not".into())),
            '∀' => return Err(DlParseError::NonEl("only".into())),
            '\'' => {
                let mut name = String::new();
                i += 1;
                loop {
                    match chars.get(i) {
                        Some((_, '\'')) => {
                            i += 1;
                            break;
                        }
                        Some((_, ch)) => {
                            name.push(*ch);
                            i += 1;
                        }
                        None => return Err(syntax(pos, "closing quote")),
                    }
                }
                if name.is_empty() {
                    return Err(syntax(pos, "non-empty quoted identifier"));
                }
                tokens.push((pos, Tok::Ident(name)));
            }
            c if is_ident_start(c) => {
                let mut name = String::new();
                while i < chars.len() {
                    let (_, ch) = chars[i];
                    if is_ident_continue(ch) {
                        name.push(ch);
                        i += 1;
                    } else if ch == '.'
                        && chars.get(i + 1).is_some_and(|&(_, next)| is_ident_continue(next))
                    {
                        // A dot is part of the identifier only when followed by
                        // another identifier character; `∃r.(…)` keeps its dot
                        // as a separate token.
                        name.push(ch);
                        i += 1;
                    } else {
                        break;
                    }
                }
                let tok = match name.as_str() {
                    "SubClassOf" => Tok::SubClassOf,
                    "EquivalentTo" => Tok::EquivalentTo,
                    "and" => Tok::And,
                    "some" => Tok::Some,
                    "Top" => Tok::Top,
                    "or" | "not" | "only" => return Err(DlParseError::NonEl(name)),
                    _ => {
                        if is_fresh_name(&name) {
                            return Err(syntax(pos, "identifier without reserved '__' prefix"));
                        }
                        Tok::Ident(name)
                    }
                };
                tokens.push((pos, tok));
            }
            _ => return Err(syntax(pos, "identifier, operator or parenthesis")),
        }
    }
    Ok(tokens)
}

struct Parser {
    tokens: Vec<(usize, Tok)>,
    at: usize,
    end: usize,
}

impl Parser {
    fn peek(&self) -> Option<&Tok> {
        self.tokens.get(self.at).map(|(_, t)| t)
    }

    fn pos(&self) -> usize {
        self.tokens.get(self.at).map_or(self.end, |(p, _)| *p)
    }

    fn next(&mut self) -> Option<Tok> {
        let tok = self.tokens.get(self.at).map(|(_, t)| t.clone());
        if tok.is_some() {
            self.at += 1;
        }
        tok
    }

    fn concept(&mut self) -> Result<Concept, DlParseError> {
        let mut conjuncts = vec![self.conjunct()?];
        while matches!(self.peek(), Some(Tok::And)) {
            self.next();
            conjuncts.push(self.conjunct()?);
        }
        Ok(if conjuncts.len() == 1 {
            conjuncts.pop().unwrap()
        } else {
            Concept::And(conjuncts)
        })
    }

    fn conjunct(&mut self) -> Result<Concept, DlParseError> {
        match self.peek() {
            // `∃r.filler`
            Some(Tok::Some) => {
                self.next();
                let pos = self.pos();
                let ident = match self.next() {
                    Some(Tok::Ident(name)) => name,
                    _ => return Err(syntax(pos, "role name after ∃")),
                };
                if let Some(dot) = ident.find('.') {
                    // The lexer folds `r.A10` into one identifier; the first
                    // dot separates role from an atomic filler.
                    let (role, filler) = ident.split_at(dot);
                    return Ok(Concept::exists(role, Concept::atom(&filler[1..])));
                }
                let pos = self.pos();
                match self.next() {
                    Some(Tok::Dot) => {}
                    _ => return Err(syntax(pos, "'.' after role name")),
                }
                Ok(Concept::exists(ident, self.conjunct()?))
            }
            // `r some filler`
            Some(Tok::Ident(_)) if matches!(self.tokens.get(self.at + 1), Some((_, Tok::Some))) => {
                let role = match self.next() {
                    Some(Tok::Ident(name)) => name,
                    _ => unreachable!(),
                };
                self.next(); // some
                Ok(Concept::exists(role, self.conjunct()?))
            }
            _ => self.primary(),
        }
    }

    fn primary(&mut self) -> Result<Concept, DlParseError> {
        let pos = self.pos();
        match self.next() {
            Some(Tok::Ident(name)) => Ok(Concept::atom(name)),
            Some(Tok::Top) => Ok(Concept::Top),
            Some(Tok::LParen) => {
                let inner = self.concept()?;
                let pos = self.pos();
                match self.next() {
                    Some(Tok::RParen) => Ok(inner),
                    _ => Err(syntax(pos, "')'")),
                }
            }
            _ => Err(syntax(pos, "concept")),
        }
    }
}

/// Parses one axiom line, returning it in canonical form.
pub fn parse_dl_axiom(line: &str) -> Result<Axiom, DlParseError> {
    let tokens = tokenize(line)?;
    let mut parser = Parser { tokens, at: 0, end: line.len() };
    let left = parser.concept()?;
    let pos = parser.pos();
    let rel = parser
        .next()
        .ok_or_else(|| syntax(pos, "'SubClassOf' or 'EquivalentTo'"))?;
    let right = parser.concept()?;
    if parser.peek().is_some() {
        return Err(syntax(parser.pos(), "end of line"));
    }
    match rel {
        Tok::SubClassOf => Ok(Axiom::sub_class_of(left, right)),
        Tok::EquivalentTo => Ok(Axiom::equivalent(left, right)),
        _ => Err(syntax(pos, "'SubClassOf' or 'EquivalentTo'")),
    }
}

/// Parses a multi-line document, skipping (and reporting) lines that fail.
pub fn parse_dl_document(text: &str) -> (Ontology, ParseReport) {
    let mut ontology = Ontology::new();
    let mut report = ParseReport::default();
    for (lineno, line) in text.lines().enumerate() {
        let stripped = match line.find('#') {
            Some(at) => &line[..at],
            None => line,
        };
        if stripped.trim().is_empty() {
            continue;
        }
        match parse_dl_axiom(stripped) {
            Ok(axiom) => {
                ontology.push(axiom, None);
                report.accepted += 1;
            }
            Err(DlParseError::NonEl(name)) => {
                report.skip(format!("line {}", lineno + 1), format!("non-EL: {name}"));
            }
            Err(err) => {
                report.skip(format!("line {}", lineno + 1), err.to_string());
            }
        }
    }
    (ontology, report)
}

fn needs_quoting(name: &str) -> bool {
    let mut chars = name.chars();
    match chars.next() {
        Some(first) if is_ident_start(first) => {}
        _ => return true,
    }
    name.chars().skip(1).any(|c| !is_ident_continue(c) && c != '.')
        || matches!(name, "SubClassOf" | "EquivalentTo" | "and" | "some" | "Top" | "or" | "not" | "only")
}

fn render_atom(name: &str, out: &mut String) {
    if needs_quoting(name) {
        out.push('\'');
        out.push_str(name);
        out.push('\'');
    } else {
        out.push_str(name);
    }
}

fn render_conjunct(concept: &Concept, out: &mut String) {
    match concept {
        Concept::Top => out.push_str("Top"),
        Concept::Atom(name) => render_atom(name, out),
        Concept::Exists(role, filler) => {
            render_atom(role, out);
            out.push_str(" some ");
            match filler.as_ref() {
                Concept::And(_) => {
                    out.push('(');
                    render_concept(filler, out);
                    out.push(')');
                }
                other => render_conjunct(other, out),
            }
        }
        Concept::And(_) => {
            out.push('(');
            render_concept(concept, out);
            out.push(')');
        }
    }
}

fn render_concept(concept: &Concept, out: &mut String) {
    match concept {
        Concept::And(members) => {
            for (i, member) in members.iter().enumerate() {
                if i > 0 {
                    out.push_str(" and ");
                }
                render_conjunct(member, out);
            }
        }
        other => render_conjunct(other, out),
    }
}

/// Renders an axiom in the ASCII form of the grammar.
/// `parse_dl_axiom(render_dl(a)) == a` for canonical `a`.
pub fn render_dl(axiom: &Axiom) -> String {
    let mut out = String::new();
    let (l, r) = axiom.sides();
    render_concept(l, &mut out);
    out.push_str(match axiom {
        Axiom::SubClassOf(..) => " SubClassOf ",
        Axiom::EquivalentClasses(..) => " EquivalentTo ",
    });
    render_concept(r, &mut out);
    out
}
