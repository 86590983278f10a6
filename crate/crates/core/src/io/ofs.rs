//! Reader for the OWL 2 functional-style syntax subset used by EL ontologies.
//!
//! Accepted: `SubClassOf`, `EquivalentClasses` (n-ary split against the first
//! member), `ObjectIntersectionOf`, `ObjectSomeValuesFrom`, `owl:Thing`.
//! Everything else is skipped and reported in the [`ParseReport`], never fatal.

use std::collections::HashMap;

use thiserror::Error;

use crate::io::ParseReport;
use crate::model::{Axiom, Concept, Ontology};

#[derive(Debug, Error)]
pub enum OfsError {
    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),
    #[error("malformed document: {0}")]
    MalformedDocument(String),
}

#[derive(Debug, Clone)]
enum Sexp {
    Atom(String),
    List(String, Vec<Sexp>),
}

fn tokenize(text: &str) -> Vec<String> {
    let mut tokens = Vec::new();
    let mut chars = text.chars().peekable();
    while let Some(c) = chars.next() {
        match c {
            '(' | ')' => tokens.push(c.to_string()),
            '<' => {
                let mut iri = String::from("<");
                for ch in chars.by_ref() {
                    iri.push(ch);
                    if ch == '>' {
                        break;
                    }
                }
                tokens.push(iri);
            }
            '"' => {
                let mut lit = String::from("\"");
                let mut escaped = false;
                for ch in chars.by_ref() {
                    lit.push(ch);
                    if escaped {
                        escaped = false;
                    } else if ch == '\\' {
                        escaped = true;
                    } else if ch == '"' {
                        break;
                    }
                }
                tokens.push(lit);
            }
            c if c.is_whitespace() => {}
            _ => {
                let mut atom = String::new();
                atom.push(c);
                while let Some(&next) = chars.peek() {
                    if next.is_whitespace() || next == '(' || next == ')' {
                        break;
                    }
                    atom.push(next);
                    chars.next();
                }
                tokens.push(atom);
            }
        }
    }
    tokens
}

fn parse_sexps(tokens: &[String]) -> Result<Vec<Sexp>, OfsError> {
    let mut at = 0;
    let mut out = Vec::new();
    while at < tokens.len() {
        let (sexp, next) = parse_sexp(tokens, at)?;
        out.push(sexp);
        at = next;
    }
    Ok(out)
}

fn parse_sexp(tokens: &[String], at: usize) -> Result<(Sexp, usize), OfsError> {
    let token = &tokens[at];
    if token == ")" {
        return Err(OfsError::MalformedDocument("unexpected ')'".into()));
    }
    if at + 1 < tokens.len() && tokens[at + 1] == "(" {
        let head = token.clone();
        let mut args = Vec::new();
        let mut cursor = at + 2;
        loop {
            match tokens.get(cursor) {
                None => {
                    return Err(OfsError::MalformedDocument(format!(
                        "unbalanced parentheses in {head}(...)"
                    )))
                }
                Some(tok) if tok == ")" => return Ok((Sexp::List(head, args), cursor + 1)),
                Some(_) => {
                    let (arg, next) = parse_sexp(tokens, cursor)?;
                    args.push(arg);
                    cursor = next;
                }
            }
        }
    }
    Ok((Sexp::Atom(token.clone()), at + 1))
}

#[derive(Default)]
struct Prefixes {
    map: HashMap<String, String>,
}

impl Prefixes {
    fn declare(&mut self, args: &[Sexp]) {
        let text: String = args
            .iter()
            .map(|a| match a {
                Sexp::Atom(s) => s.clone(),
                Sexp::List(..) => String::new(),
            })
            .collect();
        if let Some(eq) = text.find(":=") {
            let prefix = text[..eq].trim_end_matches(':').to_string();
            let iri = text[eq + 2..].trim_start_matches('<').trim_end_matches('>').to_string();
            self.map.insert(prefix, iri);
        }
    }

    /// Shortens an entity reference to an identifier: the default prefix is
    /// stripped, other CURIEs are kept verbatim, full IRIs reduce to their
    /// fragment or last path segment.
    fn resolve(&self, token: &str) -> String {
        if let Some(iri) = token.strip_prefix('<').and_then(|t| t.strip_suffix('>')) {
            let frag = iri.rsplit(['#', '/']).next().unwrap_or(iri);
            return frag.to_string();
        }
        if let Some(local) = token.strip_prefix(':') {
            return local.to_string();
        }
        token.to_string()
    }
}

fn is_annotation(sexp: &Sexp) -> bool {
    matches!(sexp, Sexp::List(head, _) if head == "Annotation")
}

fn parse_concept(sexp: &Sexp, prefixes: &Prefixes) -> Result<Concept, String> {
    match sexp {
        Sexp::Atom(name) => {
            if name == "owl:Thing" || name.ends_with("#Thing") {
                return Ok(Concept::Top);
            }
            if name == "owl:Nothing" || name.ends_with("#Nothing") {
                return Err("non-EL: owl:Nothing".into());
            }
            if name.starts_with('"') {
                return Err("non-EL: literal in class position".into());
            }
            Ok(Concept::atom(prefixes.resolve(name)))
        }
        Sexp::List(head, args) => match head.as_str() {
            "ObjectIntersectionOf" => {
                let members = args
                    .iter()
                    .map(|a| parse_concept(a, prefixes))
                    .collect::<Result<Vec<_>, _>>()?;
                Ok(Concept::and(members))
            }
            "ObjectSomeValuesFrom" => {
                if args.len() != 2 {
                    return Err("malformed ObjectSomeValuesFrom".into());
                }
                let role = match &args[0] {
                    Sexp::Atom(name) => prefixes.resolve(name),
                    Sexp::List(inner, _) => return Err(format!("non-EL: {inner}")),
                };
                Ok(Concept::exists(role, parse_concept(&args[1], prefixes)?))
            }
            other => Err(format!("non-EL: {other}")),
        },
    }
}

/// Parses an OWL functional-syntax document into an EL ontology.
pub fn parse_ofs(text: &str) -> Result<(Ontology, ParseReport), OfsError> {
    let tokens = tokenize(text);
    let forms = parse_sexps(&tokens)?;

    let mut prefixes = Prefixes::default();
    let mut declarations = Vec::new();
    for form in &forms {
        match form {
            Sexp::List(head, args) if head == "Prefix" => prefixes.declare(args),
            Sexp::List(head, args) if head == "Ontology" => {
                for arg in args {
                    if let Sexp::List(..) = arg {
                        declarations.push(arg.clone());
                    }
                }
            }
            Sexp::List(..) => declarations.push(form.clone()),
            Sexp::Atom(_) => {}
        }
    }

    let mut ontology = Ontology::new();
    let mut report = ParseReport::default();
    for (n, decl) in declarations.iter().enumerate() {
        let locator = format!("declaration {}", n + 1);
        let Sexp::List(head, args) = decl else { continue };
        if head == "Prefix" {
            prefixes.declare(args);
            continue;
        }
        let args: Vec<&Sexp> = args.iter().filter(|a| !is_annotation(a)).collect();
        match head.as_str() {
            "SubClassOf" => {
                if args.len() != 2 {
                    report.skip(locator, "malformed SubClassOf");
                    continue;
                }
                match (parse_concept(args[0], &prefixes), parse_concept(args[1], &prefixes)) {
                    (Ok(sub), Ok(sup)) => {
                        ontology.push(Axiom::sub_class_of(sub, sup), None);
                        report.accepted += 1;
                    }
                    (Err(reason), _) | (_, Err(reason)) => report.skip(locator, reason),
                }
            }
            "EquivalentClasses" => {
                if args.len() < 2 {
                    report.skip(locator, "malformed EquivalentClasses");
                    continue;
                }
                let parsed: Result<Vec<Concept>, String> =
                    args.iter().map(|a| parse_concept(a, &prefixes)).collect();
                match parsed {
                    Ok(members) => {
                        // n-ary equivalences split against the first member.
                        let first = members[0].clone();
                        for other in &members[1..] {
                            ontology.push(Axiom::equivalent(first.clone(), other.clone()), None);
                            report.accepted += 1;
                        }
                    }
                    Err(reason) => report.skip(locator, reason),
                }
            }
            other => report.skip(locator, format!("unsupported: {other}")),
        }
    }
    Ok((ontology, report))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn accepts_simple_subclass() {
        let (onto, report) = parse_ofs("SubClassOf(:A :B)").unwrap();
        assert_eq!(onto.len(), 1);
        assert_eq!(report.accepted, 1);
        assert_eq!(
            onto.axiom(0),
            &Axiom::sub_class_of(Concept::atom("A"), Concept::atom("B"))
        );
    }

    #[test]
    fn filters_complement_as_non_el() {
        let (onto, report) = parse_ofs("SubClassOf(:A ObjectComplementOf(:B))").unwrap();
        assert_eq!(onto.len(), 0);
        assert_eq!(report.accepted, 0);
        assert_eq!(report.non_el_filtered, 1);
        assert!(report.skipped[0].1.contains("ObjectComplementOf"));
    }

    #[test]
    fn nary_equivalence_splits_against_first() {
        let (onto, report) = parse_ofs("EquivalentClasses(:A :B :C)").unwrap();
        assert_eq!(report.accepted, 2);
        assert_eq!(
            onto.axiom(0),
            &Axiom::equivalent(Concept::atom("A"), Concept::atom("B"))
        );
        assert_eq!(
            onto.axiom(1),
            &Axiom::equivalent(Concept::atom("A"), Concept::atom("C"))
        );
    }

    #[test]
    fn full_document_with_prefixes_and_thing() {
        let doc = r#"
            Prefix(:=<http://example.org/zoo#>)
            Prefix(owl:=<http://www.w3.org/2002/07/owl#>)
            Ontology(<http://example.org/zoo>
              Declaration(Class(:Dog))
              SubClassOf(:Dog ObjectIntersectionOf(:Animal ObjectSomeValuesFrom(:hasOwner :Human)))
              SubClassOf(:Dog owl:Thing)
              AnnotationAssertion(rdfs:label :Dog "Dog")
            )
        "#;
        let (onto, report) = parse_ofs(doc).unwrap();
        assert_eq!(report.accepted, 2);
        assert_eq!(report.skipped.len(), 2);
        assert_eq!(report.total(), 4);
        let expected = Axiom::sub_class_of(
            Concept::atom("Dog"),
            Concept::and(vec![
                Concept::atom("Animal"),
                Concept::exists("hasOwner", Concept::atom("Human")),
            ]),
        );
        assert_eq!(onto.axiom(0), &expected);
        assert_eq!(onto.axiom(1), &Axiom::sub_class_of(Concept::atom("Dog"), Concept::Top));
    }

    #[test]
    fn unbalanced_parens_are_fatal() {
        assert!(matches!(
            parse_ofs("SubClassOf(:A :B"),
            Err(OfsError::MalformedDocument(_))
        ));
    }
}
