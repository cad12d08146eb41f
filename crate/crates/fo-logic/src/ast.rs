//! Formula syntax trees and the canonical printer.
//!
//! The language has exactly one relation symbol — line intersection — plus
//! equality, its negation, and references to previously defined predicates.
//! There is no negation connective: positivity is a property of the grammar,
//! not something a later pass has to restore.

use std::fmt::Write as _;

/// A first-order formula over the intersection relation. Connectives are
/// n-ary as written; `simeq` desugars at parse time and never appears here.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Formula {
    /// `forall v . body`
    Forall(String, Box<Formula>),
    /// `exists v1 v2 ... . body`
    Exists(Vec<String>, Box<Formula>),
    And(Vec<Formula>),
    Or(Vec<Formula>),
    /// `sim(a, b)` — the lines intersect (irreflexive).
    Sim(String, String),
    /// `eq(a, b)`
    Eq(String, String),
    /// `neq(a, b)`
    NotEq(String, String),
    /// Use of an earlier definition, by name.
    PredRef(String, Vec<String>),
}

/// A named predicate definition: `name(params) := body`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Definition {
    pub name: String,
    pub params: Vec<String>,
    pub body: Formula,
}

impl Formula {
    /// Free variables in order of first occurrence.
    pub fn free_vars(&self) -> Vec<String> {
        let mut bound: Vec<String> = Vec::new();
        let mut out: Vec<String> = Vec::new();
        self.collect_free(&mut bound, &mut out);
        out
    }

    fn collect_free(&self, bound: &mut Vec<String>, out: &mut Vec<String>) {
        let note = |v: &str, bound: &[String], out: &mut Vec<String>| {
            if !bound.iter().any(|b| b == v) && !out.iter().any(|o| o == v) {
                out.push(v.to_string());
            }
        };
        match self {
            Formula::Forall(v, body) => {
                bound.push(v.clone());
                body.collect_free(bound, out);
                bound.pop();
            }
            Formula::Exists(vs, body) => {
                let depth = bound.len();
                bound.extend(vs.iter().cloned());
                body.collect_free(bound, out);
                bound.truncate(depth);
            }
            Formula::And(cs) | Formula::Or(cs) => {
                for c in cs {
                    c.collect_free(bound, out);
                }
            }
            Formula::Sim(a, b) | Formula::Eq(a, b) | Formula::NotEq(a, b) => {
                note(a, bound, out);
                note(b, bound, out);
            }
            Formula::PredRef(_, args) => {
                for a in args {
                    note(a, bound, out);
                }
            }
        }
    }

    /// Canonical text form; `crate::parse_definition` inverts it.
    pub fn print(&self) -> String {
        let mut s = String::new();
        self.print_into(&mut s, 0);
        s
    }

    // Precedence floors: 0 = anything, 1 = no bare `|`, 2 = no bare `&`,
    // 3 = atoms and parenthesized groups only. Quantifiers swallow
    // everything to their right, so they are parenthesized under any
    // connective.
    fn print_into(&self, out: &mut String, min: u8) {
        match self {
            Formula::Forall(v, body) => {
                let parens = min > 0;
                if parens {
                    out.push('(');
                }
                let _ = write!(out, "forall {v} . ");
                body.print_into(out, 0);
                if parens {
                    out.push(')');
                }
            }
            Formula::Exists(vs, body) => {
                let parens = min > 0;
                if parens {
                    out.push('(');
                }
                let _ = write!(out, "exists {} . ", vs.join(" "));
                body.print_into(out, 0);
                if parens {
                    out.push(')');
                }
            }
            Formula::Or(cs) => {
                let parens = min > 1;
                if parens {
                    out.push('(');
                }
                for (i, c) in cs.iter().enumerate() {
                    if i > 0 {
                        out.push_str(" | ");
                    }
                    c.print_into(out, 2);
                }
                if parens {
                    out.push(')');
                }
            }
            Formula::And(cs) => {
                let parens = min > 2;
                if parens {
                    out.push('(');
                }
                for (i, c) in cs.iter().enumerate() {
                    if i > 0 {
                        out.push_str(" & ");
                    }
                    c.print_into(out, 3);
                }
                if parens {
                    out.push(')');
                }
            }
            Formula::Sim(a, b) => {
                let _ = write!(out, "sim({a}, {b})");
            }
            Formula::Eq(a, b) => {
                let _ = write!(out, "eq({a}, {b})");
            }
            Formula::NotEq(a, b) => {
                let _ = write!(out, "neq({a}, {b})");
            }
            Formula::PredRef(name, args) => {
                let _ = write!(out, "{name}({})", args.join(", "));
            }
        }
    }

    /// Every predicate name referenced anywhere in the formula.
    pub fn references(&self) -> Vec<String> {
        let mut out = Vec::new();
        self.walk_refs(&mut out);
        out
    }

    fn walk_refs(&self, out: &mut Vec<String>) {
        match self {
            Formula::Forall(_, body) => body.walk_refs(out),
            Formula::Exists(_, body) => body.walk_refs(out),
            Formula::And(cs) | Formula::Or(cs) => {
                for c in cs {
                    c.walk_refs(out);
                }
            }
            Formula::PredRef(name, _) => {
                if !out.iter().any(|n| n == name) {
                    out.push(name.clone());
                }
            }
            _ => {}
        }
    }
}

impl Definition {
    pub fn print(&self) -> String {
        format!("{}({}) := {}", self.name, self.params.join(", "), self.body.print())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sim(a: &str, b: &str) -> Formula {
        Formula::Sim(a.into(), b.into())
    }

    #[test]
    fn free_vars_respect_binding_order() {
        let f = Formula::Exists(
            vec!["h".into()],
            Box::new(Formula::And(vec![sim("g", "h"), sim("a", "g")])),
        );
        assert_eq!(f.free_vars(), vec!["g".to_string(), "a".to_string()]);
    }

    #[test]
    fn printer_parenthesizes_quantifiers_under_connectives() {
        let f = Formula::And(vec![
            Formula::Forall("g".into(), Box::new(sim("g", "a"))),
            sim("a", "b"),
        ]);
        assert_eq!(f.print(), "(forall g . sim(g, a)) & sim(a, b)");
    }

    #[test]
    fn printer_keeps_or_inside_and_grouped() {
        let f = Formula::And(vec![
            Formula::Or(vec![sim("a", "b"), Formula::Eq("a".into(), "b".into())]),
            sim("b", "c"),
        ]);
        assert_eq!(f.print(), "(sim(a, b) | eq(a, b)) & sim(b, c)");
    }
}
