//! Positivity linter.
//!
//! Definitions are meant to stay inside the positive fragment: conjunction,
//! disjunction, quantifiers, and the `sim` atom. Equality atoms are the only
//! extensions, and each one must be declared. The check is transitive: a
//! definition inherits every atom reachable through the predicates it calls.

use crate::ast::{Definition, Formula};
use std::collections::HashMap;

/// Which non-`sim` atoms a definition is allowed to reach.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct PositivityFlags {
    pub allow_eq: bool,
    pub allow_neq: bool,
}

impl PositivityFlags {
    pub fn strict() -> Self {
        Self::default()
    }

    pub fn allowing(eq: bool, neq: bool) -> Self {
        Self { allow_eq: eq, allow_neq: neq }
    }
}

/// One disallowed atom, attributed to the definition whose body contains it.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Violation {
    pub definition: String,
    pub atom: String,
}

fn walk(
    def: &Definition,
    flags: PositivityFlags,
    defs: &HashMap<&str, &Definition>,
    visited: &mut Vec<String>,
    out: &mut Vec<Violation>,
) {
    if visited.iter().any(|n| n == &def.name) {
        return;
    }
    visited.push(def.name.clone());
    fn scan<'a>(
        f: &'a Formula,
        def_name: &str,
        flags: PositivityFlags,
        refs: &mut Vec<&'a str>,
        out: &mut Vec<Violation>,
    ) {
        match f {
            Formula::Forall(_, body) => scan(body, def_name, flags, refs, out),
            Formula::Exists(_, body) => scan(body, def_name, flags, refs, out),
            Formula::And(parts) | Formula::Or(parts) => {
                for p in parts {
                    scan(p, def_name, flags, refs, out);
                }
            }
            Formula::Sim(_, _) => {}
            Formula::Eq(a, b) => {
                if !flags.allow_eq {
                    out.push(Violation {
                        definition: def_name.to_string(),
                        atom: format!("eq({a}, {b})"),
                    });
                }
            }
            Formula::NotEq(a, b) => {
                if !flags.allow_neq {
                    out.push(Violation {
                        definition: def_name.to_string(),
                        atom: format!("neq({a}, {b})"),
                    });
                }
            }
            Formula::PredRef(name, _) => refs.push(name),
        }
    }
    let mut refs = Vec::new();
    scan(&def.body, &def.name, flags, &mut refs, out);
    for name in refs {
        if let Some(inner) = defs.get(name) {
            walk(inner, flags, defs, visited, out);
        }
    }
}

/// Checks `def` and everything it transitively references against `flags`.
/// Returns one violation per offending atom occurrence; empty means clean.
/// References that resolve to nothing in `context` are skipped — arity and
/// resolution are the evaluator's concern, not the linter's.
pub fn check_positive(
    def: &Definition,
    context: &[Definition],
    flags: PositivityFlags,
) -> Vec<Violation> {
    let defs: HashMap<&str, &Definition> =
        context.iter().map(|d| (d.name.as_str(), d)).collect();
    let mut out = Vec::new();
    let mut visited = Vec::new();
    walk(def, flags, &defs, &mut visited, &mut out);
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::parse::parse_definition;

    fn def(src: &str) -> Definition {
        parse_definition(src).unwrap()
    }

    #[test]
    fn pure_intersection_bodies_pass_the_strict_check() {
        let s = def("S(a1, a2, a3) := forall g . exists h . sim(g, h) & sim(a1, a2) & sim(a1, h)");
        assert!(check_positive(&s, &[], PositivityFlags::strict()).is_empty());
    }

    #[test]
    fn equality_atoms_need_the_eq_flag() {
        let d = def("Sbar(a, b, c) := sim(a, b) & (eq(c, a) | eq(c, b))");
        let v = check_positive(&d, &[], PositivityFlags::strict());
        assert_eq!(v.len(), 2);
        assert_eq!(v[0].atom, "eq(c, a)");
        assert!(check_positive(&d, &[], PositivityFlags::allowing(true, false)).is_empty());
    }

    #[test]
    fn violations_are_found_through_referenced_definitions() {
        let inner = def("T(a, b) := neq(a, b)");
        let outer = def("W(a, b) := forall g . T(a, g) | sim(a, b)");
        let v = check_positive(&outer, std::slice::from_ref(&inner), PositivityFlags::allowing(true, false));
        assert_eq!(v.len(), 1);
        assert_eq!(v[0].definition, "T");
        assert_eq!(v[0].atom, "neq(a, b)");
    }

    #[test]
    fn shared_references_are_scanned_once() {
        let inner = def("T(a, b) := eq(a, b)");
        let outer = def("W(a, b) := T(a, b) & T(b, a)");
        let v = check_positive(&outer, std::slice::from_ref(&inner), PositivityFlags::strict());
        assert_eq!(v.len(), 1);
    }

    #[test]
    fn unresolved_references_do_not_trip_the_linter() {
        let outer = def("W(a, b) := Mystery(a, b)");
        assert!(check_positive(&outer, &[], PositivityFlags::strict()).is_empty());
    }
}
