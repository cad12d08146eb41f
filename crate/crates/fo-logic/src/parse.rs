//! Lexer and recursive-descent parser for predicate definitions.
//!
//! The grammar is deliberately negation-free: there is no `!` token, so a
//! negated intersection atom fails here rather than in a later lint pass.
//! `simeq(a, b)` is accepted and desugared to `sim(a, b) | eq(a, b)`.

use crate::ast::{Definition, Formula};
use crate::prep::EMPTY_MARK;
use crate::FoError;

#[derive(Clone, Debug, PartialEq, Eq)]
enum Tok {
    Ident(String),
    LParen,
    RParen,
    Comma,
    Dot,
    Amp,
    Pipe,
    Define,
    /// Marker from an empty macro expansion; removed by `clean`.
    Empty,
}

impl Tok {
    fn describe(&self) -> String {
        match self {
            Tok::Ident(s) => format!("`{s}`"),
            Tok::LParen => "`(`".into(),
            Tok::RParen => "`)`".into(),
            Tok::Comma => "`,`".into(),
            Tok::Dot => "`.`".into(),
            Tok::Amp => "`&`".into(),
            Tok::Pipe => "`|`".into(),
            Tok::Define => "`:=`".into(),
            Tok::Empty => "empty-family marker".into(),
        }
    }
}

#[derive(Clone, Debug)]
struct Spanned {
    tok: Tok,
    line: u32,
    col: u32,
}

fn lex(text: &str) -> Result<Vec<Spanned>, FoError> {
    let mut out = Vec::new();
    let mut line = 1u32;
    let mut col = 1u32;
    let mut chars = text.chars().peekable();
    while let Some(&c) = chars.peek() {
        let (tline, tcol) = (line, col);
        let bump = |chars: &mut std::iter::Peekable<std::str::Chars>, line: &mut u32, col: &mut u32| {
            let c = chars.next().unwrap();
            if c == '\n' {
                *line += 1;
                *col = 1;
            } else {
                *col += 1;
            }
            c
        };
        if c.is_whitespace() {
            bump(&mut chars, &mut line, &mut col);
            continue;
        }
        if c.is_ascii_alphabetic() || c == '_' {
            let mut word = String::new();
            while let Some(&c) = chars.peek() {
                if c.is_ascii_alphanumeric() || c == '_' {
                    word.push(bump(&mut chars, &mut line, &mut col));
                } else {
                    break;
                }
            }
            out.push(Spanned { tok: Tok::Ident(word), line: tline, col: tcol });
            continue;
        }
        match c {
            '(' | ')' | ',' | '.' | '&' | '|' => {
                bump(&mut chars, &mut line, &mut col);
                let tok = match c {
                    '(' => Tok::LParen,
                    ')' => Tok::RParen,
                    ',' => Tok::Comma,
                    '.' => Tok::Dot,
                    '&' => Tok::Amp,
                    _ => Tok::Pipe,
                };
                out.push(Spanned { tok, line: tline, col: tcol });
            }
            ':' => {
                bump(&mut chars, &mut line, &mut col);
                if chars.peek() == Some(&'=') {
                    bump(&mut chars, &mut line, &mut col);
                    out.push(Spanned { tok: Tok::Define, line: tline, col: tcol });
                } else {
                    return Err(FoError::Parse {
                        line: tline,
                        col: tcol,
                        found: "`:`".into(),
                        expected: vec!["`:=`".into()],
                    });
                }
            }
            '@' => {
                // Only the preprocessor's empty-family marker is legal here.
                let rest: String = chars.clone().take(EMPTY_MARK.len()).collect();
                if rest == EMPTY_MARK {
                    for _ in 0..EMPTY_MARK.len() {
                        bump(&mut chars, &mut line, &mut col);
                    }
                    out.push(Spanned { tok: Tok::Empty, line: tline, col: tcol });
                } else {
                    return Err(FoError::Parse {
                        line: tline,
                        col: tcol,
                        found: format!("`{c}`"),
                        expected: expected_at_any(),
                    });
                }
            }
            _ => {
                return Err(FoError::Parse {
                    line: tline,
                    col: tcol,
                    found: format!("`{c}`"),
                    expected: expected_at_any(),
                });
            }
        }
    }
    Ok(out)
}

fn expected_at_any() -> Vec<String> {
    vec![
        "identifier".into(),
        "`(`".into(),
        "`)`".into(),
        "`,`".into(),
        "`.`".into(),
        "`&`".into(),
        "`|`".into(),
        "`:=`".into(),
    ]
}

/// Removes empty-family markers together with one adjacent connective, and
/// quantifiers whose variable list expanded to nothing.
fn clean(mut toks: Vec<Spanned>) -> Vec<Spanned> {
    loop {
        let mut changed = false;
        let mut i = 0;
        while i + 1 < toks.len() {
            let pair = (&toks[i].tok, &toks[i + 1].tok);
            let drop_both = matches!(
                pair,
                (Tok::Empty, Tok::Amp)
                    | (Tok::Amp, Tok::Empty)
                    | (Tok::Empty, Tok::Pipe)
                    | (Tok::Pipe, Tok::Empty)
            ) || (matches!(&toks[i].tok, Tok::Ident(w) if w == "exists" || w == "forall")
                && toks[i + 1].tok == Tok::Dot);
            if drop_both {
                toks.drain(i..i + 2);
                changed = true;
            } else {
                i += 1;
            }
        }
        if !changed {
            return toks;
        }
    }
}

struct Parser {
    toks: Vec<Spanned>,
    pos: usize,
    /// Lexical scope: parameter and quantifier variables currently bound.
    scope: Vec<String>,
}

impl Parser {
    fn peek(&self) -> Option<&Spanned> {
        self.toks.get(self.pos)
    }

    fn err_here(&self, expected: &[&str]) -> FoError {
        let (line, col, found) = match self.peek() {
            Some(s) => (s.line, s.col, s.tok.describe()),
            None => {
                let last = self.toks.last();
                (
                    last.map_or(1, |s| s.line),
                    last.map_or(1, |s| s.col + 1),
                    "end of input".into(),
                )
            }
        };
        FoError::Parse {
            line,
            col,
            found,
            expected: expected.iter().map(|s| s.to_string()).collect(),
        }
    }

    fn expect(&mut self, want: Tok, label: &str) -> Result<(), FoError> {
        match self.peek() {
            Some(s) if s.tok == want => {
                self.pos += 1;
                Ok(())
            }
            _ => Err(self.err_here(&[label])),
        }
    }

    fn ident(&mut self, label: &str) -> Result<(String, u32, u32), FoError> {
        match self.peek() {
            Some(Spanned { tok: Tok::Ident(w), line, col }) => {
                let out = (w.clone(), *line, *col);
                self.pos += 1;
                Ok(out)
            }
            _ => Err(self.err_here(&[label])),
        }
    }

    fn check_scope(&self, var: &str, line: u32, col: u32) -> Result<(), FoError> {
        if self.scope.iter().any(|v| v == var) {
            Ok(())
        } else {
            Err(FoError::Unbound { var: var.to_string(), line, col })
        }
    }

    fn or_expr(&mut self) -> Result<Formula, FoError> {
        let mut parts = vec![self.and_expr()?];
        while matches!(self.peek(), Some(s) if s.tok == Tok::Pipe) {
            self.pos += 1;
            parts.push(self.and_expr()?);
        }
        if parts.len() == 1 {
            return Ok(parts.pop().unwrap());
        }
        // Associativity: splice parenthesised disjunction groups so macro
        // expansions and hand-written nesting give the same structure.
        let mut flat = Vec::with_capacity(parts.len());
        for p in parts {
            match p {
                Formula::Or(inner) => flat.extend(inner),
                other => flat.push(other),
            }
        }
        Ok(Formula::Or(flat))
    }

    fn and_expr(&mut self) -> Result<Formula, FoError> {
        let mut parts = vec![self.unit()?];
        while matches!(self.peek(), Some(s) if s.tok == Tok::Amp) {
            self.pos += 1;
            parts.push(self.unit()?);
        }
        if parts.len() == 1 {
            return Ok(parts.pop().unwrap());
        }
        let mut flat = Vec::with_capacity(parts.len());
        for p in parts {
            match p {
                Formula::And(inner) => flat.extend(inner),
                other => flat.push(other),
            }
        }
        Ok(Formula::And(flat))
    }

    fn quantifier_vars(&mut self) -> Result<Vec<String>, FoError> {
        let mut vars = Vec::new();
        loop {
            match self.peek() {
                Some(Spanned { tok: Tok::Ident(_), .. }) => {
                    vars.push(self.ident("variable")?.0);
                }
                Some(Spanned { tok: Tok::Dot, .. }) if !vars.is_empty() => {
                    self.pos += 1;
                    return Ok(vars);
                }
                _ => {
                    return Err(self.err_here(if vars.is_empty() {
                        &["variable"]
                    } else {
                        &["variable", "`.`"]
                    }))
                }
            }
        }
    }

    fn unit(&mut self) -> Result<Formula, FoError> {
        match self.peek() {
            Some(Spanned { tok: Tok::LParen, .. }) => {
                self.pos += 1;
                let f = self.or_expr()?;
                self.expect(Tok::RParen, "`)`")?;
                Ok(f)
            }
            Some(Spanned { tok: Tok::Ident(w), .. }) if w == "forall" => {
                self.pos += 1;
                let vars = self.quantifier_vars()?;
                let depth = self.scope.len();
                self.scope.extend(vars.iter().cloned());
                let body = self.or_expr()?;
                self.scope.truncate(depth);
                Ok(vars
                    .into_iter()
                    .rev()
                    .fold(body, |acc, v| Formula::Forall(v, Box::new(acc))))
            }
            Some(Spanned { tok: Tok::Ident(w), .. }) if w == "exists" => {
                self.pos += 1;
                let vars = self.quantifier_vars()?;
                let depth = self.scope.len();
                self.scope.extend(vars.iter().cloned());
                let body = self.or_expr()?;
                self.scope.truncate(depth);
                Ok(Formula::Exists(vars, Box::new(body)))
            }
            Some(Spanned { tok: Tok::Ident(_), .. }) => self.atom(),
            _ => Err(self.err_here(&["identifier", "`(`", "`forall`", "`exists`"])),
        }
    }

    fn atom(&mut self) -> Result<Formula, FoError> {
        let (name, _, _) = self.ident("identifier")?;
        self.expect(Tok::LParen, "`(`")?;
        let mut args: Vec<(String, u32, u32)> = Vec::new();
        if !matches!(self.peek(), Some(s) if s.tok == Tok::RParen) {
            loop {
                args.push(self.ident("argument")?);
                if matches!(self.peek(), Some(s) if s.tok == Tok::Comma) {
                    self.pos += 1;
                } else {
                    break;
                }
            }
        }
        self.expect(Tok::RParen, "`)`")?;
        for (v, line, col) in &args {
            self.check_scope(v, *line, *col)?;
        }
        let binary = |args: &[(String, u32, u32)], name: &str| -> Result<(String, String), FoError> {
            if args.len() == 2 {
                Ok((args[0].0.clone(), args[1].0.clone()))
            } else {
                Err(FoError::Arity {
                    name: name.to_string(),
                    want: 2,
                    got: args.len(),
                })
            }
        };
        match name.as_str() {
            "sim" => {
                let (a, b) = binary(&args, "sim")?;
                Ok(Formula::Sim(a, b))
            }
            "eq" => {
                let (a, b) = binary(&args, "eq")?;
                Ok(Formula::Eq(a, b))
            }
            "neq" => {
                let (a, b) = binary(&args, "neq")?;
                Ok(Formula::NotEq(a, b))
            }
            "simeq" => {
                let (a, b) = binary(&args, "simeq")?;
                Ok(Formula::Or(vec![
                    Formula::Sim(a.clone(), b.clone()),
                    Formula::Eq(a, b),
                ]))
            }
            _ => Ok(Formula::PredRef(
                name,
                args.into_iter().map(|(v, _, _)| v).collect(),
            )),
        }
    }
}

/// Parses one `name(params) := body` definition. The body must be fully
/// expanded text (no macros); variables must be parameters or quantified.
pub fn parse_definition(text: &str) -> Result<Definition, FoError> {
    let toks = clean(lex(text)?);
    let mut p = Parser { toks, pos: 0, scope: Vec::new() };
    let (name, _, _) = p.ident("predicate name")?;
    p.expect(Tok::LParen, "`(`")?;
    let mut params = Vec::new();
    if !matches!(p.peek(), Some(s) if s.tok == Tok::RParen) {
        loop {
            params.push(p.ident("parameter")?.0);
            if matches!(p.peek(), Some(s) if s.tok == Tok::Comma) {
                p.pos += 1;
            } else {
                break;
            }
        }
    }
    p.expect(Tok::RParen, "`)`")?;
    p.expect(Tok::Define, "`:=`")?;
    p.scope = params.clone();
    let body = p.or_expr()?;
    if p.pos != p.toks.len() {
        return Err(p.err_here(&["end of definition"]));
    }
    Ok(Definition { name, params, body })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn the_identically_false_atom_parses() {
        let d = parse_definition("X(a) := sim(a, a)").unwrap();
        assert_eq!(d.body, Formula::Sim("a".into(), "a".into()));
    }

    #[test]
    fn negation_is_not_in_the_grammar() {
        let err = parse_definition("Y(a) := !sim(a, b)").unwrap_err();
        match err {
            FoError::Parse { line, col, ref found, ref expected } => {
                assert_eq!((line, col), (1, 9));
                assert_eq!(found, "`!`");
                assert!(!expected.is_empty());
            }
            other => panic!("wrong error: {other}"),
        }
    }

    #[test]
    fn unbound_variables_are_rejected_with_a_position() {
        let err = parse_definition("Y(a) := sim(a, b)").unwrap_err();
        match err {
            FoError::Unbound { ref var, line, col } => {
                assert_eq!(var, "b");
                assert_eq!((line, col), (1, 16));
            }
            other => panic!("wrong error: {other}"),
        }
    }

    #[test]
    fn simeq_desugars_to_a_disjunction() {
        let d = parse_definition("F(a, b) := simeq(a, b)").unwrap();
        assert_eq!(
            d.body,
            Formula::Or(vec![
                Formula::Sim("a".into(), "b".into()),
                Formula::Eq("a".into(), "b".into()),
            ])
        );
    }

    #[test]
    fn empty_markers_and_empty_quantifiers_vanish() {
        let d = parse_definition("F(a, b) := exists . sim(a, b) & @EMPTY@").unwrap();
        assert_eq!(d.body, Formula::Sim("a".into(), "b".into()));
    }

    #[test]
    fn multi_variable_forall_desugars_to_nesting() {
        let d = parse_definition("F(a) := forall g1 g2 . sim(g1, g2) | sim(a, g1)").unwrap();
        match &d.body {
            Formula::Forall(v1, inner) => {
                assert_eq!(v1, "g1");
                assert!(matches!(&**inner, Formula::Forall(v2, _) if v2 == "g2"));
            }
            other => panic!("wrong shape: {other:?}"),
        }
    }

    #[test]
    fn connective_precedence_groups_ands_under_ors() {
        let d = parse_definition("F(a, b, c) := sim(a, b) & sim(b, c) | eq(a, c)").unwrap();
        match &d.body {
            Formula::Or(parts) => {
                assert_eq!(parts.len(), 2);
                assert!(matches!(&parts[0], Formula::And(cs) if cs.len() == 2));
                assert!(matches!(&parts[1], Formula::Eq(_, _)));
            }
            other => panic!("wrong shape: {other:?}"),
        }
    }

    #[test]
    fn round_trip_is_structural_identity() {
        let src = "hash(a1, b1, a2, b2) := forall g . exists h1 h2 . sim(a1, b1) & sim(a2, b2) & ((P(a1, b1, h1) & P(a2, b2, h2)) | P(a1, b1, g))";
        let d = parse_definition(src).unwrap();
        let printed = d.print();
        let again = parse_definition(&printed).unwrap();
        assert_eq!(d, again);
    }
}
