//! Corpus preprocessor: directives, bounded-family macros, and integer
//! substitution.
//!
//! The formula grammar itself is plain first-order; families whose width
//! depends on the model — chains of length `m+1`, bundles of `2^n` lines —
//! are written once with macros and expanded to concrete text before the
//! parser runs:
//!
//! * `#param name=expr` — define an integer parameter (`n` and `q` are
//!   supplied by the loader); `#guard ...`, `#flags ...`, `#audit-only`
//!   record entry metadata.
//! * `@and(i=lo:hi, body)` / `@or(i=lo:hi, body)` — conjunction or
//!   disjunction of `body` over the inclusive range, each instance
//!   parenthesized; an empty range leaves a marker that is dropped along
//!   with the dangling connective.
//! * `@vars(x, lo:hi)` — the space-separated variable list `x<lo> ... <hi>`
//!   for quantifier prefixes; empty ranges produce an empty list and the
//!   enclosing quantifier is dropped.
//! * `$name` and `$(expr)` — decimal substitution, usable inside
//!   identifiers (`b$i`, `a$(i%3+1)`).

use crate::FoError;

/// Entry metadata collected from `#` directives.
#[derive(Clone, Debug, Default)]
pub struct Directives {
    /// Parameters in definition order, after evaluation.
    pub params: Vec<(String, i64)>,
    /// Raw text of the `#guard` directive, when present.
    pub guard: Option<String>,
    /// Raw text of the `#flags` directive, when present (may be empty).
    pub flags: Option<String>,
    /// Whether the entry is marked `#audit-only`.
    pub audit_only: bool,
}

/// Marker left by an empty `@and`/`@or` expansion; the token cleanup pass
/// in the parser removes it together with one adjacent connective.
pub const EMPTY_MARK: &str = "@EMPTY@";

/// Splits directives from body text and evaluates `#param` definitions.
/// Body lines are returned unexpanded so callers can consult the guard
/// before paying for macro expansion.
pub fn read_directives(
    text: &str,
    builtins: &[(&str, i64)],
) -> Result<(Directives, String), FoError> {
    let mut dir = Directives::default();
    let mut env: Vec<(String, i64)> = builtins
        .iter()
        .map(|(k, v)| (k.to_string(), *v))
        .collect();
    let mut body = String::new();
    for raw in text.lines() {
        let line = match raw.find("//") {
            Some(i) => &raw[..i],
            None => raw,
        };
        let trimmed = line.trim();
        if let Some(rest) = trimmed.strip_prefix('#') {
            let rest = rest.trim();
            if rest == "audit-only" {
                dir.audit_only = true;
            } else if let Some(spec) = rest.strip_prefix("param") {
                let spec = spec.trim();
                let (name, expr) = spec
                    .split_once('=')
                    .ok_or_else(|| FoError::Directive(trimmed.to_string()))?;
                let value = eval_expr(expr.trim(), &env)?;
                env.push((name.trim().to_string(), value));
                dir.params.push((name.trim().to_string(), value));
            } else if let Some(spec) = rest.strip_prefix("guard") {
                dir.guard = Some(spec.trim().to_string());
            } else if let Some(spec) = rest.strip_prefix("flags") {
                dir.flags = Some(spec.trim().to_string());
            } else {
                return Err(FoError::Directive(trimmed.to_string()));
            }
        } else if !trimmed.is_empty() {
            body.push_str(line);
            body.push('\n');
        }
    }
    dir.params = env
        .into_iter()
        .skip(builtins.len())
        .collect();
    Ok((dir, body))
}

/// Expands macros and substitutions in body text. `params` should contain
/// the loader builtins followed by the entry's `#param` values.
pub fn expand(src: &str, params: &[(String, i64)]) -> Result<String, FoError> {
    let mut env: Vec<(String, i64)> = params.to_vec();
    expand_inner(src, &mut env)
}

fn expand_inner(src: &str, env: &mut Vec<(String, i64)>) -> Result<String, FoError> {
    let bytes = src.as_bytes();
    let mut out = String::with_capacity(src.len());
    let mut i = 0;
    while i < bytes.len() {
        if bytes[i] == b'@' {
            let rest = &src[i..];
            if let Some(body) = rest.strip_prefix("@and(") {
                let (inner, len) = balanced(body, rest, i)?;
                out.push_str(&expand_family(inner, " & ", env)?);
                i += "@and(".len() + len + 1;
            } else if let Some(body) = rest.strip_prefix("@or(") {
                let (inner, len) = balanced(body, rest, i)?;
                out.push_str(&expand_family(inner, " | ", env)?);
                i += "@or(".len() + len + 1;
            } else if let Some(body) = rest.strip_prefix("@vars(") {
                let (inner, len) = balanced(body, rest, i)?;
                out.push_str(&expand_vars(inner, env)?);
                i += "@vars(".len() + len + 1;
            } else {
                return Err(FoError::Directive(format!(
                    "unknown macro near `{}`",
                    &rest[..rest.len().min(16)]
                )));
            }
        } else if bytes[i] == b'$' {
            let rest = &src[i + 1..];
            if rest.starts_with('(') {
                let (inner, len) = balanced(&rest[1..], rest, i)?;
                let v = eval_expr(inner, env)?;
                out.push_str(&v.to_string());
                i += 3 + len;
            } else {
                let name: String = rest
                    .chars()
                    .take_while(|c| c.is_ascii_alphanumeric() || *c == '_')
                    .collect();
                if name.is_empty() {
                    return Err(FoError::Directive("dangling `$`".to_string()));
                }
                let v = lookup(&name, env)?;
                out.push_str(&v.to_string());
                i += 1 + name.len();
            }
        } else {
            out.push(bytes[i] as char);
            i += 1;
        }
    }
    Ok(out)
}

/// Extracts the text up to the parenthesis matching an already-consumed
/// `(`. Returns the inner text and its byte length.
fn balanced<'a>(after_open: &'a str, context: &str, _at: usize) -> Result<(&'a str, usize), FoError> {
    let mut depth = 1usize;
    for (j, c) in after_open.char_indices() {
        match c {
            '(' => depth += 1,
            ')' => {
                depth -= 1;
                if depth == 0 {
                    return Ok((&after_open[..j], j));
                }
            }
            _ => {}
        }
    }
    Err(FoError::Directive(format!(
        "unbalanced parenthesis near `{}`",
        &context[..context.len().min(24)]
    )))
}

/// `v=lo:hi, body` — one conjunct/disjunct per value, joined by `sep`.
fn expand_family(
    inner: &str,
    sep: &str,
    env: &mut Vec<(String, i64)>,
) -> Result<String, FoError> {
    let (head, body) = inner
        .split_once(',')
        .ok_or_else(|| FoError::Directive(format!("macro needs `v=lo:hi, body`: `{inner}`")))?;
    let (var, lo, hi) = parse_range(head, env)?;
    let mut pieces: Vec<String> = Vec::new();
    for v in lo..=hi {
        env.push((var.clone(), v));
        let piece = expand_inner(body.trim(), env)?;
        env.pop();
        pieces.push(format!("({piece})"));
    }
    if pieces.is_empty() {
        return Ok(EMPTY_MARK.to_string());
    }
    Ok(format!("({})", pieces.join(sep)))
}

/// `name, lo:hi` — the indexed variable list.
fn expand_vars(inner: &str, env: &[(String, i64)]) -> Result<String, FoError> {
    let (name, range) = inner
        .split_once(',')
        .ok_or_else(|| FoError::Directive(format!("@vars needs `name, lo:hi`: `{inner}`")))?;
    let (lo_s, hi_s) = range
        .split_once(':')
        .ok_or_else(|| FoError::Directive(format!("@vars needs `lo:hi`: `{inner}`")))?;
    let lo = eval_expr(lo_s, env)?;
    let hi = eval_expr(hi_s, env)?;
    let name = name.trim();
    let names: Vec<String> = (lo..=hi).map(|v| format!("{name}{v}")).collect();
    Ok(names.join(" "))
}

fn parse_range(head: &str, env: &[(String, i64)]) -> Result<(String, i64, i64), FoError> {
    let (var, range) = head
        .split_once('=')
        .ok_or_else(|| FoError::Directive(format!("macro range needs `v=lo:hi`: `{head}`")))?;
    let (lo_s, hi_s) = range
        .split_once(':')
        .ok_or_else(|| FoError::Directive(format!("macro range needs `lo:hi`: `{head}`")))?;
    Ok((
        var.trim().to_string(),
        eval_expr(lo_s, env)?,
        eval_expr(hi_s, env)?,
    ))
}

fn lookup(name: &str, env: &[(String, i64)]) -> Result<i64, FoError> {
    env.iter()
        .rev()
        .find(|(k, _)| k == name)
        .map(|(_, v)| *v)
        .ok_or_else(|| FoError::Directive(format!("unknown parameter `{name}`")))
}

/// Integer expression evaluator for directive and macro arithmetic:
/// `+ - * / % ^` with parentheses; `/` truncates; `^` is exponentiation.
pub fn eval_expr(src: &str, env: &[(String, i64)]) -> Result<i64, FoError> {
    let mut p = ExprParser {
        src: src.as_bytes(),
        pos: 0,
        env,
    };
    let v = p.sum()?;
    p.skip_ws();
    if p.pos != p.src.len() {
        return Err(FoError::Directive(format!("trailing input in `{src}`")));
    }
    Ok(v)
}

struct ExprParser<'a> {
    src: &'a [u8],
    pos: usize,
    env: &'a [(String, i64)],
}

impl ExprParser<'_> {
    fn skip_ws(&mut self) {
        while self.pos < self.src.len() && self.src[self.pos].is_ascii_whitespace() {
            self.pos += 1;
        }
    }

    fn peek(&mut self) -> Option<u8> {
        self.skip_ws();
        self.src.get(self.pos).copied()
    }

    fn sum(&mut self) -> Result<i64, FoError> {
        let mut acc = self.product()?;
        while let Some(op @ (b'+' | b'-')) = self.peek() {
            self.pos += 1;
            let rhs = self.product()?;
            acc = if op == b'+' { acc + rhs } else { acc - rhs };
        }
        Ok(acc)
    }

    fn product(&mut self) -> Result<i64, FoError> {
        let mut acc = self.power()?;
        while let Some(op @ (b'*' | b'/' | b'%')) = self.peek() {
            self.pos += 1;
            let rhs = self.power()?;
            acc = match op {
                b'*' => acc * rhs,
                b'/' if rhs != 0 => acc / rhs,
                b'%' if rhs != 0 => acc % rhs,
                _ => return Err(FoError::Directive("division by zero".to_string())),
            };
        }
        Ok(acc)
    }

    fn power(&mut self) -> Result<i64, FoError> {
        let base = self.atom()?;
        if self.peek() == Some(b'^') {
            self.pos += 1;
            let exp = self.power()?;
            if !(0..=62).contains(&exp) {
                return Err(FoError::Directive(format!("exponent {exp} out of range")));
            }
            return Ok(base.pow(exp as u32));
        }
        Ok(base)
    }

    fn atom(&mut self) -> Result<i64, FoError> {
        match self.peek() {
            Some(b'(') => {
                self.pos += 1;
                let v = self.sum()?;
                if self.peek() != Some(b')') {
                    return Err(FoError::Directive("expected `)` in expression".to_string()));
                }
                self.pos += 1;
                Ok(v)
            }
            Some(b'-') => {
                self.pos += 1;
                Ok(-self.atom()?)
            }
            Some(c) if c.is_ascii_digit() => {
                let start = self.pos;
                while self.pos < self.src.len() && self.src[self.pos].is_ascii_digit() {
                    self.pos += 1;
                }
                std::str::from_utf8(&self.src[start..self.pos])
                    .unwrap()
                    .parse()
                    .map_err(|_| FoError::Directive("malformed number".to_string()))
            }
            Some(c) if c.is_ascii_alphabetic() || c == b'_' => {
                let start = self.pos;
                while self.pos < self.src.len()
                    && (self.src[self.pos].is_ascii_alphanumeric() || self.src[self.pos] == b'_')
                {
                    self.pos += 1;
                }
                let name = std::str::from_utf8(&self.src[start..self.pos]).unwrap();
                lookup(name, self.env)
            }
            _ => Err(FoError::Directive("expected an expression atom".to_string())),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn expressions_follow_the_usual_precedence() {
        let env = vec![("n".to_string(), 3i64)];
        assert_eq!(eval_expr("2^(n-1)*(2^n-1)", &env).unwrap(), 28);
        assert_eq!(eval_expr("(n-1)/2", &env).unwrap(), 1);
        assert_eq!(eval_expr("n%2", &env).unwrap(), 1);
        assert_eq!(eval_expr("1+2*3", &env).unwrap(), 7);
    }

    #[test]
    fn families_expand_with_cyclic_indices() {
        let env = vec![];
        let got = expand("@and(i=1:3, sim(a$i, a$(i%3+1)))", &env).unwrap();
        assert_eq!(
            got,
            "((sim(a1, a2)) & (sim(a2, a3)) & (sim(a3, a1)))"
        );
    }

    #[test]
    fn empty_families_leave_the_marker() {
        let env = vec![("m".to_string(), 1i64)];
        let got = expand("x & @and(i=3:m+1, sim(b$i, c$i))", &env).unwrap();
        assert_eq!(got, format!("x & {EMPTY_MARK}"));
        assert_eq!(expand("@vars(a, 2:m)", &env).unwrap(), "");
        assert_eq!(expand("@vars(b, 2:m+1)", &env).unwrap(), "b2");
    }

    #[test]
    fn directives_separate_from_body() {
        let text = "#param m=(n-1)/2\n#flags eq\n#guard pg parity=odd\n// note\nf(a) := sim(a, a)\n";
        let (dir, body) = read_directives(text, &[("n", 5)]).unwrap();
        assert_eq!(dir.params, vec![("m".to_string(), 2)]);
        assert_eq!(dir.flags.as_deref(), Some("eq"));
        assert_eq!(dir.guard.as_deref(), Some("pg parity=odd"));
        assert!(!dir.audit_only);
        assert_eq!(body.trim(), "f(a) := sim(a, a)");
    }

    #[test]
    fn nested_ranges_reference_outer_variables() {
        let env = vec![("k".to_string(), 3i64)];
        let got = expand("@or(i=1:k-1, @or(j=i+1:k, eq(g$i, g$j)))", &env).unwrap();
        assert_eq!(
            got,
            "((((eq(g1, g2)) | (eq(g1, g3)))) | (((eq(g2, g3)))))"
        );
    }
}
