use super::ObjectExpr;
use crate::abgroup::{parse_group_literal, FinAbGroup};
use crate::error::{Error, Result};
use crate::family::{Family, FamilySpec, Member};

/// Parses the expression grammar
///
/// ```text
/// expr  := term ("(+)" term)*
/// term  := unary ("(x)" unary)*
/// unary := "shift" unary | atom
/// atom  := "zero" | "unit" | "e[" G ("|" dim)? "]" | "chi[" G "]" | "aug[" G "]" | "(" expr ")"
/// ```
///
/// `G` is a group literal such as `2:[2,1]`, an object name, or a bare
/// integer: a rank over `E_p`, a cyclic order elsewhere.
pub fn parse_expr(f: &Family, input: &str) -> Result<ObjectExpr> {
    let mut p = Parser { f, s: input, i: 0 };
    let x = p.expr()?;
    p.ws();
    if p.i < input.len() {
        return Err(p.err("unexpected trailing input"));
    }
    Ok(x)
}

/// Renders `x` so that [`parse_expr`] over `f` reads it back; over `E_p`
/// groups are written as ranks.
pub fn format_expr(f: &Family, x: &ObjectExpr) -> String {
    let elementary = matches!(f.spec(), FamilySpec::ElementaryAbelian { .. });
    let member = |m: &Member| match m {
        Member::Ab(g) if elementary => g.rank().to_string(),
        _ => m.to_string(),
    };
    let mut out = String::new();
    x.write_with(&mut out, &member).expect("writing to a string");
    out
}

struct Parser<'a> {
    f: &'a Family,
    s: &'a str,
    i: usize,
}

impl Parser<'_> {
    fn err(&self, msg: &str) -> Error {
        Error::parse_at(self.s, self.i, msg)
    }

    fn rest(&self) -> &str {
        &self.s[self.i..]
    }

    fn ws(&mut self) {
        let trimmed = self.rest().trim_start();
        self.i = self.s.len() - trimmed.len();
    }

    fn eat(&mut self, tok: &str) -> bool {
        self.ws();
        if self.rest().starts_with(tok) {
            self.i += tok.len();
            true
        } else {
            false
        }
    }

    fn eat_word(&mut self, word: &str) -> bool {
        self.ws();
        let r = self.rest();
        let boundary = r[word.len().min(r.len())..]
            .chars()
            .next()
            .is_none_or(|c| !c.is_alphanumeric() && c != '_');
        if r.starts_with(word) && boundary {
            self.i += word.len();
            true
        } else {
            false
        }
    }

    fn expr(&mut self) -> Result<ObjectExpr> {
        let mut x = self.term()?;
        while self.eat("(+)") {
            x = ObjectExpr::sum(x, self.term()?);
        }
        Ok(x)
    }

    fn term(&mut self) -> Result<ObjectExpr> {
        let mut x = self.unary()?;
        while self.eat("(x)") {
            x = ObjectExpr::tensor(x, self.unary()?);
        }
        Ok(x)
    }

    fn unary(&mut self) -> Result<ObjectExpr> {
        if self.eat_word("shift") {
            return Ok(ObjectExpr::shift(self.unary()?));
        }
        self.atom()
    }

    fn atom(&mut self) -> Result<ObjectExpr> {
        if self.eat_word("zero") {
            return Ok(ObjectExpr::Zero);
        }
        if self.eat_word("unit") {
            return Ok(ObjectExpr::Unit);
        }
        for (word, kind) in [("e[", 0), ("chi[", 1), ("aug[", 2)] {
            if self.eat(word) {
                let start = self.i;
                let end = self.closing_bracket()?;
                let body = &self.s[start..end];
                self.i = end + 1;
                return match kind {
                    0 => match body.rsplit_once('|') {
                        Some((g, d)) => {
                            let d: u32 = d.trim().parse().map_err(|_| {
                                Error::parse_at(self.s, start + g.len() + 1, "expected a dimension")
                            })?;
                            Ok(ObjectExpr::GenTwisted(self.member(g, start)?, d))
                        }
                        None => Ok(ObjectExpr::Gen(self.member(body, start)?)),
                    },
                    1 => Ok(ObjectExpr::Chi(self.member(body, start)?)),
                    _ => Ok(ObjectExpr::AugCone(self.member(body, start)?)),
                };
            }
        }
        if self.eat("(") {
            let x = self.expr()?;
            if !self.eat(")") {
                return Err(self.err("expected ')'"));
            }
            return Ok(x);
        }
        Err(self.err("expected an object"))
    }

    /// Byte offset of the `]` closing the bracket just consumed.
    fn closing_bracket(&self) -> Result<usize> {
        let mut depth = 1;
        for (k, c) in self.rest().char_indices() {
            match c {
                '[' => depth += 1,
                ']' => {
                    depth -= 1;
                    if depth == 0 {
                        return Ok(self.i + k);
                    }
                }
                _ => {}
            }
        }
        Err(self.err("unclosed '['"))
    }

    fn member(&self, body: &str, base: usize) -> Result<Member> {
        let t = body.trim();
        if !t.is_empty() && t.bytes().all(|b| b.is_ascii_digit()) {
            let k: u64 = t
                .parse()
                .map_err(|_| Error::parse_at(self.s, base, "integer too large"))?;
            let g = match self.f.spec() {
                FamilySpec::ElementaryAbelian { p } => FinAbGroup::elementary(*p, k as usize),
                _ => FinAbGroup::cyclic(k),
            }
            .map_err(|e| Error::parse_at(self.s, base, e.to_string()))?;
            return Ok(Member::Ab(g));
        }
        if t.contains(':') {
            return Ok(Member::Ab(parse_group_literal(body, base, self.s)?));
        }
        if !t.is_empty() && t.chars().all(|c| c.is_alphanumeric() || c == '_') {
            return Ok(Member::Named(t.to_string()));
        }
        Err(Error::parse_at(self.s, base, "expected a group literal or name"))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn round_trip() {
        let f = Family::from_json(r#"{"kind":"abelian_p_rank","p":2,"r":2}"#).unwrap();
        for s in [
            "e[2:[1]]",
            "unit (+) zero",
            "aug[2:[2,1]] (x) (e[2:[1]] (+) shift e[2:[2]|3])",
            "shift (e[1] (x) unit)",
        ] {
            let x = parse_expr(&f, s).unwrap();
            assert_eq!(parse_expr(&f, &x.to_string()).unwrap(), x, "{s}");
        }
        let x = parse_expr(&f, "e[4] (x) e[2] (+) zero").unwrap();
        assert!(matches!(x, ObjectExpr::Sum(..)));
    }

    #[test]
    fn elementary_ranks() {
        let e = Family::from_json(r#"{"kind":"elementary_abelian","p":2}"#).unwrap();
        let x = parse_expr(&e, "aug[2] (x) aug[4]").unwrap();
        assert_eq!(parse_expr(&e, &format_expr(&e, &x)).unwrap(), x);
        let one = ObjectExpr::gen(FinAbGroup::trivial());
        assert_eq!(format_expr(&e, &one), "e[0]");
        assert_eq!(parse_expr(&e, &format_expr(&e, &one)).unwrap(), one);
        let ObjectExpr::Tensor(a, _) = x else { panic!() };
        assert_eq!(*a, ObjectExpr::AugCone(Member::Ab(FinAbGroup::elementary(2, 2).unwrap())));
    }

    #[test]
    fn errors_have_positions() {
        let f = Family::from_json(r#"{"kind":"cyclic_p","p":2}"#).unwrap();
        match parse_expr(&f, "e[2:[1]] (+)\n  e[4:[1]]") {
            Err(Error::Parse { line, column, .. }) => assert_eq!((line, column), (2, 5)),
            other => panic!("{other:?}"),
        }
        assert!(matches!(parse_expr(&f, "e[2:[1]"), Err(Error::Parse { .. })));
        assert!(matches!(parse_expr(&f, "unit unit"), Err(Error::Parse { .. })));
    }
}
