//! Text grammar shared by the library and the CLI.
//!
//! ```text
//! expr    := ['+'|'-'] term (('+'|'-') term)*
//! term    := factor (('*'|'/') factor)*
//! factor  := '-' factor | wedge
//! wedge   := atom ('^' (INT | atom))*
//! atom    := INT | '(' expr ')' | var | 'dx(' base ')'
//!          | 'th(' field [',' '[' INT,... ']'] ')' | 'd(' var ')'
//! var     := name ['_' ('[' INT,... ']' | letters)]
//! ```
//!
//! `^` followed by an integer is a power; followed by anything else it is
//! the wedge product, which is the same graded product as `*`. The letter
//! suffix `u_tx` is sugar for `u_[1,1]` and needs single-letter base names.

use std::fmt::Write as _;

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};

use crate::error::{Error, Result};
use crate::forms::differential_of;
use crate::jetalg::{DiffPoly, JetContext, Monomial, MultiIndex, Rational, Symbol};

#[derive(Clone, Debug, PartialEq)]
enum Tok {
    Int(BigInt),
    Ident(String),
    Plus,
    Minus,
    Star,
    Slash,
    Caret,
    LParen,
    RParen,
    LBracket,
    RBracket,
    Comma,
    Underscore,
    End,
}

struct Lexer {
    toks: Vec<(Tok, usize, usize)>,
}

fn lex(text: &str) -> Result<Lexer> {
    let mut toks = Vec::new();
    let (mut line, mut col) = (1, 1);
    let chars: Vec<char> = text.chars().collect();
    let mut i = 0;
    while i < chars.len() {
        let c = chars[i];
        let (l0, c0) = (line, col);
        if c == '\n' {
            line += 1;
            col = 1;
            i += 1;
            continue;
        }
        if c.is_whitespace() {
            col += 1;
            i += 1;
            continue;
        }
        let tok = if c.is_ascii_digit() {
            let start = i;
            while i < chars.len() && chars[i].is_ascii_digit() {
                i += 1;
            }
            let s: String = chars[start..i].iter().collect();
            col += i - start;
            toks.push((Tok::Int(s.parse().expect("digits")), l0, c0));
            continue;
        } else if c.is_ascii_alphabetic() {
            let start = i;
            while i < chars.len() && chars[i].is_ascii_alphanumeric() {
                i += 1;
            }
            let s: String = chars[start..i].iter().collect();
            col += i - start;
            toks.push((Tok::Ident(s), l0, c0));
            continue;
        } else {
            match c {
                '+' => Tok::Plus,
                '-' => Tok::Minus,
                '*' => Tok::Star,
                '/' => Tok::Slash,
                '^' => Tok::Caret,
                '(' => Tok::LParen,
                ')' => Tok::RParen,
                '[' => Tok::LBracket,
                ']' => Tok::RBracket,
                ',' => Tok::Comma,
                '_' => Tok::Underscore,
                other => {
                    return Err(Error::Parse {
                        line,
                        column: col,
                        message: format!("unexpected character `{other}`"),
                    })
                }
            }
        };
        toks.push((tok, l0, c0));
        i += 1;
        col += 1;
    }
    toks.push((Tok::End, line, col));
    Ok(Lexer { toks })
}

struct Parser<'a> {
    ctx: &'a JetContext,
    toks: Vec<(Tok, usize, usize)>,
    pos: usize,
}

impl<'a> Parser<'a> {
    fn peek(&self) -> &Tok {
        &self.toks[self.pos].0
    }

    fn peek_at(&self, k: usize) -> &Tok {
        &self.toks[(self.pos + k).min(self.toks.len() - 1)].0
    }

    fn next(&mut self) -> Tok {
        let t = self.toks[self.pos].0.clone();
        if self.pos + 1 < self.toks.len() {
            self.pos += 1;
        }
        t
    }

    fn err<T>(&self, message: impl Into<String>) -> Result<T> {
        let (_, line, column) = &self.toks[self.pos];
        Err(Error::Parse {
            line: *line,
            column: *column,
            message: message.into(),
        })
    }

    fn expect(&mut self, t: Tok, what: &str) -> Result<()> {
        if *self.peek() == t {
            self.next();
            Ok(())
        } else {
            self.err(format!("expected {what}"))
        }
    }

    fn expr(&mut self) -> Result<DiffPoly> {
        let mut acc = match self.peek() {
            Tok::Minus => {
                self.next();
                -self.term()?
            }
            Tok::Plus => {
                self.next();
                self.term()?
            }
            _ => self.term()?,
        };
        loop {
            match self.peek() {
                Tok::Plus => {
                    self.next();
                    acc += self.term()?;
                }
                Tok::Minus => {
                    self.next();
                    acc -= self.term()?;
                }
                _ => return Ok(acc),
            }
        }
    }

    fn term(&mut self) -> Result<DiffPoly> {
        let mut acc = self.factor()?;
        loop {
            match self.peek() {
                Tok::Star => {
                    self.next();
                    acc = &acc * &self.factor()?;
                }
                Tok::Slash => {
                    self.next();
                    let d = self.factor()?;
                    match d.as_constant() {
                        Some(c) if !c.is_zero() => acc = acc.scale(&(Rational::one() / c)),
                        Some(_) => return self.err("division by zero"),
                        None => return self.err("can only divide by a nonzero constant"),
                    }
                }
                _ => return Ok(acc),
            }
        }
    }

    fn factor(&mut self) -> Result<DiffPoly> {
        if *self.peek() == Tok::Minus {
            self.next();
            return Ok(-self.factor()?);
        }
        let mut factors = vec![self.atom()?];
        while *self.peek() == Tok::Caret {
            self.next();
            if let Tok::Int(e) = self.peek().clone() {
                self.next();
                let e: u32 = match u32::try_from(&e) {
                    Ok(e) if e <= 64 => e,
                    _ => return self.err("exponent too large"),
                };
                let last = factors.pop().expect("nonempty");
                factors.push(last.pow(e));
            } else {
                factors.push(self.atom()?);
            }
        }
        Ok(factors.into_iter().reduce(|a, b| &a * &b).expect("nonempty"))
    }

    fn int_list(&mut self) -> Result<Vec<u16>> {
        self.expect(Tok::LBracket, "`[`")?;
        let mut out = Vec::new();
        loop {
            match self.next() {
                Tok::Int(v) => match u16::try_from(&v) {
                    Ok(v) => out.push(v),
                    Err(_) => return self.err("derivative count too large"),
                },
                _ => return self.err("expected a derivative count"),
            }
            match self.next() {
                Tok::Comma => continue,
                Tok::RBracket => return Ok(out),
                _ => return self.err("expected `,` or `]`"),
            }
        }
    }

    fn multi_index(&mut self) -> Result<MultiIndex> {
        let n = self.ctx.dim();
        match self.peek().clone() {
            Tok::LBracket => {
                let counts = self.int_list()?;
                if counts.len() != n {
                    return self.err(format!(
                        "multi-index arity: expected {n} counts, found {}",
                        counts.len()
                    ));
                }
                Ok(MultiIndex::from_counts(counts))
            }
            Tok::Ident(s) => {
                if self.ctx.base_names().iter().any(|b| b.len() != 1) {
                    return self.err("letter suffixes need single-letter base names; use `_[...]`");
                }
                let mut counts = vec![0u16; n];
                for ch in s.chars() {
                    match self.ctx.base_index(&ch.to_string()) {
                        Some(i) => counts[i] += 1,
                        None => return self.err(format!("`{ch}` is not a base coordinate")),
                    }
                }
                self.next();
                Ok(MultiIndex::from_counts(counts))
            }
            _ => self.err("expected a multi-index after `_`"),
        }
    }

    fn field(&mut self) -> Result<usize> {
        match self.next() {
            Tok::Ident(name) => match self.ctx.field_index(&name) {
                Some(a) => Ok(a),
                None => {
                    self.pos -= 1;
                    self.err(format!("undeclared field `{name}`"))
                }
            },
            _ => self.err("expected a field name"),
        }
    }

    fn variable(&mut self) -> Result<Symbol> {
        let Tok::Ident(name) = self.peek().clone() else {
            return self.err("expected a variable");
        };
        if let Some(i) = self.ctx.base_index(&name) {
            self.next();
            if *self.peek() == Tok::Underscore {
                return self.err(format!("base coordinate `{name}` takes no derivatives"));
            }
            return Ok(Symbol::Base(i as u16));
        }
        let a = self.field()?;
        let sigma = if *self.peek() == Tok::Underscore {
            self.next();
            self.multi_index()?
        } else {
            self.ctx.zero_index()
        };
        Ok(self.ctx.jet_symbol(a, sigma))
    }

    fn atom(&mut self) -> Result<DiffPoly> {
        match self.peek().clone() {
            Tok::Int(v) => {
                self.next();
                Ok(DiffPoly::constant(Rational::from_integer(v)))
            }
            Tok::LParen => {
                self.next();
                let e = self.expr()?;
                self.expect(Tok::RParen, "`)`")?;
                Ok(e)
            }
            Tok::Ident(name) if *self.peek_at(1) == Tok::LParen && matches!(name.as_str(), "dx" | "th" | "d") => {
                self.next();
                self.next();
                let out = match name.as_str() {
                    "dx" => match self.next() {
                        Tok::Ident(b) => match self.ctx.base_index(&b) {
                            Some(i) => self.ctx.dx(i),
                            None => {
                                self.pos -= 1;
                                return self.err(format!("`{b}` is not a base coordinate"));
                            }
                        },
                        _ => return self.err("expected a base coordinate"),
                    },
                    "th" => {
                        let a = self.field()?;
                        let sigma = if *self.peek() == Tok::Comma {
                            self.next();
                            self.multi_index()?
                        } else {
                            self.ctx.zero_index()
                        };
                        DiffPoly::from_symbol(self.ctx.theta_symbol(a, sigma))
                    }
                    _ => {
                        let s = self.variable()?;
                        differential_of(self.ctx, &s).into_poly()
                    }
                };
                self.expect(Tok::RParen, "`)`")?;
                Ok(out)
            }
            Tok::Ident(name) => {
                if self.ctx.base_index(&name).is_none() && self.ctx.field_index(&name).is_none() {
                    return self.err(format!("undeclared identifier `{name}`"));
                }
                Ok(DiffPoly::from_symbol(self.variable()?))
            }
            Tok::End => self.err("unexpected end of expression"),
            other => self.err(format!("unexpected token {other:?}")),
        }
    }
}

/// Parses an expression against a context.
pub fn parse(ctx: &JetContext, text: &str) -> Result<DiffPoly> {
    let Lexer { toks } = lex(text)?;
    let mut p = Parser { ctx, toks, pos: 0 };
    let e = p.expr()?;
    if *p.peek() != Tok::End {
        return p.err("unexpected trailing input");
    }
    Ok(e)
}

/// A product of named generators with a coefficient, before normalization.
#[derive(Clone, Debug)]
pub struct RawTerm {
    pub coefficient: Rational,
    pub factors: Vec<String>,
}

/// Normalizes a list of raw products: commutes even generators, applies
/// Koszul signs to odd ones, and drops repeated odd generators.
pub fn canonicalize(ctx: &JetContext, raw: &[RawTerm]) -> Result<DiffPoly> {
    let mut out = DiffPoly::zero();
    for term in raw {
        let mut acc = DiffPoly::constant(term.coefficient.clone());
        for name in &term.factors {
            let Lexer { toks } = lex(name)?;
            let mut p = Parser { ctx, toks, pos: 0 };
            let g = match p.atom() {
                Ok(g) if *p.peek() == Tok::End && g.len() == 1 => g,
                _ => return Err(Error::UndeclaredGenerator(name.clone())),
            };
            acc = &acc * &g;
        }
        out += acc;
    }
    Ok(out)
}

fn counts_text(sigma: &MultiIndex) -> String {
    let inner: Vec<String> = sigma.counts().iter().map(|c| c.to_string()).collect();
    format!("[{}]", inner.join(","))
}

fn symbol_text(ctx: &JetContext, s: &Symbol) -> String {
    match s {
        Symbol::Base(i) => ctx.base_names()[*i as usize].clone(),
        Symbol::Jet(f, sigma) => {
            let name = &ctx.field(f.index as usize).name;
            if sigma.is_zero() {
                name.clone()
            } else {
                format!("{name}_{}", counts_text(sigma))
            }
        }
        Symbol::Dx(i) => format!("dx({})", ctx.base_names()[*i as usize]),
        Symbol::Theta(f, sigma) => {
            let name = &ctx.field(f.index as usize).name;
            if sigma.is_zero() {
                format!("th({name})")
            } else {
                format!("th({name},{})", counts_text(sigma))
            }
        }
    }
}

fn rational_text(c: &Rational) -> String {
    if c.is_integer() {
        c.numer().to_string()
    } else {
        format!("{}/{}", c.numer(), c.denom())
    }
}

fn monomial_text(ctx: &JetContext, m: &Monomial) -> String {
    let (coef, form) = m.split_form();
    let part = |m: &Monomial, sep: &str| {
        m.factors()
            .iter()
            .map(|(s, e)| {
                let t = symbol_text(ctx, s);
                if *e > 1 {
                    format!("{t}^{e}")
                } else {
                    t
                }
            })
            .collect::<Vec<_>>()
            .join(sep)
    };
    let a = part(&coef, "*");
    let b = part(&form, "^");
    match (a.is_empty(), b.is_empty()) {
        (true, true) => String::new(),
        (false, true) => a,
        (true, false) => b,
        (false, false) => format!("{a}*{b}"),
    }
}

/// Canonical text of a polynomial or form; parses back to the same value.
pub fn print(ctx: &JetContext, p: &DiffPoly) -> String {
    if p.is_zero() {
        return "0".into();
    }
    let mut out = String::new();
    for (k, (m, c)) in p.terms().enumerate() {
        let negative = c.is_negative();
        let abs = c.abs();
        if k == 0 {
            if negative {
                out.push('-');
            }
        } else {
            out.push_str(if negative { " - " } else { " + " });
        }
        let body = monomial_text(ctx, m);
        if body.is_empty() {
            out.push_str(&rational_text(&abs));
        } else if abs.is_one() {
            out.push_str(&body);
        } else {
            let _ = write!(out, "{}*{body}", rational_text(&abs));
        }
    }
    out
}

fn latex_name(name: &str) -> String {
    if name.len() == 1 {
        name.to_string()
    } else {
        format!("\\mathrm{{{name}}}")
    }
}

fn latex_derivs(ctx: &JetContext, sigma: &MultiIndex) -> String {
    let mut out = Vec::new();
    for (i, &c) in sigma.counts().iter().enumerate() {
        for _ in 0..c {
            out.push(latex_name(&ctx.base_names()[i]));
        }
    }
    let single = ctx.base_names().iter().all(|b| b.len() == 1);
    out.join(if single { "" } else { " " })
}

fn latex_symbol(ctx: &JetContext, s: &Symbol) -> String {
    match s {
        Symbol::Base(i) => latex_name(&ctx.base_names()[*i as usize]),
        Symbol::Jet(f, sigma) => {
            let name = latex_name(&ctx.field(f.index as usize).name);
            if sigma.is_zero() {
                name
            } else {
                format!("{name}_{{{}}}", latex_derivs(ctx, sigma))
            }
        }
        Symbol::Dx(i) => format!("d{}", latex_name(&ctx.base_names()[*i as usize])),
        Symbol::Theta(f, sigma) => {
            let name = latex_name(&ctx.field(f.index as usize).name);
            if sigma.is_zero() {
                format!("\\theta^{{{name}}}")
            } else {
                format!("\\theta^{{{name}}}_{{{}}}", latex_derivs(ctx, sigma))
            }
        }
    }
}

fn latex_rational(c: &Rational) -> String {
    if c.is_integer() {
        c.numer().to_string()
    } else {
        format!("\\frac{{{}}}{{{}}}", c.numer(), c.denom())
    }
}

/// Presentation-only LaTeX rendering of the canonical form.
pub fn latex(ctx: &JetContext, p: &DiffPoly) -> String {
    if p.is_zero() {
        return "0".into();
    }
    let mut out = String::new();
    for (k, (m, c)) in p.terms().enumerate() {
        let negative = c.is_negative();
        let abs = c.abs();
        if k == 0 {
            if negative {
                out.push('-');
            }
        } else {
            out.push_str(if negative { " - " } else { " + " });
        }
        let (coef, form) = m.split_form();
        let render = |m: &Monomial| -> Vec<String> {
            m.factors()
                .iter()
                .map(|(s, e)| {
                    let t = latex_symbol(ctx, s);
                    if *e > 1 {
                        format!("{t}^{{{e}}}")
                    } else {
                        t
                    }
                })
                .collect()
        };
        let mut pieces = Vec::new();
        if !abs.is_one() || m.is_one() {
            pieces.push(latex_rational(&abs));
        }
        let coef_part = render(&coef);
        if !coef_part.is_empty() {
            pieces.push(coef_part.join(" "));
        }
        let form_part = render(&form);
        if !form_part.is_empty() {
            pieces.push(form_part.join("\\wedge "));
        }
        out.push_str(&pieces.join(" "));
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::jetalg::{ratio, FieldDecl};

    fn ctx1() -> JetContext {
        JetContext::new(vec!["x".into()], vec![FieldDecl::new("u", 0)]).unwrap()
    }

    fn ctx2() -> JetContext {
        JetContext::new(vec!["t".into(), "x".into()], vec![FieldDecl::new("u", 0)]).unwrap()
    }

    #[test]
    fn sugar_and_brackets_agree() {
        let ctx = ctx2();
        assert_eq!(parse(&ctx, "u_tx").unwrap(), parse(&ctx, "u_[1,1]").unwrap());
        assert_eq!(parse(&ctx, "u_xt").unwrap(), ctx.jet(0, &[1, 1]));
    }

    #[test]
    fn arity_is_checked() {
        let err = parse(&ctx1(), "u_[1,0]").unwrap_err();
        assert!(matches!(err, Error::Parse { message, .. } if message.contains("arity")));
    }

    #[test]
    fn undeclared_names_are_positioned() {
        let err = parse(&ctx1(), "u + v").unwrap_err();
        assert!(matches!(err, Error::Parse { line: 1, column: 5, .. }));
    }

    #[test]
    fn printing_is_canonical() {
        let ctx = ctx1();
        let p = parse(&ctx, "1/2*u_x^2 - u_xx").unwrap();
        assert_eq!(print(&ctx, &p), "1/2*u_[1]^2 - u_[2]");
        assert_eq!(parse(&ctx, &print(&ctx, &p)).unwrap(), p);
        assert_eq!(parse(&ctx, "3/6").unwrap(), DiffPoly::constant(ratio(1, 2)));
    }

    #[test]
    fn forms_print_with_wedges() {
        let ctx = ctx2();
        let w = parse(&ctx, "dx(x)^dx(t)*u").unwrap();
        assert_eq!(print(&ctx, &w), "-u*dx(t)^dx(x)");
        assert_eq!(latex(&ctx, &parse(&ctx, "dx(t)^dx(x)").unwrap()), "dt\\wedge dx");
    }

    #[test]
    fn latex_examples() {
        let ctx = ctx1();
        assert_eq!(latex(&ctx, &parse(&ctx, "-u_[2]").unwrap()), "-u_{xx}");
        assert_eq!(latex(&ctx, &parse(&ctx, "th(u,[1])").unwrap()), "\\theta^{u}_{x}");
    }

    #[test]
    fn canonicalize_examples() {
        let ctx = JetContext::new(
            vec!["x".into()],
            vec![FieldDecl::new("u", 0), FieldDecl::new("a", 1), FieldDecl::new("b", 1)],
        )
        .unwrap();
        let raw = |c: i64, f: &[&str]| RawTerm {
            coefficient: Rational::from_integer(c.into()),
            factors: f.iter().map(|s| s.to_string()).collect(),
        };
        let two_xu = canonicalize(&ctx, &[raw(1, &["u", "x"]), raw(1, &["x", "u"])]).unwrap();
        assert_eq!(print(&ctx, &two_xu), "2*x*u");
        assert!(canonicalize(&ctx, &[raw(1, &["a", "a"])]).unwrap().is_zero());
        let ba = canonicalize(&ctx, &[raw(1, &["b", "a"])]).unwrap();
        assert_eq!(print(&ctx, &ba), "-a*b");
        assert!(matches!(
            canonicalize(&ctx, &[raw(1, &["v"])]),
            Err(Error::UndeclaredGenerator(_))
        ));
    }
}
