use alloc::boxed::Box;
use alloc::format;
use alloc::string::{String, ToString};
use alloc::vec::Vec;

use super::{Exponent, Formula, Sort, Term};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("parse error at offset {offset}: {message}")]
pub struct ParseError {
    /// Byte offset into the input.
    pub offset: usize,
    pub message: String,
}

#[derive(Debug, Clone, PartialEq, Eq)]
enum Tok {
    Ident(String),
    Int(u64),
    Sym(&'static str),
    End,
}

const SYMBOLS: [&str; 19] = [
    "/\\", "\\/", "=>", "..", "~", "=", "(", ")", "[", "]", "{", "}", ":", ".", ",", ";", "+", "*", "^",
];

const KEYWORDS: [&str; 8] = ["forall", "exists", "in", "true", "false", "box", "bigvee", "bigand"];

fn lex(input: &str) -> Result<Vec<(Tok, usize)>, ParseError> {
    let bytes = input.as_bytes();
    let mut out = Vec::new();
    let mut i = 0;
    'outer: while i < bytes.len() {
        let c = bytes[i];
        if c.is_ascii_whitespace() {
            i += 1;
            continue;
        }
        if c.is_ascii_alphabetic() || c == b'_' {
            let start = i;
            while i < bytes.len() && (bytes[i].is_ascii_alphanumeric() || bytes[i] == b'_' || bytes[i] == b'\'') {
                i += 1;
            }
            out.push((Tok::Ident(input[start..i].to_string()), start));
            continue;
        }
        if c.is_ascii_digit() {
            let start = i;
            while i < bytes.len() && bytes[i].is_ascii_digit() {
                i += 1;
            }
            let value = input[start..i]
                .parse()
                .map_err(|_| ParseError { offset: start, message: "integer literal too large".to_string() })?;
            out.push((Tok::Int(value), start));
            continue;
        }
        for s in SYMBOLS {
            if input[i..].starts_with(s) {
                out.push((Tok::Sym(s), i));
                i += s.len();
                continue 'outer;
            }
        }
        let ch = input[i..].chars().next().unwrap_or('?');
        return Err(ParseError { offset: i, message: format!("unexpected character `{ch}`") });
    }
    out.push((Tok::End, input.len()));
    Ok(out)
}

/// Parse a formula. Quantifier-bound identifiers become [`Term::Var`] with
/// the binder's sort; every other identifier becomes [`Term::Const`].
pub fn parse(input: &str) -> Result<Formula, ParseError> {
    let toks = lex(input)?;
    let mut p = Parser { toks, pos: 0, scope: Vec::new(), furthest: None };
    let result = p.formula().and_then(|f| {
        if p.peek() == &Tok::End {
            Ok(f)
        } else {
            Err(p.error("unexpected trailing input"))
        }
    });
    result.map_err(|e| match p.furthest.take() {
        Some(f) if f.offset > e.offset => f,
        _ => e,
    })
}

struct Parser {
    toks: Vec<(Tok, usize)>,
    pos: usize,
    scope: Vec<(String, Sort)>,
    furthest: Option<ParseError>,
}

type PResult<T> = Result<T, ParseError>;

impl Parser {
    fn peek(&self) -> &Tok {
        &self.toks[self.pos].0
    }

    fn peek_at(&self, k: usize) -> &Tok {
        &self.toks[(self.pos + k).min(self.toks.len() - 1)].0
    }

    fn offset(&self) -> usize {
        self.toks[self.pos].1
    }

    fn bump(&mut self) -> Tok {
        let t = self.toks[self.pos].0.clone();
        if self.pos + 1 < self.toks.len() {
            self.pos += 1;
        }
        t
    }

    fn error(&self, message: &str) -> ParseError {
        let found = match self.peek() {
            Tok::Ident(s) => format!("`{s}`"),
            Tok::Int(n) => format!("`{n}`"),
            Tok::Sym(s) => format!("`{s}`"),
            Tok::End => "end of input".to_string(),
        };
        ParseError { offset: self.offset(), message: format!("{message}, found {found}") }
    }

    fn remember(&mut self, e: &ParseError) {
        if self.furthest.as_ref().is_none_or(|f| e.offset > f.offset) {
            self.furthest = Some(e.clone());
        }
    }

    fn is_sym(&self, s: &str) -> bool {
        matches!(self.peek(), Tok::Sym(t) if *t == s)
    }

    fn is_kw(&self, k: &str) -> bool {
        matches!(self.peek(), Tok::Ident(t) if t == k)
    }

    fn expect_sym(&mut self, s: &str) -> PResult<()> {
        if self.is_sym(s) {
            self.bump();
            Ok(())
        } else {
            Err(self.error(&format!("expected `{s}`")))
        }
    }

    fn ident(&mut self) -> PResult<String> {
        match self.peek().clone() {
            Tok::Ident(s) if !KEYWORDS.contains(&s.as_str()) => {
                self.bump();
                Ok(s)
            }
            _ => Err(self.error("expected an identifier")),
        }
    }

    fn int(&mut self) -> PResult<u64> {
        match self.peek().clone() {
            Tok::Int(n) => {
                self.bump();
                Ok(n)
            }
            _ => Err(self.error("expected an integer")),
        }
    }

    fn small_int(&mut self) -> PResult<u32> {
        let at = self.offset();
        let n = self.int()?;
        u32::try_from(n).map_err(|_| ParseError { offset: at, message: "integer out of range".to_string() })
    }

    // formula := quant | schema | disj ("=>" formula)?
    fn formula(&mut self) -> PResult<Formula> {
        if self.is_kw("forall") || self.is_kw("exists") {
            return self.quantifier();
        }
        if (self.is_kw("bigvee") || self.is_kw("bigand")) && self.peek_at(1) == &Tok::Sym("[") {
            return self.schema();
        }
        let lhs = self.disj()?;
        if self.is_sym("=>") {
            self.bump();
            let rhs = self.formula()?;
            return Ok(Formula::implies(lhs, rhs));
        }
        Ok(lhs)
    }

    fn quantifier(&mut self) -> PResult<Formula> {
        let universal = self.is_kw("forall");
        self.bump();
        let mut names = Vec::new();
        loop {
            names.push(self.ident()?);
            if self.is_sym(",") {
                self.bump();
            } else {
                break;
            }
        }
        self.expect_sym(":")?;
        let sort = self.sort()?;
        self.expect_sym(".")?;
        for n in &names {
            self.scope.push((n.clone(), sort.clone()));
        }
        let body = self.formula();
        self.scope.truncate(self.scope.len() - names.len());
        let mut body = body?;
        for n in names.into_iter().rev() {
            body = if universal {
                Formula::Forall(n, sort.clone(), Box::new(body))
            } else {
                Formula::Exists(n, sort.clone(), Box::new(body))
            };
        }
        Ok(body)
    }

    fn schema(&mut self) -> PResult<Formula> {
        let disjunctive = self.is_kw("bigvee");
        self.bump();
        self.expect_sym("[")?;
        let index = self.ident()?;
        self.expect_sym("=")?;
        let lo = self.small_int()?;
        self.expect_sym("..")?;
        let hi = if matches!(self.peek(), Tok::Int(_)) { Some(self.small_int()?) } else { None };
        self.expect_sym("]")?;
        let body = self.formula()?;
        Ok(Formula::Schema { disjunctive, index, lo, hi, body: Box::new(body) })
    }

    fn sort(&mut self) -> PResult<Sort> {
        if self.is_kw("Omega") {
            self.bump();
            return Ok(Sort::Omega);
        }
        if self.is_kw("P") && self.peek_at(1) == &Tok::Sym("(") {
            self.bump();
            self.bump();
            let inner = self.sort()?;
            self.expect_sym(")")?;
            return Ok(Sort::power(inner));
        }
        Ok(Sort::Named(self.ident()?))
    }

    fn disj(&mut self) -> PResult<Formula> {
        let mut f = self.conj()?;
        while self.is_sym("\\/") {
            self.bump();
            f = Formula::or(f, self.conj()?);
        }
        Ok(f)
    }

    fn conj(&mut self) -> PResult<Formula> {
        let mut f = self.atom()?;
        while self.is_sym("/\\") {
            self.bump();
            f = Formula::and(f, self.atom()?);
        }
        Ok(f)
    }

    fn atom(&mut self) -> PResult<Formula> {
        // A binder in operand position extends as far right as possible.
        if self.is_kw("forall") || self.is_kw("exists") {
            return self.quantifier();
        }
        if (self.is_kw("bigvee") || self.is_kw("bigand")) && self.peek_at(1) == &Tok::Sym("[") {
            return self.schema();
        }
        if self.is_sym("~") {
            self.bump();
            return Ok(Formula::not(self.atom()?));
        }
        if self.is_kw("box") {
            self.bump();
            self.expect_sym("[")?;
            let j = self.ident()?;
            self.expect_sym("]")?;
            return Ok(Formula::modal(&j, self.atom()?));
        }
        if self.is_kw("true") {
            self.bump();
            return Ok(Formula::Top);
        }
        if self.is_kw("false") {
            self.bump();
            return Ok(Formula::Bot);
        }
        if (self.is_kw("bigvee") || self.is_kw("bigand")) && self.peek_at(1) == &Tok::Sym("{") {
            let disjunctive = self.is_kw("bigvee");
            self.bump();
            self.bump();
            let mut items = Vec::new();
            if !self.is_sym("}") {
                loop {
                    items.push(self.formula()?);
                    if self.is_sym(";") {
                        self.bump();
                    } else {
                        break;
                    }
                }
            }
            self.expect_sym("}")?;
            return Ok(if disjunctive { Formula::BigOr(items) } else { Formula::BigAnd(items) });
        }
        if self.is_sym("(") {
            let save = self.pos;
            self.bump();
            match self.formula().and_then(|f| self.expect_sym(")").map(|_| f)) {
                Ok(f) if !self.continues_term() => return Ok(f),
                Ok(_) => {}
                Err(e) => self.remember(&e),
            }
            self.pos = save;
        }
        self.term_atom()
    }

    /// After a parenthesized group, these tokens mean it was a term.
    fn continues_term(&self) -> bool {
        self.is_sym("=") || self.is_sym("+") || self.is_sym("*") || self.is_sym("^") || self.is_kw("in")
    }

    fn term_atom(&mut self) -> PResult<Formula> {
        let start = self.offset();
        let t = self.term()?;
        if self.is_sym("=") {
            self.bump();
            let rhs = self.term()?;
            return Ok(Formula::Eq(t, rhs));
        }
        if self.is_kw("in") {
            self.bump();
            let set = self.ident()?;
            return Ok(Formula::Member(t, self.resolve(set)));
        }
        match t {
            Term::Const(_) | Term::Var(..) => Ok(Formula::Prop(t)),
            Term::App(name, mut args) if args.len() == 1 => Ok(Formula::Member(args.pop().unwrap(), self.resolve(name))),
            _ => {
                let e = self.error("expected `=` or `in` after term");
                Err(if e.offset > start { e } else { ParseError { offset: start, message: e.message } })
            }
        }
    }

    fn resolve(&self, name: String) -> Term {
        match self.scope.iter().rev().find(|(n, _)| *n == name) {
            Some((_, s)) => Term::Var(name, s.clone()),
            None => Term::Const(name),
        }
    }

    fn term(&mut self) -> PResult<Term> {
        let mut t = self.product()?;
        while self.is_sym("+") {
            self.bump();
            t = Term::Add(Box::new(t), Box::new(self.product()?));
        }
        Ok(t)
    }

    fn product(&mut self) -> PResult<Term> {
        let mut t = self.power()?;
        while self.is_sym("*") {
            self.bump();
            t = Term::Mul(Box::new(t), Box::new(self.power()?));
        }
        Ok(t)
    }

    fn power(&mut self) -> PResult<Term> {
        let mut t = self.primary()?;
        while self.is_sym("^") {
            self.bump();
            let e = match self.peek().clone() {
                Tok::Int(_) => Exponent::Lit(self.small_int()?),
                _ => Exponent::Index(self.ident()?),
            };
            t = Term::Pow(Box::new(t), e);
        }
        Ok(t)
    }

    fn primary(&mut self) -> PResult<Term> {
        match self.peek().clone() {
            Tok::Int(n) => {
                self.bump();
                Ok(Term::Num(n))
            }
            Tok::Sym("(") => {
                self.bump();
                let t = self.term()?;
                self.expect_sym(")")?;
                Ok(t)
            }
            Tok::Ident(_) => {
                let name = self.ident()?;
                if self.is_sym("(") {
                    self.bump();
                    let mut args = Vec::new();
                    if !self.is_sym(")") {
                        loop {
                            args.push(self.term()?);
                            if self.is_sym(",") {
                                self.bump();
                            } else {
                                break;
                            }
                        }
                    }
                    self.expect_sym(")")?;
                    return Ok(Term::App(name, args));
                }
                Ok(self.resolve(name))
            }
            _ => Err(self.error("expected a term")),
        }
    }
}
