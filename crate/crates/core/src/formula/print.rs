use core::fmt::{self, Display, Formatter, Write};

use super::{Exponent, Formula, Sort, Term};

impl Display for Sort {
    fn fmt(&self, f: &mut Formatter<'_>) -> fmt::Result {
        match self {
            Sort::Named(n) => f.write_str(n),
            Sort::Omega => f.write_str("Omega"),
            Sort::Power(s) => write!(f, "P({s})"),
        }
    }
}

impl Display for Exponent {
    fn fmt(&self, f: &mut Formatter<'_>) -> fmt::Result {
        match self {
            Exponent::Lit(n) => write!(f, "{n}"),
            Exponent::Index(i) => f.write_str(i),
        }
    }
}

// Term precedence: 0 sum, 1 product, 2 power operand.
fn term(t: &Term, level: u8, f: &mut Formatter<'_>) -> fmt::Result {
    let wrap = |needs: bool, f: &mut Formatter<'_>, body: &dyn Fn(&mut Formatter<'_>) -> fmt::Result| {
        if needs {
            f.write_char('(')?;
            body(f)?;
            f.write_char(')')
        } else {
            body(f)
        }
    };
    match t {
        Term::Var(x, _) | Term::Const(x) => f.write_str(x),
        Term::Num(n) => write!(f, "{n}"),
        Term::App(name, args) => {
            write!(f, "{name}(")?;
            for (i, a) in args.iter().enumerate() {
                if i > 0 {
                    f.write_str(", ")?;
                }
                term(a, 0, f)?;
            }
            f.write_char(')')
        }
        Term::Add(a, b) => wrap(level > 0, f, &|f| {
            term(a, 0, f)?;
            f.write_str(" + ")?;
            term(b, 1, f)
        }),
        Term::Mul(a, b) => wrap(level > 1, f, &|f| {
            term(a, 1, f)?;
            f.write_char('*')?;
            term(b, 2, f)
        }),
        Term::Pow(a, e) => wrap(level > 2, f, &|f| {
            term(a, 3, f)?;
            write!(f, "^{e}")
        }),
    }
}

impl Display for Term {
    fn fmt(&self, f: &mut Formatter<'_>) -> fmt::Result {
        term(self, 0, f)
    }
}

/// Operands of `~` and `box[j]` are printed bare only when they are
/// themselves unary or constant.
fn bare_operand(phi: &Formula) -> bool {
    matches!(phi, Formula::Top | Formula::Bot | Formula::Modal(..)) || phi.as_negation().is_some() || matches!(phi, Formula::Prop(_))
}

// Formula precedence: 0 implication/binder, 1 disjunction, 2 conjunction, 3 atom.
fn formula(phi: &Formula, level: u8, f: &mut Formatter<'_>) -> fmt::Result {
    let open = |needs: bool, f: &mut Formatter<'_>| if needs { f.write_char('(') } else { Ok(()) };
    let close = |needs: bool, f: &mut Formatter<'_>| if needs { f.write_char(')') } else { Ok(()) };
    if let Some(inner) = phi.as_negation() {
        f.write_char('~')?;
        return unary_operand(inner, f);
    }
    match phi {
        Formula::Top => f.write_str("true"),
        Formula::Bot => f.write_str("false"),
        Formula::Eq(a, b) => write!(f, "{a}={b}"),
        Formula::Member(t, s) => write!(f, "{t} in {s}"),
        Formula::Prop(t) => write!(f, "{t}"),
        Formula::Modal(j, inner) => {
            write!(f, "box[{j}]")?;
            unary_operand(inner, f)
        }
        Formula::And(a, b) => {
            open(level > 2, f)?;
            formula(a, 2, f)?;
            f.write_str(" /\\ ")?;
            formula(b, 3, f)?;
            close(level > 2, f)
        }
        Formula::Or(a, b) => {
            open(level > 1, f)?;
            formula(a, 1, f)?;
            f.write_str(" \\/ ")?;
            formula(b, 2, f)?;
            close(level > 1, f)
        }
        Formula::Implies(a, b) => {
            open(level > 0, f)?;
            formula(a, 1, f)?;
            f.write_str(" => ")?;
            formula(b, 0, f)?;
            close(level > 0, f)
        }
        Formula::BigAnd(items) | Formula::BigOr(items) => {
            f.write_str(if matches!(phi, Formula::BigOr(_)) { "bigvee{" } else { "bigand{" })?;
            for (i, item) in items.iter().enumerate() {
                if i > 0 {
                    f.write_str("; ")?;
                }
                formula(item, 0, f)?;
            }
            f.write_char('}')
        }
        Formula::Schema { disjunctive, index, lo, hi, body } => {
            open(level > 0, f)?;
            write!(f, "{}[{index}={lo}..", if *disjunctive { "bigvee" } else { "bigand" })?;
            if let Some(h) = hi {
                write!(f, "{h}")?;
            }
            f.write_str("] ")?;
            formula(body, 0, f)?;
            close(level > 0, f)
        }
        Formula::Forall(x, s, body) | Formula::Exists(x, s, body) => {
            open(level > 0, f)?;
            let q = if matches!(phi, Formula::Forall(..)) { "forall" } else { "exists" };
            write!(f, "{q} {x}:{s}. ")?;
            formula(body, 0, f)?;
            close(level > 0, f)
        }
    }
}

fn unary_operand(inner: &Formula, f: &mut Formatter<'_>) -> fmt::Result {
    if bare_operand(inner) {
        formula(inner, 3, f)
    } else {
        f.write_char('(')?;
        formula(inner, 0, f)?;
        f.write_char(')')
    }
}

impl Display for Formula {
    fn fmt(&self, f: &mut Formatter<'_>) -> fmt::Result {
        formula(self, 0, f)
    }
}
