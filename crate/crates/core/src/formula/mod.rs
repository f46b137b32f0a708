//! The formula language: multi-sorted intuitionistic first-order logic with
//! finite big connectives, bounded schemas and named modal operators.
//!
//! Negation is not a separate node: `~φ` parses to `φ => false`, and the
//! printer renders any implication into `false` as a negation.

mod parse;
mod print;
mod translate;

pub use parse::{parse, ParseError};
pub use translate::{box_translate, negneg_translate, TranslationResult};

use alloc::boxed::Box;
use alloc::collections::BTreeSet;
use alloc::string::{String, ToString};
use alloc::vec::Vec;

/// The sort of a variable: a named sheaf, the truth values `Omega`, or a
/// power object `P(sort)`.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Sort {
    Named(String),
    Omega,
    Power(Box<Sort>),
}

impl Sort {
    pub fn named(name: &str) -> Sort {
        Sort::Named(name.to_string())
    }

    pub fn power(of: Sort) -> Sort {
        Sort::Power(Box::new(of))
    }
}

/// Exponent of a power term: a literal or the index of an enclosing schema.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Exponent {
    Lit(u32),
    Index(String),
}

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Term {
    /// A bound or free variable with its sort.
    Var(String, Sort),
    /// A name resolved in the environment: a global section, subsheaf,
    /// named open, or sheaf-valued constant.
    Const(String),
    /// A function symbol applied to arguments.
    App(String, Vec<Term>),
    /// `k · 1` in a ring sheaf (or `0` in a module sheaf).
    Num(u64),
    Add(Box<Term>, Box<Term>),
    Mul(Box<Term>, Box<Term>),
    Pow(Box<Term>, Exponent),
}

impl Term {
    pub fn var(name: &str, sort: Sort) -> Term {
        Term::Var(name.to_string(), sort)
    }

    pub fn constant(name: &str) -> Term {
        Term::Const(name.to_string())
    }

    pub fn app(f: &str, args: Vec<Term>) -> Term {
        Term::App(f.to_string(), args)
    }

    fn collect_free(&self, out: &mut BTreeSet<(String, Sort)>, bound: &[String]) {
        match self {
            Term::Var(x, s) => {
                if !bound.contains(x) {
                    out.insert((x.clone(), s.clone()));
                }
            }
            Term::Const(_) | Term::Num(_) => {}
            Term::App(_, args) => args.iter().for_each(|a| a.collect_free(out, bound)),
            Term::Add(a, b) | Term::Mul(a, b) => {
                a.collect_free(out, bound);
                b.collect_free(out, bound);
            }
            Term::Pow(a, _) => a.collect_free(out, bound),
        }
    }

    fn mentions(&self, name: &str) -> bool {
        match self {
            Term::Var(x, _) => x == name,
            Term::Const(_) | Term::Num(_) => false,
            Term::App(_, args) => args.iter().any(|a| a.mentions(name)),
            Term::Add(a, b) | Term::Mul(a, b) => a.mentions(name) || b.mentions(name),
            Term::Pow(a, _) => a.mentions(name),
        }
    }

    fn subst(&self, v: &str, t: &Term) -> Term {
        match self {
            Term::Var(x, _) if x == v => t.clone(),
            Term::Var(..) | Term::Const(_) | Term::Num(_) => self.clone(),
            Term::App(f, args) => Term::App(f.clone(), args.iter().map(|a| a.subst(v, t)).collect()),
            Term::Add(a, b) => Term::Add(Box::new(a.subst(v, t)), Box::new(b.subst(v, t))),
            Term::Mul(a, b) => Term::Mul(Box::new(a.subst(v, t)), Box::new(b.subst(v, t))),
            Term::Pow(a, e) => Term::Pow(Box::new(a.subst(v, t)), e.clone()),
        }
    }

    pub(crate) fn instantiate_index(&self, index: &str, value: u32) -> Term {
        match self {
            Term::Pow(a, Exponent::Index(i)) if i == index => {
                Term::Pow(Box::new(a.instantiate_index(index, value)), Exponent::Lit(value))
            }
            Term::Pow(a, e) => Term::Pow(Box::new(a.instantiate_index(index, value)), e.clone()),
            Term::App(f, args) => Term::App(f.clone(), args.iter().map(|a| a.instantiate_index(index, value)).collect()),
            Term::Add(a, b) => Term::Add(Box::new(a.instantiate_index(index, value)), Box::new(b.instantiate_index(index, value))),
            Term::Mul(a, b) => Term::Mul(Box::new(a.instantiate_index(index, value)), Box::new(b.instantiate_index(index, value))),
            _ => self.clone(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Formula {
    Top,
    Bot,
    Eq(Term, Term),
    /// `t ∈ S` for a subsheaf name or a term of power sort.
    Member(Term, Term),
    /// A propositional constant: a named open, or a term of sort `Omega`.
    Prop(Term),
    And(Box<Formula>, Box<Formula>),
    Or(Box<Formula>, Box<Formula>),
    BigAnd(Vec<Formula>),
    BigOr(Vec<Formula>),
    /// `bigvee[n=lo..hi] body` (or `bigand`); a missing `hi` takes the
    /// environment's default bound.
    Schema { disjunctive: bool, index: String, lo: u32, hi: Option<u32>, body: Box<Formula> },
    Implies(Box<Formula>, Box<Formula>),
    Forall(String, Sort, Box<Formula>),
    Exists(String, Sort, Box<Formula>),
    Modal(String, Box<Formula>),
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum SubstError {
    #[error("cannot substitute a term of sort {found:?} for variable `{var}` of sort {expected:?}")]
    SortMismatch { var: String, expected: Sort, found: Sort },
}

impl Formula {
    pub fn eq(a: Term, b: Term) -> Formula {
        Formula::Eq(a, b)
    }

    pub fn and(a: Formula, b: Formula) -> Formula {
        Formula::And(Box::new(a), Box::new(b))
    }

    pub fn or(a: Formula, b: Formula) -> Formula {
        Formula::Or(Box::new(a), Box::new(b))
    }

    pub fn implies(a: Formula, b: Formula) -> Formula {
        Formula::Implies(Box::new(a), Box::new(b))
    }

    /// `¬φ`, i.e. `φ ⇒ ⊥`.
    pub fn not(a: Formula) -> Formula {
        Formula::implies(a, Formula::Bot)
    }

    pub fn iff(a: Formula, b: Formula) -> Formula {
        Formula::and(Formula::implies(a.clone(), b.clone()), Formula::implies(b, a))
    }

    pub fn forall(x: &str, s: Sort, body: Formula) -> Formula {
        Formula::Forall(x.to_string(), s, Box::new(body))
    }

    pub fn exists(x: &str, s: Sort, body: Formula) -> Formula {
        Formula::Exists(x.to_string(), s, Box::new(body))
    }

    pub fn modal(j: &str, body: Formula) -> Formula {
        Formula::Modal(j.to_string(), Box::new(body))
    }

    pub fn member(t: Term, set: &str) -> Formula {
        Formula::Member(t, Term::Const(set.to_string()))
    }

    pub fn prop(name: &str) -> Formula {
        Formula::Prop(Term::Const(name.to_string()))
    }

    /// `∃!x. φ`, spelled as `∃x. φ(x) ∧ ∀y. φ(y) ⇒ y = x`.
    pub fn exists_unique(x: &str, s: Sort, body: Formula) -> Formula {
        let fresh = fresh_name(x, &|n| body.mentions_name(n));
        let other = body.substitute(x, &Term::Var(fresh.clone(), s.clone())).expect("same sort");
        let uniq = Formula::forall(
            &fresh,
            s.clone(),
            Formula::implies(other, Formula::Eq(Term::Var(fresh.clone(), s.clone()), Term::Var(x.to_string(), s.clone()))),
        );
        Formula::exists(x, s, Formula::and(body, uniq))
    }

    /// `φ` is `ψ ⇒ ⊥` for some `ψ`.
    pub fn as_negation(&self) -> Option<&Formula> {
        match self {
            Formula::Implies(a, b) if **b == Formula::Bot => Some(a),
            _ => None,
        }
    }

    /// Free variables with their sorts.
    pub fn free_vars(&self) -> BTreeSet<(String, Sort)> {
        let mut out = BTreeSet::new();
        self.collect_free(&mut out, &mut Vec::new());
        out
    }

    fn collect_free(&self, out: &mut BTreeSet<(String, Sort)>, bound: &mut Vec<String>) {
        match self {
            Formula::Top | Formula::Bot => {}
            Formula::Eq(a, b) | Formula::Member(a, b) => {
                a.collect_free(out, bound);
                b.collect_free(out, bound);
            }
            Formula::Prop(t) => t.collect_free(out, bound),
            Formula::And(a, b) | Formula::Or(a, b) | Formula::Implies(a, b) => {
                a.collect_free(out, bound);
                b.collect_free(out, bound);
            }
            Formula::BigAnd(fs) | Formula::BigOr(fs) => fs.iter().for_each(|f| f.collect_free(out, bound)),
            Formula::Schema { body, .. } | Formula::Modal(_, body) => body.collect_free(out, bound),
            Formula::Forall(x, _, body) | Formula::Exists(x, _, body) => {
                bound.push(x.clone());
                body.collect_free(out, bound);
                bound.pop();
            }
        }
    }

    fn mentions_name(&self, name: &str) -> bool {
        match self {
            Formula::Top | Formula::Bot => false,
            Formula::Eq(a, b) | Formula::Member(a, b) => a.mentions(name) || b.mentions(name),
            Formula::Prop(t) => t.mentions(name),
            Formula::And(a, b) | Formula::Or(a, b) | Formula::Implies(a, b) => a.mentions_name(name) || b.mentions_name(name),
            Formula::BigAnd(fs) | Formula::BigOr(fs) => fs.iter().any(|f| f.mentions_name(name)),
            Formula::Schema { body, .. } | Formula::Modal(_, body) => body.mentions_name(name),
            Formula::Forall(x, _, body) | Formula::Exists(x, _, body) => x == name || body.mentions_name(name),
        }
    }

    /// Capture-avoiding substitution of `t` for the free variable `v`.
    ///
    /// The sort is checked when `t` is itself a variable; other terms are
    /// sort-checked when the formula is compiled against an environment.
    pub fn substitute(&self, v: &str, t: &Term) -> Result<Formula, SubstError> {
        if let Some((_, s)) = self.free_vars().into_iter().find(|(x, _)| x == v) {
            if let Term::Var(_, ts) = t {
                if *ts != s {
                    return Err(SubstError::SortMismatch { var: v.to_string(), expected: s, found: ts.clone() });
                }
            }
        }
        let mut free_in_t = BTreeSet::new();
        t.collect_free(&mut free_in_t, &[]);
        let free_names: Vec<String> = free_in_t.into_iter().map(|(x, _)| x).collect();
        Ok(self.subst(v, t, &free_names))
    }

    fn subst(&self, v: &str, t: &Term, t_free: &[String]) -> Formula {
        let bx = |f: &Formula| Box::new(f.subst(v, t, t_free));
        match self {
            Formula::Top | Formula::Bot => self.clone(),
            Formula::Eq(a, b) => Formula::Eq(a.subst(v, t), b.subst(v, t)),
            Formula::Member(a, b) => Formula::Member(a.subst(v, t), b.subst(v, t)),
            Formula::Prop(a) => Formula::Prop(a.subst(v, t)),
            Formula::And(a, b) => Formula::And(bx(a), bx(b)),
            Formula::Or(a, b) => Formula::Or(bx(a), bx(b)),
            Formula::Implies(a, b) => Formula::Implies(bx(a), bx(b)),
            Formula::BigAnd(fs) => Formula::BigAnd(fs.iter().map(|f| f.subst(v, t, t_free)).collect()),
            Formula::BigOr(fs) => Formula::BigOr(fs.iter().map(|f| f.subst(v, t, t_free)).collect()),
            Formula::Schema { disjunctive, index, lo, hi, body } => Formula::Schema {
                disjunctive: *disjunctive,
                index: index.clone(),
                lo: *lo,
                hi: *hi,
                body: bx(body),
            },
            Formula::Modal(j, body) => Formula::Modal(j.clone(), bx(body)),
            Formula::Forall(x, s, body) | Formula::Exists(x, s, body) => {
                let rebuild = |x: String, body: Formula| match self {
                    Formula::Forall(..) => Formula::Forall(x, s.clone(), Box::new(body)),
                    _ => Formula::Exists(x, s.clone(), Box::new(body)),
                };
                if x == v {
                    return self.clone();
                }
                if t_free.contains(x) && body.free_vars().iter().any(|(y, _)| y == v) {
                    let fresh = fresh_name(x, &|n| t_free.iter().any(|y| y == n) || body.mentions_name(n) || n == v);
                    let renamed = body.subst(x, &Term::Var(fresh.clone(), s.clone()), &[]);
                    return rebuild(fresh, renamed.subst(v, t, t_free));
                }
                rebuild(x.clone(), body.subst(v, t, t_free))
            }
        }
    }

    /// Only `=`, `∈`, propositional constants, `⊤`, `⊥`, `∧`, `∨`, `⋁` and `∃`.
    pub fn is_geometric(&self) -> bool {
        match self {
            Formula::Top | Formula::Bot | Formula::Eq(..) | Formula::Member(..) | Formula::Prop(_) => true,
            Formula::And(a, b) | Formula::Or(a, b) => a.is_geometric() && b.is_geometric(),
            Formula::BigOr(fs) => fs.iter().all(Formula::is_geometric),
            Formula::Schema { disjunctive: true, body, .. } => body.is_geometric(),
            Formula::Exists(_, _, body) => body.is_geometric(),
            Formula::Schema { disjunctive: false, .. }
            | Formula::BigAnd(_)
            | Formula::Implies(..)
            | Formula::Forall(..)
            | Formula::Modal(..) => false,
        }
    }

    /// `∀…∀ (geometric ⇒ geometric)`; a prefix without implication, and a bare
    /// geometric formula, count as implications with antecedent `⊤`.
    pub fn is_geometric_implication(&self) -> bool {
        match self {
            Formula::Forall(_, _, body) => body.is_geometric_implication(),
            Formula::Implies(a, b) => a.is_geometric() && b.is_geometric(),
            other => other.is_geometric(),
        }
    }

    /// Nesting depth of connectives and quantifiers (atoms have depth 0).
    pub fn depth(&self) -> usize {
        match self {
            Formula::Top | Formula::Bot | Formula::Eq(..) | Formula::Member(..) | Formula::Prop(_) => 0,
            Formula::And(a, b) | Formula::Or(a, b) | Formula::Implies(a, b) => 1 + a.depth().max(b.depth()),
            Formula::BigAnd(fs) | Formula::BigOr(fs) => 1 + fs.iter().map(Formula::depth).max().unwrap_or(0),
            Formula::Schema { body, .. } | Formula::Modal(_, body) | Formula::Forall(_, _, body) | Formula::Exists(_, _, body) => {
                1 + body.depth()
            }
        }
    }

    /// Whether any modal node occurs.
    pub fn has_modal(&self) -> bool {
        match self {
            Formula::Modal(..) => true,
            Formula::And(a, b) | Formula::Or(a, b) | Formula::Implies(a, b) => a.has_modal() || b.has_modal(),
            Formula::BigAnd(fs) | Formula::BigOr(fs) => fs.iter().any(Formula::has_modal),
            Formula::Schema { body, .. } | Formula::Forall(_, _, body) | Formula::Exists(_, _, body) => body.has_modal(),
            _ => false,
        }
    }

    /// Whether a `⇒`, `∀`, `⋀` (list or schema) node occurs anywhere.
    pub fn has_non_geometric_connective(&self) -> bool {
        match self {
            Formula::Implies(..) | Formula::Forall(..) | Formula::BigAnd(_) | Formula::Schema { disjunctive: false, .. } => true,
            Formula::And(a, b) | Formula::Or(a, b) => a.has_non_geometric_connective() || b.has_non_geometric_connective(),
            Formula::BigOr(fs) => fs.iter().any(Formula::has_non_geometric_connective),
            Formula::Schema { body, .. } | Formula::Exists(_, _, body) | Formula::Modal(_, body) => body.has_non_geometric_connective(),
            _ => false,
        }
    }

    /// Replaces exponents named `index` by the literal `value`.
    pub fn instantiate_index(&self, index: &str, value: u32) -> Formula {
        let bx = |f: &Formula| Box::new(f.instantiate_index(index, value));
        let t = |t: &Term| t.instantiate_index(index, value);
        match self {
            Formula::Top | Formula::Bot => self.clone(),
            Formula::Eq(a, b) => Formula::Eq(t(a), t(b)),
            Formula::Member(a, b) => Formula::Member(t(a), t(b)),
            Formula::Prop(a) => Formula::Prop(t(a)),
            Formula::And(a, b) => Formula::And(bx(a), bx(b)),
            Formula::Or(a, b) => Formula::Or(bx(a), bx(b)),
            Formula::Implies(a, b) => Formula::Implies(bx(a), bx(b)),
            Formula::BigAnd(fs) => Formula::BigAnd(fs.iter().map(|f| f.instantiate_index(index, value)).collect()),
            Formula::BigOr(fs) => Formula::BigOr(fs.iter().map(|f| f.instantiate_index(index, value)).collect()),
            // An inner schema over the same index shadows it.
            Formula::Schema { index: i, .. } if i == index => self.clone(),
            Formula::Schema { disjunctive, index: i, lo, hi, body } => {
                Formula::Schema { disjunctive: *disjunctive, index: i.clone(), lo: *lo, hi: *hi, body: bx(body) }
            }
            Formula::Modal(j, body) => Formula::Modal(j.clone(), bx(body)),
            Formula::Forall(x, s, body) => Formula::Forall(x.clone(), s.clone(), bx(body)),
            Formula::Exists(x, s, body) => Formula::Exists(x.clone(), s.clone(), bx(body)),
        }
    }
}

fn fresh_name(base: &str, taken: &dyn Fn(&str) -> bool) -> String {
    let mut name = String::from(base);
    loop {
        name.push('\'');
        if !taken(&name) {
            return name;
        }
    }
}

#[cfg(test)]
mod tests;
