use alloc::boxed::Box;
use alloc::string::{String, ToString};

use super::Formula;

/// The output of [`box_translate`]: the translated formula and how many
/// optional boxes (those on `∧`, `⋀`, `⇒`, `∀`) were dropped.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TranslationResult {
    pub formula: Formula,
    pub elided: usize,
}

/// The □-translation relative to the nucleus named `j`.
///
/// Atoms and the disjunctive connectives always get a box. The boxes on
/// `∧`, `⋀`, `⇒` and `∀` are optional and dropped when `elide_gray` is set.
pub fn box_translate(phi: &Formula, j: &str, elide_gray: bool) -> TranslationResult {
    let mut t = Translator { j: j.to_string(), elide: elide_gray, elided: 0 };
    let formula = t.go(phi);
    TranslationResult { formula, elided: t.elided }
}

/// The □-translation for the double-negation nucleus, with each box written
/// out as `¬¬`.
pub fn negneg_translate(phi: &Formula, elide_gray: bool) -> TranslationResult {
    const MARK: &str = "\u{0}negneg";
    let r = box_translate(phi, MARK, elide_gray);
    TranslationResult { formula: expand(&r.formula, MARK), elided: r.elided }
}

fn expand(phi: &Formula, mark: &str) -> Formula {
    let go = |f: &Formula| Box::new(expand(f, mark));
    match phi {
        Formula::Modal(j, inner) if j == mark => Formula::not(Formula::not(expand(inner, mark))),
        Formula::Modal(j, inner) => Formula::Modal(j.clone(), go(inner)),
        Formula::And(a, b) => Formula::And(go(a), go(b)),
        Formula::Or(a, b) => Formula::Or(go(a), go(b)),
        Formula::Implies(a, b) => Formula::Implies(go(a), go(b)),
        Formula::BigAnd(fs) => Formula::BigAnd(fs.iter().map(|f| expand(f, mark)).collect()),
        Formula::BigOr(fs) => Formula::BigOr(fs.iter().map(|f| expand(f, mark)).collect()),
        Formula::Schema { disjunctive, index, lo, hi, body } => Formula::Schema {
            disjunctive: *disjunctive,
            index: index.clone(),
            lo: *lo,
            hi: *hi,
            body: go(body),
        },
        Formula::Forall(x, s, body) => Formula::Forall(x.clone(), s.clone(), go(body)),
        Formula::Exists(x, s, body) => Formula::Exists(x.clone(), s.clone(), go(body)),
        atom => atom.clone(),
    }
}

struct Translator {
    j: String,
    elide: bool,
    elided: usize,
}

impl Translator {
    fn boxed(&self, phi: Formula) -> Formula {
        Formula::Modal(self.j.clone(), Box::new(phi))
    }

    fn gray(&mut self, phi: Formula) -> Formula {
        if self.elide {
            self.elided += 1;
            phi
        } else {
            self.boxed(phi)
        }
    }

    fn go(&mut self, phi: &Formula) -> Formula {
        match phi {
            Formula::Top => Formula::Top,
            Formula::Bot | Formula::Eq(..) | Formula::Member(..) | Formula::Prop(_) => self.boxed(phi.clone()),
            Formula::And(a, b) => {
                let inner = Formula::and(self.go(a), self.go(b));
                self.gray(inner)
            }
            Formula::Implies(a, b) => {
                let inner = Formula::implies(self.go(a), self.go(b));
                self.gray(inner)
            }
            Formula::BigAnd(fs) => {
                let inner = Formula::BigAnd(fs.iter().map(|f| self.go(f)).collect());
                self.gray(inner)
            }
            Formula::Forall(x, s, body) => {
                let inner = Formula::Forall(x.clone(), s.clone(), Box::new(self.go(body)));
                self.gray(inner)
            }
            Formula::Or(a, b) => {
                let inner = Formula::or(self.go(a), self.go(b));
                self.boxed(inner)
            }
            Formula::BigOr(fs) => {
                let inner = Formula::BigOr(fs.iter().map(|f| self.go(f)).collect());
                self.boxed(inner)
            }
            Formula::Exists(x, s, body) => {
                let inner = Formula::Exists(x.clone(), s.clone(), Box::new(self.go(body)));
                self.boxed(inner)
            }
            Formula::Schema { disjunctive, index, lo, hi, body } => {
                let inner = Formula::Schema {
                    disjunctive: *disjunctive,
                    index: index.clone(),
                    lo: *lo,
                    hi: *hi,
                    body: Box::new(self.go(body)),
                };
                if *disjunctive {
                    self.boxed(inner)
                } else {
                    self.gray(inner)
                }
            }
            Formula::Modal(k, body) => {
                let inner = Formula::Modal(k.clone(), Box::new(self.go(body)));
                self.boxed(inner)
            }
        }
    }
}
