//! Seeded test corpora: spaces, sheaves, environments, formulas and rings.
//!
//! Everything is drawn from a `ChaCha8Rng`, so a seed fixes the corpus
//! byte for byte.

use std::sync::Arc;

use rand::seq::IndexedRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use toposforge_core::finring::FinRing;
use toposforge_core::forcing::Environment;
use toposforge_core::formula::{Formula, Sort, Term};
use toposforge_core::frame::{Elem, FiniteSpace, Frame, Nucleus};
use toposforge_core::sheaf::{Germ, Sheaf, Subsheaf};

pub const DEFAULT_SEED: u64 = 0x7f4a_2c19;

/// The seed: an explicit value, else `TOPOSFORGE_SEED`, else the default.
pub fn seed(explicit: Option<u64>) -> u64 {
    explicit
        .or_else(|| std::env::var("TOPOSFORGE_SEED").ok().and_then(|s| s.trim().parse().ok()))
        .unwrap_or(DEFAULT_SEED)
}

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

fn names(prefix: &str, n: usize) -> Vec<String> {
    (0..n).map(|i| format!("{prefix}{i}")).collect()
}

/// A few hand-picked spaces followed by random Alexandrov spaces on at most
/// `max_points` points, without repeated topologies.
pub fn spaces(rng: &mut ChaCha8Rng, count: usize, max_points: usize) -> Vec<FiniteSpace> {
    let mut out: Vec<FiniteSpace> = Vec::new();
    let fixed = [
        FiniteSpace::sierpinski(),
        FiniteSpace::discrete(1),
        FiniteSpace::discrete(2),
        FiniteSpace::alexandrov(names("c", 3), &[(1, 0), (2, 1)]).expect("chain"),
        FiniteSpace::alexandrov(names("v", 3), &[(0, 2), (1, 2)]).expect("two open points over a closed one"),
        FiniteSpace::alexandrov(names("w", 3), &[(2, 0), (2, 1)]).expect("one open point over two closed ones"),
    ];
    for s in fixed {
        if s.num_points() <= max_points && out.len() < count {
            out.push(s);
        }
    }
    let mut attempts = 0;
    while out.len() < count && attempts < 100 * count {
        attempts += 1;
        let n = rng.random_range(2..=max_points.max(2));
        let mut arrows = Vec::new();
        for x in 0..n {
            for y in 0..n {
                if x != y && rng.random_bool(0.25) {
                    arrows.push((x, y));
                }
            }
        }
        let s = FiniteSpace::alexandrov(names("x", n), &arrows).expect("Alexandrov topologies are valid");
        if !out.iter().any(|t| t.num_points() == s.num_points() && t.opens() == s.opens()) {
            out.push(s);
        }
    }
    out
}

/// Irreducible positions closed downwards (towards smaller opens), seeded
/// by a random choice.
fn random_down_set(rng: &mut ChaCha8Rng, frame: &Frame, p: f64) -> Vec<bool> {
    let irr = frame.irreducibles();
    let mut set = vec![false; irr.len()];
    for &a in irr {
        if rng.random_bool(p) {
            for (qi, &b) in irr.iter().enumerate() {
                if frame.leq(b, a) {
                    set[qi] = true;
                }
            }
        }
    }
    set
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SheafKind {
    /// Locally constant functions into a set.
    Constant,
    /// A subsheaf of a constant sheaf: each value lives on an open.
    Partial,
    /// A constant sheaf whose values are identified on an open.
    Collapsed,
}

pub const SHEAF_KINDS: [SheafKind; 3] = [SheafKind::Constant, SheafKind::Partial, SheafKind::Collapsed];

/// A random sheaf of the given kind with stalks of at most `values` elements.
pub fn sheaf(rng: &mut ChaCha8Rng, frame: &Arc<Frame>, kind: SheafKind, values: usize) -> Sheaf {
    let vals = names("v", values);
    let k = frame.irreducibles().len();
    match kind {
        SheafKind::Constant => Sheaf::constant(frame.clone(), &vals),
        SheafKind::Partial => {
            let regions: Vec<Vec<bool>> = (0..values).map(|_| random_down_set(rng, frame, 0.5)).collect();
            let present: Vec<Vec<usize>> = (0..k).map(|pi| (0..values).filter(|&v| regions[v][pi]).collect()).collect();
            let labels = present.iter().map(|vs| vs.iter().map(|&v| vals[v].clone()).collect()).collect();
            Sheaf::from_basis(frame.clone(), labels, |pi, qi, g| {
                let v = present[pi][g as usize];
                present[qi].iter().position(|&w| w == v).expect("regions are down-closed") as Germ
            })
            .expect("restrictions are inclusions")
        }
        SheafKind::Collapsed => {
            let collapsed = random_down_set(rng, frame, 0.4);
            let labels = (0..k).map(|pi| if collapsed[pi] { vec!["*".to_string()] } else { vals.clone() }).collect();
            Sheaf::from_basis(frame.clone(), labels, |_, qi, g| if collapsed[qi] { 0 } else { g }).expect("collapse is natural")
        }
    }
}

/// A random subsheaf: random germ sets, shrunk until closed under
/// restriction.
pub fn subsheaf(rng: &mut ChaCha8Rng, sheaf: &Sheaf) -> Subsheaf {
    let frame = sheaf.frame();
    let irr = frame.irreducibles().to_vec();
    let mut germs: Vec<Vec<bool>> = (0..irr.len()).map(|pi| (0..sheaf.num_germs(pi)).map(|_| rng.random_bool(0.6)).collect()).collect();
    loop {
        let mut changed = false;
        for (pi, &p) in irr.iter().enumerate() {
            for g in 0..germs[pi].len() {
                if !germs[pi][g] {
                    continue;
                }
                let closed = irr.iter().enumerate().all(|(qi, &q)| !frame.leq(q, p) || germs[qi][sheaf.germ_restrict(pi, qi, g as Germ) as usize]);
                if !closed {
                    germs[pi][g] = false;
                    changed = true;
                }
            }
        }
        if !changed {
            break;
        }
    }
    Subsheaf::from_germs(sheaf, germs).expect("closed under restriction")
}

/// The names a corpus environment defines.
pub const PROPS: [&str; 3] = ["P", "Q", "R"];
pub const SHEAF: &str = "F";
pub const SUBSHEAF: &str = "S";

/// An environment on the space with propositional constants `P`, `Q`, `R`
/// for random opens, a random sheaf `F` with stalks of at most two elements,
/// and a random subsheaf `S ⊆ F`.
pub fn environment(rng: &mut ChaCha8Rng, space: &FiniteSpace) -> Environment {
    let frame = Arc::new(space.frame().clone());
    let mut env = Environment::new(frame.clone());
    for p in PROPS {
        let u = rng.random_range(0..frame.len());
        env.add_prop(p, u).expect("fresh name");
    }
    let kind = *SHEAF_KINDS.choose(rng).expect("non-empty");
    let f = sheaf(rng, &frame, kind, 2);
    let s = subsheaf(rng, &f);
    let id = env.add_sheaf(SHEAF, f).expect("fresh name");
    env.add_subsheaf(SUBSHEAF, id, s).expect("fresh name");
    env
}

/// Random formulas over a corpus environment. Variables have sort `F`.
pub struct FormulaGen<'r> {
    pub rng: &'r mut ChaCha8Rng,
    /// Only `⊤ ⊥ = ∈ ∧ ∨ ⋁ ∃` and propositional constants.
    pub geometric: bool,
    fresh: usize,
}

impl<'r> FormulaGen<'r> {
    pub fn new(rng: &'r mut ChaCha8Rng, geometric: bool) -> FormulaGen<'r> {
        FormulaGen { rng, geometric, fresh: 0 }
    }

    fn sort() -> Sort {
        Sort::named(SHEAF)
    }

    fn var(&mut self, scope: &[String]) -> Term {
        Term::var(scope.choose(self.rng).expect("non-empty scope"), Self::sort())
    }

    pub fn atom(&mut self, scope: &[String]) -> Formula {
        let choices = if scope.is_empty() { 4 } else { 6 };
        match self.rng.random_range(0..choices) {
            0 => Formula::Top,
            1 => Formula::Bot,
            2 | 3 => Formula::prop(PROPS.choose(self.rng).expect("non-empty")),
            4 => Formula::eq(self.var(scope), self.var(scope)),
            _ => Formula::member(self.var(scope), SUBSHEAF),
        }
    }

    /// A formula of depth at most `depth` whose free variables lie in `scope`.
    pub fn formula(&mut self, depth: usize, scope: &[String]) -> Formula {
        if depth == 0 || self.rng.random_bool(0.2) {
            return self.atom(scope);
        }
        let d = depth - 1;
        let choice = if self.geometric { self.rng.random_range(0..4) } else { self.rng.random_range(0..8) };
        match choice {
            0 => Formula::and(self.formula(d, scope), self.formula(d, scope)),
            1 => Formula::or(self.formula(d, scope), self.formula(d, scope)),
            2 => self.quantified(d, scope, false),
            3 => {
                let k = self.rng.random_range(0..=3);
                Formula::BigOr((0..k).map(|_| self.formula(d, scope)).collect())
            }
            4 => Formula::implies(self.formula(d, scope), self.formula(d, scope)),
            5 => Formula::not(self.formula(d, scope)),
            6 => self.quantified(d, scope, true),
            _ => {
                let k = self.rng.random_range(0..=3);
                Formula::BigAnd((0..k).map(|_| self.formula(d, scope)).collect())
            }
        }
    }

    fn quantified(&mut self, depth: usize, scope: &[String], universal: bool) -> Formula {
        let x = format!("q{}", self.fresh);
        self.fresh += 1;
        let mut inner = scope.to_vec();
        inner.push(x.clone());
        let body = self.formula(depth, &inner);
        if universal {
            Formula::forall(&x, Self::sort(), body)
        } else {
            Formula::exists(&x, Self::sort(), body)
        }
    }
}

/// All nuclei from the four constructors on a space, with a short name for
/// reports: `open(U)`, `closed(U)` (the complement of `U`), `negneg`,
/// `point(x)`.
pub fn nuclei(space: &FiniteSpace) -> Vec<(String, Nucleus)> {
    let mut out = Vec::new();
    for u in space.frame().elements() {
        out.push((format!("open({})", space.describe(u)), space.nucleus_open(u)));
        out.push((format!("closed({})", space.describe(u)), space.nucleus_closed(u)));
    }
    out.push(("negneg".to_string(), space.nucleus_negneg()));
    for x in 0..space.num_points() {
        out.push((format!("point({})", space.points()[x]), space.nucleus_point(x)));
    }
    out
}

/// One nucleus from a random constructor.
pub fn random_nucleus(rng: &mut ChaCha8Rng, space: &FiniteSpace) -> (String, Nucleus) {
    let all = nuclei(space);
    all.choose(rng).expect("negneg is always present").clone()
}

/// The rings the ring suites run over, with display names.
pub fn rings() -> Vec<(String, FinRing)> {
    let mut out: Vec<(String, FinRing)> = [2, 3, 4, 6, 8, 9, 12]
        .into_iter()
        .map(|n| (format!("zmod {n}"), FinRing::zmod(n).expect("small modulus")))
        .collect();
    out.push(("polyquot (zmod 2) x^2+x+1".to_string(), FinRing::polyquot(2, &[1, 1, 1]).expect("F4")));
    let z2 = FinRing::zmod(2).expect("Z/2");
    let z4 = FinRing::zmod(4).expect("Z/4");
    out.push(("product (zmod 2) (zmod 2)".to_string(), FinRing::product(&z2, &z2).expect("small")));
    out.push(("product (zmod 2) (zmod 4)".to_string(), FinRing::product(&z2, &z4).expect("small")));
    out
}

/// Ring homomorphisms `φ : R → A` with `R` local, for the quasicoherator.
pub fn local_algebras() -> Vec<(String, FinRing, FinRing, Vec<usize>)> {
    let z = |n| FinRing::zmod(n).expect("small modulus");
    let mut out = Vec::new();
    let identity = |name: &str, r: FinRing| (format!("{name} -> {name}"), r.clone(), r.clone(), r.elements().collect::<Vec<_>>());
    for (name, r) in [("zmod 2", z(2)), ("zmod 4", z(4)), ("zmod 8", z(8)), ("zmod 9", z(9))] {
        out.push(identity(name, r));
    }
    // Diagonals into products.
    for n in [2, 3, 4] {
        let r = z(n);
        let a = FinRing::product(&r, &r).expect("small");
        let diag = r
            .elements()
            .map(|x| a.element(&format!("({},{})", r.label(x), r.label(x))).expect("diagonal element"))
            .collect();
        out.push((format!("zmod {n} -> product"), r, a, diag));
    }
    // Reductions and the extension F2 -> F4.
    for (m, n) in [(8, 4), (8, 2), (9, 3), (4, 2)] {
        let (r, a) = (z(m), z(n));
        let map = r.elements().map(|x| a.numeral(x)).collect();
        out.push((format!("zmod {m} -> zmod {n}"), r, a, map));
    }
    let f4 = FinRing::polyquot(2, &[1, 1, 1]).expect("F4");
    out.push(("zmod 2 -> F4".to_string(), z(2), f4.clone(), vec![f4.zero(), f4.one()]));
    // A local base mapping into a non-local algebra.
    let r = z(4);
    let a = FinRing::product(&z(4), &z(2)).expect("small");
    let map = r
        .elements()
        .map(|x| a.element(&format!("({},{})", r.label(x), x % 2)).expect("element"))
        .collect();
    out.push(("zmod 4 -> product (zmod 4) (zmod 2)".to_string(), r, a, map));
    out
}

/// A sheaf that is not a `□`-sheaf in general: `j_!` of a constant sheaf
/// from an open, extended by the empty set.
pub fn extension_by_empty(frame: &Arc<Frame>, u: Elem, values: usize) -> Sheaf {
    let vals = names("v", values);
    let irr = frame.irreducibles();
    let labels = irr.iter().map(|&p| if frame.leq(p, u) { vals.clone() } else { Vec::new() }).collect();
    Sheaf::from_basis(frame.clone(), labels, |_, _, g| g).expect("inclusions")
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn corpus_is_reproducible() {
        let a = spaces(&mut rng(7), 20, 6);
        let b = spaces(&mut rng(7), 20, 6);
        assert_eq!(a.len(), 20);
        assert!(a.iter().zip(&b).all(|(s, t)| s.opens() == t.opens()));
        assert!(a.iter().all(|s| s.num_points() <= 6));
    }

    #[test]
    fn geometric_generator_stays_geometric() {
        let mut r = rng(3);
        let mut g = FormulaGen::new(&mut r, true);
        for _ in 0..200 {
            let phi = g.formula(3, &[]);
            assert!(phi.is_geometric(), "{phi}");
            assert!(phi.depth() <= 3, "{phi}");
        }
    }

    #[test]
    fn sheaves_of_every_kind_build() {
        let mut r = rng(11);
        for s in spaces(&mut rng(1), 12, 5) {
            let frame = Arc::new(s.frame().clone());
            for kind in SHEAF_KINDS {
                let f = sheaf(&mut r, &frame, kind, 2);
                subsheaf(&mut r, &f);
            }
        }
    }

    #[test]
    fn local_algebras_are_homomorphisms() {
        for (name, r, a, phi) in local_algebras() {
            assert!(r.is_local(), "{name}");
            assert!(r.is_hom(&a, &phi), "{name}");
        }
    }
}
