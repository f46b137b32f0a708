use alloc::boxed::Box;
use alloc::format;
use alloc::string::{String, ToString};
use alloc::sync::Arc;
use alloc::vec;
use alloc::vec::Vec;
use hashbrown::HashMap;

use super::compile::{CTerm, Node, NodeId, Program, SlotId, VarId};
use super::{Environment, ForceError};
use crate::formula::{Formula, Sort};
use crate::frame::Elem;
use crate::sheaf::{Germ, Section, Sheaf};

/// How `∃` and `∨` are decided.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Semantics {
    /// At every join-irreducible below `U`.
    #[default]
    Irreducible,
    /// By asking whether the opens below `U` that force a disjunct (or have
    /// a witness) join to `U`. Slower; kept as an independent check.
    Cover,
}

/// A value for a free variable: a section of the sort's sheaf over `open`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Binding {
    pub name: String,
    pub sort: Sort,
    pub open: Elem,
    pub section: Section,
}

impl Binding {
    pub fn new(name: &str, sort: Sort, open: Elem, section: Section) -> Binding {
        Binding { name: name.to_string(), sort, open, section }
    }
}

type Compiled = (NodeId, Vec<VarId>);

pub struct Evaluator<'e> {
    env: &'e Environment,
    program: Program,
    semantics: Semantics,
    memo: HashMap<Box<[u32]>, bool>,
    compiled: HashMap<(Formula, Vec<(String, Sort)>), Compiled>,
    vals: Vec<Section>,
}

impl<'e> Evaluator<'e> {
    pub fn new(env: &'e Environment) -> Evaluator<'e> {
        Evaluator::with_semantics(env, Semantics::Irreducible)
    }

    pub fn with_semantics(env: &'e Environment, semantics: Semantics) -> Evaluator<'e> {
        Evaluator {
            env,
            program: Program::new(env),
            semantics,
            memo: HashMap::new(),
            compiled: HashMap::new(),
            vals: Vec::new(),
        }
    }

    pub fn environment(&self) -> &'e Environment {
        self.env
    }

    pub fn semantics(&self) -> Semantics {
        self.semantics
    }

    /// The sheaf interpreting a sort.
    pub fn sheaf_of_sort(&mut self, sort: &Sort) -> Result<Arc<Sheaf>, ForceError> {
        let slot = self.program.resolve_sort(self.env, sort)?;
        Ok(self.program.slots[slot].sheaf.clone())
    }

    /// Type-checks `phi` with the given free variables.
    pub fn check(&mut self, phi: &Formula, free: &[(String, Sort)]) -> Result<(), ForceError> {
        self.compile(phi, free).map(|_| ())
    }

    pub(crate) fn compile(&mut self, phi: &Formula, free: &[(String, Sort)]) -> Result<Compiled, ForceError> {
        let key = (phi.clone(), free.to_vec());
        if let Some(c) = self.compiled.get(&key) {
            return Ok(c.clone());
        }
        let mut scope = Vec::with_capacity(free.len());
        let mut vars = Vec::with_capacity(free.len());
        for (name, sort) in free {
            let slot = self.program.resolve_sort(self.env, sort)?;
            let v = self.program.new_var(slot);
            scope.push((name.clone(), v));
            vars.push(v);
        }
        let node = self.program.compile(self.env, phi, &mut scope)?;
        self.vals.resize(self.program.vars.len(), 0);
        self.compiled.insert(key, (node, vars.clone()));
        Ok((node, vars))
    }

    fn check_open(&self, u: Elem) -> Result<(), ForceError> {
        if u < self.env.frame().len() {
            Ok(())
        } else {
            Err(ForceError::OpenOutOfRange(u))
        }
    }

    /// `U ⊨ φ` for a closed formula.
    pub fn force(&mut self, phi: &Formula, u: Elem) -> Result<bool, ForceError> {
        self.force_with(phi, u, &[])
    }

    /// `U ⊨ φ(b₁,…)`; each binding is restricted from its open to `U`.
    pub fn force_with(&mut self, phi: &Formula, u: Elem, bindings: &[Binding]) -> Result<bool, ForceError> {
        self.check_open(u)?;
        let free: Vec<(String, Sort)> = bindings.iter().map(|b| (b.name.clone(), b.sort.clone())).collect();
        let (node, vars) = self.compile(phi, &free)?;
        self.bind(u, &vars, bindings)?;
        Ok(self.eval(node, u))
    }

    fn bind(&mut self, u: Elem, vars: &[VarId], bindings: &[Binding]) -> Result<(), ForceError> {
        let frame = self.env.frame();
        for (&v, b) in vars.iter().zip(bindings) {
            self.check_open(b.open)?;
            let sheaf = &self.program.slots[self.program.vars[v].slot].sheaf;
            if !frame.leq(u, b.open) {
                return Err(ForceError::BindingNotDefined(b.name.clone()));
            }
            if b.section >= sheaf.num_sections(b.open) {
                return Err(ForceError::SectionOutOfRange(format!(
                    "section {} of `{}` over {}",
                    b.section,
                    b.name,
                    frame.label(b.open)
                )));
            }
            self.vals[v] = sheaf.restrict(b.open, u, b.section);
        }
        Ok(())
    }

    /// The largest open forcing a closed formula.
    pub fn truth_value(&mut self, phi: &Formula) -> Result<Elem, ForceError> {
        self.truth_value_with(phi, &[])
    }

    pub fn truth_value_with(&mut self, phi: &Formula, bindings: &[Binding]) -> Result<Elem, ForceError> {
        let top = bindings.iter().fold(self.env.frame().top(), |acc, b| self.env.frame().meet(acc, b.open));
        let mut forced = Vec::new();
        for &u in self.env.frame().below(top) {
            if self.force_with(phi, u, bindings)? {
                forced.push(u);
            }
        }
        Ok(self.env.frame().join_all(forced))
    }

    /// Classical truth in the stalk at the irreducible `p`, for geometric
    /// formulas. Bindings are replaced by their germs at `p`.
    pub fn stalk_holds(&mut self, phi: &Formula, p: Elem, bindings: &[Binding]) -> Result<bool, ForceError> {
        self.check_open(p)?;
        let pi = match self.env.frame().irreducibles().iter().position(|&q| q == p) {
            Some(pi) => pi,
            None => return Err(ForceError::Unsupported(format!("{} is not join-irreducible", self.env.frame().label(p)))),
        };
        let free: Vec<(String, Sort)> = bindings.iter().map(|b| (b.name.clone(), b.sort.clone())).collect();
        let (node, vars) = self.compile(phi, &free)?;
        if !self.program.nodes[node as usize].geometric {
            return Err(ForceError::Unsupported("stalkwise evaluation needs a geometric formula".to_string()));
        }
        let mut germs = vec![0 as Germ; self.program.vars.len()];
        for (&v, b) in vars.iter().zip(bindings) {
            if !self.env.frame().leq(p, b.open) {
                return Err(ForceError::BindingNotDefined(b.name.clone()));
            }
            germs[v] = self.program.slots[self.program.vars[v].slot].sheaf.germ_at(b.open, b.section, pi);
        }
        Ok(self.stalk(node, pi, &mut germs))
    }

    // --- forcing ---

    fn term(&self, t: &CTerm, u: Elem) -> Section {
        match t {
            CTerm::Var(v) => self.vals[*v],
            CTerm::Global(slot, s) => self.program.slots[*slot].sheaf.restrict(self.env.frame().top(), u, *s),
            CTerm::App(f, args) => {
                let sym = &self.env.functions[*f];
                let sections: Vec<Section> = args.iter().map(|a| self.term(a, u)).collect();
                let arg_sheaves: Vec<&Sheaf> = sym.args.iter().map(|&a| self.env.sheaf(a)).collect();
                sym.morphism.apply(&arg_sheaves, self.env.sheaf(sym.result), u, &sections)
            }
        }
    }

    fn slot_sheaf(&self, slot: SlotId) -> &Sheaf {
        self.program.slot_sheaf(slot)
    }

    pub(crate) fn eval(&mut self, node: NodeId, u: Elem) -> bool {
        let data = &self.program.nodes[node as usize];
        let mut key = Vec::with_capacity(2 + data.free.len());
        key.push(node);
        key.push(u as u32);
        key.extend(data.free.iter().map(|&v| self.vals[v] as u32));
        if let Some(&b) = self.memo.get(key.as_slice()) {
            return b;
        }
        let result = self.eval_uncached(node, u);
        self.memo.insert(key.into_boxed_slice(), result);
        result
    }

    /// Runs `f` at `v ≤ u` with the free variables of `node` restricted.
    fn at<R>(&mut self, node: NodeId, u: Elem, v: Elem, f: impl FnOnce(&mut Self) -> R) -> R {
        if u == v {
            return f(self);
        }
        let free = self.program.nodes[node as usize].free.clone();
        let saved: Vec<Section> = free.iter().map(|&x| self.vals[x]).collect();
        for &x in free.iter() {
            let sheaf = &self.program.slots[self.program.vars[x].slot].sheaf;
            self.vals[x] = sheaf.restrict(u, v, self.vals[x]);
        }
        let r = f(self);
        for (&x, s) in free.iter().zip(saved) {
            self.vals[x] = s;
        }
        r
    }

    /// Whether the opens below `u` satisfying `test` join to `u`.
    fn covered(&mut self, node: NodeId, u: Elem, mut test: impl FnMut(&mut Self, Elem) -> bool) -> bool {
        let frame = self.env.frame_arc().clone();
        match self.semantics {
            Semantics::Irreducible => frame.irreducibles_below(u).iter().all(|&p| self.at(node, u, p, |me| test(me, p))),
            Semantics::Cover => {
                let mut good = Vec::new();
                for &v in frame.below(u) {
                    if self.at(node, u, v, |me| test(me, v)) {
                        good.push(v);
                    }
                }
                frame.join_all(good) == u
            }
        }
    }

    fn eval_uncached(&mut self, node: NodeId, u: Elem) -> bool {
        let frame = self.env.frame_arc().clone();
        match self.program.nodes[node as usize].node.clone() {
            Node::Top => true,
            Node::Bot => u == frame.bottom(),
            Node::Eq(a, b) => self.term(&a, u) == self.term(&b, u),
            Node::InSub(t, i) => {
                let s = self.term(&t, u);
                self.env.subsheaves[i].2.contains(u, s)
            }
            Node::InSet(t, set, slot) => {
                let x = self.term(&t, u);
                let s = self.term(&set, u);
                let (base, power) = self.program.slots[slot].power.clone().expect("power slot");
                power.member(self.slot_sheaf(base), u, x, s)
            }
            Node::Open(w) => frame.leq(u, w),
            Node::Holds(t, slot) => {
                let s = self.term(&t, u);
                let (_, power) = self.program.slots[slot].power.clone().expect("power slot");
                power.omega_open(u, s) == u
            }
            Node::And(cs) => cs.iter().all(|&c| self.eval(c, u)),
            Node::Or(cs) => self.covered(node, u, |me, v| cs.iter().any(|&c| me.eval(c, v))),
            Node::Implies(a, b) => {
                let below = frame.below(u);
                below.iter().all(|&v| self.at(node, u, v, |me| !me.eval(a, v) || me.eval(b, v)))
            }
            Node::Forall(x, body) => {
                let sheaf = self.program.slots[self.program.vars[x].slot].sheaf.clone();
                frame.below(u).iter().all(|&v| {
                    self.at(node, u, v, |me| {
                        sheaf.sections(v).all(|s| {
                            me.vals[x] = s;
                            me.eval(body, v)
                        })
                    })
                })
            }
            Node::Exists(x, body) => {
                let sheaf = self.program.slots[self.program.vars[x].slot].sheaf.clone();
                self.covered(node, u, |me, v| {
                    sheaf.sections(v).any(|s| {
                        me.vals[x] = s;
                        me.eval(body, v)
                    })
                })
            }
            Node::Modal(j, body) => {
                let w = self.value_below(node, body, u);
                frame.leq(u, self.env.nuclei[j].1.apply(w))
            }
        }
    }

    /// `⟦φ⟧ ∧ U`: the join of the opens below `U` forcing the child.
    fn value_below(&mut self, parent: NodeId, body: NodeId, u: Elem) -> Elem {
        let frame = self.env.frame_arc().clone();
        let mut good = Vec::new();
        let candidates: Vec<Elem> = match self.semantics {
            Semantics::Irreducible => frame.irreducibles_below(u).to_vec(),
            Semantics::Cover => frame.below(u).to_vec(),
        };
        for v in candidates {
            if self.at(parent, u, v, |me| me.eval(body, v)) {
                good.push(v);
            }
        }
        frame.join_all(good)
    }

    // --- stalks ---

    fn germ(&self, t: &CTerm, pi: usize, germs: &[Germ]) -> Germ {
        match t {
            CTerm::Var(v) => germs[*v],
            CTerm::Global(slot, s) => self.program.slots[*slot].sheaf.germ_at(self.env.frame().top(), *s, pi),
            CTerm::App(f, args) => {
                let gs: Vec<Germ> = args.iter().map(|a| self.germ(a, pi, germs)).collect();
                self.env.functions[*f].morphism.apply_germs(pi, &gs)
            }
        }
    }

    fn stalk(&self, node: NodeId, pi: usize, germs: &mut Vec<Germ>) -> bool {
        let p = self.env.frame().irreducibles()[pi];
        match &self.program.nodes[node as usize].node {
            Node::Top => true,
            Node::Bot => false,
            Node::Eq(a, b) => self.germ(a, pi, germs) == self.germ(b, pi, germs),
            Node::InSub(t, i) => self.env.subsheaves[*i].2.admits_germ(pi, self.germ(t, pi, germs)),
            Node::InSet(t, set, slot) => {
                let (_, power) = self.program.slots[*slot].power.as_ref().expect("power slot");
                power.germ_member(pi, self.germ(set, pi, germs), self.germ(t, pi, germs))
            }
            Node::Open(w) => self.env.frame().leq(p, *w),
            Node::Holds(t, slot) => {
                let (_, power) = self.program.slots[*slot].power.as_ref().expect("power slot");
                power.germ_member(pi, self.germ(t, pi, germs), 0)
            }
            Node::And(cs) => cs.iter().all(|&c| self.stalk(c, pi, germs)),
            Node::Or(cs) => cs.iter().any(|&c| self.stalk(c, pi, germs)),
            Node::Exists(x, body) => {
                let n = self.program.slots[self.program.vars[*x].slot].sheaf.num_germs(pi);
                (0..n).any(|g| {
                    germs[*x] = g as Germ;
                    self.stalk(*body, pi, germs)
                })
            }
            Node::Implies(..) | Node::Forall(..) | Node::Modal(..) => unreachable!("checked geometric"),
        }
    }
}
