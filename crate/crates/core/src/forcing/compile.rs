//! Compilation of formulas into hash-consed node graphs over sheaf slots.

use alloc::boxed::Box;
use alloc::collections::BTreeMap;
use alloc::format;
use alloc::string::{String, ToString};
use alloc::sync::Arc;
use alloc::vec::Vec;
use hashbrown::HashMap;

use super::{Algebra, Environment, ForceError, SheafId};
use crate::formula::{Exponent, Formula, Sort, Term};
use crate::frame::Elem;
use crate::sheaf::{PowerSheaf, Section, Sheaf};

pub(crate) type NodeId = u32;
pub(crate) type VarId = usize;
pub(crate) type SlotId = usize;

/// A sheaf that terms may range over: an environment sheaf, the terminal
/// sheaf, or a power object of another slot.
#[derive(Debug, Clone)]
pub(crate) struct Slot {
    pub sheaf: Arc<Sheaf>,
    pub power: Option<(SlotId, Arc<PowerSheaf>)>,
    pub env_id: Option<SheafId>,
    pub sort: Sort,
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub(crate) enum CTerm {
    Var(VarId),
    /// A global section.
    Global(SlotId, Section),
    App(usize, Box<[CTerm]>),
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub(crate) enum Node {
    Top,
    Bot,
    Eq(CTerm, CTerm),
    InSub(CTerm, usize),
    /// `t ∈ S` with `S` a term of the given power slot.
    InSet(CTerm, CTerm, SlotId),
    Open(Elem),
    /// A term of sort `Ω` holds.
    Holds(CTerm, SlotId),
    And(Box<[NodeId]>),
    Or(Box<[NodeId]>),
    Implies(NodeId, NodeId),
    Forall(VarId, NodeId),
    Exists(VarId, NodeId),
    Modal(usize, NodeId),
}

#[derive(Debug, Clone)]
pub(crate) struct NodeData {
    pub node: Node,
    pub free: Box<[VarId]>,
    pub geometric: bool,
}

#[derive(Debug, Clone)]
pub(crate) struct VarData {
    pub slot: SlotId,
}

#[derive(Debug, Clone)]
pub(crate) struct Program {
    pub slots: Vec<Slot>,
    sort_slots: BTreeMap<Sort, SlotId>,
    pub nodes: Vec<NodeData>,
    interned: HashMap<Node, NodeId>,
    pub vars: Vec<VarData>,
}

fn sort_err(msg: String) -> ForceError {
    ForceError::Sort(msg)
}

impl Program {
    pub fn new(env: &Environment) -> Program {
        let mut p = Program {
            slots: Vec::new(),
            sort_slots: BTreeMap::new(),
            nodes: Vec::new(),
            interned: HashMap::new(),
            vars: Vec::new(),
        };
        for (id, (name, sheaf)) in env.sheaves.iter().enumerate() {
            let sort = Sort::Named(name.clone());
            p.sort_slots.insert(sort.clone(), id);
            p.slots.push(Slot { sheaf: sheaf.clone(), power: None, env_id: Some(id), sort });
        }
        p
    }

    pub fn slot_sheaf(&self, slot: SlotId) -> &Sheaf {
        &self.slots[slot].sheaf
    }

    pub fn resolve_sort(&mut self, env: &Environment, sort: &Sort) -> Result<SlotId, ForceError> {
        if let Some(&s) = self.sort_slots.get(sort) {
            return Ok(s);
        }
        let slot = match sort {
            Sort::Named(n) => return Err(ForceError::Unresolved(n.clone())),
            Sort::Omega => {
                let terminal = self.terminal(env);
                self.power_slot(terminal, Sort::Omega)?
            }
            Sort::Power(inner) => {
                let base = self.resolve_sort(env, inner)?;
                self.power_slot(base, sort.clone())?
            }
        };
        self.sort_slots.insert(sort.clone(), slot);
        Ok(slot)
    }

    fn terminal(&mut self, env: &Environment) -> SlotId {
        let key = Sort::Named("\u{0}1".to_string());
        if let Some(&s) = self.sort_slots.get(&key) {
            return s;
        }
        self.slots.push(Slot { sheaf: Arc::new(Sheaf::terminal(env.frame_arc().clone())), power: None, env_id: None, sort: key.clone() });
        let id = self.slots.len() - 1;
        self.sort_slots.insert(key, id);
        id
    }

    fn power_slot(&mut self, base: SlotId, sort: Sort) -> Result<SlotId, ForceError> {
        let power = PowerSheaf::new(&self.slots[base].sheaf)?;
        self.slots.push(Slot { sheaf: Arc::new(power.sheaf().clone()), power: Some((base, Arc::new(power))), env_id: None, sort });
        Ok(self.slots.len() - 1)
    }

    pub fn new_var(&mut self, slot: SlotId) -> VarId {
        self.vars.push(VarData { slot });
        self.vars.len() - 1
    }

    fn intern(&mut self, node: Node) -> NodeId {
        if let Some(&id) = self.interned.get(&node) {
            return id;
        }
        let mut free: Vec<VarId> = Vec::new();
        let mut geometric = true;
        let child = |id: NodeId, free: &mut Vec<VarId>, nodes: &[NodeData]| free.extend_from_slice(&nodes[id as usize].free);
        match &node {
            Node::Top | Node::Bot | Node::Open(_) => {}
            Node::Eq(a, b) => {
                term_vars(a, &mut free);
                term_vars(b, &mut free);
            }
            Node::InSub(t, _) | Node::Holds(t, _) => term_vars(t, &mut free),
            Node::InSet(t, s, _) => {
                term_vars(t, &mut free);
                term_vars(s, &mut free);
            }
            Node::And(cs) | Node::Or(cs) => {
                for &c in cs.iter() {
                    child(c, &mut free, &self.nodes);
                    geometric &= self.nodes[c as usize].geometric;
                }
            }
            Node::Implies(a, b) => {
                child(*a, &mut free, &self.nodes);
                child(*b, &mut free, &self.nodes);
                geometric = false;
            }
            Node::Forall(v, b) | Node::Exists(v, b) => {
                free.extend(self.nodes[*b as usize].free.iter().copied().filter(|x| x != v));
                geometric = matches!(node, Node::Exists(..)) && self.nodes[*b as usize].geometric;
            }
            Node::Modal(_, b) => {
                child(*b, &mut free, &self.nodes);
                geometric = false;
            }
        }
        free.sort_unstable();
        free.dedup();
        let id = self.nodes.len() as NodeId;
        self.nodes.push(NodeData { node: node.clone(), free: free.into_boxed_slice(), geometric });
        self.interned.insert(node, id);
        id
    }

    /// Compiles `phi` with the given free variables already allocated.
    pub fn compile(&mut self, env: &Environment, phi: &Formula, scope: &mut Vec<(String, VarId)>) -> Result<NodeId, ForceError> {
        let node = match phi {
            Formula::Top => Node::Top,
            Formula::Bot => Node::Bot,
            Formula::Eq(a, b) => {
                let (ca, cb, _) = self.infer_pair(env, a, b, scope)?;
                Node::Eq(ca, cb)
            }
            Formula::Member(t, set) => self.member(env, t, set, scope)?,
            Formula::Prop(t) => self.prop(env, t, scope)?,
            Formula::And(a, b) => {
                let ids = [self.compile(env, a, scope)?, self.compile(env, b, scope)?];
                Node::And(Box::new(ids))
            }
            Formula::Or(a, b) => {
                let ids = [self.compile(env, a, scope)?, self.compile(env, b, scope)?];
                Node::Or(Box::new(ids))
            }
            Formula::BigAnd(fs) | Formula::BigOr(fs) => {
                let ids = fs.iter().map(|f| self.compile(env, f, scope)).collect::<Result<Vec<_>, _>>()?;
                if matches!(phi, Formula::BigAnd(_)) {
                    Node::And(ids.into_boxed_slice())
                } else {
                    Node::Or(ids.into_boxed_slice())
                }
            }
            Formula::Schema { disjunctive, index, lo, hi, body } => {
                let hi = hi.or(env.schema_bound()).ok_or_else(|| ForceError::UnboundedSchema(index.clone()))?;
                let mut ids = Vec::new();
                for n in *lo..=hi {
                    ids.push(self.compile(env, &body.instantiate_index(index, n), scope)?);
                }
                if *disjunctive {
                    Node::Or(ids.into_boxed_slice())
                } else {
                    Node::And(ids.into_boxed_slice())
                }
            }
            Formula::Implies(a, b) => Node::Implies(self.compile(env, a, scope)?, self.compile(env, b, scope)?),
            Formula::Forall(x, s, body) | Formula::Exists(x, s, body) => {
                let slot = self.resolve_sort(env, s)?;
                let v = self.new_var(slot);
                scope.push((x.clone(), v));
                let b = self.compile(env, body, scope);
                scope.pop();
                let b = b?;
                if matches!(phi, Formula::Forall(..)) {
                    Node::Forall(v, b)
                } else {
                    Node::Exists(v, b)
                }
            }
            Formula::Modal(j, body) => {
                let idx = env.nuclei.iter().position(|(n, _)| n == j).ok_or_else(|| ForceError::Unresolved(j.clone()))?;
                Node::Modal(idx, self.compile(env, body, scope)?)
            }
        };
        Ok(self.intern(node))
    }

    fn member(&mut self, env: &Environment, t: &Term, set: &Term, scope: &[(String, VarId)]) -> Result<Node, ForceError> {
        match set {
            Term::Const(name) => {
                if let Some(i) = env.subsheaves.iter().position(|(n, _, _)| n == name) {
                    let slot = env.subsheaves[i].1;
                    let ct = self.infer(env, t, Some(slot), scope)?;
                    return Ok(Node::InSub(ct, i));
                }
                let (cs, slot) = self.infer_with_slot(env, set, None, scope)?;
                self.in_set(env, t, cs, slot, scope)
            }
            Term::Var(..) => {
                let (cs, slot) = self.infer_with_slot(env, set, None, scope)?;
                self.in_set(env, t, cs, slot, scope)
            }
            other => Err(sort_err(format!("`{other}` cannot stand on the right of `in`"))),
        }
    }

    fn in_set(&mut self, env: &Environment, t: &Term, set: CTerm, slot: SlotId, scope: &[(String, VarId)]) -> Result<Node, ForceError> {
        let base = match &self.slots[slot].power {
            Some((base, _)) => *base,
            None => return Err(sort_err(format!("right side of `in` has sort {}, not a power sort", self.slots[slot].sort))),
        };
        let ct = self.infer(env, t, Some(base), scope)?;
        Ok(Node::InSet(ct, set, slot))
    }

    fn prop(&mut self, env: &Environment, t: &Term, scope: &[(String, VarId)]) -> Result<Node, ForceError> {
        if let Term::Const(name) = t {
            if let Some(open) = env.prop(name) {
                return Ok(Node::Open(open));
            }
        }
        let (ct, slot) = self.infer_with_slot(env, t, None, scope)?;
        if self.slots[slot].sort != Sort::Omega {
            return Err(sort_err(format!("`{t}` has sort {}, expected a proposition", self.slots[slot].sort)));
        }
        Ok(Node::Holds(ct, slot))
    }

    fn infer_pair(&mut self, env: &Environment, a: &Term, b: &Term, scope: &[(String, VarId)]) -> Result<(CTerm, CTerm, SlotId), ForceError> {
        let slot = match (numeric(a), numeric(b)) {
            (false, _) => self.infer_slot(env, a, None, scope)?,
            (true, false) => self.infer_slot(env, b, None, scope)?,
            (true, true) => return Err(sort_err(format!("cannot infer the sort of `{a}` and `{b}`"))),
        };
        Ok((self.infer(env, a, Some(slot), scope)?, self.infer(env, b, Some(slot), scope)?, slot))
    }

    fn infer_slot(&mut self, env: &Environment, t: &Term, expected: Option<SlotId>, scope: &[(String, VarId)]) -> Result<SlotId, ForceError> {
        let (_, slot) = self.infer_with_slot(env, t, expected, scope)?;
        Ok(slot)
    }

    pub fn infer(&mut self, env: &Environment, t: &Term, expected: Option<SlotId>, scope: &[(String, VarId)]) -> Result<CTerm, ForceError> {
        let (c, slot) = self.infer_with_slot(env, t, expected, scope)?;
        if let Some(e) = expected {
            if e != slot {
                return Err(sort_err(format!(
                    "`{t}` has sort {}, expected {}",
                    self.slots[slot].sort, self.slots[e].sort
                )));
            }
        }
        Ok(c)
    }

    fn ring_of(&self, env: &Environment, slot: SlotId) -> Option<(usize, usize, Section, Section)> {
        match self.slots[slot].env_id.and_then(|id| env.algebra[id].as_ref()) {
            Some(Algebra::Ring { add, mul, zero, one, .. }) => Some((*add, *mul, *zero, *one)),
            _ => None,
        }
    }

    fn module_of(&self, env: &Environment, slot: SlotId) -> Option<(SheafId, usize, usize, Section)> {
        match self.slots[slot].env_id.and_then(|id| env.algebra[id].as_ref()) {
            Some(Algebra::Module { ring, add, act, zero }) => Some((*ring, *add, *act, *zero)),
            _ => None,
        }
    }

    fn infer_with_slot(
        &mut self,
        env: &Environment,
        t: &Term,
        expected: Option<SlotId>,
        scope: &[(String, VarId)],
    ) -> Result<(CTerm, SlotId), ForceError> {
        match t {
            Term::Var(x, _) => match scope.iter().rev().find(|(n, _)| n == x) {
                Some(&(_, v)) => Ok((CTerm::Var(v), self.vars[v].slot)),
                None => Err(sort_err(format!("unbound variable `{x}`"))),
            },
            Term::Const(name) => {
                if let Some(&(_, v)) = scope.iter().rev().find(|(n, _)| n == name) {
                    return Ok((CTerm::Var(v), self.vars[v].slot));
                }
                match env.constant(name) {
                    Some((id, s)) => Ok((CTerm::Global(id, s), id)),
                    None if env.prop(name).is_some() || env.subsheaf(name).is_some() => {
                        Err(sort_err(format!("`{name}` is not a term")))
                    }
                    None => Err(ForceError::Unresolved(name.clone())),
                }
            }
            Term::App(f, args) => {
                let idx = env.functions.iter().position(|s| &s.name == f).ok_or_else(|| ForceError::Unresolved(f.clone()))?;
                let sym = &env.functions[idx];
                if sym.args.len() != args.len() {
                    return Err(sort_err(format!("`{f}` takes {} arguments, given {}", sym.args.len(), args.len())));
                }
                let (arg_slots, result) = (sym.args.clone(), sym.result);
                let cargs = args
                    .iter()
                    .zip(arg_slots)
                    .map(|(a, s)| self.infer(env, a, Some(s), scope))
                    .collect::<Result<Vec<_>, _>>()?;
                Ok((CTerm::App(idx, cargs.into_boxed_slice()), result))
            }
            Term::Num(k) => {
                let slot = expected.ok_or_else(|| sort_err(format!("cannot infer the sort of the numeral {k}")))?;
                if let Some((add, _, zero, one)) = self.ring_of(env, slot) {
                    return Ok((CTerm::Global(slot, numeral(env, slot, add, zero, one, *k)), slot));
                }
                match self.module_of(env, slot) {
                    Some((_, _, _, zero)) if *k == 0 => Ok((CTerm::Global(slot, zero), slot)),
                    _ => Err(sort_err(format!("numeral {k} in sort {}, which has no ring structure", self.slots[slot].sort))),
                }
            }
            Term::Add(a, b) => {
                let slot = match expected {
                    Some(s) => s,
                    None if !numeric(a) => self.infer_slot(env, a, None, scope)?,
                    None if !numeric(b) => self.infer_slot(env, b, None, scope)?,
                    None => return Err(sort_err(format!("cannot infer the sort of `{t}`"))),
                };
                let add = match (self.ring_of(env, slot), self.module_of(env, slot)) {
                    (Some((add, ..)), _) | (_, Some((_, add, _, _))) => add,
                    _ => return Err(sort_err(format!("`+` in sort {}, which has no addition", self.slots[slot].sort))),
                };
                let ca = self.infer(env, a, Some(slot), scope)?;
                let cb = self.infer(env, b, Some(slot), scope)?;
                Ok((CTerm::App(add, Box::new([ca, cb])), slot))
            }
            Term::Mul(a, b) => {
                let slot = match expected {
                    Some(s) => s,
                    None if !numeric(b) => self.infer_slot(env, b, None, scope)?,
                    None if !numeric(a) => self.infer_slot(env, a, None, scope)?,
                    None => return Err(sort_err(format!("cannot infer the sort of `{t}`"))),
                };
                if let Some((_, mul, _, _)) = self.ring_of(env, slot) {
                    let ca = self.infer(env, a, Some(slot), scope)?;
                    let cb = self.infer(env, b, Some(slot), scope)?;
                    return Ok((CTerm::App(mul, Box::new([ca, cb])), slot));
                }
                if let Some((ring, _, act, _)) = self.module_of(env, slot) {
                    let ca = self.infer(env, a, Some(ring), scope)?;
                    let cb = self.infer(env, b, Some(slot), scope)?;
                    return Ok((CTerm::App(act, Box::new([ca, cb])), slot));
                }
                Err(sort_err(format!("`*` in sort {}, which has no multiplication", self.slots[slot].sort)))
            }
            Term::Pow(a, e) => {
                let n = match e {
                    Exponent::Lit(n) => *n,
                    Exponent::Index(i) => return Err(sort_err(format!("schema index `{i}` used outside its schema"))),
                };
                let slot = match expected {
                    Some(s) => s,
                    None => self.infer_slot(env, a, None, scope)?,
                };
                let (_, mul, _, one) = self
                    .ring_of(env, slot)
                    .ok_or_else(|| sort_err(format!("`^` in sort {}, which is not a ring", self.slots[slot].sort)))?;
                let base = self.infer(env, a, Some(slot), scope)?;
                let mut acc = CTerm::Global(slot, one);
                for i in 0..n {
                    acc = if i == 0 { base.clone() } else { CTerm::App(mul, Box::new([acc, base.clone()])) };
                }
                Ok((acc, slot))
            }
        }
    }
}

fn term_vars(t: &CTerm, out: &mut Vec<VarId>) {
    match t {
        CTerm::Var(v) => out.push(*v),
        CTerm::Global(..) => {}
        CTerm::App(_, args) => args.iter().for_each(|a| term_vars(a, out)),
    }
}

fn numeric(t: &Term) -> bool {
    match t {
        Term::Num(_) => true,
        Term::Add(a, b) | Term::Mul(a, b) => numeric(a) && numeric(b),
        Term::Pow(a, _) => numeric(a),
        _ => false,
    }
}

/// The global section `k · 1`.
fn numeral(env: &Environment, slot: SlotId, add: usize, zero: Section, one: Section, k: u64) -> Section {
    let top = env.frame().top();
    let f = &env.functions[add];
    let sheaf = env.sheaf(slot);
    let args: Vec<&Sheaf> = f.args.iter().map(|&a| env.sheaf(a)).collect();
    // The additive order of 1 divides the size of the group of global sections.
    let order = sheaf.num_sections(top) as u64;
    let mut acc = zero;
    for _ in 0..k % order {
        acc = f.morphism.apply(&args, sheaf, top, &[acc, one]);
    }
    acc
}
