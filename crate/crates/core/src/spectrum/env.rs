//! The spectrum as a forcing environment, and the checks that need one.

use alloc::format;
use alloc::string::{String, ToString};
use alloc::vec::Vec;

use super::{
    generic_filter, structure_sheaf, tilde, GenericFilter, SpecFrame, SpectrumError, StructureSheaf, Tilde,
};
use crate::finring::{FinModule, FinRing, LinearMap, Subset};
use crate::forcing::{comprehend, Binding, EnvError, Environment, Evaluator, ForceError, Report, SheafId};
use crate::formula::{parse, Formula, Sort};
use crate::frame::Elem;
use crate::sheaf::{Germ, Subsheaf};

/// `Spec(A)` with the sheaves a formula may talk about:
///
/// - `O`: the structure sheaf, a ring via `add`, `mul`, `neg`, `zero`, `one`,
///   with the subsheaves `inv` and `nilp` of invertible and nilpotent elements.
/// - `A`: the constant sheaf, a ring via `addA`, `mulA`, `negA`, `zeroA`,
///   `oneA` (and `el<i>` for the `i`-th element), with the generic filter `Fil`;
///   `loc : A → O` is `a ↦ a/1`.
/// - modules added by [`SpecEnvironment::add_module`].
///
/// The default schema bound is `|A|`.
#[derive(Debug, Clone)]
pub struct SpecEnvironment {
    pub spec: SpecFrame,
    pub structure: StructureSheaf,
    pub filter: GenericFilter,
    env: Environment,
    pub o: SheafId,
    pub a: SheafId,
    modules: Vec<(String, SheafId, FinModule, Tilde)>,
}

fn ring_ops(env: &mut Environment, id: SheafId, ring: &FinRing, names: [&str; 3]) -> Result<(), SpectrumError> {
    let r = ring.clone();
    env.add_function_fn(names[0], &[id, id], id, move |_, g| r.add(g[0] as usize, g[1] as usize) as Germ)?;
    let r = ring.clone();
    env.add_function_fn(names[1], &[id, id], id, move |_, g| r.mul(g[0] as usize, g[1] as usize) as Germ)?;
    let r = ring.clone();
    env.add_function_fn(names[2], &[id], id, move |_, g| r.neg(g[0] as usize) as Germ)?;
    Ok(())
}

/// `el<i>` names the constant section of the `i`-th ring element, so that
/// rings whose elements are not numerals can still be written about.
fn element_constants(env: &mut Environment, a: SheafId, filter: &GenericFilter, ring: &FinRing) -> Result<(), EnvError> {
    let top = env.frame().top();
    for x in ring.elements() {
        env.add_constant(&format!("el{x}"), a, filter.constant_section(top, x))?;
    }
    Ok(())
}

impl SpecEnvironment {
    /// Builds the spectrum and checks the generic filter: `D(f) ⊨ x ∈ F` iff
    /// `f ∈ √(x)` for all `f, x`, and the filter axioms are forced on `X`.
    pub fn new(ring: &FinRing) -> Result<SpecEnvironment, SpectrumError> {
        let spec = SpecFrame::new(ring);
        let structure = structure_sheaf(&spec)?;
        let filter = generic_filter(&spec)?;
        let frame = spec.frame_arc().clone();
        let top = frame.top();
        let mut env = Environment::new(frame.clone());

        let o = env.add_sheaf_arc("O", structure.sheaf.clone())?;
        let stalks = structure.stalks.clone();
        {
            let st = stalks.clone();
            env.add_function_fn("add", &[o, o], o, move |pi, g| st[pi].ring.add(g[0] as usize, g[1] as usize) as Germ)?;
            let st = stalks.clone();
            env.add_function_fn("mul", &[o, o], o, move |pi, g| st[pi].ring.mul(g[0] as usize, g[1] as usize) as Germ)?;
            let st = stalks.clone();
            env.add_function_fn("neg", &[o], o, move |pi, g| st[pi].ring.neg(g[0] as usize) as Germ)?;
        }
        env.add_constant("zero", o, structure.global(ring.zero()))?;
        env.add_constant("one", o, structure.global(ring.one()))?;
        env.set_ring(o, "add", "mul", "zero", "one")?;
        env.set_ring_negation(o, "neg")?;
        let units = stalks.iter().map(|l| l.ring.elements().map(|c| l.ring.is_invertible(c)).collect()).collect();
        env.add_subsheaf("inv", o, Subsheaf::from_germs(&structure.sheaf, units)?)?;
        let nil = stalks.iter().map(|l| l.ring.elements().map(|c| l.ring.is_nilpotent(c)).collect()).collect();
        env.add_subsheaf("nilp", o, Subsheaf::from_germs(&structure.sheaf, nil)?)?;

        let a = env.add_sheaf_arc("A", filter.constant.clone())?;
        ring_ops(&mut env, a, ring, ["addA", "mulA", "negA"])?;
        env.add_constant("zeroA", a, filter.constant_section(top, ring.zero()))?;
        env.add_constant("oneA", a, filter.constant_section(top, ring.one()))?;
        element_constants(&mut env, a, &filter, ring)?;
        env.set_ring(a, "addA", "mulA", "zeroA", "oneA")?;
        env.set_ring_negation(a, "negA")?;
        env.add_subsheaf("Fil", a, filter.filter.clone())?;
        let st = stalks.clone();
        env.add_function_fn("loc", &[a], o, move |pi, g| st[pi].map[g[0] as usize] as Germ)?;
        env.set_schema_bound(ring.len() as u32);

        let out = SpecEnvironment { spec, structure, filter, env, o, a, modules: Vec::new() };
        out.check_generic_filter()?;
        Ok(out)
    }

    fn check_generic_filter(&self) -> Result<(), SpectrumError> {
        let ring = self.spec.ring();
        let mut ev = Evaluator::new(&self.env);
        let member = parse("x in Fil").expect("fixed formula");
        for f in ring.elements() {
            let u = self.spec.d(f);
            for x in ring.elements() {
                let b = [Binding::new("x", Sort::named("A"), u, self.filter.constant_section(u, x))];
                let forced = ev.force_with(&member, u, &b)?;
                let expected = self.spec.ideal(self.spec.d(x)) & crate::finring::bit(f) != 0;
                if forced != expected {
                    return Err(SpectrumError::Mismatch(format!(
                        "D({}) ⊨ {} ∈ F is {forced}, but f ∈ √(x) is {expected}",
                        ring.label(f),
                        ring.label(x)
                    )));
                }
            }
        }
        let axioms = parse(super::statements::FILTER_AXIOMS).expect("fixed formula");
        if !ev.force(&axioms, self.env.frame().top())? {
            return Err(SpectrumError::Mismatch("the generic filter is not internally a filter".to_string()));
        }
        Ok(())
    }

    pub fn environment(&self) -> &Environment {
        &self.env
    }

    pub fn ring(&self) -> &FinRing {
        self.spec.ring()
    }

    pub fn top(&self) -> Elem {
        self.env.frame().top()
    }

    /// Registers `M̃` as the sheaf `name`, an `O`-module via `add_<name>`,
    /// `act_<name>` and `zero_<name>`.
    pub fn add_module(&mut self, name: &str, module: &FinModule) -> Result<SheafId, SpectrumError> {
        let t = tilde(&self.spec, &self.structure, module)?;
        let id = self.env.add_sheaf_arc(name, t.sheaf.clone())?;
        let st = t.stalks.clone();
        let add = format!("add_{name}");
        let act = format!("act_{name}");
        let zero = format!("zero_{name}");
        self.env.add_function_fn(&add, &[id, id], id, move |pi, g| st[pi].module.add(g[0] as usize, g[1] as usize) as Germ)?;
        let st = t.stalks.clone();
        self.env.add_function_fn(&act, &[self.o, id], id, move |pi, g| st[pi].module.act(g[0] as usize, g[1] as usize) as Germ)?;
        let top = self.top();
        let zero_section = super::section_from_germs(&t.sheaf, top, |pi| t.stalks[pi].module.zero() as Germ)
            .expect("zero glues");
        self.env.add_constant(&zero, id, zero_section)?;
        self.env.set_module(id, self.o, &add, &act, &zero)?;
        self.modules.push((name.to_string(), id, module.clone(), t));
        Ok(id)
    }

    fn module(&self, name: &str) -> Result<&(String, SheafId, FinModule, Tilde), SpectrumError> {
        self.modules.iter().find(|m| m.0 == name).ok_or_else(|| SpectrumError::UnknownModule(name.to_string()))
    }

    pub fn tilde(&self, name: &str) -> Result<&Tilde, SpectrumError> {
        Ok(&self.module(name)?.3)
    }

    /// Registers `f̃ : M̃ → Ñ` for a linear map `f : M → N`.
    pub fn add_module_map(&mut self, name: &str, from: &str, to: &str, map: &LinearMap) -> Result<(), SpectrumError> {
        let (_, src, m, tm) = self.module(from)?.clone();
        let (_, dst, n, tn) = self.module(to)?.clone();
        if !m.is_linear(&n, &map.table) {
            return Err(SpectrumError::Mismatch(format!("`{name}` is not linear")));
        }
        let table = map.table.clone();
        self.env.add_function_fn(name, &[src], dst, move |pi, g| {
            let (x, s) = tm.stalks[pi].representative(g[0] as usize);
            tn.stalks[pi].fraction(table[x], s).expect("same denominators") as Germ
        })?;
        Ok(())
    }

    /// `Ñ ⊆ M̃` for a submodule `N` of the module registered as `module`.
    pub fn tilde_submodule(&self, module: &str, n: Subset) -> Result<Subsheaf, SpectrumError> {
        let (_, _, m, t) = self.module(module)?;
        t.submodule(&self.structure, m, n)
    }

    pub fn add_subsheaf(&mut self, name: &str, sheaf: &str, sub: Subsheaf) -> Result<(), SpectrumError> {
        let id = self.env.sheaf_id(sheaf).ok_or_else(|| SpectrumError::UnknownModule(sheaf.to_string()))?;
        self.env.add_subsheaf(name, id, sub)?;
        Ok(())
    }

    pub fn force(&self, phi: &Formula, u: Elem) -> Result<bool, ForceError> {
        Evaluator::new(&self.env).force(phi, u)
    }

    /// Forces a formula given as text on `X`.
    pub fn holds(&self, text: &str) -> Result<bool, SpectrumError> {
        let phi = parse(text).map_err(|e| SpectrumError::Mismatch(e.to_string()))?;
        Ok(self.force(&phi, self.top())?)
    }
}

/// An environment holding only the constant sheaf `A̲` with its ring
/// structure, so that comprehension formulas mentioning anything else fail
/// to resolve.
fn constant_only(sp: &SpecEnvironment) -> Result<Environment, SpectrumError> {
    let ring = sp.ring();
    let top = sp.top();
    let mut env = Environment::new(sp.spec.frame_arc().clone());
    let a = env.add_sheaf_arc("A", sp.filter.constant.clone())?;
    ring_ops(&mut env, a, ring, ["addA", "mulA", "negA"])?;
    env.add_constant("zeroA", a, sp.filter.constant_section(top, ring.zero()))?;
    env.add_constant("oneA", a, sp.filter.constant_section(top, ring.one()))?;
    element_constants(&mut env, a, &sp.filter, ring)?;
    env.set_ring(a, "addA", "mulA", "zeroA", "oneA")?;
    env.set_ring_negation(a, "negA")?;
    env.set_schema_bound(ring.len() as u32);
    Ok(env)
}

/// The ideal `{var : A | φ}` of `A̲`, registered as `I` next to `Fil`.
fn comprehension_ideal(sp: &SpecEnvironment, var: &str, phi: &Formula) -> Result<Environment, SpectrumError> {
    let restricted = constant_only(sp)?;
    let mut ev = Evaluator::new(&restricted);
    let sub = comprehend(&mut ev, &Sort::named("A"), var, phi).map_err(|e| match e {
        ForceError::Unresolved(name) => {
            SpectrumError::NonConstantParameter(format!("`{name}` is not a constant-sheaf parameter"))
        }
        other => SpectrumError::Force(other),
    })?;
    let frame = restricted.frame_arc().clone();
    let ring = sp.ring();
    // Constant sections spread from inhabited opens to the whole space.
    for u in frame.elements().filter(|&u| u != frame.bottom()) {
        for x in ring.elements() {
            let here = sub.contains(u, sp.filter.constant_section(u, x));
            let everywhere = sub.contains(frame.top(), sp.filter.constant_section(frame.top(), x));
            if here && !everywhere {
                return Err(SpectrumError::NonConstantParameter(format!(
                    "{} lies in the family over {} but not globally",
                    ring.label(x),
                    frame.label(u)
                )));
            }
        }
    }
    let mut env = sp.env.clone();
    env.add_subsheaf("I", sp.a, sub)?;
    let ideal = parse(
        "zeroA in I /\\ (forall s,t:A. s in I /\\ t in I => s+t in I) /\\ (forall s,t:A. s in I => t*s in I)",
    )
    .expect("fixed formula");
    if !Evaluator::new(&env).force(&ideal, frame.top())? {
        return Err(SpectrumError::NotAnIdeal(phi.to_string()));
    }
    Ok(env)
}

/// For every `f`: if `D(f) ⊨ "I ∩ F is inhabited"` then `D(f) ⊨ fⁿ ∈ I` for
/// some `n ≤ |A|`. One line per `f`.
pub fn check_generic_metaproperty(sp: &SpecEnvironment, var: &str, phi: &Formula) -> Result<Report, SpectrumError> {
    let env = comprehension_ideal(sp, var, phi)?;
    let ring = sp.ring();
    let mut ev = Evaluator::new(&env);
    let meets = parse("exists x:A. x in I /\\ x in Fil").expect("fixed formula");
    let member = parse("y in I").expect("fixed formula");
    let mut report = Report::new();
    for f in ring.elements() {
        let u = sp.spec.d(f);
        let location = format!("f={}", ring.label(f));
        if !ev.force(&meets, u)? {
            report.push(true, &location, "I ∩ F is not inhabited on D(f)");
            continue;
        }
        let mut found = None;
        for n in 0..=ring.len() {
            let b = [Binding::new("y", Sort::named("A"), u, sp.filter.constant_section(u, ring.pow(f, n)))];
            if ev.force_with(&member, u, &b)? {
                found = Some(n);
                break;
            }
        }
        match found {
            Some(n) => report.push(true, &location, format!("D(f) ⊨ f^{n} ∈ I")),
            None => report.push(false, &location, "I ∩ F is inhabited on D(f) but no power of f lies in I"),
        }
    }
    Ok(report)
}

/// Whether `X ⊨ ("I ∩ F inhabited" ⇒ ⋁ₙ fⁿ ∈ I)` for the constant `f`.
pub fn check_stronger_metaproperty(sp: &SpecEnvironment, var: &str, phi: &Formula, f: usize) -> Result<bool, SpectrumError> {
    let env = comprehension_ideal(sp, var, phi)?;
    let top = sp.top();
    let stronger = parse("(exists x:A. x in I /\\ x in Fil) => bigvee[n=0..] f^n in I").expect("fixed formula");
    let b = [Binding::new("f", Sort::named("A"), top, sp.filter.constant_section(top, f))];
    Ok(Evaluator::new(&env).force_with(&stronger, top, &b)?)
}

/// The verdict of the internal quasicoherence condition, with a witness
/// `(U, f, s)` on failure: `U` forces `inv(f) ⇒ s ∈ G` but no `fⁿ s ∈ G`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct QuasicoherenceVerdict {
    pub holds: bool,
    pub counterexample: Option<(String, String, String)>,
}

/// Forces `∀f:O ∀s:M. (inv(f) ⇒ s ∈ G) ⇒ ⋁_{n ≤ |A|} fⁿ s ∈ G` on `X`.
pub fn check_internal_quasicoherence(
    sp: &SpecEnvironment,
    module: &str,
    g: &Subsheaf,
) -> Result<QuasicoherenceVerdict, SpectrumError> {
    let (_, mid, _, _) = sp.module(module)?;
    let mut env = sp.env.clone();
    let gname = "G__";
    env.add_subsheaf(gname, *mid, g.clone())?;
    let mut ev = Evaluator::new(&env);
    let statement = parse(&super::statements::quasicoherent(module, gname)).expect("fixed formula");
    let top = env.frame().top();
    if ev.force(&statement, top)? {
        return Ok(QuasicoherenceVerdict { holds: true, counterexample: None });
    }
    let premise = parse(&format!("inv(f) => s in {gname}")).expect("fixed formula");
    let conclusion = parse(&format!("bigvee[n=0..] f^n * s in {gname}")).expect("fixed formula");
    let frame = env.frame_arc().clone();
    let o = env.sheaf(sp.o);
    let m = env.sheaf(*mid);
    for u in frame.elements() {
        for f in o.sections(u) {
            for s in m.sections(u) {
                let b = [Binding::new("f", Sort::named("O"), u, f), Binding::new("s", Sort::named(module), u, s)];
                if ev.force_with(&premise, u, &b)? && !ev.force_with(&conclusion, u, &b)? {
                    let witness = (frame.label(u).to_string(), o.section_label(u, f), m.section_label(u, s));
                    return Ok(QuasicoherenceVerdict { holds: false, counterexample: Some(witness) });
                }
            }
        }
    }
    Err(SpectrumError::Mismatch("quasicoherence fails but no witness was found".to_string()))
}
