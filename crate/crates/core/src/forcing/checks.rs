//! Meta-theorem checkers built on the evaluator.

use alloc::format;
use alloc::string::{String, ToString};
use alloc::sync::Arc;
use alloc::vec;
use alloc::vec::Vec;
use core::fmt;

use super::{Algebra, Binding, Environment, EnvError, Evaluator, ForceError, FunctionSymbol};
use crate::formula::{box_translate, Formula, Sort, Term};
use crate::frame::{Elem, Frame, Nucleus, Sublocale};
use crate::sheaf::{sheafify, Germ, Morphism, Section, Sheaf, Subsheaf};

/// One line of a report: `PASS location: detail` or `FAIL location: detail`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ReportLine {
    pub pass: bool,
    pub location: String,
    pub detail: String,
    /// Probes are expected to fail on some inputs and do not affect
    /// [`Report::passed`].
    pub probe: bool,
}

impl fmt::Display for ReportLine {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let status = if self.pass { "PASS" } else { "FAIL" };
        let probe = if self.probe { " (probe)" } else { "" };
        write!(f, "{status} {}{probe}: {}", self.location, self.detail)
    }
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Report {
    pub lines: Vec<ReportLine>,
}

impl Report {
    pub fn new() -> Report {
        Report::default()
    }

    pub fn push(&mut self, pass: bool, location: impl Into<String>, detail: impl Into<String>) {
        self.lines.push(ReportLine { pass, location: location.into(), detail: detail.into(), probe: false });
    }

    pub fn push_probe(&mut self, pass: bool, location: impl Into<String>, detail: impl Into<String>) {
        self.lines.push(ReportLine { pass, location: location.into(), detail: detail.into(), probe: true });
    }

    pub fn extend(&mut self, other: Report) {
        self.lines.extend(other.lines);
    }

    pub fn passed(&self) -> bool {
        self.lines.iter().all(|l| l.pass || l.probe)
    }

    pub fn failures(&self) -> impl Iterator<Item = &ReportLine> {
        self.lines.iter().filter(|l| !l.pass && !l.probe)
    }
}

impl fmt::Display for Report {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for line in &self.lines {
            writeln!(f, "{line}")?;
        }
        Ok(())
    }
}

// --- inference rules ---

/// `φ ⊢_x ψ`: in context `x`, `φ` entails `ψ`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Sequent {
    pub context: Vec<(String, Sort)>,
    pub antecedent: Formula,
    pub consequent: Formula,
}

impl Sequent {
    pub fn new(context: &[(String, Sort)], antecedent: Formula, consequent: Formula) -> Sequent {
        Sequent { context: context.to_vec(), antecedent, consequent }
    }

    /// `∀x. φ ⇒ ψ`, whose validity on `U` is that of the sequent.
    pub fn as_formula(&self) -> Formula {
        self.context.iter().rev().fold(
            Formula::implies(self.antecedent.clone(), self.consequent.clone()),
            |acc, (x, s)| Formula::forall(x, s.clone(), acc),
        )
    }
}

impl fmt::Display for Sequent {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let ctx: Vec<String> = self.context.iter().map(|(x, s)| format!("{x}:{s}")).collect();
        write!(f, "{} |-[{}] {}", self.antecedent, ctx.join(","), self.consequent)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Rule {
    Identity,
    Substitution,
    Cut,
    TopIntro,
    AndElimLeft,
    AndElimRight,
    AndIntro,
    BotElim,
    OrIntroLeft,
    OrIntroRight,
    OrElim,
    BigAndElim,
    BigAndIntro,
    BigOrIntro,
    BigOrElim,
    /// `φ ∧ ψ ⊢ χ` gives `φ ⊢ ψ ⇒ χ`.
    ImpliesIntro,
    /// `φ ⊢ ψ ⇒ χ` gives `φ ∧ ψ ⊢ χ`.
    ImpliesElim,
    /// `φ ⊢_{x,y} ψ` gives `∃y.φ ⊢_x ψ`.
    ExistsLeft,
    /// `∃y.φ ⊢_x ψ` gives `φ ⊢_{x,y} ψ`.
    ExistsInverse,
    /// `φ ⊢_{x,y} ψ` gives `φ ⊢_x ∀y.ψ`.
    ForallRight,
    /// `φ ⊢_x ∀y.ψ` gives `φ ⊢_{x,y} ψ`.
    ForallInverse,
    EqRefl,
    EqSubst,
    /// `⊤ ⊢ φ ∨ ¬φ`; not a rule of intuitionistic logic.
    ExcludedMiddle,
}

impl Rule {
    pub const ALL: [Rule; 24] = [
        Rule::Identity,
        Rule::Substitution,
        Rule::Cut,
        Rule::TopIntro,
        Rule::AndElimLeft,
        Rule::AndElimRight,
        Rule::AndIntro,
        Rule::BotElim,
        Rule::OrIntroLeft,
        Rule::OrIntroRight,
        Rule::OrElim,
        Rule::BigAndElim,
        Rule::BigAndIntro,
        Rule::BigOrIntro,
        Rule::BigOrElim,
        Rule::ImpliesIntro,
        Rule::ImpliesElim,
        Rule::ExistsLeft,
        Rule::ExistsInverse,
        Rule::ForallRight,
        Rule::ForallInverse,
        Rule::EqRefl,
        Rule::EqSubst,
        Rule::ExcludedMiddle,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Rule::Identity => "identity",
            Rule::Substitution => "substitution",
            Rule::Cut => "cut",
            Rule::TopIntro => "top-intro",
            Rule::AndElimLeft => "and-elim-left",
            Rule::AndElimRight => "and-elim-right",
            Rule::AndIntro => "and-intro",
            Rule::BotElim => "bot-elim",
            Rule::OrIntroLeft => "or-intro-left",
            Rule::OrIntroRight => "or-intro-right",
            Rule::OrElim => "or-elim",
            Rule::BigAndElim => "bigand-elim",
            Rule::BigAndIntro => "bigand-intro",
            Rule::BigOrIntro => "bigor-intro",
            Rule::BigOrElim => "bigor-elim",
            Rule::ImpliesIntro => "implies-intro",
            Rule::ImpliesElim => "implies-elim",
            Rule::ExistsLeft => "exists-left",
            Rule::ExistsInverse => "exists-inverse",
            Rule::ForallRight => "forall-right",
            Rule::ForallInverse => "forall-inverse",
            Rule::EqRefl => "eq-refl",
            Rule::EqSubst => "eq-subst",
            Rule::ExcludedMiddle => "excluded-middle",
        }
    }

    /// Whether the rule is sound intuitionistically.
    pub fn is_sound(self) -> bool {
        self != Rule::ExcludedMiddle
    }
}

/// A rule with concrete premises and conclusion.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RuleInstance {
    pub rule: Rule,
    pub premises: Vec<Sequent>,
    pub conclusion: Sequent,
}

type Ctx<'a> = &'a [(String, Sort)];

fn with_var(ctx: Ctx, y: &str, s: &Sort) -> Vec<(String, Sort)> {
    let mut out: Vec<(String, Sort)> = ctx.iter().filter(|(x, _)| x != y).cloned().collect();
    out.push((y.to_string(), s.clone()));
    out
}

fn free_in(phi: &Formula, y: &str) -> bool {
    phi.free_vars().iter().any(|(x, _)| x == y)
}

impl RuleInstance {
    fn axiom(rule: Rule, ctx: Ctx, a: Formula, b: Formula) -> RuleInstance {
        RuleInstance { rule, premises: Vec::new(), conclusion: Sequent::new(ctx, a, b) }
    }

    pub fn identity(ctx: Ctx, phi: Formula) -> RuleInstance {
        RuleInstance::axiom(Rule::Identity, ctx, phi.clone(), phi)
    }

    /// From `φ ⊢_x ψ` infer `φ[t/v] ⊢_y ψ[t/v]`, where `y` is `new_ctx`.
    pub fn substitution(ctx: Ctx, phi: Formula, psi: Formula, v: &str, t: &Term, new_ctx: Ctx) -> Result<RuleInstance, String> {
        let a = phi.substitute(v, t).map_err(|e| e.to_string())?;
        let b = psi.substitute(v, t).map_err(|e| e.to_string())?;
        Ok(RuleInstance {
            rule: Rule::Substitution,
            premises: vec![Sequent::new(ctx, phi, psi)],
            conclusion: Sequent::new(new_ctx, a, b),
        })
    }

    pub fn cut(ctx: Ctx, phi: Formula, psi: Formula, chi: Formula) -> RuleInstance {
        RuleInstance {
            rule: Rule::Cut,
            premises: vec![Sequent::new(ctx, phi.clone(), psi.clone()), Sequent::new(ctx, psi, chi.clone())],
            conclusion: Sequent::new(ctx, phi, chi),
        }
    }

    pub fn top_intro(ctx: Ctx, phi: Formula) -> RuleInstance {
        RuleInstance::axiom(Rule::TopIntro, ctx, phi, Formula::Top)
    }

    pub fn and_elim_left(ctx: Ctx, phi: Formula, psi: Formula) -> RuleInstance {
        RuleInstance::axiom(Rule::AndElimLeft, ctx, Formula::and(phi.clone(), psi), phi)
    }

    pub fn and_elim_right(ctx: Ctx, phi: Formula, psi: Formula) -> RuleInstance {
        RuleInstance::axiom(Rule::AndElimRight, ctx, Formula::and(phi, psi.clone()), psi)
    }

    pub fn and_intro(ctx: Ctx, phi: Formula, psi: Formula, chi: Formula) -> RuleInstance {
        RuleInstance {
            rule: Rule::AndIntro,
            premises: vec![Sequent::new(ctx, phi.clone(), psi.clone()), Sequent::new(ctx, phi.clone(), chi.clone())],
            conclusion: Sequent::new(ctx, phi, Formula::and(psi, chi)),
        }
    }

    pub fn bot_elim(ctx: Ctx, phi: Formula) -> RuleInstance {
        RuleInstance::axiom(Rule::BotElim, ctx, Formula::Bot, phi)
    }

    pub fn or_intro_left(ctx: Ctx, phi: Formula, psi: Formula) -> RuleInstance {
        RuleInstance::axiom(Rule::OrIntroLeft, ctx, phi.clone(), Formula::or(phi, psi))
    }

    pub fn or_intro_right(ctx: Ctx, phi: Formula, psi: Formula) -> RuleInstance {
        RuleInstance::axiom(Rule::OrIntroRight, ctx, psi.clone(), Formula::or(phi, psi))
    }

    pub fn or_elim(ctx: Ctx, phi: Formula, psi: Formula, chi: Formula) -> RuleInstance {
        RuleInstance {
            rule: Rule::OrElim,
            premises: vec![Sequent::new(ctx, phi.clone(), chi.clone()), Sequent::new(ctx, psi.clone(), chi.clone())],
            conclusion: Sequent::new(ctx, Formula::or(phi, psi), chi),
        }
    }

    pub fn big_and_elim(ctx: Ctx, family: Vec<Formula>, k: usize) -> RuleInstance {
        let member = family[k].clone();
        RuleInstance::axiom(Rule::BigAndElim, ctx, Formula::BigAnd(family), member)
    }

    pub fn big_and_intro(ctx: Ctx, psi: Formula, family: Vec<Formula>) -> RuleInstance {
        RuleInstance {
            rule: Rule::BigAndIntro,
            premises: family.iter().map(|f| Sequent::new(ctx, psi.clone(), f.clone())).collect(),
            conclusion: Sequent::new(ctx, psi, Formula::BigAnd(family)),
        }
    }

    pub fn big_or_intro(ctx: Ctx, family: Vec<Formula>, k: usize) -> RuleInstance {
        let member = family[k].clone();
        RuleInstance::axiom(Rule::BigOrIntro, ctx, member, Formula::BigOr(family))
    }

    pub fn big_or_elim(ctx: Ctx, family: Vec<Formula>, psi: Formula) -> RuleInstance {
        RuleInstance {
            rule: Rule::BigOrElim,
            premises: family.iter().map(|f| Sequent::new(ctx, f.clone(), psi.clone())).collect(),
            conclusion: Sequent::new(ctx, Formula::BigOr(family), psi),
        }
    }

    pub fn implies_intro(ctx: Ctx, phi: Formula, psi: Formula, chi: Formula) -> RuleInstance {
        RuleInstance {
            rule: Rule::ImpliesIntro,
            premises: vec![Sequent::new(ctx, Formula::and(phi.clone(), psi.clone()), chi.clone())],
            conclusion: Sequent::new(ctx, phi, Formula::implies(psi, chi)),
        }
    }

    pub fn implies_elim(ctx: Ctx, phi: Formula, psi: Formula, chi: Formula) -> RuleInstance {
        RuleInstance {
            rule: Rule::ImpliesElim,
            premises: vec![Sequent::new(ctx, phi.clone(), Formula::implies(psi.clone(), chi.clone()))],
            conclusion: Sequent::new(ctx, Formula::and(phi, psi), chi),
        }
    }

    /// Requires `y` not free in `ψ`.
    pub fn exists_left(ctx: Ctx, y: &str, sort: Sort, phi: Formula, psi: Formula) -> Result<RuleInstance, String> {
        if free_in(&psi, y) {
            return Err(format!("`{y}` is free in the consequent"));
        }
        let inner = with_var(ctx, y, &sort);
        let outer: Vec<(String, Sort)> = ctx.iter().filter(|(x, _)| x != y).cloned().collect();
        Ok(RuleInstance {
            rule: Rule::ExistsLeft,
            premises: vec![Sequent::new(&inner, phi.clone(), psi.clone())],
            conclusion: Sequent::new(&outer, Formula::exists(y, sort, phi), psi),
        })
    }

    pub fn exists_inverse(ctx: Ctx, y: &str, sort: Sort, phi: Formula, psi: Formula) -> Result<RuleInstance, String> {
        let down = RuleInstance::exists_left(ctx, y, sort, phi, psi)?;
        Ok(RuleInstance { rule: Rule::ExistsInverse, premises: vec![down.conclusion], conclusion: down.premises[0].clone() })
    }

    /// Requires `y` not free in `φ`.
    pub fn forall_right(ctx: Ctx, y: &str, sort: Sort, phi: Formula, psi: Formula) -> Result<RuleInstance, String> {
        if free_in(&phi, y) {
            return Err(format!("`{y}` is free in the antecedent"));
        }
        let inner = with_var(ctx, y, &sort);
        let outer: Vec<(String, Sort)> = ctx.iter().filter(|(x, _)| x != y).cloned().collect();
        Ok(RuleInstance {
            rule: Rule::ForallRight,
            premises: vec![Sequent::new(&inner, phi.clone(), psi.clone())],
            conclusion: Sequent::new(&outer, phi, Formula::forall(y, sort, psi)),
        })
    }

    pub fn forall_inverse(ctx: Ctx, y: &str, sort: Sort, phi: Formula, psi: Formula) -> Result<RuleInstance, String> {
        let down = RuleInstance::forall_right(ctx, y, sort, phi, psi)?;
        Ok(RuleInstance { rule: Rule::ForallInverse, premises: vec![down.conclusion], conclusion: down.premises[0].clone() })
    }

    /// `⊤ ⊢_x x = x`.
    pub fn eq_refl(ctx: Ctx, x: &str, sort: Sort) -> RuleInstance {
        let ctx = with_var(ctx, x, &sort);
        let v = Term::Var(x.to_string(), sort);
        RuleInstance::axiom(Rule::EqRefl, &ctx, Formula::Top, Formula::eq(v.clone(), v))
    }

    /// `(x = y) ∧ φ ⊢ φ[y/x]`.
    pub fn eq_subst(ctx: Ctx, x: &str, y: &str, sort: Sort, phi: Formula) -> Result<RuleInstance, String> {
        let ctx = with_var(&with_var(ctx, x, &sort), y, &sort);
        let vy = Term::Var(y.to_string(), sort.clone());
        let substituted = phi.substitute(x, &vy).map_err(|e| e.to_string())?;
        let eq = Formula::eq(Term::Var(x.to_string(), sort), vy);
        Ok(RuleInstance::axiom(Rule::EqSubst, &ctx, Formula::and(eq, phi), substituted))
    }

    pub fn excluded_middle(ctx: Ctx, phi: Formula) -> RuleInstance {
        RuleInstance::axiom(Rule::ExcludedMiddle, ctx, Formula::Top, Formula::or(phi.clone(), Formula::not(phi)))
    }
}

/// For every instance and every open `U`: if all premises are valid on `U`
/// then so is the conclusion. Excluded-middle instances are reported as
/// probes.
pub fn verify_inference_rules(ev: &mut Evaluator, instances: &[RuleInstance]) -> Result<Report, ForceError> {
    let frame = ev.environment().frame_arc().clone();
    let mut report = Report::new();
    for (k, inst) in instances.iter().enumerate() {
        let premises: Vec<Formula> = inst.premises.iter().map(Sequent::as_formula).collect();
        let conclusion = inst.conclusion.as_formula();
        let mut failure = None;
        for u in frame.elements() {
            let mut ok = true;
            for p in &premises {
                if !ev.force(p, u)? {
                    ok = false;
                    break;
                }
            }
            if ok && !ev.force(&conclusion, u)? {
                failure = Some(u);
                break;
            }
        }
        let location = format!("{} #{k}", inst.rule.name());
        let detail = match failure {
            None => format!("{}", inst.conclusion),
            Some(u) => format!("premises hold on {} but not {}", frame.label(u), inst.conclusion),
        };
        if inst.rule.is_sound() {
            report.push(failure.is_none(), location, detail);
        } else {
            report.push_probe(failure.is_none(), location, detail);
        }
    }
    Ok(report)
}

// --- locality ---

/// `U ⊨ φ` iff `Uᵢ ⊨ φ` for every member of a cover of `U`.
pub fn check_locality(ev: &mut Evaluator, phi: &Formula, u: Elem, cover: &[Elem]) -> Result<bool, ForceError> {
    let frame = ev.environment().frame_arc().clone();
    if frame.join_all(cover.iter().copied()) != u {
        return Err(ForceError::Unsupported(format!("the family does not cover {}", frame.label(u))));
    }
    let whole = ev.force(phi, u)?;
    let mut parts = true;
    for &c in cover {
        parts &= ev.force(phi, c)?;
    }
    Ok(whole == parts)
}

/// Monotonicity on every pair `V ≤ U` and locality on every cover of every
/// open. Covers are enumerated exhaustively when `U` has at most
/// `max_exhaustive` subopens; otherwise the covers by irreducibles and by
/// lower covers are used, which suffices once monotonicity holds.
pub fn locality_report(ev: &mut Evaluator, phi: &Formula, max_exhaustive: usize) -> Result<Report, ForceError> {
    let frame = ev.environment().frame_arc().clone();
    let mut report = Report::new();
    let mut forced = Vec::with_capacity(frame.len());
    for u in frame.elements() {
        forced.push(ev.force(phi, u)?);
    }
    let mut mono = None;
    'outer: for u in frame.elements() {
        for &v in frame.below(u) {
            if forced[u] && !forced[v] {
                mono = Some((u, v));
                break 'outer;
            }
        }
    }
    match mono {
        None => report.push(true, format!("monotonicity {phi}"), "all pairs"),
        Some((u, v)) => report.push(false, format!("monotonicity {phi}"), format!("holds on {} but not on {}", frame.label(u), frame.label(v))),
    }
    let mut bad = None;
    let mut covers = 0usize;
    for u in frame.elements() {
        let below = frame.below(u);
        if below.len() <= max_exhaustive {
            for mask in 1u64..(1u64 << below.len()) {
                let members = (0..below.len()).filter(|&i| mask >> i & 1 == 1).map(|i| below[i]);
                if frame.join_all(members.clone()) != u {
                    continue;
                }
                covers += 1;
                if forced[u] != members.clone().all(|c| forced[c]) {
                    bad = Some((u, members.collect::<Vec<_>>()));
                }
            }
        } else {
            for cover in [frame.irreducibles_below(u).to_vec(), frame.lower_covers(u)] {
                if frame.join_all(cover.iter().copied()) == u {
                    covers += 1;
                    if forced[u] != cover.iter().all(|&c| forced[c]) {
                        bad = Some((u, cover));
                    }
                }
            }
        }
    }
    match bad {
        None => report.push(true, format!("locality {phi}"), format!("{covers} covers")),
        Some((u, cover)) => {
            let names: Vec<&str> = cover.iter().map(|&c| frame.label(c)).collect();
            report.push(false, format!("locality {phi}"), format!("cover {{{}}} of {}", names.join(", "), frame.label(u)))
        }
    }
    Ok(report)
}

/// For a geometric `φ` and every point `x` (an irreducible `p = U_x`):
/// classical truth in the stalk, `U_x ⊨ φ`, and `V ⊨ φ` for some open
/// `V ∋ x` all agree; and `U ⊨ φ` iff `φ` holds in every stalk over `U`.
pub fn check_geometric_spreading(ev: &mut Evaluator, phi: &Formula, bindings: &[Binding]) -> Result<Report, ForceError> {
    if !phi.is_geometric() {
        return Err(ForceError::Unsupported(format!("`{phi}` is not geometric")));
    }
    let frame = ev.environment().frame_arc().clone();
    let domain = bindings.iter().fold(frame.top(), |acc, b| frame.meet(acc, b.open));
    let mut report = Report::new();
    let mut stalk = vec![false; frame.len()];
    for &p in frame.irreducibles_below(domain) {
        let classical = ev.stalk_holds(phi, p, bindings)?;
        let at_min = ev.force_with(phi, p, bindings)?;
        let mut nbhd = false;
        for &v in frame.below(domain) {
            if frame.leq(p, v) && ev.force_with(phi, v, bindings)? {
                nbhd = true;
                break;
            }
        }
        stalk[p] = classical;
        report.push(
            classical == at_min && at_min == nbhd,
            format!("point {}", frame.label(p)),
            format!("stalk={classical} minimal-open={at_min} neighbourhood={nbhd}"),
        );
    }
    let mut bad = None;
    for &u in frame.below(domain) {
        let everywhere = frame.irreducibles_below(u).iter().all(|&p| stalk[p]);
        if ev.force_with(phi, u, bindings)? != everywhere {
            bad = Some(u);
            break;
        }
    }
    report.push(
        bad.is_none(),
        "pointwise",
        bad.map_or_else(|| "every open agrees with its stalks".to_string(), |u| format!("disagreement on {}", frame.label(u))),
    );
    Ok(report)
}

// --- the box translation ---

/// The environment pulled back to the sublocale of `j`: sheaves by
/// sheafification, global sections by restriction to the least dense
/// subopen of the top, functions and subsheaves germwise, and named opens
/// by applying `j`.
pub fn sublocale_environment(env: &Environment, j: &Nucleus) -> Result<(Environment, Sublocale), EnvError> {
    let parent = env.frame_arc().clone();
    let sub = Sublocale::new(&parent, j);
    let frame = Arc::new(sub.frame().clone());
    let fixed = sub.fixed().to_vec();
    let least: Vec<Elem> = fixed.iter().map(|&q| crate::sheaf::least_dense(&parent, j, q)).collect();
    let top_base = least[sub.from_parent(parent.top()).expect("top is fixed")];
    let irr: Vec<Elem> = frame.irreducibles().to_vec();

    let mut out = Environment::new(frame.clone());
    out.schema_bound = env.schema_bound;
    for (name, sheaf) in &env.sheaves {
        let (pulled, _) = sheafify(sheaf, j)?;
        out.sheaves.push((name.clone(), Arc::new(pulled)));
        out.algebra.push(None);
    }
    // A germ at a sublocale irreducible q is a section over V_q upstairs.
    let section_of_germ = |s: &Sheaf, qi: usize, g: Germ| -> Section {
        let q = irr[qi];
        s.sections(q).find(|&t| s.germ_at(q, t, qi) == g).expect("germ of a section over an irreducible")
    };
    for f in &env.functions {
        let args: Vec<&Sheaf> = f.args.iter().map(|&a| &*env.sheaves[a].1).collect();
        let result = &*env.sheaves[f.result].1;
        let new_args: Vec<Arc<Sheaf>> = f.args.iter().map(|&a| out.sheaves[a].1.clone()).collect();
        let new_result = out.sheaves[f.result].1.clone();
        let arg_refs: Vec<&Sheaf> = new_args.iter().map(|a| &**a).collect();
        let morphism = Morphism::from_germ_fn(&arg_refs, &new_result, |qi, germs| {
            let v = least[irr[qi]];
            let sections: Vec<Section> = germs.iter().zip(&new_args).map(|(&g, a)| section_of_germ(a, qi, g)).collect();
            let r = f.morphism.apply(&args, result, v, &sections);
            new_result.germ_at(irr[qi], r, qi)
        })?;
        out.functions.push(FunctionSymbol { name: f.name.clone(), args: f.args.clone(), result: f.result, morphism });
    }
    for (name, id, s) in &env.constants {
        let base = &env.sheaves[*id].1;
        out.constants.push((name.clone(), *id, base.restrict(parent.top(), top_base, *s)));
    }
    let restrict_top = |id: usize, s: Section| env.sheaves[id].1.restrict(parent.top(), top_base, s);
    for (id, alg) in env.algebra.iter().enumerate() {
        out.algebra[id] = alg.as_ref().map(|a| match a {
            Algebra::Ring { add, mul, neg, zero, one } => {
                Algebra::Ring { add: *add, mul: *mul, neg: *neg, zero: restrict_top(id, *zero), one: restrict_top(id, *one) }
            }
            Algebra::Module { ring, add, act, zero } => {
                Algebra::Module { ring: *ring, add: *add, act: *act, zero: restrict_top(id, *zero) }
            }
        });
    }
    for (name, id, subsheaf) in &env.subsheaves {
        let new = &out.sheaves[*id].1;
        let germs = (0..irr.len())
            .map(|qi| {
                let v = least[irr[qi]];
                (0..new.num_germs(qi)).map(|g| subsheaf.contains(v, section_of_germ(new, qi, g as Germ))).collect()
            })
            .collect();
        let pulled = Subsheaf::from_germs(new, germs)?;
        out.subsheaves.push((name.clone(), *id, pulled));
    }
    for (name, w) in &env.props {
        out.props.push((name.clone(), sub.from_parent(j.apply(*w)).expect("j lands in fixed points")));
    }
    Ok((out, sub))
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BoxTheoremReport {
    pub translated: Formula,
    /// Per open `U`: (`U ⊨ φ^□`, `j(U) ⊨ φ` in the sublocale).
    pub rows: Vec<(Elem, bool, bool)>,
}

impl BoxTheoremReport {
    pub fn agrees(&self) -> bool {
        self.rows.iter().all(|&(_, l, r)| l == r)
    }
}

/// Compares `U ⊨ φ^□` in the environment with `j(U) ⊨ φ` over the sublocale
/// of the nucleus named `j`, for every open `U`.
pub fn check_box_theorem(env: &Environment, j: &str, phi: &Formula) -> Result<BoxTheoremReport, ForceError> {
    if phi.has_modal() {
        return Err(ForceError::Unsupported("the formula already contains modal operators".to_string()));
    }
    let nucleus = env.nucleus(j).ok_or_else(|| ForceError::Unresolved(j.to_string()))?.clone();
    let translated = box_translate(phi, j, false).formula;
    let (sub_env, sub) = sublocale_environment(env, &nucleus).map_err(|e| match e {
        EnvError::Sheaf(s) => ForceError::Sheaf(s),
        other => ForceError::Unsupported(other.to_string()),
    })?;
    let mut left = Evaluator::new(env);
    let mut right = Evaluator::new(&sub_env);
    let mut rows = Vec::new();
    for u in env.frame().elements() {
        let l = left.force(&translated, u)?;
        let r = right.force(phi, sub.from_parent(nucleus.apply(u)).expect("fixed"))?;
        rows.push((u, l, r));
    }
    Ok(BoxTheoremReport { translated, rows })
}

// --- metaproperties ---

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Metaproperty {
    /// `X ⊨ ⋁ᵢ φᵢ` implies `X ⊨ φᵢ` for some `i`, for directed families.
    Quasicompact,
    /// The same for arbitrary families.
    Local,
    /// `X ⊨ ¬(φ ∧ ψ)` implies `X ⊨ ¬φ` or `X ⊨ ¬ψ`, and `X ⊭ ⊥`.
    Irreducible,
}

impl Metaproperty {
    pub fn name(self) -> &'static str {
        match self {
            Metaproperty::Quasicompact => "quasicompact",
            Metaproperty::Local => "local",
            Metaproperty::Irreducible => "irreducible",
        }
    }

    /// The topological property, read off the frame of opens.
    pub fn holds_topologically(self, frame: &Frame) -> bool {
        let top = frame.top();
        match self {
            // Every cover of the top by finitely many opens has a finite subcover.
            Metaproperty::Quasicompact => true,
            // Every cover of the top contains the top.
            Metaproperty::Local => {
                top != frame.bottom()
                    && frame.elements().all(|a| frame.elements().all(|b| a == top || b == top || frame.join(a, b) != top))
            }
            Metaproperty::Irreducible => {
                top != frame.bottom()
                    && frame.elements().all(|a| {
                        frame.elements().all(|b| a == frame.bottom() || b == frame.bottom() || frame.meet(a, b) != frame.bottom())
                    })
            }
        }
    }
}

fn open_prop(k: Elem) -> String {
    format!("__o{k}")
}

/// Checks the metaproperty on the given instances and on canonical
/// instances built from propositional constants for every open, and compares
/// the outcome with the topological property.
///
/// Instances are families for `Quasicompact` and `Local`, and pairs for
/// `Irreducible`.
pub fn check_metaproperty(env: &Environment, kind: Metaproperty, instances: &[Vec<Formula>]) -> Result<Report, ForceError> {
    let frame = env.frame_arc().clone();
    let mut env = env.clone();
    for u in frame.elements() {
        if env.prop(&open_prop(u)).is_none() {
            env.props.push((open_prop(u), u));
        }
    }
    let opens: Vec<Formula> = frame.elements().map(|u| Formula::prop(&open_prop(u))).collect();
    let mut all = instances.to_vec();
    match kind {
        // The directed family of all opens.
        Metaproperty::Quasicompact => all.push(opens.clone()),
        // The irreducibles as a family: it covers the top, and no member is
        // the top unless the space is local.
        Metaproperty::Local => all.push(frame.irreducibles().iter().map(|&p| opens[p].clone()).collect()),
        Metaproperty::Irreducible => {
            for a in frame.elements() {
                for b in frame.elements() {
                    if a < b && frame.meet(a, b) == frame.bottom() {
                        all.push(vec![opens[a].clone(), opens[b].clone()]);
                    }
                }
            }
            all.push(vec![Formula::Top, Formula::Top]);
        }
    }
    let mut ev = Evaluator::new(&env);
    let top = frame.top();
    let topological = kind.holds_topologically(&frame);
    let mut report = Report::new();
    let mut all_hold = true;
    for (k, family) in all.iter().enumerate() {
        let holds = match kind {
            Metaproperty::Quasicompact | Metaproperty::Local => {
                if kind == Metaproperty::Quasicompact {
                    let mut values = Vec::with_capacity(family.len());
                    for f in family {
                        values.push(ev.truth_value(f)?);
                    }
                    let directed = values.iter().all(|&a| values.iter().all(|&b| values.iter().any(|&c| frame.leq(a, c) && frame.leq(b, c))));
                    if !directed {
                        return Err(ForceError::Unsupported(format!("family #{k} is not directed")));
                    }
                }
                let big = Formula::BigOr(family.clone());
                let mut some = false;
                for f in family {
                    if ev.force(f, top)? {
                        some = true;
                        break;
                    }
                }
                !ev.force(&big, top)? || some
            }
            Metaproperty::Irreducible => {
                let [phi, psi] = match family.as_slice() {
                    [a, b] => [a, b],
                    _ => return Err(ForceError::Unsupported(format!("instance #{k} is not a pair"))),
                };
                let premise = ev.force(&Formula::not(Formula::and(phi.clone(), psi.clone())), top)?;
                let split = ev.force(&Formula::not(phi.clone()), top)? || ev.force(&Formula::not(psi.clone()), top)?;
                let consistent = !ev.force(&Formula::Bot, top)?;
                (!premise || split) && consistent
            }
        };
        all_hold &= holds;
        let shown: Vec<String> = family.iter().map(|f| f.to_string()).collect();
        report.push(
            holds || !topological,
            format!("{} #{k}", kind.name()),
            format!("{} [{}]", if holds { "holds" } else { "violated" }, shown.join("; ")),
        );
    }
    report.push(
        topological == all_hold,
        format!("{} vs topology", kind.name()),
        format!("topological={topological} metaproperty={all_hold}"),
    );
    Ok(report)
}
