//! Constructions phrased in the internal language and evaluated by forcing:
//! set comprehension, the plus construction for a modal operator, and the
//! internal conditions for separatedness, sheafhood and flabbiness.

use alloc::format;
use alloc::string::{String, ToString};
use alloc::sync::Arc;
use alloc::vec;
use alloc::vec::Vec;
use hashbrown::HashMap;

use super::{Binding, EnvError, Environment, Evaluator, ForceError};
use crate::formula::{parse, Formula, Sort};
use crate::frame::Nucleus;
use crate::sheaf::{Germ, Morphism, Section, Sheaf, Subsheaf};

fn env_err(e: EnvError) -> ForceError {
    match e {
        EnvError::Sheaf(s) => ForceError::Sheaf(s),
        other => ForceError::Unsupported(other.to_string()),
    }
}

fn formula(text: &str) -> Formula {
    parse(text).expect("built-in formula parses")
}

fn sort_f() -> Sort {
    Sort::named("F")
}

fn sort_pf() -> Sort {
    Sort::power(sort_f())
}

/// An environment holding `F` and, if given, the nucleus as `j`.
fn env_for(sheaf: &Sheaf, j: Option<&Nucleus>) -> Result<Environment, ForceError> {
    let mut env = Environment::new(sheaf.frame_arc().clone());
    env.add_sheaf("F", sheaf.clone()).map_err(env_err)?;
    if let Some(j) = j {
        env.add_nucleus("j", j.clone()).map_err(env_err)?;
    }
    Ok(env)
}

const SINGLETON: &str = "box[j]((exists x:F. x in S) /\\ (forall x,y:F. (x in S /\\ y in S) => x = y))";

/// `{s ∈ F(U) : U ⊨ φ(s)}` over every open, for the sort's sheaf.
pub fn comprehend(ev: &mut Evaluator, sort: &Sort, var: &str, phi: &Formula) -> Result<Subsheaf, ForceError> {
    let sheaf = ev.sheaf_of_sort(sort)?;
    let frame = sheaf.frame_arc().clone();
    let mut members = Vec::with_capacity(frame.len());
    for u in frame.elements() {
        let mut row = Vec::with_capacity(sheaf.num_sections(u));
        for s in sheaf.sections(u) {
            row.push(ev.force_with(phi, u, &[Binding::new(var, sort.clone(), u, s)])?);
        }
        members.push(row);
    }
    Ok(Subsheaf::from_sections(&sheaf, members)?)
}

/// `∀x,y:F. □(x = y) ⇒ x = y`.
pub fn is_box_separated(sheaf: &Sheaf, j: &Nucleus) -> Result<bool, ForceError> {
    let env = env_for(sheaf, Some(j))?;
    let mut ev = Evaluator::new(&env);
    ev.force(&formula("forall x,y:F. box[j](x = y) => x = y"), env.frame().top())
}

/// `□`-separated, and `∀S ⊆ F. □(S is a singleton) ⇒ ∃x:F. □(x ∈ S)`.
pub fn is_box_sheaf(sheaf: &Sheaf, j: &Nucleus) -> Result<bool, ForceError> {
    if !is_box_separated(sheaf, j)? {
        return Ok(false);
    }
    let env = env_for(sheaf, Some(j))?;
    let mut ev = Evaluator::new(&env);
    let phi = formula(&format!("forall S:P(F). {SINGLETON} => exists x:F. box[j](x in S)"));
    ev.force(&phi, env.frame().top())
}

/// The internal condition for flabbiness: every subsingleton `K ⊆ F` has an
/// `s` with `s ∈ K` as soon as `K` is inhabited.
pub fn flabby_internal(sheaf: &Sheaf) -> Result<bool, ForceError> {
    let env = env_for(sheaf, None)?;
    let mut ev = Evaluator::new(&env);
    let phi = formula(
        "forall K:P(F). (forall s,t:F. (s in K /\\ t in K) => s = t) => exists s:F. ((exists t:F. t in K) => s in K)",
    );
    ev.force(&phi, env.frame().top())
}

/// `F⁺ = {S ⊆ F | □(S is a singleton)} / □(S = T)` with its canonical map
/// `x ↦ [{x}]`.
#[derive(Debug, Clone)]
pub struct InternalPlus {
    pub plus: Sheaf,
    pub canonical: Morphism,
    /// Per irreducible, the subset (a section of `P(F)` over it) chosen to
    /// represent each germ of `F⁺`.
    pub representatives: Vec<Vec<Section>>,
}

impl InternalPlus {
    /// Whether `F → F⁺` is injective; checked on germs at the irreducibles.
    pub fn canonical_injective(&self, base: &Sheaf) -> bool {
        (0..self.representatives.len()).all(|pi| {
            let mut images: Vec<Germ> = (0..base.num_germs(pi) as Germ).map(|g| self.canonical.apply_germs(pi, &[g])).collect();
            images.sort_unstable();
            images.windows(2).all(|w| w[0] != w[1])
        })
    }

    pub fn canonical_surjective(&self, base: &Sheaf) -> bool {
        (0..self.representatives.len()).all(|pi| {
            let hit: Vec<Germ> = (0..base.num_germs(pi) as Germ).map(|g| self.canonical.apply_germs(pi, &[g])).collect();
            (0..self.plus.num_germs(pi) as Germ).all(|h| hit.contains(&h))
        })
    }
}

/// The plus construction of the sheaf `F` for the modal operator of `j`,
/// computed inside the topos: admissibility of `S` and the relation
/// `□(S = T)` are decided by forcing at every irreducible.
pub fn plus_internal(sheaf: &Sheaf, j: &Nucleus) -> Result<InternalPlus, ForceError> {
    let env = env_for(sheaf, Some(j))?;
    let mut ev = Evaluator::new(&env);
    let power: Arc<Sheaf> = ev.sheaf_of_sort(&sort_pf())?;
    let frame = sheaf.frame_arc().clone();
    let irr = frame.irreducibles().to_vec();
    let admissible = formula(SINGLETON);
    let related = formula("box[j](S = T)");
    let singleton_of = formula("x in S /\\ (forall y:F. y in S => y = x)");

    let mut reps: Vec<Vec<Section>> = Vec::with_capacity(irr.len());
    let mut class_of: Vec<HashMap<Section, Germ>> = Vec::with_capacity(irr.len());
    for &p in &irr {
        let mut classes: Vec<Section> = Vec::new();
        let mut map = HashMap::new();
        for s in power.sections(p) {
            if !ev.force_with(&admissible, p, &[Binding::new("S", sort_pf(), p, s)])? {
                continue;
            }
            let mut found = None;
            for (c, &r) in classes.iter().enumerate() {
                let b = [Binding::new("S", sort_pf(), p, r), Binding::new("T", sort_pf(), p, s)];
                if ev.force_with(&related, p, &b)? {
                    found = Some(c);
                    break;
                }
            }
            let c = found.unwrap_or_else(|| {
                classes.push(s);
                classes.len() - 1
            });
            map.insert(s, c as Germ);
        }
        reps.push(classes);
        class_of.push(map);
    }

    let labels: Vec<Vec<String>> = irr
        .iter()
        .zip(&reps)
        .map(|(&p, classes)| classes.iter().map(|&r| format!("[{}]", power.section_label(p, r))).collect())
        .collect();
    let plus = Sheaf::from_basis(frame.clone(), labels, |pi, qi, g| {
        let r = power.restrict(irr[pi], irr[qi], reps[pi][g as usize]);
        class_of[qi][&r]
    })?;

    let mut canon: Vec<Vec<Germ>> = Vec::with_capacity(irr.len());
    for (pi, &p) in irr.iter().enumerate() {
        let mut row = vec![0; sheaf.num_germs(pi)];
        for x in sheaf.sections(p) {
            let mut image = None;
            for s in power.sections(p) {
                let b = [Binding::new("x", sort_f(), p, x), Binding::new("S", sort_pf(), p, s)];
                if ev.force_with(&singleton_of, p, &b)? {
                    image = Some(s);
                    break;
                }
            }
            let s = image.expect("every element has its singleton");
            row[sheaf.germ_at(p, x, pi) as usize] = class_of[pi][&s];
        }
        canon.push(row);
    }
    let canonical = Morphism::from_germ_fn(&[sheaf], &plus, |pi, g| canon[pi][g[0] as usize])?;
    Ok(InternalPlus { plus, canonical, representatives: reps })
}

/// `F⁺` and `F⁺⁺`.
pub fn sheafify_internal(sheaf: &Sheaf, j: &Nucleus) -> Result<(InternalPlus, InternalPlus), ForceError> {
    let once = plus_internal(sheaf, j)?;
    let twice = plus_internal(&once.plus, j)?;
    Ok((once, twice))
}
