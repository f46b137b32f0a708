//! The spectrum of an algebra relative to a base ring, the quasicoherator,
//! and the local spectrum over a local base.

use alloc::format;
use alloc::string::ToString;
use alloc::sync::Arc;
use alloc::vec::Vec;

use super::{SpecEnvironment, SpecFrame, SpectrumError};
use crate::finring::{bit, FinRing, Subset};
use crate::forcing::{Binding, Evaluator};
use crate::formula::{parse, Sort};
use crate::frame::{Elem, Frame, Nucleus, NucleusKind};

/// An algebra `φ : R → A` together with `Spec(R)`, where the premise
/// `inv(f) ⇒ s ∈ 𝔞` of the quasicoherator is evaluated. The proposition
/// `s ∈ 𝔞` is constant, so the premise is forced on `X` iff `s ∈ 𝔞` or
/// `X ⊨ inv(f) ⇒ ⊥`; both verdicts are computed by forcing, once per `f`.
#[derive(Debug, Clone)]
pub struct RelativeSpec {
    pub base: FinRing,
    pub algebra: FinRing,
    pub phi: Vec<usize>,
    pub spec: SpecFrame,
    /// Per `f ∈ R`: whether `X ⊨ inv(f) ⇒ ⊥` and whether `X ⊨ inv(f) ⇒ ⊤`.
    premise: Vec<[bool; 2]>,
}

impl RelativeSpec {
    pub fn new(base: &FinRing, algebra: &FinRing, phi: &[usize]) -> Result<RelativeSpec, SpectrumError> {
        if !base.is_hom(algebra, phi) {
            return Err(SpectrumError::NotHom);
        }
        let over = SpecEnvironment::new(base)?;
        let top = over.top();
        let mut ev = Evaluator::new(over.environment());
        let absurd = parse("inv(f) => false").expect("fixed formula");
        let trivial = parse("inv(f) => true").expect("fixed formula");
        let mut premise = Vec::with_capacity(base.len());
        for f in base.elements() {
            let b = [Binding::new("f", Sort::named("O"), top, over.structure.global(f))];
            premise.push([ev.force_with(&absurd, top, &b)?, ev.force_with(&trivial, top, &b)?]);
        }
        Ok(RelativeSpec { base: base.clone(), algebra: algebra.clone(), phi: phi.to_vec(), spec: SpecFrame::new(algebra), premise })
    }

    fn premise_holds(&self, f: usize, s: usize, ideal: Subset) -> bool {
        self.premise[f][(ideal & bit(s) != 0) as usize]
    }

    /// The generators `φ(f)s` admitted by one step from `ideal`.
    fn step_generators(&self, ideal: Subset) -> Subset {
        let a = &self.algebra;
        let mut gens = ideal;
        for f in self.base.elements() {
            for s in a.elements() {
                if self.premise_holds(f, s, ideal) {
                    gens |= bit(a.mul(self.phi[f], s));
                }
            }
        }
        gens
    }

    /// Whether `(inv(f) ⇒ s ∈ 𝔞) ⇒ φ(f)s ∈ 𝔞` for all `f, s`.
    pub fn satisfies_condition(&self, ideal: Subset) -> bool {
        self.step_generators(ideal) & !ideal == 0
    }

    /// `I₀ = I`, `Iₙ₊₁ = √(Iₙ ∪ {φ(f)s : inv(f) ⇒ s ∈ Iₙ})`, to the fixed
    /// point; also returns the number of steps that changed the ideal.
    pub fn quasicoherator_steps(&self, ideal: Subset) -> (Subset, usize) {
        let a = &self.algebra;
        let mut current = a.radical(a.ideal_generated(ideal));
        let mut steps = 0;
        loop {
            let next = a.radical(a.ideal_generated(self.step_generators(current)));
            if next == current {
                return (current, steps);
            }
            current = next;
            steps += 1;
        }
    }

    pub fn quasicoherator(&self, ideal: Subset) -> Subset {
        self.quasicoherator_steps(ideal).0
    }

    /// The quasicoherator as a map on the frame of radical ideals of `A`,
    /// validated as a nucleus.
    pub fn nucleus(&self) -> Result<Nucleus, SpectrumError> {
        let map = self
            .spec
            .frame()
            .elements()
            .map(|e| self.spec.element(self.quasicoherator(self.spec.ideal(e))).expect("radical"))
            .collect();
        Ok(Nucleus::from_map(self.spec.frame(), map, NucleusKind::Custom("quasicoherator".to_string()))?)
    }

    /// Filters `F` of `A` with `φ(r) ∈ F ⇒ r invertible`.
    pub fn filters_over_units(&self) -> Vec<Subset> {
        self.algebra
            .filters()
            .into_iter()
            .filter(|&f| self.base.elements().all(|r| f & bit(self.phi[r]) == 0 || self.base.is_invertible(r)))
            .collect()
    }
}

/// The radical ideals of `A` satisfying the local-spectrum condition, as a
/// frame with joins taken through the quasicoherator.
#[derive(Debug, Clone)]
pub struct LocalSpecFrame {
    pub relative: RelativeSpec,
    /// Elements of the spectrum frame of `A` that belong, in order.
    pub members: Vec<Elem>,
    pub frame: Arc<Frame>,
}

impl LocalSpecFrame {
    pub fn ideal(&self, e: Elem) -> Subset {
        self.relative.spec.ideal(self.members[e])
    }

    pub fn num_points(&self) -> usize {
        self.frame.points().len()
    }
}

pub fn local_spectrum_frame(base: &FinRing, algebra: &FinRing, phi: &[usize]) -> Result<LocalSpecFrame, SpectrumError> {
    if !base.is_local() {
        return Err(SpectrumError::NotLocal);
    }
    let relative = RelativeSpec::new(base, algebra, phi)?;
    let spec = &relative.spec;
    let members: Vec<Elem> = spec.frame().elements().filter(|&e| relative.satisfies_condition(spec.ideal(e))).collect();
    let ideals: Vec<Subset> = members.iter().map(|&e| spec.ideal(e)).collect();
    let labels = members.iter().map(|&e| spec.frame().label(e).to_string()).collect();
    let frame = Frame::from_order(members.len(), |a, b| ideals[a] & !ideals[b] == 0, labels)?;
    for x in frame.elements() {
        for y in frame.elements() {
            let sum = algebra.radical(algebra.ideal_generated(ideals[x] | ideals[y]));
            if ideals[frame.join(x, y)] != relative.quasicoherator(sum) {
                return Err(SpectrumError::Mismatch(format!(
                    "join of {} and {} is not the quasicoherator of their sum",
                    frame.label(x),
                    frame.label(y)
                )));
            }
            if ideals[frame.meet(x, y)] != ideals[x] & ideals[y] {
                return Err(SpectrumError::Mismatch("meets are not intersections".to_string()));
            }
        }
    }
    members_check(&relative, &ideals)?;
    Ok(LocalSpecFrame { relative, members, frame: Arc::new(frame) })
}

/// The members are exactly the fixed points of the quasicoherator.
fn members_check(relative: &RelativeSpec, ideals: &[Subset]) -> Result<(), SpectrumError> {
    for &i in relative.spec.ideals() {
        let fixed = relative.quasicoherator(i) == i;
        if fixed != ideals.contains(&i) {
            return Err(SpectrumError::Mismatch(format!(
                "{} is {}a fixed point but {}satisfies the condition",
                super::ideal_label(&relative.algebra, i),
                if fixed { "" } else { "not " },
                if fixed { "not " } else { "" }
            )));
        }
    }
    Ok(())
}
