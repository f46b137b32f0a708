//! The spectrum of a finite commutative ring as a locale.
//!
//! Opens are radical ideals: the radical ideal `I` stands for the open
//! `D(I) = ⋃_{f ∈ I} D(f)`, so `D(f)` is `√(f)`. Sheaves on the spectrum are
//! built from their stalks at the join-irreducible radical ideals, which
//! correspond to the filters of the ring. The spectrum of a finite ring is
//! always discrete, but none of the constructions rely on that.

mod env;
mod relative;
pub mod statements;

#[cfg(test)]
mod tests;

pub use env::{
    check_generic_metaproperty, check_internal_quasicoherence, check_stronger_metaproperty, QuasicoherenceVerdict,
    SpecEnvironment,
};
pub use relative::{local_spectrum_frame, LocalSpecFrame, RelativeSpec};

use alloc::format;
use alloc::string::{String, ToString};
use alloc::sync::Arc;
use alloc::vec::Vec;

use crate::finring::{bit, members, FinModule, FinRing, Localization, ModuleLocalization, Subset};
use crate::forcing::{EnvError, ForceError};
use crate::frame::{Elem, FiniteSpace, Frame, FrameError, SpaceError};
use crate::sheaf::{Germ, Section, Sheaf, SheafError, Subsheaf};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum SpectrumError {
    #[error(transparent)]
    Frame(#[from] FrameError),
    #[error(transparent)]
    Space(#[from] SpaceError),
    #[error(transparent)]
    Sheaf(#[from] SheafError),
    #[error(transparent)]
    Env(#[from] EnvError),
    #[error(transparent)]
    Force(#[from] ForceError),
    /// A comparison that the construction asserts came out wrong.
    #[error("check failed: {0}")]
    Mismatch(String),
    #[error("the base ring is not local")]
    NotLocal,
    #[error("the structure map is not a ring homomorphism")]
    NotHom,
    #[error("the module is over a different ring")]
    WrongRing,
    #[error("unknown module `{0}`")]
    UnknownModule(String),
    /// The ideal family mentions something other than constant sheaves, or
    /// fails the hypothesis that constant sections spread.
    #[error("ideal family rejected: {0}")]
    NonConstantParameter(String),
    #[error("not an ideal of the constant sheaf: {0}")]
    NotAnIdeal(String),
}

/// A short generator list for an ideal: `(0)`, `(2)`, `(2,3)`.
pub fn ideal_label(ring: &FinRing, ideal: Subset) -> String {
    let gens = minimal_generators(ring, ideal);
    if gens.is_empty() {
        return format!("({})", ring.label(ring.zero()));
    }
    let parts: Vec<&str> = gens.iter().map(|&g| ring.label(g)).collect();
    format!("({})", parts.join(","))
}

fn minimal_generators(ring: &FinRing, ideal: Subset) -> Vec<usize> {
    let candidates: Vec<usize> = members(ideal).filter(|&x| x != ring.zero()).collect();
    if candidates.is_empty() {
        return Vec::new();
    }
    for &a in &candidates {
        if ring.ideal_generated(bit(a)) == ideal {
            return alloc::vec![a];
        }
    }
    for (i, &a) in candidates.iter().enumerate() {
        for &b in &candidates[i + 1..] {
            if ring.ideal_generated(bit(a) | bit(b)) == ideal {
                return alloc::vec![a, b];
            }
        }
    }
    // Greedy fallback: add elements until the ideal is reached.
    let mut gens = Vec::new();
    let mut span = 0;
    for &a in &candidates {
        if span & bit(a) == 0 {
            gens.push(a);
            span = ring.ideal_generated(gens.iter().fold(0, |m, &g| m | bit(g)));
        }
    }
    gens
}

/// The frame of radical ideals, ordered by inclusion.
#[derive(Debug, Clone)]
pub struct SpecFrame {
    ring: FinRing,
    ideals: Vec<Subset>,
    frame: Arc<Frame>,
    d: Vec<Elem>,
}

pub fn spec_frame(ring: &FinRing) -> SpecFrame {
    SpecFrame::new(ring)
}

impl SpecFrame {
    pub fn new(ring: &FinRing) -> SpecFrame {
        let mut ideals = ring.radical_ideals();
        ideals.sort_by_key(|&i| (i.count_ones(), i));
        let labels = ideals.iter().map(|&i| ideal_label(ring, i)).collect();
        let frame = Frame::from_order(ideals.len(), |a, b| ideals[a] & !ideals[b] == 0, labels)
            .expect("radical ideals of a commutative ring form a frame");
        let mut spec = SpecFrame { ring: ring.clone(), ideals, frame: Arc::new(frame), d: Vec::new() };
        spec.d = ring.elements().map(|f| spec.radical_of(bit(f))).collect();
        spec
    }

    pub fn ring(&self) -> &FinRing {
        &self.ring
    }

    pub fn frame(&self) -> &Frame {
        &self.frame
    }

    pub fn frame_arc(&self) -> &Arc<Frame> {
        &self.frame
    }

    pub fn ideal(&self, e: Elem) -> Subset {
        self.ideals[e]
    }

    pub fn ideals(&self) -> &[Subset] {
        &self.ideals
    }

    /// The element for a radical ideal given exactly.
    pub fn element(&self, ideal: Subset) -> Option<Elem> {
        self.ideals.iter().position(|&i| i == ideal)
    }

    /// `√(gens)`.
    pub fn radical_of(&self, gens: Subset) -> Elem {
        let r = self.ring.radical(self.ring.ideal_generated(gens));
        self.element(r).expect("radicals are enumerated")
    }

    /// `D(f)`.
    pub fn d(&self, f: usize) -> Elem {
        self.d[f]
    }

    /// `{f : U ≤ D(f)}`, the elements invertible on `U`. At a join-irreducible
    /// this is the filter of the corresponding point.
    pub fn invertible_on(&self, u: Elem) -> Subset {
        self.ring.subset(|f| self.ideals[u] & !self.ideals[self.d(f)] == 0)
    }

    /// The sections ring `A[S_U⁻¹]` with `S_U` the elements invertible on `U`.
    pub fn localize_on(&self, u: Elem) -> Localization {
        self.ring.localize(self.invertible_on(u))
    }
}

/// The spectrum as a finite topological space whose points are the filters.
#[derive(Debug, Clone)]
pub struct SpecSpace {
    pub space: FiniteSpace,
    pub filters: Vec<Subset>,
    /// Opens of `space` to elements of the spectrum frame.
    pub to_frame: Vec<Elem>,
}

/// Points are the filters, and the opens are unions of the `D(f) = {F : f ∈ F}`.
/// The comparison with the frame of radical ideals is checked, not assumed.
pub fn spec_space(spec: &SpecFrame) -> Result<SpecSpace, SpectrumError> {
    let ring = spec.ring();
    let filters = ring.filters();
    let names: Vec<String> = filters.iter().map(|&f| ideal_label(ring, ring.full() & !f)).collect();
    let basic: Vec<u64> = ring
        .elements()
        .map(|f| filters.iter().enumerate().filter(|(_, &flt)| flt & bit(f) != 0).fold(0u64, |m, (i, _)| m | 1 << i))
        .collect();
    let mut opens: Vec<u64> = alloc::vec![0];
    for &b in &basic {
        let extra: Vec<u64> = opens.iter().map(|&o| o | b).collect();
        for o in extra {
            if !opens.contains(&o) {
                opens.push(o);
            }
        }
    }
    let space = FiniteSpace::new(names, opens)?;
    let frame = spec.frame();
    let mut to_frame = Vec::with_capacity(space.frame().len());
    for o in space.frame().elements() {
        let mask = space.mask(o);
        let ideal = ring.subset(|f| basic[f] & !mask == 0);
        let e = spec
            .element(ideal)
            .ok_or_else(|| SpectrumError::Mismatch(format!("open {} gives no radical ideal", space.describe(o))))?;
        to_frame.push(e);
    }
    let mut seen = to_frame.clone();
    seen.sort_unstable();
    seen.dedup();
    if seen.len() != frame.len() || to_frame.len() != frame.len() {
        return Err(SpectrumError::Mismatch("opens and radical ideals are not in bijection".to_string()));
    }
    let sf = space.frame();
    for a in sf.elements() {
        for b in sf.elements() {
            if sf.leq(a, b) != frame.leq(to_frame[a], to_frame[b]) {
                return Err(SpectrumError::Mismatch("the comparison map is not an order isomorphism".to_string()));
            }
        }
    }
    if frame.points().len() != filters.len() {
        return Err(SpectrumError::Mismatch(format!(
            "{} points of the frame but {} filters",
            frame.points().len(),
            filters.len()
        )));
    }
    Ok(SpecSpace { space, filters, to_frame })
}

/// The section over `U` whose germ at every irreducible below `U` is
/// `germ(position)`, if those germs match.
pub fn section_from_germs(sheaf: &Sheaf, u: Elem, germ: impl Fn(usize) -> Germ) -> Option<Section> {
    let frame = sheaf.frame();
    let family: Vec<Germ> =
        frame.irreducibles().iter().enumerate().map(|(pi, &p)| if frame.leq(p, u) { germ(pi) } else { Germ::MAX }).collect();
    sheaf.glue(u, &family)
}

/// The structure sheaf, with the localization at each point.
#[derive(Debug, Clone)]
pub struct StructureSheaf {
    pub sheaf: Arc<Sheaf>,
    /// `A_F` for the filter `F` of each irreducible, by position.
    pub stalks: Vec<Localization>,
    one: usize,
}

impl StructureSheaf {
    /// The image of `a/s ∈ A[S_U⁻¹]` in the sections over `U`.
    pub fn section_of_fraction(&self, u: Elem, a: usize, s: usize) -> Option<Section> {
        let stalks = &self.stalks;
        let germs: Vec<Option<usize>> = stalks.iter().map(|l| l.fraction(a, s)).collect();
        let frame = self.sheaf.frame();
        let irr = frame.irreducibles();
        if irr.iter().enumerate().any(|(pi, &p)| frame.leq(p, u) && germs[pi].is_none()) {
            return None;
        }
        section_from_germs(&self.sheaf, u, |pi| germs[pi].unwrap_or(0) as Germ)
    }

    /// The global section `a/1`.
    pub fn global(&self, a: usize) -> Section {
        let top = self.sheaf.frame().top();
        self.section_of_fraction(top, a, self.one).expect("a/1 is a global section")
    }
}

/// `Õ = A̲[F⁻¹]`: at the point with filter `F` the stalk is `A_F`, and the
/// sections over `U` are compared with `A[S_U⁻¹]` open by open.
pub fn structure_sheaf(spec: &SpecFrame) -> Result<StructureSheaf, SpectrumError> {
    let frame = spec.frame_arc().clone();
    let irr = frame.irreducibles().to_vec();
    let stalks: Vec<Localization> = irr.iter().map(|&p| spec.localize_on(p)).collect();
    let labels = stalks.iter().map(|l| l.ring.labels().to_vec()).collect();
    let sheaf = Sheaf::from_basis(frame.clone(), labels, |pi, qi, g| {
        let (a, s) = stalks[pi].representative(g as usize);
        stalks[qi].fraction(a, s).expect("denominators grow under restriction") as Germ
    })?;
    let out = StructureSheaf { sheaf: Arc::new(sheaf), stalks, one: spec.ring().one() };
    for u in frame.elements() {
        let loc = spec.localize_on(u);
        let mut hit = alloc::vec![false; out.sheaf.num_sections(u)];
        for c in 0..loc.ring.len() {
            let (a, s) = loc.representative(c);
            let sec = out.section_of_fraction(u, a, s).ok_or_else(|| {
                SpectrumError::Mismatch(format!("{} has no section over {}", loc.ring.label(c), frame.label(u)))
            })?;
            if core::mem::replace(&mut hit[sec], true) {
                return Err(SpectrumError::Mismatch(format!("A[S⁻¹] → O({}) is not injective", frame.label(u))));
            }
        }
        if hit.iter().any(|h| !h) {
            return Err(SpectrumError::Mismatch(format!("A[S⁻¹] → O({}) is not surjective", frame.label(u))));
        }
    }
    Ok(out)
}

/// The generic filter as a subsheaf of the constant sheaf `A̲`.
#[derive(Debug, Clone)]
pub struct GenericFilter {
    pub constant: Arc<Sheaf>,
    pub filter: Subsheaf,
}

impl GenericFilter {
    /// The section of `A̲` over `U` with constant value `a`.
    pub fn constant_section(&self, u: Elem, a: usize) -> Section {
        section_from_germs(&self.constant, u, |_| a as Germ).expect("constant families match")
    }
}

/// `x ∈ F` holds at a point exactly when `x` lies in the point's filter.
/// The membership law on the `D(f)` and the internal filter axioms are
/// checked in [`SpecEnvironment::new`].
pub fn generic_filter(spec: &SpecFrame) -> Result<GenericFilter, SpectrumError> {
    let frame = spec.frame_arc().clone();
    let ring = spec.ring();
    let constant = Sheaf::constant(frame.clone(), ring.labels());
    let germs = frame
        .irreducibles()
        .iter()
        .map(|&p| {
            let f = spec.invertible_on(p);
            ring.elements().map(|x| f & bit(x) != 0).collect()
        })
        .collect();
    let filter = Subsheaf::from_germs(&constant, germs)?;
    Ok(GenericFilter { constant: Arc::new(constant), filter })
}

/// `M̃ = M̲[F⁻¹]`, with the localization at each point.
#[derive(Debug, Clone)]
pub struct Tilde {
    pub sheaf: Arc<Sheaf>,
    pub stalks: Vec<ModuleLocalization>,
}

impl Tilde {
    /// The germ set at every point of `Ñ` for a submodule `N ⊆ M`.
    pub fn submodule(&self, structure: &StructureSheaf, module: &FinModule, n: Subset) -> Result<Subsheaf, SpectrumError> {
        if !module.is_submodule(n) {
            return Err(SpectrumError::Mismatch("not a submodule".to_string()));
        }
        let germs = self
            .stalks
            .iter()
            .zip(&structure.stalks)
            .map(|(ml, rl)| {
                let mut row = alloc::vec![false; ml.module.len()];
                for m in members(n) {
                    for s in members(rl.denominators) {
                        row[ml.fraction(m, s).expect("s is a denominator")] = true;
                    }
                }
                row
            })
            .collect();
        Ok(Subsheaf::from_germs(&self.sheaf, germs)?)
    }

    /// `j_!(M̃|_U) ⊆ M̃`: all germs at points in `U` and only zero elsewhere.
    pub fn extension_by_zero(&self, u: Elem) -> Result<Subsheaf, SpectrumError> {
        let frame = self.sheaf.frame();
        let germs = frame
            .irreducibles()
            .iter()
            .zip(&self.stalks)
            .map(|(&p, ml)| {
                let inside = frame.leq(p, u);
                ml.module.elements().map(|c| inside || c == ml.module.zero()).collect()
            })
            .collect();
        Ok(Subsheaf::from_germs(&self.sheaf, germs)?)
    }
}

pub fn tilde(spec: &SpecFrame, structure: &StructureSheaf, module: &FinModule) -> Result<Tilde, SpectrumError> {
    if module.ring() != spec.ring() {
        return Err(SpectrumError::WrongRing);
    }
    let frame = spec.frame_arc().clone();
    let stalks: Vec<ModuleLocalization> = structure.stalks.iter().map(|l| module.localize(l)).collect();
    let labels = stalks.iter().map(|l| l.module.labels().to_vec()).collect();
    let sheaf = Sheaf::from_basis(frame, labels, |pi, qi, g| {
        let (m, s) = stalks[pi].representative(g as usize);
        stalks[qi].fraction(m, s).expect("denominators grow under restriction") as Germ
    })?;
    Ok(Tilde { sheaf: Arc::new(sheaf), stalks })
}
