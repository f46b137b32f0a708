//! Kripke-Joyal forcing.
//!
//! An [`Environment`] names the sheaves, subsheaves, function symbols,
//! global constants, nuclei and propositional constants a formula may
//! mention. An [`Evaluator`] compiles formulas against it and decides
//! `U ⊨ φ` by the recursive clauses of the sheaf semantics:
//!
//! - `∃`, `∨` and `⋁` are decided at the join-irreducible elements below
//!   `U`; by locality this is the same as asking for a cover.
//! - `⇒` and `∀` quantify over every `V ≤ U`, literally.
//! - `□_j φ` holds on `U` iff `U ≤ j(⟦φ⟧_U)`.

mod checks;
mod compile;
mod eval;
mod internal;

pub use checks::{
    check_box_theorem, check_geometric_spreading, check_locality, check_metaproperty, locality_report, sublocale_environment,
    verify_inference_rules, BoxTheoremReport, Metaproperty, Report, ReportLine, Rule, RuleInstance, Sequent,
};
pub use eval::{Binding, Evaluator, Semantics};
pub use internal::{
    comprehend, flabby_internal, is_box_separated, is_box_sheaf, plus_internal, sheafify_internal, InternalPlus,
};

use alloc::string::{String, ToString};
use alloc::sync::Arc;
use alloc::vec::Vec;

use crate::frame::{Elem, Frame, Nucleus};
use crate::sheaf::{Germ, Morphism, Section, Sheaf, SheafError, Subsheaf};

pub type SheafId = usize;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum EnvError {
    #[error("name `{0}` is already defined")]
    Duplicate(String),
    #[error("unknown sheaf `{0}`")]
    UnknownSheaf(String),
    #[error("unknown symbol `{0}`")]
    UnknownSymbol(String),
    #[error("sheaf `{0}` lives on a different frame")]
    FrameMismatch(String),
    #[error("nucleus `{0}` does not fit the frame")]
    BadNucleus(String),
    #[error("open {0} out of range")]
    OpenOutOfRange(Elem),
    #[error("section {1} out of range for sheaf `{0}`")]
    SectionOutOfRange(String, Section),
    #[error("`{0}` is not a ring sheaf")]
    NotRing(String),
    #[error(transparent)]
    Sheaf(#[from] SheafError),
}

/// Errors raised while compiling or evaluating a formula.
#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum ForceError {
    /// A name that the environment does not define.
    #[error("unresolved name `{0}`")]
    Unresolved(String),
    #[error("sort error: {0}")]
    Sort(String),
    #[error("schema over `{0}` has no upper bound and the environment sets no default")]
    UnboundedSchema(String),
    #[error("open {0} out of range")]
    OpenOutOfRange(Elem),
    #[error("binding for `{0}` is not defined on the evaluation open")]
    BindingNotDefined(String),
    #[error("section out of range: {0}")]
    SectionOutOfRange(String),
    #[error("{0}")]
    Unsupported(String),
    #[error(transparent)]
    Sheaf(#[from] SheafError),
}

impl ForceError {
    /// Errors caused by unresolvable references rather than by the formula.
    pub fn is_resolution(&self) -> bool {
        matches!(
            self,
            ForceError::Unresolved(_)
                | ForceError::Sheaf(_)
                | ForceError::OpenOutOfRange(_)
                | ForceError::SectionOutOfRange(_)
                | ForceError::BindingNotDefined(_)
        )
    }
}

/// Ring or module structure registered on a sheaf.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Algebra {
    Ring { add: usize, mul: usize, neg: Option<usize>, zero: Section, one: Section },
    Module { ring: SheafId, add: usize, act: usize, zero: Section },
}

#[derive(Debug, Clone)]
pub(crate) struct FunctionSymbol {
    pub name: String,
    pub args: Vec<SheafId>,
    pub result: SheafId,
    pub morphism: Morphism,
}

#[derive(Debug, Clone)]
pub struct Environment {
    frame: Arc<Frame>,
    pub(crate) sheaves: Vec<(String, Arc<Sheaf>)>,
    pub(crate) algebra: Vec<Option<Algebra>>,
    pub(crate) subsheaves: Vec<(String, SheafId, Subsheaf)>,
    pub(crate) functions: Vec<FunctionSymbol>,
    pub(crate) constants: Vec<(String, SheafId, Section)>,
    pub(crate) nuclei: Vec<(String, Nucleus)>,
    pub(crate) props: Vec<(String, Elem)>,
    schema_bound: Option<u32>,
}

impl Environment {
    /// An environment with the nuclei `id` and `negneg` predefined.
    pub fn new(frame: Arc<Frame>) -> Environment {
        let nuclei = alloc::vec![
            ("id".to_string(), Nucleus::identity(&frame)),
            ("negneg".to_string(), Nucleus::double_negation(&frame)),
        ];
        Environment {
            frame,
            sheaves: Vec::new(),
            algebra: Vec::new(),
            subsheaves: Vec::new(),
            functions: Vec::new(),
            constants: Vec::new(),
            nuclei,
            props: Vec::new(),
            schema_bound: None,
        }
    }

    pub fn frame(&self) -> &Frame {
        &self.frame
    }

    pub fn frame_arc(&self) -> &Arc<Frame> {
        &self.frame
    }

    fn taken(&self, name: &str) -> bool {
        self.sheaves.iter().any(|(n, _)| n == name)
            || self.subsheaves.iter().any(|(n, _, _)| n == name)
            || self.functions.iter().any(|f| f.name == name)
            || self.constants.iter().any(|(n, _, _)| n == name)
            || self.props.iter().any(|(n, _)| n == name)
    }

    fn fresh(&self, name: &str) -> Result<(), EnvError> {
        if self.taken(name) {
            Err(EnvError::Duplicate(name.to_string()))
        } else {
            Ok(())
        }
    }

    pub fn add_sheaf(&mut self, name: &str, sheaf: Sheaf) -> Result<SheafId, EnvError> {
        self.add_sheaf_arc(name, Arc::new(sheaf))
    }

    pub fn add_sheaf_arc(&mut self, name: &str, sheaf: Arc<Sheaf>) -> Result<SheafId, EnvError> {
        self.fresh(name)?;
        if sheaf.frame() != &*self.frame {
            return Err(EnvError::FrameMismatch(name.to_string()));
        }
        self.sheaves.push((name.to_string(), sheaf));
        self.algebra.push(None);
        Ok(self.sheaves.len() - 1)
    }

    pub fn add_subsheaf(&mut self, name: &str, sheaf: SheafId, sub: Subsheaf) -> Result<(), EnvError> {
        self.fresh(name)?;
        self.check_sheaf_id(sheaf)?;
        self.subsheaves.push((name.to_string(), sheaf, sub));
        Ok(())
    }

    pub fn add_function(&mut self, name: &str, args: &[SheafId], result: SheafId, morphism: Morphism) -> Result<(), EnvError> {
        self.fresh(name)?;
        for &a in args.iter().chain(core::iter::once(&result)) {
            self.check_sheaf_id(a)?;
        }
        self.functions.push(FunctionSymbol { name: name.to_string(), args: args.to_vec(), result, morphism });
        Ok(())
    }

    /// Registers a function symbol given germwise at every irreducible.
    pub fn add_function_fn(
        &mut self,
        name: &str,
        args: &[SheafId],
        result: SheafId,
        f: impl Fn(usize, &[Germ]) -> Germ,
    ) -> Result<(), EnvError> {
        for &a in args.iter().chain(core::iter::once(&result)) {
            self.check_sheaf_id(a)?;
        }
        let arg_sheaves: Vec<&Sheaf> = args.iter().map(|&a| &*self.sheaves[a].1).collect();
        let m = Morphism::from_germ_fn(&arg_sheaves, &self.sheaves[result].1, f)?;
        self.add_function(name, args, result, m)
    }

    /// A named global section.
    pub fn add_constant(&mut self, name: &str, sheaf: SheafId, section: Section) -> Result<(), EnvError> {
        self.fresh(name)?;
        self.check_sheaf_id(sheaf)?;
        let s = &self.sheaves[sheaf];
        if section >= s.1.num_sections(self.frame.top()) {
            return Err(EnvError::SectionOutOfRange(s.0.clone(), section));
        }
        self.constants.push((name.to_string(), sheaf, section));
        Ok(())
    }

    pub fn add_nucleus(&mut self, name: &str, nucleus: Nucleus) -> Result<(), EnvError> {
        if self.nuclei.iter().any(|(n, _)| n == name) {
            return Err(EnvError::Duplicate(name.to_string()));
        }
        if !nucleus.check(&self.frame) {
            return Err(EnvError::BadNucleus(name.to_string()));
        }
        self.nuclei.push((name.to_string(), nucleus));
        Ok(())
    }

    /// A propositional constant naming an open.
    pub fn add_prop(&mut self, name: &str, open: Elem) -> Result<(), EnvError> {
        self.fresh(name)?;
        if open >= self.frame.len() {
            return Err(EnvError::OpenOutOfRange(open));
        }
        self.props.push((name.to_string(), open));
        Ok(())
    }

    /// Declares ring structure from registered function symbols and constants.
    pub fn set_ring(&mut self, sheaf: SheafId, add: &str, mul: &str, zero: &str, one: &str) -> Result<(), EnvError> {
        self.check_sheaf_id(sheaf)?;
        let add = self.function_id(add)?;
        let mul = self.function_id(mul)?;
        let zero = self.constant_section(zero)?;
        let one = self.constant_section(one)?;
        self.algebra[sheaf] = Some(Algebra::Ring { add, mul, neg: None, zero, one });
        Ok(())
    }

    pub fn set_ring_negation(&mut self, sheaf: SheafId, neg: &str) -> Result<(), EnvError> {
        let id = self.function_id(neg)?;
        match &mut self.algebra[sheaf] {
            Some(Algebra::Ring { neg, .. }) => {
                *neg = Some(id);
                Ok(())
            }
            _ => Err(EnvError::NotRing(self.sheaves[sheaf].0.clone())),
        }
    }

    pub fn set_module(&mut self, sheaf: SheafId, ring: SheafId, add: &str, act: &str, zero: &str) -> Result<(), EnvError> {
        self.check_sheaf_id(sheaf)?;
        if !matches!(self.algebra.get(ring), Some(Some(Algebra::Ring { .. }))) {
            return Err(EnvError::NotRing(self.sheaves.get(ring).map_or_else(|| ring.to_string(), |s| s.0.clone())));
        }
        let add = self.function_id(add)?;
        let act = self.function_id(act)?;
        let zero = self.constant_section(zero)?;
        self.algebra[sheaf] = Some(Algebra::Module { ring, add, act, zero });
        Ok(())
    }

    /// Default upper bound for schemas written without one.
    pub fn set_schema_bound(&mut self, bound: u32) {
        self.schema_bound = Some(bound);
    }

    pub fn schema_bound(&self) -> Option<u32> {
        self.schema_bound
    }

    fn check_sheaf_id(&self, id: SheafId) -> Result<(), EnvError> {
        if id < self.sheaves.len() {
            Ok(())
        } else {
            Err(EnvError::UnknownSheaf(id.to_string()))
        }
    }

    fn function_id(&self, name: &str) -> Result<usize, EnvError> {
        self.functions.iter().position(|f| f.name == name).ok_or_else(|| EnvError::UnknownSymbol(name.to_string()))
    }

    fn constant_section(&self, name: &str) -> Result<Section, EnvError> {
        self.constants
            .iter()
            .find(|(n, _, _)| n == name)
            .map(|&(_, _, s)| s)
            .ok_or_else(|| EnvError::UnknownSymbol(name.to_string()))
    }

    pub fn sheaf_id(&self, name: &str) -> Option<SheafId> {
        self.sheaves.iter().position(|(n, _)| n == name)
    }

    pub fn sheaf(&self, id: SheafId) -> &Sheaf {
        &self.sheaves[id].1
    }

    pub fn sheaf_arc(&self, id: SheafId) -> &Arc<Sheaf> {
        &self.sheaves[id].1
    }

    pub fn sheaf_name(&self, id: SheafId) -> &str {
        &self.sheaves[id].0
    }

    pub fn sheaf_names(&self) -> impl Iterator<Item = &str> {
        self.sheaves.iter().map(|(n, _)| n.as_str())
    }

    pub fn algebra(&self, id: SheafId) -> Option<&Algebra> {
        self.algebra[id].as_ref()
    }

    pub fn nucleus(&self, name: &str) -> Option<&Nucleus> {
        self.nuclei.iter().find(|(n, _)| n == name).map(|(_, j)| j)
    }

    pub fn nucleus_names(&self) -> impl Iterator<Item = &str> {
        self.nuclei.iter().map(|(n, _)| n.as_str())
    }

    pub fn prop(&self, name: &str) -> Option<Elem> {
        self.props.iter().find(|(n, _)| n == name).map(|&(_, e)| e)
    }

    pub fn props(&self) -> impl Iterator<Item = (&str, Elem)> {
        self.props.iter().map(|(n, e)| (n.as_str(), *e))
    }

    pub fn constant(&self, name: &str) -> Option<(SheafId, Section)> {
        self.constants.iter().find(|(n, _, _)| n == name).map(|&(_, id, s)| (id, s))
    }

    pub fn constants(&self) -> impl Iterator<Item = (&str, SheafId, Section)> {
        self.constants.iter().map(|(n, id, s)| (n.as_str(), *id, *s))
    }

    pub fn subsheaf(&self, name: &str) -> Option<(SheafId, &Subsheaf)> {
        self.subsheaves.iter().find(|(n, _, _)| n == name).map(|(_, id, s)| (*id, s))
    }

    pub fn function_names(&self) -> impl Iterator<Item = &str> {
        self.functions.iter().map(|f| f.name.as_str())
    }

    /// Applies a registered function symbol to sections over `U`.
    pub fn apply_function(&self, name: &str, u: Elem, args: &[Section]) -> Option<Section> {
        let f = self.functions.iter().find(|f| f.name == name)?;
        let arg_sheaves: Vec<&Sheaf> = f.args.iter().map(|&a| &*self.sheaves[a].1).collect();
        Some(f.morphism.apply(&arg_sheaves, &self.sheaves[f.result].1, u, args))
    }
}

#[cfg(test)]
mod tests;
