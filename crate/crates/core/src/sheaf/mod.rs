//! Sheaves of finite sets on finite frames.
//!
//! A sheaf on a finite frame is determined by its values on the
//! join-irreducible elements (every open is covered by the irreducibles
//! below it, and an irreducible has no nontrivial cover). A [`Sheaf`] stores
//! those values as *germ sets* with restriction maps between them, and every
//! section over an open `U` as the matching family of its germs at the
//! irreducibles below `U`.

mod morphism;
mod plus;
mod power;

pub use morphism::Morphism;
pub use plus::{plus_construction, sheafify, transport_to_parent, PlusResult};
pub(crate) use plus::least_dense;
pub use power::PowerSheaf;

use alloc::collections::BTreeMap;
use alloc::format;
use alloc::string::{String, ToString};
use alloc::sync::Arc;
use alloc::vec;
use alloc::vec::Vec;
use hashbrown::HashMap;

use crate::frame::{Elem, Frame};

/// Index of a germ in the germ set at an irreducible.
pub type Germ = u32;
/// Index of a section in `F(U)`.
pub type Section = usize;

const NONE: Germ = Germ::MAX;
/// Upper bound on the total number of sections a sheaf may have.
pub const MAX_SECTIONS: usize = 1 << 21;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum SheafError {
    #[error("expected data for {expected} opens, found {found}")]
    WrongSize { expected: usize, found: usize },
    #[error("restriction from {0} to {1} is missing")]
    MissingRestriction(String, String),
    #[error("restriction from {0} to {1} is malformed")]
    BadRestriction(String, String),
    #[error("restrictions do not compose: {from} -> {via} -> {to}")]
    NotFunctorial { from: String, via: String, to: String },
    #[error("the empty open must have exactly one section, found {0}")]
    BottomNotSingleton(usize),
    #[error("sections {first} and {second} over {open} agree on the cover {cover:?}")]
    NotSeparated { open: String, cover: Vec<String>, first: String, second: String },
    #[error("matching family {family:?} on the cover {cover:?} of {open} has no gluing")]
    NoGluing { open: String, cover: Vec<String>, family: Vec<String> },
    #[error("the sheaf is too large to enumerate")]
    TooLarge,
    #[error("the germ set over {0} is too large for a power object")]
    StalkTooLarge(String),
    #[error("map is not natural at {0} -> {1}")]
    NotNatural(String, String),
    #[error("not a subsheaf: {0}")]
    NotSubsheaf(String),
    #[error("arity mismatch: expected {expected}, found {found}")]
    Arity { expected: usize, found: usize },
    #[error("germ index out of range")]
    OutOfRange,
}

/// A sheaf of finite sets on a finite frame.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Sheaf {
    frame: Arc<Frame>,
    /// Position of each irreducible in `frame.irreducibles()`, by element.
    irr_pos: Vec<Option<usize>>,
    germ_labels: Vec<Vec<String>>,
    /// `germ_res[p][q]` for irreducible positions `q ≤ p`.
    germ_res: Vec<Vec<Option<Vec<Germ>>>>,
    families: Vec<Vec<Vec<Germ>>>,
    index: Vec<HashMap<Vec<Germ>, Section>>,
    /// `restrict[u * n + v]` for `v ≤ u`.
    restrict: Vec<Vec<Section>>,
    labels: Option<Vec<Vec<String>>>,
}

impl Sheaf {
    /// Builds a sheaf from germ sets at the irreducibles (indexed by position
    /// in `frame.irreducibles()`) and restriction maps between them.
    pub fn from_basis(
        frame: Arc<Frame>,
        germ_labels: Vec<Vec<String>>,
        res: impl Fn(usize, usize, Germ) -> Germ,
    ) -> Result<Sheaf, SheafError> {
        let irr = frame.irreducibles().to_vec();
        if germ_labels.len() != irr.len() {
            return Err(SheafError::WrongSize { expected: irr.len(), found: germ_labels.len() });
        }
        let mut irr_pos = vec![None; frame.len()];
        for (i, &p) in irr.iter().enumerate() {
            irr_pos[p] = Some(i);
        }
        let k = irr.len();
        let mut germ_res = vec![vec![None; k]; k];
        for (pi, &p) in irr.iter().enumerate() {
            for (qi, &q) in irr.iter().enumerate() {
                if frame.leq(q, p) {
                    let table: Vec<Germ> = if pi == qi {
                        (0..germ_labels[pi].len() as Germ).collect()
                    } else {
                        (0..germ_labels[pi].len() as Germ).map(|g| res(pi, qi, g)).collect()
                    };
                    if table.iter().any(|&g| g as usize >= germ_labels[qi].len()) {
                        return Err(SheafError::BadRestriction(frame.label(p).to_string(), frame.label(q).to_string()));
                    }
                    germ_res[pi][qi] = Some(table);
                }
            }
        }
        for (pi, &p) in irr.iter().enumerate() {
            for (qi, &q) in irr.iter().enumerate() {
                for (ri, &r) in irr.iter().enumerate() {
                    if frame.leq(r, q) && frame.leq(q, p) {
                        let pq = germ_res[pi][qi].as_ref().unwrap();
                        let qr = germ_res[qi][ri].as_ref().unwrap();
                        let pr = germ_res[pi][ri].as_ref().unwrap();
                        if pq.iter().zip(pr).any(|(&a, &b)| qr[a as usize] != b) {
                            return Err(SheafError::NotFunctorial {
                                from: frame.label(p).to_string(),
                                via: frame.label(q).to_string(),
                                to: frame.label(r).to_string(),
                            });
                        }
                    }
                }
            }
        }
        let mut sheaf = Sheaf {
            frame,
            irr_pos,
            germ_labels,
            germ_res,
            families: Vec::new(),
            index: Vec::new(),
            restrict: Vec::new(),
            labels: None,
        };
        sheaf.enumerate()?;
        Ok(sheaf)
    }

    /// The constant sheaf: locally constant functions into `values`.
    pub fn constant(frame: Arc<Frame>, values: &[String]) -> Sheaf {
        let k = frame.irreducibles().len();
        Sheaf::from_basis(frame, vec![values.to_vec(); k], |_, _, g| g).expect("identity restrictions")
    }

    /// The terminal sheaf, with one section over every open.
    pub fn terminal(frame: Arc<Frame>) -> Sheaf {
        Sheaf::constant(frame, &["*".to_string()])
    }

    fn order_below(&self, u: Elem) -> Vec<usize> {
        // Irreducibles below `u`, larger ones first.
        let mut ps: Vec<usize> = self.frame.irreducibles_below(u).iter().map(|&p| self.irr_pos[p].unwrap()).collect();
        let irr = self.frame.irreducibles();
        ps.sort_by_key(|&pi| (core::cmp::Reverse(self.frame.irreducibles_below(irr[pi]).len()), pi));
        ps
    }

    fn enumerate(&mut self) -> Result<(), SheafError> {
        let n = self.frame.len();
        let k = self.germ_labels.len();
        let irr = self.frame.irreducibles().to_vec();
        let mut total = 0usize;
        self.families = Vec::with_capacity(n);
        for u in 0..n {
            let order = self.order_below(u);
            let mut out = Vec::new();
            let mut current = vec![NONE; k];
            self.extend(&order, 0, &irr, &mut current, &mut out, &mut total)?;
            self.families.push(out);
        }
        self.index = self
            .families
            .iter()
            .map(|fams| fams.iter().enumerate().map(|(i, f)| (f.clone(), i)).collect())
            .collect();
        self.build_restrictions();
        Ok(())
    }

    fn extend(
        &self,
        order: &[usize],
        depth: usize,
        irr: &[Elem],
        current: &mut Vec<Germ>,
        out: &mut Vec<Vec<Germ>>,
        total: &mut usize,
    ) -> Result<(), SheafError> {
        if depth == order.len() {
            *total += 1;
            if *total > MAX_SECTIONS {
                return Err(SheafError::TooLarge);
            }
            out.push(current.clone());
            return Ok(());
        }
        let q = order[depth];
        let mut forced = None;
        for &p in &order[..depth] {
            if self.frame.leq(irr[q], irr[p]) {
                let g = self.germ_res[p][q].as_ref().unwrap()[current[p] as usize];
                match forced {
                    None => forced = Some(g),
                    Some(h) if h != g => return Ok(()),
                    _ => {}
                }
            }
        }
        let candidates: Vec<Germ> = match forced {
            Some(g) => vec![g],
            None => (0..self.germ_labels[q].len() as Germ).collect(),
        };
        for g in candidates {
            current[q] = g;
            self.extend(order, depth + 1, irr, current, out, total)?;
        }
        current[q] = NONE;
        Ok(())
    }

    fn build_restrictions(&mut self) {
        let n = self.frame.len();
        let irr = self.frame.irreducibles().to_vec();
        let mut restrict = vec![Vec::new(); n * n];
        for u in 0..n {
            for v in 0..n {
                if !self.frame.leq(v, u) {
                    continue;
                }
                restrict[u * n + v] = self.families[u]
                    .iter()
                    .map(|fam| {
                        let mut f = fam.clone();
                        for (qi, &q) in irr.iter().enumerate() {
                            if !self.frame.leq(q, v) {
                                f[qi] = NONE;
                            }
                        }
                        self.index[v][&f]
                    })
                    .collect();
            }
        }
        self.restrict = restrict;
    }

    pub fn frame(&self) -> &Frame {
        &self.frame
    }

    pub fn frame_arc(&self) -> &Arc<Frame> {
        &self.frame
    }

    /// `|F(U)|`.
    pub fn num_sections(&self, u: Elem) -> usize {
        self.families[u].len()
    }

    pub fn sections(&self, u: Elem) -> core::ops::Range<Section> {
        0..self.families[u].len()
    }

    pub fn total_sections(&self) -> usize {
        self.families.iter().map(Vec::len).sum()
    }

    /// Restriction `F(U) → F(V)`; requires `V ≤ U`.
    pub fn restrict(&self, u: Elem, v: Elem, s: Section) -> Section {
        debug_assert!(self.frame.leq(v, u));
        self.restrict[u * self.frame.len() + v][s]
    }

    /// Germ of `s ∈ F(U)` at the irreducible element `p ≤ U`.
    pub fn germ(&self, u: Elem, s: Section, p: Elem) -> Germ {
        self.families[u][s][self.irr_pos[p].expect("irreducible")]
    }

    /// Germ of `s ∈ F(U)` at the irreducible with the given position.
    pub fn germ_at(&self, u: Elem, s: Section, pi: usize) -> Germ {
        self.families[u][s][pi]
    }

    /// The matching family of `s`, indexed by irreducible position;
    /// positions not below `U` hold `Germ::MAX`.
    pub fn family(&self, u: Elem, s: Section) -> &[Germ] {
        &self.families[u][s]
    }

    /// The section over `U` with the given family, if it is matching.
    pub fn glue(&self, u: Elem, family: &[Germ]) -> Option<Section> {
        self.index[u].get(family).copied()
    }

    pub fn irr_position(&self, p: Elem) -> Option<usize> {
        self.irr_pos[p]
    }

    pub fn num_germs(&self, pi: usize) -> usize {
        self.germ_labels[pi].len()
    }

    pub fn germ_labels(&self, pi: usize) -> &[String] {
        &self.germ_labels[pi]
    }

    /// Restriction of germs between irreducible positions `q ≤ p`.
    pub fn germ_restrict(&self, pi: usize, qi: usize, g: Germ) -> Germ {
        self.germ_res[pi][qi].as_ref().expect("q ≤ p")[g as usize]
    }

    /// The stalk at the point given by the irreducible `p`. On a finite frame
    /// the point's filter `↑p` has least element `p`, so the stalk is `F(p)`.
    pub fn stalk(&self, p: Elem) -> &[String] {
        &self.germ_labels[self.irr_pos[p].expect("irreducible")]
    }

    pub fn section_label(&self, u: Elem, s: Section) -> String {
        if let Some(labels) = &self.labels {
            return labels[u][s].clone();
        }
        if let Some(pi) = self.irr_pos[u] {
            return self.germ_labels[pi][s].clone();
        }
        let below = self.frame.irreducibles_below(u);
        let maximal: Vec<usize> = below
            .iter()
            .filter(|&&p| !below.iter().any(|&q| q != p && self.frame.leq(p, q)))
            .map(|&p| self.irr_pos[p].unwrap())
            .collect();
        let parts: Vec<String> = maximal
            .iter()
            .map(|&pi| self.germ_labels[pi][self.families[u][s][pi] as usize].clone())
            .collect();
        format!("({})", parts.join(","))
    }

    pub fn section_by_label(&self, u: Elem, label: &str) -> Option<Section> {
        self.sections(u).find(|&s| self.section_label(u, s) == label)
    }

    /// Every restriction from the top element is surjective.
    pub fn is_flabby(&self) -> bool {
        let top = self.frame.top();
        self.frame.elements().all(|u| {
            let mut hit = vec![false; self.num_sections(u)];
            for s in self.sections(top) {
                hit[self.restrict(top, u, s)] = true;
            }
            hit.into_iter().all(|h| h)
        })
    }

    /// The same sheaf with the given per-open section labels.
    pub(crate) fn with_labels(mut self, labels: Vec<Vec<String>>) -> Sheaf {
        self.labels = Some(labels);
        self
    }

    /// Reorders the sections over every open; `order[u][i]` is the family
    /// that becomes section `i`.
    fn reorder(&mut self, order: Vec<Vec<Vec<Germ>>>) {
        self.families = order;
        self.index = self
            .families
            .iter()
            .map(|fams| fams.iter().enumerate().map(|(i, f)| (f.clone(), i)).collect())
            .collect();
        self.build_restrictions();
    }

    /// The section data as a presheaf.
    pub fn to_presheaf(&self) -> Presheaf {
        let n = self.frame.len();
        let mut restrictions = BTreeMap::new();
        for u in 0..n {
            for v in 0..n {
                if self.frame.leq(v, u) {
                    restrictions.insert((u, v), self.restrict[u * n + v].clone());
                }
            }
        }
        Presheaf {
            frame: self.frame.clone(),
            sections: (0..n).map(|u| self.sections(u).map(|s| self.section_label(u, s)).collect()).collect(),
            restrictions,
        }
    }
}

/// A presheaf on a finite frame given extensionally.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Presheaf {
    pub frame: Arc<Frame>,
    /// Section labels per frame element.
    pub sections: Vec<Vec<String>>,
    /// Restriction tables keyed by `(U, V)` with `V ≤ U`. Identities, maps
    /// into the bottom element, and composites may be omitted.
    pub restrictions: BTreeMap<(Elem, Elem), Vec<usize>>,
}

impl Presheaf {
    /// Fills in identities, maps to a singleton bottom, and composites, then
    /// checks functoriality. Returns the dense table `u * n + v`.
    pub fn complete(&self) -> Result<Vec<Vec<usize>>, SheafError> {
        let f = &self.frame;
        let n = f.len();
        let name = |e: Elem| f.label(e).to_string();
        if self.sections.len() != n {
            return Err(SheafError::WrongSize { expected: n, found: self.sections.len() });
        }
        let mut table: Vec<Option<Vec<usize>>> = vec![None; n * n];
        for (&(u, v), map) in &self.restrictions {
            if u >= n || v >= n || !f.leq(v, u) || map.len() != self.sections[u].len() || map.iter().any(|&t| t >= self.sections[v].len())
            {
                return Err(SheafError::BadRestriction(name(u.min(n - 1)), name(v.min(n - 1))));
            }
            table[u * n + v] = Some(map.clone());
        }
        for u in 0..n {
            let id = (0..self.sections[u].len()).collect::<Vec<_>>();
            match &table[u * n + u] {
                Some(m) if *m != id => return Err(SheafError::NotFunctorial { from: name(u), via: name(u), to: name(u) }),
                _ => table[u * n + u] = Some(id),
            }
            let b = f.bottom();
            if self.sections[b].len() == 1 && table[u * n + b].is_none() {
                table[u * n + b] = Some(vec![0; self.sections[u].len()]);
            }
        }
        loop {
            let mut changed = false;
            for u in 0..n {
                for v in 0..n {
                    if table[u * n + v].is_some() || !f.leq(v, u) {
                        continue;
                    }
                    for w in 0..n {
                        if let (Some(a), Some(b)) = (&table[u * n + w], &table[w * n + v]) {
                            table[u * n + v] = Some(a.iter().map(|&s| b[s]).collect());
                            changed = true;
                            break;
                        }
                    }
                }
            }
            if !changed {
                break;
            }
        }
        let mut dense = Vec::with_capacity(n * n);
        for u in 0..n {
            for v in 0..n {
                match table[u * n + v].take() {
                    Some(m) => dense.push(m),
                    None if f.leq(v, u) => return Err(SheafError::MissingRestriction(name(u), name(v))),
                    None => dense.push(Vec::new()),
                }
            }
        }
        for u in 0..n {
            for v in 0..n {
                for w in 0..n {
                    if f.leq(w, v) && f.leq(v, u) {
                        let direct = &dense[u * n + w];
                        let via = &dense[v * n + w];
                        if dense[u * n + v].iter().enumerate().any(|(s, &t)| via[t] != direct[s]) {
                            return Err(SheafError::NotFunctorial { from: name(u), via: name(v), to: name(w) });
                        }
                    }
                }
            }
        }
        Ok(dense)
    }
}

/// Checks the sheaf condition for presheaf data and returns the sheaf, with
/// section order and labels preserved. A failure reports a violating cover.
pub fn check_sheaf(pre: &Presheaf) -> Result<Sheaf, SheafError> {
    let f = &pre.frame;
    let n = f.len();
    if let Some(bottom) = pre.sections.get(f.bottom()) {
        if bottom.len() != 1 {
            return Err(SheafError::BottomNotSingleton(bottom.len()));
        }
    }
    let table = pre.complete()?;
    let irr = f.irreducibles().to_vec();
    let pos = |p: Elem| irr.iter().position(|&q| q == p).unwrap();
    let germ_labels: Vec<Vec<String>> = irr.iter().map(|&p| pre.sections[p].clone()).collect();
    let mut sheaf = Sheaf::from_basis(f.clone(), germ_labels, |pi, qi, g| table[irr[pi] * n + irr[qi]][g as usize] as Germ)?;
    let mut order = Vec::with_capacity(n);
    for u in 0..n {
        let maximal: Vec<Elem> = {
            let below = f.irreducibles_below(u);
            below.iter().copied().filter(|&p| !below.iter().any(|&q| q != p && f.leq(p, q))).collect()
        };
        let cover: Vec<String> = maximal.iter().map(|&p| f.label(p).to_string()).collect();
        let mut seen: HashMap<Vec<Germ>, usize> = HashMap::new();
        let mut fams = Vec::with_capacity(pre.sections[u].len());
        for s in 0..pre.sections[u].len() {
            let mut fam = vec![NONE; irr.len()];
            for &p in f.irreducibles_below(u) {
                fam[pos(p)] = table[u * n + p][s] as Germ;
            }
            if let Some(&t) = seen.get(&fam) {
                return Err(SheafError::NotSeparated {
                    open: f.label(u).to_string(),
                    cover,
                    first: pre.sections[u][t].clone(),
                    second: pre.sections[u][s].clone(),
                });
            }
            seen.insert(fam.clone(), s);
            fams.push(fam);
        }
        if let Some(missing) = sheaf.families[u].iter().find(|fam| !seen.contains_key(*fam)) {
            let family = maximal
                .iter()
                .map(|&p| format!("{}:{}", f.label(p), pre.sections[p][missing[pos(p)] as usize]))
                .collect();
            return Err(SheafError::NoGluing { open: f.label(u).to_string(), cover, family });
        }
        order.push(fams);
    }
    sheaf.reorder(order);
    Ok(sheaf.with_labels(pre.sections.clone()))
}

/// A subsheaf, stored as the set of admitted germs at every irreducible.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Subsheaf {
    germs: Vec<Vec<bool>>,
    members: Vec<Vec<bool>>,
}

impl Subsheaf {
    /// From germ sets at the irreducibles; these must be closed under
    /// restriction.
    pub fn from_germs(sheaf: &Sheaf, germs: Vec<Vec<bool>>) -> Result<Subsheaf, SheafError> {
        let k = sheaf.germ_labels.len();
        if germs.len() != k || germs.iter().enumerate().any(|(i, g)| g.len() != sheaf.num_germs(i)) {
            return Err(SheafError::WrongSize { expected: k, found: germs.len() });
        }
        for pi in 0..k {
            for qi in 0..k {
                if let Some(table) = &sheaf.germ_res[pi][qi] {
                    for (g, &h) in table.iter().enumerate() {
                        if germs[pi][g] && !germs[qi][h as usize] {
                            let irr = sheaf.frame.irreducibles();
                            return Err(SheafError::NotSubsheaf(format!(
                                "{} is admitted over {} but its restriction to {} is not",
                                sheaf.germ_labels[pi][g],
                                sheaf.frame.label(irr[pi]),
                                sheaf.frame.label(irr[qi])
                            )));
                        }
                    }
                }
            }
        }
        let members = sheaf
            .frame
            .elements()
            .map(|u| {
                sheaf.families[u]
                    .iter()
                    .map(|fam| fam.iter().enumerate().all(|(pi, &g)| g == NONE || germs[pi][g as usize]))
                    .collect()
            })
            .collect();
        Ok(Subsheaf { germs, members })
    }

    /// From admitted sections over every open; must be closed under
    /// restriction and local.
    pub fn from_sections(sheaf: &Sheaf, members: Vec<Vec<bool>>) -> Result<Subsheaf, SheafError> {
        let irr = sheaf.frame.irreducibles();
        if members.len() != sheaf.frame.len() {
            return Err(SheafError::WrongSize { expected: sheaf.frame.len(), found: members.len() });
        }
        let germs = irr.iter().map(|&p| members[p].clone()).collect();
        let sub = Subsheaf::from_germs(sheaf, germs)?;
        for u in sheaf.frame.elements() {
            if sub.members[u] != members[u] {
                return Err(SheafError::NotSubsheaf(format!(
                    "the admitted sections over {} are not determined by their germs",
                    sheaf.frame.label(u)
                )));
            }
        }
        Ok(sub)
    }

    pub fn full(sheaf: &Sheaf) -> Subsheaf {
        let germs = (0..sheaf.germ_labels.len()).map(|pi| vec![true; sheaf.num_germs(pi)]).collect();
        Subsheaf::from_germs(sheaf, germs).unwrap()
    }

    pub fn contains(&self, u: Elem, s: Section) -> bool {
        self.members[u][s]
    }

    pub fn admits_germ(&self, pi: usize, g: Germ) -> bool {
        self.germs[pi][g as usize]
    }

    pub fn germ_sets(&self) -> &[Vec<bool>] {
        &self.germs
    }

    /// The subsheaf as a sheaf in its own right.
    pub fn to_sheaf(&self, parent: &Sheaf) -> Sheaf {
        let kept: Vec<Vec<Germ>> =
            self.germs.iter().map(|g| (0..g.len() as Germ).filter(|&x| g[x as usize]).collect()).collect();
        let labels = kept
            .iter()
            .enumerate()
            .map(|(pi, gs)| gs.iter().map(|&g| parent.germ_labels[pi][g as usize].clone()).collect())
            .collect();
        Sheaf::from_basis(parent.frame.clone(), labels, |pi, qi, g| {
            let image = parent.germ_restrict(pi, qi, kept[pi][g as usize]);
            kept[qi].iter().position(|&h| h == image).unwrap() as Germ
        })
        .expect("a subsheaf restricts like its parent")
    }
}

#[cfg(test)]
mod tests;
