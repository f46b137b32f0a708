use alloc::string::String;
use alloc::vec::Vec;

use super::{Elem, FiniteSpace, Frame, FrameError};

/// Which constructor produced a nucleus; kept for reporting.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum NucleusKind {
    Identity,
    /// The open subspace on the given open.
    Open(Elem),
    /// The closed subspace complementary to the given open.
    Closed(Elem),
    DoubleNegation,
    /// The subspace `{x}` for the point whose minimal open is the given element.
    Point(Elem),
    Custom(String),
}

/// A nucleus: an inflationary, idempotent, meet-preserving map on a frame.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Nucleus {
    map: Vec<Elem>,
    kind: NucleusKind,
}

impl Nucleus {
    /// Wraps a table after checking the three nucleus axioms.
    pub fn from_map(frame: &Frame, map: Vec<Elem>, kind: NucleusKind) -> Result<Nucleus, FrameError> {
        if map.len() != frame.len() {
            return Err(FrameError::NotNucleus("table size differs from frame size"));
        }
        if let Some(&bad) = map.iter().find(|&&b| b >= frame.len()) {
            return Err(FrameError::OutOfRange(bad));
        }
        let j = Nucleus { map, kind };
        match j.violation(frame) {
            Some(reason) => Err(FrameError::NotNucleus(reason)),
            None => Ok(j),
        }
    }

    fn trusted(map: Vec<Elem>, kind: NucleusKind) -> Nucleus {
        Nucleus { map, kind }
    }

    pub fn identity(frame: &Frame) -> Nucleus {
        Nucleus::trusted(frame.elements().collect(), NucleusKind::Identity)
    }

    /// `j(v) = u ⇒ v`: the open sublocale on `u`.
    pub fn open(frame: &Frame, u: Elem) -> Nucleus {
        Nucleus::trusted(frame.elements().map(|v| frame.implies(u, v)).collect(), NucleusKind::Open(u))
    }

    /// `j(v) = v ∨ w`: the closed sublocale complementary to the open `w`.
    pub fn closed(frame: &Frame, w: Elem) -> Nucleus {
        Nucleus::trusted(frame.elements().map(|v| frame.join(v, w)).collect(), NucleusKind::Closed(w))
    }

    /// `j(v) = ¬¬v`.
    pub fn double_negation(frame: &Frame) -> Nucleus {
        Nucleus::trusted(frame.elements().map(|v| frame.neg(frame.neg(v))).collect(), NucleusKind::DoubleNegation)
    }

    /// The sublocale of the point given by the join-prime element `p`:
    /// `j(v) = ⊤` if `p ≤ v`, else the join of all `w` with `p ≰ w`.
    pub fn point(frame: &Frame, p: Elem) -> Nucleus {
        let outside = frame.join_all(frame.elements().filter(|&w| !frame.leq(p, w)));
        let map = frame.elements().map(|v| if frame.leq(p, v) { frame.top() } else { outside }).collect();
        Nucleus::trusted(map, NucleusKind::Point(p))
    }

    pub fn apply(&self, v: Elem) -> Elem {
        self.map[v]
    }

    pub fn table(&self) -> &[Elem] {
        &self.map
    }

    pub fn kind(&self) -> &NucleusKind {
        &self.kind
    }

    fn violation(&self, frame: &Frame) -> Option<&'static str> {
        let j = &self.map;
        for u in frame.elements() {
            if !frame.leq(u, j[u]) {
                return Some("not inflationary");
            }
            if j[j[u]] != j[u] {
                return Some("not idempotent");
            }
            for v in frame.elements() {
                if j[frame.meet(u, v)] != frame.meet(j[u], j[v]) {
                    return Some("does not preserve binary meets");
                }
            }
        }
        None
    }

    /// Whether all three nucleus axioms hold for all elements.
    pub fn check(&self, frame: &Frame) -> bool {
        self.map.len() == frame.len() && self.map.iter().all(|&b| b < frame.len()) && self.violation(frame).is_none()
    }

    pub fn is_identity(&self) -> bool {
        self.map.iter().enumerate().all(|(i, &b)| i == b)
    }
}

/// Checks the nucleus axioms for an arbitrary table on a frame.
pub fn check_nucleus(frame: &Frame, map: &[Elem]) -> bool {
    Nucleus::trusted(map.to_vec(), NucleusKind::Custom(String::new())).check(frame)
}

/// The sublocale of a nucleus: its fixed points with parent meets and
/// joins `j(a ∨ b)`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Sublocale {
    fixed: Vec<Elem>,
    position: Vec<Option<Elem>>,
    frame: Frame,
}

impl Sublocale {
    pub fn new(parent: &Frame, j: &Nucleus) -> Sublocale {
        let fixed: Vec<Elem> = parent.elements().filter(|&v| j.apply(v) == v).collect();
        let mut position = alloc::vec![None; parent.len()];
        for (i, &v) in fixed.iter().enumerate() {
            position[v] = Some(i);
        }
        let labels = fixed.iter().map(|&v| String::from(parent.label(v))).collect();
        let frame = Frame::from_order(fixed.len(), |a, b| parent.leq(fixed[a], fixed[b]), labels)
            .expect("fixed points of a nucleus form a frame");
        Sublocale { fixed, position, frame }
    }

    /// Parent elements that are fixed by the nucleus, in parent order.
    pub fn fixed(&self) -> &[Elem] {
        &self.fixed
    }

    pub fn frame(&self) -> &Frame {
        &self.frame
    }

    pub fn to_parent(&self, e: Elem) -> Elem {
        self.fixed[e]
    }

    pub fn from_parent(&self, v: Elem) -> Option<Elem> {
        self.position[v]
    }
}

/// The sublocale frame of a nucleus.
pub fn sublocale_frame(parent: &Frame, j: &Nucleus) -> Sublocale {
    Sublocale::new(parent, j)
}

impl FiniteSpace {
    /// `j(V) = Int(U0ᶜ ∪ V)`.
    pub fn nucleus_open(&self, u0: Elem) -> Nucleus {
        let full = self.full_mask();
        let map = self
            .frame()
            .elements()
            .map(|v| self.open_of_mask(self.interior((full & !self.mask(u0)) | self.mask(v))).expect("interior is open"))
            .collect();
        Nucleus::trusted(map, NucleusKind::Open(u0))
    }

    /// `j(V) = V ∪ Aᶜ` for a closed set `A`, given by its open complement.
    pub fn nucleus_closed(&self, complement: Elem) -> Nucleus {
        let map = self
            .frame()
            .elements()
            .map(|v| self.open_of_mask(self.mask(v) | self.mask(complement)).expect("union is open"))
            .collect();
        Nucleus::trusted(map, NucleusKind::Closed(complement))
    }

    /// `j(V) = Int(Clos(V))`.
    pub fn nucleus_negneg(&self) -> Nucleus {
        let map = self
            .frame()
            .elements()
            .map(|v| self.open_of_mask(self.interior(self.closure(self.mask(v)))).expect("interior is open"))
            .collect();
        Nucleus::trusted(map, NucleusKind::DoubleNegation)
    }

    /// `j(V) = X` if `x ∈ V`, else `X ∖ Clos{x}`.
    pub fn nucleus_point(&self, x: usize) -> Nucleus {
        let full = self.full_mask();
        let rest = full & !self.closure(1 << x);
        let map = self
            .frame()
            .elements()
            .map(|v| if self.contains(v, x) { self.frame().top() } else { self.open_of_mask(rest).expect("open") })
            .collect();
        Nucleus::trusted(map, NucleusKind::Point(self.min_open(x)))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn negneg_on_sierpinski() {
        let s = FiniteSpace::sierpinski();
        let j = s.nucleus_negneg();
        assert_eq!(j.table(), &[0, 2, 2]);
        assert!(j.check(s.frame()));
        assert_eq!(j, Nucleus::double_negation(s.frame()));
    }

    #[test]
    fn open_nucleus_on_sierpinski() {
        let s = FiniteSpace::sierpinski();
        let j = s.nucleus_open(1);
        assert_eq!(j.table(), &[0, 2, 2]);
        // Fixed points are {∅, S}: a two-element frame, i.e. one point, as
        // the open subspace {eta} has.
        let sub = Sublocale::new(s.frame(), &j);
        assert_eq!(sub.fixed(), &[0, 2]);
        assert!(sub.frame().isomorphism(&s.subspace_frame(0b01)).is_some());
    }

    #[test]
    fn closed_full_is_identity() {
        let s = FiniteSpace::sierpinski();
        assert!(s.nucleus_closed(0).is_identity());
    }

    #[test]
    fn constant_bottom_is_rejected() {
        let f = Frame::from_order(2, |a, b| a <= b, Vec::new()).unwrap();
        assert!(!check_nucleus(&f, &[0, 0]));
        assert!(check_nucleus(&f, &[0, 1]));
        assert!(Nucleus::from_map(&f, alloc::vec![0, 0], NucleusKind::Custom("bot".into())).is_err());
    }

    #[test]
    fn negneg_sublocale_of_sierpinski_is_a_point() {
        let s = FiniteSpace::sierpinski();
        let sub = Sublocale::new(s.frame(), &s.nucleus_negneg());
        assert_eq!(sub.fixed(), &[0, 2]);
        assert_eq!(sub.frame().points().len(), 1);
    }
}
