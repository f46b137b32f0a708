//! Finite frames, finite topological spaces, nuclei and sublocales.
//!
//! A [`Frame`] is stored as full operation tables over element indices
//! `0..n`. Every finite distributive lattice is the lattice of down-sets of
//! its join-irreducible elements, so the join-irreducibles play the role of
//! points (and of minimal open neighbourhoods) throughout the crate; no
//! algorithm here assumes that a frame came from a space.

mod nucleus;
mod space;

pub use nucleus::{check_nucleus, sublocale_frame, Nucleus, NucleusKind, Sublocale};
pub use space::{FiniteSpace, SpaceError};

use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;

/// Index of an element of a [`Frame`].
pub type Elem = usize;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum FrameError {
    #[error("a frame needs at least one element")]
    Empty,
    #[error("order is not a partial order at ({0}, {1})")]
    NotPartialOrder(Elem, Elem),
    #[error("elements {0} and {1} have no {2}")]
    NotLattice(Elem, Elem, &'static str),
    #[error("distributivity fails at ({0}, {1}, {2})")]
    NotDistributive(Elem, Elem, Elem),
    #[error("map is not a nucleus: {0}")]
    NotNucleus(&'static str),
    #[error("element {0} out of range")]
    OutOfRange(Elem),
}

/// A finite frame given by its order, with precomputed lattice tables.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Frame {
    n: usize,
    leq: Vec<bool>,
    meet: Vec<Elem>,
    join: Vec<Elem>,
    imp: Vec<Elem>,
    bottom: Elem,
    top: Elem,
    below: Vec<Vec<Elem>>,
    irreducibles: Vec<Elem>,
    irr_below: Vec<Vec<Elem>>,
    labels: Vec<String>,
}

impl Frame {
    /// Builds a frame from an order relation, validating that it is a
    /// distributive lattice (finite distributive lattices are frames).
    pub fn from_order(
        n: usize,
        leq: impl Fn(Elem, Elem) -> bool,
        labels: Vec<String>,
    ) -> Result<Frame, FrameError> {
        if n == 0 {
            return Err(FrameError::Empty);
        }
        let mut table = vec![false; n * n];
        for a in 0..n {
            for b in 0..n {
                table[a * n + b] = leq(a, b);
            }
        }
        let le = |a: Elem, b: Elem| table[a * n + b];
        for a in 0..n {
            if !le(a, a) {
                return Err(FrameError::NotPartialOrder(a, a));
            }
            for b in 0..n {
                if a != b && le(a, b) && le(b, a) {
                    return Err(FrameError::NotPartialOrder(a, b));
                }
                for c in 0..n {
                    if le(a, b) && le(b, c) && !le(a, c) {
                        return Err(FrameError::NotPartialOrder(a, c));
                    }
                }
            }
        }
        let bound = |a: Elem, b: Elem, upper: bool| -> Option<Elem> {
            let ok = |c: Elem| if upper { le(a, c) && le(b, c) } else { le(c, a) && le(c, b) };
            let cands: Vec<Elem> = (0..n).filter(|&c| ok(c)).collect();
            cands
                .iter()
                .copied()
                .find(|&c| cands.iter().all(|&d| if upper { le(c, d) } else { le(d, c) }))
        };
        let mut meet = vec![0; n * n];
        let mut join = vec![0; n * n];
        for a in 0..n {
            for b in a..n {
                let m = bound(a, b, false).ok_or(FrameError::NotLattice(a, b, "meet"))?;
                let j = bound(a, b, true).ok_or(FrameError::NotLattice(a, b, "join"))?;
                meet[a * n + b] = m;
                meet[b * n + a] = m;
                join[a * n + b] = j;
                join[b * n + a] = j;
            }
        }
        let bottom = (0..n).find(|&a| (0..n).all(|b| le(a, b))).ok_or(FrameError::Empty)?;
        let top = (0..n).find(|&a| (0..n).all(|b| le(b, a))).ok_or(FrameError::Empty)?;
        for a in 0..n {
            for b in 0..n {
                for c in 0..n {
                    let lhs = meet[a * n + join[b * n + c]];
                    let rhs = join[meet[a * n + b] * n + meet[a * n + c]];
                    if lhs != rhs {
                        return Err(FrameError::NotDistributive(a, b, c));
                    }
                }
            }
        }
        let mut imp = vec![0; n * n];
        for a in 0..n {
            for b in 0..n {
                let mut acc = bottom;
                for c in 0..n {
                    if le(meet[c * n + a], b) {
                        acc = join[acc * n + c];
                    }
                }
                imp[a * n + b] = acc;
            }
        }
        let below: Vec<Vec<Elem>> = (0..n).map(|a| (0..n).filter(|&b| le(b, a)).collect()).collect();
        // p is join-irreducible iff p is not the join of the elements strictly below it.
        let irreducibles: Vec<Elem> = (0..n)
            .filter(|&p| {
                p != bottom
                    && below[p]
                        .iter()
                        .filter(|&&q| q != p)
                        .fold(bottom, |acc, &q| join[acc * n + q])
                        != p
            })
            .collect();
        let irr_below = (0..n)
            .map(|a| irreducibles.iter().copied().filter(|&p| le(p, a)).collect())
            .collect();
        let labels = if labels.len() == n {
            labels
        } else {
            (0..n).map(|i| alloc::format!("e{i}")).collect()
        };
        Ok(Frame { n, leq: table, meet, join, imp, bottom, top, below, irreducibles, irr_below, labels })
    }

    /// Builds the frame of a family of subsets (bitmasks) ordered by inclusion.
    pub fn from_sets(sets: &[u64], labels: Vec<String>) -> Result<Frame, FrameError> {
        Frame::from_order(sets.len(), |a, b| sets[a] & !sets[b] == 0, labels)
    }

    pub fn len(&self) -> usize {
        self.n
    }

    pub fn is_empty(&self) -> bool {
        self.n == 0
    }

    pub fn elements(&self) -> core::ops::Range<Elem> {
        0..self.n
    }

    pub fn leq(&self, a: Elem, b: Elem) -> bool {
        self.leq[a * self.n + b]
    }

    pub fn meet(&self, a: Elem, b: Elem) -> Elem {
        self.meet[a * self.n + b]
    }

    pub fn join(&self, a: Elem, b: Elem) -> Elem {
        self.join[a * self.n + b]
    }

    /// Heyting implication: the largest `c` with `c ∧ a ≤ b`.
    pub fn implies(&self, a: Elem, b: Elem) -> Elem {
        self.imp[a * self.n + b]
    }

    /// Pseudo-complement `a ⇒ ⊥`.
    pub fn neg(&self, a: Elem) -> Elem {
        self.implies(a, self.bottom)
    }

    pub fn bottom(&self) -> Elem {
        self.bottom
    }

    pub fn top(&self) -> Elem {
        self.top
    }

    pub fn join_all(&self, items: impl IntoIterator<Item = Elem>) -> Elem {
        items.into_iter().fold(self.bottom, |acc, x| self.join(acc, x))
    }

    pub fn meet_all(&self, items: impl IntoIterator<Item = Elem>) -> Elem {
        items.into_iter().fold(self.top, |acc, x| self.meet(acc, x))
    }

    /// All elements below `a` (including `a`), in index order.
    pub fn below(&self, a: Elem) -> &[Elem] {
        &self.below[a]
    }

    /// The join-irreducible elements, in index order.
    pub fn irreducibles(&self) -> &[Elem] {
        &self.irreducibles
    }

    /// The join-irreducible elements below `a`; their join is `a`.
    pub fn irreducibles_below(&self, a: Elem) -> &[Elem] {
        &self.irr_below[a]
    }

    pub fn label(&self, a: Elem) -> &str {
        &self.labels[a]
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    /// Elements covered by `a` (maximal elements strictly below it).
    pub fn lower_covers(&self, a: Elem) -> Vec<Elem> {
        let strict: Vec<Elem> = self.below[a].iter().copied().filter(|&b| b != a).collect();
        strict
            .iter()
            .copied()
            .filter(|&b| !strict.iter().any(|&c| c != b && self.leq(b, c)))
            .collect()
    }

    /// An order isomorphism `self → other`, if one exists.
    ///
    /// Distributive lattices are isomorphic iff their posets of join-irreducibles
    /// are, so the search runs over those and extends by joins.
    pub fn isomorphism(&self, other: &Frame) -> Option<Vec<Elem>> {
        if self.n != other.n || self.irreducibles.len() != other.irreducibles.len() {
            return None;
        }
        let js = &self.irreducibles;
        let jo = &other.irreducibles;
        let sig = |f: &Frame, p: Elem, ps: &[Elem]| {
            let down = ps.iter().filter(|&&q| f.leq(q, p)).count();
            let up = ps.iter().filter(|&&q| f.leq(p, q)).count();
            (down, up)
        };
        let sig_s: Vec<_> = js.iter().map(|&p| sig(self, p, js)).collect();
        let sig_o: Vec<_> = jo.iter().map(|&p| sig(other, p, jo)).collect();
        let mut assign: Vec<usize> = Vec::with_capacity(js.len());
        let mut used = vec![false; jo.len()];
        fn search(
            i: usize,
            s: &Frame,
            o: &Frame,
            js: &[Elem],
            jo: &[Elem],
            sig_s: &[(usize, usize)],
            sig_o: &[(usize, usize)],
            assign: &mut Vec<usize>,
            used: &mut [bool],
        ) -> bool {
            if i == js.len() {
                return true;
            }
            for k in 0..jo.len() {
                if used[k] || sig_s[i] != sig_o[k] {
                    continue;
                }
                let consistent = (0..i).all(|m| {
                    s.leq(js[m], js[i]) == o.leq(jo[assign[m]], jo[k])
                        && s.leq(js[i], js[m]) == o.leq(jo[k], jo[assign[m]])
                });
                if !consistent {
                    continue;
                }
                used[k] = true;
                assign.push(k);
                if search(i + 1, s, o, js, jo, sig_s, sig_o, assign, used) {
                    return true;
                }
                assign.pop();
                used[k] = false;
            }
            false
        }
        if !search(0, self, other, js, jo, &sig_s, &sig_o, &mut assign, &mut used) {
            return None;
        }
        let map: Vec<Elem> = (0..self.n)
            .map(|a| {
                other.join_all(self.irr_below[a].iter().map(|&p| {
                    let i = js.iter().position(|&q| q == p).unwrap_or(0);
                    jo[assign[i]]
                }))
            })
            .collect();
        let mut seen = vec![false; self.n];
        for &b in &map {
            if seen[b] {
                return None;
            }
            seen[b] = true;
        }
        for a in 0..self.n {
            for b in 0..self.n {
                if self.leq(a, b) != other.leq(map[a], map[b]) {
                    return None;
                }
            }
        }
        Some(map)
    }

    /// Points of the frame: its completely prime filters, each represented by
    /// its membership vector. In a finite frame such a filter is `↑p` for a
    /// join-prime `p`; join-primeness is tested directly.
    pub fn points(&self) -> Vec<FramePoint> {
        (0..self.n)
            .filter(|&p| p != self.bottom)
            .filter(|&p| {
                (0..self.n).all(|a| {
                    (0..self.n).all(|b| !self.leq(p, self.join(a, b)) || self.leq(p, a) || self.leq(p, b))
                })
            })
            .map(|p| FramePoint { generator: p, members: (0..self.n).map(|a| self.leq(p, a)).collect() })
            .collect()
    }
}

/// A completely prime filter of a finite frame.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FramePoint {
    /// The least element of the filter.
    pub generator: Elem,
    pub members: Vec<bool>,
}

/// The completely prime filters of `frame` (its points as a locale).
pub fn points_of_frame(frame: &Frame) -> Vec<FramePoint> {
    frame.points()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn chain(n: usize) -> Frame {
        Frame::from_order(n, |a, b| a <= b, Vec::new()).unwrap()
    }

    #[test]
    fn chain_operations() {
        let f = chain(3);
        assert_eq!(f.meet(1, 2), 1);
        assert_eq!(f.join(0, 2), 2);
        assert_eq!(f.implies(2, 1), 1);
        assert_eq!(f.implies(1, 2), 2);
        assert_eq!(f.irreducibles(), &[1, 2]);
        assert_eq!(f.points().len(), 2);
    }

    #[test]
    fn trivial_frames() {
        assert_eq!(chain(1).points().len(), 0);
        assert_eq!(chain(2).points().len(), 1);
    }

    #[test]
    fn rejects_non_distributive() {
        // The diamond M3 is a lattice but not distributive.
        let le = |a: usize, b: usize| a == b || a == 0 || b == 4;
        assert!(matches!(Frame::from_order(5, le, Vec::new()), Err(FrameError::NotDistributive(..))));
    }

    #[test]
    fn rejects_non_lattice() {
        // Two incomparable maximal elements.
        let le = |a: usize, b: usize| a == b || a == 0;
        assert!(matches!(Frame::from_order(3, le, Vec::new()), Err(FrameError::NotLattice(..))));
    }

    #[test]
    fn isomorphism_of_boolean_squares() {
        let a = Frame::from_sets(&[0, 1, 2, 3], Vec::new()).unwrap();
        let b = Frame::from_sets(&[0, 4, 8, 12], Vec::new()).unwrap();
        assert!(a.isomorphism(&b).is_some());
        assert!(a.isomorphism(&chain(4)).is_none());
    }
}
