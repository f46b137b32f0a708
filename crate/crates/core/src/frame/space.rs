use alloc::collections::BTreeMap;
use alloc::string::{String, ToString};
use alloc::vec::Vec;
use alloc::format;

use super::{Elem, Frame};

/// Upper bound on points; open sets are stored as `u64` bitmasks.
pub const MAX_POINTS: usize = 64;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum SpaceError {
    #[error("too many points ({0}, at most 64)")]
    TooManyPoints(usize),
    #[error("duplicate point `{0}`")]
    DuplicatePoint(String),
    #[error("unknown point `{0}`")]
    UnknownPoint(String),
    #[error("the empty set is not listed as open")]
    MissingEmpty,
    #[error("the full set is not listed as open")]
    MissingFull,
    #[error("union of {0} and {1} is not open")]
    UnionNotOpen(String, String),
    #[error("intersection of {0} and {1} is not open")]
    IntersectionNotOpen(String, String),
    #[error("open `{0}` is not an open of this space")]
    NotOpen(String),
    #[error("duplicate open name `{0}`")]
    DuplicateName(String),
}

/// A finite topological space: named points and the family of open sets.
///
/// Opens are kept in canonical order (by size, then by the lexicographic list
/// of point indices), and that order is also the element order of the frame of
/// opens, so open indices are frame elements.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FiniteSpace {
    points: Vec<String>,
    opens: Vec<u64>,
    index: BTreeMap<u64, Elem>,
    frame: Frame,
    min_open: Vec<Elem>,
    names: BTreeMap<String, Elem>,
}

fn canonical_key(mask: u64) -> (u32, Vec<u32>) {
    let mut pts = Vec::new();
    let mut m = mask;
    while m != 0 {
        pts.push(m.trailing_zeros());
        m &= m - 1;
    }
    (mask.count_ones(), pts)
}

impl FiniteSpace {
    /// Validates a candidate topology given as bitmasks over `points`.
    pub fn new(points: Vec<String>, opens: Vec<u64>) -> Result<FiniteSpace, SpaceError> {
        let n = points.len();
        if n > MAX_POINTS {
            return Err(SpaceError::TooManyPoints(n));
        }
        for (i, p) in points.iter().enumerate() {
            if points[..i].contains(p) {
                return Err(SpaceError::DuplicatePoint(p.clone()));
            }
        }
        let full = if n == 64 { u64::MAX } else { (1u64 << n) - 1 };
        let mut opens: Vec<u64> = opens;
        for &o in &opens {
            if o & !full != 0 {
                return Err(SpaceError::UnknownPoint(format!("bit {}", 63 - (o & !full).leading_zeros())));
            }
        }
        opens.sort_by_key(|&m| canonical_key(m));
        opens.dedup();
        if !opens.contains(&0) {
            return Err(SpaceError::MissingEmpty);
        }
        if !opens.contains(&full) {
            return Err(SpaceError::MissingFull);
        }
        let describe = |m: u64| set_label(&points, m);
        for (i, &a) in opens.iter().enumerate() {
            for &b in &opens[i + 1..] {
                if opens.binary_search_by_key(&canonical_key(a | b), |&m| canonical_key(m)).is_err() {
                    return Err(SpaceError::UnionNotOpen(describe(a), describe(b)));
                }
                if opens.binary_search_by_key(&canonical_key(a & b), |&m| canonical_key(m)).is_err() {
                    return Err(SpaceError::IntersectionNotOpen(describe(a), describe(b)));
                }
            }
        }
        let labels = opens.iter().map(|&m| describe(m)).collect();
        let frame = Frame::from_sets(&opens, labels).expect("a topology is a distributive lattice");
        let index: BTreeMap<u64, Elem> = opens.iter().enumerate().map(|(i, &m)| (m, i)).collect();
        let min_open = (0..n)
            .map(|x| {
                let m = opens.iter().filter(|&&o| o >> x & 1 == 1).fold(full, |acc, &o| acc & o);
                index[&m]
            })
            .collect();
        Ok(FiniteSpace { points, opens, index, frame, min_open, names: BTreeMap::new() })
    }

    /// Convenience constructor from point names and opens listed by point names.
    pub fn from_lists(points: &[&str], opens: &[&[&str]]) -> Result<FiniteSpace, SpaceError> {
        let pts: Vec<String> = points.iter().map(|s| s.to_string()).collect();
        let mut masks = Vec::new();
        for o in opens {
            let mut m = 0u64;
            for name in o.iter() {
                let i = pts.iter().position(|p| p == name).ok_or_else(|| SpaceError::UnknownPoint(name.to_string()))?;
                m |= 1 << i;
            }
            masks.push(m);
        }
        FiniteSpace::new(pts, masks)
    }

    /// The Alexandrov topology of a relation: `(x, y)` means every open
    /// containing `x` contains `y`.
    pub fn alexandrov(points: Vec<String>, arrows: &[(usize, usize)]) -> Result<FiniteSpace, SpaceError> {
        let n = points.len();
        if n > 20 {
            return Err(SpaceError::TooManyPoints(n));
        }
        let opens = (0..1u64 << n)
            .filter(|&m| arrows.iter().all(|&(x, y)| m >> x & 1 == 0 || m >> y & 1 == 1))
            .collect();
        FiniteSpace::new(points, opens)
    }

    /// The discrete space on `n` points named `p0, p1, ...`.
    pub fn discrete(n: usize) -> FiniteSpace {
        FiniteSpace::alexandrov((0..n).map(|i| format!("p{i}")).collect(), &[]).expect("valid")
    }

    /// The Sierpinski space: an open point `eta` and a closed point `sigma`.
    pub fn sierpinski() -> FiniteSpace {
        FiniteSpace::from_lists(&["eta", "sigma"], &[&[], &["eta"], &["eta", "sigma"]]).expect("valid")
    }

    /// Attaches a name to an open, for use as a propositional constant.
    pub fn name_open(&mut self, name: &str, open: Elem) -> Result<(), SpaceError> {
        if self.names.contains_key(name) {
            return Err(SpaceError::DuplicateName(name.to_string()));
        }
        self.names.insert(name.to_string(), open);
        Ok(())
    }

    pub fn named_opens(&self) -> &BTreeMap<String, Elem> {
        &self.names
    }

    pub fn points(&self) -> &[String] {
        &self.points
    }

    pub fn num_points(&self) -> usize {
        self.points.len()
    }

    pub fn point_index(&self, name: &str) -> Option<usize> {
        self.points.iter().position(|p| p == name)
    }

    pub fn full_mask(&self) -> u64 {
        self.opens[self.opens.len() - 1]
    }

    /// Open sets as bitmasks in canonical order.
    pub fn opens(&self) -> &[u64] {
        &self.opens
    }

    pub fn frame(&self) -> &Frame {
        &self.frame
    }

    pub fn mask(&self, open: Elem) -> u64 {
        self.opens[open]
    }

    pub fn open_of_mask(&self, mask: u64) -> Option<Elem> {
        self.index.get(&mask).copied()
    }

    pub fn is_open(&self, mask: u64) -> bool {
        self.index.contains_key(&mask)
    }

    pub fn contains(&self, open: Elem, point: usize) -> bool {
        self.opens[open] >> point & 1 == 1
    }

    /// The minimal open neighbourhood of a point.
    pub fn min_open(&self, point: usize) -> Elem {
        self.min_open[point]
    }

    pub fn interior(&self, mask: u64) -> u64 {
        self.opens.iter().filter(|&&o| o & !mask == 0).fold(0, |acc, &o| acc | o)
    }

    pub fn closure(&self, mask: u64) -> u64 {
        let full = self.full_mask();
        full & !self.interior(full & !mask)
    }

    /// The largest open `W` with `W ∩ U ⊆ V`, computed as an interior.
    pub fn heyting_implication(&self, u: Elem, v: Elem) -> Elem {
        let full = self.full_mask();
        let w = self.interior((full & !self.opens[u]) | self.opens[v]);
        self.index[&w]
    }

    /// Whether an open is dense, i.e. its closure is everything.
    pub fn is_dense(&self, v: Elem) -> bool {
        self.closure(self.opens[v]) == self.full_mask()
    }

    /// Looks up an open by name, by `{a,b}` listing, or by canonical index.
    pub fn resolve_open(&self, text: &str) -> Result<Elem, SpaceError> {
        let t = text.trim();
        if let Some(&e) = self.names.get(t) {
            return Ok(e);
        }
        if t == "X" {
            return Ok(self.frame.top());
        }
        if let Ok(i) = t.parse::<usize>() {
            if i < self.opens.len() {
                return Ok(i);
            }
        }
        let inner = t.strip_prefix('{').and_then(|s| s.strip_suffix('}')).unwrap_or(t);
        let mut m = 0u64;
        for name in inner.split(|c: char| c == ',' || c.is_whitespace()).filter(|s| !s.is_empty()) {
            let i = self.point_index(name).ok_or_else(|| SpaceError::UnknownPoint(name.to_string()))?;
            m |= 1 << i;
        }
        self.open_of_mask(m).ok_or_else(|| SpaceError::NotOpen(t.to_string()))
    }

    /// Human-readable name of an open: its given name, `X`, or its point set.
    pub fn describe(&self, open: Elem) -> String {
        if let Some((name, _)) = self.names.iter().find(|(_, &e)| e == open) {
            return name.clone();
        }
        if open == self.frame.top() {
            return "X".to_string();
        }
        set_label(&self.points, self.opens[open])
    }

    /// The frame of opens of the subspace on `mask` (traces of opens).
    pub fn subspace_frame(&self, mask: u64) -> Frame {
        let mut traces: Vec<u64> = self.opens.iter().map(|&o| o & mask).collect();
        traces.sort_by_key(|&m| canonical_key(m));
        traces.dedup();
        Frame::from_sets(&traces, Vec::new()).expect("traces of a topology form a topology")
    }
}

pub(crate) fn set_label(points: &[String], mask: u64) -> String {
    let mut s = String::from("{");
    let mut first = true;
    for (i, p) in points.iter().enumerate() {
        if mask >> i & 1 == 1 {
            if !first {
                s.push(',');
            }
            s.push_str(p);
            first = false;
        }
    }
    s.push('}');
    s
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn sierpinski_is_valid() {
        let s = FiniteSpace::sierpinski();
        assert_eq!(s.opens(), &[0b00, 0b01, 0b11]);
        assert_eq!(s.min_open(1), 2);
        assert_eq!(s.min_open(0), 1);
    }

    #[test]
    fn missing_full_set() {
        let r = FiniteSpace::from_lists(&["eta", "sigma"], &[&[], &["eta"]]);
        assert_eq!(r, Err(SpaceError::MissingFull));
    }

    #[test]
    fn missing_union_names_pair() {
        let r = FiniteSpace::from_lists(&["a", "b", "c"], &[&[], &["a"], &["b"], &["a", "b", "c"]]);
        assert_eq!(r, Err(SpaceError::UnionNotOpen("{a}".into(), "{b}".into())));
    }

    #[test]
    fn heyting_on_sierpinski() {
        let s = FiniteSpace::sierpinski();
        // Oracle: the largest W among all opens with W ∩ {eta} ⊆ ∅.
        let best = s.opens().iter().filter(|&&w| w & 0b01 == 0).max_by_key(|w| w.count_ones()).copied();
        assert_eq!(best, Some(0));
        assert_eq!(s.heyting_implication(1, 0), 0);
        for u in 0..3 {
            assert_eq!(s.heyting_implication(u, u), 2);
            assert_eq!(s.heyting_implication(2, u), u);
        }
    }

    #[test]
    fn density() {
        let s = FiniteSpace::sierpinski();
        assert!(s.is_dense(1));
        assert!(!s.is_dense(0));
        assert!(s.is_dense(2));
    }

    #[test]
    fn resolve_opens() {
        let mut s = FiniteSpace::sierpinski();
        s.name_open("U", 1).unwrap();
        assert_eq!(s.resolve_open("U"), Ok(1));
        assert_eq!(s.resolve_open("{eta,sigma}"), Ok(2));
        assert_eq!(s.resolve_open("{}"), Ok(0));
        assert!(s.resolve_open("{sigma}").is_err());
        assert_eq!(s.describe(2), "X");
    }
}
