use alloc::string::String;
use alloc::vec::Vec;
use alloc::{format, vec};

use super::{bit, mask_upto, members, FinRing, Localization, RingError, Subset, MAX_ELEMENTS};

/// A finite module over a [`FinRing`], given by tables.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FinModule {
    ring: FinRing,
    n: usize,
    add: Vec<usize>,
    neg: Vec<usize>,
    zero: usize,
    act: Vec<usize>,
    labels: Vec<String>,
}

/// A linear map given by its table on elements.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LinearMap {
    pub table: Vec<usize>,
}

impl FinModule {
    /// Builds a module from tables and checks the module axioms.
    pub fn from_tables(
        ring: FinRing,
        n: usize,
        add: impl Fn(usize, usize) -> usize,
        act: impl Fn(usize, usize) -> usize,
        zero: usize,
        labels: Vec<String>,
    ) -> Result<FinModule, RingError> {
        if n == 0 || zero >= n {
            return Err(RingError::Axiom("a module has a zero element"));
        }
        if n > MAX_ELEMENTS {
            return Err(RingError::TooLarge(n));
        }
        let r = ring.len();
        let mut at = vec![0; n * n];
        let mut ct = vec![0; r * n];
        for a in 0..n {
            for b in 0..n {
                at[a * n + b] = add(a, b);
            }
            for s in 0..r {
                ct[s * n + a] = act(s, a);
            }
        }
        if at.iter().chain(&ct).any(|&x| x >= n) {
            return Err(RingError::Axiom("operation leaves the carrier"));
        }
        let mut neg = vec![0; n];
        for a in 0..n {
            neg[a] = (0..n).find(|&b| at[a * n + b] == zero).ok_or(RingError::Axiom("missing additive inverse"))?;
        }
        let labels = if labels.len() == n { labels } else { (0..n).map(|i| format!("{i}")).collect() };
        let m = FinModule { ring, n, add: at, neg, zero, act: ct, labels };
        m.check_axioms()?;
        Ok(m)
    }

    fn check_axioms(&self) -> Result<(), RingError> {
        let ring = &self.ring;
        for a in 0..self.n {
            if self.add(a, self.zero) != a {
                return Err(RingError::Axiom("zero is not neutral"));
            }
            if self.act(ring.one(), a) != a {
                return Err(RingError::Axiom("one does not act trivially"));
            }
            for b in 0..self.n {
                if self.add(a, b) != self.add(b, a) {
                    return Err(RingError::Axiom("addition not commutative"));
                }
                for c in 0..self.n {
                    if self.add(self.add(a, b), c) != self.add(a, self.add(b, c)) {
                        return Err(RingError::Axiom("addition not associative"));
                    }
                }
                for r in ring.elements() {
                    if self.act(r, self.add(a, b)) != self.add(self.act(r, a), self.act(r, b)) {
                        return Err(RingError::Axiom("action not additive in the module"));
                    }
                }
            }
            for r in ring.elements() {
                for s in ring.elements() {
                    if self.act(ring.add(r, s), a) != self.add(self.act(r, a), self.act(s, a)) {
                        return Err(RingError::Axiom("action not additive in the ring"));
                    }
                    if self.act(ring.mul(r, s), a) != self.act(r, self.act(s, a)) {
                        return Err(RingError::Axiom("action not associative"));
                    }
                }
            }
        }
        Ok(())
    }

    /// The ring as a module over itself.
    pub fn regular(ring: &FinRing) -> FinModule {
        let r = ring.clone();
        FinModule::from_tables(
            ring.clone(),
            ring.len(),
            |a, b| r.add(a, b),
            |s, a| r.mul(s, a),
            ring.zero(),
            ring.labels().to_vec(),
        )
        .expect("a ring is a module over itself")
    }

    /// The quotient module `A/I`.
    pub fn quotient(ring: &FinRing, ideal: Subset) -> Result<FinModule, RingError> {
        if !ring.is_ideal(ideal) {
            return Err(RingError::Axiom("not an ideal"));
        }
        let mut reps: Vec<usize> = Vec::new();
        let mut class = vec![0; ring.len()];
        for a in ring.elements() {
            match reps.iter().position(|&r| ideal & bit(ring.sub(a, r)) != 0) {
                Some(c) => class[a] = c,
                None => {
                    class[a] = reps.len();
                    reps.push(a);
                }
            }
        }
        let labels = reps.iter().map(|&a| format!("[{}]", ring.label(a))).collect();
        FinModule::from_tables(
            ring.clone(),
            reps.len(),
            |p, q| class[ring.add(reps[p], reps[q])],
            |s, p| class[ring.mul(s, reps[p])],
            class[ring.zero()],
            labels,
        )
    }

    /// The zero module.
    pub fn zero_module(ring: &FinRing) -> FinModule {
        FinModule::from_tables(ring.clone(), 1, |_, _| 0, |_, _| 0, 0, vec![String::from("0")]).expect("zero module")
    }

    /// The direct sum, with elements `(m,n)` indexed `m * |N| + n`.
    pub fn direct_sum(a: &FinModule, b: &FinModule) -> Result<FinModule, RingError> {
        if a.ring != b.ring {
            return Err(RingError::Axiom("direct sum of modules over different rings"));
        }
        let m = b.n;
        let labels = (0..a.n * m).map(|i| format!("({},{})", a.label(i / m), b.label(i % m))).collect();
        FinModule::from_tables(
            a.ring.clone(),
            a.n * m,
            |x, y| a.add(x / m, y / m) * m + b.add(x % m, y % m),
            |s, x| a.act(s, x / m) * m + b.act(s, x % m),
            a.zero * m + b.zero,
            labels,
        )
    }

    pub fn ring(&self) -> &FinRing {
        &self.ring
    }

    pub fn len(&self) -> usize {
        self.n
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn is_zero(&self) -> bool {
        self.n == 1
    }

    pub fn elements(&self) -> core::ops::Range<usize> {
        0..self.n
    }

    pub fn zero(&self) -> usize {
        self.zero
    }

    pub fn add(&self, a: usize, b: usize) -> usize {
        self.add[a * self.n + b]
    }

    pub fn neg(&self, a: usize) -> usize {
        self.neg[a]
    }

    pub fn sub(&self, a: usize, b: usize) -> usize {
        self.add(a, self.neg(b))
    }

    pub fn act(&self, r: usize, a: usize) -> usize {
        self.act[r * self.n + a]
    }

    pub fn label(&self, a: usize) -> &str {
        &self.labels[a]
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn element(&self, label: &str) -> Option<usize> {
        self.labels.iter().position(|l| l == label)
    }

    /// The submodule generated by a set of elements.
    pub fn span(&self, gens: Subset) -> Subset {
        let mut sub = bit(self.zero);
        for g in members(gens) {
            let mut next = sub;
            for s in members(sub) {
                for r in self.ring.elements() {
                    next |= bit(self.add(s, self.act(r, g)));
                }
            }
            sub = next;
        }
        sub
    }

    pub fn is_submodule(&self, s: Subset) -> bool {
        s & bit(self.zero) != 0
            && members(s).all(|a| {
                members(s).all(|b| s & bit(self.add(a, b)) != 0) && self.ring.elements().all(|r| s & bit(self.act(r, a)) != 0)
            })
    }

    /// All submodules, sorted by size then bitmask.
    pub fn submodules(&self) -> Vec<Subset> {
        let mut found = vec![bit(self.zero)];
        let mut i = 0;
        while i < found.len() {
            let cur = found[i];
            for a in self.elements() {
                if cur & bit(a) == 0 {
                    let next = self.span(cur | bit(a));
                    if !found.contains(&next) {
                        found.push(next);
                    }
                }
            }
            i += 1;
        }
        found.sort_by_key(|&m| (m.count_ones(), m));
        found
    }

    /// Whether some `k` elements generate the module.
    pub fn generated_by(&self, k: usize) -> bool {
        let full = mask_upto(self.n);
        fn go(m: &FinModule, start: usize, left: usize, acc: Subset, full: Subset) -> bool {
            if m.span(acc) == full {
                return true;
            }
            left > 0 && (start..m.n).any(|g| go(m, g + 1, left - 1, acc | bit(g), full))
        }
        go(self, 0, k, 0, full)
    }

    /// Whether a table is an `A`-linear map `self → target`.
    pub fn is_linear(&self, target: &FinModule, table: &[usize]) -> bool {
        table.len() == self.n
            && table.iter().all(|&t| t < target.n)
            && self.elements().all(|a| {
                self.elements().all(|b| table[self.add(a, b)] == target.add(table[a], table[b]))
                    && self.ring.elements().all(|r| table[self.act(r, a)] == target.act(r, table[a]))
            })
    }

    /// Localization at a multiplicative set, as a module over the given
    /// localization of the ring (which must be at the same set).
    pub fn localize(&self, loc: &Localization) -> ModuleLocalization {
        let ring = &self.ring;
        let s = loc.denominators;
        let dens: Vec<usize> = core::iter::once(ring.one()).chain(members(s).filter(|&d| d != ring.one())).collect();
        let equiv = |(a, x): (usize, usize), (b, y): (usize, usize)| {
            let diff = self.sub(self.act(y, a), self.act(x, b));
            members(s).any(|u| self.act(u, diff) == self.zero)
        };
        let mut reps: Vec<(usize, usize)> = Vec::new();
        let mut class = vec![0; self.n * dens.len()];
        for (di, &d) in dens.iter().enumerate() {
            for a in self.elements() {
                let c = match reps.iter().position(|&r| equiv(r, (a, d))) {
                    Some(c) => c,
                    None => {
                        reps.push((a, d));
                        reps.len() - 1
                    }
                };
                class[a * dens.len() + di] = c;
            }
        }
        let dpos = |d: usize| dens.iter().position(|&e| e == d).expect("denominator in S");
        let cls = |a: usize, d: usize| class[a * dens.len() + dpos(d)];
        let labels = reps
            .iter()
            .map(|&(a, d)| if d == ring.one() { String::from(self.label(a)) } else { format!("{}/{}", self.label(a), ring.label(d)) })
            .collect();
        let module = FinModule::from_tables(
            loc.ring.clone(),
            reps.len(),
            |p, q| {
                let ((a, x), (b, y)) = (reps[p], reps[q]);
                cls(self.add(self.act(y, a), self.act(x, b)), ring.mul(x, y))
            },
            |c, p| {
                let (r, x) = loc.representative(c);
                let (a, y) = reps[p];
                cls(self.act(r, a), ring.mul(x, y))
            },
            cls(self.zero, ring.one()),
            labels,
        )
        .expect("localization of a module is a module");
        let map = self.elements().map(|a| cls(a, ring.one())).collect();
        ModuleLocalization { module, map, reps, class, dens }
    }
}

/// A localized module with the canonical map from the original module.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ModuleLocalization {
    pub module: FinModule,
    pub map: Vec<usize>,
    reps: Vec<(usize, usize)>,
    class: Vec<usize>,
    dens: Vec<usize>,
}

impl ModuleLocalization {
    /// The class of `m/s`, for `s` in the multiplicative set.
    pub fn fraction(&self, m: usize, s: usize) -> Option<usize> {
        let di = self.dens.iter().position(|&d| d == s)?;
        Some(self.class[m * self.dens.len() + di])
    }

    pub fn representative(&self, c: usize) -> (usize, usize) {
        self.reps[c]
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn quotient_of_z12() {
        let a = FinRing::zmod(12).unwrap();
        let m = FinModule::quotient(&a, a.ideal_generated(bit(2))).unwrap();
        assert_eq!(m.len(), 2);
        assert!(m.generated_by(1));
        assert!(!m.generated_by(0));
    }

    #[test]
    fn submodules_of_regular_module_are_ideals() {
        let a = FinRing::zmod(12).unwrap();
        assert_eq!(FinModule::regular(&a).submodules(), a.ideals());
    }

    #[test]
    fn localized_quotient_vanishes_away_from_support() {
        let a = FinRing::zmod(12).unwrap();
        let m = FinModule::quotient(&a, a.ideal_generated(bit(2))).unwrap();
        // At the prime (3), the element 2 becomes invertible and kills ℤ/2.
        let at3 = a.localize(a.subset(|x| x % 3 != 0));
        assert!(m.localize(&at3).module.is_zero());
        let at2 = a.localize(a.subset(|x| x % 2 != 0));
        assert_eq!(m.localize(&at2).module.len(), 2);
    }

    #[test]
    fn rejects_bad_action() {
        let a = FinRing::zmod(4).unwrap();
        // ℤ/3 is not a ℤ/4-module via the naive action.
        assert!(FinModule::from_tables(a, 3, |x, y| (x + y) % 3, |r, x| (r * x) % 3, 0, Vec::new()).is_err());
    }
}
