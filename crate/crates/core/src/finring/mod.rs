//! Finite commutative rings with exhaustive ideal, filter and localization
//! machinery.
//!
//! Rings have at most 64 elements so that subsets (ideals, filters,
//! multiplicative sets) fit in a `u64` bitmask.

mod module;
mod spec;

pub use module::{FinModule, LinearMap, ModuleLocalization};
pub use spec::{parse_polynomial, RingSpec};

use alloc::string::String;
use alloc::vec::Vec;
use alloc::{format, vec};

/// Subsets of a ring or module as bitmasks.
pub type Subset = u64;

pub const MAX_ELEMENTS: usize = 64;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum RingError {
    #[error("structure has {0} elements, more than the supported 64")]
    TooLarge(usize),
    #[error("modulus polynomial must be monic of degree at least 1")]
    NotMonic,
    #[error("zmod needs a modulus of at least 1")]
    ZeroModulus,
    #[error("axiom violated: {0}")]
    Axiom(&'static str),
    #[error("cannot parse ring expression: {0}")]
    Parse(String),
    #[error("unknown element `{0}`")]
    UnknownElement(String),
}

/// A finite commutative unital ring given by full operation tables.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FinRing {
    n: usize,
    add: Vec<usize>,
    mul: Vec<usize>,
    neg: Vec<usize>,
    zero: usize,
    one: usize,
    labels: Vec<String>,
}

impl FinRing {
    /// Builds a ring from tables and checks the commutative ring axioms.
    pub fn from_tables(
        n: usize,
        add: impl Fn(usize, usize) -> usize,
        mul: impl Fn(usize, usize) -> usize,
        zero: usize,
        one: usize,
        labels: Vec<String>,
    ) -> Result<FinRing, RingError> {
        if n == 0 {
            return Err(RingError::Axiom("a ring has at least one element"));
        }
        if n > MAX_ELEMENTS {
            return Err(RingError::TooLarge(n));
        }
        let mut at = vec![0; n * n];
        let mut mt = vec![0; n * n];
        for a in 0..n {
            for b in 0..n {
                at[a * n + b] = add(a, b);
                mt[a * n + b] = mul(a, b);
                if at[a * n + b] >= n || mt[a * n + b] >= n {
                    return Err(RingError::Axiom("operation leaves the carrier"));
                }
            }
        }
        let mut neg = vec![0; n];
        for a in 0..n {
            neg[a] = (0..n).find(|&b| at[a * n + b] == zero).ok_or(RingError::Axiom("missing additive inverse"))?;
        }
        let labels = if labels.len() == n { labels } else { (0..n).map(|i| format!("{i}")).collect() };
        let ring = FinRing { n, add: at, mul: mt, neg, zero, one, labels };
        ring.check_axioms()?;
        Ok(ring)
    }

    fn check_axioms(&self) -> Result<(), RingError> {
        let n = self.n;
        for a in 0..n {
            if self.add(a, self.zero) != a {
                return Err(RingError::Axiom("zero is not neutral"));
            }
            if self.mul(a, self.one) != a {
                return Err(RingError::Axiom("one is not neutral"));
            }
            for b in 0..n {
                if self.add(a, b) != self.add(b, a) {
                    return Err(RingError::Axiom("addition not commutative"));
                }
                if self.mul(a, b) != self.mul(b, a) {
                    return Err(RingError::Axiom("multiplication not commutative"));
                }
                for c in 0..n {
                    if self.add(self.add(a, b), c) != self.add(a, self.add(b, c)) {
                        return Err(RingError::Axiom("addition not associative"));
                    }
                    if self.mul(self.mul(a, b), c) != self.mul(a, self.mul(b, c)) {
                        return Err(RingError::Axiom("multiplication not associative"));
                    }
                    if self.mul(a, self.add(b, c)) != self.add(self.mul(a, b), self.mul(a, c)) {
                        return Err(RingError::Axiom("distributivity fails"));
                    }
                }
            }
        }
        Ok(())
    }

    /// `ℤ/n`, with elements labelled by their least non-negative residue.
    pub fn zmod(n: usize) -> Result<FinRing, RingError> {
        if n == 0 {
            return Err(RingError::ZeroModulus);
        }
        FinRing::from_tables(n, |a, b| (a + b) % n, |a, b| (a * b) % n, 0, 1 % n, Vec::new())
    }

    /// The product ring, with elements `(a,b)` indexed `a * |B| + b`.
    pub fn product(a: &FinRing, b: &FinRing) -> Result<FinRing, RingError> {
        let m = b.n;
        let n = a.n * m;
        if n > MAX_ELEMENTS {
            return Err(RingError::TooLarge(n));
        }
        let labels = (0..n).map(|i| format!("({},{})", a.label(i / m), b.label(i % m))).collect();
        FinRing::from_tables(
            n,
            |x, y| a.add(x / m, y / m) * m + b.add(x % m, y % m),
            |x, y| a.mul(x / m, y / m) * m + b.mul(x % m, y % m),
            a.zero * m + b.zero,
            a.one * m + b.one,
            labels,
        )
    }

    /// `(ℤ/p)[x]/(f)` for a monic `f` given by coefficients, constant term first.
    pub fn polyquot(p: usize, modulus: &[usize]) -> Result<FinRing, RingError> {
        if p == 0 {
            return Err(RingError::ZeroModulus);
        }
        let d = modulus.len().saturating_sub(1);
        if d == 0 || modulus[d] % p != 1 % p {
            return Err(RingError::NotMonic);
        }
        let n = p.checked_pow(d as u32).filter(|&n| n <= MAX_ELEMENTS).ok_or(RingError::TooLarge(usize::MAX))?;
        let digits = |mut x: usize| -> Vec<usize> {
            let mut v = vec![0; d];
            for c in v.iter_mut() {
                *c = x % p;
                x /= p;
            }
            v
        };
        let encode = |v: &[usize]| v.iter().rev().fold(0, |acc, &c| acc * p + c);
        let mul = |x: usize, y: usize| {
            let (a, b) = (digits(x), digits(y));
            let mut prod = vec![0; 2 * d];
            for i in 0..d {
                for j in 0..d {
                    prod[i + j] = (prod[i + j] + a[i] * b[j]) % p;
                }
            }
            for k in (d..2 * d).rev() {
                let c = prod[k];
                if c != 0 {
                    for (i, &m) in modulus.iter().enumerate().take(d) {
                        prod[k - d + i] = (prod[k - d + i] + c * (p - m % p)) % p;
                    }
                    prod[k] = 0;
                }
            }
            encode(&prod[..d])
        };
        let add = |x: usize, y: usize| {
            let (a, b) = (digits(x), digits(y));
            let s: Vec<usize> = a.iter().zip(&b).map(|(u, v)| (u + v) % p).collect();
            encode(&s)
        };
        let labels = (0..n).map(|x| poly_label(&digits(x))).collect();
        FinRing::from_tables(n, add, mul, 0, 1 % p, labels)
    }

    pub fn len(&self) -> usize {
        self.n
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn is_trivial(&self) -> bool {
        self.n == 1
    }

    pub fn elements(&self) -> core::ops::Range<usize> {
        0..self.n
    }

    pub fn full(&self) -> Subset {
        mask_upto(self.n)
    }

    pub fn zero(&self) -> usize {
        self.zero
    }

    pub fn one(&self) -> usize {
        self.one
    }

    pub fn add(&self, a: usize, b: usize) -> usize {
        self.add[a * self.n + b]
    }

    pub fn mul(&self, a: usize, b: usize) -> usize {
        self.mul[a * self.n + b]
    }

    pub fn neg(&self, a: usize) -> usize {
        self.neg[a]
    }

    pub fn sub(&self, a: usize, b: usize) -> usize {
        self.add(a, self.neg(b))
    }

    pub fn pow(&self, a: usize, k: usize) -> usize {
        (0..k).fold(self.one, |acc, _| self.mul(acc, a))
    }

    /// `k · 1`.
    pub fn numeral(&self, k: usize) -> usize {
        (0..k).fold(self.zero, |acc, _| self.add(acc, self.one))
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

    pub fn is_nilpotent(&self, x: usize) -> bool {
        (0..=self.n).any(|k| self.pow(x, k) == self.zero)
    }

    pub fn inverse(&self, x: usize) -> Option<usize> {
        (0..self.n).find(|&y| self.mul(x, y) == self.one)
    }

    pub fn is_invertible(&self, x: usize) -> bool {
        self.inverse(x).is_some()
    }

    pub fn units(&self) -> Subset {
        self.subset(|x| self.is_invertible(x))
    }

    pub fn nilradical(&self) -> Subset {
        self.subset(|x| self.is_nilpotent(x))
    }

    pub fn is_reduced(&self) -> bool {
        self.nilradical() == bit(self.zero)
    }

    pub fn is_field(&self) -> bool {
        !self.is_trivial() && self.units() == self.full() & !bit(self.zero)
    }

    pub fn is_regular(&self, x: usize) -> bool {
        self.elements().all(|y| self.mul(x, y) != self.zero || y == self.zero)
    }

    pub fn subset(&self, pred: impl Fn(usize) -> bool) -> Subset {
        self.elements().filter(|&x| pred(x)).fold(0, |m, x| m | bit(x))
    }

    /// The ideal generated by a set of elements.
    pub fn ideal_generated(&self, gens: Subset) -> Subset {
        let mut ideal = bit(self.zero);
        for g in members(gens) {
            let mut next = ideal;
            for s in members(ideal) {
                for r in self.elements() {
                    next |= bit(self.add(s, self.mul(r, g)));
                }
            }
            ideal = next;
        }
        ideal
    }

    pub fn is_ideal(&self, s: Subset) -> bool {
        s & bit(self.zero) != 0
            && members(s).all(|a| {
                members(s).all(|b| s & bit(self.sub(a, b)) != 0) && self.elements().all(|r| s & bit(self.mul(r, a)) != 0)
            })
    }

    /// All ideals, enumerated by closing `I + (a)` from the zero ideal.
    /// Sorted by size, then by bitmask.
    pub fn ideals(&self) -> Vec<Subset> {
        let mut found = vec![bit(self.zero)];
        let mut i = 0;
        while i < found.len() {
            let cur = found[i];
            for a in self.elements() {
                if cur & bit(a) == 0 {
                    let next = self.ideal_generated(cur | bit(a));
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

    /// `{x : xᵏ ∈ I for some k ≤ |A|}`.
    pub fn radical(&self, ideal: Subset) -> Subset {
        self.subset(|x| (0..=self.n).any(|k| ideal & bit(self.pow(x, k)) != 0))
    }

    pub fn is_radical(&self, ideal: Subset) -> bool {
        self.radical(ideal) == ideal
    }

    pub fn radical_ideals(&self) -> Vec<Subset> {
        self.ideals().into_iter().filter(|&i| self.is_radical(i)).collect()
    }

    pub fn is_prime(&self, ideal: Subset) -> bool {
        ideal != self.full()
            && self.elements().all(|a| {
                self.elements().all(|b| ideal & bit(self.mul(a, b)) == 0 || ideal & (bit(a) | bit(b)) != 0)
            })
    }

    pub fn prime_ideals(&self) -> Vec<Subset> {
        self.ideals().into_iter().filter(|&i| self.is_prime(i)).collect()
    }

    pub fn maximal_ideals(&self) -> Vec<Subset> {
        let ideals = self.ideals();
        let full = self.full();
        ideals
            .iter()
            .copied()
            .filter(|&i| i != full && !ideals.iter().any(|&j| j != i && j != full && i & !j == 0))
            .collect()
    }

    pub fn is_local(&self) -> bool {
        self.maximal_ideals().len() == 1
    }

    /// Whether a subset satisfies the four filter axioms.
    pub fn is_filter(&self, f: Subset) -> bool {
        let has = |x: usize| f & bit(x) != 0;
        !has(self.zero)
            && has(self.one)
            && self.elements().all(|x| {
                self.elements().all(|y| {
                    has(self.mul(x, y)) == (has(x) && has(y)) && (!has(self.add(x, y)) || has(x) || has(y))
                })
            })
    }

    /// All filters, found by a propagating backtracking search over
    /// membership decisions.
    pub fn filters(&self) -> Vec<Subset> {
        let mut out = Vec::new();
        let mut state = vec![Tri::Unknown; self.n];
        if self.zero == self.one {
            return out;
        }
        state[self.zero] = Tri::Out;
        state[self.one] = Tri::In;
        self.filter_search(state, &mut out);
        out.sort_by_key(|&m| (m.count_ones(), m));
        out
    }

    fn filter_search(&self, mut state: Vec<Tri>, out: &mut Vec<Subset>) {
        if !self.propagate_filter(&mut state) {
            return;
        }
        match state.iter().position(|&t| t == Tri::Unknown) {
            None => {
                let f = self.subset(|x| state[x] == Tri::In);
                if self.is_filter(f) {
                    out.push(f);
                }
            }
            Some(x) => {
                for choice in [Tri::In, Tri::Out] {
                    let mut next = state.clone();
                    next[x] = choice;
                    self.filter_search(next, out);
                }
            }
        }
    }

    fn propagate_filter(&self, state: &mut [Tri]) -> bool {
        let mut changed = true;
        let set = |state: &mut [Tri], x: usize, v: Tri, changed: &mut bool| -> bool {
            match state[x] {
                Tri::Unknown => {
                    state[x] = v;
                    *changed = true;
                    true
                }
                cur => cur == v,
            }
        };
        while changed {
            changed = false;
            for x in self.elements() {
                for y in self.elements() {
                    let p = self.mul(x, y);
                    let s = self.add(x, y);
                    let ok = match (state[x], state[y]) {
                        (Tri::In, Tri::In) => set(state, p, Tri::In, &mut changed),
                        (Tri::Out, _) => set(state, p, Tri::Out, &mut changed),
                        _ => true,
                    } && (state[p] != Tri::In
                        || (set(state, x, Tri::In, &mut changed) && set(state, y, Tri::In, &mut changed)))
                        && (!(state[x] == Tri::Out && state[y] == Tri::Out) || set(state, s, Tri::Out, &mut changed));
                    if !ok {
                        return false;
                    }
                }
            }
        }
        true
    }

    /// The multiplicative closure of a set (always containing 1).
    pub fn multiplicative_closure(&self, gens: Subset) -> Subset {
        let mut s = bit(self.one);
        loop {
            let mut next = s;
            for a in members(s) {
                for g in members(gens) {
                    next |= bit(self.mul(a, g));
                }
            }
            if next == s {
                return s;
            }
            s = next;
        }
    }

    pub fn is_multiplicative(&self, s: Subset) -> bool {
        s & bit(self.one) != 0 && members(s).all(|a| members(s).all(|b| s & bit(self.mul(a, b)) != 0))
    }

    /// Localization at a multiplicative set.
    pub fn localize(&self, s: Subset) -> Localization {
        let s = self.multiplicative_closure(s);
        let dens: Vec<usize> = core::iter::once(self.one).chain(members(s).filter(|&d| d != self.one)).collect();
        let equiv = |(a, x): (usize, usize), (b, y): (usize, usize)| {
            let diff = self.sub(self.mul(a, y), self.mul(b, x));
            members(s).any(|u| self.mul(u, diff) == self.zero)
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
        let m = reps.len();
        let labels = reps
            .iter()
            .map(|&(a, d)| if d == self.one { String::from(self.label(a)) } else { format!("{}/{}", self.label(a), self.label(d)) })
            .collect();
        let ring = FinRing::from_tables(
            m,
            |p, q| {
                let ((a, x), (b, y)) = (reps[p], reps[q]);
                cls(self.add(self.mul(a, y), self.mul(b, x)), self.mul(x, y))
            },
            |p, q| {
                let ((a, x), (b, y)) = (reps[p], reps[q]);
                cls(self.mul(a, b), self.mul(x, y))
            },
            cls(self.zero, self.one),
            cls(self.one, self.one),
            labels,
        )
        .expect("localization of a commutative ring is a commutative ring");
        let map = self.elements().map(|a| cls(a, self.one)).collect();
        Localization { ring, map, denominators: s, reps, class, dens }
    }

    /// Whether `(b₀,…,bₙ)` is complementary to `(a₀,…,aₙ)`.
    pub fn is_complementary(&self, a: &[usize], b: &[usize]) -> bool {
        let n = a.len();
        if n == 0 || b.len() != n {
            return false;
        }
        let rad2 = |x: usize, y: usize| self.radical(self.ideal_generated(bit(x) | bit(y)));
        if rad2(a[0], b[0]) & bit(self.one) == 0 {
            return false;
        }
        for i in 1..n {
            if rad2(a[i], b[i]) & bit(self.mul(a[i - 1], b[i - 1])) == 0 {
                return false;
            }
        }
        self.is_nilpotent(self.mul(a[n - 1], b[n - 1]))
    }

    /// The constructive Krull dimension test: every sequence of length `n+1`
    /// has a complementary sequence. `n = -1` means the ring is trivial.
    pub fn krull_dim_leq(&self, n: i64) -> KrullResult {
        if n < 0 {
            return KrullResult { holds: self.is_trivial(), witnesses: Vec::new(), counterexample: None };
        }
        let len = n as usize + 1;
        let seqs = sequences(self.n, len);
        // Radicals of two-generated ideals, shared by all checks.
        let mut rad = vec![0u64; self.n * self.n];
        for x in self.elements() {
            for y in self.elements() {
                rad[x * self.n + y] = self.radical(self.ideal_generated(bit(x) | bit(y)));
            }
        }
        let nil = self.nilradical();
        let comp = |a: &[usize], b: &[usize]| {
            rad[a[0] * self.n + b[0]] & bit(self.one) != 0
                && (1..len).all(|i| rad[a[i] * self.n + b[i]] & bit(self.mul(a[i - 1], b[i - 1])) != 0)
                && nil & bit(self.mul(a[len - 1], b[len - 1])) != 0
        };
        let mut witnesses = Vec::new();
        for a in &seqs {
            match seqs.iter().find(|b| comp(a, b)) {
                Some(b) => witnesses.push((a.clone(), b.clone())),
                None => return KrullResult { holds: false, witnesses, counterexample: Some(a.clone()) },
            }
        }
        KrullResult { holds: true, witnesses, counterexample: None }
    }

    /// The classical Krull dimension: the longest chain of primes minus one,
    /// or `-1` for the zero ring.
    pub fn chain_dimension(&self) -> i64 {
        let primes = self.prime_ideals();
        let mut best = vec![0i64; primes.len()];
        let mut order: Vec<usize> = (0..primes.len()).collect();
        order.sort_by_key(|&i| primes[i].count_ones());
        for (k, &i) in order.iter().enumerate() {
            for &j in &order[..k] {
                if primes[j] != primes[i] && primes[j] & !primes[i] == 0 {
                    best[i] = best[i].max(best[j] + 1);
                }
            }
        }
        best.iter().copied().max().unwrap_or(-1)
    }

    /// Whether `map` is a unital ring homomorphism `self → target`.
    pub fn is_hom(&self, target: &FinRing, map: &[usize]) -> bool {
        map.len() == self.n
            && map[self.one] == target.one
            && self.elements().all(|a| {
                self.elements().all(|b| {
                    map[self.add(a, b)] == target.add(map[a], map[b]) && map[self.mul(a, b)] == target.mul(map[a], map[b])
                })
            })
    }

    /// A ring isomorphism `self → other`, found by backtracking search.
    pub fn isomorphism(&self, other: &FinRing) -> Option<Vec<usize>> {
        if self.n != other.n {
            return None;
        }
        let mut map = vec![usize::MAX; self.n];
        map[self.zero] = other.zero;
        map[self.one] = other.one;
        if self.zero == self.one {
            return Some(map);
        }
        let mut used = vec![false; self.n];
        used[other.zero] = true;
        used[other.one] = true;
        let order: Vec<usize> = self.elements().filter(|&a| a != self.zero && a != self.one).collect();
        if self.iso_search(other, &order, 0, &mut map, &mut used) {
            Some(map)
        } else {
            None
        }
    }

    fn iso_search(&self, other: &FinRing, order: &[usize], i: usize, map: &mut [usize], used: &mut [bool]) -> bool {
        let consistent = |map: &[usize]| {
            self.elements().all(|a| {
                map[a] == usize::MAX
                    || self.elements().all(|b| {
                        map[b] == usize::MAX
                            || ((map[self.add(a, b)] == usize::MAX || map[self.add(a, b)] == other.add(map[a], map[b]))
                                && (map[self.mul(a, b)] == usize::MAX
                                    || map[self.mul(a, b)] == other.mul(map[a], map[b])))
                    })
            })
        };
        if i == order.len() {
            return consistent(map);
        }
        let a = order[i];
        for t in other.elements() {
            if used[t] {
                continue;
            }
            map[a] = t;
            used[t] = true;
            if consistent(map) && self.iso_search(other, order, i + 1, map, used) {
                return true;
            }
            used[t] = false;
            map[a] = usize::MAX;
        }
        false
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Tri {
    Unknown,
    In,
    Out,
}

/// A localized ring together with the canonical map from the original ring.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Localization {
    pub ring: FinRing,
    pub map: Vec<usize>,
    /// The (saturated under products) multiplicative set.
    pub denominators: Subset,
    reps: Vec<(usize, usize)>,
    class: Vec<usize>,
    dens: Vec<usize>,
}

impl Localization {
    /// The class of the fraction `a/s`, for `s` in the multiplicative set.
    pub fn fraction(&self, a: usize, s: usize) -> Option<usize> {
        let di = self.dens.iter().position(|&d| d == s)?;
        Some(self.class[a * self.dens.len() + di])
    }

    /// A representative `(a, s)` of a class.
    pub fn representative(&self, c: usize) -> (usize, usize) {
        self.reps[c]
    }
}

/// Witnesses from [`FinRing::krull_dim_leq`].
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct KrullResult {
    pub holds: bool,
    /// Pairs `(a, b)` with `b` complementary to `a`.
    pub witnesses: Vec<(Vec<usize>, Vec<usize>)>,
    /// A sequence without complementary sequence, when the test fails.
    pub counterexample: Option<Vec<usize>>,
}

pub fn bit(x: usize) -> Subset {
    1u64 << x
}

pub fn mask_upto(n: usize) -> Subset {
    if n >= 64 {
        u64::MAX
    } else {
        (1u64 << n) - 1
    }
}

/// Iterates the members of a bitmask in increasing order.
pub fn members(mut s: Subset) -> impl Iterator<Item = usize> {
    core::iter::from_fn(move || {
        if s == 0 {
            None
        } else {
            let x = s.trailing_zeros() as usize;
            s &= s - 1;
            Some(x)
        }
    })
}

fn sequences(n: usize, len: usize) -> Vec<Vec<usize>> {
    let mut out = vec![Vec::new()];
    for _ in 0..len {
        out = out
            .into_iter()
            .flat_map(|v| {
                (0..n).map(move |x| {
                    let mut w = v.clone();
                    w.push(x);
                    w
                })
            })
            .collect();
    }
    out
}

fn poly_label(coeffs: &[usize]) -> String {
    let mut parts = Vec::new();
    for (k, &c) in coeffs.iter().enumerate().rev() {
        if c == 0 {
            continue;
        }
        let coef = if c == 1 && k > 0 { String::new() } else { format!("{c}") };
        parts.push(match k {
            0 => coef,
            1 => format!("{coef}x"),
            _ => format!("{coef}x^{k}"),
        });
    }
    if parts.is_empty() {
        String::from("0")
    } else {
        parts.join("+")
    }
}

#[cfg(test)]
mod tests;
