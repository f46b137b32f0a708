use alloc::format;
use alloc::string::{String, ToString};
use alloc::sync::Arc;
use alloc::vec;
use alloc::vec::Vec;
use hashbrown::HashMap;

use super::{Germ, Section, Sheaf, SheafError, Subsheaf};
use crate::frame::Elem;

/// Largest germ set for which subsets are enumerated.
const MAX_POWER_STALK: usize = 16;

/// The power object `P(F)`: over an irreducible `p` its germs are the
/// subsheaves of `F` restricted to `↓p`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PowerSheaf {
    sheaf: Sheaf,
    /// `contents[p][σ][q]` is the bitset `G(q) ⊆ F(q)` of the subsheaf `σ`
    /// at `p`, for irreducible positions `q ≤ p` (zero elsewhere).
    contents: Vec<Vec<Vec<u64>>>,
}

impl PowerSheaf {
    pub fn new(base: &Sheaf) -> Result<PowerSheaf, SheafError> {
        let frame: Arc<crate::frame::Frame> = base.frame.clone();
        let irr = frame.irreducibles().to_vec();
        let k = irr.len();
        for (pi, &p) in irr.iter().enumerate() {
            if base.num_germs(pi) > MAX_POWER_STALK {
                return Err(SheafError::StalkTooLarge(frame.label(p).to_string()));
            }
        }
        let mut contents = Vec::with_capacity(k);
        let mut indexes: Vec<HashMap<Vec<u64>, Germ>> = Vec::with_capacity(k);
        let mut total = 0usize;
        for &p in irr.iter() {
            let mut order: Vec<usize> = frame.irreducibles_below(p).iter().map(|&q| base.irr_position(q).unwrap()).collect();
            order.sort_by_key(|&qi| (core::cmp::Reverse(frame.irreducibles_below(irr[qi]).len()), qi));
            let mut out = Vec::new();
            let mut current = vec![0u64; k];
            enumerate(base, &irr, &order, 0, &mut current, &mut out, &mut total)?;
            out.sort();
            indexes.push(out.iter().enumerate().map(|(i, f)| (f.clone(), i as Germ)).collect());
            contents.push(out);
        }
        let labels = contents
            .iter()
            .enumerate()
            .map(|(pi, fams)| fams.iter().map(|fam| label(base, &irr, pi, fam)).collect())
            .collect();
        let sheaf = Sheaf::from_basis(frame.clone(), labels, |pi, qi, g| {
            let mut fam = contents[pi][g as usize].clone();
            for (ri, &r) in irr.iter().enumerate() {
                if !frame.leq(r, irr[qi]) {
                    fam[ri] = 0;
                }
            }
            indexes[qi][&fam]
        })?;
        Ok(PowerSheaf { sheaf, contents })
    }

    pub fn sheaf(&self) -> &Sheaf {
        &self.sheaf
    }

    /// Whether the germ `g` of `F` at irreducible position `pi` lies in the
    /// top component of the germ `sigma` of `P(F)` there.
    pub fn germ_member(&self, pi: usize, sigma: Germ, g: Germ) -> bool {
        self.contents[pi][sigma as usize][pi] >> g & 1 == 1
    }

    /// `x ∈ S` over `U`, for `x ∈ F(U)` and `S ∈ P(F)(U)`.
    pub fn member(&self, base: &Sheaf, u: Elem, x: Section, set: Section) -> bool {
        base.frame.irreducibles_below(u).iter().all(|&p| {
            let pi = base.irr_position(p).unwrap();
            self.germ_member(pi, self.sheaf.germ_at(u, set, pi), base.germ_at(u, x, pi))
        })
    }

    /// The section of `P(F)` over `U` corresponding to a subsheaf of `F`.
    pub fn section_of_subsheaf(&self, u: Elem, sub: &Subsheaf) -> Section {
        let frame = self.sheaf.frame();
        let irr = frame.irreducibles();
        let k = irr.len();
        let mut family = vec![super::NONE; k];
        for &p in frame.irreducibles_below(u) {
            let pi = self.sheaf.irr_position(p).unwrap();
            let mut fam = vec![0u64; k];
            for &q in frame.irreducibles_below(p) {
                let qi = self.sheaf.irr_position(q).unwrap();
                fam[qi] = sub.germ_sets()[qi].iter().enumerate().filter(|(_, &b)| b).fold(0, |m, (g, _)| m | 1 << g);
            }
            family[pi] = self.contents[pi].binary_search(&fam).expect("subsheaf restricted to a principal down-set") as Germ;
        }
        self.sheaf.glue(u, &family).expect("matching")
    }

    /// The subsheaf of `F` named by a global section of `P(F)`.
    pub fn subsheaf_of_section(&self, base: &Sheaf, s: Section) -> Subsheaf {
        let top = self.sheaf.frame().top();
        let germs = (0..self.contents.len())
            .map(|pi| {
                let sigma = self.sheaf.germ_at(top, s, pi);
                (0..base.num_germs(pi)).map(|g| self.germ_member(pi, sigma, g as Germ)).collect()
            })
            .collect();
        Subsheaf::from_germs(base, germs).expect("sections of the power object are subsheaves")
    }

    /// For `Ω = P(1)`: the open `⋁{p ≤ U : *(p) ∈ S}` named by `S ∈ Ω(U)`.
    pub fn omega_open(&self, u: Elem, s: Section) -> Elem {
        let frame = self.sheaf.frame();
        frame.join_all(frame.irreducibles_below(u).iter().copied().filter(|&p| {
            let pi = self.sheaf.irr_position(p).unwrap();
            self.germ_member(pi, self.sheaf.germ_at(u, s, pi), 0)
        }))
    }

    /// For `Ω = P(1)`: the section over `U` naming the open `V ≤ U`.
    pub fn omega_section(&self, u: Elem, v: Elem) -> Section {
        self.sections_over(u).find(|&s| self.omega_open(u, s) == v).expect("every subopen is named")
    }

    fn sections_over(&self, u: Elem) -> core::ops::Range<Section> {
        self.sheaf.sections(u)
    }
}

fn enumerate(
    base: &Sheaf,
    irr: &[Elem],
    order: &[usize],
    depth: usize,
    current: &mut Vec<u64>,
    out: &mut Vec<Vec<u64>>,
    total: &mut usize,
) -> Result<(), SheafError> {
    if depth == order.len() {
        *total += 1;
        if *total > super::MAX_SECTIONS {
            return Err(SheafError::TooLarge);
        }
        out.push(current.clone());
        return Ok(());
    }
    let frame = base.frame();
    let q = order[depth];
    let mut required = 0u64;
    for &p in &order[..depth] {
        if frame.leq(irr[q], irr[p]) {
            for g in 0..base.num_germs(p) {
                if current[p] >> g & 1 == 1 {
                    required |= 1 << base.germ_restrict(p, q, g as Germ);
                }
            }
        }
    }
    let full = (1u64 << base.num_germs(q)) - 1;
    let free = full & !required;
    // Every superset of `required`, by walking the subsets of `free`.
    let mut extra = 0u64;
    loop {
        current[q] = required | extra;
        enumerate(base, irr, order, depth + 1, current, out, total)?;
        if extra == free {
            break;
        }
        extra = (extra.wrapping_sub(free)) & free;
    }
    current[q] = 0;
    Ok(())
}

fn set_label(base: &Sheaf, pi: usize, bits: u64) -> String {
    let names: Vec<&str> =
        (0..base.num_germs(pi)).filter(|&g| bits >> g & 1 == 1).map(|g| base.germ_labels(pi)[g].as_str()).collect();
    format!("{{{}}}", names.join(","))
}

fn label(base: &Sheaf, irr: &[Elem], pi: usize, fam: &[u64]) -> String {
    let frame = base.frame();
    let mut out = set_label(base, pi, fam[pi]);
    let lower: Vec<String> = irr
        .iter()
        .enumerate()
        .filter(|&(qi, &q)| qi != pi && frame.leq(q, irr[pi]))
        .map(|(qi, &q)| format!("{}:{}", frame.label(q), set_label(base, qi, fam[qi])))
        .collect();
    if !lower.is_empty() {
        out.push('[');
        out.push_str(&lower.join(" "));
        out.push(']');
    }
    out
}
