use alloc::collections::BTreeMap;
use alloc::format;
use alloc::string::String;
use alloc::sync::Arc;
use alloc::vec::Vec;

use super::{check_sheaf, Germ, Presheaf, Sheaf, SheafError};
use crate::frame::{Elem, Frame, Nucleus, Sublocale};

/// Output of [`plus_construction`].
#[derive(Debug, Clone)]
pub struct PlusResult {
    pub plus: Presheaf,
    pub plusplus: Presheaf,
    /// `F⁺⁺` on the fixed points of the nucleus, checked to be a sheaf there.
    pub sheaf: Sheaf,
    pub sublocale: Sublocale,
}

/// The least `V ≤ U` with `U ≤ j(V)`. Dense subopens are closed under
/// binary meets, so this is itself dense.
pub(crate) fn least_dense(frame: &Frame, j: &Nucleus, u: Elem) -> Elem {
    frame.meet_all(frame.below(u).iter().copied().filter(|&v| frame.leq(u, j.apply(v))))
}

/// Applies `(−)⁺` for the topology of `j`.
///
/// `P⁺(U)` is the colimit of matching families over the `j`-covering sieves
/// of `U`. A sieve covers `U` exactly when its join is a dense subopen, so
/// every covering sieve contains the sieve generated by the irreducibles
/// below the least dense subopen; the colimit is therefore computed as the
/// matching families on that least covering sieve.
fn plus_once(pre: &Presheaf, table: &[Vec<usize>], j: &Nucleus) -> Result<Presheaf, SheafError> {
    let frame = &pre.frame;
    let n = frame.len();
    let mut families: Vec<Vec<Vec<(Elem, usize)>>> = Vec::with_capacity(n);
    let mut sieves = Vec::with_capacity(n);
    let mut total = 0usize;
    for u in 0..n {
        let base = least_dense(frame, j, u);
        let gens: Vec<Elem> = frame.irreducibles_below(base).to_vec();
        let mut out = Vec::new();
        let mut chosen: Vec<(Elem, usize)> = Vec::new();
        matching(pre, table, &gens, &mut chosen, &mut out, &mut total)?;
        families.push(out);
        sieves.push(gens);
    }
    let mut sections = Vec::with_capacity(n);
    for (u, fams) in families.iter().enumerate() {
        sections.push(
            fams.iter()
                .map(|fam| {
                    if fam.is_empty() {
                        String::from("()")
                    } else if fam.len() == 1 && pre.frame.leq(u, fam[0].0) {
                        pre.sections[fam[0].0][fam[0].1].clone()
                    } else {
                        let parts: Vec<String> = fam.iter().map(|&(p, s)| pre.sections[p][s].clone()).collect();
                        format!("({})", parts.join(","))
                    }
                })
                .collect(),
        );
    }
    let mut restrictions = BTreeMap::new();
    for u in 0..n {
        for v in 0..n {
            if !frame.leq(v, u) {
                continue;
            }
            let map = families[u]
                .iter()
                .map(|fam| {
                    let sub: Vec<(Elem, usize)> = fam.iter().copied().filter(|(p, _)| sieves[v].contains(p)).collect();
                    families[v].iter().position(|f| *f == sub).expect("restriction of a matching family")
                })
                .collect();
            restrictions.insert((u, v), map);
        }
    }
    Ok(Presheaf { frame: frame.clone(), sections, restrictions })
}

/// Matching families `(s_p)` on the sieve generated by `gens`:
/// `s_p` and `s_q` agree on `p ∧ q`.
fn matching(
    pre: &Presheaf,
    table: &[Vec<usize>],
    gens: &[Elem],
    chosen: &mut Vec<(Elem, usize)>,
    out: &mut Vec<Vec<(Elem, usize)>>,
    total: &mut usize,
) -> Result<(), SheafError> {
    let frame = &pre.frame;
    let n = frame.len();
    let depth = chosen.len();
    if depth == gens.len() {
        *total += 1;
        if *total > super::MAX_SECTIONS {
            return Err(SheafError::TooLarge);
        }
        out.push(chosen.clone());
        return Ok(());
    }
    let p = gens[depth];
    for s in 0..pre.sections[p].len() {
        let ok = chosen.iter().all(|&(q, t)| {
            let m = frame.meet(p, q);
            table[p * n + m][s] == table[q * n + m][t]
        });
        if ok {
            chosen.push((p, s));
            matching(pre, table, gens, chosen, out, total)?;
            chosen.pop();
        }
    }
    Ok(())
}

/// Runs the plus construction twice and restricts the result to the
/// sublocale of `j`.
pub fn plus_construction(pre: &Presheaf, j: &Nucleus) -> Result<PlusResult, SheafError> {
    let table = pre.complete()?;
    let plus = plus_once(pre, &table, j)?;
    let plus_table = plus.complete()?;
    let plusplus = plus_once(&plus, &plus_table, j)?;
    let pp_table = plusplus.complete()?;
    let sublocale = Sublocale::new(&pre.frame, j);
    let sheaf = restrict_to_sublocale(&plusplus, &pp_table, &sublocale)?;
    Ok(PlusResult { plus, plusplus, sheaf, sublocale })
}

fn restrict_to_sublocale(pre: &Presheaf, table: &[Vec<usize>], sub: &Sublocale) -> Result<Sheaf, SheafError> {
    let n = pre.frame.len();
    let fixed = sub.fixed();
    let mut restrictions = BTreeMap::new();
    for (a, &u) in fixed.iter().enumerate() {
        for (b, &v) in fixed.iter().enumerate() {
            if pre.frame.leq(v, u) {
                restrictions.insert((a, b), table[u * n + v].clone());
            }
        }
    }
    check_sheaf(&Presheaf {
        frame: Arc::new(sub.frame().clone()),
        sections: fixed.iter().map(|&u| pre.sections[u].clone()).collect(),
        restrictions,
    })
}

/// Sheafification of a sheaf for the topology of `j`, by inverse image
/// along the sublocale inclusion: `q ↦ F(V_q)` with
/// `V_q = ⋀{V : q ≤ j(V)}`.
pub fn sheafify(sheaf: &Sheaf, j: &Nucleus) -> Result<(Sheaf, Sublocale), SheafError> {
    let frame = sheaf.frame();
    let sub = Sublocale::new(frame, j);
    let fixed = sub.fixed();
    let base: Vec<Elem> = fixed.iter().map(|&q| least_dense(frame, j, q)).collect();
    let mut restrictions = BTreeMap::new();
    for (a, &q) in fixed.iter().enumerate() {
        for (b, &r) in fixed.iter().enumerate() {
            if frame.leq(r, q) {
                let map = sheaf.sections(base[a]).map(|s| sheaf.restrict(base[a], base[b], s)).collect();
                restrictions.insert((a, b), map);
            }
        }
    }
    let pre = Presheaf {
        frame: Arc::new(sub.frame().clone()),
        sections: base.iter().map(|&v| sheaf.sections(v).map(|s| sheaf.section_label(v, s)).collect()).collect(),
        restrictions,
    };
    Ok((check_sheaf(&pre)?, sub))
}

/// A sheaf on the sublocale as a sheaf on the parent frame:
/// `U ↦ G(j(U))`.
pub fn transport_to_parent(g: &Sheaf, sub: &Sublocale, j: &Nucleus, parent: Arc<Frame>) -> Result<Sheaf, SheafError> {
    let irr = parent.irreducibles().to_vec();
    let image: Vec<Elem> = irr.iter().map(|&p| sub.from_parent(j.apply(p)).expect("j lands in fixed points")).collect();
    let labels = image.iter().map(|&e| g.sections(e).map(|s| g.section_label(e, s)).collect()).collect();
    Sheaf::from_basis(parent, labels, |pi, qi, s| g.restrict(image[pi], image[qi], s as usize) as Germ)
}
