use alloc::string::ToString;
use alloc::vec;
use alloc::vec::Vec;

use super::{Germ, Section, Sheaf, SheafError, NONE};
use crate::frame::Elem;

/// A morphism `F1 × … × Fk → G`, given germwise at every irreducible and
/// checked for naturality.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Morphism {
    arity: usize,
    /// Per irreducible position: a dense table over mixed-radix argument
    /// tuples.
    tables: Vec<Vec<Germ>>,
    radices: Vec<Vec<usize>>,
}

impl Morphism {
    pub fn from_germ_fn(
        args: &[&Sheaf],
        result: &Sheaf,
        f: impl Fn(usize, &[Germ]) -> Germ,
    ) -> Result<Morphism, SheafError> {
        let k = result.germ_labels.len();
        let radices: Vec<Vec<usize>> = (0..k).map(|pi| args.iter().map(|a| a.num_germs(pi)).collect()).collect();
        let mut tables = Vec::with_capacity(k);
        for pi in 0..k {
            let size: usize = radices[pi].iter().product();
            if size > super::MAX_SECTIONS {
                return Err(SheafError::TooLarge);
            }
            let mut table = Vec::with_capacity(size);
            let mut tuple = vec![0 as Germ; args.len()];
            for code in 0..size {
                decode(code, &radices[pi], &mut tuple);
                let g = f(pi, &tuple);
                if g as usize >= result.num_germs(pi) {
                    return Err(SheafError::OutOfRange);
                }
                table.push(g);
            }
            tables.push(table);
        }
        let m = Morphism { arity: args.len(), tables, radices };
        m.check_natural(args, result)?;
        Ok(m)
    }

    fn check_natural(&self, args: &[&Sheaf], result: &Sheaf) -> Result<(), SheafError> {
        let frame = result.frame();
        let irr = frame.irreducibles();
        let mut tuple = vec![0 as Germ; self.arity];
        for (pi, &p) in irr.iter().enumerate() {
            for (qi, &q) in irr.iter().enumerate() {
                if pi == qi || !frame.leq(q, p) {
                    continue;
                }
                for code in 0..self.tables[pi].len() {
                    decode(code, &self.radices[pi], &mut tuple);
                    let image = result.germ_restrict(pi, qi, self.tables[pi][code]);
                    let restricted: Vec<Germ> =
                        tuple.iter().zip(args).map(|(&g, a)| a.germ_restrict(pi, qi, g)).collect();
                    if self.apply_germs(qi, &restricted) != image {
                        return Err(SheafError::NotNatural(frame.label(p).to_string(), frame.label(q).to_string()));
                    }
                }
            }
        }
        Ok(())
    }

    pub fn arity(&self) -> usize {
        self.arity
    }

    pub fn apply_germs(&self, pi: usize, germs: &[Germ]) -> Germ {
        let mut code = 0;
        for (g, &r) in germs.iter().zip(&self.radices[pi]).rev() {
            code = code * r + *g as usize;
        }
        self.tables[pi][code]
    }

    /// Applies the morphism to sections over `U`.
    pub fn apply(&self, args: &[&Sheaf], result: &Sheaf, u: Elem, sections: &[Section]) -> Section {
        let k = result.germ_labels.len();
        let mut family = vec![NONE; k];
        let mut germs = vec![0 as Germ; self.arity];
        for &p in result.frame().irreducibles_below(u) {
            let pi = result.irr_position(p).unwrap();
            for (i, (a, &s)) in args.iter().zip(sections).enumerate() {
                germs[i] = a.germ_at(u, s, pi);
            }
            family[pi] = self.apply_germs(pi, &germs);
        }
        result.glue(u, &family).expect("germwise images of a matching family match")
    }
}

fn decode(mut code: usize, radices: &[usize], out: &mut [Germ]) {
    for (slot, &r) in out.iter_mut().zip(radices) {
        *slot = (code % r) as Germ;
        code /= r;
    }
}
