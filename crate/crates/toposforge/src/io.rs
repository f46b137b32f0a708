//! Text formats for spaces, sheaves, rings and modules.
//!
//! All formats are line based. Blank lines and `#` comments are ignored.
//!
//! Space:
//!
//! ```text
//! points: eta sigma
//! open:
//! open U: eta
//! open: eta sigma
//! ```
//!
//! `open NAME: ...` names the open, which then acts as a propositional
//! constant. The empty set and the whole space are added when missing.
//!
//! Sheaf (opens are written as in [`FiniteSpace::resolve_open`]: a canonical
//! index, a name, `X`, or a point list such as `{eta}`):
//!
//! ```text
//! sheaf F on sierpinski
//! sections 1: a b
//! sections 2: a b
//! restrict 2->1: a->a b->b
//! op swap 1: a->b b->a
//! op swap 2: a->b b->a
//! ```
//!
//! `op` lines give a function symbol on the sheaf by its action on sections
//! over each irreducible open (every point's minimal neighbourhood). Several
//! arguments are separated by commas: `op add 1: a,a->a a,b->b ...`.
//!
//! Ring: a ring expression, `ring zmod 12`, `ring product (zmod 2) (zmod 3)`
//! or `ring polyquot (zmod 2) x^2+x+1`.
//!
//! Module:
//!
//! ```text
//! module M over zmod 4
//! elements: 0 2
//! zero: 0
//! add 0: 0 2
//! add 2: 2 0
//! act 0: 0 0
//! act 1: 0 2
//! ...
//! ```
//!
//! `add a:` lists `a + e` for the elements `e` in order; `act r:` lists
//! `r · e` for a ring element `r`. The shorthands `module M over zmod 12
//! regular`, `... zero` and `... quotient 2 3` (the quotient by the ideal
//! with those generators) are also accepted.

use std::collections::BTreeMap;
use std::sync::Arc;

use toposforge_core::finring::{bit, FinModule, FinRing, RingSpec};
use toposforge_core::forcing::{EnvError, Environment, SheafId};
use toposforge_core::frame::{Elem, FiniteSpace};
use toposforge_core::sheaf::{check_sheaf, Germ, Presheaf, Sheaf};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("line {line}: {message}")]
pub struct FormatError {
    pub line: usize,
    pub message: String,
}

fn err(line: usize, message: impl Into<String>) -> FormatError {
    FormatError { line, message: message.into() }
}

/// Non-empty, comment-free lines with their 1-based numbers.
fn lines(text: &str) -> impl Iterator<Item = (usize, &str)> {
    text.lines().enumerate().filter_map(|(i, l)| {
        let l = l.split('#').next().unwrap_or("").trim();
        (!l.is_empty()).then_some((i + 1, l))
    })
}

/// `head: rest` split at the first colon.
fn split_colon(line: &str) -> Option<(&str, &str)> {
    line.split_once(':').map(|(a, b)| (a.trim(), b.trim()))
}

pub fn parse_space(text: &str) -> Result<FiniteSpace, FormatError> {
    let mut points: Option<Vec<String>> = None;
    let mut opens: Vec<(usize, Option<String>, Vec<String>)> = Vec::new();
    for (n, line) in lines(text) {
        let (head, rest) = split_colon(line).ok_or_else(|| err(n, "expected `points:` or `open:`"))?;
        let items: Vec<String> = rest.split_whitespace().map(str::to_string).collect();
        if head == "points" {
            if points.is_some() {
                return Err(err(n, "points listed twice"));
            }
            points = Some(items);
        } else if head == "open" {
            opens.push((n, None, items));
        } else if let Some(name) = head.strip_prefix("open ") {
            opens.push((n, Some(name.trim().to_string()), items));
        } else {
            return Err(err(n, format!("unknown directive `{head}`")));
        }
    }
    let points = points.ok_or_else(|| err(0, "missing `points:` line"))?;
    let full = if points.len() >= 64 { u64::MAX } else { (1u64 << points.len()) - 1 };
    let mut masks = vec![0, full];
    let mut names = Vec::new();
    for (n, name, items) in &opens {
        let mut m = 0u64;
        for p in items {
            let i = points.iter().position(|q| q == p).ok_or_else(|| err(*n, format!("unknown point `{p}`")))?;
            m |= 1 << i;
        }
        masks.push(m);
        if let Some(name) = name {
            names.push((*n, name.clone(), m));
        }
    }
    let mut space = FiniteSpace::new(points, masks).map_err(|e| err(0, e.to_string()))?;
    for (n, name, m) in names {
        let open = space.open_of_mask(m).expect("listed opens are open");
        space.name_open(&name, open).map_err(|e| err(n, e.to_string()))?;
    }
    Ok(space)
}

/// Writes a space in the format read by [`parse_space`].
pub fn write_space(space: &FiniteSpace) -> String {
    let mut out = format!("points: {}\n", space.points().join(" "));
    for (e, &m) in space.opens().iter().enumerate() {
        let members: Vec<&str> =
            space.points().iter().enumerate().filter(|(i, _)| m >> i & 1 == 1).map(|(_, p)| p.as_str()).collect();
        match space.named_opens().iter().find(|(_, &o)| o == e) {
            Some((name, _)) => out.push_str(&format!("open {name}: {}\n", members.join(" "))),
            None => out.push_str(&format!("open: {}\n", members.join(" "))),
        }
    }
    out
}

/// A function symbol read from `op` lines: per irreducible position, the
/// table from argument germs to the result germ.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct OpTable {
    pub name: String,
    pub arity: usize,
    pub tables: Vec<BTreeMap<Vec<Germ>, Germ>>,
}

#[derive(Debug, Clone)]
pub struct SheafFile {
    pub name: String,
    pub space: String,
    pub sheaf: Sheaf,
    pub ops: Vec<OpTable>,
}

impl SheafFile {
    /// Registers the sheaf and its operations.
    pub fn register(&self, env: &mut Environment) -> Result<SheafId, EnvError> {
        let id = env.add_sheaf(&self.name, self.sheaf.clone())?;
        for op in &self.ops {
            let args = vec![id; op.arity];
            let tables = op.tables.clone();
            env.add_function_fn(&op.name, &args, id, move |pi, g| tables[pi][g])?;
        }
        Ok(id)
    }
}

pub fn parse_sheaf(text: &str, space: &FiniteSpace) -> Result<SheafFile, FormatError> {
    let frame = Arc::new(space.frame().clone());
    let n = frame.len();
    let open = |line: usize, t: &str| space.resolve_open(t).map_err(|e| err(line, e.to_string()));
    let mut header = None;
    let mut sections: Vec<Option<Vec<String>>> = vec![None; n];
    let mut restrictions = BTreeMap::new();
    let mut op_lines: Vec<(usize, String, Elem, String)> = Vec::new();
    for (ln, line) in lines(text) {
        let words: Vec<&str> = line.split_whitespace().collect();
        match words.first().copied() {
            Some("sheaf") => {
                if words.len() != 4 || words[2] != "on" {
                    return Err(err(ln, "expected `sheaf <name> on <space>`"));
                }
                header = Some((words[1].to_string(), words[3].to_string()));
            }
            Some("sections") => {
                let (head, rest) = split_colon(line).ok_or_else(|| err(ln, "missing `:`"))?;
                let u = open(ln, head["sections".len()..].trim())?;
                if sections[u].is_some() {
                    return Err(err(ln, format!("sections over {} listed twice", space.describe(u))));
                }
                sections[u] = Some(rest.split_whitespace().map(str::to_string).collect());
            }
            Some("restrict") => {
                let (head, rest) = split_colon(line).ok_or_else(|| err(ln, "missing `:`"))?;
                let (a, b) = head["restrict".len()..].split_once("->").ok_or_else(|| err(ln, "expected `U->V`"))?;
                let (u, v) = (open(ln, a)?, open(ln, b)?);
                let mut map = Vec::new();
                for pair in rest.split_whitespace() {
                    let (s, t) = pair.split_once("->").ok_or_else(|| err(ln, format!("expected `s->t`, found `{pair}`")))?;
                    map.push((s.to_string(), t.to_string()));
                }
                restrictions.insert((u, v), (ln, map));
            }
            Some("op") => {
                let (head, rest) = split_colon(line).ok_or_else(|| err(ln, "missing `:`"))?;
                let mut parts = head["op".len()..].split_whitespace();
                let (Some(name), Some(at), None) = (parts.next(), parts.next(), parts.next()) else {
                    return Err(err(ln, "expected `op <name> <open>: ...`"));
                };
                op_lines.push((ln, name.to_string(), open(ln, at)?, rest.to_string()));
            }
            _ => return Err(err(ln, format!("unknown directive `{line}`"))),
        }
    }
    let (name, space_name) = header.ok_or_else(|| err(0, "missing `sheaf <name> on <space>` header"))?;
    let bottom = frame.bottom();
    if sections[bottom].is_none() {
        sections[bottom] = Some(vec!["*".to_string()]);
    }
    let mut labels = Vec::with_capacity(n);
    for u in frame.elements() {
        labels.push(sections[u].take().ok_or_else(|| err(0, format!("no sections listed over {}", space.describe(u))))?);
    }
    let index = |u: Elem, s: &str| labels[u].iter().position(|x| x == s);
    let mut tables = BTreeMap::new();
    for ((u, v), (ln, pairs)) in restrictions {
        let mut table = vec![usize::MAX; labels[u].len()];
        for (s, t) in pairs {
            let si = index(u, &s).ok_or_else(|| err(ln, format!("`{s}` is not a section over {}", space.describe(u))))?;
            let ti = index(v, &t).ok_or_else(|| err(ln, format!("`{t}` is not a section over {}", space.describe(v))))?;
            table[si] = ti;
        }
        if table.contains(&usize::MAX) {
            return Err(err(ln, "restriction does not cover every section"));
        }
        tables.insert((u, v), table);
    }
    let pre = Presheaf { frame: frame.clone(), sections: labels.clone(), restrictions: tables };
    let sheaf = check_sheaf(&pre).map_err(|e| err(0, e.to_string()))?;
    let ops = build_ops(&sheaf, space, &op_lines)?;
    Ok(SheafFile { name, space: space_name, sheaf, ops })
}

fn build_ops(sheaf: &Sheaf, space: &FiniteSpace, op_lines: &[(usize, String, Elem, String)]) -> Result<Vec<OpTable>, FormatError> {
    let frame = sheaf.frame();
    let irr = frame.irreducibles();
    let mut ops: Vec<OpTable> = Vec::new();
    for (ln, name, at, rest) in op_lines {
        let ln = *ln;
        let pi = sheaf.irr_position(*at).ok_or_else(|| {
            err(ln, format!("{} is not the minimal neighbourhood of a point", space.describe(*at)))
        })?;
        let germ = |label: &str| -> Result<Germ, FormatError> {
            let s = sheaf
                .section_by_label(*at, label)
                .ok_or_else(|| err(ln, format!("`{label}` is not a section over {}", space.describe(*at))))?;
            Ok(sheaf.germ_at(*at, s, pi))
        };
        let mut entries = Vec::new();
        for entry in rest.split_whitespace() {
            let (args, res) = entry.split_once("->").ok_or_else(|| err(ln, format!("expected `args->result`, found `{entry}`")))?;
            let args = args.split(',').map(germ).collect::<Result<Vec<_>, _>>()?;
            entries.push((args, germ(res)?));
        }
        let arity = entries.first().map_or(0, |(a, _)| a.len());
        if entries.iter().any(|(a, _)| a.len() != arity) {
            return Err(err(ln, "entries disagree on the number of arguments"));
        }
        let k = match ops.iter().position(|o| &o.name == name) {
            Some(k) => k,
            None => {
                ops.push(OpTable { name: name.clone(), arity, tables: vec![BTreeMap::new(); irr.len()] });
                ops.len() - 1
            }
        };
        if ops[k].arity != arity {
            return Err(err(ln, format!("`{name}` used with different arities")));
        }
        ops[k].tables[pi].extend(entries);
    }
    for op in &ops {
        for (pi, table) in op.tables.iter().enumerate() {
            let expected = sheaf.num_germs(pi).pow(op.arity as u32);
            if table.len() != expected {
                return Err(err(
                    0,
                    format!("`{}` over {} has {} entries, expected {expected}", op.name, frame.label(irr[pi]), table.len()),
                ));
            }
        }
    }
    Ok(ops)
}

/// Writes a sheaf on a space in the format read by [`parse_sheaf`]. Only
/// restrictions along the covering relation are listed.
pub fn write_sheaf(name: &str, space_name: &str, sheaf: &Sheaf, describe: impl Fn(Elem) -> String) -> String {
    let frame = sheaf.frame();
    let mut out = format!("sheaf {name} on {space_name}\n");
    for u in frame.elements() {
        let labels: Vec<String> = sheaf.sections(u).map(|s| sheaf.section_label(u, s)).collect();
        out.push_str(&format!("sections {}: {}\n", describe(u), labels.join(" ")));
    }
    for u in frame.elements() {
        for v in frame.lower_covers(u) {
            let pairs: Vec<String> = sheaf
                .sections(u)
                .map(|s| format!("{}->{}", sheaf.section_label(u, s), sheaf.section_label(v, sheaf.restrict(u, v, s))))
                .collect();
            out.push_str(&format!("restrict {}->{}: {}\n", describe(u), describe(v), pairs.join(" ")));
        }
    }
    out
}

pub fn parse_ring(text: &str) -> Result<FinRing, FormatError> {
    let body: Vec<&str> = lines(text).map(|(_, l)| l).collect();
    let spec = RingSpec::parse(&body.join(" ")).map_err(|e| err(1, e.to_string()))?;
    spec.build().map_err(|e| err(1, e.to_string()))
}

#[derive(Debug, Clone)]
pub struct ModuleFile {
    pub name: String,
    pub module: FinModule,
}

pub fn parse_module(text: &str) -> Result<ModuleFile, FormatError> {
    let mut it = lines(text);
    let (ln, head) = it.next().ok_or_else(|| err(0, "empty module file"))?;
    let rest = head.strip_prefix("module ").ok_or_else(|| err(ln, "expected `module <name> over <ring>`"))?;
    let (name, ring_text) = rest.split_once(" over ").ok_or_else(|| err(ln, "expected `module <name> over <ring>`"))?;
    let name = name.trim().to_string();
    // A shorthand may follow the ring expression on the header line.
    let (ring_text, shorthand) = match ["regular", "zero", "quotient"].iter().find_map(|k| {
        ring_text.find(&format!(" {k}")).map(|i| (&ring_text[..i], ring_text[i..].trim()))
    }) {
        Some((r, s)) => (r, Some(s)),
        None => (ring_text, None),
    };
    let ring = RingSpec::parse(ring_text).and_then(|s| s.build()).map_err(|e| err(ln, e.to_string()))?;
    if let Some(s) = shorthand {
        let mut words = s.split_whitespace();
        let module = match words.next() {
            Some("regular") => FinModule::regular(&ring),
            Some("zero") => FinModule::zero_module(&ring),
            _ => {
                let mut gens = 0;
                for w in words {
                    let x = ring.element(w).ok_or_else(|| err(ln, format!("`{w}` is not an element of the ring")))?;
                    gens |= bit(x);
                }
                FinModule::quotient(&ring, ring.ideal_generated(gens)).map_err(|e| err(ln, e.to_string()))?
            }
        };
        return Ok(ModuleFile { name, module });
    }
    let mut elements: Option<Vec<String>> = None;
    let mut zero = None;
    let mut add: BTreeMap<usize, Vec<String>> = BTreeMap::new();
    let mut act: BTreeMap<usize, Vec<String>> = BTreeMap::new();
    for (ln, line) in it {
        let (head, rest) = split_colon(line).ok_or_else(|| err(ln, "missing `:`"))?;
        let items: Vec<String> = rest.split_whitespace().map(str::to_string).collect();
        let mut words = head.split_whitespace();
        match (words.next(), words.next()) {
            (Some("elements"), None) => elements = Some(items),
            (Some("zero"), None) => zero = Some((ln, rest.to_string())),
            (Some("add"), Some(a)) => {
                let els = elements.as_ref().ok_or_else(|| err(ln, "`elements:` must come first"))?;
                let i = els.iter().position(|e| e == a).ok_or_else(|| err(ln, format!("unknown element `{a}`")))?;
                add.insert(i, items);
            }
            (Some("act"), Some(r)) => {
                let i = ring.element(r).ok_or_else(|| err(ln, format!("`{r}` is not an element of the ring")))?;
                act.insert(i, items);
            }
            _ => return Err(err(ln, format!("unknown directive `{head}`"))),
        }
    }
    let els = elements.ok_or_else(|| err(0, "missing `elements:` line"))?;
    let m = els.len();
    let index = |s: &str| els.iter().position(|e| e == s);
    let table = |rows: &BTreeMap<usize, Vec<String>>, count: usize, what: &str| -> Result<Vec<usize>, FormatError> {
        let mut out = Vec::with_capacity(count * m);
        for r in 0..count {
            let row = rows.get(&r).ok_or_else(|| err(0, format!("missing `{what}` row {r}")))?;
            if row.len() != m {
                return Err(err(0, format!("`{what}` row {r} has {} entries, expected {m}", row.len())));
            }
            for s in row {
                out.push(index(s).ok_or_else(|| err(0, format!("unknown element `{s}` in `{what}`")))?);
            }
        }
        Ok(out)
    };
    let add_table = table(&add, m, "add")?;
    let act_table = table(&act, ring.len(), "act")?;
    let (zl, z) = zero.ok_or_else(|| err(0, "missing `zero:` line"))?;
    let zero = index(&z).ok_or_else(|| err(zl, format!("unknown element `{z}`")))?;
    let module = FinModule::from_tables(ring, m, |a, b| add_table[a * m + b], |r, a| act_table[r * m + a], zero, els.clone())
        .map_err(|e| err(0, e.to_string()))?;
    Ok(ModuleFile { name, module })
}

/// The spaces known by name: `sierpinski` (with `U` naming the open point),
/// `discreteN` and `chainN`. A trailing `.top` is ignored.
pub fn builtin_space(name: &str) -> Option<FiniteSpace> {
    let name = name.strip_suffix(".top").unwrap_or(name);
    if name == "sierpinski" {
        let mut s = FiniteSpace::sierpinski();
        s.name_open("U", s.resolve_open("{eta}").expect("open point")).expect("fresh name");
        return Some(s);
    }
    let sized = |prefix: &str| name.strip_prefix(prefix).and_then(|k| k.parse::<usize>().ok()).filter(|&k| (1..=16).contains(&k));
    if let Some(k) = sized("discrete") {
        return Some(FiniteSpace::discrete(k));
    }
    if let Some(k) = sized("chain") {
        let points = (0..k).map(|i| format!("p{i}")).collect();
        let arrows: Vec<(usize, usize)> = (1..k).map(|i| (i, i - 1)).collect();
        return FiniteSpace::alexandrov(points, &arrows).ok();
    }
    None
}

/// Rings known by short name: `zmodN` and `f4`. Anything else is read as a
/// ring expression by the caller.
pub fn builtin_ring(name: &str) -> Option<FinRing> {
    if let Some(k) = name.strip_prefix("zmod").and_then(|k| k.parse::<usize>().ok()) {
        return FinRing::zmod(k).ok();
    }
    match name {
        "f4" => FinRing::polyquot(2, &[1, 1, 1]).ok(),
        _ => None,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn space_round_trip() {
        let s = parse_space("points: eta sigma\nopen U: eta\n").unwrap();
        assert_eq!(s.opens().len(), 3);
        assert_eq!(s.resolve_open("U").unwrap(), s.resolve_open("{eta}").unwrap());
        let again = parse_space(&write_space(&s)).unwrap();
        assert_eq!(again.opens(), s.opens());
        assert_eq!(again.named_opens(), s.named_opens());
    }

    #[test]
    fn space_errors_carry_lines() {
        let e = parse_space("points: a b\nopen: c\n").unwrap_err();
        assert_eq!(e.line, 2);
        assert!(parse_space("points: a b c\nopen: a\nopen: b\nopen: a c\n").is_err());
    }

    #[test]
    fn sheaf_with_ops() {
        let space = builtin_space("sierpinski").unwrap();
        let text = "sheaf F on sierpinski\n\
                    sections {eta}: a b\n\
                    sections X: a b\n\
                    restrict X->{eta}: a->a b->b\n\
                    op swap {eta}: a->b b->a\n\
                    op swap X: a->b b->a\n";
        let f = parse_sheaf(text, &space).unwrap();
        assert_eq!(f.sheaf.num_sections(space.frame().top()), 2);
        let mut env = Environment::new(Arc::new(space.frame().clone()));
        f.register(&mut env).unwrap();
        let top = space.frame().top();
        let a = f.sheaf.section_by_label(top, "a").unwrap();
        let b = env.apply_function("swap", top, &[a]).unwrap();
        assert_eq!(f.sheaf.section_label(top, b), "b");
    }

    #[test]
    fn constant_presheaf_fails_gluing() {
        let space = FiniteSpace::discrete(2);
        let text = "sheaf M on d2\nsections {p0}: a b\nsections {p1}: a b\nsections X: a b\n\
                    restrict X->{p0}: a->a b->b\nrestrict X->{p1}: a->a b->b\n";
        assert!(parse_sheaf(text, &space).is_err());
    }

    #[test]
    fn sheaf_round_trip() {
        let space = builtin_space("chain3").unwrap();
        let frame = Arc::new(space.frame().clone());
        let c = Sheaf::constant(frame, &["0".to_string(), "1".to_string()]);
        let text = write_sheaf("C", "chain3", &c, |u| space.describe(u));
        let back = parse_sheaf(&text, &space).unwrap();
        for u in space.frame().elements() {
            assert_eq!(back.sheaf.num_sections(u), c.num_sections(u));
        }
    }

    #[test]
    fn modules_from_tables_and_shorthands() {
        let text = "module M over zmod 4\nelements: 0 2\nzero: 0\nadd 0: 0 2\nadd 2: 2 0\n\
                    act 0: 0 0\nact 1: 0 2\nact 2: 0 0\nact 3: 0 2\n";
        let m = parse_module(text).unwrap();
        assert_eq!(m.module.len(), 2);
        let q = parse_module("module Q over zmod 12 quotient 4").unwrap();
        assert_eq!(q.module.len(), 4);
        assert!(parse_module("module Z over zmod 6 zero").unwrap().module.is_zero());
        assert!(parse_module("module M over zmod 4\nelements: 0 1\nzero: 0\nadd 0: 0 1\nadd 1: 1 0\nact 0: 0 0\n").is_err());
    }

    #[test]
    fn ring_files() {
        assert_eq!(parse_ring("# the ring\nring product (zmod 2) (zmod 3)\n").unwrap().len(), 6);
        assert_eq!(builtin_ring("zmod12").unwrap().len(), 12);
        assert_eq!(builtin_ring("f4").unwrap().len(), 4);
    }
}
