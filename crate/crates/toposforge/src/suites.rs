//! Verification suites. Each returns a [`Report`] with one line per check;
//! lines are assembled in corpus order, so a seed fixes the output.

use std::sync::Arc;
use std::thread;

use rand::seq::IndexedRandom;
use rand::Rng;
use rand_chacha::ChaCha8Rng;
use toposforge_core::finring::{FinModule, FinRing, LinearMap, Subset};
use toposforge_core::forcing::{
    check_box_theorem, check_geometric_spreading, check_metaproperty, comprehend, is_box_separated, is_box_sheaf,
    locality_report, plus_internal, verify_inference_rules, Binding, Environment, Evaluator, ForceError, Metaproperty,
    Report, RuleInstance,
};
use toposforge_core::formula::{parse, Formula, Sort, Term};
use toposforge_core::frame::{check_nucleus, FiniteSpace, Frame, Nucleus, Sublocale};
use toposforge_core::sheaf::Sheaf;
use toposforge_core::spectrum::statements::{
    injective, module_generated, module_zero, surjective, FIELD, INV_CHARACTERIZED, INV_DEFINED, KRULL_DIM_ZERO, LOCAL,
    NILP_CHARACTERIZED, NILP_DEFINED, NONUNIT_NILPOTENT, NONUNIT_NILPOTENT_EXPLICIT, REDUCED,
};
use toposforge_core::spectrum::{
    check_generic_metaproperty, local_spectrum_frame, spec_space, RelativeSpec, SpecEnvironment, SpectrumError,
};

use crate::corpus::{self, FormulaGen, SHEAF, SHEAF_KINDS};

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum Suite {
    InferenceRules,
    Locality,
    GeometricSpreading,
    Nuclei,
    BoxTheorem,
    Sheafification,
    Metaproperties,
    Spectrum,
    GenericFilter,
    Dimension,
    Quasicoherator,
    Elimination,
}

#[derive(Debug, thiserror::Error)]
pub enum SuiteError {
    #[error(transparent)]
    Force(#[from] ForceError),
    #[error(transparent)]
    Spectrum(#[from] SpectrumError),
    #[error("{0}")]
    Config(String),
}

/// What a suite runs over. Unset overrides fall back to the seeded corpus.
#[derive(Debug, Clone)]
pub struct SuiteConfig {
    pub seed: u64,
    pub max_points: usize,
    pub max_depth: usize,
    pub space_count: usize,
    /// Random draws per space (or triples, for the box theorem).
    pub samples: usize,
    pub spaces: Option<Vec<FiniteSpace>>,
    pub rings: Option<Vec<(String, FinRing)>>,
}

impl Default for SuiteConfig {
    fn default() -> Self {
        SuiteConfig {
            seed: corpus::DEFAULT_SEED,
            max_points: 6,
            max_depth: 3,
            space_count: 20,
            samples: 10,
            spaces: None,
            rings: None,
        }
    }
}

impl SuiteConfig {
    pub fn spaces(&self) -> Vec<FiniteSpace> {
        match &self.spaces {
            Some(s) => s.clone(),
            None => corpus::spaces(&mut corpus::rng(self.seed), self.space_count, self.max_points),
        }
    }

    pub fn rings(&self) -> Vec<(String, FinRing)> {
        self.rings.clone().unwrap_or_else(corpus::rings)
    }

    /// An independent stream per corpus item.
    fn rng_for(&self, k: usize) -> ChaCha8Rng {
        corpus::rng(self.seed ^ (k as u64 + 1).wrapping_mul(0x9e37_79b9_7f4a_7c15))
    }
}

pub fn run(suite: Suite, cfg: &SuiteConfig) -> Result<Report, SuiteError> {
    match suite {
        Suite::InferenceRules => inference_rules(cfg),
        Suite::Locality => locality(cfg),
        Suite::GeometricSpreading => geometric_spreading(cfg),
        Suite::Nuclei => nuclei(cfg),
        Suite::BoxTheorem => box_theorem(cfg),
        Suite::Sheafification => sheafification(cfg),
        Suite::Metaproperties => metaproperties(cfg),
        Suite::Spectrum => spectrum(cfg),
        Suite::GenericFilter => generic_filter(cfg),
        Suite::Dimension => dimension(cfg),
        Suite::Quasicoherator => quasicoherator(cfg),
        Suite::Elimination => elimination(cfg),
    }
}

/// Maps over items on worker threads; results come back in input order.
fn par_map<T: Sync, R: Send>(items: &[T], f: impl Fn(usize, &T) -> R + Sync) -> Vec<R> {
    let workers = thread::available_parallelism().map_or(1, |n| n.get()).min(items.len().max(1));
    let next = std::sync::atomic::AtomicUsize::new(0);
    let mut slots: Vec<Option<R>> = (0..items.len()).map(|_| None).collect();
    let results = std::sync::Mutex::new(&mut slots);
    thread::scope(|s| {
        for _ in 0..workers {
            s.spawn(|| loop {
                let k = next.fetch_add(1, std::sync::atomic::Ordering::Relaxed);
                if k >= items.len() {
                    break;
                }
                let r = f(k, &items[k]);
                results.lock().expect("no worker panicked")[k] = Some(r);
            });
        }
    });
    slots.into_iter().map(|r| r.expect("every item ran")).collect()
}

fn collect(parts: Vec<Result<Report, SuiteError>>) -> Result<Report, SuiteError> {
    let mut report = Report::new();
    for p in parts {
        report.extend(p?);
    }
    Ok(report)
}

fn space_tag(k: usize, space: &FiniteSpace) -> String {
    format!("space{k}[{}pt,{}op]", space.num_points(), space.opens().len())
}

fn prefixed(mut report: Report, prefix: &str) -> Report {
    for line in &mut report.lines {
        line.location = format!("{prefix} {}", line.location);
    }
    report
}

/// Whether every open has a complement: `U ∨ ¬U = X`.
fn is_boolean(space: &FiniteSpace) -> bool {
    let full = space.full_mask();
    space.opens().iter().all(|&u| u | space.interior(full & !u) == full)
}

// --- logic ---

fn vars(names: &[&str]) -> Vec<(String, Sort)> {
    names.iter().map(|x| (x.to_string(), Sort::named(SHEAF))).collect()
}

fn rule_instances(g: &mut FormulaGen, per_rule: usize, depth: usize) -> Vec<RuleInstance> {
    let sort = Sort::named(SHEAF);
    let cx = vars(&["x"]);
    let cxy = vars(&["x", "y"]);
    let sx = ["x".to_string()];
    let sxy = ["x".to_string(), "y".to_string()];
    let mut out = Vec::new();
    for _ in 0..per_rule {
        let mut f = |scope: &[String]| g.formula(depth, scope);
        let (a, b, c) = (f(&sx), f(&sx), f(&sx));
        let family: Vec<Formula> = (0..3).map(|_| f(&sx)).collect();
        let (axy, bxy) = (f(&sxy), f(&sxy));
        let y = Term::var("y", sort.clone());
        let cy = vars(&["y"]);
        out.push(RuleInstance::identity(&cx, a.clone()));
        out.push(RuleInstance::substitution(&cxy, axy.clone(), bxy.clone(), "x", &y, &cy).expect("same sort"));
        out.push(RuleInstance::cut(&cx, a.clone(), b.clone(), c.clone()));
        out.push(RuleInstance::top_intro(&cx, a.clone()));
        out.push(RuleInstance::and_elim_left(&cx, a.clone(), b.clone()));
        out.push(RuleInstance::and_elim_right(&cx, a.clone(), b.clone()));
        out.push(RuleInstance::and_intro(&cx, a.clone(), b.clone(), c.clone()));
        out.push(RuleInstance::bot_elim(&cx, a.clone()));
        out.push(RuleInstance::or_intro_left(&cx, a.clone(), b.clone()));
        out.push(RuleInstance::or_intro_right(&cx, a.clone(), b.clone()));
        out.push(RuleInstance::or_elim(&cx, a.clone(), b.clone(), c.clone()));
        out.push(RuleInstance::big_and_elim(&cx, family.clone(), 1));
        out.push(RuleInstance::big_and_intro(&cx, a.clone(), family.clone()));
        out.push(RuleInstance::big_or_intro(&cx, family.clone(), 2));
        out.push(RuleInstance::big_or_elim(&cx, family.clone(), a.clone()));
        out.push(RuleInstance::implies_intro(&cx, a.clone(), b.clone(), c.clone()));
        out.push(RuleInstance::implies_elim(&cx, a.clone(), b.clone(), c.clone()));
        out.push(RuleInstance::exists_left(&cx, "y", sort.clone(), axy.clone(), a.clone()).expect("y not free"));
        out.push(RuleInstance::exists_inverse(&cx, "y", sort.clone(), axy.clone(), a.clone()).expect("y not free"));
        out.push(RuleInstance::forall_right(&cx, "y", sort.clone(), a.clone(), axy.clone()).expect("y not free"));
        out.push(RuleInstance::forall_inverse(&cx, "y", sort.clone(), a.clone(), axy.clone()).expect("y not free"));
        out.push(RuleInstance::eq_refl(&[], "x", sort.clone()));
        out.push(RuleInstance::eq_subst(&[], "x", "y", sort.clone(), axy.clone()).expect("same sort"));
        out.push(RuleInstance::excluded_middle(&cx, a));
    }
    out
}

/// Every rule of intuitionistic logic, `samples` random instances each, on
/// every open of every space; excluded middle is a probe, expected to fail
/// exactly on the non-Boolean spaces once every open is tried as `φ`.
pub fn inference_rules(cfg: &SuiteConfig) -> Result<Report, SuiteError> {
    let spaces = cfg.spaces();
    let parts = par_map(&spaces, |k, space| -> Result<(Report, bool, bool), SuiteError> {
        let mut rng = cfg.rng_for(k);
        let mut env = corpus::environment(&mut rng, space);
        for u in space.frame().elements() {
            env.add_prop(&format!("open{u}"), u).map_err(|e| SuiteError::Config(e.to_string()))?;
        }
        let mut g = FormulaGen::new(&mut rng, false);
        let mut instances = rule_instances(&mut g, cfg.samples, cfg.max_depth);
        for u in space.frame().elements() {
            instances.push(RuleInstance::excluded_middle(&[], Formula::prop(&format!("open{u}"))));
        }
        let mut ev = Evaluator::new(&env);
        let raw = verify_inference_rules(&mut ev, &instances)?;
        let tag = space_tag(k, space);
        let mut report = Report::new();
        let mut em_failed = false;
        for rule in toposforge_core::forcing::Rule::ALL {
            let lines: Vec<_> = raw.lines.iter().filter(|l| l.location.starts_with(&format!("{} #", rule.name()))).collect();
            let failed: Vec<_> = lines.iter().filter(|l| !l.pass).collect();
            let detail = match failed.first() {
                None => format!("{} instances", lines.len()),
                Some(l) => format!("{}/{} instances fail; first: {}", failed.len(), lines.len(), l.detail),
            };
            if rule.is_sound() {
                report.push(failed.is_empty(), format!("{tag} {}", rule.name()), detail);
            } else {
                em_failed = !failed.is_empty();
                report.push_probe(failed.is_empty(), format!("{tag} {}", rule.name()), detail);
            }
        }
        Ok((report, em_failed, is_boolean(space)))
    });
    let mut report = Report::new();
    let mut non_boolean_failures = 0;
    let mut mismatch = Vec::new();
    for (k, part) in parts.into_iter().enumerate() {
        let (r, em_failed, boolean) = part?;
        report.extend(r);
        if em_failed && !boolean {
            non_boolean_failures += 1;
        }
        if em_failed == boolean {
            mismatch.push(k);
        }
    }
    report.push(
        mismatch.is_empty() && non_boolean_failures > 0,
        "excluded-middle probe",
        format!("fails on {non_boolean_failures} non-Boolean spaces; disagreements with Booleanness: {mismatch:?}"),
    );
    Ok(report)
}

/// Monotonicity and locality for `samples` random formulas per space.
pub fn locality(cfg: &SuiteConfig) -> Result<Report, SuiteError> {
    let spaces = cfg.spaces();
    collect(par_map(&spaces, |k, space| {
        let mut rng = cfg.rng_for(k);
        let env = corpus::environment(&mut rng, space);
        let mut ev = Evaluator::new(&env);
        let mut g = FormulaGen::new(&mut rng, false);
        let mut report = Report::new();
        for _ in 0..cfg.samples {
            let phi = g.formula(cfg.max_depth, &[]);
            report.extend(locality_report(&mut ev, &phi, 16)?);
        }
        Ok(prefixed(report, &space_tag(k, space)))
    }))
}

/// For random geometric formulas: stalk truth, truth on the minimal open and
/// truth on some neighbourhood agree, and `U ⊨ φ` iff `φ` holds at every
/// point of `U`. For pairs, `U ⊨ φ ⇒ ψ` iff the implication holds in every
/// stalk over `U`.
pub fn geometric_spreading(cfg: &SuiteConfig) -> Result<Report, SuiteError> {
    let spaces = cfg.spaces();
    collect(par_map(&spaces, |k, space| {
        let mut rng = cfg.rng_for(k);
        let env = corpus::environment(&mut rng, space);
        let frame = env.frame_arc().clone();
        let f = env.sheaf(env.sheaf_id(SHEAF).expect("corpus sheaf")).clone();
        let mut ev = Evaluator::new(&env);
        let mut report = Report::new();
        let tag = space_tag(k, space);
        for i in 0..cfg.samples {
            let mut g = FormulaGen::new(&mut rng, true);
            // Every other formula has a parameter: a section over some open.
            let with_param = i % 2 == 1;
            let scope: Vec<String> = if with_param { vec!["x".to_string()] } else { Vec::new() };
            let phi = g.formula(cfg.max_depth, &scope);
            let psi = g.formula(cfg.max_depth, &scope);
            let mut bindings = Vec::new();
            if with_param {
                let inhabited: Vec<_> = frame.elements().filter(|&u| f.num_sections(u) > 0).collect();
                let u = *inhabited.choose(&mut rng).expect("the empty open has a section");
                let s = rng.random_range(0..f.num_sections(u));
                bindings.push(Binding::new("x", Sort::named(SHEAF), u, s));
            }
            let spread = check_geometric_spreading(&mut ev, &phi, &bindings)?;
            let bad = spread.failures().next().map(|l| format!("{}: {}", l.location, l.detail));
            report.push(bad.is_none(), format!("{tag} #{i}"), bad.unwrap_or_else(|| format!("{phi}")));

            let domain = bindings.iter().fold(frame.top(), |acc, b| frame.meet(acc, b.open));
            let implication = Formula::implies(phi.clone(), psi.clone());
            let mut bad = None;
            for &u in frame.below(domain) {
                let mut pointwise = true;
                for &p in frame.irreducibles_below(u) {
                    if ev.stalk_holds(&phi, p, &bindings)? && !ev.stalk_holds(&psi, p, &bindings)? {
                        pointwise = false;
                        break;
                    }
                }
                if ev.force_with(&implication, u, &bindings)? != pointwise {
                    bad = Some(u);
                    break;
                }
            }
            report.push(
                bad.is_none(),
                format!("{tag} #{i} implication"),
                bad.map_or_else(|| format!("{implication}"), |u| format!("disagreement on {}", frame.label(u))),
            );
        }
        Ok(report)
    }))
}

// --- nuclei and the box translation ---

/// The four nucleus constructors are nuclei; `¬¬` computed in the frame is
/// `Int ∘ Clos`; open and closed sublocales are the subspaces.
pub fn nuclei(cfg: &SuiteConfig) -> Result<Report, SuiteError> {
    let spaces = cfg.spaces();
    let mut report = Report::new();
    for (k, space) in spaces.iter().enumerate() {
        let tag = space_tag(k, space);
        let frame = space.frame();
        let all = corpus::nuclei(space);
        let bad: Vec<&str> = all.iter().filter(|(_, j)| !check_nucleus(frame, j.table())).map(|(n, _)| n.as_str()).collect();
        report.push(bad.is_empty(), format!("{tag} constructors"), format!("{} nuclei; failing: {bad:?}", all.len()));

        let frame_negneg = Nucleus::double_negation(frame);
        let space_negneg = space.nucleus_negneg();
        let differ: Vec<String> = frame
            .elements()
            .filter(|&u| frame_negneg.apply(u) != space_negneg.apply(u))
            .map(|u| space.describe(u))
            .collect();
        report.push(differ.is_empty(), format!("{tag} negneg = Int Clos"), format!("differs on {differ:?}"));

        let full = space.full_mask();
        let mut bad = Vec::new();
        for u in frame.elements() {
            let open = Sublocale::new(frame, &space.nucleus_open(u));
            if open.frame().isomorphism(&space.subspace_frame(space.mask(u))).is_none() {
                bad.push(format!("open {}", space.describe(u)));
            }
            let closed = Sublocale::new(frame, &space.nucleus_closed(u));
            if closed.frame().isomorphism(&space.subspace_frame(full & !space.mask(u))).is_none() {
                bad.push(format!("closed complement of {}", space.describe(u)));
            }
        }
        report.push(bad.is_empty(), format!("{tag} sublocales = subspaces"), format!("failing: {bad:?}"));
    }
    Ok(report)
}

/// `U ⊨ φ^□` against `j(U) ⊨ φ` over the sublocale with sheafified
/// parameters, for `samples` random (space, nucleus, formula) triples.
pub fn box_theorem(cfg: &SuiteConfig) -> Result<Report, SuiteError> {
    let spaces: Vec<FiniteSpace> = cfg.spaces().into_iter().filter(|s| s.num_points() <= cfg.max_points).collect();
    if spaces.is_empty() {
        return Err(SuiteError::Config("no space within the point bound".to_string()));
    }
    let triples: Vec<usize> = (0..cfg.samples).collect();
    collect(par_map(&triples, |i, _| {
        let mut rng = cfg.rng_for(i);
        let k = rng.random_range(0..spaces.len());
        let space = &spaces[k];
        let mut env = corpus::environment(&mut rng, space);
        let (jname, j) = corpus::random_nucleus(&mut rng, space);
        env.add_nucleus("j", j).map_err(|e| SuiteError::Config(e.to_string()))?;
        let phi = FormulaGen::new(&mut rng, false).formula(cfg.max_depth, &[]);
        let r = check_box_theorem(&env, "j", &phi)?;
        let bad = r.rows.iter().find(|&&(_, l, r)| l != r);
        let mut report = Report::new();
        report.push(
            bad.is_none(),
            format!("triple{i} {} j={jname}", space_tag(k, space)),
            match bad {
                None => format!("{phi}"),
                Some(&(u, l, r)) => format!("{phi}: on {} translated={l} sublocale={r}", space.describe(u)),
            },
        );
        Ok(report)
    }))
}

/// The sheaves the sheafification suite runs over on one space.
fn sheaf_corpus(rng: &mut ChaCha8Rng, space: &FiniteSpace) -> Vec<(String, Sheaf)> {
    let frame = Arc::new(space.frame().clone());
    let mut out = Vec::new();
    for kind in SHEAF_KINDS {
        out.push((format!("{kind:?}"), corpus::sheaf(rng, &frame, kind, 2)));
    }
    let u = rng.random_range(0..frame.len());
    out.push((format!("j!({})", space.describe(u)), corpus::extension_by_empty(&frame, u, 2)));
    if space.num_points() <= 2 {
        out.push(("Constant4".to_string(), corpus::sheaf(rng, &frame, corpus::SheafKind::Constant, 4)));
    }
    out
}

/// For every corpus sheaf and nucleus: `F⁺` is `□`-separated, `F⁺⁺` is a
/// `□`-sheaf, and `F → F⁺` is injective iff `F` is `□`-separated.
pub fn sheafification(cfg: &SuiteConfig) -> Result<Report, SuiteError> {
    let spaces: Vec<FiniteSpace> = cfg.spaces().into_iter().filter(|s| s.num_points() <= cfg.max_points.min(4)).collect();
    collect(par_map(&spaces, |k, space| {
        let mut rng = cfg.rng_for(k);
        let tag = space_tag(k, space);
        let mut nuclei = corpus::nuclei(space);
        let mut seen = Vec::new();
        nuclei.retain(|(_, j)| {
            let fresh = !seen.contains(&j.table().to_vec());
            seen.push(j.table().to_vec());
            fresh
        });
        let mut report = Report::new();
        for (sname, f) in sheaf_corpus(&mut rng, space) {
            for (jname, j) in &nuclei {
                let once = plus_internal(&f, j)?;
                let twice = plus_internal(&once.plus, j)?;
                let sep = is_box_separated(&f, j)?;
                let plus_sep = is_box_separated(&once.plus, j)?;
                let plusplus_sheaf = is_box_sheaf(&twice.plus, j)?;
                let injective = once.canonical_injective(&f);
                report.push(
                    plus_sep && plusplus_sheaf && injective == sep,
                    format!("{tag} {sname} j={jname}"),
                    format!("F+ separated={plus_sep} F++ sheaf={plusplus_sheaf} F separated={sep} F->F+ injective={injective}"),
                );
            }
        }
        Ok(report)
    }))
}

/// Quasicompactness, locality and irreducibility as metaproperties,
/// compared with the topology.
pub fn metaproperties(cfg: &SuiteConfig) -> Result<Report, SuiteError> {
    let spaces = cfg.spaces();
    collect(par_map(&spaces, |k, space| {
        let mut rng = cfg.rng_for(k);
        let env = corpus::environment(&mut rng, space);
        let mut g = FormulaGen::new(&mut rng, false);
        let depth = cfg.max_depth.min(2);
        let mut directed = Vec::new();
        let mut families = Vec::new();
        let mut pairs = Vec::new();
        for _ in 0..cfg.samples.min(5) {
            // Partial disjunctions of a sequence form a chain.
            let base: Vec<Formula> = (0..3).map(|_| g.formula(depth, &[])).collect();
            directed.push((1..=3).map(|n| Formula::BigOr(base[..n].to_vec())).collect());
            families.push((0..3).map(|_| g.formula(depth, &[])).collect());
            pairs.push(vec![g.formula(depth, &[]), g.formula(depth, &[])]);
        }
        let mut report = Report::new();
        report.extend(check_metaproperty(&env, Metaproperty::Quasicompact, &directed)?);
        report.extend(check_metaproperty(&env, Metaproperty::Local, &families)?);
        report.extend(check_metaproperty(&env, Metaproperty::Irreducible, &pairs)?);
        Ok(prefixed(report, &space_tag(k, space)))
    }))
}

// --- rings ---

/// Radical ideals by brute force over all subsets.
pub fn brute_radical_ideals(r: &FinRing) -> usize {
    let n = r.len();
    (0u64..1 << n)
        .filter(|&s| {
            let has = |x: usize| s >> x & 1 == 1;
            has(r.zero())
                && r.elements().all(|a| !has(a) || r.elements().all(|b| (!has(b) || has(r.add(a, b))) && has(r.mul(b, a))))
                && r.elements().all(|a| has(a) || (1..=n).all(|k| !has(r.pow(a, k))))
        })
        .count()
}

/// Filters by brute force: `1 ∈ F`, `0 ∉ F`, `xy ∈ F ⇔ x, y ∈ F`,
/// `x + y ∈ F ⇒ x ∈ F ∨ y ∈ F`.
pub fn brute_filters(r: &FinRing) -> usize {
    let n = r.len();
    (0u64..1 << n)
        .filter(|&s| {
            let has = |x: usize| s >> x & 1 == 1;
            has(r.one())
                && !has(r.zero())
                && r.elements().all(|a| {
                    r.elements().all(|b| has(r.mul(a, b)) == (has(a) && has(b)) && (!has(r.add(a, b)) || has(a) || has(b)))
                })
        })
        .count()
}

/// Frame and point counts against brute force, `Γ(Õ) ≅ A`, and stalks
/// against classical localizations at the primes.
pub fn spectrum(cfg: &SuiteConfig) -> Result<Report, SuiteError> {
    let rings = cfg.rings();
    collect(par_map(&rings, |_, (name, r)| {
        let mut report = Report::new();
        let sp = SpecEnvironment::new(r)?;
        let frame = sp.spec.frame();
        let points = frame.points().len();
        let brute = brute_radical_ideals(r);
        let filters = brute_filters(r);
        let space = spec_space(&sp.spec)?;
        report.push(
            frame.len() == brute && points == filters && space.space.num_points() == points,
            format!("{name} counts"),
            format!("frame={} (brute force {brute}), points={points} (filters {filters})", frame.len()),
        );
        let (expected_len, expected_points) = match name.as_str() {
            "zmod 12" => (Some(4), Some(2)),
            "zmod 4" => (Some(2), Some(1)),
            _ => (None, None),
        };
        if let (Some(l), Some(p)) = (expected_len, expected_points) {
            report.push(frame.len() == l && points == p, format!("{name} known"), format!("expected frame={l} points={p}"));
        }

        // Global sections: a ↦ a/1 is a bijection preserving the operations.
        let o = &sp.structure.sheaf;
        let top = frame.top();
        let env = sp.environment();
        let globals: Vec<usize> = r.elements().map(|a| sp.structure.global(a)).collect();
        let mut distinct = globals.clone();
        distinct.sort_unstable();
        distinct.dedup();
        let bijective = o.num_sections(top) == r.len() && distinct.len() == r.len();
        let ops = r.elements().all(|a| {
            r.elements().all(|b| {
                env.apply_function("add", top, &[globals[a], globals[b]]) == Some(globals[r.add(a, b)])
                    && env.apply_function("mul", top, &[globals[a], globals[b]]) == Some(globals[r.mul(a, b)])
            })
        });
        report.push(
            bijective && ops,
            format!("{name}: frame={} elements, points={points}, Γ≅A", frame.len()),
            format!("|Γ|={} bijective={bijective} operations={ops}", o.num_sections(top)),
        );

        // Stalks: the germs at the point of a prime p against A localized
        // at A∖p, both as rings.
        let mut bad = Vec::new();
        let primes = r.prime_ideals();
        for &p in &primes {
            let classical = r.localize(r.full() & !p);
            let at = frame.irreducibles().iter().position(|&q| r.full() & !sp.spec.invertible_on(q) == p);
            match at {
                Some(pi) if sp.structure.stalks[pi].ring.isomorphism(&classical.ring).is_some()
                    && o.num_germs(pi) == classical.ring.len() => {}
                _ => bad.push(toposforge_core::spectrum::ideal_label(r, p)),
            }
        }
        report.push(
            bad.is_empty() && primes.len() == points,
            format!("{name} stalks"),
            format!("{} primes; mismatched: {bad:?}", primes.len()),
        );
        Ok(report)
    }))
}

/// Ideals of `A̲` given by comprehension over constant parameters.
fn comprehension_ideals(r: &FinRing) -> Vec<String> {
    let mut out = Vec::new();
    for c in r.elements() {
        out.push(format!("exists b:A. x = b*el{c}"));
        out.push(format!("el{c}*x = zeroA"));
    }
    for c in r.elements() {
        for d in r.elements().filter(|&d| d > c).take(2) {
            out.push(format!("exists a,b:A. x = a*el{c} + b*el{d}"));
            out.push(format!("(exists b:A. x = b*el{c}) /\\ el{d}*x = zeroA"));
        }
    }
    out.push("x = x".to_string());
    out.push("bigvee[n=1..] x^n = zeroA".to_string());
    out
}

/// The generic filter: if `I ∩ F` is inhabited on `D(f)` then some power of
/// `f` lies in `I`, for comprehension-defined ideals `I`.
pub fn generic_filter(cfg: &SuiteConfig) -> Result<Report, SuiteError> {
    let rings = cfg.rings();
    let parts = par_map(&rings, |_, (name, r)| -> Result<(Report, usize), SuiteError> {
        let sp = SpecEnvironment::new(r)?;
        let mut report = Report::new();
        let mut count = 0;
        for text in comprehension_ideals(r) {
            let phi = parse(&text).map_err(|e| SuiteError::Config(e.to_string()))?;
            let lines = check_generic_metaproperty(&sp, "x", &phi)?;
            let bad: Vec<_> = lines.failures().map(|l| l.location.clone()).collect();
            report.push(bad.is_empty(), format!("{name} {{x | {text}}}"), format!("failing: {bad:?}"));
            count += 1;
        }
        let rejected = matches!(
            check_generic_metaproperty(&sp, "x", &parse("x in Fil").expect("fixed formula")),
            Err(SpectrumError::NonConstantParameter(_))
        );
        report.push(rejected, format!("{name} non-constant parameter"), "`x in Fil` is rejected");
        Ok((report, count))
    });
    let mut report = Report::new();
    let mut total = 0;
    for p in parts {
        let (r, c) = p?;
        report.extend(r);
        total += c;
    }
    report.push(total >= 50, "generic-filter coverage", format!("{total} comprehension ideals"));
    Ok(report)
}

/// Internal properties of `Õ` against their classical counterparts.
pub fn dimension(cfg: &SuiteConfig) -> Result<Report, SuiteError> {
    let rings = cfg.rings();
    collect(par_map(&rings, |_, (name, r)| {
        let sp = SpecEnvironment::new(r)?;
        let mut report = Report::new();
        for (label, text) in [
            ("inv defined", INV_DEFINED),
            ("inv characterized", INV_CHARACTERIZED),
            ("nilp defined", NILP_DEFINED),
            ("nilp characterized", NILP_CHARACTERIZED),
            ("local", LOCAL),
            ("non-units nilpotent", NONUNIT_NILPOTENT),
            ("non-units nilpotent, explicit", NONUNIT_NILPOTENT_EXPLICIT),
        ] {
            report.push(sp.holds(text)?, format!("{name} {label}"), text);
        }
        let field = sp.holds(FIELD)?;
        report.push(field == r.is_reduced(), format!("{name} field iff reduced"), format!("field={field} reduced={}", r.is_reduced()));
        let internal = sp.holds(KRULL_DIM_ZERO)?;
        let stalkwise = sp.structure.stalks.iter().all(|l| l.ring.krull_dim_leq(0).holds);
        report.push(
            internal == stalkwise,
            format!("{name} Krull dimension <= 0"),
            format!("internal={internal} every stalk={stalkwise}"),
        );
        Ok(report)
    }))
}

/// The quasicoherator on the radical ideals of each local-spectrum
/// instance: inflationary, idempotent, monotone, meet-preserving, with
/// fixed points exactly the ideals satisfying the internal condition.
pub fn quasicoherator(_cfg: &SuiteConfig) -> Result<Report, SuiteError> {
    let instances = corpus::local_algebras();
    collect(par_map(&instances, |_, (name, base, algebra, phi)| {
        let mut report = Report::new();
        let rel = RelativeSpec::new(base, algebra, phi)?;
        let ideals: Vec<Subset> = rel.spec.ideals().to_vec();
        let q: Vec<Subset> = ideals.iter().map(|&i| rel.quasicoherator(i)).collect();
        let index = |i: Subset| ideals.iter().position(|&j| j == i);
        let inflationary = ideals.iter().zip(&q).all(|(&i, &qi)| i & !qi == 0);
        let idempotent = q.iter().all(|&qi| index(qi).is_some_and(|k| q[k] == qi));
        let mut monotone = true;
        let mut meets = true;
        for (a, &i) in ideals.iter().enumerate() {
            for (b, &j) in ideals.iter().enumerate() {
                if i & !j == 0 && q[a] & !q[b] != 0 {
                    monotone = false;
                }
                let m = index(i & j).expect("radical ideals are closed under intersection");
                if q[m] != q[a] & q[b] {
                    meets = false;
                }
            }
        }
        let fixed_ok = ideals.iter().zip(&q).all(|(&i, &qi)| (qi == i) == rel.satisfies_condition(i));
        report.push(
            inflationary && idempotent && monotone && meets && fixed_ok,
            format!("{name} quasicoherator"),
            format!(
                "{} radical ideals; inflationary={inflationary} idempotent={idempotent} monotone={monotone} meets={meets} fixed points={fixed_ok}",
                ideals.len()
            ),
        );
        let local = local_spectrum_frame(base, algebra, phi)?;
        let filters = local.relative.filters_over_units().len();
        report.push(
            local.num_points() == filters,
            format!("{name} local spectrum"),
            format!("{} elements, {} points, {filters} filters over the units", local.frame.len(), local.num_points()),
        );
        Ok(report)
    }))
}

/// Triples `(A, M, f : M → N)` for the elimination table.
fn table_triples() -> Vec<(String, FinRing, FinModule, FinModule, Vec<usize>)> {
    let mut out = Vec::new();
    for (name, r) in corpus::rings() {
        let regular = FinModule::regular(&r);
        // Multiplication by a zero divisor (or by 0 in a field).
        let zd = r.elements().find(|&x| x != r.zero() && !r.is_invertible(x)).unwrap_or(r.zero());
        out.push((format!("{name}, A, x*{}", r.label(zd)), r.clone(), regular.clone(), regular.clone(), r.elements().map(|x| r.mul(x, zd)).collect()));
        // Multiplication by a unit.
        let u = r.elements().rev().find(|&x| r.is_invertible(x)).unwrap_or(r.one());
        out.push((format!("{name}, A, x*{}", r.label(u)), r.clone(), regular.clone(), regular.clone(), r.elements().map(|x| r.mul(x, u)).collect()));
        // Projection onto a quotient by a maximal ideal.
        if let Some(&m) = r.maximal_ideals().first() {
            let q = FinModule::quotient(&r, m).expect("ideal");
            let one = q.act(r.one(), q.elements().find(|&e| e != q.zero()).unwrap_or(q.zero()));
            let table = r.elements().map(|x| q.act(x, one)).collect();
            out.push((format!("{name}, A -> A/m"), r.clone(), regular.clone(), q, table));
        }
        // The zero module.
        let zero = FinModule::zero_module(&r);
        out.push((format!("{name}, 0 -> A"), r.clone(), zero, regular.clone(), vec![r.zero()]));
    }
    out
}

/// Internal statements about `Õ`, `M̃` and `f̃` against classical facts:
/// reducedness, `M = 0`, generation by `k` elements, injectivity and
/// surjectivity.
pub fn elimination(_cfg: &SuiteConfig) -> Result<Report, SuiteError> {
    let triples = table_triples();
    let parts = par_map(&triples, |_, (name, r, m, n, table)| -> Result<Report, SuiteError> {
        let mut sp = SpecEnvironment::new(r)?;
        sp.add_module("M", m)?;
        sp.add_module("N", n)?;
        sp.add_module_map("f", "M", "N", &LinearMap { table: table.clone() })?;
        let mut report = Report::new();
        let mut check = |what: &str, internal: bool, classical: bool| {
            report.push(internal == classical, format!("{name}: {what}"), format!("internal={internal} classical={classical}"));
        };
        check("reduced", sp.holds(REDUCED)?, r.is_reduced());
        check("M = 0", sp.holds(&module_zero("M"))?, m.is_zero());
        for k in 1..=2 {
            check(&format!("M generated by {k}"), sp.holds(&module_generated("M", k))?, m.generated_by(k));
        }
        let mut image = table.clone();
        image.sort_unstable();
        image.dedup();
        check("f injective", sp.holds(&injective("f", "M"))?, image.len() == m.len());
        check("f surjective", sp.holds(&surjective("f", "M", "N"))?, image.len() == n.len());
        Ok(report)
    });
    let mut report = collect(parts)?;
    report.push(triples.len() >= 10, "elimination coverage", format!("{} triples", triples.len()));
    Ok(report)
}

/// `{x : F | φ}` for a formula on a space environment; used by the CLI.
pub fn comprehension(env: &Environment, sort: &str, var: &str, phi: &Formula) -> Result<toposforge_core::Subsheaf, ForceError> {
    comprehend(&mut Evaluator::new(env), &Sort::named(sort), var, phi)
}

/// `¬¬` on a frame against the space's `Int ∘ Clos`, exposed for tests.
pub fn negneg_agrees(space: &FiniteSpace) -> bool {
    let frame: &Frame = space.frame();
    let a = Nucleus::double_negation(frame);
    let b = space.nucleus_negneg();
    frame.elements().all(|u| a.apply(u) == b.apply(u))
}
