use super::*;
use crate::formula::{parse, Formula, Sort};
use crate::frame::FiniteSpace;
use alloc::string::ToString;
use alloc::vec;

fn p(s: &str) -> Formula {
    parse(s).unwrap()
}

fn sierpinski_env() -> Environment {
    let space = FiniteSpace::sierpinski();
    let mut env = Environment::new(Arc::new(space.frame().clone()));
    env.add_prop("U", 1).unwrap();
    env
}

fn constant_env(space: &FiniteSpace, values: &[&str]) -> Environment {
    let frame = Arc::new(space.frame().clone());
    let vals: Vec<String> = values.iter().map(|s| s.to_string()).collect();
    let mut env = Environment::new(frame.clone());
    env.add_sheaf("M", Sheaf::constant(frame, &vals)).unwrap();
    env
}

#[test]
fn bottom_on_empty_open() {
    let env = sierpinski_env();
    let mut ev = Evaluator::new(&env);
    assert!(ev.force(&Formula::Bot, 0).unwrap());
    assert!(!ev.force(&Formula::Bot, 1).unwrap());
    assert_eq!(ev.truth_value(&Formula::Top).unwrap(), 2);
}

#[test]
fn double_negation_on_sierpinski() {
    let env = sierpinski_env();
    let mut ev = Evaluator::new(&env);
    assert!(ev.force(&p("~~U"), 2).unwrap());
    assert!(!ev.force(&p("U"), 2).unwrap());
    assert_eq!(ev.truth_value(&p("~U")).unwrap(), 0);
    assert_eq!(ev.truth_value(&p("U \\/ ~U")).unwrap(), 1);
}

#[test]
fn constant_sheaves_have_decidable_equality() {
    for space in [FiniteSpace::sierpinski(), FiniteSpace::discrete(2), FiniteSpace::discrete(3)] {
        let env = constant_env(&space, &["a", "b", "c"]);
        let mut ev = Evaluator::new(&env);
        let top = env.frame().top();
        assert!(ev.force(&p("forall x,y:M. x = y \\/ ~(x = y)"), top).unwrap());
        assert!(ev.force(&p("exists x:M. true"), top).unwrap());
    }
}

#[test]
fn cover_semantics_agrees() {
    let space = FiniteSpace::from_lists(&["a", "b", "c"], &[&[], &["c"], &["a", "c"], &["b", "c"], &["a", "b", "c"]]).unwrap();
    let mut env = constant_env(&space, &["0", "1"]);
    env.add_prop("A", space.open_of_mask(0b101).unwrap()).unwrap();
    env.add_prop("B", space.open_of_mask(0b110).unwrap()).unwrap();
    let formulas = [
        "A \\/ B",
        "exists x:M. exists y:M. ~(x = y)",
        "forall x:M. x = x => (A \\/ B)",
        "~(A /\\ B) => ~A \\/ ~B",
        "box[negneg](A \\/ ~A)",
    ];
    for text in formulas {
        let phi = p(text);
        let mut a = Evaluator::new(&env);
        let mut b = Evaluator::with_semantics(&env, Semantics::Cover);
        for u in env.frame().elements() {
            assert_eq!(a.force(&phi, u).unwrap(), b.force(&phi, u).unwrap(), "{text} on {u}");
        }
    }
}

#[test]
fn resolution_and_sort_errors() {
    let env = constant_env(&FiniteSpace::sierpinski(), &["a"]);
    let mut ev = Evaluator::new(&env);
    assert!(matches!(ev.force(&p("forall x:N. x = x"), 2), Err(ForceError::Unresolved(_))));
    assert!(matches!(ev.force(&p("V"), 2), Err(ForceError::Unresolved(_))));
    assert!(matches!(ev.force(&p("forall x:M. forall s:Omega. x = s"), 2), Err(ForceError::Sort(_))));
    assert!(matches!(ev.force(&p("bigvee[n=0..] true"), 2), Err(ForceError::UnboundedSchema(_))));
    assert!(matches!(ev.force(&Formula::Top, 7), Err(ForceError::OpenOutOfRange(7))));
}

#[test]
fn omega_and_power_sorts() {
    let env = sierpinski_env();
    let mut ev = Evaluator::new(&env);
    // Ω has a top element and every truth value is ¬¬-dense or not.
    assert!(ev.force(&p("exists s:Omega. s"), 2).unwrap());
    assert!(ev.force(&p("forall s:Omega. s => s"), 2).unwrap());
    assert!(!ev.force(&p("forall s:Omega. s \\/ ~s"), 2).unwrap());
    let env = constant_env(&FiniteSpace::sierpinski(), &["a", "b"]);
    let mut ev = Evaluator::new(&env);
    assert!(ev.force(&p("forall x:M. exists S:P(M). x in S /\\ forall y:M. y in S => y = x"), 2).unwrap());
}

#[test]
fn rule_instances_on_sierpinski() {
    let env = sierpinski_env();
    let mut ev = Evaluator::new(&env);
    let ctx: Vec<(String, Sort)> = Vec::new();
    let a = p("U \\/ ~U");
    let b = p("~~U => U");
    let c = p("~U \\/ ~~U");
    let instances = vec![
        RuleInstance::or_elim(&ctx, a.clone(), b.clone(), c.clone()),
        RuleInstance::cut(&ctx, a.clone(), a.clone(), a.clone()),
        RuleInstance::implies_intro(&ctx, a.clone(), b.clone(), c.clone()),
        RuleInstance::excluded_middle(&ctx, p("U")),
    ];
    let report = verify_inference_rules(&mut ev, &instances).unwrap();
    assert!(report.passed(), "{report}");
    let probe = report.lines.last().unwrap();
    assert!(probe.probe && !probe.pass);
    assert!(probe.to_string().starts_with("FAIL excluded-middle"));
}

#[test]
fn locality_on_trivial_and_all_covers() {
    let env = sierpinski_env();
    let mut ev = Evaluator::new(&env);
    assert!(check_locality(&mut ev, &p("~~U"), 2, &[2]).unwrap());
    assert!(check_locality(&mut ev, &p("U"), 1, &[0, 1]).unwrap());
    let report = locality_report(&mut ev, &p("U \\/ ~U"), 8).unwrap();
    assert!(report.passed(), "{report}");
}

#[test]
fn geometric_spreading_for_epimorphisms() {
    // Two opens {a,c} and {b,c} meeting in {c}. F has one germ on each of
    // them, restricting to different germs on {c}, so F(X) is empty while
    // F → 1 is stalkwise surjective.
    let space = FiniteSpace::from_lists(&["a", "b", "c"], &[&[], &["c"], &["a", "c"], &["b", "c"], &["a", "b", "c"]]).unwrap();
    let frame = Arc::new(space.frame().clone());
    let irr = frame.irreducibles().to_vec();
    let c = space.open_of_mask(0b100).unwrap();
    let ac = space.open_of_mask(0b101).unwrap();
    let labels: Vec<Vec<String>> = irr
        .iter()
        .map(|&e| if e == c { vec!["z1".to_string(), "z2".to_string()] } else if e == ac { vec!["x".to_string()] } else { vec!["y".to_string()] })
        .collect();
    let f = Sheaf::from_basis(frame.clone(), labels, |pi, _, _| if irr[pi] == ac { 0 } else { 1 }).unwrap();
    assert_eq!(f.num_sections(frame.top()), 0);
    let mut env = Environment::new(frame.clone());
    let fid = env.add_sheaf("F", f).unwrap();
    let gid = env.add_sheaf("G", Sheaf::terminal(frame.clone())).unwrap();
    env.add_function_fn("f", &[fid], gid, |_, _| 0).unwrap();
    let mut ev = Evaluator::new(&env);
    let phi = p("exists x:F. f(x) = y");
    let b = [Binding::new("y", Sort::named("G"), frame.top(), 0)];
    assert!(ev.force_with(&phi, frame.top(), &b).unwrap());
    let report = check_geometric_spreading(&mut ev, &phi, &b).unwrap();
    assert!(report.passed(), "{report}");
    assert!(ev.force(&p("forall y:G. exists x:F. f(x) = y"), frame.top()).unwrap());
    assert!(matches!(check_geometric_spreading(&mut ev, &p("~(y = y)"), &b), Err(ForceError::Unsupported(_))));
}

#[test]
fn box_theorem_on_sierpinski() {
    let env = sierpinski_env();
    let report = check_box_theorem(&env, "negneg", &p("U")).unwrap();
    assert_eq!(report.translated.to_string(), "box[negneg]U");
    assert!(report.agrees());
    let mut ev = Evaluator::new(&env);
    assert_eq!(ev.truth_value(&report.translated).unwrap(), ev.truth_value(&p("~~U")).unwrap());
    assert_eq!(report.rows.last(), Some(&(2, true, true)));
    let report = check_box_theorem(&env, "id", &p("U \\/ ~U")).unwrap();
    assert!(report.agrees());
}

#[test]
fn metaproperties_follow_the_topology() {
    let env = sierpinski_env();
    let r = check_metaproperty(&env, Metaproperty::Local, &[vec![p("U"), p("~U")]]).unwrap();
    assert!(r.passed(), "{r}");
    let r = check_metaproperty(&env, Metaproperty::Quasicompact, &[]).unwrap();
    assert!(r.passed(), "{r}");

    let discrete = FiniteSpace::discrete(2);
    let env = Environment::new(Arc::new(discrete.frame().clone()));
    let r = check_metaproperty(&env, Metaproperty::Irreducible, &[]).unwrap();
    assert!(r.passed(), "{r}");
    assert!(r.lines.iter().any(|l| l.detail.starts_with("violated")));
    assert!(!Metaproperty::Irreducible.holds_topologically(env.frame()));
    assert!(!Metaproperty::Local.holds_topologically(env.frame()));
}

#[test]
fn plus_construction_internally() {
    let space = FiniteSpace::sierpinski();
    let frame = Arc::new(space.frame().clone());
    let c = Sheaf::constant(frame.clone(), &["a".to_string(), "b".to_string()]);
    let j = Nucleus::double_negation(&frame);
    assert!(is_box_separated(&c, &j).unwrap());
    let (once, twice) = sheafify_internal(&c, &j).unwrap();
    assert!(once.canonical_injective(&c));
    assert!(is_box_separated(&once.plus, &j).unwrap());
    assert!(is_box_sheaf(&twice.plus, &j).unwrap());
    // The ¬¬-sheafification only sees the generic point.
    let (direct, sub) = crate::sheaf::sheafify(&c, &j).unwrap();
    let back = crate::sheaf::transport_to_parent(&direct, &sub, &j, frame.clone()).unwrap();
    for u in frame.elements() {
        assert_eq!(twice.plus.num_sections(u), back.num_sections(u));
    }
    assert!(is_box_sheaf(&c, &Nucleus::identity(&frame)).unwrap());
    assert!(c.is_flabby());
    assert!(flabby_internal(&c).unwrap());
}

#[test]
fn comprehension_subsheaf() {
    let env = constant_env(&FiniteSpace::discrete(2), &["a", "b"]);
    let mut env = env;
    let top = env.frame().top();
    let a = env.sheaf(0).sections(top).find(|&s| env.sheaf(0).section_label(top, s) == "(a,a)").unwrap();
    env.add_constant("a", 0, a).unwrap();
    let mut ev = Evaluator::new(&env);
    let sub = comprehend(&mut ev, &Sort::named("M"), "x", &p("x = a")).unwrap();
    for u in env.frame().elements() {
        assert_eq!(env.frame().below(u).len(), 1 << (env.frame().irreducibles_below(u).len()));
        assert_eq!(env.sheaf(0).sections(u).filter(|&s| sub.contains(u, s)).count(), 1);
    }
}
