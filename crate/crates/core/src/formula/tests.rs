use super::*;
use alloc::string::ToString;
use alloc::vec;

fn p(s: &str) -> Formula {
    parse(s).unwrap_or_else(|e| panic!("{s}: {e}"))
}

#[test]
fn precedence_and_binders() {
    let f = p("forall x:F. a /\\ b \\/ c => d");
    let Formula::Forall(x, Sort::Named(s), body) = f else { panic!() };
    assert_eq!((x.as_str(), s.as_str()), ("x", "F"));
    let Formula::Implies(lhs, rhs) = *body else { panic!() };
    assert!(matches!(*lhs, Formula::Or(..)));
    assert_eq!(*rhs, Formula::prop("d"));
}

#[test]
fn implication_is_right_associative() {
    assert_eq!(p("a => b => c"), Formula::implies(Formula::prop("a"), Formula::implies(Formula::prop("b"), Formula::prop("c"))));
}

#[test]
fn negation_is_implication_into_bottom() {
    assert_eq!(p("~a"), Formula::implies(Formula::prop("a"), Formula::Bot));
    assert_eq!(p("~a").to_string(), "~a");
    assert_eq!(p("~~(p(x)=y)").to_string(), "~~(p(x)=y)");
}

#[test]
fn bound_names_are_variables() {
    let f = p("exists x:F. p(x)=y");
    let Formula::Exists(_, _, body) = f else { panic!() };
    let Formula::Eq(lhs, rhs) = *body else { panic!() };
    assert_eq!(lhs, Term::app("p", vec![Term::var("x", Sort::named("F"))]));
    assert_eq!(rhs, Term::constant("y"));
}

#[test]
fn membership_sugar() {
    assert_eq!(p("Fil(x)"), Formula::member(Term::constant("x"), "Fil"));
    assert_eq!(p("x in Fil"), Formula::member(Term::constant("x"), "Fil"));
    assert_eq!(p("Fil(x)").to_string(), "x in Fil");
}

#[test]
fn sorts_parse() {
    let f = p("forall s:P(P(F)). forall u:Omega. u");
    let Formula::Forall(_, s, body) = f else { panic!() };
    assert_eq!(s, Sort::power(Sort::power(Sort::named("F"))));
    let Formula::Forall(_, Sort::Omega, inner) = *body else { panic!() };
    assert_eq!(*inner, Formula::Prop(Term::var("u", Sort::Omega)));
}

#[test]
fn multi_variable_binder() {
    let f = p("forall x,y:M. x=y");
    let expected = Formula::forall(
        "x",
        Sort::named("M"),
        Formula::forall("y", Sort::named("M"), Formula::eq(Term::var("x", Sort::named("M")), Term::var("y", Sort::named("M")))),
    );
    assert_eq!(f, expected);
}

#[test]
fn arithmetic_terms() {
    let f = p("x^2 + 3*y = (x + y)^n");
    assert_eq!(f.to_string(), "x^2 + 3*y=(x + y)^n");
    assert_eq!(parse(&f.to_string()).unwrap(), f);
}

#[test]
fn schemas_and_lists() {
    let f = p("bigvee[n=0..4] f^n*s in G");
    assert_eq!(f.to_string(), "bigvee[n=0..4] f^n*s in G");
    let g = p("bigand{a; b \\/ c; true}");
    assert_eq!(g, Formula::BigAnd(vec![Formula::prop("a"), Formula::or(Formula::prop("b"), Formula::prop("c")), Formula::Top]));
    assert_eq!(p("bigvee{}"), Formula::BigOr(vec![]));
    assert!(matches!(p("bigvee[n=1..] x^n=0"), Formula::Schema { hi: None, .. }));
}

#[test]
fn error_offset_points_at_end_of_input() {
    let e = parse("forall x:F. (").unwrap_err();
    assert_eq!(e.offset, 13);
    let e = parse("a /\\ ").unwrap_err();
    assert_eq!(e.offset, 5);
    assert!(parse("a b").is_err());
    assert_eq!(parse("a # b").unwrap_err().offset, 2);
}

#[test]
fn printer_examples() {
    assert_eq!(p("(a=b) /\\ (c=d)").to_string(), "a=b /\\ c=d");
    assert_eq!(p("(exists x:F. a) /\\ b").to_string(), "(exists x:F. a) /\\ b");
    assert_eq!(p("box[j](a=b)").to_string(), "box[j](a=b)");
    assert_eq!(p("(a => b) => c").to_string(), "(a => b) => c");
}

#[test]
fn free_variables_and_substitution() {
    let m = Sort::named("M");
    let x = Term::var("x", m.clone());
    let y = Term::var("y", m.clone());
    let phi = Formula::eq(x.clone(), Term::Num(0));
    assert_eq!(phi.free_vars().len(), 1);
    assert_eq!(phi.substitute("x", &Term::Num(1)).unwrap(), Formula::eq(Term::Num(1), Term::Num(0)));

    // ∃y. x = y with x := y must rename the binder.
    let psi = Formula::exists("y", m.clone(), Formula::eq(x.clone(), y.clone()));
    let out = psi.substitute("x", &y).unwrap();
    let Formula::Exists(b, _, body) = &out else { panic!() };
    assert_eq!(b, "y'");
    assert_eq!(**body, Formula::eq(y.clone(), Term::var("y'", m.clone())));
    assert_eq!(out.free_vars().into_iter().map(|(n, _)| n).collect::<Vec<_>>(), vec!["y".to_string()]);

    let wrong = Term::var("z", Sort::named("N"));
    assert!(matches!(phi.substitute("x", &wrong), Err(SubstError::SortMismatch { .. })));
}

#[test]
fn geometric_classification() {
    assert!(p("exists x:F. a \\/ b /\\ x=x").is_geometric());
    assert!(!p("~a").is_geometric());
    assert!(p("forall x:F. x in G => exists y:F. y=x").is_geometric_implication());
    assert!(!p("forall x:F. (a => b) => c").is_geometric_implication());
    assert!(!p("bigand[n=0..2] a").is_geometric());
    assert!(p("bigvee[n=0..2] a").is_geometric());
}

#[test]
fn translations() {
    let f = p("exists x:F. p(x)=y");
    assert_eq!(negneg_translate(&f, false).formula.to_string(), "~~(exists x:F. ~~(p(x)=y))");
    assert_eq!(box_translate(&p("true"), "j", false).formula.to_string(), "true");
    let r = box_translate(&p("a=b /\\ c=d"), "j", true);
    assert_eq!(r.formula.to_string(), "box[j](a=b) /\\ box[j](c=d)");
    assert_eq!(r.elided, 1);
    assert_eq!(box_translate(&p("a=b /\\ c=d"), "j", false).formula.to_string(), "box[j](box[j](a=b) /\\ box[j](c=d))");
    assert_eq!(box_translate(&p("~a"), "j", true).formula.to_string(), "box[j]a => box[j]false");
}

#[test]
fn exists_unique_shape() {
    let f = Formula::exists_unique("x", Sort::named("F"), p("exists z:F. z=z"));
    assert!(f.to_string().starts_with("exists x:F. "));
    assert!(f.free_vars().is_empty());
}
