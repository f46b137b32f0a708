use std::sync::Arc;

use proptest::prelude::*;
use toposforge_core::finring::FinRing;
use toposforge_core::forcing::{Environment, Evaluator};
use toposforge_core::formula::{box_translate, parse, Formula};
use toposforge_core::frame::{check_nucleus, FiniteSpace, Nucleus};
use toposforge_core::sheaf::Sheaf;
use toposforge_core::spectrum::spec_frame;

fn space() -> impl Strategy<Value = FiniteSpace> {
    (1usize..=5)
        .prop_flat_map(|n| (Just(n), prop::collection::vec((0..n, 0..n), 0..=2 * n)))
        .prop_filter_map("antisymmetric", |(n, arrows)| {
            let arrows: Vec<_> = arrows.into_iter().filter(|(a, b)| a != b).collect();
            FiniteSpace::alexandrov((0..n).map(|i| format!("p{i}")).collect(), &arrows).ok()
        })
}

/// Formula text over props `P`, `Q`, `R`, a constant sheaf `M` with a
/// global constant `c`, and a nucleus `j`.
fn formula_text() -> impl Strategy<Value = String> {
    let leaf = prop_oneof![Just("P"), Just("Q"), Just("R"), Just("true"), Just("false")].prop_map(str::to_string);
    leaf.prop_recursive(3, 24, 2, |inner| {
        prop_oneof![
            (inner.clone(), inner.clone()).prop_map(|(a, b)| format!("({a} /\\ {b})")),
            (inner.clone(), inner.clone()).prop_map(|(a, b)| format!("({a} \\/ {b})")),
            (inner.clone(), inner.clone()).prop_map(|(a, b)| format!("({a} => {b})")),
            inner.clone().prop_map(|a| format!("~({a})")),
            inner.clone().prop_map(|a| format!("box[j]({a})")),
            inner.clone().prop_map(|a| format!("(exists x:M. (x = c \\/ {a}))")),
            inner.prop_map(|a| format!("(forall x:M. (x = c => {a}))")),
        ]
    })
}

struct World {
    env: Environment,
    j: Nucleus,
}

fn world(space: FiniteSpace, props: [usize; 3], nucleus: usize) -> World {
    let frame = Arc::new(space.frame().clone());
    let n = frame.len();
    let mut env = Environment::new(frame.clone());
    for (name, k) in ["P", "Q", "R"].into_iter().zip(props) {
        env.add_prop(name, k % n).unwrap();
    }
    let m = env.add_sheaf("M", Sheaf::constant(frame.clone(), &["a".to_string(), "b".to_string()])).unwrap();
    env.add_constant("c", m, 0).unwrap();
    let u = nucleus % n;
    let j = match nucleus % 4 {
        0 => space.nucleus_open(u),
        1 => space.nucleus_closed(u),
        2 => space.nucleus_negneg(),
        _ => space.nucleus_point(nucleus % space.num_points()),
    };
    env.add_nucleus("j", j.clone()).unwrap();
    World { env, j }
}

fn world_strategy() -> impl Strategy<Value = (FiniteSpace, [usize; 3], usize)> {
    (space(), any::<[usize; 3]>(), any::<usize>())
}

fn squarefree(n: usize) -> bool {
    (2..=n).all(|d| !n.is_multiple_of(d * d))
}

fn prime_factors(n: usize) -> usize {
    (2..=n).filter(|&p| n.is_multiple_of(p) && (2..p).all(|d| !p.is_multiple_of(d))).count()
}

proptest! {
    #[test]
    fn heyting_adjunction(s in space()) {
        let f = s.frame();
        for a in f.elements() {
            for b in f.elements() {
                let imp = f.implies(a, b);
                for c in f.elements() {
                    prop_assert_eq!(f.leq(f.meet(c, a), b), f.leq(c, imp));
                    prop_assert_eq!(f.meet(a, f.join(b, c)), f.join(f.meet(a, b), f.meet(a, c)));
                }
            }
        }
    }

    #[test]
    fn constructors_give_nuclei(s in space()) {
        let f = s.frame();
        for u in f.elements() {
            prop_assert!(check_nucleus(f, s.nucleus_open(u).table()));
            prop_assert!(check_nucleus(f, s.nucleus_closed(u).table()));
        }
        for x in 0..s.num_points() {
            prop_assert!(check_nucleus(f, s.nucleus_point(x).table()));
        }
        let (a, b) = (s.nucleus_negneg(), Nucleus::double_negation(f));
        prop_assert_eq!(a.table(), b.table());
    }

    #[test]
    fn forcing_is_monotone((s, p, j) in world_strategy(), text in formula_text()) {
        let w = world(s, p, j);
        let phi = parse(&text).unwrap();
        let f = w.env.frame_arc().clone();
        let mut ev = Evaluator::new(&w.env);
        for u in f.elements() {
            if ev.force(&phi, u).unwrap() {
                for &v in f.below(u) {
                    prop_assert!(ev.force(&phi, v).unwrap(), "{} on {} but not {}", phi, f.label(u), f.label(v));
                }
            }
        }
    }

    #[test]
    fn truth_values_are_homomorphic((s, p, j) in world_strategy(), a in formula_text(), b in formula_text()) {
        let w = world(s, p, j);
        let (pa, pb) = (parse(&a).unwrap(), parse(&b).unwrap());
        let f = w.env.frame_arc().clone();
        let mut ev = Evaluator::new(&w.env);
        let (ta, tb) = (ev.truth_value(&pa).unwrap(), ev.truth_value(&pb).unwrap());
        prop_assert_eq!(ev.truth_value(&Formula::and(pa.clone(), pb.clone())).unwrap(), f.meet(ta, tb));
        prop_assert_eq!(ev.truth_value(&Formula::or(pa.clone(), pb.clone())).unwrap(), f.join(ta, tb));
        prop_assert_eq!(ev.truth_value(&Formula::implies(pa.clone(), pb)).unwrap(), f.implies(ta, tb));
        prop_assert_eq!(ev.truth_value(&Formula::not(pa.clone())).unwrap(), f.neg(ta));
        prop_assert_eq!(ev.truth_value(&parse(&format!("box[j]({a})")).unwrap()).unwrap(), w.j.apply(ta));
        prop_assert_eq!(ev.truth_value(&pa).unwrap(), ta);
    }

    #[test]
    fn print_parse_round_trip(text in formula_text()) {
        let phi = parse(&text).unwrap();
        prop_assert_eq!(parse(&phi.to_string()).unwrap(), phi);
    }

    #[test]
    fn translations_respect_semantics((s, p, j) in world_strategy(), text in formula_text()) {
        let w = world(s, p, j);
        let phi = parse(&text).unwrap();
        let mut ev = Evaluator::new(&w.env);
        let plain = ev.truth_value(&phi).unwrap();
        prop_assert_eq!(ev.truth_value(&box_translate(&phi, "id", false).formula).unwrap(), plain);
        let full = ev.truth_value(&box_translate(&phi, "j", false).formula).unwrap();
        let elided = ev.truth_value(&box_translate(&phi, "j", true).formula).unwrap();
        prop_assert_eq!(full, elided, "{}", phi);
        prop_assert_eq!(w.j.apply(full), full);
    }

    #[test]
    fn cyclic_ring_spectra(n in 2usize..=48) {
        let r = FinRing::zmod(n).unwrap();
        let k = prime_factors(n);
        prop_assert_eq!(r.is_reduced(), squarefree(n));
        prop_assert_eq!(r.radical_ideals().len(), 1 << k);
        prop_assert_eq!(r.filters().len(), k);
        prop_assert_eq!(r.prime_ideals().len(), k);
        let spec = spec_frame(&r);
        prop_assert_eq!(spec.frame().len(), 1 << k);
        prop_assert_eq!(spec.frame().points().len(), k);
        prop_assert_eq!(r.is_local(), k == 1);
    }
}
