use super::*;
use crate::frame::{FiniteSpace, Nucleus};
use alloc::string::ToString;

fn frame_of(space: &FiniteSpace) -> Arc<Frame> {
    Arc::new(space.frame().clone())
}

fn names(xs: &[&str]) -> Vec<String> {
    xs.iter().map(|s| s.to_string()).collect()
}

#[test]
fn constant_sheaf_sections() {
    let s = frame_of(&FiniteSpace::sierpinski());
    let c = Sheaf::constant(s.clone(), &names(&["a", "b"]));
    assert_eq!((0..3).map(|u| c.num_sections(u)).collect::<Vec<_>>(), [1, 2, 2]);
    let d = frame_of(&FiniteSpace::discrete(2));
    let c = Sheaf::constant(d, &names(&["a", "b"]));
    assert_eq!((0..4).map(|u| c.num_sections(u)).collect::<Vec<_>>(), [1, 2, 2, 4]);
    assert!(c.is_flabby());
    assert_eq!(c.section_label(3, c.glue(3, &[0, 1]).unwrap()), "(a,b)");
}

fn two_point_presheaf(top: &[&str], left: &[&str], right: &[&str], to_left: Vec<usize>, to_right: Vec<usize>) -> Presheaf {
    let frame = frame_of(&FiniteSpace::discrete(2));
    let mut restrictions = BTreeMap::new();
    restrictions.insert((3, 1), to_left);
    restrictions.insert((3, 2), to_right);
    Presheaf { frame, sections: vec![names(&["*"]), names(left), names(right), names(top)], restrictions }
}

#[test]
fn check_sheaf_reports_covers() {
    let ok = two_point_presheaf(&["aa", "ab"], &["a"], &["a", "b"], vec![0, 0], vec![0, 1]);
    let sheaf = check_sheaf(&ok).unwrap();
    assert_eq!(sheaf.section_label(3, 1), "ab");
    assert_eq!(sheaf.restrict(3, 2, 1), 1);

    let unseparated = two_point_presheaf(&["s", "t"], &["a"], &["b"], vec![0, 0], vec![0, 0]);
    match check_sheaf(&unseparated) {
        Err(SheafError::NotSeparated { open, cover, .. }) => {
            assert_eq!(open, "{p0,p1}");
            assert_eq!(cover, names(&["{p0}", "{p1}"]));
        }
        other => panic!("{other:?}"),
    }

    let no_gluing = two_point_presheaf(&["s"], &["a", "b"], &["c"], vec![0], vec![0]);
    assert!(matches!(check_sheaf(&no_gluing), Err(SheafError::NoGluing { .. })));

    let mut bad = ok.clone();
    bad.sections[0].push("extra".to_string());
    assert_eq!(check_sheaf(&bad), Err(SheafError::BottomNotSingleton(2)));
}

#[test]
fn functoriality_is_checked() {
    let frame = frame_of(&FiniteSpace::sierpinski());
    let mut restrictions = BTreeMap::new();
    restrictions.insert((2, 1), vec![0, 1]);
    restrictions.insert((2, 0), vec![0, 0]);
    let pre = Presheaf { frame, sections: vec![names(&["*"]), names(&["a", "b"]), names(&["x", "y"])], restrictions };
    assert!(check_sheaf(&pre).is_ok());
    let mut missing = pre.clone();
    missing.restrictions.remove(&(2, 1));
    assert!(matches!(check_sheaf(&missing), Err(SheafError::MissingRestriction(..))));
}

#[test]
fn omega_counts_subopens() {
    for space in [FiniteSpace::sierpinski(), FiniteSpace::discrete(2), FiniteSpace::discrete(3)] {
        let frame = frame_of(&space);
        let omega = PowerSheaf::new(&Sheaf::terminal(frame.clone())).unwrap();
        for u in frame.elements() {
            assert_eq!(omega.sheaf().num_sections(u), frame.below(u).len());
            for &v in frame.below(u) {
                let s = omega.omega_section(u, v);
                assert_eq!(omega.omega_open(u, s), v);
            }
        }
    }
}

#[test]
fn power_object_and_subsheaves() {
    let frame = frame_of(&FiniteSpace::sierpinski());
    let c = Sheaf::constant(frame.clone(), &names(&["a", "b"]));
    let power = PowerSheaf::new(&c).unwrap();
    // Over {eta}: the 4 subsets of {a,b}. Over X: pairs G(X) ⊆ G(eta).
    assert_eq!(power.sheaf().num_sections(1), 4);
    assert_eq!(power.sheaf().num_sections(2), 9);
    let only_a = Subsheaf::from_germs(&c, vec![vec![true, false], vec![true, false]]).unwrap();
    let s = power.section_of_subsheaf(2, &only_a);
    assert_eq!(power.subsheaf_of_section(&c, s), only_a);
    assert!(power.member(&c, 2, 0, s));
    assert!(!power.member(&c, 2, 1, s));
    assert!(Subsheaf::from_germs(&c, vec![vec![false, false], vec![true, false]]).is_err());
    let sub_sheaf = only_a.to_sheaf(&c);
    assert_eq!(sub_sheaf.num_sections(2), 1);
}

#[test]
fn subsheaf_from_sections_checks_locality() {
    let frame = frame_of(&FiniteSpace::discrete(2));
    let c = Sheaf::constant(frame, &names(&["a", "b"]));
    let mut members = vec![vec![true], vec![true, false], vec![true, true], vec![false; 4]];
    for s in c.sections(3) {
        members[3][s] = c.germ(3, s, 1) == 0;
    }
    assert!(Subsheaf::from_sections(&c, members.clone()).is_ok());
    members[3][0] = false;
    assert!(matches!(Subsheaf::from_sections(&c, members), Err(SheafError::NotSubsheaf(_))));
}

#[test]
fn morphisms_must_be_natural() {
    let frame = frame_of(&FiniteSpace::sierpinski());
    let c = Sheaf::constant(frame.clone(), &names(&["a", "b"]));
    let swap = Morphism::from_germ_fn(&[&c], &c, |_, g| 1 - g[0]).unwrap();
    assert_eq!(swap.apply(&[&c], &c, 2, &[0]), 1);
    // Swapping only over X does not commute with restriction to {eta}.
    let top = c.irr_position(2).unwrap();
    assert!(Morphism::from_germ_fn(&[&c], &c, |pi, g| if pi == top { 1 - g[0] } else { g[0] }).is_err());
}

#[test]
fn sheafification_of_presheaf() {
    let unseparated = two_point_presheaf(&["s", "t"], &["a"], &["b"], vec![0, 0], vec![0, 0]);
    let frame = unseparated.frame.clone();
    let r = plus_construction(&unseparated, &Nucleus::identity(&frame)).unwrap();
    assert_eq!(r.sheaf.num_sections(3), 1);
    let no_gluing = two_point_presheaf(&["s"], &["a", "b"], &["c"], vec![0], vec![0]);
    let r = plus_construction(&no_gluing, &Nucleus::identity(&frame)).unwrap();
    assert_eq!(r.sheaf.num_sections(3), 2);
}

#[test]
fn sheafify_matches_plus_construction() {
    let space = FiniteSpace::sierpinski();
    let frame = frame_of(&space);
    let c = Sheaf::constant(frame.clone(), &names(&["a", "b"]));
    for j in [Nucleus::identity(&frame), Nucleus::double_negation(&frame), Nucleus::open(&frame, 1), Nucleus::closed(&frame, 1)] {
        let (direct, sub) = sheafify(&c, &j).unwrap();
        let plus = plus_construction(&c.to_presheaf(), &j).unwrap();
        for e in sub.frame().elements() {
            assert_eq!(direct.num_sections(e), plus.sheaf.num_sections(e), "{:?}", j.kind());
        }
        let back = transport_to_parent(&direct, &sub, &j, frame.clone()).unwrap();
        for u in frame.elements() {
            assert_eq!(back.num_sections(u), direct.num_sections(sub.from_parent(j.apply(u)).unwrap()));
        }
    }
}
