use super::statements::*;
use super::*;
use crate::finring::FinModule;
use crate::forcing::{Binding, Evaluator};
use crate::formula::{parse, Sort};

fn zmod(n: usize) -> FinRing {
    FinRing::zmod(n).unwrap()
}

fn el(ring: &FinRing, label: &str) -> usize {
    ring.element(label).unwrap()
}

#[test]
fn z12_frame_and_points() {
    let r = zmod(12);
    let spec = spec_frame(&r);
    assert_eq!(spec.frame().len(), 4);
    let labels: Vec<&str> = spec.frame().elements().map(|e| spec.frame().label(e)).collect();
    assert_eq!(labels, ["(6)", "(3)", "(2)", "(1)"]);
    assert_eq!(spec.frame().bottom(), spec.element(r.nilradical()).unwrap());
    assert_eq!(spec.ideal(spec.frame().top()), r.full());
    let space = spec_space(&spec).unwrap();
    assert_eq!(space.space.num_points(), 2);
    assert_eq!(spec.frame().points().len(), 2);
}

#[test]
fn one_point_and_empty_spectra() {
    let spec = spec_frame(&zmod(4));
    assert_eq!(spec.frame().len(), 2);
    assert_eq!(spec_space(&spec).unwrap().space.num_points(), 1);
    let zero = zmod(1);
    let spec = spec_frame(&zero);
    assert_eq!(spec.frame().len(), 1);
    assert_eq!(spec_space(&spec).unwrap().space.num_points(), 0);
    let f4 = FinRing::polyquot(2, &[1, 1, 1]).unwrap();
    assert_eq!(spec_space(&spec_frame(&f4)).unwrap().space.num_points(), 1);
}

#[test]
fn joins_are_radicals_of_sums() {
    for r in [zmod(12), zmod(30), FinRing::product(&zmod(4), &zmod(4)).unwrap()] {
        let spec = spec_frame(&r);
        let f = spec.frame();
        for a in f.elements() {
            for b in f.elements() {
                let sum = r.radical(r.ideal_generated(spec.ideal(a) | spec.ideal(b)));
                assert_eq!(spec.ideal(f.join(a, b)), sum);
                assert_eq!(spec.ideal(f.meet(a, b)), spec.ideal(a) & spec.ideal(b));
            }
        }
    }
}

#[test]
fn structure_sheaf_sections() {
    let r = zmod(12);
    let sp = SpecEnvironment::new(&r).unwrap();
    let o = &sp.structure.sheaf;
    let top = sp.spec.frame().top();
    assert_eq!(o.num_sections(top), 12);
    // The point for the prime (2) has stalk ℤ/4; D(2) is the point for (3),
    // where the sections form ℤ/3.
    let irr = sp.spec.frame().irreducibles().to_vec();
    let at_2 = irr.iter().position(|&p| sp.spec.invertible_on(p) & bit(2) == 0).unwrap();
    assert_eq!(sp.structure.stalks[at_2].ring.len(), 4);
    assert_eq!(o.num_sections(sp.spec.d(2)), 3);
    assert_eq!(o.num_sections(sp.spec.d(3)), 4);
}

#[test]
fn generic_filter_membership() {
    let r = zmod(12);
    let sp = SpecEnvironment::new(&r).unwrap();
    let u = sp.spec.d(2);
    let four = sp.filter.constant_section(u, el(&r, "4"));
    let mut ev = Evaluator::new(sp.environment());
    let b = [Binding::new("x", Sort::named("A"), u, four)];
    assert!(ev.force_with(&parse("x in Fil").unwrap(), u, &b).unwrap());
    for (pi, &p) in sp.spec.frame().irreducibles().iter().enumerate() {
        let prime = r.full() & !sp.spec.invertible_on(p);
        let admitted = sp.filter.filter.germ_sets()[pi].iter().filter(|&&g| g).count();
        assert_eq!(admitted, r.len() - prime.count_ones() as usize);
    }
    assert!(sp.holds(FILTER_AXIOMS).unwrap());
}

#[test]
fn internal_ring_properties_of_z12() {
    let sp = SpecEnvironment::new(&zmod(12)).unwrap();
    for text in [INV_DEFINED, INV_CHARACTERIZED, NILP_DEFINED, NILP_CHARACTERIZED, LOCAL, NONUNIT_NILPOTENT, KRULL_DIM_ZERO] {
        assert!(sp.holds(text).unwrap(), "{text}");
    }
    assert!(sp.holds(NONUNIT_NILPOTENT_EXPLICIT).unwrap());
    assert!(!sp.holds(FIELD).unwrap());
    assert!(!sp.holds(REDUCED).unwrap());
    let sp = SpecEnvironment::new(&zmod(6)).unwrap();
    assert!(sp.holds(FIELD).unwrap());
    assert!(sp.holds(REDUCED).unwrap());
}

#[test]
fn tilde_stalks() {
    let r = zmod(12);
    let mut sp = SpecEnvironment::new(&r).unwrap();
    let m = FinModule::quotient(&r, r.ideal_generated(bit(2))).unwrap();
    sp.add_module("M", &m).unwrap();
    let t = sp.tilde("M").unwrap();
    let irr = sp.spec.frame().irreducibles().to_vec();
    for (pi, &p) in irr.iter().enumerate() {
        let at_2 = sp.spec.invertible_on(p) & bit(2) == 0;
        assert_eq!(t.stalks[pi].module.len(), if at_2 { 2 } else { 1 });
    }
    assert!(!sp.holds(&module_zero("M")).unwrap());
    assert!(sp.holds(&module_generated("M", 1)).unwrap());

    let regular = FinModule::regular(&r);
    sp.add_module("R", &regular).unwrap();
    let t = sp.tilde("R").unwrap();
    for u in sp.spec.frame().elements() {
        assert_eq!(t.sheaf.num_sections(u), sp.structure.sheaf.num_sections(u));
    }
    let zero = FinModule::zero_module(&r);
    sp.add_module("Z", &zero).unwrap();
    assert!(sp.holds(&module_zero("Z")).unwrap());
}

#[test]
fn generic_metaproperty_examples() {
    let r = zmod(12);
    let sp = SpecEnvironment::new(&r).unwrap();
    let ann6 = parse("6*x = 0").unwrap();
    let report = check_generic_metaproperty(&sp, "x", &ann6).unwrap();
    assert!(report.passed(), "{report}");
    let unit = parse("x = x").unwrap();
    assert!(check_generic_metaproperty(&sp, "x", &unit).unwrap().passed());
    let principal = parse("exists b:A. x = b*2").unwrap();
    assert!(check_generic_metaproperty(&sp, "x", &principal).unwrap().passed());
    assert!(!check_stronger_metaproperty(&sp, "x", &principal, r.one()).unwrap());
    assert!(check_stronger_metaproperty(&sp, "x", &unit, r.one()).unwrap());
    let bad = parse("x in Fil").unwrap();
    assert!(matches!(check_generic_metaproperty(&sp, "x", &bad), Err(SpectrumError::NonConstantParameter(_))));
}

#[test]
fn quasicoherence_of_submodules() {
    let r = zmod(12);
    let mut sp = SpecEnvironment::new(&r).unwrap();
    let m = FinModule::regular(&r);
    sp.add_module("M", &m).unwrap();
    let n = sp.tilde_submodule("M", r.ideal_generated(bit(2))).unwrap();
    assert!(check_internal_quasicoherence(&sp, "M", &n).unwrap().holds);
    let zero = sp.tilde_submodule("M", bit(r.zero())).unwrap();
    assert!(check_internal_quasicoherence(&sp, "M", &zero).unwrap().holds);
    // Every open of a finite spectrum is closed as well, so extension by
    // zero stays quasicoherent.
    let j = sp.tilde("M").unwrap().extension_by_zero(sp.spec.d(2)).unwrap();
    assert!(check_internal_quasicoherence(&sp, "M", &j).unwrap().holds);
}

#[test]
fn local_spectra() {
    let z4 = zmod(4);
    let id: Vec<usize> = z4.elements().collect();
    let l = local_spectrum_frame(&z4, &z4, &id).unwrap();
    assert_eq!(l.frame.len(), 2);
    assert_eq!(l.num_points(), 1);

    let a = FinRing::product(&z4, &z4).unwrap();
    let diag: Vec<usize> = z4.elements().map(|x| a.element(&alloc::format!("({},{})", z4.label(x), z4.label(x))).unwrap()).collect();
    let l = local_spectrum_frame(&z4, &a, &diag).unwrap();
    assert_eq!(l.frame.len(), 4);
    assert_eq!(l.num_points(), 2);
    assert_eq!(l.relative.filters_over_units().len(), 2);
    l.relative.nucleus().unwrap();

    let z6 = zmod(6);
    let id6: Vec<usize> = z6.elements().collect();
    assert!(matches!(local_spectrum_frame(&z6, &z6, &id6), Err(SpectrumError::NotLocal)));
    let f2 = zmod(2);
    let l = local_spectrum_frame(&f2, &f2, &[0, 1]).unwrap();
    assert_eq!(l.num_points(), 1);
}

#[test]
fn module_maps() {
    let r = zmod(12);
    let mut sp = SpecEnvironment::new(&r).unwrap();
    let m = FinModule::regular(&r);
    let q = FinModule::quotient(&r, r.ideal_generated(bit(3))).unwrap();
    sp.add_module("M", &m).unwrap();
    sp.add_module("N", &q).unwrap();
    let one = q.element("[1]").unwrap();
    let table: Vec<usize> = m.elements().map(|x| q.act(x, one)).collect();
    sp.add_module_map("p", "M", "N", &crate::finring::LinearMap { table }).unwrap();
    assert!(sp.holds(&surjective("p", "M", "N")).unwrap());
    assert!(!sp.holds(&injective("p", "M")).unwrap());
    let three = el(&r, "3");
    let table: Vec<usize> = m.elements().map(|x| r.mul(x, three)).collect();
    sp.add_module_map("t", "M", "M", &crate::finring::LinearMap { table }).unwrap();
    assert!(!sp.holds(&injective("t", "M")).unwrap());
    assert!(!sp.holds(&surjective("t", "M", "M")).unwrap());
}
