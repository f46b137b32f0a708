use super::*;

fn z(n: usize) -> FinRing {
    FinRing::zmod(n).unwrap()
}

/// Independent oracle: every subset closed under the ideal axioms.
fn brute_ideals(a: &FinRing) -> Vec<Subset> {
    let mut v: Vec<Subset> = (0..1u64 << a.len()).filter(|&s| a.is_ideal(s)).collect();
    v.sort_by_key(|&m| (m.count_ones(), m));
    v
}

fn brute_filters(a: &FinRing) -> Vec<Subset> {
    let mut v: Vec<Subset> = (0..1u64 << a.len()).filter(|&s| a.is_filter(s)).collect();
    v.sort_by_key(|&m| (m.count_ones(), m));
    v
}

fn multiples(a: &FinRing, g: usize) -> Subset {
    a.subset(|x| a.elements().any(|r| a.mul(r, g) == x))
}

#[test]
fn z12_ideals_and_radicals() {
    let a = z(12);
    let ideals = a.ideals();
    assert_eq!(ideals, brute_ideals(&a));
    assert_eq!(ideals.len(), 6);
    let radicals = a.radical_ideals();
    let expected: Vec<Subset> = [6, 2, 3, 1].iter().map(|&g| multiples(&a, g)).collect();
    let mut expected_sorted = expected.clone();
    expected_sorted.sort_by_key(|&m| (m.count_ones(), m));
    assert_eq!(radicals, expected_sorted);
    assert_eq!(a.radical(multiples(&a, 4)), multiples(&a, 2));
}

#[test]
fn field_has_two_ideals() {
    let f4 = FinRing::polyquot(2, &[1, 1, 1]).unwrap();
    assert_eq!(f4.len(), 4);
    assert_eq!(f4.ideals().len(), 2);
    assert!(f4.elements().filter(|&x| x != f4.zero()).all(|x| f4.is_invertible(x)));
    assert!(f4.is_field());
    assert_eq!(f4.filters().len(), 1);
}

#[test]
fn filters_match_brute_force() {
    for n in [2, 3, 4, 6, 8, 9, 12] {
        let a = z(n);
        assert_eq!(a.filters(), brute_filters(&a), "zmod {n}");
    }
    let a = z(12);
    let f = a.filters();
    assert_eq!(f.len(), 2);
    let comp2 = a.full() & !multiples(&a, 2);
    let comp3 = a.full() & !multiples(&a, 3);
    assert!(f.contains(&comp2) && f.contains(&comp3));
    assert_eq!(z(4).filters(), vec![bit(1) | bit(3)]);
}

#[test]
fn filters_are_prime_complements() {
    for spec in ["zmod 12", "zmod 8", "product (zmod 2) (zmod 2)", "product (zmod 4) (zmod 2)"] {
        let a = RingSpec::parse(spec).unwrap().build().unwrap();
        let mut comps: Vec<Subset> = a.prime_ideals().iter().map(|&p| a.full() & !p).collect();
        comps.sort_by_key(|&m| (m.count_ones(), m));
        assert_eq!(a.filters(), comps, "{spec}");
    }
}

#[test]
fn crt_isomorphism() {
    let p = FinRing::product(&z(2), &z(3)).unwrap();
    let iso = p.isomorphism(&z(6)).expect("ℤ/2 × ℤ/3 ≅ ℤ/6");
    assert!(p.is_hom(&z(6), &iso));
    assert!(z(4).isomorphism(&FinRing::product(&z(2), &z(2)).unwrap()).is_none());
}

#[test]
fn localizations() {
    let a = z(12);
    let at2 = a.localize(bit(2));
    assert_eq!(at2.ring.len(), 3);
    let units = a.localize(a.units());
    assert!(units.ring.isomorphism(&a).is_some());
    assert!(a.is_hom(&units.ring, &units.map));
    assert_eq!(a.localize(bit(0)).ring.len(), 1);
    // Localizing at a prime complement gives a local ring.
    for p in a.prime_ideals() {
        let loc = a.localize(a.full() & !p);
        assert_eq!(loc.ring.maximal_ideals().len(), 1);
    }
}

#[test]
fn nilpotent_and_invertible() {
    let a = z(12);
    assert!(a.is_nilpotent(6));
    assert!(a.is_invertible(1));
    assert!(!a.is_nilpotent(2) && !a.is_invertible(2));
}

#[test]
fn krull_dimension() {
    let a = z(12);
    let r = a.krull_dim_leq(0);
    assert!(r.holds);
    assert!(a.is_complementary(&[2], &[3]));
    assert!(r.witnesses.iter().any(|(x, _)| x == &vec![2]));
    assert!(z(1).krull_dim_leq(-1).holds);
    assert!(!a.krull_dim_leq(-1).holds);
    let f = z(5);
    assert!(f.is_complementary(&[0], &[1]));
    for x in 1..5 {
        assert!(f.is_complementary(&[x], &[0]));
    }
    assert_eq!(a.chain_dimension(), 0);
    assert_eq!(z(1).chain_dimension(), -1);
}

#[test]
fn kronecker_identity_on_witnesses() {
    for n in [4, 6, 12] {
        let a = z(n);
        for (seq, comp) in a.krull_dim_leq(0).witnesses {
            for x in a.elements() {
                let lhs = a.radical(a.ideal_generated(bit(x) | bit(seq[0])));
                let rhs = a.radical(a.ideal_generated(bit(a.sub(seq[0], a.mul(x, comp[0])))));
                assert_eq!(lhs, rhs);
            }
        }
    }
}

#[test]
fn polynomial_quotient_requires_monic() {
    assert_eq!(FinRing::polyquot(3, &[1, 1, 2]), Err(RingError::NotMonic));
    assert_eq!(FinRing::polyquot(2, &[1]), Err(RingError::NotMonic));
}
