use std::sync::Arc;

use proptest::prelude::*;
use toposforge::corpus::{self, FormulaGen, SHEAF_KINDS};
use toposforge::io;
use toposforge::suites::{self, Suite, SuiteConfig};
use toposforge_core::forcing::Evaluator;

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn space_files_round_trip(seed in any::<u64>()) {
        for s in corpus::spaces(&mut corpus::rng(seed), 6, 5) {
            let text = io::write_space(&s);
            let back = io::parse_space(&text).unwrap();
            prop_assert_eq!(back.opens(), s.opens());
            prop_assert_eq!(back.points(), s.points());
            prop_assert_eq!(io::write_space(&back), text);
        }
    }

    #[test]
    fn sheaf_files_round_trip(seed in any::<u64>()) {
        let mut rng = corpus::rng(seed);
        for s in corpus::spaces(&mut rng, 4, 4) {
            let frame = Arc::new(s.frame().clone());
            for kind in SHEAF_KINDS {
                let f = corpus::sheaf(&mut rng, &frame, kind, 3);
                let text = io::write_sheaf("F", "space", &f, |u| s.describe(u));
                let back = io::parse_sheaf(&text, &s).unwrap();
                for u in frame.elements() {
                    prop_assert_eq!(back.sheaf.num_sections(u), f.num_sections(u));
                }
                prop_assert_eq!(io::write_sheaf("F", "space", &back.sheaf, |u| s.describe(u)), text);
            }
        }
    }

    #[test]
    fn geometric_truth_spreads(seed in any::<u64>()) {
        let mut rng = corpus::rng(seed);
        let spaces = corpus::spaces(&mut rng, 3, 5);
        for s in &spaces {
            let env = corpus::environment(&mut rng, s);
            let phi = FormulaGen::new(&mut rng, true).formula(3, &[]);
            prop_assert!(phi.is_geometric());
            let frame = env.frame_arc().clone();
            let mut ev = Evaluator::new(&env);
            for u in frame.elements() {
                let mut everywhere = true;
                for &p in frame.irreducibles_below(u) {
                    everywhere &= ev.stalk_holds(&phi, p, &[]).unwrap();
                }
                prop_assert_eq!(ev.force(&phi, u).unwrap(), everywhere, "{}", phi);
            }
        }
    }

    #[test]
    fn reports_depend_only_on_the_seed(seed in any::<u64>()) {
        let cfg = SuiteConfig { seed, space_count: 4, max_points: 4, samples: 3, ..SuiteConfig::default() };
        for suite in [Suite::Locality, Suite::InferenceRules, Suite::BoxTheorem] {
            let a = suites::run(suite, &cfg).unwrap().to_string();
            let b = suites::run(suite, &cfg).unwrap().to_string();
            prop_assert_eq!(a, b);
        }
    }
}
