mod oracle;

use std::collections::BTreeMap;

use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use truthkit::eval::holds;
use truthkit::syntax::ecl;
use truthkit::syntax::enumerate::random_formula;
use truthkit::{parse, stage, Formula, HfSet, Var};

fn vars() -> [Var; 3] {
    [Var::new("x"), Var::new("y"), Var::new("z")]
}

fn consts() -> Vec<HfSet> {
    (0..4).map(HfSet::from_code).collect()
}

#[test]
fn ten_thousand_formulas_render_and_parse_back() {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    let (vars, consts) = (vars(), consts());
    for _ in 0..10_000 {
        let f = random_formula(&mut rng, &vars, &consts, 6);
        assert_eq!(parse(&f.render()).unwrap(), f, "{f}");
        assert_eq!(Formula::decode(&f.code()).unwrap(), f, "{f}");
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn evaluator_agrees_with_oracle(seed in any::<u64>(), depth in 1u32..6) {
        let m = stage(3).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let s = ecl(&random_formula(&mut rng, &vars(), &consts(), depth));
        let naive = oracle::Oracle::new(&m).sat(&s, &BTreeMap::new());
        prop_assert_eq!(holds(&m, &s).unwrap(), naive);
    }

    #[test]
    fn negation_flips_truth(seed in any::<u64>()) {
        let m = stage(2).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let s = ecl(&random_formula(&mut rng, &vars(), &consts()[..2], 5));
        prop_assert_ne!(holds(&m, &s).unwrap(), holds(&m, &Formula::not(s.clone())).unwrap());
    }
}
