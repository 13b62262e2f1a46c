mod common;

use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use common::{invariant_check, random_config, solo_isolation_check};

proptest! {
    #![proptest_config(ProptestConfig::with_cases(100))]

    #[test]
    fn world_invariants_hold(config_seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(config_seed);
        let base = random_config(&mut rng);
        for seed in 0..5 {
            let config = scrumsim::WorldConfig { seed, ..base.clone() };
            if let Err(msg) = invariant_check(&config) {
                prop_assert!(false, "{msg}\nconfig: {config}");
            }
        }
    }
}

#[test]
fn fixed_constants_keep_invariants() {
    for (sociable, curious) in [(false, false), (true, false), (false, true), (true, true)] {
        for seed in 0..5 {
            let config = scrumsim::WorldConfig {
                sociable,
                curious,
                seed,
                ..scrumsim::WorldConfig::default()
            };
            invariant_check(&config).unwrap();
        }
    }
}

#[test]
fn solo_runs_never_read_member_competence() {
    for seed in 0..10 {
        solo_isolation_check(seed).unwrap();
    }
}

#[test]
fn sociable_runs_do_read_members() {
    let config = scrumsim::WorldConfig {
        sociable: true,
        curious: true,
        seed: 3,
        ..scrumsim::WorldConfig::default()
    };
    let mut world = scrumsim::World::setup(&config).unwrap();
    world.run_to_end().unwrap();
    assert!(world.member_competence_reads() > 0);
}
