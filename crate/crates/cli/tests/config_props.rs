use euler_attractor::mproots::Precision;
use euler_attractor_cli::cache::cache_key;
use euler_attractor_cli::RunConfig;
use proptest::prelude::*;

proptest! {
    #[test]
    fn provenance_replays_to_the_same_config(
        seed in any::<u64>(),
        mu in 0u32..5,
        alpha in 0.34f64..0.49,
        tol_attr in 1e-3f64..1.0,
        tol_real in prop::option::of(1e-300f64..1e-3),
        bits in prop::option::of(64u32..4096),
    ) {
        let cfg = RunConfig {
            precision: bits.map_or(Precision::Auto, Precision::Bits),
            seed,
            mu,
            alpha,
            tol_attr,
            tol_real,
            ..RunConfig::default()
        };
        let mut replay = RunConfig::default();
        for (k, v) in cfg.provenance() {
            if k != "version" {
                replay.set(&k, &v).unwrap();
            }
        }
        prop_assert_eq!(replay, cfg);
    }

    #[test]
    fn cache_keys_are_injective(a in (1usize..500, 64u32..4096, any::<u64>()), b in (1usize..500, 64u32..4096, any::<u64>())) {
        prop_assert_eq!(a == b, cache_key(a.0, a.1, a.2) == cache_key(b.0, b.1, b.2));
    }
}
