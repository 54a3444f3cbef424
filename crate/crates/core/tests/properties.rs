use proptest::prelude::*;
use surface_threshold::decoder::{logical_error_rate, wilson_interval, DecoderMode};
use surface_threshold::eem::{EdgeSet, EdgeSigns, EffectiveParams};
use surface_threshold::layout::{CodeLayout, MechanismSet};
use surface_threshold::rbim::{
    diagonal_composites, enumerate_partition_function, BondDisorder, CellSpinLattice, FULL_FLIP,
};
use surface_threshold::rng;

fn disorder(width: usize, height: usize, p1: f64, p2: f64, seed: u64) -> BondDisorder {
    let params = EffectiveParams::new(p1, p2).unwrap();
    BondDisorder::sample_with(width, height, &params, &mut rng::stream(seed, &[0x5052_4F50], 0))
}

fn lattice(width: usize, height: usize, seed: u64) -> CellSpinLattice {
    CellSpinLattice::random(width, height, &mut rng::stream(seed, &[0x4C41_5454], 0))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn pair_moves_preserve_the_cell_constraint(
        seed in any::<u64>(),
        moves in prop::collection::vec((0usize..12, 0usize..6), 0..200),
    ) {
        let mut lat = lattice(4, 3, seed);
        for (cell, choice) in moves {
            lat.flip_pair(cell, choice).unwrap();
            prop_assert!(lat.constraint_holds());
        }
    }

    #[test]
    fn composites_are_signs(seed in any::<u64>()) {
        let lat = lattice(5, 5, seed);
        for c in 0..lat.num_cells() {
            let (u2, u3) = diagonal_composites(lat.spins(c));
            prop_assert!(u2 == 1 || u2 == -1);
            prop_assert!(u3 == 1 || u3 == -1);
        }
    }

    #[test]
    fn energy_is_gauge_invariant(
        seed in any::<u64>(),
        p1 in 0.01f64..0.45,
        p2 in 0.01f64..0.45,
        cells in prop::collection::vec(0usize..20, 1..10),
    ) {
        let mut b = disorder(5, 4, p1, p2, seed);
        let mut lat = lattice(5, 4, seed ^ 1);
        let before = b.energy(&lat).unwrap();
        for c in cells {
            b.gauge_flip(c);
            lat.set_code(c, lat.code(c) ^ FULL_FLIP);
        }
        prop_assert!((b.energy(&lat).unwrap() - before).abs() < 1e-10);
    }

    #[test]
    fn partition_function_is_gauge_invariant(
        seed in any::<u64>(),
        beta in 0.0f64..2.0,
        subset in 0u32..16,
    ) {
        let b = disorder(2, 2, 0.1, 0.1, seed);
        let mut g = b.clone();
        for c in 0..4 {
            if subset >> c & 1 == 1 {
                g.gauge_flip(c);
            }
        }
        let (a, z) = (enumerate_partition_function(&b, beta).unwrap(), enumerate_partition_function(&g, beta).unwrap());
        prop_assert!((a - z).abs() < 1e-10);
    }

    #[test]
    fn local_delta_matches_recomputation(seed in any::<u64>(), cell in 0usize..12, choice in 0usize..6) {
        let b = disorder(3, 4, 0.1, 0.05, seed);
        let lat = lattice(3, 4, seed);
        let delta = b.delta_energy(&lat, cell, choice).unwrap();
        let mut next = lat.clone();
        next.flip_pair(cell, choice).unwrap();
        prop_assert!((b.energy(&next).unwrap() - b.energy(&lat).unwrap() - delta).abs() < 1e-10);
    }

    /// Sign composites relate any two chains on any distance.
    #[test]
    fn composite_identity_on_random_chains(d in 2usize..7, seed in any::<u64>()) {
        let layout = CodeLayout::new(d).unwrap();
        let edges = EdgeSet::build(&layout);
        let params = EffectiveParams::new(0.05, 0.05).unwrap();
        let n_e = edges.sample_signs(&params, seed).indicators();
        let n_f = edges.sample_signs(&params, seed ^ 0xFF).indicators();
        let eta_e = EdgeSigns::from_indicators(&edges, &n_e).eta;
        let eta_f = EdgeSigns::from_indicators(&edges, &n_f).eta;
        for k in 0..edges.len() {
            let u: i8 = if n_e[k] != n_f[k] { -1 } else { 1 };
            prop_assert_eq!(eta_f[k], u * eta_e[k]);
            prop_assert_eq!(eta_e[k], 1 - 2 * n_e[k] as i8);
        }
    }

    #[test]
    fn indicators_and_syndromes_are_linear(d in 2usize..7, a in any::<u64>(), b in any::<u64>()) {
        let layout = CodeLayout::new(d).unwrap();
        let edges = EdgeSet::build(&layout);
        let ma = layout.sample_mechanisms(0.2, 0.2, a).unwrap();
        let mb = layout.sample_mechanisms(0.2, 0.2, b).unwrap();
        let sum = MechanismSet {
            single_fires: ma.single_fires.iter().zip(&mb.single_fires).map(|(x, y)| x ^ y).collect(),
            pair_fires: ma.pair_fires.iter().zip(&mb.pair_fires).map(|(x, y)| x ^ y).collect(),
        };
        let (na, nb, ns) = (edges.indicators(&ma), edges.indicators(&mb), edges.indicators(&sum));
        for k in 0..edges.len() {
            prop_assert_eq!(ns[k], na[k] ^ nb[k]);
        }
        let (sa, sb, ss) = (layout.syndrome(&ma).mask(), layout.syndrome(&mb).mask(), layout.syndrome(&sum).mask());
        prop_assert_eq!(ss, sa ^ sb);
    }

    #[test]
    fn stabilizers_never_change_the_class(d in 2usize..6, seed in any::<u64>(), which in any::<prop::sample::Index>()) {
        let layout = CodeLayout::new(d).unwrap();
        let m = layout.sample_mechanisms(0.25, 0.1, seed).unwrap();
        let z = m.net_support(&layout);
        let stab = &layout.z_stabilizers()[which.index(layout.z_stabilizers().len())];
        let mut w = z.clone();
        for &q in &stab.qubits {
            w[q] ^= true;
        }
        prop_assert_eq!(layout.syndrome_of(&w), layout.syndrome_of(&z));
        prop_assert_eq!(layout.logical_parity(&w), layout.logical_parity(&z));
    }

    #[test]
    fn sampling_is_deterministic(d in 2usize..8, seed in any::<u64>()) {
        let layout = CodeLayout::new(d).unwrap();
        prop_assert_eq!(layout.sample_mechanisms(0.1, 0.1, seed).unwrap(), layout.sample_mechanisms(0.1, 0.1, seed).unwrap());
        let params = EffectiveParams::new(0.1, 0.1).unwrap();
        prop_assert_eq!(BondDisorder::sample(d, &params, seed), BondDisorder::sample(d, &params, seed));
    }

    #[test]
    fn wilson_interval_contains_the_estimate(n in 1u64..100_000, frac in 0.0f64..=1.0) {
        let k = (frac * n as f64).round() as u64;
        let (lo, hi) = wilson_interval(k, n);
        let r = k as f64 / n as f64;
        prop_assert!(0.0 <= lo && lo <= r && r <= hi && hi <= 1.0);
    }
}

/// Failure counts do not depend on how trials are spread over threads.
#[test]
fn decoder_rates_are_independent_of_thread_count() {
    let run = |threads: usize| {
        rayon::ThreadPoolBuilder::new()
            .num_threads(threads)
            .build()
            .unwrap()
            .install(|| logical_error_rate(5, 0.03, DecoderMode::CorrelationAware, 4000, 17).unwrap())
    };
    let one = run(1);
    assert_eq!(one, run(3));
    assert!(one.failures > 0);
}
