use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use surface_threshold::decoder::{
    blossom_pairing, decode, decode_with, estimate_decoder_threshold, logical_error_rate_with, run_trial,
    subset_dp_pairing, trial_mechanisms, DecoderMode, Matcher, MatchingGraph, MlDecoder, Pairing, RateEstimate,
    DEFECT_CAP, WEIGHT_SCALE,
};
use surface_threshold::{CodeLayout, Syndrome};

const MODES: [DecoderMode; 2] = [DecoderMode::Iid, DecoderMode::CorrelationAware];

/// Minimum pairing weight by trying every pairing (with boundary options).
fn exhaustive_weight(g: &MatchingGraph, defects: &[usize]) -> f64 {
    fn go(g: &MatchingGraph, rest: &[usize]) -> f64 {
        let Some((&first, tail)) = rest.split_first() else {
            return 0.0;
        };
        let mut best = g.distance(first, g.boundary_node()) + go(g, tail);
        for k in 0..tail.len() {
            let mut others = tail.to_vec();
            let partner = others.remove(k);
            best = best.min(g.distance(first, partner) + go(g, &others));
        }
        best
    }
    go(g, defects)
}

fn random_syndrome(layout: &CodeLayout, max_defects: usize, rng: &mut ChaCha8Rng) -> Syndrome {
    let n = layout.x_stabilizers().len();
    let k = rng.gen_range(0..=max_defects);
    let mut picked: Vec<usize> = rand::seq::index::sample(rng, n, k).into_vec();
    picked.sort_unstable();
    Syndrome(picked)
}

fn check_pairing(g: &MatchingGraph, layout: &CodeLayout, s: &Syndrome, pairing: &Pairing) {
    let mut seen = vec![0; s.len()];
    for &(i, j) in pairing {
        seen[i] += 1;
        if let Some(j) = j {
            seen[j] += 1;
        }
    }
    assert!(seen.iter().all(|&c| c == 1), "every defect used once");
    assert_eq!(layout.syndrome_of(&g.correction(s, pairing)), *s);
}

#[test]
fn blossom_and_subset_dp_match_exhaustive_search() {
    let layout = CodeLayout::new(5).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    for mode in MODES {
        let g = MatchingGraph::build(&layout, 0.02, 0.03, mode).unwrap();
        for _ in 0..300 {
            let s = random_syndrome(&layout, 8, &mut rng);
            let exact = exhaustive_weight(&g, s.defects());
            let dp = subset_dp_pairing(&g, &s).unwrap();
            let bl = blossom_pairing(&g, &s).unwrap();
            check_pairing(&g, &layout, &s, &dp);
            check_pairing(&g, &layout, &s, &bl);
            assert!((g.pairing_weight(&s, &dp) - exact).abs() < 1e-9);
            // Integer rounding can only cost half a unit per matched edge.
            let slack = s.len() as f64 / WEIGHT_SCALE;
            assert!(g.pairing_weight(&s, &bl) <= exact + slack, "{mode:?} {:?}", s.0);
        }
    }
}

#[test]
fn blossom_agrees_with_subset_dp_on_larger_syndromes() {
    let layout = CodeLayout::new(7).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(12);
    let g = MatchingGraph::build(&layout, 0.03, 0.03, DecoderMode::CorrelationAware).unwrap();
    for _ in 0..30 {
        let s = random_syndrome(&layout, 16, &mut rng);
        let dp = g.pairing_weight(&s, &subset_dp_pairing(&g, &s).unwrap());
        let bl = g.pairing_weight(&s, &blossom_pairing(&g, &s).unwrap());
        assert!((dp - bl).abs() <= s.len() as f64 / WEIGHT_SCALE);
    }
}

#[test]
fn subset_dp_signals_over_capacity() {
    let layout = CodeLayout::new(7).unwrap();
    let g = MatchingGraph::build(&layout, 0.03, 0.03, DecoderMode::Iid).unwrap();
    let s = Syndrome((0..=DEFECT_CAP).collect());
    assert!(matches!(subset_dp_pairing(&g, &s), Err(surface_threshold::Error::Capacity(_))));
}

#[test]
fn corrections_reproduce_sampled_syndromes() {
    let layout = CodeLayout::new(7).unwrap();
    for mode in MODES {
        let g = MatchingGraph::build(&layout, 0.04, 0.04, mode).unwrap();
        for t in 0..500 {
            let mech = trial_mechanisms(&layout, 0.04, 0.04, 3, t).unwrap();
            // run_trial asserts the syndrome identity itself.
            let trial = run_trial(&layout, &g, mech, Matcher::Blossom).unwrap();
            assert_eq!(layout.syndrome_of(&trial.correction), trial.syndrome);
        }
    }
}

#[test]
fn decoding_is_invariant_under_weight_scaling() {
    let layout = CodeLayout::new(5).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(13);
    for mode in MODES {
        let g = MatchingGraph::build(&layout, 0.02, 0.04, mode).unwrap();
        let scaled = g.scaled(3.7);
        for _ in 0..100 {
            let s = random_syndrome(&layout, 10, &mut rng);
            let a = g.pairing_weight(&s, &subset_dp_pairing(&g, &s).unwrap());
            let b = g.pairing_weight(&s, &subset_dp_pairing(&scaled, &s).unwrap());
            assert!((a - b).abs() < 1e-9);
            let c = decode(&scaled, &s).unwrap();
            assert_eq!(layout.syndrome_of(&c), s);
        }
    }
}

#[test]
fn two_adjacent_defects_use_the_shared_qubit() {
    let layout = CodeLayout::new(5).unwrap();
    let g = MatchingGraph::build(&layout, 0.01, 0.01, DecoderMode::Iid).unwrap();
    for q in 0..layout.num_qubits() {
        let stabs = layout.qubit_x_stabs(q);
        if stabs.len() != 2 {
            continue;
        }
        let s = Syndrome(stabs.to_vec());
        let c = decode(&g, &s).unwrap();
        let flipped: Vec<usize> = (0..c.len()).filter(|&i| c[i]).collect();
        assert_eq!(flipped, vec![q]);
    }
}

#[test]
fn pair_free_noise_gives_identical_rates() {
    for d in [3, 5] {
        let a = logical_error_rate_with(d, 0.06, 0.0, DecoderMode::Iid, 3000, 8, Matcher::Blossom).unwrap();
        let b = logical_error_rate_with(d, 0.06, 0.0, DecoderMode::CorrelationAware, 3000, 8, Matcher::Blossom).unwrap();
        assert_eq!(a.failures, b.failures);
    }
}

#[test]
fn subset_dp_discards_are_counted() {
    let r = logical_error_rate_with(9, 0.07, 0.07, DecoderMode::Iid, 40, 4, Matcher::SubsetDp).unwrap();
    assert!(r.discards > 0);
    assert_eq!(r.trials, 40);
    assert!(r.failures + r.discards <= 40);
}

#[test]
fn correlation_aware_beats_iid_near_threshold() {
    for d in [5, 7] {
        let iid = logical_error_rate_with(d, 0.02, 0.02, DecoderMode::Iid, 20_000, 21, Matcher::Blossom).unwrap();
        let cor =
            logical_error_rate_with(d, 0.02, 0.02, DecoderMode::CorrelationAware, 20_000, 21, Matcher::Blossom).unwrap();
        assert!(cor.failures < iid.failures, "d = {d}: {} vs {}", cor.failures, iid.failures);
    }
}

/// Paired trials: maximum likelihood never loses to matching in aggregate.
fn ml_vs_matching(p: f64, trials: u64) -> (u64, u64, u64) {
    let layout = CodeLayout::new(3).unwrap();
    let ml = MlDecoder::new(&layout, p, p).unwrap();
    let g = MatchingGraph::build(&layout, p, p, DecoderMode::CorrelationAware).unwrap();
    let gi = MatchingGraph::build(&layout, p, p, DecoderMode::Iid).unwrap();
    let (mut ml_fail, mut mw_fail, mut iid_fail) = (0, 0, 0);
    for t in 0..trials {
        let mech = trial_mechanisms(&layout, p, p, 17, t).unwrap();
        let error = mech.net_support(&layout);
        let s = layout.syndrome_of(&error);
        ml_fail += (ml.decode(&s).unwrap() != layout.logical_parity(&error)) as u64;
        mw_fail += !run_trial(&layout, &g, mech.clone(), Matcher::Blossom).unwrap().success as u64;
        iid_fail += !run_trial(&layout, &gi, mech, Matcher::Blossom).unwrap().success as u64;
    }
    (ml_fail, mw_fail, iid_fail)
}

#[test]
fn maximum_likelihood_beats_matching_on_paired_trials() {
    let (ml, mw, iid) = ml_vs_matching(0.03, 100_000);
    assert!(ml <= mw && ml <= iid, "ml {ml}, matching {mw}, iid {iid}");
}

/// At high noise the sampled failure counts are dominated by noise, so the
/// comparison uses each syndrome's exact conditional success probability.
#[test]
fn maximum_likelihood_is_optimal_per_syndrome() {
    let layout = CodeLayout::new(3).unwrap();
    let p = 0.45;
    let table = surface_threshold::eem::mechanism_coset_table(&layout, p, p).unwrap();
    let ml = MlDecoder::new(&layout, p, p).unwrap();
    for mode in MODES {
        let g = MatchingGraph::build(&layout, p, p, mode).unwrap();
        let (mut ml_success, mut mw_success) = (0.0, 0.0);
        for t in 0..20_000 {
            let mech = trial_mechanisms(&layout, p, p, 19, t).unwrap();
            let s = layout.syndrome(&mech);
            let sums = table.get(&s).unwrap();
            let ml_p = sums.success_given(ml.decode(&s).unwrap());
            let mw_p = sums.success_given(layout.logical_parity(&decode(&g, &s).unwrap()));
            assert!(ml_p >= mw_p - 1e-12);
            ml_success += ml_p;
            mw_success += mw_p;
        }
        assert!(ml_success >= mw_success);
    }
}

#[test]
fn ml_matches_matching_on_unambiguous_syndromes() {
    let layout = CodeLayout::new(3).unwrap();
    let g = MatchingGraph::build(&layout, 0.001, 0.001, DecoderMode::CorrelationAware).unwrap();
    let ml = MlDecoder::new(&layout, 0.001, 0.001).unwrap();
    for q in 0..layout.num_qubits() {
        let mut z = vec![false; layout.num_qubits()];
        z[q] = true;
        let s = layout.syndrome_of(&z);
        let c = decode_with(&g, &s, Matcher::SubsetDp).unwrap();
        let residual: Vec<bool> = z.iter().zip(&c).map(|(a, b)| a ^ b).collect();
        assert!(!layout.logical_parity(&residual));
        assert_eq!(ml.decode(&s).unwrap(), layout.logical_parity(&z));
    }
}

fn planted(d: usize, p: f64, p_th: f64, mode: DecoderMode) -> RateEstimate {
    // Failure rate (p / p_th)^((d + 1) / 2) scaled so every size meets at p_th.
    let rate = 0.1 * (p / p_th).powf((d + 1) as f64 / 2.0);
    let trials = 1_000_000;
    let failures = (rate * trials as f64).round() as u64;
    RateEstimate {
        d,
        p,
        mode,
        trials,
        failures,
        discards: 0,
        rate,
        ci_low: rate,
        ci_high: rate,
    }
}

#[test]
fn planted_crossing_is_recovered_within_a_grid_step() {
    let grid: Vec<f64> = (0..11).map(|i| 0.010 + 0.0025 * i as f64).collect();
    let rates: Vec<RateEstimate> = [5, 7, 9]
        .iter()
        .flat_map(|&d| grid.iter().map(move |&p| planted(d, p, 0.0213, DecoderMode::Iid)))
        .collect();
    let t = estimate_decoder_threshold(&rates).unwrap();
    assert!((t.p_th - 0.0213).abs() < 0.0025, "{t:?}");
    assert_eq!(t.crossings.len(), 3);

    let below: Vec<RateEstimate> = rates.iter().filter(|r| r.p < 0.02).cloned().collect();
    assert!(estimate_decoder_threshold(&below).is_err());
}
