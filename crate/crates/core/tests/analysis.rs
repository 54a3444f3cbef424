use rand::Rng;
use rand_chacha::ChaCha8Rng;
use surface_threshold::analysis::{
    correlation_length, find_crossing, k_min, lattice_spins, susceptibility, xi_curves, ObservableSeries, Verdict,
    XiCurve, CROSSING_Z,
};
use surface_threshold::rbim::CellSpinLattice;
use surface_threshold::rng;

const NU: f64 = 1.5;
const T_C: f64 = 0.95;

fn temperatures() -> Vec<f64> {
    (0..11).map(|i| 0.7 + 0.05 * i as f64).collect()
}

/// `xi / L = f(L^(1/nu) (T - T_c))`, decreasing in `T`.
fn scaling(l: usize, t: f64) -> f64 {
    0.5 - 0.3 * (0.8 * (l as f64).powf(1.0 / NU) * (t - T_C)).tanh()
}

/// Per-sample susceptibilities whose disorder mean reproduces `xi_over_l`,
/// with multiplicative noise of relative size `noise`.
fn synthetic_series(l: usize, samples: usize, noise: f64, xi_over_l: impl Fn(f64) -> f64, rng: &mut ChaCha8Rng) -> ObservableSeries {
    let temps = temperatures();
    let scale = 2.0 * (k_min(l) / 2.0).sin();
    let mut chi0 = Vec::new();
    let mut chik = Vec::new();
    for _ in 0..samples {
        let factor = 1.0 + noise * (2.0 * rng.gen::<f64>() - 1.0);
        let c0: Vec<f64> = temps.iter().map(|_| 10.0 * factor).collect();
        let ck = temps
            .iter()
            .map(|&t| {
                let xi = xi_over_l(t) * l as f64;
                10.0 / (1.0 + (scale * xi).powi(2)) * (1.0 + noise * (2.0 * rng.gen::<f64>() - 1.0))
            })
            .collect();
        chi0.push(c0);
        chik.push(ck);
    }
    ObservableSeries {
        p: 0.03,
        l,
        temperatures: temps,
        chi0,
        chik,
    }
}

fn scaling_curves(seed: u64, samples: usize) -> Vec<XiCurve> {
    let mut rng = rng::stream(seed, &[0x5343_414C], 0);
    let series: Vec<ObservableSeries> = [8, 12, 16]
        .iter()
        .map(|&l| synthetic_series(l, samples, 0.05, |t| scaling(l, t), &mut rng))
        .collect();
    xi_curves(&series, 1000, seed).unwrap()
}

#[test]
fn ornstein_zernike_correlation_length_is_recovered() {
    for l in [16, 24, 32, 64] {
        for xi_true in [1.5, 3.0, 6.0] {
            let chi = |k: f64| 1.0 / (k * k + 1.0 / (xi_true * xi_true));
            let xi = correlation_length(chi(0.0), chi(k_min(l)), l).unwrap().xi;
            assert!((xi / xi_true - 1.0).abs() < 0.02, "L = {l}, xi* = {xi_true}: {xi}");
        }
    }
}

#[test]
fn scaling_curves_cross_at_the_critical_temperature() {
    let mut rng = rng::stream(1, &[0x5343_414C], 0);
    let series: Vec<ObservableSeries> = [8, 12, 16]
        .iter()
        .map(|&l| synthetic_series(l, 200, 0.001, |t| scaling(l, t), &mut rng))
        .collect();
    let r = find_crossing(&xi_curves(&series, 1000, 1).unwrap(), CROSSING_Z);
    assert_eq!(r.verdict, Verdict::Crossing);
    let (t_c, err) = r.t_c.unwrap();
    assert!((t_c - T_C).abs() <= err, "T_c = {t_c} +- {err}");
}

/// Over independent noisy ensembles the quoted error is calibrated: about
/// two thirds land within one error of the truth, nearly all within two.
#[test]
fn crossing_errors_are_calibrated() {
    let (mut within1, mut within2, mut crossings) = (0, 0, 0);
    for seed in 0..40 {
        let r = find_crossing(&scaling_curves(seed, 200), CROSSING_Z);
        let Some((t_c, err)) = r.t_c else { continue };
        crossings += 1;
        let z = (t_c - T_C).abs() / err;
        within1 += (z <= 1.0) as u32;
        within2 += (z <= 2.0) as u32;
        assert!(temperatures()[0] <= t_c && t_c <= temperatures()[10]);
    }
    assert!(crossings >= 32, "{crossings} crossings out of 40");
    let (f1, f2) = (within1 as f64 / crossings as f64, within2 as f64 / crossings as f64);
    assert!(f1 >= 0.5 && f2 >= 0.85, "within 1 sigma {f1}, within 2 sigma {f2}");
}

#[test]
fn ordered_parallel_curves_do_not_cross() {
    let mut rng = rng::stream(4, &[0x5041_5241], 0);
    // Smaller sizes sit above everywhere, as above the threshold.
    let series: Vec<ObservableSeries> = [8, 12, 16]
        .iter()
        .map(|&l| synthetic_series(l, 200, 0.05, move |t| 0.4 - 0.1 * t - 0.002 * l as f64, &mut rng))
        .collect();
    let curves = xi_curves(&series, 1000, 4).unwrap();
    assert_eq!(find_crossing(&curves, CROSSING_Z).verdict, Verdict::NoCrossing);
    assert_eq!(find_crossing(&curves[..1], CROSSING_Z).verdict, Verdict::Inconclusive);
}

#[test]
fn verdict_ignores_order_and_common_error_scale() {
    let curves = scaling_curves(5, 100);
    let base = find_crossing(&curves, CROSSING_Z);
    let mut reversed = curves.clone();
    reversed.reverse();
    assert_eq!(find_crossing(&reversed, CROSSING_Z), base);
    let mut scaled = curves.clone();
    for c in &mut scaled {
        c.err.iter_mut().for_each(|e| *e *= 1.5);
    }
    assert_eq!(find_crossing(&scaled, CROSSING_Z).verdict, base.verdict);
}

#[test]
fn bootstrap_errors_shrink_with_samples() {
    let err = |samples: usize| {
        let mut rng = rng::stream(6, &[samples as u64], 0);
        let series = [
            synthetic_series(8, samples, 0.2, |t| scaling(8, t), &mut rng),
            synthetic_series(12, samples, 0.2, |t| scaling(12, t), &mut rng),
        ];
        let curves = xi_curves(&series, 1000, 6).unwrap();
        curves[0].err.iter().sum::<f64>() / curves[0].err.len() as f64
    };
    let ratio = err(50) / err(800);
    assert!((3.0..5.3).contains(&ratio), "ratio {ratio}, expected about 4");
}

#[test]
fn identical_samples_have_zero_error() {
    let mut rng = rng::stream(7, &[0], 0);
    let mut series = [
        synthetic_series(8, 1, 0.0, |t| scaling(8, t), &mut rng),
        synthetic_series(12, 1, 0.0, |t| scaling(12, t), &mut rng),
    ];
    for s in &mut series {
        s.chi0.push(s.chi0[0].clone());
        s.chik.push(s.chik[0].clone());
    }
    for c in xi_curves(&series, 1000, 7).unwrap() {
        assert!(c.err.iter().all(|&e| e == 0.0));
    }
}

#[test]
fn too_few_sizes_or_temperatures_are_rejected() {
    let mut rng = rng::stream(8, &[0], 0);
    let one = synthetic_series(8, 4, 0.1, |t| scaling(8, t), &mut rng);
    assert!(xi_curves(std::slice::from_ref(&one), 100, 8).is_err());
    let mut short = one.clone();
    short.temperatures.truncate(2);
    short.chi0.iter_mut().chain(short.chik.iter_mut()).for_each(|v| v.truncate(2));
    assert!(xi_curves(&[short.clone(), short], 100, 8).is_err());
}

/// Independent spins: both susceptibilities average to 4 (the variance of
/// a sum of `4 L^2` signs over `L^2`), so `xi / L` is near zero.
#[test]
fn infinite_temperature_snapshots_have_no_correlation_length() {
    let l = 8;
    let mut rng = rng::stream(9, &[0], 0);
    let (mut c0, mut ck) = (0.0, 0.0);
    let n = 4000;
    for _ in 0..n {
        let spins = lattice_spins(&CellSpinLattice::random(l, l, &mut rng));
        c0 += susceptibility(&spins, l, 0.0);
        ck += susceptibility(&spins, l, k_min(l));
    }
    let (c0, ck) = (c0 / n as f64, ck / n as f64);
    assert!((c0 - 4.0).abs() < 0.3, "chi0 = {c0}");
    assert!((ck - 4.0).abs() < 0.3, "chik = {ck}");
    assert!(c0 >= 0.0 && ck >= 0.0);
    let xi = correlation_length(c0, ck, l).unwrap().xi;
    assert!(xi / (l as f64) < 0.1, "xi / L = {}", xi / l as f64);
}
