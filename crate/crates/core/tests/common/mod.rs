#![allow(dead_code)]

use statrs::distribution::{ChiSquared, ContinuousCDF};

/// Pearson chi-square p-value of `observed` against probabilities
/// `expected`. Bins with expected count below 5 are pooled.
pub fn chi_square_p(observed: &[u64], expected: &[f64]) -> f64 {
    assert_eq!(observed.len(), expected.len());
    let n: u64 = observed.iter().sum();
    let mut bins: Vec<(f64, f64)> = Vec::new();
    let mut pool = (0.0, 0.0);
    for (&o, &p) in observed.iter().zip(expected) {
        let e = p * n as f64;
        if e < 5.0 {
            pool.0 += o as f64;
            pool.1 += e;
        } else {
            bins.push((o as f64, e));
        }
    }
    if pool.1 > 0.0 {
        bins.push(pool);
    }
    let stat: f64 = bins.iter().map(|(o, e)| (o - e).powi(2) / e).sum();
    let dof = (bins.len() - 1) as f64;
    1.0 - ChiSquared::new(dof).unwrap().cdf(stat)
}

/// Relative difference, scaled by the larger magnitude.
pub fn rel_diff(a: f64, b: f64) -> f64 {
    let m = a.abs().max(b.abs());
    if m == 0.0 {
        0.0
    } else {
        (a - b).abs() / m
    }
}

/// Chi-square homogeneity p-value of two histograms over the same bins.
/// Bins with fewer than 10 combined counts are pooled.
pub fn homogeneity_p(a: &[u64], b: &[u64]) -> f64 {
    assert_eq!(a.len(), b.len());
    let (na, nb) = (a.iter().sum::<u64>() as f64, b.iter().sum::<u64>() as f64);
    let mut bins: Vec<(f64, f64)> = Vec::new();
    let mut pool = (0.0, 0.0);
    for (&x, &y) in a.iter().zip(b) {
        if x + y < 10 {
            pool.0 += x as f64;
            pool.1 += y as f64;
        } else {
            bins.push((x as f64, y as f64));
        }
    }
    if pool.0 + pool.1 > 0.0 {
        bins.push(pool);
    }
    let n = na + nb;
    let stat: f64 = bins
        .iter()
        .map(|&(x, y)| {
            let (ea, eb) = ((x + y) * na / n, (x + y) * nb / n);
            (x - ea).powi(2) / ea + (y - eb).powi(2) / eb
        })
        .sum();
    1.0 - ChiSquared::new((bins.len() - 1) as f64).unwrap().cdf(stat)
}
