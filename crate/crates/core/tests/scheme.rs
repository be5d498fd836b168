//! Monte Carlo trends of the coding scheme. Seeds are fixed, so these are
//! deterministic; thresholds leave room for several binomial deviations.

use cran_core::*;

fn adder() -> DiscreteMac {
    DiscreteMac::binary_adder(2)
}

fn run(pmf: &SymmetricPmf, n: usize, eps: f64, r: f64, r_prime: f64, trials: usize, seed: u64) -> TrialOutcome {
    let cfg = SimConfig::symmetric(2, n, eps, MartonRates::new(r, r_prime).unwrap(), trials, seed);
    run_trials(&adder(), pmf, &cfg).unwrap()
}

fn sigma(p: f64, trials: usize) -> f64 {
    (p * (1.0 - p) / trials as f64).sqrt().max(1.0 / trials as f64)
}

#[test]
fn too_little_binning_fails_to_encode() {
    // I(X_1; X_2) = 1 bit but only 0.4 bits of binning in total
    let pmf = SymmetricPmf::new(2, 2, vec![0.5, 0.0, 0.0, 0.5]).unwrap();
    let rates: Vec<f64> = [4, 8, 12, 16]
        .iter()
        .map(|&n| run(&pmf, n, 1.0, 0.2, 0.2, 300, 3).encode_failure_rate().unwrap())
        .collect();
    assert!(rates[3] > 0.95, "{rates:?}");
    assert!(rates[3] >= rates[0], "{rates:?}");
}

#[test]
fn enough_binning_encodes_more_often_with_length() {
    // I(X_1; X_2) = 0.278 bits, binning 0.6 bits in total
    let pmf = SymmetricPmf::new(2, 2, vec![0.4, 0.1, 0.1, 0.4]).unwrap();
    let rates: Vec<f64> = [4, 8, 12, 16]
        .iter()
        .map(|&n| run(&pmf, n, 1.0, 0.2, 0.3, 400, 5).encode_failure_rate().unwrap())
        .collect();
    for w in rates.windows(2) {
        assert!(w[1] <= w[0] + 2.0 * sigma(w[0], 400), "{rates:?}");
    }
    assert!(rates[3] < 0.05, "{rates:?}");
}

#[test]
fn error_does_not_grow_with_length_inside_the_region() {
    // lower bound 1.0 at C = 0.5; simulate 10% below it
    let pmf = SymmetricPmf::new(2, 2, vec![0.25; 4]).unwrap();
    let trials = 1000;
    let errs: Vec<f64> = [8, 12, 16]
        .iter()
        .map(|&n| run(&pmf, n, 1.5, 0.45, 0.0, trials, 8).error_rate().unwrap())
        .collect();
    let inversions = errs
        .windows(2)
        .filter(|w| w[1] > w[0])
        .inspect(|w| assert!(w[1] - w[0] <= 2.0 * sigma(w[0], trials), "{errs:?}"))
        .count();
    assert!(inversions <= 1, "{errs:?}");
}

#[test]
fn doubling_trials_is_statistically_consistent() {
    let pmf = SymmetricPmf::new(2, 2, vec![0.25; 4]).unwrap();
    let a = run(&pmf, 10, 1.5, 0.45, 0.0, 500, 17).error_rate().unwrap();
    let b = run(&pmf, 10, 1.5, 0.45, 0.0, 1000, 17).error_rate().unwrap();
    assert!((a - b).abs() <= 3.0 * (sigma(a, 500) + sigma(b, 1000)), "{a} {b}");
}

#[test]
fn rates_outside_the_region_err_more() {
    let pmf = SymmetricPmf::new(2, 2, vec![0.25; 4]).unwrap();
    let inside = run(&pmf, 12, 1.5, 0.4, 0.0, 300, 2).error_rate().unwrap();
    let outside = run(&pmf, 12, 1.5, 0.85, 0.0, 300, 2).error_rate().unwrap();
    assert!(inside < outside, "{inside} {outside}");
}

#[test]
fn parallel_and_serial_runs_agree() {
    let pmf = SymmetricPmf::new(2, 2, vec![0.4, 0.1, 0.1, 0.4]).unwrap();
    let cfg = SimConfig::symmetric(2, 10, 1.0, MartonRates::new(0.2, 0.3).unwrap(), 64, 9);
    let parallel = run_trials(&adder(), &pmf, &cfg).unwrap();
    let pool = rayon::ThreadPoolBuilder::new().num_threads(1).build().unwrap();
    let serial = pool.install(|| run_trials(&adder(), &pmf, &cfg).unwrap());
    assert_eq!(parallel, serial);
}

#[test]
fn codebook_symbols_follow_the_marginal() {
    let cfg = SimConfig::symmetric(2, 8, 1.0, MartonRates::new(1.0, 0.0).unwrap(), 1, 4);
    let books = build_codebooks(&adder(), &[0.5, 0.5], &cfg, 0).unwrap();
    let total = books.bins(0) * 8;
    let ones: usize = (0..books.bins(0))
        .map(|w| books.word(0, w, 0).iter().filter(|&&s| s == 1).count())
        .sum();
    let freq = ones as f64 / total as f64;
    assert!((freq - 0.5).abs() <= 3.0 * (0.25 / total as f64).sqrt(), "{freq}");
}
