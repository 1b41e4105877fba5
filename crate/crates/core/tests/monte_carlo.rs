mod common;

use bdos::design::{u2_value, DesignProblem, Utility};
use bdos::estimation::{ls_estimate, mmse_estimate, Design};
use bdos::rng::{stream, Purpose};
use bdos::signal::{draw_coefficients, observe, synthesize, SampleSet};
use common::*;
use nalgebra::DMatrix;

/// `−U2` is the expected weighted squared error of the MMSE estimate.
#[test]
fn u2_matches_empirical_weighted_risk() {
    let inst = experiment(10);
    let samples = SampleSet::new((0..64).map(|i| usize::from(i % 7 == 0) + usize::from(i == 5)).collect());
    let design = Design::from_counts(&samples).unwrap();
    let weight = DMatrix::from_row_slice(3, 3, &[2.0, 0.3, 0.0, 0.3, 1.0, 0.1, 0.0, 0.1, 0.5]);
    let expected = -u2_value(&inst.basis, &inst.prior, &inst.noise, &design, &weight).unwrap();

    let trials = 40_000;
    let losses: Vec<f64> = (0..trials)
        .map(|t| {
            let c = draw_coefficients(&inst.prior, &mut stream(17, Purpose::Coefficients, t));
            let f = synthesize(&inst.basis, &c).unwrap();
            let y = observe(&f, &samples, &inst.noise, &mut stream(17, Purpose::Noise, t)).unwrap();
            let e = mmse_estimate(&inst.basis, &inst.prior, &inst.noise, &samples, &y).unwrap().estimate - c;
            (e.transpose() * &weight * &e)[(0, 0)]
        })
        .collect();
    let mean = losses.iter().sum::<f64>() / trials as f64;
    let sd = (losses.iter().map(|l| (l - mean).powi(2)).sum::<f64>() / (trials as f64 - 1.0)).sqrt();
    let se = sd / (trials as f64).sqrt();
    assert!((mean - expected).abs() <= 4.0 * se, "mean {mean}, expected {expected}, se {se}");
}

/// The LS error covariance is `σ_w² (V^T Ψ^T Ψ V)^{-1}` for every truth.
#[test]
fn ls_error_covariance_matches_formula() {
    let inst = experiment(12);
    let samples = SampleSet::new((0..64).map(|i| usize::from(i % 5 == 1)).collect());
    let c = inst.prior.mean().clone();
    let f = synthesize(&inst.basis, &c).unwrap();
    let trials = 40_000;
    let mut second = DMatrix::zeros(3, 3);
    let mut formula = None;
    for t in 0..trials {
        let y = observe(&f, &samples, &inst.noise, &mut stream(23, Purpose::Noise, t)).unwrap();
        let est = ls_estimate(&inst.basis, &inst.noise, &samples, &y).unwrap();
        let e = &est.estimate - &c;
        second += &e * e.transpose();
        formula.get_or_insert(est.covariance);
    }
    let empirical = second / trials as f64;
    let formula = formula.unwrap();
    assert!(rel_err(&empirical, &formula) < 0.03, "{empirical} vs {formula}");
}

/// The relaxed objective at an integer design equals the information gain of
/// the corresponding observation model up to the entropy constant.
#[test]
fn u1_differences_are_information_gain_differences() {
    let mut r = rng(5);
    for _ in 0..30 {
        let inst = random_instance(&mut r, 3..=10, 4);
        let n = inst.basis.n();
        let p = DesignProblem::new(&inst.basis, &inst.prior, inst.noise, inst.budget, Utility::DOptimal).unwrap();
        let a = random_counts(&mut r, n, inst.budget);
        let b = random_counts(&mut r, n, inst.budget);
        let eta = |s: &SampleSet| Design::from_counts(s).unwrap().eta().clone();
        let lhs = p.value(&eta(&a)) - p.value(&eta(&b));
        let v = inst.basis.band_vectors();
        let rhs = information_gain(v, a.counts(), inst.prior.variances(), inst.noise.variance())
            - information_gain(v, b.counts(), inst.prior.variances(), inst.noise.variance());
        assert!((lhs - rhs).abs() <= 1e-10 * (1.0 + lhs.abs()), "{lhs} vs {rhs}");
    }
}
