mod common;

use equidyn_core::orbit::{density_ratio_estimate, density_ratio_exact, mu_equicontinuity_report, orbit_ball_event};
use equidyn_core::periodicity::{lep_statistics, mu_lep_classify, LepVerdict};
use equidyn_core::sensitivity::{dichotomy_report, mu_sensitivity_estimate, DichotomyVerdict, Thresholds};
use equidyn_core::*;

const CAP: u64 = DEFAULT_ENUMERATION_CAP;

fn fair() -> Measure {
    Measure::Bernoulli(BernoulliMeasure::uniform(2).unwrap())
}

fn sticky() -> Measure {
    Measure::Markov(MarkovMeasure::new(vec![vec![0.9, 0.1], vec![0.2, 0.8]], None).unwrap())
}

fn shift() -> System {
    System::Shift(Alphabet::BINARY)
}

fn identity() -> System {
    System::Ca(CaRule::elementary(204))
}

fn within(est: f64, exact: f64, samples: u64, sigmas: f64) -> bool {
    let sd = (exact * (1.0 - exact) / samples as f64).sqrt();
    (est - exact).abs() <= sigmas * sd
}

fn params(m: usize, n_list: Vec<usize>, horizon: usize) -> EquicontinuityParams {
    EquicontinuityParams {
        m,
        n_list,
        horizon,
        points: 16,
        samples: 2000,
        delta: 0.05,
        cap: CAP,
    }
}

#[test]
fn bernoulli_symbol_frequencies() {
    let mu = Measure::Bernoulli(BernoulliMeasure::new(vec![0.2, 0.3, 0.5]).unwrap());
    let n = 100_000u64;
    let mut counts = [0u64; 3];
    let stream = SeedStream::new(11);
    let mut rng = stream.rng(0);
    for _ in 0..n / 10 {
        let x = mu.sample_config(Indexing::OneSided, 9, &mut rng).unwrap();
        for &s in x.symbols() {
            counts[s as usize] += 1;
        }
    }
    for (c, w) in counts.iter().zip([0.2, 0.3, 0.5]) {
        assert!(within(*c as f64 / n as f64, w, n, 3.0), "{counts:?}");
    }
}

#[test]
fn markov_next_symbol_frequency() {
    let mu = sticky();
    let zero = Cylinder::new(Alphabet::BINARY, Indexing::OneSided, Word(vec![0])).unwrap();
    let n = 100_000u64;
    let stream = SeedStream::new(5);
    let ones = (0..n)
        .filter(|&i| mu.conditional_sample(&zero, 1, &mut stream.rng(i)).unwrap().symbols()[1] == 1)
        .count();
    assert!(within(ones as f64 / n as f64, 0.1, n, 3.0));

    // leftward cells follow the reversed chain: P(x_{-1} = 1 | x_0 = 0) = pi_1 P_10 / pi_0
    let two_zero = Cylinder::new(Alphabet::BINARY, Indexing::TwoSided, Word(vec![0])).unwrap();
    let left = (0..n)
        .filter(|&i| {
            mu.conditional_sample(&two_zero, 1, &mut stream.rng(i))
                .unwrap()
                .symbols()[0]
                == 1
        })
        .count();
    assert!(within(left as f64 / n as f64, 0.1, n, 3.0));
}

#[test]
fn shift_estimate_matches_quarter() {
    let x = Point::Symbolic(Configuration::parse("0110", Alphabet::BINARY, Indexing::OneSided).unwrap());
    assert_eq!(density_ratio_exact(&shift(), &fair(), &x, 1, 1, 2, CAP).unwrap(), 0.25);
    let est = density_ratio_estimate(&shift(), &fair(), &x, 1, 1, 2, 10_000, 9).unwrap();
    assert!((est.estimate - 0.25).abs() <= 3.0 * est.stderr);
}

#[test]
fn rule_ninety_estimate_matches_enumeration() {
    let sys = System::Ca(CaRule::elementary(90));
    let x = Configuration::parse("011010010", Alphabet::BINARY, Indexing::TwoSided).unwrap();
    let event = orbit_ball_event(&sys, &x, 1, 2, CAP).unwrap();
    let ball = x.ball_cylinder(2).unwrap();
    let mass: f64 = event
        .words
        .iter()
        .map(|w| Configuration::new(Alphabet::BINARY, Indexing::TwoSided, w.0.clone()).unwrap())
        .filter(|y| ball.contains(y).unwrap())
        .map(|y| 0.5f64.powi(y.symbols().len() as i32))
        .sum();
    let exact = mass / 0.5f64.powi(5);
    let p = Point::Symbolic(x);
    assert!((density_ratio_exact(&sys, &fair(), &p, 1, 2, 2, CAP).unwrap() - exact).abs() < 1e-12);
    let est = density_ratio_estimate(&sys, &fair(), &p, 1, 2, 2, 10_000, 4).unwrap();
    assert!((est.estimate - exact).abs() <= 3.0 * est.stderr.max(1e-12));
}

#[test]
fn shift_curves_follow_the_closed_form() {
    let (m, t) = (1, 3);
    let report = mu_equicontinuity_report(&shift(), &fair(), &params(m, vec![1, 2, 3, 4, 5], t), 2).unwrap();
    assert_eq!(report.path, "exact");
    for curve in &report.points {
        for (n, r) in [1usize, 2, 3, 4, 5].iter().zip(&curve.ratios) {
            let expect = if *n >= m + t {
                1.0
            } else {
                0.5f64.powi((m + t - n) as i32)
            };
            assert_eq!(*r, expect);
        }
    }
    assert_eq!(report.fraction, 1.0);
    let short = mu_equicontinuity_report(&shift(), &fair(), &params(m, vec![1, 2, 3], t), 2).unwrap();
    assert_eq!(short.fraction, 0.0);
}

#[test]
fn lep_statistics_separate_odometer_from_shift() {
    let od = System::Odometer(Odometer::new(vec![3, 2]).unwrap());
    let haar = Measure::Haar(ProductMeasure::new(vec![3, 2]).unwrap());
    for m in 0..=3 {
        let s = lep_statistics(&od, &haar, m, 0.05, 200, 60, 7).unwrap();
        let p: usize = (0..=m).map(|i| if i == 0 { 3 } else { 2 }).product();
        assert_eq!(
            (s.period_bound, s.preperiod_bound, s.certified_fraction),
            (Some(p), Some(0), 1.0)
        );
    }
    let s = lep_statistics(&shift(), &fair(), 1, 0.05, 1000, 32, 7).unwrap();
    assert!(s.certified_fraction <= 0.01);
    assert_eq!(s.period_bound, None);
}

#[test]
fn classification_verdicts() {
    let od = System::Odometer(Odometer::new(vec![2]).unwrap());
    let haar = Measure::Haar(ProductMeasure::new(vec![2]).unwrap());
    let eq = params(1, vec![1, 2, 4], 4);
    let c = mu_lep_classify(&od, &haar, &[0, 1, 2, 3], 0.05, 300, 40, 1, &eq).unwrap();
    assert_eq!(c.verdict, LepVerdict::MuLp);
    assert_eq!(c.equicontinuity.unwrap().fraction, 1.0);
    let c = mu_lep_classify(&shift(), &fair(), &[0, 1], 0.05, 300, 32, 1, &eq).unwrap();
    assert_eq!(c.verdict, LepVerdict::Neither);
    assert!(c.equicontinuity.is_none());
}

#[test]
fn sensitivity_closed_forms() {
    let t = 10;
    let s = mu_sensitivity_estimate(&shift(), &fair(), 2.0, t, 10_000, 3).unwrap();
    let exact = 1.0 - 0.5f64.powi(t as i32);
    assert!((s.estimate - exact).abs() <= 3.0 * s.stderr.max((exact * (1.0 - exact) / 1e4).sqrt()));
    let s = mu_sensitivity_estimate(&identity(), &fair(), 2.0, 5, 10_000, 3).unwrap();
    assert!((s.estimate - 0.5).abs() <= 3.0 * s.stderr);
}

#[test]
fn odometer_dichotomy_is_equicontinuous() {
    let od = System::Odometer(Odometer::new(vec![2, 3]).unwrap());
    let haar = Measure::Haar(ProductMeasure::new(vec![2, 3]).unwrap());
    let r = dichotomy_report(
        &od,
        &haar,
        &[2.0],
        12,
        2000,
        &params(1, vec![1, 2], 6),
        Thresholds::default(),
        8,
    )
    .unwrap();
    assert_eq!(r.verdict, DichotomyVerdict::Equicontinuous);
    assert!(r.sensitivity[0].estimate < 0.95);
}
