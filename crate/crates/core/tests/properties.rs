mod common;

use common::{all_words, naive_eventual_period, odometer_add_one};
use equidyn_core::orbit::{density_ratio_exact, equicontinuity_point_test, orbit_ball_member};
use equidyn_core::periodicity::{detect_eventual_period, lep_certificate};
use equidyn_core::sensitivity::sensitive_pair_test;
use equidyn_core::space::cantor_distance;
use equidyn_core::*;
use proptest::prelude::*;

fn config(indexing: Indexing, symbols: Vec<u8>) -> Configuration {
    Configuration::new(Alphabet::BINARY, indexing, symbols).unwrap()
}

fn indexings() -> [Indexing; 2] {
    [Indexing::OneSided, Indexing::TwoSided]
}

#[test]
fn ball_equals_cylinder_exhaustively() {
    for indexing in indexings() {
        for r in 0..=4usize {
            let len = indexing.window_len(r);
            let words = all_words(2, len);
            let x = config(indexing, words[words.len() / 3].clone());
            for w in &words {
                let y = config(indexing, w.clone());
                let d = cantor_distance(&x, &y).unwrap().value();
                for n in 1..=r {
                    let inside = d <= 1.0 / n as f64;
                    assert_eq!(inside, x.restrict(n).unwrap() == y.restrict(n).unwrap());
                    assert_eq!(inside, x.ball_cylinder(n).unwrap().contains(&y).unwrap());
                }
            }
        }
    }
}

#[test]
fn metric_axioms_exhaustively() {
    for indexing in indexings() {
        let words = all_words(2, indexing.window_len(2));
        let pts: Vec<_> = words.into_iter().map(|w| config(indexing, w)).collect();
        for x in &pts {
            for y in &pts {
                let dxy = cantor_distance(x, y).unwrap();
                assert_eq!(dxy, cantor_distance(y, x).unwrap());
                assert_eq!(dxy.value() == 0.0, x == y);
                for z in &pts {
                    let dxz = cantor_distance(x, z).unwrap();
                    assert!(dxz <= dxy.max(cantor_distance(y, z).unwrap()));
                }
            }
        }
    }
}

#[test]
fn wolfram_numbers_round_trip() {
    for rule in 0..=255u8 {
        let ca = CaRule::elementary(rule);
        assert_eq!(ca.wolfram_number(), Some(rule));
        let rebuilt = CaRule::from_fn(Alphabet::BINARY, Indexing::TwoSided, 1, |w| ca.apply(w)).unwrap();
        assert_eq!(rebuilt, ca);
        for w in all_words(2, 3) {
            assert_eq!(ca.apply(&w), common::eca_step(rule, &w)[0]);
        }
    }
}

#[test]
fn dependence_locality_exhaustively() {
    for rule in [30u8, 90, 110, 184] {
        let sys = System::Ca(CaRule::elementary(rule));
        for m in 0..=1usize {
            for t in 0..=3usize {
                let rho = m + t;
                // vary the cells outside W_rho of a wider window
                let outer = rho + 1;
                for core in all_words(2, 2 * rho + 1) {
                    let mut traces = Vec::new();
                    for (a, b) in [(0u8, 0u8), (0, 1), (1, 0), (1, 1)] {
                        let mut cells = vec![a];
                        cells.extend(&core);
                        cells.push(b);
                        let x = config(Indexing::TwoSided, cells);
                        assert_eq!(x.radius(), outer);
                        traces.push(sys.column_trace(&x, m, t).unwrap());
                    }
                    assert!(traces.windows(2).all(|p| p[0] == p[1]));
                    assert_eq!(
                        traces[0],
                        common::eca_trace(rule, &core, m, t)
                            .into_iter()
                            .map(Word)
                            .collect::<Vec<_>>()
                    );
                }
            }
        }
    }
}

#[test]
fn odometer_is_an_isometry_on_dyadic_prefixes() {
    let od = System::Odometer(Odometer::new(vec![2]).unwrap());
    for len in 1..=6usize {
        let pts: Vec<_> = all_words(2, len)
            .into_iter()
            .map(|w| config(Indexing::OneSided, w))
            .collect();
        for x in &pts {
            let mut expect = x.symbols().to_vec();
            odometer_add_one(&[2], &mut expect);
            let tx = od.step_config(x).unwrap();
            assert_eq!(tx.symbols(), &expect[..]);
            for y in &pts {
                let ty = od.step_config(y).unwrap();
                assert_eq!(cantor_distance(&tx, &ty).unwrap(), cantor_distance(x, y).unwrap());
            }
        }
    }
}

#[test]
fn orbit_balls_nest() {
    let systems = [
        System::Ca(CaRule::elementary(204)),
        System::Ca(CaRule::elementary(90)),
        System::Ca(CaRule::elementary(184)),
        System::Ca(CaRule::identity(Alphabet::BINARY, Indexing::TwoSided, 0).unwrap()),
    ];
    for sys in &systems {
        let r = sys.spread();
        let wide = 2 + r * 3;
        let x = config(
            Indexing::TwoSided,
            (0..2 * wide + 1).map(|i| ((i * 7) % 3 == 0) as u8).collect(),
        );
        let mut seen = 0;
        for w in all_words(2, 2 * wide + 1).into_iter().step_by(37) {
            let y = Point::Symbolic(config(Indexing::TwoSided, w));
            let xp = Point::Symbolic(x.clone());
            for m in 0..=2usize {
                for t in 0..=3usize {
                    if m + r * (t + 1) > wide {
                        continue;
                    }
                    seen += 1;
                    let here = orbit_ball_member(sys, &xp, &y, m, t).unwrap();
                    if orbit_ball_member(sys, &xp, &y, m, t + 1).unwrap() {
                        assert!(here);
                    }
                    if m < 2 && m + 1 + r * t <= wide && orbit_ball_member(sys, &xp, &y, m + 1, t).unwrap() {
                        assert!(here);
                    }
                }
                let Point::Symbolic(yc) = &y else { unreachable!() };
                assert_eq!(
                    orbit_ball_member(sys, &xp, &y, m, 0).unwrap(),
                    x.agrees_on(yc, m).unwrap()
                );
            }
        }
        assert!(seen > 0);
    }
}

#[test]
fn equicontinuity_point_forces_ratio_one() {
    let measures = [
        Measure::Bernoulli(BernoulliMeasure::uniform(2).unwrap()),
        Measure::Bernoulli(BernoulliMeasure::new(vec![0.3, 0.7]).unwrap()),
        Measure::Markov(MarkovMeasure::new(vec![vec![0.9, 0.1], vec![0.2, 0.8]], None).unwrap()),
    ];
    let mut hits = 0;
    for rule in [204u8, 170, 90, 184, 128, 0] {
        let sys = System::Ca(CaRule::elementary(rule));
        for w in all_words(2, 9).into_iter().step_by(11) {
            let x = Point::Symbolic(config(Indexing::TwoSided, w));
            for (m, n, t) in [(0, 1, 1), (0, 2, 2), (1, 2, 2), (1, 3, 2), (0, 3, 3)] {
                if equicontinuity_point_test(&sys, &x, m, n, t, DEFAULT_ENUMERATION_CAP).unwrap() {
                    hits += 1;
                    for mu in &measures {
                        assert_eq!(
                            density_ratio_exact(&sys, mu, &x, m, n, t, DEFAULT_ENUMERATION_CAP).unwrap(),
                            1.0
                        );
                    }
                }
            }
        }
    }
    assert!(hits > 0);
}

#[test]
fn certificates_are_minimal_and_replay() {
    for len in 1..=10usize {
        for w in all_words(3, len).into_iter().step_by(7) {
            let trace: Vec<Word> = w.iter().map(|&s| Word(vec![s])).collect();
            let got = detect_eventual_period(&trace);
            assert_eq!(got, naive_eventual_period(&w));
            if let Some((p, q)) = got {
                let cert = PeriodCertificate {
                    m: 0,
                    horizon: len - 1,
                    period: p,
                    preperiod: q,
                };
                assert!(cert.verify(&trace));
            }
        }
    }
}

#[test]
fn odometer_certificates_for_every_prefix() {
    let od = System::Odometer(Odometer::new(vec![2, 3]).unwrap());
    for m in 0..=4usize {
        let period: usize = (0..=m).map(|i| [2, 3][i.min(1)]).product();
        for k in 0..6u8 {
            let digits: Vec<u8> = (0..=m).map(|i| (k + i as u8) % [2, 3][i.min(1)]).collect();
            let x = config_mixed(digits);
            let c = lep_certificate(&od, &x, m, 2 * period).unwrap().unwrap();
            assert_eq!((c.period, c.preperiod), (period, 0));
        }
    }
}

fn config_mixed(digits: Vec<u8>) -> Configuration {
    Configuration::new(Alphabet::new(3).unwrap(), Indexing::OneSided, digits).unwrap()
}

proptest! {
    #[test]
    fn rotation_is_an_exact_isometry(a in any::<u64>(), b in any::<u64>(), alpha in 1e-6f64..0.999_999, k in 1usize..50) {
        let rot = Rotation::new(alpha).unwrap();
        let (mut x, mut y) = (CirclePoint::from_turns(a), CirclePoint::from_turns(b));
        let d = x.distance(y);
        for _ in 0..k {
            x = rot.step(x);
            y = rot.step(y);
        }
        prop_assert_eq!(x.distance(y), d);
    }

    #[test]
    fn kolmogorov_consistency(
        word in proptest::collection::vec(0u8..2, 0..12),
        two_sided in any::<bool>(),
        w0 in 0.05f64..0.95,
        p01 in 0.05f64..0.95,
        p10 in 0.05f64..0.95,
    ) {
        let indexing = if two_sided { Indexing::TwoSided } else { Indexing::OneSided };
        let mut word = word;
        if two_sided && word.len() % 2 == 0 {
            word.push(1);
        }
        let c = Cylinder::new(Alphabet::BINARY, indexing, Word(word)).unwrap();
        let measures = [
            Measure::Bernoulli(BernoulliMeasure::new(vec![w0, 1.0 - w0]).unwrap()),
            Measure::Markov(MarkovMeasure::new(vec![vec![1.0 - p01, p01], vec![p10, 1.0 - p10]], None).unwrap()),
        ];
        for mu in &measures {
            let parent = mu.cylinder_probability(&c).unwrap();
            let children: f64 = c.children().iter().map(|ch| mu.cylinder_probability(ch).unwrap()).sum();
            prop_assert!((parent - children).abs() <= 1e-12 * parent.max(1e-300) + 1e-15);
        }
    }

    #[test]
    fn sensitivity_is_symmetric_and_monotone(
        x in proptest::collection::vec(0u8..2, 17),
        y in proptest::collection::vec(0u8..2, 17),
        rule in prop::sample::select(vec![204u8, 170, 90, 184, 30]),
        t in 1usize..5,
    ) {
        let sys = System::Ca(CaRule::elementary(rule));
        let (x, y) = (Point::Symbolic(config(Indexing::TwoSided, x)), Point::Symbolic(config(Indexing::TwoSided, y)));
        let eps_list = [2.0, 1.5, 1.0, 0.5, 0.34];
        let mut prev = false;
        for &eps in &eps_list {
            let s = sensitive_pair_test(&sys, &x, &y, eps, t).unwrap();
            prop_assert_eq!(s, sensitive_pair_test(&sys, &y, &x, eps, t).unwrap());
            prop_assert!(s || !prev);
            prev = s;
            if s {
                prop_assert!(sensitive_pair_test(&sys, &x, &y, eps, t + 1).unwrap());
            }
        }
    }

    #[test]
    fn conditional_samples_keep_the_word(
        word in proptest::collection::vec(0u8..2, 1..6),
        seed in any::<u64>(),
    ) {
        let c = Cylinder::new(Alphabet::BINARY, Indexing::OneSided, Word(word.clone())).unwrap();
        let mu = Measure::Markov(MarkovMeasure::new(vec![vec![0.9, 0.1], vec![0.2, 0.8]], None).unwrap());
        let mut rng = SeedStream::new(seed).rng(0);
        let y = mu.conditional_sample(&c, 8, &mut rng).unwrap();
        prop_assert_eq!(&y.symbols()[..word.len()], &word[..]);
        prop_assert_eq!(y.radius(), 8);
    }
}
