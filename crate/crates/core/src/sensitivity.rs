//! Pairwise sensitivity: pairs whose orbits separate by at least `eps` at
//! some time `1 <= n <= T`, and the verdict comparing the sensitive and
//! equicontinuous readings of a system.

use rand::Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{invalid, Error, Result};
use crate::measures::Measure;
use crate::orbit::{self, binomial_stderr, EquicontinuityParams, EquicontinuityReport};
use crate::par;
use crate::rng::SeedStream;
use crate::space::{separation_radius, CirclePoint, Configuration};
use crate::systems::{Point, System};

/// Whether `d(T^n x, T^n y) >= eps` for some `1 <= n <= T`.
///
/// On Cantor spaces `d >= eps` is disagreement on a fixed window (see
/// [`separation_radius`]), so only that window of each iterate is needed.
pub fn sensitive_pair_test(sys: &System, x: &Point, y: &Point, eps: f64, horizon: usize) -> Result<bool> {
    let window = separation_radius(eps)?;
    match (sys, x, y) {
        (System::Rotation(r), Point::Circle(a), Point::Circle(b)) => {
            let (mut a, mut b): (CirclePoint, CirclePoint) = (*a, *b);
            for _ in 0..horizon {
                a = r.step(a);
                b = r.step(b);
                if a.distance(b) >= eps {
                    return Ok(true);
                }
            }
            Ok(false)
        }
        (System::Rotation(_), _, _) | (_, Point::Circle(_), _) | (_, _, Point::Circle(_)) => {
            Err(Error::UnsupportedSystem("mixing circle points and configurations"))
        }
        (_, Point::Symbolic(x), Point::Symbolic(y)) => {
            let Some(window) = window else { return Ok(false) };
            symbolic_pair(sys, x, y, window, horizon)
        }
    }
}

fn symbolic_pair(sys: &System, x: &Configuration, y: &Configuration, window: usize, horizon: usize) -> Result<bool> {
    sys.check_point(x)?;
    sys.check_point(y)?;
    let needed = sys.dependence_radius(window, horizon);
    let available = x.radius().min(y.radius());
    if available < needed {
        return Err(Error::InsufficientRadius { needed, available });
    }
    let (mut a, mut b) = (x.truncate(needed)?, y.truncate(needed)?);
    for _ in 0..horizon {
        a = sys.step_config(&a)?;
        b = sys.step_config(&b)?;
        if !a.agrees_on(&b, window)? {
            return Ok(true);
        }
    }
    Ok(false)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SensitivityEstimate {
    pub eps: f64,
    #[serde(rename = "T")]
    pub horizon: usize,
    /// Estimate of `mu x mu (S(eps))` at horizon `T`.
    #[serde(rename = "p")]
    pub estimate: f64,
    pub stderr: f64,
    #[serde(rename = "N")]
    pub samples: u64,
    pub seed: u64,
}

/// Fraction of independent pairs `(x, y) ~ mu x mu` in `S(eps)`.
pub fn mu_sensitivity_estimate(
    sys: &System,
    mu: &Measure,
    eps: f64,
    horizon: usize,
    samples: u64,
    seed: u64,
) -> Result<SensitivityEstimate> {
    if samples == 0 {
        return invalid("sample count must be positive");
    }
    let window = separation_radius(eps)?;
    let radius = sys.dependence_radius(window.unwrap_or(0), horizon);
    let stream = SeedStream::new(seed);
    let hits: u64 = par::chunked_sum(samples, |i| {
        let mut rng = stream.rng(i);
        let x = orbit::sample_point(sys, mu, radius, &mut rng)?;
        let y = orbit::sample_point(sys, mu, radius, &mut rng)?;
        Ok(u64::from(sensitive_pair_test(sys, &x, &y, eps, horizon)?))
    })?;
    let estimate = hits as f64 / samples as f64;
    Ok(SensitivityEstimate {
        eps,
        horizon,
        estimate,
        stderr: binomial_stderr(estimate, samples),
        samples,
        seed,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum DichotomyVerdict {
    #[serde(rename = "mu-sensitive")]
    Sensitive,
    #[serde(rename = "mu-equicontinuous")]
    Equicontinuous,
    #[serde(rename = "inconclusive at scale")]
    Inconclusive,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Thresholds {
    pub delta_s: f64,
    pub delta_e: f64,
}

impl Default for Thresholds {
    fn default() -> Self {
        Thresholds {
            delta_s: 0.05,
            delta_e: 0.05,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DichotomyReport {
    pub sensitivity: Vec<SensitivityEstimate>,
    pub equicontinuity: EquicontinuityReport,
    pub thresholds: Thresholds,
    /// Some `eps` has estimate `>= 1 - delta_s` and the equicontinuity
    /// fraction is at most `delta_e`.
    pub sensitive_branch: bool,
    /// Every `eps` has estimate `< 1 - delta_s` and the equicontinuity
    /// fraction is at least `1 - delta_e`.
    pub equicontinuous_branch: bool,
    pub verdict: DichotomyVerdict,
}

/// Runs the sensitivity estimates over `eps_list` and an equicontinuity
/// report, and reads off a verdict. Ergodicity of `mu` is the caller's
/// assumption; nothing here checks it.
#[allow(clippy::too_many_arguments)]
pub fn dichotomy_report(
    sys: &System,
    mu: &Measure,
    eps_list: &[f64],
    horizon: usize,
    samples: u64,
    equicontinuity: &EquicontinuityParams,
    thresholds: Thresholds,
    seed: u64,
) -> Result<DichotomyReport> {
    if eps_list.is_empty() {
        return invalid("eps list must be non-empty");
    }
    for d in [thresholds.delta_s, thresholds.delta_e] {
        if !(d > 0.0 && d < 0.5) {
            return invalid("verdict thresholds must lie in (0, 0.5)");
        }
    }
    let stream = SeedStream::new(seed);
    let sensitivity = eps_list
        .par_iter()
        .enumerate()
        .map(|(i, &eps)| mu_sensitivity_estimate(sys, mu, eps, horizon, samples, stream.substream(i as u64).seed()))
        .collect::<Result<Vec<_>>>()?;
    let equi = orbit::mu_equicontinuity_report(sys, mu, equicontinuity, stream.substream(u64::MAX).seed())?;
    let level = 1.0 - thresholds.delta_s;
    let sensitive_branch = sensitivity.iter().any(|s| s.estimate >= level) && equi.fraction <= thresholds.delta_e;
    let equicontinuous_branch =
        sensitivity.iter().all(|s| s.estimate < level) && equi.fraction >= 1.0 - thresholds.delta_e;
    let verdict = match (sensitive_branch, equicontinuous_branch) {
        (true, false) => DichotomyVerdict::Sensitive,
        (false, true) => DichotomyVerdict::Equicontinuous,
        _ => DichotomyVerdict::Inconclusive,
    };
    Ok(DichotomyReport {
        sensitivity,
        equicontinuity: equi,
        thresholds,
        sensitive_branch,
        equicontinuous_branch,
        verdict,
    })
}

/// A random circle point, for callers building rotation pairs by hand.
pub fn random_circle_point(rng: &mut impl Rng) -> CirclePoint {
    CirclePoint::from_turns(rng.random())
}
