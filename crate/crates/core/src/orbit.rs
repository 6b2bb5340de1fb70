//! Orbit balls at a finite horizon and the density ratio
//! `mu(B^o_m(x) ∩ B_n(x)) / mu(B_n(x))` that decides whether `x` is a
//! mu-equicontinuity point.
//!
//! `B^o_{m,T}(x)` is the set of `y` whose resolution-`m` column trace
//! agrees with that of `x` for `0 <= i <= T`. It decreases to the orbit
//! ball as `T` grows; nothing here extrapolates past `T`.

use rand::Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{invalid, Error, Result};
use crate::measures::Measure;
use crate::par;
use crate::rng::{SampleRng, SeedStream};
use crate::space::{Alphabet, CirclePoint, Configuration, Indexing, Word};
use crate::systems::{Point, System};

/// Largest number of words any exact computation will enumerate by default.
pub const DEFAULT_ENUMERATION_CAP: u64 = 1 << 24;

const BASE_POINTS: u64 = 0xBA5E;
const RATIO_SAMPLES: u64 = 0x5A3B;

/// All configurations on `W_rho` extending a fixed word on `W_n`, in
/// lexicographic order. Cells admit `sys.symbols_at(i)` symbols.
pub(crate) struct Extensions {
    alphabet: Alphabet,
    indexing: Indexing,
    template: Vec<u8>,
    free: Vec<(usize, u64)>,
    count: u64,
}

impl Extensions {
    pub(crate) fn new(sys: &System, rho: usize, fixed: Option<&Word>, cap: u64) -> Result<Self> {
        let alphabet = sys.alphabet().ok_or(Error::UnsupportedSystem("rotation"))?;
        let indexing = sys.indexing().expect("symbolic systems have an indexing");
        let len = indexing.window_len(rho);
        let start = indexing.window_start(rho);
        let mut template = vec![0u8; len];
        let (lo, hi) = match fixed {
            Some(w) => {
                let n = indexing
                    .radius_for_len(w.len())
                    .ok_or_else(|| Error::InvalidParameter("fixed word is not a window".into()))?;
                if n > rho {
                    return invalid("fixed window exceeds the enumeration window");
                }
                let lo = (indexing.window_start(n) - start) as usize;
                template[lo..lo + w.len()].copy_from_slice(w.symbols());
                (lo, lo + w.len())
            }
            None => (0, 0),
        };
        let free: Vec<(usize, u64)> = (0..len)
            .filter(|p| !(lo..hi).contains(p))
            .map(|p| (p, sys.symbols_at(start + p as i64) as u64))
            .collect();
        let required = free
            .iter()
            .try_fold(1u128, |acc, &(_, r)| acc.checked_mul(r as u128))
            .unwrap_or(u128::MAX);
        if required > cap as u128 {
            return Err(Error::EnumerationTooLarge { required, cap });
        }
        Ok(Extensions {
            alphabet,
            indexing,
            template,
            free,
            count: required as u64,
        })
    }

    pub(crate) fn count(&self) -> u64 {
        self.count
    }

    pub(crate) fn get(&self, mut idx: u64) -> Configuration {
        let mut symbols = self.template.clone();
        for &(pos, radix) in self.free.iter().rev() {
            symbols[pos] = (idx % radix) as u8;
            idx /= radix;
        }
        Configuration::new(self.alphabet, self.indexing, symbols).expect("enumerated words are valid")
    }
}

/// Number of words an exact computation over the extensions of `W_n` to
/// `W_rho` would visit.
pub fn free_word_count(sys: &System, rho: usize, n: usize) -> u128 {
    let Some(indexing) = sys.indexing() else { return 1 };
    if n >= rho {
        return 1;
    }
    let start = indexing.window_start(rho);
    let (lo, hi) = (
        indexing.window_start(n),
        indexing.window_start(n) + indexing.window_len(n) as i64,
    );
    (0..indexing.window_len(rho) as i64)
        .map(|p| start + p)
        .filter(|i| !(lo..hi).contains(i))
        .try_fold(1u128, |acc, i| acc.checked_mul(sys.symbols_at(i) as u128))
        .unwrap_or(u128::MAX)
}

pub(crate) fn check_measure(sys: &System, mu: &Measure) -> Result<()> {
    match (sys, mu) {
        (System::Rotation(_), Measure::Lebesgue) => Ok(()),
        (System::Rotation(_), _) => invalid("rotation analyses use the lebesgue measure"),
        (_, Measure::Lebesgue) => invalid("lebesgue measure only applies to rotations"),
        _ => {
            let (own, found) = (mu.alphabet().unwrap(), sys.alphabet().unwrap());
            if own != found {
                Err(Error::AlphabetMismatch {
                    expected: own.size(),
                    found: found.size(),
                })
            } else {
                Ok(())
            }
        }
    }
}

/// Draw a point of the system's space from `mu`, known on `W_radius`.
pub fn sample_point(sys: &System, mu: &Measure, radius: usize, rng: &mut SampleRng) -> Result<Point> {
    check_measure(sys, mu)?;
    match sys {
        System::Rotation(_) => Ok(Point::Circle(CirclePoint::new(rng.random::<f64>())?)),
        _ => Ok(Point::Symbolic(mu.sample_config(
            sys.indexing().unwrap(),
            radius,
            rng,
        )?)),
    }
}

fn as_config(x: &Point) -> Result<&Configuration> {
    match x {
        Point::Symbolic(c) => Ok(c),
        Point::Circle(_) => Err(Error::UnsupportedSystem("circle points in symbolic analyses")),
    }
}

fn as_circle(x: &Point) -> Result<CirclePoint> {
    match x {
        Point::Circle(c) => Ok(*c),
        Point::Symbolic(_) => Err(Error::UnsupportedSystem("configurations in circle analyses")),
    }
}

fn circle_resolution(m: usize) -> Result<f64> {
    if m == 0 {
        invalid("circle resolution must be at least 1")
    } else {
        Ok(1.0 / m as f64)
    }
}

/// Arc length of the closed ball of radius `1/n` on the unit circle.
fn arc_length(n: usize) -> f64 {
    (2.0 / n as f64).min(1.0)
}

/// `y ∈ B^o_{m,T}(x)`.
pub fn orbit_ball_member(sys: &System, x: &Point, y: &Point, m: usize, horizon: usize) -> Result<bool> {
    match sys {
        // isometry: the orbit ball is the ball, at every horizon
        System::Rotation(_) => Ok(as_circle(x)?.distance(as_circle(y)?) <= circle_resolution(m)?),
        _ => {
            let (x, y) = (as_config(x)?, as_config(y)?);
            Ok(sys.column_trace(x, m, horizon)? == sys.column_trace(y, m, horizon)?)
        }
    }
}

/// The orbit ball written out as the set of words on `W_rho`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct OrbitBallEvent {
    pub base: Configuration,
    pub m: usize,
    pub horizon: usize,
    pub rho: usize,
    /// Sorted lexicographically.
    pub words: Vec<Word>,
}

impl OrbitBallEvent {
    pub fn contains(&self, y: &Configuration) -> Result<bool> {
        let w = y.restrict(self.rho)?;
        Ok(self.words.binary_search(&w).is_ok())
    }
}

/// Exhaustive enumeration of `B^o_{m,T}(x)` over every word on `W_rho`.
pub fn orbit_ball_event(sys: &System, x: &Configuration, m: usize, horizon: usize, cap: u64) -> Result<OrbitBallEvent> {
    let rho = sys.dependence_radius(m, horizon);
    let target = sys.column_trace(x, m, horizon)?;
    let ext = Extensions::new(sys, rho, None, cap)?;
    let words = (0..ext.count())
        .into_par_iter()
        .map(|i| {
            let y = ext.get(i);
            Ok((sys.column_trace(&y, m, horizon)? == target).then(|| Word(y.symbols().to_vec())))
        })
        .collect::<Result<Vec<_>>>()?
        .into_iter()
        .flatten()
        .collect();
    Ok(OrbitBallEvent {
        base: x.truncate(rho)?,
        m,
        horizon,
        rho,
        words,
    })
}

/// Exact density ratio at horizon `T`, summing cylinder probabilities over
/// the extensions of `x_{W_n}` that stay in the orbit ball.
pub fn density_ratio_exact(
    sys: &System,
    mu: &Measure,
    x: &Point,
    m: usize,
    n: usize,
    horizon: usize,
    cap: u64,
) -> Result<f64> {
    check_measure(sys, mu)?;
    if n == 0 {
        return invalid("ball radius n must be at least 1");
    }
    if let System::Rotation(_) = sys {
        as_circle(x)?;
        circle_resolution(m)?;
        return Ok(arc_length(m.max(n)) / arc_length(n));
    }
    let x = as_config(x)?;
    sys.check_point(x)?;
    let ball = x.ball_cylinder(n)?;
    let denom = mu.cylinder_probability(&ball)?;
    if denom <= 0.0 {
        return Err(Error::NullBall);
    }
    let rho = sys.dependence_radius(m, horizon);
    let target = sys.column_trace(x, m, horizon)?;
    if n >= rho {
        return Ok(1.0);
    }
    let ext = Extensions::new(sys, rho, Some(ball.word()), cap)?;
    let split = par::chunked_sum(ext.count(), |i| {
        let y = ext.get(i);
        let mass = mu.cylinder_probability(&y.window_cylinder(rho)?)?;
        Ok(if sys.column_trace(&y, m, horizon)? == target {
            Split {
                inside: mass,
                outside: 0.0,
            }
        } else {
            Split {
                inside: 0.0,
                outside: mass,
            }
        })
    })?;
    // normalising by the enumerated total keeps the ratio exactly 1 when
    // nothing escapes
    Ok(split.inside / (split.inside + split.outside))
}

#[derive(Debug, Clone, Copy, Default)]
struct Split {
    inside: f64,
    outside: f64,
}

impl std::ops::Add for Split {
    type Output = Split;

    fn add(self, other: Split) -> Split {
        Split {
            inside: self.inside + other.inside,
            outside: self.outside + other.outside,
        }
    }
}

/// A Monte Carlo proportion with its binomial standard error.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct RatioEstimate {
    pub estimate: f64,
    pub stderr: f64,
    pub samples: u64,
    pub seed: u64,
    pub m: usize,
    pub n: usize,
    pub horizon: usize,
}

pub(crate) fn binomial_stderr(p: f64, samples: u64) -> f64 {
    (p * (1.0 - p) / samples as f64).sqrt()
}

/// Fraction of `y ~ mu( · | B_n(x))` that lie in `B^o_{m,T}(x)`.
#[allow(clippy::too_many_arguments)]
pub fn density_ratio_estimate(
    sys: &System,
    mu: &Measure,
    x: &Point,
    m: usize,
    n: usize,
    horizon: usize,
    samples: u64,
    seed: u64,
) -> Result<RatioEstimate> {
    check_measure(sys, mu)?;
    if n == 0 {
        return invalid("ball radius n must be at least 1");
    }
    if samples == 0 {
        return invalid("sample count must be positive");
    }
    let stream = SeedStream::new(seed);
    let hits: u64 = match sys {
        System::Rotation(_) => {
            let centre = as_circle(x)?;
            let radius = circle_resolution(m)?;
            let half = arc_length(n) / 2.0;
            par::chunked_sum(samples, |i| {
                let offset = stream.rng(i).random_range(-half..=half);
                Ok(u64::from(centre.rotate(offset).distance(centre) <= radius))
            })?
        }
        _ => {
            let x = as_config(x)?;
            sys.check_point(x)?;
            let ball = x.ball_cylinder(n)?;
            if mu.cylinder_probability(&ball)? <= 0.0 {
                return Err(Error::NullBall);
            }
            let rho = sys.dependence_radius(m, horizon);
            let target = sys.column_trace(x, m, horizon)?;
            let radius = rho.max(n);
            par::chunked_sum(samples, |i| {
                let y = mu.conditional_sample(&ball, radius, &mut stream.rng(i))?;
                Ok(u64::from(sys.column_trace(&y, m, horizon)? == target))
            })?
        }
    };
    let estimate = hits as f64 / samples as f64;
    Ok(RatioEstimate {
        estimate,
        stderr: binomial_stderr(estimate, samples),
        samples,
        seed,
        m,
        n,
        horizon,
    })
}

/// `B_n(x) ⊆ B^o_{m,T}(x)`, checked over every extension of `x_{W_n}`.
pub fn equicontinuity_point_test(
    sys: &System,
    x: &Point,
    m: usize,
    n: usize,
    horizon: usize,
    cap: u64,
) -> Result<bool> {
    if n == 0 {
        return invalid("ball radius n must be at least 1");
    }
    if let System::Rotation(_) = sys {
        as_circle(x)?;
        circle_resolution(m)?;
        return Ok(n >= m);
    }
    let x = as_config(x)?;
    sys.check_point(x)?;
    let rho = sys.dependence_radius(m, horizon);
    let target = sys.column_trace(x, m, horizon)?;
    if n >= rho {
        return Ok(true);
    }
    let ext = Extensions::new(sys, rho, Some(&x.restrict(n)?), cap)?;
    par::all(
        ext.count(),
        |i| Ok(sys.column_trace(&ext.get(i), m, horizon)? == target),
    )
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EquicontinuityParams {
    pub m: usize,
    pub n_list: Vec<usize>,
    pub horizon: usize,
    pub points: usize,
    pub samples: u64,
    pub delta: f64,
    pub cap: u64,
}

impl EquicontinuityParams {
    fn validate(&self) -> Result<()> {
        if self.n_list.is_empty() || self.n_list.contains(&0) {
            return invalid("n_list must be non-empty with every n >= 1");
        }
        if self.n_list.windows(2).any(|w| w[0] >= w[1]) {
            return invalid("n_list must be strictly increasing");
        }
        if self.points == 0 || self.samples == 0 {
            return invalid("points and samples must be positive");
        }
        if !(self.delta > 0.0 && self.delta < 1.0) {
            return invalid("delta must lie in (0, 1)");
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PointCurve {
    pub point: String,
    pub ratios: Vec<f64>,
    /// Monte Carlo standard errors; zero where the ratio is exact.
    pub stderr: Vec<f64>,
    /// Every ratio on the curve was computed exactly.
    pub exact: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EquicontinuityReport {
    pub params: EquicontinuityParams,
    pub seed: u64,
    pub points: Vec<PointCurve>,
    /// Share of points whose ratio at the largest `n` is at least `1 - delta`.
    pub fraction: f64,
    /// "exact", "monte_carlo" or "mixed".
    pub path: String,
}

/// Ratio curves over `n_list` for base points drawn from `mu`.
///
/// Each ratio is exact when its enumeration fits under `params.cap` and a
/// Monte Carlo estimate otherwise; base points share one draw on
/// `W_{max(rho, max n)}`.
pub fn mu_equicontinuity_report(
    sys: &System,
    mu: &Measure,
    params: &EquicontinuityParams,
    seed: u64,
) -> Result<EquicontinuityReport> {
    params.validate()?;
    check_measure(sys, mu)?;
    let rho = sys.dependence_radius(params.m, params.horizon);
    let radius = rho.max(*params.n_list.last().unwrap());
    let stream = SeedStream::new(seed);
    let bases = stream.substream(BASE_POINTS);
    let curves = (0..params.points)
        .into_par_iter()
        .map(|i| {
            let x = sample_point(sys, mu, radius, &mut bases.rng(i as u64))?;
            let mut ratios = Vec::with_capacity(params.n_list.len());
            let mut errs = Vec::with_capacity(params.n_list.len());
            let mut exact = true;
            for (j, &n) in params.n_list.iter().enumerate() {
                if free_word_count(sys, rho, n) <= params.cap as u128 {
                    ratios.push(density_ratio_exact(
                        sys,
                        mu,
                        &x,
                        params.m,
                        n,
                        params.horizon,
                        params.cap,
                    )?);
                    errs.push(0.0);
                } else {
                    let sub = stream.substream(RATIO_SAMPLES ^ ((i as u64) << 20) ^ j as u64).seed();
                    let est = density_ratio_estimate(sys, mu, &x, params.m, n, params.horizon, params.samples, sub)?;
                    ratios.push(est.estimate);
                    errs.push(est.stderr);
                    exact = false;
                }
            }
            Ok(PointCurve {
                point: render_point(&x),
                ratios,
                stderr: errs,
                exact,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    let good = curves
        .iter()
        .filter(|c| *c.ratios.last().unwrap() >= 1.0 - params.delta)
        .count();
    let path = match (curves.iter().all(|c| c.exact), curves.iter().any(|c| c.exact)) {
        (true, _) => "exact",
        (false, true) => "mixed",
        (false, false) => "monte_carlo",
    };
    Ok(EquicontinuityReport {
        params: params.clone(),
        seed,
        fraction: good as f64 / params.points as f64,
        points: curves,
        path: path.to_string(),
    })
}

pub(crate) fn render_point(x: &Point) -> String {
    match x {
        Point::Symbolic(c) => c.render(),
        Point::Circle(c) => format!("{}", c.angle()),
    }
}
