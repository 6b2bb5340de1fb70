//! Koopman eigenfunctions of locally periodic systems on Cantor spaces.
//!
//! For a point `y` whose resolution-`m` trace is periodic with minimal
//! period `p`, the orbit balls `B^o_m(T^j y)`, `0 <= j < p`, are permuted
//! cyclically by `T`, and
//!
//! ```text
//! f_{m,y,k} = sum_j lambda^{jk} 1_{B^o_m(T^j y)},   lambda = exp(2 pi i / p)
//! ```
//!
//! satisfies `f(T x) = lambda^k f(x)`. Eigenvalues are stored as the pair
//! `(k, p)` and evaluated with the exponent reduced mod `p`.

use std::collections::HashMap;

use num_complex::Complex64;
use serde::Serialize;

use crate::error::{invalid, Error, Result};
use crate::measures::Measure;
use crate::orbit::{self, Extensions};
use crate::par;
use crate::periodicity::lep_certificate;
use crate::rng::SeedStream;
use crate::space::{Configuration, Word};
use crate::systems::{Point, System};

/// `exp(2 pi i j / p)`. Quarter turns are returned exactly.
pub fn root_of_unity(p: usize, j: i64) -> Complex64 {
    assert!(p >= 1, "period must be positive");
    let r = j.rem_euclid(p as i64) as usize;
    if (4 * r).is_multiple_of(p) {
        return match 4 * r / p {
            0 => Complex64::new(1.0, 0.0),
            1 => Complex64::new(0.0, 1.0),
            2 => Complex64::new(-1.0, 0.0),
            _ => Complex64::new(0.0, -1.0),
        };
    }
    let (s, c) = (std::f64::consts::TAU * r as f64 / p as f64).sin_cos();
    Complex64::new(c, s)
}

/// Data fixing `f_{m,y,k}`: the system, a certified periodic base point,
/// the resolution and the frequency `k`.
#[derive(Debug, Clone, PartialEq)]
pub struct EigenfunctionSpec {
    system: System,
    base: Configuration,
    m: usize,
    k: usize,
    /// `(T^j y)_{W_m}` for `0 <= j < p`.
    pattern: Vec<Word>,
}

impl EigenfunctionSpec {
    /// Certifies `y` on its trace to `certificate_horizon`; the certificate
    /// must have preperiod 0.
    pub fn new(system: &System, y: &Configuration, m: usize, k: usize, certificate_horizon: usize) -> Result<Self> {
        let cert = lep_certificate(system, y, m, certificate_horizon)?
            .filter(|c| c.preperiod == 0)
            .ok_or(Error::NotLocallyPeriodic {
                m,
                horizon: certificate_horizon,
            })?;
        if k >= cert.period {
            return invalid(format!("frequency {k} must be below the period {}", cert.period));
        }
        let trace = system.column_trace(y, m, certificate_horizon)?;
        Ok(EigenfunctionSpec {
            system: system.clone(),
            base: y.clone(),
            m,
            k,
            pattern: trace[..cert.period].to_vec(),
        })
    }

    /// Same base point and resolution, another frequency.
    pub fn with_frequency(&self, k: usize) -> Result<Self> {
        if k >= self.period() {
            return invalid(format!("frequency {k} must be below the period {}", self.period()));
        }
        Ok(EigenfunctionSpec { k, ..self.clone() })
    }

    pub fn system(&self) -> &System {
        &self.system
    }

    pub fn base(&self) -> &Configuration {
        &self.base
    }

    pub fn m(&self) -> usize {
        self.m
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn period(&self) -> usize {
        self.pattern.len()
    }

    pub fn eigenvalue(&self) -> Complex64 {
        root_of_unity(self.period(), self.k as i64)
    }

    /// `lambda^{jk}`.
    pub fn weight(&self, j: usize) -> Complex64 {
        root_of_unity(self.period(), (j as i64) * (self.k as i64))
    }

    /// Index the balls at horizon `T`, refusing overlapping balls.
    pub fn balls(&self, horizon: usize) -> Result<BallIndex<'_>> {
        let p = self.period();
        let mut by_trace: HashMap<Vec<Word>, usize> = HashMap::with_capacity(p);
        for j in 0..p {
            let reference: Vec<Word> = (0..=horizon).map(|i| self.pattern[(i + j) % p].clone()).collect();
            if let Some(&first) = by_trace.get(&reference) {
                return Err(Error::OverlappingBalls {
                    first,
                    second: j,
                    horizon,
                });
            }
            by_trace.insert(reference, j);
        }
        Ok(BallIndex {
            spec: self,
            horizon,
            by_trace,
        })
    }
}

/// The `p` pairwise disjoint balls `B^o_{m,T}(T^j y)`.
pub struct BallIndex<'a> {
    spec: &'a EigenfunctionSpec,
    horizon: usize,
    by_trace: HashMap<Vec<Word>, usize>,
}

impl BallIndex<'_> {
    pub fn horizon(&self) -> usize {
        self.horizon
    }

    /// The `j` with `x ∈ B^o_{m,T}(T^j y)`, if any.
    pub fn locate(&self, x: &Configuration) -> Result<Option<usize>> {
        let trace = self.spec.system.column_trace(x, self.spec.m, self.horizon)?;
        Ok(self.by_trace.get(&trace).copied())
    }

    pub fn eval(&self, x: &Configuration) -> Result<Complex64> {
        Ok(match self.locate(x)? {
            Some(j) => self.spec.weight(j),
            None => Complex64::new(0.0, 0.0),
        })
    }
}

/// `f_{m,y,k}(x)` at horizon `T`.
pub fn eigenfunction_eval(spec: &EigenfunctionSpec, x: &Configuration, horizon: usize) -> Result<Complex64> {
    spec.balls(horizon)?.eval(x)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum IntegrationMode {
    /// Sum over the cylinder partition of the dependence window.
    Exact { cap: u64 },
    /// Average over independent draws from the measure.
    Sampled { samples: u64, seed: u64 },
}

// E_mu[g] for a function of the configuration on W_radius
fn integrate<T, G>(sys: &System, mu: &Measure, radius: usize, mode: IntegrationMode, g: G) -> Result<T>
where
    T: Send
        + Copy
        + Default
        + std::ops::Add<Output = T>
        + std::ops::Div<f64, Output = T>
        + std::ops::Mul<f64, Output = T>,
    G: Fn(&Configuration) -> Result<T> + Sync,
{
    orbit::check_measure(sys, mu)?;
    match mode {
        IntegrationMode::Exact { cap } => {
            let ext = Extensions::new(sys, radius, None, cap)?;
            par::chunked_sum(ext.count(), |i| {
                let w = ext.get(i);
                let mass = mu.cylinder_probability(&w.window_cylinder(radius)?)?;
                if mass == 0.0 {
                    Ok(T::default())
                } else {
                    Ok(g(&w)? * mass)
                }
            })
        }
        IntegrationMode::Sampled { samples, seed } => {
            if samples == 0 {
                return invalid("sample count must be positive");
            }
            let stream = SeedStream::new(seed);
            let total = par::chunked_sum(samples, |i| {
                let Point::Symbolic(x) = orbit::sample_point(sys, mu, radius, &mut stream.rng(i))? else {
                    unreachable!("symbolic system")
                };
                g(&x)
            })?;
            Ok(total / samples as f64)
        }
    }
}

/// `|| f∘T - lambda^k f ||_{L^2(mu)}` at horizon `T`.
pub fn koopman_residual(spec: &EigenfunctionSpec, mu: &Measure, mode: IntegrationMode, horizon: usize) -> Result<f64> {
    let sys = &spec.system;
    let balls = spec.balls(horizon)?;
    let lambda = spec.eigenvalue();
    // x on W_{rho(T+1)} determines both f(x) and f(T x)
    let radius = sys.dependence_radius(spec.m, horizon + 1);
    let mean_square: f64 = integrate(sys, mu, radius, mode, |x| {
        let image = sys.step_config(x)?;
        Ok((balls.eval(&image)? - lambda * balls.eval(x)?).norm_sqr())
    })?;
    Ok(mean_square.max(0.0).sqrt())
}

/// `<f_a, f_b>_{L^2(mu)}` at horizon `T`.
pub fn inner_product(
    a: &EigenfunctionSpec,
    b: &EigenfunctionSpec,
    mu: &Measure,
    mode: IntegrationMode,
    horizon: usize,
) -> Result<Complex64> {
    if a.system != b.system {
        return invalid("eigenfunctions belong to different systems");
    }
    let sys = &a.system;
    let (ba, bb) = (a.balls(horizon)?, b.balls(horizon)?);
    let radius = sys.dependence_radius(a.m.max(b.m), horizon);
    integrate(sys, mu, radius, mode, |x| Ok(ba.eval(x)? * bb.eval(x)?.conj()))
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SpectrumEntry {
    pub p: usize,
    pub k: usize,
    /// `[re, im]`.
    pub eigenvalue: Complex64,
    pub residual: f64,
    pub norm: f64,
}

/// Residual and norm of `f_{m,y,k}` for every `k < p`.
pub fn spectrum(
    base: &EigenfunctionSpec,
    mu: &Measure,
    mode: IntegrationMode,
    horizon: usize,
) -> Result<Vec<SpectrumEntry>> {
    (0..base.period())
        .map(|k| {
            let spec = base.with_frequency(k)?;
            let norm_sq = inner_product(&spec, &spec, mu, mode, horizon)?.re;
            Ok(SpectrumEntry {
                p: spec.period(),
                k,
                eigenvalue: spec.eigenvalue(),
                residual: koopman_residual(&spec, mu, mode, horizon)?,
                norm: norm_sq.max(0.0).sqrt(),
            })
        })
        .collect()
}
