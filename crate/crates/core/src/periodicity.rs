//! Local (eventual) periodicity of column traces.
//!
//! On a Cantor space `d(T^i x, T^{i+jp} x) <= 1/m` is window agreement, so
//! a point is locally eventually periodic at resolution `m` exactly when
//! its resolution-`m` column trace is eventually periodic. A finite trace
//! can only give evidence for that; certificates are always "(m, T)
//! certified" and never more.

use rayon::prelude::*;
use serde::Serialize;

use crate::error::{invalid, Error, Result};
use crate::measures::Measure;
use crate::orbit::{self, EquicontinuityParams, EquicontinuityReport};
use crate::rng::SeedStream;
use crate::space::{Configuration, Word};
use crate::systems::{Point, System};

const LEP_POINTS: u64 = 0x1E9;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum CertificateKind {
    #[serde(rename = "LP")]
    Periodic,
    #[serde(rename = "LEP")]
    EventuallyPeriodic,
}

/// Evidence that `trace[i] = trace[i + p]` for `q <= i <= T - p`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct PeriodCertificate {
    pub m: usize,
    #[serde(rename = "T")]
    pub horizon: usize,
    #[serde(rename = "p")]
    pub period: usize,
    #[serde(rename = "q")]
    pub preperiod: usize,
}

impl PeriodCertificate {
    pub fn kind(&self) -> CertificateKind {
        if self.preperiod == 0 {
            CertificateKind::Periodic
        } else {
            CertificateKind::EventuallyPeriodic
        }
    }

    /// Replays the periodicity condition on `trace`.
    pub fn verify(&self, trace: &[Word]) -> bool {
        trace.len() == self.horizon + 1 && periodic_from(trace, self.period, self.preperiod)
    }
}

fn periodic_from(trace: &[Word], p: usize, q: usize) -> bool {
    p >= 1 && (q..trace.len().saturating_sub(p)).all(|i| trace[i] == trace[i + p])
}

/// Whether `(p, q)` carries enough evidence on a trace of horizon `t`: two
/// full periods after the preperiod, and a periodic part covering at least
/// half the trace.
pub fn sufficient_evidence(t: usize, p: usize, q: usize) -> bool {
    p >= 1 && q <= t && t - q >= 2 * p && 2 * q <= t
}

/// Smallest period `p`, then smallest preperiod `q` for that `p`, such that
/// `trace` repeats with period `p` from `q` on with sufficient evidence.
pub fn detect_eventual_period(trace: &[Word]) -> Option<(usize, usize)> {
    let t = trace.len().checked_sub(1)?;
    (1..=t / 2).find_map(|p| {
        // scan back from the end while the period holds
        let mut q = t - p + 1;
        while q > 0 && trace[q - 1] == trace[q - 1 + p] {
            q -= 1;
        }
        sufficient_evidence(t, p, q).then_some((p, q))
    })
}

/// Period certificate of the resolution-`m` trace of `x` to horizon `T`.
pub fn lep_certificate(sys: &System, x: &Configuration, m: usize, horizon: usize) -> Result<Option<PeriodCertificate>> {
    let trace = sys.column_trace(x, m, horizon)?;
    Ok(
        detect_eventual_period(&trace).map(|(period, preperiod)| PeriodCertificate {
            m,
            horizon,
            period,
            preperiod,
        }),
    )
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct LepStatistics {
    pub m: usize,
    pub eps: f64,
    #[serde(rename = "T")]
    pub horizon: usize,
    pub samples: u64,
    pub seed: u64,
    /// Smallest `p` such that at least `(1 - eps) N` samples are certified
    /// with period at most `p`; `None` if too few samples are certified.
    pub period_bound: Option<usize>,
    /// Smallest `q` such that at least `(1 - eps) N` samples are certified
    /// with `p <= period_bound` and preperiod at most `q`.
    pub preperiod_bound: Option<usize>,
    pub certified_fraction: f64,
    /// Share certified with preperiod 0.
    pub periodic_fraction: f64,
}

/// Certifies `N` points drawn from `mu` and summarises their periods.
pub fn lep_statistics(
    sys: &System,
    mu: &Measure,
    m: usize,
    eps: f64,
    samples: u64,
    horizon: usize,
    seed: u64,
) -> Result<LepStatistics> {
    if !(eps > 0.0 && eps < 1.0) {
        return invalid("eps must lie in (0, 1)");
    }
    if samples == 0 {
        return invalid("sample count must be positive");
    }
    if !sys.is_symbolic() {
        return Err(Error::UnsupportedSystem("rotation"));
    }
    let rho = sys.dependence_radius(m, horizon);
    let stream = SeedStream::new(seed).substream(LEP_POINTS);
    let certs: Vec<Option<(usize, usize)>> = (0..samples)
        .into_par_iter()
        .map(|i| {
            let Point::Symbolic(x) = orbit::sample_point(sys, mu, rho, &mut stream.rng(i))? else {
                unreachable!("symbolic system")
            };
            Ok(lep_certificate(sys, &x, m, horizon)?.map(|c| (c.period, c.preperiod)))
        })
        .collect::<Result<_>>()?;

    let certified: Vec<(usize, usize)> = certs.iter().flatten().copied().collect();
    let needed = ((1.0 - eps) * samples as f64 - 1e-9).ceil().max(1.0) as usize;
    let (period_bound, preperiod_bound) = if certified.len() < needed {
        (None, None)
    } else {
        let mut periods: Vec<usize> = certified.iter().map(|c| c.0).collect();
        periods.sort_unstable();
        let p_hat = periods[needed - 1];
        let mut pre: Vec<usize> = certified.iter().filter(|c| c.0 <= p_hat).map(|c| c.1).collect();
        pre.sort_unstable();
        (Some(p_hat), Some(pre[needed - 1]))
    };
    let periodic = certified.iter().filter(|c| c.1 == 0).count();
    Ok(LepStatistics {
        m,
        eps,
        horizon,
        samples,
        seed,
        period_bound,
        preperiod_bound,
        certified_fraction: certified.len() as f64 / samples as f64,
        periodic_fraction: periodic as f64 / samples as f64,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum LepVerdict {
    #[serde(rename = "mu-LP")]
    MuLp,
    #[serde(rename = "mu-LEP")]
    MuLep,
    #[serde(rename = "neither at scale")]
    Neither,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct LepClassification {
    pub statistics: Vec<LepStatistics>,
    pub verdict: LepVerdict,
    /// Attached whenever the verdict is mu-LP or mu-LEP, as a consistency
    /// check: such systems should also look mu-equicontinuous.
    pub equicontinuity: Option<EquicontinuityReport>,
}

/// mu-LP when at least `(1 - eps)` of the samples are certified periodic at
/// every resolution in `m_list`; mu-LEP when that share is reached allowing
/// preperiods.
#[allow(clippy::too_many_arguments)]
pub fn mu_lep_classify(
    sys: &System,
    mu: &Measure,
    m_list: &[usize],
    eps: f64,
    samples: u64,
    horizon: usize,
    seed: u64,
    equicontinuity: &EquicontinuityParams,
) -> Result<LepClassification> {
    if m_list.is_empty() {
        return invalid("m_list must be non-empty");
    }
    let stream = SeedStream::new(seed);
    let statistics = m_list
        .iter()
        .map(|&m| lep_statistics(sys, mu, m, eps, samples, horizon, stream.substream(m as u64).seed()))
        .collect::<Result<Vec<_>>>()?;
    let level = 1.0 - eps;
    let verdict = if statistics.iter().all(|s| s.periodic_fraction >= level) {
        LepVerdict::MuLp
    } else if statistics.iter().all(|s| s.certified_fraction >= level) {
        LepVerdict::MuLep
    } else {
        LepVerdict::Neither
    };
    let equicontinuity = match verdict {
        LepVerdict::Neither => None,
        _ => Some(orbit::mu_equicontinuity_report(
            sys,
            mu,
            equicontinuity,
            stream.substream(u64::MAX).seed(),
        )?),
    };
    Ok(LepClassification {
        statistics,
        verdict,
        equicontinuity,
    })
}
