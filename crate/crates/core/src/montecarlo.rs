//! Seeded Monte Carlo checks of the frequentist identities behind the
//! calibrations.
//!
//! Draw `i` of a simulation is `true_theta + se · Φ⁻¹(u_i)` where `u_i` is the
//! `i`-th uniform of the Philox substream `(seed, stream)`. Because each draw
//! is addressed by index, the work can be split into chunks across any number
//! of threads and the integer hit count is identical regardless of how the
//! chunks were scheduled.

use std::num::NonZeroUsize;
use std::sync::atomic::{AtomicU64, Ordering};
use std::thread;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::normal_math;
use crate::rng::CounterRng;
use crate::roc::{self, RocModel, RocPoint, TANGENT_MATCH_TOL};
use crate::types::{Probability, ZScore};

pub const DEFAULT_N_SIMS: u64 = 1_000_000;

/// Draws per work unit.
const CHUNK: u64 = 1 << 15;

/// Substream ids used by the built-in checks.
pub mod streams {
    pub const EXCEEDANCE: u64 = 0;
    pub const SECANT_FPR: u64 = 1;
    pub const SECANT_TPR: u64 = 2;
    pub const SIGN_ERROR: u64 = 3;
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct McConfig {
    pub seed: u64,
    pub n_sims: u64,
    pub true_theta: f64,
    pub se: f64,
    /// Threshold for `x >= cutoff`. `-inf` and `+inf` are accepted as
    /// whole-space and empty-set sentinels.
    pub cutoff: f64,
    pub stream: u64,
}

impl McConfig {
    pub fn new(seed: u64, n_sims: u64, true_theta: f64, se: f64, cutoff: f64) -> Result<Self> {
        let cfg = Self {
            seed,
            n_sims,
            true_theta,
            se,
            cutoff,
            stream: streams::EXCEEDANCE,
        };
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn on_stream(mut self, stream: u64) -> Self {
        self.stream = stream;
        self
    }

    fn validate(&self) -> Result<()> {
        if self.n_sims == 0 {
            return Err(Error::InvalidConfig("n_sims must be at least 1".into()));
        }
        if !(self.se.is_finite() && self.se > 0.0) {
            return Err(Error::InvalidConfig(format!(
                "se must be positive and finite, got {}",
                self.se
            )));
        }
        if !self.true_theta.is_finite() {
            return Err(Error::InvalidConfig(format!(
                "true_theta must be finite, got {}",
                self.true_theta
            )));
        }
        if self.cutoff.is_nan() {
            return Err(Error::InvalidConfig("cutoff is NaN".into()));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct McEstimate {
    pub estimate: Probability,
    /// `sqrt(estimate (1 - estimate) / n_sims)`.
    pub std_error: f64,
    pub n_sims: u64,
    pub seed: u64,
    pub hits: u64,
}

impl McEstimate {
    fn from_hits(hits: u64, n_sims: u64, seed: u64) -> Result<Self> {
        let est = hits as f64 / n_sims as f64;
        Ok(Self {
            estimate: Probability::closed(est)?,
            std_error: (est * (1.0 - est) / n_sims as f64).sqrt(),
            n_sims,
            seed,
            hits,
        })
    }

    /// Number of standard errors between the estimate and `target`.
    /// Infinite when the estimate has zero spread but misses the target.
    pub fn z_distance(&self, target: f64) -> f64 {
        let diff = (self.estimate.value() - target).abs();
        if diff == 0.0 {
            0.0
        } else {
            diff / self.std_error
        }
    }
}

pub fn default_workers() -> NonZeroUsize {
    thread::available_parallelism().unwrap_or(NonZeroUsize::MIN)
}

/// Counts indices `i < n` whose normal variate `z_i = Φ⁻¹(u_i)` satisfies
/// `hit`. Chunks are claimed from a shared counter; only the sum of the
/// per-chunk counts is kept, so scheduling cannot affect the result.
fn count_hits<F>(rng: CounterRng, n: u64, workers: NonZeroUsize, hit: F) -> u64
where
    F: Fn(f64) -> bool + Sync,
{
    let n_chunks = n.div_ceil(CHUNK);
    let count_chunk = |chunk: u64| -> u64 {
        let start = chunk * CHUNK;
        let end = (start + CHUNK).min(n);
        (start..end)
            .filter(|&i| hit(normal_math::quantile(rng.uniform(i))))
            .count() as u64
    };

    let workers = workers.get().min(n_chunks as usize).max(1);
    if workers == 1 {
        return (0..n_chunks).map(count_chunk).sum();
    }

    let next = AtomicU64::new(0);
    thread::scope(|scope| {
        let handles: Vec<_> = (0..workers)
            .map(|_| {
                scope.spawn(|| {
                    let mut total = 0u64;
                    loop {
                        let chunk = next.fetch_add(1, Ordering::Relaxed);
                        if chunk >= n_chunks {
                            break total;
                        }
                        total += count_chunk(chunk);
                    }
                })
            })
            .collect();
        handles
            .into_iter()
            .map(|h| h.join().expect("simulation worker panicked"))
            .sum()
    })
}

/// Fraction of draws from `N(true_theta, se²)` at or above `cutoff`.
pub fn estimate_exceedance(cfg: &McConfig) -> Result<McEstimate> {
    estimate_exceedance_with(cfg, default_workers())
}

pub fn estimate_exceedance_with(cfg: &McConfig, workers: NonZeroUsize) -> Result<McEstimate> {
    cfg.validate()?;
    let rng = CounterRng::new(cfg.seed).split(cfg.stream);
    let (theta, se, cutoff) = (cfg.true_theta, cfg.se, cfg.cutoff);
    let hits = count_hits(rng, cfg.n_sims, workers, |z| theta + se * z >= cutoff);
    McEstimate::from_hits(hits, cfg.n_sims, cfg.seed)
}

/// Empirical versus analytic secant-product LR at one binormal ROC point.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SecantProductCheck {
    pub delta: f64,
    pub cutoff: f64,
    pub fpr: McEstimate,
    pub tpr: McEstimate,
    pub empirical_lr: f64,
    /// Delta-method standard error of `empirical_lr`, treating the FPR and
    /// TPR estimates as independent.
    pub empirical_lr_se: f64,
    pub analytic_lr: f64,
    pub tangent_lr: f64,
    /// Tangent slope and secant product differ by more than
    /// [`TANGENT_MATCH_TOL`] (relative).
    pub tangent_differs: bool,
}

impl SecantProductCheck {
    pub fn z_distance(&self) -> f64 {
        let diff = (self.empirical_lr - self.analytic_lr).abs();
        if diff == 0.0 {
            0.0
        } else {
            diff / self.empirical_lr_se
        }
    }
}

/// Estimates FPR (true effect 0) and TPR (true effect `delta`) at `cutoff`
/// on independent substreams and compares the empirical
/// `(TPR - TPR²)/(FPR - FPR²)` with the analytic value and the tangent.
pub fn verify_secant_product(
    delta: ZScore,
    cutoff: f64,
    n_sims: u64,
    seed: u64,
) -> Result<SecantProductCheck> {
    verify_secant_product_with(delta, cutoff, n_sims, seed, default_workers())
}

pub fn verify_secant_product_with(
    delta: ZScore,
    cutoff: f64,
    n_sims: u64,
    seed: u64,
    workers: NonZeroUsize,
) -> Result<SecantProductCheck> {
    let model = RocModel::new(delta.value())?;
    let analytic_pt = roc::roc_point(&model, cutoff)?;
    let analytic_lr = roc::secant_product_lr(&analytic_pt)?.value();
    let tangent_lr = roc::tangent_lr(&model, cutoff)?.value();

    let fpr_cfg = McConfig::new(seed, n_sims, 0.0, 1.0, cutoff)?.on_stream(streams::SECANT_FPR);
    let tpr_cfg =
        McConfig::new(seed, n_sims, delta.value(), 1.0, cutoff)?.on_stream(streams::SECANT_TPR);
    let fpr = estimate_exceedance_with(&fpr_cfg, workers)?;
    let tpr = estimate_exceedance_with(&tpr_cfg, workers)?;

    let empirical_pt = RocPoint::new(fpr.estimate.value(), tpr.estimate.value())?;
    let empirical_lr = roc::secant_product_lr(&empirical_pt)?.value();

    // d/df and d/dt of t(1-t) / (f(1-f))
    let (f, t) = (fpr.estimate.value(), tpr.estimate.value());
    let d_f = -empirical_lr * (1.0 - 2.0 * f) / (f * (1.0 - f));
    let d_t = (1.0 - 2.0 * t) / (f * (1.0 - f));
    let empirical_lr_se = ((d_f * fpr.std_error).powi(2) + (d_t * tpr.std_error).powi(2)).sqrt();

    Ok(SecantProductCheck {
        delta: delta.value(),
        cutoff,
        fpr,
        tpr,
        empirical_lr,
        empirical_lr_se,
        analytic_lr,
        tangent_lr,
        tangent_differs: (tangent_lr / analytic_lr - 1.0).abs() > TANGENT_MATCH_TOL,
    })
}

/// Fraction of simulated estimates landing strictly on the other side of
/// `delta` from `true_theta`.
pub fn sign_error_frequency(
    true_theta: f64,
    se: f64,
    delta: f64,
    n_sims: u64,
    seed: u64,
) -> Result<McEstimate> {
    sign_error_frequency_with(true_theta, se, delta, n_sims, seed, default_workers())
}

pub fn sign_error_frequency_with(
    true_theta: f64,
    se: f64,
    delta: f64,
    n_sims: u64,
    seed: u64,
    workers: NonZeroUsize,
) -> Result<McEstimate> {
    if !delta.is_finite() {
        return Err(Error::InvalidConfig(format!(
            "delta must be finite, got {delta}"
        )));
    }
    if true_theta == delta {
        return Err(Error::InvalidConfig(
            "true_theta equals delta: the sign of the true effect is undefined".into(),
        ));
    }
    let cfg = McConfig::new(seed, n_sims, true_theta, se, delta)?.on_stream(streams::SIGN_ERROR);
    let rng = CounterRng::new(seed).split(cfg.stream);
    let above = true_theta > delta;
    let hits = count_hits(rng, n_sims, workers, |z| {
        let x = true_theta + se * z;
        if above {
            x < delta
        } else {
            x > delta
        }
    });
    McEstimate::from_hits(hits, n_sims, seed)
}
