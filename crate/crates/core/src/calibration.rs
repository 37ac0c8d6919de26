//! Four ways to turn a one-sided p-value (or its z-statistic) into a
//! likelihood ratio or minimum Bayes factor, and the odds-form Bayes rule
//! that turns any of them into a posterior probability.
//!
//! Every calibration is reported in favored-direction form: values above 1
//! support the hypothesis on the side of the observed (or favored) effect.
//! Sellke's bound is naturally null-favoring; its raw value stays available.

use std::fmt;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::normal_math;
use crate::types::{LikelihoodRatio, Odds, Orientation, Probability, ZScore};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Method {
    Marsman,
    MleLr,
    Goodman,
    Sellke,
}

impl Method {
    /// Display order of the comparison table.
    pub const ALL: [Method; 4] = [
        Method::Marsman,
        Method::MleLr,
        Method::Goodman,
        Method::Sellke,
    ];

    /// Machine name used in column keys.
    pub fn key(self) -> &'static str {
        match self {
            Method::Marsman => "marsman",
            Method::MleLr => "mle",
            Method::Goodman => "goodman",
            Method::Sellke => "sellke",
        }
    }

    pub fn label(self) -> &'static str {
        match self {
            Method::Marsman => "Marsman et al (2017)",
            Method::MleLr => "MLE-LR",
            Method::Goodman => "Goodman (1999)",
            Method::Sellke => "Sellke et al (2001)",
        }
    }

    /// Formula as conventionally written for the method.
    pub fn formula(self) -> &'static str {
        match self {
            Method::Marsman => "(1-P)/P",
            Method::MleLr => "0.25/(P-P^2)",
            Method::Goodman => "exp(Z^2/2)",
            Method::Sellke => "-e p log(p)",
        }
    }

    /// The prior the calibration implicitly assumes.
    pub fn implied_prior(self) -> &'static str {
        match self {
            Method::Marsman => "Uniform",
            Method::MleLr | Method::Goodman => "1:1 odds",
            Method::Sellke => "Beta prior",
        }
    }
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.key())
    }
}

/// `0.25 / (p (1 - p))`: the likelihood ratio of the test whose cutoff sits
/// at the observed effect, where TPR = 1/2 and FPR = p.
pub fn mle_lr(p: Probability) -> Result<LikelihoodRatio> {
    let p = open_p(p)?;
    LikelihoodRatio::favored(0.25 / (p * (1.0 - p)))
}

/// Goodman-Edwards `exp(z²/2)`: point alternative at the observed effect
/// against a point null. Even in `z`, so it ignores direction.
pub fn goodman_lr(z: ZScore) -> Result<LikelihoodRatio> {
    let z = z.value();
    LikelihoodRatio::favored((0.5 * z * z).exp())
}

/// `(1 - p) / p`: posterior odds of the observed direction under a flat
/// prior, where the one-sided p is the posterior of the opposite direction.
pub fn marsman_lr(p: Probability) -> Result<LikelihoodRatio> {
    let p = open_p(p)?;
    LikelihoodRatio::favored((1.0 - p) / p)
}

/// Sellke-Bayarri-Berger bound `-e p ln p`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SellkeBound {
    /// `-e p ln p`, a null-favoring minimum Bayes factor.
    pub raw: f64,
    /// `1 / raw`, in favored-direction form.
    pub lr: LikelihoodRatio,
    /// The bound is only derived for `p < 1/e`.
    pub within_validity: bool,
}

pub fn sellke_mbf(p: Probability) -> Result<SellkeBound> {
    let p = open_p(p)?;
    let raw = -std::f64::consts::E * p * p.ln();
    let lr = LikelihoodRatio::new(raw, Orientation::NullFavoring)?.to_favored();
    Ok(SellkeBound {
        raw,
        lr,
        within_validity: p < (-1.0f64).exp(),
    })
}

/// Posterior odds = prior odds × LR. The LR is read in its stated
/// orientation, so the result refers to the numerator hypothesis.
pub fn posterior_odds(lr: LikelihoodRatio, prior: Odds) -> Result<Odds> {
    Odds::new(prior.value() * lr.value())
}

/// `prior·lr / (1 + prior·lr)`.
pub fn posterior_from_lr(lr: LikelihoodRatio, prior: Odds) -> Result<Probability> {
    Ok(posterior_odds(lr, prior)?.to_probability())
}

/// One-sided p toward the observed direction: `Φ(-|z|)`.
pub fn one_sided_p_from_z(z: ZScore) -> Result<Probability> {
    Probability::new(normal_math::cdf(-z.value().abs()))
}

/// The z-statistic matching a one-sided p: `Φ⁻¹(1 - p)`, nonnegative for
/// `p <= 1/2`.
pub fn z_from_one_sided_p(p: Probability) -> Result<ZScore> {
    Ok(-normal_math::std_normal_quantile(p)?)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CalibrationRow {
    pub method: Method,
    pub lr: LikelihoodRatio,
    pub posterior: Probability,
    pub prior_description: String,
    /// False only for Sellke rows outside `p < 1/e`.
    pub valid: bool,
}

impl CalibrationRow {
    fn new(method: Method, lr: LikelihoodRatio, prior: Odds, valid: bool) -> Result<Self> {
        Ok(Self {
            method,
            lr,
            posterior: posterior_from_lr(lr, prior)?,
            prior_description: describe_prior(method, prior),
            valid,
        })
    }

    /// The same row with its LR inverted and posterior recomputed.
    pub fn reoriented(&self, prior: Odds) -> Result<Self> {
        let lr = LikelihoodRatio::favored(1.0 / self.lr.value())?;
        Self::new(self.method, lr, prior, self.valid)
    }
}

fn describe_prior(method: Method, prior: Odds) -> String {
    if prior == Odds::EVEN {
        method.implied_prior().to_string()
    } else {
        format!("{} (prior odds {})", method.implied_prior(), prior.value())
    }
}

/// The four calibrations for one `(p, z)` pair, in [`Method::ALL`] order.
pub fn rows_for(p: Probability, z: ZScore, prior: Odds) -> Result<Vec<CalibrationRow>> {
    let sellke = sellke_mbf(p)?;
    Ok(vec![
        CalibrationRow::new(Method::Marsman, marsman_lr(p)?, prior, true)?,
        CalibrationRow::new(Method::MleLr, mle_lr(p)?, prior, true)?,
        CalibrationRow::new(Method::Goodman, goodman_lr(z)?, prior, true)?,
        CalibrationRow::new(Method::Sellke, sellke.lr, prior, sellke.within_validity)?,
    ])
}

/// All four calibrations at `z`, with `p = Φ(-|z|)`, sorted by descending
/// LR. The sort is stable, so ties keep [`Method::ALL`] order.
pub fn calibration_table(z: ZScore, prior: Odds) -> Result<Vec<CalibrationRow>> {
    let p = one_sided_p_from_z(z)?;
    let mut rows = rows_for(p, z, prior)?;
    rows.sort_by(|a, b| b.lr.value().total_cmp(&a.lr.value()));
    Ok(rows)
}

/// Rows in [`Method::ALL`] order computed from `p` rounded to two decimals,
/// the precision at which such tables are usually printed. Goodman's row
/// depends on `z` alone and is unaffected.
pub fn table_with_rounded_p(z: ZScore, prior: Odds) -> Result<Vec<CalibrationRow>> {
    let p = one_sided_p_from_z(z)?;
    let rounded = Probability::new((p.value() * 100.0).round() / 100.0)?;
    rows_for(rounded, z, prior)
}

fn open_p(p: Probability) -> Result<f64> {
    if p.is_interior() {
        Ok(p.value())
    } else {
        Err(Error::OutOfDomain {
            what: "p-value",
            value: p.value(),
            domain: "(0, 1)",
        })
    }
}
