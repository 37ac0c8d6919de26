//! Evidential analysis of a single trial against a dividing value Δ.
//!
//! The one-sided p-value is taken toward the observed direction, so it is the
//! FPR of the test whose cutoff is the observed effect. Likelihood ratios are
//! then oriented to the favored direction: an effect on the favored side
//! gives LR > 1, an effect on the other side gives LR < 1.

use serde::Serialize;

use crate::calibration::{self, CalibrationRow, Method};
use crate::error::{finite, Error, Result};
use crate::normal_math::{self, binomial_tail};
use crate::types::{Odds, Probability, ZScore};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Direction {
    Greater,
    Less,
}

impl Direction {
    pub fn as_str(self) -> &'static str {
        match self {
            Direction::Greater => "greater",
            Direction::Less => "less",
        }
    }
}

impl std::str::FromStr for Direction {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "greater" => Ok(Direction::Greater),
            "less" => Ok(Direction::Less),
            other => Err(format!("unknown direction {other:?}")),
        }
    }
}

/// Summary statistics of a trial.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct TrialSpec {
    pub theta_obs: f64,
    pub se: f64,
    /// Dividing value Δ, in the same units as `theta_obs`.
    pub delta: f64,
    /// Pre-specified direction of interest. When absent, reports orient to
    /// the observed direction.
    pub favored_direction: Option<Direction>,
    pub n: Option<u64>,
}

impl TrialSpec {
    pub fn new(theta_obs: f64, se: f64, delta: f64) -> Result<Self> {
        finite("theta_obs", theta_obs)?;
        finite("delta", delta)?;
        if !(se.is_finite() && se > 0.0) {
            return Err(Error::OutOfDomain {
                what: "standard error",
                value: se,
                domain: "(0, inf)",
            });
        }
        Ok(Self {
            theta_obs,
            se,
            delta,
            favored_direction: None,
            n: None,
        })
    }

    pub fn favoring(mut self, direction: Direction) -> Self {
        self.favored_direction = Some(direction);
        self
    }

    pub fn with_n(mut self, n: u64) -> Self {
        self.n = Some(n);
        self
    }

    /// Side of Δ the estimate landed on; `None` exactly at Δ.
    pub fn observed_direction(&self) -> Option<Direction> {
        if self.theta_obs > self.delta {
            Some(Direction::Greater)
        } else if self.theta_obs < self.delta {
            Some(Direction::Less)
        } else {
            None
        }
    }

    /// False only when both directions are known and differ.
    pub fn observed_matches_favored(&self) -> bool {
        match (self.favored_direction, self.observed_direction()) {
            (Some(f), Some(o)) => f == o,
            _ => true,
        }
    }
}

/// `(θ_obs - Δ) / se`.
pub fn z_statistic(trial: &TrialSpec) -> Result<ZScore> {
    ZScore::new((trial.theta_obs - trial.delta) / trial.se)
}

/// `Φ(-|z|)`: probability of an estimate at least this far from Δ on the
/// observed side if the true effect sat at Δ.
pub fn one_sided_p(trial: &TrialSpec) -> Result<Probability> {
    calibration::one_sided_p_from_z(z_statistic(trial)?)
}

/// Twice the lesser one-sided p, capped at 1.
pub fn two_sided_p(trial: &TrialSpec) -> Result<Probability> {
    let p = one_sided_p(trial)?.value();
    Probability::closed((2.0 * p).min(1.0))
}

/// Power of a one-sided level-`alpha` test when the true standardized effect
/// is `effect_z`: `1 - Φ(Φ⁻¹(1-α) - z)`.
pub fn power(alpha: Probability, effect_z: ZScore) -> Result<Probability> {
    let critical = -normal_math::std_normal_quantile(alpha)?.value();
    Probability::closed(normal_math::cdf(effect_z.value() - critical))
}

/// Power when α is set to the observed one-sided p and the true effect is
/// set to the one implied by that p, `z = Φ⁻¹(1 - p)`. The critical value
/// then equals the effect, so the result is exactly 1/2 for every p.
pub fn observed_power(p: Probability) -> Result<Probability> {
    if !(p.value() > 0.0 && p.value() < 0.5) {
        return Err(Error::OutOfDomain {
            what: "observed p-value",
            value: p.value(),
            domain: "(0, 0.5)",
        });
    }
    power(p, calibration::z_from_one_sided_p(p)?)
}

/// Full evidential summary of a trial.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EvidentialReport {
    pub z: ZScore,
    pub p_one_sided: Probability,
    pub p_two_sided: Probability,
    pub observed_matches_favored: bool,
    /// Calibrations in favored-direction form, in [`Method::ALL`] order.
    pub rows: Vec<CalibrationRow>,
    pub posterior_favored: Probability,
    pub sign_error_prob: Probability,
    pub observed_power: Probability,
}

impl EvidentialReport {
    pub fn row(&self, method: Method) -> &CalibrationRow {
        self.rows
            .iter()
            .find(|r| r.method == method)
            .expect("report carries every method")
    }
}

pub fn evidential_report(trial: &TrialSpec, prior: Odds) -> Result<EvidentialReport> {
    let z = z_statistic(trial)?;
    let p = one_sided_p(trial)?;
    let matches = trial.observed_matches_favored();

    let mut rows = calibration::rows_for(p, z, prior)?;
    if !matches {
        rows = rows
            .iter()
            .map(|r| r.reoriented(prior))
            .collect::<Result<_>>()?;
    }
    let posterior_favored = rows
        .iter()
        .find(|r| r.method == Method::MleLr)
        .map(|r| r.posterior)
        .expect("mle row present");
    // Posterior of the observed direction is the favored posterior when they
    // agree and its complement otherwise.
    let sign_error = if matches {
        1.0 - posterior_favored.value()
    } else {
        posterior_favored.value()
    };
    let observed_power = if p.value() < 0.5 {
        observed_power(p)?
    } else {
        Probability::closed(0.5)?
    };

    Ok(EvidentialReport {
        z,
        p_one_sided: p,
        p_two_sided: two_sided_p(trial)?,
        observed_matches_favored: matches,
        rows,
        posterior_favored,
        sign_error_prob: Probability::closed(sign_error)?,
        observed_power,
    })
}

/// A two-candidate poll: `k` of `n` respondents favor the candidate, tested
/// against the dividing proportion `p0`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct PollSpec {
    pub n: u64,
    pub k: u64,
    pub p0: Probability,
}

impl PollSpec {
    pub fn new(n: u64, k: u64, p0: f64) -> Result<Self> {
        if n == 0 {
            return Err(Error::InvalidCounts("n must be at least 1".into()));
        }
        if k > n {
            return Err(Error::InvalidCounts(format!("k = {k} exceeds n = {n}")));
        }
        Ok(Self {
            n,
            k,
            p0: Probability::new(p0)?,
        })
    }

    /// Trial with the null-anchored standard error `sqrt(p0 (1 - p0) / n)`,
    /// so that a share one standard error above `p0` gives z = 1.
    pub fn trial(&self) -> Result<TrialSpec> {
        let p0 = self.p0.value();
        let n = self.n as f64;
        Ok(
            TrialSpec::new(self.k as f64 / n, (p0 * (1.0 - p0) / n).sqrt(), p0)?
                .favoring(Direction::Greater)
                .with_n(self.n),
        )
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PollReport {
    pub poll: PollSpec,
    pub trial: TrialSpec,
    pub report: EvidentialReport,
    /// Exact binomial tail beyond `k` on the observed side of `n·p0`
    /// (upper tail when `k/n >= p0`).
    pub exact_tail: Probability,
    /// The normal-approximation counterpart, equal to `p_one_sided`.
    pub normal_tail: Probability,
}

pub fn poll_report(poll: &PollSpec, prior: Odds) -> Result<PollReport> {
    let trial = poll.trial()?;
    let report = evidential_report(&trial, prior)?;
    let exact_tail = if trial.theta_obs >= trial.delta {
        binomial_tail(poll.n, poll.k, poll.p0)?
    } else {
        // P(X <= k) = 1 - P(X >= k + 1)
        let upper = binomial_tail(poll.n, poll.k + 1, poll.p0)?;
        Probability::closed(1.0 - upper.value())?
    };
    Ok(PollReport {
        poll: *poll,
        trial,
        normal_tail: report.p_one_sided,
        report,
        exact_tail,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    const P_Z1: f64 = 0.158_655_253_931_457_05;

    fn close(a: f64, b: f64, tol: f64) -> bool {
        (a - b).abs() <= tol
    }

    fn trial(theta: f64, se: f64, delta: f64) -> TrialSpec {
        TrialSpec::new(theta, se, delta).unwrap()
    }

    #[test]
    fn z_examples() {
        assert_eq!(z_statistic(&trial(0.4, 1.0, 0.4)).unwrap().value(), 0.0);
        assert_eq!(z_statistic(&trial(1.96, 1.0, 0.0)).unwrap().value(), 1.96);
        assert_eq!(z_statistic(&trial(3.0, 2.0, 1.0)).unwrap().value(), 1.0);
    }

    #[test]
    fn trial_validation() {
        assert!(TrialSpec::new(1.0, 0.0, 0.0).is_err());
        assert!(TrialSpec::new(1.0, -1.0, 0.0).is_err());
        assert!(TrialSpec::new(f64::NAN, 1.0, 0.0).is_err());
        assert!(TrialSpec::new(1.0, 1.0, f64::INFINITY).is_err());
    }

    #[test]
    fn p_value_examples() {
        assert_eq!(one_sided_p(&trial(0.0, 1.0, 0.0)).unwrap().value(), 0.5);
        assert!(close(
            one_sided_p(&trial(1.96, 1.0, 0.0)).unwrap().value(),
            0.025,
            1e-5
        ));
        assert!(close(
            one_sided_p(&trial(1.0, 1.0, 0.0)).unwrap().value(),
            P_Z1,
            1e-15
        ));
        assert!(close(
            two_sided_p(&trial(1.96, 1.0, 0.0)).unwrap().value(),
            0.05,
            1e-5
        ));
        assert_eq!(two_sided_p(&trial(0.0, 1.0, 0.0)).unwrap().value(), 1.0);
        assert!(close(
            two_sided_p(&trial(-1.0, 1.0, 0.0)).unwrap().value(),
            0.317_310_507_862_914_1,
            1e-15
        ));
    }

    #[test]
    fn power_examples() {
        let a = Probability::new(0.025).unwrap();
        let z = |v| ZScore::new(v).unwrap();
        assert!(close(power(a, z(0.0)).unwrap().value(), 0.025, 1e-15));
        assert!(close(
            power(a, z(1.959_963_984_540_054)).unwrap().value(),
            0.5,
            1e-12
        ));
        assert!(close(
            power(a, z(2.80)).unwrap().value(),
            0.799_555_903_298_112_3,
            1e-12
        ));
    }

    #[test]
    fn observed_power_examples() {
        for p in [0.025, 0.1587, 0.4] {
            let got = observed_power(Probability::new(p).unwrap())
                .unwrap()
                .value();
            assert_eq!(got, 0.5, "p={p}");
        }
        for bad in [0.5, 0.7] {
            assert!(observed_power(Probability::new(bad).unwrap()).is_err());
        }
    }

    #[test]
    fn report_favored_match() {
        let t = trial(1.0, 1.0, 0.0).favoring(Direction::Greater);
        let r = evidential_report(&t, Odds::EVEN).unwrap();
        assert!(r.observed_matches_favored);
        assert!(close(
            r.row(Method::MleLr).lr.value(),
            1.872_886_948_103_453_6,
            1e-12
        ));
        assert!(close(
            r.posterior_favored.value(),
            0.651_918_081_684_295_5,
            1e-12
        ));
        assert!(close(
            r.sign_error_prob.value(),
            0.348_081_918_315_704_5,
            1e-12
        ));
        assert!(close(r.observed_power.value(), 0.5, 1e-12));
    }

    #[test]
    fn report_favored_mismatch() {
        let t = trial(-1.0, 1.0, 0.0).favoring(Direction::Greater);
        let r = evidential_report(&t, Odds::EVEN).unwrap();
        assert!(!r.observed_matches_favored);
        assert!(close(
            r.row(Method::MleLr).lr.value(),
            1.0 / 1.872_886_948_103_453_6,
            1e-12
        ));
        assert!(close(
            r.posterior_favored.value(),
            0.348_081_918_315_704_5,
            1e-12
        ));
        assert!(close(
            r.sign_error_prob.value(),
            0.348_081_918_315_704_5,
            1e-12
        ));
        for row in &r.rows {
            assert!(row.lr.value() < 1.0);
        }
    }

    #[test]
    fn report_without_favored_direction_orients_to_observed() {
        let r = evidential_report(&trial(-1.0, 1.0, 0.0), Odds::EVEN).unwrap();
        assert!(r.observed_matches_favored);
        assert!(r.row(Method::MleLr).lr.value() > 1.0);
    }

    #[test]
    fn report_at_dividing_value() {
        let prior = Odds::new(3.0).unwrap();
        let t = trial(2.0, 0.5, 2.0).favoring(Direction::Less);
        let r = evidential_report(&t, prior).unwrap();
        assert_eq!(r.z.value(), 0.0);
        for row in &r.rows {
            if row.method == Method::Sellke {
                assert!(!row.valid);
                assert!(close(row.lr.value(), 1.061_475_690_846_086, 1e-12));
            } else {
                assert_eq!(row.lr.value(), 1.0);
            }
        }
        assert_eq!(r.posterior_favored.value(), 0.75);
        assert_eq!(r.observed_power.value(), 0.5);
    }

    #[test]
    fn poll_examples() {
        let pr = poll_report(&PollSpec::new(100, 55, 0.5).unwrap(), Odds::EVEN).unwrap();
        assert!(close(pr.report.z.value(), 1.0, 1e-12));
        let posts = [
            0.841_344_746_068_542_9,
            0.651_918_081_684_295_5,
            0.622_459_331_201_854_6,
            0.557_420_796_705_622_6,
        ];
        for (row, expected) in pr.report.rows.iter().zip(posts) {
            assert!(
                close(row.posterior.value(), expected, 1e-9),
                "{:?}",
                row.method
            );
        }
        assert!(close(pr.exact_tail.value(), 0.184_100_808_663_348_1, 1e-12));
        assert!(close(pr.normal_tail.value(), P_Z1, 1e-9));

        let even = poll_report(&PollSpec::new(100, 50, 0.5).unwrap(), Odds::EVEN).unwrap();
        assert_eq!(even.report.z.value(), 0.0);
        assert_eq!(even.report.posterior_favored.value(), 0.5);

        let below = poll_report(&PollSpec::new(100, 45, 0.5).unwrap(), Odds::EVEN).unwrap();
        assert!(close(
            below.exact_tail.value(),
            0.184_100_808_663_348_1,
            1e-12
        ));
        assert!(!below.report.observed_matches_favored);
    }

    #[test]
    fn poll_validation() {
        assert!(PollSpec::new(0, 0, 0.5).is_err());
        assert!(PollSpec::new(10, 11, 0.5).is_err());
        assert!(PollSpec::new(10, 5, 1.0).is_err());
    }

    #[test]
    fn observed_power_grid() {
        for i in 1..=499 {
            let p = Probability::new(i as f64 / 1000.0).unwrap();
            assert!(close(observed_power(p).unwrap().value(), 0.5, 1e-12));
        }
    }

    #[test]
    fn power_at_least_alpha() {
        for a in [0.001, 0.01, 0.05, 0.2, 0.5, 0.9] {
            let alpha = Probability::new(a).unwrap();
            for i in 0..=80 {
                let z = ZScore::new(i as f64 / 10.0).unwrap();
                assert!(power(alpha, z).unwrap().value() >= a - 1e-15);
            }
        }
    }

    proptest! {
        #[test]
        fn orientation_antisymmetry(d in 0.01f64..5.0, delta in -10.0f64..10.0, se in 0.1f64..10.0) {
            let up = trial(delta + d * se, se, delta).favoring(Direction::Greater);
            let down = trial(delta - d * se, se, delta).favoring(Direction::Greater);
            let ru = evidential_report(&up, Odds::EVEN).unwrap();
            let rd = evidential_report(&down, Odds::EVEN).unwrap();
            let product = ru.row(Method::MleLr).lr.value() * rd.row(Method::MleLr).lr.value();
            prop_assert!((product - 1.0).abs() < 1e-9);
            prop_assert!((ru.posterior_favored.value() + rd.posterior_favored.value() - 1.0).abs() < 1e-9);
        }

        #[test]
        fn two_sided_is_twice_one_sided(theta in -6.0f64..6.0) {
            prop_assume!(theta != 0.0);
            let t = trial(theta, 1.0, 0.0);
            prop_assert_eq!(two_sided_p(&t).unwrap().value(), 2.0 * one_sided_p(&t).unwrap().value());
        }

        #[test]
        fn scale_invariance(
            theta in -5.0f64..5.0,
            se in 0.5f64..3.0,
            delta in -2.0f64..2.0,
            c in 0.01f64..100.0,
        ) {
            let a = trial(theta, se, delta).favoring(Direction::Greater);
            let b = trial(theta * c, se * c, delta * c).favoring(Direction::Greater);
            let ra = evidential_report(&a, Odds::EVEN).unwrap();
            let rb = evidential_report(&b, Odds::EVEN).unwrap();
            let rel = |x: f64, y: f64| (x - y).abs() <= 1e-12 * x.abs().max(1.0);
            prop_assert!(rel(ra.z.value(), rb.z.value()));
            prop_assert!(rel(ra.p_one_sided.value(), rb.p_one_sided.value()));
            prop_assert!(rel(ra.p_two_sided.value(), rb.p_two_sided.value()));
            for (x, y) in ra.rows.iter().zip(&rb.rows) {
                prop_assert!(
                    rel(x.lr.value(), y.lr.value()),
                    "{:?}: {} vs {}", x.method, x.lr.value(), y.lr.value()
                );
            }
        }
    }
}
