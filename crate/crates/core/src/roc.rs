//! Binormal ROC geometry.
//!
//! A test statistic is `N(0, 1)` when the condition is absent and
//! `N(δ, 1)` when present. Declaring "positive" at or above a cutoff `c`
//! gives `FPR = 1 - Φ(c)` and `TPR = 1 - Φ(c - δ)`.
//!
//! For a point A on the curve:
//! * the secant from (0,0) to A has slope `TPR/FPR` (LR+),
//! * the secant from A to (1,1) has slope `(1-TPR)/(1-FPR)` (LR-),
//! * their product is `(TPR - TPR²)/(FPR - FPR²)`,
//! * the tangent at A has slope `φ(c-δ)/φ(c) = exp(δc - δ²/2)`, the exact
//!   likelihood ratio of a result at the cutoff.
//!
//! The secant product and the tangent are different quantities on the
//! binormal curve (1.8729 vs 1.6487 at δ = 1, c = 1). Both are computed and
//! the gap is reported by [`convexity_check`].

use std::cmp::Ordering;

use serde::Serialize;

use crate::error::{finite, Error, Result};
use crate::normal_math::{cdf, upper_tail};
use crate::types::{LikelihoodRatio, Probability, ZScore};

/// Points closer than this to a corner of the unit square are rejected by
/// the slope operations.
pub const BOUNDARY_EPS: f64 = 1e-12;

/// Relative tolerance below which tangent and secant product count as equal.
pub const TANGENT_MATCH_TOL: f64 = 1e-6;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct RocModel {
    pub separation: ZScore,
}

impl RocModel {
    pub fn new(separation: f64) -> Result<Self> {
        Ok(Self {
            separation: ZScore::new(separation)?,
        })
    }

    pub fn delta(&self) -> f64 {
        self.separation.value()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct RocPoint {
    pub fpr: Probability,
    pub tpr: Probability,
    /// The test-statistic threshold that produced the point, if known.
    pub cutoff: Option<f64>,
}

impl RocPoint {
    /// A point given directly by its coordinates.
    pub fn new(fpr: f64, tpr: f64) -> Result<Self> {
        Ok(Self {
            fpr: Probability::closed(fpr)?,
            tpr: Probability::closed(tpr)?,
            cutoff: None,
        })
    }

    pub fn is_interior(&self) -> bool {
        let inside = |v: f64| (BOUNDARY_EPS..=1.0 - BOUNDARY_EPS).contains(&v);
        inside(self.fpr.value()) && inside(self.tpr.value())
    }

    fn interior(&self) -> Result<(f64, f64)> {
        if self.is_interior() {
            Ok((self.fpr.value(), self.tpr.value()))
        } else {
            Err(Error::BoundaryPoint {
                fpr: self.fpr.value(),
                tpr: self.tpr.value(),
            })
        }
    }
}

pub fn roc_point(model: &RocModel, cutoff: f64) -> Result<RocPoint> {
    let cutoff = finite("cutoff", cutoff)?;
    Ok(RocPoint {
        fpr: Probability::closed(upper_tail(cutoff))?,
        tpr: Probability::closed(upper_tail(cutoff - model.delta()))?,
        cutoff: Some(cutoff),
    })
}

/// LR+ = TPR / FPR.
pub fn positive_secant_lr(pt: &RocPoint) -> Result<LikelihoodRatio> {
    let (fpr, tpr) = pt.interior()?;
    LikelihoodRatio::favored(tpr / fpr)
}

/// LR- = (1 - TPR) / (1 - FPR).
pub fn negative_secant_lr(pt: &RocPoint) -> Result<LikelihoodRatio> {
    let (fpr, tpr) = pt.interior()?;
    LikelihoodRatio::favored((1.0 - tpr) / (1.0 - fpr))
}

/// `(TPR - TPR²) / (FPR - FPR²)`, evaluated in factored form so that
/// coordinates near 1 keep their precision.
pub fn secant_product_lr(pt: &RocPoint) -> Result<LikelihoodRatio> {
    let (fpr, tpr) = pt.interior()?;
    LikelihoodRatio::favored((tpr * (1.0 - tpr)) / (fpr * (1.0 - fpr)))
}

/// Slope of the tangent at `cutoff`: `exp(δ·cutoff - δ²/2)`.
pub fn tangent_lr(model: &RocModel, cutoff: f64) -> Result<LikelihoodRatio> {
    let cutoff = finite("cutoff", cutoff)?;
    let d = model.delta();
    LikelihoodRatio::favored((d * cutoff - 0.5 * d * d).exp())
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ConvexityReport {
    pub n_points: usize,
    /// TPR never decreases as FPR increases along the sampled curve.
    pub monotone_increasing: bool,
    /// Chord slopes strictly decrease along the curve.
    pub slopes_strictly_decreasing: bool,
    /// Index (in increasing-FPR order) of the first chord whose slope did
    /// not decrease.
    pub first_slope_violation: Option<usize>,
    /// Largest `|tangent / secant_product - 1|` over interior grid points.
    pub max_tangent_gap: f64,
    pub max_tangent_gap_cutoff: Option<f64>,
    /// True when the tangent differs from the secant product anywhere on
    /// the grid by more than [`TANGENT_MATCH_TOL`].
    pub tangent_diverges: bool,
}

impl ConvexityReport {
    pub fn passes(&self) -> bool {
        self.monotone_increasing && self.slopes_strictly_decreasing
    }
}

// Q(a) - Q(b) for a < b, differenced on whichever side keeps precision.
fn tail_difference(a: f64, b: f64) -> f64 {
    if b <= 0.0 {
        cdf(b) - cdf(a)
    } else {
        upper_tail(a) - upper_tail(b)
    }
}

/// Samples the curve at `grid` (strictly increasing cutoffs, at least
/// three) and checks that it is monotone with strictly decreasing chord
/// slopes, the shape of a proper ROC curve.
pub fn convexity_check(model: &RocModel, grid: &[f64]) -> Result<ConvexityReport> {
    if grid.len() < 3 {
        return Err(Error::InvalidGrid(format!(
            "need at least 3 cutoffs, got {}",
            grid.len()
        )));
    }
    if let Some(bad) = grid.iter().find(|c| !c.is_finite()) {
        return Err(Error::InvalidGrid(format!("non-finite cutoff {bad}")));
    }
    if grid.windows(2).any(|w| w[1] <= w[0]) {
        return Err(Error::InvalidGrid(
            "cutoffs must be strictly increasing".into(),
        ));
    }

    let d = model.delta();
    // Walk from the largest cutoff down, i.e. in increasing FPR.
    let cutoffs: Vec<f64> = grid.iter().rev().copied().collect();
    let mut monotone = true;
    let mut slopes = Vec::with_capacity(cutoffs.len() - 1);
    for w in cutoffs.windows(2) {
        let (hi, lo) = (w[0], w[1]);
        let d_fpr = tail_difference(lo, hi);
        let d_tpr = tail_difference(lo - d, hi - d);
        if d_fpr <= 0.0 || d_tpr < 0.0 {
            monotone = false;
        }
        slopes.push(d_tpr / d_fpr);
    }
    let first_slope_violation = slopes
        .windows(2)
        .position(|s| s[1].partial_cmp(&s[0]) != Some(Ordering::Less));

    let mut max_gap = 0.0f64;
    let mut max_gap_cutoff = None;
    for &c in grid {
        let pt = roc_point(model, c)?;
        if !pt.is_interior() {
            continue;
        }
        let (Ok(secant), Ok(tangent)) = (secant_product_lr(&pt), tangent_lr(model, c)) else {
            continue;
        };
        let gap = (tangent.value() / secant.value() - 1.0).abs();
        if gap > max_gap {
            max_gap = gap;
            max_gap_cutoff = Some(c);
        }
    }

    Ok(ConvexityReport {
        n_points: grid.len(),
        monotone_increasing: monotone,
        slopes_strictly_decreasing: first_slope_violation.is_none(),
        first_slope_violation,
        max_tangent_gap: max_gap,
        max_tangent_gap_cutoff: max_gap_cutoff,
        tangent_diverges: max_gap > TANGENT_MATCH_TOL,
    })
}

/// `n` evenly spaced cutoffs from `start` to `stop` inclusive.
pub fn linspace(start: f64, stop: f64, n: usize) -> Vec<f64> {
    match n {
        0 => Vec::new(),
        1 => vec![start],
        _ => {
            let last = (n - 1) as f64;
            (0..n)
                .map(|i| start + (stop - start) * (i as f64 / last))
                .collect()
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::calibration::mle_lr;
    use proptest::prelude::*;

    fn model(d: f64) -> RocModel {
        RocModel::new(d).unwrap()
    }

    #[test]
    fn point_examples() {
        let pt = roc_point(&model(1.0), 1.0).unwrap();
        assert!((pt.fpr.value() - 0.158_655_253_931_457_05).abs() < 1e-15);
        assert_eq!(pt.tpr.value(), 0.5);

        let far = roc_point(&model(1.0), 50.0).unwrap();
        assert_eq!((far.fpr.value(), far.tpr.value()), (0.0, 0.0));

        for c in [-3.0, -0.2, 0.0, 1.7] {
            let pt = roc_point(&model(0.0), c).unwrap();
            assert_eq!(pt.fpr, pt.tpr);
        }
        assert!(roc_point(&model(1.0), f64::NAN).is_err());
        assert!(roc_point(&model(1.0), f64::INFINITY).is_err());
    }

    #[test]
    fn strictly_decreasing_in_cutoff() {
        let m = model(1.3);
        let mut prev = roc_point(&m, -6.0).unwrap();
        for c in linspace(-5.9, 6.0, 120) {
            let pt = roc_point(&m, c).unwrap();
            assert!(pt.fpr.value() < prev.fpr.value());
            assert!(pt.tpr.value() < prev.tpr.value());
            prev = pt;
        }
    }

    #[test]
    fn secant_examples() {
        let p = |f, t| RocPoint::new(f, t).unwrap();
        assert_eq!(positive_secant_lr(&p(0.5, 0.5)).unwrap().value(), 1.0);
        assert!(
            (positive_secant_lr(&p(0.1587, 0.5)).unwrap().value() - 3.150_598_613_736_610_4).abs()
                < 1e-12
        );
        assert!((positive_secant_lr(&p(0.025, 0.5)).unwrap().value() - 20.0).abs() < 1e-12);

        assert_eq!(negative_secant_lr(&p(0.5, 0.5)).unwrap().value(), 1.0);
        assert!(
            (negative_secant_lr(&p(0.1587, 0.5)).unwrap().value() - 0.594_318_316_890_526_6).abs()
                < 1e-12
        );
        assert!(
            (negative_secant_lr(&p(0.025, 0.5)).unwrap().value() - 0.512_820_512_820_512_8).abs()
                < 1e-12
        );

        assert_eq!(secant_product_lr(&p(0.3, 0.3)).unwrap().value(), 1.0);
        assert!(
            (secant_product_lr(&p(0.158_655_253_931_457_05, 0.5))
                .unwrap()
                .value()
                - 1.872_886_948_103_453_6)
                .abs()
                < 1e-12
        );
        assert!(
            (secant_product_lr(&p(0.025, 0.5)).unwrap().value() - 10.256_410_256_410_256).abs()
                < 1e-12
        );
    }

    #[test]
    fn boundary_points_rejected() {
        for (f, t) in [(0.0, 0.5), (1.0, 0.5), (0.5, 0.0), (0.5, 1.0), (1e-13, 0.5)] {
            let pt = RocPoint::new(f, t).unwrap();
            assert!(positive_secant_lr(&pt).is_err());
            assert!(negative_secant_lr(&pt).is_err());
            assert!(secant_product_lr(&pt).is_err());
        }
    }

    #[test]
    fn tangent_examples() {
        assert_eq!(tangent_lr(&model(0.0), 2.3).unwrap().value(), 1.0);
        assert!(
            (tangent_lr(&model(1.0), 1.0).unwrap().value() - 1.648_721_270_700_128).abs() < 1e-12
        );
        assert!(
            (tangent_lr(&model(1.0), 0.0).unwrap().value() - 0.606_530_659_712_633_4).abs() < 1e-12
        );
    }

    #[test]
    fn tangent_is_derivative() {
        let h = 1e-5;
        for d in [0.5, 1.0, 2.0] {
            let m = model(d);
            for c in linspace(-3.0, 3.0, 25) {
                let lo = roc_point(&m, c - h).unwrap();
                let hi = roc_point(&m, c + h).unwrap();
                let fd = (lo.tpr.value() - hi.tpr.value()) / (lo.fpr.value() - hi.fpr.value());
                let t = tangent_lr(&m, c).unwrap().value();
                assert!((fd / t - 1.0).abs() < 1e-4, "d={d} c={c}");
            }
        }
    }

    #[test]
    fn diagonal_chord_slope_tends_to_one() {
        let m = model(1.0);
        let mut last = 0.0;
        for c in [-2.0, -4.0, -6.0, -8.0, -12.0] {
            let pt = roc_point(&m, c).unwrap();
            last = pt.tpr.value() / pt.fpr.value();
        }
        assert!((last - 1.0).abs() < 1e-12);
    }

    #[test]
    fn convexity_proper_curve() {
        let report = convexity_check(&model(1.0), &linspace(-4.0, 4.0, 101)).unwrap();
        assert!(report.passes(), "{report:?}");
        assert!(report.tangent_diverges);
    }

    #[test]
    fn convexity_diagonal_flags_constant_slope() {
        let report = convexity_check(&model(0.0), &linspace(-4.0, 4.0, 101)).unwrap();
        assert!(report.monotone_increasing);
        assert!(!report.slopes_strictly_decreasing);
        assert_eq!(report.first_slope_violation, Some(0));
        assert!(!report.tangent_diverges);
    }

    #[test]
    fn convexity_grid_errors() {
        let m = model(1.0);
        assert!(convexity_check(&m, &[0.0, 1.0]).is_err());
        assert!(convexity_check(&m, &[0.0, 2.0, 1.0]).is_err());
        assert!(convexity_check(&m, &[0.0, 1.0, 1.0]).is_err());
        assert!(convexity_check(&m, &[0.0, 1.0, f64::NAN]).is_err());
    }

    #[test]
    fn tangent_gap_at_unit_cutoff() {
        let m = model(1.0);
        let pt = roc_point(&m, 1.0).unwrap();
        let secant = secant_product_lr(&pt).unwrap().value();
        let tangent = tangent_lr(&m, 1.0).unwrap().value();
        assert!((secant - 1.872_886_948_103_453_6).abs() < 1e-12);
        assert!((tangent - 1.648_721_270_700_128).abs() < 1e-12);
    }

    proptest! {
        #[test]
        fn secant_product_factorizes(fpr in 1e-6f64..0.999_999, tpr in 1e-6f64..0.999_999) {
            let pt = RocPoint::new(fpr, tpr).unwrap();
            let product = secant_product_lr(&pt).unwrap().value();
            let factored = positive_secant_lr(&pt).unwrap().value() * negative_secant_lr(&pt).unwrap().value();
            prop_assert!((product - factored).abs() <= 1e-12 * product.max(1.0));
        }

        #[test]
        fn half_tpr_matches_mle_lr(fpr in 1e-6f64..0.999_999) {
            let pt = RocPoint::new(fpr, 0.5).unwrap();
            let product = secant_product_lr(&pt).unwrap().value();
            let mle = mle_lr(Probability::new(fpr).unwrap()).unwrap().value();
            prop_assert!((product - mle).abs() <= 1e-12 * mle.max(1.0));
        }
    }
}
