//! Constrained scalar types shared by every module.
//!
//! Each newtype validates on construction, so downstream code can rely on
//! its invariant without re-checking.

use std::fmt;

use serde::Serialize;

use crate::error::{finite, Error, Result};

/// A probability. Constructed either on the open interval (0, 1), which is
/// what p-values and ROC coordinates at interior cutoffs require, or on the
/// closed interval [0, 1] for limits and empirical frequencies.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd, Serialize)]
#[serde(transparent)]
pub struct Probability(f64);

impl Probability {
    /// Open-interval constructor: rejects 0, 1, NaN and infinities.
    pub fn new(value: f64) -> Result<Self> {
        if value > 0.0 && value < 1.0 {
            Ok(Self(value))
        } else {
            Err(Error::OutOfDomain {
                what: "probability",
                value,
                domain: "(0, 1)",
            })
        }
    }

    /// Closed-interval constructor for limits and frequencies.
    pub fn closed(value: f64) -> Result<Self> {
        if (0.0..=1.0).contains(&value) {
            Ok(Self(value))
        } else {
            Err(Error::OutOfDomain {
                what: "probability",
                value,
                domain: "[0, 1]",
            })
        }
    }

    pub(crate) fn clamp_closed(value: f64) -> Self {
        Self(value.clamp(0.0, 1.0))
    }

    pub fn value(self) -> f64 {
        self.0
    }

    /// 1 - p. Exact when p >= 0.5.
    pub fn complement(self) -> Self {
        Self(1.0 - self.0)
    }

    pub fn is_interior(self) -> bool {
        self.0 > 0.0 && self.0 < 1.0
    }

    pub fn to_odds(self) -> Result<Odds> {
        Odds::new(self.0 / (1.0 - self.0))
    }
}

impl fmt::Display for Probability {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.0.fmt(f)
    }
}

/// A standardized effect: an effect size divided by its standard error.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd, Serialize)]
#[serde(transparent)]
pub struct ZScore(f64);

impl ZScore {
    pub fn new(value: f64) -> Result<Self> {
        finite("z-score", value).map(Self)
    }

    pub fn value(self) -> f64 {
        self.0
    }

    pub fn abs(self) -> Self {
        Self(self.0.abs())
    }
}

impl std::ops::Neg for ZScore {
    type Output = Self;

    fn neg(self) -> Self {
        Self(-self.0)
    }
}

impl fmt::Display for ZScore {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.0.fmt(f)
    }
}

/// Odds in ratio form, e.g. prior odds for the favored hypothesis.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd, Serialize)]
#[serde(transparent)]
pub struct Odds(f64);

impl Odds {
    pub const EVEN: Odds = Odds(1.0);

    pub fn new(value: f64) -> Result<Self> {
        if value.is_finite() && value > 0.0 {
            Ok(Self(value))
        } else {
            Err(Error::OutOfDomain {
                what: "odds",
                value,
                domain: "(0, inf)",
            })
        }
    }

    pub fn value(self) -> f64 {
        self.0
    }

    /// odds / (1 + odds).
    pub fn to_probability(self) -> Probability {
        Probability::clamp_closed(self.0 / (1.0 + self.0))
    }

    pub fn inverse(self) -> Self {
        Self(1.0 / self.0)
    }
}

impl fmt::Display for Odds {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.0.fmt(f)
    }
}

/// Which hypothesis a likelihood ratio's numerator refers to.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Orientation {
    /// Numerator is the hypothesis in the favored (or observed) direction;
    /// values above 1 support it.
    FavoredDirection,
    /// Numerator is the null or opposite hypothesis.
    NullFavoring,
}

impl Orientation {
    pub fn flipped(self) -> Self {
        match self {
            Self::FavoredDirection => Self::NullFavoring,
            Self::NullFavoring => Self::FavoredDirection,
        }
    }

    pub fn as_str(self) -> &'static str {
        match self {
            Self::FavoredDirection => "favored-direction",
            Self::NullFavoring => "null-favoring",
        }
    }
}

/// A likelihood ratio or Bayes factor together with its orientation.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct LikelihoodRatio {
    value: f64,
    orientation: Orientation,
}

impl LikelihoodRatio {
    pub fn new(value: f64, orientation: Orientation) -> Result<Self> {
        if value.is_finite() && value > 0.0 {
            Ok(Self { value, orientation })
        } else {
            Err(Error::OutOfDomain {
                what: "likelihood ratio",
                value,
                domain: "(0, inf)",
            })
        }
    }

    pub fn favored(value: f64) -> Result<Self> {
        Self::new(value, Orientation::FavoredDirection)
    }

    pub fn value(self) -> f64 {
        self.value
    }

    pub fn orientation(self) -> Orientation {
        self.orientation
    }

    /// The same evidence expressed with numerator and denominator swapped.
    pub fn inverted(self) -> Self {
        Self {
            value: 1.0 / self.value,
            orientation: self.orientation.flipped(),
        }
    }

    /// The value with the favored-direction hypothesis in the numerator.
    pub fn favored_value(self) -> f64 {
        match self.orientation {
            Orientation::FavoredDirection => self.value,
            Orientation::NullFavoring => 1.0 / self.value,
        }
    }

    /// Re-expressed in favored-direction form.
    pub fn to_favored(self) -> Self {
        match self.orientation {
            Orientation::FavoredDirection => self,
            Orientation::NullFavoring => self.inverted(),
        }
    }
}

impl fmt::Display for LikelihoodRatio {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} ({})", self.value, self.orientation.as_str())
    }
}
