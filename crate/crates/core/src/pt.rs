//! Closed-form prospect-theory mathematics.
//!
//! The value function is `v(x) = x^sigma` for gains and
//! `v(x) = -lambda * (-x)^sigma` for losses, with the reference point fixed
//! at zero. The probability weighting function is
//! `w(p) = p^gamma / (p^gamma + (1-p)^gamma)^(1/gamma)`. Binary-prospect
//! utility dispatches on the sign pattern of the outcomes, and the choice
//! model is a logistic over the utility difference.
//!
//! All arithmetic is double precision; the closed forms are verified against
//! a 50-digit oracle in the acceptance suite, not at runtime.

use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Lower bound of the parameter box for sigma, lambda, gamma.
pub const PARAM_MIN: f64 = 0.01;
/// Upper bound of the parameter box.
pub const PARAM_MAX: f64 = 4.0;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum PtError {
    #[error("parameter {name} = {value} outside [{PARAM_MIN}, {PARAM_MAX}]")]
    ParamOutOfBox { name: &'static str, value: f64 },
    #[error("outcome is not finite")]
    NonFiniteOutcome,
    #[error("probability {0} outside [0, 1]")]
    ProbabilityOutOfRange(f64),
    #[error("branch probabilities {p} + {q} do not sum to 1")]
    ProbabilitySumMismatch { p: f64, q: f64 },
    #[error(
        "same-sign tie x = y = {0}: utility case conditions x > y > 0 / x < y < 0 are undefined"
    )]
    SameSignTie(f64),
}

/// The estimand: risk-preference curvature, loss-aversion multiplier, and
/// probability-weighting curvature, each constrained to
/// [[`PARAM_MIN`], [`PARAM_MAX`]].
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PtParams {
    sigma: f64,
    lambda: f64,
    gamma: f64,
}

impl PtParams {
    pub fn new(sigma: f64, lambda: f64, gamma: f64) -> Result<Self, PtError> {
        for (name, value) in [("sigma", sigma), ("lambda", lambda), ("gamma", gamma)] {
            if !(PARAM_MIN..=PARAM_MAX).contains(&value) {
                return Err(PtError::ParamOutOfBox { name, value });
            }
        }
        Ok(Self {
            sigma,
            lambda,
            gamma,
        })
    }

    /// Identity parameters (1, 1, 1): prospect utility reduces to expected
    /// value.
    pub fn identity() -> Self {
        Self {
            sigma: 1.0,
            lambda: 1.0,
            gamma: 1.0,
        }
    }

    pub fn sigma(&self) -> f64 {
        self.sigma
    }

    pub fn lambda(&self) -> f64 {
        self.lambda
    }

    pub fn gamma(&self) -> f64 {
        self.gamma
    }

    pub fn as_array(&self) -> [f64; 3] {
        [self.sigma, self.lambda, self.gamma]
    }

    /// True where a parameter sits within `tol` of a box bound.
    pub fn boundary_flags(&self, tol: f64) -> [bool; 3] {
        self.as_array()
            .map(|v| (v - PARAM_MIN).abs() <= tol || (PARAM_MAX - v).abs() <= tol)
    }
}

/// A binary gamble `(x, p; y, q)` in canonical order: when both outcomes
/// share a sign, `x` holds the one with larger absolute value; when signs
/// differ, `x` holds the negative outcome. Zero counts as a gain.
///
/// The constructor normalizes slot order, so a constructed `Prospect` always
/// satisfies one of the utility case conditions.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Prospect {
    x: f64,
    p: f64,
    y: f64,
    q: f64,
}

const PROB_SUM_TOL: f64 = 1e-12;

impl Prospect {
    pub fn new(x: f64, p: f64, y: f64, q: f64) -> Result<Self, PtError> {
        if !x.is_finite() || !y.is_finite() {
            return Err(PtError::NonFiniteOutcome);
        }
        for prob in [p, q] {
            if !(0.0..=1.0).contains(&prob) {
                return Err(PtError::ProbabilityOutOfRange(prob));
            }
        }
        if ((p + q) - 1.0).abs() > PROB_SUM_TOL {
            return Err(PtError::ProbabilitySumMismatch { p, q });
        }
        let same_sign = (x >= 0.0) == (y >= 0.0);
        if same_sign {
            if x == y {
                return Err(PtError::SameSignTie(x));
            }
            if x.abs() > y.abs() {
                Ok(Self { x, p, y, q })
            } else {
                Ok(Self {
                    x: y,
                    p: q,
                    y: x,
                    q: p,
                })
            }
        } else if x < 0.0 {
            Ok(Self { x, p, y, q })
        } else {
            Ok(Self {
                x: y,
                p: q,
                y: x,
                q: p,
            })
        }
    }

    /// Same outcomes, new branch probabilities. Used when marker-implied
    /// probabilities replace the numeric ones.
    pub fn with_probabilities(&self, p: f64, q: f64) -> Result<Self, PtError> {
        Self::new(self.x, p, self.y, q)
    }

    pub fn x(&self) -> f64 {
        self.x
    }

    pub fn p(&self) -> f64 {
        self.p
    }

    pub fn y(&self) -> f64 {
        self.y
    }

    pub fn q(&self) -> f64 {
        self.q
    }

    /// Expected monetary value `p*x + q*y`.
    pub fn expected_value(&self) -> f64 {
        self.p * self.x + self.q * self.y
    }

    /// True when the prospect spans a loss and a gain (canonical order puts
    /// the loss in x).
    pub fn mixed_sign(&self) -> bool {
        self.x < 0.0 && self.y >= 0.0
    }
}

/// Subjective value of a monetary outcome. `0^sigma` is taken as 0 so that
/// `value(0) = 0` holds for every sigma in the box.
pub fn value(x: f64, params: &PtParams) -> Result<f64, PtError> {
    if !x.is_finite() {
        return Err(PtError::NonFiniteOutcome);
    }
    Ok(value_raw(x, params))
}

pub(crate) fn value_raw(x: f64, params: &PtParams) -> f64 {
    if x == 0.0 {
        0.0
    } else if x > 0.0 {
        libm::pow(x, params.sigma)
    } else {
        -params.lambda * libm::pow(-x, params.sigma)
    }
}

/// Decision weight of a probability. Endpoints are exact: `w(0) = 0`,
/// `w(1) = 1`.
pub fn weight(p: f64, params: &PtParams) -> Result<f64, PtError> {
    if !(0.0..=1.0).contains(&p) {
        return Err(PtError::ProbabilityOutOfRange(p));
    }
    Ok(weight_raw(p, params))
}

pub(crate) fn weight_raw(p: f64, params: &PtParams) -> f64 {
    if p == 0.0 {
        return 0.0;
    }
    if p == 1.0 {
        return 1.0;
    }
    let g = params.gamma;
    let pg = libm::pow(p, g);
    let qg = libm::pow(1.0 - p, g);
    pg / libm::pow(pg + qg, 1.0 / g)
}

/// Utility of a binary prospect.
///
/// Same-sign outcomes use `v(y) + w(p) * (v(x) - v(y))`; mixed-sign
/// outcomes use `w(p) * v(x) + w(q) * v(y)`. Canonical ordering is
/// guaranteed by the `Prospect` constructor.
pub fn prospect_utility(prospect: &Prospect, params: &PtParams) -> f64 {
    let vx = value_raw(prospect.x, params);
    if prospect.mixed_sign() {
        let vy = value_raw(prospect.y, params);
        weight_raw(prospect.p, params) * vx + weight_raw(prospect.q, params) * vy
    } else {
        let vy = value_raw(prospect.y, params);
        vy + weight_raw(prospect.p, params) * (vx - vy)
    }
}

/// Numerically stable logistic.
pub fn sigmoid(d: f64) -> f64 {
    if d >= 0.0 {
        1.0 / (1.0 + libm::exp(-d))
    } else {
        let e = libm::exp(d);
        e / (1.0 + e)
    }
}

/// Predicted probability of choosing option K: `sigmoid(u(K) - u(U))`.
pub fn choice_probability(option_k: &Prospect, option_u: &Prospect, params: &PtParams) -> f64 {
    sigmoid(prospect_utility(option_k, params) - prospect_utility(option_u, params))
}
