use std::f64::consts::PI;
use std::fmt;
use std::str::FromStr;

use num_complex::Complex64;
use serde::Serialize;

use super::smoothing::Smoother;
use crate::error::{invalid, Error, Result};
use crate::space::{fft, GridFunction};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Method {
    ExactL2,
    NearBest,
    SmoothingUpper,
}

impl Method {
    pub fn as_str(self) -> &'static str {
        match self {
            Self::ExactL2 => "exact_l2",
            Self::NearBest => "near_best",
            Self::SmoothingUpper => "smoothing_upper",
        }
    }

    /// Best available method for `x`: exact on periodic `p = 2`, delayed
    /// means on other periodic norms, the smoothing bound on the line.
    pub fn for_function(x: &GridFunction) -> Self {
        if !x.is_periodic() {
            Self::SmoothingUpper
        } else if x.p().value() == 2.0 {
            Self::ExactL2
        } else {
            Self::NearBest
        }
    }

    /// Factor by which a Jackson bound of order `k` for the tagged value may
    /// exceed the bound for `E_r`: `V_n` is near-best for degree `n`, and
    /// `omega~_k(1/n) <= (1 + r/n)^k omega~_k(1/r)`.
    pub fn slack(self, r: f64, k: usize) -> f64 {
        match self {
            Self::ExactL2 | Self::SmoothingUpper => 1.0,
            Self::NearBest => match delayed_mean_index(r) {
                0 => 2.0,
                n => NEAR_BEST_FACTOR * (1.0 + r / n as f64).powi(k as i32),
            },
        }
    }
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Method {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "exact_l2" => Ok(Self::ExactL2),
            "near_best" => Ok(Self::NearBest),
            "smoothing_upper" => Ok(Self::SmoothingUpper),
            _ => Err(invalid("method", format!("unknown method {s:?}"))),
        }
    }
}

/// `1 + ||V_n||` with the delayed-mean operator norm bounded by 3 in every `L_p`.
pub const NEAR_BEST_FACTOR: f64 = 4.0;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct BestApprox {
    pub value: f64,
    pub method: Method,
}

/// Index `n` of the delayed mean `V_n` of degree `2n - 1 <= floor(r)`.
pub fn delayed_mean_index(r: f64) -> usize {
    (r.floor() as usize + 1) / 2
}

/// `V_n x`: multiplier 1 on `|m| <= n`, `(2n - |m|)/n` on `n < |m| < 2n`;
/// `V_0` is the mean.
pub fn delayed_mean(x: &GridFunction, n: usize) -> Result<GridFunction> {
    x.apply_multiplier(|m| {
        let a = m.unsigned_abs() as usize;
        let v = if n == 0 {
            if a == 0 {
                1.0
            } else {
                0.0
            }
        } else if a <= n {
            1.0
        } else if a < 2 * n {
            (2 * n - a) as f64 / n as f64
        } else {
            0.0
        };
        Complex64::new(v, 0.0)
    })
}

/// `E_r` of `x` (or an upper bound for it, tagged by `method`).
/// `smoother` is needed for [`Method::SmoothingUpper`] only.
pub fn best_approx(x: &GridFunction, r: f64, method: Method, smoother: Option<&Smoother<'_>>) -> Result<BestApprox> {
    if !(r >= 0.0 && r.is_finite()) {
        return Err(invalid("r", "must be nonnegative"));
    }
    let value = match method {
        Method::ExactL2 => {
            let n = match x.backend() {
                crate::space::Backend::Periodic { n } if x.p().value() == 2.0 => *n,
                _ => return Err(Error::BackendMismatch("exact_l2 needs the periodic backend with p = 2".into())),
            };
            let d = r.floor() as u64;
            let c = x.coefficients()?;
            let tail: f64 = c
                .iter()
                .enumerate()
                .filter(|(j, _)| fft::frequency(*j, n).unsigned_abs() > d)
                .map(|(_, v)| v.norm_sqr())
                .sum();
            (2.0 * PI * tail).sqrt()
        }
        Method::NearBest => {
            if !x.is_periodic() {
                return Err(Error::BackendMismatch("near_best needs the periodic backend".into()));
            }
            x.sub(&delayed_mean(x, delayed_mean_index(r))?)?.norm()
        }
        Method::SmoothingUpper => {
            let s = smoother.ok_or_else(|| invalid("smoother", "required for smoothing_upper"))?;
            if r < 1.0 && !x.is_periodic() {
                return Err(invalid("r", "must be at least 1 on the line backend"));
            }
            x.sub(&s.smooth(x, r)?)?.norm()
        }
    };
    Ok(BestApprox { value, method })
}
