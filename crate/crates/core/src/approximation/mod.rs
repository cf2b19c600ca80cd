//! Smoothing operators, best approximation and Jackson-type checks.

mod best;
mod jackson;
mod smoothing;

pub use best::{best_approx, delayed_mean, delayed_mean_index, BestApprox, Method, NEAR_BEST_FACTOR};
pub use jackson::{
    constant_estimate, jackson_check, jackson_derivative_check, DerivativeSummary, JacksonOptions, JacksonReport,
    JacksonRow, JacksonVerdict, DEGENERATE_TOL,
};
pub use smoothing::{
    smooth_component, smooth_vector, smooth_vector_refined, weight_integral, Route, Smoother, SmoothingPlan,
};
