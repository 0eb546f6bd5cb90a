use serde::Serialize;

use super::limit::RateFit;
use crate::error::Result;
use crate::geometry::BoundaryCurve;
use crate::numerics::Real;
use crate::orbits::{solve_heteroclinic, solve_periodic, PeriodicOrbit, SolveOptions};

/// Diagnostics for the three genericity assumptions and the nonvanishing
/// of the expansion constants.
#[derive(Debug, Clone, Serialize)]
pub struct GenericityReport {
    /// No distinct competitor within `margin_threshold` of the best perimeter.
    pub unique_max: bool,
    /// Perimeter gap to the best distinct competitor found by the multi-start.
    pub margin: Option<f64>,
    pub hyperbolic: bool,
    pub trace: f64,
    /// Heteroclinic tails contract at rate λ and the minimizer is isolated.
    pub transversal_hint: bool,
    pub tail_decay: Option<f64>,
    pub isolation: Option<f64>,
    /// Filled in once a rate fit is available.
    pub c_even_nonzero: Option<bool>,
    pub c_odd_nonzero: Option<bool>,
}

impl GenericityReport {
    /// Marks `C_even`, `C_odd` as nonzero when they exceed `threshold`.
    pub fn with_coefficients(mut self, fit: &RateFit, threshold: f64) -> Self {
        self.c_even_nonzero = Some(fit.c_even.abs() > threshold);
        self.c_odd_nonzero = Some(fit.c_odd.abs() > threshold);
        self
    }

    pub fn all_true(&self) -> bool {
        self.unique_max
            && self.hyperbolic
            && self.transversal_hint
            && self.c_even_nonzero == Some(true)
            && self.c_odd_nonzero == Some(true)
    }
}

/// Relative tolerance between the heteroclinic tail contraction and λ.
const DECAY_TOLERANCE: f64 = 0.05;
/// Window size for the isolation test, and the floor it must clear.
const ISOLATION_WINDOW: usize = 4;
const ISOLATION_FLOOR: f64 = 1e-8;

pub fn genericity<R: Real>(
    curve: &BoundaryCurve<R>,
    p: u64,
    q: u64,
    opts: &SolveOptions,
) -> Result<GenericityReport> {
    let orbit = solve_periodic(curve, p, q, None, opts)?;
    genericity_of(curve, &orbit)
}

/// As [`genericity`], for an orbit already solved.
///
/// The transversality hint needs the tail contraction to match λ within 5%
/// and the smallest Hessian eigenvalue of the `K = M = 4` segment to be
/// clear of zero and not shrinking from `K = M = 3`. A separatrix
/// connection (integrable case) shows up as a flat direction whose
/// eigenvalue decays with the window.
pub fn genericity_of<R: Real>(
    curve: &BoundaryCurve<R>,
    orbit: &PeriodicOrbit<R>,
) -> Result<GenericityReport> {
    let l = curve.length().to_f64();
    let unique_max = match orbit.margin {
        None => true,
        Some(m) => m > 1e-9 * l,
    };
    let mut report = GenericityReport {
        unique_max,
        margin: orbit.margin,
        hyperbolic: orbit.eigen.hyperbolic,
        trace: orbit.eigen.trace.to_f64(),
        transversal_hint: false,
        tail_decay: None,
        isolation: None,
        c_even_nonzero: None,
        c_odd_nonzero: None,
    };
    let Some(lambda) = orbit.eigen.lambda else {
        return Ok(report);
    };
    let lambda = lambda.to_f64().abs();
    let wide = solve_heteroclinic(curve, orbit, ISOLATION_WINDOW, ISOLATION_WINDOW)?;
    let narrow = solve_heteroclinic(curve, orbit, ISOLATION_WINDOW - 1, ISOLATION_WINDOW - 1)?;
    report.tail_decay = wide.tail_decay;
    report.isolation = Some(wide.isolation);
    let decay_ok = wide
        .tail_decay
        .is_some_and(|d| (d - lambda).abs() <= DECAY_TOLERANCE * lambda);
    let isolated = wide.isolation > ISOLATION_FLOOR && wide.isolation > 0.5 * narrow.isolation;
    report.transversal_hint = decay_ok && isolated;
    Ok(report)
}
