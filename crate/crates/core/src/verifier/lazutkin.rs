use serde::Serialize;

use crate::billiard::{lazutkin_at_angle, phi_of_lazutkin_y, step_angle};
use crate::error::Result;
use crate::geometry::BoundaryCurve;
use crate::numerics::{linear_fit, Real};

/// Base angles used for the regression, chosen away from the symmetry axes
/// of the built-in domains.
const ANGLES: usize = 8;
const SAMPLES: usize = 13;

/// Log-log slopes of the Lazutkin remainders `|x′ − x − y|` and `|y′ − y|`
/// against `y`, per base angle and as medians.
#[derive(Debug, Clone, Serialize)]
pub struct LazutkinReport {
    pub slope_x: f64,
    /// `None` when `y′ = y` to working precision at every sample (the circle).
    pub slope_y: Option<f64>,
    pub per_angle: Vec<AngleSlopes>,
    pub exact_y: bool,
}

#[derive(Debug, Clone, Serialize)]
pub struct AngleSlopes {
    pub theta: f64,
    pub slope_x: f64,
    pub slope_y: Option<f64>,
}

fn median(v: &mut [f64]) -> f64 {
    v.sort_by(|a, b| a.partial_cmp(b).unwrap_or(std::cmp::Ordering::Equal));
    let n = v.len();
    if n % 2 == 1 {
        v[n / 2]
    } else {
        0.5 * (v[n / 2 - 1] + v[n / 2])
    }
}

/// Regresses the one-step remainders in Lazutkin coordinates for `y`
/// log-spaced in `[10⁻⁵, 10⁻²]`. Remainders at or below `10⁵ ε` are
/// rounding noise and left out of the fit.
pub fn lazutkin_asymptotics<R: Real>(curve: &BoundaryCurve<R>) -> Result<LazutkinReport> {
    let tiny = 1e5 * R::EPSILON;
    let mut per_angle = Vec::with_capacity(ANGLES);
    for k in 0..ANGLES {
        let theta = R::two_pi() * ((k as f64 + 0.31) / ANGLES as f64);
        let mut lx = Vec::new();
        let mut rx = Vec::new();
        let mut ly = Vec::new();
        let mut ry = Vec::new();
        for j in 0..SAMPLES {
            let y = 10f64.powf(-5.0 + 3.0 * j as f64 / (SAMPLES - 1) as f64);
            let yr = R::from_f64(y);
            let phi = phi_of_lazutkin_y(curve, theta, yr);
            let (x0, y0) = lazutkin_at_angle(curve, theta, phi);
            let (theta1, phi1) = step_angle(curve, theta, phi)?;
            let (x1, y1) = lazutkin_at_angle(curve, theta1, phi1);
            let dx = (x1 - x0 - y0).to_f64().abs();
            let dy = (y1 - y0).to_f64().abs();
            let ln_y = y0.to_f64().ln();
            if dx > tiny {
                lx.push(ln_y);
                rx.push(dx.ln());
            }
            if dy > tiny {
                ly.push(ln_y);
                ry.push(dy.ln());
            }
        }
        let slope_x = linear_fit(&lx, &rx)?.slope;
        let slope_y = if ly.len() >= 3 {
            Some(linear_fit(&ly, &ry)?.slope)
        } else {
            None
        };
        per_angle.push(AngleSlopes {
            theta: theta.to_f64(),
            slope_x,
            slope_y,
        });
    }
    let mut sx: Vec<f64> = per_angle.iter().map(|a| a.slope_x).collect();
    let mut sy: Vec<f64> = per_angle.iter().filter_map(|a| a.slope_y).collect();
    let exact_y = sy.is_empty();
    Ok(LazutkinReport {
        slope_x: median(&mut sx),
        slope_y: if exact_y { None } else { Some(median(&mut sy)) },
        per_angle,
        exact_y,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::DomainSpec;
    use crate::numerics::Dd;

    #[test]
    fn ellipse_remainders_have_cubic_and_quartic_order() {
        let c = BoundaryCurve::<Dd>::build(&DomainSpec::default_ellipse()).unwrap();
        let r = lazutkin_asymptotics(&c).unwrap();
        assert!((2.8..=3.2).contains(&r.slope_x), "{r:?}");
        let sy = r.slope_y.unwrap();
        assert!((3.8..=4.2).contains(&sy), "{r:?}");
    }

    #[test]
    fn circle_ordinate_is_invariant() {
        let c = BoundaryCurve::<Dd>::build(&DomainSpec::circle(1.0)).unwrap();
        let r = lazutkin_asymptotics(&c).unwrap();
        assert!(r.exact_y && r.slope_y.is_none());
    }
}
