use serde::Serialize;

use super::periodic::PeriodicOrbit;
use crate::billiard::{angular_chord, jacobian_from_chord, step, to_arclength, PhasePoint};
use crate::error::Result;
use crate::geometry::BoundaryCurve;
use crate::numerics::{eigen2, Mat2, Real};

/// Spectral data of a monodromy matrix.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct Eigendata<R> {
    pub trace: R,
    /// `(2 − tr Λ) / 4`
    pub residue: R,
    /// `|tr Λ| > 2 + 10⁻¹⁰`
    pub hyperbolic: bool,
    /// Eigenvalue of modulus < 1, when hyperbolic.
    pub lambda: Option<R>,
    /// Angle of the unstable unit eigenvector, when hyperbolic.
    pub theta: Option<R>,
    pub unstable: Option<[R; 2]>,
    pub stable: Option<[R; 2]>,
}

/// Residue and, in the hyperbolic case, the contracting eigenvalue and the
/// direction of the unstable eigenvector.
pub fn eigendata<R: Real>(m: &Mat2<R>) -> Eigendata<R> {
    let trace = m.trace();
    let residue = (R::from_f64(2.0) - trace) / 4.0;
    match eigen2(m) {
        Ok(e) => Eigendata {
            trace,
            residue,
            hyperbolic: true,
            lambda: Some(e.lambda_minus),
            theta: Some(e.v_plus[1].atan2(e.v_plus[0])),
            unstable: Some(e.v_plus),
            stable: Some(e.v_minus),
        },
        Err(_) => Eigendata {
            trace,
            residue,
            hyperbolic: false,
            lambda: None,
            theta: None,
            unstable: None,
            stable: None,
        },
    }
}

/// Jacobians `Df` along the orbit, starting at point `base`: entry `k` maps
/// the tangent space at point `base + k` to the one at `base + k + 1`.
pub fn orbit_jacobians<R: Real>(
    curve: &BoundaryCurve<R>,
    orbit: &PeriodicOrbit<R>,
    base: usize,
) -> Result<Vec<Mat2<R>>> {
    let n = orbit.len();
    let frames: Vec<_> = orbit.theta.iter().map(|&t| curve.frame(t)).collect();
    (0..n)
        .map(|k| {
            let i = (base + k) % n;
            let j = (i + 1) % n;
            let c = angular_chord(&frames[i], &frames[j]);
            jacobian_from_chord(&to_arclength(&c, &frames[i], &frames[j]))
        })
        .collect()
}

/// `Λ = Df^q` at orbit point `base`.
pub fn monodromy_at<R: Real>(
    curve: &BoundaryCurve<R>,
    orbit: &PeriodicOrbit<R>,
    base: usize,
) -> Result<Mat2<R>> {
    let js = orbit_jacobians(curve, orbit, base)?;
    Ok(js.iter().fold(Mat2::identity(), |acc, j| j.mul(&acc)))
}

/// `Λ` at the orbit's base point.
pub fn monodromy<R: Real>(curve: &BoundaryCurve<R>, orbit: &PeriodicOrbit<R>) -> Result<Mat2<R>> {
    monodromy_at(curve, orbit, 0)
}

/// `Df^q` at the base point by central differences of the iterated map in
/// `(s, r)` coordinates, with relative step `ε^{1/3}`.
pub fn finite_difference_monodromy<R: Real>(
    curve: &BoundaryCurve<R>,
    orbit: &PeriodicOrbit<R>,
) -> Result<Mat2<R>> {
    let q = orbit.len();
    let map = |s: R, r: R| -> Result<[R; 2]> {
        let phi = (R::one() - r * r).sqrt().atan2(-r);
        let mut x = PhasePoint::new(s, phi);
        for _ in 0..q {
            x = step(curve, x)?;
        }
        Ok([x.s, x.r()])
    };
    let s0 = orbit.s[0];
    let r0 = -orbit.phi[0].cos();
    let h = R::from_f64(R::EPSILON.cbrt());
    let two_h = h * 2.0;
    let ds_p = map(s0 + h, r0)?;
    let ds_m = map(s0 - h, r0)?;
    let dr_p = map(s0, r0 + h)?;
    let dr_m = map(s0, r0 - h)?;
    Ok(Mat2::new(
        (ds_p[0] - ds_m[0]) / two_h,
        (dr_p[0] - dr_m[0]) / two_h,
        (ds_p[1] - ds_m[1]) / two_h,
        (dr_p[1] - dr_m[1]) / two_h,
    ))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::DomainSpec;
    use crate::numerics::Dd;
    use crate::orbits::{solve_periodic, SolveOptions};

    #[test]
    fn eigendata_of_trace_six() {
        let e = eigendata(&Mat2::new(3.0, 4.0, 2.0, 3.0));
        assert!(e.hyperbolic);
        assert_eq!(e.residue, -1.0);
        assert!((e.lambda.unwrap() - (3.0 - 2.0 * 2f64.sqrt())).abs() < 1e-15);
        let u = e.unstable.unwrap();
        let lu = Mat2::new(3.0, 4.0, 2.0, 3.0).apply(u);
        assert!((lu[0] * u[1] - lu[1] * u[0]).abs() < 1e-12);
    }

    #[test]
    fn parabolic_trace_has_zero_residue() {
        let e = eigendata(&Mat2::new(1.0, 0.3, 0.0, 1.0));
        assert!(!e.hyperbolic);
        assert_eq!(e.residue, 0.0);
        assert!(e.lambda.is_none() && e.theta.is_none());
    }

    #[test]
    fn circle_orbits_are_parabolic() {
        let c = BoundaryCurve::<f64>::build(&DomainSpec::circle(1.0)).unwrap();
        for (p, q) in [(1, 2), (1, 3), (2, 5), (3, 7), (1, 8)] {
            let o = solve_periodic(&c, p, q, None, &SolveOptions::default()).unwrap();
            assert!((o.eigen.trace - 2.0).abs() < 1e-10, "{p}/{q}: {}", o.eigen.trace);
            assert!(o.eigen.residue.abs() <= 1e-10);
            assert!((o.monodromy.det() - 1.0).abs() < 1e-10);
        }
    }

    #[test]
    fn trace_does_not_depend_on_base_point() {
        let c = BoundaryCurve::<f64>::build(&DomainSpec::default_generic()).unwrap();
        let o = solve_periodic(&c, 2, 5, None, &SolveOptions::default()).unwrap();
        let t0 = o.eigen.trace;
        for b in 0..5 {
            let m = monodromy_at(&c, &o, b).unwrap();
            assert!((m.trace() - t0).abs() <= 1e-10 * t0.abs(), "base {b}");
            assert!((m.det() - 1.0).abs() < 1e-8);
        }
    }

    #[test]
    fn ellipse_axis_orbit_matches_finite_differences() {
        let c = BoundaryCurve::<Dd>::build(&DomainSpec::default_ellipse()).unwrap();
        let o = solve_periodic(&c, 1, 2, None, &SolveOptions::default()).unwrap();
        assert!(o.eigen.hyperbolic);
        let fd = finite_difference_monodromy(&c, &o).unwrap();
        let lam = o.eigen.lambda.unwrap().to_f64();
        let lam_fd = eigendata(&fd).lambda.unwrap().to_f64();
        assert!((lam - lam_fd).abs() <= 1e-8 * lam, "{lam} vs {lam_fd}");
        // λ = ((a − c)/(a + c))² with c the focal distance
        let focal = (1.0f64 - 0.36).sqrt();
        let exact = ((1.0 - focal) / (1.0 + focal)).powi(2);
        assert!((lam - exact).abs() <= 1e-12 * exact, "{lam} vs {exact}");
    }
}
