//! The billiard map, the chord-length generating function and its
//! derivatives, and Lazutkin coordinates.
//!
//! Conventions: `ℓ(s, s')` is the chord length, the action is `h = −ℓ`, and
//! the momentum-like coordinate is `r = −∂₁h = ∂₁ℓ = −cos φ`. With these the
//! Jacobian below is the textbook formula in `h` verbatim and the twist
//! `∂s'/∂r = −1/∂₁₂h` is positive.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::geometry::{BoundaryCurve, Frame, V2};
use crate::numerics::{Mat2, Real};

/// Default guard band on the incidence angle.
pub const DEFAULT_GRAZING_GUARD: f64 = 1e-8;

const SCAN_CELLS: usize = 64;

/// A point of the phase cylinder: arclength and incidence angle in (0, π).
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct PhasePoint<R> {
    pub s: R,
    pub phi: R,
}

impl<R: Real> PhasePoint<R> {
    pub fn new(s: R, phi: R) -> Self {
        PhasePoint { s, phi }
    }

    /// `r = −cos φ`.
    pub fn r(&self) -> R {
        -self.phi.cos()
    }
}

/// Chord length and its partials with respect to the polar angles of the
/// two endpoints.
#[derive(Debug, Clone, Copy)]
pub struct AngularChord<R> {
    pub len: R,
    pub l1: R,
    pub l2: R,
    pub l11: R,
    pub l12: R,
    pub l22: R,
}

/// Chord length and its partials with respect to the arclength of the two
/// endpoints.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct ChordData<R> {
    pub len: R,
    pub d1: R,
    pub d2: R,
    pub d11: R,
    pub d12: R,
    pub d22: R,
}

/// Closed-form chord partials from the two endpoint frames.
pub fn angular_chord<R: Real>(a: &Frame<R>, b: &Frame<R>) -> AngularChord<R> {
    let d = b.pos - a.pos;
    let len = d.norm();
    let u = d.scale(R::one() / len);
    let c1 = u.cross(a.d1);
    let c2 = u.cross(b.d1);
    AngularChord {
        len,
        l1: -u.dot(a.d1),
        l2: u.dot(b.d1),
        l11: c1 * c1 / len - u.dot(a.d2),
        l12: -(c1 * c2) / len,
        l22: c2 * c2 / len + u.dot(b.d2),
    }
}

/// Converts angular partials into arclength partials.
pub fn to_arclength<R: Real>(c: &AngularChord<R>, a: &Frame<R>, b: &Frame<R>) -> ChordData<R> {
    let (v1, v2) = (a.speed, b.speed);
    ChordData {
        len: c.len,
        d1: c.l1 / v1,
        d2: c.l2 / v2,
        d11: (c.l11 - c.l1 * a.dspeed / v1) / (v1 * v1),
        d12: c.l12 / (v1 * v2),
        d22: (c.l22 - c.l2 * b.dspeed / v2) / (v2 * v2),
    }
}

fn check_chord<R: Real>(curve: &BoundaryCurve<R>, len: R, s1: R, s2: R) -> Result<()> {
    if len.to_f64() <= 1e-10 * curve.length().to_f64() {
        return Err(Error::DegenerateChord {
            s: s1.to_f64(),
            s_prime: s2.to_f64(),
        });
    }
    Ok(())
}

/// Chord data between the boundary points at polar angles `t1`, `t2`.
pub fn chord_at_angles<R: Real>(curve: &BoundaryCurve<R>, t1: R, t2: R) -> Result<ChordData<R>> {
    let (a, b) = (curve.frame(t1), curve.frame(t2));
    let c = angular_chord(&a, &b);
    check_chord(curve, c.len, t1, t2)?;
    Ok(to_arclength(&c, &a, &b))
}

/// Chord data between arclength parameters `s` and `s2`.
pub fn chord<R: Real>(curve: &BoundaryCurve<R>, s: R, s2: R) -> Result<ChordData<R>> {
    let (t1, t2) = (curve.angle_of_arclength(s), curve.angle_of_arclength(s2));
    let (a, b) = (curve.frame(t1), curve.frame(t2));
    let c = angular_chord(&a, &b);
    check_chord(curve, c.len, s, s2)?;
    Ok(to_arclength(&c, &a, &b))
}

/// Reflection step in polar angle: from `(θ, φ)` returns `(θ', φ')` with
/// `θ' ∈ (θ, θ + 2π)`.
pub fn step_angle<R: Real>(curve: &BoundaryCurve<R>, theta: R, phi: R) -> Result<(R, R)> {
    let fr = curve.frame(theta);
    let t = fr.tangent();
    let (sp, cp) = phi.sin_cos();
    let dir = t * cp + t.rot90() * sp;
    let p0 = fr.pos;
    let g = |x: R| dir.cross(curve.point(x) - p0);

    // g < 0 just after θ and > 0 just before θ + 2π; one sign change between
    let two_pi = R::two_pi();
    let cell = two_pi / R::from_f64(SCAN_CELLS as f64);
    let mut lo = theta;
    let mut hi = theta + two_pi;
    for k in 1..SCAN_CELLS {
        let x = theta + cell * R::from_f64(k as f64);
        if g(x) >= R::zero() {
            hi = x;
            break;
        }
        lo = x;
    }

    let mut x = (lo + hi) * 0.5;
    let mut converged = false;
    for _ in 0..200 {
        let f = curve.frame(x);
        let gx = dir.cross(f.pos - p0);
        if gx < R::zero() {
            lo = x;
        } else {
            hi = x;
        }
        let slope = dir.cross(f.d1);
        let mut next = if slope != R::zero() { x - gx / slope } else { x };
        if !(next > lo && next < hi) {
            next = (lo + hi) * 0.5;
        }
        let tol = 4.0 * R::EPSILON * (1.0 + x.abs().to_f64());
        let moved = (next - x).abs().to_f64();
        x = next;
        if moved <= tol || (hi - lo).to_f64() <= tol {
            converged = true;
            break;
        }
    }
    if !converged {
        return Err(Error::no_convergence(
            "billiard step",
            format!("root bracket [{}, {}] did not shrink", lo.to_f64(), hi.to_f64()),
        ));
    }

    let f2 = curve.frame(x);
    let d = f2.pos - p0;
    let u = d.scale(R::one() / d.norm());
    let t2 = f2.tangent();
    let phi2 = (-u.dot(t2.rot90())).atan2(u.dot(t2));
    Ok((x, phi2))
}

fn check_guard<R: Real>(phi: R, guard: f64) -> Result<()> {
    let p = phi.to_f64();
    if !(p > guard && p < std::f64::consts::PI - guard) {
        return Err(Error::GrazingOrbit { phi: p });
    }
    Ok(())
}

/// One application of the billiard map. The returned arclength is lifted to
/// `(s, s + L)`.
pub fn step<R: Real>(curve: &BoundaryCurve<R>, x: PhasePoint<R>) -> Result<PhasePoint<R>> {
    step_with_guard(curve, x, DEFAULT_GRAZING_GUARD)
}

pub fn step_with_guard<R: Real>(
    curve: &BoundaryCurve<R>,
    x: PhasePoint<R>,
    guard: f64,
) -> Result<PhasePoint<R>> {
    check_guard(x.phi, guard)?;
    let theta = curve.angle_of_arclength(x.s);
    let (t2, phi2) = step_angle(curve, theta, x.phi)?;
    Ok(PhasePoint::new(curve.arclength_of_angle(t2), phi2))
}

/// Inverse of [`step`]: time reversal `φ ↦ π − φ` conjugates the map to its
/// inverse. The returned arclength is lifted to `(s − L, s)`.
pub fn inverse_step<R: Real>(curve: &BoundaryCurve<R>, x: PhasePoint<R>) -> Result<PhasePoint<R>> {
    let y = step(curve, PhasePoint::new(x.s, R::pi() - x.phi))?;
    Ok(PhasePoint::new(y.s - curve.length(), R::pi() - y.phi))
}

/// `Df` in `(s, r)` coordinates from the second partials of `h = −ℓ`.
pub fn jacobian_from_chord<R: Real>(c: &ChordData<R>) -> Result<Mat2<R>> {
    let (h11, h12, h22) = (-c.d11, -c.d12, -c.d22);
    if h12.abs().to_f64() <= 1e-10 {
        return Err(Error::TwistDegenerate { d12: c.d12.to_f64() });
    }
    Ok(Mat2::new(
        -h11 / h12,
        -(R::one() / h12),
        h12 - h22 * h11 / h12,
        -h22 / h12,
    ))
}

/// `Df⁻¹` at the image point, from the same chord.
pub fn inverse_jacobian_from_chord<R: Real>(c: &ChordData<R>) -> Result<Mat2<R>> {
    let (h11, h12, h22) = (-c.d11, -c.d12, -c.d22);
    if h12.abs().to_f64() <= 1e-10 {
        return Err(Error::TwistDegenerate { d12: c.d12.to_f64() });
    }
    Ok(Mat2::new(
        -h22 / h12,
        R::one() / h12,
        h11 * h22 / h12 - h12,
        -h11 / h12,
    ))
}

/// Jacobian of the billiard map at the phase point whose orbit segment is
/// the chord from `s` to `s2`.
pub fn jacobian<R: Real>(curve: &BoundaryCurve<R>, s: R, s2: R) -> Result<Mat2<R>> {
    jacobian_from_chord(&chord(curve, s, s2)?)
}

/// Lazutkin coordinates `(x, y)` with `x ∈ [0, 1)`.
pub fn lazutkin<R: Real>(curve: &BoundaryCurve<R>, x: PhasePoint<R>) -> (R, R) {
    let theta = curve.angle_of_arclength(x.s);
    let (xl, yl) = lazutkin_at_angle(curve, theta, x.phi);
    (xl - xl.floor(), yl)
}

/// Lazutkin coordinates at polar angle θ, with the abscissa not reduced.
pub fn lazutkin_at_angle<R: Real>(curve: &BoundaryCurve<R>, theta: R, phi: R) -> (R, R) {
    let kappa = curve.curvature_at_angle(theta);
    let rho_13 = (-(kappa.ln() / 3.0)).exp();
    let y = rho_13 * (phi * 0.5).sin() * 4.0 / curve.lazutkin_constant();
    (curve.lazutkin_abscissa(theta), y)
}

/// Incidence angle with Lazutkin ordinate `y` at polar angle θ.
pub fn phi_of_lazutkin_y<R: Real>(curve: &BoundaryCurve<R>, theta: R, y: R) -> R {
    let kappa = curve.curvature_at_angle(theta);
    let rho_m13 = (kappa.ln() / 3.0).exp();
    let half = y * curve.lazutkin_constant() * rho_m13 / 4.0;
    // asin via atan2
    let c = (R::one() - half * half).sqrt();
    half.atan2(c) * 2.0
}

/// Chord unit vector from `a` to `b`.
pub fn unit_chord<R: Real>(a: V2<R>, b: V2<R>) -> V2<R> {
    let d = b - a;
    d.scale(R::one() / d.norm())
}
