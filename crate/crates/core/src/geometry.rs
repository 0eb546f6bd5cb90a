//! Strictly convex domains in polar form about an interior point, with
//! spectrally accurate arclength.

use std::collections::BTreeMap;
use std::ops::{Add, Mul, Neg, Sub};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::numerics::{Precision, Real};

/// Number of angular samples used to certify strict convexity.
pub const CONVEXITY_SAMPLES: usize = 4096;

const MIN_SPECTRAL_SAMPLES: usize = 64;
const MAX_SPECTRAL_SAMPLES: usize = 4096;

/// Domain description as read from JSON.
///
/// The `fourier` kind perturbs either a circle of radius `R0` or, when `a`
/// and `b` are given instead, the polar radius of the ellipse with those
/// semi-axes.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase", deny_unknown_fields)]
pub enum DomainSpec {
    Circle {
        #[serde(rename = "R")]
        radius: f64,
    },
    Ellipse {
        a: f64,
        b: f64,
    },
    Fourier {
        #[serde(rename = "R0", default, skip_serializing_if = "Option::is_none")]
        r0: Option<f64>,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        a: Option<f64>,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        b: Option<f64>,
        /// Mode number (as a string key) to coefficient.
        #[serde(default)]
        cos: BTreeMap<String, f64>,
        #[serde(default)]
        sin: BTreeMap<String, f64>,
    },
}

impl DomainSpec {
    pub fn circle(radius: f64) -> Self {
        DomainSpec::Circle { radius }
    }

    pub fn ellipse(a: f64, b: f64) -> Self {
        DomainSpec::Ellipse { a, b }
    }

    /// The default test ellipse, a = 1 and b = 0.6.
    pub fn default_ellipse() -> Self {
        DomainSpec::ellipse(1.0, 0.6)
    }

    /// Ellipse a = 1, b = 0.6 with a 0.005 cos 3θ and a 0.003 sin 4θ term.
    /// Both axis symmetries and integrability are broken.
    pub fn default_generic() -> Self {
        DomainSpec::Fourier {
            r0: None,
            a: Some(1.0),
            b: Some(0.6),
            cos: BTreeMap::from([("3".to_string(), 0.005)]),
            sin: BTreeMap::from([("4".to_string(), 0.003)]),
        }
    }

    /// Fourier modes `(k, c_k, s_k)` in increasing `k`; empty for circles and
    /// ellipses.
    fn modes(&self) -> Result<Vec<(u32, f64, f64)>> {
        let DomainSpec::Fourier { cos, sin, .. } = self else {
            return Ok(Vec::new());
        };
        let mut modes: BTreeMap<u32, (f64, f64)> = BTreeMap::new();
        for (table, slot) in [(cos, 0), (sin, 1)] {
            for (key, &v) in table {
                let k: u32 = key.trim().parse().map_err(|_| {
                    Error::InvalidSpec(format!("Fourier mode `{key}` is not a nonnegative integer"))
                })?;
                if k == 0 {
                    return Err(Error::InvalidSpec("Fourier mode 0 is not allowed".into()));
                }
                if !v.is_finite() {
                    return Err(Error::InvalidSpec(format!("coefficient of mode {k} is {v}")));
                }
                let e = modes.entry(k).or_default();
                if slot == 0 {
                    e.0 = v;
                } else {
                    e.1 = v;
                }
            }
        }
        Ok(modes
            .into_iter()
            .filter(|(_, (c, s))| *c != 0.0 || *s != 0.0)
            .map(|(k, (c, s))| (k, c, s))
            .collect())
    }

    /// Resolves the builtin names `circle`, `ellipse` and `generic`.
    pub fn builtin(name: &str) -> Option<Self> {
        match name {
            "circle" => Some(DomainSpec::circle(1.0)),
            "ellipse" => Some(DomainSpec::default_ellipse()),
            "generic" => Some(DomainSpec::default_generic()),
            _ => None,
        }
    }

    fn validate(&self) -> Result<()> {
        let positive = |name: &str, v: f64| {
            if v.is_finite() && v > 0.0 {
                Ok(())
            } else {
                Err(Error::InvalidSpec(format!("{name} must be positive, got {v}")))
            }
        };
        match self {
            DomainSpec::Circle { radius } => positive("R", *radius),
            DomainSpec::Ellipse { a, b } => {
                positive("a", *a)?;
                positive("b", *b)?;
                if a < b {
                    return Err(Error::InvalidSpec(format!(
                        "ellipse needs a >= b, got a = {a}, b = {b}"
                    )));
                }
                Ok(())
            }
            DomainSpec::Fourier { r0, a, b, .. } => {
                match (r0, a, b) {
                    (Some(r), None, None) => positive("R0", *r)?,
                    (None, Some(a), Some(b)) => {
                        positive("a", *a)?;
                        positive("b", *b)?;
                    }
                    _ => {
                        return Err(Error::InvalidSpec(
                            "fourier domain needs either R0 or both a and b".into(),
                        ))
                    }
                }
                self.modes().map(|_| ())
            }
        }
    }
}

/// Plane vector.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct V2<R> {
    pub x: R,
    pub y: R,
}

impl<R: Real> V2<R> {
    pub fn new(x: R, y: R) -> Self {
        V2 { x, y }
    }
    pub fn dot(self, o: Self) -> R {
        self.x * o.x + self.y * o.y
    }
    pub fn cross(self, o: Self) -> R {
        self.x * o.y - self.y * o.x
    }
    pub fn norm(self) -> R {
        self.x.hypot(self.y)
    }
    /// Counterclockwise quarter turn.
    pub fn rot90(self) -> Self {
        V2::new(-self.y, self.x)
    }
    pub fn scale(self, k: R) -> Self {
        V2::new(self.x * k, self.y * k)
    }
    pub fn to_f64(self) -> [f64; 2] {
        [self.x.to_f64(), self.y.to_f64()]
    }
}

impl<R: Real> Add for V2<R> {
    type Output = Self;
    fn add(self, o: Self) -> Self {
        V2::new(self.x + o.x, self.y + o.y)
    }
}

impl<R: Real> Sub for V2<R> {
    type Output = Self;
    fn sub(self, o: Self) -> Self {
        V2::new(self.x - o.x, self.y - o.y)
    }
}

impl<R: Real> Neg for V2<R> {
    type Output = Self;
    fn neg(self) -> Self {
        V2::new(-self.x, -self.y)
    }
}

impl<R: Real> Mul<R> for V2<R> {
    type Output = Self;
    fn mul(self, k: R) -> Self {
        self.scale(k)
    }
}

/// Position and angular derivatives of the boundary at polar angle θ.
#[derive(Debug, Clone, Copy)]
pub struct Frame<R> {
    pub pos: V2<R>,
    /// dγ/dθ
    pub d1: V2<R>,
    /// d²γ/dθ²
    pub d2: V2<R>,
    /// |dγ/dθ|
    pub speed: R,
    /// d|dγ/dθ|/dθ
    pub dspeed: R,
}

impl<R: Real> Frame<R> {
    pub fn tangent(&self) -> V2<R> {
        self.d1.scale(R::one() / self.speed)
    }
    /// Inward unit normal (the curve is positively oriented).
    pub fn normal(&self) -> V2<R> {
        self.tangent().rot90()
    }
    pub fn curvature(&self) -> R {
        self.d1.cross(self.d2) / (self.speed * self.speed * self.speed)
    }
}

/// Point, unit tangent and curvature at an arclength parameter.
#[derive(Debug, Clone, Copy)]
pub struct Evaluation<R> {
    pub point: V2<R>,
    pub tangent: V2<R>,
    pub curvature: R,
}

#[derive(Debug, Clone)]
enum Base<R> {
    Circle(R),
    Ellipse { a: R, b: R },
}

/// Antiderivative of a smooth 2π-periodic function, from its truncated
/// Fourier series: `F(θ) = mean·θ + Σ (a_k sin kθ + b_k (1 − cos kθ)) / k`.
#[derive(Debug, Clone, Default)]
struct Primitive<R> {
    mean: R,
    // already divided by k
    sin_coef: Vec<R>,
    cos_coef: Vec<R>,
    // bound on the periodic part
    bound: R,
    // double copies for the coarse stage of the inversion
    mean64: f64,
    sin64: Vec<f64>,
    cos64: Vec<f64>,
}

impl<R: Real> Primitive<R> {
    fn from_fn(f: impl Fn(R) -> R) -> Primitive<R> {
        let mut n = MIN_SPECTRAL_SAMPLES;
        loop {
            let (mean, a, b) = fourier_coefficients(&f, n);
            let tail = a[n / 4..]
                .iter()
                .chain(&b[n / 4..])
                .fold(0.0f64, |m, c| m.max(c.to_f64().abs()));
            let scale = mean.to_f64().abs().max(f64::MIN_POSITIVE);
            if tail <= 8.0 * R::EPSILON * scale || n >= MAX_SPECTRAL_SAMPLES {
                let keep_cut = 1e-3 * R::EPSILON * scale;
                let keep = (0..a.len())
                    .rev()
                    .find(|&k| a[k].to_f64().abs().max(b[k].to_f64().abs()) > keep_cut)
                    .map_or(0, |k| k + 1);
                let mut sin_coef = Vec::with_capacity(keep);
                let mut cos_coef = Vec::with_capacity(keep);
                let mut bound = R::zero();
                for k in 0..keep {
                    let kk = R::from_f64((k + 1) as f64);
                    sin_coef.push(a[k] / kk);
                    cos_coef.push(b[k] / kk);
                    bound += (a[k].abs() + b[k].abs() * 2.0) / kk;
                }
                return Primitive {
                    mean,
                    mean64: mean.to_f64(),
                    sin64: sin_coef.iter().map(|c| c.to_f64()).collect(),
                    cos64: cos_coef.iter().map(|c| c.to_f64()).collect(),
                    sin_coef,
                    cos_coef,
                    bound,
                };
            }
            n *= 2;
        }
    }

    fn eval(&self, theta: R) -> R {
        let (s1, c1) = theta.sin_cos();
        let (mut s, mut c) = (s1, c1);
        let mut acc = R::zero();
        for k in 0..self.sin_coef.len() {
            acc += self.sin_coef[k] * s + self.cos_coef[k] * (R::one() - c);
            let ns = s * c1 + c * s1;
            c = c * c1 - s * s1;
            s = ns;
        }
        self.mean * theta + acc
    }

    /// `F` and `F′` from the series.
    fn eval_with_derivative<T: Real>(&self, theta: T, mean: T, sin_coef: &[T], cos_coef: &[T]) -> (T, T) {
        let (s1, c1) = theta.sin_cos();
        let (mut s, mut c) = (s1, c1);
        let mut acc = T::zero();
        let mut der = T::zero();
        for k in 0..sin_coef.len() {
            let kk = (k + 1) as f64;
            acc += sin_coef[k] * s + cos_coef[k] * (T::one() - c);
            der += (sin_coef[k] * c + cos_coef[k] * s) * kk;
            let ns = s * c1 + c * s1;
            c = c * c1 - s * s1;
            s = ns;
        }
        (mean * theta + acc, mean + der)
    }

    /// Solves `F(θ) = s`: Newton in double precision, then polished in `R`.
    fn invert(&self, s: R) -> R {
        let target = s.to_f64();
        let slack = self.bound.to_f64() / self.mean64 + 1e-12;
        let (mut lo, mut hi) = (target / self.mean64 - slack, target / self.mean64 + slack);
        let mut t = target / self.mean64;
        for _ in 0..100 {
            let (g, d) = self.eval_with_derivative(t, self.mean64, &self.sin64, &self.cos64);
            let g = g - target;
            if g > 0.0 {
                hi = t;
            } else {
                lo = t;
            }
            let mut next = t - g / d;
            if !(next > lo && next < hi) {
                next = 0.5 * (lo + hi);
            }
            let done = (next - t).abs() <= 4.0 * f64::EPSILON * (1.0 + t.abs());
            t = next;
            if done || hi - lo <= 2.0 * f64::EPSILON * (1.0 + t.abs()) {
                break;
            }
        }
        let mut t = R::from_f64(t);
        if R::PRECISION == Precision::Double {
            return t;
        }
        for _ in 0..4 {
            let (g, d) = self.eval_with_derivative(t, self.mean, &self.sin_coef, &self.cos_coef);
            let step = (g - s) / d;
            t -= step;
            if step.abs().to_f64() <= 4.0 * R::EPSILON * (1.0 + t.abs().to_f64()) {
                break;
            }
        }
        t
    }

    fn period_integral(&self) -> R {
        self.mean * R::two_pi()
    }
}

/// Mean and cosine/sine coefficients (k = 1..n/2−1) of `f` from `n`
/// equispaced samples.
fn fourier_coefficients<R: Real>(f: &impl Fn(R) -> R, n: usize) -> (R, Vec<R>, Vec<R>) {
    let step = R::two_pi() / R::from_f64(n as f64);
    let table: Vec<(R, R)> = (0..n)
        .map(|j| (step * R::from_f64(j as f64)).sin_cos())
        .collect();
    let samples: Vec<R> = (0..n).map(|j| f(step * R::from_f64(j as f64))).collect();
    let inv_n = R::one() / R::from_f64(n as f64);
    let mean = samples.iter().copied().sum::<R>() * inv_n;
    let half = n / 2 - 1;
    let mut a = vec![R::zero(); half];
    let mut b = vec![R::zero(); half];
    for k in 1..=half {
        let mut sa = R::zero();
        let mut sb = R::zero();
        for (j, &fj) in samples.iter().enumerate() {
            let (sn, cs) = table[(j * k) % n];
            sa += fj * cs;
            sb += fj * sn;
        }
        a[k - 1] = sa * inv_n * 2.0;
        b[k - 1] = sb * inv_n * 2.0;
    }
    (mean, a, b)
}

/// A certified strictly convex closed curve.
#[derive(Debug, Clone)]
pub struct BoundaryCurve<R> {
    spec: DomainSpec,
    base: Base<R>,
    terms: Vec<(R, R, R)>,
    arclength: Primitive<R>,
    lazutkin: Primitive<R>,
    length: R,
    lazutkin_c: R,
    min_curvature: f64,
}

impl<R: Real> BoundaryCurve<R> {
    pub fn build(spec: &DomainSpec) -> Result<Self> {
        spec.validate()?;
        let f = R::from_f64;
        let (base, terms) = match spec {
            DomainSpec::Circle { radius } => (Base::Circle(f(*radius)), Vec::new()),
            DomainSpec::Ellipse { a, b } => (Base::Ellipse { a: f(*a), b: f(*b) }, Vec::new()),
            DomainSpec::Fourier { r0, a, b, .. } => {
                let base = match r0 {
                    Some(r) => Base::Circle(f(*r)),
                    None => Base::Ellipse {
                        a: f(a.unwrap_or_default()),
                        b: f(b.unwrap_or_default()),
                    },
                };
                let terms = spec
                    .modes()?
                    .into_iter()
                    .map(|(k, c, s)| (f(k as f64), f(c), f(s)))
                    .collect();
                (base, terms)
            }
        };
        let mut curve = BoundaryCurve {
            spec: spec.clone(),
            base,
            terms,
            arclength: Primitive::default(),
            lazutkin: Primitive::default(),
            length: R::zero(),
            lazutkin_c: R::zero(),
            min_curvature: 0.0,
        };
        curve.min_curvature = curve.certify_convexity()?;
        curve.arclength = Primitive::from_fn(|t| curve.frame(t).speed);
        curve.length = curve.arclength.period_integral();
        curve.lazutkin = Primitive::from_fn(|t| {
            let fr = curve.frame(t);
            // kappa^(2/3) ds = kappa^(2/3) |γ'| dθ
            (fr.curvature().ln() * (2.0 / 3.0)).exp() * fr.speed
        });
        curve.lazutkin_c = curve.lazutkin.period_integral();
        Ok(curve)
    }

    /// Checks r > 0 and a positive curvature numerator on a dense grid, with
    /// a margin for the variation between samples. Returns the smallest
    /// sampled curvature.
    fn certify_convexity(&self) -> Result<f64> {
        let n = CONVEXITY_SAMPLES;
        let mut kappa = Vec::with_capacity(n);
        for j in 0..n {
            let t = j as f64 / n as f64 * std::f64::consts::TAU;
            let [r, r1, r2] = self.polar(R::from_f64(t)).map(Real::to_f64);
            if r.is_nan() || r <= 0.0 {
                return Err(Error::InvalidSpec(format!(
                    "polar radius {r} is not positive at theta = {t}"
                )));
            }
            let num = r * r + 2.0 * r1 * r1 - r * r2;
            kappa.push((t, num / (r * r + r1 * r1).powf(1.5)));
        }
        let jump = (0..n)
            .map(|j| (kappa[(j + 1) % n].1 - kappa[j].1).abs())
            .fold(0.0, f64::max);
        let (theta, kmin) = kappa
            .iter()
            .copied()
            .fold((0.0, f64::INFINITY), |acc, x| if x.1 < acc.1 { x } else { acc });
        if kmin - jump <= 0.0 {
            return Err(Error::NotStrictlyConvex {
                theta,
                min_curvature: kmin,
            });
        }
        Ok(kmin)
    }

    pub fn spec(&self) -> &DomainSpec {
        &self.spec
    }

    /// Total boundary length.
    pub fn length(&self) -> R {
        self.length
    }

    /// `∫ κ^{2/3} ds` over the whole boundary, κ the curvature.
    pub fn lazutkin_constant(&self) -> R {
        self.lazutkin_c
    }

    /// Smallest curvature seen by the convexity certificate.
    pub fn min_curvature(&self) -> f64 {
        self.min_curvature
    }

    /// Whether the domain is a circle (rotationally symmetric).
    pub fn is_circle(&self) -> bool {
        matches!(self.base, Base::Circle(_)) && self.terms.is_empty()
    }

    /// Polar radius and its first two derivatives.
    pub fn polar(&self, theta: R) -> [R; 3] {
        let (mut r, mut r1, mut r2) = match self.base {
            Base::Circle(radius) => (radius, R::zero(), R::zero()),
            Base::Ellipse { a, b } => {
                let (s, c) = theta.sin_cos();
                let (a2, b2) = (a * a, b * b);
                let diff = a2 - b2;
                let d = b2 + diff * s * s;
                let d1 = diff * s * c * 2.0;
                let d2 = diff * (c * c - s * s) * 2.0;
                let ab = a * b;
                let inv_sqrt = R::one() / d.sqrt();
                let inv32 = inv_sqrt / d;
                let inv52 = inv32 / d;
                (
                    ab * inv_sqrt,
                    -(ab * d1 * inv32) * 0.5,
                    ab * (d1 * d1 * inv52 * 0.75 - d2 * inv32 * 0.5),
                )
            }
        };
        for &(k, c, s) in &self.terms {
            let (sn, cs) = (theta * k).sin_cos();
            r += c * cs + s * sn;
            r1 += k * (s * cs - c * sn);
            r2 -= k * k * (c * cs + s * sn);
        }
        [r, r1, r2]
    }

    pub fn frame(&self, theta: R) -> Frame<R> {
        let [r, r1, r2] = self.polar(theta);
        let (s, c) = theta.sin_cos();
        let e = V2::new(c, s);
        let n = e.rot90();
        let d1 = e * r1 + n * r;
        let d2 = e * (r2 - r) + n * (r1 * 2.0);
        let speed = (r * r + r1 * r1).sqrt();
        Frame {
            pos: e * r,
            d1,
            d2,
            speed,
            dspeed: (r * r1 + r1 * r2) / speed,
        }
    }

    pub fn point(&self, theta: R) -> V2<R> {
        let [r, _, _] = self.polar(theta);
        let (s, c) = theta.sin_cos();
        V2::new(c * r, s * r)
    }

    pub fn curvature_at_angle(&self, theta: R) -> R {
        self.frame(theta).curvature()
    }

    /// Lifted arclength `s(θ)` with `s(0) = 0` and `s(θ + 2π) = s(θ) + L`.
    pub fn arclength_of_angle(&self, theta: R) -> R {
        self.arclength.eval(theta)
    }

    /// Inverse of [`Self::arclength_of_angle`] on the lifted line.
    pub fn angle_of_arclength(&self, s: R) -> R {
        self.arclength.invert(s)
    }

    /// Point, unit tangent and curvature at arclength `s` (any real `s`).
    pub fn evaluate(&self, s: R) -> Evaluation<R> {
        let fr = self.frame(self.angle_of_arclength(s));
        Evaluation {
            point: fr.pos,
            tangent: fr.tangent(),
            curvature: fr.curvature(),
        }
    }

    /// Lazutkin abscissa `C⁻¹ ∫₀^s κ^{2/3}` at polar angle θ, not reduced
    /// modulo 1.
    pub fn lazutkin_abscissa(&self, theta: R) -> R {
        self.lazutkin.eval(theta) / self.lazutkin_c
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numerics::Dd;
    use std::f64::consts::PI;

    #[test]
    fn circle_length_and_evaluation() {
        let c = BoundaryCurve::<f64>::build(&DomainSpec::circle(1.0)).unwrap();
        assert!((c.length() - 2.0 * PI).abs() < 1e-12 * 2.0 * PI);
        let e = c.evaluate(0.0);
        assert!((e.point.x - 1.0).abs() < 1e-15 && e.point.y.abs() < 1e-15);
        assert!((e.tangent.y - 1.0).abs() < 1e-15);
        assert!((e.curvature - 1.0).abs() < 1e-14);
        let c2 = BoundaryCurve::<f64>::build(&DomainSpec::circle(2.0)).unwrap();
        let e = c2.evaluate(2.0 * PI);
        assert!((e.point.x + 2.0).abs() < 1e-13 && e.point.y.abs() < 1e-13);
        assert!((e.curvature - 0.5).abs() < 1e-14);
    }

    #[test]
    fn ellipse_length_matches_elliptic_integral() {
        let c = BoundaryCurve::<f64>::build(&DomainSpec::ellipse(1.0, 0.6)).unwrap();
        // 4 a E(1 - b^2/a^2)
        let want = 5.105_399_772_679_626;
        assert!((c.length() - want).abs() < 1e-12 * want, "{} vs {want}", c.length());
        // vertex radius of curvature b^2/a
        let e = c.evaluate(0.0);
        assert!((1.0 / e.curvature - 0.36).abs() < 1e-12);
        // s(pi) = L/2
        assert!((c.arclength_of_angle(PI) - c.length() / 2.0).abs() < 1e-12);
    }

    #[test]
    fn extended_length_of_ellipse() {
        let c = BoundaryCurve::<Dd>::build(&DomainSpec::ellipse(1.0, 0.6)).unwrap();
        // 4 a E(1 - b^2) with b the double nearest 0.6
        let want: Dd = "5.1053997726796256333708831153227".parse().unwrap();
        assert!(((c.length() - want) / want).abs().to_f64() < 1e-29);
    }

    #[test]
    fn nonconvex_fourier_rejected() {
        let spec = DomainSpec::Fourier {
            r0: Some(1.0),
            a: None,
            b: None,
            cos: BTreeMap::from([("2".to_string(), 0.4)]),
            sin: BTreeMap::new(),
        };
        match BoundaryCurve::<f64>::build(&spec) {
            Err(Error::NotStrictlyConvex { theta, .. }) => {
                // minimum curvature sits on the minor axis
                assert!((theta - PI / 2.0).abs() < 1e-2 || (theta - 1.5 * PI).abs() < 1e-2);
            }
            other => panic!("expected NotStrictlyConvex, got {other:?}"),
        }
    }

    #[test]
    fn invalid_specs() {
        for spec in [
            DomainSpec::circle(0.0),
            DomainSpec::ellipse(1.0, -0.2),
            DomainSpec::ellipse(0.5, 1.0),
        ] {
            assert!(matches!(
                BoundaryCurve::<f64>::build(&spec),
                Err(Error::InvalidSpec(_))
            ));
        }
    }

    #[test]
    fn angle_arclength_roundtrip() {
        let c = BoundaryCurve::<f64>::build(&DomainSpec::default_generic()).unwrap();
        for j in 0..100 {
            let t = -7.0 + 0.173 * j as f64;
            let back = c.angle_of_arclength(c.arclength_of_angle(t));
            assert!((back - t).abs() < 1e-12 * (1.0 + t.abs()));
        }
        let circ = BoundaryCurve::<f64>::build(&DomainSpec::circle(1.0)).unwrap();
        assert!((circ.arclength_of_angle(1.234) - 1.234).abs() < 1e-15);
    }

    #[test]
    fn curvature_matches_tangent_angle_derivative() {
        let c = BoundaryCurve::<f64>::build(&DomainSpec::default_generic()).unwrap();
        let h = 1e-5;
        for j in 0..100 {
            let s = 0.051 * j as f64;
            let tp = c.evaluate(s + h).tangent;
            let tm = c.evaluate(s - h).tangent;
            let dphi = tm.cross(tp).atan2(tm.dot(tp));
            let k = c.evaluate(s).curvature;
            assert!((dphi / (2.0 * h) - k).abs() < 1e-6);
        }
    }

    #[test]
    fn ellipse_is_centrally_symmetric() {
        let c = BoundaryCurve::<f64>::build(&DomainSpec::ellipse(1.0, 0.6)).unwrap();
        let half = c.length() / 2.0;
        for j in 0..20 {
            let s = 0.37 * j as f64;
            let p = c.evaluate(s).point;
            let q = c.evaluate(s + half).point;
            assert!((p + q).norm() < 1e-12);
        }
    }

    #[test]
    fn circle_lazutkin_constant() {
        let c = BoundaryCurve::<f64>::build(&DomainSpec::circle(1.0)).unwrap();
        assert!((c.lazutkin_constant() - 2.0 * PI).abs() < 1e-13);
        assert!((c.lazutkin_abscissa(PI) - 0.5).abs() < 1e-15);
    }

    #[test]
    fn spec_json_shapes() {
        let s: DomainSpec = serde_json::from_str(r#"{"kind":"circle","R":1.0}"#).unwrap();
        assert_eq!(s, DomainSpec::circle(1.0));
        let s: DomainSpec = serde_json::from_str(r#"{"kind":"ellipse","a":1.0,"b":0.6}"#).unwrap();
        assert_eq!(s, DomainSpec::ellipse(1.0, 0.6));
        let s: DomainSpec = serde_json::from_str(
            r#"{"kind":"fourier","R0":1.0,"cos":{"3":0.005},"sin":{"4":0.003}}"#,
        )
        .unwrap();
        assert!(matches!(s, DomainSpec::Fourier { r0: Some(_), .. }));
        assert!(BoundaryCurve::<f64>::build(&s).is_ok());
        let s: DomainSpec =
            serde_json::from_str(r#"{"kind":"fourier","R0":1.0,"cos":{"x":0.1}}"#).unwrap();
        assert!(matches!(BoundaryCurve::<f64>::build(&s), Err(Error::InvalidSpec(_))));
        let bad = serde_json::from_str::<DomainSpec>(r#"{"kind":"circle","R":1.0,"x":2}"#);
        assert!(bad.is_err());
        let round: DomainSpec =
            serde_json::from_str(&serde_json::to_string(&DomainSpec::default_generic()).unwrap())
                .unwrap();
        assert_eq!(round, DomainSpec::default_generic());
    }
}
