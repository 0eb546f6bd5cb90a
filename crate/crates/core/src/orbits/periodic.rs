use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use super::chain::{Chain, Relaxed};
use super::monodromy::{eigendata, monodromy_at, Eigendata};
use crate::billiard::{angular_chord, PhasePoint};
use crate::error::{Error, Result};
use crate::geometry::BoundaryCurve;
use crate::numerics::{gcd, Mat2, Real};

/// Knobs of the periodic solver.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SolveOptions {
    /// Number of initial phases for the multi-start.
    pub starts: usize,
    /// Seed of the phase jitter.
    pub seed: u64,
    /// Phase jitter as a fraction of the phase spacing.
    pub jitter: f64,
    pub max_iter: usize,
}

impl Default for SolveOptions {
    fn default() -> Self {
        SolveOptions {
            starts: 8,
            seed: 0,
            jitter: 0.1,
            max_iter: 200,
        }
    }
}

/// A converged periodic configuration of rotation number p/q.
#[derive(Debug, Clone)]
pub struct PeriodicOrbit<R> {
    pub p: u64,
    pub q: u64,
    /// Lifted polar angles of the q bounce points, increasing, with the
    /// closure `θ_q = θ_0 + 2πp`.
    pub theta: Vec<R>,
    /// Lifted arclengths of the bounce points.
    pub s: Vec<R>,
    /// Incidence angles.
    pub phi: Vec<R>,
    pub perimeter: R,
    /// Largest violation of the critical equations, in arclength units.
    pub residual: R,
    pub monodromy: Mat2<R>,
    pub eigen: Eigendata<R>,
    /// Perimeter gap to the best geometrically distinct orbit found by the
    /// multi-start, if any was found.
    pub margin: Option<f64>,
    pub iterations: usize,
}

/// Serializable orbit export.
#[derive(Debug, Clone, Serialize)]
pub struct OrbitExport {
    pub p: u64,
    pub q: u64,
    pub points: Vec<ExportPoint>,
    pub perimeter: String,
    pub residual: String,
    pub trace: String,
    pub lambda: Option<String>,
    pub residue: String,
    pub hyperbolic: bool,
}

#[derive(Debug, Clone, Serialize)]
pub struct ExportPoint {
    pub s: String,
    pub phi: String,
}

impl<R: Real> PeriodicOrbit<R> {
    pub fn len(&self) -> usize {
        self.theta.len()
    }

    pub fn is_empty(&self) -> bool {
        self.theta.is_empty()
    }

    /// Lifted angle of point `j` for any integer `j`.
    pub fn lifted_theta(&self, j: i64) -> R {
        let q = self.q as i64;
        let k = j.div_euclid(q);
        self.theta[j.rem_euclid(q) as usize] + R::two_pi() * R::from_f64((k * self.p as i64) as f64)
    }

    pub fn phase_points(&self) -> Vec<PhasePoint<R>> {
        self.s
            .iter()
            .zip(&self.phi)
            .map(|(&s, &phi)| PhasePoint::new(s, phi))
            .collect()
    }

    pub fn export(&self) -> OrbitExport {
        OrbitExport {
            p: self.p,
            q: self.q,
            points: self
                .s
                .iter()
                .zip(&self.phi)
                .map(|(s, phi)| ExportPoint {
                    s: s.to_full_string(),
                    phi: phi.to_full_string(),
                })
                .collect(),
            perimeter: self.perimeter.to_full_string(),
            residual: self.residual.to_full_string(),
            trace: self.eigen.trace.to_full_string(),
            lambda: self.eigen.lambda.map(|l| l.to_full_string()),
            residue: self.eigen.residue.to_full_string(),
            hyperbolic: self.eigen.hyperbolic,
        }
    }
}

/// Checks `0 < p/q < 1`, `q ≥ 2` and lowest terms.
pub fn check_rotation(p: u64, q: u64) -> Result<()> {
    if q < 2 || p == 0 || p >= q {
        return Err(Error::InvalidRotation(format!(
            "{p}/{q} is not in (0, 1) with q >= 2"
        )));
    }
    if gcd(p, q) != 1 {
        return Err(Error::InvalidRotation(format!("p/q not in lowest terms: {p}/{q}")));
    }
    Ok(())
}

/// Equally spaced (in arclength) configuration starting at arclength `s0`.
pub fn equal_spacing<R: Real>(curve: &BoundaryCurve<R>, p: u64, q: u64, s0: R) -> Vec<R> {
    let step = curve.length() * R::from_f64(p as f64) / R::from_f64(q as f64);
    (0..q)
        .map(|i| curve.angle_of_arclength(s0 + step * R::from_f64(i as f64)))
        .collect()
}

/// Rotates the cyclic labelling so that point 0 has the smallest angle
/// modulo 2π, then shifts the lift so that `θ_0 ∈ [0, 2π)`.
pub fn normalize_base<R: Real>(theta: &[R], p: u64) -> Vec<R> {
    let n = theta.len();
    let two_pi = R::two_pi();
    let reduced = |t: R| t - two_pi * (t / two_pi).floor();
    let k = (0..n)
        .min_by(|&a, &b| {
            reduced(theta[a])
                .partial_cmp(&reduced(theta[b]))
                .unwrap_or(std::cmp::Ordering::Equal)
        })
        .unwrap_or(0);
    let shift = two_pi * R::from_f64(p as f64);
    let mut out: Vec<R> = (0..n)
        .map(|i| {
            if k + i < n {
                theta[k + i]
            } else {
                theta[k + i - n] + shift
            }
        })
        .collect();
    let lift = two_pi * (out[0] / two_pi).floor();
    for t in &mut out {
        *t -= lift;
    }
    out
}

fn same_orbit(a: &[f64], b: &[f64]) -> bool {
    let two_pi = std::f64::consts::TAU;
    let canon = |v: &[f64]| {
        let mut w: Vec<f64> = v.iter().map(|t| t.rem_euclid(two_pi)).collect();
        w.sort_by(|x, y| x.partial_cmp(y).unwrap());
        w
    };
    let (a, b) = (canon(a), canon(b));
    if a.len() != b.len() {
        return false;
    }
    let n = a.len();
    let circ = |x: f64, y: f64| {
        let d = (x - y).rem_euclid(two_pi);
        d.min(two_pi - d)
    };
    (0..n).any(|k| (0..n).all(|i| circ(a[i], b[(i + k) % n]) < 1e-6))
}

struct Candidate<R> {
    relaxed: Relaxed<R>,
    theta0: f64,
}

/// Multi-start relaxation at working precision `R`.
fn multistart<R: Real>(
    curve: &BoundaryCurve<R>,
    p: u64,
    q: u64,
    opts: &SolveOptions,
) -> Result<(Relaxed<R>, Option<f64>)> {
    let chain = Chain::closed(curve, R::two_pi() * R::from_f64(p as f64));
    let mut rng = ChaCha8Rng::seed_from_u64(opts.seed);
    let spacing = curve.length().to_f64() / q as f64 / opts.starts.max(1) as f64;
    let mut found: Vec<Candidate<R>> = Vec::new();
    let mut last_err = None;
    for j in 0..opts.starts.max(1) {
        let jitter = if j == 0 {
            0.0
        } else {
            rng.gen_range(-0.5..0.5) * opts.jitter
        };
        let s0 = R::from_f64((j as f64 + jitter) * spacing);
        let x0 = equal_spacing(curve, p, q, s0);
        match chain.maximize(x0, opts.max_iter) {
            Ok(r) => {
                let x = normalize_base(&r.x, p);
                let theta0 = x[0].to_f64();
                found.push(Candidate {
                    relaxed: Relaxed { x, ..r },
                    theta0,
                });
            }
            Err(e) => last_err = Some(e),
        }
    }
    if found.is_empty() {
        return Err(last_err.unwrap_or_else(|| Error::no_convergence("periodic orbit", "no start")));
    }
    let slack = 64.0 * q as f64 * R::EPSILON * curve.length().to_f64();
    let mut best = 0;
    for i in 1..found.len() {
        let (a, b) = (&found[i], &found[best]);
        let (pa, pb) = (a.relaxed.eval.total.to_f64(), b.relaxed.eval.total.to_f64());
        if pa > pb + slack || ((pa - pb).abs() <= slack && a.theta0 < b.theta0) {
            best = i;
        }
    }
    let best_x: Vec<f64> = found[best].relaxed.x.iter().map(|t| t.to_f64()).collect();
    let best_p = found[best].relaxed.eval.total;
    let margin = found
        .iter()
        .filter(|c| {
            let x: Vec<f64> = c.relaxed.x.iter().map(|t| t.to_f64()).collect();
            !same_orbit(&x, &best_x)
        })
        .map(|c| (best_p - c.relaxed.eval.total).to_f64())
        .fold(None, |m: Option<f64>, v| Some(m.map_or(v, |m| m.min(v))));
    let relaxed = found.swap_remove(best).relaxed;
    Ok((relaxed, margin))
}

/// Maximal-perimeter periodic orbit of rotation number p/q.
///
/// Without `init`, runs a multi-start over `opts.starts` initial phases of
/// equally spaced configurations and keeps the largest perimeter. With
/// `init` (lifted polar angles), relaxes from that configuration only.
/// In extended precision the search runs in double precision first and the
/// winner is polished at working precision.
pub fn solve_periodic<R: Real>(
    curve: &BoundaryCurve<R>,
    p: u64,
    q: u64,
    init: Option<&[R]>,
    opts: &SolveOptions,
) -> Result<PeriodicOrbit<R>> {
    check_rotation(p, q)?;
    solve_configuration(curve, p, q, init, opts)
}

/// Like [`solve_periodic`] but without the lowest-terms requirement, so that
/// `n` points winding `p` times may be an iterated primitive orbit.
pub fn solve_configuration<R: Real>(
    curve: &BoundaryCurve<R>,
    p: u64,
    q: u64,
    init: Option<&[R]>,
    opts: &SolveOptions,
) -> Result<PeriodicOrbit<R>> {
    if q < 2 || p == 0 || p >= q {
        return Err(Error::InvalidRotation(format!(
            "{p}/{q} is not in (0, 1) with q >= 2"
        )));
    }
    let chain = Chain::closed(curve, R::two_pi() * R::from_f64(p as f64));
    let (relaxed, margin) = match init {
        Some(x0) => {
            if x0.len() != q as usize {
                return Err(Error::InvalidRotation(format!(
                    "initial configuration has {} points, expected {q}",
                    x0.len()
                )));
            }
            (relaxed_with_warm_start(curve, &chain, p, x0, opts)?, None)
        }
        None => {
            if R::PRECISION == <f64 as Real>::PRECISION {
                multistart(curve, p, q, opts)?
            } else {
                let coarse = BoundaryCurve::<f64>::build(curve.spec())?;
                match multistart(&coarse, p, q, opts) {
                    Ok((r, margin)) => {
                        let x0: Vec<R> = r.x.iter().map(|&t| R::from_f64(t)).collect();
                        (chain.maximize(x0, opts.max_iter)?, margin)
                    }
                    Err(_) => multistart(curve, p, q, opts)?,
                }
            }
        }
    };
    finish(curve, p, q, relaxed, margin)
}

fn relaxed_with_warm_start<R: Real>(
    curve: &BoundaryCurve<R>,
    chain: &Chain<'_, R>,
    p: u64,
    x0: &[R],
    opts: &SolveOptions,
) -> Result<Relaxed<R>> {
    if R::PRECISION != <f64 as Real>::PRECISION {
        let coarse = BoundaryCurve::<f64>::build(curve.spec())?;
        let cchain = Chain::closed(&coarse, std::f64::consts::TAU * p as f64);
        let xf: Vec<f64> = x0.iter().map(|t| t.to_f64()).collect();
        if let Ok(r) = cchain.maximize(xf, opts.max_iter) {
            // keep the low-order digits of the seed where the coarse solve
            // did not move the point
            let start: Vec<R> = x0
                .iter()
                .zip(&r.x)
                .map(|(&a, &b)| a + R::from_f64(b - a.to_f64()))
                .collect();
            if let Ok(r) = chain.maximize(start, opts.max_iter) {
                return Ok(r);
            }
        }
    }
    chain.maximize(x0.to_vec(), opts.max_iter)
}

fn finish<R: Real>(
    curve: &BoundaryCurve<R>,
    p: u64,
    q: u64,
    relaxed: Relaxed<R>,
    margin: Option<f64>,
) -> Result<PeriodicOrbit<R>> {
    let theta = relaxed.x;
    let n = theta.len();
    let s: Vec<R> = theta.iter().map(|&t| curve.arclength_of_angle(t)).collect();
    let frames: Vec<_> = theta.iter().map(|&t| curve.frame(t)).collect();
    let phi: Vec<R> = (0..n)
        .map(|i| {
            let a = &frames[i];
            let b = &frames[(i + 1) % n];
            let d = b.pos - a.pos;
            let t = a.tangent();
            t.cross(d).atan2(t.dot(d))
        })
        .collect();
    // perimeter recomputed from the final chords
    let perimeter = (0..n)
        .map(|i| angular_chord(&frames[i], &frames[(i + 1) % n]).len)
        .sum();
    let mut orbit = PeriodicOrbit {
        p,
        q,
        theta,
        s,
        phi,
        perimeter,
        residual: relaxed.eval.residual,
        monodromy: Mat2::identity(),
        eigen: eigendata(&Mat2::identity()),
        margin,
        iterations: relaxed.iterations,
    };
    orbit.monodromy = monodromy_at(curve, &orbit, 0)?;
    orbit.eigen = eigendata(&orbit.monodromy);
    Ok(orbit)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::billiard::step;
    use crate::geometry::DomainSpec;
    use crate::numerics::Dd;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn build(spec: DomainSpec) -> BoundaryCurve<f64> {
        BoundaryCurve::build(&spec).unwrap()
    }

    #[test]
    fn circle_triangle() {
        let c = build(DomainSpec::circle(1.0));
        let o = solve_periodic(&c, 1, 3, None, &SolveOptions::default()).unwrap();
        assert!((o.perimeter - 3.0 * 3f64.sqrt()).abs() < 1e-12);
        assert!(o.residual <= 10.0 * f64::EPSILON * c.length());
        for i in 0..3 {
            let gap = o.lifted_theta(i as i64 + 1) - o.theta[i];
            assert!((gap - std::f64::consts::TAU / 3.0).abs() < 1e-10);
        }
        // every phase is optimal, so the margin is essentially zero
        assert!(o.margin.unwrap().abs() < 1e-12);
    }

    #[test]
    fn ellipse_two_orbit_is_major_axis() {
        let c = build(DomainSpec::default_ellipse());
        let o = solve_periodic(&c, 1, 2, None, &SolveOptions::default()).unwrap();
        assert!((o.perimeter - 4.0).abs() < 1e-13);
        assert!(o.theta[0].abs() < 1e-9);
        assert!((o.theta[1] - std::f64::consts::PI).abs() < 1e-9);
        assert!(o.eigen.hyperbolic);
    }

    #[test]
    fn generic_extended_residual() {
        let c = BoundaryCurve::<Dd>::build(&DomainSpec::default_generic()).unwrap();
        let o = solve_periodic(&c, 2, 5, None, &SolveOptions::default()).unwrap();
        assert!(o.residual.to_f64() <= 1e-25);
        assert!((o.monodromy.det() - 1.0).abs().to_f64() < 1e-20);
    }

    #[test]
    fn maximal_beats_random_restarts() {
        let c = build(DomainSpec::default_generic());
        let best = solve_periodic(&c, 2, 5, None, &SolveOptions::default()).unwrap();
        let chain = Chain::closed(&c, 2.0 * std::f64::consts::TAU);
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for _ in 0..7 {
            let mut x: Vec<f64> = (0..5).map(|_| rng.gen_range(0.0..4.0 * std::f64::consts::PI)).collect();
            x.sort_by(|a, b| a.partial_cmp(b).unwrap());
            if let Ok(r) = chain.maximize(x, 200) {
                assert!(r.eval.total <= best.perimeter + 1e-12);
            }
        }
    }

    #[test]
    fn rejects_bad_rotation_numbers() {
        let c = build(DomainSpec::circle(1.0));
        let err = solve_periodic(&c, 2, 4, None, &SolveOptions::default()).unwrap_err();
        assert!(err.to_string().contains("p/q not in lowest terms"));
        assert!(check_rotation(0, 3).is_err());
        assert!(check_rotation(3, 2).is_err());
        assert!(check_rotation(1, 1).is_err());
        assert!(solve_configuration(&c, 2, 4, None, &SolveOptions::default()).is_ok());
    }

    #[test]
    fn reversed_orientation_has_same_perimeter() {
        let c = build(DomainSpec::default_generic());
        for (p, q) in [(1, 3), (2, 5), (1, 4)] {
            let a = solve_periodic(&c, p, q, None, &SolveOptions::default()).unwrap();
            let b = solve_periodic(&c, q - p, q, None, &SolveOptions::default()).unwrap();
            assert!((a.perimeter - b.perimeter).abs() < 1e-12, "{p}/{q}");
        }
    }

    #[test]
    fn critical_configuration_is_a_billiard_orbit() {
        let c = build(DomainSpec::default_generic());
        for (p, q) in [(1, 2), (1, 3), (2, 5), (3, 7)] {
            let o = solve_periodic(&c, p, q, None, &SolveOptions::default()).unwrap();
            let pts = o.phase_points();
            for i in 0..q as usize {
                let next = step(&c, pts[i]).unwrap();
                let j = (i + 1) % q as usize;
                let ds = (next.s - pts[j].s).rem_euclid(c.length());
                let ds = ds.min(c.length() - ds);
                assert!(ds <= 1e-10 * c.length(), "{p}/{q} point {i}: {ds:e}");
                assert!((next.phi - pts[j].phi).abs() < 1e-9);
            }
            for i in 0..q as usize {
                let gap = o.lifted_theta(i as i64 + 1) - o.theta[i];
                assert!(gap > 0.0 && gap < std::f64::consts::TAU);
            }
        }
    }

    #[test]
    fn warm_start_reproduces_orbit() {
        let c = build(DomainSpec::default_generic());
        let o = solve_periodic(&c, 1, 3, None, &SolveOptions::default()).unwrap();
        let seed: Vec<f64> = o.theta.iter().map(|t| t + 1e-3).collect();
        let w = solve_periodic(&c, 1, 3, Some(&seed), &SolveOptions::default()).unwrap();
        assert!((w.perimeter - o.perimeter).abs() < 1e-13);
        assert!(w.margin.is_none());
    }

    #[test]
    fn normalization_picks_smallest_reduced_angle() {
        let tau = std::f64::consts::TAU;
        let x = normalize_base(&[5.0, 7.0, 9.5], 1);
        assert!((x[0] - (7.0 - tau)).abs() < 1e-15);
        assert!((x[1] - (9.5 - tau)).abs() < 1e-15);
        assert!((x[2] - 5.0).abs() < 1e-15);
    }

    #[test]
    fn export_uses_full_precision_strings() {
        let c = BoundaryCurve::<Dd>::build(&DomainSpec::default_ellipse()).unwrap();
        let o = solve_periodic(&c, 1, 2, None, &SolveOptions::default()).unwrap();
        let json = serde_json::to_string(&o.export()).unwrap();
        assert!(json.contains("\"hyperbolic\":true"));
        assert!(o.export().perimeter.len() >= 32);
    }
}
