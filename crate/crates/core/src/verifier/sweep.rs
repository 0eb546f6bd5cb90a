use serde::Serialize;

use crate::error::{Error, Result};
use crate::geometry::BoundaryCurve;
use crate::numerics::{gcd, Precision, Real};
use crate::orbits::{solve_configuration, solve_heteroclinic, solve_periodic, PeriodicOrbit, SolveOptions};

/// Largest configuration size for which the continuation seeds are also
/// compared against an independent multi-start.
const MULTISTART_CHECK_POINTS: u64 = 24;

/// One member of the approximating family.
#[derive(Debug, Clone)]
pub struct SweepPoint<R> {
    pub n: usize,
    /// `L_{Np, Nq−1}`
    pub perimeter: R,
    /// `a_N = L_{Np, Nq−1} − N L_{p,q}`
    pub a: R,
    pub residual: R,
    /// `false` when `gcd(Np, Nq−1) > 1`, i.e. the configuration may be an
    /// iterated orbit of smaller period.
    pub primitive: bool,
}

#[derive(Debug, Clone, Serialize)]
pub struct SweepFailure {
    pub n: usize,
    pub message: String,
}

/// Perimeters of the `(Np, Nq−1)` family for `N` in `[n_min, n_max]`.
#[derive(Debug, Clone)]
pub struct SweepReport<R> {
    pub p: u64,
    pub q: u64,
    pub n_min: usize,
    pub n_max: usize,
    pub orbit: PeriodicOrbit<R>,
    pub length: R,
    pub points: Vec<SweepPoint<R>>,
    /// Values of `N` whose solve failed; the sweep continues past them.
    pub failures: Vec<SweepFailure>,
}

impl<R: Real> SweepReport<R> {
    pub fn hyperbolic(&self) -> bool {
        self.orbit.eigen.hyperbolic
    }

    pub fn lambda(&self) -> Option<R> {
        self.orbit.eigen.lambda
    }

    /// Smallest resolvable `|a_N + B|`: `10³ ε N q L`.
    pub fn precision_floor(&self, n: usize) -> f64 {
        1e3 * R::EPSILON * (n as f64) * (self.q as f64) * self.length.to_f64()
    }

    /// Difference quotients of β between `Np/(Nq−1)` and `p/q`:
    /// `Q_N = (−q a_N − L_{p,q}) / p`.
    pub fn quotients(&self) -> Vec<(usize, R)> {
        let (p, q) = (self.p as f64, self.q as f64);
        self.points
            .iter()
            .map(|pt| (pt.n, (-(pt.a * q) - self.orbit.perimeter) / p))
            .collect()
    }
}

/// Index into `y` with the closure `y_{j+n} = y_j + shift`.
fn lifted<R: Real>(y: &[R], shift: R, j: i64) -> R {
    let n = y.len() as i64;
    let k = j.div_euclid(n);
    y[j.rem_euclid(n) as usize] + shift * (k as f64)
}

/// Inserts one period of the base orbit into `y`, a configuration closing
/// after `winding` turns, opposite to the place where `y` departs most from
/// the orbit.
pub(crate) fn splice_period<R: Real>(orbit: &PeriodicOrbit<R>, y: &[R], winding: u64) -> Vec<R> {
    let n = y.len();
    let two_pi = R::two_pi();
    let period_turn = two_pi * (orbit.p as f64);
    let shift = two_pi * (winding as f64);
    let tau = std::f64::consts::TAU;
    let dev = |t: f64| {
        orbit
            .theta
            .iter()
            .map(|o| {
                let d = (t - o.to_f64()).rem_euclid(tau);
                d.min(tau - d)
            })
            .fold(f64::INFINITY, f64::min)
    };
    let defect = (0..n)
        .max_by(|&a, &b| {
            dev(y[a].to_f64())
                .partial_cmp(&dev(y[b].to_f64()))
                .unwrap_or(std::cmp::Ordering::Equal)
        })
        .unwrap_or(0);
    let ins = ((defect + n / 2) % n) as i64;
    let q = orbit.q as i64;
    (0..n as i64 + q)
        .map(|i| {
            if i < ins {
                y[i as usize]
            } else {
                lifted(y, shift, i - q) + period_turn
            }
        })
        .collect()
}

/// Builds the `L_{Np, Nq−1}` sequence.
///
/// For a hyperbolic base orbit each member is relaxed from a truncated
/// heteroclinic segment and, after the first, from the previous solution
/// with an extra period spliced in; the larger perimeter wins. Otherwise
/// each member comes from an independent multi-start.
pub fn sweep<R: Real>(
    curve: &BoundaryCurve<R>,
    p: u64,
    q: u64,
    n_min: usize,
    n_max: usize,
    opts: &SolveOptions,
) -> Result<SweepReport<R>> {
    if n_min < 2 || n_max < n_min {
        return Err(Error::InsufficientData(format!(
            "sweep range [{n_min}, {n_max}] must satisfy 2 <= N_min <= N_max"
        )));
    }
    let orbit = solve_periodic(curve, p, q, None, opts)?;
    if let Some(lam) = orbit.eigen.lambda {
        let depth = n_max as f64 * lam.to_f64().abs().ln().abs();
        if depth > 25.0 && R::PRECISION == Precision::Double {
            return Err(Error::InsufficientPrecision(format!(
                "N_max |log λ| = {depth:.1} > 25 needs extended precision"
            )));
        }
    }
    let hyperbolic = orbit.eigen.hyperbolic;
    let mut points: Vec<SweepPoint<R>> = Vec::new();
    let mut failures = Vec::new();
    let mut previous: Option<(usize, Vec<R>)> = None;
    let mut last_omega = f64::INFINITY;

    for n in n_min..=n_max {
        let winding = n as u64 * p;
        let count = n as u64 * q - 1;
        let omega = winding as f64 / count as f64;
        assert!(omega < last_omega && omega > p as f64 / q as f64);
        last_omega = omega;

        let solved = if hyperbolic {
            continuation_step(curve, &orbit, n, previous.as_ref(), opts)
        } else {
            solve_configuration(curve, winding, count, None, opts)
        };
        match solved {
            Ok(o) => {
                points.push(SweepPoint {
                    n,
                    perimeter: o.perimeter,
                    a: o.perimeter - orbit.perimeter * (n as f64),
                    residual: o.residual,
                    primitive: gcd(winding, count) == 1,
                });
                previous = Some((n, o.theta));
            }
            Err(e) => failures.push(SweepFailure {
                n,
                message: e.to_string(),
            }),
        }
    }
    Ok(SweepReport {
        p,
        q,
        n_min,
        n_max,
        length: curve.length(),
        orbit,
        points,
        failures,
    })
}

fn continuation_step<R: Real>(
    curve: &BoundaryCurve<R>,
    orbit: &PeriodicOrbit<R>,
    n: usize,
    previous: Option<&(usize, Vec<R>)>,
    opts: &SolveOptions,
) -> Result<PeriodicOrbit<R>> {
    let winding = n as u64 * orbit.p;
    let count = n as u64 * orbit.q - 1;
    // At small N the defect is spread over the whole configuration and a
    // splice can land on a lower critical family, so a fresh heteroclinic
    // seed is always tried as well.
    let k = n / 2;
    let mut candidates = vec![solve_heteroclinic(curve, orbit, k, n - k).and_then(|seg| {
        solve_configuration(curve, winding, count, Some(&seg.as_periodic_seed()), opts)
    })];
    if let Some((m, y)) = previous {
        let mut w = y.clone();
        for j in *m..n {
            w = splice_period(orbit, &w, j as u64 * orbit.p);
        }
        candidates.push(solve_configuration(curve, winding, count, Some(&w), opts));
    }
    if count <= MULTISTART_CHECK_POINTS {
        candidates.push(solve_configuration(curve, winding, count, None, opts));
    }
    let mut best: Option<PeriodicOrbit<R>> = None;
    let mut first_err = None;
    for c in candidates {
        match c {
            Ok(o) => {
                if best.as_ref().is_none_or(|b| o.perimeter > b.perimeter) {
                    best = Some(o);
                }
            }
            Err(e) => {
                first_err.get_or_insert(e);
            }
        }
    }
    best.ok_or_else(|| first_err.expect("at least one candidate"))
}
