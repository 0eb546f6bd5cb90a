use serde::Serialize;

use super::chain::{Chain, Relaxed};
use super::periodic::PeriodicOrbit;
use crate::error::{Error, Result};
use crate::geometry::BoundaryCurve;
use crate::numerics::{tridiagonal_min_eigenvalue, Real};

/// Truncated minimizer of the barrier functional: a configuration leaving the
/// periodic orbit in the past and arriving at its unit index shift in the
/// future.
#[derive(Debug, Clone)]
pub struct HeteroclinicSegment<R> {
    pub k: usize,
    pub m: usize,
    /// Index of the first (pinned) point, `−Kq + 1`.
    pub first_index: i64,
    /// Lifted polar angles `z_j`, `j = −Kq+1 ..= Mq`, both pinned ends
    /// included.
    pub theta: Vec<R>,
    /// `(M + K) L_{p,q} − Σ ℓ(z_j, z_{j+1})`.
    pub barrier: R,
    /// Per-period contraction of the tails towards the orbit, if measurable.
    pub tail_decay: Option<f64>,
    /// Index where the configuration is farthest from both tails.
    pub defect_index: i64,
    pub residual: R,
    /// Smallest eigenvalue of the negated Hessian, relative to its largest
    /// entry. Small values mean the minimizer is close to a flat family.
    pub isolation: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct HeteroclinicSummary {
    pub k: usize,
    pub m: usize,
    pub barrier: String,
    pub tail_decay: Option<f64>,
    pub defect_index: i64,
    pub residual: f64,
    pub isolation: f64,
}

impl<R: Real> HeteroclinicSegment<R> {
    pub fn summary(&self) -> HeteroclinicSummary {
        HeteroclinicSummary {
            k: self.k,
            m: self.m,
            barrier: self.barrier.to_full_string(),
            tail_decay: self.tail_decay,
            defect_index: self.defect_index,
            residual: self.residual.to_f64(),
            isolation: self.isolation,
        }
    }

    /// Drops the right pin: what remains is a closed configuration of
    /// `(K+M)q − 1` points with winding `(K+M)p`.
    pub fn as_periodic_seed(&self) -> Vec<R> {
        self.theta[..self.theta.len() - 1].to_vec()
    }
}

fn logistic(x: f64) -> f64 {
    1.0 / (1.0 + (-x).exp())
}

fn initial_guess<R: Real>(
    orbit: &PeriodicOrbit<R>,
    first: i64,
    last: i64,
    center: f64,
    width: f64,
) -> Vec<R> {
    (first + 1..last)
        .map(|j| {
            let a = orbit.lifted_theta(j);
            let b = orbit.lifted_theta(j + 1);
            a + (b - a) * R::from_f64(logistic((j as f64 - center) / width))
        })
        .collect()
}

fn relax_multistart<R: Real>(
    curve: &BoundaryCurve<R>,
    orbit: &PeriodicOrbit<R>,
    first: i64,
    last: i64,
    max_iter: usize,
) -> Result<Relaxed<R>> {
    let q = orbit.q as i64;
    let chain = Chain::pinned(curve, orbit.lifted_theta(first), orbit.lifted_theta(last + 1));
    let mid = 0.5 * (first + last) as f64;
    let mut best: Option<Relaxed<R>> = None;
    let mut last_err = None;
    // transition centres half an index apart over one period, three widths
    let starts = [0.5, 0.25, 1.0]
        .iter()
        .flat_map(|&w| (0..2 * q).map(move |i| (mid - 0.5 * q as f64 + 0.5 * i as f64, w * q as f64)));
    for (center, width) in starts {
        match chain.maximize(initial_guess(orbit, first, last, center, width), max_iter) {
            Ok(r) => {
                if best.as_ref().is_none_or(|b| r.eval.total > b.eval.total) {
                    best = Some(r);
                }
            }
            Err(e) => last_err = Some(e),
        }
    }
    best.ok_or_else(|| {
        last_err.unwrap_or_else(|| Error::no_convergence("heteroclinic", "no start converged"))
    })
}

/// Minimizes the truncated barrier functional with the window `(K, M)`.
///
/// The end points are pinned to the lifted orbit: `z_{−Kq+1} = x̃_{−Kq+1}`
/// and `z_{Mq} = x̃_{Mq+1}`.
pub fn solve_heteroclinic<R: Real>(
    curve: &BoundaryCurve<R>,
    orbit: &PeriodicOrbit<R>,
    k: usize,
    m: usize,
) -> Result<HeteroclinicSegment<R>> {
    if !orbit.eigen.hyperbolic {
        return Err(Error::NotHyperbolic {
            trace: orbit.eigen.trace.to_f64(),
        });
    }
    if k == 0 || m == 0 {
        return Err(Error::InsufficientData(format!(
            "heteroclinic window needs K, M >= 1, got ({k}, {m})"
        )));
    }
    let q = orbit.q as i64;
    let first = -(k as i64) * q + 1;
    let last = m as i64 * q;
    let max_iter = 200;

    let chain = Chain::pinned(curve, orbit.lifted_theta(first), orbit.lifted_theta(last + 1));
    let seed: Vec<R> = if R::PRECISION == <f64 as Real>::PRECISION {
        relax_multistart(curve, orbit, first, last, max_iter)?.x
    } else {
        let coarse_curve = BoundaryCurve::<f64>::build(curve.spec())?;
        let coarse_orbit = coarse_copy(orbit);
        match relax_multistart(&coarse_curve, &coarse_orbit, first, last, max_iter) {
            Ok(r) => r.x.iter().map(|&t| R::from_f64(t)).collect(),
            Err(_) => relax_multistart(curve, orbit, first, last, max_iter)?.x,
        }
    };
    // Placements of the transition one or two periods apart differ only by
    // their truncation error, which the coarse search cannot resolve; all of
    // them are relaxed at working precision.
    let mut relaxed: Option<Relaxed<R>> = None;
    let mut last_err = None;
    for shift in [0i64, -1, 1, -2, 2] {
        let x0 = shifted_seed(orbit, &seed, first, last, shift);
        if chain.ordering_violation(&x0).is_some() {
            continue;
        }
        match chain.maximize(x0, max_iter) {
            Ok(r) => {
                if relaxed.as_ref().is_none_or(|b| r.eval.total > b.eval.total) {
                    relaxed = Some(r);
                }
            }
            Err(e) => last_err = Some(e),
        }
    }
    let relaxed = relaxed.ok_or_else(|| {
        last_err.unwrap_or_else(|| Error::no_convergence("heteroclinic", "no placement converged"))
    })?;

    let mut theta = Vec::with_capacity(relaxed.x.len() + 2);
    theta.push(orbit.lifted_theta(first));
    theta.extend_from_slice(&relaxed.x);
    theta.push(orbit.lifted_theta(last + 1));
    let barrier = orbit.perimeter * R::from_f64((k + m) as f64) - relaxed.eval.total;

    let (defect_index, tail_decay) = tail_analysis(orbit, &theta, first);
    let neg_diag: Vec<f64> = relaxed.eval.diag.iter().map(|d| -d.to_f64()).collect();
    let neg_off: Vec<f64> = relaxed.eval.off.iter().map(|d| -d.to_f64()).collect();
    let scale = neg_diag
        .iter()
        .chain(&neg_off)
        .fold(0.0f64, |a, v| a.max(v.abs()));
    let isolation = tridiagonal_min_eigenvalue(&neg_diag, &neg_off) / scale;

    Ok(HeteroclinicSegment {
        k,
        m,
        first_index: first,
        theta,
        barrier,
        tail_decay,
        defect_index,
        residual: relaxed.eval.residual,
        isolation,
    })
}

/// Moves the transition of the interior configuration `x` by `shift`
/// periods, filling the vacated end with orbit points.
fn shifted_seed<R: Real>(orbit: &PeriodicOrbit<R>, x: &[R], first: i64, last: i64, shift: i64) -> Vec<R> {
    let q = orbit.q as i64;
    let turn = R::two_pi() * ((shift * orbit.p as i64) as f64);
    (first + 1..last)
        .map(|j| {
            let src = j - shift * q;
            if src <= first {
                orbit.lifted_theta(j)
            } else if src >= last {
                orbit.lifted_theta(j + 1)
            } else {
                x[(src - first - 1) as usize] + turn
            }
        })
        .collect()
}

fn coarse_copy<R: Real>(orbit: &PeriodicOrbit<R>) -> PeriodicOrbit<f64> {
    let f = |v: &[R]| v.iter().map(|x| x.to_f64()).collect::<Vec<_>>();
    PeriodicOrbit {
        p: orbit.p,
        q: orbit.q,
        theta: f(&orbit.theta),
        s: f(&orbit.s),
        phi: f(&orbit.phi),
        perimeter: orbit.perimeter.to_f64(),
        residual: orbit.residual.to_f64(),
        monodromy: orbit.monodromy.to_f64(),
        eigen: super::monodromy::eigendata(&orbit.monodromy.to_f64()),
        margin: orbit.margin,
        iterations: orbit.iterations,
    }
}

/// Locates the transition and fits the geometric decay of the block-wise
/// deviation of both tails from the orbit.
fn tail_analysis<R: Real>(orbit: &PeriodicOrbit<R>, theta: &[R], first: i64) -> (i64, Option<f64>) {
    let q = orbit.q as i64;
    let last = first + theta.len() as i64 - 1;
    let past: Vec<f64> = theta
        .iter()
        .enumerate()
        .map(|(i, &z)| (z - orbit.lifted_theta(first + i as i64)).abs().to_f64())
        .collect();
    let future: Vec<f64> = theta
        .iter()
        .enumerate()
        .map(|(i, &z)| (z - orbit.lifted_theta(first + i as i64 + 1)).abs().to_f64())
        .collect();
    let at = |j: i64| (j - first) as usize;
    let defect = (first..=last)
        .max_by(|&a, &b| {
            let va = past[at(a)].min(future[at(a)]);
            let vb = past[at(b)].min(future[at(b)]);
            va.partial_cmp(&vb).unwrap_or(std::cmp::Ordering::Equal)
        })
        .unwrap_or(0);

    let noise = 1e3 * R::EPSILON * std::f64::consts::TAU;
    let block_max = |dev: &[f64], lo: i64, hi: i64| -> f64 {
        (lo..=hi).map(|j| dev[at(j)]).fold(0.0, f64::max)
    };
    let mut slopes = Vec::new();
    for side in [-1i64, 1] {
        let mut pts = Vec::new();
        for b in 1.. {
            let (lo, hi) = if side < 0 {
                (defect - (b + 1) * q + 1, defect - b * q)
            } else {
                (defect + b * q, defect + (b + 1) * q - 1)
            };
            if lo < first + q || hi > last - q {
                break;
            }
            let dev = if side < 0 { &past } else { &future };
            let d = block_max(dev, lo, hi);
            if d <= noise {
                break;
            }
            pts.push((b as f64, d.ln()));
        }
        if pts.len() >= 2 {
            let n = pts.len() as f64;
            let mx = pts.iter().map(|p| p.0).sum::<f64>() / n;
            let my = pts.iter().map(|p| p.1).sum::<f64>() / n;
            let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
            let sxx: f64 = pts.iter().map(|p| (p.0 - mx) * (p.0 - mx)).sum();
            slopes.push(sxy / sxx);
        }
    }
    let decay = if slopes.is_empty() {
        None
    } else {
        Some((slopes.iter().sum::<f64>() / slopes.len() as f64).exp())
    };
    (defect, decay)
}
