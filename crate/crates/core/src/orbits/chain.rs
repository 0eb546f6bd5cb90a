//! Damped Newton maximization of the total chord length of a chain of
//! boundary points, in polar-angle coordinates.
//!
//! Two shapes share the code: a closed chain (`x_n = x_0 + shift`, cyclic
//! tridiagonal Hessian) and a chain with both ends pinned (plain tridiagonal
//! Hessian).

use crate::billiard::angular_chord;
use crate::error::{Error, Result};
use crate::geometry::BoundaryCurve;
use crate::numerics::{
    solve_cyclic_tridiagonal_inertia, solve_tridiagonal_inertia, CyclicTridiagonal, Real,
};

#[derive(Debug, Clone, Copy)]
pub(crate) enum Shape<R> {
    /// Free points `x_0..x_{n−1}` closing up at `x_0 + shift`.
    Closed { shift: R },
    /// Free points between two fixed angles, each split as
    /// `angle + 2π turns` with the angle reduced.
    Pinned {
        left: R,
        left_turns: i64,
        right: R,
        right_turns: i64,
    },
}

#[derive(Debug, Clone)]
pub(crate) struct ChainEval<R> {
    pub total: R,
    pub grad: Vec<R>,
    pub diag: Vec<R>,
    /// Coupling of free points `i` and `i + 1`; for closed chains the last
    /// entry is the wrap coupling.
    pub off: Vec<R>,
    /// max |∂(total)/∂s_i| in arclength units.
    pub residual: R,
}

#[derive(Debug, Clone)]
pub(crate) struct Relaxed<R> {
    pub x: Vec<R>,
    pub eval: ChainEval<R>,
    pub iterations: usize,
}

pub(crate) struct Chain<'a, R> {
    pub curve: &'a BoundaryCurve<R>,
    pub shape: Shape<R>,
}

const MIN_GAP: f64 = 1e-9;

impl<'a, R: Real> Chain<'a, R> {
    pub fn closed(curve: &'a BoundaryCurve<R>, shift: R) -> Self {
        Chain {
            curve,
            shape: Shape::Closed { shift },
        }
    }

    pub fn pinned(curve: &'a BoundaryCurve<R>, left: R, right: R) -> Self {
        let (left_turns, left) = split_turns(left);
        let (right_turns, right) = split_turns(right);
        Chain {
            curve,
            shape: Shape::Pinned {
                left,
                left_turns,
                right,
                right_turns,
            },
        }
    }

    /// Index of the first gap that is not in `(0, 2π)`.
    pub fn ordering_violation(&self, x: &[R]) -> Option<usize> {
        let (turns, y): (Vec<i64>, Vec<R>) = x.iter().map(|&t| split_turns(t)).unzip();
        self.gap_violation(&turns, &y)
    }

    /// Index of the first gap of the lifted angles `y_i + 2π turns_i` that
    /// is not in `(0, 2π)`.
    fn gap_violation(&self, turns: &[i64], y: &[R]) -> Option<usize> {
        let two_pi = R::two_pi();
        let ok = |g: R| {
            let g = g.to_f64();
            g > MIN_GAP && g < two_pi.to_f64() - MIN_GAP
        };
        let gap = |ya: R, ta: i64, yb: R, tb: i64| (yb - ya) + two_pi * ((tb - ta) as f64);
        let n = y.len();
        match self.shape {
            Shape::Closed { shift } => {
                for i in 0..n {
                    let g = if i + 1 < n {
                        gap(y[i], turns[i], y[i + 1], turns[i + 1])
                    } else {
                        gap(y[i], turns[i], y[0], turns[0]) + shift
                    };
                    if !ok(g) {
                        return Some(i);
                    }
                }
            }
            Shape::Pinned {
                left,
                left_turns,
                right,
                right_turns,
            } => {
                let (mut py, mut pt) = (left, left_turns);
                for i in 0..n {
                    if !ok(gap(py, pt, y[i], turns[i])) {
                        return Some(i);
                    }
                    (py, pt) = (y[i], turns[i]);
                }
                if !ok(gap(py, pt, right, right_turns)) {
                    return Some(n);
                }
            }
        }
        None
    }

    /// Total length and derivatives. Frames are 2π-periodic, so `x` may hold
    /// lifted or reduced angles.
    pub fn eval(&self, x: &[R]) -> ChainEval<R> {
        let curve = self.curve;
        let n = x.len();
        let frames: Vec<_> = x.iter().map(|&t| curve.frame(t)).collect();
        let mut grad = vec![R::zero(); n];
        let mut diag = vec![R::zero(); n];
        match self.shape {
            Shape::Closed { .. } => {
                // the frame is 2π-periodic, so the closing point reuses frame 0
                let mut off = vec![R::zero(); n];
                let mut total = R::zero();
                for i in 0..n {
                    let j = (i + 1) % n;
                    let c = angular_chord(&frames[i], &frames[j]);
                    total += c.len;
                    grad[i] += c.l1;
                    grad[j] += c.l2;
                    diag[i] += c.l11;
                    diag[j] += c.l22;
                    off[i] = c.l12;
                }
                let residual = scaled_residual(&grad, &frames);
                ChainEval {
                    total,
                    grad,
                    diag,
                    off,
                    residual,
                }
            }
            Shape::Pinned { left, right, .. } => {
                let fl = curve.frame(left);
                let fr = curve.frame(right);
                let mut off = vec![R::zero(); n.saturating_sub(1)];
                let first = angular_chord(&fl, &frames[0]);
                let mut total = first.len;
                grad[0] += first.l2;
                diag[0] += first.l22;
                for i in 0..n - 1 {
                    let c = angular_chord(&frames[i], &frames[i + 1]);
                    total += c.len;
                    grad[i] += c.l1;
                    grad[i + 1] += c.l2;
                    diag[i] += c.l11;
                    diag[i + 1] += c.l22;
                    off[i] = c.l12;
                }
                let last = angular_chord(&frames[n - 1], &fr);
                total += last.len;
                grad[n - 1] += last.l1;
                diag[n - 1] += last.l11;
                let residual = scaled_residual(&grad, &frames);
                ChainEval {
                    total,
                    grad,
                    diag,
                    off,
                    residual,
                }
            }
        }
    }

    /// Solves `(H − μ I) δ = −g`; returns the step and the number of
    /// positive pivots of `H − μ I`.
    fn newton_step(&self, ev: &ChainEval<R>, mu: R) -> Result<(Vec<R>, usize)> {
        let diag: Vec<R> = ev.diag.iter().map(|&d| d - mu).collect();
        let rhs: Vec<R> = ev.grad.iter().map(|&g| -g).collect();
        match self.shape {
            Shape::Closed { .. } => {
                let a = CyclicTridiagonal::new(diag, ev.off.clone());
                solve_cyclic_tridiagonal_inertia(&a, &rhs)
            }
            Shape::Pinned { .. } => solve_tridiagonal_inertia(&diag, &ev.off, &rhs),
        }
    }

    /// Residual tolerance `10 ε L`.
    pub fn tolerance(&self) -> R {
        self.curve.length() * (10.0 * R::EPSILON)
    }

    /// Maximizes the total length from `x0`, keeping the cyclic order.
    ///
    /// The integer number of turns of each point is frozen at the start and
    /// Newton runs on the reduced angles, so corrections are resolved to the
    /// working precision of `|y| ≤ π` however far the lift extends.
    pub fn maximize(&self, x0: Vec<R>, max_iter: usize) -> Result<Relaxed<R>> {
        let (turns, mut y): (Vec<i64>, Vec<R>) = x0.iter().map(|&t| split_turns(t)).unzip();
        if let Some(i) = self.gap_violation(&turns, &y) {
            return Err(Error::OrderingViolated { index: i });
        }
        let lift = |y: Vec<R>| -> Vec<R> {
            y.into_iter()
                .zip(&turns)
                .map(|(v, &k)| v + R::two_pi() * (k as f64))
                .collect()
        };
        let tol = self.tolerance();
        let mut ev = self.eval(&y);
        let n = y.len();
        for it in 0..max_iter {
            if ev.residual <= tol {
                return Ok(Relaxed {
                    x: lift(y),
                    eval: ev,
                    iterations: it,
                });
            }
            let scale = ev
                .diag
                .iter()
                .chain(ev.off.iter())
                .fold(R::zero(), |m, &v| m.max(v.abs()))
                .max(R::one());
            let slack = ev.total.abs() * (8.0 * n as f64 * R::EPSILON);
            let mut mu = R::zero();
            let mut accepted = None;
            while accepted.is_none() {
                if mu > scale * 1e12 {
                    return Err(Error::no_convergence(
                        "chain maximization",
                        format!(
                            "no ascent step at iteration {it}, residual {:e}",
                            ev.residual.to_f64()
                        ),
                    ));
                }
                let negative_definite = match self.newton_step(&ev, mu) {
                    Ok((delta, 0)) => Some(delta),
                    _ => None,
                };
                if let Some(delta) = negative_definite {
                    let mut t = R::one();
                    for _ in 0..40 {
                        let trial: Vec<R> = y.iter().zip(&delta).map(|(&a, &d)| a + d * t).collect();
                        if self.gap_violation(&turns, &trial).is_none() {
                            let tev = self.eval(&trial);
                            let better = tev.total >= ev.total - slack
                                && (tev.total > ev.total || tev.residual < ev.residual);
                            if better {
                                accepted = Some((trial, tev));
                                break;
                            }
                        }
                        t = t * 0.5;
                    }
                }
                if accepted.is_none() {
                    mu = if mu == R::zero() { scale * 1e-3 } else { mu * 8.0 };
                }
            }
            let (ny, nev) = accepted.unwrap();
            y = ny;
            ev = nev;
        }
        if ev.residual <= tol {
            return Ok(Relaxed {
                x: lift(y),
                eval: ev,
                iterations: max_iter,
            });
        }
        Err(Error::no_convergence(
            "chain maximization",
            format!(
                "{max_iter} iterations exhausted, residual {:e} > {:e}",
                ev.residual.to_f64(),
                tol.to_f64()
            ),
        ))
    }
}

/// Splits a lifted angle into whole turns and a remainder in `[−π, π]`.
fn split_turns<R: Real>(x: R) -> (i64, R) {
    let k = (x.to_f64() / std::f64::consts::TAU).round() as i64;
    (k, x - R::two_pi() * (k as f64))
}

fn scaled_residual<R: Real>(grad: &[R], frames: &[crate::geometry::Frame<R>]) -> R {
    grad.iter()
        .zip(frames)
        .fold(R::zero(), |m, (&g, f)| m.max((g / f.speed).abs()))
}
