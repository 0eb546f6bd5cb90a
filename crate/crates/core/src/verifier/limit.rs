use serde::Serialize;

use super::sweep::SweepReport;
use crate::error::{Error, Result};
use crate::numerics::{neville_at_zero, Real};

/// The sequence `a_N` stripped of the orbit data, with the per-term
/// precision floor.
#[derive(Debug, Clone)]
pub struct Sequence<R> {
    pub n: Vec<usize>,
    pub a: Vec<R>,
    pub q: u64,
    pub hyperbolic: bool,
    pub floor: Vec<f64>,
}

impl<R: Real> Sequence<R> {
    /// A sequence with a zero precision floor.
    pub fn new(n: Vec<usize>, a: Vec<R>, q: u64, hyperbolic: bool) -> Self {
        assert_eq!(n.len(), a.len());
        let floor = vec![0.0; n.len()];
        Sequence {
            n,
            a,
            q,
            hyperbolic,
            floor,
        }
    }

    fn parity(&self, parity: usize) -> Vec<(usize, R, f64)> {
        (0..self.n.len())
            .filter(|&i| self.n[i] % 2 == parity)
            .map(|i| (self.n[i], self.a[i], self.floor[i]))
            .collect()
    }
}

impl<R: Real> SweepReport<R> {
    pub fn sequence(&self) -> Sequence<R> {
        Sequence {
            n: self.points.iter().map(|p| p.n).collect(),
            a: self.points.iter().map(|p| p.a).collect(),
            q: self.q,
            hyperbolic: self.hyperbolic(),
            floor: self.points.iter().map(|p| self.precision_floor(p.n)).collect(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum LimitMethod {
    /// Δ² extrapolation within one parity class.
    Aitken,
    /// Polynomial extrapolation in `1/(Nq − 1)`.
    Richardson,
}

/// `lim a_N` and the corresponding barrier `B = −lim a_N`.
#[derive(Debug, Clone, Copy)]
pub struct LimitEstimate<R> {
    pub limit: R,
    pub barrier: R,
    pub error: f64,
    pub method: LimitMethod,
}

fn aitken_tail<R: Real>(seq: &[(usize, R, f64)]) -> Result<Option<(R, f64)>> {
    // last triple N, N+2, N+4 whose increments are both resolvable
    for i in (0..seq.len().saturating_sub(2)).rev() {
        let (n0, x0, _) = seq[i];
        let (n1, x1, f1) = seq[i + 1];
        let (n2, x2, f2) = seq[i + 2];
        if n1 != n0 + 2 || n2 != n1 + 2 {
            continue;
        }
        let d1 = x1 - x0;
        let d2 = x2 - x1;
        if d1.to_f64().abs() <= f1 || d2.to_f64().abs() <= f2 {
            continue;
        }
        let r = d2 / d1;
        if r.to_f64().abs() >= 0.9 {
            return Err(Error::NonConvergent(format!(
                "increment ratio {:.3e} at N = {n2}",
                r.to_f64()
            )));
        }
        let correction = d2 * r / (R::one() - r);
        return Ok(Some((x2 + correction, correction.to_f64().abs().max(f2))));
    }
    Ok(None)
}

/// Extrapolated limit of `a_N`.
///
/// Hyperbolic base orbit: Aitken Δ² on the last resolvable triple of each
/// parity class, keeping the estimate with the smaller correction. Otherwise
/// Neville extrapolation in `x = 1/(Nq − 1)` on terms with `N` roughly
/// halving from the largest.
pub fn extract_limit<R: Real>(seq: &Sequence<R>) -> Result<LimitEstimate<R>> {
    if seq.n.len() < 5 {
        return Err(Error::InsufficientData(format!(
            "limit extraction needs 5 terms, got {}",
            seq.n.len()
        )));
    }
    let (limit, error, method) = if seq.hyperbolic {
        let mut best: Option<(R, f64)> = None;
        for parity in 0..2 {
            let terms = seq.parity(parity);
            let est = match aitken_tail(&terms)? {
                Some(e) => Some(e),
                // converged below the floor: the last term is the limit
                None => terms.last().map(|&(_, x, f)| (x, f)),
            };
            if let Some(e) = est {
                if best.is_none_or(|b| e.1 < b.1) {
                    best = Some(e);
                }
            }
        }
        let (v, e) = best.expect("at least five terms");
        (v, e, LimitMethod::Aitken)
    } else {
        let (xs, ys) = halving_subset(seq);
        if xs.len() < 3 {
            return Err(Error::InsufficientData(
                "extrapolation in 1/N needs at least 3 distinct scales".into(),
            ));
        }
        let (v, change) = neville_at_zero(&xs, &ys);
        let change = change.to_f64();
        if change > 1e-3 * v.to_f64().abs().max(1.0) {
            return Err(Error::NonConvergent(format!(
                "extrapolation in 1/N unstable: last correction {change:.3e}"
            )));
        }
        (v, change, LimitMethod::Richardson)
    };
    Ok(LimitEstimate {
        limit,
        barrier: -limit,
        error,
        method,
    })
}

/// Terms nearest `N_max`, `N_max/2`, `N_max/4`, …, at most six.
fn halving_subset<R: Real>(seq: &Sequence<R>) -> (Vec<R>, Vec<R>) {
    let n_max = *seq.n.iter().max().expect("nonempty");
    let mut picked: Vec<usize> = Vec::new();
    let mut target = n_max as f64;
    while picked.len() < 6 && target >= 1.5 {
        let i = (0..seq.n.len())
            .min_by(|&a, &b| {
                let da = (seq.n[a] as f64 - target).abs();
                let db = (seq.n[b] as f64 - target).abs();
                da.partial_cmp(&db).unwrap_or(std::cmp::Ordering::Equal)
            })
            .expect("nonempty");
        if !picked.contains(&i) {
            picked.push(i);
        }
        target /= 2.0;
    }
    let x = |i: usize| R::one() / R::from_f64((seq.n[i] as u64 * seq.q - 1) as f64);
    (
        picked.iter().map(|&i| x(i)).collect(),
        picked.iter().map(|&i| seq.a[i]).collect(),
    )
}

/// Common-slope fit of `log|a_N + B|` with separate even and odd intercepts.
#[derive(Debug, Clone, Serialize)]
pub struct RateFit {
    pub log_lambda: f64,
    pub c_even: f64,
    pub c_odd: f64,
    /// Values of `N` used.
    pub window: Vec<usize>,
    pub max_abs_residual: f64,
}

/// Fits `a_N + B = C_± λ^N` on the terms with `|a_N + B|` above the floor,
/// each parity cut at its first unresolvable term.
pub fn fit_rate<R: Real>(seq: &Sequence<R>, b: R) -> Result<RateFit> {
    if !seq.hyperbolic {
        return Err(Error::NotHyperbolic { trace: f64::NAN });
    }
    let mut classes: [Vec<(f64, f64, f64)>; 2] = [Vec::new(), Vec::new()];
    for (parity, class) in classes.iter_mut().enumerate() {
        for (n, x, floor) in seq.parity(parity) {
            let d = (x + b).to_f64();
            if d.abs() <= floor || d == 0.0 {
                break;
            }
            class.push((n as f64, d.abs().ln(), d.signum()));
        }
    }
    let (even, odd) = (classes[0].len(), classes[1].len());
    if even < 4 || odd < 4 {
        return Err(Error::InsufficientWindow { even, odd });
    }
    let mean = |c: &[(f64, f64, f64)], k: fn(&(f64, f64, f64)) -> f64| {
        c.iter().map(k).sum::<f64>() / c.len() as f64
    };
    let mut sxx = 0.0;
    let mut sxy = 0.0;
    let mut centers = [(0.0, 0.0); 2];
    for (i, c) in classes.iter().enumerate() {
        let (mx, my) = (mean(c, |t| t.0), mean(c, |t| t.1));
        centers[i] = (mx, my);
        for t in c {
            sxx += (t.0 - mx) * (t.0 - mx);
            sxy += (t.0 - mx) * (t.1 - my);
        }
    }
    let slope = sxy / sxx;
    let mut coeffs = [0.0; 2];
    let mut worst: f64 = 0.0;
    for (i, c) in classes.iter().enumerate() {
        let intercept = centers[i].1 - slope * centers[i].0;
        let sign = if c.iter().map(|t| t.2).sum::<f64>() >= 0.0 { 1.0 } else { -1.0 };
        coeffs[i] = sign * intercept.exp();
        for t in c {
            worst = worst.max((t.1 - intercept - slope * t.0).abs());
        }
    }
    let mut window: Vec<usize> = classes
        .iter()
        .flatten()
        .map(|t| t.0 as usize)
        .collect();
    window.sort_unstable();
    Ok(RateFit {
        log_lambda: slope,
        c_even: coeffs[0],
        c_odd: coeffs[1],
        window,
        max_abs_residual: worst,
    })
}
