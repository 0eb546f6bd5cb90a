//! Marked length spectrum, Mather's β at rationals, its right derivative,
//! the α-function on a grid, and the circle caustic invariants.

use std::fmt::Write as _;
use std::sync::atomic::{AtomicUsize, Ordering};
use std::sync::Mutex;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::geometry::{BoundaryCurve, V2};
use crate::numerics::{gcd, neville_at_zero, Real};
use crate::orbits::{check_rotation, solve_periodic, SolveOptions};
use crate::verifier::{sweep, SweepReport};

/// Maximal perimeter among periodic orbits of rotation number `p/q`.
pub fn ml_max<R: Real>(curve: &BoundaryCurve<R>, p: u64, q: u64, opts: &SolveOptions) -> Result<R> {
    Ok(solve_periodic(curve, p, q, None, opts)?.perimeter)
}

/// `β(p/q) = −ML^max(p/q) / q`.
pub fn beta<R: Real>(curve: &BoundaryCurve<R>, p: u64, q: u64, opts: &SolveOptions) -> Result<R> {
    Ok(-ml_max(curve, p, q, opts)? / q as f64)
}

/// Reduced fractions `p/q` in `(0, 1)` with `q ≤ q_max`, in increasing order.
pub fn farey(q_max: u64) -> Vec<(u64, u64)> {
    let mut v: Vec<(u64, u64)> = (2..=q_max)
        .flat_map(|q| (1..q).filter(move |&p| gcd(p, q) == 1).map(move |p| (p, q)))
        .collect();
    v.sort_by(|a, b| (a.0 * b.1).cmp(&(b.0 * a.1)));
    v
}

#[derive(Debug, Clone, Copy)]
pub struct SpectrumEntry<R> {
    pub p: u64,
    pub q: u64,
    pub ml_max: R,
    pub beta: R,
    pub trace: R,
    pub residue: R,
    pub hyperbolic: bool,
}

impl<R: Real> SpectrumEntry<R> {
    pub fn omega(&self) -> f64 {
        self.p as f64 / self.q as f64
    }
}

/// Spectrum over a set of fractions, ordered by rotation number.
#[derive(Debug, Clone)]
pub struct SpectrumTable<R> {
    pub entries: Vec<SpectrumEntry<R>>,
}

pub const SPECTRUM_HEADER: &str = "p,q,ml_max,beta,trace,residue,hyperbolic";

impl<R: Real> SpectrumTable<R> {
    pub fn to_csv(&self) -> String {
        let mut out = format!("{SPECTRUM_HEADER}\n");
        for e in &self.entries {
            let _ = writeln!(
                out,
                "{},{},{},{},{},{},{}",
                e.p,
                e.q,
                e.ml_max.to_full_string(),
                e.beta.to_full_string(),
                e.trace.to_full_string(),
                e.residue.to_full_string(),
                e.hyperbolic
            );
        }
        out
    }

    pub fn get(&self, p: u64, q: u64) -> Option<&SpectrumEntry<R>> {
        self.entries.iter().find(|e| e.p == p && e.q == q)
    }

    /// Middle fractions of consecutive triples where β lies above the chord
    /// by more than `slack`.
    pub fn convexity_violations(&self, slack: f64) -> Vec<(u64, u64)> {
        let mut bad = Vec::new();
        for w in self.entries.windows(3) {
            let (x1, x2, x3) = (w[0].omega(), w[1].omega(), w[2].omega());
            let t = (x2 - x1) / (x3 - x1);
            let chord = w[0].beta.to_f64() * (1.0 - t) + w[2].beta.to_f64() * t;
            if w[1].beta.to_f64() > chord + slack {
                bad.push((w[1].p, w[1].q));
            }
        }
        bad
    }
}

/// Solves every fraction, spreading the work over `jobs` threads. The
/// result does not depend on `jobs`.
pub fn spectrum_table<R: Real>(
    curve: &BoundaryCurve<R>,
    fractions: &[(u64, u64)],
    opts: &SolveOptions,
    jobs: usize,
) -> Result<SpectrumTable<R>> {
    for &(p, q) in fractions {
        check_rotation(p, q)?;
    }
    let slots: Vec<Mutex<Option<Result<SpectrumEntry<R>>>>> =
        fractions.iter().map(|_| Mutex::new(None)).collect();
    let next = AtomicUsize::new(0);
    let work = || loop {
        let i = next.fetch_add(1, Ordering::Relaxed);
        if i >= fractions.len() {
            break;
        }
        let (p, q) = fractions[i];
        let entry = solve_periodic(curve, p, q, None, opts).map(|o| SpectrumEntry {
            p,
            q,
            ml_max: o.perimeter,
            beta: -o.perimeter / q as f64,
            trace: o.eigen.trace,
            residue: o.eigen.residue,
            hyperbolic: o.eigen.hyperbolic,
        });
        *slots[i].lock().expect("slot lock") = Some(entry);
    };
    std::thread::scope(|s| {
        for _ in 1..jobs.max(1) {
            s.spawn(work);
        }
        work();
    });
    let mut entries = Vec::with_capacity(fractions.len());
    for slot in slots {
        entries.push(slot.into_inner().expect("slot lock").expect("every slot filled")?);
    }
    entries.sort_by(|a, b| (a.p * b.q).cmp(&(b.p * a.q)));
    Ok(SpectrumTable { entries })
}

/// Right derivative of β with the difference quotients it came from.
#[derive(Debug, Clone)]
pub struct DerivativeEstimate<R> {
    pub value: R,
    pub error: f64,
    /// `(N, Q_N)` along `Np/(Nq−1) ↓ p/q`.
    pub quotients: Vec<(usize, R)>,
}

/// `β′₊(p/q)` from the difference quotients along `Np/(Nq−1)`.
///
/// The quotients must be nonincreasing in `N` up to rounding noise
/// (convexity of β). The limit is the Neville extrapolation of the last four
/// quotients in `1/(Nq − 1)`.
pub fn beta_right_derivative_from<R: Real>(report: &SweepReport<R>) -> Result<DerivativeEstimate<R>> {
    let quotients = report.quotients();
    if quotients.len() < 4 {
        return Err(Error::InsufficientData(format!(
            "right derivative needs 4 quotients, got {}",
            quotients.len()
        )));
    }
    let ratio = report.q as f64 / report.p as f64;
    for w in quotients.windows(2) {
        let (n, qn) = w[1];
        let slack = 10.0 * ratio * (report.precision_floor(n) + report.precision_floor(w[0].0));
        let rise = (qn - w[0].1).to_f64();
        if rise > slack {
            return Err(Error::MonotonicityViolated {
                n,
                detail: format!("quotient rose by {rise:.3e} (slack {slack:.1e})"),
            });
        }
    }
    let tail = &quotients[quotients.len() - 4..];
    let xs: Vec<R> = tail
        .iter()
        .map(|&(n, _)| R::one() / R::from_f64((n as u64 * report.q - 1) as f64))
        .collect();
    let ys: Vec<R> = tail.iter().map(|&(_, v)| v).collect();
    let (value, change) = neville_at_zero(&xs, &ys);
    Ok(DerivativeEstimate {
        value,
        error: change.to_f64(),
        quotients,
    })
}

pub fn beta_right_derivative<R: Real>(
    curve: &BoundaryCurve<R>,
    p: u64,
    q: u64,
    n_max: usize,
    opts: &SolveOptions,
) -> Result<DerivativeEstimate<R>> {
    if n_max < 4 {
        return Err(Error::InsufficientData(format!("N_max = {n_max} < 4")));
    }
    check_rotation(p, q)?;
    beta_right_derivative_from(&sweep(curve, p, q, 2, n_max, opts)?)
}

/// `B = (p/q) β′₊(p/q) − β(p/q)` from a sweep.
pub fn barrier_via_prop2_from<R: Real>(report: &SweepReport<R>) -> Result<R> {
    let d = beta_right_derivative_from(report)?;
    let (p, q) = (report.p as f64, report.q as f64);
    let beta = -report.orbit.perimeter / q;
    Ok(d.value * (p / q) - beta)
}

pub fn barrier_via_prop2<R: Real>(
    curve: &BoundaryCurve<R>,
    p: u64,
    q: u64,
    n_max: usize,
    opts: &SolveOptions,
) -> Result<R> {
    if n_max < 4 {
        return Err(Error::InsufficientData(format!("N_max = {n_max} < 4")));
    }
    check_rotation(p, q)?;
    barrier_via_prop2_from(&sweep(curve, p, q, 2, n_max, opts)?)
}

/// `max_ω (ω c − β(ω))` over the table: a lower bound for α(c).
pub fn alpha<R: Real>(table: &SpectrumTable<R>, c: f64) -> f64 {
    table
        .entries
        .iter()
        .map(|e| e.omega() * c - e.beta.to_f64())
        .fold(f64::NEG_INFINITY, f64::max)
}

/// Caustic of rotation number ω in the disc of radius `R`.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct CausticRecord {
    pub omega: f64,
    pub radius: f64,
    /// `|Γ_ω| = −β′(ω)`
    pub length: f64,
    /// Lazutkin invariant `|A − P| + |B − P| − |arc AB|`.
    pub lazutkin: f64,
}

/// Concentric caustic of the disc, with the Lazutkin invariant measured on
/// the two tangent lines from a boundary point.
pub fn circle_caustic(radius: f64, omega: f64) -> Result<CausticRecord> {
    if !(omega > 0.0 && omega <= 0.5) || radius <= 0.0 {
        return Err(Error::InvalidRotation(format!(
            "caustic needs 0 < ω <= 1/2 and R > 0, got ω = {omega}, R = {radius}"
        )));
    }
    let rho = radius * (std::f64::consts::PI * omega).cos();
    let p = V2::new(radius, 0.0);
    // tangent points: A·(P − A) = 0 with |A| = ρ
    let open = (rho / radius).acos();
    let a = V2::new(rho * open.cos(), rho * open.sin());
    let b = V2::new(rho * open.cos(), -rho * open.sin());
    let arc = rho * a.cross(b).abs().atan2(a.dot(b));
    Ok(CausticRecord {
        omega,
        radius: rho,
        length: std::f64::consts::TAU * rho,
        lazutkin: (a - p).norm() + (b - p).norm() - arc,
    })
}
