use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use super::genericity::{genericity_of, GenericityReport};
use super::limit::{extract_limit, fit_rate, LimitMethod};
use super::sweep::{sweep, SweepFailure};
use crate::error::Result;
use crate::geometry::BoundaryCurve;
use crate::numerics::{Precision, Real};
use crate::orbits::{solve_heteroclinic, SolveOptions};

/// Pass criteria for [`verify`].
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Thresholds {
    /// Allowed `|log λ_fit − log λ| / |log λ|`.
    pub rate_tolerance: f64,
    /// Allowed relative gap between the extrapolated and heteroclinic barriers.
    pub barrier_tolerance: f64,
    /// `C_even`, `C_odd` count as nonzero above this multiple of the floor.
    pub coefficient_factor: f64,
}

impl Default for Thresholds {
    fn default() -> Self {
        Thresholds {
            rate_tolerance: 0.02,
            barrier_tolerance: 1e-6,
            coefficient_factor: 1e3,
        }
    }
}

#[derive(Debug, Clone)]
pub struct VerifyOptions {
    pub n_min: usize,
    pub n_max: usize,
    pub thresholds: Thresholds,
    pub solve: SolveOptions,
}

impl Default for VerifyOptions {
    fn default() -> Self {
        VerifyOptions {
            n_min: 3,
            n_max: 20,
            thresholds: Thresholds::default(),
            solve: SolveOptions::default(),
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct SequenceRow {
    pub n: usize,
    pub a: String,
    pub a_plus_b: Option<String>,
    pub residual: f64,
    pub primitive: bool,
}

#[derive(Debug, Clone, Default, Serialize)]
pub struct Margins {
    /// `|log λ_fit − log λ| / |log λ|`
    pub rate_relative: Option<f64>,
    /// `|B_est − B_het| / |B_het|`
    pub barrier_relative: Option<f64>,
    /// `min(|C_even|, |C_odd|)` over the coefficient threshold.
    pub coefficient_ratio: Option<f64>,
}

/// Outcome of the full pipeline: sweep, limit, rate fit, heteroclinic
/// cross-check and genericity diagnostics.
#[derive(Debug, Clone, Serialize)]
pub struct VerifyReport {
    pub p: u64,
    pub q: u64,
    pub precision: Precision,
    pub n_range: [usize; 2],
    pub perimeter: String,
    pub trace: String,
    pub residue: String,
    pub hyperbolic: bool,
    pub lambda_monodromy: Option<String>,
    pub log_lambda_monodromy: Option<f64>,
    pub log_lambda_fit: Option<f64>,
    #[serde(rename = "B_est")]
    pub b_est: Option<String>,
    #[serde(rename = "B_error")]
    pub b_error: Option<f64>,
    pub limit_method: Option<LimitMethod>,
    #[serde(rename = "B_heteroclinic")]
    pub b_heteroclinic: Option<String>,
    pub heteroclinic_window: Option<usize>,
    #[serde(rename = "C_even")]
    pub c_even: Option<f64>,
    #[serde(rename = "C_odd")]
    pub c_odd: Option<f64>,
    pub fit_window: Vec<usize>,
    pub precision_floor: f64,
    pub genericity: GenericityReport,
    pub margins: Margins,
    pub thresholds: Thresholds,
    pub sequence: Vec<SequenceRow>,
    pub failures: Vec<SweepFailure>,
    /// Stages that did not complete, with the reason.
    pub errors: Vec<String>,
    pub pass: bool,
}

impl VerifyReport {
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }

    /// `N,a_N,a_N_plus_B`, the last column empty when no limit was found.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("N,a_N,a_N_plus_B\n");
        for r in &self.sequence {
            let _ = writeln!(out, "{},{},{}", r.n, r.a, r.a_plus_b.as_deref().unwrap_or(""));
        }
        out
    }

    /// Gnuplot script plotting `log|a_N + B|` from `csv_name` together with
    /// the reference slope `log λ`.
    pub fn gnuplot_script(&self, csv_name: &str) -> String {
        let mut s = String::new();
        let _ = writeln!(s, "set datafile separator ','");
        let _ = writeln!(s, "set xlabel 'N'");
        let _ = writeln!(s, "set ylabel 'log|a_N + B|'");
        let _ = writeln!(s, "set key bottom left");
        let _ = writeln!(s, "set title 'p = {}, q = {}'", self.p, self.q);
        let data = format!(
            "'{csv_name}' every ::1 using 1:(log(abs($3))) with linespoints title 'log|a_N + B|'"
        );
        let anchor = self.fit_window.first().and_then(|&n| {
            let row = self.sequence.iter().find(|r| r.n == n)?;
            let v: f64 = row.a_plus_b.as_ref()?.parse().ok()?;
            Some((n, v.abs().ln()))
        });
        match (self.log_lambda_monodromy, anchor) {
            (Some(slope), Some((n0, y0))) => {
                let _ = writeln!(s, "slope = {slope:?}");
                let _ = writeln!(s, "n0 = {n0}");
                let _ = writeln!(s, "y0 = {y0:?}");
                let _ = writeln!(
                    s,
                    "plot {data}, y0 + slope*(x - n0) with lines title 'log(lambda) slope'"
                );
            }
            _ => {
                let _ = writeln!(s, "plot {data}");
            }
        }
        s
    }
}

/// Window `K = M` for which `λ^{2K}` is below the working epsilon.
fn heteroclinic_window(lambda: f64, epsilon: f64) -> usize {
    ((epsilon.ln() / (2.0 * lambda.abs().ln())).ceil() as usize).max(2)
}

/// Runs the pipeline for the `p/q` orbit. Errors only when the base orbit or
/// the sweep cannot be set up; later stage failures are recorded in the
/// report and make it fail.
pub fn verify<R: Real>(
    curve: &BoundaryCurve<R>,
    p: u64,
    q: u64,
    opts: &VerifyOptions,
) -> Result<VerifyReport> {
    let report = sweep(curve, p, q, opts.n_min, opts.n_max, &opts.solve)?;
    let orbit = &report.orbit;
    let th = opts.thresholds;
    let mut errors = Vec::new();
    let floor = report.precision_floor(opts.n_max);
    let seq = report.sequence();

    let limit = extract_limit(&seq).map_err(|e| errors.push(format!("limit: {e}"))).ok();
    let fit = match (&limit, orbit.eigen.hyperbolic) {
        (Some(l), true) => fit_rate(&seq, l.barrier)
            .map_err(|e| errors.push(format!("rate: {e}")))
            .ok(),
        (_, false) => {
            errors.push(format!(
                "rate: NotHyperbolic (trace {})",
                orbit.eigen.trace.to_full_string()
            ));
            None
        }
        _ => None,
    };

    let lambda = orbit.eigen.lambda;
    let mut b_het = None;
    let mut window = None;
    if let Some(lam) = lambda {
        let k = heteroclinic_window(lam.to_f64(), R::EPSILON);
        match solve_heteroclinic(curve, orbit, k, k) {
            Ok(seg) => {
                b_het = Some(seg.barrier);
                window = Some(k);
            }
            Err(e) => errors.push(format!("heteroclinic: {e}")),
        }
    }

    let mut gen = match genericity_of(curve, orbit) {
        Ok(g) => g,
        Err(e) => {
            errors.push(format!("genericity: {e}"));
            GenericityReport {
                unique_max: orbit.margin.is_none(),
                margin: orbit.margin,
                hyperbolic: orbit.eigen.hyperbolic,
                trace: orbit.eigen.trace.to_f64(),
                transversal_hint: false,
                tail_decay: None,
                isolation: None,
                c_even_nonzero: None,
                c_odd_nonzero: None,
            }
        }
    };
    let coefficient_threshold = th.coefficient_factor * floor;
    if let Some(f) = &fit {
        gen = gen.with_coefficients(f, coefficient_threshold);
    }

    let log_lambda = lambda.map(|l| l.to_f64().abs().ln());
    let mut margins = Margins::default();
    if let (Some(f), Some(ll)) = (&fit, log_lambda) {
        margins.rate_relative = Some((f.log_lambda - ll).abs() / ll.abs());
        margins.coefficient_ratio = Some(f.c_even.abs().min(f.c_odd.abs()) / coefficient_threshold);
    }
    if let (Some(l), Some(bh)) = (&limit, b_het) {
        margins.barrier_relative = Some(((l.barrier - bh) / bh).to_f64().abs());
    }
    let pass = orbit.eigen.hyperbolic
        && margins.rate_relative.is_some_and(|m| m <= th.rate_tolerance)
        && margins.barrier_relative.is_some_and(|m| m <= th.barrier_tolerance)
        && gen.c_even_nonzero == Some(true)
        && gen.c_odd_nonzero == Some(true);

    let sequence = report
        .points
        .iter()
        .map(|pt| SequenceRow {
            n: pt.n,
            a: pt.a.to_full_string(),
            a_plus_b: limit.as_ref().map(|l| (pt.a + l.barrier).to_full_string()),
            residual: pt.residual.to_f64(),
            primitive: pt.primitive,
        })
        .collect();

    Ok(VerifyReport {
        p,
        q,
        precision: R::PRECISION,
        n_range: [opts.n_min, opts.n_max],
        perimeter: orbit.perimeter.to_full_string(),
        trace: orbit.eigen.trace.to_full_string(),
        residue: orbit.eigen.residue.to_full_string(),
        hyperbolic: orbit.eigen.hyperbolic,
        lambda_monodromy: lambda.map(|l| l.to_full_string()),
        log_lambda_monodromy: log_lambda,
        log_lambda_fit: fit.as_ref().map(|f| f.log_lambda),
        b_est: limit.as_ref().map(|l| l.barrier.to_full_string()),
        b_error: limit.as_ref().map(|l| l.error),
        limit_method: limit.as_ref().map(|l| l.method),
        b_heteroclinic: b_het.map(|b| b.to_full_string()),
        heteroclinic_window: window,
        c_even: fit.as_ref().map(|f| f.c_even),
        c_odd: fit.as_ref().map(|f| f.c_odd),
        fit_window: fit.map(|f| f.window).unwrap_or_default(),
        precision_floor: floor,
        genericity: gen,
        margins,
        thresholds: th,
        sequence,
        failures: report.failures,
        errors,
        pass,
    })
}
