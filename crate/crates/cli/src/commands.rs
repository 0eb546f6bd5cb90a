use std::fs;
use std::path::{Path, PathBuf};

use anyhow::Context;
use mls_core::numerics::Real;
use mls_core::orbits::{check_rotation, solve_heteroclinic, solve_periodic};
use mls_core::spectra::{barrier_via_prop2, farey, spectrum_table};
use mls_core::verifier::{lazutkin_asymptotics, verify, VerifyOptions};
use mls_core::BoundaryCurve;
use serde::Serialize;

use crate::config::Common;

/// Command failure, split by exit code.
#[derive(Debug)]
pub enum Failure {
    /// Invalid input or configuration.
    Config(anyhow::Error),
    /// A solver stage failed.
    Solver(mls_core::Error),
}

impl From<anyhow::Error> for Failure {
    fn from(e: anyhow::Error) -> Self {
        Failure::Config(e)
    }
}

impl From<mls_core::Error> for Failure {
    fn from(e: mls_core::Error) -> Self {
        use mls_core::Error::*;
        match e {
            InvalidSpec(_) | NotStrictlyConvex { .. } | InvalidRotation(_) | InsufficientPrecision(_) => {
                Failure::Config(anyhow::Error::new(e))
            }
            other => Failure::Solver(other),
        }
    }
}

pub type Outcome = Result<i32, Failure>;

pub const EXIT_OK: i32 = 0;
pub const EXIT_FAIL: i32 = 3;

fn build<R: Real>(common: &Common) -> Result<BoundaryCurve<R>, Failure> {
    Ok(BoundaryCurve::build(&common.domain)?)
}

fn write_file(path: &Path, body: &str) -> Result<(), Failure> {
    fs::write(path, body)
        .with_context(|| format!("writing {}", path.display()))
        .map_err(Failure::Config)
}

fn to_json<T: Serialize>(v: &T) -> String {
    let mut s = serde_json::to_string_pretty(v).expect("serializable");
    s.push('\n');
    s
}

pub fn orbit<R: Real>(common: &Common, p: u64, q: u64, output: Option<&Path>) -> Outcome {
    check_rotation(p, q)?;
    let curve = build::<R>(common)?;
    let o = solve_periodic(&curve, p, q, None, &common.solve)?;
    println!("perimeter {}", o.perimeter.to_full_string());
    println!("residual {}", o.residual.to_full_string());
    println!("trace {}", o.eigen.trace.to_full_string());
    match o.eigen.lambda {
        Some(l) => println!("lambda {}", l.to_full_string()),
        None => println!("lambda none"),
    }
    println!("residue {}", o.eigen.residue.to_full_string());
    if let Some(path) = output {
        write_file(path, &to_json(&o.export()))?;
    }
    Ok(EXIT_OK)
}

pub fn spectrum<R: Real>(common: &Common, q_max: u64, output: Option<&Path>) -> Outcome {
    if q_max < 2 {
        return Err(Failure::Config(anyhow::anyhow!("q_max must be at least 2")));
    }
    let curve = build::<R>(common)?;
    let table = spectrum_table(&curve, &farey(q_max), &common.solve, common.jobs)?;
    let csv = table.to_csv();
    match output {
        Some(path) => write_file(path, &csv)?,
        None => print!("{csv}"),
    }
    Ok(EXIT_OK)
}

#[derive(Serialize)]
struct BarrierOutput {
    p: u64,
    q: u64,
    heteroclinic: mls_core::orbits::HeteroclinicSummary,
    lambda: String,
    prop2: Option<String>,
}

pub fn barrier<R: Real>(
    common: &Common,
    p: u64,
    q: u64,
    window: Option<(usize, usize)>,
    prop2_n_max: Option<usize>,
) -> Outcome {
    check_rotation(p, q)?;
    let curve = build::<R>(common)?;
    let o = solve_periodic(&curve, p, q, None, &common.solve)?;
    let Some(lambda) = o.eigen.lambda else {
        return Err(Failure::Solver(mls_core::Error::NotHyperbolic {
            trace: o.eigen.trace.to_f64(),
        }));
    };
    let (k, m) = window.unwrap_or_else(|| {
        let k = ((R::EPSILON.ln() / (2.0 * lambda.to_f64().abs().ln())).ceil() as usize).max(2);
        (k, k)
    });
    let seg = solve_heteroclinic(&curve, &o, k, m)?;
    let prop2 = match prop2_n_max {
        Some(n) => Some(barrier_via_prop2(&curve, p, q, n, &common.solve)?.to_full_string()),
        None => None,
    };
    print!(
        "{}",
        to_json(&BarrierOutput {
            p,
            q,
            heteroclinic: seg.summary(),
            lambda: lambda.to_full_string(),
            prop2,
        })
    );
    Ok(EXIT_OK)
}

pub struct VerifyPaths {
    pub dir: PathBuf,
    pub stem: String,
}

pub fn verify_cmd<R: Real>(common: &Common, p: u64, q: u64, opts: &VerifyOptions, out: &VerifyPaths) -> Outcome {
    check_rotation(p, q)?;
    let curve = build::<R>(common)?;
    let report = verify(&curve, p, q, opts)?;
    fs::create_dir_all(&out.dir)
        .with_context(|| format!("creating {}", out.dir.display()))
        .map_err(Failure::Config)?;
    let csv_name = format!("{}.csv", out.stem);
    write_file(&out.dir.join(format!("{}.json", out.stem)), &format!("{}\n", report.to_json()))?;
    write_file(&out.dir.join(&csv_name), &report.to_csv())?;
    write_file(&out.dir.join(format!("{}.gp", out.stem)), &report.gnuplot_script(&csv_name))?;
    println!("B_est {}", report.b_est.as_deref().unwrap_or("none"));
    println!("log_lambda_fit {}", report.log_lambda_fit.map_or("none".into(), |v| format!("{v:?}")));
    println!("log_lambda_monodromy {}", report.log_lambda_monodromy.map_or("none".into(), |v| format!("{v:?}")));
    for e in &report.errors {
        println!("error {e}");
    }
    println!("pass {}", report.pass);
    Ok(if report.pass { EXIT_OK } else { EXIT_FAIL })
}

pub fn lazutkin_check<R: Real>(common: &Common) -> Outcome {
    let curve = build::<R>(common)?;
    let r = lazutkin_asymptotics(&curve)?;
    print!("{}", to_json(&r));
    let x_ok = (2.8..=3.2).contains(&r.slope_x);
    let y_ok = r.exact_y || r.slope_y.is_some_and(|s| (3.8..=4.2).contains(&s));
    Ok(if x_ok && y_ok { EXIT_OK } else { EXIT_FAIL })
}

#[derive(Serialize)]
struct DomainSummary {
    length: String,
    lazutkin_constant: String,
    min_curvature: f64,
    circle: bool,
}

pub fn domain_check<R: Real>(common: &Common) -> Outcome {
    let curve = build::<R>(common)?;
    print!(
        "{}",
        to_json(&DomainSummary {
            length: curve.length().to_full_string(),
            lazutkin_constant: curve.lazutkin_constant().to_full_string(),
            min_curvature: curve.min_curvature(),
            circle: curve.is_circle(),
        })
    );
    Ok(EXIT_OK)
}
