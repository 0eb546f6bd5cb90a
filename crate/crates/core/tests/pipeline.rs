use mls_core::numerics::Dd;
use mls_core::orbits::{solve_heteroclinic, solve_periodic, SolveOptions};
use mls_core::spectra::{beta_right_derivative, farey, spectrum_table, SPECTRUM_HEADER};
use mls_core::verifier::{genericity, sweep, verify, VerifyOptions};
use mls_core::{BoundaryCurve, DomainSpec, Error};

fn generic<R: mls_core::numerics::Real>() -> BoundaryCurve<R> {
    BoundaryCurve::build(&DomainSpec::default_generic()).unwrap()
}

#[test]
fn domain_spec_round_trips_through_json() {
    let text = r#"{"kind": "fourier", "a": 1.0, "b": 0.6, "cos": {"3": 0.005}, "sin": {"4": 0.003}}"#;
    let spec: DomainSpec = serde_json::from_str(text).unwrap();
    assert_eq!(spec, DomainSpec::default_generic());
    let back: DomainSpec = serde_json::from_str(&serde_json::to_string(&spec).unwrap()).unwrap();
    assert_eq!(back, spec);
    let circle: DomainSpec = serde_json::from_str(r#"{"kind": "circle", "R": 2.5}"#).unwrap();
    assert_eq!(circle, DomainSpec::circle(2.5));
}

#[test]
fn invalid_domains_are_rejected() {
    let bumpy = DomainSpec::Fourier {
        r0: Some(1.0),
        a: None,
        b: None,
        cos: [("5".to_string(), 0.2)].into(),
        sin: Default::default(),
    };
    assert!(matches!(
        BoundaryCurve::<f64>::build(&bumpy),
        Err(Error::NotStrictlyConvex { .. })
    ));
    assert!(matches!(
        BoundaryCurve::<f64>::build(&DomainSpec::ellipse(1.0, -0.5)),
        Err(Error::InvalidSpec(_))
    ));
    assert!(serde_json::from_str::<DomainSpec>(r#"{"kind": "circle", "R": 1, "x": 0}"#).is_err());
}

#[test]
fn orbit_export_is_closed_and_serializable() {
    let curve = generic::<f64>();
    let orbit = solve_periodic(&curve, 2, 5, None, &SolveOptions::default()).unwrap();
    assert_eq!(orbit.len(), 5);
    assert!(orbit.residual < 1e-12);
    let json = serde_json::to_value(orbit.export()).unwrap();
    assert_eq!(json["q"], 5);
    assert_eq!(json["points"].as_array().unwrap().len(), 5);
    let closure = orbit.lifted_theta(5) - orbit.theta[0];
    assert!((closure - 4.0 * std::f64::consts::PI).abs() < 1e-12);
}

#[test]
fn extended_orbit_refines_double_orbit() {
    let of = solve_periodic(&generic::<f64>(), 1, 3, None, &SolveOptions::default()).unwrap();
    let od = solve_periodic(&generic::<Dd>(), 1, 3, None, &SolveOptions::default()).unwrap();
    assert!((od.perimeter.to_f64() - of.perimeter).abs() < 1e-13 * of.perimeter);
    assert!(od.residual.to_f64() < 1e-28);
}

#[test]
fn spectrum_is_convex_in_rotation_number() {
    let curve = BoundaryCurve::<f64>::build(&DomainSpec::default_ellipse()).unwrap();
    let table = spectrum_table(&curve, &farey(9), &SolveOptions::default(), 2).unwrap();
    assert_eq!(table.entries.len(), farey(9).len());
    assert!(table.convexity_violations(1e-10).is_empty());
    let csv = table.to_csv();
    assert_eq!(csv.lines().next(), Some(SPECTRUM_HEADER));
    assert_eq!(csv.lines().count(), table.entries.len() + 1);
}

#[test]
fn heteroclinic_barrier_bounds_the_sweep() {
    let curve = generic::<Dd>();
    let opts = SolveOptions::default();
    let orbit = solve_periodic(&curve, 1, 2, None, &opts).unwrap();
    let seg = solve_heteroclinic(&curve, &orbit, 3, 3).unwrap();
    assert!(seg.barrier.to_f64() > 0.0);
    let report = sweep(&curve, 1, 2, 6, 6, &opts).unwrap();
    // closing the segment gives an admissible (12, 23) configuration
    assert!(report.points[0].a.to_f64() >= -seg.barrier.to_f64() - 1e-25);
}

#[test]
fn ellipse_diagnostics_flag_integrability() {
    let curve = BoundaryCurve::<Dd>::build(&DomainSpec::default_ellipse()).unwrap();
    let g = genericity(&curve, 1, 2, &SolveOptions::default()).unwrap();
    assert!(g.hyperbolic);
    assert!(!g.transversal_hint);
}

#[test]
fn right_derivative_on_the_circle() {
    let curve = BoundaryCurve::<Dd>::build(&DomainSpec::circle(1.0)).unwrap();
    let d = beta_right_derivative(&curve, 1, 3, 48, &SolveOptions::default()).unwrap();
    let w = std::f64::consts::PI / 3.0;
    // β(ω) = −2 sin πω
    assert!((d.value.to_f64() + 2.0 * std::f64::consts::PI * w.cos()).abs() < 1e-6);
    assert!(d.quotients.windows(2).all(|w| w[1].1 <= w[0].1));
}

#[test]
fn verify_report_outputs_agree() {
    let curve = generic::<Dd>();
    let opts = VerifyOptions {
        n_max: 14,
        ..VerifyOptions::default()
    };
    let r = verify(&curve, 1, 2, &opts).unwrap();
    assert!(r.pass, "{:?}", r.errors);
    let json: serde_json::Value = serde_json::from_str(&r.to_json()).unwrap();
    assert_eq!(json["pass"], true);
    assert_eq!(json["sequence"].as_array().unwrap().len(), 12);
    assert_eq!(r.to_csv().lines().count(), 13);
    let gp = r.gnuplot_script("out.csv");
    assert!(gp.contains("'out.csv'"));
}
