use std::f64::consts::PI;

use mls_core::billiard::{chord, inverse_step, lazutkin, step, PhasePoint};
use mls_core::numerics::Dd;
use mls_core::orbits::{solve_periodic, SolveOptions};
use mls_core::{BoundaryCurve, DomainSpec};
use proptest::prelude::*;

fn curves() -> Vec<BoundaryCurve<f64>> {
    [DomainSpec::circle(1.0), DomainSpec::default_ellipse(), DomainSpec::default_generic()]
        .iter()
        .map(|s| BoundaryCurve::build(s).unwrap())
        .collect()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn step_is_inverted(which in 0usize..3, u in 0.0f64..1.0, phi in 0.05f64..PI - 0.05) {
        let c = &curves()[which];
        let x = PhasePoint::new(u * c.length(), phi);
        let y = step(c, x).unwrap();
        prop_assert!(y.s > x.s && y.s < x.s + c.length());
        let back = inverse_step(c, y).unwrap();
        prop_assert!((back.s - x.s).abs() < 1e-10);
        prop_assert!((back.phi - x.phi).abs() < 1e-10);
    }

    #[test]
    fn chord_is_symmetric(which in 0usize..3, u in 0.0f64..1.0, v in 0.05f64..0.95) {
        let c = &curves()[which];
        let l = c.length();
        let (s, s2) = (u * l, (u + v) * l);
        let a = chord(c, s, s2).unwrap();
        let b = chord(c, s2, s).unwrap();
        prop_assert!((a.len - b.len).abs() < 1e-13);
        prop_assert!((a.d1 - b.d2).abs() < 1e-12);
        prop_assert!((a.d11 - b.d22).abs() < 1e-10);
    }

    #[test]
    fn circle_spectrum_scales_with_radius(radius in 0.2f64..5.0, q in 2u64..9) {
        let c = BoundaryCurve::<f64>::build(&DomainSpec::circle(radius)).unwrap();
        let o = solve_periodic(&c, 1, q, None, &SolveOptions::default()).unwrap();
        let exact = 2.0 * radius * q as f64 * (PI / q as f64).sin();
        prop_assert!((o.perimeter - exact).abs() < 1e-12 * exact);
    }

    #[test]
    fn lazutkin_abscissa_has_unit_period(which in 0usize..3, u in 0.0f64..1.0) {
        let c = &curves()[which];
        let s = u * c.length();
        let (x0, y0) = lazutkin(c, PhasePoint::new(s, 1.0));
        let (x1, y1) = lazutkin(c, PhasePoint::new(s + c.length(), 1.0));
        prop_assert!((0.0..1.0).contains(&x0));
        let gap = (x1 - x0).abs();
        prop_assert!(gap.min(1.0 - gap) < 1e-12);
        prop_assert!((y1 - y0).abs() < 1e-12);
        let theta = c.angle_of_arclength(s);
        let turn = c.lazutkin_abscissa(theta + 2.0 * PI) - c.lazutkin_abscissa(theta);
        prop_assert!((turn - 1.0).abs() < 1e-12);
    }

    #[test]
    fn dd_tracks_f64(a in -1e3f64..1e3, b in 0.1f64..1e3) {
        let (x, y) = (Dd::from(a), Dd::from(b));
        prop_assert_eq!((x + y).to_f64(), a + b);
        prop_assert!(((x * y / y) - x).abs().to_f64() <= 1e-30 * a.abs().max(1.0));
        prop_assert!((((x * x).sqrt()) - x.abs()).abs().to_f64() <= 1e-30 * a.abs().max(1.0));
    }
}
