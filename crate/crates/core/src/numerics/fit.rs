use crate::error::{Error, Result};

use super::Real;

/// Least-squares line with its worst residual.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LineFit<R> {
    pub slope: R,
    pub intercept: R,
    pub max_abs_residual: R,
}

pub fn linear_fit<R: Real>(xs: &[R], ys: &[R]) -> Result<LineFit<R>> {
    assert_eq!(xs.len(), ys.len());
    if xs.len() < 3 {
        return Err(Error::InsufficientData(format!(
            "linear fit needs at least 3 points, got {}",
            xs.len()
        )));
    }
    let lo = xs.iter().copied().fold(xs[0], R::min);
    let hi = xs.iter().copied().fold(xs[0], R::max);
    if (hi - lo).to_f64() < 1e-12 {
        return Err(Error::DegenerateAbscissae {
            span: (hi - lo).to_f64(),
        });
    }
    let n = R::from_f64(xs.len() as f64);
    let mx = xs.iter().copied().sum::<R>() / n;
    let my = ys.iter().copied().sum::<R>() / n;
    let mut sxx = R::zero();
    let mut sxy = R::zero();
    for (&x, &y) in xs.iter().zip(ys) {
        sxx += (x - mx) * (x - mx);
        sxy += (x - mx) * (y - my);
    }
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let max_abs_residual = xs
        .iter()
        .zip(ys)
        .map(|(&x, &y)| (y - (intercept + slope * x)).abs())
        .fold(R::zero(), R::max);
    Ok(LineFit {
        slope,
        intercept,
        max_abs_residual,
    })
}

/// Value at `x = 0` of the interpolating polynomial through `(xs, ys)`,
/// together with the change contributed by the last Neville column (an error
/// estimate).
pub fn neville_at_zero<R: Real>(xs: &[R], ys: &[R]) -> (R, R) {
    assert_eq!(xs.len(), ys.len());
    assert!(!xs.is_empty());
    let n = xs.len();
    let mut p: Vec<R> = ys.to_vec();
    let mut last_change = R::zero();
    for k in 1..n {
        for i in 0..n - k {
            let num = p[i + 1] * xs[i] - p[i] * xs[i + k];
            let new = num / (xs[i] - xs[i + k]);
            if i == 0 {
                last_change = new - p[0];
            }
            p[i] = new;
        }
    }
    (p[0], last_change.abs())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn exact_line() {
        let xs = [0.0, 1.0, 2.0, 3.5];
        let ys: Vec<f64> = xs.iter().map(|x| 2.0 * x + 1.0).collect();
        let f = linear_fit(&xs, &ys).unwrap();
        assert!((f.slope - 2.0).abs() < 1e-14);
        assert!((f.intercept - 1.0).abs() < 1e-14);
        assert!(f.max_abs_residual < 1e-14);
    }

    #[test]
    fn three_collinear_points() {
        let f = linear_fit(&[1.0, 2.0, 4.0], &[-1.0, -3.0, -7.0]).unwrap();
        assert!((f.slope + 2.0).abs() < 1e-14);
        assert!((f.intercept - 1.0).abs() < 1e-14);
    }

    #[test]
    fn perturbed_point_shows_in_residual() {
        let xs: Vec<f64> = (0..10).map(f64::from).collect();
        let mut ys = xs.clone();
        ys[4] += 1e-3;
        let f = linear_fit(&xs, &ys).unwrap();
        // the fit spreads the bump: residual at the bumped point is 1e-3 (1 - 1/n - ...)
        assert!(f.max_abs_residual >= 1e-4);
    }

    #[test]
    fn degenerate_abscissae() {
        assert!(matches!(
            linear_fit(&[1.0, 1.0, 1.0], &[0.0, 1.0, 2.0]),
            Err(Error::DegenerateAbscissae { .. })
        ));
    }

    #[test]
    fn neville_recovers_polynomial() {
        let xs = [0.1, 0.2, 0.3, 0.4];
        let ys: Vec<f64> = xs.iter().map(|x| 3.0 - x + 2.0 * x * x * x).collect();
        let (v, _) = neville_at_zero(&xs, &ys);
        assert!((v - 3.0).abs() < 1e-13);
    }
}
