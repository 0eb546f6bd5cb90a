//! The banded matrix `W` of second partials of `h` along a periodic orbit,
//! the vectors `Z±` built from the eigen-directions, and the constants
//! `C_{q±} = ½ Z± W Z±ᵀ`.

use serde::Serialize;

use super::monodromy::{eigendata, monodromy_at, orbit_jacobians};
use super::periodic::PeriodicOrbit;
use crate::billiard::{angular_chord, to_arclength, ChordData};
use crate::error::{Error, Result};
use crate::geometry::BoundaryCurve;
use crate::numerics::Real;

/// Symmetric tridiagonal `(q+1)×(q+1)` matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct WMatrix<R> {
    pub diag: Vec<R>,
    pub off: Vec<R>,
}

impl<R: Real> WMatrix<R> {
    pub fn dim(&self) -> usize {
        self.diag.len()
    }

    pub fn to_dense(&self) -> Vec<Vec<R>> {
        let n = self.dim();
        let mut m = vec![vec![R::zero(); n]; n];
        for i in 0..n {
            m[i][i] = self.diag[i];
            if i + 1 < n {
                m[i][i + 1] = self.off[i];
                m[i + 1][i] = self.off[i];
            }
        }
        m
    }

    /// `z W zᵀ`
    pub fn quadratic_form(&self, z: &[R]) -> R {
        let n = self.dim();
        assert_eq!(z.len(), n);
        let mut acc = R::zero();
        for i in 0..n {
            acc += self.diag[i] * z[i] * z[i];
            if i + 1 < n {
                acc += self.off[i] * z[i] * z[i + 1] * 2.0;
            }
        }
        acc
    }
}

fn orbit_chords<R: Real>(
    curve: &BoundaryCurve<R>,
    orbit: &PeriodicOrbit<R>,
    base: usize,
) -> Vec<ChordData<R>> {
    let n = orbit.len();
    let frames: Vec<_> = orbit.theta.iter().map(|&t| curve.frame(t)).collect();
    (0..n)
        .map(|k| {
            let i = (base + k) % n;
            let j = (i + 1) % n;
            to_arclength(&angular_chord(&frames[i], &frames[j]), &frames[i], &frames[j])
        })
        .collect()
}

/// `W` with the orbit point `base` playing the role of the first point.
///
/// With chords `c_k` from point `base + k` to `base + k + 1` and `h = −ℓ`:
/// `η_1 = ∂₁₁h(c_0)`, `η_{q+1} = ∂₂₂h(c_{q−1})`,
/// `η_i = ∂₂₂h(c_{i−2}) + ∂₁₁h(c_{i−1})` and `σ_i = ∂₁₂h(c_{i−1})`.
pub fn w_matrix_at<R: Real>(
    curve: &BoundaryCurve<R>,
    orbit: &PeriodicOrbit<R>,
    base: usize,
) -> WMatrix<R> {
    let c = orbit_chords(curve, orbit, base);
    let q = c.len();
    let mut diag = vec![R::zero(); q + 1];
    diag[0] = -c[0].d11;
    for i in 1..q {
        diag[i] = -c[i - 1].d22 - c[i].d11;
    }
    diag[q] = -c[q - 1].d22;
    let off = c.iter().map(|ch| -ch.d12).collect();
    WMatrix { diag, off }
}

pub fn w_matrix<R: Real>(curve: &BoundaryCurve<R>, orbit: &PeriodicOrbit<R>) -> WMatrix<R> {
    w_matrix_at(curve, orbit, 0)
}

/// `Z₊` and `Z₋` at orbit point `base`: the arclength components of the
/// unit unstable eigenvector `e_u` and stable eigenvector `e_s` transported
/// along one period, `Z₊_k = π₁(Df^k e_u)`, `Z₋_k = −π₁(Df^k e_s)`.
///
/// Writing `e_s = (cos θ, sin θ)` and `e_u = −(sin θ, −cos θ)` recovers the
/// single-angle form, which presumes orthogonal eigenvectors; the actual
/// eigenvectors are used here. The quadratic constants do not depend on the
/// signs.
pub fn z_vectors_at<R: Real>(
    curve: &BoundaryCurve<R>,
    orbit: &PeriodicOrbit<R>,
    base: usize,
    unstable: [R; 2],
    stable: [R; 2],
) -> Result<(Vec<R>, Vec<R>)> {
    let js = orbit_jacobians(curve, orbit, base)?;
    let mut vp = unstable;
    let mut vm = stable;
    let mut zp = vec![vp[0]];
    let mut zm = vec![-vm[0]];
    for j in &js {
        vp = j.apply(vp);
        vm = j.apply(vm);
        zp.push(vp[0]);
        zm.push(-vm[0]);
    }
    Ok((zp, zm))
}

/// `(C_{q+}, C_{q−}) = ½ (Z₊ W Z₊ᵀ, Z₋ W Z₋ᵀ)`.
pub fn c_coefficients<R: Real>(w: &WMatrix<R>, zp: &[R], zm: &[R]) -> (R, R) {
    (w.quadratic_form(zp) * 0.5, w.quadratic_form(zm) * 0.5)
}

#[derive(Debug, Clone, Copy, Serialize)]
pub struct QuadraticConstants<R> {
    pub base: usize,
    pub c_plus: R,
    pub c_minus: R,
}

/// `C_{q±}` with the eigenvectors of the monodromy at point `base`.
///
/// The values depend on the base point; only the combinations entering the
/// even/odd expansion constants are invariant.
pub fn quadratic_constants_at<R: Real>(
    curve: &BoundaryCurve<R>,
    orbit: &PeriodicOrbit<R>,
    base: usize,
) -> Result<QuadraticConstants<R>> {
    let lam = monodromy_at(curve, orbit, base)?;
    let e = eigendata(&lam);
    let (Some(u), Some(s)) = (e.unstable, e.stable) else {
        return Err(Error::NotHyperbolic {
            trace: e.trace.to_f64(),
        });
    };
    let w = w_matrix_at(curve, orbit, base);
    let (zp, zm) = z_vectors_at(curve, orbit, base, u, s)?;
    let (c_plus, c_minus) = c_coefficients(&w, &zp, &zm);
    Ok(QuadraticConstants {
        base,
        c_plus,
        c_minus,
    })
}
