use crate::error::{Error, Result};

use super::Real;

/// Row-major 2x2 matrix.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Mat2<R> {
    pub m: [[R; 2]; 2],
}

impl<R: Real> Mat2<R> {
    pub fn new(a: R, b: R, c: R, d: R) -> Self {
        Mat2 { m: [[a, b], [c, d]] }
    }

    pub fn identity() -> Self {
        Mat2::new(R::one(), R::zero(), R::zero(), R::one())
    }

    pub fn det(&self) -> R {
        self.m[0][0] * self.m[1][1] - self.m[0][1] * self.m[1][0]
    }

    pub fn trace(&self) -> R {
        self.m[0][0] + self.m[1][1]
    }

    pub fn mul(&self, o: &Mat2<R>) -> Mat2<R> {
        let a = &self.m;
        let b = &o.m;
        Mat2::new(
            a[0][0] * b[0][0] + a[0][1] * b[1][0],
            a[0][0] * b[0][1] + a[0][1] * b[1][1],
            a[1][0] * b[0][0] + a[1][1] * b[1][0],
            a[1][0] * b[0][1] + a[1][1] * b[1][1],
        )
    }

    pub fn apply(&self, v: [R; 2]) -> [R; 2] {
        [
            self.m[0][0] * v[0] + self.m[0][1] * v[1],
            self.m[1][0] * v[0] + self.m[1][1] * v[1],
        ]
    }

    pub fn max_abs(&self) -> R {
        self.m
            .iter()
            .flatten()
            .fold(R::zero(), |acc, &x| acc.max(x.abs()))
    }

    pub fn to_f64(&self) -> Mat2<f64> {
        Mat2::new(
            self.m[0][0].to_f64(),
            self.m[0][1].to_f64(),
            self.m[1][0].to_f64(),
            self.m[1][1].to_f64(),
        )
    }
}

/// Symmetric cyclic tridiagonal matrix.
///
/// `off[i]` couples rows `i` and `i + 1 (mod n)`; `off[n-1]` is the wrap
/// entry coupling `n - 1` and `0`. For `n = 2` both entries couple the same
/// pair and add up.
#[derive(Debug, Clone, PartialEq)]
pub struct CyclicTridiagonal<R> {
    pub diag: Vec<R>,
    pub off: Vec<R>,
}

impl<R: Real> CyclicTridiagonal<R> {
    pub fn new(diag: Vec<R>, off: Vec<R>) -> Self {
        assert_eq!(diag.len(), off.len(), "diag and off must have equal length");
        assert!(diag.len() >= 2, "cyclic tridiagonal needs n >= 2");
        CyclicTridiagonal { diag, off }
    }

    pub fn len(&self) -> usize {
        self.diag.len()
    }

    pub fn is_empty(&self) -> bool {
        self.diag.is_empty()
    }

    pub fn mul_vec(&self, x: &[R]) -> Vec<R> {
        let n = self.len();
        (0..n)
            .map(|i| {
                let prev = (i + n - 1) % n;
                let next = (i + 1) % n;
                self.diag[i] * x[i] + self.off[prev] * x[prev] + self.off[i] * x[next]
            })
            .collect()
    }

    pub fn max_abs(&self) -> R {
        self.diag
            .iter()
            .chain(self.off.iter())
            .fold(R::zero(), |a, &x| a.max(x.abs()))
    }

    /// The same matrix with `shift` added to the diagonal.
    pub fn shifted(&self, shift: R) -> Self {
        CyclicTridiagonal {
            diag: self.diag.iter().map(|&d| d + shift).collect(),
            off: self.off.clone(),
        }
    }
}

fn pivot_floor<R: Real>(scale: R) -> R {
    scale * (20.0 * R::EPSILON)
}

/// Solves `A x = b` for a symmetric cyclic tridiagonal `A` by elimination
/// with a fill column and a fill row (no pivoting).
pub fn solve_cyclic_tridiagonal<R: Real>(a: &CyclicTridiagonal<R>, b: &[R]) -> Result<Vec<R>> {
    solve_cyclic_tridiagonal_inertia(a, b).map(|(x, _)| x)
}

/// Same as [`solve_cyclic_tridiagonal`], also returning the number of
/// positive pivots. Elimination runs in natural order, so the pivots carry
/// the inertia of `A`: zero positive pivots means `A` is negative definite.
pub fn solve_cyclic_tridiagonal_inertia<R: Real>(
    a: &CyclicTridiagonal<R>,
    b: &[R],
) -> Result<(Vec<R>, usize)> {
    let n = a.len();
    assert_eq!(b.len(), n);
    let floor = pivot_floor(a.max_abs());
    if n == 2 {
        let c = a.off[0] + a.off[1];
        let det = a.diag[0] * a.diag[1] - c * c;
        let scale = a.max_abs() * a.max_abs();
        if det.abs() <= scale * (20.0 * R::EPSILON) {
            return Err(Error::SingularSystem {
                row: 1,
                pivot: det.to_f64(),
            });
        }
        let positive = usize::from(a.diag[0] > R::zero())
            + usize::from((det / a.diag[0]) > R::zero());
        return Ok((
            vec![
                (b[0] * a.diag[1] - c * b[1]) / det,
                (a.diag[0] * b[1] - c * b[0]) / det,
            ],
            positive,
        ));
    }

    let last = n - 1;
    // Rows 0..n-2: pivot d, super u (to i+1), fill f (to column n-1).
    let mut d = vec![R::zero(); last];
    let mut u = vec![R::zero(); last];
    let mut f = vec![R::zero(); last];
    let mut rhs = vec![R::zero(); last];

    d[0] = a.diag[0];
    u[0] = a.off[0];
    f[0] = a.off[last];
    rhs[0] = b[0];

    let mut last_coef = a.off[last];
    let mut last_diag = a.diag[last];
    let mut last_rhs = b[last];

    for i in 0..last {
        if d[i].abs() <= floor {
            return Err(Error::SingularSystem {
                row: i,
                pivot: d[i].to_f64(),
            });
        }
        if i + 1 < last {
            let m = a.off[i] / d[i];
            d[i + 1] = a.diag[i + 1] - m * u[i];
            rhs[i + 1] = b[i + 1] - m * rhs[i];
            f[i + 1] = -(m * f[i]);
            if i + 1 == n - 2 {
                f[i + 1] += a.off[n - 2];
                u[i + 1] = R::zero();
            } else {
                u[i + 1] = a.off[i + 1];
            }
        }
        let m = last_coef / d[i];
        last_diag -= m * f[i];
        last_rhs -= m * rhs[i];
        last_coef = -(m * u[i]);
        if i + 1 == n - 2 {
            last_coef += a.off[n - 2];
        }
    }
    if last_diag.abs() <= floor {
        return Err(Error::SingularSystem {
            row: last,
            pivot: last_diag.to_f64(),
        });
    }
    let positive = d.iter().filter(|&&p| p > R::zero()).count()
        + usize::from(last_diag > R::zero());
    let mut x = vec![R::zero(); n];
    x[last] = last_rhs / last_diag;
    for i in (0..last).rev() {
        let next = if i + 1 < last { x[i + 1] } else { R::zero() };
        x[i] = (rhs[i] - u[i] * next - f[i] * x[last]) / d[i];
    }
    Ok((x, positive))
}

/// Solves a symmetric (non-cyclic) tridiagonal system; `off.len() == n - 1`.
pub fn solve_tridiagonal<R: Real>(diag: &[R], off: &[R], b: &[R]) -> Result<Vec<R>> {
    solve_tridiagonal_inertia(diag, off, b).map(|(x, _)| x)
}

/// [`solve_tridiagonal`] plus the number of positive pivots.
pub fn solve_tridiagonal_inertia<R: Real>(
    diag: &[R],
    off: &[R],
    b: &[R],
) -> Result<(Vec<R>, usize)> {
    let n = diag.len();
    assert_eq!(off.len() + 1, n.max(1));
    assert_eq!(b.len(), n);
    let scale = diag
        .iter()
        .chain(off.iter())
        .fold(R::zero(), |a, &x| a.max(x.abs()));
    let floor = pivot_floor(scale);
    let mut c = vec![R::zero(); n];
    let mut y = vec![R::zero(); n];
    let mut piv = diag[0];
    let mut positive = 0;
    for i in 0..n {
        if i > 0 {
            piv = diag[i] - off[i - 1] * c[i - 1];
        }
        if piv > R::zero() {
            positive += 1;
        }
        if piv.abs() <= floor {
            return Err(Error::SingularSystem {
                row: i,
                pivot: piv.to_f64(),
            });
        }
        if i + 1 < n {
            c[i] = off[i] / piv;
        }
        y[i] = if i == 0 {
            b[0] / piv
        } else {
            (b[i] - off[i - 1] * y[i - 1]) / piv
        };
    }
    for i in (0..n.saturating_sub(1)).rev() {
        let t = y[i + 1];
        y[i] -= c[i] * t;
    }
    Ok((y, positive))
}

/// Smallest eigenvalue of a symmetric tridiagonal matrix by Sturm-count
/// bisection (double precision).
pub fn tridiagonal_min_eigenvalue(diag: &[f64], off: &[f64]) -> f64 {
    let n = diag.len();
    let radius = |i: usize| {
        let l = if i > 0 { off[i - 1].abs() } else { 0.0 };
        let r = if i + 1 < n { off[i].abs() } else { 0.0 };
        l + r
    };
    let mut lo = (0..n).map(|i| diag[i] - radius(i)).fold(f64::INFINITY, f64::min);
    let mut hi = (0..n).map(|i| diag[i] + radius(i)).fold(f64::NEG_INFINITY, f64::max);
    // number of eigenvalues < x
    let count = |x: f64| {
        let mut c = 0;
        let mut q = 1.0;
        for i in 0..n {
            let o2 = if i > 0 { off[i - 1] * off[i - 1] } else { 0.0 };
            q = diag[i] - x - if i > 0 { o2 / q } else { 0.0 };
            if q == 0.0 {
                q = -1e-300;
            }
            if q < 0.0 {
                c += 1;
            }
        }
        c
    };
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        if count(mid) >= 1 {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    0.5 * (lo + hi)
}

/// Eigen-decomposition of a real 2x2 matrix with real distinct eigenvalues.
#[derive(Debug, Clone, Copy)]
pub struct Eigen2<R> {
    /// Eigenvalue of smaller modulus.
    pub lambda_minus: R,
    /// Eigenvalue of larger modulus.
    pub lambda_plus: R,
    pub v_minus: [R; 2],
    pub v_plus: [R; 2],
}

fn unit_eigenvector<R: Real>(m: &Mat2<R>, lambda: R) -> [R; 2] {
    // rows of (M - lambda I) are orthogonal to the eigenvector; use the larger
    let a = m.m[0][0] - lambda;
    let b = m.m[0][1];
    let c = m.m[1][0];
    let d = m.m[1][1] - lambda;
    let r0 = a.hypot(b);
    let r1 = c.hypot(d);
    let (x, y) = if r0 >= r1 { (-b, a) } else { (-d, c) };
    let n = x.hypot(y);
    let (mut x, mut y) = (x / n, y / n);
    // fix the sign: first nonzero component positive
    if x < R::zero() || (x == R::zero() && y < R::zero()) {
        x = -x;
        y = -y;
    }
    [x, y]
}

/// Eigenvalues and unit eigenvectors of a 2x2 matrix in the hyperbolic regime
/// `|tr M| > 2`.
pub fn eigen2<R: Real>(m: &Mat2<R>) -> Result<Eigen2<R>> {
    let tr = m.trace();
    let det = m.det();
    if tr.abs().to_f64() <= 2.0 + 1e-10 {
        return Err(Error::NotHyperbolic { trace: tr.to_f64() });
    }
    let disc = tr * tr - det * 4.0;
    if disc <= R::zero() {
        return Err(Error::NotHyperbolic { trace: tr.to_f64() });
    }
    let sq = disc.sqrt();
    // larger-modulus root without cancellation, smaller one from the product
    let lambda_plus = if tr > R::zero() {
        (tr + sq) * 0.5
    } else {
        (tr - sq) * 0.5
    };
    let lambda_minus = det / lambda_plus;
    Ok(Eigen2 {
        lambda_minus,
        lambda_plus,
        v_minus: unit_eigenvector(m, lambda_minus),
        v_plus: unit_eigenvector(m, lambda_plus),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numerics::Dd;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn dense_solve(a: &mut [Vec<f64>], b: &mut [f64]) -> Vec<f64> {
        let n = b.len();
        for k in 0..n {
            let p = (k..n)
                .max_by(|&i, &j| a[i][k].abs().partial_cmp(&a[j][k].abs()).unwrap())
                .unwrap();
            a.swap(k, p);
            b.swap(k, p);
            for i in k + 1..n {
                let m = a[i][k] / a[k][k];
                for j in k..n {
                    a[i][j] -= m * a[k][j];
                }
                b[i] -= m * b[k];
            }
        }
        let mut x = vec![0.0; n];
        for i in (0..n).rev() {
            let s: f64 = (i + 1..n).map(|j| a[i][j] * x[j]).sum();
            x[i] = (b[i] - s) / a[i][i];
        }
        x
    }

    fn dense_of(a: &CyclicTridiagonal<f64>) -> Vec<Vec<f64>> {
        let n = a.len();
        let mut m = vec![vec![0.0; n]; n];
        for i in 0..n {
            m[i][i] += a.diag[i];
            let j = (i + 1) % n;
            m[i][j] += a.off[i];
            m[j][i] += a.off[i];
        }
        m
    }

    #[test]
    fn identity_system() {
        let a = CyclicTridiagonal::new(vec![1.0; 3], vec![0.0; 3]);
        let x = solve_cyclic_tridiagonal(&a, &[1.0, 2.0, 3.0]).unwrap();
        assert_eq!(x, vec![1.0, 2.0, 3.0]);
    }

    #[test]
    fn two_by_two_wrap_doubles_coupling() {
        // diag (2, 2) with doubled coupling 2 would be singular
        let a = CyclicTridiagonal::new(vec![3.0, 2.0], vec![1.0, 1.0]);
        let b = [0.3, -1.7];
        let x = solve_cyclic_tridiagonal(&a, &b).unwrap();
        let want = dense_solve(&mut dense_of(&a), &mut b.to_vec());
        for (u, v) in x.iter().zip(&want) {
            assert!((u - v).abs() < 1e-14);
        }
    }

    #[test]
    fn singular_two_by_two_is_reported() {
        let a = CyclicTridiagonal::new(vec![2.0, 2.0], vec![1.0, 1.0]);
        assert!(matches!(
            solve_cyclic_tridiagonal(&a, &[1.0, 0.0]),
            Err(Error::SingularSystem { .. })
        ));
    }

    #[test]
    fn random_dominant_n7_residual() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let n = 7;
        let off: Vec<f64> = (0..n).map(|_| rng.gen_range(-1.0..1.0)).collect();
        let diag: Vec<f64> = (0..n).map(|_| 2.5 + rng.gen_range(0.0..1.0)).collect();
        let a = CyclicTridiagonal::new(diag, off);
        let b: Vec<f64> = (0..n).map(|_| rng.gen_range(-1.0..1.0)).collect();
        let x = solve_cyclic_tridiagonal(&a, &b).unwrap();
        let r = a.mul_vec(&x);
        let bn = b.iter().fold(0.0f64, |m, v| m.max(v.abs()));
        let res = r.iter().zip(&b).fold(0.0f64, |m, (u, v)| m.max((u - v).abs()));
        assert!(res <= 1e3 * f64::EPSILON * bn, "residual {res}");
    }

    #[test]
    fn extended_residual() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let n = 9;
        let a = CyclicTridiagonal::new(
            (0..n).map(|_| Dd::from_f64(3.0 + rng.gen_range(0.0..1.0))).collect(),
            (0..n).map(|_| Dd::from_f64(rng.gen_range(-1.0..1.0))).collect(),
        );
        let b: Vec<Dd> = (0..n).map(|_| Dd::from_f64(rng.gen_range(-1.0..1.0))).collect();
        let x = solve_cyclic_tridiagonal(&a, &b).unwrap();
        let r = a.mul_vec(&x);
        for (u, v) in r.iter().zip(&b) {
            assert!((*u - *v).abs().to_f64() < 1e3 * Dd::EPSILON);
        }
    }

    #[test]
    fn inertia_counts_positive_pivots() {
        let neg = CyclicTridiagonal::new(vec![-3.0; 5], vec![1.0; 5]);
        let (_, pos) = solve_cyclic_tridiagonal_inertia(&neg, &[1.0; 5]).unwrap();
        assert_eq!(pos, 0);
        let mixed = CyclicTridiagonal::new(vec![-3.0, -3.0, 2.0, -3.0], vec![0.5; 4]);
        let (_, pos) = solve_cyclic_tridiagonal_inertia(&mixed, &[1.0; 4]).unwrap();
        assert_eq!(pos, 1);
        let (_, pos) = solve_tridiagonal_inertia(&[-2.0, 1.0, -2.0], &[0.1, 0.1], &[1.0; 3]).unwrap();
        assert_eq!(pos, 1);
    }

    #[test]
    fn tridiagonal_matches_dense() {
        let diag = [4.0, -3.0, 5.0, 2.0];
        let off = [1.0, 0.5, -1.5];
        let b = [1.0, 2.0, 3.0, 4.0];
        let x = solve_tridiagonal(&diag, &off, &b).unwrap();
        let mut m = vec![vec![0.0; 4]; 4];
        for i in 0..4 {
            m[i][i] = diag[i];
            if i < 3 {
                m[i][i + 1] = off[i];
                m[i + 1][i] = off[i];
            }
        }
        let want = dense_solve(&mut m, &mut b.to_vec());
        for (u, v) in x.iter().zip(&want) {
            assert!((u - v).abs() < 1e-13);
        }
    }

    #[test]
    fn sturm_min_eigenvalue() {
        // 1D Laplacian: eigenvalues 2 - 2 cos(k pi / (n+1))
        let n = 10;
        let diag = vec![2.0; n];
        let off = vec![-1.0; n - 1];
        let want = 2.0 - 2.0 * (std::f64::consts::PI / (n as f64 + 1.0)).cos();
        assert!((tridiagonal_min_eigenvalue(&diag, &off) - want).abs() < 1e-12);
    }

    #[test]
    fn eigen2_diagonal() {
        let m = Mat2::new(0.5, 0.0, 0.0, 2.0);
        let e = eigen2(&m).unwrap();
        assert!((e.lambda_minus - 0.5).abs() < 1e-15);
        assert!((e.lambda_plus - 2.0).abs() < 1e-15);
        assert!((e.v_minus[0] - 1.0).abs() < 1e-15 && e.v_minus[1].abs() < 1e-15);
        assert!(e.v_plus[0].abs() < 1e-15 && (e.v_plus[1] - 1.0).abs() < 1e-15);
    }

    #[test]
    fn eigen2_cat_map() {
        let m = Mat2::new(2.0, 1.0, 1.0, 1.0);
        let e = eigen2(&m).unwrap();
        let want = (3.0 - 5f64.sqrt()) / 2.0;
        assert!((e.lambda_minus - want).abs() < 1e-15);
        assert!((e.lambda_minus * e.lambda_plus - 1.0).abs() < 1e-14);
    }

    #[test]
    fn eigen2_parabolic_rejected() {
        let m = Mat2::new(1.0, 0.3, 0.0, 1.0);
        assert!(matches!(eigen2(&m), Err(Error::NotHyperbolic { .. })));
    }
}
