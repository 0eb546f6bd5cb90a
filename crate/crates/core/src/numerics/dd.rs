//! Double-double arithmetic.
//!
//! A value is the unevaluated sum `hi + lo` with `|lo| <= ulp(hi)/2`, giving
//! about 106 bits of significand. Addition and multiplication are built on the
//! error-free transformations `two_sum` and `two_prod`; division uses three
//! rounds of long division. Transcendentals reduce the argument, then either
//! refine a double-precision seed with one Newton step (`sqrt`, `ln`, `atan2`)
//! or sum a Taylor series (`exp`, `sin`, `cos`).

use std::cmp::Ordering;
use std::fmt;
use std::iter::Sum;
use std::ops::{Add, AddAssign, Div, DivAssign, Mul, MulAssign, Neg, Sub, SubAssign};
use std::str::FromStr;

#[derive(Clone, Copy, Default, PartialEq)]
pub struct Dd {
    hi: f64,
    lo: f64,
}

#[inline]
fn quick_two_sum(a: f64, b: f64) -> (f64, f64) {
    let s = a + b;
    (s, b - (s - a))
}

#[inline]
fn two_sum(a: f64, b: f64) -> (f64, f64) {
    let s = a + b;
    let bb = s - a;
    (s, (a - (s - bb)) + (b - bb))
}

#[inline]
fn two_prod(a: f64, b: f64) -> (f64, f64) {
    let p = a * b;
    (p, a.mul_add(b, -p))
}

impl Dd {
    pub const ZERO: Dd = Dd { hi: 0.0, lo: 0.0 };
    pub const ONE: Dd = Dd { hi: 1.0, lo: 0.0 };
    pub const PI: Dd = Dd {
        hi: std::f64::consts::PI,
        lo: 1.224_646_799_147_353_2e-16,
    };
    /// Third component of pi, used only for argument reduction.
    const PI_LO2: f64 = -2.994_769_809_718_339_7e-33;
    pub const LN2: Dd = Dd {
        hi: std::f64::consts::LN_2,
        lo: 2.319_046_813_846_299_6e-17,
    };
    /// 2^-104, the conventional machine epsilon of double-double.
    pub const EPSILON: f64 = 4.930_380_657_631_324e-32;

    #[inline]
    pub const fn from_f64(x: f64) -> Dd {
        Dd { hi: x, lo: 0.0 }
    }

    /// Builds a value from two components, renormalizing.
    #[inline]
    pub fn new(hi: f64, lo: f64) -> Dd {
        let (h, l) = two_sum(hi, lo);
        Dd { hi: h, lo: l }
    }

    #[inline]
    pub fn hi(self) -> f64 {
        self.hi
    }

    #[inline]
    pub fn lo(self) -> f64 {
        self.lo
    }

    #[inline]
    pub fn to_f64(self) -> f64 {
        self.hi + self.lo
    }

    pub fn is_finite(self) -> bool {
        self.hi.is_finite() && self.lo.is_finite()
    }

    pub fn abs(self) -> Dd {
        if self.hi < 0.0 || (self.hi == 0.0 && self.lo < 0.0) {
            -self
        } else {
            self
        }
    }

    pub fn signum(self) -> f64 {
        if self.hi > 0.0 {
            1.0
        } else if self.hi < 0.0 {
            -1.0
        } else {
            0.0
        }
    }

    /// Exact product with a power of two.
    pub fn ldexp(self, e: i32) -> Dd {
        let s = 2f64.powi(e);
        Dd {
            hi: self.hi * s,
            lo: self.lo * s,
        }
    }

    pub fn mul_f64(self, b: f64) -> Dd {
        let (p, e) = two_prod(self.hi, b);
        let e = self.lo.mul_add(b, e);
        let (h, l) = quick_two_sum(p, e);
        Dd { hi: h, lo: l }
    }

    pub fn add_f64(self, b: f64) -> Dd {
        let (s, e) = two_sum(self.hi, b);
        let (h, l) = quick_two_sum(s, e + self.lo);
        Dd { hi: h, lo: l }
    }

    pub fn sqr(self) -> Dd {
        let (p, e) = two_prod(self.hi, self.hi);
        let e = (2.0 * self.hi).mul_add(self.lo, e);
        let (h, l) = quick_two_sum(p, e);
        Dd { hi: h, lo: l }
    }

    pub fn floor(self) -> Dd {
        let f = self.hi.floor();
        if f == self.hi {
            Dd::new(f, self.lo.floor())
        } else {
            Dd { hi: f, lo: 0.0 }
        }
    }

    pub fn round(self) -> Dd {
        (self + Dd::from_f64(0.5)).floor()
    }

    pub fn powi(self, n: i32) -> Dd {
        if n == 0 {
            return Dd::ONE;
        }
        let mut base = self;
        let mut k = n.unsigned_abs();
        let mut acc = Dd::ONE;
        while k > 0 {
            if k & 1 == 1 {
                acc *= base;
            }
            base = base.sqr();
            k >>= 1;
        }
        if n < 0 {
            Dd::ONE / acc
        } else {
            acc
        }
    }

    pub fn sqrt(self) -> Dd {
        if self.hi <= 0.0 {
            return if self.hi == 0.0 {
                Dd::ZERO
            } else {
                Dd::from_f64(f64::NAN)
            };
        }
        let x = self.hi.sqrt();
        let xd = Dd::from_f64(x);
        // x + (a - x^2) / (2x)
        let corr = (self - xd.sqr()).to_f64() / (2.0 * x);
        Dd::new(x, corr)
    }

    pub fn exp(self) -> Dd {
        if self.hi > 709.0 {
            return Dd::from_f64(f64::INFINITY);
        }
        if self.hi < -745.0 {
            return Dd::ZERO;
        }
        let k = (self.hi / Dd::LN2.hi).round();
        let r = (self - Dd::LN2.mul_f64(k)).ldexp(-9);
        // expm1(r) by Taylor, |r| < 7e-4
        let mut term = r;
        let mut sum = r;
        for n in 2..40 {
            term = term * r / Dd::from_f64(n as f64);
            sum += term;
            if term.hi.abs() <= 1e-36 * sum.hi.abs() {
                break;
            }
        }
        // (1 + s)^2 - 1 = 2s + s^2, nine times
        for _ in 0..9 {
            sum = sum.ldexp(1) + sum.sqr();
        }
        (sum + Dd::ONE).ldexp(k as i32)
    }

    pub fn ln(self) -> Dd {
        if self.hi <= 0.0 {
            return Dd::from_f64(if self.hi == 0.0 {
                f64::NEG_INFINITY
            } else {
                f64::NAN
            });
        }
        let y = Dd::from_f64(self.hi.ln());
        y + self * (-y).exp() - Dd::ONE
    }

    /// Reduces `self` modulo pi/2, returning the quadrant and a remainder in
    /// [-pi/4, pi/4].
    fn reduce_half_pi(self) -> (i64, Dd) {
        let k = (self.hi / std::f64::consts::FRAC_PI_2).round();
        if k == 0.0 {
            return (0, self);
        }
        let half_pi_hi = Dd::PI.hi * 0.5;
        let half_pi_lo = Dd::PI.lo * 0.5;
        let half_pi_lo2 = Dd::PI_LO2 * 0.5;
        let (p1, e1) = two_prod(k, half_pi_hi);
        let (p2, e2) = two_prod(k, half_pi_lo);
        let r = self - Dd::new(p1, e1) - Dd::new(p2, e2) - Dd::from_f64(k * half_pi_lo2);
        (k as i64, r)
    }

    /// Taylor sine on |x| <= pi/4.
    fn sin_taylor(x: Dd) -> Dd {
        if x.hi == 0.0 {
            return x;
        }
        let x2 = -x.sqr();
        let mut term = x;
        let mut sum = x;
        let mut n = 1.0;
        loop {
            term = term * x2 / Dd::from_f64((n + 1.0) * (n + 2.0));
            n += 2.0;
            sum += term;
            if term.hi.abs() < 1e-35 * sum.hi.abs() {
                break;
            }
        }
        sum
    }

    pub fn sin_cos(self) -> (Dd, Dd) {
        let (k, r) = self.reduce_half_pi();
        let s = Dd::sin_taylor(r);
        let c = (Dd::ONE - s.sqr()).sqrt();
        match k.rem_euclid(4) {
            0 => (s, c),
            1 => (c, -s),
            2 => (-s, -c),
            _ => (-c, s),
        }
    }

    pub fn sin(self) -> Dd {
        self.sin_cos().0
    }

    pub fn cos(self) -> Dd {
        self.sin_cos().1
    }

    pub fn atan2(self, x: Dd) -> Dd {
        let y = self;
        if x.hi == 0.0 && y.hi == 0.0 {
            return Dd::ZERO;
        }
        let t0 = Dd::from_f64(y.hi.atan2(x.hi));
        let (s, c) = t0.sin_cos();
        // Newton on the angle: the cross and dot of (x, y) with (c, s)
        let cross = y * c - x * s;
        let dot = x * c + y * s;
        t0 + cross / dot
    }

    pub fn atan(self) -> Dd {
        self.atan2(Dd::ONE)
    }

    /// Formats with the given number of significant digits in scientific
    /// notation, e.g. `-1.2345e-3`.
    pub fn to_sci_string(self, digits: usize) -> String {
        if self.hi.is_nan() {
            return "NaN".into();
        }
        if self.hi.is_infinite() {
            return if self.hi > 0.0 { "inf".into() } else { "-inf".into() };
        }
        if self.hi == 0.0 {
            return format!("{:.*}e0", digits.saturating_sub(1), 0.0);
        }
        let neg = self.hi < 0.0;
        let a = self.abs();
        let mut e10 = a.hi.log10().floor() as i32;
        let mut x = scale_pow10(a, -e10);
        if x.hi >= 10.0 {
            x /= Dd::from_f64(10.0);
            e10 += 1;
        }
        if x.hi < 1.0 {
            x *= Dd::from_f64(10.0);
            e10 -= 1;
        }
        let mut ds: Vec<u8> = Vec::with_capacity(digits + 1);
        for _ in 0..=digits {
            let mut d = x.hi.floor();
            let mut rem = x - Dd::from_f64(d);
            if rem.hi < 0.0 {
                d -= 1.0;
                rem += Dd::ONE;
            }
            let d = d.clamp(0.0, 9.0);
            ds.push(d as u8);
            x = rem * Dd::from_f64(10.0);
        }
        // round half up on the guard digit
        let guard = ds.pop().unwrap_or(0);
        if guard >= 5 {
            let mut i = ds.len();
            loop {
                if i == 0 {
                    ds.insert(0, 1);
                    ds.pop();
                    e10 += 1;
                    break;
                }
                i -= 1;
                if ds[i] == 9 {
                    ds[i] = 0;
                } else {
                    ds[i] += 1;
                    break;
                }
            }
        }
        let mut s = String::with_capacity(digits + 8);
        if neg {
            s.push('-');
        }
        s.push((b'0' + ds[0]) as char);
        if ds.len() > 1 {
            s.push('.');
            for &d in &ds[1..] {
                s.push((b'0' + d) as char);
            }
        }
        s.push('e');
        s.push_str(&e10.to_string());
        s
    }
}

fn scale_pow10(x: Dd, e: i32) -> Dd {
    if e >= 0 {
        x * Dd::from_f64(10.0).powi(e)
    } else {
        x / Dd::from_f64(10.0).powi(-e)
    }
}

impl fmt::Debug for Dd {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Dd({})", self.to_sci_string(32))
    }
}

impl fmt::Display for Dd {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let digits = f.precision().map(|p| p + 1).unwrap_or(32);
        f.write_str(&self.to_sci_string(digits))
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ParseDdError(String);

impl fmt::Display for ParseDdError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "invalid double-double literal `{}`", self.0)
    }
}

impl std::error::Error for ParseDdError {}

impl FromStr for Dd {
    type Err = ParseDdError;

    fn from_str(s: &str) -> Result<Dd, ParseDdError> {
        let err = || ParseDdError(s.to_string());
        let t = s.trim();
        let (neg, body) = match t.as_bytes().first() {
            Some(b'-') => (true, &t[1..]),
            Some(b'+') => (false, &t[1..]),
            _ => (false, t),
        };
        let (mant, exp) = match body.find(['e', 'E']) {
            Some(i) => (&body[..i], body[i + 1..].parse::<i32>().map_err(|_| err())?),
            None => (body, 0),
        };
        let mut acc = Dd::ZERO;
        let mut frac_digits = 0i32;
        let mut seen_dot = false;
        let mut any = false;
        for c in mant.chars() {
            match c {
                '0'..='9' => {
                    acc = acc * Dd::from_f64(10.0) + Dd::from_f64(f64::from(c as u8 - b'0'));
                    any = true;
                    if seen_dot {
                        frac_digits += 1;
                    }
                }
                '.' if !seen_dot => seen_dot = true,
                _ => return Err(err()),
            }
        }
        if !any {
            return Err(err());
        }
        let v = scale_pow10(acc, exp - frac_digits);
        Ok(if neg { -v } else { v })
    }
}

impl PartialOrd for Dd {
    fn partial_cmp(&self, other: &Dd) -> Option<Ordering> {
        match self.hi.partial_cmp(&other.hi) {
            Some(Ordering::Equal) => self.lo.partial_cmp(&other.lo),
            o => o,
        }
    }
}

impl Neg for Dd {
    type Output = Dd;
    #[inline]
    fn neg(self) -> Dd {
        Dd {
            hi: -self.hi,
            lo: -self.lo,
        }
    }
}

impl Add for Dd {
    type Output = Dd;
    #[inline]
    fn add(self, b: Dd) -> Dd {
        let (s1, e1) = two_sum(self.hi, b.hi);
        let (s2, e2) = two_sum(self.lo, b.lo);
        let (s1, e1) = quick_two_sum(s1, e1 + s2);
        let (h, l) = quick_two_sum(s1, e1 + e2);
        Dd { hi: h, lo: l }
    }
}

impl Sub for Dd {
    type Output = Dd;
    #[inline]
    fn sub(self, b: Dd) -> Dd {
        self + (-b)
    }
}

impl Mul for Dd {
    type Output = Dd;
    #[inline]
    fn mul(self, b: Dd) -> Dd {
        let (p, e) = two_prod(self.hi, b.hi);
        let e = self.hi.mul_add(b.lo, e);
        let e = self.lo.mul_add(b.hi, e);
        let (h, l) = quick_two_sum(p, e);
        Dd { hi: h, lo: l }
    }
}

impl Div for Dd {
    type Output = Dd;
    #[inline]
    fn div(self, b: Dd) -> Dd {
        let q1 = self.hi / b.hi;
        let r = self - b.mul_f64(q1);
        let q2 = r.hi / b.hi;
        let r = r - b.mul_f64(q2);
        let q3 = r.hi / b.hi;
        let (h, l) = quick_two_sum(q1, q2);
        Dd { hi: h, lo: l }.add_f64(q3)
    }
}

macro_rules! assign_ops {
    ($($tr:ident $m:ident $op:tt),*) => {$(
        impl $tr for Dd {
            #[inline]
            fn $m(&mut self, b: Dd) { *self = *self $op b; }
        }
        impl $tr<f64> for Dd {
            #[inline]
            fn $m(&mut self, b: f64) { *self = *self $op Dd::from_f64(b); }
        }
    )*};
}
assign_ops!(AddAssign add_assign +, SubAssign sub_assign -, MulAssign mul_assign *, DivAssign div_assign /);

impl Add<f64> for Dd {
    type Output = Dd;
    #[inline]
    fn add(self, b: f64) -> Dd {
        self.add_f64(b)
    }
}

impl Sub<f64> for Dd {
    type Output = Dd;
    #[inline]
    fn sub(self, b: f64) -> Dd {
        self.add_f64(-b)
    }
}

impl Mul<f64> for Dd {
    type Output = Dd;
    #[inline]
    fn mul(self, b: f64) -> Dd {
        self.mul_f64(b)
    }
}

impl Div<f64> for Dd {
    type Output = Dd;
    #[inline]
    fn div(self, b: f64) -> Dd {
        self / Dd::from_f64(b)
    }
}

impl Sum for Dd {
    fn sum<I: Iterator<Item = Dd>>(iter: I) -> Dd {
        iter.fold(Dd::ZERO, |a, b| a + b)
    }
}

impl From<f64> for Dd {
    fn from(x: f64) -> Dd {
        Dd::from_f64(x)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn rel(a: Dd, b: Dd) -> f64 {
        ((a - b) / b).abs().to_f64()
    }

    #[test]
    fn error_free_sum_is_exact_to_2_pow_minus_100() {
        let a = Dd::from_f64(1.0);
        let b = Dd::from_f64(1e-20);
        let s = a + b;
        let back = (s - a) - b;
        assert!(back.abs().to_f64() <= 2f64.powi(-100) * s.to_f64());
    }

    #[test]
    fn sqrt_two_squared() {
        let r = Dd::from_f64(2.0).sqrt();
        assert!((r.sqr() - Dd::from_f64(2.0)).abs().to_f64() < 1e-31);
    }

    #[test]
    fn pi_from_atan() {
        let p = Dd::ONE.atan() * 4.0;
        assert!(rel(p, Dd::PI) < 1e-31);
        let q = Dd::ONE.atan2(Dd::from_f64(-1.0));
        assert!(rel(q, Dd::PI * 0.75) < 1e-31);
    }

    #[test]
    fn sin_cos_identities() {
        for &x in &[0.1, 1.0, 2.5, -3.7, 10.0, 125.6637] {
            let x = Dd::from_f64(x) + Dd::from_f64(x * 1e-17);
            let (s, c) = x.sin_cos();
            assert!((s.sqr() + c.sqr() - Dd::ONE).abs().to_f64() < 1e-31);
            // sin(2x) = 2 sin x cos x
            let s2 = (x * 2.0).sin();
            assert!((s2 - s * c * 2.0).abs().to_f64() < 1e-30);
        }
        // sin(pi/6) = 1/2
        let s = (Dd::PI / 6.0).sin();
        assert!((s - Dd::from_f64(0.5)).abs().to_f64() < 1e-31);
    }

    #[test]
    fn exp_log_roundtrip() {
        for &x in &[1e-5, 0.3, 1.0, 7.25, 123.0] {
            let v = Dd::from_f64(x);
            assert!(rel(v.ln().exp(), v) < 1e-30);
        }
        let e = Dd::ONE.exp();
        let e_ref: Dd = "2.718281828459045235360287471352662".parse().unwrap();
        assert!(rel(e, e_ref) < 1e-31);
    }

    #[test]
    fn string_roundtrip_30_digits() {
        let cases = [
            "3.14159265358979323846264338327",
            "-1.23456789012345678901234567890e-12",
            "9.99999999999999999999999999999e42",
            "0.000123456789012345678901234567891",
        ];
        for c in cases {
            let v: Dd = c.parse().unwrap();
            let back: Dd = v.to_sci_string(32).parse().unwrap();
            assert!(rel(back, v) < 1e-28, "{c} -> {}", v);
        }
        let p = Dd::PI.to_sci_string(32);
        assert!(p.starts_with("3.14159265358979323846264338327"), "{p}");
    }

    #[test]
    fn division_accuracy() {
        let a = Dd::ONE;
        let b = Dd::from_f64(3.0);
        let q = a / b;
        assert!((q * b - a).abs().to_f64() < 1e-32);
    }
}
