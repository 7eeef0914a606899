//! Fixed-point ball arithmetic.
//!
//! A [`RealBall`] with fraction precision `p` denotes the closed interval
//! `[(mid - rad) / 2^p, (mid + rad) / 2^p]`. Every operation returns a ball
//! that contains the exact result for all inputs in the argument balls.
//! Elementary functions are only offered on exact rational arguments, where
//! the series error can be bounded directly.

use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::error::{Error, Result};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RealBall {
    mid: BigInt,
    rad: BigInt,
    prec: u32,
}

fn pow2(p: u32) -> BigInt {
    BigInt::one() << p as usize
}

/// `round(n / d)` and whether the division was exact.
fn div_round(n: &BigInt, d: &BigInt) -> (BigInt, bool) {
    let (q, r) = n.div_mod_floor(d);
    if r.is_zero() {
        return (q, true);
    }
    let twice: BigInt = &r * 2;
    if twice.abs() >= d.abs() {
        (q + 1, false)
    } else {
        (q, false)
    }
}

fn div_ceil_pos(n: &BigInt, d: &BigInt) -> BigInt {
    let (q, r) = n.div_mod_floor(d);
    if r.is_zero() {
        q
    } else {
        q + 1
    }
}

/// Converts `n · 2^-shift` to f64 without overflowing on huge integers.
fn scaled_to_f64(n: &BigInt, shift: i64) -> f64 {
    if n.is_zero() {
        return 0.0;
    }
    let bits = n.bits() as i64;
    let drop = (bits - 60).max(0);
    let top = (n >> drop as usize).to_f64().unwrap_or(0.0);
    top * 2f64.powi((drop - shift) as i32)
}

impl RealBall {
    pub fn zero(prec: u32) -> Self {
        RealBall {
            mid: BigInt::zero(),
            rad: BigInt::zero(),
            prec,
        }
    }

    pub fn from_rational(q: &BigRational, prec: u32) -> Self {
        let (mid, exact) = div_round(&(q.numer() << prec as usize), q.denom());
        RealBall {
            mid,
            rad: if exact { BigInt::zero() } else { BigInt::one() },
            prec,
        }
    }

    pub fn from_int(n: i64, prec: u32) -> Self {
        RealBall {
            mid: BigInt::from(n) << prec as usize,
            rad: BigInt::zero(),
            prec,
        }
    }

    pub fn prec(&self) -> u32 {
        self.prec
    }

    /// Exact midpoint as a dyadic rational.
    pub fn mid_rational(&self) -> BigRational {
        BigRational::new(self.mid.clone(), pow2(self.prec))
    }

    /// Radius as an exact dyadic rational.
    pub fn rad_rational(&self) -> BigRational {
        BigRational::new(self.rad.clone(), pow2(self.prec))
    }

    pub fn mid_f64(&self) -> f64 {
        scaled_to_f64(&self.mid, self.prec as i64)
    }

    /// An f64 no smaller than the radius.
    pub fn rad_f64(&self) -> f64 {
        let r = scaled_to_f64(&self.rad, self.prec as i64);
        if r == 0.0 && !self.rad.is_zero() {
            f64::MIN_POSITIVE
        } else {
            r * (1.0 + 1e-12)
        }
    }

    pub fn is_exact(&self) -> bool {
        self.rad.is_zero()
    }

    pub fn contains_zero(&self) -> bool {
        self.mid.abs() <= self.rad
    }

    pub fn is_positive(&self) -> bool {
        &self.mid - &self.rad > BigInt::zero()
    }

    pub fn is_negative(&self) -> bool {
        &self.mid + &self.rad < BigInt::zero()
    }

    /// Lower bound of |x| in ulps, clamped at zero.
    fn abs_lower(&self) -> BigInt {
        let v = self.mid.abs() - &self.rad;
        if v.is_negative() {
            BigInt::zero()
        } else {
            v
        }
    }

    pub fn overlaps(&self, other: &RealBall) -> bool {
        self.sub(other).contains_zero()
    }

    pub fn neg(&self) -> RealBall {
        RealBall {
            mid: -&self.mid,
            rad: self.rad.clone(),
            prec: self.prec,
        }
    }

    fn check(&self, other: &RealBall) {
        debug_assert_eq!(self.prec, other.prec, "mixed-precision ball arithmetic");
    }

    pub fn add(&self, other: &RealBall) -> RealBall {
        self.check(other);
        RealBall {
            mid: &self.mid + &other.mid,
            rad: &self.rad + &other.rad,
            prec: self.prec,
        }
    }

    pub fn sub(&self, other: &RealBall) -> RealBall {
        self.check(other);
        RealBall {
            mid: &self.mid - &other.mid,
            rad: &self.rad + &other.rad,
            prec: self.prec,
        }
    }

    pub fn mul(&self, other: &RealBall) -> RealBall {
        self.check(other);
        let scale = pow2(self.prec);
        let (mid, exact) = div_round(&(&self.mid * &other.mid), &scale);
        let err = self.mid.abs() * &other.rad + other.mid.abs() * &self.rad + &self.rad * &other.rad;
        let mut rad = div_ceil_pos(&err, &scale);
        if !exact {
            rad += 1;
        }
        RealBall {
            mid,
            rad,
            prec: self.prec,
        }
    }

    pub fn mul_int(&self, n: i64) -> RealBall {
        RealBall {
            mid: &self.mid * n,
            rad: &self.rad * n.unsigned_abs(),
            prec: self.prec,
        }
    }

    pub fn div(&self, other: &RealBall) -> Result<RealBall> {
        self.check(other);
        let my = other.mid.abs();
        if my <= other.rad {
            return Err(Error::PrecisionExhausted(
                "divisor ball contains zero".into(),
            ));
        }
        let scale = pow2(self.prec);
        let (mid, _) = div_round(&(&self.mid * &scale), &other.mid);
        let num = (self.mid.abs() * &other.rad + &my * &self.rad) * &scale;
        let den = &my * (&my - &other.rad);
        let rad = div_ceil_pos(&num, &den) + 1;
        Ok(RealBall {
            mid,
            rad,
            prec: self.prec,
        })
    }

    /// Widens the radius by `extra` (a nonnegative rational).
    pub fn widen(&self, extra: &BigRational) -> RealBall {
        let e = (extra * BigRational::from_integer(pow2(self.prec))).ceil().to_integer();
        RealBall {
            mid: self.mid.clone(),
            rad: &self.rad + e,
            prec: self.prec,
        }
    }

    /// Rounds to a coarser precision, keeping the enclosure.
    pub fn to_prec(&self, prec: u32) -> RealBall {
        if prec >= self.prec {
            let s = (prec - self.prec) as usize;
            return RealBall {
                mid: &self.mid << s,
                rad: &self.rad << s,
                prec,
            };
        }
        let d = pow2(self.prec - prec);
        let (mid, exact) = div_round(&self.mid, &d);
        let mut rad = div_ceil_pos(&self.rad, &d);
        if !exact {
            rad += 1;
        }
        RealBall { mid, rad, prec }
    }
}

impl fmt::Display for RealBall {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:.20e} ± {:.3e}", self.mid_f64(), self.rad_f64())
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ComplexBall {
    pub re: RealBall,
    pub im: RealBall,
}

impl ComplexBall {
    pub fn new(re: RealBall, im: RealBall) -> Self {
        ComplexBall { re, im }
    }

    pub fn zero(prec: u32) -> Self {
        ComplexBall::new(RealBall::zero(prec), RealBall::zero(prec))
    }

    pub fn from_rationals(re: &BigRational, im: &BigRational, prec: u32) -> Self {
        ComplexBall::new(
            RealBall::from_rational(re, prec),
            RealBall::from_rational(im, prec),
        )
    }

    pub fn prec(&self) -> u32 {
        self.re.prec
    }

    pub fn add(&self, o: &ComplexBall) -> ComplexBall {
        ComplexBall::new(self.re.add(&o.re), self.im.add(&o.im))
    }

    pub fn sub(&self, o: &ComplexBall) -> ComplexBall {
        ComplexBall::new(self.re.sub(&o.re), self.im.sub(&o.im))
    }

    pub fn neg(&self) -> ComplexBall {
        ComplexBall::new(self.re.neg(), self.im.neg())
    }

    pub fn conj(&self) -> ComplexBall {
        ComplexBall::new(self.re.clone(), self.im.neg())
    }

    pub fn mul(&self, o: &ComplexBall) -> ComplexBall {
        ComplexBall::new(
            self.re.mul(&o.re).sub(&self.im.mul(&o.im)),
            self.re.mul(&o.im).add(&self.im.mul(&o.re)),
        )
    }

    pub fn scale(&self, r: &RealBall) -> ComplexBall {
        ComplexBall::new(self.re.mul(r), self.im.mul(r))
    }

    pub fn norm_sqr(&self) -> RealBall {
        self.re.mul(&self.re).add(&self.im.mul(&self.im))
    }

    pub fn div(&self, o: &ComplexBall) -> Result<ComplexBall> {
        let n = o.norm_sqr();
        let num = self.mul(&o.conj());
        Ok(ComplexBall::new(num.re.div(&n)?, num.im.div(&n)?))
    }

    pub fn contains_zero(&self) -> bool {
        self.re.contains_zero() && self.im.contains_zero()
    }

    pub fn overlaps(&self, o: &ComplexBall) -> bool {
        self.re.overlaps(&o.re) && self.im.overlaps(&o.im)
    }

    /// Largest of the two component radii.
    pub fn rad_f64(&self) -> f64 {
        self.re.rad_f64().max(self.im.rad_f64())
    }

    pub fn is_exact(&self) -> bool {
        self.re.is_exact() && self.im.is_exact()
    }

    pub fn to_prec(&self, prec: u32) -> ComplexBall {
        ComplexBall::new(self.re.to_prec(prec), self.im.to_prec(prec))
    }
}

impl fmt::Display for ComplexBall {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}) + ({})i", self.re, self.im)
    }
}

/// Sum of `sign^n u^(2n+1) / (2n+1)` for rational |u| <= 1/2, i.e. atanh(u)
/// (`alternating = false`) or atan(u) (`alternating = true`).
fn odd_power_series(u: &BigRational, alternating: bool, prec: u32) -> RealBall {
    assert!(
        u.abs() * BigRational::from_integer(2.into()) <= BigRational::one(),
        "series argument out of range"
    );
    let a = u.numer().clone();
    let b = u.denom().clone();
    let a2 = &a * &a;
    let b2 = &b * &b;
    // p_n approximates u^(2n+1) * 2^prec with |error| <= n + 1 ulps.
    let mut p = (&a << prec as usize).div_floor(&b);
    let mut sum = BigInt::zero();
    let mut n: u64 = 0;
    let mut err = BigInt::zero();
    loop {
        let term = p.div_floor(&BigInt::from(2 * n + 1));
        if alternating && n % 2 == 1 {
            sum -= &term;
        } else {
            sum += &term;
        }
        // truncation of p (n + 1) plus floor in the division (1)
        err += BigInt::from(n + 2);
        if p.abs() <= BigInt::from(n + 1) {
            break;
        }
        p = (&p * &a2).div_floor(&b2);
        n += 1;
    }
    // Tail: all later terms are bounded by |p_n| + n + 1 times a geometric
    // factor with ratio <= 1/4.
    let tail = (p.abs() + BigInt::from(n + 1)) * 2;
    RealBall {
        mid: sum,
        rad: err + tail,
        prec,
    }
}

/// ln 2 to the given precision.
pub fn ln2(prec: u32) -> RealBall {
    odd_power_series(&BigRational::new(1.into(), 3.into()), false, prec).mul_int(2)
}

/// pi to the given precision (Machin's formula).
pub fn pi(prec: u32) -> RealBall {
    let a = odd_power_series(&BigRational::new(1.into(), 5.into()), true, prec).mul_int(16);
    let b = odd_power_series(&BigRational::new(1.into(), 239.into()), true, prec).mul_int(4);
    a.sub(&b)
}

/// Natural logarithm of a positive rational.
pub fn ln_rational(q: &BigRational, prec: u32) -> Result<RealBall> {
    if !q.is_positive() {
        return Err(Error::Invalid("logarithm of a nonpositive number".into()));
    }
    // ln q = ln num - ln den
    let ln_int = |n: &BigInt| -> RealBall {
        // n = 2^k m with m in [1, 2)
        let k = n.bits() - 1;
        let m = BigRational::new(n.clone(), pow2(k as u32));
        let u = (&m - BigRational::one()) / (&m + BigRational::one());
        let part = odd_power_series(&u, false, prec).mul_int(2);
        ln2(prec).mul_int(k as i64).add(&part)
    };
    Ok(ln_int(q.numer()).sub(&ln_int(q.denom())))
}

/// Arctangent of a rational, in (-pi/2, pi/2).
pub fn atan_rational(x: &BigRational, prec: u32) -> RealBall {
    let one = BigRational::one();
    let half = BigRational::new(1.into(), 2.into());
    if x.is_negative() {
        return atan_rational(&-x, prec).neg();
    }
    if x > &one {
        // atan x = pi/2 - atan(1/x)
        let halfpi = {
            let p = pi(prec);
            RealBall {
                mid: p.mid.div_floor(&BigInt::from(2)),
                rad: p.rad.clone() + 1,
                prec,
            }
        };
        return halfpi.sub(&atan_rational(&(&one / x), prec));
    }
    if x > &half {
        // atan x = atan(1/2) + atan((x - 1/2) / (1 + x/2))
        let u = (x - &half) / (&one + x * &half);
        return odd_power_series(&half, true, prec).add(&odd_power_series(&u, true, prec));
    }
    odd_power_series(x, true, prec)
}

/// Lower bound, as f64, of |x| for a real ball.
pub fn abs_lower_f64(x: &RealBall) -> f64 {
    scaled_to_f64(&x.abs_lower(), x.prec as i64)
}

/// Arctangent of a ball: atan of the midpoint widened by the radius, since
/// |atan'| <= 1.
pub fn atan_ball(x: &RealBall) -> RealBall {
    let a = atan_rational(&x.mid_rational(), x.prec);
    RealBall {
        mid: a.mid,
        rad: a.rad + &x.rad,
        prec: x.prec,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn r(n: i64, d: i64) -> BigRational {
        BigRational::new(n.into(), d.into())
    }

    #[test]
    fn pi_matches_f64() {
        let p = pi(200);
        assert!((p.mid_f64() - std::f64::consts::PI).abs() < 1e-15);
        assert!(p.rad_f64() < 1e-55);
    }

    #[test]
    fn ln_and_atan_match_f64() {
        for (n, d) in [(1, 7), (5, 3), (1000, 1), (3, 1024), (22, 7)] {
            let q = r(n, d);
            let l = ln_rational(&q, 160).unwrap();
            assert!((l.mid_f64() - (n as f64 / d as f64).ln()).abs() < 1e-14);
            assert!(l.rad_f64() < 1e-40);
        }
        for (n, d) in [(1, 7), (-5, 3), (1000, 1), (3, 4), (0, 1), (1, 1)] {
            let a = atan_rational(&r(n, d), 160);
            assert!((a.mid_f64() - (n as f64 / d as f64).atan()).abs() < 1e-14);
            assert!(a.rad_f64() < 1e-40);
        }
    }

    #[test]
    fn ln2_high_precision_digits() {
        // ln 2 = 0.693147180559945309417232121458176568...
        let l = ln2(256);
        let reference = BigRational::new(
            "693147180559945309417232121458176568".parse().unwrap(),
            BigInt::from(10).pow(36),
        );
        let diff = (l.mid_rational() - reference).abs();
        assert!(diff < r(1, 1_000_000_000_000_000_000) * r(1, 1_000_000_000_000_000));
    }

    #[test]
    fn division_encloses_quotient() {
        let a = RealBall::from_rational(&r(1, 3), 100);
        let b = RealBall::from_rational(&r(-7, 5), 100);
        let q = a.div(&b).unwrap();
        let exact = RealBall::from_rational(&r(-5, 21), 100);
        assert!(q.overlaps(&exact));
        assert!(RealBall::zero(64).div(&RealBall::zero(64)).is_err());
    }

    #[test]
    fn multiplication_radius_propagates() {
        let a = RealBall::from_rational(&r(1, 3), 64).widen(&r(1, 1 << 20));
        let b = RealBall::from_rational(&r(3, 1), 64);
        let p = a.mul(&b);
        assert!(p.rad_f64() >= 3.0 / (1u64 << 20) as f64);
        assert!(p.overlaps(&RealBall::from_int(1, 64)));
    }
}
