//! Prime-ideal valuations over Q and imaginary quadratic fields.

use std::fmt;
use std::sync::Arc;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use super::{FieldElement, NumberField};
use crate::error::{Error, Result};

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum PrimeKind {
    /// The prime of Q itself.
    Rational,
    /// One of two primes above a split p: the ideal (p, omega - root).
    Split { root: BigInt },
    Inert,
    Ramified,
}

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct PrimeIdealLabel {
    pub p: BigInt,
    pub kind: PrimeKind,
}

impl PrimeIdealLabel {
    pub fn rational(p: i64) -> Self {
        PrimeIdealLabel {
            p: p.into(),
            kind: PrimeKind::Rational,
        }
    }

    /// Absolute norm of the ideal.
    pub fn norm(&self) -> BigInt {
        match self.kind {
            PrimeKind::Inert => &self.p * &self.p,
            _ => self.p.clone(),
        }
    }
}

impl fmt::Display for PrimeIdealLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &self.kind {
            PrimeKind::Rational => write!(f, "({})", self.p),
            PrimeKind::Split { root } => write!(f, "({}, ω-{})", self.p, root),
            PrimeKind::Inert => write!(f, "({}) inert", self.p),
            PrimeKind::Ramified => write!(f, "({}, ω) ramified", self.p),
        }
    }
}

/// p-adic valuation of a nonzero integer.
pub fn vp_int(n: &BigInt, p: &BigInt) -> i64 {
    debug_assert!(!n.is_zero());
    let mut n = n.clone();
    let mut k = 0;
    loop {
        let (q, r) = n.div_rem(p);
        if !r.is_zero() {
            return k;
        }
        n = q;
        k += 1;
    }
}

pub fn vp_rational(q: &BigRational, p: &BigInt) -> i64 {
    vp_int(q.numer(), p) - vp_int(q.denom(), p)
}

fn is_probable_prime(n: &BigInt) -> bool {
    let two = BigInt::from(2);
    if *n < two {
        return false;
    }
    for sp in [2u32, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37] {
        let sp = BigInt::from(sp);
        if *n == sp {
            return true;
        }
        if (n % &sp).is_zero() {
            return false;
        }
    }
    let nm1 = n - 1u32;
    let mut d = nm1.clone();
    let mut s = 0;
    while d.is_even() {
        d /= 2u32;
        s += 1;
    }
    'witness: for a in [2u32, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37] {
        let mut x = BigInt::from(a).modpow(&d, n);
        if x.is_one() || x == nm1 {
            continue;
        }
        for _ in 1..s {
            x = x.modpow(&two, n);
            if x == nm1 {
                continue 'witness;
            }
        }
        return false;
    }
    true
}

fn pollard_rho(n: &BigInt) -> Option<BigInt> {
    for c in 1u32..40 {
        let f = |x: &BigInt| (x * x + c) % n;
        let (mut x, mut y) = (BigInt::from(2), BigInt::from(2));
        loop {
            x = f(&x);
            y = f(&f(&y));
            let d = (&x - &y).abs().gcd(n);
            if d.is_one() {
                continue;
            }
            if &d != n {
                return Some(d);
            }
            break;
        }
    }
    None
}

/// Prime factorization of |n| (n nonzero), ascending.
pub fn factor_integer(n: &BigInt) -> Vec<(BigInt, u32)> {
    let mut n = n.abs();
    let mut out: Vec<(BigInt, u32)> = Vec::new();
    let push = |p: BigInt, e: u32, out: &mut Vec<(BigInt, u32)>| {
        if let Some(entry) = out.iter_mut().find(|(q, _)| *q == p) {
            entry.1 += e;
        } else {
            out.push((p, e));
        }
    };
    let mut k = 2u64;
    while k < 10_000 && BigInt::from(k * k) <= n {
        let kb = BigInt::from(k);
        let mut e = 0;
        while (&n % &kb).is_zero() {
            n /= &kb;
            e += 1;
        }
        if e > 0 {
            push(kb, e, &mut out);
        }
        k += if k == 2 { 1 } else { 2 };
    }
    let mut stack = vec![n];
    while let Some(m) = stack.pop() {
        if m.is_one() {
            continue;
        }
        if is_probable_prime(&m) {
            push(m, 1, &mut out);
            continue;
        }
        match pollard_rho(&m) {
            Some(d) => {
                let other = &m / &d;
                stack.push(d);
                stack.push(other);
            }
            None => push(m, 1, &mut out),
        }
    }
    out.sort();
    out
}

fn squarefree_part(n: &BigInt) -> (BigInt, BigInt) {
    // n = d k^2 with d squarefree, sign carried by d
    let mut d = if n.is_negative() { -BigInt::one() } else { BigInt::one() };
    let mut k = BigInt::one();
    for (p, e) in factor_integer(n) {
        if e % 2 == 1 {
            d *= &p;
        }
        k *= p.pow(e / 2);
    }
    (d, k)
}

/// The maximal order Z[omega] of an imaginary quadratic field, with the data
/// needed to compute element valuations.
#[derive(Clone, Debug)]
pub struct QuadraticOrder {
    field: Arc<NumberField>,
    /// Squarefree negative integer with F = Q(sqrt(d)).
    d: BigInt,
    sqrt_d: FieldElement,
    omega: FieldElement,
    trace: BigInt,
    norm: BigInt,
}

impl QuadraticOrder {
    pub fn new(field: &Arc<NumberField>) -> Option<QuadraticOrder> {
        if field.degree() != 2 {
            return None;
        }
        let b = field.minpoly().coeff(1);
        let c = field.minpoly().coeff(0);
        let disc = &b * &b - c * BigRational::from_integer(4.into());
        if !disc.is_negative() {
            return None;
        }
        // disc = num/den = num·den / den^2
        let scaled = disc.numer() * disc.denom();
        let (d, k) = squarefree_part(&scaled);
        // sqrt(disc) = 2 theta + b and sqrt(disc) = (k / den) sqrt(d)
        let theta = FieldElement::generator(field);
        let two_theta_b = &theta.scale(&BigRational::from_integer(2.into()))
            + &FieldElement::from_rational(field, b);
        let sqrt_d = two_theta_b.scale(&BigRational::new(disc.denom().clone(), k));
        let one = FieldElement::one(field);
        let (omega, trace, norm) = if d.mod_floor(&BigInt::from(4)) == BigInt::one() {
            let w = (&one + &sqrt_d).scale(&BigRational::new(1.into(), 2.into()));
            (w, BigInt::one(), (BigInt::one() - &d) / 4)
        } else {
            (sqrt_d.clone(), BigInt::zero(), -d.clone())
        };
        Some(QuadraticOrder {
            field: field.clone(),
            d,
            sqrt_d,
            omega,
            trace,
            norm,
        })
    }

    pub fn field(&self) -> &Arc<NumberField> {
        &self.field
    }

    pub fn d(&self) -> &BigInt {
        &self.d
    }

    pub fn sqrt_d(&self) -> &FieldElement {
        &self.sqrt_d
    }

    pub fn omega(&self) -> &FieldElement {
        &self.omega
    }

    /// Discriminant of the maximal order.
    pub fn discriminant(&self) -> BigInt {
        if self.trace.is_one() {
            self.d.clone()
        } else {
            &self.d * 4
        }
    }

    /// Order of the group of roots of unity.
    pub fn roots_of_unity_order(&self) -> u32 {
        match self.d.to_i64() {
            Some(-1) => 4,
            Some(-3) => 6,
            _ => 2,
        }
    }

    /// Coordinates (x, y) with a = x + y·omega.
    pub fn coords(&self, a: &FieldElement) -> (BigRational, BigRational) {
        // a = u + v·theta; omega = w0 + w1·theta with w1 != 0
        let w = self.omega.coeffs();
        let y = &a.coeffs()[1] / &w[1];
        let x = &a.coeffs()[0] - &y * &w[0];
        (x, y)
    }

    pub fn element(&self, x: &BigInt, y: &BigInt) -> FieldElement {
        let xe = FieldElement::from_rational(&self.field, BigRational::from_integer(x.clone()));
        &xe + &self.omega.scale(&BigRational::from_integer(y.clone()))
    }

    /// N(x + y·omega) = x^2 + tr·x·y + N·y^2.
    pub fn norm_xy(&self, x: &BigInt, y: &BigInt) -> BigInt {
        x * x + &self.trace * x * y + &self.norm * y * y
    }

    pub fn norm(&self, a: &FieldElement) -> BigRational {
        a.abs_sqr().as_rational().expect("norm is rational")
    }

    fn residue_roots(&self, p: &BigInt) -> Vec<BigInt> {
        // roots of x^2 - tr x + N mod p
        let f = |r: &BigInt| (r * r - &self.trace * r + &self.norm).mod_floor(p).is_zero();
        if *p < BigInt::from(200_000) {
            let mut out = Vec::new();
            let mut r = BigInt::zero();
            while &r < p {
                if f(&r) {
                    out.push(r.clone());
                }
                r += 1;
            }
            return out;
        }
        let delta = self.discriminant().mod_floor(p);
        let Some(s) = sqrt_mod(&delta, p) else {
            return Vec::new();
        };
        let inv2 = (p + 1u32) / 2u32;
        let mut out = vec![
            ((&self.trace + &s) * &inv2).mod_floor(p),
            ((&self.trace - &s) * &inv2).mod_floor(p),
        ];
        out.sort();
        out.dedup();
        out
    }

    /// The prime ideals above a rational prime p.
    pub fn primes_above(&self, p: &BigInt) -> Vec<PrimeIdealLabel> {
        if (self.discriminant() % p).is_zero() {
            return vec![PrimeIdealLabel {
                p: p.clone(),
                kind: PrimeKind::Ramified,
            }];
        }
        let roots = self.residue_roots(p);
        if roots.is_empty() {
            return vec![PrimeIdealLabel {
                p: p.clone(),
                kind: PrimeKind::Inert,
            }];
        }
        roots
            .into_iter()
            .map(|root| PrimeIdealLabel {
                p: p.clone(),
                kind: PrimeKind::Split { root },
            })
            .collect()
    }

    /// Rational primes dividing the norm of a nonzero element.
    pub fn support_primes(&self, a: &FieldElement) -> Vec<BigInt> {
        let n = self.norm(a);
        let mut ps: Vec<BigInt> = factor_integer(n.numer())
            .into_iter()
            .chain(factor_integer(n.denom()))
            .map(|(p, _)| p)
            .collect();
        ps.sort();
        ps.dedup();
        ps
    }

    pub fn valuation(&self, a: &FieldElement, prime: &PrimeIdealLabel) -> Result<i64> {
        if a.is_zero() {
            return Err(Error::ZeroElement);
        }
        let p = &prime.p;
        match &prime.kind {
            PrimeKind::Rational => Err(Error::Invalid("rational prime label in a quadratic field".into())),
            PrimeKind::Ramified => Ok(vp_rational(&self.norm(a), p)),
            PrimeKind::Inert => Ok(vp_rational(&self.norm(a), p) / 2),
            PrimeKind::Split { root } => {
                let (x, y) = self.coords(a);
                let den = x.denom().lcm(y.denom());
                let xi = (&x * BigRational::from_integer(den.clone())).to_integer();
                let yi = (&y * BigRational::from_integer(den.clone())).to_integer();
                let k = if xi.is_zero() {
                    vp_int(&yi, p)
                } else if yi.is_zero() {
                    vp_int(&xi, p)
                } else {
                    vp_int(&xi, p).min(vp_int(&yi, p))
                };
                let pk = p.pow(k as u32);
                let (xr, yr) = (&xi / &pk, &yi / &pk);
                let extra = if (&xr + &yr * root).mod_floor(p).is_zero() {
                    vp_int(&self.norm_xy(&xr, &yr), p)
                } else {
                    0
                };
                Ok(k + extra - vp_int(&den, p))
            }
        }
    }

    /// Class number, by counting reduced binary quadratic forms.
    pub fn class_number(&self) -> u64 {
        let disc = self.discriminant().to_i64().expect("small discriminant");
        let mut h = 0;
        let mut a: i64 = 1;
        while 3 * a * a <= -disc {
            for b in -a + 1..=a {
                let num = b * b - disc;
                if num % (4 * a) != 0 {
                    continue;
                }
                let c = num / (4 * a);
                if c < a {
                    continue;
                }
                if c == a && b < 0 {
                    continue;
                }
                h += 1;
            }
            a += 1;
        }
        h
    }
}

/// Square root of a modulo an odd prime p (Tonelli-Shanks).
fn sqrt_mod(a: &BigInt, p: &BigInt) -> Option<BigInt> {
    let a = a.mod_floor(p);
    if a.is_zero() {
        return Some(a);
    }
    let one = BigInt::one();
    let pm1 = p - 1u32;
    if a.modpow(&(&pm1 / 2u32), p) != one {
        return None;
    }
    let mut q = pm1.clone();
    let mut s = 0u32;
    while q.is_even() {
        q /= 2u32;
        s += 1;
    }
    let mut z = BigInt::from(2);
    while z.modpow(&(&pm1 / 2u32), p) == one {
        z += 1u32;
    }
    let mut m = s;
    let mut c = z.modpow(&q, p);
    let mut t = a.modpow(&q, p);
    let mut r = a.modpow(&((&q + 1u32) / 2u32), p);
    while !t.is_one() {
        let mut i = 0u32;
        let mut tt = t.clone();
        while !tt.is_one() {
            tt = (&tt * &tt) % p;
            i += 1;
        }
        let b = c.modpow(&BigInt::from(1u64 << (m - i - 1)), p);
        m = i;
        c = (&b * &b) % p;
        t = (&t * &c) % p;
        r = (&r * &b) % p;
    }
    Some(r)
}

/// Valuations of a nonzero element at the listed primes. Supported over Q
/// (labels of kind `Rational`) and imaginary quadratic fields.
pub fn nf_valuations(a: &FieldElement, primes: &[PrimeIdealLabel]) -> Result<Vec<i64>> {
    if a.is_zero() {
        return Err(Error::ZeroElement);
    }
    match a.field().degree() {
        1 => {
            let q = a.as_rational().expect("degree one");
            primes
                .iter()
                .map(|pr| match pr.kind {
                    PrimeKind::Rational => Ok(vp_rational(&q, &pr.p)),
                    _ => Err(Error::Invalid("non-rational prime label over Q".into())),
                })
                .collect()
        }
        2 => {
            let order = QuadraticOrder::new(a.field()).ok_or(Error::UnsupportedField)?;
            primes.iter().map(|pr| order.valuation(a, pr)).collect()
        }
        _ => Err(Error::UnsupportedField),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numfield::{int, rat};

    #[test]
    fn four_in_q_sqrt_minus_15() {
        let f = NumberField::imaginary_quadratic(int(15)).unwrap();
        let o = QuadraticOrder::new(&f).unwrap();
        assert_eq!(o.d(), &BigInt::from(-15));
        let above2 = o.primes_above(&BigInt::from(2));
        assert_eq!(above2.len(), 2);
        let four = FieldElement::from_int(&f, 4);
        assert_eq!(nf_valuations(&four, &above2).unwrap(), vec![2, 2]);
        let m1 = FieldElement::from_int(&f, -1);
        assert_eq!(nf_valuations(&m1, &above2).unwrap(), vec![0, 0]);
        assert_eq!(o.class_number(), 2);
    }

    #[test]
    fn a01_is_supported_above_two() {
        let f = NumberField::imaginary_quadratic(int(15)).unwrap();
        let o = QuadraticOrder::new(&f).unwrap();
        let a01 = FieldElement::new(&f, vec![rat(-1, 8), rat(1, 8)]).unwrap();
        assert_eq!(o.support_primes(&a01), vec![BigInt::from(2)]);
        let v = nf_valuations(&a01, &o.primes_above(&BigInt::from(2))).unwrap();
        // N(A01) = 16/64 = 1/4, so the valuations sum to -2
        assert_eq!(v.iter().sum::<i64>(), -2);
    }

    #[test]
    fn rational_valuation() {
        let q = NumberField::rationals();
        let h = FieldElement::from_rational(&q, rat(1, 2));
        assert_eq!(nf_valuations(&h, &[PrimeIdealLabel::rational(2)]).unwrap(), vec![-1]);
    }

    #[test]
    fn class_numbers() {
        for (n, h) in [(1, 1), (3, 1), (7, 1), (5, 2), (23, 3), (15, 2), (95, 8)] {
            let f = NumberField::imaginary_quadratic(int(n)).unwrap();
            assert_eq!(QuadraticOrder::new(&f).unwrap().class_number(), h, "d = -{n}");
        }
    }

    #[test]
    fn factorization_and_sqrt_mod() {
        let n = BigInt::from(2u64 * 2 * 3 * 1_000_003 * 1_000_033);
        let f = factor_integer(&n);
        assert_eq!(f.len(), 4);
        assert_eq!(f[0], (BigInt::from(2), 2));
        let p = BigInt::from(1_000_003);
        let r = sqrt_mod(&BigInt::from(5), &p);
        if let Some(r) = r {
            assert_eq!((&r * &r).mod_floor(&p), BigInt::from(5));
        }
    }
}
