//! The Bloch-Wigner dilogarithm D(z) = Im Li2(z) + arg(1 - z) log|z| with
//! certified error bounds.
//!
//! An exact complex rational is first moved by the six-element symmetry
//! group of D to the orbit point of smallest modulus, which has |z| <= 1 and
//! Re z <= 1/2. There Li2 is summed from the Bernoulli expansion
//! Li2(z) = sum B_n w^(n+1) / (n+1)!, w = -log(1 - z), which converges for
//! |w| < 2π; in the reduced region |w| < 1.3, so each even term gains more
//! than four bits.

use std::sync::OnceLock;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, ToPrimitive, Zero};

use crate::ball::{atan_rational, ln_rational, ComplexBall, RealBall};
use crate::crgeom::{minus_exp_2ia, ConfigFour};
use crate::error::{Error, Result};
use crate::numfield::FieldElement;
use crate::prebloch::PreBlochElement;

const GUARD_BITS: u32 = 40;
const MIN_PREC: u32 = 32;

/// b_n = B_n / n! for n up to the cached bound.
fn bernoulli_over_factorial(count: usize) -> Vec<BigRational> {
    // sum_{j=0}^{n} b_j / (n + 1 - j)! = 0 for n >= 1, b_0 = 1
    let mut inv_fact = vec![BigRational::one()];
    for k in 1..=count + 1 {
        let prev = inv_fact[k - 1].clone();
        inv_fact.push(prev / BigRational::from_integer(BigInt::from(k)));
    }
    let mut b = vec![BigRational::one()];
    for n in 1..count {
        if n > 1 && n % 2 == 1 {
            b.push(BigRational::zero());
            continue;
        }
        let mut s = BigRational::zero();
        for (j, bj) in b.iter().enumerate() {
            if !bj.is_zero() {
                s += bj * &inv_fact[n + 1 - j];
            }
        }
        b.push(-s);
    }
    b
}

fn bernoulli_table(count: usize) -> std::borrow::Cow<'static, [BigRational]> {
    static SMALL: OnceLock<Vec<BigRational>> = OnceLock::new();
    static LARGE: OnceLock<Vec<BigRational>> = OnceLock::new();
    if count <= 112 {
        std::borrow::Cow::Borrowed(&SMALL.get_or_init(|| bernoulli_over_factorial(112))[..count])
    } else if count <= 260 {
        std::borrow::Cow::Borrowed(&LARGE.get_or_init(|| bernoulli_over_factorial(260))[..count])
    } else {
        std::borrow::Cow::Owned(bernoulli_over_factorial(count))
    }
}

#[derive(Clone, Debug)]
struct CRat {
    re: BigRational,
    im: BigRational,
}

impl CRat {
    fn norm(&self) -> BigRational {
        &self.re * &self.re + &self.im * &self.im
    }
    fn one_minus(&self) -> CRat {
        CRat {
            re: BigRational::one() - &self.re,
            im: -self.im.clone(),
        }
    }
    fn inv(&self) -> CRat {
        let n = self.norm();
        CRat {
            re: &self.re / &n,
            im: -&self.im / &n,
        }
    }
}

/// The orbit of z under the symmetries of D, with the sign D picks up.
fn orbit(z: &CRat) -> [(CRat, i32); 6] {
    let inv = z.inv();
    let om = z.one_minus();
    let om_inv = om.inv();
    [
        (z.clone(), 1),
        (inv.one_minus(), 1),
        (om_inv.clone(), 1),
        (inv, -1),
        (om, -1),
        (om_inv.one_minus(), -1),
    ]
}

/// D at an exact complex rational point; the result encloses the true value.
pub fn bw_d_exact(re: &BigRational, im: &BigRational, prec: u32) -> Result<RealBall> {
    if prec < MIN_PREC {
        return Err(Error::PrecisionExhausted(format!(
            "{prec} bits requested, at least {MIN_PREC} required"
        )));
    }
    if im.is_zero() {
        return Ok(RealBall::zero(prec));
    }
    let z = CRat {
        re: re.clone(),
        im: im.clone(),
    };
    let (w, sign) = orbit(&z)
        .into_iter()
        .min_by(|a, b| a.0.norm().cmp(&b.0.norm()))
        .expect("orbit is nonempty");
    let work = prec + GUARD_BITS;
    let d = d_reduced(&w, work)?;
    let d = if sign < 0 { d.neg() } else { d };
    Ok(d.to_prec(prec))
}

/// D for |z| <= 1, Re z <= 1/2, Im z != 0.
fn d_reduced(z: &CRat, prec: u32) -> Result<RealBall> {
    let om = z.one_minus();
    // log(1 - z) = log|1 - z| + i arg(1 - z), Re(1 - z) >= 1/2
    let ln_abs_om = ln_rational(&om.norm(), prec)?;
    let ln_abs_om = RealBall::from_parts_div2(&ln_abs_om);
    let arg_om = atan_rational(&(&om.im / &om.re), prec);
    let w = ComplexBall::new(ln_abs_om.neg(), arg_om.neg());
    let li2 = li2_bernoulli(&w, prec)?;
    let ln_abs_z = RealBall::from_parts_div2(&ln_rational(&z.norm(), prec)?);
    Ok(li2.im.add(&arg_om.mul(&ln_abs_z)))
}

/// Li2 from w = -log(1 - z), |w| <= 1.3.
fn li2_bernoulli(w: &ComplexBall, prec: u32) -> Result<ComplexBall> {
    let wabs = w.re.mid_f64().hypot(w.im.mid_f64()) + w.rad_f64() * 2.0;
    let q = wabs * wabs / (4.0 * std::f64::consts::PI * std::f64::consts::PI);
    if q >= 0.25 {
        return Err(Error::PrecisionExhausted("dilogarithm argument too far from the reduced region".into()));
    }
    // terms needed: 4|w| q^K / (1 - q) < 2^-(prec+2)
    let bits_per_term = -q.log2();
    let k_max = ((prec as f64 + 8.0 + (4.0 * wabs.max(1.0)).log2()) / bits_per_term).ceil() as usize + 1;
    let table = bernoulli_table(2 * k_max + 2);
    let w2 = w.mul(w);
    let mut sum = w.sub(&w2.scale(&RealBall::from_rational(&BigRational::new(1.into(), 4.into()), prec)));
    let mut power = w.clone(); // w^(2k+1)
    for k in 1..=k_max {
        power = power.mul(&w2);
        let coeff = &table[2 * k] / BigRational::from_integer(BigInt::from(2 * k + 1));
        sum = sum.add(&power.scale(&RealBall::from_rational(&coeff, prec)));
    }
    // tail: sum_{k > k_max} 4|w| q^k <= 4|w| q^(k_max+1) / (1 - q)
    let tail = 4.0 * wabs * q.powi(k_max as i32 + 1) / (1.0 - q);
    let tail = BigRational::from_float(tail * 2.0 + f64::MIN_POSITIVE).unwrap_or_else(BigRational::one);
    Ok(ComplexBall::new(sum.re.widen(&tail), sum.im.widen(&tail)))
}

/// Upper bound on |grad D| over the disc of radius r around (x, y):
/// |log|z|| / |1 - z| + |log|1 - z|| / |z|.
fn lipschitz_bound(x: f64, y: f64, r: f64) -> Option<f64> {
    let az = x.hypot(y);
    let a1 = (1.0 - x).hypot(y);
    let (lz, l1) = (az - r, a1 - r);
    if lz <= 0.0 || l1 <= 0.0 {
        return None;
    }
    let (uz, u1) = (az + r, a1 + r);
    let max_log = |lo: f64, hi: f64| lo.ln().abs().max(hi.ln().abs());
    Some((max_log(lz, uz) / l1 + max_log(l1, u1) / lz) * 1.01 + 1e-300)
}

/// D on a complex ball: D at the exact midpoint, widened by a Lipschitz
/// bound times the ball radius.
pub fn bw_d(z: &ComplexBall, prec: u32) -> Result<RealBall> {
    if prec < MIN_PREC {
        return Err(Error::PrecisionExhausted(format!(
            "{prec} bits requested, at least {MIN_PREC} required"
        )));
    }
    let (x, y) = (z.re.mid_rational(), z.im.mid_rational());
    if z.is_exact() {
        return bw_d_exact(&x, &y, prec);
    }
    let r = z.re.rad_f64().max(z.im.rad_f64()) * std::f64::consts::SQRT_2;
    let Some(lip) = lipschitz_bound(x.to_f64().unwrap_or(f64::NAN), y.to_f64().unwrap_or(f64::NAN), r) else {
        return Err(Error::PrecisionExhausted("ball meets 0 or 1".into()));
    };
    let base = bw_d_exact(&x, &y, prec)?;
    let widen = BigRational::from_float(lip * r).ok_or_else(|| Error::PrecisionExhausted("non-finite bound".into()))?;
    Ok(base.widen(&widen))
}

/// D of the embedded value of a field element. Elements fixed by sigma are
/// real under the embedding, so D vanishes exactly.
pub fn d_field_element(a: &FieldElement, prec: u32) -> Result<RealBall> {
    if prec < MIN_PREC {
        return Err(Error::PrecisionExhausted(format!(
            "{prec} bits requested, at least {MIN_PREC} required"
        )));
    }
    if a.is_sigma_fixed() {
        return Ok(RealBall::zero(prec));
    }
    let b = a.embed(prec + GUARD_BITS)?;
    Ok(bw_d(&b, prec + GUARD_BITS)?.to_prec(prec))
}

/// D extended linearly to P(F); c_F contributes D(x) + D(1 - x) = 0.
pub fn d_of_element(e: &PreBlochElement, prec: u32) -> Result<RealBall> {
    if prec < MIN_PREC {
        return Err(Error::PrecisionExhausted(format!(
            "{prec} bits requested, at least {MIN_PREC} required"
        )));
    }
    let mut acc = RealBall::zero(prec + GUARD_BITS);
    for (z, n) in e.terms() {
        let d = d_field_element(z, prec + GUARD_BITS)?;
        acc = acc.add(&d.mul_int(n));
    }
    Ok(acc.to_prec(prec))
}

/// D(e) at every complex embedding of the field, in root order. The
/// designated embedding uses the exact route of `d_of_element`.
pub fn d_per_embedding(e: &PreBlochElement, prec: u32) -> Result<Vec<RealBall>> {
    if prec < MIN_PREC {
        return Err(Error::PrecisionExhausted(format!(
            "{prec} bits requested, at least {MIN_PREC} required"
        )));
    }
    let field = e.field();
    let work = prec + GUARD_BITS;
    let mut out = Vec::with_capacity(field.degree());
    for (k, disc) in field.root_discs().iter().enumerate() {
        if k == field.embedding_index() {
            out.push(d_of_element(e, prec)?);
            continue;
        }
        let root = ComplexBall::new(
            RealBall::from_rational(&disc.re, work).widen(&disc.radius),
            RealBall::from_rational(&disc.im, work).widen(&disc.radius),
        );
        let mut acc = RealBall::zero(work);
        for (z, n) in e.terms() {
            let d = match z.as_rational() {
                Some(_) => RealBall::zero(work),
                None => bw_d(&z.embed_at(&root), work)?,
            };
            acc = acc.add(&d.mul_int(n));
        }
        out.push(acc.to_prec(prec));
    }
    Ok(out)
}

/// 2 D(beta(config)) minus the sum of D(-e^{2iA}) over the faces (1,2,3),
/// (0,3,2), (0,1,3), (0,2,1); the enclosure must contain 0.
pub fn face_d_identity(c: &ConfigFour, prec: u32) -> Result<RealBall> {
    let q = c.cross_ratios()?;
    let mut lhs = RealBall::zero(prec);
    for z in q.to_array() {
        lhs = lhs.add(&d_field_element(&z, prec)?);
    }
    lhs = lhs.mul_int(2);
    let mut rhs = RealBall::zero(prec);
    for [i, j, k] in [[1, 2, 3], [0, 3, 2], [0, 1, 3], [0, 2, 1]] {
        let e = minus_exp_2ia(&c.tangent(i, j, k)?)?;
        rhs = rhs.add(&d_field_element(&e, prec)?);
    }
    Ok(lhs.sub(&rhs))
}

impl RealBall {
    /// x / 2, keeping the enclosure.
    fn from_parts_div2(x: &RealBall) -> RealBall {
        x.mul(&RealBall::from_rational(&BigRational::new(1.into(), 2.into()), x.prec()))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numfield::rat;

    /// Oracle: Im Li2 by the plain power series, valid for |z| < 1/2.
    fn d_taylor(x: f64, y: f64) -> f64 {
        let (mut pr, mut pi) = (x, y);
        let mut im = 0.0;
        for k in 1..200 {
            im += pi / (k * k) as f64;
            let nr = pr * x - pi * y;
            let ni = pr * y + pi * x;
            pr = nr;
            pi = ni;
        }
        let arg = (-y).atan2(1.0 - x);
        im + arg * x.hypot(y).ln()
    }

    #[test]
    fn gieseking_value() {
        let f = crate::numfield::NumberField::imaginary_quadratic(crate::numfield::int(3)).unwrap();
        let zeta = FieldElement::new(&f, vec![rat(1, 2), rat(1, 2)]).unwrap();
        let d = d_field_element(&zeta, 256).unwrap();
        let reference: BigRational = BigRational::new(
            "101494160640965362502120255427452028594168930753".parse().unwrap(),
            BigInt::from(10).pow(47),
        );
        assert!(d.overlaps(&RealBall::from_rational(&reference, 256).widen(&BigRational::new(1.into(), BigInt::from(10).pow(46)))));
        assert!(d.rad_f64() < 1e-60);
    }

    #[test]
    fn gieseking_value_from_float_input() {
        // D(e^{iπ/3}) = 1.01494160640965362502120255427452028594168930753...
        let d = bw_d_exact(&rat(1, 2), &BigRational::from_float(0.75f64.sqrt()).unwrap(), 128).unwrap();
        // the input is only an f64 approximation of sqrt(3)/2; compare loosely
        assert!((d.mid_f64() - 1.0149416064096536).abs() < 1e-14);
    }

    #[test]
    fn matches_taylor_oracle_in_small_disc() {
        for (x, y) in [(0.1, 0.2), (-0.3, 0.25), (0.2, -0.4), (-0.05, 0.45)] {
            let d = bw_d_exact(&BigRational::from_float(x).unwrap(), &BigRational::from_float(y).unwrap(), 128).unwrap();
            assert!((d.mid_f64() - d_taylor(x, y)).abs() < 1e-13, "{x} {y}");
            assert!(d.rad_f64() < 1e-35);
        }
    }

    #[test]
    fn symmetries() {
        let (x, y) = (rat(7, 3), rat(-5, 4));
        let d = bw_d_exact(&x, &y, 128).unwrap();
        let dc = bw_d_exact(&x, &-y.clone(), 128).unwrap();
        assert!(d.add(&dc).contains_zero());
        let n = &x * &x + &y * &y;
        let inv = bw_d_exact(&(&x / &n), &(-&y / &n), 128).unwrap();
        assert!(d.add(&inv).contains_zero());
        let om = bw_d_exact(&(BigRational::one() - &x), &-y.clone(), 128).unwrap();
        assert!(d.add(&om).contains_zero());
        assert!(d.rad_f64() < 1e-30);
    }

    #[test]
    fn real_axis_is_zero_and_low_precision_fails() {
        assert!(bw_d_exact(&rat(1, 2), &rat(0, 1), 64).unwrap().is_exact());
        assert!(bw_d_exact(&rat(1, 2), &rat(1, 3), 8).is_err());
    }

    #[test]
    fn precision_monotone() {
        let a = bw_d_exact(&rat(2, 3), &rat(9, 7), 64).unwrap();
        let b = bw_d_exact(&rat(2, 3), &rat(9, 7), 128).unwrap();
        assert!(b.rad_f64() <= a.rad_f64());
        assert!(a.overlaps(&b.to_prec(64)));
    }
}

#[cfg(test)]
mod embedding_tests {
    use super::*;
    use crate::numfield::{int, NumberField};

    #[test]
    fn conjugate_embedding_flips_sign() {
        let f = NumberField::imaginary_quadratic(int(7)).unwrap();
        let z = FieldElement::new(&f, vec![int(1), crate::numfield::rat(1, 3)]).unwrap();
        let e = PreBlochElement::symbol(&z).unwrap();
        let ds = d_per_embedding(&e, 128).unwrap();
        assert_eq!(ds.len(), 2);
        assert!(ds[0].add(&ds[1]).contains_zero());
        assert!(!ds[0].contains_zero());
        assert!(matches!(d_of_element(&e, 8), Err(Error::PrecisionExhausted(_))));
    }
}
