//! Certified isolation of the complex roots of a squarefree rational
//! polynomial.
//!
//! Approximations come from Durand-Kerner in f64, are polished by Newton
//! steps in exact dyadic arithmetic, and are then certified: a disc of
//! radius `n |p(x) / p'(x)|` around `x` always contains a root, so `n`
//! pairwise disjoint such discs isolate all `n` roots.

use std::cmp::Ordering;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use super::poly::QPoly;
use crate::error::{Error, Result};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RootDisc {
    pub re: BigRational,
    pub im: BigRational,
    /// Upper bound on the distance from (re, im) to the root.
    pub radius: BigRational,
}

#[derive(Clone, Copy, Debug)]
struct C64 {
    re: f64,
    im: f64,
}

impl C64 {
    fn mul(self, o: C64) -> C64 {
        C64 {
            re: self.re * o.re - self.im * o.im,
            im: self.re * o.im + self.im * o.re,
        }
    }
    fn sub(self, o: C64) -> C64 {
        C64 {
            re: self.re - o.re,
            im: self.im - o.im,
        }
    }
    fn add(self, o: C64) -> C64 {
        C64 {
            re: self.re + o.re,
            im: self.im + o.im,
        }
    }
    fn div(self, o: C64) -> C64 {
        let n = o.re * o.re + o.im * o.im;
        C64 {
            re: (self.re * o.re + self.im * o.im) / n,
            im: (self.im * o.re - self.re * o.im) / n,
        }
    }
    fn abs(self) -> f64 {
        self.re.hypot(self.im)
    }
}

fn rat_f64(q: &BigRational) -> f64 {
    q.to_f64().unwrap_or(0.0)
}

fn durand_kerner(monic: &[f64]) -> Vec<C64> {
    let n = monic.len() - 1;
    let eval = |x: C64| {
        let mut acc = C64 { re: 0.0, im: 0.0 };
        for &c in monic.iter().rev() {
            acc = acc.mul(x).add(C64 { re: c, im: 0.0 });
        }
        acc
    };
    let bound = 1.0 + monic[..n].iter().fold(0.0f64, |m, c| m.max(c.abs()));
    let seed = C64 { re: 0.4, im: 0.9 };
    let mut z: Vec<C64> = Vec::with_capacity(n);
    let mut w = C64 {
        re: bound.min(2.0).max(0.5),
        im: 0.0,
    };
    for _ in 0..n {
        z.push(w);
        w = w.mul(seed);
    }
    for _ in 0..2000 {
        let mut delta = 0.0f64;
        for i in 0..n {
            let mut den = C64 { re: 1.0, im: 0.0 };
            for j in 0..n {
                if i != j {
                    den = den.mul(z[i].sub(z[j]));
                }
            }
            let step = eval(z[i]).div(den);
            if step.re.is_finite() && step.im.is_finite() {
                z[i] = z[i].sub(step);
                delta = delta.max(step.abs());
            }
        }
        if delta < 1e-15 {
            break;
        }
    }
    z
}

fn round_dyadic(q: &BigRational, bits: u32) -> BigRational {
    let scale = BigInt::one() << bits as usize;
    let n = (q * BigRational::from_integer(scale.clone())).round().to_integer();
    BigRational::new(n, scale)
}

fn from_f64(x: f64) -> BigRational {
    BigRational::from_float(x).unwrap_or_else(BigRational::zero)
}

/// Evaluates a polynomial at re + i·im exactly.
pub fn eval_complex(p: &QPoly, re: &BigRational, im: &BigRational) -> (BigRational, BigRational) {
    let mut ar = BigRational::zero();
    let mut ai = BigRational::zero();
    for c in p.coeffs().iter().rev() {
        let nr = &ar * re - &ai * im + c;
        let ni = &ar * im + &ai * re;
        ar = nr;
        ai = ni;
    }
    (ar, ai)
}

/// Smallest dyadic with denominator 2^bits that is >= sqrt(q).
fn sqrt_upper(q: &BigRational, bits: u32) -> BigRational {
    let scale = BigInt::one() << (2 * bits) as usize;
    let scaled = (q * BigRational::from_integer(scale)).ceil().to_integer();
    let r = scaled.sqrt();
    let r = if &r * &r < scaled { r + 1 } else { r };
    BigRational::new(r, BigInt::one() << bits as usize)
}

fn newton_polish(
    p: &QPoly,
    dp: &QPoly,
    mut re: BigRational,
    mut im: BigRational,
    bits: u32,
) -> Option<(BigRational, BigRational, BigRational)> {
    let n = p.degree().unwrap_or(0) as i64;
    let mut iterations = 0;
    let mut correct = 50u32;
    loop {
        let (pr, pi) = eval_complex(p, &re, &im);
        let (dr, di) = eval_complex(dp, &re, &im);
        let dn = &dr * &dr + &di * &di;
        if dn.is_zero() {
            return None;
        }
        // step = p / p'
        let sr = (&pr * &dr + &pi * &di) / &dn;
        let si = (&pi * &dr - &pr * &di) / &dn;
        if correct >= bits + 8 || iterations > 40 {
            let r2 = (&sr * &sr + &si * &si) * BigRational::from_integer(BigInt::from(n * n));
            return Some((re, im, sqrt_upper(&r2, bits + 8)));
        }
        let w = (2 * correct + 8).min(bits + 16);
        re = round_dyadic(&(&re - &sr), w);
        im = round_dyadic(&(&im - &si), w);
        correct = (2 * correct).min(bits + 8);
        iterations += 1;
    }
}

fn discs_overlap(a: &RootDisc, b: &RootDisc) -> bool {
    let dr = &a.re - &b.re;
    let di = &a.im - &b.im;
    let rs = &a.radius + &b.radius;
    &dr * &dr + &di * &di <= &rs * &rs
}

fn conj(d: &RootDisc) -> RootDisc {
    RootDisc {
        re: d.re.clone(),
        im: -d.im.clone(),
        radius: d.radius.clone(),
    }
}

/// Isolates all complex roots of a squarefree polynomial, ordered by
/// imaginary part descending and then real part ascending. Real roots are
/// reported with an imaginary part of exactly zero.
pub fn isolate_roots(p: &QPoly, bits: u32) -> Result<Vec<RootDisc>> {
    let n = p.degree().ok_or_else(|| Error::InvalidField("zero polynomial".into()))?;
    if n == 0 {
        return Ok(Vec::new());
    }
    let monic = p.monic();
    if n == 1 {
        return Ok(vec![RootDisc {
            re: -monic.coeff(0),
            im: BigRational::zero(),
            radius: BigRational::zero(),
        }]);
    }
    let dp = monic.derivative();
    let approx = durand_kerner(&monic.coeffs().iter().map(rat_f64).collect::<Vec<_>>());
    let mut discs: Vec<RootDisc> = Vec::with_capacity(n);
    for a in approx {
        let (re, im, radius) = newton_polish(&monic, &dp, from_f64(a.re), from_f64(a.im), bits)
            .ok_or_else(|| Error::InvalidField("root isolation hit a critical point".into()))?;
        discs.push(RootDisc { re, im, radius });
    }
    for i in 0..n {
        for j in i + 1..n {
            if discs_overlap(&discs[i], &discs[j]) {
                return Err(Error::InvalidField(
                    "could not separate the roots of the minimal polynomial".into(),
                ));
            }
        }
    }
    // A disc meeting its own mirror image, and no other disc's, holds a real
    // root: the conjugate root lies in the mirror disc and must be the same one.
    for i in 0..n {
        let m = conj(&discs[i]);
        let hits: Vec<usize> = (0..n).filter(|&j| discs_overlap(&m, &discs[j])).collect();
        if hits == [i] {
            let shift = discs[i].im.abs();
            discs[i].radius = &discs[i].radius + shift;
            discs[i].im = BigRational::zero();
        }
    }
    discs.sort_by(|a, b| match b.im.cmp(&a.im) {
        Ordering::Equal => a.re.cmp(&b.re),
        o => o,
    });
    Ok(discs)
}
