//! Number fields `Q[x]/(m(x))` with a designated complex embedding and the
//! automorphism that realizes complex conjugation.

pub mod classgroup;
mod modp;
pub mod poly;
pub mod roots;
pub mod valuation;

use std::cmp::Ordering;
use std::fmt;
use std::hash::{Hash, Hasher};
use std::sync::Arc;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use crate::ball::{ComplexBall, RealBall};
use crate::error::{Error, Result};
use poly::QPoly;
use roots::RootDisc;

pub use valuation::{PrimeIdealLabel, PrimeKind, QuadraticOrder};

/// Bits to which embedding roots are isolated once at construction.
const STORED_ROOT_BITS: u32 = 640;
const WITNESS_PRIME_LIMIT: u64 = 10_000;

pub fn rat(n: i64, d: i64) -> BigRational {
    BigRational::new(n.into(), d.into())
}

pub fn int(n: i64) -> BigRational {
    BigRational::from_integer(n.into())
}

#[derive(Debug)]
pub struct NumberField {
    minpoly: QPoly,
    embedding_index: usize,
    sigma_image: Vec<BigRational>,
    /// Column k holds the coordinates of sigma(theta^k).
    sigma_matrix: Vec<Vec<BigRational>>,
    roots: Vec<RootDisc>,
    witness_prime: Option<u64>,
}

impl PartialEq for NumberField {
    fn eq(&self, other: &Self) -> bool {
        self.minpoly == other.minpoly
            && self.embedding_index == other.embedding_index
            && self.sigma_image == other.sigma_image
    }
}

impl Eq for NumberField {}

fn pad(mut v: Vec<BigRational>, d: usize) -> Vec<BigRational> {
    v.resize(d, BigRational::zero());
    v
}

impl NumberField {
    /// Validates and builds a field. `minpoly` is in ascending order and must
    /// be monic; `sigma_image` gives sigma(theta) in the power basis.
    pub fn new(
        minpoly: Vec<BigRational>,
        embedding_index: usize,
        sigma_image: Vec<BigRational>,
    ) -> Result<Arc<NumberField>> {
        let m = QPoly::new(minpoly);
        let d = match m.degree() {
            Some(d) if d >= 1 => d,
            _ => return Err(Error::InvalidField("minimal polynomial must have degree >= 1".into())),
        };
        if !m.lead().is_one() {
            return Err(Error::InvalidField("minimal polynomial must be monic".into()));
        }
        let witness_prime = if d == 1 {
            None
        } else {
            if m.gcd(&m.derivative()).degree() != Some(0) {
                return Err(Error::Reducible("polynomial has a repeated factor".into()));
            }
            if let Some(r) = rational_root(&m) {
                return Err(Error::Reducible(format!("rational root {r}")));
            }
            match modp::irreducibility_witness(&m.primitive_integer(), WITNESS_PRIME_LIMIT) {
                Some(p) => Some(p),
                None => {
                    return Err(Error::Reducible(format!(
                        "no prime below {WITNESS_PRIME_LIMIT} gives an irreducible reduction"
                    )))
                }
            }
        };
        if sigma_image.len() > d {
            return Err(Error::Sigma("sigma image has too many coordinates".into()));
        }
        let roots = roots::isolate_roots(&m, STORED_ROOT_BITS)?;
        if embedding_index >= roots.len() {
            return Err(Error::InvalidField(format!(
                "embedding index {embedding_index} out of range (degree {d})"
            )));
        }
        let sigma_image = pad(sigma_image, d);
        let mut field = NumberField {
            minpoly: m,
            embedding_index,
            sigma_image: sigma_image.clone(),
            sigma_matrix: Vec::new(),
            roots,
            witness_prime,
        };
        // sigma(theta^k) = sigma(theta)^k
        let provisional = Arc::new(NumberField {
            sigma_matrix: vec![],
            ..field.clone_shallow()
        });
        let s = FieldElement::from_coeffs_unchecked(&provisional, sigma_image.clone());
        let mut cols = Vec::with_capacity(d);
        let mut power = FieldElement::one(&provisional);
        for _ in 0..d {
            cols.push(power.coeffs.clone());
            power = &power * &s;
        }
        // minpoly(sigma(theta)) = 0
        let mut acc = FieldElement::zero(&provisional);
        for c in field.minpoly.coeffs().iter().rev() {
            acc = &(&acc * &s) + &FieldElement::from_rational(&provisional, c.clone());
        }
        if !acc.is_zero() {
            return Err(Error::Sigma("minpoly(sigma(theta)) is not zero".into()));
        }
        field.sigma_matrix = cols;
        let field = Arc::new(field);
        let s = FieldElement::from_coeffs_unchecked(&field, sigma_image);
        if s.conj().coeffs != FieldElement::generator(&field).coeffs {
            return Err(Error::Sigma("sigma is not an involution".into()));
        }
        field.check_conjugation_compatible(&s)?;
        Ok(field)
    }

    fn clone_shallow(&self) -> NumberField {
        NumberField {
            minpoly: self.minpoly.clone(),
            embedding_index: self.embedding_index,
            sigma_image: self.sigma_image.clone(),
            sigma_matrix: self.sigma_matrix.clone(),
            roots: self.roots.clone(),
            witness_prime: self.witness_prime,
        }
    }

    /// The embedded value of sigma(theta) must be the complex conjugate of
    /// the embedded generator. The ball for sigma(theta) contains some root;
    /// it is certified to be the conjugate root when it meets only that root's
    /// disc.
    fn check_conjugation_compatible(&self, s: &FieldElement) -> Result<()> {
        let e = &self.roots[self.embedding_index];
        let mirror = RootDisc {
            re: e.re.clone(),
            im: -e.im.clone(),
            radius: e.radius.clone(),
        };
        let near_mirror: Vec<usize> = (0..self.roots.len())
            .filter(|&j| disc_meets(&mirror, &self.roots[j]))
            .collect();
        if near_mirror.len() != 1 {
            return Err(Error::Sigma("conjugate root not isolated".into()));
        }
        let target = near_mirror[0];
        let b = s.embed(STORED_ROOT_BITS - 160)?;
        let hits: Vec<usize> = (0..self.roots.len())
            .filter(|&j| ball_meets_disc(&b, &self.roots[j]))
            .collect();
        if hits != [target] {
            return Err(Error::Sigma(
                "sigma does not act as complex conjugation under the embedding".into(),
            ));
        }
        Ok(())
    }

    /// Q presented as Q[x]/(x).
    pub fn rationals() -> Arc<NumberField> {
        NumberField::new(vec![int(0), int(1)], 0, vec![int(0)]).expect("Q is a valid field")
    }

    /// Q(sqrt(-n)) for a positive integer n that is not a square, presented by
    /// x^2 + n with theta embedded in the upper half plane and sigma(theta) = -theta.
    pub fn imaginary_quadratic(n: BigRational) -> Result<Arc<NumberField>> {
        if !n.is_positive() {
            return Err(Error::InvalidField("expected a positive radicand".into()));
        }
        NumberField::new(vec![n, int(0), int(1)], 0, vec![int(0), int(-1)])
    }

    pub fn degree(&self) -> usize {
        self.minpoly.degree().unwrap_or(0)
    }

    pub fn minpoly(&self) -> &QPoly {
        &self.minpoly
    }

    pub fn embedding_index(&self) -> usize {
        self.embedding_index
    }

    pub fn sigma_image(&self) -> &[BigRational] {
        &self.sigma_image
    }

    pub fn witness_prime(&self) -> Option<u64> {
        self.witness_prime
    }

    /// All complex roots of the minimal polynomial at the stored precision,
    /// in embedding-index order.
    pub fn root_discs(&self) -> &[RootDisc] {
        &self.roots
    }

    /// Enclosure of the embedded generator, with at least `prec` bits.
    pub fn root_ball(&self, prec: u32) -> Result<ComplexBall> {
        let disc = if prec + 40 <= STORED_ROOT_BITS {
            self.roots[self.embedding_index].clone()
        } else {
            roots::isolate_roots(&self.minpoly, prec + 64)?[self.embedding_index].clone()
        };
        let re = RealBall::from_rational(&disc.re, prec).widen(&disc.radius);
        let im = RealBall::from_rational(&disc.im, prec).widen(&disc.radius);
        Ok(ComplexBall::new(re, im))
    }

    /// Whether sigma is the identity (the embedding is real).
    pub fn sigma_is_trivial(&self) -> bool {
        let d = self.degree();
        d == 1 || (self.sigma_image[1].is_one() && self.sigma_image.iter().enumerate().all(|(i, c)| i == 1 || c.is_zero()))
    }

    /// Quadratic order data when the field is imaginary quadratic.
    pub fn quadratic_order(self: &Arc<Self>) -> Option<QuadraticOrder> {
        QuadraticOrder::new(self)
    }

    /// Human name for the generator, e.g. `√-15` for x^2 + 15.
    pub fn generator_name(&self) -> String {
        if self.degree() == 2 && self.minpoly.coeff(1).is_zero() {
            let c = self.minpoly.coeff(0);
            if c.is_integer() {
                let n = c.to_integer();
                return if n.is_positive() {
                    format!("√-{n}")
                } else {
                    format!("√{}", -n)
                };
            }
        }
        "a".into()
    }
}

fn disc_meets(a: &RootDisc, b: &RootDisc) -> bool {
    let dr = &a.re - &b.re;
    let di = &a.im - &b.im;
    let rs = &a.radius + &b.radius;
    &dr * &dr + &di * &di <= &rs * &rs
}

fn ball_meets_disc(b: &ComplexBall, d: &RootDisc) -> bool {
    // Conservative: treat the ball rectangle as a disc of radius rad*sqrt(2).
    let br = b.re.rad_rational() + b.im.rad_rational();
    let dr = b.re.mid_rational() - &d.re;
    let di = b.im.mid_rational() - &d.im;
    let rs = br + &d.radius;
    &dr * &dr + &di * &di <= &rs * &rs
}

/// Rational root search over candidates p/q with p | a0, q | lead, for
/// integer polynomials with small coefficients.
fn rational_root(m: &QPoly) -> Option<BigRational> {
    let ints = m.primitive_integer();
    let a0 = ints[0].abs();
    let an = ints.last().unwrap().abs();
    if a0.is_zero() {
        return Some(BigRational::zero());
    }
    let limit = BigInt::from(1_000_000);
    if a0 > limit || an > limit {
        return None;
    }
    let divisors = |n: &BigInt| -> Vec<BigInt> {
        let mut out = Vec::new();
        let mut k = BigInt::one();
        while &k * &k <= *n {
            if (n % &k).is_zero() {
                out.push(k.clone());
                out.push(n / &k);
            }
            k += 1;
        }
        out
    };
    for p in divisors(&a0) {
        for q in divisors(&an) {
            for s in [1, -1] {
                let r = BigRational::new(&p * s, q.clone());
                if m.eval(&r).is_zero() {
                    return Some(r);
                }
            }
        }
    }
    None
}

/// An element of a number field in power-basis coordinates.
///
/// Equality, ordering and hashing look only at coordinates; elements of
/// different fields should not share a collection.
#[derive(Clone)]
pub struct FieldElement {
    field: Arc<NumberField>,
    coeffs: Vec<BigRational>,
}

impl FieldElement {
    fn from_coeffs_unchecked(field: &Arc<NumberField>, coeffs: Vec<BigRational>) -> Self {
        let d = field.degree();
        FieldElement {
            field: field.clone(),
            coeffs: pad(coeffs, d),
        }
    }

    /// Builds an element from at most `degree` power-basis coordinates.
    pub fn new(field: &Arc<NumberField>, coeffs: Vec<BigRational>) -> Result<Self> {
        if coeffs.len() > field.degree() {
            return Err(Error::Invalid(format!(
                "element has {} coordinates, field degree is {}",
                coeffs.len(),
                field.degree()
            )));
        }
        Ok(Self::from_coeffs_unchecked(field, coeffs))
    }

    pub fn zero(field: &Arc<NumberField>) -> Self {
        Self::from_coeffs_unchecked(field, vec![])
    }

    pub fn one(field: &Arc<NumberField>) -> Self {
        Self::from_rational(field, BigRational::one())
    }

    pub fn from_rational(field: &Arc<NumberField>, q: BigRational) -> Self {
        Self::from_coeffs_unchecked(field, vec![q])
    }

    pub fn from_int(field: &Arc<NumberField>, n: i64) -> Self {
        Self::from_rational(field, int(n))
    }

    /// The class of x (reduced, so that it is correct in degree 1 as well).
    pub fn generator(field: &Arc<NumberField>) -> Self {
        let p = QPoly::x().rem(field.minpoly());
        Self::from_coeffs_unchecked(field, p.coeffs().to_vec())
    }

    pub fn field(&self) -> &Arc<NumberField> {
        &self.field
    }

    pub fn coeffs(&self) -> &[BigRational] {
        &self.coeffs
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(|c| c.is_zero())
    }

    pub fn is_one(&self) -> bool {
        self.coeffs[0].is_one() && self.coeffs[1..].iter().all(|c| c.is_zero())
    }

    /// The rational value when the element lies in Q.
    pub fn as_rational(&self) -> Option<BigRational> {
        if self.coeffs[1..].iter().all(|c| c.is_zero()) {
            Some(self.coeffs[0].clone())
        } else {
            None
        }
    }

    pub fn same_field(&self, other: &FieldElement) -> bool {
        Arc::ptr_eq(&self.field, &other.field) || *self.field == *other.field
    }

    fn as_poly(&self) -> QPoly {
        QPoly::new(self.coeffs.clone())
    }

    fn from_poly(field: &Arc<NumberField>, p: QPoly) -> Self {
        Self::from_coeffs_unchecked(field, p.rem(field.minpoly()).coeffs().to_vec())
    }

    pub fn checked_add(&self, other: &FieldElement) -> Result<FieldElement> {
        if !self.same_field(other) {
            return Err(Error::FieldMismatch);
        }
        Ok(self + other)
    }

    pub fn checked_sub(&self, other: &FieldElement) -> Result<FieldElement> {
        if !self.same_field(other) {
            return Err(Error::FieldMismatch);
        }
        Ok(self - other)
    }

    pub fn checked_mul(&self, other: &FieldElement) -> Result<FieldElement> {
        if !self.same_field(other) {
            return Err(Error::FieldMismatch);
        }
        Ok(self * other)
    }

    pub fn checked_div(&self, other: &FieldElement) -> Result<FieldElement> {
        if !self.same_field(other) {
            return Err(Error::FieldMismatch);
        }
        Ok(self * &other.inv()?)
    }

    pub fn inv(&self) -> Result<FieldElement> {
        if self.is_zero() {
            return Err(Error::DivisionByZero);
        }
        let p = self
            .as_poly()
            .inverse_mod(self.field.minpoly())
            .ok_or(Error::DivisionByZero)?;
        Ok(Self::from_poly(&self.field, p))
    }

    pub fn pow(&self, e: i64) -> Result<FieldElement> {
        let mut base = if e < 0 { self.inv()? } else { self.clone() };
        let mut e = e.unsigned_abs();
        let mut acc = FieldElement::one(&self.field);
        while e > 0 {
            if e & 1 == 1 {
                acc = &acc * &base;
            }
            base = &base * &base;
            e >>= 1;
        }
        Ok(acc)
    }

    pub fn scale(&self, q: &BigRational) -> FieldElement {
        FieldElement {
            field: self.field.clone(),
            coeffs: self.coeffs.iter().map(|c| c * q).collect(),
        }
    }

    /// sigma(self).
    pub fn conj(&self) -> FieldElement {
        let d = self.field.degree();
        let mut out = vec![BigRational::zero(); d];
        for (k, c) in self.coeffs.iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            for (i, s) in self.field.sigma_matrix[k].iter().enumerate() {
                out[i] += c * s;
            }
        }
        FieldElement {
            field: self.field.clone(),
            coeffs: out,
        }
    }

    pub fn is_sigma_fixed(&self) -> bool {
        self.conj() == *self
    }

    pub fn is_sigma_antifixed(&self) -> bool {
        (&self.conj() + self).is_zero()
    }

    /// self · sigma(self); the squared absolute value under the embedding.
    pub fn abs_sqr(&self) -> FieldElement {
        self * &self.conj()
    }

    /// (self + sigma(self)) / 2, the real part under the embedding.
    pub fn real_part(&self) -> FieldElement {
        (self + &self.conj()).scale(&rat(1, 2))
    }

    /// Evaluates the embedding into a ball with `prec` fraction bits.
    pub fn embed(&self, prec: u32) -> Result<ComplexBall> {
        if prec < 32 {
            return Err(Error::PrecisionExhausted(format!(
                "{prec} bits requested, at least 32 required"
            )));
        }
        if let Some(q) = self.as_rational() {
            return Ok(ComplexBall::from_rationals(&q, &BigRational::zero(), prec));
        }
        let work = prec + 32;
        let root = self.field.root_ball(work)?;
        Ok(self.embed_at(&root).to_prec(prec))
    }

    /// Horner evaluation at a given enclosure of the generator.
    pub fn embed_at(&self, root: &ComplexBall) -> ComplexBall {
        let prec = root.prec();
        let mut acc = ComplexBall::zero(prec);
        for c in self.coeffs.iter().rev() {
            acc = acc.mul(root).add(&ComplexBall::from_rationals(c, &BigRational::zero(), prec));
        }
        acc
    }

    /// Rough f64 value of the embedding, for display and heuristics.
    pub fn approx(&self) -> (f64, f64) {
        match self.embed(64) {
            Ok(b) => (b.re.mid_f64(), b.im.mid_f64()),
            Err(_) => (f64::NAN, f64::NAN),
        }
    }
}

impl PartialEq for FieldElement {
    fn eq(&self, other: &Self) -> bool {
        self.coeffs == other.coeffs
    }
}

impl Eq for FieldElement {}

impl Hash for FieldElement {
    fn hash<H: Hasher>(&self, state: &mut H) {
        self.coeffs.hash(state);
    }
}

impl PartialOrd for FieldElement {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for FieldElement {
    fn cmp(&self, other: &Self) -> Ordering {
        self.coeffs.cmp(&other.coeffs)
    }
}

fn assert_same(a: &FieldElement, b: &FieldElement) {
    assert!(a.same_field(b), "arithmetic across different number fields");
}

impl std::ops::Add for &FieldElement {
    type Output = FieldElement;
    fn add(self, o: &FieldElement) -> FieldElement {
        assert_same(self, o);
        FieldElement {
            field: self.field.clone(),
            coeffs: self.coeffs.iter().zip(&o.coeffs).map(|(a, b)| a + b).collect(),
        }
    }
}

impl std::ops::Sub for &FieldElement {
    type Output = FieldElement;
    fn sub(self, o: &FieldElement) -> FieldElement {
        assert_same(self, o);
        FieldElement {
            field: self.field.clone(),
            coeffs: self.coeffs.iter().zip(&o.coeffs).map(|(a, b)| a - b).collect(),
        }
    }
}

impl std::ops::Mul for &FieldElement {
    type Output = FieldElement;
    fn mul(self, o: &FieldElement) -> FieldElement {
        assert_same(self, o);
        FieldElement::from_poly(&self.field, self.as_poly().mul(&o.as_poly()))
    }
}

impl std::ops::Neg for &FieldElement {
    type Output = FieldElement;
    fn neg(self) -> FieldElement {
        FieldElement {
            field: self.field.clone(),
            coeffs: self.coeffs.iter().map(|c| -c).collect(),
        }
    }
}

impl fmt::Debug for FieldElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

impl fmt::Display for FieldElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let g = self.field.generator_name();
        let mut parts: Vec<String> = Vec::new();
        for (k, c) in self.coeffs.iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            let term = match k {
                0 => c.to_string(),
                1 if c.is_one() => g.clone(),
                1 if *c == -BigRational::one() => format!("-{g}"),
                1 => format!("{c}·{g}"),
                _ if c.is_one() => format!("{g}^{k}"),
                _ => format!("{c}·{g}^{k}"),
            };
            parts.push(term);
        }
        if parts.is_empty() {
            return write!(f, "0");
        }
        let mut s = parts[0].clone();
        for p in &parts[1..] {
            if let Some(rest) = p.strip_prefix('-') {
                s.push_str(" - ");
                s.push_str(rest);
            } else {
                s.push_str(" + ");
                s.push_str(p);
            }
        }
        write!(f, "{s}")
    }
}

/// Two-operand arithmetic selected at run time.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ArithOp {
    Add,
    Sub,
    Mul,
    Div,
}

pub fn nf_arith(op: ArithOp, a: &FieldElement, b: &FieldElement) -> Result<FieldElement> {
    match op {
        ArithOp::Add => a.checked_add(b),
        ArithOp::Sub => a.checked_sub(b),
        ArithOp::Mul => a.checked_mul(b),
        ArithOp::Div => a.checked_div(b),
    }
}
