//! Formal elements of the pre-Bloch group P(F), the relations used to
//! rewrite them, and certificate verification.

use std::collections::BTreeMap;
use std::fmt;
use std::sync::Arc;

use crate::crgeom::Quadruple;
use crate::error::{Error, Result};
use crate::numfield::{int, FieldElement, NumberField};

/// A finite integer combination of symbols [z] (z ∉ {0, 1}) plus a multiple
/// of the constant c_F = [x] + [1 - x].
#[derive(Clone, PartialEq, Eq)]
pub struct PreBlochElement {
    field: Arc<NumberField>,
    terms: BTreeMap<FieldElement, i64>,
    cf: i64,
}

fn check_arg(z: &FieldElement, what: &str) -> Result<()> {
    if z.is_zero() || z.is_one() {
        return Err(Error::DegenerateArgument(format!("{what}: [{z}] is not a generator")));
    }
    Ok(())
}

impl PreBlochElement {
    pub fn zero(field: &Arc<NumberField>) -> Self {
        PreBlochElement {
            field: field.clone(),
            terms: BTreeMap::new(),
            cf: 0,
        }
    }

    /// The generator [z].
    pub fn symbol(z: &FieldElement) -> Result<Self> {
        let mut e = PreBlochElement::zero(z.field());
        e.add_term(z, 1)?;
        Ok(e)
    }

    /// k·c_F.
    pub fn c_f(field: &Arc<NumberField>, k: i64) -> Self {
        PreBlochElement {
            field: field.clone(),
            terms: BTreeMap::new(),
            cf: k,
        }
    }

    pub fn field(&self) -> &Arc<NumberField> {
        &self.field
    }

    pub fn terms(&self) -> impl Iterator<Item = (&FieldElement, i64)> {
        self.terms.iter().map(|(k, v)| (k, *v))
    }

    pub fn num_terms(&self) -> usize {
        self.terms.len()
    }

    pub fn coefficient(&self, z: &FieldElement) -> i64 {
        self.terms.get(z).copied().unwrap_or(0)
    }

    pub fn cf_mult(&self) -> i64 {
        self.cf
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty() && self.cf == 0
    }

    /// True when the element is a multiple of c_F (possibly zero).
    pub fn is_cf_multiple(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn add_term(&mut self, z: &FieldElement, n: i64) -> Result<()> {
        if !z.same_field(&FieldElement::one(&self.field)) {
            return Err(Error::FieldMismatch);
        }
        check_arg(z, "term")?;
        if n == 0 {
            return Ok(());
        }
        let entry = self.terms.entry(z.clone()).or_insert(0);
        *entry += n;
        if *entry == 0 {
            self.terms.remove(z);
        }
        Ok(())
    }

    pub fn add_cf(&mut self, k: i64) {
        self.cf += k;
    }

    pub fn checked_add(&self, other: &PreBlochElement) -> Result<PreBlochElement> {
        if *self.field != *other.field {
            return Err(Error::FieldMismatch);
        }
        let mut out = self.clone();
        for (z, n) in other.terms() {
            out.add_term(z, n)?;
        }
        out.cf += other.cf;
        Ok(out)
    }

    pub fn checked_sub(&self, other: &PreBlochElement) -> Result<PreBlochElement> {
        self.checked_add(&other.scale(-1))
    }

    pub fn scale(&self, k: i64) -> PreBlochElement {
        if k == 0 {
            return PreBlochElement::zero(&self.field);
        }
        PreBlochElement {
            field: self.field.clone(),
            terms: self.terms.iter().map(|(z, n)| (z.clone(), n * k)).collect(),
            cf: self.cf * k,
        }
    }

    /// Applies sigma to every symbol; c_F is fixed.
    pub fn sigma(&self) -> PreBlochElement {
        let mut out = PreBlochElement::c_f(&self.field, self.cf);
        for (z, n) in self.terms() {
            out.add_term(&z.conj(), n).expect("sigma preserves {0, 1}");
        }
        out
    }

    /// The image in P(C) modulo torsion constants: c_F dropped, which is
    /// valid because [z] + [1 - z] = 0 in P(C).
    pub fn without_cf(&self) -> PreBlochElement {
        PreBlochElement {
            field: self.field.clone(),
            terms: self.terms.clone(),
            cf: 0,
        }
    }
}

impl fmt::Debug for PreBlochElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

fn bracket(z: &FieldElement) -> String {
    format!("[{z}]")
}

impl fmt::Display for PreBlochElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut parts: Vec<(i64, String)> = self.terms().map(|(z, n)| (n, bracket(z))).collect();
        if self.cf != 0 {
            parts.push((self.cf, "c_F".into()));
        }
        if parts.is_empty() {
            return write!(f, "0");
        }
        for (idx, (n, s)) in parts.iter().enumerate() {
            let mag = n.unsigned_abs();
            let coef = if mag == 1 { String::new() } else { mag.to_string() };
            match (idx, *n < 0) {
                (0, false) => write!(f, "{coef}{s}")?,
                (0, true) => write!(f, "-{coef}{s}")?,
                (_, false) => write!(f, " + {coef}{s}")?,
                (_, true) => write!(f, " - {coef}{s}")?,
            }
        }
        Ok(())
    }
}

/// [z01] + [z10] + [z23] + [z32].
pub fn beta_config(q: &Quadruple) -> Result<PreBlochElement> {
    let mut e = PreBlochElement::zero(q.field());
    for z in q.to_array() {
        e.add_term(&z, 1)?;
    }
    Ok(e)
}

pub fn pb_sigma(e: &PreBlochElement) -> PreBlochElement {
    e.sigma()
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum RelationKind {
    /// [x] - [y] + [y/x] - [(1 - 1/x)/(1 - 1/y)] + [(1 - x)/(1 - y)]
    FiveTerm(FieldElement, FieldElement),
    /// 2[z] + 2[1/z]
    InvPair(FieldElement),
    /// [z] + [1 - z] - c_F
    OneMinus(FieldElement),
    /// 2[z^2] - 4[z] - 4[-z]
    Square(FieldElement),
    /// 6 c_F
    SixC,
}

impl RelationKind {
    pub fn name(&self) -> &'static str {
        match self {
            RelationKind::FiveTerm(..) => "five_term",
            RelationKind::InvPair(_) => "inv_pair",
            RelationKind::OneMinus(_) => "one_minus",
            RelationKind::Square(_) => "square",
            RelationKind::SixC => "six_c",
        }
    }

    pub fn args(&self) -> Vec<FieldElement> {
        match self {
            RelationKind::FiveTerm(x, y) => vec![x.clone(), y.clone()],
            RelationKind::InvPair(z) | RelationKind::OneMinus(z) | RelationKind::Square(z) => vec![z.clone()],
            RelationKind::SixC => vec![],
        }
    }

    /// Builds a relation from its file name and argument list.
    pub fn from_parts(name: &str, args: Vec<FieldElement>) -> Result<RelationKind> {
        let arity = |n: usize| {
            if args.len() == n {
                Ok(())
            } else {
                Err(Error::Invalid(format!("{name} takes {n} argument(s), got {}", args.len())))
            }
        };
        let mut it = args.clone().into_iter();
        Ok(match name {
            "five_term" => {
                arity(2)?;
                RelationKind::FiveTerm(it.next().unwrap(), it.next().unwrap())
            }
            "inv_pair" => {
                arity(1)?;
                RelationKind::InvPair(it.next().unwrap())
            }
            "one_minus" => {
                arity(1)?;
                RelationKind::OneMinus(it.next().unwrap())
            }
            "square" => {
                arity(1)?;
                RelationKind::Square(it.next().unwrap())
            }
            "six_c" => {
                arity(0)?;
                RelationKind::SixC
            }
            other => return Err(Error::Invalid(format!("unknown relation kind {other:?}"))),
        })
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RelationInstance {
    pub kind: RelationKind,
    pub mult: i64,
}

impl RelationInstance {
    pub fn new(kind: RelationKind, mult: i64) -> Self {
        RelationInstance { kind, mult }
    }
}

/// The formal element a relation asserts to vanish in P(F).
pub fn relation_value(field: &Arc<NumberField>, r: &RelationKind) -> Result<PreBlochElement> {
    let one = FieldElement::one(field);
    let mut e = PreBlochElement::zero(field);
    match r {
        RelationKind::FiveTerm(x, y) => {
            check_arg(x, "five_term x")?;
            check_arg(y, "five_term y")?;
            if x == y {
                return Err(Error::DegenerateArgument("five_term needs x != y".into()));
            }
            let a = (&one - &x.inv()?).checked_div(&(&one - &y.inv()?))?;
            let b = (&one - x).checked_div(&(&one - y))?;
            e.add_term(x, 1)?;
            e.add_term(y, -1)?;
            e.add_term(&y.checked_div(x)?, 1)?;
            e.add_term(&a, -1)?;
            e.add_term(&b, 1)?;
        }
        RelationKind::InvPair(z) => {
            check_arg(z, "inv_pair")?;
            e.add_term(z, 2)?;
            e.add_term(&z.inv()?, 2)?;
        }
        RelationKind::OneMinus(z) => {
            check_arg(z, "one_minus")?;
            e.add_term(z, 1)?;
            e.add_term(&(&one - z), 1)?;
            e.add_cf(-1);
        }
        RelationKind::Square(z) => {
            check_arg(z, "square")?;
            if (z + &one).is_zero() {
                return Err(Error::DegenerateArgument("square needs z != -1".into()));
            }
            e.add_term(&(z * z), 2)?;
            e.add_term(z, -4)?;
            e.add_term(&-z, -4)?;
        }
        RelationKind::SixC => e.add_cf(6),
    }
    Ok(e)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Default)]
pub enum Mode {
    /// Only five-term relations.
    Strict,
    /// Five-term relations plus inv_pair, one_minus, square and six_c.
    #[default]
    Extended,
}

impl std::str::FromStr for Mode {
    type Err = Error;
    fn from_str(s: &str) -> Result<Mode> {
        match s {
            "strict" => Ok(Mode::Strict),
            "extended" => Ok(Mode::Extended),
            other => Err(Error::Invalid(format!("unknown mode {other:?}"))),
        }
    }
}

impl fmt::Display for Mode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Mode::Strict => "strict",
            Mode::Extended => "extended",
        })
    }
}

pub type Certificate = Vec<RelationInstance>;

/// start - Σ mult·relation_value.
pub fn apply_certificate(start: &PreBlochElement, cert: &[RelationInstance], mode: Mode) -> Result<PreBlochElement> {
    let mut acc = start.clone();
    for r in cert {
        if mode == Mode::Strict && !matches!(r.kind, RelationKind::FiveTerm(..)) {
            return Err(Error::IllegalRelationInMode(r.kind.name().into()));
        }
        for a in r.kind.args() {
            if !a.same_field(&FieldElement::one(start.field())) {
                return Err(Error::FieldMismatch);
            }
        }
        let v = relation_value(start.field(), &r.kind)?;
        acc = acc.checked_sub(&v.scale(r.mult))?;
    }
    Ok(acc)
}

/// True iff start - end equals Σ mult·relation_value exactly.
pub fn verify_certificate(
    start: &PreBlochElement,
    end: &PreBlochElement,
    cert: &[RelationInstance],
    mode: Mode,
) -> Result<bool> {
    if *start.field() != *end.field() {
        return Err(Error::FieldMismatch);
    }
    Ok(apply_certificate(start, cert, mode)? == *end)
}

/// One step of a staged proof: the current element equals `target` by the
/// listed relations.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Stage {
    pub target: PreBlochElement,
    pub relations: Certificate,
}

/// Runs a chain of stages; returns the verified chain of intermediate values
/// or the index of the first failing stage together with its residual.
pub fn verify_stages(
    start: &PreBlochElement,
    stages: &[Stage],
    mode: Mode,
) -> Result<std::result::Result<Vec<PreBlochElement>, (usize, PreBlochElement)>> {
    let mut current = start.clone();
    let mut chain = Vec::with_capacity(stages.len());
    for (i, s) in stages.iter().enumerate() {
        let reduced = apply_certificate(&current, &s.relations, mode)?;
        if reduced != s.target {
            return Ok(Err((i, reduced)));
        }
        chain.push(reduced.clone());
        current = reduced;
    }
    Ok(Ok(chain))
}

/// Data of the figure-eight family at parameter beta: the field
/// Q(sqrt(-alpha^2)) and the invariants w12 and z12.
#[derive(Clone, Debug)]
pub struct Fig8Family {
    pub beta: num_rational::BigRational,
    /// sqrt(5 - 8 beta), rational by assumption.
    pub r: num_rational::BigRational,
    pub alpha_sq: num_rational::BigRational,
    pub field: Arc<NumberField>,
    pub w12: FieldElement,
    pub z12: FieldElement,
}

fn rational_sqrt(q: &num_rational::BigRational) -> Option<num_rational::BigRational> {
    use num_traits::Signed;
    if q.is_negative() {
        return None;
    }
    let n = q.numer().sqrt();
    let d = q.denom().sqrt();
    if &n * &n == *q.numer() && &d * &d == *q.denom() {
        Some(num_rational::BigRational::new(n, d))
    } else {
        None
    }
}

impl Fig8Family {
    pub fn new(beta: num_rational::BigRational) -> Result<Fig8Family> {
        use num_traits::Signed;
        let five_minus = int(5) - &beta * int(8);
        let r = rational_sqrt(&five_minus)
            .ok_or_else(|| Error::OutsideFamily(format!("5 - 8β = {five_minus} is not a rational square")))?;
        let alpha_sq = int(2) - &beta * &beta * int(4) + &r * int(2);
        if !alpha_sq.is_positive() {
            return Err(Error::OutsideFamily(format!("α² = {alpha_sq} is not positive")));
        }
        if rational_sqrt(&alpha_sq).is_some() {
            return Err(Error::OutsideFamily(format!(
                "α² = {alpha_sq} is a square, so the family field is not imaginary quadratic"
            )));
        }
        // theta = alpha·i, theta^2 = -alpha^2
        let field = NumberField::new(vec![alpha_sq.clone(), int(0), int(1)], 0, vec![int(0), int(-1)])?;
        let half = num_rational::BigRational::new(1.into(), 2.into());
        let w12 = FieldElement::new(&field, vec![beta.clone(), half])?;
        let den = &r + int(3) - &beta * int(4);
        let z12 = FieldElement::new(&field, vec![&r - &beta * int(2) + int(1), int(1)])?
            .scale(&(num_rational::BigRational::from_integer(1.into()) / den));
        Ok(Fig8Family {
            beta,
            r,
            alpha_sq,
            field,
            w12,
            z12,
        })
    }

    /// The two tetrahedra: (w12, w21, w34, w43) and (z12, z21, z34, z43).
    pub fn quadruples(&self) -> [Quadruple; 2] {
        let w = &self.w12;
        let z = &self.z12;
        [
            Quadruple::new([w.clone(), w.conj(), w.clone(), w.conj()]),
            Quadruple::new([z.clone(), z.conj(), z.clone(), z.conj()]),
        ]
    }

    /// w12 / (w12 - 1) = sigma(z12), exactly.
    pub fn pairing_identity(&self) -> Result<bool> {
        let one = FieldElement::one(&self.field);
        Ok(self.w12.checked_div(&(&self.w12 - &one))? == self.z12.conj())
    }
}

pub fn pairing_identity_check(beta: num_rational::BigRational) -> Result<bool> {
    Fig8Family::new(beta)?.pairing_identity()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numfield::rat;

    fn q15() -> Arc<NumberField> {
        NumberField::imaginary_quadratic(int(15)).unwrap()
    }

    #[test]
    fn symbols_reject_degenerate_keys() {
        let f = q15();
        assert!(PreBlochElement::symbol(&FieldElement::one(&f)).is_err());
        assert!(PreBlochElement::symbol(&FieldElement::zero(&f)).is_err());
        let h = FieldElement::from_rational(&f, rat(1, 2));
        let e = PreBlochElement::symbol(&h).unwrap().scale(4);
        assert_eq!(e.to_string(), "4[1/2]");
        assert!(e.checked_sub(&e).unwrap().is_zero());
    }

    #[test]
    fn relation_values() {
        let f = q15();
        let h = FieldElement::from_rational(&f, rat(1, 2));
        let om = relation_value(&f, &RelationKind::OneMinus(h.clone())).unwrap();
        assert_eq!(om.coefficient(&h), 2);
        assert_eq!(om.cf_mult(), -1);
        let z = FieldElement::new(&f, vec![rat(1, 3), rat(2, 5)]).unwrap();
        let ip = relation_value(&f, &RelationKind::InvPair(z.clone())).unwrap();
        assert_eq!(ip.coefficient(&z), 2);
        assert_eq!(ip.coefficient(&z.inv().unwrap()), 2);
        let m1 = FieldElement::from_int(&f, -1);
        assert!(relation_value(&f, &RelationKind::Square(m1)).is_err());
        assert!(relation_value(&f, &RelationKind::FiveTerm(z.clone(), z)).is_err());
    }

    #[test]
    fn strict_mode_rejects_catalog_relations() {
        let f = q15();
        let e = PreBlochElement::zero(&f);
        let cert = vec![RelationInstance::new(RelationKind::SixC, 1)];
        assert_eq!(
            verify_certificate(&e, &e, &cert, Mode::Strict),
            Err(Error::IllegalRelationInMode("six_c".into()))
        );
        assert!(verify_certificate(&e, &e, &[], Mode::Strict).unwrap());
    }

    #[test]
    fn figure_eight_family_pairing_identity() {
        for b in [rat(1, 2), rat(-1, 2), rat(1, 8)] {
            assert!(pairing_identity_check(b).unwrap());
        }
        assert!(matches!(pairing_identity_check(rat(1, 3)), Err(Error::OutsideFamily(_))));
        assert!(matches!(pairing_identity_check(rat(5, 8) + rat(1, 1)), Err(Error::OutsideFamily(_))));
        let fam = Fig8Family::new(rat(1, 8)).unwrap();
        assert_eq!(fam.alpha_sq, rat(95, 16));
    }
}
