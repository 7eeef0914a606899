//! Points of S^3 = ∂H²_C in Heisenberg coordinates, their lifts to C^{2,1},
//! Cartan invariants and cross-ratios of four-point configurations.
//!
//! Everything is exact over the ambient number field. Complex conjugation is
//! the field automorphism sigma. The real Heisenberg coordinate t never has
//! to be represented on its own: a point stores `u = i·t`, which is
//! sigma-antifixed and lives in the field even when i does not. The same
//! trick is used for the normalized parameters and for Cartan tangents.

use std::sync::Arc;

use crate::ball::{atan_ball, RealBall};
use crate::error::{Error, Result};
use crate::numfield::{rat, FieldElement, NumberField, QuadraticOrder};

/// The sigma-antifixed square root of -1 embedded in the upper half plane,
/// when the field has one (detected for degree <= 2).
pub fn sqrt_minus_one(field: &Arc<NumberField>) -> Option<FieldElement> {
    if field.degree() != 2 {
        return None;
    }
    let order = QuadraticOrder::new(field)?;
    if order.d() != &(-1).into() {
        return None;
    }
    let s = order.sqrt_d().clone();
    if !s.is_sigma_antifixed() {
        return None;
    }
    let (_, im) = s.approx();
    Some(if im > 0.0 { s } else { -&s })
}

fn need_i(field: &Arc<NumberField>) -> Result<FieldElement> {
    sqrt_minus_one(field).ok_or_else(|| {
        Error::FieldLacksI("real coordinates need a sigma-antifixed square root of -1".into())
    })
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Point {
    Infinity,
    /// Heisenberg point (z, t) stored as z and u = i·t.
    Heisenberg { z: FieldElement, u: FieldElement },
}

impl Point {
    /// A finite point from z and u = i·t; u must be sigma-antifixed.
    pub fn from_z_it(z: FieldElement, u: FieldElement) -> Result<Point> {
        if !z.same_field(&u) {
            return Err(Error::FieldMismatch);
        }
        if !u.is_sigma_antifixed() {
            return Err(Error::Invalid("i·t must be sigma-antifixed (t real)".into()));
        }
        Ok(Point::Heisenberg { z, u })
    }

    /// A finite point from z and a real (sigma-fixed) t.
    pub fn from_z_t(z: FieldElement, t: FieldElement) -> Result<Point> {
        if !t.is_sigma_fixed() {
            return Err(Error::Invalid("t must be sigma-fixed (real)".into()));
        }
        let i = need_i(z.field())?;
        Point::from_z_it(z, &i * &t)
    }

    /// The real coordinate t, which needs i in the field.
    pub fn t(&self) -> Result<Option<FieldElement>> {
        match self {
            Point::Infinity => Ok(None),
            Point::Heisenberg { u, .. } => {
                let i = need_i(u.field())?;
                Ok(Some(-&(&i * u)))
            }
        }
    }

    pub fn lift(&self, field: &Arc<NumberField>) -> Lift {
        match self {
            Point::Infinity => Lift::new([
                FieldElement::one(field),
                FieldElement::zero(field),
                FieldElement::zero(field),
            ]),
            Point::Heisenberg { z, u } => {
                let v0 = (&(-&z.abs_sqr()) + u).scale(&rat(1, 2));
                Lift::new([v0, z.clone(), FieldElement::one(field)])
            }
        }
    }

    /// The point represented by a null vector.
    pub fn from_lift(v: &Lift) -> Result<Point> {
        let [w0, w1, w2] = &v.v;
        if w2.is_zero() {
            if w0.is_zero() {
                return Err(Error::Invalid("zero vector does not represent a point".into()));
            }
            return Ok(Point::Infinity);
        }
        let z = w1.checked_div(w2)?;
        let x0 = w0.checked_div(w2)?;
        // x0 = (-|z|^2 + u) / 2
        let u = &x0.scale(&rat(2, 1)) + &z.abs_sqr();
        Point::from_z_it(z, u)
    }
}

/// A vector in C^{2,1} with coordinates in the field.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Lift {
    pub v: [FieldElement; 3],
}

impl Lift {
    pub fn new(v: [FieldElement; 3]) -> Self {
        Lift { v }
    }

    pub fn field(&self) -> &Arc<NumberField> {
        self.v[0].field()
    }

    /// <self, other> = other^* J self with J the antidiagonal form.
    pub fn herm(&self, other: &Lift) -> FieldElement {
        let a = &other.v[0].conj() * &self.v[2];
        let b = &other.v[1].conj() * &self.v[1];
        let c = &other.v[2].conj() * &self.v[0];
        &(&a + &b) + &c
    }

    /// Hermitian cross product, orthogonal to both factors.
    pub fn boxed(&self, w: &Lift) -> Lift {
        let v = [self.v[0].conj(), self.v[1].conj(), self.v[2].conj()];
        let w = [w.v[0].conj(), w.v[1].conj(), w.v[2].conj()];
        Lift::new([
            &(&v[0] * &w[1]) - &(&v[1] * &w[0]),
            &(&v[2] * &w[0]) - &(&v[0] * &w[2]),
            &(&v[1] * &w[2]) - &(&v[2] * &w[1]),
        ])
    }

    pub fn scale(&self, c: &FieldElement) -> Lift {
        Lift::new([&self.v[0] * c, &self.v[1] * c, &self.v[2] * c])
    }

    pub fn is_null(&self) -> bool {
        self.herm(self).is_zero()
    }

    fn same_field(&self, other: &Lift) -> bool {
        self.v[0].same_field(&other.v[0])
    }
}

pub fn lift_point(p: &Point, field: &Arc<NumberField>) -> Lift {
    p.lift(field)
}

pub fn herm(u: &Lift, v: &Lift) -> Result<FieldElement> {
    if !u.same_field(v) {
        return Err(Error::FieldMismatch);
    }
    Ok(u.herm(v))
}

pub fn box_product(u: &Lift, v: &Lift) -> Result<Lift> {
    if !u.same_field(v) {
        return Err(Error::FieldMismatch);
    }
    Ok(u.boxed(v))
}

/// T = -<p0,p1><p1,p2><p2,p0>.
pub fn triple_product(a: &Lift, b: &Lift, c: &Lift) -> FieldElement {
    -&(&(&a.herm(b) * &b.herm(c)) * &c.herm(a))
}

/// tau = (T - sigma T) / (T + sigma T) = i·tan A for a generic triple.
pub fn cartan_tangent_lifts(a: &Lift, b: &Lift, c: &Lift) -> Result<FieldElement> {
    let t = triple_product(a, b, c);
    let st = t.conj();
    let den = &t + &st;
    if den.is_zero() {
        return Err(Error::NotGeneric("triple lies on a C-circle (Re T = 0)".into()));
    }
    (&t - &st).checked_div(&den)
}

/// Cartan tangent of an ordered triple; the result is i·tan A.
pub fn cartan_tangent(field: &Arc<NumberField>, p: [&Point; 3]) -> Result<FieldElement> {
    if p[0] == p[1] || p[1] == p[2] || p[0] == p[2] {
        return Err(Error::NotGeneric("repeated point".into()));
    }
    cartan_tangent_lifts(&p[0].lift(field), &p[1].lift(field), &p[2].lift(field))
}

/// Enclosure of the Cartan angle A itself, from tau = i·tan A.
pub fn cartan_angle(tau: &FieldElement, prec: u32) -> Result<RealBall> {
    // tau is purely imaginary under the embedding
    let b = tau.embed(prec)?;
    Ok(atan_ball(&b.im))
}

pub fn is_generic(field: &Arc<NumberField>, points: &[Point]) -> bool {
    let n = points.len();
    for i in 0..n {
        for j in i + 1..n {
            if points[i] == points[j] {
                return false;
            }
        }
    }
    let lifts: Vec<Lift> = points.iter().map(|p| p.lift(field)).collect();
    for i in 0..n {
        for j in i + 1..n {
            for k in j + 1..n {
                let t = triple_product(&lifts[i], &lifts[j], &lifts[k]);
                if (&t + &t.conj()).is_zero() {
                    return false;
                }
            }
        }
    }
    true
}

/// (z01, z10, z23, z32): the invariants that determine a configuration.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Quadruple {
    pub z01: FieldElement,
    pub z10: FieldElement,
    pub z23: FieldElement,
    pub z32: FieldElement,
}

impl Quadruple {
    pub fn new(z: [FieldElement; 4]) -> Self {
        let [z01, z10, z23, z32] = z;
        Quadruple { z01, z10, z23, z32 }
    }

    pub fn to_array(&self) -> [FieldElement; 4] {
        [self.z01.clone(), self.z10.clone(), self.z23.clone(), self.z32.clone()]
    }

    pub fn field(&self) -> &Arc<NumberField> {
        self.z01.field()
    }

    pub fn conj(&self) -> Quadruple {
        Quadruple::new(self.to_array().map(|z| z.conj()))
    }

    /// The full table of cross-ratios generated by the similarity relations.
    pub fn table(&self) -> Result<CrossRatioTable> {
        CrossRatioTable::from_quadruple(self)
    }
}

fn is_even(p: [usize; 4]) -> bool {
    let mut inv = 0;
    for a in 0..4 {
        for b in a + 1..4 {
            if p[a] > p[b] {
                inv += 1;
            }
        }
    }
    inv % 2 == 0
}

/// The two remaining indices (k, l) for which (i, j, k, l) is even.
pub fn complete_even(i: usize, j: usize) -> (usize, usize) {
    let rest: Vec<usize> = (0..4).filter(|&m| m != i && m != j).collect();
    if is_even([i, j, rest[0], rest[1]]) {
        (rest[0], rest[1])
    } else {
        (rest[1], rest[0])
    }
}

fn one_over_one_minus(z: &FieldElement) -> Result<FieldElement> {
    let one = FieldElement::one(z.field());
    let d = &one - z;
    if d.is_zero() {
        return Err(Error::DegenerateCrossRatio("value 1 in similarity relation".into()));
    }
    d.inv()
}

/// z_ij for all ordered pairs i != j, together with the values (ijkl) of
/// all 24 orderings.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CrossRatioTable {
    z: [[Option<FieldElement>; 4]; 4],
}

impl CrossRatioTable {
    pub fn from_quadruple(q: &Quadruple) -> Result<Self> {
        for (name, v) in [("z01", &q.z01), ("z10", &q.z10), ("z23", &q.z23), ("z32", &q.z32)] {
            if v.is_zero() || v.is_one() {
                return Err(Error::DegenerateCrossRatio(format!("{name} = {v}")));
            }
        }
        let mut z: [[Option<FieldElement>; 4]; 4] = Default::default();
        for (i, j, v) in [(0, 1, &q.z01), (1, 0, &q.z10), (2, 3, &q.z23), (3, 2, &q.z32)] {
            // (i, j, k, l) even gives z_ik = 1/(1 - z_ij), then z_il likewise
            let (k, l) = complete_even(i, j);
            let zik = one_over_one_minus(v)?;
            let zil = one_over_one_minus(&zik)?;
            z[i][j] = Some(v.clone());
            z[i][k] = Some(zik);
            z[i][l] = Some(zil);
        }
        Ok(CrossRatioTable { z })
    }

    pub fn z(&self, i: usize, j: usize) -> &FieldElement {
        self.z[i][j].as_ref().expect("i != j")
    }

    /// The cross-ratio (ijkl) for an arbitrary ordering.
    pub fn x(&self, i: usize, j: usize, k: usize, l: usize) -> FieldElement {
        let zij = self.z(i, j);
        if is_even([i, j, k, l]) {
            zij.clone()
        } else {
            zij.inv().expect("cross-ratios are nonzero")
        }
    }

    /// z_ij z_ji = sigma(z_kl z_lk) for each of the three splittings.
    pub fn eq_cr_holds(&self) -> [bool; 3] {
        [(0, 1, 2, 3), (0, 2, 1, 3), (0, 3, 1, 2)].map(|(i, j, k, l)| {
            let lhs = self.z(i, j) * self.z(j, i);
            let rhs = (self.z(k, l) * self.z(l, k)).conj();
            lhs == rhs
        })
    }

    /// The relation z_ij = 1/(1 - z_il) that closes each similarity cycle.
    pub fn cycles_close(&self) -> bool {
        (0..4).all(|i| {
            let j = (0..4).find(|&j| j != i).unwrap();
            let (_, l) = complete_even(i, j);
            one_over_one_minus(self.z(i, l)).map(|v| &v == self.z(i, j)).unwrap_or(false)
        })
    }
}

/// X(i, j, k, l) = <l, c_ij><k, i> / (<k, c_ij><l, i>) with c_ij = p_i ⊠ p_j.
pub fn x_from_lifts(l: &[Lift], i: usize, j: usize, k: usize, m: usize) -> Result<FieldElement> {
    let c = l[i].boxed(&l[j]);
    let num = &l[m].herm(&c) * &l[k].herm(&l[i]);
    let den = &l[k].herm(&c) * &l[m].herm(&l[i]);
    if den.is_zero() || num.is_zero() {
        return Err(Error::DegenerateCrossRatio(format!("({i}{j}{k}{m}) is 0 or ∞")));
    }
    num.checked_div(&den)
}

/// Four ordered generic points.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ConfigFour {
    field: Arc<NumberField>,
    points: [Point; 4],
}

impl ConfigFour {
    pub fn new(field: &Arc<NumberField>, points: [Point; 4]) -> Result<Self> {
        if !is_generic(field, &points) {
            return Err(Error::NotGeneric("four points are not generic".into()));
        }
        Ok(ConfigFour {
            field: field.clone(),
            points,
        })
    }

    pub fn field(&self) -> &Arc<NumberField> {
        &self.field
    }

    pub fn points(&self) -> &[Point; 4] {
        &self.points
    }

    pub fn lifts(&self) -> [Lift; 4] {
        [0, 1, 2, 3].map(|i| self.points[i].lift(&self.field))
    }

    /// The cross-ratio (ijkl) computed directly from the lifts.
    pub fn x(&self, i: usize, j: usize, k: usize, l: usize) -> Result<FieldElement> {
        x_from_lifts(&self.lifts(), i, j, k, l)
    }

    pub fn cross_ratios(&self) -> Result<Quadruple> {
        let l = self.lifts();
        let q = Quadruple::new([
            x_from_lifts(&l, 0, 1, 2, 3)?,
            x_from_lifts(&l, 1, 0, 3, 2)?,
            x_from_lifts(&l, 2, 3, 0, 1)?,
            x_from_lifts(&l, 3, 2, 1, 0)?,
        ]);
        for v in q.to_array() {
            if v.is_one() {
                return Err(Error::DegenerateCrossRatio(format!("value {v}")));
            }
        }
        Ok(q)
    }

    /// Cartan tangent of the ordered sub-triple (a, b, c).
    pub fn tangent(&self, a: usize, b: usize, c: usize) -> Result<FieldElement> {
        cartan_tangent(&self.field, [&self.points[a], &self.points[b], &self.points[c]])
    }
}

pub fn cross_ratios(c: &ConfigFour) -> Result<Quadruple> {
    c.cross_ratios()
}

/// Normalized parameters (z, s, t) with s and t stored as S = i·s and
/// T = i·t.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct NormalizedParams {
    pub z: FieldElement,
    pub s_it: FieldElement,
    pub t_it: FieldElement,
}

impl NormalizedParams {
    pub fn from_it(z: FieldElement, s_it: FieldElement, t_it: FieldElement) -> Result<Self> {
        if !s_it.is_sigma_antifixed() || !t_it.is_sigma_antifixed() {
            return Err(Error::Invalid("i·s and i·t must be sigma-antifixed".into()));
        }
        Ok(NormalizedParams { z, s_it, t_it })
    }

    /// From real s and t; needs i in the field.
    pub fn from_real(z: FieldElement, s: FieldElement, t: FieldElement) -> Result<Self> {
        if !s.is_sigma_fixed() || !t.is_sigma_fixed() {
            return Err(Error::Invalid("s and t must be sigma-fixed".into()));
        }
        let i = need_i(z.field())?;
        NormalizedParams::from_it(z, &i * &s, &i * &t)
    }

    pub fn field(&self) -> &Arc<NumberField> {
        self.z.field()
    }

    /// s and t as real field elements, when i is available.
    pub fn real_st(&self) -> Result<(FieldElement, FieldElement)> {
        let i = need_i(self.field())?;
        Ok((-&(&i * &self.s_it), -&(&i * &self.t_it)))
    }

    /// ∞, (0,0), (1,t), (z, s|z|^2).
    pub fn points(&self) -> [Point; 4] {
        let f = self.field();
        [
            Point::Infinity,
            Point::Heisenberg {
                z: FieldElement::zero(f),
                u: FieldElement::zero(f),
            },
            Point::Heisenberg {
                z: FieldElement::one(f),
                u: self.t_it.clone(),
            },
            Point::Heisenberg {
                z: self.z.clone(),
                u: &self.s_it * &self.z.abs_sqr(),
            },
        ]
    }

    /// The ratio sigma(z)(s+i)/(t+i) = sigma(z)(S-1)/(T-1).
    fn k_ratio(&self) -> Result<FieldElement> {
        let one = FieldElement::one(self.field());
        let tm1 = &self.t_it - &one;
        if tm1.is_zero() {
            return Err(Error::OutsideK);
        }
        (&self.z.conj() * &(&self.s_it - &one)).checked_div(&tm1)
    }

    pub fn in_k(&self) -> bool {
        !(self.z.is_zero() || self.z.is_one()) && self.k_ratio().map(|r| !r.is_one()).unwrap_or(false)
    }

    pub fn invariants(&self) -> Result<Quadruple> {
        if !self.in_k() {
            return Err(Error::OutsideK);
        }
        let f = self.field();
        let one = FieldElement::one(f);
        let z = &self.z;
        let zc = z.conj();
        let (s, t) = (&self.s_it, &self.t_it);
        let z10 = self.k_ratio()?;
        // (t+i) - zbar(s+i), up to the common factor 1/i
        let inner = &(t - &one) - &(&zc * &(s - &one));
        let z23 = (z * &inner).checked_div(&(&(z - &one) * &(t + &one)))?;
        let z32 = (&(&zc * &(z - &one)) * &(s + &one)).checked_div(&inner)?;
        Ok(Quadruple::new([z.clone(), z10, z23, z32]))
    }

    /// t = s, or t + s - 2(s Re z + Im z) = 0.
    pub fn is_symmetric(&self) -> bool {
        let (s, t) = (&self.s_it, &self.t_it);
        if s == t {
            return true;
        }
        // i·(t + s - 2(s Re z + Im z)) = T + S - 2(S Re z + (z - zbar)/2)
        let re = self.z.real_part();
        let i_im = (&self.z - &self.z.conj()).scale(&rat(1, 2));
        let expr = &(t + s) - &(&(s * &re) + &i_im).scale(&rat(2, 1));
        expr.is_zero()
    }
}

/// Inverts the normalization: the parameters whose configuration has the
/// given invariants. With z = z01, sigma(z)(S - 1) = z10 (T - 1) and
/// (T - 1)/(T + 1) = z23 (z - 1) / (z (1 - z10)).
pub fn params_from_quadruple(q: &Quadruple) -> Result<NormalizedParams> {
    let f = q.field();
    let one = FieldElement::one(f);
    let inconsistent = |m: &str| Error::InconsistentStructure(m.to_string());
    let z = &q.z01;
    let den = z * &(&one - &q.z10);
    if den.is_zero() {
        return Err(inconsistent("z01 (1 - z10) vanishes"));
    }
    let rho = (&q.z23 * &(z - &one)).checked_div(&den)?;
    if rho.is_one() {
        return Err(inconsistent("normalized t is infinite"));
    }
    let t_it = (&one + &rho).checked_div(&(&one - &rho))?;
    let s_it = &one + &(&q.z10 * &(&t_it - &one)).checked_div(&z.conj())?;
    let p = NormalizedParams::from_it(z.clone(), s_it, t_it)
        .map_err(|_| inconsistent("quadruple is not realized by real s and t"))?;
    if p.invariants().ok().as_ref() != Some(q) {
        return Err(inconsistent("z32 disagrees with the configuration fixed by z01, z10, z23"));
    }
    Ok(p)
}

pub fn invariants_from_params(p: &NormalizedParams) -> Result<Quadruple> {
    p.invariants()
}

pub fn normalize_config(c: &ConfigFour) -> Result<NormalizedParams> {
    let q = c.cross_ratios()?;
    NormalizedParams::from_it(q.z01, c.tangent(0, 1, 3)?, c.tangent(0, 1, 2)?)
}

pub fn is_symmetric(p: &NormalizedParams) -> bool {
    p.is_symmetric()
}

/// The vertex opposite a face.
pub fn opposite(face: [usize; 3]) -> usize {
    (0..4).find(|m| !face.contains(m)).expect("a face has three distinct vertices")
}

/// The product z_il z_jl z_kl for a face (i, j, k) with opposite vertex l,
/// inverted when (i, j, k, l) is an even permutation. With the lift and
/// box-product conventions used here this equals -e^{2iA(p_i,p_j,p_k)} for
/// every ordering of the face; for the odd orderings (the faces (1,2,3),
/// (0,3,2), (0,1,3), (0,2,1) of the dilogarithm face formula) no inversion
/// is needed.
pub fn face_product(tab: &CrossRatioTable, face: [usize; 3]) -> FieldElement {
    let [i, j, k] = face;
    let m = opposite(face);
    let p = &(tab.z(i, m) * tab.z(j, m)) * tab.z(k, m);
    if is_even([i, j, k, m]) {
        p.inv().expect("cross-ratios are nonzero")
    } else {
        p
    }
}

/// Exact check of -T/sigma(T) = face_product, where T is the triple
/// product of the face and T/sigma(T) = e^{2iA}.
pub fn face_identity_exact(c: &ConfigFour, face: [usize; 3]) -> Result<bool> {
    let l = c.lifts();
    let [i, j, k] = face;
    let t = triple_product(&l[i], &l[j], &l[k]);
    let lhs = -&t.checked_div(&t.conj())?;
    let tab = c.cross_ratios()?.table()?;
    Ok(lhs == face_product(&tab, face))
}

/// -e^{2iA} as a field element: -(1 + tau)/(1 - tau).
pub fn minus_exp_2ia(tau: &FieldElement) -> Result<FieldElement> {
    let one = FieldElement::one(tau.field());
    (-&(&one + tau)).checked_div(&(&one - tau))
}

/// Numeric form: -(1 + tau)/(1 - tau) against the face product, as balls.
pub fn verify_face_identity(c: &ConfigFour, face: [usize; 3], prec: u32) -> Result<bool> {
    if prec < 32 {
        return Err(Error::PrecisionExhausted(format!("{prec} bits")));
    }
    let [i, j, k] = face;
    let tau = c.tangent(i, j, k)?.embed(prec)?;
    let one = crate::ball::ComplexBall::from_rationals(&rat(1, 1), &rat(0, 1), prec);
    let lhs = one.add(&tau).div(&one.sub(&tau))?.neg();
    let tab = c.cross_ratios()?.table()?;
    let rhs = face_product(&tab, face).embed(prec)?;
    Ok(lhs.overlaps(&rhs))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numfield::int;

    fn qi() -> Arc<NumberField> {
        NumberField::imaginary_quadratic(int(1)).unwrap()
    }

    fn c(f: &Arc<NumberField>, a: i64, b: i64) -> FieldElement {
        FieldElement::new(f, vec![int(a), int(b)]).unwrap()
    }

    fn heis(f: &Arc<NumberField>, z: FieldElement, t: i64) -> Point {
        Point::from_z_t(z, FieldElement::from_int(f, t)).unwrap()
    }

    #[test]
    fn lifts_and_hermitian_form() {
        let f = qi();
        let inf = Point::Infinity.lift(&f);
        assert_eq!(inf.v[0], FieldElement::one(&f));
        let origin = heis(&f, FieldElement::zero(&f), 0).lift(&f);
        assert_eq!(origin.v, [FieldElement::zero(&f), FieldElement::zero(&f), FieldElement::one(&f)]);
        assert!(origin.herm(&inf).is_one());
        let p = heis(&f, FieldElement::one(&f), 3).lift(&f);
        assert!(p.is_null());
        assert!(p.herm(&inf).is_one());
        // ((-1 + 3i)/2, 1, 1)
        assert_eq!(p.v[0], FieldElement::new(&f, vec![rat(-1, 2), rat(3, 2)]).unwrap());
    }

    #[test]
    fn box_product_examples() {
        let f = qi();
        let e0 = Point::Infinity.lift(&f);
        let e2 = heis(&f, FieldElement::zero(&f), 0).lift(&f);
        let b = e0.boxed(&e2);
        assert_eq!(b.v[1], FieldElement::from_int(&f, -1));
        assert!(b.v[0].is_zero() && b.v[2].is_zero());
        let u = Lift::new([c(&f, 1, 2), c(&f, -3, 1), c(&f, 0, 5)]);
        let w = Lift::new([c(&f, 2, 0), c(&f, 1, 1), c(&f, -1, 4)]);
        let uw = u.boxed(&w);
        assert!(u.herm(&uw).is_zero() && w.herm(&uw).is_zero());
        let lam = c(&f, 2, -3);
        assert_eq!(u.scale(&lam).boxed(&w), uw.scale(&lam.conj()));
    }

    #[test]
    fn cartan_tangent_of_normalized_triple() {
        let f = qi();
        let o = heis(&f, FieldElement::zero(&f), 0);
        for t in [-3, 0, 2, 7] {
            let p = heis(&f, FieldElement::one(&f), t);
            let tau = cartan_tangent(&f, [&Point::Infinity, &o, &p]).unwrap();
            let i = sqrt_minus_one(&f).unwrap();
            assert_eq!(tau, &i * &FieldElement::from_int(&f, t));
        }
        let vertical = heis(&f, FieldElement::zero(&f), 1);
        assert!(!is_generic(&f, &[Point::Infinity, o.clone(), vertical]));
        assert!(is_generic(&f, &[Point::Infinity, o.clone(), heis(&f, FieldElement::one(&f), 0)]));
        assert!(!is_generic(&f, &[o.clone(), o]));
    }

    #[test]
    fn normalized_quadruple_matches_formulas() {
        let f = qi();
        let p = NormalizedParams::from_real(FieldElement::from_int(&f, 2), FieldElement::zero(&f), FieldElement::zero(&f)).unwrap();
        let q = p.invariants().unwrap();
        for v in q.to_array() {
            assert_eq!(v, FieldElement::from_int(&f, 2));
        }
        let cfg = ConfigFour::new(&f, p.points()).unwrap();
        assert_eq!(cfg.cross_ratios().unwrap(), q);
        assert_eq!(normalize_config(&cfg).unwrap(), p);
        assert!(p.is_symmetric());
        let p = NormalizedParams::from_real(c(&f, 0, 1), FieldElement::one(&f), FieldElement::zero(&f)).unwrap();
        assert!(!p.is_symmetric());
        // tangent of (p1, p2, p3) vanishes at (2, 0, 0)
        assert!(cfg.tangent(1, 2, 3).unwrap().is_zero());
    }

    #[test]
    fn general_params_round_trip() {
        let f = qi();
        let p = NormalizedParams::from_real(c(&f, 3, -2), FieldElement::from_int(&f, 5), FieldElement::from_int(&f, -1)).unwrap();
        let cfg = ConfigFour::new(&f, p.points()).unwrap();
        let q = cfg.cross_ratios().unwrap();
        assert_eq!(q, p.invariants().unwrap());
        let tab = q.table().unwrap();
        assert_eq!(tab.eq_cr_holds(), [true; 3]);
        assert!(tab.cycles_close());
        for face in [[0, 1, 2], [0, 1, 3], [0, 2, 3], [1, 2, 3], [0, 3, 2], [0, 2, 1], [2, 1, 3]] {
            assert!(face_identity_exact(&cfg, face).unwrap(), "face {face:?}");
            assert!(verify_face_identity(&cfg, face, 128).unwrap());
        }
        for perm in [[0, 2, 1, 3], [1, 3, 0, 2], [3, 0, 2, 1]] {
            let [a, b, cc, d] = perm;
            assert_eq!(cfg.x(a, b, cc, d).unwrap(), tab.x(a, b, cc, d));
        }
    }

    #[test]
    fn quadruple_inverts_to_params() {
        let f = qi();
        for (x, y, s, t) in [(3, -2, 5, -1), (2, 0, 0, 0), (-1, 4, 2, 7)] {
            let p = NormalizedParams::from_real(c(&f, x, y), FieldElement::from_int(&f, s), FieldElement::from_int(&f, t)).unwrap();
            let Ok(q) = p.invariants() else { continue };
            assert_eq!(params_from_quadruple(&q).unwrap(), p);
        }
    }

    #[test]
    fn points_without_i() {
        let f = NumberField::imaginary_quadratic(int(15)).unwrap();
        let th = FieldElement::generator(&f);
        assert!(matches!(
            Point::from_z_t(FieldElement::one(&f), FieldElement::one(&f)),
            Err(Error::FieldLacksI(_))
        ));
        let p = Point::from_z_it(FieldElement::one(&f), th.clone()).unwrap();
        assert!(p.lift(&f).is_null());
        assert_eq!(Point::from_lift(&p.lift(&f).scale(&th)).unwrap(), p);
    }
}
