//! The group F* ∧ F* = (F* ⊗ F*) / <x⊗y + y⊗x>, exact reduction of wedge
//! sums, and the map δ([z]) = z ∧ (1 - z).

use std::collections::BTreeMap;
use std::fmt;
use std::sync::Arc;

use num_bigint::BigInt;
use num_traits::Signed;

use crate::crgeom::ConfigFour;
use crate::error::{Error, Result};
use crate::numfield::classgroup::{principal_generator, principal_lattice};
use crate::numfield::valuation::{factor_integer, nf_valuations};
use crate::numfield::{FieldElement, NumberField, PrimeIdealLabel, QuadraticOrder};
use crate::prebloch::PreBlochElement;

/// A raw sum of wedges n·(a ∧ b), kept verbatim.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct WedgeElement {
    field: Arc<NumberField>,
    terms: Vec<(FieldElement, FieldElement, i64)>,
}

impl WedgeElement {
    pub fn zero(field: &Arc<NumberField>) -> Self {
        WedgeElement {
            field: field.clone(),
            terms: Vec::new(),
        }
    }

    pub fn field(&self) -> &Arc<NumberField> {
        &self.field
    }

    pub fn push(&mut self, a: &FieldElement, b: &FieldElement, n: i64) -> Result<()> {
        if *a.field() != self.field || *b.field() != self.field {
            return Err(Error::FieldMismatch);
        }
        if a.is_zero() || b.is_zero() {
            return Err(Error::ZeroElement);
        }
        if n != 0 {
            self.terms.push((a.clone(), b.clone(), n));
        }
        Ok(())
    }

    pub fn terms(&self) -> &[(FieldElement, FieldElement, i64)] {
        &self.terms
    }

    pub fn checked_add(&self, other: &WedgeElement) -> Result<WedgeElement> {
        if self.field != other.field {
            return Err(Error::FieldMismatch);
        }
        let mut out = self.clone();
        out.terms.extend(other.terms.iter().cloned());
        Ok(out)
    }

    pub fn scale(&self, k: i64) -> WedgeElement {
        WedgeElement {
            field: self.field.clone(),
            terms: if k == 0 {
                Vec::new()
            } else {
                self.terms.iter().map(|(a, b, n)| (a.clone(), b.clone(), n * k)).collect()
            },
        }
    }

    /// Every field element that occurs in some term.
    pub fn elements(&self) -> Vec<FieldElement> {
        let mut v: Vec<FieldElement> = self.terms.iter().flat_map(|(a, b, _)| [a.clone(), b.clone()]).collect();
        v.sort();
        v.dedup();
        v
    }
}

impl fmt::Display for WedgeElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        for (i, (a, b, n)) in self.terms.iter().enumerate() {
            if i > 0 {
                write!(f, " + ")?;
            }
            write!(f, "{n}·({a} ∧ {b})")?;
        }
        Ok(())
    }
}

/// δ(Σ n[z] + k c_F) = Σ n z∧(1 - z) + k (2∧(-1) + (-1)∧2).
pub fn delta_map(e: &PreBlochElement) -> WedgeElement {
    let field = e.field();
    let one = FieldElement::one(field);
    let mut w = WedgeElement::zero(field);
    for (z, n) in e.terms() {
        w.push(z, &(&one - z), n).expect("keys avoid 0 and 1");
    }
    if e.cf_mult() != 0 {
        let two = FieldElement::from_int(field, 2);
        let m1 = FieldElement::from_int(field, -1);
        w.push(&two, &m1, e.cf_mult()).unwrap();
        w.push(&m1, &two, e.cf_mult()).unwrap();
    }
    w
}

/// Exponents of an element: root-of-unity exponent and free coordinates.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Factorization {
    pub unit_exp: u32,
    pub coords: Vec<i64>,
}

/// Generators zeta (the roots of unity) and g_1..g_r such that every
/// occurring element is zeta^e · prod g_i^{c_i}. The g_i span the full group
/// of elements supported on the chosen primes, modulo roots of unity, so
/// the induced map on wedge squares is injective.
#[derive(Clone, Debug)]
pub struct MultiplicativeBasis {
    field: Arc<NumberField>,
    mu_order: u32,
    zeta: FieldElement,
    primes: Vec<PrimeIdealLabel>,
    lattice: Vec<Vec<i64>>,
    generators: Vec<FieldElement>,
}

impl MultiplicativeBasis {
    pub fn field(&self) -> &Arc<NumberField> {
        &self.field
    }

    pub fn mu_order(&self) -> u32 {
        self.mu_order
    }

    pub fn zeta(&self) -> &FieldElement {
        &self.zeta
    }

    pub fn primes(&self) -> &[PrimeIdealLabel] {
        &self.primes
    }

    pub fn generators(&self) -> &[FieldElement] {
        &self.generators
    }

    pub fn rank(&self) -> usize {
        self.generators.len()
    }

    pub fn factor(&self, a: &FieldElement) -> Result<Factorization> {
        if *a.field() != self.field {
            return Err(Error::FieldMismatch);
        }
        let unfactored = || Error::UnfactoredElement(format!("{a}"));
        let vals = nf_valuations(a, &self.primes)?;
        let k = self.primes.len();
        let mut rem = vals;
        let mut coords = vec![0i64; k];
        for i in (0..k).rev() {
            let piv = self.lattice[i][i];
            if rem[i] % piv != 0 {
                return Err(unfactored());
            }
            let c = rem[i] / piv;
            coords[i] = c;
            for (j, r) in rem.iter_mut().enumerate().take(i + 1) {
                *r -= c * self.lattice[i][j];
            }
        }
        let mut u = a.clone();
        for (g, c) in self.generators.iter().zip(&coords) {
            if *c != 0 {
                u = u.checked_div(&g.pow(*c)?)?;
            }
        }
        let mut z = FieldElement::one(&self.field);
        for e in 0..self.mu_order {
            if z == u {
                return Ok(Factorization { unit_exp: e, coords });
            }
            z = &z * &self.zeta;
        }
        Err(unfactored())
    }
}

fn rational_support(q: &num_rational::BigRational) -> Vec<BigInt> {
    factor_integer(q.numer())
        .into_iter()
        .chain(factor_integer(q.denom()))
        .map(|(p, _)| p.abs())
        .collect()
}

/// A basis factoring every listed element. Supported over Q and imaginary
/// quadratic fields.
pub fn build_mult_basis(elements: &[FieldElement], field: &Arc<NumberField>) -> Result<MultiplicativeBasis> {
    for a in elements {
        if *a.field() != *field {
            return Err(Error::FieldMismatch);
        }
        if a.is_zero() {
            return Err(Error::ZeroElement);
        }
    }
    match field.degree() {
        1 => {
            let mut ps: Vec<BigInt> = elements
                .iter()
                .flat_map(|a| rational_support(&a.as_rational().expect("degree one")))
                .collect();
            ps.sort();
            ps.dedup();
            let k = ps.len();
            let lattice = (0..k).map(|i| (0..k).map(|j| i64::from(i == j)).collect()).collect();
            let generators = ps
                .iter()
                .map(|p| FieldElement::from_rational(field, num_rational::BigRational::from_integer(p.clone())))
                .collect();
            let primes = ps
                .into_iter()
                .map(|p| PrimeIdealLabel {
                    p,
                    kind: crate::numfield::PrimeKind::Rational,
                })
                .collect();
            Ok(MultiplicativeBasis {
                field: field.clone(),
                mu_order: 2,
                zeta: FieldElement::from_int(field, -1),
                primes,
                lattice,
                generators,
            })
        }
        2 => {
            let order = QuadraticOrder::new(field).ok_or(Error::UnsupportedField)?;
            let mut ps: Vec<BigInt> = elements.iter().flat_map(|a| order.support_primes(a)).collect();
            ps.sort();
            ps.dedup();
            let primes: Vec<PrimeIdealLabel> = ps.iter().flat_map(|p| order.primes_above(p)).collect();
            let lattice = principal_lattice(&order, &primes)?;
            let generators = lattice
                .iter()
                .map(|row| principal_generator(&order, &primes, row))
                .collect::<Result<Vec<_>>>()?;
            let mu_order = order.roots_of_unity_order();
            let zeta = match mu_order {
                4 => order.sqrt_d().clone(),
                6 => order.omega().clone(),
                _ => FieldElement::from_int(field, -1),
            };
            Ok(MultiplicativeBasis {
                field: field.clone(),
                mu_order,
                zeta,
                primes,
                lattice,
                generators,
            })
        }
        _ => Err(Error::UnsupportedField),
    }
}

/// Basis for every element occurring in a wedge sum.
pub fn basis_for(w: &WedgeElement) -> Result<MultiplicativeBasis> {
    build_mult_basis(&w.elements(), w.field())
}

/// Coordinates of a wedge sum in the group generated by zeta and g_i:
/// free part on g_i ∧ g_j (i < j), g_i ∧ g_i mod 2, zeta ∧ g_i mod m and
/// zeta ∧ zeta mod 2.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CanonicalWedge {
    pub mu_order: u32,
    pub free: BTreeMap<(usize, usize), i128>,
    pub diag: Vec<u8>,
    pub mu: Vec<u32>,
    pub zeta_zeta: u8,
}

impl CanonicalWedge {
    pub fn zero(rank: usize, mu_order: u32) -> Self {
        CanonicalWedge {
            mu_order,
            free: BTreeMap::new(),
            diag: vec![0; rank],
            mu: vec![0; rank],
            zeta_zeta: 0,
        }
    }

    pub fn is_zero(&self) -> bool {
        self.free.is_empty() && self.diag.iter().all(|x| *x == 0) && self.mu.iter().all(|x| *x == 0) && self.zeta_zeta == 0
    }

    fn add_free(&mut self, i: usize, j: usize, n: i128) {
        if n == 0 {
            return;
        }
        let (key, n) = if i < j { ((i, j), n) } else { ((j, i), -n) };
        let e = self.free.entry(key).or_insert(0);
        *e += n;
        if *e == 0 {
            self.free.remove(&key);
        }
    }

    fn add_mu(&mut self, i: usize, n: i128) {
        let m = self.mu_order as i128;
        self.mu[i] = ((self.mu[i] as i128 + n).rem_euclid(m)) as u32;
    }

    /// Adds n·(a ∧ b) for factored a, b.
    fn add_wedge(&mut self, a: &Factorization, b: &Factorization, n: i128) {
        let r = a.coords.len();
        for i in 0..r {
            let ci = a.coords[i] as i128;
            if ci == 0 {
                continue;
            }
            for j in 0..r {
                let dj = b.coords[j] as i128;
                if dj == 0 {
                    continue;
                }
                if i == j {
                    self.diag[i] ^= ((n * ci * dj).rem_euclid(2)) as u8;
                } else {
                    self.add_free(i, j, n * ci * dj);
                }
            }
        }
        let (e, f) = (a.unit_exp as i128, b.unit_exp as i128);
        for j in 0..r {
            // zeta^e ∧ g_j^{d_j} + g_j^{c_j} ∧ zeta^f
            let t = n * (e * b.coords[j] as i128 - f * a.coords[j] as i128);
            if t != 0 {
                self.add_mu(j, t);
            }
        }
        self.zeta_zeta ^= ((n * e * f).rem_euclid(2)) as u8;
    }

    /// Componentwise sum.
    pub fn combine(&self, other: &CanonicalWedge) -> CanonicalWedge {
        let mut out = self.clone();
        for (&(i, j), &n) in &other.free {
            out.add_free(i, j, n);
        }
        for (i, d) in other.diag.iter().enumerate() {
            out.diag[i] ^= d;
        }
        for (i, m) in other.mu.iter().enumerate() {
            out.add_mu(i, *m as i128);
        }
        out.zeta_zeta ^= other.zeta_zeta;
        out
    }
}

pub fn wedge_reduce(w: &WedgeElement, b: &MultiplicativeBasis) -> Result<CanonicalWedge> {
    if *w.field() != *b.field() {
        return Err(Error::FieldMismatch);
    }
    let mut out = CanonicalWedge::zero(b.rank(), b.mu_order());
    let mut cache: BTreeMap<FieldElement, Factorization> = BTreeMap::new();
    let mut factor = |x: &FieldElement| -> Result<Factorization> {
        if let Some(f) = cache.get(x) {
            return Ok(f.clone());
        }
        let f = b.factor(x)?;
        cache.insert(x.clone(), f.clone());
        Ok(f)
    };
    for (a, c, n) in w.terms() {
        let fa = factor(a)?;
        let fc = factor(c)?;
        out.add_wedge(&fa, &fc, *n as i128);
    }
    Ok(out)
}

pub fn wedge_is_zero(w: &WedgeElement, b: &MultiplicativeBasis) -> Result<bool> {
    Ok(wedge_reduce(w, b)?.is_zero())
}

/// δ(e) = 0 in F* ∧ F*, over a basis built from the terms of δ(e).
pub fn delta_vanishes(e: &PreBlochElement) -> Result<bool> {
    let w = delta_map(e);
    wedge_is_zero(&w, &basis_for(&w)?)
}

/// Text report of a canonical form: basis, free entries, torsion bits.
pub fn report(b: &MultiplicativeBasis, c: &CanonicalWedge) -> String {
    let mut s = String::new();
    s.push_str(&format!("roots of unity: order {}, generator {}\n", b.mu_order(), b.zeta()));
    for (i, g) in b.generators().iter().enumerate() {
        s.push_str(&format!("g{i} = {g}\n"));
    }
    if c.free.is_empty() {
        s.push_str("free part: 0\n");
    } else {
        for ((i, j), n) in &c.free {
            s.push_str(&format!("free g{i}∧g{j}: {n}\n"));
        }
    }
    let diag: Vec<String> = c.diag.iter().map(|x| x.to_string()).collect();
    let mu: Vec<String> = c.mu.iter().map(|x| x.to_string()).collect();
    s.push_str(&format!("g∧g mod 2: [{}]\n", diag.join(", ")));
    s.push_str(&format!("ζ∧g mod {}: [{}]\n", b.mu_order(), mu.join(", ")));
    s.push_str(&format!("ζ∧ζ mod 2: {}\n", c.zeta_zeta));
    s
}

/// The sum of the four-term and twelve-term surface expressions in the
/// Hermitian products of the lifts, which agrees with -δ(β) of the
/// configuration up to 2-torsion.
pub fn surface_terms(c: &ConfigFour) -> Result<WedgeElement> {
    let l = c.lifts();
    let h = |i: usize, j: usize| l[i].herm(&l[j]);
    let hc = |i: usize, j: usize, k: usize| l[i].herm(&l[j].boxed(&l[k]));
    let ratio = |num: [(usize, usize); 3], den: [(usize, usize); 3]| -> Result<FieldElement> {
        let mut x = FieldElement::one(c.field());
        for (i, j) in num {
            x = &x * &h(i, j);
        }
        for (i, j) in den {
            x = x.checked_div(&h(i, j))?;
        }
        Ok(x)
    };
    let mut w = WedgeElement::zero(c.field());
    w.push(&hc(3, 0, 1), &ratio([(0, 1), (1, 3), (3, 0)], [(0, 3), (3, 1), (1, 0)])?, 1)?;
    w.push(&hc(2, 0, 1), &ratio([(0, 2), (2, 1), (1, 0)], [(0, 1), (1, 2), (2, 0)])?, 1)?;
    w.push(&hc(3, 0, 2), &ratio([(0, 3), (3, 2), (2, 0)], [(0, 2), (2, 3), (3, 0)])?, 1)?;
    w.push(&hc(2, 3, 1), &ratio([(1, 2), (2, 3), (3, 1)], [(1, 3), (3, 2), (2, 1)])?, 1)?;
    let triples: [[(usize, usize); 6]; 4] = [
        [(2, 0), (3, 0), (1, 0), (2, 0), (3, 0), (1, 0)],
        [(3, 1), (2, 1), (0, 1), (3, 1), (2, 1), (0, 1)],
        [(0, 2), (1, 2), (3, 2), (0, 2), (1, 2), (3, 2)],
        [(1, 3), (0, 3), (2, 3), (1, 3), (0, 3), (2, 3)],
    ];
    for t in triples {
        for k in 0..3 {
            let (a, b) = (t[2 * k], t[2 * k + 1]);
            w.push(&h(a.0, a.1), &h(b.0, b.1), 1)?;
        }
    }
    Ok(w)
}

/// True when 2·(-δ(β(c)) - surface_terms(c)) vanishes.
pub fn surface_identity_holds(c: &ConfigFour) -> Result<bool> {
    let beta = crate::prebloch::beta_config(&c.cross_ratios()?)?;
    let lhs = delta_map(&beta).scale(-1);
    let diff = lhs.checked_add(&surface_terms(c)?.scale(-1))?.scale(2);
    wedge_is_zero(&diff, &basis_for(&diff)?)
}
