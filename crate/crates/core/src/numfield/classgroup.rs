//! Ideal classes of imaginary quadratic orders as reduced binary quadratic
//! forms, and the lattice of principal ideals supported on a prime set.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{Signed, ToPrimitive};

use super::valuation::{PrimeIdealLabel, PrimeKind, QuadraticOrder};
use super::FieldElement;
use crate::error::{Error, Result};

/// Positive definite form a x^2 + b x y + c y^2.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct Form {
    pub a: i128,
    pub b: i128,
    pub c: i128,
}

fn ext_gcd(a: i128, b: i128) -> (i128, i128, i128) {
    // returns (g, x, y) with a x + b y = g >= 0
    let (mut r0, mut r1) = (a, b);
    let (mut x0, mut x1) = (1i128, 0i128);
    let (mut y0, mut y1) = (0i128, 1i128);
    while r1 != 0 {
        let q = r0.div_euclid(r1);
        (r0, r1) = (r1, r0 - q * r1);
        (x0, x1) = (x1, x0 - q * x1);
        (y0, y1) = (y1, y0 - q * y1);
    }
    if r0 < 0 {
        (-r0, -x0, -y0)
    } else {
        (r0, x0, y0)
    }
}

impl Form {
    pub fn discriminant(&self) -> i128 {
        self.b * self.b - 4 * self.a * self.c
    }

    pub fn identity(disc: i128) -> Form {
        let b = disc.rem_euclid(2);
        Form {
            a: 1,
            b,
            c: (b * b - disc) / 4,
        }
    }

    pub fn inverse(&self) -> Form {
        Form {
            a: self.a,
            b: -self.b,
            c: self.c,
        }
        .reduce()
    }

    pub fn reduce(&self) -> Form {
        let (mut a, mut b, mut c) = (self.a, self.b, self.c);
        loop {
            // bring b into (-a, a]
            if b <= -a || b > a {
                let two_a = 2 * a;
                let k = (a - b).div_euclid(two_a);
                let nb = b + k * two_a;
                c = (nb * nb - self.discriminant()) / (4 * a);
                b = nb;
            }
            if a > c {
                (a, b, c) = (c, -b, a);
                continue;
            }
            if a == c && b < 0 {
                b = -b;
            }
            return Form { a, b, c };
        }
    }

    pub fn is_identity(&self) -> bool {
        self.reduce() == Form::identity(self.discriminant())
    }

    /// Gauss composition followed by reduction.
    pub fn compose(&self, other: &Form) -> Form {
        let (f1, f2) = if self.a > other.a { (other, self) } else { (self, other) };
        let (a1, b1) = (f1.a, f1.b);
        let (a2, b2, c2) = (f2.a, f2.b, f2.c);
        let s = (b1 + b2) / 2;
        let n = b2 - s;
        let (d, y1) = if a2 % a1 == 0 {
            (a1, 0)
        } else {
            let (g, u, _) = ext_gcd(a2, a1);
            (g, u)
        };
        let (d1, x2, y2) = if s % d == 0 {
            (d, 0, -1)
        } else {
            let (g, x, y) = ext_gcd(s, d);
            (g, x, -y)
        };
        let v1 = a1 / d1;
        let v2 = a2 / d1;
        let r = (y1 * y2 * n - x2 * c2).rem_euclid(v1);
        let b3 = b2 + 2 * v2 * r;
        let a3 = v1 * v2;
        let c3 = (c2 * d1 + r * (b2 + v2 * r)) / v1;
        Form { a: a3, b: b3, c: c3 }.reduce()
    }

    pub fn pow(&self, k: u32) -> Form {
        let mut acc = Form::identity(self.discriminant());
        for _ in 0..k {
            acc = acc.compose(self);
        }
        acc
    }
}

fn small(n: &BigInt) -> Result<i128> {
    n.to_i128()
        .ok_or(Error::UnsupportedField)
}

/// The class of the prime ideal (p, omega - r).
pub fn prime_form(order: &QuadraticOrder, label: &PrimeIdealLabel) -> Result<Form> {
    let disc = small(&order.discriminant())?;
    let p = small(&label.p)?;
    let (t, n) = order_trace_norm(order)?;
    let r = match &label.kind {
        PrimeKind::Inert => return Ok(Form::identity(disc)),
        PrimeKind::Split { root } => small(root)?,
        PrimeKind::Ramified => (0..p)
            .find(|r| (r * r - t * r + n).rem_euclid(p) == 0)
            .ok_or_else(|| Error::Invalid(format!("no residue root for ramified {p}")))?,
        PrimeKind::Rational => return Err(Error::Invalid("rational label in a quadratic field".into())),
    };
    let f = Form {
        a: p,
        b: t - 2 * r,
        c: (r * r - t * r + n) / p,
    };
    debug_assert_eq!(f.discriminant(), disc);
    Ok(f.reduce())
}

fn order_trace_norm(order: &QuadraticOrder) -> Result<(i128, i128)> {
    let disc = small(&order.discriminant())?;
    let t = disc.rem_euclid(2);
    Ok((t, (t * t - disc) / 4))
}

/// A triangular basis of the lattice of exponent vectors v with
/// prod p_i^{v_i} principal. Every basis vector is nonnegative; row i has
/// its pivot in column i and no entries after it.
pub fn principal_lattice(order: &QuadraticOrder, primes: &[PrimeIdealLabel]) -> Result<Vec<Vec<i64>>> {
    let disc = small(&order.discriminant())?;
    let h = order.class_number() as i64;
    let classes = primes.iter().map(|p| prime_form(order, p)).collect::<Result<Vec<_>>>()?;
    let k = primes.len();
    let mut subgroup: Vec<(Form, Vec<i64>)> = vec![(Form::identity(disc), vec![0; k])];
    let mut rows = Vec::with_capacity(k);
    for (i, g) in classes.iter().enumerate() {
        let mut cur = *g;
        let mut m = 1i64;
        let hit = loop {
            if let Some((_, v)) = subgroup.iter().find(|(f, _)| *f == cur) {
                break v.clone();
            }
            cur = cur.compose(g);
            m += 1;
        };
        let mut row: Vec<i64> = hit.iter().map(|x| -x).collect();
        for x in row.iter_mut().take(i) {
            if *x < 0 {
                *x += h;
            }
        }
        row[i] = m;
        rows.push(row);
        let base = subgroup.clone();
        let mut power = *g;
        for t in 1..m {
            for (f, v) in &base {
                let mut v = v.clone();
                v[i] = t;
                subgroup.push((f.compose(&power), v));
            }
            power = power.compose(g);
        }
    }
    Ok(rows)
}

/// An element of the maximal order whose ideal is prod p_i^{v_i}, v >= 0.
pub fn principal_generator(
    order: &QuadraticOrder,
    primes: &[PrimeIdealLabel],
    v: &[i64],
) -> Result<FieldElement> {
    let mut norm = BigInt::from(1);
    for (p, e) in primes.iter().zip(v) {
        norm *= p.norm().pow(*e as u32);
    }
    let disc = order.discriminant();
    let absd = disc.abs();
    let (t, _) = order_trace_norm(order)?;
    let t = BigInt::from(t);
    // 4N = (2x + t y)^2 + |D| y^2
    let four_n: BigInt = &norm * 4;
    let ymax: BigInt = (&four_n / &absd).sqrt();
    let mut y = -ymax.clone();
    while y <= ymax {
        let rest = &four_n - &absd * &y * &y;
        let s: BigInt = rest.sqrt();
        if &s * &s == rest {
            for s in [s.clone(), -s.clone()] {
                let two_x = &s - &t * &y;
                if two_x.is_even() {
                    let x = two_x / 2;
                    let alpha = order.element(&x, &y);
                    if alpha.is_zero() {
                        continue;
                    }
                    let vals = primes
                        .iter()
                        .map(|p| order.valuation(&alpha, p))
                        .collect::<Result<Vec<_>>>()?;
                    if vals == v {
                        return Ok(alpha);
                    }
                }
            }
        }
        y += 1;
    }
    Err(Error::UnfactoredElement(format!(
        "no generator found for the ideal with exponents {v:?}"
    )))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numfield::{int, NumberField};

    fn order(n: i64) -> QuadraticOrder {
        QuadraticOrder::new(&NumberField::imaginary_quadratic(int(n)).unwrap()).unwrap()
    }

    #[test]
    fn composition_with_inverse_is_identity() {
        let o = order(95);
        for p in [2i64, 3, 5, 7, 11, 13, 19, 23] {
            for label in o.primes_above(&p.into()) {
                let f = prime_form(&o, &label).unwrap();
                assert!(f.compose(&f.inverse()).is_identity());
            }
        }
    }

    #[test]
    fn prime_classes_generate_group_of_order_h() {
        for n in [15i64, 23, 95, 5, 14] {
            let o = order(n);
            let mut primes = Vec::new();
            for p in [2i64, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31] {
                primes.extend(o.primes_above(&p.into()));
            }
            let lat = principal_lattice(&o, &primes).unwrap();
            let index: i64 = lat.iter().enumerate().map(|(i, r)| r[i]).product();
            assert_eq!(index as u64, o.class_number(), "d = -{n}");
        }
    }

    #[test]
    fn lattice_rows_have_generators() {
        let o = order(15);
        let primes: Vec<_> = [2i64, 3, 5].iter().flat_map(|p| o.primes_above(&(*p).into())).collect();
        let lat = principal_lattice(&o, &primes).unwrap();
        for row in &lat {
            assert!(row.iter().all(|x| *x >= 0));
            let g = principal_generator(&o, &primes, row).unwrap();
            let vals: Vec<i64> = primes.iter().map(|p| o.valuation(&g, p).unwrap()).collect();
            assert_eq!(&vals, row);
        }
    }
}
