//! Polynomials over F_p for small primes; used to certify irreducibility.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{ToPrimitive, Zero};

type Fp = Vec<u64>;

fn trim(mut a: Fp) -> Fp {
    while a.last() == Some(&0) {
        a.pop();
    }
    a
}

fn inv_mod(a: u64, p: u64) -> u64 {
    pow_mod(a, p - 2, p)
}

fn pow_mod(mut b: u64, mut e: u64, p: u64) -> u64 {
    let mut r = 1u64;
    b %= p;
    while e > 0 {
        if e & 1 == 1 {
            r = r * b % p;
        }
        b = b * b % p;
        e >>= 1;
    }
    r
}

fn rem(a: &Fp, m: &Fp, p: u64) -> Fp {
    let mut r = a.clone();
    let dm = m.len() - 1;
    let li = inv_mod(m[dm], p);
    while r.len() > dm {
        let top = *r.last().unwrap();
        if top != 0 {
            let c = top * li % p;
            let shift = r.len() - 1 - dm;
            for (j, &mj) in m.iter().enumerate() {
                r[shift + j] = (r[shift + j] + p - c * mj % p) % p;
            }
        }
        r.pop();
        r = trim(r);
    }
    trim(r)
}

fn mul_mod(a: &Fp, b: &Fp, m: &Fp, p: u64) -> Fp {
    if a.is_empty() || b.is_empty() {
        return Vec::new();
    }
    let mut out = vec![0u64; a.len() + b.len() - 1];
    for (i, &x) in a.iter().enumerate() {
        for (j, &y) in b.iter().enumerate() {
            out[i + j] = (out[i + j] + x * y) % p;
        }
    }
    rem(&trim(out), m, p)
}

fn gcd(a: &Fp, b: &Fp, p: u64) -> Fp {
    let (mut a, mut b) = (trim(a.clone()), trim(b.clone()));
    while !b.is_empty() {
        let r = rem(&a, &b, p);
        a = b;
        b = r;
    }
    a
}

/// Reduces an integer polynomial mod p; `None` when p divides the leading
/// coefficient.
fn reduce(f: &[BigInt], p: u64) -> Option<Fp> {
    let pb = BigInt::from(p);
    let r: Fp = f
        .iter()
        .map(|c| c.mod_floor(&pb).to_u64().unwrap())
        .collect();
    if r.last().copied().unwrap_or(0) == 0 {
        None
    } else {
        Some(r)
    }
}

/// Ben-Or test: f (degree d, unit leading coefficient mod p) is irreducible
/// over F_p iff gcd(f, x^{p^i} - x) = 1 for 1 <= i <= d/2.
pub fn is_irreducible_mod(f: &[BigInt], p: u64) -> bool {
    let Some(fp) = reduce(f, p) else {
        return false;
    };
    let d = fp.len() - 1;
    if d <= 1 {
        return d == 1;
    }
    let x: Fp = vec![0, 1];
    let mut xp = x.clone();
    for _ in 0..d / 2 {
        // xp <- xp^p mod f
        let mut acc: Fp = vec![1];
        let mut base = xp.clone();
        let mut e = p;
        while e > 0 {
            if e & 1 == 1 {
                acc = mul_mod(&acc, &base, &fp, p);
            }
            base = mul_mod(&base, &base, &fp, p);
            e >>= 1;
        }
        xp = acc;
        let mut diff = xp.clone();
        diff.resize(diff.len().max(2), 0);
        diff[1] = (diff[1] + p - 1) % p;
        let g = gcd(&fp, &trim(diff), p);
        if g.len() > 1 {
            return false;
        }
    }
    true
}

pub fn small_primes(limit: u64) -> impl Iterator<Item = u64> {
    (2..limit).filter(|&n| (2..).take_while(|k| k * k <= n).all(|k| n % k != 0))
}

/// Searches for a prime below `limit` modulo which f is irreducible.
pub fn irreducibility_witness(f: &[BigInt], limit: u64) -> Option<u64> {
    if f.iter().all(|c| c.is_zero()) {
        return None;
    }
    small_primes(limit).find(|&p| is_irreducible_mod(f, p))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ints(c: &[i64]) -> Vec<BigInt> {
        c.iter().map(|&n| BigInt::from(n)).collect()
    }

    #[test]
    fn x2_plus_15_has_witness() {
        let p = irreducibility_witness(&ints(&[15, 0, 1]), 10_000).unwrap();
        assert!(is_irreducible_mod(&ints(&[15, 0, 1]), p));
    }

    #[test]
    fn reducible_never_certified() {
        assert!(irreducibility_witness(&ints(&[-1, 0, 1]), 500).is_none());
        // x^4 + 1 is reducible mod every prime but irreducible over Q.
        assert!(irreducibility_witness(&ints(&[1, 0, 0, 0, 1]), 500).is_none());
    }

    #[test]
    fn cubic_mod_two() {
        assert!(is_irreducible_mod(&ints(&[1, 1, 0, 1]), 2));
        assert!(!is_irreducible_mod(&ints(&[0, 1, 0, 1]), 2));
    }
}
