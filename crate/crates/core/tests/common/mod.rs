#![allow(dead_code)]

use std::sync::Arc;

use crbloch::ball::RealBall;
use crbloch::crgeom::{cartan_angle, cartan_tangent, face_product, is_generic, minus_exp_2ia, ConfigFour, NormalizedParams, Point};
use crbloch::dilog::{d_field_element, d_of_element};
use crbloch::numfield::{int, rat};
use crbloch::prebloch::{beta_config, relation_value, RelationKind};
use crbloch::simplicial::{edge_compatibility_five, face_compatibility_five, pachner_14, pachner_23, TetRecord};
use crbloch::wedge::{build_mult_basis, wedge_reduce, WedgeElement};
use crbloch::{Error, FieldElement, NumberField};
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use proptest::prelude::*;
use proptest::test_runner::{Config, TestCaseError, TestRunner};

pub const PREC: u32 = 128;

/// 2^-83 < 10^-25
pub fn below_1e25(b: &RealBall) -> bool {
    b.rad_rational() < BigRational::new(1.into(), num_bigint::BigInt::from(10).pow(25))
}

pub fn below_1e30(b: &RealBall) -> bool {
    b.rad_rational() < BigRational::new(1.into(), num_bigint::BigInt::from(10).pow(30))
}

pub fn qi() -> Arc<NumberField> {
    NumberField::imaginary_quadratic(int(1)).unwrap()
}

fn small_rational() -> impl Strategy<Value = BigRational> {
    (-12i64..=12, 1i64..=3).prop_map(|(n, d)| rat(n, d))
}

fn gaussian(f: &Arc<NumberField>) -> impl Strategy<Value = FieldElement> {
    let f = f.clone();
    (small_rational(), small_rational()).prop_map(move |(a, b)| FieldElement::new(&f, vec![a, b]).unwrap())
}

/// A point of S³ over Q(i); roughly one in ten is ∞.
pub fn point(f: &Arc<NumberField>) -> impl Strategy<Value = Point> {
    let f2 = f.clone();
    prop_oneof![
        1 => Just(Point::Infinity),
        9 => (gaussian(f), small_rational()).prop_map(move |(z, t)| {
            Point::from_z_it(z, FieldElement::generator(&f2).scale(&t)).unwrap()
        }),
    ]
}

fn runner(cases: u32) -> TestRunner {
    TestRunner::new(Config {
        cases,
        max_global_rejects: 100_000,
        failure_persistence: None,
        ..Config::default()
    })
}

fn check(ok: bool, what: impl FnOnce() -> String) -> Result<(), TestCaseError> {
    if ok {
        Ok(())
    } else {
        Err(TestCaseError::fail(what()))
    }
}

fn generic_config(f: &Arc<NumberField>, pts: [Point; 4]) -> Result<ConfigFour, TestCaseError> {
    if !is_generic(f, &pts) {
        return Err(TestCaseError::reject("not generic"));
    }
    ConfigFour::new(f, pts).map_err(|e| TestCaseError::reject(e.to_string()))
}

fn finish(r: Result<(), proptest::test_runner::TestError<impl std::fmt::Debug>>) -> Result<(), String> {
    r.map_err(|e| e.to_string())
}

fn four(f: &Arc<NumberField>) -> impl Strategy<Value = [Point; 4]> {
    [point(f), point(f), point(f), point(f)]
}

fn five(f: &Arc<NumberField>) -> impl Strategy<Value = [Point; 5]> {
    [point(f), point(f), point(f), point(f), point(f)]
}

/// The three cross-ratio relations on the table induced by the quadruple.
pub fn prop_cr_relations(cases: u32) -> Result<(), String> {
    let f = qi();
    finish(runner(cases).run(&four(&f), |pts| {
        let c = generic_config(&f, pts)?;
        let tab = c.cross_ratios().unwrap().table().unwrap();
        check(tab.eq_cr_holds() == [true; 3], || format!("{:?}", c.points()))
    }))
}

/// The 24-value table built from four values closes under the similarity
/// relations and agrees with every cross-ratio computed from the lifts.
pub fn prop_similarity(cases: u32) -> Result<(), String> {
    let f = qi();
    finish(runner(cases).run(&four(&f), |pts| {
        let c = generic_config(&f, pts)?;
        let tab = c.cross_ratios().unwrap().table().unwrap();
        check(tab.cycles_close(), || "similarity cycles".into())?;
        for (i, j, k, l) in permutations4() {
            let direct = c.x(i, j, k, l).unwrap();
            check(direct == tab.x(i, j, k, l), || format!("X({i}{j}{k}{l})"))?;
        }
        Ok(())
    }))
}

pub fn permutations4() -> Vec<(usize, usize, usize, usize)> {
    let mut out = Vec::new();
    for i in 0..4 {
        for j in 0..4 {
            for k in 0..4 {
                if i + j + k > 6 {
                    continue;
                }
                let l = 6 - i - j - k;
                if i != j && j != k && i != k && l != i && l != j && l != k && l < 4 {
                    out.push((i, j, k, l));
                }
            }
        }
    }
    out
}

/// t = s or t + s = 2(s Re z + Im z) exactly when |z01| = |z32|.
pub fn prop_symmetry(cases: u32) -> Result<(), String> {
    let f = qi();
    let strat = (gaussian(&f), small_rational(), small_rational(), 0u8..3);
    finish(runner(cases).run(&strat, |(z, s, t, mode)| {
        let re = z.real_part().as_rational().unwrap();
        // the generator of Q(i) is i itself
        let im = z.coeffs()[1].clone();
        let t = match mode {
            0 => s.clone(),
            1 => (&s * &re + &im) * int(2) - &s,
            _ => t,
        };
        let p = NormalizedParams::from_real(z.clone(), FieldElement::from_rational(&f, s), FieldElement::from_rational(&f, t))
            .map_err(|e| TestCaseError::reject(e.to_string()))?;
        let q = p.invariants().map_err(|e| TestCaseError::reject(e.to_string()))?;
        let norms = q.z01.abs_sqr() == q.z32.abs_sqr();
        check(p.is_symmetric() == norms, || format!("z = {z}, mode {mode}"))
    }))
}

pub fn d_ok(b: &RealBall) -> bool {
    b.contains_zero() && below_1e25(b)
}

pub fn prop_five_term_d(cases: u32) -> Result<(), String> {
    let f = qi();
    finish(runner(cases).run(&(gaussian(&f), gaussian(&f)), |(x, y)| {
        let v = relation_value(&f, &RelationKind::FiveTerm(x.clone(), y.clone()))
            .map_err(|e| TestCaseError::reject(e.to_string()))?;
        // each term separately, so nothing cancels symbolically
        let mut acc = RealBall::zero(PREC);
        for (z, n) in v.terms() {
            acc = acc.add(&d_field_element(z, PREC).unwrap().mul_int(n));
        }
        check(d_ok(&acc), || format!("x = {x}, y = {y}: {acc:?}"))
    }))
}

/// A(p1,p2,p3) - A(p0,p2,p3) + A(p0,p1,p3) - A(p0,p1,p2) = 0.
pub fn prop_cartan_cocycle(cases: u32) -> Result<(), String> {
    let f = qi();
    finish(runner(cases).run(&four(&f), |pts| {
        let c = generic_config(&f, pts)?;
        let p = c.points();
        let faces = [[1, 2, 3], [0, 2, 3], [0, 1, 3], [0, 1, 2]];
        let mut acc = RealBall::zero(PREC);
        for (n, [a, b, cc]) in faces.into_iter().enumerate() {
            let tau = cartan_tangent(&f, [&p[a], &p[b], &p[cc]]).unwrap();
            let ang = cartan_angle(&tau, PREC).unwrap();
            acc = if n % 2 == 0 { acc.add(&ang) } else { acc.sub(&ang) };
        }
        check(d_ok(&acc), || format!("{acc:?}"))
    }))
}

/// -e^{2iA(pi,pj,pk)} = z_il z_jl z_kl, numerically from tan A and exactly.
pub fn prop_face_identity(cases: u32) -> Result<(), String> {
    let f = qi();
    finish(runner(cases).run(&four(&f), |pts| {
        let c = generic_config(&f, pts)?;
        let tab = c.cross_ratios().unwrap().table().unwrap();
        for face in [[1, 2, 3], [0, 2, 3], [0, 1, 3], [0, 1, 2], [2, 1, 3]] {
            let tau = c.tangent(face[0], face[1], face[2]).unwrap();
            // -e^{2iA} = -(cos 2A + i sin 2A) with cos 2A = (1 - tan²)/(1 + tan²)
            let tan = tau.embed(PREC).unwrap().im;
            let one = RealBall::from_int(1, PREC);
            let t2 = tan.mul(&tan);
            let den = one.add(&t2);
            let re = one.sub(&t2).div(&den).unwrap().neg();
            let im = tan.mul_int(2).div(&den).unwrap().neg();
            let rhs = face_product(&tab, face).embed(PREC).unwrap();
            let (dr, di) = (re.sub(&rhs.re), im.sub(&rhs.im));
            check(d_ok(&dr) && d_ok(&di), || format!("face {face:?}"))?;
            // exact form of the same identity
            check(minus_exp_2ia(&tau).unwrap() == face_product(&tab, face), || format!("exact face {face:?}"))?;
        }
        Ok(())
    }))
}

pub fn signed_d(tets: &[TetRecord]) -> RealBall {
    let mut acc = RealBall::zero(PREC);
    for t in tets {
        let b = beta_config(&t.quad).unwrap();
        acc = acc.add(&d_of_element(&b, PREC).unwrap().mul_int(t.sign as i64));
    }
    acc
}

/// 2-3 and 1-4 moves: D agrees on both sides; outputs satisfy the edge and
/// face compatibility conditions exactly.
pub fn prop_pachner(cases: u32) -> Result<(), String> {
    let f = qi();
    finish(runner(cases).run(&five(&f), |u| {
        if !is_generic(&f, &u) {
            return Err(TestCaseError::reject("not generic"));
        }
        let (two, three) = match pachner_23(&f, &u) {
            Ok(x) => x,
            Err(Error::NotGeneric(_)) | Err(Error::DegenerateCrossRatio(_)) => return Err(TestCaseError::reject("degenerate")),
            Err(e) => return Err(TestCaseError::fail(e.to_string())),
        };
        let diff = signed_d(&two).sub(&signed_d(&three));
        check(d_ok(&diff), || format!("2-3 ΔD = {diff:?}"))?;
        check(edge_compatibility_five(&f, &u).unwrap(), || "edge compatibility".into())?;
        check(face_compatibility_five(&f, &u).unwrap(), || "face compatibility".into())?;
        let base = [u[0].clone(), u[1].clone(), u[2].clone(), u[3].clone()];
        let quad = pachner_14(&f, &base, &u[4]).map_err(|e| TestCaseError::fail(e.to_string()))?;
        let diff = signed_d(&two[..1]).sub(&signed_d(&quad));
        check(d_ok(&diff), || format!("1-4 ΔD = {diff:?}"))
    }))
}

/// Brute-force model of Λ̃²(Z/2 ⊕ Z^k): the tensor square as Z^{(k+1)²}
/// with torsion coordinates, modulo x⊗y + y⊗x. Coordinate 0 is -1.
pub struct WedgeOracle {
    k: usize,
    /// Echelon rows of the relation lattice.
    rows: Vec<Vec<i64>>,
}

impl WedgeOracle {
    pub fn new(k: usize) -> Self {
        let n = k + 1;
        let idx = |a: usize, b: usize| a * n + b;
        let mut gens: Vec<Vec<i64>> = Vec::new();
        for a in 0..n {
            for b in a..n {
                let mut v = vec![0; n * n];
                v[idx(a, b)] += 1;
                v[idx(b, a)] += 1;
                gens.push(v);
            }
        }
        // 2·(torsion ⊗ anything) = 0
        for b in 0..n {
            for (x, y) in [(0, b), (b, 0)] {
                let mut v = vec![0; n * n];
                v[idx(x, y)] = 2;
                gens.push(v);
            }
        }
        WedgeOracle { k, rows: echelon(gens, n * n) }
    }

    /// Tensor of exponent vectors (sign bit first).
    pub fn tensor(&self, a: &[i64], b: &[i64]) -> Vec<i64> {
        let n = self.k + 1;
        let mut v = vec![0; n * n];
        for i in 0..n {
            for j in 0..n {
                v[i * n + j] = a[i] * b[j];
            }
        }
        v
    }

    pub fn is_zero(&self, v: &[i64]) -> bool {
        let mut v = v.to_vec();
        for r in &self.rows {
            let p = r.iter().position(|x| *x != 0).unwrap();
            if v[p] % r[p] != 0 {
                return false;
            }
            let q = v[p] / r[p];
            for (x, y) in v.iter_mut().zip(r) {
                *x -= q * y;
            }
        }
        v.iter().all(|x| *x == 0)
    }
}

/// Integer row echelon form with positive pivots.
fn echelon(mut gens: Vec<Vec<i64>>, width: usize) -> Vec<Vec<i64>> {
    let mut rows = Vec::new();
    for col in 0..width {
        loop {
            let mut live: Vec<usize> = (0..gens.len()).filter(|i| gens[*i][col] != 0).collect();
            if live.is_empty() {
                break;
            }
            live.sort_by_key(|i| gens[*i][col].abs());
            let p = live[0];
            if live.len() == 1 {
                let mut r = gens.swap_remove(p);
                if r[col] < 0 {
                    r.iter_mut().for_each(|x| *x = -*x);
                }
                rows.push(r);
                break;
            }
            let pivot = gens[p].clone();
            for &i in &live[1..] {
                let q = gens[i][col] / pivot[col];
                for (x, y) in gens[i].iter_mut().zip(&pivot) {
                    *x -= q * y;
                }
            }
        }
        gens.retain(|g| g.iter().any(|x| *x != 0));
    }
    rows
}

pub const SMALL_PRIMES: [i64; 6] = [2, 3, 5, 7, 11, 13];

/// Sign bit and exponents over the small primes by trial division.
pub fn factor_rational(q: &BigRational) -> Vec<i64> {
    let mut out = vec![if q.is_negative() { 1 } else { 0 }];
    let mut n = q.numer().abs();
    let mut d = q.denom().clone();
    for p in SMALL_PRIMES {
        let p = num_bigint::BigInt::from(p);
        let mut e = 0;
        while (&n % &p).is_zero() {
            n /= &p;
            e += 1;
        }
        while (&d % &p).is_zero() {
            d /= &p;
            e -= 1;
        }
        out.push(e);
    }
    assert!(n.is_one() && d.is_one());
    out
}

/// Random sums Σ n (a ∧ b) over Q with a, b = ±Π p^e, e ∈ [-3, 3]; about
/// a third are built to vanish. Returns the number of agreements.
pub fn wedge_oracle_agreement(samples: usize, seed: u64) -> (usize, usize) {
    use rand::{Rng, SeedableRng};
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
    let q = NumberField::rationals();
    let oracle = WedgeOracle::new(SMALL_PRIMES.len());
    let basis_elems: Vec<FieldElement> = SMALL_PRIMES.iter().map(|p| FieldElement::from_int(&q, *p)).collect();
    let basis = build_mult_basis(&basis_elems, &q).unwrap();
    let rand_elem = |rng: &mut rand_chacha::ChaCha8Rng| -> BigRational {
        let mut x = BigRational::one();
        for p in SMALL_PRIMES {
            let e: i32 = rng.gen_range(-3..=3);
            if rng.gen_bool(0.5) {
                x *= BigRational::from_integer(p.into()).pow(e);
            }
        }
        if rng.gen_bool(0.5) {
            -x
        } else {
            x
        }
    };
    let mut agree = 0;
    for _ in 0..samples {
        let mut w = WedgeElement::zero(&q);
        let mut pairs: Vec<(BigRational, BigRational, i64)> = Vec::new();
        let terms = rng.gen_range(1..=4);
        let vanishing = rng.gen_bool(0.35);
        for _ in 0..terms {
            let a = rand_elem(&mut rng);
            let b = rand_elem(&mut rng);
            let n: i64 = rng.gen_range(-3..=3);
            if n == 0 {
                continue;
            }
            pairs.push((a.clone(), b.clone(), n));
            if vanishing {
                pairs.push((b, a, n));
            }
        }
        if rng.gen_bool(0.2) {
            let a = rand_elem(&mut rng);
            pairs.push((a.clone(), a, 2));
        }
        if rng.gen_bool(0.2) {
            let a = rand_elem(&mut rng);
            pairs.push((BigRational::from_integer((-1).into()), a, 2));
        }
        let mut tensor = vec![0i64; (SMALL_PRIMES.len() + 1).pow(2)];
        for (a, b, n) in &pairs {
            let fa = FieldElement::from_rational(&q, a.clone());
            let fb = FieldElement::from_rational(&q, b.clone());
            w.push(&fa, &fb, *n).unwrap();
            let t = oracle.tensor(&factor_rational(a), &factor_rational(b));
            for (x, y) in tensor.iter_mut().zip(t) {
                *x += n * y;
            }
        }
        let lib = wedge_reduce(&w, &basis).unwrap().is_zero();
        if lib == oracle.is_zero(&tensor) {
            agree += 1;
        }
    }
    (agree, samples)
}

/// Generic points for doubles: rejection sampling over Q(i).
pub fn random_generic_four(rng: &mut rand_chacha::ChaCha8Rng, f: &Arc<NumberField>) -> [Point; 4] {
    use rand::Rng;
    let i = FieldElement::generator(f);
    loop {
        let mut pts: Vec<Point> = vec![Point::Infinity];
        for _ in 0..3 {
            let z = &FieldElement::from_rational(f, rat(rng.gen_range(-9..=9), rng.gen_range(1..=3)))
                + &i.scale(&rat(rng.gen_range(-9..=9), rng.gen_range(1..=3)));
            let u = i.scale(&rat(rng.gen_range(-9..=9), rng.gen_range(1..=3)));
            pts.push(Point::from_z_it(z, u).unwrap());
        }
        let pts: [Point; 4] = pts.try_into().unwrap();
        if is_generic(f, &pts) && ConfigFour::new(f, pts.clone()).and_then(|c| c.cross_ratios()).is_ok() {
            return pts;
        }
    }
}
