//! One PASS/FAIL line per acceptance criterion. Exits nonzero on failure.

mod common;

use std::process::ExitCode;
use std::time::{Duration, Instant};

use crbloch::catalog::{self, CatalogEntry};
use crbloch::crgeom::Point;
use crbloch::dilog::d_of_element;
use crbloch::numfield::{int, rat};
use crbloch::prebloch::{pairing_identity_check, verify_stages, Mode, PreBlochElement, RelationKind};
use crbloch::simplicial::{beta_triangulation, boundary_check, double_of, side_pairing, validate_structure};
use crbloch::wedge::delta_vanishes;
use crbloch::{FieldElement, NumberField};
use num_rational::BigRational;
use rand::{Rng, SeedableRng};

type Outcome = Result<String, String>;

fn ensure(ok: bool, msg: impl Into<String>) -> Result<(), String> {
    if ok {
        Ok(())
    } else {
        Err(msg.into())
    }
}

fn e<T: std::fmt::Display>(x: T) -> String {
    x.to_string()
}

/// Runs the shipped chain and returns the verified intermediate values.
fn run_chain(entry: &CatalogEntry) -> Result<Vec<PreBlochElement>, String> {
    let beta = beta_triangulation(&entry.triangulation).map_err(e)?;
    match verify_stages(&beta, &entry.stages, Mode::Extended).map_err(e)? {
        Ok(chain) => Ok(chain),
        Err((i, residual)) => Err(format!("stage {i} leaves {residual}")),
    }
}

fn whitehead_reproduction() -> Outcome {
    let start = Instant::now();
    let w = catalog::entry("whitehead", None).map_err(e)?;
    let f = w.triangulation.field().clone();
    // A-values as printed, with θ = √−15 = √15·i
    let c = |a: (i64, i64), b: (i64, i64)| FieldElement::new(&f, vec![rat(a.0, a.1), rat(b.0, b.1)]).unwrap();
    let a = &w.triangulation.tets()[0].quad;
    ensure(
        a.z01 == c((-1, 8), (1, 8)) && a.z10 == c((-2, 1), (0, 1)) && a.z23 == c((-3, 4), (1, 4)) && a.z32 == c((1, 2), (-1, 6)),
        "catalog A-values differ from the expected values",
    )?;
    ensure(validate_structure(&w.triangulation).passed(), "cross-ratio relation check failed")?;
    let chain = run_chain(&w)?;
    let mut four_half = PreBlochElement::zero(&f);
    four_half.add_term(&c((1, 2), (0, 1)), 4).map_err(e)?;
    ensure(chain.first() == Some(&four_half), "first stage is not 4[1/2]")?;
    ensure(chain.last() == Some(&PreBlochElement::c_f(&f, 2)), "chain does not end at 2c_F")?;
    let beta = beta_triangulation(&w.triangulation).map_err(e)?;
    ensure(delta_vanishes(&beta).map_err(e)?, "δ(β(W)) has a nonzero canonical form")?;
    let d = d_of_element(&beta, common::PREC).map_err(e)?;
    ensure(d.contains_zero() && common::below_1e30(&d), format!("D(β(W)) = {d:?}"))?;
    let t = start.elapsed();
    ensure(t < Duration::from_secs(10), format!("took {t:?}"))?;
    Ok(format!(
        "β(W) = 4[1/2] = 2·c_F; certificate VERIFIED (extended mode); δ = 0; |D| ≤ {:.1e}; {:.2}s",
        d.rad_f64(),
        t.as_secs_f64()
    ))
}

fn whitehead_torsion() -> Outcome {
    let w = catalog::entry("whitehead", None).map_err(e)?;
    ensure(catalog::verify_torsion(&w, Mode::Extended).map_err(e)?, "3·β(W) does not reduce to 0")?;
    Ok("3·β(W) → 0 via six_c: order divides 3 (verified); exact order 3 not machine-verified".into())
}

fn figure_eight_family() -> Outcome {
    let mut notes = Vec::new();
    for (n, d) in [(1, 2), (-1, 2), (1, 8)] {
        let b = rat(n, d);
        ensure(pairing_identity_check(b.clone()).map_err(e)?, format!("pairing identity fails at β = {b}"))?;
        let entry = catalog::fig8_family(b.clone()).map_err(e)?;
        let chain = run_chain(&entry)?;
        let f = entry.triangulation.field().clone();
        let last = chain.last().cloned().unwrap_or_else(|| PreBlochElement::zero(&f));
        if (n, d) == (1, 2) {
            // ζ = (1 + √−3)/2 with the family generator θ = √3·i
            let zeta = FieldElement::new(&f, vec![rat(1, 2), rat(1, 2)]).map_err(e)?;
            let mut mid = PreBlochElement::zero(&f);
            mid.add_term(&zeta, 4).map_err(e)?;
            mid.add_term(&zeta.conj(), 4).map_err(e)?;
            ensure(chain[0] == mid, format!("intermediate form is {}", chain[0]))?;
            ensure(last.is_zero(), format!("β(K) reduces to {last}"))?;
            notes.push("β=1/2: 4([ζ]+[σζ]) → 0".to_string());
        } else {
            // the P(F) value is 2c_F, and c_F vanishes in P(C)
            ensure(last == PreBlochElement::c_f(&f, 2), format!("β(K) reduces to {last}"))?;
            notes.push(format!("β={b}: 2c_F in P(F), 0 in P(C)"));
        }
    }
    Ok(format!("pairing identity exact; β(K) = 0 VERIFIED ({})", notes.join("; ")))
}

fn figure_eight_representations() -> Outcome {
    let r1 = catalog::entry("fig8-rep1", None).map_err(e)?;
    let r2 = catalog::entry("fig8-rep2", None).map_err(e)?;
    let f = r1.triangulation.field().clone();
    let b = FieldElement::new(&f, vec![rat(5, 4), rat(-1, 4)]).map_err(e)?;
    let uses_chain = r1.stages.iter().flat_map(|s| &s.relations).any(|r| {
        r.kind == RelationKind::FiveTerm(FieldElement::from_rational(&f, rat(1, 2)), b.scale(&rat(1, 2)))
    });
    ensure(uses_chain, "rep1 certificate lacks five_term(1/2, b/2)")?;
    let c1 = run_chain(&r1)?;
    ensure(c1.last() == Some(&PreBlochElement::c_f(&f, -2)), "β₁(K) ≠ −2c_F")?;
    let c2 = run_chain(&r2)?;
    ensure(c2.last().map(|x| x.is_zero()) == Some(true), "β₂(K) ≠ 0")?;
    let b1 = beta_triangulation(&r1.triangulation).map_err(e)?;
    ensure(delta_vanishes(&b1).map_err(e)?, "δ(β₁(K)) ≠ 0")?;
    ensure(catalog::verify_torsion(&r1, Mode::Extended).map_err(e)?, "3·β₁(K) does not reduce to 0")?;
    Ok("β₁(K) = −2c_F VERIFIED; β₂(K) = 0 VERIFIED; δ(β₁(K)) = 0; 3·β₁(K) → 0".into())
}

/// Left Heisenberg translation (z, t) ↦ (z + a, t + s + 2 Im(a z̄)), written
/// in u = i·t coordinates.
fn translate(p: &Point, a: &FieldElement, s: &BigRational) -> Point {
    match p {
        Point::Infinity => Point::Infinity,
        Point::Heisenberg { z, u } => {
            let f = z.field();
            let i = FieldElement::generator(f);
            // i·2 Im(a z̄) = a z̄ - ā z
            let cross = &(a * &z.conj()) - &(&a.conj() * z);
            let u2 = &(u + &i.scale(s)) + &cross;
            Point::from_z_it(z + a, u2).unwrap()
        }
    }
}

fn d_vanishing() -> Outcome {
    let mut worst = 0f64;
    for name in catalog::NAMES {
        let entry = catalog::entry(name, None).map_err(e)?;
        let beta = beta_triangulation(&entry.triangulation).map_err(e)?;
        let d = d_of_element(&beta, common::PREC).map_err(e)?;
        ensure(common::d_ok(&d), format!("{name}: D = {d:?}"))?;
        worst = worst.max(d.rad_f64());
    }
    let f: std::sync::Arc<NumberField> = common::qi();
    let i = FieldElement::generator(&f);
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(2024);
    for k in 0..50 {
        let pts = common::random_generic_four(&mut rng, &f);
        let a = &FieldElement::from_int(&f, rng.gen_range(-5..=5)) + &i.scale(&int(rng.gen_range(-5..=5)));
        let s = rat(rng.gen_range(-9..=9), rng.gen_range(1..=2));
        let moved: Vec<Point> = pts.iter().map(|p| translate(p, &a, &s)).collect();
        let g = side_pairing(&f, [&pts[0], &pts[1], &pts[2]], [&moved[0], &moved[1], &moved[2]]).map_err(e)?;
        let t = double_of(&f, pts.clone(), Some(&g)).map_err(e)?;
        ensure(
            t.tets()[1].points.as_ref().map(|p| p.to_vec()) == Some(moved),
            format!("double {k}: side pairing disagrees with the translation"),
        )?;
        ensure(boundary_check(&t).map_err(e)?, format!("double {k}: boundary does not cancel"))?;
        let d = common::signed_d(t.tets());
        ensure(common::d_ok(&d), format!("double {k}: D = {d:?}"))?;
        worst = worst.max(d.rad_f64());
    }
    Ok(format!("D(β) ∋ 0 for {} catalog entries and 50 random doubles; max radius {worst:.1e}", catalog::NAMES.len()))
}

fn property_suites() -> Outcome {
    let suites: [(&str, fn(u32) -> Result<(), String>); 7] = [
        ("cross-ratio relations", common::prop_cr_relations),
        ("similarity", common::prop_similarity),
        ("symmetry criterion", common::prop_symmetry),
        ("five-term D", common::prop_five_term_d),
        ("Cartan cocycle", common::prop_cartan_cocycle),
        ("face identity", common::prop_face_identity),
        ("Pachner 2-3/1-4", common::prop_pachner),
    ];
    for (name, run) in suites {
        run(200).map_err(|m| format!("{name}: {m}"))?;
    }
    Ok("7 suites × 200 instances".into())
}

fn wedge_oracle() -> Outcome {
    let (agree, total) = common::wedge_oracle_agreement(500, 13);
    ensure(agree == total, format!("{agree}/{total} agree"))?;
    Ok(format!("{agree}/{total} agree with the tensor-quotient oracle"))
}

fn main() -> ExitCode {
    let criteria: [(&str, fn() -> Outcome); 7] = [
        ("1 whitehead reproduction", whitehead_reproduction),
        ("2 whitehead torsion", whitehead_torsion),
        ("3 figure-eight family", figure_eight_family),
        ("4 figure-eight representations", figure_eight_representations),
        ("5 D(β) vanishing", d_vanishing),
        ("6 property suites", property_suites),
        ("7 wedge oracle", wedge_oracle),
    ];
    let mut failed = 0;
    for (name, run) in criteria {
        match run() {
            Ok(msg) => println!("PASS criterion {name}: {msg}"),
            Err(msg) => {
                failed += 1;
                println!("FAIL criterion {name}: {msg}");
            }
        }
    }
    println!(
        "SKIP criterion 8 out of scope: non-triviality of the order-3 torsion, the full move invariance in P(C) and CS via ρ are not machine-checked"
    );
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
