//! Shipped example complexes with their proof certificates.

use num_rational::BigRational;

use crate::crgeom::Point;
use crate::error::{Error, Result};
use crate::format::{parse_certificate, parse_triangulation};
use crate::numfield::{int, FieldElement, NumberField};
use crate::prebloch::{apply_certificate, Fig8Family, Mode, PreBlochElement, RelationInstance, RelationKind, Stage};
use crate::simplicial::{beta_triangulation, double_of, side_pairing, TetRecord, Triangulation};

pub const NAMES: [&str; 5] = ["whitehead", "fig8-family", "fig8-rep1", "fig8-rep2", "synthetic-double"];

#[derive(Clone, Debug)]
pub struct CatalogEntry {
    pub name: String,
    /// Symbol used for β in reports, e.g. "β(W)".
    pub symbol: String,
    pub description: String,
    pub parameter: Option<BigRational>,
    pub triangulation: Triangulation,
    pub stages: Vec<Stage>,
    /// Extra qualification printed after the final verdict.
    pub note: Option<String>,
}

impl CatalogEntry {
    /// The value the certificate chain ends at.
    pub fn final_value(&self) -> PreBlochElement {
        self.stages
            .last()
            .map(|s| s.target.clone())
            .unwrap_or_else(|| PreBlochElement::zero(self.triangulation.field()))
    }
}

const WHITEHEAD: &str = include_str!("../catalog/whitehead.json");
const WHITEHEAD_CERT: &str = include_str!("../catalog/whitehead.cert.json");
const REP1: &str = include_str!("../catalog/fig8-rep1.json");
const REP1_CERT: &str = include_str!("../catalog/fig8-rep1.cert.json");
const REP2: &str = include_str!("../catalog/fig8-rep2.json");
const REP2_CERT: &str = include_str!("../catalog/fig8-rep2.cert.json");

/// Raw file texts of a fixed entry: triangulation and certificate.
pub fn shipped_files(name: &str) -> Option<(&'static str, &'static str)> {
    match name {
        "whitehead" => Some((WHITEHEAD, WHITEHEAD_CERT)),
        "fig8-rep1" => Some((REP1, REP1_CERT)),
        "fig8-rep2" => Some((REP2, REP2_CERT)),
        _ => None,
    }
}

fn fixed(name: &str, symbol: &str, description: &str) -> Result<CatalogEntry> {
    let (t, c) = shipped_files(name).expect("fixed entry");
    let triangulation = parse_triangulation(t)?;
    let stages = parse_certificate(c, triangulation.field())?;
    Ok(CatalogEntry {
        name: name.into(),
        symbol: symbol.into(),
        description: description.into(),
        parameter: None,
        triangulation,
        stages,
        note: None,
    })
}

/// Loads an entry. `beta` is used by `fig8-family` (default 1/2).
pub fn entry(name: &str, beta: Option<BigRational>) -> Result<CatalogEntry> {
    match name {
        "whitehead" => fixed(name, "β(W)", "Whitehead link complement, four tetrahedra over Q(√−15)"),
        "fig8-rep1" => fixed(name, "β₁(K)", "figure-eight knot, first cyclic-holonomy representation over Q(√−7)"),
        "fig8-rep2" => fixed(name, "β₂(K)", "figure-eight knot, second cyclic-holonomy representation over Q(√−7)"),
        "fig8-family" => fig8_family(beta.unwrap_or_else(|| BigRational::new(1.into(), 2.into()))),
        "synthetic-double" => synthetic_double(),
        other => Err(Error::Invalid(format!(
            "unknown catalog entry {other:?}; known: {}",
            NAMES.join(", ")
        ))),
    }
}

fn rel(kind: RelationKind, mult: i64) -> RelationInstance {
    RelationInstance::new(kind, mult)
}

/// The figure-eight family at a rational β with 5 − 8β a rational square.
pub fn fig8_family(beta: BigRational) -> Result<CatalogEntry> {
    let fam = Fig8Family::new(beta.clone())?;
    let f = fam.field.clone();
    let [qw, qz] = fam.quadruples();
    let triangulation = Triangulation::new(
        &f,
        vec![TetRecord::new([0, 1, 2, 3], qw), TetRecord::new([0, 1, 2, 3], qz)],
        vec![],
    )?;
    let w = fam.w12.clone();
    let one = FieldElement::one(&f);
    let (stages, note) = if fam.w12 == fam.z12 {
        // w = z = ζ: β(K) = 4([ζ] + [σζ]) and 1/ζ = σζ
        let mut mid = PreBlochElement::zero(&f);
        mid.add_term(&w, 4)?;
        mid.add_term(&w.conj(), 4)?;
        (
            vec![
                Stage {
                    target: mid,
                    relations: vec![],
                },
                Stage {
                    target: PreBlochElement::zero(&f),
                    relations: vec![rel(RelationKind::InvPair(w.clone()), 2)],
                },
            ],
            None,
        )
    } else {
        // [w] + [σz] = [w] + [1 - 1/w] pairs off up to c_F
        let wi = w.inv()?;
        let swi = w.conj().inv()?;
        let relations = vec![
            rel(RelationKind::InvPair(w.clone()), 1),
            rel(RelationKind::InvPair(w.conj()), 1),
            rel(RelationKind::InvPair(&one - &wi), 1),
            rel(RelationKind::InvPair(&one - &swi), 1),
            rel(RelationKind::OneMinus(wi), -2),
            rel(RelationKind::OneMinus(swi), -2),
            rel(RelationKind::SixC, -1),
        ];
        (
            vec![Stage {
                target: PreBlochElement::c_f(&f, 2),
                relations,
            }],
            Some("= 0 in P(C), where [z] + [1 − z] = 0".to_string()),
        )
    };
    Ok(CatalogEntry {
        name: "fig8-family".into(),
        symbol: "β(K)".into(),
        description: format!("figure-eight knot family at β = {beta}, field x² + {}", fam.alpha_sq),
        parameter: Some(beta),
        triangulation,
        stages,
        note,
    })
}

/// Two oppositely signed copies of one tetrahedron over Q(i), glued along
/// all four faces through a Heisenberg translation.
pub fn synthetic_double() -> Result<CatalogEntry> {
    let f = NumberField::imaginary_quadratic(int(1))?;
    let i = FieldElement::generator(&f);
    let p = |x: i64, y: i64, t: i64| Point::from_z_it(&FieldElement::from_int(&f, x) + &i.scale(&int(y)), i.scale(&int(t)));
    let pts = [Point::Infinity, p(0, 0, 0)?, p(1, 0, 3)?, p(2, 1, -1)?];
    let moved = [Point::Infinity, p(1, 0, 2)?, p(2, 0, 5)?];
    let g = side_pairing(&f, [&pts[0], &pts[1], &pts[2]], [&moved[0], &moved[1], &moved[2]])?;
    let triangulation = double_of(&f, pts, Some(&g))?;
    Ok(CatalogEntry {
        name: "synthetic-double".into(),
        symbol: "β(M)".into(),
        description: "synthetic double of a generic tetrahedron over Q(i)".into(),
        parameter: None,
        triangulation,
        stages: vec![Stage {
            target: PreBlochElement::zero(&f),
            relations: vec![],
        }],
        note: None,
    })
}

/// Three times the certificate, closed off by six_c, so that 3β reduces to
/// 0 whenever the chain ends at an even multiple of c_F.
pub fn torsion_certificate(stages: &[Stage], final_value: &PreBlochElement) -> Option<Vec<RelationInstance>> {
    if !final_value.is_cf_multiple() || (3 * final_value.cf_mult()) % 6 != 0 {
        return None;
    }
    let mut out: Vec<RelationInstance> = stages
        .iter()
        .flat_map(|s| s.relations.iter())
        .map(|r| RelationInstance::new(r.kind.clone(), 3 * r.mult))
        .collect();
    let k = 3 * final_value.cf_mult() / 6;
    if k != 0 {
        out.push(RelationInstance::new(RelationKind::SixC, k));
    }
    Some(out)
}

/// Checks 3β → 0 exactly.
pub fn verify_torsion(entry: &CatalogEntry, mode: Mode) -> Result<bool> {
    let beta = beta_triangulation(&entry.triangulation)?;
    let Some(cert) = torsion_certificate(&entry.stages, &entry.final_value()) else {
        return Ok(false);
    };
    Ok(apply_certificate(&beta.scale(3), &cert, mode)?.is_zero())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::prebloch::verify_stages;

    #[test]
    fn every_entry_verifies() {
        for name in NAMES {
            let e = entry(name, None).unwrap();
            let beta = beta_triangulation(&e.triangulation).unwrap();
            let chain = verify_stages(&beta, &e.stages, Mode::Extended).unwrap();
            assert!(chain.is_ok(), "{name}: {:?}", chain.err().map(|(i, r)| (i, r.to_string())));
        }
    }

    #[test]
    fn family_parameters() {
        for b in [(1, 2), (-1, 2), (1, 8)] {
            let e = fig8_family(BigRational::new(b.0.into(), b.1.into())).unwrap();
            let beta = beta_triangulation(&e.triangulation).unwrap();
            assert!(verify_stages(&beta, &e.stages, Mode::Extended).unwrap().is_ok(), "{b:?}");
        }
        assert!(matches!(fig8_family(BigRational::new(1.into(), 3.into())), Err(Error::OutsideFamily(_))));
    }
}
