//! JSON file formats for triangulations and certificates. Every number is
//! an exact rational string such as "-3/4"; field elements are coefficient
//! arrays in the power basis of the field generator.

use std::sync::Arc;

use num_rational::BigRational;
use serde::de::{self, Deserializer};
use serde::ser::Serializer;
use serde::{Deserialize, Serialize};

use crate::crgeom::{Point, Quadruple};
use crate::error::{Error, Result};
use crate::numfield::{FieldElement, NumberField};
use crate::prebloch::{Certificate, PreBlochElement, RelationInstance, RelationKind, Stage};
use crate::simplicial::{FaceRef, Pairing, TetRecord, Triangulation};

pub const SCHEMA_VERSION: u32 = 1;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Rational(pub BigRational);

impl Serialize for Rational {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(&self.0.to_string())
    }
}

impl<'de> Deserialize<'de> for Rational {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        parse_rational(&s).map(Rational).map_err(de::Error::custom)
    }
}

pub fn parse_rational(s: &str) -> std::result::Result<BigRational, String> {
    let t = s.trim();
    t.parse::<BigRational>()
        .map_err(|e| format!("invalid rational {s:?}: {e}"))
}

type Coeffs = Vec<Rational>;

fn coeffs_of(x: &FieldElement) -> Coeffs {
    x.coeffs().iter().cloned().map(Rational).collect()
}

fn element(field: &Arc<NumberField>, c: &Coeffs) -> Result<FieldElement> {
    if c.len() > field.degree() {
        return Err(Error::Invalid(format!(
            "element has {} coefficients but the field has degree {}",
            c.len(),
            field.degree()
        )));
    }
    FieldElement::new(field, c.iter().map(|q| q.0.clone()).collect())
}

#[derive(Clone, Debug, Serialize, Deserialize, PartialEq, Eq)]
#[serde(deny_unknown_fields)]
pub struct FieldSpec {
    pub minpoly: Coeffs,
    pub embedding: usize,
    pub sigma: Coeffs,
}

impl FieldSpec {
    pub fn of(field: &NumberField) -> FieldSpec {
        FieldSpec {
            minpoly: field.minpoly().coeffs().iter().cloned().map(Rational).collect(),
            embedding: field.embedding_index(),
            sigma: field.sigma_image().iter().cloned().map(Rational).collect(),
        }
    }

    pub fn build(&self) -> Result<Arc<NumberField>> {
        NumberField::new(
            self.minpoly.iter().map(|q| q.0.clone()).collect(),
            self.embedding,
            self.sigma.iter().map(|q| q.0.clone()).collect(),
        )
    }
}

#[derive(Clone, Debug, Serialize, Deserialize, PartialEq, Eq)]
#[serde(deny_unknown_fields)]
pub struct TetSpec {
    pub verts: [usize; 4],
    #[serde(default = "plus_one", skip_serializing_if = "is_plus_one")]
    pub sign: i8,
    pub z01: Coeffs,
    pub z10: Coeffs,
    pub z23: Coeffs,
    pub z32: Coeffs,
}

fn plus_one() -> i8 {
    1
}

fn is_plus_one(s: &i8) -> bool {
    *s == 1
}

/// "inf" or a Heisenberg point {"z": .., "it": ..} with it = i·t.
#[derive(Clone, Debug, Serialize, Deserialize, PartialEq, Eq)]
#[serde(untagged)]
pub enum PointSpec {
    Infinity(InfinityTag),
    Finite { z: Coeffs, it: Coeffs },
}

#[derive(Clone, Debug, Serialize, Deserialize, PartialEq, Eq)]
pub enum InfinityTag {
    #[serde(rename = "inf")]
    Inf,
}

impl PointSpec {
    fn of(p: &Point) -> PointSpec {
        match p {
            Point::Infinity => PointSpec::Infinity(InfinityTag::Inf),
            Point::Heisenberg { z, u } => PointSpec::Finite {
                z: coeffs_of(z),
                it: coeffs_of(u),
            },
        }
    }

    pub fn build(&self, field: &Arc<NumberField>) -> Result<Point> {
        match self {
            PointSpec::Infinity(_) => Ok(Point::Infinity),
            PointSpec::Finite { z, it } => Point::from_z_it(element(field, z)?, element(field, it)?),
        }
    }
}

#[derive(Clone, Debug, Serialize, Deserialize, PartialEq, Eq)]
#[serde(deny_unknown_fields)]
pub struct PairingSpec {
    pub face: [usize; 4],
    pub mate: [usize; 4],
}

#[derive(Clone, Debug, Serialize, Deserialize, PartialEq, Eq)]
#[serde(deny_unknown_fields)]
pub struct TriangulationFile {
    pub crb: u32,
    pub field: FieldSpec,
    pub tetrahedra: Vec<TetSpec>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub points: Option<Vec<[PointSpec; 4]>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub pairings: Option<Vec<PairingSpec>>,
}

fn json_error(e: serde_json::Error) -> Error {
    Error::Parse {
        line: e.line(),
        column: e.column(),
        message: e.to_string(),
    }
}

fn check_version(v: u32) -> Result<()> {
    if v != SCHEMA_VERSION {
        return Err(Error::Invalid(format!("unsupported schema version {v}")));
    }
    Ok(())
}

impl TriangulationFile {
    pub fn of(t: &Triangulation) -> TriangulationFile {
        let tetrahedra = t
            .tets()
            .iter()
            .map(|r| TetSpec {
                verts: r.verts,
                sign: r.sign,
                z01: coeffs_of(&r.quad.z01),
                z10: coeffs_of(&r.quad.z10),
                z23: coeffs_of(&r.quad.z23),
                z32: coeffs_of(&r.quad.z32),
            })
            .collect();
        let points = t
            .has_geometry()
            .then(|| t.tets().iter().map(|r| r.points.as_ref().expect("checked").clone().map(|p| PointSpec::of(&p))).collect());
        let pairings = (!t.pairings().is_empty()).then(|| {
            t.pairings()
                .iter()
                .map(|p| {
                    let f = |r: &FaceRef| [r.tet, r.verts[0], r.verts[1], r.verts[2]];
                    PairingSpec {
                        face: f(&p.face),
                        mate: f(&p.mate),
                    }
                })
                .collect()
        });
        TriangulationFile {
            crb: SCHEMA_VERSION,
            field: FieldSpec::of(t.field()),
            tetrahedra,
            points,
            pairings,
        }
    }

    pub fn build(&self) -> Result<Triangulation> {
        check_version(self.crb)?;
        let field = self.field.build()?;
        let mut tets = Vec::with_capacity(self.tetrahedra.len());
        for (n, s) in self.tetrahedra.iter().enumerate() {
            let quad = Quadruple::new([
                element(&field, &s.z01)?,
                element(&field, &s.z10)?,
                element(&field, &s.z23)?,
                element(&field, &s.z32)?,
            ]);
            let mut r = TetRecord::new(s.verts, quad);
            r.sign = s.sign;
            if let Some(pts) = &self.points {
                let p = pts
                    .get(n)
                    .ok_or_else(|| Error::Invalid(format!("no points listed for tetrahedron {n}")))?;
                let built: Vec<Point> = p.iter().map(|x| x.build(&field)).collect::<Result<_>>()?;
                r.points = Some(built.try_into().expect("four points"));
            }
            tets.push(r);
        }
        if let Some(pts) = &self.points {
            if pts.len() != tets.len() {
                return Err(Error::Invalid(format!(
                    "{} point lists for {} tetrahedra",
                    pts.len(),
                    tets.len()
                )));
            }
        }
        let pairings = self
            .pairings
            .iter()
            .flatten()
            .map(|p| Pairing {
                face: FaceRef::new(p.face[0], [p.face[1], p.face[2], p.face[3]]),
                mate: FaceRef::new(p.mate[0], [p.mate[1], p.mate[2], p.mate[3]]),
            })
            .collect();
        Triangulation::new(&field, tets, pairings)
    }
}

pub fn parse_triangulation(text: &str) -> Result<Triangulation> {
    let file: TriangulationFile = serde_json::from_str(text).map_err(json_error)?;
    file.build()
}

pub fn triangulation_to_json(t: &Triangulation) -> String {
    serde_json::to_string_pretty(&TriangulationFile::of(t)).expect("serializable") + "\n"
}

#[derive(Clone, Debug, Serialize, Deserialize, PartialEq, Eq)]
#[serde(deny_unknown_fields)]
pub struct RelationSpec {
    pub kind: String,
    #[serde(default)]
    pub args: Vec<Coeffs>,
    #[serde(default = "one_i64")]
    pub mult: i64,
}

fn one_i64() -> i64 {
    1
}

#[derive(Clone, Debug, Serialize, Deserialize, PartialEq, Eq)]
#[serde(deny_unknown_fields)]
pub struct TermSpec {
    pub x: Coeffs,
    pub n: i64,
}

/// Σ n[x] + cf·c_F.
#[derive(Clone, Debug, Default, Serialize, Deserialize, PartialEq, Eq)]
#[serde(deny_unknown_fields)]
pub struct ElementSpec {
    #[serde(default)]
    pub terms: Vec<TermSpec>,
    #[serde(default)]
    pub cf: i64,
}

#[derive(Clone, Debug, Serialize, Deserialize, PartialEq, Eq)]
#[serde(deny_unknown_fields)]
pub struct StageSpec {
    #[serde(default)]
    pub target: ElementSpec,
    pub relations: Vec<RelationSpec>,
}

#[derive(Clone, Debug, Serialize, Deserialize, PartialEq, Eq)]
#[serde(untagged)]
pub enum CertificateFile {
    Staged { crb: u32, stages: Vec<StageSpec> },
    Bare(Vec<RelationSpec>),
}

impl RelationSpec {
    fn of(r: &RelationInstance) -> RelationSpec {
        RelationSpec {
            kind: r.kind.name().to_string(),
            args: r.kind.args().iter().map(coeffs_of).collect(),
            mult: r.mult,
        }
    }

    fn build(&self, field: &Arc<NumberField>) -> Result<RelationInstance> {
        let args = self.args.iter().map(|c| element(field, c)).collect::<Result<Vec<_>>>()?;
        Ok(RelationInstance::new(RelationKind::from_parts(&self.kind, args)?, self.mult))
    }
}

impl ElementSpec {
    pub fn of(e: &PreBlochElement) -> ElementSpec {
        ElementSpec {
            terms: e.terms().map(|(x, n)| TermSpec { x: coeffs_of(x), n }).collect(),
            cf: e.cf_mult(),
        }
    }

    pub fn build(&self, field: &Arc<NumberField>) -> Result<PreBlochElement> {
        let mut e = PreBlochElement::zero(field);
        for t in &self.terms {
            e.add_term(&element(field, &t.x)?, t.n)?;
        }
        e.add_cf(self.cf);
        Ok(e)
    }
}

impl CertificateFile {
    pub fn of(stages: &[Stage]) -> CertificateFile {
        CertificateFile::Staged {
            crb: SCHEMA_VERSION,
            stages: stages
                .iter()
                .map(|s| StageSpec {
                    target: ElementSpec::of(&s.target),
                    relations: s.relations.iter().map(RelationSpec::of).collect(),
                })
                .collect(),
        }
    }

    pub fn build(&self, field: &Arc<NumberField>) -> Result<Vec<Stage>> {
        let relations = |rs: &[RelationSpec]| -> Result<Certificate> { rs.iter().map(|r| r.build(field)).collect() };
        match self {
            CertificateFile::Bare(rs) => Ok(vec![Stage {
                target: PreBlochElement::zero(field),
                relations: relations(rs)?,
            }]),
            CertificateFile::Staged { crb, stages } => {
                check_version(*crb)?;
                stages
                    .iter()
                    .map(|s| {
                        Ok(Stage {
                            target: s.target.build(field)?,
                            relations: relations(&s.relations)?,
                        })
                    })
                    .collect()
            }
        }
    }
}

/// A bare relation array means "reduces to 0"; a staged file lists
/// intermediate targets.
pub fn parse_certificate(text: &str, field: &Arc<NumberField>) -> Result<Vec<Stage>> {
    let file: CertificateFile = serde_json::from_str(text).map_err(json_error)?;
    file.build(field)
}

pub fn certificate_to_json(stages: &[Stage]) -> String {
    serde_json::to_string_pretty(&CertificateFile::of(stages)).expect("serializable") + "\n"
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numfield::int;
    use crate::simplicial::double_of;

    #[test]
    fn rational_strings() {
        assert_eq!(parse_rational("-3/4").unwrap(), BigRational::new((-3).into(), 4.into()));
        assert_eq!(parse_rational("6/8").unwrap(), BigRational::new(3.into(), 4.into()));
        assert!(parse_rational("1/0").is_err());
        assert!(parse_rational("0.5").is_err());
    }

    #[test]
    fn parse_errors_carry_positions() {
        let text = "{\n  \"crb\": 1,\n  \"field\": {\"minpoly\": [\"1/0\", \"0\", \"1\"], \"embedding\": 0, \"sigma\": [\"0\", \"-1\"]},\n  \"tetrahedra\": []\n}";
        match parse_triangulation(text) {
            Err(Error::Parse { line, .. }) => assert_eq!(line, 3),
            other => panic!("expected a parse error, got {other:?}"),
        }
    }

    #[test]
    fn geometric_double_round_trips() {
        let f = NumberField::imaginary_quadratic(int(1)).unwrap();
        let th = FieldElement::generator(&f);
        let pts = [
            Point::Infinity,
            Point::from_z_it(FieldElement::zero(&f), FieldElement::zero(&f)).unwrap(),
            Point::from_z_it(FieldElement::one(&f), th.scale(&int(3))).unwrap(),
            Point::from_z_it(&FieldElement::from_int(&f, 2) + &th, th.scale(&int(-1))).unwrap(),
        ];
        let d = double_of(&f, pts, None).unwrap();
        let text = triangulation_to_json(&d);
        assert_eq!(parse_triangulation(&text).unwrap(), d);
        assert!(text.contains("\"sign\": -1"));
    }

    #[test]
    fn bare_certificate_targets_zero() {
        let f = NumberField::imaginary_quadratic(int(7)).unwrap();
        let st = parse_certificate(r#"[{"kind": "six_c", "mult": -1}]"#, &f).unwrap();
        assert_eq!(st.len(), 1);
        assert!(st[0].target.is_zero());
        let again = parse_certificate(&certificate_to_json(&st), &f).unwrap();
        assert_eq!(again, st);
    }
}
