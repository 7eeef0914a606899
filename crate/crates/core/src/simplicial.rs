//! Triangulations carrying cross-ratio structures: validation, β(M),
//! boundary cancellation, development, Pachner moves and side pairings.

use std::collections::{BTreeMap, VecDeque};
use std::fmt;
use std::sync::Arc;

use crate::crgeom::{
    cartan_tangent, face_product, is_generic, params_from_quadruple, x_from_lifts, ConfigFour, Lift, Point, Quadruple,
};
use crate::error::{Error, Result};
use crate::numfield::{FieldElement, NumberField};
use crate::prebloch::{beta_config, PreBlochElement};

/// One tetrahedron: global vertex ids, orientation sign, invariants and
/// optionally its developed vertices.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TetRecord {
    pub verts: [usize; 4],
    pub sign: i8,
    pub quad: Quadruple,
    pub points: Option<[Point; 4]>,
}

impl TetRecord {
    pub fn new(verts: [usize; 4], quad: Quadruple) -> Self {
        TetRecord {
            verts,
            sign: 1,
            quad,
            points: None,
        }
    }

    /// A geometric tetrahedron; its invariants are computed from the points.
    pub fn from_points(field: &Arc<NumberField>, verts: [usize; 4], sign: i8, points: [Point; 4]) -> Result<Self> {
        let quad = ConfigFour::new(field, points.clone())?.cross_ratios()?;
        Ok(TetRecord {
            verts,
            sign,
            quad,
            points: Some(points),
        })
    }

    pub fn config(&self, field: &Arc<NumberField>) -> Result<ConfigFour> {
        let pts = self
            .points
            .clone()
            .ok_or_else(|| Error::MissingGeometry("tetrahedron has no vertex points".into()))?;
        ConfigFour::new(field, pts)
    }
}

/// An ordered triangle (local vertex indices) of one tetrahedron.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct FaceRef {
    pub tet: usize,
    pub verts: [usize; 3],
}

impl FaceRef {
    pub fn new(tet: usize, verts: [usize; 3]) -> Self {
        FaceRef { tet, verts }
    }

    pub fn opposite(&self) -> usize {
        crate::crgeom::opposite(self.verts)
    }

    fn unordered(&self) -> (usize, usize) {
        (self.tet, self.opposite())
    }
}

/// face.verts[m] is glued to mate.verts[m].
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Pairing {
    pub face: FaceRef,
    pub mate: FaceRef,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Triangulation {
    field: Arc<NumberField>,
    tets: Vec<TetRecord>,
    pairings: Vec<Pairing>,
}

fn perm_sign(p: &[usize]) -> i8 {
    let mut s = 1;
    for i in 0..p.len() {
        for j in i + 1..p.len() {
            if p[i] > p[j] {
                s = -s;
            }
        }
    }
    s
}

impl Triangulation {
    pub fn new(field: &Arc<NumberField>, tets: Vec<TetRecord>, pairings: Vec<Pairing>) -> Result<Self> {
        let mut used = BTreeMap::new();
        for (n, p) in pairings.iter().enumerate() {
            for f in [p.face, p.mate] {
                if f.tet >= tets.len() {
                    return Err(Error::Invalid(format!("pairing {n} refers to missing tetrahedron {}", f.tet)));
                }
                let [a, b, c] = f.verts;
                if a > 3 || b > 3 || c > 3 || a == b || b == c || a == c {
                    return Err(Error::Invalid(format!("pairing {n} has a malformed face {:?}", f.verts)));
                }
                if let Some(m) = used.insert(f.unordered(), n) {
                    return Err(Error::Invalid(format!("face {:?} paired twice (pairings {m} and {n})", f)));
                }
            }
        }
        for (s, t) in tets.iter().enumerate() {
            if t.sign != 1 && t.sign != -1 {
                return Err(Error::Invalid(format!("tetrahedron {s} has sign {}", t.sign)));
            }
            if *t.quad.field() != *field {
                return Err(Error::FieldMismatch);
            }
        }
        Ok(Triangulation {
            field: field.clone(),
            tets,
            pairings,
        })
    }

    pub fn field(&self) -> &Arc<NumberField> {
        &self.field
    }

    pub fn tets(&self) -> &[TetRecord] {
        &self.tets
    }

    pub fn pairings(&self) -> &[Pairing] {
        &self.pairings
    }

    pub fn has_geometry(&self) -> bool {
        self.tets.iter().all(|t| t.points.is_some())
    }

    /// Orientation induced on a listed face by its tetrahedron.
    pub fn face_orientation(&self, f: &FaceRef) -> i8 {
        let m = f.opposite();
        let t = &self.tets[f.tet];
        let parity = if m.is_multiple_of(2) { 1 } else { -1 };
        t.sign * parity * perm_sign(&f.verts)
    }

    fn mate_of(&self, tet: usize, opposite: usize) -> Option<(FaceRef, FaceRef)> {
        self.pairings.iter().find_map(|p| {
            if p.face.unordered() == (tet, opposite) {
                Some((p.face, p.mate))
            } else if p.mate.unordered() == (tet, opposite) {
                Some((p.mate, p.face))
            } else {
                None
            }
        })
    }

    /// Edge classes: members (tet, i, j) oriented consistently by transport
    /// through the pairings, and whether every face around them is paired.
    pub fn edge_classes(&self) -> Vec<EdgeClass> {
        let n = self.tets.len();
        let idx = |t: usize, a: usize, b: usize| -> usize {
            let (a, b) = if a < b { (a, b) } else { (b, a) };
            let k = [(0, 1), (0, 2), (0, 3), (1, 2), (1, 3), (2, 3)].iter().position(|e| *e == (a, b)).unwrap();
            t * 6 + k
        };
        let mut seen = vec![false; n * 6];
        let mut out = Vec::new();
        for t in 0..n {
            for (a, b) in [(0, 1), (0, 2), (0, 3), (1, 2), (1, 3), (2, 3)] {
                if seen[idx(t, a, b)] {
                    continue;
                }
                let mut members = Vec::new();
                let mut queue = VecDeque::from([(t, a, b)]);
                seen[idx(t, a, b)] = true;
                let mut closed = true;
                while let Some((s, i, j)) = queue.pop_front() {
                    members.push((s, i, j));
                    for opp in (0..4).filter(|m| *m != i && *m != j) {
                        let Some((here, there)) = self.mate_of(s, opp) else {
                            closed = false;
                            continue;
                        };
                        let pi = here.verts.iter().position(|v| *v == i).unwrap();
                        let pj = here.verts.iter().position(|v| *v == j).unwrap();
                        let (ni, nj) = (there.verts[pi], there.verts[pj]);
                        if !seen[idx(there.tet, ni, nj)] {
                            seen[idx(there.tet, ni, nj)] = true;
                            queue.push_back((there.tet, ni, nj));
                        }
                    }
                }
                out.push(EdgeClass { members, closed });
            }
        }
        out
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct EdgeClass {
    pub members: Vec<(usize, usize, usize)>,
    pub closed: bool,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Status {
    Pass,
    Fail,
    /// Not applicable, e.g. an edge whose surrounding faces are not all paired.
    Open,
}

impl fmt::Display for Status {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Status::Pass => "PASS",
            Status::Fail => "FAIL",
            Status::Open => "OPEN",
        })
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Check {
    pub id: String,
    pub status: Status,
    pub witness: String,
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Report {
    pub checks: Vec<Check>,
}

impl Report {
    fn push(&mut self, id: impl Into<String>, ok: bool, witness: impl Into<String>) {
        self.checks.push(Check {
            id: id.into(),
            status: if ok { Status::Pass } else { Status::Fail },
            witness: witness.into(),
        });
    }

    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.status != Status::Fail)
    }

    pub fn failures(&self) -> impl Iterator<Item = &Check> {
        self.checks.iter().filter(|c| c.status == Status::Fail)
    }
}

impl fmt::Display for Report {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for c in &self.checks {
            writeln!(f, "{} {} {}", c.id, c.status, c.witness)?;
        }
        Ok(())
    }
}

pub fn validate_structure(t: &Triangulation) -> Report {
    let mut r = Report::default();
    let mut tables = Vec::with_capacity(t.tets.len());
    for (s, tet) in t.tets.iter().enumerate() {
        let vals = tet.quad.to_array();
        let bad: Vec<String> = vals.iter().filter(|z| z.is_zero() || z.is_one()).map(|z| z.to_string()).collect();
        r.push(
            format!("tet{s}.nondegenerate"),
            bad.is_empty(),
            if bad.is_empty() {
                "all invariants avoid 0 and 1".to_string()
            } else {
                format!("DegenerateArgument: {}", bad.join(", "))
            },
        );
        let tab = if bad.is_empty() { tet.quad.table().ok() } else { None };
        if let Some(tab) = &tab {
            let eq = tab.eq_cr_holds();
            for (n, (i, j, k, l)) in [(0, 1, 2, 3), (0, 2, 1, 3), (0, 3, 1, 2)].into_iter().enumerate() {
                let lhs = tab.z(i, j) * tab.z(j, i);
                let rhs = (tab.z(k, l) * tab.z(l, k)).conj();
                r.push(
                    format!("tet{s}.crossratio{n}"),
                    eq[n],
                    format!("z{i}{j}·z{j}{i} = {lhs}; σ(z{k}{l}·z{l}{k}) = {rhs}"),
                );
            }
            r.push(format!("tet{s}.similarity"), tab.cycles_close(), "z_ij = 1/(1 - z_il)");
        } else if bad.is_empty() {
            r.push(format!("tet{s}.table"), false, "cross-ratio table is undefined");
        }
        if let Some(pts) = &tet.points {
            let geo = ConfigFour::new(&t.field, pts.clone()).and_then(|c| c.cross_ratios());
            match geo {
                Ok(q) => r.push(format!("tet{s}.geometry"), q == tet.quad, format!("points give z01 = {}", q.z01)),
                Err(e) => r.push(format!("tet{s}.geometry"), false, e.to_string()),
            }
        }
        tables.push(tab);
    }
    for (n, p) in t.pairings.iter().enumerate() {
        match (&tables[p.face.tet], &tables[p.mate.tet]) {
            (Some(a), Some(b)) => {
                let fa = face_product(a, p.face.verts);
                let fb = face_product(b, p.mate.verts);
                r.push(format!("pair{n}.face"), fa == fb, format!("{fa} vs {fb}"));
            }
            _ => r.push(format!("pair{n}.face"), false, "a tetrahedron has no cross-ratio table"),
        }
        let (oa, ob) = (t.face_orientation(&p.face), t.face_orientation(&p.mate));
        r.push(format!("pair{n}.orientation"), oa == -ob, format!("induced orientations {oa} and {ob}"));
    }
    for (c, class) in t.edge_classes().into_iter().enumerate() {
        if !class.closed {
            r.checks.push(Check {
                id: format!("edge{c}"),
                status: Status::Open,
                witness: format!("{} member(s), not all surrounding faces paired", class.members.len()),
            });
            continue;
        }
        let mut prod = FieldElement::one(&t.field);
        let mut ok = true;
        for (s, i, j) in &class.members {
            match &tables[*s] {
                Some(tab) => {
                    let z = tab.z(*i, *j);
                    prod = if t.tets[*s].sign > 0 {
                        &prod * z
                    } else {
                        prod.checked_div(z).expect("cross-ratios are nonzero")
                    };
                }
                None => ok = false,
            }
        }
        r.push(format!("edge{c}"), ok && prod.is_one(), format!("product {prod}"));
    }
    r
}

/// Σ sign·([z01] + [z10] + [z23] + [z32]).
pub fn beta_triangulation(t: &Triangulation) -> Result<PreBlochElement> {
    let mut acc = PreBlochElement::zero(&t.field);
    for tet in &t.tets {
        acc = acc.checked_add(&beta_config(&tet.quad)?.scale(tet.sign as i64))?;
    }
    Ok(acc)
}

/// The boundary of the complex cancels: every face is paired, paired faces
/// carry opposite induced orientations and equal Cartan tangents.
pub fn boundary_check(t: &Triangulation) -> Result<bool> {
    if !t.has_geometry() {
        return Err(Error::MissingGeometry("boundary check needs vertex points".into()));
    }
    for s in 0..t.tets.len() {
        for m in 0..4 {
            if t.mate_of(s, m).is_none() {
                return Ok(false);
            }
        }
    }
    for p in &t.pairings {
        if t.face_orientation(&p.face) != -t.face_orientation(&p.mate) {
            return Ok(false);
        }
        let tau = |f: &FaceRef| -> Result<FieldElement> {
            let pts = t.tets[f.tet].points.as_ref().expect("checked above");
            cartan_tangent(&t.field, f.verts.map(|v| &pts[v]))
        };
        if tau(&p.face)? != tau(&p.mate)? {
            return Ok(false);
        }
    }
    Ok(true)
}

/// A 3×3 matrix acting on lifts; preserves the Hermitian form up to a
/// real scalar.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PairingMap {
    pub m: [[FieldElement; 3]; 3],
}

fn det3(m: &[[FieldElement; 3]; 3]) -> FieldElement {
    let t = |a: &FieldElement, b: &FieldElement, c: &FieldElement| &(a * b) * c;
    let pos = &(&t(&m[0][0], &m[1][1], &m[2][2]) + &t(&m[0][1], &m[1][2], &m[2][0])) + &t(&m[0][2], &m[1][0], &m[2][1]);
    let neg = &(&t(&m[0][2], &m[1][1], &m[2][0]) + &t(&m[0][0], &m[1][2], &m[2][1])) + &t(&m[0][1], &m[1][0], &m[2][2]);
    &pos - &neg
}

fn inv3(m: &[[FieldElement; 3]; 3]) -> Result<[[FieldElement; 3]; 3]> {
    let d = det3(m);
    if d.is_zero() {
        return Err(Error::DivisionByZero);
    }
    let c = |i: usize, j: usize| -> FieldElement {
        // cofactor of entry (i, j)
        let r: Vec<usize> = (0..3).filter(|x| *x != i).collect();
        let k: Vec<usize> = (0..3).filter(|x| *x != j).collect();
        let minor = &(&m[r[0]][k[0]] * &m[r[1]][k[1]]) - &(&m[r[0]][k[1]] * &m[r[1]][k[0]]);
        if (i + j).is_multiple_of(2) {
            minor
        } else {
            -&minor
        }
    };
    let mut out: [[FieldElement; 3]; 3] = std::array::from_fn(|_| std::array::from_fn(|_| FieldElement::zero(d.field())));
    for (i, row) in out.iter_mut().enumerate() {
        for (j, e) in row.iter_mut().enumerate() {
            *e = c(j, i).checked_div(&d)?;
        }
    }
    Ok(out)
}

fn mat_mul(a: &[[FieldElement; 3]; 3], b: &[[FieldElement; 3]; 3]) -> [[FieldElement; 3]; 3] {
    std::array::from_fn(|i| {
        std::array::from_fn(|j| {
            let mut s = &a[i][0] * &b[0][j];
            for k in 1..3 {
                s = &s + &(&a[i][k] * &b[k][j]);
            }
            s
        })
    })
}

impl PairingMap {
    pub fn apply(&self, v: &Lift) -> Lift {
        Lift::new(std::array::from_fn(|i| {
            let mut s = &self.m[i][0] * &v.v[0];
            for k in 1..3 {
                s = &s + &(&self.m[i][k] * &v.v[k]);
            }
            s
        }))
    }

    pub fn apply_point(&self, p: &Point, field: &Arc<NumberField>) -> Result<Point> {
        Point::from_lift(&self.apply(&p.lift(field)))
    }

    pub fn compose(&self, other: &PairingMap) -> PairingMap {
        PairingMap {
            m: mat_mul(&self.m, &other.m),
        }
    }

    pub fn inverse(&self) -> Result<PairingMap> {
        Ok(PairingMap { m: inv3(&self.m)? })
    }

    /// <Mx, My> = mu <x, y> for a single sigma-fixed mu, on a basis.
    pub fn form_scale(&self) -> Option<FieldElement> {
        let f = self.m[0][0].field().clone();
        let basis: Vec<Lift> = (0..3)
            .map(|k| Lift::new(std::array::from_fn(|i| if i == k { FieldElement::one(&f) } else { FieldElement::zero(&f) })))
            .collect();
        let mut mu: Option<FieldElement> = None;
        for a in &basis {
            for b in &basis {
                let lhs = self.apply(a).herm(&self.apply(b));
                let rhs = a.herm(b);
                if rhs.is_zero() {
                    if !lhs.is_zero() {
                        return None;
                    }
                    continue;
                }
                let r = lhs.checked_div(&rhs).ok()?;
                match &mu {
                    None => mu = Some(r),
                    Some(m) if *m == r => {}
                    _ => return None,
                }
            }
        }
        mu.filter(|m| m.is_sigma_fixed())
    }

    pub fn preserves_form(&self) -> bool {
        self.form_scale().is_some()
    }
}

/// The element of PU(2,1) taking the ordered triple src to dst.
pub fn side_pairing(field: &Arc<NumberField>, src: [&Point; 3], dst: [&Point; 3]) -> Result<PairingMap> {
    let ts = cartan_tangent(field, src)?;
    let td = cartan_tangent(field, dst)?;
    if ts != td {
        return Err(Error::CartanMismatch(format!("tangents {ts} and {td} differ")));
    }
    let s: Vec<Lift> = src.iter().map(|p| p.lift(field)).collect();
    let d: Vec<Lift> = dst.iter().map(|p| p.lift(field)).collect();
    // lambda_a sigma(lambda_b) <d_a, d_b> = mu <s_a, s_b>, lambda_0 = 1
    let r = |a: usize, b: usize| s[a].herm(&s[b]).checked_div(&d[a].herm(&d[b]));
    let (r01, r02, r12) = (r(0, 1)?, r(0, 2)?, r(1, 2)?);
    let mu = r12.conj().checked_div(&(&r01 * &r02.conj()))?;
    let lambda = [FieldElement::one(field), &mu * &r01.conj(), &mu * &r02.conj()];
    let smat: [[FieldElement; 3]; 3] = std::array::from_fn(|i| std::array::from_fn(|j| s[j].v[i].clone()));
    let dmat: [[FieldElement; 3]; 3] = std::array::from_fn(|i| std::array::from_fn(|j| &d[j].v[i] * &lambda[j]));
    let map = PairingMap {
        m: mat_mul(&dmat, &inv3(&smat)?),
    };
    match map.form_scale() {
        Some(m) if m.embed(64).map(|b| b.re.is_positive()).unwrap_or(false) => Ok(map),
        _ => Err(Error::CartanMismatch("no form-preserving map between the triples".into())),
    }
}

/// Develops the complex from tetrahedron 0, placed in normalized position
/// ∞, 0, (1, t), (z, s|z|^2). Adjacent tetrahedra are attached by side
/// pairings. `seed_it`, when given, must equal i·t for the first face.
pub fn develop(t: &Triangulation, seed_it: Option<&FieldElement>) -> Result<Vec<[Point; 4]>> {
    let n = t.tets.len();
    if n == 0 {
        return Ok(Vec::new());
    }
    let inconsistent = |m: String| Error::InconsistentStructure(m);
    let normalized = |s: usize| -> Result<[Point; 4]> { Ok(params_from_quadruple(&t.tets[s].quad)?.points()) };
    let first = params_from_quadruple(&t.tets[0].quad)?;
    if let Some(seed) = seed_it {
        if *seed != first.t_it {
            return Err(inconsistent(format!("seed i·t = {seed} but the invariants force {}", first.t_it)));
        }
    }
    let mut placed: Vec<Option<[Point; 4]>> = vec![None; n];
    placed[0] = Some(first.points());
    let mut queue = VecDeque::from([0usize]);
    while let Some(a) = queue.pop_front() {
        let pa = placed[a].clone().expect("queued tetrahedra are placed");
        for m in 0..4 {
            let Some((here, there)) = t.mate_of(a, m) else { continue };
            let b = there.tet;
            let dst = here.verts.map(|v| &pa[v]);
            if let Some(pb) = &placed[b] {
                if there.verts.map(|v| &pb[v]) != dst {
                    // only a consistency concern within one developed copy
                    continue;
                }
                continue;
            }
            let nb = normalized(b)?;
            let map = side_pairing(&t.field, there.verts.map(|v| &nb[v]), dst)
                .map_err(|e| inconsistent(format!("tetrahedron {b} does not fit onto {a}: {e}")))?;
            let pb: [Point; 4] = [0, 1, 2, 3]
                .map(|v| map.apply_point(&nb[v], &t.field))
                .into_iter()
                .collect::<Result<Vec<_>>>()?
                .try_into()
                .expect("four points");
            let q = ConfigFour::new(&t.field, pb.clone())?.cross_ratios()?;
            if q != t.tets[b].quad {
                return Err(inconsistent(format!("developed tetrahedron {b} has different invariants")));
            }
            placed[b] = Some(pb);
            queue.push_back(b);
        }
    }
    placed
        .into_iter()
        .enumerate()
        .map(|(s, p)| p.ok_or_else(|| Error::Invalid(format!("tetrahedron {s} is not connected to tetrahedron 0"))))
        .collect()
}

/// Copy of the triangulation with developed points attached.
pub fn with_geometry(t: &Triangulation, seed_it: Option<&FieldElement>) -> Result<Triangulation> {
    let pts = develop(t, seed_it)?;
    let mut out = t.clone();
    for (tet, p) in out.tets.iter_mut().zip(pts) {
        tet.points = Some(p);
    }
    Ok(out)
}

fn check_generic_five(field: &Arc<NumberField>, u: &[Point; 5]) -> Result<()> {
    if !is_generic(field, u) {
        return Err(Error::NotGeneric("the five points are not pairwise generic".into()));
    }
    Ok(())
}

fn signed_tet(field: &Arc<NumberField>, u: &[Point; 5], idx: [usize; 4], sign: i8) -> Result<TetRecord> {
    TetRecord::from_points(field, idx, sign, idx.map(|i| u[i].clone()))
}

/// Both sides of the 2-3 move on u0..u4:
/// [u0u1u2u3] - [u0u1u2u4] and -[u0u1u3u4] + [u0u2u3u4] - [u1u2u3u4].
/// Vertex ids of the records index into `u`.
pub fn pachner_23(field: &Arc<NumberField>, u: &[Point; 5]) -> Result<(Vec<TetRecord>, Vec<TetRecord>)> {
    check_generic_five(field, u)?;
    let two = vec![signed_tet(field, u, [0, 1, 2, 3], 1)?, signed_tet(field, u, [0, 1, 2, 4], -1)?];
    let three = vec![
        signed_tet(field, u, [0, 1, 3, 4], -1)?,
        signed_tet(field, u, [0, 2, 3, 4], 1)?,
        signed_tet(field, u, [1, 2, 3, 4], -1)?,
    ];
    Ok((two, three))
}

/// The 3-2 move: recovers the two-tetrahedron side from the three.
pub fn pachner_32(field: &Arc<NumberField>, three: &[TetRecord]) -> Result<Vec<TetRecord>> {
    let mut u: [Option<Point>; 5] = Default::default();
    for tet in three {
        let pts = tet
            .points
            .as_ref()
            .ok_or_else(|| Error::MissingGeometry("3-2 move needs vertex points".into()))?;
        for (k, v) in tet.verts.iter().enumerate() {
            if *v > 4 {
                return Err(Error::Invalid("3-2 move expects vertex ids 0..4".into()));
            }
            u[*v] = Some(pts[k].clone());
        }
    }
    let u: Vec<Point> = u
        .into_iter()
        .map(|p| p.ok_or_else(|| Error::Invalid("3-2 move needs all five vertices".into())))
        .collect::<Result<_>>()?;
    let u: [Point; 5] = u.try_into().expect("five points");
    Ok(pachner_23(field, &u)?.0)
}

/// The 1-4 move: [u0u1u2u3] = [u0u1u2u4] - [u0u1u3u4] + [u0u2u3u4] - [u1u2u3u4]
/// with u4 the new point.
pub fn pachner_14(field: &Arc<NumberField>, points: &[Point; 4], new_point: &Point) -> Result<Vec<TetRecord>> {
    let u: [Point; 5] = [
        points[0].clone(),
        points[1].clone(),
        points[2].clone(),
        points[3].clone(),
        new_point.clone(),
    ];
    check_generic_five(field, &u)?;
    Ok(vec![
        signed_tet(field, &u, [0, 1, 2, 4], 1)?,
        signed_tet(field, &u, [0, 1, 3, 4], -1)?,
        signed_tet(field, &u, [0, 2, 3, 4], 1)?,
        signed_tet(field, &u, [1, 2, 3, 4], -1)?,
    ])
}

/// X(ijkl) for every ordered 4-tuple of distinct indices of five points.
fn x_table_five(field: &Arc<NumberField>, u: &[Point; 5]) -> Result<BTreeMap<[usize; 4], FieldElement>> {
    let l: Vec<Lift> = u.iter().map(|p| p.lift(field)).collect();
    let mut out = BTreeMap::new();
    for [i, j, k, m, n] in distinct5() {
        for key in [[i, j, k, m], [i, j, k, n]] {
            if let std::collections::btree_map::Entry::Vacant(e) = out.entry(key) {
                e.insert(x_from_lifts(&l, key[0], key[1], key[2], key[3])?);
            }
        }
    }
    Ok(out)
}

/// (ijkl) = (ijkm)(ijml) for all distinct indices of five points.
pub fn edge_compatibility_five(field: &Arc<NumberField>, u: &[Point; 5]) -> Result<bool> {
    let x = x_table_five(field, u)?;
    Ok(distinct5().into_iter().all(|[i, j, k, m, n]| x[&[i, j, k, m]] == &x[&[i, j, k, n]] * &x[&[i, j, n, m]]))
}

/// (ijkl)(ljik)(kjli) = (imkl)(lmik)(kmli) for all distinct indices.
pub fn face_compatibility_five(field: &Arc<NumberField>, u: &[Point; 5]) -> Result<bool> {
    let x = x_table_five(field, u)?;
    Ok(distinct5().into_iter().all(|[i, j, k, m, n]| {
        let lhs = &(&x[&[i, j, k, m]] * &x[&[m, j, i, k]]) * &x[&[k, j, m, i]];
        let rhs = &(&x[&[i, n, k, m]] * &x[&[m, n, i, k]]) * &x[&[k, n, m, i]];
        lhs == rhs
    }))
}

fn distinct5() -> Vec<[usize; 5]> {
    let mut out = Vec::with_capacity(120);
    for a in 0..5 {
        for b in 0..5 {
            for c in 0..5 {
                for d in 0..5 {
                    let rest: Vec<usize> = (0..5).filter(|x| ![a, b, c, d].contains(x)).collect();
                    if rest.len() == 1 {
                        out.push([a, b, c, d, rest[0]]);
                    }
                }
            }
        }
    }
    out
}

/// Replaces the two tetrahedra sharing pairing `index` by the three of the
/// 2-3 move. Pairings of the outer faces are carried over.
pub fn apply_23(t: &Triangulation, index: usize) -> Result<Triangulation> {
    let p = *t
        .pairings
        .get(index)
        .ok_or_else(|| Error::Invalid(format!("no pairing with index {index}")))?;
    let (a, b) = (p.face.tet, p.mate.tet);
    if a == b {
        return Err(Error::Invalid("2-3 move needs two distinct tetrahedra".into()));
    }
    let pa = t.tets[a]
        .points
        .clone()
        .ok_or_else(|| Error::MissingGeometry(format!("tetrahedron {a} has no points")))?;
    let pb = t.tets[b]
        .points
        .clone()
        .ok_or_else(|| Error::MissingGeometry(format!("tetrahedron {b} has no points")))?;
    let oa = p.face.opposite();
    let ob = p.mate.opposite();
    if p.face.verts.map(|v| &pa[v]) != p.mate.verts.map(|v| &pb[v]) {
        return Err(Error::InconsistentStructure("paired faces are not developed onto each other".into()));
    }
    let u: [Point; 5] = [
        pa[p.face.verts[0]].clone(),
        pa[p.face.verts[1]].clone(),
        pa[p.face.verts[2]].clone(),
        pa[oa].clone(),
        pb[ob].clone(),
    ];
    let (_, three) = pachner_23(&t.field, &u)?;
    // local vertex of a (resp. b) -> index into u
    let mut to_u: BTreeMap<(usize, usize), usize> = BTreeMap::new();
    for m in 0..3 {
        to_u.insert((a, p.face.verts[m]), m);
        to_u.insert((b, p.mate.verts[m]), m);
    }
    to_u.insert((a, oa), 3);
    to_u.insert((b, ob), 4);
    let gid = [
        t.tets[a].verts[p.face.verts[0]],
        t.tets[a].verts[p.face.verts[1]],
        t.tets[a].verts[p.face.verts[2]],
        t.tets[a].verts[oa],
        t.tets[b].verts[ob],
    ];
    // a contributes s·[u0u1u2u3] and b must contribute -s·[u0u1u2u4]
    let sign = -t.face_orientation(&p.face);
    if t.face_orientation(&p.mate) != sign {
        return Err(Error::InconsistentStructure(format!(
            "pairing {index} does not reverse the orientation of its face"
        )));
    }
    replace_tets(t, &[a, b], three, &to_u, &gid, sign)
}

/// Replaces tetrahedron `index` by the four of the 1-4 move.
pub fn apply_14(t: &Triangulation, index: usize, new_point: &Point) -> Result<Triangulation> {
    let tet = t
        .tets
        .get(index)
        .ok_or_else(|| Error::Invalid(format!("no tetrahedron with index {index}")))?;
    let pts = tet
        .points
        .clone()
        .ok_or_else(|| Error::MissingGeometry(format!("tetrahedron {index} has no points")))?;
    let four = pachner_14(&t.field, &pts, new_point)?;
    let to_u: BTreeMap<(usize, usize), usize> = (0..4).map(|v| ((index, v), v)).collect();
    let next = t.tets.iter().flat_map(|x| x.verts).max().unwrap_or(0) + 1;
    let gid = [tet.verts[0], tet.verts[1], tet.verts[2], tet.verts[3], next];
    replace_tets(t, &[index], four, &to_u, &gid, tet.sign)
}

fn replace_tets(
    t: &Triangulation,
    removed: &[usize],
    new: Vec<TetRecord>,
    to_u: &BTreeMap<(usize, usize), usize>,
    gid: &[usize; 5],
    sign: i8,
) -> Result<Triangulation> {
    let kept: Vec<usize> = (0..t.tets.len()).filter(|s| !removed.contains(s)).collect();
    let mut tets: Vec<TetRecord> = kept.iter().map(|s| t.tets[*s].clone()).collect();
    let base = tets.len();
    let new_u: Vec<[usize; 4]> = new.iter().map(|r| r.verts).collect();
    for mut r in new {
        r.sign *= sign;
        r.verts = r.verts.map(|k| gid[k]);
        tets.push(r);
    }
    let remap = |f: FaceRef| -> Option<FaceRef> {
        if let Some(pos) = kept.iter().position(|s| *s == f.tet) {
            return Some(FaceRef::new(pos, f.verts));
        }
        let us = f.verts.map(|v| to_u[&(f.tet, v)]);
        new_u.iter().enumerate().find_map(|(k, vs)| {
            let local: Option<Vec<usize>> = us.iter().map(|x| vs.iter().position(|y| y == x)).collect();
            local.map(|l| FaceRef::new(base + k, [l[0], l[1], l[2]]))
        })
    };
    let mut pairings = Vec::new();
    for p in &t.pairings {
        let internal = removed.contains(&p.face.tet) && removed.contains(&p.mate.tet);
        if internal {
            continue;
        }
        if let (Some(f), Some(m)) = (remap(p.face), remap(p.mate)) {
            pairings.push(Pairing { face: f, mate: m });
        }
    }
    // faces shared by two new tetrahedra
    for i in 0..new_u.len() {
        for j in i + 1..new_u.len() {
            let common: Vec<usize> = new_u[i].iter().copied().filter(|x| new_u[j].contains(x)).collect();
            if common.len() == 3 {
                let li = common.iter().map(|x| new_u[i].iter().position(|y| y == x).unwrap()).collect::<Vec<_>>();
                let lj = common.iter().map(|x| new_u[j].iter().position(|y| y == x).unwrap()).collect::<Vec<_>>();
                pairings.push(Pairing {
                    face: FaceRef::new(base + i, [li[0], li[1], li[2]]),
                    mate: FaceRef::new(base + j, [lj[0], lj[1], lj[2]]),
                });
            }
        }
    }
    Triangulation::new(&t.field, tets, pairings)
}

/// Two copies of one configuration with opposite signs, the second moved by
/// `g`, glued face to face.
pub fn double_of(field: &Arc<NumberField>, points: [Point; 4], g: Option<&PairingMap>) -> Result<Triangulation> {
    let a = TetRecord::from_points(field, [0, 1, 2, 3], 1, points.clone())?;
    let moved: [Point; 4] = match g {
        Some(g) => points
            .iter()
            .map(|p| g.apply_point(p, field))
            .collect::<Result<Vec<_>>>()?
            .try_into()
            .expect("four points"),
        None => points,
    };
    let b = TetRecord::from_points(field, [0, 1, 2, 3], -1, moved)?;
    let faces = [[1, 2, 3], [0, 3, 2], [0, 1, 3], [0, 2, 1]];
    let pairings = faces
        .iter()
        .map(|f| Pairing {
            face: FaceRef::new(0, *f),
            mate: FaceRef::new(1, *f),
        })
        .collect();
    Triangulation::new(field, vec![a, b], pairings)
}
