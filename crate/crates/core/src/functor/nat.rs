use std::collections::{BTreeMap, HashSet};
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use super::ops::{pullback, restrict_to_subsets, sub_functor, Subset};
use super::{validate_coherence, Assembly, CubeFunctor, FaceMaps, StableFunctor};
use crate::burnside::{Correspondence, FiniteSet, SetRef, Span};
use crate::cube::{Edge, Face2, FaceInclusion, Vertex};
use crate::error::{Error, Result};
use crate::totalization::{is_quasi_iso, tot_nat_trans};

/// `(ε, v)` in `C(n + 1)`.
pub(crate) fn lift(v: &Vertex, eps: u8) -> Vertex {
    Vertex::new(1, eps as u32).concat(v)
}

/// A natural transformation `F → F'` stored as a functor on `C(n + 1)`
/// whose first coordinate separates source (1) from target (0).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct NaturalTransformation {
    ambient: CubeFunctor,
}

impl NaturalTransformation {
    pub fn from_ambient(ambient: CubeFunctor) -> Result<Self> {
        if ambient.dim() == 0 {
            return Err(Error::Dimension("a natural transformation needs an ambient cube of dimension >= 1".into()));
        }
        let rep = validate_coherence(&ambient);
        if !rep.passes() {
            return Err(Error::Functor(format!("transformation is not coherent: {rep:?}")));
        }
        Ok(NaturalTransformation { ambient })
    }

    pub fn ambient(&self) -> &CubeFunctor {
        &self.ambient
    }

    /// Dimension of the source and target cubes.
    pub fn dim(&self) -> usize {
        self.ambient.dim() - 1
    }

    pub fn source(&self) -> CubeFunctor {
        pullback(&self.ambient, &FaceInclusion::slice(self.dim(), true, 1)).expect("slice fits")
    }

    pub fn target(&self) -> CubeFunctor {
        pullback(&self.ambient, &FaceInclusion::slice(self.dim(), true, 0)).expect("slice fits")
    }

    /// The correspondence `F(v) → F'(v)`.
    pub fn component(&self, v: &Vertex) -> &Correspondence {
        self.ambient.edge(&Edge { upper: lift(v, 1), lower: lift(v, 0) })
    }
}

/// The ambient functor with source, target and component edges, carrying
/// the non-mixed face matchings of `src` and `tgt`.
fn ambient_base(src: &CubeFunctor, tgt: &CubeFunctor, components: &[Correspondence]) -> Result<CubeFunctor> {
    let n = src.dim();
    if tgt.dim() != n || components.len() != 1 << n {
        return Err(Error::Dimension("source, target and components disagree on dimension".into()));
    }
    let sets: Vec<SetRef> = Vertex::all(n + 1)
        .map(|w| {
            let (e, v) = w.split(1);
            if e.mask() == 1 { src.set(&v).clone() } else { tgt.set(&v).clone() }
        })
        .collect();
    let mut asm = Assembly::new(n + 1, sets);
    for (p, f) in [(0, src), (1, tgt)] {
        let eps = 1 - p as u8;
        for (e, c) in f.edges() {
            asm.copy_edge(Edge { upper: lift(&e.upper, eps), lower: lift(&e.lower, eps) }, p, *e, c)?;
        }
    }
    for (v, c) in Vertex::all(n).zip(components) {
        if **c.source_set() != **src.set(&v) || **c.target_set() != **tgt.set(&v) {
            return Err(Error::Functor(format!("component at {v} does not go from F({v}) to F'({v})")));
        }
        let c = Correspondence::from_spans(src.set(&v).clone(), tgt.set(&v).clone(), c.elements().to_vec())?;
        let none = vec![None; c.len()];
        asm.add_edge(Edge { upper: lift(&v, 1), lower: lift(&v, 0) }, c, none);
    }
    let (mut f, maps) = asm.finish(&[src, tgt])?;
    for (face, m) in maps {
        f.set_face_unchecked(face, m);
    }
    Ok(f)
}

/// Assemble and validate `η: F → F'` from its components and the matchings
/// on mixed faces (those spanned by coordinate 1 and another coordinate).
pub fn build_nat_trans(
    src: &CubeFunctor,
    tgt: &CubeFunctor,
    components: Vec<Correspondence>,
    mixed: FaceMaps,
) -> Result<NaturalTransformation> {
    let mut amb = ambient_base(src, tgt, &components)?;
    for (face, m) in mixed {
        if face.coords().0 != 1 {
            return Err(Error::Functor(format!("{face} is not a mixed face")));
        }
        amb.set_face(face, m)?;
    }
    NaturalTransformation::from_ambient(amb)
}

/// Mixed faces of the ambient cube: top `(1, u)` with `u` dropping `k`.
fn mixed_faces(n: usize) -> Vec<(Face2, Vertex, usize)> {
    let mut out = Vec::new();
    for u in Vertex::all(n) {
        for k in u.ones_coords() {
            out.push((Face2::new(lift(&u, 1), 1, k + 1), u, k));
        }
    }
    out
}

/// `η` induced by set maps on vertices and edge elements, with each edge
/// element of `F` sent to one of `F'` over the images of its endpoints.
fn set_map_nat_trans(
    src: &CubeFunctor,
    tgt: &CubeFunctor,
    vmap: &[Vec<usize>],
    emap: &BTreeMap<Edge, Vec<usize>>,
) -> Result<NaturalTransformation> {
    let comps = Vertex::all(src.dim())
        .map(|v| Correspondence::from_set_map(src.set(&v), tgt.set(&v), &vmap[v.mask() as usize]))
        .collect::<Result<Vec<_>>>()?;
    let mut amb = ambient_base(src, tgt, &comps)?;
    for (face, u, k) in mixed_faces(src.dim()) {
        let e = Edge::down(u, k);
        let (ca, cb) = amb.face_composites(&face);
        let mut map = vec![usize::MAX; ca.len()];
        // B elements are (e, t(e)); A elements are (s(e), η(e)).
        for (ei, sp) in src.edge(&e).elements().iter().enumerate() {
            let b = cb.index_of(&[ei as u32, sp.t as u32]).ok_or_else(|| Error::Invariant("mixed composite".into()))?;
            let a = ca
                .index_of(&[sp.s as u32, emap[&e][ei] as u32])
                .ok_or_else(|| Error::Functor(format!("edge map on {e} does not lie over the vertex maps")))?;
            if map[a] != usize::MAX {
                return Err(Error::Functor(format!("edge map on {e} is not a bijection onto its image")));
            }
            map[a] = b;
        }
        if map.contains(&usize::MAX) {
            return Err(Error::Functor(format!("mixed face {face} is not matched by the set maps")));
        }
        amb.set_face(face, map)?;
    }
    NaturalTransformation::from_ambient(amb)
}

/// The inclusion `F' → F` of a functor whose ids all occur in `F`.
pub fn inclusion_nat_trans(sub: &CubeFunctor, f: &CubeFunctor) -> Result<NaturalTransformation> {
    if sub.dim() != f.dim() {
        return Err(Error::Dimension("inclusion between different cubes".into()));
    }
    let missing = |what: &str| Error::Functor(format!("{what} of the subfunctor is missing from the functor"));
    let vmap = Vertex::all(f.dim())
        .map(|v| {
            sub.set(&v)
                .elements()
                .iter()
                .map(|x| f.set(&v).index_of(x).ok_or_else(|| missing(x)))
                .collect::<Result<Vec<_>>>()
        })
        .collect::<Result<Vec<_>>>()?;
    let mut emap = BTreeMap::new();
    for (e, c) in sub.edges() {
        let big = f.edge(e);
        let m = c.elements().iter().map(|s| big.index_of(&s.id).ok_or_else(|| missing(&s.id))).collect::<Result<Vec<_>>>()?;
        emap.insert(*e, m);
    }
    set_map_nat_trans(sub, f, &vmap, &emap)
}

/// `F^S` and the projection `F → F^S`; the complement of `S` must be
/// closed under edge targets.
pub fn quotient_functor(f: &CubeFunctor, s: &Subset) -> Result<(CubeFunctor, NaturalTransformation)> {
    for (e, c) in f.edges() {
        for sp in c.elements() {
            if s.contains(&e.lower, sp.t) && !s.contains(&e.upper, sp.s) {
                return Err(Error::Functor(format!("complement is not a subcomplex along {e} at {}", sp.id)));
            }
        }
    }
    let q = restrict_to_subsets(f, s)?;
    let mut new_index: Vec<Vec<Option<usize>>> = Vec::new();
    let mut comps = Vec::new();
    for v in Vertex::all(f.dim()) {
        let keep = &s.keep[v.mask() as usize];
        let mut idx = Vec::new();
        let mut spans = Vec::new();
        for (i, &b) in keep.iter().enumerate() {
            idx.push(b.then(|| spans.len()));
            if b {
                spans.push(Span { id: f.set(&v).get(i).to_string(), s: i, t: spans.len() });
            }
        }
        comps.push(Correspondence::from_spans(f.set(&v).clone(), q.set(&v).clone(), spans)?);
        new_index.push(idx);
    }
    let mut amb = ambient_base(f, &q, &comps)?;
    for (face, u, k) in mixed_faces(f.dim()) {
        let e = Edge::down(u, k);
        let v = e.lower;
        let (ca, cb) = amb.face_composites(&face);
        let qe = q.edge(&e);
        let mut map = Vec::with_capacity(ca.len());
        for tup in &ca.tuples {
            let id = &qe.elements()[tup[1] as usize].id;
            let old = f.edge(&e).index_of(id).ok_or_else(|| Error::Invariant("quotient edge element".into()))?;
            let t = new_index[v.mask() as usize][f.edge(&e).elements()[old].t].expect("closed complement");
            map.push(cb.index_of(&[old as u32, t as u32]).ok_or_else(|| Error::Invariant("mixed composite".into()))?);
        }
        amb.set_face(face, map)?;
    }
    Ok((q, NaturalTransformation::from_ambient(amb)?))
}

/// Result of gluing two transformations out of a common source.
#[derive(Clone, Debug)]
pub struct Glued {
    pub h: CubeFunctor,
    /// `F_{ι₀} → H`, with `F_{ι₀}` realized as a subfunctor of `H`.
    pub theta: NaturalTransformation,
    pub theta_prime: NaturalTransformation,
}

/// From `F ← G → F'` (given as `η: G → F`, `η': G → F'`), the functor `H`
/// on `C(n+1)` obtained from `η ⊔ η'` by identifying the two copies of `G`,
/// and the inclusions of `F_{ι₀}` and `F'_{ι₀}`.
pub fn glue_along_top(eta: &NaturalTransformation, eta2: &NaturalTransformation) -> Result<Glued> {
    if eta.source() != eta2.source() {
        return Err(Error::Functor("the transformations have different sources".into()));
    }
    let n = eta.dim();
    let (a1, a2) = (eta.ambient(), eta2.ambient());
    let (f1, f2) = (eta.target(), eta2.target());
    let tag_sets = collide(f1.sets().iter().flat_map(|s| s.elements()), f2.sets().iter().flat_map(|s| s.elements()));
    let name = |tag: bool, side: usize, s: &str| if tag { format!("{side}:{s}") } else { s.to_string() };
    let sets: Vec<SetRef> = Vertex::all(n + 1)
        .map(|w| {
            let (e, v) = w.split(1);
            if e.mask() == 1 {
                Ok(a1.set(&w).clone())
            } else {
                let els = f1.set(&v).elements().iter().map(|x| name(tag_sets, 0, x));
                let els = els.chain(f2.set(&v).elements().iter().map(|x| name(tag_sets, 1, x)));
                FiniteSet::new(els).map(Arc::new)
            }
        })
        .collect::<Result<_>>()?;
    let mut asm = Assembly::new(n + 1, sets);
    for e in Edge::all(n + 1) {
        let (u, l) = (e.upper.mask() as usize, e.lower.mask() as usize);
        let (c1, c2) = (a1.edge(&e), a2.edge(&e));
        if e.upper.bit(1) == 1 && e.lower.bit(1) == 1 {
            asm.copy_edge(e, 0, e, c1)?;
            for k in 0..c2.len() {
                asm.alias(e, k, (1, e, k));
            }
            continue;
        }
        let tag = collide(c1.elements().iter().map(|s| &s.id), c2.elements().iter().map(|s| &s.id));
        let (s_off, t_off) = if e.upper.bit(1) == 1 { (0, a1.set(&e.lower).len()) } else { (a1.set(&e.upper).len(), a1.set(&e.lower).len()) };
        let mut spans: Vec<Span> = c1.elements().iter().map(|s| Span { id: name(tag, 0, &s.id), s: s.s, t: s.t }).collect();
        spans.extend(c2.elements().iter().map(|s| Span { id: name(tag, 1, &s.id), s: s.s + s_off, t: s.t + t_off }));
        let origins = (0..c1.len()).map(|k| Some((0, e, k))).chain((0..c2.len()).map(|k| Some((1, e, k)))).collect();
        let c = Correspondence::from_spans(asm.set(u).clone(), asm.set(l).clone(), spans)?;
        asm.add_edge(e, c, origins);
    }
    let (mut h, maps) = asm.finish(&[a1, a2])?;
    for (face, m) in maps {
        h.set_face_unchecked(face, m);
    }
    let rep = validate_coherence(&h);
    if !rep.passes() {
        return Err(Error::Invariant(format!("glued functor is not coherent: {rep:?}")));
    }
    let block = |side: usize| {
        Subset::from_fn(&h, |w, i| w.bit(1) == 0 && (i < f1.set(&w.split(1).1).len()) == (side == 0))
    };
    let theta = inclusion_nat_trans(&sub_functor(&h, &block(0))?, &h)?;
    let theta_prime = inclusion_nat_trans(&sub_functor(&h, &block(1))?, &h)?;
    Ok(Glued { h, theta, theta_prime })
}

fn collide<'a>(a: impl Iterator<Item = &'a String>, b: impl Iterator<Item = &'a String>) -> bool {
    let xs: HashSet<&String> = a.collect();
    b.into_iter().any(|y| xs.contains(y))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Direction {
    Forward,
    Backward,
}

#[derive(Clone, Debug)]
pub enum Step {
    /// `η` from the earlier functor to the later one (forward) or back.
    NatTrans { eta: NaturalTransformation, direction: Direction },
    /// The later functor is the earlier one extended along `ι` (forward), or
    /// the reverse.
    Face { iota: FaceInclusion, direction: Direction },
}

/// A sequence of stable functors joined by steps.
#[derive(Clone, Debug)]
pub struct EquivalenceCertificate {
    pub functors: Vec<StableFunctor>,
    pub steps: Vec<Step>,
}

#[derive(Clone, Debug, Serialize)]
pub struct StepReport {
    pub index: usize,
    pub kind: &'static str,
    pub passed: bool,
    pub detail: String,
}

#[derive(Clone, Debug, Serialize)]
pub struct CertificateReport {
    pub steps: Vec<StepReport>,
    pub structure_error: Option<String>,
}

impl CertificateReport {
    pub fn passes(&self) -> bool {
        self.structure_error.is_none() && self.steps.iter().all(|s| s.passed)
    }
}

pub fn verify_certificate(cert: &EquivalenceCertificate) -> CertificateReport {
    if cert.functors.is_empty() || cert.steps.len() + 1 != cert.functors.len() {
        return CertificateReport {
            steps: Vec::new(),
            structure_error: Some(format!(
                "{} functors cannot be joined by {} steps",
                cert.functors.len(),
                cert.steps.len()
            )),
        };
    }
    let steps = cert
        .steps
        .iter()
        .enumerate()
        .map(|(i, step)| {
            let (a, b) = (&cert.functors[i], &cert.functors[i + 1]);
            let (kind, r) = match step {
                Step::NatTrans { eta, direction } => ("nat_trans", check_nat_step(eta, *direction, a, b)),
                Step::Face { iota, direction } => ("face", check_face_step(iota, *direction, a, b)),
            };
            let (passed, detail) = match r {
                Ok(()) => (true, "ok".to_string()),
                Err(e) => (false, e),
            };
            StepReport { index: i, kind, passed, detail }
        })
        .collect();
    CertificateReport { steps, structure_error: None }
}

fn check_nat_step(
    eta: &NaturalTransformation,
    dir: Direction,
    a: &StableFunctor,
    b: &StableFunctor,
) -> std::result::Result<(), String> {
    let (from, to) = match dir {
        Direction::Forward => (a, b),
        Direction::Backward => (b, a),
    };
    if from.shift != to.shift {
        return Err(format!("shifts differ: {} vs {}", from.shift, to.shift));
    }
    if eta.source() != from.functor {
        return Err("source of the transformation differs from the functor it starts at".into());
    }
    if eta.target() != to.functor {
        return Err("target of the transformation differs from the functor it ends at".into());
    }
    let map = tot_nat_trans(eta).map_err(|e| e.to_string())?;
    match is_quasi_iso(&map) {
        Ok(true) => Ok(()),
        Ok(false) => Err("totalization is not a quasi-isomorphism".into()),
        Err(e) => Err(e.to_string()),
    }
}

fn check_face_step(
    iota: &FaceInclusion,
    dir: Direction,
    a: &StableFunctor,
    b: &StableFunctor,
) -> std::result::Result<(), String> {
    let (small, big) = match dir {
        Direction::Forward => (a, b),
        Direction::Backward => (b, a),
    };
    let ext = super::extend_along_face_inclusion(&small.functor, iota).map_err(|e| e.to_string())?;
    if ext != big.functor {
        return Err(format!("functor is not the extension along {iota}"));
    }
    if big.shift != small.shift - iota.weight() as i64 {
        return Err(format!("shift {} should be {} - |ι| = {}", big.shift, small.shift, small.shift - iota.weight() as i64));
    }
    Ok(())
}
