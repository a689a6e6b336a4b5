use std::collections::BTreeMap;
use std::path::{Path, PathBuf};
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use super::nat::{Direction, EquivalenceCertificate, NaturalTransformation, Step};
use super::{CubeFunctor, StableFunctor};
use crate::burnside::{Correspondence, FiniteSet, SetRef, SpanJson};
use crate::cube::{Edge, Face2, FaceInclusion, Vertex};
use crate::error::{Error, Result};

/// On-disk functor format. Omitted vertices are empty; omitted edges have
/// no elements. Faces map composite ids through the first listed middle
/// vertex to composite ids through the second.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct FunctorJson {
    pub n: usize,
    #[serde(default)]
    pub shift: i64,
    #[serde(default)]
    pub vertices: BTreeMap<String, Vec<String>>,
    #[serde(default)]
    pub edges: BTreeMap<String, Vec<SpanJson>>,
    #[serde(default)]
    pub faces: BTreeMap<String, BTreeMap<String, String>>,
}

/// A stable functor file is a functor file with its shift.
pub type StableFunctorFile = FunctorJson;

impl FunctorJson {
    pub fn from_functor(f: &CubeFunctor, shift: i64) -> Self {
        let mut j = FunctorJson { n: f.dim(), shift, ..Default::default() };
        for v in Vertex::all(f.dim()) {
            if !f.set(&v).is_empty() {
                j.vertices.insert(v.to_string(), f.set(&v).elements().to_vec());
            }
        }
        for (e, c) in f.edges() {
            if !c.is_empty() {
                j.edges.insert(e.to_string(), c.elements_json());
            }
        }
        for (face, m) in f.faces() {
            if m.is_empty() {
                continue;
            }
            let (a, b) = f.face_composites(face);
            let entries = m.iter().enumerate().map(|(i, &k)| (a.element_id(f, i), b.element_id(f, k))).collect();
            j.faces.insert(face.key(), entries);
        }
        j
    }

    pub fn from_stable(s: &StableFunctor) -> Self {
        Self::from_functor(&s.functor, s.shift)
    }

    /// Face entries given in both orientations that are not mutually inverse.
    pub fn c1_violations(&self) -> Result<Vec<String>> {
        let mut by_face: BTreeMap<Face2, Vec<(bool, &BTreeMap<String, String>)>> = BTreeMap::new();
        for (k, m) in &self.faces {
            let (f, canon) = Face2::parse_key(k)?;
            by_face.entry(f).or_default().push((canon, m));
        }
        let mut out = Vec::new();
        for (f, entries) in by_face {
            let fwd: Vec<_> = entries.iter().filter(|e| e.0).collect();
            let rev: Vec<_> = entries.iter().filter(|e| !e.0).collect();
            if let (Some(a), Some(b)) = (fwd.first(), rev.first()) {
                let inverse: BTreeMap<&String, &String> = b.1.iter().map(|(x, y)| (y, x)).collect();
                let direct: BTreeMap<&String, &String> = a.1.iter().collect();
                if inverse != direct {
                    out.push(f.key());
                }
            }
        }
        Ok(out)
    }

    pub fn to_stable(&self) -> Result<StableFunctor> {
        Ok(StableFunctor::new(self.to_functor()?, self.shift))
    }

    pub fn to_functor(&self) -> Result<CubeFunctor> {
        let n = self.n;
        let mut sets: Vec<SetRef> = vec![Arc::new(FiniteSet::empty()); 1 << n];
        for (k, ids) in &self.vertices {
            let v: Vertex = k.parse()?;
            if v.dim() != n {
                return Err(Error::Dimension(format!("vertex {k} not in C({n})")));
            }
            sets[v.mask() as usize] = Arc::new(FiniteSet::new(ids.iter().cloned())?);
        }
        let mut edges = BTreeMap::new();
        for (k, spans) in &self.edges {
            let e: Edge = k.parse()?;
            if e.upper.dim() != n {
                return Err(Error::Dimension(format!("edge {k} not in C({n})")));
            }
            let c = Correspondence::from_named(
                sets[e.upper.mask() as usize].clone(),
                sets[e.lower.mask() as usize].clone(),
                spans.iter().map(|s| (&s.id, &s.s, &s.t)),
            )?;
            edges.insert(e, c);
        }
        let mut f = CubeFunctor::new(n, sets, edges)?;
        if let Some(face) = self.c1_violations()?.first() {
            return Err(Error::Functor(format!("matchings on {face} given in both orientations are not inverse")));
        }
        for (k, entries) in &self.faces {
            let (face, canon) = Face2::parse_key(k)?;
            if face.top.dim() != n {
                return Err(Error::Dimension(format!("face {k} not in C({n})")));
            }
            if f.face(&face).is_some() {
                continue;
            }
            let (a, b) = f.face_composites(&face);
            let (from, to) = if canon { (&a, &b) } else { (&b, &a) };
            let to_index: BTreeMap<String, usize> = (0..to.len()).map(|i| (to.element_id(&f, i), i)).collect();
            let from_index: BTreeMap<String, usize> = (0..from.len()).map(|i| (from.element_id(&f, i), i)).collect();
            let mut map = vec![usize::MAX; from.len()];
            for (x, y) in entries {
                let i = *from_index.get(x).ok_or_else(|| Error::Functor(format!("{k}: {x:?} is not a composite element")))?;
                let j = *to_index.get(y).ok_or_else(|| Error::Functor(format!("{k}: {y:?} is not a composite element")))?;
                map[i] = j;
            }
            if map.contains(&usize::MAX) {
                return Err(Error::Functor(format!("{k}: matching does not cover its composite")));
            }
            let map = if canon {
                map
            } else {
                let mut inv = vec![usize::MAX; map.len()];
                for (i, &j) in map.iter().enumerate() {
                    inv[j] = i;
                }
                if inv.contains(&usize::MAX) {
                    return Err(Error::Functor(format!("{k}: matching is not a bijection")));
                }
                inv
            };
            f.set_face(face, map)?;
        }
        for face in Face2::all(n) {
            if f.face(&face).is_none() {
                let (a, b) = f.face_composites(&face);
                if a.is_empty() && b.is_empty() {
                    f.set_face_unchecked(face, Vec::new());
                }
            }
        }
        Ok(f)
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)?;
        Ok(serde_json::from_str(&text)?)
    }
}

/// A functor given inline or by a path relative to the certificate.
#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(untagged)]
pub enum FunctorRef {
    File {
        file: String,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        shift: Option<i64>,
    },
    Inline(FunctorJson),
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum StepJson {
    NatTrans { eta: FunctorRef, direction: Direction },
    Face { bottom: String, coords: Vec<usize>, direction: Direction },
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct CertificateJson {
    pub functors: Vec<FunctorRef>,
    #[serde(default)]
    pub steps: Vec<StepJson>,
}

impl FunctorRef {
    fn resolve(&self, base: &Path) -> Result<StableFunctor> {
        match self {
            FunctorRef::Inline(j) => j.to_stable(),
            FunctorRef::File { file, shift } => {
                let j = FunctorJson::load(&base.join(file))?;
                let mut s = j.to_stable()?;
                if let Some(r) = shift {
                    s.shift = *r;
                }
                Ok(s)
            }
        }
    }
}

impl CertificateJson {
    pub fn load(path: &Path) -> Result<(Self, PathBuf)> {
        let text = std::fs::read_to_string(path)?;
        let base = path.parent().map(Path::to_path_buf).unwrap_or_default();
        Ok((serde_json::from_str(&text)?, base))
    }

    pub fn resolve(&self, base: &Path) -> Result<EquivalenceCertificate> {
        let functors = self.functors.iter().map(|f| f.resolve(base)).collect::<Result<Vec<_>>>()?;
        let steps = self
            .steps
            .iter()
            .map(|s| match s {
                StepJson::NatTrans { eta, direction } => Ok(Step::NatTrans {
                    eta: NaturalTransformation::from_ambient(eta.resolve(base)?.functor)?,
                    direction: *direction,
                }),
                StepJson::Face { bottom, coords, direction } => Ok(Step::Face {
                    iota: FaceInclusion::new(bottom.parse()?, coords.clone())?,
                    direction: *direction,
                }),
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(EquivalenceCertificate { functors, steps })
    }
}
