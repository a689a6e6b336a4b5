//! Strictly unitary lax functors `C(n) → B` stored as vertex sets, edge
//! correspondences and matchings on canonically oriented 2-faces.

mod assemble;
mod coherence;
mod iso;
mod json;
mod nat;
mod ops;
mod search;

use std::collections::{BTreeMap, HashMap};
use std::sync::Arc;

use crate::burnside::{BijectionOver, Correspondence, FiniteSet, SetRef, Span, COMPOSE_SEP};
use crate::cube::{chain_swap_path, Edge, Face2, MaximalChain, Vertex};
use crate::error::{Error, Result};

pub(crate) use assemble::Assembly;
pub use coherence::{validate_c0, validate_coherence, C0Report, CoherenceReport};
pub use iso::{find_natural_isomorphism, NaturalIsomorphism};
pub use json::{CertificateJson, FunctorJson, FunctorRef, StableFunctorFile, StepJson};
pub use nat::{
    build_nat_trans, glue_along_top, inclusion_nat_trans, quotient_functor, verify_certificate, CertificateReport,
    Direction, EquivalenceCertificate, Glued, NaturalTransformation, Step, StepReport,
};
pub use ops::{
    coproduct, extend_along_face_inclusion, product, pullback, restrict_along_face_inclusion, restrict_to_subsets,
    sub_functor, Subset,
};
pub use search::{enumerate_matchings, SearchLimits};

/// Matchings keyed by canonical face, each mapping composite A (through
/// `mid_a`) to composite B (through `mid_b`) by element index.
pub type FaceMaps = BTreeMap<Face2, Vec<usize>>;

#[derive(Clone, PartialEq, Eq, Debug)]
pub struct CubeFunctor {
    n: usize,
    sets: Vec<SetRef>,
    edges: BTreeMap<Edge, Correspondence>,
    faces: FaceMaps,
}

impl CubeFunctor {
    /// (D-1) and (D-2) data. Missing edges become empty correspondences.
    pub fn new(n: usize, sets: Vec<SetRef>, mut edges: BTreeMap<Edge, Correspondence>) -> Result<Self> {
        if sets.len() != 1usize << n {
            return Err(Error::Functor(format!("expected {} vertex sets, got {}", 1usize << n, sets.len())));
        }
        let mut normalized = BTreeMap::new();
        for e in Edge::all(n) {
            let (u, v) = (e.upper.mask() as usize, e.lower.mask() as usize);
            let c = match edges.remove(&e) {
                Some(c) => {
                    if **c.source_set() != *sets[u] || **c.target_set() != *sets[v] {
                        return Err(Error::Functor(format!("edge {e} does not have the declared endpoint sets")));
                    }
                    Correspondence::from_spans(sets[u].clone(), sets[v].clone(), c.elements().to_vec())?
                }
                None => Correspondence::empty(sets[u].clone(), sets[v].clone()),
            };
            normalized.insert(e, c);
        }
        if let Some(e) = edges.keys().next() {
            return Err(Error::Functor(format!("edge {e} is not an edge of C({n})")));
        }
        Ok(CubeFunctor { n, sets, edges: normalized, faces: BTreeMap::new() })
    }

    /// The functor on `C(n)` with every set empty.
    pub fn empty(n: usize) -> Self {
        let e: SetRef = Arc::new(FiniteSet::empty());
        CubeFunctor::new(n, vec![e; 1 << n], BTreeMap::new()).unwrap()
    }

    /// Attach (D-3) data, checking each matching is a 2-morphism.
    pub fn with_faces(mut self, faces: FaceMaps) -> Result<Self> {
        for (f, m) in faces {
            self.set_face(f, m)?;
        }
        Ok(self)
    }

    pub fn set_face(&mut self, f: Face2, map: Vec<usize>) -> Result<()> {
        if f.top.dim() != self.n {
            return Err(Error::Dimension(format!("face {f} not in C({})", self.n)));
        }
        let (a, b) = self.face_composites(&f);
        if !crate::burnside::is_two_morphism(&map, &a.to_correspondence(self), &b.to_correspondence(self)) {
            return Err(Error::Functor(format!("matching on {f} is not a 2-morphism")));
        }
        self.faces.insert(f, map);
        Ok(())
    }

    pub(crate) fn set_face_unchecked(&mut self, f: Face2, map: Vec<usize>) {
        self.faces.insert(f, map);
    }

    pub fn clear_faces(&self) -> Self {
        CubeFunctor { faces: BTreeMap::new(), ..self.clone() }
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn set(&self, v: &Vertex) -> &SetRef {
        &self.sets[v.mask() as usize]
    }

    pub fn sets(&self) -> &[SetRef] {
        &self.sets
    }

    pub fn edge(&self, e: &Edge) -> &Correspondence {
        &self.edges[e]
    }

    pub fn edges(&self) -> &BTreeMap<Edge, Correspondence> {
        &self.edges
    }

    pub fn face(&self, f: &Face2) -> Option<&[usize]> {
        self.faces.get(f).map(|v| v.as_slice())
    }

    pub fn faces(&self) -> &FaceMaps {
        &self.faces
    }

    /// Whether every 2-face carries a matching.
    pub fn has_all_faces(&self) -> bool {
        self.faces.len() == Face2::all(self.n).len()
    }

    pub fn total_size(&self) -> usize {
        self.sets.iter().map(|s| s.len()).sum()
    }

    /// Support: vertices with nonempty sets.
    pub fn support(&self) -> Vec<Vertex> {
        Vertex::all(self.n).filter(|v| !self.set(v).is_empty()).collect()
    }

    /// The two 2-step composites of a face.
    pub fn face_composites(&self, f: &Face2) -> (ChainComposite, ChainComposite) {
        (
            ChainComposite::new(self, &MaximalChain::new(vec![f.top, f.mid_a, f.bottom]).unwrap()),
            ChainComposite::new(self, &MaximalChain::new(vec![f.top, f.mid_b, f.bottom]).unwrap()),
        )
    }

    /// The stored matching as a bijection between correspondences.
    pub fn face_bijection(&self, f: &Face2) -> Option<BijectionOver> {
        let m = self.face(f)?;
        let (a, b) = self.face_composites(f);
        BijectionOver::new(a.to_correspondence(self), b.to_correspondence(self), m.to_vec()).ok()
    }
}

/// A functor with a formal shift `Σ^r F`.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct StableFunctor {
    pub functor: CubeFunctor,
    pub shift: i64,
}

impl StableFunctor {
    pub fn new(functor: CubeFunctor, shift: i64) -> Self {
        StableFunctor { functor, shift }
    }
}

/// The iterated fiber product along a maximal chain. Each element is a tuple
/// of edge element indices in chain order; elements are sorted
/// lexicographically with the last edge most significant.
#[derive(Clone, Debug)]
pub struct ChainComposite {
    pub chain: MaximalChain,
    pub tuples: Vec<Vec<u32>>,
    pub s: Vec<usize>,
    pub t: Vec<usize>,
    lookup: HashMap<Vec<u32>, usize>,
}

impl ChainComposite {
    pub fn new(f: &CubeFunctor, chain: &MaximalChain) -> Self {
        let top = f.set(&chain.top());
        let mut tuples: Vec<Vec<u32>> = vec![Vec::new(); top.len()];
        let mut s: Vec<usize> = (0..top.len()).collect();
        let mut t = s.clone();
        for e in chain.edges() {
            let corr = f.edge(&e);
            let mut by_t: Vec<Vec<usize>> = vec![Vec::new(); f.set(&e.upper).len()];
            for (i, &ti) in t.iter().enumerate() {
                by_t[ti].push(i);
            }
            let mut nt = Vec::new();
            let mut ns = Vec::new();
            let mut ntt = Vec::new();
            for (ei, sp) in corr.elements().iter().enumerate() {
                for &ci in &by_t[sp.s] {
                    let mut tup = tuples[ci].clone();
                    tup.push(ei as u32);
                    nt.push(tup);
                    ns.push(s[ci]);
                    ntt.push(sp.t);
                }
            }
            tuples = nt;
            s = ns;
            t = ntt;
        }
        let lookup = tuples.iter().enumerate().map(|(i, k)| (k.clone(), i)).collect();
        ChainComposite { chain: chain.clone(), tuples, s, t, lookup }
    }

    pub fn len(&self) -> usize {
        self.tuples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.tuples.is_empty()
    }

    pub fn index_of(&self, tuple: &[u32]) -> Option<usize> {
        self.lookup.get(tuple).copied()
    }

    /// Flattened id of element `i`, top morphism first.
    pub fn element_id(&self, f: &CubeFunctor, i: usize) -> String {
        let edges = self.chain.edges();
        if edges.is_empty() {
            return f.set(&self.chain.top()).get(self.s[i]).to_string();
        }
        let parts: Vec<&str> = edges
            .iter()
            .zip(&self.tuples[i])
            .rev()
            .map(|(e, &k)| f.edge(e).elements()[k as usize].id.as_str())
            .collect();
        parts.join(COMPOSE_SEP)
    }

    pub fn to_correspondence(&self, f: &CubeFunctor) -> Correspondence {
        let spans = (0..self.len()).map(|i| Span { id: self.element_id(f, i), s: self.s[i], t: self.t[i] }).collect();
        Correspondence::from_spans(f.set(&self.chain.top()).clone(), f.set(&self.chain.bottom()).clone(), spans)
            .expect("composite ids are unique")
    }
}

pub fn composite_along_chain(f: &CubeFunctor, c: &MaximalChain) -> Result<Correspondence> {
    if c.top().dim() != f.dim() {
        return Err(Error::Dimension(format!("chain {c} not in C({})", f.dim())));
    }
    Ok(ChainComposite::new(f, c).to_correspondence(f))
}

/// Face matchings with their inverses and the 2-step composites they act on.
pub(crate) struct Transport<'a> {
    pub f: &'a CubeFunctor,
    comps: HashMap<Face2, (ChainComposite, ChainComposite)>,
    fwd: HashMap<Face2, Vec<usize>>,
    inv: HashMap<Face2, Vec<usize>>,
}

impl<'a> Transport<'a> {
    pub fn new(f: &'a CubeFunctor) -> Self {
        let mut t = Transport { f, comps: HashMap::new(), fwd: HashMap::new(), inv: HashMap::new() };
        for (face, m) in &f.faces {
            t.assign(*face, m.clone());
        }
        t
    }

    pub fn composites(&mut self, face: &Face2) -> &(ChainComposite, ChainComposite) {
        let f = self.f;
        self.comps.entry(*face).or_insert_with(|| f.face_composites(face))
    }

    pub fn assign(&mut self, face: Face2, map: Vec<usize>) {
        let mut inv = vec![0; map.len()];
        for (i, &j) in map.iter().enumerate() {
            inv[j] = i;
        }
        self.composites(&face);
        self.fwd.insert(face, map);
        self.inv.insert(face, inv);
    }

    pub fn forward(&self, face: &Face2) -> &[usize] {
        &self.fwd[face]
    }

    pub fn unassign(&mut self, face: &Face2) {
        self.fwd.remove(face);
        self.inv.remove(face);
    }

    /// Apply the swap at interior index `i` of `chain` to one composite tuple.
    pub fn swap_tuple(&self, chain: &MaximalChain, tuple: &[u32], i: usize) -> Result<Vec<u32>> {
        let vs = chain.vertices();
        let (face, via_a) = Face2::through(vs[i - 1], vs[i], vs[i + 1])?;
        let missing = || Error::Functor(format!("no matching stored on face {face}"));
        let (ca, cb) = self.comps.get(&face).ok_or_else(missing)?;
        let pair = [tuple[i - 1], tuple[i]];
        let (from, to, map) = if via_a {
            (ca, cb, self.fwd.get(&face).ok_or_else(missing)?)
        } else {
            (cb, ca, self.inv.get(&face).ok_or_else(missing)?)
        };
        let k = from
            .index_of(&pair)
            .ok_or_else(|| Error::Invariant(format!("pair {pair:?} missing from a composite of {face}")))?;
        let np = &to.tuples[map[k]];
        let mut out = tuple.to_vec();
        out[i - 1] = np[0];
        out[i] = np[1];
        Ok(out)
    }

    /// Transport every element of the composite along `chain` through a
    /// sequence of swaps, returning the final tuples.
    pub fn transport(&self, chain: &MaximalChain, tuples: &[Vec<u32>], swaps: &[usize]) -> Result<(MaximalChain, Vec<Vec<u32>>)> {
        let mut cur = chain.clone();
        let mut tups = tuples.to_vec();
        for &i in swaps {
            for t in tups.iter_mut() {
                *t = self.swap_tuple(&cur, t, i)?;
            }
            cur = cur.swap(i)?;
        }
        Ok((cur, tups))
    }
}

/// Compose stored face matchings along the deterministic swap path from
/// `c1` to `c2`.
pub fn reconstruct_two_morphism(f: &CubeFunctor, c1: &MaximalChain, c2: &MaximalChain) -> Result<BijectionOver> {
    let path: Vec<usize> = chain_swap_path(c1, c2)?.into_iter().map(|(i, _)| i).collect();
    reconstruct_along(f, c1, &path)
}

/// Compose stored face matchings along an explicit sequence of swap indices.
pub fn reconstruct_along(f: &CubeFunctor, c1: &MaximalChain, swaps: &[usize]) -> Result<BijectionOver> {
    let mut tr = Transport::new(f);
    let mut cur = c1.clone();
    for &i in swaps {
        let vs = cur.vertices();
        if i == 0 || i >= cur.len() {
            return Err(Error::Cube(format!("swap index {i} out of range")));
        }
        let (face, _) = Face2::through(vs[i - 1], vs[i], vs[i + 1])?;
        if f.face(&face).is_none() {
            return Err(Error::Functor(format!("coherence data missing on face {face}")));
        }
        tr.composites(&face);
        cur = cur.swap(i)?;
    }
    let src = ChainComposite::new(f, c1);
    let (end, tuples) = tr.transport(c1, &src.tuples, swaps)?;
    let dst = ChainComposite::new(f, &end);
    let map = tuples
        .iter()
        .map(|t| dst.index_of(t).ok_or_else(|| Error::Invariant("transported tuple not in target composite".into())))
        .collect::<Result<Vec<usize>>>()?;
    BijectionOver::new(src.to_correspondence(f), dst.to_correspondence(f), map)
}
