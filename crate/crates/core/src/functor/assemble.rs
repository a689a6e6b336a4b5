use std::collections::{BTreeMap, HashMap};

use super::{ChainComposite, CubeFunctor, FaceMaps};
use crate::burnside::{Correspondence, SetRef};
use crate::cube::{Edge, Face2};
use crate::error::{Error, Result};

/// Where an edge element of an assembled functor came from: source functor,
/// source edge, element index.
pub(crate) type Origin = (usize, Edge, usize);

/// Builds a functor out of pieces of other functors and carries their face
/// matchings across by tracking the origin of every edge element.
pub(crate) struct Assembly {
    n: usize,
    sets: Vec<SetRef>,
    edges: BTreeMap<Edge, Correspondence>,
    origin: HashMap<(Edge, usize), Origin>,
    back: HashMap<(Edge, Origin), usize>,
}

impl Assembly {
    pub fn new(n: usize, sets: Vec<SetRef>) -> Self {
        Assembly { n, sets, edges: BTreeMap::new(), origin: HashMap::new(), back: HashMap::new() }
    }

    pub fn set(&self, mask: usize) -> &SetRef {
        &self.sets[mask]
    }

    /// Add an edge whose `k`-th element has origin `origins[k]`.
    pub fn add_edge(&mut self, e: Edge, corr: Correspondence, origins: Vec<Option<Origin>>) {
        debug_assert_eq!(corr.len(), origins.len());
        for (k, o) in origins.into_iter().enumerate() {
            if let Some(o) = o {
                self.origin.insert((e, k), o);
                self.back.insert((e, o), k);
            }
        }
        self.edges.insert(e, corr);
    }

    /// Record one more origin for an existing element, used only when
    /// carrying matchings out of a source.
    pub fn alias(&mut self, e: Edge, k: usize, o: Origin) {
        self.back.insert((e, o), k);
    }

    /// Add an edge copied whole from `src`.
    pub fn copy_edge(&mut self, e: Edge, src: usize, src_edge: Edge, corr: &Correspondence) -> Result<()> {
        let (u, v) = (e.upper.mask() as usize, e.lower.mask() as usize);
        let c = Correspondence::from_spans(self.sets[u].clone(), self.sets[v].clone(), corr.elements().to_vec())?;
        let origins = (0..c.len()).map(|k| Some((src, src_edge, k))).collect();
        self.add_edge(e, c, origins);
        Ok(())
    }

    /// The functor without face data, plus every face matching that can be
    /// transferred from `sources`. Faces with empty composites get the empty
    /// matching; faces whose composites mix origins are left out.
    pub fn finish(mut self, sources: &[&CubeFunctor]) -> Result<(CubeFunctor, FaceMaps)> {
        let f = CubeFunctor::new(self.n, std::mem::take(&mut self.sets), std::mem::take(&mut self.edges))?;
        let faces = Face2::all(self.n);
        let results = crate::par::map(&faces, |face| self.transfer(&f, face, sources));
        let mut maps = BTreeMap::new();
        for (face, r) in faces.into_iter().zip(results) {
            if let Some(m) = r? {
                maps.insert(face, m);
            }
        }
        Ok((f, maps))
    }

    fn transfer(&self, f: &CubeFunctor, face: &Face2, sources: &[&CubeFunctor]) -> Result<Option<Vec<usize>>> {
        let (ca, cb) = f.face_composites(face);
        if ca.is_empty() && cb.is_empty() {
            return Ok(Some(Vec::new()));
        }
        let ea = ca.chain.edges();
        let eb = cb.chain.edges();
        let mut map = Vec::with_capacity(ca.len());
        let mut src_comps: Option<(usize, Face2, bool, ChainComposite, ChainComposite, Vec<usize>)> = None;
        for tup in &ca.tuples {
            let o1 = self.origin.get(&(ea[0], tup[0] as usize));
            let o2 = self.origin.get(&(ea[1], tup[1] as usize));
            let (Some(&(p1, e1, i1)), Some(&(p2, e2, i2))) = (o1, o2) else { return Ok(None) };
            if p1 != p2 || e1.lower != e2.upper {
                return Ok(None);
            }
            if src_comps.as_ref().map(|s| s.0 != p1 || s.1.top != e1.upper).unwrap_or(true) {
                let (sf, via_a) = Face2::through(e1.upper, e1.lower, e2.lower)?;
                let src = sources[p1];
                if src.face(&sf).is_none() {
                    return Ok(None);
                }
                let (sa, sb) = src.face_composites(&sf);
                let sm = src.face(&sf).unwrap();
                let dir = if via_a {
                    sm.to_vec()
                } else {
                    let mut inv = vec![0; sm.len()];
                    for (i, &j) in sm.iter().enumerate() {
                        inv[j] = i;
                    }
                    inv
                };
                src_comps = Some((p1, sf, via_a, sa, sb, dir));
            }
            let (p, sf, via_a, sa, sb, dir) = src_comps.as_ref().unwrap();
            let (from, to) = if *via_a { (sa, sb) } else { (sb, sa) };
            let k = from
                .index_of(&[i1 as u32, i2 as u32])
                .ok_or_else(|| Error::Invariant(format!("element missing from source composite of {sf}")))?;
            let target_k = dir[k];
            let out = &to.tuples[target_k];
            let oe = to.chain.edges();
            let j1 = self.back.get(&(eb[0], (*p, oe[0], out[0] as usize)));
            let j2 = self.back.get(&(eb[1], (*p, oe[1], out[1] as usize)));
            let (Some(&j1), Some(&j2)) = (j1, j2) else {
                return Err(Error::Functor(format!("face {face}: matching leaves the assembled functor")));
            };
            let idx = cb
                .index_of(&[j1 as u32, j2 as u32])
                .ok_or_else(|| Error::Functor(format!("face {face}: matching leaves the assembled functor")))?;
            map.push(idx);
        }
        if map.len() != cb.len() {
            return Err(Error::Functor(format!("face {face}: composites have different sizes")));
        }
        Ok(Some(map))
    }
}
