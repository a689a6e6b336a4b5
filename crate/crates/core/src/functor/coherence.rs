use std::collections::HashMap;

use serde::Serialize;

use super::{ChainComposite, CubeFunctor, Transport};
use crate::burnside::is_two_morphism;
use crate::cube::{Face2, Face3, MaximalChain};
use crate::error::Result;

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize)]
pub struct C0Report {
    /// Faces whose two composites differ in size over some `(x, z)`.
    pub violations: Vec<String>,
}

impl C0Report {
    pub fn passes(&self) -> bool {
        self.violations.is_empty()
    }
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize)]
pub struct CoherenceReport {
    pub missing_faces: Vec<String>,
    pub invalid_matchings: Vec<String>,
    pub hexagon_failures: Vec<String>,
    /// 3-faces whose hexagon was not checked because a face was missing.
    pub unchecked_hexagons: usize,
}

impl CoherenceReport {
    pub fn passes(&self) -> bool {
        self.missing_faces.is_empty() && self.invalid_matchings.is_empty() && self.hexagon_failures.is_empty()
    }
}

/// Fiber sizes of a composite over `(source, target)`.
pub(crate) fn fiber_counts(c: &ChainComposite) -> HashMap<(usize, usize), usize> {
    let mut m = HashMap::new();
    for (&s, &t) in c.s.iter().zip(&c.t) {
        *m.entry((s, t)).or_insert(0) += 1;
    }
    m
}

/// Composites around every 2-face agree in size over each pair of endpoints.
pub fn validate_c0(f: &CubeFunctor) -> C0Report {
    let faces = Face2::all(f.dim());
    let bad = crate::par::map(&faces, |face| {
        let (a, b) = f.face_composites(face);
        if a.len() == b.len() && fiber_counts(&a) == fiber_counts(&b) {
            None
        } else {
            Some(format!("{face}: |A| = {}, |B| = {}", a.len(), b.len()))
        }
    });
    C0Report { violations: bad.into_iter().flatten().collect() }
}

/// Every face carries a 2-morphism and every 3-face hexagon commutes.
pub fn validate_coherence(f: &CubeFunctor) -> CoherenceReport {
    let mut rep = CoherenceReport::default();
    for face in Face2::all(f.dim()) {
        match f.face(&face) {
            None => rep.missing_faces.push(face.key()),
            Some(m) => {
                let (a, b) = f.face_composites(&face);
                if !is_two_morphism(m, &a.to_correspondence(f), &b.to_correspondence(f)) {
                    rep.invalid_matchings.push(face.key());
                }
            }
        }
    }
    if !rep.invalid_matchings.is_empty() {
        return rep;
    }
    let tr = Transport::new(f);
    let cubes = Face3::all(f.dim());
    let results = crate::par::map(&cubes, |c| {
        if c.faces().iter().any(|x| f.face(x).is_none()) {
            return None;
        }
        Some(hexagon_commutes(&tr, c).unwrap_or(false))
    });
    for (c, r) in cubes.iter().zip(results) {
        match r {
            None => rep.unchecked_hexagons += 1,
            Some(false) => rep.hexagon_failures.push(c.to_string()),
            Some(true) => {}
        }
    }
    rep
}

/// Walk the hexagon of swaps `1, 2, 1, 2, 1, 2` around a 3-face and check it
/// returns every composite element to itself.
pub(crate) fn hexagon_commutes(tr: &Transport<'_>, c: &Face3) -> Result<bool> {
    let chain = MaximalChain::from_ordering(c.top, &c.coords);
    let comp = ChainComposite::new(tr.f, &chain);
    let (end, tuples) = tr.transport(&chain, &comp.tuples, &[1, 2, 1, 2, 1, 2])?;
    debug_assert_eq!(end, chain);
    Ok(tuples == comp.tuples)
}
