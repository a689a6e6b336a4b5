use std::collections::{BTreeMap, HashMap};

use super::coherence::hexagon_commutes;
use super::{CubeFunctor, FaceMaps, Transport};
use crate::cube::{Face2, Face3};
use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct SearchLimits {
    /// Largest number of candidate matchings tolerated on a single face.
    pub max_face_bijections: u128,
    /// Largest number of faces without a fixed matching.
    pub max_faces: usize,
    /// Stop after this many complete solutions.
    pub max_results: usize,
}

impl Default for SearchLimits {
    fn default() -> Self {
        SearchLimits { max_face_bijections: 3_628_800, max_faces: 64, max_results: 100_000 }
    }
}

/// Every assignment of face matchings that makes all hexagons commute.
/// Matchings already stored on `f` are kept fixed.
pub fn enumerate_matchings(f: &CubeFunctor, limits: &SearchLimits) -> Result<Vec<FaceMaps>> {
    let faces: Vec<Face2> = Face2::all(f.dim());
    let free = faces.iter().filter(|x| f.face(x).is_none()).count();
    if free > limits.max_faces {
        return Err(Error::SearchLimit(format!("{free} faces to search, limit {}", limits.max_faces)));
    }
    let mut tr = Transport::new(f);
    let mut fibers = Vec::with_capacity(faces.len());
    for face in &faces {
        let (a, b) = tr.composites(face).clone();
        let mut groups: BTreeMap<(usize, usize), (Vec<usize>, Vec<usize>)> = BTreeMap::new();
        for i in 0..a.len() {
            groups.entry((a.s[i], a.t[i])).or_default().0.push(i);
        }
        for i in 0..b.len() {
            groups.entry((b.s[i], b.t[i])).or_default().1.push(i);
        }
        let mut count: u128 = 1;
        for (xs, ys) in groups.values() {
            if xs.len() != ys.len() {
                return Err(Error::Functor(format!("C-0 fails on {face}")));
            }
            for k in 1..=xs.len() as u128 {
                count = count.saturating_mul(k);
            }
        }
        if f.face(face).is_none() && count > limits.max_face_bijections {
            return Err(Error::SearchLimit(format!(
                "{count} candidate matchings on {face}, limit {}",
                limits.max_face_bijections
            )));
        }
        fibers.push((a.len(), groups.into_values().collect::<Vec<_>>()));
    }
    // Each 3-face is checked as soon as its last face is assigned.
    let index: HashMap<Face2, usize> = faces.iter().enumerate().map(|(i, x)| (*x, i)).collect();
    let mut completes: Vec<Vec<Face3>> = vec![Vec::new(); faces.len()];
    for c in Face3::all(f.dim()) {
        let last = c.faces().iter().map(|x| index[x]).max().unwrap();
        completes[last].push(c);
    }
    for face in &faces {
        tr.unassign(face);
    }
    let mut s = Search { f, faces: &faces, fibers, completes, tr, results: Vec::new(), limits: *limits };
    s.face(0)?;
    Ok(s.results)
}

struct Search<'a> {
    f: &'a CubeFunctor,
    faces: &'a [Face2],
    fibers: Vec<(usize, Vec<(Vec<usize>, Vec<usize>)>)>,
    completes: Vec<Vec<Face3>>,
    tr: Transport<'a>,
    results: Vec<FaceMaps>,
    limits: SearchLimits,
}

impl Search<'_> {
    fn face(&mut self, fi: usize) -> Result<()> {
        if self.results.len() >= self.limits.max_results {
            return Ok(());
        }
        if fi == self.faces.len() {
            let maps = self.faces.iter().map(|x| (*x, self.tr.forward(x).to_vec())).collect();
            self.results.push(maps);
            return Ok(());
        }
        let face = self.faces[fi];
        if let Some(m) = self.f.face(&face) {
            return self.try_map(fi, m.to_vec());
        }
        let mut map = vec![usize::MAX; self.fibers[fi].0];
        self.fiber(fi, 0, &mut map)
    }

    fn fiber(&mut self, fi: usize, k: usize, map: &mut Vec<usize>) -> Result<()> {
        if k == self.fibers[fi].1.len() {
            return self.try_map(fi, map.clone());
        }
        let (xs, ys) = self.fibers[fi].1[k].clone();
        let mut used = vec![false; ys.len()];
        self.permute(fi, k, &xs, &ys, 0, &mut used, map)
    }

    #[allow(clippy::too_many_arguments)]
    fn permute(
        &mut self,
        fi: usize,
        k: usize,
        xs: &[usize],
        ys: &[usize],
        pos: usize,
        used: &mut [bool],
        map: &mut Vec<usize>,
    ) -> Result<()> {
        if pos == xs.len() {
            return self.fiber(fi, k + 1, map);
        }
        for j in 0..ys.len() {
            if !used[j] {
                used[j] = true;
                map[xs[pos]] = ys[j];
                self.permute(fi, k, xs, ys, pos + 1, used, map)?;
                used[j] = false;
                if self.results.len() >= self.limits.max_results {
                    break;
                }
            }
        }
        Ok(())
    }

    fn try_map(&mut self, fi: usize, map: Vec<usize>) -> Result<()> {
        let face = self.faces[fi];
        self.tr.assign(face, map);
        let mut ok = true;
        for c in &self.completes[fi] {
            if !hexagon_commutes(&self.tr, c)? {
                ok = false;
                break;
            }
        }
        if ok {
            self.face(fi + 1)?;
        }
        self.tr.unassign(&face);
        Ok(())
    }
}
