use std::collections::{BTreeMap, HashMap};

use super::{ChainComposite, CubeFunctor};
use crate::cube::{Edge, Face2, Vertex};
use crate::error::{Error, Result};

/// Bijections `F(v) → G(v)` and `F(e) → G(e)` commuting with sources,
/// targets and face matchings.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct NaturalIsomorphism {
    pub vertex_maps: Vec<Vec<usize>>,
    pub edge_maps: BTreeMap<Edge, Vec<usize>>,
}

type Counts = HashMap<(usize, usize), usize>;

fn edge_counts(f: &CubeFunctor) -> BTreeMap<Edge, Counts> {
    f.edges()
        .iter()
        .map(|(e, c)| {
            let mut m = HashMap::new();
            for s in c.elements() {
                *m.entry((s.s, s.t)).or_insert(0) += 1;
            }
            (*e, m)
        })
        .collect()
}

/// Jointly refine element colors of both functors by their edge
/// neighbourhoods until stable.
fn refine(f: &CubeFunctor, g: &CubeFunctor) -> (Vec<Vec<u32>>, Vec<Vec<u32>>) {
    let init = |h: &CubeFunctor| -> Vec<Vec<u32>> { h.sets().iter().map(|s| vec![0; s.len()]).collect() };
    let (mut cf, mut cg) = (init(f), init(g));
    let mut classes = 0;
    loop {
        let mut palette: BTreeMap<Vec<(u32, u32, i64, u32)>, u32> = BTreeMap::new();
        let sig = |h: &CubeFunctor, col: &Vec<Vec<u32>>| -> Vec<Vec<Vec<(u32, u32, i64, u32)>>> {
            let mut out: Vec<Vec<Vec<(u32, u32, i64, u32)>>> =
                col.iter().enumerate().map(|(m, c)| c.iter().map(|&x| vec![(u32::MAX, m as u32, 0, x)]).collect()).collect();
            for (e, c) in h.edges() {
                let (u, l) = (e.upper.mask() as usize, e.lower.mask() as usize);
                for s in c.elements() {
                    out[u][s.s].push((0, l as u32, 1, col[l][s.t]));
                    out[l][s.t].push((1, u as u32, 1, col[u][s.s]));
                }
            }
            for v in out.iter_mut() {
                for x in v.iter_mut() {
                    x[1..].sort_unstable();
                }
            }
            out
        };
        let (sf, sg) = (sig(f, &cf), sig(g, &cg));
        let mut assign = |s: Vec<Vec<Vec<(u32, u32, i64, u32)>>>| -> Vec<Vec<u32>> {
            s.into_iter()
                .map(|v| {
                    v.into_iter()
                        .map(|x| {
                            let k = palette.len() as u32;
                            *palette.entry(x).or_insert(k)
                        })
                        .collect()
                })
                .collect()
        };
        let (nf, ng) = (assign(sf), assign(sg));
        let count = palette.len();
        cf = nf;
        cg = ng;
        if count == classes {
            return (cf, cg);
        }
        classes = count;
    }
}

/// Bounded search for a natural isomorphism `F ≅ G`. `Ok(None)` means none
/// exists; exceeding `max_nodes` search steps is an error.
pub fn find_natural_isomorphism(f: &CubeFunctor, g: &CubeFunctor, max_nodes: u64) -> Result<Option<NaturalIsomorphism>> {
    if f.dim() != g.dim() {
        return Ok(None);
    }
    if f.sets().iter().zip(g.sets()).any(|(a, b)| a.len() != b.len())
        || f.edges().iter().any(|(e, c)| c.len() != g.edge(e).len())
        || f.faces().keys().ne(g.faces().keys())
    {
        return Ok(None);
    }
    let (cf, cg) = refine(f, g);
    let mut s = IsoSearch {
        f,
        g,
        cf,
        cg,
        nf: edge_counts(f),
        ng: edge_counts(g),
        order: Vec::new(),
        sigma: f.sets().iter().map(|s| vec![usize::MAX; s.len()]).collect(),
        used: g.sets().iter().map(|s| vec![false; s.len()]).collect(),
        nodes: 0,
        max_nodes,
        edges: f.edges().keys().copied().collect(),
        tau: BTreeMap::new(),
        found: None,
    };
    for v in Vertex::all(f.dim()) {
        for i in 0..f.set(&v).len() {
            s.order.push((v.mask() as usize, i));
        }
    }
    // Most constrained colors first.
    let mut class_size: HashMap<u32, usize> = HashMap::new();
    for c in s.cf.iter().flatten() {
        *class_size.entry(*c).or_insert(0) += 1;
    }
    let cf = s.cf.clone();
    s.order.sort_by_key(|&(m, i)| (m, class_size[&cf[m][i]], i));
    s.vertex(0)?;
    Ok(s.found)
}

struct IsoSearch<'a> {
    f: &'a CubeFunctor,
    g: &'a CubeFunctor,
    cf: Vec<Vec<u32>>,
    cg: Vec<Vec<u32>>,
    nf: BTreeMap<Edge, Counts>,
    ng: BTreeMap<Edge, Counts>,
    order: Vec<(usize, usize)>,
    sigma: Vec<Vec<usize>>,
    used: Vec<Vec<bool>>,
    nodes: u64,
    max_nodes: u64,
    edges: Vec<Edge>,
    tau: BTreeMap<Edge, Vec<usize>>,
    found: Option<NaturalIsomorphism>,
}

impl IsoSearch<'_> {
    fn tick(&mut self) -> Result<()> {
        self.nodes += 1;
        if self.nodes > self.max_nodes {
            return Err(Error::SearchLimit(format!("natural isomorphism search exceeded {} steps", self.max_nodes)));
        }
        Ok(())
    }

    fn vertex(&mut self, k: usize) -> Result<()> {
        if self.found.is_some() {
            return Ok(());
        }
        if k == self.order.len() {
            return self.edge(0);
        }
        let (m, i) = self.order[k];
        for y in 0..self.g.sets()[m].len() {
            if self.used[m][y] || self.cg[m][y] != self.cf[m][i] {
                continue;
            }
            self.tick()?;
            self.sigma[m][i] = y;
            if self.consistent(m, i) {
                self.used[m][y] = true;
                self.vertex(k + 1)?;
                self.used[m][y] = false;
            }
            self.sigma[m][i] = usize::MAX;
            if self.found.is_some() {
                break;
            }
        }
        Ok(())
    }

    /// Edge multiplicities between `(m, i)` and already assigned elements agree.
    fn consistent(&self, m: usize, i: usize) -> bool {
        let v = Vertex::new(self.f.dim(), m as u32);
        let y = self.sigma[m][i];
        let get = |c: &Counts, a: usize, b: usize| c.get(&(a, b)).copied().unwrap_or(0);
        for k in v.ones_coords() {
            let e = Edge::down(v, k);
            let l = e.lower.mask() as usize;
            for (j, &z) in self.sigma[l].iter().enumerate() {
                if z != usize::MAX && get(&self.nf[&e], i, j) != get(&self.ng[&e], y, z) {
                    return false;
                }
            }
        }
        for k in 1..=v.dim() {
            if v.bit(k) == 1 {
                continue;
            }
            let e = Edge { upper: v.with_bit(k, 1), lower: v };
            let u = e.upper.mask() as usize;
            for (j, &z) in self.sigma[u].iter().enumerate() {
                if z != usize::MAX && get(&self.nf[&e], j, i) != get(&self.ng[&e], z, y) {
                    return false;
                }
            }
        }
        true
    }

    fn edge(&mut self, k: usize) -> Result<()> {
        if self.found.is_some() {
            return Ok(());
        }
        if k == self.edges.len() {
            self.found = Some(NaturalIsomorphism { vertex_maps: self.sigma.clone(), edge_maps: self.tau.clone() });
            return Ok(());
        }
        let e = self.edges[k];
        let (cf, cg) = (self.f.edge(&e), self.g.edge(&e));
        let (su, sl) = (&self.sigma[e.upper.mask() as usize], &self.sigma[e.lower.mask() as usize]);
        let mut fibers: BTreeMap<(usize, usize), (Vec<usize>, Vec<usize>)> = BTreeMap::new();
        for (i, s) in cf.elements().iter().enumerate() {
            fibers.entry((su[s.s], sl[s.t])).or_default().0.push(i);
        }
        for (i, s) in cg.elements().iter().enumerate() {
            fibers.entry((s.s, s.t)).or_default().1.push(i);
        }
        let fibers: Vec<_> = fibers.into_values().collect();
        let mut map = vec![usize::MAX; cf.len()];
        self.fiber(k, &fibers, 0, &mut map)
    }

    fn fiber(&mut self, k: usize, fibers: &[(Vec<usize>, Vec<usize>)], fi: usize, map: &mut Vec<usize>) -> Result<()> {
        if fi == fibers.len() {
            let e = self.edges[k];
            self.tau.insert(e, map.clone());
            if self.faces_commute(k) {
                self.edge(k + 1)?;
            }
            self.tau.remove(&e);
            return Ok(());
        }
        let (xs, ys) = &fibers[fi];
        let mut used = vec![false; ys.len()];
        self.perm(k, fibers, fi, xs, ys, 0, &mut used, map)
    }

    #[allow(clippy::too_many_arguments)]
    fn perm(
        &mut self,
        k: usize,
        fibers: &[(Vec<usize>, Vec<usize>)],
        fi: usize,
        xs: &[usize],
        ys: &[usize],
        pos: usize,
        used: &mut [bool],
        map: &mut Vec<usize>,
    ) -> Result<()> {
        if pos == xs.len() {
            return self.fiber(k, fibers, fi + 1, map);
        }
        for j in 0..ys.len() {
            if used[j] {
                continue;
            }
            self.tick()?;
            used[j] = true;
            map[xs[pos]] = ys[j];
            self.perm(k, fibers, fi, xs, ys, pos + 1, used, map)?;
            used[j] = false;
            if self.found.is_some() {
                break;
            }
        }
        Ok(())
    }

    /// Check every face all of whose edges now carry a bijection.
    fn faces_commute(&self, k: usize) -> bool {
        let e = self.edges[k];
        for face in Face2::all(self.f.dim()) {
            let fe = [
                Edge { upper: face.top, lower: face.mid_a },
                Edge { upper: face.mid_a, lower: face.bottom },
                Edge { upper: face.top, lower: face.mid_b },
                Edge { upper: face.mid_b, lower: face.bottom },
            ];
            if !fe.contains(&e) || fe.iter().any(|x| !self.tau.contains_key(x)) {
                continue;
            }
            let (Some(mf), Some(mg)) = (self.f.face(&face), self.g.face(&face)) else { continue };
            let (fa, fb) = self.f.face_composites(&face);
            let (ga, gb) = self.g.face_composites(&face);
            let push = |c: &ChainComposite, i: usize, e1: &Edge, e2: &Edge| {
                [self.tau[e1][c.tuples[i][0] as usize] as u32, self.tau[e2][c.tuples[i][1] as usize] as u32]
            };
            for i in 0..fa.len() {
                let ai = ga.index_of(&push(&fa, i, &fe[0], &fe[1]));
                let bi = gb.index_of(&push(&fb, mf[i], &fe[2], &fe[3]));
                match (ai, bi) {
                    (Some(a), Some(b)) if mg[a] == b => {}
                    _ => return false,
                }
            }
        }
        true
    }
}
