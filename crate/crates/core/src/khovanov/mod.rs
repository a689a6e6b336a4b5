//! The Khovanov functor of a link diagram: circles of each resolution,
//! labelings by `x₊`/`x₋`, edge correspondences from the Frobenius algebra
//! `Z[X]/(X²)`, and the ladybug matching on 2-faces.
//!
//! Conventions. Crossing `(a,b,c,d)` lists slots counterclockwise from the
//! incoming under-strand. The 0-resolution joins slots 3–0 and 1–2, the
//! 1-resolution joins 0–1 and 2–3, so the oriented resolution of a positive
//! crossing is its 0-resolution. Coordinate `i` of the cube is crossing
//! `i-1` of the list.

mod ladybug;
mod pd;

use std::collections::{BTreeMap, HashMap};
use std::fmt;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

pub use ladybug::{detect_ladybug, ladybug_configuration, ladybug_matching, LadybugData};
pub use pd::{connect_sum_pd, crossing_signs, disjoint_union_pd, parse_pd, PdCode, PdJson};

use crate::burnside::{Correspondence, FiniteSet, SetRef, Span};
use crate::cube::{Edge, Face2, Vertex};
use crate::error::{Error, Result};
use crate::functor::{restrict_to_subsets, validate_c0, validate_coherence, CubeFunctor, StableFunctor, Subset};
use crate::par;
use crate::totalization::{dualize, homology, tot};

/// The two slots joined to `slot` by the smoothing at a crossing.
pub(crate) fn smoothing_partner(resolution: u8, slot: u8) -> u8 {
    match (resolution, slot) {
        (0, 0) => 3,
        (0, 3) => 0,
        (0, 1) => 2,
        (0, 2) => 1,
        (_, 0) => 1,
        (_, 1) => 0,
        (_, 2) => 3,
        (_, _) => 2,
    }
}

/// The circles of one resolution. Each circle is a cyclic list of crossing
/// ends `(crossing, slot)`; consecutive pairs `(2m, 2m+1)` are the two ends
/// of a smoothing strand and an arc runs from `2m+1` to `2m+2`. Circles are
/// ordered by their smallest arc label; free loops come last with no ends.
#[derive(Clone, Debug)]
pub struct ResolvedDiagram {
    pub vertex: Vertex,
    pub circles: Vec<Vec<(usize, u8)>>,
    arc_circle: BTreeMap<u32, usize>,
}

impl ResolvedDiagram {
    pub fn len(&self) -> usize {
        self.circles.len()
    }

    pub fn is_empty(&self) -> bool {
        self.circles.is_empty()
    }

    /// The circle containing an arc.
    pub fn circle_of_arc(&self, arc: u32) -> Option<usize> {
        self.arc_circle.get(&arc).copied()
    }

    /// The circle through the smoothing strands at a crossing end.
    pub(crate) fn circle_of_end(&self, pd: &PdCode, c: usize, slot: u8) -> usize {
        self.arc_circle[&pd.crossings()[c][slot as usize]]
    }
}

pub fn resolve(pd: &PdCode, v: &Vertex) -> ResolvedDiagram {
    assert_eq!(v.dim(), pd.len(), "vertex dimension must equal the crossing count");
    let occ = pd.occurrences();
    let xs = pd.crossings();
    let mut seen = vec![[false; 4]; xs.len()];
    let mut circles: Vec<Vec<(usize, u8)>> = Vec::new();
    for c in 0..xs.len() {
        for s in 0..4u8 {
            if seen[c][s as usize] {
                continue;
            }
            let start = (c, s);
            let mut cur = start;
            let mut circle = Vec::new();
            loop {
                let p = (cur.0, smoothing_partner(v.bit(cur.0 + 1), cur.1));
                seen[cur.0][cur.1 as usize] = true;
                seen[p.0][p.1 as usize] = true;
                circle.push(cur);
                circle.push(p);
                let label = xs[p.0][p.1 as usize];
                let ends = &occ[&label];
                cur = if ends[0] == p { ends[1] } else { ends[0] };
                if cur == start {
                    break;
                }
            }
            circles.push(circle);
        }
    }
    let min_label = |circ: &Vec<(usize, u8)>| circ.iter().map(|&(c, s)| xs[c][s as usize]).min().unwrap();
    circles.sort_by_key(min_label);
    let mut arc_circle = BTreeMap::new();
    for (k, circ) in circles.iter().enumerate() {
        for &(c, s) in circ {
            arc_circle.insert(xs[c][s as usize], k);
        }
    }
    for l in pd.loop_labels() {
        arc_circle.insert(l, circles.len());
        circles.push(Vec::new());
    }
    ResolvedDiagram { vertex: *v, circles, arc_circle }
}

/// A labeling of the circles of `K_v`; `true` is `x₊`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct KhGenerator {
    pub vertex: Vertex,
    pub labels: Vec<bool>,
}

impl KhGenerator {
    pub fn label_string(&self) -> String {
        label_string(&self.labels)
    }

    pub fn plus_count(&self) -> usize {
        self.labels.iter().filter(|&&b| b).count()
    }

    /// Identifier `"bits:labels"`, e.g. `"101:+-"`.
    pub fn id(&self) -> String {
        format!("{}:{}", self.vertex, self.label_string())
    }
}

impl fmt::Display for KhGenerator {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.id())
    }
}

fn label_string(labels: &[bool]) -> String {
    labels.iter().map(|&b| if b { '+' } else { '-' }).collect()
}

fn mask_labels(mask: u64, k: usize) -> Vec<bool> {
    (0..k).map(|i| mask >> i & 1 == 1).collect()
}

/// All labelings of the circles at `v`, ordered by label string with `+`
/// before `-`.
pub fn generators(pd: &PdCode, v: &Vertex) -> Vec<KhGenerator> {
    let k = resolve(pd, v).len();
    sorted_masks(k).into_iter().map(|m| KhGenerator { vertex: *v, labels: mask_labels(m, k) }).collect()
}

fn sorted_masks(k: usize) -> Vec<u64> {
    assert!(k < 40, "too many circles");
    let mut masks: Vec<u64> = (0..1u64 << k).collect();
    // '+' sorts before '-', so a set bit in the first differing circle comes first.
    masks.sort_by_key(|&m| (0..k).map(|i| m >> i & 1 == 0).collect::<Vec<bool>>());
    masks
}

/// `n₊ − 2n₋ + |v| + #x₊ − #x₋`.
pub fn quantum_grading(pd: &PdCode, g: &KhGenerator) -> i64 {
    let (np, nm) = pd.crossing_signs();
    let plus = g.plus_count() as i64;
    np as i64 - 2 * nm as i64 + g.vertex.grading() as i64 + plus - (g.labels.len() as i64 - plus)
}

/// Resolutions and generators of every vertex of the cube.
pub(crate) struct KhCube<'a> {
    pub pd: &'a PdCode,
    pub res: Vec<ResolvedDiagram>,
    pub gens: Vec<Vec<u64>>,
    index: Vec<HashMap<u64, usize>>,
}

impl<'a> KhCube<'a> {
    pub fn new(pd: &'a PdCode) -> Self {
        let n = pd.len();
        let verts: Vec<Vertex> = Vertex::all(n).collect();
        let res = par::map(&verts, |v| resolve(pd, v));
        let gens: Vec<Vec<u64>> = res.iter().map(|r| sorted_masks(r.len())).collect();
        let index = gens.iter().map(|g| g.iter().enumerate().map(|(i, &m)| (m, i)).collect()).collect();
        KhCube { pd, res, gens, index }
    }

    fn at(&self, v: &Vertex) -> &ResolvedDiagram {
        &self.res[v.mask() as usize]
    }

    pub fn generator(&self, v: &Vertex, i: usize) -> KhGenerator {
        let k = self.at(v).len();
        KhGenerator { vertex: *v, labels: mask_labels(self.gens[v.mask() as usize][i], k) }
    }

    pub fn label(&self, v: &Vertex, i: usize, circle: usize) -> bool {
        self.gens[v.mask() as usize][i] >> circle & 1 == 1
    }

    fn set(&self, v: &Vertex) -> Result<FiniteSet> {
        let k = self.at(v).len();
        FiniteSet::new(self.gens[v.mask() as usize].iter().map(|&m| format!("{}:{}", v, label_string(&mask_labels(m, k)))))
    }

    /// Pairs `(x ∈ F(u), y ∈ F(v))` with `x` a term of the Khovanov
    /// differential of `y`, sorted by `x` then `y`.
    fn edge_pairs(&self, e: &Edge) -> Result<Vec<(usize, usize)>> {
        let (u, v) = (e.upper, e.lower);
        let c = e.coord() - 1;
        let (ru, rv) = (self.at(&u), self.at(&v));
        let touch = |r: &ResolvedDiagram| -> Vec<usize> {
            let mut t: Vec<usize> = (0..4).map(|s| r.circle_of_end(self.pd, c, s)).collect();
            t.sort_unstable();
            t.dedup();
            t
        };
        let (tu, tv) = (touch(ru), touch(rv));
        // Circles away from the crossing persist from v to u.
        let carry: Vec<Option<usize>> = rv
            .circles
            .iter()
            .enumerate()
            .map(|(k, circ)| {
                if tv.contains(&k) {
                    None
                } else if circ.is_empty() {
                    Some(ru.len() - (rv.len() - k))
                } else {
                    let (cc, s) = circ[0];
                    Some(ru.circle_of_end(self.pd, cc, s))
                }
            })
            .collect();
        let mut out = Vec::new();
        for (yi, &y) in self.gens[v.mask() as usize].iter().enumerate() {
            let mut base = 0u64;
            for (k, t) in carry.iter().enumerate() {
                if let Some(t) = t {
                    base |= (y >> k & 1) << t;
                }
            }
            let bit = |m: u64, k: usize| m >> k & 1 == 1;
            let xs: Vec<u64> = match (tv.as_slice(), tu.as_slice()) {
                // merge: m(+⊗+) = +, m(+⊗−) = m(−⊗+) = −, m(−⊗−) = 0
                (&[a, b], &[z]) => match (bit(y, a), bit(y, b)) {
                    (true, true) => vec![base | 1 << z],
                    (false, false) => vec![],
                    _ => vec![base],
                },
                // split: Δ(+) = +⊗− + −⊗+, Δ(−) = −⊗−
                (&[a], &[z1, z2]) => {
                    if bit(y, a) {
                        vec![base | 1 << z1, base | 1 << z2]
                    } else {
                        vec![base]
                    }
                }
                _ => {
                    return Err(Error::Invariant(format!("edge {e} neither merges nor splits circles")));
                }
            };
            for x in xs {
                out.push((self.index[u.mask() as usize][&x], yi));
            }
        }
        out.sort_unstable();
        Ok(out)
    }

    fn edge_correspondence(&self, e: &Edge, su: &SetRef, sv: &SetRef) -> Result<Correspondence> {
        let (ku, kv) = (self.at(&e.upper).len(), self.at(&e.lower).len());
        let spans = self
            .edge_pairs(e)?
            .into_iter()
            .map(|(x, y)| Span {
                id: format!(
                    "{}/{}",
                    label_string(&mask_labels(self.gens[e.lower.mask() as usize][y], kv)),
                    label_string(&mask_labels(self.gens[e.upper.mask() as usize][x], ku))
                ),
                s: x,
                t: y,
            })
            .collect();
        Correspondence::from_spans(su.clone(), sv.clone(), spans)
    }

    /// The functor without face matchings.
    fn bare_functor(&self) -> Result<CubeFunctor> {
        let n = self.pd.len();
        let sets: Vec<SetRef> =
            Vertex::all(n).map(|v| self.set(&v).map(Arc::new)).collect::<Result<Vec<_>>>()?;
        let edges = Edge::all(n);
        let corrs = par::map(&edges, |e| {
            self.edge_correspondence(e, &sets[e.upper.mask() as usize], &sets[e.lower.mask() as usize])
        });
        let mut map = BTreeMap::new();
        for (e, c) in edges.into_iter().zip(corrs) {
            map.insert(e, c?);
        }
        CubeFunctor::new(n, sets, map)
    }

    /// The face matching: unique on fibers of size at most one, the ladybug
    /// matching on fibers of size two.
    fn face_map(&self, f: &CubeFunctor, face: &Face2) -> Result<Vec<usize>> {
        let (a, b) = f.face_composites(face);
        if a.len() != b.len() {
            return Err(Error::Invariant(format!("face {} has composites of sizes {} and {}", face.key(), a.len(), b.len())));
        }
        let mut fibers: BTreeMap<(usize, usize), (Vec<usize>, Vec<usize>)> = BTreeMap::new();
        for i in 0..a.len() {
            fibers.entry((a.s[i], a.t[i])).or_default().0.push(i);
        }
        for i in 0..b.len() {
            fibers.entry((b.s[i], b.t[i])).or_default().1.push(i);
        }
        let mut map = vec![usize::MAX; a.len()];
        let mut geometry: Option<LadybugData> = None;
        for ((x, z), (fa, fb)) in fibers {
            match (fa.len(), fb.len()) {
                (0, 0) => {}
                (1, 1) => map[fa[0]] = fb[0],
                (2, 2) => {
                    if geometry.is_none() {
                        geometry = ladybug::geometry(self, face)?;
                    }
                    let data = geometry.as_ref().ok_or_else(|| {
                        Error::Invariant(format!("face {} has a two-element fiber outside a ladybug", face.key()))
                    })?;
                    ladybug::check_labels(self, data, x, z)?;
                    let mid = |comp: &crate::functor::ChainComposite, i: usize, v: &Vertex| -> usize {
                        let e = Edge::new(face.top, *v).unwrap();
                        f.edge(&e).elements()[comp.tuples[i][0] as usize].t
                    };
                    let ma: Vec<usize> = fa.iter().map(|&i| mid(&a, i, &face.mid_a)).collect();
                    let mb: Vec<usize> = fb.iter().map(|&i| mid(&b, i, &face.mid_b)).collect();
                    let m = ladybug::pair(self, data, [ma[0], ma[1]], [mb[0], mb[1]], false)?;
                    map[fa[0]] = fb[m[0]];
                    map[fa[1]] = fb[m[1]];
                }
                (p, q) => {
                    return Err(Error::Invariant(format!(
                        "face {} fiber ({x},{z}) has sizes {p} and {q}",
                        face.key()
                    )));
                }
            }
        }
        Ok(map)
    }

    fn functor(&self) -> Result<CubeFunctor> {
        let mut f = self.bare_functor()?;
        let faces = Face2::all(self.pd.len());
        let maps = par::map(&faces, |face| self.face_map(&f, face));
        for (face, m) in faces.into_iter().zip(maps) {
            f.set_face_unchecked(face, m?);
        }
        Ok(f)
    }
}

/// The Khovanov correspondence along an edge `u ≥₁ v`: elements are the
/// pairs `(y, x)` with `x` a term of the differential of `y`.
pub fn edge_correspondence(pd: &PdCode, u: &Vertex, v: &Vertex) -> Result<Correspondence> {
    let e = Edge::new(*u, *v)?;
    let cube = KhCube::new(pd);
    let su = Arc::new(cube.set(u)?);
    let sv = Arc::new(cube.set(v)?);
    cube.edge_correspondence(&e, &su, &sv)
}

/// The matching of a single face, as a map from composite indices through
/// `mid_a` to composite indices through `mid_b` of the built functor.
pub fn face_matching(pd: &PdCode, face: &Face2) -> Result<Vec<usize>> {
    let cube = KhCube::new(pd);
    let f = cube.bare_functor()?;
    cube.face_map(&f, face)
}

/// A Khovanov functor together with the grading used to split it. For the
/// unreduced functor the grading is `gr_q`; for the reduced one it is
/// `gr_q + 1`.
#[derive(Clone, Debug)]
pub struct KhovanovFunctor {
    pub stable: StableFunctor,
    pub gradings: Vec<Vec<i64>>,
    pub n_plus: usize,
    pub n_minus: usize,
}

impl KhovanovFunctor {
    pub fn functor(&self) -> &CubeFunctor {
        &self.stable.functor
    }

    pub fn grading(&self, v: &Vertex, i: usize) -> i64 {
        self.gradings[v.mask() as usize][i]
    }
}

fn check_built(f: &CubeFunctor) -> Result<()> {
    let c0 = validate_c0(f);
    if !c0.passes() {
        return Err(Error::Invariant(format!("Khovanov functor fails C-0 on {} faces", c0.violations.len())));
    }
    let report = validate_coherence(f);
    if !report.passes() {
        return Err(Error::Invariant(format!("Khovanov functor is not coherent: {report:?}")));
    }
    Ok(())
}

fn build_unchecked(pd: &PdCode) -> Result<KhovanovFunctor> {
    let cube = KhCube::new(pd);
    let functor = cube.functor()?;
    let (n_plus, n_minus) = pd.crossing_signs();
    let gradings = Vertex::all(pd.len())
        .map(|v| (0..cube.gens[v.mask() as usize].len()).map(|i| quantum_grading(pd, &cube.generator(&v, i))).collect())
        .collect();
    let k = KhovanovFunctor { stable: StableFunctor::new(functor, -(n_minus as i64)), gradings, n_plus, n_minus };
    for (e, c) in k.functor().edges() {
        for sp in c.elements() {
            if k.grading(&e.upper, sp.s) != k.grading(&e.lower, sp.t) {
                return Err(Error::Invariant(format!("edge {e} element {} changes the quantum grading", sp.id)));
            }
        }
    }
    Ok(k)
}

/// `Σ^{−n₋} F_Kh`, validated for coherence.
pub fn build_khovanov_functor(pd: &PdCode) -> Result<KhovanovFunctor> {
    let k = build_unchecked(pd)?;
    check_built(k.functor())?;
    Ok(k)
}

/// Build without running the coherence validator.
pub fn build_khovanov_functor_unvalidated(pd: &PdCode) -> Result<KhovanovFunctor> {
    build_unchecked(pd)
}

fn restrict(k: &KhovanovFunctor, keep: &Subset) -> Result<KhovanovFunctor> {
    let functor = restrict_to_subsets(k.functor(), keep)?;
    let gradings = k
        .gradings
        .iter()
        .zip(&keep.keep)
        .map(|(g, m)| g.iter().zip(m).filter(|(_, &b)| b).map(|(&x, _)| x).collect())
        .collect();
    Ok(KhovanovFunctor {
        stable: StableFunctor::new(functor, k.stable.shift),
        gradings,
        n_plus: k.n_plus,
        n_minus: k.n_minus,
    })
}

/// The summands `F^j` of constant grading.
pub fn split_by_quantum(k: &KhovanovFunctor) -> Result<BTreeMap<i64, KhovanovFunctor>> {
    let js: std::collections::BTreeSet<i64> = k.gradings.iter().flatten().copied().collect();
    let mut out = BTreeMap::new();
    for j in js {
        let keep = Subset { keep: k.gradings.iter().map(|g| g.iter().map(|&x| x == j).collect()).collect() };
        out.insert(j, restrict(k, &keep)?);
    }
    Ok(out)
}

/// The reduced functor: generators labelling the circle through `basepoint`
/// by `x₋`, graded by `gr_q + 1`.
pub fn reduced_functor(pd: &PdCode, basepoint: u32) -> Result<KhovanovFunctor> {
    if !pd.arc_labels().contains(&basepoint) {
        return Err(Error::Parse(format!("no arc labelled {basepoint}")));
    }
    let cube = KhCube::new(pd);
    let full = build_khovanov_functor(pd)?;
    let keep = Subset {
        keep: Vertex::all(pd.len())
            .map(|v| {
                let c = cube.at(&v).circle_of_arc(basepoint).expect("basepoint lies on a circle");
                (0..cube.gens[v.mask() as usize].len()).map(|i| !cube.label(&v, i, c)).collect()
            })
            .collect(),
    };
    let mut r = restrict(&full, &keep)?;
    for g in r.gradings.iter_mut().flatten() {
        *g += 1;
    }
    Ok(r)
}

/// One row of a bigraded homology table.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
pub struct KhRow {
    pub i: i64,
    pub j: i64,
    pub rank: usize,
    pub torsion: Vec<u64>,
}

/// Bigraded Khovanov homology: for each grading `j`, the homology of the
/// dual of `Tot(Σ^{−n₋}F^j)` in degree `−i`. Rows are sorted by `(j, i)`.
pub fn khovanov_homology(k: &KhovanovFunctor) -> Result<Vec<KhRow>> {
    let parts: Vec<(i64, KhovanovFunctor)> = split_by_quantum(k)?.into_iter().collect();
    let tables = par::map(&parts, |(j, part)| -> Result<Vec<KhRow>> {
        let c = dualize(&tot(&part.stable)?);
        Ok(homology(&c)
            .into_values()
            .filter(|h| !h.is_zero())
            .map(|h| KhRow { i: -h.degree, j: *j, rank: h.rank, torsion: h.torsion })
            .collect())
    });
    let mut rows = Vec::new();
    for t in tables {
        rows.extend(t?);
    }
    rows.sort_by_key(|r| (r.j, r.i));
    Ok(rows)
}

/// Render a homology table, one `(i, j)` group per line.
pub fn format_table(rows: &[KhRow]) -> String {
    let mut s = String::new();
    for r in rows {
        let mut parts = Vec::new();
        if r.rank > 0 {
            parts.push(if r.rank == 1 { "Z".to_string() } else { format!("Z^{}", r.rank) });
        }
        parts.extend(r.torsion.iter().map(|t| format!("Z/{t}")));
        s.push_str(&format!("i={:<3} j={:<3} {}\n", r.i, r.j, parts.join(" + ")));
    }
    s
}
