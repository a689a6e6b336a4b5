use std::collections::{BTreeMap, HashSet};
use std::sync::Arc;

use super::{Assembly, CubeFunctor};
use crate::burnside::{Correspondence, FiniteSet, SetRef, Span};
use crate::cube::{Edge, Face2, FaceInclusion, Vertex};
use crate::error::{Error, Result};

/// A choice of elements `S(v) ⊆ F(v)` at every vertex, indexed by mask.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Subset {
    pub keep: Vec<Vec<bool>>,
}

impl Subset {
    pub fn from_fn(f: &CubeFunctor, mut pred: impl FnMut(&Vertex, usize) -> bool) -> Self {
        let keep = Vertex::all(f.dim()).map(|v| (0..f.set(&v).len()).map(|i| pred(&v, i)).collect()).collect();
        Subset { keep }
    }

    /// Elements named by `(vertex, id)` pairs.
    pub fn from_ids<'a>(f: &CubeFunctor, ids: impl IntoIterator<Item = (Vertex, &'a str)>) -> Result<Self> {
        let mut s = Subset::from_fn(f, |_, _| false);
        for (v, id) in ids {
            let i = f
                .set(&v)
                .index_of(id)
                .ok_or_else(|| Error::Functor(format!("element {id:?} not in F({v})")))?;
            s.keep[v.mask() as usize][i] = true;
        }
        Ok(s)
    }

    pub fn complement(&self) -> Self {
        Subset { keep: self.keep.iter().map(|k| k.iter().map(|b| !b).collect()).collect() }
    }

    pub fn contains(&self, v: &Vertex, i: usize) -> bool {
        self.keep[v.mask() as usize][i]
    }
}

fn id_collision(a: &CubeFunctor, b: &CubeFunctor) -> bool {
    let sets = a.sets().iter().zip(b.sets()).any(|(x, y)| {
        let xs: HashSet<&String> = x.elements().iter().collect();
        y.elements().iter().any(|e| xs.contains(e))
    });
    sets || a.edges().iter().any(|(e, x)| {
        let xs: HashSet<&str> = x.elements().iter().map(|s| s.id.as_str()).collect();
        b.edge(e).elements().iter().any(|s| xs.contains(s.id.as_str()))
    })
}

/// `F ⊔ F'`. Ids are kept when the two functors share none; otherwise
/// every id is prefixed with `0:` or `1:`.
pub fn coproduct(a: &CubeFunctor, b: &CubeFunctor) -> Result<CubeFunctor> {
    if a.dim() != b.dim() {
        return Err(Error::Dimension(format!("coproduct of C({}) and C({}) functors", a.dim(), b.dim())));
    }
    let tag = id_collision(a, b);
    let name = |side: usize, s: &str| if tag { format!("{side}:{s}") } else { s.to_string() };
    let sets: Vec<SetRef> = a
        .sets()
        .iter()
        .zip(b.sets())
        .map(|(x, y)| {
            let els = x.elements().iter().map(|e| name(0, e)).chain(y.elements().iter().map(|e| name(1, e)));
            FiniteSet::new(els).map(Arc::new)
        })
        .collect::<Result<_>>()?;
    let mut asm = Assembly::new(a.dim(), sets);
    for (e, x) in a.edges() {
        let y = b.edge(e);
        let (su, sv) = (a.set(&e.upper).len(), a.set(&e.lower).len());
        let mut spans: Vec<Span> = x.elements().iter().map(|s| Span { id: name(0, &s.id), s: s.s, t: s.t }).collect();
        spans.extend(y.elements().iter().map(|s| Span { id: name(1, &s.id), s: s.s + su, t: s.t + sv }));
        let origins = (0..x.len()).map(|k| Some((0, *e, k))).chain((0..y.len()).map(|k| Some((1, *e, k)))).collect();
        let c = Correspondence::from_spans(
            asm.set(e.upper.mask() as usize).clone(),
            asm.set(e.lower.mask() as usize).clone(),
            spans,
        )?;
        asm.add_edge(*e, c, origins);
    }
    let (mut f, maps) = asm.finish(&[a, b])?;
    for (face, m) in maps {
        f.set_face_unchecked(face, m);
    }
    Ok(f)
}

/// `F × F'` on `C(n + n')`, with the coordinates of `F` first.
pub fn product(a: &CubeFunctor, b: &CubeFunctor) -> Result<CubeFunctor> {
    let (n1, n2) = (a.dim(), b.dim());
    let n = n1 + n2;
    let sets: Vec<SetRef> = Vertex::all(n)
        .map(|w| {
            let (v1, v2) = w.split(n1);
            let (x, y) = (a.set(&v1), b.set(&v2));
            let els = x.elements().iter().flat_map(|p| y.elements().iter().map(move |q| format!("{p}×{q}")));
            FiniteSet::new(els).map(Arc::new)
        })
        .collect::<Result<_>>()?;
    let mut edges = BTreeMap::new();
    for e in Edge::all(n) {
        let (u1, u2) = e.upper.split(n1);
        let (l1, l2) = e.lower.split(n1);
        let mut spans = Vec::new();
        if e.coord() <= n1 {
            let m = b.set(&u2).len();
            for s in a.edge(&Edge { upper: u1, lower: l1 }).elements() {
                for y in 0..m {
                    spans.push(Span { id: format!("{}×{}", s.id, b.set(&u2).get(y)), s: s.s * m + y, t: s.t * m + y });
                }
            }
        } else {
            let eb = b.edge(&Edge { upper: u2, lower: l2 });
            let (mu, ml) = (b.set(&u2).len(), b.set(&l2).len());
            for x in 0..a.set(&u1).len() {
                for s in eb.elements() {
                    spans.push(Span { id: format!("{}×{}", a.set(&u1).get(x), s.id), s: x * mu + s.s, t: x * ml + s.t });
                }
            }
        }
        let c = Correspondence::from_spans(
            sets[e.upper.mask() as usize].clone(),
            sets[e.lower.mask() as usize].clone(),
            spans,
        )?;
        edges.insert(e, c);
    }
    let mut f = CubeFunctor::new(n, sets, edges)?;
    for face in Face2::all(n) {
        if let Some(m) = product_face(a, b, &f, &face)? {
            f.set_face_unchecked(face, m);
        }
    }
    Ok(f)
}

fn product_face(a: &CubeFunctor, b: &CubeFunctor, p: &CubeFunctor, face: &Face2) -> Result<Option<Vec<usize>>> {
    let n1 = a.dim();
    let (i, j) = face.coords();
    let (pa, pb) = p.face_composites(face);
    let (t1, t2) = face.top.split(n1);
    let mut map = Vec::with_capacity(pa.len());
    if j <= n1 || i > n1 {
        let first = j <= n1;
        let (src, fixed, face_src) = if first {
            (a, t2, Face2::new(t1, i, j))
        } else {
            (b, t1, Face2::new(t2, i - n1, j - n1))
        };
        let Some(sm) = src.face(&face_src) else { return Ok(None) };
        let (sa, sb) = src.face_composites(&face_src);
        let other = if first { b.set(&fixed).len() } else { a.set(&fixed).len() };
        let ea: Vec<usize> = sa.chain.edges().iter().map(|e| src.edge(e).len()).collect();
        let eb: Vec<usize> = sb.chain.edges().iter().map(|e| src.edge(e).len()).collect();
        for tup in &pa.tuples {
            // Product edge elements index as e·|other| + y (first block) or x·|E| + e.
            let (k, y) = if first {
                ((tup[0] as usize / other, tup[1] as usize / other), tup[0] as usize % other)
            } else {
                ((tup[0] as usize % ea[0], tup[1] as usize % ea[1]), tup[0] as usize / ea[0])
            };
            let si = sa.index_of(&[k.0 as u32, k.1 as u32]).ok_or_else(|| bad(face))?;
            let out = &sb.tuples[sm[si]];
            let nt = if first {
                [out[0] as usize * other + y, out[1] as usize * other + y]
            } else {
                [y * eb[0] + out[0] as usize, y * eb[1] + out[1] as usize]
            };
            map.push(pb.index_of(&[nt[0] as u32, nt[1] as u32]).ok_or_else(|| bad(face))?);
        }
    } else {
        // Mixed face: the identity on pairs (e1, e2).
        let e1 = a.edge(&Edge::down(t1, i));
        let e2 = b.edge(&Edge::down(t2, j - n1));
        let my = b.set(&t2).len();
        let my_low = b.set(&t2.with_bit(j - n1, 0)).len();
        let e2n = e2.len();
        for tup in &pa.tuples {
            let (k1, y) = (tup[0] as usize / my, tup[0] as usize % my);
            let k2 = tup[1] as usize % e2n;
            debug_assert_eq!(e2.elements()[k2].s, y);
            let first = e1.elements()[k1].s * e2n + k2;
            let second = k1 * my_low + e2.elements()[k2].t;
            map.push(pb.index_of(&[first as u32, second as u32]).ok_or_else(|| bad(face))?);
        }
    }
    Ok(Some(map))
}

fn bad(face: &Face2) -> Error {
    Error::Invariant(format!("product composite mismatch on {face}"))
}

/// `F_ι` on `C(N)`: `F` on the image of `ι`, empty elsewhere.
pub fn extend_along_face_inclusion(f: &CubeFunctor, iota: &FaceInclusion) -> Result<CubeFunctor> {
    if iota.source_dim() != f.dim() {
        return Err(Error::Dimension(format!("{iota} does not start at C({})", f.dim())));
    }
    let big = iota.target_dim();
    let empty: SetRef = Arc::new(FiniteSet::empty());
    let sets = Vertex::all(big)
        .map(|w| iota.preimage(&w).map(|v| f.set(&v).clone()).unwrap_or_else(|| empty.clone()))
        .collect();
    let mut asm = Assembly::new(big, sets);
    for e in f.edges().keys() {
        let image = Edge { upper: iota.apply_unchecked(&e.upper), lower: iota.apply_unchecked(&e.lower) };
        asm.copy_edge(image, 0, *e, f.edge(e))?;
    }
    finish(asm, &[f])
}

/// `F ∘ ι`, ignoring whatever `F` does off the image.
pub fn pullback(f: &CubeFunctor, iota: &FaceInclusion) -> Result<CubeFunctor> {
    if iota.target_dim() != f.dim() {
        return Err(Error::Dimension(format!("{iota} does not land in C({})", f.dim())));
    }
    let n = iota.source_dim();
    let sets = Vertex::all(n).map(|v| f.set(&iota.apply_unchecked(&v)).clone()).collect();
    let mut asm = Assembly::new(n, sets);
    for e in Edge::all(n) {
        let image = Edge { upper: iota.apply_unchecked(&e.upper), lower: iota.apply_unchecked(&e.lower) };
        asm.copy_edge(e, 0, image, f.edge(&image))?;
    }
    finish(asm, &[f])
}

/// `F ∘ ι` for `F` supported on the image of `ι`.
pub fn restrict_along_face_inclusion(f: &CubeFunctor, iota: &FaceInclusion) -> Result<CubeFunctor> {
    if iota.target_dim() != f.dim() {
        return Err(Error::Dimension(format!("{iota} does not land in C({})", f.dim())));
    }
    if let Some(v) = f.support().into_iter().find(|v| iota.preimage(v).is_none()) {
        return Err(Error::Functor(format!("support vertex {v} lies outside the image of {iota}")));
    }
    pullback(f, iota)
}

fn finish(asm: Assembly, sources: &[&CubeFunctor]) -> Result<CubeFunctor> {
    let (mut f, maps) = asm.finish(sources)?;
    for (face, m) in maps {
        f.set_face_unchecked(face, m);
    }
    Ok(f)
}

/// Restrict every set and correspondence to `keep`. Face matchings are
/// carried along and must stay inside the kept elements.
pub fn restrict_to_subsets(f: &CubeFunctor, keep: &Subset) -> Result<CubeFunctor> {
    let mut new_index: Vec<Vec<Option<usize>>> = Vec::with_capacity(f.sets().len());
    let mut sets = Vec::with_capacity(f.sets().len());
    for (set, k) in f.sets().iter().zip(&keep.keep) {
        if k.len() != set.len() {
            return Err(Error::Functor("subset does not match the functor's sets".into()));
        }
        let mut idx = Vec::with_capacity(k.len());
        let mut els = Vec::new();
        for (i, &b) in k.iter().enumerate() {
            idx.push(b.then(|| els.len()));
            if b {
                els.push(set.get(i).to_string());
            }
        }
        new_index.push(idx);
        sets.push(Arc::new(FiniteSet::new(els)?));
    }
    let mut asm = Assembly::new(f.dim(), sets);
    for (e, c) in f.edges() {
        let (si, ti) = (&new_index[e.upper.mask() as usize], &new_index[e.lower.mask() as usize]);
        let mut spans = Vec::new();
        let mut origins = Vec::new();
        for (k, sp) in c.elements().iter().enumerate() {
            if let (Some(s), Some(t)) = (si[sp.s], ti[sp.t]) {
                spans.push(Span { id: sp.id.clone(), s, t });
                origins.push(Some((0, *e, k)));
            }
        }
        let c = Correspondence::from_spans(
            asm.set(e.upper.mask() as usize).clone(),
            asm.set(e.lower.mask() as usize).clone(),
            spans,
        )?;
        asm.add_edge(*e, c, origins);
    }
    finish(asm, &[f])
}

/// The subfunctor on `S`, which must be closed under edge targets.
pub fn sub_functor(f: &CubeFunctor, s: &Subset) -> Result<CubeFunctor> {
    for (e, c) in f.edges() {
        for sp in c.elements() {
            if s.contains(&e.upper, sp.s) && !s.contains(&e.lower, sp.t) {
                return Err(Error::Functor(format!("edge element {} leaves the subset along {e}", sp.id)));
            }
        }
    }
    restrict_to_subsets(f, s)
}

