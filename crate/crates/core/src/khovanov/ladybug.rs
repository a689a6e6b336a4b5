//! Ladybug faces: one circle `C_w` at the bottom of a face whose two
//! surgery arcs have alternating endpoints, so it splits in both middle
//! resolutions and merges again at the top.

use std::collections::BTreeMap;

use super::{KhCube, KhGenerator, PdCode};
use crate::burnside::{BijectionOver, Correspondence, Span};
use crate::cube::{Edge, Face2};
use crate::error::{Error, Result};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LadybugData {
    pub face: Face2,
    /// Index of `C_w` among the circles at the bottom vertex.
    pub circle_w: usize,
    /// Index of `C_u` among the circles at the top vertex.
    pub circle_u: usize,
    /// Surgery-arc endpoints in cyclic order around `C_w`, as
    /// `(crossing, strand)` with strand 0 joining slots 3–0 and strand 1
    /// joining slots 1–2.
    pub endpoints: Vec<(usize, u8)>,
    /// One arc label from each arc of the right pair, in numbering order.
    pub right_pair: [u32; 2],
    /// `C_v¹, C_v²` at `mid_a`.
    pub circles_v: [usize; 2],
    /// `C_{v'}¹, C_{v'}²` at `mid_b`.
    pub circles_v_prime: [usize; 2],
}

/// The ladybug data of a face, if its bottom circle configuration is a
/// ladybug. Labels are not consulted.
pub(crate) fn geometry(cube: &KhCube, face: &Face2) -> Result<Option<LadybugData>> {
    let pd = cube.pd;
    let xs = pd.crossings();
    let (i, j) = face.coords();
    let (ci, cj) = (i - 1, j - 1);
    let rw = cube.at(&face.bottom);
    let strand_circles: Vec<usize> =
        [(ci, 0), (ci, 1), (cj, 0), (cj, 1)].iter().map(|&(c, s)| rw.circle_of_end(pd, c, s)).collect();
    if strand_circles.iter().any(|&k| k != strand_circles[0]) {
        return Ok(None);
    }
    let circle_w = strand_circles[0];
    let ends = &rw.circles[circle_w];
    let m = ends.len() / 2;
    let is_endpoint = |k: usize| ends[2 * k].0 == ci || ends[2 * k].0 == cj;
    let strand_of = |k: usize| -> u8 {
        let slots = [ends[2 * k].1, ends[2 * k + 1].1];
        if slots.contains(&0) && slots.contains(&3) {
            0
        } else {
            1
        }
    };
    let endpoint_strands: Vec<usize> = (0..m).filter(|&k| is_endpoint(k)).collect();
    let endpoints: Vec<(usize, u8)> = endpoint_strands.iter().map(|&k| (ends[2 * k].0, strand_of(k))).collect();
    if endpoints.len() != 4 {
        return Err(Error::Invariant(format!("face {} has {} surgery endpoints on C_w", face.key(), endpoints.len())));
    }
    let alternating =
        endpoints[0].0 != endpoints[1].0 && endpoints[0].0 == endpoints[2].0 && endpoints[1].0 == endpoints[3].0;
    if !alternating {
        return Ok(None);
    }
    // Segment of C_w containing each arc, cutting at the four endpoints.
    let k0 = endpoint_strands[0];
    let mut seg = 0usize;
    let mut arc_seg: BTreeMap<u32, usize> = BTreeMap::new();
    for t in 0..m {
        let k = (k0 + t) % m;
        if t > 0 && is_endpoint(k) {
            seg += 1;
        }
        let (c, s) = ends[2 * k + 1];
        arc_seg.insert(xs[c][s as usize], seg);
    }
    // Turning right from a strand goes toward its counterclockwise-later
    // slot: slot 0 on strand 3–0, slot 2 on strand 1–2.
    let turns: Vec<u32> = endpoints.iter().map(|&(c, st)| xs[c][if st == 0 { 0 } else { 2 }]).collect();
    let mut pair: Vec<(usize, u32)> = Vec::new();
    for &l in &turns {
        let sg = arc_seg[&l];
        if !pair.iter().any(|&(s, _)| s == sg) {
            pair.push((sg, l));
        }
    }
    if pair.len() != 2 {
        return Err(Error::Invariant(format!(
            "face {}: right turns reach {} arcs of C_w instead of 2",
            face.key(),
            pair.len()
        )));
    }
    pair.sort_unstable();
    let right_pair = [pair[0].1, pair[1].1];
    let circles_at = |v| -> Result<[usize; 2]> {
        let r = cube.at(v);
        let a = r.circle_of_arc(right_pair[0]).unwrap();
        let b = r.circle_of_arc(right_pair[1]).unwrap();
        if a == b {
            return Err(Error::Invariant(format!("face {}: right pair lies on one circle", face.key())));
        }
        Ok([a, b])
    };
    let circles_v = circles_at(&face.mid_a)?;
    let circles_v_prime = circles_at(&face.mid_b)?;
    let circle_u = cube.at(&face.top).circle_of_arc(right_pair[0]).unwrap();
    Ok(Some(LadybugData { face: *face, circle_w, circle_u, endpoints, right_pair, circles_v, circles_v_prime }))
}

/// A two-element fiber must have `x(C_u) = x₋` and `z(C_w) = x₊`.
pub(crate) fn check_labels(cube: &KhCube, data: &LadybugData, x: usize, z: usize) -> Result<()> {
    if cube.label(&data.face.top, x, data.circle_u) || !cube.label(&data.face.bottom, z, data.circle_w) {
        return Err(Error::Invariant(format!("face {}: two-element fiber with non-ladybug labels", data.face.key())));
    }
    Ok(())
}

/// Pair the middle generators of the two composites: the one labelling
/// `(C_v¹, C_v²)` by `(x₋, x₊)` goes to the one with the same pattern on
/// `C_{v'}`. Entry `k` is the index in `mb` matched to `ma[k]`.
pub(crate) fn pair(cube: &KhCube, data: &LadybugData, ma: [usize; 2], mb: [usize; 2], swap: bool) -> Result<[usize; 2]> {
    let first = usize::from(swap);
    let lv = ma.map(|g| cube.label(&data.face.mid_a, g, data.circles_v[first]));
    let lv2 = mb.map(|g| cube.label(&data.face.mid_b, g, data.circles_v_prime[first]));
    if lv[0] == lv[1] || lv2[0] == lv2[1] {
        return Err(Error::Invariant(format!("face {}: ladybug fiber is not α, β", data.face.key())));
    }
    let target = |l: bool| if lv2[0] == l { 0 } else { 1 };
    Ok([target(lv[0]), target(lv[1])])
}

/// The ladybug data of `face` when its geometry is a ladybug configuration.
pub fn ladybug_configuration(pd: &PdCode, face: &Face2) -> Result<Option<LadybugData>> {
    geometry(&KhCube::new(pd), face)
}

/// Ladybug data for the fiber over `(x, z)`, present when the face is a
/// ladybug configuration, `x` labels `C_u` by `x₋` and `z` labels `C_w` by `x₊`.
pub fn detect_ladybug(pd: &PdCode, face: &Face2, x: &KhGenerator, z: &KhGenerator) -> Result<Option<LadybugData>> {
    if x.vertex != face.top || z.vertex != face.bottom {
        return Err(Error::Cube(format!("generators do not lie at the corners of {}", face.key())));
    }
    let Some(data) = ladybug_configuration(pd, face)? else { return Ok(None) };
    let ok = !x.labels[data.circle_u] && z.labels[data.circle_w];
    Ok(ok.then_some(data))
}

/// The ladybug bijection between the two 2-element fibers over `(x, z)`.
/// `swap_numbering` numbers the right pair the other way round.
pub fn ladybug_matching(
    pd: &PdCode,
    data: &LadybugData,
    x: &KhGenerator,
    z: &KhGenerator,
    swap_numbering: bool,
) -> Result<BijectionOver> {
    let cube = KhCube::new(pd);
    let f = cube.bare_functor()?;
    let face = &data.face;
    let xi = cube.index[face.top.mask() as usize][&label_mask(&x.labels)];
    let zi = cube.index[face.bottom.mask() as usize][&label_mask(&z.labels)];
    let (a, b) = f.face_composites(face);
    let fa: Vec<usize> = (0..a.len()).filter(|&i| a.s[i] == xi && a.t[i] == zi).collect();
    let fb: Vec<usize> = (0..b.len()).filter(|&i| b.s[i] == xi && b.t[i] == zi).collect();
    if fa.len() != 2 || fb.len() != 2 {
        return Err(Error::Invariant(format!("face {}: fiber is not a ladybug fiber", face.key())));
    }
    let mid = |comp: &crate::functor::ChainComposite, i: usize, v| {
        f.edge(&Edge::new(face.top, v).unwrap()).elements()[comp.tuples[i][0] as usize].t
    };
    let ma = [mid(&a, fa[0], face.mid_a), mid(&a, fa[1], face.mid_a)];
    let mb = [mid(&b, fb[0], face.mid_b), mid(&b, fb[1], face.mid_b)];
    let m = pair(&cube, data, ma, mb, swap_numbering)?;
    let corr = |comp: &crate::functor::ChainComposite, idx: &[usize]| {
        let spans = idx.iter().map(|&i| Span { id: comp.element_id(&f, i), s: comp.s[i], t: comp.t[i] }).collect();
        Correspondence::from_spans(f.set(&face.top).clone(), f.set(&face.bottom).clone(), spans)
    };
    BijectionOver::new(corr(&a, &fa)?, corr(&b, &fb)?, m.to_vec())
}

fn label_mask(labels: &[bool]) -> u64 {
    labels.iter().enumerate().fold(0, |m, (i, &b)| m | (u64::from(b) << i))
}
