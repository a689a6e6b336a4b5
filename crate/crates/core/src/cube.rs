//! The cube category `C(n)`.
//!
//! Vertices are bit vectors of length `n`. Coordinates are 1-indexed and
//! coordinate 1 is printed first, so `"10"` is the vertex with `v_1 = 1`.

use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};

/// Largest supported cube dimension.
pub const MAX_DIM: usize = 24;

#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Vertex {
    dim: u8,
    mask: u32,
}

impl Vertex {
    /// Vertex from a mask where bit `i-1` holds coordinate `i`.
    pub fn new(dim: usize, mask: u32) -> Self {
        assert!(dim <= MAX_DIM, "cube dimension {dim} exceeds {MAX_DIM}");
        assert!(dim == 32 || mask >> dim == 0, "mask {mask:#b} outside C({dim})");
        Vertex { dim: dim as u8, mask }
    }

    pub fn zero(dim: usize) -> Self {
        Vertex::new(dim, 0)
    }

    pub fn ones(dim: usize) -> Self {
        Vertex::new(dim, ((1u64 << dim) - 1) as u32)
    }

    pub fn from_bits(bits: &[u8]) -> Result<Self> {
        if bits.len() > MAX_DIM {
            return Err(Error::Cube(format!("dimension {} too large", bits.len())));
        }
        let mut mask = 0u32;
        for (i, &b) in bits.iter().enumerate() {
            match b {
                0 => {}
                1 => mask |= 1 << i,
                _ => return Err(Error::Cube(format!("bit value {b} is not 0 or 1"))),
            }
        }
        Ok(Vertex::new(bits.len(), mask))
    }

    pub fn dim(&self) -> usize {
        self.dim as usize
    }

    pub fn mask(&self) -> u32 {
        self.mask
    }

    /// Coordinate `i`, 1-indexed.
    pub fn bit(&self, i: usize) -> u8 {
        debug_assert!(i >= 1 && i <= self.dim());
        ((self.mask >> (i - 1)) & 1) as u8
    }

    pub fn bits(&self) -> Vec<u8> {
        (1..=self.dim()).map(|i| self.bit(i)).collect()
    }

    pub fn with_bit(&self, i: usize, b: u8) -> Vertex {
        let m = if b == 0 { self.mask & !(1 << (i - 1)) } else { self.mask | (1 << (i - 1)) };
        Vertex { dim: self.dim, mask: m }
    }

    pub fn grading(&self) -> usize {
        self.mask.count_ones() as usize
    }

    /// Coordinates set to 1, ascending.
    pub fn ones_coords(&self) -> Vec<usize> {
        (1..=self.dim()).filter(|&i| self.bit(i) == 1).collect()
    }

    /// Key realizing descending lexicographic order of the printed bit string.
    pub fn display_order_key(&self) -> std::cmp::Reverse<u32> {
        std::cmp::Reverse(self.mask.reverse_bits() >> (32 - self.dim.max(1) as u32))
    }

    /// All vertices of `C(n)` in increasing mask order.
    pub fn all(dim: usize) -> impl Iterator<Item = Vertex> {
        (0..(1u64 << dim)).map(move |m| Vertex::new(dim, m as u32))
    }

    /// Concatenation `(self, other)` in `C(n1 + n2)`.
    pub fn concat(&self, other: &Vertex) -> Vertex {
        Vertex::new(self.dim() + other.dim(), self.mask | (other.mask << self.dim))
    }

    /// Split into the first `k` coordinates and the rest.
    pub fn split(&self, k: usize) -> (Vertex, Vertex) {
        let lo = if k == 0 { 0 } else { self.mask & (((1u64 << k) - 1) as u32) };
        (Vertex::new(k, lo), Vertex::new(self.dim() - k, self.mask >> k))
    }
}

impl fmt::Display for Vertex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for i in 1..=self.dim() {
            write!(f, "{}", self.bit(i))?;
        }
        Ok(())
    }
}

impl fmt::Debug for Vertex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "v{}", self)
    }
}

impl FromStr for Vertex {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        let bits = s
            .chars()
            .map(|c| match c {
                '0' => Ok(0),
                '1' => Ok(1),
                _ => Err(Error::Parse(format!("bad vertex string {s:?}"))),
            })
            .collect::<Result<Vec<u8>>>()?;
        Vertex::from_bits(&bits)
    }
}

pub fn grading(v: &Vertex) -> usize {
    v.grading()
}

/// Coordinatewise `u >= v`.
pub fn geq(u: &Vertex, v: &Vertex) -> Result<bool> {
    if u.dim != v.dim {
        return Err(Error::Dimension(format!("{u} vs {v}")));
    }
    Ok(u.mask & v.mask == v.mask)
}

/// The coordinate changed along `u ≥₁ v`, if it is an edge.
pub fn edge_coord(u: &Vertex, v: &Vertex) -> Option<usize> {
    if u.dim != v.dim || u.mask & v.mask != v.mask {
        return None;
    }
    let d = u.mask ^ v.mask;
    (d.count_ones() == 1).then(|| d.trailing_zeros() as usize + 1)
}

/// `s_{u,v} = Σ_{i<k} u_i mod 2` where `k` is the changed coordinate.
pub fn sign_assignment(u: &Vertex, v: &Vertex) -> Result<u8> {
    let k = edge_coord(u, v).ok_or_else(|| Error::Cube(format!("{u} > {v} is not an edge")))?;
    Ok(sign_at(u, k))
}

/// Sign of the edge leaving `u` along coordinate `k`.
pub fn sign_at(u: &Vertex, k: usize) -> u8 {
    let below = if k <= 1 { 0 } else { u.mask & (((1u64 << (k - 1)) - 1) as u32) };
    (below.count_ones() & 1) as u8
}

#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Debug)]
pub struct Edge {
    pub upper: Vertex,
    pub lower: Vertex,
}

impl Edge {
    pub fn new(upper: Vertex, lower: Vertex) -> Result<Self> {
        edge_coord(&upper, &lower)
            .map(|_| Edge { upper, lower })
            .ok_or_else(|| Error::Cube(format!("{upper} > {lower} is not an edge")))
    }

    /// The edge leaving `upper` by clearing coordinate `k`.
    pub fn down(upper: Vertex, k: usize) -> Self {
        debug_assert_eq!(upper.bit(k), 1);
        Edge { upper, lower: upper.with_bit(k, 0) }
    }

    pub fn coord(&self) -> usize {
        (self.upper.mask ^ self.lower.mask).trailing_zeros() as usize + 1
    }

    pub fn sign(&self) -> u8 {
        sign_at(&self.upper, self.coord())
    }

    /// All edges of `C(n)`, ordered by upper vertex then coordinate.
    pub fn all(dim: usize) -> Vec<Edge> {
        Vertex::all(dim)
            .flat_map(|u| u.ones_coords().into_iter().map(move |k| Edge::down(u, k)))
            .collect()
    }
}

impl fmt::Display for Edge {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}>{}", self.upper, self.lower)
    }
}

impl FromStr for Edge {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        let (a, b) = s.split_once('>').ok_or_else(|| Error::Parse(format!("bad edge key {s:?}")))?;
        Edge::new(a.trim().parse()?, b.trim().parse()?)
    }
}

/// A 2-face in canonical orientation: `mid_a` clears the lower coordinate.
#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Debug)]
pub struct Face2 {
    pub top: Vertex,
    pub mid_a: Vertex,
    pub mid_b: Vertex,
    pub bottom: Vertex,
}

impl Face2 {
    /// The face below `top` spanned by coordinates `i` and `j` (any order).
    pub fn new(top: Vertex, i: usize, j: usize) -> Self {
        let (i, j) = if i < j { (i, j) } else { (j, i) };
        debug_assert!(i != j && top.bit(i) == 1 && top.bit(j) == 1);
        Face2 {
            top,
            mid_a: top.with_bit(i, 0),
            mid_b: top.with_bit(j, 0),
            bottom: top.with_bit(i, 0).with_bit(j, 0),
        }
    }

    /// The face containing the chain `top > mid > bottom`.
    pub fn through(top: Vertex, mid: Vertex, bottom: Vertex) -> Result<(Face2, bool)> {
        let i = edge_coord(&top, &mid).ok_or_else(|| Error::Cube(format!("{top} > {mid} is not an edge")))?;
        let j = edge_coord(&mid, &bottom).ok_or_else(|| Error::Cube(format!("{mid} > {bottom} is not an edge")))?;
        let f = Face2::new(top, i, j);
        Ok((f, f.mid_a == mid))
    }

    /// Coordinates `(i, j)` with `i < j`.
    pub fn coords(&self) -> (usize, usize) {
        let d = self.top.mask ^ self.bottom.mask;
        let i = d.trailing_zeros() as usize + 1;
        let j = 32 - d.leading_zeros() as usize;
        (i, j)
    }

    pub fn all(dim: usize) -> Vec<Face2> {
        let mut out = Vec::new();
        for top in Vertex::all(dim) {
            let ones = top.ones_coords();
            for (a, &i) in ones.iter().enumerate() {
                for &j in &ones[a + 1..] {
                    out.push(Face2::new(top, i, j));
                }
            }
        }
        out
    }

    /// Key of the form `u>w via v|v'` with `v = mid_a`.
    pub fn key(&self) -> String {
        format!("{}>{} via {}|{}", self.top, self.bottom, self.mid_a, self.mid_b)
    }

    /// Parse a face key; the flag is true when the key is in canonical orientation.
    pub fn parse_key(s: &str) -> Result<(Face2, bool)> {
        let bad = || Error::Parse(format!("bad face key {s:?}"));
        let (ends, mids) = s.split_once(" via ").ok_or_else(bad)?;
        let (top, bottom) = ends.split_once('>').ok_or_else(bad)?;
        let (ma, mb) = mids.split_once('|').ok_or_else(bad)?;
        let top: Vertex = top.trim().parse()?;
        let bottom: Vertex = bottom.trim().parse()?;
        let ma: Vertex = ma.trim().parse()?;
        let mb: Vertex = mb.trim().parse()?;
        let (f, canon) = Face2::through(top, ma, bottom)?;
        if f.bottom != bottom || (canon && f.mid_b != mb) || (!canon && f.mid_a != mb) {
            return Err(bad());
        }
        Ok((f, canon))
    }
}

impl fmt::Display for Face2 {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.key())
    }
}

/// A 3-face: `top` with three coordinates `i < j < k` cleared.
#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Debug)]
pub struct Face3 {
    pub top: Vertex,
    pub coords: [usize; 3],
}

impl Face3 {
    pub fn bottom(&self) -> Vertex {
        self.coords.iter().fold(self.top, |v, &c| v.with_bit(c, 0))
    }

    pub fn all(dim: usize) -> Vec<Face3> {
        let mut out = Vec::new();
        for top in Vertex::all(dim) {
            let ones = top.ones_coords();
            for a in 0..ones.len() {
                for b in a + 1..ones.len() {
                    for c in b + 1..ones.len() {
                        out.push(Face3 { top, coords: [ones[a], ones[b], ones[c]] });
                    }
                }
            }
        }
        out
    }

    /// The six 2-faces of this 3-face.
    pub fn faces(&self) -> Vec<Face2> {
        let [i, j, k] = self.coords;
        let t = self.top;
        vec![
            Face2::new(t, i, j),
            Face2::new(t, i, k),
            Face2::new(t, j, k),
            Face2::new(t.with_bit(k, 0), i, j),
            Face2::new(t.with_bit(j, 0), i, k),
            Face2::new(t.with_bit(i, 0), j, k),
        ]
    }
}

impl fmt::Display for Face3 {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}>{}", self.top, self.bottom())
    }
}

/// A maximal chain `z_0 > z_1 > … > z_k` with each step an edge.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Debug)]
pub struct MaximalChain {
    vertices: Vec<Vertex>,
}

impl MaximalChain {
    pub fn new(vertices: Vec<Vertex>) -> Result<Self> {
        if vertices.is_empty() {
            return Err(Error::Cube("empty chain".into()));
        }
        for w in vertices.windows(2) {
            if edge_coord(&w[0], &w[1]).is_none() {
                return Err(Error::Cube(format!("{} > {} is not an edge", w[0], w[1])));
            }
        }
        Ok(MaximalChain { vertices })
    }

    /// Chain from `top` clearing the given coordinates in order.
    pub fn from_ordering(top: Vertex, ordering: &[usize]) -> Self {
        let mut vs = vec![top];
        let mut cur = top;
        for &c in ordering {
            debug_assert_eq!(cur.bit(c), 1);
            cur = cur.with_bit(c, 0);
            vs.push(cur);
        }
        MaximalChain { vertices: vs }
    }

    /// Chain clearing coordinates in ascending order.
    pub fn canonical(top: Vertex, bottom: Vertex) -> Result<Self> {
        if !geq(&top, &bottom)? {
            return Err(Error::Cube(format!("{top} is not >= {bottom}")));
        }
        let ord: Vec<usize> = (1..=top.dim()).filter(|&i| top.bit(i) != bottom.bit(i)).collect();
        Ok(MaximalChain::from_ordering(top, &ord))
    }

    pub fn vertices(&self) -> &[Vertex] {
        &self.vertices
    }

    pub fn top(&self) -> Vertex {
        self.vertices[0]
    }

    pub fn bottom(&self) -> Vertex {
        *self.vertices.last().unwrap()
    }

    /// Number of edges.
    pub fn len(&self) -> usize {
        self.vertices.len() - 1
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn edges(&self) -> Vec<Edge> {
        self.vertices.windows(2).map(|w| Edge { upper: w[0], lower: w[1] }).collect()
    }

    /// The order in which coordinates are cleared.
    pub fn ordering(&self) -> Vec<usize> {
        self.edges().iter().map(|e| e.coord()).collect()
    }

    /// Replace interior vertex `z_i` by the other vertex of its 2-face.
    pub fn swap(&self, i: usize) -> Result<MaximalChain> {
        if i == 0 || i >= self.len() {
            return Err(Error::Cube(format!("index {i} is not interior to a chain of length {}", self.len())));
        }
        let mut ord = self.ordering();
        ord.swap(i - 1, i);
        Ok(MaximalChain::from_ordering(self.top(), &ord))
    }

    /// Concatenate two chains sharing an endpoint.
    pub fn concat(&self, other: &MaximalChain) -> Result<MaximalChain> {
        if self.bottom() != other.top() {
            return Err(Error::Cube("chains do not meet".into()));
        }
        let mut vs = self.vertices.clone();
        vs.extend_from_slice(&other.vertices[1..]);
        Ok(MaximalChain { vertices: vs })
    }
}

impl fmt::Display for MaximalChain {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.vertices.iter().map(|v| v.to_string()).collect();
        f.write_str(&parts.join(">"))
    }
}

/// All `k!` maximal chains from `u` to `v`, in lexicographic order of the
/// coordinate orderings.
pub fn maximal_chains(u: &Vertex, v: &Vertex) -> Result<Vec<MaximalChain>> {
    if !geq(u, v)? {
        return Err(Error::Cube(format!("{u} is not >= {v}")));
    }
    let coords: Vec<usize> = (1..=u.dim()).filter(|&i| u.bit(i) != v.bit(i)).collect();
    let mut out = Vec::new();
    let mut used = vec![false; coords.len()];
    let mut cur = Vec::with_capacity(coords.len());
    permute(&coords, &mut used, &mut cur, &mut |ord| out.push(MaximalChain::from_ordering(*u, ord)));
    Ok(out)
}

fn permute(items: &[usize], used: &mut [bool], cur: &mut Vec<usize>, f: &mut dyn FnMut(&[usize])) {
    if cur.len() == items.len() {
        f(cur);
        return;
    }
    for i in 0..items.len() {
        if !used[i] {
            used[i] = true;
            cur.push(items[i]);
            permute(items, used, cur, f);
            cur.pop();
            used[i] = false;
        }
    }
}

/// Elementary swaps turning `c1` into `c2`, by bubble sort that always fixes
/// the smallest out-of-place position first. Each step records the index of
/// the replaced interior vertex and the resulting chain.
pub fn chain_swap_path(c1: &MaximalChain, c2: &MaximalChain) -> Result<Vec<(usize, MaximalChain)>> {
    if c1.top() != c2.top() || c1.bottom() != c2.bottom() {
        return Err(Error::Cube(format!("chains {c1} and {c2} do not share endpoints")));
    }
    let target = c2.ordering();
    let pos = |c: usize| target.iter().position(|&t| t == c).unwrap();
    let mut ord = c1.ordering();
    let mut out = Vec::new();
    loop {
        let Some(i) = (0..ord.len().saturating_sub(1)).find(|&i| pos(ord[i]) > pos(ord[i + 1])) else {
            break;
        };
        ord.swap(i, i + 1);
        out.push((i + 1, MaximalChain::from_ordering(c1.top(), &ord)));
    }
    Ok(out)
}

/// A face inclusion `C(n) ↪ C(N)`: the listed coordinates of `bottom` are
/// filled in from the source vertex.
#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub struct FaceInclusion {
    n: usize,
    big_n: usize,
    bottom: Vertex,
    coords: Vec<usize>,
}

impl FaceInclusion {
    pub fn new(bottom: Vertex, coords: Vec<usize>) -> Result<Self> {
        let big_n = bottom.dim();
        let mut seen = vec![false; big_n + 1];
        for &c in &coords {
            if c == 0 || c > big_n {
                return Err(Error::Cube(format!("coordinate {c} outside C({big_n})")));
            }
            if seen[c] {
                return Err(Error::Cube(format!("coordinate {c} listed twice")));
            }
            seen[c] = true;
            if bottom.bit(c) != 0 {
                return Err(Error::Cube(format!("bottom {bottom} is 1 at listed coordinate {c}")));
            }
        }
        Ok(FaceInclusion { n: coords.len(), big_n, bottom, coords })
    }

    pub fn identity(n: usize) -> Self {
        FaceInclusion { n, big_n: n, bottom: Vertex::zero(n), coords: (1..=n).collect() }
    }

    /// `C(n) ≅ {b} × C(n) ↪ C(n+1)` or `C(n) × {b}` when `first` is false.
    pub fn slice(n: usize, first: bool, b: u8) -> Self {
        let (bottom, coords) = if first {
            (Vertex::zero(n + 1).with_bit(1, b), (2..=n + 1).collect())
        } else {
            (Vertex::zero(n + 1).with_bit(n + 1, b), (1..=n).collect())
        };
        FaceInclusion { n, big_n: n + 1, bottom, coords }
    }

    pub fn source_dim(&self) -> usize {
        self.n
    }

    pub fn target_dim(&self) -> usize {
        self.big_n
    }

    pub fn bottom(&self) -> Vertex {
        self.bottom
    }

    pub fn coords(&self) -> &[usize] {
        &self.coords
    }

    /// `|ι| = |bottom|`.
    pub fn weight(&self) -> usize {
        self.bottom.grading()
    }

    pub fn apply(&self, v: &Vertex) -> Result<Vertex> {
        if v.dim() != self.n {
            return Err(Error::Dimension(format!("vertex {v} not in C({})", self.n)));
        }
        Ok(self.apply_unchecked(v))
    }

    pub(crate) fn apply_unchecked(&self, v: &Vertex) -> Vertex {
        let mut w = self.bottom;
        for (i, &c) in self.coords.iter().enumerate() {
            if v.bit(i + 1) == 1 {
                w = w.with_bit(c, 1);
            }
        }
        w
    }

    /// The preimage of `w`, if `w` lies in the image.
    pub fn preimage(&self, w: &Vertex) -> Option<Vertex> {
        if w.dim() != self.big_n {
            return None;
        }
        let mut rest = *w;
        let mut v = Vertex::zero(self.n);
        for (i, &c) in self.coords.iter().enumerate() {
            if w.bit(c) == 1 {
                v = v.with_bit(i + 1, 1);
            }
            rest = rest.with_bit(c, 0);
        }
        (rest == self.bottom).then_some(v)
    }

    /// `self ∘ first`.
    pub fn compose(&self, first: &FaceInclusion) -> Result<FaceInclusion> {
        if first.big_n != self.n {
            return Err(Error::Dimension("face inclusions do not compose".into()));
        }
        let bottom = self.apply_unchecked(&first.bottom);
        let coords = first.coords.iter().map(|&c| self.coords[c - 1]).collect();
        FaceInclusion::new(bottom, coords)
    }
}

impl fmt::Display for FaceInclusion {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "C({})->C({}) at {} via {:?}", self.n, self.big_n, self.bottom, self.coords)
    }
}

pub fn apply_face_inclusion(iota: &FaceInclusion, v: &Vertex) -> Result<Vertex> {
    iota.apply(v)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn v(s: &str) -> Vertex {
        s.parse().unwrap()
    }

    #[test]
    fn grading_examples() {
        assert_eq!(grading(&v("000")), 0);
        assert_eq!(grading(&v("101")), 2);
        assert_eq!(grading(&v("1111")), 4);
    }

    #[test]
    fn geq_examples() {
        assert!(geq(&v("11"), &v("10")).unwrap());
        assert!(geq(&v("01"), &v("01")).unwrap());
        assert!(!geq(&v("10"), &v("01")).unwrap());
        assert!(geq(&v("1"), &v("01")).is_err());
    }

    #[test]
    fn sign_examples() {
        assert_eq!(sign_assignment(&v("110"), &v("010")).unwrap(), 0);
        assert_eq!(sign_assignment(&v("11"), &v("10")).unwrap(), 1);
        assert_eq!(sign_assignment(&v("101"), &v("100")).unwrap(), 1);
        assert!(sign_assignment(&v("11"), &v("00")).is_err());
    }

    #[test]
    fn chains_examples() {
        assert_eq!(maximal_chains(&v("01"), &v("01")).unwrap().len(), 1);
        let two = maximal_chains(&v("11"), &v("00")).unwrap();
        let mids: Vec<String> = two.iter().map(|c| c.vertices()[1].to_string()).collect();
        assert_eq!(mids, vec!["01", "10"]);
        assert_eq!(maximal_chains(&v("111"), &v("000")).unwrap().len(), 6);
        assert!(maximal_chains(&v("10"), &v("01")).is_err());
    }

    #[test]
    fn swap_path_examples() {
        let cs = maximal_chains(&v("111"), &v("000")).unwrap();
        assert!(chain_swap_path(&cs[0], &cs[0]).unwrap().is_empty());
        let face = maximal_chains(&v("11"), &v("00")).unwrap();
        assert_eq!(chain_swap_path(&face[0], &face[1]).unwrap().len(), 1);
        let rev = MaximalChain::from_ordering(v("111"), &[3, 2, 1]);
        let path = chain_swap_path(&cs[0], &rev).unwrap();
        assert_eq!(path.len(), 3);
        assert_eq!(path.last().unwrap().1, rev);
        let other = maximal_chains(&v("11"), &v("10")).unwrap();
        assert!(chain_swap_path(&face[0], &other[0]).is_err());
    }

    #[test]
    fn face_inclusion_examples() {
        let id = FaceInclusion::identity(3);
        assert_eq!(id.apply(&v("101")).unwrap(), v("101"));
        let i1 = FaceInclusion::new(v("00"), vec![2]).unwrap();
        assert_eq!(i1.apply(&v("1")).unwrap(), v("01"));
        let i2 = FaceInclusion::new(v("100"), vec![2, 3]).unwrap();
        assert_eq!(i2.apply(&v("10")).unwrap(), v("110"));
        assert_eq!(i2.weight(), 1);
        assert_eq!(i2.preimage(&v("110")), Some(v("10")));
        assert_eq!(i2.preimage(&v("010")), None);
        assert!(FaceInclusion::new(v("100"), vec![1]).is_err());
    }

    #[test]
    fn face_keys_round_trip() {
        for f in Face2::all(4) {
            let (g, canon) = Face2::parse_key(&f.key()).unwrap();
            assert!(canon);
            assert_eq!(f, g);
            let rev = format!("{}>{} via {}|{}", f.top, f.bottom, f.mid_b, f.mid_a);
            assert_eq!(Face2::parse_key(&rev).unwrap(), (f, false));
        }
        let f = Face2::new(v("11"), 1, 2);
        assert_eq!(f.key(), "11>00 via 01|10");
    }

    #[test]
    fn display_order_is_descending_lexicographic() {
        let mut vs: Vec<Vertex> = Vertex::all(3).collect();
        vs.sort_by_key(|x| x.display_order_key());
        let s: Vec<String> = vs.iter().map(|x| x.to_string()).collect();
        assert_eq!(s, vec!["111", "110", "101", "100", "011", "010", "001", "000"]);
    }
}
