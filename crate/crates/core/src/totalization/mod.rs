//! Chain complexes of free abelian groups, totalization of cube functors,
//! integral homology and mapping cones.

mod snf;

use std::collections::{BTreeMap, HashMap};
use std::fmt;

use serde::Serialize;

use crate::cube::{Edge, FaceInclusion, Vertex};
use crate::error::{Error, Result};
use crate::functor::{extend_along_face_inclusion, validate_c0, CubeFunctor, NaturalTransformation, StableFunctor};
use crate::matrix::IntegerMatrix;

pub use snf::{invariant_factors, rank, smith_normal_form};

/// A basis element: the vertex it sits over and the generator's id.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Debug, Serialize)]
pub struct BasisLabel {
    pub vertex: String,
    pub element: String,
}

impl fmt::Display for BasisLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}", self.vertex, self.element)
    }
}

/// A bounded complex with `diff(d): C_d → C_{d-1}`.
#[derive(Clone, PartialEq, Eq, Debug, Default)]
pub struct ChainComplex {
    groups: BTreeMap<i64, Vec<BasisLabel>>,
    diffs: BTreeMap<i64, IntegerMatrix>,
}

impl ChainComplex {
    /// Checks matrix shapes and `∂∘∂ = 0`. Empty groups are dropped.
    pub fn new(groups: BTreeMap<i64, Vec<BasisLabel>>, diffs: BTreeMap<i64, IntegerMatrix>) -> Result<Self> {
        let groups: BTreeMap<i64, Vec<BasisLabel>> = groups.into_iter().filter(|(_, b)| !b.is_empty()).collect();
        let mut c = ChainComplex { groups, diffs: BTreeMap::new() };
        for (d, m) in diffs {
            if m.rows() != c.rank(d - 1) || m.cols() != c.rank(d) {
                return Err(Error::Dimension(format!(
                    "differential in degree {d} is {}x{}, expected {}x{}",
                    m.rows(),
                    m.cols(),
                    c.rank(d - 1),
                    c.rank(d)
                )));
            }
            if m.rows() > 0 && m.cols() > 0 && !m.is_zero() {
                c.diffs.insert(d, m);
            }
        }
        for &d in c.diffs.keys() {
            if let Some(next) = c.diffs.get(&(d - 1)) {
                if !next.mul(&c.diffs[&d]).is_zero() {
                    return Err(Error::Invariant(format!("∂∘∂ ≠ 0 from degree {d}")));
                }
            }
        }
        Ok(c)
    }

    pub fn zero() -> Self {
        ChainComplex::default()
    }

    pub fn rank(&self, d: i64) -> usize {
        self.groups.get(&d).map_or(0, |b| b.len())
    }

    pub fn basis(&self, d: i64) -> &[BasisLabel] {
        self.groups.get(&d).map_or(&[], |b| b.as_slice())
    }

    pub fn groups(&self) -> &BTreeMap<i64, Vec<BasisLabel>> {
        &self.groups
    }

    /// Degrees with nonzero groups, ascending.
    pub fn degrees(&self) -> Vec<i64> {
        self.groups.keys().copied().collect()
    }

    pub fn diff(&self, d: i64) -> IntegerMatrix {
        self.diffs.get(&d).cloned().unwrap_or_else(|| IntegerMatrix::zeros(self.rank(d - 1), self.rank(d)))
    }

    pub fn is_zero(&self) -> bool {
        self.groups.is_empty()
    }

    pub fn total_rank(&self) -> usize {
        self.groups.values().map(|b| b.len()).sum()
    }

    /// `Σ^k`: degrees raised by `k`, differentials multiplied by `(-1)^k`.
    pub fn suspend(&self, k: i64) -> Self {
        let sign = if k.rem_euclid(2) == 1 { -1 } else { 1 };
        ChainComplex {
            groups: self.groups.iter().map(|(d, b)| (d + k, b.clone())).collect(),
            diffs: self.diffs.iter().map(|(d, m)| (d + k, if sign < 0 { m.neg() } else { m.clone() })).collect(),
        }
    }

    /// Degrees raised by `k` with differentials unchanged.
    pub fn shift(&self, k: i64) -> Self {
        ChainComplex {
            groups: self.groups.iter().map(|(d, b)| (d + k, b.clone())).collect(),
            diffs: self.diffs.iter().map(|(d, m)| (d + k, m.clone())).collect(),
        }
    }

    /// `self ⊕ other` with `self`'s basis first in every degree.
    pub fn direct_sum(&self, other: &ChainComplex) -> ChainComplex {
        let mut groups = self.groups.clone();
        for (d, b) in &other.groups {
            groups.entry(*d).or_default().extend(b.iter().cloned());
        }
        let degrees: Vec<i64> = groups.keys().copied().collect();
        let mut diffs = BTreeMap::new();
        for d in degrees {
            let (a, b) = (self.diff(d), other.diff(d));
            let z1 = IntegerMatrix::zeros(a.rows(), b.cols());
            let z2 = IntegerMatrix::zeros(b.rows(), a.cols());
            diffs.insert(d, IntegerMatrix::block(&a, &z1, &z2, &b));
        }
        ChainComplex::new(groups, diffs).expect("direct sum of complexes")
    }

    /// `self ⊗ other` with `∂(a⊗b) = ∂a⊗b + (-1)^{|a|} a⊗∂b`. Basis pairs are
    /// ordered by the degree of the left factor (descending), then
    /// lexicographically; labels concatenate vertices and join elements with `×`.
    pub fn tensor(&self, other: &ChainComplex) -> ChainComplex {
        let mut groups: BTreeMap<i64, Vec<BasisLabel>> = BTreeMap::new();
        let mut pos: HashMap<(i64, usize, i64, usize), usize> = HashMap::new();
        for (&d1, b1) in self.groups.iter().rev() {
            for (&d2, b2) in &other.groups {
                for (i, x) in b1.iter().enumerate() {
                    for (j, y) in b2.iter().enumerate() {
                        let g = groups.entry(d1 + d2).or_default();
                        pos.insert((d1, i, d2, j), g.len());
                        g.push(BasisLabel { vertex: format!("{}{}", x.vertex, y.vertex), element: format!("{}×{}", x.element, y.element) });
                    }
                }
            }
        }
        let mut diffs: BTreeMap<i64, IntegerMatrix> =
            groups.keys().map(|&d| (d, IntegerMatrix::zeros(groups.get(&(d - 1)).map_or(0, |b| b.len()), groups[&d].len()))).collect();
        for (&d1, b1) in &self.groups {
            for (&d2, b2) in &other.groups {
                let (da, db) = (self.diff(d1), other.diff(d2));
                let sign = if d1.rem_euclid(2) == 1 { -1 } else { 1 };
                let m = diffs.get_mut(&(d1 + d2)).unwrap();
                for i in 0..b1.len() {
                    for j in 0..b2.len() {
                        let col = pos[&(d1, i, d2, j)];
                        for r in 0..da.rows() {
                            let x = da.get(r, i);
                            if x != 0 {
                                m.add_to(pos[&(d1 - 1, r, d2, j)], col, x);
                            }
                        }
                        for r in 0..db.rows() {
                            let y = db.get(r, j);
                            if y != 0 {
                                m.add_to(pos[&(d1, i, d2 - 1, r)], col, sign * y);
                            }
                        }
                    }
                }
            }
        }
        ChainComplex::new(groups, diffs).expect("tensor of complexes")
    }

    /// The same complex with each degree's basis rearranged into `order`,
    /// which must be a permutation of the existing labels.
    pub fn reordered(&self, order: &BTreeMap<i64, Vec<BasisLabel>>) -> Result<ChainComplex> {
        let mut perm: BTreeMap<i64, Vec<usize>> = BTreeMap::new();
        for (d, b) in &self.groups {
            let target = order.get(d).ok_or_else(|| Error::Dimension(format!("degree {d} missing from new order")))?;
            let idx: HashMap<&BasisLabel, usize> = target.iter().enumerate().map(|(i, l)| (l, i)).collect();
            if idx.len() != b.len() {
                return Err(Error::Dimension(format!("degree {d}: orders have different sizes")));
            }
            let p = b
                .iter()
                .map(|l| idx.get(l).copied().ok_or_else(|| Error::Dimension(format!("label {l} missing from new order"))))
                .collect::<Result<Vec<_>>>()?;
            perm.insert(*d, p);
        }
        if order.keys().any(|d| !self.groups.contains_key(d)) {
            return Err(Error::Dimension("new order has extra degrees".into()));
        }
        let diffs = self
            .diffs
            .iter()
            .map(|(d, m)| (*d, m.permuted(&perm[&(d - 1)], &perm[d])))
            .collect();
        ChainComplex::new(order.clone(), diffs)
    }
}

/// Degree-preserving map between complexes.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct ChainMap {
    pub source: ChainComplex,
    pub target: ChainComplex,
    maps: BTreeMap<i64, IntegerMatrix>,
}

impl ChainMap {
    /// Checks shapes and `f∘∂ = ∂∘f` in every degree.
    pub fn new(source: ChainComplex, target: ChainComplex, maps: BTreeMap<i64, IntegerMatrix>) -> Result<Self> {
        for (d, m) in &maps {
            if m.rows() != target.rank(*d) || m.cols() != source.rank(*d) {
                return Err(Error::Dimension(format!("chain map in degree {d} has the wrong shape")));
            }
        }
        let f = ChainMap { source, target, maps };
        let mut degrees: Vec<i64> = f.source.degrees();
        degrees.extend(f.target.degrees());
        degrees.sort_unstable();
        degrees.dedup();
        for d in degrees {
            let lhs = f.map(d - 1).mul(&f.source.diff(d));
            let rhs = f.target.diff(d).mul(&f.map(d));
            if lhs != rhs {
                return Err(Error::Invariant(format!("map does not commute with ∂ in degree {d}")));
            }
        }
        Ok(f)
    }

    pub fn map(&self, d: i64) -> IntegerMatrix {
        self.maps.get(&d).cloned().unwrap_or_else(|| IntegerMatrix::zeros(self.target.rank(d), self.source.rank(d)))
    }

    pub fn identity(c: &ChainComplex) -> Self {
        let maps = c.groups.iter().map(|(d, b)| (*d, IntegerMatrix::identity(b.len()))).collect();
        ChainMap { source: c.clone(), target: c.clone(), maps }
    }

    pub fn zero(source: &ChainComplex, target: &ChainComplex) -> Self {
        ChainMap { source: source.clone(), target: target.clone(), maps: BTreeMap::new() }
    }

    /// `other ∘ self`.
    pub fn then(&self, other: &ChainMap) -> Result<ChainMap> {
        if self.target != other.source {
            return Err(Error::Dimension("chain maps do not compose".into()));
        }
        let maps = self.source.degrees().into_iter().map(|d| (d, other.map(d).mul(&self.map(d)))).collect();
        ChainMap::new(self.source.clone(), other.target.clone(), maps)
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct HomologyGroup {
    pub degree: i64,
    pub rank: usize,
    pub torsion: Vec<u64>,
}

impl HomologyGroup {
    pub fn is_zero(&self) -> bool {
        self.rank == 0 && self.torsion.is_empty()
    }
}

impl fmt::Display for HomologyGroup {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut parts: Vec<String> = Vec::new();
        match self.rank {
            0 => {}
            1 => parts.push("Z".into()),
            r => parts.push(format!("Z^{r}")),
        }
        for t in &self.torsion {
            parts.push(format!("Z/{t}"));
        }
        if parts.is_empty() {
            parts.push("0".into());
        }
        write!(f, "H_{} = {}", self.degree, parts.join(" + "))
    }
}

/// Per-vertex position of every generator of `Tot(F)` (unshifted degree).
struct Layout {
    /// `(degree, offset)` of the first element of `F(v)`, by mask.
    start: Vec<(i64, usize)>,
    groups: BTreeMap<i64, Vec<BasisLabel>>,
}

fn layout(f: &CubeFunctor) -> Layout {
    let mut verts: Vec<Vertex> = Vertex::all(f.dim()).collect();
    verts.sort_by_key(|v| (v.grading(), v.display_order_key()));
    let mut start = vec![(0, 0); verts.len()];
    let mut groups: BTreeMap<i64, Vec<BasisLabel>> = BTreeMap::new();
    for v in verts {
        let d = v.grading() as i64;
        let g = groups.entry(d).or_default();
        start[v.mask() as usize] = (d, g.len());
        let name = v.to_string();
        g.extend(f.set(&v).elements().iter().map(|x| BasisLabel { vertex: name.clone(), element: x.clone() }));
    }
    Layout { start, groups }
}

/// `Tot(F)` in degrees `|v|`: the summand at `v` is the free group on
/// `F(v)` and each edge contributes `(-1)^{s_{u,v}}` times its linearization.
pub fn tot_functor(f: &CubeFunctor) -> Result<ChainComplex> {
    let c0 = validate_c0(f);
    if !c0.passes() {
        return Err(Error::Functor(format!("C-0 fails, ∂² would not vanish: {}", c0.violations.join("; "))));
    }
    let lay = layout(f);
    let mut diffs: BTreeMap<i64, IntegerMatrix> = BTreeMap::new();
    for (e, c) in f.edges() {
        if c.is_empty() {
            continue;
        }
        let (d, cu) = lay.start[e.upper.mask() as usize];
        let (_, cv) = lay.start[e.lower.mask() as usize];
        let rows = lay.groups.get(&(d - 1)).map_or(0, |b| b.len());
        let cols = lay.groups.get(&d).map_or(0, |b| b.len());
        let m = diffs.entry(d).or_insert_with(|| IntegerMatrix::zeros(rows, cols));
        let sign = if e.sign() == 1 { -1 } else { 1 };
        for sp in c.elements() {
            m.add_to(cv + sp.t, cu + sp.s, sign);
        }
    }
    ChainComplex::new(lay.groups, diffs).map_err(|e| match e {
        Error::Invariant(m) => Error::Invariant(format!("{m} although C-0 holds")),
        other => other,
    })
}

/// `Tot(Σ^r F) = Σ^r Tot(F)`.
pub fn tot(s: &StableFunctor) -> Result<ChainComplex> {
    Ok(tot_functor(&s.functor)?.suspend(s.shift))
}

/// `Tot(η): Tot(F) → Tot(F')` given by the linearized components.
pub fn tot_nat_trans(eta: &NaturalTransformation) -> Result<ChainMap> {
    let (src, tgt) = (eta.source(), eta.target());
    let (ls, lt) = (layout(&src), layout(&tgt));
    let source = tot_functor(&src)?;
    let target = tot_functor(&tgt)?;
    let mut maps: BTreeMap<i64, IntegerMatrix> = BTreeMap::new();
    for v in Vertex::all(eta.dim()) {
        let comp = eta.component(&v);
        if comp.is_empty() {
            continue;
        }
        let (d, cs) = ls.start[v.mask() as usize];
        let (_, ct) = lt.start[v.mask() as usize];
        let m = maps.entry(d).or_insert_with(|| IntegerMatrix::zeros(target.rank(d), source.rank(d)));
        for sp in comp.elements() {
            m.add_to(ct + sp.t, cs + sp.s, 1);
        }
    }
    ChainMap::new(source, target, maps)
}

/// `Cone(f)_d = A_{d-1} ⊕ B_d` with `∂ = [[-∂_A, 0], [f, ∂_B]]`. Labels of
/// `A` get vertex prefix `1`, labels of `B` prefix `0`.
pub fn cone(f: &ChainMap) -> ChainComplex {
    let (a, b) = (&f.source, &f.target);
    let prefix = |p: &str, l: &BasisLabel| BasisLabel { vertex: format!("{p}{}", l.vertex), element: l.element.clone() };
    let mut degrees: Vec<i64> = a.degrees().iter().map(|d| d + 1).collect();
    degrees.extend(b.degrees());
    degrees.sort_unstable();
    degrees.dedup();
    let mut groups = BTreeMap::new();
    for &d in &degrees {
        let mut g: Vec<BasisLabel> = a.basis(d - 1).iter().map(|l| prefix("1", l)).collect();
        g.extend(b.basis(d).iter().map(|l| prefix("0", l)));
        groups.insert(d, g);
    }
    let mut diffs = BTreeMap::new();
    for &d in &degrees {
        let m = IntegerMatrix::block(&a.diff(d - 1).neg(), &IntegerMatrix::zeros(a.rank(d - 2), b.rank(d)), &f.map(d - 1), &b.diff(d));
        diffs.insert(d, m);
    }
    ChainComplex::new(groups, diffs).expect("cone of a chain map")
}

/// Integral homology in every degree where the complex is nonzero.
pub fn homology(c: &ChainComplex) -> BTreeMap<i64, HomologyGroup> {
    let degrees = c.degrees();
    // Invariant factors of ∂_d for every d that can matter.
    let mut ds: Vec<i64> = degrees.iter().flat_map(|&d| [d, d + 1]).collect();
    ds.sort_unstable();
    ds.dedup();
    let factors = crate::par::map(&ds, |&d| invariant_factors(&c.diff(d)));
    let by_d: HashMap<i64, &Vec<num_bigint::BigInt>> = ds.iter().copied().zip(factors.iter()).collect();
    degrees
        .into_iter()
        .map(|d| {
            let out = by_d[&d].len();
            let inc = by_d[&(d + 1)];
            let rank = c.rank(d) - out - inc.len();
            (d, HomologyGroup { degree: d, rank, torsion: snf::torsion_of(inc) })
        })
        .collect()
}

/// Nonzero homology groups only.
pub fn nonzero_homology(c: &ChainComplex) -> Vec<HomologyGroup> {
    homology(c).into_values().filter(|h| !h.is_zero()).collect()
}

/// Whether `f` induces an isomorphism on integral homology, decided by
/// acyclicity of its mapping cone.
pub fn is_quasi_iso(f: &ChainMap) -> Result<bool> {
    Ok(homology(&cone(f)).values().all(HomologyGroup::is_zero))
}

/// Homological dual: degree `d` becomes `-d` and differentials transpose.
pub fn dualize(c: &ChainComplex) -> ChainComplex {
    ChainComplex {
        groups: c.groups.iter().map(|(d, b)| (-d, b.clone())).collect(),
        diffs: c.diffs.iter().map(|(d, m)| (1 - d, m.transpose())).collect(),
    }
}

/// Sign twist `t_v` for a face inclusion, indexed by mask.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct SignTwist {
    pub t: Vec<u8>,
}

/// `Tot(F_ι) → Σ^{|ι|} Tot(F)`, `(-1)^{t_v}` times the identity on each
/// summand, with `t` normalized by `t_{0…0} = 0`.
pub fn face_shift_iso(f: &CubeFunctor, iota: &FaceInclusion) -> Result<(SignTwist, ChainMap)> {
    let n = f.dim();
    if iota.source_dim() != n {
        return Err(Error::Dimension(format!("{iota} does not start at C({n})")));
    }
    let w = iota.weight() as u8;
    let rhs = |e: &Edge| {
        let img = Edge { upper: iota.apply_unchecked(&e.upper), lower: iota.apply_unchecked(&e.lower) };
        (w + e.sign() + img.sign()) % 2
    };
    let mut t = vec![u8::MAX; 1 << n];
    t[0] = 0;
    let mut queue = std::collections::VecDeque::from([Vertex::zero(n)]);
    while let Some(v) = queue.pop_front() {
        for k in 1..=n {
            let u = v.with_bit(k, 1 - v.bit(k));
            if t[u.mask() as usize] != u8::MAX {
                continue;
            }
            let e = if v.bit(k) == 0 { Edge::down(u, k) } else { Edge::down(v, k) };
            t[u.mask() as usize] = (t[v.mask() as usize] + rhs(&e)) % 2;
            queue.push_back(u);
        }
    }
    for e in Edge::all(n) {
        if (t[e.upper.mask() as usize] + t[e.lower.mask() as usize]) % 2 != rhs(&e) {
            return Err(Error::Invariant(format!("sign twist does not close up on edge {e}")));
        }
    }
    let ext = extend_along_face_inclusion(f, iota)?;
    let source = tot_functor(&ext)?;
    let target = tot_functor(f)?.suspend(iota.weight() as i64);
    let (ls, lt) = (layout(&ext), layout(f));
    let mut maps: BTreeMap<i64, IntegerMatrix> = BTreeMap::new();
    for v in Vertex::all(n) {
        let size = f.set(&v).len();
        if size == 0 {
            continue;
        }
        let (d, cs) = ls.start[iota.apply_unchecked(&v).mask() as usize];
        let (_, ct) = lt.start[v.mask() as usize];
        let m = maps.entry(d).or_insert_with(|| IntegerMatrix::zeros(target.rank(d), source.rank(d)));
        let sign = if t[v.mask() as usize] == 1 { -1 } else { 1 };
        for i in 0..size {
            m.set(ct + i, cs + i, sign);
        }
    }
    Ok((SignTwist { t }, ChainMap::new(source, target, maps)?))
}
