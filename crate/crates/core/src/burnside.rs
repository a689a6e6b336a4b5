//! Finite sets, correspondences and 2-morphisms of the Burnside category.

use std::collections::HashMap;
use std::fmt;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
pub use crate::matrix::IntegerMatrix;

/// Separator used when composite element ids are flattened.
pub const COMPOSE_SEP: &str = "∘";

/// An ordered finite set of string identifiers.
#[derive(Clone, Default)]
pub struct FiniteSet {
    elements: Vec<String>,
    index: HashMap<String, usize>,
}

impl FiniteSet {
    pub fn new<S: Into<String>>(elements: impl IntoIterator<Item = S>) -> Result<Self> {
        let elements: Vec<String> = elements.into_iter().map(Into::into).collect();
        let mut index = HashMap::with_capacity(elements.len());
        for (i, e) in elements.iter().enumerate() {
            if index.insert(e.clone(), i).is_some() {
                return Err(Error::Burnside(format!("duplicate set element {e:?}")));
            }
        }
        Ok(FiniteSet { elements, index })
    }

    pub fn empty() -> Self {
        FiniteSet::default()
    }

    pub fn len(&self) -> usize {
        self.elements.len()
    }

    pub fn is_empty(&self) -> bool {
        self.elements.is_empty()
    }

    pub fn elements(&self) -> &[String] {
        &self.elements
    }

    pub fn get(&self, i: usize) -> &str {
        &self.elements[i]
    }

    pub fn index_of(&self, id: &str) -> Option<usize> {
        self.index.get(id).copied()
    }
}

impl PartialEq for FiniteSet {
    fn eq(&self, other: &Self) -> bool {
        self.elements == other.elements
    }
}

impl Eq for FiniteSet {}

impl fmt::Debug for FiniteSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:?}", self.elements)
    }
}

pub type SetRef = Arc<FiniteSet>;

/// One element of a correspondence with its source and target indices.
#[derive(Clone, PartialEq, Eq, Debug, Hash)]
pub struct Span {
    pub id: String,
    pub s: usize,
    pub t: usize,
}

/// A correspondence `A ← X → B`.
#[derive(Clone, PartialEq, Eq)]
pub struct Correspondence {
    source: SetRef,
    target: SetRef,
    elements: Vec<Span>,
}

impl Correspondence {
    /// Build from element ids and source/target indices.
    pub fn from_spans(source: SetRef, target: SetRef, elements: Vec<Span>) -> Result<Self> {
        let mut seen = HashMap::with_capacity(elements.len());
        for e in &elements {
            if e.s >= source.len() || e.t >= target.len() {
                return Err(Error::Burnside(format!("element {:?} has endpoints outside its sets", e.id)));
            }
            if seen.insert(e.id.as_str(), ()).is_some() {
                return Err(Error::Burnside(format!("duplicate correspondence element {:?}", e.id)));
            }
        }
        Ok(Correspondence { source, target, elements })
    }

    /// Build from `(id, s, t)` names.
    pub fn from_named<I, S>(source: SetRef, target: SetRef, elements: I) -> Result<Self>
    where
        I: IntoIterator<Item = (S, S, S)>,
        S: AsRef<str>,
    {
        let mut spans = Vec::new();
        for (id, s, t) in elements {
            let (id, s, t) = (id.as_ref(), s.as_ref(), t.as_ref());
            let si = source
                .index_of(s)
                .ok_or_else(|| Error::Burnside(format!("element {id:?}: source {s:?} not in source set")))?;
            let ti = target
                .index_of(t)
                .ok_or_else(|| Error::Burnside(format!("element {id:?}: target {t:?} not in target set")))?;
            spans.push(Span { id: id.to_string(), s: si, t: ti });
        }
        Correspondence::from_spans(source, target, spans)
    }

    pub fn empty(source: SetRef, target: SetRef) -> Self {
        Correspondence { source, target, elements: Vec::new() }
    }

    pub fn identity(a: &SetRef) -> Self {
        let elements = (0..a.len()).map(|i| Span { id: a.get(i).to_string(), s: i, t: i }).collect();
        Correspondence { source: a.clone(), target: a.clone(), elements }
    }

    /// A set map `f: A → B` viewed as a correspondence with `s` the identity.
    pub fn from_set_map(a: &SetRef, b: &SetRef, f: &[usize]) -> Result<Self> {
        if f.len() != a.len() || f.iter().any(|&x| x >= b.len()) {
            return Err(Error::Burnside("set map does not fit its sets".into()));
        }
        let elements = f.iter().enumerate().map(|(i, &j)| Span { id: a.get(i).to_string(), s: i, t: j }).collect();
        Ok(Correspondence { source: a.clone(), target: b.clone(), elements })
    }

    pub fn source_set(&self) -> &SetRef {
        &self.source
    }

    pub fn target_set(&self) -> &SetRef {
        &self.target
    }

    pub fn elements(&self) -> &[Span] {
        &self.elements
    }

    pub fn len(&self) -> usize {
        self.elements.len()
    }

    pub fn is_empty(&self) -> bool {
        self.elements.is_empty()
    }

    pub fn index_of(&self, id: &str) -> Option<usize> {
        self.elements.iter().position(|e| e.id == id)
    }

    /// Swap source and target of every element.
    pub fn transpose(&self) -> Self {
        let elements = self.elements.iter().map(|e| Span { id: e.id.clone(), s: e.t, t: e.s }).collect();
        Correspondence { source: self.target.clone(), target: self.source.clone(), elements }
    }

    /// Keep the elements whose endpoints survive, reindexed into the new sets.
    pub fn restrict(&self, source: SetRef, src_map: &[Option<usize>], target: SetRef, tgt_map: &[Option<usize>]) -> Self {
        let elements = self
            .elements
            .iter()
            .filter_map(|e| match (src_map[e.s], tgt_map[e.t]) {
                (Some(s), Some(t)) => Some(Span { id: e.id.clone(), s, t }),
                _ => None,
            })
            .collect();
        Correspondence { source, target, elements }
    }

    pub fn linearize(&self) -> IntegerMatrix {
        linearize(self)
    }

    pub fn to_json(&self) -> CorrespondenceJson {
        CorrespondenceJson {
            source: self.source.elements().to_vec(),
            target: self.target.elements().to_vec(),
            elements: self.elements_json(),
        }
    }

    pub(crate) fn elements_json(&self) -> Vec<SpanJson> {
        self.elements
            .iter()
            .map(|e| SpanJson { id: e.id.clone(), s: self.source.get(e.s).to_string(), t: self.target.get(e.t).to_string() })
            .collect()
    }

    pub fn from_json(j: &CorrespondenceJson) -> Result<Self> {
        let source = Arc::new(FiniteSet::new(j.source.iter().cloned())?);
        let target = Arc::new(FiniteSet::new(j.target.iter().cloned())?);
        Correspondence::from_named(source, target, j.elements.iter().map(|e| (&e.id, &e.s, &e.t)))
    }
}

impl fmt::Debug for Correspondence {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let es: Vec<String> = self
            .elements
            .iter()
            .map(|e| format!("{}:{}->{}", e.id, self.source.get(e.s), self.target.get(e.t)))
            .collect();
        write!(f, "{:?} <- [{}] -> {:?}", self.source, es.join(", "), self.target)
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SpanJson {
    pub id: String,
    pub s: String,
    pub t: String,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CorrespondenceJson {
    pub source: Vec<String>,
    pub target: Vec<String>,
    pub elements: Vec<SpanJson>,
}

pub fn identity_correspondence(a: &SetRef) -> Correspondence {
    Correspondence::identity(a)
}

/// Fiber product `Y ×_B X`. Elements are ordered lexicographically in
/// `(y, x)` and their ids are flattened as `y∘x`.
pub fn compose(y: &Correspondence, x: &Correspondence) -> Result<Correspondence> {
    if !Arc::ptr_eq(&x.target, &y.source) && *x.target != *y.source {
        return Err(Error::Burnside("composition across different middle sets".into()));
    }
    let mut by_target: Vec<Vec<usize>> = vec![Vec::new(); x.target.len()];
    for (i, e) in x.elements.iter().enumerate() {
        by_target[e.t].push(i);
    }
    let mut elements = Vec::new();
    for ey in &y.elements {
        for &xi in &by_target[ey.s] {
            let ex = &x.elements[xi];
            elements.push(Span { id: format!("{}{COMPOSE_SEP}{}", ey.id, ex.id), s: ex.s, t: ey.t });
        }
    }
    Ok(Correspondence { source: x.source.clone(), target: y.target.clone(), elements })
}

/// Whether `f` (indices into `y`'s elements) is a bijection commuting with
/// source and target maps.
pub fn is_two_morphism(f: &[usize], x: &Correspondence, y: &Correspondence) -> bool {
    if f.len() != x.len() || x.len() != y.len() || *x.source != *y.source || *x.target != *y.target {
        return false;
    }
    let mut hit = vec![false; y.len()];
    for (i, &j) in f.iter().enumerate() {
        if j >= y.len() || hit[j] {
            return false;
        }
        hit[j] = true;
        let (a, b) = (&x.elements[i], &y.elements[j]);
        if a.s != b.s || a.t != b.t {
            return false;
        }
    }
    true
}

/// Entry `[b][a]` is `|s⁻¹(a) ∩ t⁻¹(b)|`.
pub fn linearize(x: &Correspondence) -> IntegerMatrix {
    let mut m = IntegerMatrix::zeros(x.target.len(), x.source.len());
    for e in &x.elements {
        m.add_to(e.t, e.s, 1);
    }
    m
}

/// A 2-morphism between two correspondences with the same endpoints.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct BijectionOver {
    from: Correspondence,
    to: Correspondence,
    map: Vec<usize>,
}

impl BijectionOver {
    pub fn new(from: Correspondence, to: Correspondence, map: Vec<usize>) -> Result<Self> {
        if !is_two_morphism(&map, &from, &to) {
            return Err(Error::Burnside("map is not a bijection preserving source and target".into()));
        }
        Ok(BijectionOver { from, to, map })
    }

    pub fn identity(x: Correspondence) -> Self {
        let map = (0..x.len()).collect();
        BijectionOver { from: x.clone(), to: x, map }
    }

    pub fn from(&self) -> &Correspondence {
        &self.from
    }

    pub fn to(&self) -> &Correspondence {
        &self.to
    }

    pub fn map(&self) -> &[usize] {
        &self.map
    }

    pub fn inverse(&self) -> Self {
        let mut inv = vec![0; self.map.len()];
        for (i, &j) in self.map.iter().enumerate() {
            inv[j] = i;
        }
        BijectionOver { from: self.to.clone(), to: self.from.clone(), map: inv }
    }

    /// `other ∘ self`.
    pub fn then(&self, other: &BijectionOver) -> Result<Self> {
        if self.to != other.from {
            return Err(Error::Burnside("bijections do not compose".into()));
        }
        let map = self.map.iter().map(|&j| other.map[j]).collect();
        Ok(BijectionOver { from: self.from.clone(), to: other.to.clone(), map })
    }

    /// The map as pairs of element ids.
    pub fn id_pairs(&self) -> Vec<(String, String)> {
        self.map
            .iter()
            .enumerate()
            .map(|(i, &j)| (self.from.elements[i].id.clone(), self.to.elements[j].id.clone()))
            .collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn set(xs: &[&str]) -> SetRef {
        Arc::new(FiniteSet::new(xs.iter().copied()).unwrap())
    }

    #[test]
    fn identity_examples() {
        assert!(identity_correspondence(&set(&[])).is_empty());
        let ab = identity_correspondence(&set(&["a", "b"]));
        assert_eq!(ab.len(), 2);
        assert_eq!(linearize(&ab), IntegerMatrix::identity(2));
    }

    #[test]
    fn compose_example() {
        let a = set(&["a"]);
        let b = set(&["b1", "b2"]);
        let c = set(&["c"]);
        let x = Correspondence::from_named(a.clone(), b.clone(), [("p1", "a", "b1"), ("p2", "a", "b2")]).unwrap();
        let y = Correspondence::from_named(b.clone(), c.clone(), [("q1", "b1", "c"), ("q2", "b2", "c")]).unwrap();
        let yx = compose(&y, &x).unwrap();
        let ids: Vec<&str> = yx.elements().iter().map(|e| e.id.as_str()).collect();
        assert_eq!(ids, vec!["q1∘p1", "q2∘p2"]);
        assert!(yx.elements().iter().all(|e| e.s == 0 && e.t == 0));
        let empty = Correspondence::empty(a.clone(), b.clone());
        assert!(compose(&y, &empty).unwrap().is_empty());
        let unit = compose(&identity_correspondence(&b), &x).unwrap();
        assert!(is_two_morphism(&[0, 1], &unit, &x));
        assert!(compose(&x, &x).is_err());
    }

    #[test]
    fn two_morphism_examples() {
        let a = set(&["a"]);
        let b = set(&["b"]);
        let par = Correspondence::from_named(a.clone(), b.clone(), [("x", "a", "b"), ("y", "a", "b")]).unwrap();
        assert!(is_two_morphism(&[0, 1], &par, &par));
        assert!(is_two_morphism(&[1, 0], &par, &par));
        let b2 = set(&["b1", "b2"]);
        let div = Correspondence::from_named(a, b2, [("x", "a", "b1"), ("y", "a", "b2")]).unwrap();
        assert!(!is_two_morphism(&[1, 0], &div, &div));
    }

    #[test]
    fn linearize_examples() {
        let a = set(&["a"]);
        let b = set(&["b1", "b2"]);
        let x = Correspondence::from_named(a, b, [("p1", "a", "b1"), ("p2", "a", "b2")]).unwrap();
        assert_eq!(linearize(&x), IntegerMatrix::from_rows(&[vec![1], vec![1]]));
        let e = set(&["e"]);
        let f = set(&["f"]);
        let par = Correspondence::from_named(e, f, [("x", "e", "f"), ("y", "e", "f")]).unwrap();
        assert_eq!(linearize(&par), IntegerMatrix::from_rows(&[vec![2]]));
    }

    #[test]
    fn duplicates_rejected() {
        assert!(FiniteSet::new(["a", "a"]).is_err());
        let a = set(&["a"]);
        assert!(Correspondence::from_named(a.clone(), a, [("x", "a", "a"), ("x", "a", "a")]).is_err());
    }

    #[test]
    fn json_round_trip() {
        let a = set(&["a"]);
        let b = set(&["b1", "b2"]);
        let x = Correspondence::from_named(a, b, [("p1", "a", "b1"), ("p2", "a", "b2")]).unwrap();
        let s = serde_json::to_string(&x.to_json()).unwrap();
        let back: CorrespondenceJson = serde_json::from_str(&s).unwrap();
        assert_eq!(Correspondence::from_json(&back).unwrap(), x);
    }
}
