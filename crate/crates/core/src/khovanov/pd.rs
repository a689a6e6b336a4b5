use std::collections::{BTreeMap, BTreeSet};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// A planar diagram code. Each crossing lists its four arc labels
/// counterclockwise starting from the incoming under-strand.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PdCode {
    crossings: Vec<[u32; 4]>,
    free_loops: usize,
    /// Slot (1 or 3) of the incoming over-strand at each crossing.
    over_in: Vec<u8>,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct PdJson {
    pub crossings: Vec<[u32; 4]>,
    #[serde(default)]
    pub free_loops: usize,
}

impl PdCode {
    pub fn new(crossings: Vec<[u32; 4]>, free_loops: usize) -> Result<Self> {
        let mut count: BTreeMap<u32, usize> = BTreeMap::new();
        for c in &crossings {
            for &l in c {
                *count.entry(l).or_insert(0) += 1;
            }
        }
        if let Some((l, k)) = count.iter().find(|(_, &k)| k != 2) {
            return Err(Error::Parse(format!("arc label {l} occurs {k} times, expected 2")));
        }
        check_planar(&crossings)?;
        let over_in = orient(&crossings)?;
        let pd = PdCode { crossings, free_loops, over_in };
        pd.check_consecutive()?;
        Ok(pd)
    }

    pub fn crossings(&self) -> &[[u32; 4]] {
        &self.crossings
    }

    pub fn free_loops(&self) -> usize {
        self.free_loops
    }

    pub fn len(&self) -> usize {
        self.crossings.len()
    }

    pub fn is_empty(&self) -> bool {
        self.crossings.is_empty()
    }

    pub fn over_in(&self, c: usize) -> u8 {
        self.over_in[c]
    }

    /// Largest arc label on a crossing, or 0.
    pub fn max_label(&self) -> u32 {
        self.crossings.iter().flatten().copied().max().unwrap_or(0)
    }

    /// Labels given to the free loops: `max_label + 1`, ….
    pub fn loop_labels(&self) -> Vec<u32> {
        (1..=self.free_loops as u32).map(|k| self.max_label() + k).collect()
    }

    /// Every arc label, free loops included.
    pub fn arc_labels(&self) -> BTreeSet<u32> {
        let mut s: BTreeSet<u32> = self.crossings.iter().flatten().copied().collect();
        s.extend(self.loop_labels());
        s
    }

    /// The two `(crossing, slot)` occurrences of an arc label.
    pub(crate) fn occurrences(&self) -> BTreeMap<u32, Vec<(usize, u8)>> {
        occurrences(&self.crossings)
    }

    /// Positive when the incoming over-strand sits in slot 1.
    pub fn is_positive(&self, c: usize) -> bool {
        self.over_in[c] == 1
    }

    /// Components as cyclic arc sequences in the direction of orientation.
    pub fn components(&self) -> Vec<Vec<u32>> {
        let occ = self.occurrences();
        let mut seen = BTreeSet::new();
        let mut out = Vec::new();
        for &start in occ.keys() {
            if seen.contains(&start) {
                continue;
            }
            let mut comp = Vec::new();
            let mut arc = start;
            loop {
                seen.insert(arc);
                comp.push(arc);
                let (c, s) = self.head_of(&occ, arc);
                arc = self.crossings[c][((s + 2) % 4) as usize];
                if arc == start {
                    break;
                }
            }
            out.push(comp);
        }
        for l in self.loop_labels() {
            out.push(vec![l]);
        }
        out
    }

    /// The occurrence where `arc` arrives.
    fn head_of(&self, occ: &BTreeMap<u32, Vec<(usize, u8)>>, arc: u32) -> (usize, u8) {
        *occ[&arc].iter().find(|&&(c, s)| is_head(s, self.over_in[c])).expect("oriented arc has a head")
    }

    fn check_consecutive(&self) -> Result<()> {
        for comp in self.components() {
            let min = *comp.iter().min().unwrap();
            let k = comp.iter().position(|&l| l == min).unwrap();
            let rotated: Vec<u32> = comp[k..].iter().chain(&comp[..k]).copied().collect();
            let ok = rotated.iter().enumerate().all(|(i, &l)| l == min + i as u32);
            // A component may also be numbered against its orientation.
            let rev_ok = {
                let mut r = rotated[1..].to_vec();
                r.reverse();
                r.insert(0, rotated[0]);
                r.iter().enumerate().all(|(i, &l)| l == min + i as u32)
            };
            if !ok && !rev_ok {
                return Err(Error::Parse(format!("arc labels {comp:?} are not consecutive along their component")));
            }
        }
        Ok(())
    }

    /// `(n₊, n₋)`.
    pub fn crossing_signs(&self) -> (usize, usize) {
        let p = (0..self.len()).filter(|&c| self.is_positive(c)).count();
        (p, self.len() - p)
    }

    /// The diagram with every crossing switched.
    pub fn mirror(&self) -> PdCode {
        let crossings = self
            .crossings
            .iter()
            .zip(&self.over_in)
            .map(|(&[a, b, c, d], &o)| if o == 1 { [b, c, d, a] } else { [d, a, b, c] })
            .collect();
        PdCode::new(crossings, self.free_loops).expect("mirror of a valid diagram")
    }

    /// Crossings of `other` relabelled above this diagram's labels.
    pub fn disjoint_union(&self, other: &PdCode) -> PdCode {
        let off = self.max_label();
        let mut crossings = self.crossings.clone();
        crossings.extend(other.crossings.iter().map(|c| c.map(|l| l + off)));
        PdCode::new(crossings, self.free_loops + other.free_loops).expect("union of valid diagrams")
    }

    /// Connected sum at arcs `p` of `self` and `q` of `other`; the arcs are
    /// renumbered consecutively along components. Returns the new diagram
    /// and the label of an arc at the join.
    pub fn connect_sum(&self, p: u32, other: &PdCode, q: u32) -> Result<(PdCode, u32)> {
        for (pd, l) in [(self, p), (other, q)] {
            if !pd.arc_labels().contains(&l) {
                return Err(Error::Parse(format!("no arc labelled {l}")));
            }
        }
        // Summing with a free loop removes that loop.
        if other.loop_labels().contains(&q) {
            let mut out = self.clone();
            out.free_loops += other.free_loops - 1;
            let rest = other.without_loops();
            let merged = out.disjoint_union(&rest);
            return Ok((merged, p));
        }
        if self.loop_labels().contains(&p) {
            return other.connect_sum(q, self, p);
        }
        let mut crossings = self.crossings.clone();
        crossings.extend(other.crossings.iter().map(|c| c.map(|l| l + self.max_label())));
        let fresh = self.max_label() + other.max_label() + 1;
        let q = q + self.max_label();
        let occ = occurrences(&crossings);
        let over_in: Vec<u8> = self.over_in.iter().chain(&other.over_in).copied().collect();
        let head = |l: u32| *occ[&l].iter().find(|&&(c, s)| is_head(s, over_in[c])).unwrap();
        // p now runs tail(p) → head(q); a fresh arc runs tail(q) → head(p).
        let (hp, hq) = (head(p), head(q));
        crossings[hp.0][hp.1 as usize] = fresh;
        crossings[hq.0][hq.1 as usize] = p;
        for (c, s) in occ[&q].iter().copied() {
            if (c, s) != hq {
                crossings[c][s as usize] = fresh;
            }
        }
        let joined = PdCode::from_oriented(crossings, self.free_loops + other.free_loops, over_in)?;
        joined.renumbered(p)
    }

    fn without_loops(&self) -> PdCode {
        PdCode { free_loops: 0, ..self.clone() }
    }

    fn from_oriented(crossings: Vec<[u32; 4]>, free_loops: usize, over_in: Vec<u8>) -> Result<PdCode> {
        Ok(PdCode { crossings, free_loops, over_in })
    }

    /// Relabel arcs `1, 2, …` consecutively along each oriented component,
    /// returning the new label of `mark`.
    fn renumbered(&self, mark: u32) -> Result<(PdCode, u32)> {
        let mut map = BTreeMap::new();
        let mut next = 1;
        for comp in self.components() {
            if comp.len() == 1 && self.loop_labels().contains(&comp[0]) {
                continue;
            }
            for l in comp {
                map.insert(l, next);
                next += 1;
            }
        }
        let crossings = self.crossings.iter().map(|c| c.map(|l| map[&l])).collect();
        let pd = PdCode::new(crossings, self.free_loops)?;
        let new_mark = map.get(&mark).copied().unwrap_or(mark);
        Ok((pd, new_mark))
    }

    /// `PD[X(a,b,c,d),…]` form; free loops are written `Loop[k]`.
    pub fn to_text(&self) -> String {
        let mut parts: Vec<String> =
            self.crossings.iter().map(|[a, b, c, d]| format!("X({a},{b},{c},{d})")).collect();
        if self.free_loops > 0 {
            parts.push(format!("Loop[{}]", self.free_loops));
        }
        format!("PD[{}]", parts.join(","))
    }

    pub fn to_json(&self) -> PdJson {
        PdJson { crossings: self.crossings.clone(), free_loops: self.free_loops }
    }
}

/// Euler count of the diagram graph: tracing faces by turning to the next
/// slot counterclockwise must give `n + 2` faces per connected piece.
fn check_planar(crossings: &[[u32; 4]]) -> Result<()> {
    let occ = occurrences(crossings);
    let other = |c: usize, s: u8| {
        let e = &occ[&crossings[c][s as usize]];
        if e[0] == (c, s) { e[1] } else { e[0] }
    };
    let n = crossings.len();
    let mut seen = vec![false; 4 * n];
    let mut faces = 0;
    for start in 0..4 * n {
        if seen[start] {
            continue;
        }
        faces += 1;
        let mut cur = start;
        while !seen[cur] {
            seen[cur] = true;
            let (c, s) = other(cur / 4, (cur % 4) as u8);
            cur = 4 * c + (s as usize + 1) % 4;
        }
    }
    let mut piece: Vec<usize> = (0..n).collect();
    fn root(p: &mut [usize], mut x: usize) -> usize {
        while p[x] != x {
            p[x] = p[p[x]];
            x = p[x];
        }
        x
    }
    for ends in occ.values() {
        let (a, b) = (root(&mut piece, ends[0].0), root(&mut piece, ends[1].0));
        piece[a] = b;
    }
    let pieces = (0..n).filter(|&x| root(&mut piece, x) == x).count();
    if faces != n + 2 * pieces {
        return Err(Error::Parse("diagram is not planar".into()));
    }
    Ok(())
}

fn occurrences(crossings: &[[u32; 4]]) -> BTreeMap<u32, Vec<(usize, u8)>> {
    let mut occ: BTreeMap<u32, Vec<(usize, u8)>> = BTreeMap::new();
    for (c, x) in crossings.iter().enumerate() {
        for (s, &l) in x.iter().enumerate() {
            occ.entry(l).or_default().push((c, s as u8));
        }
    }
    occ
}

/// Whether the arc at `slot` arrives at its crossing.
fn is_head(slot: u8, over_in: u8) -> bool {
    slot == 0 || slot == over_in
}

/// Determine the incoming over-slot of every crossing. The under-strand
/// fixes slots 0 (in) and 2 (out); every arc has one head and one tail, so
/// roles propagate along arcs. Crossings not reached that way take the
/// numbering rule `d = b + 1 ⇒ b incoming`.
fn orient(crossings: &[[u32; 4]]) -> Result<Vec<u8>> {
    let occ = occurrences(crossings);
    let mut over_in: Vec<Option<u8>> = vec![None; crossings.len()];
    let role = |over_in: &[Option<u8>], c: usize, s: u8| -> Option<bool> {
        match s {
            0 => Some(true),
            2 => Some(false),
            _ => over_in[c].map(|o| o == s),
        }
    };
    loop {
        let mut changed = true;
        while changed {
            changed = false;
            for ends in occ.values() {
                let (p, q) = (ends[0], ends[1]);
                for (x, y) in [(p, q), (q, p)] {
                    if let (Some(r), None) = (role(&over_in, x.0, x.1), role(&over_in, y.0, y.1)) {
                        // y must have the opposite role.
                        let slot_in = if !r { y.1 } else { 4 - y.1 };
                        over_in[y.0] = Some(slot_in);
                        changed = true;
                    }
                }
            }
        }
        let Some(c) = over_in.iter().position(|o| o.is_none()) else { break };
        let [_, b, _, d] = crossings[c];
        let b_in = if d == b + 1 {
            true
        } else if b == d + 1 {
            false
        } else {
            b > d
        };
        over_in[c] = Some(if b_in { 1 } else { 3 });
    }
    let over_in: Vec<u8> = over_in.into_iter().map(|o| o.unwrap()).collect();
    for (l, ends) in &occ {
        let h = ends.iter().filter(|&&(c, s)| is_head(s, over_in[c])).count();
        if h != 1 {
            return Err(Error::Parse(format!("arc {l} cannot be oriented consistently")));
        }
    }
    Ok(over_in)
}

/// Parse `PD[X(…),…]` (with optional `Loop[k]` entries) or the JSON form
/// `{"crossings": [[a,b,c,d],…], "free_loops": k}`.
pub fn parse_pd(text: &str) -> Result<PdCode> {
    let t = text.trim();
    if t.starts_with('{') {
        let j: PdJson = serde_json::from_str(t)?;
        return PdCode::new(j.crossings, j.free_loops);
    }
    let bad = |m: &str| Error::Parse(format!("{m} in {t:?}"));
    let body = t
        .strip_prefix("PD[")
        .and_then(|r| r.strip_suffix(']'))
        .ok_or_else(|| bad("expected PD[...]"))?;
    let mut crossings = Vec::new();
    let mut loops = 0;
    let mut rest = body.trim();
    while !rest.is_empty() {
        if let Some(r) = rest.strip_prefix("X(") {
            let end = r.find(')').ok_or_else(|| bad("unclosed X("))?;
            let nums: Vec<u32> = r[..end]
                .split(',')
                .map(|x| x.trim().parse::<u32>().map_err(|_| bad("bad arc label")))
                .collect::<Result<_>>()?;
            let arr: [u32; 4] = nums.try_into().map_err(|_| bad("crossing without four labels"))?;
            crossings.push(arr);
            rest = r[end + 1..].trim_start();
        } else if let Some(r) = rest.strip_prefix("Loop[") {
            let end = r.find(']').ok_or_else(|| bad("unclosed Loop["))?;
            loops += r[..end].trim().parse::<usize>().map_err(|_| bad("bad loop count"))?;
            rest = r[end + 1..].trim_start();
        } else {
            return Err(bad("unexpected token"));
        }
        rest = rest.strip_prefix(',').unwrap_or(rest).trim_start();
    }
    PdCode::new(crossings, loops)
}

pub fn crossing_signs(pd: &PdCode) -> (usize, usize) {
    pd.crossing_signs()
}

pub fn disjoint_union_pd(a: &PdCode, b: &PdCode) -> PdCode {
    a.disjoint_union(b)
}

pub fn connect_sum_pd(a: &PdCode, p: u32, b: &PdCode, q: u32) -> Result<(PdCode, u32)> {
    a.connect_sum(p, b, q)
}
