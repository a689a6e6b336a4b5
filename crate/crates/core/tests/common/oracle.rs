//! Khovanov cohomology straight from the cube of resolutions: union-find
//! circles, the m/Δ tables of Z[X]/(X²), the standard cube signs and a
//! small integer elimination. Shares no code with the Burnside pipeline.

use std::collections::{BTreeMap, HashMap};

#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub struct Row {
    pub i: i64,
    pub j: i64,
    pub rank: usize,
    pub torsion: Vec<u64>,
}

/// Which over-slot (1 or 3) is incoming at each crossing, found by walking
/// each component from an under-crossing.
pub fn incoming_over(crossings: &[[u32; 4]]) -> Vec<u8> {
    let mut at: HashMap<u32, Vec<(usize, usize)>> = HashMap::new();
    for (x, c) in crossings.iter().enumerate() {
        for (s, &l) in c.iter().enumerate() {
            at.entry(l).or_default().push((x, s));
        }
    }
    let other = |l: u32, here: (usize, usize)| -> (usize, usize) {
        let v = &at[&l];
        if v[0] == here { v[1] } else { v[0] }
    };
    let mut over: Vec<Option<u8>> = vec![None; crossings.len()];
    let mut walked = vec![false; crossings.len() * 4];
    loop {
        // Start at any unwalked under-entry, else fall back to the numbering
        // rule on a crossing of an over-only component.
        let start = (0..crossings.len()).find(|&x| !walked[x * 4]).map(|x| (x, 0usize));
        let (mut x, mut s) = match start {
            Some(p) => p,
            None => {
                let Some(x) = over.iter().position(|o| o.is_none()) else { break };
                let [_, b, _, d] = crossings[x];
                let b_in = if d == b + 1 { true } else if b == d + 1 { false } else { b > d };
                let s = if b_in { 1 } else { 3 };
                over[x] = Some(s as u8);
                (x, s)
            }
        };
        let first = (x, s);
        loop {
            walked[x * 4 + s] = true;
            if s % 2 == 1 {
                over[x] = Some(s as u8);
            }
            let out = (s + 2) % 4;
            walked[x * 4 + out] = true;
            let (nx, ns) = other(crossings[x][out], (x, out));
            x = nx;
            s = ns;
            if (x, s) == first {
                break;
            }
        }
    }
    over.into_iter().map(|o| o.unwrap()).collect()
}

struct Circles {
    count: usize,
    of_arc: HashMap<u32, usize>,
}

fn circles(crossings: &[[u32; 4]], loops: &[u32], v: u32) -> Circles {
    let mut labels: Vec<u32> = crossings.iter().flatten().copied().collect();
    labels.sort_unstable();
    labels.dedup();
    let pos: HashMap<u32, usize> = labels.iter().enumerate().map(|(i, &l)| (l, i)).collect();
    let mut parent: Vec<usize> = (0..labels.len()).collect();
    fn find(p: &mut Vec<usize>, x: usize) -> usize {
        let mut r = x;
        while p[r] != r {
            r = p[r];
        }
        let mut y = x;
        while p[y] != r {
            let n = p[y];
            p[y] = r;
            y = n;
        }
        r
    }
    for (k, &[a, b, c, d]) in crossings.iter().enumerate() {
        let pairs = if v >> k & 1 == 0 { [(a, d), (b, c)] } else { [(a, b), (c, d)] };
        for (p, q) in pairs {
            let (rp, rq) = (find(&mut parent, pos[&p]), find(&mut parent, pos[&q]));
            parent[rp] = rq;
        }
    }
    let mut root_id: HashMap<usize, usize> = HashMap::new();
    let mut of_arc = HashMap::new();
    for &l in &labels {
        let r = find(&mut parent, pos[&l]);
        let n = root_id.len();
        let id = *root_id.entry(r).or_insert(n);
        of_arc.insert(l, id);
    }
    let mut count = root_id.len();
    for &l in loops {
        of_arc.insert(l, count);
        count += 1;
    }
    Circles { count, of_arc }
}

/// Khovanov cohomology, optionally reduced at a basepoint arc.
pub fn khovanov(crossings: &[[u32; 4]], free_loops: usize, basepoint: Option<u32>) -> Vec<Row> {
    let n = crossings.len();
    let over = incoming_over(crossings);
    let n_plus = over.iter().filter(|&&o| o == 1).count() as i64;
    let n_minus = n as i64 - n_plus;
    let max = crossings.iter().flatten().copied().max().unwrap_or(0);
    let loops: Vec<u32> = (1..=free_loops as u32).map(|k| max + k).collect();
    let res: Vec<Circles> = (0..1u32 << n).map(|v| circles(crossings, &loops, v)).collect();

    // Generators (v, labeling) kept by the basepoint condition.
    let keep = |v: u32, lab: u32| match basepoint {
        None => true,
        Some(p) => lab >> res[v as usize].of_arc[&p] & 1 == 0,
    };
    let mut index: HashMap<(u32, u32), usize> = HashMap::new();
    let mut gens: Vec<(u32, u32, i64, i64)> = Vec::new(); // v, labels, i, j
    for v in 0..1u32 << n {
        let k = res[v as usize].count;
        for lab in 0..1u32 << k {
            if !keep(v, lab) {
                continue;
            }
            let plus = lab.count_ones() as i64;
            let mut j = n_plus - 2 * n_minus + v.count_ones() as i64 + plus - (k as i64 - plus);
            if basepoint.is_some() {
                j += 1;
            }
            index.insert((v, lab), gens.len());
            gens.push((v, lab, v.count_ones() as i64 - n_minus, j));
        }
    }

    // d(y) for every generator, as (target, coefficient).
    let mut entries: Vec<(usize, usize, i64)> = Vec::new();
    for (col, &(v, y, _, _)) in gens.iter().enumerate() {
        for k in 0..n {
            if v >> k & 1 == 1 {
                continue;
            }
            let u = v | 1 << k;
            let sign = if (v & ((1 << k) - 1)).count_ones() % 2 == 0 { 1 } else { -1 };
            let (cv, cu) = (&res[v as usize], &res[u as usize]);
            let touch_v: Vec<usize> = dedup(crossings[k].iter().map(|l| cv.of_arc[l]).collect());
            let touch_u: Vec<usize> = dedup(crossings[k].iter().map(|l| cu.of_arc[l]).collect());
            let mut base = 0u32;
            for (&l, &c) in &cv.of_arc {
                if !touch_v.contains(&c) {
                    base |= (y >> c & 1) << cu.of_arc[&l];
                }
            }
            let bit = |c: usize| y >> c & 1 == 1;
            let targets: Vec<u32> = if touch_v.len() == 2 {
                let z = touch_u[0];
                match (bit(touch_v[0]), bit(touch_v[1])) {
                    (true, true) => vec![base | 1 << z],
                    (false, false) => vec![],
                    _ => vec![base],
                }
            } else if bit(touch_v[0]) {
                vec![base | 1 << touch_u[0], base | 1 << touch_u[1]]
            } else {
                vec![base]
            };
            for x in targets {
                if let Some(&row) = index.get(&(u, x)) {
                    entries.push((row, col, sign));
                }
            }
        }
    }

    // Split by (i, j) and compute cohomology.
    let mut by_bideg: BTreeMap<(i64, i64), Vec<usize>> = BTreeMap::new();
    for (g, &(_, _, i, j)) in gens.iter().enumerate() {
        by_bideg.entry((j, i)).or_default().push(g);
    }
    let pos: HashMap<usize, usize> =
        by_bideg.values().flat_map(|gs| gs.iter().enumerate().map(|(p, &g)| (g, p))).collect();
    let matrix = |j: i64, i: i64| -> Vec<Vec<i128>> {
        // d: C^{i,j} → C^{i+1,j}
        let src = by_bideg.get(&(j, i)).map_or(0, Vec::len);
        let dst = by_bideg.get(&(j, i + 1)).map_or(0, Vec::len);
        let mut m = vec![vec![0i128; src]; dst];
        for &(r, c, s) in &entries {
            if gens[c].3 == j && gens[c].2 == i {
                m[pos[&r]][pos[&c]] += s as i128;
            }
        }
        m
    };
    let mut rows = Vec::new();
    for (&(j, i), gs) in &by_bideg {
        let out = invariant_factors(matrix(j, i));
        let inc = invariant_factors(matrix(j, i - 1));
        let rank = gs.len() - out.len() - inc.len();
        let torsion: Vec<u64> = inc.iter().filter(|&&d| d > 1).map(|&d| d as u64).collect();
        if rank > 0 || !torsion.is_empty() {
            rows.push(Row { i, j, rank, torsion });
        }
    }
    rows
}

fn dedup(mut v: Vec<usize>) -> Vec<usize> {
    v.sort_unstable();
    v.dedup();
    v
}

/// Coefficients folding `b` into the pivot `a`: plain elimination when `a`
/// already divides `b`, so the pivot's other line is left untouched.
fn fold(a: i128, b: i128) -> (i128, i128, i128) {
    if b % a == 0 { (a, 1, 0) } else { ext_gcd(a, b) }
}

fn ext_gcd(a: i128, b: i128) -> (i128, i128, i128) {
    if b == 0 {
        if a < 0 { (-a, -1, 0) } else { (a, 1, 0) }
    } else {
        let (g, x, y) = ext_gcd(b, a % b);
        (g, y, x - (a / b) * y)
    }
}

/// Nonzero invariant factors, by gcd-combining rows and columns into the
/// pivot until it divides everything below and to the right.
pub fn invariant_factors(mut m: Vec<Vec<i128>>) -> Vec<i128> {
    let rows = m.len();
    let cols = m.first().map_or(0, Vec::len);
    let mut out = Vec::new();
    let mut t = 0;
    while t < rows.min(cols) {
        let Some((pr, pc)) = (t..rows).flat_map(|r| (t..cols).map(move |c| (r, c))).find(|&(r, c)| m[r][c] != 0) else {
            break;
        };
        m.swap(t, pr);
        for r in m.iter_mut() {
            r.swap(t, pc);
        }
        loop {
            // Column t: fold each entry into the pivot with a unimodular 2×2 step.
            for r in t + 1..rows {
                if m[r][t] != 0 {
                    let (a, b) = (m[t][t], m[r][t]);
                    let (g, x, y) = fold(a, b);
                    let (p, q) = (a / g, b / g);
                    for c in 0..cols {
                        let (u, w) = (m[t][c], m[r][c]);
                        m[t][c] = x * u + y * w;
                        m[r][c] = -q * u + p * w;
                    }
                }
            }
            let mut dirty = false;
            for c in t + 1..cols {
                if m[t][c] != 0 {
                    let (a, b) = (m[t][t], m[t][c]);
                    let (g, x, y) = fold(a, b);
                    let (p, q) = (a / g, b / g);
                    for row in m.iter_mut() {
                        let (u, w) = (row[t], row[c]);
                        row[t] = x * u + y * w;
                        row[c] = -q * u + p * w;
                    }
                    dirty = true;
                }
            }
            if dirty && (t + 1..rows).any(|r| m[r][t] != 0) {
                continue;
            }
            let p = m[t][t];
            let bad = (t + 1..rows).find(|&r| (t + 1..cols).any(|c| m[r][c] % p != 0));
            match bad {
                Some(r) => {
                    for c in 0..cols {
                        m[t][c] += m[r][c];
                    }
                }
                None => break,
            }
        }
        out.push(m[t][t].abs());
        t += 1;
    }
    out
}
