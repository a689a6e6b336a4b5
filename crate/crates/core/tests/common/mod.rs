#![allow(dead_code)]

pub mod oracle;
pub mod random;

use std::path::{Path, PathBuf};

use khcube::functor::{CubeFunctor, FunctorJson, StableFunctor};
use khcube::khovanov::{parse_pd, KhRow, PdCode};
use khcube::simplicial::DeltaComplex;

pub fn corpus() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../../corpus")
}

pub fn load_pd(name: &str) -> PdCode {
    let dir = corpus().join("pd");
    let path = ["pd", "json"].iter().map(|e| dir.join(format!("{name}.{e}"))).find(|p| p.exists());
    let path = path.unwrap_or_else(|| panic!("no diagram {name}"));
    parse_pd(&std::fs::read_to_string(path).unwrap()).unwrap()
}

/// Every diagram in the corpus, sorted by name.
pub fn pd_corpus() -> Vec<(String, PdCode)> {
    let mut names: Vec<String> = std::fs::read_dir(corpus().join("pd"))
        .unwrap()
        .map(|e| e.unwrap().path())
        .filter(|p| matches!(p.extension().and_then(|e| e.to_str()), Some("pd" | "json")))
        .map(|p| p.file_stem().unwrap().to_string_lossy().into_owned())
        .collect();
    names.sort();
    names.into_iter().map(|n| (n.clone(), load_pd(&n))).collect()
}

pub fn load_stable(name: &str) -> StableFunctor {
    FunctorJson::load(&corpus().join("functors").join(format!("{name}.json"))).unwrap().to_stable().unwrap()
}

pub fn load_functor(name: &str) -> CubeFunctor {
    load_stable(name).functor
}

pub fn load_delta(name: &str) -> DeltaComplex {
    DeltaComplex::load(&corpus().join("delta").join(format!("{name}.json"))).unwrap()
}

/// Oracle rows in the library's row type.
pub fn oracle_rows(pd: &PdCode, basepoint: Option<u32>) -> Vec<KhRow> {
    oracle::khovanov(pd.crossings(), pd.free_loops(), basepoint)
        .into_iter()
        .map(|r| KhRow { i: r.i, j: r.j, rank: r.rank, torsion: r.torsion })
        .collect()
}

#[derive(serde::Serialize, serde::Deserialize, PartialEq, Eq, Debug)]
pub struct Golden {
    pub schema_version: u32,
    pub rows: Vec<KhRow>,
}

pub fn golden_path(name: &str, reduced: bool) -> PathBuf {
    let file = if reduced { format!("{name}_reduced.json") } else { format!("{name}.json") };
    corpus().join("golden/kh").join(file)
}

pub fn load_golden(name: &str, reduced: bool) -> Option<Vec<KhRow>> {
    let text = std::fs::read_to_string(golden_path(name, reduced)).ok()?;
    let g: Golden = serde_json::from_str(&text).unwrap();
    Some(g.rows)
}
