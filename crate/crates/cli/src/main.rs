//! `khcube`: Khovanov homology, cube functor checks, stable-equivalence
//! certificates and Δ-complex homology from the command line.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use khcube::cube::Face2;
use khcube::functor::{
    enumerate_matchings, find_natural_isomorphism, product, validate_c0, validate_coherence, verify_certificate,
    CertificateJson, CubeFunctor, FaceMaps, FunctorJson, SearchLimits,
};
use khcube::khovanov::{
    build_khovanov_functor, build_khovanov_functor_unvalidated, format_table, khovanov_homology, parse_pd,
    reduced_functor, KhRow, PdCode,
};
use khcube::simplicial::{delta_functor, simplicial_homology, DeltaComplex};
use khcube::totalization::{homology, tot, tot_functor, HomologyGroup};
use serde_json::{json, Value};

#[derive(Parser)]
#[command(name = "khcube", version, about = "Burnside functors on cubes and Khovanov homology")]
struct Cli {
    #[command(subcommand)]
    command: Command,
    /// Emit JSON instead of text.
    #[arg(long, global = true)]
    json: bool,
    /// Worker threads; 1 runs sequentially.
    #[arg(long, global = true, value_parser = clap::value_parser!(u32).range(1..))]
    jobs: Option<u32>,
}

#[derive(Subcommand)]
enum Command {
    /// Link diagrams given as PD codes.
    #[command(subcommand)]
    Kh(KhCommand),
    /// Functors given as JSON files.
    #[command(subcommand)]
    Functor(FunctorCommand),
    /// Δ-complexes given as JSON files.
    #[command(subcommand)]
    Delta(DeltaCommand),
    /// Worked examples from the fixture corpus.
    #[command(subcommand)]
    Examples(ExamplesCommand),
}

#[derive(Subcommand)]
enum KhCommand {
    /// Bigraded Khovanov homology.
    Homology {
        input: String,
        #[command(flatten)]
        reduced: Reduced,
    },
    /// Check C-0, coherence, ∂² = 0 and grading preservation.
    Verify { input: String },
}

#[derive(Args)]
struct Reduced {
    /// Use the reduced functor; needs --basepoint.
    #[arg(long, requires = "basepoint")]
    reduced: bool,
    /// Arc label carrying the basepoint.
    #[arg(long, requires = "reduced")]
    basepoint: Option<u32>,
}

#[derive(Subcommand)]
enum FunctorCommand {
    /// Check C-0, coherence and ∂² = 0.
    Check {
        input: String,
        /// Search for face matchings when some are missing.
        #[arg(long)]
        search: bool,
        #[command(flatten)]
        cap: Cap,
    },
    /// Enumerate every coherent choice of face matchings.
    SearchMatchings {
        input: String,
        #[command(flatten)]
        cap: Cap,
    },
    /// Verify a stable-equivalence certificate.
    Certificate { input: String },
}

#[derive(Args)]
struct Cap {
    /// Stop after this many matchings.
    #[arg(long, value_parser = clap::value_parser!(u64).range(1..))]
    max_search: Option<u64>,
}

impl Cap {
    fn limits(&self) -> SearchLimits {
        let mut l = SearchLimits::default();
        if let Some(k) = self.max_search {
            l.max_results = k as usize;
        }
        l
    }
}

#[derive(Subcommand)]
enum DeltaCommand {
    /// Homology through the cube functor and directly, compared.
    Homology { input: String },
}

#[derive(Subcommand)]
enum ExamplesCommand {
    /// Run every worked example and report each one.
    Run,
}

enum Failure {
    /// A check ran and failed.
    Verify(String),
    Lib(khcube::Error),
}

impl From<khcube::Error> for Failure {
    fn from(e: khcube::Error) -> Self {
        Failure::Lib(e)
    }
}

type Outcome = Result<(), Failure>;

fn corpus_dir() -> PathBuf {
    std::env::var_os("KH_CORPUS_DIR")
        .map(PathBuf::from)
        .unwrap_or_else(|| Path::new(env!("CARGO_MANIFEST_DIR")).join("../../corpus"))
}

/// A path as given, or a fixture name looked up under the corpus.
fn resolve_input(arg: &str, subdir: &str) -> Result<PathBuf, khcube::Error> {
    let p = PathBuf::from(arg);
    if p.exists() {
        return Ok(p);
    }
    let dir = corpus_dir().join(subdir);
    ["", ".pd", ".json"]
        .iter()
        .map(|ext| dir.join(format!("{arg}{ext}")))
        .find(|c| c.is_file())
        .ok_or_else(|| khcube::Error::Parse(format!("no file or fixture named {arg:?}")))
}

fn read(arg: &str, subdir: &str) -> Result<String, khcube::Error> {
    Ok(std::fs::read_to_string(resolve_input(arg, subdir)?)?)
}

fn load_pd(arg: &str) -> Result<PdCode, khcube::Error> {
    parse_pd(&read(arg, "pd")?)
}

fn load_functor(arg: &str) -> Result<(FunctorJson, CubeFunctor), khcube::Error> {
    let j = FunctorJson::load(&resolve_input(arg, "functors")?)?;
    let f = j.to_stable()?.functor;
    Ok((j, f))
}

fn print_json(v: Value) {
    println!("{}", serde_json::to_string_pretty(&v).expect("JSON values serialize"));
}

fn kh_rows(pd: &PdCode, basepoint: Option<u32>) -> Result<Vec<KhRow>, khcube::Error> {
    let k = match basepoint {
        Some(p) => reduced_functor(pd, p)?,
        None => build_khovanov_functor(pd)?,
    };
    khovanov_homology(&k)
}

fn kh_homology(input: &str, r: &Reduced, as_json: bool) -> Outcome {
    let pd = load_pd(input)?;
    let basepoint = if r.reduced { r.basepoint } else { None };
    let rows = kh_rows(&pd, basepoint)?;
    if as_json {
        print_json(json!({
            "schema_version": 1,
            "input": input,
            "crossings": pd.len(),
            "reduced": r.reduced,
            "basepoint": basepoint,
            "rows": rows,
        }));
    } else {
        print!("{}", format_table(&rows));
    }
    Ok(())
}

/// Pass/fail for the conditions every functor must satisfy.
fn functor_conditions(f: &CubeFunctor) -> Vec<(&'static str, bool, Vec<String>)> {
    let c0 = validate_c0(f);
    let coh = validate_coherence(f);
    let mut c1 = coh.missing_faces.iter().map(|k| format!("{k}: no matching")).collect::<Vec<_>>();
    c1.extend(coh.invalid_matchings.iter().cloned());
    let d2 = match tot_functor(f) {
        Ok(_) => Vec::new(),
        Err(e) => vec![e.to_string()],
    };
    vec![
        ("C-0", c0.passes(), c0.violations),
        ("C-1", c1.is_empty(), c1),
        ("C-2", coh.hexagon_failures.is_empty(), coh.hexagon_failures),
        ("d^2=0", d2.is_empty(), d2),
    ]
}

fn report_conditions(conds: &[(&str, bool, Vec<String>)], extra: Value, as_json: bool) -> bool {
    let ok = conds.iter().all(|c| c.1);
    if as_json {
        let checks: Vec<Value> =
            conds.iter().map(|(n, p, v)| json!({"condition": n, "passed": p, "violations": v})).collect();
        let mut out = json!({"schema_version": 1, "passed": ok, "checks": checks});
        if let (Value::Object(o), Value::Object(e)) = (&mut out, extra) {
            o.extend(e);
        }
        print_json(out);
    } else {
        for (name, pass, violations) in conds {
            println!("{} {name}", if *pass { "PASS" } else { "FAIL" });
            for v in violations {
                println!("  {v}");
            }
        }
    }
    ok
}

fn kh_verify(input: &str, as_json: bool) -> Outcome {
    let pd = load_pd(input)?;
    let (mut conds, extra) = match build_khovanov_functor_unvalidated(&pd) {
        Ok(k) => {
            let mut c = functor_conditions(k.functor());
            c.push(("quantum grading", true, Vec::new()));
            (c, json!({"crossings": pd.len(), "n_plus": k.n_plus, "n_minus": k.n_minus}))
        }
        Err(khcube::Error::Invariant(msg)) => {
            (vec![("quantum grading", false, vec![msg])], json!({"crossings": pd.len()}))
        }
        Err(e) => return Err(e.into()),
    };
    conds.sort_by_key(|c| c.0 == "quantum grading");
    if report_conditions(&conds, extra, as_json) {
        Ok(())
    } else {
        Err(Failure::Verify("verification failed".into()))
    }
}

fn subscript(s: &str) -> String {
    s.chars()
        .map(|c| match c.to_digit(10) {
            Some(d) => char::from_u32(0x2080 + d).unwrap(),
            None => c,
        })
        .collect()
}

/// A composite id `g∘f` written in path order with subscript indices.
fn path_word(id: &str) -> String {
    id.split('∘').rev().map(subscript).collect()
}

/// Solutions agreeing with one fixed pairing of composites on the first
/// face that admits a choice, and that pairing as text.
fn normalized(f: &CubeFunctor, sols: &[FaceMaps]) -> Option<(usize, String)> {
    let face: Face2 = Face2::all(f.dim()).into_iter().find(|x| f.face(x).is_none() && sols.iter().any(|s| s[x].len() > 1))?;
    let (a, b) = f.face_composites(&face);
    let (i, j) = (0, sols[0][&face][0]);
    let count = sols.iter().filter(|s| s[&face][i] == j).count();
    let mut pair = [path_word(&a.element_id(f, i)), path_word(&b.element_id(f, j))];
    pair.sort();
    Some((count, format!("{}↦{}", pair[0], pair[1])))
}

fn search_message(f: &CubeFunctor, sols: &[FaceMaps], limits: &SearchLimits) -> String {
    if sols.is_empty() {
        return "no coherent matching exists".into();
    }
    let capped = if sols.len() >= limits.max_results { "at least " } else { "" };
    let noun = if sols.len() == 1 { "matching" } else { "matchings" };
    match normalized(f, sols) {
        Some((k, pair)) => format!("{capped}{} coherent {noun} ({k} modulo the {pair} normalization)", sols.len()),
        None => format!("{capped}{} coherent {noun}", sols.len()),
    }
}

fn solutions_json(f: &CubeFunctor, sols: &[FaceMaps]) -> Vec<Value> {
    sols.iter()
        .map(|s| {
            let g = f.clone().with_faces(s.clone()).expect("search returns valid matchings");
            json!(FunctorJson::from_functor(&g, 0).faces)
        })
        .collect()
}

fn search(f: &CubeFunctor, cap: &Cap, as_json: bool, conds: Option<&[(&str, bool, Vec<String>)]>) -> Outcome {
    let limits = cap.limits();
    let sols = enumerate_matchings(f, &limits)?;
    let msg = search_message(f, &sols, &limits);
    if as_json {
        let mut out = json!({
            "schema_version": 1,
            "solutions": sols.len(),
            "normalized": normalized(f, &sols).map(|n| n.0),
            "message": msg,
            "matchings": solutions_json(f, &sols),
        });
        if let Some(c) = conds {
            out["checks"] = c.iter().map(|(n, p, v)| json!({"condition": n, "passed": p, "violations": v})).collect();
        }
        print_json(out);
    } else {
        if let Some(c) = conds {
            for (name, pass, _) in c {
                println!("{} {name}", if *pass { "PASS" } else { "FAIL" });
            }
        }
        println!("{msg}");
    }
    if sols.is_empty() {
        Err(Failure::Verify(String::new()))
    } else {
        Ok(())
    }
}

fn functor_check(input: &str, do_search: bool, cap: &Cap, as_json: bool) -> Outcome {
    let (j, f) = load_functor(input)?;
    let conds = functor_conditions(&f);
    if do_search && !f.has_all_faces() && conds[0].1 {
        return search(&f, cap, as_json, Some(&conds));
    }
    if report_conditions(&conds, json!({"n": j.n, "shift": j.shift}), as_json) {
        Ok(())
    } else {
        Err(Failure::Verify("functor check failed".into()))
    }
}

fn certificate(input: &str, as_json: bool) -> Outcome {
    let path = resolve_input(input, "certificates")?;
    let (c, base) = CertificateJson::load(&path)?;
    let report = verify_certificate(&c.resolve(&base)?);
    if as_json {
        print_json(json!({"schema_version": 1, "passed": report.passes(), "report": report}));
    } else {
        if let Some(e) = &report.structure_error {
            println!("FAIL structure: {e}");
        }
        for s in &report.steps {
            println!("{} step {} ({}): {}", if s.passed { "PASS" } else { "FAIL" }, s.index, s.kind, s.detail);
        }
        println!("{}", if report.passes() { "certificate verified" } else { "certificate rejected" });
    }
    if report.passes() {
        Ok(())
    } else {
        Err(Failure::Verify("certificate rejected".into()))
    }
}

fn groups(h: &BTreeMap<i64, HomologyGroup>) -> Vec<&HomologyGroup> {
    h.values().filter(|g| !g.is_zero()).collect()
}

fn delta_homology(input: &str, as_json: bool) -> Outcome {
    let x = DeltaComplex::load(&resolve_input(input, "delta")?)?;
    let via_cube = homology(&tot(&delta_functor(&x)?)?);
    let direct = simplicial_homology(&x)?;
    let agree = groups(&via_cube) == groups(&direct);
    if as_json {
        print_json(json!({
            "schema_version": 1,
            "agree": agree,
            "via_cube": groups(&via_cube),
            "simplicial": groups(&direct),
        }));
    } else {
        for (label, h) in [("via cube functor", &via_cube), ("simplicial", &direct)] {
            println!("{label}:");
            for g in groups(h) {
                println!("  {g}");
            }
        }
        println!("{}", if agree { "agree" } else { "DISAGREE" });
    }
    if agree {
        Ok(())
    } else {
        Err(Failure::Verify("the two homology computations differ".into()))
    }
}

fn golden(name: &str, reduced: bool) -> Result<Vec<KhRow>, khcube::Error> {
    let file = if reduced { format!("{name}_reduced.json") } else { format!("{name}.json") };
    let text = std::fs::read_to_string(corpus_dir().join("golden/kh").join(file))?;
    let v: Value = serde_json::from_str(&text)?;
    Ok(serde_json::from_value(v["rows"].clone())?)
}

type Example = (&'static str, fn() -> Result<(bool, String), khcube::Error>);

fn examples() -> Vec<Example> {
    vec![
        ("unknot", || {
            let rows = kh_rows(&load_pd("unknot_0")?, None)?;
            let ok = rows.iter().map(|r| (r.i, r.j, r.rank)).collect::<Vec<_>>() == [(0, -1, 1), (0, 1, 1)];
            Ok((ok, "Z at (0, -1) and (0, 1)".into()))
        }),
        ("trefoil", || {
            let rows = kh_rows(&load_pd("trefoil_right")?, None)?;
            Ok((rows == golden("trefoil_right", false)?, "matches the golden table".into()))
        }),
        ("reduced trefoil", || {
            let rows = kh_rows(&load_pd("trefoil_right")?, Some(1))?;
            Ok((rows == golden("trefoil_right", true)?, "matches the reduced golden table".into()))
        }),
        ("multiple-extend", || {
            let (_, f) = load_functor("multiple_extend")?;
            let limits = SearchLimits::default();
            let sols = enumerate_matchings(&f, &limits)?;
            let n = normalized(&f, &sols).map(|x| x.0);
            Ok((sols.len() == 24 && n == Some(6), search_message(&f, &sols, &limits)))
        }),
        ("zero-extend", || {
            let (_, f) = load_functor("zero_extend")?;
            let limits = SearchLimits::default();
            let sols = enumerate_matchings(&f, &limits)?;
            Ok((sols.is_empty(), search_message(&f, &sols, &limits)))
        }),
        ("rp2-smash", || {
            let (_, f1) = load_functor("rp2_smash_f1")?;
            let (_, p) = load_functor("p")?;
            let pp = product(&p, &p)?;
            let iso = find_natural_isomorphism(&f1, &pp, 1_000_000)?.is_some();
            let h: Vec<String> = groups(&homology(&tot_functor(&pp)?)).iter().map(|g| g.to_string()).collect();
            let ok = iso && h == ["H_0 = Z/2", "H_1 = Z/2"];
            Ok((ok, format!("F^(1) ≅ P×P: {iso}; {}", h.join(", "))))
        }),
        ("rp2-wedge", || {
            let (c, base) = CertificateJson::load(&corpus_dir().join("certificates/rp2_wedge.json"))?;
            let report = verify_certificate(&c.resolve(&base)?);
            Ok((report.passes(), format!("{} certificate steps", report.steps.len())))
        }),
        ("delta complexes", || {
            let mut ok = true;
            for name in ["point", "boundary_tetrahedron", "rp2_6", "torus_7"] {
                let x = DeltaComplex::load(&resolve_input(name, "delta")?)?;
                ok &= groups(&homology(&tot(&delta_functor(&x)?)?)) == groups(&simplicial_homology(&x)?);
            }
            Ok((ok, "cube functor and simplicial homology agree".into()))
        }),
    ]
}

fn examples_run(as_json: bool) -> Outcome {
    let mut results = Vec::new();
    for (name, run) in examples() {
        let (pass, detail) = run()?;
        results.push((name, pass, detail));
    }
    let ok = results.iter().all(|r| r.1);
    if as_json {
        let rows: Vec<Value> = results.iter().map(|(n, p, d)| json!({"example": n, "passed": p, "detail": d})).collect();
        print_json(json!({"schema_version": 1, "passed": ok, "examples": rows}));
    } else {
        for (name, pass, detail) in &results {
            println!("{} {name}: {detail}", if *pass { "PASS" } else { "FAIL" });
        }
    }
    if ok {
        Ok(())
    } else {
        Err(Failure::Verify("an example failed".into()))
    }
}

fn run(cli: &Cli) -> Outcome {
    let j = cli.json;
    match &cli.command {
        Command::Kh(KhCommand::Homology { input, reduced }) => kh_homology(input, reduced, j),
        Command::Kh(KhCommand::Verify { input }) => kh_verify(input, j),
        Command::Functor(FunctorCommand::Check { input, search, cap }) => functor_check(input, *search, cap, j),
        Command::Functor(FunctorCommand::SearchMatchings { input, cap }) => {
            let (_, f) = load_functor(input)?;
            search(&f, cap, j, None)
        }
        Command::Functor(FunctorCommand::Certificate { input }) => certificate(input, j),
        Command::Delta(DeltaCommand::Homology { input }) => delta_homology(input, j),
        Command::Examples(ExamplesCommand::Run) => examples_run(j),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let outcome = match cli.jobs {
        Some(1) => {
            khcube::par::set_enabled(false);
            run(&cli)
        }
        Some(n) => khcube::par::install(n as usize, || run(&cli)),
        None => run(&cli),
    };
    match outcome {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Verify(msg)) => {
            if !cli.json && !msg.is_empty() {
                eprintln!("{msg}");
            }
            ExitCode::from(1)
        }
        Err(Failure::Lib(e)) => {
            eprintln!("error: {e}");
            ExitCode::from(if e.is_input_error() { 2 } else { 3 })
        }
    }
}
