//! The `gad` command line: graph reports from interchange files, the
//! triangular-matrix weight toolkit, Lie-algebra checks and fixture
//! emission. Reports are deterministic: identical inputs give
//! byte-identical stdout; timing goes to stderr only.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand};
use serde::{Deserialize, Serialize};

use crate::connection;
use crate::diamond;
use crate::graph;
use crate::homology::{Coefficients, Report};
use crate::io::{self, GraphFile, HomologyTableFile, StructureConstantsFile};
use crate::lie::{self, LieBasis};
use crate::weight::{self, IsoKind, Weight, WeightTable};
use crate::{Error, Result};

#[derive(Debug, Parser)]
#[command(
    name = "gad",
    about = "Graded graphs, signatures and integral chain-graph homology",
    version
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
    /// Worker threads for sweeps (0 = library default).
    #[arg(long, global = true, default_value_t = 0)]
    pub jobs: usize,
    /// Seed echoed into reports; reserved for randomized checks.
    #[arg(long, global = true, default_value_t = 0)]
    pub seed: u64,
    /// Cache directory for weight-component results.
    #[arg(long, global = true)]
    pub cache: Option<PathBuf>,
    /// Bypass the cache entirely.
    #[arg(long, global = true)]
    pub no_cache: bool,
    /// Machine-readable report on stdout.
    #[arg(long, global = true)]
    pub json: bool,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Reports on a graph interchange file.
    Graph {
        #[command(subcommand)]
        op: GraphOp,
    },
    /// The weight decomposition of strictly upper-triangular matrices.
    An {
        #[command(subcommand)]
        op: AnOp,
    },
    /// Lie algebras by structure constants.
    Lie {
        #[command(subcommand)]
        op: LieOp,
    },
    /// Writes the bundled example files.
    Fixtures {
        #[arg(long, default_value = "fixtures")]
        out: PathBuf,
    },
}

#[derive(Debug, Subcommand)]
pub enum GraphOp {
    /// Gradability and the distance decomposition.
    Grade { file: PathBuf },
    /// Connection validity, deformability, rank, volume and the
    /// characteristic number.
    Connection { file: PathBuf },
    /// Diamond property, rank, volume, and signature search.
    Diamond { file: PathBuf },
    /// Integral homology of the chain graph in the file.
    Homology { file: PathBuf },
}

#[derive(Debug, Subcommand)]
pub enum AnOp {
    /// Table of all weights: size, rank by formula and by counting,
    /// homology.
    Weights {
        #[arg(long)]
        n: usize,
        #[arg(long)]
        csv: Option<PathBuf>,
    },
    /// One weight subgraph in detail.
    Component {
        #[arg(long)]
        n: usize,
        /// Comma-separated weight entries, e.g. 1,1,1.
        #[arg(long)]
        weight: String,
        #[arg(long)]
        dot: Option<PathBuf>,
        /// Prime field coefficients instead of the integers.
        #[arg(long = "mod")]
        modulus: Option<u64>,
    },
    /// Apply and verify one of the weight-subgraph isomorphisms.
    Iso {
        #[arg(long)]
        n: usize,
        /// transpose | rotate | dual | perm
        #[arg(long)]
        op: String,
        /// One-line permutation for op = perm, e.g. 0,2,1 (decomposed into
        /// adjacent transpositions by bubble sort).
        #[arg(long)]
        perm: Option<String>,
        /// Explicit word of adjacent transpositions, e.g. 1,2,1.
        #[arg(long)]
        word: Option<String>,
    },
    /// Sweep checks: 3.2 nonempty-iff-admissible, 3.3 reducible products,
    /// 3.4 connectivity and edge witnesses, 3.5 the rank formula.
    Verify {
        #[arg(long)]
        n: usize,
        #[arg(long)]
        theorem: String,
    },
}

#[derive(Debug, Subcommand)]
pub enum LieOp {
    /// Jacobi identity over the integers.
    Validate {
        #[arg(long)]
        file: PathBuf,
    },
    /// The diamond root-system axioms.
    DiamondCheck {
        #[arg(long)]
        file: Option<PathBuf>,
        /// Built-in family; only "A" is provided.
        #[arg(long = "type")]
        family: Option<String>,
        #[arg(long)]
        n: Option<usize>,
    },
    /// Component decomposition with ranks and integral homology.
    Homology {
        #[arg(long = "type")]
        family: Option<String>,
        #[arg(long)]
        n: Option<usize>,
        #[arg(long)]
        file: Option<PathBuf>,
    },
}

#[derive(Debug, Clone, Serialize)]
pub struct InputDigest {
    pub path: String,
    pub sha256: String,
}

#[derive(Debug, Clone, Serialize)]
pub struct CheckEntry {
    pub name: String,
    pub verdict: String,
    pub detail: String,
}

/// The deterministic command report. Timing is tracked by the binary and
/// printed to stderr so stdout stays byte-identical across runs.
#[derive(Debug, Clone, Serialize)]
pub struct RunReport {
    pub command: String,
    pub seed: u64,
    pub inputs: Vec<InputDigest>,
    pub checks: Vec<CheckEntry>,
    pub result: serde_json::Value,
    #[serde(skip)]
    pub text: Vec<String>,
}

impl RunReport {
    fn new(command: String, seed: u64) -> Self {
        RunReport {
            command,
            seed,
            inputs: Vec::new(),
            checks: Vec::new(),
            result: serde_json::Value::Null,
            text: Vec::new(),
        }
    }

    fn digest(&mut self, path: &Path) -> Result<()> {
        use sha2::{Digest, Sha256};
        let bytes = std::fs::read(path)?;
        let hash = Sha256::digest(&bytes);
        let hex: String = hash.iter().map(|b| format!("{b:02x}")).collect();
        self.inputs.push(InputDigest {
            path: path.display().to_string(),
            sha256: hex,
        });
        Ok(())
    }

    fn check(&mut self, name: impl Into<String>, ok: bool, detail: impl Into<String>) {
        self.checks.push(CheckEntry {
            name: name.into(),
            verdict: if ok { "pass" } else { "fail" }.to_string(),
            detail: detail.into(),
        });
    }

    fn absorb(&mut self, prefix: &str, report: &Report) {
        for line in &report.lines {
            self.checks.push(CheckEntry {
                name: format!("{prefix}{}", line.name),
                verdict: if line.ok { "pass" } else { "fail" }.to_string(),
                detail: line.detail.clone(),
            });
        }
    }

    fn say(&mut self, line: impl Into<String>) {
        self.text.push(line.into());
    }

    pub fn exit_code(&self) -> i32 {
        if self.checks.iter().any(|c| c.verdict == "fail") {
            1
        } else {
            0
        }
    }

    pub fn render_text(&self) -> String {
        let mut out = self.text.clone();
        for c in &self.checks {
            out.push(format!(
                "{}: {} — {}",
                c.name,
                c.verdict.to_uppercase(),
                c.detail
            ));
        }
        out.join("\n")
    }
}

pub fn run(cli: &Cli) -> Result<RunReport> {
    if cli.jobs > 0 {
        // repeat initialization (tests) is harmless
        let _ = rayon::ThreadPoolBuilder::new()
            .num_threads(cli.jobs)
            .build_global();
    }
    let cache = CacheConfig {
        dir: cli
            .cache
            .clone()
            .unwrap_or_else(|| PathBuf::from(".gad_cache")),
        enabled: !cli.no_cache,
    };
    match &cli.command {
        Command::Graph { op } => run_graph(op, cli.seed),
        Command::An { op } => run_an(op, cli.seed, &cache),
        Command::Lie { op } => run_lie(op, cli.seed),
        Command::Fixtures { out } => {
            let mut report = RunReport::new("fixtures".to_string(), cli.seed);
            let written = crate::fixtures::write_fixtures(out)?;
            for path in &written {
                report.say(format!("wrote {}", path.display()));
            }
            report.result = serde_json::json!({
                "written": written.iter().map(|p| p.display().to_string()).collect::<Vec<_>>()
            });
            Ok(report)
        }
    }
}

fn load(report: &mut RunReport, file: &Path) -> Result<GraphFile> {
    report.digest(file)?;
    GraphFile::load(file)
}

fn run_graph(op: &GraphOp, seed: u64) -> Result<RunReport> {
    match op {
        GraphOp::Grade { file } => {
            let mut report = RunReport::new(format!("graph grade {}", file.display()), seed);
            let gf = load(&mut report, file)?;
            let g = gf.graph()?;
            match graph::is_gradable(&g) {
                None => {
                    report.say("not gradable");
                    report.result = serde_json::json!({ "gradable": false });
                }
                Some(parts) => {
                    let rep = graph::representation_gradation(&g)?;
                    report.say("gradable");
                    for (i, p) in parts.iter().enumerate() {
                        report.say(format!(
                            "component {i}: {} | {}",
                            p.part1.join(" "),
                            p.part2.join(" ")
                        ));
                    }
                    report.result = serde_json::json!({
                        "gradable": true,
                        "representation_grades": rep
                            .grades()
                            .iter()
                            .enumerate()
                            .map(|(v, gr)| (g.id(v).to_string(), *gr))
                            .collect::<BTreeMap<String, i64>>(),
                    });
                }
            }
            Ok(report)
        }
        GraphOp::Connection { file } => {
            let mut report = RunReport::new(format!("graph connection {}", file.display()), seed);
            let gf = load(&mut report, file)?;
            let g = gf.graph()?;
            let nu = gf
                .connection(&g)?
                .ok_or_else(|| Error::input("file carries no connection values"))?;
            let violations = connection::validate_connection(&g, &nu);
            report.check(
                "connection-valid",
                violations.is_empty(),
                format!("{} violations", violations.len()),
            );
            if !violations.is_empty() {
                report.result = serde_json::json!({ "violations": format!("{violations:?}") });
                return Ok(report);
            }
            let deform = connection::is_deformable(&g, &nu)?;
            report.say(format!("deformable: {}", deform.deformable));
            let mut payload = serde_json::json!({ "deformable": deform.deformable });
            if deform.deformable && g.is_connected() {
                let rank = connection::graph_rank(&g, &nu)?;
                let volume = connection::volume(&g, &nu)?;
                let chi = connection::characteristic_number(&g, &nu)?;
                report.say(format!("rank {rank}, volume {volume}, chi {chi}"));
                report.check(
                    "chi-squared-identity",
                    chi.clone() * chi.clone() == num_bigint::BigInt::from(rank).pow(volume as u32),
                    format!("chi^2 = {} vs rank^volume", chi.clone() * chi.clone()),
                );
                payload = serde_json::json!({
                    "deformable": true,
                    "rank": rank,
                    "volume": volume,
                    "chi": chi.to_string(),
                });
            }
            let rep = connection::representation_matrix(&g, &nu)?;
            report.say(io::render_matrix(&rep));
            report.result = payload;
            Ok(report)
        }
        GraphOp::Diamond { file } => {
            let mut report = RunReport::new(format!("graph diamond {}", file.display()), seed);
            let gf = load(&mut report, file)?;
            let g = gf.graph()?;
            let gradable = graph::is_gradable(&g).is_some();
            let check = diamond::is_diamond_graph(&g);
            report.say(format!("gradable: {gradable}"));
            report.say(format!("diamond: {}", check.is_diamond));
            let mut payload = serde_json::json!({
                "gradable": gradable,
                "diamond": check.is_diamond,
            });
            if check.is_diamond && g.is_connected() {
                let rank = diamond::diamond_rank(&g)?;
                report.say(format!("rank {rank}"));
                payload["rank"] = serde_json::json!(rank);
                if gradable {
                    let (p1, p2) = connection::part_sizes(&g)?;
                    if p1 == p2 {
                        report.say(format!("volume {p1}"));
                        payload["volume"] = serde_json::json!(p1);
                    } else {
                        report.say(format!("distance components of sizes {p1} and {p2}"));
                    }
                    let search = diamond::find_signature(&g)?;
                    match (&search.signature, &search.obstruction) {
                        (Some(_), _) => report.say("signature found".to_string()),
                        (None, Some(reason)) => report.say(format!("no signature ({reason})")),
                        (None, None) => report.say("no signature".to_string()),
                    }
                    if search.deformability_gap {
                        // solvable per-diamond signs that are not deformable:
                        // an example the equivalence remark does not cover
                        report.say(
                            "note: per-diamond sign conditions are solvable but the two-step \
                             sums do not vanish"
                                .to_string(),
                        );
                    }
                    payload["signature"] = serde_json::json!(search.signature.is_some());
                    payload["deformability_gap"] = serde_json::json!(search.deformability_gap);
                    if let Some(reason) = &search.obstruction {
                        payload["obstruction"] = serde_json::json!(reason);
                    }
                }
            }
            report.result = payload;
            Ok(report)
        }
        GraphOp::Homology { file } => {
            let mut report = RunReport::new(format!("graph homology {}", file.display()), seed);
            let gf = load(&mut report, file)?;
            let cg = gf.chain_graph()?;
            let h = cg.homology(Coefficients::Integers);
            report.say(io::render_homology(&h));
            report.result = serde_json::to_value(HomologyTableFile::from_table(&h))?;
            Ok(report)
        }
    }
}

struct CacheConfig {
    dir: PathBuf,
    enabled: bool,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
struct WeightRow {
    weight: Vec<usize>,
    size: usize,
    rank_formula: usize,
    rank_counted: usize,
    homology: HomologyTableFile,
}

impl CacheConfig {
    fn key(&self, n: usize, w: &Weight) -> PathBuf {
        let tag: Vec<String> = w.0.iter().map(ToString::to_string).collect();
        self.dir.join(format!("an_n{n}_w{}.json", tag.join("-")))
    }

    fn get(&self, n: usize, w: &Weight) -> Option<WeightRow> {
        if !self.enabled {
            return None;
        }
        let text = std::fs::read_to_string(self.key(n, w)).ok()?;
        serde_json::from_str(&text).ok()
    }

    fn put(&self, n: usize, w: &Weight, row: &WeightRow) {
        if !self.enabled {
            return;
        }
        let _ = std::fs::create_dir_all(&self.dir);
        if let Ok(text) = serde_json::to_string_pretty(row) {
            let _ = std::fs::write(self.key(n, w), text);
        }
    }
}

fn check_n(n: usize) -> Result<()> {
    if n > 6 {
        return Err(Error::input(format!("n = {n} exceeds the hard cap 6")));
    }
    Ok(())
}

fn require_prime(p: u64) -> Result<()> {
    let prime = p >= 2 && (2..=p.isqrt()).all(|d| p % d != 0);
    if prime {
        Ok(())
    } else {
        Err(Error::input(format!("{p} is not a prime")))
    }
}

fn weight_row(table: &WeightTable, w: &Weight, cache: &CacheConfig) -> Result<WeightRow> {
    if let Some(row) = cache.get(table.n(), w) {
        return Ok(row);
    }
    let component = table.component(w)?;
    let h = component
        .homology()
        .ok_or_else(|| Error::invariant("weight-subgraph-nonempty", format!("{w} is empty")))?;
    let row = WeightRow {
        weight: w.0.clone(),
        size: component.size(),
        rank_formula: weight::rank_closed_form(w)?,
        rank_counted: component.counted_rank()?,
        homology: HomologyTableFile::from_table(&h),
    };
    cache.put(table.n(), w, &row);
    Ok(row)
}

fn run_an(op: &AnOp, seed: u64, cache: &CacheConfig) -> Result<RunReport> {
    match op {
        AnOp::Weights { n, csv } => {
            check_n(*n)?;
            let mut report = RunReport::new(format!("an weights --n {n}"), seed);
            let table = WeightTable::build(*n);
            let mut rows = Vec::new();
            for w in table.weights().cloned().collect::<Vec<_>>() {
                rows.push(weight_row(&table, &w, cache)?);
            }
            report.say(format!("{} weights", rows.len()));
            for row in &rows {
                let w = Weight(row.weight.clone());
                let h = row.homology.to_table()?;
                report.say(format!(
                    "{w}  size {}  rank {}/{}  {}",
                    row.size,
                    row.rank_formula,
                    row.rank_counted,
                    io::render_homology(&h).replace('\n', "; ")
                ));
            }
            if let Some(path) = csv {
                let mut text = String::from("weight,size,rank_formula,rank_counted,homology\n");
                for row in &rows {
                    let h = row.homology.to_table()?;
                    text.push_str(&format!(
                        "\"{}\",{},{},{},\"{}\"\n",
                        Weight(row.weight.clone()),
                        row.size,
                        row.rank_formula,
                        row.rank_counted,
                        io::render_homology(&h).replace('\n', "; ")
                    ));
                }
                std::fs::write(path, text)?;
                report.say(format!("wrote {}", path.display()));
            }
            report.result = serde_json::to_value(&rows)?;
            Ok(report)
        }
        AnOp::Component {
            n,
            weight,
            dot,
            modulus,
        } => {
            check_n(*n)?;
            let w = Weight::parse(weight)?;
            if w.0.len() != n + 1 {
                return Err(Error::input(format!(
                    "weight {w} has {} entries, expected {}",
                    w.0.len(),
                    n + 1
                )));
            }
            let mut report =
                RunReport::new(format!("an component --n {n} --weight {weight}"), seed);
            let table = WeightTable::build(*n);
            let component = table.component(&w)?;
            report.say(format!("weight {w}: {} vertices", component.size()));
            let Some(chain) = &component.chain else {
                report.say("empty subgraph".to_string());
                report.result = serde_json::json!({ "size": 0 });
                return Ok(report);
            };
            let coeff = match modulus {
                None => Coefficients::Integers,
                Some(p) => {
                    require_prime(*p)?;
                    Coefficients::PrimeField(*p)
                }
            };
            let h = chain.homology(coeff);
            report.say(format!("rank {}", component.counted_rank()?));
            report.say(io::render_homology(&h));
            if let Some(path) = dot {
                std::fs::write(
                    path,
                    io::to_dot(
                        chain.graph(),
                        Some(chain.graded().grades()),
                        Some(chain.nu()),
                    ),
                )?;
                report.say(format!("wrote {}", path.display()));
            }
            report.result = serde_json::json!({
                "size": component.size(),
                "rank": component.counted_rank()?,
                "vertices": chain.graph().ids(),
                "homology": serde_json::to_value(HomologyTableFile::from_table(&h))?,
            });
            Ok(report)
        }
        AnOp::Iso { n, op, perm, word } => {
            check_n(*n)?;
            let mut report = RunReport::new(format!("an iso --n {n} --op {op}"), seed);
            let kind = match op.as_str() {
                "transpose" => IsoKind::Transpose,
                "rotate" => IsoKind::Rotation,
                "dual" => IsoKind::Duality,
                "perm" => {
                    let word = match (perm, word) {
                        (_, Some(word)) => word
                            .split(',')
                            .map(|t| {
                                t.trim()
                                    .parse()
                                    .map_err(|_| Error::input(format!("bad word entry {t:?}")))
                            })
                            .collect::<Result<Vec<usize>>>()?,
                        (Some(perm), None) => {
                            let one_line: Vec<usize> = perm
                                .split(',')
                                .map(|t| {
                                    t.trim().parse().map_err(|_| {
                                        Error::input(format!("bad permutation entry {t:?}"))
                                    })
                                })
                                .collect::<Result<_>>()?;
                            if one_line.len() != n + 1 {
                                return Err(Error::input(format!("permutation must list 0..={n}")));
                            }
                            weight::word_for_permutation(&one_line)?
                        }
                        (None, None) => {
                            return Err(Error::input("op = perm needs --perm or --word"))
                        }
                    };
                    IsoKind::Permutation(word)
                }
                other => return Err(Error::input(format!("unknown iso op {other:?}"))),
            };
            if let IsoKind::Permutation(word) = &kind {
                report.say(format!(
                    "word: [{}]",
                    word.iter()
                        .map(ToString::to_string)
                        .collect::<Vec<_>>()
                        .join(", ")
                ));
            }
            for w in weight::enumerate_omega(*n) {
                let image = weight::iso_weight(&kind, &w)?;
                report.say(format!("{w} -> {image}"));
            }
            let verification = weight::verify_iso(*n, &kind)?;
            report.absorb("", &verification);
            report.result = serde_json::json!({ "ok": verification.ok });
            Ok(report)
        }
        AnOp::Verify { n, theorem } => {
            check_n(*n)?;
            let mut report = RunReport::new(format!("an verify --n {n} --theorem {theorem}"), seed);
            let table = WeightTable::build(*n);
            let sub = match theorem.as_str() {
                "3.2" | "nonempty" => weight::verify_nonempty_iff_admissible(&table),
                "3.3" | "products" => weight::verify_reducible_products(&table)?,
                "3.4" | "connected" => weight::verify_connectivity_and_witnesses(&table)?,
                "3.5" | "rank" => weight::verify_rank_formula(&table)?,
                other => {
                    return Err(Error::input(format!(
                        "unknown check {other:?}; use 3.2|3.3|3.4|3.5"
                    )))
                }
            };
            report.absorb("", &sub);
            report.say(if sub.ok { "PASS" } else { "FAIL" }.to_string());
            report.result = serde_json::json!({ "ok": sub.ok });
            Ok(report)
        }
    }
}

fn lie_basis_from_args(
    report: &mut RunReport,
    family: &Option<String>,
    n: &Option<usize>,
    file: &Option<PathBuf>,
) -> Result<LieBasis> {
    match (family, file) {
        (Some(f), None) if f == "A" => {
            let n = n.ok_or_else(|| Error::input("--type A needs --n"))?;
            check_n(n)?;
            Ok(LieBasis::type_a(n))
        }
        (Some(f), None) => Err(Error::input(format!(
            "unknown family {f:?}; built-in tables exist only for A"
        ))),
        (None, Some(path)) => {
            report.digest(path)?;
            LieBasis::from_file(&StructureConstantsFile::load(path)?)
        }
        _ => Err(Error::input("give either --type A --n N or --file")),
    }
}

fn run_lie(op: &LieOp, seed: u64) -> Result<RunReport> {
    match op {
        LieOp::Validate { file } => {
            let mut report = RunReport::new(format!("lie validate {}", file.display()), seed);
            report.digest(file)?;
            let lb = LieBasis::from_file(&StructureConstantsFile::load(file)?)?;
            let jacobi = lie::validate_lie(&lb);
            report.check(
                "jacobi",
                jacobi.ok,
                match &jacobi.violation {
                    None => "all triples vanish".to_string(),
                    Some((x, y, z, defect)) => {
                        format!("triple ({x}, {y}, {z}) leaves {defect:?}")
                    }
                },
            );
            report.result = serde_json::json!({ "ok": jacobi.ok });
            Ok(report)
        }
        LieOp::DiamondCheck { file, family, n } => {
            let mut report = RunReport::new("lie diamond-check".to_string(), seed);
            let lb = lie_basis_from_args(&mut report, family, n, file)?;
            let axioms = lie::is_diamond_root_system(&lb)?;
            report.check(
                "diamond-root-system",
                axioms.ok,
                match &axioms.first_violation {
                    None => "all four axioms hold".to_string(),
                    Some((axiom, detail)) => format!("axiom {axiom}: {detail}"),
                },
            );
            report.result = serde_json::json!({
                "ok": axioms.ok,
                "first_violation": axioms.first_violation.map(|(a, d)| serde_json::json!({
                    "axiom": a, "detail": d
                })),
            });
            Ok(report)
        }
        LieOp::Homology { family, n, file } => {
            let mut report = RunReport::new("lie homology".to_string(), seed);
            let lb = lie_basis_from_args(&mut report, family, n, file)?;
            let jacobi = lie::validate_lie(&lb);
            if !jacobi.ok {
                return Err(Error::input(format!(
                    "not a Lie algebra: {:?}",
                    jacobi.violation
                )));
            }
            let cg = lie::exterior_chain_graph(&lb)?;
            let decomp = lie::component_decomposition(&cg)?;
            report.say(format!(
                "{} components, {} of rank zero",
                decomp.components.len(),
                decomp.free_component_count()
            ));
            for (i, entry) in decomp.components.iter().enumerate() {
                report.say(format!(
                    "component {i} [{}]: {} vertices, rank {}, {}",
                    entry.chain.graph().id(0),
                    entry.chain.graph().len(),
                    entry.rank,
                    io::render_homology(&entry.homology).replace('\n', "; ")
                ));
            }
            let total = decomp.total_homology();
            report.say("total:".to_string());
            report.say(io::render_homology(&total));
            report.result = serde_json::json!({
                "components": decomp.components.len(),
                "rank_zero": decomp.free_component_count(),
                "total": serde_json::to_value(HomologyTableFile::from_table(&total))?,
            });
            Ok(report)
        }
    }
}

/// Maps an error to the process exit code: invariant violations are
/// mathematical counterexamples (1), everything else is bad input (2).
pub fn error_exit_code(e: &Error) -> i32 {
    match e {
        Error::Invariant { .. } => 1,
        _ => 2,
    }
}

/// Entry point shared by the binary and the tests.
pub fn main_with(cli: &Cli) -> i32 {
    let started = std::time::Instant::now();
    match run(cli) {
        Ok(report) => {
            if cli.json {
                println!(
                    "{}",
                    serde_json::to_string_pretty(&report).expect("report serializes")
                );
            } else {
                let text = report.render_text();
                if !text.is_empty() {
                    println!("{text}");
                }
            }
            eprintln!("elapsed: {:?}", started.elapsed());
            report.exit_code()
        }
        Err(e) => {
            match &e {
                Error::Invariant { law, detail } => eprintln!("FAIL [{law}]: {detail}"),
                other => eprintln!("error: {other}"),
            }
            eprintln!("elapsed: {:?}", started.elapsed());
            error_exit_code(&e)
        }
    }
}
