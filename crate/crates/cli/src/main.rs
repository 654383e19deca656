use std::collections::BTreeMap;
use std::fs;
use std::io::Read;
use std::path::PathBuf;
use std::process::ExitCode;
use std::time::Instant;

use clap::{Parser, Subcommand, ValueEnum};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;
use serde_json::{json, Value};

use esp_core::deletion::{find_deletion_set, DeletionKind, DeletionSet};
use esp_core::graph::{all_pairs_distances, is_shortest_path, path_eccentricity};
use esp_core::generators::random_connected;
use esp_core::hardness::{check_structure, generate_hard_instance, h_minus_x_is_chordal, verify_reduction};
use esp_core::oracle::{esp_decide_oracle, mesp_optimum};
use esp_core::pipeline::PipelineStats;
use esp_core::solver::{decide_with, esp_fvs_approx, mesp_dpd_optimum, mesp_fvs_optimum, build_q_set};
use esp_core::skeleton::DistanceCodomain;
use esp_core::svd::{esp_svd_decide_with, mesp_svd_optimum, DEFAULT_SVD_THRESHOLD};
use esp_core::{EspError, Graph, Path, Vertex};

const SCHEMA: u32 = 1;

#[derive(Parser)]
#[command(name = "esp", version, about = "Eccentricity shortest path solvers")]
struct Cli {
    /// Worker threads; 1 is the reference behaviour.
    #[arg(long, global = true)]
    jobs: Option<usize>,
    /// Include wall-clock timings in the report.
    #[arg(long, global = true)]
    timings: bool,
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Clone, Copy, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
enum Method {
    Oracle,
    Fvs,
    Dpd,
    Svd,
}

#[derive(clap::Args)]
struct SetArgs {
    /// Deletion set to use instead of searching for one, e.g. 0,4,7.
    #[arg(long, value_delimiter = ',')]
    set: Option<Vec<Vertex>>,
    /// Largest deletion set the search tries.
    #[arg(long, default_value_t = 10)]
    kmax: usize,
    /// ℓ up to which the split solver asks the oracle.
    #[arg(long, default_value_t = DEFAULT_SVD_THRESHOLD)]
    svd_threshold: u32,
    /// Skeletons a single decision may examine.
    #[arg(long, default_value_t = esp_core::solver::DEFAULT_SKELETON_BUDGET)]
    budget: u64,
}

#[derive(Subcommand)]
enum Cmd {
    /// Decide whether a shortest path of eccentricity at most ℓ exists.
    Solve {
        graph: PathBuf,
        #[arg(long, value_enum, default_value = "fvs")]
        method: Method,
        #[arg(long)]
        ell: u32,
        #[command(flatten)]
        set: SetArgs,
    },
    /// Smallest ℓ with a witness.
    Optimum {
        graph: PathBuf,
        #[arg(long, value_enum, default_value = "fvs")]
        method: Method,
        #[command(flatten)]
        set: SetArgs,
    },
    /// (1+ε)-approximate optimum through a feedback vertex set.
    Approx {
        graph: PathBuf,
        #[arg(long)]
        eps: f64,
        #[command(flatten)]
        set: SetArgs,
    },
    /// Instance built from a Dominating Set input.
    GenHard {
        graph: PathBuf,
        #[arg(long)]
        k: usize,
        /// Edge list destination; a JSON sidecar goes next to it.
        #[arg(long)]
        out: PathBuf,
        /// Also check the equivalence on the generated instance.
        #[arg(long)]
        verify: bool,
    },
    /// Check a path: shortest, and every vertex within ℓ.
    VerifyPath {
        graph: PathBuf,
        #[arg(long, value_delimiter = ',', required = true)]
        path: Vec<Vertex>,
        #[arg(long)]
        ell: u32,
    },
    /// Random connected graph, written as an edge list to stdout.
    GenRandom {
        #[arg(long)]
        n: usize,
        /// Probability of each extra edge beyond a spanning tree.
        #[arg(long, default_value_t = 0.2)]
        p: f64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// Basic graph statistics and deletion set sizes.
    Stats {
        graph: PathBuf,
        #[arg(long, default_value_t = 6)]
        kmax: usize,
    },
}

#[derive(Serialize, Default)]
struct Report {
    schema: u32,
    command: &'static str,
    #[serde(skip_serializing_if = "Option::is_none")]
    method: Option<Method>,
    feasible: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    ell: Option<u32>,
    certificate: Option<Vec<Vertex>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    parameter_set: Option<DeletionSet>,
    counters: BTreeMap<&'static str, u64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    timings: Option<BTreeMap<&'static str, f64>>,
    #[serde(flatten)]
    extra: BTreeMap<&'static str, Value>,
}

struct Failure {
    code: u8,
    msg: String,
}

impl From<EspError> for Failure {
    fn from(e: EspError) -> Self {
        let code = match e {
            EspError::InvalidDeletionSet(_) => 3,
            EspError::Budget { .. } | EspError::OracleBudget(_) | EspError::PathCap(_) => 4,
            EspError::Internal(_) | EspError::CpcInvariant(_) => 5,
            _ => 2,
        };
        Failure { code, msg: e.to_string() }
    }
}

fn usage(msg: impl Into<String>) -> Failure {
    Failure { code: 2, msg: msg.into() }
}

fn read_graph(p: &PathBuf) -> Result<Graph, Failure> {
    let text = if p.as_os_str() == "-" {
        let mut s = String::new();
        std::io::stdin().read_to_string(&mut s).map_err(|e| usage(e.to_string()))?;
        s
    } else {
        fs::read_to_string(p).map_err(|e| usage(format!("{}: {e}", p.display())))?
    };
    Ok(Graph::parse_edge_list(&text)?)
}

fn kind_of(m: Method) -> Option<DeletionKind> {
    match m {
        Method::Oracle => None,
        Method::Fvs => Some(DeletionKind::Fvs),
        Method::Dpd => Some(DeletionKind::Dpd),
        Method::Svd => Some(DeletionKind::Svd),
    }
}

fn deletion_set(g: &Graph, kind: DeletionKind, args: &SetArgs) -> Result<DeletionSet, Failure> {
    match &args.set {
        Some(s) => Ok(DeletionSet::checked(g, kind, s)?),
        None => find_deletion_set(g, kind, args.kmax)
            .ok_or_else(|| usage(format!("no {kind:?} deletion set of size at most {}", args.kmax))),
    }
}

fn pipeline_counters(st: &PipelineStats) -> BTreeMap<&'static str, u64> {
    BTreeMap::from([
        ("skeletons", st.skeletons),
        ("sanity1", st.sanity1),
        ("enriched", st.enriched),
        ("dp_entries", st.dp_entries),
    ])
}

fn solve(g: &Graph, method: Method, ell: u32, args: &SetArgs, r: &mut Report) -> Result<(), Failure> {
    r.method = Some(method);
    r.ell = Some(ell);
    let dist = all_pairs_distances(g);
    let answer = match kind_of(method) {
        None => esp_decide_oracle(g, ell)?,
        Some(kind) => {
            let ds = deletion_set(g, kind, args)?;
            let s = ds.vertices.clone();
            r.parameter_set = Some(ds);
            match kind {
                DeletionKind::Svd => {
                    let rep = esp_svd_decide_with(g, &dist, &s, ell, args.svd_threshold)?;
                    r.counters.insert("guesses", rep.guesses);
                    r.extra.insert("delegated", json!(rep.delegated));
                    rep.answer
                }
                _ => {
                    let cod = if kind == DeletionKind::Dpd {
                        DistanceCodomain::Quantized { ell, q: build_q_set(&dist, &s, ell) }
                    } else {
                        DistanceCodomain::Exact { ell }
                    };
                    let rep = decide_with(g, &dist, &s, cod, args.budget)?;
                    r.counters = pipeline_counters(&rep.stats);
                    rep.answer
                }
            }
        }
    };
    r.feasible = answer.feasible;
    r.certificate = answer.certificate.map(Path::into_vec);
    Ok(())
}

fn optimum(g: &Graph, method: Method, args: &SetArgs, r: &mut Report) -> Result<(), Failure> {
    r.method = Some(method);
    let (ell, p) = match kind_of(method) {
        None => mesp_optimum(g)?,
        Some(kind) => {
            let ds = deletion_set(g, kind, args)?;
            let s = ds.vertices.clone();
            r.parameter_set = Some(ds);
            match kind {
                DeletionKind::Fvs => {
                    let (ell, p, st) = mesp_fvs_optimum(g, &s)?;
                    r.counters = pipeline_counters(&st);
                    (ell, p)
                }
                DeletionKind::Dpd => {
                    let (ell, p, st) = mesp_dpd_optimum(g, &s)?;
                    r.counters = pipeline_counters(&st);
                    (ell, p)
                }
                DeletionKind::Svd => mesp_svd_optimum(g, &s, args.svd_threshold)?,
            }
        }
    };
    r.feasible = true;
    r.ell = Some(ell);
    r.certificate = Some(p.into_vec());
    Ok(())
}

fn run(cli: &Cli, r: &mut Report) -> Result<(), Failure> {
    match &cli.cmd {
        Cmd::Solve { graph, method, ell, set } => {
            r.command = "solve";
            solve(&read_graph(graph)?, *method, *ell, set, r)
        }
        Cmd::Optimum { graph, method, set } => {
            r.command = "optimum";
            optimum(&read_graph(graph)?, *method, set, r)
        }
        Cmd::Approx { graph, eps, set } => {
            r.command = "approx";
            r.method = Some(Method::Fvs);
            let g = read_graph(graph)?;
            let ds = deletion_set(&g, DeletionKind::Fvs, set)?;
            let (p, ecc, st) = esp_fvs_approx(&g, &ds.vertices, *eps)?;
            r.parameter_set = Some(ds);
            r.counters = pipeline_counters(&st);
            r.feasible = true;
            r.ell = Some(ecc);
            r.certificate = Some(p.into_vec());
            r.extra.insert("eps", json!(eps));
            Ok(())
        }
        Cmd::GenHard { graph, k, out, verify } => {
            r.command = "gen-hard";
            let g = read_graph(graph)?;
            let hi = generate_hard_instance(&g, *k)?;
            fs::write(out, hi.h.to_edge_list()).map_err(|e| usage(format!("{}: {e}", out.display())))?;
            let side = out.with_extension("json");
            let text = serde_json::to_string_pretty(&hi).expect("serializable");
            fs::write(&side, text + "\n").map_err(|e| usage(format!("{}: {e}", side.display())))?;
            r.feasible = true;
            r.extra.insert("n", json!(hi.h.n()));
            r.extra.insert("m", json!(hi.h.m()));
            r.extra.insert("x", json!(hi.x));
            r.extra.insert("k_prime", json!(hi.k_prime));
            r.extra.insert("chordal_after_x", json!(h_minus_x_is_chordal(&hi)));
            r.extra.insert("structure_failures", json!(check_structure(&hi)));
            if *verify {
                let check = verify_reduction(&g, *k, &hi)?;
                r.feasible = check.path.is_some();
                r.certificate = check.path.clone().map(Path::into_vec);
                r.extra.insert("reduction", json!(check));
            }
            Ok(())
        }
        Cmd::VerifyPath { graph, path, ell } => {
            r.command = "verify-path";
            let g = read_graph(graph)?;
            let p = Path::new(&g, path.clone())?;
            let ecc = path_eccentricity(&g, &p)?;
            let shortest = is_shortest_path(&g, &p);
            r.ell = Some(*ell);
            r.feasible = shortest && ecc <= *ell;
            r.certificate = Some(p.into_vec());
            r.extra.insert("eccentricity", json!(ecc));
            r.extra.insert("shortest", json!(shortest));
            Ok(())
        }
        Cmd::GenRandom { .. } => unreachable!("handled before reporting"),
        Cmd::Stats { graph, kmax } => {
            r.command = "stats";
            let g = read_graph(graph)?;
            r.feasible = true;
            r.extra.insert("n", json!(g.n()));
            r.extra.insert("m", json!(g.m()));
            r.extra.insert("components", json!(g.components().len()));
            if g.n() > 0 && g.is_connected() {
                let d = all_pairs_distances(&g);
                r.extra.insert("diameter", json!(d.diameter()));
                r.extra.insert("radius", json!(d.radius()));
            }
            for (name, kind) in [("fvs", DeletionKind::Fvs), ("dpd", DeletionKind::Dpd), ("svd", DeletionKind::Svd)] {
                let found = find_deletion_set(&g, kind, *kmax).map(|d| d.vertices);
                r.extra.insert(name, json!(found));
            }
            Ok(())
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if let Some(j) = cli.jobs {
        if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(j.max(1)).build_global() {
            eprintln!("esp: {e}");
            return ExitCode::from(2);
        }
    }
    if let Cmd::GenRandom { n, p, seed } = cli.cmd {
        if !(0.0..=1.0).contains(&p) {
            eprintln!("esp: --p must lie in [0, 1]");
            return ExitCode::from(2);
        }
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        print!("{}", random_connected(n, p, &mut rng).to_edge_list());
        return ExitCode::SUCCESS;
    }
    let mut r = Report { schema: SCHEMA, ..Default::default() };
    let start = Instant::now();
    if let Err(f) = run(&cli, &mut r) {
        eprintln!("esp: {}", f.msg);
        return ExitCode::from(f.code);
    }
    if cli.timings {
        r.timings = Some(BTreeMap::from([("total_seconds", start.elapsed().as_secs_f64())]));
    }
    println!("{}", serde_json::to_string_pretty(&r).expect("serializable"));
    ExitCode::from(if r.feasible { 0 } else { 1 })
}
