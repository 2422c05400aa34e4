//! Workbench command line: every subcommand reads its inputs, runs one
//! library operation under an explicit step budget, and prints a single
//! JSON object. Output is a pure function of inputs and flags; diagnostics
//! go to stderr.

use clap::{Args, Parser, Subcommand};
use serde_json::{json, Value};
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use ucaw_core::algebra::{parse_algebra, serialize_algebra};
use ucaw_core::clonoid::{
    clonoid_leq_criterion, generate_clonoid, phi_forks, th_clonoid, galois_check, Clonoid,
    CriterionVerdict, GaloisVerdict,
};
use ucaw_core::maltsev::{has_edge_term, min_edge_arity, verify_edge_term};
use ucaw_core::subpower::{fork, sg};
use ucaw_core::variety::{
    free_algebra, is_cardinality_critical, subcovers, var_member,
};
use ucaw_core::wpo::{is_antichain, lea_witness, tab, Word};
use ucaw_core::{Budget, Error, FiniteAlgebra};

const SCHEMA: u64 = 1;
const DEFAULT_MAX_TUPLES: u64 = 10_000_000;

#[derive(Parser)]
#[command(name = "ucaw", version, about = "workbench for finite universal algebra")]
struct Cli {
    /// Step budget for closure computations
    #[arg(long, global = true, default_value_t = DEFAULT_MAX_TUPLES)]
    max_tuples: u64,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Summarize an algebra file
    Info { file: PathBuf },
    /// Search for a k-edge term
    EdgeTerm {
        file: PathBuf,
        /// Edge arity to test
        #[arg(long)]
        k: Option<usize>,
        /// Search the least edge arity instead
        #[arg(long)]
        min: bool,
        /// Upper bound for --min
        #[arg(long, default_value_t = 4)]
        kmax: usize,
    },
    /// Number of term functions at a given arity
    CloneSize {
        file: PathBuf,
        #[arg(long)]
        arity: usize,
    },
    /// Free algebra of the generated variety
    Free {
        file: PathBuf,
        #[arg(long)]
        gens: usize,
    },
    /// Variety membership: does the algebra lie in Var of --in?
    Member {
        file: PathBuf,
        #[arg(long = "in")]
        in_file: PathBuf,
    },
    /// Fork relations of a generated subpower
    Forks {
        file: PathBuf,
        /// Semicolon-separated generator tuples, e.g. "0 1; 1 0"
        #[arg(long)]
        gens: String,
        /// Restrict to one place (1-based); all places otherwise
        #[arg(long)]
        place: Option<usize>,
    },
    /// Maximal proper subvariety candidates
    Subcovers {
        file: PathBuf,
        /// Free-generator bound for the congruence fingerprint
        #[arg(long, default_value_t = 2)]
        bound: usize,
    },
    /// Cardinality criticality of an algebra
    Critical {
        file: PathBuf,
        /// Step budget override for the member enumeration
        #[arg(long)]
        budget: Option<u64>,
    },
    /// Word order operations
    #[command(subcommand)]
    Wpo(WpoCommand),
    /// Clonoid operations
    #[command(subcommand)]
    Clonoid(ClonoidCommand),
}

#[derive(Subcommand)]
enum WpoCommand {
    /// Embedding order verdict and witness
    Lea(WordPair),
    /// Backward index map along the greedy witness
    Tab(WordPair),
    /// Antichain check over a list of words
    Antichain {
        /// Space-separated letter words
        words: Vec<String>,
        #[arg(long)]
        t: usize,
    },
}

#[derive(Args)]
struct WordPair {
    a: String,
    b: String,
    #[arg(long)]
    t: usize,
}

#[derive(Subcommand)]
enum ClonoidCommand {
    /// Generate layers from a seed file
    Gen {
        seeds: PathBuf,
        #[arg(long, default_value_t = 3)]
        bound: usize,
    },
    /// Fork relation of a generated clonoid at a word
    Forks {
        seeds: PathBuf,
        /// Space-separated letters
        #[arg(long)]
        word: String,
        #[arg(long, default_value_t = 3)]
        bound: usize,
    },
    /// Bounded comparison criterion between two generated clonoids
    Leq {
        seeds1: PathBuf,
        seeds2: PathBuf,
        /// Edge arity of the target algebra
        #[arg(long)]
        k: usize,
        /// Word length bound
        #[arg(long)]
        len: usize,
        #[arg(long, default_value_t = 3)]
        bound: usize,
    },
    /// Equational theory of Var(B) encoded over A at one arity
    Th {
        a: PathBuf,
        b: PathBuf,
        #[arg(long)]
        arity: usize,
    },
    /// Compare membership with theory inclusion
    Galois {
        a: PathBuf,
        b1: PathBuf,
        b2: PathBuf,
        #[arg(long, default_value_t = 2)]
        arity: usize,
    },
}

fn load_algebra(path: &Path) -> Result<FiniteAlgebra, CliError> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| CliError::Usage(format!("cannot read {}: {e}", path.display())))?;
    parse_algebra(&text).map_err(|e| CliError::Usage(format!("{}: {e}", path.display())))
}

fn parse_word(text: &str, t: usize) -> Result<Word, CliError> {
    let letters: Vec<u8> = text
        .split_whitespace()
        .map(|s| s.parse::<u8>().map_err(|_| CliError::Usage(format!("bad letter `{s}`"))))
        .collect::<Result<_, _>>()?;
    Word::new(t, letters).map_err(CliError::from)
}

fn parse_generators(text: &str, size: usize) -> Result<(usize, Vec<Vec<u8>>), CliError> {
    let mut tuples = Vec::new();
    for part in text.split(';') {
        let tuple: Vec<u8> = part
            .split_whitespace()
            .map(|s| s.parse::<u8>().map_err(|_| CliError::Usage(format!("bad coordinate `{s}`"))))
            .collect::<Result<_, _>>()?;
        if tuple.iter().any(|&v| v as usize >= size) {
            return Err(CliError::Usage(format!("coordinate out of range in `{part}`")));
        }
        if !tuple.is_empty() {
            tuples.push(tuple);
        }
    }
    let width = tuples.first().map(Vec::len).ok_or_else(|| {
        CliError::Usage("generator list must contain at least one tuple".into())
    })?;
    if tuples.iter().any(|t| t.len() != width) {
        return Err(CliError::Usage("generator tuples must share one width".into()));
    }
    Ok((width, tuples))
}

struct SeedFile {
    source_size: usize,
    target: FiniteAlgebra,
    seeds: Vec<(usize, Vec<u8>)>,
}

fn load_seed_file(path: &Path) -> Result<SeedFile, CliError> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| CliError::Usage(format!("cannot read {}: {e}", path.display())))?;
    let value: Value = serde_json::from_str(&text)
        .map_err(|e| CliError::Usage(format!("{}: invalid JSON: {e}", path.display())))?;
    let obj = value
        .as_object()
        .ok_or_else(|| CliError::Usage(format!("{}: top level must be an object", path.display())))?;
    let source_size = obj
        .get("source_size")
        .and_then(Value::as_u64)
        .ok_or_else(|| CliError::Usage(format!("{}: missing \"source_size\"", path.display())))?
        as usize;
    let target = match obj.get("target") {
        Some(Value::String(file)) => {
            let base = path.parent().unwrap_or(Path::new("."));
            load_algebra(&base.join(file))?
        }
        Some(inline @ Value::Object(_)) => parse_algebra(&inline.to_string())
            .map_err(|e| CliError::Usage(format!("{}: target: {e}", path.display())))?,
        _ => return Err(CliError::Usage(format!("{}: missing \"target\"", path.display()))),
    };
    let mut seeds = Vec::new();
    for (i, seed) in obj
        .get("seeds")
        .and_then(Value::as_array)
        .ok_or_else(|| CliError::Usage(format!("{}: missing \"seeds\" list", path.display())))?
        .iter()
        .enumerate()
    {
        let seed = seed
            .as_object()
            .ok_or_else(|| CliError::Usage(format!("seed {i} must be an object")))?;
        let arity = seed
            .get("arity")
            .and_then(Value::as_u64)
            .ok_or_else(|| CliError::Usage(format!("seed {i}: missing \"arity\"")))? as usize;
        let table: Vec<u8> = seed
            .get("table")
            .and_then(Value::as_array)
            .ok_or_else(|| CliError::Usage(format!("seed {i}: missing \"table\"")))?
            .iter()
            .map(|v| {
                v.as_u64()
                    .map(|x| x as u8)
                    .ok_or_else(|| CliError::Usage(format!("seed {i}: non-integer table entry")))
            })
            .collect::<Result<_, _>>()?;
        seeds.push((arity, table));
    }
    Ok(SeedFile { source_size, target, seeds })
}

enum CliError {
    Usage(String),
    Budget(String),
    Internal(String),
}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        match e {
            Error::BudgetExceeded(limit) => {
                CliError::Budget(format!("step budget of {limit} exhausted"))
            }
            Error::Cancelled => CliError::Budget("cancelled".into()),
            Error::LimitExceeded(limit) => {
                CliError::Budget(format!("enumeration limit of {limit} exceeded"))
            }
            other => CliError::Internal(other.to_string()),
        }
    }
}

fn word_json(w: &Word) -> Value {
    Value::Array(w.letters().iter().map(|&l| Value::from(l)).collect())
}

fn pairs_json(pairs: &std::collections::BTreeSet<(u8, u8)>) -> Value {
    Value::Array(
        pairs
            .iter()
            .map(|&(x, y)| Value::Array(vec![Value::from(x), Value::from(y)]))
            .collect(),
    )
}

fn generate_bounded(
    seed_file: &SeedFile,
    bound: usize,
    budget: &Budget,
) -> Result<Clonoid, CliError> {
    generate_clonoid(
        &seed_file.target,
        seed_file.source_size,
        &seed_file.seeds,
        bound,
        budget,
    )
    .map_err(CliError::from)
}

/// Content-addressed free-algebra cache: the key digests the canonical
/// serialization and the generator count, the value stores the element
/// tuples. Corrupt entries are recomputed and replaced with a warning.
fn free_with_cache(
    alg: &FiniteAlgebra,
    gens: usize,
    budget: &Budget,
) -> Result<(Vec<Vec<u8>>, bool), CliError> {
    let dir = match std::env::var_os("UCAW_CACHE_DIR") {
        Some(d) => PathBuf::from(d),
        None => {
            let free = free_algebra(alg, gens, budget)?;
            return Ok((free.carrier.tuples().to_vec(), false));
        }
    };
    use sha2::{Digest, Sha256};
    let mut hasher = Sha256::new();
    hasher.update(serialize_algebra(alg).as_bytes());
    hasher.update(format!("gens:{gens}").as_bytes());
    let key = format!("{:x}", hasher.finalize());
    let entry = dir.join(format!("free-{key}.json"));
    if let Ok(text) = std::fs::read_to_string(&entry) {
        match serde_json::from_str::<Value>(&text) {
            Ok(v) => {
                let count = v.get("count").and_then(Value::as_u64);
                let tuples: Option<Vec<Vec<u8>>> = v.get("tuples").and_then(Value::as_array).map(|ts| {
                    ts.iter()
                        .map(|t| {
                            t.as_array()
                                .map(|xs| xs.iter().filter_map(Value::as_u64).map(|x| x as u8).collect())
                                .unwrap_or_default()
                        })
                        .collect()
                });
                if let (Some(count), Some(tuples)) = (count, tuples) {
                    if tuples.len() as u64 == count && !tuples.is_empty() {
                        return Ok((tuples, true));
                    }
                }
                eprintln!("warning: corrupt cache entry {}, recomputing", entry.display());
            }
            Err(_) => {
                eprintln!("warning: corrupt cache entry {}, recomputing", entry.display());
            }
        }
    }
    let free = free_algebra(alg, gens, budget)?;
    let tuples = free.carrier.tuples().to_vec();
    std::fs::create_dir_all(&dir).ok();
    let payload = json!({
        "count": tuples.len(),
        "tuples": tuples,
    });
    if std::fs::write(&entry, payload.to_string()).is_err() {
        eprintln!("warning: cannot write cache entry {}", entry.display());
    }
    Ok((tuples, false))
}

fn run(cli: Cli) -> Result<Value, CliError> {
    let budget = Budget::new(cli.max_tuples);
    match cli.command {
        Command::Info { file } => {
            let alg = load_algebra(&file)?;
            let ops: Vec<Value> = alg
                .signature()
                .symbols()
                .iter()
                .map(|s| json!({"symbol": s.name, "arity": s.arity}))
                .collect();
            Ok(json!({
                "command": "info",
                "name": alg.name().map(Value::from).unwrap_or(Value::Null),
                "size": alg.size(),
                "operations": ops,
            }))
        }
        Command::EdgeTerm { file, k, min, kmax } => {
            let alg = load_algebra(&file)?;
            if min {
                let found = min_edge_arity(&alg, kmax, &budget)?;
                return Ok(json!({
                    "command": "edge-term",
                    "mode": "min",
                    "kmax": kmax,
                    "min_edge_arity": found.as_ref().map(|(k, _)| Value::from(*k)).unwrap_or(Value::Null),
                    "witness": found
                        .map(|(_, t)| Value::from(t.display(alg.signature()).to_string()))
                        .unwrap_or(Value::Null),
                    "bound": "up-to-bound",
                }));
            }
            let k = k.ok_or_else(|| CliError::Usage("--k or --min is required".into()))?;
            let witness = has_edge_term(&alg, k, &budget)?;
            if let Some(t) = &witness {
                // re-verification is part of the verdict
                if !verify_edge_term(&alg, t, k)? {
                    return Err(CliError::Internal("witness failed re-verification".into()));
                }
            }
            Ok(json!({
                "command": "edge-term",
                "k": k,
                "verdict": witness.is_some(),
                "witness": witness
                    .map(|t| Value::from(t.display(alg.signature()).to_string()))
                    .unwrap_or(Value::Null),
            }))
        }
        Command::CloneSize { file, arity } => {
            let alg = load_algebra(&file)?;
            let free = free_algebra(&alg, arity, &budget)?;
            Ok(json!({
                "command": "clone-size",
                "arity": arity,
                "count": free.carrier.len(),
            }))
        }
        Command::Free { file, gens } => {
            let alg = load_algebra(&file)?;
            let (tuples, cache_hit) = free_with_cache(&alg, gens, &budget)?;
            Ok(json!({
                "command": "free",
                "gens": gens,
                "count": tuples.len(),
                "width": tuples.first().map(Vec::len).unwrap_or(0),
                "cache_hit": cache_hit,
            }))
        }
        Command::Member { file, in_file } => {
            let b = load_algebra(&file)?;
            let a = load_algebra(&in_file)?;
            let verdict = var_member(&b, &a, &budget)?;
            Ok(json!({
                "command": "member",
                "verdict": verdict.member,
                "witness": verdict
                    .witness
                    .map(|id| Value::from(id.display(a.signature())))
                    .unwrap_or(Value::Null),
            }))
        }
        Command::Forks { file, gens, place } => {
            let alg = load_algebra(&file)?;
            let (width, tuples) = parse_generators(&gens, alg.size())?;
            let sp = sg(&alg, width, &tuples, false, &budget)?;
            let places: Vec<usize> = match place {
                Some(p) => vec![p],
                None => (1..=width).collect(),
            };
            let mut forks = Vec::new();
            for p in places {
                let f = fork(&sp, p)?;
                forks.push(json!({"place": p, "pairs": pairs_json(&f.pairs)}));
            }
            Ok(json!({
                "command": "forks",
                "width": width,
                "count": sp.len(),
                "forks": forks,
            }))
        }
        Command::Subcovers { file, bound } => {
            let alg = load_algebra(&file)?;
            let classes = subcovers(&alg, bound, &budget)?;
            let payload: Vec<Value> = classes
                .iter()
                .map(|c| {
                    json!({
                        "identities": c
                            .identities
                            .iter()
                            .map(|id| Value::from(id.display(alg.signature())))
                            .collect::<Vec<_>>(),
                        "quotient_sizes": c.quotient_sizes,
                    })
                })
                .collect();
            Ok(json!({
                "command": "subcovers",
                "bound": bound,
                "classes": payload,
                "note": "maximal up to the free-generator bound",
            }))
        }
        Command::Critical { file, budget: step_override } => {
            let alg = load_algebra(&file)?;
            let budget = Budget::new(step_override.unwrap_or(cli.max_tuples));
            let verdict = is_cardinality_critical(&alg, &budget)?;
            Ok(json!({
                "command": "critical",
                "verdict": verdict,
            }))
        }
        Command::Wpo(cmd) => run_wpo(cmd),
        Command::Clonoid(cmd) => run_clonoid(cmd, &budget),
    }
}

fn run_wpo(cmd: WpoCommand) -> Result<Value, CliError> {
    match cmd {
        WpoCommand::Lea(pair) => {
            let a = parse_word(&pair.a, pair.t)?;
            let b = parse_word(&pair.b, pair.t)?;
            let witness = lea_witness(&a, &b)?;
            Ok(json!({
                "command": "wpo-lea",
                "verdict": witness.is_some(),
                "witness": witness
                    .map(|w| Value::from(w.positions().to_vec()))
                    .unwrap_or(Value::Null),
            }))
        }
        WpoCommand::Tab(pair) => {
            let a = parse_word(&pair.a, pair.t)?;
            let b = parse_word(&pair.b, pair.t)?;
            let h = lea_witness(&a, &b)?
                .ok_or_else(|| CliError::Usage("the first word must embed into the second".into()))?;
            let map = tab(&a, &b, &h)?;
            Ok(json!({
                "command": "wpo-tab",
                "witness": h.positions().to_vec(),
                "tab": map,
            }))
        }
        WpoCommand::Antichain { words, t } => {
            let parsed: Vec<Word> = words
                .iter()
                .map(|w| parse_word(w, t))
                .collect::<Result<_, _>>()?;
            if parsed.is_empty() {
                return Err(CliError::Usage("at least one word is required".into()));
            }
            Ok(json!({
                "command": "wpo-antichain",
                "verdict": is_antichain(&parsed)?,
            }))
        }
    }
}

fn run_clonoid(cmd: ClonoidCommand, budget: &Budget) -> Result<Value, CliError> {
    match cmd {
        ClonoidCommand::Gen { seeds, bound } => {
            let file = load_seed_file(&seeds)?;
            let c = generate_bounded(&file, bound, budget)?;
            Ok(json!({
                "command": "clonoid-gen",
                "bound": bound,
                "layer_sizes": c.layer_sizes(),
                "empty_layers": c.has_empty_layer(),
            }))
        }
        ClonoidCommand::Forks { seeds, word, bound } => {
            let file = load_seed_file(&seeds)?;
            let c = generate_bounded(&file, bound, budget)?;
            let w = parse_word(&word, file.source_size)?;
            let f = phi_forks(&c, &w).map_err(CliError::from)?;
            Ok(json!({
                "command": "clonoid-forks",
                "word": word_json(&w),
                "pairs": pairs_json(&f.pairs),
            }))
        }
        ClonoidCommand::Leq { seeds1, seeds2, k, len, bound } => {
            let f1 = load_seed_file(&seeds1)?;
            let f2 = load_seed_file(&seeds2)?;
            let c = generate_bounded(&f1, bound, budget)?;
            let d = generate_bounded(&f2, bound, budget)?;
            let (verdict, witness) = match clonoid_leq_criterion(&c, &d, k, len)? {
                CriterionVerdict::Holds => ("holds", Value::Null),
                CriterionVerdict::HoldsUpToBound => ("holds-up-to-bound", Value::Null),
                CriterionVerdict::FailsLowArity(f) => {
                    ("fails", json!({"kind": "low-arity-table", "table": f}))
                }
                CriterionVerdict::FailsAtWord(w) => {
                    ("fails", json!({"kind": "word", "word": word_json(&w)}))
                }
            };
            Ok(json!({
                "command": "clonoid-leq",
                "k": k,
                "len": len,
                "verdict": verdict,
                "witness": witness,
            }))
        }
        ClonoidCommand::Th { a, b, arity } => {
            let a = load_algebra(&a)?;
            let b = load_algebra(&b)?;
            let th = th_clonoid(&a, &b, arity, budget)?;
            let pairs: Vec<Value> = th
                .iter()
                .map(|(u, v)| json!([u, v]))
                .collect();
            Ok(json!({
                "command": "clonoid-th",
                "arity": arity,
                "count": th.len(),
                "pairs": pairs,
            }))
        }
        ClonoidCommand::Galois { a, b1, b2, arity } => {
            let a = load_algebra(&a)?;
            let b1 = load_algebra(&b1)?;
            let b2 = load_algebra(&b2)?;
            let report = galois_check(&a, &b1, &b2, arity, budget)?;
            Ok(json!({
                "command": "clonoid-galois",
                "arity_bound": arity,
                "member": report.member,
                "inclusions": report.inclusions,
                "verdict": match report.verdict {
                    GaloisVerdict::Agreement => "agreement".to_string(),
                    GaloisVerdict::ConsistentUpToBound => "consistent-up-to-bound".to_string(),
                    GaloisVerdict::Discrepancy(n) => format!("discrepancy-at-{n}"),
                },
            }))
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(mut payload) => {
            if let Some(obj) = payload.as_object_mut() {
                obj.insert("schema".into(), Value::from(SCHEMA));
            }
            println!("{payload}");
            ExitCode::SUCCESS
        }
        Err(CliError::Usage(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
        Err(CliError::Budget(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(3)
        }
        Err(CliError::Internal(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
    }
}
