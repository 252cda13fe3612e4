//! `rankfn`: command-line front end. Prints one JSON document (DOT for
//! `hasse`) on stdout; failures go to stderr as `{"error":{"kind","message"}}`.
//!
//! Exit codes: 0 success, 1 rejected input or failed computation, 2 usage.

use std::io::{self, Write};
use std::path::Path;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use rankfn::oracle::{check_class, verify_solution, DEFAULT_SEED};
use rankfn::{
    check_solution, class_rank, dominates, dominating_tuple, enumerate_sol, hasse_dot,
    irreducible_components, is_irreducible, orbit_capacity, orbit_dimension, rank_matrix,
    search_general, sol_capacity, solve_nilpotent, solve_with_stable_ranks, EquationSpec, FnSpec,
    MatrixClass, Partition, RankFunction, SolutionTuple, DEFAULT_BUDGET,
};
use serde::de::DeserializeOwned;
use serde_json::{json, Value};

#[derive(Parser)]
#[command(
    name = "rankfn",
    version,
    about = "Rank functions of matrix powers and rank function equations"
)]
struct Cli {
    /// Worker threads for enumeration and search (default: all cores).
    #[arg(long, global = true)]
    workers: Option<usize>,
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Args)]
struct SolArgs {
    #[arg(long)]
    n: usize,
    #[arg(long)]
    k: usize,
    /// `id`, `square` or `table:0,1,3,...`
    #[arg(long, default_value = "id")]
    f: String,
    /// Maximum number of tuples the enumeration may visit.
    #[arg(long, default_value_t = DEFAULT_BUDGET)]
    budget: u64,
}

#[derive(Subcommand)]
enum Cmd {
    /// Rank function of a class, `rk(M^m)` for m = 0..n.
    Rank {
        #[arg(long)]
        jp: String,
        /// Stable rank (size of the invertible part).
        #[arg(long, default_value_t = 0)]
        q: usize,
    },
    /// Class with the given rank function.
    Unrank {
        /// Comma-separated values r(0),...,r(n).
        values: String,
    },
    /// Whether `rk(A^m) <= rk(B^m)` for every m; pass `--jp` twice.
    Dominates {
        #[arg(long, num_args = 1, required = true)]
        jp: Vec<String>,
    },
    /// Nilpotent right-hand side for the given left-hand partitions.
    Solve {
        #[arg(long)]
        n: usize,
        #[arg(long, default_value = "id")]
        f: String,
        #[arg(long, required = true)]
        jp: Vec<String>,
    },
    /// Right-hand class for left-hand classes written `PARTS:Q`.
    SolveStable {
        #[arg(long)]
        n: usize,
        #[arg(long, default_value = "id")]
        f: String,
        #[arg(long, required = true)]
        class: Vec<String>,
    },
    /// Check a solution tuple against an equation.
    Check {
        #[command(flatten)]
        eq: EqArgs,
        #[command(flatten)]
        tuple: TupleArgs,
    },
    /// All nontrivial nilpotent solutions of a general equation.
    Search {
        #[arg(long)]
        n: usize,
        #[arg(long)]
        k: usize,
        #[arg(long, default_value = "id")]
        f: String,
        #[arg(long, default_value = "id")]
        g: String,
        #[arg(long)]
        include_zero: bool,
        #[arg(long, default_value_t = DEFAULT_BUDGET)]
        budget: u64,
    },
    /// Solution set of the equation with g = id.
    Enumerate(SolArgs),
    /// Irreducible components of the closed solution set.
    Components(SolArgs),
    /// Linear capacity of an orbit (`--jp`) or of the closed solution set.
    Capacity {
        #[arg(long, conflicts_with_all = ["n", "k"])]
        jp: Option<String>,
        #[arg(long, required_unless_present = "jp")]
        n: Option<usize>,
        #[arg(long, required_unless_present = "jp")]
        k: Option<usize>,
        #[arg(long, default_value = "id")]
        f: String,
        #[arg(long, default_value_t = DEFAULT_BUDGET)]
        budget: u64,
    },
    /// Least tuple of partitions dominating every solution.
    DominatingTuple(SolArgs),
    /// Dominance order on partitions of n as a DOT digraph.
    Hasse {
        #[arg(long)]
        n: usize,
    },
    /// Check a class or a solution tuple on explicit rational matrices.
    OracleVerify {
        /// Class `PARTS:Q`; checks its rank function on conjugated matrices.
        #[arg(long, conflicts_with_all = ["solution", "rhs", "jp"])]
        class: Option<String>,
        #[command(flatten)]
        eq: EqArgs,
        #[command(flatten)]
        tuple: TupleArgs,
        #[arg(long, default_value_t = 10)]
        seeds: u64,
        /// Base seed; defaults to `RANKFN_SEED` or a fixed constant.
        #[arg(long)]
        seed: Option<u64>,
    },
}

#[derive(Args)]
struct EqArgs {
    /// Equation as JSON (inline or a file path).
    #[arg(long, conflicts_with_all = ["n", "g", "include_zero"])]
    spec: Option<String>,
    #[arg(long)]
    n: Option<usize>,
    #[arg(long)]
    f: Option<String>,
    #[arg(long)]
    g: Option<String>,
    #[arg(long)]
    include_zero: bool,
}

#[derive(Args)]
struct TupleArgs {
    /// Solution tuple as JSON (inline or a file path).
    #[arg(long, conflicts_with_all = ["jp", "rhs"])]
    solution: Option<String>,
    /// Left-hand nilpotent partitions.
    #[arg(long)]
    jp: Vec<String>,
    /// Right-hand nilpotent partition.
    #[arg(long)]
    rhs: Option<String>,
}

/// Failure reported on stderr with exit status 1.
struct Failure {
    kind: String,
    message: String,
}

impl From<rankfn::Error> for Failure {
    fn from(e: rankfn::Error) -> Self {
        Failure {
            kind: e.kind().to_string(),
            message: e.to_string(),
        }
    }
}

fn fail(kind: &str, message: impl Into<String>) -> Failure {
    Failure {
        kind: kind.into(),
        message: message.into(),
    }
}

type Out = Result<String, Failure>;

fn partition(s: &str) -> Result<Partition, Failure> {
    Ok(s.parse()?)
}

fn class(s: &str) -> Result<MatrixClass, Failure> {
    Ok(s.parse()?)
}

fn function(s: &str) -> Result<FnSpec, Failure> {
    s.parse().map_err(|e| fail("MalformedFunction", e))
}

fn json_input<T: DeserializeOwned>(arg: &str) -> Result<T, Failure> {
    let text = if arg.trim_start().starts_with(['{', '[']) {
        arg.to_string()
    } else {
        std::fs::read_to_string(Path::new(arg)).map_err(|e| fail("Io", format!("{arg}: {e}")))?
    };
    serde_json::from_str(&text).map_err(|e| fail("MalformedJson", e.to_string()))
}

fn to_json(v: &impl serde::Serialize) -> Out {
    serde_json::to_string(v).map_err(|e| fail("Serialization", e.to_string()))
}

fn base_seed(flag: Option<u64>) -> Result<u64, Failure> {
    if let Some(s) = flag {
        return Ok(s);
    }
    match std::env::var("RANKFN_SEED") {
        Ok(raw) => {
            let parsed = match raw.strip_prefix("0x") {
                Some(hex) => u64::from_str_radix(hex, 16),
                None => raw.parse(),
            };
            parsed.map_err(|_| fail("MalformedSeed", format!("RANKFN_SEED={raw:?} is not a u64")))
        }
        Err(_) => Ok(DEFAULT_SEED),
    }
}

fn tuple(args: &TupleArgs) -> Result<SolutionTuple, Failure> {
    if let Some(s) = &args.solution {
        return json_input(s);
    }
    let rhs = args
        .rhs
        .as_deref()
        .ok_or_else(|| fail("MissingArgument", "need --solution or --jp ... --rhs"))?;
    let lhs = args
        .jp
        .iter()
        .map(|s| partition(s))
        .collect::<Result<Vec<_>, _>>()?;
    Ok(SolutionTuple::nilpotent(&lhs, &partition(rhs)?)?)
}

fn equation(args: &EqArgs, sol: &SolutionTuple) -> Result<EquationSpec, Failure> {
    if let Some(s) = &args.spec {
        return json_input(s);
    }
    let n = args.n.unwrap_or_else(|| sol.rhs().n());
    let f = function(args.f.as_deref().unwrap_or("id"))?;
    let g = function(args.g.as_deref().unwrap_or("id"))?;
    Ok(EquationSpec {
        n,
        k: sol.k(),
        f,
        g,
        include_zero: args.include_zero,
    })
}

fn run(cmd: Cmd) -> Out {
    match cmd {
        Cmd::Rank { jp, q } => to_json(&class_rank(&MatrixClass::new(partition(&jp)?, q))),
        Cmd::Unrank { values } => {
            let values = values
                .split(',')
                .map(|v| v.trim().parse::<usize>())
                .collect::<Result<Vec<_>, _>>()
                .map_err(|e| fail("MalformedRankFunction", format!("{values:?}: {e}")))?;
            to_json(&RankFunction::new(values)?.to_class())
        }
        Cmd::Dominates { jp } => {
            let [a, b] = jp.as_slice() else {
                return Err(fail(
                    "WrongArgumentCount",
                    format!("expected two --jp, got {}", jp.len()),
                ));
            };
            let (a, b) = (partition(a)?, partition(b)?);
            let ra = class_rank(&MatrixClass::nilpotent(a));
            let rb = class_rank(&MatrixClass::nilpotent(b));
            to_json(&json!({ "dominates": dominates(&ra, &rb)? }))
        }
        Cmd::Solve { n, f, jp } => {
            let lhs = jp
                .iter()
                .map(|s| partition(s))
                .collect::<Result<Vec<_>, _>>()?;
            if let Some(bad) = lhs.iter().find(|p| p.n() != n) {
                return Err(rankfn::Error::SizeMismatch {
                    expected: n,
                    found: bad.n(),
                }
                .into());
            }
            let table = function(&f)?.convex_table(n)?;
            match solve_nilpotent(&table, &lhs)? {
                Some(rhs) => {
                    let rm = rank_matrix(&SolutionTuple::nilpotent(&lhs, &rhs)?);
                    to_json(&json!({ "rhs": rhs, "rank_matrix": rm }))
                }
                None => to_json(&json!({ "rhs": null })),
            }
        }
        Cmd::SolveStable {
            n,
            f,
            class: classes,
        } => {
            let lhs = classes
                .iter()
                .map(|s| class(s))
                .collect::<Result<Vec<_>, _>>()?;
            if let Some(bad) = lhs.iter().find(|c| c.n() != n) {
                return Err(rankfn::Error::SizeMismatch {
                    expected: n,
                    found: bad.n(),
                }
                .into());
            }
            let table = function(&f)?.convex_table(n)?;
            match solve_with_stable_ranks(&table, &lhs)? {
                Some(rhs) => {
                    let rm = rank_matrix(&SolutionTuple::new(lhs, rhs.clone())?);
                    to_json(&json!({ "rhs": rhs, "rank_matrix": rm }))
                }
                None => to_json(&json!({ "rhs": null })),
            }
        }
        Cmd::Check { eq, tuple: t } => {
            let sol = tuple(&t)?;
            let spec = equation(&eq, &sol)?;
            to_json(&json!({ "valid": check_solution(&spec, &sol)? }))
        }
        Cmd::Search {
            n,
            k,
            f,
            g,
            include_zero,
            budget,
        } => {
            let spec = EquationSpec {
                n,
                k,
                f: function(&f)?,
                g: function(&g)?,
                include_zero,
            };
            to_json(&search_general(&spec, budget)?)
        }
        Cmd::Enumerate(a) => to_json(&enumerate_sol(a.n, a.k, &function(&a.f)?, a.budget)?),
        Cmd::Components(a) => {
            let s = enumerate_sol(a.n, a.k, &function(&a.f)?, a.budget)?;
            let comps = irreducible_components(&s)?;
            let dims: Vec<u64> = comps.iter().map(|c| c.dimension).collect();
            to_json(&json!({
                "count": comps.len(),
                "dimensions": dims,
                "capacity": sol_capacity(&s)?,
                "irreducible": is_irreducible(&s),
                "components": comps,
            }))
        }
        Cmd::Capacity {
            jp,
            n,
            k,
            f,
            budget,
        } => {
            if let Some(jp) = jp {
                let p = partition(&jp)?;
                return to_json(&json!({
                    "dimension": orbit_dimension(&p),
                    "capacity": orbit_capacity(&p).to_string(),
                }));
            }
            let (n, k) = (n.expect("required by clap"), k.expect("required by clap"));
            let s = enumerate_sol(n, k, &function(&f)?, budget)?;
            to_json(&json!({ "capacity": sol_capacity(&s)? }))
        }
        Cmd::DominatingTuple(a) => to_json(&dominating_tuple(&enumerate_sol(
            a.n,
            a.k,
            &function(&a.f)?,
            a.budget,
        )?)?),
        Cmd::Hasse { n } => hasse_dot(n).map_err(Failure::from),
        Cmd::OracleVerify {
            class: c,
            eq,
            tuple: t,
            seeds,
            seed,
        } => {
            let base = base_seed(seed)?;
            if let Some(c) = c {
                let c = class(&c)?;
                let found = check_class(&c, base, seeds);
                return to_json(&json!({
                    "verified": found.is_empty(),
                    "seed": base,
                    "seeds": seeds,
                    "discrepancies": found,
                }));
            }
            let sol = tuple(&t)?;
            let spec = equation(&eq, &sol)?;
            let mut failing = Vec::new();
            for i in 0..seeds.max(1) {
                let s = base.wrapping_add(i);
                if !verify_solution(&spec, &sol, s)? {
                    failing.push(s);
                }
            }
            to_json(&json!({
                "verified": failing.is_empty(),
                "seed": base,
                "seeds": seeds.max(1),
                "failing_seeds": failing,
            }))
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if let Some(w) = cli.workers {
        if let Err(e) = rayon::ThreadPoolBuilder::new()
            .num_threads(w)
            .build_global()
        {
            eprintln!(
                "{}",
                json!({ "error": { "kind": "Workers", "message": e.to_string() } })
            );
            return ExitCode::FAILURE;
        }
    }
    match run(cli.cmd) {
        Ok(out) => {
            let newline = if out.ends_with('\n') { "" } else { "\n" };
            // a closed pipe downstream is not our failure
            let _ = write!(io::stdout().lock(), "{out}{newline}");
            ExitCode::SUCCESS
        }
        Err(Failure { kind, message }) => {
            let err: Value = json!({ "error": { "kind": kind, "message": message } });
            eprintln!("{err}");
            ExitCode::FAILURE
        }
    }
}
