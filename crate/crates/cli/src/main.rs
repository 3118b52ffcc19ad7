use std::fs;
use std::io::{self, Read};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::{Parser, Subcommand, ValueEnum};

use mstint::extensions::{
    mcp_to_interdiction, shen_fixture, tsp_interdict, tsp_walk_length, McpInstance, TspInstance, TSP_LIMIT,
};
use mstint::io::{
    generate, parse_edge_ids, parse_instance, serialize_instance, BudgetPolicy, GeneratorParams, ReportDocument,
    TreePolicy,
};
use mstint::levels::{prepare, round_weights, Stage};
use mstint::pareto::extreme_supported_tuples;
use mstint::patterns::{audit, Audit, PartitionTower};
use mstint::sfm::Backend;
use mstint::solver::{exact_opt, solve, SolveOptions, EXACT_LIMIT};
use mstint::{graph, EdgeSet, Instance};

#[derive(Parser)]
#[command(name = "mstint", version, about = "Budgeted minimum spanning tree interdiction")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum BackendArg {
    Auto,
    Exhaustive,
    Mnp,
}

impl From<BackendArg> for Backend {
    fn from(b: BackendArg) -> Self {
        match b {
            BackendArg::Auto => Backend::Auto,
            BackendArg::Exhaustive => Backend::Exhaustive,
            BackendArg::Mnp => Backend::MinNormPoint,
        }
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum TreeArg {
    None,
    Spanning,
    Fixed,
}

#[derive(Subcommand)]
enum Command {
    /// Run the approximation algorithm and print a report.
    Solve {
        /// Instance file, or `-` for standard input.
        file: PathBuf,
        #[arg(long, value_enum, default_value = "auto")]
        backend: BackendArg,
    },
    /// Find an optimal interdiction set by exhaustive search.
    Exact {
        file: PathBuf,
        #[arg(long, default_value_t = EXACT_LIMIT)]
        limit: usize,
    },
    /// List the extreme points of the cost/value trade-off curve.
    Pareto {
        file: PathBuf,
        #[arg(long, value_enum, default_value = "auto")]
        backend: BackendArg,
    },
    /// Check feasibility of a removal set and the analysis bounds for it.
    Verify {
        file: PathBuf,
        /// Edge ids separated by commas or spaces.
        removal: String,
    },
    /// Interdict a tour, reading edge weights as lengths.
    Tsp {
        file: PathBuf,
        #[arg(long, value_enum, default_value = "auto")]
        backend: BackendArg,
    },
    /// Encode maximum-components edge removal as MST interdiction.
    ///
    /// Edge weights in the input are ignored and costs are kept.
    ReduceMcp { file: PathBuf, q: u64 },
    /// Generate a seeded random instance.
    Gen {
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        n: usize,
        #[arg(long)]
        m: usize,
        #[arg(long, default_value_t = 8)]
        max_weight: u64,
        #[arg(long, default_value_t = 5)]
        max_cost: u64,
        /// Fixed budget; overrides the fraction.
        #[arg(long)]
        budget: Option<u64>,
        /// Budget as a fraction `num/den` of the total cost.
        #[arg(long, default_value = "1/2")]
        budget_fraction: String,
        #[arg(long, value_enum, default_value = "none")]
        tree: TreeArg,
    },
    /// Print a built-in instance.
    Fixtures {
        #[command(subcommand)]
        which: Fixture,
    },
}

#[derive(Subcommand)]
enum Fixture {
    /// Three-vertex multigraph where tree-and-replacement removals fall short.
    Shen,
}

fn read_instance(path: &Path) -> Result<Instance> {
    let text = if path == Path::new("-") {
        let mut s = String::new();
        io::stdin().read_to_string(&mut s).context("reading standard input")?;
        s
    } else {
        fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?
    };
    parse_instance(&text).with_context(|| format!("parsing {}", path.display()))
}

fn ids(set: &EdgeSet) -> String {
    set.iter().map(|id| id.to_string()).collect::<Vec<_>>().join(" ")
}

fn weights(instance: &Instance, set: &EdgeSet) -> String {
    let mut w: Vec<u64> = set.iter().map(|id| instance.edge(id).weight).collect();
    w.sort_unstable();
    w.iter().map(u64::to_string).collect::<Vec<_>>().join(" ")
}

fn holds(b: bool) -> &'static str {
    if b {
        "holds"
    } else {
        "fails"
    }
}

fn run(cli: Cli) -> Result<ExitCode> {
    match cli.command {
        Command::Solve { file, backend } => {
            let instance = read_instance(&file)?;
            let report = solve(&instance, SolveOptions { backend: backend.into() })?;
            print!("{}", ReportDocument::from(&report).render());
        }
        Command::Exact { file, limit } => {
            let instance = read_instance(&file)?;
            let best = exact_opt(&instance, limit)?;
            println!("value = {}", best.value);
            println!("removal = {}", ids(&best.removal));
            println!("cost = {}", instance.cost(&best.removal));
            println!("removed_weights = {}", weights(&instance, &best.removal));
        }
        Command::Pareto { file, backend } => pareto(&read_instance(&file)?, backend.into())?,
        Command::Verify { file, removal } => return verify(&read_instance(&file)?, &removal),
        Command::Tsp { file, backend } => {
            let tsp = TspInstance::new(read_instance(&file)?)?;
            let out = tsp_interdict(&tsp, SolveOptions { backend: backend.into() })?;
            print!("{}", ReportDocument::from(&out.report).render());
            println!("tour_lower = {}", out.lower);
            println!("tour_upper = {}", out.upper);
            if tsp.instance().vertex_count() <= TSP_LIMIT {
                println!("tour_length = {}", tsp_walk_length(&tsp, &out.report.removal)?);
            }
        }
        Command::ReduceMcp { file, q } => {
            let instance = read_instance(&file)?;
            let mut costs = Vec::with_capacity(instance.edge_count());
            for (id, e) in instance.edges().iter().enumerate() {
                match e.cost {
                    Some(c) => costs.push(c),
                    None => bail!("edge {id} has no cost; every edge of the graph must be removable"),
                }
            }
            let edges = instance.edges().iter().map(|e| (e.u, e.v)).collect();
            let mcp = McpInstance::budgeted(instance.vertex_count(), edges, costs, q);
            print!("{}", serialize_instance(&mcp_to_interdiction(&mcp)?));
        }
        Command::Gen {
            seed,
            n,
            m,
            max_weight,
            max_cost,
            budget,
            budget_fraction,
            tree,
        } => {
            if n < 2 || m + 1 < n || max_cost == 0 {
                bail!("need n ≥ 2, m ≥ n - 1 and max-cost ≥ 1");
            }
            let budget = match budget {
                Some(b) => BudgetPolicy::Fixed(b),
                None => {
                    let (num, den) = budget_fraction
                        .split_once('/')
                        .and_then(|(a, b)| Some((a.parse().ok()?, b.parse().ok()?)))
                        .filter(|&(_, den): &(u64, u64)| den > 0)
                        .context("budget fraction must look like `num/den`")?;
                    BudgetPolicy::Fraction { num, den }
                }
            };
            let tree = match tree {
                TreeArg::None => TreePolicy::None,
                TreeArg::Spanning => TreePolicy::Spanning,
                TreeArg::Fixed => TreePolicy::FixedSpanning,
            };
            let params = GeneratorParams {
                n,
                m,
                max_weight,
                max_cost,
                budget,
                tree,
            };
            print!("{}", serialize_instance(&generate(seed, &params)));
        }
        Command::Fixtures { which: Fixture::Shen } => print!("{}", serialize_instance(&shen_fixture())),
    }
    Ok(ExitCode::SUCCESS)
}

fn pareto(instance: &Instance, backend: Backend) -> Result<()> {
    let (rounded, _) = round_weights(instance);
    let prepared = prepare(&rounded)?;
    let universe = instance.edge_count();
    let witnesses: Vec<EdgeSet> = match &prepared.stage {
        Stage::Constant => vec![EdgeSet::new(universe)],
        Stage::Ready(d) => extreme_supported_tuples(d, backend)?
            .points
            .iter()
            .map(|p| prepared.lift(&p.witness, universe))
            .collect(),
    };
    let nested = witnesses.windows(2).all(|w| w[0].is_subset(&w[1]));
    println!("points = {}", witnesses.len());
    println!("nested = {nested}");
    for w in &witnesses {
        let kept = instance.all_edges().difference(w);
        let value = graph::mst_weight(&rounded, &kept).context("witness disconnects the graph")?;
        println!("point = cost {} value {} witness {}", instance.cost(w), value, ids(w));
    }
    Ok(())
}

fn verify(instance: &Instance, removal: &str) -> Result<ExitCode> {
    let ids = parse_edge_ids(removal).map_err(anyhow::Error::msg)?;
    let m = instance.edge_count();
    if let Some(&id) = ids.iter().find(|&&id| id >= m) {
        bail!("edge {id} is outside 0..{m}");
    }
    let set = EdgeSet::from_ids(m, ids);
    let fixed: Vec<usize> = set.iter().filter(|&id| !instance.edge(id).interdictable()).collect();
    let cost: u64 = set.iter().filter_map(|id| instance.edge(id).cost).sum();
    let feasible = fixed.is_empty() && cost <= instance.budget();
    println!("cost = {cost}");
    println!("budget = {}", instance.budget());
    if !fixed.is_empty() {
        println!("non_interdictable = {}", fixed.iter().map(usize::to_string).collect::<Vec<_>>().join(" "));
    }
    println!("feasible = {feasible}");

    let (rounded, _) = round_weights(instance);
    let kept = instance.all_edges().difference(&set);
    match (graph::mst_weight(&rounded, &kept), graph::mst_weight(instance, &kept)) {
        (Ok(r), Ok(o)) => {
            println!("rounded_value = {r}");
            println!("original_value = {o}");
        }
        _ => println!("disconnected = true"),
    }
    match audit_removal(&rounded, &set) {
        Ok(a) => print_audit(&a),
        Err(reason) => println!("bounds = unavailable ({reason})"),
    }
    Ok(if feasible { ExitCode::SUCCESS } else { ExitCode::from(1) })
}

fn audit_removal(rounded: &Instance, set: &EdgeSet) -> Result<Audit, String> {
    let prepared = prepare(rounded).map_err(|e| e.to_string())?;
    let Stage::Ready(d) = &prepared.stage else {
        return Err("every removal leaves the MST weight unchanged".into());
    };
    let local = prepared
        .lower(set)
        .ok_or("the removal uses edges contracted during preprocessing")?;
    let tower = PartitionTower::build(d, &local).map_err(|e| e.to_string())?;
    Ok(audit(&tower, rounded.budget()))
}

fn print_audit(a: &Audit) {
    println!("value_identity = {}", holds(a.value_identity));
    println!("cost_identity = {}", holds(a.cost_identity));
    let Some(g) = &a.greedy else {
        println!("greedy = not applicable (cost within budget)");
        return;
    };
    println!("greedy_removal = {}", ids(&g.removal));
    println!("greedy_cost = {}", g.cost);
    println!("greedy_value = {}", g.value);
    for (name, ok) in [
        ("pattern_efficient", g.efficient),
        ("pattern_cost_cover", g.cost_cover),
        ("pattern_value_bound", g.pattern_value),
        ("block_ratio_bound", g.block_bound),
        ("impact_bound", g.impact_bound),
        ("removal_bound", g.removal_bound),
        ("budget_bound", g.budget_bound),
        ("extended_over_budget", g.booster_over_budget),
        ("extended_gap", g.booster_gap),
        ("extended_block_ratio_bound", g.booster_block_bound),
    ] {
        println!("{name} = {}", holds(ok));
    }
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}
