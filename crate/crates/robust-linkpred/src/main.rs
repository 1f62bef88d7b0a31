use std::fs;
use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use robust_linkpred::attack::{self, AttackKind};
use robust_linkpred::damage::{build_damage_graph, DamageSign};
use robust_linkpred::defense::DefensePlan;
use robust_linkpred::experiment::{run_experiment, write_csv};
use robust_linkpred::graph::{Graph, NodeId, NodePair};
use robust_linkpred::loss::{calibrate_theta, LossParams, ThetaSpec};
use robust_linkpred::metrics::MetricKind;
use robust_linkpred::oracle::{brute_attack, gadget_from_graph, verify_gadget};
use robust_linkpred::scenario::{rng_for, streams, Sampler, ScenarioConfig};
use robust_linkpred::{Error, Result};

/// Similarity-based link prediction under adversarial edge deletion:
/// sample scenarios, plan protections, attack, and evaluate.
#[derive(Parser)]
#[command(name = "rlp", version)]
struct Cli {
    /// Scenario configuration (JSON).
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Override the config's master seed.
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Output path (defaults to stdout).
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Worker threads (0 = all cores).
    #[arg(long, global = true, default_value_t = 0)]
    jobs: usize,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Emit sampled scenario graphs as edge lists.
    Generate {
        /// How many samples to draw.
        #[arg(long, default_value_t = 1)]
        count: usize,
    },
    /// Compute protection plans and emit their edge lists (JSON).
    Plan,
    /// Apply each configured attack to one sampled graph and emit the
    /// deleted edges (JSON).
    Attack {
        /// Index of the evaluation sample to attack.
        #[arg(long, default_value_t = 0)]
        index: u64,
        /// Protected edges as a JSON array of [u, v] pairs.
        #[arg(long)]
        plan: Option<PathBuf>,
    },
    /// Run the full planning + evaluation pipeline and emit CSV.
    Evaluate {
        /// Record measured wall times instead of zeroing the column.
        #[arg(long)]
        timings: bool,
    },
    /// Run the built-in brute-force cross-checks.
    Verify,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(ok) => {
            if ok {
                ExitCode::SUCCESS
            } else {
                ExitCode::FAILURE
            }
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::FAILURE
        }
    }
}

fn load_config(cli: &Cli) -> Result<ScenarioConfig> {
    let path = cli.config.as_ref().ok_or_else(|| Error::InvalidArgument(
        "--config is required for this subcommand".into(),
    ))?;
    let text = fs::read_to_string(path).map_err(|e| Error::Config {
        path: path.display().to_string(),
        msg: e.to_string(),
    })?;
    let mut cfg: ScenarioConfig =
        serde_json::from_str(&text).map_err(|e| Error::Config {
            path: path.display().to_string(),
            msg: e.to_string(),
        })?;
    if let Some(seed) = cli.seed {
        cfg.seed = seed;
    }
    cfg.validate()?;
    Ok(cfg)
}

fn write_output(out: &Option<PathBuf>, bytes: &[u8]) -> Result<()> {
    match out {
        Some(path) => Ok(fs::write(path, bytes)?),
        None => {
            std::io::stdout().write_all(bytes)?;
            Ok(())
        }
    }
}

fn run(cli: Cli) -> Result<bool> {
    #[cfg(feature = "parallel")]
    if cli.jobs > 0 {
        rayon::ThreadPoolBuilder::new()
            .num_threads(cli.jobs)
            .build_global()
            .map_err(|e| Error::InvalidArgument(format!("--jobs: {e}")))?;
    }

    match &cli.command {
        Command::Generate { count } => {
            let cfg = load_config(&cli)?;
            let sampler = Sampler::new(&cfg)?;
            let mut buf = Vec::new();
            for i in 0..*count {
                let s = sampler.sample_indexed(streams::PLANNING, i as u64)?;
                writeln!(buf, "# sample {i}")?;
                writeln!(buf, "# target_edge {} {}", s.h_a.a(), s.h_a.b())?;
                for e in s.graph.edges() {
                    writeln!(buf, "{} {}", e.a(), e.b())?;
                }
            }
            write_output(&cli.out, &buf)?;
            Ok(true)
        }
        Command::Plan => {
            let cfg = load_config(&cli)?;
            let res = run_plans(&cfg)?;
            write_output(&cli.out, (res.to_string() + "\n").as_bytes())?;
            Ok(true)
        }
        Command::Attack { index, plan } => {
            let cfg = load_config(&cli)?;
            let protection = match plan {
                Some(path) => load_plan(path)?,
                None => DefensePlan::empty(),
            };
            let res = run_attack(&cfg, *index, &protection)?;
            write_output(&cli.out, (res.to_string() + "\n").as_bytes())?;
            Ok(true)
        }
        Command::Evaluate { timings } => {
            let cfg = load_config(&cli)?;
            let res = run_experiment(&cfg)?;
            let mut buf = Vec::new();
            write_csv(&mut buf, &res.rows, *timings)?;
            write_output(&cli.out, &buf)?;
            Ok(true)
        }
        Command::Verify => verify(),
    }
}

fn load_plan(path: &PathBuf) -> Result<DefensePlan> {
    let text = fs::read_to_string(path)?;
    let pairs: Vec<(NodeId, NodeId)> = serde_json::from_str(&text)?;
    let protected = pairs
        .into_iter()
        .map(|(u, v)| NodePair::new(u, v))
        .collect::<Result<std::collections::BTreeSet<_>>>()?;
    let budget = protected.len();
    Ok(DefensePlan::new(protected, budget))
}

fn run_plans(cfg: &ScenarioConfig) -> Result<serde_json::Value> {
    let sampler = Sampler::new(cfg)?;
    let planning: Vec<_> = (0..cfg.num_planning_samples)
        .map(|i| sampler.sample_indexed(streams::PLANNING, i as u64))
        .collect::<Result<_>>()?;
    let theta = match cfg.loss.theta {
        ThetaSpec::Fixed(t) => t,
        ThetaSpec::Auto => {
            let pairs: Vec<_> = planning
                .iter()
                .map(|s| (s.graph.clone(), s.targets.clone()))
                .collect();
            calibrate_theta(&pairs, cfg.metric)?
        }
    };
    let params = LossParams::new(cfg.loss.beta, theta)?;
    let sign = damage_sign(cfg);
    let empty = DefensePlan::empty();
    let dgs: Vec<_> = planning
        .iter()
        .enumerate()
        .map(|(i, s)| {
            build_damage_graph(&s.graph, s.h_a, &s.targets, cfg.metric, &params, &empty, i, sign)
        })
        .collect::<Result<_>>()?;
    let mut out = Vec::new();
    for &b in &cfg.budgets {
        let universe = {
            let mut set = std::collections::BTreeSet::new();
            for dg in &dgs {
                for t in &dg.tuples {
                    set.insert(dg.edge1(t));
                    set.insert(dg.edge2(t));
                }
            }
            set.len()
        };
        let k_d = robust_linkpred::experiment::resolve_budget(b, universe);
        for &kind in &cfg.defenses {
            let plan = match kind {
                robust_linkpred::defense::DefenseKind::IdOpt => {
                    robust_linkpred::defense::idopt(
                        &dgs,
                        k_d,
                        robust_linkpred::ilp::SolveLimits::default(),
                    )
                    .plan
                }
                robust_linkpred::defense::DefenseKind::IdRank => {
                    robust_linkpred::defense::idrank(&dgs, k_d)
                }
                robust_linkpred::defense::DefenseKind::Ppn => {
                    let s0 = &planning[0];
                    let mut rng = rng_for(cfg.seed, streams::PPN, 0);
                    robust_linkpred::defense::ppn(&s0.graph, cfg.vd_size, k_d, &mut rng)
                }
            };
            out.push(serde_json::json!({
                "defense": kind.name(),
                "k_d": k_d,
                "edges": plan.to_edge_list(),
            }));
        }
    }
    Ok(serde_json::Value::Array(out))
}

fn damage_sign(cfg: &ScenarioConfig) -> DamageSign {
    if cfg.damage_sign_flipped {
        DamageSign::BeforeMinusAfter
    } else {
        DamageSign::AfterMinusBefore
    }
}

fn run_attack(cfg: &ScenarioConfig, index: u64, plan: &DefensePlan) -> Result<serde_json::Value> {
    let sampler = Sampler::new(cfg)?;
    let s = sampler.sample_indexed(streams::EVAL, index)?;
    let theta = match cfg.loss.theta {
        ThetaSpec::Fixed(t) => t,
        ThetaSpec::Auto => {
            calibrate_theta(&[(s.graph.clone(), s.targets.clone())], cfg.metric)?
        }
    };
    let params = LossParams::new(cfg.loss.beta, theta)?;
    let dg = build_damage_graph(
        &s.graph,
        s.h_a,
        &s.targets,
        cfg.metric,
        &params,
        plan,
        index as usize,
        damage_sign(cfg),
    )?;
    let mut out = Vec::new();
    for (ai, &kind) in cfg.attacks.iter().enumerate() {
        let attack_plan = match kind {
            AttackKind::LinkDel => attack::linkdel(&dg, cfg.metric, dg.tuples.len())?,
            AttackKind::UnbiasedDel => {
                let mut rng = rng_for(cfg.seed, streams::ATTACK, (ai as u64) << 32 | index);
                attack::unbiased_del(&dg, &mut rng)
            }
            AttackKind::RandDel => {
                let mut rng = rng_for(cfg.seed, streams::ATTACK, (ai as u64) << 32 | index);
                attack::rand_del(&dg, cfg.randdel_p, &mut rng)
            }
        };
        let edges: Vec<(NodeId, NodeId)> = attack_plan
            .deletions()
            .map(|e| (e.a(), e.b()))
            .collect();
        out.push(serde_json::json!({
            "attack": kind.name(),
            "target_edge": [s.h_a.a(), s.h_a.b()],
            "deleted": edges,
        }));
    }
    Ok(serde_json::Value::Array(out))
}

/// Brute-force cross-checks: the MaxCut correspondence on every small
/// base graph plus random ones, and greedy-attack optimality against
/// full enumeration.
fn verify() -> Result<bool> {
    use rand::prelude::*;
    let mut failures = 0usize;

    // every base graph on up to 5 nodes
    let mut gadget_checked = 0usize;
    for n in 1..=5usize {
        let pairs: Vec<(NodeId, NodeId)> = (0..n as NodeId)
            .flat_map(|a| (a + 1..n as NodeId).map(move |b| (a, b)))
            .collect();
        for mask in 0u32..1 << pairs.len() {
            let edges: Vec<(NodeId, NodeId)> = pairs
                .iter()
                .enumerate()
                .filter(|(i, _)| mask >> i & 1 == 1)
                .map(|(_, &e)| e)
                .collect();
            let base = Graph::from_edges(n, &edges)?;
            let inst = gadget_from_graph(&base)?;
            let (_, _, consistent) = verify_gadget(&inst)?;
            gadget_checked += 1;
            if !consistent {
                failures += 1;
            }
        }
    }
    println!("gadget exhaustive: {gadget_checked} bases, {failures} inconsistent");

    let mut rng = rng_for(1, 9, 0);
    let mut random_bad = 0usize;
    for _ in 0..100 {
        let n = rng.gen_range(2..=7usize);
        let mut edges = Vec::new();
        for a in 0..n as NodeId {
            for b in a + 1..n as NodeId {
                if rng.gen_bool(0.5) {
                    edges.push((a, b));
                }
            }
        }
        let base = Graph::from_edges(n, &edges)?;
        let (_, _, consistent) = verify_gadget(&gadget_from_graph(&base)?)?;
        if !consistent {
            random_bad += 1;
        }
    }
    println!("gadget random: 100 bases, {random_bad} inconsistent");
    failures += random_bad;

    let mut attack_bad = 0usize;
    let mut checked = 0usize;
    'outer: for trial in 0..200 {
        let mut rng = rng_for(2, 9, trial);
        let n = rng.gen_range(6..=10usize);
        let mut edges = Vec::new();
        for a in 0..n as NodeId {
            for b in a + 1..n as NodeId {
                if rng.gen_bool(0.4) {
                    edges.push((a, b));
                }
            }
        }
        let g = Graph::from_edges(n, &edges)?;
        let candidates: Vec<NodePair> = g
            .edges()
            .into_iter()
            .filter(|e| !g.common_neighbors(e.a(), e.b()).unwrap().is_empty())
            .collect();
        if candidates.is_empty() {
            continue;
        }
        let h_a = candidates[rng.gen_range(0..candidates.len())];
        let vd = vec![h_a.a(), h_a.b()];
        let targets = robust_linkpred::scenario::TargetSet::from_graph(&g, vd);
        let m = *MetricKind::ALL.choose(&mut rng).unwrap();
        let params = LossParams::new(2.0, 0.5)?;
        let empty = DefensePlan::empty();
        let dg = build_damage_graph(&g, h_a, &targets, m, &params, &empty, 0, DamageSign::AfterMinusBefore)?;
        if 2 * dg.tuples.len() > 12 {
            continue 'outer;
        }
        let exact = brute_attack(&g, h_a, &empty, m, dg.tuples.len(), &targets, &params)?;
        let plan = attack::linkdel(&dg, m, dg.tuples.len())?;
        let g2 = g.delete_edges(plan.deletions());
        let sim = robust_linkpred::metrics::similarity(m, &g2, h_a.a(), h_a.b())?;
        checked += 1;
        if sim != exact.min_similarity {
            attack_bad += 1;
        }
    }
    println!("attack enumeration: {checked} instances, {attack_bad} mismatched");
    failures += attack_bad;

    if failures == 0 {
        println!("verify: all checks passed");
        Ok(true)
    } else {
        println!("verify: {failures} failures");
        Ok(false)
    }
}
