//! End-to-end experiment pipeline: plan defenses on one batch of
//! sampled attacker types, evaluate them against fresh attacks, and
//! emit one CSV row per (attack, defense, budget) cell.

use std::collections::BTreeSet;
use std::io::Write;
use std::time::Instant;

use crate::attack::{self, AttackKind};
use crate::damage::{build_damage_graph, DamageGraph, DamageSign};
use crate::defense::{self, DefenseKind, DefensePlan};
use crate::graph::NodePair;
use crate::ilp::SolveLimits;
use crate::loss::{self, calibrate_theta, total_loss, LossParams, ThetaSpec};
use crate::metrics::MetricKind;
use crate::par::map_indices;
use crate::scenario::{streams, rng_for, Sampler, ScenarioClass, ScenarioConfig};
use crate::Result;

/// Node cap for the exact defense solver. Fixed (not time-based) so a
/// run is reproducible regardless of machine speed or thread count.
const IDOPT_MAX_NODES: u64 = 2_000_000;

#[derive(Clone, Debug)]
pub struct ExperimentRow {
    pub scenario_class: ScenarioClass,
    pub metric: MetricKind,
    pub attack: AttackKind,
    /// Defense name, or "none" for the undefended baseline row.
    pub defense: String,
    pub k_d: usize,
    pub seed: u64,
    pub l0: f64,
    pub la: f64,
    pub ld: f64,
    /// None when the attack left the loss unchanged (ratio undefined).
    pub dpr: Option<f64>,
    pub wall_time: f64,
}

#[derive(Clone, Debug)]
pub struct ExperimentResult {
    pub rows: Vec<ExperimentRow>,
    pub theta: f64,
    /// Size of the deduplicated candidate-edge universe from planning.
    pub universe: usize,
}

/// Budget points below 1.0 are fractions of the candidate universe,
/// rounded up; values >= 1 are absolute protection counts.
pub fn resolve_budget(b: f64, universe: usize) -> usize {
    if b < 1.0 {
        (b * universe as f64).ceil() as usize
    } else {
        b.round() as usize
    }
}

pub fn run_experiment(cfg: &ScenarioConfig) -> Result<ExperimentResult> {
    let started = Instant::now();
    let sampler = Sampler::new(cfg)?;
    let sign = if cfg.damage_sign_flipped {
        DamageSign::BeforeMinusAfter
    } else {
        DamageSign::AfterMinusBefore
    };

    let planning = collect(map_indices(cfg.num_planning_samples, |i| {
        sampler.sample_indexed(streams::PLANNING, i as u64)
    }))?;
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

    let empty = DefensePlan::empty();
    let planning_dgs: Vec<DamageGraph> = if cfg.defenses.is_empty() {
        Vec::new()
    } else {
        collect(map_indices(planning.len(), |i| {
            let s = &planning[i];
            build_damage_graph(&s.graph, s.h_a, &s.targets, cfg.metric, &params, &empty, i, sign)
        }))?
    };

    let mut universe_set = BTreeSet::new();
    for dg in &planning_dgs {
        for t in &dg.tuples {
            universe_set.insert(dg.edge1(t));
            universe_set.insert(dg.edge2(t));
        }
    }
    let universe = universe_set.len();

    // one plan per (defense, budget point); ppn draws from its own stream
    let mut plans: Vec<(DefenseKind, usize, DefensePlan)> = Vec::new();
    for (bi, &b) in cfg.budgets.iter().enumerate() {
        let k_d = resolve_budget(b, universe);
        for &kind in &cfg.defenses {
            let plan = match kind {
                DefenseKind::IdOpt => {
                    let limits = SolveLimits {
                        max_nodes: Some(IDOPT_MAX_NODES),
                        time: None,
                    };
                    defense::idopt(&planning_dgs, k_d, limits).plan
                }
                DefenseKind::IdRank => defense::idrank(&planning_dgs, k_d),
                DefenseKind::Ppn => {
                    // pool candidate edges across samples, keep the ones
                    // crossing the protected-node boundary
                    let crits: Vec<NodePair> = universe_set
                        .iter()
                        .copied()
                        .filter(|p| {
                            ((p.a() as usize) < cfg.vd_size) != ((p.b() as usize) < cfg.vd_size)
                        })
                        .collect();
                    let take = k_d.min(crits.len());
                    let mut rng = rng_for(cfg.seed, streams::PPN, bi as u64);
                    let idx = rand::seq::index::sample(&mut rng, crits.len(), take);
                    DefensePlan::new(idx.into_iter().map(|i| crits[i]).collect(), k_d)
                }
            };
            plans.push((kind, k_d, plan));
        }
    }

    // evaluation: one fresh sample per attack draw; identical samples and
    // identical attack coins across every plan (common random numbers)
    struct SampleEval {
        l0: f64,
        // per attack kind: undefended loss, then one loss per plan
        per_attack: Vec<(f64, Vec<f64>)>,
    }
    let evals: Vec<SampleEval> = collect(map_indices(cfg.num_eval_attacks, |j| {
        let s = sampler.sample_indexed(streams::EVAL, j as u64)?;
        let l0 = total_loss(&s.graph, &s.targets, cfg.metric, &params)?;
        let dg = build_damage_graph(
            &s.graph, s.h_a, &s.targets, cfg.metric, &params, &empty, j, sign,
        )?;
        let mut per_attack = Vec::with_capacity(cfg.attacks.len());
        for (ai, &akind) in cfg.attacks.iter().enumerate() {
            let coin_tag = (ai as u64) << 32 | j as u64;
            let run = |plan: &DefensePlan| -> Result<f64> {
                let dgp = dg.with_plan(plan);
                let attack_plan = match akind {
                    AttackKind::LinkDel => attack::linkdel(&dgp, cfg.metric, dgp.tuples.len())?,
                    AttackKind::UnbiasedDel => {
                        let mut rng = rng_for(cfg.seed, streams::ATTACK, coin_tag);
                        attack::unbiased_del(&dgp, &mut rng)
                    }
                    AttackKind::RandDel => {
                        let mut rng = rng_for(cfg.seed, streams::ATTACK, coin_tag);
                        attack::rand_del(&dgp, cfg.randdel_p, &mut rng)
                    }
                };
                let g2 = s.graph.delete_edges(attack_plan.deletions());
                total_loss(&g2, &s.targets, cfg.metric, &params)
            };
            let la = run(&empty)?;
            let lds = plans
                .iter()
                .map(|(_, _, plan)| run(plan))
                .collect::<Result<Vec<f64>>>()?;
            per_attack.push((la, lds));
        }
        Ok(SampleEval { l0, per_attack })
    }))?;

    let n = cfg.num_eval_attacks.max(1) as f64;
    let l0 = evals.iter().map(|e| e.l0).sum::<f64>() / n;
    let wall_time = started.elapsed().as_secs_f64();
    let mut rows = Vec::new();
    for (ai, &akind) in cfg.attacks.iter().enumerate() {
        let la = evals.iter().map(|e| e.per_attack[ai].0).sum::<f64>() / n;
        rows.push(ExperimentRow {
            scenario_class: cfg.scenario_class,
            metric: cfg.metric,
            attack: akind,
            defense: "none".into(),
            k_d: 0,
            seed: cfg.seed,
            l0,
            la,
            ld: la,
            dpr: Some(0.0),
            wall_time,
        });
        for (pi, (dkind, k_d, _)) in plans.iter().enumerate() {
            let ld = evals.iter().map(|e| e.per_attack[ai].1[pi]).sum::<f64>() / n;
            rows.push(ExperimentRow {
                scenario_class: cfg.scenario_class,
                metric: cfg.metric,
                attack: akind,
                defense: dkind.name().into(),
                k_d: *k_d,
                seed: cfg.seed,
                l0,
                la,
                ld,
                dpr: loss::dpr(l0, la, ld).ok(),
                wall_time,
            });
        }
    }
    rows.sort_by(|a, b| {
        (a.scenario_class.name(), a.metric.name(), a.attack.name(), a.defense.as_str(), a.k_d, a.seed)
            .cmp(&(b.scenario_class.name(), b.metric.name(), b.attack.name(), b.defense.as_str(), b.k_d, b.seed))
    });
    Ok(ExperimentResult { rows, theta, universe })
}

fn collect<T>(items: Vec<Result<T>>) -> Result<Vec<T>> {
    items.into_iter().collect()
}

#[derive(Clone, Debug)]
pub struct DamageCell {
    pub scenario_class: ScenarioClass,
    pub metric: MetricKind,
    pub percent_damage: f64,
}

/// Undefended percent loss change per scenario: 100 * (LA - L0) / L0.
pub fn damage_table(cfgs: &[ScenarioConfig]) -> Result<Vec<DamageCell>> {
    let mut out = Vec::new();
    for cfg in cfgs {
        let mut bare = cfg.clone();
        bare.defenses = Vec::new();
        bare.budgets = Vec::new();
        let res = run_experiment(&bare)?;
        let row = res
            .rows
            .iter()
            .find(|r| r.defense == "none")
            .expect("undefended row always emitted");
        out.push(DamageCell {
            scenario_class: cfg.scenario_class,
            metric: cfg.metric,
            percent_damage: 100.0 * (row.la - row.l0) / row.l0,
        });
    }
    Ok(out)
}

fn fmt12(x: f64) -> String {
    format!("{x:.11e}")
}

/// CSV with a fixed header; floats carry 12 significant digits. With
/// `timings` off the wall_time column is zeroed so reruns byte-match.
pub fn write_csv<W: Write>(w: &mut W, rows: &[ExperimentRow], timings: bool) -> Result<()> {
    w.write_all(b"scenario_class,metric,attack,defense,k_D,seed,l0,la,ld,dpr,wall_time\n")?;
    for r in rows {
        let dpr = match r.dpr {
            Some(v) => fmt12(v),
            None => "nan".into(),
        };
        let wall = if timings { fmt12(r.wall_time) } else { "0".into() };
        let line = format!(
            "{},{},{},{},{},{},{},{},{},{},{}\n",
            r.scenario_class.name(),
            r.metric.name(),
            r.attack.name(),
            r.defense,
            r.k_d,
            r.seed,
            fmt12(r.l0),
            fmt12(r.la),
            fmt12(r.ld),
            dpr,
            wall,
        );
        w.write_all(line.as_bytes())?;
    }
    Ok(())
}
