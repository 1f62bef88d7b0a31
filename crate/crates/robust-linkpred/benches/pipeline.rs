//! Compares the data-parallel evaluation pipeline against forced
//! sequential execution (run with `--no-default-features` to get the
//! sequential numbers from the same harness).

use criterion::{criterion_group, criterion_main, Criterion};

use robust_linkpred::attack::AttackKind;
use robust_linkpred::defense::DefenseKind;
use robust_linkpred::experiment::run_experiment;
use robust_linkpred::scenario::LossConfig;
use robust_linkpred::metrics::MetricKind;
use robust_linkpred::scenario::{GraphSource, ScenarioClass, ScenarioConfig};

fn bench_cfg() -> ScenarioConfig {
    ScenarioConfig {
        source: GraphSource::Ba { n: 150, m_attach: 4 },
        scenario_class: ScenarioClass::Tca,
        vd_size: 8,
        seed: 42,
        num_planning_samples: 30,
        num_eval_attacks: 30,
        metric: MetricKind::CommonNeighbors,
        loss: LossConfig::default(),
        budgets: vec![0.1],
        attacks: vec![AttackKind::LinkDel],
        defenses: vec![DefenseKind::IdRank, DefenseKind::Ppn],
        randdel_p: 0.5,
        damage_sign_flipped: false,
    }
}

fn pipeline(c: &mut Criterion) {
    let cfg = bench_cfg();
    let mode = if cfg!(feature = "parallel") {
        "parallel"
    } else {
        "sequential"
    };
    c.bench_function(&format!("evaluate_{mode}"), |b| {
        b.iter(|| run_experiment(&cfg).unwrap())
    });
}

criterion_group! {
    name = benches;
    config = Criterion::default().sample_size(10);
    targets = pipeline
}
criterion_main!(benches);
