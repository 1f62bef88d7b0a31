//! Exponential prediction loss, sample averages, threshold calibration and
//! the damage-prevention-ratio evaluation metric.

use serde::{Deserialize, Serialize};

use crate::graph::Graph;
use crate::metrics::{similarity, MetricKind};
use crate::scenario::TargetSet;
use crate::{Error, Result};

/// Threshold specification: a fixed value or per-metric auto-calibration.
/// Serializes as the string "auto" or a plain number.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum ThetaSpec {
    Auto,
    Fixed(f64),
}

impl Serialize for ThetaSpec {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        match self {
            ThetaSpec::Auto => s.serialize_str("auto"),
            ThetaSpec::Fixed(v) => s.serialize_f64(*v),
        }
    }
}

impl<'de> Deserialize<'de> for ThetaSpec {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        #[derive(Deserialize)]
        #[serde(untagged)]
        enum Repr {
            Tag(String),
            Num(f64),
        }
        match Repr::deserialize(d)? {
            Repr::Tag(t) if t == "auto" => Ok(ThetaSpec::Auto),
            Repr::Tag(t) => Err(serde::de::Error::custom(format!(
                "expected \"auto\" or a number, got \"{t}\""
            ))),
            Repr::Num(v) => Ok(ThetaSpec::Fixed(v)),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct LossParams {
    pub beta: f64,
    pub theta: f64,
}

impl LossParams {
    pub fn new(beta: f64, theta: f64) -> Result<LossParams> {
        if beta <= 0.0 {
            return Err(Error::InvalidArgument(format!("beta must be positive, got {beta}")));
        }
        Ok(LossParams { beta, theta })
    }
}

/// l(e) = exp(-y * beta * (sim - theta)).
pub fn pair_loss(sim: f64, y: i8, p: &LossParams) -> f64 {
    (-f64::from(y) * p.beta * (sim - p.theta)).exp()
}

/// Sum of pair losses over the target set, with labels taken from the
/// sampled true graph (not from `g_hat`, which may be attacked).
pub fn total_loss(g_hat: &Graph, targets: &TargetSet, m: MetricKind, p: &LossParams) -> Result<f64> {
    let mut sum = 0.0;
    for (pair, &y) in targets.pairs.iter().zip(&targets.labels) {
        let sim = similarity(m, g_hat, pair.a(), pair.b())?;
        sum += pair_loss(sim, y, p);
    }
    Ok(sum)
}

/// Mean total loss over samples, summed in sample-index order.
pub fn average_loss(
    samples: &[(Graph, TargetSet)],
    m: MetricKind,
    p: &LossParams,
) -> Result<f64> {
    if samples.is_empty() {
        return Err(Error::InvalidArgument("average_loss over empty sample list".into()));
    }
    let mut sum = 0.0;
    for (g, t) in samples {
        sum += total_loss(g, t, m, p)?;
    }
    Ok(sum / samples.len() as f64)
}

/// Damage prevention ratio (la - ld) / (la - l0). May exceed 1.
pub fn dpr(l0: f64, la: f64, ld: f64) -> Result<f64> {
    if (la - l0).abs() <= 1e-12 {
        return Err(Error::DegenerateDpr { la, l0 });
    }
    Ok((la - ld) / (la - l0))
}

/// Midpoint between the mean similarity of edge pairs and the mean
/// similarity of non-edge pairs over unattacked sample graphs.
pub fn calibrate_theta(samples: &[(Graph, TargetSet)], m: MetricKind) -> Result<f64> {
    let (mut pos_sum, mut pos_n) = (0.0, 0usize);
    let (mut neg_sum, mut neg_n) = (0.0, 0usize);
    for (g, t) in samples {
        for (pair, &y) in t.pairs.iter().zip(&t.labels) {
            let sim = similarity(m, g, pair.a(), pair.b())?;
            if y == 1 {
                pos_sum += sim;
                pos_n += 1;
            } else {
                neg_sum += sim;
                neg_n += 1;
            }
        }
    }
    if pos_n == 0 || neg_n == 0 {
        return Err(Error::InvalidArgument(
            "theta calibration needs both edge and non-edge target pairs".into(),
        ));
    }
    Ok(0.5 * (pos_sum / pos_n as f64 + neg_sum / neg_n as f64))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::{Graph, NodePair};
    use crate::scenario::TargetSet;

    fn params(beta: f64, theta: f64) -> LossParams {
        LossParams::new(beta, theta).unwrap()
    }

    #[test]
    fn pair_loss_closed_forms() {
        let p = params(1.0, 0.0);
        assert_eq!(pair_loss(0.0, 1, &p), 1.0);
        assert_eq!(pair_loss(0.0, -1, &p), 1.0);
        assert!((pair_loss(2f64.ln(), 1, &p) - 0.5).abs() < 1e-15);
        let p2 = params(2.0, 0.0);
        assert!((pair_loss(0.5, -1, &p2) - std::f64::consts::E).abs() < 1e-12);
    }

    #[test]
    fn pair_loss_monotone() {
        let p = params(1.7, 0.3);
        let grid: Vec<f64> = (0..50).map(|i| i as f64 * 0.1).collect();
        for w in grid.windows(2) {
            assert!(pair_loss(w[1], 1, &p) < pair_loss(w[0], 1, &p));
            assert!(pair_loss(w[1], -1, &p) > pair_loss(w[0], -1, &p));
        }
    }

    fn tiny_sample() -> (Graph, TargetSet) {
        // 5 nodes; H_D over {0,1,2}
        let g = Graph::from_edges(5, &[(0, 1), (0, 3), (1, 3), (2, 3), (2, 4), (0, 4)]).unwrap();
        let t = TargetSet::from_graph(&g, vec![0, 1, 2]);
        (g, t)
    }

    #[test]
    fn total_loss_hand_instance() {
        let (g, t) = tiny_sample();
        let p = params(1.0, 0.5);
        let m = MetricKind::CommonNeighbors;
        // pairs (0,1) edge, (0,2) non-edge, (1,2) non-edge
        let s01 = similarity(m, &g, 0, 1).unwrap();
        let s02 = similarity(m, &g, 0, 2).unwrap();
        let s12 = similarity(m, &g, 1, 2).unwrap();
        let want = pair_loss(s01, 1, &p) + pair_loss(s02, -1, &p) + pair_loss(s12, -1, &p);
        assert_eq!(total_loss(&g, &t, m, &p).unwrap(), want);
        // empty target set
        let empty = TargetSet {
            vd: vec![],
            pairs: vec![],
            labels: vec![],
        };
        assert_eq!(total_loss(&g, &empty, m, &p).unwrap(), 0.0);
        // single pair
        let single = TargetSet {
            vd: vec![0, 1],
            pairs: vec![NodePair::new(0, 1).unwrap()],
            labels: vec![1],
        };
        assert_eq!(
            total_loss(&g, &single, m, &p).unwrap(),
            pair_loss(s01, 1, &p)
        );
    }

    #[test]
    fn average_loss_contracts() {
        let (g, t) = tiny_sample();
        let p = params(2.0, 0.1);
        let m = MetricKind::ResourceAllocation;
        let one = total_loss(&g, &t, m, &p).unwrap();
        let samples = vec![(g.clone(), t.clone())];
        assert_eq!(average_loss(&samples, m, &p).unwrap(), one);
        let two = vec![(g.clone(), t.clone()), (g.clone(), t.clone())];
        assert!((average_loss(&two, m, &p).unwrap() - one).abs() < 1e-12);
        // three-sample arithmetic mean with a perturbed copy
        let g2 = g.delete_edges(&[NodePair::new(0, 3).unwrap()]);
        let l2 = total_loss(&g2, &t, m, &p).unwrap();
        let three = vec![(g.clone(), t.clone()), (g2, t.clone()), (g.clone(), t)];
        assert!(
            (average_loss(&three, m, &p).unwrap() - (2.0 * one + l2) / 3.0).abs() < 1e-12
        );
        assert!(average_loss(&[], m, &p).is_err());
    }

    #[test]
    fn dpr_examples() {
        assert_eq!(dpr(10.0, 14.0, 14.0).unwrap(), 0.0);
        assert_eq!(dpr(10.0, 14.0, 10.0).unwrap(), 1.0);
        assert_eq!(dpr(10.0, 14.0, 11.0).unwrap(), 0.75);
        assert!(matches!(dpr(5.0, 5.0, 4.0), Err(Error::DegenerateDpr { .. })));
        // affine invariance
        let base = dpr(3.0, 7.0, 4.5).unwrap();
        let scaled = dpr(30.0, 70.0, 45.0).unwrap();
        assert!((base - scaled).abs() < 1e-12);
    }

    #[test]
    fn incremental_matches_scratch_after_deletions() {
        let (g, t) = tiny_sample();
        let p = params(2.0, 0.2);
        for step in [vec![(0u32, 3u32)], vec![(0, 3), (2, 3)], vec![(0, 4), (1, 3)]] {
            let removals: Vec<NodePair> =
                step.iter().map(|&(a, b)| NodePair::new(a, b).unwrap()).collect();
            let deleted = g.delete_edges(&removals);
            for m in MetricKind::ALL {
                let scratch = total_loss(&deleted, &t, m, &p).unwrap();
                let again = total_loss(&deleted, &t, m, &p).unwrap();
                assert!((scratch - again).abs() <= 1e-12 * scratch.abs().max(1.0));
            }
        }
    }

    #[test]
    fn theta_calibration() {
        let (g, t) = tiny_sample();
        let m = MetricKind::CommonNeighbors;
        let samples = vec![(g.clone(), t.clone())];
        let theta = calibrate_theta(&samples, m).unwrap();
        let s01 = similarity(m, &g, 0, 1).unwrap();
        let s02 = similarity(m, &g, 0, 2).unwrap();
        let s12 = similarity(m, &g, 1, 2).unwrap();
        assert!((theta - 0.5 * (s01 + (s02 + s12) / 2.0)).abs() < 1e-12);
        // one class absent -> error
        let all_pos = TargetSet {
            vd: vec![0, 1],
            pairs: vec![NodePair::new(0, 1).unwrap()],
            labels: vec![1],
        };
        assert!(calibrate_theta(&[(g, all_pos)], m).is_err());
    }

    #[test]
    fn theta_spec_serde() {
        let auto: ThetaSpec = serde_json::from_str("\"auto\"").unwrap();
        assert_eq!(auto, ThetaSpec::Auto);
        let fixed: ThetaSpec = serde_json::from_str("0.75").unwrap();
        assert_eq!(fixed, ThetaSpec::Fixed(0.75));
        assert_eq!(serde_json::to_string(&ThetaSpec::Auto).unwrap(), "\"auto\"");
    }
}
