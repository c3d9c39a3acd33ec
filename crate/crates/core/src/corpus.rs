//! Built-in groupoid instances, each with a uniform and a skewed unit measure.

use crate::groupoid::{action_groupoid, group_as_groupoid, group_bundle, pair_groupoid, FiniteGroupoid, GroupTable};
use crate::measure::{counting_haar, HaarSystem};

#[derive(Debug, Clone)]
pub struct CorpusInstance {
    pub id: String,
    pub groupoid: FiniteGroupoid,
    pub haar: HaarSystem,
    pub mu: Vec<f64>,
}

/// Base names; `<name>-skew` selects the non-uniform measure.
pub const BASE_NAMES: [&str; 8] = ["z2", "z3", "z4", "s3", "pair2", "pair3", "bundle-z2-z3", "action-z2-ab"];

fn groupoid(name: &str) -> Option<FiniteGroupoid> {
    let g = match name {
        "z2" => group_as_groupoid(&GroupTable::cyclic(2)),
        "z3" => group_as_groupoid(&GroupTable::cyclic(3)),
        "z4" => group_as_groupoid(&GroupTable::cyclic(4)),
        "s3" => group_as_groupoid(&GroupTable::symmetric3()),
        "pair2" => pair_groupoid(2),
        "pair3" => pair_groupoid(3),
        "bundle-z2-z3" => group_bundle(&[GroupTable::cyclic(2), GroupTable::cyclic(3)]),
        "action-z2-ab" => action_groupoid(&GroupTable::cyclic(2), &["a".into(), "b".into()], &[vec![0, 1], vec![1, 0]]),
        _ => return None,
    };
    Some(g.expect("built-in groupoids are valid"))
}

fn skewed(n: usize) -> Vec<f64> {
    match n {
        1 => vec![0.5],
        2 => vec![1.0 / 3.0, 2.0 / 3.0],
        _ => {
            let total = (n * (n + 1) / 2) as f64;
            (1..=n).map(|k| k as f64 / total).collect()
        }
    }
}

pub fn instance(id: &str) -> Option<CorpusInstance> {
    let (name, skew) = match id.strip_suffix("-skew") {
        Some(n) => (n, true),
        None => (id, false),
    };
    let g = groupoid(name)?;
    let n = g.num_units();
    let mu = if skew { skewed(n) } else { vec![1.0 / n as f64; n] };
    Some(CorpusInstance { id: id.to_string(), haar: counting_haar(&g), groupoid: g, mu })
}

pub fn ids() -> Vec<String> {
    BASE_NAMES.iter().flat_map(|n| [n.to_string(), format!("{n}-skew")]).collect()
}

pub fn corpus() -> Vec<CorpusInstance> {
    ids().iter().map(|id| instance(id).expect("listed id")).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn sixteen_instances() {
        let c = corpus();
        assert_eq!(c.len(), 16);
        let pair2 = instance("pair2-skew").unwrap();
        assert_eq!(pair2.mu, vec![1.0 / 3.0, 2.0 / 3.0]);
        assert_eq!(instance("pair3-skew").unwrap().mu, vec![1.0 / 6.0, 2.0 / 6.0, 3.0 / 6.0]);
        assert!(instance("nope").is_none());
        assert!(c.iter().all(|i| i.mu.len() == i.groupoid.num_units() && i.mu.iter().all(|m| *m > 0.0)));
    }
}
