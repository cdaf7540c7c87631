mod common;

use std::collections::BTreeSet;

use proptest::prelude::*;
use restoration::grid::{build_network, BusId, LineId};

use common::*;

fn ids(v: &[u32]) -> BTreeSet<LineId> {
    v.iter().map(|&i| LineId(i)).collect()
}

#[test]
fn feeder_33_downstream_examples() {
    let net = network_from_edges(&FEEDER_33, 0);
    let edges = edge_list(&net);

    let oracle_19 = cut_off_by_deletion(&edges, 0, 19);
    assert_eq!(oracle_19, ids(&[20, 21, 22]));
    assert_eq!(net.downstream_lines(LineId(19)).unwrap(), oracle_19);

    let oracle_2 = cut_off_by_deletion(&edges, 0, 2);
    assert_eq!(oracle_2.len(), 31);
    assert_eq!(oracle_2, (3..=33).map(LineId).collect());
    assert_eq!(net.downstream_lines(LineId(2)).unwrap(), oracle_2);

    for leaf in [18, 22, 25, 33] {
        assert!(net.downstream_lines(LineId(leaf)).unwrap().is_empty());
    }
    assert_eq!(net.lines_of_feeder(&"F".into()).unwrap().len(), 33);
}

#[test]
fn feeder_33_every_line_matches_deletion_oracle() {
    let net = network_from_edges(&FEEDER_33, 0);
    let edges = edge_list(&net);
    for &(id, ..) in &edges {
        assert_eq!(
            net.downstream_lines(LineId(id)).unwrap(),
            cut_off_by_deletion(&edges, 0, id),
            "line {id}"
        );
    }
}

fn tree_strategy() -> impl Strategy<Value = (Vec<u32>, Vec<bool>)> {
    (1usize..=200).prop_flat_map(|n| {
        (
            prop::collection::vec(any::<u32>(), n),
            prop::collection::vec(any::<bool>(), n),
        )
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(128))]

    #[test]
    fn downstream_equals_deletion_reachability((choices, flips) in tree_strategy()) {
        let (buses, lines) = random_tree(&choices, &flips);
        let net = build_network(buses, lines, BusId(0)).unwrap();
        let edges = edge_list(&net);
        let mut dp_sum = 0usize;
        let mut brute_sum = 0usize;
        for &(id, ..) in &edges {
            let dp = net.downstream_lines(LineId(id)).unwrap();
            let brute = cut_off_by_deletion(&edges, 0, id);
            dp_sum += dp.len();
            brute_sum += brute.len();
            prop_assert_eq!(dp, brute);
        }
        prop_assert_eq!(dp_sum, brute_sum);
    }

    #[test]
    fn parent_set_contains_child_subtree((choices, flips) in tree_strategy()) {
        let (buses, lines) = random_tree(&choices, &flips);
        let net = build_network(buses, lines, BusId(0)).unwrap();
        for line in net.lines() {
            if let Some(p) = net.parent_line(line.id).unwrap() {
                let parent_set = net.downstream_lines(p).unwrap();
                let mut child = net.downstream_lines(line.id).unwrap();
                child.insert(line.id);
                prop_assert!(child.is_subset(&parent_set));
                prop_assert!(child.len() < parent_set.len() + 1);
            }
        }
    }

    #[test]
    fn orientation_is_order_independent((choices, flips) in tree_strategy(), seed in any::<u64>()) {
        let (buses, lines) = random_tree(&choices, &flips);
        let a = build_network(buses.clone(), lines.clone(), BusId(0)).unwrap();
        let mut shuffled = lines.clone();
        let mut rev_buses = buses.clone();
        rev_buses.reverse();
        let k = (seed as usize) % shuffled.len().max(1);
        shuffled.rotate_left(k);
        for (i, l) in shuffled.iter_mut().enumerate() {
            if (seed >> (i % 64)) & 1 == 1 {
                std::mem::swap(&mut l.from_bus, &mut l.to_bus);
            }
        }
        let b = build_network(rev_buses, shuffled, BusId(0)).unwrap();
        prop_assert_eq!(a.lines(), b.lines());
        prop_assert_eq!(a.buses(), b.buses());
    }
}
