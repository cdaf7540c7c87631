//! Independent oracles and generators shared by the integration tests.
#![allow(dead_code)]

use std::collections::{BTreeMap, BTreeSet, VecDeque};

use restoration::grid::{build_network, Bus, BusId, Line, LineId, Network};

/// The 33-bus feeder: `(sending, receiving)` pairs, slack bus 0 feeding bus 1.
pub const FEEDER_33: [(u32, u32); 33] = [
    (0, 1),
    (1, 2),
    (2, 3),
    (3, 4),
    (4, 5),
    (5, 6),
    (6, 7),
    (7, 8),
    (8, 9),
    (9, 10),
    (10, 11),
    (11, 12),
    (12, 13),
    (13, 14),
    (14, 15),
    (15, 16),
    (16, 17),
    (17, 18),
    (2, 19),
    (19, 20),
    (20, 21),
    (21, 22),
    (3, 23),
    (23, 24),
    (24, 25),
    (6, 26),
    (26, 27),
    (27, 28),
    (28, 29),
    (29, 30),
    (30, 31),
    (31, 32),
    (32, 33),
];

/// Network from `(from, to)` pairs; line id = receiving bus id.
pub fn network_from_edges(edges: &[(u32, u32)], slack: u32) -> Network<f64> {
    let mut ids: BTreeSet<u32> = edges.iter().flat_map(|&(a, b)| [a, b]).collect();
    ids.insert(slack);
    let buses = ids
        .into_iter()
        .map(|i| Bus::new(i, 1.0, 1.0, 1.0))
        .collect();
    let lines = edges
        .iter()
        .map(|&(a, b)| Line::new(b, a, b, "F", 0.0, [(1, 1)]))
        .collect();
    build_network(buses, lines, BusId(slack)).expect("valid tree")
}

/// Lines cut off from the slack bus once `removed` is deleted, found by
/// plain breadth-first search over the remaining undirected edges.
pub fn cut_off_by_deletion(
    edges: &[(u32, u32, u32)],
    slack: u32,
    removed: u32,
) -> BTreeSet<LineId> {
    let mut adj: BTreeMap<u32, Vec<u32>> = BTreeMap::new();
    for &(id, a, b) in edges {
        if id == removed {
            continue;
        }
        adj.entry(a).or_default().push(b);
        adj.entry(b).or_default().push(a);
    }
    let mut seen = BTreeSet::from([slack]);
    let mut queue = VecDeque::from([slack]);
    while let Some(u) = queue.pop_front() {
        for &w in adj.get(&u).into_iter().flatten() {
            if seen.insert(w) {
                queue.push_back(w);
            }
        }
    }
    edges
        .iter()
        .filter(|&&(id, a, b)| id != removed && !seen.contains(&a) && !seen.contains(&b))
        .map(|&(id, ..)| LineId(id))
        .collect()
}

/// `(line id, from, to)` triples of an oriented network.
pub fn edge_list(net: &Network<f64>) -> Vec<(u32, u32, u32)> {
    net.lines()
        .iter()
        .map(|l| (l.id.0, l.from_bus.0, l.to_bus.0))
        .collect()
}

/// Random radial tree: bus 0 is the slack, bus k (k >= 1) hangs off a
/// uniformly chosen earlier bus. `choices[k-1]` picks the parent modulo k.
/// Lines are shuffled in order and randomly reversed.
pub fn random_tree(choices: &[u32], flips: &[bool]) -> (Vec<Bus<f64>>, Vec<Line<f64>>) {
    let n = choices.len() as u32;
    let buses = (0..=n).map(|i| Bus::new(i, 1.0, 1.0, 1.0)).collect();
    let mut lines: Vec<Line<f64>> = (1..=n)
        .map(|k| {
            let parent = choices[(k - 1) as usize] % k;
            let flip = flips.get((k - 1) as usize).copied().unwrap_or(false);
            let (a, b) = if flip { (k, parent) } else { (parent, k) };
            Line::new(k, a, b, "F", 0.0, [(1, 1)])
        })
        .collect();
    // deterministic interleave so input order is not id order
    lines.sort_by_key(|l| (l.id.0 * 7919) % (n + 1));
    (buses, lines)
}

/// Brute-force Σ over {line} ∪ cut_off(line) of `v`, summing in id order.
pub fn brute_force_line_value(
    edges: &[(u32, u32, u32)],
    slack: u32,
    v: &BTreeMap<LineId, f64>,
    line: u32,
) -> f64 {
    let mut total = v[&LineId(line)];
    for l in cut_off_by_deletion(edges, slack, line) {
        total += v[&l];
    }
    total
}
