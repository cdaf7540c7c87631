//! The bundled 33-bus, three-feeder storm case.
//!
//! Three replicas of the 33-bus radial feeder share slack bus 0. Feeder
//! `F1` uses bus and line ids 1..=33, `F2` 101..=133 and `F3` 201..=233;
//! a line's id is the id of the bus it feeds. Bus 1 (and its replicas) is
//! the substation-side bus and carries no load.
//!
//! Class sizes per feeder come from the pole survey of each feeder and take
//! precedence over the line inventories. On `F2` the survey lists 110 poles
//! in class 3 while the line inventories hold 111.

use std::path::Path;

use crate::scalar::Scalar;
use crate::scenario::{parse_dataset, Dataset};

pub const CASE_33BUS_3FEEDERS: &str = include_str!("../data/33bus-3feeders.json");

/// Path of the CSV tables the bundled case is generated from.
pub fn tables_dir() -> &'static Path {
    Path::new(concat!(env!("CARGO_MANIFEST_DIR"), "/data/tables"))
}

pub fn case_33bus_3feeders<T: Scalar>() -> Dataset<T> {
    parse_dataset(CASE_33BUS_3FEEDERS, Path::new("33bus-3feeders.json"))
        .expect("bundled dataset is valid")
}
