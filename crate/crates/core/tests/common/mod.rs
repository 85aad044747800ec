#![allow(dead_code)]

pub mod oracles;

use mesbench::scenario::{Factor, FactorKind};

pub fn factor(name: &str, min: f64, base: f64, max: f64) -> Factor {
    Factor::new(name, FactorKind::Design, min, max, base, "")
}

/// A shortened baseline so campaign tests stay quick.
pub fn one_day() -> mesbench::BenchmarkConfig {
    mesbench::BenchmarkConfig { horizon_s: 24 * 3600, ..Default::default() }
}
