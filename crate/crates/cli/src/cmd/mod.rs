pub mod analyze;
pub mod benchmark;
pub mod export;
pub mod generate;

use std::time::Instant;

pub(crate) fn millis(start: Instant) -> f64 {
    start.elapsed().as_secs_f64() * 1e3
}
