pub mod oracle;

use filtration_core::random_time::RandomTime;
use filtration_core::{FilteredSpace, Time};

use oracle::Toy;

/// Copies a library scenario into the oracle's plain representation.
#[allow(dead_code)]
pub fn toy(space: &FilteredSpace, tau: &RandomTime) -> Toy {
    Toy {
        prob: space.prob().to_vec(),
        levels: (0..=space.horizon())
            .map(|t| space.filtration().at(t).blocks().to_vec())
            .collect(),
        tau: tau
            .values()
            .iter()
            .map(|v| match v {
                Time::At(s) => Some(*s),
                Time::Infinity => None,
            })
            .collect(),
    }
}
