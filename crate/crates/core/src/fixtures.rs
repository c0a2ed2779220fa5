//! Small hand-checkable scenarios.

use crate::prob::{build_space, FilteredSpace};
use crate::random_time::RandomTime;
use crate::rational::ratio;
use crate::verdict::Time;

/// Four equally likely atoms `a, b, c, d`, horizon 2, `F_0` trivial, `F_1 = {{a,b},{c,d}}`,
/// `F_2` discrete, and `τ = (1, 2, 2, ∞)`.
pub fn s1() -> (FilteredSpace, RandomTime) {
    let space = build_space(
        ["a", "b", "c", "d"].iter().map(|s| s.to_string()).collect(),
        vec![ratio(1, 4); 4],
        vec![
            vec![vec![0, 1, 2, 3]],
            vec![vec![0, 1], vec![2, 3]],
            vec![vec![0], vec![1], vec![2], vec![3]],
        ],
    )
    .expect("valid fixture");
    let tau = RandomTime::new(
        &space,
        vec![Time::At(1), Time::At(2), Time::At(2), Time::Infinity],
    )
    .expect("valid fixture");
    (space, tau)
}
