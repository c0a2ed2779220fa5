//! Hand-derivable S1 values reproduced by the brute-force oracle alone.

mod common;

use common::oracle::{q, s1};

#[test]
fn azema_supermartingale_at_one() {
    let g = s1().azema_g();
    assert_eq!(g[0], vec![q(1, 1); 4]);
    assert_eq!(g[1], vec![q(1, 2), q(1, 2), q(1, 1), q(1, 1)]);
    assert_eq!(g[2], vec![q(0, 1), q(0, 1), q(0, 1), q(1, 1)]);
}

#[test]
fn doob_increments_are_deterministic() {
    let da = s1().doob_increments();
    assert_eq!(da[1], vec![q(1, 4); 4]);
    assert_eq!(da[2], vec![q(1, 2); 4]);
}

#[test]
fn doob_martingale_values() {
    let m = s1().doob_martingale();
    assert_eq!(m[0], vec![q(1, 1); 4]);
    assert_eq!(m[1], vec![q(3, 4), q(3, 4), q(5, 4), q(5, 4)]);
    assert_eq!(m[2], vec![q(3, 4), q(3, 4), q(3, 4), q(7, 4)]);
}

#[test]
fn jeulin_yor_compensator_on_b() {
    let toy = s1();
    let c = toy.jeulin_yor();
    assert_eq!(c[1], vec![q(1, 4); 4]);
    assert_eq!(c[2][1], q(5, 4));
    let h = toy.indicator_h();
    let diff: Vec<Vec<_>> = (0..3)
        .map(|t| (0..4).map(|a| &h[t][a] - &c[t][a]).collect())
        .collect();
    assert!(toy.is_g_martingale(&diff));
}

#[test]
fn enlarged_blocks() {
    let toy = s1();
    assert_eq!(toy.progressive_blocks(1), vec![vec![0], vec![1], vec![2, 3]]);
    assert_eq!(toy.initial_blocks(0), vec![vec![0], vec![1, 2], vec![3]]);
}
