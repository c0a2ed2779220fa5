//! Random times, Azéma processes, conditional distribution fields, enlargements and the
//! enlarged-filtration conditional expectation formulas.

mod enlargement;
mod field;
mod g_expect;
mod model;

pub use enlargement::{
    check_admissibility, initial_enlargement, progressive_enlargement, EnlargedFiltration,
    EnlargementKind, Side,
};
pub use field::{conditional_distribution, ConditionalDistributionField};
pub use g_expect::{
    after_tau_value_pseudo_honest, after_tau_value_pseudo_initial, before_tau_value,
    g_cond_expect_brute, g_cond_expect_pseudo_honest, g_cond_expect_pseudo_initial, payoff_at_tau,
};
pub use model::TimeModel;

use crate::error::{Error, Result};
use crate::prob::{FilteredSpace, RandomVariable};
use crate::process::{Process, ProcessKind};
use crate::verdict::Time;

/// `τ: Ω → {0, …, T, ∞}`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RandomTime {
    values: Vec<Time>,
    horizon: usize,
}

/// Azéma supermartingale `G_t = P(τ > t | F_t)` and submartingale `F = 1 - G`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Azema {
    pub g: Process,
    pub f: Process,
}

impl RandomTime {
    pub fn new(space: &FilteredSpace, values: Vec<Time>) -> Result<Self> {
        if values.len() != space.n() {
            return Err(Error::ShapeMismatch {
                what: "random time".into(),
                expected: space.n(),
                found: values.len(),
            });
        }
        if let Some(&Time::At(t)) = values.iter().find(|v| matches!(v, Time::At(t) if *t > space.horizon())) {
            return Err(Error::TimeOutOfRange {
                t,
                horizon: space.horizon(),
            });
        }
        Ok(RandomTime {
            values,
            horizon: space.horizon(),
        })
    }

    pub fn values(&self) -> &[Time] {
        &self.values
    }

    pub fn horizon(&self) -> usize {
        self.horizon
    }

    pub fn value(&self, atom: usize) -> Time {
        self.values[atom]
    }

    /// Slot of `τ(ω)`, `∞` being `T + 1`.
    pub fn slot(&self, atom: usize) -> usize {
        self.values[atom].slot(self.horizon)
    }

    pub fn slots(&self) -> Vec<usize> {
        (0..self.values.len()).map(|a| self.slot(a)).collect()
    }

    fn indicator<F: Fn(usize) -> bool>(&self, pred: F) -> RandomVariable {
        RandomVariable::indicator(self.values.len(), |a| pred(self.slot(a)))
    }

    /// `1_{τ ≤ t}` (slot `∞` gives the constant 1).
    pub fn indicator_le(&self, slot: usize) -> RandomVariable {
        self.indicator(|s| s <= slot)
    }

    pub fn indicator_gt(&self, slot: usize) -> RandomVariable {
        self.indicator(|s| s > slot)
    }

    pub fn indicator_ge(&self, slot: usize) -> RandomVariable {
        self.indicator(|s| s >= slot)
    }

    pub fn indicator_eq(&self, slot: usize) -> RandomVariable {
        self.indicator(|s| s == slot)
    }

    /// `H_t = 1_{τ ≤ t}` with `H_∞ = 1`.
    pub fn indicator_process(&self, space: &FilteredSpace) -> Process {
        Process::from_fn(space.slots(), ProcessKind::Increasing, |s| self.indicator_le(s))
    }

    pub fn azema(&self, space: &FilteredSpace) -> Azema {
        let f = space.filtration();
        let g = Process::from_fn(space.slots(), ProcessKind::Adapted, |s| {
            f.at(s).average(space.prob(), &self.indicator_gt(s))
        });
        let one = RandomVariable::one(space.n());
        let big_f = g.map(|_, x| &one - x);
        Azema { g, f: big_f }
    }

    /// `{τ ≤ t} ∈ F_t` for every `t`.
    pub fn is_stopping_time(&self, space: &FilteredSpace) -> bool {
        (0..space.slots()).all(|s| space.is_measurable(&self.indicator_le(s), s))
    }

    /// `τ` is `F_T`-measurable.
    pub fn is_terminal_measurable(&self, space: &FilteredSpace) -> bool {
        let level = space.filtration().at(space.horizon());
        level
            .blocks()
            .iter()
            .all(|b| b.iter().all(|&a| self.values[a] == self.values[b[0]]))
    }

    /// `τ ≡ c`.
    pub fn constant(space: &FilteredSpace, t: Time) -> Result<Self> {
        Self::new(space, vec![t; space.n()])
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures;
    use crate::rational::ratio;

    fn rv(v: &[(i64, i64)]) -> RandomVariable {
        v.iter().map(|&(n, d)| ratio(n, d)).collect()
    }

    #[test]
    fn azema_on_s1() {
        let (space, tau) = fixtures::s1();
        let az = tau.azema(&space);
        assert_eq!(az.g.at(1), &rv(&[(1, 2), (1, 2), (1, 1), (1, 1)]));
        assert_eq!(az.f.at(2), &rv(&[(1, 1), (1, 1), (1, 1), (0, 1)]));
        assert!(az.g.at(3).is_zero());
        assert!(!tau.is_stopping_time(&space));
        assert!(tau.is_terminal_measurable(&space));
    }

    #[test]
    fn infinite_time_has_unit_g() {
        let (space, _) = fixtures::s1();
        let tau = RandomTime::constant(&space, Time::Infinity).unwrap();
        let g = tau.azema(&space).g;
        for s in 0..=space.horizon() {
            assert_eq!(g.at(s), &RandomVariable::one(4));
        }
    }

    #[test]
    fn stopping_time_has_indicator_g() {
        let (space, _) = fixtures::s1();
        let tau = RandomTime::new(&space, vec![Time::At(1), Time::At(1), Time::At(2), Time::Infinity]).unwrap();
        assert!(tau.is_stopping_time(&space));
        let g = tau.azema(&space).g;
        for s in 0..space.slots() {
            assert_eq!(g.at(s), &tau.indicator_gt(s));
        }
    }

    #[test]
    fn rejects_times_beyond_horizon() {
        let (space, _) = fixtures::s1();
        assert!(RandomTime::new(&space, vec![Time::At(3); 4]).is_err());
    }
}
