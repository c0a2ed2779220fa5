//! Time-indexed families of random variables on the grid `0..=T, ∞`.

use std::ops::{Add, Neg, Sub};

use crate::prob::RandomVariable;
use crate::rational::Rational;

/// Declared role of a process; measurability is always checked, never trusted.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum ProcessKind {
    Raw,
    Adapted,
    Predictable,
    Increasing,
    FiniteVariation,
}

/// Values at slots `0..=T` followed by the `∞` slot; `X_{0-} = 0` when increments are taken.
#[derive(Debug, Clone)]
pub struct Process {
    values: Vec<RandomVariable>,
    kind: ProcessKind,
}

impl PartialEq for Process {
    fn eq(&self, other: &Self) -> bool {
        self.values == other.values
    }
}

impl Eq for Process {}

impl Process {
    /// `values` must hold `T + 2` entries (the last one is the `∞` slot).
    pub fn new(values: Vec<RandomVariable>, kind: ProcessKind) -> Self {
        assert!(values.len() >= 2, "a process needs at least slots 0 and inf");
        Process { values, kind }
    }

    pub fn from_fn<F: FnMut(usize) -> RandomVariable>(slots: usize, kind: ProcessKind, f: F) -> Self {
        Self::new((0..slots).map(f).collect(), kind)
    }

    pub fn constant(slots: usize, x: RandomVariable) -> Self {
        Self::new(vec![x; slots], ProcessKind::Adapted)
    }

    pub fn zero(slots: usize, n: usize) -> Self {
        Self::constant(slots, RandomVariable::zero(n))
    }

    pub fn kind(&self) -> ProcessKind {
        self.kind
    }

    pub fn with_kind(mut self, kind: ProcessKind) -> Self {
        self.kind = kind;
        self
    }

    pub fn slots(&self) -> usize {
        self.values.len()
    }

    pub fn horizon(&self) -> usize {
        self.values.len() - 2
    }

    pub fn infinity(&self) -> usize {
        self.values.len() - 1
    }

    pub fn at(&self, slot: usize) -> &RandomVariable {
        &self.values[slot]
    }

    pub fn values(&self) -> &[RandomVariable] {
        &self.values
    }

    pub fn terminal(&self) -> &RandomVariable {
        &self.values[self.infinity()]
    }

    /// `X_t - X_{t-1}`, with `X_{0-} = 0`.
    pub fn increment(&self, slot: usize) -> RandomVariable {
        if slot == 0 {
            self.values[0].clone()
        } else {
            &self.values[slot] - &self.values[slot - 1]
        }
    }

    /// Rebuilds a process from increments at slots `0..`, summing from `X_{0-} = 0`.
    pub fn from_increments(increments: Vec<RandomVariable>, kind: ProcessKind) -> Self {
        let mut acc: Option<RandomVariable> = None;
        let values = increments
            .into_iter()
            .map(|d| {
                let next = match acc.take() {
                    None => d,
                    Some(prev) => prev + d,
                };
                acc = Some(next.clone());
                next
            })
            .collect();
        Self::new(values, kind)
    }

    pub fn map<F: FnMut(usize, &RandomVariable) -> RandomVariable>(&self, mut f: F) -> Self {
        Process {
            values: self.values.iter().enumerate().map(|(s, x)| f(s, x)).collect(),
            kind: self.kind,
        }
    }

    pub fn scale(&self, c: &Rational) -> Self {
        self.map(|_, x| x.scale(c))
    }

    /// `X_{t ∧ σ}` for a slot-valued time `σ(ω)`.
    pub fn stopped(&self, stop_slot: &[usize]) -> Self {
        let n = self.values[0].len();
        Process::from_fn(self.slots(), self.kind, |s| {
            RandomVariable::from_fn(n, |a| self.values[s.min(stop_slot[a])][a].clone())
        })
    }
}

impl Add<&Process> for &Process {
    type Output = Process;
    fn add(self, rhs: &Process) -> Process {
        Process::from_fn(self.slots(), self.kind, |s| &self.values[s] + &rhs.values[s])
    }
}

impl Sub<&Process> for &Process {
    type Output = Process;
    fn sub(self, rhs: &Process) -> Process {
        Process::from_fn(self.slots(), self.kind, |s| &self.values[s] - &rhs.values[s])
    }
}

impl Neg for &Process {
    type Output = Process;
    fn neg(self) -> Process {
        self.map(|_, x| -x)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::int;

    fn rv(v: &[i64]) -> RandomVariable {
        v.iter().map(|&x| int(x)).collect()
    }

    #[test]
    fn increments_round_trip() {
        let x = Process::new(vec![rv(&[1, 2]), rv(&[3, 2]), rv(&[3, 7])], ProcessKind::Adapted);
        let inc: Vec<_> = (0..3).map(|s| x.increment(s)).collect();
        assert_eq!(Process::from_increments(inc, ProcessKind::Adapted), x);
    }

    #[test]
    fn stopping_freezes_values() {
        let x = Process::new(vec![rv(&[0, 0]), rv(&[1, 1]), rv(&[2, 2])], ProcessKind::Adapted);
        let st = x.stopped(&[0, 2]);
        assert_eq!(st.at(2), &rv(&[0, 2]));
    }
}
