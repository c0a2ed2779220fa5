//! Time indices, check verdicts and failure witnesses.

use std::fmt;

use crate::rational::{format_rational, Rational};

/// A point of the discrete time grid `0..=T` extended by the formal terminal time `∞`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Time {
    At(usize),
    Infinity,
}

impl Time {
    /// Array index of the time: `t` for finite times, `T + 1` for `∞`.
    pub fn slot(self, horizon: usize) -> usize {
        match self {
            Time::At(t) => t,
            Time::Infinity => horizon + 1,
        }
    }

    pub fn from_slot(slot: usize, horizon: usize) -> Time {
        if slot > horizon {
            Time::Infinity
        } else {
            Time::At(slot)
        }
    }

    pub fn is_finite(self) -> bool {
        matches!(self, Time::At(_))
    }
}

impl fmt::Display for Time {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Time::At(t) => write!(f, "{t}"),
            Time::Infinity => write!(f, "inf"),
        }
    }
}

/// Where an exact identity broke: named time coordinates, the offending block and both sides.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Witness {
    pub check: String,
    pub coords: Vec<(String, Time)>,
    pub atoms: Vec<usize>,
    pub lhs: Rational,
    pub rhs: Rational,
}

impl Witness {
    pub fn new(check: impl Into<String>, lhs: Rational, rhs: Rational) -> Self {
        Witness {
            check: check.into(),
            coords: Vec::new(),
            atoms: Vec::new(),
            lhs,
            rhs,
        }
    }

    pub fn at(mut self, name: &str, time: Time) -> Self {
        self.coords.push((name.to_string(), time));
        self
    }

    pub fn block(mut self, atoms: Vec<usize>) -> Self {
        self.atoms = atoms;
        self
    }

    pub fn coord(&self, name: &str) -> Option<Time> {
        self.coords.iter().find(|(n, _)| n == name).map(|(_, t)| *t)
    }
}

impl fmt::Display for Witness {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.check)?;
        for (name, t) in &self.coords {
            write!(f, " {name}={t}")?;
        }
        write!(
            f,
            " atoms={:?}: {} != {}",
            self.atoms,
            format_rational(&self.lhs),
            format_rational(&self.rhs)
        )
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Verdict {
    Pass,
    Fail(Box<Witness>),
    Unknown(String),
}

impl Verdict {
    pub fn fail(w: Witness) -> Self {
        Verdict::Fail(Box::new(w))
    }

    pub fn is_pass(&self) -> bool {
        matches!(self, Verdict::Pass)
    }

    pub fn is_fail(&self) -> bool {
        matches!(self, Verdict::Fail(_))
    }

    pub fn witness(&self) -> Option<&Witness> {
        match self {
            Verdict::Fail(w) => Some(w),
            _ => None,
        }
    }

    /// First failure wins; `Unknown` is kept only if nothing failed.
    pub fn and(self, other: Verdict) -> Verdict {
        match (self, other) {
            (Verdict::Fail(w), _) => Verdict::Fail(w),
            (_, Verdict::Fail(w)) => Verdict::Fail(w),
            (Verdict::Unknown(r), _) => Verdict::Unknown(r),
            (_, Verdict::Unknown(r)) => Verdict::Unknown(r),
            _ => Verdict::Pass,
        }
    }
}

impl fmt::Display for Verdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Verdict::Pass => write!(f, "PASS"),
            Verdict::Fail(w) => write!(f, "FAIL ({w})"),
            Verdict::Unknown(r) => write!(f, "UNKNOWN ({r})"),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::int;

    #[test]
    fn slots_round_trip() {
        assert_eq!(Time::At(2).slot(3), 2);
        assert_eq!(Time::Infinity.slot(3), 4);
        assert_eq!(Time::from_slot(4, 3), Time::Infinity);
        assert!(Time::At(10) < Time::Infinity);
    }

    #[test]
    fn failure_dominates() {
        let w = Witness::new("x", int(1), int(2)).at("t", Time::At(0));
        let v = Verdict::Pass.and(Verdict::Unknown("?".into())).and(Verdict::fail(w.clone()));
        assert_eq!(v.witness(), Some(&w));
        assert_eq!(w.coord("t"), Some(Time::At(0)));
    }
}
