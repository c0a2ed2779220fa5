//! Finite filtered probability spaces with exact rational weights.

mod partition;
mod variable;

pub use partition::{Filtration, Partition};
pub use variable::RandomVariable;

use num_traits::{One, Signed, Zero};

use crate::error::{Error, Result};
use crate::process::Process;
use crate::rational::Rational;
use crate::verdict::{Time, Verdict, Witness};

/// Atoms, their probabilities and a filtration `F_0 ⊆ … ⊆ F_T` (with `F_∞ = F_{∞-} = F_T`).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FilteredSpace {
    atoms: Vec<String>,
    prob: Vec<Rational>,
    filtration: Filtration,
}

/// Builds and validates a space from atom names, weights and per-level blocks of atom indices.
pub fn build_space(
    atoms: Vec<String>,
    prob: Vec<Rational>,
    partitions: Vec<Vec<Vec<usize>>>,
) -> Result<FilteredSpace> {
    let n = atoms.len();
    let levels = partitions
        .into_iter()
        .enumerate()
        .map(|(level, blocks)| {
            Partition::new(n, blocks).map_err(|reason| Error::InvalidPartition { level, reason })
        })
        .collect::<Result<Vec<_>>>()?;
    FilteredSpace::new(atoms, prob, Filtration::new(levels)?)
}

impl FilteredSpace {
    pub fn new(atoms: Vec<String>, prob: Vec<Rational>, filtration: Filtration) -> Result<Self> {
        if prob.len() != atoms.len() {
            return Err(Error::ShapeMismatch {
                what: "probabilities".into(),
                expected: atoms.len(),
                found: prob.len(),
            });
        }
        if filtration.n_atoms() != atoms.len() {
            return Err(Error::ShapeMismatch {
                what: "filtration atoms".into(),
                expected: atoms.len(),
                found: filtration.n_atoms(),
            });
        }
        check_weights(&prob)?;
        Ok(FilteredSpace {
            atoms,
            prob,
            filtration,
        })
    }

    /// Space with atoms named `w0, w1, …`.
    pub fn anonymous(prob: Vec<Rational>, filtration: Filtration) -> Result<Self> {
        let atoms = (0..prob.len()).map(|i| format!("w{i}")).collect();
        Self::new(atoms, prob, filtration)
    }

    pub fn n(&self) -> usize {
        self.atoms.len()
    }

    pub fn horizon(&self) -> usize {
        self.filtration.horizon()
    }

    /// Slot index of the terminal time `∞`.
    pub fn infinity(&self) -> usize {
        self.horizon() + 1
    }

    /// Number of slots `0..=T` plus `∞`.
    pub fn slots(&self) -> usize {
        self.horizon() + 2
    }

    pub fn time(&self, slot: usize) -> Time {
        Time::from_slot(slot, self.horizon())
    }

    pub fn atoms(&self) -> &[String] {
        &self.atoms
    }

    pub fn prob(&self) -> &[Rational] {
        &self.prob
    }

    pub fn filtration(&self) -> &Filtration {
        &self.filtration
    }

    /// Same atoms and weights, different filtration (e.g. an enlargement).
    pub fn with_filtration(&self, filtration: Filtration) -> Result<Self> {
        Self::new(self.atoms.clone(), self.prob.clone(), filtration)
    }

    pub fn with_prob(&self, prob: Vec<Rational>) -> Result<Self> {
        Self::new(self.atoms.clone(), prob, self.filtration.clone())
    }

    fn check_slot(&self, slot: usize) -> Result<()> {
        if slot > self.infinity() {
            return Err(Error::TimeOutOfRange {
                t: slot,
                horizon: self.horizon(),
            });
        }
        Ok(())
    }

    pub fn expect(&self, x: &RandomVariable) -> Rational {
        x.values()
            .iter()
            .zip(&self.prob)
            .fold(Rational::zero(), |acc, (v, p)| acc + v * p)
    }

    /// `E[X | F_t]`.
    pub fn cond_expect(&self, x: &RandomVariable, slot: usize) -> Result<RandomVariable> {
        self.check_slot(slot)?;
        Ok(self.filtration.at(slot).average(&self.prob, x))
    }

    /// `E[X | F_{t-1}]` with `F_{0-} = F_0`.
    pub fn cond_expect_before(&self, x: &RandomVariable, slot: usize) -> Result<RandomVariable> {
        self.check_slot(slot)?;
        Ok(self.filtration.before(slot).average(&self.prob, x))
    }

    pub fn is_measurable(&self, x: &RandomVariable, slot: usize) -> bool {
        self.filtration.at(slot).is_measurable(x)
    }

    /// Smallest level whose blocks carry `x` as a constant; `None` if not even `F_T`-measurable.
    pub fn measurability_level(&self, x: &RandomVariable) -> Option<usize> {
        (0..=self.horizon()).find(|&t| self.is_measurable(x, t))
    }

    pub fn check_adapted(&self, x: &Process, what: &str) -> Result<()> {
        self.check_shape(x, what)?;
        match (0..x.slots()).find(|&s| !self.is_measurable(x.at(s), s)) {
            Some(s) => Err(Error::NotAdapted {
                what: what.into(),
                t: self.time(s),
            }),
            None => Ok(()),
        }
    }

    pub fn check_predictable(&self, x: &Process, what: &str) -> Result<()> {
        self.check_shape(x, what)?;
        let bad = (0..x.slots()).find(|&s| !self.filtration.before(s).is_measurable(x.at(s)));
        match bad {
            Some(s) => Err(Error::NotPredictable {
                what: what.into(),
                t: self.time(s),
            }),
            None => Ok(()),
        }
    }

    pub fn check_shape(&self, x: &Process, what: &str) -> Result<()> {
        if x.slots() != self.slots() {
            return Err(Error::ShapeMismatch {
                what: what.into(),
                expected: self.slots(),
                found: x.slots(),
            });
        }
        if let Some(bad) = x.values().iter().find(|v| v.len() != self.n()) {
            return Err(Error::ShapeMismatch {
                what: format!("{what} atoms"),
                expected: self.n(),
                found: bad.len(),
            });
        }
        Ok(())
    }

    /// Exact tower check `E[X_{t+1} | F_t] = X_t` for all steps including `T → ∞`.
    pub fn is_martingale(&self, x: &Process) -> Result<Verdict> {
        self.check_adapted(x, "martingale candidate")?;
        Ok(self.martingale_verdict(x))
    }

    /// As [`is_martingale`](Self::is_martingale) but reports non-adaptedness as a failure witness.
    pub fn martingale_verdict(&self, x: &Process) -> Verdict {
        for s in 0..x.slots() {
            let p = self.filtration.at(s);
            if let Some(b) = p.non_constant_block(x.at(s)) {
                let block = p.blocks()[b].clone();
                let v = x.at(s);
                let other = block
                    .iter()
                    .copied()
                    .find(|&a| v[a] != v[block[0]])
                    .expect("block is non-constant");
                let w = Witness::new("adapted", v[block[0]].clone(), v[other].clone())
                    .at("t", self.time(s))
                    .block(block);
                return Verdict::fail(w);
            }
        }
        for s in 1..x.slots() {
            let p = self.filtration.before(s);
            let e = p.average(&self.prob, x.at(s));
            for block in p.blocks() {
                let a = block[0];
                if e[a] != x.at(s - 1)[a] {
                    let w = Witness::new("martingale", e[a].clone(), x.at(s - 1)[a].clone())
                        .at("t", self.time(s - 1))
                        .block(block.clone());
                    return Verdict::fail(w);
                }
            }
        }
        Verdict::Pass
    }
}

fn check_weights(prob: &[Rational]) -> Result<()> {
    if let Some(atom) = prob.iter().position(Signed::is_negative) {
        return Err(Error::NegativeProbability { atom });
    }
    let total: Rational = prob.iter().sum();
    if !total.is_one() {
        return Err(Error::ProbabilityNotNormalized { total });
    }
    if let Some(atom) = prob.iter().position(Zero::is_zero) {
        return Err(Error::ZeroProbabilityBlock { atom });
    }
    Ok(())
}

/// A probability measure given by its density against the base weights.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Measure {
    density: RandomVariable,
}

impl Measure {
    pub fn new(space: &FilteredSpace, density: RandomVariable) -> Result<Self> {
        if density.len() != space.n() {
            return Err(Error::ShapeMismatch {
                what: "density".into(),
                expected: space.n(),
                found: density.len(),
            });
        }
        if !density.is_nonnegative() {
            return Err(Error::InvalidDensity {
                reason: "negative density".into(),
            });
        }
        let mass = space.expect(&density);
        if !mass.is_one() {
            return Err(Error::InvalidDensity {
                reason: format!("total mass {mass}"),
            });
        }
        Ok(Measure { density })
    }

    /// Measure with the given atom weights.
    pub fn from_weights(space: &FilteredSpace, weights: &[Rational]) -> Result<Self> {
        let density = weights.iter().zip(space.prob()).map(|(q, p)| q / p).collect();
        Self::new(space, density)
    }

    pub fn identity(space: &FilteredSpace) -> Self {
        Measure {
            density: RandomVariable::one(space.n()),
        }
    }

    pub fn density(&self) -> &RandomVariable {
        &self.density
    }

    pub fn is_equivalent(&self) -> bool {
        self.density.is_positive()
    }

    pub fn weights(&self, space: &FilteredSpace) -> Vec<Rational> {
        self.density
            .values()
            .iter()
            .zip(space.prob())
            .map(|(z, p)| z * p)
            .collect()
    }
}

/// Reweights atoms by `Z`; the new space must keep every atom, so `Z > 0` is required.
pub fn change_measure(space: &FilteredSpace, z: &Measure) -> Result<FilteredSpace> {
    if let Some(atom) = z.density().values().iter().position(Zero::is_zero) {
        return Err(Error::NotEquivalent { atom });
    }
    space.with_prob(z.weights(space))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::process::ProcessKind;
    use crate::rational::{int, ratio};

    pub(crate) fn s1() -> FilteredSpace {
        build_space(
            ["a", "b", "c", "d"].iter().map(|s| s.to_string()).collect(),
            vec![ratio(1, 4); 4],
            vec![
                vec![vec![0, 1, 2, 3]],
                vec![vec![0, 1], vec![2, 3]],
                vec![vec![0], vec![1], vec![2], vec![3]],
            ],
        )
        .unwrap()
    }

    fn rv(v: &[(i64, i64)]) -> RandomVariable {
        v.iter().map(|&(n, d)| ratio(n, d)).collect()
    }

    #[test]
    fn s1_is_valid_and_degenerate_space_too() {
        let s = s1();
        assert_eq!(s.horizon(), 2);
        assert_eq!(s.infinity(), 3);
        let single = build_space(
            vec!["w".into()],
            vec![int(1)],
            vec![vec![vec![0]]; 4],
        )
        .unwrap();
        assert_eq!(single.horizon(), 3);
    }

    #[test]
    fn rejects_unnormalized_and_zero_mass() {
        let e = build_space(
            vec!["a".into(), "b".into()],
            vec![ratio(1, 2), ratio(1, 3)],
            vec![vec![vec![0, 1]]],
        );
        assert_eq!(e, Err(Error::ProbabilityNotNormalized { total: ratio(5, 6) }));
        let e = build_space(
            vec!["a".into(), "b".into()],
            vec![int(1), int(0)],
            vec![vec![vec![0, 1]]],
        );
        assert_eq!(e, Err(Error::ZeroProbabilityBlock { atom: 1 }));
    }

    #[test]
    fn cond_expect_on_s1() {
        let s = s1();
        // 1_{τ≤1} for τ = (1, 2, 2, ∞)
        let x = rv(&[(1, 1), (0, 1), (0, 1), (0, 1)]);
        assert_eq!(s.cond_expect(&x, 1).unwrap(), rv(&[(1, 2), (1, 2), (0, 1), (0, 1)]));
        assert_eq!(s.cond_expect(&x, 2).unwrap(), x);
        assert_eq!(s.cond_expect(&x, 3).unwrap(), x);
        assert_eq!(
            s.cond_expect(&x, 4),
            Err(Error::TimeOutOfRange { t: 4, horizon: 2 })
        );
        let c = RandomVariable::constant(4, ratio(7, 3));
        assert_eq!(s.cond_expect(&c, 0).unwrap(), c);
    }

    #[test]
    fn measurability_level_is_computed() {
        let s = s1();
        assert_eq!(s.measurability_level(&rv(&[(1, 1), (1, 1), (2, 1), (2, 1)])), Some(1));
        assert_eq!(s.measurability_level(&RandomVariable::one(4)), Some(0));
        assert_eq!(s.measurability_level(&rv(&[(1, 1), (0, 1), (0, 1), (0, 1)])), Some(2));
    }

    #[test]
    fn change_of_measure_examples() {
        let s = s1();
        let z = Measure::new(&s, rv(&[(3, 2), (3, 2), (1, 2), (1, 2)])).unwrap();
        let q = change_measure(&s, &z).unwrap();
        assert_eq!(q.prob(), &[ratio(3, 8), ratio(3, 8), ratio(1, 8), ratio(1, 8)]);
        let id = change_measure(&s, &Measure::identity(&s)).unwrap();
        assert_eq!(id, s);
        let z0 = Measure::new(&s, rv(&[(2, 1), (2, 1), (0, 1), (0, 1)])).unwrap();
        assert!(!z0.is_equivalent());
        assert_eq!(change_measure(&s, &z0), Err(Error::NotEquivalent { atom: 2 }));
    }

    #[test]
    fn martingale_check_on_s1() {
        let s = s1();
        let m = Process::new(
            vec![
                rv(&[(1, 1); 4]),
                rv(&[(3, 4), (3, 4), (5, 4), (5, 4)]),
                rv(&[(3, 4), (3, 4), (3, 4), (7, 4)]),
                rv(&[(3, 4), (3, 4), (3, 4), (7, 4)]),
            ],
            ProcessKind::Adapted,
        );
        assert!(s.is_martingale(&m).unwrap().is_pass());
        // the Azéma submartingale F of τ = (1, 2, 2, ∞)
        let f = Process::new(
            vec![
                rv(&[(0, 1); 4]),
                rv(&[(1, 2), (1, 2), (0, 1), (0, 1)]),
                rv(&[(1, 1), (1, 1), (1, 1), (0, 1)]),
                rv(&[(1, 1); 4]),
            ],
            ProcessKind::Adapted,
        );
        let v = s.is_martingale(&f).unwrap();
        let w = v.witness().unwrap();
        assert_eq!(w.coord("t"), Some(Time::At(0)));
        assert_eq!(w.lhs, ratio(1, 4));
        assert_eq!(w.rhs, int(0));
    }

    #[test]
    fn non_adapted_candidate_is_an_error() {
        let s = s1();
        let x = Process::new(
            vec![rv(&[(1, 1), (0, 1), (0, 1), (0, 1)]), RandomVariable::zero(4), RandomVariable::zero(4), RandomVariable::zero(4)],
            ProcessKind::Adapted,
        );
        assert!(matches!(s.is_martingale(&x), Err(Error::NotAdapted { .. })));
    }
}
