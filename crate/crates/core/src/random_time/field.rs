use num_traits::{One, Signed, Zero};

use crate::error::{Error, Result};
use crate::prob::{FilteredSpace, RandomVariable};
use crate::process::{Process, ProcessKind};
use crate::rational::{in_unit_interval, Rational};
use crate::verdict::{Verdict, Witness};

use super::RandomTime;

/// The two-parameter field `F_{u,t} = P(τ ≤ u | F_t)`, stored densely over slots `0..=T, ∞`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ConditionalDistributionField {
    /// `table[u][t]`
    table: Vec<Vec<RandomVariable>>,
}

/// `F_{u,t} = E[1_{τ≤u} | F_t]`.
pub fn conditional_distribution(space: &FilteredSpace, tau: &RandomTime) -> ConditionalDistributionField {
    let f = space.filtration();
    let table = (0..space.slots())
        .map(|u| {
            let ind = tau.indicator_le(u);
            (0..space.slots())
                .map(|t| f.at(t).average(space.prob(), &ind))
                .collect()
        })
        .collect();
    ConditionalDistributionField { table }
}

impl ConditionalDistributionField {
    /// Validates a user-supplied table against the field axioms.
    pub fn new(space: &FilteredSpace, table: Vec<Vec<RandomVariable>>) -> Result<Self> {
        let slots = space.slots();
        if table.len() != slots {
            return Err(Error::ShapeMismatch {
                what: "field rows".into(),
                expected: slots,
                found: table.len(),
            });
        }
        for row in &table {
            if row.len() != slots {
                return Err(Error::ShapeMismatch {
                    what: "field columns".into(),
                    expected: slots,
                    found: row.len(),
                });
            }
            if let Some(x) = row.iter().find(|x| x.len() != space.n()) {
                return Err(Error::ShapeMismatch {
                    what: "field atoms".into(),
                    expected: space.n(),
                    found: x.len(),
                });
            }
        }
        let field = ConditionalDistributionField { table };
        match field.validate(space) {
            Verdict::Fail(w) => Err(Error::FieldAxiomViolation(w)),
            _ => Ok(field),
        }
    }

    pub fn slots(&self) -> usize {
        self.table.len()
    }

    pub fn horizon(&self) -> usize {
        self.table.len() - 2
    }

    pub fn get(&self, u: usize, t: usize) -> &RandomVariable {
        &self.table[u][t]
    }

    pub fn table(&self) -> &[Vec<RandomVariable>] {
        &self.table
    }

    /// `F_{u,t} - F_{u-1,t}` (with `F_{-1,t} = 0`), the conditional mass of `{τ = u}`.
    pub fn mass(&self, u: usize, t: usize) -> RandomVariable {
        if u == 0 {
            self.table[0][t].clone()
        } else {
            &self.table[u][t] - &self.table[u - 1][t]
        }
    }

    /// Diagonal `F_t = F_{t,t}`, the Azéma submartingale.
    pub fn diagonal(&self) -> Process {
        Process::from_fn(self.slots(), ProcessKind::Adapted, |t| self.table[t][t].clone())
    }

    /// `t ↦ F_{u,t}` over all slots.
    pub fn column(&self, u: usize) -> Process {
        Process::new(self.table[u].clone(), ProcessKind::Adapted)
    }

    /// Bounds, monotonicity in `u`, `F_{∞,t} = 1`, measurability and the martingale property in `t`.
    pub fn validate(&self, space: &FilteredSpace) -> Verdict {
        let slots = self.slots();
        let inf = slots - 1;
        for u in 0..slots {
            for t in 0..slots {
                let x = &self.table[u][t];
                if let Some(a) = x.values().iter().position(|v| !in_unit_interval(v)) {
                    let bound = if x[a].is_negative() { Rational::zero() } else { Rational::one() };
                    return Verdict::fail(
                        Witness::new("field bounds", x[a].clone(), bound)
                            .at("u", space.time(u))
                            .at("t", space.time(t))
                            .block(vec![a]),
                    );
                }
                if u > 0 {
                    let prev = &self.table[u - 1][t];
                    if let Some(a) = (0..x.len()).find(|&a| prev[a] > x[a]) {
                        return Verdict::fail(
                            Witness::new("field monotone in u", prev[a].clone(), x[a].clone())
                                .at("u", space.time(u))
                                .at("t", space.time(t))
                                .block(vec![a]),
                        );
                    }
                }
            }
        }
        for t in 0..slots {
            let x = &self.table[inf][t];
            if let Some(a) = x.values().iter().position(|v| !v.is_one()) {
                return Verdict::fail(
                    Witness::new("field at infinity", x[a].clone(), Rational::one())
                        .at("t", space.time(t))
                        .block(vec![a]),
                );
            }
        }
        for u in 0..slots {
            if let Verdict::Fail(mut w) = space.martingale_verdict(&self.column(u)) {
                w.check = format!("field column {}", w.check);
                w.coords.insert(0, ("u".into(), space.time(u)));
                return Verdict::Fail(w);
            }
        }
        Verdict::Pass
    }

    /// `F_{u,t} > 0` for all `0 < u ≤ t`.
    pub fn strict_positivity(&self, space: &FilteredSpace) -> Verdict {
        for u in 1..self.slots() {
            for t in u..self.slots() {
                let x = &self.table[u][t];
                if let Some(a) = x.values().iter().position(|v| !v.is_positive()) {
                    return Verdict::fail(
                        Witness::new("strict positivity", x[a].clone(), Rational::zero())
                            .at("u", space.time(u))
                            .at("t", space.time(t))
                            .block(vec![a]),
                    );
                }
            }
        }
        Verdict::Pass
    }

    /// Same field on a space whose atoms refine the original (used by extensions).
    pub fn lift(&self, map: impl Fn(&RandomVariable) -> RandomVariable) -> Self {
        ConditionalDistributionField {
            table: self
                .table
                .iter()
                .map(|row| row.iter().map(&map).collect())
                .collect(),
        }
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
    fn s1_field_values() {
        let (space, tau) = fixtures::s1();
        let field = conditional_distribution(&space, &tau);
        assert_eq!(field.get(1, 2), &rv(&[(1, 1), (0, 1), (0, 1), (0, 1)]));
        assert_eq!(field.get(1, 1), &rv(&[(1, 2), (1, 2), (0, 1), (0, 1)]));
        for t in 0..4 {
            assert_eq!(field.get(3, t), &RandomVariable::one(4));
        }
        assert_eq!(field.diagonal(), tau.azema(&space).f);
        assert!(field.validate(&space).is_pass());
        assert!(field.strict_positivity(&space).is_fail());
    }

    #[test]
    fn user_table_is_validated() {
        let (space, tau) = fixtures::s1();
        let mut table = conditional_distribution(&space, &tau).table().to_vec();
        table[1][1] = rv(&[(1, 1), (0, 1), (0, 1), (0, 1)]);
        assert!(matches!(
            ConditionalDistributionField::new(&space, table),
            Err(Error::FieldAxiomViolation(_))
        ));
    }
}
