use num_traits::{Signed, Zero};

use crate::error::{Error, Result};
use crate::prob::{FilteredSpace, Filtration, Partition, RandomVariable};
use crate::process::Process;
use crate::random_time::{ConditionalDistributionField, RandomTime};
use crate::verdict::{Time, Verdict, Witness};

/// Atoms `(ω, u)` carrying `P(ω) (F_{u,∞}(ω) - F_{u-1,∞}(ω))`; zero-mass pairs are dropped.
#[derive(Debug, Clone)]
pub struct ExtendedSpace {
    base: FilteredSpace,
    space: FilteredSpace,
    tau: RandomTime,
    /// `(base atom, mark slot)` per extended atom.
    origin: Vec<(usize, usize)>,
}

pub fn canonical_extension(base: &FilteredSpace, field: &ConditionalDistributionField) -> Result<ExtendedSpace> {
    let inf = base.infinity();
    let mut origin = Vec::new();
    let mut prob = Vec::new();
    let mut names = Vec::new();
    for w in 0..base.n() {
        for u in 0..base.slots() {
            let mass = &field.mass(u, inf)[w];
            if mass.is_negative() {
                return Err(Error::NegativeMassIncrement { atom: w });
            }
            if mass.is_zero() {
                continue;
            }
            origin.push((w, u));
            prob.push(&base.prob()[w] * mass);
            names.push(format!("{}@{}", base.atoms()[w], base.time(u)));
        }
    }
    let n = origin.len();
    let levels = (0..=base.horizon())
        .map(|t| {
            let p = base.filtration().at(t);
            Partition::from_key(n, |i| p.block_of(origin[i].0))
        })
        .collect();
    let space = FilteredSpace::new(names, prob, Filtration::new(levels)?)?;
    let tau = RandomTime::new(
        &space,
        origin.iter().map(|&(_, u)| Time::from_slot(u, base.horizon())).collect(),
    )?;
    Ok(ExtendedSpace {
        base: base.clone(),
        space,
        tau,
        origin,
    })
}

impl ExtendedSpace {
    pub fn base(&self) -> &FilteredSpace {
        &self.base
    }

    pub fn space(&self) -> &FilteredSpace {
        &self.space
    }

    pub fn tau(&self) -> &RandomTime {
        &self.tau
    }

    pub fn origin(&self) -> &[(usize, usize)] {
        &self.origin
    }

    pub fn lift(&self, x: &RandomVariable) -> RandomVariable {
        self.origin.iter().map(|&(w, _)| x[w].clone()).collect()
    }

    pub fn lift_process(&self, x: &Process) -> Process {
        x.map(|_, v| self.lift(v))
    }

    /// Inverse of [`lift`](Self::lift) when `x` does not depend on the mark.
    ///
    /// Base atoms are always represented, since every `ω` carries total mark mass 1.
    pub fn pull_back(&self, x: &RandomVariable) -> Option<RandomVariable> {
        let mut out: Vec<Option<_>> = vec![None; self.base.n()];
        for (i, &(w, _)) in self.origin.iter().enumerate() {
            match &out[w] {
                None => out[w] = Some(x[i].clone()),
                Some(v) if *v != x[i] => return None,
                Some(_) => {}
            }
        }
        out.into_iter().collect::<Option<Vec<_>>>().map(RandomVariable::new)
    }

    pub fn pull_back_process(&self, x: &Process) -> Option<Process> {
        let values = x
            .values()
            .iter()
            .map(|v| self.pull_back(v))
            .collect::<Option<Vec<_>>>()?;
        Some(Process::new(values, x.kind()))
    }

    /// `P̂(τ ≤ u | F̂_t)` equals the lifted `F_{u,t}` for all `u`, `t`.
    pub fn verify_field(&self, field: &ConditionalDistributionField) -> Verdict {
        let f = self.space.filtration();
        for u in 0..self.space.slots() {
            let ind = self.tau.indicator_le(u);
            for t in 0..self.space.slots() {
                let lhs = f.at(t).average(self.space.prob(), &ind);
                let rhs = self.lift(field.get(u, t));
                if let Some(i) = (0..lhs.len()).find(|&i| lhs[i] != rhs[i]) {
                    return Verdict::fail(
                        Witness::new("extension", lhs[i].clone(), rhs[i].clone())
                            .at("u", self.space.time(u))
                            .at("t", self.space.time(t))
                            .block(vec![i]),
                    );
                }
            }
        }
        Verdict::Pass
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures;
    use crate::prob::build_space;
    use crate::random_time::conditional_distribution;
    use crate::rational::{int, ratio};

    #[test]
    fn genuine_time_round_trip() {
        let (space, tau) = fixtures::s1();
        let field = conditional_distribution(&space, &tau);
        let ext = canonical_extension(&space, &field).unwrap();
        assert!(ext.verify_field(&field).is_pass());
        assert_eq!(ext.space().n(), 4);
        let f = tau.azema(&space).f;
        assert_eq!(ext.tau().azema(ext.space()).f, ext.lift_process(&f));
    }

    #[test]
    fn point_mass_field_gives_constant_time() {
        let space = build_space(
            vec!["x".into(), "y".into()],
            vec![ratio(1, 2); 2],
            vec![vec![vec![0, 1]], vec![vec![0], vec![1]]],
        )
        .unwrap();
        let table = (0..3)
            .map(|u| (0..3).map(|_| RandomVariable::constant(2, int((u >= 1) as i64))).collect())
            .collect();
        let field = ConditionalDistributionField::new(&space, table).unwrap();
        let ext = canonical_extension(&space, &field).unwrap();
        assert!(ext.tau().values().iter().all(|&t| t == Time::At(1)));
        assert_eq!(ext.pull_back(&ext.lift(&RandomVariable::from_fn(2, |a| int(a as i64)))).unwrap()[1], int(1));
    }
}
