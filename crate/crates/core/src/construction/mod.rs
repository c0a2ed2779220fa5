//! Random times with a prescribed Azéma submartingale: multiplicative systems, the fields they
//! induce, and the canonical extension that realizes a field.

mod extension;
pub mod generators;

pub use extension::{canonical_extension, ExtendedSpace};

use num_traits::{One, Signed, Zero};

use crate::calculus::{doob_decomposition, dual_optional_projection, Orientation};
use crate::error::{Error, Result};
use crate::prob::{FilteredSpace, RandomVariable};
use crate::process::Process;
use crate::random_time::{ConditionalDistributionField, RandomTime};
use crate::rational::{in_unit_interval, Rational};
use crate::verdict::{Verdict, Witness};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SystemKind {
    Predictable,
    Optional,
}

/// `C_{s,t}` for `s ≤ t`, stored as `table[s][t]` (entries with `t < s` hold 1).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MultiplicativeSystem {
    table: Vec<Vec<RandomVariable>>,
    kind: SystemKind,
}

impl MultiplicativeSystem {
    /// `C_{s,t} = Π_{s<u≤t} factor_u`.
    fn from_factors(factors: &[RandomVariable], kind: SystemKind) -> Self {
        let slots = factors.len();
        let n = factors[0].len();
        let table = (0..slots)
            .map(|s| {
                let mut acc = RandomVariable::one(n);
                (0..slots)
                    .map(|t| {
                        if t > s {
                            acc = &acc * &factors[t];
                        }
                        acc.clone()
                    })
                    .collect()
            })
            .collect();
        MultiplicativeSystem { table, kind }
    }

    pub fn kind(&self) -> SystemKind {
        self.kind
    }

    pub fn slots(&self) -> usize {
        self.table.len()
    }

    pub fn get(&self, s: usize, t: usize) -> &RandomVariable {
        &self.table[s][t]
    }

    /// `C_{s,s} = 1`, `0 ≤ C ≤ 1`, nonincreasing in `t`, multiplicative, and measurable per kind.
    pub fn validate(&self, space: &FilteredSpace) -> Verdict {
        let slots = self.slots();
        let f = space.filtration();
        let w = |check: &str, lhs: Rational, rhs: Rational, s: usize, t: usize, a: usize| {
            Verdict::fail(
                Witness::new(check, lhs, rhs)
                    .at("s", space.time(s))
                    .at("t", space.time(t))
                    .block(vec![a]),
            )
        };
        for s in 0..slots {
            if let Some(a) = self.get(s, s).values().iter().position(|x| !x.is_one()) {
                return w("C diagonal", self.get(s, s)[a].clone(), Rational::one(), s, s, a);
            }
            for t in s..slots {
                let c = self.get(s, t);
                if let Some(a) = c.values().iter().position(|x| !in_unit_interval(x)) {
                    return w("C bounds", c[a].clone(), Rational::one(), s, t, a);
                }
                if t > s {
                    let prev = self.get(s, t - 1);
                    if let Some(a) = (0..c.len()).find(|&a| c[a] > prev[a]) {
                        return w("C nonincreasing", c[a].clone(), prev[a].clone(), s, t, a);
                    }
                }
                let level = match self.kind {
                    SystemKind::Predictable => f.before(t),
                    SystemKind::Optional => f.at(t),
                };
                if let Some(b) = level.non_constant_block(c) {
                    let block = level.blocks()[b].clone();
                    let other = *block.iter().find(|&&x| c[x] != c[block[0]]).expect("non-constant");
                    return Verdict::fail(
                        Witness::new("C measurability", c[block[0]].clone(), c[other].clone())
                            .at("s", space.time(s))
                            .at("t", space.time(t))
                            .block(block),
                    );
                }
                for u in s..=t {
                    let prod = self.get(s, u) * self.get(u, t);
                    if let Some(a) = (0..c.len()).find(|&a| prod[a] != c[a]) {
                        return w("C multiplicative", prod[a].clone(), c[a].clone(), s, t, a);
                    }
                }
            }
        }
        Verdict::Pass
    }
}

/// `F` adapted with values in `[0,1]` and `F_∞ = 1`.
fn check_submartingale_shape(space: &FilteredSpace, f: &Process) -> Result<()> {
    space.check_adapted(f, "Azéma submartingale")?;
    for s in 0..f.slots() {
        if let Some(a) = f.at(s).values().iter().position(|x| !in_unit_interval(x)) {
            return Err(Error::FieldAxiomViolation(Box::new(
                Witness::new("F bounds", f.at(s)[a].clone(), Rational::one())
                    .at("t", space.time(s))
                    .block(vec![a]),
            )));
        }
    }
    let term = f.terminal();
    if let Some(a) = term.values().iter().position(|x| !x.is_one()) {
        return Err(Error::FieldAxiomViolation(Box::new(
            Witness::new("F at infinity", term[a].clone(), Rational::one())
                .at("t", space.time(space.infinity()))
                .block(vec![a]),
        )));
    }
    Ok(())
}

/// `1 - Δa / den`, frozen at 1 where `den = 0 = Δa`.
fn factor(space: &FilteredSpace, da: &RandomVariable, den: &RandomVariable, slot: usize) -> Result<RandomVariable> {
    (0..da.len())
        .map(|a| {
            if den[a].is_zero() {
                if da[a].is_zero() {
                    Ok(Rational::one())
                } else {
                    Err(Error::DegenerateDenominator {
                        t: space.time(slot),
                        atom: a,
                    })
                }
            } else {
                Ok(Rational::one() - &da[a] / &den[a])
            }
        })
        .collect::<Result<Vec<_>>>()
        .map(RandomVariable::new)
}

fn finish(space: &FilteredSpace, system: MultiplicativeSystem) -> Result<MultiplicativeSystem> {
    match system.validate(space) {
        Verdict::Fail(w) => Err(Error::FieldAxiomViolation(w)),
        _ => Ok(system),
    }
}

/// `C_{s,t} = Π_{s<u≤t} (1 - ΔA_u / ᵖF_u)` with `A` the compensator of `F`.
pub fn predictable_multiplicative_system(space: &FilteredSpace, f: &Process) -> Result<MultiplicativeSystem> {
    check_submartingale_shape(space, f)?;
    let a = doob_decomposition(space, f, Orientation::Plus)?.fv_part;
    let factors = (0..space.slots())
        .map(|u| {
            if u == 0 {
                return Ok(RandomVariable::one(space.n()));
            }
            let pf = space.filtration().before(u).average(space.prob(), f.at(u));
            factor(space, &a.increment(u), &pf, u)
        })
        .collect::<Result<Vec<_>>>()?;
    finish(space, MultiplicativeSystem::from_factors(&factors, SystemKind::Predictable))
}

/// `C_{u,t} = Π_{u<v≤t} (1 - ΔÂ_v / F_v)` where `Â` is the dual optional projection of `1_{τ̂≤·}`.
pub fn optional_multiplicative_system(
    space: &FilteredSpace,
    f: &Process,
    tau_hat: &RandomTime,
) -> Result<MultiplicativeSystem> {
    let realized = tau_hat.azema(space).f;
    if let Some(s) = (0..space.slots()).find(|&s| realized.at(s) != f.at(s)) {
        let a = (0..space.n()).find(|&a| realized.at(s)[a] != f.at(s)[a]).expect("differs");
        return Err(Error::RealizationMismatch(Box::new(
            Witness::new("realization", realized.at(s)[a].clone(), f.at(s)[a].clone())
                .at("t", space.time(s))
                .block(vec![a]),
        )));
    }
    let a_hat = dual_optional_projection(space, &tau_hat.indicator_process(space));
    optional_system_from_compensator(space, f, &a_hat)
}

/// Optional system from a given `F`-optional compensator `Â` of a time realizing `F`.
pub fn optional_system_from_compensator(
    space: &FilteredSpace,
    f: &Process,
    a_hat: &Process,
) -> Result<MultiplicativeSystem> {
    check_submartingale_shape(space, f)?;
    let factors = (0..space.slots())
        .map(|v| {
            if v == 0 {
                Ok(RandomVariable::one(space.n()))
            } else {
                factor(space, &a_hat.increment(v), f.at(v), v)
            }
        })
        .collect::<Result<Vec<_>>>()?;
    finish(space, MultiplicativeSystem::from_factors(&factors, SystemKind::Optional))
}

/// `F_{u,t} = E[F_u | F_t]` for `t < u` and `C_{u,t} F_t` for `t ≥ u`.
pub fn field_from_system(
    space: &FilteredSpace,
    f: &Process,
    c: &MultiplicativeSystem,
) -> Result<ConditionalDistributionField> {
    let slots = space.slots();
    let table = (0..slots)
        .map(|u| {
            (0..slots)
                .map(|t| {
                    if t < u {
                        space.filtration().at(t).average(space.prob(), f.at(u))
                    } else {
                        c.get(u, t) * f.at(t)
                    }
                })
                .collect()
        })
        .collect();
    ConditionalDistributionField::new(space, table)
}

/// A submartingale together with the field built from one of its multiplicative systems and
/// the extension realizing it.
#[derive(Debug, Clone)]
pub struct Construction {
    pub base: FilteredSpace,
    pub f: Process,
    pub system: MultiplicativeSystem,
    pub field: ConditionalDistributionField,
    pub extension: ExtendedSpace,
    /// `Â` of the auxiliary time, on the base, for optional constructions.
    pub a_hat: Option<Process>,
}

impl Construction {
    pub fn predictable(space: &FilteredSpace, f: &Process) -> Result<Self> {
        let system = predictable_multiplicative_system(space, f)?;
        let field = field_from_system(space, f, &system)?;
        let extension = canonical_extension(space, &field)?;
        Ok(Construction {
            base: space.clone(),
            f: f.clone(),
            system,
            field,
            extension,
            a_hat: None,
        })
    }

    /// Auxiliary `τ̂` from the predictable construction, then the optional system of its `Â`.
    pub fn optional(space: &FilteredSpace, f: &Process) -> Result<Self> {
        let aux = Self::predictable(space, f)?;
        let ext = &aux.extension;
        let h_hat = ext.tau().indicator_process(ext.space());
        let a_hat_ext = dual_optional_projection(ext.space(), &h_hat);
        let a_hat = ext
            .pull_back_process(&a_hat_ext)
            .expect("optional projections onto the lifted filtration are base-measurable");
        let system = optional_system_from_compensator(space, f, &a_hat)?;
        let field = field_from_system(space, f, &system)?;
        let extension = canonical_extension(space, &field)?;
        Ok(Construction {
            base: space.clone(),
            f: f.clone(),
            system,
            field,
            extension,
            a_hat: Some(a_hat),
        })
    }

    /// The realized time on its own space.
    pub fn space(&self) -> &FilteredSpace {
        self.extension.space()
    }

    pub fn tau(&self) -> &RandomTime {
        self.extension.tau()
    }
}

/// `E[C_{s,t} F_t | F_{t-1}] = C_{s,t-1} F_{t-1}` for all `s < t`.
pub fn check_compensation(space: &FilteredSpace, f: &Process, c: &MultiplicativeSystem) -> Verdict {
    for s in 0..c.slots() {
        for t in s + 1..c.slots() {
            let lhs = space.filtration().before(t).average(space.prob(), &(c.get(s, t) * f.at(t)));
            let rhs = c.get(s, t - 1) * f.at(t - 1);
            if let Some(a) = (0..lhs.len()).find(|&a| lhs[a] != rhs[a]) {
                return Verdict::fail(
                    Witness::new("compensation", lhs[a].clone(), rhs[a].clone())
                        .at("s", space.time(s))
                        .at("t", space.time(t))
                        .block(vec![a]),
                );
            }
        }
    }
    Verdict::Pass
}

/// `F` is a submartingale: `E[F_t | F_{t-1}] ≥ F_{t-1}`.
pub fn is_submartingale(space: &FilteredSpace, f: &Process) -> bool {
    space.check_adapted(f, "F").is_ok()
        && (1..f.slots()).all(|t| {
            let e = space.filtration().before(t).average(space.prob(), f.at(t));
            (0..e.len()).all(|a| !(&e[a] - &f.at(t - 1)[a]).is_negative())
        })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures;
    use crate::hypotheses::check_hp;
    use crate::prob::build_space;
    use crate::process::ProcessKind;
    use crate::random_time::conditional_distribution;
    use crate::rational::ratio;

    fn deterministic(values: &[(i64, i64)]) -> (FilteredSpace, Process) {
        let space = build_space(
            vec!["w".into()],
            vec![Rational::one()],
            vec![vec![vec![0]]; values.len() - 1],
        )
        .unwrap();
        let f = Process::from_fn(values.len(), ProcessKind::Adapted, |s| {
            RandomVariable::constant(1, ratio(values[s].0, values[s].1))
        });
        (space, f)
    }

    #[test]
    fn deterministic_predictable_system() {
        // F = (0, 1/2, 1) over slots 0, 1, 2 and F_∞ = 1
        let (space, f) = deterministic(&[(0, 1), (1, 2), (1, 1), (1, 1)]);
        let c = predictable_multiplicative_system(&space, &f).unwrap();
        assert_eq!(c.get(0, 1)[0], ratio(0, 1));
        assert_eq!(c.get(1, 2)[0], ratio(1, 2));
        assert_eq!(c.get(0, 2)[0], ratio(0, 1));
        assert!(check_compensation(&space, &f, &c).is_pass());
    }

    #[test]
    fn martingale_input_gives_unit_system() {
        let (space, f) = deterministic(&[(1, 1), (1, 1), (1, 1)]);
        let c = predictable_multiplicative_system(&space, &f).unwrap();
        assert!(c.table.iter().flatten().all(|x| x == &RandomVariable::one(1)));
        let field = field_from_system(&space, &f, &c).unwrap();
        assert!(crate::hypotheses::check_h(&space, &field).is_pass());
    }

    #[test]
    fn s1_round_trip() {
        let (space, tau) = fixtures::s1();
        let f = tau.azema(&space).f;
        let built = Construction::predictable(&space, &f).unwrap();
        assert!(built.system.validate(&space).is_pass());
        assert!(check_hp(&space, &built.field).is_pass());
        assert_eq!(built.field.diagonal(), f);
        assert!(built.extension.verify_field(&built.field).is_pass());
        let realized = conditional_distribution(built.space(), built.tau());
        assert_eq!(realized.diagonal(), built.extension.lift_process(&f));
    }

    #[test]
    fn s1_optional_system_with_original_time() {
        let (space, tau) = fixtures::s1();
        let f = tau.azema(&space).f;
        let c = optional_multiplicative_system(&space, &f, &tau).unwrap();
        let expected: RandomVariable = [(0, 1), (0, 1), (1, 1), (1, 1)].iter().map(|&(n, d)| ratio(n, d)).collect();
        assert_eq!(c.get(0, 1), &expected);
        let field = field_from_system(&space, &f, &c).unwrap();
        assert_eq!(field.diagonal(), f);
    }

    #[test]
    fn realization_mismatch_is_reported() {
        let (space, tau) = fixtures::s1();
        let f = tau.azema(&space).f;
        let other = RandomTime::constant(&space, crate::verdict::Time::Infinity).unwrap();
        assert!(matches!(
            optional_multiplicative_system(&space, &f, &other),
            Err(Error::RealizationMismatch(_))
        ));
    }

    #[test]
    fn optional_construction_on_s1() {
        let (space, tau) = fixtures::s1();
        let f = tau.azema(&space).f;
        let built = Construction::optional(&space, &f).unwrap();
        assert!(built.system.validate(&space).is_pass());
        assert_eq!(built.field.diagonal(), f);
        assert!(built.extension.verify_field(&built.field).is_pass());
    }
}
