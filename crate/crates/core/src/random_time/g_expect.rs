//! `E[U_{τ,T} | G_t]` for payoffs indexed by the value of `τ`.
//!
//! A payoff is a slice `U[u]`, `u ∈ 0..=T, ∞`, of `F_T`-measurable variables.

use crate::error::{Error, Result};
use crate::hypotheses::{check_hp, verify_ed, EdData};
use crate::prob::{FilteredSpace, RandomVariable};
use crate::rational::div_or_zero;
use crate::verdict::Verdict;

use super::{ConditionalDistributionField, EnlargedFiltration, RandomTime};

/// `X(ω) = U_{τ(ω)}(ω)`.
pub fn payoff_at_tau(tau: &RandomTime, payoff: &[RandomVariable]) -> RandomVariable {
    RandomVariable::from_fn(tau.values().len(), |a| payoff[tau.slot(a)][a].clone())
}

/// Block averaging over the enlarged partition at `t`.
pub fn g_cond_expect_brute(enlargement: &EnlargedFiltration, x: &RandomVariable, slot: usize) -> RandomVariable {
    let space = enlargement.space();
    enlargement.at(slot).average(space.prob(), x)
}

fn divide(space: &FilteredSpace, num: &RandomVariable, den: &RandomVariable, slot: usize) -> Result<RandomVariable> {
    (0..num.len())
        .map(|a| {
            div_or_zero(&num[a], &den[a]).ok_or(Error::DegenerateDenominator {
                t: space.time(slot),
                atom: a,
            })
        })
        .collect::<Result<Vec<_>>>()
        .map(RandomVariable::new)
}

/// `Ũ_{t,T} = G_t^{-1} E[Σ_{v>t} U_v (F_{v,T} - F_{v-1,T}) | F_t]`.
pub fn before_tau_value(
    space: &FilteredSpace,
    field: &ConditionalDistributionField,
    payoff: &[RandomVariable],
    slot: usize,
) -> Result<RandomVariable> {
    let big_t = space.horizon();
    let t = slot.min(big_t);
    let acc = (t + 1..space.slots()).fold(RandomVariable::zero(space.n()), |acc, v| {
        acc + &payoff[v] * &field.mass(v, big_t)
    });
    let num = space.filtration().at(t).average(space.prob(), &acc);
    let one = RandomVariable::one(space.n());
    let g = &one - field.get(t, t);
    divide(space, &num, &g, t)
}

/// `Û_{u,t,T} = F_t^{-1} E[F_{t,T} U_u | F_t]`, valid on `{τ = u ≤ t}` under (HP).
pub fn after_tau_value_pseudo_honest(
    space: &FilteredSpace,
    field: &ConditionalDistributionField,
    payoff_u: &RandomVariable,
    slot: usize,
) -> Result<RandomVariable> {
    let big_t = space.horizon();
    let t = slot.min(big_t);
    let num = space
        .filtration()
        .at(t)
        .average(space.prob(), &(field.get(t, big_t) * payoff_u));
    divide(space, &num, field.get(t, t), t)
}

/// `Û_{u,t,T} = m_{u,t}^{-1} E[m_{u,T} U_u | F_t]`.
pub fn after_tau_value_pseudo_initial(
    space: &FilteredSpace,
    ed: &EdData,
    u: usize,
    payoff_u: &RandomVariable,
    slot: usize,
) -> Result<RandomVariable> {
    let big_t = space.horizon();
    let t = slot.min(big_t);
    let num = space
        .filtration()
        .at(t)
        .average(space.prob(), &(ed.m(u, big_t) * payoff_u));
    divide(space, &num, ed.m(u, t), t)
}

fn assemble<F>(
    space: &FilteredSpace,
    field: &ConditionalDistributionField,
    tau: &RandomTime,
    payoff: &[RandomVariable],
    slot: usize,
    mut after: F,
) -> Result<RandomVariable>
where
    F: FnMut(usize) -> Result<RandomVariable>,
{
    let t = slot.min(space.horizon());
    let before = before_tau_value(space, field, payoff, t)?;
    let mut cache: Vec<Option<RandomVariable>> = vec![None; space.slots()];
    let mut out = Vec::with_capacity(space.n());
    for a in 0..space.n() {
        let s = tau.slot(a);
        if s > t {
            out.push(before[a].clone());
        } else {
            if cache[s].is_none() {
                cache[s] = Some(after(s)?);
            }
            out.push(cache[s].as_ref().expect("filled")[a].clone());
        }
    }
    Ok(RandomVariable::new(out))
}

/// `1_{τ>t} Ũ_{t,T} + 1_{τ≤t} Û_{τ,t,T}` with the (HP) form of `Û`.
pub fn g_cond_expect_pseudo_honest(
    space: &FilteredSpace,
    field: &ConditionalDistributionField,
    tau: &RandomTime,
    payoff: &[RandomVariable],
    slot: usize,
) -> Result<RandomVariable> {
    if let Verdict::Fail(w) = check_hp(space, field) {
        return Err(Error::HypothesisHPFails(w));
    }
    assemble(space, field, tau, payoff, slot, |u| {
        after_tau_value_pseudo_honest(space, field, &payoff[u], slot)
    })
}

/// `1_{τ>t} Ũ_{t,T} + 1_{τ≤t} Û_{τ,t,T}` with the extended-density form of `Û`.
pub fn g_cond_expect_pseudo_initial(
    space: &FilteredSpace,
    field: &ConditionalDistributionField,
    ed: &EdData,
    tau: &RandomTime,
    payoff: &[RandomVariable],
    slot: usize,
) -> Result<RandomVariable> {
    if let Verdict::Fail(w) = verify_ed(space, field, ed) {
        return Err(Error::EDVerificationFails(w));
    }
    assemble(space, field, tau, payoff, slot, |u| {
        after_tau_value_pseudo_initial(space, ed, u, &payoff[u], slot)
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures;
    use crate::random_time::{conditional_distribution, progressive_enlargement};
    use crate::rational::{int, ratio};
    use crate::verdict::Time;

    #[test]
    fn brute_force_on_s1() {
        let (space, tau) = fixtures::s1();
        let g = progressive_enlargement(&space, &tau);
        let x = tau.indicator_eq(2);
        let e = g_cond_expect_brute(&g, &x, 1);
        let expected: RandomVariable = [(0, 1), (1, 1), (1, 2), (1, 2)].iter().map(|&(n, d)| ratio(n, d)).collect();
        assert_eq!(e, expected);
        assert!(g_cond_expect_brute(&g, &x, 0).is_constant());
    }

    #[test]
    fn formula_refuses_without_hp() {
        let (space, _) = fixtures::s1();
        let tau = RandomTime::new(&space, vec![Time::At(0), Time::At(1), Time::At(2), Time::Infinity]).unwrap();
        let field = conditional_distribution(&space, &tau);
        let payoff = vec![RandomVariable::one(4); 4];
        assert!(matches!(
            g_cond_expect_pseudo_honest(&space, &field, &tau, &payoff, 1),
            Err(Error::HypothesisHPFails(_))
        ));
    }

    #[test]
    fn before_tau_value_agrees_with_brute_force_on_s1() {
        // the before-τ formula needs no hypothesis
        let (space, tau) = fixtures::s1();
        let field = conditional_distribution(&space, &tau);
        let g = progressive_enlargement(&space, &tau);
        let payoff: Vec<RandomVariable> = (0..4)
            .map(|u| RandomVariable::from_fn(4, |a| int((u * 7 + a * 3) as i64 % 5)))
            .collect();
        let x = payoff_at_tau(&tau, &payoff);
        for t in 0..=2 {
            let brute = g_cond_expect_brute(&g, &x, t);
            let before = before_tau_value(&space, &field, &payoff, t).unwrap();
            for a in (0..4).filter(|&a| tau.slot(a) > t) {
                assert_eq!(brute[a], before[a]);
            }
        }
    }

    #[test]
    fn stopping_time_payoff() {
        let (space, _) = fixtures::s1();
        let tau = RandomTime::new(&space, vec![Time::At(1), Time::At(1), Time::At(2), Time::Infinity]).unwrap();
        let field = conditional_distribution(&space, &tau);
        let g = progressive_enlargement(&space, &tau);
        let payoff: Vec<RandomVariable> = (0..4)
            .map(|u| RandomVariable::from_fn(4, |a| int((u + 2 * a) as i64)))
            .collect();
        let x = payoff_at_tau(&tau, &payoff);
        for t in 0..=2 {
            let f = g_cond_expect_pseudo_honest(&space, &field, &tau, &payoff, t).unwrap();
            assert_eq!(f, g_cond_expect_brute(&g, &x, t));
        }
    }
}
