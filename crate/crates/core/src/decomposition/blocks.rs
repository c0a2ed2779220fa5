use num_traits::Zero;

use crate::calculus::bracket_increments;
use crate::error::{Error, Result};
use crate::prob::{FilteredSpace, RandomVariable};
use crate::process::{Process, ProcessKind};
use crate::random_time::{RandomTime, TimeModel};
use crate::rational::{div_or_zero, Rational};
use crate::verdict::{Verdict, Witness};

use super::{compare_processes, decompose_stopped, jump_compensator_increments, StoppedKind};

/// `M̂_t = 1_{τ>t} Ũ_t + 1_{τ≤t} Û_{τ,t}` with `Ũ` and every `Û_{u,·}` adapted.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BuildingBlocks {
    pub u_tilde: Process,
    /// `u_hat[u][t]`; entries with `t < u` are unused.
    pub u_hat: Vec<Vec<RandomVariable>>,
}

impl BuildingBlocks {
    pub fn assemble(&self, tau: &RandomTime) -> Process {
        let slots = self.u_tilde.slots();
        let n = self.u_tilde.at(0).len();
        Process::from_fn(slots, ProcessKind::Adapted, |t| {
            RandomVariable::from_fn(n, |a| {
                let s = tau.slot(a);
                if s > t {
                    self.u_tilde.at(t)[a].clone()
                } else {
                    self.u_hat[s][t][a].clone()
                }
            })
        })
    }
}

/// Reads `Ũ` and `Û` off a `G`-adapted process; blocks not charged by the relevant event get 0.
pub fn extract_building_blocks(space: &FilteredSpace, tau: &RandomTime, m_hat: &Process) -> BuildingBlocks {
    let f = space.filtration();
    let pick = |t: usize, pred: &dyn Fn(usize) -> bool| {
        let p = f.at(t);
        let mut out = RandomVariable::zero(space.n()).into_values();
        for block in p.blocks() {
            if let Some(&a) = block.iter().find(|&&a| pred(a)) {
                for &b in block {
                    out[b] = m_hat.at(t)[a].clone();
                }
            }
        }
        RandomVariable::new(out)
    };
    let u_tilde = Process::from_fn(space.slots(), ProcessKind::Adapted, |t| pick(t, &|a| tau.slot(a) > t));
    let u_hat = (0..space.slots())
        .map(|u| {
            (0..space.slots())
                .map(|t| {
                    if t < u {
                        RandomVariable::zero(space.n())
                    } else {
                        pick(t, &|a| tau.slot(a) == u)
                    }
                })
                .collect()
        })
        .collect();
    BuildingBlocks { u_tilde, u_hat }
}

/// (i) `W_t = G_t Ũ_t + Σ_{u≤t} f_{u,t} Û_{u,t}` is an `F`-martingale, (ii) for each `u`,
/// `f_{u,t} (Û_{u,t} - Û_{u,u})` is a martingale in `t ≥ u`, with `f_{u,t} = P(τ = u | F_t)`.
/// On success the assembled `M̂` is checked independently on the progressive enlargement.
pub fn verify_building_blocks(space: &FilteredSpace, tau: &RandomTime, blocks: &BuildingBlocks) -> Verdict {
    let model = TimeModel::new(space, tau);
    let field = &model.field;
    let slots = space.slots();
    let w = Process::from_fn(slots, ProcessKind::Adapted, |t| {
        (0..=t).fold(model.azema.g.at(t) * blocks.u_tilde.at(t), |acc, u| {
            acc + &(field.mass(u, t) * &blocks.u_hat[u][t])
        })
    });
    if let Verdict::Fail(mut wit) = space.martingale_verdict(&w) {
        wit.check = format!("building block (i) {}", wit.check);
        return Verdict::Fail(wit);
    }
    let f = space.filtration();
    for u in 0..slots {
        let x = |t: usize| field.mass(u, t) * &(&blocks.u_hat[u][t] - &blocks.u_hat[u][u]);
        for t in u + 1..slots {
            let lhs = f.before(t).average(space.prob(), &x(t));
            let rhs = x(t - 1);
            if let Some(a) = (0..space.n()).find(|&a| lhs[a] != rhs[a]) {
                let block = f.before(t).block_containing(a).to_vec();
                return Verdict::fail(
                    Witness::new("building block (ii)", lhs[a].clone(), rhs[a].clone())
                        .at("u", space.time(u))
                        .at("t", space.time(t))
                        .block(block),
                );
            }
        }
    }
    match model.g_space().martingale_verdict(&blocks.assemble(tau)) {
        Verdict::Fail(mut wit) => {
            wit.check = format!("assembled {}", wit.check);
            Verdict::Fail(wit)
        }
        v => v,
    }
}

/// Folded martingale part of `U^τ` next to its unfolded pieces:
/// `unfolded = U^τ - Ŭ - Σ_{u≤t∧τ} Δ⟨U,M⟩_u / G_{u-1}` and `correction = Ŭ - Σ_{u≤t∧τ} ΔŬ^p_u / G_{u-1}`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct UnfoldedForm {
    pub folded: Process,
    pub unfolded: Process,
    pub correction: Process,
    /// `folded = unfolded + correction`, both pieces `G`-martingales.
    pub verdict: Verdict,
}

pub fn unfolded_stopped(space: &FilteredSpace, tau: &RandomTime, u: &Process) -> Result<UnfoldedForm> {
    let folded = decompose_stopped(space, tau, u, StoppedKind::Predictable)?.martingale_part;
    let model = TimeModel::new(space, tau);
    let g = &model.azema.g;
    let jp = jump_compensator_increments(space, tau, u);
    let br = bracket_increments(space, u, &model.m);
    let scaled = |inc: &[RandomVariable]| -> Result<Process> {
        let mut out = vec![RandomVariable::zero(space.n())];
        for t in 1..space.slots() {
            let x = (0..space.n())
                .map(|a| {
                    if tau.slot(a) < t {
                        return Ok(Rational::zero());
                    }
                    div_or_zero(&inc[t][a], &g.at(t - 1)[a])
                        .ok_or(Error::DegenerateDenominator { t: space.time(t - 1), atom: a })
                })
                .collect::<Result<Vec<_>>>()?;
            out.push(RandomVariable::new(x));
        }
        Ok(Process::from_increments(out, ProcessKind::Predictable))
    };
    let mut jumps = vec![RandomVariable::zero(space.n())];
    jumps.extend((1..space.slots()).map(|t| u.increment(t) * tau.indicator_eq(t)));
    let u_breve = Process::from_increments(jumps, ProcessKind::FiniteVariation);
    let correction = (&u_breve - &scaled(&jp)?).with_kind(ProcessKind::Adapted);
    let unfolded = (&(&u.stopped(&tau.slots()) - &u_breve) - &scaled(&br)?).with_kind(ProcessKind::Adapted);
    let gs = model.g_space();
    let verdict = compare_processes("unfolded", space, &folded, &(&unfolded + &correction))
        .and(gs.martingale_verdict(&unfolded))
        .and(gs.martingale_verdict(&correction));
    Ok(UnfoldedForm {
        folded,
        unfolded,
        correction,
        verdict,
    })
}

fn equal(check: &str, lhs: Rational, rhs: Rational) -> Verdict {
    if lhs == rhs {
        Verdict::Pass
    } else {
        Verdict::fail(Witness::new(check, lhs, rhs))
    }
}

/// For a martingale `N` (shifted to `N_0 = 0`): `E[N_τ] = E[N_∞ M̄_∞] = E[⟨N,M̄⟩_∞]` and
/// `E[N_{τ-}] = E[⟨N,M̃⟩_∞]`, together with `G = M̄ - H^o` and `G = M̃ - H^p`.
pub fn tau_expectation_identities(space: &FilteredSpace, tau: &RandomTime, n: &Process) -> Result<Verdict> {
    space.check_shape(n, "N")?;
    if let Verdict::Fail(w) = space.martingale_verdict(n) {
        return Err(Error::NotMartingale(w));
    }
    let n0 = n.at(0).clone();
    let n = n.map(|_, x| x - &n0);
    let model = TimeModel::new(space, tau);
    let at_tau = RandomVariable::from_fn(space.n(), |a| n.at(tau.slot(a))[a].clone());
    let before_tau = RandomVariable::from_fn(space.n(), |a| match tau.slot(a) {
        0 => Rational::zero(),
        s => n.at(s - 1)[a].clone(),
    });
    let total = |inc: Vec<RandomVariable>| space.expect(&inc.into_iter().fold(RandomVariable::zero(space.n()), |x, y| x + y));
    let e_tau = space.expect(&at_tau);
    let bar = total(bracket_increments(space, &n, &model.m_bar));
    let tilde = total(bracket_increments(space, &n, &model.m_tilde));
    Ok(equal("E[N_tau] = E[N_inf Mbar_inf]", e_tau.clone(), space.expect(&(n.terminal() * model.m_bar.terminal())))
        .and(equal("E[N_tau] = E[<N,Mbar>_inf]", e_tau, bar))
        .and(equal("E[N_tau-] = E[<N,Mtilde>_inf]", space.expect(&before_tau), tilde))
        .and(compare_processes("G = Mbar - H^o", space, &model.azema.g, &(&model.m_bar - &model.ho)))
        .and(compare_processes("G = Mtilde - H^p", space, &model.azema.g, &(&model.m_tilde - &model.hp))))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::construction::generators::{random_martingale, random_scenario, rng};
    use crate::decomposition::canonical_decomposition;
    use crate::fixtures;

    #[test]
    fn round_trip_through_a_decomposition() {
        for seed in 0..30 {
            let (space, tau) = random_scenario(seed);
            let u = random_martingale(&mut rng(seed + 7), &space);
            let dec = canonical_decomposition(&space, &tau, &u).unwrap();
            let bb = extract_building_blocks(&space, &tau, &dec.martingale_part);
            assert!(verify_building_blocks(&space, &tau, &bb).is_pass(), "seed {seed}");
        }
    }

    #[test]
    fn constant_after_tau_blocks_pass_condition_ii() {
        let (space, tau) = fixtures::s1();
        let model = TimeModel::new(&space, &tau);
        let mut bb = extract_building_blocks(&space, &tau, &model.m);
        for u in 0..space.slots() {
            for t in u..space.slots() {
                bb.u_hat[u][t] = bb.u_hat[u][u].clone();
            }
        }
        let v = verify_building_blocks(&space, &tau, &bb);
        assert!(!v.witness().is_some_and(|w| w.check.contains("(ii)")));
    }

    #[test]
    fn corrupted_blocks_fail_with_witness() {
        let (space, tau) = fixtures::s1();
        let u = TimeModel::new(&space, &tau).m;
        let dec = canonical_decomposition(&space, &tau, &u).unwrap();
        let mut bb = extract_building_blocks(&space, &tau, &dec.martingale_part);
        // atom b has τ = 2; move its value at t = 2
        bb.u_hat[2][2] = &bb.u_hat[2][2] + &RandomVariable::indicator(4, |a| a == 1);
        let v = verify_building_blocks(&space, &tau, &bb);
        let w = v.witness().expect("corruption detected");
        assert!(w.coord("t").is_some());
    }

    #[test]
    fn unfolded_matches_folded() {
        for seed in 0..30 {
            let (space, tau) = random_scenario(seed);
            let u = random_martingale(&mut rng(seed + 3), &space);
            assert!(unfolded_stopped(&space, &tau, &u).unwrap().verdict.is_pass(), "seed {seed}");
        }
    }

    #[test]
    fn tau_expectations_on_random_scenarios() {
        for seed in 0..30 {
            let (space, tau) = random_scenario(seed);
            let n = random_martingale(&mut rng(seed + 11), &space);
            assert!(tau_expectation_identities(&space, &tau, &n).unwrap().is_pass(), "seed {seed}");
        }
    }
}
