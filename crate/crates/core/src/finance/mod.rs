//! Measure changes restoring immersion, measure projection, martingale measures for enlarged
//! filtrations, and the information drift of a market.

mod drift;

pub use drift::{cox_market, information_drift, InformationDrift, MarketScenario};

use num_traits::{One, Zero};

use crate::error::{Error, Result};
use crate::hypotheses::{check_complete_separability, check_h};
use crate::prob::{change_measure, FilteredSpace, Measure, RandomVariable};
use crate::process::{Process, ProcessKind};
use crate::random_time::{
    conditional_distribution, initial_enlargement, progressive_enlargement, EnlargementKind, RandomTime,
};
use crate::rational::{div_or_zero, Rational};
use crate::verdict::{Verdict, Witness};

/// `Z^G_t = Z̃_t 1_{τ>t} + Ẑ_{τ,t} 1_{τ≤t}` on the progressive enlargement.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ImmersionDensity {
    pub z: Process,
    /// `Z̃_t = G_t^{-1} (1 - Σ_{u≤t} Ẑ_{u,t} ΔF_{u,t})`.
    pub z_tilde: Process,
    /// `Ẑ_{u,t} = F_{u,u} / F_{u,t}` for `t ≥ u`.
    pub z_hat: Vec<Vec<RandomVariable>>,
    /// `G`-martingale check of `Z^G`.
    pub verdict: Verdict,
}

fn degenerate(space: &FilteredSpace, slot: usize, atom: usize) -> Error {
    Error::DegenerateDenominator { t: space.time(slot), atom }
}

/// Requires complete separability and `F_0 = 0`; where `G_t = 0` the numerator of `Z̃_t` must vanish.
pub fn immersion_density(space: &FilteredSpace, tau: &RandomTime) -> Result<ImmersionDensity> {
    let field = conditional_distribution(space, tau);
    let sep = check_complete_separability(space, &field);
    if let Verdict::Fail(w) = &sep.verdict {
        return Err(Error::SeparabilityPreconditionFails(w.to_string()));
    }
    if !field.get(0, 0).is_zero() {
        return Err(Error::SeparabilityPreconditionFails("F_0 is not 0".into()));
    }
    let n = space.n();
    let slots = space.slots();
    let mut z_hat = vec![vec![RandomVariable::zero(n); slots]; slots];
    for (u, row) in z_hat.iter_mut().enumerate() {
        for (t, cell) in row.iter_mut().enumerate().skip(u) {
            let x = (0..n)
                .map(|a| div_or_zero(&field.get(u, u)[a], &field.get(u, t)[a]).ok_or_else(|| degenerate(space, t, a)))
                .collect::<Result<Vec<_>>>()?;
            *cell = RandomVariable::new(x);
        }
    }
    let g = tau.azema(space).g;
    let z_tilde = (0..slots)
        .map(|t| {
            let num = (0..=t).fold(RandomVariable::one(n), |acc, u| acc - &z_hat[u][t] * &field.mass(u, t));
            let x = (0..n)
                .map(|a| div_or_zero(&num[a], &g.at(t)[a]).ok_or_else(|| degenerate(space, t, a)))
                .collect::<Result<Vec<_>>>()?;
            Ok(RandomVariable::new(x))
        })
        .collect::<Result<Vec<_>>>()?;
    let z_tilde = Process::new(z_tilde, ProcessKind::Adapted);
    // τ = ∞ never occurs before the end: Z^G_∞ = Z^G_T, as the enlargement's ∞ level is its T level
    let z = Process::from_fn(slots, ProcessKind::Adapted, |t| {
        let t = t.min(space.horizon());
        RandomVariable::from_fn(n, |a| {
            let s = tau.slot(a);
            if s > t {
                z_tilde.at(t)[a].clone()
            } else {
                z_hat[s][t][a].clone()
            }
        })
    });
    let verdict = progressive_enlargement(space, tau).space().martingale_verdict(&z);
    Ok(ImmersionDensity {
        z,
        z_tilde,
        z_hat,
        verdict,
    })
}

/// `F_{s,t} E[X_τ 1_{τ≤s} | F_s] = F_{s,s} E[X_τ 1_{τ≤s} | F_t]` for `s ≤ t`.
pub fn check_conditional_product_identity(space: &FilteredSpace, tau: &RandomTime, x: &Process) -> Verdict {
    let field = conditional_distribution(space, tau);
    let f = space.filtration();
    let x_tau = RandomVariable::from_fn(space.n(), |a| x.at(tau.slot(a))[a].clone());
    for s in 0..space.slots() {
        let y = &x_tau * &tau.indicator_le(s);
        let ys = f.at(s).average(space.prob(), &y);
        for t in s..space.slots() {
            let lhs = field.get(s, t) * &ys;
            let rhs = field.get(s, s) * &f.at(t).average(space.prob(), &y);
            if let Some(a) = (0..space.n()).find(|&a| lhs[a] != rhs[a]) {
                return Verdict::fail(
                    Witness::new("conditional product", lhs[a].clone(), rhs[a].clone())
                        .at("s", space.time(s))
                        .at("t", space.time(t))
                        .block(vec![a]),
                );
            }
        }
    }
    Verdict::Pass
}

/// `P̄ = Z^G_T · P` and the checks made under it.
#[derive(Debug, Clone)]
pub struct ImmersionMeasure {
    pub measure: Measure,
    /// The space reweighted by `P̄`.
    pub space: FilteredSpace,
    /// `F̄_{u,u} = F̄_{u,t}` for `u ≤ t`.
    pub immersion: Verdict,
    /// Every `F_t`-block keeps its `P`-probability.
    pub agrees_on_f: Verdict,
}

impl ImmersionMeasure {
    pub fn verdict(&self) -> Verdict {
        self.immersion.clone().and(self.agrees_on_f.clone())
    }
}

pub fn immersion_measure(space: &FilteredSpace, tau: &RandomTime) -> Result<ImmersionMeasure> {
    let density = immersion_density(space, tau)?;
    if let Verdict::Fail(w) = density.verdict {
        return Err(Error::NotMartingale(w));
    }
    let z = &density.z;
    for t in 0..space.slots() {
        if let Some(a) = z.at(t).values().iter().position(|v| *v <= Rational::zero()) {
            return Err(Error::DensityNotPositive(Box::new(
                Witness::new("Z^G positive", z.at(t)[a].clone(), Rational::zero())
                    .at("t", space.time(t))
                    .block(vec![a]),
            )));
        }
        let e = space.filtration().at(t).average(space.prob(), z.at(t));
        if let Some(a) = e.values().iter().position(|v| !v.is_one()) {
            return Err(Error::NormalizationFails(Box::new(
                Witness::new("E[Z^G_t | F_t] = 1", e[a].clone(), Rational::one())
                    .at("t", space.time(t))
                    .block(space.filtration().at(t).block_containing(a).to_vec()),
            )));
        }
    }
    let measure = Measure::new(space, z.at(space.horizon()).clone())?;
    let bar = change_measure(space, &measure)?;
    let immersion = check_h(&bar, &conditional_distribution(&bar, tau));
    let agrees_on_f = same_on_filtration(space, &bar);
    Ok(ImmersionMeasure {
        measure,
        space: bar,
        immersion,
        agrees_on_f,
    })
}

/// Block probabilities of every level agree.
fn same_on_filtration(p: &FilteredSpace, q: &FilteredSpace) -> Verdict {
    for t in 0..=p.horizon() {
        for block in p.filtration().at(t).blocks() {
            let mp: Rational = block.iter().map(|&a| &p.prob()[a]).sum();
            let mq: Rational = block.iter().map(|&a| &q.prob()[a]).sum();
            if mp != mq {
                return Verdict::fail(
                    Witness::new("same law on F", mq, mp)
                        .at("t", p.time(t))
                        .block(block.clone()),
                );
            }
        }
    }
    Verdict::Pass
}

/// `Q` with `dQ/dQ̃ = E_{Q̃}[dP*/dQ̃ | F_T]` and the four properties it is expected to have.
#[derive(Debug, Clone)]
pub struct ProjectedMeasure {
    pub measure: Measure,
    /// `E_{Q̃}[dQ/dQ̃ | G_t]` is `F_t`-measurable.
    pub adapted_density: Verdict,
    /// `Q = P*` on `F`.
    pub agrees_on_f: Verdict,
    /// Immersion under `Q`; `Unknown` when `Q̃` does not immerse.
    pub immersion: Verdict,
    /// `(P*, F)`-martingales are `(Q, G)`-martingales; `Unknown` when `Q̃` does not immerse.
    pub martingales: Verdict,
}

impl ProjectedMeasure {
    pub fn verdict(&self) -> Verdict {
        self.adapted_density
            .clone()
            .and(self.agrees_on_f.clone())
            .and(self.immersion.clone())
            .and(self.martingales.clone())
    }
}

fn require_equivalent(m: &Measure) -> Result<()> {
    match m.density().values().iter().position(|v| v.is_zero()) {
        Some(atom) => Err(Error::NotEquivalent { atom }),
        None => Ok(()),
    }
}

pub fn project_measure(
    space: &FilteredSpace,
    tau: &RandomTime,
    q_tilde: &Measure,
    p_target: &Measure,
) -> Result<ProjectedMeasure> {
    require_equivalent(q_tilde)?;
    require_equivalent(p_target)?;
    let qt_space = change_measure(space, q_tilde)?;
    let target = change_measure(space, p_target)?;
    let last = space.filtration().at(space.horizon());
    let ratio = p_target.density().zip_with(q_tilde.density(), |p, q| p / q);
    let eta = last.average(qt_space.prob(), &ratio);
    let measure = Measure::new(space, q_tilde.density() * &eta)?;
    let q_space = change_measure(space, &measure)?;

    let g_tilde = progressive_enlargement(&qt_space, tau);
    let mut adapted_density = Verdict::Pass;
    for t in 0..=space.horizon() {
        let e = g_tilde.at(t).average(qt_space.prob(), &eta);
        if let Some(b) = space.filtration().at(t).non_constant_block(&e) {
            let block = space.filtration().at(t).blocks()[b].clone();
            let other = *block.iter().find(|&&a| e[a] != e[block[0]]).expect("non-constant");
            adapted_density = Verdict::fail(
                Witness::new("density F-adapted", e[block[0]].clone(), e[other].clone())
                    .at("t", space.time(t))
                    .block(block),
            );
            break;
        }
    }
    let agrees_on_f = same_on_filtration(&target, &q_space);
    let immersed = check_h(&qt_space, &conditional_distribution(&qt_space, tau)).is_pass();
    let (immersion, martingales) = if immersed {
        let g_q = progressive_enlargement(&q_space, tau);
        let f = space.filtration();
        let basis = last.blocks().iter().map(|block| {
            let ind = RandomVariable::indicator(space.n(), |a| block.contains(&a));
            Process::from_fn(space.slots(), ProcessKind::Adapted, |t| f.at(t).average(target.prob(), &ind))
        });
        let martingales = basis.fold(Verdict::Pass, |acc, x| acc.and(g_q.space().martingale_verdict(&x)));
        (check_h(&q_space, &conditional_distribution(&q_space, tau)), martingales)
    } else {
        let why = "reference measure does not immerse F in G".to_string();
        (Verdict::Unknown(why.clone()), Verdict::Unknown(why))
    };
    Ok(ProjectedMeasure {
        measure,
        adapted_density,
        agrees_on_f,
        immersion,
        martingales,
    })
}

/// Whether `Q` is a martingale measure for `X` in `F`, whether `Q` immerses, and the resulting
/// martingale property of `X` in the enlargement.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MartingaleMeasureReport {
    pub in_base: Verdict,
    pub immersion: Verdict,
    pub in_enlargement: Verdict,
}

impl MartingaleMeasureReport {
    pub fn verdict(&self) -> &Verdict {
        &self.in_enlargement
    }
}

pub fn check_martingale_measure(
    space: &FilteredSpace,
    tau: &RandomTime,
    x: &Process,
    q: &Measure,
    kind: EnlargementKind,
) -> MartingaleMeasureReport {
    let unknown = |why: &str| MartingaleMeasureReport {
        in_base: Verdict::Unknown(why.into()),
        immersion: Verdict::Unknown(why.into()),
        in_enlargement: Verdict::Unknown(why.into()),
    };
    if !q.is_equivalent() {
        return unknown("Q is not equivalent to P");
    }
    let Ok(qs) = change_measure(space, q) else {
        return unknown("Q is not equivalent to P");
    };
    let enlarged = match kind {
        EnlargementKind::Progressive => progressive_enlargement(&qs, tau),
        EnlargementKind::Initial => initial_enlargement(&qs, tau),
    };
    MartingaleMeasureReport {
        in_base: qs.martingale_verdict(x),
        immersion: check_h(&qs, &conditional_distribution(&qs, tau)),
        in_enlargement: enlarged.space().martingale_verdict(x),
    }
}
