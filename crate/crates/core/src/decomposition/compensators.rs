use num_traits::Zero;

use crate::calculus::{
    bracket_increments, doob_decomposition, dual_predictable_projection, predictable_projection,
    Orientation,
};
use crate::error::{Error, Result};
use crate::hypotheses::{verify_ed, EdData, Factorization};
use crate::prob::{FilteredSpace, RandomVariable};
use crate::process::{Process, ProcessKind};
use crate::random_time::{conditional_distribution, RandomTime};
use crate::verdict::{Verdict, Witness};

/// `H^p`, the dual predictable projection of `H = 1_{τ≤·}`.
pub fn compensator_f(space: &FilteredSpace, tau: &RandomTime) -> Process {
    dual_predictable_projection(space, &tau.indicator_process(space))
}

/// `H^{p,G}_t = Σ_{1≤u≤t∧τ} ΔH^p_u / G_{u-1}`.
pub fn compensator_g_jeulin_yor(space: &FilteredSpace, tau: &RandomTime) -> Result<Process> {
    let hp = compensator_f(space, tau);
    let g = tau.azema(space).g;
    g_compensator_from(space, tau, &hp, &g)
}

fn g_compensator_from(space: &FilteredSpace, tau: &RandomTime, hp: &Process, g: &Process) -> Result<Process> {
    let mut inc = vec![RandomVariable::zero(space.n())];
    for u in 1..space.slots() {
        let d = hp.increment(u);
        let x = (0..space.n())
            .map(|a| {
                if tau.slot(a) < u {
                    return Ok(Default::default());
                }
                let den = &g.at(u - 1)[a];
                if den.is_zero() {
                    return Err(Error::DegenerateDenominator { t: space.time(u - 1), atom: a });
                }
                Ok(&d[a] / den)
            })
            .collect::<Result<Vec<_>>>()?;
        inc.push(RandomVariable::new(x));
    }
    Ok(Process::from_increments(inc, ProcessKind::Predictable))
}

/// Compensators from `F_{u,t} = K_u L_t` with `K` predictable: `ΔH^p_u = L_{u-1} ΔK_u` (plus
/// `K_0 L_0` at 0), and the progressive compensator `Σ_{u≤t∧τ} L_{u-1}ΔK_u / (1 - L_{u-1}K_{u-1})`.
pub fn compensator_separable(
    space: &FilteredSpace,
    tau: &RandomTime,
    factorization: &Factorization,
) -> Result<(Process, Process)> {
    let (k, l) = (&factorization.k, &factorization.l);
    if let Some(u) = (1..space.slots()).find(|&u| !space.filtration().before(u).is_measurable(k.at(u))) {
        return Err(Error::SeparabilityPreconditionFails(format!(
            "K is not predictable at t = {}",
            space.time(u)
        )));
    }
    let mut inc = vec![k.at(0) * l.at(0)];
    inc.extend((1..space.slots()).map(|u| l.at(u - 1) * &k.increment(u)));
    let hp = Process::from_increments(inc, ProcessKind::Predictable);
    let one = RandomVariable::one(space.n());
    let g = Process::from_fn(space.slots(), ProcessKind::Adapted, |s| &one - &(k.at(s) * l.at(s)));
    let hpg = g_compensator_from(space, tau, &hp, &g)?;
    Ok((hp, hpg))
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PseudoInitialCompensator {
    /// `⟨N, D - D^p⟩ + Σ_{0≤u≤t} ᵖm_u ΔD^p_u`.
    pub hp: Process,
    /// `m^D_t = Σ_{u≤t} (m_{u,t} - m_u) ΔD_u`.
    pub m_d: Process,
    /// Martingale verdict for `m^D`.
    pub m_d_verdict: Verdict,
}

/// Compensator of `H` from extended density data, with `m = N + P` the Doob decomposition of
/// the diagonal `m_t = m_{t,t}`.
pub fn compensator_pseudo_initial(
    space: &FilteredSpace,
    tau: &RandomTime,
    ed: &EdData,
) -> Result<PseudoInitialCompensator> {
    let field = conditional_distribution(space, tau);
    if let Verdict::Fail(w) = verify_ed(space, &field, ed) {
        return Err(Error::EDVerificationFails(w));
    }
    let m = ed.diagonal();
    let n_part = doob_decomposition(space, &m, Orientation::Plus)?.martingale_part;
    let d = ed.d();
    let dp = dual_predictable_projection(space, d);
    let pm = predictable_projection(space, &m);
    let residual = d - &dp;
    let br = bracket_increments(space, &n_part, &residual);
    let inc = (0..space.slots())
        .map(|u| &br[u] + &(pm.at(u) * &dp.increment(u)))
        .collect();
    let hp = Process::from_increments(inc, ProcessKind::Predictable);
    let m_d = Process::from_fn(space.slots(), ProcessKind::Adapted, |t| {
        (0..=t).fold(RandomVariable::zero(space.n()), |acc, u| {
            acc + &(&(ed.m(u, t) - m.at(u)) * &d.increment(u))
        })
    });
    let m_d_verdict = match space.martingale_verdict(&m_d) {
        Verdict::Fail(mut w) => {
            w.check = format!("m^D {}", w.check);
            Verdict::Fail(w)
        }
        v => v,
    };
    Ok(PseudoInitialCompensator { hp, m_d, m_d_verdict })
}

/// Exact comparison of two processes, first differing slot and atom as witness.
pub fn compare_processes(check: &str, space: &FilteredSpace, x: &Process, y: &Process) -> Verdict {
    for s in 0..x.slots() {
        if let Some(a) = (0..space.n()).find(|&a| x.at(s)[a] != y.at(s)[a]) {
            return Verdict::fail(
                Witness::new(check, x.at(s)[a].clone(), y.at(s)[a].clone())
                    .at("t", space.time(s))
                    .block(vec![a]),
            );
        }
    }
    Verdict::Pass
}
