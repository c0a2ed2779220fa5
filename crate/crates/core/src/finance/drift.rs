use num_traits::Zero;
use rand::Rng;

use crate::calculus::{bracket_increments, doob_decomposition, Orientation};
use crate::construction::generators::{cox_scenario, random_martingale, rng};
use crate::decomposition::{compare_processes, jump_compensator_increments, GDecomposition, GVariant};
use crate::error::{Error, Result};
use crate::hypotheses::{verify_ed, EdData};
use crate::prob::{FilteredSpace, RandomVariable};
use crate::process::{Process, ProcessKind};
use crate::random_time::{RandomTime, TimeModel};
use crate::rational::{div_or_zero, int, Rational};
use crate::verdict::{Verdict, Witness};

/// `X = U + Σ φ_u Δ⟨U,U⟩_u` with `U` an `F`-martingale and `φ` predictable.
#[derive(Debug, Clone)]
pub struct MarketScenario {
    pub space: FilteredSpace,
    pub tau: RandomTime,
    pub x: Process,
    pub u: Process,
    /// `φ_u` at slot `u`, 0 at slot 0.
    pub phi: Process,
}

fn ratio_or_missing(
    space: &FilteredSpace,
    check: &str,
    num: &[RandomVariable],
    den: &[RandomVariable],
) -> Result<Process> {
    let mut out = vec![RandomVariable::zero(space.n())];
    for t in 1..space.slots() {
        let x = (0..space.n())
            .map(|a| {
                div_or_zero(&num[t][a], &den[t][a]).ok_or_else(|| {
                    Error::DriftDensityMissing(Box::new(
                        Witness::new(check, num[t][a].clone(), den[t][a].clone())
                            .at("t", space.time(t))
                            .block(vec![a]),
                    ))
                })
            })
            .collect::<Result<Vec<_>>>()?;
        out.push(RandomVariable::new(x));
    }
    Ok(Process::new(out, ProcessKind::Predictable))
}

impl MarketScenario {
    /// Splits `X = U + B` and reads `φ = ΔB / Δ⟨U,U⟩` (0/0 = 0).
    pub fn new(space: &FilteredSpace, tau: &RandomTime, x: &Process) -> Result<Self> {
        let doob = doob_decomposition(space, x, Orientation::Plus)?;
        let u = doob.martingale_part;
        let db: Vec<RandomVariable> = (0..space.slots()).map(|t| doob.fv_part.increment(t)).collect();
        let uu = bracket_increments(space, &u, &u);
        let phi = ratio_or_missing(space, "drift density", &db, &uu)?;
        Ok(MarketScenario {
            space: space.clone(),
            tau: tau.clone(),
            x: x.clone(),
            u,
            phi,
        })
    }
}

/// Market on a lifted Cox fixture: `U` a random base martingale, `φ` a random predictable
/// integer density.
pub fn cox_market(seed: u64) -> (MarketScenario, EdData) {
    let cox = cox_scenario(seed);
    let mut r = rng(seed ^ 0x5eed);
    let ext = &cox.extension;
    let space = ext.space();
    let u = ext.lift_process(&random_martingale(&mut r, &cox.base));
    let uu = bracket_increments(space, &u, &u);
    let f = space.filtration();
    let mut inc = vec![RandomVariable::zero(space.n())];
    for t in 1..space.slots() {
        let p = f.before(t);
        let vals: Vec<Rational> = p.blocks().iter().map(|_| int(r.gen_range(-2..=2))).collect();
        inc.push(RandomVariable::from_fn(space.n(), |a| &vals[p.block_of(a)] * &uu[t][a]));
    }
    let x = &u + &Process::from_increments(inc, ProcessKind::Predictable);
    let market = MarketScenario::new(space, ext.tau(), &x).expect("density exists by construction");
    (market, cox.ed_lifted)
}

#[derive(Debug, Clone)]
pub struct InformationDrift {
    /// `ψ_u` at slot `u`, 0 at slot 0.
    pub psi: Process,
    /// `η = Δ⟨U,M⟩ / Δ⟨U,U⟩`.
    pub eta: Process,
    /// `ζ = ΔŬ^p / Δ⟨U,U⟩`.
    pub zeta: Process,
    /// `ξ_{s,·} = Δ⟨U,m_{s,·}⟩ / Δ⟨U,U⟩`, one process per `s`.
    pub xi: Vec<Process>,
    /// `L̂ = M - η·U`.
    pub residual: Process,
    /// `⟨U, L̂⟩ ≡ 0` and `⟨U, m_{s,·} - ξ_{s,·}·U⟩ ≡ 0` for every `s`.
    pub orthogonality: Verdict,
    /// `U = M̂ + Σ ψ Δ⟨U,U⟩`.
    pub decomposition: GDecomposition,
    /// `G`-predictable bracket `⟨M̂,M̂⟩` against `⟨U,U⟩`.
    pub bracket: Verdict,
}

fn integral(space: &FilteredSpace, h: &Process, x: &Process) -> Process {
    let mut inc = vec![RandomVariable::zero(space.n())];
    inc.extend((1..space.slots()).map(|t| h.at(t) * &x.increment(t)));
    Process::from_increments(inc, ProcessKind::Adapted)
}

fn orthogonal(space: &FilteredSpace, u: &Process, y: &Process, label: &str) -> Verdict {
    let br = bracket_increments(space, u, y);
    for (t, x) in br.iter().enumerate() {
        if let Some(a) = (0..space.n()).find(|&a| !x[a].is_zero()) {
            return Verdict::fail(
                Witness::new(label, x[a].clone(), Rational::zero())
                    .at("t", space.time(t))
                    .block(vec![a]),
            );
        }
    }
    Verdict::Pass
}

/// `ψ_u = 1_{τ≥u} (η_u + ζ_u) / G_{u-1} + 1_{τ<u} ξ_{τ,u} / m_{τ,u-1}`.
pub fn information_drift(market: &MarketScenario, ed: &EdData) -> Result<InformationDrift> {
    let space = &market.space;
    let tau = &market.tau;
    let u = &market.u;
    let model = TimeModel::new(space, tau);
    if let Verdict::Fail(w) = verify_ed(space, &model.field, ed) {
        return Err(Error::EDVerificationFails(w));
    }
    let uu = bracket_increments(space, u, u);
    let eta = ratio_or_missing(space, "kw eta", &bracket_increments(space, u, &model.m), &uu)?;
    let zeta = ratio_or_missing(space, "kw zeta", &jump_compensator_increments(space, tau, u), &uu)?;
    let rows: Vec<Process> = (0..space.slots()).map(|s| ed.row(space, s)).collect();
    let xi = rows
        .iter()
        .map(|row| ratio_or_missing(space, "kw xi", &bracket_increments(space, u, row), &uu))
        .collect::<Result<Vec<_>>>()?;

    let residual = (&model.m - &integral(space, &eta, u)).with_kind(ProcessKind::Adapted);
    let orthogonality = rows.iter().zip(&xi).fold(
        orthogonal(space, u, &residual, "kw residual"),
        |acc, (row, x)| acc.and(orthogonal(space, u, &(row - &integral(space, x, u)), "kw residual m")),
    );

    let g = &model.azema.g;
    let mut psi = vec![RandomVariable::zero(space.n())];
    for t in 1..space.slots() {
        let x = (0..space.n())
            .map(|a| {
                let s = tau.slot(a);
                let (num, den) = if s >= t {
                    (&eta.at(t)[a] + &zeta.at(t)[a], g.at(t - 1)[a].clone())
                } else {
                    (xi[s].at(t)[a].clone(), rows[s].at(t - 1)[a].clone())
                };
                div_or_zero(&num, &den).ok_or(Error::DegenerateDenominator { t: space.time(t - 1), atom: a })
            })
            .collect::<Result<Vec<_>>>()?;
        psi.push(RandomVariable::new(x));
    }
    let psi = Process::new(psi, ProcessKind::Predictable);
    let mut inc = vec![RandomVariable::zero(space.n())];
    inc.extend((1..space.slots()).map(|t| psi.at(t) * &uu[t]));
    let drift = Process::from_increments(inc, ProcessKind::Predictable);
    let decomposition = GDecomposition::from_drift(&model, u.clone(), drift, GVariant::PseudoInitial);
    let m_hat = &decomposition.martingale_part;
    let g_bracket = Process::from_increments(bracket_increments(model.g_space(), m_hat, m_hat), ProcessKind::Predictable);
    let f_bracket = Process::from_increments(uu, ProcessKind::Predictable);
    let bracket = compare_processes("<Mhat,Mhat> = <U,U>", space, &g_bracket, &f_bracket);
    Ok(InformationDrift {
        psi,
        eta,
        zeta,
        xi,
        residual,
        orthogonality,
        decomposition,
        bracket,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::construction::generators::independent_scenario;
    use crate::decomposition::decompose_pseudo_initial;
    use crate::random_time::conditional_distribution;

    #[test]
    fn cox_markets_decompose() {
        for seed in 0..30 {
            let (market, ed) = cox_market(seed);
            let info = information_drift(&market, &ed).unwrap();
            assert!(info.decomposition.verdict.is_pass(), "seed {seed}");
            assert!(info.orthogonality.is_pass(), "seed {seed}");
            let reference = decompose_pseudo_initial(&market.space, &market.tau, &ed, &market.u).unwrap();
            assert_eq!(info.decomposition.drift, reference.drift);
        }
    }

    #[test]
    fn phi_is_recovered() {
        let (market, _) = cox_market(4);
        let rebuilt = MarketScenario::new(&market.space, &market.tau, &market.x).unwrap();
        assert_eq!(rebuilt.phi, market.phi);
    }

    #[test]
    fn immersion_has_no_xi() {
        for seed in 0..10 {
            let (space, tau) = independent_scenario(seed);
            let field = conditional_distribution(&space, &tau);
            let ed = EdData::canonical(&space, &field);
            let u = random_martingale(&mut rng(seed), &space);
            let market = MarketScenario::new(&space, &tau, &u).unwrap();
            let info = information_drift(&market, &ed).unwrap();
            for x in &info.xi {
                assert!(x.values().iter().all(|v| v.is_zero()));
            }
            assert!(info.decomposition.verdict.is_pass());
        }
    }

    #[test]
    fn missing_density_is_reported() {
        let (space, tau) = crate::fixtures::s1();
        // X has drift where U does not move: Δ⟨U,U⟩ = 0 but ΔB ≠ 0
        let x = Process::from_fn(space.slots(), ProcessKind::Adapted, |t| RandomVariable::constant(4, int(t.min(2) as i64)));
        assert!(matches!(MarketScenario::new(&space, &tau, &x), Err(Error::DriftDensityMissing(_))));
    }
}
