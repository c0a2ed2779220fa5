//! Compensators of `H` and the decompositions `U = martingale part + drift` of `F`-martingales
//! under the progressive enlargement.
//!
//! Every drift is assembled atomwise: before `τ` (on `{τ ≥ u}`) from an `F`-predictable increment
//! divided by `G_{u-1}`, after `τ` from a formula evaluated at `s = τ(ω)`. The increment at `u`
//! therefore depends only on the `F_{u-1}`-block and on `τ ∧ u`-information, which is what makes
//! it `G`-predictable.

mod blocks;
mod compensators;

pub use blocks::{
    tau_expectation_identities, extract_building_blocks, unfolded_stopped, verify_building_blocks,
    BuildingBlocks, UnfoldedForm,
};
pub use compensators::{
    compare_processes, compensator_f, compensator_g_jeulin_yor, compensator_pseudo_initial,
    compensator_separable, PseudoInitialCompensator,
};

use std::fmt;
use std::str::FromStr;

use num_traits::{Signed, Zero};

use crate::calculus::bracket_increments;
use crate::error::{Error, Result};
use crate::hypotheses::{
    check_hp, check_terminal_measurable, verify_ed, verify_factorization, EdData, Factorization,
};
use crate::prob::{FilteredSpace, RandomVariable};
use crate::process::{Process, ProcessKind};
use crate::random_time::{initial_enlargement, RandomTime, TimeModel};
use crate::rational::{div_or_zero, Rational};
use crate::verdict::{Verdict, Witness};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum GVariant {
    StoppedPredictable,
    StoppedOptional,
    PseudoHonest,
    PredMult,
    OptMult,
    PseudoInitial,
    Separable,
    HonestClassic,
    HonestBarM,
    ViaInitial,
}

impl GVariant {
    pub const ALL: [GVariant; 10] = [
        GVariant::StoppedPredictable,
        GVariant::StoppedOptional,
        GVariant::PseudoHonest,
        GVariant::PredMult,
        GVariant::OptMult,
        GVariant::PseudoInitial,
        GVariant::Separable,
        GVariant::HonestClassic,
        GVariant::HonestBarM,
        GVariant::ViaInitial,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            GVariant::StoppedPredictable => "stopped_predictable",
            GVariant::StoppedOptional => "stopped_optional",
            GVariant::PseudoHonest => "pseudo_honest",
            GVariant::PredMult => "pred_mult",
            GVariant::OptMult => "opt_mult",
            GVariant::PseudoInitial => "pseudo_initial",
            GVariant::Separable => "separable",
            GVariant::HonestClassic => "honest_classic",
            GVariant::HonestBarM => "honest_barM",
            GVariant::ViaInitial => "via_initial",
        }
    }

    /// Stopped variants decompose `U^τ` and carry no drift after `τ`.
    pub fn is_stopped(self) -> bool {
        matches!(self, GVariant::StoppedPredictable | GVariant::StoppedOptional)
    }
}

impl fmt::Display for GVariant {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for GVariant {
    type Err = String;
    fn from_str(s: &str) -> std::result::Result<Self, String> {
        GVariant::ALL
            .into_iter()
            .find(|v| v.as_str() == s)
            .ok_or_else(|| format!("unknown variant `{s}`"))
    }
}

/// `input = martingale_part + drift`, with `drift_0 = 0`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GDecomposition {
    /// `U`, or `U^τ` for the stopped variants.
    pub input: Process,
    pub drift: Process,
    pub martingale_part: Process,
    pub variant: GVariant,
    /// Exact `G`-martingale check of the martingale part and `G`-predictability of the drift.
    pub verdict: Verdict,
}

impl GDecomposition {
    /// Wraps a drift computed elsewhere and runs the same checks as the built-in variants.
    pub fn from_drift(model: &TimeModel, input: Process, drift: Process, variant: GVariant) -> Self {
        finish(model, input, drift, variant)
    }
}

/// Which `F`-predictable process drives the drift before `τ`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Before {
    /// `C̃ = ⟨U,M⟩ + Ŭ^p`
    Folded,
    /// `⟨U,M̄⟩`
    BarM,
}

fn require_martingale(space: &FilteredSpace, u: &Process) -> Result<()> {
    space.check_shape(u, "U")?;
    match space.martingale_verdict(u) {
        Verdict::Fail(w) => Err(Error::NotMartingale(w)),
        _ => Ok(()),
    }
}

fn divide(num: &Rational, den: &Rational, space: &FilteredSpace, slot: usize, atom: usize) -> Result<Rational> {
    div_or_zero(num, den).ok_or(Error::DegenerateDenominator { t: space.time(slot), atom })
}

/// `ΔŬ^p_u = E[ΔU_u 1_{τ=u} | F_{u-1}]` for `u ≥ 1` (zero at 0).
pub fn jump_compensator_increments(space: &FilteredSpace, tau: &RandomTime, u: &Process) -> Vec<RandomVariable> {
    let f = space.filtration();
    let mut inc = vec![RandomVariable::zero(space.n())];
    inc.extend((1..space.slots()).map(|s| {
        f.before(s)
            .average(space.prob(), &(u.increment(s) * tau.indicator_eq(s)))
    }));
    inc
}

/// `Ŭ^p`, the dual predictable projection of `Ŭ_t = ΔU_τ 1_{1≤τ≤t}`.
pub fn jump_compensator(space: &FilteredSpace, tau: &RandomTime, u: &Process) -> Process {
    Process::from_increments(jump_compensator_increments(space, tau, u), ProcessKind::Predictable)
}

/// `ΔC̃_u = Δ⟨U,M⟩_u + ΔŬ^p_u`.
pub fn folded_increments(model: &TimeModel, u: &Process) -> Vec<RandomVariable> {
    let br = bracket_increments(&model.space, u, &model.m);
    let jp = jump_compensator_increments(&model.space, &model.tau, u);
    br.iter().zip(&jp).map(|(x, y)| x + y).collect()
}

fn before_increments(model: &TimeModel, u: &Process, before: Before) -> Vec<RandomVariable> {
    match before {
        Before::Folded => folded_increments(model, u),
        Before::BarM => bracket_increments(&model.space, u, &model.m_bar),
    }
}

/// Increments `Δ⟨U, X⟩_u / X_{u-1}` evaluated on `atom`.
fn ratio_increment(
    space: &FilteredSpace,
    u: &Process,
    x: &Process,
    slot: usize,
    atom: usize,
) -> Result<Rational> {
    let f = space.filtration();
    let num = f.before(slot).average(space.prob(), &(u.increment(slot) * x.increment(slot)));
    divide(&num[atom], &x.at(slot - 1)[atom], space, slot - 1, atom)
}

/// Atomwise assembly; `after(s, u, atom)` gives the increment at `u` on `{τ = s < u}`.
fn assemble<A>(
    model: &TimeModel,
    input: &Process,
    variant: GVariant,
    before: Before,
    mut after: A,
) -> Result<GDecomposition>
where
    A: FnMut(usize, usize, usize) -> Result<Rational>,
{
    let space = &model.space;
    let tau = &model.tau;
    let g = &model.azema.g;
    let bef = before_increments(model, input, before);
    let mut inc = vec![RandomVariable::zero(space.n())];
    for u in 1..space.slots() {
        let x = (0..space.n())
            .map(|a| {
                let s = tau.slot(a);
                if s >= u {
                    divide(&bef[u][a], &g.at(u - 1)[a], space, u - 1, a)
                } else {
                    after(s, u, a)
                }
            })
            .collect::<Result<Vec<_>>>()?;
        inc.push(RandomVariable::new(x));
    }
    let drift = Process::from_increments(inc, ProcessKind::Predictable);
    Ok(finish(model, input.clone(), drift, variant))
}

fn finish(model: &TimeModel, input: Process, drift: Process, variant: GVariant) -> GDecomposition {
    let gs = model.g_space();
    let martingale_part = (&input - &drift).with_kind(ProcessKind::Adapted);
    let predictable = match gs.check_predictable(&drift, "drift") {
        Ok(()) => Verdict::Pass,
        Err(e) => Verdict::Unknown(e.to_string()),
    };
    let verdict = gs.martingale_verdict(&martingale_part).and(predictable);
    GDecomposition {
        input,
        drift,
        martingale_part,
        variant,
        verdict,
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum StoppedKind {
    Predictable,
    Optional,
}

/// Decomposition of `U^τ`: drift `Σ_{u≤t∧τ} ΔC̃_u / G_{u-1}` (predictable) or
/// `Σ_{u≤t∧τ} Δ⟨U,M̄⟩_u / G_{u-1}` (optional).
pub fn decompose_stopped(
    space: &FilteredSpace,
    tau: &RandomTime,
    u: &Process,
    kind: StoppedKind,
) -> Result<GDecomposition> {
    require_martingale(space, u)?;
    let model = TimeModel::new(space, tau);
    let stopped = u.stopped(&tau.slots());
    let (variant, before) = match kind {
        StoppedKind::Predictable => (GVariant::StoppedPredictable, Before::Folded),
        StoppedKind::Optional => (GVariant::StoppedOptional, Before::BarM),
    };
    // brackets of U^τ and U coincide on {τ ≥ u}, where they are used
    let mut dec = assemble(&model, u, variant, before, |_, _, _| Ok(Rational::zero()))?;
    dec = finish(&model, stopped, dec.drift, variant);
    Ok(dec)
}

/// Pseudo-honest times: after `τ` the drift is `Δ⟨U, F_{s,·}⟩_u / F_{s,u-1}` at `s = τ`.
pub fn decompose_pseudo_honest(space: &FilteredSpace, tau: &RandomTime, u: &Process) -> Result<GDecomposition> {
    require_martingale(space, u)?;
    let model = TimeModel::new(space, tau);
    if let Verdict::Fail(w) = check_hp(space, &model.field) {
        return Err(Error::HypothesisHPFails(w));
    }
    if let Verdict::Fail(w) = model.field.strict_positivity(space) {
        return Err(Error::FieldNotStrictlyPositive(w));
    }
    let columns: Vec<Process> = (0..space.slots()).map(|s| model.field.column(s)).collect();
    assemble(&model, u, GVariant::PseudoHonest, Before::Folded, |s, t, a| {
        ratio_increment(space, u, &columns[s], t, a)
    })
}

fn positivity(space: &FilteredSpace, f: &Process) -> Result<()> {
    for t in 1..=space.horizon() {
        if let Some(a) = f.at(t).values().iter().position(|x| !x.is_positive()) {
            return Err(Error::PositivityFails(Box::new(
                Witness::new("F positive", f.at(t)[a].clone(), Rational::zero())
                    .at("t", space.time(t))
                    .block(vec![a]),
            )));
        }
    }
    Ok(())
}

/// Fields of predictable multiplicative systems: after `τ` the drift is `-Δ⟨U,M⟩_u / ᵖF_u`.
///
/// Requires `F_t > 0` for `1 ≤ t ≤ T` and `C_{s,u} = F_{s,u} / F_u` predictable for `s < u`.
pub fn decompose_pred_mult(space: &FilteredSpace, tau: &RandomTime, u: &Process) -> Result<GDecomposition> {
    require_martingale(space, u)?;
    let model = TimeModel::new(space, tau);
    let f = &model.azema.f;
    positivity(space, f)?;
    for t in 1..space.slots() {
        for s in 0..t {
            let c = model.field.get(s, t).zip_with(f.at(t), |x, y| x / y);
            if !space.filtration().before(t).is_measurable(&c) {
                return Err(Error::NotPredictable {
                    what: format!("C_{{{},·}}", space.time(s)),
                    t: space.time(t),
                });
            }
        }
    }
    let pf = crate::calculus::predictable_projection(space, f);
    let br = bracket_increments(space, u, &model.m);
    assemble(&model, u, GVariant::PredMult, Before::Folded, |_, t, a| {
        Ok(-divide(&br[t][a], &pf.at(t)[a], space, t, a)?)
    })
}

/// Fields of optional multiplicative systems built from `Â`: after `τ` the drift is
/// `-Δ⟨U,M̂⟩_u / F_{u-1}` with `M̂_t = E[Â_∞ | F_t]`; before `τ` it uses `⟨U,M̄⟩`.
pub fn decompose_opt_mult(
    space: &FilteredSpace,
    tau: &RandomTime,
    a_hat: &Process,
    u: &Process,
) -> Result<GDecomposition> {
    require_martingale(space, u)?;
    let model = TimeModel::new(space, tau);
    let f = &model.azema.f;
    positivity(space, f)?;
    space.check_shape(a_hat, "A-hat")?;
    // F_{s,t} F_{t-1} = F_{s,t-1} (F_t - ΔÂ_t): the field is the one induced by Â
    for t in 1..space.slots() {
        let rhs_factor = f.at(t) - &a_hat.increment(t);
        for s in 0..t {
            let lhs = model.field.get(s, t) * f.at(t - 1);
            let rhs = model.field.get(s, t - 1) * &rhs_factor;
            if let Some(a) = (0..space.n()).find(|&a| lhs[a] != rhs[a]) {
                return Err(Error::RealizationMismatch(Box::new(
                    Witness::new("optional system", lhs[a].clone(), rhs[a].clone())
                        .at("s", space.time(s))
                        .at("t", space.time(t))
                        .block(vec![a]),
                )));
            }
        }
    }
    let m_hat = Process::from_fn(space.slots(), ProcessKind::Adapted, |t| {
        space.filtration().at(t).average(space.prob(), a_hat.terminal())
    });
    let br = bracket_increments(space, u, &m_hat);
    assemble(&model, u, GVariant::OptMult, Before::BarM, |_, t, a| {
        Ok(-divide(&br[t][a], &f.at(t - 1)[a], space, t - 1, a)?)
    })
}

/// Pseudo-initial times: after `τ` the drift is `Δ⟨U, m_{s,·}⟩_u / m_{s,u-1}` at `s = τ`.
pub fn decompose_pseudo_initial(
    space: &FilteredSpace,
    tau: &RandomTime,
    ed: &EdData,
    u: &Process,
) -> Result<GDecomposition> {
    require_martingale(space, u)?;
    let model = TimeModel::new(space, tau);
    if let Verdict::Fail(w) = verify_ed(space, &model.field, ed) {
        return Err(Error::EDVerificationFails(w));
    }
    let rows: Vec<Process> = (0..space.slots()).map(|s| ed.row(space, s)).collect();
    assemble(&model, u, GVariant::PseudoInitial, Before::Folded, |s, t, a| {
        ratio_increment(space, u, &rows[s], t, a)
    })
}

/// Completely separable fields `F_{u,t} = K_u L_t`: after `τ` the drift is `Δ⟨U,L⟩_u / L_{u-1}`.
pub fn decompose_separable(
    space: &FilteredSpace,
    tau: &RandomTime,
    factorization: &Factorization,
    u: &Process,
) -> Result<GDecomposition> {
    require_martingale(space, u)?;
    let model = TimeModel::new(space, tau);
    let l = &factorization.l;
    if let Verdict::Fail(w) = verify_factorization(space, &model.field, &factorization.k, l, 0) {
        return Err(Error::SeparabilityPreconditionFails(w.to_string()));
    }
    assemble(&model, u, GVariant::Separable, Before::Folded, |_, t, a| {
        ratio_increment(space, u, l, t, a)
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum HonestKind {
    /// `C̃ = ⟨U,M⟩ + Ŭ^p` on both sides of `τ`.
    Classic,
    /// `⟨U,M̄⟩` on both sides of `τ`.
    BarM,
}

/// Honest times: drift `Σ_{u≤t∧τ} ΔC̃_u / G_{u-1} - Σ_{t∧τ<u≤t} ΔC̃_u / F_{u-1}`.
pub fn decompose_honest(
    space: &FilteredSpace,
    tau: &RandomTime,
    u: &Process,
    kind: HonestKind,
) -> Result<GDecomposition> {
    require_martingale(space, u)?;
    let model = TimeModel::new(space, tau);
    let honest = check_terminal_measurable(space, tau).and(check_hp(space, &model.field));
    if let Verdict::Fail(w) = honest {
        return Err(Error::NotHonest(w.to_string()));
    }
    let (variant, before) = match kind {
        HonestKind::Classic => (GVariant::HonestClassic, Before::Folded),
        HonestKind::BarM => (GVariant::HonestBarM, Before::BarM),
    };
    let inc = before_increments(&model, u, before);
    let f = &model.azema.f;
    assemble(&model, u, variant, before, |_, t, a| {
        Ok(-divide(&inc[t][a], &f.at(t - 1)[a], space, t - 1, a)?)
    })
}

/// The after-`τ` sums `Σ_{t∧τ<u≤t} ΔC̃_u / F_{u-1}` and `Σ_{t∧τ<u≤t} Δ⟨U,M̄⟩_u / F_{u-1}`, compared.
pub fn check_after_tau_identity(space: &FilteredSpace, tau: &RandomTime, u: &Process) -> Result<Verdict> {
    let model = TimeModel::new(space, tau);
    let f = &model.azema.f;
    let sum = |inc: Vec<RandomVariable>| -> Result<Process> {
        let mut out = vec![RandomVariable::zero(space.n())];
        for t in 1..space.slots() {
            let x = (0..space.n())
                .map(|a| {
                    if tau.slot(a) >= t {
                        Ok(Rational::zero())
                    } else {
                        divide(&inc[t][a], &f.at(t - 1)[a], space, t - 1, a)
                    }
                })
                .collect::<Result<Vec<_>>>()?;
            out.push(RandomVariable::new(x));
        }
        Ok(Process::from_increments(out, ProcessKind::Predictable))
    };
    let classic = sum(before_increments(&model, u, Before::Folded))?;
    let bar = sum(before_increments(&model, u, Before::BarM))?;
    Ok(compare_processes("after tau", space, &classic, &bar))
}

/// `Σ_{u≤t∧τ} ΔC̃_u / G_{u-1}` against `Σ_{u≤t∧τ} Δ⟨U,M̄⟩_u / G_{u-1}`.
pub fn check_stopped_identity(space: &FilteredSpace, tau: &RandomTime, u: &Process) -> Result<Verdict> {
    let p = decompose_stopped(space, tau, u, StoppedKind::Predictable)?;
    let o = decompose_stopped(space, tau, u, StoppedKind::Optional)?;
    Ok(compare_processes("stopped drifts", space, &p.drift, &o.drift))
}

/// `G*`-drift of an `F`-martingale: `ΔB_u = Δ⟨U, f_{τ,·}⟩_u / f_{τ,u-1}` for `u ≥ 1`, where
/// `f_{s,t} = P(τ = s | F_t)`.
pub fn initial_drift(space: &FilteredSpace, tau: &RandomTime, u: &Process) -> Result<Process> {
    let model = TimeModel::new(space, tau);
    let masses: Vec<Process> = (0..space.slots())
        .map(|s| Process::from_fn(space.slots(), ProcessKind::Adapted, |t| model.field.mass(s, t)))
        .collect();
    let mut inc = vec![RandomVariable::zero(space.n())];
    for t in 1..space.slots() {
        let x = (0..space.n())
            .map(|a| ratio_increment(space, u, &masses[tau.slot(a)], t, a))
            .collect::<Result<Vec<_>>>()?;
        inc.push(RandomVariable::new(x));
    }
    Ok(Process::from_increments(inc, ProcessKind::Predictable))
}

/// From a `G*`-decomposition `U - B`: drift `Σ_{u≤t∧τ} ΔC̃_u / G_{u-1} + Σ_{t∧τ<u≤t} ΔB_u`.
pub fn decompose_via_initial(
    space: &FilteredSpace,
    tau: &RandomTime,
    u: &Process,
    b: &Process,
) -> Result<GDecomposition> {
    require_martingale(space, u)?;
    space.check_shape(b, "B")?;
    let star = initial_enlargement(space, tau);
    let residual = (u - b).with_kind(ProcessKind::Adapted);
    let check = star.space().martingale_verdict(&residual).and(
        match star.space().check_predictable(b, "B") {
            Ok(()) => Verdict::Pass,
            Err(e) => Verdict::Unknown(e.to_string()),
        },
    );
    match check {
        Verdict::Fail(w) => return Err(Error::InitialDecompositionInvalid(w)),
        Verdict::Unknown(reason) => {
            return Err(Error::InitialDecompositionInvalid(Box::new(
                Witness::new(reason, Rational::zero(), Rational::zero()),
            )))
        }
        Verdict::Pass => {}
    }
    let model = TimeModel::new(space, tau);
    assemble(&model, u, GVariant::ViaInitial, Before::Folded, |_, t, a| Ok(b.increment(t)[a].clone()))
}

/// The canonical drift: stopped part plus the `G*`-drift after `τ`. Every applicable variant
/// must agree with it.
pub fn canonical_decomposition(space: &FilteredSpace, tau: &RandomTime, u: &Process) -> Result<GDecomposition> {
    let b = initial_drift(space, tau, u)?;
    decompose_via_initial(space, tau, u, &b)
}
