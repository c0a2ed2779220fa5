//! Discrete stochastic calculus: integrals, brackets, Doob decomposition and (dual) projections.
//!
//! Dictionary: `t-` is `t-1`, `⟨·,·⟩` is the compensator of `[·,·]`, local martingales are
//! martingales. Sums run over `1 ≤ u ≤ t` and include the `T → ∞` step.

use num_traits::Zero;

use crate::error::Result;
use crate::prob::{FilteredSpace, RandomVariable};
use crate::process::{Process, ProcessKind};
use crate::rational::Rational;
use crate::verdict::{Verdict, Witness};

/// Sign convention of a Doob decomposition.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Orientation {
    /// `X = M + A`
    Plus,
    /// `X = M - A`, the natural reading for supermartingales such as the Azéma `G`.
    Minus,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Decomposition {
    pub martingale_part: Process,
    pub fv_part: Process,
    pub orientation: Orientation,
}

impl Decomposition {
    pub fn recompose(&self) -> Process {
        match self.orientation {
            Orientation::Plus => &self.martingale_part + &self.fv_part,
            Orientation::Minus => &self.martingale_part - &self.fv_part,
        }
    }
}

/// `(X·Y)_t = Σ_{1≤u≤t} X_u ΔY_u`; `X` must be predictable for the space's filtration.
pub fn stochastic_integral(space: &FilteredSpace, x: &Process, y: &Process) -> Result<Process> {
    space.check_predictable(x, "integrand")?;
    space.check_shape(y, "integrator")?;
    Ok(integrate(space, x, y))
}

pub(crate) fn integrate(space: &FilteredSpace, x: &Process, y: &Process) -> Process {
    let mut inc = vec![RandomVariable::zero(space.n())];
    inc.extend((1..space.slots()).map(|s| x.at(s) * &y.increment(s)));
    Process::from_increments(inc, ProcessKind::FiniteVariation)
}

/// Predictable part `ΔB_t = E[ΔX_t | F_{t-1}]`, oriented as requested, with `B_0 = 0`.
pub fn doob_decomposition(
    space: &FilteredSpace,
    x: &Process,
    orientation: Orientation,
) -> Result<Decomposition> {
    space.check_adapted(x, "decomposed process")?;
    let mut inc = vec![RandomVariable::zero(space.n())];
    for s in 1..space.slots() {
        let drift = space.cond_expect_before(&x.increment(s), s)?;
        inc.push(match orientation {
            Orientation::Plus => drift,
            Orientation::Minus => -drift,
        });
    }
    let fv_part = Process::from_increments(inc, ProcessKind::Predictable);
    let martingale_part = match orientation {
        Orientation::Plus => x - &fv_part,
        Orientation::Minus => x + &fv_part,
    }
    .with_kind(ProcessKind::Adapted);
    Ok(Decomposition {
        martingale_part,
        fv_part,
        orientation,
    })
}

/// `[U,V]_t = Σ_{1≤u≤t} ΔU_u ΔV_u`.
pub fn square_bracket(u: &Process, v: &Process) -> Process {
    let n = u.at(0).len();
    let mut inc = vec![RandomVariable::zero(n)];
    inc.extend((1..u.slots()).map(|s| u.increment(s) * v.increment(s)));
    Process::from_increments(inc, ProcessKind::FiniteVariation)
}

/// `⟨U,V⟩_t = Σ_{1≤u≤t} E[ΔU_u ΔV_u | F_{u-1}]`.
pub fn angle_bracket(space: &FilteredSpace, u: &Process, v: &Process) -> Result<Process> {
    space.check_adapted(u, "bracket argument")?;
    space.check_adapted(v, "bracket argument")?;
    Ok(bracket(space, u, v))
}

pub(crate) fn bracket(space: &FilteredSpace, u: &Process, v: &Process) -> Process {
    Process::from_increments(bracket_increments(space, u, v), ProcessKind::Predictable)
}

/// Increments `Δ⟨U,V⟩_s` for every slot (zero at slot 0).
pub(crate) fn bracket_increments(space: &FilteredSpace, u: &Process, v: &Process) -> Vec<RandomVariable> {
    let f = space.filtration();
    let mut inc = vec![RandomVariable::zero(space.n())];
    inc.extend((1..space.slots()).map(|s| {
        f.before(s)
            .average(space.prob(), &(u.increment(s) * v.increment(s)))
    }));
    inc
}

/// `(°X)_t = E[X_t | F_t]`.
pub fn optional_projection(space: &FilteredSpace, x: &Process) -> Process {
    let f = space.filtration();
    Process::from_fn(space.slots(), ProcessKind::Adapted, |s| {
        f.at(s).average(space.prob(), x.at(s))
    })
}

/// `(ᵖX)_t = E[X_t | F_{t-1}]`, `ᵖX_0 = E[X_0 | F_0]`.
pub fn predictable_projection(space: &FilteredSpace, x: &Process) -> Process {
    let f = space.filtration();
    Process::from_fn(space.slots(), ProcessKind::Predictable, |s| {
        f.before(s).average(space.prob(), x.at(s))
    })
}

/// `ΔA^o_t = E[ΔA_t | F_t]` including the jump at 0 (`A_{0-} = 0`) and at `∞`.
pub fn dual_optional_projection(space: &FilteredSpace, a: &Process) -> Process {
    let f = space.filtration();
    let inc = (0..space.slots())
        .map(|s| f.at(s).average(space.prob(), &a.increment(s)))
        .collect();
    Process::from_increments(inc, ProcessKind::FiniteVariation)
}

/// `ΔA^p_t = E[ΔA_t | F_{t-1}]` with `F_{0-} = F_0` and `F_{∞-} = F_T`.
pub fn dual_predictable_projection(space: &FilteredSpace, a: &Process) -> Process {
    let f = space.filtration();
    let inc = (0..space.slots())
        .map(|s| f.before(s).average(space.prob(), &a.increment(s)))
        .collect();
    Process::from_increments(inc, ProcessKind::Predictable)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DualKind {
    Optional,
    Predictable,
}

/// Defining property `E[Σ_u X_u ΔA_u] = E[Σ_u X_u ΔA'_u]` for every optional (resp. predictable) `X`,
/// checked on the spanning family `X = 1_B` at a single slot `u`, `B` a block of `F_u` (resp. `F_{u-1}`).
pub fn verify_dual_projection(
    space: &FilteredSpace,
    a: &Process,
    projected: &Process,
    kind: DualKind,
) -> Verdict {
    let f = space.filtration();
    for s in 0..space.slots() {
        let part = match kind {
            DualKind::Optional => f.at(s),
            DualKind::Predictable => f.before(s),
        };
        let da = a.increment(s);
        let dp = projected.increment(s);
        if let Some(b) = part.non_constant_block(&dp) {
            let block = part.blocks()[b].clone();
            let other = *block.iter().find(|&&w| dp[w] != dp[block[0]]).expect("non-constant");
            return Verdict::fail(
                Witness::new("measurability", dp[block[0]].clone(), dp[other].clone())
                    .at("t", space.time(s))
                    .block(block),
            );
        }
        for block in part.blocks() {
            let sum = |d: &RandomVariable| {
                block
                    .iter()
                    .fold(Rational::zero(), |acc, &w| acc + &d[w] * &space.prob()[w])
            };
            let (lhs, rhs) = (sum(&da), sum(&dp));
            if lhs != rhs {
                return Verdict::fail(
                    Witness::new("dual projection", lhs, rhs)
                        .at("t", space.time(s))
                        .block(block.clone()),
                );
            }
        }
    }
    Verdict::Pass
}
