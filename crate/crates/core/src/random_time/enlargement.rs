use crate::prob::{FilteredSpace, Filtration, Partition};
use crate::rational::Rational;
use crate::verdict::{Verdict, Witness};

use super::RandomTime;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum EnlargementKind {
    /// `G_t`: `F_t` plus the knowledge of `τ` once it has occurred.
    Progressive,
    /// `G*_t = F_t ∨ σ(τ)`.
    Initial,
}

/// A filtration on the base atoms containing `F`, paired with the base weights.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EnlargedFiltration {
    kind: EnlargementKind,
    tau: RandomTime,
    space: FilteredSpace,
}

impl EnlargedFiltration {
    pub fn kind(&self) -> EnlargementKind {
        self.kind
    }

    pub fn tau(&self) -> &RandomTime {
        &self.tau
    }

    /// The base atoms and weights carrying the enlarged filtration.
    pub fn space(&self) -> &FilteredSpace {
        &self.space
    }

    pub fn filtration(&self) -> &Filtration {
        self.space.filtration()
    }

    pub fn at(&self, slot: usize) -> &Partition {
        self.space.filtration().at(slot)
    }
}

fn enlarge(space: &FilteredSpace, tau: &RandomTime, kind: EnlargementKind) -> EnlargedFiltration {
    let n = space.n();
    let inf = space.infinity();
    let levels = (0..=space.horizon())
        .map(|t| {
            let base = space.filtration().at(t);
            Partition::from_key(n, |a| {
                let s = tau.slot(a);
                let mark = match kind {
                    EnlargementKind::Progressive if s > t => inf + 1,
                    _ => s,
                };
                (base.block_of(a), mark)
            })
        })
        .collect();
    let filtration = Filtration::new(levels).expect("joins of a refining chain refine");
    EnlargedFiltration {
        kind,
        tau: tau.clone(),
        space: space.with_filtration(filtration).expect("same atoms and weights"),
    }
}

/// Smallest filtration containing `F` for which `τ` is a stopping time.
pub fn progressive_enlargement(space: &FilteredSpace, tau: &RandomTime) -> EnlargedFiltration {
    enlarge(space, tau, EnlargementKind::Progressive)
}

pub fn initial_enlargement(space: &FilteredSpace, tau: &RandomTime) -> EnlargedFiltration {
    enlarge(space, tau, EnlargementKind::Initial)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Side {
    /// `K_t ∩ {τ > t} = F_t ∩ {τ > t}`
    Before,
    /// `K_t ∩ {τ ≤ t} = G*_t ∩ {τ ≤ t}`
    After,
}

fn mass(space: &FilteredSpace, block: &[usize]) -> Rational {
    block.iter().map(|&a| &space.prob()[a]).sum()
}

/// Compares trace partitions of `k` with those of `F` (before) or `G*` (after) at every `t`.
pub fn check_admissibility(
    space: &FilteredSpace,
    k: &Filtration,
    tau: &RandomTime,
    side: Side,
) -> Verdict {
    if !k.contains(space.filtration()) {
        let t = (0..=space.horizon())
            .find(|&t| !k.at(t).refines(space.filtration().at(t)))
            .unwrap_or(0);
        return Verdict::Unknown(format!("filtration does not contain F at t = {t}"));
    }
    let initial = initial_enlargement(space, tau);
    for t in 0..=space.horizon() {
        let event: Vec<bool> = (0..space.n())
            .map(|a| match side {
                Side::Before => tau.slot(a) > t,
                Side::After => tau.slot(a) <= t,
            })
            .collect();
        let reference = match side {
            Side::Before => space.filtration().at(t),
            Side::After => initial.at(t),
        };
        let ours = k.at(t).trace(&event);
        let theirs = reference.trace(&event);
        if let Some(block) = ours.iter().find(|b| !theirs.contains(b)) {
            let other = theirs
                .iter()
                .find(|o| o.contains(&block[0]))
                .expect("traces cover the same event");
            return Verdict::fail(
                Witness::new("admissibility", mass(space, block), mass(space, other))
                    .at("t", space.time(t))
                    .block(block.clone()),
            );
        }
    }
    Verdict::Pass
}
