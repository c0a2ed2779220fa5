use crate::calculus::{
    doob_decomposition, dual_optional_projection, dual_predictable_projection, Orientation,
};
use crate::prob::FilteredSpace;
use crate::process::{Process, ProcessKind};

use super::{
    conditional_distribution, progressive_enlargement, Azema, ConditionalDistributionField,
    EnlargedFiltration, RandomTime,
};

/// The standard objects attached to `(Ω, F, P, τ)`, computed once.
#[derive(Debug, Clone)]
pub struct TimeModel {
    pub space: FilteredSpace,
    pub tau: RandomTime,
    pub azema: Azema,
    pub field: ConditionalDistributionField,
    pub progressive: EnlargedFiltration,
    /// `H_t = 1_{τ≤t}`
    pub h: Process,
    /// Doob martingale part of `G = M - A`.
    pub m: Process,
    /// Doob compensator of `G`, `A_0 = 0`.
    pub a: Process,
    /// `H^p = A + F_0`.
    pub hp: Process,
    pub ho: Process,
    /// `M̄_t = E[H^o_∞ | F_t]`, so that `G = M̄ - H^o`.
    pub m_bar: Process,
    /// `M̃_t = E[H^p_∞ | F_t]`, so that `G = M̃ - H^p`.
    pub m_tilde: Process,
}

impl TimeModel {
    pub fn new(space: &FilteredSpace, tau: &RandomTime) -> Self {
        let azema = tau.azema(space);
        let doob = doob_decomposition(space, &azema.g, Orientation::Minus)
            .expect("Azéma G is adapted");
        let h = tau.indicator_process(space);
        let hp = dual_predictable_projection(space, &h);
        let ho = dual_optional_projection(space, &h);
        let closure = |x: &Process| {
            Process::from_fn(space.slots(), ProcessKind::Adapted, |s| {
                space.filtration().at(s).average(space.prob(), x.terminal())
            })
        };
        TimeModel {
            field: conditional_distribution(space, tau),
            progressive: progressive_enlargement(space, tau),
            m_bar: closure(&ho),
            m_tilde: closure(&hp),
            m: doob.martingale_part,
            a: doob.fv_part,
            space: space.clone(),
            tau: tau.clone(),
            azema,
            h,
            hp,
            ho,
        }
    }

    /// The progressive enlargement as a space (base weights, `G` levels).
    pub fn g_space(&self) -> &FilteredSpace {
        self.progressive.space()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures;

    #[test]
    fn azema_identities_on_s1() {
        let (space, tau) = fixtures::s1();
        let model = TimeModel::new(&space, &tau);
        assert_eq!(&model.m_bar - &model.ho, model.azema.g);
        assert_eq!(&model.m_tilde - &model.hp, model.azema.g);
        assert_eq!(model.hp, model.a);
        assert!(space.is_martingale(&model.m_bar).unwrap().is_pass());
        assert!(model.g_space().is_martingale(&(&model.h - &model.hp)).unwrap().is_fail());
    }
}
