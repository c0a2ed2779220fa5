use clap::ValueEnum;
use filtration_core::construction::generators::{
    cox_scenario, honest_scenario, independent_scenario, optional_scenario, predictable_scenario, random_martingale,
    random_scenario, random_space, random_submartingale, rng,
};
use filtration_core::finance::cox_market;
use filtration_core::random_time::RandomTime;
use filtration_core::{FilteredSpace, Process};
use rand::Rng;

use crate::scenario::Scenario;

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Kind {
    /// Arbitrary random time.
    Random,
    /// F_T-measurable time satisfying (HP).
    Honest,
    /// Time independent of the base filtration.
    Independent,
    /// Predictable multiplicative construction with positive F.
    Separable,
    /// Optional multiplicative construction, with its auxiliary compensator as `A_hat`.
    Optional,
    /// Cox time with extended density data and a market process.
    Cox,
    /// Base space carrying an Azéma submartingale `F`, no time.
    Submartingale,
}

impl Kind {
    /// Kinds cycled through by `verify-all --seed`.
    pub const CYCLE: [Kind; 6] = [Kind::Random, Kind::Honest, Kind::Independent, Kind::Separable, Kind::Optional, Kind::Cox];

    pub fn name(self) -> &'static str {
        match self {
            Kind::Random => "random",
            Kind::Honest => "honest",
            Kind::Independent => "independent",
            Kind::Separable => "separable",
            Kind::Optional => "optional",
            Kind::Cox => "cox",
            Kind::Submartingale => "submartingale",
        }
    }
}

fn with_u(space: FilteredSpace, tau: RandomTime, seed: u64) -> Scenario {
    let u = random_martingale(&mut rng(seed ^ 0xface), &space);
    let mut sc = Scenario::new(space);
    sc.tau = Some(tau);
    sc.processes.insert("U".into(), u);
    sc
}

pub fn generate(kind: Kind, seed: u64) -> Scenario {
    match kind {
        Kind::Random => {
            let (space, tau) = random_scenario(seed);
            with_u(space, tau, seed)
        }
        Kind::Honest => {
            let (space, tau) = honest_scenario(seed);
            with_u(space, tau, seed)
        }
        Kind::Independent => {
            let (space, tau) = independent_scenario(seed);
            with_u(space, tau, seed)
        }
        Kind::Separable => {
            let c = predictable_scenario(seed, true);
            let mut sc = with_u(c.space().clone(), c.tau().clone(), seed);
            sc.processes.insert("F".into(), c.extension.lift_process(&c.f));
            sc
        }
        Kind::Optional => {
            let c = optional_scenario(seed);
            let mut sc = with_u(c.space().clone(), c.tau().clone(), seed);
            let a_hat = c.a_hat.as_ref().expect("optional construction");
            sc.processes.insert("A_hat".into(), c.extension.lift_process(a_hat));
            sc
        }
        Kind::Cox => {
            let (market, ed) = cox_market(seed);
            let cox = cox_scenario(seed);
            let lambda = cox.extension.lift_process(&cox.lambda);
            let mut sc = Scenario::new(market.space);
            sc.tau = Some(market.tau);
            sc.processes.insert("U".into(), market.u);
            sc.processes.insert("lambda".into(), lambda);
            sc.ed = Some(ed);
            sc.market = Some(market.x);
            sc
        }
        Kind::Submartingale => {
            let mut r = rng(seed);
            let space = random_space(&mut r);
            let (zero_start, positive) = (r.gen_bool(0.5), r.gen_bool(0.5));
            let f: Process = random_submartingale(&mut r, &space, zero_start, positive);
            let mut sc = Scenario::new(space);
            sc.processes.insert("F".into(), f);
            sc
        }
    }
}
