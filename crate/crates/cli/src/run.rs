//! Command pipelines. Each produces one report section per scenario.

use std::time::Instant;

use filtration_core::construction::{canonical_extension, Construction};
use filtration_core::decomposition::{
    tau_expectation_identities, canonical_decomposition, check_after_tau_identity, check_stopped_identity, compensator_f,
    compensator_g_jeulin_yor, compensator_pseudo_initial, compensator_separable, decompose_honest, decompose_opt_mult,
    decompose_pred_mult, decompose_pseudo_honest, decompose_pseudo_initial, decompose_separable, decompose_stopped,
    decompose_via_initial, extract_building_blocks, initial_drift, unfolded_stopped, verify_building_blocks,
    GDecomposition, GVariant, HonestKind, StoppedKind,
};
use filtration_core::finance::{immersion_density, immersion_measure, information_drift, MarketScenario};
use filtration_core::hypotheses::{check_complete_separability, classify_field, verify_ed, EdData};
use filtration_core::random_time::{
    conditional_distribution, progressive_enlargement, ConditionalDistributionField, RandomTime, TimeModel,
};
use filtration_core::{Error as CoreError, Process, Verdict};
use rayon::prelude::*;

use crate::generate::{generate, Kind};
use crate::report::{Check, Report, Section};
use crate::scenario::{parse_scenario, scenario_text, variables_json, Scenario, ScenarioError};

type Result<T> = std::result::Result<T, ScenarioError>;

fn output(sec: &mut Section, name: &str, p: &Process) {
    sec.outputs.insert(name.into(), variables_json(p.values()));
}

/// The field of `τ`; a field given in the file must agree with it.
fn field_of(sc: &Scenario, tau: &RandomTime, sec: &mut Section) -> ConditionalDistributionField {
    let field = conditional_distribution(&sc.space, tau);
    if let Some(given) = &sc.field {
        sec.push(Check::pass_if("field/matches_tau", given == &field, "the field in the file is not P(τ ≤ u | F_t)"));
    }
    field
}

fn ed_of(sc: &Scenario, field: &ConditionalDistributionField) -> EdData {
    sc.ed.clone().unwrap_or_else(|| EdData::canonical(&sc.space, field))
}

/// `U` when the file has one, otherwise the martingale part of the Azéma supermartingale.
fn input_process(sc: &Scenario, tau: &RandomTime, name: Option<&str>) -> Result<(String, Process)> {
    match name {
        Some(n) => Ok((n.to_string(), sc.process(n)?.clone())),
        None => Ok(match sc.processes.get("U") {
            Some(u) => ("U".into(), u.clone()),
            None => ("M".into(), TimeModel::new(&sc.space, tau).m),
        }),
    }
}

pub fn classify(sc: &Scenario) -> Result<Section> {
    let tau = sc.require_tau()?;
    let mut sec = Section::new("classify");
    let field = field_of(sc, tau, &mut sec);
    sec.push(Check::verdict("field/axioms", &field.validate(&sc.space), &sc.space));
    let c = classify_field(&sc.space, tau, &field);
    sec.classification = c.flags().into_iter().map(|(n, v)| Check::verdict(n, v, &sc.space)).collect();
    sec.classification.push(Check::pass_if("stopping_time", tau.is_stopping_time(&sc.space), "not an F-stopping time"));
    if let Some(ed) = &sc.ed {
        sec.classification.push(Check::verdict("ED_scenario", &verify_ed(&sc.space, &field, ed), &sc.space));
    }
    Ok(sec)
}

pub fn compensate(sc: &Scenario) -> Result<Section> {
    let tau = sc.require_tau()?;
    let space = &sc.space;
    let mut sec = Section::new("compensate");
    let field = field_of(sc, tau, &mut sec);
    let hp = compensator_f(space, tau);
    let f = tau.azema(space).f;
    sec.push(Check::verdict("compensator_F/F_minus_Hp_martingale", &space.martingale_verdict(&(&f - &hp)), space));
    output(&mut sec, "H^p", &hp);
    let jy = match compensator_g_jeulin_yor(space, tau) {
        Ok(jy) => {
            let h = tau.indicator_process(space);
            let g = progressive_enlargement(space, tau);
            sec.push(Check::verdict("jeulin_yor/H_minus_HpG_martingale", &g.space().martingale_verdict(&(&h - &jy)), space));
            output(&mut sec, "H^p,G", &jy);
            Some(jy)
        }
        Err(e) => {
            sec.push(Check::refused("jeulin_yor", &e, space));
            None
        }
    };
    let rep = check_complete_separability(space, &field);
    match rep.factorization.as_ref().map(|fac| compensator_separable(space, tau, fac)) {
        Some(Ok((s_hp, s_hpg))) => {
            sec.push(Check::pass_if("separable/equals_compensator_F", s_hp == hp, "separable H^p differs from H^p"));
            if let Some(jy) = &jy {
                sec.push(Check::pass_if("separable/equals_jeulin_yor", &s_hpg == jy, "separable H^p,G differs"));
            }
        }
        Some(Err(e)) => sec.push(Check::refused("separable", &e, space)),
        None => sec.push(Check::skipped("separable", format!("not completely separable: {}", rep.verdict))),
    }
    match compensator_pseudo_initial(space, tau, &ed_of(sc, &field)) {
        Ok(pi) => {
            sec.push(Check::pass_if("pseudo_initial/equals_compensator_F", pi.hp == hp, "ED compensator differs from H^p"));
            sec.push(Check::verdict("pseudo_initial/m_D_martingale", &pi.m_d_verdict, space));
        }
        Err(e) => sec.push(Check::refused("pseudo_initial", &e, space)),
    }
    Ok(sec)
}

fn run_variant(sc: &Scenario, tau: &RandomTime, u: &Process, v: GVariant) -> std::result::Result<GDecomposition, CoreError> {
    let space = &sc.space;
    match v {
        GVariant::StoppedPredictable => decompose_stopped(space, tau, u, StoppedKind::Predictable),
        GVariant::StoppedOptional => decompose_stopped(space, tau, u, StoppedKind::Optional),
        GVariant::PseudoHonest => decompose_pseudo_honest(space, tau, u),
        GVariant::PredMult => decompose_pred_mult(space, tau, u),
        GVariant::OptMult => match sc.processes.get("A_hat") {
            Some(a_hat) => decompose_opt_mult(space, tau, a_hat, u),
            None => Err(CoreError::SeparabilityPreconditionFails(
                "the optional system needs its auxiliary compensator as process A_hat".into(),
            )),
        },
        GVariant::PseudoInitial => {
            let field = conditional_distribution(space, tau);
            decompose_pseudo_initial(space, tau, &ed_of(sc, &field), u)
        }
        GVariant::Separable => {
            let rep = check_complete_separability(space, &conditional_distribution(space, tau));
            match rep.factorization {
                Some(fac) => decompose_separable(space, tau, &fac, u),
                None => Err(CoreError::SeparabilityPreconditionFails(rep.verdict.to_string())),
            }
        }
        GVariant::HonestClassic => decompose_honest(space, tau, u, HonestKind::Classic),
        GVariant::HonestBarM => decompose_honest(space, tau, u, HonestKind::BarM),
        GVariant::ViaInitial => initial_drift(space, tau, u).and_then(|b| decompose_via_initial(space, tau, u, &b)),
    }
}

fn variant_checks(sc: &Scenario, tau: &RandomTime, u: &Process, v: GVariant, sec: &mut Section, with_outputs: bool) {
    let space = &sc.space;
    let name = format!("decompose/{v}");
    match run_variant(sc, tau, u, v) {
        Ok(dec) => {
            sec.push(Check::verdict(format!("{name}/martingale"), &dec.verdict, space));
            // stopped variants decompose U^τ
            let reference = if v.is_stopped() { u.stopped(&tau.slots()) } else { u.clone() };
            match canonical_decomposition(space, tau, &reference) {
                Ok(c) => sec.push(Check::pass_if(
                    format!("{name}/equals_canonical"),
                    c.drift == dec.drift,
                    "drift differs from the canonical drift",
                )),
                Err(e) => sec.push(Check::refused(format!("{name}/equals_canonical"), &e, space)),
            }
            let identity = if v.is_stopped() {
                Some(("stopped_identity", check_stopped_identity(space, tau, u)))
            } else if matches!(v, GVariant::HonestClassic | GVariant::HonestBarM) {
                Some(("after_tau_identity", check_after_tau_identity(space, tau, u)))
            } else {
                None
            };
            match identity {
                Some((id, Ok(verdict))) => sec.push(Check::verdict(format!("{name}/{id}"), &verdict, space)),
                Some((id, Err(e))) => sec.push(Check::refused(format!("{name}/{id}"), &e, space)),
                None => {}
            }
            if with_outputs {
                output(sec, "drift", &dec.drift);
                output(sec, "martingale_part", &dec.martingale_part);
            }
        }
        Err(CoreError::InitialDecompositionInvalid(w)) => sec.push(Check::verdict(name, &Verdict::Fail(w), space)),
        Err(e) => sec.push(Check::refused(name, &e, space)),
    }
}

pub fn decompose(sc: &Scenario, variant: GVariant, process: Option<&str>) -> Result<Section> {
    let tau = sc.require_tau()?;
    let (name, u) = input_process(sc, tau, process)?;
    let mut sec = Section::new(format!("decompose {variant} of {name}"));
    variant_checks(sc, tau, &u, variant, &mut sec, true);
    Ok(sec)
}

fn lifted(sc: &Scenario, lift: impl Fn(&Process) -> Process) -> Vec<(String, Process)> {
    sc.processes.iter().map(|(k, p)| (k.clone(), lift(p))).collect()
}

pub fn construct(sc: &Scenario, name: &str, optional: bool) -> Result<(Section, Option<Scenario>)> {
    let f = sc.process(name)?;
    let space = &sc.space;
    let mut sec = Section::new(format!("construct from {name}"));
    let built = if optional { Construction::optional(space, f) } else { Construction::predictable(space, f) };
    let c = match built {
        Ok(c) => c,
        Err(e) => {
            sec.push(Check::refused("construct", &e, space));
            return Ok((sec, None));
        }
    };
    let ext = &c.extension;
    sec.push(Check::verdict("construct/system", &c.system.validate(space), space));
    sec.push(Check::verdict("construct/field_axioms", &c.field.validate(space), space));
    if !optional {
        sec.push(Check::verdict("construct/HP", &filtration_core::hypotheses::check_hp(space, &c.field), space));
    }
    sec.push(Check::verdict("construct/realized_field", &ext.verify_field(&c.field), ext.space()));
    sec.push(Check::pass_if(
        "construct/azema_F",
        ext.tau().azema(ext.space()).f == ext.lift_process(f),
        "P(τ ≤ t | F_t) differs from the prescribed F",
    ));
    let mut out = Scenario::new(ext.space().clone());
    out.tau = Some(ext.tau().clone());
    out.processes.extend(lifted(sc, |p| ext.lift_process(p)));
    if let Some(a_hat) = &c.a_hat {
        out.processes.insert("A_hat".into(), ext.lift_process(a_hat));
    }
    Ok((sec, Some(out)))
}

pub fn extend(sc: &Scenario) -> Result<(Section, Option<Scenario>)> {
    let space = &sc.space;
    let field = match (&sc.field, &sc.tau) {
        (Some(f), _) => f.clone(),
        (None, Some(tau)) => conditional_distribution(space, tau),
        (None, None) => {
            return Err(ScenarioError::Validation {
                pointer: "/field".into(),
                message: "extend needs a field or a random time".into(),
            })
        }
    };
    let mut sec = Section::new("extend");
    let ext = match canonical_extension(space, &field) {
        Ok(ext) => ext,
        Err(e) => {
            sec.push(Check::refused("extend", &e, space));
            return Ok((sec, None));
        }
    };
    sec.push(Check::verdict("extend/realized_field", &ext.verify_field(&field), ext.space()));
    let mut out = Scenario::new(ext.space().clone());
    out.tau = Some(ext.tau().clone());
    out.processes.extend(lifted(sc, |p| ext.lift_process(p)));
    Ok((sec, Some(out)))
}

fn immerse_checks(sc: &Scenario, tau: &RandomTime, sec: &mut Section, with_outputs: bool) {
    let space = &sc.space;
    match immersion_density(space, tau) {
        Ok(d) => {
            sec.push(Check::verdict("immersion_density/G_martingale", &d.verdict, space));
            if with_outputs {
                output(sec, "Z", &d.z);
            }
        }
        Err(e) => {
            sec.push(Check::refused("immersion_density", &e, space));
            return;
        }
    }
    match immersion_measure(space, tau) {
        Ok(m) => {
            sec.push(Check::verdict("immersion_measure/immersion", &m.immersion, space));
            sec.push(Check::verdict("immersion_measure/agrees_on_F", &m.agrees_on_f, space));
            if let Some(u) = sc.processes.get("U").filter(|u| space.martingale_verdict(u).is_pass()) {
                let g = progressive_enlargement(&m.space, tau);
                sec.push(Check::verdict("immersion_measure/U_is_G_martingale", &g.space().martingale_verdict(u), space));
            }
            if with_outputs {
                sec.outputs.insert("density".into(), crate::scenario::variable_json(m.measure.density()));
            }
        }
        Err(e) => sec.push(Check::refused("immersion_measure", &e, space)),
    }
}

pub fn immerse(sc: &Scenario) -> Result<Section> {
    let tau = sc.require_tau()?;
    let mut sec = Section::new("immerse");
    immerse_checks(sc, tau, &mut sec, true);
    Ok(sec)
}

fn info_drift_checks(sc: &Scenario, tau: &RandomTime, x: &Process, sec: &mut Section, with_outputs: bool) {
    let space = &sc.space;
    let market = match MarketScenario::new(space, tau, x) {
        Ok(m) => m,
        Err(e) => return sec.push(Check::refused("info_drift", &e, space)),
    };
    let field = conditional_distribution(space, tau);
    match information_drift(&market, &ed_of(sc, &field)) {
        Ok(info) => {
            sec.push(Check::verdict("info_drift/G_martingale", &info.decomposition.verdict, space));
            sec.push(Check::verdict("info_drift/kw_orthogonality", &info.orthogonality, space));
            sec.push(Check::verdict("info_drift/bracket", &info.bracket, space));
            if with_outputs {
                output(sec, "phi", &market.phi);
                output(sec, "psi", &info.psi);
            }
        }
        Err(e) => sec.push(Check::refused("info_drift", &e, space)),
    }
}

pub fn info_drift(sc: &Scenario) -> Result<Section> {
    let tau = sc.require_tau()?;
    let x = sc.market.as_ref().ok_or_else(|| ScenarioError::Validation {
        pointer: "/market".into(),
        message: "info-drift needs a market block".into(),
    })?;
    let mut sec = Section::new("info-drift");
    info_drift_checks(sc, tau, x, &mut sec, true);
    Ok(sec)
}

/// Every applicable pipeline on one scenario.
pub fn verify_scenario(sc: &Scenario, label: impl Into<String>) -> Result<Section> {
    let tau = sc.require_tau()?;
    let space = &sc.space;
    let mut sec = classify(sc)?;
    sec.label = label.into();
    sec.checks.extend(compensate(sc)?.checks.into_iter().filter(|c| c.name != "field/matches_tau"));
    let (_, u) = input_process(sc, tau, None)?;
    for v in GVariant::ALL {
        variant_checks(sc, tau, &u, v, &mut sec, false);
    }
    match canonical_decomposition(space, tau, &u) {
        Ok(dec) => {
            let bb = extract_building_blocks(space, tau, &dec.martingale_part);
            sec.push(Check::verdict("building_blocks", &verify_building_blocks(space, tau, &bb), space));
        }
        Err(e) => sec.push(Check::refused("building_blocks", &e, space)),
    }
    match unfolded_stopped(space, tau, &u) {
        Ok(form) => sec.push(Check::verdict("unfolded_stopped", &form.verdict, space)),
        Err(e) => sec.push(Check::refused("unfolded_stopped", &e, space)),
    }
    match tau_expectation_identities(space, tau, &u) {
        Ok(v) => sec.push(Check::verdict("tau_expectation_identities", &v, space)),
        Err(e) => sec.push(Check::refused("tau_expectation_identities", &e, space)),
    }
    immerse_checks(sc, tau, &mut sec, false);
    if let Some(x) = &sc.market {
        info_drift_checks(sc, tau, x, &mut sec, false);
    }
    Ok(sec)
}

fn timed<T>(timing: bool, f: impl FnOnce() -> T) -> (T, Option<f64>) {
    let start = Instant::now();
    let out = f();
    (out, timing.then(|| start.elapsed().as_secs_f64() * 1e3))
}

/// `count` generated scenarios from `seed` on, cycling through the generator kinds.
/// Sections come back in index order whatever the thread count.
pub fn verify_generated(seed: u64, count: usize, timing: bool) -> Report {
    let sections = (0..count)
        .into_par_iter()
        .map(|i| {
            let kind = Kind::CYCLE[i % Kind::CYCLE.len()];
            let s = seed + i as u64;
            let (mut sec, ms) = timed(timing, || {
                let sc = generate(kind, s);
                let text = scenario_text(&sc);
                let round_trip = parse_scenario(&text, true).map(|back| scenario_text(&back) == text);
                let label = format!("#{i} {} seed {s}", kind.name());
                let mut sec = verify_scenario(&sc, label).expect("generated scenarios carry a random time");
                sec.checks.insert(
                    0,
                    Check::pass_if("scenario/round_trip", matches!(round_trip, Ok(true)), "canonical form is not stable"),
                );
                sec
            });
            sec.elapsed_ms = ms;
            sec
        })
        .collect();
    Report::new("verify-all", sections)
}

/// Runs a single-scenario command with optional timing.
pub fn with_timing(timing: bool, f: impl FnOnce() -> Result<Section>) -> Result<Section> {
    let (sec, ms) = timed(timing, f);
    sec.map(|mut s| {
        s.elapsed_ms = ms;
        s
    })
}
