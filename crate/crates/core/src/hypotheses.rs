//! Structural hypotheses on the conditional distribution field and the resulting classification.

use num_traits::{One, Signed, Zero};

use crate::error::{Error, Result};
use crate::prob::{FilteredSpace, RandomVariable};
use crate::process::{Process, ProcessKind};
use crate::random_time::{conditional_distribution, ConditionalDistributionField, RandomTime};
use crate::rational::{int, Rational};
use crate::verdict::{Verdict, Witness};

fn first_diff(x: &RandomVariable, y: &RandomVariable) -> Option<usize> {
    (0..x.len()).find(|&a| x[a] != y[a])
}

/// Immersion: `F_{u,s} = F_{u,t}` for `u ≤ s < t`.
pub fn check_h(space: &FilteredSpace, field: &ConditionalDistributionField) -> Verdict {
    let slots = field.slots();
    for u in 0..slots {
        for s in u..slots {
            for t in s + 1..slots {
                if let Some(a) = first_diff(field.get(u, s), field.get(u, t)) {
                    return Verdict::fail(
                        Witness::new("H", field.get(u, s)[a].clone(), field.get(u, t)[a].clone())
                            .at("u", space.time(u))
                            .at("s", space.time(s))
                            .at("t", space.time(t))
                            .block(vec![a]),
                    );
                }
            }
        }
    }
    Verdict::Pass
}

/// `F_{u,s} F_{s,t} = F_{s,s} F_{u,t}` for `u < s < t`.
pub fn check_hp(space: &FilteredSpace, field: &ConditionalDistributionField) -> Verdict {
    let slots = field.slots();
    for s in 0..slots {
        for u in 0..s {
            for t in s + 1..slots {
                let lhs = field.get(u, s) * field.get(s, t);
                let rhs = field.get(s, s) * field.get(u, t);
                if let Some(a) = first_diff(&lhs, &rhs) {
                    return Verdict::fail(
                        Witness::new("HP", lhs[a].clone(), rhs[a].clone())
                            .at("u", space.time(u))
                            .at("s", space.time(s))
                            .at("t", space.time(t))
                            .block(vec![a]),
                    );
                }
            }
        }
    }
    Verdict::Pass
}

/// `F_{u,t} = K_u L_t` on `v ≤ u ≤ t`. Slots before `v` carry `K = 0`, `L = 1`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Factorization {
    pub k: Process,
    pub l: Process,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SeparabilityReport {
    pub verdict: Verdict,
    pub factorization: Option<Factorization>,
}

/// Complete separability: separability from `v = 0`.
pub fn check_complete_separability(space: &FilteredSpace, field: &ConditionalDistributionField) -> SeparabilityReport {
    check_separable_at(space, field, 0)
}

/// Ratio search for `F_{u,t} = K^v_u L^v_t`, `v ≤ u ≤ t`.
///
/// `L_v = 1`; the martingale ratio `L_t / L_{t-1}` is forced to `F_{t-1,t} / F_{t-1}` where
/// `F_{t-1} > 0` and is free elsewhere, where `F_t / ᵖF_t` (or 1) is used.
pub fn check_separable_at(space: &FilteredSpace, field: &ConditionalDistributionField, v: usize) -> SeparabilityReport {
    let n = space.n();
    let slots = field.slots();
    let f = space.filtration();
    let mut l = vec![RandomVariable::one(n); slots];
    for t in v + 1..slots {
        let prev = field.get(t - 1, t - 1);
        let forced = field.get(t - 1, t);
        let diag = field.get(t, t);
        let pf = f.before(t).average(space.prob(), diag);
        let free_ok: Vec<bool> = {
            let p = f.before(t);
            let ok: Vec<bool> = p
                .blocks()
                .iter()
                .map(|b| b.iter().all(|&a| diag[a].is_positive()))
                .collect();
            (0..n).map(|a| ok[p.block_of(a)]).collect()
        };
        let ratio = RandomVariable::from_fn(n, |a| {
            if prev[a].is_positive() {
                &forced[a] / &prev[a]
            } else if free_ok[a] {
                &diag[a] / &pf[a]
            } else {
                Rational::one()
            }
        });
        l[t] = &l[t - 1] * &ratio;
    }
    let l = Process::new(l, ProcessKind::Adapted);
    let mut k = vec![RandomVariable::zero(n); slots];
    for (u, ku) in k.iter_mut().enumerate().skip(v) {
        let lu = l.at(u);
        *ku = RandomVariable::from_fn(n, |a| {
            if lu[a].is_zero() {
                Rational::zero()
            } else {
                &field.get(u, u)[a] / &lu[a]
            }
        });
    }
    let k = Process::new(k, ProcessKind::Increasing);
    let verdict = verify_factorization(space, field, &k, &l, v);
    let factorization = verdict.is_pass().then_some(Factorization { k, l });
    SeparabilityReport { verdict, factorization }
}

/// Checks `L > 0` martingale, `K ≥ 0` adapted increasing and `F_{u,t} = K_u L_t` for `v ≤ u ≤ t`.
pub fn verify_factorization(
    space: &FilteredSpace,
    field: &ConditionalDistributionField,
    k: &Process,
    l: &Process,
    v: usize,
) -> Verdict {
    let slots = field.slots();
    for t in v..slots {
        if let Some(a) = l.at(t).values().iter().position(|x| !x.is_positive()) {
            return Verdict::fail(
                Witness::new("L positive", l.at(t)[a].clone(), Rational::zero())
                    .at("t", space.time(t))
                    .block(vec![a]),
            );
        }
    }
    if let Verdict::Fail(mut w) = space.martingale_verdict(l) {
        w.check = format!("L {}", w.check);
        return Verdict::Fail(w);
    }
    for u in v..slots {
        if let Some(a) = k.at(u).values().iter().position(Signed::is_negative) {
            return Verdict::fail(
                Witness::new("K nonnegative", k.at(u)[a].clone(), Rational::zero())
                    .at("u", space.time(u))
                    .block(vec![a]),
            );
        }
        if !space.is_measurable(k.at(u), u) {
            let p = space.filtration().at(u);
            let b = p.non_constant_block(k.at(u)).expect("not measurable");
            let block = p.blocks()[b].clone();
            let other = *block.iter().find(|&&w| k.at(u)[w] != k.at(u)[block[0]]).expect("non-constant");
            return Verdict::fail(
                Witness::new("K adapted", k.at(u)[block[0]].clone(), k.at(u)[other].clone())
                    .at("u", space.time(u))
                    .block(block),
            );
        }
        if u > v {
            if let Some(a) = (0..space.n()).find(|&a| k.at(u - 1)[a] > k.at(u)[a]) {
                return Verdict::fail(
                    Witness::new("K increasing", k.at(u - 1)[a].clone(), k.at(u)[a].clone())
                        .at("u", space.time(u))
                        .block(vec![a]),
                );
            }
        }
        for t in u..slots {
            let prod = k.at(u) * l.at(t);
            if let Some(a) = first_diff(field.get(u, t), &prod) {
                return Verdict::fail(
                    Witness::new("separability", field.get(u, t)[a].clone(), prod[a].clone())
                        .at("u", space.time(u))
                        .at("t", space.time(t))
                        .block(vec![a]),
                );
            }
        }
    }
    Verdict::Pass
}

/// Separable at every `v > 0`.
pub fn check_separable(space: &FilteredSpace, field: &ConditionalDistributionField) -> Verdict {
    (1..field.slots()).fold(Verdict::Pass, |acc, v| {
        acc.and(check_separable_at(space, field, v).verdict)
    })
}

/// Extended density data: `m[s][t]` for `t ≥ s` (entries with `t < s` are ignored) and `D`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EdData {
    m: Vec<Vec<RandomVariable>>,
    d: Process,
}

impl EdData {
    pub fn new(space: &FilteredSpace, m: Vec<Vec<RandomVariable>>, d: Process) -> Result<Self> {
        let slots = space.slots();
        if m.len() != slots {
            return Err(Error::ShapeMismatch {
                what: "density rows".into(),
                expected: slots,
                found: m.len(),
            });
        }
        if let Some(row) = m.iter().find(|r| r.len() != slots) {
            return Err(Error::ShapeMismatch {
                what: "density columns".into(),
                expected: slots,
                found: row.len(),
            });
        }
        if let Some(x) = m.iter().flatten().find(|x| x.len() != space.n()) {
            return Err(Error::ShapeMismatch {
                what: "density atoms".into(),
                expected: space.n(),
                found: x.len(),
            });
        }
        space.check_shape(&d, "D")?;
        Ok(EdData { m, d })
    }

    /// `m_{s,t} = F_{s,t} - F_{s-1,t}` and `ΔD ≡ 1`; always valid for a genuine field.
    pub fn canonical(space: &FilteredSpace, field: &ConditionalDistributionField) -> Self {
        let slots = field.slots();
        let m = (0..slots)
            .map(|s| {
                (0..slots)
                    .map(|t| if t >= s { field.mass(s, t) } else { RandomVariable::zero(space.n()) })
                    .collect()
            })
            .collect();
        let d = Process::from_fn(slots, ProcessKind::Increasing, |s| {
            RandomVariable::constant(space.n(), int(s as i64 + 1))
        });
        EdData { m, d }
    }

    pub fn m(&self, s: usize, t: usize) -> &RandomVariable {
        &self.m[s][t]
    }

    pub fn table(&self) -> &[Vec<RandomVariable>] {
        &self.m
    }

    pub fn d(&self) -> &Process {
        &self.d
    }

    pub fn slots(&self) -> usize {
        self.m.len()
    }

    /// `t ↦ m_{s,t}`, extended before `s` by `E[m_{s,s} | F_t]`.
    pub fn row(&self, space: &FilteredSpace, s: usize) -> Process {
        Process::from_fn(self.slots(), ProcessKind::Adapted, |t| {
            if t >= s {
                self.m[s][t].clone()
            } else {
                space.filtration().at(t).average(space.prob(), &self.m[s][s])
            }
        })
    }

    /// Diagonal `m_t = m_{t,t}`.
    pub fn diagonal(&self) -> Process {
        Process::from_fn(self.slots(), ProcessKind::Adapted, |t| self.m[t][t].clone())
    }
}

/// `D` adapted increasing, `m ≥ 0`, `t ↦ m_{s,t}` a martingale on `t ≥ s`, and
/// `F_{u,t} = Σ_{s≤u} m_{s,t} ΔD_s` for `u ≤ t`.
pub fn verify_ed(space: &FilteredSpace, field: &ConditionalDistributionField, ed: &EdData) -> Verdict {
    let slots = space.slots();
    let d = ed.d();
    for s in 0..slots {
        let inc = d.increment(s);
        if let Some(a) = inc.values().iter().position(Signed::is_negative) {
            return Verdict::fail(
                Witness::new("D increasing", inc[a].clone(), Rational::zero())
                    .at("t", space.time(s))
                    .block(vec![a]),
            );
        }
    }
    if let Some(s) = (0..slots).find(|&s| !space.is_measurable(d.at(s), s)) {
        let p = space.filtration().at(s);
        let block = p.blocks()[p.non_constant_block(d.at(s)).expect("not measurable")].clone();
        return Verdict::fail(
            Witness::new("D adapted", d.at(s)[block[0]].clone(), Rational::zero())
                .at("t", space.time(s))
                .block(block),
        );
    }
    for s in 0..slots {
        for t in s..slots {
            let x = ed.m(s, t);
            if let Some(a) = x.values().iter().position(Signed::is_negative) {
                return Verdict::fail(
                    Witness::new("m nonnegative", x[a].clone(), Rational::zero())
                        .at("s", space.time(s))
                        .at("t", space.time(t))
                        .block(vec![a]),
                );
            }
        }
        if let Verdict::Fail(mut w) = space.martingale_verdict(&ed.row(space, s)) {
            w.check = format!("m {}", w.check);
            w.coords.insert(0, ("s".into(), space.time(s)));
            return Verdict::Fail(w);
        }
    }
    for t in 0..slots {
        let mut acc = RandomVariable::zero(space.n());
        for u in 0..=t {
            acc = acc + ed.m(u, t) * &d.increment(u);
            if let Some(a) = first_diff(field.get(u, t), &acc) {
                return Verdict::fail(
                    Witness::new("density", field.get(u, t)[a].clone(), acc[a].clone())
                        .at("u", space.time(u))
                        .at("t", space.time(t))
                        .block(vec![a]),
                );
            }
        }
    }
    Verdict::Pass
}

/// `m_{s,t} > 0` on `{ΔD_s > 0}` for `t ≥ s`.
pub fn ed_strictly_positive(space: &FilteredSpace, ed: &EdData) -> Verdict {
    for s in 0..ed.slots() {
        let inc = ed.d().increment(s);
        for t in s..ed.slots() {
            let x = ed.m(s, t);
            if let Some(a) = (0..space.n()).find(|&a| inc[a].is_positive() && !x[a].is_positive()) {
                return Verdict::fail(
                    Witness::new("m positive", x[a].clone(), Rational::zero())
                        .at("s", space.time(s))
                        .at("t", space.time(t))
                        .block(vec![a]),
                );
            }
        }
    }
    Verdict::Pass
}

/// `τ` constant on every block of `F_T`.
pub fn check_terminal_measurable(space: &FilteredSpace, tau: &RandomTime) -> Verdict {
    let p = space.filtration().at(space.horizon());
    for block in p.blocks() {
        if let Some(&other) = block.iter().find(|&&a| tau.slot(a) != tau.slot(block[0])) {
            return Verdict::fail(
                Witness::new(
                    "tau terminal measurable",
                    int(tau.slot(block[0]) as i64),
                    int(tau.slot(other) as i64),
                )
                .at("tau", tau.value(block[0]))
                .at("tau'", tau.value(other))
                .block(block.clone()),
            );
        }
    }
    Verdict::Pass
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Classification {
    pub h: Verdict,
    pub hp: Verdict,
    pub completely_separable: SeparabilityReport,
    pub separable_all_v: Verdict,
    pub ed_canonical: Verdict,
    pub ed_strict: Verdict,
    pub terminal_measurable: Verdict,
    pub honest: Verdict,
    pub strictly_positive_field: Verdict,
}

impl Classification {
    /// Named verdicts in a fixed order.
    pub fn flags(&self) -> Vec<(&'static str, &Verdict)> {
        vec![
            ("H", &self.h),
            ("HP", &self.hp),
            ("completely_separable", &self.completely_separable.verdict),
            ("separable_all_v", &self.separable_all_v),
            ("ED_with_candidate", &self.ed_canonical),
            ("ED_strict", &self.ed_strict),
            ("F_infty_measurable", &self.terminal_measurable),
            ("honest", &self.honest),
            ("strictly_positive_field", &self.strictly_positive_field),
        ]
    }
}

pub fn classify(space: &FilteredSpace, tau: &RandomTime) -> Classification {
    classify_field(space, tau, &conditional_distribution(space, tau))
}

pub fn classify_field(space: &FilteredSpace, tau: &RandomTime, field: &ConditionalDistributionField) -> Classification {
    let hp = check_hp(space, field);
    let terminal_measurable = check_terminal_measurable(space, tau);
    let honest = terminal_measurable.clone().and(hp.clone());
    let ed = EdData::canonical(space, field);
    Classification {
        h: check_h(space, field),
        completely_separable: check_complete_separability(space, field),
        separable_all_v: check_separable(space, field),
        ed_canonical: verify_ed(space, field, &ed),
        ed_strict: ed_strictly_positive(space, &ed),
        strictly_positive_field: field.strict_positivity(space),
        terminal_measurable,
        honest,
        hp,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures;
    use crate::verdict::Time;

    #[test]
    fn s1_fails_h_at_first_triple() {
        let (space, tau) = fixtures::s1();
        let field = conditional_distribution(&space, &tau);
        let v = check_h(&space, &field);
        let w = v.witness().unwrap();
        assert_eq!(w.coord("u"), Some(Time::At(1)));
        assert_eq!(w.coord("s"), Some(Time::At(1)));
        assert_eq!(w.coord("t"), Some(Time::At(2)));
    }

    #[test]
    fn stopping_time_is_h_hp_and_honest() {
        let (space, _) = fixtures::s1();
        let tau = RandomTime::new(&space, vec![Time::At(1), Time::At(1), Time::At(2), Time::Infinity]).unwrap();
        let c = classify(&space, &tau);
        assert!(c.h.is_pass());
        assert!(c.hp.is_pass());
        assert!(c.honest.is_pass());
        assert!(c.ed_canonical.is_pass());
    }

    #[test]
    fn canonical_candidate_verifies_on_s1() {
        let (space, tau) = fixtures::s1();
        let c = classify(&space, &tau);
        assert!(c.ed_canonical.is_pass());
        assert!(c.terminal_measurable.is_pass());
        assert_eq!(c.honest.is_pass(), c.hp.is_pass());
    }

    #[test]
    fn single_atom_is_separable() {
        let space = crate::prob::build_space(vec!["w".into()], vec![Rational::one()], vec![vec![vec![0]], vec![vec![0]]]).unwrap();
        let tau = RandomTime::new(&space, vec![Time::At(1)]).unwrap();
        let field = conditional_distribution(&space, &tau);
        let r = check_complete_separability(&space, &field);
        assert!(r.verdict.is_pass(), "{}", r.verdict);
    }

    #[test]
    fn corrupted_density_fails() {
        let (space, tau) = fixtures::s1();
        let field = conditional_distribution(&space, &tau);
        let ed = EdData::canonical(&space, &field);
        let mut m = ed.table().to_vec();
        m[1][1] = RandomVariable::zero(4);
        let bad = EdData::new(&space, m, ed.d().clone()).unwrap();
        assert!(verify_ed(&space, &field, &bad).is_fail());
    }
}
