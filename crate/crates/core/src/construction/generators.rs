//! Seeded scenario generators. Every function is a pure function of the RNG state.

use num_traits::{One, Zero};
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::hypotheses::EdData;
use crate::prob::{FilteredSpace, Filtration, Measure, Partition, RandomVariable};
use crate::process::{Process, ProcessKind};
use crate::random_time::{ConditionalDistributionField, RandomTime};
use crate::rational::{int, ratio, Rational};
use crate::verdict::Time;

use super::{canonical_extension, Construction, ExtendedSpace};

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Up to `max_atoms` atoms with weights in `{1..4}` (normalized), horizon `1..=max_horizon`,
/// and a random refining chain.
pub fn random_space_with(rng: &mut ChaCha8Rng, max_atoms: usize, max_horizon: usize) -> FilteredSpace {
    let n = rng.gen_range(2..=max_atoms.max(2));
    let horizon = rng.gen_range(1..=max_horizon.max(1));
    let weights: Vec<i64> = (0..n).map(|_| rng.gen_range(1..=4)).collect();
    let total: i64 = weights.iter().sum();
    let prob = weights.iter().map(|&w| ratio(w, total)).collect();
    let mut labels = vec![0usize; n];
    if rng.gen_bool(0.25) {
        split(rng, &mut labels);
    }
    let mut levels = vec![Partition::from_key(n, |a| labels[a])];
    for t in 1..=horizon {
        if t == horizon && rng.gen_bool(0.5) {
            labels = (0..n).collect();
        } else {
            split(rng, &mut labels);
        }
        levels.push(Partition::from_key(n, |a| labels[a]));
    }
    let names = (0..n).map(|a| format!("w{a}")).collect();
    FilteredSpace::new(names, prob, Filtration::new(levels).expect("refining by construction"))
        .expect("valid weights")
}

pub fn random_space(rng: &mut ChaCha8Rng) -> FilteredSpace {
    random_space_with(rng, 6, 3)
}

/// Splits some blocks of the labelling in two.
fn split(rng: &mut ChaCha8Rng, labels: &mut [usize]) {
    let mut next = labels.iter().max().map_or(0, |m| m + 1);
    let current: Vec<usize> = {
        let mut v = labels.to_vec();
        v.sort_unstable();
        v.dedup();
        v
    };
    for b in current {
        let mut members: Vec<usize> = (0..labels.len()).filter(|&a| labels[a] == b).collect();
        if members.len() < 2 || rng.gen_bool(0.4) {
            continue;
        }
        members.shuffle(rng);
        let cut = rng.gen_range(1..members.len());
        for &a in &members[cut..] {
            labels[a] = next;
        }
        next += 1;
    }
}

fn quarter(rng: &mut ChaCha8Rng, lo: i64) -> Rational {
    ratio(rng.gen_range(lo..=4), 4)
}

/// A random Azéma submartingale `F` with `F_∞ = 1`.
///
/// `zero_start` forces `F_0 = 0`; `positive` forces `F_t > 0` for `t ≥ 1`.
pub fn random_submartingale(rng: &mut ChaCha8Rng, space: &FilteredSpace, zero_start: bool, positive: bool) -> Process {
    let n = space.n();
    let f = space.filtration();
    let mut g = vec![RandomVariable::one(n); space.slots()];
    if !zero_start {
        let p0 = f.at(0);
        let vals: Vec<Rational> = p0.blocks().iter().map(|_| quarter(rng, 1)).collect();
        g[0] = RandomVariable::from_fn(n, |a| vals[p0.block_of(a)].clone());
    }
    for t in 1..=space.horizon() {
        let prev = f.at(t - 1);
        let cur = f.at(t);
        let mut next = vec![Rational::zero(); n];
        for block in prev.blocks() {
            let gb = g[t - 1][block[0]].clone();
            let mut keep = quarter(rng, 0);
            if positive && keep.is_one() {
                keep = ratio(3, 4);
            }
            let mu = &gb * &keep;
            let children: Vec<usize> = {
                let mut c: Vec<usize> = block.iter().map(|&a| cur.block_of(a)).collect();
                c.sort_unstable();
                c.dedup();
                c
            };
            let raw: Vec<Rational> = children.iter().map(|_| int(rng.gen_range(0..=4))).collect();
            let mass = |c: usize| -> Rational { cur.blocks()[c].iter().map(|&a| &space.prob()[a]).sum() };
            let total: Rational = children.iter().map(|&c| mass(c)).sum();
            let mean: Rational = children.iter().zip(&raw).map(|(&c, r)| mass(c) * r).sum::<Rational>() / &total;
            let vals: Vec<Rational> = if mean.is_zero() {
                vec![mu.clone(); children.len()]
            } else {
                let scaled: Vec<Rational> = raw.iter().map(|r| r * &mu / &mean).collect();
                let cap = if positive { (Rational::one() + &mu) / int(2) } else { Rational::one() };
                let top = scaled.iter().max().expect("nonempty").clone();
                let lambda = if top > cap { (&cap - &mu) / (&top - &mu) } else { Rational::one() };
                scaled.iter().map(|s| &mu + &lambda * (s - &mu)).collect()
            };
            for (&c, v) in children.iter().zip(vals) {
                for &a in &cur.blocks()[c] {
                    next[a] = v.clone();
                }
            }
        }
        g[t] = RandomVariable::new(next);
    }
    g[space.infinity()] = RandomVariable::zero(n);
    let one = RandomVariable::one(n);
    Process::from_fn(space.slots(), ProcessKind::Adapted, |s| &one - &g[s])
}

/// `τ(ω)` uniform over `0..=T, ∞`, with `0` made rarer.
pub fn random_time(rng: &mut ChaCha8Rng, space: &FilteredSpace) -> RandomTime {
    let values = (0..space.n())
        .map(|_| {
            let s = if rng.gen_bool(0.15) { 0 } else { rng.gen_range(1..space.slots()) };
            Time::from_slot(s, space.horizon())
        })
        .collect();
    RandomTime::new(space, values).expect("in range")
}

/// Last `t` with `Z_t = 1` for a random adapted 0/1 process `Z` (0 if never).
pub fn honest_time(rng: &mut ChaCha8Rng, space: &FilteredSpace) -> RandomTime {
    let mut last = vec![0usize; space.n()];
    for t in 0..=space.horizon() {
        let p = space.filtration().at(t);
        let bits: Vec<bool> = p.blocks().iter().map(|_| rng.gen_bool(0.5)).collect();
        for (a, l) in last.iter_mut().enumerate() {
            if bits[p.block_of(a)] {
                *l = t;
            }
        }
    }
    let values = last.into_iter().map(Time::At).collect();
    RandomTime::new(space, values).expect("in range")
}

/// A product space `Ω × K` with `τ` a function of the mark, independent of `F_T` given `F_0`.
pub fn independent_time(rng: &mut ChaCha8Rng, space: &FilteredSpace) -> (FilteredSpace, RandomTime) {
    let marks = rng.gen_range(2..=3);
    let slot_of: Vec<usize> = (0..marks).map(|_| rng.gen_range(0..space.slots())).collect();
    let p0 = space.filtration().at(0);
    let laws: Vec<Vec<Rational>> = p0
        .blocks()
        .iter()
        .map(|_| {
            let w: Vec<i64> = (0..marks).map(|_| rng.gen_range(1..=3)).collect();
            let total: i64 = w.iter().sum();
            w.into_iter().map(|x| ratio(x, total)).collect()
        })
        .collect();
    let mut origin = Vec::new();
    let mut prob = Vec::new();
    let mut names = Vec::new();
    for w in 0..space.n() {
        for k in 0..marks {
            origin.push(w);
            prob.push(&space.prob()[w] * &laws[p0.block_of(w)][k]);
            names.push(format!("{}#{k}", space.atoms()[w]));
        }
    }
    let n = origin.len();
    let levels = (0..=space.horizon())
        .map(|t| {
            let p = space.filtration().at(t);
            Partition::from_key(n, |i| p.block_of(origin[i]))
        })
        .collect();
    let product = FilteredSpace::new(names, prob, Filtration::new(levels).expect("refining"))
        .expect("valid weights");
    let values = (0..n)
        .map(|i| Time::from_slot(slot_of[i % marks], space.horizon()))
        .collect();
    let tau = RandomTime::new(&product, values).expect("in range");
    (product, tau)
}

/// `M_t = E[X | F_t]` for integer `X ∈ [-3, 3]`.
pub fn random_martingale(rng: &mut ChaCha8Rng, space: &FilteredSpace) -> Process {
    let x = RandomVariable::from_fn(space.n(), |_| int(rng.gen_range(-3..=3)));
    let x = space.filtration().at(space.horizon()).average(space.prob(), &x);
    Process::from_fn(space.slots(), ProcessKind::Adapted, |s| {
        space.filtration().at(s).average(space.prob(), &x)
    })
}

/// `U_u`, `u ∈ 0..=T, ∞`, each `F_T`-measurable with small integer values.
pub fn random_payoff(rng: &mut ChaCha8Rng, space: &FilteredSpace) -> Vec<RandomVariable> {
    let last = space.filtration().at(space.horizon());
    (0..space.slots())
        .map(|_| {
            let vals: Vec<Rational> = last.blocks().iter().map(|_| int(rng.gen_range(-4..=4))).collect();
            RandomVariable::from_fn(space.n(), |a| vals[last.block_of(a)].clone())
        })
        .collect()
}

/// An equivalent measure with atom weights proportional to `P(ω) k(ω)`, `k ∈ 1..=4`.
pub fn random_measure(rng: &mut ChaCha8Rng, space: &FilteredSpace) -> Measure {
    let raw: Vec<Rational> = space.prob().iter().map(|p| p * int(rng.gen_range(1..=4))).collect();
    let total: Rational = raw.iter().sum();
    let weights: Vec<Rational> = raw.iter().map(|w| w / &total).collect();
    Measure::from_weights(space, &weights).expect("positive weights summing to 1")
}

pub fn random_scenario(seed: u64) -> (FilteredSpace, RandomTime) {
    let mut r = rng(seed);
    let space = random_space(&mut r);
    let tau = random_time(&mut r, &space);
    (space, tau)
}

pub fn honest_scenario(seed: u64) -> (FilteredSpace, RandomTime) {
    let mut r = rng(seed);
    let space = random_space(&mut r);
    let tau = honest_time(&mut r, &space);
    (space, tau)
}

pub fn independent_scenario(seed: u64) -> (FilteredSpace, RandomTime) {
    let mut r = rng(seed);
    let base = random_space_with(&mut r, 4, 3);
    independent_time(&mut r, &base)
}

/// Predictable-construction scenario; `positive` gives `F_0 = 0` and `F_t > 0` for `t ≥ 1`.
pub fn predictable_scenario(seed: u64, positive: bool) -> Construction {
    let mut r = rng(seed);
    let space = random_space_with(&mut r, 5, 3);
    let zero_start = positive || r.gen_bool(0.5);
    let f = random_submartingale(&mut r, &space, zero_start, positive);
    Construction::predictable(&space, &f).expect("generated submartingales are valid")
}

pub fn optional_scenario(seed: u64) -> Construction {
    let mut r = rng(seed);
    let space = random_space_with(&mut r, 5, 3);
    let f = random_submartingale(&mut r, &space, true, true);
    Construction::optional(&space, &f).expect("positive submartingales admit an optional system")
}

/// Discrete Cox-type time: `F_{u,t} = E[1 - q^{Λ_u} | F_t]`, `Λ` adapted with unit jumps and
/// `q ∈ {1/4, 1/2, 3/4}` an `F_T`-measurable kernel.
#[derive(Debug, Clone)]
pub struct CoxFixture {
    pub base: FilteredSpace,
    pub lambda: Process,
    pub q: RandomVariable,
    pub field: ConditionalDistributionField,
    pub extension: ExtendedSpace,
    /// Density data on the base.
    pub ed: EdData,
    /// Density data lifted to the extension.
    pub ed_lifted: EdData,
    /// Field lifted to the extension.
    pub field_lifted: ConditionalDistributionField,
}

fn pow(q: &Rational, k: &Rational) -> Rational {
    let e = k.to_integer();
    let e: i32 = i32::try_from(e).expect("small exponent");
    q.pow(e)
}

pub fn cox_scenario(seed: u64) -> CoxFixture {
    let mut r = rng(seed);
    let base = random_space_with(&mut r, 5, 3);
    let n = base.n();
    let f = base.filtration();
    let big_t = base.horizon();
    let inf = base.infinity();
    let mut lambda = vec![RandomVariable::zero(n); base.slots()];
    for t in 0..=big_t {
        let p = f.at(t);
        let jumps: Vec<bool> = p.blocks().iter().map(|_| r.gen_bool(0.5)).collect();
        lambda[t] = RandomVariable::from_fn(n, |a| {
            let prev = if t == 0 { Rational::zero() } else { lambda[t - 1][a].clone() };
            prev + int(jumps[p.block_of(a)] as i64)
        });
    }
    lambda[inf] = lambda[big_t].clone();
    let last = f.at(big_t);
    let qs: Vec<Rational> = last.blocks().iter().map(|_| ratio(r.gen_range(1..=3), 4)).collect();
    let q = RandomVariable::from_fn(n, |a| qs[last.block_of(a)].clone());
    let one = RandomVariable::one(n);
    let qpow = |k: &RandomVariable| RandomVariable::from_fn(n, |a| pow(&q[a], &k[a]));
    let cond = |x: &RandomVariable, t: usize| f.at(t).average(base.prob(), x);
    let table = (0..base.slots())
        .map(|u| {
            (0..base.slots())
                .map(|t| if u == inf { one.clone() } else { cond(&(&one - &qpow(&lambda[u])), t) })
                .collect()
        })
        .collect();
    let field = ConditionalDistributionField::new(&base, table).expect("Cox fields are valid");
    let m: Vec<Vec<RandomVariable>> = (0..base.slots())
        .map(|s| {
            (0..base.slots())
                .map(|t| {
                    if t < s {
                        RandomVariable::zero(n)
                    } else if s == inf {
                        qpow(&lambda[big_t])
                    } else {
                        let before = if s == 0 { RandomVariable::zero(n) } else { lambda[s - 1].clone() };
                        cond(&(&(&one - &q) * &qpow(&before)), t)
                    }
                })
                .collect()
        })
        .collect();
    let mut d = lambda.clone();
    d[inf] = &lambda[big_t] + &one;
    let d = Process::new(d, ProcessKind::Increasing);
    let lambda = Process::new(lambda, ProcessKind::Increasing);
    let ed = EdData::new(&base, m, d).expect("shapes match");
    let extension = canonical_extension(&base, &field).expect("valid field");
    let lifted_m = ed
        .table()
        .iter()
        .map(|row| row.iter().map(|x| extension.lift(x)).collect())
        .collect();
    let ed_lifted = EdData::new(extension.space(), lifted_m, extension.lift_process(ed.d())).expect("shapes match");
    let field_lifted = field.lift(|x| extension.lift(x));
    CoxFixture {
        base,
        lambda,
        q,
        field,
        extension,
        ed,
        ed_lifted,
        field_lifted,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::construction::is_submartingale;
    use crate::hypotheses::{check_h, check_hp, classify, verify_ed};
    use crate::random_time::conditional_distribution;

    #[test]
    fn replay_is_identical() {
        assert_eq!(random_scenario(7), random_scenario(7));
        let a = predictable_scenario(3, true);
        let b = predictable_scenario(3, true);
        assert_eq!(a.field, b.field);
    }

    #[test]
    fn submartingales_are_valid() {
        for seed in 0..40 {
            let mut r = rng(seed);
            let space = random_space(&mut r);
            for (z, p) in [(false, false), (true, false), (true, true)] {
                let f = random_submartingale(&mut r, &space, z, p);
                assert!(is_submartingale(&space, &f), "seed {seed}");
                assert!(f.terminal().values().iter().all(One::is_one));
                if p {
                    assert!((1..space.slots()).all(|t| f.at(t).is_positive()));
                }
            }
        }
    }

    #[test]
    fn honest_generator_is_honest() {
        for seed in 0..200 {
            let (space, tau) = honest_scenario(seed);
            assert!(classify(&space, &tau).honest.is_pass(), "seed {seed}");
        }
    }

    #[test]
    fn independent_generator_is_immersed() {
        for seed in 0..50 {
            let (space, tau) = independent_scenario(seed);
            let field = conditional_distribution(&space, &tau);
            assert!(check_h(&space, &field).is_pass(), "seed {seed}");
        }
    }

    #[test]
    fn cox_density_verifies() {
        for seed in 0..30 {
            let fx = cox_scenario(seed);
            assert!(verify_ed(&fx.base, &fx.field, &fx.ed).is_pass(), "seed {seed}");
            let space = fx.extension.space();
            let realized = conditional_distribution(space, fx.extension.tau());
            assert_eq!(realized, fx.field_lifted);
            assert!(verify_ed(space, &realized, &fx.ed_lifted).is_pass());
        }
    }

    #[test]
    fn predictable_fields_satisfy_hp() {
        for seed in 0..30 {
            let c = predictable_scenario(seed, false);
            assert!(check_hp(&c.base, &c.field).is_pass(), "seed {seed}");
        }
    }
}
