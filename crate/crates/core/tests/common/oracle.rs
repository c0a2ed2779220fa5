//! Brute-force reference computations written without the library's machinery:
//! plain vectors, explicit block sums, random times as `Option<usize>` (`None` = ∞).

#![allow(dead_code)]

use num_bigint::BigInt;
use num_rational::BigRational as Q;
use num_traits::{One, Zero};

pub fn q(n: i64, d: i64) -> Q {
    Q::new(BigInt::from(n), BigInt::from(d))
}

pub struct Toy {
    pub prob: Vec<Q>,
    /// `levels[t]` is the list of blocks of `F_t`, `t = 0..=T`.
    pub levels: Vec<Vec<Vec<usize>>>,
    pub tau: Vec<Option<usize>>,
}

impl Toy {
    pub fn n(&self) -> usize {
        self.prob.len()
    }

    pub fn horizon(&self) -> usize {
        self.levels.len() - 1
    }

    fn block_of(blocks: &[Vec<usize>], a: usize) -> &Vec<usize> {
        blocks.iter().find(|b| b.contains(&a)).expect("atom covered")
    }

    /// Average of `x` over the block of `blocks` holding `a`.
    pub fn avg(&self, blocks: &[Vec<usize>], x: &[Q], a: usize) -> Q {
        let b = Self::block_of(blocks, a);
        let mut num = Q::zero();
        let mut den = Q::zero();
        for &w in b {
            num += &x[w] * &self.prob[w];
            den += &self.prob[w];
        }
        num / den
    }

    pub fn cond(&self, t: usize, x: &[Q]) -> Vec<Q> {
        let blocks = &self.levels[t];
        (0..self.n()).map(|a| self.avg(blocks, x, a)).collect()
    }

    fn tau_le(&self, a: usize, t: usize) -> bool {
        matches!(self.tau[a], Some(s) if s <= t)
    }

    /// `G_t = P(τ > t | F_t)` for `t = 0..=T`.
    pub fn azema_g(&self) -> Vec<Vec<Q>> {
        (0..=self.horizon())
            .map(|t| {
                let ind: Vec<Q> = (0..self.n())
                    .map(|a| if self.tau_le(a, t) { Q::zero() } else { Q::one() })
                    .collect();
                self.cond(t, &ind)
            })
            .collect()
    }

    /// `ΔA_t = -E[G_t - G_{t-1} | F_{t-1}]` for `t = 1..=T`, index 0 left at zero.
    pub fn doob_increments(&self) -> Vec<Vec<Q>> {
        let g = self.azema_g();
        let mut out = vec![vec![Q::zero(); self.n()]];
        for t in 1..=self.horizon() {
            let diff: Vec<Q> = (0..self.n()).map(|a| &g[t - 1][a] - &g[t][a]).collect();
            out.push(self.cond(t - 1, &diff));
        }
        out
    }

    /// `M_t = G_t + A_t` for `t = 0..=T`.
    pub fn doob_martingale(&self) -> Vec<Vec<Q>> {
        let g = self.azema_g();
        let da = self.doob_increments();
        let mut acc = vec![Q::zero(); self.n()];
        (0..=self.horizon())
            .map(|t| {
                for a in 0..self.n() {
                    acc[a] += &da[t][a];
                }
                (0..self.n()).map(|a| &g[t][a] + &acc[a]).collect()
            })
            .collect()
    }

    /// Jeulin–Yor compensator `Σ_{1≤u≤t∧τ} ΔA_u / G_{u-1}` evaluated per atom, `t = 0..=T`.
    pub fn jeulin_yor(&self) -> Vec<Vec<Q>> {
        let g = self.azema_g();
        let da = self.doob_increments();
        (0..=self.horizon())
            .map(|t| {
                (0..self.n())
                    .map(|a| {
                        let stop = self.tau[a].map_or(t, |s| s.min(t));
                        let mut acc = Q::zero();
                        for u in 1..=stop {
                            acc += &da[u][a] / &g[u - 1][a];
                        }
                        acc
                    })
                    .collect()
            })
            .collect()
    }

    /// Blocks of the progressive enlargement at `t`: same `F_t` block and same `τ` value if
    /// `τ ≤ t`, or both `τ > t`.
    pub fn progressive_blocks(&self, t: usize) -> Vec<Vec<usize>> {
        let mut blocks: Vec<Vec<usize>> = Vec::new();
        for a in 0..self.n() {
            let fa = Self::block_of(&self.levels[t], a);
            let key = if self.tau_le(a, t) { self.tau[a] } else { None };
            let found = blocks.iter_mut().find(|b| {
                let w = b[0];
                let kw = if self.tau_le(w, t) { self.tau[w] } else { None };
                fa.contains(&w) && kw == key
            });
            match found {
                Some(b) => b.push(a),
                None => blocks.push(vec![a]),
            }
        }
        blocks
    }

    /// Blocks of `F_t ∨ σ(τ)`.
    pub fn initial_blocks(&self, t: usize) -> Vec<Vec<usize>> {
        let mut blocks: Vec<Vec<usize>> = Vec::new();
        for a in 0..self.n() {
            let fa = Self::block_of(&self.levels[t], a);
            match blocks.iter_mut().find(|b| fa.contains(&b[0]) && self.tau[b[0]] == self.tau[a]) {
                Some(b) => b.push(a),
                None => blocks.push(vec![a]),
            }
        }
        blocks
    }

    /// Martingale check of `x[t]`, `t = 0..=T`, against progressive-enlargement blocks.
    /// The `∞` step is vacuous for processes that are constant after `T`.
    pub fn is_g_martingale(&self, x: &[Vec<Q>]) -> bool {
        (1..=self.horizon()).all(|t| {
            let blocks = self.progressive_blocks(t - 1);
            (0..self.n()).all(|a| self.avg(&blocks, &x[t], a) == x[t - 1][a])
        })
    }

    /// `H_t = 1_{τ ≤ t}`, `t = 0..=T`.
    pub fn indicator_h(&self) -> Vec<Vec<Q>> {
        (0..=self.horizon())
            .map(|t| {
                (0..self.n())
                    .map(|a| if self.tau_le(a, t) { Q::one() } else { Q::zero() })
                    .collect()
            })
            .collect()
    }
}

/// The four-atom fixture: uniform weights, `F_1 = {{a,b},{c,d}}`, `τ = (1, 2, 2, ∞)`.
pub fn s1() -> Toy {
    Toy {
        prob: vec![q(1, 4); 4],
        levels: vec![
            vec![vec![0, 1, 2, 3]],
            vec![vec![0, 1], vec![2, 3]],
            vec![vec![0], vec![1], vec![2], vec![3]],
        ],
        tau: vec![Some(1), Some(2), Some(2), None],
    }
}

impl Toy {
    /// `E[x | G_t]` by averaging over progressive-enlargement blocks.
    pub fn g_cond(&self, t: usize, x: &[Q]) -> Vec<Q> {
        let blocks = self.progressive_blocks(t);
        (0..self.n()).map(|a| self.avg(&blocks, x, a)).collect()
    }

    /// `E[x]`.
    pub fn mean(&self, x: &[Q]) -> Q {
        x.iter().zip(&self.prob).map(|(v, p)| v * p).sum()
    }
}
