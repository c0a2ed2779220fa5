//! Partitions of a finite atom set and refining chains of them.

use std::collections::BTreeMap;

use crate::error::{Error, Result};
use crate::rational::Rational;

use super::RandomVariable;

/// A partition of `0..n`, blocks sorted internally and ordered by smallest atom.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Partition {
    blocks: Vec<Vec<usize>>,
    block_of: Vec<usize>,
}

impl Partition {
    pub fn new(n: usize, blocks: Vec<Vec<usize>>) -> std::result::Result<Self, String> {
        let mut block_of = vec![usize::MAX; n];
        for (b, block) in blocks.iter().enumerate() {
            if block.is_empty() {
                return Err("empty block".into());
            }
            for &a in block {
                if a >= n {
                    return Err(format!("atom index {a} out of range"));
                }
                if block_of[a] != usize::MAX {
                    return Err(format!("atom {a} appears twice"));
                }
                block_of[a] = b;
            }
        }
        if let Some(a) = block_of.iter().position(|&b| b == usize::MAX) {
            return Err(format!("atom {a} is not covered"));
        }
        Ok(Self::from_assignment(&block_of))
    }

    /// Groups atoms by an arbitrary key; blocks come out ordered by smallest atom.
    pub fn from_key<K: Ord, F: Fn(usize) -> K>(n: usize, key: F) -> Self {
        let mut ids: BTreeMap<K, usize> = BTreeMap::new();
        let mut raw = Vec::with_capacity(n);
        for a in 0..n {
            let next = ids.len();
            raw.push(*ids.entry(key(a)).or_insert(next));
        }
        Self::from_assignment(&raw)
    }

    fn from_assignment(raw: &[usize]) -> Self {
        let mut relabel: BTreeMap<usize, usize> = BTreeMap::new();
        let mut blocks: Vec<Vec<usize>> = Vec::new();
        let mut block_of = Vec::with_capacity(raw.len());
        for (a, r) in raw.iter().enumerate() {
            let id = *relabel.entry(*r).or_insert_with(|| {
                blocks.push(Vec::new());
                blocks.len() - 1
            });
            blocks[id].push(a);
            block_of.push(id);
        }
        Partition { blocks, block_of }
    }

    pub fn trivial(n: usize) -> Self {
        Self::from_key(n, |_| 0)
    }

    pub fn discrete(n: usize) -> Self {
        Self::from_key(n, |a| a)
    }

    pub fn n_atoms(&self) -> usize {
        self.block_of.len()
    }

    pub fn blocks(&self) -> &[Vec<usize>] {
        &self.blocks
    }

    pub fn block_of(&self, atom: usize) -> usize {
        self.block_of[atom]
    }

    pub fn block_containing(&self, atom: usize) -> &[usize] {
        &self.blocks[self.block_of[atom]]
    }

    /// Every block of `self` sits inside a block of `coarser`.
    pub fn refines(&self, coarser: &Partition) -> bool {
        self.blocks.iter().all(|b| {
            let target = coarser.block_of(b[0]);
            b.iter().all(|&a| coarser.block_of(a) == target)
        })
    }

    /// Coarsest common refinement.
    pub fn join(&self, other: &Partition) -> Partition {
        Self::from_key(self.n_atoms(), |a| (self.block_of(a), other.block_of(a)))
    }

    /// Nonempty intersections of blocks with `event`, as sorted atom lists.
    pub fn trace(&self, event: &[bool]) -> Vec<Vec<usize>> {
        self.blocks
            .iter()
            .map(|b| b.iter().copied().filter(|&a| event[a]).collect::<Vec<_>>())
            .filter(|b| !b.is_empty())
            .collect()
    }

    /// First block on which `x` is not constant.
    pub fn non_constant_block(&self, x: &RandomVariable) -> Option<usize> {
        self.blocks
            .iter()
            .position(|b| b.iter().any(|&a| x[a] != x[b[0]]))
    }

    pub fn is_measurable(&self, x: &RandomVariable) -> bool {
        self.non_constant_block(x).is_none()
    }

    /// Block averages of `x` under the weights `prob`.
    pub fn average(&self, prob: &[Rational], x: &RandomVariable) -> RandomVariable {
        let means: Vec<Rational> = self
            .blocks
            .iter()
            .map(|b| {
                let (num, den) = b.iter().fold(
                    (Rational::default(), Rational::default()),
                    |(num, den), &a| (num + &x[a] * &prob[a], den + &prob[a]),
                );
                num / den
            })
            .collect();
        RandomVariable::new(self.block_of.iter().map(|&b| means[b].clone()).collect())
    }
}

/// A refining chain of partitions indexed by `0..=T`; slot `T + 1` stands for `∞` and reuses level `T`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Filtration {
    levels: Vec<Partition>,
}

impl Filtration {
    pub fn new(levels: Vec<Partition>) -> Result<Self> {
        if levels.is_empty() {
            return Err(Error::ShapeMismatch {
                what: "filtration levels".into(),
                expected: 1,
                found: 0,
            });
        }
        let n = levels[0].n_atoms();
        for (level, p) in levels.iter().enumerate() {
            if p.n_atoms() != n {
                return Err(Error::InvalidPartition {
                    level,
                    reason: format!("covers {} atoms, expected {n}", p.n_atoms()),
                });
            }
        }
        for level in 1..levels.len() {
            if !levels[level].refines(&levels[level - 1]) {
                return Err(Error::PartitionNotRefining { level });
            }
        }
        Ok(Filtration { levels })
    }

    pub fn horizon(&self) -> usize {
        self.levels.len() - 1
    }

    pub fn n_atoms(&self) -> usize {
        self.levels[0].n_atoms()
    }

    pub fn levels(&self) -> &[Partition] {
        &self.levels
    }

    /// The σ-field at slot `t` (`∞` maps to `T`).
    pub fn at(&self, slot: usize) -> &Partition {
        &self.levels[slot.min(self.horizon())]
    }

    /// The σ-field just before slot `t`: `F_{t-1}`, with `F_{0-} = F_0` and `F_{∞-} = F_T`.
    pub fn before(&self, slot: usize) -> &Partition {
        self.at(slot.saturating_sub(1))
    }

    /// Levelwise refinement: `self_t ⊇ other_t` as σ-fields.
    pub fn contains(&self, other: &Filtration) -> bool {
        self.levels.len() == other.levels.len()
            && self
                .levels
                .iter()
                .zip(&other.levels)
                .all(|(a, b)| a.refines(b))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::{int, ratio};

    #[test]
    fn normalizes_block_order() {
        let p = Partition::new(4, vec![vec![3, 2], vec![1, 0]]).unwrap();
        assert_eq!(p.blocks(), &[vec![0, 1], vec![2, 3]]);
        assert_eq!(p.block_of(2), 1);
    }

    #[test]
    fn rejects_bad_partitions() {
        assert!(Partition::new(3, vec![vec![0, 1]]).is_err());
        assert!(Partition::new(3, vec![vec![0, 1], vec![1, 2]]).is_err());
        assert!(Partition::new(2, vec![vec![0, 1], vec![]]).is_err());
    }

    #[test]
    fn join_and_refine() {
        let a = Partition::new(4, vec![vec![0, 1], vec![2, 3]]).unwrap();
        let b = Partition::new(4, vec![vec![0, 2], vec![1, 3]]).unwrap();
        let j = a.join(&b);
        assert_eq!(j, Partition::discrete(4));
        assert!(j.refines(&a) && j.refines(&b));
        assert!(!a.refines(&b));
        assert!(a.refines(&Partition::trivial(4)));
    }

    #[test]
    fn block_average() {
        let p = Partition::new(3, vec![vec![0, 1], vec![2]]).unwrap();
        let prob = vec![ratio(1, 4), ratio(1, 4), ratio(1, 2)];
        let x = RandomVariable::new(vec![int(1), int(3), int(5)]);
        let y = p.average(&prob, &x);
        assert_eq!(y.values(), &[int(2), int(2), int(5)]);
    }

    #[test]
    fn filtration_must_refine() {
        let coarse = Partition::new(2, vec![vec![0], vec![1]]).unwrap();
        let fine = Partition::trivial(2);
        assert_eq!(
            Filtration::new(vec![coarse, fine]),
            Err(Error::PartitionNotRefining { level: 1 })
        );
    }
}
