use std::ops::{Add, Index, Mul, Neg, Sub};

use num_traits::{One, Signed, Zero};

use crate::rational::Rational;

/// Atomwise values of a real random variable on a finite sample space.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct RandomVariable(Vec<Rational>);

impl RandomVariable {
    pub fn new(values: Vec<Rational>) -> Self {
        RandomVariable(values)
    }

    pub fn constant(n: usize, c: Rational) -> Self {
        RandomVariable(vec![c; n])
    }

    pub fn zero(n: usize) -> Self {
        Self::constant(n, Rational::zero())
    }

    pub fn one(n: usize) -> Self {
        Self::constant(n, Rational::one())
    }

    pub fn indicator<F: Fn(usize) -> bool>(n: usize, pred: F) -> Self {
        RandomVariable((0..n).map(|a| indicator_value(pred(a))).collect())
    }

    pub fn from_fn<F: FnMut(usize) -> Rational>(n: usize, f: F) -> Self {
        RandomVariable((0..n).map(f).collect())
    }

    pub fn values(&self) -> &[Rational] {
        &self.0
    }

    pub fn into_values(self) -> Vec<Rational> {
        self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn map<F: FnMut(&Rational) -> Rational>(&self, f: F) -> Self {
        RandomVariable(self.0.iter().map(f).collect())
    }

    pub fn zip_with<F: FnMut(&Rational, &Rational) -> Rational>(&self, other: &Self, mut f: F) -> Self {
        debug_assert_eq!(self.len(), other.len());
        RandomVariable(self.0.iter().zip(&other.0).map(|(a, b)| f(a, b)).collect())
    }

    pub fn scale(&self, c: &Rational) -> Self {
        self.map(|x| x * c)
    }

    pub fn is_zero(&self) -> bool {
        self.0.iter().all(Zero::is_zero)
    }

    pub fn is_nonnegative(&self) -> bool {
        self.0.iter().all(|x| !x.is_negative())
    }

    pub fn is_positive(&self) -> bool {
        self.0.iter().all(Signed::is_positive)
    }

    pub fn is_constant(&self) -> bool {
        self.0.windows(2).all(|w| w[0] == w[1])
    }
}

fn indicator_value(b: bool) -> Rational {
    if b {
        Rational::one()
    } else {
        Rational::zero()
    }
}

impl Index<usize> for RandomVariable {
    type Output = Rational;
    fn index(&self, i: usize) -> &Rational {
        &self.0[i]
    }
}

impl FromIterator<Rational> for RandomVariable {
    fn from_iter<I: IntoIterator<Item = Rational>>(iter: I) -> Self {
        RandomVariable(iter.into_iter().collect())
    }
}

macro_rules! binop {
    ($trait:ident, $method:ident, $op:tt) => {
        impl $trait<&RandomVariable> for &RandomVariable {
            type Output = RandomVariable;
            fn $method(self, rhs: &RandomVariable) -> RandomVariable {
                self.zip_with(rhs, |a, b| a $op b)
            }
        }
        impl $trait<RandomVariable> for RandomVariable {
            type Output = RandomVariable;
            fn $method(self, rhs: RandomVariable) -> RandomVariable {
                (&self).$method(&rhs)
            }
        }
        impl $trait<&RandomVariable> for RandomVariable {
            type Output = RandomVariable;
            fn $method(self, rhs: &RandomVariable) -> RandomVariable {
                (&self).$method(rhs)
            }
        }
    };
}

binop!(Add, add, +);
binop!(Sub, sub, -);
binop!(Mul, mul, *);

impl Neg for &RandomVariable {
    type Output = RandomVariable;
    fn neg(self) -> RandomVariable {
        self.map(|x| -x)
    }
}

impl Neg for RandomVariable {
    type Output = RandomVariable;
    fn neg(self) -> RandomVariable {
        -&self
    }
}
