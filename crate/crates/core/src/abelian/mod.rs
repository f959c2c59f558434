//! Finite abelian groups `Z/m1 × Z/m2` standing in for an elliptic curve.

mod snf;
mod solve;
mod weierstrass;

pub use snf::{smith_normal_form, SnfResult};
pub use solve::{brute_force_solutions, solve_group_system, GroupSolution};
pub use weierstrass::{weierstrass_group, CurvePoint, WeierstrassGroup};

use std::fmt;

use num_integer::Integer;
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum AbelianError {
    #[error("invalid group model ({m1}, {m2}): need 1 <= m1 and m1 | m2")]
    InvalidModel { m1: i64, m2: i64 },
    #[error("curve y^2 = x^3 + {a}x + {b} is singular mod {p}")]
    SingularCurve { p: i64, a: i64, b: i64 },
    #[error("{0} is not an odd prime")]
    NotOddPrime(i64),
    #[error("prime {0} is above the enumeration limit")]
    PrimeTooLarge(i64),
}

/// A point of the model, as residues `(a mod m1, b mod m2)`.
#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Debug, Default)]
pub struct GroupElement {
    pub a: i64,
    pub b: i64,
}

impl GroupElement {
    pub const ZERO: GroupElement = GroupElement { a: 0, b: 0 };

    pub fn new(a: i64, b: i64) -> Self {
        Self { a, b }
    }

    pub fn is_zero(&self) -> bool {
        self.a == 0 && self.b == 0
    }
}

impl fmt::Display for GroupElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({},{})", self.a, self.b)
    }
}

#[derive(Clone, Copy, PartialEq, Eq, Hash, Debug)]
pub struct SigmaModel {
    m1: i64,
    m2: i64,
}

impl SigmaModel {
    pub fn new(m1: i64, m2: i64) -> Result<Self, AbelianError> {
        if m1 < 1 || m2 < 1 || m2 % m1 != 0 {
            return Err(AbelianError::InvalidModel { m1, m2 });
        }
        Ok(Self { m1, m2 })
    }

    /// Cyclic group of order `m`.
    pub fn cyclic(m: i64) -> Self {
        Self::new(1, m).expect("m >= 1")
    }

    pub fn m1(&self) -> i64 {
        self.m1
    }

    pub fn m2(&self) -> i64 {
        self.m2
    }

    pub fn order(&self) -> usize {
        (self.m1 * self.m2) as usize
    }

    pub fn zero(&self) -> GroupElement {
        GroupElement::ZERO
    }

    pub fn element(&self, a: i64, b: i64) -> GroupElement {
        GroupElement::new(a.rem_euclid(self.m1), b.rem_euclid(self.m2))
    }

    pub fn add(&self, x: GroupElement, y: GroupElement) -> GroupElement {
        self.element(x.a + y.a, x.b + y.b)
    }

    pub fn sub(&self, x: GroupElement, y: GroupElement) -> GroupElement {
        self.element(x.a - y.a, x.b - y.b)
    }

    pub fn neg(&self, x: GroupElement) -> GroupElement {
        self.element(-x.a, -x.b)
    }

    pub fn scale(&self, k: i64, x: GroupElement) -> GroupElement {
        self.element(k.rem_euclid(self.m1) * x.a, k.rem_euclid(self.m2) * x.b)
    }

    /// `Σ coeffs[i]·xs[i]`.
    pub fn combine(&self, coeffs: &[i64], xs: &[GroupElement]) -> GroupElement {
        assert_eq!(coeffs.len(), xs.len());
        coeffs
            .iter()
            .zip(xs)
            .fold(self.zero(), |acc, (&k, &x)| self.add(acc, self.scale(k, x)))
    }

    pub fn sum(&self, xs: &[GroupElement]) -> GroupElement {
        xs.iter().fold(self.zero(), |acc, &x| self.add(acc, x))
    }

    /// All elements, `a`-major.
    pub fn elements(&self) -> impl Iterator<Item = GroupElement> + '_ {
        (0..self.m1).flat_map(move |a| (0..self.m2).map(move |b| GroupElement::new(a, b)))
    }

    /// Dense index in `0..order()`, consistent with [`Self::elements`].
    pub fn index(&self, x: GroupElement) -> usize {
        (x.a * self.m2 + x.b) as usize
    }

    pub fn from_index(&self, i: usize) -> GroupElement {
        let i = i as i64;
        GroupElement::new(i / self.m2, i % self.m2)
    }

    pub fn element_order(&self, x: GroupElement) -> i64 {
        let oa = self.m1 / x.a.gcd(&self.m1);
        let ob = self.m2 / x.b.gcd(&self.m2);
        oa.lcm(&ob)
    }

    /// Elements killed by `n`.
    pub fn torsion(&self, n: i64) -> Vec<GroupElement> {
        self.elements().filter(|&x| self.scale(n, x).is_zero()).collect()
    }

    pub fn torsion_count(&self, n: i64) -> usize {
        (n.gcd(&self.m1) * n.gcd(&self.m2)) as usize
    }

    /// All tuples in `Σ^k`, in lexicographic index order.
    pub fn tuples(&self, k: usize) -> TupleIter {
        TupleIter {
            sigma: *self,
            current: Some(vec![0; k]),
        }
    }

    pub fn tuple_from_indices(&self, idx: &[usize]) -> Vec<GroupElement> {
        idx.iter().map(|&i| self.from_index(i)).collect()
    }
}

impl fmt::Display for SigmaModel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Z/{} x Z/{}", self.m1, self.m2)
    }
}

/// Odometer over `Σ^k`.
pub struct TupleIter {
    sigma: SigmaModel,
    current: Option<Vec<usize>>,
}

impl Iterator for TupleIter {
    type Item = Vec<GroupElement>;

    fn next(&mut self) -> Option<Self::Item> {
        let cur = self.current.as_mut()?;
        let out = self.sigma.tuple_from_indices(cur);
        let n = self.sigma.order();
        let mut carry = true;
        for slot in cur.iter_mut().rev() {
            *slot += 1;
            if *slot < n {
                carry = false;
                break;
            }
            *slot = 0;
        }
        if carry {
            self.current = None;
        }
        Some(out)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn models() {
        let k = SigmaModel::new(2, 2).unwrap();
        assert_eq!(k.order(), 4);
        assert_eq!(k.torsion(2).len(), 4);
        assert_eq!(SigmaModel::new(1, 5).unwrap().order(), 5);
        assert_eq!(SigmaModel::new(3, 3).unwrap().torsion(3).len(), 9);
        assert!(SigmaModel::new(2, 3).is_err());
        assert!(SigmaModel::new(0, 3).is_err());
    }

    #[test]
    fn torsion_counts_agree() {
        for (m1, m2) in [(1, 1), (1, 6), (2, 4), (3, 6), (2, 2), (5, 5)] {
            let s = SigmaModel::new(m1, m2).unwrap();
            for n in 1..8 {
                assert_eq!(s.torsion(n).len(), s.torsion_count(n));
            }
        }
    }

    #[test]
    fn tuples_cover_power() {
        let s = SigmaModel::new(2, 2).unwrap();
        let all: Vec<_> = s.tuples(3).collect();
        assert_eq!(all.len(), 64);
        assert_eq!(s.tuples(0).count(), 1);
    }

    #[test]
    fn index_roundtrip() {
        let s = SigmaModel::new(3, 6).unwrap();
        for (i, x) in s.elements().enumerate() {
            assert_eq!(s.index(x), i);
            assert_eq!(s.from_index(i), x);
            assert_eq!(s.scale(s.element_order(x), x), s.zero());
        }
    }
}
