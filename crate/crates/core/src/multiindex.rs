//! Multi-indices and the exact integer combinatorics built on them.

use alloc::vec;
use alloc::vec::Vec;
use core::fmt;
use core::ops::{Add, Sub};

use num_bigint::BigInt;
use num_traits::One;

use crate::error::{Error, Result};

#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Default)]
pub struct MultiIndex(pub Vec<u32>);

impl fmt::Debug for MultiIndex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:?}", self.0)
    }
}

impl MultiIndex {
    pub fn zero(d: usize) -> Self {
        MultiIndex(vec![0; d])
    }

    pub fn unit(d: usize, i: usize) -> Self {
        let mut v = vec![0; d];
        v[i] = 1;
        MultiIndex(v)
    }

    pub fn dim(&self) -> usize {
        self.0.len()
    }

    /// `|α| = α₁ + … + α_d`.
    pub fn order(&self) -> u32 {
        self.0.iter().sum()
    }

    pub fn is_zero(&self) -> bool {
        self.0.iter().all(|&a| a == 0)
    }

    /// Componentwise `self ≤ other`.
    pub fn le(&self, other: &Self) -> bool {
        self.0.iter().zip(&other.0).all(|(a, b)| a <= b)
    }

    pub fn checked_sub(&self, other: &Self) -> Option<Self> {
        self.0.iter().zip(&other.0).map(|(a, b)| a.checked_sub(*b)).collect::<Option<Vec<_>>>().map(MultiIndex)
    }

    pub fn componentwise_min(&self, other: &Self) -> Self {
        MultiIndex(self.0.iter().zip(&other.0).map(|(a, b)| *a.min(b)).collect())
    }

    /// `α! = α₁!⋯α_d!`.
    pub fn factorial(&self) -> BigInt {
        self.0.iter().map(|&a| factorial(a)).product()
    }

    /// `C(α, β) = Π C(α_i, β_i)`; fails unless `β ≤ α`.
    pub fn binomial(&self, beta: &Self) -> Result<BigInt> {
        if self.dim() != beta.dim() || !beta.le(self) {
            return Err(Error::Binomial { alpha: self.0.clone(), beta: beta.0.clone() });
        }
        Ok(self.0.iter().zip(&beta.0).map(|(&a, &b)| binomial(a, b)).product())
    }

    /// Multinomial `|α|! / α!`.
    pub fn multinomial(&self) -> BigInt {
        factorial(self.order()) / self.factorial()
    }

    /// All multi-indices `β ≤ self` in lexicographic order.
    pub fn below(&self) -> BoxIter {
        BoxIter::new(self.clone())
    }
}

impl Add for &MultiIndex {
    type Output = MultiIndex;
    fn add(self, rhs: &MultiIndex) -> MultiIndex {
        MultiIndex(self.0.iter().zip(&rhs.0).map(|(a, b)| a + b).collect())
    }
}

impl Sub for &MultiIndex {
    type Output = MultiIndex;
    /// Panics unless `rhs ≤ self`; use [`MultiIndex::checked_sub`] otherwise.
    fn sub(self, rhs: &MultiIndex) -> MultiIndex {
        self.checked_sub(rhs).expect("multi-index subtraction underflow")
    }
}

impl From<Vec<u32>> for MultiIndex {
    fn from(v: Vec<u32>) -> Self {
        MultiIndex(v)
    }
}

pub fn factorial(n: u32) -> BigInt {
    (2..=n).fold(BigInt::one(), |acc, k| acc * BigInt::from(k))
}

pub fn binomial(n: u32, k: u32) -> BigInt {
    if k > n {
        return BigInt::from(0);
    }
    let k = k.min(n - k);
    let mut acc = BigInt::one();
    for i in 0..k {
        acc = acc * BigInt::from(n - i) / BigInt::from(i + 1);
    }
    acc
}

/// Iterator over `{β : β ≤ bound}`.
pub struct BoxIter {
    bound: MultiIndex,
    next: Option<MultiIndex>,
}

impl BoxIter {
    fn new(bound: MultiIndex) -> Self {
        let next = Some(MultiIndex::zero(bound.dim()));
        BoxIter { bound, next }
    }
}

impl Iterator for BoxIter {
    type Item = MultiIndex;

    fn next(&mut self) -> Option<MultiIndex> {
        let current = self.next.take()?;
        let mut succ = current.clone();
        let mut i = succ.dim();
        loop {
            if i == 0 {
                break;
            }
            i -= 1;
            if succ.0[i] < self.bound.0[i] {
                succ.0[i] += 1;
                for s in succ.0.iter_mut().skip(i + 1) {
                    *s = 0;
                }
                self.next = Some(succ);
                break;
            }
        }
        Some(current)
    }
}

/// All multi-indices of length `d` with `|α| = k`, first coordinate
/// descending (`(2,0), (1,1), (0,2)`).
pub fn exact_order(d: usize, k: u32) -> Vec<MultiIndex> {
    let mut out = Vec::new();
    let mut cur = vec![0u32; d];
    fill(d, 0, k, &mut cur, &mut out);
    out
}

fn fill(d: usize, pos: usize, remaining: u32, cur: &mut Vec<u32>, out: &mut Vec<MultiIndex>) {
    if d == 0 {
        if remaining == 0 {
            out.push(MultiIndex(Vec::new()));
        }
        return;
    }
    if pos == d - 1 {
        cur[pos] = remaining;
        out.push(MultiIndex(cur.clone()));
        return;
    }
    for a in (0..=remaining).rev() {
        cur[pos] = a;
        fill(d, pos + 1, remaining - a, cur, out);
    }
    cur[pos] = 0;
}

/// All multi-indices with `|α| ≤ total` in graded order.
pub fn iterate_upto(d: usize, total: u32) -> impl Iterator<Item = MultiIndex> {
    (0..=total).flat_map(move |k| exact_order(d, k))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn mi(v: &[u32]) -> MultiIndex {
        MultiIndex(v.to_vec())
    }

    #[test]
    fn factorial_and_binomial() {
        assert_eq!(mi(&[2, 1]).factorial(), BigInt::from(2));
        assert_eq!(mi(&[3, 2]).binomial(&mi(&[1, 1])).unwrap(), BigInt::from(6));
        assert!(mi(&[1, 2]).binomial(&mi(&[2, 0])).is_err());
        assert_eq!(mi(&[2, 1]).multinomial(), BigInt::from(3));
    }

    #[test]
    fn graded_enumeration_d2() {
        let got: Vec<_> = iterate_upto(2, 2).collect();
        let want = [[0, 0], [1, 0], [0, 1], [2, 0], [1, 1], [0, 2]];
        assert_eq!(got.len(), 6);
        for (g, w) in got.iter().zip(want.iter()) {
            assert_eq!(g.0, w.to_vec());
        }
    }

    #[test]
    fn box_iteration_counts() {
        assert_eq!(mi(&[2, 1, 3]).below().count(), 3 * 2 * 4);
        assert_eq!(mi(&[]).below().count(), 1);
        let all: Vec<_> = mi(&[1, 1]).below().collect();
        assert_eq!(all, vec![mi(&[0, 0]), mi(&[0, 1]), mi(&[1, 0]), mi(&[1, 1])]);
    }

    #[test]
    fn exact_order_counts() {
        // C(k + d - 1, d - 1)
        assert_eq!(exact_order(3, 4).len(), 15);
        assert_eq!(exact_order(1, 5).len(), 1);
    }
}
