use num_traits::{One, Signed, Zero};

use crate::error::Result;
use crate::scalar::{abs_rational, parse_rational, rational_to_f64, Rational};

/// A quantization parameter with its constant `k`:
/// the least `k ≥ 0` with `|τ| + |1 − τ| ≤ 2^k`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct TauParams {
    tau: Rational,
    k: u32,
}

impl TauParams {
    pub fn new(tau: Rational) -> Self {
        let s = abs_rational(&tau) + abs_rational(&(Rational::one() - &tau));
        let mut k = 0;
        let mut p = Rational::one();
        while p < s {
            p *= Rational::from_integer(2.into());
            k += 1;
        }
        TauParams { tau, k }
    }

    pub fn parse(s: &str) -> Result<Self> {
        Ok(Self::new(parse_rational(s)?))
    }

    pub fn tau(&self) -> &Rational {
        &self.tau
    }

    pub fn k(&self) -> u32 {
        self.k
    }

    pub fn to_f64(&self) -> f64 {
        rational_to_f64(&self.tau)
    }

    /// `m' = m L^k`.
    pub fn m_prime(&self, m: f64, l: f64) -> f64 {
        use num_traits::Float;
        m * Float::powi(l, self.k as i32)
    }

    pub fn in_unit_interval(&self) -> bool {
        !self.tau.is_negative() && self.tau <= Rational::one()
    }

    pub fn is_left(&self) -> bool {
        self.tau.is_zero()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn k_vanishes_exactly_on_unit_interval() {
        for (s, k) in
            [("0", 0), ("1/3", 0), ("1/2", 0), ("1", 0), ("2", 2), ("-1", 2), ("3/2", 1), ("-1/2", 1), ("5", 4)]
        {
            let t = TauParams::parse(s).unwrap();
            assert_eq!(t.k(), k, "tau = {s}");
            assert_eq!(t.k() == 0, t.in_unit_interval());
        }
        assert_eq!(TauParams::parse("2").unwrap().m_prime(1.5, 2.0), 6.0);
    }
}
