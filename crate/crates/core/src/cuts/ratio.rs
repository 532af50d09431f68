use std::cmp::Ordering;
use std::hash::{Hash, Hasher};

use num_rational::Rational64;
use serde::{Deserialize, Serialize};

/// A nonnegative ratio `num / den` kept as integers.
///
/// Equality and ordering are by value (cross-multiplication in 128 bits), so
/// `8/8 == 1/1`; use [`ExactRatio::reduced`] for a canonical representative.
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct ExactRatio {
    pub num: u64,
    pub den: u64,
}

impl ExactRatio {
    pub fn new(num: u64, den: u64) -> Self {
        assert!(den >= 1, "ratio with zero denominator");
        Self { num, den }
    }

    pub fn zero() -> Self {
        Self { num: 0, den: 1 }
    }

    pub fn reduced(self) -> Self {
        let g = gcd(self.num, self.den);
        Self {
            num: self.num / g,
            den: self.den / g,
        }
    }

    pub fn to_f64(self) -> f64 {
        self.num as f64 / self.den as f64
    }

    pub fn to_rational(self) -> Rational64 {
        Rational64::new(self.num as i64, self.den as i64)
    }
}

fn gcd(mut a: u64, mut b: u64) -> u64 {
    while b != 0 {
        (a, b) = (b, a % b);
    }
    a.max(1)
}

impl PartialEq for ExactRatio {
    fn eq(&self, other: &Self) -> bool {
        self.cmp(other) == Ordering::Equal
    }
}

impl Eq for ExactRatio {}

impl Ord for ExactRatio {
    fn cmp(&self, other: &Self) -> Ordering {
        (self.num as u128 * other.den as u128).cmp(&(other.num as u128 * self.den as u128))
    }
}

impl PartialOrd for ExactRatio {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Hash for ExactRatio {
    fn hash<H: Hasher>(&self, state: &mut H) {
        let r = self.reduced();
        r.num.hash(state);
        r.den.hash(state);
    }
}

impl std::fmt::Display for ExactRatio {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{}/{}", self.num, self.den)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn value_semantics() {
        assert_eq!(ExactRatio::new(8, 8), ExactRatio::new(1, 1));
        assert_eq!(
            ExactRatio::new(12, 18).reduced(),
            ExactRatio { num: 2, den: 3 }
        );
        assert_eq!(ExactRatio::new(12, 18).reduced().num, 2);
        assert!(ExactRatio::new(1, 3) < ExactRatio::new(1, 2));
        assert_eq!(ExactRatio::new(0, 5).reduced().den, 1);
    }

    proptest! {
        #[test]
        fn order_matches_rationals(a in 0u64..10_000, b in 1u64..10_000, c in 0u64..10_000, d in 1u64..10_000) {
            let x = ExactRatio::new(a, b);
            let y = ExactRatio::new(c, d);
            prop_assert_eq!(x.cmp(&y), x.to_rational().cmp(&y.to_rational()));
        }
    }
}
