//! Exact combinatorial numbers: factorials, odd double factorials, Catalan
//! numbers and the Rémy attachment count.

use num_bigint::BigInt;
use num_traits::One;

use crate::error::{invalid, Result};
use crate::rational::BigRat;

/// Memoized odd double factorials `(2n-1)!!`, starting from `(-1)!! = 1`.
#[derive(Debug, Clone)]
pub struct DoubleFactorialTable {
    // values[n] = (2n-1)!!
    values: Vec<BigInt>,
}

impl Default for DoubleFactorialTable {
    fn default() -> Self {
        Self::new()
    }
}

impl DoubleFactorialTable {
    pub fn new() -> Self {
        Self {
            values: vec![BigInt::one()],
        }
    }

    /// `m!!` for odd `m >= -1`.
    pub fn get(&mut self, m: i64) -> Result<&BigInt> {
        check_odd(m)?;
        let n = ((m + 1) / 2) as usize;
        while self.values.len() <= n {
            let next = 2 * self.values.len() as u64 - 1;
            let v = self.values.last().unwrap() * next;
            self.values.push(v);
        }
        Ok(&self.values[n])
    }
}

fn check_odd(m: i64) -> Result<()> {
    if m < -1 || m.rem_euclid(2) == 0 {
        return invalid(format!("double factorial needs an odd argument >= -1, got {m}"));
    }
    Ok(())
}

/// `m!! = m (m-2) ... 1` for odd `m >= -1`, with `(-1)!! = 1`.
pub fn double_factorial(m: i64) -> Result<BigInt> {
    check_odd(m)?;
    Ok((1..=m.max(0)).step_by(2).fold(BigInt::one(), |acc, x| acc * x))
}

pub fn factorial(n: u64) -> BigInt {
    (2..=n).fold(BigInt::one(), |acc, x| acc * x)
}

pub fn binomial(n: u64, k: u64) -> BigInt {
    if k > n {
        return BigInt::ZERO;
    }
    let k = k.min(n - k);
    // Each partial product is itself a binomial coefficient, so the
    // division is exact.
    (0..k).fold(BigInt::one(), |acc, i| acc * (n - i) / (i + 1))
}

/// The `n`-th Catalan number, with the convention `Cat_{-1} = 1`.
pub fn catalan(n: i64) -> Result<BigInt> {
    if n < -1 {
        return invalid(format!("catalan index must be >= -1, got {n}"));
    }
    if n <= 0 {
        return Ok(BigInt::one());
    }
    let n = n as u64;
    Ok(binomial(2 * n, n) / (n + 1))
}

/// Number of ways to attach `k3` labelled leaves one by one (Rémy insertion)
/// to a planted binary tree with `2 k1` leaves.
///
/// For `k1 >= 1` this is the product of the available edge sides at each
/// step. An empty starting tree (`k1 = 0`) has no edges, so the count comes
/// from the closed form instead.
pub fn remy_attachment_count(k1: u64, k3: u64) -> Result<BigInt> {
    if k3 == 0 {
        return invalid("remy_attachment_count needs k3 >= 1");
    }
    if k1 == 0 {
        // (2 k3 - 3)!! 2^(k3 - 1)
        let df = double_factorial(2 * k3 as i64 - 3)?;
        return Ok(df << (k3 - 1));
    }
    Ok((0..k3).fold(BigInt::one(), |acc, i| acc * (2 * (4 * k1 - 1 + 2 * i))))
}

/// `(4k1 + 2k3 - 3)!! 2^(2k1 + k3 - 1) / ((2k1)! Cat_{2k1 - 1})`.
pub fn remy_attachment_closed_form(k1: u64, k3: u64) -> Result<BigRat> {
    if k3 == 0 {
        return invalid("remy_attachment_closed_form needs k3 >= 1");
    }
    let df = double_factorial(4 * k1 as i64 + 2 * k3 as i64 - 3)?;
    let num = df << (2 * k1 + k3 - 1);
    let den = factorial(2 * k1) * catalan(2 * k1 as i64 - 1)?;
    Ok(BigRat::new(num, den))
}

/// `|T_k| = (2k)! Cat_{2k-1}`: planted binary trees with `2k` labelled leaves.
pub fn planted_tree_count(k: u64) -> BigInt {
    factorial(2 * k) * catalan(2 * k as i64 - 1).expect("index >= -1")
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn double_factorial_values() {
        assert_eq!(double_factorial(-1).unwrap(), BigInt::from(1));
        assert_eq!(double_factorial(1).unwrap(), BigInt::from(1));
        assert_eq!(double_factorial(7).unwrap(), BigInt::from(7 * 5 * 3));
        assert!(double_factorial(4).is_err());
        assert!(double_factorial(-3).is_err());
    }

    #[test]
    fn double_factorial_table_matches_direct() {
        let mut table = DoubleFactorialTable::new();
        for m in (-1..40).step_by(2) {
            assert_eq!(*table.get(m).unwrap(), double_factorial(m).unwrap());
        }
        assert!(table.get(2).is_err());
        // (2n-1)!! = (2n-1) (2n-3)!!
        for n in 1..20i64 {
            let lhs = table.get(2 * n - 1).unwrap().clone();
            let rhs = table.get(2 * n - 3).unwrap() * (2 * n - 1);
            assert_eq!(lhs, rhs);
        }
    }

    #[test]
    fn catalan_values() {
        assert_eq!(catalan(-1).unwrap(), BigInt::from(1));
        assert_eq!(catalan(0).unwrap(), BigInt::from(1));
        assert_eq!(catalan(5).unwrap(), BigInt::from(42));
        assert!(catalan(-2).is_err());
        // Segner recurrence
        for n in 0..25i64 {
            let rec: BigInt = (0..=n)
                .map(|i| catalan(i).unwrap() * catalan(n - i).unwrap())
                .sum();
            assert_eq!(rec, catalan(n + 1).unwrap());
        }
    }

    #[test]
    fn attachment_count_small() {
        assert_eq!(remy_attachment_count(1, 1).unwrap(), BigInt::from(6));
        assert_eq!(remy_attachment_count(1, 2).unwrap(), BigInt::from(60));
        assert_eq!(remy_attachment_count(0, 1).unwrap(), BigInt::from(1));
        assert_eq!(remy_attachment_count(0, 2).unwrap(), BigInt::from(2));
        assert!(remy_attachment_count(1, 0).is_err());
    }

    #[test]
    fn attachment_count_matches_closed_form() {
        for k1 in 0..8 {
            for k3 in 1..8 {
                let prod = BigRat::from_integer(remy_attachment_count(k1, k3).unwrap());
                assert_eq!(prod, remy_attachment_closed_form(k1, k3).unwrap(), "k1={k1} k3={k3}");
            }
        }
    }

    #[test]
    fn tree_counts() {
        assert_eq!(planted_tree_count(0), BigInt::from(1));
        assert_eq!(planted_tree_count(1), BigInt::from(2));
        assert_eq!(planted_tree_count(2), BigInt::from(120));
        assert_eq!(planted_tree_count(3), BigInt::from(30240));
    }
}
