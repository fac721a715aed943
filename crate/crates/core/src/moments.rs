//! Exact moment polynomials `a_k(p) = E Λ_p^k = E p^{S_k}`.
//!
//! `a_k` is the probability generating function of `S_k`, so its
//! coefficient of `p^s` is `P(S_k = s)`. Polynomials are built by the
//! quadratic moment recurrence in exact rational arithmetic. Each `a_k` is
//! stored as an integer numerator polynomial over one common denominator so
//! that the inner convolutions only touch integers.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Zero};
use serde::ser::{Serialize, SerializeStruct, Serializer};

use crate::error::{invalid, Result};
use crate::numbers::{factorial, remy_attachment_count, DoubleFactorialTable};
use crate::rational::{format_rational, BigRat};

/// Exact law of `S_k`, written as a polynomial in `p`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MomentPoly {
    k: u64,
    coeffs: Vec<BigRat>,
}

impl MomentPoly {
    pub fn k(&self) -> u64 {
        self.k
    }

    /// Coefficients of `p^0 ..= p^k`.
    pub fn coeffs(&self) -> &[BigRat] {
        &self.coeffs
    }

    /// `P(S_k = s)`.
    pub fn coeff(&self, s: usize) -> BigRat {
        self.coeffs.get(s).cloned().unwrap_or_else(BigRat::zero)
    }

    pub fn eval(&self, p: &BigRat) -> BigRat {
        self.coeffs
            .iter()
            .rev()
            .fold(BigRat::zero(), |acc, c| acc * p + c)
    }

    pub fn eval_f64(&self, p: f64) -> f64 {
        self.coeffs
            .iter()
            .rev()
            .fold(0.0, |acc, c| acc * p + crate::rational::to_f64(c))
    }

    /// `order`-th derivative at `p = 1`, i.e. the factorial moment
    /// `E[S_k (S_k - 1) ... (S_k - order + 1)]`.
    pub fn factorial_moment(&self, order: u32) -> BigRat {
        self.coeffs
            .iter()
            .enumerate()
            .filter(|(s, _)| *s as u64 >= u64::from(order))
            .map(|(s, c)| {
                let falling = (0..u64::from(order)).fold(BigInt::one(), |acc, i| acc * (s as u64 - i));
                c * BigRat::from_integer(falling)
            })
            .sum()
    }

    /// `(k, s, num, den)` rows, one per coefficient.
    pub fn csv_rows(&self) -> Vec<(u64, usize, BigInt, BigInt)> {
        self.coeffs
            .iter()
            .enumerate()
            .map(|(s, c)| (self.k, s, c.numer().clone(), c.denom().clone()))
            .collect()
    }
}

impl Serialize for MomentPoly {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        let coeffs: Vec<String> = self.coeffs.iter().map(format_rational).collect();
        let mut st = serializer.serialize_struct("MomentPoly", 2)?;
        st.serialize_field("k", &self.k)?;
        st.serialize_field("coeffs", &coeffs)?;
        st.end()
    }
}

/// Integer numerator polynomial over a positive common denominator.
#[derive(Debug, Clone)]
struct ScaledPoly {
    num: Vec<BigInt>,
    den: BigInt,
}

impl ScaledPoly {
    fn to_moment_poly(&self, k: u64) -> MomentPoly {
        let coeffs = self
            .num
            .iter()
            .map(|n| BigRat::new(n.clone(), self.den.clone()))
            .collect();
        MomentPoly { k, coeffs }
    }
}

fn convolve(a: &[BigInt], b: &[BigInt], shift: usize, out: &mut [BigInt], scale: &BigInt) {
    for (i, x) in a.iter().enumerate() {
        if x.is_zero() {
            continue;
        }
        let xs = x * scale;
        for (j, y) in b.iter().enumerate() {
            if !y.is_zero() {
                out[i + j + shift] += &xs * y;
            }
        }
    }
}

/// Memo table of `a_0, a_1, ...`, extended on demand.
///
/// Extension takes `&mut self`; share it behind a `RwLock` if several
/// threads need it.
#[derive(Debug, Clone)]
pub struct MomentTable {
    polys: Vec<ScaledPoly>,
    dfact: DoubleFactorialTable,
    factorials: Vec<BigInt>,
}

impl Default for MomentTable {
    fn default() -> Self {
        Self::new()
    }
}

impl MomentTable {
    pub fn new() -> Self {
        Self {
            polys: vec![ScaledPoly {
                num: vec![BigInt::one()],
                den: BigInt::one(),
            }],
            dfact: DoubleFactorialTable::new(),
            factorials: vec![BigInt::one()],
        }
    }

    /// Highest `k` computed so far.
    pub fn k_max(&self) -> u64 {
        self.polys.len() as u64 - 1
    }

    pub fn get(&mut self, k: u64) -> MomentPoly {
        self.extend_to(k);
        self.polys[k as usize].to_moment_poly(k)
    }

    pub fn extend_to(&mut self, k_max: u64) {
        while self.k_max() < k_max {
            let k = self.k_max() + 1;
            let next = self.next_poly(k);
            self.polys.push(next);
        }
    }

    fn factorial(&mut self, n: u64) -> BigInt {
        while self.factorials.len() as u64 <= n {
            let m = self.factorials.len() as u64;
            let v = self.factorials.last().unwrap() * m;
            self.factorials.push(v);
        }
        self.factorials[n as usize].clone()
    }

    /// Reduced scalar `w(k1,k2,k3) / (den_{k1} den_{k2})` of one recurrence
    /// term, doubled when the mirrored term `(k2,k1,k3)` is folded in.
    fn term_scalar(&mut self, k: u64, k1: u64, k2: u64) -> BigRat {
        let k3 = k - k1 - k2;
        let multinomial =
            self.factorial(k) / (self.factorial(k1) * self.factorial(k2) * self.factorial(k3));
        let df1 = self.dfact.get(4 * k1 as i64 + 2 * k3 as i64 - 3).unwrap().clone();
        let df2 = self.dfact.get(4 * k2 as i64 + 2 * k3 as i64 - 3).unwrap().clone();
        let df_total = self.dfact.get(4 * k as i64 - 3).unwrap().clone();
        let mirror = if k1 == k2 { 1u32 } else { 2 };
        // 2^(k3-1) is folded as 2^k3 / 2.
        let num = (multinomial * df1 * df2 * mirror) << k3;
        let den = df_total
            * 2u32
            * &self.polys[k1 as usize].den
            * &self.polys[k2 as usize].den;
        BigRat::new(num, den)
    }

    fn next_poly(&mut self, k: u64) -> ScaledPoly {
        // Admissible (k1, k2) with k1 <= k2; k3 = k - k1 - k2 and both
        // subtrees of the top vertex non-empty.
        let mut terms = Vec::new();
        for k1 in 0..=k {
            for k2 in k1..=k - k1 {
                let k3 = k - k1 - k2;
                if k1 + k3 == 0 || k2 + k3 == 0 {
                    continue;
                }
                let c = self.term_scalar(k, k1, k2);
                terms.push((k1, k2, c));
            }
        }
        let common = terms
            .iter()
            .fold(BigInt::one(), |acc, (_, _, c)| acc.lcm(c.denom()));
        let mut num = vec![BigInt::zero(); k as usize + 1];
        for (k1, k2, c) in &terms {
            let k3 = k - k1 - k2;
            let scale = c.numer() * (&common / c.denom());
            let shift = usize::from(k3 != 0);
            convolve(
                &self.polys[*k1 as usize].num,
                &self.polys[*k2 as usize].num,
                shift,
                &mut num,
                &scale,
            );
        }
        let content = num.iter().fold(common.clone(), |acc, x| acc.gcd(x));
        ScaledPoly {
            num: num.into_iter().map(|x| x / &content).collect(),
            den: common / content,
        }
    }
}

/// `a_0 ..= a_{k_max}`.
pub fn moment_polys(k_max: u64) -> Vec<MomentPoly> {
    let mut table = MomentTable::new();
    table.extend_to(k_max);
    (0..=k_max).map(|k| table.get(k)).collect()
}

/// `a_0(p) ..= a_{k_max}(p)` at a fixed rational `p`, by the same
/// recurrence run on scalars instead of polynomials.
pub fn moments_at(k_max: u64, p: &BigRat) -> Vec<BigRat> {
    let mut dfact = DoubleFactorialTable::new();
    let facts: Vec<BigInt> = (0..=k_max).map(factorial).collect();
    let mut values = vec![BigRat::one()];
    for k in 1..=k_max {
        let df_total = dfact.get(4 * k as i64 - 3).unwrap().clone();
        let mut acc = BigRat::zero();
        for k1 in 0..=k {
            for k2 in 0..=k - k1 {
                let k3 = k - k1 - k2;
                if k1 + k3 == 0 || k2 + k3 == 0 {
                    continue;
                }
                let multinomial =
                    &facts[k as usize] / (&facts[k1 as usize] * &facts[k2 as usize] * &facts[k3 as usize]);
                let df1 = dfact.get(4 * k1 as i64 + 2 * k3 as i64 - 3).unwrap().clone();
                let df2 = dfact.get(4 * k2 as i64 + 2 * k3 as i64 - 3).unwrap().clone();
                let w = BigRat::new((multinomial * df1 * df2) << k3, &df_total * 2u32);
                let mut term = w * &values[k1 as usize] * &values[k2 as usize];
                if k3 != 0 {
                    term *= p;
                }
                acc += term;
            }
        }
        values.push(acc);
    }
    values
}

/// `b_0 ..= b_{k_max}` where `b_k(p) = Σ_{T ∈ T_k} p^{|S(T)|}` counts planted
/// binary trees with `2k` labelled leaves by their number of distinct pair
/// LCAs. Built from the root decomposition with integer weights only.
pub fn b_polys(k_max: u64) -> Vec<Vec<BigInt>> {
    let facts: Vec<BigInt> = (0..=k_max).map(factorial).collect();
    let attach = |k1: u64, k3: u64| -> BigInt {
        if k3 == 0 {
            BigInt::one()
        } else {
            remy_attachment_count(k1, k3).expect("k3 >= 1")
        }
    };
    let mut b: Vec<Vec<BigInt>> = vec![vec![BigInt::one()]];
    for k in 1..=k_max {
        let mut poly = vec![BigInt::zero(); k as usize + 1];
        for k1 in 0..=k {
            for k2 in 0..=k - k1 {
                let k3 = k - k1 - k2;
                if k1 + k3 == 0 || k2 + k3 == 0 {
                    continue;
                }
                let multinomial =
                    &facts[k as usize] / (&facts[k1 as usize] * &facts[k2 as usize] * &facts[k3 as usize]);
                let weight = (multinomial << k3) * attach(k1, k3) * attach(k2, k3);
                convolve(
                    &b[k1 as usize],
                    &b[k2 as usize],
                    usize::from(k3 != 0),
                    &mut poly,
                    &weight,
                );
            }
        }
        b.push(poly);
    }
    b
}

pub fn b_poly(k: u64) -> Vec<BigInt> {
    b_polys(k).pop().expect("non-empty")
}

/// `[P(S_k = 1), ..., P(S_k = k)]`.
pub fn sk_distribution(k: u64) -> Result<Vec<BigRat>> {
    if k == 0 {
        return invalid("sk_distribution needs k >= 1");
    }
    let poly = MomentTable::new().get(k);
    Ok(poly.coeffs()[1..].to_vec())
}

/// `d^order/dp^order a_k(p)` at `p = 1`; zero when `order > k`.
pub fn factorial_moment_at_one(k: u64, order: u32) -> Result<BigRat> {
    if order == 0 {
        return invalid("factorial moment order must be >= 1");
    }
    Ok(MomentTable::new().get(k).factorial_moment(order))
}
