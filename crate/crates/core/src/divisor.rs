//! Divisor-weighted Riemann sums.
//!
//! For a weight `g` on `(0, ∞)`, the sum of `g(pq/K)` over `A <= p, q <= B`
//! grows like `K ln K ∫ g` when `ln B ~ ln K`. Grouping pairs by their product
//! `j = pq` turns it into `Σ_j σ(j; A, B) g(j/K)`, with `σ` the restricted
//! divisor count, which is what [`weighted_divisor_sum`] evaluates.

use std::f64::consts::PI;
use std::str::FromStr;

use rayon::prelude::*;
use serde::Serialize;

use crate::error::{invalid, Error, Result};
use crate::quadrature::quadrature;

pub const EULER_GAMMA: f64 = 0.577_215_664_901_532_9;

/// Sieve block length for [`weighted_divisor_sum`].
const BLOCK: u64 = 1 << 20;

/// Ordered pairs `(p, q)` with `A <= p, q <= B` and `pq = j`.
pub fn restricted_divisor_count(j: u64, a: u64, b: u64) -> Result<u64> {
    if j == 0 || a == 0 || a > b {
        return invalid("need j >= 1 and 1 <= A <= B");
    }
    let mut count = 0;
    let mut d = 1;
    while d * d <= j {
        if j.is_multiple_of(d) {
            let e = j / d;
            let inside = |x: u64| (a..=b).contains(&x);
            if inside(d) && inside(e) {
                count += if d == e { 1 } else { 2 };
            }
        }
        d += 1;
    }
    Ok(count)
}

/// `D(n) = Σ_{j <= n} d(j)` by the hyperbola method:
/// `2 Σ_{i <= √n} ⌊n/i⌋ - ⌊√n⌋²`.
pub fn divisor_summatory(n: u64) -> Result<u64> {
    if n == 0 {
        return invalid("divisor_summatory needs n >= 1");
    }
    let s = n.isqrt();
    let half: u64 = (1..=s).map(|i| n / i).sum();
    Ok(2 * half - s * s)
}

/// `n ln n + (2γ - 1) n`.
pub fn dirichlet_estimate(n: u64) -> f64 {
    let n = n as f64;
    n * n.ln() + (2.0 * EULER_GAMMA - 1.0) * n
}

/// Weight functions for the divisor sums.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub enum WeightFunction {
    /// `(1/(4π)) x^{-3/2} (1 - e^{-x})`, the density behind `E S_k`.
    Lca,
    /// `x^{-3/2} (1 - e^{-x})`, whose integral over `(0, ∞)` is `2√π`.
    LcaKernel,
    Constant(f64),
}

impl WeightFunction {
    pub fn eval(&self, x: f64) -> f64 {
        match self {
            Self::Lca => lca_kernel(x) / (4.0 * PI),
            Self::LcaKernel => lca_kernel(x),
            Self::Constant(c) => *c,
        }
    }

    /// `∫_a^b g` to roughly twelve digits.
    pub fn integral(&self, a: f64, b: f64) -> Result<f64> {
        match self {
            Self::Constant(c) => Ok(c * (b - a)),
            _ => quadrature(|x| self.eval(x), a, b, 1e-13),
        }
    }

    /// `∫_a^b g(x) ln x dx`.
    pub fn log_moment(&self, a: f64, b: f64) -> Result<f64> {
        match self {
            Self::Constant(c) => {
                let prim = |x: f64| x * x.ln() - x;
                Ok(c * (prim(b) - prim(a)))
            }
            _ => quadrature(|x| self.eval(x) * x.ln(), a, b, 1e-13),
        }
    }

    /// `∫_0^∞ g`, when finite.
    pub fn full_integral(&self) -> Option<f64> {
        match self {
            Self::Lca => Some(1.0 / (2.0 * PI.sqrt())),
            Self::LcaKernel => Some(2.0 * PI.sqrt()),
            Self::Constant(_) => None,
        }
    }
}

impl FromStr for WeightFunction {
    type Err = Error;

    /// `lca`, `lca-kernel`, or a positive constant such as `1`.
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "lca" => Ok(Self::Lca),
            "lca-kernel" => Ok(Self::LcaKernel),
            _ => match s.parse::<f64>() {
                Ok(c) if c > 0.0 && c.is_finite() => Ok(Self::Constant(c)),
                _ => invalid(format!("unknown weight {s:?} (expected lca, lca-kernel or a positive constant)")),
            },
        }
    }
}

fn lca_kernel(x: f64) -> f64 {
    -(-x).exp_m1() / (x * x.sqrt())
}

/// `∫_0^∞ x^{-3/2} (1 - e^{-x}) dx`, assembled from a series on `[0, eps]`,
/// quadrature on `[eps, lambda]` and the closed-form tail
/// `2/√lambda - ∫_lambda^∞ x^{-3/2} e^{-x}`.
pub fn lca_kernel_integral(eps: f64, lambda: f64, tol: f64) -> Result<f64> {
    if !(0.0 < eps && eps <= 1.0 && eps < lambda && lambda.is_finite()) {
        return invalid("need 0 < eps <= 1 and eps < lambda");
    }
    // x^{-3/2}(1 - e^{-x}) = Σ_{n>=1} (-1)^{n+1} x^{n-3/2} / n!
    let mut head = 0.0;
    let mut power_over_fact = eps.sqrt(); // eps^{n-1/2} / n! at n = 1
    for n in 1..100 {
        let t = power_over_fact / (n as f64 - 0.5);
        head += if n % 2 == 1 { t } else { -t };
        if t < 1e-18 {
            break;
        }
        power_over_fact *= eps / (n + 1) as f64;
    }
    let body = quadrature(lca_kernel, eps, lambda, tol / 2.0)?;
    let decaying = quadrature(|x: f64| (-x).exp() / (x * x.sqrt()), lambda, lambda + 60.0, tol / 4.0)?;
    Ok(head + body + 2.0 / lambda.sqrt() - decaying)
}

/// Scale and cutoffs of a divisor-weighted sum.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct DivisorSumSpec {
    pub k: u64,
    pub a: u64,
    pub b: u64,
    pub eps: f64,
    pub lambda: f64,
}

impl DivisorSumSpec {
    /// `A = 1`, `B = ⌊K / ln K⌋`, support `[1e-4, 100]`.
    pub fn with_defaults(k: u64) -> Result<Self> {
        if k < 3 {
            return invalid("K must be >= 3");
        }
        let spec = Self {
            k,
            a: 1,
            b: (k as f64 / (k as f64).ln()).floor() as u64,
            eps: 1e-4,
            lambda: 100.0,
        };
        spec.validate()?;
        Ok(spec)
    }

    /// `A = 1` and `B` large enough that `σ(j; A, B) = d(j)` on the support.
    pub fn unrestricted(k: u64, eps: f64, lambda: f64) -> Result<Self> {
        let spec = Self {
            k,
            a: 1,
            b: 1,
            eps,
            lambda,
        };
        let (_, hi) = spec.j_range();
        let spec = Self { b: hi.max(2), ..spec };
        spec.validate()?;
        Ok(spec)
    }

    /// `A < B <= max(K, ⌊ΛK⌋)` and `0 < ε < Λ`. Cutoffs above `K` are
    /// allowed so that unrestricted counts can be expressed when `Λ > 1`.
    pub fn validate(&self) -> Result<()> {
        if self.k == 0 {
            return invalid("K must be >= 1");
        }
        if !(0.0 < self.eps && self.eps < self.lambda && self.lambda.is_finite()) {
            return invalid("need 0 < eps < lambda");
        }
        let cap = self.k.max(self.j_range().1);
        if !(1 <= self.a && self.a < self.b && self.b <= cap) {
            return invalid(format!("need 1 <= A < B <= {cap}"));
        }
        Ok(())
    }

    /// Integer range `[⌈εK⌉, ⌊ΛK⌋]`, treating products within rounding of
    /// an integer as that integer.
    pub fn j_range(&self) -> (u64, u64) {
        let snap = |x: f64| {
            let r = x.round();
            ((x - r).abs() <= 1e-9 * x.max(1.0)).then_some(r)
        };
        let lo = self.eps * self.k as f64;
        let hi = self.lambda * self.k as f64;
        let lo = snap(lo).unwrap_or(lo.ceil()).max(1.0) as u64;
        let hi = snap(hi).unwrap_or(hi.floor()) as u64;
        (lo, hi)
    }

    fn is_unrestricted(&self) -> bool {
        self.a == 1 && self.b >= self.j_range().1
    }
}

/// `Σ_j σ(j; A, B) g(j/K)` over `εK <= j <= ΛK`, by a segmented sieve over
/// `j`. Blocks are summed independently and combined in order, so the
/// result does not depend on thread count.
pub fn weighted_divisor_sum(spec: &DivisorSumSpec, g: &WeightFunction) -> Result<f64> {
    spec.validate()?;
    let (lo, hi) = spec.j_range();
    if lo > hi {
        return Ok(0.0);
    }
    let k = spec.k as f64;
    let starts: Vec<u64> = (lo..=hi).step_by(BLOCK as usize).collect();
    let partial: Vec<f64> = starts
        .par_iter()
        .map(|&start| {
            let end = (start + BLOCK - 1).min(hi);
            let mut counts = vec![0u32; (end - start + 1) as usize];
            for d in spec.a..=spec.b.min(end) {
                let m_lo = spec.a.max(start.div_ceil(d));
                let m_hi = spec.b.min(end / d);
                for m in m_lo..=m_hi {
                    counts[(d * m - start) as usize] += 1;
                }
            }
            counts
                .iter()
                .zip(start..)
                .filter(|(c, _)| **c > 0)
                .map(|(&c, j)| c as f64 * g.eval(j as f64 / k))
                .sum()
        })
        .collect();
    Ok(partial.iter().sum())
}

/// `K ln K ∫_ε^Λ g`.
pub fn leading_prediction(spec: &DivisorSumSpec, g: &WeightFunction) -> Result<f64> {
    spec.validate()?;
    let k = spec.k as f64;
    Ok(k * k.ln() * g.integral(spec.eps, spec.lambda)?)
}

/// `K ∫_ε^Λ g(x) (ln(Kx) + 2γ) dx`: the leading term refined with the mean
/// density `ln n + 2γ` of `d(n)`. Only meaningful when every divisor pair is
/// counted, so restricted cutoffs are rejected.
pub fn second_order_prediction(spec: &DivisorSumSpec, g: &WeightFunction) -> Result<f64> {
    spec.validate()?;
    if !spec.is_unrestricted() {
        return invalid("second-order prediction needs A = 1 and B >= ΛK");
    }
    let k = spec.k as f64;
    let mass = g.integral(spec.eps, spec.lambda)?;
    let log_mass = g.log_moment(spec.eps, spec.lambda)?;
    Ok(k * ((k.ln() + 2.0 * EULER_GAMMA) * mass + log_mass))
}

/// The two-dimensional sum `Σ g1(pq/K) g2(p'q'/K)` over both pairs, which
/// factorises into two one-dimensional sums.
pub fn weighted_divisor_sum_2d(spec: &DivisorSumSpec, g1: &WeightFunction, g2: &WeightFunction) -> Result<f64> {
    Ok(weighted_divisor_sum(spec, g1)? * weighted_divisor_sum(spec, g2)?)
}

/// `(K ln K)² ∫ g1 ∫ g2`.
pub fn leading_prediction_2d(spec: &DivisorSumSpec, g1: &WeightFunction, g2: &WeightFunction) -> Result<f64> {
    Ok(leading_prediction(spec, g1)? * leading_prediction(spec, g2)?)
}

/// One row of the divisor-sum table. `second_order` is present only for
/// unrestricted cutoffs.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct DivisorRow {
    pub k: u64,
    pub sum: f64,
    pub leading: f64,
    pub second_order: Option<f64>,
    pub ratio: f64,
}

pub fn divisor_row(spec: &DivisorSumSpec, g: &WeightFunction) -> Result<DivisorRow> {
    let sum = weighted_divisor_sum(spec, g)?;
    let leading = leading_prediction(spec, g)?;
    let second_order = if spec.is_unrestricted() {
        Some(second_order_prediction(spec, g)?)
    } else {
        None
    };
    Ok(DivisorRow {
        k: spec.k,
        sum,
        leading,
        second_order,
        ratio: sum / leading,
    })
}
