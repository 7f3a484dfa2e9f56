use std::fmt;

use num_bigint::BigUint;
use num_traits::{One, Zero};

/// A polynomial in `n` with natural coefficients; `coeffs[i]` multiplies
/// `n^i`. Trailing zeros are never stored.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash)]
pub struct CostPoly {
    coeffs: Vec<BigUint>,
}

impl CostPoly {
    pub fn zero() -> CostPoly {
        CostPoly::default()
    }

    pub fn constant(c: u64) -> CostPoly {
        CostPoly::from_coeffs(vec![BigUint::from(c)])
    }

    /// The polynomial `n`.
    pub fn n() -> CostPoly {
        CostPoly::from_u64s(&[0, 1])
    }

    pub fn from_coeffs(mut coeffs: Vec<BigUint>) -> CostPoly {
        while coeffs.last().is_some_and(|c| c.is_zero()) {
            coeffs.pop();
        }
        CostPoly { coeffs }
    }

    pub fn from_u64s(cs: &[u64]) -> CostPoly {
        CostPoly::from_coeffs(cs.iter().map(|&c| BigUint::from(c)).collect())
    }

    pub fn coeffs(&self) -> &[BigUint] {
        &self.coeffs
    }

    /// Coefficients as machine integers, if they fit.
    pub fn to_u64s(&self) -> Option<Vec<u64>> {
        self.coeffs.iter().map(|c| u64::try_from(c).ok()).collect()
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// Degree, with the zero polynomial at degree 0.
    pub fn degree(&self) -> usize {
        self.coeffs.len().saturating_sub(1)
    }

    pub fn coeff(&self, i: usize) -> BigUint {
        self.coeffs.get(i).cloned().unwrap_or_default()
    }

    fn zip_with(&self, other: &CostPoly, f: impl Fn(BigUint, BigUint) -> BigUint) -> CostPoly {
        let len = self.coeffs.len().max(other.coeffs.len());
        CostPoly::from_coeffs((0..len).map(|i| f(self.coeff(i), other.coeff(i))).collect())
    }

    pub fn add(&self, other: &CostPoly) -> CostPoly {
        self.zip_with(other, |a, b| a + b)
    }

    /// Coefficientwise maximum, which dominates the pointwise maximum.
    pub fn max(&self, other: &CostPoly) -> CostPoly {
        self.zip_with(other, |a, b| a.max(b))
    }

    pub fn scale(&self, k: u64) -> CostPoly {
        CostPoly::from_coeffs(self.coeffs.iter().map(|c| c * k).collect())
    }

    /// `n * P(n)`.
    pub fn shift_mul_n(&self) -> CostPoly {
        if self.is_zero() {
            return CostPoly::zero();
        }
        let mut coeffs = vec![BigUint::zero()];
        coeffs.extend(self.coeffs.iter().cloned());
        CostPoly { coeffs }
    }

    pub fn mul(&self, other: &CostPoly) -> CostPoly {
        if self.is_zero() || other.is_zero() {
            return CostPoly::zero();
        }
        let mut out = vec![BigUint::zero(); self.coeffs.len() + other.coeffs.len() - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            for (j, b) in other.coeffs.iter().enumerate() {
                out[i + j] += a * b;
            }
        }
        CostPoly::from_coeffs(out)
    }

    /// `P(Q(n))`.
    pub fn compose(&self, q: &CostPoly) -> CostPoly {
        self.coeffs.iter().rev().fold(CostPoly::zero(), |acc, c| {
            acc.mul(q).add(&CostPoly::from_coeffs(vec![c.clone()]))
        })
    }

    pub fn eval(&self, n: u64) -> BigUint {
        let n = BigUint::from(n);
        self.coeffs
            .iter()
            .rev()
            .fold(BigUint::zero(), |acc, c| acc * &n + c)
    }

    /// Evaluation as a machine integer, saturating.
    pub fn eval_u64(&self, n: u64) -> u64 {
        u64::try_from(self.eval(n)).unwrap_or(u64::MAX)
    }

    /// Parses whitespace-separated coefficients `c0 c1 c2 ...`.
    pub fn parse_coeffs(s: &str) -> Option<CostPoly> {
        s.split_whitespace()
            .map(|w| w.parse::<BigUint>().ok())
            .collect::<Option<Vec<_>>>()
            .map(CostPoly::from_coeffs)
    }
}

impl fmt::Display for CostPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return f.write_str("0");
        }
        let mut first = true;
        for (i, c) in self.coeffs.iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            if !first {
                f.write_str(" + ")?;
            }
            first = false;
            match i {
                0 => write!(f, "{c}")?,
                _ => {
                    if !c.is_one() {
                        write!(f, "{c}*")?;
                    }
                    if i == 1 {
                        f.write_str("n")?;
                    } else {
                        write!(f, "n^{i}")?;
                    }
                }
            }
        }
        Ok(())
    }
}
