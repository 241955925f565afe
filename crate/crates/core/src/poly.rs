//! Integer polynomials in one variable `t` and exponent multisets.

use std::fmt;

use serde::{Deserialize, Serialize};

/// Polynomial with `i64` coefficients, lowest degree first, no trailing zeros.
#[derive(Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct IntPoly(Vec<i64>);

impl IntPoly {
    pub fn new(mut coeffs: Vec<i64>) -> Self {
        while coeffs.last() == Some(&0) {
            coeffs.pop();
        }
        IntPoly(coeffs)
    }

    pub fn zero() -> Self {
        IntPoly(Vec::new())
    }

    pub fn one() -> Self {
        IntPoly(vec![1])
    }

    /// `t^k`.
    pub fn monomial(k: usize) -> Self {
        let mut c = vec![0; k + 1];
        c[k] = 1;
        IntPoly(c)
    }

    /// `∏ (t − r)`.
    pub fn from_roots<I: IntoIterator<Item = i64>>(roots: I) -> Self {
        roots.into_iter().fold(IntPoly::one(), |p, r| p.mul(&IntPoly(vec![-r, 1])))
    }

    pub fn coeffs(&self) -> &[i64] {
        &self.0
    }

    pub fn coeff(&self, k: usize) -> i64 {
        self.0.get(k).copied().unwrap_or(0)
    }

    pub fn is_zero(&self) -> bool {
        self.0.is_empty()
    }

    /// Degree; `None` for the zero polynomial.
    pub fn degree(&self) -> Option<usize> {
        self.0.len().checked_sub(1)
    }

    pub fn is_monic(&self) -> bool {
        self.0.last() == Some(&1)
    }

    pub fn eval(&self, t: i64) -> i128 {
        self.0.iter().rev().fold(0i128, |acc, &c| acc * t as i128 + c as i128)
    }

    pub fn add(&self, other: &IntPoly) -> IntPoly {
        let n = self.0.len().max(other.0.len());
        IntPoly::new((0..n).map(|k| self.coeff(k) + other.coeff(k)).collect())
    }

    pub fn sub(&self, other: &IntPoly) -> IntPoly {
        let n = self.0.len().max(other.0.len());
        IntPoly::new((0..n).map(|k| self.coeff(k) - other.coeff(k)).collect())
    }

    pub fn mul(&self, other: &IntPoly) -> IntPoly {
        if self.is_zero() || other.is_zero() {
            return IntPoly::zero();
        }
        let mut c = vec![0i64; self.0.len() + other.0.len() - 1];
        for (i, &a) in self.0.iter().enumerate() {
            for (j, &b) in other.0.iter().enumerate() {
                c[i + j] += a * b;
            }
        }
        IntPoly::new(c)
    }

    /// Quotient and remainder in ℤ[t]; `None` if some division step leaves ℤ.
    pub fn div_rem(&self, divisor: &IntPoly) -> Option<(IntPoly, IntPoly)> {
        let dd = divisor.degree()?;
        let lead = *divisor.0.last().unwrap();
        let mut rem = self.0.clone();
        if rem.len() <= dd {
            return Some((IntPoly::zero(), self.clone()));
        }
        let mut quot = vec![0i64; rem.len() - dd];
        for k in (dd..rem.len()).rev() {
            let c = rem[k];
            if c == 0 {
                continue;
            }
            if c % lead != 0 {
                return None;
            }
            let q = c / lead;
            quot[k - dd] = q;
            for (j, &d) in divisor.0.iter().enumerate() {
                rem[k - dd + j] -= q * d;
            }
        }
        Some((IntPoly::new(quot), IntPoly::new(rem)))
    }

    /// Whether `self` divides `other` in ℤ[t].
    pub fn divides(&self, other: &IntPoly) -> bool {
        assert!(!self.is_zero(), "division by the zero polynomial");
        matches!(other.div_rem(self), Some((_, r)) if r.is_zero())
    }

    /// Integer roots with multiplicity of a monic polynomial.
    pub fn integer_roots(&self) -> RootFactorization {
        assert!(self.is_monic(), "root extraction expects a monic polynomial");
        let mut p = self.clone();
        let mut roots = Vec::new();
        while p.coeff(0) == 0 && p.degree().unwrap_or(0) > 0 {
            roots.push(0);
            p = IntPoly::new(p.0[1..].to_vec());
        }
        let c0 = p.coeff(0).unsigned_abs();
        for d in divisors(c0) {
            for r in [d as i64, -(d as i64)] {
                loop {
                    if p.degree().unwrap_or(0) == 0 || p.eval(r) != 0 {
                        break;
                    }
                    let (q, _) = p.div_rem(&IntPoly(vec![-r, 1])).expect("monic linear divisor");
                    p = q;
                    roots.push(r);
                }
            }
        }
        roots.sort_unstable();
        if p.degree().unwrap_or(0) == 0 {
            if roots.iter().any(|&r| r < 0) {
                RootFactorization::NegativeRoots { roots }
            } else {
                RootFactorization::Splits(ExpMultiset::new(roots.iter().map(|&r| r as u32).collect()))
            }
        } else {
            RootFactorization::NonSplitting { roots, residual: p }
        }
    }

    /// `∏ (t − b)` rendering, e.g. `(t - 1)(t - 3)^2(t - 4)`.
    pub fn factored(roots: &[i64]) -> String {
        if roots.is_empty() {
            return "1".into();
        }
        let mut out = String::new();
        let mut i = 0;
        while i < roots.len() {
            let r = roots[i];
            let mut m = 0;
            while i < roots.len() && roots[i] == r {
                m += 1;
                i += 1;
            }
            let f = match r.cmp(&0) {
                std::cmp::Ordering::Equal => "t".to_string(),
                std::cmp::Ordering::Greater => format!("(t - {r})"),
                std::cmp::Ordering::Less => format!("(t + {})", -r),
            };
            out.push_str(&f);
            if m > 1 {
                out.push_str(&format!("^{m}"));
            }
        }
        out
    }
}

fn divisors(n: u64) -> Vec<u64> {
    if n == 0 {
        return Vec::new();
    }
    let mut small = Vec::new();
    let mut large = Vec::new();
    let mut d = 1u64;
    while d * d <= n {
        if n.is_multiple_of(d) {
            small.push(d);
            if d * d != n {
                large.push(n / d);
            }
        }
        d += 1;
    }
    small.extend(large.into_iter().rev());
    small
}

impl fmt::Debug for IntPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

impl fmt::Display for IntPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        let mut first = true;
        for k in (0..self.0.len()).rev() {
            let c = self.0[k];
            if c == 0 {
                continue;
            }
            if first {
                if c < 0 {
                    write!(f, "-")?;
                }
            } else {
                write!(f, " {} ", if c < 0 { "-" } else { "+" })?;
            }
            let a = c.unsigned_abs();
            match k {
                0 => write!(f, "{a}")?,
                _ => {
                    if a != 1 {
                        write!(f, "{a}")?;
                    }
                    write!(f, "t")?;
                    if k > 1 {
                        write!(f, "^{k}")?;
                    }
                }
            }
            first = false;
        }
        Ok(())
    }
}

/// Result of [`IntPoly::integer_roots`].
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum RootFactorization {
    Splits(ExpMultiset),
    /// Splits over ℤ but some root is negative, so the roots are not exponents.
    NegativeRoots { roots: Vec<i64> },
    /// Integer roots found so far and the factor without integer roots.
    NonSplitting { roots: Vec<i64>, residual: IntPoly },
}

impl RootFactorization {
    pub fn exponents(&self) -> Option<&ExpMultiset> {
        match self {
            RootFactorization::Splits(e) => Some(e),
            RootFactorization::NonSplitting { .. } | RootFactorization::NegativeRoots { .. } => None,
        }
    }
}

/// Multiset of nonnegative integers, stored sorted ascending.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize, Default)]
#[serde(transparent)]
pub struct ExpMultiset(Vec<u32>);

impl ExpMultiset {
    pub fn new(mut v: Vec<u32>) -> Self {
        v.sort_unstable();
        ExpMultiset(v)
    }

    pub fn zeros(n: usize) -> Self {
        ExpMultiset(vec![0; n])
    }

    pub fn as_slice(&self) -> &[u32] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn sum(&self) -> u64 {
        self.0.iter().map(|&x| x as u64).sum()
    }

    pub fn largest(&self) -> Option<u32> {
        self.0.last().copied()
    }

    /// Multiset inclusion, counting multiplicity.
    pub fn is_submultiset_of(&self, other: &ExpMultiset) -> bool {
        self.difference(other).is_some()
    }

    /// `other ∖ self` as a multiset, if `self ⊆ other`.
    pub fn difference(&self, other: &ExpMultiset) -> Option<ExpMultiset> {
        let mut rest = Vec::with_capacity(other.0.len());
        let mut i = 0;
        for &x in &other.0 {
            if i < self.0.len() && self.0[i] == x {
                i += 1;
            } else {
                if i < self.0.len() && self.0[i] < x {
                    return None;
                }
                rest.push(x);
            }
        }
        (i == self.0.len()).then_some(ExpMultiset(rest))
    }

    pub fn with(&self, x: u32) -> ExpMultiset {
        let mut v = self.0.clone();
        v.push(x);
        ExpMultiset::new(v)
    }

    /// Removes one copy of `x`.
    pub fn without(&self, x: u32) -> Option<ExpMultiset> {
        let i = self.0.iter().position(|&y| y == x)?;
        let mut v = self.0.clone();
        v.remove(i);
        Some(ExpMultiset(v))
    }

    pub fn with_zeros(&self, k: usize) -> ExpMultiset {
        let mut v = vec![0; k];
        v.extend_from_slice(&self.0);
        ExpMultiset::new(v)
    }

    pub fn without_zeros(&self) -> ExpMultiset {
        ExpMultiset(self.0.iter().copied().filter(|&x| x != 0).collect())
    }

    pub fn char_poly(&self) -> IntPoly {
        IntPoly::from_roots(self.0.iter().map(|&x| x as i64))
    }
}

impl fmt::Debug for ExpMultiset {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

impl fmt::Display for ExpMultiset {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{{")?;
        for (i, x) in self.0.iter().enumerate() {
            if i > 0 {
                write!(f, ", ")?;
            }
            write!(f, "{x}")?;
        }
        write!(f, "}}")
    }
}

impl std::str::FromStr for ExpMultiset {
    type Err = String;

    /// Accepts `1, 5, 5` or `1 5 5` (braces optional).
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let s = s.trim().trim_start_matches('{').trim_end_matches('}');
        let v: Result<Vec<u32>, _> =
            s.split(|c: char| c == ',' || c.is_whitespace()).filter(|x| !x.is_empty()).map(str::parse).collect();
        v.map(ExpMultiset::new).map_err(|e| format!("bad exponent list `{s}`: {e}"))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn em(v: &[u32]) -> ExpMultiset {
        ExpMultiset::new(v.to_vec())
    }

    #[test]
    fn roots_of_example_polynomial() {
        let p = IntPoly::from_roots([1, 3, 3, 4]);
        assert_eq!(p.integer_roots(), RootFactorization::Splits(em(&[1, 3, 3, 4])));
        assert_eq!(p.to_string(), "t^4 - 11t^3 + 43t^2 - 69t + 36");
    }

    #[test]
    fn non_splitting() {
        let p = IntPoly::new(vec![1, 0, 1]);
        match p.integer_roots() {
            RootFactorization::NonSplitting { roots, residual } => {
                assert!(roots.is_empty());
                assert_eq!(residual, p);
            }
            other => panic!("unexpected {other:?}"),
        }
        // (t - 2)(t^2 + 1)
        let q = IntPoly::from_roots([2]).mul(&p);
        match q.integer_roots() {
            RootFactorization::NonSplitting { roots, residual } => {
                assert_eq!(roots, vec![2]);
                assert_eq!(residual, p);
            }
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn zero_roots_and_t_power() {
        let p = IntPoly::monomial(3);
        assert_eq!(p.integer_roots(), RootFactorization::Splits(em(&[0, 0, 0])));
        let q = IntPoly::from_roots([0, 0, 1, 2]);
        assert_eq!(q.integer_roots(), RootFactorization::Splits(em(&[0, 0, 1, 2])));
    }

    #[test]
    fn divisibility() {
        let a = IntPoly::from_roots([1, 3, 3]);
        assert!(a.divides(&IntPoly::from_roots([1, 3, 3, 3])));
        assert!(a.divides(&IntPoly::from_roots([1, 3, 3, 4])));
        assert!(!IntPoly::from_roots([2]).divides(&IntPoly::from_roots([1, 1, 1])));
        // over ℤ, 2t does not divide t^2 + t
        assert!(!IntPoly::new(vec![0, 2]).divides(&IntPoly::new(vec![0, 1, 1])));
    }

    #[test]
    fn multiset_ops() {
        assert!(em(&[1, 5, 5]).is_submultiset_of(&em(&[1, 4, 5, 5])));
        assert!(!em(&[1, 5, 5, 5]).is_submultiset_of(&em(&[1, 4, 5, 5])));
        assert_eq!(em(&[1, 5]).difference(&em(&[1, 4, 5])), Some(em(&[4])));
        assert_eq!(em(&[3]).difference(&em(&[1, 2])), None);
        assert_eq!(em(&[1, 5, 6]).without(5), Some(em(&[1, 6])));
        assert_eq!("{1, 5, 5}".parse::<ExpMultiset>().unwrap(), em(&[1, 5, 5]));
        assert_eq!(em(&[1, 3, 3, 4]).to_string(), "{1, 3, 3, 4}");
    }

    #[test]
    fn factored_rendering() {
        assert_eq!(IntPoly::factored(&[0, 1, 3, 3, 4]), "t(t - 1)(t - 3)^2(t - 4)");
    }
}
