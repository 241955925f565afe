//! Sparse multivariate polynomials over ℚ.

use std::collections::{BTreeMap, HashMap};
use std::fmt;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

pub type Monomial = Vec<u16>;

#[derive(Clone, PartialEq, Eq)]
pub struct MPoly {
    nvars: usize,
    terms: BTreeMap<Monomial, BigRational>,
}

impl MPoly {
    pub fn zero(nvars: usize) -> Self {
        MPoly { nvars, terms: BTreeMap::new() }
    }

    pub fn constant(nvars: usize, c: BigRational) -> Self {
        let mut p = MPoly::zero(nvars);
        p.add_term(vec![0; nvars], c);
        p
    }

    pub fn var(nvars: usize, i: usize) -> Self {
        let mut m = vec![0; nvars];
        m[i] = 1;
        let mut p = MPoly::zero(nvars);
        p.add_term(m, BigRational::one());
        p
    }

    /// `Σ a_i x_i`.
    pub fn linear_form(a: &[i64]) -> Self {
        let n = a.len();
        let mut p = MPoly::zero(n);
        for (i, &c) in a.iter().enumerate() {
            let mut m = vec![0; n];
            m[i] = 1;
            p.add_term(m, BigRational::from_integer(c.into()));
        }
        p
    }

    pub fn nvars(&self) -> usize {
        self.nvars
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Monomial, &BigRational)> {
        self.terms.iter()
    }

    pub fn num_terms(&self) -> usize {
        self.terms.len()
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn add_term(&mut self, m: Monomial, c: BigRational) {
        assert_eq!(m.len(), self.nvars, "monomial arity");
        if c.is_zero() {
            return;
        }
        match self.terms.entry(m) {
            std::collections::btree_map::Entry::Vacant(e) => {
                e.insert(c);
            }
            std::collections::btree_map::Entry::Occupied(mut e) => {
                *e.get_mut() += c;
                if e.get().is_zero() {
                    e.remove();
                }
            }
        }
    }

    pub fn add_assign(&mut self, other: &MPoly) {
        for (m, c) in &other.terms {
            self.add_term(m.clone(), c.clone());
        }
    }

    pub fn scaled(&self, c: &BigRational) -> MPoly {
        if c.is_zero() {
            return MPoly::zero(self.nvars);
        }
        MPoly { nvars: self.nvars, terms: self.terms.iter().map(|(m, a)| (m.clone(), a * c)).collect() }
    }

    pub fn mul(&self, other: &MPoly) -> MPoly {
        let mut out = MPoly::zero(self.nvars);
        for (m1, c1) in &self.terms {
            for (m2, c2) in &other.terms {
                let m: Monomial = m1.iter().zip(m2).map(|(a, b)| a + b).collect();
                out.add_term(m, c1 * c2);
            }
        }
        out
    }

    /// Degree if every term has the same total degree; `None` for the zero
    /// polynomial or mixed degrees.
    pub fn homogeneous_degree(&self) -> Option<usize> {
        let mut it = self.terms.keys().map(|m| m.iter().map(|&e| e as usize).sum::<usize>());
        let d = it.next()?;
        it.all(|e| e == d).then_some(d)
    }

    pub fn eval(&self, p: &[BigInt]) -> BigRational {
        let mut acc = BigRational::zero();
        for (m, c) in &self.terms {
            let mut v = BigInt::one();
            for (x, &e) in p.iter().zip(m) {
                if e > 0 {
                    v *= num_traits::pow(x.clone(), e as usize);
                }
            }
            acc += c * BigRational::from_integer(v);
        }
        acc
    }

    /// Whether the linear form `α` divides this polynomial, decided by
    /// substituting the solved variable of `α` and checking for zero.
    pub fn divisible_by_linear(&self, alpha: &[i64]) -> bool {
        assert_eq!(alpha.len(), self.nvars);
        let Some(j) = alpha.iter().position(|&a| a != 0) else {
            return self.is_zero();
        };
        // x_j = Σ_{k≠j} s_k x_k
        let aj = BigRational::from_integer(alpha[j].into());
        let mut subst = MPoly::zero(self.nvars);
        for (k, &a) in alpha.iter().enumerate() {
            if k != j && a != 0 {
                let mut m = vec![0; self.nvars];
                m[k] = 1;
                subst.add_term(m, -BigRational::from_integer(a.into()) / &aj);
            }
        }
        let mut powers = vec![MPoly::constant(self.nvars, BigRational::one())];
        let mut out = MPoly::zero(self.nvars);
        for (m, c) in &self.terms {
            let e = m[j] as usize;
            while powers.len() <= e {
                let next = powers.last().unwrap().mul(&subst);
                powers.push(next);
            }
            let mut rest = m.clone();
            rest[j] = 0;
            for (pm, pc) in &powers[e].terms {
                let mm: Monomial = rest.iter().zip(pm).map(|(a, b)| a + b).collect();
                out.add_term(mm, c * pc);
            }
        }
        out.is_zero()
    }

    /// Composition with the linear substitution `x_i ↦ Σ_k rows[i][k] y_k`.
    pub fn substitute_linear(&self, rows: &[Vec<BigRational>], new_nvars: usize) -> MPoly {
        let mut cache: HashMap<Monomial, MPoly> = HashMap::new();
        let mut out = MPoly::zero(new_nvars);
        for (m, c) in &self.terms {
            let e = expand_monomial(m, rows, new_nvars, &mut cache);
            for (mm, cc) in &e.terms {
                out.add_term(mm.clone(), c * cc);
            }
        }
        out
    }
}

/// Expansion of `∏ (Σ_k rows[i][k] y_k)^{m_i}`, memoised by monomial.
pub fn expand_monomial(
    m: &Monomial,
    rows: &[Vec<BigRational>],
    new_nvars: usize,
    cache: &mut HashMap<Monomial, MPoly>,
) -> MPoly {
    if let Some(p) = cache.get(m) {
        return p.clone();
    }
    let p = match m.iter().position(|&e| e > 0) {
        None => MPoly::constant(new_nvars, BigRational::one()),
        Some(i) => {
            let mut lower = m.clone();
            lower[i] -= 1;
            let base = expand_monomial(&lower, rows, new_nvars, cache);
            let mut lin = MPoly::zero(new_nvars);
            for (k, c) in rows[i].iter().enumerate() {
                if !c.is_zero() {
                    let mut mm = vec![0; new_nvars];
                    mm[k] = 1;
                    lin.add_term(mm, c.clone());
                }
            }
            base.mul(&lin)
        }
    };
    cache.insert(m.clone(), p.clone());
    p
}

impl fmt::Debug for MPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

impl fmt::Display for MPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        for (k, (m, c)) in self.terms.iter().rev().enumerate() {
            let neg = c.is_negative();
            if k == 0 {
                if neg {
                    write!(f, "-")?;
                }
            } else {
                write!(f, " {} ", if neg { "-" } else { "+" })?;
            }
            let a = c.abs();
            let constant = m.iter().all(|&e| e == 0);
            if !a.is_one() || constant {
                write!(f, "{a}")?;
            }
            for (i, &e) in m.iter().enumerate() {
                match e {
                    0 => {}
                    1 => write!(f, "x{}", i + 1)?,
                    _ => write!(f, "x{}^{e}", i + 1)?,
                }
            }
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q(n: i64) -> BigRational {
        BigRational::from_integer(n.into())
    }

    #[test]
    fn divisibility_by_linear_forms() {
        // (x - y)(x + 2z)
        let p = MPoly::linear_form(&[1, -1, 0]).mul(&MPoly::linear_form(&[1, 0, 2]));
        assert!(p.divisible_by_linear(&[1, -1, 0]));
        assert!(p.divisible_by_linear(&[2, 0, 4]));
        assert!(!p.divisible_by_linear(&[0, 1, 1]));
        assert_eq!(p.homogeneous_degree(), Some(2));
    }

    #[test]
    fn substitution_and_evaluation() {
        // x1^2 x2 with x1 = y1 + y2, x2 = 2 y2
        let mut p = MPoly::zero(2);
        p.add_term(vec![2, 1], q(1));
        let rows = vec![vec![q(1), q(1)], vec![q(0), q(2)]];
        let s = p.substitute_linear(&rows, 2);
        let pt = [BigInt::from(3), BigInt::from(5)];
        assert_eq!(s.eval(&pt), q(8 * 8 * 10));
        assert_eq!(s.to_string(), "2x1^2x2 + 4x1x2^2 + 2x2^3");
    }
}
