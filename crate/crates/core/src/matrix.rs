//! Small dense square matrices over cyclotomic fields.

use std::fmt;
use std::ops::Mul;

use crate::exactfield::{CycNumber, FieldError};

/// Row-major `n × n` matrix of [`CycNumber`]s.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CycMatrix {
    n: usize,
    entries: Vec<CycNumber>,
}

impl CycMatrix {
    pub fn identity(n: usize) -> Self {
        Self::scalar(n, CycNumber::one())
    }

    pub fn zero(n: usize) -> Self {
        CycMatrix {
            n,
            entries: vec![CycNumber::zero(); n * n],
        }
    }

    pub fn scalar(n: usize, c: CycNumber) -> Self {
        let mut m = Self::zero(n);
        for i in 0..n {
            m.entries[i * n + i] = c.clone();
        }
        m
    }

    /// `None` unless every row has exactly `rows.len()` entries.
    pub fn from_rows(rows: Vec<Vec<CycNumber>>) -> Option<Self> {
        let n = rows.len();
        if rows.iter().any(|r| r.len() != n) {
            return None;
        }
        Some(CycMatrix {
            n,
            entries: rows.into_iter().flatten().collect(),
        })
    }

    pub fn rows(&self) -> Vec<Vec<CycNumber>> {
        self.entries.chunks(self.n.max(1)).map(|r| r.to_vec()).collect()
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn get(&self, i: usize, j: usize) -> &CycNumber {
        &self.entries[i * self.n + j]
    }

    pub fn entries(&self) -> &[CycNumber] {
        &self.entries
    }

    pub fn map(&self, f: impl Fn(&CycNumber) -> Result<CycNumber, FieldError>) -> Result<Self, FieldError> {
        Ok(CycMatrix {
            n: self.n,
            entries: self.entries.iter().map(f).collect::<Result<_, _>>()?,
        })
    }

    pub fn try_mul(&self, other: &Self) -> Result<Self, FieldError> {
        assert_eq!(self.n, other.n, "matrix dimensions differ");
        let n = self.n;
        let mut entries = Vec::with_capacity(n * n);
        for i in 0..n {
            for j in 0..n {
                let mut acc = CycNumber::zero();
                for k in 0..n {
                    let a = self.get(i, k);
                    let b = other.get(k, j);
                    if !a.is_zero() && !b.is_zero() {
                        acc = acc.try_add(&a.try_mul(b)?)?;
                    }
                }
                entries.push(acc);
            }
        }
        Ok(CycMatrix { n, entries })
    }

    pub fn try_add(&self, other: &Self) -> Result<Self, FieldError> {
        assert_eq!(self.n, other.n, "matrix dimensions differ");
        Ok(CycMatrix {
            n: self.n,
            entries: self
                .entries
                .iter()
                .zip(&other.entries)
                .map(|(a, b)| a.try_add(b))
                .collect::<Result<_, _>>()?,
        })
    }

    pub fn scale(&self, c: &CycNumber) -> Result<Self, FieldError> {
        self.map(|x| x.try_mul(c))
    }

    pub fn pow(&self, k: u32) -> Result<Self, FieldError> {
        let mut acc = Self::identity(self.n);
        for _ in 0..k {
            acc = acc.try_mul(self)?;
        }
        Ok(acc)
    }

    pub fn trace(&self) -> Result<CycNumber, FieldError> {
        (0..self.n).try_fold(CycNumber::zero(), |acc, i| acc.try_add(self.get(i, i)))
    }

    pub fn is_zero(&self) -> bool {
        self.entries.iter().all(CycNumber::is_zero)
    }

    pub fn is_scalar(&self, c: &CycNumber) -> bool {
        (0..self.n).all(|i| (0..self.n).all(|j| if i == j { self.get(i, j) == c } else { self.get(i, j).is_zero() }))
    }

    pub fn is_identity(&self) -> bool {
        self.is_scalar(&CycNumber::one())
    }

    /// Gauss–Jordan inverse; `None` if singular.
    pub fn inverse(&self) -> Result<Option<Self>, FieldError> {
        let n = self.n;
        let mut a = self.clone();
        let mut inv = Self::identity(n);
        for col in 0..n {
            let Some(p) = (col..n).find(|&r| !a.get(r, col).is_zero()) else {
                return Ok(None);
            };
            a.swap_rows(p, col);
            inv.swap_rows(p, col);
            let pivot_inv = a.get(col, col).inv()?;
            for j in 0..n {
                a.entries[col * n + j] = a.entries[col * n + j].try_mul(&pivot_inv)?;
                inv.entries[col * n + j] = inv.entries[col * n + j].try_mul(&pivot_inv)?;
            }
            for r in 0..n {
                if r == col || a.get(r, col).is_zero() {
                    continue;
                }
                let f = a.get(r, col).clone();
                for j in 0..n {
                    let da = f.try_mul(a.get(col, j))?;
                    let di = f.try_mul(inv.get(col, j))?;
                    a.entries[r * n + j] = a.entries[r * n + j].try_sub(&da)?;
                    inv.entries[r * n + j] = inv.entries[r * n + j].try_sub(&di)?;
                }
            }
        }
        Ok(Some(inv))
    }

    fn swap_rows(&mut self, a: usize, b: usize) {
        if a == b {
            return;
        }
        for j in 0..self.n {
            self.entries.swap(a * self.n + j, b * self.n + j);
        }
    }

    /// Block-diagonal matrix `diag(self, other)`.
    pub fn block_diag(&self, other: &Self) -> Self {
        let n = self.n + other.n;
        let mut m = Self::zero(n);
        for i in 0..self.n {
            for j in 0..self.n {
                m.entries[i * n + j] = self.get(i, j).clone();
            }
        }
        for i in 0..other.n {
            for j in 0..other.n {
                m.entries[(self.n + i) * n + self.n + j] = other.get(i, j).clone();
            }
        }
        m
    }

    /// Characteristic polynomial `det(xI − A)`, ascending coefficients (Faddeev–LeVerrier).
    pub fn charpoly(&self) -> Result<Vec<CycNumber>, FieldError> {
        let n = self.n;
        let mut coeffs = vec![CycNumber::zero(); n + 1];
        coeffs[n] = CycNumber::one();
        let mut m = Self::zero(n);
        for k in 1..=n {
            m = self
                .try_mul(&m)?
                .try_add(&Self::scalar(n, coeffs[n + 1 - k].clone()))?;
            let t = self.try_mul(&m)?.trace()?;
            coeffs[n - k] = -t.try_div(&CycNumber::from_int(k as i64))?;
        }
        Ok(coeffs)
    }

    /// Evaluates a polynomial (ascending coefficients) at this matrix by Horner's rule.
    pub fn eval_poly(&self, poly: &[CycNumber]) -> Result<Self, FieldError> {
        let mut acc = Self::zero(self.n);
        for c in poly.iter().rev() {
            acc = acc.try_mul(self)?.try_add(&Self::scalar(self.n, c.clone()))?;
        }
        Ok(acc)
    }

    /// Whether the matrix is diagonalizable over an algebraic closure.
    ///
    /// Tests that the squarefree part of the characteristic polynomial annihilates the matrix.
    pub fn is_diagonalizable(&self) -> Result<bool, FieldError> {
        let chi = self.charpoly()?;
        let deriv: Vec<CycNumber> = chi
            .iter()
            .enumerate()
            .skip(1)
            .map(|(i, c)| c.try_mul(&CycNumber::from_int(i as i64)))
            .collect::<Result<_, _>>()?;
        let g = poly::gcd(&chi, &deriv)?;
        let (sqfree, _) = poly::divrem(&chi, &g)?;
        Ok(self.eval_poly(&sqfree)?.is_zero())
    }
}

impl Mul for &CycMatrix {
    type Output = CycMatrix;
    fn mul(self, rhs: &CycMatrix) -> CycMatrix {
        self.try_mul(rhs).unwrap_or_else(|e| panic!("matrix product: {e}"))
    }
}

impl fmt::Display for CycMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, row) in self.rows().iter().enumerate() {
            if i > 0 {
                writeln!(f)?;
            }
            let cells: Vec<String> = row.iter().map(|c| c.to_string()).collect();
            write!(f, "[{}]", cells.join(", "))?;
        }
        Ok(())
    }
}

/// Polynomials over cyclotomic fields, ascending coefficients.
mod poly {
    use super::*;

    fn trim(p: &mut Vec<CycNumber>) {
        while p.last().is_some_and(CycNumber::is_zero) {
            p.pop();
        }
    }

    pub(super) fn divrem(a: &[CycNumber], b: &[CycNumber]) -> Result<(Vec<CycNumber>, Vec<CycNumber>), FieldError> {
        let mut b = b.to_vec();
        trim(&mut b);
        if b.is_empty() {
            return Err(FieldError::DivisionByZero);
        }
        let mut rem = a.to_vec();
        trim(&mut rem);
        let db = b.len() - 1;
        if rem.len() < b.len() {
            return Ok((vec![], rem));
        }
        let lead_inv = b[db].inv()?;
        let mut quot = vec![CycNumber::zero(); rem.len() - db];
        for i in (0..quot.len()).rev() {
            let c = rem[i + db].try_mul(&lead_inv)?;
            if !c.is_zero() {
                for (j, bj) in b.iter().enumerate() {
                    rem[i + j] = rem[i + j].try_sub(&c.try_mul(bj)?)?;
                }
            }
            quot[i] = c;
        }
        trim(&mut rem);
        Ok((quot, rem))
    }

    pub(super) fn gcd(a: &[CycNumber], b: &[CycNumber]) -> Result<Vec<CycNumber>, FieldError> {
        let (mut x, mut y) = (a.to_vec(), b.to_vec());
        trim(&mut x);
        trim(&mut y);
        while !y.is_empty() {
            let (_, r) = divrem(&x, &y)?;
            x = std::mem::replace(&mut y, r);
        }
        Ok(x)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn m(rows: &[&[i64]]) -> CycMatrix {
        CycMatrix::from_rows(rows.iter().map(|r| r.iter().map(|&x| CycNumber::from_int(x)).collect()).collect()).unwrap()
    }

    #[test]
    fn sl2_generators() {
        let s = m(&[&[0, -1], &[1, 0]]);
        let t = m(&[&[1, 1], &[0, 1]]);
        let t_inv = t.inverse().unwrap().unwrap();
        assert_eq!(t_inv, m(&[&[1, -1], &[0, 1]]));
        let u = &s * &t_inv;
        assert_eq!(u, m(&[&[0, -1], &[1, -1]]));
        assert!(u.pow(3).unwrap().is_identity());
        assert!(s.pow(4).unwrap().is_identity());
        assert!(s.pow(2).unwrap().is_scalar(&CycNumber::from_int(-1)));
        assert_ne!(&s * &t, u);
    }

    #[test]
    fn singular_inverse() {
        assert!(m(&[&[1, 2], &[2, 4]]).inverse().unwrap().is_none());
    }

    #[test]
    fn charpoly_and_diagonalizability() {
        let t = m(&[&[1, 1], &[0, 1]]);
        let chi = t.charpoly().unwrap();
        assert_eq!(chi, vec![1.into(), (-2).into(), 1.into()]);
        assert!(!t.is_diagonalizable().unwrap());
        let s = m(&[&[0, -1], &[1, 0]]);
        assert!(s.is_diagonalizable().unwrap());
        assert!(CycMatrix::identity(3).is_diagonalizable().unwrap());
        let p = m(&[&[0, 1, 0], &[0, 0, 1], &[1, 0, 0]]);
        assert!(p.is_diagonalizable().unwrap());
    }

    #[test]
    fn block_diagonal() {
        let a = m(&[&[2]]);
        let b = m(&[&[0, 1], &[1, 0]]);
        let d = a.block_diag(&b);
        assert_eq!(d, m(&[&[2, 0, 0], &[0, 0, 1], &[0, 1, 0]]));
        assert_eq!(d.trace().unwrap(), CycNumber::from_int(2));
    }
}
