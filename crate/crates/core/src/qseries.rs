//! Truncated Puiseux series in `q` with exact coefficients.
//!
//! Exponents live on a grid `(1/D)·Z`. Every series carries an explicit
//! validity bound: coefficients of `q^{e/D}` are trusted for `e < valid_to`
//! and unknown beyond it. Arithmetic propagates that bound conservatively, so
//! identity checks can compare two series on the intersection of their
//! windows without ever reading an untrusted coefficient.

use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};

use crate::exactfield::{format_rational, CycNumber, Rational};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum SeriesError {
    #[error("division by (truncated) zero")]
    DivisionByZero,
    #[error("valuation of zero undefined")]
    ZeroValuation,
    #[error("invalid series record: {0}")]
    BadRecord(String),
}

/// A truncated Laurent/Puiseux series `Σ c_i q^{(lead+i)/grid}`, trusted below `q^{valid_to/grid}`.
#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(try_from = "SeriesRecord", into = "SeriesRecord")]
pub struct QSeries {
    grid: u32,
    lead: i64,
    coeffs: Vec<CycNumber>,
    valid_to: i64,
}

#[derive(Serialize, Deserialize)]
struct SeriesRecord {
    grid: u32,
    lead: i64,
    valid_to: i64,
    coeffs: Vec<CycNumber>,
}

impl TryFrom<SeriesRecord> for QSeries {
    type Error = SeriesError;

    fn try_from(rec: SeriesRecord) -> Result<Self, SeriesError> {
        if rec.grid == 0 {
            return Err(SeriesError::BadRecord("grid must be positive".into()));
        }
        if rec.valid_to < rec.lead || (rec.valid_to - rec.lead) as usize != rec.coeffs.len() {
            return Err(SeriesError::BadRecord(format!(
                "expected valid_to - lead = {} coefficients, got {}",
                rec.valid_to - rec.lead,
                rec.coeffs.len()
            )));
        }
        Ok(QSeries::from_parts(rec.grid, rec.lead, rec.coeffs, rec.valid_to))
    }
}

impl From<QSeries> for SeriesRecord {
    fn from(s: QSeries) -> Self {
        SeriesRecord {
            grid: s.grid,
            lead: s.lead,
            valid_to: s.valid_to,
            coeffs: s.coeffs,
        }
    }
}

impl QSeries {
    /// Builds and normalizes a series; missing trailing coefficients up to `valid_to` are zero.
    ///
    /// Panics if `grid == 0`, `valid_to < lead`, or more coefficients than the window holds are given.
    pub fn from_parts(grid: u32, lead: i64, mut coeffs: Vec<CycNumber>, valid_to: i64) -> Self {
        assert!(grid > 0, "QSeries grid must be positive");
        assert!(valid_to >= lead, "QSeries valid_to must be at least lead");
        let len = (valid_to - lead) as usize;
        assert!(coeffs.len() <= len, "more coefficients than the validity window holds");
        coeffs.resize(len, CycNumber::zero());
        QSeries {
            grid,
            lead,
            coeffs,
            valid_to,
        }
        .normalized()
    }

    /// Integer-exponent series `Σ c_i q^{lead+i}` trusted up to its last coefficient.
    pub fn from_integer_coeffs<I: Into<BigInt>>(lead: i64, coeffs: impl IntoIterator<Item = I>) -> Self {
        let coeffs: Vec<CycNumber> = coeffs.into_iter().map(|c| CycNumber::from_bigint(c.into())).collect();
        let valid_to = lead + coeffs.len() as i64;
        Self::from_parts(1, lead, coeffs, valid_to)
    }

    /// The zero series, known to vanish below `q^{valid_to}`.
    pub fn zero(valid_to: i64) -> Self {
        QSeries {
            grid: 1,
            lead: valid_to,
            coeffs: Vec::new(),
            valid_to,
        }
    }

    /// A constant, trusted for exponents below `valid_to` (integer units).
    pub fn constant(c: CycNumber, valid_to: i64) -> Self {
        Self::monomial(c, 0, 1, valid_to)
    }

    /// `c·q^{exponent/grid}` trusted below `q^{valid_to/grid}`.
    pub fn monomial(c: CycNumber, exponent: i64, grid: u32, valid_to: i64) -> Self {
        if exponent >= valid_to {
            return Self::from_parts(grid, valid_to, vec![], valid_to);
        }
        Self::from_parts(grid, exponent, vec![c], valid_to)
    }

    /// `1` with `precision` trusted terms on grid 1.
    pub fn one(precision: i64) -> Self {
        Self::constant(CycNumber::one(), precision)
    }

    pub fn grid(&self) -> u32 {
        self.grid
    }

    pub fn lead(&self) -> i64 {
        self.lead
    }

    pub fn valid_to(&self) -> i64 {
        self.valid_to
    }

    pub fn coeffs(&self) -> &[CycNumber] {
        &self.coeffs
    }

    /// Number of trusted grid steps from the lead.
    pub fn precision(&self) -> i64 {
        self.valid_to - self.lead
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// The exponent of the lowest nonzero term.
    pub fn valuation(&self) -> Result<Rational, SeriesError> {
        if self.is_zero() {
            return Err(SeriesError::ZeroValuation);
        }
        Ok(Rational::new(self.lead.into(), self.grid.into()))
    }

    /// Coefficient of the lowest nonzero term.
    pub fn leading_coefficient(&self) -> Option<&CycNumber> {
        self.coeffs.first()
    }

    /// The exclusive upper bound of the validity window as a rational exponent.
    pub fn valid_bound(&self) -> Rational {
        Rational::new(self.valid_to.into(), self.grid.into())
    }

    /// Coefficient of `q^exponent`, or `None` when the exponent is not below the validity bound.
    pub fn coefficient(&self, exponent: &Rational) -> Option<CycNumber> {
        if exponent >= &self.valid_bound() {
            return None;
        }
        let scaled = exponent * Rational::from_integer(self.grid.into());
        if !scaled.is_integer() {
            return Some(CycNumber::zero());
        }
        let e: i64 = scaled.to_integer().try_into().ok()?;
        if e < self.lead {
            return Some(CycNumber::zero());
        }
        Some(self.coeffs[(e - self.lead) as usize].clone())
    }

    /// Coefficient of `q^n` for an integer exponent.
    pub fn coefficient_at(&self, n: i64) -> Option<CycNumber> {
        self.coefficient(&Rational::from_integer(n.into()))
    }

    /// Re-expresses the series on the grid `grid·factor` (no normalization).
    fn spread(&self, factor: u32) -> Self {
        if factor == 1 {
            return self.clone();
        }
        let f = factor as i64;
        let lead = self.lead * f;
        let valid_to = self.valid_to * f;
        let mut coeffs = vec![CycNumber::zero(); (valid_to - lead) as usize];
        for (i, c) in self.coeffs.iter().enumerate() {
            coeffs[i * factor as usize] = c.clone();
        }
        QSeries {
            grid: self.grid * factor,
            lead,
            coeffs,
            valid_to,
        }
    }

    /// The same series on grid `d`, which must be a multiple of the current grid.
    pub fn regrid(&self, d: u32) -> Self {
        assert!(d.is_multiple_of(self.grid), "regrid target must be a multiple of the grid");
        self.spread(d / self.grid)
    }

    /// Trims leading zeros and divides the grid down as far as the nonzero terms allow.
    fn normalized(mut self) -> Self {
        let first = self.coeffs.iter().position(|c| !c.is_zero());
        match first {
            None => return Self::zero(self.valid_to.div_euclid(self.grid as i64)),
            Some(k) if k > 0 => {
                self.coeffs.drain(..k);
                self.lead += k as i64;
            }
            _ => {}
        }
        let mut g = (self.grid as i64).gcd(&self.lead);
        for (i, c) in self.coeffs.iter().enumerate() {
            if g == 1 {
                break;
            }
            if !c.is_zero() {
                g = g.gcd(&(i as i64));
            }
        }
        if g > 1 {
            let lead = self.lead / g;
            let valid_to = self.valid_to.div_euclid(g);
            let len = (valid_to - lead) as usize;
            let coeffs = self.coeffs.into_iter().step_by(g as usize).take(len).collect();
            self = QSeries {
                grid: self.grid / g as u32,
                lead,
                coeffs,
                valid_to,
            };
        }
        self
    }

    fn common_grid(&self, other: &Self) -> (Self, Self) {
        let d = self.grid.lcm(&other.grid);
        (self.regrid(d), other.regrid(d))
    }

    /// Drops everything at or beyond `q^{valid_to/grid}` (never extends the window).
    pub fn truncate(&self, valid_to: i64) -> Self {
        if valid_to >= self.valid_to {
            return self.clone();
        }
        let lead = self.lead.min(valid_to);
        let keep = (valid_to - lead).max(0) as usize;
        let coeffs = if self.lead <= valid_to {
            self.coeffs[..keep].to_vec()
        } else {
            vec![]
        };
        QSeries::from_parts(self.grid, lead, coeffs, valid_to)
    }

    fn add_impl(&self, other: &Self, negate: bool) -> Self {
        let (a, b) = self.common_grid(other);
        let valid_to = a.valid_to.min(b.valid_to);
        let lead = a.lead.min(b.lead).min(valid_to);
        let mut coeffs = vec![CycNumber::zero(); (valid_to - lead) as usize];
        for (i, c) in a.coeffs.iter().enumerate() {
            let e = a.lead + i as i64;
            if e >= valid_to {
                break;
            }
            coeffs[(e - lead) as usize] = c.clone();
        }
        for (i, c) in b.coeffs.iter().enumerate() {
            let e = b.lead + i as i64;
            if e >= valid_to {
                break;
            }
            let slot = &mut coeffs[(e - lead) as usize];
            if negate {
                *slot -= c;
            } else {
                *slot += c;
            }
        }
        QSeries::from_parts(a.grid, lead, coeffs, valid_to)
    }

    /// Multiplies every coefficient by `c`.
    pub fn scale(&self, c: &CycNumber) -> Self {
        if c.is_zero() {
            return QSeries::from_parts(self.grid, self.valid_to, vec![], self.valid_to);
        }
        QSeries {
            grid: self.grid,
            lead: self.lead,
            coeffs: self.coeffs.iter().map(|x| x * c).collect(),
            valid_to: self.valid_to,
        }
    }

    /// Multiplies by `q^{shift/grid}` where `grid` is this series' grid.
    pub fn shift(&self, shift: i64) -> Self {
        QSeries {
            grid: self.grid,
            lead: self.lead + shift,
            coeffs: self.coeffs.clone(),
            valid_to: self.valid_to + shift,
        }
    }

    fn mul_impl(&self, other: &Self) -> Self {
        let (a, b) = self.common_grid(other);
        let valid_to = (a.valid_to + b.lead).min(b.valid_to + a.lead);
        if a.is_zero() || b.is_zero() {
            return QSeries::from_parts(a.grid, valid_to, vec![], valid_to);
        }
        let lead = a.lead + b.lead;
        let len = (valid_to - lead) as usize;
        let coeffs = kernel::convolve(&a.coeffs, &b.coeffs, len);
        QSeries::from_parts(a.grid, lead, coeffs, valid_to)
    }

    /// Multiplicative inverse; relative precision is preserved.
    pub fn inverse(&self) -> Result<Self, SeriesError> {
        if self.is_zero() {
            return Err(SeriesError::DivisionByZero);
        }
        let len = self.coeffs.len();
        let coeffs = kernel::invert(&self.coeffs, len).ok_or(SeriesError::DivisionByZero)?;
        let lead = -self.lead;
        Ok(QSeries::from_parts(self.grid, lead, coeffs, lead + len as i64))
    }

    /// `self / other`; the result satisfies `result·other = self` on the validity window.
    pub fn try_div(&self, other: &Self) -> Result<Self, SeriesError> {
        let inv = other.inverse()?;
        Ok(self.mul_impl(&inv))
    }

    /// `self^k`; negative `k` requires a nonzero series.
    pub fn pow(&self, k: i64) -> Result<Self, SeriesError> {
        let base = if k < 0 { self.inverse()? } else { self.clone() };
        if k == 0 {
            let p = if self.is_zero() { self.valid_to.max(1) } else { self.precision() };
            return Ok(QSeries::from_parts(self.grid, 0, vec![CycNumber::one()], p).normalized());
        }
        let mut e = k.unsigned_abs();
        let mut acc: Option<QSeries> = None;
        let mut sq = base;
        loop {
            if e & 1 == 1 {
                acc = Some(match acc {
                    None => sq.clone(),
                    Some(a) => a.mul_impl(&sq),
                });
            }
            e >>= 1;
            if e == 0 {
                break;
            }
            sq = sq.mul_impl(&sq);
        }
        Ok(acc.expect("k != 0"))
    }

    /// The exclusive upper bound of the window shared with `other`.
    pub fn common_bound(&self, other: &Self) -> Rational {
        self.valid_bound().min(other.valid_bound())
    }

    /// Exact comparison of every coefficient below the shared validity bound.
    pub fn agrees_with(&self, other: &Self) -> bool {
        self.first_disagreement(other).is_none()
    }

    /// The lowest exponent inside the shared window at which the two series differ.
    pub fn first_disagreement(&self, other: &Self) -> Option<Rational> {
        let (a, b) = self.common_grid(other);
        let valid_to = a.valid_to.min(b.valid_to);
        let lo = a.lead.min(b.lead);
        for e in lo..valid_to {
            let ca = coeff_or_zero(&a, e);
            let cb = coeff_or_zero(&b, e);
            if ca != cb {
                return Some(Rational::new(e.into(), a.grid.into()));
            }
        }
        None
    }

    /// Number of coefficients compared by [`agrees_with`](Self::agrees_with) from exponent `from` on.
    pub fn window_size_from(&self, other: &Self, from: &Rational) -> Rational {
        let hi = self.common_bound(other);
        if &hi > from {
            hi - from
        } else {
            Rational::zero()
        }
    }

    /// Renders as `q^(a/D)·(c0 + c1·q^(1/D) + …)`.
    pub fn to_factored_string(&self) -> String {
        if self.is_zero() {
            return format!("O(q^{})", exponent_text(self.valid_to, self.grid));
        }
        let mut inner = Vec::new();
        for (i, c) in self.coeffs.iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            inner.push((i as i64, c));
        }
        let body = join_terms(inner.into_iter(), self.grid);
        format!("q^{}·({} + …)", exponent_text(self.lead, self.grid), body)
    }
}

fn coeff_or_zero(s: &QSeries, e: i64) -> CycNumber {
    if e < s.lead || e >= s.valid_to {
        CycNumber::zero()
    } else {
        s.coeffs[(e - s.lead) as usize].clone()
    }
}

fn exponent_text(e: i64, grid: u32) -> String {
    let r = Rational::new(e.into(), grid.into());
    if r.is_integer() {
        format_rational(&r)
    } else {
        format!("({})", format_rational(&r))
    }
}

fn join_terms<'a>(terms: impl Iterator<Item = (i64, &'a CycNumber)>, grid: u32) -> String {
    let mut out = String::new();
    for (k, (e, c)) in terms.enumerate() {
        let (neg, mag) = match c.to_rational() {
            Some(r) if r.is_negative() => (true, format_rational(&-r)),
            Some(r) => (false, format_rational(&r)),
            None => (false, format!("({c})")),
        };
        let power = match Rational::new(e.into(), grid.into()) {
            r if r.is_zero() => String::new(),
            r if r.is_one() => "q".to_string(),
            _ => format!("q^{}", exponent_text(e, grid)),
        };
        let body = match (power.is_empty(), mag.as_str()) {
            (true, _) => mag.clone(),
            (false, "1") => power,
            (false, _) => format!("{mag}·{power}"),
        };
        match (k, neg) {
            (0, true) => out.push_str(&format!("-{body}")),
            (0, false) => out.push_str(&body),
            (_, true) => out.push_str(&format!(" - {body}")),
            (_, false) => out.push_str(&format!(" + {body}")),
        }
    }
    if out.is_empty() {
        out.push('0');
    }
    out
}

/// Expanded rendering: `q^-1 + 196884·q + …`.
impl fmt::Display for QSeries {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "O(q^{})", exponent_text(self.valid_to, self.grid));
        }
        let terms = self
            .coeffs
            .iter()
            .enumerate()
            .filter(|(_, c)| !c.is_zero())
            .map(|(i, c)| (self.lead + i as i64, c));
        write!(f, "{} + …", join_terms(terms, self.grid))
    }
}

/// Structural equality; all zero series compare equal to each other.
impl PartialEq for QSeries {
    fn eq(&self, other: &Self) -> bool {
        if self.is_zero() && other.is_zero() {
            return true;
        }
        self.grid == other.grid
            && self.lead == other.lead
            && self.valid_to == other.valid_to
            && self.coeffs == other.coeffs
    }
}

impl Eq for QSeries {}

impl Add<&QSeries> for &QSeries {
    type Output = QSeries;
    fn add(self, rhs: &QSeries) -> QSeries {
        self.add_impl(rhs, false)
    }
}

impl Sub<&QSeries> for &QSeries {
    type Output = QSeries;
    fn sub(self, rhs: &QSeries) -> QSeries {
        self.add_impl(rhs, true)
    }
}

impl Mul<&QSeries> for &QSeries {
    type Output = QSeries;
    fn mul(self, rhs: &QSeries) -> QSeries {
        self.mul_impl(rhs)
    }
}

impl Neg for &QSeries {
    type Output = QSeries;
    fn neg(self) -> QSeries {
        QSeries {
            grid: self.grid,
            lead: self.lead,
            coeffs: self.coeffs.iter().map(|c| -c).collect(),
            valid_to: self.valid_to,
        }
    }
}

macro_rules! owned_binop {
    ($trait:ident, $method:ident) => {
        impl $trait<QSeries> for QSeries {
            type Output = QSeries;
            fn $method(self, rhs: QSeries) -> QSeries {
                (&self).$method(&rhs)
            }
        }
        impl $trait<&QSeries> for QSeries {
            type Output = QSeries;
            fn $method(self, rhs: &QSeries) -> QSeries {
                (&self).$method(rhs)
            }
        }
    };
}

owned_binop!(Add, add);
owned_binop!(Sub, sub);
owned_binop!(Mul, mul);

/// Coefficient kernels. Rational coefficient lists are cleared of denominators
/// and convolved over big integers; anything else goes through the generic
/// cyclotomic path.
mod kernel {
    use super::*;

    /// Series with all coefficients rational, as `nums / den`.
    struct Packed {
        nums: Vec<BigInt>,
        den: BigInt,
    }

    fn pack(coeffs: &[CycNumber]) -> Option<Packed> {
        let mut den = BigInt::one();
        for c in coeffs {
            if c.coeffs().len() != 1 {
                return None;
            }
            let d = c.coeffs()[0].denom();
            if !d.is_one() {
                den = den.lcm(d);
            }
        }
        let nums = coeffs
            .iter()
            .map(|c| {
                let r = &c.coeffs()[0];
                if den.is_one() {
                    r.numer().clone()
                } else {
                    r.numer() * (&den / r.denom())
                }
            })
            .collect();
        Some(Packed { nums, den })
    }

    fn unpack(nums: Vec<BigInt>, den: &BigInt) -> Vec<CycNumber> {
        nums.into_iter()
            .map(|n| {
                if den.is_one() {
                    CycNumber::from_bigint(n)
                } else {
                    CycNumber::from_rational(Rational::new(n, den.clone()))
                }
            })
            .collect()
    }

    fn nonzero_ints(v: &[BigInt], limit: usize) -> Vec<usize> {
        (0..v.len().min(limit)).filter(|&i| !v[i].is_zero()).collect()
    }

    fn nonzero_cyc(v: &[CycNumber], limit: usize) -> Vec<usize> {
        (0..v.len().min(limit)).filter(|&i| !v[i].is_zero()).collect()
    }

    /// The first `len` coefficients of the product.
    pub(super) fn convolve(a: &[CycNumber], b: &[CycNumber], len: usize) -> Vec<CycNumber> {
        if let (Some(pa), Some(pb)) = (pack(a), pack(b)) {
            let ia = nonzero_ints(&pa.nums, len);
            let ib = nonzero_ints(&pb.nums, len);
            let mut out = vec![BigInt::zero(); len];
            for &i in &ia {
                let x = &pa.nums[i];
                for &j in &ib {
                    if i + j >= len {
                        break;
                    }
                    out[i + j] += x * &pb.nums[j];
                }
            }
            return unpack(out, &(pa.den * pb.den));
        }
        let ia = nonzero_cyc(a, len);
        let ib = nonzero_cyc(b, len);
        let mut out = vec![CycNumber::zero(); len];
        for &i in &ia {
            for &j in &ib {
                if i + j >= len {
                    break;
                }
                out[i + j] += &(&a[i] * &b[j]);
            }
        }
        out
    }

    /// The first `len` coefficients of `1/b`; `None` if `b[0]` is zero.
    pub(super) fn invert(b: &[CycNumber], len: usize) -> Option<Vec<CycNumber>> {
        if b[0].is_zero() {
            return None;
        }
        if let Some(pb) = pack(b) {
            let b0 = &pb.nums[0];
            if b0.abs().is_one() {
                // 1/b = den / B with B integral and B_0 = ±1
                let ib = nonzero_ints(&pb.nums, len);
                let mut u: Vec<BigInt> = Vec::with_capacity(len);
                u.push(b0.clone());
                for n in 1..len {
                    let mut acc = BigInt::zero();
                    for &i in ib.iter().skip(1) {
                        if i > n {
                            break;
                        }
                        acc += &pb.nums[i] * &u[n - i];
                    }
                    u.push(-(acc * b0));
                }
                let scaled = u.into_iter().map(|x| x * &pb.den).collect();
                return Some(unpack(scaled, &BigInt::one()));
            }
        }
        let b0_inv = b[0].inv().ok()?;
        let ib = nonzero_cyc(b, len);
        let mut u: Vec<CycNumber> = Vec::with_capacity(len);
        u.push(b0_inv.clone());
        for n in 1..len {
            let mut acc = CycNumber::zero();
            for &i in ib.iter().skip(1) {
                if i > n {
                    break;
                }
                acc += &(&b[i] * &u[n - i]);
            }
            u.push(-(&acc * &b0_inv));
        }
        Some(u)
    }
}
