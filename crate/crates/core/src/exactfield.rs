//! Exact rationals and elements of cyclotomic fields Q(ζ_N).
//!
//! A [`CycNumber`] stores power-basis coordinates relative to
//! `1, ζ_N, …, ζ_N^{φ(N)-1}` modulo the cyclotomic polynomial `Φ_N`, so two
//! values of the same order are equal exactly when their coordinate lists
//! are. Values of different orders are lifted to the lcm of the orders before
//! any arithmetic or comparison.

use std::fmt;
use std::ops::{Add, AddAssign, Div, Mul, Neg, Sub, SubAssign};
use std::str::FromStr;
use std::sync::OnceLock;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

/// Exact rational number, always kept in lowest terms with a positive denominator.
pub type Rational = BigRational;

/// Largest cyclotomic order accepted anywhere in the crate.
pub const MAX_ORDER: u32 = 360;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum FieldError {
    #[error("division by zero")]
    DivisionByZero,
    #[error("cyclotomic order must be positive")]
    ZeroOrder,
    #[error("cyclotomic order {0} exceeds the supported bound {MAX_ORDER}")]
    OrderTooLarge(u64),
    #[error("order {order} expects {expected} coefficients, got {got}")]
    CoefficientCount {
        order: u32,
        expected: usize,
        got: usize,
    },
    #[error("invalid rational literal {0:?}")]
    BadRational(String),
}

/// Parses `p`, `p/q`, `-p/q` (an optional U+2212 minus sign is accepted too).
pub fn parse_rational(s: &str) -> Result<Rational, FieldError> {
    let bad = || FieldError::BadRational(s.to_string());
    let (neg, body) = if let Some(rest) = s.strip_prefix('-') {
        (true, rest)
    } else if let Some(rest) = s.strip_prefix('\u{2212}') {
        (true, rest)
    } else {
        (false, s)
    };
    if body.is_empty() || !body.chars().all(|c| c.is_ascii_digit() || c == '/') {
        return Err(bad());
    }
    let (num, den) = match body.split_once('/') {
        Some((n, d)) => (n, d),
        None => (body, "1"),
    };
    if num.is_empty() || den.is_empty() || den.contains('/') {
        return Err(bad());
    }
    let num = BigInt::from_str(num).map_err(|_| bad())?;
    let den = BigInt::from_str(den).map_err(|_| bad())?;
    if den.is_zero() {
        return Err(bad());
    }
    let r = Rational::new(num, den);
    Ok(if neg { -r } else { r })
}

/// Renders `p` for integers and `p/q` otherwise.
pub fn format_rational(r: &Rational) -> String {
    if r.denom().is_one() {
        r.numer().to_string()
    } else {
        format!("{}/{}", r.numer(), r.denom())
    }
}

pub fn euler_phi(n: u32) -> u32 {
    let mut n = n;
    let mut result = n;
    let mut p = 2;
    while p * p <= n {
        if n.is_multiple_of(p) {
            while n.is_multiple_of(p) {
                n /= p;
            }
            result -= result / p;
        }
        p += 1;
    }
    if n > 1 {
        result -= result / n;
    }
    result
}

fn divisors(n: u32) -> Vec<u32> {
    (1..=n).filter(|d| n.is_multiple_of(*d)).collect()
}

/// Exact quotient of integer polynomials (ascending coefficients) by a monic divisor.
fn exact_div_monic(num: &[i64], den: &[i64]) -> Vec<i64> {
    let dd = den.len() - 1;
    let mut rem = num.to_vec();
    let mut quot = vec![0i64; num.len() - dd];
    for i in (0..quot.len()).rev() {
        let c = rem[i + dd];
        quot[i] = c;
        if c != 0 {
            for (j, &dj) in den.iter().enumerate() {
                rem[i + j] = rem[i + j]
                    .checked_sub(c.checked_mul(dj).expect("cyclotomic coefficient overflow"))
                    .expect("cyclotomic coefficient overflow");
            }
        }
    }
    debug_assert!(rem.iter().all(|&c| c == 0));
    quot
}

fn compute_cyclotomic(n: u32, known: &dyn Fn(u32) -> Vec<i64>) -> Vec<i64> {
    let mut p = vec![0i64; n as usize + 1];
    p[0] = -1;
    p[n as usize] = 1;
    for d in divisors(n).into_iter().filter(|&d| d < n) {
        p = exact_div_monic(&p, &known(d));
    }
    p
}

fn cyclotomic_table() -> &'static [Vec<i64>] {
    static TABLE: OnceLock<Vec<Vec<i64>>> = OnceLock::new();
    TABLE.get_or_init(|| {
        let mut table: Vec<Vec<i64>> = vec![Vec::new()];
        for n in 1..=MAX_ORDER {
            let phi = compute_cyclotomic(n, &|d| table[d as usize].clone());
            table.push(phi);
        }
        table
    })
}

/// The `n`-th cyclotomic polynomial `Φ_n` as ascending integer coefficients.
///
/// Panics if `n == 0`.
pub fn cyclotomic_polynomial(n: u32) -> Vec<i64> {
    assert!(n >= 1, "cyclotomic_polynomial: n must be positive");
    if n <= MAX_ORDER {
        return cyclotomic_table()[n as usize].clone();
    }
    compute_cyclotomic(n, &cyclotomic_polynomial)
}

fn cyclotomic_ref(n: u32) -> &'static [i64] {
    &cyclotomic_table()[n as usize]
}

fn check_order(n: u64) -> Result<u32, FieldError> {
    if n == 0 {
        Err(FieldError::ZeroOrder)
    } else if n > MAX_ORDER as u64 {
        Err(FieldError::OrderTooLarge(n))
    } else {
        Ok(n as u32)
    }
}

/// Reduces a polynomial in `ζ_n` to canonical power-basis coordinates.
fn reduce_mod_cyclotomic(mut poly: Vec<Rational>, n: u32) -> Vec<Rational> {
    let phi = cyclotomic_ref(n);
    let deg = phi.len() - 1;
    if poly.len() > n as usize {
        // ζ^n = 1
        let (head, tail) = poly.split_at_mut(n as usize);
        for (i, c) in tail.iter_mut().enumerate() {
            if !c.is_zero() {
                head[i % n as usize] += std::mem::take(c);
            }
        }
        poly.truncate(n as usize);
    }
    for i in (deg..poly.len()).rev() {
        if poly[i].is_zero() {
            continue;
        }
        let c = std::mem::take(&mut poly[i]);
        for (j, &pj) in phi[..deg].iter().enumerate() {
            if pj != 0 {
                poly[i - deg + j] -= &c * BigInt::from(pj);
            }
        }
    }
    poly.resize(deg, Rational::zero());
    poly
}

// Dense polynomials over Q used for inversion.
fn poly_trim(p: &mut Vec<Rational>) {
    while p.last().is_some_and(|c| c.is_zero()) {
        p.pop();
    }
}

fn poly_divrem(a: &[Rational], b: &[Rational]) -> (Vec<Rational>, Vec<Rational>) {
    let mut rem = a.to_vec();
    poly_trim(&mut rem);
    let db = b.len() - 1;
    let lead_inv = b[db].recip();
    if rem.len() < b.len() {
        return (vec![], rem);
    }
    let mut quot = vec![Rational::zero(); rem.len() - db];
    for i in (0..quot.len()).rev() {
        let c = &rem[i + db] * &lead_inv;
        if !c.is_zero() {
            for (j, bj) in b.iter().enumerate() {
                rem[i + j] -= &c * bj;
            }
        }
        quot[i] = c;
    }
    poly_trim(&mut rem);
    (quot, rem)
}

fn poly_mul(a: &[Rational], b: &[Rational]) -> Vec<Rational> {
    if a.is_empty() || b.is_empty() {
        return vec![];
    }
    let mut out = vec![Rational::zero(); a.len() + b.len() - 1];
    for (i, x) in a.iter().enumerate() {
        if x.is_zero() {
            continue;
        }
        for (j, y) in b.iter().enumerate() {
            out[i + j] += x * y;
        }
    }
    out
}

fn poly_sub(a: &[Rational], b: &[Rational]) -> Vec<Rational> {
    let mut out = vec![Rational::zero(); a.len().max(b.len())];
    for (i, x) in a.iter().enumerate() {
        out[i] += x;
    }
    for (i, y) in b.iter().enumerate() {
        out[i] -= y;
    }
    poly_trim(&mut out);
    out
}

/// Inverse of `a` modulo the irreducible `m`, via the extended Euclidean algorithm.
fn poly_inverse_mod(a: &[Rational], m: &[Rational]) -> Vec<Rational> {
    let (mut r0, mut r1) = (m.to_vec(), a.to_vec());
    poly_trim(&mut r1);
    let (mut t0, mut t1): (Vec<Rational>, Vec<Rational>) = (vec![], vec![Rational::one()]);
    while r1.len() > 1 {
        let (q, r) = poly_divrem(&r0, &r1);
        let t2 = poly_sub(&t0, &poly_mul(&q, &t1));
        r0 = std::mem::replace(&mut r1, r);
        t0 = std::mem::replace(&mut t1, t2);
    }
    // r1 is a nonzero constant since m is irreducible and a ≠ 0 mod m
    let c = r1[0].recip();
    let mut inv: Vec<Rational> = t1.into_iter().map(|t| t * &c).collect();
    let (_, rem) = poly_divrem(&inv, m);
    inv = rem;
    inv
}

/// An element of the cyclotomic field Q(ζ_N) in canonical power-basis form.
#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(try_from = "CycRecord", into = "CycRecord")]
pub struct CycNumber {
    order: u32,
    coeffs: Vec<Rational>,
}

#[derive(Serialize, Deserialize)]
struct CycRecord {
    order: u32,
    coeffs: Vec<String>,
}

impl TryFrom<CycRecord> for CycNumber {
    type Error = FieldError;

    fn try_from(rec: CycRecord) -> Result<Self, FieldError> {
        let coeffs = rec
            .coeffs
            .iter()
            .map(|s| parse_rational(s))
            .collect::<Result<Vec<_>, _>>()?;
        CycNumber::new(rec.order, coeffs)
    }
}

impl From<CycNumber> for CycRecord {
    fn from(c: CycNumber) -> Self {
        CycRecord {
            order: c.order,
            coeffs: c.coeffs.iter().map(format_rational).collect(),
        }
    }
}

impl CycNumber {
    /// Builds an element from its power-basis coordinates; the list must have length φ(order).
    pub fn new(order: u32, coeffs: Vec<Rational>) -> Result<Self, FieldError> {
        let order = check_order(order as u64)?;
        let expected = euler_phi(order) as usize;
        if coeffs.len() != expected {
            return Err(FieldError::CoefficientCount {
                order,
                expected,
                got: coeffs.len(),
            });
        }
        Ok(CycNumber { order, coeffs })
    }

    /// Reduces an arbitrary polynomial in ζ_N (ascending coefficients).
    pub fn from_poly(order: u32, poly: Vec<Rational>) -> Result<Self, FieldError> {
        let order = check_order(order as u64)?;
        Ok(CycNumber {
            order,
            coeffs: reduce_mod_cyclotomic(poly, order),
        })
    }

    pub fn from_rational(r: Rational) -> Self {
        CycNumber {
            order: 1,
            coeffs: vec![r],
        }
    }

    pub fn from_int(n: i64) -> Self {
        Self::from_rational(Rational::from_integer(n.into()))
    }

    pub fn from_bigint(n: BigInt) -> Self {
        Self::from_rational(Rational::from_integer(n))
    }

    pub fn zero() -> Self {
        Self::from_int(0)
    }

    pub fn one() -> Self {
        Self::from_int(1)
    }

    /// `ζ_n^k`, depending only on `k mod n`.
    pub fn root_of_unity(n: u32, k: i64) -> Result<Self, FieldError> {
        let n = check_order(n as u64)?;
        let e = k.rem_euclid(n as i64) as usize;
        let mut poly = vec![Rational::zero(); e + 1];
        poly[e] = Rational::one();
        Ok(CycNumber {
            order: n,
            coeffs: reduce_mod_cyclotomic(poly, n),
        })
    }

    pub fn order(&self) -> u32 {
        self.order
    }

    pub fn coeffs(&self) -> &[Rational] {
        &self.coeffs
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(Zero::is_zero)
    }

    pub fn is_one(&self) -> bool {
        self.coeffs[0].is_one() && self.coeffs[1..].iter().all(Zero::is_zero)
    }

    /// The rational value, if this element lies in Q.
    pub fn to_rational(&self) -> Option<Rational> {
        if self.coeffs[1..].iter().all(Zero::is_zero) {
            return Some(self.coeffs[0].clone());
        }
        self.descend(1).map(|c| c.coeffs[0].clone())
    }

    /// The integer value, if this element lies in Z.
    pub fn to_integer(&self) -> Option<BigInt> {
        self.to_rational()
            .filter(|r| r.is_integer())
            .map(|r| r.to_integer())
    }

    /// Embeds into Q(ζ_m); `order` must divide `m`.
    pub fn lift(&self, m: u32) -> Result<Self, FieldError> {
        let m = check_order(m as u64)?;
        assert!(
            m % self.order == 0,
            "lift: order {} does not divide {}",
            self.order,
            m
        );
        if m == self.order {
            return Ok(self.clone());
        }
        if self.order == 1 || self.order == 2 {
            let mut coeffs = vec![Rational::zero(); euler_phi(m) as usize];
            coeffs[0] = self.coeffs[0].clone();
            return Ok(CycNumber { order: m, coeffs });
        }
        let step = (m / self.order) as usize;
        let mut poly = vec![Rational::zero(); (self.coeffs.len() - 1) * step + 1];
        for (j, c) in self.coeffs.iter().enumerate() {
            poly[j * step] = c.clone();
        }
        Ok(CycNumber {
            order: m,
            coeffs: reduce_mod_cyclotomic(poly, m),
        })
    }

    /// The same element expressed in Q(ζ_n) for `n | order`, if it lies in that subfield.
    pub fn descend(&self, n: u32) -> Option<Self> {
        if n == 0 || !self.order.is_multiple_of(n) {
            return None;
        }
        if n == self.order {
            return Some(self.clone());
        }
        let unknowns = euler_phi(n) as usize;
        let rows = self.coeffs.len();
        // columns: images of ζ_n^j in Q(ζ_order)
        let columns: Vec<CycNumber> = (0..unknowns)
            .map(|j| {
                CycNumber::root_of_unity(n, j as i64)
                    .and_then(|z| z.lift(self.order))
                    .expect("orders already validated")
            })
            .collect();
        let mut aug: Vec<Vec<Rational>> = (0..rows)
            .map(|r| {
                let mut row: Vec<Rational> = columns.iter().map(|c| c.coeffs[r].clone()).collect();
                row.push(self.coeffs[r].clone());
                row
            })
            .collect();
        let solution = solve_augmented(&mut aug, unknowns)?;
        Some(CycNumber {
            order: n,
            coeffs: solution,
        })
    }

    /// Re-expresses the element in the smallest Q(ζ_n), `n | order`, that contains it.
    pub fn simplify(&self) -> Self {
        for n in divisors(self.order) {
            if let Some(c) = self.descend(n) {
                return c;
            }
        }
        self.clone()
    }

    fn common_order(&self, other: &Self) -> Result<u32, FieldError> {
        check_order(self.order.lcm(&other.order) as u64)
    }

    fn aligned(&self, other: &Self) -> Result<(Self, Self), FieldError> {
        let m = self.common_order(other)?;
        Ok((self.lift(m)?, other.lift(m)?))
    }

    pub fn try_add(&self, other: &Self) -> Result<Self, FieldError> {
        if self.order == other.order {
            let coeffs = self
                .coeffs
                .iter()
                .zip(&other.coeffs)
                .map(|(a, b)| a + b)
                .collect();
            return Ok(CycNumber {
                order: self.order,
                coeffs,
            });
        }
        let (a, b) = self.aligned(other)?;
        a.try_add(&b)
    }

    pub fn try_sub(&self, other: &Self) -> Result<Self, FieldError> {
        self.try_add(&-other)
    }

    pub fn try_mul(&self, other: &Self) -> Result<Self, FieldError> {
        if self.order != other.order {
            let (a, b) = self.aligned(other)?;
            return a.try_mul(&b);
        }
        if self.coeffs.len() == 1 {
            return Ok(CycNumber {
                order: self.order,
                coeffs: vec![&self.coeffs[0] * &other.coeffs[0]],
            });
        }
        let product = poly_mul(&self.coeffs, &other.coeffs);
        Ok(CycNumber {
            order: self.order,
            coeffs: reduce_mod_cyclotomic(product, self.order),
        })
    }

    pub fn inv(&self) -> Result<Self, FieldError> {
        if self.is_zero() {
            return Err(FieldError::DivisionByZero);
        }
        if self.coeffs.len() == 1 {
            return Ok(CycNumber {
                order: self.order,
                coeffs: vec![self.coeffs[0].recip()],
            });
        }
        let modulus: Vec<Rational> = cyclotomic_ref(self.order)
            .iter()
            .map(|&c| Rational::from_integer(c.into()))
            .collect();
        let mut coeffs = poly_inverse_mod(&self.coeffs, &modulus);
        coeffs.resize(self.coeffs.len(), Rational::zero());
        Ok(CycNumber {
            order: self.order,
            coeffs,
        })
    }

    pub fn try_div(&self, other: &Self) -> Result<Self, FieldError> {
        self.try_mul(&other.inv()?)
    }

    pub fn pow(&self, k: i64) -> Result<Self, FieldError> {
        let base = if k < 0 { self.inv()? } else { self.clone() };
        let mut e = k.unsigned_abs();
        let mut acc = CycNumber::one().lift(self.order)?;
        let mut sq = base;
        while e > 0 {
            if e & 1 == 1 {
                acc = &acc * &sq;
            }
            e >>= 1;
            if e > 0 {
                sq = &sq * &sq;
            }
        }
        Ok(acc)
    }

    pub fn scale(&self, r: &Rational) -> Self {
        CycNumber {
            order: self.order,
            coeffs: self.coeffs.iter().map(|c| c * r).collect(),
        }
    }

    /// Floating-point approximation `(re, im)`, for display only.
    pub fn approx(&self) -> (f64, f64) {
        let mut re = 0.0;
        let mut im = 0.0;
        for (j, c) in self.coeffs.iter().enumerate() {
            let v = c.to_f64().unwrap_or(f64::NAN);
            let angle = 2.0 * std::f64::consts::PI * j as f64 / self.order as f64;
            re += v * angle.cos();
            im += v * angle.sin();
        }
        (re, im)
    }
}

/// Gaussian elimination on an augmented system; `None` if inconsistent.
fn solve_augmented(aug: &mut [Vec<Rational>], unknowns: usize) -> Option<Vec<Rational>> {
    let rows = aug.len();
    let mut pivot_cols = Vec::new();
    let mut r = 0;
    for col in 0..unknowns {
        let Some(p) = (r..rows).find(|&i| !aug[i][col].is_zero()) else {
            continue;
        };
        aug.swap(r, p);
        let inv = aug[r][col].recip();
        for x in aug[r].iter_mut() {
            *x *= &inv;
        }
        let pivot_row = aug[r].clone();
        for (i, row) in aug.iter_mut().enumerate() {
            if i != r && !row[col].is_zero() {
                let f = row[col].clone();
                for (x, p) in row.iter_mut().zip(&pivot_row) {
                    *x -= &f * p;
                }
            }
        }
        pivot_cols.push(col);
        r += 1;
    }
    if aug[r..].iter().any(|row| !row[unknowns].is_zero()) {
        return None;
    }
    let mut sol = vec![Rational::zero(); unknowns];
    for (i, &col) in pivot_cols.iter().enumerate() {
        sol[col] = aug[i][unknowns].clone();
    }
    Some(sol)
}

impl PartialEq for CycNumber {
    fn eq(&self, other: &Self) -> bool {
        if self.order == other.order {
            return self.coeffs == other.coeffs;
        }
        match self.aligned(other) {
            Ok((a, b)) => a.coeffs == b.coeffs,
            Err(_) => false,
        }
    }
}

impl Eq for CycNumber {}

impl Default for CycNumber {
    fn default() -> Self {
        CycNumber::zero()
    }
}

impl From<i64> for CycNumber {
    fn from(n: i64) -> Self {
        CycNumber::from_int(n)
    }
}

impl From<Rational> for CycNumber {
    fn from(r: Rational) -> Self {
        CycNumber::from_rational(r)
    }
}

impl Neg for &CycNumber {
    type Output = CycNumber;

    fn neg(self) -> CycNumber {
        CycNumber {
            order: self.order,
            coeffs: self.coeffs.iter().map(|c| -c).collect(),
        }
    }
}

impl Neg for CycNumber {
    type Output = CycNumber;

    fn neg(mut self) -> CycNumber {
        for c in self.coeffs.iter_mut() {
            *c = -std::mem::take(c);
        }
        self
    }
}

// Operator forms panic when the lcm of the orders exceeds MAX_ORDER; use the
// `try_*` methods where that can happen.
macro_rules! forward_binop {
    ($trait:ident, $method:ident, $try:ident) => {
        impl $trait<&CycNumber> for &CycNumber {
            type Output = CycNumber;
            fn $method(self, rhs: &CycNumber) -> CycNumber {
                self.$try(rhs).unwrap_or_else(|e| panic!("cyclotomic arithmetic: {e}"))
            }
        }
        impl $trait<CycNumber> for CycNumber {
            type Output = CycNumber;
            fn $method(self, rhs: CycNumber) -> CycNumber {
                (&self).$method(&rhs)
            }
        }
        impl $trait<&CycNumber> for CycNumber {
            type Output = CycNumber;
            fn $method(self, rhs: &CycNumber) -> CycNumber {
                (&self).$method(rhs)
            }
        }
    };
}

forward_binop!(Add, add, try_add);
forward_binop!(Sub, sub, try_sub);
forward_binop!(Mul, mul, try_mul);
forward_binop!(Div, div, try_div);

impl AddAssign<&CycNumber> for CycNumber {
    fn add_assign(&mut self, rhs: &CycNumber) {
        if self.order == rhs.order {
            for (a, b) in self.coeffs.iter_mut().zip(&rhs.coeffs) {
                *a += b;
            }
        } else {
            *self = &*self + rhs;
        }
    }
}

impl SubAssign<&CycNumber> for CycNumber {
    fn sub_assign(&mut self, rhs: &CycNumber) {
        if self.order == rhs.order {
            for (a, b) in self.coeffs.iter_mut().zip(&rhs.coeffs) {
                *a -= b;
            }
        } else {
            *self = &*self - rhs;
        }
    }
}

impl fmt::Display for CycNumber {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut terms = Vec::new();
        for (j, c) in self.coeffs.iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            let basis = match j {
                0 => String::new(),
                1 => format!("ζ{}", self.order),
                _ => format!("ζ{}^{}", self.order, j),
            };
            let mag = c.abs();
            let body = if basis.is_empty() {
                format_rational(&mag)
            } else if mag.is_one() {
                basis
            } else {
                format!("{}·{}", format_rational(&mag), basis)
            };
            terms.push((c.is_negative(), body));
        }
        if terms.is_empty() {
            return write!(f, "0");
        }
        for (i, (neg, body)) in terms.iter().enumerate() {
            match (i, neg) {
                (0, true) => write!(f, "-{body}")?,
                (0, false) => write!(f, "{body}")?,
                (_, true) => write!(f, " - {body}")?,
                (_, false) => write!(f, " + {body}")?,
            }
        }
        Ok(())
    }
}
