//! Classical scalar forms as q-series: `E4`, `E6`, `Δ`, `J`, `δ = η²` and the
//! weakly holomorphic generators `f_n = E4^{r3} E6^{r2} Δ^{r∞}`, together with
//! the remainder/indicator arithmetic that relates them.

use std::collections::HashMap;
use std::sync::{Mutex, OnceLock};

use num_bigint::BigInt;
use num_traits::{One, Pow, Zero};

use crate::exactfield::CycNumber;
use crate::qseries::QSeries;

/// Default number of trusted q-powers for form expansions.
pub const DEFAULT_ORDER: i64 = 128;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum ScalarError {
    #[error("only E4 and E6 are available, not E{0}")]
    UnsupportedWeight(u32),
    #[error("{what} must be positive, got {value}")]
    NonPositive { what: &'static str, value: i64 },
    #[error("counting needs k >= 2 and 0 < p < k, got k = {k}, p = {p}")]
    BadModulus { k: i64, p: i64 },
    #[error("indicator count {formula} disagrees with direct count {direct}")]
    CountMismatch { formula: i64, direct: i64 },
    #[error("unknown form {0:?}; expected E4, E6, Delta, J, delta or f:<n>")]
    UnknownForm(String),
}

/// Non-negative remainders of `-n` by 2 and 3, and the matching power of `Δ`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct RemainderTriple {
    pub r2: i64,
    pub r3: i64,
    pub r_inf: i64,
}

/// Non-negative remainder of `-n` modulo `k`.
pub fn rem_neg(n: i64, k: i64) -> i64 {
    assert!(k > 0, "modulus must be positive");
    (-n).rem_euclid(k)
}

pub fn remainders(n: i64) -> RemainderTriple {
    let r2 = rem_neg(n, 2);
    let r3 = rem_neg(n, 3);
    let r_inf = (n - 3 * r2 - 2 * r3) / 6;
    debug_assert_eq!(6 * r_inf, n - 3 * r2 - 2 * r3);
    RemainderTriple { r2, r3, r_inf }
}

/// `1` iff `r_k(n) + r_k(m) >= k`.
pub fn s_indicator(n: i64, m: i64, k: i64) -> i64 {
    i64::from(rem_neg(n, k) + rem_neg(m, k) >= k)
}

/// `σ_k(n) = Σ_{d | n} d^k`.
pub fn divisor_power_sum(n: i64, k: u32) -> Result<BigInt, ScalarError> {
    if n <= 0 {
        return Err(ScalarError::NonPositive { what: "n", value: n });
    }
    let mut sum = BigInt::zero();
    let mut d = 1;
    while d * d <= n {
        if n % d == 0 {
            sum += BigInt::from(d).pow(k);
            let e = n / d;
            if e != d {
                sum += BigInt::from(e).pow(k);
            }
        }
        d += 1;
    }
    Ok(sum)
}

fn check_order(order: i64) -> Result<(), ScalarError> {
    if order < 1 {
        return Err(ScalarError::NonPositive {
            what: "order",
            value: order,
        });
    }
    Ok(())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
enum CacheKey {
    E4,
    E6,
    Delta,
    Eta2,
    J,
    F(i64),
}

/// Memo of already expanded forms keyed by (form, order); values are identical
/// to a fresh computation.
fn cached(key: CacheKey, order: i64, build: impl FnOnce() -> QSeries) -> QSeries {
    static CACHE: OnceLock<Mutex<HashMap<(CacheKey, i64), QSeries>>> = OnceLock::new();
    let cache = CACHE.get_or_init(Default::default);
    if let Some(s) = cache.lock().expect("form cache poisoned").get(&(key, order)) {
        return s.clone();
    }
    let s = build();
    cache
        .lock()
        .expect("form cache poisoned")
        .entry((key, order))
        .or_insert(s)
        .clone()
}

fn eisenstein_raw(k: u32, valid_to: i64) -> QSeries {
    let (scale, power) = match k {
        4 => (240, 3),
        6 => (-504, 5),
        _ => unreachable!(),
    };
    let mut coeffs = vec![BigInt::one()];
    for n in 1..valid_to {
        coeffs.push(BigInt::from(scale) * divisor_power_sum(n, power).expect("n >= 1"));
    }
    QSeries::from_integer_coeffs(0, coeffs)
}

/// `E4 = 1 + 240 Σ σ3(n) qⁿ` or `E6 = 1 − 504 Σ σ5(n) qⁿ`, trusted for exponents below `order`.
pub fn eisenstein(k: u32, order: i64) -> Result<QSeries, ScalarError> {
    check_order(order)?;
    match k {
        4 => Ok(cached(CacheKey::E4, order, || eisenstein_raw(4, order))),
        6 => Ok(cached(CacheKey::E6, order, || eisenstein_raw(6, order))),
        _ => Err(ScalarError::UnsupportedWeight(k)),
    }
}

/// Coefficients of `∏_{n>=1} (1 − qⁿ)^power` below `q^len`, by multiplying in each factor.
fn euler_product_power(power: u32, len: usize) -> Vec<BigInt> {
    let mut c = vec![BigInt::zero(); len];
    if len == 0 {
        return c;
    }
    c[0] = BigInt::one();
    for n in 1..len {
        for _ in 0..power {
            for i in (n..len).rev() {
                if !c[i - n].is_zero() {
                    let t = c[i - n].clone();
                    c[i] -= t;
                }
            }
        }
    }
    c
}

/// Coefficients of `∏ (1 − qⁿ)` below `q^len` from the pentagonal number theorem.
fn euler_function_pentagonal(len: usize) -> Vec<BigInt> {
    let mut c = vec![BigInt::zero(); len];
    let len = len as i64;
    let mut k: i64 = 0;
    loop {
        let mut placed = false;
        for m in if k == 0 { vec![0] } else { vec![k, -k] } {
            let e = m * (3 * m - 1) / 2;
            if e < len {
                c[e as usize] = if m % 2 == 0 { BigInt::one() } else { -BigInt::one() };
                placed = true;
            }
        }
        if !placed {
            break;
        }
        k += 1;
    }
    c
}

/// `Δ` by two independent routes: `q ∏ (1 − qⁿ)^24` and `(E4³ − E6²)/1728`.
pub fn discriminant_pipelines(order: i64) -> Result<(QSeries, QSeries), ScalarError> {
    check_order(order)?;
    let product = QSeries::from_integer_coeffs(1, euler_product_power(24, order as usize));
    let e4 = eisenstein_raw(4, order + 1);
    let e6 = eisenstein_raw(6, order + 1);
    let e4_3 = e4.pow(3).expect("nonnegative power");
    let e6_2 = e6.pow(2).expect("nonnegative power");
    let via_eisenstein = (&e4_3 - &e6_2).scale(&CycNumber::from_rational(crate::exactfield::Rational::new(
        1.into(),
        1728.into(),
    )));
    Ok((product, via_eisenstein))
}

/// `Δ = q ∏ (1 − qⁿ)^24` with `order` trusted terms from `q¹`.
///
/// Also expands `(E4³ − E6²)/1728` and panics if the two disagree, which
/// would indicate an engine bug.
pub fn discriminant(order: i64) -> Result<QSeries, ScalarError> {
    check_order(order)?;
    Ok(cached(CacheKey::Delta, order, || {
        let (product, via_eisenstein) = discriminant_pipelines(order).expect("order checked");
        if let Some(e) = product.first_disagreement(&via_eisenstein) {
            panic!("consistency error: (E4^3 - E6^2)/1728 and q∏(1-q^n)^24 differ at q^{e}");
        }
        product
    }))
}

/// `δ = q^{1/12} ∏ (1 − qⁿ)²` on grid 12, trusted for `order` q-powers from the lead.
pub fn delta_eta2(order: i64) -> Result<QSeries, ScalarError> {
    check_order(order)?;
    Ok(cached(CacheKey::Eta2, order, || {
        let euler = QSeries::from_integer_coeffs(0, euler_function_pentagonal(order as usize));
        let sq = euler.pow(2).expect("nonnegative power");
        sq.regrid(12).shift(1)
    }))
}

/// `J = E4³/Δ − 744`, trusted for `order` q-powers from `q^{-1}`.
pub fn hauptmodul(order: i64) -> Result<QSeries, ScalarError> {
    check_order(order)?;
    let e4 = eisenstein(4, order)?;
    let delta = discriminant(order)?;
    Ok(cached(CacheKey::J, order, || {
        let ratio = e4
            .pow(3)
            .and_then(|c| c.try_div(&delta))
            .expect("Δ has leading coefficient 1");
        &ratio - &QSeries::constant(CycNumber::from_int(744), order)
    }))
}

/// `f_n = E4^{r3(n)} E6^{r2(n)} Δ^{r∞(n)}`, of weight `2n`.
pub fn f_form(n: i64, order: i64) -> Result<QSeries, ScalarError> {
    check_order(order)?;
    let RemainderTriple { r2, r3, r_inf } = remainders(n);
    let e4 = eisenstein(4, order)?;
    let e6 = eisenstein(6, order)?;
    let delta = discriminant(order)?;
    Ok(cached(CacheKey::F(n), order, || {
        let mut acc = QSeries::one(order);
        if r3 > 0 {
            acc = &acc * &e4.pow(r3).expect("nonnegative power");
        }
        if r2 > 0 {
            acc = &acc * &e6;
        }
        if r_inf != 0 {
            acc = &acc * &delta.pow(r_inf).expect("Δ is invertible");
        }
        acc
    }))
}

/// Both sides of `f_n f_m / f_{n+m} = (J + 744)^{s3(n,m)} (J − 984)^{s2(n,m)}`.
pub fn fnmult_sides(n: i64, m: i64, order: i64) -> Result<(QSeries, QSeries), ScalarError> {
    let lhs = (&f_form(n, order)? * &f_form(m, order)?)
        .try_div(&f_form(n + m, order)?)
        .expect("f_n is never zero");
    let j = hauptmodul(order)?;
    let mut rhs = QSeries::one(order);
    if s_indicator(n, m, 3) == 1 {
        rhs = &rhs * &(&j + &QSeries::constant(CycNumber::from_int(744), order));
    }
    if s_indicator(n, m, 2) == 1 {
        rhs = &rhs * &(&j - &QSeries::constant(CycNumber::from_int(984), order));
    }
    Ok((lhs, rhs))
}

/// Checks the `f_n f_m / f_{n+m}` identity exactly on the shared validity window.
///
/// Returns `false` on a mismatch or when the window holds no coefficient.
pub fn verify_fnmult(n: i64, m: i64, order: i64) -> Result<bool, ScalarError> {
    let (lhs, rhs) = fnmult_sides(n, m, order)?;
    let lowest = lhs.lead().min(rhs.lead());
    let lowest = crate::exactfield::Rational::new(lowest.into(), lhs.grid().into());
    if lhs.common_bound(&rhs) <= lowest {
        return Ok(false);
    }
    Ok(lhs.agrees_with(&rhs))
}

/// Counts `x ∈ xs` with `x ≡ p (mod k)` as `Σ s_k(p, −x) − Σ s_k(p+1, −x)`,
/// cross-checked against a direct count.
pub fn count_congruent(xs: &[i64], k: i64, p: i64) -> Result<i64, ScalarError> {
    if k < 2 || p <= 0 || p >= k {
        return Err(ScalarError::BadModulus { k, p });
    }
    let formula: i64 = xs
        .iter()
        .map(|&x| s_indicator(p, -x, k) - s_indicator(p + 1, -x, k))
        .sum();
    let direct = xs.iter().filter(|&&x| x.rem_euclid(k) == p).count() as i64;
    if formula != direct {
        return Err(ScalarError::CountMismatch { formula, direct });
    }
    Ok(formula)
}

/// Forms reachable by name from the command line.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum NamedForm {
    E4,
    E6,
    Delta,
    J,
    Eta2,
    F(i64),
}

impl std::str::FromStr for NamedForm {
    type Err = ScalarError;

    fn from_str(s: &str) -> Result<Self, ScalarError> {
        match s {
            "E4" => Ok(NamedForm::E4),
            "E6" => Ok(NamedForm::E6),
            "Delta" => Ok(NamedForm::Delta),
            "J" => Ok(NamedForm::J),
            "delta" => Ok(NamedForm::Eta2),
            _ => s
                .strip_prefix("f:")
                .and_then(|n| n.parse::<i64>().ok())
                .map(NamedForm::F)
                .ok_or_else(|| ScalarError::UnknownForm(s.to_string())),
        }
    }
}

impl NamedForm {
    pub fn expand(self, order: i64) -> Result<QSeries, ScalarError> {
        match self {
            NamedForm::E4 => eisenstein(4, order),
            NamedForm::E6 => eisenstein(6, order),
            NamedForm::Delta => discriminant(order),
            NamedForm::J => hauptmodul(order),
            NamedForm::Eta2 => delta_eta2(order),
            NamedForm::F(n) => f_form(n, order),
        }
    }
}
