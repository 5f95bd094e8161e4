//! Representations of SL2(Z) given by the images of `S = [[0,−1],[1,0]]` and
//! `T = [[1,1],[0,1]]`.
//!
//! Throughout, `U = S·T⁻¹ = [[0,−1],[1,−1]]`, the order-3 element whose
//! traces enter the eigenvalue-multiplicity relations. (`S·T` is
//! `[[0,−1],[1,1]]` and is not used.)

use serde::{Deserialize, Serialize};

use crate::exactfield::{CycNumber, FieldError, Rational, MAX_ORDER};
use crate::matrix::CycMatrix;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum RepError {
    #[error("invalid representation: {0}")]
    Shape(String),
    #[error("relation {relation} fails")]
    Relation { relation: &'static str },
    #[error("rho(S)^2 is not ±identity: decompose into even/odd parts first")]
    MixedParity,
    #[error("parity mismatch: cannot form a pure-parity direct sum of an even and an odd representation")]
    ParityMismatch,
    #[error("trace data inconsistent with the eigenvalue-multiplicity relations: {0}")]
    TraceInconsistent(String),
    #[error(transparent)]
    Field(#[from] FieldError),
    #[error("cannot parse representation file: {0}")]
    Parse(String),
}

/// `ρ(−I) = (−1)^ε·I`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Parity {
    Even,
    Odd,
}

impl Parity {
    pub fn epsilon(self) -> i64 {
        match self {
            Parity::Even => 0,
            Parity::Odd => 1,
        }
    }

    pub fn from_epsilon(e: i64) -> Self {
        if e.rem_euclid(2) == 0 {
            Parity::Even
        } else {
            Parity::Odd
        }
    }
}

/// On-disk form of a representation.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct RepFile {
    pub name: String,
    pub dimension: usize,
    pub cyclotomic_order: u32,
    #[serde(rename = "S")]
    pub s: Vec<Vec<CycNumber>>,
    #[serde(rename = "T")]
    pub t: Vec<Vec<CycNumber>>,
}

/// A validated pure-parity representation.
#[derive(Debug, Clone)]
pub struct RepSpec {
    name: String,
    order: u32,
    s: CycMatrix,
    t: CycMatrix,
    parity: Parity,
}

/// Equality compares the matrices; the name is a label only.
impl PartialEq for RepSpec {
    fn eq(&self, other: &Self) -> bool {
        self.s == other.s && self.t == other.t
    }
}

impl Eq for RepSpec {}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Traces {
    pub tr_s: CycNumber,
    pub tr_u: CycNumber,
    pub tr_u_inv: CycNumber,
}

/// Eigenvalue multiplicities of the evenized representation `ρ⊗κ^{−ε}`:
/// `alpha` for `−1` under `S`, `beta1`/`beta2` for `e^{2πi/3}`/`e^{4πi/3}` under `U`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default, Serialize, Deserialize)]
pub struct Multiplicities {
    pub alpha: u32,
    pub beta1: u32,
    pub beta2: u32,
}

impl Multiplicities {
    /// `(Tr S, Tr U)` of an even representation of dimension `d` with these multiplicities.
    pub fn reconstruct_traces(&self, d: usize) -> (CycNumber, CycNumber) {
        let d = d as i64;
        let tr_s = CycNumber::from_int(d - 2 * self.alpha as i64);
        let (b1, b2) = (self.beta1 as i64, self.beta2 as i64);
        let zeta = CycNumber::root_of_unity(3, 1).expect("order 3");
        let zeta2 = CycNumber::root_of_unity(3, 2).expect("order 3");
        let tr_u = &(&CycNumber::from_int(d - b1 - b2) + &(&zeta * &CycNumber::from_int(b1)))
            + &(&zeta2 * &CycNumber::from_int(b2));
        (tr_s, tr_u)
    }
}

impl std::ops::Add for Multiplicities {
    type Output = Multiplicities;
    fn add(self, o: Multiplicities) -> Multiplicities {
        Multiplicities {
            alpha: self.alpha + o.alpha,
            beta1: self.beta1 + o.beta1,
            beta2: self.beta2 + o.beta2,
        }
    }
}

fn lcm_order(a: u32, b: u32) -> Result<u32, RepError> {
    let m = num_integer::lcm(a as u64, b as u64);
    if m > MAX_ORDER as u64 {
        return Err(FieldError::OrderTooLarge(m).into());
    }
    Ok(m as u32)
}

fn lift_all(m: &CycMatrix, order: u32) -> Result<CycMatrix, RepError> {
    Ok(m.map(|c| c.lift(order))?)
}

impl RepSpec {
    /// Validates the SL2(Z) relations and determines the parity.
    ///
    /// Checks, in order: `T` invertible, `S⁴ = I`, `(S T⁻¹)³ = I`,
    /// `S² T = T S²`, and `S² = ±I`.
    pub fn new(name: impl Into<String>, order: u32, s: CycMatrix, t: CycMatrix) -> Result<Self, RepError> {
        if s.dim() == 0 || s.dim() != t.dim() {
            return Err(RepError::Shape("S and T must be square of the same positive size".into()));
        }
        if order == 0 || order > MAX_ORDER {
            return Err(FieldError::OrderTooLarge(order as u64).into());
        }
        for c in s.entries().iter().chain(t.entries()) {
            if !order.is_multiple_of(c.order()) {
                return Err(RepError::Shape(format!(
                    "entry of order {} does not lie in Q(ζ{order})",
                    c.order()
                )));
            }
        }
        let s = lift_all(&s, order)?;
        let t = lift_all(&t, order)?;
        let d = s.dim();
        let t_inv = t.inverse()?.ok_or(RepError::Relation {
            relation: "T invertible",
        })?;
        let s2 = s.try_mul(&s)?;
        if !s2.try_mul(&s2)?.is_identity() {
            return Err(RepError::Relation { relation: "S^4 = I" });
        }
        let u = s.try_mul(&t_inv)?;
        if !u.pow(3)?.is_identity() {
            return Err(RepError::Relation {
                relation: "(S T^-1)^3 = I",
            });
        }
        if s2.try_mul(&t)? != t.try_mul(&s2)? {
            return Err(RepError::Relation {
                relation: "S^2 T = T S^2",
            });
        }
        let parity = if s2.is_identity() {
            Parity::Even
        } else if s2.is_scalar(&CycNumber::from_int(-1)) {
            Parity::Odd
        } else {
            return Err(RepError::MixedParity);
        };
        debug_assert_eq!(d, t.dim());
        Ok(RepSpec {
            name: name.into(),
            order,
            s,
            t,
            parity,
        })
    }

    pub fn from_file(file: &RepFile) -> Result<Self, RepError> {
        let d = file.dimension;
        let well_shaped = |m: &Vec<Vec<CycNumber>>| m.len() == d && m.iter().all(|r| r.len() == d);
        if d == 0 || !well_shaped(&file.s) || !well_shaped(&file.t) {
            return Err(RepError::Shape(format!(
                "S and T must both be {d}×{d} matrices"
            )));
        }
        let s = CycMatrix::from_rows(file.s.clone()).expect("checked shape");
        let t = CycMatrix::from_rows(file.t.clone()).expect("checked shape");
        Self::new(file.name.clone(), file.cyclotomic_order, s, t)
    }

    pub fn from_json(json: &str) -> Result<Self, RepError> {
        let file: RepFile = serde_json::from_str(json).map_err(|e| RepError::Parse(e.to_string()))?;
        Self::from_file(&file)
    }

    pub fn to_file(&self) -> RepFile {
        RepFile {
            name: self.name.clone(),
            dimension: self.dimension(),
            cyclotomic_order: self.order,
            s: self.s.rows(),
            t: self.t.rows(),
        }
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn with_name(mut self, name: impl Into<String>) -> Self {
        self.name = name.into();
        self
    }

    pub fn dimension(&self) -> usize {
        self.s.dim()
    }

    pub fn cyclotomic_order(&self) -> u32 {
        self.order
    }

    pub fn s_matrix(&self) -> &CycMatrix {
        &self.s
    }

    pub fn t_matrix(&self) -> &CycMatrix {
        &self.t
    }

    pub fn parity(&self) -> Parity {
        self.parity
    }

    /// `ρ(U)` for `U = S·T⁻¹`.
    pub fn u_matrix(&self) -> CycMatrix {
        let t_inv = self.t.inverse().expect("validated").expect("validated");
        self.s.try_mul(&t_inv).expect("validated")
    }

    /// Whether `ρ(T)` is diagonalizable; when it is not, the module of forms
    /// involves logarithmic terms and the weight theory may not apply.
    pub fn t_diagonalizable(&self) -> bool {
        self.t.is_diagonalizable().expect("validated order")
    }
}

/// The trivial one-dimensional representation.
pub fn trivial() -> RepSpec {
    RepSpec::new(
        "trivial",
        1,
        CycMatrix::identity(1),
        CycMatrix::identity(1),
    )
    .expect("trivial representation is valid")
}

fn kappa_values(j: i64) -> (CycNumber, CycNumber) {
    let j = j.rem_euclid(12);
    // κ(S) = −i = ζ12^9, κ(T) = κ(U)⁻¹κ(S) = ζ12
    let s = CycNumber::root_of_unity(12, 9 * j).expect("order 12");
    let t = CycNumber::root_of_unity(12, j).expect("order 12");
    (s, t)
}

/// The character `κ^j`, with `κ(S) = −i`, `κ(U) = e^{4πi/3}` and `κ(T) = e^{πi/6}`.
pub fn kappa_power(j: i64) -> RepSpec {
    let (s, t) = kappa_values(j);
    RepSpec::new(
        format!("kappa^{}", j.rem_euclid(12)),
        12,
        CycMatrix::scalar(1, s),
        CycMatrix::scalar(1, t),
    )
    .expect("κ^j is a valid character")
}

/// `ρ⊗κ^j`.
pub fn twist(rep: &RepSpec, j: i64) -> Result<RepSpec, RepError> {
    if j.rem_euclid(12) == 0 {
        return Ok(rep.clone());
    }
    let order = lcm_order(rep.order, 12)?;
    let (ks, kt) = kappa_values(j);
    let s = lift_all(&rep.s, order)?.scale(&ks)?;
    let t = lift_all(&rep.t, order)?.scale(&kt)?;
    let parity = Parity::from_epsilon(rep.parity.epsilon() + j);
    Ok(RepSpec {
        name: format!("{}⊗kappa^{}", rep.name, j),
        order,
        s,
        t,
        parity,
    })
}

/// `a ⊕ b`; both summands must have the same parity.
pub fn direct_sum(a: &RepSpec, b: &RepSpec) -> Result<RepSpec, RepError> {
    if a.parity != b.parity {
        return Err(RepError::ParityMismatch);
    }
    let order = lcm_order(a.order, b.order)?;
    let s = lift_all(&a.s, order)?.block_diag(&lift_all(&b.s, order)?);
    let t = lift_all(&a.t, order)?.block_diag(&lift_all(&b.t, order)?);
    Ok(RepSpec {
        name: format!("{}⊕{}", a.name, b.name),
        order,
        s,
        t,
        parity: a.parity,
    })
}

/// Direct sum of a nonempty list of same-parity representations.
pub fn direct_sum_all(reps: &[RepSpec]) -> Result<RepSpec, RepError> {
    let (first, rest) = reps
        .split_first()
        .ok_or_else(|| RepError::Shape("empty direct sum".into()))?;
    rest.iter().try_fold(first.clone(), |acc, r| direct_sum(&acc, r))
}

/// Groups explicitly separated blocks into their even and odd parts.
pub fn split_by_parity(blocks: &[RepSpec]) -> Result<(Option<RepSpec>, Option<RepSpec>), RepError> {
    let part = |p: Parity| -> Result<Option<RepSpec>, RepError> {
        let chosen: Vec<RepSpec> = blocks.iter().filter(|b| b.parity == p).cloned().collect();
        if chosen.is_empty() {
            Ok(None)
        } else {
            direct_sum_all(&chosen).map(Some)
        }
    };
    Ok((part(Parity::Even)?, part(Parity::Odd)?))
}

/// Exact traces of `ρ(S)`, `ρ(U)` and `ρ(U)⁻¹ = ρ(U)²`, each in its smallest cyclotomic field.
pub fn traces(rep: &RepSpec) -> Traces {
    let u = rep.u_matrix();
    let u2 = u.try_mul(&u).expect("validated order");
    Traces {
        tr_s: rep.s.trace().expect("validated order").simplify(),
        tr_u: u.trace().expect("validated order").simplify(),
        tr_u_inv: u2.trace().expect("validated order").simplify(),
    }
}

/// Writes `x ∈ Q(ζ3)` as `u + v·ζ3`.
fn in_cube_root_basis(x: &CycNumber) -> Option<(Rational, Rational)> {
    let m = num_integer::lcm(x.order(), 3);
    let y = x.lift(m).ok()?.descend(3)?;
    Some((y.coeffs()[0].clone(), y.coeffs()[1].clone()))
}

fn as_count(r: &Rational, what: &str, d: usize) -> Result<u32, RepError> {
    if !r.is_integer() {
        return Err(RepError::TraceInconsistent(format!("{what} = {r} is not an integer")));
    }
    let v = r.to_integer();
    if v < 0.into() || v > d.into() {
        return Err(RepError::TraceInconsistent(format!("{what} = {v} outside [0, {d}]")));
    }
    Ok(u32::try_from(v).expect("bounded by d"))
}

/// Multiplicities of `−1` for `ρ̇(S)` and of `ζ3`, `ζ3²` for `ρ̇(U)`, where
/// `ρ̇ = ρ⊗κ^{−ε}`, recovered from traces alone.
pub fn multiplicities(rep: &RepSpec) -> Result<Multiplicities, RepError> {
    let dotted = twist(rep, -rep.parity.epsilon())?;
    let d = rep.dimension();
    let tr = traces(&dotted);
    let tr_s = tr
        .tr_s
        .to_rational()
        .ok_or_else(|| RepError::TraceInconsistent(format!("Tr S = {} is not rational", tr.tr_s)))?;
    let dr = Rational::from_integer(d.into());
    let two = Rational::from_integer(2.into());
    let three = Rational::from_integer(3.into());
    let alpha = as_count(&((&dr - &tr_s) / &two), "alpha", d)?;
    let (u, v) = in_cube_root_basis(&tr.tr_u)
        .ok_or_else(|| RepError::TraceInconsistent(format!("Tr U = {} is not in Q(ζ3)", tr.tr_u)))?;
    let beta2_r = (&dr - &u - &v) / &three;
    let beta2 = as_count(&beta2_r, "beta2", d)?;
    let beta1 = as_count(&(&v + &beta2_r), "beta1", d)?;
    if (beta1 + beta2) as usize > d {
        return Err(RepError::TraceInconsistent(format!(
            "beta1 + beta2 = {} exceeds dimension {d}",
            beta1 + beta2
        )));
    }
    Ok(Multiplicities { alpha, beta1, beta2 })
}
