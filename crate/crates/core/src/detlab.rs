//! Exterior products of vector-valued forms and the closed formulas they
//! must match.
//!
//! `Δ_n(ρ)` is the exterior product of a free generating set of the weight-`n`
//! weakly holomorphic module, divided by its lowest coefficient. For even `ρ`,
//! `Δ_0(ρ) = (E4/δ⁴)^{β1+2β2} (E6/δ⁶)^α`, and `Δ_n(ρ) = δ^{nd} Δ_0(ρ⊗κ^{−n})`.

use std::collections::HashMap;

use serde::{Deserialize, Serialize};

use crate::exactfield::{format_rational, CycNumber, Rational};
use crate::qseries::{QSeries, SeriesError};
use crate::replib::{self, RepError, RepSpec};
use crate::scalarforms::{self, ScalarError};

/// Largest dimension accepted by [`exterior_product`]; the expansion visits `2^d` minors.
pub const MAX_DET_DIMENSION: usize = 16;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum DetError {
    #[error("the determinant formula requires an even representation")]
    OddRepresentation,
    #[error("weight {n} has the wrong parity for a representation with epsilon = {epsilon}")]
    ParityMismatch { n: i64, epsilon: i64 },
    #[error("shape error: {0}")]
    Shape(String),
    #[error("weights inconsistent: {0}")]
    Weights(String),
    #[error("singular to available precision: increase order or generators are dependent")]
    Singular,
    #[error("cannot parse generators file: {0}")]
    Parse(String),
    #[error(transparent)]
    Rep(#[from] RepError),
    #[error(transparent)]
    Scalar(#[from] ScalarError),
    #[error(transparent)]
    Series(#[from] SeriesError),
}

/// A vector-valued form: one q-series per coordinate.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct FormVector {
    pub weight: i64,
    pub components: Vec<QSeries>,
}

impl FormVector {
    pub fn new(weight: i64, components: Vec<QSeries>) -> Self {
        FormVector { weight, components }
    }

    pub fn dimension(&self) -> usize {
        self.components.len()
    }

    /// Multiplies every component by a scalar form of weight `weight`.
    pub fn times_scalar(&self, f: &QSeries, weight: i64) -> FormVector {
        FormVector {
            weight: self.weight + weight,
            components: self.components.iter().map(|c| f * c).collect(),
        }
    }
}

/// On-disk list of generators for a representation.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct GeneratorsFile {
    pub rep_name: String,
    pub dimension: usize,
    pub generators: Vec<FormVector>,
}

impl GeneratorsFile {
    pub fn from_json(json: &str) -> Result<Self, DetError> {
        let file: GeneratorsFile = serde_json::from_str(json).map_err(|e| DetError::Parse(e.to_string()))?;
        check_square(&file.generators, file.dimension)?;
        Ok(file)
    }

    /// Declared weights in file order.
    pub fn weights(&self) -> Vec<i64> {
        self.generators.iter().map(|g| g.weight).collect()
    }
}

fn check_square(vs: &[FormVector], d: usize) -> Result<(), DetError> {
    if d == 0 || vs.len() != d || vs.iter().any(|v| v.dimension() != d) {
        return Err(DetError::Shape(format!(
            "need {d} form vectors with {d} components each"
        )));
    }
    Ok(())
}

/// The determinant, its lowest coefficient `K`, and the quotient by `K`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ExteriorProductResult {
    pub determinant: QSeries,
    pub leading_coefficient: CycNumber,
    pub normalized: QSeries,
}

/// Lowest exponent of a series, or its validity bound if it is zero.
fn low_exponent(s: &QSeries) -> Rational {
    s.valuation().unwrap_or_else(|_| s.valid_bound())
}

/// Exact agreement on a shared window that covers both leading terms.
pub fn agrees_on_window(a: &QSeries, b: &QSeries) -> bool {
    let lowest = low_exponent(a).min(low_exponent(b));
    a.common_bound(b) > lowest && a.agrees_with(b)
}

/// `v_1 ∧ … ∧ v_d`: the determinant of the matrix with columns `v_i`.
///
/// Expands along rows, memoizing the minor on each column subset.
pub fn exterior_product(vs: &[FormVector]) -> Result<ExteriorProductResult, DetError> {
    let d = vs.len();
    check_square(vs, d)?;
    if d > MAX_DET_DIMENSION {
        return Err(DetError::Shape(format!("dimension {d} exceeds {MAX_DET_DIMENSION}")));
    }
    // minors[mask] = det of rows 0..|mask| against the columns in mask
    let mut minors: HashMap<u32, QSeries> = HashMap::new();
    let mut frontier: Vec<u32> = vec![0];
    for row in 0..d {
        let mut next: Vec<u32> = Vec::new();
        let mut fresh: HashMap<u32, QSeries> = HashMap::new();
        for &mask in &frontier {
            for col in (0..d).filter(|c| mask & (1 << c) == 0) {
                let grown = mask | (1 << col);
                if fresh.contains_key(&grown) {
                    continue;
                }
                let mut acc: Option<QSeries> = None;
                for j in (0..d).filter(|c| grown & (1 << c) != 0) {
                    let sub = grown & !(1 << j);
                    let pos = (grown & ((1 << j) - 1)).count_ones() as usize;
                    let entry = &vs[j].components[row];
                    let term = if sub == 0 { entry.clone() } else { entry * &minors[&sub] };
                    let term = if (row + pos) % 2 == 1 { -&term } else { term };
                    acc = Some(match acc {
                        None => term,
                        Some(a) => &a + &term,
                    });
                }
                fresh.insert(grown, acc.expect("nonempty column set"));
                next.push(grown);
            }
        }
        minors = fresh;
        frontier = next;
    }
    let determinant = minors.remove(&((1u32 << d) - 1)).expect("full minor");
    let leading_coefficient = determinant.leading_coefficient().cloned().ok_or(DetError::Singular)?;
    let normalized = determinant.scale(&leading_coefficient.inv().expect("nonzero lead"));
    Ok(ExteriorProductResult {
        determinant,
        leading_coefficient,
        normalized,
    })
}

/// `(E4/δ⁴)^{β1+2β2} (E6/δ⁶)^α` for an even representation.
pub fn det_zero(rep: &RepSpec, order: i64) -> Result<QSeries, DetError> {
    if rep.parity().epsilon() != 0 {
        return Err(DetError::OddRepresentation);
    }
    let m = replib::multiplicities(rep)?;
    let a = (m.beta1 + 2 * m.beta2) as i64;
    let b = m.alpha as i64;
    let mut acc = QSeries::one(order);
    if a > 0 {
        acc = &acc * &scalarforms::eisenstein(4, order)?.pow(a)?;
    }
    if b > 0 {
        acc = &acc * &scalarforms::eisenstein(6, order)?.pow(b)?;
    }
    let shift = 4 * a + 6 * b;
    if shift > 0 {
        acc = &acc * &scalarforms::delta_eta2(order)?.pow(-shift)?;
    }
    Ok(acc)
}

/// `Δ_n(ρ) = δ^{nd}·Δ_0(ρ⊗κ^{−n})`; requires `n ≡ ε (mod 2)`.
pub fn det_n(rep: &RepSpec, n: i64, order: i64) -> Result<QSeries, DetError> {
    let epsilon = rep.parity().epsilon();
    if (n - epsilon).rem_euclid(2) != 0 {
        return Err(DetError::ParityMismatch { n, epsilon });
    }
    let base = det_zero(&replib::twist(rep, -n)?, order)?;
    let shift = n * rep.dimension() as i64;
    if shift == 0 {
        return Ok(base);
    }
    Ok(&base * &scalarforms::delta_eta2(order)?.pow(shift)?)
}

/// The common parity of `w_i − 2k_i`, which must be 0 or 1.
fn generator_parity(vs: &[FormVector], ks: &[i64]) -> Result<i64, DetError> {
    if vs.len() != ks.len() {
        return Err(DetError::Shape(format!("{} generators but {} values of k", vs.len(), ks.len())));
    }
    let mut eps = None;
    for (v, &k) in vs.iter().zip(ks) {
        let e = v.weight - 2 * k;
        if !(e == 0 || e == 1) || eps.is_some_and(|x| x != e) {
            return Err(DetError::Weights(format!(
                "weight {} with k = {k} does not fit w = 2k + epsilon",
                v.weight
            )));
        }
        eps = Some(e);
    }
    Ok(eps.unwrap_or(0))
}

/// `f_{n−k_i}·F_i`, the weight-`2n+ε` weakly holomorphic generators.
pub fn weak_generators(fs: &[FormVector], ks: &[i64], n: i64, order: i64) -> Result<Vec<FormVector>, DetError> {
    generator_parity(fs, ks)?;
    fs.iter()
        .zip(ks)
        .map(|(f, &k)| Ok(f.times_scalar(&scalarforms::f_form(n - k, order)?, 2 * (n - k))))
        .collect()
}

/// Outcome of [`check_gensdet`].
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct GensDetReport {
    pub dimension: usize,
    pub declared_weights: Vec<i64>,
    pub weights_match_generators: bool,
    pub weight_sum: i64,
    pub weight_sum_nonnegative: bool,
    pub leading_coefficient: CycNumber,
    pub leading_exponent: String,
    pub expected_exponent: String,
    pub determinant_matches: bool,
    pub window_bound: String,
}

impl GensDetReport {
    pub fn passed(&self) -> bool {
        self.weights_match_generators && self.determinant_matches && self.weight_sum_nonnegative
    }
}

/// Checks `F_1 ∧ … ∧ F_d = K·δ^{Σw_i}` on the validity window.
pub fn check_gensdet(fs: &[FormVector], ws: &[i64], order: i64) -> Result<GensDetReport, DetError> {
    let d = fs.len();
    if ws.len() != d {
        return Err(DetError::Shape(format!("{d} generators but {} weights", ws.len())));
    }
    let ext = exterior_product(fs)?;
    let weight_sum: i64 = ws.iter().sum();
    let expected = scalarforms::delta_eta2(order)?.pow(weight_sum)?;
    Ok(GensDetReport {
        dimension: d,
        declared_weights: ws.to_vec(),
        weights_match_generators: fs.iter().zip(ws).all(|(f, &w)| f.weight == w),
        weight_sum,
        weight_sum_nonnegative: weight_sum >= 0,
        leading_coefficient: ext.leading_coefficient.clone(),
        leading_exponent: format_rational(&low_exponent(&ext.determinant)),
        expected_exponent: format_rational(&Rational::new(weight_sum.into(), 12.into())),
        determinant_matches: agrees_on_window(&ext.normalized, &expected),
        window_bound: format_rational(&ext.normalized.common_bound(&expected)),
    })
}

/// Outcome of [`verify_detform2`].
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct DetForm2Report {
    pub n: i64,
    pub epsilon: i64,
    pub weights_ok: bool,
    /// `Π f_{n−k_i}/f_{−k_i} = Δ_{2n+ε}/Δ_ε`.
    pub ratio_ok: bool,
    /// The normalized exterior product of the weak generators equals `Δ_{2n+ε}`.
    pub wedge_ok: bool,
}

impl DetForm2Report {
    pub fn passed(&self) -> bool {
        self.weights_ok && self.ratio_ok && self.wedge_ok
    }
}

/// Checks the determinant ratio identity for generators `F` of weights `2k_i + ε`.
pub fn verify_detform2(
    rep: &RepSpec,
    fs: &[FormVector],
    ks: &[i64],
    n: i64,
    order: i64,
) -> Result<DetForm2Report, DetError> {
    let d = rep.dimension();
    check_square(fs, d)?;
    let epsilon = rep.parity().epsilon();
    let weights_ok = generator_parity(fs, ks).is_ok_and(|e| e == epsilon);
    let mut lhs = QSeries::one(order);
    for &k in ks {
        let ratio = scalarforms::f_form(n - k, order)?.try_div(&scalarforms::f_form(-k, order)?)?;
        lhs = &lhs * &ratio;
    }
    let top = det_n(rep, 2 * n + epsilon, order)?;
    let bottom = det_n(rep, epsilon, order)?;
    let rhs = top.try_div(&bottom)?;
    let wedge = exterior_product(&weak_generators(fs, ks, n, order)?)?;
    Ok(DetForm2Report {
        n,
        epsilon,
        weights_ok,
        ratio_ok: agrees_on_window(&lhs, &rhs),
        wedge_ok: agrees_on_window(&wedge.normalized, &top),
    })
}

/// The diagonal generators `(0, …, δ^{j_i}, …, 0)` of `⊕ κ^{j_i}`, of weights `j_i`.
pub fn diagonal_kappa_generators(js: &[i64], order: i64) -> Result<Vec<FormVector>, DetError> {
    let delta = scalarforms::delta_eta2(order)?;
    let d = js.len();
    js.iter()
        .enumerate()
        .map(|(i, &j)| {
            let comps = (0..d)
                .map(|r| {
                    if r == i {
                        delta.pow(j).map_err(DetError::from)
                    } else {
                        Ok(QSeries::zero(order))
                    }
                })
                .collect::<Result<Vec<_>, _>>()?;
            Ok(FormVector::new(j, comps))
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::replib::{direct_sum, kappa_power, trivial};

    const ORDER: i64 = 24;

    fn delta_pow(j: i64) -> QSeries {
        scalarforms::delta_eta2(ORDER).unwrap().pow(j).unwrap()
    }

    fn e(k: u32) -> QSeries {
        scalarforms::eisenstein(k, ORDER).unwrap()
    }

    #[test]
    fn det_zero_examples() {
        assert!(agrees_on_window(&det_zero(&trivial(), ORDER).unwrap(), &QSeries::one(ORDER)));
        let k2 = &(&e(4) * &e(6)) * &delta_pow(-10);
        assert!(agrees_on_window(&det_zero(&kappa_power(2), ORDER).unwrap(), &k2));
        let k6 = &e(6) * &delta_pow(-6);
        assert!(agrees_on_window(&det_zero(&kappa_power(6), ORDER).unwrap(), &k6));
        assert_eq!(det_zero(&kappa_power(1), ORDER).unwrap_err(), DetError::OddRepresentation);
    }

    #[test]
    fn det_n_examples() {
        assert!(agrees_on_window(&det_n(&kappa_power(1), 1, ORDER).unwrap(), &delta_pow(1)));
        assert!(agrees_on_window(&det_n(&kappa_power(2), 2, ORDER).unwrap(), &delta_pow(2)));
        assert!(matches!(det_n(&kappa_power(1), 2, ORDER), Err(DetError::ParityMismatch { .. })));
    }

    #[test]
    fn weak_generator_examples() {
        let one = FormVector::new(0, vec![QSeries::one(ORDER)]);
        let g = weak_generators(std::slice::from_ref(&one), &[0], 0, ORDER).unwrap();
        assert!(agrees_on_window(&g[0].components[0], &QSeries::one(ORDER)));
        let g = weak_generators(std::slice::from_ref(&one), &[0], 1, ORDER).unwrap();
        assert_eq!(g[0].weight, 2);
        let f1 = &(&e(4).pow(2).unwrap() * &e(6)) * &scalarforms::discriminant(ORDER).unwrap().inverse().unwrap();
        assert!(agrees_on_window(&g[0].components[0], &f1));
        let d2 = FormVector::new(2, vec![delta_pow(2)]);
        let g = weak_generators(&[d2], &[1], 0, ORDER).unwrap();
        assert_eq!(g[0].weight, 0);
        let expected = &(&e(4) * &e(6)) * &delta_pow(-10);
        assert!(agrees_on_window(&g[0].components[0], &expected));
    }

    #[test]
    fn exterior_products() {
        let three = QSeries::constant(CycNumber::from_int(3), ORDER);
        let r = exterior_product(&[FormVector::new(0, vec![three])]).unwrap();
        assert_eq!(r.leading_coefficient, CycNumber::from_int(3));
        assert!(r.normalized.leading_coefficient().unwrap().is_one());

        let gens = diagonal_kappa_generators(&[3, 5], ORDER).unwrap();
        let r = exterior_product(&gens).unwrap();
        assert!(r.leading_coefficient.is_one());
        assert!(agrees_on_window(&r.determinant, &delta_pow(8)));

        let v = FormVector::new(0, vec![e(4), e(6)]);
        assert_eq!(exterior_product(&[v.clone(), v]).unwrap_err(), DetError::Singular);
    }

    #[test]
    fn exterior_product_is_alternating() {
        let a = FormVector::new(4, vec![e(4), delta_pow(3)]);
        let b = FormVector::new(6, vec![e(6), delta_pow(5)]);
        let ab = exterior_product(&[a.clone(), b.clone()]).unwrap();
        let ba = exterior_product(&[b, a]).unwrap();
        assert_eq!(ab.leading_coefficient, -ba.leading_coefficient.clone());
        assert_eq!(ab.normalized, ba.normalized);
    }

    #[test]
    fn three_by_three_matches_leibniz() {
        let s = |k: u32| e(k);
        let cols = [
            FormVector::new(0, vec![s(4), s(6), delta_pow(1)]),
            FormVector::new(0, vec![delta_pow(2), s(4), s(6)]),
            FormVector::new(0, vec![s(6), delta_pow(3), s(4)]),
        ];
        let a = |r: usize, c: usize| cols[c].components[r].clone();
        let mut leibniz = QSeries::zero(ORDER * 12);
        for (p, sign) in [([0, 1, 2], 1), ([1, 2, 0], 1), ([2, 0, 1], 1), ([0, 2, 1], -1), ([2, 1, 0], -1), ([1, 0, 2], -1)] {
            let t = &(&a(0, p[0]) * &a(1, p[1])) * &a(2, p[2]);
            leibniz = if sign == 1 { &leibniz + &t } else { &leibniz - &t };
        }
        let r = exterior_product(&cols).unwrap();
        assert!(agrees_on_window(&r.determinant, &leibniz));
    }

    #[test]
    fn gensdet_examples() {
        let gens = diagonal_kappa_generators(&[2, 4], ORDER).unwrap();
        let report = check_gensdet(&gens, &[2, 4], ORDER).unwrap();
        assert!(report.passed());
        assert_eq!(report.expected_exponent, "1/2");
        assert_eq!(report.leading_exponent, "1/2");
        let wrong = check_gensdet(&gens, &[2, 6], ORDER).unwrap();
        assert!(!wrong.passed());
        assert!(!wrong.determinant_matches);
        let one = [FormVector::new(0, vec![QSeries::one(ORDER)])];
        let r = check_gensdet(&one, &[0], ORDER).unwrap();
        assert!(r.passed());
        assert!(r.leading_coefficient.is_one());
    }

    #[test]
    fn detform2_examples() {
        let one = [FormVector::new(0, vec![QSeries::one(ORDER)])];
        for n in 1..=3 {
            assert!(verify_detform2(&trivial(), &one, &[0], n, ORDER).unwrap().passed(), "n = {n}");
        }
        let d2 = [FormVector::new(2, vec![delta_pow(2)])];
        assert!(verify_detform2(&kappa_power(2), &d2, &[1], 0, ORDER).unwrap().passed());
        assert!(verify_detform2(&kappa_power(2), &d2, &[1], 1, ORDER).unwrap().passed());
        let sum = direct_sum(&kappa_power(1), &kappa_power(3)).unwrap();
        let gens = diagonal_kappa_generators(&[1, 3], ORDER).unwrap();
        assert!(verify_detform2(&sum, &gens, &[0, 1], -2, ORDER).unwrap().passed());
    }

    #[test]
    fn generators_file_round_trip() {
        let file = GeneratorsFile {
            rep_name: "k2+k4".into(),
            dimension: 2,
            generators: diagonal_kappa_generators(&[2, 4], 8).unwrap(),
        };
        let json = serde_json::to_string(&file).unwrap();
        assert_eq!(GeneratorsFile::from_json(&json).unwrap(), file);
        let mut bad = file.clone();
        bad.dimension = 3;
        let json = serde_json::to_string(&bad).unwrap();
        assert!(matches!(GeneratorsFile::from_json(&json), Err(DetError::Shape(_))));
    }
}
