//! Constraints on the weights of a free generating set, derived from the
//! traces of `ρ(S)` and `ρ(U)`.
//!
//! A weight multiset stores normalized weights `k_i` with `w_i = 2k_i + ε`.
//! The Hilbert polynomial is `P(z) = Σ z^{w_i}`, evaluated exactly in `Q(ζ12)`.

use serde::{Deserialize, Serialize};

use crate::exactfield::CycNumber;
use crate::replib::{self, Multiplicities, Parity, RepError, RepSpec, Traces};

/// Report format version; bumped when fields change meaning.
pub const REPORT_SCHEMA_VERSION: u32 = 1;

/// Default enumeration bounds for `k`.
pub const DEFAULT_K_MIN: i64 = 0;
pub const DEFAULT_K_MAX: i64 = 11;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum WeightError {
    #[error("weights inconsistent with a free module: {0}")]
    NotFree(String),
    #[error("invalid enumeration bounds: k_min {k_min} > k_max {k_max}")]
    Bounds { k_min: i64, k_max: i64 },
    #[error(transparent)]
    Rep(#[from] RepError),
}

/// A multiset of normalized weights, kept sorted.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct WeightMultiset {
    pub epsilon: i64,
    pub ks: Vec<i64>,
}

impl WeightMultiset {
    pub fn new(epsilon: i64, mut ks: Vec<i64>) -> Self {
        ks.sort_unstable();
        WeightMultiset {
            epsilon: epsilon.rem_euclid(2),
            ks,
        }
    }

    pub fn len(&self) -> usize {
        self.ks.len()
    }

    pub fn is_empty(&self) -> bool {
        self.ks.is_empty()
    }

    /// `w_i = 2k_i + ε`, ascending.
    pub fn weights(&self) -> Vec<i64> {
        self.ks.iter().map(|k| 2 * k + self.epsilon).collect()
    }

    pub fn weight_sum(&self) -> i64 {
        self.weights().iter().sum()
    }

    /// `P(z)` at a root of unity (or any nonzero cyclotomic number).
    pub fn hilbert_value(&self, z: &CycNumber) -> CycNumber {
        self.weights().iter().fold(CycNumber::zero(), |acc, &w| {
            &acc + &z.pow(w).expect("nonzero evaluation point")
        })
    }

    /// Counts of odd `k`, of `k ≡ 1 (mod 3)` and of `k ≡ 2 (mod 3)`.
    pub fn congruence_counts(&self) -> CongruenceCounts {
        let count = |f: &dyn Fn(i64) -> bool| self.ks.iter().filter(|&&k| f(k)).count() as u32;
        CongruenceCounts {
            k_odd: count(&|k| k.rem_euclid(2) == 1),
            k_mod3_1: count(&|k| k.rem_euclid(3) == 1),
            k_mod3_2: count(&|k| k.rem_euclid(3) == 2),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default, Serialize, Deserialize)]
pub struct CongruenceCounts {
    pub k_odd: u32,
    pub k_mod3_1: u32,
    pub k_mod3_2: u32,
}

impl From<Multiplicities> for CongruenceCounts {
    fn from(m: Multiplicities) -> Self {
        CongruenceCounts {
            k_odd: m.alpha,
            k_mod3_1: m.beta1,
            k_mod3_2: m.beta2,
        }
    }
}

/// `P(−i)`, `P(ζ3)`, `P(ζ3⁻¹)`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct HilbertValues {
    pub at_minus_i: CycNumber,
    pub at_zeta: CycNumber,
    pub at_zeta_inv: CycNumber,
}

/// The evaluation points `−i = ζ12⁹`, `ζ3 = ζ12⁴`, `ζ3⁻¹ = ζ12⁸`.
fn evaluation_points() -> [CycNumber; 3] {
    [9, 4, 8].map(|k| CycNumber::root_of_unity(12, k).expect("order 12"))
}

impl HilbertValues {
    pub fn of(ws: &WeightMultiset) -> Self {
        let [mi, z, zi] = evaluation_points();
        HilbertValues {
            at_minus_i: ws.hilbert_value(&mi).simplify(),
            at_zeta: ws.hilbert_value(&z).simplify(),
            at_zeta_inv: ws.hilbert_value(&zi).simplify(),
        }
    }

    /// Values forced by the traces: `P(−i) = Tr ρ(S)`, `P(ζ^{±1}) = Tr ρ(U)^{∓1}`.
    pub fn from_traces(t: &Traces) -> Self {
        HilbertValues {
            at_minus_i: t.tr_s.clone(),
            at_zeta: t.tr_u_inv.clone(),
            at_zeta_inv: t.tr_u.clone(),
        }
    }
}

/// What the traces of a representation force on any free generating set.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct WeightProfile {
    pub counts: CongruenceCounts,
    pub hilbert: HilbertValues,
}

pub fn weight_profile(rep: &RepSpec) -> Result<WeightProfile, RepError> {
    let m = replib::multiplicities(rep)?;
    Ok(WeightProfile {
        counts: m.into(),
        hilbert: HilbertValues::from_traces(&replib::traces(rep)),
    })
}

/// Per-check outcome of [`check_hilbert_poly`].
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct HilbertCheck {
    pub dimension_ok: bool,
    pub parity_ok: bool,
    pub at_minus_i_ok: bool,
    pub at_zeta_ok: bool,
    pub at_zeta_inv_ok: bool,
    pub counts_ok: bool,
    pub weight_sum_nonnegative: bool,
    pub computed: HilbertValues,
    pub expected: HilbertValues,
}

impl HilbertCheck {
    pub fn passed(&self) -> bool {
        self.dimension_ok
            && self.parity_ok
            && self.at_minus_i_ok
            && self.at_zeta_ok
            && self.at_zeta_inv_ok
            && self.counts_ok
            && self.weight_sum_nonnegative
    }
}

/// Tests a candidate multiset against every trace constraint of `rep`.
pub fn check_hilbert_poly(ws: &WeightMultiset, rep: &RepSpec) -> HilbertCheck {
    let computed = HilbertValues::of(ws);
    let expected = HilbertValues::from_traces(&replib::traces(rep));
    let counts_ok = replib::multiplicities(rep)
        .map(|m| ws.congruence_counts() == m.into())
        .unwrap_or(false);
    HilbertCheck {
        dimension_ok: ws.len() == rep.dimension(),
        parity_ok: ws.epsilon == rep.parity().epsilon(),
        at_minus_i_ok: computed.at_minus_i == expected.at_minus_i,
        at_zeta_ok: computed.at_zeta == expected.at_zeta,
        at_zeta_inv_ok: computed.at_zeta_inv == expected.at_zeta_inv,
        counts_ok,
        weight_sum_nonnegative: ws.weight_sum() >= 0,
        computed,
        expected,
    }
}

/// Search bounds for [`enumerate_weight_multisets`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct EnumerationBounds {
    pub k_min: i64,
    pub k_max: i64,
    pub sum_w: Option<i64>,
}

impl Default for EnumerationBounds {
    fn default() -> Self {
        EnumerationBounds {
            k_min: DEFAULT_K_MIN,
            k_max: DEFAULT_K_MAX,
            sum_w: None,
        }
    }
}

struct Search<'a> {
    d: usize,
    epsilon: i64,
    // targets: odd, ≡1 mod 3, ≡2 mod 3, ≡0 mod 3
    want: [usize; 4],
    k_max: i64,
    k_sum: Option<i64>,
    out: &'a mut Vec<WeightMultiset>,
}

impl Search<'_> {
    fn run(&mut self, ks: &mut Vec<i64>, from: i64, have: [usize; 4], sum: i64) {
        let left = (self.d - ks.len()) as i64;
        let [odd, m1, m2, m0] = have;
        let reachable = |h: usize, w: usize| h <= w && w - h <= left as usize;
        if !(reachable(odd, self.want[0])
            && reachable(m1, self.want[1])
            && reachable(m2, self.want[2])
            && reachable(m0, self.want[3]))
        {
            return;
        }
        // remaining k's lie in [from, k_max]
        let (lo, hi) = (sum + left * from, sum + left * self.k_max);
        if let Some(target) = self.k_sum {
            if target < lo || target > hi {
                return;
            }
        }
        // Σw = 2Σk + dε ≥ 0
        if 2 * hi + self.d as i64 * self.epsilon < 0 {
            return;
        }
        if left == 0 {
            self.out.push(WeightMultiset::new(self.epsilon, ks.clone()));
            return;
        }
        for k in from..=self.k_max {
            let mut next = have;
            if k.rem_euclid(2) == 1 {
                next[0] += 1;
            }
            next[[3, 1, 2][k.rem_euclid(3) as usize]] += 1;
            ks.push(k);
            self.run(ks, k, next, sum + k);
            ks.pop();
        }
    }
}

/// All size-`d` multisets with `k_i ∈ [k_min, k_max]` whose congruence counts
/// equal `mult`, with `Σw ≥ 0` and, if given, `Σw = sum_w`.
///
/// Output is sorted lexicographically by the sorted `ks`. Infeasible
/// constraints give an empty list.
pub fn enumerate_weight_multisets(
    d: usize,
    epsilon: i64,
    mult: Multiplicities,
    bounds: EnumerationBounds,
) -> Result<Vec<WeightMultiset>, WeightError> {
    let EnumerationBounds { k_min, k_max, sum_w } = bounds;
    if k_min > k_max {
        return Err(WeightError::Bounds { k_min, k_max });
    }
    let epsilon = epsilon.rem_euclid(2);
    let (a, b1, b2) = (mult.alpha as usize, mult.beta1 as usize, mult.beta2 as usize);
    let mut out = Vec::new();
    if a > d || b1 + b2 > d {
        return Ok(out);
    }
    let k_sum = match sum_w {
        None => None,
        Some(s) => {
            let rest = s - d as i64 * epsilon;
            if rest.rem_euclid(2) != 0 {
                return Ok(out);
            }
            Some(rest / 2)
        }
    };
    Search {
        d,
        epsilon,
        want: [a, b1, b2, d - b1 - b2],
        k_max,
        k_sum,
        out: &mut out,
    }
    .run(&mut Vec::with_capacity(d), k_min, [0; 4], 0);
    Ok(out)
}

/// `dim M_n(ρ)` for `0 ≤ n ≤ n_max`: coefficients of `P(z)/((1−z⁴)(1−z⁶))`.
pub fn dimension_series(ws: &WeightMultiset, n_max: usize) -> Result<Vec<u64>, WeightError> {
    if let Some(&w) = ws.weights().iter().find(|&&w| w < 0) {
        return Err(WeightError::NotFree(format!("negative weight {w}")));
    }
    // coefficients of 1/((1−z⁴)(1−z⁶)): number of (a, b) with 4a + 6b = n
    let mut base = vec![0u64; n_max + 1];
    base[0] = 1;
    for step in [4, 6] {
        for n in step..=n_max {
            base[n] += base[n - step];
        }
    }
    let mut dims = vec![0u64; n_max + 1];
    for w in ws.weights() {
        let w = w as usize;
        for n in w..=n_max {
            dims[n] += base[n - w];
        }
    }
    Ok(dims)
}

/// Output record of an analysis run.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct AnalysisReport {
    pub schema_version: u32,
    pub name: String,
    pub dimension: usize,
    pub parity: Parity,
    pub cyclotomic_order: u32,
    pub t_diagonalizable: bool,
    pub traces: Traces,
    pub multiplicities: Multiplicities,
    pub weight_congruence_counts: CongruenceCounts,
    pub hilbert_values: HilbertValues,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub enumeration_bounds: Option<EnumerationBounds>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub candidate_multisets: Option<Vec<WeightMultiset>>,
}

/// Builds the report for `rep`, enumerating candidates when `bounds` is given.
pub fn analyze(rep: &RepSpec, bounds: Option<EnumerationBounds>) -> Result<AnalysisReport, WeightError> {
    let traces = replib::traces(rep);
    let multiplicities = replib::multiplicities(rep)?;
    let candidate_multisets = bounds
        .map(|b| enumerate_weight_multisets(rep.dimension(), rep.parity().epsilon(), multiplicities, b))
        .transpose()?;
    Ok(AnalysisReport {
        schema_version: REPORT_SCHEMA_VERSION,
        name: rep.name().to_string(),
        dimension: rep.dimension(),
        parity: rep.parity(),
        cyclotomic_order: rep.cyclotomic_order(),
        t_diagonalizable: rep.t_diagonalizable(),
        hilbert_values: HilbertValues::from_traces(&traces),
        traces,
        multiplicities,
        weight_congruence_counts: multiplicities.into(),
        enumeration_bounds: bounds,
        candidate_multisets,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::replib::{direct_sum, kappa_power, trivial};

    fn m(alpha: u32, beta1: u32, beta2: u32) -> Multiplicities {
        Multiplicities { alpha, beta1, beta2 }
    }

    fn bounds(k_min: i64, k_max: i64, sum_w: Option<i64>) -> EnumerationBounds {
        EnumerationBounds { k_min, k_max, sum_w }
    }

    #[test]
    fn profiles() {
        let p = weight_profile(&trivial()).unwrap();
        assert_eq!(p.counts, CongruenceCounts::default());
        assert!(p.hilbert.at_minus_i.is_one() && p.hilbert.at_zeta.is_one() && p.hilbert.at_zeta_inv.is_one());

        let p = weight_profile(&kappa_power(2)).unwrap();
        assert_eq!(p.counts, CongruenceCounts { k_odd: 1, k_mod3_1: 1, k_mod3_2: 0 });
        assert_eq!(p.hilbert.at_zeta, CycNumber::root_of_unity(3, 2).unwrap());

        let p = weight_profile(&kappa_power(1)).unwrap();
        assert_eq!(p.hilbert.at_minus_i, -CycNumber::root_of_unity(4, 1).unwrap());
    }

    #[test]
    fn hilbert_checks() {
        assert!(check_hilbert_poly(&WeightMultiset::new(0, vec![1]), &kappa_power(2)).passed());
        let bad = check_hilbert_poly(&WeightMultiset::new(0, vec![0]), &kappa_power(2));
        assert!(!bad.passed());
        assert!(!bad.at_minus_i_ok);
        assert!(check_hilbert_poly(&WeightMultiset::new(0, vec![0]), &trivial()).passed());
        let wrong_dim = check_hilbert_poly(&WeightMultiset::new(0, vec![0, 0]), &trivial());
        assert!(!wrong_dim.dimension_ok);
    }

    #[test]
    fn kappa_tower_weights() {
        for j in 0..12 {
            let ws = WeightMultiset::new(j % 2, vec![j / 2]);
            assert_eq!(ws.weights(), vec![j]);
            assert!(check_hilbert_poly(&ws, &kappa_power(j)).passed(), "j = {j}");
        }
    }

    #[test]
    fn enumeration_examples() {
        assert_eq!(
            enumerate_weight_multisets(1, 0, m(1, 1, 0), bounds(0, 6, None)).unwrap(),
            vec![WeightMultiset::new(0, vec![1])]
        );
        assert_eq!(
            enumerate_weight_multisets(2, 1, m(0, 0, 1), bounds(0, 3, None)).unwrap(),
            vec![WeightMultiset::new(1, vec![0, 2])]
        );
        assert!(enumerate_weight_multisets(1, 0, m(2, 0, 0), bounds(0, 11, None))
            .unwrap()
            .is_empty());
        assert_eq!(
            enumerate_weight_multisets(1, 0, m(0, 0, 0), bounds(0, 11, Some(0))).unwrap(),
            vec![WeightMultiset::new(0, vec![0])]
        );
        assert!(enumerate_weight_multisets(1, 0, m(0, 0, 0), bounds(0, 11, Some(1)))
            .unwrap()
            .is_empty());
        assert!(matches!(
            enumerate_weight_multisets(1, 0, m(0, 0, 0), bounds(3, 2, None)),
            Err(WeightError::Bounds { .. })
        ));
    }

    #[test]
    fn enumeration_respects_sign_and_order() {
        // k ∈ [−6, 6] with k ≡ 0 mod 6: only Σw ≥ 0 survives
        let out = enumerate_weight_multisets(2, 0, m(0, 0, 0), bounds(-6, 6, None)).unwrap();
        let ks: Vec<Vec<i64>> = out.iter().map(|w| w.ks.clone()).collect();
        assert_eq!(ks, vec![vec![-6, 6], vec![0, 0], vec![0, 6], vec![6, 6]]);
        let mut sorted = out.clone();
        sorted.sort();
        assert_eq!(sorted, out);
    }

    /// Brute-force oracle over all sorted tuples.
    fn brute(d: usize, eps: i64, mult: Multiplicities, lo: i64, hi: i64, sum_w: Option<i64>) -> Vec<WeightMultiset> {
        let mut out = Vec::new();
        let mut idx = vec![lo; d];
        loop {
            if idx.windows(2).all(|w| w[0] <= w[1]) {
                let ws = WeightMultiset::new(eps, idx.clone());
                let s = ws.weight_sum();
                if ws.congruence_counts() == mult.into() && s >= 0 && sum_w.is_none_or(|t| t == s) {
                    out.push(ws);
                }
            }
            let mut i = d;
            loop {
                if i == 0 {
                    out.sort();
                    return out;
                }
                i -= 1;
                if idx[i] < hi {
                    idx[i] += 1;
                    for x in idx.iter_mut().skip(i + 1) {
                        *x = lo;
                    }
                    break;
                }
            }
        }
    }

    #[test]
    fn enumeration_matches_brute_force() {
        for d in 1..=3 {
            for eps in 0..2 {
                for a in 0..=d as u32 {
                    for b1 in 0..=d as u32 {
                        for b2 in 0..=(d as u32 - b1) {
                            for sum in [None, Some(6), Some(7)] {
                                let mult = m(a, b1, b2);
                                let got = enumerate_weight_multisets(d, eps, mult, bounds(-2, 5, sum)).unwrap();
                                assert_eq!(got, brute(d, eps, mult, -2, 5, sum));
                            }
                        }
                    }
                }
            }
        }
    }

    #[test]
    fn dimensions() {
        let triv = dimension_series(&WeightMultiset::new(0, vec![0]), 12).unwrap();
        assert_eq!(triv, vec![1, 0, 0, 0, 1, 0, 1, 0, 1, 0, 1, 0, 2]);
        let kappa = dimension_series(&WeightMultiset::new(1, vec![0]), 13).unwrap();
        assert_eq!(kappa[1], 1);
        assert_eq!(kappa[13], 2);
        assert_eq!(&kappa[1..], &triv[..]);
        assert!(dimension_series(&WeightMultiset::new(0, vec![]), 12).unwrap().iter().all(|&x| x == 0));
        assert!(matches!(
            dimension_series(&WeightMultiset::new(0, vec![-1]), 4),
            Err(WeightError::NotFree(_))
        ));
    }

    #[test]
    fn analysis_report() {
        let r = analyze(&kappa_power(2), Some(bounds(0, 6, None))).unwrap();
        assert_eq!(r.weight_congruence_counts, CongruenceCounts { k_odd: 1, k_mod3_1: 1, k_mod3_2: 0 });
        assert_eq!(r.candidate_multisets.unwrap(), vec![WeightMultiset::new(0, vec![1])]);
        let json = serde_json::to_value(analyze(&trivial(), None).unwrap()).unwrap();
        assert_eq!(json["schema_version"], 1);
        assert_eq!(json["parity"], "even");
        assert!(json.get("candidate_multisets").is_none());
        let sum = direct_sum(&kappa_power(1), &kappa_power(5)).unwrap();
        let r = analyze(&sum, Some(bounds(0, 3, None))).unwrap();
        assert_eq!(r.candidate_multisets.unwrap(), vec![WeightMultiset::new(1, vec![0, 2])]);
    }
}
