//! Truth functions, logical probability, semantic information and
//! cross-entropy for the binary rule `s1 = "x1 ⇒ y1"`.
//!
//! The rule's truth function mixes a clear predicate with a tautology; the
//! tautology's share `b1'` is the degree of disbelief. Choosing `b1'` to
//! minimize the cross-entropy `H(X|θ1)` against the sampled `P(x|y1)` gives
//! the degree of disconfirmation, and one minus it is the causal
//! confirmation measure Cc. [`optimize_disbelief`] does that search
//! numerically so the closed form can be checked against it.
//!
//! All entropies are in bits.

use crate::measures::cc_value;
use crate::tables::JointTable;
use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum SemanticError {
    #[error("{name} = {value} is outside its valid range")]
    OutOfRange { name: &'static str, value: f64 },
    #[error("cause prior P(x1) = {0} is degenerate")]
    DegeneratePrior(f64),
    #[error("logical probability of the statement is 0")]
    ZeroLogicalProbability,
    #[error("b1' * b0' = 1, the semantic channel does not determine a Shannon channel")]
    DegenerateChannel,
    #[error("truth function has {truth} entries but the prior has {prior}")]
    LengthMismatch { truth: usize, prior: usize },
    #[error("distribution sums to {0}, expected 1")]
    UnnormalizedDistribution(f64),
}

/// A distribution over the two causes `{x1, x0}`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BinaryDist {
    p_x1: f64,
}

impl BinaryDist {
    pub fn new(p_x1: f64) -> Result<Self, SemanticError> {
        if (0.0..=1.0).contains(&p_x1) {
            Ok(BinaryDist { p_x1 })
        } else {
            Err(SemanticError::OutOfRange {
                name: "P(x1)",
                value: p_x1,
            })
        }
    }

    pub fn p_x1(&self) -> f64 {
        self.p_x1
    }

    pub fn p_x0(&self) -> f64 {
        1.0 - self.p_x1
    }

    /// `[P(x1), P(x0)]`.
    pub fn as_array(&self) -> [f64; 2] {
        [self.p_x1, 1.0 - self.p_x1]
    }

    fn from_weights(w1: f64, w0: f64) -> BinaryDist {
        BinaryDist { p_x1: w1 / (w1 + w0) }
    }
}

/// Which cause carries truth value 1 in `T(s1|x)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Orientation {
    /// `T(s1|x1) = 1`, `T(s1|x0) = b1'`; used when Cc ≥ 0.
    PositiveBelief,
    /// `T(s1|x1) = b1'`, `T(s1|x0) = 1`; used when Cc < 0.
    NegativeBelief,
}

/// Degrees of disbelief of `s1 = "x1 ⇒ y1"` and `s0 = "x0 ⇒ y0"`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TruthAssignment {
    pub b1_prime: f64,
    pub b0_prime: f64,
    pub orientation: Orientation,
}

impl TruthAssignment {
    pub fn new(b1_prime: f64, b0_prime: f64, orientation: Orientation) -> Result<Self, SemanticError> {
        for (name, v) in [("b1'", b1_prime), ("b0'", b0_prime)] {
            if !(0.0..=1.0).contains(&v) {
                return Err(SemanticError::OutOfRange { name, value: v });
            }
        }
        Ok(TruthAssignment {
            b1_prime,
            b0_prime,
            orientation,
        })
    }

    pub fn positive(b1_prime: f64, b0_prime: f64) -> Result<Self, SemanticError> {
        Self::new(b1_prime, b0_prime, Orientation::PositiveBelief)
    }

    /// `[T(s1|x1), T(s1|x0)]`.
    pub fn s1_truth(&self) -> [f64; 2] {
        s1_truth(self.b1_prime, self.orientation)
    }
}

fn s1_truth(b1_prime: f64, orientation: Orientation) -> [f64; 2] {
    match orientation {
        Orientation::PositiveBelief => [1.0, b1_prime],
        Orientation::NegativeBelief => [b1_prime, 1.0],
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SemanticEvaluation {
    /// `T(s1) = Σ P(x) T(s1|x)`.
    pub logical_probability: f64,
    /// `P(x|θ1)`.
    pub posterior: BinaryDist,
    /// `I(X;θ1)` in bits.
    pub avg_semantic_information: f64,
    /// `H(X|θ1)` in bits.
    pub cross_entropy: f64,
}

/// `−Σ p log2 q`, with `0 · log 0 = 0`.
fn cross_entropy_bits(p: [f64; 2], q: [f64; 2]) -> f64 {
    p.iter()
        .zip(q)
        .filter(|(pi, _)| **pi > 0.0)
        .map(|(pi, qi)| -pi * qi.log2())
        .sum()
}

/// Evaluate the rule's truth function against a sample's `P(x|y1)`.
pub fn evaluate(
    truth: &TruthAssignment,
    cause_prior: BinaryDist,
    posterior_given_outcome: BinaryDist,
) -> Result<SemanticEvaluation, SemanticError> {
    let t = truth.s1_truth();
    let px = cause_prior.as_array();
    let logical = px[0] * t[0] + px[1] * t[1];
    if !(logical > 0.0) {
        return Err(SemanticError::ZeroLogicalProbability);
    }
    let posterior = BinaryDist::from_weights(px[0] * t[0], px[1] * t[1]);
    let target = posterior_given_outcome.as_array();
    let cross_entropy = cross_entropy_bits(target, posterior.as_array());
    let prior_surprisal = cross_entropy_bits(target, px);
    Ok(SemanticEvaluation {
        logical_probability: logical,
        posterior,
        avg_semantic_information: prior_surprisal - cross_entropy,
        cross_entropy,
    })
}

fn check_prior(prior: BinaryDist) -> Result<(), SemanticError> {
    if prior.p_x1() > 0.0 && prior.p_x1() < 1.0 {
        Ok(())
    } else {
        Err(SemanticError::DegeneratePrior(prior.p_x1()))
    }
}

/// Minimizing degree of disbelief together with its orientation.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DisbeliefOptimum {
    pub b1_prime: f64,
    pub orientation: Orientation,
    pub cross_entropy: f64,
}

impl DisbeliefOptimum {
    /// The degree of confirmation: `1 − b1'` or `−(1 − b1')`.
    pub fn confirmation(&self) -> f64 {
        match self.orientation {
            Orientation::PositiveBelief => 1.0 - self.b1_prime,
            Orientation::NegativeBelief => self.b1_prime - 1.0,
        }
    }

    pub fn truth(&self) -> TruthAssignment {
        TruthAssignment {
            b1_prime: self.b1_prime,
            b0_prime: 1.0,
            orientation: self.orientation,
        }
    }
}

/// The analytic minimizer: `b1' = [P(x0|y1)/P(x1|y1)]·[P(x1)/P(x0)]`, or its
/// reciprocal under [`Orientation::NegativeBelief`] when that exceeds 1.
pub fn closed_form_disbelief(
    cause_prior: BinaryDist,
    posterior_given_outcome: BinaryDist,
) -> Result<(f64, Orientation), SemanticError> {
    check_prior(cause_prior)?;
    // ratio of the correlation coefficients m(x0,y1) / m(x1,y1)
    let m1 = posterior_given_outcome.p_x1() / cause_prior.p_x1();
    let m0 = posterior_given_outcome.p_x0() / cause_prior.p_x0();
    if m0 <= m1 {
        Ok((m0 / m1, Orientation::PositiveBelief))
    } else {
        Ok((m1 / m0, Orientation::NegativeBelief))
    }
}

const SCAN_POINTS: usize = 101;
const ARGMIN_TOLERANCE: f64 = 1e-9;

/// Golden-section search for the minimum of a unimodal `f` on `[lo, hi]`,
/// stopping when the bracket is narrower than `tolerance`.
pub fn golden_section_min(f: impl Fn(f64) -> f64, lo: f64, hi: f64, tolerance: f64) -> (f64, f64) {
    let inv_phi = (5f64.sqrt() - 1.0) / 2.0;
    let (mut a, mut b) = (lo, hi);
    let mut c = b - inv_phi * (b - a);
    let mut d = a + inv_phi * (b - a);
    let (mut fc, mut fd) = (f(c), f(d));
    while b - a > tolerance {
        if fc <= fd {
            b = d;
            d = c;
            fd = fc;
            c = b - inv_phi * (b - a);
            fc = f(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + inv_phi * (b - a);
            fd = f(d);
        }
    }
    // the endpoints may beat the interior probes when the minimum is on the boundary
    [(a, f(a)), (c, fc), (d, fd), (b, f(b))]
        .into_iter()
        .fold((f64::NAN, f64::INFINITY), |best, cur| if cur.1 < best.1 { cur } else { best })
}

fn minimize_orientation(
    orientation: Orientation,
    prior: BinaryDist,
    target: BinaryDist,
) -> (f64, f64) {
    let px = prior.as_array();
    let target = target.as_array();
    let objective = |b: f64| {
        let t = s1_truth(b, orientation);
        let (w1, w0) = (px[0] * t[0], px[1] * t[1]);
        let total = w1 + w0;
        if total > 0.0 {
            cross_entropy_bits(target, [w1 / total, w0 / total])
        } else {
            f64::INFINITY
        }
    };
    let step = 1.0 / (SCAN_POINTS - 1) as f64;
    let (k, _) = (0..SCAN_POINTS)
        .map(|k| (k, objective(k as f64 * step)))
        .fold((0, f64::INFINITY), |best, cur| if cur.1 < best.1 { cur } else { best });
    let lo = k.saturating_sub(1) as f64 * step;
    let hi = ((k + 1).min(SCAN_POINTS - 1)) as f64 * step;
    golden_section_min(objective, lo, hi, ARGMIN_TOLERANCE)
}

/// Numerically minimize `H(X|θ1)` over `b1' ∈ [0, 1]`.
///
/// Both orientations are scanned on a 101-point grid, the best grid point is
/// refined by golden-section search to `1e-9`, and the orientation with the
/// lower cross-entropy wins (positive on ties).
pub fn optimize_disbelief(
    cause_prior: BinaryDist,
    posterior_given_outcome: BinaryDist,
) -> Result<DisbeliefOptimum, SemanticError> {
    check_prior(cause_prior)?;
    let (bp, hp) = minimize_orientation(Orientation::PositiveBelief, cause_prior, posterior_given_outcome);
    let (bn, hn) = minimize_orientation(Orientation::NegativeBelief, cause_prior, posterior_given_outcome);
    Ok(if hp <= hn {
        DisbeliefOptimum {
            b1_prime: bp,
            orientation: Orientation::PositiveBelief,
            cross_entropy: hp,
        }
    } else {
        DisbeliefOptimum {
            b1_prime: bn,
            orientation: Orientation::NegativeBelief,
            cross_entropy: hn,
        }
    })
}

/// The Shannon channel implied by the two degrees of disbelief:
/// `P(y1|x1) = (1 − b0')/(1 − b1'b0')`, `P(y0|x0) = (1 − b1')/(1 − b1'b0')`.
pub fn channel_from_disbelief(truth: &TruthAssignment) -> Result<JointTable, SemanticError> {
    let denom = 1.0 - truth.b1_prime * truth.b0_prime;
    if !(denom > 0.0) {
        return Err(SemanticError::DegenerateChannel);
    }
    let p_y1_x1 = ((1.0 - truth.b0_prime) / denom).clamp(0.0, 1.0);
    let p_y0_x0 = ((1.0 - truth.b1_prime) / denom).clamp(0.0, 1.0);
    Ok(JointTable::new(p_y1_x1, 1.0 - p_y0_x0).expect("clamped to [0, 1]"))
}

/// Predict `P(x|θ1)` from a degree of causal confirmation and `P(x)`.
pub fn predict_from_cc(cc: f64, cause_prior: BinaryDist) -> Result<BinaryDist, SemanticError> {
    if !(-1.0..=1.0).contains(&cc) {
        return Err(SemanticError::OutOfRange { name: "Cc", value: cc });
    }
    check_prior(cause_prior)?;
    let (b1_prime, orientation) = if cc >= 0.0 {
        (1.0 - cc, Orientation::PositiveBelief)
    } else {
        (1.0 + cc, Orientation::NegativeBelief)
    };
    let t = s1_truth(b1_prime, orientation);
    Ok(BinaryDist::from_weights(
        cause_prior.p_x1() * t[0],
        cause_prior.p_x0() * t[1],
    ))
}

/// Predict `P(y1|θ_x1)` from Ce: `1/(2 − Ce)` for Ce ≥ 0, mirrored for Ce < 0.
pub fn predict_from_ce(ce: f64) -> Result<f64, SemanticError> {
    if !(-1.0..=1.0).contains(&ce) {
        return Err(SemanticError::OutOfRange { name: "Ce", value: ce });
    }
    Ok(if ce >= 0.0 {
        1.0 / (2.0 - ce)
    } else {
        1.0 - 1.0 / (2.0 + ce)
    })
}

/// Logical probability `T(θ) = Σ P(x) T(θ|x)` and posterior
/// `P(x|θ) = P(x) T(θ|x) / T(θ)` for a general truth function.
pub fn truth_posterior(truth: &[f64], prior: &[f64]) -> Result<(f64, Vec<f64>), SemanticError> {
    if truth.len() != prior.len() {
        return Err(SemanticError::LengthMismatch {
            truth: truth.len(),
            prior: prior.len(),
        });
    }
    if let Some(&v) = truth.iter().find(|v| !(0.0..=1.0).contains(*v)) {
        return Err(SemanticError::OutOfRange { name: "T(θ|x)", value: v });
    }
    if let Some(&v) = prior.iter().find(|v| !(0.0..=1.0).contains(*v)) {
        return Err(SemanticError::OutOfRange { name: "P(x)", value: v });
    }
    let total: f64 = prior.iter().sum();
    if (total - 1.0).abs() > 1e-9 {
        return Err(SemanticError::UnnormalizedDistribution(total));
    }
    let logical: f64 = truth.iter().zip(prior).map(|(t, p)| t * p).sum();
    if !(logical > 0.0) {
        return Err(SemanticError::ZeroLogicalProbability);
    }
    let posterior = truth.iter().zip(prior).map(|(t, p)| p * t / logical).collect();
    Ok((logical, posterior))
}

/// Cc of a channel read off a table, for round-trip checks.
pub fn channel_confirmations(table: &JointTable) -> (Option<f64>, Option<f64>) {
    (
        cc_value(table.p_y1_given_x1(), table.p_y1_given_x0()),
        cc_value(table.p_y0_given_x0(), table.p_y0_given_x1()),
    )
}
