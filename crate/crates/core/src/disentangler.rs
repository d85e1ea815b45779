//! The one-sided Disentangler: `(|HH⟩ + |VV⟩)/√2 → α|HH⟩ + β|VV⟩`.
//!
//! A linear map on photon 1 sends `|H₁⟩ ↦ a|H₁⟩ + b|V₁⟩` and
//! `|V₁⟩ ↦ c|H₁⟩ + d|V₁⟩`. Matching its action on the balanced state to the
//! target forces `b = c = 0`, `a = √2·α` and `d = √2·β`; the audit then checks
//! those rows against unitarity and keeps every step of the derivation.

use std::f64::consts::{FRAC_1_SQRT_2, SQRT_2};

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use crate::json;
use crate::linmaps::{lift_local, BasisMapSpec, EPS_UNITARY};
use crate::qcore::{marginal, Space, StateVector, EPS_NORM};
use crate::{Error, Result, C64};

/// Margin on `|α| ≠ 1/√2` for a target to count as signalling.
pub const EPS_SIG: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DisentanglerTarget {
    #[serde(with = "json::complex")]
    alpha: C64,
    #[serde(with = "json::complex")]
    beta: C64,
}

impl DisentanglerTarget {
    pub fn new(alpha: C64, beta: C64) -> Result<Self> {
        let n = alpha.norm_sqr() + beta.norm_sqr();
        if !n.is_finite() || (n - 1.0).abs() > EPS_NORM {
            return Err(Error::NotNormalized { norm_sqr: n });
        }
        Ok(Self { alpha, beta })
    }

    pub fn alpha(&self) -> C64 {
        self.alpha
    }

    pub fn beta(&self) -> C64 {
        self.beta
    }

    /// Whether `|α|` is away from `1/√2` by more than [`EPS_SIG`].
    pub fn signalling(&self) -> bool {
        (self.alpha.norm() - FRAC_1_SQRT_2).abs() > EPS_SIG
    }

    /// `α|H₁H₂⟩ + β|V₁V₂⟩`.
    pub fn state(&self) -> StateVector {
        StateVector::from_terms(Space::photon_pair(), &[("H1H2", self.alpha), ("V1V2", self.beta)])
            .expect("validated target")
    }
}

/// `(|H₁H₂⟩ + |V₁V₂⟩)/√2`.
pub fn entangled_state() -> StateVector {
    let r = C64::new(FRAC_1_SQRT_2, 0.0);
    StateVector::from_terms(Space::photon_pair(), &[("H1H2", r), ("V1V2", r)])
        .expect("normalized Bell state")
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LocalCoefficients {
    #[serde(with = "json::complex")]
    pub a: C64,
    #[serde(with = "json::complex")]
    pub b: C64,
    #[serde(with = "json::complex")]
    pub c: C64,
    #[serde(with = "json::complex")]
    pub d: C64,
}

impl LocalCoefficients {
    /// The photon-1 matrix `[[a, c], [b, d]]` (columns are the images of H and V).
    pub fn local_matrix(&self) -> DMatrix<C64> {
        DMatrix::from_row_slice(2, 2, &[self.a, self.c, self.b, self.d])
    }

    /// The map on photon 1 alone.
    pub fn local_map(&self) -> BasisMapSpec {
        BasisMapSpec::from_matrix(Space::photon(), Space::photon(), &self.local_matrix())
            .expect("2x2 on a photon")
    }

    /// The same map acting on photon 1 of the pair, identity on photon 2.
    pub fn pair_map(&self) -> BasisMapSpec {
        let sp = Space::photon_pair();
        let m = lift_local(&self.local_matrix(), &sp, 0).expect("photon 1 of a pair");
        BasisMapSpec::from_matrix(sp.clone(), sp, &m).expect("4x4 on the pair")
    }
}

/// The unique coefficients that take the balanced state to the target.
pub fn solve(target: &DisentanglerTarget) -> LocalCoefficients {
    let zero = C64::new(0.0, 0.0);
    LocalCoefficients { a: target.alpha * SQRT_2, b: zero, c: zero, d: target.beta * SQRT_2 }
}

/// One checked equality of the derivation.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DerivationStep {
    pub claim: String,
    #[serde(with = "json::complex")]
    pub lhs: C64,
    #[serde(with = "json::complex")]
    pub rhs: C64,
    pub holds: bool,
}

impl DerivationStep {
    fn new(claim: &str, lhs: C64, rhs: C64, tol: f64) -> Self {
        Self { claim: claim.to_string(), lhs, rhs, holds: (lhs - rhs).norm() <= tol }
    }

    fn real(claim: &str, lhs: f64, rhs: f64, tol: f64) -> Self {
        Self::new(claim, C64::new(lhs, 0.0), C64::new(rhs, 0.0), tol)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AuditVerdict {
    pub target: DisentanglerTarget,
    pub signalling: bool,
    pub coefficients: LocalCoefficients,
    /// `|a|² + |b|²`.
    pub unitarity_row1: f64,
    /// `|c|² + |d|²`.
    pub unitarity_row2: f64,
    pub contradiction: bool,
    pub narrative: Vec<DerivationStep>,
}

pub fn audit(target: &DisentanglerTarget) -> AuditVerdict {
    let k = solve(target);
    let unitarity_row1 = k.a.norm_sqr() + k.b.norm_sqr();
    let unitarity_row2 = k.c.norm_sqr() + k.d.norm_sqr();
    let contradiction =
        (unitarity_row1 - 1.0).abs() > EPS_UNITARY || (unitarity_row2 - 1.0).abs() > EPS_UNITARY;

    // The linear image of the balanced state, read off at the four basis labels.
    let image = crate::linmaps::extend(&k.pair_map(), &entangled_state())
        .expect("pair map acts on the pair space");
    let amp = |label: &str| image.amplitudes()[Space::photon_pair().find(label).unwrap()];
    let zero = C64::new(0.0, 0.0);
    let tol = 1e-12;
    let (alpha, beta) = (target.alpha, target.beta);
    let narrative = vec![
        DerivationStep::real(
            "target normalization: |α|² + |β|² = 1",
            alpha.norm_sqr() + beta.norm_sqr(),
            1.0,
            EPS_NORM,
        ),
        DerivationStep::new("no |V₁H₂⟩ term: b/√2 = 0", amp("V1H2"), zero, tol),
        DerivationStep::new("no |H₁V₂⟩ term: c/√2 = 0", amp("H1V2"), zero, tol),
        DerivationStep::new("|H₁H₂⟩ amplitude: a/√2 = α", amp("H1H2"), alpha, tol),
        DerivationStep::new("|V₁V₂⟩ amplitude: d/√2 = β", amp("V1V2"), beta, tol),
        DerivationStep::real("|a|² = 2|α|²", k.a.norm_sqr(), 2.0 * alpha.norm_sqr(), tol),
        DerivationStep::real("|d|² = 2|β|²", k.d.norm_sqr(), 2.0 * beta.norm_sqr(), tol),
        DerivationStep::real("unitarity, row 1: |a|² + |b|² = 1", unitarity_row1, 1.0, EPS_UNITARY),
        DerivationStep::real("unitarity, row 2: |c|² + |d|² = 1", unitarity_row2, 1.0, EPS_UNITARY),
    ];

    AuditVerdict {
        target: *target,
        signalling: target.signalling(),
        coefficients: k,
        unitarity_row1,
        unitarity_row2,
        contradiction,
        narrative,
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ShiftReport {
    /// Receiver `P(H₂)` on the balanced state.
    pub before: f64,
    /// Receiver `P(H₂)` on the target state.
    pub after: f64,
    pub shift: f64,
}

/// Photon-2 `H` statistics before and after the device acts.
pub fn receiver_shift(target: &DisentanglerTarget) -> ShiftReport {
    let before = marginal(&entangled_state(), 1, "H").expect("photon 2 exists");
    let after = marginal(&target.state(), 1, "H").expect("photon 2 exists");
    ShiftReport { before, after, shift: after - before }
}
