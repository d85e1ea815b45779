//! The basis-map Entangler on `span{|Ψ₁⟩, |Ψ₂⟩}`:
//!
//! ```text
//! |Ψ₁⟩ ↦ (|Ψ₁⟩ + s₁|Ψ₂⟩)/√2
//! |Ψ₂⟩ ↦ phase₂ · (|Ψ₁⟩ + s₂|Ψ₂⟩)/√2
//! ```
//!
//! The two signs are independent parameters. Whether the map is unitary
//! depends on them: equal signs give `⟨u₁|u₂⟩ = phase₂`, opposite signs give 0.
//! The single-superposition norm check passes for every sign choice, which is
//! why the Gram audit is reported next to it.
//!
//! On the photon pair, `|Ψ₁⟩ = |H₁H₂⟩` and `|Ψ₂⟩ = |V₁V₂⟩`, and the map is
//! padded with the identity on `span{|H₁V₂⟩, |V₁H₂⟩}`.

use std::f64::consts::FRAC_1_SQRT_2;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::json;
use crate::linmaps::{
    extend, extend_identity_on_complement, gram, BasisMapSpec, FactorReport, GramReport,
    SubspaceExtension,
};
use crate::qcore::{
    marginal, schmidt, Bipartition, SchmidtReport, Space, StateLiteral, StateVector, EPS_NORM,
};
use crate::{Error, Result, C64};

/// Photon-pair basis indices of `|Ψ₁⟩ = |H₁H₂⟩` and `|Ψ₂⟩ = |V₁V₂⟩`.
pub const PAIR_EMBEDDING: [usize; 2] = [0, 3];

/// The two-dimensional domain `{Ψ1, Ψ2}`.
pub fn psi_space() -> Space {
    Space::single("", &["Psi1", "Psi2"])
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Sign {
    #[serde(rename = "+")]
    Plus,
    #[serde(rename = "-")]
    Minus,
}

impl Sign {
    pub fn value(self) -> f64 {
        match self {
            Sign::Plus => 1.0,
            Sign::Minus => -1.0,
        }
    }
}

impl fmt::Display for Sign {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Sign::Plus => "+",
            Sign::Minus => "-",
        })
    }
}

/// `|Ψ₁⟩ ↦ a|Ψ₁⟩ + b|Ψ₂⟩`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GeneralForm {
    #[serde(with = "json::complex")]
    pub a: C64,
    #[serde(with = "json::complex")]
    pub b: C64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EntanglerParams {
    pub s1: Sign,
    pub s2: Sign,
    #[serde(with = "json::complex")]
    pub phase2: C64,
    pub general: Option<GeneralForm>,
}

impl EntanglerParams {
    /// Sign reading with `phase₂ = i`.
    pub fn signs(s1: Sign, s2: Sign) -> Self {
        Self { s1, s2, phase2: C64::new(0.0, 1.0), general: None }
    }

    /// `"++"`, `"+-"`, ... for sign readings.
    pub fn parse_signs(s: &str) -> Result<Self> {
        let sign = |c| match c {
            '+' => Ok(Sign::Plus),
            '-' => Ok(Sign::Minus),
            _ => Err(Error::Parse(format!("bad sign reading `{s}`"))),
        };
        let chars: Vec<char> = s.chars().collect();
        if chars.len() != 2 {
            return Err(Error::Parse(format!("sign reading must be two of +/-, got `{s}`")));
        }
        Ok(Self::signs(sign(chars[0])?, sign(chars[1])?))
    }

    /// General form for `|Ψ₁⟩`, `phase₂ = i` on the completed partner.
    pub fn general(a: C64, b: C64) -> Self {
        Self { general: Some(GeneralForm { a, b }), ..Self::signs(Sign::Plus, Sign::Plus) }
    }

    pub fn with_phase(mut self, phase2: C64) -> Self {
        self.phase2 = phase2;
        self
    }

    pub fn reading(&self) -> String {
        match self.general {
            Some(g) => format!(
                "general(a={}{:+}i, b={}{:+}i)",
                g.a.re, g.a.im, g.b.re, g.b.im
            ),
            None => format!("{}{}", self.s1, self.s2),
        }
    }

    pub fn validate(&self) -> Result<()> {
        if (self.phase2.norm() - 1.0).abs() > EPS_NORM {
            return Err(Error::InvalidParameter(format!(
                "phase2 must have unit modulus, got |phase2| = {}",
                self.phase2.norm()
            )));
        }
        if let Some(g) = self.general {
            let n = g.a.norm_sqr() + g.b.norm_sqr();
            if (n - 1.0).abs() > EPS_NORM {
                return Err(Error::NotNormalized { norm_sqr: n });
            }
        }
        Ok(())
    }
}

/// The four sign readings `++, +-, -+, --` with `phase₂ = i`.
pub fn all_readings() -> [EntanglerParams; 4] {
    use Sign::*;
    [(Plus, Plus), (Plus, Minus), (Minus, Plus), (Minus, Minus)]
        .map(|(a, b)| EntanglerParams::signs(a, b))
}

/// How the image of `|Ψ₂⟩` was obtained for the general form.
pub const GENERAL_COMPLETION: &str =
    "image of Psi2 completed as phase2 * (-conj(b)|Psi1> + conj(a)|Psi2>), the unit partner orthogonal to the image of Psi1";

pub fn build(params: &EntanglerParams) -> Result<BasisMapSpec> {
    params.validate()?;
    let (u1, u2) = match params.general {
        Some(GeneralForm { a, b }) => {
            (vec![a, b], vec![-b.conj() * params.phase2, a.conj() * params.phase2])
        }
        None => {
            let r = C64::new(FRAC_1_SQRT_2, 0.0);
            (
                vec![r, r * params.s1.value()],
                vec![r * params.phase2, r * params.phase2 * params.s2.value()],
            )
        }
    };
    BasisMapSpec::new(psi_space(), psi_space(), vec![u1, u2])
}

/// The single-superposition norm check: `‖E((|Ψ₁⟩ + |Ψ₂⟩)/√2)‖² = 1`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SingleInputCheck {
    pub input: StateLiteral,
    pub image: StateLiteral,
    pub image_norm_sqr: f64,
    pub passes: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EntanglerAudit {
    pub reading: String,
    pub params: EntanglerParams,
    pub gram: GramReport,
    pub single_input_check: SingleInputCheck,
    pub completion: Option<String>,
}

pub fn audit(params: &EntanglerParams) -> Result<EntanglerAudit> {
    let spec = build(params)?;
    let r = C64::new(FRAC_1_SQRT_2, 0.0);
    let input = StateVector::new(psi_space(), vec![r, r])?;
    let image = extend(&spec, &input)?;
    let image_norm_sqr = image.norm_sqr();
    Ok(EntanglerAudit {
        reading: params.reading(),
        params: *params,
        gram: gram(&spec),
        single_input_check: SingleInputCheck {
            input: input.to_literal(),
            image: image.to_literal(),
            image_norm_sqr,
            passes: (image_norm_sqr - 1.0).abs() <= EPS_NORM,
        },
        completion: params.general.map(|_| GENERAL_COMPLETION.to_string()),
    })
}

/// The map on the photon pair, identity on `span{|H₁V₂⟩, |V₁H₂⟩}`.
pub fn full_space(params: &EntanglerParams) -> Result<SubspaceExtension> {
    extend_identity_on_complement(&build(params)?, &Space::photon_pair(), &PAIR_EMBEDDING)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DemoReport {
    pub initial: StateLiteral,
    #[serde(rename = "final")]
    pub output: StateLiteral,
    pub output_norm_sqr: f64,
    pub schmidt_before: SchmidtReport,
    pub schmidt_after: SchmidtReport,
    /// Photon-2 `P(H)`.
    pub marginal_before: f64,
    pub marginal_after: f64,
    pub extension: String,
}

/// Applies the padded map to a product state of the photon pair.
pub fn demo(initial: &StateVector, params: &EntanglerParams) -> Result<DemoReport> {
    let pair = Space::photon_pair();
    if initial.space() != &pair {
        return Err(Error::SpaceMismatch("demo runs on the photon-pair space".into()));
    }
    let cut = Bipartition::first(&pair)?;
    let schmidt_before = schmidt(initial, &cut)?;
    if schmidt_before.rank != 1 {
        return Err(Error::InvalidParameter(format!(
            "initial state must be a product state, Schmidt rank is {}",
            schmidt_before.rank
        )));
    }
    let ext = full_space(params)?;
    let out = extend(&ext.as_spec(), initial)?;
    let output_norm_sqr = out.norm_sqr();
    let output = out.to_literal();
    let after = out.into_state()?;
    Ok(DemoReport {
        initial: initial.to_literal(),
        output,
        output_norm_sqr,
        schmidt_before,
        schmidt_after: schmidt(&after, &cut)?,
        marginal_before: marginal(initial, 1, "H")?,
        marginal_after: marginal(&after, 1, "H")?,
        extension: ext.note.to_string(),
    })
}

/// Everything reported for one reading.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EntanglerReport {
    pub audit: EntanglerAudit,
    pub locality: FactorReport,
    /// Starting from `|H₁H₂⟩`; absent when the padded map is not norm preserving
    /// on that input.
    pub demo: Option<DemoReport>,
    pub demo_error: Option<String>,
}

pub fn report(params: &EntanglerParams) -> Result<EntanglerReport> {
    let audit = audit(params)?;
    let locality = full_space(params)?.local_factor(0)?;
    let hh = StateVector::basis(Space::photon_pair(), 0)?;
    let (demo, demo_error) = match demo(&hh, params) {
        Ok(d) => (Some(d), None),
        Err(e) => (None, Some(e.to_string())),
    };
    Ok(EntanglerReport { audit, locality, demo, demo_error })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linmaps::Witness;
    use crate::qcore::EPS_RANK;

    fn c(re: f64, im: f64) -> C64 {
        C64::new(re, im)
    }

    const R: f64 = FRAC_1_SQRT_2;

    #[test]
    fn same_sign_is_the_displayed_map() {
        let m = build(&EntanglerParams::parse_signs("++").unwrap()).unwrap().matrix();
        assert_eq!(m[(0, 0)], c(R, 0.0));
        assert_eq!(m[(1, 0)], c(R, 0.0));
        assert_eq!(m[(0, 1)], c(0.0, R));
        assert_eq!(m[(1, 1)], c(0.0, R));
    }

    #[test]
    fn opposite_sign_reading() {
        let m = build(&EntanglerParams::parse_signs("+-").unwrap()).unwrap().matrix();
        assert_eq!(m[(1, 1)], c(0.0, -R));
    }

    #[test]
    fn degenerate_general_form_is_identity_on_psi1() {
        let spec = build(&EntanglerParams::general(c(1.0, 0.0), c(0.0, 0.0))).unwrap();
        assert_eq!(spec.images()[0].amplitudes(), [c(1.0, 0.0), c(0.0, 0.0)]);
    }

    #[test]
    fn validation() {
        assert!(EntanglerParams::parse_signs("+").is_err());
        assert!(EntanglerParams::parse_signs("+x").is_err());
        let bad = EntanglerParams::signs(Sign::Plus, Sign::Plus).with_phase(c(2.0, 0.0));
        assert!(matches!(build(&bad), Err(Error::InvalidParameter(_))));
        let bad = EntanglerParams::general(c(1.0, 0.0), c(1.0, 0.0));
        assert!(matches!(build(&bad), Err(Error::NotNormalized { .. })));
    }

    #[test]
    fn same_sign_audit() {
        let a = audit(&EntanglerParams::parse_signs("++").unwrap()).unwrap();
        // 2|(1+i)/2|² = 1.
        assert!((a.single_input_check.image_norm_sqr - 1.0).abs() < 1e-15);
        assert!(a.single_input_check.passes);
        let img = a.single_input_check.image.amplitudes();
        assert!((img[0] - c(0.5, 0.5)).norm() < 1e-15);
        assert!((img[1] - c(0.5, 0.5)).norm() < 1e-15);
        assert!(!a.gram.is_isometry);
        assert!((a.gram.gram[(0, 1)] - c(0.0, 1.0)).norm() < 1e-15);
    }

    #[test]
    fn same_sign_witness() {
        // (|Ψ₁⟩ − i|Ψ₂⟩)/√2 maps to |Ψ₁⟩ + |Ψ₂⟩ (norm² 2); (|Ψ₁⟩ + i|Ψ₂⟩)/√2 maps to 0.
        let spec = build(&EntanglerParams::parse_signs("++").unwrap()).unwrap();
        let plus_i = StateVector::new(psi_space(), vec![c(R, 0.0), c(0.0, R)]).unwrap();
        assert!(extend(&spec, &plus_i).unwrap().norm_sqr() < 1e-30);
        let minus_i = StateVector::new(psi_space(), vec![c(R, 0.0), c(0.0, -R)]).unwrap();
        assert!((extend(&spec, &minus_i).unwrap().norm_sqr() - 2.0).abs() < 1e-15);

        let g = gram(&spec);
        match g.witness {
            Some(Witness::NormDeviation { image_norm_sqr, .. }) => {
                assert!((image_norm_sqr - 2.0).abs() < 1e-10)
            }
            w => panic!("expected norm witness, got {w:?}"),
        }
    }

    #[test]
    fn opposite_sign_audit() {
        let a = audit(&EntanglerParams::parse_signs("+-").unwrap()).unwrap();
        assert!(a.gram.is_isometry);
        assert!(a.single_input_check.passes);
    }

    #[test]
    fn demo_same_sign() {
        let hh = StateVector::basis(Space::photon_pair(), 0).unwrap();
        let d = demo(&hh, &EntanglerParams::parse_signs("++").unwrap()).unwrap();
        assert_eq!(d.marginal_before, 1.0);
        assert!((d.marginal_after - 0.5).abs() < 1e-15);
        assert_eq!(d.schmidt_before.rank, 1);
        assert_eq!(d.schmidt_after.rank, 2);
        let out = d.output.amplitudes();
        assert!((out[0] - c(R, 0.0)).norm() < 1e-15 && (out[3] - c(R, 0.0)).norm() < 1e-15);
    }

    #[test]
    fn demo_general_forms() {
        let hh = StateVector::basis(Space::photon_pair(), 0).unwrap();
        let d = demo(&hh, &EntanglerParams::general(c(1.0, 0.0), c(0.0, 0.0))).unwrap();
        assert_eq!(d.marginal_after, d.marginal_before);
        assert_eq!(d.schmidt_after.rank, 1);
        let d = demo(&hh, &EntanglerParams::general(c(0.6, 0.0), c(0.8, 0.0))).unwrap();
        assert!((d.marginal_after - 0.36).abs() < 1e-15);
        assert!(d.schmidt_after.coefficients.iter().all(|&x| x > EPS_RANK));
    }

    #[test]
    fn demo_rejects_entangled_input() {
        let bell = crate::disentangler::entangled_state();
        let err = demo(&bell, &EntanglerParams::parse_signs("++").unwrap()).unwrap_err();
        assert!(matches!(err, Error::InvalidParameter(_)));
    }

    #[test]
    fn general_completion_is_unitary() {
        let p = EntanglerParams::general(c(0.6, 0.0), c(0.0, 0.8));
        let a = audit(&p).unwrap();
        assert!(a.gram.is_isometry);
        assert_eq!(a.completion.as_deref(), Some(GENERAL_COMPLETION));
    }
}
