//! Pure states on small labeled tensor-product spaces.
//!
//! Basis ordering is row-major over subsystems with the first subsystem most
//! significant. For the photon pair that gives `H1H2, H1V2, V1H2, V1V2` at
//! indices `0..4`.
//!
//! Physical states ([`StateVector`]) are normalized to within [`EPS_NORM`] at
//! construction and are never renormalized silently. Anything that may have
//! lost normalization (the output of an arbitrary linear map, say) is a
//! [`RawVector`] until it is explicitly checked back in.

use std::fmt;

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use crate::{Error, Result, C64};

/// Tolerance on `Σ|aᵢ|² = 1` for a vector to count as physical.
pub const EPS_NORM: f64 = 1e-10;
/// Singular values above this count toward the Schmidt rank.
pub const EPS_RANK: f64 = 1e-9;
/// Largest supported total dimension.
pub const MAX_DIMENSION: usize = 64;

/// One tensor factor: a name and its ordered outcome alphabet.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Subsystem {
    pub name: String,
    pub symbols: Vec<String>,
}

impl Subsystem {
    pub fn new<S: Into<String>>(name: S, symbols: &[&str]) -> Self {
        Self {
            name: name.into(),
            symbols: symbols.iter().map(|s| s.to_string()).collect(),
        }
    }

    pub fn dim(&self) -> usize {
        self.symbols.len()
    }
}

/// How a basis label is rendered as a string.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum LabelStyle {
    /// Symbol followed by subsystem name: `H1V2`.
    #[default]
    Compact,
    /// `name=symbol` pairs joined by commas: `X1=1,X2=0`.
    Assign,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Space {
    subsystems: Vec<Subsystem>,
    #[serde(default)]
    style: LabelStyle,
}

impl Space {
    pub fn new(subsystems: Vec<Subsystem>, style: LabelStyle) -> Result<Self> {
        if subsystems.is_empty() {
            return Err(Error::EmptySpace);
        }
        let mut dim: usize = 1;
        for (k, sub) in subsystems.iter().enumerate() {
            if sub.symbols.is_empty() {
                return Err(Error::EmptySubsystem(sub.name.clone()));
            }
            if subsystems[..k].iter().any(|o| o.name == sub.name) {
                return Err(Error::Duplicate { what: "subsystem", name: sub.name.clone() });
            }
            for (i, s) in sub.symbols.iter().enumerate() {
                if sub.symbols[..i].contains(s) {
                    return Err(Error::Duplicate { what: "symbol", name: s.clone() });
                }
            }
            dim = dim
                .checked_mul(sub.dim())
                .filter(|&d| d <= MAX_DIMENSION)
                .ok_or(Error::DimensionTooLarge(dim.saturating_mul(sub.dim())))?;
        }
        Ok(Self { subsystems, style })
    }

    /// Two photons with H/V polarisation, labels `H1H2` etc.
    pub fn photon_pair() -> Self {
        Self::new(
            vec![Subsystem::new("1", &["H", "V"]), Subsystem::new("2", &["H", "V"])],
            LabelStyle::Compact,
        )
        .expect("static space")
    }

    /// One photon, labels `H1`, `V1`.
    pub fn photon() -> Self {
        Self::single("1", &["H", "V"])
    }

    /// Two spin-½ particles, labels `+1-2` etc.
    pub fn spin_pair() -> Self {
        Self::new(
            vec![Subsystem::new("1", &["+", "-"]), Subsystem::new("2", &["+", "-"])],
            LabelStyle::Compact,
        )
        .expect("static space")
    }

    /// Box occupancies, labels `X1=1,X2=0` etc.
    pub fn two_box() -> Self {
        Self::new(
            vec![Subsystem::new("X1", &["0", "1"]), Subsystem::new("X2", &["0", "1"])],
            LabelStyle::Assign,
        )
        .expect("static space")
    }

    pub fn single(name: &str, symbols: &[&str]) -> Self {
        Self::new(vec![Subsystem::new(name, symbols)], LabelStyle::Compact).expect("static space")
    }

    pub fn subsystems(&self) -> &[Subsystem] {
        &self.subsystems
    }

    pub fn len(&self) -> usize {
        self.subsystems.len()
    }

    pub fn is_empty(&self) -> bool {
        self.subsystems.is_empty()
    }

    pub fn dims(&self) -> Vec<usize> {
        self.subsystems.iter().map(Subsystem::dim).collect()
    }

    pub fn dimension(&self) -> usize {
        self.subsystems.iter().map(Subsystem::dim).product()
    }

    /// Per-subsystem symbol indices of basis vector `index`.
    pub fn digits(&self, mut index: usize) -> Vec<usize> {
        let mut out = vec![0; self.subsystems.len()];
        for (k, sub) in self.subsystems.iter().enumerate().rev() {
            out[k] = index % sub.dim();
            index /= sub.dim();
        }
        out
    }

    pub fn compose(&self, digits: &[usize]) -> usize {
        digits
            .iter()
            .zip(&self.subsystems)
            .fold(0, |acc, (&d, sub)| acc * sub.dim() + d)
    }

    pub fn check_subsystem(&self, index: usize) -> Result<()> {
        if index < self.subsystems.len() {
            Ok(())
        } else {
            Err(Error::SubsystemOutOfRange { index, count: self.subsystems.len() })
        }
    }

    pub fn symbol_index(&self, subsystem: usize, symbol: &str) -> Result<usize> {
        self.check_subsystem(subsystem)?;
        self.subsystems[subsystem]
            .symbols
            .iter()
            .position(|s| s == symbol)
            .ok_or_else(|| Error::UnknownSymbol { subsystem, symbol: symbol.to_string() })
    }

    pub fn index_of(&self, label: &BasisLabel) -> Result<usize> {
        if label.0.len() != self.subsystems.len() {
            return Err(Error::UnknownLabel(label.0.join(" ")));
        }
        let digits = label
            .0
            .iter()
            .enumerate()
            .map(|(k, s)| self.symbol_index(k, s))
            .collect::<Result<Vec<_>>>()?;
        Ok(self.compose(&digits))
    }

    pub fn label_at(&self, index: usize) -> BasisLabel {
        BasisLabel(
            self.digits(index)
                .into_iter()
                .zip(&self.subsystems)
                .map(|(d, sub)| sub.symbols[d].clone())
                .collect(),
        )
    }

    pub fn format_label(&self, label: &BasisLabel) -> String {
        let parts = label.0.iter().zip(&self.subsystems);
        match self.style {
            LabelStyle::Compact => parts.map(|(s, sub)| format!("{s}{}", sub.name)).collect(),
            LabelStyle::Assign => parts
                .map(|(s, sub)| format!("{}={s}", sub.name))
                .collect::<Vec<_>>()
                .join(","),
        }
    }

    /// Rendered labels of every basis vector, in index order.
    pub fn labels(&self) -> Vec<String> {
        (0..self.dimension())
            .map(|i| self.format_label(&self.label_at(i)))
            .collect()
    }

    /// Looks up a rendered label such as `"H1V2"`.
    pub fn find(&self, rendered: &str) -> Result<usize> {
        (0..self.dimension())
            .find(|&i| self.format_label(&self.label_at(i)) == rendered)
            .ok_or_else(|| Error::UnknownLabel(rendered.to_string()))
    }

    pub fn parse_label(&self, rendered: &str) -> Result<BasisLabel> {
        self.find(rendered).map(|i| self.label_at(i))
    }

    /// Concatenation `self ⊗ other`; subsystem names must stay distinct.
    pub fn concat(&self, other: &Space) -> Result<Space> {
        let mut subs = self.subsystems.clone();
        subs.extend(other.subsystems.iter().cloned());
        Space::new(subs, self.style)
    }

    /// The space spanned by a subset of subsystems, in the given order.
    pub fn restrict(&self, subsystems: &[usize]) -> Result<Space> {
        let subs = subsystems
            .iter()
            .map(|&k| self.check_subsystem(k).map(|_| self.subsystems[k].clone()))
            .collect::<Result<Vec<_>>>()?;
        Space::new(subs, self.style)
    }
}

/// Per-subsystem outcome symbols, e.g. `["H", "V"]` for `|H₁V₂⟩`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct BasisLabel(pub Vec<String>);

impl BasisLabel {
    pub fn new(symbols: &[&str]) -> Self {
        Self(symbols.iter().map(|s| s.to_string()).collect())
    }
}

/// JSON literal `{"basis": [...], "re": [...], "im": [...]}`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StateLiteral {
    pub basis: Vec<String>,
    pub re: Vec<f64>,
    pub im: Vec<f64>,
}

impl StateLiteral {
    fn from_parts(space: &Space, amplitudes: &[C64]) -> Self {
        Self {
            basis: space.labels(),
            re: amplitudes.iter().map(|z| z.re).collect(),
            im: amplitudes.iter().map(|z| z.im).collect(),
        }
    }

    pub fn amplitudes(&self) -> Vec<C64> {
        self.re.iter().zip(&self.im).map(|(&r, &i)| C64::new(r, i)).collect()
    }
}

fn norm_sqr(amplitudes: &[C64]) -> f64 {
    amplitudes.iter().map(C64::norm_sqr).sum()
}

/// A normalized pure state.
#[derive(Debug, Clone, PartialEq)]
pub struct StateVector {
    space: Space,
    amplitudes: Vec<C64>,
}

impl StateVector {
    /// Rejects vectors of the wrong length or with `|Σ|aᵢ|² − 1| > EPS_NORM`.
    pub fn new(space: Space, amplitudes: Vec<C64>) -> Result<Self> {
        RawVector::new(space, amplitudes)?.into_state()
    }

    pub fn basis(space: Space, index: usize) -> Result<Self> {
        let dim = space.dimension();
        if index >= dim {
            return Err(Error::DimensionMismatch { expected: dim, got: index + 1 });
        }
        let mut amplitudes = vec![C64::new(0.0, 0.0); dim];
        amplitudes[index] = C64::new(1.0, 0.0);
        Ok(Self { space, amplitudes })
    }

    /// Builds `Σ cₖ|labelₖ⟩` from rendered labels; repeated labels add up.
    pub fn from_terms(space: Space, terms: &[(&str, C64)]) -> Result<Self> {
        RawVector::from_terms(space, terms)?.into_state()
    }

    pub fn space(&self) -> &Space {
        &self.space
    }

    pub fn amplitudes(&self) -> &[C64] {
        &self.amplitudes
    }

    pub fn amplitude(&self, label: &BasisLabel) -> Result<C64> {
        Ok(self.amplitudes[self.space.index_of(label)?])
    }

    pub fn norm_sqr(&self) -> f64 {
        norm_sqr(&self.amplitudes)
    }

    pub fn with_global_phase(&self, phi: f64) -> Self {
        let w = C64::from_polar(1.0, phi);
        Self {
            space: self.space.clone(),
            amplitudes: self.amplitudes.iter().map(|a| a * w).collect(),
        }
    }

    pub fn to_literal(&self) -> StateLiteral {
        StateLiteral::from_parts(&self.space, &self.amplitudes)
    }

    pub fn into_raw(self) -> RawVector {
        RawVector { space: self.space, amplitudes: self.amplitudes }
    }
}

/// An amplitude vector with no normalization guarantee.
#[derive(Debug, Clone, PartialEq)]
pub struct RawVector {
    space: Space,
    amplitudes: Vec<C64>,
}

impl RawVector {
    pub fn new(space: Space, amplitudes: Vec<C64>) -> Result<Self> {
        let dim = space.dimension();
        if amplitudes.len() != dim {
            return Err(Error::DimensionMismatch { expected: dim, got: amplitudes.len() });
        }
        Ok(Self { space, amplitudes })
    }

    pub fn zeros(space: Space) -> Self {
        let dim = space.dimension();
        Self { space, amplitudes: vec![C64::new(0.0, 0.0); dim] }
    }

    pub fn from_terms(space: Space, terms: &[(&str, C64)]) -> Result<Self> {
        let mut v = Self::zeros(space);
        for (label, c) in terms {
            let i = v.space.find(label)?;
            v.amplitudes[i] += c;
        }
        Ok(v)
    }

    pub fn space(&self) -> &Space {
        &self.space
    }

    pub fn amplitudes(&self) -> &[C64] {
        &self.amplitudes
    }

    pub fn norm_sqr(&self) -> f64 {
        norm_sqr(&self.amplitudes)
    }

    pub fn norm(&self) -> f64 {
        self.norm_sqr().sqrt()
    }

    pub fn is_normalized(&self) -> bool {
        (self.norm_sqr() - 1.0).abs() <= EPS_NORM
    }

    pub fn scaled(&self, c: C64) -> Self {
        Self {
            space: self.space.clone(),
            amplitudes: self.amplitudes.iter().map(|a| a * c).collect(),
        }
    }

    pub fn into_state(self) -> Result<StateVector> {
        let n = self.norm_sqr();
        if (n - 1.0).abs() > EPS_NORM {
            return Err(Error::NotNormalized { norm_sqr: n });
        }
        Ok(StateVector { space: self.space, amplitudes: self.amplitudes })
    }

    pub fn to_literal(&self) -> StateLiteral {
        StateLiteral::from_parts(&self.space, &self.amplitudes)
    }
}

/// `a ⊗ b` on the concatenated space.
pub fn tensor(a: &StateVector, b: &StateVector) -> Result<StateVector> {
    let space = a.space.concat(&b.space)?;
    let amplitudes = a
        .amplitudes
        .iter()
        .flat_map(|x| b.amplitudes.iter().map(move |y| x * y))
        .collect();
    StateVector::new(space, amplitudes)
}

/// Born probability `|⟨outcome|s⟩|²` of a full basis outcome.
pub fn born(s: &StateVector, outcome: &BasisLabel) -> Result<f64> {
    Ok(s.amplitude(outcome)?.norm_sqr())
}

/// Probability that subsystem `subsystem` (0-based) shows `outcome`.
pub fn marginal(s: &StateVector, subsystem: usize, outcome: &str) -> Result<f64> {
    let want = s.space.symbol_index(subsystem, outcome)?;
    Ok(s.amplitudes
        .iter()
        .enumerate()
        .filter(|(i, _)| s.space.digits(*i)[subsystem] == want)
        .map(|(_, a)| a.norm_sqr())
        .sum())
}

/// A split of the subsystems into `left` and its complement.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Bipartition {
    pub left: Vec<usize>,
    pub right: Vec<usize>,
}

impl Bipartition {
    pub fn new(space: &Space, left: &[usize]) -> Result<Self> {
        let mut l: Vec<usize> = left.to_vec();
        l.sort_unstable();
        l.dedup();
        for &k in &l {
            space.check_subsystem(k)?;
        }
        let right: Vec<usize> = (0..space.len()).filter(|k| !l.contains(k)).collect();
        if l.is_empty() || right.is_empty() {
            return Err(Error::DegenerateCut(format!(
                "{:?} against {} subsystems leaves an empty side",
                left,
                space.len()
            )));
        }
        Ok(Self { left: l, right })
    }

    /// Subsystem 0 against everything else.
    pub fn first(space: &Space) -> Result<Self> {
        Self::new(space, &[0])
    }
}

impl fmt::Display for Bipartition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:?}|{:?}", self.left, self.right)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SchmidtReport {
    pub rank: usize,
    /// Schmidt coefficients above [`EPS_RANK`], descending.
    pub coefficients: Vec<f64>,
    pub cut: Bipartition,
}

/// One term `σ |left⟩ ⊗ |right⟩` of a Schmidt decomposition.
#[derive(Debug, Clone, PartialEq)]
pub struct SchmidtTerm {
    pub coefficient: f64,
    pub left: Vec<C64>,
    pub right: Vec<C64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SchmidtDecomposition {
    pub left_space: Space,
    pub right_space: Space,
    /// All singular triplets, descending; includes numerically zero ones.
    pub terms: Vec<SchmidtTerm>,
}

/// Amplitude matrix `M[l][r]` of `s` reshaped along `cut`.
pub fn reshape(s: &StateVector, cut: &Bipartition) -> Result<DMatrix<C64>> {
    let left_space = s.space.restrict(&cut.left)?;
    let right_space = s.space.restrict(&cut.right)?;
    let mut m = DMatrix::zeros(left_space.dimension(), right_space.dimension());
    for (i, a) in s.amplitudes.iter().enumerate() {
        let d = s.space.digits(i);
        let l = left_space.compose(&cut.left.iter().map(|&k| d[k]).collect::<Vec<_>>());
        let r = right_space.compose(&cut.right.iter().map(|&k| d[k]).collect::<Vec<_>>());
        m[(l, r)] = *a;
    }
    Ok(m)
}

pub fn schmidt_decomposition(s: &StateVector, cut: &Bipartition) -> Result<SchmidtDecomposition> {
    let left_space = s.space.restrict(&cut.left)?;
    let right_space = s.space.restrict(&cut.right)?;
    let svd = reshape(s, cut)?.svd(true, true);
    let u = svd.u.expect("requested u");
    let v_t = svd.v_t.expect("requested v_t");
    let mut order: Vec<usize> = (0..svd.singular_values.len()).collect();
    order.sort_by(|&a, &b| svd.singular_values[b].total_cmp(&svd.singular_values[a]));
    let terms = order
        .into_iter()
        .map(|k| SchmidtTerm {
            coefficient: svd.singular_values[k],
            left: u.column(k).iter().copied().collect(),
            right: v_t.row(k).iter().copied().collect(),
        })
        .collect();
    Ok(SchmidtDecomposition { left_space, right_space, terms })
}

/// Schmidt coefficients and rank of `s` across `cut`.
pub fn schmidt(s: &StateVector, cut: &Bipartition) -> Result<SchmidtReport> {
    let dec = schmidt_decomposition(s, cut)?;
    let coefficients: Vec<f64> = dec
        .terms
        .iter()
        .map(|t| t.coefficient)
        .filter(|&c| c > EPS_RANK)
        .collect();
    Ok(SchmidtReport { rank: coefficients.len(), coefficients, cut: cut.clone() })
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::FRAC_1_SQRT_2;

    fn c(re: f64) -> C64 {
        C64::new(re, 0.0)
    }

    fn bell() -> StateVector {
        StateVector::from_terms(
            Space::photon_pair(),
            &[("H1H2", c(FRAC_1_SQRT_2)), ("V1V2", c(FRAC_1_SQRT_2))],
        )
        .unwrap()
    }

    fn dis(alpha: f64, beta: f64) -> StateVector {
        StateVector::from_terms(Space::photon_pair(), &[("H1H2", c(alpha)), ("V1V2", c(beta))])
            .unwrap()
    }

    #[test]
    fn index_convention() {
        assert_eq!(Space::photon_pair().labels(), ["H1H2", "H1V2", "V1H2", "V1V2"]);
        assert_eq!(
            Space::two_box().labels(),
            ["X1=0,X2=0", "X1=0,X2=1", "X1=1,X2=0", "X1=1,X2=1"]
        );
        let s = Space::photon_pair();
        for i in 0..4 {
            assert_eq!(s.compose(&s.digits(i)), i);
            assert_eq!(s.index_of(&s.label_at(i)).unwrap(), i);
        }
    }

    #[test]
    fn space_validation() {
        assert_eq!(Space::new(vec![], LabelStyle::Compact), Err(Error::EmptySpace));
        assert!(matches!(
            Space::new(vec![Subsystem::new("1", &["H"]), Subsystem::new("1", &["H"])], LabelStyle::Compact),
            Err(Error::Duplicate { .. })
        ));
        let big: Vec<_> = (0..7).map(|k| Subsystem::new(k.to_string(), &["0", "1"])).collect();
        assert!(matches!(Space::new(big, LabelStyle::Compact), Err(Error::DimensionTooLarge(128))));
    }

    #[test]
    fn tensor_basis_product() {
        let h1 = StateVector::basis(Space::single("1", &["H", "V"]), 0).unwrap();
        let h2 = StateVector::basis(Space::single("2", &["H", "V"]), 0).unwrap();
        let hh = tensor(&h1, &h2).unwrap();
        assert_eq!(hh.space().labels(), ["H1H2", "H1V2", "V1H2", "V1V2"]);
        assert_eq!(hh.amplitudes()[0], c(1.0));
        assert_eq!(hh.norm_sqr(), 1.0);
    }

    #[test]
    fn tensor_distributes() {
        let plus = StateVector::new(
            Space::single("1", &["H", "V"]),
            vec![c(FRAC_1_SQRT_2), c(FRAC_1_SQRT_2)],
        )
        .unwrap();
        let h2 = StateVector::basis(Space::single("2", &["H", "V"]), 0).unwrap();
        let out = tensor(&plus, &h2).unwrap();
        let want = [c(FRAC_1_SQRT_2), c(0.0), c(FRAC_1_SQRT_2), c(0.0)];
        assert_eq!(out.amplitudes(), want);
    }

    #[test]
    fn tensor_rejects_clashing_names() {
        let h = StateVector::basis(Space::photon(), 0).unwrap();
        assert!(matches!(tensor(&h, &h), Err(Error::Duplicate { .. })));
    }

    #[test]
    fn physical_constructor_refuses_to_renormalize() {
        let err = StateVector::new(Space::photon(), vec![c(1.0), c(1.0)]).unwrap_err();
        assert_eq!(err, Error::NotNormalized { norm_sqr: 2.0 });
        let raw = RawVector::new(Space::photon(), vec![c(1.0), c(1.0)]).unwrap();
        assert!(!raw.is_normalized());
        assert_eq!(raw.norm_sqr(), 2.0);
    }

    #[test]
    fn born_examples() {
        let hh = BasisLabel::new(&["H", "H"]);
        let vv = BasisLabel::new(&["V", "V"]);
        assert!((born(&bell(), &hh).unwrap() - 0.5).abs() < 1e-15);
        let prod = StateVector::basis(Space::photon_pair(), 0).unwrap();
        assert_eq!(born(&prod, &vv).unwrap(), 0.0);
        assert!((born(&dis(0.6, 0.8), &hh).unwrap() - 0.36).abs() < 1e-15);
        assert!(matches!(
            born(&prod, &BasisLabel::new(&["H", "X"])),
            Err(Error::UnknownSymbol { .. })
        ));
    }

    #[test]
    fn marginal_examples() {
        assert!((marginal(&bell(), 1, "H").unwrap() - 0.5).abs() < 1e-15);
        let prod = StateVector::basis(Space::photon_pair(), 0).unwrap();
        assert_eq!(marginal(&prod, 1, "H").unwrap(), 1.0);
        assert!((marginal(&dis(0.6, 0.8), 1, "H").unwrap() - 0.36).abs() < 1e-15);
        assert_eq!(
            marginal(&prod, 2, "H"),
            Err(Error::SubsystemOutOfRange { index: 2, count: 2 })
        );
    }

    #[test]
    fn schmidt_examples() {
        let cut = Bipartition::first(&Space::photon_pair()).unwrap();
        let prod = StateVector::basis(Space::photon_pair(), 0).unwrap();
        let r = schmidt(&prod, &cut).unwrap();
        assert_eq!(r.rank, 1);
        assert!((r.coefficients[0] - 1.0).abs() < 1e-15);

        let r = schmidt(&bell(), &cut).unwrap();
        assert_eq!(r.rank, 2);
        for x in &r.coefficients {
            assert!((x - FRAC_1_SQRT_2).abs() < 1e-14);
        }

        // The amplitude matrix of 0.6|HH⟩ + 0.8|VV⟩ is diag(0.6, 0.8), whose
        // singular values are read off the diagonal.
        let r = schmidt(&dis(0.6, 0.8), &cut).unwrap();
        assert_eq!(r.rank, 2);
        assert!((r.coefficients[0] - 0.8).abs() < 1e-14);
        assert!((r.coefficients[1] - 0.6).abs() < 1e-14);
    }

    #[test]
    fn degenerate_cuts() {
        let sp = Space::photon_pair();
        assert!(matches!(Bipartition::new(&sp, &[]), Err(Error::DegenerateCut(_))));
        assert!(matches!(Bipartition::new(&sp, &[0, 1]), Err(Error::DegenerateCut(_))));
        assert!(matches!(Bipartition::new(&sp, &[5]), Err(Error::SubsystemOutOfRange { .. })));
    }

    #[test]
    fn reshape_respects_noncontiguous_cut() {
        // Three qubits, cut {1} | {0, 2}. |0 1 0⟩ sits at left index 1, right index 0.
        let sp = Space::new(
            (0..3).map(|k| Subsystem::new(k.to_string(), &["0", "1"])).collect(),
            LabelStyle::Compact,
        )
        .unwrap();
        let s = StateVector::basis(sp.clone(), 0b010).unwrap();
        let m = reshape(&s, &Bipartition::new(&sp, &[1]).unwrap()).unwrap();
        assert_eq!(m.shape(), (2, 4));
        assert_eq!(m[(1, 0)], c(1.0));
    }
}
