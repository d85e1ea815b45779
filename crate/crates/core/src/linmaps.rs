//! Linear maps given by the images of basis vectors.
//!
//! Unitarity is audited through the Gram matrix `G[i][j] = ⟨imageᵢ|imageⱼ⟩`:
//! a map preserves every inner product iff `G = I`. When it does not, the
//! audit hands back a concrete refutation (an input whose image norm is off,
//! or a pair of basis images with the wrong overlap) rather than just a flag.
//!
//! Locality on a bipartite space is tested by projecting the joint matrix onto
//! the operators of the form `A ⊗ I` and measuring what is left over.

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use crate::json;
use crate::qcore::{RawVector, Space, StateLiteral, StateVector};
use crate::{Error, Result, C64};

/// Tolerance on `‖G − I‖_max` for the isometry verdict.
pub const EPS_UNITARY: f64 = 1e-10;
/// Residual below which a joint map counts as `A ⊗ I`.
pub const EPS_LOCAL: f64 = 1e-8;

/// Flag attached to any report built from a subspace map padded with the identity.
pub const IDENTITY_ON_COMPLEMENT: &str =
    "map defined on a subspace; extended as the identity on its orthogonal complement";

/// A linear map stored as one (possibly unnormalized) image per domain basis vector.
#[derive(Debug, Clone, PartialEq)]
pub struct BasisMapSpec {
    domain: Space,
    codomain: Space,
    images: Vec<RawVector>,
}

impl BasisMapSpec {
    pub fn new(domain: Space, codomain: Space, images: Vec<Vec<C64>>) -> Result<Self> {
        if images.len() != domain.dimension() {
            return Err(Error::DimensionMismatch {
                expected: domain.dimension(),
                got: images.len(),
            });
        }
        let images = images
            .into_iter()
            .map(|v| RawVector::new(codomain.clone(), v))
            .collect::<Result<Vec<_>>>()?;
        Ok(Self { domain, codomain, images })
    }

    pub fn identity(space: Space) -> Self {
        let m = DMatrix::identity(space.dimension(), space.dimension());
        Self::from_matrix(space.clone(), space, &m).expect("square identity")
    }

    /// Columns of `m` become the images.
    pub fn from_matrix(domain: Space, codomain: Space, m: &DMatrix<C64>) -> Result<Self> {
        if m.shape() != (codomain.dimension(), domain.dimension()) {
            return Err(Error::SpaceMismatch(format!(
                "matrix is {}x{}, spaces need {}x{}",
                m.nrows(),
                m.ncols(),
                codomain.dimension(),
                domain.dimension()
            )));
        }
        let images = (0..m.ncols()).map(|j| m.column(j).iter().copied().collect()).collect();
        Self::new(domain, codomain, images)
    }

    pub fn domain(&self) -> &Space {
        &self.domain
    }

    pub fn codomain(&self) -> &Space {
        &self.codomain
    }

    pub fn images(&self) -> &[RawVector] {
        &self.images
    }

    pub fn matrix(&self) -> DMatrix<C64> {
        DMatrix::from_fn(self.codomain.dimension(), self.domain.dimension(), |i, j| {
            self.images[j].amplitudes()[i]
        })
    }
}

fn apply(spec: &BasisMapSpec, space: &Space, amplitudes: &[C64]) -> Result<RawVector> {
    if space != &spec.domain {
        return Err(Error::SpaceMismatch(format!(
            "input lives on {:?}, map expects {:?}",
            space.labels(),
            spec.domain.labels()
        )));
    }
    let mut out = vec![C64::new(0.0, 0.0); spec.codomain.dimension()];
    for (s, image) in amplitudes.iter().zip(&spec.images) {
        for (o, x) in out.iter_mut().zip(image.amplitudes()) {
            *o += s * x;
        }
    }
    RawVector::new(spec.codomain.clone(), out)
}

/// Linear extension `Σᵢ sᵢ · imageᵢ`. The output is not renormalized.
pub fn extend(spec: &BasisMapSpec, s: &StateVector) -> Result<RawVector> {
    apply(spec, s.space(), s.amplitudes())
}

/// [`extend`] for arbitrary (unnormalized) inputs.
pub fn extend_raw(spec: &BasisMapSpec, v: &RawVector) -> Result<RawVector> {
    apply(spec, v.space(), v.amplitudes())
}

/// Concrete evidence that a map is not an isometry.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Witness {
    /// A normalized input whose image norm² differs from 1.
    NormDeviation {
        input: StateLiteral,
        /// Eigenvalue of `G − I` the input was taken from.
        eigenvalue: f64,
        image_norm_sqr: f64,
    },
    /// Two basis images whose overlap differs from `δᵢⱼ`.
    InnerProduct {
        i: usize,
        j: usize,
        #[serde(with = "json::complex")]
        value: C64,
    },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GramReport {
    #[serde(with = "json::matrix")]
    pub gram: DMatrix<C64>,
    pub is_isometry: bool,
    /// `‖G − I‖_max`.
    pub max_deviation: f64,
    /// `‖imageᵢ‖` for each basis vector.
    pub per_basis_norms: Vec<f64>,
    /// Present exactly when `is_isometry` is false.
    pub witness: Option<Witness>,
}

/// Gram matrix of the basis images, isometry verdict, and a refutation when it fails.
pub fn gram(spec: &BasisMapSpec) -> GramReport {
    let n = spec.images.len();
    let g = DMatrix::from_fn(n, n, |i, j| {
        spec.images[i]
            .amplitudes()
            .iter()
            .zip(spec.images[j].amplitudes())
            .map(|(x, y)| x.conj() * y)
            .sum::<C64>()
    });
    let (mut max_deviation, mut worst) = (0.0_f64, (0, 0));
    for i in 0..n {
        for j in 0..n {
            let delta = if i == j { 1.0 } else { 0.0 };
            let d = (g[(i, j)] - delta).norm();
            if d > max_deviation {
                max_deviation = d;
                worst = (i, j);
            }
        }
    }
    let per_basis_norms = (0..n).map(|i| g[(i, i)].re.sqrt()).collect();
    let is_isometry = max_deviation <= EPS_UNITARY;
    let witness = if is_isometry {
        None
    } else {
        Some(non_isometry_witness(spec, &g, max_deviation, worst))
    };
    GramReport { gram: g, is_isometry, max_deviation, per_basis_norms, witness }
}

/// Top eigenvector of `G − I`: its image has norm² `1 + λ`. Falls back to the
/// worst basis pair when the norm deviation is too small to be convincing.
fn non_isometry_witness(
    spec: &BasisMapSpec,
    g: &DMatrix<C64>,
    max_deviation: f64,
    worst: (usize, usize),
) -> Witness {
    let n = g.nrows();
    let h = g - DMatrix::<C64>::identity(n, n);
    let eig = h.symmetric_eigen();
    // Largest |λ|; on a magnitude tie the positive eigenvalue wins.
    let k = (0..n)
        .max_by(|&a, &b| {
            let (la, lb) = (eig.eigenvalues[a], eig.eigenvalues[b]);
            let (ma, mb) = (la.abs(), lb.abs());
            if (ma - mb).abs() <= 1e-12 {
                la.total_cmp(&lb)
            } else {
                ma.total_cmp(&mb)
            }
        })
        .expect("non-empty map");
    let lambda = eig.eigenvalues[k];
    let mut v: Vec<C64> = eig.eigenvectors.column(k).iter().copied().collect();
    let norm = v.iter().map(C64::norm_sqr).sum::<f64>().sqrt();
    // Fix the phase so the first dominant component is real and positive.
    let pivot = v
        .iter()
        .copied()
        .fold(C64::new(0.0, 0.0), |best, z| if z.norm() > best.norm() + 1e-12 { z } else { best });
    let rot = pivot.conj() / (pivot.norm() * norm);
    for z in &mut v {
        *z *= rot;
    }
    let input = RawVector::new(spec.domain.clone(), v).expect("domain-sized eigenvector");
    let image_norm_sqr = extend_raw(spec, &input).expect("same domain").norm_sqr();
    if (image_norm_sqr.sqrt() - 1.0).abs() >= max_deviation / 4.0 {
        Witness::NormDeviation { input: input.to_literal(), eigenvalue: lambda, image_norm_sqr }
    } else {
        Witness::InnerProduct { i: worst.0, j: worst.1, value: g[worst] }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FactorReport {
    pub factorable: bool,
    /// Least-squares `A` in `M ≈ A ⊗ I` (acted subsystem against the rest).
    #[serde(with = "json::matrix")]
    pub best_local_factor: DMatrix<C64>,
    /// `‖M − A ⊗ I‖_F`.
    pub residual: f64,
    pub acted: usize,
    /// Set when `M` came from padding a subspace map.
    pub extension: Option<String>,
}

/// For basis index `x`: (symbol of the acted subsystem, index over the rest).
fn split_index(space: &Space, acted: usize, x: usize) -> (usize, Vec<usize>) {
    let mut d = space.digits(x);
    let a = d.remove(acted);
    (a, d)
}

/// `A` acting on subsystem `acted`, identity elsewhere.
pub fn lift_local(a: &DMatrix<C64>, space: &Space, acted: usize) -> Result<DMatrix<C64>> {
    space.check_subsystem(acted)?;
    let da = space.dims()[acted];
    if a.shape() != (da, da) {
        return Err(Error::DimensionMismatch { expected: da, got: a.nrows() });
    }
    let n = space.dimension();
    Ok(DMatrix::from_fn(n, n, |x, y| {
        let (ax, rx) = split_index(space, acted, x);
        let (ay, ry) = split_index(space, acted, y);
        if rx == ry {
            a[(ax, ay)]
        } else {
            C64::new(0.0, 0.0)
        }
    }))
}

/// Best fit `A[i][j] = tr(block_ij) / d_rest` and the residual of `M − A ⊗ I`.
pub fn local_factor(m: &DMatrix<C64>, space: &Space, acted: usize) -> Result<FactorReport> {
    if m.nrows() != m.ncols() {
        return Err(Error::NotSquare { rows: m.nrows(), cols: m.ncols() });
    }
    if m.nrows() != space.dimension() {
        return Err(Error::DimensionMismatch { expected: space.dimension(), got: m.nrows() });
    }
    space.check_subsystem(acted)?;
    if space.len() < 2 {
        return Err(Error::DegenerateCut("locality needs at least two subsystems".into()));
    }
    let da = space.dims()[acted];
    let d_rest = (space.dimension() / da) as f64;
    let n = space.dimension();
    let mut a = DMatrix::<C64>::zeros(da, da);
    for x in 0..n {
        for y in 0..n {
            let (ax, rx) = split_index(space, acted, x);
            let (ay, ry) = split_index(space, acted, y);
            if rx == ry {
                a[(ax, ay)] += m[(x, y)];
            }
        }
    }
    a /= C64::new(d_rest, 0.0);
    let residual = (m - lift_local(&a, space, acted)?).norm();
    Ok(FactorReport {
        factorable: residual <= EPS_LOCAL,
        best_local_factor: a,
        residual,
        acted,
        extension: None,
    })
}

/// A subspace map padded to a square matrix on the full space.
#[derive(Debug, Clone, PartialEq)]
pub struct SubspaceExtension {
    pub space: Space,
    pub matrix: DMatrix<C64>,
    pub note: &'static str,
}

impl SubspaceExtension {
    pub fn as_spec(&self) -> BasisMapSpec {
        BasisMapSpec::from_matrix(self.space.clone(), self.space.clone(), &self.matrix)
            .expect("square on its own space")
    }

    pub fn local_factor(&self, acted: usize) -> Result<FactorReport> {
        let mut r = local_factor(&self.matrix, &self.space, acted)?;
        r.extension = Some(self.note.to_string());
        Ok(r)
    }
}

/// Embeds a square subspace map (domain basis `j` ↦ full basis `embedding[j]`)
/// and acts as the identity on the orthogonal complement.
pub fn extend_identity_on_complement(
    spec: &BasisMapSpec,
    full: &Space,
    embedding: &[usize],
) -> Result<SubspaceExtension> {
    let k = spec.domain.dimension();
    if spec.codomain.dimension() != k {
        return Err(Error::SpaceMismatch("subspace map must be square".into()));
    }
    if embedding.len() != k {
        return Err(Error::DimensionMismatch { expected: k, got: embedding.len() });
    }
    let n = full.dimension();
    for (i, &e) in embedding.iter().enumerate() {
        if e >= n || embedding[..i].contains(&e) {
            return Err(Error::InvalidParameter(format!("bad embedding index {e}")));
        }
    }
    let u = spec.matrix();
    let mut m = DMatrix::<C64>::identity(n, n);
    for &e in embedding {
        m[(e, e)] = C64::new(0.0, 0.0);
    }
    for (i, &ei) in embedding.iter().enumerate() {
        for (j, &ej) in embedding.iter().enumerate() {
            m[(ei, ej)] = u[(i, j)];
        }
    }
    Ok(SubspaceExtension { space: full.clone(), matrix: m, note: IDENTITY_ON_COMPLEMENT })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::qcore::{marginal, StateVector};
    use std::f64::consts::FRAC_1_SQRT_2;

    const R: f64 = FRAC_1_SQRT_2;

    fn c(re: f64, im: f64) -> C64 {
        C64::new(re, im)
    }

    fn psi_space() -> Space {
        Space::single("", &["Psi1", "Psi2"])
    }

    fn two_image(u1: [C64; 2], u2: [C64; 2]) -> BasisMapSpec {
        BasisMapSpec::new(psi_space(), psi_space(), vec![u1.to_vec(), u2.to_vec()]).unwrap()
    }

    #[test]
    fn extend_reproduces_linear_expansion() {
        let (a, b, cc, d) = (c(0.3, 0.1), c(-0.2, 0.5), c(0.7, 0.0), c(0.1, -0.4));
        let sp = Space::photon_pair();
        // |HH⟩ ↦ a|HH⟩ + b|VH⟩, |VV⟩ ↦ c|HV⟩ + d|VV⟩; the middle images are irrelevant here.
        let z = c(0.0, 0.0);
        let spec = BasisMapSpec::new(
            sp.clone(),
            sp.clone(),
            vec![vec![a, z, b, z], vec![z; 4], vec![z; 4], vec![z, cc, z, d]],
        )
        .unwrap();
        let bell = StateVector::from_terms(sp, &[("H1H2", c(R, 0.0)), ("V1V2", c(R, 0.0))]).unwrap();
        let out = extend(&spec, &bell).unwrap();
        let want = [a * R, cc * R, b * R, d * R];
        for (x, y) in out.amplitudes().iter().zip(want) {
            assert!((x - y).norm() < 1e-15);
        }
    }

    #[test]
    fn identity_is_identity() {
        let sp = Space::photon_pair();
        let s = StateVector::new(sp.clone(), vec![c(0.5, 0.0), c(0.0, 0.5), c(-0.5, 0.0), c(0.0, -0.5)])
            .unwrap();
        let out = extend(&BasisMapSpec::identity(sp.clone()), &s).unwrap();
        assert_eq!(out.amplitudes(), s.amplitudes());
        let g = gram(&BasisMapSpec::identity(sp));
        assert!(g.is_isometry);
        assert_eq!(g.max_deviation, 0.0);
        assert!(g.witness.is_none());
    }

    #[test]
    fn extend_space_mismatch() {
        let s = StateVector::basis(Space::photon(), 0).unwrap();
        let spec = BasisMapSpec::identity(Space::photon_pair());
        assert!(matches!(extend(&spec, &s), Err(Error::SpaceMismatch(_))));
    }

    #[test]
    fn gram_same_sign_pair() {
        // ⟨u₁|u₂⟩ = (1/√2)(i/√2)(1 + 1) = i.
        let spec = two_image([c(R, 0.0), c(R, 0.0)], [c(0.0, R), c(0.0, R)]);
        let g = gram(&spec);
        let want = [[c(1.0, 0.0), c(0.0, 1.0)], [c(0.0, -1.0), c(1.0, 0.0)]];
        for i in 0..2 {
            for j in 0..2 {
                assert!((g.gram[(i, j)] - want[i][j]).norm() < 1e-15);
            }
        }
        assert!(!g.is_isometry);
        assert!((g.max_deviation - 1.0).abs() < 1e-15);
        match g.witness.unwrap() {
            Witness::NormDeviation { eigenvalue, image_norm_sqr, input } => {
                assert!((eigenvalue - 1.0).abs() < 1e-12);
                assert!((image_norm_sqr - 2.0).abs() < 1e-12);
                // Eigenvector of [[0, i], [-i, 0]] for +1 is (1, -i)/√2.
                let v = input.amplitudes();
                assert!((v[0] - c(R, 0.0)).norm() < 1e-12);
                assert!((v[1] - c(0.0, -R)).norm() < 1e-12);
            }
            w => panic!("unexpected witness {w:?}"),
        }
    }

    #[test]
    fn gram_opposite_sign_pair() {
        // ⟨u₁|u₂⟩ = (1/√2)(i/√2)(1 − 1) = 0.
        let spec = two_image([c(R, 0.0), c(R, 0.0)], [c(0.0, R), c(0.0, -R)]);
        let g = gram(&spec);
        assert!(g.is_isometry);
        assert!(g.max_deviation < 1e-15);
        assert!(g.per_basis_norms.iter().all(|n| (n - 1.0).abs() < 1e-15));
    }

    #[test]
    fn gram_is_hermitian() {
        let spec = two_image([c(0.3, 0.2), c(-1.0, 0.4)], [c(0.9, -0.1), c(0.2, 0.7)]);
        let g = gram(&spec).gram;
        assert_eq!(g[(0, 1)], g[(1, 0)].conj());
    }

    #[test]
    fn witness_falls_back_to_basis_pair_for_large_norms() {
        // Norms 10 and 1: eigen witness gives |‖·‖−1| = 9 but max deviation is 99.
        let spec = two_image([c(10.0, 0.0), c(0.0, 0.0)], [c(0.0, 0.0), c(1.0, 0.0)]);
        let g = gram(&spec);
        assert!((g.max_deviation - 99.0).abs() < 1e-12);
        assert_eq!(
            g.witness,
            Some(Witness::InnerProduct { i: 0, j: 0, value: c(100.0, 0.0) })
        );
    }

    fn hadamard() -> DMatrix<C64> {
        DMatrix::from_row_slice(2, 2, &[c(R, 0.0), c(R, 0.0), c(R, 0.0), c(-R, 0.0)])
    }

    fn cnot() -> DMatrix<C64> {
        let mut m = DMatrix::<C64>::zeros(4, 4);
        for (i, j) in [(0, 0), (1, 1), (2, 3), (3, 2)] {
            m[(i, j)] = c(1.0, 0.0);
        }
        m
    }

    #[test]
    fn hadamard_tensor_identity_factors() {
        let sp = Space::photon_pair();
        let m = lift_local(&hadamard(), &sp, 0).unwrap();
        // Block form [[H₀₀ I, H₀₁ I], [H₁₀ I, H₁₁ I]].
        assert_eq!(m[(0, 2)], c(R, 0.0));
        assert_eq!(m[(1, 2)], c(0.0, 0.0));
        let r = local_factor(&m, &sp, 0).unwrap();
        assert!(r.factorable);
        assert!(r.residual < 1e-15);
        assert!((&r.best_local_factor - hadamard()).norm() < 1e-15);
    }

    #[test]
    fn factor_on_second_subsystem() {
        let sp = Space::photon_pair();
        let m = lift_local(&hadamard(), &sp, 1).unwrap();
        assert!(local_factor(&m, &sp, 1).unwrap().factorable);
        assert!(!local_factor(&m, &sp, 0).unwrap().factorable);
    }

    #[test]
    fn cnot_is_not_local() {
        // Blocks are I (top-left) and X (bottom-right). Best fit A = diag(1, 0),
        // leaving exactly X in the bottom-right: residual ‖X‖_F = √2.
        let r = local_factor(&cnot(), &Space::photon_pair(), 0).unwrap();
        assert!(!r.factorable);
        assert!((r.residual - 2f64.sqrt()).abs() < 1e-14);
        assert!(r.residual > 0.1);
    }

    #[test]
    fn local_factor_validation() {
        let sp = Space::photon_pair();
        let m = DMatrix::<C64>::zeros(4, 3);
        assert_eq!(local_factor(&m, &sp, 0), Err(Error::NotSquare { rows: 4, cols: 3 }));
        assert!(matches!(
            local_factor(&cnot(), &sp, 2),
            Err(Error::SubsystemOutOfRange { .. })
        ));
    }

    #[test]
    fn identity_on_complement_padding() {
        let spec = two_image([c(R, 0.0), c(R, 0.0)], [c(0.0, R), c(0.0, R)]);
        let ext = extend_identity_on_complement(&spec, &Space::photon_pair(), &[0, 3]).unwrap();
        assert_eq!(ext.matrix[(1, 1)], c(1.0, 0.0));
        assert_eq!(ext.matrix[(2, 2)], c(1.0, 0.0));
        assert_eq!(ext.matrix[(3, 0)], c(R, 0.0));
        let hh = StateVector::basis(Space::photon_pair(), 0).unwrap();
        let out = extend(&ext.as_spec(), &hh).unwrap().into_state().unwrap();
        assert!((marginal(&out, 1, "H").unwrap() - 0.5).abs() < 1e-15);
        let f = ext.local_factor(0).unwrap();
        assert!(!f.factorable);
        assert_eq!(f.extension.as_deref(), Some(IDENTITY_ON_COMPLEMENT));
    }
}
