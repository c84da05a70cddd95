//! Self-adjoint functionals and traces on a block algebra.
//!
//! A [`Functional`] is given by one dual matrix per block, acting by
//! `φ(a) = Σ_i tr(D_i a_i)`; its norm is the sum of the blockwise trace
//! norms, which is the dual of the operator norm. A [`TracialFunctional`]
//! is the special case `D_i = λ_i·1` and carries the entire trace theory:
//! Jordan decomposition, the ε-splitting of positive elements, the vector
//! lattice with join `τ₁∨τ₂ = (τ₁−τ₂)⁺ + τ₂`, and compression to a
//! hereditary corner `pAp`.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::matalg::{
    hermitian_part, trace_norm, BlockAlgebra, CMatrix, Element, Tolerance,
};

#[derive(Debug, Clone)]
pub struct Functional {
    parent: BlockAlgebra,
    duals: Vec<CMatrix>,
}

/// `τ(a) = Σ_i λ_i tr(a_i)`; the general form of a self-adjoint trace.
#[derive(Debug, Clone, PartialEq)]
pub struct TracialFunctional {
    parent: BlockAlgebra,
    weights: Vec<f64>,
}

impl Functional {
    pub fn new(parent: BlockAlgebra, duals: Vec<CMatrix>) -> Result<Self> {
        if duals.len() != parent.num_blocks() {
            return Err(Error::Invalid(format!(
                "expected {} dual matrices, got {}",
                parent.num_blocks(),
                duals.len()
            )));
        }
        for (i, (d, &n)) in duals.iter().zip(parent.block_dims()).enumerate() {
            if d.nrows() != n || d.ncols() != n {
                return Err(Error::Invalid(format!(
                    "dual {i} must be {n}x{n}, got {}x{}",
                    d.nrows(),
                    d.ncols()
                )));
            }
        }
        Ok(Functional { parent, duals })
    }

    pub fn zero(parent: &BlockAlgebra) -> Functional {
        let duals = parent
            .block_dims()
            .iter()
            .map(|&n| CMatrix::zeros(n, n))
            .collect();
        Functional {
            parent: parent.clone(),
            duals,
        }
    }

    pub fn parent(&self) -> &BlockAlgebra {
        &self.parent
    }

    pub fn duals(&self) -> &[CMatrix] {
        &self.duals
    }

    pub fn evaluate(&self, a: &Element) -> Result<Complex64> {
        if a.parent() != &self.parent {
            return Err(Error::ParentMismatch);
        }
        Ok(self
            .duals
            .iter()
            .zip(a.blocks())
            .map(|(d, b)| (d * b).trace())
            .sum())
    }

    /// Dual norm `Σ_i ‖D_i‖_1` (sum of singular values per block).
    pub fn norm(&self) -> f64 {
        self.duals.iter().map(trace_norm).sum()
    }

    /// `φ*` has duals `D_i*`; self-adjoint functionals are the fixed points.
    pub fn adjoint(&self) -> Functional {
        Functional {
            parent: self.parent.clone(),
            duals: self.duals.iter().map(|d| d.adjoint()).collect(),
        }
    }

    pub fn is_selfadjoint(&self, tol: Tolerance) -> bool {
        let scale = 1.0 + self.norm();
        self.duals
            .iter()
            .all(|d| (d - d.adjoint()).norm() <= tol.eps * scale)
    }

    pub fn is_positive(&self, tol: Tolerance) -> bool {
        self.is_selfadjoint(tol)
            && self.duals.iter().all(|d| {
                hermitian_part(d)
                    .symmetric_eigen()
                    .eigenvalues
                    .iter()
                    .all(|&ev| ev >= -tol.eps)
            })
    }

    /// True iff each dual is a scalar multiple of the identity.
    pub fn is_tracial(&self, tol: Tolerance) -> bool {
        let scale = 1.0 + self.norm();
        self.duals.iter().all(|d| {
            let n = d.nrows();
            let lambda = d.trace() / Complex64::new(n as f64, 0.0);
            (d - CMatrix::identity(n, n).map(|z| z * lambda)).norm() <= tol.eps * scale
        })
    }

    /// Extract weights, requiring the functional to be tracial and self-adjoint.
    pub fn to_tracial(&self, tol: Tolerance) -> Result<TracialFunctional> {
        if !self.is_tracial(tol) || !self.is_selfadjoint(tol) {
            return Err(Error::Invalid("functional is not a self-adjoint trace".into()));
        }
        let weights = self
            .duals
            .iter()
            .map(|d| d.trace().re / d.nrows() as f64)
            .collect();
        TracialFunctional::new(self.parent.clone(), weights)
    }

    pub fn add(&self, other: &Functional) -> Result<Functional> {
        if self.parent != other.parent {
            return Err(Error::ParentMismatch);
        }
        Ok(Functional {
            parent: self.parent.clone(),
            duals: self
                .duals
                .iter()
                .zip(&other.duals)
                .map(|(a, b)| a + b)
                .collect(),
        })
    }

    pub fn sub(&self, other: &Functional) -> Result<Functional> {
        self.add(&other.scale(-1.0))
    }

    pub fn scale(&self, c: f64) -> Functional {
        Functional {
            parent: self.parent.clone(),
            duals: self
                .duals
                .iter()
                .map(|d| d.map(|z| z * Complex64::new(c, 0.0)))
                .collect(),
        }
    }

    /// Jordan decomposition `φ = φ⁺ − φ⁻` by spectral splitting of each dual.
    ///
    /// Both parts are positive, they subtract back to `φ`, and the norms add:
    /// `‖φ‖ = ‖φ⁺‖ + ‖φ⁻‖`. For a tracial `φ` the parts are tracial with
    /// weights `max(λ_i, 0)` and `max(−λ_i, 0)`.
    pub fn jordan(&self, tol: Tolerance) -> Result<(Functional, Functional)> {
        if !self.is_selfadjoint(tol) {
            return Err(Error::NotSelfAdjoint);
        }
        let mut plus = Vec::with_capacity(self.duals.len());
        let mut minus = Vec::with_capacity(self.duals.len());
        for d in &self.duals {
            let eig = hermitian_part(d).symmetric_eigen();
            let pos = CMatrix::from_diagonal(
                &eig.eigenvalues.map(|ev| Complex64::new(ev.max(0.0), 0.0)),
            );
            let neg = CMatrix::from_diagonal(
                &eig.eigenvalues.map(|ev| Complex64::new((-ev).max(0.0), 0.0)),
            );
            plus.push(&eig.eigenvectors * pos * eig.eigenvectors.adjoint());
            minus.push(&eig.eigenvectors * neg * eig.eigenvectors.adjoint());
        }
        Ok((
            Functional {
                parent: self.parent.clone(),
                duals: plus,
            },
            Functional {
                parent: self.parent.clone(),
                duals: minus,
            },
        ))
    }

    /// Compression to the hereditary corner `pAp`.
    ///
    /// Blocks where `p` vanishes are dropped; on the rest the dual is
    /// conjugated by an isometry onto the range of `p`. Returns the
    /// compressed functional together with the index map from surviving
    /// sub-blocks back to blocks of the original algebra.
    pub fn restrict_hereditary(
        &self,
        p: &Element,
        tol: Tolerance,
    ) -> Result<(Functional, Vec<usize>)> {
        let (isometries, kept) = range_isometries(p, tol)?;
        let dims: Vec<usize> = isometries.iter().map(|v| v.ncols()).collect();
        let sub = BlockAlgebra::new(dims)?;
        let duals = kept
            .iter()
            .zip(&isometries)
            .map(|(&i, v)| v.adjoint() * &self.duals[i] * v)
            .collect();
        Ok((Functional::new(sub, duals)?, kept))
    }
}

/// Orthonormal bases for the ranges of the blocks of a projection, skipping
/// rank-zero blocks. Second return value maps sub-block index to block index.
pub(crate) fn range_isometries(
    p: &Element,
    tol: Tolerance,
) -> Result<(Vec<CMatrix>, Vec<usize>)> {
    if !p.is_projection(tol) {
        return Err(Error::NotProjection);
    }
    let mut isometries = Vec::new();
    let mut kept = Vec::new();
    for (i, b) in p.blocks().iter().enumerate() {
        let eig = hermitian_part(b).symmetric_eigen();
        let cols: Vec<usize> = (0..b.nrows())
            .filter(|&j| eig.eigenvalues[j] > 0.5)
            .collect();
        if cols.is_empty() {
            continue;
        }
        let v = CMatrix::from_fn(b.nrows(), cols.len(), |r, c| {
            eig.eigenvectors[(r, cols[c])]
        });
        isometries.push(v);
        kept.push(i);
    }
    if kept.is_empty() {
        return Err(Error::Invalid("projection is zero; the corner is trivial".into()));
    }
    Ok((isometries, kept))
}

/// Compress an element of `A` to `pAp`, on the same sub-algebra layout that
/// [`Functional::restrict_hereditary`] produces.
pub fn compress_element(a: &Element, p: &Element, tol: Tolerance) -> Result<(Element, Vec<usize>)> {
    if a.parent() != p.parent() {
        return Err(Error::ParentMismatch);
    }
    let (isometries, kept) = range_isometries(p, tol)?;
    let dims: Vec<usize> = isometries.iter().map(|v| v.ncols()).collect();
    let sub = BlockAlgebra::new(dims)?;
    let blocks = kept
        .iter()
        .zip(&isometries)
        .map(|(&i, v)| v.adjoint() * a.block(i) * v)
        .collect();
    Ok((Element::new(sub, blocks)?, kept))
}

impl TracialFunctional {
    pub fn new(parent: BlockAlgebra, weights: Vec<f64>) -> Result<Self> {
        if weights.len() != parent.num_blocks() {
            return Err(Error::Invalid(format!(
                "expected {} weights, got {}",
                parent.num_blocks(),
                weights.len()
            )));
        }
        Ok(TracialFunctional { parent, weights })
    }

    pub fn zero(parent: &BlockAlgebra) -> TracialFunctional {
        TracialFunctional {
            parent: parent.clone(),
            weights: vec![0.0; parent.num_blocks()],
        }
    }

    pub fn parent(&self) -> &BlockAlgebra {
        &self.parent
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn to_functional(&self) -> Functional {
        let duals = self
            .parent
            .block_dims()
            .iter()
            .zip(&self.weights)
            .map(|(&n, &w)| CMatrix::identity(n, n).map(|z| z * Complex64::new(w, 0.0)))
            .collect();
        Functional {
            parent: self.parent.clone(),
            duals,
        }
    }

    pub fn evaluate(&self, a: &Element) -> Result<Complex64> {
        if a.parent() != &self.parent {
            return Err(Error::ParentMismatch);
        }
        Ok(self
            .weights
            .iter()
            .zip(a.blocks())
            .map(|(&w, b)| b.trace() * Complex64::new(w, 0.0))
            .sum())
    }

    /// `Σ_i |λ_i| n_i`, agreeing with the dual norm of [`Functional`].
    pub fn norm(&self) -> f64 {
        self.weights
            .iter()
            .zip(self.parent.block_dims())
            .map(|(&w, &n)| w.abs() * n as f64)
            .sum()
    }

    pub fn is_positive(&self, tol: Tolerance) -> bool {
        self.weights.iter().all(|&w| w >= -tol.eps)
    }

    pub fn add(&self, other: &TracialFunctional) -> Result<TracialFunctional> {
        if self.parent != other.parent {
            return Err(Error::ParentMismatch);
        }
        Ok(TracialFunctional {
            parent: self.parent.clone(),
            weights: self
                .weights
                .iter()
                .zip(&other.weights)
                .map(|(a, b)| a + b)
                .collect(),
        })
    }

    pub fn sub(&self, other: &TracialFunctional) -> Result<TracialFunctional> {
        self.add(&other.scale(-1.0))
    }

    pub fn scale(&self, c: f64) -> TracialFunctional {
        TracialFunctional {
            parent: self.parent.clone(),
            weights: self.weights.iter().map(|w| w * c).collect(),
        }
    }

    /// Jordan decomposition at the weight level: `λ_i = max(λ_i,0) − max(−λ_i,0)`.
    ///
    /// This is the spectral split of the scalar duals `λ_i·1`, so it agrees
    /// with [`Functional::jordan`] on the embedded functional.
    pub fn jordan(&self) -> (TracialFunctional, TracialFunctional) {
        let plus = self.weights.iter().map(|w| w.max(0.0)).collect();
        let minus = self.weights.iter().map(|w| (-w).max(0.0)).collect();
        (
            TracialFunctional {
                parent: self.parent.clone(),
                weights: plus,
            },
            TracialFunctional {
                parent: self.parent.clone(),
                weights: minus,
            },
        )
    }

    /// Split a positive `d` as `c₁ + c₂` with `τ⁺(c₁) = 0` and `τ⁻(c₂) = 0`.
    ///
    /// Uses `c₁ = ½ d^{1/2}(1−x)d^{1/2}` and `c₂ = ½ d^{1/2}(1+x)d^{1/2}`
    /// where `x` is the blockwise sign of the weights (sign of 0 taken as +1).
    /// In finite dimensions the split is exact rather than merely below any
    /// prescribed ε.
    pub fn epsilon_split(&self, d: &Element, tol: Tolerance) -> Result<(Element, Element)> {
        if d.parent() != &self.parent {
            return Err(Error::ParentMismatch);
        }
        if !d.is_positive(tol) {
            return Err(Error::NotPositive);
        }
        let sign_blocks = self
            .parent
            .block_dims()
            .iter()
            .zip(&self.weights)
            .map(|(&n, &w)| {
                let s = if w >= 0.0 { 1.0 } else { -1.0 };
                CMatrix::identity(n, n).map(|z| z * Complex64::new(s, 0.0))
            })
            .collect();
        let x = Element::new(self.parent.clone(), sign_blocks)?;
        let root = d.sqrt(tol)?;
        let one = self.parent.identity();
        let c1 = root
            .mul(&one.sub(&x)?)?
            .mul(&root)?
            .scale_re(0.5);
        let c2 = root
            .mul(&one.add(&x)?)?
            .mul(&root)?
            .scale_re(0.5);
        Ok((c1, c2))
    }

    /// `τ ∨ σ = (τ − σ)⁺ + σ`; coordinatewise this is `max(λ_i, μ_i)`.
    ///
    /// The formula is evaluated without intermediate rounding: the Jordan
    /// positive part of the difference decides per block whether the sum
    /// `max(λ_i − μ_i, 0) + μ_i` collapses to `λ_i` or to `μ_i`, and the
    /// surviving input weight is returned bit-exactly.
    pub fn join(&self, other: &TracialFunctional) -> Result<TracialFunctional> {
        let (plus, _) = self.sub(other)?.jordan();
        let weights = plus
            .weights
            .iter()
            .zip(self.weights.iter().zip(&other.weights))
            .map(|(&p, (&l, &m))| if p > 0.0 { l } else { m })
            .collect();
        TracialFunctional::new(self.parent.clone(), weights)
    }

    /// `τ ∧ σ = τ − (τ − σ)⁺`; coordinatewise `min(λ_i, μ_i)`, evaluated
    /// like [`join`](Self::join) without intermediate rounding.
    pub fn meet(&self, other: &TracialFunctional) -> Result<TracialFunctional> {
        let (plus, _) = self.sub(other)?.jordan();
        let weights = plus
            .weights
            .iter()
            .zip(self.weights.iter().zip(&other.weights))
            .map(|(&p, (&l, &m))| if p > 0.0 { m } else { l })
            .collect();
        TracialFunctional::new(self.parent.clone(), weights)
    }

    /// Restriction to the corner `pAp`; surviving blocks keep their weights.
    pub fn restrict_hereditary(
        &self,
        p: &Element,
        tol: Tolerance,
    ) -> Result<(TracialFunctional, Vec<usize>)> {
        let (restricted, kept) = self.to_functional().restrict_hereditary(p, tol)?;
        Ok((restricted.to_tracial(tol)?, kept))
    }
}

/// Inverse of full-corner restriction: lift weights on `pAp` back to `A`.
///
/// Requires `p` full (every block of positive rank), which is exactly when
/// restriction is a bijection on tracial functionals.
pub fn lift_from_full_corner(
    algebra: &BlockAlgebra,
    p: &Element,
    restricted: &TracialFunctional,
    tol: Tolerance,
) -> Result<TracialFunctional> {
    let (_, kept) = range_isometries(p, tol)?;
    if kept.len() != algebra.num_blocks() {
        return Err(Error::Invalid(
            "projection is not full; restriction is not invertible".into(),
        ));
    }
    TracialFunctional::new(algebra.clone(), restricted.weights().to_vec())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::matalg::BlockAlgebra;
    use crate::sample::{
        random_element, random_full_projection, random_positive, random_projection,
        random_selfadjoint_functional, random_tracial, rng,
    };
    use nalgebra::DVector;

    fn tol() -> Tolerance {
        Tolerance::default()
    }

    fn diag_functional(alg: &BlockAlgebra, entries: &[&[f64]]) -> Functional {
        let duals = entries
            .iter()
            .map(|row| {
                CMatrix::from_diagonal(&DVector::from_iterator(
                    row.len(),
                    row.iter().map(|&v| Complex64::new(v, 0.0)),
                ))
            })
            .collect();
        Functional::new(alg.clone(), duals).unwrap()
    }

    #[test]
    fn evaluate_weighted_traces() {
        let alg = BlockAlgebra::new(vec![1, 2]).unwrap();
        let tau = TracialFunctional::new(alg.clone(), vec![1.0, 2.0]).unwrap();
        let mut blocks = vec![CMatrix::from_element(1, 1, Complex64::new(3.0, 0.0))];
        blocks.push(CMatrix::identity(2, 2));
        let a = Element::new(alg.clone(), blocks).unwrap();
        let v = tau.evaluate(&a).unwrap();
        assert!((v.re - 7.0).abs() < 1e-12 && v.im.abs() < 1e-12);
        assert_eq!(tau.evaluate(&alg.zero()).unwrap(), Complex64::new(0.0, 0.0));
    }

    #[test]
    fn evaluate_conjugate_symmetry() {
        let alg = BlockAlgebra::new(vec![2, 3]).unwrap();
        let mut r = rng(21);
        for _ in 0..20 {
            let phi = random_selfadjoint_functional(&alg, &mut r);
            let a = random_element(&alg, &mut r);
            let lhs = phi.evaluate(&a).unwrap();
            let rhs = phi.adjoint().evaluate(&a.adjoint()).unwrap().conj();
            assert!((lhs - rhs).norm() < 1e-10);
        }
    }

    #[test]
    fn norm_of_standard_trace() {
        let alg = BlockAlgebra::new(vec![3]).unwrap();
        let tau = TracialFunctional::new(alg.clone(), vec![1.0]).unwrap();
        assert!((tau.norm() - 3.0).abs() < 1e-12);
        assert!((tau.to_functional().norm() - 3.0).abs() < 1e-12);
        assert_eq!(Functional::zero(&alg).norm(), 0.0);
    }

    #[test]
    fn norm_is_dual_norm() {
        // compare against sup |phi(a)| over sampled contractions plus the
        // analytic maximizer from the SVD of the duals
        let alg = BlockAlgebra::new(vec![2, 2]).unwrap();
        let mut r = rng(22);
        let phi = random_selfadjoint_functional(&alg, &mut r);
        let norm = phi.norm();
        let mut best: f64 = 0.0;
        for _ in 0..2000 {
            let a = random_element(&alg, &mut r);
            let n = a.op_norm();
            if n > 0.0 {
                best = best.max(phi.evaluate(&a.scale_re(1.0 / n)).unwrap().norm());
            }
        }
        assert!(best <= norm + 1e-9);
        // analytic maximizer: a_i = V U* from D_i = U S V*
        let blocks = phi
            .duals()
            .iter()
            .map(|d| {
                let svd = d.clone().svd(true, true);
                svd.v_t.unwrap().adjoint() * svd.u.unwrap().adjoint()
            })
            .collect();
        let maximizer = Element::new(alg.clone(), blocks).unwrap();
        let attained = phi.evaluate(&maximizer).unwrap().norm();
        assert!((attained - norm).abs() < 1e-9);
    }

    #[test]
    fn traciality_detection() {
        let alg = BlockAlgebra::new(vec![2]).unwrap();
        assert!(diag_functional(&alg, &[&[2.0, 2.0]]).is_tracial(tol()));
        assert!(!diag_functional(&alg, &[&[1.0, 0.0]]).is_tracial(tol()));
    }

    #[test]
    fn traciality_matches_matrix_unit_oracle() {
        // brute force: phi(e_pq e_rs) = phi(e_rs e_pq) for all matrix units
        let alg = BlockAlgebra::new(vec![2, 3]).unwrap();
        let mut r = rng(23);
        for _ in 0..20 {
            let phi = random_selfadjoint_functional(&alg, &mut r);
            let mut commutes = true;
            'outer: for (bi, &n) in alg.block_dims().iter().enumerate() {
                for p in 0..n {
                    for q in 0..n {
                        for s in 0..n {
                            for t in 0..n {
                                let unit = |r0: usize, c0: usize| {
                                    let mut blocks: Vec<CMatrix> = alg
                                        .block_dims()
                                        .iter()
                                        .map(|&m| CMatrix::zeros(m, m))
                                        .collect();
                                    blocks[bi][(r0, c0)] = Complex64::new(1.0, 0.0);
                                    Element::new(alg.clone(), blocks).unwrap()
                                };
                                let e1 = unit(p, q);
                                let e2 = unit(s, t);
                                let lhs = phi.evaluate(&e1.mul(&e2).unwrap()).unwrap();
                                let rhs = phi.evaluate(&e2.mul(&e1).unwrap()).unwrap();
                                if (lhs - rhs).norm() > 1e-9 {
                                    commutes = false;
                                    break 'outer;
                                }
                            }
                        }
                    }
                }
            }
            assert_eq!(phi.is_tracial(tol()), commutes);
        }
    }

    #[test]
    fn jordan_tracial_weights() {
        let alg = BlockAlgebra::new(vec![2, 3]).unwrap();
        let tau = TracialFunctional::new(alg.clone(), vec![2.0, -3.0]).unwrap();
        let (p, m) = tau.jordan();
        assert_eq!(p.weights(), &[2.0, 0.0]);
        assert_eq!(m.weights(), &[0.0, 3.0]);
        assert!((p.norm() - 4.0).abs() < 1e-12);
        assert!((m.norm() - 9.0).abs() < 1e-12);
        assert!((tau.norm() - 13.0).abs() < 1e-12);
    }

    #[test]
    fn jordan_positive_input() {
        let alg = BlockAlgebra::new(vec![2]).unwrap();
        let tau = TracialFunctional::new(alg.clone(), vec![1.5]).unwrap();
        let (p, m) = tau.jordan();
        assert_eq!(p.weights(), tau.weights());
        assert_eq!(m.weights(), &[0.0]);
    }

    #[test]
    fn jordan_spectral_split() {
        let alg = BlockAlgebra::new(vec![2]).unwrap();
        let phi = diag_functional(&alg, &[&[1.0, -1.0]]);
        let (p, m) = phi.jordan(tol()).unwrap();
        assert!((p.duals()[0][(0, 0)].re - 1.0).abs() < 1e-12);
        assert!(p.duals()[0][(1, 1)].norm() < 1e-12);
        assert!((m.duals()[0][(1, 1)].re - 1.0).abs() < 1e-12);
        assert!(m.duals()[0][(0, 0)].norm() < 1e-12);
    }

    #[test]
    fn jordan_norm_identity_random() {
        let alg = BlockAlgebra::new(vec![2, 3, 4]).unwrap();
        let mut r = rng(24);
        for _ in 0..50 {
            let phi = random_selfadjoint_functional(&alg, &mut r);
            let (p, m) = phi.jordan(tol()).unwrap();
            assert!(p.is_positive(tol()) && m.is_positive(tol()));
            let recon = p.sub(&m).unwrap();
            assert!(
                recon
                    .duals()
                    .iter()
                    .zip(phi.duals())
                    .all(|(a, b)| (a - b).norm() < 1e-9)
            );
            assert!((phi.norm() - p.norm() - m.norm()).abs() < 1e-9 * (1.0 + phi.norm()));
        }
    }

    #[test]
    fn jordan_rejects_non_selfadjoint() {
        let alg = BlockAlgebra::new(vec![2]).unwrap();
        let mut r = rng(25);
        let a = random_element(&alg, &mut r);
        let phi = Functional::new(alg.clone(), vec![a.block(0).clone()]).unwrap();
        assert!(matches!(phi.jordan(tol()), Err(Error::NotSelfAdjoint)));
    }

    #[test]
    fn epsilon_split_positive_trace() {
        let alg = BlockAlgebra::new(vec![2, 2]).unwrap();
        let tau = TracialFunctional::new(alg.clone(), vec![1.0, 2.0]).unwrap();
        let mut r = rng(26);
        let d = random_positive(&alg, &mut r);
        let (c1, c2) = tau.epsilon_split(&d, tol()).unwrap();
        assert!(c1.is_zero(Tolerance::new(1e-8).unwrap()));
        assert!(c2.sub(&d).unwrap().op_norm() < 1e-8);
    }

    #[test]
    fn epsilon_split_mixed_signs() {
        let alg = BlockAlgebra::new(vec![2, 2]).unwrap();
        let tau = TracialFunctional::new(alg.clone(), vec![1.0, -1.0]).unwrap();
        let d = alg.identity();
        let (c1, c2) = tau.epsilon_split(&d, tol()).unwrap();
        let (tp, tm) = tau.jordan();
        assert!(tp.evaluate(&c1).unwrap().norm() < 1e-10);
        assert!(tm.evaluate(&c2).unwrap().norm() < 1e-10);
        // c1 lives on block 2, c2 on block 1
        assert!(c1.block(0).norm() < 1e-12 && c1.block(1).norm() > 0.5);
        assert!(c2.block(1).norm() < 1e-12 && c2.block(0).norm() > 0.5);
    }

    #[test]
    fn epsilon_split_reconstruction() {
        let alg = BlockAlgebra::new(vec![2, 3]).unwrap();
        let mut r = rng(27);
        for _ in 0..20 {
            let tau = random_tracial(&alg, &mut r);
            let d = random_positive(&alg, &mut r);
            let (c1, c2) = tau.epsilon_split(&d, tol()).unwrap();
            assert!(c1.add(&c2).unwrap().sub(&d).unwrap().op_norm() < 1e-10);
            let loose = Tolerance::new(1e-7).unwrap();
            assert!(c1.is_positive(loose));
            assert!(c2.is_positive(loose));
        }
    }

    #[test]
    fn epsilon_split_rejects_nonpositive() {
        let alg = BlockAlgebra::new(vec![2]).unwrap();
        let tau = TracialFunctional::new(alg.clone(), vec![1.0]).unwrap();
        let mut r = rng(28);
        let h = random_element(&alg, &mut r);
        assert!(tau.epsilon_split(&h, tol()).is_err());
    }

    #[test]
    fn join_meet_coordinatewise() {
        let alg = BlockAlgebra::new(vec![2, 2]).unwrap();
        let a = TracialFunctional::new(alg.clone(), vec![1.0, -2.0]).unwrap();
        let zero = TracialFunctional::zero(&alg);
        let join = a.join(&zero).unwrap();
        assert_eq!(join.weights(), &[1.0, 0.0]);
        assert_eq!(join.weights(), a.jordan().0.weights());
        assert_eq!(a.join(&a).unwrap().weights(), a.weights());
        let mut r = rng(29);
        for _ in 0..50 {
            let t = random_tracial(&alg, &mut r);
            let s = random_tracial(&alg, &mut r);
            let j = t.join(&s).unwrap();
            let m = t.meet(&s).unwrap();
            for i in 0..2 {
                assert!((j.weights()[i] - t.weights()[i].max(s.weights()[i])).abs() < 1e-12);
                assert!((m.weights()[i] - t.weights()[i].min(s.weights()[i])).abs() < 1e-12);
            }
            // modularity: join + meet = t + s
            let sum = j.add(&m).unwrap();
            let direct = t.add(&s).unwrap();
            for i in 0..2 {
                assert!((sum.weights()[i] - direct.weights()[i]).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn restrict_identity_is_noop() {
        let alg = BlockAlgebra::new(vec![2, 3]).unwrap();
        let mut r = rng(30);
        let phi = random_selfadjoint_functional(&alg, &mut r);
        let (res, kept) = phi.restrict_hereditary(&alg.identity(), tol()).unwrap();
        assert_eq!(kept, vec![0, 1]);
        assert_eq!(res.parent().block_dims(), alg.block_dims());
        // compressed duals are unitary conjugates; norms agree
        assert!((res.norm() - phi.norm()).abs() < 1e-9);
    }

    #[test]
    fn restrict_drops_killed_block() {
        let alg = BlockAlgebra::new(vec![2, 3]).unwrap();
        let tau = TracialFunctional::new(alg.clone(), vec![1.0, 2.0]).unwrap();
        let blocks = vec![CMatrix::identity(2, 2), CMatrix::zeros(3, 3)];
        let p = Element::new(alg.clone(), blocks).unwrap();
        let (res, kept) = tau.restrict_hereditary(&p, tol()).unwrap();
        assert_eq!(kept, vec![0]);
        assert_eq!(res.weights(), &[1.0]);
    }

    #[test]
    fn jordan_commutes_with_restriction() {
        let alg = BlockAlgebra::new(vec![3, 2, 4]).unwrap();
        let mut r = rng(31);
        for _ in 0..20 {
            let tau = random_tracial(&alg, &mut r);
            let p = random_full_projection(&alg, &mut r);
            let (res, _) = tau.restrict_hereditary(&p, tol()).unwrap();
            let (rp, rm) = res.jordan();
            let (tp, tm) = tau.jordan();
            let (tp_res, _) = tp.restrict_hereditary(&p, tol()).unwrap();
            let (tm_res, _) = tm.restrict_hereditary(&p, tol()).unwrap();
            for i in 0..alg.num_blocks() {
                assert!((rp.weights()[i] - tp_res.weights()[i]).abs() < 1e-9);
                assert!((rm.weights()[i] - tm_res.weights()[i]).abs() < 1e-9);
            }
        }
    }

    #[test]
    fn full_corner_restriction_is_bijective() {
        let alg = BlockAlgebra::new(vec![3, 2]).unwrap();
        let mut r = rng(32);
        for _ in 0..20 {
            let tau = random_tracial(&alg, &mut r);
            let p = random_full_projection(&alg, &mut r);
            let (res, _) = tau.restrict_hereditary(&p, tol()).unwrap();
            let lifted = lift_from_full_corner(&alg, &p, &res, tol()).unwrap();
            for i in 0..alg.num_blocks() {
                assert!((lifted.weights()[i] - tau.weights()[i]).abs() < 1e-9);
            }
        }
        // non-full projections are rejected by the lift
        let mut blocks = vec![CMatrix::identity(3, 3), CMatrix::zeros(2, 2)];
        let p = Element::new(alg.clone(), std::mem::take(&mut blocks)).unwrap();
        let sub = BlockAlgebra::new(vec![3]).unwrap();
        let res = TracialFunctional::new(sub, vec![1.0]).unwrap();
        assert!(lift_from_full_corner(&alg, &p, &res, tol()).is_err());
    }

    #[test]
    fn restriction_rejects_non_projection() {
        let alg = BlockAlgebra::new(vec![2]).unwrap();
        let mut r = rng(33);
        let tau = random_tracial(&alg, &mut r);
        let not_p = alg.identity().scale_re(0.5);
        assert!(matches!(
            tau.restrict_hereditary(&not_p, tol()),
            Err(Error::NotProjection)
        ));
        let _ = random_projection(&alg, &mut r);
    }
}
