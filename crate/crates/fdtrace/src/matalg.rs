//! Finite-dimensional C*-algebras as direct sums of full matrix blocks.
//!
//! An algebra is an ordered list of block dimensions `n_1..n_k`; an element
//! carries one complex `n_i x n_i` matrix per block. All arithmetic, the
//! functional calculus, positivity and norms are blockwise. The two
//! factorization routines ([`module_maps`] and [`sos_factor`]) realize the
//! right-module and sums-of-squares structure exactly.

use nalgebra::DMatrix;
use num_complex::Complex64;

use crate::error::{Error, Result};

pub type CMatrix = DMatrix<Complex64>;

/// A finite-dimensional C*-algebra `M_{n_1} ⊕ ... ⊕ M_{n_k}`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct BlockAlgebra {
    block_dims: Vec<usize>,
}

impl BlockAlgebra {
    pub fn new(block_dims: Vec<usize>) -> Result<Self> {
        if block_dims.is_empty() {
            return Err(Error::Invalid("algebra needs at least one block".into()));
        }
        if block_dims.contains(&0) {
            return Err(Error::Invalid("block dimensions must be positive".into()));
        }
        Ok(Self { block_dims })
    }

    pub fn block_dims(&self) -> &[usize] {
        &self.block_dims
    }

    pub fn num_blocks(&self) -> usize {
        self.block_dims.len()
    }

    /// Total complex dimension `sum n_i^2`.
    pub fn dim(&self) -> usize {
        self.block_dims.iter().map(|n| n * n).sum()
    }

    pub fn zero(&self) -> Element {
        Element {
            parent: self.clone(),
            blocks: self
                .block_dims
                .iter()
                .map(|&n| CMatrix::zeros(n, n))
                .collect(),
        }
    }

    pub fn identity(&self) -> Element {
        Element {
            parent: self.clone(),
            blocks: self
                .block_dims
                .iter()
                .map(|&n| CMatrix::identity(n, n))
                .collect(),
        }
    }

    /// The algebra of `n x n` matrices over `self`, flattened blockwise.
    pub fn amplified(&self, n: usize) -> Result<BlockAlgebra> {
        if n == 0 {
            return Err(Error::Invalid("amplification size must be positive".into()));
        }
        BlockAlgebra::new(self.block_dims.iter().map(|&m| n * m).collect())
    }
}

/// An element of a [`BlockAlgebra`]: one complex square matrix per block.
#[derive(Debug, Clone)]
pub struct Element {
    parent: BlockAlgebra,
    blocks: Vec<CMatrix>,
}

/// Numerical comparison tolerance; strictly positive.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Tolerance {
    pub eps: f64,
}

impl Default for Tolerance {
    fn default() -> Self {
        Tolerance { eps: 1e-9 }
    }
}

impl Tolerance {
    pub fn new(eps: f64) -> Result<Self> {
        if eps.is_nan() || eps <= 0.0 {
            return Err(Error::Invalid("tolerance must be positive".into()));
        }
        Ok(Tolerance { eps })
    }
}

fn check_same_parent(a: &Element, b: &Element) -> Result<()> {
    if a.parent != b.parent {
        return Err(Error::ParentMismatch);
    }
    Ok(())
}

impl Element {
    pub fn new(parent: BlockAlgebra, blocks: Vec<CMatrix>) -> Result<Self> {
        if blocks.len() != parent.num_blocks() {
            return Err(Error::Invalid(format!(
                "expected {} blocks, got {}",
                parent.num_blocks(),
                blocks.len()
            )));
        }
        for (i, (b, &n)) in blocks.iter().zip(parent.block_dims()).enumerate() {
            if b.nrows() != n || b.ncols() != n {
                return Err(Error::Invalid(format!(
                    "block {i} must be {n}x{n}, got {}x{}",
                    b.nrows(),
                    b.ncols()
                )));
            }
        }
        Ok(Element { parent, blocks })
    }

    pub fn parent(&self) -> &BlockAlgebra {
        &self.parent
    }

    pub fn blocks(&self) -> &[CMatrix] {
        &self.blocks
    }

    pub fn block(&self, i: usize) -> &CMatrix {
        &self.blocks[i]
    }

    fn map_blocks(&self, f: impl Fn(&CMatrix) -> CMatrix) -> Element {
        Element {
            parent: self.parent.clone(),
            blocks: self.blocks.iter().map(f).collect(),
        }
    }

    fn zip_blocks(&self, other: &Element, f: impl Fn(&CMatrix, &CMatrix) -> CMatrix) -> Element {
        Element {
            parent: self.parent.clone(),
            blocks: self
                .blocks
                .iter()
                .zip(&other.blocks)
                .map(|(a, b)| f(a, b))
                .collect(),
        }
    }

    pub fn add(&self, other: &Element) -> Result<Element> {
        check_same_parent(self, other)?;
        Ok(self.zip_blocks(other, |a, b| a + b))
    }

    pub fn sub(&self, other: &Element) -> Result<Element> {
        check_same_parent(self, other)?;
        Ok(self.zip_blocks(other, |a, b| a - b))
    }

    pub fn mul(&self, other: &Element) -> Result<Element> {
        check_same_parent(self, other)?;
        Ok(self.zip_blocks(other, |a, b| a * b))
    }

    /// Conjugate transpose per block.
    pub fn adjoint(&self) -> Element {
        self.map_blocks(|b| b.adjoint())
    }

    pub fn scale(&self, c: Complex64) -> Element {
        self.map_blocks(|b| b.map(|z| z * c))
    }

    pub fn scale_re(&self, c: f64) -> Element {
        self.scale(Complex64::new(c, 0.0))
    }

    /// Largest singular value over all blocks (the C*-norm).
    pub fn op_norm(&self) -> f64 {
        self.blocks
            .iter()
            .map(largest_singular_value)
            .fold(0.0, f64::max)
    }

    /// Frobenius norm over all blocks; used for residual checks.
    pub fn frobenius_norm(&self) -> f64 {
        self.blocks
            .iter()
            .map(|b| b.norm().powi(2))
            .sum::<f64>()
            .sqrt()
    }

    pub fn is_zero(&self, tol: Tolerance) -> bool {
        self.frobenius_norm() <= tol.eps
    }

    /// `‖a − a*‖ ≤ eps·(1 + ‖a‖)` blockwise, scale-invariant.
    pub fn is_hermitian(&self, tol: Tolerance) -> bool {
        let scale = 1.0 + self.op_norm();
        self.blocks
            .iter()
            .all(|b| (b - b.adjoint()).norm() <= tol.eps * scale)
    }

    /// Hermitian with every eigenvalue at least `−eps`.
    pub fn is_positive(&self, tol: Tolerance) -> bool {
        if !self.is_hermitian(tol) {
            return false;
        }
        self.blocks.iter().all(|b| {
            hermitian_part(b)
                .symmetric_eigen()
                .eigenvalues
                .iter()
                .all(|&ev| ev >= -tol.eps)
        })
    }

    /// `p = p* = p²` within tolerance.
    pub fn is_projection(&self, tol: Tolerance) -> bool {
        if !self.is_hermitian(tol) {
            return false;
        }
        let p2 = self.mul(self).expect("same parent");
        p2.sub(self).expect("same parent").op_norm() <= tol.eps * (1.0 + self.op_norm())
    }

    /// Apply a real function to the spectrum of a Hermitian element.
    pub fn spectral_apply(&self, f: impl Fn(f64) -> f64, tol: Tolerance) -> Result<Element> {
        if !self.is_hermitian(tol) {
            return Err(Error::NotHermitian);
        }
        Ok(self.map_blocks(|b| {
            let eig = hermitian_part(b).symmetric_eigen();
            let d = CMatrix::from_diagonal(
                &eig.eigenvalues.map(|ev| Complex64::new(f(ev), 0.0)),
            );
            &eig.eigenvectors * d * eig.eigenvectors.adjoint()
        }))
    }

    /// Square root of a positive element; eigenvalues are clamped at zero to
    /// absorb roundoff.
    pub fn sqrt(&self, tol: Tolerance) -> Result<Element> {
        if !self.is_positive(tol) {
            return Err(Error::NotPositive);
        }
        self.spectral_apply(|t| t.max(0.0).sqrt(), tol)
    }

    /// Moore-Penrose pseudoinverse, blockwise.
    pub fn pseudo_inverse(&self, tol: Tolerance) -> Element {
        self.map_blocks(|b| {
            b.clone()
                .pseudo_inverse(tol.eps)
                .expect("pseudo_inverse with positive eps")
        })
    }

    /// Blockwise eigenvalues of a Hermitian element, each block sorted ascending.
    pub fn eigenvalues(&self, tol: Tolerance) -> Result<Vec<Vec<f64>>> {
        if !self.is_hermitian(tol) {
            return Err(Error::NotHermitian);
        }
        Ok(self
            .blocks
            .iter()
            .map(|b| {
                let mut evs: Vec<f64> = hermitian_part(b)
                    .symmetric_eigen()
                    .eigenvalues
                    .iter()
                    .copied()
                    .collect();
                evs.sort_by(|a, b| a.partial_cmp(b).unwrap());
                evs
            })
            .collect())
    }
}

pub(crate) fn hermitian_part(b: &CMatrix) -> CMatrix {
    (b + b.adjoint()).map(|z| z * Complex64::new(0.5, 0.0))
}

pub(crate) fn largest_singular_value(b: &CMatrix) -> f64 {
    if b.nrows() == 0 {
        return 0.0;
    }
    b.clone()
        .svd(false, false)
        .singular_values
        .iter()
        .copied()
        .fold(0.0, f64::max)
}

/// Sum of singular values (the trace norm).
pub(crate) fn trace_norm(b: &CMatrix) -> f64 {
    b.clone().svd(false, false).singular_values.iter().sum()
}

/// The right-module maps `Φ_j(x) = a_j a⁺ x` where `a = (Σ a_j* a_j)^{1/2}`.
///
/// Requires `x ∈ aA`, checked via `a a⁺ x ≈ x`. The returned list satisfies
/// `Σ Φ_j(x)* Φ_j(y) = x* y` for `x, y ∈ aA` and `‖Φ_j(x)‖ ≤ ‖x‖`.
pub fn module_maps(a_list: &[Element], x: &Element, tol: Tolerance) -> Result<Vec<Element>> {
    let first = a_list.first().ok_or_else(|| {
        Error::Invalid("module_maps needs at least one generator".into())
    })?;
    check_same_parent(first, x)?;
    let mut sum = first.parent().zero();
    for a_j in a_list {
        check_same_parent(a_j, x)?;
        sum = sum.add(&a_j.adjoint().mul(a_j)?)?;
    }
    let a = sum.sqrt(tol)?;
    let a_pinv = a.pseudo_inverse(tol);
    let residual = a.mul(&a_pinv)?.mul(x)?.sub(x)?.op_norm();
    if residual > tol.eps * (1.0 + x.op_norm()) {
        return Err(Error::OutsideIdeal(residual));
    }
    a_list
        .iter()
        .map(|a_j| a_j.mul(&a_pinv)?.mul(x))
        .collect()
}

/// Factor a positive `a` in the ideal generated by `X` as `Σ c* x* x c`.
///
/// Per block with nonzero `a`-part, picks some `x ∈ X` nonzero there, and with
/// `h = x* x` builds matrices `v_k = θ^{-1/2} u e_k^T` from a top eigenpair
/// `(θ, u)` of `h`, so that `Σ_k v_k* h v_k` is the block identity. Emitting
/// `c_k = v_k a^{1/2}` gives an exact factorization.
pub fn sos_factor(
    a: &Element,
    generators: &[Element],
    tol: Tolerance,
) -> Result<Vec<(Element, Element)>> {
    if !a.is_positive(tol) {
        return Err(Error::NotPositive);
    }
    for x in generators {
        check_same_parent(a, x)?;
    }
    let algebra = a.parent().clone();
    let root = a.sqrt(tol)?;
    let scale = 1.0 + a.op_norm();
    let mut pairs = Vec::new();
    for (i, &n) in algebra.block_dims().iter().enumerate() {
        if a.block(i).norm() <= tol.eps * scale {
            continue;
        }
        let x = generators
            .iter()
            .max_by(|p, q| {
                p.block(i)
                    .norm()
                    .partial_cmp(&q.block(i).norm())
                    .unwrap()
            })
            .filter(|x| x.block(i).norm() > tol.eps)
            .ok_or(Error::IdealMembership(i))?;
        let h = x.block(i).adjoint() * x.block(i);
        let eig = hermitian_part(&h).symmetric_eigen();
        let (top, _) = eig
            .eigenvalues
            .iter()
            .enumerate()
            .max_by(|a, b| a.1.partial_cmp(b.1).unwrap())
            .unwrap();
        let theta = eig.eigenvalues[top];
        if theta <= tol.eps {
            return Err(Error::IdealMembership(i));
        }
        let u = eig.eigenvectors.column(top).into_owned();
        for k in 0..n {
            // v_k has column k equal to θ^{-1/2} u, zero elsewhere.
            let mut v = CMatrix::zeros(n, n);
            let s = Complex64::new(theta.sqrt().recip(), 0.0);
            for r in 0..n {
                v[(r, k)] = u[r] * s;
            }
            let mut c_blocks: Vec<CMatrix> = algebra
                .block_dims()
                .iter()
                .map(|&m| CMatrix::zeros(m, m))
                .collect();
            c_blocks[i] = v * root.block(i);
            let mut x_blocks: Vec<CMatrix> = algebra
                .block_dims()
                .iter()
                .map(|&m| CMatrix::zeros(m, m))
                .collect();
            x_blocks[i] = x.block(i).clone();
            pairs.push((
                Element::new(algebra.clone(), c_blocks)?,
                Element::new(algebra.clone(), x_blocks)?,
            ));
        }
    }
    Ok(pairs)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sample::{random_element, random_hermitian, random_positive, rng};

    fn m2() -> BlockAlgebra {
        BlockAlgebra::new(vec![2]).unwrap()
    }

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn rejects_empty_and_zero_dims() {
        assert!(BlockAlgebra::new(vec![]).is_err());
        assert!(BlockAlgebra::new(vec![2, 0]).is_err());
    }

    #[test]
    fn adjoint_of_nilpotent() {
        let a = m2();
        let e12 = Element::new(
            a.clone(),
            vec![CMatrix::from_row_slice(2, 2, &[
                c(0.0, 0.0),
                c(1.0, 0.0),
                c(0.0, 0.0),
                c(0.0, 0.0),
            ])],
        )
        .unwrap();
        let adj = e12.adjoint();
        assert_eq!(adj.block(0)[(1, 0)], c(1.0, 0.0));
        assert_eq!(adj.block(0)[(0, 1)], c(0.0, 0.0));
    }

    #[test]
    fn identity_is_unit() {
        let alg = BlockAlgebra::new(vec![2, 3]).unwrap();
        let mut r = rng(7);
        let a = random_element(&alg, &mut r);
        let prod = a.mul(&alg.identity()).unwrap();
        assert!(prod.sub(&a).unwrap().op_norm() < 1e-12);
    }

    #[test]
    fn product_adjoint_reverses() {
        let alg = BlockAlgebra::new(vec![2, 3]).unwrap();
        let mut r = rng(11);
        for _ in 0..20 {
            let a = random_element(&alg, &mut r);
            let b = random_element(&alg, &mut r);
            let lhs = a.mul(&b).unwrap().adjoint();
            let rhs = b.adjoint().mul(&a.adjoint()).unwrap();
            assert!(lhs.sub(&rhs).unwrap().op_norm() < 1e-10);
        }
    }

    #[test]
    fn positivity_basics() {
        let tol = Tolerance::default();
        let a = m2();
        assert!(a.identity().is_positive(tol));
        let d = Element::new(
            a.clone(),
            vec![CMatrix::from_diagonal(&nalgebra::DVector::from_vec(vec![
                c(1.0, 0.0),
                c(-1.0, 0.0),
            ]))],
        )
        .unwrap();
        assert!(!d.is_positive(tol));
    }

    #[test]
    fn squares_are_positive() {
        let tol = Tolerance::default();
        let alg = BlockAlgebra::new(vec![3, 2]).unwrap();
        let mut r = rng(3);
        for _ in 0..20 {
            let b = random_element(&alg, &mut r);
            assert!(b.adjoint().mul(&b).unwrap().is_positive(tol));
        }
    }

    #[test]
    fn sqrt_of_diagonal() {
        let tol = Tolerance::default();
        let a = m2();
        let d = Element::new(
            a.clone(),
            vec![CMatrix::from_diagonal(&nalgebra::DVector::from_vec(vec![
                c(4.0, 0.0),
                c(9.0, 0.0),
            ]))],
        )
        .unwrap();
        let s = d.sqrt(tol).unwrap();
        assert!((s.block(0)[(0, 0)] - c(2.0, 0.0)).norm() < 1e-12);
        assert!((s.block(0)[(1, 1)] - c(3.0, 0.0)).norm() < 1e-12);
        let z = a.zero();
        assert!(z.sqrt(tol).unwrap().is_zero(tol));
    }

    #[test]
    fn sqrt_squares_back() {
        let tol = Tolerance::default();
        let alg = BlockAlgebra::new(vec![3, 4]).unwrap();
        let mut r = rng(5);
        for _ in 0..20 {
            let p = random_positive(&alg, &mut r);
            let s = p.sqrt(tol).unwrap();
            assert!(s.mul(&s).unwrap().sub(&p).unwrap().op_norm() < 1e-8);
        }
    }

    #[test]
    fn spectral_apply_identity_function() {
        let tol = Tolerance::default();
        let alg = BlockAlgebra::new(vec![3]).unwrap();
        let mut r = rng(6);
        let h = random_hermitian(&alg, &mut r);
        let same = h.spectral_apply(|t| t, tol).unwrap();
        assert!(same.sub(&h).unwrap().op_norm() < 1e-10);
        let x = random_element(&alg, &mut r);
        assert!(x.spectral_apply(|t| t, tol).is_err());
    }

    #[test]
    fn op_norm_values() {
        let alg = BlockAlgebra::new(vec![2, 3]).unwrap();
        assert!((alg.identity().op_norm() - 1.0).abs() < 1e-12);
        let a = m2();
        let d = Element::new(
            a,
            vec![CMatrix::from_diagonal(&nalgebra::DVector::from_vec(vec![
                c(3.0, 0.0),
                c(-4.0, 0.0),
            ]))],
        )
        .unwrap();
        assert!((d.op_norm() - 4.0).abs() < 1e-12);
    }

    #[test]
    fn cstar_identity() {
        let alg = BlockAlgebra::new(vec![2, 3, 4]).unwrap();
        let mut r = rng(8);
        for _ in 0..30 {
            let a = random_element(&alg, &mut r);
            let n = a.op_norm();
            let n2 = a.adjoint().mul(&a).unwrap().op_norm();
            assert!((n2 - n * n).abs() < 1e-8 * (1.0 + n * n));
        }
    }

    #[test]
    fn positivity_stable_under_conjugation() {
        let tol = Tolerance::default();
        let alg = BlockAlgebra::new(vec![3, 2]).unwrap();
        let mut r = rng(9);
        for _ in 0..20 {
            let a = random_positive(&alg, &mut r);
            let cc = random_element(&alg, &mut r);
            let conj = cc.adjoint().mul(&a).unwrap().mul(&cc).unwrap();
            assert!(conj.is_positive(Tolerance::new(1e-7).unwrap()) || conj.is_positive(tol));
        }
    }

    #[test]
    fn module_maps_scalar_case() {
        let tol = Tolerance::default();
        let alg = BlockAlgebra::new(vec![1]).unwrap();
        let scalar = |v: f64| {
            Element::new(
                alg.clone(),
                vec![CMatrix::from_element(1, 1, c(v, 0.0))],
            )
            .unwrap()
        };
        let phis = module_maps(&[scalar(3.0), scalar(4.0)], &scalar(5.0), tol).unwrap();
        assert!((phis[0].block(0)[(0, 0)] - c(3.0, 0.0)).norm() < 1e-10);
        assert!((phis[1].block(0)[(0, 0)] - c(4.0, 0.0)).norm() < 1e-10);
    }

    #[test]
    fn module_maps_single_hermitian_is_identity() {
        let tol = Tolerance::default();
        let alg = BlockAlgebra::new(vec![3]).unwrap();
        let mut r = rng(13);
        let a = random_positive(&alg, &mut r);
        let x = a.mul(&random_element(&alg, &mut r)).unwrap();
        let phis = module_maps(std::slice::from_ref(&a), &x, tol).unwrap();
        assert!(phis[0].sub(&x).unwrap().op_norm() < 1e-8);
    }

    #[test]
    fn module_maps_reconstruction() {
        let tol = Tolerance::default();
        let alg = BlockAlgebra::new(vec![3]).unwrap();
        let mut r = rng(14);
        for _ in 0..20 {
            let a1 = random_element(&alg, &mut r);
            let a2 = random_element(&alg, &mut r);
            let sum = a1
                .adjoint()
                .mul(&a1)
                .unwrap()
                .add(&a2.adjoint().mul(&a2).unwrap())
                .unwrap();
            let a = sum.sqrt(tol).unwrap();
            let x = a.mul(&random_element(&alg, &mut r)).unwrap();
            let y = a.mul(&random_element(&alg, &mut r)).unwrap();
            let phix = module_maps(&[a1.clone(), a2.clone()], &x, tol).unwrap();
            let phiy = module_maps(&[a1, a2], &y, tol).unwrap();
            let mut recon = alg.zero();
            for (px, py) in phix.iter().zip(&phiy) {
                recon = recon.add(&px.adjoint().mul(py).unwrap()).unwrap();
            }
            let target = x.adjoint().mul(&y).unwrap();
            assert!(recon.sub(&target).unwrap().op_norm() < 1e-8);
            for px in &phix {
                assert!(px.op_norm() <= x.op_norm() + 1e-8);
            }
        }
    }

    #[test]
    fn module_maps_rejects_outside_ideal() {
        let tol = Tolerance::default();
        let alg = BlockAlgebra::new(vec![2]).unwrap();
        // a is a rank-one projection; the identity is not in aA.
        let p = Element::new(
            alg.clone(),
            vec![CMatrix::from_diagonal(&nalgebra::DVector::from_vec(vec![
                c(1.0, 0.0),
                c(0.0, 0.0),
            ]))],
        )
        .unwrap();
        let res = module_maps(std::slice::from_ref(&p), &alg.identity(), tol);
        assert!(matches!(res, Err(Error::OutsideIdeal(_))));
    }

    #[test]
    fn sos_factor_zero_is_empty() {
        let tol = Tolerance::default();
        let alg = BlockAlgebra::new(vec![2]).unwrap();
        let pairs = sos_factor(&alg.zero(), &[alg.identity()], tol).unwrap();
        assert!(pairs.is_empty());
    }

    #[test]
    fn sos_factor_identity_from_matrix_unit() {
        let tol = Tolerance::default();
        let alg = BlockAlgebra::new(vec![2]).unwrap();
        let e11 = Element::new(
            alg.clone(),
            vec![CMatrix::from_diagonal(&nalgebra::DVector::from_vec(vec![
                c(1.0, 0.0),
                c(0.0, 0.0),
            ]))],
        )
        .unwrap();
        let a = alg.identity();
        let pairs = sos_factor(&a, std::slice::from_ref(&e11), tol).unwrap();
        let mut recon = alg.zero();
        for (cc, x) in &pairs {
            let term = cc
                .adjoint()
                .mul(&x.adjoint().mul(x).unwrap())
                .unwrap()
                .mul(cc)
                .unwrap();
            recon = recon.add(&term).unwrap();
        }
        assert!(recon.sub(&a).unwrap().op_norm() < 1e-10);
    }

    #[test]
    fn sos_factor_membership_failure() {
        let tol = Tolerance::default();
        let alg = BlockAlgebra::new(vec![2, 2]).unwrap();
        let mut x_blocks = vec![CMatrix::identity(2, 2), CMatrix::zeros(2, 2)];
        let x = Element::new(alg.clone(), std::mem::take(&mut x_blocks)).unwrap();
        let a_blocks = vec![CMatrix::zeros(2, 2), CMatrix::identity(2, 2)];
        let a = Element::new(alg.clone(), a_blocks).unwrap();
        let res = sos_factor(&a, std::slice::from_ref(&x), tol);
        assert!(matches!(res, Err(Error::IdealMembership(1))));
    }
}
