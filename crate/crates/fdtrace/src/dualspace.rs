//! The dual of the trace space in coordinates: the hat map, norm-minimal
//! lifts, compact bases of the positive trace cone, and tensor traces.
//!
//! A dual functional acts on traces by `f(τ) = Σ f_i λ_i`. The hat map sends
//! a self-adjoint element to its blockwise traces and is onto; the scalar
//! lift `a_i = (f_i/n_i)·1` attains the minimal operator norm
//! `max_i |f_i|/n_i`, which equals the supremum of `|f|` over the positive
//! traces of norm at most one.

use crate::error::{Error, Result};
use crate::functionals::TracialFunctional;
use crate::matalg::{BlockAlgebra, CMatrix, Element, Tolerance};
use num_complex::Complex64;

#[derive(Debug, Clone, PartialEq)]
pub struct DualFunctional {
    parent: BlockAlgebra,
    coords: Vec<f64>,
}

impl DualFunctional {
    pub fn new(parent: BlockAlgebra, coords: Vec<f64>) -> Result<Self> {
        if coords.len() != parent.num_blocks() {
            return Err(Error::Invalid(format!(
                "expected {} coordinates, got {}",
                parent.num_blocks(),
                coords.len()
            )));
        }
        Ok(DualFunctional { parent, coords })
    }

    pub fn parent(&self) -> &BlockAlgebra {
        &self.parent
    }

    pub fn coords(&self) -> &[f64] {
        &self.coords
    }

    pub fn apply(&self, tau: &TracialFunctional) -> Result<f64> {
        if tau.parent() != &self.parent {
            return Err(Error::ParentMismatch);
        }
        Ok(self
            .coords
            .iter()
            .zip(tau.weights())
            .map(|(f, l)| f * l)
            .sum())
    }

    pub fn is_positive(&self) -> bool {
        self.coords.iter().all(|&f| f >= 0.0)
    }
}

/// Diagonal sum in index order; the fixed order lets [`minimal_norm_lift`]
/// invert `hat` bit-exactly.
fn sequential_trace(b: &CMatrix) -> f64 {
    let mut s = 0.0;
    for i in 0..b.nrows() {
        s += b[(i, i)].re;
    }
    s
}

/// `â` with coordinates `tr(a_i)`; requires `a` self-adjoint.
pub fn hat(a: &Element, tol: Tolerance) -> Result<DualFunctional> {
    if !a.is_hermitian(tol) {
        return Err(Error::NotHermitian);
    }
    DualFunctional::new(
        a.parent().clone(),
        a.blocks().iter().map(sequential_trace).collect(),
    )
}

/// `sup { |f(τ)| : τ ≥ 0, ‖τ‖ ≤ 1 } = max_i |f_i| / n_i`.
///
/// The feasible set is the orthant capped by `Σ λ_i n_i ≤ 1`, whose vertices
/// are `0` and the scaled coordinate vectors `e_i/n_i`; a linear functional
/// attains its maximum modulus at a vertex.
pub fn sup_over_contractive_traces(f: &DualFunctional) -> f64 {
    f.coords
        .iter()
        .zip(f.parent.block_dims())
        .map(|(c, &n)| c.abs() / n as f64)
        .fold(0.0, f64::max)
}

/// Vertices of `{λ ≥ 0 : Σ λ_i n_i ≤ 1}`, for cross-checking the supremum.
pub fn contractive_trace_vertices(algebra: &BlockAlgebra) -> Vec<Vec<f64>> {
    let k = algebra.num_blocks();
    let mut verts = vec![vec![0.0; k]];
    for (i, &n) in algebra.block_dims().iter().enumerate() {
        let mut v = vec![0.0; k];
        v[i] = 1.0 / n as f64;
        verts.push(v);
    }
    verts
}

/// The scalar-block lift `a_i = (f_i/n_i)·1`.
///
/// Satisfies `hat(a) = f` bit-exactly and
/// `‖a‖ = sup_over_contractive_traces(f)` up to one rounding of `f_i/n_i`;
/// no self-adjoint lift can do better since `|tr(a_i)| ≤ n_i ‖a_i‖`.
///
/// The last diagonal entry absorbs the rounding of `f_i/n_i` so that the
/// sequential diagonal sum used by [`hat`] reproduces `f_i` exactly: the
/// partial sum `s` of the first `n−1` entries lies in `[f/2, f]`, hence
/// `f − s` and then `s + (f − s)` are both computed without error.
pub fn minimal_norm_lift(f: &DualFunctional) -> Element {
    let blocks = f
        .parent
        .block_dims()
        .iter()
        .zip(&f.coords)
        .map(|(&n, &c)| {
            let d = c / n as f64;
            let mut s = 0.0;
            for _ in 0..n - 1 {
                s += d;
            }
            let last = c - s;
            CMatrix::from_fn(n, n, |i, j| {
                if i != j {
                    Complex64::new(0.0, 0.0)
                } else if i + 1 == n {
                    Complex64::new(last, 0.0)
                } else {
                    Complex64::new(d, 0.0)
                }
            })
        })
        .collect();
    Element::new(f.parent.clone(), blocks).expect("matching shapes")
}

/// The polytope `{λ ≥ 0 : Σ_i λ_i tr(e_i) = 1}` slicing the positive trace
/// cone, for a strictly positive `e`.
#[derive(Debug, Clone, PartialEq)]
pub struct CompactBase {
    /// Coefficients `tr(e_i)` of the defining hyperplane.
    pub hyperplane: Vec<f64>,
    /// The vertices `e_i / tr(e_i)` of the slice.
    pub vertices: Vec<Vec<f64>>,
}

impl CompactBase {
    pub fn contains(&self, tau: &TracialFunctional, tol: Tolerance) -> bool {
        tau.is_positive(tol)
            && (self
                .hyperplane
                .iter()
                .zip(tau.weights())
                .map(|(t, l)| t * l)
                .sum::<f64>()
                - 1.0)
                .abs()
                <= tol.eps
    }

    /// The unique `s > 0` with `s·τ` in the base, for nonzero positive `τ`.
    pub fn scale_into_base(&self, tau: &TracialFunctional, tol: Tolerance) -> Result<f64> {
        if !tau.is_positive(tol) {
            return Err(Error::NotPositive);
        }
        let pairing: f64 = self
            .hyperplane
            .iter()
            .zip(tau.weights())
            .map(|(t, l)| t * l)
            .sum();
        if pairing <= tol.eps {
            return Err(Error::Invalid(
                "trace is zero (or vanishes on the base element)".into(),
            ));
        }
        Ok(1.0 / pairing)
    }
}

/// Build the compact base cut out by a strictly positive element `e`.
pub fn compact_base(algebra: &BlockAlgebra, e: &Element, tol: Tolerance) -> Result<CompactBase> {
    if e.parent() != algebra {
        return Err(Error::ParentMismatch);
    }
    if !e.is_positive(tol) {
        return Err(Error::NotPositive);
    }
    let strictly = e
        .eigenvalues(tol)?
        .iter()
        .all(|evs| evs.iter().all(|&ev| ev > tol.eps));
    if !strictly {
        return Err(Error::Invalid(
            "base element must be strictly positive on every block".into(),
        ));
    }
    let hyperplane: Vec<f64> = e.blocks().iter().map(|b| b.trace().re).collect();
    let k = algebra.num_blocks();
    let vertices = (0..k)
        .map(|i| {
            let mut v = vec![0.0; k];
            v[i] = 1.0 / hyperplane[i];
            v
        })
        .collect();
    Ok(CompactBase {
        hyperplane,
        vertices,
    })
}

/// The algebra `A ⊗ B` with blocks `n_i·m_j` ordered lexicographically in `(i, j)`.
pub fn tensor_algebra(a: &BlockAlgebra, b: &BlockAlgebra) -> BlockAlgebra {
    let dims = a
        .block_dims()
        .iter()
        .flat_map(|&n| b.block_dims().iter().map(move |&m| n * m))
        .collect();
    BlockAlgebra::new(dims).expect("positive dims")
}

/// Kronecker product of elements, landing in [`tensor_algebra`].
pub fn tensor_element(a: &Element, b: &Element) -> Element {
    let algebra = tensor_algebra(a.parent(), b.parent());
    let blocks = a
        .blocks()
        .iter()
        .flat_map(|ba| b.blocks().iter().map(move |bb| ba.kronecker(bb)))
        .collect();
    Element::new(algebra, blocks).expect("matching shapes")
}

/// The unique trace with `(τ_A ⊗ τ_B)(a ⊗ b) = τ_A(a)·τ_B(b)`: weights `λ_i μ_j`.
pub fn tensor_trace(ta: &TracialFunctional, tb: &TracialFunctional) -> TracialFunctional {
    let algebra = tensor_algebra(ta.parent(), tb.parent());
    let weights = ta
        .weights()
        .iter()
        .flat_map(|&l| tb.weights().iter().map(move |&m| l * m))
        .collect();
    TracialFunctional::new(algebra, weights).expect("matching length")
}
