//! Seeded random generators for elements, functionals and groupoids.
//!
//! Everything here is driven by an explicit [`ChaCha8Rng`] so verification
//! runs are reproducible from the seed alone.

use nalgebra::DMatrix;
use num_complex::Complex64;
use rand::Rng;
use rand_chacha::ChaCha8Rng;
use rand_chacha::rand_core::SeedableRng;

use crate::functionals::{Functional, TracialFunctional};
use crate::matalg::{BlockAlgebra, CMatrix, Element, Tolerance};

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

fn random_matrix(n: usize, r: &mut ChaCha8Rng) -> CMatrix {
    DMatrix::from_fn(n, n, |_, _| {
        Complex64::new(r.random_range(-1.0..1.0), r.random_range(-1.0..1.0))
    })
}

/// Algebra with 1..=max_blocks blocks of size 1..=max_dim.
pub fn random_algebra(max_blocks: usize, max_dim: usize, r: &mut ChaCha8Rng) -> BlockAlgebra {
    let k = r.random_range(1..=max_blocks);
    let dims = (0..k).map(|_| r.random_range(1..=max_dim)).collect();
    BlockAlgebra::new(dims).expect("positive dims")
}

pub fn random_element(algebra: &BlockAlgebra, r: &mut ChaCha8Rng) -> Element {
    let blocks = algebra
        .block_dims()
        .iter()
        .map(|&n| random_matrix(n, r))
        .collect();
    Element::new(algebra.clone(), blocks).expect("matching shapes")
}

pub fn random_hermitian(algebra: &BlockAlgebra, r: &mut ChaCha8Rng) -> Element {
    let a = random_element(algebra, r);
    a.add(&a.adjoint()).expect("same parent").scale_re(0.5)
}

pub fn random_positive(algebra: &BlockAlgebra, r: &mut ChaCha8Rng) -> Element {
    let a = random_element(algebra, r);
    a.adjoint().mul(&a).expect("same parent")
}

/// Strictly positive: b*b + identity/2.
pub fn random_strictly_positive(algebra: &BlockAlgebra, r: &mut ChaCha8Rng) -> Element {
    random_positive(algebra, r)
        .add(&algebra.identity().scale_re(0.5))
        .expect("same parent")
}

/// Haar-ish unitary from the QR of a random matrix.
pub fn random_unitary(algebra: &BlockAlgebra, r: &mut ChaCha8Rng) -> Element {
    let blocks = algebra
        .block_dims()
        .iter()
        .map(|&n| {
            let qr = random_matrix(n, r).qr();
            qr.q()
        })
        .collect();
    Element::new(algebra.clone(), blocks).expect("matching shapes")
}

/// Projection of random rank per block (rank may be 0 or full).
pub fn random_projection(algebra: &BlockAlgebra, r: &mut ChaCha8Rng) -> Element {
    let u = random_unitary(algebra, r);
    let blocks = algebra
        .block_dims()
        .iter()
        .enumerate()
        .map(|(i, &n)| {
            let rank = r.random_range(0..=n);
            let d = DMatrix::from_fn(n, n, |p, q| {
                if p == q && p < rank {
                    Complex64::new(1.0, 0.0)
                } else {
                    Complex64::new(0.0, 0.0)
                }
            });
            u.block(i) * d * u.block(i).adjoint()
        })
        .collect();
    Element::new(algebra.clone(), blocks).expect("matching shapes")
}

/// Projection with every block of rank at least 1.
pub fn random_full_projection(algebra: &BlockAlgebra, r: &mut ChaCha8Rng) -> Element {
    let u = random_unitary(algebra, r);
    let blocks = algebra
        .block_dims()
        .iter()
        .enumerate()
        .map(|(i, &n)| {
            let rank = r.random_range(1..=n);
            let d = DMatrix::from_fn(n, n, |p, q| {
                if p == q && p < rank {
                    Complex64::new(1.0, 0.0)
                } else {
                    Complex64::new(0.0, 0.0)
                }
            });
            u.block(i) * d * u.block(i).adjoint()
        })
        .collect();
    Element::new(algebra.clone(), blocks).expect("matching shapes")
}

pub fn random_tracial(algebra: &BlockAlgebra, r: &mut ChaCha8Rng) -> TracialFunctional {
    let weights = (0..algebra.num_blocks())
        .map(|_| r.random_range(-2.0..2.0))
        .collect();
    TracialFunctional::new(algebra.clone(), weights).expect("matching length")
}

pub fn random_selfadjoint_functional(algebra: &BlockAlgebra, r: &mut ChaCha8Rng) -> Functional {
    let duals = algebra
        .block_dims()
        .iter()
        .map(|&n| {
            let m = random_matrix(n, r);
            (&m + m.adjoint()).map(|z| z * Complex64::new(0.5, 0.0))
        })
        .collect();
    Functional::new(algebra.clone(), duals).expect("matching shapes")
}

/// Used where a check needs "some element the caller did not choose".
pub fn perturbed(e: &Element, magnitude: f64, r: &mut ChaCha8Rng) -> Element {
    let noise = random_hermitian(e.parent(), r).scale_re(magnitude);
    e.add(&noise).expect("same parent")
}

pub fn default_tol() -> Tolerance {
    Tolerance::default()
}

use crate::groupoid::{
    equivalence_groupoid, FiniteGroupoid, GroupoidElement, TwoCocycle,
};

/// Random coboundary twist: unit phases on non-unit arrows, 1 on units.
pub fn random_coboundary(g: &FiniteGroupoid, r: &mut ChaCha8Rng) -> TwoCocycle {
    let phases: Vec<Complex64> = (0..g.num_arrows())
        .map(|a| {
            if g.is_unit_arrow(a) {
                Complex64::new(1.0, 0.0)
            } else {
                let t: f64 = r.random_range(0.0..std::f64::consts::TAU);
                Complex64::new(t.cos(), t.sin())
            }
        })
        .collect();
    TwoCocycle::coboundary(g, &phases).expect("unit phases, 1 on units")
}

pub fn random_groupoid_element(g: &FiniteGroupoid, r: &mut ChaCha8Rng) -> GroupoidElement {
    GroupoidElement::from_coeffs(
        (0..g.num_arrows())
            .map(|_| Complex64::new(r.random_range(-1.0..1.0), r.random_range(-1.0..1.0)))
            .collect(),
    )
}

/// Random equivalence relation on at most `max_units` points, with class
/// sizes capped so the arrow count stays at most `max_arrows`.
pub fn random_equivalence_groupoid(
    max_units: usize,
    max_arrows: usize,
    r: &mut ChaCha8Rng,
) -> FiniteGroupoid {
    let n = r.random_range(2..=max_units.max(2));
    let mut classes: Vec<Vec<usize>> = Vec::new();
    let mut arrows = 0usize;
    for x in 0..n {
        // join an existing class when that keeps the arrow budget
        let join = !classes.is_empty() && r.random_range(0..3) > 0;
        if join {
            let k = r.random_range(0..classes.len());
            let m = classes[k].len();
            if arrows - m * m + (m + 1) * (m + 1) <= max_arrows {
                arrows += 2 * m + 1;
                classes[k].push(x);
                continue;
            }
        }
        if arrows + 1 > max_arrows {
            break;
        }
        arrows += 1;
        classes.push(vec![x]);
    }
    // relabel units consecutively
    let mut relabeled: Vec<Vec<usize>> = Vec::new();
    let mut next = 0;
    for class in classes {
        relabeled.push((0..class.len()).map(|i| next + i).collect());
        next += class.len();
    }
    equivalence_groupoid(&relabeled)
}
