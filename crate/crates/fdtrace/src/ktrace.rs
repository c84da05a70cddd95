//! K₀ classes via blockwise projection ranks and their pairing with traces.
//!
//! For a block algebra, K₀ is free abelian on the block ranks, so a class is
//! a vector of integers `d_i = rank(p_i) − rank(q_i)`. The pairing with a
//! trace of weights `λ_i` is `Σ d_i λ_i`, which agrees with evaluating the
//! amplified trace on `p − q` for any representing pair of projections.

use crate::error::{Error, Result};
use crate::functionals::TracialFunctional;
use crate::matalg::{BlockAlgebra, Element, Tolerance};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct K0Class {
    parent: BlockAlgebra,
    ranks: Vec<i64>,
}

impl K0Class {
    pub fn new(parent: BlockAlgebra, ranks: Vec<i64>) -> Result<Self> {
        if ranks.len() != parent.num_blocks() {
            return Err(Error::Invalid(format!(
                "expected {} ranks, got {}",
                parent.num_blocks(),
                ranks.len()
            )));
        }
        Ok(K0Class { parent, ranks })
    }

    pub fn parent(&self) -> &BlockAlgebra {
        &self.parent
    }

    pub fn ranks(&self) -> &[i64] {
        &self.ranks
    }

    pub fn add(&self, other: &K0Class) -> Result<K0Class> {
        if self.parent != other.parent {
            return Err(Error::ParentMismatch);
        }
        K0Class::new(
            self.parent.clone(),
            self.ranks
                .iter()
                .zip(&other.ranks)
                .map(|(a, b)| a + b)
                .collect(),
        )
    }

    pub fn is_zero(&self) -> bool {
        self.ranks.iter().all(|&d| d == 0)
    }
}

/// The trace `τ⁽ⁿ⁾` on `M_n(A)`, acting on the flattened amplified algebra.
///
/// Its weights coincide with those of `τ` since summing diagonal evaluations
/// equals the weighted trace of the `n·n_i` block.
pub fn amplify_trace(tau: &TracialFunctional, n: usize) -> Result<TracialFunctional> {
    let amped = tau.parent().amplified(n)?;
    TracialFunctional::new(amped, tau.weights().to_vec())
}

/// Blockwise ranks of a projection, counting eigenvalues above 1/2.
pub fn projection_ranks(p: &Element, tol: Tolerance) -> Result<Vec<usize>> {
    if !p.is_projection(tol) {
        return Err(Error::NotProjection);
    }
    Ok(p.eigenvalues(tol)?
        .iter()
        .map(|evs| evs.iter().filter(|&&ev| ev > 0.5).count())
        .collect())
}

/// The class `[p]₀ − [q]₀` of projections over (possibly different)
/// amplifications of `base`.
pub fn k0_of_projections(
    base: &BlockAlgebra,
    p: &Element,
    q: &Element,
    tol: Tolerance,
) -> Result<K0Class> {
    for e in [p, q] {
        let ok = e
            .parent()
            .block_dims()
            .iter()
            .zip(base.block_dims())
            .all(|(&big, &small)| big % small == 0)
            && e.parent().num_blocks() == base.num_blocks()
            && {
                // uniform amplification factor across blocks
                let f = e.parent().block_dims()[0] / base.block_dims()[0];
                e.parent()
                    .block_dims()
                    .iter()
                    .zip(base.block_dims())
                    .all(|(&big, &small)| big == f * small)
            };
        if !ok {
            return Err(Error::Invalid(
                "projection does not live over an amplification of the base algebra".into(),
            ));
        }
    }
    let rp = projection_ranks(p, tol)?;
    let rq = projection_ranks(q, tol)?;
    K0Class::new(
        base.clone(),
        rp.iter().zip(&rq).map(|(&a, &b)| a as i64 - b as i64).collect(),
    )
}

/// `ρ_A([p]₀ − [q]₀, τ) = Σ_i d_i λ_i`.
pub fn pairing(class: &K0Class, tau: &TracialFunctional) -> Result<f64> {
    if class.parent() != tau.parent() {
        return Err(Error::ParentMismatch);
    }
    Ok(class
        .ranks()
        .iter()
        .zip(tau.weights())
        .map(|(&d, &l)| d as f64 * l)
        .sum())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::matalg::CMatrix;
    use crate::sample::{random_projection, random_tracial, random_unitary, rng};
    use num_complex::Complex64;

    fn tol() -> Tolerance {
        Tolerance::default()
    }

    #[test]
    fn amplify_identity_cases() {
        let alg = BlockAlgebra::new(vec![2]).unwrap();
        let tau = TracialFunctional::new(alg.clone(), vec![1.0]).unwrap();
        let t1 = amplify_trace(&tau, 1).unwrap();
        assert_eq!(t1.parent().block_dims(), alg.block_dims());
        assert_eq!(t1.weights(), tau.weights());
        let t2 = amplify_trace(&tau, 2).unwrap();
        let big_id = t2.parent().identity();
        assert!((t2.evaluate(&big_id).unwrap().re - 4.0).abs() < 1e-12);
    }

    #[test]
    fn amplified_trace_matches_flattened_trace() {
        let alg = BlockAlgebra::new(vec![2, 3]).unwrap();
        let mut r = rng(41);
        let tau = random_tracial(&alg, &mut r);
        let t3 = amplify_trace(&tau, 3).unwrap();
        let a = crate::sample::random_element(t3.parent(), &mut r);
        // oracle: weighted trace of each flattened block
        let oracle: f64 = tau
            .weights()
            .iter()
            .zip(a.blocks())
            .map(|(&w, b)| w * b.trace().re)
            .sum();
        assert!((t3.evaluate(&a).unwrap().re - oracle).abs() < 1e-9);
    }

    #[test]
    fn zero_class_and_basic_ranks() {
        let alg = BlockAlgebra::new(vec![2]).unwrap();
        let mut r = rng(42);
        let p = random_projection(&alg, &mut r);
        let z = k0_of_projections(&alg, &p, &p, tol()).unwrap();
        assert!(z.is_zero());

        let e11 = Element::new(
            alg.clone(),
            vec![CMatrix::from_fn(2, 2, |i, j| {
                if i == 0 && j == 0 {
                    Complex64::new(1.0, 0.0)
                } else {
                    Complex64::new(0.0, 0.0)
                }
            })],
        )
        .unwrap();
        let c = k0_of_projections(&alg, &e11, &alg.zero(), tol()).unwrap();
        assert_eq!(c.ranks(), &[1]);
    }

    #[test]
    fn class_invariant_under_unitary_conjugation() {
        let alg = BlockAlgebra::new(vec![3, 2]).unwrap();
        let mut r = rng(43);
        for _ in 0..20 {
            let p = random_projection(&alg, &mut r);
            let u = random_unitary(&alg, &mut r);
            let conj = u.mul(&p).unwrap().mul(&u.adjoint()).unwrap();
            let c1 = k0_of_projections(&alg, &p, &alg.zero(), tol()).unwrap();
            let c2 = k0_of_projections(&alg, &conj, &alg.zero(), tol()).unwrap();
            assert_eq!(c1.ranks(), c2.ranks());
        }
    }

    #[test]
    fn pairing_values() {
        let alg = BlockAlgebra::new(vec![2]).unwrap();
        let tau = TracialFunctional::new(alg.clone(), vec![1.0]).unwrap();
        let c = K0Class::new(alg.clone(), vec![1]).unwrap();
        assert_eq!(pairing(&c, &tau).unwrap(), 1.0);
        let z = K0Class::new(alg.clone(), vec![0]).unwrap();
        assert_eq!(pairing(&z, &tau).unwrap(), 0.0);
    }

    #[test]
    fn pairing_matches_projection_evaluation() {
        let alg = BlockAlgebra::new(vec![2, 3]).unwrap();
        let mut r = rng(44);
        for _ in 0..20 {
            let tau = random_tracial(&alg, &mut r);
            let p = random_projection(&alg, &mut r);
            let c = k0_of_projections(&alg, &p, &alg.zero(), tol()).unwrap();
            let via_pairing = pairing(&c, &tau).unwrap();
            let via_eval = tau.evaluate(&p).unwrap().re;
            assert!((via_pairing - via_eval).abs() < 1e-9);
        }
    }

    #[test]
    fn pairing_bilinear() {
        let alg = BlockAlgebra::new(vec![2, 2]).unwrap();
        let mut r = rng(45);
        let c1 = K0Class::new(alg.clone(), vec![1, -2]).unwrap();
        let c2 = K0Class::new(alg.clone(), vec![3, 1]).unwrap();
        let t = random_tracial(&alg, &mut r);
        let s = random_tracial(&alg, &mut r);
        let sum = c1.add(&c2).unwrap();
        assert!(
            (pairing(&sum, &t).unwrap() - pairing(&c1, &t).unwrap() - pairing(&c2, &t).unwrap())
                .abs()
                < 1e-12
        );
        let combo = t.scale(2.5).add(&s.scale(-1.5)).unwrap();
        assert!(
            (pairing(&c1, &combo).unwrap()
                - 2.5 * pairing(&c1, &t).unwrap()
                - (-1.5) * pairing(&c1, &s).unwrap())
            .abs()
                < 1e-12
        );
    }

    #[test]
    fn rejects_non_projection() {
        let alg = BlockAlgebra::new(vec![2]).unwrap();
        let half = alg.identity().scale_re(0.5);
        assert!(k0_of_projections(&alg, &half, &alg.zero(), tol()).is_err());
    }
}
