//! The randomized verification suite behind `fdtrace verify all`.
//!
//! Each check exercises one structural theorem at desk scale (algebras with
//! at most 4 blocks of size at most 5, groupoids with at most 10 units and
//! 40 arrows) against an independent oracle, and reports a pass/fail flag
//! with the worst residual observed. All randomness flows from the
//! configured seed, so identical configurations produce identical reports
//! up to the timing fields.

use std::collections::HashMap;
use std::time::Instant;

use num_complex::Complex64;
use rand::Rng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::dualspace::{
    compact_base, contractive_trace_vertices, hat, minimal_norm_lift,
    sup_over_contractive_traces, tensor_element, tensor_trace, DualFunctional,
};
use crate::error::Error;
use crate::functionals::{lift_from_full_corner, TracialFunctional};
use crate::groupoid::{
    convolve, cyclic_table, disjoint_union, group_groupoid, involute,
    measure_trace_iso_check, s3_table, validate, RegularRepresentation, TwoCocycle,
};
use crate::ktrace::{amplify_trace, k0_of_projections, pairing};
use crate::matalg::{module_maps, sos_factor, BlockAlgebra, CMatrix, Element, Tolerance};
use crate::sample::{
    random_algebra, random_coboundary, random_element, random_equivalence_groupoid,
    random_full_projection, random_groupoid_element, random_positive, random_projection,
    random_selfadjoint_functional, random_strictly_positive, random_tracial, random_unitary,
    rng,
};

#[derive(Debug, Clone, Copy)]
pub struct VerifyConfig {
    pub seed: u64,
    pub cases: usize,
    pub tol: Tolerance,
}

impl Default for VerifyConfig {
    fn default() -> Self {
        VerifyConfig {
            seed: 2024,
            cases: 1000,
            tol: Tolerance::default(),
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct CheckResult {
    pub name: String,
    pub passed: bool,
    pub cases_run: usize,
    pub max_residual: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub note: Option<String>,
    pub seconds: f64,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct Report {
    pub seed: u64,
    pub cases: usize,
    pub tolerance: f64,
    pub all_passed: bool,
    pub checks: Vec<CheckResult>,
}

struct Check {
    name: &'static str,
    passed: bool,
    cases_run: usize,
    max_residual: f64,
    note: Option<String>,
}

impl Check {
    fn new(name: &'static str) -> Self {
        Check {
            name,
            passed: true,
            cases_run: 0,
            max_residual: 0.0,
            note: None,
        }
    }

    fn record(&mut self, residual: f64, bound: f64) {
        self.cases_run += 1;
        self.max_residual = self.max_residual.max(residual);
        if residual.is_nan() || residual > bound {
            self.passed = false;
        }
    }

    fn require(&mut self, ok: bool, note: &str) {
        self.cases_run += 1;
        if !ok {
            self.passed = false;
            if self.note.is_none() {
                self.note = Some(note.to_string());
            }
        }
    }

    fn finish(self, started: Instant) -> CheckResult {
        CheckResult {
            name: self.name.to_string(),
            passed: self.passed,
            cases_run: self.cases_run,
            max_residual: self.max_residual,
            note: self.note,
            seconds: started.elapsed().as_secs_f64(),
        }
    }
}

fn desk_algebra(r: &mut ChaCha8Rng) -> BlockAlgebra {
    random_algebra(4, 5, r)
}

/// `‖φ‖ = ‖φ⁺‖ + ‖φ⁻‖` for random self-adjoint and random tracial functionals.
pub fn check_jordan_norm_identity(cfg: &VerifyConfig) -> CheckResult {
    let started = Instant::now();
    let mut c = Check::new("01_jordan_norm_identity");
    let mut r = rng(cfg.seed ^ 0x01);
    for i in 0..cfg.cases {
        let alg = desk_algebra(&mut r);
        if i % 2 == 0 {
            let phi = random_selfadjoint_functional(&alg, &mut r);
            let (p, m) = phi.jordan(cfg.tol).expect("self-adjoint by construction");
            let gap = (phi.norm() - p.norm() - m.norm()).abs();
            c.record(gap, 1e-9 * (1.0 + phi.norm()));
        } else {
            let tau = random_tracial(&alg, &mut r);
            let (p, m) = tau.jordan();
            let gap = (tau.norm() - p.norm() - m.norm()).abs();
            c.record(gap, 1e-9 * (1.0 + tau.norm()));
        }
    }
    c.finish(started)
}

/// The split of a positive `d` into `c₁ + c₂` with `τ⁺(c₁) = τ⁻(c₂) = 0`.
pub fn check_epsilon_split(cfg: &VerifyConfig) -> CheckResult {
    let started = Instant::now();
    let mut c = Check::new("02_epsilon_split");
    let mut r = rng(cfg.seed ^ 0x02);
    let positive_tol = Tolerance::new(1e-7).expect("positive");
    for _ in 0..cfg.cases {
        let alg = desk_algebra(&mut r);
        let tau = random_tracial(&alg, &mut r);
        let d = random_positive(&alg, &mut r);
        let (c1, c2) = tau.epsilon_split(&d, cfg.tol).expect("positive by construction");
        c.require(c1.is_positive(positive_tol), "c1 not positive");
        c.require(c2.is_positive(positive_tol), "c2 not positive");
        c.record(c1.add(&c2).unwrap().sub(&d).unwrap().op_norm(), 1e-10 * (1.0 + d.op_norm()));
        let (tp, tm) = tau.jordan();
        let scale = 1e-9 * (1.0 + tau.norm()) * (1.0 + d.op_norm());
        c.record(tp.evaluate(&c1).unwrap().norm(), scale);
        c.record(tm.evaluate(&c2).unwrap().norm(), scale);
    }
    c.finish(started)
}

/// Lattice coherence: the Jordan-formula join and meet are coordinatewise
/// max and min, `τ∨0 = τ⁺`, and the lattice axioms hold bit-exactly.
pub fn check_lattice(cfg: &VerifyConfig) -> CheckResult {
    let started = Instant::now();
    let mut c = Check::new("03_lattice_coherence");
    let mut r = rng(cfg.seed ^ 0x03);
    for _ in 0..cfg.cases {
        let alg = desk_algebra(&mut r);
        let t = random_tracial(&alg, &mut r);
        let s = random_tracial(&alg, &mut r);
        let p = random_tracial(&alg, &mut r);
        let join = t.join(&s).unwrap();
        let meet = t.meet(&s).unwrap();
        for i in 0..alg.num_blocks() {
            c.require(join.weights()[i] == t.weights()[i].max(s.weights()[i]), "join != max");
            c.require(meet.weights()[i] == t.weights()[i].min(s.weights()[i]), "meet != min");
        }
        let zero = TracialFunctional::zero(&alg);
        c.require(
            t.join(&zero).unwrap().weights() == t.jordan().0.weights(),
            "t ∨ 0 != t⁺",
        );
        // commutativity, associativity, absorption, translation invariance
        c.require(
            join.weights() == s.join(&t).unwrap().weights(),
            "join not commutative",
        );
        c.require(
            t.join(&s).unwrap().join(&p).unwrap().weights()
                == t.join(&s.join(&p).unwrap()).unwrap().weights(),
            "join not associative",
        );
        c.require(
            t.join(&t.meet(&s).unwrap()).unwrap().weights() == t.weights(),
            "absorption fails",
        );
        c.require(
            t.join(&s).unwrap().add(&p).unwrap().weights()
                == t.add(&p).unwrap().join(&s.add(&p).unwrap()).unwrap().weights(),
            "translation invariance fails",
        );
    }
    c.finish(started)
}

/// Jordan and lattice operations commute with restriction to a corner
/// `pAp`; for full `p` restriction is a bijection on weight vectors.
pub fn check_hereditary_restriction(cfg: &VerifyConfig) -> CheckResult {
    let started = Instant::now();
    let mut c = Check::new("04_hereditary_restriction");
    let mut r = rng(cfg.seed ^ 0x04);
    for _ in 0..cfg.cases.max(1) / 4 {
        let alg = desk_algebra(&mut r);
        let t = random_tracial(&alg, &mut r);
        let s = random_tracial(&alg, &mut r);
        let p = random_full_projection(&alg, &mut r);
        let (rt, _) = t.restrict_hereditary(&p, cfg.tol).unwrap();
        let (rs, _) = s.restrict_hereditary(&p, cfg.tol).unwrap();
        // jordan commutes
        let (tp, tm) = t.jordan();
        let (rp, rm) = rt.jordan();
        let (tp_r, _) = tp.restrict_hereditary(&p, cfg.tol).unwrap();
        let (tm_r, _) = tm.restrict_hereditary(&p, cfg.tol).unwrap();
        for i in 0..alg.num_blocks() {
            c.record((rp.weights()[i] - tp_r.weights()[i]).abs(), 1e-9);
            c.record((rm.weights()[i] - tm_r.weights()[i]).abs(), 1e-9);
        }
        // lattice commutes
        let (join_r, _) = t.join(&s).unwrap().restrict_hereditary(&p, cfg.tol).unwrap();
        let r_join = rt.join(&rs).unwrap();
        for i in 0..alg.num_blocks() {
            c.record((join_r.weights()[i] - r_join.weights()[i]).abs(), 1e-9);
        }
        // full-corner bijection: lift back and compare
        let lifted = lift_from_full_corner(&alg, &p, &rt, cfg.tol).unwrap();
        for i in 0..alg.num_blocks() {
            c.record((lifted.weights()[i] - t.weights()[i]).abs(), 1e-9);
        }
    }
    c.finish(started)
}

/// Well-definedness of the K₀/trace pairing across representing pairs.
pub fn check_k0_pairing(cfg: &VerifyConfig) -> CheckResult {
    let started = Instant::now();
    let mut c = Check::new("05_k0_pairing");
    let mut r = rng(cfg.seed ^ 0x05);
    for _ in 0..100 {
        let alg = random_algebra(3, 4, &mut r);
        let tau = random_tracial(&alg, &mut r);
        let p0 = random_projection(&alg, &mut r);
        let q0 = random_projection(&alg, &mut r);
        let base_class = k0_of_projections(&alg, &p0, &q0, cfg.tol).unwrap();
        let base_value = pairing(&base_class, &tau).unwrap();
        // the pairing agrees with evaluating the trace on p − q
        let direct = tau.evaluate(&p0.sub(&q0).unwrap()).unwrap().re;
        c.record((base_value - direct).abs(), 1e-9);
        for _ in 0..50 {
            // unitary conjugation and joint direct-sum padding preserve the class
            let n: usize = r.random_range(1..=2);
            let amped = alg.amplified(n).unwrap();
            let embed = |e: &Element| -> Element {
                // e ⊕ 0 in the top-left corner of the amplification
                let blocks = e
                    .blocks()
                    .iter()
                    .zip(amped.block_dims())
                    .map(|(b, &big)| {
                        let mut m = CMatrix::zeros(big, big);
                        m.view_mut((0, 0), (b.nrows(), b.ncols())).copy_from(b);
                        m
                    })
                    .collect();
                Element::new(amped.clone(), blocks).unwrap()
            };
            // pad both legs by the same projection on the complementary corner
            let shared = if n == 1 {
                amped.zero()
            } else {
                let room_dims: Vec<usize> =
                    alg.block_dims().iter().map(|&d| (n - 1) * d).collect();
                let room = BlockAlgebra::new(room_dims).unwrap();
                let small_proj = random_projection(&room, &mut r);
                let blocks = small_proj
                    .blocks()
                    .iter()
                    .zip(alg.block_dims())
                    .zip(amped.block_dims())
                    .map(|((b, &small), &big)| {
                        let mut m = CMatrix::zeros(big, big);
                        m.view_mut((small, small), (big - small, big - small))
                            .copy_from(b);
                        m
                    })
                    .collect();
                Element::new(amped.clone(), blocks).unwrap()
            };
            let u = random_unitary(&amped, &mut r);
            let conj = |e: &Element| u.mul(e).unwrap().mul(&u.adjoint()).unwrap();
            let p_rep = conj(&embed(&p0).add(&shared).unwrap());
            let q_rep = conj(&embed(&q0).add(&shared).unwrap());
            let class = k0_of_projections(&alg, &p_rep, &q_rep, cfg.tol).unwrap();
            c.require(class.ranks() == base_class.ranks(), "class drifted");
            c.record((pairing(&class, &tau).unwrap() - base_value).abs(), 1e-9);
            // the amplified trace evaluates p − q to the same number
            let amp_tau = amplify_trace(&tau, n).unwrap();
            let diff = p_rep.sub(&q_rep).unwrap();
            c.record((amp_tau.evaluate(&diff).unwrap().re - base_value).abs(), 1e-9);
        }
        // bilinearity
        let other = random_tracial(&alg, &mut r);
        let sum_class = base_class.add(&base_class).unwrap();
        c.record(
            (pairing(&sum_class, &tau).unwrap() - 2.0 * base_value).abs(),
            1e-12 * (1.0 + base_value.abs()),
        );
        let combo = tau.scale(2.0).add(&other.scale(-3.0)).unwrap();
        c.record(
            (pairing(&base_class, &combo).unwrap()
                - (2.0 * base_value - 3.0 * pairing(&base_class, &other).unwrap()))
            .abs(),
            1e-12 * (1.0 + base_value.abs()),
        );
    }
    c.finish(started)
}

/// The scalar lift inverts the hat map bit-exactly and attains the dual
/// supremum, cross-checked against vertex enumeration.
pub fn check_dual_lift(cfg: &VerifyConfig) -> CheckResult {
    let started = Instant::now();
    let mut c = Check::new("06_dual_lift_tightness");
    let mut r = rng(cfg.seed ^ 0x06);
    for _ in 0..cfg.cases {
        let alg = desk_algebra(&mut r);
        let coords: Vec<f64> = (0..alg.num_blocks())
            .map(|_| r.random_range(-5.0..5.0))
            .collect();
        let f = DualFunctional::new(alg.clone(), coords.clone()).unwrap();
        let lift = minimal_norm_lift(&f);
        let back = hat(&lift, cfg.tol).unwrap();
        c.require(back.coords() == f.coords(), "hat ∘ lift != id");
        let lp = sup_over_contractive_traces(&f);
        c.record((lift.op_norm() - lp).abs(), 1e-12 * (1.0 + lp));
        let by_vertices = contractive_trace_vertices(&alg)
            .iter()
            .map(|v| {
                v.iter()
                    .zip(&coords)
                    .map(|(l, x)| l * x)
                    .sum::<f64>()
                    .abs()
            })
            .fold(0.0, f64::max);
        c.record((lp - by_vertices).abs(), 1e-12 * (1.0 + lp));
    }
    c.finish(started)
}

/// Tensor traces multiply on elementary tensors and lay out weights as the
/// outer product in lexicographic block order.
pub fn check_tensor_traces(cfg: &VerifyConfig) -> CheckResult {
    let started = Instant::now();
    let mut c = Check::new("07_tensor_traces");
    let mut r = rng(cfg.seed ^ 0x07);
    for _ in 0..cfg.cases {
        let a = random_algebra(2, 3, &mut r);
        let b = random_algebra(2, 3, &mut r);
        let ta = random_tracial(&a, &mut r);
        let tb = random_tracial(&b, &mut r);
        let t = tensor_trace(&ta, &tb);
        // outer-product layout
        let mut idx = 0;
        for (i, &la) in ta.weights().iter().enumerate() {
            for (j, &lb) in tb.weights().iter().enumerate() {
                c.require(t.weights()[idx] == la * lb, "weight layout broken");
                c.require(
                    t.parent().block_dims()[idx]
                        == a.block_dims()[i] * b.block_dims()[j],
                    "block layout broken",
                );
                idx += 1;
            }
        }
        let x = random_element(&a, &mut r);
        let y = random_element(&b, &mut r);
        let lhs = t.evaluate(&tensor_element(&x, &y)).unwrap();
        let rhs = ta.evaluate(&x).unwrap() * tb.evaluate(&y).unwrap();
        c.record((lhs - rhs).norm(), 1e-10 * (1.0 + rhs.norm()));
    }
    c.finish(started)
}

/// Module-map reconstruction and the sum-of-squares factorization, with
/// ideal-membership failures surfacing as errors.
pub fn check_factorizations(cfg: &VerifyConfig) -> CheckResult {
    let started = Instant::now();
    let mut c = Check::new("08_factorizations");
    let mut r = rng(cfg.seed ^ 0x08);
    for _ in 0..200 {
        // module maps on a random generating family
        let alg = random_algebra(3, 5, &mut r);
        let m: usize = r.random_range(1..=4);
        let gens: Vec<Element> = (0..m).map(|_| random_element(&alg, &mut r)).collect();
        let mut sum = alg.zero();
        for g in &gens {
            sum = sum.add(&g.adjoint().mul(g).unwrap()).unwrap();
        }
        let a = sum.sqrt(cfg.tol).unwrap();
        let x = a.mul(&random_element(&alg, &mut r)).unwrap();
        let y = a.mul(&random_element(&alg, &mut r)).unwrap();
        let phix = module_maps(&gens, &x, cfg.tol).unwrap();
        let phiy = module_maps(&gens, &y, cfg.tol).unwrap();
        let mut recon = alg.zero();
        for (px, py) in phix.iter().zip(&phiy) {
            recon = recon.add(&px.adjoint().mul(py).unwrap()).unwrap();
        }
        c.record(
            recon.sub(&x.adjoint().mul(&y).unwrap()).unwrap().op_norm(),
            1e-8 * (1.0 + x.op_norm() * y.op_norm()),
        );

        // sum-of-squares factorization of an in-ideal positive element
        let gen = random_element(&alg, &mut r);
        let z = random_element(&alg, &mut r);
        let a_pos = z.adjoint().mul(&z).unwrap();
        let pairs = sos_factor(&a_pos, std::slice::from_ref(&gen), cfg.tol).unwrap();
        let mut back = alg.zero();
        for (cc, xx) in &pairs {
            let term = cc
                .adjoint()
                .mul(&xx.adjoint().mul(xx).unwrap())
                .unwrap()
                .mul(cc)
                .unwrap();
            back = back.add(&term).unwrap();
        }
        c.record(
            back.sub(&a_pos).unwrap().op_norm(),
            1e-8 * (1.0 + a_pos.op_norm()),
        );
    }
    // out-of-ideal instances raise the membership error
    for _ in 0..20 {
        let alg = BlockAlgebra::new(vec![
            r.random_range(1..=4),
            r.random_range(1..=4),
        ])
        .unwrap();
        let z = random_element(&alg, &mut r);
        let mut a_blocks: Vec<CMatrix> = alg
            .block_dims()
            .iter()
            .map(|&n| CMatrix::zeros(n, n))
            .collect();
        a_blocks[1] = (z.block(1).adjoint() * z.block(1))
            + CMatrix::identity(alg.block_dims()[1], alg.block_dims()[1]);
        let a = Element::new(alg.clone(), a_blocks).unwrap();
        let mut x_blocks: Vec<CMatrix> = alg
            .block_dims()
            .iter()
            .map(|&n| CMatrix::zeros(n, n))
            .collect();
        x_blocks[0] = z.block(0).clone();
        let x = Element::new(alg.clone(), x_blocks).unwrap();
        let outcome = sos_factor(&a, std::slice::from_ref(&x), cfg.tol);
        c.require(
            matches!(outcome, Err(Error::IdealMembership(_))),
            "membership failure not raised",
        );
    }
    c.finish(started)
}

fn twisted_desk_groupoids(
    r: &mut ChaCha8Rng,
    count: usize,
) -> Vec<(crate::groupoid::FiniteGroupoid, TwoCocycle)> {
    let mut out = Vec::new();
    for i in 0..count {
        let g = match i % 3 {
            0 => random_equivalence_groupoid(8, 40, r),
            1 => disjoint_union(
                &random_equivalence_groupoid(5, 25, r),
                &group_groupoid(&cyclic_table(r.random_range(2..=4))).unwrap(),
            ),
            _ => group_groupoid(&cyclic_table(2)).unwrap(),
        };
        let sigma = match i % 3 {
            2 => {
                // the sign twist on Z/2
                let mut values = HashMap::new();
                values.insert((1, 1), Complex64::new(-1.0, 0.0));
                TwoCocycle::from_values(values)
            }
            _ if i % 2 == 0 => TwoCocycle::trivial(),
            _ => random_coboundary(&g, r),
        };
        out.push((g, sigma));
    }
    out
}

/// The regular representation is a *-homomorphism on random twisted
/// groupoids, and the unit sup-norm is dominated by the reduced norm.
pub fn check_groupoid_representation(cfg: &VerifyConfig) -> CheckResult {
    let started = Instant::now();
    let mut c = Check::new("09_groupoid_representation");
    let mut r = rng(cfg.seed ^ 0x09);
    for (g, sigma) in twisted_desk_groupoids(&mut r, 30) {
        c.require(validate(&g, &sigma, cfg.tol).is_empty(), "invalid fixture");
        let rep = RegularRepresentation::new(&g).unwrap();
        for _ in 0..5 {
            let f = random_groupoid_element(&g, &mut r);
            let h = random_groupoid_element(&g, &mut r);
            let lhs = rep.represent(&g, &sigma, &convolve(&g, &sigma, &f, &h));
            let rhs = rep
                .represent(&g, &sigma, &f)
                .mul(&rep.represent(&g, &sigma, &h))
                .unwrap();
            c.record(lhs.sub(&rhs).unwrap().op_norm(), 1e-10);
            let ladj = rep.represent(&g, &sigma, &involute(&g, &sigma, &f));
            c.record(
                ladj.sub(&rep.represent(&g, &sigma, &f).adjoint())
                    .unwrap()
                    .op_norm(),
                1e-10,
            );
            let slack = rep.norm(&g, &sigma, &f) - f.sup_norm_on_units(&g);
            c.record((-slack).max(0.0), 1e-10);
        }
    }
    c.finish(started)
}

/// Restricting any basis trace to the unit space yields an orbit-constant
/// (invariant) weight vector, on every generated groupoid.
pub fn check_restricted_trace_invariance(cfg: &VerifyConfig) -> CheckResult {
    let started = Instant::now();
    let mut c = Check::new("10_restricted_trace_invariance");
    let mut r = rng(cfg.seed ^ 0x0a);
    for (g, sigma) in twisted_desk_groupoids(&mut r, 30) {
        let report = measure_trace_iso_check(&g, &sigma, cfg.tol);
        c.record(report.max_restriction_residual, 1e-9);
        c.require(report.restrictions_invariant, "restriction not invariant");
    }
    c.finish(started)
}

/// The principal classification: trace dimension equals orbit count with an
/// exact measure round-trip; planted isotropy strictly inflates the trace
/// space.
pub fn check_principal_classification(cfg: &VerifyConfig) -> CheckResult {
    let started = Instant::now();
    let mut c = Check::new("11_principal_classification");
    let mut r = rng(cfg.seed ^ 0x0b);
    for i in 0..100 {
        let g = random_equivalence_groupoid(8, 40, &mut r);
        let sigma = if i % 2 == 0 {
            TwoCocycle::trivial()
        } else {
            random_coboundary(&g, &mut r)
        };
        let report = measure_trace_iso_check(&g, &sigma, cfg.tol);
        c.require(report.principal, "fixture not principal");
        c.require(
            report.trace_dim == g.orbits().len() && report.trace_dim == report.measure_dim,
            "dimension mismatch on principal groupoid",
        );
        c.record(report.max_round_trip_residual, 1e-9);
        c.require(report.round_trip_ok, "round trip failed");
        c.require(report.cones_match, "positive cones do not correspond");
    }
    for i in 0..20 {
        let isotropy = match i % 3 {
            0 => group_groupoid(&cyclic_table(2)).unwrap(),
            1 => group_groupoid(&cyclic_table(3)).unwrap(),
            _ => group_groupoid(&s3_table()).unwrap(),
        };
        let g = disjoint_union(&random_equivalence_groupoid(5, 20, &mut r), &isotropy);
        let report = measure_trace_iso_check(&g, &TwoCocycle::trivial(), cfg.tol);
        c.require(!report.principal, "fixture unexpectedly principal");
        c.require(
            report.trace_dim > report.measure_dim,
            "isotropy did not inflate the trace space",
        );
    }
    c.finish(started)
}

/// Compact base: each nonzero positive trace crosses the base exactly once,
/// and the base excludes zero.
pub fn check_compact_base(cfg: &VerifyConfig) -> CheckResult {
    let started = Instant::now();
    let mut c = Check::new("12_compact_base");
    let mut r = rng(cfg.seed ^ 0x0c);
    for _ in 0..cfg.cases {
        let alg = desk_algebra(&mut r);
        let e = random_strictly_positive(&alg, &mut r);
        let base = compact_base(&alg, &e, cfg.tol).unwrap();
        c.require(!base.contains(&TracialFunctional::zero(&alg), cfg.tol), "base contains 0");
        let (tau, _) = random_tracial(&alg, &mut r).jordan();
        if tau.norm() < 1e-6 {
            continue;
        }
        let s = base.scale_into_base(&tau, cfg.tol).unwrap();
        c.require(s > 0.0, "scale not positive");
        c.require(base.contains(&tau.scale(s), cfg.tol), "scaled trace misses base");
        c.require(!base.contains(&tau.scale(0.5 * s), cfg.tol), "crossing not unique");
    }
    c.finish(started)
}

/// Run every check and aggregate into a report sorted by check name.
pub fn run_all(cfg: &VerifyConfig) -> Report {
    let mut checks = vec![
        check_jordan_norm_identity(cfg),
        check_epsilon_split(cfg),
        check_lattice(cfg),
        check_hereditary_restriction(cfg),
        check_k0_pairing(cfg),
        check_dual_lift(cfg),
        check_tensor_traces(cfg),
        check_factorizations(cfg),
        check_groupoid_representation(cfg),
        check_restricted_trace_invariance(cfg),
        check_principal_classification(cfg),
        check_compact_base(cfg),
    ];
    checks.sort_by(|a, b| a.name.cmp(&b.name));
    Report {
        seed: cfg.seed,
        cases: cfg.cases,
        tolerance: cfg.tol.eps,
        all_passed: checks.iter().all(|c| c.passed),
        checks,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn small_run_passes() {
        let cfg = VerifyConfig {
            seed: 7,
            cases: 50,
            tol: Tolerance::default(),
        };
        let report = run_all(&cfg);
        for c in &report.checks {
            assert!(c.passed, "{} failed: residual {:.3e} {:?}", c.name, c.max_residual, c.note);
        }
        assert!(report.all_passed);
    }

    #[test]
    fn reports_are_deterministic() {
        let cfg = VerifyConfig {
            seed: 11,
            cases: 20,
            tol: Tolerance::default(),
        };
        let a = run_all(&cfg);
        let b = run_all(&cfg);
        for (x, y) in a.checks.iter().zip(&b.checks) {
            assert_eq!(x.name, y.name);
            assert_eq!(x.passed, y.passed);
            assert_eq!(x.cases_run, y.cases_run);
            assert_eq!(x.max_residual, y.max_residual);
        }
    }
}
