//! Finite twisted groupoids and their convolution *-algebras.
//!
//! A groupoid is a finite set of arrows over a finite unit space with a
//! partial composition; a twist is a normalized circle-valued 2-cocycle on
//! composable pairs. The module provides twisted convolution and involution
//! on the group(oid) algebra, the left regular representation into a block
//! algebra (one block per unit, of size the source fiber), invariant
//! measures on units, the induced traces `τ_μ`, and a brute-force
//! computation of all self-adjoint tracial functionals by solving the
//! traciality and self-adjointness constraints as a linear system.

use std::collections::{BTreeMap, HashMap};

use nalgebra::DMatrix;
use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::matalg::{BlockAlgebra, CMatrix, Element, Tolerance};

/// Arrow index into [`FiniteGroupoid::arrow_ids`].
pub type ArrowId = usize;
/// Unit index into [`FiniteGroupoid::unit_ids`].
pub type UnitId = usize;

#[derive(Debug, Clone)]
pub struct FiniteGroupoid {
    unit_ids: Vec<String>,
    arrow_ids: Vec<String>,
    src: Vec<UnitId>,
    rng: Vec<UnitId>,
    /// Arrow index of each unit's identity arrow.
    unit_arrow: Vec<ArrowId>,
    /// Inverse of `unit_arrow`: `Some(x)` iff the arrow is the unit `x`.
    unit_of_arrow: Vec<Option<UnitId>>,
    compose: HashMap<(ArrowId, ArrowId), ArrowId>,
    inv: Vec<ArrowId>,
}

impl FiniteGroupoid {
    /// Assemble from raw data. Structural coherence (associativity, identity
    /// and inverse laws) is *not* enforced here; run [`validate`] for that.
    pub fn from_raw(
        unit_ids: Vec<String>,
        arrow_ids: Vec<String>,
        src: Vec<UnitId>,
        rng: Vec<UnitId>,
        compose: HashMap<(ArrowId, ArrowId), ArrowId>,
        inv: Vec<ArrowId>,
    ) -> Result<Self> {
        let n_units = unit_ids.len();
        let n_arrows = arrow_ids.len();
        if n_units == 0 {
            return Err(Error::InvalidGroupoid("no units".into()));
        }
        if src.len() != n_arrows || rng.len() != n_arrows || inv.len() != n_arrows {
            return Err(Error::InvalidGroupoid(
                "src/rng/inv length must match the arrow count".into(),
            ));
        }
        if src.iter().chain(&rng).any(|&u| u >= n_units) {
            return Err(Error::InvalidGroupoid("src/rng out of range".into()));
        }
        if inv.iter().any(|&a| a >= n_arrows) {
            return Err(Error::InvalidGroupoid("inv out of range".into()));
        }
        // units appear among the arrows under the same id
        let arrow_index: HashMap<&str, usize> = arrow_ids
            .iter()
            .enumerate()
            .map(|(i, id)| (id.as_str(), i))
            .collect();
        if arrow_index.len() != n_arrows {
            return Err(Error::InvalidGroupoid("duplicate arrow ids".into()));
        }
        let mut unit_arrow = Vec::with_capacity(n_units);
        let mut unit_of_arrow = vec![None; n_arrows];
        for (x, uid) in unit_ids.iter().enumerate() {
            let a = *arrow_index.get(uid.as_str()).ok_or_else(|| {
                Error::InvalidGroupoid(format!("unit {uid} has no identity arrow"))
            })?;
            unit_arrow.push(a);
            unit_of_arrow[a] = Some(x);
        }
        Ok(FiniteGroupoid {
            unit_ids,
            arrow_ids,
            src,
            rng,
            unit_arrow,
            unit_of_arrow,
            compose,
            inv,
        })
    }

    pub fn num_units(&self) -> usize {
        self.unit_ids.len()
    }

    pub fn num_arrows(&self) -> usize {
        self.arrow_ids.len()
    }

    pub fn unit_ids(&self) -> &[String] {
        &self.unit_ids
    }

    pub fn arrow_ids(&self) -> &[String] {
        &self.arrow_ids
    }

    pub fn src(&self, a: ArrowId) -> UnitId {
        self.src[a]
    }

    pub fn rng(&self, a: ArrowId) -> UnitId {
        self.rng[a]
    }

    pub fn inv(&self, a: ArrowId) -> ArrowId {
        self.inv[a]
    }

    pub fn unit_arrow(&self, x: UnitId) -> ArrowId {
        self.unit_arrow[x]
    }

    pub fn unit_of_arrow(&self, a: ArrowId) -> Option<UnitId> {
        self.unit_of_arrow[a]
    }

    pub fn is_unit_arrow(&self, a: ArrowId) -> bool {
        self.unit_of_arrow[a].is_some()
    }

    pub fn compose(&self, a: ArrowId, b: ArrowId) -> Option<ArrowId> {
        self.compose.get(&(a, b)).copied()
    }

    pub fn composable(&self, a: ArrowId, b: ArrowId) -> bool {
        self.src[a] == self.rng[b]
    }

    /// All pairs `(α, β)` with `src(α) = rng(β)`.
    pub fn composable_pairs(&self) -> Vec<(ArrowId, ArrowId)> {
        let n = self.num_arrows();
        let mut out = Vec::new();
        for a in 0..n {
            for b in 0..n {
                if self.composable(a, b) {
                    out.push((a, b));
                }
            }
        }
        out
    }

    /// Partition of the unit space into orbits (`x ~ y` iff some arrow joins them).
    pub fn orbits(&self) -> Vec<Vec<UnitId>> {
        let n = self.num_units();
        let mut parent: Vec<usize> = (0..n).collect();
        fn find(parent: &mut [usize], mut x: usize) -> usize {
            while parent[x] != x {
                parent[x] = parent[parent[x]];
                x = parent[x];
            }
            x
        }
        for a in 0..self.num_arrows() {
            let (s, r) = (self.src[a], self.rng[a]);
            let (rs, rr) = (find(&mut parent, s), find(&mut parent, r));
            if rs != rr {
                parent[rs] = rr;
            }
        }
        let mut groups: BTreeMap<usize, Vec<UnitId>> = BTreeMap::new();
        for x in 0..n {
            let root = find(&mut parent, x);
            groups.entry(root).or_default().push(x);
        }
        groups.into_values().collect()
    }

    /// True iff every arrow with equal source and range is a unit.
    pub fn is_principal(&self) -> bool {
        (0..self.num_arrows())
            .all(|a| self.src[a] != self.rng[a] || self.is_unit_arrow(a))
    }

    /// The source fibers `G_x = {γ : src(γ) = x}`, one per unit.
    pub fn source_fibers(&self) -> Vec<Vec<ArrowId>> {
        let mut fibers = vec![Vec::new(); self.num_units()];
        for a in 0..self.num_arrows() {
            fibers[self.src[a]].push(a);
        }
        fibers
    }
}

/// A normalized circle-valued 2-cocycle; absent pairs mean value 1.
#[derive(Debug, Clone, Default)]
pub struct TwoCocycle {
    values: HashMap<(ArrowId, ArrowId), Complex64>,
}

impl TwoCocycle {
    pub fn trivial() -> Self {
        TwoCocycle::default()
    }

    pub fn from_values(values: HashMap<(ArrowId, ArrowId), Complex64>) -> Self {
        TwoCocycle { values }
    }

    pub fn value(&self, a: ArrowId, b: ArrowId) -> Complex64 {
        self.values
            .get(&(a, b))
            .copied()
            .unwrap_or(Complex64::new(1.0, 0.0))
    }

    pub fn values(&self) -> &HashMap<(ArrowId, ArrowId), Complex64> {
        &self.values
    }

    /// The coboundary `σ(α,β) = c(α)c(β)/c(αβ)` of a unit-modulus function
    /// `c` with `c = 1` on units.
    pub fn coboundary(g: &FiniteGroupoid, c: &[Complex64]) -> Result<Self> {
        if c.len() != g.num_arrows() {
            return Err(Error::Invalid("coboundary data must cover all arrows".into()));
        }
        for (a, v) in c.iter().enumerate() {
            if (v.norm() - 1.0).abs() > 1e-9 {
                return Err(Error::Invalid(format!(
                    "coboundary value at arrow {a} is not unit modulus"
                )));
            }
            if g.is_unit_arrow(a) && (v - Complex64::new(1.0, 0.0)).norm() > 1e-12 {
                return Err(Error::Invalid(
                    "coboundary data must be 1 on unit arrows".into(),
                ));
            }
        }
        let mut values = HashMap::new();
        for (a, b) in g.composable_pairs() {
            if let Some(ab) = g.compose(a, b) {
                values.insert((a, b), c[a] * c[b] / c[ab]);
            }
        }
        Ok(TwoCocycle { values })
    }
}

/// Check all groupoid and cocycle axioms, returning human-readable
/// violations instead of failing on the first.
pub fn validate(g: &FiniteGroupoid, sigma: &TwoCocycle, tol: Tolerance) -> Vec<String> {
    let mut out = Vec::new();
    let name = |a: ArrowId| g.arrow_ids[a].clone();

    // units are idempotent loops
    for (x, &ua) in g.unit_arrow.iter().enumerate() {
        if g.src[ua] != x || g.rng[ua] != x {
            out.push(format!("unit arrow {} is not a loop at its unit", name(ua)));
        }
    }
    // composition defined exactly on composable pairs, with correct src/rng
    for a in 0..g.num_arrows() {
        for b in 0..g.num_arrows() {
            match (g.composable(a, b), g.compose(a, b)) {
                (true, None) => out.push(format!(
                    "composable pair ({}, {}) has no composition entry",
                    name(a),
                    name(b)
                )),
                (false, Some(_)) => out.push(format!(
                    "non-composable pair ({}, {}) has a composition entry",
                    name(a),
                    name(b)
                )),
                (true, Some(ab)) => {
                    if g.src[ab] != g.src[b] || g.rng[ab] != g.rng[a] {
                        out.push(format!(
                            "composition {}·{} = {} has wrong source or range",
                            name(a),
                            name(b),
                            name(ab)
                        ));
                    }
                }
                (false, None) => {}
            }
        }
    }
    if !out.is_empty() {
        // associativity and inverses are meaningless if composition is broken
        return out;
    }
    // identity laws
    for a in 0..g.num_arrows() {
        let r = g.unit_arrow[g.rng[a]];
        let s = g.unit_arrow[g.src[a]];
        if g.compose(r, a) != Some(a) {
            out.push(format!("range unit does not act as identity on {}", name(a)));
        }
        if g.compose(a, s) != Some(a) {
            out.push(format!("source unit does not act as identity on {}", name(a)));
        }
    }
    // inverses
    for a in 0..g.num_arrows() {
        let ai = g.inv[a];
        if g.src[ai] != g.rng[a] || g.rng[ai] != g.src[a] {
            out.push(format!("inverse of {} has wrong source or range", name(a)));
            continue;
        }
        if g.compose(a, ai) != Some(g.unit_arrow[g.rng[a]]) {
            out.push(format!("{}·{}⁻¹ is not the range unit", name(a), name(a)));
        }
        if g.compose(ai, a) != Some(g.unit_arrow[g.src[a]]) {
            out.push(format!("{}⁻¹·{} is not the source unit", name(a), name(a)));
        }
    }
    // associativity on composable triples
    for a in 0..g.num_arrows() {
        for b in 0..g.num_arrows() {
            if !g.composable(a, b) {
                continue;
            }
            for c in 0..g.num_arrows() {
                if !g.composable(b, c) {
                    continue;
                }
                let left = g.compose(a, b).and_then(|ab| g.compose(ab, c));
                let right = g.compose(b, c).and_then(|bc| g.compose(a, bc));
                if left != right || left.is_none() {
                    out.push(format!(
                        "associativity fails on ({}, {}, {})",
                        name(a),
                        name(b),
                        name(c)
                    ));
                }
            }
        }
    }
    // cocycle: unit modulus, normalization, cocycle identity
    for ((a, b), v) in sigma.values() {
        if *a >= g.num_arrows() || *b >= g.num_arrows() {
            out.push(format!("cocycle entry ({a}, {b}) out of range"));
            continue;
        }
        if !g.composable(*a, *b) {
            out.push(format!(
                "cocycle defined on non-composable pair ({}, {})",
                name(*a),
                name(*b)
            ));
        }
        if (v.norm() - 1.0).abs() > tol.eps {
            out.push(format!(
                "cocycle value on ({}, {}) is not unit modulus",
                name(*a),
                name(*b)
            ));
        }
    }
    for a in 0..g.num_arrows() {
        let r = g.unit_arrow[g.rng[a]];
        let s = g.unit_arrow[g.src[a]];
        if (sigma.value(r, a) - Complex64::new(1.0, 0.0)).norm() > tol.eps
            || (sigma.value(a, s) - Complex64::new(1.0, 0.0)).norm() > tol.eps
        {
            out.push(format!("cocycle is not normalized at {}", name(a)));
        }
    }
    for a in 0..g.num_arrows() {
        for b in 0..g.num_arrows() {
            if !g.composable(a, b) {
                continue;
            }
            let ab = g.compose(a, b).unwrap();
            for c in 0..g.num_arrows() {
                if !g.composable(b, c) {
                    continue;
                }
                let bc = g.compose(b, c).unwrap();
                let lhs = sigma.value(a, b) * sigma.value(ab, c);
                let rhs = sigma.value(a, bc) * sigma.value(b, c);
                if (lhs - rhs).norm() > tol.eps {
                    out.push(format!(
                        "cocycle identity fails on ({}, {}, {})",
                        name(a),
                        name(b),
                        name(c)
                    ));
                }
            }
        }
    }
    out
}

/// An element of the twisted convolution algebra: one coefficient per arrow.
#[derive(Debug, Clone, PartialEq)]
pub struct GroupoidElement {
    coeffs: Vec<Complex64>,
}

impl GroupoidElement {
    pub fn zero(g: &FiniteGroupoid) -> Self {
        GroupoidElement {
            coeffs: vec![Complex64::new(0.0, 0.0); g.num_arrows()],
        }
    }

    pub fn delta(g: &FiniteGroupoid, a: ArrowId) -> Self {
        let mut e = Self::zero(g);
        e.coeffs[a] = Complex64::new(1.0, 0.0);
        e
    }

    pub fn from_coeffs(coeffs: Vec<Complex64>) -> Self {
        GroupoidElement { coeffs }
    }

    pub fn coeffs(&self) -> &[Complex64] {
        &self.coeffs
    }

    pub fn coeff(&self, a: ArrowId) -> Complex64 {
        self.coeffs[a]
    }

    pub fn add(&self, other: &GroupoidElement) -> GroupoidElement {
        GroupoidElement {
            coeffs: self
                .coeffs
                .iter()
                .zip(&other.coeffs)
                .map(|(a, b)| a + b)
                .collect(),
        }
    }

    pub fn scale(&self, c: Complex64) -> GroupoidElement {
        GroupoidElement {
            coeffs: self.coeffs.iter().map(|z| z * c).collect(),
        }
    }

    pub fn sup_norm_on_units(&self, g: &FiniteGroupoid) -> f64 {
        g.unit_arrow
            .iter()
            .map(|&a| self.coeffs[a].norm())
            .fold(0.0, f64::max)
    }
}

/// Twisted convolution `(f*g)(γ) = Σ_{αβ=γ} σ(α,β) f(α) g(β)`.
pub fn convolve(
    g: &FiniteGroupoid,
    sigma: &TwoCocycle,
    f: &GroupoidElement,
    h: &GroupoidElement,
) -> GroupoidElement {
    let mut out = GroupoidElement::zero(g);
    for (a, b) in g.composable_pairs() {
        if let Some(ab) = g.compose(a, b) {
            out.coeffs[ab] += sigma.value(a, b) * f.coeffs[a] * h.coeffs[b];
        }
    }
    out
}

/// Twisted involution `f♯(γ) = conj(σ(γ,γ⁻¹)) · conj(f(γ⁻¹))`.
pub fn involute(g: &FiniteGroupoid, sigma: &TwoCocycle, f: &GroupoidElement) -> GroupoidElement {
    let mut out = GroupoidElement::zero(g);
    for a in 0..g.num_arrows() {
        out.coeffs[a] = sigma.value(a, g.inv(a)).conj() * f.coeffs[g.inv(a)].conj();
    }
    out
}

/// The left regular representation `λ` into one matrix block per unit.
///
/// Block `x` acts on the source fiber `G_x`; the matrix of `λ(f)` has
/// `(γ, β)`-entry `Σ_{αβ=γ} σ(α,β) f(α)`.
#[derive(Debug, Clone)]
pub struct RegularRepresentation {
    algebra: BlockAlgebra,
    fibers: Vec<Vec<ArrowId>>,
    /// Position of each arrow in its source fiber.
    position: Vec<usize>,
}

impl RegularRepresentation {
    pub fn new(g: &FiniteGroupoid) -> Result<Self> {
        let fibers = g.source_fibers();
        if fibers.iter().any(|f| f.is_empty()) {
            return Err(Error::InvalidGroupoid(
                "every unit needs at least its identity arrow".into(),
            ));
        }
        let algebra = BlockAlgebra::new(fibers.iter().map(|f| f.len()).collect())?;
        let mut position = vec![0usize; g.num_arrows()];
        for fiber in &fibers {
            for (i, &a) in fiber.iter().enumerate() {
                position[a] = i;
            }
        }
        Ok(RegularRepresentation {
            algebra,
            fibers,
            position,
        })
    }

    pub fn algebra(&self) -> &BlockAlgebra {
        &self.algebra
    }

    pub fn fibers(&self) -> &[Vec<ArrowId>] {
        &self.fibers
    }

    pub fn represent(
        &self,
        g: &FiniteGroupoid,
        sigma: &TwoCocycle,
        f: &GroupoidElement,
    ) -> Element {
        let mut blocks: Vec<CMatrix> = self
            .fibers
            .iter()
            .map(|fib| CMatrix::zeros(fib.len(), fib.len()))
            .collect();
        for (a, b) in g.composable_pairs() {
            if let Some(ab) = g.compose(a, b) {
                let x = g.src(b);
                blocks[x][(self.position[ab], self.position[b])] +=
                    sigma.value(a, b) * f.coeffs[a];
            }
        }
        Element::new(self.algebra.clone(), blocks).expect("matching shapes")
    }

    /// The reduced norm `‖f‖_λ`.
    pub fn norm(&self, g: &FiniteGroupoid, sigma: &TwoCocycle, f: &GroupoidElement) -> f64 {
        self.represent(g, sigma, f).op_norm()
    }
}

/// A real weight per unit; invariant when constant on orbits.
#[derive(Debug, Clone, PartialEq)]
pub struct InvariantMeasure {
    weights: Vec<f64>,
}

impl InvariantMeasure {
    pub fn new(g: &FiniteGroupoid, weights: Vec<f64>, tol: Tolerance) -> Result<Self> {
        if weights.len() != g.num_units() {
            return Err(Error::Invalid("one weight per unit required".into()));
        }
        for orbit in g.orbits() {
            let w0 = weights[orbit[0]];
            for &x in &orbit[1..] {
                if (weights[x] - w0).abs() > tol.eps {
                    return Err(Error::NotInvariant(
                        g.unit_ids[orbit[0]].clone(),
                        g.unit_ids[x].clone(),
                    ));
                }
            }
        }
        Ok(InvariantMeasure { weights })
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn is_positive(&self) -> bool {
        self.weights.iter().all(|&w| w >= 0.0)
    }
}

/// Basis of the invariant-measure space: one indicator per orbit.
pub fn invariant_measures(g: &FiniteGroupoid) -> Vec<InvariantMeasure> {
    g.orbits()
        .iter()
        .map(|orbit| {
            let mut w = vec![0.0; g.num_units()];
            for &x in orbit {
                w[x] = 1.0;
            }
            InvariantMeasure { weights: w }
        })
        .collect()
}

/// `τ_μ(f) = Σ_x f(x) μ(x)`, summing over unit arrows.
pub fn tau_mu(g: &FiniteGroupoid, mu: &InvariantMeasure, f: &GroupoidElement) -> Complex64 {
    g.unit_arrow
        .iter()
        .zip(&mu.weights)
        .map(|(&a, &w)| f.coeffs[a] * Complex64::new(w, 0.0))
        .sum()
}

/// A linear functional on the convolution algebra, stored by its values on
/// the arrow deltas.
#[derive(Debug, Clone, PartialEq)]
pub struct GroupoidTrace {
    values: Vec<Complex64>,
}

impl GroupoidTrace {
    pub fn from_values(values: Vec<Complex64>) -> Self {
        GroupoidTrace { values }
    }

    pub fn values(&self) -> &[Complex64] {
        &self.values
    }

    pub fn evaluate(&self, f: &GroupoidElement) -> Complex64 {
        self.values
            .iter()
            .zip(f.coeffs())
            .map(|(t, c)| t * c)
            .sum()
    }

    /// Restriction to the unit space; real parts of the unit-arrow values.
    ///
    /// For a self-adjoint functional these values are real; the imaginary
    /// residual is returned alongside so callers can assert it vanishes.
    pub fn restrict_to_units(&self, g: &FiniteGroupoid) -> (Vec<f64>, f64) {
        let mut weights = Vec::with_capacity(g.num_units());
        let mut imag: f64 = 0.0;
        for &a in &g.unit_arrow {
            weights.push(self.values[a].re);
            imag = imag.max(self.values[a].im.abs());
        }
        (weights, imag)
    }

    /// Positivity via the Gram matrix `M[β,α] = τ(δ_β♯ · δ_α)` being PSD.
    ///
    /// `δ_β♯ · δ_α` is the single term
    /// `conj(σ(β,β⁻¹)) σ(β⁻¹,α) δ_{β⁻¹α}` when `rng(β) = rng(α)`, so the
    /// Gram matrix fills in one lookup per entry.
    pub fn is_positive(&self, g: &FiniteGroupoid, sigma: &TwoCocycle, tol: Tolerance) -> bool {
        let n = g.num_arrows();
        let mut m = CMatrix::zeros(n, n);
        for b in 0..n {
            let bi = g.inv(b);
            let w = sigma.value(b, bi).conj();
            for a in 0..n {
                if let Some(prod) = g.compose(bi, a) {
                    m[(b, a)] = w * sigma.value(bi, a) * self.values[prod];
                }
            }
        }
        let herm_res = (&m - m.adjoint()).norm();
        if herm_res > tol.eps * (1.0 + m.norm()) {
            return false;
        }
        crate::matalg::hermitian_part(&m)
            .symmetric_eigen()
            .eigenvalues
            .iter()
            .all(|&ev| ev >= -tol.eps * (1.0 + m.norm()))
    }

    /// Maximal violation of the traciality and self-adjointness constraints.
    pub fn constraint_residual(&self, g: &FiniteGroupoid, sigma: &TwoCocycle) -> f64 {
        let mut res: f64 = 0.0;
        for a in 0..g.num_arrows() {
            for b in 0..g.num_arrows() {
                let lhs = g
                    .compose(a, b)
                    .map(|ab| sigma.value(a, b) * self.values[ab])
                    .unwrap_or_default();
                let rhs = g
                    .compose(b, a)
                    .map(|ba| sigma.value(b, a) * self.values[ba])
                    .unwrap_or_default();
                res = res.max((lhs - rhs).norm());
            }
            let ai = g.inv(a);
            let sa = sigma.value(a, ai).conj() * self.values[ai] - self.values[a].conj();
            res = res.max(sa.norm());
        }
        res
    }
}

/// Basis of the real vector space of self-adjoint tracial functionals on
/// the twisted convolution algebra, found as the nullspace of the
/// traciality constraints `τ(δ_α δ_β) = τ(δ_β δ_α)` together with
/// self-adjointness `τ(f♯) = conj(τ(f))`.
pub fn all_traces(g: &FiniteGroupoid, sigma: &TwoCocycle) -> Vec<GroupoidTrace> {
    let n = g.num_arrows();
    // unknowns: (Re t(0), Im t(0), ..., Re t(n-1), Im t(n-1))
    let mut rows: Vec<Vec<f64>> = Vec::new();
    fn push_complex_eq(rows: &mut Vec<Vec<f64>>, n: usize, terms: &[(ArrowId, Complex64)]) {
        let mut re_row = vec![0.0; 2 * n];
        let mut im_row = vec![0.0; 2 * n];
        for &(arrow, c) in terms {
            re_row[2 * arrow] += c.re;
            re_row[2 * arrow + 1] -= c.im;
            im_row[2 * arrow] += c.im;
            im_row[2 * arrow + 1] += c.re;
        }
        rows.push(re_row);
        rows.push(im_row);
    }
    for a in 0..n {
        for b in 0..n {
            let mut terms = Vec::new();
            if let Some(ab) = g.compose(a, b) {
                terms.push((ab, sigma.value(a, b)));
            }
            if let Some(ba) = g.compose(b, a) {
                terms.push((ba, -sigma.value(b, a)));
            }
            if !terms.is_empty() {
                push_complex_eq(&mut rows, n, &terms);
            }
        }
        // conj(σ(a, a⁻¹))·t(a⁻¹) − conj(t(a)) = 0; conjugation is real-linear
        let ai = g.inv(a);
        let w = sigma.value(a, ai).conj();
        let mut re_row = vec![0.0; 2 * n];
        let mut im_row = vec![0.0; 2 * n];
        re_row[2 * ai] += w.re;
        re_row[2 * ai + 1] -= w.im;
        re_row[2 * a] -= 1.0;
        im_row[2 * ai] += w.im;
        im_row[2 * ai + 1] += w.re;
        im_row[2 * a + 1] += 1.0;
        rows.push(re_row);
        rows.push(im_row);
    }
    let m = DMatrix::from_fn(rows.len(), 2 * n, |i, j| rows[i][j]);
    let svd = m.svd(false, true);
    let v_t = svd.v_t.expect("requested");
    let smax = svd.singular_values.iter().copied().fold(0.0, f64::max);
    let cutoff = 1e-9 * smax.max(1.0);
    let mut basis = Vec::new();
    for i in 0..(2 * n) {
        let sv = if i < svd.singular_values.len() {
            svd.singular_values[i]
        } else {
            0.0
        };
        if sv <= cutoff {
            let row = v_t.row(i);
            let values = (0..n)
                .map(|a| Complex64::new(row[2 * a], row[2 * a + 1]))
                .collect();
            basis.push(GroupoidTrace { values });
        }
    }
    basis
}

/// Outcome of checking the measure/trace correspondence on one groupoid.
#[derive(Debug, Clone)]
pub struct IsoReport {
    pub principal: bool,
    pub trace_dim: usize,
    pub measure_dim: usize,
    /// Holds for every groupoid: unit restrictions of traces are constant
    /// on orbits.
    pub restrictions_invariant: bool,
    pub max_restriction_residual: f64,
    /// Principal case only: τ ↦ μ ↦ τ_μ returns τ on the trace basis.
    pub round_trip_ok: bool,
    pub max_round_trip_residual: f64,
    /// Positive cones correspond: orbit-indicator measures induce positive
    /// traces, and positive combinations restrict to nonnegative measures.
    pub cones_match: bool,
}

impl IsoReport {
    pub fn holds(&self) -> bool {
        self.restrictions_invariant
            && (!self.principal
                || (self.trace_dim == self.measure_dim && self.round_trip_ok && self.cones_match))
    }
}

/// Brute-force verification of the trace/measure correspondence.
pub fn measure_trace_iso_check(
    g: &FiniteGroupoid,
    sigma: &TwoCocycle,
    tol: Tolerance,
) -> IsoReport {
    let principal = g.is_principal();
    let traces = all_traces(g, sigma);
    let measures = invariant_measures(g);
    let orbits = g.orbits();

    // restriction of every basis trace is constant on orbits
    let mut restrictions_invariant = true;
    let mut max_restriction_residual: f64 = 0.0;
    for t in &traces {
        let (weights, imag) = t.restrict_to_units(g);
        max_restriction_residual = max_restriction_residual.max(imag);
        for orbit in &orbits {
            let w0 = weights[orbit[0]];
            for &x in &orbit[1..] {
                let dev = (weights[x] - w0).abs();
                max_restriction_residual = max_restriction_residual.max(dev);
                if dev > tol.eps {
                    restrictions_invariant = false;
                }
            }
        }
        if imag > tol.eps {
            restrictions_invariant = false;
        }
    }

    let mut round_trip_ok = true;
    let mut max_round_trip_residual: f64 = 0.0;
    let mut cones_match = true;
    if principal {
        // τ ↦ μ ↦ τ_μ must return τ: traces are supported on units
        for t in &traces {
            let (weights, _) = t.restrict_to_units(g);
            let mut rebuilt = vec![Complex64::new(0.0, 0.0); g.num_arrows()];
            for (x, &a) in g.unit_arrow.iter().enumerate() {
                rebuilt[x] = Complex64::new(weights[x], 0.0);
                let _ = a;
            }
            let mut rebuilt_full = vec![Complex64::new(0.0, 0.0); g.num_arrows()];
            for (x, &a) in g.unit_arrow.iter().enumerate() {
                rebuilt_full[a] = Complex64::new(weights[x], 0.0);
            }
            let res = t
                .values
                .iter()
                .zip(&rebuilt_full)
                .map(|(a, b)| (a - b).norm())
                .fold(0.0, f64::max);
            max_round_trip_residual = max_round_trip_residual.max(res);
            if res > tol.eps {
                round_trip_ok = false;
            }
        }
        // orbit indicators induce genuine positive traces
        for mu in &measures {
            let mut values = vec![Complex64::new(0.0, 0.0); g.num_arrows()];
            for (x, &a) in g.unit_arrow.iter().enumerate() {
                values[a] = Complex64::new(mu.weights()[x], 0.0);
            }
            let t = GroupoidTrace { values };
            let res = t.constraint_residual(g, sigma);
            max_round_trip_residual = max_round_trip_residual.max(res);
            if res > tol.eps || !t.is_positive(g, sigma, tol) {
                cones_match = false;
            }
        }
        // positive traces restrict to nonnegative measures
        for t in &traces {
            if t.is_positive(g, sigma, tol) {
                let (weights, _) = t.restrict_to_units(g);
                if weights.iter().any(|&w| w < -tol.eps) {
                    cones_match = false;
                }
            }
        }
    }

    IsoReport {
        principal,
        trace_dim: traces.len(),
        measure_dim: measures.len(),
        restrictions_invariant,
        max_restriction_residual,
        round_trip_ok,
        max_round_trip_residual,
        cones_match,
    }
}

// ---------------------------------------------------------------------------
// Builders for standard examples.
// ---------------------------------------------------------------------------

/// The groupoid with `n` units and only identity arrows.
pub fn trivial_groupoid(n: usize) -> FiniteGroupoid {
    let unit_ids: Vec<String> = (0..n).map(|i| format!("u{i}")).collect();
    let mut compose = HashMap::new();
    for i in 0..n {
        compose.insert((i, i), i);
    }
    FiniteGroupoid::from_raw(
        unit_ids.clone(),
        unit_ids,
        (0..n).collect(),
        (0..n).collect(),
        compose,
        (0..n).collect(),
    )
    .expect("coherent by construction")
}

/// The pair groupoid on `n` points: one arrow `(x, y)` from `y` to `x`.
pub fn pair_groupoid(n: usize) -> FiniteGroupoid {
    equivalence_groupoid(&[(0..n).collect()])
}

/// The groupoid of an equivalence relation given as a partition of
/// `0..num_units` (classes listed once each, covering every unit).
pub fn equivalence_groupoid(classes: &[Vec<usize>]) -> FiniteGroupoid {
    let num_units: usize = classes.iter().map(|c| c.len()).sum();
    let unit_ids: Vec<String> = (0..num_units).map(|i| format!("u{i}")).collect();
    let mut arrow_ids = Vec::new();
    let mut src = Vec::new();
    let mut rng = Vec::new();
    let mut index: HashMap<(usize, usize), usize> = HashMap::new();
    for class in classes {
        for &x in class {
            for &y in class {
                let id = if x == y {
                    format!("u{x}")
                } else {
                    format!("a{x}_{y}")
                };
                index.insert((x, y), arrow_ids.len());
                arrow_ids.push(id);
                // arrow (x, y): y -> x
                src.push(y);
                rng.push(x);
            }
        }
    }
    let mut compose = HashMap::new();
    let mut inv = vec![0; arrow_ids.len()];
    for (&(x, y), &a) in &index {
        inv[a] = index[&(y, x)];
        for (&(p, q), &b) in &index {
            // (x,y)·(p,q) defined when y = p, giving (x, q)
            if y == p {
                if let Some(&ab) = index.get(&(x, q)) {
                    compose.insert((a, b), ab);
                }
            }
        }
    }
    FiniteGroupoid::from_raw(unit_ids, arrow_ids, src, rng, compose, inv)
        .expect("coherent by construction")
}

/// A one-unit groupoid from a group multiplication table (`table[i][j]` is
/// `g_i g_j`, with index 0 the neutral element).
pub fn group_groupoid(table: &[Vec<usize>]) -> Result<FiniteGroupoid> {
    let n = table.len();
    if n == 0 || table.iter().any(|row| row.len() != n) {
        return Err(Error::InvalidGroupoid("malformed multiplication table".into()));
    }
    let arrow_ids: Vec<String> = (0..n)
        .map(|i| if i == 0 { "u0".into() } else { format!("g{i}") })
        .collect();
    let mut compose = HashMap::new();
    let mut inv = vec![usize::MAX; n];
    for (i, row) in table.iter().enumerate() {
        for (j, &v) in row.iter().enumerate() {
            compose.insert((i, j), v);
            if v == 0 {
                inv[i] = j;
            }
        }
    }
    if inv.contains(&usize::MAX) {
        return Err(Error::InvalidGroupoid("table has no inverses".into()));
    }
    FiniteGroupoid::from_raw(
        vec!["u0".into()],
        arrow_ids,
        vec![0; n],
        vec![0; n],
        compose,
        inv,
    )
}

/// Multiplication table of the cyclic group of order `n`.
pub fn cyclic_table(n: usize) -> Vec<Vec<usize>> {
    (0..n).map(|i| (0..n).map(|j| (i + j) % n).collect()).collect()
}

/// Multiplication table of the symmetric group S₃ (six permutations of
/// three letters, index 0 the identity).
pub fn s3_table() -> Vec<Vec<usize>> {
    let perms: [[usize; 3]; 6] = [
        [0, 1, 2],
        [1, 2, 0],
        [2, 0, 1],
        [0, 2, 1],
        [2, 1, 0],
        [1, 0, 2],
    ];
    let compose = |p: &[usize; 3], q: &[usize; 3]| [p[q[0]], p[q[1]], p[q[2]]];
    (0..6)
        .map(|i| {
            (0..6)
                .map(|j| {
                    let prod = compose(&perms[i], &perms[j]);
                    perms.iter().position(|p| *p == prod).unwrap()
                })
                .collect()
        })
        .collect()
}

/// Disjoint union, relabelling the second summand's units and arrows.
pub fn disjoint_union(a: &FiniteGroupoid, b: &FiniteGroupoid) -> FiniteGroupoid {
    let unit_ids: Vec<String> = a
        .unit_ids
        .iter()
        .map(|s| format!("L.{s}"))
        .chain(b.unit_ids.iter().map(|s| format!("R.{s}")))
        .collect();
    let arrow_ids: Vec<String> = a
        .arrow_ids
        .iter()
        .map(|s| format!("L.{s}"))
        .chain(b.arrow_ids.iter().map(|s| format!("R.{s}")))
        .collect();
    let (un, an) = (a.num_units(), a.num_arrows());
    let src = a
        .src
        .iter()
        .copied()
        .chain(b.src.iter().map(|&u| u + un))
        .collect();
    let rng = a
        .rng
        .iter()
        .copied()
        .chain(b.rng.iter().map(|&u| u + un))
        .collect();
    let inv = a
        .inv
        .iter()
        .copied()
        .chain(b.inv.iter().map(|&x| x + an))
        .collect();
    let mut compose = a.compose.clone();
    for (&(p, q), &r) in &b.compose {
        compose.insert((p + an, q + an), r + an);
    }
    FiniteGroupoid::from_raw(unit_ids, arrow_ids, src, rng, compose, inv)
        .expect("coherent by construction")
}

/// Extend a cocycle on the left summand of a disjoint union (the right
/// summand gets the trivial twist).
pub fn extend_cocycle_left(sigma: &TwoCocycle) -> TwoCocycle {
    sigma.clone()
}
