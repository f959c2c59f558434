//! Restriction of root-lattice classes to the anti-canonical curve, the
//! ρ-invariance conditions, fixed components, the χ-injectivity check and
//! recovery of the blown-up points from restriction data.

use std::collections::BTreeMap;

use thiserror::Error;

use crate::abelian::{solve_group_system, GroupElement, GroupSolution, SigmaModel};
use crate::folding::{outer_automorphism, FoldCase, FoldedType, FoldingError, OuterAutomorphism};
use crate::lattice::{DivisorClass, IntersectionLattice, Model};
use crate::linalg::IntMatrix;
use crate::rootsys::{simple_reflections_from_cartan, standard_simple_system, WeylElement};

/// Elementary actions allowed in the exhaustive checks.
pub const ACTION_BUDGET: u64 = 100_000_000;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ModuliError {
    #[error("class {0} is not orthogonal to K")]
    NotDegreeZero(String),
    #[error("expected {expected} points, got {got}")]
    PointCount { expected: usize, got: usize },
    #[error("point assignment violates the {0} constraints")]
    ConstraintViolated(String),
    #[error("exhaustive check needs {0} actions, over the budget")]
    BudgetExceeded(u64),
    #[error(transparent)]
    Folding(#[from] FoldingError),
}

impl From<crate::rootsys::RootSystemError> for ModuliError {
    fn from(e: crate::rootsys::RootSystemError) -> Self {
        ModuliError::Folding(e.into())
    }
}

fn point_count(case: FoldedType) -> usize {
    case.lattice().points()
}

/// Images `x1 … xn` of the exceptional curves, with `0` the identity of `Σ`.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct PointAssignment {
    pub model: Model,
    pub points: Vec<GroupElement>,
    pub sigma: SigmaModel,
    pub tag: Option<FoldedType>,
}

impl PointAssignment {
    pub fn new(model: Model, sigma: SigmaModel, points: Vec<GroupElement>) -> Self {
        let points = points.into_iter().map(|x| sigma.element(x.a, x.b)).collect();
        Self {
            model,
            points,
            sigma,
            tag: None,
        }
    }

    /// An assignment tagged with a case; rejected unless it meets that case's constraints.
    pub fn tagged(case: FoldedType, sigma: SigmaModel, points: Vec<GroupElement>) -> Result<Self, ModuliError> {
        let l = case.lattice();
        if points.len() != l.points() {
            return Err(ModuliError::PointCount {
                expected: l.points(),
                got: points.len(),
            });
        }
        let mut pa = Self::new(l.model(), sigma, points);
        if !pa.satisfies(case) {
            return Err(ModuliError::ConstraintViolated(format!("{case:?}")));
        }
        pa.tag = Some(case);
        Ok(pa)
    }

    /// Tagged assignment built from the free parameters of the case.
    pub fn from_parameters(case: FoldedType, sigma: SigmaModel, params: &[GroupElement]) -> Self {
        let e = parametrization(case);
        let points = (0..e.rows()).map(|i| sigma.combine(e.row(i), params)).collect();
        Self::tagged(case, sigma, points).expect("parametrized assignments meet their constraints")
    }

    /// The case constraints: B ⇒ x1 = 0; C ⇒ x_{2n+1−i} = −x_i; G2 ⇒ x1 = 0, x4 = x2 + x3;
    /// F4 ⇒ x1 + x6 = x2 + x5 = x3 + x4.
    pub fn satisfies(&self, case: FoldedType) -> bool {
        let s = &self.sigma;
        let x = &self.points;
        if x.len() != point_count(case) {
            return false;
        }
        match case {
            FoldedType::B(_) => x[0].is_zero(),
            FoldedType::C(n) => (0..n).all(|i| s.add(x[i], x[2 * n - 1 - i]).is_zero()),
            FoldedType::G2 => x[0].is_zero() && x[3] == s.add(x[1], x[2]),
            FoldedType::F4 => {
                let c = s.add(x[0], x[5]);
                s.add(x[1], x[4]) == c && s.add(x[2], x[3]) == c
            }
        }
    }

    /// `Σ x_i = 0`, the normalization used for the A_{2n−1} case.
    pub fn sums_to_zero(&self) -> bool {
        self.sigma.sum(&self.points).is_zero()
    }

    /// `u(D)` for a class orthogonal to `K`: `s, f, h ↦ 0` and `l_i ↦ x_i`.
    pub fn restrict(&self, lattice: &IntersectionLattice, d: &DivisorClass) -> Result<GroupElement, ModuliError> {
        if lattice.model() != self.model || lattice.points() != self.points.len() {
            return Err(ModuliError::PointCount {
                expected: lattice.points(),
                got: self.points.len(),
            });
        }
        if lattice.dot(d, &lattice.canonical_class()) != 0 {
            return Err(ModuliError::NotDegreeZero(lattice.format_class(d)));
        }
        Ok(self.sigma.combine(lattice.point_coords(d), &self.points))
    }
}

/// `u` on a chosen basis, extended linearly.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct RestrictionHom {
    pub domain: Vec<DivisorClass>,
    pub images: Vec<GroupElement>,
    pub sigma: SigmaModel,
}

impl RestrictionHom {
    /// Value on `Σ c_i · domain[i]`.
    pub fn evaluate(&self, coeffs: &[i64]) -> GroupElement {
        self.sigma.combine(coeffs, &self.images)
    }
}

pub fn restriction_hom(
    pa: &PointAssignment,
    lattice: &IntersectionLattice,
    basis: &[DivisorClass],
) -> Result<RestrictionHom, ModuliError> {
    let images = basis
        .iter()
        .map(|d| pa.restrict(lattice, d))
        .collect::<Result<Vec<_>, _>>()?;
    Ok(RestrictionHom {
        domain: basis.to_vec(),
        images,
        sigma: pa.sigma,
    })
}

/// Both evaluations of `ρ·u = u`.
#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub struct InvarianceCheck {
    pub closed_form: bool,
    pub direct: bool,
}

impl InvarianceCheck {
    pub fn agree(&self) -> bool {
        self.closed_form == self.direct
    }

    pub fn holds(&self) -> bool {
        self.closed_form && self.direct
    }
}

/// The closed-form condition for each case.
///
/// B: `2x1 = 0`. G2: `2x1 = 0` and `x1 + x4 = x2 + x3`. F4: `x1 + x6 = x2 + x5 = x3 + x4`.
/// C: every pair sum `c = x_i + x_{2n+1−i}` is the same and `n·c = 0`; the
/// points are taken with `Σ x_i = 0`, under which the second part follows from the first.
pub fn closed_form_invariance(case: FoldedType, pa: &PointAssignment) -> bool {
    let s = &pa.sigma;
    let x = &pa.points;
    match case {
        FoldedType::B(_) => s.scale(2, x[0]).is_zero(),
        FoldedType::G2 => s.scale(2, x[0]).is_zero() && s.add(x[0], x[3]) == s.add(x[1], x[2]),
        FoldedType::F4 => {
            let c = s.add(x[0], x[5]);
            s.add(x[1], x[4]) == c && s.add(x[2], x[3]) == c
        }
        FoldedType::C(n) => {
            let c = s.add(x[0], x[2 * n - 1]);
            (0..n).all(|i| s.add(x[i], x[2 * n - 1 - i]) == c) && s.scale(n as i64, c).is_zero()
        }
    }
}

/// Compares `u∘ρ` with `u` on the simple system of `G′`.
pub fn direct_invariance(rho: &OuterAutomorphism, lattice: &IntersectionLattice, pa: &PointAssignment) -> bool {
    rho.simple.roots.iter().all(|a| {
        let image = rho.apply_on_roots(a).expect("simple roots lie in the root lattice");
        pa.restrict(lattice, &image).expect("roots are orthogonal to K")
            == pa.restrict(lattice, a).expect("roots are orthogonal to K")
    })
}

pub fn invariance_condition(case: FoldedType, pa: &PointAssignment) -> Result<InvarianceCheck, ModuliError> {
    let l = case.lattice();
    if pa.points.len() != l.points() {
        return Err(ModuliError::PointCount {
            expected: l.points(),
            got: pa.points.len(),
        });
    }
    let rho = outer_automorphism(case.fold_case(), &l)?;
    Ok(InvarianceCheck {
        closed_form: closed_form_invariance(case, pa),
        direct: direct_invariance(&rho, &l, pa),
    })
}

/// Exhaustive comparison of the two evaluations over every assignment in
/// `Σ^n` (with `Σ x_i = 0` in the C case). Returns the number checked and the
/// first disagreement.
pub fn invariance_agreement(case: FoldedType, sigma: SigmaModel) -> Result<(u64, Option<PointAssignment>), ModuliError> {
    let l = case.lattice();
    let rho = outer_automorphism(case.fold_case(), &l)?;
    let n = l.points();
    let total = (sigma.order() as u64).saturating_pow(n as u32);
    if total.saturating_mul(n as u64) > ACTION_BUDGET {
        return Err(ModuliError::BudgetExceeded(total));
    }
    let mut checked = 0;
    for points in sigma.tuples(n) {
        let pa = PointAssignment::new(l.model(), sigma, points);
        if matches!(case, FoldedType::C(_)) && !pa.sums_to_zero() {
            continue;
        }
        checked += 1;
        if closed_form_invariance(case, &pa) != direct_invariance(&rho, &l, &pa) {
            return Ok((checked, Some(pa)));
        }
    }
    Ok((checked, None))
}

/// The torsion datum naming the fixed component of an invariant assignment:
/// `x1` for B and G2, the common pair sum for C, and `0` for F4.
pub fn component_label(case: FoldedType, pa: &PointAssignment) -> GroupElement {
    match case {
        FoldedType::B(_) | FoldedType::G2 => pa.points[0],
        FoldedType::C(n) => pa.sigma.add(pa.points[0], pa.points[2 * n - 1]),
        FoldedType::F4 => GroupElement::ZERO,
    }
}

#[derive(Clone, PartialEq, Eq, Debug)]
pub struct FixedComponents {
    /// Label and number of invariant assignments carrying it.
    pub labels: Vec<(GroupElement, u64)>,
    pub identity_label: GroupElement,
    /// Set when `Σ` has less torsion than the case calls for.
    pub warning: Option<String>,
}

impl FixedComponents {
    pub fn count(&self) -> usize {
        self.labels.len()
    }
}

/// Torsion order the labels live in.
fn label_torsion(case: FoldedType) -> Option<i64> {
    match case {
        FoldedType::B(_) | FoldedType::G2 => Some(2),
        FoldedType::C(n) => Some(n as i64),
        FoldedType::F4 => None,
    }
}

pub fn fixed_components(case: FoldedType, sigma: SigmaModel) -> Result<FixedComponents, ModuliError> {
    let l = case.lattice();
    let rho = outer_automorphism(case.fold_case(), &l)?;
    let n = l.points();
    let total = (sigma.order() as u64).saturating_pow(n as u32);
    if total.saturating_mul(n as u64) > ACTION_BUDGET {
        return Err(ModuliError::BudgetExceeded(total));
    }
    let mut labels: BTreeMap<GroupElement, u64> = BTreeMap::new();
    for points in sigma.tuples(n) {
        let pa = PointAssignment::new(l.model(), sigma, points);
        if matches!(case, FoldedType::C(_)) && !pa.sums_to_zero() {
            continue;
        }
        if direct_invariance(&rho, &l, &pa) {
            *labels.entry(component_label(case, &pa)).or_default() += 1;
        }
    }
    let warning = label_torsion(case).and_then(|t| {
        let have = sigma.torsion_count(t);
        let full = (t * t) as usize;
        (have < full).then(|| format!("Σ = ({}, {}) has {have} points of order dividing {t}, not {full}", sigma.m1(), sigma.m2()))
    });
    Ok(FixedComponents {
        labels: labels.into_iter().collect(),
        identity_label: GroupElement::ZERO,
        warning,
    })
}

/// The pairs of the χ-injectivity statement.
#[derive(Clone, Copy, PartialEq, Eq, Hash, Debug)]
pub enum InjectivityPair {
    BD(usize),
    CA(usize),
    G2D4,
    F4E6,
}

impl InjectivityPair {
    pub fn folded(self) -> FoldedType {
        match self {
            InjectivityPair::BD(n) => FoldedType::B(n),
            InjectivityPair::CA(n) => FoldedType::C(n),
            InjectivityPair::G2D4 => FoldedType::G2,
            InjectivityPair::F4E6 => FoldedType::F4,
        }
    }
}

#[derive(Clone, PartialEq, Eq, Debug)]
pub struct InjectivityVerdict {
    pub verified: bool,
    pub domain_size: u64,
    /// Number of `W(G′)`-classes met by the domain.
    pub classes: usize,
    /// `(x, y)` in fixed-lattice coordinates, related by `W(G′)` but not by `W(G)`.
    pub counterexample: Option<(Vec<GroupElement>, Vec<GroupElement>)>,
}

struct UnionFind(Vec<usize>);

impl UnionFind {
    fn new(n: usize) -> Self {
        Self((0..n).collect())
    }

    fn find(&mut self, mut x: usize) -> usize {
        while self.0[x] != x {
            self.0[x] = self.0[self.0[x]];
            x = self.0[x];
        }
        x
    }

    fn union(&mut self, a: usize, b: usize) {
        let (ra, rb) = (self.find(a), self.find(b));
        if ra != rb {
            self.0[ra.max(rb)] = ra.min(rb);
        }
    }
}

/// Integer matrices in simple-root coordinates of `G′`: generators of `W(G′)`,
/// generators of `W(G)` (orbit products) and a basis of the ρ-fixed sublattice.
pub struct RootCoordinateData {
    pub source_generators: Vec<IntMatrix>,
    pub folded_generators: Vec<IntMatrix>,
    /// Columns span the fixed sublattice.
    pub fixed_basis: IntMatrix,
}

pub fn root_coordinate_data(case: FoldCase) -> Result<RootCoordinateData, ModuliError> {
    let l = case.lattice();
    let rho = outer_automorphism(case, &l)?;
    let cartan = rho.simple.cartan(&l);
    let r = cartan.rows();
    let source: Vec<IntMatrix> = simple_reflections_from_cartan(&cartan)
        .into_iter()
        .map(|w: WeylElement| w.matrix)
        .collect();
    let folded = rho
        .orbits()
        .iter()
        .map(|orb| orb.iter().fold(IntMatrix::identity(r), |acc, &i| acc.mul(&source[i])))
        .collect();
    let perm = IntMatrix::from_fn(r, r, |i, j| i64::from(rho.permutation[j] == i));
    let diff = IntMatrix::from_fn(r, r, |i, j| perm.get(i, j) - i64::from(i == j));
    let kernel = crate::abelian::smith_normal_form(&diff).kernel_basis();
    let fixed_basis = IntMatrix::from_fn(r, kernel.len(), |i, j| kernel[j][i]);
    Ok(RootCoordinateData {
        source_generators: source,
        folded_generators: folded,
        fixed_basis,
    })
}

fn act(sigma: &SigmaModel, m: &IntMatrix, x: &[GroupElement]) -> Vec<GroupElement> {
    (0..m.rows()).map(|i| sigma.combine(m.row(i), x)).collect()
}

/// Exhaustive check over `Λ(G)⊗Σ`, with `Λ(G)` the ρ-fixed part of the root
/// lattice of `G′`: any two elements related by `W(G′)` are related by `W(G)`.
pub fn chi_injectivity_check(
    pair: InjectivityPair,
    sigma: SigmaModel,
    weyl_source_order: u64,
) -> Result<InjectivityVerdict, ModuliError> {
    let data = root_coordinate_data(pair.folded().fold_case())?;
    let r = data.fixed_basis.rows();
    let k = data.fixed_basis.cols();
    let order = sigma.order() as u64;
    let domain_size = order.pow(k as u32);
    let cost = domain_size.saturating_mul(weyl_source_order);
    if cost > ACTION_BUDGET {
        return Err(ModuliError::BudgetExceeded(cost));
    }
    let full_size = order.pow(r as u32) as usize;
    let index = |x: &[GroupElement]| x.iter().fold(0usize, |acc, &e| acc * sigma.order() + sigma.index(e));

    // W(G′)-orbits on all of Λ(G′)⊗Σ
    let mut big = UnionFind::new(full_size);
    for x in sigma.tuples(r) {
        let i = index(&x);
        for g in &data.source_generators {
            big.union(i, index(&act(&sigma, g, &x)));
        }
    }
    // W(G)-orbits on the fixed part
    let domain: Vec<Vec<GroupElement>> = sigma.tuples(k).collect();
    let embedded: Vec<Vec<GroupElement>> = domain.iter().map(|y| act(&sigma, &data.fixed_basis, y)).collect();
    let position: std::collections::HashMap<usize, usize> =
        embedded.iter().enumerate().map(|(p, x)| (index(x), p)).collect();
    assert_eq!(position.len(), domain.len(), "the fixed sublattice is saturated");
    let mut small = UnionFind::new(domain.len());
    for (p, x) in embedded.iter().enumerate() {
        for g in &data.folded_generators {
            let q = position[&index(&act(&sigma, g, x))];
            small.union(p, q);
        }
    }
    // same W(G′)-class must mean same W(G)-class
    let mut first_in_class: BTreeMap<usize, usize> = BTreeMap::new();
    let mut counterexample = None;
    for (p, x) in embedded.iter().enumerate() {
        let c = big.find(index(x));
        match first_in_class.get(&c) {
            None => {
                first_in_class.insert(c, p);
            }
            Some(&q) => {
                if counterexample.is_none() && small.find(p) != small.find(q) {
                    counterexample = Some((domain[q].clone(), domain[p].clone()));
                }
            }
        }
    }
    Ok(InjectivityVerdict {
        verified: counterexample.is_none(),
        domain_size,
        classes: first_in_class.len(),
        counterexample,
    })
}

/// Assignments of a case as `E·y` from free parameters `y`.
pub fn parametrization(case: FoldedType) -> IntMatrix {
    match case {
        FoldedType::B(n) => IntMatrix::from_fn(n + 1, n, |i, j| i64::from(i == j + 1)),
        FoldedType::C(n) => IntMatrix::from_fn(2 * n, n, |i, j| {
            if i == j {
                1
            } else if i == 2 * n - 1 - j {
                -1
            } else {
                0
            }
        }),
        FoldedType::G2 => IntMatrix::from_rows(&[[0, 0], [1, 0], [0, 1], [1, 1]]),
        FoldedType::F4 => IntMatrix::identity(6),
    }
}

/// Admissible assignments from unconstrained parameters. Agrees with
/// [`parametrization`] except for F4, where `(x1, x2, x3, c)` give
/// `x6 = c − x1`, `x5 = c − x2`, `x4 = c − x3`.
pub fn free_parametrization(case: FoldedType) -> IntMatrix {
    match case {
        FoldedType::F4 => IntMatrix::from_rows(&[
            [1, 0, 0, 0],
            [0, 1, 0, 0],
            [0, 0, 1, 0],
            [0, 0, -1, 1],
            [0, -1, 0, 1],
            [-1, 0, 0, 1],
        ]),
        _ => parametrization(case),
    }
}

/// A random admissible assignment of the case.
pub fn random_assignment<R: rand::Rng>(case: FoldedType, sigma: SigmaModel, rng: &mut R) -> PointAssignment {
    let e = free_parametrization(case);
    let params: Vec<GroupElement> = (0..e.cols())
        .map(|_| sigma.from_index(rng.gen_range(0..sigma.order())))
        .collect();
    let points = (0..e.rows()).map(|i| sigma.combine(e.row(i), &params)).collect();
    PointAssignment::tagged(case, sigma, points).expect("free parameters give admissible points")
}

/// Homogeneous constraints kept as extra equations (F4 only).
fn constraint_rows(case: FoldedType) -> Vec<Vec<i64>> {
    match case {
        FoldedType::F4 => vec![vec![1, -1, 0, 0, -1, 1], vec![0, 1, -1, -1, 1, 0]],
        _ => Vec::new(),
    }
}

/// Coefficients of the system `p = u(β)` in the free parameters: `u` of each
/// folded simple root composed with the parametrization, then the constraint rows.
pub fn reconstruction_matrix(case: FoldedType) -> Result<IntMatrix, ModuliError> {
    let l = case.lattice();
    let simple = standard_simple_system(case.standard_case(), &l)?;
    let e = parametrization(case);
    let u = IntMatrix::from_fn(simple.rank(), l.points(), |i, j| l.point_coords(&simple.roots[i])[j]);
    let value = u.mul(&e);
    let extra = constraint_rows(case);
    Ok(IntMatrix::from_fn(value.rows() + extra.len(), value.cols(), |i, j| {
        if i < value.rows() {
            value.get(i, j)
        } else {
            extra[i - value.rows()][j]
        }
    }))
}

#[derive(Clone, Debug)]
pub struct Reconstruction {
    pub solution: GroupSolution,
    /// `None` when the solution count is over the cap.
    pub assignments: Option<Vec<PointAssignment>>,
}

/// Every point assignment of the case with `u(β_i) = p_i` on the folded simple system.
pub fn reconstruct_points(
    case: FoldedType,
    p: &[GroupElement],
    sigma: SigmaModel,
    cap: u64,
) -> Result<Reconstruction, ModuliError> {
    if p.len() != case.rank() {
        return Err(ModuliError::PointCount {
            expected: case.rank(),
            got: p.len(),
        });
    }
    let a = reconstruction_matrix(case)?;
    let mut rhs = p.to_vec();
    rhs.resize(a.rows(), sigma.zero());
    let solution = solve_group_system(&a, &rhs, &sigma);
    let assignments = solution.enumerate(cap).map(|all| {
        all.iter()
            .map(|y| PointAssignment::from_parameters(case, sigma, y))
            .collect()
    });
    Ok(Reconstruction { solution, assignments })
}

/// Kernel size of `A·x = 0` over `Σ` read off the Smith diagonal:
/// `Π gcd(d_i, m1)·gcd(d_i, m2)` with `gcd(0, m) = m`, times `|Σ|` per column past the diagonal.
pub fn snf_kernel_prediction(a: &IntMatrix, sigma: &SigmaModel) -> u64 {
    use num_integer::Integer;
    let snf = crate::abelian::smith_normal_form(a);
    let diag = snf.diagonal();
    let mut size: u64 = diag
        .iter()
        .map(|&d| (d.gcd(&sigma.m1()) * d.gcd(&sigma.m2())) as u64)
        .product();
    for _ in diag.len()..a.cols() {
        size *= sigma.order() as u64;
    }
    size
}
