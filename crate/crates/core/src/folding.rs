//! Diagram automorphisms of A_{2n−1}, D_{n+1}, E6 and D4, the folded systems
//! C_n, B_n, F4 and G2, and the Weyl subgroups they generate.
//!
//! The automorphism `ρ` is stored as a rational matrix on the ambient lattice:
//! it permutes the simple roots and fixes the orthogonal complement of the
//! root lattice (`K`, `f`, and `s` in the A case). On the root lattice it is
//! integral; on the whole Picard lattice it usually is not.

use std::collections::{BTreeSet, HashMap, HashSet};

use thiserror::Error;

use crate::lattice::{DivisorClass, IntersectionLattice};
use crate::linalg::{bilinear_rational, IntMatrix, RatMatrix, Rational};
use crate::rootsys::{
    cartan_from_gram, diagram_automorphism_count, recognize, recognize_components, root_sublattice,
    roots_from_cartan, simple_reflections_from_cartan, standard_simple_system, weyl_generate,
    DynkinType, RootSystemData, RootSystemError, SimpleSystem, StandardCase, WeylElement, WeylGroup,
};
use crate::abelian::smith_normal_form;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum FoldingError {
    #[error(transparent)]
    RootSystem(#[from] RootSystemError),
    #[error("roots {0} and {1} in one orbit are not orthogonal")]
    OrbitNotCommuting(usize, usize),
    #[error("the map does not permute the simple roots as required")]
    NotAPermutation,
    #[error("the lattice is not stable under the automorphism")]
    NotStable,
    #[error("automorphism does not have the stated order")]
    WrongOrder,
}

/// Which simply-laced system is folded.
#[derive(Clone, Copy, PartialEq, Eq, Hash, Debug)]
pub enum FoldCase {
    /// `D_{n+1}` folded to `B_n`.
    D(usize),
    /// `A_{2n−1}` folded to `C_n`.
    A(usize),
    /// `E6` folded to `F4`.
    E6,
    /// `D4` folded by triality to `G2`.
    D4Triality,
}

impl FoldCase {
    pub fn source(self) -> StandardCase {
        match self {
            FoldCase::D(n) => StandardCase::DOnF1(n),
            FoldCase::A(n) => StandardCase::AOnF1(n),
            FoldCase::E6 => StandardCase::E6OnP2,
            FoldCase::D4Triality => StandardCase::DOnF1(3),
        }
    }

    pub fn target(self) -> StandardCase {
        match self {
            FoldCase::D(n) => StandardCase::B(n),
            FoldCase::A(n) => StandardCase::C(n),
            FoldCase::E6 => StandardCase::F4,
            FoldCase::D4Triality => StandardCase::G2,
        }
    }

    pub fn order(self) -> usize {
        match self {
            FoldCase::D4Triality => 3,
            _ => 2,
        }
    }

    /// Image index of each simple root, in the order of the standard simple system.
    pub fn permutation(self) -> Vec<usize> {
        match self {
            FoldCase::D(n) => {
                let mut p: Vec<usize> = (0..n + 1).collect();
                p.swap(0, 1);
                p
            }
            FoldCase::A(n) => (0..2 * n - 1).map(|i| 2 * n - 2 - i).collect(),
            // l1−l2 ↔ l5−l6, l2−l3 ↔ l4−l5; h−l1−l2−l3 and l3−l4 fixed
            FoldCase::E6 => vec![5, 4, 2, 3, 1, 0],
            // α1 → α2 → α4 → α1, α3 fixed
            FoldCase::D4Triality => vec![1, 3, 2, 0],
        }
    }

    pub fn lattice(self) -> IntersectionLattice {
        self.source().lattice()
    }

    pub fn from_target(target: StandardCase) -> Option<Self> {
        match target {
            StandardCase::B(n) => Some(FoldCase::D(n)),
            StandardCase::C(n) => Some(FoldCase::A(n)),
            StandardCase::F4 => Some(FoldCase::E6),
            StandardCase::G2 => Some(FoldCase::D4Triality),
            _ => None,
        }
    }
}

#[derive(Clone, PartialEq, Eq, Debug)]
pub struct OuterAutomorphism {
    pub simple: SimpleSystem,
    pub permutation: Vec<usize>,
    pub order: usize,
    /// Action on ambient coordinates.
    pub matrix: RatMatrix,
}

fn rat_vec(x: &DivisorClass) -> Vec<Rational> {
    x.coords.iter().map(|&v| Rational::from_integer(v)).collect()
}

impl OuterAutomorphism {
    /// The map permuting `simple` by `permutation` and fixing `complement`.
    pub fn from_permutation(
        lattice: &IntersectionLattice,
        simple: SimpleSystem,
        permutation: Vec<usize>,
        complement: &[DivisorClass],
    ) -> Result<Self, FoldingError> {
        let r = lattice.rank();
        let n = simple.rank();
        if permutation.len() != n || n + complement.len() != r {
            return Err(FoldingError::NotAPermutation);
        }
        let cartan = simple.cartan(lattice);
        for i in 0..n {
            for j in 0..n {
                if cartan.get(permutation[i], permutation[j]) != cartan.get(i, j) {
                    return Err(FoldingError::NotAPermutation);
                }
            }
        }
        let src: Vec<&DivisorClass> = simple.roots.iter().chain(complement).collect();
        let dst: Vec<&DivisorClass> = permutation
            .iter()
            .map(|&p| &simple.roots[p])
            .chain(complement)
            .collect();
        let src_m = RatMatrix::from_fn(r, r, |i, j| Rational::from_integer(src[j].coords[i]));
        let dst_m = RatMatrix::from_fn(r, r, |i, j| Rational::from_integer(dst[j].coords[i]));
        let inv = src_m.inverse().ok_or(FoldingError::NotAPermutation)?;
        let matrix = dst_m.mul(&inv);
        let mut order = 1;
        let mut power = matrix.clone();
        while power != RatMatrix::identity(r) {
            power = power.mul(&matrix);
            order += 1;
            if order > 6 {
                return Err(FoldingError::WrongOrder);
            }
        }
        let out = Self {
            simple,
            permutation,
            order,
            matrix,
        };
        // isometry check on the ambient form
        let g = lattice.gram().to_rational();
        if out.matrix.transpose().mul(&g).mul(&out.matrix) != g {
            return Err(FoldingError::NotAPermutation);
        }
        Ok(out)
    }

    pub fn identity(lattice: &IntersectionLattice, simple: SimpleSystem) -> Self {
        let n = simple.rank();
        Self {
            simple,
            permutation: (0..n).collect(),
            order: 1,
            matrix: RatMatrix::identity(lattice.rank()),
        }
    }

    pub fn apply_rational(&self, x: &[Rational]) -> Vec<Rational> {
        self.matrix.mul_vec(x)
    }

    /// Image of an integral class, when it is integral.
    pub fn apply(&self, x: &DivisorClass) -> Option<DivisorClass> {
        let y = self.apply_rational(&rat_vec(x));
        y.iter()
            .all(|q| q.is_integer())
            .then(|| DivisorClass::new(y.iter().map(|q| q.to_integer()).collect()))
    }

    /// The ambient matrix, when it is integral.
    pub fn integral_matrix(&self) -> Option<IntMatrix> {
        self.matrix.to_integer()
    }

    /// Action on root-lattice members through their simple-root coordinates.
    pub fn apply_on_roots(&self, x: &DivisorClass) -> Option<DivisorClass> {
        let c = self.simple.integer_coordinates(x)?;
        let mut img = vec![0; c.len()];
        for (i, &ci) in c.iter().enumerate() {
            img[self.permutation[i]] += ci;
        }
        Some(self.simple.combination(&img))
    }

    /// Orbits of the permutation, each sorted, ordered by smallest member.
    pub fn orbits(&self) -> Vec<Vec<usize>> {
        let n = self.permutation.len();
        let mut seen = vec![false; n];
        let mut out = Vec::new();
        for i in 0..n {
            if seen[i] {
                continue;
            }
            let mut orb = vec![i];
            seen[i] = true;
            let mut j = self.permutation[i];
            while j != i {
                seen[j] = true;
                orb.push(j);
                j = self.permutation[j];
            }
            orb.sort();
            out.push(orb);
        }
        out
    }

    /// `Σ_{k < order} ρ^k(x)` for root-lattice members.
    pub fn fold(&self, x: &DivisorClass) -> Option<DivisorClass> {
        let mut acc = x.clone();
        let mut cur = x.clone();
        for _ in 1..self.order {
            cur = self.apply_on_roots(&cur)?;
            acc += &cur;
        }
        Some(acc)
    }
}

/// Classes the automorphism fixes outside the root lattice.
pub fn complement_classes(case: FoldCase, lattice: &IntersectionLattice) -> Vec<DivisorClass> {
    let k = lattice.canonical_class();
    match case {
        FoldCase::D(_) | FoldCase::D4Triality => vec![k, lattice.f()],
        FoldCase::A(_) => vec![k, lattice.f(), lattice.s()],
        FoldCase::E6 => vec![k],
    }
}

pub fn outer_automorphism(case: FoldCase, lattice: &IntersectionLattice) -> Result<OuterAutomorphism, FoldingError> {
    let simple = standard_simple_system(case.source(), lattice)?;
    let rho = OuterAutomorphism::from_permutation(
        lattice,
        simple,
        case.permutation(),
        &complement_classes(case, lattice),
    )?;
    if rho.order != case.order() {
        return Err(FoldingError::WrongOrder);
    }
    Ok(rho)
}

/// Orbit averages of the simple roots with their recognized type.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct FoldedSimpleSystem {
    pub classes: Vec<Vec<Rational>>,
    pub orbits: Vec<Vec<usize>>,
    pub cartan: IntMatrix,
    pub dynkin: DynkinType,
}

pub fn fold_simple_system(
    lattice: &IntersectionLattice,
    rho: &OuterAutomorphism,
) -> Result<FoldedSimpleSystem, FoldingError> {
    let orbits = rho.orbits();
    let classes: Vec<Vec<Rational>> = orbits
        .iter()
        .map(|orb| {
            let mut acc = vec![Rational::from_integer(0); lattice.rank()];
            for &i in orb {
                for (a, &v) in acc.iter_mut().zip(&rho.simple.roots[i].coords) {
                    *a += Rational::from_integer(v);
                }
            }
            let len = Rational::from_integer(orb.len() as i64);
            acc.iter().map(|a| a / len).collect()
        })
        .collect();
    let n = classes.len();
    let gram = lattice.gram();
    let mut cartan = IntMatrix::zeros(n, n);
    for i in 0..n {
        for j in 0..n {
            let v = Rational::from_integer(2) * bilinear_rational(gram, &classes[i], &classes[j])
                / bilinear_rational(gram, &classes[j], &classes[j]);
            if !v.is_integer() {
                return Err(RootSystemError::UnrecognizedDiagram("non-integral folded Cartan entry".into()).into());
            }
            cartan.set(i, j, v.to_integer());
        }
    }
    let dynkin = if n == 0 {
        return Err(RootSystemError::UnrecognizedDiagram("empty system".into()).into());
    } else {
        recognize(&cartan)?.0
    };
    Ok(FoldedSimpleSystem {
        classes,
        orbits,
        cartan,
        dynkin,
    })
}

/// Orbit sums scaled to `Σ_k ρ^k(α)`: the integral presentation of the folded simple roots.
pub fn folded_simple_roots(rho: &OuterAutomorphism) -> Vec<DivisorClass> {
    rho.orbits()
        .iter()
        .map(|orb| rho.fold(&rho.simple.roots[orb[0]]).expect("simple roots are in the root lattice"))
        .collect()
}

/// One generator per ρ-orbit: the product of the reflections in the orbit.
pub fn folded_weyl_generators(
    lattice: &IntersectionLattice,
    rho: &OuterAutomorphism,
) -> Result<Vec<WeylElement>, FoldingError> {
    let roots = &rho.simple.roots;
    rho.orbits()
        .iter()
        .map(|orb| {
            for (x, &i) in orb.iter().enumerate() {
                for &j in &orb[x + 1..] {
                    if lattice.dot(&roots[i], &roots[j]) != 0 {
                        return Err(FoldingError::OrbitNotCommuting(i, j));
                    }
                }
            }
            let mut acc = WeylElement::identity(lattice.rank());
            for &i in orb {
                acc = acc.compose(&WeylElement::reflection(lattice, &roots[i])?);
            }
            Ok(acc)
        })
        .collect()
}

/// Integral basis of `{x ∈ Λ : ρx = x}` where `Λ` is spanned by `basis`
/// (assumed independent). Computed as the integer kernel of `R − I`.
pub fn fixed_sublattice(rho: &OuterAutomorphism, basis: &[DivisorClass]) -> Result<Vec<DivisorClass>, FoldingError> {
    let n = basis.len();
    if n == 0 {
        return Ok(Vec::new());
    }
    let rank = basis[0].rank();
    let bm = RatMatrix::from_fn(rank, n, |i, j| Rational::from_integer(basis[j].coords[i]));
    let mut r = IntMatrix::zeros(n, n);
    for (j, b) in basis.iter().enumerate() {
        let img = rho.apply_rational(&rat_vec(b));
        let c = bm.solve(&img).ok_or(FoldingError::NotStable)?;
        for (i, q) in c.iter().enumerate() {
            if !q.is_integer() {
                return Err(FoldingError::NotStable);
            }
            r.set(i, j, q.to_integer());
        }
    }
    let m = IntMatrix::from_fn(n, n, |i, j| r.get(i, j) - i64::from(i == j));
    let snf = smith_normal_form(&m);
    Ok(snf
        .kernel_basis()
        .iter()
        .map(|v| {
            let mut acc = DivisorClass::zero(rank);
            for (c, b) in v.iter().zip(basis) {
                acc += &b.scaled(*c);
            }
            acc
        })
        .collect())
}

/// Whether two lists of classes span the same lattice.
pub fn same_lattice(a: &[DivisorClass], b: &[DivisorClass]) -> bool {
    let inside = |xs: &[DivisorClass], ys: &[DivisorClass]| {
        if ys.is_empty() {
            return xs.iter().all(|x| x.is_zero());
        }
        let rank = ys[0].rank();
        let m = RatMatrix::from_fn(rank, ys.len(), |i, j| Rational::from_integer(ys[j].coords[i]));
        xs.iter().all(|x| {
            m.solve(&rat_vec(x))
                .is_some_and(|c| c.iter().all(|q| q.is_integer()))
        })
    };
    a.len() == b.len() && inside(a, b) && inside(b, a)
}

/// Non-simply-laced targets of the folding.
#[derive(Clone, Copy, PartialEq, Eq, Hash, Debug)]
pub enum FoldedType {
    B(usize),
    C(usize),
    G2,
    F4,
}

impl FoldedType {
    pub fn fold_case(self) -> FoldCase {
        match self {
            FoldedType::B(n) => FoldCase::D(n),
            FoldedType::C(n) => FoldCase::A(n),
            FoldedType::G2 => FoldCase::D4Triality,
            FoldedType::F4 => FoldCase::E6,
        }
    }

    pub fn standard_case(self) -> StandardCase {
        self.fold_case().target()
    }

    pub fn lattice(self) -> IntersectionLattice {
        self.fold_case().lattice()
    }

    pub fn rank(self) -> usize {
        match self {
            FoldedType::B(n) | FoldedType::C(n) => n,
            FoldedType::G2 => 2,
            FoldedType::F4 => 4,
        }
    }

    pub fn dynkin(self) -> DynkinType {
        match self {
            FoldedType::B(n) => DynkinType::B(n),
            FoldedType::C(n) => DynkinType::C(n),
            FoldedType::G2 => DynkinType::G2,
            FoldedType::F4 => DynkinType::F4,
        }
    }
}

/// The `ε` classes in terms of which the folded root systems are listed.
pub fn epsilon_classes(case: FoldedType, l: &IntersectionLattice) -> Vec<DivisorClass> {
    match case {
        FoldedType::B(n) => (2..=n + 1).map(|i| l.l(i)).collect(),
        FoldedType::C(n) => (1..=n).map(|k| l.l(k) - l.l(2 * n + 1 - k)).collect(),
        FoldedType::G2 => vec![l.l(2), l.l(3), l.f() - l.l(4)],
        FoldedType::F4 => {
            let h2 = l.h().scaled(2);
            let mid = l.l(2) + l.l(3) + l.l(4) + l.l(5);
            vec![
                l.l(2) - l.l(3) + l.l(4) - l.l(5),
                l.l(2) + l.l(3) - l.l(4) - l.l(5),
                &(&h2 - &l.l(1).scaled(2)) - &mid,
                &(&h2 - &l.l(6).scaled(2)) - &mid,
            ]
        }
    }
}

/// The literal root sets listed for each folded type.
pub fn folded_root_classes(case: FoldedType, l: &IntersectionLattice) -> Vec<DivisorClass> {
    let eps = epsilon_classes(case, l);
    let mut out: BTreeSet<DivisorClass> = BTreeSet::new();
    let mut both = |x: DivisorClass| {
        out.insert(-&x);
        out.insert(x);
    };
    match case {
        FoldedType::B(n) => {
            // ±(f − 2l_i), 2(l_i − l_j), ±2(f − l_i − l_j)
            let f = l.f();
            for i in 0..n {
                both(&f - &eps[i].scaled(2));
                for j in 0..n {
                    if i != j {
                        both((&eps[i] - &eps[j]).scaled(2));
                    }
                    if i < j {
                        both((&(&f - &eps[i]) - &eps[j]).scaled(2));
                    }
                }
            }
        }
        FoldedType::C(n) => {
            // ±2ε_i, ±(ε_i ± ε_j)
            for i in 0..n {
                both(eps[i].scaled(2));
                for j in i + 1..n {
                    both(&eps[i] + &eps[j]);
                    both(&eps[i] - &eps[j]);
                }
            }
        }
        FoldedType::G2 => {
            // ±3(ε_i − ε_j), ±(2ε_i − ε_j − ε_k)
            for i in 0..3 {
                for j in 0..3 {
                    if i != j {
                        both((&eps[i] - &eps[j]).scaled(3));
                        let k = 3 - i - j;
                        both(&(&eps[i].scaled(2) - &eps[j]) - &eps[k]);
                    }
                }
            }
        }
        FoldedType::F4 => {
            // ±ε_i, ±(ε_i ± ε_j), ±½(ε1 ± ε2 ± ε3 ± ε4)
            for i in 0..4 {
                both(eps[i].clone());
                for j in i + 1..4 {
                    both(&eps[i] + &eps[j]);
                    both(&eps[i] - &eps[j]);
                }
            }
            for signs in 0..16u32 {
                let mut acc = DivisorClass::zero(l.rank());
                for (k, e) in eps.iter().enumerate() {
                    if signs & (1 << k) == 0 {
                        acc += e;
                    } else {
                        acc -= e;
                    }
                }
                assert!(acc.coords.iter().all(|c| c % 2 == 0), "half-sum is integral");
                both(DivisorClass::new(acc.coords.iter().map(|c| c / 2).collect()));
            }
        }
    }
    out.into_iter().collect()
}

pub fn folded_root_system(case: FoldedType, l: &IntersectionLattice) -> Result<RootSystemData, FoldingError> {
    Ok(RootSystemData::new(l.clone(), folded_root_classes(case, l))?)
}

/// The simply-laced root system being folded.
pub fn source_root_system(case: FoldCase, l: &IntersectionLattice) -> Result<RootSystemData, FoldingError> {
    Ok(root_sublattice(l, &crate::rootsys::constraint_classes(case.source(), l))?)
}

/// `{Σ_k ρ^k(α) : α ∈ R(G′)}`.
pub fn fold_image(rho: &OuterAutomorphism, source: &RootSystemData) -> Vec<DivisorClass> {
    let set: BTreeSet<DivisorClass> = source
        .roots()
        .iter()
        .map(|a| rho.fold(a).expect("roots are in the root lattice"))
        .collect();
    set.into_iter().collect()
}

/// Lift of the reflection in a folded root `β`: the product of the
/// reflections in the (mutually orthogonal) roots of `R(G′)` folding to `β`.
pub fn lift_reflection(
    lattice: &IntersectionLattice,
    rho: &OuterAutomorphism,
    source: &RootSystemData,
    beta: &DivisorClass,
) -> Result<WeylElement, FoldingError> {
    let over: Vec<&DivisorClass> = source
        .roots()
        .iter()
        .filter(|a| rho.fold(a).as_ref() == Some(beta))
        .collect();
    if over.is_empty() {
        return Err(FoldingError::NotStable);
    }
    let mut acc = WeylElement::identity(lattice.rank());
    for (i, a) in over.iter().enumerate() {
        for b in &over[i + 1..] {
            if lattice.dot(a, b) != 0 {
                return Err(FoldingError::OrbitNotCommuting(i, i + 1));
            }
        }
        acc = acc.compose(&WeylElement::reflection(lattice, a)?);
    }
    Ok(acc)
}

/// Everything needed to compare the two presentations of `W(G)`.
#[derive(Clone, Debug)]
pub struct FoldedWeyl {
    pub rho: OuterAutomorphism,
    pub generators: Vec<WeylElement>,
    pub group: WeylGroup,
}

pub fn folded_weyl_group(case: FoldCase, cap: usize) -> Result<FoldedWeyl, FoldingError> {
    let l = case.lattice();
    let rho = outer_automorphism(case, &l)?;
    let generators = folded_weyl_generators(&l, &rho)?;
    let group = weyl_generate(l.rank(), &generators, cap)?;
    Ok(FoldedWeyl { rho, generators, group })
}

/// Group generated by the lifted reflections in every folded root.
pub fn reflection_group_of_folded_roots(case: FoldedType, cap: usize) -> Result<WeylGroup, FoldingError> {
    let l = case.lattice();
    let rho = outer_automorphism(case.fold_case(), &l)?;
    let source = source_root_system(case.fold_case(), &l)?;
    let folded = folded_root_system(case, &l)?;
    let lifts = folded
        .roots()
        .iter()
        .map(|b| lift_reflection(&l, &rho, &source, b))
        .collect::<Result<Vec<_>, _>>()?;
    let unique: Vec<WeylElement> = lifts.into_iter().collect::<BTreeSet<_>>().into_iter().collect();
    Ok(weyl_generate(l.rank(), &unique, cap)?)
}

/// The simply-laced maximal-rank subsystem of long roots and the identity
/// `|W(G)| = |W(G″)|·|Out(G″)|`, computed in simple-root coordinates.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SecondReduction {
    pub g_type: DynkinType,
    pub g_weyl_order: usize,
    pub sub_types: Vec<DynkinType>,
    pub sub_weyl_order: usize,
    /// Diagram automorphisms of `G″` induced by elements of `W(G)`.
    pub out_induced: usize,
    /// All diagram automorphisms of `G″`.
    pub out_diagram: usize,
    pub sub_is_normal_subgroup: bool,
}

impl SecondReduction {
    pub fn identity_holds(&self) -> bool {
        self.sub_is_normal_subgroup && self.g_weyl_order == self.sub_weyl_order * self.out_induced
    }
}

pub fn second_reduction(gram: &IntMatrix, cap: usize) -> Result<SecondReduction, FoldingError> {
    let n = gram.rows();
    let a = cartan_from_gram(gram)?;
    let (g_type, _) = recognize(&a)?;
    let w = weyl_generate(n, &simple_reflections_from_cartan(&a), cap)?;
    let roots = roots_from_cartan(&a, cap)?;
    let norm = |x: &[i64]| crate::linalg::bilinear(gram, x, x);
    let long_norm = roots.iter().map(|r| norm(r)).min().expect("roots exist");
    let long: Vec<&Vec<i64>> = roots.iter().filter(|r| norm(r) == long_norm).collect();
    let positive: Vec<&Vec<i64>> = long.iter().copied().filter(|r| r.iter().all(|&c| c >= 0)).collect();
    let pos_set: HashSet<&Vec<i64>> = positive.iter().copied().collect();
    let simple: Vec<Vec<i64>> = positive
        .iter()
        .filter(|x| {
            !positive.iter().any(|y| {
                let d: Vec<i64> = x.iter().zip(y.iter()).map(|(p, q)| p - q).collect();
                pos_set.contains(&d)
            })
        })
        .map(|x| (*x).clone())
        .collect();
    let sub_gram = IntMatrix::from_fn(simple.len(), simple.len(), |i, j| crate::linalg::bilinear(gram, &simple[i], &simple[j]));
    let sub_cartan = cartan_from_gram(&sub_gram)?;
    let sub_types = recognize_components(&sub_cartan)?;
    let reflection = |g: &[i64]| {
        let gg = crate::linalg::bilinear(gram, g, g);
        let mut m = IntMatrix::identity(n);
        for j in 0..n {
            let mut e = vec![0; n];
            e[j] = 1;
            let num = 2 * crate::linalg::bilinear(gram, &e, g);
            assert_eq!(num % gg, 0, "long-root reflections are integral on the root lattice");
            for i in 0..n {
                m.set(i, j, m.get(i, j) - num / gg * g[i]);
            }
        }
        WeylElement::new(m)
    };
    let sub_gens: Vec<WeylElement> = simple.iter().map(|g| reflection(g)).collect();
    let sub = weyl_generate(n, &sub_gens, cap)?;
    let index: HashMap<&Vec<i64>, usize> = simple.iter().enumerate().map(|(i, s)| (s, i)).collect();
    let mut induced: BTreeSet<Vec<usize>> = BTreeSet::new();
    let mut normal = sub.is_subset_of(&w);
    for g in w.elements() {
        let perm: Option<Vec<usize>> = simple
            .iter()
            .map(|s| index.get(&g.matrix.mul_vec(s)).copied())
            .collect();
        if let Some(p) = perm {
            induced.insert(p);
        }
        if normal {
            // conjugating a generator of W(G″) stays inside W(G″)
            let inv = w
                .elements()
                .iter()
                .find(|h| h.compose(g).is_identity())
                .expect("group elements have inverses");
            normal = sub_gens.iter().all(|s| sub.contains(&g.compose(s).compose(inv)));
        }
    }
    Ok(SecondReduction {
        g_type,
        g_weyl_order: w.len(),
        sub_types,
        sub_weyl_order: sub.len(),
        out_induced: induced.len(),
        out_diagram: diagram_automorphism_count(&sub_cartan),
        sub_is_normal_subgroup: normal,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rootsys::{gram_of, DEFAULT_WEYL_CAP};

    fn all_cases() -> Vec<FoldCase> {
        vec![FoldCase::D(2), FoldCase::D(3), FoldCase::D(4), FoldCase::A(2), FoldCase::A(3), FoldCase::E6, FoldCase::D4Triality]
    }

    #[test]
    fn automorphisms_permute_and_fix_k() {
        for case in all_cases() {
            let l = case.lattice();
            let rho = outer_automorphism(case, &l).unwrap();
            assert_eq!(rho.order, case.order());
            for (i, a) in rho.simple.roots.iter().enumerate() {
                assert_eq!(rho.apply(a).as_ref(), Some(&rho.simple.roots[case.permutation()[i]]));
                assert_eq!(rho.apply_on_roots(a), rho.apply(a));
            }
            assert_eq!(rho.apply(&l.canonical_class()), Some(l.canonical_class()));
        }
    }

    #[test]
    fn triality_on_named_roots() {
        let l = IntersectionLattice::f1(4);
        let rho = outer_automorphism(FoldCase::D4Triality, &l).unwrap();
        let a = &rho.simple.roots;
        assert_eq!(rho.apply(&a[0]).unwrap(), a[1]);
        assert_eq!(rho.apply(&a[1]).unwrap(), a[3]);
        assert_eq!(rho.apply(&a[3]).unwrap(), a[0]);
        assert_eq!(rho.apply(&a[2]).unwrap(), a[2]);
    }

    #[test]
    fn b_case_automorphism_is_not_integral_on_the_full_lattice() {
        let l = IntersectionLattice::f1(3);
        let rho = outer_automorphism(FoldCase::D(2), &l).unwrap();
        assert!(rho.integral_matrix().is_none());
        // ρ(s) = s + ½f − l1
        let img = rho.apply_rational(&rat_vec(&l.s()));
        let half = Rational::new(1, 2);
        assert_eq!(img[0], Rational::from_integer(1));
        assert_eq!(img[1], half);
        assert_eq!(img[2], Rational::from_integer(-1));
    }

    #[test]
    fn folded_simple_systems() {
        let expected = [
            (FoldCase::D(2), DynkinType::B(2)),
            (FoldCase::D(3), DynkinType::B(3)),
            (FoldCase::D(4), DynkinType::B(4)),
            (FoldCase::A(2), DynkinType::B(2)),
            (FoldCase::A(3), DynkinType::C(3)),
            (FoldCase::E6, DynkinType::F4),
            (FoldCase::D4Triality, DynkinType::G2),
        ];
        for (case, ty) in expected {
            let l = case.lattice();
            let rho = outer_automorphism(case, &l).unwrap();
            let folded = fold_simple_system(&l, &rho).unwrap();
            assert_eq!(folded.dynkin, ty);
            // the integral presentation matches the listed simple roots
            let listed = standard_simple_system(case.target(), &l).unwrap();
            assert_eq!(folded_simple_roots(&rho), listed.roots);
            assert_eq!(recognize(&listed.cartan(&l)).unwrap().0, ty);
        }
    }

    #[test]
    fn triality_average() {
        let l = IntersectionLattice::f1(4);
        let rho = outer_automorphism(FoldCase::D4Triality, &l).unwrap();
        let folded = fold_simple_system(&l, &rho).unwrap();
        let a = &rho.simple.roots;
        let third = Rational::new(1, 3);
        let avg: Vec<Rational> = (0..l.rank())
            .map(|i| third * Rational::from_integer(a[0].coords[i] + a[1].coords[i] + a[3].coords[i]))
            .collect();
        assert_eq!(folded.classes[0], avg);
        assert_eq!(folded.classes[1], rat_vec(&a[2]));
    }

    #[test]
    fn e6_chain_indexing_gives_the_same_fold() {
        // chain positions α1, α2, α4, α5, α6 with the branch α3 last; ρ is i ↦ 6−i on the chain
        let l = IntersectionLattice::p2(6);
        let cubic = standard_simple_system(StandardCase::E6OnP2, &l).unwrap();
        let r = &cubic.roots;
        let chain = vec![r[0].clone(), r[1].clone(), r[3].clone(), r[4].clone(), r[5].clone(), r[2].clone()];
        let simple = SimpleSystem::new(&l, chain).unwrap();
        let rho = OuterAutomorphism::from_permutation(&l, simple, vec![4, 3, 2, 1, 0, 5], &[l.canonical_class()]).unwrap();
        let folded = fold_simple_system(&l, &rho).unwrap();
        assert_eq!(folded.dynkin, DynkinType::F4);
        let cubic_rho = outer_automorphism(FoldCase::E6, &l).unwrap();
        assert_eq!(rho.matrix, cubic_rho.matrix);
        // orbits {1,5}, {2,4}, {3}, {6} in chain numbering
        assert_eq!(folded.orbits, vec![vec![0, 4], vec![1, 3], vec![2], vec![5]]);
    }

    #[test]
    fn identity_fold_is_trivial() {
        let l = IntersectionLattice::f1(4);
        let simple = standard_simple_system(StandardCase::DOnF1(3), &l).unwrap();
        let id = OuterAutomorphism::identity(&l, simple.clone());
        let folded = fold_simple_system(&l, &id).unwrap();
        assert_eq!(folded.dynkin, DynkinType::D(4));
        assert_eq!(folded.classes, simple.roots.iter().map(rat_vec).collect::<Vec<_>>());
        let fixed = fixed_sublattice(&id, &simple.roots).unwrap();
        assert!(same_lattice(&fixed, &simple.roots));
    }

    #[test]
    fn fixed_sublattices() {
        let l = IntersectionLattice::p2(6);
        let rho = outer_automorphism(FoldCase::E6, &l).unwrap();
        let fixed = fixed_sublattice(&rho, &rho.simple.roots).unwrap();
        let listed = vec![
            l.parse_class("h-l1-l2-l3").unwrap(),
            l.parse_class("l1-l6").unwrap(),
            l.parse_class("l2-l5").unwrap(),
            l.parse_class("l3-l4").unwrap(),
        ];
        assert!(same_lattice(&fixed, &listed));
        let ty = recognize(&cartan_from_gram(&gram_of(&l, &listed)).unwrap()).unwrap().0;
        assert_eq!(ty, DynkinType::D(4));
        for x in &fixed {
            assert_eq!(rho.apply(x).as_ref(), Some(x));
        }

        let l = IntersectionLattice::f1(4);
        let tri = outer_automorphism(FoldCase::D4Triality, &l).unwrap();
        assert_eq!(fixed_sublattice(&tri, &tri.simple.roots).unwrap().len(), 2);
    }

    #[test]
    fn folded_root_counts() {
        for n in 2..=4 {
            let b = FoldedType::B(n);
            assert_eq!(folded_root_system(b, &b.lattice()).unwrap().len(), 2 * n * n);
            let c = FoldedType::C(n);
            assert_eq!(folded_root_system(c, &c.lattice()).unwrap().len(), 2 * n * n);
        }
        let g = FoldedType::G2;
        assert_eq!(folded_root_system(g, &g.lattice()).unwrap().len(), 12);
        let f = FoldedType::F4;
        assert_eq!(folded_root_system(f, &f.lattice()).unwrap().len(), 48);
    }

    #[test]
    fn folded_roots_are_fixed_and_equal_the_fold_image() {
        for case in [FoldedType::B(2), FoldedType::B(3), FoldedType::C(2), FoldedType::C(3), FoldedType::G2, FoldedType::F4] {
            let l = case.lattice();
            let rho = outer_automorphism(case.fold_case(), &l).unwrap();
            let folded = folded_root_system(case, &l).unwrap();
            for b in folded.roots() {
                assert_eq!(rho.apply(b).as_ref(), Some(b));
            }
            let source = source_root_system(case.fold_case(), &l).unwrap();
            assert_eq!(fold_image(&rho, &source), folded.roots().to_vec(), "{case:?}");
        }
    }

    #[test]
    fn weyl_presentations_agree() {
        for case in [FoldedType::B(2), FoldedType::B(3), FoldedType::C(2), FoldedType::G2, FoldedType::F4] {
            let gen = folded_weyl_group(case.fold_case(), DEFAULT_WEYL_CAP).unwrap();
            let refl = reflection_group_of_folded_roots(case, DEFAULT_WEYL_CAP).unwrap();
            assert_eq!(gen.group, refl, "{case:?}");
            assert_eq!(gen.group.len() as u64, case.dynkin().weyl_order());
        }
    }

    #[test]
    fn orbit_must_commute() {
        // a fake "orbit" {l1−l2, l2−l3} is not orthogonal
        let l = IntersectionLattice::f1(4);
        let simple = standard_simple_system(StandardCase::AOnF1(2), &l).unwrap();
        let rho = OuterAutomorphism {
            simple,
            permutation: vec![1, 0, 2],
            order: 2,
            matrix: RatMatrix::identity(l.rank()),
        };
        assert!(matches!(folded_weyl_generators(&l, &rho), Err(FoldingError::OrbitNotCommuting(0, 1))));
    }

    #[test]
    fn second_reduction_rows() {
        let check = |case: FoldedType, out: usize| {
            let l = case.lattice();
            let s = standard_simple_system(case.standard_case(), &l).unwrap();
            let r = second_reduction(&s.gram(&l), DEFAULT_WEYL_CAP).unwrap();
            assert!(r.identity_holds(), "{case:?}: {r:?}");
            assert_eq!(r.out_induced, out, "{case:?}");
            r
        };
        for n in 2..=4 {
            let r = check(FoldedType::C(n), (1..=n).product());
            assert_eq!(r.sub_types, vec![DynkinType::A(1); n]);
        }
        let r = check(FoldedType::G2, 2);
        assert_eq!(r.sub_types, vec![DynkinType::A(2)]);
        for n in 2..=4 {
            check(FoldedType::B(n), 2);
        }
        let r = check(FoldedType::F4, 6);
        assert_eq!(r.sub_types, vec![DynkinType::D(4)]);
        assert_eq!(r.out_diagram, 6);
    }
}
