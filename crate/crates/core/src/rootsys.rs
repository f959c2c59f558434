//! Root systems inside Picard lattices, Cartan matrices, Weyl groups as
//! sets of integer matrices, and orbits.

use std::collections::{BTreeSet, HashSet, VecDeque};
use std::fmt;

use thiserror::Error;

use crate::lattice::{Constraint, DivisorClass, IntersectionLattice, LatticeError};
use crate::linalg::{IntMatrix, RatMatrix, Rational};

pub const DEFAULT_WEYL_CAP: usize = 1_000_000;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum RootSystemError {
    #[error(transparent)]
    Lattice(#[from] LatticeError),
    #[error("reflection in a class of square {0} is not integral on the lattice")]
    NonIntegralReflection(i64),
    #[error("cannot reflect in a class of square zero")]
    IsotropicRoot,
    #[error("diagram not in the finite catalogue: {0}")]
    UnrecognizedDiagram(String),
    #[error("closure exceeded the cap of {0} elements")]
    BudgetExceeded(usize),
    #[error("not a root system: {0}")]
    NotARootSystem(String),
    #[error("simple system does not match the lattice: {0}")]
    LatticeMismatch(String),
}

#[derive(Clone, Copy, PartialEq, Eq, Hash, Debug, PartialOrd, Ord)]
pub enum DynkinType {
    A(usize),
    B(usize),
    C(usize),
    D(usize),
    E(usize),
    F4,
    G2,
}

impl DynkinType {
    pub fn rank(self) -> usize {
        match self {
            DynkinType::A(n) | DynkinType::B(n) | DynkinType::C(n) | DynkinType::D(n) | DynkinType::E(n) => n,
            DynkinType::F4 => 4,
            DynkinType::G2 => 2,
        }
    }

    /// Closed-form Weyl group order.
    pub fn weyl_order(self) -> u64 {
        let fact = |n: usize| (1..=n as u64).product::<u64>();
        match self {
            DynkinType::A(n) => fact(n + 1),
            DynkinType::B(n) | DynkinType::C(n) => (1u64 << n) * fact(n),
            DynkinType::D(n) => (1u64 << (n - 1)) * fact(n),
            DynkinType::E(6) => 51_840,
            DynkinType::E(7) => 2_903_040,
            DynkinType::E(8) => 696_729_600,
            DynkinType::E(_) => unreachable!("only E6, E7, E8 exist"),
            DynkinType::F4 => 1152,
            DynkinType::G2 => 12,
        }
    }

    pub fn root_count(self) -> usize {
        match self {
            DynkinType::A(n) => n * (n + 1),
            DynkinType::B(n) | DynkinType::C(n) => 2 * n * n,
            DynkinType::D(n) => 2 * n * (n - 1),
            DynkinType::E(6) => 72,
            DynkinType::E(7) => 126,
            DynkinType::E(8) => 240,
            DynkinType::E(_) => unreachable!("only E6, E7, E8 exist"),
            DynkinType::F4 => 48,
            DynkinType::G2 => 12,
        }
    }

    pub fn is_simply_laced(self) -> bool {
        matches!(self, DynkinType::A(_) | DynkinType::D(_) | DynkinType::E(_))
    }

    /// Catalogue Cartan matrix in the usual numbering, with entries
    /// `A_ij = 2(α_i, α_j)/(α_j, α_j)`.
    pub fn cartan(self) -> IntMatrix {
        let n = self.rank();
        let mut a = IntMatrix::identity(n);
        for i in 0..n {
            a.set(i, i, 2);
        }
        let mut link = |i: usize, j: usize, aij: i64, aji: i64| {
            a.set(i, j, aij);
            a.set(j, i, aji);
        };
        match self {
            DynkinType::A(n) => (1..n).for_each(|i| link(i - 1, i, -1, -1)),
            DynkinType::B(n) => {
                (1..n - 1).for_each(|i| link(i - 1, i, -1, -1));
                link(n - 2, n - 1, -2, -1);
            }
            DynkinType::C(n) => {
                (1..n - 1).for_each(|i| link(i - 1, i, -1, -1));
                link(n - 2, n - 1, -1, -2);
            }
            DynkinType::D(n) => {
                (1..n - 1).for_each(|i| link(i - 1, i, -1, -1));
                link(n - 3, n - 1, -1, -1);
            }
            DynkinType::E(n) => {
                link(0, 2, -1, -1);
                link(1, 3, -1, -1);
                (3..n).for_each(|i| link(i - 1, i, -1, -1));
            }
            DynkinType::F4 => {
                link(0, 1, -1, -1);
                link(1, 2, -2, -1);
                link(2, 3, -1, -1);
            }
            DynkinType::G2 => link(0, 1, -1, -3),
        }
        a
    }
}

impl fmt::Display for DynkinType {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            DynkinType::A(n) => write!(f, "A{n}"),
            DynkinType::B(n) => write!(f, "B{n}"),
            DynkinType::C(n) => write!(f, "C{n}"),
            DynkinType::D(n) => write!(f, "D{n}"),
            DynkinType::E(n) => write!(f, "E{n}"),
            DynkinType::F4 => write!(f, "F4"),
            DynkinType::G2 => write!(f, "G2"),
        }
    }
}

/// `A_ij = 2(β_i, β_j)/(β_j, β_j)`; fails if an entry is not an integer.
pub fn cartan_from_gram(gram: &IntMatrix) -> Result<IntMatrix, RootSystemError> {
    let n = gram.rows();
    let mut a = IntMatrix::zeros(n, n);
    for i in 0..n {
        for j in 0..n {
            let d = gram.get(j, j);
            if d == 0 {
                return Err(RootSystemError::IsotropicRoot);
            }
            let num = 2 * gram.get(i, j);
            if num % d != 0 {
                return Err(RootSystemError::UnrecognizedDiagram(format!(
                    "non-integral Cartan entry {num}/{d}"
                )));
            }
            a.set(i, j, num / d);
        }
    }
    Ok(a)
}

/// Gram matrix of a list of classes.
pub fn gram_of(lattice: &IntersectionLattice, classes: &[DivisorClass]) -> IntMatrix {
    IntMatrix::from_fn(classes.len(), classes.len(), |i, j| lattice.dot(&classes[i], &classes[j]))
}

fn unrecognized(msg: impl Into<String>) -> RootSystemError {
    RootSystemError::UnrecognizedDiagram(msg.into())
}

fn neighbours(a: &IntMatrix, i: usize) -> Vec<usize> {
    (0..a.rows()).filter(|&j| j != i && a.get(i, j) != 0).collect()
}

/// Walks a path graph from `start`, returning the nodes in order.
fn walk_chain(a: &IntMatrix, start: usize) -> Vec<usize> {
    let mut order = vec![start];
    let mut prev = usize::MAX;
    let mut cur = start;
    loop {
        let next = neighbours(a, cur).into_iter().find(|&j| j != prev);
        match next {
            Some(j) => {
                order.push(j);
                prev = cur;
                cur = j;
            }
            None => return order,
        }
    }
}

/// Connected components of the diagram, each sorted.
pub fn components(a: &IntMatrix) -> Vec<Vec<usize>> {
    let n = a.rows();
    let mut seen = vec![false; n];
    let mut out = Vec::new();
    for s in 0..n {
        if seen[s] {
            continue;
        }
        let mut comp = vec![s];
        seen[s] = true;
        let mut k = 0;
        while k < comp.len() {
            for j in neighbours(a, comp[k]) {
                if !seen[j] {
                    seen[j] = true;
                    comp.push(j);
                }
            }
            k += 1;
        }
        comp.sort();
        out.push(comp);
    }
    out
}

/// Identifies an irreducible Cartan matrix. Returns the type together with
/// an ordering `perm` such that `A[perm[i]][perm[j]]` is the catalogue matrix.
pub fn recognize(a: &IntMatrix) -> Result<(DynkinType, Vec<usize>), RootSystemError> {
    let n = a.rows();
    if n == 0 || !a.is_square() {
        return Err(unrecognized("empty or non-square matrix"));
    }
    for i in 0..n {
        if a.get(i, i) != 2 {
            return Err(unrecognized("diagonal entry is not 2"));
        }
        for j in 0..n {
            if i == j {
                continue;
            }
            let (x, y) = (a.get(i, j), a.get(j, i));
            if x > 0 || (x == 0) != (y == 0) || x * y > 3 {
                return Err(unrecognized(format!("entries ({x}, {y}) at ({i}, {j})")));
            }
        }
    }
    if components(a).len() != 1 {
        return Err(unrecognized("diagram is disconnected"));
    }
    let mut edges = Vec::new();
    for i in 0..n {
        for j in i + 1..n {
            if a.get(i, j) != 0 {
                edges.push((i, j));
            }
        }
    }
    if edges.len() != n - 1 {
        return Err(unrecognized("diagram has a cycle"));
    }
    let degree: Vec<usize> = (0..n).map(|i| neighbours(a, i).len()).collect();
    let multi: Vec<(usize, usize)> = edges
        .iter()
        .copied()
        .filter(|&(i, j)| a.get(i, j) * a.get(j, i) > 1)
        .collect();
    let ends: Vec<usize> = (0..n).filter(|&i| degree[i] <= 1).collect();

    let (ty, perm) = if multi.len() > 1 {
        return Err(unrecognized("more than one multiple edge"));
    } else if let Some(&(i, j)) = multi.first() {
        if degree.iter().any(|&d| d > 2) {
            return Err(unrecognized("branched diagram with a multiple edge"));
        }
        // orient so that `long` has the larger norm: A_long,short has the larger magnitude
        let (long, short) = if a.get(i, j).abs() > a.get(j, i).abs() { (i, j) } else { (j, i) };
        let prod = a.get(i, j) * a.get(j, i);
        if prod == 3 {
            if n != 2 {
                return Err(unrecognized("triple edge in rank above 2"));
            }
            (DynkinType::G2, vec![short, long])
        } else if n == 2 {
            (DynkinType::B(2), vec![long, short])
        } else {
            let from_long_end = {
                let start = ends.iter().copied().find(|&e| {
                    let c = walk_chain(a, e);
                    c.iter().position(|&x| x == long) < c.iter().position(|&x| x == short)
                });
                walk_chain(a, start.expect("a path has two ends"))
            };
            let pos = from_long_end.iter().position(|&x| x == long).unwrap();
            if n == 4 && pos == 1 {
                (DynkinType::F4, from_long_end)
            } else if pos == n - 2 {
                (DynkinType::B(n), from_long_end)
            } else if pos == 0 {
                let mut c = from_long_end;
                c.reverse();
                (DynkinType::C(n), c)
            } else {
                return Err(unrecognized("multiple edge in the interior of a long chain"));
            }
        }
    } else {
        let branch: Vec<usize> = (0..n).filter(|&i| degree[i] >= 3).collect();
        match branch.as_slice() {
            [] => {
                let start = *ends.iter().min().unwrap();
                (DynkinType::A(n), walk_chain(a, start))
            }
            [c] if degree[*c] == 3 => {
                let mut arms: Vec<Vec<usize>> = neighbours(a, *c)
                    .into_iter()
                    .map(|first| {
                        let mut arm = vec![first];
                        let mut prev = *c;
                        let mut cur = first;
                        while let Some(nx) = neighbours(a, cur).into_iter().find(|&x| x != prev) {
                            arm.push(nx);
                            prev = cur;
                            cur = nx;
                        }
                        arm
                    })
                    .collect();
                arms.sort_by_key(|arm| (arm.len(), arm[0]));
                let lens: Vec<usize> = arms.iter().map(|x| x.len()).collect();
                match lens.as_slice() {
                    [1, 1, k] => {
                        let mut order: Vec<usize> = arms[2].iter().rev().copied().collect();
                        order.push(*c);
                        order.push(arms[0][0]);
                        order.push(arms[1][0]);
                        (DynkinType::D(k + 3), order)
                    }
                    [1, 2, k] if (2..=4).contains(k) => {
                        let (short, mid, long) = (&arms[0], &arms[1], &arms[2]);
                        let mut order = vec![mid[1], short[0], mid[0], *c];
                        order.extend(long.iter().copied());
                        (DynkinType::E(k + 4), order)
                    }
                    _ => return Err(unrecognized(format!("branch arms {lens:?}"))),
                }
            }
            _ => return Err(unrecognized("more than one branch point")),
        }
    };
    let permuted = IntMatrix::from_fn(n, n, |i, j| a.get(perm[i], perm[j]));
    if permuted != ty.cartan() {
        return Err(unrecognized(format!("ordering does not reproduce the {ty} catalogue matrix")));
    }
    Ok((ty, perm))
}

/// Types of the irreducible components, sorted.
pub fn recognize_components(a: &IntMatrix) -> Result<Vec<DynkinType>, RootSystemError> {
    let mut out = Vec::new();
    for comp in components(a) {
        let sub = IntMatrix::from_fn(comp.len(), comp.len(), |i, j| a.get(comp[i], comp[j]));
        out.push(recognize(&sub)?.0);
    }
    out.sort();
    Ok(out)
}

/// Number of permutations of the nodes preserving the Cartan matrix.
pub fn diagram_automorphism_count(a: &IntMatrix) -> usize {
    use itertools::Itertools;
    let n = a.rows();
    (0..n)
        .permutations(n)
        .filter(|p| (0..n).all(|i| (0..n).all(|j| a.get(p[i], p[j]) == a.get(i, j))))
        .count()
}

/// `x − 2(x,α)/(α,α)·α`.
pub fn reflect(
    lattice: &IntersectionLattice,
    alpha: &DivisorClass,
    x: &DivisorClass,
) -> Result<DivisorClass, RootSystemError> {
    let aa = lattice.pair(alpha, alpha)?;
    if aa == 0 {
        return Err(RootSystemError::IsotropicRoot);
    }
    let num = 2 * lattice.pair(x, alpha)?;
    if num % aa != 0 {
        return Err(RootSystemError::NonIntegralReflection(aa));
    }
    Ok(x - &alpha.scaled(num / aa))
}

/// A lattice automorphism, acting on coordinate columns.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Debug)]
pub struct WeylElement {
    pub matrix: IntMatrix,
}

impl WeylElement {
    pub fn identity(rank: usize) -> Self {
        Self {
            matrix: IntMatrix::identity(rank),
        }
    }

    pub fn new(matrix: IntMatrix) -> Self {
        Self { matrix }
    }

    /// Reflection in `alpha` on the whole lattice.
    pub fn reflection(lattice: &IntersectionLattice, alpha: &DivisorClass) -> Result<Self, RootSystemError> {
        let r = lattice.rank();
        let mut m = IntMatrix::zeros(r, r);
        for j in 0..r {
            let col = reflect(lattice, alpha, &lattice.basis_vector(j))?;
            for i in 0..r {
                m.set(i, j, col.coords[i]);
            }
        }
        Ok(Self { matrix: m })
    }

    pub fn apply(&self, x: &DivisorClass) -> DivisorClass {
        DivisorClass::new(self.matrix.mul_vec(&x.coords))
    }

    /// `self ∘ other`
    pub fn compose(&self, other: &WeylElement) -> WeylElement {
        WeylElement::new(self.matrix.mul(&other.matrix))
    }

    pub fn preserves_form(&self, lattice: &IntersectionLattice) -> bool {
        self.matrix.transpose().mul(lattice.gram()).mul(&self.matrix) == *lattice.gram()
    }

    pub fn fixes(&self, x: &DivisorClass) -> bool {
        self.apply(x) == *x
    }

    pub fn is_identity(&self) -> bool {
        self.matrix.is_identity()
    }
}

/// A finite matrix group, elements sorted.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct WeylGroup {
    elements: Vec<WeylElement>,
}

impl WeylGroup {
    pub fn from_elements(mut elements: Vec<WeylElement>) -> Self {
        elements.sort();
        elements.dedup();
        Self { elements }
    }

    pub fn len(&self) -> usize {
        self.elements.len()
    }

    pub fn is_empty(&self) -> bool {
        self.elements.is_empty()
    }

    pub fn elements(&self) -> &[WeylElement] {
        &self.elements
    }

    pub fn contains(&self, w: &WeylElement) -> bool {
        self.elements.binary_search(w).is_ok()
    }

    pub fn is_subset_of(&self, other: &WeylGroup) -> bool {
        self.elements.iter().all(|w| other.contains(w))
    }

    /// The elements satisfying `pred`.
    pub fn filter(&self, pred: impl Fn(&WeylElement) -> bool) -> WeylGroup {
        WeylGroup {
            elements: self.elements.iter().filter(|w| pred(w)).cloned().collect(),
        }
    }
}

/// Closure of `gens` under composition, in canonical (sorted) order.
/// The empty generator list gives `{identity}`.
pub fn weyl_generate(rank: usize, gens: &[WeylElement], cap: usize) -> Result<WeylGroup, RootSystemError> {
    let id = IntMatrix::identity(rank);
    let mut seen: HashSet<IntMatrix> = HashSet::new();
    seen.insert(id.clone());
    let mut all = vec![id];
    let mut k = 0;
    while k < all.len() {
        let cur = all[k].clone();
        k += 1;
        for g in gens {
            let next = g.matrix.mul(&cur);
            if !seen.contains(&next) {
                if all.len() >= cap {
                    return Err(RootSystemError::BudgetExceeded(cap));
                }
                seen.insert(next.clone());
                all.push(next);
            }
        }
    }
    Ok(WeylGroup::from_elements(all.into_iter().map(WeylElement::new).collect()))
}

/// An orbit of a tuple of classes, with the stabilizer order when the group order is known.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct Orbit {
    pub points: Vec<Vec<DivisorClass>>,
    pub stabilizer_size: Option<usize>,
}

pub fn orbit(
    gens: &[WeylElement],
    seed: &[DivisorClass],
    cap: usize,
    group_order: Option<usize>,
) -> Result<Orbit, RootSystemError> {
    let mut seen: HashSet<Vec<DivisorClass>> = HashSet::new();
    let mut queue = VecDeque::new();
    seen.insert(seed.to_vec());
    queue.push_back(seed.to_vec());
    while let Some(cur) = queue.pop_front() {
        for g in gens {
            let next: Vec<DivisorClass> = cur.iter().map(|x| g.apply(x)).collect();
            if !seen.contains(&next) {
                if seen.len() >= cap {
                    return Err(RootSystemError::BudgetExceeded(cap));
                }
                seen.insert(next.clone());
                queue.push_back(next);
            }
        }
    }
    let mut points: Vec<_> = seen.into_iter().collect();
    points.sort();
    let stabilizer_size = group_order.map(|g| {
        assert_eq!(g % points.len(), 0, "orbit size must divide the group order");
        g / points.len()
    });
    Ok(Orbit { points, stabilizer_size })
}

/// Simple reflections acting on root coordinates (columns are images of simple roots).
pub fn simple_reflections_from_cartan(a: &IntMatrix) -> Vec<WeylElement> {
    let n = a.rows();
    (0..n)
        .map(|i| {
            // s_i(α_j) = α_j − A_ji α_i
            let mut m = IntMatrix::identity(n);
            for j in 0..n {
                m.set(i, j, m.get(i, j) - a.get(j, i));
            }
            WeylElement::new(m)
        })
        .collect()
}

/// Roots of the system with Cartan matrix `a`, in simple-root coordinates.
pub fn roots_from_cartan(a: &IntMatrix, cap: usize) -> Result<Vec<Vec<i64>>, RootSystemError> {
    let n = a.rows();
    let gens = simple_reflections_from_cartan(a);
    let mut seen = BTreeSet::new();
    for i in 0..n {
        let mut e = vec![0; n];
        e[i] = 1;
        let seed = DivisorClass::new(e);
        for x in orbit(&gens, &[seed], cap, None)?.points {
            seen.insert(x[0].coords.clone());
        }
    }
    Ok(seen.into_iter().collect())
}

#[derive(Clone, PartialEq, Eq, Debug)]
pub struct RootSystemData {
    ambient: IntersectionLattice,
    roots: Vec<DivisorClass>,
    norm_values: BTreeSet<i64>,
}

impl RootSystemData {
    /// Validates closure under negation and under reflections.
    pub fn new(ambient: IntersectionLattice, roots: Vec<DivisorClass>) -> Result<Self, RootSystemError> {
        let mut roots = roots;
        roots.sort();
        roots.dedup();
        for r in &roots {
            ambient.check(r)?;
        }
        if roots.iter().any(|r| r.is_zero()) {
            return Err(RootSystemError::NotARootSystem("contains zero".into()));
        }
        let set: HashSet<&DivisorClass> = roots.iter().collect();
        for r in &roots {
            if !set.contains(&-r) {
                return Err(RootSystemError::NotARootSystem(format!(
                    "{} has no negative",
                    ambient.format_class(r)
                )));
            }
        }
        for a in &roots {
            for b in &roots {
                let img = reflect(&ambient, a, b)?;
                if !set.contains(&img) {
                    return Err(RootSystemError::NotARootSystem(format!(
                        "reflection of {} in {} leaves the set",
                        ambient.format_class(b),
                        ambient.format_class(a)
                    )));
                }
            }
        }
        let norm_values = roots.iter().map(|r| ambient.square(r)).collect();
        Ok(Self {
            ambient,
            roots,
            norm_values,
        })
    }

    pub fn ambient(&self) -> &IntersectionLattice {
        &self.ambient
    }

    pub fn roots(&self) -> &[DivisorClass] {
        &self.roots
    }

    pub fn len(&self) -> usize {
        self.roots.len()
    }

    pub fn is_empty(&self) -> bool {
        self.roots.is_empty()
    }

    pub fn norm_values(&self) -> &BTreeSet<i64> {
        &self.norm_values
    }

    pub fn contains(&self, x: &DivisorClass) -> bool {
        self.roots.binary_search(x).is_ok()
    }

    /// Roots of extremal norm (the smallest square, since roots have negative square).
    pub fn long_roots(&self) -> Vec<DivisorClass> {
        let long = *self.norm_values.iter().next().expect("nonempty");
        self.roots.iter().filter(|r| self.ambient.square(r) == long).cloned().collect()
    }

    /// A simple system for a positive system cut out by a generic functional.
    pub fn simple_system(&self) -> Result<SimpleSystem, RootSystemError> {
        let r = self.ambient.rank();
        let functional = (1..50i64)
            .map(|seed| (0..r).map(|i| (seed * 7919 + (i as i64) * 104_729) % 1009 + 1).collect::<Vec<_>>())
            .find(|phi| {
                self.roots.iter().all(|x| x.coords.iter().zip(phi).map(|(a, b)| a * b).sum::<i64>() != 0)
            })
            .expect("a generic functional exists");
        let value = |x: &DivisorClass| x.coords.iter().zip(&functional).map(|(a, b)| a * b).sum::<i64>();
        let positive: Vec<&DivisorClass> = self.roots.iter().filter(|x| value(x) > 0).collect();
        let pos_set: HashSet<&DivisorClass> = positive.iter().copied().collect();
        let mut simple: Vec<DivisorClass> = positive
            .iter()
            .filter(|x| !positive.iter().any(|y| pos_set.contains(&(**x - *y))))
            .map(|x| (*x).clone())
            .collect();
        simple.sort_by_key(|x| (value(x), x.clone()));
        SimpleSystem::new(&self.ambient, simple)
    }
}

/// All classes of square −2 orthogonal to the given classes.
pub fn root_sublattice(
    lattice: &IntersectionLattice,
    orthogonal_to: &[DivisorClass],
) -> Result<RootSystemData, RootSystemError> {
    let mut constraints = vec![Constraint::square(-2)];
    constraints.extend(orthogonal_to.iter().map(|c| Constraint::pairing(c.clone(), 0)));
    let roots = lattice.enumerate_classes(&constraints)?;
    RootSystemData::new(lattice.clone(), roots)
}

#[derive(Clone, PartialEq, Eq, Debug)]
pub struct SimpleSystem {
    pub roots: Vec<DivisorClass>,
    pub dynkin: DynkinType,
}

impl SimpleSystem {
    /// Recognizes the type from the pairings; the order of `roots` is kept.
    pub fn new(lattice: &IntersectionLattice, roots: Vec<DivisorClass>) -> Result<Self, RootSystemError> {
        let gram = gram_of(lattice, &roots);
        if gram.determinant() == 0 {
            return Err(RootSystemError::NotARootSystem("simple roots are dependent".into()));
        }
        let (dynkin, _) = recognize(&cartan_from_gram(&gram)?)?;
        Ok(Self { roots, dynkin })
    }

    pub fn rank(&self) -> usize {
        self.roots.len()
    }

    pub fn cartan(&self, lattice: &IntersectionLattice) -> IntMatrix {
        cartan_from_gram(&gram_of(lattice, &self.roots)).expect("validated at construction")
    }

    pub fn gram(&self, lattice: &IntersectionLattice) -> IntMatrix {
        gram_of(lattice, &self.roots)
    }

    /// Coordinates of `x` in the simple roots, if `x` lies in their rational span.
    pub fn coordinates(&self, x: &DivisorClass) -> Option<Vec<Rational>> {
        let cols: Vec<&[i64]> = self.roots.iter().map(|r| r.coords.as_slice()).collect();
        let m = RatMatrix::from_fn(x.rank(), cols.len(), |i, j| Rational::from_integer(cols[j][i]));
        let b: Vec<Rational> = x.coords.iter().map(|&v| Rational::from_integer(v)).collect();
        m.solve(&b)
    }

    /// Integer coordinates, for members of the root lattice.
    pub fn integer_coordinates(&self, x: &DivisorClass) -> Option<Vec<i64>> {
        let c = self.coordinates(x)?;
        c.iter().all(|q| q.is_integer()).then(|| c.iter().map(|q| q.to_integer()).collect())
    }

    pub fn combination(&self, coeffs: &[i64]) -> DivisorClass {
        assert_eq!(coeffs.len(), self.roots.len());
        let mut out = DivisorClass::zero(self.roots[0].rank());
        for (c, r) in coeffs.iter().zip(&self.roots) {
            out += &r.scaled(*c);
        }
        out
    }

    pub fn is_positive(&self, x: &DivisorClass) -> bool {
        self.coordinates(x)
            .is_some_and(|c| c.iter().all(|q| *q >= Rational::from_integer(0)))
    }

    /// Reflections in the simple roots, on the whole lattice.
    pub fn reflections(&self, lattice: &IntersectionLattice) -> Result<Vec<WeylElement>, RootSystemError> {
        self.roots.iter().map(|a| WeylElement::reflection(lattice, a)).collect()
    }
}

/// The simple systems fixed by the constructions on blown-up surfaces.
#[derive(Clone, Copy, PartialEq, Eq, Hash, Debug)]
pub enum StandardCase {
    /// `D_{n+1}` on F1 blown up at `n+1` points.
    DOnF1(usize),
    /// `A_{2n−1}` on F1 blown up at `2n` points.
    AOnF1(usize),
    /// `E6` on P2 blown up at 6 points.
    E6OnP2,
    /// `B_n`, folded from `D_{n+1}` on `n+1` points.
    B(usize),
    /// `C_n`, folded from `A_{2n−1}` on `2n` points.
    C(usize),
    /// `G2`, folded from `D4` on 4 points.
    G2,
    /// `F4`, folded from `E6` on the cubic surface.
    F4,
}

impl StandardCase {
    pub fn lattice(self) -> IntersectionLattice {
        match self {
            StandardCase::DOnF1(n) | StandardCase::B(n) => IntersectionLattice::f1(n + 1),
            StandardCase::AOnF1(n) | StandardCase::C(n) => IntersectionLattice::f1(2 * n),
            StandardCase::G2 => IntersectionLattice::f1(4),
            StandardCase::E6OnP2 | StandardCase::F4 => IntersectionLattice::p2(6),
        }
    }

    pub fn expected_type(self) -> DynkinType {
        match self {
            // D3 coincides with A3
            StandardCase::DOnF1(2) => DynkinType::A(3),
            StandardCase::DOnF1(n) => DynkinType::D(n + 1),
            StandardCase::AOnF1(n) => DynkinType::A(2 * n - 1),
            StandardCase::E6OnP2 => DynkinType::E(6),
            StandardCase::B(n) => DynkinType::B(n),
            // C2 coincides with B2
            StandardCase::C(2) => DynkinType::B(2),
            StandardCase::C(n) => DynkinType::C(n),
            StandardCase::G2 => DynkinType::G2,
            StandardCase::F4 => DynkinType::F4,
        }
    }
}

/// The cubic-surface simple roots: `l1−l2, l2−l3, h−l1−l2−l3, l3−l4, l4−l5, l5−l6`.
pub fn e6_simple_roots(l: &IntersectionLattice) -> Vec<DivisorClass> {
    vec![
        l.l(1) - l.l(2),
        l.l(2) - l.l(3),
        l.h() - l.l(1) - l.l(2) - l.l(3),
        l.l(3) - l.l(4),
        l.l(4) - l.l(5),
        l.l(5) - l.l(6),
    ]
}

/// `α1 = l1−l2, α2 = f−l1−l2, α_k = l_{k−1}−l_k` for `D_{n+1}`.
pub fn d_simple_roots(l: &IntersectionLattice, n: usize) -> Vec<DivisorClass> {
    let mut out = vec![l.l(1) - l.l(2), l.f() - l.l(1) - l.l(2)];
    for k in 3..=n + 1 {
        out.push(l.l(k - 1) - l.l(k));
    }
    out
}

/// `α_i = l_i − l_{i+1}` for `A_{2n−1}`.
pub fn a_simple_roots(l: &IntersectionLattice, n: usize) -> Vec<DivisorClass> {
    (1..2 * n).map(|i| l.l(i) - l.l(i + 1)).collect()
}

pub fn standard_simple_system(
    case: StandardCase,
    l: &IntersectionLattice,
) -> Result<SimpleSystem, RootSystemError> {
    let expected = case.lattice();
    if l.model() != expected.model() || l.points() != expected.points() {
        return Err(RootSystemError::LatticeMismatch(format!(
            "{case:?} lives on {expected}, got {l}"
        )));
    }
    let roots = match case {
        StandardCase::DOnF1(n) => d_simple_roots(l, n),
        StandardCase::AOnF1(n) => a_simple_roots(l, n),
        StandardCase::E6OnP2 => e6_simple_roots(l),
        StandardCase::B(n) => {
            // β1 = f − 2l2, β_k = 2α_{k+1}
            let d = d_simple_roots(l, n);
            let mut out = vec![l.f() - l.l(2).scaled(2)];
            out.extend(d[2..].iter().map(|a| a.scaled(2)));
            out
        }
        StandardCase::C(n) => {
            // β_k = ε_k − ε_{k+1}, β_n = 2ε_n with ε_k = l_k − l_{2n+1−k}
            let eps = |k: usize| l.l(k) - l.l(2 * n + 1 - k);
            let mut out: Vec<DivisorClass> = (1..n).map(|k| eps(k) - eps(k + 1)).collect();
            out.push(eps(n).scaled(2));
            out
        }
        StandardCase::G2 => vec![
            l.f() - l.l(2).scaled(2) + l.l(3) - l.l(4),
            (l.l(2) - l.l(3)).scaled(3),
        ],
        StandardCase::F4 => vec![
            l.l(1) - l.l(2) + l.l(5) - l.l(6),
            l.l(2) - l.l(3) + l.l(4) - l.l(5),
            (l.h() - l.l(1) - l.l(2) - l.l(3)).scaled(2),
            (l.l(3) - l.l(4)).scaled(2),
        ],
    };
    let sys = SimpleSystem::new(l, roots)?;
    if sys.dynkin != case.expected_type() {
        return Err(RootSystemError::LatticeMismatch(format!(
            "{case:?} recognized as {}",
            sys.dynkin
        )));
    }
    Ok(sys)
}

/// The lattice-level constraint classes for a simply-laced case: `{K, f}`,
/// `{K, f, s}` or `{K}`.
pub fn constraint_classes(case: StandardCase, l: &IntersectionLattice) -> Vec<DivisorClass> {
    let k = l.canonical_class();
    match case {
        StandardCase::DOnF1(_) | StandardCase::B(_) | StandardCase::G2 => vec![k, l.f()],
        StandardCase::AOnF1(_) | StandardCase::C(_) => vec![k, l.f(), l.s()],
        StandardCase::E6OnP2 | StandardCase::F4 => vec![k],
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn catalogue_round_trips() {
        let types = [
            DynkinType::A(1),
            DynkinType::A(2),
            DynkinType::A(5),
            DynkinType::B(2),
            DynkinType::B(3),
            DynkinType::B(5),
            DynkinType::C(3),
            DynkinType::C(4),
            DynkinType::D(4),
            DynkinType::D(5),
            DynkinType::D(7),
            DynkinType::E(6),
            DynkinType::E(7),
            DynkinType::E(8),
            DynkinType::F4,
            DynkinType::G2,
        ];
        for t in types {
            let (r, _) = recognize(&t.cartan()).unwrap();
            assert_eq!(r, t);
        }
    }

    #[test]
    fn recognition_is_order_insensitive() {
        use itertools::Itertools;
        for t in [DynkinType::D(4), DynkinType::F4, DynkinType::C(4), DynkinType::B(4), DynkinType::E(6)] {
            let a = t.cartan();
            let n = a.rows();
            for p in (0..n).permutations(n).take(200) {
                let b = IntMatrix::from_fn(n, n, |i, j| a.get(p[i], p[j]));
                assert_eq!(recognize(&b).unwrap().0, t);
            }
        }
    }

    #[test]
    fn small_ranks_normalize() {
        // D3 is A3 and C2 is B2
        let c2 = IntMatrix::from_rows(&[[2, -1], [-2, 2]]);
        assert_eq!(recognize(&c2).unwrap().0, DynkinType::B(2));
        assert_eq!(recognize(&IntMatrix::from_rows(&[[2]])).unwrap().0, DynkinType::A(1));
        let a1a1 = IntMatrix::from_rows(&[[2, 0], [0, 2]]);
        assert!(recognize(&a1a1).is_err());
        assert_eq!(recognize_components(&a1a1).unwrap(), vec![DynkinType::A(1); 2]);
        let affine_a2 = IntMatrix::from_rows(&[[2, -1, -1], [-1, 2, -1], [-1, -1, 2]]);
        assert!(recognize(&affine_a2).is_err());
    }

    #[test]
    fn weyl_orders_from_cartan() {
        for t in [DynkinType::A(3), DynkinType::B(3), DynkinType::C(3), DynkinType::D(4), DynkinType::F4, DynkinType::G2] {
            let g = weyl_generate(t.rank(), &simple_reflections_from_cartan(&t.cartan()), DEFAULT_WEYL_CAP).unwrap();
            assert_eq!(g.len() as u64, t.weyl_order(), "{t}");
            assert_eq!(roots_from_cartan(&t.cartan(), 10_000).unwrap().len(), t.root_count());
        }
        for n in 2..=4 {
            let t = DynkinType::B(n);
            let g = weyl_generate(t.rank(), &simple_reflections_from_cartan(&t.cartan()), DEFAULT_WEYL_CAP).unwrap();
            assert_eq!(g.len() as u64, (1 << n) * (1..=n as u64).product::<u64>());
        }
    }

    #[test]
    fn root_sublattices() {
        let l = IntersectionLattice::f1(4);
        let k = l.canonical_class();
        let d4 = root_sublattice(&l, &[k.clone(), l.f()]).unwrap();
        assert_eq!(d4.len(), 24);
        assert_eq!(d4.norm_values().iter().copied().collect::<Vec<_>>(), vec![-2]);
        let a3 = root_sublattice(&l, &[k, l.f(), l.s()]).unwrap();
        assert_eq!(a3.len(), 12);
        assert_eq!(a3.simple_system().unwrap().dynkin, DynkinType::A(3));
        let p = IntersectionLattice::p2(6);
        let e6 = root_sublattice(&p, &[p.canonical_class()]).unwrap();
        assert_eq!(e6.len(), 72);
        assert_eq!(e6.simple_system().unwrap().dynkin, DynkinType::E(6));
        assert_eq!(d4.simple_system().unwrap().dynkin, DynkinType::D(4));
    }

    #[test]
    fn standard_systems_have_the_stated_types() {
        let cases = [
            StandardCase::DOnF1(2),
            StandardCase::DOnF1(3),
            StandardCase::DOnF1(4),
            StandardCase::AOnF1(2),
            StandardCase::AOnF1(3),
            StandardCase::E6OnP2,
            StandardCase::B(2),
            StandardCase::B(3),
            StandardCase::B(4),
            StandardCase::C(2),
            StandardCase::C(3),
            StandardCase::G2,
            StandardCase::F4,
        ];
        for c in cases {
            let l = c.lattice();
            let s = standard_simple_system(c, &l).unwrap();
            assert_eq!(s.dynkin, c.expected_type());
        }
        assert_eq!(StandardCase::DOnF1(2).expected_type(), DynkinType::A(3));
    }

    #[test]
    fn listed_classes() {
        let l = IntersectionLattice::f1(3);
        let b2 = standard_simple_system(StandardCase::B(2), &l).unwrap();
        assert_eq!(b2.roots, vec![l.parse_class("f-2l2").unwrap(), l.parse_class("2l2-2l3").unwrap()]);
        let l = IntersectionLattice::f1(4);
        let g2 = standard_simple_system(StandardCase::G2, &l).unwrap();
        assert_eq!(g2.cartan(&l), IntMatrix::from_rows(&[[2, -1], [-3, 2]]));
        let d4 = standard_simple_system(StandardCase::DOnF1(3), &l).unwrap();
        assert_eq!(recognize(&d4.cartan(&l)).unwrap().0, DynkinType::D(4));
        let a1 = SimpleSystem::new(&l, vec![l.l(1) - l.l(2)]).unwrap();
        assert_eq!(a1.cartan(&l), IntMatrix::from_rows(&[[2]]));
        let p = IntersectionLattice::p2(6);
        let f4 = standard_simple_system(StandardCase::F4, &p).unwrap();
        assert_eq!(f4.roots[0], p.parse_class("l1-l2+l5-l6").unwrap());
        assert!(standard_simple_system(StandardCase::F4, &l).is_err());
    }

    #[test]
    fn reflections() {
        let l = IntersectionLattice::f1(4);
        assert_eq!(reflect(&l, &(l.l(1) - l.l(2)), &l.l(1)).unwrap(), l.l(2));
        let a = l.f() - l.l(1) - l.l(2);
        assert_eq!(reflect(&l, &a, &a).unwrap(), -&a);
        let p = IntersectionLattice::p2(6);
        let a0 = p.parse_class("2h-l1-l2-l3-l4-l5-l6").unwrap();
        assert_eq!(
            reflect(&p, &a0, &p.l(1)).unwrap(),
            p.parse_class("2h-l2-l3-l4-l5-l6").unwrap()
        );
        // reflection in a folded root moves s off the lattice
        let beta = l.parse_class("f-2l2").unwrap();
        assert_eq!(reflect(&l, &beta, &l.s()), Err(RootSystemError::NonIntegralReflection(-4)));
        assert!(WeylElement::reflection(&l, &beta).is_err());
    }

    #[test]
    fn d4_weyl_group() {
        let l = IntersectionLattice::f1(4);
        let d4 = standard_simple_system(StandardCase::DOnF1(3), &l).unwrap();
        let w = weyl_generate(l.rank(), &d4.reflections(&l).unwrap(), DEFAULT_WEYL_CAP).unwrap();
        assert_eq!(w.len(), 192);
        for g in w.elements() {
            assert!(g.preserves_form(&l));
            assert!(g.fixes(&l.canonical_class()));
            assert!(g.fixes(&l.f()));
        }
        // the root set is closed under the group
        let roots = root_sublattice(&l, &[l.canonical_class(), l.f()]).unwrap();
        for g in w.elements().iter().step_by(7) {
            for r in roots.roots() {
                assert!(roots.contains(&g.apply(r)));
            }
        }
        let o = orbit(&d4.reflections(&l).unwrap(), &[l.canonical_class()], 100, Some(192)).unwrap();
        assert_eq!(o.points.len(), 1);
        assert_eq!(o.stabilizer_size, Some(192));
    }

    #[test]
    fn empty_generators_give_identity() {
        let w = weyl_generate(5, &[], 10).unwrap();
        assert_eq!(w.len(), 1);
        assert!(w.elements()[0].is_identity());
    }

    #[test]
    fn budget_is_enforced() {
        let l = IntersectionLattice::f1(4);
        let d4 = standard_simple_system(StandardCase::DOnF1(3), &l).unwrap();
        assert_eq!(
            weyl_generate(l.rank(), &d4.reflections(&l).unwrap(), 100),
            Err(RootSystemError::BudgetExceeded(100))
        );
    }

    proptest! {
        #[test]
        fn reflection_is_an_involution(root_idx in 0usize..24, x in proptest::collection::vec(-6i64..6, 6)) {
            let l = IntersectionLattice::f1(4);
            let roots = root_sublattice(&l, &[l.canonical_class(), l.f()]).unwrap();
            let a = &roots.roots()[root_idx];
            let x = DivisorClass::new(x);
            let once = reflect(&l, a, &x).unwrap();
            prop_assert_eq!(reflect(&l, a, &once).unwrap(), x.clone());
            prop_assert_eq!(l.dot(&once, &once), l.dot(&x, &x));
        }
    }
}
