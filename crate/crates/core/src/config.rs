//! Exceptional systems and G-configurations, simple transitivity of the
//! folded Weyl groups, blow-down validity, and the lines, triangles and
//! double-sixes of the cubic surface.

use std::collections::{BTreeSet, HashMap, HashSet};

use thiserror::Error;

use crate::abelian::GroupElement;
use crate::folding::{folded_weyl_group, FoldedType, FoldingError};
use crate::lattice::{Constraint, DivisorClass, IntersectionLattice, Model};
use crate::moduli::{free_parametrization, PointAssignment};
use crate::rootsys::{
    root_sublattice, standard_simple_system, weyl_generate, RootSystemError, StandardCase, WeylElement, WeylGroup,
};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ConfigError {
    #[error(transparent)]
    RootSystem(#[from] RootSystemError),
    #[error(transparent)]
    Folding(#[from] FoldingError),
    #[error("lattice does not match the case")]
    LatticeMismatch,
    #[error("class {0} is not exceptional")]
    NotExceptional(String),
    #[error("classes {0} and {1} meet")]
    NotDisjoint(usize, usize),
    #[error("class {0} meets f")]
    MeetsFiber(usize),
    #[error("the points violate the case constraints")]
    PointConstraint,
    #[error("no positive root exchanges the two sixes")]
    NoRootFound,
}

fn is_exceptional(l: &IntersectionLattice, e: &DivisorClass) -> bool {
    l.square(e) == -1 && l.dot(e, &l.canonical_class()) == -1
}

/// Classes each member of a system must be orthogonal to.
fn orthogonal_to(case: FoldedType, l: &IntersectionLattice) -> Vec<DivisorClass> {
    match case {
        FoldedType::B(_) | FoldedType::G2 => vec![l.f()],
        FoldedType::C(_) => vec![l.f(), l.s()],
        FoldedType::F4 => Vec::new(),
    }
}

/// The case constraints on the points `y_i` of a system, read as identities
/// between linear forms in the free parameters.
fn forms_satisfy(case: FoldedType, y: &[Vec<i64>]) -> bool {
    let add = |a: &[i64], b: &[i64]| a.iter().zip(b).map(|(p, q)| p + q).collect::<Vec<_>>();
    let zero = |a: &[i64]| a.iter().all(|&v| v == 0);
    match case {
        FoldedType::B(_) => zero(&y[0]),
        FoldedType::C(n) => (0..n).all(|i| zero(&add(&y[i], &y[2 * n - 1 - i]))),
        FoldedType::G2 => zero(&y[0]) && y[3] == add(&y[1], &y[2]),
        FoldedType::F4 => {
            let c = add(&y[0], &y[5]);
            add(&y[1], &y[4]) == c && add(&y[2], &y[3]) == c
        }
    }
}

/// `y_e` of a class as a linear form in the free parameters of the case.
fn point_form(case: FoldedType, l: &IntersectionLattice, e: &DivisorClass) -> Vec<i64> {
    let p = free_parametrization(case);
    let c = l.point_coords(e);
    (0..p.cols())
        .map(|j| (0..p.rows()).map(|i| c[i] * p.get(i, j)).sum())
        .collect()
}

/// Orbit of the standard tuple `(l1, …, lk)` under the Weyl group that keeps
/// the base surface: roots orthogonal to `K` and `f` on `F1`, to `K` on `P2`.
pub struct BlowdownChecker {
    lattice: IntersectionLattice,
    orbits: HashMap<usize, HashSet<Vec<DivisorClass>>>,
    generators: Vec<WeylElement>,
}

impl BlowdownChecker {
    pub fn new(lattice: &IntersectionLattice) -> Result<Self, ConfigError> {
        let mut fixed = vec![lattice.canonical_class()];
        if lattice.model() == Model::F1Blowup {
            fixed.push(lattice.f());
        }
        let roots = root_sublattice(lattice, &fixed)?;
        let generators = if roots.is_empty() {
            Vec::new()
        } else {
            roots.simple_system()?.reflections(lattice)?
        };
        Ok(Self {
            lattice: lattice.clone(),
            orbits: HashMap::new(),
            generators,
        })
    }

    pub fn check(&mut self, classes: &[DivisorClass]) -> Result<bool, ConfigError> {
        let l = &self.lattice;
        for (i, e) in classes.iter().enumerate() {
            if !is_exceptional(l, e) {
                return Ok(false);
            }
            if classes[..i].iter().any(|x| l.dot(x, e) != 0) {
                return Ok(false);
            }
        }
        let k = classes.len();
        if k > l.points() {
            return Ok(false);
        }
        if !self.orbits.contains_key(&k) {
            let seed: Vec<DivisorClass> = (1..=k).map(|i| l.l(i)).collect();
            let orbit = crate::rootsys::orbit(&self.generators, &seed, crate::rootsys::DEFAULT_WEYL_CAP, None)?;
            self.orbits.insert(k, orbit.points.into_iter().collect());
        }
        Ok(self.orbits[&k].contains(classes))
    }
}

/// Whether the tuple can be blown down in order to reach the base surface
/// (`F1` or `P2`), decided by Weyl-equivalence to `(l1, …, lk)`.
pub fn is_blowdown_sequence(lattice: &IntersectionLattice, classes: &[DivisorClass]) -> Result<bool, ConfigError> {
    BlowdownChecker::new(lattice)?.check(classes)
}

/// All exceptional systems of the case, sorted.
pub fn enumerate_exceptional_systems(
    case: FoldedType,
    lattice: &IntersectionLattice,
) -> Result<Vec<Vec<DivisorClass>>, ConfigError> {
    if *lattice != case.lattice() {
        return Err(ConfigError::LatticeMismatch);
    }
    // constraining up front keeps the search finite when K² ≤ 0
    let mut constraints = vec![Constraint::square(-1), Constraint::pairing(lattice.canonical_class(), -1)];
    constraints.extend(orthogonal_to(case, lattice).into_iter().map(|a| Constraint::pairing(a, 0)));
    let candidates = lattice.enumerate_classes(&constraints).map_err(RootSystemError::from)?;
    let forms: Vec<Vec<i64>> = candidates.iter().map(|e| point_form(case, lattice, e)).collect();
    let k = lattice.points();
    let mut checker = BlowdownChecker::new(lattice)?;
    let mut out = Vec::new();
    let mut chosen: Vec<usize> = Vec::with_capacity(k);
    fn walk(
        k: usize,
        cands: &[DivisorClass],
        lattice: &IntersectionLattice,
        chosen: &mut Vec<usize>,
        found: &mut Vec<Vec<usize>>,
    ) {
        if chosen.len() == k {
            found.push(chosen.clone());
            return;
        }
        for i in 0..cands.len() {
            if chosen.iter().all(|&j| j != i && lattice.dot(&cands[i], &cands[j]) == 0) {
                chosen.push(i);
                walk(k, cands, lattice, chosen, found);
                chosen.pop();
            }
        }
    }
    let mut tuples = Vec::new();
    walk(k, &candidates, lattice, &mut chosen, &mut tuples);
    for t in tuples {
        let y: Vec<Vec<i64>> = t.iter().map(|&i| forms[i].clone()).collect();
        if !forms_satisfy(case, &y) {
            continue;
        }
        let classes: Vec<DivisorClass> = t.iter().map(|&i| candidates[i].clone()).collect();
        if checker.check(&classes)? {
            out.push(classes);
        }
    }
    out.sort();
    Ok(out)
}

#[derive(Clone, PartialEq, Eq, Debug)]
pub enum TransitivityVerdict {
    SimplyTransitive,
    OrderMismatch { group: usize, systems: usize },
    /// A group element sends the base system outside the list.
    LeavesSet { element: usize },
    /// Two group elements agree on the base system.
    NontrivialStabilizer { first: usize, second: usize },
}

pub fn simple_transitivity_check(systems: &[Vec<DivisorClass>], w: &WeylGroup) -> TransitivityVerdict {
    if w.len() != systems.len() {
        return TransitivityVerdict::OrderMismatch {
            group: w.len(),
            systems: systems.len(),
        };
    }
    let set: HashSet<&Vec<DivisorClass>> = systems.iter().collect();
    let base = &systems[0];
    let mut seen: HashMap<Vec<DivisorClass>, usize> = HashMap::new();
    for (i, g) in w.elements().iter().enumerate() {
        let image: Vec<DivisorClass> = base.iter().map(|e| g.apply(e)).collect();
        if !set.contains(&image) {
            return TransitivityVerdict::LeavesSet { element: i };
        }
        if let Some(&j) = seen.get(&image) {
            return TransitivityVerdict::NontrivialStabilizer { first: j, second: i };
        }
        seen.insert(image, i);
    }
    TransitivityVerdict::SimplyTransitive
}

/// The folded Weyl group of a case acting on its lattice.
pub fn folded_weyl(case: FoldedType) -> Result<WeylGroup, ConfigError> {
    Ok(folded_weyl_group(case.fold_case(), crate::rootsys::DEFAULT_WEYL_CAP)?.group)
}

#[derive(Clone, PartialEq, Eq, Debug)]
pub struct GConfiguration {
    pub case: FoldedType,
    pub classes: Vec<DivisorClass>,
    pub pa: PointAssignment,
}

impl GConfiguration {
    pub fn new(case: FoldedType, classes: Vec<DivisorClass>, pa: PointAssignment) -> Result<Self, ConfigError> {
        let l = case.lattice();
        if classes.len() != l.points() {
            return Err(ConfigError::LatticeMismatch);
        }
        for (i, e) in classes.iter().enumerate() {
            if !is_exceptional(&l, e) {
                return Err(ConfigError::NotExceptional(l.format_class(e)));
            }
            for j in 0..i {
                if l.dot(e, &classes[j]) != 0 {
                    return Err(ConfigError::NotDisjoint(j, i));
                }
            }
            if orthogonal_to(case, &l).iter().any(|a| l.dot(a, e) != 0) {
                return Err(ConfigError::MeetsFiber(i));
            }
        }
        if !pa.satisfies(case) {
            return Err(ConfigError::PointConstraint);
        }
        let cfg = Self { case, classes, pa };
        let y = PointAssignment::new(l.model(), cfg.pa.sigma, cfg.points());
        if !y.satisfies(case) {
            return Err(ConfigError::PointConstraint);
        }
        Ok(cfg)
    }

    /// `y_i = e_i ∩ Σ`.
    pub fn points(&self) -> Vec<GroupElement> {
        let l = self.case.lattice();
        self.classes
            .iter()
            .map(|e| self.pa.sigma.combine(l.point_coords(e), &self.pa.points))
            .collect()
    }
}

#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum Position {
    Interior,
    Boundary,
}

/// General position of the points. B: all points distinct (so `x_i ≠ 0` for
/// `i ≥ 2`). C: `x_i` distinct and `x_i + x_j ≠ 0` for all `i, j`. G2:
/// `x1, ±x2, ±x3, ±x4` distinct. F4: distinct, no three on a line
/// (`x_i + x_j + x_k ≠ 0`), not all six on a conic (`Σ x_i ≠ 0`).
pub fn general_position(case: FoldedType, pa: &PointAssignment) -> Position {
    let s = &pa.sigma;
    let x = &pa.points;
    let distinct = |v: &[GroupElement]| v.iter().collect::<HashSet<_>>().len() == v.len();
    let ok = match case {
        FoldedType::B(_) => distinct(x),
        FoldedType::C(n) => {
            let half = &x[..n];
            distinct(half) && (0..n).all(|i| (i..n).all(|j| !s.add(half[i], half[j]).is_zero()))
        }
        FoldedType::G2 => {
            let mut v = vec![x[0]];
            for &p in &x[1..] {
                v.push(p);
                v.push(s.neg(p));
            }
            distinct(&v)
        }
        FoldedType::F4 => {
            distinct(x)
                && !s.sum(x).is_zero()
                && (0..6).all(|i| {
                    (i + 1..6).all(|j| (j + 1..6).all(|k| !s.sum(&[x[i], x[j], x[k]]).is_zero()))
                })
        }
    };
    if ok {
        Position::Interior
    } else {
        Position::Boundary
    }
}

/// Two disjoint sixes, `partner(L[i]) = L′[i]`.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Debug)]
pub struct DoubleSix {
    pub first: Vec<DivisorClass>,
    pub second: Vec<DivisorClass>,
}

impl DoubleSix {
    pub fn is_valid(&self, l: &IntersectionLattice) -> bool {
        let six = |v: &[DivisorClass]| {
            v.len() == 6
                && v.iter().all(|e| is_exceptional(l, e))
                && (0..6).all(|i| (i + 1..6).all(|j| l.dot(&v[i], &v[j]) == 0))
        };
        six(&self.first)
            && six(&self.second)
            && (0..6).all(|i| (0..6).all(|j| l.dot(&self.first[i], &self.second[j]) == i64::from(i != j)))
    }
}

#[derive(Clone, Debug)]
pub struct CubicCombinatorics {
    pub lines: Vec<DivisorClass>,
    pub triangles: Vec<[DivisorClass; 3]>,
    pub double_sixes: Vec<DoubleSix>,
}

pub fn cubic_combinatorics(l: &IntersectionLattice) -> Result<CubicCombinatorics, ConfigError> {
    if *l != IntersectionLattice::p2(6) {
        return Err(ConfigError::LatticeMismatch);
    }
    let lines = l.exceptional_classes();
    let minus_k = -&l.canonical_class();
    let n = lines.len();
    let mut triangles = Vec::new();
    for i in 0..n {
        for j in i + 1..n {
            if l.dot(&lines[i], &lines[j]) != 1 {
                continue;
            }
            for k in j + 1..n {
                if l.dot(&lines[i], &lines[k]) == 1 && l.dot(&lines[j], &lines[k]) == 1 {
                    let sum = &(&lines[i] + &lines[j]) + &lines[k];
                    assert_eq!(sum, minus_k, "meeting lines sum to −K");
                    triangles.push([lines[i].clone(), lines[j].clone(), lines[k].clone()]);
                }
            }
        }
    }
    // sixes: 6-cliques of the disjointness graph
    let mut sixes: Vec<Vec<usize>> = Vec::new();
    fn grow(l: &IntersectionLattice, lines: &[DivisorClass], cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == 6 {
            out.push(cur.clone());
            return;
        }
        let start = cur.last().map_or(0, |&x| x + 1);
        for i in start..lines.len() {
            if cur.iter().all(|&j| l.dot(&lines[i], &lines[j]) == 0) {
                cur.push(i);
                grow(l, lines, cur, out);
                cur.pop();
            }
        }
    }
    grow(l, &lines, &mut Vec::new(), &mut sixes);
    let mut double_sixes: BTreeSet<DoubleSix> = BTreeSet::new();
    for six in &sixes {
        let first: Vec<DivisorClass> = six.iter().map(|&i| lines[i].clone()).collect();
        let second: Option<Vec<DivisorClass>> = (0..6)
            .map(|a| {
                let partners: Vec<&DivisorClass> = lines
                    .iter()
                    .filter(|m| (0..6).all(|b| l.dot(m, &first[b]) == i64::from(a != b)))
                    .collect();
                (partners.len() == 1).then(|| partners[0].clone())
            })
            .collect();
        if let Some(second) = second {
            let ds = DoubleSix { first, second };
            if ds.is_valid(l) {
                // store with the lexicographically smaller six first
                let flipped = DoubleSix {
                    first: ds.second.clone(),
                    second: ds.first.clone(),
                };
                double_sixes.insert(ds.min(flipped));
            }
        }
    }
    Ok(CubicCombinatorics {
        lines,
        triangles,
        double_sixes: double_sixes.into_iter().collect(),
    })
}

/// Positive roots of `E6` on the cubic lattice: nonnegative coordinates in the
/// fixed simple system `l1−l2, l2−l3, h−l1−l2−l3, l3−l4, l4−l5, l5−l6`.
pub fn e6_positive_roots(l: &IntersectionLattice) -> Result<Vec<DivisorClass>, ConfigError> {
    let simple = standard_simple_system(StandardCase::E6OnP2, l)?;
    let roots = root_sublattice(l, &[l.canonical_class()])?;
    Ok(roots.roots().iter().filter(|r| simple.is_positive(r)).cloned().collect())
}

/// The unique positive root whose reflection exchanges the two sixes.
pub fn double_six_to_root(
    l: &IntersectionLattice,
    ds: &DoubleSix,
    positive: &[DivisorClass],
) -> Result<DivisorClass, ConfigError> {
    let second: BTreeSet<&DivisorClass> = ds.second.iter().collect();
    let mut found = positive.iter().filter(|a| {
        let s = WeylElement::reflection(l, a).expect("roots reflect integrally");
        let img: Vec<DivisorClass> = ds.first.iter().map(|e| s.apply(e)).collect();
        img.iter().collect::<BTreeSet<_>>() == second
    });
    let first = found.next().ok_or(ConfigError::NoRootFound)?;
    if found.next().is_some() {
        return Err(ConfigError::NoRootFound);
    }
    Ok(first.clone())
}

/// `Δ0 = {h−l1−l6, h−l2−l5, h−l3−l4}`.
pub fn special_triangle(l: &IntersectionLattice) -> [DivisorClass; 3] {
    let p = |t: &str| l.parse_class(t).expect("valid class");
    [p("h-l1-l6"), p("h-l2-l5"), p("h-l3-l4")]
}

pub fn weyl_e6(l: &IntersectionLattice) -> Result<WeylGroup, ConfigError> {
    let simple = standard_simple_system(StandardCase::E6OnP2, l)?;
    Ok(weyl_generate(l.rank(), &simple.reflections(l)?, crate::rootsys::DEFAULT_WEYL_CAP)?)
}

#[derive(Clone, Debug)]
pub struct TriangleStabilizer {
    pub group: WeylGroup,
    pub orbit_size: usize,
    /// Order of the permutation group the stabilizer induces on the three lines.
    pub induced_on_lines: usize,
    /// Order of the subgroup fixing each line.
    pub pointwise_order: usize,
}

pub fn triangle_stabilizer(
    triangle: &[DivisorClass; 3],
    ordered: bool,
    w: &WeylGroup,
) -> TriangleStabilizer {
    let key = |t: Vec<DivisorClass>| {
        if ordered {
            t
        } else {
            let mut t = t;
            t.sort();
            t
        }
    };
    let base = key(triangle.to_vec());
    let mut orbit: HashSet<Vec<DivisorClass>> = HashSet::new();
    let mut stab = Vec::new();
    for g in w.elements() {
        let img = key(triangle.iter().map(|e| g.apply(e)).collect());
        if img == base {
            stab.push(g.clone());
        }
        orbit.insert(img);
    }
    let group = WeylGroup::from_elements(stab);
    let perms: BTreeSet<Vec<usize>> = group
        .elements()
        .iter()
        .map(|g| {
            triangle
                .iter()
                .map(|e| {
                    let img = g.apply(e);
                    triangle.iter().position(|t| *t == img).expect("stabilizer permutes the lines")
                })
                .collect()
        })
        .collect();
    let pointwise_order = group.elements().iter().filter(|g| triangle.iter().all(|e| g.fixes(e))).count();
    TriangleStabilizer {
        orbit_size: orbit.len(),
        induced_on_lines: perms.len(),
        pointwise_order,
        group,
    }
}

/// `W(D4)` generated by reflections in `h−l1−l2−l3, l1−l6, l2−l5, l3−l4`.
pub fn weyl_d4_in_e6(l: &IntersectionLattice) -> Result<WeylGroup, ConfigError> {
    let gens = ["h-l1-l2-l3", "l1-l6", "l2-l5", "l3-l4"]
        .iter()
        .map(|t| WeylElement::reflection(l, &l.parse_class(t).expect("valid class")))
        .collect::<Result<Vec<_>, _>>()?;
    Ok(weyl_generate(l.rank(), &gens, crate::rootsys::DEFAULT_WEYL_CAP)?)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::abelian::SigmaModel;

    #[test]
    fn blowdown_examples() {
        let l = IntersectionLattice::f1(4);
        let t = |s: &[&str]| s.iter().map(|x| l.parse_class(x).unwrap()).collect::<Vec<_>>();
        assert!(is_blowdown_sequence(&l, &t(&["l1", "l2", "l3", "l4"])).unwrap());
        assert!(is_blowdown_sequence(&l, &t(&["f-l1", "f-l2", "l4", "l3"])).unwrap());
        assert!(!is_blowdown_sequence(&l, &t(&["l1", "f-l1", "l3", "l4"])).unwrap());
        // blowing down f−l1 leaves an even surface, not F1
        assert!(!is_blowdown_sequence(&l, &t(&["f-l1", "l2", "l3", "l4"])).unwrap());
    }

    #[test]
    fn g2_systems() {
        let case = FoldedType::G2;
        let l = case.lattice();
        let systems = enumerate_exceptional_systems(case, &l).unwrap();
        assert_eq!(systems.len(), 12);
        let listed: Vec<DivisorClass> = ["f-l1", "f-l2", "l4", "l3"].iter().map(|x| l.parse_class(x).unwrap()).collect();
        assert!(systems.contains(&listed));
        let w = folded_weyl(case).unwrap();
        assert_eq!(simple_transitivity_check(&systems, &w), TransitivityVerdict::SimplyTransitive);
    }

    #[test]
    fn b_and_c_systems() {
        for n in 2..=3 {
            for case in [FoldedType::B(n), FoldedType::C(n)] {
                let systems = enumerate_exceptional_systems(case, &case.lattice()).unwrap();
                assert_eq!(systems.len() as u64, (1u64 << n) * (1..=n as u64).product::<u64>(), "{case:?}");
                let w = folded_weyl(case).unwrap();
                assert_eq!(simple_transitivity_check(&systems, &w), TransitivityVerdict::SimplyTransitive);
            }
        }
    }

    #[test]
    fn trivial_group_fails() {
        let case = FoldedType::B(2);
        let systems = enumerate_exceptional_systems(case, &case.lattice()).unwrap();
        let id = WeylGroup::from_elements(vec![WeylElement::identity(5)]);
        assert!(matches!(simple_transitivity_check(&systems, &id), TransitivityVerdict::OrderMismatch { .. }));
    }

    #[test]
    fn configuration_invariants() {
        let case = FoldedType::G2;
        let l = case.lattice();
        let s = SigmaModel::new(5, 5).unwrap();
        let pa = PointAssignment::from_parameters(case, s, &[s.element(1, 0), s.element(0, 1)]);
        for sys in enumerate_exceptional_systems(case, &l).unwrap() {
            GConfiguration::new(case, sys, pa.clone()).unwrap();
        }
        let bad = vec![l.l(1), l.l(2), l.l(4), l.l(3)].into_iter().map(|e| &l.f() - &e).collect::<Vec<_>>();
        assert!(GConfiguration::new(case, bad, pa.clone()).is_err());
        assert_eq!(general_position(case, &pa), Position::Interior);
        let degenerate = PointAssignment::from_parameters(case, s, &[s.element(1, 0), s.element(4, 0)]);
        assert_eq!(general_position(case, &degenerate), Position::Boundary);
    }

    #[test]
    fn cubic_counts() {
        let l = IntersectionLattice::p2(6);
        let c = cubic_combinatorics(&l).unwrap();
        assert_eq!((c.lines.len(), c.triangles.len(), c.double_sixes.len()), (27, 45, 36));
        for e in &c.lines {
            assert_eq!(c.triangles.iter().filter(|t| t.contains(e)).count(), 5);
        }
        let d0 = special_triangle(&l);
        let mut sorted = d0.to_vec();
        sorted.sort();
        assert!(c.triangles.iter().any(|t| t.to_vec() == sorted));
    }

    #[test]
    fn base_double_six() {
        let l = IntersectionLattice::p2(6);
        let first: Vec<DivisorClass> = (1..=6).map(|i| l.l(i)).collect();
        let second: Vec<DivisorClass> = (1..=6)
            .map(|i| {
                let mut d = l.h().scaled(2);
                for j in (1..=6).filter(|&j| j != i) {
                    d -= &l.l(j);
                }
                d
            })
            .collect();
        let ds = DoubleSix { first, second };
        assert!(ds.is_valid(&l));
        let pos = e6_positive_roots(&l).unwrap();
        assert_eq!(pos.len(), 36);
        let a0 = double_six_to_root(&l, &ds, &pos).unwrap();
        assert_eq!(a0, l.parse_class("2h-l1-l2-l3-l4-l5-l6").unwrap());
        let s = WeylElement::reflection(&l, &a0).unwrap();
        assert!(s.compose(&s).is_identity());
    }
}
