//! Chevalley-basis structure constants for the divisor-level root systems,
//! the Jacobi check, and the graded decomposition of the Lie algebra bundle.

use std::collections::HashMap;

use thiserror::Error;

use crate::folding::{folded_root_classes, FoldedType};
use crate::lattice::{DivisorClass, IntersectionLattice};
use crate::linalg::IntMatrix;
use crate::rootsys::{RootSystemData, RootSystemError, SimpleSystem};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum LieError {
    #[error(transparent)]
    RootSystem(#[from] RootSystemError),
    #[error("root {0} is not an integral combination of the simple roots")]
    NotInRootLattice(String),
    #[error("sign propagation gave |N| = {got} for a pair with string length {expected}")]
    SignPropagationConflict { got: i64, expected: i64 },
}

/// Roots in simple-root coordinates with the positive definite form `−(·,·)`.
#[derive(Clone, Debug)]
pub struct LieRoots {
    pub rank: usize,
    /// Positive roots first, ordered by height then coordinates; negatives follow in the same order.
    pub coords: Vec<Vec<i64>>,
    pub classes: Vec<DivisorClass>,
    /// `(α_i, α_j)`, positive definite.
    pub form: IntMatrix,
    index: HashMap<Vec<i64>, usize>,
}

impl LieRoots {
    pub fn from_divisors(lattice: &IntersectionLattice, roots: &RootSystemData, simple: &SimpleSystem) -> Result<Self, LieError> {
        let rank = simple.rank();
        let g = simple.gram(lattice);
        let form = IntMatrix::from_fn(rank, rank, |i, j| -g.get(i, j));
        let mut pos: Vec<(Vec<i64>, DivisorClass)> = Vec::new();
        for r in roots.roots() {
            let c = simple
                .integer_coordinates(r)
                .ok_or_else(|| LieError::NotInRootLattice(lattice.format_class(r)))?;
            if c.iter().all(|&v| v >= 0) {
                pos.push((c, r.clone()));
            } else if !c.iter().all(|&v| v <= 0) {
                return Err(LieError::NotInRootLattice(lattice.format_class(r)));
            }
        }
        pos.sort_by(|a, b| (a.0.iter().sum::<i64>(), &a.0).cmp(&(b.0.iter().sum::<i64>(), &b.0)));
        let mut coords: Vec<Vec<i64>> = pos.iter().map(|p| p.0.clone()).collect();
        let mut classes: Vec<DivisorClass> = pos.iter().map(|p| p.1.clone()).collect();
        coords.extend(pos.iter().map(|p| p.0.iter().map(|v| -v).collect::<Vec<_>>()));
        classes.extend(pos.iter().map(|p| -&p.1));
        let index = coords.iter().enumerate().map(|(i, c)| (c.clone(), i)).collect();
        Ok(Self {
            rank,
            coords,
            classes,
            form,
            index,
        })
    }

    pub fn len(&self) -> usize {
        self.coords.len()
    }

    pub fn is_empty(&self) -> bool {
        self.coords.is_empty()
    }

    pub fn positive_count(&self) -> usize {
        self.coords.len() / 2
    }

    pub fn is_positive(&self, i: usize) -> bool {
        i < self.positive_count()
    }

    pub fn negate(&self, i: usize) -> usize {
        let p = self.positive_count();
        if i < p {
            i + p
        } else {
            i - p
        }
    }

    pub fn find(&self, c: &[i64]) -> Option<usize> {
        self.index.get(c).copied()
    }

    pub fn sum(&self, i: usize, j: usize) -> Option<usize> {
        let c: Vec<i64> = self.coords[i].iter().zip(&self.coords[j]).map(|(a, b)| a + b).collect();
        self.find(&c)
    }

    pub fn inner(&self, i: usize, j: usize) -> i64 {
        crate::linalg::bilinear(&self.form, &self.coords[i], &self.coords[j])
    }

    pub fn norm(&self, i: usize) -> i64 {
        self.inner(i, i)
    }

    pub fn height(&self, i: usize) -> i64 {
        self.coords[i].iter().sum()
    }

    /// `⟨α, α_k⟩ = 2(α, α_k)/(α_k, α_k)`.
    pub fn cartan_pairing(&self, i: usize, k: usize) -> i64 {
        let mut ek = vec![0; self.rank];
        ek[k] = 1;
        let num = 2 * crate::linalg::bilinear(&self.form, &self.coords[i], &ek);
        num / self.form.get(k, k)
    }

    /// Coefficients of `h_α` in `h_1 … h_n`: `m_i (α_i, α_i)/(α, α)`.
    pub fn coroot(&self, i: usize) -> Vec<i64> {
        let n = self.norm(i);
        (0..self.rank)
            .map(|k| {
                let v = self.coords[i][k] * self.form.get(k, k);
                assert_eq!(v % n, 0, "coroot coefficients are integers");
                v / n
            })
            .collect()
    }
}

/// `(r, q)`: the `α`-string through `β` is `β − rα, …, β + qα`.
pub fn root_string(roots: &LieRoots, alpha: usize, beta: usize) -> (i64, i64) {
    let a = &roots.coords[alpha];
    let b = &roots.coords[beta];
    let at = |k: i64| -> Vec<i64> { b.iter().zip(a).map(|(x, y)| x + k * y).collect() };
    let mut r = 0;
    while roots.find(&at(-(r + 1))).is_some() {
        r += 1;
    }
    let mut q = 0;
    while roots.find(&at(q + 1)).is_some() {
        q += 1;
    }
    let expected = 2 * roots.inner(alpha, beta) / roots.norm(alpha);
    assert_eq!(r - q, expected, "root strings are unbroken");
    (r, q)
}

#[derive(Clone, Debug)]
pub struct StructureConstantTable {
    pub roots: LieRoots,
    /// `N_{αβ}` for every pair with `α + β` a root.
    pub n: HashMap<(usize, usize), i64>,
    /// `(α, β)` with `α + β = ξ` and `α` minimal, one per non-simple positive `ξ`.
    pub extraspecial: Vec<(usize, usize)>,
}

impl StructureConstantTable {
    pub fn get(&self, a: usize, b: usize) -> i64 {
        self.n.get(&(a, b)).copied().unwrap_or(0)
    }

    /// Copy with `N_{αβ}` and `N_{βα}` negated.
    pub fn with_flipped(&self, a: usize, b: usize) -> Self {
        let mut out = self.clone();
        for key in [(a, b), (b, a)] {
            if let Some(v) = out.n.get_mut(&key) {
                *v = -*v;
            }
        }
        out
    }

    pub fn dimension(&self) -> usize {
        self.roots.rank + self.roots.len()
    }
}

fn div_exact(num: i64, den: i64) -> i64 {
    assert_eq!(num % den, 0, "structure constant relations divide exactly");
    num / den
}

pub fn structure_constants(roots: LieRoots) -> Result<StructureConstantTable, LieError> {
    let p = roots.positive_count();
    // positive pairs by the height of their sum
    let mut by_sum: HashMap<usize, Vec<(usize, usize)>> = HashMap::new();
    for a in 0..p {
        for b in 0..p {
            if let Some(s) = roots.sum(a, b) {
                by_sum.entry(s).or_default().push((a, b));
            }
        }
    }
    let mut pos_n: HashMap<(usize, usize), i64> = HashMap::new();
    let mut extraspecial = Vec::new();

    // N on arbitrary roots, from the positive table built so far
    fn general(roots: &LieRoots, pos_n: &HashMap<(usize, usize), i64>, a: usize, b: usize) -> i64 {
        let Some(s) = roots.sum(a, b) else { return 0 };
        match (roots.is_positive(a), roots.is_positive(b)) {
            (true, true) => pos_n[&(a, b)],
            (false, false) => -pos_n[&(roots.negate(a), roots.negate(b))],
            (false, true) => -general(roots, pos_n, b, a),
            (true, false) => {
                let b1 = roots.negate(b);
                if roots.is_positive(s) {
                    // a = b1 + s: N_{a,−b1} = −(s,s)/(a,a) · N_{b1,s}
                    -div_exact(roots.norm(s) * pos_n[&(b1, s)], roots.norm(a))
                } else {
                    // b1 = a + g: N_{a,−b1} = (g,g)/(b1,b1) · N_{g,a}
                    let g = roots.negate(s);
                    div_exact(roots.norm(g) * pos_n[&(g, a)], roots.norm(b1))
                }
            }
        }
    }

    let mut order: Vec<usize> = by_sum.keys().copied().collect();
    order.sort_by_key(|&s| (roots.height(s), s));
    for xi in order {
        let pairs = &by_sum[&xi];
        let &(g, d) = pairs.iter().min().expect("non-simple roots have a decomposition");
        extraspecial.push((g, d));
        let (r, _) = root_string(&roots, g, d);
        pos_n.insert((g, d), r + 1);
        pos_n.insert((d, g), -(r + 1));
        let n_gd = r + 1;
        for &(a, b) in pairs {
            if pos_n.contains_key(&(a, b)) {
                continue;
            }
            // a + b − g − d = 0 with no opposite pair
            let mut total = 0;
            let term = |x: usize, y: usize, u: usize, v: usize, pos_n: &HashMap<(usize, usize), i64>| -> i64 {
                match roots.sum(x, y) {
                    Some(s) => {
                        let prod = general(&roots, pos_n, x, y) * general(&roots, pos_n, u, v);
                        // scaled by norms below
                        prod * roots.norm(xi) / roots.norm(s)
                    }
                    None => 0,
                }
            };
            let ng = roots.negate(g);
            let nd = roots.negate(d);
            total += term(b, ng, a, nd, &pos_n);
            total += term(ng, a, b, nd, &pos_n);
            // N_{ab} · N_{−g,−d} + total = 0 and N_{−g,−d} = −N_{gd}
            let nab = div_exact(total, n_gd);
            let (r, _) = root_string(&roots, a, b);
            if nab.abs() != r + 1 {
                return Err(LieError::SignPropagationConflict { got: nab, expected: r + 1 });
            }
            pos_n.insert((a, b), nab);
            pos_n.insert((b, a), -nab);
        }
    }
    let m = roots.len();
    let mut n = HashMap::new();
    for a in 0..m {
        for b in 0..m {
            if roots.sum(a, b).is_some() {
                n.insert((a, b), general(&roots, &pos_n, a, b));
            }
        }
    }
    Ok(StructureConstantTable { roots, n, extraspecial })
}

/// Sparse vector over the basis `h_1 … h_n, x_{α_0} …`.
type Vector = Vec<(usize, i64)>;

fn bracket_basis(t: &StructureConstantTable, i: usize, j: usize) -> Vector {
    let n = t.roots.rank;
    match (i < n, j < n) {
        (true, true) => Vec::new(),
        (true, false) => {
            let c = t.roots.cartan_pairing(j - n, i);
            if c == 0 {
                Vec::new()
            } else {
                vec![(j, c)]
            }
        }
        (false, true) => bracket_basis(t, j, i).into_iter().map(|(k, v)| (k, -v)).collect(),
        (false, false) => {
            let (a, b) = (i - n, j - n);
            if t.roots.negate(a) == b {
                t.roots
                    .coroot(a)
                    .into_iter()
                    .enumerate()
                    .filter(|&(_, v)| v != 0)
                    .collect()
            } else {
                match t.roots.sum(a, b) {
                    Some(s) => vec![(n + s, t.get(a, b))],
                    None => Vec::new(),
                }
            }
        }
    }
}

fn bracket(t: &StructureConstantTable, i: usize, v: &Vector) -> Vec<i64> {
    let mut out = vec![0; t.dimension()];
    for &(j, c) in v {
        for (k, d) in bracket_basis(t, i, j) {
            out[k] += c * d;
        }
    }
    out
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct JacobiVerdict {
    pub triples_checked: u64,
    pub first_failure: Option<(usize, usize, usize)>,
}

impl JacobiVerdict {
    pub fn passed(&self) -> bool {
        self.first_failure.is_none()
    }
}

/// `[a,[b,c]] + [b,[c,a]] + [c,[a,b]] = 0` on every ordered triple of basis elements.
pub fn verify_jacobi(t: &StructureConstantTable) -> JacobiVerdict {
    let dim = t.dimension();
    let table: Vec<Vec<Vector>> = (0..dim)
        .map(|i| (0..dim).map(|j| bracket_basis(t, i, j)).collect())
        .collect();
    let mut checked = 0;
    for a in 0..dim {
        for b in 0..dim {
            for c in 0..dim {
                checked += 1;
                let x = bracket(t, a, &table[b][c]);
                let y = bracket(t, b, &table[c][a]);
                let z = bracket(t, c, &table[a][b]);
                if x.iter().zip(&y).zip(&z).any(|((p, q), r)| p + q + r != 0) {
                    return JacobiVerdict {
                        triples_checked: checked,
                        first_failure: Some((a, b, c)),
                    };
                }
            }
        }
    }
    JacobiVerdict {
        triples_checked: checked,
        first_failure: None,
    }
}

/// Census over all nonzero constants.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ConstantCensus {
    pub nonzero: usize,
    pub max_abs: i64,
    pub matches_string_length: bool,
    pub antisymmetric: bool,
    /// `class(α) + class(β) = class(α + β)` for every nonzero bracket.
    pub grading_compatible: bool,
    pub integral_coroots: bool,
}

pub fn census(t: &StructureConstantTable) -> ConstantCensus {
    let r = &t.roots;
    let mut out = ConstantCensus {
        nonzero: 0,
        max_abs: 0,
        matches_string_length: true,
        antisymmetric: true,
        grading_compatible: true,
        integral_coroots: true,
    };
    for (&(a, b), &v) in &t.n {
        if v == 0 {
            continue;
        }
        out.nonzero += 1;
        out.max_abs = out.max_abs.max(v.abs());
        let (rs, _) = root_string(r, a, b);
        out.matches_string_length &= v.abs() == rs + 1;
        out.antisymmetric &= t.get(b, a) == -v;
        let s = r.sum(a, b).expect("nonzero constants have a root sum");
        out.grading_compatible &= &r.classes[a] + &r.classes[b] == r.classes[s];
    }
    out.integral_coroots = (0..r.len()).all(|i| {
        let c = r.coroot(i);
        let back: Vec<i64> = (0..r.rank).map(|k| c[k] * r.norm(i)).collect();
        back.iter().zip(&r.coords[i]).enumerate().all(|(k, (x, m))| *x == m * r.form.get(k, k))
    });
    out
}

/// `𝒪^{⊕rank} ⊕ ⊕_{D ∈ R(G)} 𝒪(D)`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GradedBundleDecomposition {
    pub trivial_rank: usize,
    pub summands: Vec<DivisorClass>,
}

pub fn build_lie_bundle(case: FoldedType, l: &IntersectionLattice) -> GradedBundleDecomposition {
    GradedBundleDecomposition {
        trivial_rank: case.rank(),
        summands: folded_root_classes(case, l),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::folding::folded_root_system;
    use crate::rootsys::{root_sublattice, standard_simple_system, StandardCase};

    fn folded_table(case: FoldedType) -> StructureConstantTable {
        let l = case.lattice();
        let roots = folded_root_system(case, &l).unwrap();
        let simple = standard_simple_system(case.standard_case(), &l).unwrap();
        structure_constants(LieRoots::from_divisors(&l, &roots, &simple).unwrap()).unwrap()
    }

    #[test]
    fn b2_strings_and_constants() {
        let t = folded_table(FoldedType::B(2));
        let r = &t.roots;
        let l = FoldedType::B(2).lattice();
        let b1 = r.classes.iter().position(|c| *c == l.parse_class("f-2l2").unwrap()).unwrap();
        let b2 = r.classes.iter().position(|c| *c == l.parse_class("2l2-2l3").unwrap()).unwrap();
        assert_eq!(root_string(r, b1, b2), (0, 2));
        assert_eq!(t.get(b1, b2).abs(), 1);
        let s = r.sum(b1, b2).unwrap();
        assert_eq!(r.classes[s], l.parse_class("f-2l3").unwrap());
        assert_eq!(t.get(b1, s).abs(), 2);
        // nonzero count agrees with string data
        let from_strings = (0..r.len())
            .flat_map(|a| (0..r.len()).map(move |b| (a, b)))
            .filter(|&(a, b)| r.sum(a, b).is_some())
            .count();
        assert_eq!(census(&t).nonzero, from_strings);
    }

    #[test]
    fn a1_has_no_constants() {
        let l = IntersectionLattice::f1(2);
        let roots = root_sublattice(&l, &[l.canonical_class(), l.f(), l.s()]).unwrap();
        let simple = roots.simple_system().unwrap();
        let t = structure_constants(LieRoots::from_divisors(&l, &roots, &simple).unwrap()).unwrap();
        assert!(t.n.is_empty());
        assert_eq!(bracket_basis(&t, 1, 2), vec![(0, 1)]);
        assert!(verify_jacobi(&t).passed());
    }

    #[test]
    fn jacobi_small_cases() {
        for case in [FoldedType::B(2), FoldedType::C(2), FoldedType::G2] {
            let t = folded_table(case);
            assert!(verify_jacobi(&t).passed(), "{case:?}");
            let c = census(&t);
            assert!(c.matches_string_length && c.antisymmetric && c.grading_compatible && c.integral_coroots);
            assert_eq!(c.max_abs == 3, case == FoldedType::G2);
        }
    }

    #[test]
    fn d4_is_simply_laced() {
        let l = IntersectionLattice::f1(4);
        let roots = root_sublattice(&l, &[l.canonical_class(), l.f()]).unwrap();
        let simple = standard_simple_system(StandardCase::DOnF1(3), &l).unwrap();
        let t = structure_constants(LieRoots::from_divisors(&l, &roots, &simple).unwrap()).unwrap();
        assert_eq!(census(&t).max_abs, 1);
        assert!(verify_jacobi(&t).passed());
    }

    #[test]
    fn flipping_a_non_extraspecial_sign_breaks_jacobi() {
        let t = folded_table(FoldedType::B(3));
        let p = t.roots.positive_count();
        let pair = t
            .n
            .keys()
            .copied()
            .filter(|&(a, b)| a < b && b < p && !t.extraspecial.contains(&(a, b)) && !t.extraspecial.contains(&(b, a)))
            .min()
            .expect("B3 has non-extraspecial positive pairs");
        assert!(!verify_jacobi(&t.with_flipped(pair.0, pair.1)).passed());
    }

    #[test]
    fn bundle_decompositions() {
        let b3 = build_lie_bundle(FoldedType::B(3), &FoldedType::B(3).lattice());
        assert_eq!((b3.trivial_rank, b3.summands.len()), (3, 18));
        let g2 = build_lie_bundle(FoldedType::G2, &FoldedType::G2.lattice());
        assert_eq!((g2.trivial_rank, g2.summands.len()), (2, 12));
        let f4 = build_lie_bundle(FoldedType::F4, &FoldedType::F4.lattice());
        assert_eq!((f4.trivial_rank, f4.summands.len()), (4, 48));
    }
}
