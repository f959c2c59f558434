//! Weight-class multisets of the representation bundles, their restrictions
//! to `Σ`, and the identifications that single out special configurations.

use std::collections::BTreeMap;

use itertools::Itertools;
use thiserror::Error;

use crate::abelian::{GroupElement, SigmaModel};
use crate::folding::{folded_root_classes, outer_automorphism, FoldCase, FoldedType, FoldingError};
use crate::lattice::{Constraint, DivisorClass, IntersectionLattice, Model};
use crate::linalg::Rational;
use crate::moduli::PointAssignment;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum RepError {
    #[error("{bundle} is defined on {expected}, got {got}")]
    LatticeMismatch {
        bundle: &'static str,
        expected: String,
        got: String,
    },
    #[error("point assignment violates the {0} constraints")]
    ConstraintViolated(String),
    #[error(transparent)]
    Folding(#[from] FoldingError),
}

/// `(degree, point)` with `point` the class of `L ⊗ 𝒪(−deg·(0))`.
#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Debug)]
pub struct LineBundleClassOnSigma {
    pub degree: i64,
    pub point: GroupElement,
}

impl LineBundleClassOnSigma {
    pub fn new(degree: i64, point: GroupElement) -> Self {
        Self { degree, point }
    }

    pub fn tensor(self, other: Self, sigma: &SigmaModel) -> Self {
        Self::new(self.degree + other.degree, sigma.add(self.point, other.point))
    }

    pub fn dual(self, sigma: &SigmaModel) -> Self {
        Self::new(-self.degree, sigma.neg(self.point))
    }
}

#[derive(Clone, Copy, PartialEq, Eq, Hash, Debug)]
pub enum BundleTag {
    /// `C² = C·K = −1, C·f = 0` on the 4-point blow-up.
    W4,
    /// `D² = D·K = −1, D·f = 1`.
    SpinorPlus,
    /// `T² = −2, T·K = 0, T·f = 1`.
    SpinorMinus,
    /// `⊕ 𝒪(l_i)` on the `2n`-point blow-up.
    Standard,
    /// The 27 lines of the cubic surface.
    Lines,
}

#[derive(Clone, PartialEq, Eq, Debug)]
pub struct WeightBundle {
    pub name: String,
    pub summands: Vec<DivisorClass>,
}

impl WeightBundle {
    pub fn rank(&self) -> usize {
        self.summands.len()
    }

    pub fn dual(&self) -> WeightBundle {
        WeightBundle {
            name: format!("({})*", self.name),
            summands: self.summands.iter().map(|d| -d).collect(),
        }
    }

    pub fn twist(&self, d: &DivisorClass) -> WeightBundle {
        WeightBundle {
            name: format!("{}(x)O(D)", self.name),
            summands: self.summands.iter().map(|s| s + d).collect(),
        }
    }

    pub fn determinant(&self, rank: usize) -> DivisorClass {
        self.summands.iter().fold(DivisorClass::zero(rank), |acc, d| &acc + d)
    }
}

fn mismatch(bundle: &'static str, expected: &str, l: &IntersectionLattice) -> RepError {
    RepError::LatticeMismatch {
        bundle,
        expected: expected.to_string(),
        got: l.to_string(),
    }
}

pub fn weight_bundle(tag: BundleTag, l: &IntersectionLattice) -> Result<WeightBundle, RepError> {
    let k = l.canonical_class();
    let (name, constraints, expected) = match tag {
        BundleTag::W4 | BundleTag::SpinorPlus | BundleTag::SpinorMinus | BundleTag::Standard
            if l.model() != Model::F1Blowup =>
        {
            return Err(mismatch("F1 bundles", "an F1 blow-up", l));
        }
        BundleTag::Lines if l.model() != Model::P2Blowup || l.points() != 6 => {
            return Err(mismatch("lines", "the cubic surface", l));
        }
        BundleTag::W4 => (
            "W",
            vec![Constraint::square(-1), Constraint::pairing(k, -1), Constraint::pairing(l.f(), 0)],
            Some(2 * l.points()),
        ),
        BundleTag::SpinorPlus => (
            "S+",
            vec![Constraint::square(-1), Constraint::pairing(k, -1), Constraint::pairing(l.f(), 1)],
            Some(1 << (l.points() - 1)),
        ),
        BundleTag::SpinorMinus => (
            "S-",
            vec![Constraint::square(-2), Constraint::pairing(k, 0), Constraint::pairing(l.f(), 1)],
            Some(1 << (l.points() - 1)),
        ),
        BundleTag::Standard => {
            let summands = (1..=l.points()).map(|i| l.l(i)).collect();
            return Ok(WeightBundle {
                name: "V".into(),
                summands,
            });
        }
        BundleTag::Lines => ("E27", vec![Constraint::square(-1), Constraint::pairing(k, -1)], Some(27)),
    };
    let summands = l
        .enumerate_classes(&constraints)
        .expect("the bundle constraints bound the search on blow-ups of F1 and P2");
    if let Some(n) = expected {
        assert_eq!(summands.len(), n, "{name} has rank {n}");
    }
    Ok(WeightBundle {
        name: name.into(),
        summands,
    })
}

/// All `i`-fold sums of distinct summands.
pub fn wedge_power(v: &WeightBundle, i: usize) -> WeightBundle {
    assert!((1..=v.rank()).contains(&i), "wedge degree out of range");
    let rank = v.summands[0].rank();
    let summands = v
        .summands
        .iter()
        .combinations(i)
        .map(|c| c.into_iter().fold(DivisorClass::zero(rank), |acc, d| &acc + d))
        .collect();
    WeightBundle {
        name: format!("wedge^{i}({})", v.name),
        summands,
    }
}

pub fn restrict_class(l: &IntersectionLattice, pa: &PointAssignment, d: &DivisorClass) -> LineBundleClassOnSigma {
    assert_eq!((l.model(), l.points()), (pa.model, pa.points.len()), "assignment matches the lattice");
    let degree = -l.dot(d, &l.canonical_class());
    LineBundleClassOnSigma::new(degree, pa.sigma.combine(l.point_coords(d), &pa.points))
}

pub type RestrictedBundle = BTreeMap<LineBundleClassOnSigma, usize>;

pub fn restrict_bundle(b: &WeightBundle, l: &IntersectionLattice, pa: &PointAssignment) -> RestrictedBundle {
    let mut out = BTreeMap::new();
    for d in &b.summands {
        *out.entry(restrict_class(l, pa, d)).or_insert(0) += 1;
    }
    out
}

pub fn tensor_restricted(b: &RestrictedBundle, t: LineBundleClassOnSigma, sigma: &SigmaModel) -> RestrictedBundle {
    b.iter().map(|(k, &v)| (k.tensor(t, sigma), v)).collect()
}

pub fn check_identification(lhs: &RestrictedBundle, rhs: &RestrictedBundle) -> bool {
    lhs == rhs
}

/// The F1 bundles on a fixed number of points, enumerated once.
#[derive(Clone, Debug)]
pub struct F1Bundles {
    pub lattice: IntersectionLattice,
    pub plus: WeightBundle,
    pub minus: WeightBundle,
    pub standard: WeightBundle,
    pub w: Option<WeightBundle>,
}

impl F1Bundles {
    pub fn new(points: usize) -> Self {
        let lattice = IntersectionLattice::f1(points);
        let get = |t| weight_bundle(t, &lattice).expect("F1 lattice");
        Self {
            plus: get(BundleTag::SpinorPlus),
            minus: get(BundleTag::SpinorMinus),
            standard: get(BundleTag::Standard),
            w: (points == 4).then(|| get(BundleTag::W4)),
            lattice,
        }
    }

    fn restrict(&self, b: &WeightBundle, pa: &PointAssignment) -> RestrictedBundle {
        restrict_bundle(b, &self.lattice, pa)
    }

    /// `S⁺ ⊗ 𝒪(−l1)|_Σ = S⁻|_Σ`.
    pub fn spinor_identity(&self, pa: &PointAssignment) -> bool {
        let twisted = self.plus.twist(&-self.lattice.l(1));
        check_identification(&self.restrict(&twisted, pa), &self.restrict(&self.minus, pa))
    }

    /// `S⁺|_Σ ⊗ 𝒪(−(0)) = S⁻|_Σ`, the untwisted form of the n = 2 display.
    pub fn spinor_identity_at_origin(&self, pa: &PointAssignment) -> bool {
        let shift = LineBundleClassOnSigma::new(-1, pa.sigma.zero());
        check_identification(
            &tensor_restricted(&self.restrict(&self.plus, pa), shift, &pa.sigma),
            &self.restrict(&self.minus, pa),
        )
    }

    /// `S⁺ ≅ W ⊗ 𝒪(s − l4)` on the 4-point blow-up.
    pub fn spinor_w_identity(&self, pa: &PointAssignment) -> bool {
        let w = self.w.as_ref().expect("W is defined on the 4-point blow-up");
        let twisted = w.twist(&(self.lattice.s() - self.lattice.l(4)));
        check_identification(&self.restrict(&self.plus, pa), &self.restrict(&twisted, pa))
    }

    /// Both identifications among `W`, `S⁺`, `S⁻`.
    pub fn g2_triple_identity(&self, pa: &PointAssignment) -> bool {
        self.spinor_identity(pa) && self.spinor_w_identity(pa)
    }

    /// `(∧^i V)^* ⊗ det V = ∧^{2n−i} V` restricted to `Σ`.
    pub fn wedge_duality(&self, pa: &PointAssignment, i: usize) -> bool {
        let v = &self.standard;
        let lhs = wedge_power(v, i).dual().twist(&v.determinant(self.lattice.rank()));
        let rhs = wedge_power(v, v.rank() - i);
        check_identification(&self.restrict(&lhs, pa), &self.restrict(&rhs, pa))
    }

    /// `∧^i V|_Σ = (∧^i V)^*|_Σ ⊗ 𝒪(i f)|_Σ`, the symplectic self-duality.
    pub fn wedge_self_duality(&self, pa: &PointAssignment, i: usize) -> bool {
        let w = wedge_power(&self.standard, i);
        let twisted = w.dual().twist(&self.lattice.f().scaled(i as i64));
        check_identification(&self.restrict(&w, pa), &self.restrict(&twisted, pa))
    }
}

/// Outcome of comparing an identification with a point condition on all of `Σ^k`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ConverseReport {
    pub assignments: u64,
    pub identified: u64,
    pub condition: u64,
    /// Identification holds but no renumbering meets the condition.
    pub unexplained: Option<Vec<GroupElement>>,
    /// The condition holds but the identification fails.
    pub condition_without_identification: Option<Vec<GroupElement>>,
}

impl ConverseReport {
    pub fn equivalent(&self) -> bool {
        self.unexplained.is_none() && self.condition_without_identification.is_none()
    }
}

/// Runs over `Σ^k` (optionally `Σ x = 0`); "up to renumbering" is a search over `renumberings`,
/// each a permutation of point indices.
pub fn converse_search(
    sigma: SigmaModel,
    k: usize,
    sum_zero: bool,
    renumberings: &[Vec<usize>],
    identification: impl Fn(&PointAssignment) -> bool,
    condition: impl Fn(&[GroupElement], &SigmaModel) -> bool,
) -> ConverseReport {
    let mut report = ConverseReport {
        assignments: 0,
        identified: 0,
        condition: 0,
        unexplained: None,
        condition_without_identification: None,
    };
    for pts in sigma.tuples(k) {
        if sum_zero && !sigma.sum(&pts).is_zero() {
            continue;
        }
        report.assignments += 1;
        let pa = PointAssignment::new(Model::F1Blowup, sigma, pts.clone());
        let holds = identification(&pa);
        let cond = condition(&pts, &sigma);
        report.identified += holds as u64;
        report.condition += cond as u64;
        if cond && !holds && report.condition_without_identification.is_none() {
            report.condition_without_identification = Some(pts.clone());
        }
        if holds && !cond {
            let explained = renumberings.iter().any(|p| {
                let q: Vec<GroupElement> = p.iter().map(|&i| pts[i]).collect();
                condition(&q, &sigma)
            });
            if !explained && report.unexplained.is_none() {
                report.unexplained = Some(pts);
            }
        }
    }
    report
}

pub fn all_permutations(k: usize) -> Vec<Vec<usize>> {
    (0..k).permutations(k).collect()
}

/// The 27 weights of the cubic surface split by the folding to `F4`.
#[derive(Clone, Debug)]
pub struct F4RepDecomposition {
    pub zero_weights: Vec<DivisorClass>,
    pub zero_restrictions: Vec<LineBundleClassOnSigma>,
    pub zero_sum: DivisorClass,
    /// Each remaining line with its folded weight, a short root of `R(F4)`.
    pub short_root_weights: Vec<(DivisorClass, DivisorClass)>,
    pub short_roots_covered: bool,
    pub trace_kernel_rank: usize,
    pub trace_kernel_det: LineBundleClassOnSigma,
}

impl F4RepDecomposition {
    pub fn dimension(&self) -> usize {
        self.short_root_weights.len() + self.trace_kernel_rank
    }
}

pub fn f4_rep_decomposition(l: &IntersectionLattice, pa: &PointAssignment) -> Result<F4RepDecomposition, RepError> {
    if l.model() != Model::P2Blowup || l.points() != 6 {
        return Err(mismatch("lines", "the cubic surface", l));
    }
    if !pa.satisfies(FoldedType::F4) {
        return Err(RepError::ConstraintViolated("F4".into()));
    }
    let rho = outer_automorphism(FoldCase::E6, l)?;
    let k = l.canonical_class();
    let third = |x: i64| Rational::new(x, 3);
    let lines = weight_bundle(BundleTag::Lines, l)?;
    let roots = folded_root_classes(FoldedType::F4, l);
    let short: Vec<DivisorClass> = roots.iter().filter(|r| l.square(r) == -4).cloned().collect();
    let mut zero = Vec::new();
    let mut rest = Vec::new();
    for e in &lines.summands {
        // e + K/3 projects onto K^⊥; the fold sums its ρ-orbit
        let w: Vec<Rational> = e.coords.iter().zip(&k.coords).map(|(&a, &b)| Rational::from(a) + third(b)).collect();
        let folded: Vec<Rational> = w.iter().zip(rho.apply_rational(&w)).map(|(a, b)| a + b).collect();
        if folded.iter().all(|x| *x.numer() == 0) {
            zero.push(e.clone());
            continue;
        }
        let integral: Option<Vec<i64>> = folded.iter().map(|x| x.is_integer().then(|| x.to_integer())).collect();
        match integral.map(DivisorClass::new) {
            Some(c) if short.contains(&c) => rest.push((e.clone(), c)),
            _ => return Err(RepError::ConstraintViolated(format!("weight of {} is not a short root", l.format_class(e)))),
        }
    }
    let covered = {
        let mut got: Vec<&DivisorClass> = rest.iter().map(|p| &p.1).collect();
        got.sort();
        got.dedup();
        got.len() == short.len() && rest.len() == short.len()
    };
    let zero_sum = zero.iter().fold(l.zero(), |acc, d| &acc + d);
    let zero_restrictions: Vec<_> = zero.iter().map(|e| restrict_class(l, pa, e)).collect();
    // 0 → ker(tr) → 𝒪((−p))^3 → 𝒪((−p)) → 0
    let p = pa.sigma.add(pa.points[0], pa.points[5]);
    let trace_kernel_det = LineBundleClassOnSigma::new(2, pa.sigma.scale(-2, p));
    Ok(F4RepDecomposition {
        zero_weights: zero,
        zero_restrictions,
        zero_sum,
        short_root_weights: rest,
        short_roots_covered: covered,
        trace_kernel_rank: 2,
        trace_kernel_det,
    })
}
