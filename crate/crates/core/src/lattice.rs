//! Picard lattices of blow-ups of the Hirzebruch surface F1 and of P2.
//!
//! Coordinates are taken in the fixed bases `(s, f, l1..ln)` and
//! `(h, l1..ln)`, so classes from different calls compare and hash equally.

use std::collections::BTreeSet;
use std::fmt;
use std::ops::{Add, AddAssign, Mul, Neg, Sub, SubAssign};
use std::str::FromStr;

use num_rational::Rational64;
use thiserror::Error;

use crate::linalg::{bilinear, floor_sqrt, IntMatrix, RatMatrix, Rational};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum LatticeError {
    #[error("a blow-up lattice needs at least one blown-up point")]
    NoBlowups,
    #[error("unknown surface model `{0}`")]
    UnknownModel(String),
    #[error("class has {got} coordinates but the lattice has rank {expected}")]
    DimensionMismatch { expected: usize, got: usize },
    #[error("constraints do not bound the search: {0}")]
    UnboundedSearch(&'static str),
    #[error("cannot parse class `{0}`")]
    Parse(String),
}

/// Integer coordinate vector over the ambient lattice basis.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Debug)]
pub struct DivisorClass {
    pub coords: Vec<i64>,
}

impl DivisorClass {
    pub fn new(coords: Vec<i64>) -> Self {
        Self { coords }
    }

    pub fn zero(rank: usize) -> Self {
        Self {
            coords: vec![0; rank],
        }
    }

    pub fn rank(&self) -> usize {
        self.coords.len()
    }

    pub fn is_zero(&self) -> bool {
        self.coords.iter().all(|&c| c == 0)
    }

    pub fn scaled(&self, k: i64) -> Self {
        Self {
            coords: self.coords.iter().map(|c| c * k).collect(),
        }
    }
}

impl Add for &DivisorClass {
    type Output = DivisorClass;
    fn add(self, rhs: &DivisorClass) -> DivisorClass {
        assert_eq!(self.rank(), rhs.rank());
        DivisorClass::new(self.coords.iter().zip(&rhs.coords).map(|(a, b)| a + b).collect())
    }
}

impl Add for DivisorClass {
    type Output = DivisorClass;
    fn add(self, rhs: DivisorClass) -> DivisorClass {
        &self + &rhs
    }
}

impl Sub for &DivisorClass {
    type Output = DivisorClass;
    fn sub(self, rhs: &DivisorClass) -> DivisorClass {
        assert_eq!(self.rank(), rhs.rank());
        DivisorClass::new(self.coords.iter().zip(&rhs.coords).map(|(a, b)| a - b).collect())
    }
}

impl Sub for DivisorClass {
    type Output = DivisorClass;
    fn sub(self, rhs: DivisorClass) -> DivisorClass {
        &self - &rhs
    }
}

impl AddAssign<&DivisorClass> for DivisorClass {
    fn add_assign(&mut self, rhs: &DivisorClass) {
        assert_eq!(self.rank(), rhs.rank());
        for (a, b) in self.coords.iter_mut().zip(&rhs.coords) {
            *a += b;
        }
    }
}

impl SubAssign<&DivisorClass> for DivisorClass {
    fn sub_assign(&mut self, rhs: &DivisorClass) {
        assert_eq!(self.rank(), rhs.rank());
        for (a, b) in self.coords.iter_mut().zip(&rhs.coords) {
            *a -= b;
        }
    }
}

impl Neg for &DivisorClass {
    type Output = DivisorClass;
    fn neg(self) -> DivisorClass {
        self.scaled(-1)
    }
}

impl Neg for DivisorClass {
    type Output = DivisorClass;
    fn neg(self) -> DivisorClass {
        self.scaled(-1)
    }
}

impl Mul<&DivisorClass> for i64 {
    type Output = DivisorClass;
    fn mul(self, rhs: &DivisorClass) -> DivisorClass {
        rhs.scaled(self)
    }
}

impl Mul<DivisorClass> for i64 {
    type Output = DivisorClass;
    fn mul(self, rhs: DivisorClass) -> DivisorClass {
        rhs.scaled(self)
    }
}

#[derive(Clone, Copy, PartialEq, Eq, Hash, Debug, PartialOrd, Ord)]
pub enum Model {
    /// Blow-up of the Hirzebruch surface F1, basis `(s, f, l1..ln)`.
    F1Blowup,
    /// Blow-up of the projective plane, basis `(h, l1..ln)`.
    P2Blowup,
}

impl Model {
    /// Number of basis vectors before the exceptional classes.
    pub fn base_rank(self) -> usize {
        match self {
            Model::F1Blowup => 2,
            Model::P2Blowup => 1,
        }
    }
}

impl FromStr for Model {
    type Err = LatticeError;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.to_ascii_lowercase().as_str() {
            "f1" | "f1-blowup" => Ok(Model::F1Blowup),
            "p2" | "p2-blowup" => Ok(Model::P2Blowup),
            _ => Err(LatticeError::UnknownModel(s.to_string())),
        }
    }
}

/// Target of a linear constraint: the class itself (quadratic) or a fixed class.
#[derive(Clone, PartialEq, Eq, Debug)]
pub enum Against {
    SelfClass,
    Class(DivisorClass),
}

#[derive(Clone, PartialEq, Eq, Debug)]
pub struct Constraint {
    pub against: Against,
    pub value: i64,
}

impl Constraint {
    /// `x·x = value`.
    pub fn square(value: i64) -> Self {
        Self {
            against: Against::SelfClass,
            value,
        }
    }

    /// `x·c = value`.
    pub fn pairing(c: DivisorClass, value: i64) -> Self {
        Self {
            against: Against::Class(c),
            value,
        }
    }
}

/// The bound used to make an enumeration finite.
///
/// With `c` a positive class in the span of the linear constraints,
/// `P(x) = 2(x·c)²/c² − x·x` is positive definite, and every solution has
/// `P(x) = bound`. The coordinate bounds follow from `x_i² ≤ bound·(P⁻¹)_ii`.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct EnumerationBound {
    pub auxiliary: DivisorClass,
    pub bound: Rational,
    pub coordinate_bounds: Vec<i64>,
}

#[derive(Clone, PartialEq, Eq, Debug)]
pub struct IntersectionLattice {
    model: Model,
    points: usize,
    gram: IntMatrix,
    labels: Vec<String>,
    canonical: DivisorClass,
}

impl IntersectionLattice {
    pub fn make_blowup_lattice(model: Model, n: usize) -> Result<Self, LatticeError> {
        if n == 0 {
            return Err(LatticeError::NoBlowups);
        }
        let base = model.base_rank();
        let rank = base + n;
        let mut gram = IntMatrix::zeros(rank, rank);
        let mut labels = Vec::with_capacity(rank);
        let mut canonical = vec![1; rank];
        match model {
            Model::F1Blowup => {
                gram.set(0, 0, -1);
                gram.set(0, 1, 1);
                gram.set(1, 0, 1);
                labels.push("s".to_string());
                labels.push("f".to_string());
                canonical[0] = -2;
                canonical[1] = -3;
            }
            Model::P2Blowup => {
                gram.set(0, 0, 1);
                labels.push("h".to_string());
                canonical[0] = -3;
            }
        }
        for i in 0..n {
            gram.set(base + i, base + i, -1);
            labels.push(format!("l{}", i + 1));
        }
        Ok(Self {
            model,
            points: n,
            gram,
            labels,
            canonical: DivisorClass::new(canonical),
        })
    }

    pub fn f1(n: usize) -> Self {
        Self::make_blowup_lattice(Model::F1Blowup, n).expect("n >= 1")
    }

    pub fn p2(n: usize) -> Self {
        Self::make_blowup_lattice(Model::P2Blowup, n).expect("n >= 1")
    }

    pub fn model(&self) -> Model {
        self.model
    }

    /// Number of blown-up points.
    pub fn points(&self) -> usize {
        self.points
    }

    pub fn rank(&self) -> usize {
        self.gram.rows()
    }

    pub fn gram(&self) -> &IntMatrix {
        &self.gram
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn canonical_class(&self) -> DivisorClass {
        self.canonical.clone()
    }

    pub fn check(&self, a: &DivisorClass) -> Result<(), LatticeError> {
        if a.rank() != self.rank() {
            return Err(LatticeError::DimensionMismatch {
                expected: self.rank(),
                got: a.rank(),
            });
        }
        Ok(())
    }

    pub fn pair(&self, a: &DivisorClass, b: &DivisorClass) -> Result<i64, LatticeError> {
        self.check(a)?;
        self.check(b)?;
        Ok(bilinear(&self.gram, &a.coords, &b.coords))
    }

    /// Pairing for classes known to live in this lattice.
    pub fn dot(&self, a: &DivisorClass, b: &DivisorClass) -> i64 {
        self.pair(a, b).expect("class of the wrong rank")
    }

    pub fn square(&self, a: &DivisorClass) -> i64 {
        self.dot(a, a)
    }

    pub fn zero(&self) -> DivisorClass {
        DivisorClass::zero(self.rank())
    }

    pub fn basis_vector(&self, i: usize) -> DivisorClass {
        let mut c = self.zero();
        c.coords[i] = 1;
        c
    }

    pub fn s(&self) -> DivisorClass {
        assert_eq!(self.model, Model::F1Blowup, "s exists only on F1 blow-ups");
        self.basis_vector(0)
    }

    pub fn f(&self) -> DivisorClass {
        assert_eq!(self.model, Model::F1Blowup, "f exists only on F1 blow-ups");
        self.basis_vector(1)
    }

    pub fn h(&self) -> DivisorClass {
        assert_eq!(self.model, Model::P2Blowup, "h exists only on P2 blow-ups");
        self.basis_vector(0)
    }

    /// Exceptional class of the `i`-th point, 1-based.
    pub fn l(&self, i: usize) -> DivisorClass {
        assert!(i >= 1 && i <= self.points, "l{i} out of range");
        self.basis_vector(self.model.base_rank() + i - 1)
    }

    /// Coefficients of `l1..ln` of a class.
    pub fn point_coords<'a>(&self, a: &'a DivisorClass) -> &'a [i64] {
        &a.coords[self.model.base_rank()..]
    }

    /// Matrix of the basis permutation `l_i -> l_{perm[i-1]+1}` fixing the base classes.
    pub fn point_permutation(&self, perm: &[usize]) -> IntMatrix {
        assert_eq!(perm.len(), self.points);
        let base = self.model.base_rank();
        let mut m = IntMatrix::zeros(self.rank(), self.rank());
        for i in 0..base {
            m.set(i, i, 1);
        }
        for (i, &p) in perm.iter().enumerate() {
            m.set(base + p, base + i, 1);
        }
        m
    }

    /// Parses sums like `2h-l1-l2`, `f-2l2+l3-l4` or `-l1`.
    pub fn parse_class(&self, text: &str) -> Result<DivisorClass, LatticeError> {
        let err = || LatticeError::Parse(text.to_string());
        let compact: String = text.chars().filter(|c| !c.is_whitespace()).collect();
        if compact.is_empty() {
            return Err(err());
        }
        if compact == "0" {
            return Ok(self.zero());
        }
        let mut out = self.zero();
        let bytes = compact.as_bytes();
        let mut pos = 0;
        while pos < bytes.len() {
            let mut sign = 1;
            if bytes[pos] == b'+' || bytes[pos] == b'-' {
                if bytes[pos] == b'-' {
                    sign = -1;
                }
                pos += 1;
            } else if pos != 0 {
                return Err(err());
            }
            let start = pos;
            while pos < bytes.len() && bytes[pos].is_ascii_digit() {
                pos += 1;
            }
            let coeff: i64 = if start == pos {
                1
            } else {
                compact[start..pos].parse().map_err(|_| err())?
            };
            let lstart = pos;
            while pos < bytes.len() && bytes[pos] != b'+' && bytes[pos] != b'-' {
                pos += 1;
            }
            let label = &compact[lstart..pos];
            let idx = self.labels.iter().position(|l| l == label).ok_or_else(err)?;
            out.coords[idx] += sign * coeff;
        }
        Ok(out)
    }

    pub fn format_class(&self, a: &DivisorClass) -> String {
        let mut out = String::new();
        for (c, label) in a.coords.iter().zip(&self.labels) {
            if *c == 0 {
                continue;
            }
            if *c < 0 {
                out.push('-');
            } else if !out.is_empty() {
                out.push('+');
            }
            if c.abs() != 1 {
                out.push_str(&c.abs().to_string());
            }
            out.push_str(label);
        }
        if out.is_empty() {
            out.push('0');
        }
        out
    }

    fn split_constraints(
        &self,
        constraints: &[Constraint],
    ) -> Result<(i64, Vec<(DivisorClass, i64)>), LatticeError> {
        let mut square = None;
        let mut linear = Vec::new();
        for c in constraints {
            match &c.against {
                Against::SelfClass => {
                    if square.is_some_and(|v| v != c.value) {
                        // contradictory; the empty set is still a valid answer
                        square = Some(i64::MIN);
                    } else {
                        square = Some(c.value);
                    }
                }
                Against::Class(d) => {
                    self.check(d)?;
                    linear.push((d.clone(), c.value));
                }
            }
        }
        let square = square.ok_or(LatticeError::UnboundedSearch(
            "no self-intersection constraint",
        ))?;
        Ok((square, linear))
    }

    /// Finds a combination of the linear constraint classes with positive
    /// square, searching small coefficients.
    fn positive_auxiliary(
        &self,
        linear: &[(DivisorClass, i64)],
    ) -> Option<(DivisorClass, i64)> {
        if linear.is_empty() {
            return None;
        }
        let k = linear.len().min(4);
        let mut best: Option<(i64, Vec<i64>)> = None;
        for radius in 1..=3i64 {
            let width = (2 * radius + 1) as usize;
            let total = width.pow(k as u32);
            for code in 0..total {
                let mut rem = code;
                let coeffs: Vec<i64> = (0..k)
                    .map(|_| {
                        let d = (rem % width) as i64 - radius;
                        rem /= width;
                        d
                    })
                    .collect();
                let mut c = self.zero();
                for (a, (d, _)) in coeffs.iter().zip(linear) {
                    c += &d.scaled(*a);
                }
                if self.square(&c) > 0 {
                    let weight: i64 = coeffs.iter().map(|a| a.abs()).sum();
                    if best.as_ref().is_none_or(|(w, _)| weight < *w) {
                        best = Some((weight, coeffs));
                    }
                }
            }
            if best.is_some() {
                break;
            }
        }
        let (_, coeffs) = best?;
        let mut c = self.zero();
        let mut t = 0;
        for (a, (d, v)) in coeffs.iter().zip(linear) {
            c += &d.scaled(*a);
            t += a * v;
        }
        Some((c, t))
    }

    /// The bound documenting why [`Self::enumerate_classes`] is exhaustive.
    pub fn enumeration_bound(
        &self,
        constraints: &[Constraint],
    ) -> Result<EnumerationBound, LatticeError> {
        let (d, linear) = self.split_constraints(constraints)?;
        let (c, t) = self.positive_auxiliary(&linear).ok_or(LatticeError::UnboundedSearch(
            "no class of positive square in the span of the linear constraints",
        ))?;
        let c2 = self.square(&c);
        let q = self.scaled_form(&c);
        let bound_scaled = 2 * t * t - c2 * d;
        let bound = Rational64::new(bound_scaled, c2);
        let qinv = q.to_rational().inverse().expect("form is definite");
        let coordinate_bounds = (0..self.rank())
            .map(|i| {
                let v = Rational::from_integer(bound_scaled.max(0)) * qinv.get(i, i);
                floor_sqrt(v.max(Rational::from_integer(0)))
            })
            .collect();
        Ok(EnumerationBound {
            auxiliary: c,
            bound,
            coordinate_bounds,
        })
    }

    /// `c²·P` as an integer matrix: `2(Gc)(Gc)ᵀ − c²·G`.
    fn scaled_form(&self, c: &DivisorClass) -> IntMatrix {
        let gc = self.gram.mul_vec(&c.coords);
        let c2 = self.square(c);
        IntMatrix::from_fn(self.rank(), self.rank(), |i, j| {
            2 * gc[i] * gc[j] - c2 * self.gram.get(i, j)
        })
    }

    /// All classes satisfying every constraint, in sorted order.
    ///
    /// Candidates are those with `c²·P(x) ≤ 2t² − c²d` (see
    /// [`EnumerationBound`]), walked by an exact LDLᵀ decomposition of the
    /// definite form; each candidate is then checked against the constraints.
    pub fn enumerate_classes(
        &self,
        constraints: &[Constraint],
    ) -> Result<Vec<DivisorClass>, LatticeError> {
        let (d, linear) = self.split_constraints(constraints)?;
        let (c, t) = self.positive_auxiliary(&linear).ok_or(LatticeError::UnboundedSearch(
            "no class of positive square in the span of the linear constraints",
        ))?;
        if d == i64::MIN {
            return Ok(Vec::new());
        }
        let c2 = self.square(&c);
        let q = self.scaled_form(&c);
        let budget = 2 * t * t - c2 * d;
        let mut found = BTreeSet::new();
        if budget < 0 {
            return Ok(Vec::new());
        }
        let ldl = Ldl::new(&q);
        let mut x = vec![0i64; self.rank()];
        ldl.walk(Rational::from_integer(budget), self.rank(), &mut x, &mut |x| {
            let cand = DivisorClass::new(x.to_vec());
            if self.square(&cand) == d && linear.iter().all(|(e, v)| self.dot(&cand, e) == *v) {
                found.insert(cand);
            }
        });
        Ok(found.into_iter().collect())
    }

    /// Classes with `x² = −1` and `x·K = −1`.
    pub fn exceptional_classes(&self) -> Vec<DivisorClass> {
        self.enumerate_classes(&[
            Constraint::square(-1),
            Constraint::pairing(self.canonical_class(), -1),
        ])
        .expect("K has positive square on the lattices in use")
    }
}

/// `Q(x) = Σ_i d_i (x_i + Σ_{j>i} μ_ij x_j)²` for a positive definite `Q`.
struct Ldl {
    diag: Vec<Rational>,
    mu: RatMatrix,
}

impl Ldl {
    fn new(q: &IntMatrix) -> Self {
        let n = q.rows();
        let mut a = q.to_rational();
        let mut diag = vec![Rational::from_integer(0); n];
        let mut mu = RatMatrix::zeros(n, n);
        for i in 0..n {
            let di = a.get(i, i);
            assert!(di > Rational::from_integer(0), "form is not positive definite");
            diag[i] = di;
            for j in i + 1..n {
                mu.set(i, j, a.get(i, j) / di);
            }
            for j in i + 1..n {
                for k in i + 1..n {
                    let v = a.get(j, k) - a.get(j, i) * a.get(i, k) / di;
                    a.set(j, k, v);
                }
            }
        }
        Self { diag, mu }
    }

    /// Visits every integer vector with `Q(x) ≤ budget`. Coordinates `>= level`
    /// are already fixed in `x`.
    fn walk(&self, budget: Rational, level: usize, x: &mut Vec<i64>, visit: &mut impl FnMut(&[i64])) {
        if level == 0 {
            visit(x);
            return;
        }
        let i = level - 1;
        let n = x.len();
        let shift: Rational = (i + 1..n)
            .map(|j| self.mu.get(i, j) * x[j])
            .sum();
        let di = self.diag[i];
        let radius2 = budget / di;
        let center = -shift;
        let r = (*radius2.numer() as f64 / *radius2.denom() as f64).max(0.0).sqrt();
        let cf = *center.numer() as f64 / *center.denom() as f64;
        let lo = (cf - r).floor() as i64 - 1;
        let hi = (cf + r).ceil() as i64 + 1;
        for v in lo..=hi {
            let y = Rational::from_integer(v) - center;
            let cost = di * y * y;
            if cost <= budget {
                x[i] = v;
                self.walk(budget - cost, i, x, visit);
            }
        }
        x[i] = 0;
    }
}

impl fmt::Display for IntersectionLattice {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let name = match self.model {
            Model::F1Blowup => "F1",
            Model::P2Blowup => "P2",
        };
        write!(f, "{name} blown up at {} points", self.points)
    }
}
