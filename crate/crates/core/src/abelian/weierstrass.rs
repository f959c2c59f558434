//! Points of `y² = x³ + ax + b` over a small prime field, with the
//! chord-tangent law and an explicit isomorphism onto a [`SigmaModel`].

use std::collections::{HashMap, HashSet};

use num_integer::Integer;

use super::{AbelianError, GroupElement, SigmaModel};

const MAX_PRIME: i64 = 10_000;

#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Debug)]
pub enum CurvePoint {
    Infinity,
    Affine(i64, i64),
}

#[derive(Clone, Debug)]
pub struct WeierstrassGroup {
    pub p: i64,
    pub a: i64,
    pub b: i64,
    points: Vec<CurvePoint>,
    sigma: SigmaModel,
    to_sigma: HashMap<CurvePoint, GroupElement>,
    /// `from_sigma[sigma.index(x)]`
    from_sigma: Vec<CurvePoint>,
}

fn inv_mod(x: i64, p: i64) -> i64 {
    x.extended_gcd(&p).x.rem_euclid(p)
}

fn is_odd_prime(p: i64) -> bool {
    p > 2 && (2..).take_while(|d| d * d <= p).all(|d| p % d != 0)
}

impl WeierstrassGroup {
    pub fn sigma(&self) -> SigmaModel {
        self.sigma
    }

    pub fn points(&self) -> &[CurvePoint] {
        &self.points
    }

    pub fn order(&self) -> usize {
        self.points.len()
    }

    pub fn add(&self, p1: CurvePoint, p2: CurvePoint) -> CurvePoint {
        chord_tangent(self.p, self.a, p1, p2)
    }

    pub fn neg(&self, pt: CurvePoint) -> CurvePoint {
        match pt {
            CurvePoint::Infinity => CurvePoint::Infinity,
            CurvePoint::Affine(x, y) => CurvePoint::Affine(x, (-y).rem_euclid(self.p)),
        }
    }

    pub fn encode(&self, pt: CurvePoint) -> GroupElement {
        self.to_sigma[&pt]
    }

    pub fn decode(&self, x: GroupElement) -> CurvePoint {
        self.from_sigma[self.sigma.index(x)]
    }

    pub fn on_curve(&self, pt: CurvePoint) -> bool {
        match pt {
            CurvePoint::Infinity => true,
            CurvePoint::Affine(x, y) => {
                (y * y - (x * x % self.p * x + self.a * x + self.b)).rem_euclid(self.p) == 0
            }
        }
    }
}

fn chord_tangent(p: i64, a: i64, p1: CurvePoint, p2: CurvePoint) -> CurvePoint {
    use CurvePoint::*;
    match (p1, p2) {
        (Infinity, q) | (q, Infinity) => q,
        (Affine(x1, y1), Affine(x2, y2)) => {
            let slope = if x1 == x2 {
                if (y1 + y2).rem_euclid(p) == 0 {
                    return Infinity;
                }
                (3 * x1 * x1 + a).rem_euclid(p) * inv_mod((2 * y1).rem_euclid(p), p) % p
            } else {
                (y2 - y1).rem_euclid(p) * inv_mod((x2 - x1).rem_euclid(p), p) % p
            };
            let x3 = (slope * slope - x1 - x2).rem_euclid(p);
            let y3 = (slope * (x1 - x3) - y1).rem_euclid(p);
            Affine(x3, y3)
        }
    }
}

fn multiple(p: i64, a: i64, k: i64, pt: CurvePoint) -> CurvePoint {
    let mut acc = CurvePoint::Infinity;
    let mut base = pt;
    let mut k = k;
    while k > 0 {
        if k & 1 == 1 {
            acc = chord_tangent(p, a, acc, base);
        }
        base = chord_tangent(p, a, base, base);
        k >>= 1;
    }
    acc
}

fn point_order(p: i64, a: i64, n: i64, pt: CurvePoint) -> i64 {
    let mut divisors: Vec<i64> = (1..=n).filter(|d| n % d == 0).collect();
    divisors.sort();
    *divisors
        .iter()
        .find(|&&d| multiple(p, a, d, pt) == CurvePoint::Infinity)
        .expect("the group order kills every point")
}

pub fn weierstrass_group(p: i64, a: i64, b: i64) -> Result<WeierstrassGroup, AbelianError> {
    if !is_odd_prime(p) {
        return Err(AbelianError::NotOddPrime(p));
    }
    if p > MAX_PRIME {
        return Err(AbelianError::PrimeTooLarge(p));
    }
    let (a, b) = (a.rem_euclid(p), b.rem_euclid(p));
    if (4 * a * a % p * a + 27 * b * b).rem_euclid(p) == 0 {
        return Err(AbelianError::SingularCurve { p, a, b });
    }
    let mut roots: HashMap<i64, Vec<i64>> = HashMap::new();
    for y in 0..p {
        roots.entry(y * y % p).or_default().push(y);
    }
    let mut points = vec![CurvePoint::Infinity];
    for x in 0..p {
        let rhs = (x * x % p * x + a * x + b).rem_euclid(p);
        if let Some(ys) = roots.get(&rhs) {
            for &y in ys {
                points.push(CurvePoint::Affine(x, y));
            }
        }
    }
    points.sort();
    let n = points.len() as i64;

    // exponent = largest point order; the group is Z/(n/e) x Z/e
    let mut big = CurvePoint::Infinity;
    let mut exponent = 1;
    for &pt in &points {
        let o = point_order(p, a, n, pt);
        if o > exponent {
            exponent = o;
            big = pt;
        }
        if exponent == n {
            break;
        }
    }
    let m2 = exponent;
    let m1 = n / m2;
    let sigma = SigmaModel::new(m1, m2).expect("elliptic curve groups have rank at most two");

    // a complement to <big>: some Q with m1·Q = O and <Q> ∩ <big> = 0
    let big_multiples: Vec<CurvePoint> = {
        let mut v = Vec::with_capacity(m2 as usize);
        let mut cur = CurvePoint::Infinity;
        for _ in 0..m2 {
            v.push(cur);
            cur = chord_tangent(p, a, cur, big);
        }
        v
    };
    let big_set: HashSet<CurvePoint> = big_multiples.iter().copied().collect();
    let small = points
        .iter()
        .copied()
        .find(|&q| {
            if multiple(p, a, m1, q) != CurvePoint::Infinity {
                return false;
            }
            let mut cur = q;
            for _ in 1..m1 {
                if big_set.contains(&cur) {
                    return false;
                }
                cur = chord_tangent(p, a, cur, q);
            }
            true
        })
        .expect("a complement exists in a finite abelian group of rank two");

    let mut from_sigma = vec![CurvePoint::Infinity; n as usize];
    let mut to_sigma = HashMap::with_capacity(n as usize);
    let mut row = CurvePoint::Infinity;
    for i in 0..m1 {
        for j in 0..m2 {
            let pt = chord_tangent(p, a, row, big_multiples[j as usize]);
            let e = GroupElement::new(i, j);
            from_sigma[sigma.index(e)] = pt;
            to_sigma.insert(pt, e);
        }
        row = chord_tangent(p, a, row, small);
    }
    assert_eq!(to_sigma.len(), n as usize, "encoding is not injective");
    Ok(WeierstrassGroup {
        p,
        a,
        b,
        points,
        sigma,
        to_sigma,
        from_sigma,
    })
}
