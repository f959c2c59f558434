//! Integer linear systems with unknowns and right-hand side in `Σ`.

use num_integer::Integer;

use super::{smith_normal_form, GroupElement, SigmaModel};
use crate::linalg::IntMatrix;

/// Solution set of `A·x = b` over `Σ`: empty, or `particular + kernel`.
///
/// The kernel is the direct sum of the cyclic groups generated by
/// `kernel_generators[i].0`, of order `kernel_generators[i].1`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GroupSolution {
    pub solvable: bool,
    pub particular: Option<Vec<GroupElement>>,
    pub kernel_size: u64,
    pub kernel_generators: Vec<(Vec<GroupElement>, i64)>,
    sigma: SigmaModel,
}

impl GroupSolution {
    /// Every solution, or `None` when there are more than `cap`.
    pub fn enumerate(&self, cap: u64) -> Option<Vec<Vec<GroupElement>>> {
        let Some(base) = &self.particular else {
            return Some(Vec::new());
        };
        if self.kernel_size > cap {
            return None;
        }
        let mut out = vec![base.clone()];
        for (gen, order) in &self.kernel_generators {
            let mut next = Vec::with_capacity(out.len() * *order as usize);
            for x in &out {
                for k in 0..*order {
                    next.push(
                        x.iter()
                            .zip(gen)
                            .map(|(&xi, &gi)| self.sigma.add(xi, self.sigma.scale(k, gi)))
                            .collect(),
                    );
                }
            }
            out = next;
        }
        out.sort();
        Some(out)
    }
}

/// Solves one cyclic component `A·x ≡ c (mod m)` with integer vectors.
/// Returns the particular solution and kernel generators with their orders.
fn solve_cyclic(a: &IntMatrix, rhs: &[i64], m: i64) -> Option<(Vec<i64>, Vec<(Vec<i64>, i64)>)> {
    let (rows, cols) = (a.rows(), a.cols());
    if m == 1 {
        return Some((vec![0; cols], Vec::new()));
    }
    let snf = smith_normal_form(a);
    // S·y = U⁻¹·b with y = V·x
    let c: Vec<i64> = snf.u_inv.mul_vec(rhs).iter().map(|v| v.rem_euclid(m)).collect();
    let mut y = vec![0i64; cols];
    let mut free: Vec<(usize, i64, i64)> = Vec::new(); // (column, step, count)
    for i in 0..rows.max(cols) {
        let d = if i < rows.min(cols) { snf.s.get(i, i) } else { 0 };
        let ci = if i < rows { c[i] } else { 0 };
        let g = d.gcd(&m);
        if ci % g != 0 {
            return None;
        }
        if i >= cols {
            continue;
        }
        if g == m {
            free.push((i, 1, m));
            continue;
        }
        let mg = m / g;
        let dg = (d / g).rem_euclid(mg);
        let inv = dg.extended_gcd(&mg).x.rem_euclid(mg);
        y[i] = ((ci / g) * inv).rem_euclid(mg);
        if g > 1 {
            free.push((i, mg, g));
        }
    }
    let x: Vec<i64> = snf.v_inv.mul_vec(&y).iter().map(|v| v.rem_euclid(m)).collect();
    let gens = free
        .into_iter()
        .map(|(col, step, count)| {
            let g = snf.v_inv.column(col).iter().map(|v| (v * step).rem_euclid(m)).collect();
            (g, count)
        })
        .collect();
    Some((x, gens))
}

pub fn solve_group_system(a: &IntMatrix, rhs: &[GroupElement], sigma: &SigmaModel) -> GroupSolution {
    assert_eq!(a.rows(), rhs.len(), "right-hand side length must match the row count");
    let ra: Vec<i64> = rhs.iter().map(|x| x.a).collect();
    let rb: Vec<i64> = rhs.iter().map(|x| x.b).collect();
    let first = solve_cyclic(a, &ra, sigma.m1());
    let second = solve_cyclic(a, &rb, sigma.m2());
    match (first, second) {
        (Some((xa, ga)), Some((xb, gb))) => {
            let particular = xa.iter().zip(&xb).map(|(&p, &q)| sigma.element(p, q)).collect();
            let mut kernel_generators = Vec::new();
            for (g, order) in ga {
                kernel_generators.push((g.iter().map(|&v| sigma.element(v, 0)).collect(), order));
            }
            for (g, order) in gb {
                kernel_generators.push((g.iter().map(|&v| sigma.element(0, v)).collect(), order));
            }
            let kernel_size = kernel_generators.iter().map(|(_, o)| *o as u64).product();
            GroupSolution {
                solvable: true,
                particular: Some(particular),
                kernel_size,
                kernel_generators,
                sigma: *sigma,
            }
        }
        _ => {
            // the kernel size does not depend on the right-hand side
            let zero = vec![sigma.zero(); a.rows()];
            let kernel_size = solve_group_system(a, &zero, sigma).kernel_size;
            GroupSolution {
                solvable: false,
                particular: None,
                kernel_size,
                kernel_generators: Vec::new(),
                sigma: *sigma,
            }
        }
    }
}

/// Exhaustive oracle over `Σ^cols`.
pub fn brute_force_solutions(a: &IntMatrix, rhs: &[GroupElement], sigma: &SigmaModel) -> Vec<Vec<GroupElement>> {
    let mut out: Vec<Vec<GroupElement>> = sigma
        .tuples(a.cols())
        .filter(|x| {
            (0..a.rows()).all(|i| sigma.combine(a.row(i), x) == rhs[i])
        })
        .collect();
    out.sort();
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn b2_matrix() -> IntMatrix {
        // −2x2 = p1, 2(x2 − x3) = p2
        IntMatrix::from_rows(&[[-2, 0], [2, -2]])
    }

    #[test]
    fn b2_over_cyclic_five_is_unique() {
        let s = SigmaModel::new(1, 5).unwrap();
        for p in s.tuples(2) {
            let sol = solve_group_system(&b2_matrix(), &p, &s);
            assert!(sol.solvable);
            assert_eq!(sol.kernel_size, 1);
        }
    }

    #[test]
    fn b2_over_klein_four() {
        let s = SigmaModel::new(2, 2).unwrap();
        let zero = vec![s.zero(); 2];
        let sol = solve_group_system(&b2_matrix(), &zero, &s);
        assert_eq!(sol.kernel_size, 16);
        let bad = vec![s.element(1, 0), s.zero()];
        assert!(!solve_group_system(&b2_matrix(), &bad, &s).solvable);
    }

    #[test]
    fn identity_system() {
        let s = SigmaModel::new(2, 6).unwrap();
        let rhs = vec![s.element(1, 5), s.element(0, 3)];
        let sol = solve_group_system(&IntMatrix::identity(2), &rhs, &s);
        assert_eq!(sol.particular, Some(rhs));
        assert_eq!(sol.kernel_size, 1);
    }

    #[test]
    fn rectangular_systems() {
        let s = SigmaModel::new(1, 4).unwrap();
        let a = IntMatrix::from_rows(&[[1, 1, 0]]);
        let rhs = vec![s.element(0, 1)];
        let sol = solve_group_system(&a, &rhs, &s);
        assert_eq!(sol.kernel_size, 16);
        assert_eq!(sol.enumerate(100).unwrap(), brute_force_solutions(&a, &rhs, &s));
        let tall = IntMatrix::from_rows(&[[1], [2]]);
        let rhs = vec![s.element(0, 1), s.element(0, 3)];
        assert!(!solve_group_system(&tall, &rhs, &s).solvable);
        assert!(brute_force_solutions(&tall, &rhs, &s).is_empty());
    }

    fn sigma_strategy() -> impl Strategy<Value = SigmaModel> {
        prop_oneof![
            Just((1, 1)), Just((1, 2)), Just((1, 3)), Just((1, 5)), Just((2, 2)),
            Just((1, 4)), Just((2, 4)), Just((3, 3)), Just((1, 6)), Just((1, 9)),
        ]
        .prop_map(|(a, b)| SigmaModel::new(a, b).unwrap())
    }

    proptest! {
        #[test]
        fn agrees_with_exhaustive_search(
            sigma in sigma_strategy(),
            rows in 1usize..=3,
            cols in 1usize..=3,
            entries in proptest::collection::vec(-4i64..=4, 9),
            rhs_idx in proptest::collection::vec(0usize..1000, 3),
        ) {
            let a = IntMatrix::from_fn(rows, cols, |i, j| entries[i * 3 + j]);
            let rhs: Vec<_> = (0..rows).map(|i| sigma.from_index(rhs_idx[i] % sigma.order())).collect();
            let sol = solve_group_system(&a, &rhs, &sigma);
            let oracle = brute_force_solutions(&a, &rhs, &sigma);
            prop_assert_eq!(sol.solvable, !oracle.is_empty());
            if sol.solvable {
                let all = sol.enumerate(u64::MAX).unwrap();
                prop_assert_eq!(&all, &oracle);
                for x in &all {
                    for i in 0..rows {
                        prop_assert_eq!(sigma.combine(a.row(i), x), rhs[i]);
                    }
                }
            }
            // kernel size times image size is |Σ|^cols
            let zero = vec![sigma.zero(); rows];
            let kernel = brute_force_solutions(&a, &zero, &sigma).len() as u64;
            prop_assert_eq!(sol.kernel_size, kernel);
            let image: std::collections::BTreeSet<Vec<GroupElement>> = sigma
                .tuples(cols)
                .map(|x| (0..rows).map(|i| sigma.combine(a.row(i), &x)).collect())
                .collect();
            prop_assert_eq!(kernel * image.len() as u64, (sigma.order() as u64).pow(cols as u32));
        }
    }
}
