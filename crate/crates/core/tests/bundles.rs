use flatg::abelian::{GroupElement, SigmaModel};
use flatg::repbundles::*;

fn b_condition(x: &[GroupElement], _: &SigmaModel) -> bool {
    x[0].is_zero()
}

fn g2_condition(x: &[GroupElement], s: &SigmaModel) -> bool {
    x[0].is_zero() && x[3] == s.add(x[1], x[2])
}

fn pairing(x: &[GroupElement], s: &SigmaModel) -> bool {
    let n = x.len() / 2;
    (0..n).all(|i| s.add(x[i], x[2 * n - 1 - i]).is_zero())
}

#[test]
fn spinor_converse_n2() {
    let sigma = SigmaModel::new(5, 5).unwrap();
    let b = F1Bundles::new(3);
    let r = converse_search(sigma, 3, false, &[], |pa| b.spinor_identity(pa), b_condition);
    println!("{r:?}");
    assert!(r.equivalent());
    let r = converse_search(sigma, 3, false, &all_permutations(3), |pa| b.spinor_identity_at_origin(pa), b_condition);
    println!("{r:?}");
    assert!(r.unexplained.is_none());
}

#[test]
fn g2_converse() {
    let sigma = SigmaModel::new(5, 5).unwrap();
    let b = F1Bundles::new(4);
    let r = converse_search(sigma, 4, false, &[], |pa| b.g2_triple_identity(pa), g2_condition);
    println!("{r:?}");
    assert!(r.equivalent());
}

#[test]
fn c2_wedge() {
    let sigma = SigmaModel::new(7, 7).unwrap();
    let b = F1Bundles::new(4);
    let r = converse_search(sigma, 4, true, &all_permutations(4), |pa| b.wedge_self_duality(pa, 1), pairing);
    println!("{r:?}");
    assert!(r.equivalent());
}

#[test]
fn spinor_converse_needs_odd_torsion() {
    // S⁺ ⊗ O(−l1) = S⁻ also holds for 4x1 = 0, x3 = x2 + 2x1
    let sigma = SigmaModel::new(1, 4).unwrap();
    let b = F1Bundles::new(3);
    let x = |v: &[i64]| v.iter().map(|&k| sigma.element(0, k)).collect::<Vec<_>>();
    let pa = flatg::moduli::PointAssignment::new(flatg::lattice::Model::F1Blowup, sigma, x(&[1, 0, 2]));
    assert!(b.spinor_identity(&pa));
    let r = converse_search(sigma, 3, false, &all_permutations(3), |pa| b.spinor_identity(pa), |x, s| {
        s.scale(2, x[0]).is_zero()
    });
    assert!(r.unexplained.is_some());
    assert!(r.condition_without_identification.is_none());
}
