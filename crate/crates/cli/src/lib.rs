//! Verification suites over the `flatg` library and their certificates.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt::Write as _;
use std::str::FromStr;
use std::time::Instant;

use rand::rngs::StdRng;
use rand::SeedableRng;
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};
use thiserror::Error;

use flatg::abelian::{brute_force_solutions, weierstrass_group, GroupElement, SigmaModel};
use flatg::config::{
    cubic_combinatorics, double_six_to_root, e6_positive_roots, enumerate_exceptional_systems, folded_weyl,
    simple_transitivity_check, special_triangle, triangle_stabilizer, weyl_d4_in_e6, weyl_e6, TransitivityVerdict,
};
use flatg::folding::{folded_root_system, folded_weyl_group, second_reduction, FoldCase, FoldedType};
use flatg::lattice::IntersectionLattice;
use flatg::liealg::{build_lie_bundle, census, structure_constants, verify_jacobi, LieRoots};
use flatg::moduli::{
    chi_injectivity_check, fixed_components, ModuliError, ACTION_BUDGET, invariance_agreement, random_assignment, reconstruct_points,
    reconstruction_matrix, restriction_hom, snf_kernel_prediction, InjectivityPair,
};
use flatg::repbundles::{
    all_permutations, converse_search, f4_rep_decomposition, weight_bundle, BundleTag, ConverseReport, F1Bundles,
    LineBundleClassOnSigma,
};
use flatg::rootsys::{root_sublattice, standard_simple_system, RootSystemData, StandardCase, DEFAULT_WEYL_CAP};

pub const VERSION: &str = env!("CARGO_PKG_VERSION");

#[derive(Debug, Error)]
pub enum CliError {
    #[error("unknown suite {0:?}")]
    UnknownSuite(String),
    #[error("invalid config: {0}")]
    InvalidConfig(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Config {
    pub sigma: (i64, i64),
    pub curve: Option<(i64, i64, i64)>,
    pub ranks_b: Vec<usize>,
    pub ranks_c: Vec<usize>,
    pub weyl_cap: usize,
    pub action_cap: u64,
}

impl Default for Config {
    fn default() -> Self {
        Self {
            sigma: (3, 3),
            curve: None,
            ranks_b: vec![2, 3, 4],
            ranks_c: vec![2, 3, 4],
            weyl_cap: DEFAULT_WEYL_CAP,
            action_cap: 10_000_000,
        }
    }
}

fn parse_list<const N: usize>(key: &str, v: &str) -> Result<[i64; N], CliError> {
    let parts: Vec<i64> = v
        .split(',')
        .map(|p| p.trim().parse::<i64>())
        .collect::<Result<_, _>>()
        .map_err(|_| CliError::InvalidConfig(format!("{key} = {v}")))?;
    parts
        .try_into()
        .map_err(|_| CliError::InvalidConfig(format!("{key} expects {N} comma-separated integers")))
}

/// `N` means ranks `2..=N`.
pub fn rank_range(n: usize) -> Result<Vec<usize>, CliError> {
    if !(2..=6).contains(&n) {
        return Err(CliError::InvalidConfig(format!("rank {n} outside 2..=6")));
    }
    Ok((2..=n).collect())
}

impl Config {
    /// `key = value` lines; `#` starts a comment.
    pub fn parse(text: &str) -> Result<Self, CliError> {
        let mut c = Config::default();
        let mut curve: BTreeMap<&str, i64> = BTreeMap::new();
        for (no, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (key, value) = line
                .split_once('=')
                .ok_or_else(|| CliError::InvalidConfig(format!("line {}: expected key = value", no + 1)))?;
            let (key, value) = (key.trim(), value.trim());
            let int = || value.parse::<i64>().map_err(|_| CliError::InvalidConfig(format!("{key} = {value}")));
            match key {
                "sigma.m1" => c.sigma.0 = int()?,
                "sigma.m2" => c.sigma.1 = int()?,
                "sigma" => {
                    let [a, b] = parse_list::<2>(key, value)?;
                    c.sigma = (a, b);
                }
                "curve.p" | "curve.a" | "curve.b" => {
                    curve.insert(&key[6..], int()?);
                }
                "ranks.b" => c.ranks_b = rank_range(int()? as usize)?,
                "ranks.c" => c.ranks_c = rank_range(int()? as usize)?,
                "budget.weyl_cap" => c.weyl_cap = int()? as usize,
                "budget.action_cap" => c.action_cap = int()? as u64,
                _ => return Err(CliError::InvalidConfig(format!("unknown key {key:?}"))),
            }
        }
        if !curve.is_empty() {
            match (curve.get("p"), curve.get("a"), curve.get("b")) {
                (Some(&p), Some(&a), Some(&b)) => c.curve = Some((p, a, b)),
                _ => return Err(CliError::InvalidConfig("curve needs p, a and b".into())),
            }
        }
        Ok(c)
    }

    /// The group `Σ`, from the curve when one is given.
    pub fn sigma_model(&self) -> Result<SigmaModel, CliError> {
        match self.curve {
            Some((p, a, b)) => weierstrass_group(p, a, b)
                .map(|g| g.sigma())
                .map_err(|e| CliError::InvalidConfig(e.to_string())),
            None => SigmaModel::new(self.sigma.0, self.sigma.1).map_err(|e| CliError::InvalidConfig(e.to_string())),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Status {
    Pass,
    Fail,
    Skipped,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct VerificationReport {
    pub id: String,
    pub status: Status,
    pub witness: Option<Value>,
    pub ms: u64,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub enum Suite {
    Lattice,
    Folding,
    Cubic,
    Configs,
    Moduli,
    Liealg,
    Repbundles,
    All,
}

impl Suite {
    pub const MODULES: [Suite; 7] = [
        Suite::Lattice,
        Suite::Folding,
        Suite::Cubic,
        Suite::Configs,
        Suite::Moduli,
        Suite::Liealg,
        Suite::Repbundles,
    ];
}

impl FromStr for Suite {
    type Err = CliError;

    fn from_str(s: &str) -> Result<Self, CliError> {
        Ok(match s {
            "lattice" => Suite::Lattice,
            "folding" => Suite::Folding,
            "cubic" => Suite::Cubic,
            "configs" => Suite::Configs,
            "moduli" => Suite::Moduli,
            "liealg" => Suite::Liealg,
            "repbundles" => Suite::Repbundles,
            "all" => Suite::All,
            _ => return Err(CliError::UnknownSuite(s.to_string())),
        })
    }
}

enum Verdict {
    Pass(Value),
    Fail(Value),
    Skipped(Value),
}

fn verdict(ok: bool, witness: Value) -> Verdict {
    if ok {
        Verdict::Pass(witness)
    } else {
        Verdict::Fail(witness)
    }
}

#[derive(Default)]
struct Claims {
    reports: Vec<VerificationReport>,
}

impl Claims {
    fn check(&mut self, id: impl Into<String>, f: impl FnOnce() -> Result<Verdict, String>) {
        let start = Instant::now();
        let (status, witness) = match f() {
            Ok(Verdict::Pass(w)) => (Status::Pass, Some(w)),
            Ok(Verdict::Fail(w)) => (Status::Fail, Some(w)),
            Ok(Verdict::Skipped(w)) => (Status::Skipped, Some(w)),
            Err(e) => (Status::Fail, Some(json!({ "error": e }))),
        };
        let witness = witness.filter(|w| !w.is_null()).or_else(|| (status == Status::Fail).then(|| json!("failed")));
        self.reports.push(VerificationReport {
            id: id.into(),
            status,
            witness,
            ms: start.elapsed().as_millis() as u64,
        });
    }
}

fn err(e: impl std::fmt::Display) -> String {
    e.to_string()
}

fn fact(n: usize) -> u64 {
    (1..=n as u64).product()
}

fn folded_cases(c: &Config) -> Vec<FoldedType> {
    let mut out: Vec<FoldedType> = c.ranks_b.iter().map(|&n| FoldedType::B(n)).collect();
    out.extend(c.ranks_c.iter().map(|&n| FoldedType::C(n)));
    out.extend([FoldedType::G2, FoldedType::F4]);
    out
}

fn name(case: FoldedType) -> String {
    match case {
        FoldedType::B(n) => format!("B{n}"),
        FoldedType::C(n) => format!("C{n}"),
        FoldedType::G2 => "G2".into(),
        FoldedType::F4 => "F4".into(),
    }
}

fn lattice_suite(_: &Config, out: &mut Claims) {
    for n in 1..=8 {
        out.check(format!("lattice.F1.{n}.K2"), || {
            let l = IntersectionLattice::f1(n);
            let k2 = l.square(&l.canonical_class());
            Ok(verdict(k2 == 8 - n as i64, json!({ "K2": k2 })))
        });
    }
    out.check("lattice.P2.6.lines.27", || {
        let n = IntersectionLattice::p2(6).exceptional_classes().len();
        Ok(verdict(n == 27, json!({ "lines": n })))
    });
    out.check("lattice.F1.4.roots.D4.24", || {
        let l = IntersectionLattice::f1(4);
        let r = root_sublattice(&l, &[l.canonical_class(), l.f()]).map_err(err)?;
        Ok(verdict(r.len() == 24, json!({ "roots": r.len() })))
    });
    out.check("lattice.P2.6.roots.E6.72", || {
        let l = IntersectionLattice::p2(6);
        let r = root_sublattice(&l, &[l.canonical_class()]).map_err(err)?;
        Ok(verdict(r.len() == 72, json!({ "roots": r.len() })))
    });
}

fn folding_suite(c: &Config, out: &mut Claims) {
    for case in folded_cases(c) {
        let expected_roots = match case {
            FoldedType::B(n) | FoldedType::C(n) => 2 * n * n,
            FoldedType::G2 => 12,
            FoldedType::F4 => 48,
        };
        out.check(format!("R.{}.count.{expected_roots}", name(case)), || {
            let r = folded_root_system(case, &case.lattice()).map_err(err)?;
            Ok(verdict(r.len() == expected_roots, json!({ "roots": r.len() })))
        });
        let expected = case.dynkin().weyl_order();
        out.check(format!("W.{}.order.{expected}", name(case)), || {
            if expected as usize > c.weyl_cap {
                return Ok(Verdict::Skipped(json!({ "weyl_cap": c.weyl_cap })));
            }
            let w = folded_weyl_group(case.fold_case(), c.weyl_cap).map_err(err)?;
            Ok(verdict(w.group.len() as u64 == expected, json!({ "order": w.group.len() })))
        });
        out.check(format!("Out.{}.order_identity", name(case)), || {
            let l = case.lattice();
            let s = standard_simple_system(case.standard_case(), &l).map_err(err)?;
            let r = second_reduction(&s.gram(&l), c.weyl_cap).map_err(err)?;
            Ok(verdict(
                r.identity_holds(),
                json!({
                    "G": r.g_type.to_string(),
                    "W(G)": r.g_weyl_order,
                    "W(G'')": r.sub_weyl_order,
                    "Out(G'')": r.out_induced,
                    "normal": r.sub_is_normal_subgroup,
                }),
            ))
        });
    }
}

fn cubic_suite(c: &Config, out: &mut Claims) {
    let l = IntersectionLattice::p2(6);
    let combi = cubic_combinatorics(&l);
    let counts = combi.as_ref().map(|x| (x.lines.len(), x.triangles.len(), x.double_sixes.len()));
    for (id, pick, expected) in [("E6.lines.27", 0, 27), ("E6.triangles.45", 1, 45), ("E6.double_sixes.36", 2, 36)] {
        out.check(id, || {
            let (a, b, d) = *counts.as_ref().map_err(err)?;
            let got = [a, b, d][pick];
            Ok(verdict(got == expected, json!({ "count": got })))
        });
    }
    out.check("E6.line_in_5_triangles", || {
        let x = combi.as_ref().map_err(err)?;
        let bad = x.lines.iter().filter(|e| x.triangles.iter().filter(|t| t.contains(e)).count() != 5).count();
        Ok(verdict(bad == 0, json!({ "lines_off": bad })))
    });
    out.check("E6.double_six_root_bijection", || {
        let x = combi.as_ref().map_err(err)?;
        let pos = e6_positive_roots(&l).map_err(err)?;
        let images: BTreeSet<_> = x
            .double_sixes
            .iter()
            .map(|ds| double_six_to_root(&l, ds, &pos))
            .collect::<Result<_, _>>()
            .map_err(err)?;
        let ok = images.len() == 36 && images == pos.iter().cloned().collect();
        Ok(verdict(ok, json!({ "images": images.len() })))
    });
    if c.weyl_cap < 51840 {
        for id in ["W.E6.order.51840", "E6.stabilizer.F4.1152", "E6.stabilizer.D4.192"] {
            out.check(id, || Ok(Verdict::Skipped(json!({ "weyl_cap": c.weyl_cap }))));
        }
        return;
    }
    let w = weyl_e6(&l);
    out.check("W.E6.order.51840", || {
        let w = w.as_ref().map_err(err)?;
        Ok(verdict(w.len() == 51840, json!({ "order": w.len() })))
    });
    let d0 = special_triangle(&l);
    out.check("E6.stabilizer.F4.1152", || {
        let w = w.as_ref().map_err(err)?;
        let st = triangle_stabilizer(&d0, false, w);
        let f4 = folded_weyl_group(FoldCase::E6, c.weyl_cap).map_err(err)?.group;
        Ok(verdict(
            st.group.len() == 1152 && st.group == f4,
            json!({ "order": st.group.len(), "orbit": st.orbit_size, "equals_folded_W(F4)": st.group == f4 }),
        ))
    });
    out.check("E6.stabilizer.D4.192", || {
        let w = w.as_ref().map_err(err)?;
        let st = triangle_stabilizer(&d0, true, w);
        let d4 = weyl_d4_in_e6(&l).map_err(err)?;
        Ok(verdict(
            st.group.len() == 192 && st.group == d4,
            json!({ "order": st.group.len(), "orbit": st.orbit_size, "equals_W(D4)": st.group == d4 }),
        ))
    });
}

fn configs_suite(c: &Config, out: &mut Claims) {
    for case in folded_cases(c) {
        let expected = match case {
            FoldedType::B(n) | FoldedType::C(n) => (1u64 << n) * fact(n),
            FoldedType::G2 => 12,
            FoldedType::F4 => 1152,
        };
        // the blow-down test walks the orbit of (l1, …, lk) under the simply-laced Weyl group
        let orbit_bound = match case {
            FoldedType::F4 => 51840,
            _ => {
                let m = case.lattice().points();
                (1u64 << (m - 1)) * fact(m)
            }
        };
        out.check(format!("config.{}.systems.{expected}", name(case)), || {
            if orbit_bound as usize > c.weyl_cap {
                return Ok(Verdict::Skipped(json!({ "orbit_bound": orbit_bound, "weyl_cap": c.weyl_cap })));
            }
            let l = case.lattice();
            let systems = enumerate_exceptional_systems(case, &l).map_err(err)?;
            let w = folded_weyl(case).map_err(err)?;
            let v = simple_transitivity_check(&systems, &w);
            let ok = systems.len() as u64 == expected && v == TransitivityVerdict::SimplyTransitive;
            Ok(verdict(ok, json!({ "systems": systems.len(), "action": format!("{v:?}") })))
        });
    }
    out.check("config.G2.listed_system", || {
        let l = FoldedType::G2.lattice();
        let systems = enumerate_exceptional_systems(FoldedType::G2, &l).map_err(err)?;
        let listed: Vec<_> = ["f-l1", "f-l2", "l4", "l3"]
            .iter()
            .map(|x| l.parse_class(x))
            .collect::<Result<_, _>>()
            .map_err(err)?;
        Ok(verdict(systems.contains(&listed), json!("(f-l1, f-l2, l4, l3)")))
    });
}

fn pair_for(case: FoldedType) -> Option<(InjectivityPair, u64)> {
    match case {
        FoldedType::B(n) => Some((InjectivityPair::BD(n), (1u64 << n) * fact(n + 1))),
        FoldedType::C(n) => Some((InjectivityPair::CA(n), fact(2 * n))),
        FoldedType::G2 => Some((InjectivityPair::G2D4, 192)),
        FoldedType::F4 => Some((InjectivityPair::F4E6, 51840)),
    }
}

fn moduli_suite(c: &Config, sigma: SigmaModel, out: &mut Claims) {
    let order = sigma.order() as u64;
    for case in folded_cases(c) {
        let l = case.lattice();
        let n = name(case);
        out.check(format!("moduli.{n}.invariance_routes_agree"), || {
            let free = match case {
                FoldedType::C(_) => l.points() - 1,
                _ => l.points(),
            };
            let cost = order.saturating_pow(free as u32).saturating_mul(case.rank() as u64);
            if cost > c.action_cap {
                return Ok(Verdict::Skipped(json!({ "cost": cost, "action_cap": c.action_cap })));
            }
            let (checked, bad) = match invariance_agreement(case, sigma) {
                Err(ModuliError::BudgetExceeded(cost)) => {
                    return Ok(Verdict::Skipped(json!({ "cost": cost, "budget": ACTION_BUDGET })));
                }
                r => r.map_err(err)?,
            };
            Ok(match bad {
                None => Verdict::Pass(json!({ "assignments": checked })),
                Some(pa) => Verdict::Fail(json!({ "counterexample": pa.points.iter().map(|x| x.to_string()).collect::<Vec<_>>() })),
            })
        });
        out.check(format!("moduli.{n}.components"), || {
            let torsion = match case {
                FoldedType::B(_) | FoldedType::G2 => sigma.torsion_count(2),
                FoldedType::C(k) => sigma.torsion_count(k as i64),
                FoldedType::F4 => 1,
            };
            let fc = match fixed_components(case, sigma) {
                Err(ModuliError::BudgetExceeded(cost)) => {
                    return Ok(Verdict::Skipped(json!({ "cost": cost, "budget": ACTION_BUDGET })));
                }
                r => r.map_err(err)?,
            };
            Ok(verdict(
                fc.count() == torsion,
                json!({ "components": fc.count(), "torsion": torsion, "warning": fc.warning }),
            ))
        });
        if let Some((pair, weyl)) = pair_for(case) {
            out.check(format!("moduli.{n}.chi_injective"), || {
                let cost = order.saturating_pow(case.rank() as u32).saturating_mul(weyl);
                if cost > c.action_cap {
                    return Ok(Verdict::Skipped(json!({ "cost": cost, "action_cap": c.action_cap })));
                }
                let v = chi_injectivity_check(pair, sigma, weyl).map_err(err)?;
                Ok(verdict(
                    v.verified,
                    json!({
                        "domain": v.domain_size,
                        "classes": v.classes,
                        "counterexample": v.counterexample.map(|(a, b)| format!("{a:?} ~ {b:?}")),
                    }),
                ))
            });
        }
        out.check(format!("moduli.{n}.reconstruction_round_trip"), || {
            let simple = standard_simple_system(case.standard_case(), &l).map_err(err)?;
            let mut rng = StdRng::seed_from_u64(0x5eed);
            let mut checked = 0;
            for _ in 0..100 {
                let pa = random_assignment(case, sigma, &mut rng);
                let images = restriction_hom(&pa, &l, &simple.roots).map_err(err)?.images;
                let rec = reconstruct_points(case, &images, sigma, c.action_cap).map_err(err)?;
                let Some(all) = rec.assignments else {
                    return Ok(Verdict::Skipped(json!({ "kernel_size": rec.solution.kernel_size })));
                };
                if !all.contains(&pa) {
                    return Ok(Verdict::Fail(json!({ "lost": pa.points.iter().map(|x| x.to_string()).collect::<Vec<_>>() })));
                }
                checked += 1;
            }
            Ok(Verdict::Pass(json!({ "round_trips": checked })))
        });
        out.check(format!("moduli.{n}.snf_kernel"), || {
            let a = reconstruction_matrix(case).map_err(err)?;
            let predicted = snf_kernel_prediction(&a, &sigma);
            let cost = order.saturating_pow(a.cols() as u32);
            if cost > c.action_cap.min(1_000_000) {
                return Ok(Verdict::Skipped(json!({ "predicted": predicted, "cost": cost })));
            }
            let oracle = brute_force_solutions(&a, &vec![GroupElement::ZERO; a.rows()], &sigma).len() as u64;
            Ok(verdict(predicted == oracle, json!({ "predicted": predicted, "brute_force": oracle })))
        });
    }
}

fn lie_tables(c: &Config) -> Vec<(String, IntersectionLattice, Result<RootSystemData, String>, StandardCase)> {
    let mut out = Vec::new();
    let d4 = IntersectionLattice::f1(4);
    let r = root_sublattice(&d4, &[d4.canonical_class(), d4.f()]).map_err(err);
    out.push(("D4".to_string(), d4, r, StandardCase::DOnF1(3)));
    let e6 = IntersectionLattice::p2(6);
    let r = root_sublattice(&e6, &[e6.canonical_class()]).map_err(err);
    out.push(("E6".to_string(), e6, r, StandardCase::E6OnP2));
    for case in folded_cases(c) {
        let l = case.lattice();
        let r = folded_root_system(case, &l).map_err(err);
        out.push((name(case), l, r, case.standard_case()));
    }
    out
}

fn liealg_suite(c: &Config, out: &mut Claims) {
    for (n, l, roots, std_case) in lie_tables(c) {
        let table = roots.and_then(|r| {
            let simple = standard_simple_system(std_case, &l).map_err(err)?;
            structure_constants(LieRoots::from_divisors(&l, &r, &simple).map_err(err)?).map_err(err)
        });
        out.check(format!("lie.{n}.jacobi"), || {
            let t = table.as_ref().map_err(|e| e.clone())?;
            let j = verify_jacobi(t);
            Ok(verdict(j.passed(), json!({ "triples": j.triples_checked, "failure": j.first_failure })))
        });
        out.check(format!("lie.{n}.constants"), || {
            let t = table.as_ref().map_err(|e| e.clone())?;
            let s = census(t);
            let ok = s.matches_string_length
                && s.antisymmetric
                && s.grading_compatible
                && s.integral_coroots
                && (s.max_abs == 3) == (n == "G2");
            Ok(verdict(ok, json!({ "nonzero": s.nonzero, "max_abs": s.max_abs, "grading": s.grading_compatible })))
        });
    }
    for case in folded_cases(c) {
        out.check(format!("lie.{}.bundle", name(case)), || {
            let b = build_lie_bundle(case, &case.lattice());
            let dim = b.trivial_rank + b.summands.len();
            let expected = case.dynkin().rank() + case.dynkin().root_count();
            Ok(verdict(dim == expected, json!({ "trivial": b.trivial_rank, "roots": b.summands.len() })))
        });
    }
}

fn converse_witness(r: &ConverseReport) -> Value {
    let fmt = |x: &Option<Vec<GroupElement>>| x.as_ref().map(|v| v.iter().map(|g| g.to_string()).collect::<Vec<_>>());
    json!({
        "assignments": r.assignments,
        "identified": r.identified,
        "condition": r.condition,
        "unexplained": fmt(&r.unexplained),
        "condition_without_identification": fmt(&r.condition_without_identification),
    })
}

fn repbundles_suite(c: &Config, sigma: SigmaModel, out: &mut Claims) {
    let f4l = IntersectionLattice::p2(6);
    let l4 = IntersectionLattice::f1(4);
    for (id, tag, l, expected) in [
        ("bundle.W4.rank8", BundleTag::W4, &l4, 8),
        ("bundle.S+.rank8", BundleTag::SpinorPlus, &l4, 8),
        ("bundle.S-.rank8", BundleTag::SpinorMinus, &l4, 8),
        ("bundle.lines.rank27", BundleTag::Lines, &f4l, 27),
    ] {
        out.check(id, || {
            let b = weight_bundle(tag, l).map_err(err)?;
            Ok(verdict(b.rank() == expected, json!({ "rank": b.rank() })))
        });
    }
    let order = sigma.order() as u64;
    let budget = |k: u32| -> Option<Verdict> {
        let cost = order.saturating_pow(k).saturating_mul(8);
        (cost > c.action_cap).then(|| Verdict::Skipped(json!({ "cost": cost, "action_cap": c.action_cap })))
    };
    out.check("bundle.spinor.n2.iff_x1_zero", || {
        if let Some(v) = budget(3) {
            return Ok(v);
        }
        let b = F1Bundles::new(3);
        let r = converse_search(sigma, 3, false, &[], |pa| b.spinor_identity(pa), |x, _| x[0].is_zero());
        Ok(verdict(r.equivalent(), converse_witness(&r)))
    });
    out.check("bundle.G2.triple.iff_x1_zero_x4_sum", || {
        if let Some(v) = budget(4) {
            return Ok(v);
        }
        let b = F1Bundles::new(4);
        let cond = |x: &[GroupElement], s: &SigmaModel| x[0].is_zero() && x[3] == s.add(x[1], x[2]);
        let r = converse_search(sigma, 4, false, &[], |pa| b.g2_triple_identity(pa), cond);
        Ok(verdict(r.equivalent(), converse_witness(&r)))
    });
    out.check("bundle.C2.wedge.iff_pairing", || {
        if let Some(v) = budget(4) {
            return Ok(v);
        }
        let b = F1Bundles::new(4);
        let cond = |x: &[GroupElement], s: &SigmaModel| s.add(x[0], x[3]).is_zero() && s.add(x[1], x[2]).is_zero();
        let r = converse_search(sigma, 4, true, &all_permutations(4), |pa| b.wedge_self_duality(pa, 1), cond);
        Ok(verdict(r.equivalent(), converse_witness(&r)))
    });
    out.check("bundle.F4.27_is_3_plus_24", || {
        let mut rng = StdRng::seed_from_u64(27);
        let pa = random_assignment(FoldedType::F4, sigma, &mut rng);
        let d = f4_rep_decomposition(&f4l, &pa).map_err(err)?;
        let p = sigma.add(pa.points[0], pa.points[5]);
        let ok = d.zero_weights.len() == 3
            && d.short_roots_covered
            && d.zero_sum == -f4l.canonical_class()
            && d.zero_restrictions.iter().all(|r| *r == LineBundleClassOnSigma::new(1, sigma.neg(p)))
            && d.dimension() == 26;
        Ok(verdict(
            ok,
            json!({ "zero": d.zero_weights.len(), "short": d.short_root_weights.len(), "dimension": d.dimension() }),
        ))
    });
}

fn run_module(suite: Suite, c: &Config, sigma: SigmaModel) -> Vec<VerificationReport> {
    let mut out = Claims::default();
    match suite {
        Suite::Lattice => lattice_suite(c, &mut out),
        Suite::Folding => folding_suite(c, &mut out),
        Suite::Cubic => cubic_suite(c, &mut out),
        Suite::Configs => configs_suite(c, &mut out),
        Suite::Moduli => moduli_suite(c, sigma, &mut out),
        Suite::Liealg => liealg_suite(c, &mut out),
        Suite::Repbundles => repbundles_suite(c, sigma, &mut out),
        Suite::All => unreachable!("expanded by run_suite"),
    }
    out.reports
}

/// Reports in suite order; `parallel` runs the modules of `all` on separate threads.
pub fn run_suite(suite: Suite, c: &Config, parallel: bool) -> Result<Vec<VerificationReport>, CliError> {
    let sigma = c.sigma_model()?;
    let suites: Vec<Suite> = match suite {
        Suite::All => Suite::MODULES.to_vec(),
        s => vec![s],
    };
    let reports: Vec<Vec<VerificationReport>> = if parallel {
        std::thread::scope(|scope| {
            let handles: Vec<_> = suites.iter().map(|&s| scope.spawn(move || run_module(s, c, sigma))).collect();
            handles.into_iter().map(|h| h.join().expect("suite thread panicked")).collect()
        })
    } else {
        suites.iter().map(|&s| run_module(s, c, sigma)).collect()
    };
    let reports: Vec<VerificationReport> = reports.into_iter().flatten().collect();
    let mut seen = BTreeSet::new();
    for r in &reports {
        assert!(seen.insert(r.id.clone()), "duplicate claim id {}", r.id);
    }
    Ok(reports)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Format {
    Text,
    Json,
}

#[derive(Serialize, Deserialize)]
pub struct RunInfo {
    pub config: Config,
    pub version: String,
}

#[derive(Serialize, Deserialize)]
pub struct Certificate {
    pub run: RunInfo,
    pub results: Vec<VerificationReport>,
}

pub fn emit_report(reports: &[VerificationReport], c: &Config, format: Format) -> String {
    match format {
        Format::Json => {
            let cert = Certificate {
                run: RunInfo {
                    config: c.clone(),
                    version: VERSION.to_string(),
                },
                results: reports.to_vec(),
            };
            let mut s = serde_json::to_string_pretty(&cert).expect("reports serialize");
            s.push('\n');
            s
        }
        Format::Text => {
            let width = reports.iter().map(|r| r.id.len()).max().unwrap_or(2).max(2);
            let mut s = format!("{:<width$}  {:<7}  {:>7}  witness\n", "id", "status", "ms");
            for r in reports {
                let status = match r.status {
                    Status::Pass => "pass",
                    Status::Fail => "FAIL",
                    Status::Skipped => "skipped",
                };
                let w = r.witness.as_ref().map(|w| w.to_string()).unwrap_or_default();
                let _ = writeln!(s, "{:<width$}  {:<7}  {:>7}  {w}", r.id, status, r.ms);
            }
            let pass = reports.iter().filter(|r| r.status == Status::Pass).count();
            let fail = reports.iter().filter(|r| r.status == Status::Fail).count();
            let _ = writeln!(s, "{} claims: {pass} pass, {fail} fail, {} skipped", reports.len(), reports.len() - pass - fail);
            s
        }
    }
}

pub fn all_passed(reports: &[VerificationReport]) -> bool {
    reports.iter().all(|r| r.status != Status::Fail)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn config_file_keys() {
        let c = Config::parse("sigma.m1 = 2\nsigma.m2 = 4 # comment\nranks.b = 3\nbudget.action_cap = 5\n").unwrap();
        assert_eq!(c.sigma, (2, 4));
        assert_eq!(c.ranks_b, vec![2, 3]);
        assert_eq!(c.ranks_c, vec![2, 3, 4]);
        assert_eq!(c.action_cap, 5);
        assert!(Config::parse("curve.p = 5").is_err());
        assert!(Config::parse("nonsense").is_err());
        assert!(Config::parse("colour = red").is_err());
        let c = Config::parse("curve.p = 5\ncurve.a = 1\ncurve.b = 1").unwrap();
        assert_eq!(c.curve, Some((5, 1, 1)));
        assert_eq!(c.sigma_model().unwrap().order(), 9);
    }

    #[test]
    fn unknown_suite() {
        assert!(matches!("nope".parse::<Suite>(), Err(CliError::UnknownSuite(_))));
    }

    #[test]
    fn empty_report_is_valid_json() {
        let s = emit_report(&[], &Config::default(), Format::Json);
        let v: Value = serde_json::from_str(&s).unwrap();
        assert_eq!(v["results"], json!([]));
        assert_eq!(v["run"]["version"], json!(VERSION));
    }

    #[test]
    fn fail_carries_witness() {
        let mut c = Claims::default();
        c.check("x", || Ok(Verdict::Fail(Value::Null)));
        c.check("y", || Err("boom".into()));
        assert!(c.reports.iter().all(|r| r.status == Status::Fail && r.witness.is_some()));
    }

    #[test]
    fn trivial_group_passes_moduli() {
        let c = Config {
            sigma: (1, 1),
            ranks_b: vec![2],
            ranks_c: vec![2],
            ..Config::default()
        };
        let r = run_suite(Suite::Moduli, &c, false).unwrap();
        assert!(all_passed(&r), "{r:?}");
    }
}
