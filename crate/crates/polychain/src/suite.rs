//! The acceptance suite: nine fixed checks, each deterministic for a given
//! seed, shared by the `acceptance` test target and `reproduce-all`.

use std::time::Instant;

use num_traits::Zero;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::chains::{BoxRegion, Chain};
use crate::coeff::CoefficientGroup;
use crate::exact::{format_rational, q, q2, two_pow, CertifiedReal, Q};
use crate::flatnorm::{
    flat_norm, flat_norm_problem, four_corner_chain, rasterize, tensor_flat_norm, tensor_flat_norm_problem,
    vertex_enumeration_optimum, CubicalComplex, GridChain,
};
use crate::geometry::{RationalPoint, Side, SimplexCell};
use crate::lab::{
    build_counterexample, build_staircase, counterexample_slice_mass, decomposition_lower_bound_search,
    staircase_atoms, ThetaGraphSpec,
};
use crate::slicing::{j_vanishing_test, section, slice, splitting_test, SliceSpec, SplitVerdict, TypeIndex};
use crate::tensor::{chi, j_decompose, TensorChain};

/// Interval width allowed for certified irrational masses.
pub const IRRATIONAL_WIDTH: f64 = 1e-9;
/// Slack in the sampled slice-mass integral.
pub const SLICE_INTEGRAL_SLACK: f64 = 1e-6;
pub const RANDOM_SPLIT_CHAINS: usize = 200;
pub const IDENTITY_INSTANCES: usize = 500;
pub const SLICE_POINTS_PER_CHAIN: usize = 100;
pub const HALF_SPACE_LEVELS: usize = 50;
pub const STAIRCASE_MAX_LEVEL: u32 = 10;
pub const COLLAPSE_MAX_LEVEL: u32 = 4;
pub const LP_ORACLE_MAX_CELLS: usize = 12;

#[derive(Debug, Clone, Serialize)]
pub struct CriterionReport {
    pub id: u8,
    pub title: &'static str,
    pub passed: bool,
    pub checks: usize,
    pub failures: Vec<String>,
    pub notes: Vec<String>,
    pub limit_ms: Option<u64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub elapsed_ms: Option<u64>,
}

#[derive(Default)]
struct Tally {
    checks: usize,
    failures: Vec<String>,
    notes: Vec<String>,
}

impl Tally {
    fn check(&mut self, ok: bool, what: impl FnOnce() -> String) {
        self.checks += 1;
        if !ok {
            self.failures.push(what());
        }
    }

    fn note(&mut self, s: impl Into<String>) {
        self.notes.push(s.into());
    }
}

type Runner = fn(u64) -> Tally;

const CRITERIA: [(u8, &str, Option<u64>, Runner); 9] = [
    (1, "flat-norm reference values (four-corner chain)", Some(5_000), criterion_flat_reference),
    (2, "counterexample mass, boundary and slice", Some(10_000), criterion_counterexample),
    (3, "integer-program lower bound", Some(60_000), criterion_ip_search),
    (4, "splitting agrees with off-type j-vanishing", Some(60_000), criterion_split_vs_j),
    (5, "algebraic identities", Some(120_000), criterion_identities),
    (6, "slice calculus", None, criterion_slice_calculus),
    (7, "staircase truncations", Some(30_000), criterion_staircase),
    (8, "dyadic collapse contraction", Some(60_000), criterion_collapse),
    (9, "LP optima against exhaustive enumeration", None, criterion_lp_oracle),
];

pub fn criterion_ids() -> Vec<u8> {
    CRITERIA.iter().map(|c| c.0).collect()
}

/// Runs the selected criteria (all when `only` is empty) in parallel.
/// Elapsed times are recorded only when `timing` is set; the time limit is
/// enforced either way.
pub fn run_suite(seed: u64, only: &[u8], timing: bool) -> Vec<CriterionReport> {
    CRITERIA
        .par_iter()
        .filter(|c| only.is_empty() || only.contains(&c.0))
        .map(|&(id, title, limit_ms, run)| {
            let start = Instant::now();
            let tally = run(seed.wrapping_add(id as u64));
            let elapsed = start.elapsed().as_millis() as u64;
            let mut failures = tally.failures;
            if let Some(limit) = limit_ms {
                if elapsed > limit {
                    failures.push(format!("runtime {} ms exceeds the {} ms limit", elapsed, limit));
                }
            }
            CriterionReport {
                id,
                title,
                passed: failures.is_empty(),
                checks: tally.checks,
                failures,
                notes: tally.notes,
                limit_ms,
                elapsed_ms: timing.then_some(elapsed),
            }
        })
        .collect()
}

pub fn summary_line(r: &CriterionReport) -> String {
    let status = if r.passed { "PASS" } else { "FAIL" };
    let mut line = format!("[{}] {}. {} ({} checks", status, r.id, r.title, r.checks);
    if let Some(ms) = r.elapsed_ms {
        line.push_str(&format!(", {} ms", ms));
    }
    line.push(')');
    if let Some(f) = r.failures.first() {
        line.push_str(&format!(": {}", f));
        if r.failures.len() > 1 {
            line.push_str(&format!(" (+{} more)", r.failures.len() - 1));
        }
    }
    line
}

const Z: CoefficientGroup = CoefficientGroup::Integers;

fn padded_unit(l: &Q) -> CubicalComplex {
    CubicalComplex::new(vec![-l.clone(), -l.clone()], l.clone(), vec![3, 3], 1).expect("valid complex")
}

fn criterion_flat_reference(_seed: u64) -> Tally {
    let mut t = Tally::default();
    let cx = padded_unit(&q(1));
    let g = match rasterize(&four_corner_chain(&q(1)), &cx) {
        Ok(g) => g,
        Err(e) => {
            t.check(false, || format!("rasterize: {e}"));
            return t;
        }
    };
    match flat_norm(&cx, &g) {
        Ok(f) => {
            t.check(f.value == q(2), || format!("flat norm {} ≠ 2", format_rational(&f.value)));
            t.check(f.certified, || "flat-norm optimum not certified".into());
        }
        Err(e) => t.check(false, || format!("flat norm: {e}")),
    }
    match tensor_flat_norm(&cx, &g, TypeIndex::new(0, 0)) {
        Ok(f) => {
            t.check(f.value == q(1), || format!("tensor flat norm {} ≠ 1", format_rational(&f.value)));
            t.check(f.certified, || "tensor optimum not certified".into());
        }
        Err(e) => t.check(false, || format!("tensor flat norm: {e}")),
    }
    t
}

fn criterion_counterexample(_seed: u64) -> Tally {
    let mut t = Tally::default();
    let specs: Vec<(&str, Result<ThetaGraphSpec, String>)> = vec![
        ("rational", Ok(ThetaGraphSpec::default_rational())),
        ("irrational", Ok(ThetaGraphSpec::default_irrational())),
        ("fan N=4", ThetaGraphSpec::fan(4).map_err(|e| e.to_string())),
    ];
    for (name, spec) in specs {
        let spec = match spec {
            Ok(s) => s,
            Err(e) => {
                t.check(false, || format!("{name}: {e}"));
                continue;
            }
        };
        let c = match build_counterexample(&spec) {
            Ok(c) => c,
            Err(e) => {
                t.check(false, || format!("{name}: {e}"));
                continue;
            }
        };
        let n = c.n as i64;
        t.check(c.mass.equals(&c.expected_mass) == Some(true), || {
            format!("{name}: mass {} ≠ {}ℓ² = {}", c.mass, 2 * n, c.expected_mass)
        });
        t.check(c.mass_certified, || format!("{name}: stored representation has overlaps"));
        t.check(c.boundary_zero, || format!("{name}: boundary of the embedded chain is not zero"));
        t.check(c.split, || format!("{name}: not (1,1)-split"));
        let w = c.mass.interval.width();
        t.check(w < IRRATIONAL_WIDTH, || format!("{name}: interval width {w:e}"));
        for (s, u) in [(q2(3, 7), q2(5, 11)), (q2(1, 3), q2(2, 3)), (q2(9, 13), q2(1, 17))] {
            match counterexample_slice_mass(&c, &s, &u) {
                Ok(m) => t.check(m.as_rational() == Some(q(2 * n)), || format!("{name}: slice mass {m} ≠ {}", 2 * n)),
                Err(e) => t.check(false, || format!("{name}: slice: {e}")),
            }
        }
        t.note(format!("{name}: N = {}, ℓ = {}, M(A) = {}", c.n, c.length, c.mass));
    }
    t
}

fn criterion_ip_search(_seed: u64) -> Tally {
    let mut t = Tally::default();
    match decomposition_lower_bound_search(3, 3, 2) {
        Ok(r) => {
            t.check(r.min_found == Some(8), || format!("N=3: min {:?} ≠ 8", r.min_found));
            t.check(r.parity_ok, || "N=3: odd ℓ¹ norm in the pool".into());
            t.note(format!("N=3: min {:?}, pool {}, nodes {}", r.min_found, r.pool_size, r.nodes));
        }
        Err(e) => t.check(false, || format!("N=3: {e}")),
    }
    match decomposition_lower_bound_search(5, 4, 2) {
        Ok(r) => {
            t.check(r.min_found.map_or(true, |m| m >= 16), || format!("N=5: min {:?} < 16", r.min_found));
            t.check(r.parity_ok, || "N=5: odd ℓ¹ norm in the pool".into());
            t.note(format!("N=5: min {:?}, pool {}, nodes {}", r.min_found, r.pool_size, r.nodes));
        }
        Err(e) => t.check(false, || format!("N=5: {e}")),
    }
    t
}

fn random_point(rng: &mut ChaCha8Rng, n: usize, r: i64) -> RationalPoint {
    RationalPoint((0..n).map(|_| q(rng.gen_range(-r..=r))).collect())
}

fn random_simplex(rng: &mut ChaCha8Rng, n: usize, k: usize, r: i64) -> SimplexCell {
    loop {
        let vs: Vec<RationalPoint> = (0..=k).map(|_| random_point(rng, n, r)).collect();
        if let Ok(c) = SimplexCell::new(vs) {
            if !c.squared_volume().is_zero() {
                return c;
            }
        }
    }
}

fn random_chain(rng: &mut ChaCha8Rng, n: usize, k: usize, cells: usize) -> Chain {
    let mut c = Chain::new(n, k, Z);
    for _ in 0..cells {
        let g = loop {
            let g = rng.gen_range(-3i64..=3);
            if g != 0 {
                break g;
            }
        };
        c.add_cell(random_simplex(rng, n, k, 3), &q(g)).expect("shape");
    }
    c
}

fn random_tensor(rng: &mut ChaCha8Rng, split: (usize, usize), ty: TypeIndex, terms: usize) -> TensorChain {
    let mut t = TensorChain::new(split, ty, Z);
    for _ in 0..terms {
        let a = random_simplex(rng, split.0, ty.k1, 3);
        let b = random_simplex(rng, split.1, ty.k2, 3);
        t.add_term(a, b, &q(rng.gen_range(1i64..=3) * if rng.gen_bool(0.5) { 1 } else { -1 })).expect("shape");
    }
    t
}

fn translate(cell: &SimplexCell, axis: usize, by: &Q) -> SimplexCell {
    let vs = cell
        .vertices()
        .iter()
        .map(|v| {
            let mut p = v.clone();
            p.0[axis] += by;
            p
        })
        .collect();
    SimplexCell::new(vs).expect("translation keeps the cell")
}

fn criterion_split_vs_j(seed: u64) -> Tally {
    let mut t = Tally::default();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut split_count = 0;
    let mut built = 0;
    while built < RANDOM_SPLIT_CHAINS {
        let n = rng.gen_range(2..=4usize);
        let n1 = rng.gen_range(1..n);
        let n2 = n - n1;
        let k = rng.gen_range(1..=2usize.min(n));
        let types = TypeIndex::all(k, n1, n2);
        let mut c = Chain::new(n, k, Z);
        let items = rng.gen_range(1..=2);
        let mut product_type = None;
        for item in 0..items {
            let offset = q(20 * item as i64);
            let g = q(rng.gen_range(1i64..=3));
            if rng.gen_bool(0.5) {
                let ty = types[rng.gen_range(0..types.len())];
                let a = random_simplex(&mut rng, n1, ty.k1, 3);
                let b = random_simplex(&mut rng, n2, ty.k2, 3);
                for (piece, s) in a.product_prism(&b) {
                    let v = if s < 0 { -g.clone() } else { g.clone() };
                    c.add_cell(translate(&piece, 0, &offset), &v).expect("shape");
                }
                product_type = Some(ty);
            } else {
                let cell = random_simplex(&mut rng, n, k, 3);
                c.add_cell(translate(&cell, 0, &offset), &g).expect("shape");
            }
        }
        if c.is_zero() {
            continue;
        }
        built += 1;
        let ty = match product_type {
            Some(ty) if rng.gen_bool(0.7) => ty,
            _ => types[rng.gen_range(0..types.len())],
        };
        let verdict = match splitting_test(&c, n1, ty) {
            Ok(v) => v,
            Err(e) => {
                t.check(false, || format!("splitting test: {e}"));
                continue;
            }
        };
        if matches!(verdict, SplitVerdict::NeedsCertifiedRep { .. }) {
            t.check(false, || format!("generated chain not certified: {c}"));
            continue;
        }
        let split = verdict == SplitVerdict::Split;
        let mut off_vanish = true;
        for other in types.iter().filter(|o| **o != ty) {
            match j_vanishing_test(&c, n1, *other) {
                Ok(j) => off_vanish &= j.verdict.is_vanishes(),
                Err(e) => t.check(false, || format!("j test: {e}")),
            }
        }
        split_count += usize::from(split);
        t.check(split == off_vanish, || format!("split = {split} but off-type vanishing = {off_vanish} for type {ty:?}, n1 = {n1}: {c}"));
    }
    t.note(format!("{} chains, {} split", built, split_count));
    t
}

fn criterion_identities(seed: u64) -> Tally {
    let mut t = Tally::default();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    // ∂² = 0
    for _ in 0..IDENTITY_INSTANCES {
        let n = rng.gen_range(2..=4usize);
        let k = rng.gen_range(2..=n.min(3));
        let c = { let m = rng.gen_range(1..=3); random_chain(&mut rng, n, k, m) };
        let ok = c.boundary().and_then(|b| b.boundary()).map(|bb| bb.is_zero()).unwrap_or(false);
        t.check(ok, || format!("∂∂ ≠ 0 on {c}"));
    }
    // partial boundaries, embedding, i-view
    for _ in 0..IDENTITY_INSTANCES {
        let n1 = rng.gen_range(1..=2usize);
        let n2 = rng.gen_range(1..=2usize);
        let ty = TypeIndex::new(rng.gen_range(0..=n1), rng.gen_range(0..=n2));
        let x = { let m = rng.gen_range(1..=3); random_tensor(&mut rng, (n1, n2), ty, m) };
        let d1 = x.d1();
        let d2 = x.d2();
        if let Some(d) = &d1 {
            t.check(d.d1().map_or(true, |dd| dd.is_zero()), || format!("d1² ≠ 0 for type {ty:?}"));
        }
        if let Some(d) = &d2 {
            t.check(d.d2().map_or(true, |dd| dd.is_zero()), || format!("d2² ≠ 0 for type {ty:?}"));
        }
        if let (Some(a), Some(b)) = (&d1, &d2) {
            let ok = match (a.d2(), b.d1()) {
                (Some(x12), Some(x21)) => x12 == x21.neg(),
                _ => false,
            };
            t.check(ok, || format!("d1d2 ≠ −d2d1 for type {ty:?}"));
        }
        if ty.k1 + ty.k2 > 0 {
            let lhs = x.embed().boundary();
            let mut rhs = Chain::new(n1 + n2, ty.k1 + ty.k2 - 1, Z);
            for d in [&d1, &d2].into_iter().flatten() {
                rhs = rhs.add(&d.embed()).expect("same shape");
            }
            t.check(lhs.as_ref().map_or(false, |l| *l == rhs), || format!("∂ embed ≠ embed d1 + embed d2 for type {ty:?}"));
        }
        t.check(x.i_map().i_inverse() == x, || format!("i⁻¹ i ≠ id for type {ty:?}"));
    }
    // mass additivity of j on certified sums over several types
    for _ in 0..IDENTITY_INSTANCES {
        let n1 = rng.gen_range(1..=2usize);
        let n2 = rng.gen_range(1..=2usize);
        let k = rng.gen_range(1..=(n1 + n2).min(3));
        let types = TypeIndex::all(k, n1, n2);
        let mut total = Chain::new(n1 + n2, k, Z);
        let mut parts = Vec::new();
        for (idx, ty) in types.iter().enumerate() {
            if rng.gen_bool(0.3) && !(idx == 0 && types.len() == 1) {
                continue;
            }
            let a = translate(&random_simplex(&mut rng, n1, ty.k1, 3), 0, &q(20 * idx as i64));
            let b = random_simplex(&mut rng, n2, ty.k2, 3);
            let part = TensorChain::from_terms((n1, n2), *ty, Z, [(a, b, q(rng.gen_range(1i64..=3)))]).expect("shape");
            total = total.add(&part.embed()).expect("shape");
            parts.push(part);
        }
        let report = total.mass(true);
        t.check(report.certified != Some(false), || "sum of translated parts overlaps".into());
        match j_decompose(&total, n1) {
            Ok(j) => {
                let sum = j.values().fold(CertifiedReal::zero(), |acc, p| acc.add(&p.mass()));
                t.check(sum.equals(&report.value) == Some(true), || format!("Σ M(j parts) = {} ≠ M = {}", sum, report.value));
                t.check(j.len() == parts.len() && parts.iter().all(|p| j.get(&p.type_index()) == Some(p)), || {
                    "j does not recover the parts".into()
                });
            }
            Err(e) => t.check(false, || format!("j_decompose: {e}")),
        }
    }
    // χ(∂B) = 0
    for _ in 0..IDENTITY_INSTANCES {
        let n = rng.gen_range(1..=3usize);
        let b = { let m = rng.gen_range(1..=4); random_chain(&mut rng, n, 1, m) };
        let ok = b
            .boundary()
            .ok()
            .and_then(|d| chi(&d).ok())
            .map_or(false, |v| v.is_zero());
        t.check(ok, || format!("χ(∂B) ≠ 0 for {b}"));
    }
    // ℤ/2: p¹ ∧ (2·1̄ p²) = 0, and 1̄ + 1̄ = 0̄
    let z2 = CoefficientGroup::IntegersMod(2);
    for _ in 0..IDENTITY_INSTANCES {
        let n1 = rng.gen_range(1..=2usize);
        let n2 = rng.gen_range(1..=2usize);
        let a = { let m = rng.gen_range(0..=n1); random_simplex(&mut rng, n1, m, 3) };
        let b = { let m = rng.gen_range(0..=n2); random_simplex(&mut rng, n2, m, 3) };
        let two_a = Chain::cell(a.clone(), Z, q(2)).expect("cell");
        let one_b = Chain::cell(b.clone(), z2, q(1)).expect("cell");
        let ok = TensorChain::wedge(&two_a, &one_b).map_or(false, |w| w.is_zero() && w.i_map().groups.is_empty());
        t.check(ok, || "2p¹ ∧ 1̄p² ≠ 0 over ℤ/2".into());
        t.check(one_b.add(&one_b).map_or(false, |s| s.is_zero()), || "1̄ + 1̄ ≠ 0̄".into());
        let mut direct = TensorChain::new((n1, n2), TypeIndex::new(a.dim(), b.dim()), z2);
        let _ = direct.add_term(a, b, &q(2));
        t.check(direct.is_zero(), || "stored 2·1̄ term survives".into());
    }
    t
}

fn generic_level(num: i64) -> Q {
    q2(num, 7) + q2(1, 1009)
}

fn criterion_slice_calculus(seed: u64) -> Tally {
    let mut t = Tally::default();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    // ∂Sl = Sl∂
    let chains = 12;
    for _ in 0..chains {
        let n = rng.gen_range(2..=3usize);
        let k = 2;
        let c = { let m = rng.gen_range(1..=3); random_chain(&mut rng, n, k, m) };
        let bc = c.boundary().expect("k ≥ 1");
        for _ in 0..SLICE_POINTS_PER_CHAIN {
            let axis = rng.gen_range(0..n);
            let sp = SliceSpec { gamma: vec![axis], point: RationalPoint(vec![generic_level(rng.gen_range(-25..25))]) };
            let ok = match (slice(&c, &sp), slice(&bc, &sp)) {
                (Ok(s), Ok(sb)) => s.boundary().and_then(|x| x.equals_mod_subdivision(&sb)).unwrap_or(false),
                _ => false,
            };
            t.check(ok, || format!("∂Sl ≠ Sl∂ on axis {axis} for {c}"));
        }
    }
    // factorwise slices: d2 Sl = (−1)^{|γ¹|} Sl d2, d1 Sl = Sl d1
    for _ in 0..chains {
        let x = { let m = rng.gen_range(1..=3); random_tensor(&mut rng, (2, 2), TypeIndex::new(1, 2), m) };
        let d1 = x.d1().expect("k1 = 1");
        let d2 = x.d2().expect("k2 = 2");
        for _ in 0..SLICE_POINTS_PER_CHAIN / 2 {
            let a = generic_level(rng.gen_range(-25..25));
            let b = generic_level(rng.gen_range(-25..25));
            let g1 = rng.gen_range(0..2usize);
            let g2 = 2 + rng.gen_range(0..2usize);
            let both = SliceSpec { gamma: vec![g1, g2], point: RationalPoint(vec![a, b.clone()]) };
            let ok = match (x.slice(&both), d2.slice(&both)) {
                (Ok(s), Ok(sd)) => s.d2() == Some(sd.neg()),
                _ => false,
            };
            t.check(ok, || "d2 Sl ≠ −Sl d2 with |γ¹| = 1".into());
            let second = SliceSpec { gamma: vec![g2], point: RationalPoint(vec![b]) };
            let ok = match (x.slice(&second), d1.slice(&second), d2.slice(&second)) {
                (Ok(s), Ok(s1), Ok(s2)) => s.d1() == Some(s1) && s.d2() == Some(s2),
                _ => false,
            };
            t.check(ok, || "partial boundaries do not commute with a second-factor slice".into());
        }
    }
    // half-space formula: ∂(A⌞H) − (∂A)⌞H = (−1)^k A ∩ {x = s}
    for k in 1..=2usize {
        for _ in 0..4 {
            let c = { let m = rng.gen_range(1..=3); random_chain(&mut rng, 2, k, m) };
            let bc = c.boundary().expect("k ≥ 1");
            for _ in 0..HALF_SPACE_LEVELS {
                let axis = rng.gen_range(0..2usize);
                let s = generic_level(rng.gen_range(-25..25));
                let h = BoxRegion::half_space(2, axis, s.clone(), Side::Above);
                let sp = SliceSpec { gamma: vec![axis], point: RationalPoint(vec![s]) };
                let ok = (|| -> Option<bool> {
                    let lhs = c.restrict_box(&h).ok()?.boundary().ok()?.sub(&bc.restrict_box(&h).ok()?).ok()?;
                    let sec = section(&c, &sp).ok()?;
                    let rhs = if k % 2 == 0 { sec } else { sec.neg() };
                    lhs.equals_mod_subdivision(&rhs).ok()
                })()
                .unwrap_or(false);
                t.check(ok, || format!("half-space formula fails at k = {k}, axis {axis} for {c}"));
            }
        }
    }
    // sampled slice-mass integral on axis-aligned chains
    for _ in 0..20 {
        let n = rng.gen_range(2..=3usize);
        let mut c = Chain::new(n, 2, Z);
        for idx in 0..rng.gen_range(1..=3) {
            let mut base = random_point(&mut rng, n, 3);
            base.0[0] += q(20 * idx);
            let i = rng.gen_range(0..n);
            let j = (i + rng.gen_range(1..n)) % n;
            let mut u = base.clone();
            u.0[i] += q(rng.gen_range(1..=3) * if rng.gen_bool(0.5) { 1 } else { -1 });
            let mut v = base.clone();
            v.0[j] += q(rng.gen_range(1..=3) * if rng.gen_bool(0.5) { 1 } else { -1 });
            let cell = SimplexCell::new(vec![base, u, v]).expect("right triangle");
            c.add_cell(cell, &q(rng.gen_range(1i64..=3))).expect("shape");
        }
        let report = c.mass(true);
        if report.certified != Some(true) {
            continue;
        }
        for axis in 0..n {
            let mut cuts = c.vertex_levels(axis);
            cuts.dedup();
            let mut integral = CertifiedReal::zero();
            let mut ok = true;
            for w in cuts.windows(2) {
                // slice mass is affine between consecutive vertex levels
                let x = (&w[0] + &w[1]) / q(2);
                match slice(&c, &SliceSpec { gamma: vec![axis], point: RationalPoint(vec![x]) }) {
                    Ok(s) => integral = integral.add(&s.mass(false).value.scale(&(&w[1] - &w[0]))),
                    Err(_) => ok = false,
                }
            }
            let slack = report.value.interval.hi + SLICE_INTEGRAL_SLACK;
            t.check(ok && integral.interval.hi <= slack, || format!("∫ M(Sl) = {} > M = {} on axis {axis}", integral, report.value));
        }
    }
    t
}

fn criterion_staircase(_seed: u64) -> Tally {
    let mut t = Tally::default();
    let mut previous: Option<Q> = None;
    for j in 0..=STAIRCASE_MAX_LEVEL {
        let s = match build_staircase(j, false) {
            Ok(s) => s,
            Err(e) => {
                t.check(false, || format!("J={j}: {e}"));
                continue;
            }
        };
        let m = s.a1.mass(true);
        t.check(m.value.as_rational() == Some(q(1)) && m.certified == Some(true), || format!("J={j}: M(A1) = {}", m.value));
        t.check(splitting_test(&s.a1, 1, TypeIndex::new(1, 0)).ok() == Some(SplitVerdict::Split), || format!("J={j}: A1 not (1,0)-split"));
        if !s.a2.is_empty() {
            t.check(splitting_test(&s.a2, 1, TypeIndex::new(0, 1)).ok() == Some(SplitVerdict::Split), || format!("J={j}: A2 not (0,1)-split"));
        }
        match s.a1.add(&s.a2).and_then(|x| x.boundary()) {
            Ok(b) => {
                let start = SimplexCell::point(RationalPoint(vec![q(0), q(0)]));
                let end = SimplexCell::point(RationalPoint(vec![q(1), s.end_height.clone()]));
                let ok = b.len() == 2 && b.coefficient_of(&start).value() == &q(-1) && b.coefficient_of(&end).value() == &q(1);
                t.check(ok, || format!("J={j}: ∂(A1+A2) = {b}"));
                t.check(chi(&b).map_or(false, |v| v.is_zero()), || format!("J={j}: χ(∂(A1+A2)) ≠ 0"));
            }
            Err(e) => t.check(false, || format!("J={j}: {e}")),
        }
        let bm = s.a1.boundary().map(|b| b.mass(false).value.as_rational());
        // endpoint count: the curve breaks at every atom strictly inside (0,1)
        let interior_atoms = staircase_atoms(j).iter().filter(|(x, _)| *x < q(1)).count() as i64;
        let oracle = q(2 * (interior_atoms + 1));
        match bm {
            Ok(Some(v)) => {
                t.check(v == oracle, || format!("J={j}: M(∂A1) = {} but the atom count gives {}", format_rational(&v), format_rational(&oracle)));
                t.check(v >= two_pow(j as i32), || format!("J={j}: M(∂A1) < 2^J"));
                if let Some(p) = &previous {
                    t.check(&v > p, || format!("J={j}: M(∂A1) not increasing"));
                }
                previous = Some(v);
            }
            _ => t.check(false, || format!("J={j}: boundary mass unavailable")),
        }
    }
    t
}

fn criterion_collapse(seed: u64) -> Tally {
    let mut t = Tally::default();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let h = q2(1, 16);
    // x ∈ [0, 7/16], y ∈ [0, 4/16], one cell of margin
    let cx = CubicalComplex::new(vec![-h.clone(), -h.clone()], h.clone(), vec![10, 6], 1).expect("complex");
    let instances = 10;
    let mut worst = Q::zero();
    for _ in 0..instances {
        let mut x = TensorChain::new((1, 1), TypeIndex::new(0, 1), Z);
        for _ in 0..rng.gen_range(1..=3) {
            let a = SimplexCell::point(RationalPoint(vec![q2(rng.gen_range(0..8), 16)]));
            let lo = rng.gen_range(0..4i64);
            let hi = rng.gen_range(lo + 1..=4);
            let b = SimplexCell::new(vec![RationalPoint(vec![q2(lo, 16)]), RationalPoint(vec![q2(hi, 16)])]).expect("segment");
            let g = rng.gen_range(1i64..=2) * if rng.gen_bool(0.5) { 1 } else { -1 };
            x.add_term(a, b, &q(g)).expect("shape");
        }
        if x.is_zero() {
            continue;
        }
        let mass = x.mass().as_rational().expect("rational");
        let d2_mass = x.d2().expect("k2 = 1").mass().as_rational().expect("rational");
        let collapsed: Vec<Chain> = (0..=COLLAPSE_MAX_LEVEL).map(|j| x.dyadic_collapse(j).expect("type (0,1)").embed()).collect();
        for i in 0..=COLLAPSE_MAX_LEVEL {
            let bound = two_pow(-(i as i32)) * (&mass + &d2_mass);
            for j in i..=COLLAPSE_MAX_LEVEL {
                let diff = collapsed[j as usize].sub(&collapsed[i as usize]).expect("shape");
                let f = if diff.is_zero() {
                    Q::zero()
                } else {
                    match rasterize(&diff, &cx).and_then(|g| flat_norm(&cx, &g)) {
                        Ok(r) => r.value,
                        Err(e) => {
                            t.check(false, || format!("i={i} j={j}: {e}"));
                            continue;
                        }
                    }
                };
                if !bound.is_zero() && f.clone() / &bound > worst {
                    worst = f.clone() / &bound;
                }
                t.check(f <= bound, || {
                    format!("i={i} j={j}: F = {} > {}", format_rational(&f), format_rational(&bound))
                });
            }
        }
    }
    t.note(format!("largest F / bound ratio {}", format_rational(&worst)));
    t
}

fn all_small_complexes() -> Vec<CubicalComplex> {
    let mut out = Vec::new();
    for e in 1..=5usize {
        out.push(CubicalComplex::new(vec![q(0)], q(1), vec![e], 1).expect("complex"));
    }
    out.push(CubicalComplex::new(vec![q(0), q(0)], q(1), vec![1, 1], 1).expect("complex"));
    out.retain(|c| c.cell_count() <= LP_ORACLE_MAX_CELLS);
    out
}

fn criterion_lp_oracle(seed: u64) -> Tally {
    let mut t = Tally::default();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let complexes = all_small_complexes();
    for cx in &complexes {
        let n = cx.ambient();
        for k in 0..n {
            for _ in 0..6 {
                let mut p = GridChain::zero(cx, k, Z);
                for c in p.coeffs.iter_mut() {
                    *c = q(rng.gen_range(-2i64..=2));
                }
                let label = format!("extents {:?}, k = {k}", cx.extents());
                match (flat_norm(cx, &p), flat_norm_problem(cx, &p)) {
                    (Ok(lp), Ok(prob)) => {
                        let brute = vertex_enumeration_optimum(&prob);
                        t.check(brute.as_ref() == Some(&lp.value), || {
                            format!("{label}: simplex {} vs enumeration {:?}", format_rational(&lp.value), brute.map(|b| format_rational(&b)))
                        });
                    }
                    (Err(e), _) | (_, Err(e)) => t.check(false, || format!("{label}: {e}")),
                }
                for ty in TypeIndex::all(k, cx.n1(), n - cx.n1()) {
                    let mut p = p.clone();
                    for (c, cell) in p.coeffs.iter_mut().zip(cx.cells(k)) {
                        if cell.type_index(cx.n1()) != ty {
                            *c = Q::zero();
                        }
                    }
                    match (tensor_flat_norm(cx, &p, ty), tensor_flat_norm_problem(cx, &p, ty)) {
                        (Ok(lp), Ok(prob)) => {
                            let brute = vertex_enumeration_optimum(&prob);
                            t.check(brute.as_ref() == Some(&lp.value), || {
                                format!("{label}, type {ty:?}: simplex {} vs enumeration {:?}", format_rational(&lp.value), brute.map(|b| format_rational(&b)))
                            });
                        }
                        (Err(e), _) | (_, Err(e)) => t.check(false, || format!("{label}, type {ty:?}: {e}")),
                    }
                }
            }
        }
    }
    t.note(format!("{} complexes with at most {} cells", complexes.len(), LP_ORACLE_MAX_CELLS));
    t
}
