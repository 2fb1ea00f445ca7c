//! The acceptance gate: one test per criterion, each printing a PASS line
//! with its measured runtime (visible with `--nocapture`). Time budgets are
//! asserted where a criterion carries one.

use std::collections::BTreeSet;
use std::path::Path;
use std::time::{Duration, Instant};

use packbounds::bounds::cert::{Certificate, ScaleStep};
use packbounds::bounds::{
    bound_l2d, bound_l3d, bound_obpp, bound_spp, family_scales_2d, family_scales_3d, improved_2d,
    improved_3d, mv_partial_2d, mv_partial_3d, mv_sets_2d, okp_relaxation_bound,
    transformed_volume, ustep_scales, volume_criterion, BoundKind, Verdict,
};
use packbounds::dff::{candidate_params, DffSpec};
use packbounds::model::format::parse_instance;
use packbounds::model::{normalize, BoxItem, NormalizedInstance};
use packbounds::oracle::{
    check_dff, exact_bin_count, exact_okp_value, exact_packable, DffVerdict,
};
use packbounds::rational::Rational;
use packbounds::scales::{apply_scale, stretch, ConservativeScale};

fn r(n: i64, d: i64) -> Rational {
    Rational::new(n, d)
}

fn data(name: &str) -> NormalizedInstance {
    let path = Path::new(env!("CARGO_MANIFEST_DIR"))
        .join("examples/data")
        .join(name);
    let file = parse_instance(&std::fs::read_to_string(path).unwrap()).unwrap();
    normalize(&file.instance)
}

fn pass(criterion: u32, name: &str, detail: &str, started: Instant, budget: Option<Duration>) {
    let elapsed = started.elapsed();
    println!(
        "criterion {criterion} ({name}): PASS — {detail} ({:.2}s)",
        elapsed.as_secs_f64()
    );
    if let Some(budget) = budget {
        assert!(
            elapsed <= budget,
            "criterion {criterion} exceeded its {budget:?} budget: {elapsed:?}"
        );
    }
}

fn xorshift(state: &mut u64) -> u64 {
    *state ^= *state << 13;
    *state ^= *state >> 7;
    *state ^= *state << 17;
    *state
}

fn random_instance(seed: u64, dim: usize, n: usize, max_den: u64) -> NormalizedInstance {
    let mut state = seed.wrapping_mul(0x9e37_79b9_7f4a_7c15) | 1;
    let boxes = (0..n)
        .map(|i| {
            let size = (0..dim)
                .map(|_| {
                    let den = 1 + xorshift(&mut state) % max_den;
                    let num = 1 + xorshift(&mut state) % den;
                    Rational::new(num as i64, den as i64)
                })
                .collect();
            BoxItem::new(format!("b{i}"), size)
        })
        .collect();
    NormalizedInstance::new(dim, boxes).unwrap()
}

fn identity(dim: usize) -> ConservativeScale {
    ConservativeScale::identity(dim)
}

fn battery(dim: usize) -> Vec<ConservativeScale> {
    let mut out = vec![identity(dim)];
    out.extend(ustep_scales(dim, &[1, 2, 3, 4]).unwrap());
    out
}

#[test]
fn criterion_1_nine_cubes_certificate() {
    let t = Instant::now();
    let inst = data("nine_cubes.opp");
    assert_eq!(
        volume_criterion(&inst, &identity(3)).unwrap(),
        Verdict::Pass {
            volume: r(72, 125)
        }
    );
    let u2 = ConservativeScale::from_dffs(vec![DffSpec::u_step(2).unwrap(); 3]);
    assert_eq!(
        volume_criterion(&inst, &u2).unwrap(),
        Verdict::Infeasible { volume: r(9, 8) }
    );
    pass(
        1,
        "nine-cubes certificate",
        "identity volume 72/125 passes, step scale volume 9/8 proves infeasibility",
        t,
        Some(Duration::from_secs(1)),
    );
}

#[test]
fn criterion_2_three_box_composite_bound() {
    let t = Instant::now();
    let inst = data("three_rects.opp");
    for p in candidate_params(&inst, 0) {
        for q in candidate_params(&inst, 1) {
            assert_eq!(mv_partial_2d(&inst, &p, &q).unwrap(), 0);
        }
    }
    assert_eq!(improved_2d(&inst, &r(1, 2), &r(1, 2)).unwrap(), 2);
    assert_eq!(bound_l2d(&inst).unwrap().value, Rational::from_int(2));
    pass(
        2,
        "two-dimensional partial vs improved bound",
        "partial bound 0 everywhere, improved and composite bounds reach 2",
        t,
        Some(Duration::from_secs(1)),
    );
}

#[test]
fn criterion_3_five_box_composite_bound() {
    let t = Instant::now();
    let inst = data("five_blocks.opp");
    for p in candidate_params(&inst, 0) {
        for q in candidate_params(&inst, 1) {
            assert!(mv_partial_3d(&inst, &p, &q).unwrap() <= 1);
        }
    }
    assert_eq!(improved_3d(&inst, &r(1, 2), &r(1, 2)).unwrap(), 2);
    assert_eq!(bound_l3d(&inst).unwrap().value, Rational::from_int(2));
    pass(
        3,
        "three-dimensional partial vs improved bound",
        "partial bound stays at 1, improved and composite bounds reach 2",
        t,
        Some(Duration::from_secs(1)),
    );
}

#[test]
fn criterion_4_stretching_certificate() {
    let t = Instant::now();
    let path = Path::new(env!("CARGO_MANIFEST_DIR")).join("examples/data/six_boxes.opp");
    let file = parse_instance(&std::fs::read_to_string(path).unwrap()).unwrap();
    let inst = normalize(&file.instance);
    let outcome = stretch(&inst, &file.edges, "1'", 0).unwrap();
    assert!(outcome.exact);
    assert_eq!(outcome.lambda, r(16, 20));
    let stretched = apply_scale(&inst, &outcome.scale).unwrap();
    assert_eq!(*stretched.box_by_id("1'").unwrap().1.size_in(0), r(12, 20));
    let volume = stretched.total_volume();
    assert_eq!(volume, r(284, 260));
    assert!(matches!(
        volume_criterion(&inst, &outcome.scale).unwrap(),
        Verdict::Infeasible { .. }
    ));
    // And the packaged argument re-verifies from the text alone.
    let cert = Certificate::new(
        BoundKind::OppInfeasibility,
        volume,
        file,
        vec![ScaleStep::Stretch {
            box_id: "1'".into(),
            axis: 0,
            lambda: outcome.lambda,
        }],
    );
    assert_eq!(cert.verify().unwrap(), r(284, 260));
    pass(
        4,
        "stretching certificate",
        "lambda 16/20 grows box 1' to width 12/20; volume 284/260 > 1 is infeasible",
        t,
        Some(Duration::from_secs(1)),
    );
}

#[test]
fn criterion_5_reformulation_identity() {
    let t = Instant::now();
    let mut checked = 0u64;
    for seed in 0..1000u64 {
        let n = 1 + (seed as usize % 10);
        let inst = random_instance(seed, 2, n, 12);
        for p in candidate_params(&inst, 0) {
            for q in candidate_params(&inst, 1) {
                let lhs = mv_partial_2d(&inst, &p, &q).unwrap();
                let (i1, i2, i3) = mv_sets_2d(&inst, &p, &q).unwrap();
                let union: BTreeSet<usize> =
                    i1.into_iter().chain(i2).chain(i3).collect();
                let sub = inst.subset(&union.into_iter().collect::<Vec<_>>());
                let scale = ConservativeScale::from_dffs(vec![
                    DffSpec::phi_step(p.clone()).unwrap(),
                    DffSpec::phi_step(q.clone()).unwrap(),
                ]);
                let rhs = transformed_volume(&sub, &scale).unwrap().ceil_i64();
                assert_eq!(lhs, rhs, "mismatch at seed {seed}, p={p}, q={q}");
                checked += 1;
            }
        }
    }
    pass(
        5,
        "reformulation identity",
        &format!("{checked} parameter pairs over 1000 instances, zero mismatches"),
        t,
        Some(Duration::from_secs(60)),
    );
}

#[test]
fn criterion_6_dual_feasibility_suite() {
    let t = Instant::now();
    let mut checked = 0u64;
    let mut check = |f: &DffSpec| {
        match check_dff(f, 12).unwrap() {
            DffVerdict::Holds => {}
            DffVerdict::Counterexample(xs) => panic!("{f} failed on {xs:?}"),
        }
        checked += 1;
    };

    for k in 1..=6 {
        check(&DffSpec::u_step(k).unwrap());
    }

    // Every reduced epsilon in (0, 1/2] with denominator at most 12.
    let mut eps_values = vec![];
    for den in 2..=12i64 {
        for num in 1..=den / 2 {
            let eps = r(num, den);
            if !eps_values.contains(&eps) {
                eps_values.push(eps);
            }
        }
    }
    for eps in &eps_values {
        check(&DffSpec::threshold(eps.clone()).unwrap());
        check(&DffSpec::phi_step(eps.clone()).unwrap());
    }
    check(&DffSpec::threshold(Rational::zero()).unwrap());

    // 200 random compositions and convex combinations of known-good parts.
    let mut state = 0x5eed_5eed_5eed_5eedu64;
    let pool: Vec<DffSpec> = {
        let mut v = vec![DffSpec::Identity];
        for k in 1..=4 {
            v.push(DffSpec::u_step(k).unwrap());
        }
        for eps in [r(1, 6), r(1, 4), r(1, 3), r(5, 12), r(1, 2)] {
            v.push(DffSpec::threshold(eps.clone()).unwrap());
            v.push(DffSpec::phi_step(eps).unwrap());
        }
        v
    };
    let weights = [r(1, 4), r(1, 3), r(1, 2), r(2, 3), r(3, 4)];
    for _ in 0..200 {
        let a = pool[(xorshift(&mut state) % pool.len() as u64) as usize].clone();
        let b = pool[(xorshift(&mut state) % pool.len() as u64) as usize].clone();
        let f = if xorshift(&mut state) % 2 == 0 {
            DffSpec::compose(a, b)
        } else {
            let w = weights[(xorshift(&mut state) % weights.len() as u64) as usize].clone();
            DffSpec::convex(vec![(w.clone(), a), (Rational::one() - w, b)]).unwrap()
        };
        check(&f);
    }
    pass(
        6,
        "dual feasibility suite",
        &format!("{checked} functions exhaustively verified at denominator 12"),
        t,
        Some(Duration::from_secs(120)),
    );
}

#[test]
fn criterion_7_soundness_suite() {
    let t = Instant::now();
    let mut instances = 0u64;
    let mut infeasible_hits = 0u64;
    for dim in [2usize, 3] {
        for n in 1..=5usize {
            for rep in 0..32u64 {
                let seed = (dim as u64) * 10_000 + (n as u64) * 100 + rep;
                let inst = random_instance(seed, dim, n, 5);
                instances += 1;

                let exact = exact_bin_count(&inst, 5).unwrap();
                let packable = exact_packable(&inst).unwrap();
                assert_eq!(exact <= 1, packable);

                let mut scales = battery(dim);
                let families = if dim == 2 {
                    family_scales_2d(&inst).unwrap()
                } else {
                    family_scales_3d(&inst).unwrap()
                };
                scales.extend(families.into_iter().map(|f| f.scale));
                for scale in &scales {
                    if volume_criterion(&inst, scale).unwrap().is_infeasible() {
                        infeasible_hits += 1;
                        assert!(!packable, "unsound verdict at seed {seed}");
                    }
                }

                let obpp = bound_obpp(&inst, &scales).unwrap().value;
                assert!(obpp <= Rational::from_int(exact as i64));
                let composite = if dim == 2 {
                    bound_l2d(&inst).unwrap().value
                } else {
                    bound_l3d(&inst).unwrap().value
                };
                assert!(
                    composite <= Rational::from_int(exact as i64),
                    "composite bound beats the optimum at seed {seed}"
                );

                let mut state = seed.wrapping_mul(0xa076_1d64_78bd_642f) | 1;
                let valued = NormalizedInstance::new(
                    dim,
                    inst.boxes()
                        .iter()
                        .map(|b| {
                            let v = 1 + xorshift(&mut state) % 20;
                            BoxItem::with_value(
                                b.id(),
                                b.size().to_vec(),
                                Rational::from_int(v as i64),
                            )
                        })
                        .collect(),
                )
                .unwrap();
                let exact_value = exact_okp_value(&valued, 5).unwrap();
                for scale in &scales[..6.min(scales.len())] {
                    assert!(
                        okp_relaxation_bound(&valued, scale).unwrap() >= exact_value,
                        "relaxation undercuts the optimum at seed {seed}"
                    );
                }
            }
        }
    }
    assert!(instances >= 300);
    assert!(infeasible_hits > 0, "suite never exercised an infeasibility proof");
    pass(
        7,
        "soundness suite",
        &format!(
            "{instances} instances, {infeasible_hits} infeasibility proofs, zero violations"
        ),
        t,
        Some(Duration::from_secs(600)),
    );
}

#[test]
fn criterion_8_dominance_and_monotonicity() {
    let t = Instant::now();
    let mut pairs = 0u64;
    for seed in 0..60u64 {
        let inst2 = random_instance(seed.wrapping_add(2_000), 2, 1 + (seed as usize % 6), 7);
        for p in candidate_params(&inst2, 0) {
            for q in candidate_params(&inst2, 1) {
                assert!(
                    improved_2d(&inst2, &p, &q).unwrap() >= mv_partial_2d(&inst2, &p, &q).unwrap()
                );
                pairs += 1;
            }
        }
        let inst3 = random_instance(seed.wrapping_add(3_000), 3, 1 + (seed as usize % 5), 6);
        for p in candidate_params(&inst3, 0) {
            for q in candidate_params(&inst3, 1) {
                assert!(
                    improved_3d(&inst3, &p, &q).unwrap() >= mv_partial_3d(&inst3, &p, &q).unwrap()
                );
                pairs += 1;
            }
        }

        // Growing the scale set never weakens either bound.
        let scales = battery(2 + (seed as usize % 2));
        let inst = if seed % 2 == 0 { &inst2 } else { &inst3 };
        let mut prev_spp = Rational::zero();
        let mut prev_obpp = Rational::zero();
        for take in 1..=scales.len() {
            let spp = bound_spp(inst, &scales[..take]).unwrap().value;
            let obpp = bound_obpp(inst, &scales[..take]).unwrap().value;
            assert!(spp >= prev_spp && obpp >= prev_obpp);
            prev_spp = spp;
            prev_obpp = obpp;
        }
    }
    pass(
        8,
        "dominance and monotonicity",
        &format!("{pairs} parameter pairs dominated, scale-set growth monotone"),
        t,
        None,
    );
}

#[test]
fn criterion_9_parameter_sufficiency() {
    let t = Instant::now();
    for seed in 0..20u64 {
        let n = 1 + (seed as usize % 6);
        let inst = random_instance(seed.wrapping_add(9_000), 2, n, 8);
        let mut cand_max = 0;
        for p in candidate_params(&inst, 0) {
            for q in candidate_params(&inst, 1) {
                cand_max = cand_max.max(improved_2d(&inst, &p, &q).unwrap());
            }
        }
        // A 100 x 100 grid over (0, 1/2]^2.
        let mut grid_max = 0;
        for i in 1..=100i64 {
            for j in 1..=100i64 {
                grid_max = grid_max.max(improved_2d(&inst, &r(i, 200), &r(j, 200)).unwrap());
            }
        }
        assert_eq!(
            cand_max, grid_max,
            "dense grid beats candidate parameters at seed {seed}"
        );
    }
    pass(
        9,
        "parameter sufficiency",
        "candidate maxima equal 10^4-point dense-grid maxima on 20 instances",
        t,
        None,
    );
}
