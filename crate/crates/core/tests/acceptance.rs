//! Acceptance suite: one PASS/FAIL line per criterion, nonzero exit if any
//! criterion fails. Run with `cargo test --test acceptance`.

use std::collections::{BTreeSet, HashMap};
use std::time::{Duration, Instant};

use num_bigint::BigInt;
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use facesat::classify::{classify_all, classify_face, classify_via_h0, classify_via_targets, face_feasible, verify_face_witness, FaceStatus, Feasibility};
use facesat::cone::{enumerate_faces, Cone, FacePoset, DEFAULT_FACE_BUDGET};
use facesat::construct::{all_antichains, construct_from_antichain, verify_construction, AntichainSpec};
use facesat::hilbert::{hilbert_basis, HilbertBasis};
use facesat::pairtype::{pair_type_of_columns, PairType};
use facesat::report::{build_report, ReportOptions};
use facesat::semigroup::{box_volume, Semigroup, Window, DEFAULT_POINT_BUDGET};
use facesat::{fixtures, IntMat, IntVec};

type Outcome = Result<String, String>;

type Criterion = (u32, &'static str, fn() -> Outcome, Duration);

fn v(x: &[i64]) -> IntVec {
    IntVec::from_i64s(x)
}

fn vs(xs: &[[i64; 2]]) -> Vec<IntVec> {
    let mut out: Vec<IntVec> = xs.iter().map(|x| v(x)).collect();
    out.sort();
    out.dedup();
    out
}

fn check(cond: bool, what: impl Into<String>) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(what.into())
    }
}

struct Setup {
    sg: Semigroup,
    poset: FacePoset,
    basis: HilbertBasis,
}

fn setup(a: &IntMat) -> Setup {
    let sg = Semigroup::from_generators(a).expect("fixture ingests");
    let poset = enumerate_faces(sg.cone(), DEFAULT_FACE_BUDGET).expect("faces");
    let basis = hilbert_basis(sg.cone());
    Setup { sg, poset, basis }
}

fn ray_face(s: &Setup, ray: &IntVec) -> usize {
    let r = s.sg.cone().extreme_rays().iter().position(|x| x == ray).expect("ray exists");
    s.poset.find(&[r]).expect("ray face")
}

fn criterion_1() -> Outcome {
    let s = setup(&fixtures::ex22());
    let f1 = s.poset.face(ray_face(&s, &v(&[1, 0])));
    let f2 = s.poset.face(ray_face(&s, &v(&[1, 4])));
    let y = v(&[1, 1]);
    let r1 = face_feasible(&s.sg, f1, &y);
    check(r1.status == Feasibility::Infeasible, "ray (1,0), target (1,1) should be infeasible")?;
    let r2 = face_feasible(&s.sg, f2, &y);
    check(r2.status == Feasibility::Feasible, "ray (1,4), target (1,1) should be feasible")?;
    for w in [v(&[0, 0, 3, -2]), v(&[0, 1, 1, -1])] {
        check(verify_face_witness(&s.sg, f2, &y, &w), format!("witness {w} does not satisfy the system"))?;
        check(s.sg.generators().mul_vec(&w) == y, format!("witness {w} misses the target"))?;
    }
    Ok(format!("F(1,0) infeasible, F(1,4) feasible with found witness {}", r2.witness.unwrap()))
}

fn criterion_2() -> Outcome {
    let s = setup(&fixtures::ex22());
    let h0 = s.sg.fundamental_holes(DEFAULT_POINT_BUDGET).map_err(|e| e.to_string())?;
    check(h0.holes == vec![v(&[1, 1])], format!("H0 = {:?}", h0.holes))?;
    let expected = vs(&[[1, 0], [1, 1], [1, 2], [1, 3], [1, 4]]);
    check(s.basis.elements() == &expected[..], format!("B = {:?}", s.basis.elements()))?;
    Ok("H0 = {(1,1)}, B = {(1,0),(1,1),(1,2),(1,3),(1,4)}".into())
}

/// Expected sets, listed as families and cut to the window x1 <= 4.
struct Expected {
    holes: Vec<IntVec>,
    sbar: Vec<IntVec>,
    min_ss: Vec<IntVec>,
    min_sq: Option<Vec<IntVec>>,
}

fn expected_sets(name: &str) -> Expected {
    let ks = 1..=4i64;
    let collect = |it: &mut dyn Iterator<Item = [i64; 2]>| -> Vec<IntVec> {
        let pts: Vec<[i64; 2]> = it.collect();
        vs(&pts)
    };
    match name {
        "ex21" => Expected {
            holes: vs(&[[1, 2]]),
            sbar: vs(&[[0, 0]]),
            min_ss: vs(&[[1, 0], [1, 1], [1, 3], [1, 4]]),
            min_sq: None,
        },
        "ex22" => Expected {
            holes: collect(&mut ks.clone().map(|k| [k, 1])),
            sbar: collect(&mut (0..=4).map(|i| [i, 0])),
            min_ss: collect(
                &mut ks
                    .clone()
                    .flat_map(|k| (2..=3).map(move |j| [k, j]))
                    .chain(std::iter::once([1, 4])),
            ),
            min_sq: Some(vs(&[[1, 2], [1, 3], [1, 4]])),
        },
        "ex23" => Expected {
            holes: collect(
                &mut ks
                    .clone()
                    .flat_map(|k| [[k, 1], [k, 4 * k - 1], [k, 3]]),
            ),
            sbar: collect(
                &mut (0..=4)
                    .map(|i| [i, 0])
                    .chain((1..=4).map(|i| [i, 2]))
                    .chain((0..=4).map(|i| [i, 4 * i])),
            ),
            min_ss: collect(
                &mut (2..=4)
                    .flat_map(|k| (4..=6).map(move |j| [k, j]))
                    .chain(std::iter::once([3, 8]))
                    .chain((3..=4).map(|k| [k, 7]))
                    .chain((3..=4).flat_map(|k| [[k, 4 * k - 2], [k, 4 * k - 3]])),
            ),
            min_sq: Some(vs(&[[2, 4], [2, 5], [2, 6]])),
        },
        _ => unreachable!(),
    }
}

fn criterion_3() -> Outcome {
    // {x1 <= 4} ∩ K is exactly this box, since 0 <= x2 <= 4 x1 on K
    let window = Window::boxed(&[(0, 4), (0, 16)]);
    let mut notes = Vec::new();
    for (name, a) in [("ex21", fixtures::ex21()), ("ex22", fixtures::ex22()), ("ex23", fixtures::ex23())] {
        let s = setup(&a);
        let h0 = s.sg.fundamental_holes(DEFAULT_POINT_BUDGET).map_err(|e| e.to_string())?;
        let sets = s.sg.windowed_min_sets(&h0, &window, DEFAULT_POINT_BUDGET).map_err(|e| e.to_string())?;
        let e = expected_sets(name);
        check(sets.holes == e.holes, format!("{name} holes {:?}", sets.holes))?;
        check(sets.sbar == e.sbar, format!("{name} S-bar {:?}", sets.sbar))?;
        check(sets.min_ss == e.min_ss, format!("{name} min(S;S) {:?}", sets.min_ss))?;
        if let Some(sq) = e.min_sq {
            check(sets.min_sq == sq, format!("{name} min(S;Q) {:?}", sets.min_sq))?;
        }

        let report = classify_all(&s.sg, &s.poset, &s.basis);
        let st = |ray: [i64; 2]| report.status[ray_face(&s, &v(&ray))];
        let top = report.status[s.poset.top()];
        let (f1, f2) = (st([1, 0]), st([1, 4]));
        use FaceStatus::*;
        let want = match name {
            "ex21" => (AlmostSaturated, AlmostSaturated, AlmostSaturated),
            "ex22" => (NowhereSaturated, AlmostSaturated, AlmostSaturated),
            _ => (NowhereSaturated, NowhereSaturated, AlmostSaturated),
        };
        check((f1, f2, top) == want, format!("{name} classification {:?}", (f1, f2, top)))?;
        notes.push(format!("{name} ok ({} holes)", sets.holes.len()));
    }
    Ok(notes.join(", "))
}

const FACE_TABLE: [(usize, usize, usize, usize); 11] = [
    (11, 48, 0, 48),
    (10, 492, 0, 492),
    (9, 2104, 0, 2104),
    (8, 4898, 2, 4896),
    (7, 6956, 16, 6940),
    (6, 6440, 56, 6384),
    (5, 4064, 112, 3952),
    (4, 1796, 140, 1656),
    (3, 560, 112, 448),
    (2, 120, 56, 64),
    (1, 16, 16, 0),
];

fn criterion_4() -> Outcome {
    let a = fixtures::t2222();
    let started = Instant::now();
    let sg = Semigroup::from_generators(&a).map_err(|e| e.to_string())?;
    let cone = sg.cone();
    check(cone.extreme_rays().len() == 16, format!("{} extreme rays", cone.extreme_rays().len()))?;
    check(cone.ray_generators().iter().all(|g| g.len() == 1), "every column should be its own ray")?;
    check(cone.facet_normals().len() == 48, format!("{} facets", cone.facet_normals().len()))?;
    let poset = enumerate_faces(cone, DEFAULT_FACE_BUDGET).map_err(|e| e.to_string())?;
    let face_time = started.elapsed();
    check(face_time < Duration::from_secs(300), format!("face enumeration took {face_time:?}"))?;

    let basis = hilbert_basis(cone);
    let mut expected: Vec<IntVec> = a.columns();
    expected.push(v(&[1, 1, 1, 1, 1, 1, 1, 1, 1, 0, 0, 0]));
    expected.push(v(&[1, 1, 1, 1, 1, 1, 1, 1, 0, 1, 1, 1]));
    expected.sort();
    check(basis.elements() == &expected[..], format!("Hilbert basis has {} elements", basis.len()))?;

    let report = classify_all(&sg, &poset, &basis);
    for (dim, total, nowhere, almost) in FACE_TABLE {
        let row = &report.per_dim[dim];
        check(
            (row.total, row.nowhere, row.almost) == (total, nowhere, almost),
            format!("dim {dim}: got {:?}", (row.total, row.nowhere, row.almost)),
        )?;
    }
    check(report.minimal_almost.len() == 64, format!("{} minimal almost", report.minimal_almost.len()))?;
    check(
        report.minimal_almost.iter().all(|&id| poset.face(id).dim == 2),
        "minimal almost faces should all be 2-dimensional",
    )?;
    let mut maximal: Vec<Vec<usize>> = report
        .maximal_nowhere
        .iter()
        .map(|&id| poset.face(id).gen_idx.iter().map(|c| c + 1).collect())
        .collect();
    maximal.sort();
    let first = vec![1, 2, 7, 8, 11, 12, 13, 14];
    let complement: Vec<usize> = (1..=16).filter(|c| !first.contains(c)).collect();
    check(
        maximal == vec![first, complement] && report.maximal_nowhere.iter().all(|&id| poset.face(id).dim == 8),
        format!("maximal nowhere faces {maximal:?}"),
    )?;

    let mut tally: HashMap<PairType, usize> = HashMap::new();
    for &id in &report.minimal_almost {
        let g = &poset.face(id).gen_idx;
        let t = pair_type_of_columns(g[0], g[1]).map_err(|e| e.to_string())?;
        *tally.entry(t).or_default() += 1;
    }
    let counts: Vec<usize> = PairType::ALL.iter().map(|t| tally.get(t).copied().unwrap_or(0)).collect();
    check(counts == vec![8, 0, 24, 8, 0, 24, 0], format!("pair types 1a..2d {counts:?}"))?;
    let total = started.elapsed();
    check(total < Duration::from_secs(1800), format!("took {total:?}"))?;
    Ok(format!(
        "16 rays, 48 facets, 18 Hilbert elements, face table dims 1-11, 64 minimal, 2 maximal, types 8/24/8/24 (faces {:.1}s)",
        face_time.as_secs_f64()
    ))
}

fn criterion_5() -> Outcome {
    let mut compared = 0;
    for a in [fixtures::ex21(), fixtures::ex22(), fixtures::ex23()] {
        let s = setup(&a);
        let h0 = s.sg.fundamental_holes(DEFAULT_POINT_BUDGET).map_err(|e| e.to_string())?;
        for f in s.poset.faces() {
            let (direct, _) = classify_face(&s.sg, &s.basis, f);
            check(classify_via_h0(&s.sg, &h0, f) == direct, format!("disagreement on face {:?}", f.ray_set))?;
            compared += 1;
        }
    }

    let s = setup(&fixtures::t2222());
    let volume = box_volume(&s.sg.zonotope_box());
    let targets: Vec<IntVec>;
    let oracle: &str;
    let h0 = s.sg.fundamental_holes(DEFAULT_POINT_BUDGET);
    match &h0 {
        Ok(h) => {
            targets = h.holes.clone();
            oracle = "H0";
        }
        Err(_) => {
            // B \ Q: each is a hole, and fundamental since b - a_i ∉ K
            targets = s
                .basis
                .elements()
                .iter()
                .filter(|b| s.sg.member_q(b).is_none())
                .cloned()
                .collect();
            for b in &targets {
                let fundamental = s
                    .sg
                    .generators()
                    .columns()
                    .iter()
                    .all(|a| !s.sg.cone().contains(&(b - a)));
                check(fundamental, format!("{b} is not a fundamental hole"))?;
            }
            oracle = "B minus Q";
        }
    }
    check(!targets.is_empty(), "t2222 should have holes")?;
    let report = classify_all(&s.sg, &s.poset, &s.basis);
    let mut rng = ChaCha8Rng::seed_from_u64(0x5eed);
    let mut ids: Vec<usize> = (0..s.poset.len()).collect();
    ids.shuffle(&mut rng);
    let sample = &ids[..250];
    for &id in sample {
        let f = s.poset.face(id);
        let (direct, _) = classify_face(&s.sg, &s.basis, f);
        check(classify_via_targets(&s.sg, &targets, f) == direct, format!("t2222 disagreement on {:?}", f.ray_set))?;
        check(report.status[id] == direct, format!("pruned status differs on {:?}", f.ray_set))?;
        compared += 1;
    }
    Ok(format!(
        "{compared} faces agree; t2222 zonotope box {volume} points, oracle {oracle} ({} targets)",
        targets.len()
    ))
}

fn random_cone(rng: &mut ChaCha8Rng) -> Cone {
    loop {
        let n = rng.gen_range(3..=6);
        let cols: Vec<IntVec> = (0..n)
            .map(|_| v(&[rng.gen_range(1..=2), rng.gen_range(-1..=2), rng.gen_range(-1..=2)]))
            .collect();
        if let Ok(c) = Cone::ingest(&IntMat::from_columns(3, &cols)) {
            if c.dim() == 3 && c.transform().is_identity() && c.extreme_rays().len() <= 6 {
                return c;
            }
        }
    }
}

fn random_antichain(rng: &mut ChaCha8Rng, poset: &FacePoset) -> AntichainSpec {
    let mut ids: Vec<usize> = (0..poset.len()).collect();
    ids.shuffle(rng);
    let want = rng.gen_range(1..=3);
    let mut chosen: Vec<usize> = Vec::new();
    for id in ids {
        let f = poset.face(id);
        if chosen
            .iter()
            .all(|&c| !f.is_subface_of(poset.face(c)) && !poset.face(c).is_subface_of(f))
        {
            chosen.push(id);
        }
        if chosen.len() == want {
            break;
        }
    }
    AntichainSpec::new(chosen.iter().map(|&id| poset.face(id).ray_set.clone()).collect())
}

fn round_trip(cone: &Cone, poset: &FacePoset, basis: &HilbertBasis, spec: &AntichainSpec) -> Result<(), String> {
    let out = construct_from_antichain(cone, poset, basis, spec).map_err(|e| e.to_string())?;
    let rep = verify_construction(cone, poset, basis, spec, &out.a_prime, 200_000)
        .map_err(|e| format!("{:?}: {e}", spec.faces))?;
    check(rep.minimal_almost == spec.faces, format!("{:?} gave {:?}", spec.faces, rep.minimal_almost))?;
    check(rep.lattice_index == "1" && rep.cone_equal && rep.outside_nowhere, "lattice, cone and outside checks not all reported")?;
    check(
        rep.certificates.iter().all(|c| c.subset_sums != Some(false) && c.fundamental_holes != Some(false)),
        "certificate failed",
    )
}

fn criterion_6() -> Outcome {
    let cone = Cone::ingest(&fixtures::ex22()).unwrap();
    let poset = enumerate_faces(&cone, DEFAULT_FACE_BUDGET).unwrap();
    let basis = hilbert_basis(&cone);
    let all = all_antichains(&poset);
    check(all.len() == 5, format!("ex22 has {} antichains", all.len()))?;
    for spec in &all {
        round_trip(&cone, &poset, &basis, spec)?;
    }

    let mut rng = ChaCha8Rng::seed_from_u64(2024);
    let mut random = 0;
    let mut cones = 0;
    while cones < 4 {
        let cone = random_cone(&mut rng);
        let poset = enumerate_faces(&cone, DEFAULT_FACE_BUDGET).unwrap();
        let basis = hilbert_basis(&cone);
        let mut seen = BTreeSet::new();
        for _ in 0..12 {
            let spec = random_antichain(&mut rng, &poset);
            if seen.insert(spec.faces.clone()) {
                round_trip(&cone, &poset, &basis, &spec)?;
                random += 1;
            }
        }
        cones += 1;
    }
    check(random >= 20, format!("only {random} random antichains"))?;
    Ok(format!("ex22: 5 antichains; random: {random} antichains on {cones} cones"))
}

/// Decomposition over `B` by exhaustive subtraction, memoized.
fn decomposes(x: &IntVec, basis: &[IntVec], cone: &Cone, memo: &mut HashMap<IntVec, bool>) -> bool {
    if x.is_zero() {
        return true;
    }
    if let Some(&r) = memo.get(x) {
        return r;
    }
    let r = basis.iter().any(|b| {
        let y = x - b;
        cone.contains(&y) && decomposes(&y, basis, cone, memo)
    });
    memo.insert(x.clone(), r);
    r
}

fn criterion_7() -> Outcome {
    let cones = [
        ("ex21", fixtures::ex21()),
        ("ex22", fixtures::ex22()),
        ("ex23", fixtures::ex23()),
        ("square", IntMat::from_rows_i64(&[&[1, 1, 1, 1], &[0, 1, 0, 1], &[0, 0, 1, 1]])),
        ("wedge", IntMat::from_rows_i64(&[&[1, 1, 1], &[0, 3, 0], &[0, 0, 2]])),
        ("tilted", IntMat::from_rows_i64(&[&[1, 1, 2, 1], &[0, 2, 1, -1], &[1, 0, 3, 2]])),
    ];
    let mut checked = 0;
    for (name, a) in cones {
        let sg = Semigroup::from_generators(&a).map_err(|e| e.to_string())?;
        let cone = sg.cone();
        let basis = hilbert_basis(cone);
        let b = basis.elements();
        // no element is reducible by another, nor by any lattice point
        for x in b {
            let by_basis = b.iter().any(|c| c != x && cone.contains(&(x - c)));
            check(!by_basis, format!("{name}: {x} reducible by B"))?;
        }
        let gmax = b.iter().map(|x| sg.grading().dot(x)).max().unwrap();
        let cap = BigInt::from(10).max(gmax);
        let pts = sg.lattice_points(&Window::GradingCap(cap.clone()), DEFAULT_POINT_BUDGET).map_err(|e| e.to_string())?;
        for x in b {
            let reducible = pts.iter().any(|u| !u.is_zero() && u != x && cone.contains(&(x - u)));
            check(!reducible, format!("{name}: {x} is a sum of two lattice points"))?;
        }
        let mut memo = HashMap::new();
        for p in pts.iter().filter(|p| sg.grading().dot(p) <= BigInt::from(10)) {
            check(decomposes(p, b, cone, &mut memo), format!("{name}: {p} does not decompose"))?;
            checked += 1;
        }
    }
    Ok(format!("{checked} lattice points of grading <= 10 decompose; all bases irreducible"))
}

fn criterion_8() -> Outcome {
    let a = fixtures::t2222();
    let opts = ReportOptions {
        pair_types: true,
        ..ReportOptions::default()
    };
    let render = |threads: usize| -> Result<String, String> {
        let pool = rayon::ThreadPoolBuilder::new()
            .num_threads(threads)
            .build()
            .map_err(|e| e.to_string())?;
        pool.install(|| build_report("fixture:t2222", &a, &opts))
            .map(|d| d.to_json())
            .map_err(|e| e.to_string())
    };
    let one = render(1)?;
    let eight = render(8)?;
    check(one == eight, "reports differ between 1 and 8 threads")?;
    Ok(format!("1 and 8 threads give identical {}-byte reports", one.len()))
}

fn main() {
    let criteria: [Criterion; 8] = [
        (1, "feasibility systems of the worked cone", criterion_1, Duration::from_secs(1)),
        (2, "H0 and Hilbert basis of the worked cone", criterion_2, Duration::from_secs(1)),
        (3, "windowed sets and classification of the plane examples", criterion_3, Duration::from_secs(5)),
        (4, "2x2x2x2 tables", criterion_4, Duration::from_secs(1800)),
        (5, "oracle agreement", criterion_5, Duration::from_secs(1800)),
        (6, "construction round trips", criterion_6, Duration::from_secs(120)),
        (7, "Hilbert basis properties", criterion_7, Duration::from_secs(60)),
        (8, "determinism across thread counts", criterion_8, Duration::from_secs(1800)),
    ];
    let mut failed = 0;
    for (n, name, run, limit) in criteria {
        let started = Instant::now();
        let outcome = run();
        let took = started.elapsed();
        let outcome = match outcome {
            Ok(msg) if took > limit => Err(format!("{msg}; took {took:.2?}, limit {limit:?}")),
            other => other,
        };
        match outcome {
            Ok(msg) => println!("criterion {n} PASS  {name}: {msg} [{took:.2?} / {limit:?}]"),
            Err(msg) => {
                failed += 1;
                println!("criterion {n} FAIL  {name}: {msg} [{took:.2?} / {limit:?}]");
            }
        }
    }
    if failed > 0 {
        println!("{failed} criteria failed");
        std::process::exit(1);
    }
    println!("all 8 criteria passed");
}
