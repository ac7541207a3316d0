//! End-to-end acceptance run. Prints one PASS/FAIL line per criterion and fails
//! if any criterion fails.

mod common;

use std::f64::consts::PI;
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::process::ExitCode;
use std::time::{Duration, Instant};

use common::*;
use flagdyn_core::engine::order_control_sets;
use flagdyn_core::k_action::iterate_to_attractor;
use flagdyn_core::verify::*;
use flagdyn_core::*;
use rand::{RngExt, SeedableRng};
use rand_chacha::ChaCha8Rng;

const SL3_COUNT: usize = 20_000;
const SL3_DEPTH: usize = 6;
const SL3_SEED: u64 = 0;

type Outcome = std::result::Result<String, String>;

fn check(ok: bool, msg: impl Into<String>) -> std::result::Result<(), String> {
    if ok { Ok(()) } else { Err(msg.into()) }
}

fn report(r: &VerificationReport) -> std::result::Result<(), String> {
    check(r.passed, format!("{}: {:?} vs {:?}, {}", r.theorem_tag, r.lhs, r.rhs, r.details))
}

fn timed<T>(f: impl FnOnce() -> T) -> (T, Duration) {
    let t = Instant::now();
    let v = f();
    (v, t.elapsed())
}

struct Plane {
    proj: Analysis,
    proj_time: Duration,
    k: Analysis,
    k_time: Duration,
    flag: Analysis,
}

struct Space3 {
    k: Analysis,
    flag: Analysis,
    time: Duration,
}

fn plane() -> Plane {
    let (proj, proj_time) = timed(|| sl2_proj(720));
    let (k, k_time) = timed(|| sl2_k(1440));
    let flag = flag_over(&Preset::Slplus2.generators(2).unwrap(), &k, false);
    Plane { proj, proj_time, k, k_time, flag }
}

fn space3() -> Space3 {
    let gens = Preset::Slplus3.generators(3).unwrap();
    let ((k, flag), time) = timed(|| {
        let k = analyze(&gens, sample_space(Space::K, 3, SL3_COUNT, SL3_SEED).unwrap(), SL3_DEPTH);
        let flag = flag_over(&gens, &k, true);
        (k, flag)
    });
    Space3 { k, flag, time }
}

fn criterion1(p: &Plane) -> Outcome {
    let a = &p.proj;
    check(a.records.len() == 2, format!("{} control sets", a.records.len()))?;
    check(invariant_count(&a.records) == 1, "invariant count")?;
    let collar = angle_of_distance(Space::Proj, 2.0 * a.graph.epsilon);
    let inv = a.records.iter().find(|r| r.invariant).unwrap();
    let bad = quarter_arc_violations(&a.graph, inv, 0.0, collar);
    check(bad == 0, format!("{bad} points off the quadrant arc"))?;
    check(p.proj_time < Duration::from_secs(5), format!("took {:?}", p.proj_time))?;
    Ok(format!("2 control sets, 1 invariant quadrant arc, {:.2?}", p.proj_time))
}

fn criterion2(p: &Plane) -> Outcome {
    let a = &p.k;
    check(a.records.len() == 4, format!("{} control sets", a.records.len()))?;
    check(invariant_count(&a.records) == 2, "invariant count")?;
    let collar = angle_of_distance(Space::K, 2.0 * a.graph.epsilon);
    for r in &a.records {
        let arcs = (0..4).filter(|&q| quarter_arc_violations(&a.graph, r, q as f64 * PI / 2.0, collar) == 0).count();
        check(arcs == 1, format!("control set {} is not a quarter arc", r.id))?;
    }
    let d = carrying(&a.records, &u_label(&[0, 1], &[1, 1]));
    let dc = carrying(&a.records, &u_label(&[0, 1], &[-1, -1]));
    let lift = WeylElement::transposition(2, 0, 1).lift();
    let c = SignVector::new(&[-1, -1]).unwrap().as_signed_permutation();
    let d1 = carrying(&a.records, &Label::U(lift.clone()));
    let d1c = carrying(&a.records, &Label::U(lift.compose(&c)));
    let order = order_control_sets(&a.records, &a.graph).map_err(|e| e.to_string())?;
    check(order.contains(&(d1.id, d.id)) && order.contains(&(d1c.id, dc.id)), format!("order {order:?}"))?;
    check(p.k_time < Duration::from_secs(10), format!("took {:?}", p.k_time))?;
    Ok(format!("4 quarter arcs, 2 invariant, order recovered, {:.2?}", p.k_time))
}

fn criterion3(s: &Space3) -> Outcome {
    let (k, f) = (&s.k.records, &s.flag.records);
    check(f.len() == 3 && invariant_count(f) == 1, format!("flag: {} ({} invariant)", f.len(), invariant_count(f)))?;
    check(k.len() == 6 && invariant_count(k) == 2, format!("K: {} ({} invariant)", k.len(), invariant_count(k)))?;
    check(s.time < Duration::from_secs(300), format!("took {:?}", s.time))?;
    Ok(format!("FLAG: 3 (1 invariant); K: 6 (2 invariant), {:.1?}", s.time))
}

fn counting(k: &Analysis, f: &Analysis, n: usize) -> std::result::Result<VerificationReport, String> {
    let ws = compute_ws(&f.records, n).map_err(|e| e.to_string())?;
    let cs = compute_cs(&k.records, &k.graph).map_err(|e| e.to_string())?;
    Ok(verify_counting(&k.records, &f.records, &cs, &ws, n))
}

fn criterion4(p: &Plane, s: &Space3) -> Outcome {
    let plane = counting(&p.k, &p.flag, 2)?;
    report(&plane)?;
    let space = counting(&s.k, &s.flag, 3)?;
    report(&space)?;
    let gens = Preset::FullGroup.generators(2).unwrap();
    let k = analyze(&gens, sample_space(Space::K, 2, 360, 0).unwrap(), 6);
    let f = flag_over(&gens, &k, true);
    let full = counting(&k, &f, 2)?;
    report(&full)?;
    let show = |r: &VerificationReport| format!("{:?} = {:?}", r.lhs, r.rhs);
    Ok(format!("{}; {}; {}", show(&plane), show(&space), show(&full)))
}

fn criterion5(s: &Space3) -> Outcome {
    let cs = compute_cs(&s.k.records, &s.k.graph).map_err(|e| e.to_string())?;
    let expected = vec![SignVector::identity(3), SignVector::new(&[1, -1, -1]).unwrap()];
    let mut got = cs.clone();
    got.sort();
    let mut want = expected.clone();
    want.sort();
    check(got == want, format!("C(S) = {cs:?}"))?;
    Ok(format!("C(S) = {cs:?}"))
}

fn criterion6(p: &Plane, s: &Space3) -> Outcome {
    let gens2 = Preset::Slplus2.generators(2).unwrap();
    let r2 = verify_transitivity_fixed_points(
        &p.k.graph,
        &p.k.records,
        &gens2,
        &FixedPointCheck { trials: 50, seed: 11, converse: true },
    )
    .map_err(|e| e.to_string())?;
    report(&r2)?;
    let gens3 = Preset::Slplus3.generators(3).unwrap();
    check(s.k.records.iter().all(|r| r.labels.len() == 4), "a K control set without 4 types")?;
    let r3 = verify_transitivity_fixed_points(
        &s.k.graph,
        &s.k.records,
        &gens3,
        &FixedPointCheck { trials: 20, seed: 11, converse: false },
    )
    .map_err(|e| e.to_string())?;
    report(&r3)?;
    Ok(format!("plane: {}; space: {}", r2.details, r3.details))
}

fn random_element(rng: &mut ChaCha8Rng, n: usize) -> GroupElement {
    loop {
        let data: Vec<f64> = (0..n * n).map(|_| rng.random_range(-3.0..3.0)).collect();
        let m = Matrix::from_row_slice(n, &data).unwrap();
        if m.det() > 0.05 {
            return GroupElement::normalized(m).unwrap();
        }
    }
}

fn random_regular(rng: &mut ChaCha8Rng, n: usize) -> GroupElement {
    let g = random_element(rng, n);
    let mut logs = vec![0.0; n];
    for i in 1..n {
        logs[i] = logs[i - 1] - rng.random_range(0.4..1.2);
    }
    let mean = logs.iter().sum::<f64>() / n as f64;
    logs.iter_mut().for_each(|l| *l -= mean);
    let d: Vec<f64> = logs.iter().map(|l| l.exp()).collect();
    GroupElement::normalized(&g.matrix().mul_diag(&d) * &g.inverse().unwrap().into_matrix()).unwrap()
}

fn criterion7(p: &Plane, s: &Space3) -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(2024);
    let mut worst = 0.0f64;
    for i in 0..1000 {
        let g = random_element(&mut rng, 2 + i % 3);
        let t = iwasawa_decompose(&g).map_err(|e| e.to_string())?;
        worst = worst.max((&(&t.k * &t.a) * &t.nfac).distance(g.matrix()) / g.matrix().frobenius_norm());
    }
    check(worst <= 1e-10, format!("Iwasawa relative error {worst:e}"))?;

    let mut cocycle = 0.0f64;
    for i in 0..500 {
        let n = 2 + i % 3;
        let (g, h) = (random_element(&mut rng, n), random_element(&mut rng, n));
        let k = PointOnK::new(iwasawa_project(&random_element(&mut rng, n)).unwrap()).unwrap();
        let lhs = act_on_k(&g.compose(&h), &k).unwrap();
        let rhs = act_on_k(&g, &act_on_k(&h, &k).unwrap()).unwrap();
        cocycle = cocycle.max(lhs.distance(&rhs));
    }
    check(cocycle <= 1e-9, format!("cocycle error {cocycle:e}"))?;

    for n in [2, 3] {
        let fact: usize = (1..=n).product();
        for _ in 0..50 {
            let h = random_regular(&mut rng, n);
            let on_k = fixed_points_on_k(&h, REGULARITY_TOL).map_err(|e| e.to_string())?;
            let on_flag = fixed_points_on_flag(&h, REGULARITY_TOL).map_err(|e| e.to_string())?;
            check(on_k.len() == (1 << (n - 1)) * fact && on_flag.len() == fact, "fixed-point count")?;
            let k0 = PointOnK::new(iwasawa_project(&random_element(&mut rng, n)).unwrap()).unwrap();
            let (att, _) = iterate_to_attractor(&h, &k0, 5000, 1e-7).map_err(|e| e.to_string())?;
            check(att.u_label.as_sign_vector().is_some(), "attractor type outside M")?;
        }
    }

    for u in enumerate_mstar(3) {
        report(&verify_nu_decomposition(&u, 100, 5).map_err(|e| e.to_string())?)?;
    }

    let mut mismatch = Vec::new();
    for (k, f) in [(&p.k, &p.flag), (&s.k, &s.flag)] {
        let cov = verify_translation_covariance(&k.records, &k.graph);
        report(&cov)?;
        let proj = verify_projection_cores(&k.graph, &k.records, &f.graph, &f.records).map_err(|e| e.to_string())?;
        report(&proj)?;
        let fib = verify_fiber_unions(&k.graph, &k.records, &f.graph, &f.records).map_err(|e| e.to_string())?;
        report(&fib)?;
        mismatch.push(format!("{:?}/{:?}", cov.lhs, proj.lhs));
    }
    Ok(format!(
        "Iwasawa {worst:.1e}, cocycle {cocycle:.1e}, fixed points and N_u ok, covariance/projection mismatch {}",
        mismatch.join(", ")
    ))
}

fn records_json(gens: &GeneratorSet, space: Space, n: usize, count: usize, depth: usize) -> String {
    let a = analyze(gens, sample_space(space, n, count, 3).unwrap(), depth);
    serde_json::to_string(&a.records).unwrap()
}

fn criterion8() -> Outcome {
    let gens2 = Preset::Slplus2.generators(2).unwrap();
    let gens3 = Preset::Slplus3.generators(3).unwrap();
    let runs = [
        (gens2.clone(), Space::Proj, 2, 720, 8),
        (gens2, Space::K, 2, 1440, 8),
        (gens3, Space::Flag, 3, 3000, 4),
    ];
    for (gens, space, n, count, depth) in runs {
        let (a, b) = (records_json(&gens, space, n, count, depth), records_json(&gens, space, n, count, depth));
        check(a == b, format!("{space} n = {n} records differ between runs"))?;
    }
    Ok("identical records across repeated runs".into())
}

fn run(results: &mut Vec<(usize, bool)>, id: usize, name: &str, f: impl FnOnce() -> Outcome) {
    let outcome = catch_unwind(AssertUnwindSafe(f)).unwrap_or_else(|e| {
        Err(e.downcast_ref::<String>().cloned().or_else(|| e.downcast_ref::<&str>().map(|s| s.to_string())).unwrap_or_default())
    });
    let (passed, msg) = match outcome {
        Ok(m) => (true, m),
        Err(m) => (false, m),
    };
    println!("{} criterion {id} ({name}): {msg}", if passed { "PASS" } else { "FAIL" });
    results.push((id, passed));
}

fn main() -> ExitCode {
    // Runs without the test harness so the verdicts are always printed. A name
    // filter that excludes this target skips it, as the harness would.
    let args: Vec<String> = std::env::args().skip(1).collect();
    if args.iter().any(|a| a == "--list") {
        println!("acceptance: test");
        return ExitCode::SUCCESS;
    }
    if args.iter().any(|a| !a.starts_with('-') && !"acceptance".contains(a.as_str())) {
        return ExitCode::SUCCESS;
    }
    let p = plane();
    let s = space3();
    let mut results = Vec::new();
    run(&mut results, 1, "projective line", || criterion1(&p));
    run(&mut results, 2, "circle", || criterion2(&p));
    run(&mut results, 3, "SL(3) counts", || criterion3(&s));
    run(&mut results, 4, "counting", || criterion4(&p, &s));
    run(&mut results, 5, "C(S)", || criterion5(&s));
    run(&mut results, 6, "fixed points", || criterion6(&p, &s));
    run(&mut results, 7, "properties", || criterion7(&p, &s));
    run(&mut results, 8, "determinism", criterion8);
    let failed: Vec<usize> = results.iter().filter(|r| !r.1).map(|r| r.0).collect();
    if failed.is_empty() {
        println!("all {} acceptance criteria passed", results.len());
        ExitCode::SUCCESS
    } else {
        println!("failed criteria: {failed:?}");
        ExitCode::FAILURE
    }
}
