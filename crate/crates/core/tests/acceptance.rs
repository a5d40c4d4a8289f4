//! Acceptance suite. Prints one PASS/FAIL line per criterion and exits
//! non-zero if any fails.

use std::panic::{catch_unwind, AssertUnwindSafe};
use std::sync::OnceLock;
use std::time::{Duration, Instant};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use certlab::bench::{
    doubling_ratios, entropy_experiment, fig1_table, find_unsat_formula, instance_seed, member_instance,
    partial_cert_blowup, run_sweep, single_tape_fuel, single_tape_verifier, tradeoff_consistency,
    write_records_csv, ExperimentRecord, Role, SweepPlan, DEFAULT_SEED, PHASE_RATIO,
};
use certlab::machine::RunStatus;
use certlab::problems::{gen_random_3sat, periodic_oracle, rotation_oracle, sat3_oracle, Instance, Problem};
use certlab::verifier::{
    decide_by_enumeration, log_width, to_bits, verifier_fuel, EnumOptions, EnumerationOutcome,
};

type Check = fn() -> Result<String, String>;

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn ab_string(bits: u32, n: usize) -> String {
    (0..n)
        .map(|i| if bits >> (n - 1 - i) & 1 == 1 { 'b' } else { 'a' })
        .collect()
}

fn enumerate(inst: &Instance) -> (EnumerationOutcome, u64) {
    let v = inst.problem.verifier();
    let input = inst.symbols(&v.machine).unwrap();
    let fuel = verifier_fuel(input.len());
    let out = decide_by_enumeration(v, &input, inst.n, fuel, &EnumOptions::default()).unwrap();
    (out, fuel)
}

fn fig1() -> Result<String, String> {
    let rows = fig1_table(1024, 10);
    let got: Vec<u64> = rows[1..].iter().map(|r| r.1).collect();
    ensure(got == [512, 256, 128, 64, 32, 16, 8, 4, 2, 1], || {
        format!("got {got:?}")
    })?;
    ensure(rows.iter().enumerate().all(|(i, r)| r.0 == i as u32), || {
        "bad δ column".into()
    })?;
    Ok("g = 512..1 for δ = 1..10".into())
}

fn oracle_equivalence() -> Result<String, String> {
    let mut periodic = 0;
    for n in 1..=14usize {
        for bits in 0..1u32 << n {
            let x = ab_string(bits, n);
            let (out, _) = enumerate(&Instance::periodic(&x).unwrap());
            ensure(out.accepted == periodic_oracle(&x).0, || {
                format!("PERIODIC disagrees on {x}")
            })?;
            periodic += 1;
        }
    }
    let mut rotation = 0;
    for n in 0..=8usize {
        for ab in 0..1u32 << (2 * n) {
            let (a, b) = (ab_string(ab >> n, n), ab_string(ab & ((1 << n) - 1), n));
            let (out, _) = enumerate(&Instance::rotation(&a, &b).unwrap());
            ensure(out.accepted == rotation_oracle(&a, &b).0, || {
                format!("ROTATION disagrees on ({a:?}, {b:?})")
            })?;
            rotation += 1;
        }
    }
    let mut sat = 0;
    for i in 0..200usize {
        let n = 3 + i % 10;
        let m = (PHASE_RATIO * n as f64).round() as usize;
        let f = gen_random_3sat(n, m, instance_seed(DEFAULT_SEED, n, i)).unwrap();
        let (out, _) = enumerate(&Instance::sat3(f.clone()));
        ensure(out.accepted == sat3_oracle(&f).0, || {
            format!("3-SAT disagrees on instance {i}")
        })?;
        if let Some(w) = &out.witness {
            ensure(f.satisfied_by(w), || {
                format!("3-SAT witness {i} does not satisfy")
            })?;
        }
        sat += 1;
    }
    ensure(periodic == 32_766, || format!("{periodic} PERIODIC strings"))?;
    Ok(format!(
        "{periodic} PERIODIC, {rotation} ROTATION, {sat} 3-SAT instances agree"
    ))
}

fn string_sweeps() -> &'static Vec<ExperimentRecord> {
    static RECORDS: OnceLock<Vec<ExperimentRecord>> = OnceLock::new();
    RECORDS.get_or_init(|| {
        let mut all = Vec::new();
        for p in [Problem::Periodic, Problem::Rotation] {
            let mut plan = SweepPlan::new(
                p,
                vec![Role::Verifier, Role::NaiveSolver],
                vec![256, 512, 1024, 2048, 4096],
            );
            plan.instances = 5;
            plan.parallel = true;
            all.extend(run_sweep(&plan).unwrap());
        }
        all
    })
}

fn asymptotic_gap() -> Result<String, String> {
    let recs = string_sweeps();
    let rep = doubling_ratios(recs);
    let mut parts = Vec::new();
    for p in [Problem::Periodic, Problem::Rotation] {
        let v = rep.ratios(p, Role::Verifier);
        let s = rep.ratios(p, Role::NaiveSolver);
        ensure(v.len() == 4 && s.len() == 4, || {
            format!("{p}: missing doubling pairs")
        })?;
        ensure(v.iter().all(|&r| r <= 2.7), || {
            format!("{p} verifier ratios {v:.3?}")
        })?;
        ensure(s.iter().all(|&r| (3.4..=4.6).contains(&r)), || {
            format!("{p} solver ratios {s:.3?}")
        })?;
        parts.push(format!(
            "{p}: verifier max {:.2}, solver {:.2}..{:.2}",
            v.iter().cloned().fold(0.0, f64::max),
            s.iter().cloned().fold(f64::MAX, f64::min),
            s.iter().cloned().fold(0.0, f64::max)
        ));
    }
    ensure(
        recs.iter().all(|r| match r.role {
            Role::Verifier => r.verdict == RunStatus::Accepted,
            _ => r.verdict == RunStatus::Rejected,
        }),
        || "unexpected verdicts".into(),
    )?;
    Ok(parts.join("; "))
}

fn tradeoff() -> Result<String, String> {
    let recs = string_sweeps();
    let mut parts = Vec::new();
    for p in [Problem::Periodic, Problem::Rotation] {
        let pick = |role| -> Vec<ExperimentRecord> {
            recs.iter()
                .filter(|r| r.problem == p && r.role == role)
                .cloned()
                .collect()
        };
        let rep = tradeoff_consistency(&pick(Role::NaiveSolver), &pick(Role::Verifier), 2);
        ensure(
            rep.pass && rep.unmatched.is_empty() && rep.rows.len() == 5,
            || format!("{p}: {rep:?}"),
        )?;
        for row in &rep.rows {
            ensure(row.delta_bits == log_width(row.n) as i64, || {
                format!("{p}: bits at n={}", row.n)
            })?;
        }
        let min = rep.rows.iter().map(|r| r.slack).min().unwrap();
        parts.push(format!("{p}: min slack {min}"));
    }
    Ok(parts.join("; "))
}

fn accounting() -> Result<String, String> {
    let mut runs = 0u64;
    let mut check = |out: &EnumerationOutcome, fuel: u64, what: &str| -> Result<(), String> {
        runs += 1;
        ensure(out.accounting_holds(fuel), || format!("{what}: {out:?}"))?;
        if !out.accepted {
            ensure(out.candidates == 1 << out.bits, || {
                format!("{what}: not exhaustive")
            })?;
        }
        Ok(())
    };
    for n in 1..=10usize {
        for bits in 0..1u32 << n {
            let inst = Instance::periodic(&ab_string(bits, n)).unwrap();
            let (out, fuel) = enumerate(&inst);
            check(&out, fuel, &inst.input)?;
        }
    }
    for n in 1..=5usize {
        for ab in 0..1u32 << (2 * n) {
            let inst =
                Instance::rotation(&ab_string(ab >> n, n), &ab_string(ab & ((1 << n) - 1), n)).unwrap();
            let (out, fuel) = enumerate(&inst);
            check(&out, fuel, &inst.input)?;
        }
    }
    let mut starved = 0;
    for i in 0..40usize {
        let n = 3 + i % 8;
        let f = gen_random_3sat(n, (PHASE_RATIO * n as f64).round() as usize, i as u64).unwrap();
        let inst = Instance::sat3(f);
        let (out, fuel) = enumerate(&inst);
        check(&out, fuel, "3-SAT")?;
        let v = Problem::Sat3.verifier();
        let input = inst.symbols(&v.machine).unwrap();
        for fuel in [1, 7, 50] {
            let out = decide_by_enumeration(v, &input, n, fuel, &EnumOptions::default()).unwrap();
            starved += out.fuel_exhausted;
            check(&out, fuel, "3-SAT, small fuel")?;
            ensure(!out.accepted, || "accepted without enough fuel".into())?;
        }
    }
    ensure(starved > 0, || "no run exhausted its fuel".into())?;
    Ok(format!("{runs} enumeration runs balance"))
}

fn halving_law() -> Result<String, String> {
    let (f, seed) = find_unsat_formula(16, (PHASE_RATIO * 16.0).round() as usize, DEFAULT_SEED)
        .map_err(|e| e.to_string())?;
    ensure(!sat3_oracle(&f).0, || "formula is satisfiable".into())?;
    let rows = partial_cert_blowup(&f, 0..=10, None, &EnumOptions::default()).map_err(|e| e.to_string())?;
    let mut worst: f64 = 0.0;
    for r in &rows {
        ensure(!r.outcome.accepted, || format!("accepted at m={}", r.missing))?;
        ensure(r.outcome.candidates == 1 << r.missing, || {
            format!("candidates at m={}", r.missing)
        })?;
        if r.missing >= 1 {
            ensure(r.candidate_ratio == Some(2.0), || {
                format!("candidate ratio at m={}", r.missing)
            })?;
        }
        if r.missing >= 2 {
            let s = r.step_ratio.unwrap();
            ensure((1.95..=2.05).contains(&s), || {
                format!("step ratio {s} at m={}", r.missing)
            })?;
            worst = worst.max((s - 2.0).abs());
        }
    }
    Ok(format!("formula seed {seed}; step ratios within 2 ± {worst:.4}"))
}

fn entropy() -> Result<String, String> {
    let rep = entropy_experiment(&[12, 14, 16, 18, 20], 200, DEFAULT_SEED).map_err(|e| e.to_string())?;
    let slope = rep.slope.ok_or("no slope")?;
    ensure((0.12..=0.24).contains(&slope), || format!("slope {slope:.4}"))?;
    for r in &rep.records {
        let q = r.mean_count / r.analytic_mean;
        ensure((1.0 / 3.0..=3.0).contains(&q), || {
            format!(
                "n={}: mean {:.3} vs analytic {:.3}",
                r.n, r.mean_count, r.analytic_mean
            )
        })?;
    }
    Ok(format!("slope {slope:.4}"))
}

fn single_tape() -> Result<String, String> {
    let multi = &Problem::Periodic.verifier().machine;
    let single = single_tape_verifier(Problem::Periodic).map_err(|e| e.to_string())?;
    let mut rng = ChaCha8Rng::seed_from_u64(DEFAULT_SEED);
    let mut accepted = 0;
    for i in 0..500 {
        let n = rng.gen_range(1..=256usize);
        let (inst, cert) = if i % 2 == 0 && n >= 2 {
            member_instance(Problem::Periodic, n, rng.gen()).map_err(|e| e.to_string())?
        } else {
            let x: String = (0..n).map(|_| if rng.gen() { 'a' } else { 'b' }).collect();
            let cert = to_bits(rng.gen_range(0..=n as u64), log_width(n));
            (Instance::periodic(&x).unwrap(), cert)
        };
        let a = multi
            .run(&inst.symbols(multi).unwrap(), &cert, verifier_fuel(n))
            .unwrap();
        let b = single
            .run(
                &inst.symbols(single).unwrap(),
                &cert,
                single_tape_fuel(n, cert.len() as u32),
            )
            .unwrap();
        ensure(
            a.status != RunStatus::FuelExhausted && a.status == b.status,
            || format!("{} with {cert:?}: {:?} vs {:?}", inst.input, a.status, b.status),
        )?;
        accepted += a.status.is_accept() as usize;
    }
    let mut plan = SweepPlan::new(
        Problem::Periodic,
        vec![Role::Verifier, Role::SingleTapeVerifier],
        vec![64, 128, 256, 512],
    );
    plan.instances = 5;
    let rep = doubling_ratios(&run_sweep(&plan).map_err(|e| e.to_string())?);
    let m = rep.ratios(Problem::Periodic, Role::Verifier);
    let s = rep.ratios(Problem::Periodic, Role::SingleTapeVerifier);
    ensure(m.len() == 3 && m.iter().all(|&r| r <= 2.7), || {
        format!("multi-tape ratios {m:.3?}")
    })?;
    ensure(s.len() == 3 && s.iter().all(|&r| r >= 3.2), || {
        format!("single-tape ratios {s:.3?}")
    })?;
    Ok(format!(
        "500 instances agree ({accepted} accepted); ratios multi {m:.2?}, single {s:.2?}"
    ))
}

fn determinism() -> Result<String, String> {
    let csv_of = |problem: Problem, roles: Vec<Role>, n: Vec<usize>, parallel: bool| {
        let mut plan = SweepPlan::new(problem, roles, n);
        plan.instances = 3;
        plan.seed = 99;
        plan.parallel = parallel;
        let mut buf = Vec::new();
        write_records_csv(&run_sweep(&plan).unwrap(), &mut buf).unwrap();
        buf
    };
    let pool = rayon::ThreadPoolBuilder::new().num_threads(4).build().unwrap();
    let mut total = 0;
    let plans: [(Problem, Vec<Role>, Vec<usize>); 3] = [
        (Problem::Periodic, Role::ALL.to_vec(), vec![8, 16, 32]),
        (
            Problem::Rotation,
            vec![Role::Verifier, Role::NaiveSolver, Role::EnumSolver],
            vec![8, 16, 32],
        ),
        (
            Problem::Sat3,
            vec![Role::Verifier, Role::EnumSolver],
            vec![6, 8, 10],
        ),
    ];
    for (p, roles, n) in plans {
        let first = csv_of(p, roles.clone(), n.clone(), false);
        let again = csv_of(p, roles.clone(), n.clone(), false);
        let par = pool.install(|| csv_of(p, roles.clone(), n.clone(), true));
        ensure(first == again, || format!("{p}: repeated sweep differs"))?;
        ensure(first == par, || format!("{p}: parallel sweep differs"))?;
        total += first.len();
    }
    Ok(format!(
        "{total} CSV bytes identical across repeated and parallel runs"
    ))
}

fn main() {
    let criteria: [(u32, &str, Duration, Check); 9] = [
        (1, "fig1 exact reproduction", Duration::from_secs(1), fig1),
        (
            2,
            "oracle equivalence",
            Duration::from_secs(300),
            oracle_equivalence,
        ),
        (3, "asymptotic gap", Duration::from_secs(600), asymptotic_gap),
        (4, "trade-off consistency", Duration::from_secs(600), tradeoff),
        (5, "enumeration accounting", Duration::from_secs(600), accounting),
        (6, "halving law", Duration::from_secs(120), halving_law),
        (7, "entropy slope", Duration::from_secs(600), entropy),
        (8, "single-tape overhead", Duration::from_secs(600), single_tape),
        (9, "determinism", Duration::from_secs(600), determinism),
    ];
    let mut failed = 0;
    for (id, name, limit, check) in criteria {
        let t = Instant::now();
        let result = catch_unwind(AssertUnwindSafe(check))
            .unwrap_or_else(|e| {
                let msg = e
                    .downcast_ref::<String>()
                    .cloned()
                    .or_else(|| e.downcast_ref::<&str>().map(|s| s.to_string()))
                    .unwrap_or_default();
                Err(format!("panicked: {msg}"))
            })
            .and_then(|detail| {
                let took = t.elapsed();
                if took > limit {
                    Err(format!("{detail}; took {took:.1?}, limit {limit:?}"))
                } else {
                    Ok(detail)
                }
            });
        let took = t.elapsed();
        match result {
            Ok(detail) => println!("PASS  {id} {name}: {detail} ({took:.2?})"),
            Err(why) => {
                failed += 1;
                println!("FAIL  {id} {name}: {why} ({took:.2?})");
            }
        }
    }
    if failed > 0 {
        println!("{failed} of 9 criteria failed");
        std::process::exit(1);
    }
    println!("all 9 criteria passed");
}
