//! Sweeps and experiments. Everything here is deterministic given the seeds;
//! parallel runs are canonically reordered before they are returned.

mod entropy;
mod export;

use std::collections::BTreeMap;
use std::sync::OnceLock;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::assembler::{compile_to_single_tape, SingleTapeOptions};
use crate::machine::{Machine, RunStatus};
use crate::problems::{self, CnfFormula, Instance, Problem};
use crate::verifier::{decide_by_extension, solver_fuel, verifier_fuel, EnumOptions, EnumerationOutcome};

pub use crate::verifier::BoundReport;
pub use entropy::{analytic_slope, entropy_experiment, EntropyRecord, EntropyReport, PHASE_RATIO};
pub use export::{
    export_records, import_records, read_entropy_csv, read_records_csv, write_entropy_csv, write_records_csv,
    write_records_json, ExportFormat,
};

#[derive(Debug, thiserror::Error)]
pub enum BenchError {
    #[error("problem {0} has no {1} role")]
    NoSuchRole(Problem, Role),
    #[error("n-values must be sorted ascending")]
    Unsorted,
    #[error("{0}")]
    Params(String),
    #[error(transparent)]
    Encoding(#[from] problems::EncodingError),
    #[error(transparent)]
    Generator(#[from] problems::GeneratorError),
    #[error(transparent)]
    Machine(#[from] crate::machine::MachineError),
    #[error(transparent)]
    Verify(#[from] crate::verifier::VerifyError),
    #[error(transparent)]
    Compile(#[from] crate::assembler::CompileError),
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    Csv(#[from] csv::Error),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Role {
    Verifier,
    NaiveSolver,
    EnumSolver,
    SingleTapeVerifier,
}

impl Role {
    pub const ALL: [Role; 4] = [
        Role::Verifier,
        Role::NaiveSolver,
        Role::EnumSolver,
        Role::SingleTapeVerifier,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Role::Verifier => "verifier",
            Role::NaiveSolver => "naive-solver",
            Role::EnumSolver => "enum-solver",
            Role::SingleTapeVerifier => "single-tape-verifier",
        }
    }

    pub fn parse(s: &str) -> Option<Role> {
        Role::ALL.into_iter().find(|r| r.name() == s)
    }
}

impl std::fmt::Display for Role {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.name())
    }
}

/// Step budget per run, as a function of the input length `L`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FuelPolicy {
    /// Role defaults: [`verifier_fuel`] for verifiers and per enumeration
    /// candidate, [`solver_fuel`] for naive solvers, and
    /// [`single_tape_fuel`] for compiled verifiers.
    Standard,
    /// `k · L`.
    Linear(u64),
    /// `k · L²`.
    Quadratic(u64),
}

impl FuelPolicy {
    pub fn fuel(self, role: Role, input_len: usize, cert_bits: u32) -> u64 {
        let l = input_len.max(1) as u64;
        match self {
            FuelPolicy::Standard => match role {
                Role::Verifier | Role::EnumSolver => verifier_fuel(input_len),
                Role::NaiveSolver => solver_fuel(input_len),
                Role::SingleTapeVerifier => single_tape_fuel(input_len, cert_bits),
            },
            FuelPolicy::Linear(k) => k * l,
            FuelPolicy::Quadratic(k) => k * l * l,
        }
    }
}

/// Budget for a compiled single-tape verifier: the multi-tape budget times
/// a bound on the sweep length.
pub fn single_tape_fuel(input_len: usize, cert_bits: u32) -> u64 {
    verifier_fuel(input_len) * 8 * (input_len as u64 + cert_bits as u64 + 4)
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SweepPlan {
    pub problem: Problem,
    pub roles: Vec<Role>,
    pub n_values: Vec<usize>,
    /// Instances per `(role, n)`.
    pub instances: usize,
    pub seed: u64,
    pub fuel: FuelPolicy,
    pub parallel: bool,
}

impl SweepPlan {
    pub fn new(problem: Problem, roles: Vec<Role>, n_values: Vec<usize>) -> SweepPlan {
        SweepPlan {
            problem,
            roles,
            n_values,
            instances: 5,
            seed: DEFAULT_SEED,
            fuel: FuelPolicy::Standard,
            parallel: false,
        }
    }
}

/// Seed used when none is given.
pub const DEFAULT_SEED: u64 = 20240607;

/// One measured run. For enumeration runs `steps` is the accounted total.
#[derive(Debug, Clone, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
pub struct ExperimentRecord {
    pub problem: Problem,
    pub role: Role,
    pub n: usize,
    pub cert_bits: u32,
    pub instance_id: usize,
    pub seed: u64,
    pub steps: u64,
    pub verdict: RunStatus,
    pub fuel: u64,
}

impl ExperimentRecord {
    fn sort_key(&self) -> (Problem, Role, usize, usize) {
        (self.problem, self.role, self.n, self.instance_id)
    }
}

/// Puts records in export order: `(problem, role, n, instance_id)`.
pub fn canonical_order(records: &mut [ExperimentRecord]) {
    records.sort_by_key(|r| r.sort_key());
}

/// Lower median; 0 for an empty slice.
pub fn median(values: &[u64]) -> u64 {
    if values.is_empty() {
        return 0;
    }
    let mut v = values.to_vec();
    v.sort_unstable();
    v[(v.len() - 1) / 2]
}

/// Seed for instance `i` at size `n`.
pub fn instance_seed(seed: u64, n: usize, i: usize) -> u64 {
    let mut z = seed
        ^ (n as u64).wrapping_mul(0x9E37_79B9_7F4A_7C15)
        ^ (i as u64).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 30)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// A member instance with a certificate from the oracle.
pub fn member_instance(problem: Problem, n: usize, seed: u64) -> Result<(Instance, Vec<bool>), BenchError> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let inst = match problem {
        Problem::Periodic => {
            let divisors: Vec<usize> = (1..=n / 2).filter(|l| n.is_multiple_of(*l)).collect();
            if divisors.is_empty() {
                return Err(BenchError::Params(format!("no periodic strings of length {n}")));
            }
            let l = divisors[rng.gen_range(0..divisors.len())];
            Instance::periodic(&problems::gen_periodic(n, l, rng.gen())?)?
        }
        Problem::Rotation => {
            if n == 0 {
                return Err(BenchError::Params("rotation instances need n >= 1".into()));
            }
            let (a, b) = problems::gen_rotation(n, rng.gen_range(0..n), rng.gen())?;
            Instance::rotation(&a, &b)?
        }
        Problem::Sat3 => {
            let m = (PHASE_RATIO * n as f64).round() as usize;
            loop {
                let f = problems::gen_random_3sat(n, m, rng.gen())?;
                if problems::sat3_oracle(&f).0 {
                    break Instance::sat3(f);
                }
            }
        }
    };
    let cert = inst.witness().expect("generated members have witnesses");
    Ok((inst, cert))
}

/// Instance 0 is the worst case; the rest are random non-members.
pub fn solver_instance(problem: Problem, n: usize, i: usize, seed: u64) -> Result<Instance, BenchError> {
    Ok(match (problem, i) {
        (Problem::Periodic, 0) => Instance::periodic(&problems::gen_worst_aperiodic(n)?)?,
        (Problem::Periodic, _) => Instance::periodic(&problems::gen_random_aperiodic(n, seed)?)?,
        (Problem::Rotation, 0) => {
            let (a, b) = problems::gen_worst_nonrotation(n)?;
            Instance::rotation(&a, &b)?
        }
        (Problem::Rotation, _) => {
            let (a, b) = problems::gen_random_nonrotation(n, seed)?;
            Instance::rotation(&a, &b)?
        }
        (Problem::Sat3, _) => return Err(BenchError::NoSuchRole(problem, Role::NaiveSolver)),
    })
}

/// The single-tape compilation of a problem's verifier, built once.
pub fn single_tape_verifier(problem: Problem) -> Result<&'static Machine, BenchError> {
    static CELLS: [OnceLock<Result<Machine, String>>; 3] =
        [OnceLock::new(), OnceLock::new(), OnceLock::new()];
    let cell = CELLS[problem as usize].get_or_init(|| {
        let spec = problem.verifier().machine.spec();
        compile_to_single_tape(spec, &SingleTapeOptions::default())
            .map_err(|e| e.to_string())
            .and_then(|s| Machine::new(s).map_err(|e| e.to_string()))
    });
    cell.as_ref().map_err(|e| BenchError::Params(e.clone()))
}

fn run_cell(plan: &SweepPlan, role: Role, n: usize, i: usize) -> Result<ExperimentRecord, BenchError> {
    let p = plan.problem;
    let seed = instance_seed(plan.seed, n, i);
    let record = |cert_bits: u32, steps: u64, verdict: RunStatus, fuel: u64| ExperimentRecord {
        problem: p,
        role,
        n,
        cert_bits,
        instance_id: i,
        seed,
        steps,
        verdict,
        fuel,
    };
    match role {
        Role::Verifier | Role::SingleTapeVerifier => {
            let (inst, cert) = member_instance(p, n, seed)?;
            let bits = cert.len() as u32;
            let machine = if role == Role::Verifier {
                &p.verifier().machine
            } else {
                single_tape_verifier(p)?
            };
            let input = inst.symbols(machine)?;
            let fuel = plan.fuel.fuel(role, input.len(), bits);
            let r = machine.run(&input, &cert, fuel)?;
            Ok(record(bits, r.steps, r.status, fuel))
        }
        Role::EnumSolver => {
            let (inst, _) = member_instance(p, n, seed)?;
            let v = p.verifier();
            let input = inst.symbols(&v.machine)?;
            let bits = v.width.bits(n);
            let fuel = plan.fuel.fuel(role, input.len(), bits);
            let out = crate::verifier::decide_by_enumeration(v, &input, n, fuel, &EnumOptions::default())?;
            let verdict = if out.accepted {
                RunStatus::Accepted
            } else {
                RunStatus::Rejected
            };
            Ok(record(bits, out.total_steps, verdict, fuel))
        }
        Role::NaiveSolver => {
            let solver = p.naive_solver().ok_or(BenchError::NoSuchRole(p, role))?;
            let inst = solver_instance(p, n, i, seed)?;
            let input = inst.symbols(&solver.machine)?;
            let fuel = plan.fuel.fuel(role, input.len(), 0);
            let r = solver.run(&input, fuel)?;
            Ok(record(0, r.steps, r.status, fuel))
        }
    }
}

/// Runs every `(role, n, instance)` cell of the plan.
pub fn run_sweep(plan: &SweepPlan) -> Result<Vec<ExperimentRecord>, BenchError> {
    if plan.n_values.windows(2).any(|w| w[0] > w[1]) {
        return Err(BenchError::Unsorted);
    }
    for &role in &plan.roles {
        if role == Role::NaiveSolver && plan.problem.naive_solver().is_none() {
            return Err(BenchError::NoSuchRole(plan.problem, role));
        }
    }
    let cells: Vec<(Role, usize, usize)> = plan
        .roles
        .iter()
        .flat_map(|&r| {
            plan.n_values
                .iter()
                .flat_map(move |&n| (0..plan.instances).map(move |i| (r, n, i)))
        })
        .collect();
    let mut records: Vec<ExperimentRecord> = if plan.parallel {
        cells
            .par_iter()
            .map(|&(r, n, i)| run_cell(plan, r, n, i))
            .collect::<Result<_, _>>()?
    } else {
        cells
            .iter()
            .map(|&(r, n, i)| run_cell(plan, r, n, i))
            .collect::<Result<_, _>>()?
    };
    canonical_order(&mut records);
    Ok(records)
}

#[derive(Debug, Clone, PartialEq, serde::Serialize)]
pub struct RatioRow {
    pub problem: Problem,
    pub role: Role,
    pub n: usize,
    pub median_steps: u64,
    pub next_median_steps: u64,
    /// `median(2n) / median(n)`.
    pub ratio: f64,
}

#[derive(Debug, Clone, Default, PartialEq, serde::Serialize)]
pub struct DoublingReport {
    pub rows: Vec<RatioRow>,
    /// `(problem, role, n)` whose double is missing from the records.
    pub skipped: Vec<(Problem, Role, usize)>,
}

impl DoublingReport {
    pub fn ratios(&self, problem: Problem, role: Role) -> Vec<f64> {
        self.rows
            .iter()
            .filter(|r| r.problem == problem && r.role == role)
            .map(|r| r.ratio)
            .collect()
    }
}

/// Ratios of median steps between each `n` and `2n` per `(problem, role)`.
pub fn doubling_ratios(records: &[ExperimentRecord]) -> DoublingReport {
    let mut groups: BTreeMap<(Problem, Role), BTreeMap<usize, Vec<u64>>> = BTreeMap::new();
    for r in records {
        groups
            .entry((r.problem, r.role))
            .or_default()
            .entry(r.n)
            .or_default()
            .push(r.steps);
    }
    let mut report = DoublingReport::default();
    for ((problem, role), by_n) in groups {
        let sizes: Vec<usize> = by_n.keys().copied().collect();
        for &n in &sizes {
            let Some(next) = by_n.get(&(2 * n)) else {
                if sizes.last() != Some(&n) {
                    report.skipped.push((problem, role, n));
                }
                continue;
            };
            let a = median(&by_n[&n]);
            let b = median(next);
            report.rows.push(RatioRow {
                problem,
                role,
                n,
                median_steps: a,
                next_median_steps: b,
                ratio: b as f64 / a.max(1) as f64,
            });
        }
    }
    report
}

/// `(δ, f0 / 2^δ)` for `δ = 0..=max_delta`, by integer division.
pub fn fig1_table(f0: u64, max_delta: u32) -> Vec<(u32, u64)> {
    (0..=max_delta)
        .map(|d| (d, if d >= 64 { 0 } else { f0 >> d }))
        .collect()
}

/// Bound report between solver and verifier records.
pub fn tradeoff_consistency(
    solver: &[ExperimentRecord],
    verifier: &[ExperimentRecord],
    tolerance: i64,
) -> BoundReport {
    crate::verifier::build_bound_report(solver, verifier, tolerance)
}

#[derive(Debug, Clone, PartialEq, serde::Serialize)]
pub struct BlowupRow {
    /// Missing certificate bits.
    pub missing: u32,
    pub outcome: EnumerationOutcome,
    /// Candidates relative to the previous row.
    pub candidate_ratio: Option<f64>,
    /// Machine steps relative to the previous row.
    pub step_ratio: Option<f64>,
}

/// Runs the 3-SAT verifier with the last `m` certificate bits missing, for
/// each `m` in `missing`. The fixed prefix is all zeros. The formula must be
/// unsatisfiable so every run exhausts its candidates.
pub fn partial_cert_blowup(
    formula: &CnfFormula,
    missing: std::ops::RangeInclusive<u32>,
    fuel: Option<u64>,
    opts: &EnumOptions,
) -> Result<Vec<BlowupRow>, BenchError> {
    if problems::sat3_oracle(formula).0 {
        return Err(BenchError::Params(
            "formula is satisfiable; the blowup experiment needs an unsatisfiable one \
             (try another seed or a higher clause ratio)"
                .into(),
        ));
    }
    let n = formula.num_vars as u32;
    if *missing.end() > n {
        return Err(BenchError::Params(format!(
            "cannot leave {} of {n} bits missing",
            missing.end()
        )));
    }
    let v = Problem::Sat3.verifier();
    let input = Instance::sat3(formula.clone()).symbols(&v.machine)?;
    let fuel = fuel.unwrap_or_else(|| verifier_fuel(input.len()));
    let mut rows: Vec<BlowupRow> = Vec::new();
    for m in missing {
        let prefix = vec![false; (n - m) as usize];
        let outcome = decide_by_extension(v, &input, formula.num_vars, &prefix, m, fuel, opts)?;
        let (candidate_ratio, step_ratio) = match rows.last() {
            Some(prev) => (
                Some(outcome.candidates as f64 / prev.outcome.candidates as f64),
                Some(outcome.machine_steps as f64 / prev.outcome.machine_steps.max(1) as f64),
            ),
            None => (None, None),
        };
        rows.push(BlowupRow {
            missing: m,
            outcome,
            candidate_ratio,
            step_ratio,
        });
    }
    Ok(rows)
}

/// First unsatisfiable formula from `gen_random_3sat(n, m, ·)` over seeds
/// `seed, seed+1, …`.
pub fn find_unsat_formula(n: usize, m: usize, seed: u64) -> Result<(CnfFormula, u64), BenchError> {
    for s in seed..seed + 10_000 {
        let f = problems::gen_random_3sat(n, m, s)?;
        if !problems::sat3_oracle(&f).0 {
            return Ok((f, s));
        }
    }
    Err(BenchError::Params(format!(
        "no unsatisfiable formula with n={n}, m={m} near seed {seed}"
    )))
}
