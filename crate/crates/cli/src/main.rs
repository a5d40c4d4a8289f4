mod range;
mod render;

use std::fmt::Write as _;
use std::fs;
use std::io::Write as _;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand};

use certlab::assembler::{
    assemble, compile_to_single_tape, parse_tmir, SingleTapeOptions, DEFAULT_ALPHABET_CAP,
};
use certlab::bench::{
    doubling_ratios, entropy_experiment, export_records, fig1_table, import_records, partial_cert_blowup,
    run_sweep, tradeoff_consistency, write_entropy_csv, ExperimentRecord, Role, SweepPlan, DEFAULT_SEED,
};
use certlab::machine::{parse_bits, parse_tm, write_tm, Machine};
use certlab::problems::{shipped_program, CnfFormula, Problem, SHIPPED_PROGRAMS};
use certlab::verifier::{EnumOptions, DEFAULT_ENUMERATION_CAP};

use range::{parse_bits_range, parse_sizes};

// aliases keep clap from reading these as repeated flags
type Sizes = Vec<usize>;
type BitCounts = Vec<u32>;

/// Step-count experiments on certificate-bounded Turing machines.
#[derive(Parser)]
#[command(name = "certlab", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run a machine (.tm, or .tmir which is assembled first) on one input.
    Run {
        #[arg(long)]
        machine: PathBuf,
        #[arg(long, default_value = "")]
        input: String,
        /// Certificate bits, e.g. `10`.
        #[arg(long, default_value = "")]
        cert: String,
        #[arg(long)]
        fuel: u64,
        /// Print the first LIMIT configurations.
        #[arg(long, value_name = "LIMIT")]
        trace: Option<usize>,
    },
    /// Sweep one solver role and print median steps per n.
    Solve {
        #[command(flatten)]
        sweep: SweepArgs,
        #[arg(long, default_value = "naive", value_parser = ["naive", "enum"])]
        role: String,
        /// Also write the records (CSV, or JSON for a .json path).
        #[arg(long)]
        csv: Option<PathBuf>,
    },
    /// Sweep several roles, write the records and print doubling ratios.
    Bench {
        #[command(flatten)]
        sweep: SweepArgs,
        /// Comma-separated roles; defaults to every role the problem has.
        #[arg(long, value_delimiter = ',', value_parser = parse_role)]
        roles: Vec<Role>,
        #[arg(long)]
        csv: PathBuf,
    },
    /// Compare measured speedup with the certificate bits paid for it.
    CheckBound {
        #[arg(long)]
        solver_csv: PathBuf,
        #[arg(long)]
        verifier_csv: PathBuf,
        #[arg(long, default_value_t = 2, allow_negative_numbers = true)]
        tolerance_bits: i64,
        #[arg(long, default_value = "naive-solver", value_parser = parse_role)]
        solver_role: Role,
        #[arg(long, default_value = "verifier", value_parser = parse_role)]
        verifier_role: Role,
    },
    /// Steps left after trading delta certificate bits, f0 / 2^delta.
    Fig1 {
        #[arg(long, default_value_t = 1024)]
        f0: u64,
        #[arg(long, default_value_t = 10)]
        max_delta: u32,
        #[arg(long)]
        csv: Option<PathBuf>,
    },
    /// Enumerate the missing suffix of a 3-SAT certificate on an
    /// unsatisfiable formula.
    Blowup {
        /// DIMACS file.
        #[arg(long)]
        cnf: PathBuf,
        /// Missing bit counts, e.g. `0..12`.
        #[arg(long, value_parser = parse_bits_range)]
        missing: BitCounts,
        /// Fuel per candidate; defaults to the verifier policy.
        #[arg(long)]
        fuel: Option<u64>,
        #[arg(long, default_value_t = DEFAULT_ENUMERATION_CAP)]
        cap: u32,
        #[command(flatten)]
        jobs: Jobs,
    },
    /// Model counts of random 3-SAT at the threshold ratio.
    Entropy {
        #[arg(long, value_parser = parse_sizes)]
        n: Sizes,
        #[arg(long)]
        samples: usize,
        #[arg(long, default_value_t = DEFAULT_SEED)]
        seed: u64,
        #[arg(long)]
        csv: Option<PathBuf>,
        #[command(flatten)]
        jobs: Jobs,
    },
    /// Compile a multi-tape machine to one tape.
    #[command(name = "compile-1tape")]
    Compile1Tape {
        #[arg(long)]
        machine: PathBuf,
        #[arg(long)]
        out: PathBuf,
        #[arg(long, default_value_t = DEFAULT_ALPHABET_CAP)]
        alphabet_cap: u64,
    },
    /// Assemble a .tmir program, or a shipped one by name, into a .tm file.
    Assemble {
        #[arg(long, conflicts_with = "shipped", required_unless_present = "shipped")]
        program: Option<PathBuf>,
        /// One of the programs built into the library, e.g. `periodic_verifier`.
        #[arg(long)]
        shipped: Option<String>,
        #[arg(long)]
        out: PathBuf,
    },
}

#[derive(Args)]
struct SweepArgs {
    #[arg(long, value_parser = parse_problem)]
    problem: Problem,
    /// Sizes, e.g. `64..1024:x2`.
    #[arg(long, value_parser = parse_sizes)]
    n: Sizes,
    #[arg(long, default_value_t = 5)]
    instances: usize,
    #[arg(long, default_value_t = DEFAULT_SEED)]
    seed: u64,
    #[command(flatten)]
    jobs: Jobs,
}

#[derive(Args)]
struct Jobs {
    /// Worker threads; 0 uses every core. Output does not depend on it.
    #[arg(long, default_value_t = 1)]
    jobs: usize,
}

impl Jobs {
    fn install(&self) -> Result<bool> {
        if self.jobs != 1 {
            rayon::ThreadPoolBuilder::new()
                .num_threads(self.jobs)
                .build_global()
                .context("cannot start worker threads")?;
        }
        Ok(self.jobs != 1)
    }
}

fn parse_problem(s: &str) -> Result<Problem, String> {
    Problem::parse(s).ok_or_else(|| {
        let names: Vec<&str> = Problem::ALL.iter().map(|p| p.name()).collect();
        format!("unknown problem {s:?}; expected one of {}", names.join(", "))
    })
}

fn parse_role(s: &str) -> Result<Role, String> {
    Role::parse(s).ok_or_else(|| {
        let names: Vec<&str> = Role::ALL.iter().map(|r| r.name()).collect();
        format!("unknown role {s:?}; expected one of {}", names.join(", "))
    })
}

enum Verdict {
    Pass,
    Fail,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let mut out = String::new();
    let verdict = dispatch(cli.command, &mut out);
    // a closed pipe, as with `| head`, is not an error
    let _ = std::io::stdout().lock().write_all(out.as_bytes());
    match verdict {
        Ok(Verdict::Pass) => ExitCode::SUCCESS,
        Ok(Verdict::Fail) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}

fn load_machine(path: &Path) -> Result<Machine> {
    let text = fs::read_to_string(path).with_context(|| format!("cannot read {}", path.display()))?;
    let spec = if path.extension().is_some_and(|e| e == "tmir") {
        let p = parse_tmir(&text).with_context(|| format!("{}", path.display()))?;
        assemble(&p).with_context(|| format!("{}", path.display()))?.spec
    } else {
        parse_tm(&text).with_context(|| format!("{}", path.display()))?
    };
    Ok(Machine::new(spec)?)
}

fn sweep(args: &SweepArgs, roles: Vec<Role>) -> Result<Vec<ExperimentRecord>> {
    let mut plan = SweepPlan::new(args.problem, roles, args.n.clone());
    plan.instances = args.instances;
    plan.seed = args.seed;
    plan.parallel = args.jobs.install()?;
    Ok(run_sweep(&plan)?)
}

fn dispatch(command: Command, out: &mut String) -> Result<Verdict> {
    match command {
        Command::Run {
            machine,
            input,
            cert,
            fuel,
            trace,
        } => {
            let m = load_machine(&machine)?;
            let symbols = m.encode_input(&input)?;
            let bits = parse_bits(&cert)?;
            if let Some(limit) = trace {
                for c in m.trace(&symbols, &bits, fuel, limit)? {
                    let _ = writeln!(out, "{}", render::configuration(m.spec(), &c));
                }
            }
            let r = m.run(&symbols, &bits, fuel)?;
            let _ = writeln!(out, "{}", r.status);
            let _ = writeln!(out, "steps: {}", r.steps);
            let _ = writeln!(out, "final state: {}", m.spec().state_name(r.final_state));
        }
        Command::Solve {
            sweep: args,
            role,
            csv,
        } => {
            let role = if role == "enum" {
                Role::EnumSolver
            } else {
                Role::NaiveSolver
            };
            let records = sweep(&args, vec![role])?;
            let _ = writeln!(
                out,
                "# problem={} role={role} instances={} seed={}",
                args.problem, args.instances, args.seed
            );
            out.push_str(&render::medians(&records));
            if let Some(path) = csv {
                export_records(&records, &path)?;
            }
        }
        Command::Bench {
            sweep: args,
            roles,
            csv,
        } => {
            let roles = if roles.is_empty() {
                Role::ALL
                    .into_iter()
                    .filter(|&r| !(r == Role::NaiveSolver && args.problem.naive_solver().is_none()))
                    .collect()
            } else {
                roles
            };
            let names: Vec<&str> = roles.iter().map(|r| r.name()).collect();
            let records = sweep(&args, roles.clone())?;
            export_records(&records, &csv)?;
            let _ = writeln!(
                out,
                "# problem={} roles={} instances={} seed={}",
                args.problem,
                names.join(","),
                args.instances,
                args.seed
            );
            out.push_str(&render::medians(&records));
            out.push('\n');
            out.push_str(&render::ratios(&doubling_ratios(&records)));
        }
        Command::CheckBound {
            solver_csv,
            verifier_csv,
            tolerance_bits,
            solver_role,
            verifier_role,
        } => {
            let solver = import_records(&solver_csv)
                .with_context(|| format!("cannot read {}", solver_csv.display()))?;
            let verifier = import_records(&verifier_csv)
                .with_context(|| format!("cannot read {}", verifier_csv.display()))?;
            let mut pass = true;
            let mut any = false;
            for p in Problem::ALL {
                let s: Vec<_> = solver
                    .iter()
                    .filter(|r| r.problem == p && r.role == solver_role)
                    .cloned()
                    .collect();
                let v: Vec<_> = verifier
                    .iter()
                    .filter(|r| r.problem == p && r.role == verifier_role)
                    .cloned()
                    .collect();
                if s.is_empty() || v.is_empty() {
                    continue;
                }
                any = true;
                let report = tradeoff_consistency(&s, &v, tolerance_bits);
                let _ =
                    writeln!(out,
                    "# problem={p} solver={solver_role} verifier={verifier_role} tolerance={tolerance_bits}"
                );
                out.push_str(&render::bound(&report));
                pass &= report.pass && !report.rows.is_empty();
            }
            if !any {
                bail!("no problem has both {solver_role} and {verifier_role} records");
            }
            let _ = writeln!(out, "{}", if pass { "PASS" } else { "FAIL" });
            if !pass {
                return Ok(Verdict::Fail);
            }
        }
        Command::Fig1 { f0, max_delta, csv } => {
            let rows = fig1_table(f0, max_delta);
            let _ = writeln!(out, "# f0={f0}");
            let _ = writeln!(out, "{:>5} {:>12}", "delta", "g_steps");
            let mut table = String::from("delta,g_steps\n");
            for (d, g) in &rows {
                let _ = writeln!(out, "{d:>5} {g:>12}");
                let _ = writeln!(table, "{d},{g}");
            }
            if let Some(path) = csv {
                fs::write(&path, table).with_context(|| format!("cannot write {}", path.display()))?;
            }
        }
        Command::Blowup {
            cnf,
            missing,
            fuel,
            cap,
            jobs,
        } => {
            let text = fs::read_to_string(&cnf).with_context(|| format!("cannot read {}", cnf.display()))?;
            let f = CnfFormula::from_dimacs(&text)?;
            let (lo, hi) = (missing[0], missing[missing.len() - 1]);
            if missing.windows(2).any(|w| w[1] != w[0] + 1) {
                bail!("--missing must be a contiguous range");
            }
            let opts = EnumOptions {
                cap,
                parallel: jobs.install()?,
            };
            let rows = partial_cert_blowup(&f, lo..=hi, fuel, &opts)?;
            let _ = writeln!(
                out,
                "# cnf={} n={} m={}",
                cnf.display(),
                f.num_vars,
                f.clauses.len()
            );
            out.push_str(&render::blowup(&rows));
        }
        Command::Entropy {
            n,
            samples,
            seed,
            csv,
            jobs,
        } => {
            jobs.install()?;
            let report = entropy_experiment(&n, samples, seed)?;
            for x in &report.excluded {
                eprintln!("warning: every sample at n={x} was unsatisfiable; left out of the fit");
            }
            let _ = writeln!(out, "# samples={samples} seed={seed}");
            out.push_str(&render::entropy(&report));
            if let Some(path) = csv {
                let f =
                    fs::File::create(&path).with_context(|| format!("cannot write {}", path.display()))?;
                write_entropy_csv(&report.records, std::io::BufWriter::new(f))?;
            }
        }
        Command::Compile1Tape {
            machine,
            out: path,
            alphabet_cap,
        } => {
            let m = load_machine(&machine)?;
            let spec = compile_to_single_tape(m.spec(), &SingleTapeOptions { alphabet_cap })?;
            fs::write(&path, write_tm(&spec)).with_context(|| format!("cannot write {}", path.display()))?;
            let _ = writeln!(
                out,
                "{}: {} states, {} symbols, {} rules",
                spec.name,
                spec.states.len(),
                spec.alphabet.len(),
                spec.rules.len()
            );
        }
        Command::Assemble {
            program,
            shipped,
            out: path,
        } => {
            let ir = match (program, shipped) {
                (Some(src), _) => {
                    let text =
                        fs::read_to_string(&src).with_context(|| format!("cannot read {}", src.display()))?;
                    parse_tmir(&text).with_context(|| format!("{}", src.display()))?
                }
                (None, Some(name)) => match SHIPPED_PROGRAMS.iter().find(|(n, _)| *n == name) {
                    Some((_, src)) => shipped_program(src),
                    None => {
                        let names: Vec<&str> = SHIPPED_PROGRAMS.iter().map(|(n, _)| *n).collect();
                        bail!(
                            "no shipped program {name:?}; expected one of {}",
                            names.join(", ")
                        );
                    }
                },
                (None, None) => bail!("one of --program or --shipped is required"),
            };
            let spec = assemble(&ir)?.spec;
            fs::write(&path, write_tm(&spec)).with_context(|| format!("cannot write {}", path.display()))?;
            let _ = writeln!(
                out,
                "{}: {} tapes, {} states, {} rules",
                spec.name,
                spec.tapes.len(),
                spec.states.len(),
                spec.rules.len()
            );
        }
    }
    Ok(Verdict::Pass)
}
