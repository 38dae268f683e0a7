use std::fs::{self, File};
use std::os::unix::process::CommandExt;
use std::path::{Path, PathBuf};
use std::process::{Command, Stdio};
use std::thread;
use std::time::{Duration, Instant};

use log::{debug, warn};
use rayon::prelude::*;

use super::{Answer, HarnessError, Mode, RunRecord, SolutionSize, Subtrack, ToolConfig};
use crate::aiger::parse;
use crate::bench::BenchmarkInstance;
use crate::verify::{verify_solution, Budget, Method, Verdict, VerdictStatus};

/// Resource limits for one job.
#[derive(Debug, Clone)]
pub struct Limits {
    /// CPU seconds in sequential mode, wall seconds in parallel mode.
    pub timeout: f64,
    /// Address-space ceiling; `None` leaves the inherited limit.
    pub memory_bytes: Option<u64>,
    /// Overrides each tool's configured mode.
    pub mode: Option<Mode>,
}

impl Default for Limits {
    fn default() -> Self {
        Limits {
            timeout: 60.0,
            memory_bytes: Some(4 << 30),
            mode: None,
        }
    }
}

/// One unit of work.
#[derive(Debug, Clone)]
pub struct Job {
    pub tool: ToolConfig,
    pub benchmark: BenchmarkInstance,
}

/// Sequential runs are judged on CPU time, parallel runs on wall time.
pub fn judge_timeout(mode: Mode, cpu_seconds: f64, wall_seconds: f64, limit: f64) -> bool {
    match mode {
        Mode::Sequential => cpu_seconds > limit,
        Mode::Parallel => wall_seconds > limit,
    }
}

/// First `REALIZABLE`/`UNREALIZABLE` line of a tool's output.
pub fn parse_answer(stdout: &str) -> Option<Answer> {
    stdout.lines().find_map(|line| match line.trim() {
        "REALIZABLE" => Some(Answer::Realizable),
        "UNREALIZABLE" => Some(Answer::Unrealizable),
        _ => None,
    })
}

/// `solution.aag` → `solution.winregion.aag`.
pub fn witness_path_for(solution: &Path) -> PathBuf {
    solution.with_extension("winregion.aag")
}

/// Scratch directory: `$ARENA_WORKDIR`, else a per-process temp directory.
pub fn workdir() -> PathBuf {
    match std::env::var_os("ARENA_WORKDIR") {
        Some(dir) if !dir.is_empty() => PathBuf::from(dir),
        _ => std::env::temp_dir().join(format!("arena-{}", std::process::id())),
    }
}

fn clock_ticks() -> f64 {
    // SAFETY: sysconf has no preconditions.
    let t = unsafe { libc::sysconf(libc::_SC_CLK_TCK) };
    if t > 0 {
        t as f64
    } else {
        100.0
    }
}

/// CPU seconds (user + system, including reaped children) of every live
/// process in group `pgid`.
fn group_cpu_seconds(pgid: i32, ticks: f64) -> f64 {
    let Ok(entries) = fs::read_dir("/proc") else {
        return 0.0;
    };
    let mut total = 0u64;
    for entry in entries.flatten() {
        let name = entry.file_name();
        let Some(pid) = name.to_str().and_then(|s| s.parse::<i32>().ok()) else {
            continue;
        };
        let Ok(stat) = fs::read_to_string(format!("/proc/{pid}/stat")) else {
            continue;
        };
        // Fields after the parenthesized command name, starting at field 3.
        let Some(rest) = stat.rfind(')').map(|i| &stat[i + 1..]) else {
            continue;
        };
        let fields: Vec<&str> = rest.split_whitespace().collect();
        if fields.len() < 15 || fields[2].parse::<i32>() != Ok(pgid) {
            continue;
        }
        total += fields[11..15].iter().filter_map(|f| f.parse::<u64>().ok()).sum::<u64>();
    }
    total as f64 / ticks
}

fn rusage_seconds(ru: &libc::rusage) -> f64 {
    let tv = |t: libc::timeval| t.tv_sec as f64 + t.tv_usec as f64 / 1e6;
    tv(ru.ru_utime) + tv(ru.ru_stime)
}

struct Outcome {
    cpu: f64,
    wall: f64,
    killed: bool,
    exit_code: Option<i32>,
}

/// Runs `argv` in its own process group with stdout redirected to
/// `stdout_path`, polling CPU and wall time until exit or the mode's
/// limit is crossed.
fn supervise(
    argv: &[String],
    env: &std::collections::BTreeMap<String, String>,
    dir: &Path,
    stdout_path: &Path,
    limits: &Limits,
    mode: Mode,
) -> Result<Outcome, HarnessError> {
    let spawn_err = |source| HarnessError::SpawnFailure {
        command: argv.join(" "),
        source,
    };
    let mut cmd = Command::new(&argv[0]);
    cmd.args(&argv[1..])
        .current_dir(dir)
        .envs(env)
        .stdin(Stdio::null())
        .stdout(File::create(stdout_path)?)
        .stderr(File::create(dir.join("stderr.txt"))?);
    let memory = limits.memory_bytes;
    // SAFETY: only async-signal-safe calls between fork and exec.
    unsafe {
        cmd.pre_exec(move || {
            if libc::setpgid(0, 0) != 0 {
                return Err(std::io::Error::last_os_error());
            }
            if let Some(bytes) = memory {
                let lim = libc::rlimit {
                    rlim_cur: bytes as libc::rlim_t,
                    rlim_max: bytes as libc::rlim_t,
                };
                if libc::setrlimit(libc::RLIMIT_AS, &lim) != 0 {
                    return Err(std::io::Error::last_os_error());
                }
            }
            Ok(())
        });
    }
    let started = Instant::now();
    let child = cmd.spawn().map_err(spawn_err)?;
    let pid = child.id() as i32;
    let ticks = clock_ticks();
    // Sequential runs may sleep or block; bound them by wall time as well.
    let wall_guard = match mode {
        Mode::Sequential => (2.0 * limits.timeout).max(limits.timeout + 5.0),
        Mode::Parallel => limits.timeout,
    };
    let mut cpu = 0.0f64;
    let mut killed = false;
    loop {
        let mut status = 0;
        // SAFETY: rusage is plain data; wait4 writes it on success.
        let mut ru: libc::rusage = unsafe { std::mem::zeroed() };
        let r = unsafe { libc::wait4(pid, &mut status, libc::WNOHANG, &mut ru) };
        if r == pid {
            let wall = started.elapsed().as_secs_f64();
            cpu = cpu.max(rusage_seconds(&ru));
            // Descendants left behind in the group are not the tool's answer.
            unsafe { libc::killpg(pid, libc::SIGKILL) };
            let exit_code = libc::WIFEXITED(status).then(|| libc::WEXITSTATUS(status));
            return Ok(Outcome {
                cpu,
                wall,
                killed,
                exit_code,
            });
        }
        if r < 0 {
            return Err(spawn_err(std::io::Error::last_os_error()));
        }
        if !killed {
            cpu = cpu.max(group_cpu_seconds(pid, ticks));
            let wall = started.elapsed().as_secs_f64();
            let over = match mode {
                Mode::Sequential => cpu > limits.timeout || wall > wall_guard,
                Mode::Parallel => wall > wall_guard,
            };
            if over {
                debug!("killing {} after cpu {cpu:.2}s wall {wall:.2}s", argv[0]);
                // SAFETY: the group was created by the child in pre_exec.
                unsafe { libc::killpg(pid, libc::SIGKILL) };
                killed = true;
            }
        }
        thread::sleep(Duration::from_millis(10));
    }
}

fn job_dir_name(benchmark: &str) -> String {
    benchmark.trim_end_matches(".aag").replace(['/', '\\'], "__")
}

/// Runs one tool on one benchmark. `bench_root` resolves the instance's
/// file; job files live under `scratch`.
pub fn run_job(
    tool: &ToolConfig,
    bench: &BenchmarkInstance,
    bench_root: &Path,
    limits: &Limits,
    scratch: &Path,
) -> Result<RunRecord, HarnessError> {
    let mode = limits.mode.unwrap_or(tool.mode);
    let dir = scratch.join(&tool.name).join(job_dir_name(&bench.file));
    if dir.exists() {
        fs::remove_dir_all(&dir)?;
    }
    fs::create_dir_all(&dir)?;
    let input = fs::canonicalize(bench_root.join(&bench.file))?;
    let output = dir.join("solution.aag");
    let witness = witness_path_for(&output);
    let argv = tool.argv(&input, &output, &witness, mode);
    let stdout_path = dir.join("stdout.txt");
    let outcome = supervise(&argv, &tool.env, &dir, &stdout_path, limits, mode)?;

    let stdout = String::from_utf8_lossy(&fs::read(&stdout_path)?).into_owned();
    let timed_out = outcome.killed || judge_timeout(mode, outcome.cpu, outcome.wall, limits.timeout);
    let answer = if timed_out {
        Answer::Timeout
    } else {
        parse_answer(&stdout).unwrap_or(Answer::Crash)
    };
    let mut record = RunRecord::new(&tool.name, &bench.file, tool.subtrack, mode, answer);
    record.cpu_seconds = outcome.cpu;
    record.wall_seconds = outcome.wall;
    record.exit_code = outcome.exit_code;
    record.hors_concours = tool.hors_concours;
    if tool.subtrack == Subtrack::Synthesis && answer == Answer::Realizable {
        if output.is_file() {
            record.solution = Some(output.clone());
            if witness.is_file() {
                record.witness = Some(witness.clone());
            }
            attach_verdict(&mut record, &input, limits.timeout);
        } else {
            record.verdict = Some(Verdict {
                status: VerdictStatus::Falsified,
                method: Method::Syntactic,
                detail: "no solution file".into(),
                counterexample: None,
            });
        }
    }
    Ok(record)
}

/// Verifies a record's solution against its specification and records the
/// verdict and size.
fn attach_verdict(record: &mut RunRecord, spec_path: &Path, time_limit: f64) {
    let falsified = |detail: String| Verdict {
        status: VerdictStatus::Falsified,
        method: Method::Syntactic,
        detail,
        counterexample: None,
    };
    let spec = match fs::read(spec_path).map_err(|e| e.to_string()).and_then(|b| parse(&b).map_err(|e| e.to_string())) {
        Ok(s) => s,
        Err(e) => {
            warn!("specification {}: {e}", spec_path.display());
            return;
        }
    };
    let sol_path = record.solution.as_ref().expect("caller checked");
    let sol = match fs::read(sol_path).map_err(|e| e.to_string()).and_then(|b| parse(&b).map_err(|e| e.to_string())) {
        Ok(s) => s,
        Err(e) => {
            record.verdict = Some(falsified(format!("unreadable solution: {e}")));
            return;
        }
    };
    let witness = record
        .witness
        .as_ref()
        .and_then(|p| fs::read(p).ok())
        .and_then(|b| parse(&b).ok());
    let budget = Budget {
        max_steps: None,
        time_limit: Some(Duration::from_secs_f64(time_limit)),
    };
    let report = verify_solution(&spec, &sol, witness.as_ref(), budget);
    record.fallback_used = report.fallback_used;
    if report.verdict.is_verified() {
        record.size = Some(SolutionSize {
            and_gates: sol.ands.len(),
            controller_ands: sol.ands.len().saturating_sub(spec.ands.len()),
            controller_latches: sol.latches.len().saturating_sub(spec.latches.len()),
        });
    }
    record.verdict = Some(report.verdict);
}

/// Copies a record's solution and witness to `<dest>/<tool>/<benchmark>`
/// and points the record at the copies.
fn collect(record: &mut RunRecord, dest: &Path) -> Result<(), HarnessError> {
    let Some(sol) = record.solution.clone() else {
        return Ok(());
    };
    let target = dest.join(&record.tool).join(&record.benchmark);
    if let Some(parent) = target.parent() {
        fs::create_dir_all(parent)?;
    }
    fs::copy(&sol, &target)?;
    record.solution = Some(target.clone());
    if let Some(w) = record.witness.clone() {
        let wt = witness_path_for(&target);
        fs::copy(w, &wt)?;
        record.witness = Some(wt);
    }
    Ok(())
}

/// Runs `jobs` on a pool of `workers` threads, one child process per
/// worker at a time. Records come back in job order. A job that cannot be
/// started is recorded as a crash. Solutions are copied under `collect_dir`
/// when given.
pub fn run_all(
    jobs: &[Job],
    bench_root: &Path,
    limits: &Limits,
    workers: usize,
    scratch: &Path,
    collect_dir: Option<&Path>,
) -> Result<Vec<RunRecord>, HarnessError> {
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(workers.max(1))
        .build()
        .map_err(|e| HarnessError::Config(e.to_string()))?;
    pool.install(|| {
        jobs.par_iter()
            .map(|job| {
                let mut record = match run_job(&job.tool, &job.benchmark, bench_root, limits, scratch) {
                    Ok(r) => r,
                    Err(HarnessError::SpawnFailure { command, source }) => {
                        warn!("{command}: {source}");
                        let mode = limits.mode.unwrap_or(job.tool.mode);
                        let mut r = RunRecord::new(&job.tool.name, &job.benchmark.file, job.tool.subtrack, mode, Answer::Crash);
                        r.hors_concours = job.tool.hors_concours;
                        r
                    }
                    Err(e) => return Err(e),
                };
                if let Some(dest) = collect_dir {
                    collect(&mut record, dest)?;
                }
                Ok(record)
            })
            .collect()
    })
}
