use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use serde::Serialize;
use swm_core::gain::{conjecture_check, conjecture_scan, VerificationReport};
use swm_core::lp::{
    build_lp_beta, build_lp_beta_lambda, build_lp_general, closed_form_beta_lambda,
    closed_form_general, simplex_solve, LpModel, LpStatus,
};
use swm_core::valuations::{
    check_axioms, classify_second_order, spot_check_axioms, AxiomReport, SecondOrderReport,
    SpotCheckReport, DEFAULT_SPOT_CHECK_SAMPLES, EXHAUSTIVE_CHECK_ITEMS, MAX_SECOND_ORDER_ITEMS,
};
use swm_core::{load_instance, GainContext, GainTrace, Instance, SweepMode};

use crate::args::{
    CheckSet, Cli, Command, ConjectureArgs, Family, LpArgs, Mode, SimulateArgs, VerifyArgs,
};
use crate::{render, CliError, Outcome};

pub fn execute(cli: &Cli) -> Result<Outcome, CliError> {
    match &cli.command {
        Command::Simulate(a) => simulate(a, cli.seed),
        Command::Lp(a) => lp(a),
        Command::Classify(a) => classify(&a.instance, cli.seed),
        Command::Verify(a) => verify(a),
        Command::Conjecture(a) => conjecture(a, cli.seed),
    }
}

fn sweep_mode(mode: Mode, samples: u64, seed: u64) -> SweepMode {
    match mode {
        Mode::Exact => SweepMode::Exact,
        Mode::Mc => SweepMode::MonteCarlo { samples, seed },
    }
}

fn path_string(p: &Path) -> String {
    p.display().to_string()
}

#[derive(Serialize)]
struct InstanceParams {
    instance: String,
    name: Option<String>,
    n: usize,
    m: usize,
}

impl InstanceParams {
    fn new(path: &Path, inst: &Instance) -> Self {
        InstanceParams {
            instance: path_string(path),
            name: inst.name.clone(),
            n: inst.n(),
            m: inst.m(),
        }
    }
}

fn trace_csv(trace: &GainTrace) -> String {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(["i", "w", "a", "b"])
        .expect("in-memory write");
    for (i, wi, ai, bi) in trace.rows() {
        w.serialize((i, wi, ai, bi)).expect("in-memory write");
    }
    String::from_utf8(w.into_inner().expect("in-memory flush")).expect("csv is utf-8")
}

fn simulate(args: &SimulateArgs, seed: u64) -> Result<Outcome, CliError> {
    let inst = load_instance(&args.instance)?;
    let mode = sweep_mode(args.mode, args.samples, seed);
    let trace = GainContext::new(&inst)?.expected_trace(mode)?;

    #[derive(Serialize)]
    struct Params {
        #[serde(flatten)]
        instance: InstanceParams,
        mode: SweepMode,
    }
    let mut summary = String::new();
    let _ = writeln!(summary, "orders            {}", trace.orders);
    let _ = writeln!(summary, "opt               {}", trace.opt_value);
    let _ = writeln!(summary, "expected welfare  {:.6}", trace.expected_welfare);
    let _ = writeln!(summary, "ratio             {:.6}", trace.ratio);
    if let Some(se) = &trace.stderr {
        let _ = writeln!(summary, "ratio stderr      {:.6}", se.ratio);
    }
    let _ = writeln!(summary, "beta              {:.6}", trace.beta);
    let _ = writeln!(summary, "1/2 + beta/2      {:.6}", trace.ratio_bound);
    let params = Params {
        instance: InstanceParams::new(&args.instance, &inst),
        mode,
    };
    Ok(Outcome {
        report: render("simulate", params, &trace),
        summary,
        csv: Some(trace_csv(&trace)),
        passed: true,
    })
}

#[derive(Serialize)]
struct LpResults {
    status: LpStatus,
    num_vars: usize,
    num_constraints: usize,
    iterations: usize,
    simplex_objective: f64,
    max_violation: f64,
    closed_form: Option<f64>,
    asymptotic_bound: Option<f64>,
    difference: Option<f64>,
    /// Why no closed form is given.
    closed_form_note: Option<String>,
    solution: Vec<(String, f64)>,
}

fn lp(args: &LpArgs) -> Result<Outcome, CliError> {
    let lambda = || {
        args.lambda
            .ok_or_else(|| CliError::Usage("--family beta-lambda needs --lambda".into()))
    };
    let (model, closed, asymptotic, note): (LpModel, Option<f64>, Option<f64>, Option<String>) =
        match args.family {
            Family::Beta => (
                build_lp_beta(args.n, args.beta)?,
                None,
                None,
                Some("no closed form for the unrelaxed program".into()),
            ),
            Family::BetaLambda => {
                let l = lambda()?;
                let model = build_lp_beta_lambda(args.n, l, args.beta)?;
                match closed_form_beta_lambda(args.n, l, args.beta) {
                    Ok(cf) => (model, Some(cf.exact), Some(cf.asymptotic), None),
                    Err(e) => (model, None, None, Some(e.to_string())),
                }
            }
            Family::General => {
                let model = build_lp_general(args.n)?;
                match closed_form_general(args.n) {
                    Ok(cf) => (model, Some(cf), None, None),
                    Err(e) => (model, None, None, Some(e.to_string())),
                }
            }
        };
    if let Some(path) = &args.listing {
        fs::write(path, model.to_listing()).map_err(|source| CliError::Write {
            path: path.clone(),
            source,
        })?;
    }
    let sol = simplex_solve(&model);
    let difference = closed.map(|c| sol.objective - c);
    let results = LpResults {
        status: sol.status,
        num_vars: model.num_vars(),
        num_constraints: model.num_constraints(),
        iterations: sol.iterations,
        simplex_objective: sol.objective,
        max_violation: sol.max_violation,
        closed_form: closed,
        asymptotic_bound: asymptotic,
        difference,
        closed_form_note: note,
        solution: model
            .var_names
            .iter()
            .cloned()
            .zip(sol.primal.iter().copied())
            .collect(),
    };
    let mut summary = String::new();
    let _ = writeln!(summary, "status            {:?}", sol.status);
    let _ = writeln!(summary, "simplex optimum   {:.9}", sol.objective);
    match closed {
        Some(c) => {
            let _ = writeln!(summary, "closed form       {c:.9}");
            let _ = writeln!(summary, "difference        {:.3e}", sol.objective - c);
        }
        None => {
            let _ = writeln!(
                summary,
                "closed form       n/a ({})",
                results.closed_form_note.as_deref().unwrap_or("")
            );
        }
    }
    if let Some(a) = asymptotic {
        let _ = writeln!(summary, "asymptotic bound  {a:.9}");
    }

    #[derive(Serialize)]
    struct Params {
        family: &'static str,
        n: usize,
        lambda: Option<f64>,
        beta: Option<f64>,
    }
    let params = Params {
        family: model.meta.family.name(),
        n: args.n,
        lambda: model.meta.lambda,
        beta: model.meta.beta,
    };
    Ok(Outcome {
        report: render("lp", params, &results),
        summary,
        csv: None,
        passed: sol.status == LpStatus::Optimal,
    })
}

#[derive(Serialize)]
#[serde(tag = "method", rename_all = "snake_case")]
enum AxiomResult {
    Exhaustive(AxiomReport),
    SpotCheck(SpotCheckReport),
}

#[derive(Serialize)]
struct AgentClass {
    agent: usize,
    kind: String,
    axioms: AxiomResult,
    second_order: Option<SecondOrderReport>,
    second_order_note: Option<String>,
}

fn classify(path: &Path, seed: u64) -> Result<Outcome, CliError> {
    let inst = load_instance(path)?;
    let n = inst.n();
    let mut agents = Vec::new();
    let mut summary = String::new();
    let mut passed = true;
    for (agent, oracle) in inst.oracles().iter().enumerate() {
        let axioms = if n <= EXHAUSTIVE_CHECK_ITEMS {
            let r = check_axioms(oracle)?;
            passed &= r.passed();
            AxiomResult::Exhaustive(r)
        } else {
            let r = spot_check_axioms(oracle, DEFAULT_SPOT_CHECK_SAMPLES, seed);
            passed &= !r.violation_found();
            AxiomResult::SpotCheck(r)
        };
        let (second_order, note) = if n <= MAX_SECOND_ORDER_ITEMS {
            (Some(classify_second_order(oracle)?), None)
        } else {
            (None, Some(format!("classification enumerates all tuples and is limited to n <= {MAX_SECOND_ORDER_ITEMS}")))
        };
        let class = second_order
            .as_ref()
            .map_or_else(|| "not classified".to_string(), |r| r.class.to_string());
        let axiom_text = match &axioms {
            AxiomResult::Exhaustive(r) if r.passed() => "axioms hold".to_string(),
            AxiomResult::Exhaustive(r) => r.first_violation().unwrap_or_default(),
            AxiomResult::SpotCheck(r) => r.verdict().to_string(),
        };
        let _ = writeln!(
            summary,
            "agent {agent} ({}): {class}; {axiom_text}",
            oracle.kind()
        );
        agents.push(AgentClass {
            agent,
            kind: oracle.kind().to_string(),
            axioms,
            second_order,
            second_order_note: note,
        });
    }
    #[derive(Serialize)]
    struct Params {
        #[serde(flatten)]
        instance: InstanceParams,
        seed: Option<u64>,
    }
    let params = Params {
        instance: InstanceParams::new(path, &inst),
        seed: (n > EXHAUSTIVE_CHECK_ITEMS).then_some(seed),
    };
    Ok(Outcome {
        report: render("classify", params, &agents),
        summary,
        csv: None,
        passed,
    })
}

fn verify(args: &VerifyArgs) -> Result<Outcome, CliError> {
    let inst = load_instance(&args.instance)?;
    let ctx = GainContext::new(&inst)?;
    let mut sets = args.checks.clone();
    sets.sort();
    sets.dedup();
    let mut results: Vec<(&'static str, VerificationReport)> = Vec::new();
    for set in &sets {
        let (name, report) = match set {
            CheckSet::Lemmas => ("lemmas", ctx.verify_lemmas()?),
            CheckSet::Eq1 => ("eq1", ctx.verify_concatenated()?),
            CheckSet::Secondhalf => ("secondhalf", ctx.verify_second_half()?),
        };
        results.push((name, report));
    }
    let mut summary = String::new();
    for (_, report) in &results {
        for c in &report.checks {
            let verdict = match (&c.skipped, c.passed) {
                (Some(reason), _) => format!("skipped ({reason})"),
                (None, true) => "pass".to_string(),
                (None, false) => format!("FAIL (violation {:.3e})", c.max_violation),
            };
            let _ = writeln!(summary, "{:<48} {verdict}", c.name);
        }
    }
    let passed = results.iter().all(|(_, r)| r.passed);
    let _ = writeln!(summary, "overall: {}", if passed { "pass" } else { "FAIL" });

    #[derive(Serialize)]
    struct Params {
        #[serde(flatten)]
        instance: InstanceParams,
        checks: Vec<&'static str>,
    }
    let params = Params {
        instance: InstanceParams::new(&args.instance, &inst),
        checks: results.iter().map(|(n, _)| *n).collect(),
    };
    let body: std::collections::BTreeMap<_, _> = results.iter().map(|(n, r)| (*n, r)).collect();
    #[derive(Serialize)]
    struct Results<'a> {
        passed: bool,
        reports: std::collections::BTreeMap<&'static str, &'a VerificationReport>,
    }
    Ok(Outcome {
        report: render(
            "verify",
            params,
            Results {
                passed,
                reports: body,
            },
        ),
        summary,
        csv: None,
        passed,
    })
}

fn conjecture(args: &ConjectureArgs, seed: u64) -> Result<Outcome, CliError> {
    let mut summary = String::new();
    if let Some(count) = args.random {
        if args.mode != Mode::Exact {
            return Err(CliError::Usage(
                "--random scans run in exact mode only".into(),
            ));
        }
        let scan = conjecture_scan(count, args.nmax, args.mmax, seed)?;
        let _ = writeln!(summary, "instances         {}", scan.count);
        let _ = writeln!(
            summary,
            "min gap           {:.3e} (instance {})",
            scan.min_gap, scan.min_gap_index
        );
        let _ = writeln!(summary, "counterexamples   {}", scan.counterexamples.len());
        let _ = writeln!(
            summary,
            "max cross-check   {:.3e}",
            scan.max_crosscheck_error
        );
        #[derive(Serialize)]
        struct Params {
            random: usize,
            nmax: usize,
            mmax: usize,
            seed: u64,
        }
        let params = Params {
            random: count,
            nmax: args.nmax,
            mmax: args.mmax,
            seed,
        };
        return Ok(Outcome {
            report: render("conjecture", params, &scan),
            summary,
            csv: None,
            passed: scan.crosscheck_ok,
        });
    }
    let path = args
        .instance
        .as_ref()
        .expect("clap requires an instance without --random");
    let inst = load_instance(path)?;
    let mode = sweep_mode(args.mode, args.samples, seed);
    let report = conjecture_check(&inst, mode)?;
    let _ = writeln!(summary, "copy side (lhs)   {:.9}", report.lhs);
    let _ = writeln!(summary, "move side (rhs)   {:.9}", report.rhs);
    let _ = writeln!(summary, "gap rhs - lhs     {:.3e}", report.gap);
    let _ = writeln!(
        summary,
        "{}",
        if report.holds {
            "no counterexample"
        } else {
            "COUNTEREXAMPLE: lhs exceeds rhs"
        }
    );
    #[derive(Serialize)]
    struct Params {
        #[serde(flatten)]
        instance: InstanceParams,
        mode: SweepMode,
    }
    let params = Params {
        instance: InstanceParams::new(path, &inst),
        mode,
    };
    let passed = report.crosscheck_ok;
    Ok(Outcome {
        report: render("conjecture", params, &report),
        summary,
        csv: None,
        passed,
    })
}
