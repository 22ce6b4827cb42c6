use std::collections::BTreeSet;
use std::fs;
use std::path::{Path, PathBuf};

use anyhow::{bail, Context, Result};
use leastper::analysis::{approx, density as density_report, DensityReport};
use leastper::format::{dfa_to_dot, save_dfa, save_dfao};
use leastper::logic::CompileEnv;
use leastper::pipeline::{run_pipeline, PipelineOptions, PipelineReport, CACHE_ENV};
use leastper::sequences::factor_least_periods;
use leastper::{Dfa, Dfao};
use serde::Serialize;

use crate::source;
use crate::{BuildArgs, EvalArgs, Status, VerifyArgs};

fn cache_dir(flag: &Option<PathBuf>) -> Option<PathBuf> {
    flag.clone()
        .or_else(|| std::env::var_os(CACHE_ENV).map(PathBuf::from))
}

fn write(path: &Path, text: &str) -> Result<()> {
    fs::write(path, text).with_context(|| format!("writing {}", path.display()))
}

/// Stage facts that do not depend on timing or on the cache.
#[derive(Serialize)]
struct StageFacts<'a> {
    name: &'a str,
    formula: &'a str,
    tracks: &'a [String],
    states: usize,
}

#[derive(Serialize)]
struct BuildReport<'a> {
    sequence: &'a str,
    base: u32,
    length_slack: u32,
    stages: Vec<StageFacts<'a>>,
    lsd_states: usize,
    msd_states: usize,
    accepts_zero: bool,
    accepts_every_positive: bool,
    density: &'a DensityReport,
}

fn print_stages(report: &PipelineReport) {
    for s in &report.stages {
        if report.cached {
            println!("stage {:<2} {:>6} states (cached)", s.name, s.states);
        } else {
            println!(
                "stage {:<2} {:>6} states, peak {:>6}, {:.3} s",
                s.name, s.states, s.largest_intermediate, s.seconds
            );
        }
    }
}

pub fn build(args: &BuildArgs) -> Result<Status> {
    let seq = source::sequence(&args.sequence)?;
    let mut options = PipelineOptions::with_slack(args.slack);
    options.compile.minimize_eagerly = !args.lazy;
    options.cache_dir = cache_dir(&args.cache_dir);
    let report = run_pipeline(&seq.dfao, &seq.name, &options)?;
    let stats = density_report(&report.lsd)?;

    fs::create_dir_all(&args.out_dir)
        .with_context(|| format!("creating {}", args.out_dir.display()))?;
    let mut outputs: Vec<(&str, &Dfa)> = vec![
        ("P", &report.automata[0]),
        ("LP", &report.automata[1]),
        ("L", &report.lsd),
    ];
    if args.msd {
        outputs.push(("L.msd", &report.msd));
    }
    for (name, a) in &outputs {
        write(&args.out_dir.join(format!("{name}.dfa")), &save_dfa(a))?;
        if args.dot {
            write(
                &args.out_dir.join(format!("{name}.dot")),
                &dfa_to_dot(a, name),
            )?;
        }
    }
    let facts = BuildReport {
        sequence: &seq.name,
        base: report.base,
        length_slack: report.length_slack,
        stages: report
            .stages
            .iter()
            .map(|s| StageFacts {
                name: &s.name,
                formula: &s.formula,
                tracks: &s.tracks,
                states: s.states,
            })
            .collect(),
        lsd_states: report.lsd.state_count(),
        msd_states: report.msd.state_count(),
        accepts_zero: report.accepts_zero(),
        accepts_every_positive: stats.least_omitted.is_none(),
        density: &stats,
    };
    let json = serde_json::to_string_pretty(&facts)? + "\n";
    write(&args.out_dir.join("report.json"), &json)?;

    println!(
        "{} (base {}, length slack {})",
        seq.name, report.base, report.length_slack
    );
    print_stages(&report);
    println!(
        "final automaton: {} states lsd-first, {} states msd-first",
        report.lsd.state_count(),
        report.msd.state_count()
    );
    match stats.least_omitted {
        None => println!("accepts every n >= 1"),
        Some(n) => println!(
            "least omitted {n}, {} omitted values",
            if stats.complement_infinite {
                "infinitely many"
            } else {
                "finitely many"
            }
        ),
    }
    println!("density {}", stats.cesaro_density);
    println!("wrote {}", args.out_dir.display());
    Ok(Status::Yes)
}

pub fn query(path: &Path, n: u64) -> Result<Status> {
    let a = source::unary(path)?;
    if a.run(&[n])? {
        println!("accept");
        Ok(Status::Yes)
    } else {
        println!("reject");
        Ok(Status::No)
    }
}

pub fn enumerate(path: &Path, from: u64, max: u64, complement: bool) -> Result<Status> {
    let a = source::unary(path)?;
    let mut out = String::new();
    for n in from..=max {
        if a.run(&[n])? != complement {
            out.push_str(&n.to_string());
            out.push('\n');
        }
    }
    print!("{out}");
    Ok(Status::Yes)
}

pub fn density(path: &Path, json: bool) -> Result<Status> {
    let a = source::unary(path)?;
    let report = density_report(&a)?;
    if json {
        println!("{}", serde_json::to_string_pretty(&report)?);
        return Ok(Status::Yes);
    }
    println!("{}", report.cesaro_density);
    println!("approximately {:.6}", approx(&report.cesaro_density));
    println!("states {} ({})", report.states, report.order);
    println!("natural density exists: {}", report.natural_density_exists);
    println!("single recurrent class: {}", report.rank_one_limit);
    let row: Vec<String> = report
        .stationary_row
        .iter()
        .map(|r| r.to_string())
        .collect();
    println!("start-row limit: {}", row.join(" "));
    match report.least_omitted {
        Some(n) => println!("least omitted {n}"),
        None => println!("no omitted n >= 1"),
    }
    println!("complement infinite: {}", report.complement_infinite);
    Ok(Status::Yes)
}

fn join(values: impl IntoIterator<Item = usize>) -> String {
    let items: Vec<String> = values.into_iter().map(|v| v.to_string()).collect();
    if items.is_empty() {
        "none".into()
    } else {
        items.join(" ")
    }
}

pub fn verify(args: &VerifyArgs) -> Result<Status> {
    let seq = source::sequence(&args.sequence)?;
    let Some(builtin) = seq.builtin else {
        bail!(
            "verify needs a built-in sequence; `{}` has no reference values",
            args.sequence
        );
    };
    let mut options = PipelineOptions::with_slack(args.slack);
    options.cache_dir = cache_dir(&args.cache_dir);
    let report = run_pipeline(&seq.dfao, &seq.name, &options)?;
    let accepted: BTreeSet<usize> = (1..=args.max_n)
        .filter(|&n| report.lsd.run(&[n as u64]).expect("arity 1"))
        .collect();

    let oracle = builtin.oracle();
    let extra = args.slack as usize;
    let positive =
        |s: BTreeSet<usize>| -> BTreeSet<usize> { s.into_iter().filter(|&n| n >= 1).collect() };
    let found = positive(factor_least_periods(
        &oracle,
        args.prefix,
        args.max_n,
        extra,
    )?);
    let grown_len = args.prefix.checked_mul(2).context("prefix too large")?;
    let grown = positive(factor_least_periods(&oracle, grown_len, args.max_n, extra)?);

    println!(
        "{} on [1, {}], prefix {}",
        seq.name, args.max_n, args.prefix
    );
    if found != grown {
        println!(
            "oracle not converged: a prefix of {grown_len} adds {}",
            join(grown.difference(&found).copied())
        );
        return Ok(Status::NotConverged);
    }
    let missing: Vec<usize> = found.difference(&accepted).copied().collect();
    let extra: Vec<usize> = accepted.difference(&found).copied().collect();
    println!(
        "omitted: {}",
        join((1..=args.max_n).filter(|n| !accepted.contains(n)))
    );
    if missing.is_empty() && extra.is_empty() {
        println!("pass: automaton and oracle agree");
        Ok(Status::Yes)
    } else {
        println!("only in oracle: {}", join(missing));
        println!("only in automaton: {}", join(extra));
        println!("fail");
        Ok(Status::No)
    }
}

/// Splits `Name(a,b)=body`.
fn definition(text: &str) -> Result<(String, Vec<String>, String)> {
    let parsed = text.split_once('=').and_then(|(head, body)| {
        let (name, params) = head.trim().strip_suffix(')')?.split_once('(')?;
        let params = params
            .split(',')
            .map(|p| p.trim().to_string())
            .filter(|p| !p.is_empty())
            .collect();
        Some((name.trim().to_string(), params, body.to_string()))
    });
    parsed.with_context(|| format!("expected NAME(params)=BODY, got `{text}`"))
}

pub fn eval(args: &EvalArgs) -> Result<Status> {
    let bindings = args
        .seqs
        .iter()
        .map(|b| source::binding(b))
        .collect::<Result<Vec<_>>>()?;
    let base = bindings.first().map_or(args.base, |(_, s)| s.dfao.base());
    let mut env = CompileEnv::new(base)?;
    for (name, seq) in bindings {
        env.add_sequence(&name, seq.dfao)
            .with_context(|| format!("binding `{name}`"))?;
    }
    for d in &args.defines {
        let (name, params, body) = definition(d)?;
        let params: Vec<&str> = params.iter().map(String::as_str).collect();
        env.define(&name, &params, &body)
            .with_context(|| format!("defining `{name}`"))?;
    }
    let mut a = env.compile_str(&args.predicate)?;
    if let Some(free) = &args.free {
        a = a.cylindrify(free)?;
    }
    let text = if args.dfao {
        save_dfao(&Dfao::from_dfa(&a)?)
    } else {
        save_dfa(&a)
    };
    if a.arity() == 0 {
        println!("{}", a.run(&[])?);
    }
    match &args.out {
        Some(path) => {
            write(path, &text)?;
            eprintln!(
                "{} states over [{}], wrote {}",
                a.state_count(),
                a.tracks().join(", "),
                path.display()
            );
        }
        None if a.arity() > 0 => print!("{text}"),
        None => {}
    }
    Ok(Status::Yes)
}
