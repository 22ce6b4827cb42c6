//! From a sequence to the automaton of its least periods.
//!
//! Three predicates are compiled in turn, each one calling the previous as a
//! macro:
//!
//! * `P(n,i,j)`: `x[i..j]` has period `n`,
//! * `LP(n,i,j)`: `n` is the least period of `x[i..j]` (smaller candidates
//!   start at 1, since every word has the trivial "period" 0),
//! * `L(n)`: some factor of length at least `n + slack` has least period `n`.
//!
//! Slack 0 asks for any nonempty factor (a factor shorter than `n` cannot have
//! least period `n`), slack 1 for a factor with at least one repeated
//! position, slack 2 for a factor of length `n + 2` or more.

use std::fs;
use std::path::{Path, PathBuf};
use std::time::Instant;

use serde::Serialize;
use sha2::{Digest, Sha256};

use crate::alphabet::DigitOrder;
use crate::dfa::Dfa;
use crate::dfao::Dfao;
use crate::error::{Error, Result};
use crate::format;
use crate::logic::{parse, CompileEnv, CompileOptions, Predicate};
use crate::numeration;

/// Environment variable naming the stage cache directory.
pub const CACHE_ENV: &str = "LEASTPER_CACHE_DIR";

pub const PERIOD: &str = "At (i <= t & t <= j-n) => x[t] = x[t+n]";
pub const LEAST_PERIOD: &str = "$P(n,i,j) & (An' (1 <= n' & n' < n) => ~$P(n',i,j))";
pub const LEAST_PERIOD_NEGATED_EXISTS: &str = "$P(n,i,j) & ~En' (1 <= n' & n' < n & $P(n',i,j))";

/// `L(n)` for factors of length at least `n + slack`.
pub fn least_period_set_formula(slack: u32) -> Result<String> {
    match slack {
        0 => Ok("Ei Ej (i+n <= j+1 & $LP(n,i,j))".to_string()),
        1 => Ok("Ei Ej (i+n <= j & $LP(n,i,j))".to_string()),
        2 => Ok("Ei Ej (i+n <= j-1 & $LP(n,i,j))".to_string()),
        s => Err(Error::InvalidSlack(s)),
    }
}

/// How the inner quantifier of `LP` is written; both give the same language.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum LeastPeriodForm {
    #[default]
    Forall,
    NegatedExists,
}

impl LeastPeriodForm {
    pub fn formula(self) -> &'static str {
        match self {
            LeastPeriodForm::Forall => LEAST_PERIOD,
            LeastPeriodForm::NegatedExists => LEAST_PERIOD_NEGATED_EXISTS,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PipelineOptions {
    /// Factors must have length at least `n + length_slack`; 0, 1 or 2.
    pub length_slack: u32,
    pub compile: CompileOptions,
    pub least_period_form: LeastPeriodForm,
    /// Stage automata are reused from here when present.
    pub cache_dir: Option<PathBuf>,
}

impl Default for PipelineOptions {
    fn default() -> Self {
        Self {
            length_slack: 0,
            compile: CompileOptions::default(),
            least_period_form: LeastPeriodForm::Forall,
            cache_dir: None,
        }
    }
}

impl PipelineOptions {
    pub fn with_slack(slack: u32) -> Self {
        Self {
            length_slack: slack,
            ..Self::default()
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct StageReport {
    pub name: String,
    pub formula: String,
    pub tracks: Vec<String>,
    pub states: usize,
    /// Zero when the stage came from the cache.
    pub largest_intermediate: usize,
    pub seconds: f64,
}

#[derive(Debug, Clone)]
pub struct PipelineReport {
    pub sequence: String,
    pub base: u32,
    pub length_slack: u32,
    pub stages: Vec<StageReport>,
    /// `P`, `LP` and `L` in that order.
    pub automata: Vec<Dfa>,
    /// Minimal `L`, read least significant digit first.
    pub lsd: Dfa,
    /// Minimal `L`, read most significant digit first.
    pub msd: Dfa,
    pub cached: bool,
}

/// The machine-readable part of a [`PipelineReport`].
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PipelineSummary {
    pub sequence: String,
    pub base: u32,
    pub length_slack: u32,
    pub stages: Vec<StageReport>,
    pub lsd_states: usize,
    pub msd_states: usize,
    pub accepts_zero: bool,
    pub cached: bool,
}

impl PipelineReport {
    pub fn final_automaton(&self, order: DigitOrder) -> &Dfa {
        match order {
            DigitOrder::Lsd => &self.lsd,
            DigitOrder::Msd => &self.msd,
        }
    }

    /// Whether 0 satisfies `L`; reported, but 0 is not a period in the usual sense.
    pub fn accepts_zero(&self) -> bool {
        self.lsd.run(&[0]).expect("arity 1")
    }

    pub fn summary(&self) -> PipelineSummary {
        PipelineSummary {
            sequence: self.sequence.clone(),
            base: self.base,
            length_slack: self.length_slack,
            stages: self.stages.clone(),
            lsd_states: self.lsd.state_count(),
            msd_states: self.msd.state_count(),
            accepts_zero: self.accepts_zero(),
            cached: self.cached,
        }
    }
}

fn env_for(seq: &Dfao, options: &PipelineOptions) -> Result<CompileEnv> {
    let mut env = CompileEnv::new(seq.base())?.with_sequence("x", seq.clone())?;
    env.set_options(options.compile);
    Ok(env)
}

/// `P(n,i,j)` over tracks `i, j, n`.
pub fn period_predicate(seq: &Dfao) -> Result<Dfa> {
    env_for(seq, &PipelineOptions::default())?.compile_str(PERIOD)
}

/// `LP(n,i,j)` over tracks `i, j, n`.
pub fn least_period_predicate(seq: &Dfao) -> Result<Dfa> {
    let mut env = env_for(seq, &PipelineOptions::default())?;
    env.define("P", &["n", "i", "j"], PERIOD)?;
    env.compile_str(LEAST_PERIOD)
}

/// `L(n)`, minimal and least significant digit first.
pub fn least_period_automaton(seq: &Dfao, length_slack: u32) -> Result<Dfa> {
    Ok(run_pipeline(seq, "x", &PipelineOptions::with_slack(length_slack))?.lsd)
}

pub fn run_pipeline(seq: &Dfao, name: &str, options: &PipelineOptions) -> Result<PipelineReport> {
    let l_formula = least_period_set_formula(options.length_slack)?;
    let lp_formula = options.least_period_form.formula();
    let stages = [("P", PERIOD), ("LP", lp_formula), ("L", l_formula.as_str())];
    let key = cache_key(seq, options, &stages);

    let cached = match &options.cache_dir {
        Some(dir) => load_cached(dir, &key)?,
        None => None,
    };
    let (automata, reports, cached) = match cached {
        Some(automata) => {
            let reports = stages
                .iter()
                .zip(&automata)
                .map(|(&(stage, formula), a)| StageReport {
                    name: stage.to_string(),
                    formula: formula.to_string(),
                    tracks: a.tracks().to_vec(),
                    states: a.state_count(),
                    largest_intermediate: 0,
                    seconds: 0.0,
                })
                .collect();
            (automata, reports, true)
        }
        None => {
            let (automata, reports) = compile_stages(seq, options, &stages)?;
            if let Some(dir) = &options.cache_dir {
                store_cached(dir, &key, &automata)?;
            }
            (automata, reports, false)
        }
    };

    let lsd = automata[2].clone();
    if lsd.tracks() != ["n"] {
        return Err(Error::Invalid(format!(
            "least-period automaton has tracks {:?}, expected [n]",
            lsd.tracks()
        )));
    }
    let msd = numeration::reverse_to_msd(&lsd)?;
    Ok(PipelineReport {
        sequence: name.to_string(),
        base: seq.base(),
        length_slack: options.length_slack,
        stages: reports,
        automata,
        lsd,
        msd,
        cached,
    })
}

fn compile_stages(
    seq: &Dfao,
    options: &PipelineOptions,
    stages: &[(&str, &str); 3],
) -> Result<(Vec<Dfa>, Vec<StageReport>)> {
    let mut env = env_for(seq, options)?;
    let params: [&[&str]; 3] = [&["n", "i", "j"], &["n", "i", "j"], &["n"]];
    let mut automata = Vec::new();
    let mut reports = Vec::new();
    for (&(stage, text), params) in stages.iter().zip(params) {
        let clock = Instant::now();
        let formula = parse(text)?;
        let (dfa, stats) = env.compile_with_stats(&formula)?;
        reports.push(StageReport {
            name: stage.to_string(),
            formula: text.to_string(),
            tracks: dfa.tracks().to_vec(),
            states: dfa.state_count(),
            largest_intermediate: stats.largest_intermediate,
            seconds: clock.elapsed().as_secs_f64(),
        });
        env.insert_predicate(
            stage,
            Predicate {
                params: params.iter().map(|p| p.to_string()).collect(),
                formula,
                dfa: dfa.clone(),
            },
        )?;
        automata.push(dfa);
    }
    Ok((automata, reports))
}

/// Hex SHA-256 of everything the stage automata depend on.
pub fn cache_key(seq: &Dfao, options: &PipelineOptions, stages: &[(&str, &str); 3]) -> String {
    let mut h = Sha256::new();
    h.update(b"leastper-pipeline 1\n");
    h.update(format::save_dfao(seq).as_bytes());
    h.update(format!("minimize_eagerly {}\n", options.compile.minimize_eagerly).as_bytes());
    for (name, text) in stages {
        h.update(format!("{name}: {text}\n").as_bytes());
    }
    h.finalize().iter().map(|b| format!("{b:02x}")).collect()
}

fn cache_file(dir: &Path, key: &str, stage: usize) -> PathBuf {
    dir.join(format!("{key}-{}.dfa", ["p", "lp", "l"][stage]))
}

fn load_cached(dir: &Path, key: &str) -> Result<Option<Vec<Dfa>>> {
    let mut out = Vec::new();
    for stage in 0..3 {
        let path = cache_file(dir, key, stage);
        match fs::read_to_string(&path) {
            Ok(text) => out.push(format::load_dfa(&text)?),
            Err(e) if e.kind() == std::io::ErrorKind::NotFound => return Ok(None),
            Err(e) => return Err(Error::Cache(format!("{}: {e}", path.display()))),
        }
    }
    Ok(Some(out))
}

fn store_cached(dir: &Path, key: &str, automata: &[Dfa]) -> Result<()> {
    let io = |e: std::io::Error| Error::Cache(format!("{}: {e}", dir.display()));
    fs::create_dir_all(dir).map_err(io)?;
    for (stage, a) in automata.iter().enumerate() {
        // Write then rename so a concurrent reader never sees a partial file.
        let path = cache_file(dir, key, stage);
        let tmp = path.with_extension(format!("tmp{}", std::process::id()));
        fs::write(&tmp, format::save_dfa(a)).map_err(io)?;
        fs::rename(&tmp, &path).map_err(io)?;
    }
    Ok(())
}
