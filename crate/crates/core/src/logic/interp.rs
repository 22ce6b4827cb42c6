//! Direct evaluation of formulas over small models.
//!
//! Terms are evaluated as integers, so `j - n` may be negative; an index or
//! predicate argument that is negative makes its atom false. Quantifiers range
//! over `[0, bound]`, which is exact whenever every witness that matters is at
//! most `bound` (for instance when quantified variables are bounded by free
//! ones in the formula).

use std::collections::BTreeMap;

use super::ast::{Formula, SeqRef, Term};
use super::compile::CompileEnv;
use crate::error::{Error, Result};
use crate::sequences::SequenceOracle;

pub type Assignment = BTreeMap<String, u64>;

#[derive(Debug, Clone)]
pub struct Interpreter {
    bound: u64,
    sequences: BTreeMap<String, SequenceOracle>,
    predicates: BTreeMap<String, (Vec<String>, Formula)>,
}

impl Interpreter {
    pub fn new(bound: u64) -> Self {
        Self {
            bound,
            sequences: BTreeMap::new(),
            predicates: BTreeMap::new(),
        }
    }

    /// Uses the environment's DFAOs as sequences and its predicate formulas.
    pub fn from_env(env: &CompileEnv, bound: u64) -> Self {
        let mut out = Self::new(bound);
        for (name, dfao) in env.sequences() {
            out = out.with_sequence(name, SequenceOracle::from_dfao(name.clone(), dfao.clone()));
        }
        for (name, p) in env.predicates() {
            out = out.with_predicate(name, &p.params, p.formula.clone());
        }
        out
    }

    pub fn with_sequence(mut self, name: &str, oracle: SequenceOracle) -> Self {
        self.sequences.insert(name.to_string(), oracle);
        self
    }

    pub fn with_predicate(mut self, name: &str, params: &[String], formula: Formula) -> Self {
        self.predicates
            .insert(name.to_string(), (params.to_vec(), formula));
        self
    }

    pub fn bound(&self) -> u64 {
        self.bound
    }

    pub fn eval(&self, f: &Formula, assignment: &Assignment) -> Result<bool> {
        let mut env = assignment.clone();
        self.formula(f, &mut env)
    }

    fn formula(&self, f: &Formula, env: &mut Assignment) -> Result<bool> {
        Ok(match f {
            Formula::True => true,
            Formula::False => false,
            Formula::Cmp(a, op, b) => op.holds(term(a, env)?, term(b, env)?),
            Formula::SeqCmp(a, op, b) => match (self.lookup(a, env)?, self.lookup(b, env)?) {
                (Some(x), Some(y)) => op.holds(x, y),
                _ => false,
            },
            Formula::SeqConst(a, op, c) => match self.lookup(a, env)? {
                Some(x) => op.holds(x, *c),
                None => false,
            },
            Formula::Pred(name, args) => {
                let (params, body) = self
                    .predicates
                    .get(name)
                    .ok_or_else(|| Error::UnboundPredicate(name.clone()))?;
                if params.len() != args.len() {
                    return Err(Error::PredicateArity {
                        name: name.clone(),
                        expected: params.len(),
                        got: args.len(),
                    });
                }
                let mut inner = Assignment::new();
                for (p, t) in params.iter().zip(args) {
                    let v = term(t, env)?;
                    if v < 0 {
                        return Ok(false);
                    }
                    inner.insert(p.clone(), v as u64);
                }
                self.formula(body, &mut inner)?
            }
            Formula::Not(g) => !self.formula(g, env)?,
            Formula::And(a, b) => self.formula(a, env)? && self.formula(b, env)?,
            Formula::Or(a, b) => self.formula(a, env)? || self.formula(b, env)?,
            Formula::Implies(a, b) => !self.formula(a, env)? || self.formula(b, env)?,
            Formula::Iff(a, b) => self.formula(a, env)? == self.formula(b, env)?,
            Formula::Exists(v, g) | Formula::Forall(v, g) => {
                let universal = matches!(f, Formula::Forall(..));
                let saved = env.get(v).copied();
                let mut result = universal;
                for value in 0..=self.bound {
                    env.insert(v.clone(), value);
                    if self.formula(g, env)? != universal {
                        result = !universal;
                        break;
                    }
                }
                match saved {
                    Some(old) => env.insert(v.clone(), old),
                    None => env.remove(v),
                };
                result
            }
        })
    }

    fn lookup(&self, r: &SeqRef, env: &Assignment) -> Result<Option<u32>> {
        let oracle = self
            .sequences
            .get(&r.seq)
            .ok_or_else(|| Error::UnboundSequence(r.seq.clone()))?;
        let i = term(&r.index, env)?;
        Ok((i >= 0).then(|| oracle.at(i as u64)))
    }
}

fn term(t: &Term, env: &Assignment) -> Result<i128> {
    Ok(match t {
        Term::Var(v) => *env
            .get(v)
            .ok_or_else(|| Error::Invalid(format!("variable `{v}` has no value")))?
            as i128,
        Term::Const(c) => *c as i128,
        Term::Add(a, b) => term(a, env)? + term(b, env)?,
        Term::Sub(a, b) => term(a, env)? - term(b, env)?,
    })
}
