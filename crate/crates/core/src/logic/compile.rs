//! Formula to automaton compilation.

use std::collections::{BTreeMap, BTreeSet, HashMap};

use super::ast::{CmpOp, Formula, SeqOp, Term};
use super::parser::parse;
use super::rewrite::{eliminate_difference, flatten_terms};
use crate::dfa::{BoolOp, Dfa, StateId};
use crate::dfao::Dfao;
use crate::error::{Error, Result};
use crate::nfa;
use crate::numeration;

/// A named predicate usable as `$name(args)`.
#[derive(Debug, Clone)]
pub struct Predicate {
    pub params: Vec<String>,
    pub formula: Formula,
    /// Compiled over (a subset of) `params`.
    pub dfa: Dfa,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct CompileOptions {
    /// Minimize after every connective and quantifier, not only after projections.
    pub minimize_eagerly: bool,
}

impl Default for CompileOptions {
    fn default() -> Self {
        Self {
            minimize_eagerly: true,
        }
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct CompileStats {
    /// Largest automaton built at any step, in states.
    pub largest_intermediate: usize,
    /// Number of automata built (atoms, connectives, projections).
    pub steps: usize,
}

impl CompileStats {
    fn record(&mut self, a: &Dfa) {
        self.largest_intermediate = self.largest_intermediate.max(a.state_count());
        self.steps += 1;
    }
}

/// Sequences and predicates available to formulas, all over one base.
#[derive(Debug, Clone)]
pub struct CompileEnv {
    base: u32,
    sequences: BTreeMap<String, Dfao>,
    predicates: BTreeMap<String, Predicate>,
    options: CompileOptions,
}

impl CompileEnv {
    pub fn new(base: u32) -> Result<Self> {
        if base < 2 {
            return Err(Error::InvalidBase(base));
        }
        Ok(Self {
            base,
            sequences: BTreeMap::new(),
            predicates: BTreeMap::new(),
            options: CompileOptions::default(),
        })
    }

    pub fn base(&self) -> u32 {
        self.base
    }

    pub fn options(&self) -> CompileOptions {
        self.options
    }

    pub fn set_options(&mut self, options: CompileOptions) {
        self.options = options;
    }

    pub fn add_sequence(&mut self, name: &str, dfao: Dfao) -> Result<()> {
        if dfao.base() != self.base {
            return Err(Error::IncompatibleBase(self.base, dfao.base()));
        }
        self.sequences.insert(name.to_string(), dfao);
        Ok(())
    }

    pub fn with_sequence(mut self, name: &str, dfao: Dfao) -> Result<Self> {
        self.add_sequence(name, dfao)?;
        Ok(self)
    }

    pub fn sequence(&self, name: &str) -> Option<&Dfao> {
        self.sequences.get(name)
    }

    pub fn sequences(&self) -> &BTreeMap<String, Dfao> {
        &self.sequences
    }

    pub fn predicate(&self, name: &str) -> Option<&Predicate> {
        self.predicates.get(name)
    }

    pub fn predicates(&self) -> &BTreeMap<String, Predicate> {
        &self.predicates
    }

    /// Compiles `text` and binds it as `$name(params...)`.
    pub fn define(&mut self, name: &str, params: &[&str], text: &str) -> Result<&Predicate> {
        let formula = parse(text)?;
        self.define_formula(name, params, formula)
    }

    pub fn define_formula(
        &mut self,
        name: &str,
        params: &[&str],
        formula: Formula,
    ) -> Result<&Predicate> {
        let params: Vec<String> = params.iter().map(|p| p.to_string()).collect();
        if let Some(extra) = formula
            .free_vars()
            .into_iter()
            .find(|v| !params.contains(v))
        {
            return Err(Error::Invalid(format!(
                "predicate `{name}` has free variable `{extra}` outside its parameters"
            )));
        }
        let dfa = self.compile(&formula)?;
        self.insert_predicate(
            name,
            Predicate {
                params,
                formula,
                dfa,
            },
        )
    }

    /// Binds an already compiled automaton, e.g. one loaded from a cache.
    pub fn insert_predicate(&mut self, name: &str, predicate: Predicate) -> Result<&Predicate> {
        if let Some(t) = predicate
            .dfa
            .tracks()
            .iter()
            .find(|t| !predicate.params.contains(t))
        {
            return Err(Error::UnknownTrack(t.clone()));
        }
        if predicate.dfa.base() != self.base {
            return Err(Error::IncompatibleBase(self.base, predicate.dfa.base()));
        }
        self.predicates.insert(name.to_string(), predicate);
        Ok(&self.predicates[name])
    }

    pub fn compile(&self, f: &Formula) -> Result<Dfa> {
        Ok(self.compile_with_stats(f)?.0)
    }

    pub fn compile_str(&self, text: &str) -> Result<Dfa> {
        self.compile(&parse(text)?)
    }

    /// Minimal automaton over the free variables of `f`, tracks sorted.
    pub fn compile_with_stats(&self, f: &Formula) -> Result<(Dfa, CompileStats)> {
        self.check_bindings(f)?;
        let normal = flatten_terms(&eliminate_difference(f));
        let mut c = Compiler {
            env: self,
            stats: CompileStats::default(),
            temp: 0,
        };
        let a = c.compile(&normal)?;
        let free: Vec<String> = f.free_vars().into_iter().collect();
        let a = a.cylindrify(&free)?.minimize();
        c.stats.record(&a);
        Ok((a, c.stats))
    }

    fn check_bindings(&self, f: &Formula) -> Result<()> {
        if let Some(s) = f
            .sequences()
            .into_iter()
            .find(|s| !self.sequences.contains_key(s))
        {
            return Err(Error::UnboundSequence(s));
        }
        let mut err = None;
        f.visit(&mut |g| {
            if let Formula::Pred(name, args) = g {
                let e = match self.predicates.get(name) {
                    None => Some(Error::UnboundPredicate(name.clone())),
                    Some(p) if p.params.len() != args.len() => Some(Error::PredicateArity {
                        name: name.clone(),
                        expected: p.params.len(),
                        got: args.len(),
                    }),
                    _ => None,
                };
                if err.is_none() {
                    err = e;
                }
            }
        });
        err.map_or(Ok(()), Err)
    }
}

struct Compiler<'a> {
    env: &'a CompileEnv,
    stats: CompileStats,
    temp: usize,
}

impl Compiler<'_> {
    fn base(&self) -> u32 {
        self.env.base
    }

    /// Track names that cannot clash with parsed variables.
    fn temp_track(&mut self) -> String {
        self.temp += 1;
        format!("#{}", self.temp)
    }

    fn finish(&mut self, a: Dfa, force: bool) -> Dfa {
        let a = if force || self.env.options.minimize_eagerly {
            a.minimize()
        } else {
            a
        };
        self.stats.record(&a);
        a
    }

    fn compile(&mut self, f: &Formula) -> Result<Dfa> {
        match f {
            Formula::True => Dfa::universal(self.base(), vec![]),
            Formula::False => Dfa::empty(self.base(), vec![]),
            Formula::Cmp(a, op, b) => self.comparison(a, *op, b),
            Formula::SeqCmp(a, op, b) => {
                let (Term::Var(u), Term::Var(v)) = (&a.index, &b.index) else {
                    unreachable!("flattened index");
                };
                let s1 = self.sequence(&a.seq)?;
                let s2 = self.sequence(&b.seq)?;
                let out = seq_atom_automaton(s1, u, *op, s2, v)?;
                Ok(self.finish(out, false))
            }
            Formula::SeqConst(a, op, symbol) => {
                let Term::Var(u) = &a.index else {
                    unreachable!("flattened index");
                };
                let set = self.sequence(&a.seq)?.symbol_set(*symbol, u);
                let out = match op {
                    SeqOp::Eq => set,
                    SeqOp::Ne => set.complement(),
                };
                Ok(self.finish(out, true))
            }
            Formula::Pred(name, args) => self.predicate(name, args),
            Formula::Not(g) => {
                let a = self.compile(g)?.complement();
                Ok(self.finish(a, false))
            }
            Formula::And(a, b) => self.binary(a, b, BoolOp::And),
            Formula::Or(a, b) => self.binary(a, b, BoolOp::Or),
            Formula::Implies(a, b) => self.binary(a, b, BoolOp::Implies),
            Formula::Iff(a, b) => self.binary(a, b, BoolOp::Iff),
            Formula::Exists(v, g) => {
                let a = self.compile(g)?;
                self.exists(a, v)
            }
            Formula::Forall(v, g) => {
                let a = self.compile(g)?.complement();
                let e = self.exists(a, v)?;
                Ok(self.finish(e.complement(), false))
            }
        }
    }

    fn sequence(&self, name: &str) -> Result<&Dfao> {
        self.env
            .sequences
            .get(name)
            .ok_or_else(|| Error::UnboundSequence(name.to_string()))
    }

    fn binary(&mut self, a: &Formula, b: &Formula, op: BoolOp) -> Result<Dfa> {
        let a = self.compile(a)?;
        let b = self.compile(b)?;
        let out = a.product(&b, op)?;
        Ok(self.finish(out, false))
    }

    /// Projection, then determinization, padding normalization and minimization.
    fn exists(&mut self, a: Dfa, var: &str) -> Result<Dfa> {
        if a.track_index(var).is_none() {
            // The domain is nonempty, so a vacuous quantifier changes nothing.
            return Ok(a);
        }
        let projected = nfa::project(&a, var)?.determinize();
        self.stats.record(&projected);
        Ok(self.finish(projected.pad_normalize(), true))
    }

    fn predicate(&mut self, name: &str, args: &[Term]) -> Result<Dfa> {
        let p = self
            .env
            .predicates
            .get(name)
            .ok_or_else(|| Error::UnboundPredicate(name.to_string()))?;
        if p.params.len() != args.len() {
            return Err(Error::PredicateArity {
                name: name.to_string(),
                expected: p.params.len(),
                got: args.len(),
            });
        }
        let mut renames = HashMap::new();
        let mut vars = BTreeSet::new();
        for (param, arg) in p.params.iter().zip(args) {
            let Term::Var(v) = arg else {
                unreachable!("flattened argument");
            };
            renames.insert(param.clone(), v.clone());
            vars.insert(v.clone());
        }
        let renamed = p.dfa.rename_tracks(&renames)?;
        let vars: Vec<String> = vars.into_iter().collect();
        let out = renamed.cylindrify(&vars)?;
        Ok(self.finish(out, true))
    }

    /// `a ⋈ b` with each side a variable, a constant or a binary sum; sums and
    /// constants live on temporary tracks that are projected away at the end.
    fn comparison(&mut self, a: &Term, op: CmpOp, b: &Term) -> Result<Dfa> {
        let mut parts = Vec::new();
        let mut temps = Vec::new();
        let left = self.slot(a, &mut parts, &mut temps)?;
        let right = self.slot(b, &mut parts, &mut temps)?;
        let base = self.base();
        let (relation, x, y) = match op {
            CmpOp::Eq => (numeration::eq_automaton(base)?, &left, &right),
            CmpOp::Ne => (numeration::eq_automaton(base)?.complement(), &left, &right),
            CmpOp::Lt => (numeration::lt_automaton(base)?, &left, &right),
            CmpOp::Le => (numeration::leq_automaton(base)?, &left, &right),
            CmpOp::Gt => (numeration::lt_automaton(base)?, &right, &left),
            CmpOp::Ge => (numeration::leq_automaton(base)?, &right, &left),
        };
        let mut out = relation.rename_tracks(&renaming(&[("x", x), ("y", y)]))?;
        for p in parts {
            out = out.product(&p, BoolOp::And)?.minimize();
        }
        for t in temps {
            out = self.exists(out, &t)?;
        }
        Ok(self.finish(out, true))
    }

    fn slot(&mut self, t: &Term, parts: &mut Vec<Dfa>, temps: &mut Vec<String>) -> Result<String> {
        match t {
            Term::Var(v) => Ok(v.clone()),
            Term::Const(c) => {
                let track = self.temp_track();
                let a = numeration::const_automaton(*c, self.base())?
                    .rename_tracks(&renaming(&[("x", &track)]))?;
                parts.push(a);
                temps.push(track.clone());
                Ok(track)
            }
            Term::Add(x, y) => {
                let x = self.slot(x, parts, temps)?;
                let y = self.slot(y, parts, temps)?;
                let z = self.temp_track();
                let a = numeration::add_automaton(self.base())?.rename_tracks(&renaming(&[
                    ("x", &x),
                    ("y", &y),
                    ("z", &z),
                ]))?;
                parts.push(a);
                temps.push(z.clone());
                Ok(z)
            }
            Term::Sub(..) => unreachable!("differences are eliminated before compilation"),
        }
    }
}

fn renaming(pairs: &[(&str, &str)]) -> HashMap<String, String> {
    pairs
        .iter()
        .map(|(a, b)| (a.to_string(), b.to_string()))
        .collect()
}

/// `s1[var1] ⋈ s2[var2]`: both DFAOs run in lockstep, each on its own track.
///
/// When `var1 == var2` the two tracks are identified, giving an arity-1
/// automaton.
pub fn seq_atom_automaton(s1: &Dfao, var1: &str, op: SeqOp, s2: &Dfao, var2: &str) -> Result<Dfa> {
    if s1.base() != s2.base() {
        return Err(Error::IncompatibleBase(s1.base(), s2.base()));
    }
    let (a, b) = ("#a".to_string(), "#b".to_string());
    let m = s2.state_count() as StateId;
    let pair = |q: StateId| (q / m, q % m);
    let lockstep = Dfa::from_fn(
        s1.base(),
        vec![a.clone(), b.clone()],
        s1.state_count() * s2.state_count(),
        s1.start() * m + s2.start(),
        |q| {
            let (p, r) = pair(q);
            op.holds(s1.output(p), s2.output(r))
        },
        |q, d| {
            let (p, r) = pair(q);
            s1.next(p, d[0]) * m + s2.next(r, d[1])
        },
    )?;
    let out = lockstep
        .rename_tracks(&renaming(&[(&a, var1), (&b, var2)]))?
        .pad_normalize()
        .minimize();
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::logic::interp::Interpreter;
    use crate::sequences::{thue_morse_value, Builtin};

    fn tm_env() -> CompileEnv {
        CompileEnv::new(2)
            .unwrap()
            .with_sequence("x", Builtin::ThueMorse.dfao())
            .unwrap()
    }

    #[test]
    fn tautological_sentence() {
        let a = tm_env().compile_str("Et x[t]=x[t]").unwrap();
        assert_eq!(a.arity(), 0);
        assert!(a.run(&[]).unwrap());
        assert!(!tm_env()
            .compile_str("Et x[t]!=x[t]")
            .unwrap()
            .run(&[])
            .unwrap());
        assert!(tm_env().compile_str("En x[n]=1").unwrap().run(&[]).unwrap());
    }

    #[test]
    fn symbol_atom_matches_popcount() {
        let a = tm_env().compile_str("x[n]=1").unwrap();
        for n in 0..64 {
            assert_eq!(a.run(&[n]).unwrap(), n.count_ones() % 2 == 1, "n={n}");
        }
    }

    #[test]
    fn period_atoms_on_thue_morse() {
        let a = tm_env()
            .compile_str("At (i<=t & t<=j-n) => x[t]=x[t+n]")
            .unwrap();
        assert_eq!(a.tracks(), ["i", "j", "n"]);
        // Tracks are (i, j, n).
        assert!(!a.run(&[0, 1, 1]).unwrap());
        assert!(!a.run(&[0, 2, 2]).unwrap());
        assert!(a.run(&[1, 4, 3]).unwrap());
        assert!(a.run(&[1, 2, 1]).unwrap());
    }

    #[test]
    fn seq_atom_pairs() {
        let t = Builtin::ThueMorse.dfao();
        let a = seq_atom_automaton(&t, "u", SeqOp::Eq, &t, "v").unwrap();
        for u in 0..128u64 {
            for v in 0..128u64 {
                let expected = thue_morse_value(u) == thue_morse_value(v);
                assert_eq!(a.run(&[u, v]).unwrap(), expected);
            }
        }
        let diag = seq_atom_automaton(&t, "u", SeqOp::Eq, &t, "u").unwrap();
        assert!(diag.is_universal());
        assert_eq!(diag.tracks(), ["u"]);
    }

    #[test]
    fn mixed_sequences_on_one_variable() {
        let env = tm_env()
            .with_sequence("r", Builtin::RudinShapiro.dfao())
            .unwrap();
        let a = env.compile_str("x[n] = r[n]").unwrap();
        let r = Builtin::RudinShapiro.oracle();
        for n in 0..256 {
            assert_eq!(a.run(&[n]).unwrap(), thue_morse_value(n) == r.at(n));
        }
    }

    #[test]
    fn comparisons_with_constants_and_sums() {
        let env = CompileEnv::new(3).unwrap();
        let interp = Interpreter::new(8);
        for text in [
            "x+2 < y",
            "x+y+1 = z",
            "x >= 5",
            "x != y+y",
            "3 = 3",
            "x-y = 2",
            "x+1 > y-1",
        ] {
            let f = parse(text).unwrap();
            let a = env.compile(&f).unwrap();
            let vars: Vec<String> = f.free_vars().into_iter().collect();
            for point in 0..(20u64.pow(vars.len() as u32)) {
                let mut rest = point;
                let values: Vec<u64> = vars
                    .iter()
                    .map(|_| {
                        let v = rest % 20;
                        rest /= 20;
                        v
                    })
                    .collect();
                let assignment = vars.iter().cloned().zip(values.iter().copied()).collect();
                assert_eq!(
                    a.run(&values).unwrap(),
                    interp.eval(&f, &assignment).unwrap(),
                    "{text} at {values:?}"
                );
            }
        }
    }

    #[test]
    fn forall_is_not_exists_not() {
        let env = tm_env();
        let direct = env.compile_str("At (t < n => x[t] = 0)").unwrap();
        let rewritten = env.compile_str("~Et ~(t < n => x[t] = 0)").unwrap();
        assert!(direct.equivalent(&rewritten).unwrap());
    }

    #[test]
    fn quantifier_order_irrelevant() {
        let env = tm_env();
        let a = env
            .compile_str("Eu Ev (n <= u & u < v & x[u] != x[v])")
            .unwrap();
        let b = env
            .compile_str("Ev Eu (n <= u & u < v & x[u] != x[v])")
            .unwrap();
        assert!(a.equivalent(&b).unwrap());
    }

    #[test]
    fn predicates_expand_with_renaming() {
        let mut env = tm_env();
        env.define("Sq", &["i", "n"], "At (t < n => x[i+t] = x[i+n+t])")
            .unwrap();
        // Arguments swapped relative to the parameter names, repeated, and non-variable.
        let a = env.compile_str("$Sq(n, i)").unwrap();
        let b = env.compile_str("At (t < i => x[n+t] = x[n+i+t])").unwrap();
        assert!(a.equivalent(&b).unwrap());
        let c = env.compile_str("$Sq(m, m)").unwrap();
        assert_eq!(c.tracks(), ["m"]);
        let d = env.compile_str("$Sq(j+1, 2)").unwrap();
        let e = env
            .compile_str("At (t < 2 => x[j+1+t] = x[j+3+t])")
            .unwrap();
        assert!(d.equivalent(&e).unwrap());
    }

    #[test]
    fn binding_errors() {
        let env = tm_env();
        assert_eq!(
            env.compile_str("y[n]=1").unwrap_err(),
            Error::UnboundSequence("y".into())
        );
        assert_eq!(
            env.compile_str("$Q(n)").unwrap_err(),
            Error::UnboundPredicate("Q".into())
        );
        let mut env = tm_env();
        env.define("One", &["n"], "n = 1").unwrap();
        assert!(matches!(
            env.compile_str("$One(n, m)").unwrap_err(),
            Error::PredicateArity {
                expected: 1,
                got: 2,
                ..
            }
        ));
        assert!(env.define("Bad", &["n"], "n < m").is_err());
        let three = crate::dfao::Dfao::new(3, 0, vec![0], vec![0, 0, 0]).unwrap();
        assert!(matches!(
            tm_env().with_sequence("z", three),
            Err(Error::IncompatibleBase(2, 3))
        ));
    }

    #[test]
    fn lazy_minimization_same_language() {
        let mut env = tm_env();
        let text = "At (i<=t & t+n<=j) => x[t]=x[t+n]";
        let eager = env.compile_str(text).unwrap();
        env.set_options(CompileOptions {
            minimize_eagerly: false,
        });
        let (lazy, stats) = env.compile_with_stats(&parse(text).unwrap()).unwrap();
        assert!(eager.equivalent(&lazy).unwrap());
        assert!(stats.largest_intermediate >= eager.state_count());
    }
}
