use std::collections::BTreeSet;
use std::fmt;

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum Term {
    Var(String),
    Const(u64),
    Add(Box<Term>, Box<Term>),
    /// Surface syntax only; removed by `eliminate_difference`.
    Sub(Box<Term>, Box<Term>),
}

impl Term {
    pub fn var(name: &str) -> Term {
        Term::Var(name.to_string())
    }

    pub fn has_difference(&self) -> bool {
        match self {
            Term::Var(_) | Term::Const(_) => false,
            Term::Add(a, b) => a.has_difference() || b.has_difference(),
            Term::Sub(..) => true,
        }
    }

    pub fn is_atomic(&self) -> bool {
        matches!(self, Term::Var(_) | Term::Const(_))
    }

    fn collect_vars(&self, out: &mut BTreeSet<String>) {
        match self {
            Term::Var(v) => {
                out.insert(v.clone());
            }
            Term::Const(_) => {}
            Term::Add(a, b) | Term::Sub(a, b) => {
                a.collect_vars(out);
                b.collect_vars(out);
            }
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum CmpOp {
    Eq,
    Ne,
    Lt,
    Le,
    Gt,
    Ge,
}

impl CmpOp {
    pub fn symbol(self) -> &'static str {
        match self {
            CmpOp::Eq => "=",
            CmpOp::Ne => "!=",
            CmpOp::Lt => "<",
            CmpOp::Le => "<=",
            CmpOp::Gt => ">",
            CmpOp::Ge => ">=",
        }
    }

    pub fn holds<T: Ord>(self, a: T, b: T) -> bool {
        match self {
            CmpOp::Eq => a == b,
            CmpOp::Ne => a != b,
            CmpOp::Lt => a < b,
            CmpOp::Le => a <= b,
            CmpOp::Gt => a > b,
            CmpOp::Ge => a >= b,
        }
    }
}

/// Comparison between sequence values: only equality makes sense on symbols.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum SeqOp {
    Eq,
    Ne,
}

impl SeqOp {
    pub fn symbol(self) -> &'static str {
        match self {
            SeqOp::Eq => "=",
            SeqOp::Ne => "!=",
        }
    }

    pub fn holds(self, a: u32, b: u32) -> bool {
        match self {
            SeqOp::Eq => a == b,
            SeqOp::Ne => a != b,
        }
    }
}

/// `seq[index]`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct SeqRef {
    pub seq: String,
    pub index: Term,
}

impl SeqRef {
    pub fn new(seq: &str, index: Term) -> Self {
        Self {
            seq: seq.to_string(),
            index,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum Formula {
    True,
    False,
    Cmp(Term, CmpOp, Term),
    SeqCmp(SeqRef, SeqOp, SeqRef),
    SeqConst(SeqRef, SeqOp, u32),
    /// A named predicate from the compile environment, e.g. `$P(n,i,j)`.
    Pred(String, Vec<Term>),
    Not(Box<Formula>),
    And(Box<Formula>, Box<Formula>),
    Or(Box<Formula>, Box<Formula>),
    Implies(Box<Formula>, Box<Formula>),
    Iff(Box<Formula>, Box<Formula>),
    Exists(String, Box<Formula>),
    Forall(String, Box<Formula>),
}

impl std::ops::Add for Term {
    type Output = Term;

    fn add(self, rhs: Term) -> Term {
        Term::Add(Box::new(self), Box::new(rhs))
    }
}

impl std::ops::Sub for Term {
    type Output = Term;

    fn sub(self, rhs: Term) -> Term {
        Term::Sub(Box::new(self), Box::new(rhs))
    }
}

impl std::ops::Not for Formula {
    type Output = Formula;

    fn not(self) -> Formula {
        Formula::Not(Box::new(self))
    }
}

impl Formula {
    pub fn and(a: Formula, b: Formula) -> Formula {
        Formula::And(Box::new(a), Box::new(b))
    }

    pub fn or(a: Formula, b: Formula) -> Formula {
        Formula::Or(Box::new(a), Box::new(b))
    }

    pub fn implies(a: Formula, b: Formula) -> Formula {
        Formula::Implies(Box::new(a), Box::new(b))
    }

    pub fn exists(v: &str, f: Formula) -> Formula {
        Formula::Exists(v.to_string(), Box::new(f))
    }

    pub fn forall(v: &str, f: Formula) -> Formula {
        Formula::Forall(v.to_string(), Box::new(f))
    }

    pub fn free_vars(&self) -> BTreeSet<String> {
        let mut out = BTreeSet::new();
        self.collect_free(&mut out);
        out
    }

    fn collect_free(&self, out: &mut BTreeSet<String>) {
        match self {
            Formula::True | Formula::False => {}
            Formula::Cmp(a, _, b) => {
                a.collect_vars(out);
                b.collect_vars(out);
            }
            Formula::SeqCmp(a, _, b) => {
                a.index.collect_vars(out);
                b.index.collect_vars(out);
            }
            Formula::SeqConst(a, _, _) => a.index.collect_vars(out),
            Formula::Pred(_, args) => args.iter().for_each(|t| t.collect_vars(out)),
            Formula::Not(f) => f.collect_free(out),
            Formula::And(a, b)
            | Formula::Or(a, b)
            | Formula::Implies(a, b)
            | Formula::Iff(a, b) => {
                a.collect_free(out);
                b.collect_free(out);
            }
            Formula::Exists(v, f) | Formula::Forall(v, f) => {
                let mut inner = BTreeSet::new();
                f.collect_free(&mut inner);
                inner.remove(v);
                out.extend(inner);
            }
        }
    }

    /// Every variable name occurring anywhere, bound or free.
    pub fn all_vars(&self) -> BTreeSet<String> {
        let mut out = BTreeSet::new();
        self.visit(&mut |f| match f {
            Formula::Cmp(a, _, b) => {
                a.collect_vars(&mut out);
                b.collect_vars(&mut out);
            }
            Formula::SeqCmp(a, _, b) => {
                a.index.collect_vars(&mut out);
                b.index.collect_vars(&mut out);
            }
            Formula::SeqConst(a, _, _) => a.index.collect_vars(&mut out),
            Formula::Pred(_, args) => args.iter().for_each(|t| t.collect_vars(&mut out)),
            Formula::Exists(v, _) | Formula::Forall(v, _) => {
                out.insert(v.clone());
            }
            _ => {}
        });
        out
    }

    /// Names of indexed sequences.
    pub fn sequences(&self) -> BTreeSet<String> {
        let mut out = BTreeSet::new();
        self.visit(&mut |f| match f {
            Formula::SeqCmp(a, _, b) => {
                out.insert(a.seq.clone());
                out.insert(b.seq.clone());
            }
            Formula::SeqConst(a, _, _) => {
                out.insert(a.seq.clone());
            }
            _ => {}
        });
        out
    }

    /// Pre-order traversal.
    pub fn visit(&self, f: &mut impl FnMut(&Formula)) {
        f(self);
        match self {
            Formula::Not(g) | Formula::Exists(_, g) | Formula::Forall(_, g) => g.visit(f),
            Formula::And(a, b)
            | Formula::Or(a, b)
            | Formula::Implies(a, b)
            | Formula::Iff(a, b) => {
                a.visit(f);
                b.visit(f);
            }
            _ => {}
        }
    }
}

impl fmt::Display for Term {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Term::Var(v) => f.write_str(v),
            Term::Const(c) => write!(f, "{c}"),
            Term::Add(a, b) | Term::Sub(a, b) => {
                let op = if matches!(self, Term::Add(..)) {
                    '+'
                } else {
                    '-'
                };
                if b.is_atomic() {
                    write!(f, "{a}{op}{b}")
                } else {
                    write!(f, "{a}{op}({b})")
                }
            }
        }
    }
}

impl fmt::Display for SeqRef {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}[{}]", self.seq, self.index)
    }
}

/// Prints in the concrete syntax accepted by the parser, fully parenthesized.
impl fmt::Display for Formula {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Formula::True => f.write_str("true"),
            Formula::False => f.write_str("false"),
            Formula::Cmp(a, op, b) => write!(f, "{a}{}{b}", op.symbol()),
            Formula::SeqCmp(a, op, b) => write!(f, "{a}{}{b}", op.symbol()),
            Formula::SeqConst(a, op, c) => write!(f, "{a}{}{c}", op.symbol()),
            Formula::Pred(name, args) => {
                let args: Vec<String> = args.iter().map(|t| t.to_string()).collect();
                write!(f, "${name}({})", args.join(","))
            }
            Formula::Not(g) => write!(f, "~{g}"),
            Formula::And(a, b) => write!(f, "({a} & {b})"),
            Formula::Or(a, b) => write!(f, "({a} | {b})"),
            Formula::Implies(a, b) => write!(f, "({a} => {b})"),
            Formula::Iff(a, b) => write!(f, "({a} <=> {b})"),
            Formula::Exists(v, g) => write!(f, "(E{v} {g})"),
            Formula::Forall(v, g) => write!(f, "(A{v} {g})"),
        }
    }
}
