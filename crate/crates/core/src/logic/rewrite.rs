//! Syntactic normalization ahead of compilation.
//!
//! [`eliminate_difference`] removes subtraction, [`flatten_terms`] brings every
//! atom into three-address form. Both introduce fresh existential variables
//! whose names avoid every name already used in the formula.

use std::collections::BTreeSet;

use super::ast::{CmpOp, Formula, SeqRef, Term};

/// Fresh variable names `{prefix}{counter}` not clashing with `used`.
struct Fresh {
    prefix: &'static str,
    used: BTreeSet<String>,
    counter: usize,
}

impl Fresh {
    fn new(prefix: &'static str, f: &Formula) -> Self {
        Self {
            prefix,
            used: f.all_vars(),
            counter: 0,
        }
    }

    fn next(&mut self) -> String {
        loop {
            let name = format!("{}{}", self.prefix, self.counter);
            self.counter += 1;
            if self.used.insert(name.clone()) {
                return name;
            }
        }
    }
}

/// A term as `Σ pos - Σ neg + constant`, variables in order of appearance.
#[derive(Default)]
struct Linear {
    pos: Vec<Term>,
    neg: Vec<Term>,
    constant: i128,
}

impl Linear {
    fn of(t: &Term) -> Linear {
        let mut out = Linear::default();
        out.collect(t, true);
        out
    }

    fn collect(&mut self, t: &Term, positive: bool) {
        match t {
            Term::Var(_) => {
                if positive {
                    self.pos.push(t.clone());
                } else {
                    self.neg.push(t.clone());
                }
            }
            Term::Const(c) => {
                let c = *c as i128;
                self.constant += if positive { c } else { -c };
            }
            Term::Add(a, b) => {
                self.collect(a, positive);
                self.collect(b, positive);
            }
            Term::Sub(a, b) => {
                self.collect(a, positive);
                self.collect(b, !positive);
            }
        }
    }
}

/// Left-nested sum of the terms plus a constant; `0` when everything is empty.
fn sum(terms: Vec<Term>, constant: u128) -> Term {
    let mut items = terms;
    if constant > 0 || items.is_empty() {
        items.push(Term::Const(constant as u64));
    }
    let mut it = items.into_iter();
    let first = it.next().expect("nonempty");
    it.fold(first, |acc, t| acc + t)
}

/// Removes every `Term::Sub`.
///
/// A comparison `a ⋈ b` whose sides contain differences has all subtracted
/// terms moved to the opposite side, so `t <= j-n` becomes `t+n <= j`; this is
/// exact under integer semantics. An index or predicate argument `a - b`
/// becomes a fresh `u` with `u + b = a`, so the atom is false when `b > a`.
pub fn eliminate_difference(f: &Formula) -> Formula {
    let mut fresh = Fresh::new("_d", f);
    elim(f, &mut fresh)
}

fn elim(f: &Formula, fresh: &mut Fresh) -> Formula {
    match f {
        Formula::True | Formula::False => f.clone(),
        Formula::Cmp(a, op, b) => {
            if !a.has_difference() && !b.has_difference() {
                return f.clone();
            }
            let (l, r) = (Linear::of(a), Linear::of(b));
            let mut left = l.pos;
            left.extend(r.neg);
            let mut right = r.pos;
            right.extend(l.neg);
            let net = l.constant - r.constant;
            let (cl, cr) = if net >= 0 {
                (net as u128, 0)
            } else {
                (0, (-net) as u128)
            };
            Formula::Cmp(sum(left, cl), *op, sum(right, cr))
        }
        Formula::SeqCmp(a, op, b) => {
            let mut defs = Vec::new();
            let a = SeqRef::new(&a.seq, index_without_difference(&a.index, fresh, &mut defs));
            let b = SeqRef::new(&b.seq, index_without_difference(&b.index, fresh, &mut defs));
            wrap_defs(defs, Formula::SeqCmp(a, *op, b))
        }
        Formula::SeqConst(a, op, c) => {
            let mut defs = Vec::new();
            let a = SeqRef::new(&a.seq, index_without_difference(&a.index, fresh, &mut defs));
            wrap_defs(defs, Formula::SeqConst(a, *op, *c))
        }
        Formula::Pred(name, args) => {
            let mut defs = Vec::new();
            let args = args
                .iter()
                .map(|t| index_without_difference(t, fresh, &mut defs))
                .collect();
            wrap_defs(defs, Formula::Pred(name.clone(), args))
        }
        Formula::Not(g) => !elim(g, fresh),
        Formula::And(a, b) => Formula::and(elim(a, fresh), elim(b, fresh)),
        Formula::Or(a, b) => Formula::or(elim(a, fresh), elim(b, fresh)),
        Formula::Implies(a, b) => Formula::implies(elim(a, fresh), elim(b, fresh)),
        Formula::Iff(a, b) => Formula::Iff(Box::new(elim(a, fresh)), Box::new(elim(b, fresh))),
        Formula::Exists(v, g) => Formula::exists(v, elim(g, fresh)),
        Formula::Forall(v, g) => Formula::forall(v, elim(g, fresh)),
    }
}

fn index_without_difference(
    t: &Term,
    fresh: &mut Fresh,
    defs: &mut Vec<(String, Formula)>,
) -> Term {
    if !t.has_difference() {
        return t.clone();
    }
    let lin = Linear::of(t);
    let mut neg = lin.neg;
    let (cp, cn) = if lin.constant >= 0 {
        (lin.constant as u128, 0)
    } else {
        (0, (-lin.constant) as u128)
    };
    if neg.is_empty() && cn == 0 {
        return sum(lin.pos, cp);
    }
    let u = fresh.next();
    neg.insert(0, Term::Var(u.clone()));
    defs.push((
        u.clone(),
        Formula::Cmp(sum(neg, cn), CmpOp::Eq, sum(lin.pos, cp)),
    ));
    Term::Var(u)
}

/// `∃u1 ∃u2 ... (def1 ∧ (def2 ∧ ... atom))`.
fn wrap_defs(defs: Vec<(String, Formula)>, atom: Formula) -> Formula {
    let body = defs
        .iter()
        .rev()
        .fold(atom, |acc, (_, def)| Formula::and(def.clone(), acc));
    defs.iter()
        .rev()
        .fold(body, |acc, (u, _)| Formula::exists(u, acc))
}

/// Three-address form: comparison sides are a variable, a constant or a
/// binary sum of those; sequence indices and predicate arguments are
/// variables. Nested sums get fresh existentials, e.g. `i+n+1 <= j` becomes
/// `Eu (i+n=u & u+1 <= j)`. Expects a difference-free formula.
pub fn flatten_terms(f: &Formula) -> Formula {
    let mut fresh = Fresh::new("_f", f);
    flat(f, &mut fresh)
}

fn flat(f: &Formula, fresh: &mut Fresh) -> Formula {
    match f {
        Formula::True | Formula::False => f.clone(),
        Formula::Cmp(a, op, b) => {
            let mut defs = Vec::new();
            let a = flat_side(a, fresh, &mut defs);
            let b = flat_side(b, fresh, &mut defs);
            wrap_defs(defs, Formula::Cmp(a, *op, b))
        }
        Formula::SeqCmp(a, op, b) => {
            let mut defs = Vec::new();
            let a = SeqRef::new(&a.seq, flat_var(&a.index, fresh, &mut defs));
            let b = SeqRef::new(&b.seq, flat_var(&b.index, fresh, &mut defs));
            wrap_defs(defs, Formula::SeqCmp(a, *op, b))
        }
        Formula::SeqConst(a, op, c) => {
            let mut defs = Vec::new();
            let a = SeqRef::new(&a.seq, flat_var(&a.index, fresh, &mut defs));
            wrap_defs(defs, Formula::SeqConst(a, *op, *c))
        }
        Formula::Pred(name, args) => {
            let mut defs = Vec::new();
            let args = args.iter().map(|t| flat_var(t, fresh, &mut defs)).collect();
            wrap_defs(defs, Formula::Pred(name.clone(), args))
        }
        Formula::Not(g) => !flat(g, fresh),
        Formula::And(a, b) => Formula::and(flat(a, fresh), flat(b, fresh)),
        Formula::Or(a, b) => Formula::or(flat(a, fresh), flat(b, fresh)),
        Formula::Implies(a, b) => Formula::implies(flat(a, fresh), flat(b, fresh)),
        Formula::Iff(a, b) => Formula::Iff(Box::new(flat(a, fresh)), Box::new(flat(b, fresh))),
        Formula::Exists(v, g) => Formula::exists(v, flat(g, fresh)),
        Formula::Forall(v, g) => Formula::forall(v, flat(g, fresh)),
    }
}

/// An atomic term or a sum of two atomic terms.
fn flat_side(t: &Term, fresh: &mut Fresh, defs: &mut Vec<(String, Formula)>) -> Term {
    match t {
        Term::Add(a, b) => flat_atomic(a, fresh, defs) + flat_atomic(b, fresh, defs),
        Term::Sub(..) => panic!("flatten_terms expects a difference-free formula"),
        _ => t.clone(),
    }
}

fn flat_atomic(t: &Term, fresh: &mut Fresh, defs: &mut Vec<(String, Formula)>) -> Term {
    if t.is_atomic() {
        return t.clone();
    }
    let side = flat_side(t, fresh, defs);
    let u = fresh.next();
    defs.push((
        u.clone(),
        Formula::Cmp(side, CmpOp::Eq, Term::Var(u.clone())),
    ));
    Term::Var(u)
}

fn flat_var(t: &Term, fresh: &mut Fresh, defs: &mut Vec<(String, Formula)>) -> Term {
    if matches!(t, Term::Var(_)) {
        return t.clone();
    }
    let side = flat_side(t, fresh, defs);
    let u = fresh.next();
    defs.push((
        u.clone(),
        Formula::Cmp(side, CmpOp::Eq, Term::Var(u.clone())),
    ));
    Term::Var(u)
}

/// Whether a formula is in the form [`flatten_terms`] produces.
pub fn is_flat(f: &Formula) -> bool {
    let side_ok = |t: &Term| match t {
        Term::Add(a, b) => a.is_atomic() && b.is_atomic(),
        Term::Sub(..) => false,
        _ => true,
    };
    let mut ok = true;
    f.visit(&mut |g| match g {
        Formula::Cmp(a, _, b) => ok &= side_ok(a) && side_ok(b),
        Formula::SeqCmp(a, _, b) => {
            ok &= matches!(a.index, Term::Var(_)) && matches!(b.index, Term::Var(_))
        }
        Formula::SeqConst(a, _, _) => ok &= matches!(a.index, Term::Var(_)),
        Formula::Pred(_, args) => ok &= args.iter().all(|t| matches!(t, Term::Var(_))),
        _ => {}
    });
    ok
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::logic::parse;

    fn rewrite(text: &str) -> Formula {
        eliminate_difference(&parse(text).unwrap())
    }

    #[test]
    fn difference_moves_across_comparison() {
        assert_eq!(rewrite("t <= j-n"), parse("t+n <= j").unwrap());
        assert_eq!(rewrite("j-n < t"), parse("j < t+n").unwrap());
        assert_eq!(rewrite("i+n <= j-1"), parse("i+n+1 <= j").unwrap());
        assert_eq!(rewrite("n-1 = 0"), parse("n = 1").unwrap());
    }

    #[test]
    fn difference_in_index_becomes_witness() {
        assert_eq!(
            rewrite("x[j-n]=x[j]"),
            parse("E_d0 (_d0+n=j & x[_d0]=x[j])").unwrap()
        );
        assert_eq!(rewrite("x[n+2-1]=1"), parse("x[n+1]=1").unwrap());
    }

    #[test]
    fn difference_free_unchanged() {
        let f = parse("At (i<=t & t+n<=j) => x[t]=x[t+n]").unwrap();
        assert_eq!(eliminate_difference(&f), f);
    }

    #[test]
    fn fresh_names_avoid_existing() {
        let f = rewrite("E_d0 x[_d0-1] = 1");
        assert_eq!(f, parse("E_d0 E_d1 (_d1+1=_d0 & x[_d1]=1)").unwrap());
    }

    #[test]
    fn flatten_examples() {
        let flat = |s: &str| flatten_terms(&parse(s).unwrap());
        assert_eq!(
            flat("x[t+n]=x[t]"),
            parse("E_f0 (t+n=_f0 & x[_f0]=x[t])").unwrap()
        );
        assert_eq!(
            flat("i+n+1 <= j"),
            parse("E_f0 (i+n=_f0 & _f0+1 <= j)").unwrap()
        );
        for already in ["i+n <= j", "x[t]=x[u] & $P(n,i,j)", "Et t = 3"] {
            assert_eq!(flat(already), parse(already).unwrap());
        }
    }

    #[test]
    fn flatten_produces_flat_formulas() {
        for text in [
            "a+(b+c)+d = e",
            "x[3] = 1",
            "$P(n+1, i, 2)",
            "x[((a+b)+c)+d] != y[a]",
        ] {
            let f = flatten_terms(&parse(text).unwrap());
            assert!(is_flat(&f), "{f}");
        }
        assert!(!is_flat(&parse("a+b+c = d").unwrap()));
    }
}
