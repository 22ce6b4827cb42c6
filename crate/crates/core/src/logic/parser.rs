//! Concrete syntax for predicates.
//!
//! ```text
//! formula  := iff
//! iff      := implies ("<=>" implies)*
//! implies  := or ("=>" implies)?
//! or       := and ("|" and)*
//! and      := unary ("&" unary)*
//! unary    := "~" unary | ("E" | "A") var ("," var)* formula | primary
//! primary  := "(" formula ")" | "true" | "false" | "$" name "(" term ("," term)* ")" | atom
//! atom     := seq "[" term "]" ("=" | "!=") (seq "[" term "]" | number)
//!           | term ("=" | "!=" | "<" | "<=" | ">" | ">=") term
//! term     := factor (("+" | "-") factor)*
//! factor   := var | number | "(" term ")"
//! ```
//!
//! `E` and `A` are the quantifiers and bind as far right as possible, so
//! `At (i<=t & t<=j) => x[t]=x[t+n]` quantifies the whole implication. Variable
//! and sequence names start with a lowercase letter or `_` and may contain
//! letters, digits, `_` and `'`. Rebinding a variable inside the scope of a
//! quantifier over the same name is rejected.

use super::ast::{CmpOp, Formula, SeqOp, SeqRef, Term};
use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq, Eq)]
enum Tok {
    Ident(String),
    Pred(String),
    Number(u64),
    Exists,
    Forall,
    True,
    False,
    LParen,
    RParen,
    LBracket,
    RBracket,
    Comma,
    Plus,
    Minus,
    Cmp(CmpOp),
    And,
    Or,
    Not,
    Implies,
    Iff,
    End,
}

impl Tok {
    fn describe(&self) -> String {
        match self {
            Tok::Ident(s) => format!("`{s}`"),
            Tok::Pred(s) => format!("`${s}`"),
            Tok::Number(n) => format!("`{n}`"),
            Tok::End => "end of input".to_string(),
            other => format!("`{}`", token_text(other)),
        }
    }
}

fn token_text(t: &Tok) -> &'static str {
    match t {
        Tok::Exists => "E",
        Tok::Forall => "A",
        Tok::True => "true",
        Tok::False => "false",
        Tok::LParen => "(",
        Tok::RParen => ")",
        Tok::LBracket => "[",
        Tok::RBracket => "]",
        Tok::Comma => ",",
        Tok::Plus => "+",
        Tok::Minus => "-",
        Tok::Cmp(op) => op.symbol(),
        Tok::And => "&",
        Tok::Or => "|",
        Tok::Not => "~",
        Tok::Implies => "=>",
        Tok::Iff => "<=>",
        _ => "?",
    }
}

#[derive(Debug, Clone)]
struct Spanned {
    tok: Tok,
    line: usize,
    column: usize,
}

fn syntax(line: usize, column: usize, message: impl Into<String>) -> Error {
    Error::Syntax {
        line,
        column,
        message: message.into(),
    }
}

fn is_name_start(c: char) -> bool {
    c.is_ascii_lowercase() || c == '_'
}

fn is_name_char(c: char) -> bool {
    c.is_ascii_alphanumeric() || c == '_' || c == '\''
}

fn lex(text: &str) -> Result<Vec<Spanned>> {
    let chars: Vec<char> = text.chars().collect();
    let mut out = Vec::new();
    let (mut line, mut column) = (1, 1);
    let mut i = 0;
    while i < chars.len() {
        let c = chars[i];
        let (tline, tcol) = (line, column);
        let starts_with = |s: &str| chars[i..].iter().take(s.len()).copied().eq(s.chars());
        let mut advance = 1;
        let tok = match c {
            '\n' => {
                line += 1;
                column = 1;
                i += 1;
                continue;
            }
            c if c.is_whitespace() => {
                column += 1;
                i += 1;
                continue;
            }
            'E' => Tok::Exists,
            'A' => Tok::Forall,
            '(' => Tok::LParen,
            ')' => Tok::RParen,
            '[' => Tok::LBracket,
            ']' => Tok::RBracket,
            ',' => Tok::Comma,
            '+' => Tok::Plus,
            '-' => Tok::Minus,
            '&' => Tok::And,
            '|' => Tok::Or,
            '~' => Tok::Not,
            '<' if starts_with("<=>") => {
                advance = 3;
                Tok::Iff
            }
            '<' if starts_with("<=") => {
                advance = 2;
                Tok::Cmp(CmpOp::Le)
            }
            '<' => Tok::Cmp(CmpOp::Lt),
            '>' if starts_with(">=") => {
                advance = 2;
                Tok::Cmp(CmpOp::Ge)
            }
            '>' => Tok::Cmp(CmpOp::Gt),
            '=' if starts_with("=>") => {
                advance = 2;
                Tok::Implies
            }
            '=' => Tok::Cmp(CmpOp::Eq),
            '!' if starts_with("!=") => {
                advance = 2;
                Tok::Cmp(CmpOp::Ne)
            }
            '$' => {
                let name: String = chars[i + 1..]
                    .iter()
                    .take_while(|&&c| is_name_char(c))
                    .collect();
                if name.is_empty() || !name.starts_with(|c: char| c.is_ascii_alphabetic()) {
                    return Err(syntax(tline, tcol, "expected a predicate name after `$`"));
                }
                advance = 1 + name.chars().count();
                Tok::Pred(name)
            }
            c if c.is_ascii_digit() => {
                let digits: String = chars[i..]
                    .iter()
                    .take_while(|c| c.is_ascii_digit())
                    .collect();
                advance = digits.len();
                let n = digits
                    .parse()
                    .map_err(|_| syntax(tline, tcol, format!("number `{digits}` too large")))?;
                Tok::Number(n)
            }
            c if is_name_start(c) => {
                let name: String = chars[i..]
                    .iter()
                    .take_while(|&&c| is_name_char(c))
                    .collect();
                advance = name.chars().count();
                match name.as_str() {
                    "true" => Tok::True,
                    "false" => Tok::False,
                    _ => Tok::Ident(name),
                }
            }
            other => {
                return Err(syntax(
                    tline,
                    tcol,
                    format!("unexpected character `{other}`"),
                ));
            }
        };
        out.push(Spanned {
            tok,
            line: tline,
            column: tcol,
        });
        i += advance;
        column += advance;
    }
    out.push(Spanned {
        tok: Tok::End,
        line,
        column,
    });
    Ok(out)
}

pub fn parse(text: &str) -> Result<Formula> {
    let tokens = lex(text)?;
    let mut p = Parser {
        tokens,
        pos: 0,
        bound: Vec::new(),
    };
    let f = p.formula()?;
    p.expect(Tok::End)?;
    Ok(f)
}

/// Parses a single term, e.g. for command-line arguments.
pub fn parse_term(text: &str) -> Result<Term> {
    let tokens = lex(text)?;
    let mut p = Parser {
        tokens,
        pos: 0,
        bound: Vec::new(),
    };
    let t = p.term()?;
    p.expect(Tok::End)?;
    Ok(t)
}

struct Parser {
    tokens: Vec<Spanned>,
    pos: usize,
    bound: Vec<String>,
}

impl Parser {
    fn peek(&self) -> &Tok {
        &self.tokens[self.pos].tok
    }

    fn peek_at(&self, offset: usize) -> &Tok {
        let i = (self.pos + offset).min(self.tokens.len() - 1);
        &self.tokens[i].tok
    }

    fn bump(&mut self) -> Tok {
        let t = self.tokens[self.pos].tok.clone();
        if self.pos + 1 < self.tokens.len() {
            self.pos += 1;
        }
        t
    }

    fn error_here(&self, message: impl Into<String>) -> Error {
        let s = &self.tokens[self.pos];
        syntax(s.line, s.column, message)
    }

    fn unexpected(&self, wanted: &str) -> Error {
        self.error_here(format!(
            "expected {wanted}, found {}",
            self.peek().describe()
        ))
    }

    fn expect(&mut self, tok: Tok) -> Result<()> {
        if *self.peek() == tok {
            self.bump();
            Ok(())
        } else if tok == Tok::End {
            Err(self.unexpected("end of input"))
        } else {
            Err(self.unexpected(&format!("`{}`", token_text(&tok))))
        }
    }

    fn formula(&mut self) -> Result<Formula> {
        let mut f = self.implication()?;
        while *self.peek() == Tok::Iff {
            self.bump();
            let g = self.implication()?;
            f = Formula::Iff(Box::new(f), Box::new(g));
        }
        Ok(f)
    }

    fn implication(&mut self) -> Result<Formula> {
        let f = self.disjunction()?;
        if *self.peek() == Tok::Implies {
            self.bump();
            let g = self.implication()?;
            return Ok(Formula::implies(f, g));
        }
        Ok(f)
    }

    fn disjunction(&mut self) -> Result<Formula> {
        let mut f = self.conjunction()?;
        while *self.peek() == Tok::Or {
            self.bump();
            f = Formula::or(f, self.conjunction()?);
        }
        Ok(f)
    }

    fn conjunction(&mut self) -> Result<Formula> {
        let mut f = self.unary()?;
        while *self.peek() == Tok::And {
            self.bump();
            f = Formula::and(f, self.unary()?);
        }
        Ok(f)
    }

    fn unary(&mut self) -> Result<Formula> {
        match self.peek() {
            Tok::Not => {
                self.bump();
                Ok(!self.unary()?)
            }
            Tok::Exists | Tok::Forall => self.quantified(),
            _ => self.primary(),
        }
    }

    fn quantified(&mut self) -> Result<Formula> {
        let universal = self.bump() == Tok::Forall;
        let mut vars = Vec::new();
        loop {
            let Tok::Ident(name) = self.peek().clone() else {
                return Err(self.unexpected("a variable after the quantifier"));
            };
            if self.bound.contains(&name) || vars.contains(&name) {
                return Err(self.error_here(format!(
                    "variable `{name}` is already bound by an enclosing quantifier"
                )));
            }
            self.bump();
            vars.push(name);
            if *self.peek() == Tok::Comma {
                self.bump();
            } else {
                break;
            }
        }
        let depth = self.bound.len();
        self.bound.extend(vars.iter().cloned());
        let body = self.formula();
        self.bound.truncate(depth);
        let mut f = body?;
        for v in vars.iter().rev() {
            f = if universal {
                Formula::forall(v, f)
            } else {
                Formula::exists(v, f)
            };
        }
        Ok(f)
    }

    fn primary(&mut self) -> Result<Formula> {
        match self.peek().clone() {
            Tok::True => {
                self.bump();
                Ok(Formula::True)
            }
            Tok::False => {
                self.bump();
                Ok(Formula::False)
            }
            Tok::Pred(name) => {
                self.bump();
                self.expect(Tok::LParen)?;
                let mut args = vec![self.term()?];
                while *self.peek() == Tok::Comma {
                    self.bump();
                    args.push(self.term()?);
                }
                self.expect(Tok::RParen)?;
                Ok(Formula::Pred(name, args))
            }
            Tok::LParen => {
                // Either a parenthesized formula or an atom whose left term
                // starts with a parenthesis; try the formula first.
                let save = self.pos;
                self.bump();
                let grouped = self.formula().and_then(|f| {
                    self.expect(Tok::RParen)?;
                    Ok(f)
                });
                match grouped {
                    Ok(f) if !self.continues_term() => Ok(f),
                    first => {
                        let far = self.pos;
                        self.pos = save;
                        match self.atom() {
                            Ok(a) => Ok(a),
                            Err(e) => match first {
                                Err(fe) if far >= self.pos => Err(fe),
                                _ => Err(e),
                            },
                        }
                    }
                }
            }
            _ => self.atom(),
        }
    }

    fn continues_term(&self) -> bool {
        matches!(self.peek(), Tok::Plus | Tok::Minus | Tok::Cmp(_))
    }

    fn atom(&mut self) -> Result<Formula> {
        if matches!(self.peek(), Tok::Ident(_)) && *self.peek_at(1) == Tok::LBracket {
            let left = self.seq_ref()?;
            let op = self.seq_op()?;
            return match self.peek().clone() {
                Tok::Number(n) => {
                    self.bump();
                    let symbol =
                        u32::try_from(n).map_err(|_| self.error_here("output symbol too large"))?;
                    Ok(Formula::SeqConst(left, op, symbol))
                }
                Tok::Ident(_) if *self.peek_at(1) == Tok::LBracket => {
                    let right = self.seq_ref()?;
                    Ok(Formula::SeqCmp(left, op, right))
                }
                _ => Err(self.unexpected("an indexed sequence or an output symbol")),
            };
        }
        let left = self.term()?;
        let Tok::Cmp(op) = self.peek().clone() else {
            return Err(self.unexpected("a comparison"));
        };
        self.bump();
        let right = self.term()?;
        Ok(Formula::Cmp(left, op, right))
    }

    fn seq_ref(&mut self) -> Result<SeqRef> {
        let Tok::Ident(seq) = self.bump() else {
            unreachable!("checked by caller")
        };
        self.expect(Tok::LBracket)?;
        let index = self.term()?;
        self.expect(Tok::RBracket)?;
        Ok(SeqRef { seq, index })
    }

    fn seq_op(&mut self) -> Result<SeqOp> {
        match self.peek() {
            Tok::Cmp(CmpOp::Eq) => {
                self.bump();
                Ok(SeqOp::Eq)
            }
            Tok::Cmp(CmpOp::Ne) => {
                self.bump();
                Ok(SeqOp::Ne)
            }
            _ => Err(self.unexpected("`=` or `!=` after an indexed sequence")),
        }
    }

    fn term(&mut self) -> Result<Term> {
        let mut t = self.factor()?;
        loop {
            match self.peek() {
                Tok::Plus => {
                    self.bump();
                    t = t + self.factor()?;
                }
                Tok::Minus => {
                    self.bump();
                    t = t - self.factor()?;
                }
                _ => return Ok(t),
            }
        }
    }

    fn factor(&mut self) -> Result<Term> {
        match self.peek().clone() {
            Tok::Ident(name) => {
                if *self.peek_at(1) == Tok::LBracket {
                    return Err(self.error_here(format!(
                        "indexed sequence `{name}[...]` cannot be used inside arithmetic"
                    )));
                }
                self.bump();
                Ok(Term::Var(name))
            }
            Tok::Number(n) => {
                self.bump();
                Ok(Term::Const(n))
            }
            Tok::LParen => {
                self.bump();
                let t = self.term()?;
                self.expect(Tok::RParen)?;
                Ok(t)
            }
            _ => Err(self.unexpected("a term")),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn v(n: &str) -> Term {
        Term::var(n)
    }

    #[test]
    fn period_formula_shape() {
        let f = parse("At (i<=t & t+n<=j) => x[t]=x[t+n]").unwrap();
        let expected = Formula::forall(
            "t",
            Formula::implies(
                Formula::and(
                    Formula::Cmp(v("i"), CmpOp::Le, v("t")),
                    Formula::Cmp(v("t") + v("n"), CmpOp::Le, v("j")),
                ),
                Formula::SeqCmp(
                    SeqRef::new("x", v("t")),
                    SeqOp::Eq,
                    SeqRef::new("x", v("t") + v("n")),
                ),
            ),
        );
        assert_eq!(f, expected);
    }

    #[test]
    fn range_syntax_rejected() {
        let err = parse("x[i..j] = x[i]").unwrap_err();
        assert_eq!(
            err,
            Error::Syntax {
                line: 1,
                column: 4,
                message: "unexpected character `.`".into()
            }
        );
    }

    #[test]
    fn unbalanced_parenthesis_column() {
        match parse("(x[n]=1 & n<3").unwrap_err() {
            Error::Syntax { line, column, .. } => assert_eq!((line, column), (1, 14)),
            e => panic!("{e}"),
        }
        match parse("x[n]=1)").unwrap_err() {
            Error::Syntax { column, .. } => assert_eq!(column, 7),
            e => panic!("{e}"),
        }
    }

    #[test]
    fn error_position_on_second_line() {
        match parse("Et\n  t <").unwrap_err() {
            Error::Syntax { line, column, .. } => assert_eq!((line, column), (2, 6)),
            e => panic!("{e}"),
        }
    }

    #[test]
    fn parenthesized_term_starts_atom() {
        let f = parse("(i+n)+1 <= j").unwrap();
        assert_eq!(
            f,
            Formula::Cmp(v("i") + v("n") + Term::Const(1), CmpOp::Le, v("j"))
        );
    }

    #[test]
    fn quantifier_lists_and_primes() {
        let f = parse("Ei,j $LP(n,i,j) & n' < n").unwrap();
        match f {
            Formula::Exists(i, inner) => {
                assert_eq!(i, "i");
                assert!(matches!(*inner, Formula::Exists(ref j, _) if j == "j"));
            }
            other => panic!("{other:?}"),
        }
        assert!(parse("An' n' <= n").is_ok());
    }

    #[test]
    fn shadowing_rejected() {
        let err = parse("Et (t < 3 & Et t = 1)").unwrap_err();
        assert!(matches!(err, Error::Syntax { column: 14, .. }), "{err}");
        // Sequential reuse is fine.
        assert!(parse("(Et t = 1) & (Et t = 2)").is_ok());
    }

    #[test]
    fn precedence() {
        let f = parse("~a=1 & b=2 | c=3 => d=4").unwrap();
        let atom = |s: &str, c| Formula::Cmp(v(s), CmpOp::Eq, Term::Const(c));
        assert_eq!(
            f,
            Formula::implies(
                Formula::or(Formula::and(!atom("a", 1), atom("b", 2)), atom("c", 3)),
                atom("d", 4)
            )
        );
    }

    #[test]
    fn sequence_constant_atom() {
        let f = parse("x[n] != 1").unwrap();
        assert_eq!(f, Formula::SeqConst(SeqRef::new("x", v("n")), SeqOp::Ne, 1));
        assert!(parse("x[n] < x[m]").is_err());
    }

    #[test]
    fn display_round_trip() {
        for text in [
            "At (i<=t & t<=j-n) => x[t]=x[t+n]",
            "Ei Ej (i+n <= j-1 & $LP(n,i,j))",
            "~(a-(b+c) = 0) <=> true",
            "x[n]=1 | y[m+2] != x[m]",
        ] {
            let f = parse(text).unwrap();
            assert_eq!(parse(&f.to_string()).unwrap(), f, "{text}");
        }
    }
}
