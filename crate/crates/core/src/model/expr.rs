//! Rule expressions: comparisons over integer arithmetic on variables,
//! combined with boolean connectives.
//!
//! ```text
//! rule    := iff
//! iff     := implies (("<->" | "<=>" | "iff") implies)*
//! implies := or (("->" | "=>" | "implies") implies)?
//! or      := and (("or" | "||" | "|") and)*
//! and     := not (("and" | "&&" | "&") not)*
//! not     := ("not" | "!") not | cmp
//! cmp     := sum (("=" | "==" | "!=" | "<>" | "<" | "<=" | ">" | ">=") sum)?
//! sum     := product (("+" | "-") product)*
//! product := unary ("*" unary)*
//! unary   := "-" unary | atom
//! atom    := integer | identifier | 'label' | "label" | true | false | "(" rule ")"
//! ```
//!
//! A variable evaluates to its value index. A bare identifier that is not a
//! variable, or a quoted string, is resolved as a value label of the
//! variable on the other side of a comparison.

use std::collections::BTreeSet;

use super::{ModelError, Result, Variable};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CmpOp {
    Eq,
    Ne,
    Lt,
    Le,
    Gt,
    Ge,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ArithOp {
    Add,
    Sub,
    Mul,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LogicOp {
    And,
    Or,
    Implies,
    Iff,
}

/// A resolved, type-checked expression over model variable indices.
#[derive(Debug, Clone, PartialEq)]
pub enum Expr {
    Int(i64),
    Bool(bool),
    Var(usize),
    Neg(Box<Expr>),
    Arith(ArithOp, Box<Expr>, Box<Expr>),
    Cmp(CmpOp, Box<Expr>, Box<Expr>),
    Not(Box<Expr>),
    Logic(LogicOp, Box<Expr>, Box<Expr>),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Ty {
    Int,
    Bool,
}

impl Expr {
    /// Parse a boolean rule against the declared variables.
    pub fn parse(text: &str, variables: &[Variable]) -> Result<Expr> {
        let tokens = lex(text)?;
        let mut parser = Parser { tokens, pos: 0, text };
        let raw = parser.iff()?;
        if parser.pos < parser.tokens.len() {
            return Err(parser.error_here("unexpected trailing input"));
        }
        let expr = resolve(&raw, variables)?;
        match expr.ty()? {
            Ty::Bool => Ok(expr),
            Ty::Int => Err(ModelError::Type("a rule must be boolean, found an integer expression".into())),
        }
    }

    /// Sorted distinct variables mentioned by the expression.
    pub fn variables(&self) -> Vec<usize> {
        let mut out = BTreeSet::new();
        self.collect_vars(&mut out);
        out.into_iter().collect()
    }

    fn collect_vars(&self, out: &mut BTreeSet<usize>) {
        match self {
            Expr::Int(_) | Expr::Bool(_) => {}
            Expr::Var(v) => {
                out.insert(*v);
            }
            Expr::Neg(e) | Expr::Not(e) => e.collect_vars(out),
            Expr::Arith(_, l, r) | Expr::Cmp(_, l, r) | Expr::Logic(_, l, r) => {
                l.collect_vars(out);
                r.collect_vars(out);
            }
        }
    }

    pub(crate) fn remap(&self, new_index: &[usize]) -> Expr {
        let b = |e: &Expr| Box::new(e.remap(new_index));
        match self {
            Expr::Int(i) => Expr::Int(*i),
            Expr::Bool(x) => Expr::Bool(*x),
            Expr::Var(v) => Expr::Var(new_index[*v]),
            Expr::Neg(e) => Expr::Neg(b(e)),
            Expr::Not(e) => Expr::Not(b(e)),
            Expr::Arith(op, l, r) => Expr::Arith(*op, b(l), b(r)),
            Expr::Cmp(op, l, r) => Expr::Cmp(*op, b(l), b(r)),
            Expr::Logic(op, l, r) => Expr::Logic(*op, b(l), b(r)),
        }
    }

    fn ty(&self) -> Result<Ty> {
        let expect = |e: &Expr, want: Ty, ctx: &str| -> Result<()> {
            let got = e.ty()?;
            if got == want {
                Ok(())
            } else {
                Err(ModelError::Type(format!("{ctx} expects {want:?} operands, found {got:?}")))
            }
        };
        match self {
            Expr::Int(_) | Expr::Var(_) => Ok(Ty::Int),
            Expr::Bool(_) => Ok(Ty::Bool),
            Expr::Neg(e) => {
                expect(e, Ty::Int, "negation")?;
                Ok(Ty::Int)
            }
            Expr::Arith(_, l, r) => {
                expect(l, Ty::Int, "arithmetic")?;
                expect(r, Ty::Int, "arithmetic")?;
                Ok(Ty::Int)
            }
            Expr::Cmp(_, l, r) => {
                expect(l, Ty::Int, "comparison")?;
                expect(r, Ty::Int, "comparison")?;
                Ok(Ty::Bool)
            }
            Expr::Not(e) => {
                expect(e, Ty::Bool, "`not`")?;
                Ok(Ty::Bool)
            }
            Expr::Logic(_, l, r) => {
                expect(l, Ty::Bool, "connective")?;
                expect(r, Ty::Bool, "connective")?;
                Ok(Ty::Bool)
            }
        }
    }

    fn int(&self, value_of: &dyn Fn(usize) -> usize) -> i64 {
        match self {
            Expr::Int(i) => *i,
            Expr::Var(v) => value_of(*v) as i64,
            Expr::Neg(e) => e.int(value_of).wrapping_neg(),
            Expr::Arith(op, l, r) => {
                let (a, b) = (l.int(value_of), r.int(value_of));
                match op {
                    ArithOp::Add => a.wrapping_add(b),
                    ArithOp::Sub => a.wrapping_sub(b),
                    ArithOp::Mul => a.wrapping_mul(b),
                }
            }
            _ => unreachable!("type-checked integer expression"),
        }
    }

    /// Truth value under a total lookup on the expression's variables.
    pub fn holds(&self, value_of: &dyn Fn(usize) -> usize) -> bool {
        match self {
            Expr::Bool(b) => *b,
            Expr::Not(e) => !e.holds(value_of),
            Expr::Cmp(op, l, r) => {
                let (a, b) = (l.int(value_of), r.int(value_of));
                match op {
                    CmpOp::Eq => a == b,
                    CmpOp::Ne => a != b,
                    CmpOp::Lt => a < b,
                    CmpOp::Le => a <= b,
                    CmpOp::Gt => a > b,
                    CmpOp::Ge => a >= b,
                }
            }
            Expr::Logic(op, l, r) => match op {
                LogicOp::And => l.holds(value_of) && r.holds(value_of),
                LogicOp::Or => l.holds(value_of) || r.holds(value_of),
                LogicOp::Implies => !l.holds(value_of) || r.holds(value_of),
                LogicOp::Iff => l.holds(value_of) == r.holds(value_of),
            },
            _ => unreachable!("type-checked boolean expression"),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
enum Tok {
    Int(i64),
    Ident(String),
    Str(String),
    Sym(&'static str),
}

fn lex(text: &str) -> Result<Vec<(Tok, usize)>> {
    const SYMBOLS: [&str; 22] = [
        "<=>", "<->", "<=", "<>", "=>", "==", "->", ">=", "!=", "&&", "||", "≤", "≥", "≠", "⇒", "⇔", "∧", "∨", "¬",
        "<", ">", "=",
    ];
    const SINGLE: [&str; 8] = ["-", "+", "*", "(", ")", "!", "&", "|"];
    let mut out = Vec::new();
    let mut chars = text.char_indices().peekable();
    'outer: while let Some(&(pos, c)) = chars.peek() {
        if c.is_whitespace() {
            chars.next();
            continue;
        }
        if c.is_ascii_digit() {
            let mut end = pos;
            while let Some(&(p, d)) = chars.peek() {
                if d.is_ascii_digit() {
                    end = p + d.len_utf8();
                    chars.next();
                } else {
                    break;
                }
            }
            let value = text[pos..end].parse::<i64>().map_err(|_| syntax(text, pos, "integer literal out of range"))?;
            out.push((Tok::Int(value), pos));
            continue;
        }
        if c.is_alphabetic() || c == '_' {
            let mut end = pos;
            while let Some(&(p, d)) = chars.peek() {
                if d.is_alphanumeric() || d == '_' || d == '.' {
                    end = p + d.len_utf8();
                    chars.next();
                } else {
                    break;
                }
            }
            out.push((Tok::Ident(text[pos..end].to_string()), pos));
            continue;
        }
        if c == '\'' || c == '"' {
            chars.next();
            let start = pos + 1;
            for (p, d) in chars.by_ref() {
                if d == c {
                    out.push((Tok::Str(text[start..p].to_string()), pos));
                    continue 'outer;
                }
            }
            return Err(syntax(text, pos, "unterminated quoted label"));
        }
        let rest = &text[pos..];
        for sym in SYMBOLS.iter().chain(SINGLE.iter()) {
            if rest.starts_with(sym) {
                out.push((Tok::Sym(sym), pos));
                for _ in 0..sym.chars().count() {
                    chars.next();
                }
                continue 'outer;
            }
        }
        return Err(syntax(text, pos, &format!("unexpected character `{c}`")));
    }
    Ok(out)
}

fn syntax(text: &str, byte_pos: usize, message: &str) -> ModelError {
    let offset = text[..byte_pos.min(text.len())].chars().count();
    ModelError::Syntax {
        location: format!("offset {offset} of `{text}`"),
        message: message.to_string(),
    }
}

#[derive(Debug, Clone)]
enum Raw {
    Int(i64),
    Bool(bool),
    Ident(String),
    Str(String),
    Neg(Box<Raw>),
    Arith(ArithOp, Box<Raw>, Box<Raw>),
    Cmp(CmpOp, Box<Raw>, Box<Raw>),
    Not(Box<Raw>),
    Logic(LogicOp, Box<Raw>, Box<Raw>),
}

struct Parser<'a> {
    tokens: Vec<(Tok, usize)>,
    pos: usize,
    text: &'a str,
}

impl Parser<'_> {
    fn peek(&self) -> Option<&Tok> {
        self.tokens.get(self.pos).map(|(t, _)| t)
    }

    fn error_here(&self, message: &str) -> ModelError {
        let at = self.tokens.get(self.pos).map_or(self.text.len(), |(_, p)| *p);
        syntax(self.text, at, message)
    }

    fn eat_any(&mut self, syms: &[&str], words: &[&str]) -> bool {
        let hit = match self.peek() {
            Some(Tok::Sym(s)) => syms.contains(s),
            Some(Tok::Ident(w)) => words.iter().any(|k| w.eq_ignore_ascii_case(k)),
            _ => false,
        };
        if hit {
            self.pos += 1;
        }
        hit
    }

    fn iff(&mut self) -> Result<Raw> {
        let mut lhs = self.implies()?;
        while self.eat_any(&["<->", "<=>", "⇔"], &["iff"]) {
            let rhs = self.implies()?;
            lhs = Raw::Logic(LogicOp::Iff, Box::new(lhs), Box::new(rhs));
        }
        Ok(lhs)
    }

    fn implies(&mut self) -> Result<Raw> {
        let lhs = self.or()?;
        if self.eat_any(&["->", "=>", "⇒"], &["implies"]) {
            let rhs = self.implies()?;
            return Ok(Raw::Logic(LogicOp::Implies, Box::new(lhs), Box::new(rhs)));
        }
        Ok(lhs)
    }

    fn or(&mut self) -> Result<Raw> {
        let mut lhs = self.and()?;
        while self.eat_any(&["||", "|", "∨"], &["or"]) {
            let rhs = self.and()?;
            lhs = Raw::Logic(LogicOp::Or, Box::new(lhs), Box::new(rhs));
        }
        Ok(lhs)
    }

    fn and(&mut self) -> Result<Raw> {
        let mut lhs = self.not()?;
        while self.eat_any(&["&&", "&", "∧"], &["and"]) {
            let rhs = self.not()?;
            lhs = Raw::Logic(LogicOp::And, Box::new(lhs), Box::new(rhs));
        }
        Ok(lhs)
    }

    fn not(&mut self) -> Result<Raw> {
        if self.eat_any(&["!", "¬"], &["not"]) {
            return Ok(Raw::Not(Box::new(self.not()?)));
        }
        self.cmp()
    }

    fn cmp(&mut self) -> Result<Raw> {
        let lhs = self.sum()?;
        let op = match self.peek() {
            Some(Tok::Sym(s)) => match *s {
                "=" | "==" => Some(CmpOp::Eq),
                "!=" | "<>" | "≠" => Some(CmpOp::Ne),
                "<" => Some(CmpOp::Lt),
                "<=" | "≤" => Some(CmpOp::Le),
                ">" => Some(CmpOp::Gt),
                ">=" | "≥" => Some(CmpOp::Ge),
                _ => None,
            },
            _ => None,
        };
        match op {
            Some(op) => {
                self.pos += 1;
                let rhs = self.sum()?;
                Ok(Raw::Cmp(op, Box::new(lhs), Box::new(rhs)))
            }
            None => Ok(lhs),
        }
    }

    fn sum(&mut self) -> Result<Raw> {
        let mut lhs = self.product()?;
        loop {
            let op = if self.eat_any(&["+"], &[]) {
                ArithOp::Add
            } else if self.eat_any(&["-"], &[]) {
                ArithOp::Sub
            } else {
                return Ok(lhs);
            };
            let rhs = self.product()?;
            lhs = Raw::Arith(op, Box::new(lhs), Box::new(rhs));
        }
    }

    fn product(&mut self) -> Result<Raw> {
        let mut lhs = self.unary()?;
        while self.eat_any(&["*"], &[]) {
            let rhs = self.unary()?;
            lhs = Raw::Arith(ArithOp::Mul, Box::new(lhs), Box::new(rhs));
        }
        Ok(lhs)
    }

    fn unary(&mut self) -> Result<Raw> {
        if self.eat_any(&["-"], &[]) {
            return Ok(Raw::Neg(Box::new(self.unary()?)));
        }
        self.atom()
    }

    fn atom(&mut self) -> Result<Raw> {
        let Some((tok, _)) = self.tokens.get(self.pos).cloned() else {
            return Err(self.error_here("unexpected end of expression"));
        };
        match tok {
            Tok::Int(i) => {
                self.pos += 1;
                Ok(Raw::Int(i))
            }
            Tok::Str(s) => {
                self.pos += 1;
                Ok(Raw::Str(s))
            }
            Tok::Ident(w) => {
                let lower = w.to_ascii_lowercase();
                if ["and", "or", "not", "implies", "iff"].contains(&lower.as_str()) {
                    return Err(self.error_here(&format!("unexpected keyword `{w}`")));
                }
                self.pos += 1;
                match lower.as_str() {
                    "true" => Ok(Raw::Bool(true)),
                    "false" => Ok(Raw::Bool(false)),
                    _ => Ok(Raw::Ident(w)),
                }
            }
            Tok::Sym("(") => {
                self.pos += 1;
                let inner = self.iff()?;
                if !self.eat_any(&[")"], &[]) {
                    return Err(self.error_here("expected `)`"));
                }
                Ok(inner)
            }
            Tok::Sym(s) => Err(self.error_here(&format!("unexpected `{s}`"))),
        }
    }
}

fn var_index(name: &str, variables: &[Variable]) -> Option<usize> {
    variables.iter().position(|v| v.name == name)
}

fn resolve(raw: &Raw, variables: &[Variable]) -> Result<Expr> {
    let b = |r: &Raw| resolve(r, variables).map(Box::new);
    Ok(match raw {
        Raw::Int(i) => Expr::Int(*i),
        Raw::Bool(x) => Expr::Bool(*x),
        Raw::Ident(name) => match var_index(name, variables) {
            Some(v) => Expr::Var(v),
            None => return Err(ModelError::UndeclaredVariable(name.clone())),
        },
        Raw::Str(label) => {
            return Err(ModelError::Type(format!(
                "label '{label}' must be compared with a variable"
            )))
        }
        Raw::Neg(e) => Expr::Neg(b(e)?),
        Raw::Not(e) => Expr::Not(b(e)?),
        Raw::Arith(op, l, r) => Expr::Arith(*op, b(l)?, b(r)?),
        Raw::Logic(op, l, r) => Expr::Logic(*op, b(l)?, b(r)?),
        Raw::Cmp(op, l, r) => {
            let (lhs, rhs) = resolve_comparison(l, r, variables)?;
            // equality between booleans is equivalence
            if lhs.ty()? == Ty::Bool && rhs.ty()? == Ty::Bool {
                let iff = Expr::Logic(LogicOp::Iff, Box::new(lhs), Box::new(rhs));
                return match op {
                    CmpOp::Eq => Ok(iff),
                    CmpOp::Ne => Ok(Expr::Not(Box::new(iff))),
                    _ => Err(ModelError::Type("ordering comparison between booleans".into())),
                };
            }
            Expr::Cmp(*op, Box::new(lhs), Box::new(rhs))
        }
    })
}

fn label_operand(raw: &Raw, variables: &[Variable]) -> Option<String> {
    match raw {
        Raw::Str(s) => Some(s.clone()),
        Raw::Ident(name) if var_index(name, variables).is_none() => Some(name.clone()),
        _ => None,
    }
}

fn resolve_comparison(l: &Raw, r: &Raw, variables: &[Variable]) -> Result<(Expr, Expr)> {
    let as_var = |raw: &Raw| match raw {
        Raw::Ident(name) => var_index(name, variables),
        _ => None,
    };
    let lookup = |var: usize, label: String| -> Result<Expr> {
        variables[var]
            .value_of(&label)
            .map(|a| Expr::Int(a as i64))
            .ok_or_else(|| ModelError::ValueOutOfDomain {
                variable: variables[var].name.clone(),
                value: label,
            })
    };
    if let (Some(v), Some(label)) = (as_var(l), label_operand(r, variables)) {
        return Ok((Expr::Var(v), lookup(v, label)?));
    }
    if let (Some(label), Some(v)) = (label_operand(l, variables), as_var(r)) {
        return Ok((lookup(v, label)?, Expr::Var(v)));
    }
    Ok((resolve(l, variables)?, resolve(r, variables)?))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn vars() -> Vec<Variable> {
        vec![
            Variable::new("x1", ["black", "white", "red", "blue"]),
            Variable::new("x2", ["small", "medium", "large"]),
            Variable::new("x3", ["MIB", "STW"]),
        ]
    }

    fn eval(text: &str, values: [usize; 3]) -> bool {
        Expr::parse(text, &vars()).unwrap().holds(&|v| values[v])
    }

    #[test]
    fn labels_and_indices_agree() {
        for x1 in 0..4 {
            for x3 in 0..2 {
                let by_label = eval("x3 = MIB -> x1 = black", [x1, 0, x3]);
                let by_index = eval("x3=0 => x1=0", [x1, 0, x3]);
                let quoted = eval("x3 == 'MIB' implies \"black\" == x1", [x1, 0, x3]);
                assert_eq!(by_label, by_index);
                assert_eq!(by_label, quoted);
                assert_eq!(by_label, x3 != 0 || x1 == 0);
            }
        }
    }

    #[test]
    fn precedence() {
        // and binds tighter than or; arithmetic tighter than comparison
        assert!(eval("x1 = 0 or x1 = 1 and x2 = 2", [0, 0, 0]));
        assert!(!eval("(x1 = 0 or x1 = 1) and x2 = 2", [0, 0, 0]));
        assert!(eval("x1 + 2 * x2 = 5", [1, 2, 0]));
        assert!(eval("-x1 + 3 >= 0", [3, 0, 0]));
        assert!(eval("not x1 < 2", [3, 0, 0]));
        // implication is right associative
        assert!(eval("x1 = 0 -> x2 = 0 -> x3 = 0", [1, 1, 1]));
        assert!(eval("(x1 = 0) = (x2 = 0)", [1, 1, 0]));
        assert!(eval("x1 != x2 iff x3 = STW", [1, 0, 1]));
    }

    #[test]
    fn errors() {
        assert_eq!(
            Expr::parse("x9 = 1", &vars()),
            Err(ModelError::UndeclaredVariable("x9".into()))
        );
        assert!(matches!(
            Expr::parse("x1 = green", &vars()),
            Err(ModelError::ValueOutOfDomain { .. })
        ));
        assert!(matches!(Expr::parse("x1 = (", &vars()), Err(ModelError::Syntax { .. })));
        assert!(matches!(Expr::parse("x1 + 1", &vars()), Err(ModelError::Type(_))));
        assert!(matches!(Expr::parse("x1 and x2", &vars()), Err(ModelError::Type(_))));
        assert!(matches!(Expr::parse("x1 = 1 x2", &vars()), Err(ModelError::Syntax { .. })));
        assert!(matches!(Expr::parse("x1 = 'abc", &vars()), Err(ModelError::Syntax { .. })));
    }

    #[test]
    fn scope_is_sorted_and_distinct() {
        let e = Expr::parse("x3 = 1 -> x1 + x3 < 2", &vars()).unwrap();
        assert_eq!(e.variables(), vec![0, 2]);
    }
}
