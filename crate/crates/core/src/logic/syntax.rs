//! Abstract syntax, lexer and recursive-descent parser for formulas.

use std::fmt;

use super::LogicError;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct Pos {
    pub line: usize,
    pub col: usize,
}

impl fmt::Display for Pos {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}", self.line, self.col)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum TypeExpr {
    Named(String),
    One,
    Omega,
    Prod(Box<TypeExpr>, Box<TypeExpr>),
    Power(Box<TypeExpr>),
}

impl fmt::Display for TypeExpr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            TypeExpr::Named(n) => write!(f, "{n}"),
            TypeExpr::One => write!(f, "1"),
            TypeExpr::Omega => write!(f, "Omega"),
            TypeExpr::Prod(a, b) => match **b {
                TypeExpr::Prod(..) => write!(f, "{a}*({b})"),
                _ => write!(f, "{a}*{b}"),
            },
            TypeExpr::Power(a) => write!(f, "P({a})"),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Connective {
    And,
    Or,
    Implies,
}

impl Connective {
    pub fn keyword(self) -> &'static str {
        match self {
            Connective::And => "and",
            Connective::Or => "or",
            Connective::Implies => "implies",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Quantifier {
    Forall,
    Exists,
}

impl Quantifier {
    pub fn keyword(self) -> &'static str {
        match self {
            Quantifier::Forall => "forall",
            Quantifier::Exists => "exists",
        }
    }
}

#[derive(Debug, Clone)]
pub struct Expr {
    pub kind: ExprKind,
    pub pos: Pos,
}

#[derive(Debug, Clone)]
pub enum ExprKind {
    Var {
        name: String,
        ty: Option<TypeExpr>,
    },
    Const(bool),
    Apply {
        func: String,
        arg: Box<Expr>,
    },
    Pair(Box<Expr>, Box<Expr>),
    Eq(Box<Expr>, Box<Expr>),
    Mem(Box<Expr>, Box<Expr>),
    Binary(Connective, Box<Expr>, Box<Expr>),
    Not(Box<Expr>),
    Quant {
        q: Quantifier,
        var: String,
        ty: TypeExpr,
        body: Box<Expr>,
    },
    Compr {
        var: String,
        ty: TypeExpr,
        body: Box<Expr>,
    },
}

impl Expr {
    pub fn new(kind: ExprKind, pos: Pos) -> Self {
        Expr { kind, pos }
    }

    pub fn var(name: &str, ty: Option<TypeExpr>) -> Self {
        Expr::new(ExprKind::Var { name: name.into(), ty }, Pos::default())
    }

    pub fn constant(b: bool) -> Self {
        Expr::new(ExprKind::Const(b), Pos::default())
    }

    pub fn apply(func: &str, arg: Expr) -> Self {
        Expr::new(
            ExprKind::Apply {
                func: func.into(),
                arg: Box::new(arg),
            },
            Pos::default(),
        )
    }

    pub fn eq(a: Expr, b: Expr) -> Self {
        Expr::new(ExprKind::Eq(Box::new(a), Box::new(b)), Pos::default())
    }

    pub fn mem(a: Expr, b: Expr) -> Self {
        Expr::new(ExprKind::Mem(Box::new(a), Box::new(b)), Pos::default())
    }

    pub fn binary(c: Connective, a: Expr, b: Expr) -> Self {
        Expr::new(ExprKind::Binary(c, Box::new(a), Box::new(b)), Pos::default())
    }

    pub fn negate(a: Expr) -> Self {
        Expr::new(ExprKind::Not(Box::new(a)), Pos::default())
    }

    pub fn quant(q: Quantifier, var: &str, ty: TypeExpr, body: Expr) -> Self {
        Expr::new(
            ExprKind::Quant {
                q,
                var: var.into(),
                ty,
                body: Box::new(body),
            },
            Pos::default(),
        )
    }

    pub fn compr(var: &str, ty: TypeExpr, body: Expr) -> Self {
        Expr::new(
            ExprKind::Compr {
                var: var.into(),
                ty,
                body: Box::new(body),
            },
            Pos::default(),
        )
    }

    /// Replaces free occurrences of variable `from` by `to`.
    pub fn rename(&self, from: &str, to: &str) -> Expr {
        let r = |e: &Expr| Box::new(e.rename(from, to));
        let kind = match &self.kind {
            ExprKind::Var { name, ty } if name == from => ExprKind::Var {
                name: to.into(),
                ty: ty.clone(),
            },
            ExprKind::Var { .. } | ExprKind::Const(_) => self.kind.clone(),
            ExprKind::Apply { func, arg } => ExprKind::Apply {
                func: func.clone(),
                arg: r(arg),
            },
            ExprKind::Pair(a, b) => ExprKind::Pair(r(a), r(b)),
            ExprKind::Eq(a, b) => ExprKind::Eq(r(a), r(b)),
            ExprKind::Mem(a, b) => ExprKind::Mem(r(a), r(b)),
            ExprKind::Binary(c, a, b) => ExprKind::Binary(*c, r(a), r(b)),
            ExprKind::Not(a) => ExprKind::Not(r(a)),
            ExprKind::Quant { var, .. } | ExprKind::Compr { var, .. } if var == from => self.kind.clone(),
            ExprKind::Quant { q, var, ty, body } => ExprKind::Quant {
                q: *q,
                var: var.clone(),
                ty: ty.clone(),
                body: r(body),
            },
            ExprKind::Compr { var, ty, body } => ExprKind::Compr {
                var: var.clone(),
                ty: ty.clone(),
                body: r(body),
            },
        };
        Expr::new(kind, self.pos)
    }
}

impl fmt::Display for Expr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &self.kind {
            ExprKind::Var { name, ty: Some(t) } => write!(f, "{name}:{t}"),
            ExprKind::Var { name, ty: None } => write!(f, "{name}"),
            ExprKind::Const(b) => write!(f, "{b}"),
            ExprKind::Apply { func, arg } => write!(f, "{func}({arg})"),
            ExprKind::Pair(a, b) => write!(f, "({a}, {b})"),
            ExprKind::Eq(a, b) => write!(f, "({a} = {b})"),
            ExprKind::Mem(a, b) => write!(f, "mem({a}, {b})"),
            ExprKind::Binary(c, a, b) => write!(f, "({a} {} {b})", c.keyword()),
            ExprKind::Not(a) => write!(f, "not({a})"),
            ExprKind::Quant { q, var, ty, body } => write!(f, "({} {var}:{ty}. {body})", q.keyword()),
            ExprKind::Compr { var, ty, body } => write!(f, "{{ {var}:{ty} | {body} }}"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
enum Tok {
    Ident(String),
    One,
    LParen,
    RParen,
    LBrace,
    RBrace,
    Comma,
    Dot,
    Colon,
    Bar,
    Equals,
    Star,
    Eof,
}

impl fmt::Display for Tok {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Tok::Ident(s) => write!(f, "'{s}'"),
            Tok::One => write!(f, "'1'"),
            Tok::LParen => write!(f, "'('"),
            Tok::RParen => write!(f, "')'"),
            Tok::LBrace => write!(f, "'{{'"),
            Tok::RBrace => write!(f, "'}}'"),
            Tok::Comma => write!(f, "','"),
            Tok::Dot => write!(f, "'.'"),
            Tok::Colon => write!(f, "':'"),
            Tok::Bar => write!(f, "'|'"),
            Tok::Equals => write!(f, "'='"),
            Tok::Star => write!(f, "'*'"),
            Tok::Eof => write!(f, "end of input"),
        }
    }
}

fn lex(src: &str) -> Result<Vec<(Tok, Pos)>, LogicError> {
    let mut out = Vec::new();
    let (mut line, mut col) = (1, 1);
    let mut chars = src.chars().peekable();
    while let Some(&ch) = chars.peek() {
        let pos = Pos { line, col };
        let mut bump = |chars: &mut std::iter::Peekable<std::str::Chars<'_>>| {
            let c = chars.next();
            if c == Some('\n') {
                line += 1;
                col = 1;
            } else {
                col += 1;
            }
        };
        if ch.is_whitespace() {
            bump(&mut chars);
            continue;
        }
        if ch.is_alphabetic() || ch == '_' {
            let mut s = String::new();
            while let Some(&c) = chars.peek() {
                if c.is_alphanumeric() || c == '_' || c == '\'' {
                    s.push(c);
                    bump(&mut chars);
                } else {
                    break;
                }
            }
            out.push((Tok::Ident(s), pos));
            continue;
        }
        let tok = match ch {
            '1' => Tok::One,
            '(' => Tok::LParen,
            ')' => Tok::RParen,
            '{' => Tok::LBrace,
            '}' => Tok::RBrace,
            ',' => Tok::Comma,
            '.' => Tok::Dot,
            ':' => Tok::Colon,
            '|' => Tok::Bar,
            '=' => Tok::Equals,
            '*' => Tok::Star,
            other => {
                return Err(LogicError::Syntax {
                    pos,
                    message: format!("unexpected character '{other}'"),
                })
            }
        };
        bump(&mut chars);
        out.push((tok, pos));
    }
    out.push((Tok::Eof, Pos { line, col }));
    Ok(out)
}

const KEYWORDS: &[&str] = &[
    "forall", "exists", "not", "and", "or", "implies", "mem", "true", "false", "Omega",
];

struct Parser {
    toks: Vec<(Tok, Pos)>,
    at: usize,
}

impl Parser {
    fn peek(&self) -> &Tok {
        &self.toks[self.at].0
    }

    fn peek2(&self) -> &Tok {
        &self.toks[(self.at + 1).min(self.toks.len() - 1)].0
    }

    fn pos(&self) -> Pos {
        self.toks[self.at].1
    }

    fn next(&mut self) -> (Tok, Pos) {
        let t = self.toks[self.at].clone();
        if self.at + 1 < self.toks.len() {
            self.at += 1;
        }
        t
    }

    fn error<T>(&self, message: String) -> Result<T, LogicError> {
        Err(LogicError::Syntax {
            pos: self.pos(),
            message,
        })
    }

    fn expect(&mut self, tok: Tok) -> Result<Pos, LogicError> {
        if *self.peek() == tok {
            Ok(self.next().1)
        } else {
            self.error(format!("expected {tok}, found {}", self.peek()))
        }
    }

    fn is_kw(&self, kw: &str) -> bool {
        matches!(self.peek(), Tok::Ident(s) if s == kw)
    }

    fn ident(&mut self) -> Result<String, LogicError> {
        match self.peek().clone() {
            Tok::Ident(s) if !KEYWORDS.contains(&s.as_str()) => {
                self.next();
                Ok(s)
            }
            other => self.error(format!("expected an identifier, found {other}")),
        }
    }

    fn ty(&mut self) -> Result<TypeExpr, LogicError> {
        let mut t = self.ty_atom()?;
        while *self.peek() == Tok::Star {
            self.next();
            let r = self.ty_atom()?;
            t = TypeExpr::Prod(Box::new(t), Box::new(r));
        }
        Ok(t)
    }

    fn ty_atom(&mut self) -> Result<TypeExpr, LogicError> {
        match self.peek().clone() {
            Tok::One => {
                self.next();
                Ok(TypeExpr::One)
            }
            Tok::LParen => {
                self.next();
                let t = self.ty()?;
                self.expect(Tok::RParen)?;
                Ok(t)
            }
            Tok::Ident(s) if s == "Omega" => {
                self.next();
                Ok(TypeExpr::Omega)
            }
            Tok::Ident(s) if s == "P" && *self.peek2() == Tok::LParen => {
                self.next();
                self.next();
                let t = self.ty()?;
                self.expect(Tok::RParen)?;
                Ok(TypeExpr::Power(Box::new(t)))
            }
            Tok::Ident(_) => Ok(TypeExpr::Named(self.ident()?)),
            other => self.error(format!("expected a type, found {other}")),
        }
    }

    fn expr(&mut self) -> Result<Expr, LogicError> {
        if self.is_kw("forall") || self.is_kw("exists") {
            return self.quant();
        }
        self.implies()
    }

    fn quant(&mut self) -> Result<Expr, LogicError> {
        let (tok, pos) = self.next();
        let q = match tok {
            Tok::Ident(s) if s == "forall" => Quantifier::Forall,
            _ => Quantifier::Exists,
        };
        let var = self.ident()?;
        self.expect(Tok::Colon)?;
        let ty = self.ty()?;
        self.expect(Tok::Dot)?;
        let body = self.expr()?;
        Ok(Expr::new(
            ExprKind::Quant {
                q,
                var,
                ty,
                body: Box::new(body),
            },
            pos,
        ))
    }

    fn operand(&mut self, lower: fn(&mut Self) -> Result<Expr, LogicError>) -> Result<Expr, LogicError> {
        if self.is_kw("forall") || self.is_kw("exists") {
            self.quant()
        } else {
            lower(self)
        }
    }

    fn implies(&mut self) -> Result<Expr, LogicError> {
        let lhs = self.or()?;
        if self.is_kw("implies") {
            let pos = self.next().1;
            let rhs = self.operand(Self::implies)?;
            return Ok(Expr::new(
                ExprKind::Binary(Connective::Implies, Box::new(lhs), Box::new(rhs)),
                pos,
            ));
        }
        Ok(lhs)
    }

    fn or(&mut self) -> Result<Expr, LogicError> {
        let mut lhs = self.and()?;
        while self.is_kw("or") {
            let pos = self.next().1;
            let rhs = self.operand(Self::and)?;
            lhs = Expr::new(ExprKind::Binary(Connective::Or, Box::new(lhs), Box::new(rhs)), pos);
        }
        Ok(lhs)
    }

    fn and(&mut self) -> Result<Expr, LogicError> {
        let mut lhs = self.unary()?;
        while self.is_kw("and") {
            let pos = self.next().1;
            let rhs = self.operand(Self::unary)?;
            lhs = Expr::new(ExprKind::Binary(Connective::And, Box::new(lhs), Box::new(rhs)), pos);
        }
        Ok(lhs)
    }

    fn unary(&mut self) -> Result<Expr, LogicError> {
        if self.is_kw("not") {
            let pos = self.next().1;
            let inner = self.operand(Self::unary)?;
            return Ok(Expr::new(ExprKind::Not(Box::new(inner)), pos));
        }
        let lhs = self.primary()?;
        if *self.peek() == Tok::Equals {
            let pos = self.next().1;
            let rhs = self.primary()?;
            return Ok(Expr::new(ExprKind::Eq(Box::new(lhs), Box::new(rhs)), pos));
        }
        Ok(lhs)
    }

    fn two_args(&mut self) -> Result<(Expr, Expr), LogicError> {
        self.expect(Tok::LParen)?;
        let a = self.expr()?;
        self.expect(Tok::Comma)?;
        let b = self.expr()?;
        self.expect(Tok::RParen)?;
        Ok((a, b))
    }

    fn primary(&mut self) -> Result<Expr, LogicError> {
        let pos = self.pos();
        match self.peek().clone() {
            Tok::LParen => {
                self.next();
                let a = self.expr()?;
                if *self.peek() == Tok::Comma {
                    self.next();
                    let b = self.expr()?;
                    self.expect(Tok::RParen)?;
                    return Ok(Expr::new(ExprKind::Pair(Box::new(a), Box::new(b)), pos));
                }
                self.expect(Tok::RParen)?;
                Ok(a)
            }
            Tok::LBrace => {
                self.next();
                let var = self.ident()?;
                self.expect(Tok::Colon)?;
                let ty = self.ty()?;
                self.expect(Tok::Bar)?;
                let body = self.expr()?;
                self.expect(Tok::RBrace)?;
                Ok(Expr::new(
                    ExprKind::Compr {
                        var,
                        ty,
                        body: Box::new(body),
                    },
                    pos,
                ))
            }
            Tok::Ident(s) => match s.as_str() {
                "true" | "false" => {
                    self.next();
                    Ok(Expr::new(ExprKind::Const(s == "true"), pos))
                }
                "mem" => {
                    self.next();
                    let (a, b) = self.two_args()?;
                    Ok(Expr::new(ExprKind::Mem(Box::new(a), Box::new(b)), pos))
                }
                "and" | "or" | "implies" if *self.peek2() == Tok::LParen => {
                    self.next();
                    let c = match s.as_str() {
                        "and" => Connective::And,
                        "or" => Connective::Or,
                        _ => Connective::Implies,
                    };
                    let (a, b) = self.two_args()?;
                    Ok(Expr::new(ExprKind::Binary(c, Box::new(a), Box::new(b)), pos))
                }
                _ => {
                    let name = self.ident()?;
                    match self.peek() {
                        Tok::LParen => {
                            self.next();
                            let mut arg = self.expr()?;
                            while *self.peek() == Tok::Comma {
                                let p = self.next().1;
                                let b = self.expr()?;
                                arg = Expr::new(ExprKind::Pair(Box::new(arg), Box::new(b)), p);
                            }
                            self.expect(Tok::RParen)?;
                            Ok(Expr::new(
                                ExprKind::Apply {
                                    func: name,
                                    arg: Box::new(arg),
                                },
                                pos,
                            ))
                        }
                        Tok::Colon => {
                            self.next();
                            let ty = self.ty()?;
                            Ok(Expr::new(ExprKind::Var { name, ty: Some(ty) }, pos))
                        }
                        _ => Ok(Expr::new(ExprKind::Var { name, ty: None }, pos)),
                    }
                }
            },
            other => self.error(format!("expected a term, found {other}")),
        }
    }
}

/// Parses one formula or term.
pub fn parse(src: &str) -> Result<Expr, LogicError> {
    let mut p = Parser { toks: lex(src)?, at: 0 };
    let e = p.expr()?;
    if *p.peek() != Tok::Eof {
        return p.error(format!("unexpected {} after the end of the term", p.peek()));
    }
    Ok(e)
}

/// Parses a type expression.
pub fn parse_type(src: &str) -> Result<TypeExpr, LogicError> {
    let mut p = Parser { toks: lex(src)?, at: 0 };
    let t = p.ty()?;
    if *p.peek() != Tok::Eof {
        return p.error(format!("unexpected {} after the type", p.peek()));
    }
    Ok(t)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_grammar_productions() {
        let e = parse("x:A = x:A").unwrap();
        assert!(matches!(e.kind, ExprKind::Eq(..)));
        let e = parse("forall x:A. f(x) = g(x)").unwrap();
        match e.kind {
            ExprKind::Quant {
                q: Quantifier::Forall,
                body,
                ..
            } => assert!(matches!(body.kind, ExprKind::Eq(..))),
            _ => panic!("not a quantifier"),
        }
        let e = parse("{ x:A | mem(x, S) }").unwrap();
        assert!(matches!(e.kind, ExprKind::Compr { .. }));
    }

    #[test]
    fn precedence_and_associativity() {
        let e = parse("not a and b or c implies d implies e").unwrap();
        assert_eq!(e.to_string(), "(((not(a) and b) or c) implies (d implies e))");
        let e = parse("a and forall x:A. b or c").unwrap();
        assert_eq!(e.to_string(), "(a and (forall x:A. (b or c)))");
        let e = parse("or(a, not b)").unwrap();
        assert_eq!(e.to_string(), "(a or not(b))");
    }

    #[test]
    fn types_parse() {
        assert_eq!(parse_type("P(A*B)*Omega").unwrap().to_string(), "P(A*B)*Omega");
        assert_eq!(parse_type("A*(B*1)").unwrap().to_string(), "A*(B*1)");
    }

    #[test]
    fn errors_carry_positions() {
        match parse("forall x:A.\n  x = ") {
            Err(LogicError::Syntax { pos, .. }) => assert_eq!(pos, Pos { line: 2, col: 7 }),
            other => panic!("{other:?}"),
        }
        match parse("a $ b") {
            Err(LogicError::Syntax { pos, .. }) => assert_eq!(pos, Pos { line: 1, col: 3 }),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn display_reparses_to_itself() {
        for src in [
            "forall x:A. exists y:B. f(x) = y and mem(x, S)",
            "{ x:A | x = c(x) } = T",
            "implies(p:Omega, (q:Omega, r:Omega) = s)",
        ] {
            let once = parse(src).unwrap().to_string();
            assert_eq!(parse(&once).unwrap().to_string(), once);
        }
    }
}
