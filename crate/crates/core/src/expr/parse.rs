//! Text front end for [`FnExpr`].
//!
//! ```text
//! expr    := bitwise
//! bitwise := sum (("xor" | "and" | "or") sum)*
//! sum     := product (("+" | "-") product)*
//! product := unary (("*" | "/") unary)*
//! unary   := "-" unary | power
//! power   := atom ("^" unary)?
//! atom    := "x" | integer | "(" expr ")" | name "(" expr ("," expr)* ")"
//! ```
//!
//! Functions: `xor`, `and`, `or`, `neg`, `inv`, `ff`, `binom`, `delta`, `compose`.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::Serialize;

use super::{FnExpr, Rational};
use crate::error::{Error, Result};
use crate::mahler::{Basis, RationalPoly};

/// Source range of one AST node, 1-based line and column, end exclusive.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct Span {
    pub line: usize,
    pub col: usize,
    pub end_line: usize,
    pub end_col: usize,
}

/// Parse result with one span per AST node in preorder.
#[derive(Debug, Clone)]
pub struct Parsed {
    pub expr: FnExpr,
    pub spans: Vec<Span>,
}

pub fn parse_dsl(text: &str) -> Result<FnExpr> {
    parse_dsl_with_spans(text).map(|p| p.expr)
}

pub fn parse_dsl_with_spans(text: &str) -> Result<Parsed> {
    let tokens = tokenize(text)?;
    let mut parser = Parser { tokens, pos: 0 };
    let tree = parser.expr()?;
    let tok = parser.peek();
    if tok.kind != Tok::End {
        return Err(syntax(tok, format!("unexpected {}", tok.kind.describe())));
    }
    let mut spans = Vec::new();
    tree.flatten(&mut spans);
    debug_assert_eq!(spans.len(), tree.expr.node_count());
    Ok(Parsed { expr: tree.expr, spans })
}

#[derive(Debug, Clone, PartialEq)]
enum Tok {
    Int(BigInt),
    Ident(String),
    Sym(char),
    End,
}

impl Tok {
    fn describe(&self) -> String {
        match self {
            Tok::Int(n) => format!("number {n}"),
            Tok::Ident(s) => format!("`{s}`"),
            Tok::Sym(c) => format!("`{c}`"),
            Tok::End => "end of input".into(),
        }
    }
}

#[derive(Debug, Clone)]
struct Token {
    kind: Tok,
    line: usize,
    col: usize,
    end_line: usize,
    end_col: usize,
}

fn syntax(tok: &Token, message: String) -> Error {
    Error::Syntax { line: tok.line, col: tok.col, message }
}

fn tokenize(text: &str) -> Result<Vec<Token>> {
    let chars: Vec<char> = text.chars().collect();
    let mut tokens = Vec::new();
    let (mut i, mut line, mut col) = (0, 1, 1);
    while i < chars.len() {
        let c = chars[i];
        if c == '\n' {
            i += 1;
            line += 1;
            col = 1;
            continue;
        }
        if c.is_whitespace() {
            i += 1;
            col += 1;
            continue;
        }
        if c == '#' {
            while i < chars.len() && chars[i] != '\n' {
                i += 1;
            }
            continue;
        }
        let start = (line, col);
        let kind = if c.is_ascii_digit() {
            let begin = i;
            while i < chars.len() && chars[i].is_ascii_digit() {
                i += 1;
            }
            let digits: String = chars[begin..i].iter().collect();
            col += i - begin;
            Tok::Int(digits.parse().expect("decimal digits"))
        } else if c.is_ascii_alphabetic() || c == '_' {
            let begin = i;
            while i < chars.len() && (chars[i].is_ascii_alphanumeric() || chars[i] == '_') {
                i += 1;
            }
            col += i - begin;
            Tok::Ident(chars[begin..i].iter().collect())
        } else if "+-*/^(),".contains(c) {
            i += 1;
            col += 1;
            Tok::Sym(c)
        } else {
            return Err(Error::Syntax { line, col, message: format!("unexpected character `{c}`") });
        };
        tokens.push(Token { kind, line: start.0, col: start.1, end_line: line, end_col: col });
    }
    tokens.push(Token { kind: Tok::End, line, col, end_line: line, end_col: col });
    Ok(tokens)
}

/// AST node paired with its source span and the spans of its children.
struct Tree {
    expr: FnExpr,
    span: Span,
    kids: Vec<Tree>,
}

impl Tree {
    fn flatten(&self, out: &mut Vec<Span>) {
        out.push(self.span);
        for kid in &self.kids {
            kid.flatten(out);
        }
    }

    fn leaf(expr: FnExpr, span: Span) -> Tree {
        Tree { expr, span, kids: vec![] }
    }
}

fn join(a: Span, b: Span) -> Span {
    Span { line: a.line, col: a.col, end_line: b.end_line, end_col: b.end_col }
}

fn token_span(t: &Token) -> Span {
    Span { line: t.line, col: t.col, end_line: t.end_line, end_col: t.end_col }
}

fn const_of(t: &Tree) -> Option<BigRational> {
    t.expr.as_const().cloned()
}

/// Polynomial in `x` carried by a node, when the node is `x` or a polynomial leaf.
fn poly_of(t: &Tree) -> Option<RationalPoly> {
    match &t.expr {
        FnExpr::Var => Some(x_poly()),
        FnExpr::Poly { poly, arg } if **arg == FnExpr::Var => Some(poly.clone()),
        _ => None,
    }
}

fn binary(make: fn(Box<FnExpr>, Box<FnExpr>) -> FnExpr, a: Tree, b: Tree) -> Tree {
    let span = join(a.span, b.span);
    let expr = make(Box::new(a.expr.clone()), Box::new(b.expr.clone()));
    Tree { expr, span, kids: vec![a, b] }
}

fn unary(make: fn(Box<FnExpr>) -> FnExpr, a: Tree, span: Span) -> Tree {
    let expr = make(Box::new(a.expr.clone()));
    Tree { expr, span, kids: vec![a] }
}

/// Products fold constants into constants and scale polynomial leaves.
fn product(a: Tree, b: Tree) -> Tree {
    let span = join(a.span, b.span);
    match (const_of(&a), const_of(&b), poly_of(&a), poly_of(&b)) {
        (Some(x), Some(y), _, _) => Tree::leaf(FnExpr::Const(Rational(x * y)), span),
        (Some(c), _, _, Some(p)) | (_, Some(c), Some(p), _) => poly_leaf(p.scale(&c), span),
        _ => binary(FnExpr::Mul, a, b),
    }
}

/// Sums fold constants and polynomial leaves that share a basis.
fn sum(a: Tree, b: Tree, plus: bool) -> Tree {
    let span = join(a.span, b.span);
    let sign = if plus { BigRational::one() } else { -BigRational::one() };
    if let (Some(x), Some(y)) = (const_of(&a), const_of(&b)) {
        return Tree::leaf(FnExpr::Const(Rational(x + y * sign)), span);
    }
    let as_poly =
        |t: &Tree, basis: Basis| const_of(t).map(|c| RationalPoly::new(basis, vec![c])).or_else(|| poly_of(t));
    let basis = match (poly_of(&a), poly_of(&b)) {
        (Some(p), Some(q)) if p.basis() == q.basis() => Some(p.basis()),
        (Some(p), None) if const_of(&b).is_some() => Some(p.basis()),
        (None, Some(q)) if const_of(&a).is_some() => Some(q.basis()),
        _ => None,
    };
    match basis.and_then(|basis| Some((as_poly(&a, basis)?, as_poly(&b, basis)?))) {
        Some((p, q)) => poly_leaf(p.add(&q.scale(&sign)), span),
        None => binary(if plus { FnExpr::Add } else { FnExpr::Sub }, a, b),
    }
}

fn poly_leaf(poly: RationalPoly, span: Span) -> Tree {
    let arg = Tree::leaf(FnExpr::Var, span);
    Tree { expr: FnExpr::Poly { poly, arg: Box::new(FnExpr::Var) }, span, kids: vec![arg] }
}

struct Parser {
    tokens: Vec<Token>,
    pos: usize,
}

impl Parser {
    fn peek(&self) -> &Token {
        &self.tokens[self.pos]
    }

    fn next(&mut self) -> Token {
        let t = self.tokens[self.pos].clone();
        if t.kind != Tok::End {
            self.pos += 1;
        }
        t
    }

    fn is_sym(&self, c: char) -> bool {
        self.peek().kind == Tok::Sym(c)
    }

    fn expect_sym(&mut self, c: char) -> Result<Token> {
        let t = self.next();
        if t.kind == Tok::Sym(c) {
            Ok(t)
        } else {
            Err(syntax(&t, format!("expected `{c}`, found {}", t.kind.describe())))
        }
    }

    fn expr(&mut self) -> Result<Tree> {
        let mut lhs = self.sum()?;
        loop {
            let make: fn(Box<FnExpr>, Box<FnExpr>) -> FnExpr = match &self.peek().kind {
                Tok::Ident(s) if s == "xor" => FnExpr::Xor,
                Tok::Ident(s) if s == "and" => FnExpr::And,
                Tok::Ident(s) if s == "or" => FnExpr::Or,
                _ => return Ok(lhs),
            };
            self.next();
            let rhs = self.sum()?;
            lhs = binary(make, lhs, rhs);
        }
    }

    fn sum(&mut self) -> Result<Tree> {
        let mut lhs = self.product()?;
        loop {
            let plus = if self.is_sym('+') {
                true
            } else if self.is_sym('-') {
                false
            } else {
                return Ok(lhs);
            };
            self.next();
            let rhs = self.product()?;
            lhs = sum(lhs, rhs, plus);
        }
    }

    fn product(&mut self) -> Result<Tree> {
        let mut lhs = self.unary()?;
        loop {
            if self.is_sym('*') {
                self.next();
                let rhs = self.unary()?;
                lhs = product(lhs, rhs);
            } else if self.is_sym('/') {
                let slash = self.next();
                let rhs = self.unary()?;
                lhs = match const_of(&rhs) {
                    Some(d) if d.is_zero() => return Err(syntax(&slash, "division by zero".into())),
                    Some(d) => {
                        let recip = Tree::leaf(FnExpr::Const(Rational(d.recip())), rhs.span);
                        product(lhs, recip)
                    }
                    None => {
                        let span = rhs.span;
                        let inv = unary(FnExpr::Inv, rhs, span);
                        binary(FnExpr::Mul, lhs, inv)
                    }
                };
            } else {
                return Ok(lhs);
            }
        }
    }

    fn unary(&mut self) -> Result<Tree> {
        if self.is_sym('-') {
            let minus = self.next();
            let inner = self.unary()?;
            let span = join(token_span(&minus), inner.span);
            return Ok(match (const_of(&inner), poly_of(&inner)) {
                (Some(c), _) => Tree::leaf(FnExpr::Const(Rational(-c)), span),
                (_, Some(p)) => poly_leaf(p.neg(), span),
                _ => {
                    let zero = Tree::leaf(FnExpr::Const(Rational(BigRational::zero())), token_span(&minus));
                    let mut t = binary(FnExpr::Sub, zero, inner);
                    t.span = span;
                    t
                }
            });
        }
        self.power()
    }

    fn power(&mut self) -> Result<Tree> {
        let base = self.atom()?;
        if !self.is_sym('^') {
            return Ok(base);
        }
        self.next();
        let exponent = self.unary()?;
        // x^n with a natural n stays a polynomial leaf when the base is one.
        if let (Some(n), Some(p)) = (FnExpr::natural_exponent(&exponent.expr), poly_of(&base)) {
            if n <= 64 {
                let span = join(base.span, exponent.span);
                let mut acc = RationalPoly::monomial(vec![BigRational::one()]);
                for _ in 0..n {
                    acc = acc.mul(&p);
                }
                return Ok(poly_leaf(acc, span));
            }
        }
        if let (Some(n), Some(c)) = (FnExpr::natural_exponent(&exponent.expr), const_of(&base)) {
            if n <= 4096 {
                let span = join(base.span, exponent.span);
                return Ok(Tree::leaf(FnExpr::Const(Rational(num_traits::pow(c, n as usize))), span));
            }
        }
        Ok(binary(FnExpr::Pow, base, exponent))
    }

    fn atom(&mut self) -> Result<Tree> {
        let tok = self.next();
        let span = token_span(&tok);
        match &tok.kind {
            Tok::Int(n) => Ok(Tree::leaf(FnExpr::Const(Rational(BigRational::from_integer(n.clone()))), span)),
            Tok::Sym('(') => {
                let inner = self.expr()?;
                let close = self.expect_sym(')')?;
                let mut inner = inner;
                inner.span = join(span, token_span(&close));
                Ok(inner)
            }
            Tok::Ident(name) if name == "x" => Ok(Tree::leaf(FnExpr::Var, span)),
            Tok::Ident(name) => self.call(name.clone(), &tok),
            other => Err(syntax(&tok, format!("unexpected {}", other.describe()))),
        }
    }

    fn call(&mut self, name: String, tok: &Token) -> Result<Tree> {
        let arity = match name.as_str() {
            "neg" | "inv" | "delta" => 1,
            "xor" | "and" | "or" | "ff" | "binom" | "compose" => 2,
            _ => return Err(Error::UnknownIdentifier { name, line: tok.line, col: tok.col }),
        };
        self.expect_sym('(')?;
        let mut args = vec![self.expr()?];
        while self.is_sym(',') {
            self.next();
            args.push(self.expr()?);
        }
        let close = self.expect_sym(')')?;
        if args.len() != arity {
            return Err(syntax(tok, format!("`{name}` takes {arity} argument(s), got {}", args.len())));
        }
        let span = join(token_span(tok), token_span(&close));
        let mut args = args.into_iter();
        let first = args.next().expect("arity >= 1");
        let mut tree = match name.as_str() {
            "neg" => unary(FnExpr::Neg, first, span),
            "inv" => unary(FnExpr::Inv, first, span),
            "delta" => unary(FnExpr::Delta, first, span),
            "xor" => binary(FnExpr::Xor, first, args.next().expect("arity 2")),
            "and" => binary(FnExpr::And, first, args.next().expect("arity 2")),
            "or" => binary(FnExpr::Or, first, args.next().expect("arity 2")),
            "compose" => {
                let inner = args.next().expect("arity 2");
                match first.expr {
                    FnExpr::Poly { poly, arg } if *arg == FnExpr::Var => {
                        let expr = FnExpr::Poly { poly, arg: Box::new(inner.expr.clone()) };
                        Tree { expr, span, kids: vec![inner] }
                    }
                    _ => binary(FnExpr::Compose, first, inner),
                }
            }
            _ => {
                let order = args.next().expect("arity 2");
                let i = const_of(&order)
                    .filter(|q| q.is_integer() && !q.is_negative())
                    .and_then(|q| q.numer().to_usize())
                    .filter(|&i| i <= 64)
                    .ok_or_else(|| syntax(tok, format!("`{name}` needs a natural order <= 64")))?;
                let scale = if name == "ff" {
                    BigRational::one()
                } else {
                    BigRational::new(BigInt::one(), (1..=i).fold(BigInt::one(), |acc, j| acc * BigInt::from(j)))
                };
                let poly = RationalPoly::term(Basis::FallingFactorial, i, scale);
                match first.expr {
                    FnExpr::Var => poly_leaf(poly, span),
                    _ => {
                        let expr = FnExpr::Poly { poly, arg: Box::new(first.expr.clone()) };
                        Tree { expr, span, kids: vec![first] }
                    }
                }
            }
        };
        tree.span = span;
        Ok(tree)
    }
}

fn x_poly() -> RationalPoly {
    RationalPoly::from_integers(Basis::Monomial, &[0, 1])
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::expr::{eval_expr, var};
    use crate::padic::Modulus;

    fn eval(text: &str, p: u64, k: u32, x: u64) -> u64 {
        let e = parse_dsl(text).unwrap();
        eval_expr(&e, &Modulus::new(p, k).unwrap().residue(x)).unwrap().into_inner()
    }

    #[test]
    fn intro_family_parses_to_add_tree() {
        let e = parse_dsl("1 + x + 2*((x+1) xor x)").unwrap();
        assert!(matches!(e, FnExpr::Add(..)));
        assert!(e.uses_bitwise());
        for x in 0..64 {
            let want = (1 + x + 2 * ((x + 1) ^ x)) % 64;
            assert_eq!(eval("1 + x + 2*((x+1) xor x)", 2, 6, x), want);
        }
    }

    #[test]
    fn negative_exponent_is_unit_power() {
        let e = parse_dsl("(1 + 2*x)^(-1)").unwrap();
        match &e {
            FnExpr::Pow(_, exp) => assert_eq!(exp.as_const().unwrap(), &BigRational::from_integer((-1).into())),
            other => panic!("expected a power node, got {other:?}"),
        }
        for x in 0..32u64 {
            assert_eq!(eval("(1 + 2*x)^(-1)", 2, 5, x) * (1 + 2 * x) % 32, 1);
        }
    }

    #[test]
    fn falling_factorial_term_is_a_polynomial_node() {
        let e = parse_dsl("1 + x + (5/18)*ff(x,6)").unwrap();
        match e {
            FnExpr::Add(_, rhs) => match *rhs {
                FnExpr::Poly { poly, .. } => {
                    assert_eq!(poly.basis(), Basis::FallingFactorial);
                    assert_eq!(poly.coeffs()[6], BigRational::new(5.into(), 18.into()));
                }
                other => panic!("expected a polynomial node, got {other:?}"),
            },
            other => panic!("expected an addition, got {other:?}"),
        }
    }

    #[test]
    fn precedence_and_associativity() {
        assert_eq!(eval("2^3^2", 2, 12, 0), 512);
        assert_eq!(eval("-x^2", 5, 3, 2), 125 - 4);
        assert_eq!(eval("1 + 2*3", 5, 2, 0), 7);
        assert_eq!(eval("x + 32 and x", 2, 7, 33), (33 + 32) & 33);
        assert_eq!(eval("x - 1 - 1", 3, 2, 5), 3);
        assert_eq!(eval("neg(13)", 2, 3, 0), 2);
        // 7 * 7 = 49 = 1 mod 16
        assert_eq!(eval("x / (1 + 2*x)", 2, 4, 3), 3 * 7 % 16);
    }

    #[test]
    fn errors_report_positions() {
        assert_eq!(
            parse_dsl("1 +\n  foo(x)").unwrap_err(),
            Error::UnknownIdentifier { name: "foo".into(), line: 2, col: 3 }
        );
        match parse_dsl("(x + 1").unwrap_err() {
            Error::Syntax { line, col, .. } => assert_eq!((line, col), (1, 7)),
            other => panic!("{other:?}"),
        }
        match parse_dsl("x $ 2").unwrap_err() {
            Error::Syntax { line, col, .. } => assert_eq!((line, col), (1, 3)),
            other => panic!("{other:?}"),
        }
        assert!(matches!(parse_dsl("xor(x)"), Err(Error::Syntax { .. })));
    }

    #[test]
    fn spans_cover_every_node() {
        let parsed = parse_dsl_with_spans("1 + x xor 3*x").unwrap();
        assert_eq!(parsed.spans.len(), parsed.expr.node_count());
        assert_eq!(parsed.spans[0], Span { line: 1, col: 1, end_line: 1, end_col: 14 });
    }

    #[test]
    fn display_round_trips() {
        for text in [
            "1 + x + 2*((x+1) xor x)",
            "(1 + 2*x)^(-1)",
            "1 + x + (5/18)*ff(x,6)",
            "7 + x + 2*delta(x^2 xor (x + 32 and x))",
            "compose(x^2 + 1, inv(1 + 2*x))",
            "binom(x^2, 3) - neg(x or 5)",
            "201^x",
        ] {
            let e = parse_dsl(text).unwrap();
            let again = parse_dsl(&e.to_string()).unwrap();
            assert_eq!(again, e, "{text} -> {e}");
        }
        assert_eq!(parse_dsl("x").unwrap().to_poly(), var().to_poly());
    }
}
