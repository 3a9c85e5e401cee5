use std::collections::HashMap;

use num_traits::Signed;
use thiserror::Error;

use super::{Param, PointExpr, Pos, Pred, Program, RegionSpec, Stmt, Test, Type};
use crate::field::{parse_expr_at, LiteralError, RealExpr, Sign};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("{line}:{col}: expected {expected}")]
pub struct ParseError {
    pub line: usize,
    pub col: usize,
    pub expected: String,
}

const RESERVED: &[&str] = &[
    "construction", "let", "return", "if", "else", "while", "budget", "not", "point", "line", "circle",
    "intersect", "choose", "arbitrary", "other", "in_disk", "in_cell", "equal", "on", "intersects",
    "between", "dist_le", "dist_eq", "ccw",
];

pub fn parse(text: &str) -> Result<Program, ParseError> {
    let mut p = Parser { text, pos: 0 };
    let prog = p.program()?;
    Checker::default().program(&prog).map_err(|(pos, expected)| ParseError {
        line: pos.line,
        col: pos.col,
        expected,
    })?;
    Ok(prog)
}

struct Parser<'a> {
    text: &'a str,
    pos: usize,
}

fn is_ident_char(c: u8) -> bool {
    c.is_ascii_alphanumeric() || c == b'_' || c == b'\''
}

impl Parser<'_> {
    fn at(&self, offset: usize) -> Pos {
        let before = &self.text[..offset.min(self.text.len())];
        let line = before.matches('\n').count() + 1;
        let col = before.rfind('\n').map_or(before.len(), |i| before.len() - i - 1) + 1;
        Pos { line, col }
    }

    fn here(&mut self) -> Pos {
        self.ws();
        self.at(self.pos)
    }

    fn fail<T>(&mut self, expected: impl Into<String>) -> Result<T, ParseError> {
        let pos = self.here();
        Err(ParseError {
            line: pos.line,
            col: pos.col,
            expected: expected.into(),
        })
    }

    fn ws(&mut self) {
        let bytes = self.text.as_bytes();
        loop {
            while self.pos < bytes.len() && bytes[self.pos].is_ascii_whitespace() {
                self.pos += 1;
            }
            if self.pos < bytes.len() && bytes[self.pos] == b'#' {
                while self.pos < bytes.len() && bytes[self.pos] != b'\n' {
                    self.pos += 1;
                }
            } else {
                return;
            }
        }
    }

    fn rest(&mut self) -> &str {
        self.ws();
        &self.text[self.pos..]
    }

    fn eat(&mut self, punct: &str) -> bool {
        if self.rest().starts_with(punct) {
            self.pos += punct.len();
            true
        } else {
            false
        }
    }

    fn expect(&mut self, punct: &str) -> Result<(), ParseError> {
        if self.eat(punct) {
            Ok(())
        } else {
            self.fail(format!("'{punct}'"))
        }
    }

    fn peek_word(&mut self) -> &str {
        let rest = self.rest();
        let end = rest.bytes().position(|c| !is_ident_char(c)).unwrap_or(rest.len());
        &rest[..end]
    }

    fn keyword(&mut self, word: &str) -> bool {
        if self.peek_word() == word {
            self.pos += word.len();
            true
        } else {
            false
        }
    }

    fn expect_keyword(&mut self, word: &str) -> Result<(), ParseError> {
        if self.keyword(word) {
            Ok(())
        } else {
            self.fail(format!("'{word}'"))
        }
    }

    fn ident(&mut self) -> Result<String, ParseError> {
        let word = self.peek_word().to_string();
        let starts_ok = word
            .bytes()
            .next()
            .is_some_and(|c| c.is_ascii_alphabetic() || c == b'_');
        if !starts_ok || RESERVED.contains(&word.as_str()) {
            return self.fail("a name");
        }
        self.pos += word.len();
        Ok(word)
    }

    fn names(&mut self) -> Result<Vec<String>, ParseError> {
        let mut out = vec![self.ident()?];
        while self.eat(",") {
            out.push(self.ident()?);
        }
        Ok(out)
    }

    fn program(&mut self) -> Result<Program, ParseError> {
        self.expect_keyword("construction")?;
        let name = self.ident()?;
        self.expect("(")?;
        let mut params = vec![];
        if !self.eat(")") {
            loop {
                let ty = self.ty()?;
                params.push(Param { ty, name: self.ident()? });
                if self.eat(")") {
                    break;
                }
                self.expect(",")?;
            }
        }
        self.expect("{")?;
        let mut body = vec![];
        while !self.keyword("return") {
            if self.rest().is_empty() || self.rest().starts_with('}') {
                return self.fail("a statement or 'return'");
            }
            body.push(self.stmt()?);
        }
        let returns = self.names()?;
        self.expect(";")?;
        self.expect("}")?;
        if !self.rest().is_empty() {
            return self.fail("end of input");
        }
        Ok(Program { name, params, body, returns })
    }

    fn ty(&mut self) -> Result<Type, ParseError> {
        for (word, ty) in [("point", Type::Point), ("line", Type::Line), ("circle", Type::Circle)] {
            if self.keyword(word) {
                return Ok(ty);
            }
        }
        self.fail("a type ('point', 'line' or 'circle')")
    }

    fn block(&mut self) -> Result<Vec<Stmt>, ParseError> {
        self.expect("{")?;
        let mut out = vec![];
        while !self.eat("}") {
            if self.rest().is_empty() {
                return self.fail("'}'");
            }
            out.push(self.stmt()?);
        }
        Ok(out)
    }

    fn stmt(&mut self) -> Result<Stmt, ParseError> {
        let pos = self.here();
        if self.keyword("if") {
            let test = self.test()?;
            let then = self.block()?;
            let otherwise = if self.keyword("else") { self.block()? } else { vec![] };
            return Ok(Stmt::If { test, then, otherwise, pos });
        }
        if self.keyword("while") {
            let test = self.test()?;
            self.expect_keyword("budget")?;
            let budget = self.integer()?;
            let body = self.block()?;
            return Ok(Stmt::While { test, budget, body, pos });
        }
        if !self.keyword("let") {
            return self.fail("a statement ('let', 'if', 'while') or 'return'");
        }
        if self.eat("[") {
            let names = self.names()?;
            if names.len() > 2 {
                return self.fail("at most two names in an intersection binding");
            }
            self.expect("]")?;
            self.expect("=")?;
            self.expect_keyword("intersect")?;
            let (g, h) = self.pair()?;
            self.expect(";")?;
            return Ok(Stmt::Intersect { names, g, h, pos });
        }
        let name = self.ident()?;
        self.expect("=")?;
        let stmt = if self.keyword("line") {
            let (p, q) = self.pair()?;
            Stmt::Line { name, p, q, pos }
        } else if self.keyword("circle") {
            self.expect("(")?;
            let center = self.ident()?;
            self.expect(";")?;
            let a = self.ident()?;
            self.expect(",")?;
            let b = self.ident()?;
            self.expect(")")?;
            Stmt::Circle { name, center, a, b, pos }
        } else if self.keyword("other") {
            self.expect("(")?;
            let p = self.ident()?;
            self.expect(",")?;
            let g = self.ident()?;
            self.expect(",")?;
            let h = self.ident()?;
            self.expect(")")?;
            Stmt::Other { name, p, g, h, pos }
        } else if self.keyword("choose") {
            self.expect("(")?;
            let candidates = self.names()?;
            self.expect("|")?;
            let test = self.test()?;
            self.expect(")")?;
            Stmt::Choose { name, candidates, test, pos }
        } else if self.keyword("arbitrary") {
            let region = self.region()?;
            Stmt::Arbitrary { name, region, pos }
        } else {
            return self.fail("'line', 'circle', 'other', 'choose' or 'arbitrary'");
        };
        self.expect(";")?;
        Ok(stmt)
    }

    fn pair(&mut self) -> Result<(String, String), ParseError> {
        self.expect("(")?;
        let a = self.ident()?;
        self.expect(",")?;
        let b = self.ident()?;
        self.expect(")")?;
        Ok((a, b))
    }

    fn integer(&mut self) -> Result<usize, ParseError> {
        let word = self.peek_word().to_string();
        match word.parse::<usize>() {
            Ok(n) => {
                self.pos += word.len();
                Ok(n)
            }
            Err(_) => self.fail("a nonnegative integer"),
        }
    }

    fn test(&mut self) -> Result<Test, ParseError> {
        if self.keyword("not") {
            return Ok(Test::Not(Box::new(self.test()?)));
        }
        let pos = self.here();
        let word = self.peek_word().to_string();
        let Some(pred) = Pred::from_keyword(&word) else {
            return self.fail("a test (equal, on, intersects, between, dist_le, dist_eq, ccw) or 'not'");
        };
        self.pos += word.len();
        self.expect("(")?;
        let args = self.names()?;
        let arity = match pred {
            Pred::Equal | Pred::On | Pred::Intersects => 2,
            Pred::Between | Pred::Ccw => 3,
            Pred::DistLe | Pred::DistEq => 4,
        };
        if args.len() != arity {
            return Err(ParseError {
                line: pos.line,
                col: pos.col,
                expected: format!("{arity} arguments for {word}"),
            });
        }
        self.expect(")")?;
        Ok(Test::Pred { pred, args, pos })
    }

    fn real(&mut self) -> Result<RealExpr, ParseError> {
        self.ws();
        match parse_expr_at(self.text, self.pos) {
            Ok((e, end)) => {
                self.pos = end;
                Ok(e)
            }
            Err(e) => {
                let (offset, expected) = match e {
                    LiteralError::Syntax { offset, expected } => (offset, expected),
                    LiteralError::Field { offset, source } => (offset, format!("a valid number ({source})")),
                };
                let pos = self.at(offset);
                Err(ParseError {
                    line: pos.line,
                    col: pos.col,
                    expected,
                })
            }
        }
    }

    fn region(&mut self) -> Result<RegionSpec, ParseError> {
        if self.keyword("in_disk") {
            self.expect("(")?;
            let center = if self.eat("(") {
                let x = self.real()?;
                self.expect(",")?;
                let y = self.real()?;
                self.expect(")")?;
                PointExpr::Coords(x, y)
            } else {
                PointExpr::Name(self.ident()?)
            };
            self.expect(",")?;
            let radius = match self.real()?.as_rational() {
                Some(r) if r.is_positive() => r,
                _ => return self.fail("a positive rational radius"),
            };
            self.expect(")")?;
            return Ok(RegionSpec::Disk { center, radius });
        }
        if self.keyword("in_cell") {
            self.expect("(")?;
            let mut conds = vec![];
            loop {
                let name = self.ident()?;
                let sign = if self.eat("<") {
                    Sign::Negative
                } else if self.eat(">") {
                    Sign::Positive
                } else {
                    return self.fail("'<' or '>'");
                };
                if !self.eat("0") {
                    return self.fail("'0'");
                }
                conds.push((name, sign));
                if self.eat(")") {
                    break;
                }
                self.expect(",")?;
            }
            return Ok(RegionSpec::Cell(conds));
        }
        self.fail("'in_disk' or 'in_cell'")
    }
}

type CheckResult = Result<(), (Pos, String)>;

#[derive(Default)]
struct Checker {
    scopes: Vec<HashMap<String, Type>>,
}

impl Checker {
    fn lookup(&self, name: &str) -> Option<Type> {
        self.scopes.iter().rev().find_map(|s| s.get(name).copied())
    }

    fn use_name(&self, name: &str, pos: Pos) -> Result<Type, (Pos, String)> {
        self.lookup(name)
            .ok_or_else(|| (pos, format!("a defined name (got '{name}')")))
    }

    fn want(&self, name: &str, ty: Type, pos: Pos) -> CheckResult {
        let got = self.use_name(name, pos)?;
        if got != ty {
            return Err((pos, format!("'{name}' to be a {ty}, not a {got}")));
        }
        Ok(())
    }

    fn want_curve(&self, name: &str, pos: Pos) -> CheckResult {
        let got = self.use_name(name, pos)?;
        if !got.is_curve() {
            return Err((pos, format!("'{name}' to be a line or circle, not a point")));
        }
        Ok(())
    }

    fn define(&mut self, name: &str, ty: Type, pos: Pos) -> CheckResult {
        let current = self.scopes.last_mut().expect("scope");
        if current.contains_key(name) {
            return Err((pos, format!("a fresh name ('{name}' is already defined)")));
        }
        if let Some(outer) = self.scopes.iter().rev().skip(1).find_map(|s| s.get(name).copied()) {
            // rebinding an outer name from inside a block keeps its type
            if outer != ty {
                return Err((pos, format!("'{name}' to stay a {outer} when rebound")));
            }
            return Ok(());
        }
        self.scopes.last_mut().expect("scope").insert(name.to_string(), ty);
        Ok(())
    }

    fn program(&mut self, prog: &Program) -> CheckResult {
        let mut top = HashMap::new();
        for p in &prog.params {
            if top.insert(p.name.clone(), p.ty).is_some() {
                return Err((Pos { line: 1, col: 1 }, format!("distinct parameter names ('{}' repeats)", p.name)));
            }
        }
        self.scopes.push(top);
        self.block(&prog.body)?;
        let end = prog.body.last().map(|s| s.pos()).unwrap_or_default();
        for r in &prog.returns {
            self.use_name(r, end)?;
        }
        Ok(())
    }

    fn block(&mut self, body: &[Stmt]) -> CheckResult {
        for s in body {
            self.stmt(s)?;
        }
        Ok(())
    }

    fn scoped(&mut self, body: &[Stmt]) -> CheckResult {
        self.scopes.push(HashMap::new());
        let r = self.block(body);
        self.scopes.pop();
        r
    }

    fn stmt(&mut self, s: &Stmt) -> CheckResult {
        match s {
            Stmt::Line { name, p, q, pos } => {
                self.want(p, Type::Point, *pos)?;
                self.want(q, Type::Point, *pos)?;
                self.define(name, Type::Line, *pos)
            }
            Stmt::Circle { name, center, a, b, pos } => {
                for n in [center, a, b] {
                    self.want(n, Type::Point, *pos)?;
                }
                self.define(name, Type::Circle, *pos)
            }
            Stmt::Intersect { names, g, h, pos } => {
                self.want_curve(g, *pos)?;
                self.want_curve(h, *pos)?;
                if names.len() == 2 && names[0] == names[1] {
                    return Err((*pos, "two different names".into()));
                }
                for n in names {
                    self.define(n, Type::Point, *pos)?;
                }
                Ok(())
            }
            Stmt::Other { name, p, g, h, pos } => {
                self.want(p, Type::Point, *pos)?;
                self.want_curve(g, *pos)?;
                self.want_curve(h, *pos)?;
                self.define(name, Type::Point, *pos)
            }
            Stmt::Choose { name, candidates, test, pos } => {
                let ty = self.use_name(&candidates[0], *pos)?;
                for c in candidates {
                    self.want(c, ty, *pos)?;
                }
                self.scopes.push(HashMap::from([(name.clone(), ty)]));
                let r = self.test(test);
                self.scopes.pop();
                r?;
                self.define(name, ty, *pos)
            }
            Stmt::Arbitrary { name, region, pos } => {
                match region {
                    RegionSpec::Disk { center: PointExpr::Name(c), .. } => self.want(c, Type::Point, *pos)?,
                    RegionSpec::Disk { .. } => {}
                    RegionSpec::Cell(conds) => {
                        for (c, _) in conds {
                            self.want_curve(c, *pos)?;
                        }
                    }
                }
                self.define(name, Type::Point, *pos)
            }
            Stmt::If { test, then, otherwise, .. } => {
                self.test(test)?;
                self.scoped(then)?;
                self.scoped(otherwise)
            }
            Stmt::While { test, body, .. } => {
                self.test(test)?;
                self.scoped(body)
            }
        }
    }

    fn test(&self, t: &Test) -> CheckResult {
        let (pred, args, pos) = match t {
            Test::Not(inner) => return self.test(inner),
            Test::Pred { pred, args, pos } => (*pred, args, *pos),
        };
        match pred {
            Pred::Equal => {
                let a = self.use_name(&args[0], pos)?;
                self.want(&args[1], a, pos)
            }
            Pred::On => {
                self.want(&args[0], Type::Point, pos)?;
                self.use_name(&args[1], pos).map(|_| ())
            }
            Pred::Intersects => {
                self.want_curve(&args[0], pos)?;
                self.want_curve(&args[1], pos)
            }
            _ => args.iter().try_for_each(|a| self.want(a, Type::Point, pos)),
        }
    }
}
