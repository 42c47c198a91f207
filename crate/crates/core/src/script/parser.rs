//! Tokenizer, recursive-descent parser and static validation for `.crs` scripts.

use super::ast::{Arg, Call, Expr, Loop, LoopKind, Pos, ScriptProgram, Statement};
use super::functions::{signature, ArgKind, LOOP_PARAMS};
use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq)]
enum Tok {
    Ident(String),
    Int(i64),
    Real(f64),
    Str(String),
    LParen,
    RParen,
    LBracket,
    RBracket,
    LBrace,
    RBrace,
    Comma,
    Colon,
    Plus,
    Minus,
    Arrow,
    Dot,
    Eof,
}

fn describe(t: &Tok) -> String {
    match t {
        Tok::Ident(s) => format!("`{s}`"),
        Tok::Int(i) => format!("`{i}`"),
        Tok::Real(r) => format!("`{r}`"),
        Tok::Str(s) => format!("string {s:?}"),
        Tok::LParen => "`(`".into(),
        Tok::RParen => "`)`".into(),
        Tok::LBracket => "`[`".into(),
        Tok::RBracket => "`]`".into(),
        Tok::LBrace => "`{`".into(),
        Tok::RBrace => "`}`".into(),
        Tok::Comma => "`,`".into(),
        Tok::Colon => "`:`".into(),
        Tok::Plus => "`+`".into(),
        Tok::Minus => "`-`".into(),
        Tok::Arrow => "`->`".into(),
        Tok::Dot => "`.`".into(),
        Tok::Eof => "end of input".into(),
    }
}

fn syntax(pos: Pos, message: impl Into<String>) -> Error {
    Error::Syntax {
        line: pos.line,
        column: pos.column,
        message: message.into(),
    }
}

fn tokenize(src: &str) -> Result<Vec<(Tok, Pos)>> {
    let chars: Vec<char> = src.chars().collect();
    let mut out = Vec::new();
    let (mut i, mut line, mut col) = (0usize, 1usize, 1usize);

    macro_rules! bump {
        () => {{
            if chars[i] == '\n' {
                line += 1;
                col = 1;
            } else {
                col += 1;
            }
            i += 1;
        }};
    }

    while i < chars.len() {
        let c = chars[i];
        let pos = Pos { line, column: col };
        if c.is_whitespace() {
            bump!();
            continue;
        }
        if c == '/' && chars.get(i + 1) == Some(&'/') {
            while i < chars.len() && chars[i] != '\n' {
                bump!();
            }
            continue;
        }
        let single = match c {
            '(' => Some(Tok::LParen),
            ')' => Some(Tok::RParen),
            '[' => Some(Tok::LBracket),
            ']' => Some(Tok::RBracket),
            '{' => Some(Tok::LBrace),
            '}' => Some(Tok::RBrace),
            ',' => Some(Tok::Comma),
            ':' => Some(Tok::Colon),
            '+' => Some(Tok::Plus),
            '.' => Some(Tok::Dot),
            _ => None,
        };
        if let Some(t) = single {
            out.push((t, pos));
            bump!();
            continue;
        }
        if c == '-' {
            bump!();
            if chars.get(i) == Some(&'>') {
                bump!();
                out.push((Tok::Arrow, pos));
            } else {
                out.push((Tok::Minus, pos));
            }
            continue;
        }
        if c == '"' {
            bump!();
            let mut s = String::new();
            loop {
                let Some(&c) = chars.get(i) else {
                    return Err(syntax(pos, "unterminated string literal"));
                };
                bump!();
                match c {
                    '"' => break,
                    '\\' => {
                        let Some(&e) = chars.get(i) else {
                            return Err(syntax(pos, "unterminated string literal"));
                        };
                        bump!();
                        s.push(match e {
                            'n' => '\n',
                            't' => '\t',
                            other => other,
                        });
                    }
                    c => s.push(c),
                }
            }
            out.push((Tok::Str(s), pos));
            continue;
        }
        if c.is_ascii_digit() {
            let start = i;
            while i < chars.len() && chars[i].is_ascii_digit() {
                bump!();
            }
            let mut real = false;
            if chars.get(i) == Some(&'.') && chars.get(i + 1).is_some_and(|d| d.is_ascii_digit()) {
                real = true;
                bump!();
                while i < chars.len() && chars[i].is_ascii_digit() {
                    bump!();
                }
            }
            if matches!(chars.get(i), Some('e' | 'E')) {
                let sign = usize::from(matches!(chars.get(i + 1), Some('+' | '-')));
                if chars.get(i + 1 + sign).is_some_and(|d| d.is_ascii_digit()) {
                    real = true;
                    for _ in 0..=sign {
                        bump!();
                    }
                    while i < chars.len() && chars[i].is_ascii_digit() {
                        bump!();
                    }
                }
            }
            let text: String = chars[start..i].iter().collect();
            let tok = if real {
                Tok::Real(text.parse().map_err(|_| syntax(pos, "bad number"))?)
            } else {
                Tok::Int(
                    text.parse()
                        .map_err(|_| syntax(pos, format!("integer `{text}` out of range")))?,
                )
            };
            out.push((tok, pos));
            continue;
        }
        if c.is_alphabetic() || c == '_' {
            let start = i;
            while i < chars.len() && (chars[i].is_alphanumeric() || chars[i] == '_') {
                bump!();
            }
            out.push((Tok::Ident(chars[start..i].iter().collect()), pos));
            continue;
        }
        return Err(syntax(pos, format!("unexpected character `{c}`")));
    }
    out.push((Tok::Eof, Pos { line, column: col }));
    Ok(out)
}

struct Parser {
    toks: Vec<(Tok, Pos)>,
    at: usize,
}

impl Parser {
    fn peek(&self) -> &Tok {
        &self.toks[self.at].0
    }

    fn advance(&mut self) -> (Tok, Pos) {
        let t = self.toks[self.at].clone();
        if self.at + 1 < self.toks.len() {
            self.at += 1;
        }
        t
    }

    fn expect(&mut self, want: Tok) -> Result<Pos> {
        let (t, pos) = self.advance();
        if t == want {
            Ok(pos)
        } else {
            Err(syntax(
                pos,
                format!("expected {}, found {}", describe(&want), describe(&t)),
            ))
        }
    }

    fn ident(&mut self) -> Result<(String, Pos)> {
        match self.advance() {
            (Tok::Ident(s), pos) => Ok((s, pos)),
            (t, pos) => Err(syntax(pos, format!("expected a name, found {}", describe(&t)))),
        }
    }

    fn program(&mut self) -> Result<Vec<Statement>> {
        let mut out = Vec::new();
        while *self.peek() != Tok::Eof {
            out.push(self.statement()?);
        }
        Ok(out)
    }

    fn block(&mut self) -> Result<Vec<Statement>> {
        let mut out = Vec::new();
        while !matches!(self.peek(), Tok::RBrace | Tok::Eof) {
            out.push(self.statement()?);
        }
        self.expect(Tok::RBrace)?;
        Ok(out)
    }

    fn statement(&mut self) -> Result<Statement> {
        let (name, pos) = self.ident()?;
        match name.as_str() {
            "use" if *self.peek() == Tok::LParen => {
                self.expect(Tok::LParen)?;
                let module = match self.advance() {
                    (Tok::Str(s), _) => s,
                    (t, p) => {
                        return Err(syntax(p, format!("expected a module name, found {}", describe(&t))))
                    }
                };
                self.expect(Tok::RParen)?;
                self.expect(Tok::Dot)?;
                let (with, wpos) = self.ident()?;
                if with != "with" {
                    return Err(syntax(wpos, format!("expected `with`, found `{with}`")));
                }
                self.expect(Tok::LBrace)?;
                let body = self.block()?;
                Ok(Statement::Use { module, body, pos })
            }
            "forEach" | "forEachUnion" => {
                let kind = if name == "forEach" {
                    LoopKind::ForEach
                } else {
                    LoopKind::ForEachUnion
                };
                self.expect(Tok::LParen)?;
                let mut args = Vec::new();
                while *self.peek() != Tok::LBrace {
                    args.push(self.arg()?);
                    self.expect(Tok::Comma)?;
                }
                self.expect(Tok::LBrace)?;
                let (var, _) = self.ident()?;
                self.expect(Tok::Arrow)?;
                let body = self.block()?;
                self.expect(Tok::RParen)?;
                Ok(Statement::Loop(Loop {
                    kind,
                    args,
                    var,
                    body,
                    pos,
                }))
            }
            _ => {
                self.expect(Tok::LParen)?;
                let mut args = Vec::new();
                if *self.peek() != Tok::RParen {
                    args.push(self.arg()?);
                    while *self.peek() == Tok::Comma {
                        self.advance();
                        args.push(self.arg()?);
                    }
                }
                self.expect(Tok::RParen)?;
                Ok(Statement::Call(Call { name, args, pos }))
            }
        }
    }

    fn arg(&mut self) -> Result<Arg> {
        let (name, pos) = self.ident()?;
        self.expect(Tok::Colon)?;
        let value = self.expr()?;
        Ok(Arg { name, value, pos })
    }

    fn expr(&mut self) -> Result<Expr> {
        let mut lhs = self.term()?;
        loop {
            match self.peek() {
                Tok::Plus => {
                    self.advance();
                    lhs = Expr::Add(Box::new(lhs), Box::new(self.term()?));
                }
                Tok::Minus => {
                    self.advance();
                    lhs = Expr::Sub(Box::new(lhs), Box::new(self.term()?));
                }
                _ => return Ok(lhs),
            }
        }
    }

    fn term(&mut self) -> Result<Expr> {
        let (t, pos) = self.advance();
        match t {
            Tok::Int(i) => Ok(Expr::Int(i)),
            Tok::Real(r) => Ok(Expr::Real(r)),
            Tok::Str(s) => Ok(Expr::Text(s)),
            Tok::Ident(s) if s == "true" => Ok(Expr::Bool(true)),
            Tok::Ident(s) if s == "false" => Ok(Expr::Bool(false)),
            Tok::Ident(s) => Ok(Expr::Var(s)),
            Tok::Minus => match self.advance() {
                (Tok::Int(i), _) => Ok(Expr::Int(-i)),
                (Tok::Real(r), _) => Ok(Expr::Real(-r)),
                (t, p) => Err(syntax(p, format!("expected a number after `-`, found {}", describe(&t)))),
            },
            Tok::LBracket => {
                let mut items = Vec::new();
                if *self.peek() != Tok::RBracket {
                    items.push(self.expr()?);
                    while *self.peek() == Tok::Comma {
                        self.advance();
                        items.push(self.expr()?);
                    }
                }
                self.expect(Tok::RBracket)?;
                Ok(Expr::List(items))
            }
            t => Err(syntax(pos, format!("expected a value, found {}", describe(&t)))),
        }
    }
}

/// Static type of an expression, as far as it can be known before running.
#[derive(Debug, Clone, Copy, PartialEq)]
enum Ty {
    Int,
    Real,
    Bool,
    Text,
    List,
}

fn type_of(e: &Expr, scope: &[String], pos: Pos) -> Result<Ty> {
    let bad = |m: String| Error::BadArgument {
        line: pos.line,
        column: pos.column,
        message: m,
    };
    Ok(match e {
        Expr::Int(_) => Ty::Int,
        Expr::Real(_) => Ty::Real,
        Expr::Bool(_) => Ty::Bool,
        Expr::Text(_) => Ty::Text,
        Expr::List(items) => {
            for i in items {
                type_of(i, scope, pos)?;
            }
            Ty::List
        }
        Expr::Var(v) => {
            if !scope.iter().any(|s| s == v) {
                return Err(bad(format!("unknown variable `{v}`")));
            }
            Ty::Int
        }
        Expr::Add(a, b) | Expr::Sub(a, b) => {
            match (type_of(a, scope, pos)?, type_of(b, scope, pos)?) {
                (Ty::Int, Ty::Int) => Ty::Int,
                (Ty::Int | Ty::Real, Ty::Int | Ty::Real) => Ty::Real,
                _ => return Err(bad("arithmetic needs numbers".into())),
            }
        }
    })
}

fn check_kind(arg: &Arg, kind: ArgKind, scope: &[String]) -> Result<()> {
    let ty = type_of(&arg.value, scope, arg.pos)?;
    let list_of = |want: &[Ty]| -> Result<bool> {
        let Expr::List(items) = &arg.value else {
            return Ok(false);
        };
        if items.len() != want.len() {
            return Ok(false);
        }
        for (item, &w) in items.iter().zip(want) {
            if type_of(item, scope, arg.pos)? != w {
                return Ok(false);
            }
        }
        Ok(true)
    };
    let ok = match kind {
        ArgKind::Int => ty == Ty::Int,
        ArgKind::Real => matches!(ty, Ty::Int | Ty::Real),
        ArgKind::Bool => ty == Ty::Bool,
        ArgKind::Text => ty == Ty::Text,
        ArgKind::YearRange => list_of(&[Ty::Int, Ty::Int, Ty::Bool])?,
        ArgKind::IntPair => list_of(&[Ty::Int, Ty::Int])?,
    };
    if ok {
        Ok(())
    } else {
        Err(Error::BadArgument {
            line: arg.pos.line,
            column: arg.pos.column,
            message: format!("argument `{}` must be {}", arg.name, kind.describe()),
        })
    }
}

fn check_args(
    what: &str,
    args: &[Arg],
    params: &[(&str, ArgKind, bool)],
    pos: Pos,
    scope: &[String],
) -> Result<()> {
    for (i, arg) in args.iter().enumerate() {
        if args[..i].iter().any(|a| a.name == arg.name) {
            return Err(Error::BadArgument {
                line: arg.pos.line,
                column: arg.pos.column,
                message: format!("argument `{}` given twice", arg.name),
            });
        }
        let Some(&(_, kind, _)) = params.iter().find(|(n, _, _)| *n == arg.name) else {
            return Err(Error::BadArgument {
                line: arg.pos.line,
                column: arg.pos.column,
                message: format!("`{what}` has no argument `{}`", arg.name),
            });
        };
        check_kind(arg, kind, scope)?;
    }
    for (name, _, required) in params {
        if *required && !args.iter().any(|a| a.name == *name) {
            return Err(Error::BadArgument {
                line: pos.line,
                column: pos.column,
                message: format!("`{what}` requires argument `{name}`"),
            });
        }
    }
    Ok(())
}

fn validate(body: &[Statement], scope: &mut Vec<String>) -> Result<()> {
    for s in body {
        match s {
            Statement::Call(c) => {
                let Some(sig) = signature(&c.name) else {
                    return Err(Error::UnknownFunction {
                        name: c.name.clone(),
                        line: c.pos.line,
                        column: c.pos.column,
                    });
                };
                check_args(&c.name, &c.args, sig, c.pos, scope)?;
            }
            Statement::Loop(l) => {
                check_args(l.kind.name(), &l.args, LOOP_PARAMS, l.pos, scope)?;
                scope.push(l.var.clone());
                let r = validate(&l.body, scope);
                scope.pop();
                r?;
            }
            Statement::Use { module, body, pos } => {
                if module != "Loop.crs" {
                    return Err(Error::BadArgument {
                        line: pos.line,
                        column: pos.column,
                        message: format!("unknown extension `{module}`"),
                    });
                }
                validate(body, scope)?;
            }
        }
    }
    Ok(())
}

/// Parses and validates a script.
pub fn parse_script(src: &str) -> Result<ScriptProgram> {
    let mut parser = Parser {
        toks: tokenize(src)?,
        at: 0,
    };
    let statements = parser.program()?;
    validate(&statements, &mut Vec::new())?;
    Ok(ScriptProgram { statements })
}
