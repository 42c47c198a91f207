use std::fmt;

/// 1-based source location.
///
/// Positions never take part in equality, so a program compares equal to
/// the re-parse of its pretty-printed form.
#[derive(Debug, Clone, Copy, Default)]
pub struct Pos {
    pub line: usize,
    pub column: usize,
}

impl PartialEq for Pos {
    fn eq(&self, _: &Self) -> bool {
        true
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum Expr {
    Int(i64),
    Real(f64),
    Bool(bool),
    Text(String),
    List(Vec<Expr>),
    Var(String),
    Add(Box<Expr>, Box<Expr>),
    Sub(Box<Expr>, Box<Expr>),
}

#[derive(Debug, Clone, PartialEq)]
pub struct Arg {
    pub name: String,
    pub value: Expr,
    pub pos: Pos,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Call {
    pub name: String,
    pub args: Vec<Arg>,
    pub pos: Pos,
}

impl Call {
    pub fn arg(&self, name: &str) -> Option<&Arg> {
        self.args.iter().find(|a| a.name == name)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LoopKind {
    ForEach,
    ForEachUnion,
}

impl LoopKind {
    pub fn name(self) -> &'static str {
        match self {
            LoopKind::ForEach => "forEach",
            LoopKind::ForEachUnion => "forEachUnion",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Loop {
    pub kind: LoopKind,
    /// `count` and optional `dir`.
    pub args: Vec<Arg>,
    pub var: String,
    pub body: Vec<Statement>,
    pub pos: Pos,
}

impl Loop {
    pub fn arg(&self, name: &str) -> Option<&Arg> {
        self.args.iter().find(|a| a.name == name)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum Statement {
    Call(Call),
    Loop(Loop),
    /// `use("Loop.crs").with { ... }`: only opens a block.
    Use {
        module: String,
        body: Vec<Statement>,
        pos: Pos,
    },
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct ScriptProgram {
    pub statements: Vec<Statement>,
}

fn quote(s: &str) -> String {
    let mut out = String::from("\"");
    for c in s.chars() {
        match c {
            '"' => out.push_str("\\\""),
            '\\' => out.push_str("\\\\"),
            '\n' => out.push_str("\\n"),
            '\t' => out.push_str("\\t"),
            c => out.push(c),
        }
    }
    out.push('"');
    out
}

impl fmt::Display for Expr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Expr::Int(i) => write!(f, "{i}"),
            Expr::Real(r) => write!(f, "{r:?}"),
            Expr::Bool(b) => write!(f, "{b}"),
            Expr::Text(s) => f.write_str(&quote(s)),
            Expr::List(items) => {
                f.write_str("[")?;
                for (i, e) in items.iter().enumerate() {
                    if i > 0 {
                        f.write_str(", ")?;
                    }
                    write!(f, "{e}")?;
                }
                f.write_str("]")
            }
            Expr::Var(v) => f.write_str(v),
            Expr::Add(a, b) => write!(f, "{a}+{b}"),
            Expr::Sub(a, b) => write!(f, "{a}-{b}"),
        }
    }
}

fn write_args(f: &mut fmt::Formatter<'_>, args: &[Arg]) -> fmt::Result {
    for (i, a) in args.iter().enumerate() {
        if i > 0 {
            f.write_str(", ")?;
        }
        write!(f, "{}: {}", a.name, a.value)?;
    }
    Ok(())
}

fn write_block(f: &mut fmt::Formatter<'_>, body: &[Statement], depth: usize) -> fmt::Result {
    for s in body {
        write_statement(f, s, depth)?;
    }
    Ok(())
}

fn write_statement(f: &mut fmt::Formatter<'_>, s: &Statement, depth: usize) -> fmt::Result {
    let indent = "    ".repeat(depth);
    match s {
        Statement::Call(c) => {
            write!(f, "{indent}{}(", c.name)?;
            write_args(f, &c.args)?;
            writeln!(f, ")")
        }
        Statement::Loop(l) => {
            write!(f, "{indent}{}(", l.kind.name())?;
            write_args(f, &l.args)?;
            writeln!(f, ", {{{} ->", l.var)?;
            write_block(f, &l.body, depth + 1)?;
            writeln!(f, "{indent}}})")
        }
        Statement::Use { module, body, .. } => {
            writeln!(f, "{indent}use({}).with {{", quote(module))?;
            write_block(f, body, depth + 1)?;
            writeln!(f, "{indent}}}")
        }
    }
}

impl fmt::Display for ScriptProgram {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write_block(f, &self.statements, 0)
    }
}
