//! Job description language.
//!
//! ```text
//! batch    = { job newline } ;
//! job      = [ command ] { option } ;
//! command  = "integrate" | "verify-main" | "verify-bounds" | "oracle" ;
//! option   = "kind" "=" ("K" | "Y" | "D")
//!          | "tol" "=" number
//!          | "seed" "=" integer
//!          | ("f" | "g") "=" term ;
//! term     = family "[" number "," number "]" "{" [ field { ";" field } [ ";" ] ] "}" ;
//! field    = ident ":" item { "," item } ;
//! item     = number | ident | ident "(" [ number { "," number } ] ")" ;
//! ```
//!
//! Newlines separate jobs except inside brackets and braces; `#` starts a
//! comment running to the end of the line. See the README for the family
//! catalog.

use std::fmt;
use std::str::FromStr;

use stieltjes_core::regulated::Regulated;
use stieltjes_core::{Formula, IntegralKind, Interval, Jump, LipschitzPieces, MonotoneJumps, StepFunction};

pub const DEFAULT_TOL: f64 = 1e-6;
pub const DEFAULT_SEED: u64 = 0;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("line {line}, column {column}: {message}")]
pub struct ParseError {
    pub line: usize,
    pub column: usize,
    pub message: String,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Command {
    Integrate,
    VerifyMain,
    VerifyBounds,
    Oracle,
}

impl Command {
    pub const ALL: [Command; 4] = [Command::Integrate, Command::VerifyMain, Command::VerifyBounds, Command::Oracle];

    pub fn as_str(self) -> &'static str {
        match self {
            Command::Integrate => "integrate",
            Command::VerifyMain => "verify-main",
            Command::VerifyBounds => "verify-bounds",
            Command::Oracle => "oracle",
        }
    }

    /// Whether the command takes a `kind` option.
    pub fn takes_kind(self) -> bool {
        matches!(self, Command::Integrate | Command::Oracle)
    }
}

impl fmt::Display for Command {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Command {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        Command::ALL
            .into_iter()
            .find(|c| c.as_str() == s)
            .ok_or_else(|| format!("unknown command '{s}'"))
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum Payload {
    Step { nodes: Vec<f64>, at: Vec<f64>, on: Vec<f64> },
    Pieces { breaks: Vec<f64>, fns: Vec<Formula>, lip: Option<Vec<f64>>, jumps: Vec<Jump>, variation_known: bool },
    Monotone { formula: Formula, jumps: Vec<Jump> },
}

/// A validated function definition.
#[derive(Debug, Clone, PartialEq)]
pub struct FunctionSpec {
    pub name: String,
    pub interval: Interval,
    pub payload: Payload,
}

impl FunctionSpec {
    pub fn build(&self) -> stieltjes_core::Result<Box<dyn Regulated>> {
        let iv = self.interval;
        Ok(match &self.payload {
            Payload::Step { nodes, at, on } => Box::new(StepFunction::new(iv, nodes.clone(), at.clone(), on.clone())?),
            Payload::Pieces { breaks, fns, lip, jumps, variation_known } => {
                let mut f = LipschitzPieces::new(iv, breaks.clone(), fns.clone(), jumps.clone())?;
                if let Some(lip) = lip {
                    f = f.with_lipschitz(lip.clone())?;
                }
                if !variation_known {
                    f = f.forget_variation();
                }
                Box::new(f)
            }
            Payload::Monotone { formula, jumps } => Box::new(MonotoneJumps::new(iv, *formula, jumps.clone())?),
        })
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct JobSpec {
    pub command: Command,
    pub f: FunctionSpec,
    pub g: FunctionSpec,
    /// Present exactly when the command takes a kind.
    pub kind: Option<IntegralKind>,
    pub tol: f64,
    pub seed: u64,
}

/// Parses a single job; the command word is required.
pub fn parse_spec(text: &str) -> Result<JobSpec, ParseError> {
    let mut jobs = parse_jobs(text, None)?;
    match jobs.len() {
        1 => Ok(jobs.pop().unwrap()),
        0 => Err(ParseError { line: 1, column: 1, message: "empty job".into() }),
        _ => {
            let (line, column) = second_job_position(text);
            Err(ParseError { line, column, message: "expected a single job".into() })
        }
    }
}

fn second_job_position(text: &str) -> (usize, usize) {
    let tokens = lex(text).unwrap_or_default();
    tokens
        .iter()
        .skip_while(|t| t.tok != Tok::Newline)
        .find(|t| !matches!(t.tok, Tok::Newline))
        .map_or((1, 1), |t| (t.line, t.column))
}

/// Parses newline-separated jobs. Jobs may omit the command word when a
/// default is given; an explicit command must then match it.
pub fn parse_jobs(text: &str, default: Option<Command>) -> Result<Vec<JobSpec>, ParseError> {
    let tokens = lex(text)?;
    let mut jobs = Vec::new();
    let mut parser = Parser { tokens: &tokens, pos: 0 };
    loop {
        while parser.peek().tok == Tok::Newline {
            parser.pos += 1;
        }
        if parser.peek().tok == Tok::Eof {
            return Ok(jobs);
        }
        jobs.push(parser.job(default)?);
    }
}

/// Canonical text form; `parse_spec(&render(job)) == Ok(job)`.
pub fn render(job: &JobSpec) -> String {
    let mut out = job.command.to_string();
    if let Some(kind) = job.kind {
        out += &format!(" kind={kind}");
    }
    out += &format!(" tol={:?} seed={} f={} g={}", job.tol, job.seed, render_function(&job.f), render_function(&job.g));
    out
}

pub fn render_function(spec: &FunctionSpec) -> String {
    let list = |xs: &[f64]| xs.iter().map(|x| format!("{x:?}")).collect::<Vec<_>>().join(",");
    let jumps = |js: &[Jump]| {
        js.iter().map(|j| format!("jump({:?},{:?},{:?})", j.at, j.left, j.right)).collect::<Vec<_>>().join(",")
    };
    let mut fields: Vec<String> = Vec::new();
    let family = match &spec.payload {
        Payload::Step { nodes, at, on } => {
            fields.push(format!("nodes:{}", list(nodes)));
            fields.push(format!("at:{}", list(at)));
            fields.push(format!("on:{}", list(on)));
            "step"
        }
        Payload::Pieces { breaks, fns, lip, jumps: js, variation_known } => {
            fields.push(format!("breaks:{}", list(breaks)));
            fields.push(format!("fns:{}", fns.iter().map(render_formula).collect::<Vec<_>>().join(",")));
            if let Some(lip) = lip {
                fields.push(format!("lip:{}", list(lip)));
            }
            if !js.is_empty() {
                fields.push(format!("jumps:{}", jumps(js)));
            }
            if !variation_known {
                fields.push("var:unknown".into());
            }
            "pieces"
        }
        Payload::Monotone { formula, jumps: js } => {
            fields.push(format!("fn:{}", render_formula(formula)));
            if !js.is_empty() {
                fields.push(format!("jumps:{}", jumps(js)));
            }
            "monotone"
        }
    };
    format!("{family}[{:?},{:?}]{{{}}}", spec.interval.a(), spec.interval.b(), fields.join("; "))
}

fn render_formula(f: &Formula) -> String {
    let [p, q, r] = f.params();
    match f {
        Formula::Affine { .. } => format!("affine({p:?},{q:?})"),
        _ => format!("{}({p:?},{q:?},{r:?})", f.name()),
    }
}

// ---------------------------------------------------------------- lexer

#[derive(Debug, Clone, PartialEq)]
enum Tok {
    Ident(String),
    Number { value: f64, raw: String },
    Sym(char),
    Newline,
    Eof,
}

#[derive(Debug, Clone, PartialEq)]
struct Token {
    tok: Tok,
    line: usize,
    column: usize,
}

fn describe(tok: &Tok) -> String {
    match tok {
        Tok::Ident(s) => format!("'{s}'"),
        Tok::Number { raw, .. } => format!("number {raw}"),
        Tok::Sym(c) => format!("'{c}'"),
        Tok::Newline => "end of line".into(),
        Tok::Eof => "end of input".into(),
    }
}

fn lex(text: &str) -> Result<Vec<Token>, ParseError> {
    let chars: Vec<char> = text.chars().collect();
    let mut tokens = Vec::new();
    let (mut i, mut line, mut col) = (0, 1, 1);
    let mut depth: i64 = 0;
    let err = |line, column, message: String| ParseError { line, column, message };
    while i < chars.len() {
        let c = chars[i];
        let (start_line, start_col) = (line, col);
        if c == '\n' {
            if depth == 0 {
                tokens.push(Token { tok: Tok::Newline, line, column: col });
            }
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
        let tok = if c.is_ascii_alphabetic() || c == '_' {
            let s: String = chars[i..]
                .iter()
                .take_while(|c| c.is_ascii_alphanumeric() || **c == '_' || **c == '-')
                .collect();
            i += s.chars().count();
            col += s.chars().count();
            Tok::Ident(s)
        } else if c.is_ascii_digit() || c == '.' || c == '+' || c == '-' {
            let len = number_len(&chars[i..]);
            let raw: String = chars[i..i + len].iter().collect();
            i += len;
            col += len;
            let value = raw
                .parse::<f64>()
                .ok()
                .filter(|v| v.is_finite())
                .ok_or_else(|| err(start_line, start_col, format!("invalid number '{raw}'")))?;
            Tok::Number { value, raw }
        } else if "[]{}(),;:=".contains(c) {
            match c {
                '[' | '{' | '(' => depth += 1,
                ']' | '}' | ')' => depth -= 1,
                _ => {}
            }
            i += 1;
            col += 1;
            Tok::Sym(c)
        } else {
            return Err(err(line, col, format!("unexpected character '{c}'")));
        };
        tokens.push(Token { tok, line: start_line, column: start_col });
    }
    tokens.push(Token { tok: Tok::Eof, line, column: col });
    Ok(tokens)
}

// sign, digits, fraction, exponent; anything malformed is caught by the f64 parse
fn number_len(s: &[char]) -> usize {
    let mut n = 0;
    if n < s.len() && (s[n] == '+' || s[n] == '-') {
        n += 1;
    }
    while n < s.len() && (s[n].is_ascii_digit() || s[n] == '.') {
        n += 1;
    }
    if n < s.len() && (s[n] == 'e' || s[n] == 'E') {
        n += 1;
        if n < s.len() && (s[n] == '+' || s[n] == '-') {
            n += 1;
        }
        while n < s.len() && s[n].is_ascii_digit() {
            n += 1;
        }
    }
    n
}

// ---------------------------------------------------------------- parser

#[derive(Debug, Clone)]
enum Item {
    Num(f64),
    Word(String),
    Call(String, Vec<f64>),
}

#[derive(Debug, Clone)]
struct Field {
    name: String,
    line: usize,
    column: usize,
    items: Vec<(Item, usize, usize)>,
}

struct Parser<'a> {
    tokens: &'a [Token],
    pos: usize,
}

fn at(t: &Token, message: impl Into<String>) -> ParseError {
    ParseError { line: t.line, column: t.column, message: message.into() }
}

impl<'a> Parser<'a> {
    fn peek(&self) -> &'a Token {
        &self.tokens[self.pos]
    }

    fn next(&mut self) -> &'a Token {
        let t = &self.tokens[self.pos];
        if t.tok != Tok::Eof {
            self.pos += 1;
        }
        t
    }

    fn expect_sym(&mut self, c: char) -> Result<&'a Token, ParseError> {
        let t = self.next();
        if t.tok == Tok::Sym(c) {
            Ok(t)
        } else {
            Err(at(t, format!("expected '{c}', found {}", describe(&t.tok))))
        }
    }

    fn number(&mut self) -> Result<f64, ParseError> {
        let t = self.next();
        match &t.tok {
            Tok::Number { value, .. } => Ok(*value),
            other => Err(at(t, format!("expected number, found {}", describe(other)))),
        }
    }

    fn ident(&mut self, what: &str) -> Result<(&'a Token, &'a str), ParseError> {
        let t = self.next();
        match &t.tok {
            Tok::Ident(s) => Ok((t, s.as_str())),
            other => Err(at(t, format!("expected {what}, found {}", describe(other)))),
        }
    }

    fn at_job_end(&self) -> bool {
        matches!(self.peek().tok, Tok::Newline | Tok::Eof)
    }

    fn job(&mut self, default: Option<Command>) -> Result<JobSpec, ParseError> {
        let start = self.peek();
        let command = match &start.tok {
            Tok::Ident(word) if Command::from_str(word).is_ok() => {
                self.pos += 1;
                let c = Command::from_str(word).unwrap();
                if let Some(d) = default.filter(|&d| d != c) {
                    return Err(at(start, format!("job command '{c}' does not match '{d}'")));
                }
                c
            }
            Tok::Ident(word) if self.tokens.get(self.pos + 1).map(|t| &t.tok) != Some(&Tok::Sym('=')) => {
                return Err(at(start, format!("unknown command '{word}'")));
            }
            _ => default.ok_or_else(|| at(start, "expected a command"))?,
        };

        let (mut f, mut g, mut kind, mut tol, mut seed) = (None, None, None, None, None);
        while !self.at_job_end() {
            let (key_tok, key) = self.ident("option name")?;
            self.expect_sym('=')?;
            let duplicate = || at(key_tok, format!("duplicate option '{key}'"));
            match key {
                "kind" => {
                    let (t, word) = self.ident("integral kind")?;
                    if !command.takes_kind() {
                        return Err(at(key_tok, format!("'{command}' does not take a kind")));
                    }
                    let k = IntegralKind::from_str(word).map_err(|e| at(t, e.to_string()))?;
                    if kind.replace(k).is_some() {
                        return Err(duplicate());
                    }
                }
                "tol" => {
                    let t = self.peek();
                    let v = self.number()?;
                    if !(v > 0.0) {
                        return Err(at(t, format!("tolerance must be positive, got {v}")));
                    }
                    if tol.replace(v).is_some() {
                        return Err(duplicate());
                    }
                }
                "seed" => {
                    let t = self.next();
                    let v = match &t.tok {
                        Tok::Number { raw, .. } => raw
                            .parse::<u64>()
                            .map_err(|_| at(t, format!("seed must be a non-negative integer, got {raw}")))?,
                        other => return Err(at(t, format!("expected seed, found {}", describe(other)))),
                    };
                    if seed.replace(v).is_some() {
                        return Err(duplicate());
                    }
                }
                "f" | "g" => {
                    let spec = self.term(key)?;
                    let slot = if key == "f" { &mut f } else { &mut g };
                    if slot.replace(spec).is_some() {
                        return Err(duplicate());
                    }
                }
                other => return Err(at(key_tok, format!("unknown option '{other}'"))),
            }
        }
        let end = self.peek();
        Ok(JobSpec {
            command,
            f: f.ok_or_else(|| at(end, "missing function f"))?,
            g: g.ok_or_else(|| at(end, "missing function g"))?,
            kind: if command.takes_kind() { Some(kind.unwrap_or(IntegralKind::K)) } else { None },
            tol: tol.unwrap_or(DEFAULT_TOL),
            seed: seed.unwrap_or(DEFAULT_SEED),
        })
    }

    fn term(&mut self, name: &str) -> Result<FunctionSpec, ParseError> {
        let (fam_tok, family) = self.ident("function family")?;
        self.expect_sym('[')?;
        let a_tok = self.peek();
        let a = self.number()?;
        self.expect_sym(',')?;
        let b = self.number()?;
        self.expect_sym(']')?;
        let interval = Interval::new(a, b).map_err(|e| at(a_tok, e.to_string()))?;
        self.expect_sym('{')?;
        let mut fields: Vec<Field> = Vec::new();
        loop {
            if self.peek().tok == Tok::Sym('}') {
                self.pos += 1;
                break;
            }
            let (t, fname) = self.ident("field name")?;
            if fields.iter().any(|f| f.name == fname) {
                return Err(at(t, format!("duplicate field '{fname}'")));
            }
            self.expect_sym(':')?;
            let mut items = vec![self.item()?];
            while self.peek().tok == Tok::Sym(',') {
                self.pos += 1;
                items.push(self.item()?);
            }
            fields.push(Field { name: fname.to_string(), line: t.line, column: t.column, items });
            let sep = self.next();
            match sep.tok {
                Tok::Sym(';') => {}
                Tok::Sym('}') => break,
                ref other => return Err(at(sep, format!("expected ';' or '}}', found {}", describe(other)))),
            }
        }
        let payload = build_payload(fam_tok, family, interval, fields)?;
        let spec = FunctionSpec { name: name.to_string(), interval, payload };
        spec.build().map_err(|e| at(fam_tok, e.to_string()))?;
        Ok(spec)
    }

    fn item(&mut self) -> Result<(Item, usize, usize), ParseError> {
        let t = self.next();
        let item = match &t.tok {
            Tok::Number { value, .. } => Item::Num(*value),
            Tok::Ident(word) if self.peek().tok == Tok::Sym('(') => {
                self.pos += 1;
                let mut args = Vec::new();
                if self.peek().tok != Tok::Sym(')') {
                    args.push(self.number()?);
                    while self.peek().tok == Tok::Sym(',') {
                        self.pos += 1;
                        args.push(self.number()?);
                    }
                }
                self.expect_sym(')')?;
                Item::Call(word.clone(), args)
            }
            Tok::Ident(word) => Item::Word(word.clone()),
            other => return Err(at(t, format!("expected value, found {}", describe(other)))),
        };
        Ok((item, t.line, t.column))
    }
}

// ---------------------------------------------------------------- families

struct Fields {
    fields: Vec<Field>,
    family: String,
}

impl Fields {
    fn take(&mut self, name: &str) -> Option<Field> {
        let i = self.fields.iter().position(|f| f.name == name)?;
        Some(self.fields.remove(i))
    }

    fn finish(self) -> Result<(), ParseError> {
        match self.fields.first() {
            Some(f) => Err(ParseError {
                line: f.line,
                column: f.column,
                message: format!("unknown field '{}' for family '{}'", f.name, self.family),
            }),
            None => Ok(()),
        }
    }
}

fn field_err(f: &Field, message: impl Into<String>) -> ParseError {
    ParseError { line: f.line, column: f.column, message: message.into() }
}

fn numbers(f: &Field) -> Result<Vec<f64>, ParseError> {
    f.items
        .iter()
        .map(|(item, line, column)| match item {
            Item::Num(v) => Ok(*v),
            _ => Err(ParseError { line: *line, column: *column, message: format!("field '{}' takes numbers", f.name) }),
        })
        .collect()
}

fn single_number(f: &Field) -> Result<f64, ParseError> {
    match numbers(f)?.as_slice() {
        [v] => Ok(*v),
        _ => Err(field_err(f, format!("field '{}' takes one number", f.name))),
    }
}

fn formula_from_call(name: &str, args: &[f64]) -> Result<Formula, String> {
    match (name, args) {
        ("affine", [s]) => Ok(Formula::affine(*s, 0.0)),
        ("affine", [s, i]) => Ok(Formula::affine(*s, *i)),
        ("power", [c, e]) => Ok(Formula::power(*c, *e, 0.0)),
        ("power", [c, e, s]) => Ok(Formula::power(*c, *e, *s)),
        ("sin", [a, fr, p]) => Ok(Formula::sin(*a, *fr, *p)),
        ("sin", [a, fr]) => Ok(Formula::sin(*a, *fr, 0.0)),
        ("affine" | "power" | "sin", _) => Err(format!("wrong number of arguments for '{name}'")),
        _ => Err(format!("unknown formula '{name}'")),
    }
}

fn formulas(f: &Field) -> Result<Vec<Formula>, ParseError> {
    f.items
        .iter()
        .map(|(item, line, column)| {
            let err = |message: String| ParseError { line: *line, column: *column, message };
            match item {
                Item::Call(name, args) => formula_from_call(name, args).map_err(err),
                _ => Err(err(format!("field '{}' takes formulas such as affine(1,0)", f.name))),
            }
        })
        .collect()
}

fn jumps(f: &Field) -> Result<Vec<Jump>, ParseError> {
    f.items
        .iter()
        .map(|(item, line, column)| match item {
            Item::Call(name, args) if name == "jump" && args.len() == 3 => Ok(Jump::new(args[0], args[1], args[2])),
            _ => Err(ParseError {
                line: *line,
                column: *column,
                message: "jumps are written jump(at, left, right)".into(),
            }),
        })
        .collect()
}

fn variation_flag(f: &Field) -> Result<bool, ParseError> {
    match f.items.as_slice() {
        [(Item::Word(w), ..)] if w == "unknown" => Ok(false),
        [(Item::Word(w), ..)] if w == "known" => Ok(true),
        _ => Err(field_err(f, "field 'var' takes 'known' or 'unknown'")),
    }
}

fn build_payload(fam_tok: &Token, family: &str, iv: Interval, fields: Vec<Field>) -> Result<Payload, ParseError> {
    let mut fs = Fields { fields, family: family.to_string() };
    let missing = |name: &str| at(fam_tok, format!("family '{family}' requires field '{name}'"));
    let num_or = |fs: &mut Fields, name: &str, default: f64| -> Result<f64, ParseError> {
        fs.take(name).map_or(Ok(default), |f| single_number(&f))
    };
    let payload = match family {
        "step" => {
            let mut get = |name: &str| fs.take(name).ok_or_else(|| missing(name)).and_then(|f| numbers(&f));
            let (nodes, at_, on) = (get("nodes")?, get("at")?, get("on")?);
            Payload::Step { nodes, at: at_, on }
        }
        "affine" | "power" | "sin" | "pieces" | "lipschitz_pieces" => {
            let (breaks, fns) = if family == "pieces" || family == "lipschitz_pieces" {
                let breaks = numbers(&fs.take("breaks").ok_or_else(|| missing("breaks"))?)?;
                let fns = formulas(&fs.take("fns").ok_or_else(|| missing("fns"))?)?;
                (breaks, fns)
            } else {
                let formula = match family {
                    "affine" => Formula::affine(num_or(&mut fs, "slope", 0.0)?, num_or(&mut fs, "intercept", 0.0)?),
                    "power" => {
                        let coef = num_or(&mut fs, "coef", 1.0)?;
                        let exp = fs.take("exp").ok_or_else(|| missing("exp"))?;
                        Formula::power(coef, single_number(&exp)?, num_or(&mut fs, "shift", 0.0)?)
                    }
                    _ => Formula::sin(
                        num_or(&mut fs, "amp", 1.0)?,
                        num_or(&mut fs, "freq", 1.0)?,
                        num_or(&mut fs, "phase", 0.0)?,
                    ),
                };
                (vec![iv.a(), iv.b()], vec![formula])
            };
            let lip = fs.take("lip").map(|f| numbers(&f)).transpose()?;
            let js = fs.take("jumps").map(|f| jumps(&f)).transpose()?.unwrap_or_default();
            let variation_known = fs.take("var").map(|f| variation_flag(&f)).transpose()?.unwrap_or(true);
            Payload::Pieces { breaks, fns, lip, jumps: js, variation_known }
        }
        "monotone" | "monotone_jumps" => {
            let field = fs.take("fn").ok_or_else(|| missing("fn"))?;
            let formula = match formulas(&field)?.as_slice() {
                [f] => *f,
                _ => return Err(field_err(&field, "field 'fn' takes one formula")),
            };
            let js = fs.take("jumps").map(|f| jumps(&f)).transpose()?.unwrap_or_default();
            Payload::Monotone { formula, jumps: js }
        }
        other => return Err(at(fam_tok, format!("unknown family '{other}'"))),
    };
    fs.finish()?;
    Ok(payload)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    const CHI_VS_ID: &str =
        "integrate kind=K tol=1e-9 f=step[0,1]{nodes:0,0.5,1; at:0,1,1; on:0,1} g=affine[0,1]{slope:1}";

    #[test]
    fn parses_the_reference_job() {
        let job = parse_spec(CHI_VS_ID).unwrap();
        assert_eq!(job.command, Command::Integrate);
        assert_eq!(job.kind, Some(IntegralKind::K));
        assert_eq!(job.tol, 1e-9);
        assert_eq!(
            job.f.payload,
            Payload::Step { nodes: vec![0.0, 0.5, 1.0], at: vec![0.0, 1.0, 1.0], on: vec![0.0, 1.0] }
        );
        let f = job.f.build().unwrap();
        assert_eq!(f.eval(0.5).unwrap(), 1.0);
        assert_eq!(f.eval(0.49).unwrap(), 0.0);
        let g = job.g.build().unwrap();
        assert_eq!(g.eval(0.25).unwrap(), 0.25);
    }

    fn err(text: &str) -> ParseError {
        parse_spec(text).unwrap_err()
    }

    #[test]
    fn diagnostics() {
        let e = err("integrate kind=Q f=step[0,1]{nodes:0,1; at:0,0; on:0} g=affine[0,1]{slope:1}");
        assert!(e.message.contains("unknown integral kind 'Q'"), "{e}");
        assert_eq!((e.line, e.column), (1, 16));

        let e = err("integrate f=step[0,1]{nodes:0,0.7,0.3,1; at:0,0,0,0; on:0,0,0} g=affine[0,1]{slope:1}");
        assert!(e.message.contains("nodes not strictly increasing at index 2"), "{e}");

        let e = err("integrate f=affine[0,1]{slope:1\n} g=stair[0,1]{nodes:0,1}");
        assert_eq!((e.line, e.column, e.message.as_str()), (2, 5, "unknown family 'stair'"));

        let e = err("integrate f=affine[0,1]{slope:1} g=affine[0,1]{slope:1; jumps:jump(0,1,0)}");
        assert!(e.message.contains("invalid"), "{e}");

        let e = err("integrate f=affine[0,1]{slope 1} g=affine[0,1]{}");
        assert_eq!(e.column, 31);
        assert!(e.message.starts_with("expected ':'"));

        assert!(err("verify-main kind=K f=affine[0,1]{} g=affine[0,1]{}").message.contains("does not take a kind"));
        assert!(err("integrate f=affine[0,1]{}").message.contains("missing function g"));
        assert!(err("integrate tol=0 f=affine[0,1]{} g=affine[0,1]{}").message.contains("positive"));
        assert!(err("integrate seed=1.5 f=affine[0,1]{} g=affine[0,1]{}").message.contains("seed"));
        assert!(err("integrate f=affine[1,0]{} g=affine[0,1]{}").message.contains("invalid interval"));
        assert!(err("integrate f=affine[0,1]{slope:1; slope:2} g=affine[0,1]{}").message.contains("duplicate"));
        assert!(err("integrate f=affine[0,1]{colour:1} g=affine[0,1]{}").message.contains("unknown field"));
        assert!(err("integrate f=power[0,1]{exp:0.5} g=affine[0,1]{}").message.contains("not Lipschitz"));
        assert!(err("integrate f=affine[0,1]{} g=affine[0,1]{} $").message.contains("unexpected character"));
        assert!(err("frobnicate f=affine[0,1]{} g=affine[0,1]{}").message.contains("unknown command"));
        assert!(err("integrate f=affine[0,1]{slope:1e999} g=affine[0,1]{}").message.contains("invalid number"));
    }

    #[test]
    fn families_and_defaults() {
        let job = parse_spec(
            "oracle f=pieces[0,2]{breaks:0,1,2; fns:affine(1,0),sin(1,2,0.5); lip:1,3; jumps:jump(1,0.5,0)} \
             g=monotone[0,2]{fn:power(1,0.5); jumps:jump(1,0,0.25)}",
        )
        .unwrap();
        assert_eq!(job.kind, Some(IntegralKind::K));
        assert_eq!((job.tol, job.seed), (DEFAULT_TOL, DEFAULT_SEED));
        assert!(job.f.build().is_ok() && job.g.build().is_ok());

        let job = parse_spec("verify-bounds f=affine[0,1]{slope:1; var:unknown} g=sin[0,1]{freq:3}").unwrap();
        assert_eq!(job.kind, None);
        assert_eq!(job.f.build().unwrap().variation_bound(), None);
    }

    #[test]
    fn batches_and_comments() {
        let text = "# two jobs\nintegrate f=affine[0,1]{slope:1}\n  g=step[0,1]{nodes:0,1; at:0,1;\n on:0}\n\n\
                    f=affine[0,1]{} g=affine[0,1]{slope:2} # inline\n";
        let err = parse_jobs(text, None).unwrap_err();
        assert_eq!((err.line, err.message.as_str()), (2, "missing function g"), "{err}");
        let text = text.replace("integrate f=affine[0,1]{slope:1}\n", "integrate f=affine[0,1]{slope:1} ");
        let jobs = parse_jobs(&text, Some(Command::Integrate)).unwrap();
        assert_eq!(jobs.len(), 2);
        assert!(parse_jobs(&text, Some(Command::Oracle)).unwrap_err().message.contains("does not match"));
        assert!(parse_spec(&text).unwrap_err().message.contains("expected a command"));
        let two = "oracle f=affine[0,1]{} g=affine[0,1]{}\noracle f=affine[0,1]{} g=affine[0,1]{}";
        assert_eq!(parse_spec(two).unwrap_err(), ParseError { line: 2, column: 1, message: "expected a single job".into() });
    }

    fn finite() -> impl Strategy<Value = f64> {
        prop_oneof![-10.0..10.0f64, (-300i32..300).prop_map(|e| 1.5 * 10f64.powi(e)), Just(0.1), Just(-0.0)]
    }

    fn function_spec(name: &'static str) -> impl Strategy<Value = FunctionSpec> {
        let iv = Interval::unit();
        let step = (1usize..6).prop_flat_map(move |m| {
            (
                proptest::collection::btree_set(1u32..1000, m - 1),
                proptest::collection::vec(finite(), m + 1),
                proptest::collection::vec(finite(), m),
            )
                .prop_map(move |(inner, at, on)| {
                    let mut nodes = vec![0.0];
                    nodes.extend(inner.into_iter().map(|k| k as f64 / 1000.0));
                    nodes.push(1.0);
                    Payload::Step { nodes, at, on }
                })
        });
        let pieces = (-5.0..5.0f64, -5.0..5.0f64, 0.1..5.0f64, any::<bool>(), any::<bool>(), -1.0..1.0f64).prop_map(
            |(s, c, freq, lip, var, jump)| Payload::Pieces {
                breaks: vec![0.0, 0.5, 1.0],
                fns: vec![Formula::affine(s, c), Formula::sin(c, freq, s)],
                lip: lip.then(|| vec![s.abs() + 1.0, c.abs() * freq + 1.0]),
                jumps: vec![Jump::new(0.25, jump, -jump)],
                variation_known: var,
            },
        );
        let monotone = (0.1..3.0f64, 0.2..4.0f64, 0.0..1.0f64).prop_map(|(c, e, j)| Payload::Monotone {
            formula: Formula::power(c, e, 0.0),
            jumps: vec![Jump::new(0.5, j, 0.0)],
        });
        prop_oneof![step, pieces, monotone].prop_map(move |payload| FunctionSpec {
            name: name.into(),
            interval: iv,
            payload,
        })
    }

    fn job() -> impl Strategy<Value = JobSpec> {
        (
            prop::sample::select(Command::ALL.to_vec()),
            prop::sample::select(IntegralKind::ALL.to_vec()),
            function_spec("f"),
            function_spec("g"),
            1e-300..1.0f64,
            any::<u64>(),
        )
            .prop_map(|(command, kind, f, g, tol, seed)| JobSpec {
                command,
                kind: command.takes_kind().then_some(kind),
                f,
                g,
                tol,
                seed,
            })
    }

    proptest! {
        #[test]
        fn render_round_trips(job in job()) {
            let text = render(&job);
            prop_assert_eq!(parse_spec(&text), Ok(job), "{}", text);
        }
    }
}
