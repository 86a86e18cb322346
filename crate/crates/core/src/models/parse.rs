//! Reader and writer for the plain-text model format.
//!
//! ```text
//! # E x epsilon, linear coupling only
//! name e-linear
//! dim 2; params 2
//! H[1][1] = Q1
//! H[1][2] = Q2
//! H[2][2] = -Q1
//! ```
//!
//! Statements end at `;` or a newline, `#` comments run to end of line, indices
//! are 1-based and unspecified entries are zero. A lower-triangle entry is only
//! accepted when it repeats its upper-triangle partner.

use super::poly::Polynomial;
use super::{HamiltonianModel, ModelBody, PolyMatrix};
use crate::error::{Error, Result};
use crate::linalg::MAX_DIM;

#[derive(Debug, Clone, PartialEq)]
enum Tok {
    Ident(String),
    Number(String),
    Sym(char),
    Sep,
}

#[derive(Debug, Clone)]
struct Token {
    tok: Tok,
    line: usize,
    column: usize,
}

fn syntax(line: usize, column: usize, message: impl Into<String>) -> Error {
    Error::Syntax { line, column, message: message.into() }
}

fn lex(src: &str) -> Result<Vec<Token>> {
    let mut out = Vec::new();
    let chars: Vec<char> = src.chars().collect();
    let (mut line, mut column) = (1usize, 1usize);
    let mut i = 0;
    while i < chars.len() {
        let c = chars[i];
        let start = (line, column);
        match c {
            '\n' | ';' => {
                out.push(Token { tok: Tok::Sep, line, column });
                i += 1;
                if c == '\n' {
                    line += 1;
                    column = 1;
                } else {
                    column += 1;
                }
            }
            '#' => {
                while i < chars.len() && chars[i] != '\n' {
                    i += 1;
                    column += 1;
                }
            }
            c if c.is_whitespace() => {
                i += 1;
                column += 1;
            }
            '[' | ']' | '=' | '+' | '-' | '*' | '^' => {
                out.push(Token { tok: Tok::Sym(c), line, column });
                i += 1;
                column += 1;
            }
            c if c.is_ascii_digit() || c == '.' => {
                let begin = i;
                while i < chars.len() && (chars[i].is_ascii_digit() || chars[i] == '.') {
                    i += 1;
                }
                if i < chars.len() && (chars[i] == 'e' || chars[i] == 'E') {
                    let mut j = i + 1;
                    if j < chars.len() && (chars[j] == '+' || chars[j] == '-') {
                        j += 1;
                    }
                    if j < chars.len() && chars[j].is_ascii_digit() {
                        i = j;
                        while i < chars.len() && chars[i].is_ascii_digit() {
                            i += 1;
                        }
                    }
                }
                let text: String = chars[begin..i].iter().collect();
                column += i - begin;
                out.push(Token { tok: Tok::Number(text), line: start.0, column: start.1 });
            }
            c if c.is_alphabetic() || c == '_' => {
                let begin = i;
                while i < chars.len() && (chars[i].is_alphanumeric() || chars[i] == '_') {
                    i += 1;
                }
                let text: String = chars[begin..i].iter().collect();
                column += i - begin;
                out.push(Token { tok: Tok::Ident(text), line: start.0, column: start.1 });
            }
            other => return Err(syntax(line, column, format!("unexpected character '{other}'"))),
        }
    }
    Ok(out)
}

struct Entry {
    row: usize,
    col: usize,
    poly: Polynomial,
    /// Largest variable index referenced, with its position.
    max_var: Option<(usize, usize, usize)>,
    line: usize,
    column: usize,
}

struct Parser {
    toks: Vec<Token>,
    pos: usize,
    eof: (usize, usize),
}

impl Parser {
    fn peek(&self) -> Option<&Token> {
        self.toks.get(self.pos)
    }

    fn here(&self) -> (usize, usize) {
        self.peek().map(|t| (t.line, t.column)).unwrap_or(self.eof)
    }

    fn next(&mut self) -> Option<Token> {
        let t = self.toks.get(self.pos).cloned();
        self.pos += 1;
        t
    }

    fn at_statement_end(&self) -> bool {
        matches!(self.peek(), None | Some(Token { tok: Tok::Sep, .. }))
    }

    fn expect_sym(&mut self, sym: char) -> Result<()> {
        let (line, column) = self.here();
        match self.next() {
            Some(Token { tok: Tok::Sym(c), .. }) if c == sym => Ok(()),
            _ => Err(syntax(line, column, format!("expected '{sym}'"))),
        }
    }

    fn expect_int(&mut self, what: &str) -> Result<usize> {
        let (line, column) = self.here();
        match self.next() {
            Some(Token { tok: Tok::Number(text), .. }) if text.chars().all(|c| c.is_ascii_digit()) => text
                .parse()
                .map_err(|_| syntax(line, column, format!("{what} is out of range"))),
            _ => Err(syntax(line, column, format!("expected an integer {what}"))),
        }
    }

    fn expect_statement_end(&mut self) -> Result<()> {
        if self.at_statement_end() {
            self.next();
            Ok(())
        } else {
            let (line, column) = self.here();
            Err(syntax(line, column, "expected end of statement"))
        }
    }

    /// `poly := [sign] term (sign term)*`
    fn polynomial(&mut self) -> Result<(Polynomial, Option<(usize, usize, usize)>)> {
        let mut poly = Polynomial::zero();
        let mut max_var: Option<(usize, usize, usize)> = None;
        let mut sign = 1.0;
        if let Some(Token { tok: Tok::Sym(c @ ('+' | '-')), .. }) = self.peek() {
            if *c == '-' {
                sign = -1.0;
            }
            self.pos += 1;
        }
        loop {
            let (coeff, exps, var) = self.term()?;
            if let Some(v) = var {
                if max_var.is_none_or(|m| v.0 > m.0) {
                    max_var = Some(v);
                }
            }
            poly.add_term(sign * coeff, &exps);
            match self.peek() {
                Some(Token { tok: Tok::Sym('+'), .. }) => sign = 1.0,
                Some(Token { tok: Tok::Sym('-'), .. }) => sign = -1.0,
                _ => break,
            }
            self.pos += 1;
        }
        Ok((poly, max_var))
    }

    /// `term := factor ('*' factor)*`, `factor := number | Q<k> ['^' int]`
    #[allow(clippy::type_complexity)]
    fn term(&mut self) -> Result<(f64, Vec<u32>, Option<(usize, usize, usize)>)> {
        let mut coeff = 1.0;
        let mut exps: Vec<u32> = Vec::new();
        let mut max_var: Option<(usize, usize, usize)> = None;
        loop {
            let (line, column) = self.here();
            match self.next() {
                Some(Token { tok: Tok::Number(text), .. }) => {
                    let v: f64 = text
                        .parse()
                        .map_err(|_| syntax(line, column, format!("malformed number '{text}'")))?;
                    coeff *= v;
                }
                Some(Token { tok: Tok::Ident(name), .. }) => {
                    let index = name
                        .strip_prefix('Q')
                        .filter(|d| !d.is_empty() && d.chars().all(|c| c.is_ascii_digit()))
                        .and_then(|d| d.parse::<usize>().ok())
                        .filter(|&k| k >= 1)
                        .ok_or_else(|| {
                            syntax(line, column, format!("unknown symbol '{name}' (expected Q1, Q2, ...)"))
                        })?;
                    let mut power = 1u32;
                    if let Some(Token { tok: Tok::Sym('^'), .. }) = self.peek() {
                        self.pos += 1;
                        power = self.expect_int("exponent")? as u32;
                    }
                    if exps.len() < index {
                        exps.resize(index, 0);
                    }
                    exps[index - 1] += power;
                    if power > 0 && max_var.is_none_or(|m| index > m.0) {
                        max_var = Some((index, line, column));
                    }
                }
                _ => return Err(syntax(line, column, "expected a number or a variable")),
            }
            match self.peek() {
                Some(Token { tok: Tok::Sym('*'), .. }) => self.pos += 1,
                _ => break,
            }
        }
        Ok((coeff, exps, max_var))
    }
}

/// Parses model text into a polynomial [`HamiltonianModel`].
pub fn parse_model(src: &str) -> Result<HamiltonianModel> {
    let toks = lex(src)?;
    let last_line = src.lines().count().max(1);
    let last_col = src.lines().last().map_or(0, |l| l.chars().count()) + 1;
    let mut p = Parser { toks, pos: 0, eof: (last_line, last_col) };

    let mut dim: Option<usize> = None;
    let mut params: Option<usize> = None;
    let mut name: Option<String> = None;
    let mut entries: Vec<Entry> = Vec::new();

    while let Some(tok) = p.peek().cloned() {
        match tok.tok {
            Tok::Sep => {
                p.pos += 1;
            }
            Tok::Ident(ref word) if word == "dim" || word == "params" => {
                p.pos += 1;
                let value = p.expect_int(word)?;
                let slot = if word == "dim" { &mut dim } else { &mut params };
                if slot.replace(value).is_some() {
                    return Err(syntax(tok.line, tok.column, format!("duplicate '{word}' header")));
                }
                p.expect_statement_end()?;
            }
            Tok::Ident(ref word) if word == "name" => {
                p.pos += 1;
                // identifiers may contain dashes, which lex as separate symbols
                let (line, column) = p.here();
                let mut id = String::new();
                while !p.at_statement_end() {
                    match p.next().map(|t| t.tok) {
                        Some(Tok::Ident(part)) | Some(Tok::Number(part)) => id.push_str(&part),
                        Some(Tok::Sym('-')) => id.push('-'),
                        _ => return Err(syntax(line, column, "malformed model name")),
                    }
                }
                if id.is_empty() || id.starts_with('-') {
                    return Err(syntax(line, column, "expected an identifier after 'name'"));
                }
                if name.replace(id).is_some() {
                    return Err(syntax(tok.line, tok.column, "duplicate 'name' header"));
                }
                p.expect_statement_end()?;
            }
            Tok::Ident(ref word) if word == "H" => {
                p.pos += 1;
                p.expect_sym('[')?;
                let row = p.expect_int("row index")?;
                p.expect_sym(']')?;
                p.expect_sym('[')?;
                let col = p.expect_int("column index")?;
                p.expect_sym(']')?;
                p.expect_sym('=')?;
                let (poly, max_var) = p.polynomial()?;
                p.expect_statement_end()?;
                entries.push(Entry { row, col, poly, max_var, line: tok.line, column: tok.column });
            }
            _ => {
                return Err(syntax(
                    tok.line,
                    tok.column,
                    "expected 'dim', 'params', 'name' or an entry 'H[i][j] = ...'",
                ))
            }
        }
    }

    let (line, column) = p.eof;
    let n = dim.ok_or_else(|| syntax(line, column, "missing 'dim' header"))?;
    let d = params.ok_or_else(|| syntax(line, column, "missing 'params' header"))?;
    if !(2..=MAX_DIM).contains(&n) {
        return Err(Error::DimensionMismatch(format!(
            "matrix dimension {n} outside supported range 2..={MAX_DIM}"
        )));
    }
    if d == 0 {
        return Err(Error::DimensionMismatch("model needs at least one parameter".into()));
    }

    let mut upper: Vec<Option<Polynomial>> = vec![None; n * n];
    let mut lower: Vec<&Entry> = Vec::new();
    for e in &entries {
        if e.row == 0 || e.col == 0 || e.row > n || e.col > n {
            return Err(Error::DimensionMismatch(format!(
                "entry H[{}][{}] at line {}, column {} is outside a {n}x{n} matrix",
                e.row, e.col, e.line, e.column
            )));
        }
        if let Some((k, line, column)) = e.max_var {
            if k > d {
                return Err(Error::DimensionMismatch(format!(
                    "Q{k} at line {line}, column {column} exceeds params {d}"
                )));
            }
        }
        if e.row <= e.col {
            let slot = &mut upper[(e.row - 1) * n + (e.col - 1)];
            if slot.is_some() {
                return Err(syntax(
                    e.line,
                    e.column,
                    format!("entry H[{}][{}] given twice", e.row, e.col),
                ));
            }
            *slot = Some(e.poly.clone());
        } else {
            lower.push(e);
        }
    }
    for e in lower {
        match &upper[(e.col - 1) * n + (e.row - 1)] {
            Some(mirror) if *mirror == e.poly => {}
            Some(_) => return Err(Error::Asymmetry { row: e.col, col: e.row }),
            None => {
                return Err(syntax(
                    e.line,
                    e.column,
                    format!(
                        "only entries with i <= j are allowed; write H[{}][{}] instead",
                        e.col, e.row
                    ),
                ))
            }
        }
    }

    let mut polys = Vec::with_capacity(n * (n + 1) / 2);
    for i in 0..n {
        for j in i..n {
            polys.push(upper[i * n + j].take().unwrap_or_default());
        }
    }
    Ok(HamiltonianModel {
        name: name.unwrap_or_else(|| "custom".to_string()),
        dim_matrix: n,
        dim_params: d,
        body: ModelBody::Polynomial(PolyMatrix::new(n, polys)),
    })
}

/// Canonical text for a polynomial model; `None` for built-ins.
pub fn format_model(model: &HamiltonianModel) -> Option<String> {
    let ModelBody::Polynomial(pm) = &model.body else {
        return None;
    };
    let n = model.dim_matrix;
    let mut out = format!("name {}\ndim {n}\nparams {}\n", model.name, model.dim_params);
    for i in 0..n {
        for j in i..n {
            let p = pm.entry(i, j);
            if !p.is_zero() {
                out.push_str(&format!("H[{}][{}] = {p}\n", i + 1, j + 1));
            }
        }
    }
    Some(out)
}
