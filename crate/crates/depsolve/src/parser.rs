//! Dependency DSL and CSV input.
//!
//! ```text
//! schema R(A,B,C)
//! fd R: A -> B        # functional dependency
//! ind R[A] <= S[E]    # inclusion dependency
//! ia R: A _|_ B C     # independence atom
//! ```

use std::collections::BTreeSet;
use std::fmt;
use std::path::Path;
use std::sync::Arc;

use serde::Serialize;

use crate::error::Error;
use crate::model::{AttrId, AttrSet, DatabaseSchema, Dependency, DependencySet, RelId};

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct SourceSpan {
    pub file: String,
    pub line: usize,
    pub column: usize,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum ParseErrorKind {
    Lex,
    Syntax,
    UnknownAttribute,
    DuplicateRelation,
    ArityMismatch,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ParseError {
    pub span: SourceSpan,
    pub message: String,
    pub kind: ParseErrorKind,
}

impl fmt::Display for ParseError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}:{}: {}", self.span.file, self.span.line, self.span.column, self.message)
    }
}

impl std::error::Error for ParseError {}

#[derive(Clone, Debug, PartialEq, Eq)]
enum Tok {
    Ident(String),
    LParen,
    RParen,
    LBrack,
    RBrack,
    Comma,
    Colon,
    Arrow,
    Incl,
    Indep,
}

impl fmt::Display for Tok {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Tok::Ident(s) => write!(f, "`{s}`"),
            Tok::LParen => f.write_str("`(`"),
            Tok::RParen => f.write_str("`)`"),
            Tok::LBrack => f.write_str("`[`"),
            Tok::RBrack => f.write_str("`]`"),
            Tok::Comma => f.write_str("`,`"),
            Tok::Colon => f.write_str("`:`"),
            Tok::Arrow => f.write_str("`->`"),
            Tok::Incl => f.write_str("`<=`"),
            Tok::Indep => f.write_str("`_|_`"),
        }
    }
}

#[derive(Clone, Debug)]
struct Token {
    tok: Tok,
    col: usize,
}

struct Ctx<'a> {
    file: &'a str,
    line: usize,
    line_len: usize,
}

impl Ctx<'_> {
    fn err(&self, column: usize, kind: ParseErrorKind, message: impl Into<String>) -> ParseError {
        ParseError {
            span: SourceSpan {
                file: self.file.to_string(),
                line: self.line,
                column: column.clamp(1, self.line_len.max(1)),
            },
            message: message.into(),
            kind,
        }
    }
}

fn lex(line: &str, ctx: &Ctx) -> Result<Vec<Token>, ParseError> {
    let chars: Vec<char> = line.chars().collect();
    let mut out = Vec::new();
    let mut i = 0;
    while i < chars.len() {
        let c = chars[i];
        let col = i + 1;
        let rest = |s: &str| chars[i..].iter().take(s.len()).copied().eq(s.chars());
        if c == '#' {
            break;
        } else if c.is_whitespace() {
            i += 1;
            continue;
        }
        let (tok, len) = if rest("_|_") {
            (Tok::Indep, 3)
        } else if rest("->") {
            (Tok::Arrow, 2)
        } else if rest("<=") {
            (Tok::Incl, 2)
        } else if c.is_alphanumeric() || c == '_' {
            let start = i;
            let mut j = i;
            while j < chars.len() && (chars[j].is_alphanumeric() || chars[j] == '_') {
                j += 1;
            }
            (Tok::Ident(chars[start..j].iter().collect()), j - start)
        } else {
            let t = match c {
                '(' => Tok::LParen,
                ')' => Tok::RParen,
                '[' => Tok::LBrack,
                ']' => Tok::RBrack,
                ',' => Tok::Comma,
                ':' => Tok::Colon,
                _ => return Err(ctx.err(col, ParseErrorKind::Lex, format!("unexpected character `{c}`"))),
            };
            (t, 1)
        };
        out.push(Token { tok, col });
        i += len;
    }
    Ok(out)
}

struct Cursor<'a, 'c> {
    toks: &'a [Token],
    pos: usize,
    ctx: &'a Ctx<'c>,
}

impl Cursor<'_, '_> {
    fn peek(&self) -> Option<&Tok> {
        self.toks.get(self.pos).map(|t| &t.tok)
    }

    fn col(&self) -> usize {
        self.toks.get(self.pos).map_or(self.ctx.line_len + 1, |t| t.col)
    }

    fn syntax(&self, what: &str) -> ParseError {
        let found = self.peek().map_or("end of line".to_string(), |t| t.to_string());
        self.ctx.err(self.col(), ParseErrorKind::Syntax, format!("expected {what}, found {found}"))
    }

    fn expect(&mut self, t: Tok) -> Result<(), ParseError> {
        if self.peek() == Some(&t) {
            self.pos += 1;
            Ok(())
        } else {
            Err(self.syntax(&t.to_string()))
        }
    }

    fn ident(&mut self) -> Result<(String, usize), ParseError> {
        match self.peek() {
            Some(Tok::Ident(s)) => {
                let r = (s.clone(), self.col());
                self.pos += 1;
                Ok(r)
            }
            _ => Err(self.syntax("identifier")),
        }
    }

    /// Whitespace-separated identifiers, possibly none.
    fn attr_list(&mut self) -> Vec<(String, usize)> {
        let mut v = Vec::new();
        while let Some(Tok::Ident(s)) = self.peek() {
            v.push((s.clone(), self.col()));
            self.pos += 1;
        }
        v
    }

    /// Comma-separated identifiers, at least one.
    fn attr_seq(&mut self) -> Result<Vec<(String, usize)>, ParseError> {
        let mut v = vec![self.ident()?];
        while self.peek() == Some(&Tok::Comma) {
            self.pos += 1;
            v.push(self.ident()?);
        }
        Ok(v)
    }

    fn end(&self) -> Result<(), ParseError> {
        if self.pos < self.toks.len() {
            Err(self.syntax("end of line"))
        } else {
            Ok(())
        }
    }
}

type Names = Vec<(String, usize)>;

enum Stmt {
    Schema { name: (String, usize), attrs: Names },
    Fd { rel: (String, usize), lhs: Names, rhs: Names },
    Ia { rel: (String, usize), left: Names, right: Names },
    Ind { lrel: (String, usize), lhs: Names, rrel: (String, usize), rhs: Names, col: usize },
}

fn parse_stmt(toks: &[Token], ctx: &Ctx) -> Result<Stmt, ParseError> {
    let mut c = Cursor { toks, pos: 0, ctx };
    let (kw, kw_col) = c.ident()?;
    let stmt = match kw.as_str() {
        "schema" => {
            let name = c.ident()?;
            c.expect(Tok::LParen)?;
            let attrs = c.attr_seq()?;
            c.expect(Tok::RParen)?;
            Stmt::Schema { name, attrs }
        }
        "fd" => {
            let rel = c.ident()?;
            c.expect(Tok::Colon)?;
            let lhs = c.attr_list();
            c.expect(Tok::Arrow)?;
            let rhs = c.attr_list();
            Stmt::Fd { rel, lhs, rhs }
        }
        "ia" => {
            let rel = c.ident()?;
            c.expect(Tok::Colon)?;
            let left = c.attr_list();
            c.expect(Tok::Indep)?;
            let right = c.attr_list();
            Stmt::Ia { rel, left, right }
        }
        "ind" => {
            let lrel = c.ident()?;
            c.expect(Tok::LBrack)?;
            let lhs = c.attr_seq()?;
            c.expect(Tok::RBrack)?;
            let col = c.col();
            c.expect(Tok::Incl)?;
            let rrel = c.ident()?;
            c.expect(Tok::LBrack)?;
            let rhs = c.attr_seq()?;
            c.expect(Tok::RBrack)?;
            Stmt::Ind { lrel, lhs, rrel, rhs, col }
        }
        other => {
            return Err(ctx.err(
                kw_col,
                ParseErrorKind::Syntax,
                format!("expected `schema`, `fd`, `ind` or `ia`, found `{other}`"),
            ))
        }
    };
    c.end()?;
    Ok(stmt)
}

fn resolve_rel(schema: &DatabaseSchema, (name, col): &(String, usize), ctx: &Ctx) -> Result<RelId, ParseError> {
    schema
        .relation_by_name(name)
        .ok_or_else(|| ctx.err(*col, ParseErrorKind::UnknownAttribute, format!("unknown relation `{name}`")))
}

fn resolve_attr(schema: &DatabaseSchema, rel: RelId, (name, col): &(String, usize), ctx: &Ctx) -> Result<AttrId, ParseError> {
    match schema.attr_by_name(name) {
        Some(a) if schema.relation_of(a) == rel => Ok(a),
        _ => Err(ctx.err(
            *col,
            ParseErrorKind::UnknownAttribute,
            format!("`{name}` is not an attribute of {}", schema.rel_name(rel)),
        )),
    }
}

fn resolve_seq(schema: &DatabaseSchema, rel: RelId, names: &Names, ctx: &Ctx) -> Result<Vec<AttrId>, ParseError> {
    let mut seen = BTreeSet::new();
    let mut out = Vec::new();
    for n in names {
        let a = resolve_attr(schema, rel, n, ctx)?;
        if !seen.insert(a) {
            return Err(ctx.err(n.1, ParseErrorKind::Syntax, format!("`{}` repeated in an inclusion", n.0)));
        }
        out.push(a);
    }
    Ok(out)
}

fn resolve(stmt: &Stmt, schema: &DatabaseSchema, ctx: &Ctx) -> Result<Option<Dependency>, ParseError> {
    let set = |rel, names: &Names| -> Result<AttrSet, ParseError> {
        names.iter().map(|n| resolve_attr(schema, rel, n, ctx)).collect()
    };
    Ok(Some(match stmt {
        Stmt::Schema { .. } => return Ok(None),
        Stmt::Fd { rel, lhs, rhs } => {
            let r = resolve_rel(schema, rel, ctx)?;
            Dependency::Fd { rel: r, lhs: set(r, lhs)?, rhs: set(r, rhs)? }
        }
        Stmt::Ia { rel, left, right } => {
            let r = resolve_rel(schema, rel, ctx)?;
            Dependency::Ia { rel: r, left: set(r, left)?, right: set(r, right)? }
        }
        Stmt::Ind { lrel, lhs, rrel, rhs, col } => {
            if lhs.len() != rhs.len() {
                return Err(ctx.err(
                    *col,
                    ParseErrorKind::ArityMismatch,
                    format!("inclusion sides have lengths {} and {}", lhs.len(), rhs.len()),
                ));
            }
            let l = resolve_rel(schema, lrel, ctx)?;
            let r = resolve_rel(schema, rrel, ctx)?;
            Dependency::Ind {
                lhs_rel: l,
                lhs: resolve_seq(schema, l, lhs, ctx)?,
                rhs_rel: r,
                rhs: resolve_seq(schema, r, rhs, ctx)?,
            }
        }
    }))
}

/// Parses a full specification; schema lines may appear anywhere.
pub fn parse_spec(text: &str) -> Result<DependencySet, Vec<ParseError>> {
    parse_spec_named(text, "<input>")
}

pub fn parse_spec_named(text: &str, file: &str) -> Result<DependencySet, Vec<ParseError>> {
    let mut errors = Vec::new();
    let mut stmts = Vec::new();
    for (i, line) in text.lines().enumerate() {
        let ctx = Ctx { file, line: i + 1, line_len: line.chars().count() };
        match lex(line, &ctx) {
            Ok(toks) if toks.is_empty() => {}
            Ok(toks) => match parse_stmt(&toks, &ctx) {
                Ok(s) => stmts.push((i + 1, ctx.line_len, s)),
                Err(e) => errors.push(e),
            },
            Err(e) => errors.push(e),
        }
    }
    let mut schema = DatabaseSchema::new();
    for (line, line_len, s) in &stmts {
        let Stmt::Schema { name, attrs } = s else { continue };
        let ctx = Ctx { file, line: *line, line_len: *line_len };
        let names: Vec<&str> = attrs.iter().map(|a| a.0.as_str()).collect();
        match schema.add_relation(&name.0, &names) {
            Ok(_) => {}
            Err(Error::DuplicateRelation(n)) => errors.push(ctx.err(
                name.1,
                ParseErrorKind::DuplicateRelation,
                format!("relation `{n}` declared twice"),
            )),
            Err(Error::DuplicateAttribute(n)) => {
                let col = attrs.iter().find(|a| a.0 == n).map_or(name.1, |a| a.1);
                errors.push(ctx.err(
                    col,
                    ParseErrorKind::DuplicateRelation,
                    format!("attribute `{n}` already belongs to a declared relation"),
                ))
            }
            Err(e) => errors.push(ctx.err(name.1, ParseErrorKind::Syntax, e.to_string())),
        }
    }
    let mut deps = Vec::new();
    for (line, line_len, s) in &stmts {
        let ctx = Ctx { file, line: *line, line_len: *line_len };
        match resolve(s, &schema, &ctx) {
            Ok(Some(d)) => deps.push(d),
            Ok(None) => {}
            Err(e) => errors.push(e),
        }
    }
    if errors.is_empty() {
        Ok(DependencySet { schema: Arc::new(schema), deps })
    } else {
        errors.sort_by_key(|e| (e.span.line, e.span.column));
        Err(errors)
    }
}

/// Parses a single dependency against a known schema.
pub fn parse_dependency(text: &str, schema: &DatabaseSchema) -> Result<Dependency, Vec<ParseError>> {
    let line = text.trim_end_matches(['\n', '\r']);
    let ctx = Ctx { file: "<query>", line: 1, line_len: line.chars().count() };
    let toks = lex(line, &ctx).map_err(|e| vec![e])?;
    if toks.is_empty() {
        return Err(vec![ctx.err(1, ParseErrorKind::Syntax, "empty dependency")]);
    }
    let stmt = parse_stmt(&toks, &ctx).map_err(|e| vec![e])?;
    match resolve(&stmt, schema, &ctx) {
        Ok(Some(d)) => Ok(d),
        Ok(None) => Err(vec![ctx.err(1, ParseErrorKind::Syntax, "expected a dependency, found a schema")]),
        Err(e) => Err(vec![e]),
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum NullPolicy {
    #[default]
    LiteralEquality,
    DistinctPerRow,
}

#[derive(Clone, Debug)]
pub struct CsvOptions {
    pub delimiter: u8,
    pub header: bool,
    pub null_token: Option<String>,
    pub null_policy: NullPolicy,
}

impl Default for CsvOptions {
    fn default() -> Self {
        Self { delimiter: b',', header: true, null_token: None, null_policy: NullPolicy::default() }
    }
}

/// A relation read from CSV: column names and a set of string rows.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Table {
    pub name: String,
    pub columns: Vec<String>,
    pub rows: BTreeSet<Vec<String>>,
}

pub fn load_csv(path: &Path, opts: &CsvOptions) -> Result<Table, Error> {
    let file = std::fs::File::open(path).map_err(|e| Error::Io(format!("{}: {e}", path.display())))?;
    let name = path.file_stem().map_or("R".to_string(), |s| s.to_string_lossy().into_owned());
    read_csv(file, &name, opts)
}

pub fn read_csv<R: std::io::Read>(input: R, name: &str, opts: &CsvOptions) -> Result<Table, Error> {
    let mut rdr = csv::ReaderBuilder::new()
        .delimiter(opts.delimiter)
        .has_headers(false)
        .flexible(true)
        .from_reader(input);
    let mut records = rdr.records();
    let mut columns: Option<Vec<String>> = None;
    let mut rows = BTreeSet::new();
    let mut row_no = 0;
    if opts.header {
        match records.next() {
            Some(r) => {
                let r = r.map_err(|e| Error::Io(e.to_string()))?;
                columns = Some(r.iter().map(|s| s.trim().to_string()).collect());
            }
            None => return Err(Error::EmptyRelation(name.to_string())),
        }
        row_no += 1;
    }
    for rec in records {
        row_no += 1;
        let rec = rec.map_err(|e| Error::Io(e.to_string()))?;
        let width = columns.get_or_insert_with(|| (1..=rec.len()).map(|i| format!("c{i}")).collect()).len();
        if rec.len() != width {
            return Err(Error::RaggedRow { row: row_no, found: rec.len(), expected: width });
        }
        let row = rec
            .iter()
            .map(|v| match (&opts.null_token, opts.null_policy) {
                (Some(t), NullPolicy::DistinctPerRow) if v == t => format!("\u{0}{t}#{row_no}"),
                _ => v.to_string(),
            })
            .collect();
        rows.insert(row);
    }
    if rows.is_empty() {
        return Err(Error::EmptyRelation(name.to_string()));
    }
    Ok(Table { name: name.to_string(), columns: columns.unwrap_or_default(), rows })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn single_fd() {
        let s = parse_spec("schema R(A,B)\nfd R: A -> B").unwrap();
        assert_eq!(s.deps, vec![Dependency::fd(0, [0], [1])]);
    }

    #[test]
    fn unary_inclusion_across_relations() {
        let s = parse_spec("schema R(A)\nschema S(B)\nind R[A] <= S[B]").unwrap();
        assert_eq!(s.deps, vec![Dependency::ind(0, vec![0], 1, vec![1])]);
    }

    #[test]
    fn arity_mismatch_is_reported_before_resolution() {
        let e = parse_spec("ind R[A,B] <= S[E]").unwrap_err();
        assert_eq!(e[0].kind, ParseErrorKind::ArityMismatch);
    }

    #[test]
    fn query_forms() {
        let s = parse_spec("schema Heart(p_id, t_id)\nschema R(A)").unwrap();
        let d = parse_dependency("ia Heart: p_id _|_ t_id", &s.schema).unwrap();
        assert_eq!(d, Dependency::ia(0, [0], [1]));
        assert_eq!(parse_dependency("fd R: -> A", &s.schema).unwrap(), Dependency::fd(1, AttrSet::new(), [2]));
        assert_eq!(parse_dependency("ia R: A _|_ A", &s.schema).unwrap(), Dependency::ca(1, 2));
    }

    #[test]
    fn diagnostics_carry_positions() {
        let e = parse_spec("schema R(A)\nfd R: A -> Q\nia R: A $ A").unwrap_err();
        assert_eq!(e.len(), 2);
        assert_eq!((e[0].span.line, e[0].span.column, e[0].kind), (2, 12, ParseErrorKind::UnknownAttribute));
        assert_eq!((e[1].span.line, e[1].span.column, e[1].kind), (3, 9, ParseErrorKind::Lex));
        let e = parse_spec("schema R(A)\nschema R(B)").unwrap_err();
        assert_eq!(e[0].kind, ParseErrorKind::DuplicateRelation);
        let e = parse_spec("schema R(A)\nfd R A -> A").unwrap_err();
        assert_eq!((e[0].kind, e[0].span.column), (ParseErrorKind::Syntax, 6));
    }

    #[test]
    fn comments_and_blank_lines() {
        let s = parse_spec("# header\n\nschema R(A,B) # trailing\nia R: A _|_ B\n").unwrap();
        assert_eq!(s.deps.len(), 1);
    }

    #[test]
    fn csv_rows_form_a_set() {
        let t = read_csv("x,y\na,1\na,1\nb,2\n".as_bytes(), "T", &CsvOptions::default()).unwrap();
        assert_eq!(t.columns, vec!["x", "y"]);
        assert_eq!(t.rows.len(), 2);
        let e = read_csv("x,y\n".as_bytes(), "T", &CsvOptions::default()).unwrap_err();
        assert_eq!(e, Error::EmptyRelation("T".into()));
        let e = read_csv("x,y\na\n".as_bytes(), "T", &CsvOptions::default()).unwrap_err();
        assert!(matches!(e, Error::RaggedRow { row: 2, .. }));
        let opts = CsvOptions { header: false, ..Default::default() };
        assert_eq!(read_csv("a,1\n".as_bytes(), "T", &opts).unwrap().columns, vec!["c1", "c2"]);
    }
}
