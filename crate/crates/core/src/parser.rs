//! Text formats for ontologies (`.fdl`) and queries (`.fq`).
//!
//! Ontology files are line oriented; `#` starts a comment:
//!
//! ```text
//! Museum SUBC Popular >= 0.6
//! EX locIn SUBC NOT Cheap >= 0.5
//! locIn SUBR Near >= 1
//! Museum(modernArt) >= 1
//! near(irish, comic) >= 0.7
//! ```
//!
//! Queries are Datalog-like rules ending in `.`. Bare identifiers are
//! variables, `_` is an anonymous variable and individuals are quoted:
//!
//! ```text
//! q(x) :- Cheap(x) >= 0.8, Popular(y) >= 0.6, near(x, y) >= 0.6.
//! q() :- near("irish", _).
//! ```

use std::collections::HashMap;

use crate::degree::{Degree, DegreeError};
use crate::error::{Error, Result, SourceError};
use crate::ontology::{
    Assertion, Axiom, BasicConcept, BasicRole, GeneralConcept, GeneralRole, Ontology, RESERVED_PREFIX,
};
use crate::query::{Atom, ConjunctiveQuery, Query, Term, ThresholdAtom, ThresholdQuery};

#[derive(Debug, Clone, PartialEq, Eq)]
enum Tok {
    Ident(String),
    Quoted(String),
    Number(String),
    Underscore,
    LParen,
    RParen,
    Comma,
    Ge,
    Minus,
    Dot,
    Turnstile,
}

impl Tok {
    fn describe(&self) -> String {
        match self {
            Tok::Ident(s) => format!("`{s}`"),
            Tok::Quoted(s) => format!("\"{s}\""),
            Tok::Number(s) => format!("`{s}`"),
            Tok::Underscore => "`_`".into(),
            Tok::LParen => "`(`".into(),
            Tok::RParen => "`)`".into(),
            Tok::Comma => "`,`".into(),
            Tok::Ge => "`>=`".into(),
            Tok::Minus => "`-`".into(),
            Tok::Dot => "`.`".into(),
            Tok::Turnstile => "`:-`".into(),
        }
    }
}

#[derive(Debug, Clone)]
struct Spanned {
    tok: Tok,
    line: usize,
    column: usize,
}

fn lex(text: &str) -> Result<Vec<Spanned>, SourceError> {
    let mut out = Vec::new();
    for (line_idx, raw_line) in text.lines().enumerate() {
        let line_no = line_idx + 1;
        let chars: Vec<char> = raw_line.chars().collect();
        let mut i = 0;
        while i < chars.len() {
            let c = chars[i];
            let column = i + 1;
            let push = |out: &mut Vec<Spanned>, tok| out.push(Spanned { tok, line: line_no, column });
            match c {
                '#' => break,
                c if c.is_whitespace() => i += 1,
                '(' => {
                    push(&mut out, Tok::LParen);
                    i += 1;
                }
                ')' => {
                    push(&mut out, Tok::RParen);
                    i += 1;
                }
                ',' => {
                    push(&mut out, Tok::Comma);
                    i += 1;
                }
                '-' => {
                    push(&mut out, Tok::Minus);
                    i += 1;
                }
                '.' => {
                    push(&mut out, Tok::Dot);
                    i += 1;
                }
                '>' if chars.get(i + 1) == Some(&'=') => {
                    push(&mut out, Tok::Ge);
                    i += 2;
                }
                ':' if chars.get(i + 1) == Some(&'-') => {
                    push(&mut out, Tok::Turnstile);
                    i += 2;
                }
                '"' => {
                    let start = i + 1;
                    let mut j = start;
                    while j < chars.len() && chars[j] != '"' {
                        j += 1;
                    }
                    if j == chars.len() {
                        return Err(SourceError::new(line_no, column, "unterminated quoted name"));
                    }
                    let name: String = chars[start..j].iter().collect();
                    if !is_name(&name) {
                        return Err(SourceError::new(line_no, column, format!("invalid individual name \"{name}\"")));
                    }
                    push(&mut out, Tok::Quoted(name));
                    i = j + 1;
                }
                c if c.is_ascii_digit() => {
                    let start = i;
                    i += 1;
                    while i < chars.len() {
                        let d = chars[i];
                        let continues = d.is_ascii_digit()
                            || ((d == '.' || d == '/') && chars.get(i + 1).is_some_and(|n| n.is_ascii_digit()));
                        if !continues {
                            break;
                        }
                        i += 1;
                    }
                    push(&mut out, Tok::Number(chars[start..i].iter().collect()));
                }
                c if c.is_alphabetic() || c == '_' => {
                    let start = i;
                    i += 1;
                    while i < chars.len() && (chars[i].is_alphanumeric() || chars[i] == '_') {
                        i += 1;
                    }
                    let word: String = chars[start..i].iter().collect();
                    if word == "_" {
                        push(&mut out, Tok::Underscore);
                    } else {
                        push(&mut out, Tok::Ident(word));
                    }
                }
                other => return Err(SourceError::new(line_no, column, format!("unexpected character `{other}`"))),
            }
        }
    }
    Ok(out)
}

fn is_name(s: &str) -> bool {
    let mut chars = s.chars();
    matches!(chars.next(), Some(c) if c.is_alphabetic() || c == '_')
        && chars.all(|c| c.is_alphanumeric() || c == '_')
        && s != "_"
}

const KEYWORDS: [&str; 4] = ["SUBC", "SUBR", "EX", "NOT"];

/// Cursor over the tokens of one statement.
struct Cursor<'a> {
    toks: &'a [Spanned],
    pos: usize,
    line: usize,
    end_column: usize,
}

impl<'a> Cursor<'a> {
    fn new(toks: &'a [Spanned], line: usize, end_column: usize) -> Self {
        Cursor { toks, pos: 0, line, end_column }
    }

    fn peek(&self) -> Option<&'a Spanned> {
        self.toks.get(self.pos)
    }

    fn peek_tok(&self) -> Option<&'a Tok> {
        self.peek().map(|s| &s.tok)
    }

    fn next(&mut self) -> Option<&'a Spanned> {
        let t = self.toks.get(self.pos);
        self.pos += 1;
        t
    }

    fn here(&self) -> (usize, usize) {
        match self.peek() {
            Some(s) => (s.line, s.column),
            None => (self.line, self.end_column),
        }
    }

    fn error(&self, message: impl Into<String>) -> SourceError {
        let (line, column) = self.here();
        SourceError::new(line, column, message)
    }

    fn unexpected(&self, wanted: &str) -> SourceError {
        match self.peek() {
            Some(s) => self.error(format!("expected {wanted}, found {}", s.tok.describe())),
            None => self.error(format!("expected {wanted}, found end of input")),
        }
    }

    fn expect(&mut self, tok: Tok, wanted: &str) -> Result<(), SourceError> {
        if self.peek_tok() == Some(&tok) {
            self.pos += 1;
            Ok(())
        } else {
            Err(self.unexpected(wanted))
        }
    }

    fn eat(&mut self, tok: &Tok) -> bool {
        if self.peek_tok() == Some(tok) {
            self.pos += 1;
            true
        } else {
            false
        }
    }

    fn eat_keyword(&mut self, kw: &str) -> bool {
        if matches!(self.peek_tok(), Some(Tok::Ident(w)) if w == kw) {
            self.pos += 1;
            true
        } else {
            false
        }
    }

    fn name(&mut self, what: &str) -> Result<String, SourceError> {
        match self.peek_tok() {
            Some(Tok::Ident(w)) if !KEYWORDS.contains(&w.as_str()) => {
                self.pos += 1;
                Ok(w.clone())
            }
            _ => Err(self.unexpected(what)),
        }
    }

    fn degree(&mut self) -> Result<Degree, SourceError> {
        let (line, column) = self.here();
        match self.next().map(|s| &s.tok) {
            Some(Tok::Number(text)) => text.parse::<Degree>().map_err(|e| {
                let msg = match e {
                    DegreeError::OutOfRange(_) => format!("degree {text} lies outside [0, 1]"),
                    other => other.to_string(),
                };
                SourceError::new(line, column, msg)
            }),
            Some(other) => {
                Err(SourceError::new(line, column, format!("expected a degree, found {}", other.describe())))
            }
            None => Err(SourceError::new(line, column, "expected a degree, found end of input")),
        }
    }

    fn finished(&self) -> Result<(), SourceError> {
        match self.peek() {
            None => Ok(()),
            Some(s) => Err(SourceError::new(s.line, s.column, format!("unexpected trailing {}", s.tok.describe()))),
        }
    }
}

#[derive(Clone, Copy, PartialEq, Eq, Debug)]
enum NameKind {
    Concept,
    Role,
}

/// Tracks which names are concepts and which are roles while parsing.
#[derive(Default)]
struct NameTable {
    kinds: HashMap<String, (NameKind, usize)>,
}

impl NameTable {
    fn record(&mut self, name: &str, kind: NameKind, line: usize, column: usize) -> Result<(), SourceError> {
        if name.starts_with(RESERVED_PREFIX) {
            return Err(SourceError::new(
                line,
                column,
                format!("name `{name}` uses the reserved prefix `{RESERVED_PREFIX}`"),
            ));
        }
        match self.kinds.get(name) {
            Some((existing, first_line)) if *existing != kind => Err(SourceError::new(
                line,
                column,
                format!(
                    "`{name}` is used as a {} here but as a {} on line {first_line}",
                    kind_name(kind),
                    kind_name(*existing)
                ),
            )),
            Some(_) => Ok(()),
            None => {
                self.kinds.insert(name.to_string(), (kind, line));
                Ok(())
            }
        }
    }
}

fn kind_name(k: NameKind) -> &'static str {
    match k {
        NameKind::Concept => "concept",
        NameKind::Role => "role",
    }
}

enum Line {
    Axiom(Axiom),
    Assertion(Assertion),
}

/// Parses an ontology in the `.fdl` syntax.
pub fn parse_ontology(text: &str) -> Result<Ontology> {
    let tokens = lex(text)?;
    let mut names = NameTable::default();
    let mut tbox = Vec::new();
    let mut abox = Vec::new();
    let mut start = 0;
    while start < tokens.len() {
        let line = tokens[start].line;
        let mut end = start;
        while end < tokens.len() && tokens[end].line == line {
            end += 1;
        }
        let line_len = text.lines().nth(line - 1).map_or(1, |l| l.chars().count() + 1);
        let mut cur = Cursor::new(&tokens[start..end], line, line_len);
        match parse_statement(&mut cur, &mut names)? {
            Line::Axiom(a) => tbox.push(a),
            Line::Assertion(a) => abox.push(a),
        }
        start = end;
    }
    Ontology::new(tbox, abox)
}

fn parse_statement(cur: &mut Cursor<'_>, names: &mut NameTable) -> Result<Line, SourceError> {
    let is_kw = |w: &str| cur.toks.iter().any(|t| matches!(&t.tok, Tok::Ident(x) if x == w));
    if is_kw("SUBC") {
        parse_concept_inclusion(cur, names).map(Line::Axiom)
    } else if is_kw("SUBR") {
        parse_role_inclusion(cur, names).map(Line::Axiom)
    } else {
        parse_assertion(cur, names).map(Line::Assertion)
    }
}

fn parse_role(cur: &mut Cursor<'_>, names: &mut NameTable) -> Result<BasicRole, SourceError> {
    let (line, column) = cur.here();
    let name = cur.name("a role name")?;
    names.record(&name, NameKind::Role, line, column)?;
    let inverted = cur.eat(&Tok::Minus);
    Ok(BasicRole { name, inverted })
}

fn parse_basic_concept(cur: &mut Cursor<'_>, names: &mut NameTable) -> Result<BasicConcept, SourceError> {
    if cur.eat_keyword("EX") {
        return Ok(BasicConcept::Exists(parse_role(cur, names)?));
    }
    let (line, column) = cur.here();
    let name = cur.name("a concept name or `EX`")?;
    names.record(&name, NameKind::Concept, line, column)?;
    Ok(BasicConcept::Named(name))
}

fn parse_bound(cur: &mut Cursor<'_>) -> Result<Degree, SourceError> {
    cur.expect(Tok::Ge, "`>=`")?;
    let (line, column) = cur.here();
    let d = cur.degree()?;
    if d.is_zero() {
        return Err(SourceError::new(line, column, "degree 0 statements are not allowed"));
    }
    Ok(d)
}

fn parse_concept_inclusion(cur: &mut Cursor<'_>, names: &mut NameTable) -> Result<Axiom, SourceError> {
    if matches!(cur.peek_tok(), Some(Tok::Ident(w)) if w == "NOT") {
        return Err(cur.error("negation is not allowed on the left-hand side of an inclusion"));
    }
    let lhs = parse_basic_concept(cur, names)?;
    if !cur.eat_keyword("SUBC") {
        return Err(cur.unexpected("`SUBC`"));
    }
    let negated = cur.eat_keyword("NOT");
    let rhs = parse_basic_concept(cur, names)?;
    let degree = parse_bound(cur)?;
    cur.finished()?;
    let rhs = if negated { GeneralConcept::Negated(rhs) } else { GeneralConcept::Positive(rhs) };
    Ok(Axiom::concept(lhs, rhs, degree))
}

fn parse_role_inclusion(cur: &mut Cursor<'_>, names: &mut NameTable) -> Result<Axiom, SourceError> {
    if matches!(cur.peek_tok(), Some(Tok::Ident(w)) if w == "NOT") {
        return Err(cur.error("negation is not allowed on the left-hand side of an inclusion"));
    }
    let lhs = parse_role(cur, names)?;
    if !cur.eat_keyword("SUBR") {
        return Err(cur.unexpected("`SUBR`"));
    }
    let negated = cur.eat_keyword("NOT");
    let rhs = parse_role(cur, names)?;
    let degree = parse_bound(cur)?;
    cur.finished()?;
    let rhs = if negated { GeneralRole::Negated(rhs) } else { GeneralRole::Positive(rhs) };
    Ok(Axiom::role(lhs, rhs, degree))
}

fn parse_assertion(cur: &mut Cursor<'_>, names: &mut NameTable) -> Result<Assertion, SourceError> {
    if cur.eat_keyword("EX") {
        let role = parse_role(cur, names)?;
        cur.expect(Tok::LParen, "`(`")?;
        let individual = cur.name("an individual name")?;
        cur.expect(Tok::RParen, "`)`")?;
        let degree = parse_bound(cur)?;
        cur.finished()?;
        return Ok(Assertion::concept(BasicConcept::Exists(role), individual, degree));
    }
    let (line, column) = cur.here();
    let predicate = cur.name("a concept or role name")?;
    cur.expect(Tok::LParen, "`(`")?;
    let first = cur.name("an individual name")?;
    let second = if cur.eat(&Tok::Comma) { Some(cur.name("an individual name")?) } else { None };
    cur.expect(Tok::RParen, "`)`")?;
    let degree = parse_bound(cur)?;
    cur.finished()?;
    Ok(match second {
        None => {
            names.record(&predicate, NameKind::Concept, line, column)?;
            Assertion::named(&predicate, &first, degree)
        }
        Some(second) => {
            names.record(&predicate, NameKind::Role, line, column)?;
            Assertion::role(predicate, first, second, degree)
        }
    })
}

/// Renders an ontology in the syntax accepted by [`parse_ontology`].
pub fn serialize_ontology(o: &Ontology) -> String {
    let mut out = String::new();
    for axiom in o.tbox() {
        out.push_str(&axiom.to_string());
        out.push('\n');
    }
    for assertion in o.abox() {
        out.push_str(&assertion.to_string());
        out.push('\n');
    }
    out
}

/// Parses exactly one query.
pub fn parse_query(text: &str) -> Result<Query> {
    let mut queries = parse_queries(text)?;
    match queries.len() {
        1 => Ok(queries.pop().unwrap()),
        0 => Err(SourceError::new(1, 1, "no query found").into()),
        n => Err(SourceError::new(1, 1, format!("expected one query, found {n}")).into()),
    }
}

/// Parses a sequence of queries, e.g. the output of a rewriting.
pub fn parse_queries(text: &str) -> Result<Vec<Query>> {
    let tokens = lex(text)?;
    let last_line = text.lines().count().max(1);
    let mut cur = Cursor::new(&tokens, last_line, 1);
    let mut queries = Vec::new();
    while cur.peek().is_some() {
        queries.push(parse_one_query(&mut cur)?);
    }
    Ok(queries)
}

fn parse_term(cur: &mut Cursor<'_>, in_head: bool) -> Result<Term, SourceError> {
    let (line, column) = cur.here();
    match cur.next().map(|s| &s.tok) {
        Some(Tok::Ident(w)) => Ok(Term::Variable(w.clone())),
        Some(Tok::Quoted(w)) => Ok(Term::Individual(w.clone())),
        Some(Tok::Underscore) if !in_head => Ok(Term::Anonymous),
        Some(Tok::Underscore) => Err(SourceError::new(line, column, "`_` cannot be an answer variable")),
        Some(other) => Err(SourceError::new(line, column, format!("expected a term, found {}", other.describe()))),
        None => Err(SourceError::new(line, column, "expected a term, found end of input")),
    }
}

fn parse_one_query(cur: &mut Cursor<'_>) -> Result<Query> {
    let (line, column) = cur.here();
    let name = match cur.next().map(|s| &s.tok) {
        Some(Tok::Ident(w)) => w.clone(),
        _ => return Err(SourceError::new(line, column, "expected a query name").into()),
    };
    cur.expect(Tok::LParen, "`(`")?;
    let mut head = Vec::new();
    if !cur.eat(&Tok::RParen) {
        loop {
            head.push(parse_term(cur, true)?);
            if cur.eat(&Tok::RParen) {
                break;
            }
            cur.expect(Tok::Comma, "`,` or `)`")?;
        }
    }
    cur.expect(Tok::Turnstile, "`:-`")?;
    let mut atoms: Vec<(Atom, Option<Degree>)> = Vec::new();
    if !cur.eat(&Tok::Dot) {
        loop {
            let (aline, acol) = cur.here();
            let predicate = match cur.next().map(|s| &s.tok) {
                Some(Tok::Ident(w)) => w.clone(),
                _ => return Err(SourceError::new(aline, acol, "expected an atom").into()),
            };
            cur.expect(Tok::LParen, "`(`")?;
            let first = parse_term(cur, false)?;
            let atom = if cur.eat(&Tok::Comma) {
                let second = parse_term(cur, false)?;
                Atom::role(predicate, first, second)
            } else {
                Atom::concept(predicate, first)
            };
            cur.expect(Tok::RParen, "`)`")?;
            let bound = if cur.eat(&Tok::Ge) {
                let (bline, bcol) = cur.here();
                let d = cur.degree()?;
                if d.is_zero() {
                    return Err(SourceError::new(bline, bcol, "threshold 0 is not allowed").into());
                }
                Some(d)
            } else {
                None
            };
            atoms.push((atom, bound));
            if cur.eat(&Tok::Dot) {
                break;
            }
            cur.expect(Tok::Comma, "`,` or `.`")?;
        }
    }
    let thresholded = atoms.iter().filter(|(_, b)| b.is_some()).count();
    let to_source = |e: Error| match e {
        Error::InvalidQuery(m) => Error::Parse(SourceError::new(line, column, m)),
        other => other,
    };
    if thresholded == 0 && !atoms.is_empty() {
        let atoms = atoms.into_iter().map(|(a, _)| a).collect();
        ConjunctiveQuery::new(name, head, atoms).map(Query::Conjunctive).map_err(to_source)
    } else if thresholded == atoms.len() {
        let atoms = atoms.into_iter().map(|(a, b)| ThresholdAtom::new(a, b.unwrap())).collect();
        ThresholdQuery::new(name, head, atoms).map(Query::Threshold).map_err(to_source)
    } else {
        Err(SourceError::new(line, column, "either every atom or no atom may carry a threshold").into())
    }
}

/// Renders a query in the syntax accepted by [`parse_query`].
pub fn serialize_query(q: &Query) -> String {
    q.to_string()
}
