//! Text formats for nets and constraint sets.
//!
//! A net file starts with the header `tcpnet 1` and holds one declaration
//! per line:
//!
//! ```text
//! var J : black white
//! cp J -> S
//! i J > P
//! ci S ~ C | T A
//! cpt S | J=black P=black : red > white
//! cit S ~ C | T=m A=klm : S > C
//! ```
//!
//! A constraint file holds lines of the form
//! `allow (J,P): (black,white) (white,black)`. In both, `#` starts a
//! comment, blank lines are ignored and CRLF line endings are accepted.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt::{self, Write as _};

use tcpnet_core::model::{
    CiArcDecl, CitDecl, CitRowDecl, Constraint, ConstraintSet, CptDecl, CptRowDecl, ModelError, NetDraft,
    ValidationReport, VariableSpec,
};
use tcpnet_core::TcpNet;
use thiserror::Error;

pub const HEADER: &str = "tcpnet 1";

/// 1-based position in the input.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub struct SourceSpan {
    pub line: usize,
    pub column: usize,
}

impl fmt::Display for SourceSpan {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}", self.line, self.column)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum CodecError {
    #[error("{span}: {message}")]
    Syntax { span: SourceSpan, message: String },
    #[error("{span}: undeclared variable {name}")]
    UndeclaredVariable { span: SourceSpan, name: String },
    #[error("{span}: unknown value {value} for variable {variable}")]
    UnknownValue {
        span: SourceSpan,
        variable: String,
        value: String,
    },
    #[error("{span}: duplicate declaration of {what}")]
    Duplicate { span: SourceSpan, what: String },
    #[error("{span}: expected {expected} values, found {found}")]
    Arity {
        span: SourceSpan,
        expected: usize,
        found: usize,
    },
    #[error("{span}: {source}")]
    Constraint { span: SourceSpan, source: ModelError },
    #[error("invalid net:\n{0}")]
    Invalid(ValidationReport),
}

impl CodecError {
    pub fn span(&self) -> Option<SourceSpan> {
        match self {
            CodecError::Syntax { span, .. }
            | CodecError::UndeclaredVariable { span, .. }
            | CodecError::UnknownValue { span, .. }
            | CodecError::Duplicate { span, .. }
            | CodecError::Arity { span, .. }
            | CodecError::Constraint { span, .. } => Some(*span),
            CodecError::Invalid(_) => None,
        }
    }
}

// ---------------------------------------------------------------------------
// Lexing
// ---------------------------------------------------------------------------

#[derive(Debug, Clone, PartialEq, Eq)]
enum Tok {
    Word(String),
    Punct(&'static str),
}

#[derive(Debug, Clone)]
struct Token {
    tok: Tok,
    span: SourceSpan,
}

const PUNCT: [&str; 9] = ["->", ":", ">", "~", "|", "=", "(", ")", ","];

fn is_word_char(c: char) -> bool {
    c.is_alphanumeric() || c == '_' || c == '.'
}

fn is_identifier(s: &str) -> bool {
    let mut chars = s.chars();
    matches!(chars.next(), Some(c) if c.is_ascii_alphabetic() || c == '_')
        && chars.all(|c| c.is_ascii_alphanumeric() || c == '_')
}

/// Splits `text` into non-empty lines of tokens, dropping comments.
fn lex(text: &str) -> Result<Vec<Vec<Token>>, CodecError> {
    let mut lines = Vec::new();
    for (n, raw) in text.split('\n').enumerate() {
        let raw = raw.strip_suffix('\r').unwrap_or(raw);
        let line = raw.split('#').next().unwrap_or("");
        let chars: Vec<char> = line.chars().collect();
        let mut tokens = Vec::new();
        let mut i = 0;
        while i < chars.len() {
            let span = SourceSpan {
                line: n + 1,
                column: i + 1,
            };
            let c = chars[i];
            if c.is_whitespace() {
                i += 1;
            } else if is_word_char(c) {
                let start = i;
                while i < chars.len() && is_word_char(chars[i]) {
                    i += 1;
                }
                tokens.push(Token {
                    tok: Tok::Word(chars[start..i].iter().collect()),
                    span,
                });
            } else if let Some(p) = PUNCT.iter().find(|p| {
                let p: Vec<char> = p.chars().collect();
                chars[i..].starts_with(&p)
            }) {
                i += p.len();
                tokens.push(Token { tok: Tok::Punct(p), span });
            } else {
                return Err(CodecError::Syntax {
                    span,
                    message: format!("unexpected character {c:?}"),
                });
            }
        }
        if !tokens.is_empty() {
            lines.push(tokens);
        }
    }
    Ok(lines)
}

/// Cursor over one line's tokens.
struct Line<'a> {
    tokens: &'a [Token],
    pos: usize,
}

impl<'a> Line<'a> {
    fn new(tokens: &'a [Token]) -> Self {
        Line { tokens, pos: 0 }
    }

    /// Span of the next token, or just past the last one.
    fn here(&self) -> SourceSpan {
        match self.tokens.get(self.pos) {
            Some(t) => t.span,
            None => {
                let last = self.tokens.last().expect("lines are never empty");
                let width = match &last.tok {
                    Tok::Word(w) => w.chars().count(),
                    Tok::Punct(p) => p.len(),
                };
                SourceSpan {
                    line: last.span.line,
                    column: last.span.column + width,
                }
            }
        }
    }

    fn error<T>(&self, message: impl Into<String>) -> Result<T, CodecError> {
        Err(CodecError::Syntax {
            span: self.here(),
            message: message.into(),
        })
    }

    fn at_end(&self) -> bool {
        self.pos == self.tokens.len()
    }

    fn peek(&self, p: &str) -> bool {
        matches!(self.tokens.get(self.pos), Some(Token { tok: Tok::Punct(q), .. }) if *q == p)
    }

    fn eat(&mut self, p: &str) -> bool {
        let hit = self.peek(p);
        if hit {
            self.pos += 1;
        }
        hit
    }

    fn expect(&mut self, p: &str) -> Result<(), CodecError> {
        if self.eat(p) {
            Ok(())
        } else {
            self.error(format!("expected `{p}`"))
        }
    }

    fn word(&mut self, what: &str) -> Result<(String, SourceSpan), CodecError> {
        match self.tokens.get(self.pos) {
            Some(Token { tok: Tok::Word(w), span }) => {
                self.pos += 1;
                Ok((w.clone(), *span))
            }
            _ => self.error(format!("expected {what}")),
        }
    }

    fn name(&mut self) -> Result<(String, SourceSpan), CodecError> {
        let (w, span) = self.word("a variable name")?;
        if !is_identifier(&w) {
            return Err(CodecError::Syntax {
                span,
                message: format!("{w:?} is not a valid variable name"),
            });
        }
        Ok((w, span))
    }

    fn end(&self) -> Result<(), CodecError> {
        if self.at_end() {
            Ok(())
        } else {
            self.error("unexpected trailing input")
        }
    }
}

// ---------------------------------------------------------------------------
// Nets
// ---------------------------------------------------------------------------

struct Names {
    domains: BTreeMap<String, Vec<String>>,
}

impl Names {
    fn var(&self, (name, span): &(String, SourceSpan)) -> Result<(), CodecError> {
        if self.domains.contains_key(name) {
            Ok(())
        } else {
            Err(CodecError::UndeclaredVariable {
                span: *span,
                name: name.clone(),
            })
        }
    }

    fn value(&self, var: &str, (value, span): &(String, SourceSpan)) -> Result<(), CodecError> {
        if self.domains[var].contains(value) {
            Ok(())
        } else {
            Err(CodecError::UnknownValue {
                span: *span,
                variable: var.to_string(),
                value: value.clone(),
            })
        }
    }
}

/// `Z1=v1 Z2=v2 ...`, stopping before `:`.
fn condition(line: &mut Line<'_>, names: &Names) -> Result<Vec<(String, String)>, CodecError> {
    let mut out: Vec<(String, String)> = Vec::new();
    while !line.peek(":") && !line.at_end() {
        let var = line.name()?;
        names.var(&var)?;
        line.expect("=")?;
        let value = line.word("a value")?;
        names.value(&var.0, &value)?;
        if out.iter().any(|(v, _)| *v == var.0) {
            return Err(CodecError::Duplicate {
                span: var.1,
                what: format!("condition variable {}", var.0),
            });
        }
        out.push((var.0, value.0));
    }
    Ok(out)
}

fn unordered(a: &str, b: &str) -> (String, String) {
    if a <= b {
        (a.to_string(), b.to_string())
    } else {
        (b.to_string(), a.to_string())
    }
}

pub fn parse_net(text: &str) -> Result<TcpNet, CodecError> {
    let lines = lex(text)?;
    let Some((header, body)) = lines.split_first() else {
        return Err(CodecError::Syntax {
            span: SourceSpan { line: 1, column: 1 },
            message: format!("missing `{HEADER}` header"),
        });
    };
    let words: Vec<&Tok> = header.iter().map(|t| &t.tok).collect();
    if words != [&Tok::Word("tcpnet".into()), &Tok::Word("1".into())] {
        return Err(CodecError::Syntax {
            span: header[0].span,
            message: format!("expected `{HEADER}` header"),
        });
    }

    // Variables first, so later lines may refer to any of them.
    let mut draft = NetDraft::new();
    let mut names = Names {
        domains: BTreeMap::new(),
    };
    for tokens in body {
        let mut line = Line::new(tokens);
        if line.word("a keyword")?.0 != "var" {
            continue;
        }
        let (name, span) = line.name()?;
        line.expect(":")?;
        let mut domain = Vec::new();
        while !line.at_end() {
            domain.push(line.word("a value")?.0);
        }
        if names.domains.contains_key(&name) {
            return Err(CodecError::Duplicate {
                span,
                what: format!("variable {name}"),
            });
        }
        names.domains.insert(name.clone(), domain.clone());
        draft.variables.push(VariableSpec { name, domain });
    }

    let mut cpts: BTreeMap<String, CptDecl> = BTreeMap::new();
    let mut cits: BTreeMap<(String, String), CitDecl> = BTreeMap::new();
    for tokens in body {
        let mut line = Line::new(tokens);
        let (keyword, span) = line.word("a keyword")?;
        match keyword.as_str() {
            "var" => continue,
            "cp" => {
                let from = line.name()?;
                line.expect("->")?;
                let to = line.name()?;
                names.var(&from)?;
                names.var(&to)?;
                draft.cp_arcs.push((from.0, to.0));
            }
            "i" => {
                let more = line.name()?;
                line.expect(">")?;
                let less = line.name()?;
                names.var(&more)?;
                names.var(&less)?;
                draft.i_arcs.push((more.0, less.0));
            }
            "ci" => {
                let a = line.name()?;
                line.expect("~")?;
                let b = line.name()?;
                line.expect("|")?;
                names.var(&a)?;
                names.var(&b)?;
                let mut selector = Vec::new();
                while !line.at_end() {
                    let z = line.name()?;
                    names.var(&z)?;
                    selector.push(z.0);
                }
                draft.ci_arcs.push(CiArcDecl {
                    endpoints: (a.0, b.0),
                    selector,
                });
            }
            "cpt" => {
                let subject = line.name()?;
                names.var(&subject)?;
                let condition = if line.eat("|") {
                    condition(&mut line, &names)?
                } else {
                    Vec::new()
                };
                line.expect(":")?;
                let mut order = vec![Vec::new()];
                loop {
                    let value = line.word("a value")?;
                    names.value(&subject.0, &value)?;
                    order.last_mut().expect("order starts with a tier").push(value.0);
                    if line.eat(">") {
                        order.push(Vec::new());
                    } else if !line.eat("=") {
                        break;
                    }
                }
                cpts.entry(subject.0.clone())
                    .or_insert_with(|| CptDecl {
                        subject: subject.0,
                        rows: Vec::new(),
                    })
                    .rows
                    .push(CptRowDecl { condition, order });
            }
            "cit" => {
                let a = line.name()?;
                line.expect("~")?;
                let b = line.name()?;
                line.expect("|")?;
                names.var(&a)?;
                names.var(&b)?;
                let condition = condition(&mut line, &names)?;
                line.expect(":")?;
                let more = line.name()?;
                line.expect(">")?;
                let less = line.name()?;
                let key = unordered(&a.0, &b.0);
                if unordered(&more.0, &less.0) != key {
                    return Err(CodecError::Syntax {
                        span: more.1,
                        message: format!("orientation must be `{} > {}` or `{} > {}`", a.0, b.0, b.0, a.0),
                    });
                }
                cits.entry(key)
                    .or_insert_with(|| CitDecl {
                        endpoints: (a.0, b.0),
                        rows: Vec::new(),
                    })
                    .rows
                    .push(CitRowDecl {
                        condition,
                        more_important: more.0,
                    });
            }
            other => {
                return Err(CodecError::Syntax {
                    span,
                    message: format!("unknown declaration `{other}`"),
                })
            }
        }
        line.end()?;
    }
    draft.cpts = cpts.into_values().collect();
    draft.cits = cits.into_values().collect();
    draft.build().map_err(CodecError::Invalid)
}

/// Canonical text: variables, arcs and rows sorted, LF line endings.
pub fn serialize_net(net: &TcpNet) -> String {
    let mut out = String::new();
    writeln!(out, "{HEADER}").unwrap();
    for v in net.var_ids() {
        let var = net.variable(v);
        writeln!(out, "var {} : {}", var.name(), var.domain().join(" ")).unwrap();
    }
    let mut cp: Vec<(&str, &str)> = net.cp_arcs().into_iter().map(|(a, b)| (net.name(a), net.name(b))).collect();
    cp.sort();
    for (a, b) in cp {
        writeln!(out, "cp {a} -> {b}").unwrap();
    }
    for &(a, b) in net.i_arcs() {
        writeln!(out, "i {} > {}", net.name(a), net.name(b)).unwrap();
    }
    for arc in net.ci_arcs() {
        let (a, b) = arc.endpoints();
        let selector: Vec<&str> = arc.selector().iter().map(|&z| net.name(z)).collect();
        writeln!(out, "ci {} ~ {} | {}", net.name(a), net.name(b), selector.join(" ")).unwrap();
    }
    for x in net.var_ids() {
        let cpt = net.cpt(x);
        for row in 0..cpt.rows().len() {
            out.push_str("cpt ");
            out.push_str(net.name(x));
            if !cpt.parents().is_empty() {
                out.push_str(" |");
                for (&p, value) in cpt.parents().iter().zip(cpt.row_condition(row)) {
                    write!(out, " {}={}", net.name(p), net.value_name(p, value)).unwrap();
                }
            }
            let order: Vec<&str> = cpt.order(row).iter().map(|&v| net.value_name(x, v)).collect();
            writeln!(out, " : {}", order.join(" > ")).unwrap();
        }
    }
    for arc in net.ci_arcs() {
        let (a, b) = arc.endpoints();
        for (key, &more) in arc.rows() {
            write!(out, "cit {} ~ {} |", net.name(a), net.name(b)).unwrap();
            for (&z, &value) in arc.selector().iter().zip(key) {
                write!(out, " {}={}", net.name(z), net.value_name(z, value)).unwrap();
            }
            writeln!(out, " : {} > {}", net.name(more), net.name(arc.other(more))).unwrap();
        }
    }
    out
}

// ---------------------------------------------------------------------------
// Constraints
// ---------------------------------------------------------------------------

fn tuple(line: &mut Line<'_>) -> Result<Vec<(String, SourceSpan)>, CodecError> {
    line.expect("(")?;
    let mut items = Vec::new();
    if line.eat(")") {
        return Ok(items);
    }
    loop {
        items.push(line.word("a name")?);
        if line.eat(")") {
            return Ok(items);
        }
        line.expect(",")?;
    }
}

pub fn parse_constraints(text: &str, net: &TcpNet) -> Result<ConstraintSet, CodecError> {
    let mut set = ConstraintSet::new();
    for tokens in lex(text)? {
        let mut line = Line::new(&tokens);
        let (keyword, span) = line.word("`allow`")?;
        if keyword != "allow" {
            return Err(CodecError::Syntax {
                span,
                message: format!("unknown declaration `{keyword}`"),
            });
        }
        let scope_span = line.here();
        let mut scope = Vec::new();
        for (name, span) in tuple(&mut line)? {
            let v = net
                .var_by_name(&name)
                .ok_or(CodecError::UndeclaredVariable { span, name: name.clone() })?;
            if scope.contains(&v) {
                return Err(CodecError::Duplicate {
                    span,
                    what: format!("scope variable {name}"),
                });
            }
            scope.push(v);
        }
        if scope.is_empty() {
            return Err(CodecError::Syntax {
                span: scope_span,
                message: "empty scope".into(),
            });
        }
        line.expect(":")?;
        let mut allowed = BTreeSet::new();
        while !line.at_end() {
            let start = line.here();
            let values = tuple(&mut line)?;
            if values.len() != scope.len() {
                return Err(CodecError::Arity {
                    span: start,
                    expected: scope.len(),
                    found: values.len(),
                });
            }
            let mut t = Vec::with_capacity(values.len());
            for (&v, (value, span)) in scope.iter().zip(values) {
                let x = net.variable(v).value_index(&value).ok_or_else(|| CodecError::UnknownValue {
                    span,
                    variable: net.name(v).to_string(),
                    value,
                })?;
                t.push(x);
            }
            allowed.insert(t);
        }
        let c = Constraint::new(net, scope, allowed).map_err(|source| CodecError::Constraint { span, source })?;
        set.push(c);
    }
    Ok(set)
}

pub fn serialize_constraints(set: &ConstraintSet, net: &TcpNet) -> String {
    let mut out = String::new();
    for c in set.constraints() {
        let scope: Vec<&str> = c.scope().iter().map(|&v| net.name(v)).collect();
        write!(out, "allow ({}):", scope.join(",")).unwrap();
        for t in c.allowed() {
            let values: Vec<&str> = c.scope().iter().zip(t).map(|(&v, &x)| net.value_name(v, x)).collect();
            write!(out, " ({})", values.join(",")).unwrap();
        }
        out.push('\n');
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use tcpnet_core::fixtures;

    #[test]
    fn fixtures_roundtrip() {
        for net in [fixtures::evening(), fixtures::flight(), fixtures::ab(), fixtures::selector_detour()] {
            let text = serialize_net(&net);
            assert_eq!(parse_net(&text).unwrap(), net);
            assert_eq!(serialize_net(&parse_net(&text).unwrap()), text);
        }
    }

    #[test]
    fn empty_net_is_header_only() {
        let net = NetDraft::new().build().unwrap();
        assert_eq!(serialize_net(&net), "tcpnet 1\n");
        assert_eq!(parse_net("tcpnet 1\n").unwrap(), net);
    }

    #[test]
    fn crlf_and_comments() {
        let text = "# leading comment\r\ntcpnet 1\r\nvar A : a1 a2 # two values\r\n\r\ncpt A : a2 > a1\r\n";
        let net = parse_net(text).unwrap();
        assert_eq!(serialize_net(&net), "tcpnet 1\nvar A : a1 a2\ncpt A : a2 > a1\n");
    }

    #[test]
    fn undeclared_variable_has_a_span() {
        let text = "tcpnet 1\nvar S : red white\ncp Q -> S\ncpt S : red > white\n";
        let err = parse_net(text).unwrap_err();
        assert_eq!(
            err,
            CodecError::UndeclaredVariable {
                span: SourceSpan { line: 3, column: 4 },
                name: "Q".into()
            }
        );
        assert_eq!(err.to_string(), "3:4: undeclared variable Q");
    }

    #[test]
    fn syntax_errors() {
        let cases = [
            ("var A : a b\n", 1, 1),
            ("tcpnet 1\nvar A a b\n", 2, 7),
            ("tcpnet 1\nvar A : a b\ncpt A : a >\n", 3, 12),
            ("tcpnet 1\nvar A : a b\nfoo A\n", 3, 1),
            ("tcpnet 1\nvar A : a b\ncpt A : a > b extra\n", 3, 15),
            ("tcpnet 1\nvar A : a $\n", 2, 11),
            ("tcpnet 1\nvar 1A : a b\n", 2, 5),
        ];
        for (text, line, column) in cases {
            match parse_net(text) {
                Err(CodecError::Syntax { span, .. }) => assert_eq!(span, SourceSpan { line, column }, "{text:?}"),
                other => panic!("{text:?}: {other:?}"),
            }
        }
    }

    #[test]
    fn duplicates_and_validation() {
        let dup = "tcpnet 1\nvar A : a b\nvar A : c d\n";
        assert!(matches!(parse_net(dup), Err(CodecError::Duplicate { .. })));
        let tie = "tcpnet 1\nvar A : a b\ncpt A : a = b\n";
        match parse_net(tie) {
            Err(CodecError::Invalid(report)) => assert!(report.has("cpt tie"), "{report}"),
            other => panic!("{other:?}"),
        }
        let missing = "tcpnet 1\nvar A : a b\n";
        assert!(matches!(parse_net(missing), Err(CodecError::Invalid(_))));
        let bad_value = "tcpnet 1\nvar A : a b\ncpt A : a > c\n";
        assert!(matches!(parse_net(bad_value), Err(CodecError::UnknownValue { .. })));
    }

    #[test]
    fn constraints() {
        let net = fixtures::evening();
        let set = parse_constraints("allow (J,P): (black,white) (white,black)\nallow (J): (black)\n", &net).unwrap();
        assert_eq!(set.len(), 2);
        assert_eq!(set.constraints()[0].allowed().len(), 2);
        assert_eq!(set.constraints()[1].scope().len(), 1);
        let text = serialize_constraints(&set, &net);
        assert_eq!(text, "allow (J,P): (black,white) (white,black)\nallow (J): (black)\n");
        assert_eq!(parse_constraints(&text, &net).unwrap(), set);

        assert!(matches!(
            parse_constraints("allow (J,Q): (black,x)\n", &net),
            Err(CodecError::UndeclaredVariable { name, .. }) if name == "Q"
        ));
        assert!(matches!(
            parse_constraints("allow (J,P): (black)\n", &net),
            Err(CodecError::Arity { expected: 2, found: 1, .. })
        ));
        assert!(matches!(
            parse_constraints("allow (J): (grey)\n", &net),
            Err(CodecError::UnknownValue { .. })
        ));
        assert!(parse_constraints("allow (J): (black)\n", &net).unwrap().constraints()[0].allowed().len() == 1);
    }
}
