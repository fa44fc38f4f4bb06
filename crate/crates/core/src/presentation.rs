//! Words, presentations and the presentation DSL.
//!
//! ```text
//! group "<label>" {
//!     gens x, y;            # or a numbered range: gens x1..x6;
//!     rel x^2 = y^3 = 1;    # chained equalities become separate relators
//!     rel [x, y] = x*y^-1;  # [a, b] expands to a b a^-1 b^-1
//! }
//! ```
//!
//! A bare body (statements without the `group` wrapper) is also accepted by
//! [`parse_presentation`].

use std::fmt;

use crate::group::{ElementId, FiniteGroup, IDENTITY};

/// A reduced word: `(generator index, nonzero exponent)` pairs with adjacent
/// generators distinct. The empty word is the identity.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash)]
pub struct Word(Vec<(usize, i64)>);

impl Word {
    pub fn identity() -> Self {
        Word(Vec::new())
    }

    pub fn gen(index: usize) -> Self {
        Word(vec![(index, 1)])
    }

    pub fn from_pairs(pairs: impl IntoIterator<Item = (usize, i64)>) -> Self {
        let mut w = Word::identity();
        for (g, e) in pairs {
            w.push(g, e);
        }
        w
    }

    fn push(&mut self, g: usize, e: i64) {
        if e == 0 {
            return;
        }
        match self.0.last_mut() {
            Some((h, f)) if *h == g => {
                *f += e;
                if *f == 0 {
                    self.0.pop();
                }
            }
            _ => self.0.push((g, e)),
        }
    }

    pub fn pairs(&self) -> &[(usize, i64)] {
        &self.0
    }

    pub fn is_identity(&self) -> bool {
        self.0.is_empty()
    }

    pub fn mul(&self, other: &Word) -> Word {
        let mut w = self.clone();
        for &(g, e) in &other.0 {
            w.push(g, e);
        }
        w
    }

    pub fn inverse(&self) -> Word {
        Word::from_pairs(self.0.iter().rev().map(|&(g, e)| (g, -e)))
    }

    pub fn pow(&self, k: i64) -> Word {
        let base = if k < 0 { self.inverse() } else { self.clone() };
        (0..k.unsigned_abs()).fold(Word::identity(), |acc, _| acc.mul(&base))
    }

    /// `[a, b] = a b a⁻¹ b⁻¹`.
    pub fn commutator(a: &Word, b: &Word) -> Word {
        a.mul(b).mul(&a.inverse()).mul(&b.inverse())
    }

    /// Letter expansion: `(generator, +1 | -1)` per letter.
    pub fn letters(&self) -> impl Iterator<Item = (usize, i64)> + '_ {
        self.0
            .iter()
            .flat_map(|&(g, e)| std::iter::repeat((g, e.signum())).take(e.unsigned_abs() as usize))
    }

    pub fn len(&self) -> usize {
        self.0.iter().map(|&(_, e)| e.unsigned_abs() as usize).sum()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn generators_used(&self) -> impl Iterator<Item = usize> + '_ {
        self.0.iter().map(|&(g, _)| g)
    }

    /// Evaluates the word under an assignment of generators to elements.
    /// Returns `None` when a generator occurring in the word is unassigned.
    pub fn evaluate(&self, group: &FiniteGroup, assignment: &[Option<ElementId>]) -> Option<ElementId> {
        let mut acc = IDENTITY;
        for &(g, e) in &self.0 {
            let x = (*assignment.get(g)?)?;
            acc = group.mul(acc, group.pow(x, e));
        }
        Some(acc)
    }

    /// Fast evaluation when every generator is assigned.
    #[inline]
    pub fn eval_total(&self, group: &FiniteGroup, assignment: &[ElementId]) -> ElementId {
        let mut acc = IDENTITY;
        for &(g, e) in &self.0 {
            let x = assignment[g];
            let (base, k) = if e < 0 { (group.inv(x), -e) } else { (x, e) };
            for _ in 0..k {
                acc = group.mul(acc, base);
            }
        }
        acc
    }

    pub fn display<'a>(&'a self, names: &'a [String]) -> WordDisplay<'a> {
        WordDisplay { word: self, names }
    }
}

pub struct WordDisplay<'a> {
    word: &'a Word,
    names: &'a [String],
}

impl fmt::Display for WordDisplay<'_> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.word.is_identity() {
            return write!(f, "1");
        }
        for (i, &(g, e)) in self.word.0.iter().enumerate() {
            if i > 0 {
                write!(f, "*")?;
            }
            let name = self.names.get(g).map(String::as_str).unwrap_or("?");
            if e == 1 {
                write!(f, "{name}")?;
            } else {
                write!(f, "{name}^{e}")?;
            }
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum EvalError {
    #[error("generator {0} has no assigned element")]
    Unassigned(usize),
    #[error(transparent)]
    Group(#[from] crate::GroupError),
}

/// Evaluates `w` under `assignment` (generator index to element).
pub fn evaluate_word(group: &FiniteGroup, assignment: &[Option<ElementId>], w: &Word) -> Result<ElementId, EvalError> {
    let mut acc = IDENTITY;
    for &(g, e) in w.pairs() {
        let x = assignment.get(g).copied().flatten().ok_or(EvalError::Unassigned(g))?;
        group.inverse(x)?;
        acc = group.mul(acc, group.pow(x, e));
    }
    Ok(acc)
}

/// Generators plus relators. Each relator is a word that equals the
/// identity; an equation `A = B` is stored as `A·B⁻¹`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Presentation {
    pub label: Option<String>,
    pub generators: Vec<String>,
    pub relators: Vec<Word>,
}

impl Presentation {
    pub fn new(generators: Vec<String>, relators: Vec<Word>) -> Self {
        Presentation {
            label: None,
            generators,
            relators,
        }
    }

    pub fn generator_index(&self, name: &str) -> Option<usize> {
        self.generators.iter().position(|g| g == name)
    }

    /// Renders the presentation back into the DSL.
    pub fn to_dsl(&self) -> String {
        let mut out = String::new();
        let label = self.label.as_deref().unwrap_or("unnamed");
        out.push_str(&format!("group \"{label}\" {{\n    gens {};\n", self.generators.join(", ")));
        for r in &self.relators {
            out.push_str(&format!("    rel {} = 1;\n", r.display(&self.generators)));
        }
        out.push_str("}\n");
        out
    }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum ParseError {
    #[error("syntax error at line {line}, column {column}: {message}")]
    Syntax { line: usize, column: usize, message: String },
    #[error("undeclared generator `{name}` at line {line}, column {column}")]
    UndeclaredGenerator { name: String, line: usize, column: usize },
    #[error("duplicate generator `{0}`")]
    DuplicateGenerator(String),
    #[error("empty generator list")]
    EmptyGenerators,
}

#[derive(Clone, Debug, PartialEq, Eq)]
enum Tok {
    Ident(String),
    Int(i64),
    Str(String),
    Sym(char),
    DotDot,
    Eof,
}

#[derive(Clone, Debug)]
struct Token {
    tok: Tok,
    line: usize,
    column: usize,
}

fn tokenize(text: &str) -> Result<Vec<Token>, ParseError> {
    let mut out = Vec::new();
    let chars: Vec<char> = text.chars().collect();
    let (mut i, mut line, mut col) = (0, 1, 1);
    let syntax = |line, column, message: String| ParseError::Syntax { line, column, message };
    while i < chars.len() {
        let c = chars[i];
        let (tl, tc) = (line, col);
        let mut advance = |n: usize, i: &mut usize| {
            for _ in 0..n {
                if chars[*i] == '\n' {
                    line += 1;
                    col = 1;
                } else {
                    col += 1;
                }
                *i += 1;
            }
        };
        if c.is_whitespace() {
            advance(1, &mut i);
        } else if c == '#' {
            while i < chars.len() && chars[i] != '\n' {
                advance(1, &mut i);
            }
        } else if c.is_ascii_alphabetic() || c == '_' {
            let start = i;
            while i < chars.len() && (chars[i].is_ascii_alphanumeric() || chars[i] == '_') {
                advance(1, &mut i);
            }
            let s: String = chars[start..i].iter().collect();
            out.push(Token { tok: Tok::Ident(s), line: tl, column: tc });
        } else if c.is_ascii_digit() || (c == '-' && chars.get(i + 1).is_some_and(|d| d.is_ascii_digit())) {
            let start = i;
            advance(1, &mut i);
            while i < chars.len() && chars[i].is_ascii_digit() {
                advance(1, &mut i);
            }
            let s: String = chars[start..i].iter().collect();
            let v = s.parse().map_err(|_| syntax(tl, tc, format!("integer `{s}` out of range")))?;
            out.push(Token { tok: Tok::Int(v), line: tl, column: tc });
        } else if c == '"' {
            advance(1, &mut i);
            let start = i;
            while i < chars.len() && chars[i] != '"' {
                if chars[i] == '\n' {
                    return Err(syntax(tl, tc, "unterminated string".into()));
                }
                advance(1, &mut i);
            }
            if i >= chars.len() {
                return Err(syntax(tl, tc, "unterminated string".into()));
            }
            let s: String = chars[start..i].iter().collect();
            advance(1, &mut i);
            out.push(Token { tok: Tok::Str(s), line: tl, column: tc });
        } else if c == '.' && chars.get(i + 1) == Some(&'.') {
            advance(2, &mut i);
            out.push(Token { tok: Tok::DotDot, line: tl, column: tc });
        } else if "{}[](),;=*^".contains(c) {
            advance(1, &mut i);
            out.push(Token { tok: Tok::Sym(c), line: tl, column: tc });
        } else {
            return Err(syntax(tl, tc, format!("unexpected character `{c}`")));
        }
    }
    out.push(Token { tok: Tok::Eof, line, column: col });
    Ok(out)
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
        if self.pos + 1 < self.tokens.len() {
            self.pos += 1;
        }
        t
    }

    fn error<T>(&self, message: impl Into<String>) -> Result<T, ParseError> {
        let t = self.peek();
        Err(ParseError::Syntax {
            line: t.line,
            column: t.column,
            message: message.into(),
        })
    }

    fn expect_sym(&mut self, c: char) -> Result<(), ParseError> {
        if self.peek().tok == Tok::Sym(c) {
            self.next();
            Ok(())
        } else {
            self.error(format!("expected `{c}`, found {}", describe(&self.peek().tok)))
        }
    }

    fn at_sym(&self, c: char) -> bool {
        self.peek().tok == Tok::Sym(c)
    }

    fn at_keyword(&self, kw: &str) -> bool {
        matches!(&self.peek().tok, Tok::Ident(s) if s == kw)
    }

    fn body(&mut self, label: Option<String>, closing: Option<char>) -> Result<Presentation, ParseError> {
        let mut generators: Option<Vec<String>> = None;
        let mut relators = Vec::new();
        loop {
            if closing.is_some_and(|c| self.at_sym(c)) || (closing.is_none() && self.peek().tok == Tok::Eof) {
                break;
            }
            if self.at_keyword("gens") {
                if generators.is_some() {
                    return self.error("generators declared twice");
                }
                self.next();
                generators = Some(self.gen_list()?);
                self.expect_sym(';')?;
            } else if self.at_keyword("rel") {
                self.next();
                let Some(gens) = generators.as_ref() else {
                    return self.error("`rel` before `gens`");
                };
                let mut sides = vec![self.word(gens)?];
                while self.at_sym('=') {
                    self.next();
                    sides.push(self.word(gens)?);
                }
                self.expect_sym(';')?;
                if sides.len() == 1 {
                    relators.push(sides.pop().unwrap());
                } else {
                    for pair in sides.windows(2) {
                        relators.push(pair[0].mul(&pair[1].inverse()));
                    }
                }
            } else {
                return self.error(format!("expected `gens` or `rel`, found {}", describe(&self.peek().tok)));
            }
        }
        let generators = generators.ok_or(ParseError::EmptyGenerators)?;
        Ok(Presentation {
            label,
            generators,
            relators,
        })
    }

    fn gen_list(&mut self) -> Result<Vec<String>, ParseError> {
        let mut names = Vec::new();
        loop {
            let Tok::Ident(first) = self.peek().tok.clone() else {
                if names.is_empty() && self.at_sym(';') {
                    return Err(ParseError::EmptyGenerators);
                }
                return self.error("expected generator name");
            };
            self.next();
            if self.peek().tok == Tok::DotDot {
                self.next();
                let Tok::Ident(last) = self.peek().tok.clone() else {
                    return self.error("expected generator name after `..`");
                };
                match expand_range(&first, &last) {
                    Some(r) => names.extend(r),
                    None => return self.error(format!("invalid generator range `{first}..{last}`")),
                }
                self.next();
            } else {
                names.push(first);
            }
            if self.at_sym(',') {
                self.next();
            } else {
                break;
            }
        }
        for (i, n) in names.iter().enumerate() {
            if names[..i].contains(n) {
                return Err(ParseError::DuplicateGenerator(n.clone()));
            }
        }
        Ok(names)
    }

    fn word(&mut self, gens: &[String]) -> Result<Word, ParseError> {
        let mut w = self.term(gens)?;
        while self.at_sym('*') {
            self.next();
            w = w.mul(&self.term(gens)?);
        }
        Ok(w)
    }

    fn term(&mut self, gens: &[String]) -> Result<Word, ParseError> {
        let base = self.atom(gens)?;
        if self.at_sym('^') {
            self.next();
            match self.peek().tok {
                Tok::Int(k) => {
                    self.next();
                    Ok(base.pow(k))
                }
                _ => self.error("expected integer exponent"),
            }
        } else {
            Ok(base)
        }
    }

    fn atom(&mut self, gens: &[String]) -> Result<Word, ParseError> {
        let t = self.peek().clone();
        match t.tok {
            Tok::Ident(name) => {
                self.next();
                match gens.iter().position(|g| *g == name) {
                    Some(i) => Ok(Word::gen(i)),
                    None => Err(ParseError::UndeclaredGenerator {
                        name,
                        line: t.line,
                        column: t.column,
                    }),
                }
            }
            Tok::Int(1) => {
                self.next();
                Ok(Word::identity())
            }
            Tok::Sym('(') => {
                self.next();
                let w = self.word(gens)?;
                self.expect_sym(')')?;
                Ok(w)
            }
            Tok::Sym('[') => {
                self.next();
                let a = self.word(gens)?;
                self.expect_sym(',')?;
                let b = self.word(gens)?;
                self.expect_sym(']')?;
                Ok(Word::commutator(&a, &b))
            }
            other => self.error(format!("expected a word, found {}", describe(&other))),
        }
    }
}

fn describe(t: &Tok) -> String {
    match t {
        Tok::Ident(s) => format!("`{s}`"),
        Tok::Int(k) => format!("`{k}`"),
        Tok::Str(s) => format!("\"{s}\""),
        Tok::Sym(c) => format!("`{c}`"),
        Tok::DotDot => "`..`".into(),
        Tok::Eof => "end of input".into(),
    }
}

fn expand_range(first: &str, last: &str) -> Option<Vec<String>> {
    let split = |s: &str| {
        let idx = s.find(|c: char| c.is_ascii_digit())?;
        let (p, n) = s.split_at(idx);
        Some((p.to_string(), n.parse::<u32>().ok()?))
    };
    let (p1, a) = split(first)?;
    let (p2, b) = split(last)?;
    if p1 != p2 || a > b {
        return None;
    }
    Some((a..=b).map(|k| format!("{p1}{k}")).collect())
}

/// Parses a single presentation: either a bare statement list or one
/// `group "<label>" { ... }` block.
pub fn parse_presentation(text: &str) -> Result<Presentation, ParseError> {
    let mut p = Parser {
        tokens: tokenize(text)?,
        pos: 0,
    };
    if p.at_keyword("group") {
        let pres = block(&mut p)?;
        if p.peek().tok != Tok::Eof {
            return p.error("trailing input after group block");
        }
        Ok(pres)
    } else {
        p.body(None, None)
    }
}

/// Parses a single word over the given generator names, e.g. `x^-2*y`.
pub fn parse_word(text: &str, generators: &[String]) -> Result<Word, ParseError> {
    let mut p = Parser {
        tokens: tokenize(text)?,
        pos: 0,
    };
    let w = p.word(generators)?;
    if p.peek().tok != Tok::Eof {
        return p.error(format!("unexpected {} after word", describe(&p.peek().tok)));
    }
    Ok(w)
}

/// Parses a file holding any number of `group` blocks.
pub fn parse_presentations(text: &str) -> Result<Vec<Presentation>, ParseError> {
    let mut p = Parser {
        tokens: tokenize(text)?,
        pos: 0,
    };
    let mut out = Vec::new();
    while p.peek().tok != Tok::Eof {
        if !p.at_keyword("group") {
            return p.error("expected `group`");
        }
        out.push(block(&mut p)?);
    }
    Ok(out)
}

fn block(p: &mut Parser) -> Result<Presentation, ParseError> {
    p.next();
    let label = match p.peek().tok.clone() {
        Tok::Str(s) => {
            p.next();
            s
        }
        _ => return p.error("expected quoted group label"),
    };
    p.expect_sym('{')?;
    let pres = p.body(Some(label), Some('}'))?;
    p.expect_sym('}')?;
    Ok(pres)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn dihedral_36_text() {
        let p = parse_presentation("gens x,y; rel x^2=1; rel y^18=1; rel x*y*x^-1=y^-1;").unwrap();
        assert_eq!(p.generators, vec!["x", "y"]);
        assert_eq!(p.relators.len(), 3);
        assert_eq!(p.relators[1], Word::from_pairs([(1, 18)]));
        // x y x^-1 = y^-1 stored as x y x^-1 y
        assert_eq!(p.relators[2], Word::from_pairs([(0, 1), (1, 1), (0, -1), (1, 1)]));
    }

    #[test]
    fn commutator_sugar_and_ranges() {
        let p = parse_presentation("gens x1..x6; rel [x1,x2]=x5;").unwrap();
        assert_eq!(p.generators.len(), 6);
        let expected = Word::from_pairs([(0, 1), (1, 1), (0, -1), (1, -1), (4, -1)]);
        assert_eq!(p.relators, vec![expected]);
    }

    #[test]
    fn chained_equalities_split() {
        let p = parse_presentation("gens x,y; rel x^4=y^5=1;").unwrap();
        assert_eq!(p.relators, vec![Word::from_pairs([(0, 4), (1, -5)]), Word::from_pairs([(1, 5)])]);
    }

    #[test]
    fn missing_rhs_is_a_syntax_error() {
        let err = parse_presentation("gens x; rel x^2=").unwrap_err();
        assert!(matches!(err, ParseError::Syntax { line: 1, column: 17, .. }), "{err:?}");
    }

    #[test]
    fn undeclared_and_empty() {
        assert!(matches!(
            parse_presentation("gens x; rel y=1;"),
            Err(ParseError::UndeclaredGenerator { .. })
        ));
        assert_eq!(parse_presentation("gens ;"), Err(ParseError::EmptyGenerators));
        assert_eq!(parse_presentation("# nothing\n"), Err(ParseError::EmptyGenerators));
        assert!(matches!(
            parse_presentation("gens x, x;"),
            Err(ParseError::DuplicateGenerator(_))
        ));
    }

    #[test]
    fn blocks_with_comments() {
        let text = r#"
            # two groups
            group "A" { gens a; rel a^3; }
            group "B" {
                gens s, t;   # symmetric group
                rel s^2 = t^3 = (s*t)^2 = 1;
            }
        "#;
        let ps = parse_presentations(text).unwrap();
        assert_eq!(ps.len(), 2);
        assert_eq!(ps[1].label.as_deref(), Some("B"));
        assert_eq!(ps[1].relators.len(), 3);
        let round = parse_presentation(&ps[1].to_dsl()).unwrap();
        assert_eq!(round.relators, ps[1].relators);
    }

    #[test]
    fn word_algebra() {
        let a = Word::gen(0);
        let b = Word::gen(1);
        let c = Word::commutator(&a, &b);
        assert_eq!(c.mul(&c.inverse()), Word::identity());
        assert_eq!(c.len(), 4);
        assert_eq!(a.pow(3).pow(-1), Word::from_pairs([(0, -3)]));
    }

    #[test]
    fn standalone_words() {
        let names: Vec<String> = ["x", "y"].map(String::from).to_vec();
        assert_eq!(parse_word("x^-2*y", &names).unwrap(), Word::from_pairs([(0, -2), (1, 1)]));
        assert!(parse_word("x*w", &names).is_err());
        assert!(parse_word("x y", &names).is_err());
    }
}
