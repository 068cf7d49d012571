//! Concrete syntax for elements.
//!
//! ```text
//! element  := term ( "+" term )*
//! term     := [ integer "*" ] "gen" "(" name "," "deg=" integer ","
//!             "copies=" integer "," "marks=[" mark* "]" ")"
//! mark     := "{g=" integer ";" [ point ( "," point )* ] "}"
//! point    := "(" copyIndex "," pointLabel ")"
//! ```
//!
//! Whitespace-insensitive; printing emits canonical order. Three documented
//! conveniences: the literal `0` denotes the zero element, the name `1`
//! denotes the empty provenance (the unit's), and a name like `a.b` denotes
//! the provenance multiset {a, b} (products concatenate names this way, so
//! printing stays parseable). Freshness tags have no syntax and are dropped
//! on output.

use std::collections::BTreeMap;
use std::fmt;

use thiserror::Error;

use crate::calculus::{Algebra, AlgebraParams, DecoratedTerm, Element};
use crate::shape::{GarlandShape, Mark, PointRef};
use crate::sign::Coefficient;

#[derive(Debug, Error, PartialEq, Eq)]
#[error("line {line}, column {column}: {message}")]
pub struct ParseError {
    pub line: usize,
    pub column: usize,
    pub message: String,
}

#[derive(Debug, Clone, PartialEq, Eq)]
enum Token {
    Int(i64),
    Ident(String),
    Sym(char),
}

impl fmt::Display for Token {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Token::Int(v) => write!(f, "`{v}`"),
            Token::Ident(s) => write!(f, "`{s}`"),
            Token::Sym(c) => write!(f, "`{c}`"),
        }
    }
}

struct Lexer {
    tokens: Vec<(Token, usize, usize)>,
    pos: usize,
    end: (usize, usize),
}

fn lex(text: &str) -> Result<Lexer, ParseError> {
    let mut tokens = Vec::new();
    let mut line = 1usize;
    let mut column = 1usize;
    let mut chars = text.chars().peekable();
    while let Some(&c) = chars.peek() {
        let (tok_line, tok_col) = (line, column);
        let advance = |chars: &mut std::iter::Peekable<std::str::Chars>,
                       line: &mut usize,
                       column: &mut usize| {
            let c = chars.next().unwrap();
            if c == '\n' {
                *line += 1;
                *column = 1;
            } else {
                *column += 1;
            }
            c
        };
        if c.is_whitespace() {
            advance(&mut chars, &mut line, &mut column);
            continue;
        }
        if c == '-' || c.is_ascii_digit() {
            let mut s = String::new();
            s.push(advance(&mut chars, &mut line, &mut column));
            while let Some(&d) = chars.peek() {
                if d.is_ascii_digit() {
                    s.push(advance(&mut chars, &mut line, &mut column));
                } else {
                    break;
                }
            }
            // A bare digit run followed by identifier characters is an
            // identifier (labels like `0x` or names like `1abc`).
            let followed_by_word =
                matches!(chars.peek(), Some(d) if d.is_alphanumeric() || *d == '_' || *d == '.');
            if !followed_by_word {
                match s.parse::<i64>() {
                    Ok(v) => {
                        tokens.push((Token::Int(v), tok_line, tok_col));
                        continue;
                    }
                    Err(_) => {
                        return Err(ParseError {
                            line: tok_line,
                            column: tok_col,
                            message: format!("integer out of range: {s}"),
                        })
                    }
                }
            }
            while let Some(&d) = chars.peek() {
                if d.is_alphanumeric() || d == '_' || d == '.' {
                    s.push(advance(&mut chars, &mut line, &mut column));
                } else {
                    break;
                }
            }
            tokens.push((Token::Ident(s), tok_line, tok_col));
            continue;
        }
        if c.is_alphanumeric() || c == '_' {
            let mut s = String::new();
            while let Some(&d) = chars.peek() {
                if d.is_alphanumeric() || d == '_' || d == '.' {
                    s.push(advance(&mut chars, &mut line, &mut column));
                } else {
                    break;
                }
            }
            tokens.push((Token::Ident(s), tok_line, tok_col));
            continue;
        }
        if "+*(){}[],;=".contains(c) {
            advance(&mut chars, &mut line, &mut column);
            tokens.push((Token::Sym(c), tok_line, tok_col));
            continue;
        }
        return Err(ParseError {
            line,
            column,
            message: format!("unexpected character `{c}`"),
        });
    }
    Ok(Lexer {
        tokens,
        pos: 0,
        end: (line, column),
    })
}

impl Lexer {
    fn peek(&self) -> Option<&Token> {
        self.tokens.get(self.pos).map(|(t, _, _)| t)
    }

    fn here(&self) -> (usize, usize) {
        self.tokens
            .get(self.pos)
            .map(|(_, l, c)| (*l, *c))
            .unwrap_or(self.end)
    }

    fn error(&self, message: impl Into<String>) -> ParseError {
        let (line, column) = self.here();
        ParseError {
            line,
            column,
            message: message.into(),
        }
    }

    fn next(&mut self) -> Result<Token, ParseError> {
        let tok = self
            .tokens
            .get(self.pos)
            .map(|(t, _, _)| t.clone())
            .ok_or_else(|| self.error("unexpected end of input"))?;
        self.pos += 1;
        Ok(tok)
    }

    fn expect_sym(&mut self, sym: char) -> Result<(), ParseError> {
        match self.peek() {
            Some(Token::Sym(c)) if *c == sym => {
                self.pos += 1;
                Ok(())
            }
            Some(t) => Err(self.error(format!("expected `{sym}`, found {t}"))),
            None => Err(self.error(format!("expected `{sym}`, found end of input"))),
        }
    }

    fn expect_keyword(&mut self, word: &str) -> Result<(), ParseError> {
        match self.peek() {
            Some(Token::Ident(s)) if s == word => {
                self.pos += 1;
                Ok(())
            }
            Some(t) => Err(self.error(format!("expected `{word}`, found {t}"))),
            None => Err(self.error(format!("expected `{word}`, found end of input"))),
        }
    }

    fn expect_int(&mut self) -> Result<i64, ParseError> {
        match self.peek() {
            Some(Token::Int(v)) => {
                let v = *v;
                self.pos += 1;
                Ok(v)
            }
            Some(t) => Err(self.error(format!("expected an integer, found {t}"))),
            None => Err(self.error("expected an integer, found end of input")),
        }
    }

    fn expect_name(&mut self) -> Result<String, ParseError> {
        match self.peek() {
            Some(Token::Ident(s)) => {
                let s = s.clone();
                self.pos += 1;
                Ok(s)
            }
            Some(Token::Int(v)) if *v >= 0 => {
                let s = v.to_string();
                self.pos += 1;
                Ok(s)
            }
            Some(t) => Err(self.error(format!("expected a name, found {t}"))),
            None => Err(self.error("expected a name, found end of input")),
        }
    }
}

/// Parse element text against the session parameters.
pub fn parse_element(text: &str, params: &AlgebraParams) -> Result<Element, ParseError> {
    let mut lexer = lex(text)?;
    let alg = Algebra::new(*params);
    if lexer.peek() == Some(&Token::Int(0)) && lexer.tokens.len() == 1 {
        return Ok(alg.zero());
    }
    let mut raw: Vec<DecoratedTerm> = Vec::new();
    loop {
        raw.push(parse_term(&mut lexer, params)?);
        match lexer.peek() {
            Some(Token::Sym('+')) => {
                lexer.pos += 1;
            }
            Some(t) => {
                let t = t.clone();
                return Err(lexer.error(format!("expected `+` or end of input, found {t}")));
            }
            None => break,
        }
    }
    Ok(alg.from_raw(raw))
}

fn parse_term(lexer: &mut Lexer, params: &AlgebraParams) -> Result<DecoratedTerm, ParseError> {
    let coefficient = match lexer.peek() {
        Some(Token::Int(v)) => {
            let v = *v;
            lexer.pos += 1;
            lexer.expect_sym('*')?;
            v
        }
        _ => 1,
    };
    lexer.expect_keyword("gen")?;
    lexer.expect_sym('(')?;
    let name = lexer.expect_name()?;
    lexer.expect_sym(',')?;
    lexer.expect_keyword("deg")?;
    lexer.expect_sym('=')?;
    let degree = lexer.expect_int()?;
    lexer.expect_sym(',')?;
    lexer.expect_keyword("copies")?;
    lexer.expect_sym('=')?;
    let copies_pos = lexer.here();
    let copies = lexer.expect_int()?;
    if copies < 0 {
        return Err(ParseError {
            line: copies_pos.0,
            column: copies_pos.1,
            message: "copy count must be >= 0".into(),
        });
    }
    let copies = copies as usize;
    lexer.expect_sym(',')?;
    lexer.expect_keyword("marks")?;
    lexer.expect_sym('=')?;
    lexer.expect_sym('[')?;
    let mut labels: BTreeMap<(usize, String), u32> = BTreeMap::new();
    let mut marks: Vec<Mark> = Vec::new();
    loop {
        match lexer.peek() {
            Some(Token::Sym('{')) => {
                marks.push(parse_mark(lexer, copies, &mut labels)?);
                // Lenient input: an optional comma may separate marks.
                if lexer.peek() == Some(&Token::Sym(',')) {
                    lexer.pos += 1;
                }
            }
            Some(Token::Sym(']')) => {
                lexer.pos += 1;
                break;
            }
            Some(t) => {
                let t = t.clone();
                return Err(lexer.error(format!("expected a mark or `]`, found {t}")));
            }
            None => return Err(lexer.error("expected a mark or `]`, found end of input")),
        }
    }
    lexer.expect_sym(')')?;
    let shape = GarlandShape::new(copies, marks).expect("indices validated during parse");
    let provenance = if name == "1" {
        Vec::new()
    } else {
        let mut names: Vec<String> = name.split('.').map(str::to_string).collect();
        names.sort();
        names
    };
    let mut provenance = provenance;
    provenance.retain(|s| !s.is_empty());
    Ok(DecoratedTerm {
        coefficient: Coefficient::new(params.ring, coefficient),
        degree,
        shape: shape.canonicalize(),
        provenance,
        fresh: Default::default(),
    })
}

fn parse_mark(
    lexer: &mut Lexer,
    copies: usize,
    labels: &mut BTreeMap<(usize, String), u32>,
) -> Result<Mark, ParseError> {
    lexer.expect_sym('{')?;
    lexer.expect_keyword("g")?;
    lexer.expect_sym('=')?;
    let grading_pos = lexer.here();
    let grading = lexer.expect_int()?;
    if grading < 1 {
        return Err(ParseError {
            line: grading_pos.0,
            column: grading_pos.1,
            message: "grading must be >= 1".into(),
        });
    }
    lexer.expect_sym(';')?;
    let mut points = Vec::new();
    if lexer.peek() == Some(&Token::Sym('(')) {
        loop {
            points.push(parse_point(lexer, copies, labels)?);
            if lexer.peek() == Some(&Token::Sym(',')) {
                // A comma continues the point list only if a point follows;
                // otherwise it separates marks and is handled by the caller.
                if let Some((Token::Sym('('), _, _)) = lexer.tokens.get(lexer.pos + 1) {
                    lexer.pos += 1;
                    continue;
                }
            }
            break;
        }
    }
    lexer.expect_sym('}')?;
    Ok(Mark::new(grading as u32, points).expect("grading validated"))
}

fn parse_point(
    lexer: &mut Lexer,
    copies: usize,
    labels: &mut BTreeMap<(usize, String), u32>,
) -> Result<PointRef, ParseError> {
    lexer.expect_sym('(')?;
    let copy_pos = lexer.here();
    let copy = lexer.expect_int()?;
    if copy < 0 || copy as usize >= copies {
        return Err(ParseError {
            line: copy_pos.0,
            column: copy_pos.1,
            message: format!("copy index out of range: {copy} (copies={copies})"),
        });
    }
    let copy = copy as usize;
    lexer.expect_sym(',')?;
    let label_text = match lexer.next()? {
        Token::Ident(s) => s,
        Token::Int(v) => v.to_string(),
        t => return Err(lexer.error(format!("expected a point label, found {t}"))),
    };
    lexer.expect_sym(')')?;
    let next = labels.len() as u32;
    let label = *labels.entry((copy, label_text)).or_insert(next);
    Ok(PointRef::new(copy, label))
}

/// Canonical text of an element.
pub fn print_element(element: &Element) -> String {
    if element.is_zero() {
        return "0".to_string();
    }
    let terms: Vec<String> = element.terms().iter().map(print_term).collect();
    terms.join(" + ")
}

fn print_term(term: &DecoratedTerm) -> String {
    let coeff = term.coefficient.value();
    let prefix = if coeff == 1 {
        String::new()
    } else {
        format!("{coeff}*")
    };
    let name = if term.provenance.is_empty() {
        "1".to_string()
    } else {
        term.provenance.join(".")
    };
    let marks: String = term.shape.marks().iter().map(print_mark).collect();
    format!(
        "{prefix}gen({name}, deg={}, copies={}, marks=[{marks}])",
        term.degree,
        term.shape.copies()
    )
}

fn print_mark(mark: &Mark) -> String {
    let points: Vec<String> = mark
        .points()
        .iter()
        .map(|p| format!("({},{})", p.copy, p.label))
        .collect();
    format!("{{g={};{}}}", mark.grading(), points.join(","))
}

/// Whether any term carries freshness tags (reported as non-serializable on
/// output).
pub fn has_freshness(element: &Element) -> bool {
    element.terms().iter().any(|t| !t.fresh.is_empty())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::calculus::{Ring, SignRuleId};

    fn params(ring: Ring) -> AlgebraParams {
        AlgebraParams::new(2, 1, false, ring, SignRuleId::Zero).unwrap()
    }

    #[test]
    fn unit_text_round_trip() {
        let p = params(Ring::Z);
        let alg = Algebra::new(p);
        let e = parse_element("gen(u, deg=0, copies=0, marks=[{g=1;}])", &p).unwrap();
        assert_eq!(e.terms().len(), 1);
        let t = &e.terms()[0];
        assert_eq!(t.degree, 0);
        assert_eq!(t.shape, alg.unit().terms()[0].shape);
        // Shape and behavior match the unit; provenance records the name.
        assert_eq!(t.provenance, vec!["u".to_string()]);
        let one_mark = parse_element("gen(x, deg=2, copies=1, marks=[{g=1;(0,p)}])", &p).unwrap();
        assert_eq!(
            alg.product(&e, &one_mark).unwrap().terms()[0].shape,
            one_mark.terms()[0].shape
        );
    }

    #[test]
    fn zero_grading_rejected_with_position() {
        let p = params(Ring::Z);
        let err = parse_element("gen(a, deg=2, copies=1, marks=[{g=0;(0,p)}])", &p).unwrap_err();
        assert!(err.message.contains("grading must be >= 1"), "{err}");
        assert_eq!(err.line, 1);
        assert!(err.column > 30, "{err}");
    }

    #[test]
    fn copy_out_of_range_rejected() {
        let p = params(Ring::Z);
        let err = parse_element("gen(a, deg=2, copies=1, marks=[{g=1;(1,p)}])", &p).unwrap_err();
        assert!(err.message.contains("copy index out of range"), "{err}");
    }

    #[test]
    fn syntax_error_reports_position() {
        let p = params(Ring::Z);
        let err = parse_element("gen(a deg=2)", &p).unwrap_err();
        assert_eq!((err.line, err.column), (1, 7));
    }

    #[test]
    fn shared_and_repeated_points_parse() {
        let p = params(Ring::Z);
        let e = parse_element(
            "gen(a, deg=1, copies=2, marks=[{g=1;(0,p),(0,p),(1,q)}{g=2;(0,p)}])",
            &p,
        )
        .unwrap();
        let t = &e.terms()[0];
        assert_eq!(t.shape.marks().len(), 2);
        // The repeated point stays repeated and is shared across marks.
        let g1 = t.shape.marks().iter().find(|m| m.grading() == 1).unwrap();
        assert_eq!(g1.size(), 3);
        let distinct: std::collections::BTreeSet<_> = g1.points().iter().collect();
        assert_eq!(distinct.len(), 2, "one point appears twice");
        let g2 = t.shape.marks().iter().find(|m| m.grading() == 2).unwrap();
        assert!(
            g1.points().contains(&g2.points()[0]),
            "the grading-2 mark shares its point with the grading-1 mark"
        );
    }

    #[test]
    fn sum_collection_and_z2_cancellation() {
        let z2 = params(Ring::Z2);
        let same = "gen(a, deg=1, copies=1, marks=[{g=1;(0,x)}])";
        let text = format!("{same} + {same}");
        assert!(parse_element(&text, &z2).unwrap().is_zero());
        let z = params(Ring::Z);
        let doubled = parse_element(&text, &z).unwrap();
        assert_eq!(doubled.terms()[0].coefficient.value(), 2);
        // Printing uses canonical labels.
        assert_eq!(
            print_element(&doubled),
            "2*gen(a, deg=1, copies=1, marks=[{g=1;(0,0)}])"
        );
    }

    #[test]
    fn zero_element_round_trip() {
        let p = params(Ring::Z);
        let zero = parse_element("0", &p).unwrap();
        assert!(zero.is_zero());
        assert_eq!(print_element(&zero), "0");
    }

    #[test]
    fn print_then_parse_is_identity_on_operation_outputs() {
        let p = params(Ring::Z);
        let alg = Algebra::new(p);
        let a = parse_element(
            "gen(a, deg=2, copies=2, marks=[{g=1;(0,x),(1,y)}{g=3;(1,y)}])",
            &p,
        )
        .unwrap();
        let b = parse_element("-3*gen(b, deg=1, copies=1, marks=[{g=1;}])", &p).unwrap();
        for e in [
            alg.product(&a, &b).unwrap(),
            alg.bracket(&a, &b).unwrap(),
            alg.proj(&a),
            alg.add(&a, &b).unwrap(),
        ] {
            let text = print_element(&e);
            let back = parse_element(&text, &p).unwrap();
            assert_eq!(back, e, "round trip of {text}");
        }
        // lift (and hence delta) outputs carry freshness, which the grammar
        // drops by design.
        for e in [alg.lift(&a), alg.delta(&a)] {
            assert!(has_freshness(&e));
            let back = parse_element(&print_element(&e), &p).unwrap();
            assert_eq!(back.terms().len(), e.terms().len());
            assert!(!has_freshness(&back));
        }
    }

    #[test]
    fn whitespace_insensitive() {
        let p = params(Ring::Z);
        let tight = parse_element("2*gen(a,deg=1,copies=1,marks=[{g=1;(0,p)}])", &p).unwrap();
        let spaced = parse_element(
            " 2 * gen ( a , deg = 1 , copies = 1 , marks = [ { g = 1 ; ( 0 , p ) } ] ) ",
            &p,
        )
        .unwrap();
        assert_eq!(tight, spaced);
    }

    #[test]
    fn multi_name_provenance_round_trips() {
        let p = params(Ring::Z);
        let alg = Algebra::new(p);
        let a = parse_element("gen(a, deg=0, copies=1, marks=[{g=1;}])", &p).unwrap();
        let b = parse_element("gen(b, deg=0, copies=1, marks=[{g=1;}])", &p).unwrap();
        let ab = alg.product(&a, &b).unwrap();
        let text = print_element(&ab);
        assert!(text.contains("gen(a.b,"), "{text}");
        assert_eq!(parse_element(&text, &p).unwrap(), ab);
    }
}
