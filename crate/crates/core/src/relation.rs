//! A small algebra for word-vector relations.
//!
//! Grammar (whitespace insignificant):
//!
//! ```text
//! relation := expr '~=' (expr | '0')
//! expr     := word (('+' | '-') word)*
//! word     := [a-z][a-z0-9]*
//! ```
//!
//! `germany + capital ~= berlin` asserts that the summed left side lands
//! nearest the right word; `king - man ~= queen - woman` asserts that the
//! two differences agree. Relations are normalized on parse: a multi-term
//! right side moves onto the left with flipped signs, leaving the right side
//! a single word or the literal `0`. The bare `0` is reserved for the zero
//! vector and is only legal as the entire right side.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Sign {
    Plus,
    Minus,
}

impl Sign {
    pub fn flip(self) -> Sign {
        match self {
            Sign::Plus => Sign::Minus,
            Sign::Minus => Sign::Plus,
        }
    }

    pub fn factor(self) -> f64 {
        match self {
            Sign::Plus => 1.0,
            Sign::Minus => -1.0,
        }
    }
}

/// Right side of a normalized relation: a single word or the zero vector.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Rhs {
    Word(String),
    Zero,
}

/// A normalized relation: signed words on the left, a word or `0` on the
/// right. Invariants: the left side is non-empty and starts with a positive
/// term (the grammar cannot express a leading minus), no word repeats on the
/// left, and a right-side word never appears on the left.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Relation {
    lhs: Vec<(Sign, String)>,
    rhs: Rhs,
}

impl Relation {
    pub fn new(lhs: Vec<(Sign, String)>, rhs: Rhs) -> Result<Self> {
        let invalid = |message: String| Err(Error::RelationInvalid { message });
        if lhs.is_empty() {
            return invalid("left side must contain at least one word".into());
        }
        if lhs[0].0 == Sign::Minus {
            return invalid("left side must start with a positive term".into());
        }
        for (i, (_, word)) in lhs.iter().enumerate() {
            if lhs[..i].iter().any(|(_, w)| w == word) {
                return invalid(format!("word {word:?} appears more than once on the left side"));
            }
        }
        if let Rhs::Word(word) = &rhs {
            if lhs.iter().any(|(_, w)| w == word) {
                return invalid(format!("right-hand word {word:?} also appears on the left side"));
            }
        }
        Ok(Relation { lhs, rhs })
    }

    pub fn lhs(&self) -> &[(Sign, String)] {
        &self.lhs
    }

    pub fn rhs(&self) -> &Rhs {
        &self.rhs
    }

    /// Every word mentioned anywhere in the relation.
    pub fn words(&self) -> Vec<&str> {
        let mut words: Vec<&str> = self.lhs.iter().map(|(_, w)| w.as_str()).collect();
        if let Rhs::Word(w) = &self.rhs {
            words.push(w);
        }
        words
    }

    /// Render back to canonical DSL text. Parsing the result reproduces the
    /// relation exactly.
    pub fn unparse(&self) -> String {
        let mut out = String::new();
        for (i, (sign, word)) in self.lhs.iter().enumerate() {
            if i == 0 {
                out.push_str(word);
            } else {
                out.push_str(match sign {
                    Sign::Plus => " + ",
                    Sign::Minus => " - ",
                });
                out.push_str(word);
            }
        }
        out.push_str(" ~= ");
        match &self.rhs {
            Rhs::Word(w) => out.push_str(w),
            Rhs::Zero => out.push('0'),
        }
        out
    }
}

#[derive(Debug, Clone, PartialEq)]
enum Token {
    Word(String),
    Plus,
    Minus,
    Approx,
    Zero,
    End,
}

struct Lexer {
    tokens: Vec<(Token, usize)>,
    cursor: usize,
}

impl Lexer {
    fn lex(text: &str) -> Result<Lexer> {
        let bytes = text.as_bytes();
        let mut tokens = Vec::new();
        let mut i = 0;
        let err = |position: usize, message: String| Err(Error::RelationSyntax { position, message });
        while i < bytes.len() {
            let c = bytes[i] as char;
            match c {
                ' ' | '\t' | '\n' | '\r' => i += 1,
                '+' => {
                    tokens.push((Token::Plus, i));
                    i += 1;
                }
                '-' => {
                    tokens.push((Token::Minus, i));
                    i += 1;
                }
                '~' => {
                    if bytes.get(i + 1) != Some(&b'=') {
                        return err(i, "expected '=' after '~'".into());
                    }
                    tokens.push((Token::Approx, i));
                    i += 2;
                }
                'a'..='z' => {
                    let start = i;
                    while i < bytes.len() && (bytes[i] as char).is_ascii_alphanumeric() {
                        let ch = bytes[i] as char;
                        if ch.is_ascii_uppercase() {
                            break;
                        }
                        i += 1;
                    }
                    tokens.push((Token::Word(text[start..i].to_string()), start));
                }
                '0' => {
                    if bytes
                        .get(i + 1)
                        .is_some_and(|b| (*b as char).is_ascii_alphanumeric())
                    {
                        return err(i, "words must start with a lowercase letter".into());
                    }
                    tokens.push((Token::Zero, i));
                    i += 1;
                }
                _ => {
                    return err(i, format!("unexpected character {c:?}"));
                }
            }
        }
        tokens.push((Token::End, text.len()));
        Ok(Lexer { tokens, cursor: 0 })
    }

    fn peek(&self) -> &(Token, usize) {
        &self.tokens[self.cursor]
    }

    fn bump(&mut self) -> (Token, usize) {
        let t = self.tokens[self.cursor].clone();
        if self.cursor + 1 < self.tokens.len() {
            self.cursor += 1;
        }
        t
    }
}

fn syntax_error<T>(position: usize, message: &str) -> Result<T> {
    Err(Error::RelationSyntax {
        position,
        message: message.into(),
    })
}

fn parse_expr(lex: &mut Lexer) -> Result<Vec<(Sign, String)>> {
    let mut terms = Vec::new();
    match lex.bump() {
        (Token::Word(w), _) => terms.push((Sign::Plus, w)),
        (_, pos) => return syntax_error(pos, "expected a word"),
    }
    loop {
        let sign = match lex.peek() {
            (Token::Plus, _) => Sign::Plus,
            (Token::Minus, _) => Sign::Minus,
            _ => break,
        };
        lex.bump();
        match lex.bump() {
            (Token::Word(w), _) => terms.push((sign, w)),
            (_, pos) => {
                return syntax_error(pos, "expected a word after '+' or '-'");
            }
        }
    }
    Ok(terms)
}

/// Parse and normalize one relation from DSL text.
pub fn parse_relation(text: &str) -> Result<Relation> {
    let mut lex = Lexer::lex(text)?;
    let mut lhs = parse_expr(&mut lex)?;
    match lex.bump() {
        (Token::Approx, _) => {}
        (_, pos) => return syntax_error(pos, "expected '+', '-' or '~='"),
    }
    let rhs = match lex.peek() {
        (Token::Zero, _) => {
            lex.bump();
            Rhs::Zero
        }
        _ => {
            let terms = parse_expr(&mut lex)?;
            if terms.len() == 1 {
                Rhs::Word(terms.into_iter().next().unwrap().1)
            } else {
                // Multi-term right side: fold into the left with flipped
                // signs, leaving a zero right side.
                lhs.extend(terms.into_iter().map(|(s, w)| (s.flip(), w)));
                Rhs::Zero
            }
        }
    };
    match lex.bump() {
        (Token::End, _) => {}
        (_, pos) => return syntax_error(pos, "unexpected trailing input"),
    }
    Relation::new(lhs, rhs)
}
