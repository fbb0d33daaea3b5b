use num_bigint::BigInt;
use std::fmt;

use super::error::{ParseError, ParseErrorKind, Pos};

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Tok {
    Ident(String),
    Int(BigInt),
    // keywords
    Var,
    Const,
    Array,
    Of,
    IntTy,
    BoolTy,
    True,
    False,
    If,
    Fi,
    Do,
    Od,
    Skip,
    Abort,
    Fail,
    Choice,
    Div,
    Mod,
    And,
    Or,
    Not,
    Process,
    End,
    While,
    Then,
    Else,
    Await,
    // symbols
    Assign,
    Arrow,
    Box,
    Par,
    Semi,
    Comma,
    Colon,
    LParen,
    RParen,
    LBracket,
    RBracket,
    DotDot,
    Eq,
    Ne,
    Lt,
    Le,
    Gt,
    Ge,
    Plus,
    Minus,
    Star,
    Question,
    Bang,
    Eof,
}

impl Tok {
    fn keyword(word: &str) -> Option<Tok> {
        Some(match word {
            "var" => Tok::Var,
            "const" => Tok::Const,
            "array" => Tok::Array,
            "of" => Tok::Of,
            "int" => Tok::IntTy,
            "bool" => Tok::BoolTy,
            "true" => Tok::True,
            "false" => Tok::False,
            "if" => Tok::If,
            "fi" => Tok::Fi,
            "do" => Tok::Do,
            "od" => Tok::Od,
            "skip" => Tok::Skip,
            "abort" => Tok::Abort,
            "fail" => Tok::Fail,
            "choice" => Tok::Choice,
            "div" => Tok::Div,
            "mod" => Tok::Mod,
            "and" => Tok::And,
            "or" => Tok::Or,
            "not" => Tok::Not,
            "process" => Tok::Process,
            "end" => Tok::End,
            "while" => Tok::While,
            "then" => Tok::Then,
            "else" => Tok::Else,
            "await" => Tok::Await,
            _ => return None,
        })
    }
}

impl fmt::Display for Tok {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            Tok::Ident(name) => return write!(f, "identifier `{name}`"),
            Tok::Int(v) => return write!(f, "integer `{v}`"),
            Tok::Eof => return f.write_str("end of input"),
            Tok::Var => "var",
            Tok::Const => "const",
            Tok::Array => "array",
            Tok::Of => "of",
            Tok::IntTy => "int",
            Tok::BoolTy => "bool",
            Tok::True => "true",
            Tok::False => "false",
            Tok::If => "if",
            Tok::Fi => "fi",
            Tok::Do => "do",
            Tok::Od => "od",
            Tok::Skip => "skip",
            Tok::Abort => "abort",
            Tok::Fail => "fail",
            Tok::Choice => "choice",
            Tok::Div => "div",
            Tok::Mod => "mod",
            Tok::And => "and",
            Tok::Or => "or",
            Tok::Not => "not",
            Tok::Process => "process",
            Tok::End => "end",
            Tok::While => "while",
            Tok::Then => "then",
            Tok::Else => "else",
            Tok::Await => "await",
            Tok::Assign => ":=",
            Tok::Arrow => "->",
            Tok::Box => "[]",
            Tok::Par => "||",
            Tok::Semi => ";",
            Tok::Comma => ",",
            Tok::Colon => ":",
            Tok::LParen => "(",
            Tok::RParen => ")",
            Tok::LBracket => "[",
            Tok::RBracket => "]",
            Tok::DotDot => "..",
            Tok::Eq => "=",
            Tok::Ne => "!=",
            Tok::Lt => "<",
            Tok::Le => "<=",
            Tok::Gt => ">",
            Tok::Ge => ">=",
            Tok::Plus => "+",
            Tok::Minus => "-",
            Tok::Star => "*",
            Tok::Question => "?",
            Tok::Bang => "!",
        };
        write!(f, "`{s}`")
    }
}

#[derive(Debug, Clone)]
pub struct Token {
    pub tok: Tok,
    pub pos: Pos,
}

pub fn tokenize(src: &str) -> Result<Vec<Token>, ParseError> {
    let chars: Vec<char> = src.chars().collect();
    let mut out = Vec::new();
    let (mut i, mut line, mut col) = (0usize, 1usize, 1usize);

    while i < chars.len() {
        let c = chars[i];
        let pos = Pos { line, col };
        if c == '\n' {
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
        if c.is_ascii_digit() {
            let start = i;
            while i < chars.len() && chars[i].is_ascii_digit() {
                i += 1;
            }
            let text: String = chars[start..i].iter().collect();
            col += i - start;
            out.push(Token {
                tok: Tok::Int(text.parse().expect("digits")),
                pos,
            });
            continue;
        }
        if c.is_alphabetic() || c == '_' {
            let start = i;
            while i < chars.len()
                && (chars[i].is_alphanumeric() || chars[i] == '_' || chars[i] == '\'')
            {
                i += 1;
            }
            let word: String = chars[start..i].iter().collect();
            col += i - start;
            let tok = Tok::keyword(&word).unwrap_or(Tok::Ident(word));
            out.push(Token { tok, pos });
            continue;
        }
        let next = chars.get(i + 1).copied();
        let (tok, len) = match (c, next) {
            (':', Some('=')) => (Tok::Assign, 2),
            ('-', Some('>')) => (Tok::Arrow, 2),
            ('[', Some(']')) => (Tok::Box, 2),
            ('|', Some('|')) => (Tok::Par, 2),
            ('.', Some('.')) => (Tok::DotDot, 2),
            ('!', Some('=')) => (Tok::Ne, 2),
            ('<', Some('=')) => (Tok::Le, 2),
            ('>', Some('=')) => (Tok::Ge, 2),
            (';', _) => (Tok::Semi, 1),
            (',', _) => (Tok::Comma, 1),
            (':', _) => (Tok::Colon, 1),
            ('(', _) => (Tok::LParen, 1),
            (')', _) => (Tok::RParen, 1),
            ('[', _) => (Tok::LBracket, 1),
            (']', _) => (Tok::RBracket, 1),
            ('=', _) => (Tok::Eq, 1),
            ('<', _) => (Tok::Lt, 1),
            ('>', _) => (Tok::Gt, 1),
            ('+', _) => (Tok::Plus, 1),
            ('-', _) => (Tok::Minus, 1),
            ('*', _) => (Tok::Star, 1),
            ('?', _) => (Tok::Question, 1),
            ('!', _) => (Tok::Bang, 1),
            _ => {
                return Err(ParseError::new(
                    pos,
                    ParseErrorKind::Syntax {
                        expected: "a token".into(),
                        found: format!("character `{c}`"),
                    },
                ))
            }
        };
        out.push(Token { tok, pos });
        i += len;
        col += len;
    }
    out.push(Token {
        tok: Tok::Eof,
        pos: Pos { line, col },
    });
    Ok(out)
}
