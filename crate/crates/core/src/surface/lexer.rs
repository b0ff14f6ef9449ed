use std::fmt;

use super::{Span, SurfaceError};

/// Single-character operator symbols usable as infix constructor names.
const OPERATOR_CHARS: &str = "⋅*+≤⊗→∘⊕⊙×∧∨⊔⊓⋆∙⊸⊠⊞⊘≥⊆⊂∪∩△▷◁⊢⇀⊳⊲";

pub fn is_operator_char(c: char) -> bool {
    OPERATOR_CHARS.contains(c)
}

/// A name made only of operator characters.
pub fn is_operator_symbol(s: &str) -> bool {
    !s.is_empty() && s.chars().all(is_operator_char)
}

pub fn is_ident_start(c: char) -> bool {
    (c.is_alphabetic() || c == '_') && !is_operator_char(c)
}

pub fn is_ident_continue(c: char) -> bool {
    (c.is_alphanumeric() || c == '_' || c == '\'') && !is_operator_char(c)
}

/// A valid DSL identifier or operator symbol.
pub fn is_valid_name(s: &str) -> bool {
    let mut cs = s.chars();
    match cs.next() {
        Some(c) if is_ident_start(c) => cs.all(is_ident_continue),
        Some(_) => is_operator_symbol(s),
        None => false,
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Tok {
    Ident(String),
    Op(String),
    Int(i64),
    LParen,
    RParen,
    LBracket,
    RBracket,
    LBrace,
    RBrace,
    Comma,
    Colon,
    ColonColon,
    ColonEq,
    EqEq,
    FatArrow,
    Eq,
    Turnstile,
    Newline,
    Eof,
}

impl fmt::Display for Tok {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Tok::Ident(s) => write!(f, "`{s}`"),
            Tok::Op(s) => write!(f, "operator `{s}`"),
            Tok::Int(n) => write!(f, "`{n}`"),
            Tok::LParen => f.write_str("`(`"),
            Tok::RParen => f.write_str("`)`"),
            Tok::LBracket => f.write_str("`[`"),
            Tok::RBracket => f.write_str("`]`"),
            Tok::LBrace => f.write_str("`{`"),
            Tok::RBrace => f.write_str("`}`"),
            Tok::Comma => f.write_str("`,`"),
            Tok::Colon => f.write_str("`:`"),
            Tok::ColonColon => f.write_str("`::`"),
            Tok::ColonEq => f.write_str("`:=`"),
            Tok::EqEq => f.write_str("`==`"),
            Tok::FatArrow => f.write_str("`=>`"),
            Tok::Eq => f.write_str("`=`"),
            Tok::Turnstile => f.write_str("`⊣`"),
            Tok::Newline => f.write_str("end of line"),
            Tok::Eof => f.write_str("end of input"),
        }
    }
}

#[derive(Clone, Debug)]
pub struct Token {
    pub tok: Tok,
    pub span: Span,
}

/// Splits source text into tokens.
///
/// Lines matter: a newline ends a declaration unless it occurs inside
/// parentheses or brackets, or right after a token that cannot end one (an
/// operator, `⊣`, `::`, `:=`, `==`, `=>`, `=`, `:` or `,`). A `;` separates
/// declarations like a newline does. `#` starts a comment.
pub fn lex(src: &str) -> Result<Vec<Token>, SurfaceError> {
    let mut out: Vec<Token> = Vec::new();
    let chars: Vec<char> = src.chars().collect();
    let mut i = 0;
    let (mut line, mut col) = (1usize, 1usize);
    let mut depth = 0usize;

    let continues = |out: &Vec<Token>| {
        matches!(
            out.last().map(|t| &t.tok),
            Some(
                Tok::Op(_)
                    | Tok::Turnstile
                    | Tok::ColonColon
                    | Tok::ColonEq
                    | Tok::EqEq
                    | Tok::FatArrow
                    | Tok::Eq
                    | Tok::Colon
                    | Tok::Comma
                    | Tok::Newline
            ) | None
        )
    };

    while i < chars.len() {
        let c = chars[i];
        let span = Span::new(line, col);
        let next = chars.get(i + 1).copied();
        let mut advance = 1;
        let tok = match c {
            '\n' | ';' => {
                if depth == 0 && !continues(&out) {
                    Some(Tok::Newline)
                } else {
                    None
                }
            }
            c if c.is_whitespace() => None,
            '#' => {
                while i + advance < chars.len() && chars[i + advance] != '\n' {
                    advance += 1;
                }
                None
            }
            '(' => {
                depth += 1;
                Some(Tok::LParen)
            }
            ')' => {
                depth = depth.saturating_sub(1);
                Some(Tok::RParen)
            }
            '[' => {
                depth += 1;
                Some(Tok::LBracket)
            }
            ']' => {
                depth = depth.saturating_sub(1);
                Some(Tok::RBracket)
            }
            '{' => Some(Tok::LBrace),
            '}' => Some(Tok::RBrace),
            ',' => Some(Tok::Comma),
            '⊣' => Some(Tok::Turnstile),
            ':' => match next {
                Some(':') => {
                    advance = 2;
                    Some(Tok::ColonColon)
                }
                Some('=') => {
                    advance = 2;
                    Some(Tok::ColonEq)
                }
                _ => Some(Tok::Colon),
            },
            '=' => match next {
                Some('=') => {
                    advance = 2;
                    Some(Tok::EqEq)
                }
                Some('>') => {
                    advance = 2;
                    Some(Tok::FatArrow)
                }
                _ => Some(Tok::Eq),
            },
            '|' if next == Some('-') => {
                advance = 2;
                Some(Tok::Turnstile)
            }
            '-' if next == Some('>') => {
                advance = 2;
                Some(Tok::Op("→".into()))
            }
            '<' if next == Some('=') => {
                advance = 2;
                Some(Tok::Op("≤".into()))
            }
            '-' if next.is_some_and(|d| d.is_ascii_digit()) => {
                let mut j = i + 1;
                while j < chars.len() && chars[j].is_ascii_digit() {
                    j += 1;
                }
                advance = j - i;
                let text: String = chars[i..j].iter().collect();
                Some(Tok::Int(text.parse().map_err(|_| {
                    SurfaceError::syntax(format!("integer literal {text} out of range"), span)
                })?))
            }
            c if c.is_ascii_digit() => {
                let mut j = i;
                while j < chars.len() && chars[j].is_ascii_digit() {
                    j += 1;
                }
                advance = j - i;
                let text: String = chars[i..j].iter().collect();
                Some(Tok::Int(text.parse().map_err(|_| {
                    SurfaceError::syntax(format!("integer literal {text} out of range"), span)
                })?))
            }
            c if is_operator_char(c) => Some(Tok::Op(c.to_string())),
            c if is_ident_start(c) => {
                let mut j = i + 1;
                while j < chars.len() && is_ident_continue(chars[j]) {
                    j += 1;
                }
                advance = j - i;
                Some(Tok::Ident(chars[i..j].iter().collect()))
            }
            other => {
                return Err(SurfaceError::syntax(
                    format!("unexpected character {other:?}"),
                    span,
                ))
            }
        };
        if let Some(tok) = tok {
            // a line continuation: drop a pending newline before a turnstile
            if tok == Tok::Turnstile && matches!(out.last().map(|t| &t.tok), Some(Tok::Newline)) {
                out.pop();
            }
            out.push(Token { tok, span });
        }
        for k in 0..advance {
            if chars[i + k] == '\n' {
                line += 1;
                col = 1;
            } else {
                col += 1;
            }
        }
        i += advance;
    }
    out.push(Token {
        tok: Tok::Eof,
        span: Span::new(line, col),
    });
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn toks(src: &str) -> Vec<Tok> {
        lex(src).unwrap().into_iter().map(|t| t.tok).collect()
    }

    #[test]
    fn unicode_names_and_operators() {
        assert_eq!(
            toks("x::ℕ + Bad₂ ⋅ α'"),
            vec![
                Tok::Ident("x".into()),
                Tok::ColonColon,
                Tok::Ident("ℕ".into()),
                Tok::Op("+".into()),
                Tok::Ident("Bad₂".into()),
                Tok::Op("⋅".into()),
                Tok::Ident("α'".into()),
                Tok::Eof
            ]
        );
    }

    #[test]
    fn ascii_fallbacks() {
        assert_eq!(
            toks("a -> b |- [] <= c"),
            vec![
                Tok::Ident("a".into()),
                Tok::Op("→".into()),
                Tok::Ident("b".into()),
                Tok::Turnstile,
                Tok::LBracket,
                Tok::RBracket,
                Tok::Op("≤".into()),
                Tok::Ident("c".into()),
                Tok::Eof
            ]
        );
    }

    #[test]
    fn newlines_inside_brackets_and_after_continuations_vanish() {
        let t = toks("f ⊣\n [a,\n b]\n g");
        assert_eq!(t.iter().filter(|t| **t == Tok::Newline).count(), 1);
        let t = toks("f\n ⊣ [a]");
        assert!(!t.contains(&Tok::Newline));
    }

    #[test]
    fn comments_and_spans() {
        let ts = lex("# hello\n  foo").unwrap();
        assert_eq!(ts[0].tok, Tok::Ident("foo".into()));
        assert_eq!((ts[0].span.line, ts[0].span.col), (2, 3));
    }

    #[test]
    fn bad_character() {
        let err = lex("a $ b").unwrap_err();
        assert_eq!((err.span.line, err.span.col), (1, 3));
    }
}
