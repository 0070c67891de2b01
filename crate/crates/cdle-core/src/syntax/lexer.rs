use alloc::string::String;
use alloc::vec::Vec;

use super::ast::Span;
use super::ParseError;

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Tok {
    Ident(String),
    Star,
    Pi,
    All,
    Lam,
    BigLam,
    Iota,
    /// `·` type-argument marker.
    Dot2,
    Arrow,
    ErasedArrow,
    Tri,
    Simeq,
    Beta,
    Rho,
    Phi,
    Delta,
    Varsigma,
    Chi,
    Module,
    Import,
    As,
    Dot,
    Proj(u8),
    Comma,
    Colon,
    Eq,
    At,
    Slash,
    /// `-` immediately followed by an argument: erased application.
    MinusArg,
    /// `-` followed by whitespace: separator in `ρ`, `φ`, `χ`, `δ` and lets.
    MinusSep,
    LParen,
    RParen,
    LBrace,
    RBrace,
    LBrack,
    RBrack,
    Eof,
}

#[derive(Clone, Debug)]
pub struct Token {
    pub tok: Tok,
    pub span: Span,
    /// True when whitespace or a comment precedes the token.
    pub spaced: bool,
}

fn ident_start(c: char) -> bool {
    c.is_ascii_alphabetic() || c == '_'
}

fn ident_char(c: char) -> bool {
    c.is_ascii_alphanumeric() || c == '_' || c == '\''
}

fn keyword(s: &str) -> Option<Tok> {
    Some(match s {
        "module" => Tok::Module,
        "import" => Tok::Import,
        "as" => Tok::As,
        "Pi" => Tok::Pi,
        "All" => Tok::All,
        "lam" => Tok::Lam,
        "Lam" => Tok::BigLam,
        "iota" => Tok::Iota,
        "beta" => Tok::Beta,
        "rho" => Tok::Rho,
        "phi" => Tok::Phi,
        "delta" => Tok::Delta,
        "sigma-sym" => Tok::Varsigma,
        "chi" => Tok::Chi,
        _ => return None,
    })
}

pub fn lex(src: &str) -> Result<Vec<Token>, ParseError> {
    let mut out = Vec::new();
    let chars: Vec<(usize, char)> = src.char_indices().collect();
    let mut i = 0;
    let mut spaced = true;
    let at = |i: usize| chars.get(i).map(|p| p.1);
    let pos = |i: usize| chars.get(i).map(|p| p.0).unwrap_or(src.len());
    while i < chars.len() {
        let c = chars[i].1;
        let start = pos(i);
        if c.is_whitespace() {
            i += 1;
            spaced = true;
            continue;
        }
        if c == '-' && at(i + 1) == Some('-') {
            while i < chars.len() && chars[i].1 != '\n' {
                i += 1;
            }
            spaced = true;
            continue;
        }
        let single = |t: Tok| Some((t, 1usize));
        let sym: Option<(Tok, usize)> = match c {
            '★' | '*' => single(Tok::Star),
            'Π' => single(Tok::Pi),
            '∀' => single(Tok::All),
            'λ' => single(Tok::Lam),
            'Λ' => single(Tok::BigLam),
            'ι' => single(Tok::Iota),
            '·' | '^' => single(Tok::Dot2),
            '➔' => single(Tok::Arrow),
            '➾' => single(Tok::ErasedArrow),
            '◂' => single(Tok::Tri),
            '≃' => single(Tok::Simeq),
            'β' => single(Tok::Beta),
            'ρ' => single(Tok::Rho),
            'φ' => single(Tok::Phi),
            'δ' => single(Tok::Delta),
            'ς' => single(Tok::Varsigma),
            'χ' => single(Tok::Chi),
            ',' => single(Tok::Comma),
            ':' => single(Tok::Colon),
            '@' => single(Tok::At),
            '/' => single(Tok::Slash),
            '(' => single(Tok::LParen),
            ')' => single(Tok::RParen),
            '{' => single(Tok::LBrace),
            '}' => single(Tok::RBrace),
            '[' => single(Tok::LBrack),
            ']' => single(Tok::RBrack),
            '<' if at(i + 1) == Some('|') => Some((Tok::Tri, 2)),
            '~' if at(i + 1) == Some('=') => Some((Tok::Simeq, 2)),
            '=' if at(i + 1) == Some('>') => Some((Tok::ErasedArrow, 2)),
            '=' => single(Tok::Eq),
            '-' if at(i + 1) == Some('>') => Some((Tok::Arrow, 2)),
            '-' => {
                let next = at(i + 1);
                if next.map_or(true, |n| n.is_whitespace()) {
                    single(Tok::MinusSep)
                } else {
                    single(Tok::MinusArg)
                }
            }
            '.' => {
                let d = at(i + 1);
                let after = at(i + 2);
                match d {
                    Some(n @ ('1' | '2')) if !after.is_some_and(ident_char) => {
                        Some((Tok::Proj(if n == '1' { 1 } else { 2 }), 2))
                    }
                    _ => single(Tok::Dot),
                }
            }
            _ => None,
        };
        if let Some((tok, len)) = sym {
            i += len;
            out.push(Token {
                tok,
                span: Span::new(start, pos(i)),
                spaced,
            });
            spaced = false;
            continue;
        }
        if ident_start(c) {
            let mut j = i + 1;
            loop {
                match at(j) {
                    Some(ch) if ident_char(ch) => j += 1,
                    // A hyphen continues an identifier only when a letter,
                    // digit or underscore follows, so `x->y` and `x -y` lex
                    // as expected.
                    Some('-') if at(j + 1).is_some_and(|n| n.is_ascii_alphanumeric() || n == '_') => {
                        j += 1
                    }
                    _ => break,
                }
            }
            let text: String = chars[i..j].iter().map(|p| p.1).collect();
            let tok = keyword(&text).unwrap_or(Tok::Ident(text));
            out.push(Token {
                tok,
                span: Span::new(start, pos(j)),
                spaced,
            });
            spaced = false;
            i = j;
            continue;
        }
        return Err(ParseError::Lexical {
            span: Span::new(start, start + c.len_utf8()),
            found: c,
        });
    }
    out.push(Token {
        tok: Tok::Eof,
        span: Span::new(src.len(), src.len()),
        spaced: true,
    });
    Ok(out)
}
