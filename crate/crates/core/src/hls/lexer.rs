use super::ParseError;

#[derive(Debug, Clone, PartialEq)]
pub enum Tok {
    Ident(String),
    Number(f64),
    /// Punctuation and operators, normalized to their ASCII spelling.
    Sym(&'static str),
    AtTime,
    AtIndex,
    Eof,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Token {
    pub tok: Tok,
    /// Byte offset into the source.
    pub pos: usize,
}

pub const KEYWORDS: &[&str] = &[
    "forall", "exists", "in", "such", "that", "not", "and", "or", "implies", "t2i", "i2t", "inf",
    "true", "false",
];

fn ident_start(c: char) -> bool {
    c == '_' || c.is_alphabetic()
}

fn ident_continue(c: char) -> bool {
    c == '_' || c.is_alphanumeric()
}

/// Whether `s` is a plain identifier usable as a signal name.
pub fn is_identifier(s: &str) -> bool {
    let mut chars = s.chars();
    matches!(chars.next(), Some(c) if ident_start(c))
        && chars.all(ident_continue)
        && !KEYWORDS.contains(&s)
}

pub fn tokenize(src: &str) -> Result<Vec<Token>, ParseError> {
    let mut out = Vec::new();
    let mut it = src.char_indices().peekable();
    while let Some(&(pos, c)) = it.peek() {
        if c.is_whitespace() {
            it.next();
            continue;
        }
        if c.is_ascii_digit() || (c == '.' && src[pos + 1..].starts_with(|d: char| d.is_ascii_digit())) {
            let end = number_end(src, pos);
            let text = &src[pos..end];
            let value: f64 = text.parse().map_err(|_| ParseError::syntax(pos, format!("bad number `{text}`")))?;
            if !value.is_finite() {
                return Err(ParseError::syntax(pos, format!("number `{text}` out of range")));
            }
            out.push(Token { tok: Tok::Number(value), pos });
            while it.peek().is_some_and(|&(p, _)| p < end) {
                it.next();
            }
            continue;
        }
        if ident_start(c) {
            let mut end = pos;
            while let Some(&(p, ch)) = it.peek() {
                if ident_continue(ch) {
                    end = p + ch.len_utf8();
                    it.next();
                } else {
                    break;
                }
            }
            let word = &src[pos..end];
            out.push(Token { tok: Tok::Ident(word.to_string()), pos });
            continue;
        }
        it.next();
        let next = it.peek().map(|&(_, ch)| ch);
        let sym: &'static str = match (c, next) {
            ('@', Some('t')) | ('@', Some('i')) => {
                let kind = next.unwrap();
                let after = src[pos + 2..].chars().next();
                if after.is_some_and(ident_continue) {
                    return Err(ParseError::syntax(pos, "expected `@t` or `@i`"));
                }
                it.next();
                out.push(Token { tok: if kind == 't' { Tok::AtTime } else { Tok::AtIndex }, pos });
                continue;
            }
            ('<', Some('=')) => {
                it.next();
                "<="
            }
            ('>', Some('=')) => {
                it.next();
                ">="
            }
            ('!', Some('=')) => {
                it.next();
                "!="
            }
            ('<', _) => "<",
            ('>', _) => ">",
            ('=', _) => "=",
            ('≤', _) => "<=",
            ('≥', _) => ">=",
            ('≠', _) => "!=",
            ('∞', _) => {
                out.push(Token { tok: Tok::Ident("inf".into()), pos });
                continue;
            }
            ('(', _) => "(",
            (')', _) => ")",
            ('[', _) => "[",
            (']', _) => "]",
            (',', _) => ",",
            ('+', _) => "+",
            ('-', _) => "-",
            ('*', _) => "*",
            ('/', _) => "/",
            _ => return Err(ParseError::syntax(pos, format!("unexpected character `{c}`"))),
        };
        out.push(Token { tok: Tok::Sym(sym), pos });
    }
    out.push(Token { tok: Tok::Eof, pos: src.len() });
    Ok(out)
}

fn number_end(src: &str, start: usize) -> usize {
    let b = src.as_bytes();
    let mut i = start;
    while i < b.len() && b[i].is_ascii_digit() {
        i += 1;
    }
    if i < b.len() && b[i] == b'.' {
        i += 1;
        while i < b.len() && b[i].is_ascii_digit() {
            i += 1;
        }
    }
    if i < b.len() && (b[i] == b'e' || b[i] == b'E') {
        let mut j = i + 1;
        if j < b.len() && (b[j] == b'+' || b[j] == b'-') {
            j += 1;
        }
        if j < b.len() && b[j].is_ascii_digit() {
            while j < b.len() && b[j].is_ascii_digit() {
                j += 1;
            }
            i = j;
        }
    }
    i
}
