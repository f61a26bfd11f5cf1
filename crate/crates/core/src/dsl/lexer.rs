use super::{Func, ParseError, Span};

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum TokenKind {
    Number(f64),
    Variable(usize),
    Plus,
    Minus,
    Star,
    Slash,
    Caret,
    LParen,
    RParen,
    Comma,
    Func(Func),
}

impl TokenKind {
    pub fn describe(&self) -> String {
        match self {
            TokenKind::Number(v) => format!("number {v}"),
            TokenKind::Variable(i) => format!("variable x{i}"),
            TokenKind::Plus => "'+'".into(),
            TokenKind::Minus => "'-'".into(),
            TokenKind::Star => "'*'".into(),
            TokenKind::Slash => "'/'".into(),
            TokenKind::Caret => "'^'".into(),
            TokenKind::LParen => "'('".into(),
            TokenKind::RParen => "')'".into(),
            TokenKind::Comma => "','".into(),
            TokenKind::Func(f) => format!("function {}", f.name()),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Token {
    pub kind: TokenKind,
    pub span: Span,
}

fn scan_digits(bytes: &[u8], mut i: usize) -> usize {
    while i < bytes.len() && bytes[i].is_ascii_digit() {
        i += 1;
    }
    i
}

/// Splits `src` into tokens. Whitespace is skipped; every other byte belongs
/// to exactly one token.
pub fn tokenize(src: &str) -> Result<Vec<Token>, ParseError> {
    let bytes = src.as_bytes();
    let mut tokens = Vec::new();
    let mut i = 0;

    while i < bytes.len() {
        let c = bytes[i];
        if c.is_ascii_whitespace() {
            i += 1;
            continue;
        }
        let start = i;
        let single = match c {
            b'+' => Some(TokenKind::Plus),
            b'-' => Some(TokenKind::Minus),
            b'*' => Some(TokenKind::Star),
            b'/' => Some(TokenKind::Slash),
            b'^' => Some(TokenKind::Caret),
            b'(' => Some(TokenKind::LParen),
            b')' => Some(TokenKind::RParen),
            b',' => Some(TokenKind::Comma),
            _ => None,
        };
        if let Some(kind) = single {
            i += 1;
            tokens.push(Token {
                kind,
                span: Span::new(start, i),
            });
            continue;
        }

        if c.is_ascii_digit() || (c == b'.' && bytes.get(i + 1).is_some_and(u8::is_ascii_digit)) {
            i = scan_digits(bytes, i);
            if i < bytes.len() && bytes[i] == b'.' {
                i = scan_digits(bytes, i + 1);
            }
            if i < bytes.len() && (bytes[i] == b'e' || bytes[i] == b'E') {
                let mut j = i + 1;
                if j < bytes.len() && (bytes[j] == b'+' || bytes[j] == b'-') {
                    j += 1;
                }
                if j < bytes.len() && bytes[j].is_ascii_digit() {
                    i = scan_digits(bytes, j);
                }
            }
            let span = Span::new(start, i);
            let text = &src[start..i];
            let value: f64 = text
                .parse()
                .map_err(|_| ParseError::new(format!("malformed number '{text}'"), span))?;
            if !value.is_finite() {
                return Err(ParseError::new(format!("number '{text}' overflows"), span));
            }
            tokens.push(Token {
                kind: TokenKind::Number(value),
                span,
            });
            continue;
        }

        if c.is_ascii_alphabetic() || c == b'_' {
            while i < bytes.len() && (bytes[i].is_ascii_alphanumeric() || bytes[i] == b'_') {
                i += 1;
            }
            let span = Span::new(start, i);
            let word = &src[start..i];
            let kind = if let Some(f) = Func::from_name(word) {
                TokenKind::Func(f)
            } else if word.len() > 1 && word.starts_with('x') && word[1..].bytes().all(|b| b.is_ascii_digit()) {
                let index = word[1..]
                    .parse::<usize>()
                    .map_err(|_| ParseError::new(format!("variable index in '{word}' is too large"), span))?;
                TokenKind::Variable(index)
            } else {
                return Err(ParseError::new(format!("unknown identifier '{word}'"), span)
                    .expecting(&["x<index>", "sin", "cos", "exp", "sqrt", "abs"]));
            };
            tokens.push(Token { kind, span });
            continue;
        }

        let ch = src[start..].chars().next().unwrap_or('\u{fffd}');
        let span = Span::new(start, start + ch.len_utf8());
        return Err(ParseError::new(format!("unexpected character '{ch}'"), span));
    }

    Ok(tokens)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn kinds(src: &str) -> Vec<TokenKind> {
        tokenize(src).unwrap().into_iter().map(|t| t.kind).collect()
    }

    #[test]
    fn basic_tokens() {
        assert_eq!(
            kinds("0.5*(x0^2 + sin(x12))"),
            vec![
                TokenKind::Number(0.5),
                TokenKind::Star,
                TokenKind::LParen,
                TokenKind::Variable(0),
                TokenKind::Caret,
                TokenKind::Number(2.0),
                TokenKind::Plus,
                TokenKind::Func(Func::Sin),
                TokenKind::LParen,
                TokenKind::Variable(12),
                TokenKind::RParen,
                TokenKind::RParen,
            ]
        );
    }

    #[test]
    fn number_forms() {
        assert_eq!(kinds("1e3"), vec![TokenKind::Number(1000.0)]);
        assert_eq!(kinds(".25"), vec![TokenKind::Number(0.25)]);
        assert_eq!(kinds("2.5E-1"), vec![TokenKind::Number(0.25)]);
        assert_eq!(kinds("3."), vec![TokenKind::Number(3.0)]);
        assert!(tokenize("1e999").is_err());
    }

    #[test]
    fn spans_cover_non_whitespace() {
        let src = " x0 +\t12.5*cos( x3 ) ";
        let toks = tokenize(src).unwrap();
        let mut covered = vec![false; src.len()];
        let mut last_end = 0;
        for t in &toks {
            assert!(t.span.start >= last_end);
            last_end = t.span.end;
            for c in &mut covered[t.span.start..t.span.end] {
                *c = true;
            }
        }
        for (i, b) in src.bytes().enumerate() {
            assert_eq!(covered[i], !b.is_ascii_whitespace(), "byte {i}");
        }
    }

    #[test]
    fn lexical_errors() {
        let err = tokenize("x0 + y").unwrap_err();
        assert_eq!(err.span, Span::new(5, 6));
        assert!(tokenize("x").is_err());
        assert!(tokenize("x99999999999999999999999").is_err());
        let err = tokenize("x0 é").unwrap_err();
        assert_eq!(err.span, Span::new(3, 5));
    }
}
