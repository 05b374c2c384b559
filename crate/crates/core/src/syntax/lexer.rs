use crate::diag::{Code, Diagnostic, Pos};

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Tok {
    Ident(String),
    Int(i64),
    Str(String),
    Sym(&'static str),
    Eof,
}

impl Tok {
    pub fn describe(&self) -> String {
        match self {
            Tok::Ident(s) => format!("`{s}`"),
            Tok::Int(i) => format!("integer {i}"),
            Tok::Str(s) => format!("string {s:?}"),
            Tok::Sym(s) => format!("`{s}`"),
            Tok::Eof => "end of input".to_string(),
        }
    }
}

#[derive(Debug, Clone)]
pub struct Token {
    pub tok: Tok,
    pub pos: Pos,
}

// Longest first so that `..` wins over `.` and `:=` over `:`.
const SYMBOLS: &[&str] = &[
    ":=", "==", "!=", "<=", ">=", "..", "{", "}", "(", ")", "[", "]", ",", ";", ":", ".", "|", "<", ">", "+", "-", "*",
    "/",
];

/// Splits source text into tokens. Comments are `// ...`, `# ...` and `/* ... */`.
pub fn tokenize(unit: &str, text: &str) -> Result<Vec<Token>, Diagnostic> {
    let chars: Vec<char> = text.chars().collect();
    let mut out = Vec::new();
    let (mut i, mut line, mut col) = (0usize, 1u32, 1u32);

    macro_rules! bump {
        () => {{
            if chars[i] == '\n' {
                line += 1;
                col = 1;
            } else {
                col += 1;
            }
            i += 1;
        }};
    }

    while i < chars.len() {
        let c = chars[i];
        if c.is_whitespace() {
            bump!();
            continue;
        }
        let next = chars.get(i + 1).copied();
        if c == '#' || (c == '/' && next == Some('/')) {
            while i < chars.len() && chars[i] != '\n' {
                bump!();
            }
            continue;
        }
        if c == '/' && next == Some('*') {
            let start = Pos::new(line, col);
            bump!();
            bump!();
            loop {
                if i >= chars.len() {
                    return Err(Diagnostic::new(
                        unit,
                        start,
                        Code::SyntaxError,
                        "unterminated block comment",
                    ));
                }
                if chars[i] == '*' && chars.get(i + 1) == Some(&'/') {
                    bump!();
                    bump!();
                    break;
                }
                bump!();
            }
            continue;
        }

        let pos = Pos::new(line, col);
        if c.is_ascii_alphabetic() || c == '_' {
            let mut s = String::new();
            while i < chars.len() && (chars[i].is_ascii_alphanumeric() || chars[i] == '_') {
                s.push(chars[i]);
                bump!();
            }
            out.push(Token {
                tok: Tok::Ident(s),
                pos,
            });
            continue;
        }
        if c.is_ascii_digit() {
            let mut s = String::new();
            while i < chars.len() && chars[i].is_ascii_digit() {
                s.push(chars[i]);
                bump!();
            }
            let v = s.parse::<i64>().map_err(|_| {
                Diagnostic::new(
                    unit,
                    pos,
                    Code::SyntaxError,
                    format!("integer literal {s} out of range"),
                )
            })?;
            out.push(Token { tok: Tok::Int(v), pos });
            continue;
        }
        if c == '"' {
            bump!();
            let mut s = String::new();
            loop {
                if i >= chars.len() || chars[i] == '\n' {
                    return Err(Diagnostic::new(
                        unit,
                        pos,
                        Code::SyntaxError,
                        "unterminated string literal",
                    ));
                }
                match chars[i] {
                    '"' => {
                        bump!();
                        break;
                    }
                    '\\' => {
                        bump!();
                        let esc = chars.get(i).copied();
                        let ch = match esc {
                            Some('n') => '\n',
                            Some('t') => '\t',
                            Some('"') => '"',
                            Some('\\') => '\\',
                            _ => {
                                return Err(Diagnostic::new(
                                    unit,
                                    Pos::new(line, col),
                                    Code::SyntaxError,
                                    "unknown escape sequence",
                                ))
                            }
                        };
                        s.push(ch);
                        bump!();
                    }
                    ch => {
                        s.push(ch);
                        bump!();
                    }
                }
            }
            out.push(Token { tok: Tok::Str(s), pos });
            continue;
        }
        let rest: String = chars[i..chars.len().min(i + 2)].iter().collect();
        match SYMBOLS.iter().find(|s| rest.starts_with(**s)) {
            Some(sym) => {
                for _ in 0..sym.len() {
                    bump!();
                }
                out.push(Token {
                    tok: Tok::Sym(sym),
                    pos,
                });
            }
            None => {
                return Err(Diagnostic::new(
                    unit,
                    pos,
                    Code::SyntaxError,
                    format!("unexpected character `{c}`"),
                ))
            }
        }
    }
    out.push(Token {
        tok: Tok::Eof,
        pos: Pos::new(line, col),
    });
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn toks(s: &str) -> Vec<Tok> {
        tokenize("t", s).unwrap().into_iter().map(|t| t.tok).collect()
    }

    #[test]
    fn symbols_prefer_longest_match() {
        assert_eq!(
            toks("a := b..c"),
            vec![
                Tok::Ident("a".into()),
                Tok::Sym(":="),
                Tok::Ident("b".into()),
                Tok::Sym(".."),
                Tok::Ident("c".into()),
                Tok::Eof
            ]
        );
    }

    #[test]
    fn comments_are_skipped_and_positions_track_lines() {
        let t = tokenize("t", "// hi\n  x # trailing\n/* a\nb */ y").unwrap();
        assert_eq!(t[0].tok, Tok::Ident("x".into()));
        assert_eq!((t[0].pos.line, t[0].pos.col), (2, 3));
        assert_eq!((t[1].pos.line, t[1].pos.col), (4, 6));
    }

    #[test]
    fn string_escapes() {
        assert_eq!(toks(r#""a\"b""#)[0], Tok::Str("a\"b".into()));
    }

    #[test]
    fn bad_character_is_positioned() {
        let d = tokenize("u.mm", "a\n  $").unwrap_err();
        assert_eq!(d.to_string(), "u.mm:2:3: SyntaxError unexpected character `$`");
    }
}
