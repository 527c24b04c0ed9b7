#[derive(Debug, Clone, PartialEq, Eq)]
pub(crate) enum Tok {
    Word(String),
    Str(String),
    Eq,
    Comma,
    LBracket,
    RBracket,
}

#[derive(Debug, Clone)]
pub(crate) struct Token {
    pub tok: Tok,
    /// 1-based column, counted in characters.
    pub column: usize,
}

#[derive(Debug, Clone)]
pub(crate) struct LexError {
    pub column: usize,
    pub code: &'static str,
    pub message: String,
}

pub(crate) fn is_word_char(c: char) -> bool {
    c.is_alphanumeric() || matches!(c, '_' | '-' | '\'' | '.')
}

/// Splits one line into tokens. Comments run from `#` to end of line.
pub(crate) fn lex_line(line: &str) -> Result<Vec<Token>, LexError> {
    let chars: Vec<char> = line.chars().collect();
    let mut out = Vec::new();
    let mut i = 0;
    while i < chars.len() {
        let c = chars[i];
        let column = i + 1;
        match c {
            '#' => break,
            c if c.is_whitespace() => i += 1,
            '=' => {
                out.push(Token { tok: Tok::Eq, column });
                i += 1;
            }
            ',' => {
                out.push(Token { tok: Tok::Comma, column });
                i += 1;
            }
            '[' => {
                out.push(Token { tok: Tok::LBracket, column });
                i += 1;
            }
            ']' => {
                out.push(Token { tok: Tok::RBracket, column });
                i += 1;
            }
            '"' => {
                let mut text = String::new();
                i += 1;
                let mut closed = false;
                while i < chars.len() {
                    match chars[i] {
                        '"' => {
                            closed = true;
                            i += 1;
                            break;
                        }
                        '\\' => {
                            let Some(&next) = chars.get(i + 1) else {
                                return Err(LexError {
                                    column: i + 1,
                                    code: "BAD_ESCAPE",
                                    message: "backslash at end of line".into(),
                                });
                            };
                            text.push(match next {
                                'n' => '\n',
                                't' => '\t',
                                'r' => '\r',
                                '"' => '"',
                                '\\' => '\\',
                                other => {
                                    return Err(LexError {
                                        column: i + 1,
                                        code: "BAD_ESCAPE",
                                        message: format!("unknown escape `\\{other}`"),
                                    })
                                }
                            });
                            i += 2;
                        }
                        other => {
                            text.push(other);
                            i += 1;
                        }
                    }
                }
                if !closed {
                    return Err(LexError { column, code: "UNTERMINATED_STRING", message: "string is not closed".into() });
                }
                out.push(Token { tok: Tok::Str(text), column });
            }
            c if is_word_char(c) => {
                let start = i;
                while i < chars.len() && is_word_char(chars[i]) {
                    i += 1;
                }
                out.push(Token { tok: Tok::Word(chars[start..i].iter().collect()), column });
            }
            other => {
                return Err(LexError {
                    column,
                    code: "UNEXPECTED_CHAR",
                    message: format!("unexpected character `{}`", other.escape_debug()),
                })
            }
        }
    }
    Ok(out)
}
