use super::{GrammarError, Pos};

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum TokenKind {
    /// `<name>`, stored without brackets.
    AngleName(String),
    /// `::=`
    Define,
    /// `|`
    Pipe,
    /// A bare identifier such as `wall`.
    Bare(String),
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Token {
    pub kind: TokenKind,
    pub pos: Pos,
}

fn is_name_start(c: char) -> bool {
    c.is_ascii_alphabetic() || c == '_'
}

fn is_name_char(c: char) -> bool {
    c.is_ascii_alphanumeric() || c == '_' || c == '-'
}

/// Splits grammar source into tokens. Newlines carry no meaning: production
/// boundaries are recovered by the parser from `<name> ::=` pairs.
pub fn tokenize(text: &str) -> Result<Vec<Token>, GrammarError> {
    let mut tokens = Vec::new();
    let mut chars = text.chars().peekable();
    let mut line = 1;
    let mut col = 1;

    macro_rules! bump {
        () => {{
            let c = chars.next();
            if let Some(c) = c {
                if c == '\n' {
                    line += 1;
                    col = 1;
                } else {
                    col += 1;
                }
            }
            c
        }};
    }

    while let Some(&c) = chars.peek() {
        let pos = Pos { line, col };
        match c {
            '\n' | ' ' | '\t' | '\r' => {
                bump!();
            }
            '#' => {
                while let Some(&c) = chars.peek() {
                    if c == '\n' {
                        break;
                    }
                    bump!();
                }
            }
            '|' => {
                bump!();
                tokens.push(Token { kind: TokenKind::Pipe, pos });
            }
            ':' => {
                bump!();
                for want in [':', '='] {
                    let here = Pos { line, col };
                    match chars.peek().copied() {
                        Some(got) if got == want => {
                            bump!();
                        }
                        Some(got) => return Err(GrammarError::IllegalCharacter { ch: got, pos: here }),
                        None => {
                            return Err(GrammarError::SyntaxError {
                                pos: here,
                                expected: vec!["`::=`"],
                                found: "end of input".into(),
                            })
                        }
                    }
                }
                tokens.push(Token { kind: TokenKind::Define, pos });
            }
            '<' => {
                bump!();
                let mut name = String::new();
                loop {
                    let here = Pos { line, col };
                    match chars.peek().copied() {
                        Some('>') => {
                            bump!();
                            break;
                        }
                        None | Some('\n') => return Err(GrammarError::UnterminatedAngleName { pos }),
                        Some(ch) if is_name_char(ch) && (!name.is_empty() || is_name_start(ch)) => {
                            name.push(ch);
                            bump!();
                        }
                        Some(ch) => return Err(GrammarError::IllegalCharacter { ch, pos: here }),
                    }
                }
                if name.is_empty() {
                    return Err(GrammarError::SyntaxError {
                        pos,
                        expected: vec!["non-terminal name"],
                        found: "`<>`".into(),
                    });
                }
                tokens.push(Token {
                    kind: TokenKind::AngleName(name),
                    pos,
                });
            }
            c if is_name_start(c) => {
                let mut name = String::new();
                while let Some(&c) = chars.peek() {
                    if !is_name_char(c) {
                        break;
                    }
                    name.push(c);
                    bump!();
                }
                tokens.push(Token {
                    kind: TokenKind::Bare(name),
                    pos,
                });
            }
            other => return Err(GrammarError::IllegalCharacter { ch: other, pos }),
        }
    }
    Ok(tokens)
}
