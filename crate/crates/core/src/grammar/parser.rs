use std::collections::HashMap;
use std::fmt::Write;

use super::lexer::{tokenize, Token, TokenKind};
use super::{Grammar, GrammarError, Pos, Production, Symbol};
use crate::element::Element;

fn describe(t: Option<&Token>) -> String {
    match t.map(|t| &t.kind) {
        None => "end of input".into(),
        Some(TokenKind::AngleName(n)) => format!("`<{n}>`"),
        Some(TokenKind::Define) => "`::=`".into(),
        Some(TokenKind::Pipe) => "`|`".into(),
        Some(TokenKind::Bare(n)) => format!("`{n}`"),
    }
}

fn end_pos(tokens: &[Token]) -> Pos {
    tokens.last().map(|t| t.pos).unwrap_or(Pos { line: 1, col: 1 })
}

/// Parses rule-file text into a [`Grammar`].
pub fn parse_grammar(text: &str) -> Result<Grammar, GrammarError> {
    let tokens = tokenize(text)?;
    let mut productions: Vec<Production> = Vec::new();
    let mut origins: HashMap<String, Pos> = HashMap::new();
    let mut i = 0;

    // A production starts at `<name> ::=`.
    let starts_production =
        |i: usize| matches!((tokens.get(i), tokens.get(i + 1)), (Some(Token { kind: TokenKind::AngleName(_), .. }), Some(Token { kind: TokenKind::Define, .. })));

    while i < tokens.len() {
        let (lhs, lhs_pos) = match &tokens[i].kind {
            TokenKind::AngleName(n) => (n.clone(), tokens[i].pos),
            _ => {
                return Err(GrammarError::SyntaxError {
                    pos: tokens[i].pos,
                    expected: vec!["`<name>`"],
                    found: describe(tokens.get(i)),
                })
            }
        };
        if !starts_production(i) {
            return Err(GrammarError::SyntaxError {
                pos: tokens.get(i + 1).map(|t| t.pos).unwrap_or(end_pos(&tokens)),
                expected: vec!["`::=`"],
                found: describe(tokens.get(i + 1)),
            });
        }
        if origins.contains_key(&lhs) {
            return Err(GrammarError::DuplicateLhs { name: lhs, pos: lhs_pos });
        }
        i += 2;

        let mut alternatives = Vec::new();
        let mut current: Vec<Symbol> = Vec::new();
        loop {
            let at_end = i >= tokens.len() || starts_production(i);
            if at_end || tokens[i].kind == TokenKind::Pipe {
                if current.is_empty() {
                    return Err(GrammarError::SyntaxError {
                        pos: tokens.get(i).map(|t| t.pos).unwrap_or(end_pos(&tokens)),
                        expected: vec!["`<name>`", "element name"],
                        found: describe(tokens.get(i)),
                    });
                }
                alternatives.push(std::mem::take(&mut current));
                if at_end {
                    break;
                }
                i += 1;
                continue;
            }
            let tok = &tokens[i];
            match &tok.kind {
                TokenKind::AngleName(n) => current.push(Symbol::NonTerminal(n.clone())),
                TokenKind::Bare(n) => {
                    let e: Element = n.parse().map_err(|_| GrammarError::UnknownTerminal {
                        name: n.clone(),
                        pos: tok.pos,
                    })?;
                    current.push(Symbol::Terminal(e));
                }
                TokenKind::Define => {
                    return Err(GrammarError::SyntaxError {
                        pos: tok.pos,
                        expected: vec!["`<name>`", "element name", "`|`"],
                        found: describe(Some(tok)),
                    })
                }
                TokenKind::Pipe => unreachable!(),
            }
            i += 1;
        }
        origins.insert(lhs.clone(), lhs_pos);
        productions.push(Production { lhs, alternatives });
    }

    Grammar::with_origins(productions, origins)
}

/// Canonical text: one production per line, single spaces, trailing newline.
pub fn format_grammar(g: &Grammar) -> String {
    let mut out = String::new();
    for p in g.productions() {
        write!(out, "<{}> ::=", p.lhs).unwrap();
        for (ai, alt) in p.alternatives.iter().enumerate() {
            if ai > 0 {
                out.push_str(" |");
            }
            for s in alt {
                write!(out, " {s}").unwrap();
            }
        }
        out.push('\n');
    }
    out
}

#[cfg(test)]
mod tests {
    use super::super::fixtures::*;
    use super::*;

    #[test]
    fn canonical_shape() {
        let g = parse_grammar(CANONICAL).unwrap();
        let shape: Vec<_> = g
            .productions()
            .iter()
            .map(|p| (p.lhs.as_str(), p.alternatives.len()))
            .collect();
        assert_eq!(
            shape,
            [
                ("building", 1),
                ("base", 3),
                ("main", 1),
                ("mainlist", 4),
                ("roofs", 3),
                ("rooflist", 2)
            ]
        );
        assert_eq!(g.start(), "building");
    }

    #[test]
    fn example_rule_is_single_alternative() {
        let g = parse_grammar(EXAMPLE).unwrap();
        assert_eq!(g.productions().len(), 4);
        assert!(g.productions().iter().all(|p| p.alternatives.len() == 1));
        assert_eq!(g.production("main").unwrap().alternatives[0].len(), 11);
    }

    #[test]
    fn duplicate_lhs() {
        let err = parse_grammar("<a> ::= wall\n<a> ::= floor").unwrap_err();
        assert_eq!(
            err,
            GrammarError::DuplicateLhs {
                name: "a".into(),
                pos: Pos { line: 2, col: 1 }
            }
        );
    }

    #[test]
    fn unknown_terminal() {
        let err = parse_grammar("<building> ::= wall pagoda").unwrap_err();
        assert!(matches!(err, GrammarError::UnknownTerminal { ref name, .. } if name == "pagoda"));
    }

    #[test]
    fn empty_alternatives_rejected() {
        for src in ["<a> ::= wall | | floor", "<a> ::= wall |", "<a> ::=", "<a> ::= | wall", "<a> ::= wall |\n<b> ::= floor"] {
            assert!(
                matches!(parse_grammar(src), Err(GrammarError::SyntaxError { .. })),
                "{src:?}"
            );
        }
    }

    #[test]
    fn stray_tokens() {
        assert!(matches!(parse_grammar("wall ::= floor"), Err(GrammarError::SyntaxError { .. })));
        assert!(matches!(parse_grammar("<a> wall"), Err(GrammarError::SyntaxError { .. })));
        assert!(matches!(parse_grammar("<a> ::= wall ::= floor"), Err(GrammarError::SyntaxError { .. })));
        assert_eq!(parse_grammar("# only a comment"), Err(GrammarError::Empty));
    }

    #[test]
    fn format_canonical() {
        let g = parse_grammar(CANONICAL).unwrap();
        let text = format_grammar(&g);
        assert_eq!(text.lines().count(), 6);
        assert!(text.contains(
            "<mainlist> ::= window | door | <mainlist> <mainlist> | <mainlist> beam <mainlist>\n"
        ));
        assert_eq!(parse_grammar(&text).unwrap(), g);
        assert_eq!(format_grammar(&parse_grammar(&text).unwrap()), text);
    }

    #[test]
    fn format_single_production() {
        let g = parse_grammar("<building> ::= wall beam door beam roof").unwrap();
        assert_eq!(format_grammar(&g), "<building> ::= wall beam door beam roof\n");
    }
}
