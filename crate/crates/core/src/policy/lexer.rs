use super::{CmpOp, ParseError, ParseErrorKind};

#[derive(Clone, Debug, PartialEq, Eq)]
pub(crate) enum Tok {
    LParen,
    RParen,
    Comma,
    Cmp(CmpOp),
    /// Run of `[A-Za-z0-9_]`; keywords, identifiers, integers and attribute
    /// values are told apart by the parser.
    Word(String),
    Eof,
}

#[derive(Clone, Debug)]
pub(crate) struct Token {
    pub tok: Tok,
    pub line: usize,
    pub column: usize,
}

pub(crate) fn tokenize(text: &str) -> Result<Vec<Token>, ParseError> {
    let mut out = Vec::new();
    let mut chars = text.chars().peekable();
    let (mut line, mut column) = (1usize, 1usize);

    while let Some(&c) = chars.peek() {
        let (tl, tc) = (line, column);
        let mut advance = |chars: &mut std::iter::Peekable<std::str::Chars<'_>>| {
            let c = chars.next().unwrap();
            if c == '\n' {
                line += 1;
                column = 1;
            } else {
                column += 1;
            }
        };
        let tok = match c {
            c if c.is_whitespace() => {
                advance(&mut chars);
                continue;
            }
            '(' => {
                advance(&mut chars);
                Tok::LParen
            }
            ')' => {
                advance(&mut chars);
                Tok::RParen
            }
            ',' => {
                advance(&mut chars);
                Tok::Comma
            }
            '=' => {
                advance(&mut chars);
                Tok::Cmp(CmpOp::Eq)
            }
            '<' | '>' => {
                advance(&mut chars);
                let or_equal = chars.peek() == Some(&'=');
                if or_equal {
                    advance(&mut chars);
                }
                Tok::Cmp(match (c, or_equal) {
                    ('<', false) => CmpOp::Lt,
                    ('<', true) => CmpOp::Le,
                    ('>', false) => CmpOp::Gt,
                    _ => CmpOp::Ge,
                })
            }
            c if c.is_ascii_alphanumeric() || c == '_' => {
                let mut word = String::new();
                while let Some(&c) = chars.peek() {
                    if c.is_ascii_alphanumeric() || c == '_' {
                        word.push(c);
                        advance(&mut chars);
                    } else {
                        break;
                    }
                }
                Tok::Word(word)
            }
            other => {
                return Err(ParseError {
                    kind: ParseErrorKind::UnexpectedChar(other),
                    line: tl,
                    column: tc,
                })
            }
        };
        out.push(Token { tok, line: tl, column: tc });
    }
    out.push(Token { tok: Tok::Eof, line, column });
    Ok(out)
}
