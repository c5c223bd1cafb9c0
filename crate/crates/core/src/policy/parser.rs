use super::lexer::{tokenize, Tok, Token};
use super::{is_identifier, is_keyword, CmpOp, ParseError, ParseErrorKind, Policy};

const MAX_DEPTH: usize = 256;

/// Parses policy text into an AST.
///
/// Chains of one operator at the same nesting level collapse into a single
/// n-ary gate; an explicitly parenthesised sub-expression keeps its own gate.
pub fn parse_policy(text: &str) -> Result<Policy, ParseError> {
    let tokens = tokenize(text)?;
    let mut p = Parser { tokens, pos: 0, depth: 0 };
    let policy = p.policy()?;
    match p.peek() {
        Tok::Eof => Ok(policy),
        _ => Err(p.unexpected("end of input")),
    }
}

struct Parser {
    tokens: Vec<Token>,
    pos: usize,
    depth: usize,
}

fn describe(tok: &Tok) -> String {
    match tok {
        Tok::LParen => "`(`".into(),
        Tok::RParen => "`)`".into(),
        Tok::Comma => "`,`".into(),
        Tok::Cmp(op) => format!("`{op}`"),
        Tok::Word(w) => format!("`{w}`"),
        Tok::Eof => "end of input".into(),
    }
}

fn is_digits(w: &str) -> bool {
    !w.is_empty() && w.bytes().all(|b| b.is_ascii_digit())
}

impl Parser {
    fn peek(&self) -> &Tok {
        &self.tokens[self.pos].tok
    }

    fn bump(&mut self) -> Token {
        let t = self.tokens[self.pos].clone();
        if self.pos + 1 < self.tokens.len() {
            self.pos += 1;
        }
        t
    }

    fn error_at(&self, pos: usize, kind: ParseErrorKind) -> ParseError {
        let t = &self.tokens[pos];
        ParseError { kind, line: t.line, column: t.column }
    }

    fn unexpected(&self, expected: &'static str) -> ParseError {
        self.error_at(self.pos, ParseErrorKind::Unexpected { found: describe(self.peek()), expected })
    }

    fn at_keyword(&self, kw: &str) -> bool {
        matches!(self.peek(), Tok::Word(w) if w.eq_ignore_ascii_case(kw))
    }

    fn expect(&mut self, tok: Tok, expected: &'static str) -> Result<(), ParseError> {
        if *self.peek() == tok {
            self.bump();
            Ok(())
        } else {
            Err(self.unexpected(expected))
        }
    }

    fn policy(&mut self) -> Result<Policy, ParseError> {
        self.depth += 1;
        if self.depth > MAX_DEPTH {
            return Err(self.error_at(self.pos, ParseErrorKind::TooDeep(MAX_DEPTH)));
        }
        let r = self.or_expr();
        self.depth -= 1;
        r
    }

    fn or_expr(&mut self) -> Result<Policy, ParseError> {
        let mut items = vec![self.and_expr()?];
        while self.at_keyword("or") {
            self.bump();
            items.push(self.and_expr()?);
        }
        Ok(if items.len() == 1 { items.pop().unwrap() } else { Policy::or(items) })
    }

    fn and_expr(&mut self) -> Result<Policy, ParseError> {
        let mut items = vec![self.primary()?];
        while self.at_keyword("and") {
            self.bump();
            items.push(self.primary()?);
        }
        Ok(if items.len() == 1 { items.pop().unwrap() } else { Policy::and(items) })
    }

    fn primary(&mut self) -> Result<Policy, ParseError> {
        let start = self.pos;
        match self.peek().clone() {
            Tok::LParen => {
                self.bump();
                let inner = self.policy()?;
                self.expect(Tok::RParen, "`)`")?;
                Ok(inner)
            }
            Tok::Word(w) if is_digits(&w) => {
                self.bump();
                if !self.at_keyword("of") {
                    return Err(self.unexpected("`of` after threshold count"));
                }
                self.bump();
                self.expect(Tok::LParen, "`(`")?;
                let mut children = vec![self.policy()?];
                while *self.peek() == Tok::Comma {
                    self.bump();
                    children.push(self.policy()?);
                }
                self.expect(Tok::RParen, "`,` or `)`")?;
                let n = children.len();
                match w.parse::<usize>() {
                    Ok(k) if k >= 1 && k <= n => Ok(Policy::threshold(k, children)),
                    _ => Err(self.error_at(start, ParseErrorKind::Threshold { k: w, n })),
                }
            }
            Tok::Word(w) if is_identifier(&w) => {
                self.bump();
                let op = match self.peek() {
                    Tok::Cmp(op) => *op,
                    _ => return Ok(Policy::Atom(w)),
                };
                self.bump();
                let value_pos = self.pos;
                match self.peek().clone() {
                    Tok::Word(v) if is_digits(&v) => {
                        self.bump();
                        let value = v
                            .parse::<u64>()
                            .map_err(|_| self.error_at(value_pos, ParseErrorKind::NumericOverflow(v)))?;
                        Ok(Policy::cmp(w, op, value))
                    }
                    Tok::Word(v) if op == CmpOp::Eq && !is_keyword(&v) => {
                        self.bump();
                        Ok(Policy::Atom(format!("{w}={v}")))
                    }
                    _ => Err(self.unexpected("an unsigned integer")),
                }
            }
            _ => Err(self.unexpected("an attribute, threshold or `(`")),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::policy::print_policy;
    use proptest::prelude::*;

    fn a(s: &str) -> Policy {
        Policy::atom(s)
    }

    #[test]
    fn figure_policy() {
        let p = parse_policy("(A and B) or C").unwrap();
        assert_eq!(p, Policy::or(vec![Policy::and(vec![a("A"), a("B")]), a("C")]));
    }

    #[test]
    fn single_atom_and_threshold() {
        assert_eq!(parse_policy("A").unwrap(), a("A"));
        assert_eq!(parse_policy("2 of (A, B, C)").unwrap(), Policy::threshold(2, vec![a("A"), a("B"), a("C")]));
    }

    #[test]
    fn device_policy_with_fused_atoms() {
        let p = parse_policy("(Dev_family=Board_XYZ and Dev_role=Role_1) or Release_Date > 2013").unwrap();
        assert_eq!(
            p,
            Policy::or(vec![
                Policy::and(vec![a("Dev_family=Board_XYZ"), a("Dev_role=Role_1")]),
                Policy::cmp("Release_Date", CmpOp::Gt, 2013),
            ])
        );
        assert_eq!(parse_policy("Release_Date>2013").unwrap(), Policy::cmp("Release_Date", CmpOp::Gt, 2013));
        assert_eq!(parse_policy("Year = 2013").unwrap(), Policy::cmp("Year", CmpOp::Eq, 2013));
    }

    #[test]
    fn chains_flatten_but_parens_do_not() {
        match parse_policy("A and B and C").unwrap() {
            Policy::Gate { k, children } => {
                assert_eq!((k, children.len()), (3, 3));
                assert!(children.iter().all(|c| matches!(c, Policy::Atom(_))));
            }
            other => panic!("{other:?}"),
        }
        let nested = parse_policy("(A or B) or C").unwrap();
        assert_eq!(nested, Policy::or(vec![Policy::or(vec![a("A"), a("B")]), a("C")]));
        // and binds tighter than or
        assert_eq!(
            parse_policy("A or B and C").unwrap(),
            Policy::or(vec![a("A"), Policy::and(vec![a("B"), a("C")])])
        );
    }

    #[test]
    fn keywords_are_case_insensitive() {
        assert_eq!(parse_policy("A AND B").unwrap(), parse_policy("A and B").unwrap());
        assert_eq!(parse_policy("1 OF (A, B)").unwrap(), parse_policy("A Or B").unwrap());
        assert_ne!(parse_policy("a").unwrap(), parse_policy("A").unwrap());
    }

    #[test]
    fn rejection_corpus() {
        let bad = [
            "",
            "(",
            "(A and B",
            "A and B)",
            "A and",
            "or A",
            "4 of (A, B)",
            "0 of (A)",
            "99999999999999999999999 of (A)",
            "A < 18446744073709551616",
            "A < -1",
            "A < B",
            "A <",
            "A = and",
            "2 of A, B",
            "2 of (A, B,)",
            "A B",
            "1x",
            "A ∧ B",
            "A # 3",
            "and",
            "()",
        ];
        for text in bad {
            assert!(parse_policy(text).is_err(), "accepted {text:?}");
        }
    }

    #[test]
    fn error_positions() {
        let e = parse_policy("A and\n  (B or )").unwrap_err();
        assert_eq!((e.line, e.column), (2, 9));
        let e = parse_policy("4 of (A, B)").unwrap_err();
        assert!(matches!(e.kind, ParseErrorKind::Threshold { n: 2, .. }));
        let e = parse_policy("A < 18446744073709551616").unwrap_err();
        assert!(matches!(e.kind, ParseErrorKind::NumericOverflow(_)));
        assert!(parse_policy("A < 18446744073709551615").is_ok());
    }

    #[test]
    fn deep_nesting_is_an_error_not_a_crash() {
        let text = format!("{}A{}", "(".repeat(100_000), ")".repeat(100_000));
        let e = parse_policy(&text).unwrap_err();
        assert!(matches!(e.kind, ParseErrorKind::TooDeep(_)));
        let ok = format!("{}A{}", "(".repeat(200), ")".repeat(200));
        assert_eq!(parse_policy(&ok).unwrap(), a("A"));
    }

    fn ident() -> impl Strategy<Value = String> {
        "[A-Za-z_][A-Za-z0-9_]{0,6}".prop_filter("keyword", |s| !is_keyword(s))
    }

    fn leaf() -> impl Strategy<Value = Policy> {
        prop_oneof![
            ident().prop_map(Policy::Atom),
            (ident(), "[A-Za-z_][A-Za-z0-9_]{0,4}")
                .prop_filter("keyword", |(_, v)| !is_keyword(v))
                .prop_map(|(n, v)| Policy::Atom(format!("{n}={v}"))),
            (ident(), proptest::sample::select(CmpOp::ALL.to_vec()), any::<u64>())
                .prop_map(|(n, op, v)| Policy::cmp(n, op, v)),
        ]
    }

    pub(crate) fn arb_policy() -> impl Strategy<Value = Policy> {
        leaf().prop_recursive(4, 32, 5, |inner| {
            prop::collection::vec(inner, 1..5).prop_flat_map(|children| {
                let n = children.len();
                (1..=n).prop_map(move |k| Policy::threshold(k, children.clone()))
            })
        })
    }

    proptest! {
        #[test]
        fn print_then_parse_is_identity(p in arb_policy()) {
            let text = print_policy(&p);
            prop_assert_eq!(parse_policy(&text).unwrap(), p);
        }

        #[test]
        fn printing_is_idempotent_canonicalisation(p in arb_policy()) {
            let once = print_policy(&p);
            let twice = print_policy(&parse_policy(&once).unwrap());
            prop_assert_eq!(once, twice);
        }
    }
}
