//! Minimal arithmetic expression grammar for user-supplied potentials.
//!
//! Grammar: numbers, variables `t1..tN` (aliases `theta1..thetaN`,
//! `x1..xN`), `+ - * /`, unary minus, parentheses, and the functions
//! `exp`, `log` (alias `ln`), `sqrt`.

use crate::error::{Error, Result};
use crate::expr::Expr;

#[derive(Debug, Clone, PartialEq)]
enum Token {
    Num(f64),
    Ident(String),
    Plus,
    Minus,
    Star,
    Slash,
    LParen,
    RParen,
}

fn lex(src: &str) -> Result<Vec<Token>> {
    let mut out = Vec::new();
    let bytes: Vec<char> = src.chars().collect();
    let mut i = 0;
    while i < bytes.len() {
        let c = bytes[i];
        match c {
            ' ' | '\t' | '\n' | '\r' => i += 1,
            '+' => {
                out.push(Token::Plus);
                i += 1;
            }
            '-' => {
                out.push(Token::Minus);
                i += 1;
            }
            '*' => {
                out.push(Token::Star);
                i += 1;
            }
            '/' => {
                out.push(Token::Slash);
                i += 1;
            }
            '(' => {
                out.push(Token::LParen);
                i += 1;
            }
            ')' => {
                out.push(Token::RParen);
                i += 1;
            }
            '0'..='9' | '.' => {
                let start = i;
                while i < bytes.len()
                    && (bytes[i].is_ascii_digit()
                        || bytes[i] == '.'
                        || bytes[i] == 'e'
                        || bytes[i] == 'E'
                        || ((bytes[i] == '+' || bytes[i] == '-')
                            && i > start
                            && (bytes[i - 1] == 'e' || bytes[i - 1] == 'E')))
                {
                    i += 1;
                }
                let text: String = bytes[start..i].iter().collect();
                let v = text
                    .parse::<f64>()
                    .map_err(|_| Error::Config(format!("bad number literal '{text}'")))?;
                out.push(Token::Num(v));
            }
            c if c.is_ascii_alphabetic() || c == '_' => {
                let start = i;
                while i < bytes.len() && (bytes[i].is_ascii_alphanumeric() || bytes[i] == '_') {
                    i += 1;
                }
                out.push(Token::Ident(bytes[start..i].iter().collect()));
            }
            other => return Err(Error::Config(format!("unexpected character '{other}'"))),
        }
    }
    Ok(out)
}

struct Parser<'a> {
    tokens: &'a [Token],
    pos: usize,
    arity: usize,
}

impl<'a> Parser<'a> {
    fn peek(&self) -> Option<&Token> {
        self.tokens.get(self.pos)
    }

    fn bump(&mut self) -> Option<Token> {
        let t = self.tokens.get(self.pos).cloned();
        if t.is_some() {
            self.pos += 1;
        }
        t
    }

    fn expect(&mut self, t: Token) -> Result<()> {
        match self.bump() {
            Some(ref got) if *got == t => Ok(()),
            got => Err(Error::Config(format!("expected {t:?}, found {got:?}"))),
        }
    }

    fn expr(&mut self) -> Result<Expr> {
        let mut lhs = self.term()?;
        loop {
            match self.peek() {
                Some(Token::Plus) => {
                    self.bump();
                    lhs = lhs + self.term()?;
                }
                Some(Token::Minus) => {
                    self.bump();
                    lhs = lhs - self.term()?;
                }
                _ => return Ok(lhs),
            }
        }
    }

    fn term(&mut self) -> Result<Expr> {
        let mut lhs = self.unary()?;
        loop {
            match self.peek() {
                Some(Token::Star) => {
                    self.bump();
                    lhs = lhs * self.unary()?;
                }
                Some(Token::Slash) => {
                    self.bump();
                    lhs = lhs / self.unary()?;
                }
                _ => return Ok(lhs),
            }
        }
    }

    fn unary(&mut self) -> Result<Expr> {
        if matches!(self.peek(), Some(Token::Minus)) {
            self.bump();
            return Ok(-self.unary()?);
        }
        self.primary()
    }

    fn primary(&mut self) -> Result<Expr> {
        match self.bump() {
            Some(Token::Num(v)) => Ok(Expr::constant(v)),
            Some(Token::LParen) => {
                let e = self.expr()?;
                self.expect(Token::RParen)?;
                Ok(e)
            }
            Some(Token::Ident(name)) => {
                if matches!(self.peek(), Some(Token::LParen)) {
                    self.bump();
                    let arg = self.expr()?;
                    self.expect(Token::RParen)?;
                    match name.as_str() {
                        "exp" => Ok(arg.exp()),
                        "log" | "ln" => Ok(arg.ln()),
                        "sqrt" => Ok(arg.sqrt()),
                        other => Err(Error::Config(format!("unknown function '{other}'"))),
                    }
                } else {
                    self.variable(&name)
                }
            }
            got => Err(Error::Config(format!("unexpected token {got:?}"))),
        }
    }

    fn variable(&self, name: &str) -> Result<Expr> {
        for prefix in ["t", "theta", "x"] {
            if let Some(rest) = name.strip_prefix(prefix) {
                if let Ok(k) = rest.parse::<usize>() {
                    if k >= 1 && k <= self.arity {
                        return Ok(Expr::var(k - 1));
                    }
                    return Err(Error::Config(format!(
                        "variable '{name}' out of range 1..={}",
                        self.arity
                    )));
                }
            }
        }
        Err(Error::Config(format!("unknown identifier '{name}'")))
    }
}

/// Parse an expression over variables `t1..t{arity}`.
pub fn parse_expr(src: &str, arity: usize) -> Result<Expr> {
    let tokens = lex(src)?;
    if tokens.is_empty() {
        return Err(Error::Config("empty expression".into()));
    }
    let mut p = Parser {
        tokens: &tokens,
        pos: 0,
        arity,
    };
    let e = p.expr()?;
    if p.pos != tokens.len() {
        return Err(Error::Config(format!("trailing input at token {}", p.pos)));
    }
    Ok(e)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::expr::{Domain, ScalarField};
    use approx::assert_relative_eq;

    fn eval(src: &str, x: &[f64]) -> f64 {
        let e = parse_expr(src, x.len()).unwrap();
        let f = ScalarField::new(x.len(), &e, Domain::unrestricted(x.len())).unwrap();
        f.value(x).unwrap()
    }

    #[test]
    fn precedence_and_unary_minus() {
        assert_relative_eq!(eval("1 + 2 * 3", &[0.0]), 7.0);
        assert_relative_eq!(eval("-t1 * t1 + 2", &[3.0]), -7.0);
        assert_relative_eq!(eval("(1 + 2) * 3", &[0.0]), 9.0);
        assert_relative_eq!(eval("2 / 4 / 2", &[0.0]), 0.25);
    }

    #[test]
    fn functions_and_aliases() {
        assert_relative_eq!(eval("exp(log(t1))", &[2.5]), 2.5, epsilon = 1e-14);
        assert_relative_eq!(eval("sqrt(theta1 * theta1)", &[1.7]), 1.7, epsilon = 1e-14);
        assert_relative_eq!(eval("ln(x1)", &[1.0]), 0.0);
        assert_relative_eq!(eval("1e-2 + 2.5E2", &[0.0]), 250.01);
    }

    #[test]
    fn quadratic_potential_text_form() {
        // the flat toy potential written in the config grammar
        let src = "0.5 * (t1*t1 + t2*t2)";
        assert_relative_eq!(eval(src, &[3.0, 4.0]), 12.5);
    }

    #[test]
    fn errors_are_reported() {
        assert!(parse_expr("t1 +", 1).is_err());
        assert!(parse_expr("foo(t1)", 1).is_err());
        assert!(parse_expr("t3", 2).is_err());
        assert!(parse_expr("1 2", 1).is_err());
        assert!(parse_expr("", 1).is_err());
    }
}
