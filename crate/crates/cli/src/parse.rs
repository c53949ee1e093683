//! Divisor-class input: nine exact rationals `b0,b1,...,b8` in the basis
//! `h, e1..e8`, or a symbolic sum such as `-K + 1/2*E1 + 1/3*B:(h-e1)`.
//!
//! Symbolic atoms: `K` (canonical class), `h`, `e1..e8` / `E1..E8`, and
//! `B:<class>` where `<class>` is a parenthesized expression or a
//! parenthesized nine-tuple and must be a conic class.

use dp1kstab_core::lattice::{canonical_class, DivClass};
use dp1kstab_core::rational::{qi, Q};
use num_bigint::BigInt;
use num_traits::Zero;

#[derive(Clone, Debug, PartialEq, Eq, thiserror::Error)]
pub enum ParseError {
    /// `pos` is a 1-based character column.
    #[error("parse error at column {pos}: {msg}")]
    Syntax { pos: usize, msg: String },
    #[error("ambiguous class at column {pos}: mixes the comma-separated and symbolic forms")]
    AmbiguousForm { pos: usize },
}

fn err<T>(pos: usize, msg: impl Into<String>) -> Result<T, ParseError> {
    Err(ParseError::Syntax { pos: pos + 1, msg: msg.into() })
}

/// Parse either input form into an exact class.
pub fn parse_class(text: &str) -> Result<DivClass, ParseError> {
    let chars: Vec<char> = text.chars().collect();
    let mut depth = 0i32;
    let mut comma = None;
    let mut letter = None;
    for (i, &c) in chars.iter().enumerate() {
        match c {
            '(' | '[' => depth += 1,
            ')' | ']' => depth -= 1,
            ',' if depth == 0 => {
                comma.get_or_insert(i);
            }
            c if depth == 0 && c.is_ascii_alphabetic() => {
                letter.get_or_insert(i);
            }
            _ => {}
        }
    }
    match (comma, letter) {
        (Some(c), Some(l)) => Err(ParseError::AmbiguousForm { pos: c.max(l) + 1 }),
        (Some(_), None) => parse_tuple(&chars, 0, chars.len()),
        (None, _) => {
            let mut p = Parser { s: &chars, i: 0 };
            let x = p.expr()?;
            p.skip_ws();
            if p.i < chars.len() {
                return err(p.i, format!("unexpected '{}'", chars[p.i]));
            }
            Ok(x)
        }
    }
}

/// Nine comma-separated rationals in `chars[start..end]`.
fn parse_tuple(chars: &[char], start: usize, end: usize) -> Result<DivClass, ParseError> {
    let mut fields = Vec::new();
    let mut from = start;
    for (i, &c) in chars.iter().enumerate().take(end).skip(start) {
        if c == ',' {
            fields.push((from, i));
            from = i + 1;
        }
    }
    fields.push((from, end));
    if fields.len() != 9 {
        let pos = if fields.len() > 9 { fields[9].0 } else { end };
        return err(pos, format!("expected 9 comma-separated rationals, found {}", fields.len()));
    }
    let mut coeffs: Vec<Q> = Vec::with_capacity(9);
    for (a, b) in fields {
        let mut p = Parser { s: &chars[..b], i: a };
        p.skip_ws();
        if p.i >= b {
            return err(p.i, "empty entry");
        }
        let x = p.signed_rational()?;
        p.skip_ws();
        if p.i < b {
            return err(p.i, format!("unexpected '{}' in rational", chars[p.i]));
        }
        coeffs.push(x);
    }
    Ok(DivClass::new(std::array::from_fn(|k| coeffs[k].clone())))
}

struct Parser<'a> {
    s: &'a [char],
    i: usize,
}

impl Parser<'_> {
    fn skip_ws(&mut self) {
        while self.i < self.s.len() && self.s[self.i].is_whitespace() {
            self.i += 1;
        }
    }

    fn peek(&mut self) -> Option<char> {
        self.skip_ws();
        self.s.get(self.i).copied()
    }

    fn integer(&mut self) -> Result<BigInt, ParseError> {
        let start = self.i;
        while self.i < self.s.len() && self.s[self.i].is_ascii_digit() {
            self.i += 1;
        }
        if start == self.i {
            return err(start, "expected digits");
        }
        let digits: String = self.s[start..self.i].iter().collect();
        Ok(digits.parse().expect("ascii digits"))
    }

    /// `n` or `n/d` with no sign.
    fn rational(&mut self) -> Result<Q, ParseError> {
        let n = self.integer()?;
        if self.s.get(self.i) == Some(&'/') {
            self.i += 1;
            let at = self.i;
            let d = self.integer()?;
            if d.is_zero() {
                return err(at, "zero denominator");
            }
            return Ok(Q::new(n, d));
        }
        Ok(Q::from_integer(n))
    }

    fn signed_rational(&mut self) -> Result<Q, ParseError> {
        self.skip_ws();
        let neg = match self.s.get(self.i) {
            Some('-') => {
                self.i += 1;
                true
            }
            Some('+') => {
                self.i += 1;
                false
            }
            _ => false,
        };
        self.skip_ws();
        let x = self.rational()?;
        Ok(if neg { -x } else { x })
    }

    fn expr(&mut self) -> Result<DivClass, ParseError> {
        let mut acc = DivClass::zero();
        let mut first = true;
        loop {
            let sign = match self.peek() {
                Some('+') => {
                    self.i += 1;
                    qi(1)
                }
                Some('-') => {
                    self.i += 1;
                    qi(-1)
                }
                Some(_) if first => qi(1),
                _ => break,
            };
            first = false;
            let t = self.term()?;
            acc = &acc + &t.scale(&sign);
        }
        if first {
            return err(self.i, "expected a class");
        }
        Ok(acc)
    }

    fn term(&mut self) -> Result<DivClass, ParseError> {
        let coef = match self.peek() {
            Some(c) if c.is_ascii_digit() => {
                let at = self.i;
                let x = self.rational()?;
                match self.peek() {
                    Some('*') => {
                        self.i += 1;
                        Some(x)
                    }
                    _ => return err(at, "a coefficient must be followed by '*' and a class"),
                }
            }
            _ => None,
        };
        let atom = self.atom()?;
        Ok(match coef {
            Some(c) => atom.scale(&c),
            None => atom,
        })
    }

    fn atom(&mut self) -> Result<DivClass, ParseError> {
        let at = match self.peek() {
            Some(_) => self.i,
            None => return err(self.i, "expected a class"),
        };
        let c = self.s[at];
        self.i += 1;
        match c {
            'K' => Ok(canonical_class()),
            'h' | 'H' => Ok(DivClass::h()),
            'e' | 'E' => {
                let n = self.integer()?;
                match n.to_string().parse::<usize>() {
                    Ok(k) if (1..=8).contains(&k) => Ok(DivClass::e(k)),
                    _ => err(at, "exceptional index must be 1..8"),
                }
            }
            'B' => {
                if self.s.get(self.i) != Some(&':') {
                    return err(self.i, "expected ':' after B");
                }
                self.i += 1;
                self.skip_ws();
                let open = self.i;
                let b = self.parenthesized()?;
                let bb = b.dot(&b);
                if !bb.is_zero() || b.dot(&canonical_class()) != qi(-2) || !b.is_integral() {
                    return err(open, format!("B:{b} is not a conic class (B.B = 0, B.K = -2)"));
                }
                Ok(b)
            }
            '(' => {
                self.i = at;
                self.parenthesized()
            }
            _ => err(at, format!("unexpected '{c}'")),
        }
    }

    /// `( expr )` or `( b0, ..., b8 )`.
    fn parenthesized(&mut self) -> Result<DivClass, ParseError> {
        let open = self.i;
        let close = match self.s.get(open) {
            Some('(') => ')',
            Some('[') => ']',
            _ => return err(open, "expected '('"),
        };
        let mut depth = 0;
        let mut end = None;
        let mut has_comma = false;
        for j in open..self.s.len() {
            match self.s[j] {
                '(' | '[' => depth += 1,
                ')' | ']' => {
                    depth -= 1;
                    if depth == 0 {
                        end = Some(j);
                        break;
                    }
                }
                ',' if depth == 1 => has_comma = true,
                _ => {}
            }
        }
        let Some(end) = end else {
            return err(open, "unbalanced parenthesis");
        };
        if self.s[end] != close {
            return err(end, "mismatched bracket");
        }
        let x = if has_comma {
            parse_tuple(self.s, open + 1, end)?
        } else {
            let mut inner = Parser { s: &self.s[..end], i: open + 1 };
            let x = inner.expr()?;
            inner.skip_ws();
            if inner.i < end {
                return err(inner.i, format!("unexpected '{}'", self.s[inner.i]));
            }
            x
        };
        self.i = end + 1;
        Ok(x)
    }
}
