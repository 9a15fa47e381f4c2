//! Text grammar for polynomials.
//!
//! ```text
//! expr   := term (('+' | '-') term)*
//! term   := unary ('*' unary)*
//! unary  := ('+' | '-') unary | power
//! power  := atom ('^' exponent)?
//! exponent := ['+' | '-'] INT | '(' ['+' | '-'] INT ')'
//! atom   := INT | NAME | '(' expr ')'
//! ```
//!
//! Unary minus binds looser than `^`, so `-x^2` is `-(x^2)`. Chained powers must be
//! parenthesised. Negative exponents are accepted on monomials with a unit coefficient.

use num_bigint::BigInt;
use num_traits::ToPrimitive;

use super::{ExponentVector, LaurentPoly};
use crate::budget::Budget;
use crate::error::{Error, Result};
use crate::ring::{Ring, RingElement};

const MAX_DEPTH: usize = 200;
const MAX_EXPONENT: i64 = 1 << 40;

#[derive(Clone, Debug, PartialEq)]
enum Tok {
    Int(BigInt),
    Name(String),
    Op(char),
    /// A number with a fractional part; only ever an error.
    Decimal,
    End,
}

fn tokenize(text: &str) -> Result<Vec<(usize, Tok)>> {
    let bytes = text.as_bytes();
    let mut out = Vec::new();
    let mut i = 0;
    while i < bytes.len() {
        let c = bytes[i];
        if c.is_ascii_whitespace() {
            i += 1;
            continue;
        }
        let start = i;
        if c.is_ascii_digit() {
            while i < bytes.len() && bytes[i].is_ascii_digit() {
                i += 1;
            }
            if i < bytes.len() && bytes[i] == b'.' {
                i += 1;
                while i < bytes.len() && bytes[i].is_ascii_digit() {
                    i += 1;
                }
                out.push((start, Tok::Decimal));
                continue;
            }
            let v: BigInt = text[start..i].parse().expect("digits");
            out.push((start, Tok::Int(v)));
        } else if c.is_ascii_alphabetic() || c == b'_' {
            while i < bytes.len() && (bytes[i].is_ascii_alphanumeric() || bytes[i] == b'_') {
                i += 1;
            }
            out.push((start, Tok::Name(text[start..i].to_string())));
        } else if b"+-*^()".contains(&c) {
            out.push((start, Tok::Op(c as char)));
            i += 1;
        } else {
            let ch = text[start..].chars().next().unwrap_or('?');
            return Err(Error::Syntax {
                pos: start,
                msg: format!("unexpected character `{ch}`"),
            });
        }
    }
    out.push((text.len(), Tok::End));
    Ok(out)
}

struct Parser<'a> {
    toks: Vec<(usize, Tok)>,
    at: usize,
    ring: &'a Ring,
    vars: &'a [String],
    budget: &'a Budget,
    depth: usize,
}

impl<'a> Parser<'a> {
    fn peek(&self) -> &Tok {
        &self.toks[self.at].1
    }

    fn pos(&self) -> usize {
        self.toks[self.at].0
    }

    fn bump(&mut self) -> (usize, Tok) {
        let t = self.toks[self.at].clone();
        if self.at + 1 < self.toks.len() {
            self.at += 1;
        }
        t
    }

    fn syntax<T>(&self, msg: &str) -> Result<T> {
        Err(Error::Syntax {
            pos: self.pos(),
            msg: msg.to_string(),
        })
    }

    fn poly_const(&self, c: RingElement) -> LaurentPoly {
        LaurentPoly::constant(self.ring, self.vars.to_vec(), c)
    }

    fn expr(&mut self) -> Result<LaurentPoly> {
        self.depth += 1;
        if self.depth > MAX_DEPTH {
            return self.syntax("expression nested too deeply");
        }
        let mut acc = self.term()?;
        loop {
            match self.peek() {
                Tok::Op('+') => {
                    self.bump();
                    let t = self.term()?;
                    acc = acc.add(&t)?;
                }
                Tok::Op('-') => {
                    self.bump();
                    let t = self.term()?;
                    acc = acc.sub(&t)?;
                }
                _ => break,
            }
        }
        self.depth -= 1;
        Ok(acc)
    }

    fn term(&mut self) -> Result<LaurentPoly> {
        let mut acc = self.unary()?;
        while self.peek() == &Tok::Op('*') {
            self.bump();
            let rhs = self.unary()?;
            acc = acc.mul_with_budget(&rhs, self.budget)?;
        }
        Ok(acc)
    }

    fn unary(&mut self) -> Result<LaurentPoly> {
        match self.peek() {
            Tok::Op('-') | Tok::Op('+') => {
                self.depth += 1;
                if self.depth > MAX_DEPTH {
                    return self.syntax("expression nested too deeply");
                }
                let (_, t) = self.bump();
                let v = self.unary()?;
                self.depth -= 1;
                Ok(if t == Tok::Op('-') { v.neg() } else { v })
            }
            _ => self.power(),
        }
    }

    fn power(&mut self) -> Result<LaurentPoly> {
        let base = self.atom()?;
        if self.peek() != &Tok::Op('^') {
            return Ok(base);
        }
        let caret = self.pos();
        self.bump();
        let e = self.exponent()?;
        if self.peek() == &Tok::Op('^') {
            return self.syntax("chained powers need parentheses");
        }
        raise(&base, e, caret, self.ring, self.budget)
    }

    fn exponent(&mut self) -> Result<i64> {
        let paren = self.peek() == &Tok::Op('(');
        if paren {
            self.bump();
        }
        let mut neg = false;
        while let Tok::Op(c @ ('+' | '-')) = self.peek() {
            if *c == '-' {
                neg = !neg;
            }
            self.bump();
        }
        let pos = self.pos();
        let v = match self.bump().1 {
            Tok::Int(v) => v,
            _ => return Err(Error::NonIntegerExponent { pos }),
        };
        if paren {
            if self.peek() != &Tok::Op(')') {
                return Err(Error::NonIntegerExponent { pos });
            }
            self.bump();
        }
        let v = v
            .to_i64()
            .filter(|v| *v <= MAX_EXPONENT)
            .ok_or_else(|| Error::Syntax {
                pos,
                msg: "exponent too large".into(),
            })?;
        Ok(if neg { -v } else { v })
    }

    fn atom(&mut self) -> Result<LaurentPoly> {
        let pos = self.pos();
        match self.bump().1 {
            Tok::Int(v) => Ok(self.poly_const(RingElement::from_bigint(self.ring, v))),
            Tok::Name(name) => {
                if let Some(k) = self.vars.iter().position(|v| v == &name) {
                    let mut e = vec![0i64; self.vars.len()];
                    e[k] = 1;
                    return LaurentPoly::from_terms(
                        self.ring,
                        self.vars.to_vec(),
                        [(ExponentVector(e), RingElement::one(self.ring))],
                    );
                }
                if let Some(k) = self.ring.param_index(&name) {
                    return Ok(self.poly_const(RingElement::param(self.ring, k)));
                }
                Err(Error::UnknownIdentifier { pos, name })
            }
            Tok::Op('(') => {
                let v = self.expr()?;
                if self.peek() != &Tok::Op(')') {
                    return self.syntax("expected `)`");
                }
                self.bump();
                Ok(v)
            }
            Tok::Decimal => Err(Error::Syntax {
                pos,
                msg: "only integer literals are allowed".into(),
            }),
            Tok::End => Err(Error::Syntax {
                pos,
                msg: "unexpected end of input".into(),
            }),
            Tok::Op(c) => Err(Error::Syntax {
                pos,
                msg: format!("unexpected `{c}`"),
            }),
        }
    }
}

fn raise(
    base: &LaurentPoly,
    e: i64,
    pos: usize,
    ring: &Ring,
    budget: &Budget,
) -> Result<LaurentPoly> {
    if base.len() == 1 {
        // monomial: scale the exponent directly, invert the coefficient if needed
        let (x, c) = base.terms().iter().next().expect("one term");
        let c = if e < 0 {
            c.inverse_unit().map_err(|_| Error::Syntax {
                pos,
                msg: "negative power of a non-invertible term".into(),
            })?
        } else {
            c.clone()
        };
        let k = e.unsigned_abs();
        let exp = ExponentVector(
            x.0.iter()
                .map(|v| v.checked_mul(e).filter(|w| w.abs() <= MAX_EXPONENT))
                .collect::<Option<Vec<_>>>()
                .ok_or_else(|| Error::Syntax {
                    pos,
                    msg: "exponent overflow".into(),
                })?,
        );
        if !c.is_constant() {
            let d = c.degree().unwrap_or(0) as u128;
            if d * k as u128 > MAX_EXPONENT as u128 {
                return Err(Error::Syntax {
                    pos,
                    msg: "exponent too large".into(),
                });
            }
        } else if ring.modulus().is_none() {
            // digit growth of integer powers
            let bits = c.constant_term().bits() as u128;
            if bits > 1 {
                budget.check_terms("integer power bits", bits * k as u128)?;
            }
        }
        let c = c.pow(k);
        return LaurentPoly::from_terms(ring, base.vars().to_vec(), [(exp, c)]);
    }
    if e < 0 {
        return Err(Error::Syntax {
            pos,
            msg: "negative power of a sum".into(),
        });
    }
    base.pow_reduced(e as u64, ring, budget)
}

/// Parses a polynomial in `vars` over `ring` (parameter names come from the ring).
pub fn parse_poly(text: &str, vars: &[String], ring: &Ring) -> Result<LaurentPoly> {
    parse_poly_with_budget(text, vars, ring, &Budget::default())
}

pub fn parse_poly_with_budget(
    text: &str,
    vars: &[String],
    ring: &Ring,
    budget: &Budget,
) -> Result<LaurentPoly> {
    for (i, v) in vars.iter().enumerate() {
        if vars[..i].contains(v) || ring.param_index(v).is_some() {
            return Err(Error::InvalidArgument(format!("duplicate name `{v}`")));
        }
    }
    let mut p = Parser {
        toks: tokenize(text)?,
        at: 0,
        ring,
        vars,
        budget,
        depth: 0,
    };
    let out = p.expr()?;
    if p.peek() != &Tok::End {
        return p.syntax("unexpected trailing input");
    }
    Ok(out)
}

/// Parses a ring element such as `3*a^2*b - 1`.
pub fn parse_ring_element(text: &str, ring: &Ring) -> Result<RingElement> {
    parse_ring_element_with_budget(text, ring, &Budget::default())
}

pub fn parse_ring_element_with_budget(
    text: &str,
    ring: &Ring,
    budget: &Budget,
) -> Result<RingElement> {
    let p = parse_poly_with_budget(text, &[], ring, budget)?;
    Ok(p.coeff(&[]).expect("no variables"))
}
