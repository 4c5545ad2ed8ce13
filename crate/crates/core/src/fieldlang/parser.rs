use super::lexer::{tokenize, Tok};
use super::{BinOp, Expr, Func, ParseError, ParseErrorKind, Pos};
use crate::ga::{blade_grade, parse_blade_name};

const MAX_NESTING: usize = 200;

pub(crate) fn parse(text: &str, dim: usize) -> Result<Expr, ParseError> {
    let tokens = tokenize(text)?;
    let mut p = Parser {
        tokens,
        at: 0,
        dim,
        depth: 0,
    };
    let expr = p.expr()?;
    match p.peek() {
        Tok::End => Ok(expr),
        Tok::RParen => Err(p.error(ParseErrorKind::UnbalancedParen)),
        other => {
            let found = other.describe();
            Err(p.error(ParseErrorKind::UnexpectedToken {
                found,
                expected: "an operator or end of input".into(),
            }))
        }
    }
}

struct Parser {
    tokens: Vec<(Tok, Pos)>,
    at: usize,
    dim: usize,
    depth: usize,
}

impl Parser {
    fn peek(&self) -> &Tok {
        &self.tokens[self.at].0
    }

    fn pos(&self) -> Pos {
        self.tokens[self.at].1
    }

    fn bump(&mut self) -> (Tok, Pos) {
        let t = self.tokens[self.at].clone();
        if self.at + 1 < self.tokens.len() {
            self.at += 1;
        }
        t
    }

    fn error(&self, kind: ParseErrorKind) -> ParseError {
        ParseError::new(kind, self.pos())
    }

    fn unexpected(&self, expected: &str) -> ParseError {
        if *self.peek() == Tok::End && expected == "`)`" {
            return self.error(ParseErrorKind::UnbalancedParen);
        }
        self.error(ParseErrorKind::UnexpectedToken {
            found: self.peek().describe(),
            expected: expected.into(),
        })
    }

    fn enter(&mut self) -> Result<(), ParseError> {
        self.depth += 1;
        if self.depth > MAX_NESTING {
            Err(self.error(ParseErrorKind::TooDeep))
        } else {
            Ok(())
        }
    }

    fn expr(&mut self) -> Result<Expr, ParseError> {
        self.enter()?;
        let mut lhs = self.term()?;
        loop {
            let op = match self.peek() {
                Tok::Plus => BinOp::Add,
                Tok::Minus => BinOp::Sub,
                _ => break,
            };
            self.bump();
            let rhs = self.term()?;
            lhs = Expr::Binary(op, Box::new(lhs), Box::new(rhs));
        }
        self.depth -= 1;
        Ok(lhs)
    }

    fn term(&mut self) -> Result<Expr, ParseError> {
        let mut lhs = self.factor()?;
        loop {
            let op = match self.peek() {
                Tok::Star => BinOp::Mul,
                Tok::Slash => BinOp::Div,
                Tok::Caret => BinOp::Wedge,
                _ => break,
            };
            let op_pos = self.pos();
            self.bump();
            let rhs = self.factor()?;
            if op == BinOp::Div && static_grades(&rhs, self.dim) != 1 {
                return Err(ParseError::new(ParseErrorKind::NonScalarDivisor, op_pos));
            }
            lhs = Expr::Binary(op, Box::new(lhs), Box::new(rhs));
        }
        Ok(lhs)
    }

    fn factor(&mut self) -> Result<Expr, ParseError> {
        let negate = if *self.peek() == Tok::Minus {
            self.bump();
            true
        } else {
            false
        };
        let mut e = self.atom()?;
        if *self.peek() == Tok::StarStar {
            self.bump();
            let neg_exp = if *self.peek() == Tok::Minus {
                self.bump();
                true
            } else {
                false
            };
            let k = match self.peek().clone() {
                Tok::Int(k) if k <= i32::MAX as u64 => k as i32,
                other => return Err(self.error(ParseErrorKind::BadExponent(other.describe()))),
            };
            self.bump();
            e = Expr::Pow(Box::new(e), if neg_exp { -k } else { k });
        }
        Ok(if negate { Expr::Neg(Box::new(e)) } else { e })
    }

    fn atom(&mut self) -> Result<Expr, ParseError> {
        let (tok, pos) = self.bump();
        match tok {
            Tok::Num(x) => Ok(Expr::Num(x)),
            Tok::Int(k) => Ok(Expr::Num(k as f64)),
            Tok::LParen => {
                let e = self.expr()?;
                if *self.peek() != Tok::RParen {
                    return Err(self.unexpected("`)`"));
                }
                self.bump();
                Ok(e)
            }
            Tok::Ident(name) => self.identifier(name, pos),
            Tok::RParen => Err(ParseError::new(ParseErrorKind::UnbalancedParen, pos)),
            other => Err(ParseError::new(
                ParseErrorKind::UnexpectedToken {
                    found: other.describe(),
                    expected: "a number, coordinate, blade, function or `(`".into(),
                },
                pos,
            )),
        }
    }

    fn identifier(&mut self, name: String, pos: Pos) -> Result<Expr, ParseError> {
        let digits_after = |prefix: char| {
            name.strip_prefix(prefix)
                .filter(|d| !d.is_empty() && d.chars().all(|c| c.is_ascii_digit()))
        };
        if digits_after('e').is_some() {
            return parse_blade_name(&name, self.dim)
                .map(Expr::Blade)
                .map_err(|_| ParseError::new(ParseErrorKind::BadBlade(name.clone()), pos));
        }
        if let Some(d) = digits_after('x') {
            return match d.parse::<usize>() {
                Ok(k) if (1..=crate::ga::MAX_DIM).contains(&k) && !d.starts_with('0') => Ok(Expr::Coord(k)),
                _ => Err(ParseError::new(ParseErrorKind::UnknownIdentifier(name.clone()), pos)),
            };
        }
        if name == "pi" {
            return Ok(Expr::Num(std::f64::consts::PI));
        }
        let is_grade = name == "grade";
        let func = Func::from_name(&name);
        if func.is_none() && !is_grade {
            return Err(ParseError::new(ParseErrorKind::UnknownIdentifier(name), pos));
        }
        if *self.peek() != Tok::LParen {
            return Err(self.unexpected(&format!("`(` after `{name}`")));
        }
        self.bump();
        self.enter()?;
        let mut args = vec![self.expr()?];
        let mut grade_arg = None;
        while *self.peek() == Tok::Comma {
            self.bump();
            if is_grade && args.len() == 1 && grade_arg.is_none() {
                if let Tok::Int(k) = *self.peek() {
                    if matches!(self.tokens[self.at + 1].0, Tok::RParen | Tok::Comma) {
                        self.bump();
                        grade_arg = Some(k);
                        continue;
                    }
                }
                return Err(self.unexpected("an integer grade"));
            }
            args.push(self.expr()?);
        }
        if *self.peek() != Tok::RParen {
            return Err(self.unexpected("`)`"));
        }
        self.bump();
        self.depth -= 1;
        let got = args.len() + usize::from(grade_arg.is_some());
        if is_grade {
            let (Some(k), 1) = (grade_arg, args.len()) else {
                return Err(ParseError::new(
                    ParseErrorKind::WrongArity {
                        func: name,
                        expected: 2,
                        got,
                    },
                    pos,
                ));
            };
            if k as usize > self.dim {
                return Err(ParseError::new(
                    ParseErrorKind::UnexpectedToken {
                        found: format!("grade {k}"),
                        expected: format!("a grade at most {}", self.dim),
                    },
                    pos,
                ));
            }
            return Ok(Expr::Grade(Box::new(args.pop().unwrap()), k as usize));
        }
        if got != 1 {
            return Err(ParseError::new(
                ParseErrorKind::WrongArity {
                    func: name,
                    expected: 1,
                    got,
                },
                pos,
            ));
        }
        Ok(Expr::Call(func.unwrap(), Box::new(args.pop().unwrap())))
    }
}

/// Bit set of grades an expression can take, judged from its structure.
pub(crate) fn static_grades(e: &Expr, dim: usize) -> u32 {
    let all = (1u32 << (dim + 1)) - 1;
    let each = |set: u32| (0..=dim).filter(move |g| set & (1 << g) != 0);
    match e {
        Expr::Num(_) | Expr::Coord(_) | Expr::Pow(..) => 1,
        Expr::Blade(mask) => 1 << blade_grade(*mask),
        Expr::Neg(a) => static_grades(a, dim),
        Expr::Call(Func::Rev, a) => static_grades(a, dim),
        Expr::Call(..) => 1,
        Expr::Grade(_, k) => 1 << k,
        Expr::Binary(op, a, b) => {
            let (ga, gb) = (static_grades(a, dim), static_grades(b, dim));
            match op {
                BinOp::Add | BinOp::Sub => ga | gb,
                BinOp::Div => ga,
                BinOp::Wedge => {
                    let mut out = 0;
                    for r in each(ga) {
                        for s in each(gb) {
                            if r + s <= dim {
                                out |= 1 << (r + s);
                            }
                        }
                    }
                    out
                }
                BinOp::Mul => {
                    let mut out = 0;
                    for r in each(ga) {
                        for s in each(gb) {
                            let hi = (r + s).min(2 * dim - r - s);
                            let mut g = r.abs_diff(s);
                            while g <= hi {
                                out |= 1 << g;
                                g += 2;
                            }
                        }
                    }
                    out & all
                }
            }
        }
    }
}
