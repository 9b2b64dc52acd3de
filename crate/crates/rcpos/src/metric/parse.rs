use super::expr::ExprNode;
use super::MetricError;

/// Token with source position for error reporting.
#[derive(Clone, Debug, PartialEq)]
enum Tok {
    Ident(String),
    Number(f64),
    LBracket,
    RBracket,
    LParen,
    RParen,
    Plus,
    Minus,
    Star,
    Slash,
    Caret,
    Equals,
    Newline,
    Eof,
}

#[derive(Clone, Debug)]
struct Spanned {
    tok: Tok,
    line: usize,
    col: usize,
}

struct Lexer<'a> {
    src: &'a [u8],
    pos: usize,
    line: usize,
    col: usize,
}

impl<'a> Lexer<'a> {
    fn new(src: &'a str) -> Self {
        Lexer { src: src.as_bytes(), pos: 0, line: 1, col: 1 }
    }

    fn error(&self, message: impl Into<String>) -> MetricError {
        MetricError::Parse { line: self.line, col: self.col, message: message.into() }
    }

    fn bump(&mut self) -> u8 {
        let c = self.src[self.pos];
        self.pos += 1;
        if c == b'\n' {
            self.line += 1;
            self.col = 1;
        } else {
            self.col += 1;
        }
        c
    }

    fn peek(&self) -> Option<u8> {
        self.src.get(self.pos).copied()
    }

    fn tokenize(mut self) -> Result<Vec<Spanned>, MetricError> {
        let mut out = Vec::new();
        loop {
            // Skip horizontal whitespace and comments.
            while let Some(c) = self.peek() {
                if c == b' ' || c == b'\t' || c == b'\r' {
                    self.bump();
                } else if c == b'#' {
                    while let Some(c) = self.peek() {
                        if c == b'\n' {
                            break;
                        }
                        self.bump();
                    }
                } else {
                    break;
                }
            }
            let (line, col) = (self.line, self.col);
            let Some(c) = self.peek() else {
                out.push(Spanned { tok: Tok::Eof, line, col });
                return Ok(out);
            };
            let tok = match c {
                b'\n' => {
                    self.bump();
                    Tok::Newline
                }
                b'[' => {
                    self.bump();
                    Tok::LBracket
                }
                b']' => {
                    self.bump();
                    Tok::RBracket
                }
                b'(' => {
                    self.bump();
                    Tok::LParen
                }
                b')' => {
                    self.bump();
                    Tok::RParen
                }
                b'+' => {
                    self.bump();
                    Tok::Plus
                }
                b'-' => {
                    self.bump();
                    Tok::Minus
                }
                b'*' => {
                    self.bump();
                    Tok::Star
                }
                b'/' => {
                    self.bump();
                    Tok::Slash
                }
                b'^' => {
                    self.bump();
                    Tok::Caret
                }
                b'=' => {
                    self.bump();
                    Tok::Equals
                }
                b'0'..=b'9' | b'.' => {
                    let start = self.pos;
                    while let Some(c) = self.peek() {
                        if c.is_ascii_digit() || c == b'.' {
                            self.bump();
                        } else if (c == b'e' || c == b'E')
                            && self
                                .src
                                .get(self.pos + 1)
                                .is_some_and(|&d| d.is_ascii_digit() || d == b'+' || d == b'-')
                        {
                            self.bump();
                            self.bump();
                        } else {
                            break;
                        }
                    }
                    let text = std::str::from_utf8(&self.src[start..self.pos]).unwrap();
                    let v: f64 = text
                        .parse()
                        .map_err(|_| self.error(format!("bad numeric literal '{text}'")))?;
                    Tok::Number(v)
                }
                c if c.is_ascii_alphabetic() || c == b'_' => {
                    let start = self.pos;
                    while let Some(c) = self.peek() {
                        if c.is_ascii_alphanumeric() || c == b'_' {
                            self.bump();
                        } else {
                            break;
                        }
                    }
                    Tok::Ident(std::str::from_utf8(&self.src[start..self.pos]).unwrap().to_string())
                }
                other => return Err(self.error(format!("unexpected character '{}'", other as char))),
            };
            out.push(Spanned { tok, line, col });
        }
    }
}

pub(super) struct Parser {
    toks: Vec<Spanned>,
    pos: usize,
    pub dim: usize,
}

impl Parser {
    fn peek(&self) -> &Spanned {
        &self.toks[self.pos.min(self.toks.len() - 1)]
    }

    fn bump(&mut self) -> Spanned {
        let t = self.toks[self.pos.min(self.toks.len() - 1)].clone();
        if self.pos < self.toks.len() - 1 {
            self.pos += 1;
        }
        t
    }

    fn error_at(&self, at: &Spanned, message: impl Into<String>) -> MetricError {
        MetricError::Parse { line: at.line, col: at.col, message: message.into() }
    }

    fn expect(&mut self, want: Tok, what: &str) -> Result<Spanned, MetricError> {
        let t = self.bump();
        if t.tok == want {
            Ok(t)
        } else {
            Err(self.error_at(&t, format!("expected {what}, found {:?}", t.tok)))
        }
    }

    fn expect_usize(&mut self, what: &str) -> Result<usize, MetricError> {
        let t = self.bump();
        match t.tok {
            Tok::Number(v) if v.fract() == 0.0 && v >= 0.0 => Ok(v as usize),
            _ => Err(self.error_at(&t, format!("expected {what}, found {:?}", t.tok))),
        }
    }

    fn skip_newlines(&mut self) {
        while self.peek().tok == Tok::Newline {
            self.bump();
        }
    }

    /// expr := term (('+'|'-') term)*
    fn parse_expr(&mut self) -> Result<ExprNode, MetricError> {
        let mut acc = self.parse_term()?;
        loop {
            match self.peek().tok {
                Tok::Plus => {
                    self.bump();
                    let rhs = self.parse_term()?;
                    acc = ExprNode::Add(Box::new(acc), Box::new(rhs));
                }
                Tok::Minus => {
                    self.bump();
                    let rhs = self.parse_term()?;
                    let neg = ExprNode::Mul(Box::new(ExprNode::Const(-1.0)), Box::new(rhs));
                    acc = ExprNode::Add(Box::new(acc), Box::new(neg));
                }
                _ => return Ok(acc),
            }
        }
    }

    /// term := factor (('*'|'/') factor)*
    fn parse_term(&mut self) -> Result<ExprNode, MetricError> {
        let mut acc = self.parse_factor()?;
        loop {
            match self.peek().tok {
                Tok::Star => {
                    self.bump();
                    let rhs = self.parse_factor()?;
                    acc = ExprNode::Mul(Box::new(acc), Box::new(rhs));
                }
                Tok::Slash => {
                    self.bump();
                    let rhs = self.parse_factor()?;
                    acc = ExprNode::Div(Box::new(acc), Box::new(rhs));
                }
                _ => return Ok(acc),
            }
        }
    }

    /// factor := atom ('^' int)?  with an optional sign on the exponent.
    fn parse_factor(&mut self) -> Result<ExprNode, MetricError> {
        let atom = self.parse_atom()?;
        if self.peek().tok == Tok::Caret {
            self.bump();
            let mut sign = 1i32;
            if self.peek().tok == Tok::Minus {
                self.bump();
                sign = -1;
            } else if self.peek().tok == Tok::Plus {
                self.bump();
            }
            let t = self.bump();
            let k = match t.tok {
                Tok::Number(v) if v.fract() == 0.0 && v.abs() <= i32::MAX as f64 => v as i32,
                _ => return Err(self.error_at(&t, "expected integer exponent after '^'")),
            };
            return Ok(ExprNode::PowInt(Box::new(atom), sign * k));
        }
        Ok(atom)
    }

    fn parse_atom(&mut self) -> Result<ExprNode, MetricError> {
        let t = self.bump();
        match &t.tok {
            Tok::Number(v) => Ok(ExprNode::Const(*v)),
            Tok::Minus => {
                let inner = self.parse_factor()?;
                Ok(ExprNode::Mul(Box::new(ExprNode::Const(-1.0)), Box::new(inner)))
            }
            Tok::LParen => {
                let e = self.parse_expr()?;
                self.expect(Tok::RParen, "')'")?;
                Ok(e)
            }
            Tok::Ident(name) => match name.as_str() {
                "conj" | "log" | "exp" | "absq" => {
                    self.expect(Tok::LParen, "'(' after function name")?;
                    let arg = self.parse_expr()?;
                    self.expect(Tok::RParen, "')'")?;
                    Ok(match name.as_str() {
                        "conj" => ExprNode::Conj(Box::new(arg)),
                        "log" => ExprNode::Log(Box::new(arg)),
                        "exp" => ExprNode::Exp(Box::new(arg)),
                        _ => ExprNode::AbsQ(Box::new(arg)),
                    })
                }
                _ => {
                    if let Some(rest) = name.strip_prefix('z') {
                        if let Ok(k) = rest.parse::<usize>() {
                            if k >= 1 && k <= self.dim {
                                return Ok(ExprNode::Coord(k - 1));
                            }
                            return Err(self.error_at(
                                &t,
                                format!("coordinate z{k} out of range for dim={}", self.dim),
                            ));
                        }
                    }
                    Err(self.error_at(&t, format!("unknown identifier '{name}'")))
                }
            },
            other => Err(self.error_at(&t, format!("unexpected token {other:?}"))),
        }
    }
}

/// Parses a bare expression in variables z1..z<dim>, e.g. a conformal factor
/// given on the command line.
pub(super) fn parse_expression_raw(src: &str, dim: usize) -> Result<ExprNode, MetricError> {
    let toks = Lexer::new(src).tokenize()?;
    let mut p = Parser { toks, pos: 0, dim };
    p.skip_newlines();
    let e = p.parse_expr()?;
    p.skip_newlines();
    let t = p.bump();
    if t.tok != Tok::Eof {
        return Err(p.error_at(&t, format!("unexpected trailing token {:?}", t.tok)));
    }
    Ok(e)
}

pub(super) struct ParsedSource {
    pub name: String,
    pub dim: usize,
    pub rank: usize,
    /// Entries in declaration order: (row, col, expression), 0-based.
    pub entries: Vec<(usize, usize, ExprNode)>,
}

/// Parses the metric text format:
///
/// ```text
/// metric <name> dim=<n> rank=<r>
/// h[a][b] = <expr>
/// ```
pub(super) fn parse_source_raw(src: &str) -> Result<ParsedSource, MetricError> {
    let toks = Lexer::new(src).tokenize()?;
    let mut p = Parser { toks, pos: 0, dim: 0 };
    p.skip_newlines();

    let t = p.bump();
    match &t.tok {
        Tok::Ident(kw) if kw == "metric" => {}
        _ => return Err(p.error_at(&t, "expected 'metric' header")),
    }
    let t = p.bump();
    let name = match t.tok {
        Tok::Ident(n) => n,
        _ => return Err(p.error_at(&t, "expected metric name")),
    };
    let t = p.bump();
    match &t.tok {
        Tok::Ident(kw) if kw == "dim" => {}
        _ => return Err(p.error_at(&t, "expected 'dim=<n>'")),
    }
    p.expect(Tok::Equals, "'=' after dim")?;
    let dim = p.expect_usize("dimension")?;
    let t = p.bump();
    match &t.tok {
        Tok::Ident(kw) if kw == "rank" => {}
        _ => return Err(p.error_at(&t, "expected 'rank=<r>'")),
    }
    p.expect(Tok::Equals, "'=' after rank")?;
    let rank = p.expect_usize("rank")?;
    if dim == 0 || rank == 0 {
        return Err(p.error_at(&t, "dim and rank must be at least 1"));
    }
    p.dim = dim;

    let mut entries: Vec<(usize, usize, ExprNode)> = Vec::new();
    loop {
        p.skip_newlines();
        if p.peek().tok == Tok::Eof {
            break;
        }
        let t = p.bump();
        match &t.tok {
            Tok::Ident(kw) if kw == "h" => {}
            _ => return Err(p.error_at(&t, "expected entry 'h[a][b] = ...'")),
        }
        p.expect(Tok::LBracket, "'['")?;
        let a = p.expect_usize("row index")?;
        p.expect(Tok::RBracket, "']'")?;
        p.expect(Tok::LBracket, "'['")?;
        let b = p.expect_usize("column index")?;
        p.expect(Tok::RBracket, "']'")?;
        if a < 1 || a > rank || b < 1 || b > rank {
            return Err(p.error_at(&t, format!("entry h[{a}][{b}] out of range for rank={rank}")));
        }
        p.expect(Tok::Equals, "'='")?;
        let expr = p.parse_expr()?;
        let end = p.bump();
        match &end.tok {
            Tok::Newline | Tok::Eof => {}
            other => {
                let msg = format!("unexpected trailing token {other:?}");
                return Err(p.error_at(&end, msg));
            }
        }
        if entries.iter().any(|(x, y, _)| *x == a - 1 && *y == b - 1) {
            return Err(p.error_at(&t, format!("entry h[{a}][{b}] defined twice")));
        }
        entries.push((a - 1, b - 1, expr));
    }

    Ok(ParsedSource { name, dim, rank, entries })
}
