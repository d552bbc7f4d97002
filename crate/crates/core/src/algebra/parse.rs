//! Text formats: algebra spec files and the R-matrix grammar.
//!
//! Algebra spec:
//! ```text
//! field 2 1
//! vertices v
//! arrow x: v -> v
//! arrow y: v -> v
//! forbid x x
//! ```
//! R-matrices are bracketed rows of entries, each entry a signed sum of
//! terms and each term a product of integers (field element codes), arrow
//! labels and trivial paths `e_v`, e.g. `[[e_v - x, y], [0, e_v]]`.

use super::{AlgebraElement, AlgebraError, Quiver, RMatrix, StringAlgebra};
use crate::gf::{FieldPolynomial, FiniteField};

fn syntax(line: usize, col: usize, msg: impl Into<String>) -> AlgebraError {
    AlgebraError::SyntaxError { line, col, msg: msg.into() }
}

fn is_ident_start(c: char) -> bool {
    c.is_alphabetic() || c == '_'
}

fn is_ident_char(c: char) -> bool {
    c.is_alphanumeric() || c == '_' || c == '\''
}

/// Names used for vertices and arrows.
pub(crate) fn is_identifier(s: &str) -> bool {
    let mut cs = s.chars();
    matches!(cs.next(), Some(c) if is_ident_start(c)) && cs.all(is_ident_char)
}

pub fn parse_algebra_spec(text: &str) -> Result<StringAlgebra, AlgebraError> {
    let mut field: Option<FiniteField> = None;
    let mut vertices: Vec<String> = Vec::new();
    let mut arrows: Vec<(String, String, String)> = Vec::new();
    let mut forbidden: Vec<Vec<String>> = Vec::new();
    for (ln, raw) in text.lines().enumerate() {
        let line = ln + 1;
        let body = raw.split('#').next().unwrap_or("");
        let trimmed = body.trim_start();
        if trimmed.trim().is_empty() {
            continue;
        }
        let indent = body.len() - trimmed.len();
        let (kw, rest) = trimmed.split_once(char::is_whitespace).unwrap_or((trimmed, ""));
        let rest_col = indent + kw.len() + 2;
        match kw {
            "field" => {
                let cleaned = rest.replace(['[', ']', ','], " ");
                let mut toks = cleaned.split_whitespace().filter(|t| *t != "modulus");
                let mut num = |what: &str| -> Result<u32, AlgebraError> {
                    toks.next()
                        .ok_or_else(|| syntax(line, rest_col, format!("missing {what}")))?
                        .parse::<u32>()
                        .map_err(|_| syntax(line, rest_col, format!("bad {what}")))
                };
                let p = num("characteristic")?;
                let k = num("degree")?;
                let coeffs: Vec<u32> = toks
                    .map(|t| t.parse::<u32>().map_err(|_| syntax(line, rest_col, "bad modulus coefficient")))
                    .collect::<Result<_, _>>()?;
                let modulus = if coeffs.is_empty() { None } else { Some(FieldPolynomial::new(coeffs)) };
                field = Some(FiniteField::new(p, k, modulus)?);
            }
            "vertices" => {
                for v in rest.split_whitespace() {
                    if !is_identifier(v) {
                        return Err(syntax(line, rest_col, format!("bad vertex name {v}")));
                    }
                    vertices.push(v.to_string());
                }
            }
            "arrow" => {
                let (label, ends) = rest
                    .split_once(':')
                    .ok_or_else(|| syntax(line, rest_col, "expected `label: source -> target`"))?;
                let (s, t) = ends
                    .split_once("->")
                    .ok_or_else(|| syntax(line, rest_col, "expected `->`"))?;
                let (label, s, t) = (label.trim(), s.trim(), t.trim());
                for name in [label, s, t] {
                    if !is_identifier(name) {
                        return Err(syntax(line, rest_col, format!("bad name {name:?}")));
                    }
                }
                arrows.push((label.into(), s.into(), t.into()));
            }
            "forbid" => {
                let path: Vec<String> = rest.replace('*', " ").split_whitespace().map(String::from).collect();
                if path.is_empty() {
                    return Err(syntax(line, rest_col, "empty forbidden path"));
                }
                forbidden.push(path);
            }
            other => return Err(syntax(line, indent + 1, format!("unknown keyword {other}"))),
        }
    }
    let field = field.ok_or_else(|| syntax(1, 1, "missing `field` line"))?;
    let quiver = Quiver::new(vertices, &arrows)?;
    StringAlgebra::validate(quiver, forbidden, field)
}

pub(crate) fn algebra_emit(r: &StringAlgebra) -> String {
    let f = r.field();
    let mut out = format!("field {} {}", f.characteristic(), f.degree());
    if let Some(m) = f.modulus() {
        let cs: Vec<String> = m.coeffs().iter().map(|c| c.to_string()).collect();
        out.push_str(&format!(" modulus [{}]", cs.join(", ")));
    }
    out.push('\n');
    out.push_str(&format!("vertices {}\n", r.quiver().vertices().join(" ")));
    for a in r.quiver().arrows() {
        out.push_str(&format!(
            "arrow {}: {} -> {}\n",
            a.label,
            r.vertex_name(a.source),
            r.vertex_name(a.target)
        ));
    }
    for p in r.forbidden() {
        let labels: Vec<&str> = p.iter().map(|&a| r.arrow_label(a)).collect();
        out.push_str(&format!("forbid {}\n", labels.join(" ")));
    }
    out
}

#[derive(Debug, Clone, PartialEq)]
enum Tok {
    LBr,
    RBr,
    Comma,
    Plus,
    Minus,
    Star,
    Int(u64),
    Ident(String),
}

struct Lexer {
    toks: Vec<(Tok, usize, usize)>,
    pos: usize,
    end: (usize, usize),
}

impl Lexer {
    fn new(text: &str) -> Result<Self, AlgebraError> {
        let mut toks = Vec::new();
        let (mut line, mut col) = (1, 1);
        let chars: Vec<char> = text.chars().collect();
        let mut i = 0;
        while i < chars.len() {
            let c = chars[i];
            let (l0, c0) = (line, col);
            if c == '\n' {
                line += 1;
                col = 1;
                i += 1;
                continue;
            }
            if c.is_whitespace() {
                col += 1;
                i += 1;
                continue;
            }
            let single = match c {
                '[' => Some(Tok::LBr),
                ']' => Some(Tok::RBr),
                ',' => Some(Tok::Comma),
                '+' => Some(Tok::Plus),
                '-' => Some(Tok::Minus),
                '*' => Some(Tok::Star),
                _ => None,
            };
            if let Some(t) = single {
                toks.push((t, l0, c0));
                i += 1;
                col += 1;
            } else if c.is_ascii_digit() {
                let mut j = i;
                while j < chars.len() && chars[j].is_ascii_digit() {
                    j += 1;
                }
                let s: String = chars[i..j].iter().collect();
                let n = s.parse::<u64>().map_err(|_| syntax(l0, c0, "integer too large"))?;
                toks.push((Tok::Int(n), l0, c0));
                col += j - i;
                i = j;
            } else if is_ident_start(c) {
                let mut j = i;
                while j < chars.len() && is_ident_char(chars[j]) {
                    j += 1;
                }
                toks.push((Tok::Ident(chars[i..j].iter().collect()), l0, c0));
                col += j - i;
                i = j;
            } else {
                return Err(syntax(l0, c0, format!("unexpected character {c:?}")));
            }
        }
        Ok(Lexer { toks, pos: 0, end: (line, col) })
    }

    fn peek(&self) -> Option<&Tok> {
        self.toks.get(self.pos).map(|t| &t.0)
    }

    fn here(&self) -> (usize, usize) {
        self.toks.get(self.pos).map(|t| (t.1, t.2)).unwrap_or(self.end)
    }

    fn next(&mut self) -> Option<Tok> {
        let t = self.toks.get(self.pos).map(|t| t.0.clone());
        self.pos += 1;
        t
    }

    fn expect(&mut self, want: Tok, what: &str) -> Result<(), AlgebraError> {
        let (l, c) = self.here();
        match self.next() {
            Some(t) if t == want => Ok(()),
            _ => Err(syntax(l, c, format!("expected {what}"))),
        }
    }
}

fn parse_factor_ident(name: &str, r: &StringAlgebra) -> Result<AlgebraElement, AlgebraError> {
    if let Some(a) = r.quiver().arrow_index(name) {
        return Ok(r.arrow_element(a));
    }
    if let Some(v) = name.strip_prefix("e_").and_then(|v| r.quiver().vertex_index(v)) {
        return Ok(r.vertex_element(v));
    }
    Err(AlgebraError::UnknownPath(name.to_string()))
}

fn parse_term(lx: &mut Lexer, r: &StringAlgebra) -> Result<AlgebraElement, AlgebraError> {
    let f = r.field();
    let mut scalar = 1;
    let mut elem: Option<AlgebraElement> = None;
    let mut any = false;
    loop {
        let (l, c) = lx.here();
        match lx.peek() {
            Some(Tok::Int(n)) => {
                let n = *n;
                lx.next();
                let e = f.elem(n).map_err(|_| syntax(l, c, format!("coefficient {n} is not a field element")))?;
                scalar = f.mul(scalar, e);
            }
            Some(Tok::Ident(name)) => {
                let name = name.clone();
                lx.next();
                let x = parse_factor_ident(&name, r)?;
                elem = Some(match elem {
                    None => x,
                    Some(e) => e.mul(&x, r),
                });
            }
            _ => {
                if !any {
                    return Err(syntax(l, c, "expected a term"));
                }
                break;
            }
        }
        any = true;
        if lx.peek() == Some(&Tok::Star) {
            lx.next();
            if !matches!(lx.peek(), Some(Tok::Int(_)) | Some(Tok::Ident(_))) {
                let (l, c) = lx.here();
                return Err(syntax(l, c, "expected a factor after `*`"));
            }
        }
    }
    Ok(elem.unwrap_or_else(|| r.unit()).scale(scalar, f))
}

fn parse_entry(lx: &mut Lexer, r: &StringAlgebra) -> Result<AlgebraElement, AlgebraError> {
    let f = r.field();
    let mut acc = AlgebraElement::zero();
    let mut negate = false;
    match lx.peek() {
        Some(Tok::Minus) => {
            lx.next();
            negate = true;
        }
        Some(Tok::Plus) => {
            lx.next();
        }
        _ => {}
    }
    loop {
        let t = parse_term(lx, r)?;
        acc = acc.add(&if negate { t.neg(f) } else { t }, f);
        match lx.peek() {
            Some(Tok::Plus) => {
                lx.next();
                negate = false;
            }
            Some(Tok::Minus) => {
                lx.next();
                negate = true;
            }
            _ => break,
        }
    }
    Ok(acc)
}

pub fn rmatrix_parse(text: &str, r: &StringAlgebra) -> Result<RMatrix, AlgebraError> {
    let mut lx = Lexer::new(text)?;
    lx.expect(Tok::LBr, "`[`")?;
    let mut rows: Vec<Vec<AlgebraElement>> = Vec::new();
    if lx.peek() == Some(&Tok::RBr) {
        lx.next();
    } else {
        loop {
            let (l, c) = lx.here();
            lx.expect(Tok::LBr, "`[` starting a row")?;
            let mut row = Vec::new();
            loop {
                row.push(parse_entry(&mut lx, r)?);
                match lx.peek() {
                    Some(Tok::Comma) => {
                        lx.next();
                    }
                    _ => break,
                }
            }
            lx.expect(Tok::RBr, "`]` or `,`")?;
            if let Some(first) = rows.first() {
                if first.len() != row.len() {
                    return Err(syntax(l, c, "rows have different lengths"));
                }
            }
            rows.push(row);
            match lx.peek() {
                Some(Tok::Comma) => {
                    lx.next();
                }
                _ => break,
            }
        }
        lx.expect(Tok::RBr, "`]` or `,`")?;
    }
    if lx.peek().is_some() {
        let (l, c) = lx.here();
        return Err(syntax(l, c, "trailing input"));
    }
    RMatrix::from_rows(rows)
}

pub fn rmatrix_emit(m: &RMatrix, r: &StringAlgebra) -> String {
    if m.rows() == 0 {
        return "[]".into();
    }
    let rows: Vec<String> = (0..m.rows())
        .map(|i| {
            let es: Vec<String> = (0..m.cols()).map(|j| m.get(i, j).render(r)).collect();
            format!("[{}]", es.join(", "))
        })
        .collect();
    format!("[{}]", rows.join(", "))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn gp() -> StringAlgebra {
        StringAlgebra::gelfand_ponomarev(FiniteField::prime(3).unwrap(), 2, 2)
    }

    #[test]
    fn parse_examples() {
        let r = gp();
        let m = rmatrix_parse("[[x]]", &r).unwrap();
        assert_eq!((m.rows(), m.cols()), (1, 1));
        assert_eq!(m.get(0, 0), &r.arrow_element(0));
        let m = rmatrix_parse("[[e_v - x, y],[0, e_v]]", &r).unwrap();
        assert_eq!((m.rows(), m.cols()), (2, 2));
        assert_eq!(m.get(0, 0).render(&r), "e_v + 2*x");
        assert!(m.get(1, 0).is_zero());
        assert!(matches!(rmatrix_parse("[[z]]", &r), Err(AlgebraError::UnknownPath(_))));
    }

    #[test]
    fn syntax_error_position() {
        let r = gp();
        match rmatrix_parse("[[x,\n  y +]]", &r) {
            Err(AlgebraError::SyntaxError { line, col, .. }) => assert_eq!((line, col), (2, 6)),
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn emit_round_trip() {
        let r = gp();
        let m = rmatrix_parse("[[2*x + 1, 0], [y x, -y]]", &r).unwrap();
        let text = rmatrix_emit(&m, &r);
        assert_eq!(rmatrix_parse(&text, &r).unwrap(), m);
    }

    #[test]
    fn algebra_spec_round_trip() {
        let text = "# example\nfield 2 1\nvertices v\narrow x: v -> v\narrow y: v -> v\nforbid x x\nforbid y y\nforbid x y\nforbid y x\n";
        let r = parse_algebra_spec(text).unwrap();
        assert_eq!(r, gp_over_2());
        assert_eq!(parse_algebra_spec(&algebra_emit(&r)).unwrap(), r);
    }

    fn gp_over_2() -> StringAlgebra {
        StringAlgebra::gelfand_ponomarev(FiniteField::prime(2).unwrap(), 2, 2)
    }

    #[test]
    fn extension_field_spec() {
        let r = parse_algebra_spec("field 2 2 modulus [1, 1, 1]\nvertices a b\narrow x: a -> b\n").unwrap();
        assert_eq!(r.field().order(), 4);
        assert!(matches!(
            parse_algebra_spec("field 2 2 [1,0,1]\nvertices a\n"),
            Err(AlgebraError::Field(crate::gf::GfError::ReducibleModulus))
        ));
    }
}
