//! Matrix text and JSON formats.
//!
//! Text: a header line `rows cols`, then `rows` lines of `cols`
//! whitespace-separated scalars. Rendering uses single spaces and a trailing
//! newline on every line. JSON: `{"rows": r, "cols": c, "entries": [...]}`
//! with row-major scalar strings.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::matrix::Matrix;
use crate::scalar::{Field, Scalar};

pub fn render_matrix(m: &Matrix) -> String {
    let mut out = format!("{} {}\n", m.rows(), m.cols());
    for i in 0..m.rows() {
        let line: Vec<String> = (0..m.cols()).map(|j| m.get(i, j).to_string()).collect();
        out.push_str(&line.join(" "));
        out.push('\n');
    }
    out
}

struct Token<'a> {
    line: usize,
    col: usize,
    text: &'a str,
}

fn parse_err(line: usize, col: usize, msg: impl Into<String>) -> Error {
    Error::Parse { line, col, msg: msg.into() }
}

fn tokens(line_no: usize, line: &str) -> Vec<Token<'_>> {
    let mut out = Vec::new();
    let mut start = None;
    for (k, c) in line.char_indices().chain(std::iter::once((line.len(), ' '))) {
        match (c.is_whitespace(), start) {
            (true, Some(s)) => {
                out.push(Token { line: line_no, col: s + 1, text: &line[s..k] });
                start = None;
            }
            (false, None) => start = Some(k),
            _ => {}
        }
    }
    out
}

/// Splits the text format into its header and the token rows, checking shape.
fn parse_grid(text: &str) -> Result<(usize, usize, Vec<Vec<Token<'_>>>)> {
    let mut lines = text
        .lines()
        .enumerate()
        .map(|(k, l)| (k + 1, l))
        .filter(|(_, l)| !l.trim().is_empty() && !l.trim_start().starts_with('#'));
    let (hline, header) = lines.next().ok_or_else(|| parse_err(1, 1, "missing header line"))?;
    let htoks = tokens(hline, header);
    if htoks.len() != 2 {
        return Err(parse_err(hline, 1, "header must be `rows cols`"));
    }
    let dim = |t: &Token| {
        t.text
            .parse::<usize>()
            .map_err(|_| parse_err(t.line, t.col, format!("bad dimension {:?}", t.text)))
    };
    let (rows, cols) = (dim(&htoks[0])?, dim(&htoks[1])?);
    let mut grid = Vec::with_capacity(rows);
    for (k, line) in lines {
        let toks = tokens(k, line);
        if grid.len() == rows {
            return Err(parse_err(k, 1, format!("expected {rows} rows, found more")));
        }
        if toks.len() != cols {
            let col = toks.get(cols).map_or(line.len() + 1, |t| t.col);
            return Err(parse_err(k, col, format!("expected {cols} entries, found {}", toks.len())));
        }
        grid.push(toks);
    }
    if grid.len() != rows && cols > 0 {
        return Err(parse_err(
            text.lines().count().max(1),
            1,
            format!("expected {rows} rows, found {}", grid.len()),
        ));
    }
    Ok((rows, cols, grid))
}

/// Parses the text format over `field`; errors carry line and column.
pub fn parse_matrix(text: &str, field: Field) -> Result<Matrix> {
    let (rows, cols, grid) = parse_grid(text)?;
    let mut data = Vec::with_capacity(rows * cols);
    for tok in grid.iter().flatten() {
        let s = Scalar::parse(field, tok.text).map_err(|e| match e {
            Error::Parse { msg, .. } => parse_err(tok.line, tok.col, msg),
            other => other,
        })?;
        data.push(s);
    }
    Matrix::from_vec(rows, cols, field, data)
}

/// JSON mirror of the text format.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MatrixJson {
    pub rows: usize,
    pub cols: usize,
    pub entries: Vec<String>,
}

impl MatrixJson {
    pub fn from_matrix(m: &Matrix) -> MatrixJson {
        MatrixJson {
            rows: m.rows(),
            cols: m.cols(),
            entries: m.entries().iter().map(ToString::to_string).collect(),
        }
    }

    pub fn to_matrix(&self, field: Field) -> Result<Matrix> {
        let data = self
            .entries
            .iter()
            .enumerate()
            .map(|(k, s)| {
                Scalar::parse(field, s).map_err(|e| match e {
                    Error::Parse { msg, .. } => Error::Json(format!("entry {k}: {msg}")),
                    other => other,
                })
            })
            .collect::<Result<Vec<_>>>()?;
        Matrix::from_vec(self.rows, self.cols, field, data)
    }
}

pub fn parse_matrix_json(text: &str, field: Field) -> Result<Matrix> {
    let mj: MatrixJson = serde_json::from_str(text).map_err(|e| Error::Json(e.to_string()))?;
    mj.to_matrix(field)
}

fn parse_real(s: &str) -> std::result::Result<f64, String> {
    if let Some((n, d)) = s.split_once('/') {
        let n: f64 = n.parse().map_err(|_| format!("malformed number {s:?}"))?;
        let d: f64 = d.parse().map_err(|_| format!("malformed number {s:?}"))?;
        return Ok(n / d);
    }
    s.parse().map_err(|_| format!("malformed number {s:?}"))
}

/// Decimal float, or a complex number `a+b*i` with decimal parts.
pub fn parse_complex(s: &str) -> std::result::Result<Complex64, String> {
    let Some(body) = s.strip_suffix('i') else {
        return Ok(Complex64::new(parse_real(s)?, 0.0));
    };
    let body = body.strip_suffix('*').unwrap_or(body);
    let bytes = body.as_bytes();
    // a sign that is not the first character and does not follow an exponent marker
    let split = (1..bytes.len())
        .rev()
        .find(|&k| (bytes[k] == b'+' || bytes[k] == b'-') && !matches!(bytes[k - 1], b'e' | b'E'));
    let coef = |t: &str| match t {
        "" | "+" => Ok(1.0),
        "-" => Ok(-1.0),
        _ => parse_real(t),
    };
    match split {
        Some(k) => Ok(Complex64::new(parse_real(&body[..k])?, coef(&body[k..])?)),
        None => Ok(Complex64::new(0.0, coef(body)?)),
    }
}

/// A floating-point matrix in row-major order.
#[derive(Clone, Debug, PartialEq)]
pub struct FloatGrid {
    pub rows: usize,
    pub cols: usize,
    pub entries: Vec<Complex64>,
}

/// Parses the text format with decimal (optionally complex) entries.
pub fn parse_float_matrix(text: &str) -> Result<FloatGrid> {
    let (rows, cols, grid) = parse_grid(text)?;
    let entries = grid
        .iter()
        .flatten()
        .map(|t| parse_complex(t.text).map_err(|msg| parse_err(t.line, t.col, msg)))
        .collect::<Result<Vec<_>>>()?;
    Ok(FloatGrid { rows, cols, entries })
}

/// Float JSON input: `{"rows", "cols", "entries"}` with entry strings.
pub fn parse_float_matrix_json(text: &str) -> Result<FloatGrid> {
    let mj: MatrixJson = serde_json::from_str(text).map_err(|e| Error::Json(e.to_string()))?;
    if mj.entries.len() != mj.rows * mj.cols {
        return Err(Error::Json(format!("{} entries for {}x{}", mj.entries.len(), mj.rows, mj.cols)));
    }
    let entries = mj
        .entries
        .iter()
        .map(|s| parse_complex(s).map_err(Error::Json))
        .collect::<Result<Vec<_>>>()?;
    Ok(FloatGrid { rows: mj.rows, cols: mj.cols, entries })
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn text_round_trip_is_bit_exact() {
        let text = "2 2\n1 0-1*i\n0+1*i 1\n";
        let m = parse_matrix(text, Field::GaussianRational).unwrap();
        assert_eq!(render_matrix(&m), "2 2\n1+0*i 0-1*i\n0+1*i 1+0*i\n");
        let again = parse_matrix(&render_matrix(&m), Field::GaussianRational).unwrap();
        assert_eq!(again, m);
    }

    #[test]
    fn zero_dimension_text() {
        let m = Matrix::zeros(3, 0, Field::Rational);
        let text = render_matrix(&m);
        assert_eq!(text, "3 0\n\n\n\n");
        assert_eq!(parse_matrix(&text, Field::Rational).unwrap(), m);
        assert_eq!(parse_matrix("0 0\n", Field::Rational).unwrap(), Matrix::zeros(0, 0, Field::Rational));
    }

    #[test]
    fn parse_errors_carry_positions() {
        let err = parse_matrix("2 2\n1 2\n3 x\n", Field::Rational).unwrap_err();
        assert_eq!(err, Error::Parse { line: 3, col: 3, msg: "malformed rational \"x\"".into() });
        let err = parse_matrix("2 2\n1 2 3\n3 4\n", Field::Rational).unwrap_err();
        assert!(matches!(err, Error::Parse { line: 2, col: 5, .. }));
        assert!(parse_matrix("2 2\n1 2\n", Field::Rational).is_err());
        assert!(parse_matrix("two 2\n", Field::Rational).is_err());
    }

    #[test]
    fn complex_float_literals() {
        assert_eq!(parse_complex("1.5").unwrap(), Complex64::new(1.5, 0.0));
        assert_eq!(parse_complex("-i").unwrap(), Complex64::new(0.0, -1.0));
        assert_eq!(parse_complex("1e-3-2.5*i").unwrap(), Complex64::new(1e-3, -2.5));
        assert_eq!(parse_complex("2e+1i").unwrap(), Complex64::new(0.0, 20.0));
        let g = parse_float_matrix("1 2\n0.5 1+1*i\n").unwrap();
        assert_eq!(g.entries[1], Complex64::new(1.0, 1.0));
    }

    fn arb_scalar() -> impl Strategy<Value = (Field, Scalar)> {
        let frac = (-1000i64..1000, 1i64..1000);
        prop_oneof![
            frac.clone().prop_map(|(n, d)| (Field::Rational, Scalar::from_ratio(Field::Rational, n, d))),
            (frac.clone(), frac).prop_map(|((a, b), (c, d))| {
                let re = Scalar::from_ratio(Field::GaussianRational, a, b);
                let im = Scalar::from_ratio(Field::GaussianRational, c, d);
                (Field::GaussianRational, re + Scalar::i() * im)
            }),
            (0i64..1_000_000).prop_map(|v| (Field::PrimeField(65_521), Scalar::from_i64(Field::PrimeField(65_521), v))),
        ]
    }

    proptest! {
        #[test]
        fn scalar_render_parse_round_trip((field, s) in arb_scalar()) {
            prop_assert_eq!(Scalar::parse(field, &s.to_string()).unwrap(), s);
        }

        #[test]
        fn json_round_trip(entries in prop::collection::vec(-50i64..50, 6)) {
            let m = Matrix::from_fn(2, 3, Field::Rational, |i, j| Scalar::from_ratio(Field::Rational, entries[i * 3 + j], 7));
            let json = serde_json::to_string(&MatrixJson::from_matrix(&m)).unwrap();
            prop_assert_eq!(parse_matrix_json(&json, Field::Rational).unwrap(), m);
        }
    }
}
