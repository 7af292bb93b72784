//! Text format for custom verification runs.
//!
//! A spec file is UTF-8 text with `[fields]`, `[motion]`, `[chain]` and
//! `[controls]` sections. Field components are polynomial expressions in
//! x, y, z, t: sums of terms, each term a `*`-separated product of numbers
//! and powers `var^k` with k <= 4. The parser is a tiny recursive-descent
//! evaluator into [`Poly`]; nothing is ever handed to a host-language eval.
//!
//! ```text
//! [fields]
//! b = 0, 0, 3
//! f = -1.5*y, 1.5*x, 0
//! e = 0, -3, 0
//!
//! [motion]
//! type = translation
//! velocity = 2, 0, 0
//!
//! [chain]
//! surface = unit_square
//! frame = 0, 0, 1
//!
//! [controls]
//! depth = 3
//! tolerance = 1e-4
//! ```

use crate::chains::{unit_cube, unit_square_z, Chain, Simplex};
use crate::error::{Error, Result};
use crate::flows::Motion;
use crate::poly::Poly;

#[derive(Debug, Clone, Copy, PartialEq)]
enum Token {
    Number(f64),
    Var(usize),
    Plus,
    Minus,
    Star,
    Caret,
    LParen,
    RParen,
}

fn tokenize(src: &str, line: usize) -> Result<Vec<(Token, usize)>> {
    let mut out = Vec::new();
    let chars: Vec<char> = src.chars().collect();
    let mut i = 0;
    while i < chars.len() {
        let col = i + 1;
        let c = chars[i];
        match c {
            ' ' | '\t' => i += 1,
            '+' => {
                out.push((Token::Plus, col));
                i += 1;
            }
            '-' => {
                out.push((Token::Minus, col));
                i += 1;
            }
            '*' => {
                out.push((Token::Star, col));
                i += 1;
            }
            '^' => {
                out.push((Token::Caret, col));
                i += 1;
            }
            '(' => {
                out.push((Token::LParen, col));
                i += 1;
            }
            ')' => {
                out.push((Token::RParen, col));
                i += 1;
            }
            'x' => {
                out.push((Token::Var(0), col));
                i += 1;
            }
            'y' => {
                out.push((Token::Var(1), col));
                i += 1;
            }
            'z' => {
                out.push((Token::Var(2), col));
                i += 1;
            }
            't' => {
                out.push((Token::Var(crate::poly::TIME_VAR), col));
                i += 1;
            }
            c if c.is_ascii_digit() || c == '.' => {
                let start = i;
                while i < chars.len()
                    && (chars[i].is_ascii_digit()
                        || chars[i] == '.'
                        || chars[i] == 'e'
                        || chars[i] == 'E'
                        || ((chars[i] == '+' || chars[i] == '-')
                            && i > start
                            && (chars[i - 1] == 'e' || chars[i - 1] == 'E')))
                {
                    i += 1;
                }
                let text: String = chars[start..i].iter().collect();
                let v = text.parse::<f64>().map_err(|_| Error::Parse {
                    line,
                    col,
                    msg: format!("bad number '{text}'"),
                })?;
                out.push((Token::Number(v), col));
            }
            other => {
                return Err(Error::Parse {
                    line,
                    col,
                    msg: format!("unexpected character '{other}'"),
                })
            }
        }
    }
    Ok(out)
}

struct PolyParser {
    tokens: Vec<(Token, usize)>,
    pos: usize,
    line: usize,
}

impl PolyParser {
    fn peek(&self) -> Option<Token> {
        self.tokens.get(self.pos).map(|(t, _)| *t)
    }

    fn col(&self) -> usize {
        self.tokens.get(self.pos).map(|(_, c)| *c).unwrap_or_else(|| {
            self.tokens.last().map(|(_, c)| c + 1).unwrap_or(1)
        })
    }

    fn bump(&mut self) -> Option<Token> {
        let t = self.peek();
        if t.is_some() {
            self.pos += 1;
        }
        t
    }

    fn err(&self, msg: &str) -> Error {
        Error::Parse { line: self.line, col: self.col(), msg: msg.to_string() }
    }

    fn expression(&mut self) -> Result<Poly> {
        let mut acc = match self.peek() {
            Some(Token::Minus) => {
                self.bump();
                self.term()?.scale(-1.0)
            }
            Some(Token::Plus) => {
                self.bump();
                self.term()?
            }
            _ => self.term()?,
        };
        while let Some(tok) = self.peek() {
            match tok {
                Token::Plus => {
                    self.bump();
                    acc = acc.add(&self.term()?);
                }
                Token::Minus => {
                    self.bump();
                    acc = acc.sub(&self.term()?);
                }
                _ => break,
            }
        }
        Ok(acc)
    }

    fn term(&mut self) -> Result<Poly> {
        let mut acc = self.factor()?;
        while self.peek() == Some(Token::Star) {
            self.bump();
            acc = acc.mul(&self.factor()?);
        }
        Ok(acc)
    }

    fn factor(&mut self) -> Result<Poly> {
        match self.bump() {
            Some(Token::Number(v)) => Ok(Poly::constant(v)),
            Some(Token::Minus) => Ok(self.factor()?.scale(-1.0)),
            Some(Token::Var(v)) => {
                if self.peek() == Some(Token::Caret) {
                    self.bump();
                    match self.bump() {
                        Some(Token::Number(e)) if e.fract() == 0.0 && e >= 0.0 => {
                            if e > 4.0 {
                                return Err(self.err("exponent exceeds the maximum of 4"));
                            }
                            Ok(Poly::var(v).pow(e as u32))
                        }
                        _ => Err(self.err("expected a small integer exponent after '^'")),
                    }
                } else {
                    Ok(Poly::var(v))
                }
            }
            Some(Token::LParen) => {
                let inner = self.expression()?;
                if self.bump() != Some(Token::RParen) {
                    return Err(self.err("expected ')'"));
                }
                Ok(inner)
            }
            _ => Err(self.err("expected a number, variable or '('")),
        }
    }
}

/// Parse one polynomial expression; `line` is for error reporting.
pub fn parse_polynomial(src: &str, line: usize) -> Result<Poly> {
    let tokens = tokenize(src, line)?;
    if tokens.is_empty() {
        return Err(Error::Parse { line, col: 1, msg: "empty expression".into() });
    }
    let mut p = PolyParser { tokens, pos: 0, line };
    let poly = p.expression()?;
    if p.pos != p.tokens.len() {
        return Err(p.err("trailing input after expression"));
    }
    Ok(poly)
}

/// Parse a comma-separated list of polynomial expressions.
pub fn parse_poly_list(src: &str, line: usize, want: usize) -> Result<Vec<Poly>> {
    let parts: Vec<&str> = src.split(',').collect();
    if parts.len() != want {
        return Err(Error::Parse {
            line,
            col: 1,
            msg: format!("expected {want} comma-separated components, got {}", parts.len()),
        });
    }
    parts.iter().map(|p| parse_polynomial(p, line)).collect()
}

fn parse_f64_list(src: &str, line: usize, want: usize) -> Result<Vec<f64>> {
    let vals: std::result::Result<Vec<f64>, _> =
        src.split(',').map(|s| s.trim().parse::<f64>()).collect();
    let vals = vals.map_err(|_| Error::Parse {
        line,
        col: 1,
        msg: format!("expected {want} comma-separated numbers"),
    })?;
    if vals.len() != want {
        return Err(Error::Parse {
            line,
            col: 1,
            msg: format!("expected {want} comma-separated numbers, got {}", vals.len()),
        });
    }
    Ok(vals)
}

/// Everything a custom verification run needs.
#[derive(Debug, Clone)]
pub struct CustomSpec {
    pub e: Option<Vec<Poly>>,
    pub b: Option<Vec<Poly>>,
    pub h: Option<Vec<Poly>>,
    pub d: Option<Vec<Poly>>,
    pub j: Option<Vec<Poly>>,
    pub rho: Option<Poly>,
    pub f_potential: Option<Vec<Poly>>,
    pub v_e: Option<Poly>,
    pub motion: MotionSpec,
    pub surface: Chain,
    pub window: Chain,
    pub controls: Controls,
}

#[derive(Debug, Clone, PartialEq)]
pub enum MotionSpec {
    Static,
    Translation(Vec<f64>),
    RotationZ(f64),
    Scaling(f64),
}

impl MotionSpec {
    pub fn build(&self) -> Motion {
        match self {
            MotionSpec::Static => Motion::static_motion(3),
            MotionSpec::Translation(v) => Motion::translation(v.clone()),
            MotionSpec::RotationZ(omega) => Motion::rotation_z(*omega),
            MotionSpec::Scaling(rate) => Motion::scaling(3, *rate),
        }
    }

    pub fn name(&self) -> &'static str {
        match self {
            MotionSpec::Static => "static",
            MotionSpec::Translation(_) => "translation",
            MotionSpec::RotationZ(_) => "rotation_z",
            MotionSpec::Scaling(_) => "scaling",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Controls {
    pub depth: usize,
    pub fd_step: f64,
    pub quad_order: usize,
    pub tolerance: f64,
    pub time: f64,
    pub boost: Vec<f64>,
}

impl Default for Controls {
    fn default() -> Self {
        Controls {
            depth: 3,
            fd_step: 1e-5,
            quad_order: 16,
            tolerance: 1e-4,
            time: 0.0,
            boost: vec![0.1, -0.2, 0.3],
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
enum Section {
    None,
    Fields,
    Motion,
    Chain,
    Controls,
}

/// Parse a custom verification spec file.
pub fn parse_spec(text: &str) -> Result<CustomSpec> {
    let mut section = Section::None;
    let mut e = None;
    let mut b = None;
    let mut h = None;
    let mut d = None;
    let mut j = None;
    let mut rho = None;
    let mut f_potential = None;
    let mut v_e = None;
    let mut motion_type: Option<String> = None;
    let mut velocity: Option<Vec<f64>> = None;
    let mut omega: Option<f64> = None;
    let mut rate: Option<f64> = None;
    let mut surface: Option<Chain> = None;
    let mut surface_records: Vec<(i64, Simplex)> = Vec::new();
    let mut window: Option<Chain> = None;
    let mut frame: Option<Vec<f64>> = None;
    let mut controls = Controls::default();

    for (idx, raw) in text.lines().enumerate() {
        let lineno = idx + 1;
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        if let Some(name) = line.strip_prefix('[').and_then(|s| s.strip_suffix(']')) {
            section = match name {
                "fields" => Section::Fields,
                "motion" => Section::Motion,
                "chain" => Section::Chain,
                "controls" => Section::Controls,
                other => {
                    return Err(Error::Parse {
                        line: lineno,
                        col: 1,
                        msg: format!("unknown section '{other}'"),
                    })
                }
            };
            continue;
        }
        let (key, value) = line.split_once('=').ok_or(Error::Parse {
            line: lineno,
            col: 1,
            msg: "expected 'key = value'".into(),
        })?;
        let key = key.trim();
        let value = value.trim();
        let bad_key = |k: &str| Error::Parse {
            line: lineno,
            col: 1,
            msg: format!("unknown key '{k}' in this section"),
        };
        match section {
            Section::Fields => match key {
                "e" => e = Some(parse_poly_list(value, lineno, 3)?),
                "b" => b = Some(parse_poly_list(value, lineno, 3)?),
                "h" => h = Some(parse_poly_list(value, lineno, 3)?),
                "d" => d = Some(parse_poly_list(value, lineno, 3)?),
                "j" => j = Some(parse_poly_list(value, lineno, 3)?),
                "rho" => rho = Some(parse_polynomial(value, lineno)?),
                "f" => f_potential = Some(parse_poly_list(value, lineno, 3)?),
                "v_e" => v_e = Some(parse_polynomial(value, lineno)?),
                k => return Err(bad_key(k)),
            },
            Section::Motion => match key {
                "type" => motion_type = Some(value.to_string()),
                "velocity" => velocity = Some(parse_f64_list(value, lineno, 3)?),
                "omega" => {
                    omega = Some(value.parse().map_err(|_| Error::Parse {
                        line: lineno,
                        col: 1,
                        msg: "bad omega".into(),
                    })?)
                }
                "rate" => {
                    rate = Some(value.parse().map_err(|_| Error::Parse {
                        line: lineno,
                        col: 1,
                        msg: "bad rate".into(),
                    })?)
                }
                k => return Err(bad_key(k)),
            },
            Section::Chain => match key {
                "surface" => match value {
                    "unit_square" => surface = Some(unit_square_z(0.0)),
                    other => {
                        return Err(Error::Parse {
                            line: lineno,
                            col: 1,
                            msg: format!("unknown surface '{other}' (use unit_square or surface_record lines)"),
                        })
                    }
                },
                "window" => match value {
                    "unit_cube" => window = Some(unit_cube()),
                    other => {
                        return Err(Error::Parse {
                            line: lineno,
                            col: 1,
                            msg: format!("unknown window '{other}'"),
                        })
                    }
                },
                "frame" => frame = Some(parse_f64_list(value, lineno, 3)?),
                "surface_record" => {
                    let doc = format!("chain dim=3 degree=2\n{value}\n");
                    let parsed = crate::chains::parse_chain(&doc).map_err(|err| match err {
                        Error::Parse { col, msg, .. } => Error::Parse { line: lineno, col, msg },
                        other => other,
                    })?;
                    surface_records.extend(parsed.terms().iter().cloned());
                }
                k => return Err(bad_key(k)),
            },
            Section::Controls => {
                let parse_num = |v: &str| -> Result<f64> {
                    v.parse().map_err(|_| Error::Parse {
                        line: lineno,
                        col: 1,
                        msg: format!("bad numeric value '{v}'"),
                    })
                };
                match key {
                    "depth" => controls.depth = parse_num(value)? as usize,
                    "fd_step" => controls.fd_step = parse_num(value)?,
                    "quad_order" => controls.quad_order = parse_num(value)? as usize,
                    "tolerance" => controls.tolerance = parse_num(value)?,
                    "time" => controls.time = parse_num(value)?,
                    "boost" => controls.boost = parse_f64_list(value, lineno, 3)?,
                    k => return Err(bad_key(k)),
                }
            }
            Section::None => {
                return Err(Error::Parse {
                    line: lineno,
                    col: 1,
                    msg: "key before any [section] header".into(),
                })
            }
        }
    }

    let mut surface = if !surface_records.is_empty() {
        Chain::from_terms(3, 2, surface_records)?
    } else {
        surface.unwrap_or_else(|| unit_square_z(0.0))
    };
    let default_frame = frame.unwrap_or_else(|| vec![0.0, 0.0, 1.0]);
    if surface.terms().iter().any(|(_, s)| s.outer_frame().is_none()) {
        surface = surface.with_uniform_frame(vec![default_frame]);
    }
    let window = window.unwrap_or_else(unit_cube);

    let motion = match motion_type.as_deref() {
        None | Some("static") => MotionSpec::Static,
        Some("translation") => MotionSpec::Translation(velocity.ok_or_else(|| Error::Parse {
            line: 1,
            col: 1,
            msg: "motion type 'translation' needs velocity = vx, vy, vz".into(),
        })?),
        Some("rotation_z") => MotionSpec::RotationZ(omega.ok_or_else(|| Error::Parse {
            line: 1,
            col: 1,
            msg: "motion type 'rotation_z' needs omega = value".into(),
        })?),
        Some("scaling") => MotionSpec::Scaling(rate.ok_or_else(|| Error::Parse {
            line: 1,
            col: 1,
            msg: "motion type 'scaling' needs rate = value".into(),
        })?),
        Some(other) => {
            return Err(Error::Parse {
                line: 1,
                col: 1,
                msg: format!("unknown motion type '{other}'"),
            })
        }
    };

    Ok(CustomSpec {
        e,
        b,
        h,
        d,
        j,
        rho,
        f_potential,
        v_e,
        motion,
        surface,
        window,
        controls,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn polynomial_grammar() {
        let p = parse_polynomial("3*x^2*y - 2*t + 0.5", 1).unwrap();
        assert_eq!(p.eval(&[2.0, 1.0, 0.0], 3.0), 12.0 - 6.0 + 0.5);
        let p = parse_polynomial("-x + (y - z)*2", 1).unwrap();
        assert_eq!(p.eval(&[1.0, 2.0, 3.0], 0.0), -1.0 + (2.0 - 3.0) * 2.0);
        let p = parse_polynomial("1e-3*x", 1).unwrap();
        assert!((p.eval(&[2.0, 0.0, 0.0], 0.0) - 2e-3).abs() < 1e-15);
    }

    #[test]
    fn polynomial_errors_carry_position() {
        match parse_polynomial("x + ", 7) {
            Err(Error::Parse { line, .. }) => assert_eq!(line, 7),
            other => panic!("expected parse error, got {other:?}"),
        }
        assert!(parse_polynomial("x^9", 1).is_err());
        match parse_polynomial("x $ y", 3) {
            Err(Error::Parse { col, .. }) => assert_eq!(col, 3),
            other => panic!("expected parse error, got {other:?}"),
        }
        assert!(parse_polynomial("x y", 1).is_err());
    }

    #[test]
    fn full_spec_parses() {
        let text = "\
# translating body as a custom spec
[fields]
b = 0, 0, 3
e = 0, -3, 0
f = -1.5*y, 1.5*x, 0
v_e = 0

[motion]
type = translation
velocity = 2, 0, 0

[chain]
surface = unit_square
frame = 0, 0, 1

[controls]
depth = 2
tolerance = 1e-4
boost = -2, 0, 0
";
        let spec = parse_spec(text).unwrap();
        assert!(spec.e.is_some() && spec.b.is_some() && spec.f_potential.is_some());
        assert_eq!(spec.motion, MotionSpec::Translation(vec![2.0, 0.0, 0.0]));
        assert_eq!(spec.controls.depth, 2);
        assert_eq!(spec.controls.boost, vec![-2.0, 0.0, 0.0]);
        assert_eq!(spec.surface.terms().len(), 2);
        assert!(spec.surface.terms().iter().all(|(_, s)| s.outer_frame().is_some()));
    }

    #[test]
    fn inline_surface_records() {
        let text = "\
[chain]
surface_record = 1 + | 0 0 0 | 1 0 0 | 0 1 0 ^ | 0 0 1
surface_record = -1 + | 0 0 0 | 0 1 0 | 0 0 1 ^ | 1 0 0
";
        let spec = parse_spec(text).unwrap();
        assert_eq!(spec.surface.terms().len(), 2);
        assert_eq!(spec.surface.terms()[1].0, -1);
    }

    #[test]
    fn unknown_keys_rejected() {
        assert!(parse_spec("[fields]\nq = 1, 2, 3\n").is_err());
        assert!(parse_spec("e = 1, 2, 3\n").is_err());
        assert!(parse_spec("[motion]\ntype = warp\n").is_err());
    }
}
