//! TOML system files for the CLI: a chart declaration, form terms with
//! coefficient expressions, named distributions and sections, an optional
//! quotient declaration, and sampling/tolerance overrides.
//!
//! Coefficient expressions live in a small grammar: reals, coordinate names,
//! `+ - * / ^`, `sqrt(...)`, and parentheses. Exponents are integer
//! literals.
//!
//! ```toml
//! [chart]
//! base = ["x", "y"]
//! fiber = ["q", "px", "py", "u", "v", "w"]
//!
//! [[form.terms]]
//! coeff = "1"
//! covectors = ["q", "px", "y"]
//!
//! [distributions]
//! D1 = [["1","0","0","0","0","0","0","0"],
//!       ["0","1","0","0","0","0","0","0"],
//!       ["0","0","0","0","0","1","0","0"]]
//!
//! [sections.const]
//! q = "0.5"
//!
//! [quotient]
//! drop = ["v"]
//! beta = { v = 0.0 }
//!
//! [sampling]
//! points = 8
//! seed = 0
//! box = [-1.0, 1.0]
//! ```

use std::collections::BTreeMap;
use std::fmt::Write as _;

use serde::Deserialize;

use crate::error::{Error, Result};
use crate::exterior::{
    FiberedChart, FormField, FormValue, JetChartMeta, JetPairing, VectorField, VectorValue,
};
use crate::sections::Section;
use crate::solutions::Distribution;
use crate::system::{PremultisymplecticSystem, RunConfig};

// ---- expression grammar ----

#[derive(Debug, Clone, PartialEq)]
pub enum Expr {
    Num(f64),
    Var(usize),
    Add(Box<Expr>, Box<Expr>),
    Sub(Box<Expr>, Box<Expr>),
    Mul(Box<Expr>, Box<Expr>),
    Div(Box<Expr>, Box<Expr>),
    Pow(Box<Expr>, i32),
    Neg(Box<Expr>),
    Sqrt(Box<Expr>),
}

impl Expr {
    pub fn eval(&self, point: &[f64]) -> f64 {
        match self {
            Expr::Num(v) => *v,
            Expr::Var(i) => point[*i],
            Expr::Add(a, b) => a.eval(point) + b.eval(point),
            Expr::Sub(a, b) => a.eval(point) - b.eval(point),
            Expr::Mul(a, b) => a.eval(point) * b.eval(point),
            Expr::Div(a, b) => a.eval(point) / b.eval(point),
            Expr::Pow(a, k) => a.eval(point).powi(*k),
            Expr::Neg(a) => -a.eval(point),
            Expr::Sqrt(a) => a.eval(point).sqrt(),
        }
    }

    /// Replace selected variables with constants and remap the rest.
    pub fn substitute(
        &self,
        values: &BTreeMap<usize, f64>,
        remap: &BTreeMap<usize, usize>,
    ) -> Expr {
        match self {
            Expr::Num(v) => Expr::Num(*v),
            Expr::Var(i) => match values.get(i) {
                Some(v) => Expr::Num(*v),
                None => Expr::Var(remap[i]),
            },
            Expr::Add(a, b) => Expr::Add(
                Box::new(a.substitute(values, remap)),
                Box::new(b.substitute(values, remap)),
            ),
            Expr::Sub(a, b) => Expr::Sub(
                Box::new(a.substitute(values, remap)),
                Box::new(b.substitute(values, remap)),
            ),
            Expr::Mul(a, b) => Expr::Mul(
                Box::new(a.substitute(values, remap)),
                Box::new(b.substitute(values, remap)),
            ),
            Expr::Div(a, b) => Expr::Div(
                Box::new(a.substitute(values, remap)),
                Box::new(b.substitute(values, remap)),
            ),
            Expr::Pow(a, k) => Expr::Pow(Box::new(a.substitute(values, remap)), *k),
            Expr::Neg(a) => Expr::Neg(Box::new(a.substitute(values, remap))),
            Expr::Sqrt(a) => Expr::Sqrt(Box::new(a.substitute(values, remap))),
        }
    }

    pub fn render(&self, names: &[String]) -> String {
        match self {
            Expr::Num(v) => format!("{v}"),
            Expr::Var(i) => names[*i].clone(),
            Expr::Add(a, b) => format!("({} + {})", a.render(names), b.render(names)),
            Expr::Sub(a, b) => format!("({} - {})", a.render(names), b.render(names)),
            Expr::Mul(a, b) => format!("({} * {})", a.render(names), b.render(names)),
            Expr::Div(a, b) => format!("({} / {})", a.render(names), b.render(names)),
            Expr::Pow(a, k) => format!("({} ^ {})", a.render(names), k),
            Expr::Neg(a) => format!("(-{})", a.render(names)),
            Expr::Sqrt(a) => format!("sqrt({})", a.render(names)),
        }
    }
}

struct Parser<'a> {
    tokens: Vec<Token>,
    pos: usize,
    names: &'a [String],
}

#[derive(Debug, Clone, PartialEq)]
enum Token {
    Num(f64),
    Ident(String),
    Plus,
    Minus,
    Star,
    Slash,
    Caret,
    LParen,
    RParen,
}

fn tokenize(src: &str) -> Result<Vec<Token>> {
    let mut out = Vec::new();
    let chars: Vec<char> = src.chars().collect();
    let mut i = 0;
    while i < chars.len() {
        let c = chars[i];
        match c {
            ' ' | '\t' => i += 1,
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
            '^' => {
                out.push(Token::Caret);
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
                let v = text
                    .parse::<f64>()
                    .map_err(|_| Error::Parse(format!("bad number `{text}`")))?;
                out.push(Token::Num(v));
            }
            c if c.is_ascii_alphabetic() || c == '_' => {
                let start = i;
                while i < chars.len() && (chars[i].is_ascii_alphanumeric() || chars[i] == '_') {
                    i += 1;
                }
                out.push(Token::Ident(chars[start..i].iter().collect()));
            }
            other => return Err(Error::Parse(format!("unexpected character `{other}`"))),
        }
    }
    Ok(out)
}

impl<'a> Parser<'a> {
    fn peek(&self) -> Option<&Token> {
        self.tokens.get(self.pos)
    }

    fn bump(&mut self) -> Option<Token> {
        let t = self.tokens.get(self.pos).cloned();
        self.pos += 1;
        t
    }

    fn expect(&mut self, t: Token) -> Result<()> {
        match self.bump() {
            Some(got) if got == t => Ok(()),
            got => Err(Error::Parse(format!("expected {t:?}, got {got:?}"))),
        }
    }

    fn expr(&mut self) -> Result<Expr> {
        let mut lhs = self.term()?;
        while let Some(op) = self.peek().cloned() {
            match op {
                Token::Plus => {
                    self.bump();
                    lhs = Expr::Add(Box::new(lhs), Box::new(self.term()?));
                }
                Token::Minus => {
                    self.bump();
                    lhs = Expr::Sub(Box::new(lhs), Box::new(self.term()?));
                }
                _ => break,
            }
        }
        Ok(lhs)
    }

    fn term(&mut self) -> Result<Expr> {
        let mut lhs = self.unary()?;
        while let Some(op) = self.peek().cloned() {
            match op {
                Token::Star => {
                    self.bump();
                    lhs = Expr::Mul(Box::new(lhs), Box::new(self.unary()?));
                }
                Token::Slash => {
                    self.bump();
                    lhs = Expr::Div(Box::new(lhs), Box::new(self.unary()?));
                }
                _ => break,
            }
        }
        Ok(lhs)
    }

    fn unary(&mut self) -> Result<Expr> {
        if self.peek() == Some(&Token::Minus) {
            self.bump();
            return Ok(Expr::Neg(Box::new(self.unary()?)));
        }
        self.power()
    }

    fn power(&mut self) -> Result<Expr> {
        let base = self.atom()?;
        if self.peek() == Some(&Token::Caret) {
            self.bump();
            let negative = if self.peek() == Some(&Token::Minus) {
                self.bump();
                true
            } else {
                false
            };
            match self.bump() {
                Some(Token::Num(v)) if v.fract() == 0.0 => {
                    let k = v as i32;
                    return Ok(Expr::Pow(Box::new(base), if negative { -k } else { k }));
                }
                got => {
                    return Err(Error::Parse(format!(
                        "exponent must be an integer, got {got:?}"
                    )))
                }
            }
        }
        Ok(base)
    }

    fn atom(&mut self) -> Result<Expr> {
        match self.bump() {
            Some(Token::Num(v)) => Ok(Expr::Num(v)),
            Some(Token::Ident(name)) => {
                if name == "sqrt" {
                    self.expect(Token::LParen)?;
                    let inner = self.expr()?;
                    self.expect(Token::RParen)?;
                    return Ok(Expr::Sqrt(Box::new(inner)));
                }
                match self.names.iter().position(|n| *n == name) {
                    Some(idx) => Ok(Expr::Var(idx)),
                    None => Err(Error::Parse(format!("unknown coordinate `{name}`"))),
                }
            }
            Some(Token::LParen) => {
                let inner = self.expr()?;
                self.expect(Token::RParen)?;
                Ok(inner)
            }
            got => Err(Error::Parse(format!("unexpected token {got:?}"))),
        }
    }
}

/// Parse one expression against the chart's coordinate names.
pub fn parse_expr(src: &str, names: &[String]) -> Result<Expr> {
    let tokens = tokenize(src)?;
    let mut p = Parser {
        tokens,
        pos: 0,
        names,
    };
    let e = p.expr()?;
    if p.pos != p.tokens.len() {
        return Err(Error::Parse(format!("trailing input in `{src}`")));
    }
    Ok(e)
}

// ---- file schema ----

#[derive(Deserialize)]
struct RawFile {
    chart: RawChart,
    form: RawForm,
    #[serde(default)]
    distributions: BTreeMap<String, Vec<Vec<String>>>,
    #[serde(default)]
    sections: BTreeMap<String, BTreeMap<String, String>>,
    #[serde(default)]
    quotient: Option<RawQuotient>,
    #[serde(default)]
    sampling: Option<RawSampling>,
    #[serde(default)]
    tolerances: Option<RawTolerances>,
}

#[derive(Deserialize)]
struct RawChart {
    base: Vec<String>,
    fiber: Vec<String>,
    #[serde(default)]
    jet: Vec<RawJet>,
}

#[derive(Deserialize)]
struct RawJet {
    velocity: String,
    field: String,
    base: String,
}

#[derive(Deserialize)]
struct RawForm {
    terms: Vec<RawTerm>,
}

#[derive(Deserialize)]
struct RawTerm {
    coeff: String,
    covectors: Vec<String>,
}

#[derive(Deserialize)]
struct RawQuotient {
    drop: Vec<String>,
    #[serde(default)]
    beta: BTreeMap<String, f64>,
}

#[derive(Deserialize)]
struct RawSampling {
    points: Option<usize>,
    seed: Option<u64>,
    #[serde(rename = "box")]
    bounds: Option<[f64; 2]>,
}

#[derive(Deserialize)]
struct RawTolerances {
    algebraic: Option<f64>,
    fd: Option<f64>,
    fd_step: Option<f64>,
}

/// A parsed, resolved system file.
pub struct SystemFile {
    pub system: PremultisymplecticSystem,
    pub distributions: Vec<(String, Distribution)>,
    pub sections: Vec<(String, Section)>,
    /// (dropped indices, β values), when the file declares a quotient.
    pub quotient: Option<(Vec<usize>, Vec<f64>)>,
    terms: Vec<(Expr, Vec<usize>)>,
}

impl SystemFile {
    pub fn parse(src: &str) -> Result<SystemFile> {
        let raw: RawFile =
            toml::from_str(src).map_err(|e| Error::Parse(format!("system file: {e}")))?;
        let base: Vec<&str> = raw.chart.base.iter().map(|s| s.as_str()).collect();
        let fiber: Vec<&str> = raw.chart.fiber.iter().map(|s| s.as_str()).collect();
        let mut chart = FiberedChart::from_names(&base, &fiber);
        if !raw.chart.jet.is_empty() {
            let mut pairings = Vec::new();
            for j in &raw.chart.jet {
                let resolve = |n: &str| {
                    chart.index_of(n).ok_or_else(|| {
                        Error::Parse(format!("unknown coordinate `{n}` in jet pairing"))
                    })
                };
                pairings.push(JetPairing {
                    velocity: resolve(&j.velocity)?,
                    field: resolve(&j.field)?,
                    base: resolve(&j.base)?,
                });
            }
            chart = chart.with_jet(JetChartMeta::new(pairings));
        }
        let names = chart.names().to_vec();
        let dim = chart.dim();
        let degree = chart.base_dim() + 1;

        let mut terms = Vec::new();
        for t in &raw.form.terms {
            let coeff = parse_expr(&t.coeff, &names)?;
            if t.covectors.len() != degree {
                return Err(Error::Parse(format!(
                    "form terms need {degree} covectors, got {}",
                    t.covectors.len()
                )));
            }
            let idx: Vec<usize> = t
                .covectors
                .iter()
                .map(|n| {
                    chart
                        .index_of(n)
                        .ok_or_else(|| Error::Parse(format!("unknown covector `{n}`")))
                })
                .collect::<Result<_>>()?;
            terms.push((coeff, idx));
        }
        let eval_terms = terms.clone();
        let omega = FormField::new(chart.clone(), degree, move |p| {
            let mut w = FormValue::zero(dim, degree);
            for (coeff, idx) in &eval_terms {
                w.add_term(idx, coeff.eval(p));
            }
            w
        });
        let system = PremultisymplecticSystem::new("file", omega);

        let mut distributions = Vec::new();
        for (name, gens) in &raw.distributions {
            if name.trim().is_empty() {
                return Err(Error::Parse("empty distribution name".into()));
            }
            let mut fields = Vec::new();
            for gen in gens {
                if gen.len() != dim {
                    return Err(Error::Parse(format!(
                        "generator in `{name}` needs {dim} components, got {}",
                        gen.len()
                    )));
                }
                let comps: Vec<Expr> = gen
                    .iter()
                    .map(|e| parse_expr(e, &names))
                    .collect::<Result<_>>()?;
                fields.push(VectorField::new(chart.clone(), move |p| {
                    VectorValue::new(comps.iter().map(|e| e.eval(p)).collect())
                }));
            }
            distributions.push((name.clone(), Distribution::new(chart.clone(), fields)));
        }

        let mut sections = Vec::new();
        for (name, comps) in &raw.sections {
            let m = chart.base_dim();
            let mut fiber_exprs: Vec<Expr> = Vec::new();
            for i in m..dim {
                let coord = chart.name(i);
                let src = comps.get(coord).map(|s| s.as_str()).unwrap_or("0");
                // section components are functions of the base coordinates
                let expr = parse_expr(src, &names)?;
                fiber_exprs.push(expr);
            }
            sections.push((
                name.clone(),
                Section::from_fiber_map(chart.clone(), move |x| {
                    // pad the base point so Var indices line up with the chart
                    let mut padded = x.to_vec();
                    padded.resize(dim, 0.0);
                    fiber_exprs.iter().map(|e| e.eval(&padded)).collect()
                }),
            ));
        }

        let quotient = match &raw.quotient {
            None => None,
            Some(q) => {
                let mut dropped = Vec::new();
                let mut beta = Vec::new();
                for name in &q.drop {
                    let idx = chart.index_of(name).ok_or_else(|| {
                        Error::Parse(format!("unknown coordinate `{name}` in quotient"))
                    })?;
                    dropped.push(idx);
                    beta.push(q.beta.get(name).copied().unwrap_or(0.0));
                }
                let mut paired: Vec<(usize, f64)> = dropped.into_iter().zip(beta).collect();
                paired.sort_by_key(|(i, _)| *i);
                Some(paired.into_iter().unzip())
            }
        };

        Ok(SystemFile {
            system,
            distributions,
            sections,
            quotient,
            terms,
        })
    }

    pub fn distribution(&self, name: &str) -> Option<&Distribution> {
        self.distributions
            .iter()
            .find(|(n, _)| n == name)
            .map(|(_, d)| d)
    }

    pub fn section(&self, name: &str) -> Option<&Section> {
        self.sections
            .iter()
            .find(|(n, _)| n == name)
            .map(|(_, s)| s)
    }

    /// Fold sampling/tolerance overrides from the file into a config.
    pub fn apply_overrides(&self, src: &str, cfg: &mut RunConfig) -> Result<()> {
        let raw: RawFile =
            toml::from_str(src).map_err(|e| Error::Parse(format!("system file: {e}")))?;
        if let Some(s) = raw.sampling {
            if let Some(p) = s.points {
                cfg.points = p;
            }
            if let Some(seed) = s.seed {
                cfg.seed = seed;
            }
            if let Some([lo, hi]) = s.bounds {
                cfg.box_lo = lo;
                cfg.box_hi = hi;
            }
        }
        if let Some(t) = raw.tolerances {
            if let Some(v) = t.algebraic {
                cfg.tol.algebraic = v;
            }
            if let Some(v) = t.fd {
                cfg.tol.fd = v;
            }
            if let Some(v) = t.fd_step {
                cfg.tol.fd_step = v;
            }
        }
        Ok(())
    }

    /// Emit the reduced system (coefficients with the dropped coordinates
    /// replaced by their slice values, terms touching dropped covectors
    /// removed) as a new system file.
    pub fn emit_reduced(&self, dropped: &[usize], beta: &[f64]) -> Result<String> {
        let chart = self.system.chart();
        let values: BTreeMap<usize, f64> =
            dropped.iter().copied().zip(beta.iter().copied()).collect();
        let keep: Vec<usize> = (0..chart.dim()).filter(|i| !dropped.contains(i)).collect();
        let remap: BTreeMap<usize, usize> = keep
            .iter()
            .enumerate()
            .map(|(new, &old)| (old, new))
            .collect();
        let names: Vec<String> = keep.iter().map(|&i| chart.name(i).to_string()).collect();
        let m = chart.base_dim();

        let mut out = String::new();
        let _ = writeln!(out, "[chart]");
        let base_names: Vec<String> = names[..m].iter().map(|n| format!("\"{n}\"")).collect();
        let fiber_names: Vec<String> = names[m..].iter().map(|n| format!("\"{n}\"")).collect();
        let _ = writeln!(out, "base = [{}]", base_names.join(", "));
        let _ = writeln!(out, "fiber = [{}]", fiber_names.join(", "));
        for (coeff, idx) in &self.terms {
            if idx.iter().any(|i| dropped.contains(i)) {
                continue;
            }
            let new_coeff = coeff.substitute(&values, &remap);
            let covs: Vec<String> = idx
                .iter()
                .map(|&i| format!("\"{}\"", names[remap[&i]]))
                .collect();
            let _ = writeln!(out, "\n[[form.terms]]");
            let _ = writeln!(out, "coeff = \"{}\"", new_coeff.render(&names));
            let _ = writeln!(out, "covectors = [{}]", covs.join(", "));
        }
        Ok(out)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn names() -> Vec<String> {
        vec!["x".into(), "y".into(), "q".into()]
    }

    #[test]
    fn expression_grammar_round_trip() {
        let e = parse_expr("-x*(y + 2)^2 / sqrt(q) + 1.5e-1", &names()).unwrap();
        let v = e.eval(&[2.0, 1.0, 4.0]);
        assert!((v - (-2.0 * 9.0 / 2.0 + 0.15)).abs() < 1e-12);
    }

    #[test]
    fn unknown_name_is_a_parse_error() {
        assert!(parse_expr("x + zz", &names()).is_err());
        assert!(parse_expr("x +", &names()).is_err());
        assert!(parse_expr("x ^ y", &names()).is_err());
    }

    const R8_TOML: &str = r#"
[chart]
base = ["x", "y"]
fiber = ["q", "px", "py", "u", "v", "w"]

[[form.terms]]
coeff = "1"
covectors = ["q", "px", "y"]

[[form.terms]]
coeff = "-1"
covectors = ["q", "py", "x"]

[[form.terms]]
coeff = "1"
covectors = ["q", "u", "w"]

[distributions]
D1 = [["1","0","0","0","0","0","0","0"],
      ["0","1","0","0","0","0","0","0"],
      ["0","0","0","0","0","1","0","0"]]

[sections.const]
q = "0.5"
px = "1.25"

[quotient]
drop = ["v"]
beta = { v = 0.0 }
"#;

    #[test]
    fn r8_file_matches_builtin_model() {
        let file = SystemFile::parse(R8_TOML).unwrap();
        let builtin = crate::models::simple::r8();
        let p = vec![0.3, -0.2, 0.7, 0.1, -0.5, 0.9, 0.4, -0.8];
        let a = file.system.omega().at(&p);
        let b = builtin.system.omega().at(&p);
        assert!(a.sub(&b).max_norm() == 0.0);
        assert!(file.distribution("D1").is_some());
        let s = file.section("const").unwrap();
        assert_eq!(
            s.at(&[0.1, 0.2]),
            vec![0.1, 0.2, 0.5, 1.25, 0.0, 0.0, 0.0, 0.0]
        );
        assert_eq!(file.quotient, Some((vec![6], vec![0.0])));
    }

    #[test]
    fn reduced_emission_drops_terms_and_substitutes() {
        let src = r#"
[chart]
base = ["x"]
fiber = ["q", "v"]

[[form.terms]]
coeff = "q + v"
covectors = ["q", "x"]

[[form.terms]]
coeff = "1"
covectors = ["v", "x"]
"#;
        let file = SystemFile::parse(src).unwrap();
        let emitted = file.emit_reduced(&[2], &[3.0]).unwrap();
        assert!(emitted.contains("fiber = [\"q\"]"));
        assert!(emitted.contains("(q + 3)"));
        // the dv∧dx term is gone
        assert_eq!(emitted.matches("[[form.terms]]").count(), 1);
        // emitted file parses again
        let reparsed = SystemFile::parse(&emitted).unwrap();
        assert_eq!(reparsed.system.dim(), 2);
    }
}
