//! JSON symbol files.
//!
//! ```json
//! {"dim": 1, "representation": "poly",
//!  "terms": [{"x": [1], "xi": [1], "re": "1", "im": "0"}]}
//! ```
//!
//! Rational symbols add `base` (a term list) and `power`; expression
//! symbols carry `expr`; amplitudes add `y` to every term. Optional `tau`,
//! `convention` and `two_pi_power` record the quantization.

use std::fs;
use std::path::Path;
use std::sync::Arc;

use psdo_core::calculus::{Convention, QuantizedSymbol};
use psdo_core::scalar::{exact, format_rational, parse_rational, Exact};
use psdo_core::symbol::{Amplitude, ExprSymbol, PolySymbol, RationalSymbol, TauParams};
use serde::{Deserialize, Serialize};

#[derive(Debug, thiserror::Error)]
pub enum FormatError {
    #[error("{path}: line {line}, column {column}: {msg}")]
    Json { path: String, line: usize, column: usize, msg: String },
    #[error("{path}: {msg}")]
    Invalid { path: String, msg: String },
    #[error("{path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Representation {
    Poly,
    Rational,
    Expr,
    Amplitude,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TermRecord {
    pub x: Vec<u32>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub y: Option<Vec<u32>>,
    pub xi: Vec<u32>,
    pub re: String,
    pub im: String,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SymbolFile {
    pub dim: usize,
    pub representation: Representation,
    #[serde(default)]
    pub terms: Vec<TermRecord>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub base: Option<Vec<TermRecord>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub power: Option<u32>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub expr: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub tau: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub convention: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub two_pi_power: Option<u32>,
}

/// A parsed symbol file.
#[derive(Clone, Debug)]
pub enum LoadedSymbol {
    Poly(PolySymbol<Exact>),
    Rational(RationalSymbol<Exact>),
    Expr(ExprSymbol),
    Amplitude(Amplitude<Exact>),
}

fn record(x: Vec<u32>, y: Option<Vec<u32>>, xi: Vec<u32>, c: &Exact) -> TermRecord {
    TermRecord { x, y, xi, re: format_rational(&c.re), im: format_rational(&c.im) }
}

fn poly_records(p: &PolySymbol<Exact>) -> Vec<TermRecord> {
    p.terms().map(|(a, b, c)| record(a.0, None, b.0, c)).collect()
}

impl SymbolFile {
    fn bare(dim: usize, representation: Representation) -> Self {
        SymbolFile {
            dim,
            representation,
            terms: Vec::new(),
            base: None,
            power: None,
            expr: None,
            tau: None,
            convention: None,
            two_pi_power: None,
        }
    }

    pub fn from_poly(p: &PolySymbol<Exact>) -> Self {
        SymbolFile { terms: poly_records(p), ..Self::bare(p.dim(), Representation::Poly) }
    }

    pub fn from_rational(r: &RationalSymbol<Exact>) -> Self {
        SymbolFile {
            terms: poly_records(r.numerator()),
            base: Some(poly_records(r.base())),
            power: Some(r.power()),
            ..Self::bare(r.dim(), Representation::Rational)
        }
    }

    pub fn from_expr(e: &ExprSymbol, d: usize) -> Self {
        SymbolFile { expr: Some(e.source().to_string()), ..Self::bare(d, Representation::Expr) }
    }

    pub fn from_amplitude(a: &Amplitude<Exact>) -> Self {
        let terms = a.terms().map(|(x, y, xi, c)| record(x.0, Some(y.0), xi.0, c)).collect();
        SymbolFile { terms, ..Self::bare(a.dim(), Representation::Amplitude) }
    }

    pub fn from_quantized(q: &QuantizedSymbol<Exact>) -> Self {
        let convention = match q.convention {
            Convention::Normalized => "normalized",
            Convention::Paper => "paper",
        };
        SymbolFile {
            tau: Some(format_rational(q.tau.tau())),
            convention: Some(convention.to_string()),
            two_pi_power: (q.two_pi_power > 0).then_some(q.two_pi_power),
            ..Self::from_poly(&q.symbol)
        }
    }

    pub fn parse(text: &str, path: &str) -> Result<Self, FormatError> {
        serde_json::from_str(text).map_err(|e| FormatError::Json {
            path: path.to_string(),
            line: e.line(),
            column: e.column(),
            msg: e.to_string(),
        })
    }

    pub fn read(path: &Path) -> Result<Self, FormatError> {
        let p = path.display().to_string();
        let text = fs::read_to_string(path).map_err(|source| FormatError::Io { path: p.clone(), source })?;
        Self::parse(&text, &p)
    }

    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("plain data");
        s.push('\n');
        s
    }

    pub fn write(&self, path: &Path) -> Result<(), FormatError> {
        fs::write(path, self.to_json()).map_err(|source| FormatError::Io { path: path.display().to_string(), source })
    }

    fn invalid(&self, path: &str, msg: impl Into<String>) -> FormatError {
        FormatError::Invalid { path: path.to_string(), msg: msg.into() }
    }

    fn coefficient(&self, path: &str, i: usize, t: &TermRecord) -> Result<Exact, FormatError> {
        let re = parse_rational(&t.re).map_err(|e| self.invalid(path, format!("term {i}: re: {e}")))?;
        let im = parse_rational(&t.im).map_err(|e| self.invalid(path, format!("term {i}: im: {e}")))?;
        Ok(exact(re, im))
    }

    fn poly_from(&self, path: &str, terms: &[TermRecord]) -> Result<PolySymbol<Exact>, FormatError> {
        let mut out = Vec::with_capacity(terms.len());
        for (i, t) in terms.iter().enumerate() {
            if t.x.len() != self.dim || t.xi.len() != self.dim {
                return Err(self.invalid(path, format!("term {i}: multi-index length differs from dim {}", self.dim)));
            }
            if t.y.is_some() {
                return Err(self.invalid(path, format!("term {i}: y exponents only belong in amplitudes")));
            }
            out.push((t.x.clone(), t.xi.clone(), self.coefficient(path, i, t)?));
        }
        PolySymbol::from_terms(self.dim, out).map_err(|e| self.invalid(path, e.to_string()))
    }

    /// Builds the in-memory symbol; `path` only labels errors.
    pub fn to_symbol(&self, path: &str) -> Result<LoadedSymbol, FormatError> {
        if self.dim == 0 {
            return Err(self.invalid(path, "dim must be positive"));
        }
        match self.representation {
            Representation::Poly => Ok(LoadedSymbol::Poly(self.poly_from(path, &self.terms)?)),
            Representation::Rational => {
                let base = self.base.as_ref().ok_or_else(|| self.invalid(path, "rational symbol without base"))?;
                let power = self.power.ok_or_else(|| self.invalid(path, "rational symbol without power"))?;
                let base = Arc::new(self.poly_from(path, base)?);
                let num = self.poly_from(path, &self.terms)?;
                RationalSymbol::new(num, base, power)
                    .map(LoadedSymbol::Rational)
                    .map_err(|e| self.invalid(path, e.to_string()))
            }
            Representation::Expr => {
                let src = self.expr.as_ref().ok_or_else(|| self.invalid(path, "expression symbol without expr"))?;
                ExprSymbol::parse(src, self.dim).map(LoadedSymbol::Expr).map_err(|e| self.invalid(path, e.to_string()))
            }
            Representation::Amplitude => {
                let mut out = Vec::with_capacity(self.terms.len());
                for (i, t) in self.terms.iter().enumerate() {
                    let y =
                        t.y.as_ref()
                            .ok_or_else(|| self.invalid(path, format!("term {i}: amplitude term without y")))?;
                    if t.x.len() != self.dim || t.xi.len() != self.dim || y.len() != self.dim {
                        return Err(
                            self.invalid(path, format!("term {i}: multi-index length differs from dim {}", self.dim))
                        );
                    }
                    out.push((t.x.clone(), y.clone(), t.xi.clone(), self.coefficient(path, i, t)?));
                }
                Amplitude::from_terms(self.dim, out)
                    .map(LoadedSymbol::Amplitude)
                    .map_err(|e| self.invalid(path, e.to_string()))
            }
        }
    }

    /// A polynomial symbol with its recorded quantization; `tau` overrides
    /// the file's value, which defaults to 0.
    pub fn to_quantized(&self, path: &str, tau: Option<&TauParams>) -> Result<QuantizedSymbol<Exact>, FormatError> {
        let LoadedSymbol::Poly(p) = self.to_symbol(path)? else {
            return Err(self.invalid(path, "a polynomial symbol is required"));
        };
        let tau = match (tau, &self.tau) {
            (Some(t), _) => t.clone(),
            (None, Some(s)) => TauParams::parse(s).map_err(|e| self.invalid(path, format!("tau: {e}")))?,
            (None, None) => TauParams::parse("0").expect("literal"),
        };
        let convention = match &self.convention {
            Some(c) => c.parse().map_err(|e: psdo_core::Error| self.invalid(path, e.to_string()))?,
            None => Convention::Normalized,
        };
        Ok(QuantizedSymbol { symbol: p, tau, convention, two_pi_power: self.two_pi_power.unwrap_or(0) })
    }
}

impl LoadedSymbol {
    pub fn to_file(&self) -> SymbolFile {
        match self {
            LoadedSymbol::Poly(p) => SymbolFile::from_poly(p),
            LoadedSymbol::Rational(r) => SymbolFile::from_rational(r),
            LoadedSymbol::Expr(e) => SymbolFile::from_expr(e, psdo_core::symbol::PointSymbol::dim(e)),
            LoadedSymbol::Amplitude(a) => SymbolFile::from_amplitude(a),
        }
    }
}

/// Reads and parses a symbol file in one step.
pub fn load_symbol(path: &Path) -> Result<(SymbolFile, LoadedSymbol), FormatError> {
    let f = SymbolFile::read(path)?;
    let s = f.to_symbol(&path.display().to_string())?;
    Ok((f, s))
}

#[cfg(test)]
mod tests {
    use super::*;
    use psdo_core::scalar::{rational, Scalar};

    #[test]
    fn poly_round_trip_is_byte_exact() {
        let x = PolySymbol::<Exact>::x(1, 0);
        let xi = PolySymbol::xi(1, 0);
        let p = x.mul(&xi).add(&PolySymbol::constant(1, exact(rational(0, 1), rational(1, 2))));
        let text = SymbolFile::from_poly(&p).to_json();
        let back = SymbolFile::parse(&text, "mem").unwrap();
        let LoadedSymbol::Poly(q) = back.to_symbol("mem").unwrap() else { panic!() };
        assert_eq!(p, q);
        assert_eq!(SymbolFile::from_poly(&q).to_json(), text);
    }

    #[test]
    fn bad_multi_index_rejected() {
        let text = r#"{"dim": 2, "representation": "poly", "terms": [{"x": [1], "xi": [0, 1], "re": "1", "im": "0"}]}"#;
        let f = SymbolFile::parse(text, "f.json").unwrap();
        let err = f.to_symbol("f.json").unwrap_err().to_string();
        assert!(err.contains("term 0"), "{err}");
    }

    #[test]
    fn json_errors_carry_line() {
        let err = SymbolFile::parse("{\n\"dim\": 1,\n\"representation\": \"poly\",\n\"terms\": [oops]}", "f.json")
            .unwrap_err();
        assert!(matches!(err, FormatError::Json { line: 4, .. }), "{err}");
    }

    #[test]
    fn rational_and_amplitude_round_trip() {
        let base = Arc::new(PolySymbol::<Exact>::one(1).add(&PolySymbol::x(1, 0).pow(2)));
        let r = RationalSymbol::new(PolySymbol::xi(1, 0).scale(&Exact::from_int(-2)), base, 2).unwrap();
        let f = SymbolFile::from_rational(&r);
        let LoadedSymbol::Rational(r2) = SymbolFile::parse(&f.to_json(), "m").unwrap().to_symbol("m").unwrap() else {
            panic!()
        };
        assert!(r.value_eq(&r2).unwrap());
        let amp = Amplitude::from_terms(1, [(vec![0], vec![1], vec![1], Exact::from_int(3))]).unwrap();
        let f = SymbolFile::from_amplitude(&amp);
        let text = f.to_json();
        let LoadedSymbol::Amplitude(a2) = SymbolFile::parse(&text, "m").unwrap().to_symbol("m").unwrap() else {
            panic!()
        };
        assert_eq!(SymbolFile::from_amplitude(&a2).to_json(), text);
    }
}
