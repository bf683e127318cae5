//! JSON interchange format for polynomials.
//!
//! ```json
//! {"terms":[{"exp":-3,"re":0.5,"im":0.0}, {"exp":2,"re":1.0,"im":-1.0}]}
//! ```
//!
//! Exponents are unique and written in ascending order.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::Result;
use crate::poly::TrigPoly;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TermRecord {
    pub exp: i64,
    pub re: f64,
    pub im: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PolyRecord {
    pub terms: Vec<TermRecord>,
}

impl From<&TrigPoly> for PolyRecord {
    fn from(p: &TrigPoly) -> Self {
        PolyRecord {
            terms: p
                .terms()
                .map(|(exp, c)| TermRecord {
                    exp,
                    re: c.re,
                    im: c.im,
                })
                .collect(),
        }
    }
}

impl PolyRecord {
    pub fn to_poly(&self) -> Result<TrigPoly> {
        TrigPoly::from_terms(
            self.terms
                .iter()
                .map(|t| (t.exp, Complex64::new(t.re, t.im))),
        )
    }
}

pub fn to_json(p: &TrigPoly) -> String {
    serde_json::to_string(&PolyRecord::from(p)).expect("plain data serializes")
}

/// Parses the JSON format. The outer error carries serde's line/column.
pub fn from_json(text: &str) -> std::result::Result<Result<TrigPoly>, serde_json::Error> {
    let rec: PolyRecord = serde_json::from_str(text)?;
    Ok(rec.to_poly())
}
