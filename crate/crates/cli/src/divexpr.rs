//! Divisor expressions on X: `4*H13 + 2*E3 + 1/2*pull(t2)`. Coefficients are
//! nonnegative rationals, names are upstairs rigid curves or `pull(<name>)`
//! of a downstairs catalog curve.

use num_traits::{One, Signed};
use thiserror::Error;

use burniat_core::bicover::{CurveX, QDivisorX};
use burniat_core::rational::{parse_q, Q};
use burniat_core::surface::Catalog;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum DivExprError {
    #[error("column {col}: {msg}")]
    At { col: usize, msg: String },
    #[error("empty divisor expression")]
    Empty,
}

fn err(col: usize, msg: impl Into<String>) -> DivExprError {
    DivExprError::At { col: col + 1, msg: msg.into() }
}

pub fn parse_divexpr(cat: &Catalog, text: &str) -> Result<QDivisorX, DivExprError> {
    if text.trim().is_empty() {
        return Err(DivExprError::Empty);
    }
    let mut d = QDivisorX::new();
    let mut offset = 0;
    for chunk in text.split('+') {
        let start = offset + chunk.len() - chunk.trim_start().len();
        offset += chunk.len() + 1;
        let body = chunk.trim();
        if body.is_empty() {
            return Err(err(start, "missing term"));
        }
        let (coef, name, name_col) = match body.split_once('*') {
            Some((c, n)) => {
                let k = parse_q(c.trim()).ok_or_else(|| err(start, format!("bad coefficient `{}`", c.trim())))?;
                let lead = n.len() - n.trim_start().len();
                (k, n.trim(), start + c.len() + 1 + lead)
            }
            None => (Q::one(), body, start),
        };
        if coef.is_negative() {
            return Err(err(start, "coefficients must be nonnegative"));
        }
        d.add(curve(cat, name).map_err(|m| err(name_col, m))?, coef);
    }
    Ok(d)
}

fn curve(cat: &Catalog, name: &str) -> Result<CurveX, String> {
    if let Some(inner) = name.strip_prefix("pull(").and_then(|s| s.strip_suffix(')')) {
        let inner = inner.trim();
        let c = cat.lookup(inner).map_err(|_| format!("unknown curve `{inner}`"))?;
        return Ok(CurveX::pull(c.cls.clone(), inner));
    }
    CurveX::named(cat, name).map_err(|_| format!("unknown curve `{name}`"))
}

#[cfg(test)]
mod tests {
    use super::*;
    use burniat_core::rational::q;

    #[test]
    fn parses_sums() {
        let cat = Catalog::standard();
        let d = parse_divexpr(cat, "4*H13 + 2*E3 + 2*E1 + 2*H24").unwrap();
        assert_eq!(d.coef("H13"), q(4));
        assert_eq!(d.coef("E1"), q(2));
        let d = parse_divexpr(cat, "1/2*E1+H12").unwrap();
        assert_eq!(d.coef("H12"), q(1));
    }

    #[test]
    fn reports_positions() {
        let cat = Catalog::standard();
        assert_eq!(parse_divexpr(cat, "2*E1 + 3*E5").unwrap_err(), DivExprError::At { col: 10, msg: "unknown curve `E5`".into() });
        assert!(matches!(parse_divexpr(cat, "x*E1"), Err(DivExprError::At { col: 1, .. })));
        assert!(matches!(parse_divexpr(cat, "E1 + "), Err(DivExprError::At { .. })));
        assert_eq!(parse_divexpr(cat, "  "), Err(DivExprError::Empty));
    }

    #[test]
    fn pulled_back_mobile_curves() {
        let cat = Catalog::standard();
        let d = parse_divexpr(cat, "pull(t2)").unwrap();
        assert_eq!(d.terms().count(), 1);
    }
}
