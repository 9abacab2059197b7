//! JSON and CSV shapes for coefficient tables, exponential polynomials and
//! Monte Carlo results. Rationals travel as `"p/q"` strings.

use std::io::Write;
use std::str::FromStr;

use anyhow::{anyhow, bail, Context};
use jacobi_core::coefficients::{CoeffTable, LimitParams, Route};
use jacobi_core::moments::ExpPoly;
use jacobi_core::Rational;
use serde::{Deserialize, Serialize};

use crate::mc::MomentEstimate;

/// Parses `"p/q"` or `"p"` exactly. Decimal points are rejected.
pub fn parse_rational(s: &str) -> anyhow::Result<Rational> {
    let s = s.trim();
    let (num, den) = match s.split_once('/') {
        Some((n, d)) => (n.trim(), d.trim()),
        None => (s, "1"),
    };
    let num = num_bigint(num).with_context(|| format!("bad numerator in {s:?}"))?;
    let den = num_bigint(den).with_context(|| format!("bad denominator in {s:?}"))?;
    if den == 0.into() {
        bail!("zero denominator in {s:?}");
    }
    Ok(Rational::new(num, den))
}

fn num_bigint(s: &str) -> anyhow::Result<num_bigint::BigInt> {
    num_bigint::BigInt::from_str(s).map_err(|e| anyhow!("{e}"))
}

pub fn format_rational(r: &Rational) -> String {
    format!("{}/{}", r.numer(), r.denom())
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CoeffEntryJson {
    pub n: u32,
    pub h: u32,
    pub l: u32,
    pub value: String,
    pub route: String,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CoeffTableJson {
    pub lambda: String,
    pub theta: String,
    pub entries: Vec<CoeffEntryJson>,
}

impl CoeffTableJson {
    pub fn from_table(table: &CoeffTable) -> Self {
        Self::from_filtered(table, |_| true)
    }

    /// Keeps the entries whose `(n, h, l)` passes `keep`, in index order.
    pub fn from_filtered(table: &CoeffTable, keep: impl Fn((u32, u32, u32)) -> bool) -> Self {
        let entries = table
            .iter()
            .filter(|(k, _)| keep(**k))
            .map(|(&(n, h, l), e)| CoeffEntryJson {
                n,
                h,
                l,
                value: format_rational(&e.value),
                route: e.route.as_str().to_string(),
            })
            .collect();
        Self {
            lambda: format_rational(table.params().lambda()),
            theta: format_rational(table.params().theta()),
            entries,
        }
    }

    pub fn to_table(&self) -> anyhow::Result<CoeffTable> {
        let params = LimitParams::new(parse_rational(&self.lambda)?, parse_rational(&self.theta)?)?;
        let mut table = CoeffTable::new(params);
        for e in &self.entries {
            let route = Route::from_str(&e.route)?;
            table.insert(e.n, e.h, e.l, parse_rational(&e.value)?, route)?;
        }
        Ok(table)
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct TermJson {
    pub coef: String,
    pub rate: String,
    pub power: u32,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ExpPolyJson {
    pub terms: Vec<TermJson>,
}

impl ExpPolyJson {
    pub fn from_exp_poly(e: &ExpPoly) -> Self {
        let terms = e
            .terms()
            .map(|(coef, rate, power)| TermJson { coef: format_rational(coef), rate: format_rational(rate), power })
            .collect();
        Self { terms }
    }

    pub fn to_exp_poly(&self) -> anyhow::Result<ExpPoly> {
        let mut e = ExpPoly::zero();
        for t in &self.terms {
            e.add_term(parse_rational(&t.coef)?, parse_rational(&t.rate)?, t.power);
        }
        Ok(e)
    }
}

/// A column header and one row of floats per grid point.
#[derive(Clone, Debug, PartialEq)]
pub struct Grid {
    pub header: Vec<String>,
    pub rows: Vec<Vec<f64>>,
}

pub fn write_csv<W: Write>(grid: &Grid, out: W) -> anyhow::Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(&grid.header)?;
    for row in &grid.rows {
        w.write_record(row.iter().map(|x| x.to_string()))?;
    }
    w.flush()?;
    Ok(())
}

pub fn read_csv(input: &str) -> anyhow::Result<Grid> {
    let mut r = csv::Reader::from_reader(input.as_bytes());
    let header = r.headers()?.iter().map(str::to_string).collect();
    let mut rows = Vec::new();
    for rec in r.records() {
        rows.push(rec?.iter().map(f64::from_str).collect::<Result<Vec<_>, _>>()?);
    }
    Ok(Grid { header, rows })
}

pub fn estimates_grid(moments: &[MomentEstimate]) -> Grid {
    Grid {
        header: vec!["n".into(), "mean".into(), "stderr".into()],
        rows: moments.iter().map(|e| vec![f64::from(e.n), e.mean, e.stderr]).collect(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use jacobi_core::exact::{int, rat};

    #[test]
    fn rational_strings() {
        assert_eq!(parse_rational("3/6").unwrap(), rat(1, 2));
        assert_eq!(parse_rational(" -4 ").unwrap(), int(-4));
        assert_eq!(parse_rational("2/-4").unwrap(), rat(-1, 2));
        assert!(parse_rational("0.5").is_err());
        assert!(parse_rational("1/0").is_err());
        assert!(parse_rational("x").is_err());
        assert_eq!(format_rational(&int(3)), "3/1");
        assert_eq!(format_rational(&rat(-2, 6)), "-1/3");
    }

    #[test]
    fn exp_poly_schema() {
        let mut e = ExpPoly::zero();
        e.add_term(rat(1, 2), int(1), 0);
        e.add_term(int(-3), rat(5, 2), 2);
        let json = serde_json::to_string(&ExpPolyJson::from_exp_poly(&e)).unwrap();
        assert_eq!(
            json,
            r#"{"terms":[{"coef":"1/2","rate":"1/1","power":0},{"coef":"-3/1","rate":"5/2","power":2}]}"#
        );
        let back: ExpPolyJson = serde_json::from_str(&json).unwrap();
        assert_eq!(back.to_exp_poly().unwrap(), e);
    }

    #[test]
    fn csv_layout() {
        let grid = Grid { header: vec!["t".into(), "M_1".into()], rows: vec![vec![0.0, 2.0], vec![0.5, 1.25]] };
        let mut buf = Vec::new();
        write_csv(&grid, &mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        assert_eq!(text, "t,M_1\n0,2\n0.5,1.25\n");
        assert_eq!(read_csv(&text).unwrap(), grid);
    }
}
