//! Published table values shipped with the binary, known misprints, and the
//! rules used to compare regenerated cells against them.

use std::sync::OnceLock;

use serde::{Deserialize, Serialize};

const RAW: &str = include_str!("../data/reference.json");

#[derive(Debug, Clone, Deserialize)]
pub struct Reference {
    pub t1: T1,
    pub t2: T2,
    pub t3: T3,
    pub t4: T4,
    pub t5: T5,
    pub curves: Curves,
    pub errata: Vec<Erratum>,
}

#[derive(Debug, Clone, Deserialize)]
pub struct T1 {
    pub x: f64,
    pub cases: Vec<T1Case>,
}

#[derive(Debug, Clone, Deserialize)]
pub struct T1Case {
    pub lambda: f64,
    pub a: f64,
    pub u0: String,
    pub coefficients: Vec<String>,
    pub errors: Vec<String>,
}

#[derive(Debug, Clone, Deserialize)]
pub struct T2 {
    pub x: f64,
    pub lambda: f64,
    pub a: f64,
    pub u0: [String; 2],
    pub coefficients: Vec<[String; 2]>,
    pub errors: Vec<String>,
}

#[derive(Debug, Clone, Deserialize)]
pub struct T3 {
    pub x: f64,
    pub k: Vec<usize>,
    pub columns: Vec<T3Column>,
}

#[derive(Debug, Clone, Deserialize)]
pub struct T3Column {
    pub lambda: f64,
    pub errors: Vec<String>,
}

#[derive(Debug, Clone, Deserialize)]
pub struct T4 {
    pub x: f64,
    pub columns: Vec<T4Column>,
}

#[derive(Debug, Clone, Deserialize)]
pub struct T4Column {
    pub lambda: f64,
    pub a: f64,
    pub n_pairs: usize,
    pub errors: Vec<String>,
}

#[derive(Debug, Clone, Deserialize)]
pub struct T5 {
    pub a: f64,
    pub rows: Vec<T5Row>,
}

#[derive(Debug, Clone, Deserialize)]
pub struct T5Row {
    pub lambda: f64,
    pub n_pairs: usize,
    pub x: f64,
    pub delta_w: String,
    pub i1: String,
    pub w: String,
}

#[derive(Debug, Clone, Deserialize)]
pub struct Curves {
    pub double_saddle_max: CurvePoint,
    pub stokes_first_pair: CurvePoint,
}

#[derive(Debug, Clone, Deserialize)]
pub struct CurvePoint {
    pub lambda: f64,
    pub a: f64,
    pub tolerance: f64,
}

/// A published cell known to be wrong, with the value it should have had.
#[derive(Debug, Clone, Deserialize, Serialize)]
pub struct Erratum {
    pub table: String,
    pub lambda: f64,
    #[serde(default)]
    pub k: Option<usize>,
    #[serde(default)]
    pub x: Option<f64>,
    /// Column name for non-error cells ("n_pairs", "delta_w", "i1").
    #[serde(default)]
    pub field: Option<String>,
    pub corrected: String,
    pub note: String,
}

pub fn reference() -> &'static Reference {
    static REF: OnceLock<Reference> = OnceLock::new();
    REF.get_or_init(|| serde_json::from_str(RAW).expect("embedded reference data is valid"))
}

/// Location of a cell for errata lookup.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CellKey<'a> {
    pub table: &'a str,
    pub lambda: f64,
    pub k: Option<usize>,
    pub x: Option<f64>,
    pub field: Option<&'a str>,
}

pub fn erratum(key: CellKey<'_>) -> Option<&'static Erratum> {
    reference().errata.iter().find(|e| {
        e.table == key.table
            && e.lambda == key.lambda
            && e.k == key.k
            && (e.x.is_none() || e.x == key.x)
            && e.field.as_deref() == key.field
    })
}

/// How a regenerated value is compared with a printed one.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(tag = "kind", content = "value", rename_all = "snake_case")]
pub enum Tolerance {
    /// |c − r| ≤ tol·|r|.
    Relative(f64),
    /// |c − r| ≤ tol.
    Absolute(f64),
    /// Within one unit in the n-th significant figure of the printed value.
    SigFigs(usize),
    /// Within one unit in the last printed digit.
    PrintedDigits,
    Exact,
}

pub fn parse_printed(s: &str) -> f64 {
    s.parse().unwrap_or_else(|_| panic!("bad reference number {s:?}"))
}

/// One unit in the last place of a printed decimal like "-1.284463e-4".
pub fn last_place(s: &str) -> f64 {
    let (mantissa, exp) = match s.find(['e', 'E']) {
        Some(i) => (&s[..i], s[i + 1..].parse::<i32>().expect("bad exponent")),
        None => (s, 0),
    };
    let decimals = mantissa.find('.').map_or(0, |i| mantissa.len() - i - 1) as i32;
    10f64.powi(exp - decimals)
}

/// One unit in the n-th significant figure of `v`.
pub fn sig_unit(v: f64, figs: usize) -> f64 {
    10f64.powi(v.abs().log10().floor() as i32 + 1 - figs as i32)
}

/// Whether `computed` matches the printed value `printed` under `tol`, and
/// the deviation reported for the cell.
pub fn compare(computed: f64, printed: &str, tol: Tolerance) -> (bool, f64) {
    let r = parse_printed(printed);
    let rel = if r == 0.0 { (computed - r).abs() } else { ((computed - r) / r).abs() };
    let ok = match tol {
        Tolerance::Relative(t) => rel <= t,
        Tolerance::Absolute(t) => (computed - r).abs() <= t,
        Tolerance::SigFigs(n) => (computed - r).abs() <= sig_unit(r, n) * (1.0 + 1e-9),
        Tolerance::PrintedDigits => (computed - r).abs() <= last_place(printed) * (1.0 + 1e-9),
        Tolerance::Exact => computed == r,
    };
    (ok, rel)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn embedded_data_parses() {
        let r = reference();
        assert_eq!(r.t1.cases.len(), 3);
        assert_eq!(r.t2.coefficients.len(), 6);
        assert_eq!(r.t3.k, vec![0, 1, 3, 4, 6]);
        assert_eq!(r.t4.columns.len(), 3);
        assert_eq!(r.t5.rows.len(), 9);
    }

    #[test]
    fn printed_digit_tolerance() {
        assert!((last_place("0.83644438") - 1e-8).abs() < 1e-22);
        assert!((last_place("-1.284463e-4") - 1e-10).abs() < 1e-24);
        assert!((last_place("30.237515") - 1e-6).abs() < 1e-20);
        assert!(compare(-5.17728750816e-6, "-5.177287e-6", Tolerance::PrintedDigits).0);
        assert!(!compare(0.83644440, "0.83644438", Tolerance::PrintedDigits).0);
    }

    #[test]
    fn significant_figures() {
        assert!(compare(-1.59003e-2, "-1.58935e-2", Tolerance::SigFigs(3)).0);
        assert!(!compare(-7.95877e1, "-7.95934e2", Tolerance::SigFigs(3)).0);
        assert!(compare(707066.0503, "7.070661e5", Tolerance::SigFigs(7)).0);
        assert!(compare(5920850454095.35, "5.920851e12", Tolerance::SigFigs(7)).0);
        assert!(!compare(5920848454095.35, "5.920851e12", Tolerance::SigFigs(7)).0);
        assert!((sig_unit(-1.58935e-2, 3) - 1e-4).abs() < 1e-18);
    }

    #[test]
    fn errata_lookup() {
        let e = erratum(CellKey { table: "t4", lambda: 6.0, k: Some(4), x: None, field: None }).unwrap();
        assert_eq!(e.corrected, "8.317e-5");
        assert!(erratum(CellKey { table: "t4", lambda: 6.0, k: Some(3), x: None, field: None }).is_none());
        let e = erratum(CellKey { table: "t5", lambda: 4.0, k: None, x: Some(40.0), field: Some("i1") }).unwrap();
        assert_eq!(e.corrected, "-7.95905e1");
    }
}
