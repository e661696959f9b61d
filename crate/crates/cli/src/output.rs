//! Output records and their CSV / JSON serialization.

use std::fmt::Write as _;

use serde::Serialize;

pub const TOOL_VERSION: &str = env!("CARGO_PKG_VERSION");

pub const CSV_HEADER: &str = "scenario,d,N,k,p,value,provenance";

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Provenance {
    Formula,
    BruteForce,
    MonteCarlo,
}

impl Provenance {
    fn as_str(self) -> &'static str {
        match self {
            Provenance::Formula => "formula",
            Provenance::BruteForce => "brute-force",
            Provenance::MonteCarlo => "monte-carlo",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Record {
    pub scenario: String,
    pub d: Option<usize>,
    #[serde(rename = "N")]
    pub n: Option<usize>,
    pub k: Option<u64>,
    pub p: Option<f64>,
    pub value: f64,
    pub provenance: Provenance,
}

impl Record {
    pub fn new(scenario: impl Into<String>, value: f64, provenance: Provenance) -> Self {
        Self {
            scenario: scenario.into(),
            d: None,
            n: None,
            k: None,
            p: None,
            value,
            provenance,
        }
    }

    pub fn d(mut self, d: usize) -> Self {
        self.d = Some(d);
        self
    }

    pub fn n(mut self, n: usize) -> Self {
        self.n = Some(n);
        self
    }

    pub fn k(mut self, k: u64) -> Self {
        self.k = Some(k);
        self
    }

    pub fn p(mut self, p: f64) -> Self {
        self.p = Some(p);
        self
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum Format {
    Csv,
    Json,
}

/// 17 significant digits, enough to round-trip any `f64`.
fn float(x: f64) -> String {
    if x.is_finite() {
        format!("{x:.16e}")
    } else if x.is_nan() {
        "nan".into()
    } else if x > 0.0 {
        "inf".into()
    } else {
        "-inf".into()
    }
}

fn opt<T: ToString>(x: Option<T>) -> String {
    x.map(|v| v.to_string()).unwrap_or_default()
}

pub fn to_csv(records: &[Record]) -> String {
    let mut out = format!("# causal-lab {TOOL_VERSION}\n{CSV_HEADER}\n");
    for r in records {
        let _ = writeln!(
            out,
            "{},{},{},{},{},{},{}",
            r.scenario,
            opt(r.d),
            opt(r.n),
            opt(r.k),
            r.p.map(float).unwrap_or_default(),
            float(r.value),
            r.provenance.as_str()
        );
    }
    out
}

#[derive(Serialize)]
struct JsonDoc<'a> {
    tool_version: &'a str,
    records: &'a [Record],
}

pub fn to_json(records: &[Record]) -> String {
    // Non-finite values have no JSON number form; they serialize as null.
    let mut s = serde_json::to_string_pretty(&JsonDoc {
        tool_version: TOOL_VERSION,
        records,
    })
    .expect("records serialize");
    s.push('\n');
    s
}

pub fn render(records: &[Record], format: Format) -> String {
    match format {
        Format::Csv => to_csv(records),
        Format::Json => to_json(records),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn csv_layout() {
        let recs = vec![
            Record::new("classical", 0.5, Provenance::Formula).d(2).n(1).k(2),
            Record::new("chernoff-rate", f64::INFINITY, Provenance::BruteForce).p(0.25),
        ];
        let text = to_csv(&recs);
        let lines: Vec<&str> = text.lines().collect();
        assert_eq!(lines[0], format!("# causal-lab {TOOL_VERSION}"));
        assert_eq!(lines[1], CSV_HEADER);
        assert_eq!(lines[2], "classical,2,1,2,,5.0000000000000000e-1,formula");
        assert_eq!(lines[3], "chernoff-rate,,,,2.5000000000000000e-1,inf,brute-force");
    }

    #[test]
    fn floats_round_trip() {
        for x in [0.1, 1.0 / 3.0, 4.623942e-7, 2f64.powi(-20), f64::MIN_POSITIVE] {
            assert_eq!(float(x).parse::<f64>().unwrap(), x);
        }
    }

    #[test]
    fn json_keys() {
        let recs = vec![Record::new("plan", 1e-7, Provenance::MonteCarlo).n(12)];
        let v: serde_json::Value = serde_json::from_str(&to_json(&recs)).unwrap();
        assert_eq!(v["tool_version"], TOOL_VERSION);
        let r = &v["records"][0];
        assert_eq!(r["N"], 12);
        assert_eq!(r["provenance"], "monte-carlo");
        assert!(r["d"].is_null());
    }
}
