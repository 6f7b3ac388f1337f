//! Fixed CSV and JSON layouts for scores, rankings and summaries.
//!
//! Values are written as plain decimals with 12 significant digits. The
//! column order of every header constant here is part of the output format.

use std::io::{Read, Write};

use serde::{Deserialize, Serialize};
use serde_json::{json, Map, Value};

use crate::ballots::{Profile, Ranking};
use crate::error::{Error, Result};
use crate::metrics::MetricReport;
use crate::scalar::{decimal_string, Scalar};

pub const METRICS_HEADER: [&str; 8] = [
    "election_id",
    "rule",
    "sigma_iia",
    "sigma_u",
    "m_value",
    "n",
    "m",
    "seats",
];
pub const RANKINGS_HEADER: [&str; 4] = ["election_id", "rule", "ranking", "numbers"];

pub const DIGITS: usize = 12;

pub fn decimal<S: Scalar>(x: &S) -> String {
    decimal_string(x.to_f64(), DIGITS)
}

/// One row of the long metrics table.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MetricRow {
    pub election_id: String,
    pub rule: String,
    pub sigma_iia: f64,
    pub sigma_u: f64,
    pub m_value: f64,
    pub n: f64,
    pub m: usize,
    pub seats: Option<usize>,
}

impl MetricRow {
    pub fn new<S: Scalar>(election_id: &str, p: &Profile<S>, seats: Option<usize>, r: &MetricReport<S>) -> Self {
        MetricRow {
            election_id: election_id.to_string(),
            rule: r.rule_name.clone(),
            sigma_iia: r.sigma_iia.to_f64(),
            sigma_u: r.sigma_u.to_f64(),
            m_value: r.m_value.to_f64(),
            n: p.n().to_f64(),
            m: p.m(),
            seats,
        }
    }

    fn record(&self) -> [String; 8] {
        [
            self.election_id.clone(),
            self.rule.clone(),
            decimal_string(self.sigma_iia, DIGITS),
            decimal_string(self.sigma_u, DIGITS),
            decimal_string(self.m_value, DIGITS),
            decimal_string(self.n, DIGITS),
            self.m.to_string(),
            self.seats.map(|k| k.to_string()).unwrap_or_default(),
        ]
    }
}

pub(crate) fn csv_writer<W: Write>(out: W) -> csv::Writer<W> {
    csv::WriterBuilder::new()
        .terminator(csv::Terminator::Any(b'\n'))
        .from_writer(out)
}

fn io_error(e: csv::Error) -> std::io::Error {
    std::io::Error::other(e)
}

pub fn write_metric_rows<W: Write>(rows: &[MetricRow], out: W) -> std::io::Result<()> {
    let mut w = csv_writer(out);
    w.write_record(METRICS_HEADER).map_err(io_error)?;
    for row in rows {
        w.write_record(row.record()).map_err(io_error)?;
    }
    w.flush()
}

/// Reads a metrics table written by [`write_metric_rows`].
pub fn read_metric_rows<R: Read>(source: R) -> Result<Vec<MetricRow>> {
    let mut reader = csv::Reader::from_reader(source);
    let headers = reader.headers().map_err(|e| Error::Malformed(e.to_string()))?.clone();
    if headers.iter().collect::<Vec<_>>() != METRICS_HEADER {
        return Err(Error::malformed(1, "unexpected metrics header"));
    }
    reader
        .records()
        .enumerate()
        .map(|(i, rec)| {
            let line = i + 2;
            let rec = rec.map_err(|e| Error::malformed(line, e.to_string()))?;
            let num = |k: usize| -> Result<f64> {
                rec[k]
                    .parse()
                    .map_err(|_| Error::malformed(line, format!("bad number `{}`", &rec[k])))
            };
            Ok(MetricRow {
                election_id: rec[0].to_string(),
                rule: rec[1].to_string(),
                sigma_iia: num(2)?,
                sigma_u: num(3)?,
                m_value: num(4)?,
                n: num(5)?,
                m: rec[6].parse().map_err(|_| Error::malformed(line, "bad m"))?,
                seats: if rec[7].is_empty() {
                    None
                } else {
                    Some(rec[7].parse().map_err(|_| Error::malformed(line, "bad seats"))?)
                },
            })
        })
        .collect()
}

/// `A>B>C` and `1>2>3` forms of a ranking.
pub fn ranking_strings<S: Scalar>(p: &Profile<S>, r: &Ranking) -> (String, String) {
    let names = r.names(p.roster()).join(">");
    let numbers = r.numbered().iter().map(|i| i.to_string()).collect::<Vec<_>>().join(">");
    (names, numbers)
}

pub fn write_rankings<S: Scalar, W: Write>(
    election_id: &str,
    p: &Profile<S>,
    reports: &[MetricReport<S>],
    out: W,
) -> std::io::Result<()> {
    let mut w = csv_writer(out);
    w.write_record(RANKINGS_HEADER).map_err(io_error)?;
    for r in reports {
        let (names, numbers) = ranking_strings(p, &r.ranking);
        w.write_record([election_id, &r.rule_name, &names, &numbers])
            .map_err(io_error)?;
    }
    w.flush()
}

/// A report as a JSON object, with exact values alongside the decimals and
/// the per-removal swap counts keyed by candidate name.
pub fn report_json<S: Scalar>(election_id: &str, p: &Profile<S>, seats: Option<usize>, r: &MetricReport<S>) -> Value {
    let swaps: Map<String, Value> = r
        .per_candidate_swaps
        .iter()
        .map(|(&c, &d)| (p.name(c).to_string(), json!(d)))
        .collect();
    json!({
        "election_id": election_id,
        "rule": r.rule_name,
        "ranking": r.ranking.names(p.roster()),
        "ranking_numbers": r.ranking.numbered(),
        "sigma_iia": r.sigma_iia.to_f64(),
        "sigma_u": r.sigma_u.to_f64(),
        "m_value": r.m_value.to_f64(),
        "exact": {
            "sigma_iia": r.sigma_iia.to_string(),
            "sigma_u": r.sigma_u.to_string(),
            "m_value": r.m_value.to_string(),
        },
        "n": p.n().to_f64(),
        "m": p.m(),
        "seats": seats,
        "per_candidate_swaps": swaps,
    })
}

/// Plain-text table of rankings and scores rounded to two decimals.
pub fn display_table<S: Scalar>(p: &Profile<S>, reports: &[MetricReport<S>]) -> String {
    let mut out = String::new();
    let width = reports.iter().map(|r| r.rule_name.len()).max().unwrap_or(4).max(4);
    out.push_str(&format!(
        "{:<width$}  {:<16} {:>9} {:>7}\n",
        "rule", "ranking", "sigma_iia", "sigma_u"
    ));
    for r in reports {
        let (_, numbers) = ranking_strings(p, &r.ranking);
        out.push_str(&format!(
            "{:<width$}  {:<16} {:>9.2} {:>7.2}\n",
            r.rule_name,
            numbers,
            r.sigma_iia.to_f64(),
            r.sigma_u.to_f64()
        ));
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::metrics::evaluate;
    use crate::rules::ScoringRule;
    use crate::Rational;

    fn example() -> (Profile<Rational>, MetricReport<Rational>) {
        let p: Profile<Rational> = Profile::from_names(
            &["A", "B", "C"],
            &[(3, &["A", "B", "C"]), (2, &["B", "C", "A"]), (2, &["C", "B", "A"])],
        )
        .unwrap();
        let r = evaluate(&ScoringRule::plurality(), &p).unwrap();
        (p, r)
    }

    #[test]
    fn metrics_csv_round_trips() {
        let (p, r) = example();
        let rows = vec![
            MetricRow::new("e1", &p, Some(1), &r),
            MetricRow::new("e,2", &p, None, &r),
        ];
        let mut buf = Vec::new();
        write_metric_rows(&rows, &mut buf).unwrap();
        let text = String::from_utf8(buf.clone()).unwrap();
        assert!(text.starts_with("election_id,rule,sigma_iia,sigma_u,m_value,n,m,seats\n"));
        assert!(text.contains("e1,plurality,0.333333333333,"));
        assert!(!text.contains('\r'));
        assert_eq!(read_metric_rows(&buf[..]).unwrap().len(), 2);
        assert_eq!(read_metric_rows(&buf[..]).unwrap()[1].seats, None);
    }

    #[test]
    fn json_carries_exact_values_and_names() {
        let (p, r) = example();
        let v = report_json("e1", &p, Some(1), &r);
        assert_eq!(v["exact"]["sigma_iia"], "1/3");
        assert_eq!(v["ranking"], json!(["A", "B", "C"]));
        assert_eq!(v["per_candidate_swaps"]["B"], 1);
    }

    #[test]
    fn table_rounds_to_two_places() {
        let (p, r) = example();
        let t = display_table(&p, &[r]);
        assert!(t.contains("1>2>3"));
        assert!(t.contains("0.33"));
    }
}
