//! Profile file formats.
//!
//! Canonical CSV (read and written):
//!
//! ```text
//! # candidates: A,B,C
//! # seats: 2
//! weight,ranking
//! 3,A>B>C
//! 2,B
//! 1,
//! ```
//!
//! The `# candidates:` line fixes the canonical order. `# seats:` is optional
//! metadata used by STV. An empty ranking is a ballot that ranks nobody.
//!
//! Position-column CSV (read only) is the layout of the public Scottish
//! local-election files: a `candidates,seats` line, one `count,c1,c2,...`
//! line per ballot group with 1-based candidate numbers and blank trailing
//! cells, then one `Candidate i,name,party` line per candidate and a final
//! line holding the ward name.

use std::io::{BufRead, BufReader, Read, Write};
use std::sync::Arc;

use crate::ballots::{Ballot, Candidate, CandidateRoster, Profile};
use crate::error::{Error, Result};
use crate::scalar::{parse_rational, Scalar};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ProfileFormat {
    CanonicalCsv,
    PositionColumnsCsv,
}

impl ProfileFormat {
    /// Guesses the format from the first non-blank line.
    pub fn detect(text: &str) -> ProfileFormat {
        let first = text.lines().map(str::trim).find(|l| !l.is_empty()).unwrap_or("");
        if first.starts_with('#') || first.eq_ignore_ascii_case("weight,ranking") {
            ProfileFormat::CanonicalCsv
        } else {
            ProfileFormat::PositionColumnsCsv
        }
    }
}

/// A profile together with the metadata carried in its file.
#[derive(Clone, Debug)]
pub struct Election<S> {
    pub id: String,
    pub profile: Profile<S>,
    pub seats: Option<usize>,
    pub ward: Option<String>,
}

pub fn parse_profile<S: Scalar, R: Read>(source: R, format: ProfileFormat) -> Result<Profile<S>> {
    parse_election(source, format).map(|e| e.profile)
}

pub fn parse_election<S: Scalar, R: Read>(source: R, format: ProfileFormat) -> Result<Election<S>> {
    match format {
        ProfileFormat::CanonicalCsv => parse_canonical(source),
        ProfileFormat::PositionColumnsCsv => parse_position_columns(source),
    }
}

/// Parses either format, detecting which from the content.
pub fn parse_election_auto<S: Scalar>(text: &str) -> Result<Election<S>> {
    parse_election(text.as_bytes(), ProfileFormat::detect(text))
}

fn weight_from<S: Scalar>(text: &str) -> Result<S> {
    let exact = parse_rational(text).ok_or_else(|| Error::InvalidWeight(format!("`{text}` is not a number")))?;
    if exact <= num_rational::BigRational::from_integer(0.into()) {
        return Err(Error::InvalidWeight(format!("weight {text} is not positive")));
    }
    S::from_rational(&exact).ok_or_else(|| Error::InvalidWeight(format!("weight {text} is out of range")))
}

fn parse_canonical<S: Scalar, R: Read>(source: R) -> Result<Election<S>> {
    let reader = BufReader::new(source);
    let mut roster: Option<Arc<CandidateRoster>> = None;
    let mut seats = None;
    let mut ward = None;
    let mut seen_header = false;
    let mut ballots = Vec::new();
    for (index, line) in reader.lines().enumerate() {
        let lineno = index + 1;
        let line = line.map_err(|e| Error::malformed(lineno, e.to_string()))?;
        let line = line.trim_end_matches('\r');
        if line.trim().is_empty() {
            continue;
        }
        if let Some(comment) = line.strip_prefix('#') {
            let Some((key, value)) = comment.split_once(':') else {
                continue;
            };
            match key.trim() {
                "candidates" => {
                    let names = value.split(',').map(|n| n.trim().to_string());
                    roster = Some(Arc::new(CandidateRoster::new(names).map_err(|e| e.at_line(lineno))?));
                }
                "seats" => {
                    let k = value
                        .trim()
                        .parse::<usize>()
                        .map_err(|_| Error::malformed(lineno, format!("bad seat count `{}`", value.trim())))?;
                    seats = Some(k);
                }
                "ward" => ward = Some(value.trim().to_string()),
                _ => {}
            }
            continue;
        }
        if !seen_header {
            if line.trim() != "weight,ranking" {
                return Err(Error::malformed(lineno, "expected header `weight,ranking`"));
            }
            seen_header = true;
            continue;
        }
        let roster = roster
            .as_ref()
            .ok_or_else(|| Error::malformed(lineno, "ballot row before `# candidates:` line"))?;
        let (weight, ranking) = line
            .split_once(',')
            .ok_or_else(|| Error::malformed(lineno, "expected `weight,ranking`"))?;
        let weight = weight_from::<S>(weight).map_err(|e| e.at_line(lineno))?;
        let ranking = if ranking.trim().is_empty() {
            Vec::new()
        } else {
            ranking
                .split('>')
                .map(|name| roster.require(name.trim()))
                .collect::<Result<Vec<_>>>()
                .map_err(|e| e.at_line(lineno))?
        };
        ballots.push(Ballot::new(ranking, weight).map_err(|e| named(e, roster).at_line(lineno))?);
    }
    let roster = roster.ok_or_else(|| Error::Malformed("missing `# candidates:` line".into()))?;
    if !seen_header {
        return Err(Error::Malformed("missing `weight,ranking` header".into()));
    }
    Ok(Election {
        id: String::new(),
        profile: Profile::new(roster, ballots)?,
        seats,
        ward,
    })
}

fn named(err: Error, roster: &CandidateRoster) -> Error {
    match err {
        Error::DuplicateInBallot { candidate } => {
            let name = candidate
                .strip_prefix('#')
                .and_then(|i| i.parse::<usize>().ok())
                .filter(|&i| i >= 1 && i <= roster.len())
                .map(|i| roster.name(Candidate::new(i - 1)).to_string())
                .unwrap_or(candidate);
            Error::DuplicateInBallot { candidate: name }
        }
        other => other,
    }
}

fn parse_position_columns<S: Scalar, R: Read>(source: R) -> Result<Election<S>> {
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(false)
        .flexible(true)
        .from_reader(source);
    let mut rows: Vec<(usize, Vec<String>)> = Vec::new();
    for record in reader.records() {
        let record = record.map_err(|e| {
            let line = e.position().map(|p| p.line() as usize).unwrap_or(0);
            Error::malformed(line, e.to_string())
        })?;
        let line = record.position().map(|p| p.line() as usize).unwrap_or(0);
        let fields: Vec<String> = record
            .iter()
            .map(|f| f.trim().to_string())
            .filter(|f| !f.is_empty())
            .collect();
        if !fields.is_empty() {
            rows.push((line, fields));
        }
    }
    let Some((header_line, header)) = rows.first().cloned() else {
        return Err(Error::Malformed("empty file".into()));
    };
    let numbers: Vec<usize> = header.iter().filter_map(|f| f.parse().ok()).collect();
    if header.len() != 2 || numbers.len() != 2 {
        return Err(Error::malformed(header_line, "first line must be `candidates,seats`"));
    }
    let (declared, seats) = (numbers[0], numbers[1]);
    if rows.len() < declared + 2 {
        return Err(Error::Malformed(format!(
            "expected {declared} candidate lines and a ward line"
        )));
    }
    let ward_row = &rows[rows.len() - 1];
    let candidate_rows = &rows[rows.len() - 1 - declared..rows.len() - 1];
    let mut names = Vec::with_capacity(declared);
    for (line, fields) in candidate_rows {
        if !fields[0].starts_with("Candidate") || fields.len() < 2 {
            return Err(Error::malformed(
                *line,
                format!("expected a `Candidate` line ({declared} candidates declared)"),
            ));
        }
        names.push(fields[1].clone());
    }
    let stray = rows[1..rows.len() - 1 - declared]
        .iter()
        .find(|(_, f)| f[0].starts_with("Candidate"));
    if let Some((line, _)) = stray {
        return Err(Error::malformed(*line, "more candidate lines than declared"));
    }
    let roster = Arc::new(CandidateRoster::new(names).map_err(|e| e.at_line(candidate_rows[0].0))?);

    let mut ballots = Vec::new();
    for (line, fields) in &rows[1..rows.len() - 1 - declared] {
        let weight = weight_from::<S>(&fields[0]).map_err(|e| e.at_line(*line))?;
        let mut ranking = Vec::with_capacity(fields.len() - 1);
        for cell in &fields[1..] {
            let number: usize = cell
                .parse()
                .map_err(|_| Error::UnknownCandidate(cell.clone()).at_line(*line))?;
            if number == 0 {
                break;
            }
            if number > declared {
                return Err(Error::UnknownCandidate(cell.clone()).at_line(*line));
            }
            ranking.push(Candidate::new(number - 1));
        }
        ballots.push(Ballot::new(ranking, weight).map_err(|e| named(e, &roster).at_line(*line))?);
    }
    Ok(Election {
        id: String::new(),
        profile: Profile::new(roster, ballots)?,
        seats: Some(seats),
        ward: Some(ward_row.1.join(" ")),
    })
}

/// Writes `profile` in canonical CSV.
pub fn write_profile<S: Scalar, W: Write>(profile: &Profile<S>, out: W) -> std::io::Result<()> {
    write_election(profile, None, out)
}

/// Writes canonical CSV with an optional `# seats:` line.
pub fn write_election<S: Scalar, W: Write>(
    profile: &Profile<S>,
    seats: Option<usize>,
    mut out: W,
) -> std::io::Result<()> {
    let names: Vec<&str> = profile.candidates().iter().map(|&c| profile.name(c)).collect();
    writeln!(out, "# candidates: {}", names.join(","))?;
    if let Some(k) = seats {
        writeln!(out, "# seats: {k}")?;
    }
    writeln!(out, "weight,ranking")?;
    for ballot in profile.ballots() {
        let ranking: Vec<&str> = ballot.ranking().iter().map(|&c| profile.name(c)).collect();
        writeln!(out, "{},{}", ballot.weight(), ranking.join(">"))?;
    }
    Ok(())
}

pub fn profile_to_string<S: Scalar>(profile: &Profile<S>) -> String {
    let mut buf = Vec::new();
    write_profile(profile, &mut buf).expect("writing to memory");
    String::from_utf8(buf).expect("names are UTF-8")
}
