//! Command implementations behind the `setsquare` binary. Each writes its
//! output to the given writer and reports success as a bool.

use std::io::{self, Write};

use setsquare::census::{classify_census, emit_report, CensusReport, Check, ReportFormat, ReportView};
use setsquare::verify::run_verification;
use setsquare::{Family, MagicSquare};

use crate::error::Result;
use crate::generate::{generate, GenerationRequest};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Output {
    Json,
    Text,
}

fn failed_checks(report: &CensusReport) -> Vec<&Check> {
    report.formula_checks.iter().filter(|c| !c.passed()).collect()
}

/// Prints the census; false when any published count is not reproduced.
pub fn census(format: ReportFormat, view: ReportView, out: &mut impl Write, err: &mut impl Write) -> io::Result<bool> {
    let report = classify_census();
    out.write_all(emit_report(&report, format, view).as_bytes())?;
    let failed = failed_checks(&report);
    for check in &failed {
        writeln!(err, "{check}")?;
    }
    Ok(failed.is_empty())
}

fn describe(sq: &MagicSquare, out: &mut impl Write) -> io::Result<()> {
    for row in sq.cells() {
        writeln!(out, "  {} {} {}", row[0], row[1], row[2])?;
    }
    let p = sq.profile();
    writeln!(out, "type {}  order {}", p.square_type, p.order)?;
    let doc = sq.to_document(true).profile.expect("profile requested");
    writeln!(out, "diversity {}  rc-diversity {}", doc.diversity, doc.rc_diversity)?;
    let orders: Vec<String> = Family::ALL.iter().map(|f| format!("{} {}", f.name(), sq.family_order(*f))).collect();
    writeln!(out, "triplet orders: {}", orders.join(", "))
}

fn emit_square(sq: &MagicSquare, output: Output, out: &mut impl Write) -> io::Result<()> {
    match output {
        Output::Json => {
            let text = serde_json::to_string_pretty(&sq.to_document(true)).expect("document serializes");
            writeln!(out, "{text}")
        }
        Output::Text => describe(sq, out),
    }
}

/// Classifies nine cards given row-major, as separate words or one string.
pub fn classify(cards: &[String], output: Output, out: &mut impl Write) -> Result<()> {
    let sq: MagicSquare = cards.join(" ").parse()?;
    emit_square(&sq, output, out).map_err(|e| crate::error::ServiceError::BadRequest(e.to_string()))
}

pub fn generate_square(req: &GenerationRequest, output: Output, out: &mut impl Write) -> Result<u64> {
    let (sq, seed) = generate(req)?;
    emit_square(&sq, output, out).map_err(|e| crate::error::ServiceError::BadRequest(e.to_string()))?;
    Ok(seed)
}

/// Runs every verification criterion; true when all pass.
pub fn verify(output: Output, out: &mut impl Write) -> io::Result<bool> {
    let criteria = run_verification(None);
    let ok = criteria.iter().all(|c| c.passed());
    match output {
        Output::Json => {
            let doc = serde_json::json!({ "passed": ok, "criteria": criteria });
            writeln!(out, "{}", serde_json::to_string_pretty(&doc).expect("report serializes"))?;
        }
        Output::Text => {
            for c in &criteria {
                writeln!(
                    out,
                    "{} {} ({:.2} s, limit {} s)",
                    if c.passed() { "PASS" } else { "FAIL" },
                    c.name,
                    c.elapsed.as_secs_f64(),
                    c.budget.as_secs()
                )?;
                for check in &c.checks {
                    writeln!(out, "    {check}")?;
                }
            }
        }
    }
    Ok(ok)
}
