//! Text, JSON and CSV output for every subcommand.

use std::io::Write;

use anyhow::Result;
use serde_json::json;

use peakpoly::verify::{Table1, VerificationReport};
use peakpoly::{ExactCount, ExactPolynomial, FlipProfile, MoebiusExpansion, PositionSet, SpikeExpansion};

use crate::Format;

fn json_line(out: &mut dyn Write, value: &impl serde::Serialize) -> Result<()> {
    serde_json::to_writer_pretty(&mut *out, value)?;
    writeln!(out)?;
    Ok(())
}

fn csv_rows<I, R>(out: &mut dyn Write, header: &[&str], rows: I) -> Result<()>
where
    I: IntoIterator<Item = R>,
    R: IntoIterator<Item = String>,
{
    let mut w = csv::Writer::from_writer(out);
    w.write_record(header)?;
    for r in rows {
        w.write_record(r)?;
    }
    w.flush()?;
    Ok(())
}

fn mark(b: bool) -> &'static str {
    if b {
        "✓"
    } else {
        "✗"
    }
}

pub fn polynomial(out: &mut dyn Write, fmt: Format, name: &str, set: PositionSet, poly: &ExactPolynomial) -> Result<()> {
    match fmt {
        Format::Text => {
            let coeffs: Vec<String> = poly.coeffs().iter().map(|c| c.to_string()).collect();
            writeln!(out, "{name}({set}, n) at center {}", poly.center())?;
            writeln!(out, "coefficients: {}", coeffs.join(", "))?;
            writeln!(out, "= {}", poly.to_binomial_string("n"))?;
        }
        Format::Json => json_line(out, poly)?,
        Format::Csv => csv_rows(
            out,
            &["k", "coeff"],
            poly.coeffs()
                .iter()
                .enumerate()
                .map(|(k, c)| [k.to_string(), c.to_string()]),
        )?,
    }
    Ok(())
}

pub fn count(out: &mut dyn Write, fmt: Format, name: &str, set: PositionSet, n: usize, value: &ExactCount) -> Result<()> {
    match fmt {
        Format::Text => writeln!(out, "{name}({set}, {n}) = {value}")?,
        Format::Json => json_line(out, &json!({ "function": name, "set": set, "n": n, "value": value }))?,
        Format::Csv => csv_rows(
            out,
            &["function", "set", "n", "value"],
            [[name.to_string(), set.to_string(), n.to_string(), value.to_string()]],
        )?,
    }
    Ok(())
}

pub fn spike_expansion(out: &mut dyn Write, fmt: Format, e: &SpikeExpansion) -> Result<()> {
    match fmt {
        Format::Text => {
            writeln!(out, "d({}, {}) with spikes {}", e.descents, e.n, e.spikes)?;
            for t in &e.terms {
                let note = if t.admissible { "" } else { "  (not admissible)" };
                writeln!(out, "  p({}, {}) = {}{note}", t.peaks, e.n, t.value)?;
            }
            writeln!(out, "total = {}", e.total)?;
        }
        Format::Json => json_line(out, e)?,
        Format::Csv => csv_rows(
            out,
            &["peaks", "admissible", "value"],
            e.terms
                .iter()
                .map(|t| [t.peaks.to_string(), t.admissible.to_string(), t.value.to_string()]),
        )?,
    }
    Ok(())
}

pub fn moebius(out: &mut dyn Write, fmt: Format, e: &MoebiusExpansion) -> Result<()> {
    match fmt {
        Format::Text => {
            writeln!(out, "p({}, {})", e.peaks, e.n)?;
            for t in &e.terms {
                let sign = if t.sign > 0 { '+' } else { '-' };
                writeln!(out, "  {sign} d({}, {}) = {}   J = {}", t.descents, e.n, t.value, t.subset)?;
            }
            writeln!(out, "total = {}", e.total)?;
        }
        Format::Json => json_line(out, e)?,
        Format::Csv => csv_rows(
            out,
            &["subset", "descents", "sign", "value"],
            e.terms.iter().map(|t| {
                [t.subset.to_string(), t.descents.to_string(), t.sign.to_string(), t.value.to_string()]
            }),
        )?,
    }
    Ok(())
}

pub fn flips(out: &mut dyn Write, fmt: Format, profile: &FlipProfile) -> Result<()> {
    match fmt {
        Format::Text => {
            writeln!(out, "{}", profile.permutation)?;
            writeln!(out, "spike  i+  i-  flip")?;
            for a in &profile.spikes {
                writeln!(
                    out,
                    "{:>5}  {:>2}  {:>2}  {}",
                    a.position,
                    mark(a.admits_plus),
                    mark(a.admits_minus),
                    mark(a.admits())
                )?;
            }
        }
        Format::Json => json_line(out, profile)?,
        Format::Csv => csv_rows(
            out,
            &["spike", "plus", "minus", "admits"],
            profile.spikes.iter().map(|a| {
                [
                    a.position.to_string(),
                    a.admits_plus.to_string(),
                    a.admits_minus.to_string(),
                    a.admits().to_string(),
                ]
            }),
        )?,
    }
    Ok(())
}

pub fn table(out: &mut dyn Write, fmt: Format, t: &Table1) -> Result<()> {
    let positions = t.peaks.to_vec();
    match fmt {
        Format::Text => {
            writeln!(out, "I = {}, S_I = {}, m = {}", t.peaks, t.descents, t.center)?;
            for b in &t.blocks {
                let none = b.rows.iter().filter(|r| r.admits_none()).count();
                writeln!(out, "k = {} ({} rows, {} with no flip)", b.k, b.rows.len(), none)?;
                if b.rows.is_empty() {
                    continue;
                }
                let head: Vec<String> = positions.iter().map(|i| format!("{i}-flip")).collect();
                writeln!(out, "  {:<w$}  {}", "σ", head.join("  "), w = 2 * t.center)?;
                for r in &b.rows {
                    let flags: Vec<String> = r.flips.iter().map(|&(_, a)| format!("{:<6}", mark(a))).collect();
                    writeln!(out, "  {:<w$}  {}", r.permutation.to_string(), flags.join("  ").trim_end(), w = 2 * t.center)?;
                }
            }
        }
        Format::Json => json_line(out, t)?,
        Format::Csv => {
            let mut header = vec!["k".to_string(), "permutation".to_string()];
            header.extend(positions.iter().map(|i| format!("flip_{i}")));
            let header: Vec<&str> = header.iter().map(|s| s.as_str()).collect();
            csv_rows(
                out,
                &header,
                t.blocks.iter().flat_map(|b| {
                    b.rows.iter().map(move |r| {
                        let mut row = vec![b.k.to_string(), r.permutation.to_string()];
                        row.extend(r.flips.iter().map(|&(_, a)| a.to_string()));
                        row
                    })
                }),
            )?;
        }
    }
    Ok(())
}

pub fn reports(out: &mut dyn Write, fmt: Format, reports: &[VerificationReport]) -> Result<()> {
    match fmt {
        Format::Text => {
            for r in reports {
                writeln!(out, "{r}")?;
            }
        }
        Format::Json => json_line(out, &reports)?,
        Format::Csv => csv_rows(
            out,
            &["claim", "range", "passed", "checked", "counterexample"],
            reports.iter().map(|r| {
                [
                    r.claim.clone(),
                    r.range.clone(),
                    r.passed.to_string(),
                    r.checked.to_string(),
                    r.counterexample.as_ref().map(|c| c.to_string()).unwrap_or_default(),
                ]
            }),
        )?,
    }
    Ok(())
}
