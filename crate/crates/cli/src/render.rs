//! Text rendering for terminal output.

use std::fmt::Write;

use hwcong::hwmatrix::CongruenceReport;
use hwcong::laurent::ExponentVector;
use hwcong::ring::SquareMatrix;

pub fn label(e: &ExponentVector) -> String {
    let parts: Vec<String> = e.as_slice().iter().map(|x| x.to_string()).collect();
    format!("({})", parts.join(","))
}

pub fn matrix(out: &mut String, title: &str, m: &SquareMatrix) {
    let _ = writeln!(out, "{title} over {}:", m.ring());
    let rows = m.to_text_rows();
    let widths: Vec<usize> = (0..m.size())
        .map(|j| rows.iter().map(|r| r[j].len()).max().unwrap_or(0))
        .collect();
    for row in &rows {
        let cells: Vec<String> = row
            .iter()
            .zip(&widths)
            .map(|(c, w)| format!("{c:>w$}"))
            .collect();
        let _ = writeln!(out, "  [{}]", cells.join(", "));
    }
}

pub fn report(out: &mut String, r: &CongruenceReport) {
    let status = match (r.pass, r.soft) {
        (true, false) => "PASS",
        (false, false) => "FAIL",
        (true, true) => "SOFT-PASS",
        (false, true) => "SOFT-FAIL",
    };
    let params: Vec<String> = r
        .params
        .iter()
        .map(|(k, v)| match v {
            serde_json::Value::String(s) => format!("{k}={s}"),
            other => format!("{k}={other}"),
        })
        .collect();
    let _ = writeln!(
        out,
        "{status:<9} {} [{}] mod {} defect {}",
        r.claim,
        params.join(" "),
        r.modulus,
        r.defect_valuation
    );
}
