use std::collections::BTreeSet;

use hwcong::hwmatrix::{HWContext, HWOptions};
use hwcong::laurent::{parse_poly_with_budget, LatticeMode, LaurentPoly, PolyJson};
use hwcong::ring::{BaseRing, Ring, RingDescriptor};
use hwcong::{Budget, Error};

use crate::args::PolyArgs;
use crate::CliError;

/// Identifiers of `text` that are not parameters, in sorted order.
pub fn infer_vars(text: &str, params: &[String]) -> Vec<String> {
    let mut out = BTreeSet::new();
    let bytes = text.as_bytes();
    let mut i = 0;
    while i < bytes.len() {
        if bytes[i].is_ascii_alphabetic() || bytes[i] == b'_' {
            let start = i;
            while i < bytes.len() && (bytes[i].is_ascii_alphanumeric() || bytes[i] == b'_') {
                i += 1;
            }
            let name = &text[start..i];
            if !params.iter().any(|p| p == name) {
                out.insert(name.to_string());
            }
        } else if bytes[i].is_ascii_digit() {
            // skip numeric literals so `2x` style suffixes are not taken as names
            while i < bytes.len() && bytes[i].is_ascii_digit() {
                i += 1;
            }
        } else {
            i += 1;
        }
    }
    out.into_iter().collect()
}

pub fn ring_for(params: &[String]) -> Result<Ring, CliError> {
    Ok(RingDescriptor::new(
        BaseRing::Integers,
        params.to_vec(),
        None,
    )?)
}

pub fn mode(args: &PolyArgs) -> LatticeMode {
    if args.all_points {
        LatticeMode::All
    } else {
        LatticeMode::Interior
    }
}

/// The polynomial named by `--f` or `--file`.
pub fn load_poly(args: &PolyArgs, budget: &Budget) -> Result<LaurentPoly, CliError> {
    match (&args.f, &args.file) {
        (Some(text), None) => parse_text(text, &args.vars, &args.params, budget),
        (None, Some(path)) => {
            let text = std::fs::read_to_string(path)
                .map_err(|e| CliError::Usage(format!("cannot read {}: {e}", path.display())))?;
            let json: PolyJson = serde_json::from_str(&text).map_err(Error::from)?;
            if !args.params.is_empty() && args.params != json.params {
                return Err(CliError::Usage(
                    "--params disagrees with the file's parameter list".into(),
                ));
            }
            let ring = LaurentPoly::ring_for_json(&json, &RingDescriptor::integers())?;
            Ok(LaurentPoly::from_json(&json, &ring)?)
        }
        _ => Err(CliError::Usage(
            "give the polynomial with --f or --file".into(),
        )),
    }
}

pub fn parse_text(
    text: &str,
    vars: &[String],
    params: &[String],
    budget: &Budget,
) -> Result<LaurentPoly, CliError> {
    let ring = ring_for(params)?;
    let vars = if vars.is_empty() {
        infer_vars(text, params)
    } else {
        vars.to_vec()
    };
    Ok(parse_poly_with_budget(text, &vars, &ring, budget)?)
}

/// A context, warning on stderr when the interior is taken relative to a lower-dimensional
/// polytope.
pub fn context(f: &LaurentPoly, p: u64, opts: HWOptions) -> Result<HWContext, CliError> {
    let ctx = HWContext::new(f, p, opts)?;
    if ctx.mode() == LatticeMode::Interior && ctx.is_deficient() {
        eprintln!("warning: Newton polytope is not full-dimensional; using its relative interior");
    }
    Ok(ctx)
}

pub fn require_p(p: Option<u64>, what: &str) -> Result<u64, CliError> {
    p.ok_or_else(|| CliError::Usage(format!("{what} needs --p")))
}

pub fn truncation(f: &LaurentPoly, n: Option<u32>) -> Result<Option<u32>, CliError> {
    match (f.ring().is_scalar(), n) {
        (true, Some(_)) => Err(CliError::Usage(
            "--N only applies to parameter rings".into(),
        )),
        (false, None) => Ok(None),
        (_, n) => Ok(n),
    }
}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        CliError::Library(e)
    }
}
