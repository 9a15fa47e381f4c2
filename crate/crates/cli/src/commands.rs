use std::fmt::Write;

use serde_json::{json, Value};

use hwcong::corpus::{generate, CorpusSpec};
use hwcong::fgl::{
    check_fgl_axioms, check_integrality, functional_equation_witness, group_law, logarithm,
};
use hwcong::hwmatrix::{
    cubic_connection_matrices, horizontal_frame, verify_lemma31, CongruenceReport, HWContext,
    HWOptions, TheoremPart,
};
use hwcong::laurent::{LatticeMode, LaurentPoly};
use hwcong::ring::{
    int_matrix, padic_text, DerivationMap, FrobeniusMap, RingDescriptor, RingElement, SquareMatrix,
};
use hwcong::zeta::{
    asd_check, charpoly_hw_modp, curve_zeta, hensel_unit_roots, reversed,
    verify_unit_eigenvalue_match, HyperellipticCurve,
};
use hwcong::Budget;

use crate::args::{Cli, CorpusArgs, FglArgs, HwArgs, LimitsArgs, PolyArgs, VerifyArgs, ZetaArgs};
use crate::input::{context, load_poly, mode, parse_text, require_p, truncation};
use crate::{budget, render, CliError, Output};

fn matrix_json(kind: &str, index: u64, m: &SquareMatrix) -> Value {
    json!({"kind": kind, "index": index, "matrix": m.to_json()})
}

fn labels(ctx: &HWContext) -> Vec<Vec<i64>> {
    ctx.index_set()
        .iter()
        .map(|e| e.as_slice().to_vec())
        .collect()
}

fn header(f: &LaurentPoly, ctx: &HWContext) -> Value {
    json!({
        "polynomial": f.to_json(),
        "p": ctx.p(),
        "precision": ctx.precision(),
        "trunc": ctx.trunc(),
        "mode": mode_name(ctx.mode()),
        "J": labels(ctx),
    })
}

fn mode_name(m: LatticeMode) -> &'static str {
    match m {
        LatticeMode::Interior => "INTERIOR",
        LatticeMode::All => "ALL",
    }
}

fn header_text(out: &mut String, f: &LaurentPoly, ctx: &HWContext, show_p: bool) {
    let j: Vec<String> = ctx.index_set().iter().map(render::label).collect();
    let _ = writeln!(out, "f = {}", f.to_text());
    let p = if show_p { format!("p = {}, ", ctx.p()) } else { String::new() };
    let _ = writeln!(out, "{p}J ({}) = {}", mode_name(ctx.mode()), j.join(" "));
}

fn options(a: &PolyArgs, precision: Option<u32>, trunc: Option<u32>, budget: Budget) -> HWOptions {
    HWOptions {
        mode: mode(a),
        precision,
        trunc,
        budget,
        ..HWOptions::default()
    }
}

/// Parameter rings need a truncation degree for anything that inverts matrices.
fn required_trunc(f: &LaurentPoly, n: Option<u32>) -> Result<Option<u32>, CliError> {
    let t = truncation(f, n)?;
    if !f.ring().is_scalar() && t.is_none() {
        return Err(CliError::Usage(
            "parameter rings need a truncation degree --N".into(),
        ));
    }
    Ok(t)
}

fn add_reports(out: &mut Output, reports: &[CongruenceReport]) {
    for r in reports {
        render::report(&mut out.text, r);
        if !r.pass {
            if r.soft {
                out.soft_failures += 1;
            } else {
                out.hard_failures += 1;
            }
        }
    }
}

fn record_reports(out: &mut Output, reports: Vec<CongruenceReport>) {
    add_reports(out, &reports);
    out.json["reports"] = serde_json::to_value(reports).expect("reports serialize");
}

pub fn hw(cli: &Cli, a: &HwArgs) -> Result<Output, CliError> {
    let budget = budget(cli)?;
    if a.beta.is_empty() && a.alpha.is_empty() && !a.hasse_witt && a.gamma.is_none() {
        return Err(CliError::Usage(
            "nothing to print: use --beta, --alpha, --hasse-witt or --gamma".into(),
        ));
    }
    let f = load_poly(&a.poly, &budget)?;
    let needs_p = !a.alpha.is_empty() || a.hasse_witt || a.gamma.is_some() || a.k.is_some();
    // beta matrices do not depend on the prime
    let p = if needs_p {
        require_p(a.p, "--alpha, --hasse-witt, --gamma and --K")?
    } else {
        a.p.unwrap_or(2)
    };
    let ctx = context(&f, p, options(&a.poly, a.k, truncation(&f, a.n)?, budget))?;
    let mut text = String::new();
    header_text(&mut text, &f, &ctx, needs_p || a.p.is_some());
    let mut mats = Vec::new();
    for &m in &a.beta {
        if m == 0 {
            return Err(CliError::Usage("--beta needs m >= 1".into()));
        }
        let b = ctx.beta_matrix(m)?;
        render::matrix(&mut text, &format!("beta_{m}"), &b);
        mats.push(matrix_json("beta", m, &b));
    }
    for &s in &a.alpha {
        let b = ctx.alpha_matrix(s)?;
        render::matrix(&mut text, &format!("alpha_{s}"), &b);
        mats.push(matrix_json("alpha", s as u64, &b));
    }
    if a.hasse_witt {
        let (b, unit) = ctx.hasse_witt()?;
        render::matrix(&mut text, "Hasse-Witt", &b);
        let _ = writeln!(text, "invertible mod {p}: {unit}");
        let mut v = matrix_json("hasse_witt", 1, &b);
        v["invertible"] = json!(unit);
        mats.push(v);
    }
    if let Some(levels) = a.gamma {
        for (i, g) in ctx.gamma_matrices(levels)?.iter().enumerate() {
            render::matrix(&mut text, &format!("gamma_{}", i + 1), g);
            mats.push(matrix_json("gamma", i as u64 + 1, g));
        }
    }
    let mut json = header(&f, &ctx);
    if !needs_p && a.p.is_none() {
        json["p"] = Value::Null;
    }
    json["matrices"] = Value::Array(mats);
    Ok(Output::new(json, text))
}

/// The cubic family of the frame experiment, whatever `--f` says.
const CUBIC: &str = "1 + a*x + b*x^2 + x^3";

fn frame(a: &VerifyArgs, budget: Budget) -> Result<Output, CliError> {
    let p = require_p(a.p, "--frame")?;
    if p == 3 {
        return Err(CliError::Usage(
            "the frame has denominators divisible by 3".into(),
        ));
    }
    let params = vec!["a".to_string(), "b".to_string()];
    let f = parse_text(CUBIC, &["x".to_string()], &params, &budget)?;
    if let Some(text) = &a.poly.f {
        let given = parse_text(text, &a.poly.vars, &a.poly.params, &budget)?;
        if given != f {
            return Err(CliError::Usage(format!(
                "--frame works with the family {CUBIC}"
            )));
        }
    }
    let n = a.n.unwrap_or(4);
    let s = a.s.max(1);
    let ctx = context(
        &f,
        p,
        options(&a.poly, Some(a.k.unwrap_or(s).max(s)), Some(n), budget),
    )?;
    let family = cubic_connection_matrices(n)?;
    let u = horizontal_frame(&family, n, &[3])?;
    // F0 is the identity when -3 is a square mod p and the negated swap otherwise
    let zr = RingDescriptor::integers();
    let f0 = if p % 3 == 1 {
        int_matrix(&zr, &[&[1, 0], &[0, 1]])
    } else {
        int_matrix(&zr, &[&[0, -1], &[-1, 0]])
    };
    let report = ctx.verify_frame_factorization(&u, &f0, s)?;
    let mut text = String::new();
    header_text(&mut text, &f, &ctx, true);
    let mut json = header(&f, &ctx);
    json["frame"] = json!(u.iter().map(|x| x.to_text()).collect::<Vec<_>>());
    let mut out = Output::new(json, text);
    record_reports(&mut out, vec![report]);
    Ok(out)
}

fn lemma31_samples(ring: &hwcong::ring::Ring) -> Vec<RingElement> {
    let np = ring.nparams();
    let mut out: Vec<RingElement> = (0..np).map(|i| RingElement::param(ring, i)).collect();
    for i in 0..np {
        let t = RingElement::param(ring, i);
        out.push(&(&t * &t) + &RingElement::from_int(ring, 1));
        for j in i + 1..np {
            out.push(&t * &RingElement::param(ring, j));
        }
    }
    out
}

pub fn verify(cli: &Cli, a: &VerifyArgs) -> Result<Output, CliError> {
    let budget = budget(cli)?;
    if a.frame {
        return frame(a, budget);
    }
    let parts: Vec<TheoremPart> = a
        .theorem1
        .iter()
        .map(|s| s.parse::<TheoremPart>())
        .collect::<Result<_, _>>()?;
    if parts.is_empty() && !a.lemma21 && !a.lemma23ii && !a.lemma23iii && !a.lemma31 && !a.asd {
        return Err(CliError::Usage(
            "nothing to check: use --theorem1, --lemma21, --lemma23ii, --lemma23iii, --lemma31, --asd or --frame".into(),
        ));
    }
    let p = require_p(a.p, "verify")?;
    let f = load_poly(&a.poly, &budget)?;
    let d = match &a.d {
        Some(text) => Some(DerivationMap::parse(f.ring(), text)?),
        None => None,
    };
    if (parts.contains(&TheoremPart::III) || a.lemma31) && d.is_none() {
        return Err(CliError::Usage(
            "part iii and --lemma31 need a derivation --D".into(),
        ));
    }
    let asd_ms: Vec<u64> = if a.ms.is_empty() {
        vec![1, 2, p, 2 * p, p * p]
    } else {
        a.ms.clone()
    };
    let lemma_ms: Vec<u64> = if a.ms.is_empty() {
        [2u64, 3].into_iter().filter(|m| m % p != 0).collect()
    } else {
        a.ms.clone()
    };
    let ord = |mut m: u64| {
        let mut k = 0u32;
        while m > 0 && m.is_multiple_of(p) {
            m /= p;
            k += 1;
        }
        k
    };
    let mut need = 1u32;
    for part in &parts {
        need = need.max(match part {
            TheoremPart::I => 1,
            TheoremPart::II => a.smax,
            TheoremPart::III => a.smax + a.mmax,
        });
    }
    if a.lemma21 || a.lemma23ii || a.lemma23iii {
        need = need.max(a.smax);
    }
    if a.asd {
        need = need.max(asd_ms.iter().map(|&m| ord(m)).max().unwrap_or(0) + 1);
    }
    let precision = Some(a.k.unwrap_or(need));
    let needs_ctx = !parts.is_empty() || a.lemma21 || a.lemma23ii || a.lemma23iii || a.asd;
    let mut reports = Vec::new();
    let mut json = json!({"polynomial": f.to_json(), "p": p});
    let mut text = String::new();
    if needs_ctx {
        let ctx = context(
            &f,
            p,
            options(&a.poly, precision, required_trunc(&f, a.n)?, budget),
        )?;
        header_text(&mut text, &f, &ctx, true);
        json = header(&f, &ctx);
        for part in parts {
            reports.extend(ctx.verify_theorem1(part, a.smax, a.mmax, d.as_ref())?);
        }
        if a.lemma21 {
            reports.extend(ctx.verify_lemma21(a.smax)?);
        }
        if a.lemma23ii {
            reports.extend(ctx.verify_lemma23_ii(a.smax)?);
        }
        if a.lemma23iii {
            reports.extend(ctx.verify_lemma23_iii(&lemma_ms, a.smax)?);
        }
        if a.asd {
            let curve = HyperellipticCurve::new(&f, p)?;
            let z = curve_zeta(&curve, 0)?;
            let res = asd_check(&ctx, &z, &asd_ms, (0, a.c_max))?;
            json["zeta"] = serde_json::to_value(&z).expect("zeta serializes");
            json["asd_minimal_c"] = json!(res.minimal_c);
            let _ = writeln!(
                text,
                "zeta numerator {}; least constant {}",
                z.text(),
                res.minimal_c
                    .map_or("none in range".to_string(), |c| c.to_string())
            );
            reports.extend(res.reports);
        }
    }
    if a.lemma31 {
        let d = d.as_ref().expect("checked");
        let sigma = FrobeniusMap::standard(f.ring(), p);
        let samples = lemma31_samples(f.ring());
        reports.extend(verify_lemma31(&sigma, d, &samples, a.smax)?);
    }
    let mut out = Output::new(json, text);
    record_reports(&mut out, reports);
    Ok(out)
}

/// Trace and determinant of a scalar matrix as residue and base-p digits.
fn scalar_invariants(m: &SquareMatrix, p: u64, e: u32) -> Value {
    let digits = |x: RingElement| {
        let r = x.constant_term();
        json!({"residue": r.to_string(), "digits": padic_text(&r, p, e)})
    };
    json!({"trace": digits(m.trace()), "det": digits(m.det())})
}

pub fn limits(cli: &Cli, a: &LimitsArgs) -> Result<Output, CliError> {
    let budget = budget(cli)?;
    let p = require_p(a.p, "limits")?;
    if a.e == 0 {
        return Err(CliError::Usage("--e must be at least 1".into()));
    }
    if a.no_frobenius && a.d.is_empty() {
        return Err(CliError::Usage(
            "nothing to compute: drop --no-frobenius or give --D".into(),
        ));
    }
    let f = load_poly(&a.poly, &budget)?;
    let ders =
        a.d.iter()
            .map(|t| DerivationMap::parse(f.ring(), t))
            .collect::<Result<Vec<_>, _>>()?;
    let ctx = context(
        &f,
        p,
        options(&a.poly, Some(a.e), required_trunc(&f, a.n)?, budget),
    )?;
    let mut text = String::new();
    header_text(&mut text, &f, &ctx, true);
    let mut json = header(&f, &ctx);
    json["e"] = json!(a.e);
    if !a.no_frobenius {
        let m = ctx.frobenius_limit(a.e)?;
        render::matrix(&mut text, &format!("Frobenius limit mod {p}^{}", a.e), &m);
        let mut fr = json!({"matrix": m.to_json()});
        if f.ring().is_scalar() {
            let mut table = Vec::new();
            for s in 1..=a.e {
                let q = ctx.frobenius_limit(s)?;
                let inv = scalar_invariants(&q, p, s);
                let _ = writeln!(
                    text,
                    "s = {s}: trace {}, det {}",
                    inv["trace"]["digits"].as_str().unwrap_or(""),
                    inv["det"]["digits"].as_str().unwrap_or("")
                );
                let mut row = inv;
                row["s"] = json!(s);
                table.push(row);
            }
            fr["table"] = Value::Array(table);
        }
        json["frobenius"] = fr;
    }
    let mut conns = Vec::new();
    for (text_d, d) in a.d.iter().zip(&ders) {
        let m = ctx.connection_limit(d, a.e)?;
        render::matrix(
            &mut text,
            &format!("connection limit for {text_d} mod {p}^{}", a.e),
            &m,
        );
        conns.push(json!({"D": text_d, "matrix": m.to_json()}));
    }
    json["connections"] = Value::Array(conns);
    Ok(Output::new(json, text))
}

pub fn fgl(cli: &Cli, a: &FglArgs) -> Result<Output, CliError> {
    let budget = budget(cli)?;
    if a.n == 0 {
        return Err(CliError::Usage("--N must be at least 1".into()));
    }
    if a.witness && a.p.is_none() {
        return Err(CliError::Usage("--witness needs --p".into()));
    }
    let f = load_poly(&a.poly, &budget)?;
    if !f.ring().is_scalar() {
        return Err(CliError::Usage(
            "group laws are built over integer coefficients only".into(),
        ));
    }
    let p = a.p.unwrap_or(2);
    let ctx = context(&f, p, options(&a.poly, None, None, budget))?;
    let mut text = String::new();
    let _ = writeln!(text, "f = {}", f.to_text());
    let j: Vec<String> = ctx.index_set().iter().map(render::label).collect();
    let _ = writeln!(text, "J ({}) = {}", mode_name(ctx.mode()), j.join(" "));
    let mut json = json!({
        "polynomial": f.to_json(),
        "mode": mode_name(ctx.mode()),
        "J": labels(&ctx),
        "N": a.n,
    });
    if a.log {
        let l = logarithm(&ctx, a.n)?;
        for (i, c) in l.to_text().iter().enumerate() {
            let _ = writeln!(text, "l_{} = {c}", i + 1);
        }
        json["logarithm"] = serde_json::to_value(l.to_json()).expect("series serialize");
    }
    let law = group_law(&ctx, a.n)?;
    for (i, c) in law.to_text().iter().enumerate() {
        let _ = writeln!(text, "G_{} = {c}", i + 1);
    }
    json["law"] = serde_json::to_value(law.to_json()).expect("series serialize");
    let mut out = Output::new(json, text);
    let mut integrality = Vec::new();
    for &q in &a.check_integrality {
        if !hwcong::ring::is_prime(q) {
            return Err(CliError::Usage(format!("{q} is not prime")));
        }
        let r = check_integrality(&law, q);
        let _ = writeln!(
            out.text,
            "{} integrality at {q}: {} violations, min valuation {}",
            if r.pass { "PASS" } else { "FAIL" },
            r.violations.len(),
            r.min_valuation
        );
        if !r.pass {
            out.hard_failures += 1;
        }
        integrality.push(serde_json::to_value(&r).expect("report serializes"));
    }
    out.json["integrality"] = Value::Array(integrality);
    if a.witness {
        let r = functional_equation_witness(&ctx, a.n)?;
        let _ = writeln!(
            out.text,
            "{} witness at {p}: {} violations, min valuation {}",
            if r.pass { "PASS" } else { "FAIL" },
            r.violations.len(),
            r.min_valuation
        );
        if !r.pass {
            out.hard_failures += 1;
        }
        out.json["witness"] = serde_json::to_value(&r).expect("report serializes");
    }
    if a.axioms {
        let r = check_fgl_axioms(&law, a.n)?;
        let _ = writeln!(
            out.text,
            "{} axioms: unit {}, commutative {}, associative {} ({})",
            if r.pass { "PASS" } else { "FAIL" },
            r.unit,
            r.commutative,
            r.associative,
            r.associativity_check
        );
        if !r.pass {
            out.hard_failures += 1;
        }
        out.json["axioms"] = serde_json::to_value(&r).expect("report serializes");
    }
    Ok(out)
}

pub fn zeta(cli: &Cli, a: &ZetaArgs) -> Result<Output, CliError> {
    let budget = budget(cli)?;
    let f = parse_text(&a.curve, &[], &[], &budget)?;
    let curve = HyperellipticCurve::new(&f, a.p)?;
    let z = curve_zeta(&curve, a.extra)?;
    let mut text = String::new();
    let _ = writeln!(
        text,
        "curve {} = 0 over F_{}, genus {}",
        f.to_text(),
        a.p,
        z.genus
    );
    let counts: Vec<String> = z.counts.iter().map(|c| c.to_string()).collect();
    let _ = writeln!(text, "counts {}", counts.join(" "));
    let _ = writeln!(text, "numerator {}", z.text());
    let json = json!({
        "curve": f.to_json(),
        "p": a.p,
        "zeta": serde_json::to_value(&z).expect("zeta serializes"),
        "numerator_text": z.text(),
    });
    let mut out = Output::new(json, text);
    let mut reports = Vec::new();
    if a.hw_factor {
        let ctx = context(
            &f,
            a.p,
            HWOptions {
                precision: Some(1),
                budget,
                ..HWOptions::default()
            },
        )?;
        let factor = charpoly_hw_modp(&ctx, 1)?;
        reports.push(factor.divisibility("hw-divides-zeta", &z.numerator_big())?);
    }
    if a.unit_roots || a.match_limits {
        if a.k == 0 {
            return Err(CliError::Usage("--K must be at least 1".into()));
        }
        let limit_ctx = if a.match_limits {
            let ctx = context(
                &f,
                a.p,
                HWOptions {
                    precision: Some(a.k),
                    budget,
                    ..HWOptions::default()
                },
            )?;
            ctx.require_invertible()?;
            Some(ctx)
        } else {
            None
        };
        let roots = hensel_unit_roots(&reversed(&z.numerator_big()), a.p, a.k)?;
        let digits: Vec<String> = roots
            .roots
            .iter()
            .map(|r| padic_text(r, a.p, a.k))
            .collect();
        for d in &digits {
            let _ = writeln!(out.text, "unit root {d}");
        }
        out.json["unit_roots"] = json!({
            "p": a.p,
            "precision": a.k,
            "roots": roots.roots.iter().map(|r| r.to_string()).collect::<Vec<_>>(),
            "digits": digits,
        });
        if let Some(ctx) = limit_ctx {
            reports.extend(verify_unit_eigenvalue_match(&ctx, &roots, a.k)?);
        }
    }
    record_reports(&mut out, reports);
    Ok(out)
}

pub fn corpus(cli: &Cli, a: &CorpusArgs) -> Result<Output, CliError> {
    let budget = budget(cli)?;
    let spec = CorpusSpec {
        seed: a.seed,
        count: a.count,
        max_vars: a.max_vars,
        max_support: a.max_support,
        coeff_bound: a.coeff_bound,
        exponent_range: (a.exp_min, a.exp_max),
        mode: if a.all_points {
            LatticeMode::All
        } else {
            LatticeMode::Interior
        },
        max_g: a.max_g,
        primes: a.primes.clone(),
    };
    let members = generate(&spec, &budget)?;
    let mut text = String::new();
    for f in &members {
        let _ = writeln!(text, "{}", f.to_text());
    }
    let json = json!({
        "seed": a.seed,
        "mode": mode_name(spec.mode),
        "primes": a.primes,
        "members": members.iter().map(|f| f.to_json()).collect::<Vec<_>>(),
    });
    Ok(Output::new(json, text))
}
