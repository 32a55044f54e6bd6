//! Acceptance suite: one line per criterion, nonzero exit if any criterion fails.

use std::process::{Command, ExitCode};
use std::sync::Arc;
use std::time::{Duration, Instant};

use num_rational::BigRational;

use gj_core::exactnum::parse_rational;
use gj_core::reps::{battery, Alphabet};
use gj_core::session::Budget;
use gj_core::zeta::{
    conductor_check, equivariance_check, gj_spherical, gj_zeta, main_theorem, measure_anchor_check,
    phi_invariance_check, projection_identity_check, propagation_check, rs_integral_nn1_spherical,
    rs_integral_nn_spherical, strategy_equivalence, whittaker_oracle_check, CheckReport, Strategy,
};
use gj_core::{CoeffField, Error, LanglandsDatum, Newform, PadicMatrix, SBFunction, Session, ZetaReport};

type Outcome = Result<Vec<String>, String>;
type Criterion = (&'static str, Duration, fn() -> Outcome);

fn datum(p: u64, names: &[&str]) -> LanglandsDatum {
    LanglandsDatum::from_names(p, names, Alphabet::Main).expect("valid datum")
}

fn field(p: u64, data: &[&LanglandsDatum]) -> Arc<CoeffField> {
    let orders: Vec<u64> = data.iter().map(|d| d.unit_order()).collect();
    Session::new(p, &orders, 2).expect("session").field().clone()
}

fn budget() -> Budget {
    Budget::default()
}

fn zeta_ok(r: Result<ZetaReport, Error>, notes: &mut Vec<String>) -> Result<(), String> {
    let r = r.map_err(|e| e.to_string())?;
    if !r.equal {
        return Err(format!("{} {}: coefficient {:?} differs", r.datum, r.phi, r.first_mismatch()));
    }
    notes.push(format!("{} {} [{}]", r.datum, r.phi, r.lhs_text.join(", ")));
    Ok(())
}

fn check_ok(r: Result<CheckReport, Error>, notes: &mut Vec<String>) -> Result<(), String> {
    let r = r.map_err(|e| e.to_string())?;
    if !r.ok {
        return Err(format!("{}: {}/{} ({})", r.name, r.passed, r.samples, r.failures.join("; ")));
    }
    notes.push(format!("{}: {}/{}", r.name, r.passed, r.samples));
    Ok(())
}

fn expect_text(r: &ZetaReport, want: &[&str]) -> Result<(), String> {
    if r.lhs_text != want {
        return Err(format!("{}: got [{}], want [{}]", r.datum, r.lhs_text.join(", "), want.join(", ")));
    }
    Ok(())
}

fn criterion1() -> Outcome {
    let mut notes = Vec::new();
    let quad = datum(3, &["quad"]);
    let f = field(3, &[&quad]);
    let r = main_theorem(&quad, &f, 5, Strategy::Hermite, &budget(), false).map_err(|e| e.to_string())?;
    expect_text(&r, &["1", "0", "0", "0", "0"])?;
    zeta_ok(Ok(r), &mut notes)?;
    let unram = datum(3, &["unram"]);
    let r = main_theorem(&unram, &f, 5, Strategy::Hermite, &budget(), false).map_err(|e| e.to_string())?;
    expect_text(&r, &["1", "a1", "a1^2", "a1^3", "a1^4"])?;
    zeta_ok(Ok(r), &mut notes)?;
    Ok(notes)
}

fn criterion2() -> Outcome {
    let mut notes = Vec::new();
    let d = datum(3, &["quad", "unram"]);
    let qq = datum(3, &["quad", "quad"]);
    let f = field(3, &[&d, &qq]);
    let c = Newform::new(&d, &f, budget()).map_err(|e| e.to_string())?.conductor();
    if c != 1 {
        return Err(format!("conductor of {d} is {c}, want 1"));
    }
    let r = main_theorem(&d, &f, 5, Strategy::Hermite, &budget(), false).map_err(|e| e.to_string())?;
    expect_text(&r, &["1", "a2", "a2^2", "a2^3", "a2^4"])?;
    zeta_ok(Ok(r), &mut notes)?;
    let c = Newform::new(&qq, &f, budget()).map_err(|e| e.to_string())?.conductor();
    if c != 2 {
        return Err(format!("conductor of {qq} is {c}, want 2"));
    }
    let r = main_theorem(&qq, &f, 4, Strategy::Hermite, &budget(), false).map_err(|e| e.to_string())?;
    expect_text(&r, &["1", "0", "0", "0"])?;
    zeta_ok(Ok(r), &mut notes)?;
    Ok(notes)
}

fn criterion3() -> Outcome {
    let mut notes = Vec::new();
    let d = datum(2, &["unram", "unram"]);
    let f = field(2, &[&d]);
    let r = gj_spherical(&d, &f, 5, Strategy::Hermite, &budget(), false).map_err(|e| e.to_string())?;
    expect_text(
        &r,
        &[
            "1",
            "a1 + a2",
            "a1^2 + a1*a2 + a2^2",
            "a1^3 + a1^2*a2 + a1*a2^2 + a2^3",
            "a1^4 + a1^3*a2 + a1^2*a2^2 + a1*a2^3 + a2^4",
        ],
    )?;
    zeta_ok(Ok(r), &mut notes)?;
    Ok(notes)
}

fn criterion4() -> Outcome {
    let mut notes = Vec::new();
    for p in [2, 3] {
        let pi = datum(p, &["unram", "unram"]);
        let f = field(p, &[&pi]);
        let one = LanglandsDatum::from_names(p, &["unram"], Alphabet::Partner).map_err(|e| e.to_string())?;
        let two = LanglandsDatum::from_names(p, &["unram", "unram"], Alphabet::Partner).map_err(|e| e.to_string())?;
        zeta_ok(rs_integral_nn1_spherical(&pi, &one, &f, 3, false), &mut notes)?;
        zeta_ok(rs_integral_nn_spherical(&pi, &two, &f, 3, false), &mut notes)?;
    }
    Ok(notes)
}

fn criterion5() -> Outcome {
    let mut notes = Vec::new();
    let s = Session::new(3, &[], 2).map_err(|e| e.to_string())?;
    let alpha: Vec<BigRational> = ["1/2", "1/3"].iter().map(|a| parse_rational(a).unwrap()).collect();
    let bound = parse_rational("1/1000000").unwrap();
    for g in [[1, 0, 0, 1], [3, 0, 0, 1], [9, 0, 0, 1], [1, 0, 0, 3]] {
        let gm = PadicMatrix::from_ints(3, 2, 2, &g).map_err(|e| e.to_string())?;
        let r =
            propagation_check(&alpha, &gm, &bound, &s.psi(), s.field(), 10_000, false).map_err(|e| e.to_string())?;
        if !r.passed() {
            return Err(format!("g={g:?}: {:?}, gap ≤ {}, tail ≤ {}", r.status, r.gap, r.tail_majorant));
        }
        notes.push(format!("g={g:?} gap ≤ {} tail ≤ {}", r.gap, r.tail_majorant));
    }
    Ok(notes)
}

fn criterion6() -> Outcome {
    let mut notes = Vec::new();
    let d = datum(3, &["quad", "unram"]);
    let f = field(3, &[&d]);
    let nf = Newform::new(&d, &f, budget()).map_err(|e| e.to_string())?;
    let r = phi_invariance_check(nf.data(), nf.conductor(), 100, 0, false);
    if r.as_ref().is_ok_and(|r| r.samples != 100) {
        return Err("invariance check did not run 100 samples".into());
    }
    check_ok(r, &mut notes)?;
    let r = projection_identity_check(&nf, 50, 0, false);
    if r.as_ref().is_ok_and(|r| r.samples != 50) {
        return Err("projection check did not run 50 samples".into());
    }
    check_ok(r, &mut notes)?;
    for p in [2, 3] {
        for (name, d) in battery(p).map_err(|e| e.to_string())? {
            let f = field(p, &[&d]);
            let nf = Newform::new(&d, &f, budget()).map_err(|e| e.to_string())?;
            let mut r = equivariance_check(&nf).map_err(|e| e.to_string())?;
            r.name = format!("equivariance p={p} {name}");
            check_ok(Ok(r), &mut notes)?;
        }
    }
    Ok(notes)
}

fn criterion7() -> Outcome {
    let mut notes = Vec::new();
    for p in [2, 3] {
        let mut cases = battery(p).map_err(|e| e.to_string())?;
        if p == 2 {
            cases.push(("quad+quad (c=4)", datum(2, &["quad", "quad"])));
        }
        for (name, d) in cases {
            let f = field(p, &[&d]);
            zeta_ok(strategy_equivalence(&d, &f, 3, &budget(), false), &mut notes)?;
            let nf = Newform::new(&d, &f, budget()).map_err(|e| e.to_string())?;
            let phi = SBFunction::factored(nf.data(), nf.conductor());
            let a = gj_zeta(&nf, &phi, 3, Strategy::Hermite, &budget()).map_err(|e| e.to_string())?;
            let b = gj_zeta(&nf, &phi, 3, Strategy::Brute, &budget()).map_err(|e| e.to_string())?;
            if a.series != b.series {
                return Err(format!("p={p} {name} {}: hermite {} vs brute {}", phi.label(), a.series, b.series));
            }
            notes.push(format!("p={p} {name} {}: T=3 agree", phi.label()));
        }
        let d = datum(p, &["unram", "unram"]);
        check_ok(whittaker_oracle_check(p, &field(p, &[&d]), 4, false), &mut notes)?;
    }
    Ok(notes)
}

fn criterion8() -> Outcome {
    let mut notes = Vec::new();
    for (names, want) in [(["unram", "unram"], 0), (["quad", "unram"], 1), (["quad", "quad"], 2)] {
        let d = datum(3, &names);
        let f = field(3, &[&d]);
        let c = Newform::new(&d, &f, budget()).map_err(|e| e.to_string())?.conductor();
        if c != want {
            return Err(format!("{d}: conductor {c}, want {want}"));
        }
        check_ok(conductor_check(&d, &f, budget(), 8, 0, false), &mut notes)?;
    }
    Ok(notes)
}

fn criterion9() -> Outcome {
    let mut notes = Vec::new();
    for (p, n, v) in [(2, 2, 2), (3, 2, 2), (2, 3, 1)] {
        let mut r = measure_anchor_check(p, n, v).map_err(|e| e.to_string())?;
        r.name = format!("measure anchors p={p} n={n} v≤{v}");
        check_ok(Ok(r), &mut notes)?;
    }
    Ok(notes)
}

/// The stretch cases; a budget error at default budgets is retried with raised budgets.
fn criterion10() -> Outcome {
    let mut notes = Vec::new();
    for names in [["unram", "unram", "unram"], ["quad", "unram", "unram"]] {
        let d = datum(2, &names);
        let f = field(2, &[&d]);
        match main_theorem(&d, &f, 3, Strategy::Hermite, &budget(), false) {
            Err(Error::Budget(msg)) | Err(Error::Level(msg)) => {
                notes.push(format!("{d}: inconclusive at default budgets ({msg}), retrying"));
                let raised = Budget { max_level: 12, max_cosets: 1 << 34, ..budget() };
                zeta_ok(main_theorem(&d, &f, 3, Strategy::Hermite, &raised, false), &mut notes)?;
            }
            r => zeta_ok(r, &mut notes)?,
        }
    }
    Ok(notes)
}

fn gjzeta(args: &[&str]) -> Result<u8, String> {
    let out = Command::new(env!("CARGO_BIN_EXE_gjzeta"))
        .args(args)
        .output()
        .map_err(|e| format!("cannot run gjzeta: {e}"))?;
    out.status.code().map(|c| c as u8).ok_or_else(|| "gjzeta was killed".into())
}

fn criterion11() -> Outcome {
    let mut notes = Vec::new();
    let targets: [(&str, &[&str]); 9] = [
        ("main-theorem", &["--p", "3", "--T", "3"]),
        ("gj-spherical", &["--p", "2", "--T", "3"]),
        ("rs-nn1", &["--p", "2", "--T", "3"]),
        ("rs-nn", &["--p", "2", "--T", "3"]),
        ("propagation", &["--p", "3"]),
        ("phi-invariance", &["--p", "2"]),
        ("projection", &["--p", "3"]),
        ("conductor", &["--p", "2"]),
        ("oracle-equivalence", &["--p", "2", "--T", "3"]),
    ];
    for (target, extra) in targets {
        let mut args = vec!["verify", target];
        args.extend_from_slice(extra);
        let clean = gjzeta(&args)?;
        args.push("--corrupt");
        let corrupt = gjzeta(&args)?;
        if clean != 0 || corrupt == 0 {
            return Err(format!("{target}: exit {clean} clean, {corrupt} corrupted"));
        }
        notes.push(format!("{target}: exit {clean} clean, {corrupt} corrupted"));
    }
    Ok(notes)
}

fn main() -> ExitCode {
    let verbose = std::env::args().any(|a| a == "--nocapture");
    let criteria: [Criterion; 11] = [
        ("GL_1 main identity", Duration::from_secs(1), criterion1),
        ("GL_2 main identity", Duration::from_secs(600), criterion2),
        ("spherical GJ integral", Duration::from_secs(300), criterion3),
        ("Rankin-Selberg integrals", Duration::from_secs(300), criterion4),
        ("propagation formula", Duration::from_secs(120), criterion5),
        ("invariance identities", Duration::from_secs(600), criterion6),
        ("oracle equivalence", Duration::from_secs(600), criterion7),
        ("conductor discovery", Duration::from_secs(600), criterion8),
        ("measure anchors", Duration::from_secs(600), criterion9),
        ("GL_3 stretch", Duration::from_secs(600), criterion10),
        ("negative controls", Duration::from_secs(600), criterion11),
    ];
    let mut failed = 0;
    for (i, (name, limit, run)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let outcome = run();
        let took = start.elapsed();
        let (ok, detail) = match &outcome {
            Ok(_) if took > *limit => (false, format!("took {took:.2?}, limit {limit:?}")),
            Ok(_) => (true, String::new()),
            Err(e) => (false, e.clone()),
        };
        let mark = if ok { "PASS" } else { "FAIL" };
        println!("criterion {:>2} {name:<26} {mark}  {took:>10.2?}  {detail}", i + 1);
        if verbose {
            for note in outcome.iter().flatten() {
                println!("    {note}");
            }
        }
        if !ok {
            failed += 1;
        }
    }
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        println!("{failed} criteria failed");
        ExitCode::FAILURE
    }
}
