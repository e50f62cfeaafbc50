//! One line per acceptance criterion; exits non-zero if any criterion fails.

use std::process::ExitCode;
use std::time::{Duration, Instant};

use num_traits::Zero;
use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use irrvec::frames::{self, VectorField};
use irrvec::gauge::{
    apply_gauge_and_verify, frobenius_verify, integrate_potential, lstar_combination, obstructions, potential_components,
    run_pipeline, scalar_completion_half,
};
use irrvec::gram::{expected_exponent, gram_det_verify, observed_exponent, total_length, GramError};
use irrvec::solver::{
    perturb, solve_half, solve_integer, solve_rank1, verify_canonical, verma_context, Perturbation, UnknownStatus,
};
use irrvec::symbols::{Rank, Symbols};
use irrvec::virasoro::eigen::{display_eigenvalues, integer_eigenvalues, Convention};
use irrvec::virasoro::{ModuleContext, Partition};
use irrvec::{Poly, Rational};

type Outcome = Result<String, String>;
type Criterion = (&'static str, Duration, fn() -> Outcome);

fn ratio(n: i64, d: i64) -> Rational {
    Rational::new(n.into(), d.into())
}

fn sign(r: usize) -> i64 {
    if (r * (r - 1) / 2).is_multiple_of(2) {
        1
    } else {
        -1
    }
}

/// Determinant by expansion along the first row.
fn leibniz(sym: &Symbols, m: &[Vec<Poly>]) -> Poly {
    let n = m.len();
    if n == 0 {
        return sym.one();
    }
    let mut acc = sym.zero();
    for j in 0..n {
        if m[0][j].is_zero() {
            continue;
        }
        let minor: Vec<Vec<Poly>> =
            m[1..].iter().map(|row| row.iter().enumerate().filter(|(k, _)| *k != j).map(|(_, p)| p.clone()).collect()).collect();
        let term = &m[0][j] * &leibniz(sym, &minor);
        acc = if j % 2 == 0 { &acc + &term } else { &acc - &term };
    }
    acc
}

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn frame_determinants() -> Outcome {
    for r in 2..=6 {
        let sym = Symbols::new(Rank::integer(r), 0);
        let frame = frames::build_frame_integer(&sym).map_err(|e| e.to_string())?;
        let fact: i64 = (1..=r as i64).product();
        let expected = sym.c(r as i64).pow(r as u32).scale_int(sign(r) * fact);
        let direct = leibniz(&sym, &frame.entries);
        ensure(direct == expected && frame.det == expected, || format!("r={r}: det {direct}, expected {expected}"))?;
    }
    Ok("r=2..6".into())
}

fn inverse_row_and_lowest_coefficient() -> Outcome {
    for r in 2..=6 {
        let sym = Symbols::new(Rank::integer(r), 0);
        let frame = frames::build_frame_integer(&sym).map_err(|e| e.to_string())?;
        let row = frame.inverse_row(r);
        for j in 0..r {
            let e = (0..r).fold(sym.zero(), |acc, i| &acc + &(&row[i] * &frame.entries[i][j]));
            let unit = if j == r - 1 { sym.one() } else { sym.zero() };
            ensure(e == unit, || format!("r={r}: (row r of inverse * M)_{} = {e}", j + 1))?;
        }
        if r <= 5 {
            let op = frames::build_lstar_integer(&sym, &frame).map_err(|e| e.to_string())?;
            let lead = sym.c(r as i64 - 1).pow(r as u32 - 1).scale(&ratio(if r % 2 == 1 { 1 } else { -1 }, r as i64));
            for (m, c) in op.coeff[0].iter().enumerate() {
                let want = if m == r - 1 { lead.clone() } else { sym.zero() };
                ensure(*c == want, || format!("r={r}: lowest coefficient of D_{m} is {c}"))?;
            }
            let fields = frames::integer_fields(&sym).map_err(|e| e.to_string())?;
            ensure(frames::realizes_top_derivative(&sym, &op, &fields), || format!("r={r}: operator is not t^r d/dt"))?;
        }
    }
    Ok("inverse row r=2..6, lowest coefficient r=2..5".into())
}

/// `S_m` written out directly from the coordinates.
fn scalar(sym: &Symbols, m: usize) -> Poly {
    let r = sym.r();
    if m == 2 * r - 1 {
        return sym.lambda();
    }
    let mut acc = sym.zero();
    if m >= r && m < 2 * r - 1 {
        for a in 1..r {
            let b = m as i64 - a as i64;
            if b >= 1 && (b as usize) < r {
                acc = &acc - &(&sym.c(a as i64) * &sym.c(b));
            }
        }
    }
    acc
}

fn half_field_table() -> Outcome {
    let mut count = 0;
    for r in 2..=5 {
        let sym = Symbols::new(Rank::half(r), 0);
        let set = frames::build_half_fields(&sym).map_err(|e| e.to_string())?;
        for n in 0..r {
            for m in r..2 * r {
                let lhs = set.fields[n].apply(&scalar(&sym, m));
                let rhs = scalar(&sym, m + n).scale_int(m as i64 - n as i64);
                ensure(lhs == rhs, || format!("r={r}: V_{n}(S_{m}) = {lhs}, expected {rhs}"))?;
                count += 1;
            }
        }
        for m in 0..r {
            for n in 0..r {
                let lhs = set.fields[m].bracket(&set.fields[n]);
                let rhs = if m + n < r { set.fields[m + n].scale_int(n as i64 - m as i64) } else { VectorField::zero() };
                ensure(lhs.add(&rhs.scale_int(-1)).is_zero(), || format!("r={r}: [V_{m}, V_{n}] mismatch"))?;
                count += 1;
            }
        }
    }
    Ok(format!("{count} identities, r=2..5"))
}

fn half_frame_and_ratio() -> Outcome {
    let mut ratios = Vec::new();
    for r in 2..=5 {
        let sym = Symbols::new(Rank::half(r), 0);
        let set = frames::build_half_fields(&sym).map_err(|e| e.to_string())?;
        let frame = frames::build_frame_half(&sym, &set).map_err(|e| e.to_string())?;
        let kappa = (1..r).fold(ratio(sign(r) * (2 * r as i64 - 1), 1), |k, n| k * ratio(-(2 * (r - n) as i64 - 1), 2));
        let expected = &sym.lambda().pow(r as u32).scale(&kappa) * &sym.c(r as i64 - 1).pow(r as u32 - 1).unit_inverse().unwrap();
        let direct = leibniz(&sym, &frame.entries);
        ensure(direct == expected, || format!("r={r}: det {direct}, expected {expected}"))?;
        let (op, rho) = frames::build_lstar_half(&sym, &frame).map_err(|e| e.to_string())?;
        ensure(!rho.is_zero(), || format!("r={r}: zero ratio"))?;
        let shape = sym.c(r as i64 - 1).pow(2 * r as u32 - 2).scale(&rho);
        ensure(op.coeff[0][r - 1] == shape, || format!("r={r}: lowest coefficient {}", op.coeff[0][r - 1]))?;
        ensure(frames::realizes_top_derivative(&sym, &op, &set), || format!("r={r}: operator is not t^r d/dt"))?;
        if r == 2 {
            ensure(rho == ratio(2, 3), || format!("rho_2 = {rho}"))?;
        }
        ratios.push(format!("rho_{r}={rho}"));
    }
    Ok(ratios.join(", "))
}

fn gram_proportionality() -> Outcome {
    let mut failures = Vec::new();
    let mut checked = 0;
    for rho in 1..=2 {
        let sym = Symbols::new(Rank::integer(rho), 0);
        let eigen = integer_eigenvalues(&sym, rho, &sym.c0(), Convention::General).unwrap();
        let top = eigen.last().unwrap().clone();
        let ctx = ModuleContext::new(rho, eigen, sym.default_central());
        for n in 0..=3 {
            for m in n..=3 {
                checked += 1;
                match gram_det_verify(&ctx, n, m) {
                    Ok(_) => {}
                    Err(GramError::ProportionalityFailure { det, .. }) => {
                        let det = sym.parse(&det).map_err(|e| e.to_string())?;
                        let seen = observed_exponent(&det, &top, 4 * expected_exponent(n, m) + 4)
                            .map(|(k, _)| k.to_string())
                            .unwrap_or_else(|| "none".into());
                        failures.push(format!(
                            "rho={rho} [{n},{m}]: exponent {seen} (sum of lengths {}), expected {}",
                            total_length(n, m),
                            expected_exponent(n, m)
                        ));
                    }
                    Err(e) => return Err(format!("rho={rho} [{n},{m}]: {e}")),
                }
            }
        }
    }
    if failures.is_empty() {
        Ok(format!("{checked} blocks"))
    } else {
        Err(format!("{} of {checked} blocks: {}", failures.len(), failures.join("; ")))
    }
}

fn solved_series(half: bool) -> Outcome {
    let mut notes = Vec::new();
    for (r, k) in [(2, 4), (3, 3)] {
        let s = if half { solve_half(r, k) } else { solve_integer(r, k) }.map_err(|e| e.to_string())?;
        let report = verify_canonical(&s);
        if let Some(c) = report.checks.iter().find(|c| !c.holds()) {
            return Err(format!("r={r} K={k}: {} fails at {:?}", c.relation, c.failure));
        }
        ensure(s.ledger.pending_vars().iter().all(|v| s.symbols.table().name(*v).starts_with('C')), || {
            format!("r={r} K={k}: exponent unknowns left pending")
        })?;
        if r == 2 {
            let sym = &s.symbols;
            let want = if half {
                (&(&sym.q().scale_int(2) - &sym.c0()) * &sym.c(1).pow(3)).scale(&ratio(-2, 3))
            } else {
                (&sym.c(1).pow(2) * &(&sym.c0() - &sym.c0p())).scale(&ratio(1, 2))
            };
            ensure(*s.g_j(1) == want, || format!("g_1 = {}, expected {want}", s.g_j(1)))?;
            notes.push(format!("g_1 = {}", s.g_j(1)));
        }
        notes.push(format!("({r},{k}) verified"));
    }
    Ok(notes.join(", "))
}

fn uniqueness_probes() -> Outcome {
    let series = solve_integer(2, 3).map_err(|e| e.to_string())?;
    let sym = &series.symbols;
    let mut candidates: Vec<Perturbation> = Vec::new();
    for e in &series.ledger.entries {
        if let UnknownStatus::Solved { .. } = e.status {
            if e.var == sym.nu_idx() {
                candidates.push(Perturbation::Nu);
            } else if let Some(j) = (1..sym.r()).find(|&j| sym.g_idx(j) == e.var) {
                candidates.push(Perturbation::Exponent(j));
            } else if let Some(k) = (1..=sym.order()).find(|&k| sym.big_c_idx(k) == e.var) {
                candidates.push(Perturbation::Coefficient { order: k, partition: Partition::empty() });
            }
        }
    }
    for (k, v) in series.tail.iter().enumerate().skip(1) {
        for lambda in v.terms().keys().filter(|p| !p.is_empty()) {
            candidates.push(Perturbation::Coefficient { order: k, partition: lambda.clone() });
        }
    }
    ensure(verify_canonical(&series).all_zero(), || "unperturbed series fails".into())?;
    let mut rng = ChaCha8Rng::seed_from_u64(0x5eed);
    let probes: Vec<&Perturbation> = candidates.choose_multiple(&mut rng, 10).collect();
    ensure(probes.len() == 10, || format!("only {} candidates", candidates.len()))?;
    for p in &probes {
        let report = verify_canonical(&perturb(&series, p));
        ensure(!report.all_zero(), || format!("{p:?} left every residual zero"))?;
    }
    Ok(format!("10 of {} candidates detected", candidates.len()))
}

fn integer_gauge() -> Outcome {
    let series = solve_integer(2, 4).map_err(|e| e.to_string())?;
    let sym = &series.symbols;
    let t = sym.expansion_idx();
    let obs = obstructions(&series, None).map_err(|e| e.to_string())?;
    ensure(obs.higher_failures.is_empty(), || format!("higher modes: {:?}", obs.higher_failures))?;
    let ops = obs.operators.clone().ok_or("no operators")?;
    for c in frobenius_verify(&obs, &ops.fields) {
        ensure(c.passed(), || format!("{} at {:?}", c.label, c.failing_orders))?;
    }
    let lc = lstar_combination(&obs, &ops.frame);
    ensure(lc.passed(), || format!("L* combination at {:?}", lc.failing_orders))?;
    for (k, (comp, w)) in potential_components(&obs, &ops.frame).into_iter().enumerate() {
        let leak = comp.split_by(t).into_iter().any(|(d, _)| d != 0 && d <= w);
        ensure(!leak, || format!("component {} depends on the expansion variable: {comp}", k + 1))?;
    }
    let decomp = integrate_potential(&obs, &ops.frame, &ops.fields).map_err(|e| e.to_string())?;
    let report = apply_gauge_and_verify(&series, &obs, &decomp).map_err(|e| e.to_string())?;
    ensure(report.passed(), || format!("gauged residuals: {:?}", report.checks))?;
    Ok(format!("g0 = {}, nu_1 = {}", decomp.g0, decomp.log_exponents[0]))
}

fn scalar_completion() -> Outcome {
    let mut notes = Vec::new();
    let mut r2 = None;
    for r in 2..=3 {
        let sym = Symbols::new(Rank::half(r), 0);
        let set = frames::build_half_fields(&sym).map_err(|e| e.to_string())?;
        let frame = frames::build_frame_half(&sym, &set).map_err(|e| e.to_string())?;
        let found = (1..=2 * r as i64).find_map(|b| scalar_completion_half(&sym, b).ok());
        let c = found.ok_or_else(|| format!("r={r}: no completion with B <= {}", 2 * r))?;
        let s = |n: usize| if n < r { c.sigma[n].clone() } else { scalar(&sym, n) };
        for i in 0..r {
            for j in i + 1..r {
                let mc = &(&set.fields[i].apply(&c.sigma[j]) - &set.fields[j].apply(&c.sigma[i])) - &s(i + j).scale_int((j - i) as i64);
                ensure(mc.is_zero(), || format!("r={r}: Maurer-Cartan ({i},{j}) = {mc}"))?;
            }
        }
        let row = frame.inverse_row(r);
        let gauge = (0..r).fold(sym.zero(), |acc, i| &acc + &(&row[i] * &c.sigma[i]));
        ensure(gauge.is_zero(), || format!("r={r}: gauge constraint {gauge}"))?;
        notes.push(format!("r={r} B={}", c.bound));
        if r == 2 {
            r2 = Some(c);
        }
    }
    let series = solve_half(2, 3).map_err(|e| e.to_string())?;
    let (_, _, report) = run_pipeline(&series, r2.as_ref()).map_err(|e| e.to_string())?;
    ensure(report.passed(), || format!("gauged residuals: {:?}", report.checks))?;
    notes.push("rank 3/2 K=3 gauged".into());
    Ok(notes.join(", "))
}

fn rank_one() -> Outcome {
    let sym = Symbols::new(Rank::integer(1), 0);
    let ctx = verma_context(&sym, &sym.default_central());
    let eig = display_eigenvalues(&sym, 1, &sym.c0()).unwrap();
    let s = solve_rank1(&sym, &ctx, &eig[0], &eig[1], 4).map_err(|e| e.to_string())?;
    ensure(s.tail.len() == 5, || format!("{} levels", s.tail.len()))?;
    for (n, k, holds) in s.check_relations() {
        ensure(holds, || format!("L_{n} relation fails at level {k}"))?;
    }
    Ok("levels 0..4".into())
}

fn main() -> ExitCode {
    let criteria: [Criterion; 11] = [
        ("frame determinant", Duration::from_secs(1), frame_determinants),
        ("inverse row and lowest canonical coefficient", Duration::from_secs(5), inverse_row_and_lowest_coefficient),
        ("half-rank field action and bracket table", Duration::from_secs(30), half_field_table),
        ("half-rank frame determinant and lowest ratio", Duration::from_secs(30), half_frame_and_ratio),
        ("gram determinant proportionality", Duration::from_secs(120), gram_proportionality),
        ("integer-rank series", Duration::from_secs(600), || solved_series(false)),
        ("half-rank series", Duration::from_secs(600), || solved_series(true)),
        ("uniqueness probes", Duration::from_secs(120), uniqueness_probes),
        ("integer gauge pipeline", Duration::from_secs(600), integer_gauge),
        ("scalar completion and half gauge", Duration::from_secs(900), scalar_completion),
        ("rank-one series", Duration::from_secs(60), rank_one),
    ];
    let mut failed = 0;
    for (i, (name, budget, run)) in criteria.iter().enumerate() {
        let t = Instant::now();
        let outcome = run();
        let elapsed = t.elapsed();
        let (status, detail) = match outcome {
            Ok(d) if elapsed <= *budget => ("PASS", d),
            Ok(d) => ("FAIL", format!("{d}; took {elapsed:.2?}, budget {budget:?}")),
            Err(e) => ("FAIL", e),
        };
        if status == "FAIL" {
            failed += 1;
        }
        println!("criterion {:>2} {status} {name} [{elapsed:.2?}]: {detail}", i + 1);
    }
    println!("{} of {} criteria passed", criteria.len() - failed, criteria.len());
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
