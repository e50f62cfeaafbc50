use std::fs;
use std::path::Path;

use irrvec::frames::{self, VectorFieldSet};
use irrvec::gauge::{self, IdentityCheck, ScalarCompletion};
use irrvec::gram::{gram_det_verify, gram_matrix, observed_exponent, expected_exponent, total_length, GramError};
use irrvec::solver::{
    self, solve_rank1, verify_canonical, verma_context, IrregularSeries, Rank1Series, RelationCheck, SeriesSetup,
    SolverOptions, UnknownLedger, UnknownStatus,
};
use irrvec::symbols::{Rank, RankKind, Symbols};
use irrvec::virasoro::eigen::integer_eigenvalues;
use irrvec::virasoro::{Convention, ModuleContext, ModuleVector};
use irrvec::Poly;
use serde_json::{json, Value};

use crate::config::{Common, ConventionArg, RankSpec};
use crate::encode::{self, decode_partition, decode_poly, field_at, DecodeError};

#[derive(Debug, thiserror::Error)]
pub enum CommandError {
    #[error("{0}")]
    Usage(String),
    /// A computation failed; `meta` describes the run for the report.
    #[error("{kind}: {message}")]
    Failed { meta: Value, kind: &'static str, message: String },
}

/// A finished report and whether every check in it passed.
pub struct Outcome {
    pub report: Value,
    pub ok: bool,
}

fn usage(msg: impl Into<String>) -> CommandError {
    CommandError::Usage(msg.into())
}

fn failed(meta: &Value, kind: &'static str, err: impl ToString) -> CommandError {
    CommandError::Failed { meta: meta.clone(), kind, message: err.to_string() }
}

fn rank_of(common: &Common) -> Result<RankSpec, CommandError> {
    let src = common.rank.as_deref().ok_or_else(|| usage("--rank is required"))?;
    RankSpec::parse(src).map_err(usage)
}

fn options(common: &Common) -> SolverOptions {
    SolverOptions { central: common.central.clone() }
}

fn central_poly(sym: &Symbols, common: &Common) -> Result<Poly, CommandError> {
    match &common.central {
        Some(src) => sym.parse(src).map_err(|e| usage(format!("bad --central expression: {e}"))),
        None => Ok(sym.default_central()),
    }
}

fn meta(rank: &RankSpec, order: Option<usize>, common: &Common, sym: Option<&Symbols>) -> Value {
    let (r, kind) = match rank {
        RankSpec::One => (1, "integer"),
        RankSpec::Full(rank) => (rank.r, if rank.kind == RankKind::Half { "half" } else { "integer" }),
    };
    let mut m = json!({
        "rank": rank.label(),
        "r": r,
        "kind": kind,
        "K": order,
        "convention": common.convention.name(),
        "central": common.central.clone().unwrap_or_else(|| "1 + 6*Q^2".into()),
    });
    if let Some(sym) = sym {
        m["variables"] = encode::variables(sym.table());
    }
    m
}

fn require_general(common: &Common, what: &str) -> Result<(), CommandError> {
    if common.convention == ConventionArg::Section2 {
        return Err(usage(format!("the section2 display tables only cover rank-1 and rank-2 modules; not available for {what}")));
    }
    Ok(())
}

fn relation(c: &RelationCheck) -> Value {
    let mut v = json!({"relation": c.relation, "window": c.window, "status": if c.holds() { "zero" } else { "nonzero" }});
    if let Some((order, residual)) = &c.failure {
        v["first_failure"] = json!({"order": order, "residual": residual});
    }
    v
}

fn identity(c: &IdentityCheck) -> Value {
    json!({
        "relation": c.label,
        "window": c.window,
        "status": if c.passed() { "zero" } else { "nonzero" },
        "failing_orders": c.failing_orders,
    })
}

fn rank1_series(rank: &RankSpec, common: &Common) -> Result<(Rank1Series, Value), CommandError> {
    let sym = Symbols::new(Rank::integer(1), 0);
    let meta = meta(rank, Some(common.order), common, Some(&sym));
    let central = central_poly(&sym, common)?;
    let ctx = verma_context(&sym, &central);
    let eigen = integer_eigenvalues(&sym, 1, &sym.c0(), common.convention.convention()).expect("rank-1 tables exist");
    let series = solve_rank1(&sym, &ctx, &eigen[0], &eigen[1], common.order).map_err(|e| failed(&meta, "solver", e))?;
    Ok((series, meta))
}

fn solve_full(rank: Rank, common: &Common, meta: &Value) -> Result<IrregularSeries, CommandError> {
    solver::solve(rank, common.order, &options(common)).map_err(|e| match e {
        solver::SolverError::BadExpression(msg) => usage(format!("bad --central expression: {msg}")),
        e => failed(meta, "solver", e),
    })
}

pub fn construct(common: &Common) -> Result<Outcome, CommandError> {
    let rank = rank_of(common)?;
    match rank {
        RankSpec::One => {
            let (series, meta) = rank1_series(&rank, common)?;
            let tail: Vec<Value> = series
                .tail
                .iter()
                .enumerate()
                .map(|(k, v)| json!({"k": k, "terms": encode::module_vector(v, encode::ratfunc)}))
                .collect();
            let body = json!({"first": encode::poly(&series.first), "second": encode::poly(&series.second), "tail": tail});
            Ok(Outcome { report: json!({"meta": meta, "series": body}), ok: true })
        }
        RankSpec::Full(r) => {
            require_general(common, "the recursive solver")?;
            let sym = Symbols::new(r, common.order);
            let meta = meta(&rank, Some(common.order), common, Some(&sym));
            let series = solve_full(r, common, &meta)?;
            Ok(Outcome { report: json!({"meta": meta, "series": encode::irregular_series(&series)}), ok: true })
        }
    }
}

pub fn verify(common: &Common, input: Option<&Path>) -> Result<Outcome, CommandError> {
    let (series, meta) = match input {
        Some(path) => load_series(path, common)?,
        None => {
            let rank = rank_of(common)?;
            match rank {
                RankSpec::One => {
                    let (series, meta) = rank1_series(&rank, common)?;
                    let residuals: Vec<Value> = series
                        .check_relations()
                        .into_iter()
                        .map(|(n, k, holds)| {
                            json!({"relation": format!("L_{n} on v_{k}"), "window": k, "status": if holds { "zero" } else { "nonzero" }})
                        })
                        .collect();
                    let ok = residuals.iter().all(|v| v["status"] == "zero");
                    return Ok(Outcome { report: json!({"meta": meta, "residuals": residuals}), ok });
                }
                RankSpec::Full(r) => {
                    require_general(common, "the recursive solver")?;
                    let sym = Symbols::new(r, common.order);
                    let meta = meta(&rank, Some(common.order), common, Some(&sym));
                    (solve_full(r, common, &meta)?, meta)
                }
            }
        }
    };
    let report = verify_canonical(&series);
    let residuals: Vec<Value> = report.checks.iter().map(relation).collect();
    Ok(Outcome { report: json!({"meta": meta, "residuals": residuals}), ok: report.all_zero() })
}

fn decode_err(meta: &Value) -> impl Fn(DecodeError) -> CommandError + '_ {
    move |e| failed(meta, "input", e)
}

/// Rebuilds a series from a `construct` report.
fn load_series(path: &Path, common: &Common) -> Result<(IrregularSeries, Value), CommandError> {
    let text = fs::read_to_string(path).map_err(|e| usage(format!("cannot read {}: {e}", path.display())))?;
    let doc: Value = serde_json::from_str(&text).map_err(|e| usage(format!("{} is not JSON: {e}", path.display())))?;
    let meta = doc.get("meta").cloned().ok_or_else(|| usage("input has no meta block"))?;
    let rank_src = meta.get("rank").and_then(Value::as_str).ok_or_else(|| usage("input meta has no rank"))?;
    let rank = match RankSpec::parse(rank_src).map_err(usage)? {
        RankSpec::Full(r) => r,
        RankSpec::One => return Err(usage("rank-1 reports are re-verified with --rank 1")),
    };
    if let Some(flag) = &common.rank {
        if RankSpec::parse(flag).map_err(usage)? != RankSpec::Full(rank) {
            return Err(usage(format!("--rank {flag} disagrees with the input rank {rank_src}")));
        }
    }
    let order = meta.get("K").and_then(Value::as_u64).ok_or_else(|| usage("input meta has no K"))? as usize;
    let central = meta.get("central").and_then(Value::as_str).map(str::to_string);
    let setup = SeriesSetup::new(rank, order, &SolverOptions { central }).map_err(|e| failed(&meta, "input", e))?;
    let sym = setup.symbols.clone();
    let table = sym.table().clone();
    let declared: Vec<&str> = meta
        .get("variables")
        .and_then(Value::as_array)
        .map(|vs| vs.iter().filter_map(|v| v.get("name").and_then(Value::as_str)).collect())
        .unwrap_or_default();
    if declared != table.names().iter().map(String::as_str).collect::<Vec<_>>() {
        return Err(failed(&meta, "input", "variable header does not match the roster for this rank and order"));
    }
    let body = doc.get("series").ok_or_else(|| usage("input has no series block"))?;
    let derr = decode_err(&meta);
    let nu = decode_poly(&table, field_at(body, "nu", "series").map_err(&derr)?, "series.nu").map_err(&derr)?;
    let g = field_at(body, "g", "series")
        .map_err(&derr)?
        .as_array()
        .ok_or_else(|| failed(&meta, "input", "series.g is not a list"))?
        .iter()
        .enumerate()
        .map(|(j, v)| decode_poly(&table, v, &format!("series.g[{j}]")))
        .collect::<Result<Vec<_>, _>>()
        .map_err(&derr)?;
    if g.len() + 1 != rank.r {
        return Err(failed(&meta, "input", format!("expected {} exponents g_j, got {}", rank.r - 1, g.len())));
    }
    let tail_json = field_at(body, "tail", "series").map_err(&derr)?.as_array().ok_or_else(|| failed(&meta, "input", "series.tail is not a list"))?;
    if tail_json.len() != order + 1 {
        return Err(failed(&meta, "input", format!("expected {} tail entries, got {}", order + 1, tail_json.len())));
    }
    let mut tail = Vec::with_capacity(tail_json.len());
    for (k, entry) in tail_json.iter().enumerate() {
        let path = format!("series.tail[{k}]");
        let terms = field_at(entry, "terms", &path).map_err(&derr)?.as_object().ok_or_else(|| failed(&meta, "input", format!("{path}.terms is not an object")))?;
        let mut pairs = Vec::with_capacity(terms.len());
        for (key, value) in terms {
            pairs.push((decode_partition(key, &path).map_err(&derr)?, decode_poly(&table, value, &path).map_err(&derr)?));
        }
        tail.push(ModuleVector::from_terms(&setup.base, pairs));
    }
    let mut ledger = UnknownLedger::new(&sym);
    if let Some(entries) = body.get("unknowns").and_then(Value::as_array) {
        for entry in entries {
            let name = entry.get("name").and_then(Value::as_str).unwrap_or_default();
            if entry.get("status").and_then(Value::as_str) != Some("solved") {
                continue;
            }
            let slot = ledger.entries.iter_mut().find(|e| e.name == name).ok_or_else(|| failed(&meta, "input", format!("unknown {name:?} not in roster")))?;
            let order = entry.get("order").and_then(Value::as_u64).unwrap_or_default() as usize;
            let value = decode_poly(&table, field_at(entry, "value", name).map_err(&derr)?, name).map_err(&derr)?;
            slot.status = UnknownStatus::Solved { order, value };
        }
    }
    drop(derr);
    Ok((setup.assemble(nu, g, tail, ledger), meta))
}

fn fields_json(sym: &Symbols, set: &VectorFieldSet) -> Value {
    Value::Array(set.fields.iter().enumerate().map(|(n, f)| json!({"index": n, "components": encode::field(sym.table(), f)})).collect())
}

fn lstar_json(op: &frames::CanonicalOperator) -> Value {
    json!({
        "basis": match op.basis { frames::GeneratorBasis::Shifted => "shifted", frames::GeneratorBasis::Modes => "modes" },
        "coeff": encode::matrix(&op.coeff),
    })
}

pub fn frames_cmd(common: &Common) -> Result<Outcome, CommandError> {
    let rank = match rank_of(common)? {
        RankSpec::Full(r) => r,
        RankSpec::One => return Err(usage("frames need rank at least 2 or 3/2")),
    };
    let sym = Symbols::new(rank, 0);
    let meta = meta(&RankSpec::Full(rank), None, common, Some(&sym));
    let r = rank.r;
    let coords = |f: &frames::FrameMatrix| Value::Array(f.coords.iter().map(|&c| json!(sym.table().name(c))).collect());
    let body = match rank.kind {
        RankKind::Integer => {
            let set = frames::integer_fields(&sym).map_err(|e| failed(&meta, "frames", e))?;
            let frame = frames::build_frame_integer(&sym).map_err(|e| failed(&meta, "frames", e))?;
            let op = frames::build_lstar_integer(&sym, &frame).map_err(|e| failed(&meta, "frames", e))?;
            let sign = if (r * (r - 1) / 2) % 2 == 0 { 1 } else { -1 };
            let fact: i64 = (1..=r as i64).product();
            let closed = sym.c(r as i64).pow(r as u32).scale_int(sign * fact);
            json!({
                "coordinates": coords(&frame),
                "matrix": encode::matrix(&frame.entries),
                "det": encode::poly(&frame.det),
                "det_closed_form": encode::poly(&closed),
                "det_matches": frame.det == closed,
                "inverse_last_row": encode::polys(frame.inverse_row(r)),
                "lstar": lstar_json(&op),
                "fields": fields_json(&sym, &set),
                "bracket_failures": set.bracket_failures().len(),
            })
        }
        RankKind::Half => {
            let set = frames::build_half_fields(&sym).map_err(|e| failed(&meta, "frames", e))?;
            let frame = frames::build_frame_half(&sym, &set).map_err(|e| failed(&meta, "frames", e))?;
            let (op, ratio) = frames::build_lstar_half(&sym, &frame).map_err(|e| failed(&meta, "frames", e))?;
            let kappa = frames::half_kappa(r);
            let closed = &sym.lambda().pow(r as u32).scale(&kappa) * &sym.c(r as i64 - 1).pow(r as u32 - 1).unit_inverse().expect("unit");
            let scalar_failures = frames::scalar_action_table(&sym, &set).iter().filter(|(_, _, l, rr)| l != rr).count();
            json!({
                "coordinates": coords(&frame),
                "matrix": encode::matrix(&frame.entries),
                "det": encode::poly(&frame.det),
                "kappa": encode::rational(&kappa),
                "det_closed_form": encode::poly(&closed),
                "det_matches": frame.det == closed,
                "inverse_last_row": encode::polys(frame.inverse_row(r)),
                "lstar": lstar_json(&op),
                "lstar_lowest_ratio": encode::rational(&ratio),
                "fields": fields_json(&sym, &set),
                "scalars": encode::polys(&(r..2 * r).map(|m| frames::half_scalar(&sym, m)).collect::<Vec<_>>()),
                "bracket_failures": set.bracket_failures().len(),
                "scalar_action_failures": scalar_failures,
            })
        }
    };
    let ok = body["det_matches"] == true && body["bracket_failures"] == 0;
    Ok(Outcome { report: json!({"meta": meta, "frames": body}), ok })
}

pub fn gram_cmd(common: &Common, from: u32, to: u32) -> Result<Outcome, CommandError> {
    let rho = match rank_of(common)? {
        RankSpec::One => 1,
        RankSpec::Full(Rank { r, kind: RankKind::Integer }) => r,
        RankSpec::Full(_) => return Err(usage("gram blocks are computed for integer-rank modules")),
    };
    if from > to {
        return Err(usage(format!("--from {from} exceeds --to {to}")));
    }
    let convention = common.convention.convention();
    if convention == Convention::Section2Display && rho > 2 {
        return Err(usage("the section2 display tables only cover rank-1 and rank-2 modules"));
    }
    let sym = Symbols::new(Rank::integer(rho), 0);
    let spec = if rho == 1 { RankSpec::One } else { RankSpec::Full(Rank::integer(rho)) };
    let mut meta = meta(&spec, None, common, Some(&sym));
    meta["levels"] = json!([from, to]);
    let central = central_poly(&sym, common)?;
    let eigen = integer_eigenvalues(&sym, rho, &sym.c0(), convention).expect("table exists");
    let ctx = ModuleContext::new(rho, eigen.clone(), central);
    let block = gram_matrix(&ctx, from, to).map_err(|e| failed(&meta, "gram", e))?;
    let det = block.determinant();
    let top = eigen.last().expect("nonempty").clone();
    let expected = expected_exponent(from, to);
    let observed = observed_exponent(&det, &top, 4 * expected + 4);
    let record = match gram_det_verify(&ctx, from, to) {
        Ok(d) => json!({"proportional": true, "ratio": encode::rational(&d.ratio)}),
        Err(GramError::ProportionalityFailure { .. }) => json!({"proportional": false}),
        Err(e) => return Err(failed(&meta, "gram", e)),
    };
    let mut record = record;
    record["base"] = encode::poly(&top);
    record["expected_exponent"] = json!(expected);
    record["total_length"] = json!(total_length(from, to));
    record["observed"] = match observed {
        Some((k, c)) => json!({"exponent": k, "ratio": encode::rational(&c)}),
        None => Value::Null,
    };
    let ok = record["proportional"] == true;
    let index: Vec<String> = block.index().iter().map(|p| p.to_string()).collect();
    let body = json!({
        "index": index,
        "entries": encode::matrix(block.entries()),
        "det": encode::poly(&det),
        "determinant": record,
    });
    Ok(Outcome { report: json!({"meta": meta, "gram": body}), ok })
}

pub fn gauge_cmd(common: &Common) -> Result<Outcome, CommandError> {
    let rank = match rank_of(common)? {
        RankSpec::Full(r) => r,
        RankSpec::One => return Err(usage("the gauge pipeline needs rank at least 2 or 3/2")),
    };
    require_general(common, "the recursive solver")?;
    let sym = Symbols::new(rank, common.order);
    let mut meta = meta(&RankSpec::Full(rank), Some(common.order), common, Some(&sym));
    let series = solve_full(rank, common, &meta)?;
    let completion: Option<ScalarCompletion> = match rank.kind {
        RankKind::Integer => None,
        RankKind::Half => {
            let bound = common.bound.unwrap_or(2);
            meta["bound"] = json!(bound);
            Some(gauge::scalar_completion_half(&series.symbols, bound).map_err(|e| failed(&meta, "completion", e))?)
        }
    };
    let obs = gauge::obstructions(&series, completion.as_ref()).map_err(|e| failed(&meta, "obstructions", e))?;
    let ops = obs.operators.clone().expect("built from a series");
    let frobenius: Vec<IdentityCheck> = gauge::frobenius_verify(&obs, &ops.fields);
    let lstar = gauge::lstar_combination(&obs, &ops.frame);
    let mut body = json!({
        "obstructions": Value::Array(obs.a.iter().map(encode::series).collect()),
        "higher_modes": if obs.higher_failures.is_empty() { "zero" } else { "nonzero" },
        "frobenius": Value::Array(frobenius.iter().map(identity).collect()),
        "lstar_combination": identity(&lstar),
    });
    if let Some(c) = &completion {
        body["sigma"] = encode::polys(&c.sigma);
        body["maurer_cartan"] = Value::Array(
            c.maurer_cartan.iter().map(|(i, j, p)| json!({"pair": [i, j], "residual": encode::poly(p)})).collect(),
        );
        body["gauge_constraint"] = encode::poly(&c.gauge_residual);
    }
    let mut ok = obs.higher_failures.is_empty() && frobenius.iter().all(IdentityCheck::passed) && lstar.passed();
    match gauge::integrate_potential(&obs, &ops.frame, &ops.fields) {
        Ok(decomp) => {
            let passive: Vec<&str> = decomp.passive.iter().map(|&v| sym.table().name(v)).collect();
            body["potential"] = json!({
                "g0": encode::poly(&decomp.g0),
                "log_exponents": encode::polys(&decomp.log_exponents),
                "constant_slot": format!("C({})", passive.join(", ")),
            });
            let report = gauge::apply_gauge_and_verify(&series, &obs, &decomp).map_err(|e| failed(&meta, "gauge", e))?;
            body["residuals"] = Value::Array(report.checks.iter().chain(&report.literal).map(identity).collect());
            ok &= report.passed();
        }
        Err(e) => {
            body["potential"] = json!({"error": e.to_string()});
            ok = false;
        }
    }
    Ok(Outcome { report: json!({"meta": meta, "gauge": body}), ok })
}
