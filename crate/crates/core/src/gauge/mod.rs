//! Lower-mode deformation structure of a canonical irregular series: the
//! scalar obstructions, their integrability, the potential that absorbs
//! them, and the scalar completion needed at half-integer rank.

mod action;
mod completion;

pub use action::{apply_field, BaseDerivatives, ModuleSeries};
pub use completion::{scalar_completion_half, ScalarCompletion};

use std::collections::BTreeMap;

use thiserror::Error;

use crate::frames::{self, FrameError, FrameMatrix, VectorField};
use crate::ring::{series_divide, RingError};
use crate::solver::{GaugeExtension, IrregularSeries, UnknownStatus};
use crate::symbols::{RankKind, Symbols};
use crate::virasoro::eigen::general_eigenvalue;
use crate::{Poly, Series};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum GaugeError {
    #[error("truncation order {order} is too low; need at least {needed}")]
    OrderTooLow { order: usize, needed: usize },
    #[error("potential component {component} is known only through order {window}")]
    WindowTooShort { component: usize, window: i64 },
    #[error("half-integer rank needs a scalar completion")]
    MissingCompletion,
    #[error("unknown {0} is still unsolved")]
    UnsolvedUnknown(String),
    #[error("exponent {0} is not annihilated by the lower fields")]
    MovingExponent(String),
    #[error("R_{mode} W is not proportional to W at order {order}")]
    ProportionalityFailure { mode: usize, order: i64 },
    #[error("obstructions are not integrable: {0}")]
    NotIntegrable(String),
    #[error("one-form is not closed at monomial {0}")]
    NotClosed(String),
    #[error("potential component {component} depends on the expansion variable at order {order}")]
    ExpansionVariableLeak { component: usize, order: i64 },
    #[error("zero mode {0} involves a non-passive variable")]
    WeightZeroObstruction(String),
    #[error("gauged residual R_{mode} is nonzero at order {order}")]
    ResidualNonZero { mode: usize, order: i64 },
    #[error("no scalar completion with exponent bound {bound}")]
    Infeasible { bound: i64 },
    #[error(transparent)]
    Frame(#[from] FrameError),
    #[error(transparent)]
    Ring(#[from] RingError),
}

/// The operators `R_n = L_n - s_n - F_n`: scalar parts `s_n` and vector
/// fields `F_n` (zero for `n >= r`).
#[derive(Clone, Debug)]
pub struct LowerOperators {
    pub fields: Vec<VectorField>,
    /// `s_0..s_{2r}`.
    pub scalars: Vec<Poly>,
    pub frame: FrameMatrix,
}

impl LowerOperators {
    pub fn build(series: &IrregularSeries, completion: Option<&ScalarCompletion>) -> Result<Self, GaugeError> {
        let sym = &series.symbols;
        let r = sym.r();
        match sym.rank().kind {
            RankKind::Integer => {
                let fields = frames::integer_fields(sym)?.fields;
                let mut scalars = vec![series.weights.delta_c0.clone()];
                scalars.extend((1..=2 * r).map(|n| series.weights.target[n - 1].clone()));
                Ok(LowerOperators { fields, scalars, frame: frames::build_frame_integer(sym)? })
            }
            RankKind::Half => {
                let completion = completion.ok_or(GaugeError::MissingCompletion)?;
                let set = frames::build_half_fields(sym)?;
                let frame = frames::build_frame_half(sym, &set)?;
                let mut scalars = completion.sigma.clone();
                scalars.extend((r..=2 * r).map(|m| frames::half_scalar(sym, m)));
                Ok(LowerOperators { fields: set.fields, scalars, frame })
            }
        }
    }

    pub fn field(&self, n: usize) -> VectorField {
        self.fields.get(n).cloned().unwrap_or_else(VectorField::zero)
    }
}

/// Scalar obstructions `a_i = {R_i W} / {W}` for `0 <= i < r`, with the
/// residual series they were read from.
#[derive(Clone, Debug)]
pub struct ObstructionSet {
    pub symbols: Symbols,
    /// `a_0..a_{r-1}`.
    pub a: Vec<Series>,
    /// `R_i W / P` for `i = 0..r-1`, `P` the scalar prefactor.
    pub residuals: Vec<ModuleSeries>,
    /// `W / P`.
    pub normalized: Option<ModuleSeries>,
    pub operators: Option<LowerOperators>,
    /// `(n, order)` of every nonzero coefficient of `R_n W` for `r <= n <= 2r`.
    pub higher_failures: Vec<(usize, i64)>,
}

impl ObstructionSet {
    /// Obstructions given directly as series (no module data attached).
    pub fn from_series(symbols: &Symbols, a: Vec<Series>) -> Self {
        ObstructionSet { symbols: symbols.clone(), a, residuals: Vec::new(), normalized: None, operators: None, higher_failures: Vec::new() }
    }

    pub fn rank(&self) -> usize {
        self.a.len()
    }

    /// `a_n`, zero for `n >= r`.
    pub fn get(&self, n: usize) -> Option<&Series> {
        self.a.get(n)
    }

    fn window(&self) -> i64 {
        self.a.iter().filter_map(|s| s.high()).min().unwrap_or(i64::MAX)
    }
}

fn t_shift(field: &VectorField, t: usize) -> i64 {
    field
        .components()
        .iter()
        .filter_map(|(&x, c)| c.degree_range(t).map(|(lo, _)| lo - i64::from(x == t)))
        .min()
        .unwrap_or(0)
        .min(0)
}

fn poly_low(p: &Poly, t: usize) -> i64 {
    p.degree_range(t).map_or(0, |(lo, _)| lo.min(0))
}

fn check_solved(series: &IrregularSeries) -> Result<(), GaugeError> {
    let r = series.symbols.r();
    if series.order() + 1 < r {
        return Err(GaugeError::OrderTooLow { order: series.order(), needed: r - 1 });
    }
    for entry in &series.ledger.entries {
        let is_prefactor = entry.var == series.symbols.nu_idx() || (1..r).any(|j| series.symbols.g_idx(j) == entry.var);
        if is_prefactor && matches!(entry.status, UnknownStatus::Pending) {
            return Err(GaugeError::UnsolvedUnknown(entry.name.clone()));
        }
    }
    Ok(())
}

/// `F(log P)` for `P = t^nu exp(sum_j g_j t^{-j})`.
fn prefactor_log_derivative(series: &IrregularSeries, field: &VectorField) -> Result<Poly, GaugeError> {
    let sym = &series.symbols;
    let t = sym.expansion_idx();
    let moved = field.apply(&series.nu);
    if !moved.is_zero() {
        return Err(GaugeError::MovingExponent(series.nu.to_string()));
    }
    let ft = field.component(t).cloned().unwrap_or_else(|| sym.zero());
    let mut out = &(&series.nu * &ft) * &Poly::var_pow(sym.table(), t, -1);
    for j in 1..sym.r() {
        let term = series.g_j(j) * &Poly::var_pow(sym.table(), t, -(j as i64));
        out = &out + &field.apply(&term);
    }
    Ok(out)
}

fn base_derivatives(series: &IrregularSeries) -> BaseDerivatives {
    let sym = &series.symbols;
    let rho = sym.r() - 1;
    let momentum = match sym.rank().kind {
        RankKind::Integer => sym.c0p(),
        RankKind::Half => sym.c0(),
    };
    let mut scalars = vec![sym.conformal_weight(&momentum)];
    scalars.extend((1..rho).map(|j| general_eigenvalue(sym, j as i64, &momentum, rho)));
    BaseDerivatives::new(sym, &series.base, &scalars)
}

/// `R_n W / P` through the window allowed by the prefactor and the
/// operator coefficients.
pub fn lower_residual(
    series: &IrregularSeries,
    ops: &LowerOperators,
    base: &mut BaseDerivatives,
    normalized: &ModuleSeries,
    n: usize,
) -> Result<ModuleSeries, GaugeError> {
    let t = series.symbols.expansion_idx();
    let mut moved = ModuleSeries::new(&series.base, normalized.high);
    for (&k, u) in &normalized.orders {
        moved.accumulate(k, u.apply_mode(n as i64));
    }
    let scalar = ops.scalars.get(n).cloned().unwrap_or_else(|| series.symbols.zero());
    let mut out = moved.sub(&normalized.mul_poly(&scalar, t));
    let field = ops.field(n);
    if !field.is_zero() {
        out = out.sub(&apply_field(&field, normalized, t, base));
        let log = prefactor_log_derivative(series, &field)?;
        out = out.sub(&normalized.mul_poly(&log, t));
    }
    Ok(out)
}

fn module_series_times(a: &Series, s: &ModuleSeries) -> ModuleSeries {
    let high = match a.high() {
        Some(h) => (h + s.lowest().unwrap_or(0)).min(s.high + a.low()),
        None => s.high + a.low(),
    };
    let mut out = ModuleSeries::new(&s.ctx, high);
    for (m, c) in a.iter() {
        for (&k, u) in &s.orders {
            out.accumulate(m + k, u.scale(c));
        }
    }
    out
}

fn constant_series(sym: &Symbols, s: &ModuleSeries) -> Result<Series, GaugeError> {
    let t = sym.expansion_idx();
    Ok(Series::from_poly(&s.constant_terms(sym, t), t, Some(s.high)))
}

/// `W / P` through the last order free of pending unknowns.
fn determined_part(series: &IrregularSeries) -> ModuleSeries {
    let pending = series.ledger.pending_vars();
    let first_open = series
        .tail
        .iter()
        .position(|v| v.terms().values().any(|c| pending.iter().any(|&p| c.contains_var(p))))
        .unwrap_or(series.tail.len());
    ModuleSeries::from_tail(&series.base, &series.tail).truncate(first_open as i64 - 1)
}

/// Forms `R_i W` for every lower mode, divides by the constant-term series
/// and checks that each residual is proportional to `W` on its window.
pub fn obstructions(series: &IrregularSeries, completion: Option<&ScalarCompletion>) -> Result<ObstructionSet, GaugeError> {
    check_solved(series)?;
    let sym = &series.symbols;
    let r = sym.r();
    let ops = LowerOperators::build(series, completion)?;
    let mut base = base_derivatives(series);
    let normalized = determined_part(series);
    let theta = constant_series(sym, &normalized)?;

    let mut a = Vec::with_capacity(r);
    let mut residuals = Vec::with_capacity(r);
    for i in 0..r {
        let res = lower_residual(series, &ops, &mut base, &normalized, i)?;
        let projected = constant_series(sym, &res)?;
        let quotient = series_divide(&projected, &theta, None)?;
        let diff = res.sub(&module_series_times(&quotient, &normalized));
        if let Some(order) = diff.lowest() {
            return Err(GaugeError::ProportionalityFailure { mode: i, order });
        }
        a.push(quotient);
        residuals.push(res);
    }
    let mut higher_failures = Vec::new();
    for n in r..=2 * r {
        let res = lower_residual(series, &ops, &mut base, &normalized, n)?;
        higher_failures.extend(res.orders.keys().map(|&k| (n, k)));
    }
    Ok(ObstructionSet {
        symbols: sym.clone(),
        a,
        residuals,
        normalized: Some(normalized),
        operators: Some(ops),
        higher_failures,
    })
}

/// One checked identity, with the highest order it was checked through.
#[derive(Clone, Debug, PartialEq)]
pub struct IdentityCheck {
    pub label: String,
    pub window: i64,
    /// Nonzero orders of the residual within the window.
    pub failing_orders: Vec<i64>,
}

impl IdentityCheck {
    pub fn passed(&self) -> bool {
        self.failing_orders.is_empty()
    }
}

fn check_poly(label: String, residual: &Poly, t: usize, window: i64) -> IdentityCheck {
    let failing_orders = residual.split_by(t).into_iter().map(|(k, _)| k).filter(|&k| k <= window).collect();
    IdentityCheck { label, window, failing_orders }
}

/// `F_i a_j - F_j a_i = (j - i) a_{i+j}` for `0 <= i < j < r`, with
/// `a_N = 0` for `N >= r`.
pub fn frobenius_verify(obs: &ObstructionSet, fields: &[VectorField]) -> Vec<IdentityCheck> {
    let sym = &obs.symbols;
    let t = sym.expansion_idx();
    let r = obs.rank();
    let window = obs.window();
    let mut out = Vec::new();
    for i in 0..r {
        for j in i + 1..r {
            let (fi, fj) = (&fields[i], &fields[j]);
            let mut res = &fi.apply(&obs.a[j].to_poly()) - &fj.apply(&obs.a[i].to_poly());
            if i + j < r {
                res = &res - &obs.a[i + j].to_poly().scale_int((j - i) as i64);
            }
            let w = window + t_shift(fi, t).min(t_shift(fj, t));
            out.push(check_poly(format!("frobenius({i},{j})"), &res, t, w));
        }
    }
    out
}

/// `sum_i (frame^{-1})_{k,i+1} a_i` for `k = 1..r` with the window each
/// component is known through.
pub fn potential_components(obs: &ObstructionSet, frame: &FrameMatrix) -> Vec<(Poly, i64)> {
    let sym = &obs.symbols;
    let t = sym.expansion_idx();
    let window = obs.window();
    (1..=frame.size())
        .map(|k| {
            let row = frame.inverse_row(k);
            let mut w = window;
            let mut acc = sym.zero();
            for (i, coef) in row.iter().enumerate() {
                if coef.is_zero() {
                    continue;
                }
                w = w.min(window + poly_low(coef, t));
                acc = &acc + &(coef * &obs.a[i].to_poly());
            }
            (acc, w)
        })
        .collect()
}

/// The `t^r`-scaled combination of obstructions selected by the last
/// inverse-frame row; it must vanish for a canonical series.
pub fn lstar_combination(obs: &ObstructionSet, frame: &FrameMatrix) -> IdentityCheck {
    let sym = &obs.symbols;
    let t = sym.expansion_idx();
    let r = frame.size();
    let scale = sym.expansion().pow(r as u32);
    let window = obs.window();
    let mut acc = sym.zero();
    for (i, coef) in frame.inverse_row(r).iter().enumerate() {
        acc = &acc + &(&(&scale * coef) * &obs.a[i].to_poly());
    }
    let w = frame.inverse_row(r).iter().filter(|c| !c.is_zero()).fold(window, |w, c| w.min(window + poly_low(&(&scale * c), t)));
    check_poly("lstar-combination".into(), &acc, t, w)
}

/// `h = g_0 + sum_j nu_j log c_j + C`, with `C` a free function of the
/// passive variables.
#[derive(Clone, Debug, PartialEq)]
pub struct PotentialDecomposition {
    pub g0: Poly,
    /// `nu_1..nu_{r-1}`.
    pub log_exponents: Vec<Poly>,
    /// Variables the free constant may depend on.
    pub passive: Vec<usize>,
}

impl PotentialDecomposition {
    /// `F(h)` without the free constant.
    pub fn derivative(&self, sym: &Symbols, field: &VectorField) -> Poly {
        self.log_exponents.iter().enumerate().fold(field.apply(&self.g0), |acc, (j, nu)| {
            let c = sym.c(j as i64 + 1);
            let comp = field.component(sym.c_idx(j + 1)).cloned().unwrap_or_else(|| sym.zero());
            &acc + &(&(nu * &comp) * &c.unit_inverse().expect("c_j is a unit"))
        })
    }

    /// Writes this decomposition into the series prefactor.
    pub fn extend(&self, series: &IrregularSeries) -> IrregularSeries {
        let mut out = series.clone();
        out.gauge = Some(GaugeExtension { g0: self.g0.clone(), log_exponents: self.log_exponents.clone() });
        out
    }
}

fn passive_vars(sym: &Symbols) -> Vec<usize> {
    match sym.rank().kind {
        RankKind::Integer => vec![sym.q_idx(), sym.c0p_idx(), sym.c0_idx()],
        RankKind::Half => vec![sym.q_idx(), sym.c0_idx()],
    }
}

/// Integrates the obstructions into a potential on the lower coordinates
/// and splits it into an exact part and logarithmic zero modes.
pub fn integrate_potential(obs: &ObstructionSet, frame: &FrameMatrix, fields: &[VectorField]) -> Result<PotentialDecomposition, GaugeError> {
    let sym = &obs.symbols;
    let r = obs.rank();
    let t = sym.expansion_idx();
    if let Some(bad) = frobenius_verify(obs, fields).into_iter().find(|c| !c.passed()) {
        return Err(GaugeError::NotIntegrable(bad.label));
    }
    let lstar = lstar_combination(obs, frame);
    if !lstar.passed() {
        return Err(GaugeError::NotIntegrable(lstar.label));
    }
    let comps = potential_components(obs, frame);
    let mut grads = Vec::with_capacity(r - 1);
    for (k, (comp, window)) in comps.iter().enumerate() {
        if *window < 0 {
            return Err(GaugeError::WindowTooShort { component: k + 1, window: *window });
        }
        let mut zero_order = sym.zero();
        for (order, part) in comp.split_by(t) {
            if order > *window {
                continue;
            }
            if order != 0 || k + 1 == r {
                return Err(GaugeError::ExpansionVariableLeak { component: k + 1, order });
            }
            zero_order = part;
        }
        if k + 1 < r {
            grads.push(zero_order);
        }
    }
    for g in &grads {
        if let Some(&v) = sym.unknown_indices().iter().find(|&&v| g.contains_var(v)) {
            return Err(GaugeError::UnsolvedUnknown(sym.table().name(v).to_string()));
        }
    }
    decompose_closed_form(sym, &grads)
}

/// Splits `sum_j grads[j] dc_{j+1}` into `d g_0 + sum_j nu_j dc_j / c_j`.
pub fn decompose_closed_form(sym: &Symbols, grads: &[Poly]) -> Result<PotentialDecomposition, GaugeError> {
    let active: Vec<usize> = (1..=grads.len()).map(|j| sym.c_idx(j)).collect();
    let passive = passive_vars(sym);
    let table = sym.table();
    // A_j = c_j dh/dc_j grouped by the exponent vector in the active variables.
    let mut groups: BTreeMap<Vec<i64>, Vec<Poly>> = BTreeMap::new();
    for (j, g) in grads.iter().enumerate() {
        let scaled = g * &sym.c(j as i64 + 1);
        for (exps, coef) in scaled.terms() {
            let alpha: Vec<i64> = active.iter().map(|&v| exps[v] as i64).collect();
            let mut rest = exps.clone();
            for &v in &active {
                rest[v] = 0;
            }
            let entry = groups.entry(alpha).or_insert_with(|| vec![sym.zero(); grads.len()]);
            entry[j] = &entry[j] + &Poly::monomial(table, coef.clone(), rest);
        }
    }
    let mut g0 = sym.zero();
    let mut log_exponents = vec![sym.zero(); grads.len()];
    for (alpha, parts) in &groups {
        for i in 0..parts.len() {
            for j in i + 1..parts.len() {
                if parts[j].scale_int(alpha[i]) != parts[i].scale_int(alpha[j]) {
                    return Err(GaugeError::NotClosed(format_alpha(alpha)));
                }
            }
        }
        let monomial = alpha.iter().enumerate().fold(sym.one(), |acc, (j, &e)| &acc * &Poly::var_pow(table, active[j], e));
        match alpha.iter().position(|&e| e != 0) {
            Some(j) => {
                let b = parts[j].scale(&crate::Rational::new(1.into(), alpha[j].into()));
                g0 = &g0 + &(&b * &monomial);
            }
            None => {
                for (j, part) in parts.iter().enumerate() {
                    if let Some(v) = (0..table.len()).find(|v| part.contains_var(*v) && !passive.contains(v)) {
                        return Err(GaugeError::WeightZeroObstruction(format!("{} in {}", table.name(v), part)));
                    }
                    log_exponents[j] = part.clone();
                }
            }
        }
    }
    let decomposition = PotentialDecomposition { g0, log_exponents, passive };
    for (j, g) in grads.iter().enumerate() {
        let x = active[j];
        let c = sym.c(j as i64 + 1);
        let rebuilt = &decomposition.g0.derivative(x) + &(&decomposition.log_exponents[j] * &c.unit_inverse().expect("unit"));
        if &rebuilt != g {
            return Err(GaugeError::NotClosed(format!("component {}", j + 1)));
        }
    }
    Ok(decomposition)
}

fn format_alpha(alpha: &[i64]) -> String {
    let parts: Vec<String> = alpha.iter().enumerate().map(|(j, e)| format!("c{}^{e}", j + 1)).collect();
    parts.join("*")
}

/// Result of re-checking the lower equations after gauging.
#[derive(Clone, Debug)]
pub struct GaugeReport {
    pub checks: Vec<IdentityCheck>,
    /// `a_i - F_i(h)` on each obstruction window.
    pub literal: Vec<IdentityCheck>,
    pub gauged: IrregularSeries,
}

impl GaugeReport {
    pub fn passed(&self) -> bool {
        self.checks.iter().chain(&self.literal).all(IdentityCheck::passed)
    }
}

/// Multiplies the series by `exp(h)` and re-checks `R_i (fW) = 0` for every
/// lower mode on its window.
pub fn apply_gauge_and_verify(
    series: &IrregularSeries,
    obs: &ObstructionSet,
    decomp: &PotentialDecomposition,
) -> Result<GaugeReport, GaugeError> {
    let sym = &series.symbols;
    let t = sym.expansion_idx();
    let (Some(ops), Some(normalized)) = (&obs.operators, &obs.normalized) else {
        return Err(GaugeError::NotIntegrable("obstructions carry no module data".into()));
    };
    let mut checks = Vec::new();
    let mut literal = Vec::new();
    for (i, res) in obs.residuals.iter().enumerate() {
        let field = ops.field(i);
        let dh = decomp.derivative(sym, &field);
        let diff = res.sub(&normalized.mul_poly(&dh, t));
        checks.push(IdentityCheck {
            label: format!("R_{i}(fW)"),
            window: diff.high,
            failing_orders: diff.orders.keys().copied().collect(),
        });
        let a = &obs.a[i];
        let w = a.high().unwrap_or(i64::MAX);
        literal.push(check_poly(format!("a_{i} = F_{i}(h)"), &(&a.to_poly() - &dh), t, w));
    }
    Ok(GaugeReport { checks, literal, gauged: decomp.extend(series) })
}

/// Runs obstructions, integrability, integration and the gauged re-check
/// in sequence.
pub fn run_pipeline(series: &IrregularSeries, completion: Option<&ScalarCompletion>) -> Result<(ObstructionSet, PotentialDecomposition, GaugeReport), GaugeError> {
    let obs = obstructions(series, completion)?;
    let ops = obs.operators.clone().expect("built with module data");
    let decomp = integrate_potential(&obs, &ops.frame, &ops.fields)?;
    let report = apply_gauge_and_verify(series, &obs, &decomp)?;
    if let Some((mode, bad)) = report.checks.iter().enumerate().find(|(_, c)| !c.passed()) {
        return Err(GaugeError::ResidualNonZero { mode, order: bad.failing_orders[0] });
    }
    Ok((obs, decomp, report))
}
