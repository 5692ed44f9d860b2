//! JSON scenario model and runner: every library subsystem is reachable
//! from a declarative scenario file, and every run emits a deterministic
//! JSON report (plus CSV curve tables) keyed only by the scenario content
//! and its seed.

use std::path::{Path, PathBuf};
use std::sync::Arc;

use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use crate::compactness::{
    fk_scan, series_compactness_demo, translation_counterexample,
    translation_counterexample_family, translation_control, FkGrids, InputFamily,
};
use crate::error::{Error, Result};
use crate::exponents::{rat, Exp, ExpVector, RVector};
use crate::grid::{CubeFamily, FamilyMode, Grid, SampledFunction, SampledWeight};
use crate::interpolation::{
    interpolate_apr, interpolate_limited_range, verify_log_convexity, DiagonalOperator,
    DiagonalSpaces,
};
use crate::numerics::{estimate_ap, estimate_apr, estimate_rh};
use crate::operators::{
    commutator, FractionalIntegral, LineOmega, ModulusOfContinuity, MultilinearOp, OpHandle,
    ScaledOp, TruncatedKernel, TruncatedSingular,
};
use crate::power_weights::{in_ap, in_apq, in_apr, in_reverse_holder, PowerWeight, RhExponent};

/// A rational number in scenario files: `[numerator, denominator]`.
pub type FracSpec = [i64; 2];

fn frac_to_exp(f: &FracSpec) -> Result<Exp> {
    Exp::from_frac(f[0], f[1])
}

fn frac_vec_to_expvec(fs: &[FracSpec]) -> Result<ExpVector> {
    ExpVector::new(fs.iter().map(frac_to_exp).collect::<Result<_>>()?)
}

fn frac_vec_to_rvec(fs: &[FracSpec]) -> Result<RVector> {
    RVector::new(fs.iter().map(frac_to_exp).collect::<Result<_>>()?)
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PowerWeightSpec {
    /// Exponent `a` of `|x|^a` as `[num, den]`.
    pub exponent: FracSpec,
    pub dim: u32,
}

impl PowerWeightSpec {
    fn build(&self) -> Result<PowerWeight> {
        PowerWeight::new(rat(self.exponent[0], self.exponent[1]), self.dim)
    }
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ClassSpec {
    Ap { p: FracSpec },
    ReverseHolder { s: FracSpec },
    Apq { p: Vec<FracSpec>, q: FracSpec },
    Apr { p: Vec<FracSpec>, r: Vec<FracSpec> },
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct WeightCheckSpec {
    pub weights: Vec<PowerWeightSpec>,
    pub class: ClassSpec,
    #[serde(default)]
    pub expect_in_class: Option<bool>,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GridSpec {
    pub dim: usize,
    pub half_width: f64,
    pub cells: usize,
}

impl GridSpec {
    fn build(&self) -> Result<Grid> {
        Grid::new(self.dim, self.half_width, self.cells)
    }
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FamilySpec {
    pub depth: u32,
    pub mode: FamilyMode,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum WeightDataSpec {
    Power(PowerWeightSpec),
    /// Two-level step weight on the line: `low` left of `split`, `high`
    /// right of it.
    Step { split: f64, low: f64, high: f64 },
    /// Explicit positive samples, one per grid cell.
    Samples(Vec<f64>),
}

impl WeightDataSpec {
    fn sample(&self, grid: &Grid) -> Result<SampledWeight> {
        match self {
            WeightDataSpec::Power(p) => SampledWeight::from_power(grid.clone(), &p.build()?),
            WeightDataSpec::Step { split, low, high } => {
                let (split, low, high) = (*split, *low, *high);
                SampledWeight::from_fn(grid.clone(), move |x| {
                    if x[0] < split {
                        low
                    } else {
                        high
                    }
                })
            }
            WeightDataSpec::Samples(values) => SampledWeight::new(grid.clone(), values.clone()),
        }
    }
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum CharKindSpec {
    Ap { p: FracSpec },
    ReverseHolder { s: f64 },
    Apr { p: Vec<FracSpec>, r: Vec<FracSpec> },
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CharEstimateSpec {
    pub weights: Vec<WeightDataSpec>,
    pub char_kind: CharKindSpec,
    pub grid: GridSpec,
    pub family: FamilySpec,
    #[serde(default)]
    pub expect_value: Option<f64>,
    #[serde(default)]
    pub rel_tol: Option<f64>,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum InterpVariantSpec {
    VectorLimit { p: Vec<FracSpec>, q: Vec<FracSpec>, r: Vec<FracSpec> },
    LimitedRange {
        p: Vec<FracSpec>,
        q: Vec<FracSpec>,
        lower: Vec<FracSpec>,
        /// `[0, 1]` denotes an infinite upper endpoint.
        upper: Vec<FracSpec>,
    },
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct InterpSolveSpec {
    pub variant: InterpVariantSpec,
    pub weights_first: Vec<PowerWeightSpec>,
    pub weights_second: Vec<PowerWeightSpec>,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum FunctionSpec {
    Bump { center: f64, width: f64 },
    Indicator { from: f64, to: f64 },
    OscillatingBump { width: f64, freq: f64 },
}

impl FunctionSpec {
    fn build(&self, grid: &Grid) -> Result<SampledFunction> {
        match *self {
            FunctionSpec::Bump { center, width } => SampledFunction::from_fn(grid.clone(), |x| {
                let t = (x[0] - center) / width;
                if t.abs() < 1.0 {
                    (-1.0 / (1.0 - t * t)).exp()
                } else {
                    0.0
                }
            }),
            FunctionSpec::Indicator { from, to } => SampledFunction::from_fn(grid.clone(), |x| {
                if x[0] >= from && x[0] <= to {
                    1.0
                } else {
                    0.0
                }
            }),
            FunctionSpec::OscillatingBump { width, freq } => {
                SampledFunction::from_fn(grid.clone(), |x| {
                    let t = x[0] / width;
                    if t.abs() < 1.0 {
                        (-1.0 / (1.0 - t * t)).exp()
                            * (std::f64::consts::PI * freq * x[0]).cos()
                    } else {
                        0.0
                    }
                })
            }
        }
    }
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum KernelSpec {
    Fractional { alpha: f64, arity: usize },
    Homogeneous { alpha: f64, omegas: Vec<[f64; 2]> },
    TruncatedFirstOrder { delta: f64 },
    TruncatedSignRiesz { arity: usize, delta: f64, modulus_power: f64 },
    Maximal { depth: u32, arity: usize },
}

impl KernelSpec {
    fn tag(&self) -> &'static str {
        match self {
            KernelSpec::Fractional { .. } => "operators/apply-fractional",
            KernelSpec::Homogeneous { .. } => "operators/apply-homogeneous",
            KernelSpec::TruncatedFirstOrder { .. } => "operators/apply-truncated",
            KernelSpec::TruncatedSignRiesz { .. } => "operators/apply-truncated",
            KernelSpec::Maximal { .. } => "operators/multilinear-maximal",
        }
    }

    fn build(&self, grid: &Grid) -> Result<OpHandle> {
        Ok(match self {
            KernelSpec::Fractional { alpha, arity } => {
                Arc::new(FractionalIntegral::new(grid.clone(), *alpha, *arity)?)
            }
            KernelSpec::Homogeneous { alpha, omegas } => {
                let os = omegas.iter().map(|o| LineOmega { plus: o[0], minus: o[1] }).collect();
                Arc::new(FractionalIntegral::with_omegas(grid.clone(), *alpha, os)?)
            }
            KernelSpec::TruncatedFirstOrder { delta } => Arc::new(TruncatedSingular::new(
                grid.clone(),
                TruncatedKernel::FirstOrderCommutator,
                *delta,
            )?),
            KernelSpec::TruncatedSignRiesz { arity, delta, modulus_power } => {
                Arc::new(TruncatedSingular::new(
                    grid.clone(),
                    TruncatedKernel::SignRiesz {
                        m: *arity,
                        omega: ModulusOfContinuity::power(*modulus_power)?,
                    },
                    *delta,
                )?)
            }
            KernelSpec::Maximal { depth, arity } => {
                Arc::new(MaximalOp::new(grid.clone(), *depth, *arity)?)
            }
        })
    }
}

/// Maximal function wrapped as an operator handle (sublinear, but it fits
/// the apply interface for scans and scenario runs).
struct MaximalOp {
    grid: Grid,
    cubes: CubeFamily,
    arity: usize,
}

impl MaximalOp {
    fn new(grid: Grid, depth: u32, arity: usize) -> Result<Self> {
        let cubes = CubeFamily::sliding(&grid, depth)?;
        Ok(MaximalOp { grid, cubes, arity })
    }
}

impl MultilinearOp for MaximalOp {
    fn arity(&self) -> usize {
        self.arity
    }
    fn grid(&self) -> &Grid {
        &self.grid
    }
    fn apply(&self, inputs: &[&SampledFunction]) -> Result<SampledFunction> {
        crate::operators::multilinear_maximal(inputs, &self.cubes)
    }
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OpApplySpec {
    pub grid: GridSpec,
    pub kernel: KernelSpec,
    pub inputs: Vec<FunctionSpec>,
    /// Optional commutator symbol applied in the given slot.
    #[serde(default)]
    pub symbol: Option<FunctionSpec>,
    #[serde(default)]
    pub symbol_slot: usize,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum FamilyShapeSpec {
    Translated { width: f64 },
    Dilated,
    Oscillating,
    Random,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FkScanSpec {
    pub grid: GridSpec,
    pub kernel: KernelSpec,
    #[serde(default)]
    pub symbol: Option<FunctionSpec>,
    #[serde(default)]
    pub symbol_slot: usize,
    pub family_shape: FamilyShapeSpec,
    pub family_count: usize,
    #[serde(default)]
    pub weight: Option<WeightDataSpec>,
    pub p: f64,
    pub tail_radii: Vec<f64>,
    pub translation_cells: Vec<usize>,
    pub averaging_cells: Vec<usize>,
    #[serde(default)]
    pub fractional_p0: Option<f64>,
    /// Series demo: scale factors applied to the kernel, one partial sum
    /// per prefix.
    #[serde(default)]
    pub series_scales: Option<Vec<f64>>,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum CounterexampleSpec {
    /// The pinned translation counterexample plus its smooth control.
    Translation { log2_levels: Vec<u32> },
    /// The two-parameter family with adjustable translation.
    TranslationFamily { p0: f64, p: f64, alpha: f64, h: f64, log2_levels: Vec<u32> },
    /// Strict-inclusion witness between two limiting vectors.
    Inclusion { p: Vec<FracSpec>, r: Vec<FracSpec>, s: Vec<FracSpec>, dim: u32 },
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LogConvexitySpec {
    pub instances: u32,
    pub index_count: usize,
    pub arity: usize,
    pub theta_points: u32,
    #[serde(default)]
    pub rel_tol: Option<f64>,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(tag = "kind", content = "params", rename_all = "kebab-case")]
pub enum TaskSpec {
    WeightCheck(WeightCheckSpec),
    CharEstimate(CharEstimateSpec),
    InterpSolve(InterpSolveSpec),
    OpApply(OpApplySpec),
    FkScan(FkScanSpec),
    Counterexample(CounterexampleSpec),
    LogConvexity(LogConvexitySpec),
}

/// One scenario file: a name, a seed, and a task.
#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Scenario {
    pub name: String,
    #[serde(default)]
    pub seed: u64,
    pub task: TaskSpec,
}

/// Tolerance defaults applied when a scenario leaves them unspecified.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ToleranceProfile {
    Default,
    Strict,
}

impl ToleranceProfile {
    pub fn char_rel_tol(&self) -> f64 {
        match self {
            ToleranceProfile::Default => 0.02,
            ToleranceProfile::Strict => 0.01,
        }
    }

    pub fn log_convexity_tol(&self) -> f64 {
        match self {
            ToleranceProfile::Default => 1e-12,
            ToleranceProfile::Strict => 1e-13,
        }
    }
}

/// Runner options shared by `run` and `suite`.
#[derive(Clone, Debug)]
pub struct RunOptions {
    pub out_dir: Option<PathBuf>,
    pub tolerance_profile: ToleranceProfile,
    pub seed_override: Option<u64>,
}

impl Default for RunOptions {
    fn default() -> Self {
        RunOptions {
            out_dir: None,
            tolerance_profile: ToleranceProfile::Default,
            seed_override: None,
        }
    }
}

/// Deterministic report of one scenario run.
#[derive(Clone, Debug, Serialize)]
pub struct Report {
    pub scenario: String,
    pub kind: String,
    pub seed: u64,
    /// Identifiers of the library operations the run exercised.
    pub op_tags: Vec<String>,
    /// Embedded assertions all held.
    pub passed: bool,
    pub payload: Value,
}

fn verdict_payload(v: &crate::power_weights::MembershipVerdict) -> Value {
    json!({
        "in_class": v.in_class,
        "boundary": v.boundary,
        "conditions": v.reduction_trace.iter().map(|c| json!({
            "slot": format!("{:?}", c.slot),
            "passed": c.passed,
            "boundary": c.boundary,
        })).collect::<Vec<_>>(),
    })
}

fn curve_to_csv(curve: &[(f64, f64)]) -> String {
    let mut s = String::from("x,value\n");
    for (x, v) in curve {
        s.push_str(&format!("{x},{v}\n"));
    }
    s
}

fn run_weight_check(spec: &WeightCheckSpec, tags: &mut Vec<String>) -> Result<(bool, Value)> {
    let weights: Vec<PowerWeight> =
        spec.weights.iter().map(|w| w.build()).collect::<Result<_>>()?;
    let verdict = match &spec.class {
        ClassSpec::Ap { p } => {
            tags.push("power-weights/in-ap".into());
            in_ap(&weights[0], &frac_to_exp(p)?)?
        }
        ClassSpec::ReverseHolder { s } => {
            tags.push("power-weights/in-reverse-holder".into());
            in_reverse_holder(&weights[0], &RhExponent::finite(rat(s[0], s[1]))?)?
        }
        ClassSpec::Apq { p, q } => {
            tags.push("power-weights/in-apq".into());
            in_apq(&weights, &frac_vec_to_expvec(p)?, &frac_to_exp(q)?)?
        }
        ClassSpec::Apr { p, r } => {
            tags.push("power-weights/in-apr".into());
            tags.push("exponents/apr-characterization".into());
            in_apr(&weights, &frac_vec_to_expvec(p)?, &frac_vec_to_rvec(r)?)?
        }
    };
    let passed = spec.expect_in_class.map_or(true, |e| e == verdict.in_class);
    Ok((passed, verdict_payload(&verdict)))
}

fn run_char_estimate(
    spec: &CharEstimateSpec,
    profile: ToleranceProfile,
    tags: &mut Vec<String>,
) -> Result<(bool, Value, Vec<(String, String)>)> {
    let grid = spec.grid.build()?;
    let family = CubeFamily::new(&grid, spec.family.depth, spec.family.mode)?;
    let sampled: Vec<SampledWeight> =
        spec.weights.iter().map(|w| w.sample(&grid)).collect::<Result<_>>()?;
    let est = match &spec.char_kind {
        CharKindSpec::Ap { p } => {
            tags.push("numerics/estimate-ap".into());
            estimate_ap(&sampled[0], &frac_to_exp(p)?, &family)?
        }
        CharKindSpec::ReverseHolder { s } => {
            tags.push("numerics/estimate-rh".into());
            estimate_rh(&sampled[0], *s, &family)?
        }
        CharKindSpec::Apr { p, r } => {
            tags.push("numerics/estimate-apr".into());
            let refs: Vec<&SampledWeight> = sampled.iter().collect();
            estimate_apr(&refs, &frac_vec_to_expvec(p)?, &frac_vec_to_rvec(r)?, &family)?
        }
    };
    let rel_tol = spec.rel_tol.unwrap_or(profile.char_rel_tol());
    let passed = match spec.expect_value {
        None => true,
        Some(v) => (est.value - v).abs() <= rel_tol * v.abs(),
    };
    let payload = json!({
        "value": est.value,
        "argmax": {
            "depth": est.argmax_cube.depth,
            "side": est.argmax_cube.side,
            "offset": est.argmax_cube.offset,
        },
        "rel_tol": rel_tol,
    });
    let csv = format!("depth,side,offset0,value\n{},{},{},{}\n",
        est.argmax_cube.depth, est.argmax_cube.side, est.argmax_cube.offset[0], est.value);
    Ok((passed, payload, vec![("argmax.csv".into(), csv)]))
}

fn exp_or_infinity(f: &FracSpec) -> Result<Exp> {
    if f[0] == 0 {
        Ok(Exp::infinity())
    } else {
        frac_to_exp(f)
    }
}

fn run_interp_solve(spec: &InterpSolveSpec, tags: &mut Vec<String>) -> Result<(bool, Value)> {
    let w: Vec<PowerWeight> =
        spec.weights_first.iter().map(|x| x.build()).collect::<Result<_>>()?;
    let v: Vec<PowerWeight> =
        spec.weights_second.iter().map(|x| x.build()).collect::<Result<_>>()?;
    let sol = match &spec.variant {
        InterpVariantSpec::VectorLimit { p, q, r } => {
            tags.push("interpolation/interpolate-apr".into());
            tags.push("interpolation/solve-theta".into());
            interpolate_apr(
                &frac_vec_to_expvec(p)?,
                &w,
                &frac_vec_to_expvec(q)?,
                &v,
                &frac_vec_to_rvec(r)?,
            )?
        }
        InterpVariantSpec::LimitedRange { p, q, lower, upper } => {
            tags.push("interpolation/interpolate-limited-range".into());
            tags.push("interpolation/solve-theta".into());
            let lo: Vec<Exp> = lower.iter().map(frac_to_exp).collect::<Result<_>>()?;
            let hi: Vec<Exp> = upper.iter().map(exp_or_infinity).collect::<Result<_>>()?;
            interpolate_limited_range(
                &frac_vec_to_expvec(p)?,
                &w,
                &frac_vec_to_expvec(q)?,
                &v,
                &lo,
                &hi,
            )?
        }
    };
    let payload = json!({
        "theta": sol.theta.to_string(),
        "steps": sol.diagnostics.steps,
        "s": sol.s.entries().iter().map(|e| e.to_string()).collect::<Vec<_>>(),
        "u_exponents": sol.u.iter().map(|u| u.exponent().to_string()).collect::<Vec<_>>(),
        "margins": sol.diagnostics.indices.iter().map(|ix| json!({
            "first": crate::grid::rat_to_f64(&ix.margin_first),
            "second": crate::grid::rat_to_f64(&ix.margin_second),
        })).collect::<Vec<_>>(),
        "checks": {
            "exponent_identity": sol.checks.exponent_identity,
            "weight_identity": sol.checks.weight_identity,
            "admissible": sol.checks.admissible,
            "membership": sol.checks.membership,
        },
    });
    Ok((sol.checks.all(), payload))
}

fn build_operator(
    kernel: &KernelSpec,
    symbol: &Option<FunctionSpec>,
    slot: usize,
    grid: &Grid,
    tags: &mut Vec<String>,
) -> Result<OpHandle> {
    tags.push(kernel.tag().into());
    let base = kernel.build(grid)?;
    match symbol {
        None => Ok(base),
        Some(s) => {
            tags.push("operators/commutator".into());
            commutator(base, s.build(grid)?, slot)
        }
    }
}

fn run_op_apply(spec: &OpApplySpec, tags: &mut Vec<String>) -> Result<(bool, Value, Vec<(String, String)>)> {
    let grid = spec.grid.build()?;
    let op = build_operator(&spec.kernel, &spec.symbol, spec.symbol_slot, &grid, tags)?;
    let inputs: Vec<SampledFunction> =
        spec.inputs.iter().map(|f| f.build(&grid)).collect::<Result<_>>()?;
    let refs: Vec<&SampledFunction> = inputs.iter().collect();
    let out = op.apply(&refs)?;
    let sup = out.sup_norm();
    let l2 = out.lp_norm(2.0, None)?;
    let mut csv = String::from("x,value\n");
    for i in 0..grid.num_cells() {
        let label = if grid.dim() == 1 {
            grid.axis_center(i).to_string()
        } else {
            i.to_string()
        };
        csv.push_str(&format!("{label},{}\n", out.values()[i]));
    }
    let payload = json!({ "sup_norm": sup, "l2_norm": l2, "cells": grid.num_cells() });
    Ok((true, payload, vec![("output.csv".into(), csv)]))
}

fn build_family(
    shape: &FamilyShapeSpec,
    grid: &Grid,
    arity: usize,
    count: usize,
    seed: u64,
) -> Result<InputFamily> {
    let exps = vec![2.0; arity];
    match shape {
        FamilyShapeSpec::Translated { width } => {
            InputFamily::translated_bumps(grid, arity, count, *width, &exps)
        }
        FamilyShapeSpec::Dilated => InputFamily::dilated_bumps(grid, arity, count, &exps),
        FamilyShapeSpec::Oscillating => InputFamily::oscillating_bumps(grid, arity, count, &exps),
        FamilyShapeSpec::Random => InputFamily::seeded_random(grid, arity, count, seed, &exps),
    }
}

fn fk_payload(report: &crate::compactness::FkReport) -> Value {
    serde_json::to_value(report).expect("report serializes")
}

fn run_fk_scan(
    spec: &FkScanSpec,
    seed: u64,
    tags: &mut Vec<String>,
) -> Result<(bool, Value, Vec<(String, String)>)> {
    let grid = spec.grid.build()?;
    let cw = grid.cell_width();
    let grids = FkGrids {
        tail_radii: spec.tail_radii.clone(),
        translations: spec.translation_cells.iter().map(|c| *c as f64 * cw).collect(),
        averaging_radii: spec.averaging_cells.iter().map(|c| *c as f64 * cw).collect(),
        fractional_p0: spec.fractional_p0,
    };
    let base = build_operator(&spec.kernel, &spec.symbol, spec.symbol_slot, &grid, tags)?;
    let family = build_family(&spec.family_shape, &grid, base.arity(), spec.family_count, seed)?;
    let weight = match &spec.weight {
        None => None,
        Some(w) => Some(w.sample(&grid)?),
    };
    tags.push("compactness/fk-scan".into());

    let mut files = Vec::new();
    let payload = if let Some(scales) = &spec.series_scales {
        tags.push("compactness/series-demo".into());
        let symbol = spec
            .symbol
            .as_ref()
            .ok_or_else(|| Error::InvalidScenario("series demo needs a symbol".into()))?
            .build(&grid)?;
        // the series demo commutes the partial sums itself; rebuild the
        // plain kernel without the commutator wrapper
        let plain = spec.kernel.build(&grid)?;
        let terms: Vec<OpHandle> = scales
            .iter()
            .map(|s| Arc::new(ScaledOp::new(plain.clone(), *s)) as OpHandle)
            .collect();
        let series = series_compactness_demo(
            &terms,
            &symbol,
            spec.symbol_slot,
            &family,
            weight.as_ref(),
            spec.p,
            &grids,
        )?;
        files.push((
            "series_sup_diffs.csv".into(),
            curve_to_csv(
                &series
                    .sup_diffs
                    .iter()
                    .enumerate()
                    .map(|(i, d)| (i as f64, *d))
                    .collect::<Vec<_>>(),
            ),
        ));
        json!({
            "sup_diffs": series.sup_diffs,
            "ratios": series.ratios,
            "final": fk_payload(series.reports.last().expect("nonempty")),
        })
    } else {
        let report = fk_scan(&base, &family, weight.as_ref(), spec.p, &grids)?;
        files.push(("tail_curve.csv".into(), curve_to_csv(&report.tail_curve)));
        files.push(("translation_curve.csv".into(), curve_to_csv(&report.translation_curve)));
        files.push(("averaging_curve.csv".into(), curve_to_csv(&report.averaging_curve)));
        fk_payload(&report)
    };
    Ok((true, payload, files))
}

fn run_counterexample(
    spec: &CounterexampleSpec,
    tags: &mut Vec<String>,
) -> Result<(bool, Value, Vec<(String, String)>)> {
    match spec {
        CounterexampleSpec::Translation { log2_levels } => {
            tags.push("compactness/translation-counterexample".into());
            let levels: Vec<usize> = log2_levels.iter().map(|k| 1usize << *k).collect();
            let rep = translation_counterexample(&levels)?;
            let control = translation_control(&levels)?;
            let payload = json!({
                "levels": rep.levels,
                "ratios": rep.ratios,
                "control_spread": control.max_relative_spread(),
            });
            let csv = curve_to_csv(
                &rep.levels.iter().map(|(c, v)| (*c as f64, *v)).collect::<Vec<_>>(),
            );
            Ok((true, payload, vec![("growth.csv".into(), csv)]))
        }
        CounterexampleSpec::TranslationFamily { p0, p, alpha, h, log2_levels } => {
            tags.push("compactness/translation-counterexample".into());
            let levels: Vec<usize> = log2_levels.iter().map(|k| 1usize << *k).collect();
            let rep = translation_counterexample_family(*p0, *p, *alpha, *h, &levels)?;
            let payload = json!({ "levels": rep.levels, "ratios": rep.ratios });
            Ok((true, payload, vec![]))
        }
        CounterexampleSpec::Inclusion { p, r, s, dim } => {
            tags.push("power-weights/inclusion-counterexample".into());
            let witness = crate::power_weights::inclusion_counterexample(
                &frac_vec_to_expvec(p)?,
                &frac_vec_to_rvec(r)?,
                &frac_vec_to_rvec(s)?,
                *dim,
            )?;
            let payload = json!({
                "branch": format!("{:?}", witness.branch),
                "exponents": witness.weights.iter().map(|w| w.exponent().to_string()).collect::<Vec<_>>(),
            });
            Ok((true, payload, vec![]))
        }
    }
}

fn run_log_convexity(
    spec: &LogConvexitySpec,
    seed: u64,
    profile: ToleranceProfile,
    tags: &mut Vec<String>,
) -> Result<(bool, Value)> {
    use rand::{Rng, SeedableRng};
    tags.push("interpolation/verify-log-convexity".into());
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
    let tol = spec.rel_tol.unwrap_or(profile.log_convexity_tol());
    let thetas: Vec<f64> =
        (1..=spec.theta_points).map(|k| k as f64 / (spec.theta_points + 1) as f64).collect();
    let mut worst = 0.0f64;
    let mut failures = 0u32;
    for _ in 0..spec.instances {
        let k = spec.index_count;
        let op = DiagonalOperator { coeffs: (0..k).map(|_| rng.gen_range(0.0..2.0)).collect() };
        let mut spaces = || -> DiagonalSpaces {
            DiagonalSpaces {
                out_exp: rng.gen_range(0.5..4.0),
                out_weight: (0..k).map(|_| rng.gen_range(0.5..2.0)).collect(),
                in_exps: (0..spec.arity).map(|_| rng.gen_range(1.0..4.0)).collect(),
                in_weights: (0..spec.arity)
                    .map(|_| (0..k).map(|_| rng.gen_range(0.5..2.0)).collect())
                    .collect(),
            }
        };
        let e1 = spaces();
        let e2 = spaces();
        let rep = verify_log_convexity(&op, &e1, &e2, &thetas, tol)?;
        worst = worst.max(rep.max_rel_excess);
        if !rep.passed {
            failures += 1;
        }
    }
    let payload = json!({
        "instances": spec.instances,
        "violations": failures,
        "worst_rel_excess": worst,
        "rel_tol": tol,
    });
    Ok((failures == 0, payload))
}

/// Caps the global worker pool used by parallel sections. Call once, before
/// any parallel work runs.
pub fn configure_workers(n: usize) -> Result<()> {
    rayon::ThreadPoolBuilder::new()
        .num_threads(n)
        .build_global()
        .map_err(|e| Error::Domain(format!("worker pool already configured: {e}")))
}

/// Runs one scenario, returning the report and writing report/CSV files
/// when an output directory is configured.
pub fn run_scenario(scenario: &Scenario, opts: &RunOptions) -> Result<Report> {
    let seed = opts.seed_override.unwrap_or(scenario.seed);
    let mut tags = Vec::new();
    let (kind, passed, payload, files) = match &scenario.task {
        TaskSpec::WeightCheck(spec) => {
            let (p, v) = run_weight_check(spec, &mut tags)?;
            ("weight-check", p, v, vec![])
        }
        TaskSpec::CharEstimate(spec) => {
            let (p, v, f) = run_char_estimate(spec, opts.tolerance_profile, &mut tags)?;
            ("char-estimate", p, v, f)
        }
        TaskSpec::InterpSolve(spec) => {
            let (p, v) = run_interp_solve(spec, &mut tags)?;
            ("interp-solve", p, v, vec![])
        }
        TaskSpec::OpApply(spec) => {
            let (p, v, f) = run_op_apply(spec, &mut tags)?;
            ("op-apply", p, v, f)
        }
        TaskSpec::FkScan(spec) => {
            let (p, v, f) = run_fk_scan(spec, seed, &mut tags)?;
            ("fk-scan", p, v, f)
        }
        TaskSpec::Counterexample(spec) => {
            let (p, v, f) = run_counterexample(spec, &mut tags)?;
            ("counterexample", p, v, f)
        }
        TaskSpec::LogConvexity(spec) => {
            let (p, v) = run_log_convexity(spec, seed, opts.tolerance_profile, &mut tags)?;
            ("log-convexity", p, v, vec![])
        }
    };
    let report = Report {
        scenario: scenario.name.clone(),
        kind: kind.to_string(),
        seed,
        op_tags: tags,
        passed,
        payload,
    };
    if let Some(dir) = &opts.out_dir {
        std::fs::create_dir_all(dir)?;
        let report_path = dir.join(format!("{}.report.json", scenario.name));
        std::fs::write(&report_path, serde_json::to_string_pretty(&report)?)?;
        for (name, content) in &files {
            std::fs::write(dir.join(format!("{}.{}", scenario.name, name)), content)?;
        }
    }
    Ok(report)
}

/// Loads a scenario file, rejecting schema violations with a diagnostic.
pub fn load_scenario(path: &Path) -> Result<Scenario> {
    let text = std::fs::read_to_string(path)?;
    serde_json::from_str(&text).map_err(|e| {
        Error::InvalidScenario(format!("{}: line {} column {}: {e}", path.display(), e.line(), e.column()))
    })
}

/// Summary row of a suite run.
#[derive(Clone, Debug, Serialize)]
pub struct SuiteRow {
    pub file: String,
    pub name: String,
    pub status: String,
}

/// Runs every `*.json` scenario in a directory (sorted order), aggregating
/// pass/fail. A scenario that fails to parse or errors at runtime is marked
/// failed without affecting the others.
pub fn run_suite(dir: &Path, opts: &RunOptions) -> Result<(Vec<SuiteRow>, bool)> {
    let mut paths: Vec<PathBuf> = std::fs::read_dir(dir)?
        .filter_map(|e| e.ok().map(|e| e.path()))
        .filter(|p| p.extension().map_or(false, |x| x == "json"))
        .collect();
    paths.sort();
    use rayon::prelude::*;
    let rows: Vec<SuiteRow> = paths
        .par_iter()
        .map(|path| {
            let file = path.file_name().unwrap_or_default().to_string_lossy().to_string();
            match load_scenario(path).and_then(|sc| run_scenario(&sc, opts).map(|r| (sc, r))) {
                Ok((sc, report)) => SuiteRow {
                    file,
                    name: sc.name,
                    status: if report.passed { "pass".into() } else { "fail".into() },
                },
                Err(e) => SuiteRow { file, name: String::new(), status: format!("error: {e}") },
            }
        })
        .collect();
    let all_passed = rows.iter().all(|r| r.status == "pass");
    if let Some(out) = &opts.out_dir {
        std::fs::create_dir_all(out)?;
        let mut csv = String::from("file,name,status\n");
        for r in &rows {
            csv.push_str(&format!("{},{},{}\n", r.file, r.name, r.status.replace(',', ";")));
        }
        std::fs::write(out.join("summary.csv"), csv)?;
    }
    Ok((rows, all_passed))
}

/// Human-readable description of the scenario schema and report formats,
/// printed by the CLI `schema` subcommand.
pub fn schema_text() -> String {
    let example = Scenario {
        name: "example-weight-check".into(),
        seed: 7,
        task: TaskSpec::WeightCheck(WeightCheckSpec {
            weights: vec![PowerWeightSpec { exponent: [1, 2], dim: 1 }],
            class: ClassSpec::Ap { p: [2, 1] },
            expect_in_class: Some(true),
        }),
    };
    let mut s = String::new();
    s.push_str("Scenario files are JSON objects:\n");
    s.push_str("  { \"name\": <string>, \"seed\": <u64, optional>, \"task\": { \"kind\": <kind>, \"params\": { ... } } }\n\n");
    s.push_str("Kinds and their params:\n");
    s.push_str("  weight-check   { weights: [{exponent:[n,d], dim}], class: {ap:{p:[n,d]}} | {reverse-holder:{s:[n,d]}} |\n");
    s.push_str("                   {apq:{p:[[n,d],..], q:[n,d]}} | {apr:{p:[[n,d],..], r:[[n,d],..]}}, expect_in_class? }\n");
    s.push_str("  char-estimate  { weights: [{power:{exponent,dim}} | {step:{split,low,high}}], char_kind: {ap:{p}} | {reverse-holder:{s}} | {apr:{p,r}},\n");
    s.push_str("                   grid: {dim, half_width, cells}, family: {depth, mode: three-shift|sliding}, expect_value?, rel_tol? }\n");
    s.push_str("  interp-solve   { variant: {vector-limit:{p,q,r}} | {limited-range:{p,q,lower,upper ([0,1] = infinity)}},\n");
    s.push_str("                   weights_first: [...], weights_second: [...] }\n");
    s.push_str("  op-apply       { grid, kernel: {fractional:{alpha,arity}} | {homogeneous:{alpha,omegas:[[plus,minus],..]}} |\n");
    s.push_str("                   {truncated-first-order:{delta}} | {truncated-sign-riesz:{arity,delta,modulus_power}} | {maximal:{depth,arity}},\n");
    s.push_str("                   inputs: [{bump:{center,width}} | {indicator:{from,to}} | {oscillating-bump:{width,freq}}], symbol?, symbol_slot? }\n");
    s.push_str("  fk-scan        { grid, kernel, symbol?, symbol_slot?, family_shape: {translated:{width}}|dilated|oscillating|random,\n");
    s.push_str("                   family_count, weight?, p, tail_radii, translation_cells, averaging_cells, fractional_p0?, series_scales? }\n");
    s.push_str("  counterexample { translation:{log2_levels} } | { translation-family:{p0,p,alpha,h,log2_levels} } |\n");
    s.push_str("                 { inclusion:{p,r,s,dim} }\n");
    s.push_str("  log-convexity  { instances, index_count, arity, theta_points, rel_tol? }\n\n");
    s.push_str("Reports are written as <name>.report.json with fields\n");
    s.push_str("  { scenario, kind, seed, op_tags, passed, payload }\n");
    s.push_str("plus per-curve CSV files (x,value rows). Identical (scenario, seed)\n");
    s.push_str("pairs produce byte-identical reports.\n\n");
    s.push_str("Example:\n");
    s.push_str(&serde_json::to_string_pretty(&example).expect("example serializes"));
    s.push('\n');
    s
}
