//! Numerical Fréchet-Kolmogorov compactness diagnostics: the three
//! functional curves (uniform bound, tails, translation/averaging moduli)
//! evaluated over an operator's image of a finite input family, plus the
//! classical counterexamples showing the translation condition is not
//! necessary on weighted spaces.
//!
//! A curve scan certifies nothing by itself; decaying curves are the
//! desk-scale signature of compactness, growing ones of its failure.

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::grid::{Grid, SampledFunction, SampledWeight};
use crate::operators::OpHandle;

/// How a family member was constructed.
#[derive(Clone, Copy, Debug, PartialEq, Eq, serde::Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum ProvenanceTag {
    TranslatedBump,
    DilatedBump,
    OscillatingBump,
    SeededRandom,
}

/// A finite family of input tuples, each component normalized to unit norm
/// in its source space so the tuple has unit product norm.
#[derive(Clone, Debug)]
pub struct InputFamily {
    grid: Grid,
    members: Vec<Vec<SampledFunction>>,
    tags: Vec<ProvenanceTag>,
}

fn smooth_bump(grid: &Grid, center: f64, width: f64) -> SampledFunction {
    SampledFunction::from_fn(grid.clone(), |x| {
        let t = (x[0] - center) / width;
        if t.abs() < 1.0 {
            (-1.0 / (1.0 - t * t)).exp()
        } else {
            0.0
        }
    })
    .expect("bump samples are finite")
}

impl InputFamily {
    pub fn new(
        grid: Grid,
        members: Vec<Vec<SampledFunction>>,
        tags: Vec<ProvenanceTag>,
        source_exps: &[f64],
        source_weights: &[Option<&SampledWeight>],
    ) -> Result<Self> {
        if members.is_empty() {
            return Err(Error::Domain("input family must be nonempty".into()));
        }
        let arity = members[0].len();
        if members.iter().any(|m| m.len() != arity) || tags.len() != members.len() {
            return Err(Error::Dimension("family members have mismatched shapes".into()));
        }
        if source_exps.len() != arity || source_weights.len() != arity {
            return Err(Error::Dimension("one source space per slot required".into()));
        }
        let mut normalized = Vec::with_capacity(members.len());
        for tuple in members {
            let mut out = Vec::with_capacity(arity);
            for (i, f) in tuple.into_iter().enumerate() {
                if f.grid() != &grid {
                    return Err(Error::GridMismatch("family member on a different grid".into()));
                }
                let norm = f.lp_norm(source_exps[i], source_weights[i])?;
                if !(norm.is_finite() && norm > 0.0) {
                    return Err(Error::Domain("family member has zero or infinite norm".into()));
                }
                out.push(f.scale(1.0 / norm));
            }
            normalized.push(out);
        }
        Ok(InputFamily { grid, members: normalized, tags })
    }

    /// Translated copies of a smooth bump, one tuple per translation.
    pub fn translated_bumps(
        grid: &Grid,
        arity: usize,
        count: usize,
        width: f64,
        source_exps: &[f64],
    ) -> Result<Self> {
        if grid.dim() != 1 {
            return Err(Error::Unsupported("families are one-dimensional".into()));
        }
        let l = grid.half_width();
        let members: Vec<Vec<SampledFunction>> = (0..count)
            .map(|k| {
                let c = -0.6 * l + 1.2 * l * (k as f64 + 0.5) / count as f64;
                (0..arity).map(|_| smooth_bump(grid, c, width)).collect()
            })
            .collect();
        let tags = vec![ProvenanceTag::TranslatedBump; count];
        let weights = vec![None; arity];
        InputFamily::new(grid.clone(), members, tags, source_exps, &weights)
    }

    /// Bumps of geometrically shrinking widths.
    pub fn dilated_bumps(
        grid: &Grid,
        arity: usize,
        count: usize,
        source_exps: &[f64],
    ) -> Result<Self> {
        if grid.dim() != 1 {
            return Err(Error::Unsupported("families are one-dimensional".into()));
        }
        let l = grid.half_width();
        let min_width = 4.0 * grid.cell_width();
        let members: Vec<Vec<SampledFunction>> = (0..count)
            .map(|k| {
                let w = (0.5 * l * 0.6f64.powi(k as i32)).max(min_width);
                (0..arity).map(|_| smooth_bump(grid, 0.0, w)).collect()
            })
            .collect();
        let tags = vec![ProvenanceTag::DilatedBump; count];
        let weights = vec![None; arity];
        InputFamily::new(grid.clone(), members, tags, source_exps, &weights)
    }

    /// Bumps modulated by increasing frequencies, the classical
    /// non-compactness stress family.
    pub fn oscillating_bumps(
        grid: &Grid,
        arity: usize,
        count: usize,
        source_exps: &[f64],
    ) -> Result<Self> {
        if grid.dim() != 1 {
            return Err(Error::Unsupported("families are one-dimensional".into()));
        }
        let l = grid.half_width();
        let members: Vec<Vec<SampledFunction>> = (0..count)
            .map(|k| {
                let freq = (k + 1) as f64;
                (0..arity)
                    .map(|_| {
                        let base = smooth_bump(grid, 0.0, 0.7 * l);
                        let vals: Vec<f64> = base
                            .values()
                            .iter()
                            .enumerate()
                            .map(|(i, v)| {
                                let x = grid.axis_center(i);
                                v * (std::f64::consts::PI * freq * x / l).cos()
                            })
                            .collect();
                        SampledFunction::new(grid.clone(), vals).expect("finite samples")
                    })
                    .collect()
            })
            .collect();
        let tags = vec![ProvenanceTag::OscillatingBump; count];
        let weights = vec![None; arity];
        InputFamily::new(grid.clone(), members, tags, source_exps, &weights)
    }

    /// Seeded random cell values, smoothed by one averaging pass.
    pub fn seeded_random(
        grid: &Grid,
        arity: usize,
        count: usize,
        seed: u64,
        source_exps: &[f64],
    ) -> Result<Self> {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
        let n = grid.num_cells();
        let members: Vec<Vec<SampledFunction>> = (0..count)
            .map(|_| {
                (0..arity)
                    .map(|_| {
                        let raw: Vec<f64> = (0..n).map(|_| rng.gen_range(-1.0..1.0)).collect();
                        let smooth: Vec<f64> = (0..n)
                            .map(|i| {
                                let lo = i.saturating_sub(2);
                                let hi = (i + 3).min(n);
                                raw[lo..hi].iter().sum::<f64>() / (hi - lo) as f64
                            })
                            .collect();
                        SampledFunction::new(grid.clone(), smooth).expect("finite samples")
                    })
                    .collect()
            })
            .collect();
        let tags = vec![ProvenanceTag::SeededRandom; count];
        let weights = vec![None; arity];
        InputFamily::new(grid.clone(), members, tags, source_exps, &weights)
    }

    pub fn grid(&self) -> &Grid {
        &self.grid
    }

    pub fn members(&self) -> &[Vec<SampledFunction>] {
        &self.members
    }

    pub fn tags(&self) -> &[ProvenanceTag] {
        &self.tags
    }

    pub fn arity(&self) -> usize {
        self.members[0].len()
    }
}

/// Grids for the scan curves, plus the fractional-power parameter for the
/// averaged-translation functional when requested.
#[derive(Clone, Debug)]
pub struct FkGrids {
    /// Tail radii `A` (descending norms as `A` grows).
    pub tail_radii: Vec<f64>,
    /// Translation lengths, each a whole multiple of the cell width.
    pub translations: Vec<f64>,
    /// Averaging radii, each at least one cell width.
    pub averaging_radii: Vec<f64>,
    /// Auxiliary exponent `p_0 > 1` for the fractional-power functional.
    pub fractional_p0: Option<f64>,
}

/// Curves of the compactness functionals over an image family.
#[derive(Clone, Debug, serde::Serialize)]
pub struct FkReport {
    pub uniform_bound: f64,
    /// `(A, sup_f ‖g 1_{|x|>A}‖)`, nonincreasing in `A`.
    pub tail_curve: Vec<(f64, f64)>,
    /// `(h, sup_f ‖τ_h g − g‖)`.
    pub translation_curve: Vec<(f64, f64)>,
    /// `(r, sup_f ‖g − g_{B(·,r)}‖)`.
    pub averaging_curve: Vec<(f64, f64)>,
    /// `(r, sup_f ∫ (⨍_{B(0,r)} |g(x)−g(x+y)|^{p/p_0} dy)^{p_0} w dx)`.
    pub fk3_curve: Option<Vec<(f64, f64)>>,
}

fn cells_for_shift(grid: &Grid, h: f64) -> Result<isize> {
    let cw = grid.cell_width();
    let ratio = h / cw;
    let rounded = ratio.round();
    if (ratio - rounded).abs() > 1e-9 {
        return Err(Error::Domain(format!(
            "translation {h} is not a whole multiple of the cell width {cw}"
        )));
    }
    Ok(rounded as isize)
}

fn ball_offsets(grid: &Grid, r: f64) -> Result<Vec<isize>> {
    let cw = grid.cell_width();
    if r < cw {
        return Err(Error::Domain(format!("radius {r} below the cell width {cw}")));
    }
    // cells fully inside the ball: |k·h| + h/2 ≤ r
    let kmax = ((r / cw) - 0.5 + 1e-12).floor() as isize;
    Ok((-kmax..=kmax).collect())
}

/// Ball average `g_{B(x,r)}` over cells fully inside the ball, clipped at
/// the box boundary.
fn ball_average(g: &SampledFunction, offsets: &[isize]) -> SampledFunction {
    let n = g.grid().cells_per_axis() as isize;
    let vals = g.values();
    let out: Vec<f64> = (0..n)
        .map(|i| {
            let mut acc = 0.0;
            let mut cnt = 0usize;
            for &k in offsets {
                let j = i + k;
                if (0..n).contains(&j) {
                    acc += vals[j as usize];
                    cnt += 1;
                }
            }
            acc / cnt as f64
        })
        .collect();
    SampledFunction::new(g.grid().clone(), out).expect("finite samples")
}

fn tail_norm(g: &SampledFunction, w: Option<&SampledWeight>, p: f64, radius: f64) -> Result<f64> {
    let grid = g.grid();
    let masked: Vec<f64> = (0..grid.num_cells())
        .map(|i| {
            let c = grid.center(i);
            let rr = c[..grid.dim()].iter().map(|v| v * v).sum::<f64>().sqrt();
            if rr > radius {
                g.values()[i]
            } else {
                0.0
            }
        })
        .collect();
    SampledFunction::new(grid.clone(), masked)?.lp_norm(p, w)
}

/// Fractional-power averaged-translation functional of one image function.
fn fk3_functional(
    g: &SampledFunction,
    w: Option<&SampledWeight>,
    p: f64,
    p0: f64,
    offsets: &[isize],
) -> f64 {
    let grid = g.grid();
    let n = grid.cells_per_axis() as isize;
    let vals = g.values();
    let a = p / p0;
    let mut acc = 0.0;
    for i in 0..n {
        let mut inner = 0.0;
        for &k in offsets {
            let j = i + k;
            let other = if (0..n).contains(&j) { vals[j as usize] } else { 0.0 };
            inner += (vals[i as usize] - other).abs().powf(a);
        }
        inner /= offsets.len() as f64;
        let wv = w.map_or(1.0, |w| w.values()[i as usize]);
        acc += inner.powf(p0) * wv;
    }
    acc * grid.cell_volume()
}

/// Runs the full scan: applies the operator to every family member and
/// computes the compactness curves of the image in `L^p(w)`.
pub fn fk_scan(
    op: &OpHandle,
    family: &InputFamily,
    w: Option<&SampledWeight>,
    p: f64,
    grids: &FkGrids,
) -> Result<FkReport> {
    if family.arity() != op.arity() {
        return Err(Error::Dimension("family arity differs from the operator".into()));
    }
    if family.grid() != op.grid() {
        return Err(Error::GridMismatch("family and operator grids differ".into()));
    }
    let shifts: Vec<isize> = grids
        .translations
        .iter()
        .map(|h| cells_for_shift(family.grid(), *h))
        .collect::<Result<_>>()?;
    let ball_sets: Vec<Vec<isize>> = grids
        .averaging_radii
        .iter()
        .map(|r| ball_offsets(family.grid(), *r))
        .collect::<Result<_>>()?;

    let images: Vec<SampledFunction> = family
        .members()
        .par_iter()
        .map(|tuple| {
            let refs: Vec<&SampledFunction> = tuple.iter().collect();
            op.apply(&refs)
        })
        .collect::<Result<_>>()?;

    let mut uniform_bound = 0.0f64;
    let mut tail = vec![0.0f64; grids.tail_radii.len()];
    let mut trans = vec![0.0f64; shifts.len()];
    let mut avg = vec![0.0f64; ball_sets.len()];
    let mut fk3 = grids.fractional_p0.map(|_| vec![0.0f64; ball_sets.len()]);
    for g in &images {
        uniform_bound = uniform_bound.max(g.lp_norm(p, w)?);
        for (t, radius) in tail.iter_mut().zip(&grids.tail_radii) {
            *t = t.max(tail_norm(g, w, p, *radius)?);
        }
        for (t, shift) in trans.iter_mut().zip(&shifts) {
            let diff = g.translate_cells(&[*shift])?.sub(g)?;
            *t = t.max(diff.lp_norm(p, w)?);
        }
        for (t, offsets) in avg.iter_mut().zip(&ball_sets) {
            let diff = g.sub(&ball_average(g, offsets))?;
            *t = t.max(diff.lp_norm(p, w)?);
        }
        if let (Some(curve), Some(p0)) = (fk3.as_mut(), grids.fractional_p0) {
            for (t, offsets) in curve.iter_mut().zip(&ball_sets) {
                *t = t.max(fk3_functional(g, w, p, p0, offsets));
            }
        }
    }
    Ok(FkReport {
        uniform_bound,
        tail_curve: grids.tail_radii.iter().copied().zip(tail).collect(),
        translation_curve: grids.translations.iter().copied().zip(trans).collect(),
        averaging_curve: grids.averaging_radii.iter().copied().zip(avg).collect(),
        fk3_curve: fk3.map(|c| grids.averaging_radii.iter().copied().zip(c).collect()),
    })
}

/// Averaging-modulus curve only (`sup_f ‖g − g_{B(·,r)}‖_{L^p(w)}`).
pub fn fk_average_scan(
    op: &OpHandle,
    family: &InputFamily,
    w: Option<&SampledWeight>,
    p: f64,
    radii: &[f64],
) -> Result<Vec<(f64, f64)>> {
    let grids = FkGrids {
        tail_radii: vec![],
        translations: vec![],
        averaging_radii: radii.to_vec(),
        fractional_p0: None,
    };
    Ok(fk_scan(op, family, w, p, &grids)?.averaging_curve)
}

/// Fractional-power averaged-translation curve; for `p ≥ p_0` the pointwise
/// domination of the plain averaging modulus is checked cellwise on every
/// image and reported.
pub fn fk_fractional_scan(
    op: &OpHandle,
    family: &InputFamily,
    w: Option<&SampledWeight>,
    p: f64,
    p0: f64,
    radii: &[f64],
) -> Result<Vec<(f64, f64)>> {
    if !(p > 0.0) || !(p0 > 1.0) {
        return Err(Error::Domain("need p > 0 and p_0 > 1".into()));
    }
    let grids = FkGrids {
        tail_radii: vec![],
        translations: vec![],
        averaging_radii: radii.to_vec(),
        fractional_p0: Some(p0),
    };
    let report = fk_scan(op, family, w, p, &grids)?;
    Ok(report.fk3_curve.expect("requested fractional curve"))
}

/// Cellwise check of the domination
/// `|g(x) − g_{B(x,r)}| ≤ (⨍_{B(0,r)} |g(x)−g(x+y)|^{p/p_0} dy)^{p_0/p}`
/// used to reduce the fractional functional to the averaging one (`p ≥ p_0`).
pub fn fk3_domination_holds(g: &SampledFunction, p: f64, p0: f64, r: f64) -> Result<bool> {
    if p < p0 {
        return Err(Error::Domain("domination applies for p ≥ p_0".into()));
    }
    let offsets = ball_offsets(g.grid(), r)?;
    let avg = ball_average(g, &offsets);
    let n = g.grid().cells_per_axis() as isize;
    let a = p / p0;
    for i in 0..n {
        let lhs = (g.values()[i as usize] - avg.values()[i as usize]).abs();
        let mut inner = 0.0;
        let mut cnt = 0usize;
        for &k in &offsets {
            let j = i + k;
            if (0..n).contains(&j) {
                inner += (g.values()[i as usize] - g.values()[j as usize]).abs().powf(a);
                cnt += 1;
            }
        }
        let rhs = (inner / cnt as f64).powf(1.0 / a);
        if lhs > rhs * (1.0 + 1e-9) + 1e-12 {
            return Ok(false);
        }
    }
    Ok(true)
}

/// Growth sequence of a translation integral across grid refinements.
#[derive(Clone, Debug, serde::Serialize)]
pub struct GrowthReport {
    /// `(cells, value)` per refinement level.
    pub levels: Vec<(usize, f64)>,
    /// Consecutive ratios `value_{k+1} / value_k`.
    pub ratios: Vec<f64>,
}

impl GrowthReport {
    /// True when every ratio from `burn_in` levels onward is at least
    /// `factor`, sustained for at least `span` consecutive steps.
    pub fn sustained_growth(&self, factor: f64, burn_in_cells: usize, span: usize) -> bool {
        let tail: Vec<f64> = self
            .ratios
            .iter()
            .zip(&self.levels[1..])
            .filter(|(_, (cells, _))| *cells > burn_in_cells)
            .map(|(r, _)| *r)
            .collect();
        tail.len() >= span && tail.iter().take(span).all(|r| *r >= factor)
    }

    /// Largest relative variation across the recorded levels.
    pub fn max_relative_spread(&self) -> f64 {
        let vals: Vec<f64> = self.levels.iter().map(|(_, v)| *v).collect();
        let lo = vals.iter().cloned().fold(f64::INFINITY, f64::min);
        let hi = vals.iter().cloned().fold(0.0f64, f64::max);
        if lo == 0.0 {
            f64::INFINITY
        } else {
            hi / lo - 1.0
        }
    }
}

/// Discrete translation integral `∫ |f(x+h) − f(x)|^p w(x) dx` over the
/// box, with `f`, `w` given analytically and evaluated exactly at cell
/// centers (no grid interpolation, so `h` need not be cell-aligned).
pub fn translation_integral_levels(
    f: &(dyn Fn(f64) -> f64 + Sync),
    w: &(dyn Fn(f64) -> f64 + Sync),
    p: f64,
    h: f64,
    half_width: f64,
    levels: &[usize],
) -> Result<GrowthReport> {
    let mut out = Vec::with_capacity(levels.len());
    for &cells in levels {
        let grid = Grid::line(half_width, cells)?;
        let step = grid.cell_width();
        let value: f64 = (0..cells)
            .map(|i| {
                let x = grid.axis_center(i);
                (f(x + h) - f(x)).abs().powf(p) * w(x) * step
            })
            .sum();
        out.push((cells, value));
    }
    let ratios = out.windows(2).map(|w| w[1].1 / w[0].1).collect();
    Ok(GrowthReport { levels: out, ratios })
}

/// The classical failure of the translation condition: `w = |x|^{1/2}`,
/// `f = |x|^{−3/5}`, `p = 2`, `h = 0.1`. The continuum integral is infinite;
/// the discrete values grow without bound under refinement.
pub fn translation_counterexample(levels: &[usize]) -> Result<GrowthReport> {
    translation_integral_levels(
        &|x: f64| x.abs().powf(-0.6),
        &|x: f64| x.abs().sqrt(),
        2.0,
        0.1,
        1.0,
        levels,
    )
}

/// The second counterexample family: `w = |x|^{p_0−1}`,
/// `f = |x|^{−α} 1_{|x|≤1}` with `1 < p_0 < p` and `1/p < α < p_0/p`; any
/// `h ≠ 0` diverges in the continuum.
pub fn translation_counterexample_family(
    p0: f64,
    p: f64,
    alpha: f64,
    h: f64,
    levels: &[usize],
) -> Result<GrowthReport> {
    if !(1.0 < p0 && p0 < p && 1.0 / p < alpha && alpha < p0 / p) {
        return Err(Error::Domain("parameters violate the family constraints".into()));
    }
    if h == 0.0 {
        return Err(Error::Domain("translation must be nonzero".into()));
    }
    translation_integral_levels(
        &move |x: f64| if x.abs() <= 1.0 { x.abs().powf(-alpha) } else { 0.0 },
        &move |x: f64| x.abs().powf(p0 - 1.0),
        p,
        h,
        1.0,
        levels,
    )
}

/// Control for the counterexamples: a smooth bump through the same
/// refinement levels stays bounded and converges.
pub fn translation_control(levels: &[usize]) -> Result<GrowthReport> {
    translation_integral_levels(
        &|x: f64| {
            let t: f64 = x / 0.5;
            if t.abs() < 1.0 {
                (-1.0 / (1.0 - t * t)).exp()
            } else {
                0.0
            }
        },
        &|x: f64| x.abs().sqrt(),
        2.0,
        0.1,
        1.0,
        levels,
    )
}

/// Report of the translated-weight domination scan `sup w(x+h)/w(x)`.
#[derive(Clone, Debug, serde::Serialize)]
pub struct DominationReport {
    pub sup_ratio: f64,
    pub argmax_cell: usize,
    pub argmax_shift_cells: isize,
}

/// Estimates `sup_{|h|<δ, x} w(x+h)/w(x)` over whole-cell shifts with both
/// points in the box. A finite, refinement-stable value signals that
/// translations of the weight are dominated near scale δ; blow-up under
/// refinement signals the opposite (power weights near the origin).
pub fn translation_dominated_check(w: &SampledWeight, delta: f64) -> Result<DominationReport> {
    if !(delta > 0.0) {
        return Err(Error::Domain("window δ must be positive".into()));
    }
    let grid = w.grid();
    if grid.dim() != 1 {
        return Err(Error::Unsupported("domination scan is one-dimensional".into()));
    }
    let n = grid.cells_per_axis() as isize;
    let kmax = ((delta / grid.cell_width()) - 1e-12).floor() as isize;
    let mut best = (0.0f64, 0usize, 0isize);
    for i in 0..n {
        for k in -kmax..=kmax {
            let j = i + k;
            if !(0..n).contains(&j) {
                continue;
            }
            let ratio = w.values()[j as usize] / w.values()[i as usize];
            if ratio > best.0 {
                best = (ratio, i as usize, k);
            }
        }
    }
    Ok(DominationReport { sup_ratio: best.0, argmax_cell: best.1, argmax_shift_cells: best.2 })
}

/// Report of the series-of-operators compactness transfer demo.
#[derive(Clone, Debug, serde::Serialize)]
pub struct SeriesReport {
    /// Per truncation length `N`: the commutator scan curves.
    pub reports: Vec<FkReport>,
    /// Max difference between successive curves (over tails, translations,
    /// and averaging points).
    pub sup_diffs: Vec<f64>,
    /// Consecutive ratios of the sup differences.
    pub ratios: Vec<f64>,
}

fn curve_distance(a: &FkReport, b: &FkReport) -> f64 {
    let mut d = (a.uniform_bound - b.uniform_bound).abs();
    for (x, y) in a.tail_curve.iter().zip(&b.tail_curve) {
        d = d.max((x.1 - y.1).abs());
    }
    for (x, y) in a.translation_curve.iter().zip(&b.translation_curve) {
        d = d.max((x.1 - y.1).abs());
    }
    for (x, y) in a.averaging_curve.iter().zip(&b.averaging_curve) {
        d = d.max((x.1 - y.1).abs());
    }
    d
}

/// Demonstrates the series transfer mechanism: for `T^{(N)} = Σ_{j≤N} T_j`
/// with geometrically decaying terms, the scan curves of `[b, T^{(N)}]`
/// converge in `N`; successive sup-differences decay like the tail of the
/// series.
pub fn series_compactness_demo(
    terms: &[OpHandle],
    symbol: &SampledFunction,
    slot: usize,
    family: &InputFamily,
    w: Option<&SampledWeight>,
    p: f64,
    grids: &FkGrids,
) -> Result<SeriesReport> {
    use crate::operators::{commutator, SumOp};
    use std::sync::Arc;
    if terms.is_empty() {
        return Err(Error::Domain("series demo needs at least one term".into()));
    }
    let mut reports = Vec::with_capacity(terms.len());
    for n in 1..=terms.len() {
        let partial: OpHandle = Arc::new(SumOp::new(terms[..n].to_vec())?);
        let com = commutator(partial, symbol.clone(), slot)?;
        reports.push(fk_scan(&com, family, w, p, grids)?);
    }
    let sup_diffs: Vec<f64> =
        reports.windows(2).map(|pair| curve_distance(&pair[0], &pair[1])).collect();
    let ratios = sup_diffs.windows(2).map(|d| if d[0] == 0.0 { 0.0 } else { d[1] / d[0] }).collect();
    Ok(SeriesReport { reports, sup_diffs, ratios })
}
