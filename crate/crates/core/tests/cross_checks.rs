//! Cross-module consistency checks: the analytic power-weight layer, the
//! exponent reductions, and the grid estimators must tell one coherent
//! story.

use num::Signed;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use weightlab::exponents::{apq_reduction, rat, Exp, ExpVector, RVector};
use weightlab::grid::{CubeFamily, Grid, SampledWeight};
use weightlab::numerics::{estimate_ap, estimate_apr};
use weightlab::power_weights::{in_ap, in_apq, in_apr, in_reverse_holder, PowerWeight, RhExponent};

fn sampled_power(grid: &Grid, num: i64, den: i64) -> SampledWeight {
    SampledWeight::from_power(grid.clone(), &PowerWeight::new(rat(num, den), 1).unwrap()).unwrap()
}

/// The multilinear characteristic is dominated by the product of two-index
/// characteristics of the factors, cube family by cube family (the Hölder
/// containment of the product classes). Checked on the estimators.
#[test]
fn holder_containment_bound_on_estimates() {
    let grid = Grid::line(1.0, 1024).unwrap();
    let family = CubeFamily::sliding(&grid, 6).unwrap();

    // p = (2,2), r = (1,1,1): the factor classes are A_{2,2}, reachable as
    // the m = 1 class of the pair ((2), (1,1)).
    let p = ExpVector::from_ints(&[2, 2]).unwrap();
    let r = RVector::from_ints(&[1, 1, 1]).unwrap();
    let single_p = ExpVector::from_ints(&[2]).unwrap();
    let single_r = apq_reduction(&single_p, &Exp::from_int(2).unwrap()).unwrap();

    for (a, b) in [((1, 4), (1, 8)), ((1, 4), (-1, 8)), ((-1, 8), (1, 3)), ((0, 1), (1, 4))] {
        let w1 = sampled_power(&grid, a.0, a.1);
        let w2 = sampled_power(&grid, b.0, b.1);
        let joint = estimate_apr(&[&w1, &w2], &p, &r, &family).unwrap().value;
        let f1 = estimate_apr(&[&w1], &single_p, &single_r, &family).unwrap().value;
        let f2 = estimate_apr(&[&w2], &single_p, &single_r, &family).unwrap().value;
        assert!(
            joint <= f1 * f2 * (1.0 + 1e-12),
            "containment bound violated: {joint} > {f1} * {f2}"
        );
    }

    // p = (3,3), r = (1,1,1): factor classes A_{3,3} via ((3), (1,1)).
    let p = ExpVector::from_ints(&[3, 3]).unwrap();
    let single_p = ExpVector::from_ints(&[3]).unwrap();
    let single_r = apq_reduction(&single_p, &Exp::from_int(3).unwrap()).unwrap();
    let w1 = sampled_power(&grid, 1, 4);
    let w2 = sampled_power(&grid, -1, 6);
    let joint = estimate_apr(&[&w1, &w2], &p, &r, &family).unwrap().value;
    let f1 = estimate_apr(&[&w1], &single_p, &single_r, &family).unwrap().value;
    let f2 = estimate_apr(&[&w2], &single_p, &single_r, &family).unwrap().value;
    assert!(joint <= f1 * f2 * (1.0 + 1e-12));
}

/// The two-index class evaluated directly agrees with the vector-indexed
/// class after the reduction `r⃗ = (1, …, 1, r_{m+1})`, on random
/// power-weight tuples including `q > p`.
#[test]
fn two_index_reduction_agreement() {
    let mut rng = ChaCha8Rng::seed_from_u64(42);
    let mut checked = 0;
    while checked < 100 {
        let m = rng.gen_range(1..=3usize);
        let p_entries: Vec<Exp> = (0..m)
            .map(|_| Exp::from_frac(rng.gen_range(1..=4i64) * 2, 2).unwrap())
            .collect();
        let p = ExpVector::new(p_entries).unwrap();
        // q ≥ p with a dyadic gap
        let gap = rat(rng.gen_range(0..=3i64), 8);
        let q_recip = p.sum_recip() - &gap;
        if !q_recip.is_positive() {
            continue;
        }
        let q = Exp::from_recip(q_recip).unwrap();
        let r = match apq_reduction(&p, &q) {
            Ok(r) => r,
            Err(_) => continue,
        };
        let ws: Vec<PowerWeight> = (0..m)
            .map(|_| PowerWeight::new(rat(rng.gen_range(-5..=5i64), 8), 1).unwrap())
            .collect();
        let via_apq = match in_apq(&ws, &p, &q) {
            Ok(v) => v.in_class,
            Err(_) => continue,
        };
        let via_apr = in_apr(&ws, &p, &r).unwrap().in_class;
        assert_eq!(via_apq, via_apr, "routes disagree for m={m}");
        checked += 1;
    }
}

/// Composing the classical reduction with the two-index lowering
/// `r⃗ = (1, …, 1)` reproduces the textbook conditions exactly, through
/// conjugation: the factor condition `w_i^{θ_i} ∈ A_{(1/r−1)θ_i}` is the
/// conjugate transform of `w_i^{−p'_i} ∈ A_{mp'_i}`, and the product
/// condition is `w^p ∈ A_{mp}` verbatim.
#[test]
fn characterization_matches_two_index_conditions_exactly() {
    use num::One;
    use weightlab::exponents::{apr_characterization, ConditionSlot, Rat};
    let mut rng = ChaCha8Rng::seed_from_u64(9);
    for _ in 0..50 {
        let m = rng.gen_range(1..=3usize);
        let p_entries: Vec<Exp> = (0..m)
            .map(|_| Exp::from_frac(rng.gen_range(3..=12i64), 2).unwrap())
            .collect();
        let p = ExpVector::new(p_entries).unwrap();
        let r = RVector::new(vec![Exp::one(); m + 1]).unwrap();
        let m_rat = Rat::from_integer((m as i64).into());
        let p_val = p.sum_recip().recip();
        for cond in apr_characterization(&p, &r).unwrap() {
            match cond.slot {
                ConditionSlot::Product => {
                    assert_eq!(cond.weight_power(), Some(p_val.clone()));
                    assert_eq!(cond.ap_index(), Some(&m_rat * &p_val));
                }
                ConditionSlot::Factor(i) => {
                    let pc = p.entry(i).conjugate().unwrap().recip().recip();
                    let q = &m_rat * &pc; // index of w_i^{−p'_i} ∈ A_{mp'_i}
                    let q_conj = &q / (&q - Rat::one());
                    // conjugated power: −p'_i (1 − q') = p'_i/(mp'_i − 1)
                    let dual_power = &pc / (&q - Rat::one());
                    assert_eq!(cond.weight_power(), Some(dual_power));
                    assert_eq!(cond.ap_index(), Some(q_conj));
                }
            }
        }
    }
}

/// Power-invariance consistency: the estimate of `[w^s]_{A_{s(p−1)+1}}` is
/// refinement-stable exactly when the analytic verdicts put `w` in
/// `A_p ∩ RH_s`, tested on power weights.
#[test]
fn joint_condition_estimate_stability() {
    let estimate_at = |num: i64, den: i64, s: f64, tau: &Exp, cells: usize| -> f64 {
        let grid = Grid::line(1.0, cells).unwrap();
        let base = PowerWeight::new(rat(num, den), 1).unwrap();
        let powered =
            SampledWeight::from_fn(grid.clone(), |x| base.eval(x).powf(s)).unwrap();
        let family = CubeFamily::sliding(&grid, 6).unwrap();
        estimate_ap(&powered, tau, &family).unwrap().value
    };
    // member: |x|^{1/2} ∈ A_2 ∩ RH_2, so |x|^1 ∈ A_3 and the estimate is
    // stable under refinement
    let w = PowerWeight::new(rat(1, 2), 1).unwrap();
    assert!(in_ap(&w, &Exp::from_int(2).unwrap()).unwrap().in_class);
    assert!(in_reverse_holder(&w, &RhExponent::finite(rat(2, 1)).unwrap()).unwrap().in_class);
    let tau = Exp::from_int(3).unwrap();
    let grow = estimate_at(1, 2, 2.0, &tau, 4096) / estimate_at(1, 2, 2.0, &tau, 512);
    assert!(grow < 1.1, "member estimate grew by {grow}");

    // non-member: |x|^{-3/5} fails RH_2 (the squared weight is not locally
    // integrable) and the estimate blows up under refinement
    let w = PowerWeight::new(rat(-3, 5), 1).unwrap();
    assert!(!in_reverse_holder(&w, &RhExponent::finite(rat(2, 1)).unwrap()).unwrap().in_class);
    let grow = estimate_at(-3, 5, 2.0, &tau, 4096) / estimate_at(-3, 5, 2.0, &tau, 512);
    assert!(grow > 1.3, "non-member estimate grew only by {grow}");
}

/// Reverse Hölder estimate against the closed-form interval oracle: for
/// `|x|^{1/2}` and `s = 2` on `[−1, 1]` the ratio on `[−u, 1]` is
/// `(3/2)·√((1+u²)(1+u)/2)/(1+u^{3/2})`, maximized over the endpoint
/// ratio; intervals missing the origin give less.
#[test]
fn rh_estimate_matches_interval_oracle() {
    let oracle = {
        let g = |u: f64| {
            1.5 * ((1.0 + u * u) * (1.0 + u) / 2.0).sqrt() / (1.0 + u.powf(1.5))
        };
        let mut best = g(1.0);
        for k in 1..=1_000_000 {
            best = f64::max(best, g(k as f64 / 1_000_000.0));
        }
        best
    };
    let grid = Grid::line(1.0, 1 << 14).unwrap();
    let w = sampled_power(&grid, 1, 2);
    let family = CubeFamily::sliding(&grid, 10).unwrap();
    let est = weightlab::numerics::estimate_rh(&w, 2.0, &family).unwrap();
    let rel = (est.value - oracle).abs() / oracle;
    assert!(rel <= 0.02, "estimate {} vs oracle {oracle}: off by {rel:.4}", est.value);
}

/// Smooth compactly supported symbols produce more compact commutator
/// images than oscillating ones: the uniform bound and the
/// translation/averaging moduli of the smooth-symbol scorecard sit below
/// the oscillating-symbol scorecard at every grid point, on both stress
/// families. (Tail curves order the other way: the oscillation cancels
/// mass and shrinks the far field, so tails are not a regularity
/// indicator.)
#[test]
fn scorecard_ordering_smooth_vs_oscillating_symbol() {
    use std::sync::Arc;
    use weightlab::compactness::{fk_scan, FkGrids, InputFamily};
    use weightlab::grid::SampledFunction;
    use weightlab::operators::{commutator, FractionalIntegral, OpHandle};

    let grid = Grid::line(1.0, 128).unwrap();
    let cw = grid.cell_width();
    let grids = FkGrids {
        tail_radii: vec![0.3, 0.5, 0.7],
        translations: vec![8.0 * cw, 4.0 * cw, 2.0 * cw, cw],
        averaging_radii: vec![8.0 * cw, 4.0 * cw, 2.0 * cw],
        fractional_p0: None,
    };
    let bump = |x: f64, w: f64| {
        let t = x / w;
        if t.abs() < 1.0 {
            (-1.0 / (1.0 - t * t)).exp()
        } else {
            0.0
        }
    };
    let smooth = SampledFunction::from_fn(grid.clone(), |x| bump(x[0], 0.5)).unwrap();
    let oscillating = SampledFunction::from_fn(grid.clone(), |x| {
        bump(x[0], 0.5) * (8.0 * std::f64::consts::PI * x[0]).cos()
    })
    .unwrap();
    let base: OpHandle = Arc::new(FractionalIntegral::new(grid.clone(), 0.5, 1).unwrap());
    let families = [
        InputFamily::translated_bumps(&grid, 1, 8, 0.15, &[2.0]).unwrap(),
        InputFamily::oscillating_bumps(&grid, 1, 8, &[2.0]).unwrap(),
    ];
    for family in &families {
        let rs = fk_scan(
            &commutator(base.clone(), smooth.clone(), 0).unwrap(),
            family,
            None,
            2.0,
            &grids,
        )
        .unwrap();
        let ro = fk_scan(
            &commutator(base.clone(), oscillating.clone(), 0).unwrap(),
            family,
            None,
            2.0,
            &grids,
        )
        .unwrap();
        assert!(rs.uniform_bound <= ro.uniform_bound);
        for (a, b) in rs.translation_curve.iter().zip(&ro.translation_curve) {
            assert!(a.1 <= b.1, "translation modulus {} > {}", a.1, b.1);
        }
        for (a, b) in rs.averaging_curve.iter().zip(&ro.averaging_curve) {
            assert!(a.1 <= b.1, "averaging modulus {} > {}", a.1, b.1);
        }
    }
}

/// The esssup-form conditions emitted for degenerate pairs evaluate
/// consistently between the analytic layer and the estimator's proxy.
#[test]
fn esssup_form_consistency() {
    // p = r componentwise: the analytic membership of a constant tuple holds,
    // and the estimator returns exactly one
    let p = ExpVector::from_ints(&[2]).unwrap();
    let r = RVector::from_ints(&[2, 2]).unwrap();
    let ws = vec![PowerWeight::constant(1)];
    assert!(in_apr(&ws, &p, &r).unwrap().in_class);
    let grid = Grid::line(1.0, 256).unwrap();
    let one = SampledWeight::constant(grid.clone(), 1.0).unwrap();
    let family = CubeFamily::three_shift(&grid, 4).unwrap();
    let est = estimate_apr(&[&one], &p, &r, &family).unwrap();
    assert!((est.value - 1.0).abs() < 1e-12);

    // a rising power weight fails the esssup-form product condition; the
    // estimate grows with refinement
    let ws = vec![PowerWeight::new(rat(1, 2), 1).unwrap()];
    assert!(!in_apr(&ws, &p, &r).unwrap().in_class);
    let v_of = |cells: usize| {
        let grid = Grid::line(1.0, cells).unwrap();
        let w = sampled_power(&grid, 1, 2);
        let family = CubeFamily::sliding(&grid, 5).unwrap();
        estimate_apr(&[&w], &p, &r, &family).unwrap().value
    };
    assert!(v_of(2048) > v_of(256) * 1.2);
}
