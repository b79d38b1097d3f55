//! End-to-end acceptance gate.
//!
//! One test per acceptance criterion. Each prints exactly one
//! `acceptance <k> (<name>): PASS|FAIL` line and panics with per-check
//! details on failure, so `cargo test` output doubles as the gate report.
//!
//! Every expected value is recomputed here from scratch (integer
//! recursions, exact rational products, finite differences, brute-force
//! grids) rather than read back from the library, so the suite stays an
//! independent check instead of a mirror.

use std::time::Instant;

use num_bigint::BigUint;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use sspline::harness::{make_sinc_product, run_bound_experiment, ExperimentOptions, Regime};
use sspline::interp::{
    build_interpolant, eval_interpolant, BuildOptions, CubeDomain, ScatteredData,
};
use sspline::kernel::bessel_k;
use sspline::logspace::Sign;
use sspline::select::{
    compute_omega_and_d0, error_bound, log_mn_extended, log_mn_on_branch_for_tests,
    oracle_minimize_mn, select_c, seminorm_bound, B0Mode, CBranch, CChoice, CaseId,
    SelectionProblem,
};
use sspline::theory::{gamma, rho_and_delta0, GapCase, KernelParams, TheoryContext};
use sspline::LogScalar;

// ---------------------------------------------------------------------------
// gate plumbing
// ---------------------------------------------------------------------------

/// Collects check outcomes for one criterion and prints its single
/// pass/fail line at the end.
struct Gate {
    number: u32,
    name: &'static str,
    checks: usize,
    failed: usize,
    details: Vec<String>,
    start: Instant,
}

impl Gate {
    fn new(number: u32, name: &'static str) -> Self {
        Gate {
            number,
            name,
            checks: 0,
            failed: 0,
            details: Vec::new(),
            start: Instant::now(),
        }
    }

    fn check(&mut self, ok: bool, detail: impl FnOnce() -> String) {
        self.checks += 1;
        if !ok {
            self.failed += 1;
            // Keep the panic message readable when a whole family breaks.
            if self.details.len() < 24 {
                self.details.push(detail());
            }
        }
    }

    fn finish(self) {
        let status = if self.failed == 0 { "PASS" } else { "FAIL" };
        println!(
            "acceptance {} ({}): {} [{} checks, {:.2?}]",
            self.number,
            self.name,
            status,
            self.checks,
            self.start.elapsed()
        );
        if self.failed > 0 {
            panic!(
                "criterion {} ({}) failed {}/{} checks:\n{}",
                self.number,
                self.name,
                self.failed,
                self.checks,
                self.details.join("\n")
            );
        }
    }
}

fn ls(v: f64) -> LogScalar {
    LogScalar::from_value(v).expect("valid positive value")
}

fn lsl(l: f64) -> LogScalar {
    LogScalar::from_ln(l).expect("valid log value")
}

fn uni(rng: &mut ChaCha8Rng, lo: f64, hi: f64) -> f64 {
    lo + (hi - lo) * rng.gen::<f64>()
}

fn log_uni(rng: &mut ChaCha8Rng, lo: f64, hi: f64) -> f64 {
    (uni(rng, lo.ln(), hi.ln())).exp()
}

// ---------------------------------------------------------------------------
// 1. constants suite
// ---------------------------------------------------------------------------

#[test]
fn a01_gamma_recursion_and_delta0_rho_oracles() {
    let mut g = Gate::new(1, "constants and delta0/rho oracles");

    // gamma_n by direct u128 recursion, compared exactly.
    let mut prev: u128 = 0;
    let mut table = Vec::new();
    for n in 1..=12u128 {
        let expect = 2 * n * (1 + prev);
        table.push(expect);
        prev = expect;
        if n <= 8 {
            let got = gamma(n as usize).unwrap();
            g.check(got == BigUint::from(expect), || {
                format!("gamma({n}) = {got}, expected {expect}")
            });
        }
    }
    g.check(table[..8] == [2u128, 12, 78, 632, 6330, 75972, 1063622, 17017968], || {
        "recursion table drifted from the pinned first eight values".into()
    });

    // rho and delta0 for every even pair in [2,12]^2, against an exact
    // integer-product evaluation of the three branches.
    for n in (2..=12usize).step_by(2) {
        for lambda in (2..=12u32).step_by(2) {
            let rd = rho_and_delta0(n, lambda).unwrap();
            // The kernel's c.p.d. order depends only on lambda.
            let m = (lambda / 2 + 1) as i64;
            let gap = n as i64 - lambda as i64;
            let (num, den, ln_delta, case) = if gap > 3 {
                let s = (gap - 2) / 2;
                let den = 2 * m + 3;
                let num = den + s;
                let mut prod: u128 = 1;
                for j in (2 * m + 3)..=(2 * m + 2 + s) {
                    prod *= j as u128;
                }
                let e = (2 * m + 2) as u32;
                let ln_delta = (prod as f64).ln()
                    + ((den as u128).pow(e) as f64).ln()
                    - ((num as u128).pow(e) as f64).ln();
                (num as u64, den as u64, ln_delta, GapCase::Wide)
            } else if gap <= 1 {
                let s = 1 + (-gap) / 2;
                let mut prod: u128 = 1;
                for j in (2 * m - s + 3)..=(2 * m + 2) {
                    prod *= j as u128;
                }
                (1, 1, -((prod as f64).ln()), GapCase::Narrow)
            } else {
                (1, 1, 0.0, GapCase::Boundary)
            };
            g.check(rd.case == case, || {
                format!("({n},{lambda}): branch {:?}, expected {:?}", rd.case, case)
            });
            g.check(rd.rho_frac == (num, den), || {
                format!("({n},{lambda}): rho = {:?}, expected {num}/{den}", rd.rho_frac)
            });
            g.check((rd.rho - num as f64 / den as f64).abs() <= 1e-15 * rd.rho, || {
                format!("({n},{lambda}): rho float {} vs {num}/{den}", rd.rho)
            });
            let lhs = rd.delta0.ln();
            g.check((lhs - ln_delta).abs() <= 1e-12 * lhs.abs().max(1.0), || {
                format!("({n},{lambda}): ln delta0 = {lhs}, oracle {ln_delta}")
            });

            // Context-level constants against the same integer table.
            let ctx = TheoryContext::new(KernelParams::new(n, lambda, 1.0).unwrap()).unwrap();
            let gamma_n = table[n - 1] as f64;
            let big = 2.0 * n as f64 * gamma_n;
            g.check((ctx.big_exp - big).abs() <= 1e-15 * big, || {
                format!("({n},{lambda}): 2 n gamma_n = {}, expected {big}", ctx.big_exp)
            });
            g.check(
                (ctx.ln_gamma_n - gamma_n.ln()).abs() <= 1e-14 * gamma_n.ln().abs(),
                || format!("({n},{lambda}): ln gamma_n = {}", ctx.ln_gamma_n),
            );
            // alpha_n = pi^(n/2) / (n/2)! for even n.
            let half = (n / 2) as u32;
            let alpha = std::f64::consts::PI.powi(half as i32)
                / (1..=half).map(|j| j as f64).product::<f64>();
            g.check((ctx.alpha_n - alpha).abs() <= 1e-13 * alpha, || {
                format!("({n},{lambda}): alpha_n = {}, expected {alpha}", ctx.alpha_n)
            });
        }
    }

    g.finish();
}

// ---------------------------------------------------------------------------
// 2. interpolation exactness on random point sets
// ---------------------------------------------------------------------------

/// Uniform draws on `[0, side]^dim` with a minimum-separation rejection rule
/// (`0.4 side / sqrt(n_pts)`), which keeps the kernel system solvable at a
/// fixed pivot floor across the whole `(c, N)` envelope below.
fn sample_separated(
    rng: &mut ChaCha8Rng,
    n_pts: usize,
    dim: usize,
    side: f64,
) -> Option<Vec<Vec<f64>>> {
    let min_sep = 0.4 * side / (n_pts as f64).sqrt();
    let mut pts: Vec<Vec<f64>> = Vec::with_capacity(n_pts);
    let mut attempts = 0usize;
    while pts.len() < n_pts {
        attempts += 1;
        if attempts > 400 * n_pts {
            return None;
        }
        let cand: Vec<f64> = (0..dim).map(|_| uni(rng, 0.0, side)).collect();
        let clear = pts.iter().all(|p| {
            p.iter()
                .zip(&cand)
                .map(|(a, b)| (a - b) * (a - b))
                .sum::<f64>()
                .sqrt()
                >= min_sep
        });
        if clear {
            pts.push(cand);
        }
    }
    Some(pts)
}

/// Empirically safe `c/side` window per kernel order and point count: the
/// flat-limit conditioning of the system caps how large the shape parameter
/// can be relative to the node spacing before double precision runs out,
/// and the cap tightens with more points and with `lambda = 4`. The windows
/// sit one notch inside a measured pass/fail map, so every `N` in [10, 200]
/// and every `c` in [0.1, 10] is exercised on a solvable geometry.
fn ratio_range(lambda: u32, n_pts: usize) -> (f64, f64) {
    if lambda == 2 {
        match n_pts {
            0..=60 => (0.02, 0.25),
            _ => (0.02, 0.12),
        }
    } else {
        match n_pts {
            0..=30 => (0.02, 0.25),
            31..=60 => (0.02, 0.15),
            61..=100 => (0.02, 0.08),
            101..=140 => (0.02, 0.07),
            _ => (0.02, 0.045),
        }
    }
}

/// All 2-d monomial exponent pairs of total degree <= deg, graded order.
fn monomials_2d(deg: u32) -> Vec<(u32, u32)> {
    let mut out = Vec::new();
    for total in 0..=deg {
        for i in (0..=total).rev() {
            out.push((i, total - i));
        }
    }
    out
}

fn eval_monomial(e: (u32, u32), x: &[f64]) -> f64 {
    x[0].powi(e.0 as i32) * x[1].powi(e.1 as i32)
}

#[test]
fn a02_interpolant_matches_data_on_random_unisolvent_sets() {
    let mut g = Gate::new(2, "interpolation exactness on random point sets");
    let mut rng = ChaCha8Rng::seed_from_u64(0xA02);

    for trial in 0..100 {
        let lambda = if trial % 2 == 0 { 2 } else { 4 };
        let n_pts = 10 + (rng.gen::<u64>() % 191) as usize; // 10..=200
        let c = log_uni(&mut rng, 0.1, 10.0);
        let (rlo, rhi) = ratio_range(lambda, n_pts);
        let side = c / uni(&mut rng, rlo, rhi);

        let Some(points) = sample_separated(&mut rng, n_pts, 2, side) else {
            g.check(false, || {
                format!("trial {trial}: point sampler stalled (N = {n_pts}, side = {side})")
            });
            continue;
        };
        let values: Vec<f64> = (0..n_pts).map(|_| uni(&mut rng, -1.0, 1.0)).collect();
        let scale = 1.0 + values.iter().fold(0.0f64, |a, v| a.max(v.abs()));

        let data = ScatteredData::new(2, points.clone(), values.clone()).unwrap();
        let params = KernelParams::new(2, lambda, c).unwrap();
        // One decade below the default pivot floor; the explicit residual
        // checks below are the acceptance assertions, so a laxer floor only
        // widens the geometries we can exercise.
        let build = BuildOptions { pivot_floor: 1e-14, ..BuildOptions::default() };
        let interp = match build_interpolant(&data, &params, &build) {
            Ok(i) => i,
            Err(e) => {
                g.check(false, || {
                    format!(
                        "trial {trial}: build failed (lambda {lambda}, N {n_pts}, \
                         c {c:.3}, side {side:.3}): {e}"
                    )
                });
                continue;
            }
        };

        // Interpolation equations, re-checked through the public evaluator.
        let mut worst = 0.0f64;
        for (x, y) in points.iter().zip(&values) {
            let s = eval_interpolant(&interp, x).unwrap();
            worst = worst.max((s - y).abs());
        }
        g.check(worst <= 1e-8 * scale, || {
            format!(
                "trial {trial}: data residual {worst:.3e} > 1e-8 * {scale:.3} \
                 (lambda {lambda}, N {n_pts}, c {c:.3}, side {side:.3})"
            )
        });

        // Side conditions: the kernel weights must annihilate every
        // monomial of degree <= m-1.
        let mut worst_side = 0.0f64;
        for e in monomials_2d(params.m() - 1) {
            let s: f64 = interp
                .kernel_coeffs
                .iter()
                .zip(&points)
                .map(|(a, x)| a * eval_monomial(e, x))
                .sum();
            // Monomial values grow with the domain side; normalize.
            let mono_scale = points
                .iter()
                .map(|x| eval_monomial(e, x).abs())
                .fold(0.0f64, f64::max)
                .max(1.0);
            worst_side = worst_side.max(s.abs() / mono_scale);
        }
        g.check(worst_side <= 1e-8 * scale, || {
            format!(
                "trial {trial}: side-condition residual {worst_side:.3e} \
                 (lambda {lambda}, N {n_pts}, c {c:.3}, side {side:.3})"
            )
        });
    }

    g.finish();
}

// ---------------------------------------------------------------------------
// 3. polynomial reproduction
// ---------------------------------------------------------------------------

#[test]
fn a03_polynomial_reproduction_spanning_monomials() {
    let mut g = Gate::new(3, "polynomial reproduction");

    // 5x5 grid on the unit square is unisolvent for degree <= 2.
    let mut centers = Vec::new();
    for i in 0..5 {
        for j in 0..5 {
            centers.push(vec![i as f64 / 4.0, j as f64 / 4.0]);
        }
    }
    let mut probes = Vec::new();
    for i in 0..11 {
        for j in 0..11 {
            probes.push(vec![i as f64 / 10.0, j as f64 / 10.0]);
        }
    }

    for lambda in [2u32, 4] {
        let params = KernelParams::new(2, lambda, 1.0).unwrap();
        for e in monomials_2d(params.m() - 1) {
            let values: Vec<f64> = centers.iter().map(|x| eval_monomial(e, x)).collect();
            let data = ScatteredData::new(2, centers.clone(), values).unwrap();
            let interp = build_interpolant(&data, &params, &BuildOptions::default()).unwrap();

            let mut worst = 0.0f64;
            let mut fmax = 0.0f64;
            for x in &probes {
                let f = eval_monomial(e, x);
                fmax = fmax.max(f.abs());
                worst = worst.max((eval_interpolant(&interp, x).unwrap() - f).abs());
            }
            g.check(worst <= 1e-7 * (1.0 + fmax), || {
                format!(
                    "lambda {lambda}, monomial x^{} y^{}: probe error {worst:.3e}",
                    e.0, e.1
                )
            });
        }
    }

    g.finish();
}

// ---------------------------------------------------------------------------
// 4. selector vs. brute-force oracle, all nine cases
// ---------------------------------------------------------------------------

/// Parameter recipe steering draws into one selection case. `c_max_ln`
/// returns the oracle's right edge; it is kept close above the expected
/// minimum so the log-grid stays dense near kink minima.
struct Steer {
    name: &'static str,
    expected: CaseId,
    draws: usize,
    grid: usize,
    gen: fn(&mut ChaCha8Rng) -> Option<SelectionProblem>,
    c_max_ln: fn(&SelectionProblem) -> f64,
}

fn c1_ln(p: &SelectionProblem) -> f64 {
    p.derived().c1.as_ref().expect("fixed mode has c1").ln()
}

fn gen_fixed1(rng: &mut ChaCha8Rng) -> Option<SelectionProblem> {
    let lambda = if rng.gen::<bool>() { 2 } else { 4 };
    SelectionProblem::new(
        2,
        lambda,
        ls(uni(rng, 2.0, 4.0)),
        ls(1e-23 * uni(rng, 0.5, 2.0)),
        B0Mode::Fixed(ls(uni(rng, 0.5, 2.0))),
    )
    .ok()
}

fn gen_fixed2(rng: &mut ChaCha8Rng) -> Option<SelectionProblem> {
    // sigma = 2 with d in a window where the slope correction outweighs
    // sigma/2, so k < 0 while p > 0: the "rarely happens" sign pattern.
    SelectionProblem::new(
        2,
        2,
        ls(2.0),
        ls(uni(rng, 2.0e-24, 2.7e-24)),
        B0Mode::Fixed(ls(uni(rng, 1.0e-21, 3.0e-21))),
    )
    .ok()
}

/// Tune sigma so the slope `k = sigma/2 + correction` cancels exactly in
/// signed-log arithmetic: aim at `ln(2|correction|)` and scan +-8 ulps.
fn gen_fixed3(rng: &mut ChaCha8Rng) -> Option<SelectionProblem> {
    let d = lsl(uni(rng, -911_690.0, -911_680.0));
    let b0 = B0Mode::Fixed(lsl(d.ln() + uni(rng, 13.75, 14.5)));
    let probe = SelectionProblem::new(6, 2, ls(1.0), d, b0).ok()?;
    let target = probe.derived().correction.log_abs() + std::f64::consts::LN_2;
    let mut cands = vec![target];
    let (mut up, mut down) = (target, target);
    for _ in 0..8 {
        up = up.next_up();
        down = down.next_down();
        cands.push(up);
        cands.push(down);
    }
    cands.into_iter().find_map(|t| {
        let prob = SelectionProblem::new(6, 2, lsl(t), d, b0).ok()?;
        prob.derived().k.is_zero().then_some(prob)
    })
}

fn gen_fixed4(rng: &mut ChaCha8Rng) -> Option<SelectionProblem> {
    // Moderate sigma against a large (but sub-sigma/2) correction: p < 0,
    // k > 0, interior dip above the floor and far below the branch point.
    let d = lsl(uni(rng, -911_681.25, -911_681.05));
    SelectionProblem::new(
        6,
        2,
        ls(uni(rng, 10.8, 11.6)),
        d,
        B0Mode::Fixed(lsl(d.ln() + uni(rng, 18.0, 30.0))),
    )
    .ok()
}

fn gen_fixed5(rng: &mut ChaCha8Rng) -> Option<SelectionProblem> {
    // Tiny sigma, moderate d: p < 0 and k < 0; minimum decided between the
    // branch point and the tail stationary point -2p/sigma.
    let d = lsl(uni(rng, -911_673.5, -911_672.5));
    SelectionProblem::new(
        6,
        2,
        ls(0.001 * uni(rng, 0.8, 1.2)),
        d,
        B0Mode::Fixed(lsl(d.ln() + uni(rng, 14.0, 14.4))),
    )
    .ok()
}

fn gen_dilation1(rng: &mut ChaCha8Rng) -> Option<SelectionProblem> {
    let lambda = if rng.gen::<bool>() { 2 } else { 4 };
    SelectionProblem::new(
        2,
        lambda,
        ls(uni(rng, 2.0, 4.0)),
        ls(1e-23 * uni(rng, 0.5, 2.0)),
        B0Mode::DilationInvariant,
    )
    .ok()
}

fn gen_dilation2(rng: &mut ChaCha8Rng) -> Option<SelectionProblem> {
    SelectionProblem::new(
        2,
        2,
        lsl(uni(rng, -61.0, -59.0)),
        ls(1e-20 * uni(rng, 0.5, 2.0)),
        B0Mode::DilationInvariant,
    )
    .ok()
}

fn gen_dilation3(rng: &mut ChaCha8Rng) -> Option<SelectionProblem> {
    // sigma/2 just above the correction magnitude: k > 0 but often small,
    // putting the dip -p/k above the floor for roughly a third of draws
    // (the rest clamp to c0, covering both sub-branches).
    SelectionProblem::new(
        4,
        2,
        ls(uni(rng, 7.9, 8.3)),
        lsl(uni(rng, -5067.9, -5067.4)),
        B0Mode::DilationInvariant,
    )
    .ok()
}

fn gen_dilation4(rng: &mut ChaCha8Rng) -> Option<SelectionProblem> {
    SelectionProblem::new(
        4,
        2,
        lsl(uni(rng, -6010.0, -5990.0)),
        lsl(uni(rng, -5075.0, -5065.0)),
        B0Mode::DilationInvariant,
    )
    .ok()
}

#[test]
fn a04_selector_matches_grid_oracle_across_all_cases() {
    let mut g = Gate::new(4, "selector-oracle equivalence");
    let mut rng = ChaCha8Rng::seed_from_u64(0xA04);

    let steers = [
        Steer {
            name: "fixed-1",
            expected: CaseId::Fixed1,
            draws: 50,
            grid: 30_000,
            gen: gen_fixed1,
            c_max_ln: |p| c1_ln(p) + 1.0,
        },
        Steer {
            name: "fixed-2",
            expected: CaseId::Fixed2,
            draws: 50,
            grid: 150_000,
            gen: gen_fixed2,
            c_max_ln: |p| c1_ln(p) + 0.5,
        },
        Steer {
            name: "fixed-3",
            expected: CaseId::Fixed3,
            draws: 50,
            grid: 30_000,
            gen: gen_fixed3,
            c_max_ln: |p| c1_ln(p) + 0.5,
        },
        Steer {
            name: "fixed-4",
            expected: CaseId::Fixed4,
            draws: 50,
            grid: 30_000,
            gen: gen_fixed4,
            c_max_ln: |p| c1_ln(p) + 0.5,
        },
        Steer {
            name: "fixed-5",
            expected: CaseId::Fixed5,
            draws: 50,
            grid: 30_000,
            gen: gen_fixed5,
            c_max_ln: |p| {
                let tail = 1.5f64.ln() - p.sigma().ln();
                c1_ln(p).max(tail) + 0.5
            },
        },
        Steer {
            name: "dilation-1",
            expected: CaseId::Dilation1,
            draws: 50,
            grid: 30_000,
            gen: gen_dilation1,
            c_max_ln: |p| p.derived().c0.ln() + 3.0,
        },
        Steer {
            name: "dilation-2",
            expected: CaseId::Dilation2,
            draws: 50,
            grid: 30_000,
            gen: gen_dilation2,
            c_max_ln: |p| p.derived().c0.ln() + 5.0,
        },
        Steer {
            name: "dilation-3",
            expected: CaseId::Dilation3,
            draws: 50,
            grid: 30_000,
            gen: gen_dilation3,
            // Small k pushes the dip -p/k well past c0; cover it either way.
            c_max_ln: |p| {
                let d = p.derived();
                let stationary = 0.25f64.ln() - d.k.log_abs();
                (d.c0.ln() + 3.0).max(stationary + 1.0)
            },
        },
        Steer {
            name: "dilation-4",
            expected: CaseId::Dilation4,
            draws: 50,
            grid: 30_000,
            gen: gen_dilation4,
            c_max_ln: |p| p.derived().c0.ln() + 5.0,
        },
    ];

    for steer in &steers {
        for trial in 0..steer.draws {
            let Some(problem) = (steer.gen)(&mut rng) else {
                g.check(false, || format!("{} trial {trial}: generator failed", steer.name));
                continue;
            };
            let rec = match select_c(&problem) {
                Ok(r) => r,
                Err(e) => {
                    g.check(false, || {
                        format!("{} trial {trial}: selector error: {e}", steer.name)
                    });
                    continue;
                }
            };
            g.check(rec.case_id == steer.expected, || {
                format!(
                    "{} trial {trial}: landed in {:?}, steering aimed at {:?}",
                    steer.name, rec.case_id, steer.expected
                )
            });

            let c_max = lsl((steer.c_max_ln)(&problem));
            let oracle = match oracle_minimize_mn(&problem, &c_max, steer.grid) {
                Ok(o) => o,
                Err(e) => {
                    g.check(false, || {
                        format!("{} trial {trial}: oracle error: {e}", steer.name)
                    });
                    continue;
                }
            };

            match &rec.choice {
                CChoice::Finite(_) => {
                    let sel = rec
                        .log_mn_at_choice
                        .expect("finite choice reports its objective")
                        .to_f64();
                    let orc = oracle.log_mn.to_f64();
                    g.check(!oracle.at_right_edge, || {
                        format!(
                            "{} trial {trial}: oracle ran off the right edge of \
                             [c0, {:.4e}]",
                            steer.name,
                            c_max.ln()
                        )
                    });
                    g.check((sel - orc).abs() <= 1e-4, || {
                        format!(
                            "{} trial {trial}: ln MN selector {sel:.8} vs oracle {orc:.8} \
                             (diff {:.2e})",
                            steer.name,
                            (sel - orc).abs()
                        )
                    });
                }
                CChoice::UnboundedPreferLarge => {
                    g.check(oracle.at_right_edge, || {
                        format!(
                            "{} trial {trial}: selector says unbounded but the oracle \
                             minimum sits at interior index {}",
                            steer.name, oracle.index
                        )
                    });
                }
            }
        }
    }

    g.finish();
}

// ---------------------------------------------------------------------------
// 5. objective continuity at the branch point c1
// ---------------------------------------------------------------------------

#[test]
fn a05_mn_branches_agree_at_the_seam() {
    let mut g = Gate::new(5, "objective continuity at c1");
    let mut rng = ChaCha8Rng::seed_from_u64(0xA05);

    let families = [(2usize, 2u32), (2, 4), (4, 2), (4, 4), (6, 2), (6, 4)];
    for trial in 0..100 {
        let (n, lambda) = families[trial % families.len()];
        let sigma = ls(uni(&mut rng, 0.5, 4.0));
        let ln_d = match n {
            2 => (1e-23 * uni(&mut rng, 0.5, 5.0)).ln(),
            4 => uni(&mut rng, -5075.0, -5060.0),
            _ => uni(&mut rng, -911_690.0, -911_670.0),
        };
        // Admissibility floor for ln(b0/d), from the problem's own context.
        let ctx = TheoryContext::new(KernelParams::new(n, lambda, 1.0).unwrap()).unwrap();
        let adm = 4.0f64.ln() + ctx.ln_gamma_n + ((ctx.params.m() + 1) as f64).ln();
        let b0 = lsl(ln_d + uni(&mut rng, adm + 0.3, adm + 15.0));
        let problem =
            SelectionProblem::new(n, lambda, sigma, lsl(ln_d), B0Mode::Fixed(b0)).unwrap();

        let c1 = *problem.derived().c1.as_ref().unwrap();
        let below = log_mn_on_branch_for_tests(&problem, &c1, false).to_f64();
        let above = log_mn_on_branch_for_tests(&problem, &c1, true).to_f64();
        let tol = 1e-9 * below.abs().max(above.abs()).max(1.0);
        g.check((below - above).abs() <= tol, || {
            format!(
                "({n},{lambda}) trial {trial}: branch values {below:.12e} vs {above:.12e} \
                 at c1 (ln {:.4})",
                c1.ln()
            )
        });
    }

    g.finish();
}

// ---------------------------------------------------------------------------
// 6. interior optima are stationary
// ---------------------------------------------------------------------------

#[test]
fn a06_interior_optima_have_vanishing_derivative() {
    let mut g = Gate::new(6, "stationary interior optima");
    let mut rng = ChaCha8Rng::seed_from_u64(0xA06);

    // Central difference of ln MN in c at the selector's choice.
    fn fd_check(g: &mut Gate, label: &str, problem: &SelectionProblem, c: f64) {
        let h = 1e-6 * c;
        let up = log_mn_extended(problem, &ls(c + h)).unwrap().to_f64();
        let dn = log_mn_extended(problem, &ls(c - h)).unwrap().to_f64();
        let deriv = (up - dn) / (2.0 * h);
        g.check(deriv.abs() <= 1e-6, || {
            format!("{label}: d/dc ln MN = {deriv:.3e} at c = {c:.6e}")
        });
    }

    // Interior dip of the below-branch objective (p < 0, k > 0, fixed b0).
    for trial in 0..25 {
        let problem = gen_fixed4(&mut rng).expect("steered draw");
        let rec = select_c(&problem).unwrap();
        let CChoice::Finite(c) = rec.choice else {
            g.check(false, || format!("fixed-4 trial {trial}: expected a finite choice"));
            continue;
        };
        let c0 = problem.derived().c0;
        g.check(c.ln() > c0.ln() + 1e-3, || {
            format!("fixed-4 trial {trial}: choice stuck at the floor, nothing interior")
        });
        fd_check(&mut g, "fixed-4", &problem, c.value());
    }

    // Same dip in dilation-invariant mode; keep only draws that clear the
    // floor by a safe margin.
    let mut interior = 0;
    for _ in 0..60 {
        let problem = gen_dilation3(&mut rng).expect("steered draw");
        let rec = select_c(&problem).unwrap();
        let CChoice::Finite(c) = rec.choice else { continue };
        if c.ln() > problem.derived().c0.ln() + 1e-3 {
            interior += 1;
            fd_check(&mut g, "dilation-3", &problem, c.value());
        }
    }
    g.check(interior >= 10, || {
        format!("dilation-3: only {interior} interior draws out of 60")
    });

    // Tail stationary point -2p/sigma when it beats the branch point
    // (p < 0, k < 0, fixed b0).
    let mut tail = 0;
    for _ in 0..60 {
        let problem = gen_fixed5(&mut rng).expect("steered draw");
        let rec = select_c(&problem).unwrap();
        let CChoice::Finite(c) = rec.choice else { continue };
        let c1 = problem.derived().c1.as_ref().unwrap().ln();
        if c.ln() > c1 + 1e-3 {
            tail += 1;
            fd_check(&mut g, "fixed-5", &problem, c.value());
        }
    }
    g.check(tail >= 10, || {
        format!("fixed-5: only {tail} tail-stationary draws out of 60")
    });

    g.finish();
}

// ---------------------------------------------------------------------------
// 7. bound factorization identity
// ---------------------------------------------------------------------------

fn ln_fact(k: u32) -> f64 {
    (1..=k).map(|j| (j as f64).ln()).sum()
}

#[test]
fn a07_bound_factorizes_into_constant_mn_and_norm() {
    let mut g = Gate::new(7, "bound factorization identity");
    let mut rng = ChaCha8Rng::seed_from_u64(0xA07);

    for trial in 0..100 {
        // Mix dimensions, kernel orders, b0 modes, and c positions.
        let (n, lambda) = [(2usize, 2u32), (2, 4), (4, 2), (6, 2)][trial % 4];
        let sigma = uni(&mut rng, 0.5, 3.0);
        let ln_d = match n {
            2 => (1e-23 * uni(&mut rng, 0.5, 5.0)).ln(),
            4 => uni(&mut rng, -5070.0, -5060.0),
            _ => uni(&mut rng, -911_685.0, -911_675.0),
        };
        let b0_mode = if trial % 3 == 0 {
            B0Mode::DilationInvariant
        } else {
            let ctx = TheoryContext::new(KernelParams::new(n, lambda, 1.0).unwrap()).unwrap();
            let adm = 4.0f64.ln() + ctx.ln_gamma_n + ((ctx.params.m() + 1) as f64).ln();
            B0Mode::Fixed(lsl(ln_d + uni(&mut rng, adm + 0.4, adm + 8.0)))
        };
        let problem = SelectionProblem::new(n, lambda, ls(sigma), lsl(ln_d), b0_mode).unwrap();
        let c = lsl(problem.derived().c0.ln() + uni(&mut rng, 0.0, 3.0));
        let l2 = uni(&mut rng, 0.1, 10.0);

        let lhs = error_bound(&problem, &c, l2).unwrap().ln();
        let ctx = problem.ctx();
        let (nf, lf) = (n as f64, lambda as f64);
        let constant = 0.5 * ln_fact(ctx.params.m())
            - nf * (2.0 * std::f64::consts::PI).ln()
            + 0.5 * (2f64.ln() + nf.ln() + ctx.alpha_n.ln())
            + 0.25 * (1.0 + nf + lf) * sigma.ln()
            + 0.5 * ctx.rho_delta.delta0.ln();
        let mn_val = log_mn_extended(&problem, &c).unwrap().to_f64();
        let rhs = constant + mn_val + l2.ln();
        // The identity holds to rounding. Two effects set the floating-point
        // floor: terms of the sum may cancel (tolerance scales with the
        // largest term), and the convergence-factor exponent is assembled
        // from logs of size 2 n gamma_n, whose ulp alone is ~1e-10 at n = 6,
        // multiplying into that factor's value.
        let exp_term = (c.ln() + sigma.ln() - std::f64::consts::LN_2).exp();
        let p_term = 0.25 * (1.0 - nf + lf) * c.ln();
        let omega_mag = (mn_val - p_term - exp_term).abs();
        let tol = 1e-12 * lhs.abs().max(exp_term).max(1.0)
            + 8.0 * f64::EPSILON * ctx.big_exp * (1.0 + omega_mag);
        g.check((lhs - rhs).abs() <= tol, || {
            format!(
                "({n},{lambda}) trial {trial}: ln bound {lhs:.15e} vs factored {rhs:.15e} \
                 (diff {:.2e})",
                (lhs - rhs).abs()
            )
        });
    }

    g.finish();
}

// ---------------------------------------------------------------------------
// 8. in-regime constants are finite and self-consistent
// ---------------------------------------------------------------------------

#[test]
fn a08_regime_constants_are_finite_and_consistent() {
    let mut g = Gate::new(8, "in-regime constants self-consistency");

    // (lambda, c, b0 mode): below-branch, above-branch, dilation-invariant.
    let cases = [
        (2u32, 5.0, B0Mode::Fixed(ls(1.0))),
        (4, 7.0, B0Mode::Fixed(ls(1.0))),
        (2, 5.0, B0Mode::Fixed(ls(0.1))),
        (2, 5.0, B0Mode::DilationInvariant),
        (4, 7.0, B0Mode::DilationInvariant),
    ];

    for (idx, (lambda, c_val, b0_mode)) in cases.into_iter().enumerate() {
        let d = 1e-23;
        let problem =
            SelectionProblem::new(2, lambda, ls(2.0), ls(d), b0_mode).unwrap();
        let ctx = problem.ctx();
        let c = ls(c_val);

        // The arithmetic regime: floor below c, admissible fill distance.
        let c0 = problem.derived().c0;
        g.check(c0.ln() <= c.ln(), || {
            format!("case {idx}: floor ln c0 = {:.6} above ln c = {:.6}", c0.ln(), c.ln())
        });

        let od = compute_omega_and_d0(ctx, &c, problem.b0_mode()).unwrap();
        g.check(od.log_big_c.is_finite(), || format!("case {idx}: ln C not finite"));
        g.check(
            od.log_omega.sign() == Sign::Negative && od.log_omega.log_abs().is_finite(),
            || format!("case {idx}: ln omega = {:?}", od.log_omega),
        );
        g.check(od.d0.ln().is_finite() && d <= od.d0.value(), || {
            format!("case {idx}: d0 = {:.6e} rejects d = {d:.1e}", od.d0.value())
        });

        // Branch label matches a direct c vs c1 comparison.
        let expected_branch = match problem.b0_mode() {
            B0Mode::DilationInvariant => CBranch::DilationInvariant,
            B0Mode::Fixed(_) => {
                let c1 = problem.derived().c1.as_ref().unwrap();
                if c.ln() < c1.ln() {
                    CBranch::BelowC1
                } else {
                    CBranch::AtOrAboveC1
                }
            }
        };
        g.check(od.branch == expected_branch, || {
            format!("case {idx}: branch {:?}, expected {expected_branch:?}", od.branch)
        });

        // ln C recomputed from its defining max.
        let below = 2f64.ln() + ctx.rho_delta.rho.ln() + 0.5 * 2f64.ln() + ctx.big_exp
            - c.ln();
        let expected_ln_c = match (problem.b0_mode(), expected_branch) {
            (B0Mode::DilationInvariant, _) => below,
            (B0Mode::Fixed(b0), CBranch::BelowC1) => below.max(2f64.ln() - 3f64.ln() - b0.ln()),
            (B0Mode::Fixed(b0), _) => 2f64.ln() - 3f64.ln() - b0.ln(),
        };
        g.check(
            (od.log_big_c - expected_ln_c).abs() <= 1e-12 * expected_ln_c.abs().max(1.0),
            || format!("case {idx}: ln C = {:.15}, expected {expected_ln_c:.15}", od.log_big_c),
        );

        // d0 identity: ln d0 = -(ln 6 + ln C + ln gamma_n + ln(m+1)).
        let expected_ln_d0 = -(6f64.ln()
            + od.log_big_c
            + ctx.ln_gamma_n
            + ((ctx.params.m() + 1) as f64).ln());
        g.check(
            (od.d0.ln() - expected_ln_d0).abs() <= 1e-12 * expected_ln_d0.abs().max(1.0),
            || format!("case {idx}: ln d0 = {:.15}, expected {expected_ln_d0:.15}", od.d0.ln()),
        );

        // omega identity: ln omega = ln(2/3) / (6 C gamma_n), negative.
        let got = od.log_omega.to_f64();
        let want = -(3f64.ln() - 2f64.ln())
            * (-(6f64.ln() + od.log_big_c + ctx.ln_gamma_n)).exp();
        g.check((got - want).abs() <= 1e-12 * want.abs(), || {
            format!("case {idx}: ln omega = {got:.6e}, expected {want:.6e}")
        });

        // Bound and seminorm arithmetic stay finite in log space.
        let eb = error_bound(&problem, &c, 1.0).unwrap();
        g.check(eb.ln().is_finite(), || {
            format!("case {idx}: ln error bound = {}", eb.ln())
        });
        let sb = seminorm_bound(&problem, &c, 1.0).unwrap();
        g.check(sb.ln().is_finite(), || {
            format!("case {idx}: ln seminorm bound = {}", sb.ln())
        });
    }

    g.finish();
}

// ---------------------------------------------------------------------------
// 9. refinement experiment
// ---------------------------------------------------------------------------

#[test]
fn a09_refinement_experiment_error_non_increasing() {
    let mut g = Gate::new(9, "refinement experiment");

    let f = make_sinc_product(
        4.0,
        2,
        &[(1.0, vec![0.35, 0.4]), (0.6, vec![0.7, 0.65])],
    )
    .unwrap();
    let domain = CubeDomain::new(vec![0.0, 0.0], 1.0).unwrap();
    // Shape parameter a few times the finest spacing: large enough to act
    // like a shifted kernel, small enough that the 289-center system stays
    // solvable in double precision.
    let params = KernelParams::new(2, 2, 0.3).unwrap();
    let problem =
        SelectionProblem::new(2, 2, ls(4.0), ls(0.1), B0Mode::DilationInvariant).unwrap();
    // Probe lattice with step 1/64 contains every center and every cell
    // midpoint of all four grids, so the measured fill distance is exact
    // and halves precisely between levels. The dense structured 17x17 grid
    // sits close to the default pivot floor; the relaxed floor keeps the
    // solve, and the builder's residual check still guards correctness.
    let opts = ExperimentOptions {
        probe_resolution: 65,
        build: BuildOptions { pivot_floor: 1e-14, ..BuildOptions::default() },
    };

    let mut reports = Vec::new();
    for per_axis in [3usize, 5, 9, 17] {
        let centers = sspline::harness::grid_centers(&domain, per_axis).unwrap();
        let report =
            run_bound_experiment(&f, &domain, &centers, &params, &problem, &opts).unwrap();
        g.check(report.num_centers == per_axis * per_axis, || {
            format!("grid {per_axis}: {} centers", report.num_centers)
        });
        g.check(report.regime == Regime::OutOfRegime, || {
            format!("grid {per_axis}: regime {:?}", report.regime)
        });
        g.check(
            report.log_bound.is_finite()
                && report.log_c0.is_finite()
                && report.log_d0.is_finite(),
            || format!("grid {per_axis}: non-finite report fields"),
        );
        g.check(report.empirical_max_error.is_finite() && report.empirical_max_error >= 0.0, || {
            format!("grid {per_axis}: error {}", report.empirical_max_error)
        });
        g.check((report.l2_norm - f.l2_norm()).abs() <= 1e-12 * f.l2_norm(), || {
            format!("grid {per_axis}: l2 norm {}", report.l2_norm)
        });
        // The emitted CSV row is complete.
        let row = report.to_csv_row();
        g.check(
            row.split(',').count()
                == sspline::harness::ExperimentReport::csv_header().split(',').count(),
            || format!("grid {per_axis}: short csv row {row:?}"),
        );
        reports.push(report);
    }

    // Fill distance starts at sqrt(2)/4 and halves at each refinement.
    let expect0 = std::f64::consts::SQRT_2 / 4.0;
    g.check((reports[0].d - expect0).abs() <= 1e-9 * expect0, || {
        format!("coarse fill distance {} vs sqrt(2)/4", reports[0].d)
    });
    for w in reports.windows(2) {
        g.check((w[0].d / w[1].d - 2.0).abs() <= 1e-9, || {
            format!("fill distances {} -> {} are not halving", w[0].d, w[1].d)
        });
        g.check(w[1].empirical_max_error <= w[0].empirical_max_error * (1.0 + 1e-9), || {
            format!(
                "error grew under refinement: {} -> {}",
                w[0].empirical_max_error, w[1].empirical_max_error
            )
        });
    }

    g.finish();
}

// ---------------------------------------------------------------------------
// 10. Bessel foundation
// ---------------------------------------------------------------------------

#[test]
fn a10_bessel_recurrence_and_lower_bound() {
    let mut g = Gate::new(10, "bessel recurrence and lower bound");

    let grid: Vec<f64> = (0..60)
        .map(|i| {
            let t = i as f64 / 59.0;
            (0.1f64.ln() * (1.0 - t) + 100f64.ln() * t).exp()
        })
        .collect();

    for &t in &grid {
        // Three-term recurrence K_{nu+1}(t) = K_{nu-1}(t) + (2 nu / t) K_nu(t).
        for nu in 1u32..=5 {
            let lo = bessel_k(nu - 1, t).unwrap();
            let mid = bessel_k(nu, t).unwrap();
            let hi = bessel_k(nu + 1, t).unwrap();
            let rhs = lo + (2.0 * nu as f64 / t) * mid;
            g.check((hi - rhs).abs() <= 1e-10 * hi, || {
                format!("recurrence at nu = {nu}, t = {t:.4}: {hi:.12e} vs {rhs:.12e}")
            });
        }
        // Half-order lower bound sqrt(pi/(2t)) e^(-t), valid for nu >= 1
        // (it fails for nu = 0, which the kernel family never uses).
        let floor = (std::f64::consts::PI / (2.0 * t)).sqrt() * (-t).exp();
        for nu in 1u32..=6 {
            let k = bessel_k(nu, t).unwrap();
            g.check(k >= floor * (1.0 - 1e-12), || {
                format!("lower bound at nu = {nu}, t = {t:.4}: K = {k:.12e} < {floor:.12e}")
            });
        }
    }

    g.finish();
}
