//! The twelve reproduction criteria, shared by `check-all` and the
//! `acceptance` test target.

use std::time::Instant;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::distributions::{euler_character, regularized_pair, RegularizedDelta};
use crate::error::Result;
use crate::hamiltonian::{
    self, krein_check, krein_model,
    propagate::{l2_distance, normalize},
    HamiltonianConfig, Method,
};
use crate::interval_topology::{Interval, IntervalSet, Orientation};
use crate::piecewise::{test_function, PiecewiseFn, Smooth};
use crate::stieltjes::{jump_measure, norms, pair_against_test_derivative, Measure, MeasureKind};
use crate::symplectic::{check_closed_dh2, flow, HamiltonianPair, PhasePoint, Rect, Which};

const L: Orientation = Orientation::Left;
const R: Orientation = Orientation::Right;

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Outcome {
    pub id: usize,
    pub name: &'static str,
    pub passed: bool,
    pub measured: String,
    pub expected: String,
    pub tolerance: String,
    #[serde(skip)]
    pub seconds: f64,
}

impl Outcome {
    pub fn line(&self) -> String {
        format!(
            "[{}] {:>2} {:<28} measured {} | expected {} | tol {} | {:.2}s",
            if self.passed { "PASS" } else { "FAIL" },
            self.id,
            self.name,
            self.measured,
            self.expected,
            self.tolerance,
            self.seconds
        )
    }
}

struct Check {
    passed: bool,
    measured: String,
}

pub const NAMES: [&str; 12] = [
    "sign pairing table",
    "single-Heaviside sign",
    "Euler characters",
    "measure asymmetry",
    "norm chain",
    "orientation orthogonality",
    "operator norm ratio",
    "free spectrum",
    "Krein model",
    "Trotter vs exponential",
    "symplectic suite",
    "regularized delta",
];

pub fn run(id: usize) -> Outcome {
    let start = Instant::now();
    let check = match id {
        1 => pairing_table(),
        2 => single_heaviside(),
        3 => euler(),
        4 => asymmetry(),
        5 => norm_chain(),
        6 => orthogonality(),
        7 => norm_ratio(),
        8 => free_spectrum(),
        9 => krein(),
        10 => trotter(),
        11 => symplectic(),
        12 => regularized(),
        _ => panic!("no criterion {id}"),
    };
    let seconds = start.elapsed().as_secs_f64();
    let budget = match id {
        1 => Some(1.0),
        5 => Some(10.0),
        10 => Some(30.0),
        _ => None,
    };
    let (passed, measured) = match check {
        Ok(c) => (c.passed && budget.is_none_or(|b| seconds < b), c.measured),
        Err(e) => (false, format!("error: {e}")),
    };
    let (expected, tolerance) = check_meta(id);
    let (expected, tolerance) = (expected.to_string(), tolerance.to_string());
    Outcome { id, name: NAMES[id - 1], passed, measured, expected, tolerance, seconds }
}

fn check_meta(id: usize) -> (&'static str, &'static str) {
    match id {
        1 => ("-2, 0, 0, -2", "1e-8, < 1 s"),
        2 => ("-1", "1e-8"),
        3 => ("0, 1", "exact"),
        4 => ("0, 1", "exact"),
        5 => ("0 violations", "< 10 s"),
        6 => ("0 wrong-side jumps; cross blocks 0", "exact; 1e-10"),
        7 => ("1, 1, 1", "1e-6"),
        8 => ("0 1 1 4 4 9 9; error ratio 4", "2e-3; 25%"),
        9 => ("residual 0; n/2 +- 1 each", "1e-12; 1"),
        10 => ("error ratio 2", "20%, < 30 s"),
        11 => ("drift < 1e-8; ratios 16 and 4", "25%"),
        12 => ("1; error ratio 2", "5e-3; 20%"),
        _ => ("", ""),
    }
}

/// Runs every criterion, in parallel, returned in order.
pub fn run_all() -> Vec<Outcome> {
    (1..=12).into_par_iter().map(run).collect()
}

fn close(x: f64, want: f64, tol: f64) -> bool {
    (x - want).abs() < tol
}

fn pairing_table() -> Result<Check> {
    let phi = Smooth::gaussian();
    let (sl, sr) = (PiecewiseFn::sgn(L)?, PiecewiseFn::sgn(R)?);
    let got = [
        pair_against_test_derivative(&sl, &phi, L)?,
        pair_against_test_derivative(&sr, &phi, L)?,
        pair_against_test_derivative(&sl, &phi, R)?,
        pair_against_test_derivative(&sr, &phi, R)?,
    ];
    let want = [-2.0, 0.0, 0.0, -2.0];
    Ok(Check {
        passed: got.iter().zip(want).all(|(g, w)| close(*g, w, 1e-8)),
        measured: format!("{:.10}, {:.10}, {:.10}, {:.10}", got[0], got[1], got[2], got[3]),
    })
}

fn single_heaviside() -> Result<Check> {
    let h = PiecewiseFn::heaviside(L)?;
    let v = pair_against_test_derivative(&h.sub(&h.reflect()), &Smooth::gaussian(), L)?;
    Ok(Check { passed: close(v, -1.0, 1e-8), measured: format!("{v:.10}") })
}

fn euler() -> Result<Check> {
    let h = PiecewiseFn::heaviside(L)?;
    let semi = euler_character(&h.sub(&h.reflect()), L);
    let two = euler_character(&PiecewiseFn::sgn_twosided(), Orientation::Standard);
    Ok(Check { passed: semi == 0 && two == 1, measured: format!("{semi}, {two}") })
}

fn asymmetry() -> Result<Check> {
    let h = PiecewiseFn::heaviside(L)?;
    let left = Measure::from_distribution(MeasureKind::StieltjesLeft, h.clone())?.measure_of(&"(0,1]".parse()?)?;
    let closed = Measure::from_distribution(MeasureKind::Lebesgue, h)?.measure_of(&"[0,1]".parse()?)?;
    Ok(Check { passed: left == 0.0 && closed == 1.0, measured: format!("{left}, {closed}") })
}

/// Piecewise polynomial on `[0, 1]` with up to four pieces of degree <= 3;
/// breakpoint values are a one-sided limit or an arbitrary number.
pub fn random_piecewise_poly(rng: &mut impl Rng) -> PiecewiseFn {
    let k = rng.random_range(0..4usize);
    let mut bps: Vec<f64> = (0..k).map(|_| rng.random_range(0.02..0.98)).collect();
    bps.sort_by(f64::total_cmp);
    bps.dedup_by(|a, b| (*a - *b).abs() < 1e-3);
    let pieces: Vec<Smooth> =
        (0..=bps.len()).map(|_| Smooth::Poly((0..=rng.random_range(0..4usize)).map(|_| rng.random_range(-2.0..2.0)).collect())).collect();
    let values = bps
        .iter()
        .enumerate()
        .map(|(i, &b)| match rng.random_range(0..4) {
            0 => Some(pieces[i].eval(b)),
            1 => Some(pieces[i + 1].eval(b)),
            2 => Some(rng.random_range(-3.0..3.0)),
            _ => None,
        })
        .collect();
    PiecewiseFn::new(bps, pieces, values, Orientation::Standard).expect("polynomial pieces are valid")
}

/// Rounding slack for comparisons between norms computed by different
/// routes (quadrature against exact walks).
pub fn le_with_rounding(x: f64, y: f64) -> bool {
    x <= y * (1.0 + 1e-12) + 1e-14
}

fn norm_chain() -> Result<Check> {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let unit: IntervalSet = Interval::closed(0.0, 1.0).into();
    let mut violations = 0;
    for _ in 0..1000 {
        let f = random_piecewise_poly(&mut rng);
        let sup = norms::sup_norm(&f, &unit)?;
        let bv = norms::bv_norm(&f, &unit)?;
        for p in [1.0, 2.0, 4.0] {
            if !le_with_rounding(norms::lp_norm(&f, &unit, p)?, sup) {
                violations += 1;
            }
        }
        if !le_with_rounding(sup, bv) {
            violations += 1;
        }
    }
    Ok(Check { passed: violations == 0, measured: format!("{violations} violations") })
}

/// Left-semicontinuous step function with 1..=4 jumps in `(-3, 3)`.
pub fn random_left_step(rng: &mut impl Rng) -> PiecewiseFn {
    let k = rng.random_range(1..=4usize);
    let mut bps: Vec<f64> = (0..k).map(|_| (rng.random_range(-3.0..3.0f64) * 64.0).round() / 64.0).collect();
    bps.sort_by(f64::total_cmp);
    bps.dedup();
    let levels: Vec<f64> = (0..=bps.len()).map(|_| rng.random_range(-4i32..=4) as f64 * 0.5).collect();
    let pieces = levels.iter().map(|&c| Smooth::constant(c)).collect();
    let values = levels[..bps.len()].iter().map(|&c| Some(c)).collect();
    PiecewiseFn::new(bps, pieces, values, L).expect("step functions are valid")
}

fn orthogonality() -> Result<Check> {
    let mut rng = ChaCha8Rng::seed_from_u64(6);
    let cfg = HamiltonianConfig { alpha: 0.5, ..Default::default() };
    let line: IntervalSet = Interval::open(-10.0, 10.0).into();
    let mut wrong = 0.0f64;
    let mut cross = 0.0f64;
    for _ in 0..500 {
        let f = random_left_step(&mut rng);
        let g = f.extend(R);
        wrong = wrong.max(jump_measure(&f, MeasureKind::StieltjesRight, &line).abs());
        wrong = wrong.max(jump_measure(&g, MeasureKind::StieltjesLeft, &line).abs());
        let d = hamiltonian::decomposition_check(&f, &g, &cfg)?;
        cross = cross.max(d.lr.abs()).max(d.rl.abs());
    }
    Ok(Check { passed: wrong == 0.0 && cross < 1e-10, measured: format!("max wrong-side {wrong:e}, max cross {cross:e}") })
}

fn norm_ratio() -> Result<Check> {
    let h = hamiltonian::build(&HamiltonianConfig { alpha: 1.0, ..Default::default() })?;
    let mut got = Vec::new();
    for name in ["gaussian", "x-gaussian", "hermite-gaussian-2"] {
        got.push(hamiltonian::operator_norm_ratio(&h, &test_function(name)?)?.ratio);
    }
    Ok(Check {
        passed: got.iter().all(|r| close(*r, 1.0, 1e-6)),
        measured: got.iter().map(|r| format!("{r:.12}")).collect::<Vec<_>>().join(", "),
    })
}

fn free_errors(n: usize) -> Result<Vec<f64>> {
    let h = hamiltonian::build(&HamiltonianConfig { grid_n: n, ..Default::default() })?;
    let s = h.spectrum()?;
    let v = s.real().expect("free operator is elliptic");
    Ok([0.0, 1.0, 1.0, 4.0, 4.0, 9.0, 9.0].iter().zip(v).map(|(w, g)| (g - w).abs()).collect())
}

fn free_spectrum() -> Result<Check> {
    let e256 = free_errors(256)?;
    let e128 = free_errors(128)?;
    let worst = e256.iter().cloned().fold(0.0, f64::max);
    let ratio = e128.iter().cloned().fold(0.0, f64::max) / worst;
    Ok(Check { passed: worst < 2e-3 && close(ratio, 4.0, 1.0), measured: format!("max error {worst:.3e} at n=256, ratio {ratio:.3}") })
}

fn krein() -> Result<Check> {
    let (h, k) = krein_model(64, std::f64::consts::TAU, L)?;
    let r = krein_check(&h, &k)?;
    let ok = |d: usize| (31..=33).contains(&d);
    Ok(Check {
        passed: r.j_symmetry_residual < 1e-12 && ok(r.pos_subspace_dim) && ok(r.neg_subspace_dim),
        measured: format!("residual {:e}, (+{}, -{})", r.j_symmetry_residual, r.pos_subspace_dim, r.neg_subspace_dim),
    })
}

fn trotter() -> Result<Check> {
    let h = hamiltonian::build(&HamiltonianConfig { alpha: 0.5, grid_n: 64, ..Default::default() })?;
    let sp = h.cfg.spacing();
    let raw: Vec<f64> = h.grid.iter().map(|x| (-(x - 0.3) * (x - 0.3)).exp()).collect();
    let psi = normalize(&raw, sp)?;
    let exact = hamiltonian::propagate(&h, &psi, 0.1, Method::Exponential)?;
    let err = |k| -> Result<f64> { Ok(l2_distance(&hamiltonian::propagate(&h, &psi, 0.1, Method::TrotterSlices(k))?, &exact, sp)) };
    let (e32, e64) = (err(32)?, err(64)?);
    let ratio = e32 / e64;
    Ok(Check { passed: close(ratio, 2.0, 0.4), measured: format!("e32 {e32:.3e}, e64 {e64:.3e}, ratio {ratio:.3}") })
}

fn symplectic() -> Result<Check> {
    let h = HamiltonianPair::new(Smooth::zero(), Smooth::Tanh { amp: 0.5, center: 0.0, scale: 1.0 });
    let x0 = PhasePoint::new(0.0, 1.0);
    let drift = |dt| -> Result<f64> { Ok(flow(&h, Which::H2, x0, 1.0, dt)?.drift()) };
    let d = drift(1e-3)?;
    // at dt = 1e-3 the drift is already at rounding level, so the order is
    // read off at coarser steps
    let order = drift(1e-2)? / drift(5e-3)?;
    let sq = Rect { q0: -1.0, q1: 1.0, p0: -1.0, p1: 1.0 };
    let grid = check_closed_dh2(&h, sq, 33)? / check_closed_dh2(&h, sq, 65)?;
    Ok(Check {
        passed: d < 1e-8 && close(order, 16.0, 4.0) && close(grid, 4.0, 1.0),
        measured: format!("drift {d:.2e}, dt ratio {order:.2}, grid ratio {grid:.3}"),
    })
}

fn regularized() -> Result<Check> {
    let g = Smooth::gaussian();
    let err = |eps| -> Result<f64> { Ok((regularized_pair(&RegularizedDelta::cauchy(eps)?, &g)? - 1.0).abs()) };
    let (e1, e2) = (err(1e-3)?, err(5e-4)?);
    let ratio = e1 / e2;
    Ok(Check { passed: e1 < 5e-3 && close(ratio, 2.0, 0.4), measured: format!("error {e1:.3e}, ratio {ratio:.3}") })
}
