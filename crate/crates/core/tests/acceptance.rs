//! Acceptance suite. Runs every criterion, prints one line each and exits
//! non-zero if any failed.

use std::f64::consts::PI;
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::time::Instant;

use rayon::prelude::*;
use spinwrithe::writhe::{helical_closure, writhe_gauss_in};
use spinwrithe::*;

// 1
const IDENTITY_SEEDS: u64 = 100;
const IDENTITY_TOL: f64 = 1e-12;
// 2
const CROSS_N: usize = 2048;
const CROSS_RADIUS: f64 = 10.0;
const CROSS_TOL: f64 = 5e-3;
const CROSS_REFINE_RATIO: f64 = 2.0;
// 3
const PLANAR_TOL: f64 = 1e-6;
const PLANAR_SIZES: [usize; 4] = [64, 512, 2048, 8192];
// 4
const DRIFT_N: usize = 512;
const DRIFT_DT_FACTOR: f64 = 0.25;
const DRIFT_T_END: f64 = 0.25;
const DRIFT_TOL: f64 = 1e-4;
const DRIFT_HALVING_RATIO: f64 = 8.0;
// 5
const JUMP_STEPS: usize = 400;
const JUMP_TOL: f64 = 0.1;
// 6
const BOUND_SEEDS: u64 = 10_000;
// 7
const HOMOTHETY_LAMBDAS: [f64; 3] = [0.5, 2.0, 10.0];
const HOMOTHETY_H_RTOL: f64 = 1e-10;
const HOMOTHETY_PWR_TOL: f64 = 1e-12;
// 8
const KERNEL_N: usize = 16384;
const KERNEL_THREADS: [usize; 4] = [1, 2, 4, 8];
const KERNEL_RATIO: (f64, f64) = (3.0, 5.0);

type Outcome = (bool, String);
type Criterion = (&'static str, fn() -> Outcome);

fn twist(half: f64, n: usize, p: TwistParams) -> SpinField {
    twist_profile(Grid::new(-half, half, n).unwrap(), p).unwrap()
}

fn random_grid() -> Grid {
    Grid::new(-20.0, 20.0, 512).unwrap()
}

fn identity_suite() -> Outcome {
    let mut worst_p: f64 = 0.0;
    let mut worst_f: f64 = 0.0;
    for seed in 0..IDENTITY_SEEDS {
        let f = random_field(random_grid(), seed, 8, 0.5).unwrap();
        let g = ground_state(f.grid);
        let a = writhe_angular(&f);
        worst_p = worst_p.max((a - momentum(&f) / (2.0 * PI)).abs());
        worst_f = worst_f.max((a - writhe_fuller(&f, &g).unwrap()).abs());
    }
    (
        worst_p <= IDENTITY_TOL && worst_f <= IDENTITY_TOL,
        format!("max |Wr_ang - P/2pi| = {worst_p:.2e}, max |Wr_ang - Wr_fuller| = {worst_f:.2e} (tol {IDENTITY_TOL:e})"),
    )
}

fn cross_method() -> Outcome {
    let fixtures = [
        (20.0, TwistParams::new(PI / 2.0, 1.0, 2.0 * PI, 1.0, 0.0)),
        (32.0, TwistParams::new(PI / 2.0, 2.0, 2.0 * PI, 1.0, 0.0)),
        (20.0, TwistParams::new(1.0, 1.0, PI, 1.0, 0.0)),
        (28.0, TwistParams::new(2.0, 1.5, -2.0 * PI, 2.0, 0.0)),
        (20.0, TwistParams::new(0.7, 1.0, 4.0 * PI, 1.0, 1.0)),
    ];
    let gap = |half: f64, p: TwistParams, n: usize, rf: f64| {
        let f = twist(half, n, p);
        let closed = close_at_infinity(&integrate_tangent(&f), rf).unwrap();
        (writhe_gauss(&closed).unwrap() - writhe_angular(&f)).abs()
    };
    let mut ok = true;
    let mut worst: f64 = 0.0;
    let mut min_ratio = f64::INFINITY;
    for (half, p) in fixtures {
        let g1 = gap(half, p, CROSS_N, CROSS_RADIUS);
        let g2 = gap(half, p, 2 * CROSS_N, 2.0 * CROSS_RADIUS);
        worst = worst.max(g1);
        min_ratio = min_ratio.min(g1 / g2);
        ok &= g1 <= CROSS_TOL && g1 >= CROSS_REFINE_RATIO * g2;
    }
    (
        ok,
        format!("max gap {worst:.2e} (tol {CROSS_TOL:e}), min refinement ratio {min_ratio:.2} (need {CROSS_REFINE_RATIO})"),
    )
}

fn planar_loop(n: usize, r: impl Fn(f64) -> (f64, f64)) -> SpaceCurve {
    let mut s = Vec::with_capacity(n + 1);
    let mut points = Vec::with_capacity(n + 1);
    for k in 0..=n {
        let t = 2.0 * PI * (k % n) as f64 / n as f64;
        let (x, y) = r(t);
        s.push(t);
        points.push(Vec3::new(x, y, 0.0));
    }
    let tangents = (0..=n)
        .map(|k| (points[(k + 1) % n] - points[k % n]).normalize())
        .collect();
    SpaceCurve {
        s,
        points,
        tangents,
        closed: true,
        h: None,
    }
}

fn planar_zero() -> Outcome {
    let mut worst: f64 = 0.0;
    for &n in &PLANAR_SIZES {
        let loops = [
            planar_loop(n, |t| (t.cos(), t.sin())),
            planar_loop(n, |t| (3.0 * t.cos(), 0.5 * t.sin())),
            planar_loop(n, |t| {
                let r = 1.0 + 0.3 * (5.0 * t).cos();
                (r * t.cos(), r * t.sin())
            }),
        ];
        for c in &loops {
            worst = worst.max(writhe_gauss(c).unwrap().abs());
        }
    }
    // closure of an in-plane field is planar as a whole
    let flat = twist(20.0, 1024, TwistParams::new(2.0, 1.0, 0.0, 1.0, 0.0));
    let closed = close_at_infinity(&integrate_tangent(&flat), 10.0).unwrap();
    worst = worst.max(writhe_gauss(&closed).unwrap().abs());
    (
        worst <= PLANAR_TOL,
        format!("max |Wr| = {worst:.2e} over n <= 8192 (tol {PLANAR_TOL:e})"),
    )
}

fn conservation() -> Outcome {
    let f = twist(
        30.0,
        DRIFT_N,
        TwistParams::new(PI / 2.0, 2.0, 2.0 * PI, 2.0, 0.0),
    );
    let dt = DRIFT_DT_FACTOR * f.h() * f.h();
    let run = |dt: f64| {
        drift_report(&evolve(&f, DRIFT_T_END, dt, 1, Scheme::Rk4Renorm).unwrap()).unwrap()
    };
    let d1 = run(dt);
    let d2 = run(0.5 * dt);
    let drifts = [
        d1.rel_drift_h,
        d1.rel_drift_p,
        d1.rel_drift_m,
        d1.rel_drift_wr,
    ];
    let halved = [
        d2.rel_drift_h,
        d2.rel_drift_p,
        d2.rel_drift_m,
        d2.rel_drift_wr,
    ];
    let ratios: Vec<f64> = drifts.iter().zip(&halved).map(|(a, b)| a / b).collect();
    let bounded = drifts.iter().all(|d| *d <= DRIFT_TOL);
    let converges = ratios.iter().all(|r| *r >= DRIFT_HALVING_RATIO);
    (
        bounded && converges,
        format!(
            "drift H,P,M,Wr = {:.2e},{:.2e},{:.2e},{:.2e} (tol {DRIFT_TOL:e}); dt/2 ratios {:.2},{:.2},{:.2},{:.2} (need {DRIFT_HALVING_RATIO})",
            drifts[0], drifts[1], drifts[2], drifts[3], ratios[0], ratios[1], ratios[2], ratios[3]
        ),
    )
}

fn jump_quantization() -> Outcome {
    let grid = Grid::new(-20.0, 20.0, 512).unwrap();
    let a = ground_state(grid);
    let b = twist_profile(grid, TwistParams::new(0.9 * PI, 1.0, -2.0 * PI, 1.0, 0.0)).unwrap();
    let events = |a: &SpinField, b: &SpinField| {
        let path = homotopy_path(a, b, JUMP_STEPS).unwrap();
        let wr = writhe_along_path(&path, PathMethod::GaussClosed).unwrap();
        detect_jumps(&wr, &path.lambdas, JUMP_TOL).unwrap()
    };
    let fwd = events(&a, &b);
    let mir = events(&a.mirrored(), &b.mirrored());
    let ok = fwd.len() == 1
        && (fwd[0].delta_wr - 2.0).abs() <= JUMP_TOL
        && mir.len() == 1
        && (mir[0].delta_wr + 2.0).abs() <= JUMP_TOL;
    let show = |e: &[JumpEvent]| {
        e.iter()
            .map(|j| format!("{:+.4}@{:.4}", j.delta_wr, j.lambda_lo))
            .collect::<Vec<_>>()
            .join(" ")
    };
    (
        ok,
        format!(
            "events [{}], mirrored [{}] (tol {JUMP_TOL})",
            show(&fwd),
            show(&mir)
        ),
    )
}

fn energy_bound() -> Outcome {
    let (paper, derived, cs, min_ratio) = (0..BOUND_SEEDS)
        .into_par_iter()
        .map(|seed| {
            let f = random_field(random_grid(), seed, 8, 0.5).unwrap();
            let r = energy_bound_check(&f, 1.0).unwrap();
            (
                !r.paper_ok as u64,
                !r.derived_ok as u64,
                !r.cs_ok as u64,
                r.energy / r.derived_bound,
            )
        })
        .reduce(
            || (0, 0, 0, f64::INFINITY),
            |a, b| (a.0 + b.0, a.1 + b.1, a.2 + b.2, a.3.min(b.3)),
        );
    (
        paper == 0 && derived == 0 && cs == 0,
        format!(
            "violations J-bound {paper}, 2J-bound {derived}, Cauchy-Schwarz {cs} of {BOUND_SEEDS}; min H/(2J P^2/|M|) = {min_ratio:.4}"
        ),
    )
}

fn homothety() -> Outcome {
    let mut fields = vec![twist(
        20.0,
        1024,
        TwistParams::new(PI / 2.0, 1.0, 2.0 * PI, 1.0, 0.0),
    )];
    fields.extend((0..5).map(|s| random_field(random_grid(), s, 8, 0.5).unwrap()));
    let (mut worst_h, mut worst_p, mut worst_w): (f64, f64, f64) = (0.0, 0.0, 0.0);
    for f in &fields {
        let (h0, p0, w0) = (energy(f, 1.0).unwrap(), momentum(f), writhe_angular(f));
        for &lam in &HOMOTHETY_LAMBDAS {
            let g = rescale(f, lam).unwrap();
            worst_h = worst_h.max((energy(&g, 1.0).unwrap() * lam - h0).abs() / h0);
            worst_p = worst_p.max((momentum(&g) - p0).abs());
            worst_w = worst_w.max((writhe_angular(&g) - w0).abs());
        }
    }
    (
        worst_h <= HOMOTHETY_H_RTOL && worst_p <= HOMOTHETY_PWR_TOL && worst_w <= HOMOTHETY_PWR_TOL,
        format!("max rel |lambda H' - H| = {worst_h:.2e}, max |dP| = {worst_p:.2e}, max |dWr| = {worst_w:.2e}"),
    )
}

fn timed(pool: &rayon::ThreadPool, c: &SpaceCurve) -> (f64, f64) {
    let t0 = Instant::now();
    let w = writhe_gauss_in(pool, c).unwrap();
    (w, t0.elapsed().as_secs_f64())
}

fn kernel() -> Outcome {
    let big = helical_closure(KERNEL_N);
    let half = helical_closure(KERNEL_N / 2);
    let pools: Vec<_> = KERNEL_THREADS
        .iter()
        .map(|&t| {
            rayon::ThreadPoolBuilder::new()
                .num_threads(t)
                .build()
                .unwrap()
        })
        .collect();
    let runs: Vec<(f64, f64)> = pools.iter().map(|p| timed(p, &big)).collect();
    let identical = runs.iter().all(|r| r.0.to_bits() == runs[0].0.to_bits());
    let t_half = (0..2)
        .map(|_| timed(&pools[0], &half).1)
        .fold(f64::INFINITY, f64::min);
    let t_full = runs[0].1.min(timed(&pools[0], &big).1);
    let ratio = t_full / t_half;
    let ok = identical && ratio >= KERNEL_RATIO.0 && ratio <= KERNEL_RATIO.1;
    (
        ok,
        format!(
            "Wr = {:.12} identical across threads {:?}: {identical}; t(n)/t(n/2) = {ratio:.2} ({:.2}s / {:.2}s)",
            runs[0].0, KERNEL_THREADS, t_full, t_half
        ),
    )
}

fn main() {
    let criteria: [Criterion; 8] = [
        ("identity suite", identity_suite),
        ("cross-method writhe", cross_method),
        ("planar zero", planar_zero),
        ("conservation", conservation),
        ("jump quantization", jump_quantization),
        ("energy bound", energy_bound),
        ("homothety law", homothety),
        ("kernel determinism and scaling", kernel),
    ];
    let mut failed = 0;
    for (i, (name, run)) in criteria.iter().enumerate() {
        let t0 = Instant::now();
        let (ok, detail) = match catch_unwind(AssertUnwindSafe(run)) {
            Ok(o) => o,
            Err(e) => {
                let msg = e
                    .downcast_ref::<String>()
                    .cloned()
                    .or_else(|| e.downcast_ref::<&str>().map(|s| s.to_string()))
                    .unwrap_or_default();
                (false, format!("panicked: {msg}"))
            }
        };
        if !ok {
            failed += 1;
        }
        println!(
            "criterion {} [{}] {name}: {detail} ({:.1}s)",
            i + 1,
            if ok { "PASS" } else { "FAIL" },
            t0.elapsed().as_secs_f64()
        );
    }
    println!(
        "acceptance: {} passed, {failed} failed",
        criteria.len() - failed
    );
    if failed > 0 {
        std::process::exit(1);
    }
}
