//! Acceptance run: one line per criterion, each with its own tolerance.
//!
//! Every criterion runs even if an earlier one fails; the process exits with
//! status 1 if any failed.

use std::f64::consts::E;
use std::process::Command;
use std::time::{Duration, Instant};

use isodist::enlargement::{delta_closed_form, euler_reach, time_to_half};
use isodist::lattice::{scaled_max_distance, verify_extremal_pairs, Grid, DEFAULT_BUDGET};
use isodist::montecarlo::{average_distance_experiment, sodin_suite, transfer_check, xlog_derivative_check};
use isodist::profiles::IsoProfile;
use isodist::sections::{convergence_report, cube_sum_cdf, uniform_grid};
use isodist::specfun::{phi, phi_inv, phi_inv_asymptote, psi_p, psi_p_inv, psi_p_inv_asymptote};
use isodist::witness::{bound_report, cube_diagonal_witness};
use isodist::{BodyFamily, ConstantsConfig, PExponent};

/// `-2√(π/6) Φ^{-1}(0.1)` from a 30-digit evaluation.
const CUBE_LIMIT_TENTH: f64 = 0.739_904_141_347_56;

fn report(id: u32, pass: bool, detail: String) -> bool {
    println!("criterion {id:>2}: {} | {detail}", if pass { "PASS" } else { "FAIL" });
    pass
}

fn pe(p: f64) -> PExponent {
    PExponent::new(p).unwrap()
}

fn timed<T>(f: impl FnOnce() -> T) -> (T, Duration) {
    let start = Instant::now();
    let out = f();
    (out, start.elapsed())
}

fn criterion_01_ball_exactness() -> bool {
    let c = ConstantsConfig::default();
    let (worst, elapsed) = timed(|| {
        let mut worst: f64 = 0.0;
        let mut equal = true;
        for eps in [0.01, 0.05, 0.1, 0.25, 0.45] {
            let r = bound_report(BodyFamily::Ball, eps, None, &c).unwrap();
            let exact = -2.0 * phi_inv(eps).unwrap() / E.sqrt();
            worst = worst.max((r.upper - exact).abs());
            equal &= r.lower == r.upper;
        }
        (worst, equal)
    });
    let pass = worst.0 <= 1e-9 && worst.1 && elapsed < Duration::from_secs(1);
    report(1, pass, format!("max |upper - exact| = {:.3e}, lower == upper: {}, {elapsed:?}", worst.0, worst.1))
}

fn criterion_02_ode_vs_closed_form() -> bool {
    let c = ConstantsConfig::default();
    let families = [
        BodyFamily::Cube,
        BodyFamily::Ball,
        BodyFamily::Simplex,
        BodyFamily::Lp(PExponent::ONE),
        BodyFamily::Lp(pe(1.5)),
        BodyFamily::Lp(PExponent::TWO),
    ];
    let eps_grid = [1e-8, 1e-6, 1e-4, 0.01, 0.05, 0.1, 0.25, 0.45];
    let mut worst_rel: f64 = 0.0;
    let mut worst_euler: f64 = 0.0;
    for f in families {
        let profile = IsoProfile::for_family(f, &c);
        for eps in eps_grid {
            let closed = delta_closed_form(f, eps, &c).unwrap();
            let quad = time_to_half(&profile, eps).unwrap();
            worst_rel = worst_rel.max((quad / closed - 1.0).abs());
        }
        for eps in [0.01, 0.1, 0.25] {
            let delta = delta_closed_form(f, eps, &c).unwrap();
            let y = euler_reach(&profile, eps, delta, 1e-5).unwrap();
            worst_euler = worst_euler.max((y - 0.5).abs());
        }
    }
    let pass = worst_rel <= 1e-8 && worst_euler <= 1e-4;
    report(2, pass, format!("max relative gap {worst_rel:.3e}, max |Euler y(delta_M) - 1/2| {worst_euler:.3e}"))
}

fn criterion_03_section_convergence() -> bool {
    let grid = uniform_grid(0.0, 3.0, 0.01).unwrap();
    let (rows, elapsed) =
        timed(|| [1.0, 1.5, 2.0].map(|p| (p, convergence_report(pe(p), &[100, 200, 400], &grid).unwrap())));
    let mut pass = elapsed < Duration::from_secs(30);
    let mut detail = Vec::new();
    for (p, r) in &rows {
        let gaps: Vec<f64> = r.iter().map(|row| row.sup_v_gap).collect();
        pass &= gaps[2] <= 0.02 && gaps[0] > gaps[1] && gaps[1] > gaps[2];
        detail.push(format!("p={p}: {:.2e} > {:.2e} > {:.2e}", gaps[0], gaps[1], gaps[2]));
    }
    report(3, pass, format!("{}, {elapsed:?}", detail.join("; ")))
}

fn criterion_04_cube_witness_volume() -> bool {
    let n = 30;
    let a = -(std::f64::consts::PI / 6.0).sqrt() * phi_inv(0.12).unwrap();
    let nf = n as f64;
    let volume = cube_sum_cdf(n, nf / 2.0 - a * nf.sqrt());
    let w = cube_diagonal_witness(n, 0.1).unwrap();
    let rel = (w.distance / CUBE_LIMIT_TENTH - 1.0).abs();
    let pass = (volume - 0.12).abs() <= 0.02 && rel <= 0.1;
    report(
        4,
        pass,
        format!("slab volume {volume:.6} (target 0.12), witness {:.6} ({:.2}% off)", w.distance, 100.0 * rel),
    )
}

fn criterion_05_discrete_extremal_pairs() -> bool {
    let mut checked = 0;
    let mut disagree = Vec::new();
    for (k, n) in [(2, 2), (2, 3), (3, 2), (2, 4)] {
        let grid = Grid::new(k, n).unwrap();
        for r in 1..=grid.size() {
            for s in 1..=grid.size() {
                let v = verify_extremal_pairs(grid, r, s, DEFAULT_BUDGET).unwrap();
                checked += 1;
                if !v.agree {
                    disagree.push(format!("[{k}]^{n} r={r} s={s}"));
                }
            }
        }
    }
    report(5, disagree.is_empty(), format!("{checked} (grid, r, s) cases, disagreements: {disagree:?}"))
}

fn criterion_06_discrete_scaling() -> bool {
    let (r, elapsed) = timed(|| scaled_max_distance(30, 64, 0.1, DEFAULT_BUDGET).unwrap());
    let rel = (r.lattice_value / CUBE_LIMIT_TENTH - 1.0).abs();
    let pass = rel <= 0.1 && elapsed < Duration::from_secs(10);
    report(6, pass, format!("lattice value {:.6} ({:.2}% off), {elapsed:?}", r.lattice_value, 100.0 * rel))
}

fn criterion_07_asymptotics() -> bool {
    let eps_list: Vec<f64> = (4..=12).map(|k| 10f64.powi(-k)).collect();
    type Ratio = Box<dyn Fn(f64) -> f64>;
    let cases: [(&str, Ratio); 3] = [
        ("phi_inv", Box::new(|e| phi_inv(e).unwrap() / phi_inv_asymptote(e).unwrap())),
        (
            "psi_1_inv",
            Box::new(|e| psi_p_inv(e, PExponent::ONE).unwrap() / psi_p_inv_asymptote(e, PExponent::ONE).unwrap()),
        ),
        (
            "psi_2_inv",
            Box::new(|e| psi_p_inv(e, PExponent::TWO).unwrap() / psi_p_inv_asymptote(e, PExponent::TWO).unwrap()),
        ),
    ];
    let mut pass = true;
    let mut detail = Vec::new();
    for (name, ratio) in &cases {
        let seq: Vec<f64> = eps_list.iter().map(|&e| ratio(e)).collect();
        let at_1e10 = ratio(1e-10);
        let monotone = seq.windows(2).all(|w| w[1] < w[0]) || seq.windows(2).all(|w| w[1] > w[0]);
        let ok = (at_1e10 - 1.0).abs() <= 0.05 && monotone;
        pass &= ok;
        detail.push(format!("{name}: ratio(1e-10) = {at_1e10:.5}, monotone {monotone}"));
    }
    report(7, pass, detail.join("; "))
}

fn criterion_08_xlog_derivative() -> bool {
    let lines = xlog_derivative_check(10_000, 7).unwrap();
    let violations: u64 = lines.iter().map(|l| l.violations).sum();
    let checked: u64 = lines.iter().map(|l| l.checked).sum();
    report(8, violations == 0 && checked == 20_000, format!("{checked} checks, {violations} violations"))
}

fn criterion_09_sodin_suite() -> bool {
    let lines = sodin_suite(20, 100_000, 7).unwrap();
    let failed: Vec<&str> = lines.iter().filter(|l| !l.passed()).map(|l| l.name.as_str()).collect();
    let checked: u64 = lines.iter().map(|l| l.checked).sum();
    report(9, failed.is_empty(), format!("{} checks over {checked} points, failing: {failed:?}", lines.len()))
}

fn criterion_10_transfer_map() -> bool {
    let r = transfer_check(20, 10_000, 7).unwrap();
    let pass = r.ks_pass && r.lipschitz_max <= 1.0 + 1e-6;
    report(
        10,
        pass,
        format!("KS {:.4} vs critical {:.4}, max Lipschitz quotient {:.6}", r.ks_max, r.ks_critical, r.lipschitz_max),
    )
}

fn criterion_11_average_distance() -> bool {
    let run = || average_distance_experiment(50, 100_000, 7).unwrap();
    let pool = |n| rayon::ThreadPoolBuilder::new().num_threads(n).build().unwrap();
    let one = pool(1).install(run);
    let four = pool(4).install(run);
    let bits_equal = one.mean_distance.estimate.to_bits() == four.mean_distance.estimate.to_bits()
        && one.mean_distance.half_width_95.to_bits() == four.mean_distance.half_width_95.to_bits();

    let cli = |threads: &str| {
        Command::new(env!("CARGO_BIN_EXE_isodist"))
            .args(["check", "average-distance", "--n", "50", "--samples", "100000", "--seed", "7"])
            .env("ISODIST_THREADS", threads)
            .output()
            .unwrap()
    };
    let (a, b) = (cli("1"), cli("4"));
    let cli_equal = a.status.success() && a.stdout == b.stdout;

    let bound = (50.0 / (2.0 * std::f64::consts::PI * E)).sqrt();
    let mean = one.mean_distance.estimate;
    let pass = mean >= bound && bits_equal && cli_equal;
    report(
        11,
        pass,
        format!("mean {mean:.6} >= {bound:.6}, bitwise equal across 1/4 threads: {bits_equal}, CLI output equal: {cli_equal}"),
    )
}

fn criterion_12_cross_identities() -> bool {
    // Quadrature of the p = 2 density against the erfc route.
    let psi_gap = (-400..=400)
        .map(|i| i as f64 / 100.0)
        .map(|x| (psi_p(x, PExponent::TWO).unwrap() - phi(E.sqrt() * x)).abs())
        .fold(0.0, f64::max);

    let c = ConstantsConfig { c_lambda: 1.7, ..ConstantsConfig::default() };
    let matched = c.matched_l1();
    let mut l1_gap: f64 = 0.0;
    let mut flags_match = true;
    let mut l2_equal = true;
    for eps in [1e-6, 0.01, 0.1, 0.25, 0.45] {
        let s = bound_report(BodyFamily::Simplex, eps, None, &matched).unwrap();
        let l = bound_report(BodyFamily::Lp(PExponent::ONE), eps, None, &matched).unwrap();
        l1_gap = l1_gap.max((s.upper - l.upper).abs()).max((s.upper_tight - l.upper_tight).abs());
        flags_match &= s.parametric && l.parametric;

        let ball = bound_report(BodyFamily::Ball, eps, None, &c).unwrap();
        let lp2 = bound_report(BodyFamily::Lp(PExponent::TWO), eps, None, &c).unwrap();
        l2_equal &= ball == lp2 && !lp2.parametric && lp2.exact_limit.is_some();
    }
    let pass = psi_gap <= 1e-10 && l1_gap <= 1e-12 && flags_match && l2_equal;
    report(
        12,
        pass,
        format!("sup |Psi_2 - Phi(sqrt(e) x)| = {psi_gap:.2e}, lp(1) vs simplex gap {l1_gap:.2e}, lp(2) report == ball report: {l2_equal}"),
    )
}

fn main() {
    let criteria: [fn() -> bool; 12] = [
        criterion_01_ball_exactness,
        criterion_02_ode_vs_closed_form,
        criterion_03_section_convergence,
        criterion_04_cube_witness_volume,
        criterion_05_discrete_extremal_pairs,
        criterion_06_discrete_scaling,
        criterion_07_asymptotics,
        criterion_08_xlog_derivative,
        criterion_09_sodin_suite,
        criterion_10_transfer_map,
        criterion_11_average_distance,
        criterion_12_cross_identities,
    ];
    let failed = criteria.iter().filter(|c| !c()).count();
    println!("acceptance: {} passed, {failed} failed", criteria.len() - failed);
    if failed > 0 {
        std::process::exit(1);
    }
}
