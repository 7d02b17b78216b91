//! Acceptance suite. Prints one PASS/FAIL line per criterion and exits
//! non-zero if any criterion fails.

use std::process::ExitCode;
use std::time::{Duration, Instant};

use rayon::prelude::*;

use allee_zone_core::{
    classify_fate, critical_lengths, dlambda_dalpha_closed, dlambda_dalpha_fd, extinction_sufficient,
    oracle_eigenvalue, optimal_alpha, principal_eigenvalue, simulate, theta_f, verify_transcendental,
    AlphaStar, BoundarySpec, CaseTag, FateVerdict, GrowthPair, SensitivityError, SimConfig, SpectralResult, Verdict,
    ZoneLayout, EIGEN_TOL, FD_STEP_FRACTION,
};

const L: f64 = 10.0;

struct Outcome {
    pass: bool,
    detail: String,
}

impl Outcome {
    fn new(pass: bool, detail: impl Into<String>) -> Self {
        Self { pass, detail: detail.into() }
    }
}

fn keywords() -> [(&'static str, BoundarySpec); 4] {
    [("NN", BoundarySpec::NN), ("DD", BoundarySpec::DD), ("ND", BoundarySpec::ND), ("DN", BoundarySpec::DN)]
}

fn growths() -> Vec<GrowthPair> {
    [(0.1, 0.05), (0.2, 0.1), (0.5, 0.3)]
        .iter()
        .map(|&(r, a)| GrowthPair::cubic_logistic(r, a).unwrap())
        .collect()
}

fn fig_growth() -> GrowthPair {
    GrowthPair::cubic_logistic(0.2, 0.1).unwrap()
}

const LAYOUTS: [(f64, f64); 4] = [(0.0, 2.0), (3.5, 3.0), (1.0, 6.5), (7.0, 3.0)];

struct GridCase {
    bc_name: &'static str,
    bc: BoundarySpec,
    growth: GrowthPair,
    layout: ZoneLayout,
}

fn grid48() -> Vec<GridCase> {
    let mut out = Vec::new();
    for (bc_name, bc) in keywords() {
        for &(alpha, l) in &LAYOUTS {
            for growth in growths() {
                out.push(GridCase { bc_name, bc, growth, layout: ZoneLayout::new(L, alpha, l).unwrap() });
            }
        }
    }
    out
}

fn lambda1(bc: &BoundarySpec, g: &GrowthPair, alpha: f64, l: f64) -> f64 {
    principal_eigenvalue(&ZoneLayout::new(L, alpha, l).unwrap(), bc, g, EIGEN_TOL).unwrap().lambda1
}

fn oracle_agreement() -> Outcome {
    let start = Instant::now();
    let diffs: Vec<Result<f64, String>> = grid48()
        .par_iter()
        .map(|c| {
            let exact = principal_eigenvalue(&c.layout, &c.bc, &c.growth, EIGEN_TOL).map_err(|e| e.to_string())?;
            let fd = oracle_eigenvalue(&c.layout, &c.bc, &c.growth, 1e-13).map_err(|e| e.to_string())?;
            Ok((exact.lambda1 - fd.value).abs())
        })
        .collect();
    let elapsed = start.elapsed();
    let errors = diffs.iter().filter(|d| d.is_err()).count();
    let worst = diffs.iter().filter_map(|d| d.as_ref().ok()).fold(0.0f64, |m, &d| m.max(d));
    let pass = errors == 0 && worst <= 1e-6 && elapsed <= Duration::from_secs(60);
    Outcome::new(
        pass,
        format!("{} cases, max |diff| {worst:.2e}, {errors} solver errors, {:.1} s", diffs.len(), elapsed.as_secs_f64()),
    )
}

fn equation_residuals() -> Outcome {
    let robin = [BoundarySpec::new(1.0, 0.5, 2.0, 1.0).unwrap(), BoundarySpec::new(0.3, 1.0, 1.0, 0.0).unwrap()];
    let mut cases = grid48();
    for bc in robin {
        for &(alpha, l) in &LAYOUTS {
            for growth in growths() {
                cases.push(GridCase { bc_name: "R", bc, growth, layout: ZoneLayout::new(L, alpha, l).unwrap() });
            }
        }
    }
    let results: Vec<Result<f64, String>> = cases
        .par_iter()
        .map(|c| {
            let r = principal_eigenvalue(&c.layout, &c.bc, &c.growth, EIGEN_TOL).map_err(|e| e.to_string())?;
            let rep = verify_transcendental(&r, &c.layout, &c.bc, &c.growth).map_err(|e| format!("{}: {e}", c.bc_name))?;
            Ok(rep.max_residual())
        })
        .collect();
    let failures: Vec<&String> = results.iter().filter_map(|r| r.as_ref().err()).collect();
    let worst = results.iter().filter_map(|r| r.as_ref().ok()).fold(0.0f64, |m, &d| m.max(d));
    let mut detail = format!("{} cases, max residual {worst:.2e}", results.len());
    if let Some(f) = failures.first() {
        detail += &format!(", {} failures (first: {f})", failures.len());
    }
    Outcome::new(failures.is_empty() && worst <= 1e-6, detail)
}

fn bracket_invariants() -> Outcome {
    let results: Vec<Result<SpectralResult, String>> = grid48()
        .par_iter()
        .map(|c| principal_eigenvalue(&c.layout, &c.bc, &c.growth, EIGEN_TOL).map_err(|e| e.to_string()))
        .collect();
    let mut margin = f64::INFINITY;
    let mut errors = 0;
    for r in &results {
        match r {
            Ok(r) => {
                margin = margin
                    .min(r.lambda1 - r.bracket.lo)
                    .min(r.bracket.hi - r.lambda1)
                    .min(r.lambda1 + r.fp0);
            }
            Err(_) => errors += 1,
        }
    }
    Outcome::new(
        errors == 0 && margin >= 1e-10,
        format!("{} cases, smallest margin {margin:.3e}, {errors} solver errors", results.len()),
    )
}

struct DerivCase {
    bc: BoundarySpec,
    growth: GrowthPair,
    layout: ZoneLayout,
}

fn derivative_cases(bcs: &[BoundarySpec], alphas_frac: &[f64], ls: &[f64]) -> Vec<DerivCase> {
    let mut out = Vec::new();
    for bc in bcs {
        for growth in growths() {
            for &l in ls {
                for &f in alphas_frac {
                    let layout = ZoneLayout::new(L, f * (L - l), l).unwrap();
                    out.push(DerivCase { bc: *bc, growth: growth.clone(), layout });
                }
            }
        }
    }
    out
}

/// Layouts with `lambda_1 = -g'(0)` found by bisection in `l` at fixed `alpha`.
fn h2_cases() -> Vec<DerivCase> {
    let mut out = Vec::new();
    for bc in [BoundarySpec::DD, BoundarySpec::ND, BoundarySpec::DN] {
        for growth in growths() {
            let target = -growth.gp0();
            for alpha in [0.0, 0.7, 1.5, 2.5, 3.3] {
                let f = |l: f64| lambda1(&bc, &growth, alpha, l) - target;
                let (mut lo, mut hi) = (1e-3, L - alpha);
                if !(f(lo) > 0.0 && f(hi) < 0.0) {
                    continue;
                }
                for _ in 0..200 {
                    let mid = 0.5 * (lo + hi);
                    if mid <= lo || mid >= hi {
                        break;
                    }
                    if f(mid) > 0.0 {
                        lo = mid;
                    } else {
                        hi = mid;
                    }
                }
                let l = if f(lo).abs() < f(hi).abs() { lo } else { hi };
                out.push(DerivCase { bc, growth: growth.clone(), layout: ZoneLayout::new(L, alpha, l).unwrap() });
            }
        }
    }
    out
}

struct DerivCheck {
    tag: CaseTag,
    ok: bool,
    rel: f64,
    formula: &'static str,
}

fn check_derivative(c: &DerivCase) -> Option<DerivCheck> {
    let r = principal_eigenvalue(&c.layout, &c.bc, &c.growth, EIGEN_TOL).ok()?;
    let fd = dlambda_dalpha_fd(&c.layout, &c.bc, &c.growth, FD_STEP_FRACTION * L).ok()?;
    let closed = match dlambda_dalpha_closed(&r, &c.layout, &c.bc, &c.growth) {
        Ok(t) => t,
        Err(SensitivityError::NoFormula { .. }) => return None,
        Err(_) => return Some(DerivCheck { tag: r.case_tag, ok: false, rel: f64::INFINITY, formula: "singular" }),
    };
    let err = (closed.dlambda_dalpha - fd).abs();
    let ok = err <= (1e-4 * fd.abs()).max(1e-8);
    Some(DerivCheck { tag: r.case_tag, ok, rel: err / fd.abs().max(1e-8), formula: closed.formula.name() })
}

fn derivative_formulas() -> Outcome {
    let robin = [BoundarySpec::new(1.0, 0.5, 2.0, 1.0).unwrap(), BoundarySpec::new(0.3, 1.0, 1.0, 0.0).unwrap()];
    let all_bcs = [BoundarySpec::NN, BoundarySpec::DD, BoundarySpec::ND, BoundarySpec::DN, robin[0], robin[1]];
    let mut cases = derivative_cases(&all_bcs, &[0.0, 0.2, 0.45, 0.8, 1.0], &[4.0, 6.0]);
    cases.extend(derivative_cases(
        &[BoundarySpec::DD, BoundarySpec::ND, BoundarySpec::DN],
        &[0.0, 0.1, 0.25, 0.6, 0.9, 1.0],
        &[0.5, 1.0, 1.5, 2.0, 2.5],
    ));
    cases.extend(h2_cases());
    let checks: Vec<DerivCheck> = cases.par_iter().filter_map(check_derivative).collect();
    let mut pass = true;
    let mut parts = Vec::new();
    for tag in [CaseTag::H1, CaseTag::H2, CaseTag::H3] {
        let group: Vec<&DerivCheck> = checks.iter().filter(|c| c.tag == tag).collect();
        let bad: Vec<&&DerivCheck> = group.iter().filter(|c| !c.ok).collect();
        let worst = group.iter().map(|c| c.rel).fold(0.0f64, f64::max);
        let group_pass = group.len() >= 40 && bad.is_empty();
        pass &= group_pass;
        let mut formulas: Vec<&str> = bad.iter().map(|c| c.formula).collect();
        formulas.sort_unstable();
        formulas.dedup();
        parts.push(format!(
            "{tag:?}: {}/{} within tolerance, worst rel {worst:.1e}{}",
            group.len() - bad.len(),
            group.len(),
            if formulas.is_empty() { String::new() } else { format!(" (off: {})", formulas.join(",")) }
        ));
    }
    Outcome::new(pass, parts.join("; "))
}

fn monotone_and_symmetric() -> Outcome {
    let g = fig_growth();
    let mut problems = Vec::new();

    let alpha = 0.5;
    let ls: Vec<f64> = (0..20).map(|i| 0.5 + i as f64 * (L - alpha - 0.6) / 19.0).collect();
    for (name, bc) in keywords() {
        let vals: Vec<f64> = ls.iter().map(|&l| lambda1(&bc, &g, alpha, l)).collect();
        if !vals.windows(2).all(|w| w[1] < w[0]) {
            problems.push(format!("{name} not decreasing in l"));
        }
    }

    for l in [2.0, 4.0, 6.0] {
        let top = L - l;
        let alphas: Vec<f64> = (0..=20).map(|i| top * i as f64 / 20.0).collect();
        for (name, bc) in keywords() {
            let vals: Vec<f64> = alphas.iter().map(|&a| lambda1(&bc, &g, a, l)).collect();
            let ok = match name {
                "NN" => vals[..=10].windows(2).all(|w| w[1] > w[0]) && vals[10..].windows(2).all(|w| w[1] < w[0]),
                "DD" => vals[..=10].windows(2).all(|w| w[1] < w[0]) && vals[10..].windows(2).all(|w| w[1] > w[0]),
                "ND" => vals.windows(2).all(|w| w[1] > w[0]),
                _ => vals.windows(2).all(|w| w[1] < w[0]),
            };
            if !ok {
                problems.push(format!("{name} sign pattern in alpha at l={l}"));
            }
            let min_i = (0..vals.len()).min_by(|&i, &j| vals[i].total_cmp(&vals[j])).unwrap();
            let star = optimal_alpha(l, L, &bc, &g).unwrap();
            let hit = match star {
                AlphaStar::At(a) => (alphas[min_i] - a).abs() < 1e-12,
                AlphaStar::Pair(a, b) => {
                    (alphas[min_i] - a).abs() < 1e-12 || (alphas[min_i] - b).abs() < 1e-12
                }
            };
            let expected = match name {
                "NN" => star == AlphaStar::Pair(0.0, top),
                "DD" => star == AlphaStar::At(top / 2.0),
                "ND" => star == AlphaStar::At(0.0),
                _ => star == AlphaStar::At(top),
            };
            if !(hit && expected) {
                problems.push(format!("{name} argmin at l={l}"));
            }
        }
    }

    let mut worst = 0.0f64;
    for (_, bc) in keywords() {
        for growth in growths() {
            for &(alpha, l) in &LAYOUTS {
                let z = ZoneLayout::new(L, alpha, l).unwrap();
                let a = principal_eigenvalue(&z, &bc, &growth, EIGEN_TOL).unwrap().lambda1;
                let b = principal_eigenvalue(&z.reflected(), &bc.reflected(), &growth, EIGEN_TOL).unwrap().lambda1;
                worst = worst.max((a - b).abs());
            }
        }
    }
    if worst > 1e-8 {
        problems.push(format!("reflection off by {worst:.2e}"));
    }
    let detail = if problems.is_empty() {
        format!("l-decrease, alpha patterns, argmins and reflection (max {worst:.1e}) hold")
    } else {
        problems.join("; ")
    };
    Outcome::new(problems.is_empty(), detail)
}

fn robin_limits() -> Outcome {
    let g = fig_growth();
    let mut worst = 0.0f64;
    let mut count = 0;
    let layouts = [(0.0, 2.0), (2.0, 3.0), (3.5, 3.0), (1.0, 6.0), (5.0, 5.0), (8.0, 1.5)];
    for &(alpha, l) in &layouts {
        for (small, large) in [(1e-8, 1e8)] {
            let pairs = [
                (BoundarySpec::new(1.0, small, 1.0, 0.0), BoundarySpec::NN),
                (BoundarySpec::new(1.0, large, 1.0, 0.0), BoundarySpec::DN),
                (BoundarySpec::new(1.0, small, 0.0, 1.0), BoundarySpec::ND),
                (BoundarySpec::new(1.0, large, 0.0, 1.0), BoundarySpec::DD),
                (BoundarySpec::new(1.0, 0.0, 1.0, small), BoundarySpec::NN),
                (BoundarySpec::new(1.0, 0.0, 1.0, large), BoundarySpec::ND),
                (BoundarySpec::new(0.0, 1.0, 1.0, small), BoundarySpec::DN),
                (BoundarySpec::new(0.0, 1.0, 1.0, large), BoundarySpec::DD),
            ];
            for (robin, limit) in pairs {
                let a = lambda1(&robin.unwrap(), &g, alpha, l);
                let b = lambda1(&limit, &g, alpha, l);
                worst = worst.max((a - b).abs());
                count += 1;
            }
        }
    }
    Outcome::new(
        worst <= 1e-5,
        format!("{count} comparisons on {} layouts, max |diff| {worst:.2e}", layouts.len()),
    )
}

fn run_fate(bc: &BoundarySpec, alpha: f64, l: f64, u0: f64, habitat: f64, t_end: f64) -> (FateVerdict, Vec<f64>, Vec<f64>) {
    let g = fig_growth();
    let z = ZoneLayout::new(habitat, alpha, l).unwrap();
    let mut cfg = SimConfig::new(g.allee_a());
    cfg.t_end = t_end;
    let tr = simulate(&z, bc, &g, &|_| u0, &cfg).unwrap();
    let mut fate = classify_fate(&tr, cfg.xi, 0.25 * t_end);
    fate.lambda1 = Some(principal_eigenvalue(&z, bc, &g, EIGEN_TOL).unwrap().lambda1);
    (fate, tr.x.clone(), tr.final_profile().to_vec())
}

fn verdict_word(v: Verdict) -> &'static str {
    match v {
        Verdict::Persist => "persist",
        Verdict::Extinct => "extinct",
        Verdict::Undecided => "undecided",
    }
}

fn figure_three() -> Outcome {
    let start = Instant::now();
    let scenarios = [
        ("N-D [1,4]", BoundarySpec::ND, 1.0, Verdict::Persist),
        ("D-D [1,4]", BoundarySpec::DD, 1.0, Verdict::Extinct),
        ("D-D [3,6]", BoundarySpec::DD, 3.0, Verdict::Persist),
    ];
    let fates: Vec<FateVerdict> =
        scenarios.par_iter().map(|&(_, bc, alpha, _)| run_fate(&bc, alpha, 3.0, 0.01, L, 2000.0).0).collect();
    let mut pass = start.elapsed() <= Duration::from_secs(300);
    let mut parts = Vec::new();
    for ((name, _, _, want), fate) in scenarios.iter().zip(&fates) {
        let lam = fate.lambda1.unwrap();
        let spectral = FateVerdict::from_lambda(lam).verdict;
        pass &= fate.verdict == *want && spectral == *want;
        parts.push(format!("{name} {} (lambda1 {lam:+.4})", verdict_word(fate.verdict)));
    }
    Outcome::new(pass, format!("right end Dirichlet; {}; {:.1} s", parts.join(", "), start.elapsed().as_secs_f64()))
}

fn theta_lower_bound() -> Outcome {
    let g = fig_growth();
    let l = 8.0;
    let theta = match theta_f(l, &g, 1e-10) {
        Ok(t) => t,
        Err(e) => return Outcome::new(false, format!("theta_f failed: {e}")),
    };
    let alpha = 1.0;
    let cases: Vec<(&str, BoundarySpec)> = keywords().to_vec();
    let gaps: Vec<(&str, f64)> = cases
        .par_iter()
        .map(|&(name, bc)| {
            let (_, x, u) = run_fate(&bc, alpha, l, 0.01, L, 2000.0);
            let gap = x
                .iter()
                .zip(&u)
                .filter(|(&x, _)| x > alpha && x < alpha + l)
                .map(|(&x, &u)| u - (theta.eval(x - alpha) - 0.02))
                .fold(f64::INFINITY, f64::min);
            (name, gap)
        })
        .collect();
    let pass = gaps.iter().all(|&(_, gap)| gap >= 0.0);
    let detail = gaps.iter().map(|(n, gap)| format!("{n} min(u - theta + 0.02) {gap:.4}")).collect::<Vec<_>>().join(", ");
    Outcome::new(pass, format!("theta peak {:.4}; {detail}", theta.peak))
}

fn extinction_condition() -> Outcome {
    let g = fig_growth();
    let short = extinction_sufficient(&g, &BoundarySpec::DD, 5.0);
    let long = extinction_sufficient(&g, &BoundarySpec::DD, 10.0);
    let runs: Vec<(f64, f64, Verdict)> = [(1.0, 3.0), (0.0, 5.0)]
        .par_iter()
        .map(|&(alpha, l)| (alpha, l, run_fate(&BoundarySpec::DD, alpha, l, 0.5, 5.0, 2000.0).0.verdict))
        .collect();
    let extinct = runs.iter().all(|r| r.2 == Verdict::Extinct);
    let pass = short == Ok(true) && long == Ok(false) && extinct;
    let sims = runs
        .iter()
        .map(|(a, l, v)| format!("zone [{a},{}] {}", a + l, verdict_word(*v)))
        .collect::<Vec<_>>()
        .join(", ");
    Outcome::new(pass, format!("L=5 criterion {short:?}, L=10 criterion {long:?}, u0=0.5 on L=5: {sims}"))
}

fn critical_length_bisection() -> Outcome {
    let g = fig_growth();
    let mut pass = true;
    let mut parts = Vec::new();
    for (name, bc) in [("NN", BoundarySpec::NN), ("DD", BoundarySpec::DD)] {
        let lengths = critical_lengths(&bc, &g, L, 1e-10).unwrap();
        let (Some(closed), Some(found)) = (lengths.l_bar1, lengths.l_bar2.or(lengths.l_tilde)) else {
            pass = false;
            parts.push(format!("{name}: missing length"));
            continue;
        };
        let rel = (found - closed).abs() / closed;
        pass &= rel <= 0.02 && found <= closed;
        parts.push(format!("{name} bisection {found:.4} vs closed form {closed:.4} ({:.1}% off)", 100.0 * rel));
    }
    Outcome::new(pass, parts.join("; "))
}

fn main() -> ExitCode {
    let criteria: [(&str, fn() -> Outcome); 10] = [
        ("oracle agreement", oracle_agreement),
        ("equation residuals", equation_residuals),
        ("bracket and positivity", bracket_invariants),
        ("derivative formulas", derivative_formulas),
        ("monotonicity and symmetry", monotone_and_symmetric),
        ("Robin limits", robin_limits),
        ("three simulated fates", figure_three),
        ("theta_f lower bound", theta_lower_bound),
        ("extinction condition", extinction_condition),
        ("critical lengths", critical_length_bisection),
    ];
    let mut failed = 0;
    for (i, (name, check)) in criteria.iter().enumerate() {
        let out = check();
        if !out.pass {
            failed += 1;
        }
        println!("criterion {:>2} {name}: {} ({})", i + 1, if out.pass { "PASS" } else { "FAIL" }, out.detail);
    }
    println!("{} of {} criteria pass", criteria.len() - failed, criteria.len());
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
