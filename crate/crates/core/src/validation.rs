//! The self-validation suite: every acceptance criterion as a deterministic check record.

use crate::error::Result;
use crate::euler_integral::{
    coarea_check, continuity_gap_bound, euler_primitive_direct, euler_primitive_integral, euler_primitive_rotavg,
    kac_rice_1d, Profile1D, QuadratureSpec,
};
use crate::fields::{named_field, rotate_field, Affine, Field, Jet2, TestFunction};
use crate::geometry::SymMat2;
use crate::moments::{moment_check, ShotWindow};
use crate::quadrature::Rule1D;
use crate::seed::derive_seed;
use crate::shotnoise::{
    empirical_cf, isotropy_factor_check, mc_euler_primitive_fourier, mc_gamma_at_origin, stationary_limit_density,
    BesselQuadrature, CfQuadrature, CharacteristicFunction, ImproperSpec, KernelModel,
};
use crate::topology::{
    euler_char_bicov_grid, euler_char_cubical, euler_char_morse, find_critical_points, morse_count_stability,
    CriticalPointConfig, EcMethod, GridSpec, SampledGrid,
};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use std::collections::BTreeMap;
use std::sync::Arc;
use std::time::Instant;

pub const CRITERION_COUNT: u32 = 14;

/// Outcome of one criterion.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CheckRecord {
    pub id: u32,
    pub name: String,
    pub values: BTreeMap<String, f64>,
    pub tolerance: f64,
    pub passed: bool,
    pub detail: String,
    pub seed: u64,
    pub wall_time_ms: u64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SuiteSummary {
    pub total: usize,
    pub passed: usize,
    pub failed: Vec<u32>,
    pub all_passed: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ValidationReport {
    pub version: String,
    pub master_seed: u64,
    pub checks: Vec<CheckRecord>,
    pub summary: SuiteSummary,
}

impl ValidationReport {
    pub fn from_checks(master_seed: u64, checks: Vec<CheckRecord>) -> Self {
        let failed: Vec<u32> = checks.iter().filter(|c| !c.passed).map(|c| c.id).collect();
        let summary = SuiteSummary {
            total: checks.len(),
            passed: checks.len() - failed.len(),
            all_passed: failed.is_empty(),
            failed,
        };
        Self { version: env!("CARGO_PKG_VERSION").to_string(), master_seed, checks, summary }
    }

    /// Copy with every wall time zeroed, for reproducibility comparisons.
    pub fn without_timings(&self) -> Self {
        let mut r = self.clone();
        for c in &mut r.checks {
            c.wall_time_ms = 0;
        }
        r
    }
}

struct Outcome {
    values: Vec<(&'static str, f64)>,
    tolerance: f64,
    passed: bool,
    detail: String,
}

fn outcome(values: Vec<(&'static str, f64)>, tolerance: f64, passed: bool, detail: impl Into<String>) -> Result<Outcome> {
    Ok(Outcome { values, tolerance, passed, detail: detail.into() })
}

pub fn criterion_name(id: u32) -> &'static str {
    match id {
        1 => "radial_exactness",
        2 => "main_identity",
        3 => "ec_method_agreement",
        4 => "rotation_identity",
        5 => "coarea",
        6 => "kac_rice",
        7 => "continuity_bound",
        8 => "morse_stability",
        9 => "characteristic_function",
        10 => "isotropy_factor",
        11 => "stationary_limit",
        12 => "derivative_formulas",
        13 => "moment_bound",
        14 => "reproducibility",
        _ => "unknown",
    }
}

fn bump() -> TestFunction {
    TestFunction::Bump { a: 0.2, b: 0.8, scale: 1.0 }
}

fn integral_of_h(h: &TestFunction, a: f64, b: f64) -> f64 {
    Rule1D::uniform(a, b, 64, 10).integrate(|u| h.eval(u).re)
}

fn radial_exactness() -> Result<Outcome> {
    let start = Instant::now();
    let f = named_field("radial_exp")?;
    let h = bump();
    let est = euler_primitive_integral(f.as_ref(), &h, &QuadratureSpec::default())?;
    let exact = integral_of_h(&h, 0.2, 0.8);
    let err = (est.value - exact).norm();
    let secs = start.elapsed().as_secs_f64();
    outcome(
        vec![("i_f_re", est.value.re), ("i_f_im", est.value.im), ("exact", exact), ("abs_error", err)],
        1e-3,
        err <= 1e-3 && secs < 10.0,
        format!("resolution 512; runtime below 10 s: {}", secs < 10.0),
    )
}

fn main_identity_gap(f: &Field, h: &TestFunction, spatial: usize, grid: usize) -> Result<f64> {
    let qi = QuadratureSpec { spatial_resolution: spatial, ..QuadratureSpec::default() };
    let qd = QuadratureSpec { ec_resolution: grid, level_count: 128, ..QuadratureSpec::default() };
    let i = euler_primitive_integral(f.as_ref(), h, &qi)?;
    let d = euler_primitive_direct(f.as_ref(), h, &qd, EcMethod::Cubical)?;
    Ok(i.value.re - d.value)
}

fn main_identity() -> Result<Outcome> {
    let f = named_field("two_bump")?;
    let h = bump();
    let g1 = main_identity_gap(&f, &h, 512, 1024)?;
    let g2 = main_identity_gap(&f, &h, 1024, 2048)?;
    let ratio = (g2 / g1).abs();
    outcome(
        vec![("gap", g1), ("gap_doubled", g2), ("ratio", ratio)],
        1e-2,
        g1.abs() <= 1e-2 && (0.375..=0.625).contains(&ratio),
        "I_f at 512 vs cubical 1024 grid with 128 levels; doubled: I_f at 1024, grid 2048; ratio must lie in 0.5 ± 25%",
    )
}

fn ec_agreement() -> Result<Outcome> {
    let f = named_field("two_bump")?;
    let bbox = f.bbox();
    let spec = GridSpec::covering(&bbox, bbox.center(), 1.0 / 256.0)?;
    let grid = SampledGrid::sample(f.as_ref(), spec);
    let points = find_critical_points(f.as_ref(), &bbox, &CriticalPointConfig::default())?;
    let mut values = Vec::new();
    let mut ok = true;
    const NAMES: [[&str; 3]; 5] = [
        ["u0.1_cubical", "u0.1_bicov", "u0.1_morse"],
        ["u0.3_cubical", "u0.3_bicov", "u0.3_morse"],
        ["u0.5_cubical", "u0.5_bicov", "u0.5_morse"],
        ["u0.8_cubical", "u0.8_bicov", "u0.8_morse"],
        ["u0.95_cubical", "u0.95_bicov", "u0.95_morse"],
    ];
    for (k, u) in [0.1, 0.3, 0.5, 0.8, 0.95].into_iter().enumerate() {
        let bin = grid.threshold(u)?;
        let c = euler_char_cubical(&bin);
        let b = euler_char_bicov_grid(&bin);
        let m = euler_char_morse(&points, u, 1e-9)?;
        ok &= c == b && b == m;
        values.extend([(NAMES[k][0], c as f64), (NAMES[k][1], b as f64), (NAMES[k][2], m as f64)]);
    }
    outcome(values, 0.0, ok, "two_bump, spacing 1/256, exact integer equality")
}

fn rotation_identity() -> Result<Outcome> {
    let f = named_field("two_bump")?;
    let h = bump();
    let q = QuadratureSpec { spatial_resolution: 2048, ..QuadratureSpec::default() };
    let i = euler_primitive_integral(f.as_ref(), &h, &q)?.value;
    let r = euler_primitive_integral(rotate_field(f.clone(), 1).as_ref(), &h, &q)?.value;
    let a = euler_primitive_rotavg(f.as_ref(), &h, &q)?.value;
    let (d1, d2) = ((i - r).norm(), (i - a).norm());
    outcome(
        vec![("i_f", i.re), ("i_f_rotated", r.re), ("i_f_rotavg", a.re), ("gap_rotated", d1), ("gap_rotavg", d2)],
        2e-4,
        d1 <= 2e-4 && d2 <= 2e-4,
        "two_bump at spatial resolution 2048",
    )
}

fn coarea() -> Result<Outcome> {
    let h = bump();
    let q = QuadratureSpec::default();
    let mut values = Vec::new();
    let mut ok = true;
    for (name, keys) in [("radial_exp", ["radial_lhs", "radial_rhs", "radial_rel_gap"]), ("two_bump", ["two_bump_lhs", "two_bump_rhs", "two_bump_rel_gap"])] {
        let f = named_field(name)?;
        let (l, r) = coarea_check(f.as_ref(), &h, &q)?;
        let rel = (l - r).abs() / r.abs();
        ok &= rel <= 0.01;
        values.extend([(keys[0], l), (keys[1], r), (keys[2], rel)]);
    }
    outcome(values, 0.01, ok, "spatial resolution 512, 128 levels")
}

fn kac_rice() -> Result<Outcome> {
    let h = bump();
    let (tl, tr) = kac_rice_1d(&Profile1D::Tent, &h, 128)?;
    let (gl, gr) = kac_rice_1d(&Profile1D::Gaussian { amplitude: 1.0, width: 1.0 }, &h, 128)?;
    let tent_rel = (tr - 2.0 * tl).abs() / tr.abs();
    let gauss_rel = (gr - 2.0 * gl).abs() / gr.abs();
    outcome(
        vec![("tent_lhs", tl), ("tent_rhs", tr), ("tent_rel_gap", tent_rel), ("gaussian_lhs", gl), ("gaussian_rhs", gr), ("gaussian_rel_gap", gauss_rel)],
        1e-3,
        tent_rel <= 1e-12 && gauss_rel <= 1e-3,
        "tent to rounding (1e-12), Gaussian profile to 1e-3",
    )
}

fn random_jet(rng: &mut ChaCha8Rng, value: (f64, f64), scale: f64) -> Jet2 {
    let mut u = |s: f64| rng.random_range(-s..s);
    let v = value.0 + u(value.1);
    Jet2::new(v, [u(scale), u(scale)], SymMat2::new(u(scale), u(scale), u(scale)))
}

fn continuity(seed: u64) -> Result<Outcome> {
    let h = bump();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let (mut violations, mut worst) = (0usize, 0.0f64);
    for _ in 0..1000 {
        let jf = random_jet(&mut rng, (0.5, 0.45), 2.0);
        let eps = 10f64.powf(rng.random_range(-4.0..0.0));
        let jg = random_jet(&mut rng, (0.0, eps), eps);
        for i in 0..2 {
            let b = continuity_gap_bound(&jf, &jg, &h, i);
            if b.actual > b.bound {
                violations += 1;
            }
            if b.bound > 0.0 {
                worst = worst.max(b.actual / b.bound);
            }
        }
    }
    outcome(
        vec![("violations", violations as f64), ("max_actual_over_bound", worst)],
        0.0,
        violations == 0,
        "1000 jet pairs, both cone indices; f entries uniform on [-2, 2], g scaled by 10^U(-4, 0)",
    )
}

fn morse_stability(seed: u64) -> Result<Outcome> {
    let f = named_field("two_bump")?;
    let cfg = CriticalPointConfig::default();
    let level = 0.3;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut changed = 0usize;
    let mut base_euler = 0;
    for _ in 0..100 {
        let g: Field = Arc::new(Affine::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0)));
        let (base, moved) = morse_count_stability(&f, level, &g, 1e-4, &cfg)?;
        base_euler = base.euler();
        if base != moved {
            changed += 1;
        }
    }
    outcome(
        vec![("changed_triples", changed as f64), ("euler", base_euler as f64)],
        0.0,
        changed == 0,
        "two_bump above level 0.3, eta 1e-4, 100 affine perturbations with coefficients uniform on [-1, 1]",
    )
}

fn window_radius(model: &KernelModel) -> f64 {
    5.0 * model.max_truncation_radius()
}

fn characteristic_function(seed: u64) -> Result<Outcome> {
    let model = KernelModel::gaussian();
    let cf = CharacteristicFunction::new(&model, 1.0, &CfQuadrature::default())?;
    let mut values = Vec::new();
    let mut ok = true;
    const KEYS: [[&str; 3]; 3] = [
        ["t0.5_gap", "t0.5_stderr", "t0.5_abs_psi"],
        ["t1_gap", "t1_stderr", "t1_abs_psi"],
        ["t2_gap", "t2_stderr", "t2_abs_psi"],
    ];
    for (k, t) in [0.5, 1.0, 2.0].into_iter().enumerate() {
        let p = cf.psi(1, t, [0.0, 0.0], 0.0)?;
        let e = empirical_cf(&model, window_radius(&model), 1.0, t, 10_000, derive_seed(seed, k as u64))?;
        let gap = (p - e.mean).norm();
        ok &= gap <= 3.0 * e.stderr + 1e-3;
        values.extend([(KEYS[k][0], gap), (KEYS[k][1], e.stderr), (KEYS[k][2], p.norm())]);
    }
    outcome(values, 1e-3, ok, "gaussian kernel, intensity 1, 10^4 replicates; gap <= 3 stderr + 1e-3")
}

fn isotropy(seed: u64) -> Result<Outcome> {
    let model = KernelModel::gaussian();
    let r = isotropy_factor_check(&model, 1.0, window_radius(&model), 1.0, 10_000, seed)?;
    let g1 = (r.lhs[0] - r.rhs).norm();
    let g2 = (r.lhs[1] - r.rhs).norm();
    let ang = (r.angular_constant - (std::f64::consts::PI - 2.0) / 8.0).abs();
    outcome(
        vec![
            ("lhs1_re", r.lhs[0].re),
            ("lhs2_re", r.lhs[1].re),
            ("rhs_re", r.rhs.re),
            ("gap1", g1),
            ("gap2", g2),
            ("stderr1", r.stderr[0]),
            ("stderr2", r.stderr[1]),
            ("angular_constant_error", ang),
        ],
        1e-12,
        g1 <= 3.0 * r.stderr[0] && g2 <= 3.0 * r.stderr[1] && ang <= 1e-12,
        "t = 1, 10^4 replicates; angular constant to 1e-12",
    )
}

fn stationary_limit(seed: u64) -> Result<Outcome> {
    let model = KernelModel::gaussian();
    let limit = stationary_limit_density(1.0, &model, 1.0, &BesselQuadrature::default(), &ImproperSpec::default())?;
    let mc = mc_gamma_at_origin(1.0, &model, window_radius(&model), 1.0, 10_000, derive_seed(seed, 0))?;
    let gap = (limit.value - mc.mean).norm();
    let origin_ok = gap <= 3.0 * mc.stderr + limit.error;

    // window sweep: distance to the limit must not grow beyond the combined error bars
    let sweep = [(16.0, 400, 80), (64.0, 100, 160), (256.0, 25, 320)];
    let mut dist = Vec::new();
    for (k, &(n, reps, res)) in sweep.iter().enumerate() {
        let e = mc_euler_primitive_fourier(1.0, &model, n, 1.0, reps, res, derive_seed(seed, 1 + k as u64))?;
        dist.push(((e.mean - limit.value).norm(), e.stderr));
    }
    let monotone = dist
        .windows(2)
        .all(|w| w[1].0 <= w[0].0 + 3.0 * (w[0].1 * w[0].1 + w[1].1 * w[1].1).sqrt() + 2.0 * limit.error);
    outcome(
        vec![
            ("limit_re", limit.value.re),
            ("limit_im", limit.value.im),
            ("limit_error", limit.error),
            ("mc_re", mc.mean.re),
            ("mc_im", mc.mean.im),
            ("mc_stderr", mc.stderr),
            ("gap", gap),
            ("dist_n16", dist[0].0),
            ("dist_n64", dist[1].0),
            ("dist_n256", dist[2].0),
            ("stderr_n16", dist[0].1),
            ("stderr_n64", dist[1].1),
            ("stderr_n256", dist[2].1),
        ],
        3.0 * mc.stderr + limit.error,
        origin_ok && monotone,
        format!("t = 1; origin check {origin_ok}; window sweep n = 16, 64, 256 non-increasing {monotone}"),
    )
}

fn derivative_formulas() -> Result<Outcome> {
    let cf = CharacteristicFunction::new(&KernelModel::gaussian(), 1.0, &CfQuadrature::default())?;
    let mut worst_d4 = 0.0f64;
    for (t, s) in [(1.0, [0.3, -0.2]), (0.5, [0.0, 0.0]), (2.0, [-0.4, 0.7])] {
        for i in [1, 2] {
            let d = 1e-4;
            let fd = (cf.psi(i, t, s, d)? - cf.psi(i, t, s, -d)?) / (2.0 * d);
            let an = cf.d4_psi(i, t, s)?;
            worst_d4 = worst_d4.max((fd - an).norm() / an.norm());
        }
    }
    let mut worst_d22 = 0.0f64;
    for t in [0.0, 1.0, 2.0] {
        for i in [1, 2] {
            let d = 1e-3;
            let p = |x: f64| cf.psi(i, t, [x, 0.0], 0.0);
            let fd = (p(d)? - 2.0 * p(0.0)? + p(-d)?) / (d * d);
            let an = cf.d22_psi(i, t)?;
            worst_d22 = worst_d22.max((fd - an).norm() / an.norm());
        }
    }
    outcome(
        vec![("d4_max_rel_error", worst_d4), ("d22_max_rel_error", worst_d22)],
        1e-3,
        worst_d4 <= 1e-3 && worst_d22 <= 1e-3,
        "central differences with steps 1e-4 (d4) and 1e-3 (d22), both variants",
    )
}

fn moment_bound_check(seed: u64) -> Result<Outcome> {
    let h = bump();
    let mut values = Vec::new();
    let mut ok = true;
    let mut worst = 0.0f64;
    for k in 0..5u64 {
        let reports = moment_check(
            "gaussian",
            &h,
            &[(1, 2.0), (2, 2.0)],
            &ShotWindow::default(),
            &QuadratureSpec::default(),
            100,
            derive_seed(seed, k),
        )?;
        for r in &reports {
            ok &= r.holds;
            worst = worst.max(r.empirical_qth / r.bound);
        }
        if k == 0 {
            values.extend([
                ("q1_empirical", reports[0].empirical_qth),
                ("q1_bound", reports[0].bound),
                ("q2_empirical", reports[1].empirical_qth),
                ("q2_bound", reports[1].bound),
            ]);
        }
    }
    values.push(("max_empirical_over_bound", worst));
    outcome(
        values,
        0.0,
        ok,
        "gaussian model on a disc window of radius 3, (q, p) in {(1, 2), (2, 2)}, constant q 2^q, 5 seeds of 100 replicates",
    )
}

/// Runs the seeded Monte Carlo checks twice and compares their records bit for bit.
fn reproducibility(seed: u64) -> Result<Outcome> {
    let a = (characteristic_function(seed)?.values, isotropy(seed)?.values, continuity(seed)?.values);
    let b = (characteristic_function(seed)?.values, isotropy(seed)?.values, continuity(seed)?.values);
    let same = format!("{a:?}") == format!("{b:?}");
    outcome(
        vec![("identical", same as u8 as f64)],
        0.0,
        same,
        "in-process rerun of checks 7, 9 and 10; the full report comparison runs the binary twice",
    )
}

/// Runs criterion `id` with the suite master seed. Errors become failed records.
pub fn run_check(id: u32, master_seed: u64) -> CheckRecord {
    let seed = derive_seed(master_seed, id as u64);
    let start = Instant::now();
    let result = match id {
        1 => radial_exactness(),
        2 => main_identity(),
        3 => ec_agreement(),
        4 => rotation_identity(),
        5 => coarea(),
        6 => kac_rice(),
        7 => continuity(seed),
        8 => morse_stability(seed),
        9 => characteristic_function(seed),
        10 => isotropy(seed),
        11 => stationary_limit(seed),
        12 => derivative_formulas(),
        13 => moment_bound_check(seed),
        14 => reproducibility(seed),
        _ => Err(crate::error::invalid(format!("no criterion {id}"))),
    };
    let wall_time_ms = start.elapsed().as_millis() as u64;
    let name = criterion_name(id).to_string();
    match result {
        Ok(o) => CheckRecord {
            id,
            name,
            values: o.values.into_iter().map(|(k, v)| (k.to_string(), v)).collect(),
            tolerance: o.tolerance,
            passed: o.passed,
            detail: o.detail,
            seed,
            wall_time_ms,
        },
        Err(e) => CheckRecord {
            id,
            name,
            values: BTreeMap::new(),
            tolerance: 0.0,
            passed: false,
            detail: format!("error: {e}"),
            seed,
            wall_time_ms,
        },
    }
}

/// Runs the listed criteria (all when `ids` is empty) in order.
pub fn run_validation(master_seed: u64, ids: &[u32]) -> ValidationReport {
    let all: Vec<u32> = (1..=CRITERION_COUNT).collect();
    let ids = if ids.is_empty() { &all[..] } else { ids };
    ValidationReport::from_checks(master_seed, ids.iter().map(|&id| run_check(id, master_seed)).collect())
}
