//! Acceptance criteria 1-12. Each test prints one line:
//! `ACCEPTANCE <n> PASS|FAIL <seconds>s <detail>`.

use std::f64::consts::{FRAC_PI_2, PI};
use std::io::Write;
use std::path::PathBuf;
use std::process::Command;
use std::time::{Duration, Instant};

use nalgebra::Matrix3;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

use gasloc::anchors::{
    doppler_profile, find_passes, format_tle, ionospheric_delay, parse_tle, placement_error_bounds, propagate_orbit,
    range_rate, spherical_to_ecef, tle_checksum, user_for_pass, OrbitElements, PlacementError,
};
use gasloc::estimators::{
    doppler_batch_ls, hybrid_range_aoa, mlat_range, mlat_tdoa, tdoa_from_toas, triangulate, DopplerObservation,
    HybridNoise, SolverConfig,
};
use gasloc::geometry::{
    direct_distance, local_aoa, position_from_range_aoa, rotation_from_attitude, Attitude, RotationMatrix, Vec3,
};
use gasloc::metrics::{gdop, DopKind};
use gasloc::radio::{ShadowingParams, RadioConfig, SPEED_OF_LIGHT};
use gasloc::sim::{altitude_sweep, gdop_map, run_monte_carlo, Scenario};
use gasloc::trajopt::{
    evaluate_trajectory, optimize_trajectory, trajectory_from_stops, AnnealConfig, Constraints, EnergyModel,
    Objective, SearchBox, TrajOptProblem,
};

fn verdict(n: u32, started: Instant, limit: Duration, outcome: Result<String, String>) {
    let took = started.elapsed();
    let (ok, detail) = match outcome {
        Ok(d) if took <= limit => (true, d),
        Ok(d) => (false, format!("{d}; runtime {:.1}s over the {}s limit", took.as_secs_f64(), limit.as_secs())),
        Err(d) => (false, d),
    };
    // Straight to the handle so the line survives the harness's output capture.
    let _ = writeln!(
        std::io::stderr(),
        "ACCEPTANCE {n} {} {:.2}s {detail}",
        if ok { "PASS" } else { "FAIL" },
        took.as_secs_f64()
    );
    assert!(ok, "criterion {n}: {detail}");
}

fn check(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn scenario_path(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("scenarios").join(name)
}

fn uniform_vec(rng: &mut ChaCha8Rng, lo: f64, hi: f64) -> Vec3 {
    Vec3::from_fn(|_, _| rng.random_range(lo..hi))
}

fn random_rotation(rng: &mut ChaCha8Rng) -> RotationMatrix {
    rotation_from_attitude(&Attitude::new(
        rng.random_range(-PI..PI),
        rng.random_range(-PI..PI),
        rng.random_range(-PI..PI),
    ))
}

#[test]
fn criterion_01_geometry_round_trip() {
    let started = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    let mut worst_pos = 0.0f64;
    let mut worst_orth = 0.0f64;
    for _ in 0..100_000 {
        let anchor = uniform_vec(&mut rng, -1000.0, 1000.0);
        let target = uniform_vec(&mut rng, -1000.0, 1000.0);
        let rot = random_rotation(&mut rng);
        let m = rot.matrix();
        worst_orth = worst_orth.max((m.transpose() * m - Matrix3::identity()).amax()).max((m.determinant() - 1.0).abs());
        let aoa = local_aoa(&anchor, &target, &rot).unwrap();
        let back = position_from_range_aoa(&anchor, direct_distance(&anchor, &target), &aoa, &rot).unwrap();
        worst_pos = worst_pos.max((back - target).norm());
    }
    let outcome = check(worst_pos <= 1e-9, || format!("round-trip error {worst_pos:e} m"))
        .and(check(worst_orth <= 1e-12, || format!("orthonormality defect {worst_orth:e}")))
        .map(|_| format!("max round-trip {worst_pos:e} m, max orthonormality defect {worst_orth:e}"));
    verdict(1, started, Duration::from_secs(5), outcome);
}

/// Anchors scattered in a 200 m cube with a target inside; rejected unless
/// the geometry is well conditioned.
fn well_posed(rng: &mut ChaCha8Rng, count: usize, kind: DopKind) -> (Vec<Vec3>, Vec3) {
    loop {
        let anchors: Vec<Vec3> = (0..count).map(|_| uniform_vec(rng, -100.0, 100.0)).collect();
        let target = uniform_vec(rng, -60.0, 60.0);
        if gdop(&anchors, &target, kind).is_ok_and(|d| d.gdop < 10.0) {
            return (anchors, target);
        }
    }
}

#[test]
fn criterion_02_noiseless_estimators() {
    let started = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    let cfg = SolverConfig::default();
    let mut worst = [0.0f64; 4];
    for _ in 0..1000 {
        let count = rng.random_range(4..9);
        let (anchors, target) = well_posed(&mut rng, count, DopKind::Range);
        let ranges: Vec<f64> = anchors.iter().map(|a| (a - target).norm()).collect();
        let est = mlat_range(&anchors, &ranges, &vec![1.0; count], &cfg).unwrap();
        worst[0] = worst[0].max((est.position - target).norm());

        let (anchors, target) = well_posed(&mut rng, 5, DopKind::Tdoa { reference: 0 });
        let toas: Vec<f64> = anchors.iter().map(|a| (a - target).norm() / SPEED_OF_LIGHT).collect();
        let est = mlat_tdoa(&anchors, &tdoa_from_toas(&toas, 0, 1.0).unwrap(), &cfg).unwrap();
        worst[1] = worst[1].max((est.position - target).norm());

        let target = uniform_vec(&mut rng, -60.0, 60.0);
        let poses: Vec<(Vec3, RotationMatrix)> = loop {
            let p: Vec<(Vec3, RotationMatrix)> =
                (0..2).map(|_| (uniform_vec(&mut rng, -100.0, 100.0), random_rotation(&mut rng))).collect();
            let (u, v) = ((p[0].0 - target).normalize(), (p[1].0 - target).normalize());
            let far = (p[0].0 - target).norm() > 5.0 && (p[1].0 - target).norm() > 5.0;
            if far && u.dot(&v).abs() < 10f64.to_radians().cos() {
                break p;
            }
        };
        let aoas: Vec<_> = poses.iter().map(|(a, r)| local_aoa(a, &target, r).unwrap()).collect();
        let est = triangulate(&poses, &aoas, &[0.01, 0.01], &cfg).unwrap();
        worst[2] = worst[2].max((est.position - target).norm());

        let (anchor, rot) = (uniform_vec(&mut rng, -100.0, 100.0), random_rotation(&mut rng));
        let aoa = local_aoa(&anchor, &target, &rot).unwrap();
        let noise = HybridNoise { range_m: 1.0, azimuth_rad: 0.01, elevation_rad: 0.01 };
        let est = hybrid_range_aoa(&anchor, &rot, (anchor - target).norm(), &aoa, &noise).unwrap();
        worst[3] = worst[3].max((est.position - target).norm());
    }
    let names = ["mlat_range", "mlat_tdoa", "triangulate", "hybrid_range_aoa"];
    let detail = names.iter().zip(worst).map(|(n, w)| format!("{n} {w:.1e} m")).collect::<Vec<_>>().join(", ");
    let outcome = check(worst.iter().all(|w| *w <= 1e-6), || format!("max error above 1e-6 m: {detail}"))
        .map(|_| format!("max error {detail}"));
    verdict(2, started, Duration::from_secs(30), outcome);
}

#[test]
fn criterion_03_crlb_efficiency() {
    let started = Instant::now();
    // Eight anchors at 8-25 m around the target. The solver is efficient
    // here, so the RMSE sits within the ~0.4% sampling error of the bound
    // and the lower limit can go either way.
    let anchors = [
        Vec3::new(12.0, 3.0, 1.0),
        Vec3::new(-9.0, 10.0, 6.0),
        Vec3::new(-4.0, -14.0, 2.0),
        Vec3::new(6.0, 8.0, 18.0),
        Vec3::new(-15.0, -6.0, 14.0),
        Vec3::new(20.0, -12.0, 9.0),
        Vec3::new(2.0, 22.0, -5.0),
        Vec3::new(-7.0, 2.0, -11.0),
    ];
    let target = Vec3::new(0.5, 1.0, 3.0);
    // Oracle: inverse of sum(u u^T) / sigma^2 with sigma = 1.
    let fim = anchors.iter().fold(Matrix3::zeros(), |acc, a| {
        let u = (a - target).normalize();
        acc + u * u.transpose()
    });
    let bound = fim.try_inverse().unwrap().trace().sqrt();
    let cfg = SolverConfig::default();
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let trials = 10_000;
    let mut sq = 0.0;
    for _ in 0..trials {
        let ranges: Vec<f64> =
            anchors.iter().map(|a| (a - target).norm() + <StandardNormal as Distribution<f64>>::sample(&StandardNormal, &mut rng)).collect();
        let est = mlat_range(&anchors, &ranges, &[1.0; 8], &cfg).unwrap();
        sq += (est.position - target).norm_squared();
    }
    let rmse = (sq / trials as f64).sqrt();
    let ratio = rmse / bound;
    let outcome = check((1.0..=1.15).contains(&ratio), || format!("RMSE {rmse:.4} m is {ratio:.4} x sqrt(tr CRLB) {bound:.4} m"))
        .map(|_| format!("RMSE {rmse:.4} m = {ratio:.4} x sqrt(tr CRLB) {bound:.4} m"));
    verdict(3, started, Duration::from_secs(60), outcome);
}

fn median(mut v: Vec<f64>) -> f64 {
    v.sort_by(f64::total_cmp);
    let n = v.len();
    if n % 2 == 1 {
        v[n / 2]
    } else {
        0.5 * (v[n / 2 - 1] + v[n / 2])
    }
}

#[test]
fn criterion_04_vertical_error_dominates_for_high_targets() {
    let started = Instant::now();
    let s = Scenario::load(&scenario_path("tdoa_high_altitude.toml")).unwrap();
    let report = run_monte_carlo(&s, 2).unwrap();
    let errors = report.errors();
    let h = median(errors.iter().map(|e| e.ex.hypot(e.ey)).collect());
    let v = median(errors.iter().map(|e| e.ez).collect());
    let rows = gdop_map(&s).unwrap();
    let min_ratio = rows
        .iter()
        .map(|r| r.dop.map(|d| d.vdop / d.hdop).unwrap_or(f64::NAN))
        .fold(f64::INFINITY, |a, b| if b.is_nan() { f64::NAN } else { a.min(b) });
    let outcome = check(report.failures == 0, || format!("{} failed trials", report.failures))
        .and(check(v >= 3.0 * h, || format!("median vertical {v:.2} m < 3 x median horizontal {h:.2} m")))
        .and(check(min_ratio >= 3.0, || format!("min vdop/hdop over the target region {min_ratio:.3}")))
        .map(|_| format!("median vertical {v:.2} m = {:.2} x horizontal {h:.2} m; min vdop/hdop {min_ratio:.2}", v / h));
    verdict(4, started, Duration::from_secs(60), outcome);
}

#[test]
fn criterion_05_altitude_sweep_shape() {
    let started = Instant::now();
    let s = Scenario::load(&scenario_path("altitude_sweep_urban.toml")).unwrap();
    let sweep = s.altitude_sweep.clone().unwrap();
    let rows = altitude_sweep(&s, 2).unwrap();
    let curve = |eh: f64| rows.iter().filter(|r| r.vertical_error_m == eh).map(|r| r.mean_error_m).collect::<Vec<_>>();
    let base = curve(0.0);
    let raised = curve(*sweep.vertical_errors_m.iter().find(|e| **e > 0.0).unwrap());
    let argmin = (0..base.len()).min_by(|a, b| base[*a].total_cmp(&base[*b])).unwrap();
    let above = base.iter().zip(&raised).filter(|(b, r)| r > b).count();
    let share = above as f64 / base.len() as f64;
    let outcome = check(argmin > 0 && argmin + 1 < base.len(), || format!("minimum at grid end (index {argmin})"))
        .and(check(share >= 0.95, || format!("raised curve above baseline at only {:.1}% of altitudes", 100.0 * share)))
        .map(|_| {
            format!(
                "interior minimum {:.1} m at h = {:.0} m; raised curve higher at {:.1}% of {} altitudes",
                base[argmin],
                sweep.altitudes_m[argmin],
                100.0 * share,
                base.len()
            )
        });
    verdict(5, started, Duration::from_secs(120), outcome);
}

#[test]
fn criterion_06_placement_error_bounds() {
    let started = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(6);
    let mut worst = 0.0f64;
    for _ in 0..20 {
        let h = 100.0 * 10f64.powf(rng.random::<f64>());
        let r = h * 0.5 * 4f64.powf(rng.random::<f64>());
        let cap = 0.02 * h.min(r);
        let (ed, er, eh) = (cap * rng.random_range(0.25..=1.0), cap * rng.random_range(0.25..=1.0), cap * rng.random_range(0.25..=1.0));
        let e = PlacementError::new(ed, er, eh).unwrap();
        let (bound_r, bound_h) = placement_error_bounds(&e, h, r).unwrap();
        let scheduled = Vec3::new(0.0, 0.0, h);
        let target = Vec3::new(r, 0.0, 0.0);
        let (mut max_r, mut max_h) = (0.0f64, 0.0f64);
        for _ in 0..100_000 {
            let actual = e.realize(&scheduled, &mut rng);
            let d_hat = (actual - target).norm() + ed * rng.random_range(-1.0..=1.0);
            max_r = max_r.max(((d_hat * d_hat - h * h).max(0.0).sqrt() - r).abs());
            max_h = max_h.max(((d_hat * d_hat - r * r).max(0.0).sqrt() - h).abs());
        }
        worst = worst.max(max_r / bound_r).max(max_h / bound_h);
    }
    let outcome = check(worst <= 1.05, || format!("empirical error reaches {worst:.4} x the bound"))
        .map(|_| format!("worst empirical / bound = {worst:.4} over 20 geometries x 1e5 draws"));
    verdict(6, started, Duration::from_secs(60), outcome);
}

#[test]
fn criterion_07_doppler_s_curves() {
    let started = Instant::now();
    let orbit = OrbitElements::new(550e3, 53f64.to_radians(), 0.3, 0.0).unwrap();
    let (peak_t, fc, step) = (600.0, 2e9, 1.0);
    let mut peaks = Vec::new();
    let mut problems = Vec::new();
    let mut worst_asym = 0.0f64;
    for el_deg in (10..=90).step_by(10) {
        let user = user_for_pass(&orbit, (el_deg as f64).to_radians(), peak_t).unwrap();
        // Zero mask so the 10 degree pass has a visible arc.
        let passes = doppler_profile(&orbit, &user, fc, 0.0, 2.0 * peak_t, step, 0.0).unwrap();
        if passes.len() != 1 {
            problems.push(format!("{el_deg} deg: {} passes", passes.len()));
            continue;
        }
        let (pass, rows) = &passes[0];
        let crossings: Vec<usize> =
            (1..rows.len()).filter(|&k| rows[k - 1].doppler_hz.signum() != rows[k].doppler_hz.signum()).collect();
        if crossings.len() != 1 {
            problems.push(format!("{el_deg} deg: {} zero crossings", crossings.len()));
            continue;
        }
        let k = crossings[0];
        let (a, b) = (&rows[k - 1], &rows[k]);
        let t_zero = a.time - a.doppler_hz * (b.time - a.time) / (b.doppler_hz - a.doppler_hz);
        if (t_zero - pass.peak_time).abs() > 2.0 * step {
            problems.push(format!("{el_deg} deg: zero at {t_zero:.1} s, max elevation at {} s", pass.peak_time));
        }
        if ((pass.peak_elevation.to_degrees()) - el_deg as f64).abs() > 1.0 {
            problems.push(format!("{el_deg} deg: peak elevation {:.2}", pass.peak_elevation.to_degrees()));
        }
        let peak = rows.iter().map(|r| r.doppler_hz.abs()).fold(0.0, f64::max);
        // antisymmetry about the zero crossing, sampled
        let at = |t: f64| {
            let s = propagate_orbit(&orbit, t);
            gasloc::anchors::doppler_frequency(&s.position, &s.velocity, &user, fc).unwrap()
        };
        let half = (pass.end - pass.start) / 2.0;
        for frac in [0.1, 0.3, 0.5, 0.7, 0.9] {
            let tau = frac * half;
            worst_asym = worst_asym.max((at(t_zero + tau) + at(t_zero - tau)).abs() / peak);
        }
        peaks.push((el_deg, peak, rows[0].doppler_hz > 0.0));
    }
    let overhead = peaks.iter().find(|p| p.0 == 90).map(|p| p.1).unwrap_or(f64::NAN);
    let monotone = peaks.windows(2).all(|w| w[1].1 > w[0].1);
    let outcome = check(problems.is_empty(), || problems.join("; "))
        .and(check(peaks.iter().all(|p| p.2), || "a pass does not start with positive Doppler".into()))
        .and(check(worst_asym < 0.05, || format!("S-curve asymmetry {worst_asym:.3} of peak")))
        .and(check((35e3..=48e3).contains(&overhead), || format!("90 deg peak |f_D| = {overhead:.0} Hz")))
        .and(check(monotone, || format!("peak |f_D| not monotone in max elevation: {peaks:?}")))
        .map(|_| {
            format!(
                "9 passes 10-90 deg, single zero at max elevation, asymmetry <= {:.2}% of peak, 90 deg peak {:.0} Hz, peaks monotone",
                100.0 * worst_asym,
                overhead
            )
        });
    verdict(7, started, Duration::from_secs(30), outcome);
}

#[test]
fn criterion_08_ionospheric_delay() {
    let started = Instant::now();
    let (group, phase) = ionospheric_delay(1.575e9, 1e18).unwrap();
    let outcome = check((group - 16.245).abs() <= 1e-3, || format!("group delay {group} m"))
        .and(check(group == -phase, || format!("group {group} != -phase {phase}")))
        .map(|_| format!("group {group:.6} m, phase {phase:.6} m"));
    verdict(8, started, Duration::from_secs(5), outcome);
}

#[test]
fn criterion_09_doppler_positioning() {
    let started = Instant::now();
    let user = spherical_to_ecef(0.6, 0.2, 0.0);
    let (user_drift, mask) = (3e-8, 10f64.to_radians());
    let sats: Vec<OrbitElements> =
        (0..4).map(|k| OrbitElements::new(550e3, 53f64.to_radians(), k as f64 * FRAC_PI_2, 0.7 * k as f64).unwrap()).collect();
    let mut obs = Vec::new();
    let mut used = Vec::new();
    for (i, o) in sats.iter().enumerate() {
        let drift = 1e-9 * (i as f64 + 1.0);
        let passes = find_passes(o, &user, 0.0, 86_400.0, 10.0, mask).unwrap();
        for p in passes.iter().filter(|p| p.complete).take(2) {
            let mut t = p.start;
            while t <= p.end {
                let s = propagate_orbit(o, t);
                obs.push(DopplerObservation {
                    sat_position: s.position,
                    sat_velocity: s.velocity,
                    sat_clock_drift: drift,
                    rate_mps: range_rate(&s.position, &s.velocity, &user, user_drift, drift).unwrap(),
                    sigma: 0.1,
                });
                t += 10.0;
            }
            used.push(i);
        }
    }
    let fix = doppler_batch_ls(&obs, &SolverConfig::default()).unwrap();
    let err = (fix.estimate.position - user).norm();
    let outcome = check(used.len() == 8, || format!("expected 2 complete passes of each of 4 satellites, got {used:?}"))
        .and(check(err < 1.0, || format!("position error {err:.3} m")))
        .map(|_| format!("{} observations over 8 passes, position error {err:.2e} m", obs.len()));
    verdict(9, started, Duration::from_secs(30), outcome);
}

/// Independent fixed-width writer for a synthetic record.
fn synth_tle(rng: &mut ChaCha8Rng) -> (String, String) {
    fn finish(body: String) -> String {
        assert_eq!(body.len(), 68);
        let sum: u32 = body
            .bytes()
            .map(|b| match b {
                b'0'..=b'9' => (b - b'0') as u32,
                b'-' => 1,
                _ => 0,
            })
            .sum();
        format!("{body}{}", sum % 10)
    }
    let cat = rng.random_range(1..100_000u32);
    let year = rng.random_range(0..100u32);
    let day = rng.random_range(1.0..366.0f64);
    let l1 = format!(
        "1 {cat:05}U {:02}{:03}A   {year:02}{day:012.8} -.00002182  00000-0 -11606-4 0  {:>3}",
        rng.random_range(57..100u32),
        rng.random_range(1..999u32),
        rng.random_range(1..1000u32)
    );
    let l2 = format!(
        "2 {cat:05} {:8.4} {:8.4} {:07} {:8.4} {:8.4} {:11.8}{:5}",
        rng.random_range(0.0..180.0f64),
        rng.random_range(0.0..360.0f64),
        rng.random_range(0..10_000_000u32),
        rng.random_range(0.0..360.0f64),
        rng.random_range(0.0..360.0f64),
        rng.random_range(11.0..16.5f64),
        rng.random_range(0..100_000u32)
    );
    (finish(l1), finish(l2))
}

#[test]
fn criterion_10_tle_parser() {
    let started = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(10);
    let mut corpus = vec![(
        "1 25544U 98067A   08264.51782528 -.00002182  00000-0 -11606-4 0  2927".to_string(),
        "2 25544  51.6416 247.4627 0006703 130.5360 325.0288 15.72125391563537".to_string(),
    )];
    corpus.extend((0..200).map(|_| synth_tle(&mut rng)));
    let mut problems = Vec::new();
    let (mut flips, mut caught) = (0usize, 0usize);
    for (l1, l2) in &corpus {
        let rec = match parse_tle(l1, l2) {
            Ok(r) => r,
            Err(e) => {
                problems.push(format!("valid record rejected: {e}"));
                continue;
            }
        };
        if format_tle(&rec) != (l1.clone(), l2.clone()) || tle_checksum(l1) != l1.as_bytes()[68] - b'0' {
            problems.push(format!("round trip changed {l1} / {l2}"));
        }
        for line in 0..2 {
            let original = if line == 0 { l1 } else { l2 };
            for (col, b) in original.bytes().enumerate().filter(|(_, b)| b.is_ascii_digit()) {
                for delta in 1..10u8 {
                    let mut bytes = original.clone().into_bytes();
                    bytes[col] = b'0' + (b - b'0' + delta) % 10;
                    let flipped = String::from_utf8(bytes).unwrap();
                    let res = if line == 0 { parse_tle(&flipped, l2) } else { parse_tle(l1, &flipped) };
                    flips += 1;
                    if res.is_err_and(|e| e.code() == "TLE_CHECKSUM") {
                        caught += 1;
                    }
                }
            }
        }
        for bad in [&l1[..68], &format!("{l1} ")[..], &l1[1..]] {
            if !parse_tle(bad, l2).is_err_and(|e| e.code() == "TLE_FORMAT") {
                problems.push(format!("malformed length {} accepted", bad.len()));
            }
        }
    }
    let outcome = check(problems.is_empty(), || problems.join("; "))
        .and(check(caught == flips, || format!("{caught} of {flips} digit flips reported as checksum errors")))
        .map(|_| format!("{} records round-trip byte-exactly; {caught}/{flips} digit flips caught; bad lengths rejected", corpus.len()));
    verdict(10, started, Duration::from_secs(5), outcome);
}

#[test]
fn criterion_11_trajectory_optimizer() {
    let started = Instant::now();
    let problem = TrajOptProblem {
        objective: Objective::RssRanging { radio: RadioConfig { constant_db: -40.0, ..Default::default() }, shadowing: ShadowingParams::urban_illustrative() },
        targets: vec![(Vec3::new(500.0, 0.0, 0.0), 1.0)],
        constraints: Constraints {
            max_speed_mps: 20.0,
            max_turn_rate_rad_s: None,
            energy: EnergyModel { hover_power_w: 100.0, move_cost_j_per_m: 5.0 },
            energy_budget_j: Some(10_000.0),
            min_waypoints: 1,
            max_waypoints: 1,
            min_dwell_s: 1.0,
            coverage_radius_m: None,
        },
        bounds: SearchBox { min: Vec3::new(0.0, 0.0, 20.0), max: Vec3::new(0.0, 0.0, 2000.0) },
        total_dwell_s: 60.0,
        reference_dwell_s: 60.0,
    };
    // exhaustive 1 m grid
    let mut grid_best = (f64::INFINITY, 0.0);
    for k in 0..=1980 {
        let z = 20.0 + k as f64;
        let t = trajectory_from_stops(&[(Vec3::new(0.0, 0.0, z), 60.0)], 20.0).unwrap();
        let e = evaluate_trajectory(&problem, &t).unwrap();
        if e.feasible() && e.objective < grid_best.0 {
            grid_best = (e.objective, z);
        }
    }
    let cfg = AnnealConfig { iterations: 3000, chains: 4, seed: 11, ..Default::default() };
    let result = optimize_trajectory(&problem, &cfg).unwrap();
    let again = evaluate_trajectory(&problem, &result.trajectory).unwrap();
    let gap = result.evaluation.objective / grid_best.0 - 1.0;

    // constraints hold on re-evaluation for a multi-stop plan as well
    let s = Scenario::load(&scenario_path("trajopt_crlb.toml")).unwrap();
    let multi = gasloc::sim::trajopt_pipeline(&s, 2).unwrap();
    let multi_problem = gasloc::sim::trajopt_problem(&s).unwrap();
    let multi_again = evaluate_trajectory(&multi_problem, &multi.trajectory).unwrap();

    let outcome = check(gap <= 0.10, || format!("anneal {:.4} vs grid {:.4} ({:+.2}%)", result.evaluation.objective, grid_best.0, 100.0 * gap))
        .and(check(again.feasible() && (again.objective - result.evaluation.objective).abs() <= 1e-9 * again.objective.abs(), || {
            format!("re-evaluation disagrees: {again:?}")
        }))
        .and(check(multi_again.feasible(), || format!("multi-stop plan violates {:?}", multi_again.first_violation())))
        .map(|_| {
            format!(
                "anneal {:.4} m at z = {:.1} m vs grid {:.4} m at z = {:.0} m ({:+.2}%); constraints hold on re-evaluation",
                result.evaluation.objective,
                result.stops[0].0.z,
                grid_best.0,
                grid_best.1,
                100.0 * gap
            )
        });
    verdict(11, started, Duration::from_secs(120), outcome);
}

#[test]
fn criterion_12_determinism_across_workers() {
    let started = Instant::now();
    let dir = tempfile::tempdir().unwrap();
    let scenario = scenario_path("a2g_uav_range.toml");
    let mut outputs = Vec::new();
    for workers in [1, 2, 8] {
        let out = dir.path().join(format!("w{workers}.csv"));
        let status = Command::new(env!("CARGO_BIN_EXE_gasloc"))
            .args(["simulate", "--seed", "7", "--trials", "300", "--workers", &workers.to_string()])
            .arg("--scenario")
            .arg(&scenario)
            .arg("--out")
            .arg(&out)
            .status()
            .unwrap();
        assert!(status.success());
        outputs.push(std::fs::read(&out).unwrap());
    }
    let outcome = check(outputs[0] == outputs[1] && outputs[1] == outputs[2], || "CSV differs between worker counts".into())
        .map(|_| format!("simulate CSV ({} bytes) identical at 1, 2 and 8 workers", outputs[0].len()));
    verdict(12, started, Duration::from_secs(60), outcome);
}
