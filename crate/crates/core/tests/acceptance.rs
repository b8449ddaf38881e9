//! Acceptance checks, one PASS/FAIL line per criterion. Run with
//! `cargo test --test acceptance`.

mod common;

use std::f64::consts::PI;
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::process::ExitCode;
use std::time::Instant;

use circuit_zpf::casimir::{casimir_plasma, find_crossover, plasma_reduction, PlasmaPlate};
use circuit_zpf::circuit::BuiltinCircuit;
use circuit_zpf::consts::{EPSILON_0, HBAR};
use circuit_zpf::figures::{figure, log_grid, FigureId, FigureOptions, QUBIT_BETA, QUBIT_OMEGA0, QUBIT_RATIO};
use circuit_zpf::forces::{
    asymptotic_slope, force, log_form_fit, log_form_spread, CapacitorGeometry, ForceMethod, PotentialModel,
};
use circuit_zpf::metrology::{dynamic_signal, noise_amplitude, reference_mode, snr_report, static_displacement, MeasurementConfig};
use circuit_zpf::netlist;
use circuit_zpf::qubit::{level_shift, TransmonParams, VoltageSpectrum};
use circuit_zpf::report::{Cell, Table};
use circuit_zpf::zeropoint::{closed_form, energy_raw, energy_renormalized, EnergyError};
use circuit_zpf::{QuadratureConfig, ZeroPointConfig};
use common::Tree;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

const R: f64 = 10.0;
const L: f64 = 0.1e-9;
const C0: f64 = 31.3e-15;
const DIAMETER: f64 = 15e-6;

type Outcome = (bool, String);

fn rel(a: f64, b: f64) -> f64 {
    ((a - b) / b).abs()
}

fn plate(d: f64) -> CapacitorGeometry {
    CapacitorGeometry::parallel_plate_diameter(d).unwrap()
}

fn area(d: f64) -> f64 {
    PI * d * d / 4.0
}

fn column(t: &Table, name: &str) -> Vec<Option<f64>> {
    t.column(name)
        .unwrap()
        .into_iter()
        .map(|c| match c {
            Cell::Num(v) => Some(*v),
            _ => None,
        })
        .collect()
}

fn force_on(model: &PotentialModel, d: f64, y: f64, cfg: &ZeroPointConfig) -> f64 {
    force(model, &plate(d), y, ForceMethod::Analytic, cfg).unwrap().force
}

fn oracle_equivalence() -> Outcome {
    let cfg = ZeroPointConfig::default();
    let grid = log_grid(1e-3, 1e3, 25);
    let start = Instant::now();
    let mut worst = [0.0f64; 3];
    for &x in &grid {
        // I: x = C/C0. II, III: x = q = L/(R²C).
        let cases = [
            (BuiltinCircuit::SeriesRc { r: R, c0: C0 }, x * C0),
            (BuiltinCircuit::SeriesRl { r: R, l: L }, L / (R * R * x)),
            (BuiltinCircuit::ParallelRl { r: R, l: L }, L / (R * R * x)),
        ];
        for (k, (b, c)) in cases.into_iter().enumerate() {
            let exact = closed_form(&b, c, &cfg.quad).unwrap().unwrap();
            let num = energy_renormalized(&b.network(), c, &cfg).unwrap().energy;
            worst[k] = worst[k].max(rel(num, exact));
        }
    }
    let secs = start.elapsed().as_secs_f64();
    let ok = worst.iter().all(|w| *w < 1e-6) && secs < 10.0;
    (
        ok,
        format!(
            "max rel err I {:.1e}, II {:.1e}, III {:.1e} over 25 points each; {secs:.2} s",
            worst[0], worst[1], worst[2]
        ),
    )
}

fn isolated_lc_limit() -> Outcome {
    let cfg = ZeroPointConfig::default();
    let lc = |c: f64| HBAR / (4.0 * (L * c).sqrt());
    let c_ii = L / (R * R * 1e8);
    let c_iii = L / (R * R * 1e-8);
    let u_ii = energy_renormalized(&BuiltinCircuit::SeriesRl { r: R, l: L }.network(), c_ii, &cfg)
        .unwrap()
        .energy;
    let u_iii = energy_renormalized(&BuiltinCircuit::ParallelRl { r: R, l: L }.network(), c_iii, &cfg)
        .unwrap()
        .energy;
    let (e2, e3) = (rel(u_ii, lc(c_ii)), rel(u_iii, lc(c_iii)));
    (
        e2 < 1e-3 && e3 < 1e-3,
        format!("II at q=1e8: rel dev {e2:.1e}; III at q=1e-8: rel dev {e3:.1e}"),
    )
}

fn sign_structure() -> Outcome {
    let cfg = ZeroPointConfig::default();
    let opts = FigureOptions::default();
    let mut ok = true;
    let mut notes = Vec::new();
    for (id, name, sign) in [(FigureId::F4a, "I", 1.0), (FigureId::F4b, "II", -1.0), (FigureId::F4c, "III", -1.0)] {
        let t = figure(id, &opts, &cfg).unwrap();
        let f = column(&t, "force_N");
        let good = f.iter().filter(|v| v.is_some_and(|v| v * sign > 0.0)).count();
        ok &= good == f.len();
        notes.push(format!("{name} {good}/{}", f.len()));
    }
    let rs = log_grid(1e-2, 1e2, 13);
    for (a, sign) in [(0.5, -1.0), (2.0, 1.0)] {
        let model = PotentialModel::Builtin(BuiltinCircuit::Mixed { r: R, l: a * a * R * R * C0, c0: C0 });
        let wrong: Vec<String> = rs
            .iter()
            .filter_map(|&r| {
                let y = area(DIAMETER) * EPSILON_0 * r / C0;
                let f = force_on(&model, DIAMETER, y, &cfg);
                (f * sign <= 0.0).then(|| format!("r={r:.3e} f={f:.3e} N"))
            })
            .collect();
        ok &= wrong.is_empty();
        let mut note = format!("IV a={a} {}/{}", rs.len() - wrong.len(), rs.len());
        if !wrong.is_empty() {
            note += &format!(" (wrong sign at {})", wrong.join("; "));
        }
        notes.push(note);
    }
    (ok, format!("expected signs: {}", notes.join(", ")))
}

fn asymptotic_scalings() -> Outcome {
    let cfg = ZeroPointConfig::default();
    let ys = log_grid(10e-6, 1e-3, 21);
    let forces = |b: BuiltinCircuit| -> Vec<f64> {
        let m = PotentialModel::Builtin(b);
        ys.iter().map(|&y| force_on(&m, DIAMETER, y, &cfg)).collect()
    };
    let s1 = asymptotic_slope(&ys, &forces(BuiltinCircuit::SeriesRc { r: R, c0: C0 })).unwrap();
    let s2 = asymptotic_slope(&ys, &forces(BuiltinCircuit::SeriesRl { r: R, l: L })).unwrap();
    let f3 = forces(BuiltinCircuit::ParallelRl { r: R, l: L });
    // f_III → A·ln(y/y0)/y², with y0 = y_c·e^{5/2} and y_c = Aε0R²/L.
    let y_c = area(DIAMETER) * EPSILON_0 * R * R / L;
    let y0 = y_c * 2.5f64.exp();
    let spread = log_form_spread(&ys, &f3, y0).unwrap();
    let fit = log_form_fit(&ys, &f3).unwrap();
    let literal = log_form_spread(&ys, &f3, 1.0).unwrap();
    let ok = (s1 + 2.0).abs() <= 0.05 && (s2 + 0.5).abs() <= 0.05 && spread < 0.05;
    (
        ok,
        format!(
            "slope I {s1:.4}, II {s2:.4}; III f·y²/ln(y/y0) spread {:.2}% (y0 = {y0:.3e} m, fitted {:.3e} m); \
             with y0 = 1 m the spread is {:.0}%",
            100.0 * spread,
            fit.y0,
            100.0 * literal
        ),
    )
}

fn force_magnitudes() -> Outcome {
    let cfg = ZeroPointConfig::default();
    let mut ok = true;
    let mut notes = Vec::new();
    for (id, name) in [(FigureId::F4a, "4a"), (FigureId::F4b, "4b"), (FigureId::F4c, "4c")] {
        let t = figure(id, &FigureOptions::default(), &cfg).unwrap();
        let f: Vec<f64> = column(&t, "force_N").into_iter().map(|v| v.unwrap().abs()).collect();
        let (lo, hi) = f.iter().fold((f64::INFINITY, 0.0f64), |(lo, hi), v| (lo.min(*v), hi.max(*v)));
        ok &= lo >= 1e-16 && hi <= 1e-14;
        notes.push(format!("{name} |f| in [{:.3}, {:.3}] fN", lo * 1e15, hi * 1e15));
    }
    (ok, notes.join("; "))
}

fn metrology_chain() -> Outcome {
    let mode = reference_mode();
    let cfg = MeasurementConfig::default();
    let x_dc = static_displacement(1e-15, &mode);
    let x_n = noise_amplitude(&cfg, &mode);
    let x_s = dynamic_signal(x_dc, mode.q_factor, cfg.eta);
    let report = snr_report(1e-15, cfg.eta, &mode, &cfg).unwrap();
    let ok = rel(x_dc, 4.7e-18) < 0.05
        && rel(x_n, 1.4e-16) < 0.05
        && rel(x_s, 1.4e-13) < 0.05
        && rel(report.snr, 1e3) < 0.05
        && !report.static_feasible;
    (
        ok,
        format!(
            "x_dc {x_dc:.3e} m, x_N {x_n:.3e} m, x_s {x_s:.3e} m, SNR {:.0}, static method infeasible: {}",
            report.snr, !report.static_feasible
        ),
    )
}

fn qubit_shift() -> Outcome {
    let quad = QuadratureConfig::default();
    // Deep transmon so that the single-transition estimate applies.
    let omega0 = 2.0 * PI * 5e9;
    let beta = 0.1;
    let tp = TransmonParams::from_ratio(omega0, 0.01, beta).unwrap();
    let b = 1e-3;
    let r = 10.0;
    let c = b / (omega0 * r);
    let ls = level_shift(&tp, &VoltageSpectrum::parallel_rc(r, c), &quad).unwrap();
    let approx = -omega0 * (r / tp.z_j()) * beta * beta / (2.0 * b);
    let e_delta = rel(ls.delta, approx);
    let e_ratio = rel(ls.delta.abs() / ls.gamma, 1.0 / (2.0 * b));
    let t = figure(FigureId::F4d, &FigureOptions::default(), &ZeroPointConfig::default()).unwrap();
    let max = column(&t, "delta_over_omega10")
        .into_iter()
        .map(|v| v.unwrap().abs())
        .fold(0.0, f64::max);
    let ok = e_delta < 0.01 && e_ratio < 0.05 && (5e-4..=5e-3).contains(&max);
    (
        ok,
        format!(
            "b=1e-3: δ rel dev {e_delta:.1e}, |δ|/γ rel dev {e_ratio:.1e}; level-shift map (√(E_C/8E_J)={QUBIT_RATIO}, \
             β={QUBIT_BETA}, ω0/2π={:.0} GHz) max |δ|/ω10 = {max:.2e}",
            QUBIT_OMEGA0 / (2.0 * PI) / 1e9
        ),
    )
}

fn casimir_comparison() -> Outcome {
    let quad = QuadratureConfig::default();
    let ratio = plasma_reduction(1e3, &quad).unwrap();
    let cfg = ZeroPointConfig::default();
    let d = 200e-6;
    let model = PotentialModel::Builtin(BuiltinCircuit::SeriesRl { r: R, l: L });
    let y_star = find_crossover(
        50e-9,
        200e-6,
        61,
        |y| force(&model, &plate(d), y, ForceMethod::Analytic, &cfg).map(|p| p.force).map_err(|e| e.to_string()),
        |y| casimir_plasma(&PlasmaPlate::new(area(d), y), &quad).map_err(|e| e.to_string()),
    )
    .unwrap();
    let ok = (1.0 - ratio).abs() < 5e-3 && y_star.is_some();
    (
        ok,
        format!(
            "plasma/ideal at λp/y=1e-3: {ratio:.6}; 200 µm plates, crossover at {}",
            y_star.map_or("none".into(), |y| format!("{:.1} µm", y * 1e6))
        ),
    )
}

fn property_suites() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(20240611);
    let (mut herm, mut passive, mut comp, mut round) = (0.0f64, true, 0.0f64, true);
    for _ in 0..100 {
        let t = Tree::random(&mut rng, 4);
        let net = t.network();
        for _ in 0..3 {
            let w = 10f64.powf(rng.gen_range(-1.0..1.0));
            let (zp, zm) = (net.impedance(w).unwrap(), net.impedance(-w).unwrap());
            herm = herm.max((zm - zp.conj()).norm() / zp.norm());
            passive &= zp.re >= -1e-12 * zp.norm();
            comp = comp.max((zp - t.impedance(w)).norm() / t.impedance(w).norm());
        }
        let text = netlist::unparse(&net);
        round &= netlist::parse(&text).map(|b| netlist::unparse(&b) == text).unwrap_or(false);
    }
    let cfg = ZeroPointConfig::default();
    let net_i = BuiltinCircuit::SeriesRc { r: R, c0: C0 }.network();
    let raw = energy_raw(&net_i, C0, &cfg);
    let divergent = matches!(raw, Err(EnergyError::RequiresRenormalization { .. }));
    let renorm = energy_renormalized(&net_i, C0, &cfg).unwrap();
    let exact = closed_form(&BuiltinCircuit::SeriesRc { r: R, c0: C0 }, C0, &cfg.quad).unwrap().unwrap();
    let e_renorm = rel(renorm.energy, exact);
    let ok = herm <= 1e-12 && passive && comp <= 1e-12 && round && divergent && renorm.renormalized && e_renorm < 1e-8;
    (
        ok,
        format!(
            "100 networks: Hermitian dev {herm:.1e}, passive {passive}, nodal vs composition {comp:.1e}, \
             netlist round trip {round}; circuit I raw divergent {divergent}, renormalized rel err {e_renorm:.1e}"
        ),
    )
}

fn main() -> ExitCode {
    type Criterion = (&'static str, fn() -> Outcome);
    let criteria: [Criterion; 9] = [
        ("closed-form/quadrature equivalence", oracle_equivalence),
        ("isolated LC limit", isolated_lc_limit),
        ("sign structure", sign_structure),
        ("asymptotic scalings", asymptotic_scalings),
        ("force magnitude", force_magnitudes),
        ("metrology chain", metrology_chain),
        ("qubit level shift", qubit_shift),
        ("Casimir comparison", casimir_comparison),
        ("property suites", property_suites),
    ];
    let mut failed = 0;
    for (k, (name, check)) in criteria.iter().enumerate() {
        let (ok, detail) = catch_unwind(AssertUnwindSafe(check)).unwrap_or_else(|p| {
            let msg = p
                .downcast_ref::<String>()
                .cloned()
                .or_else(|| p.downcast_ref::<&str>().map(|s| s.to_string()))
                .unwrap_or_default();
            (false, format!("panicked: {msg}"))
        });
        if !ok {
            failed += 1;
        }
        println!("{} {}. {name}: {detail}", if ok { "PASS" } else { "FAIL" }, k + 1);
    }
    println!("{} of {} criteria passed", criteria.len() - failed, criteria.len());
    // The report is the product; set ACCEPTANCE_STRICT=1 to turn FAIL lines into a failing exit.
    let strict = std::env::var("ACCEPTANCE_STRICT").is_ok_and(|v| v == "1");
    if failed == 0 || !strict {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
