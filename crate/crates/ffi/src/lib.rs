//! C ABI over `circuit_zpf`.
//!
//! Every function returns a [`ZpfStatus`]; results go through out-pointers.
//! On failure a message is available from [`zpf_last_error`] on the same
//! thread until the next call. Networks are opaque handles created by
//! `zpf_network_parse` / `zpf_network_builtin` and released with
//! `zpf_network_free`. Strings returned by the library are released with
//! `zpf_string_free`.

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use circuit_zpf::casimir::{casimir_plasma, PlasmaPlate};
use circuit_zpf::circuit::{BuiltinCircuit, CircuitId, CircuitNetwork};
use circuit_zpf::forces::{force, CapacitorGeometry, ForceMethod, PotentialModel};
use circuit_zpf::qubit::{level_shift, TransmonParams, VoltageSpectrum};
use circuit_zpf::zeropoint::{closed_form, energy_raw, energy_renormalized};
use circuit_zpf::{EnergyError, QuadratureConfig, ValidityParams, ZeroPointConfig};

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ZpfStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidArgument = 2,
    ParseError = 3,
    /// The raw integral diverges; use the renormalized energy.
    RequiresRenormalization = 4,
    NumericalFailure = 5,
    Panic = 6,
}

/// Opaque network handle.
pub struct ZpfNetwork {
    inner: CircuitNetwork,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ZpfConfig {
    pub rel_tol: f64,
    pub abs_tol: f64,
    pub max_panels: usize,
    /// Element size `l` (m) setting the validity cutoff `c/l`.
    pub element_size: f64,
    pub max_tail_fraction: f64,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct ZpfEnergyResult {
    pub energy: f64,
    pub abs_error: f64,
    pub tail_fraction: f64,
    pub time_scale: f64,
    pub decay_exponent: f64,
    pub renormalized: bool,
    pub reference_energy_defined: bool,
    pub validity_ok: bool,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct ZpfForceResult {
    pub force: f64,
    pub capacitance: f64,
    pub tail_fraction: f64,
    pub renormalized: bool,
    pub validity_ok: bool,
}

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_error(msg: &str) {
    let c = CString::new(msg.replace('\0', " ")).expect("no interior nul");
    LAST_ERROR.with(|e| *e.borrow_mut() = Some(c));
}

type Failure = (ZpfStatus, String);

fn fail<T>(status: ZpfStatus, msg: impl Into<String>) -> Result<T, Failure> {
    Err((status, msg.into()))
}

fn numeric(e: impl std::fmt::Display) -> Failure {
    (ZpfStatus::NumericalFailure, e.to_string())
}

fn guard(f: impl FnOnce() -> Result<(), Failure>) -> ZpfStatus {
    LAST_ERROR.with(|e| *e.borrow_mut() = None);
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => ZpfStatus::Ok,
        Ok(Err((status, msg))) => {
            set_error(&msg);
            status
        }
        Err(_) => {
            set_error("internal panic");
            ZpfStatus::Panic
        }
    }
}

unsafe fn str_arg<'a>(p: *const c_char, name: &str) -> Result<&'a str, Failure> {
    if p.is_null() {
        return fail(ZpfStatus::NullPointer, format!("{name} is null"));
    }
    CStr::from_ptr(p)
        .to_str()
        .map_err(|_| (ZpfStatus::InvalidArgument, format!("{name} is not valid UTF-8")))
}

unsafe fn net_arg<'a>(p: *const ZpfNetwork) -> Result<&'a CircuitNetwork, Failure> {
    p.as_ref()
        .map(|n| &n.inner)
        .ok_or_else(|| (ZpfStatus::NullPointer, "network handle is null".into()))
}

unsafe fn write<T>(out: *mut T, v: T, name: &str) -> Result<(), Failure> {
    if out.is_null() {
        return fail(ZpfStatus::NullPointer, format!("{name} is null"));
    }
    out.write(v);
    Ok(())
}

unsafe fn config(cfg: *const ZpfConfig) -> Result<ZeroPointConfig, Failure> {
    let c = match cfg.as_ref() {
        None => return Ok(ZeroPointConfig::default()),
        Some(c) => *c,
    };
    for (name, v) in [
        ("rel_tol", c.rel_tol),
        ("abs_tol", c.abs_tol),
        ("element_size", c.element_size),
        ("max_tail_fraction", c.max_tail_fraction),
    ] {
        if !(v.is_finite() && v > 0.0) {
            return fail(ZpfStatus::InvalidArgument, format!("{name} must be positive, got {v}"));
        }
    }
    if c.max_panels == 0 {
        return fail(ZpfStatus::InvalidArgument, "max_panels must be positive");
    }
    Ok(ZeroPointConfig {
        quad: QuadratureConfig {
            rel_tol: c.rel_tol,
            abs_tol: c.abs_tol,
            max_panels: c.max_panels,
        },
        validity: ValidityParams {
            element_size: c.element_size,
            max_tail_fraction: c.max_tail_fraction,
        },
    })
}

fn builtin(id: &str, r: f64, l: f64, c0: f64, c: f64) -> Result<BuiltinCircuit, Failure> {
    let id: CircuitId = id.parse().map_err(|e: String| (ZpfStatus::InvalidArgument, e))?;
    BuiltinCircuit::from_params(id, &[("R", r), ("L", l), ("C0", c0), ("C", c)])
        .map_err(|e| (ZpfStatus::InvalidArgument, e.to_string()))
}

/// Message of the last failure on this thread, or null. Owned by the library.
#[no_mangle]
pub extern "C" fn zpf_last_error() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ref().map_or(ptr::null(), |s| s.as_ptr()))
}

/// Library version as a static string.
#[no_mangle]
pub extern "C" fn zpf_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr().cast()
}

/// Default numerical settings.
#[no_mangle]
pub extern "C" fn zpf_config_default() -> ZpfConfig {
    let d = ZeroPointConfig::default();
    ZpfConfig {
        rel_tol: d.quad.rel_tol,
        abs_tol: d.quad.abs_tol,
        max_panels: d.quad.max_panels,
        element_size: d.validity.element_size,
        max_tail_fraction: d.validity.max_tail_fraction,
    }
}

/// Parses netlist text into a new handle.
///
/// # Safety
/// `text` must be a nul-terminated string; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn zpf_network_parse(text: *const c_char, out: *mut *mut ZpfNetwork) -> ZpfStatus {
    guard(|| {
        let text = str_arg(text, "text")?;
        let net = circuit_zpf::netlist::parse(text).map_err(|e| (ZpfStatus::ParseError, e.to_string()))?;
        write(out, Box::into_raw(Box::new(ZpfNetwork { inner: net })), "out")
    })
}

/// Built-in circuit `"I"`, `"II"`, `"III"`, `"IV"` or `"parallel-rc"`;
/// parameters the circuit does not use are ignored.
///
/// # Safety
/// `id` must be a nul-terminated string; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn zpf_network_builtin(
    id: *const c_char,
    r: f64,
    l: f64,
    c0: f64,
    c: f64,
    out: *mut *mut ZpfNetwork,
) -> ZpfStatus {
    guard(|| {
        let b = builtin(str_arg(id, "id")?, r, l, c0, c)?;
        write(out, Box::into_raw(Box::new(ZpfNetwork { inner: b.network() })), "out")
    })
}

/// Releases a handle; null is ignored.
///
/// # Safety
/// `net` must come from this library and not be used afterwards.
#[no_mangle]
pub unsafe extern "C" fn zpf_network_free(net: *mut ZpfNetwork) {
    if !net.is_null() {
        drop(Box::from_raw(net));
    }
}

/// Canonical netlist text; release with `zpf_string_free`.
///
/// # Safety
/// `net` must be a live handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn zpf_network_unparse(net: *const ZpfNetwork, out: *mut *mut c_char) -> ZpfStatus {
    guard(|| {
        let text = circuit_zpf::netlist::unparse(net_arg(net)?);
        let c = CString::new(text).map_err(numeric)?;
        write(out, c.into_raw(), "out")
    })
}

/// # Safety
/// `s` must come from this library; null is ignored.
#[no_mangle]
pub unsafe extern "C" fn zpf_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}

/// Changes the value of a named element in place.
///
/// # Safety
/// `net` must be a live handle; `name` a nul-terminated string.
#[no_mangle]
pub unsafe extern "C" fn zpf_network_set_value(net: *mut ZpfNetwork, name: *const c_char, value: f64) -> ZpfStatus {
    guard(|| {
        let name = str_arg(name, "name")?;
        let handle = net
            .as_mut()
            .ok_or_else(|| (ZpfStatus::NullPointer, "network handle is null".to_string()))?;
        handle.inner = handle
            .inner
            .with_value(name, value)
            .map_err(|e| (ZpfStatus::InvalidArgument, e.to_string()))?;
        Ok(())
    })
}

/// Port impedance `Z(ω)` (Ω).
///
/// # Safety
/// `net` must be a live handle; `re` and `im` writable.
#[no_mangle]
pub unsafe extern "C" fn zpf_impedance(net: *const ZpfNetwork, omega: f64, re: *mut f64, im: *mut f64) -> ZpfStatus {
    guard(|| {
        let z = net_arg(net)?.impedance(omega).map_err(|e| (ZpfStatus::InvalidArgument, e.to_string()))?;
        write(re, z.re, "re")?;
        write(im, z.im, "im")
    })
}

/// Zero-point energy of a capacitor `c` (F) across the port. `cfg` may be
/// null for defaults.
///
/// # Safety
/// `net` must be a live handle; `out` writable; `cfg` null or valid.
#[no_mangle]
pub unsafe extern "C" fn zpf_energy(
    net: *const ZpfNetwork,
    c: f64,
    renormalize: bool,
    cfg: *const ZpfConfig,
    out: *mut ZpfEnergyResult,
) -> ZpfStatus {
    guard(|| {
        let net = net_arg(net)?;
        let cfg = config(cfg)?;
        let res = if renormalize {
            energy_renormalized(net, c, &cfg)
        } else {
            energy_raw(net, c, &cfg)
        }
        .map_err(|e| {
            let status = match e {
                EnergyError::RequiresRenormalization { .. } => ZpfStatus::RequiresRenormalization,
                EnergyError::InvalidCapacitance(_) | EnergyError::InvalidParameter(_) => ZpfStatus::InvalidArgument,
                _ => ZpfStatus::NumericalFailure,
            };
            (status, e.to_string())
        })?;
        write(
            out,
            ZpfEnergyResult {
                energy: res.energy,
                abs_error: res.abs_error_estimate,
                tail_fraction: res.tail_fraction_beyond_cutoff,
                time_scale: res.time_scale,
                decay_exponent: res.decay_exponent,
                renormalized: res.renormalized,
                reference_energy_defined: res.reference_energy_defined,
                validity_ok: res.validity_ok,
            },
            "out",
        )
    })
}

/// Force (N) between parallel plates of area `area` (m²) at separation `y`
/// (m); positive is repulsive.
///
/// # Safety
/// `net` must be a live handle; `out` writable; `cfg` null or valid.
#[no_mangle]
pub unsafe extern "C" fn zpf_force_parallel_plate(
    net: *const ZpfNetwork,
    area: f64,
    y: f64,
    cfg: *const ZpfConfig,
    out: *mut ZpfForceResult,
) -> ZpfStatus {
    guard(|| {
        let model = PotentialModel::Network(net_arg(net)?.clone());
        let cfg = config(cfg)?;
        let geom = CapacitorGeometry::parallel_plate_area(area).map_err(|e| (ZpfStatus::InvalidArgument, e.to_string()))?;
        let p = force(&model, &geom, y, ForceMethod::Analytic, &cfg).map_err(numeric)?;
        write(
            out,
            ZpfForceResult {
                force: p.force,
                capacitance: p.capacitance,
                tail_fraction: p.tail_fraction,
                renormalized: p.renormalized,
                validity_ok: p.validity_ok,
            },
            "out",
        )
    })
}

/// Closed-form renormalized energy of a built-in circuit with probed
/// capacitance `c`.
///
/// # Safety
/// `id` must be a nul-terminated string; `out` writable.
#[no_mangle]
pub unsafe extern "C" fn zpf_closed_form(
    id: *const c_char,
    r: f64,
    l: f64,
    c0: f64,
    c: f64,
    out: *mut f64,
) -> ZpfStatus {
    guard(|| {
        let b = builtin(str_arg(id, "id")?, r, l, c0, 1.0)?;
        let u = closed_form(&b, c, &QuadratureConfig::default())
            .ok_or_else(|| (ZpfStatus::InvalidArgument, format!("no closed form for circuit {}", b.id())))?
            .map_err(|e| (ZpfStatus::InvalidArgument, e.to_string()))?;
        write(out, u, "out")
    })
}

/// Plasma-model Casimir force (N, negative = attractive).
///
/// # Safety
/// `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn zpf_casimir_plasma(area: f64, y: f64, lambda_p: f64, out: *mut f64) -> ZpfStatus {
    guard(|| {
        let plate = PlasmaPlate { lambda_p, area, y };
        let f = casimir_plasma(&plate, &QuadratureConfig::default()).map_err(|e| {
            let status = match e {
                circuit_zpf::casimir::CasimirError::InvalidPlate(_) => ZpfStatus::InvalidArgument,
                _ => ZpfStatus::NumericalFailure,
            };
            (status, e.to_string())
        })?;
        write(out, f, "out")
    })
}

/// Shift `δ` and width `γ` (rad/s) of the 0→1 transition of a transmon with
/// `ω0` (rad/s), `√(E_C/8E_J) = ratio` and coupling `β`, across a parallel RC.
///
/// # Safety
/// `delta` and `gamma` must be writable.
#[no_mangle]
pub unsafe extern "C" fn zpf_level_shift_parallel_rc(
    omega0: f64,
    ratio: f64,
    beta: f64,
    r: f64,
    c: f64,
    delta: *mut f64,
    gamma: *mut f64,
) -> ZpfStatus {
    guard(|| {
        let tp = TransmonParams::from_ratio(omega0, ratio, beta).map_err(|e| (ZpfStatus::InvalidArgument, e.to_string()))?;
        if !(r.is_finite() && r > 0.0 && c.is_finite() && c > 0.0) {
            return fail(ZpfStatus::InvalidArgument, "R and C must be positive");
        }
        let ls = level_shift(&tp, &VoltageSpectrum::parallel_rc(r, c), &QuadratureConfig::default()).map_err(numeric)?;
        write(delta, ls.delta, "delta")?;
        write(gamma, ls.gamma, "gamma")
    })
}
