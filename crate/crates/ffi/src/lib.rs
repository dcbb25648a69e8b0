//! C interface to `pcond`.
//!
//! Objects cross the boundary as opaque handles created by `pcond_*_new`
//! style functions and released by the matching `pcond_*_free`. Every
//! function returns a [`PcondStatus`]; on failure a human-readable message
//! is available from [`pcond_last_error`] on the same thread. Panics are
//! caught and reported as [`PcondStatus::Panic`].

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::path::Path;
use std::ptr;

use pcond::domain::{build_rect_mesh_at, BoundaryTrace, Conductivity, ConductivityField, Mesh2D, SolverConfig};
use pcond::enclosure::{EstimateStatus, Enclosure};
use pcond::wolff::{integrate_wave, ProbeParams, WolffWave};
use pcond::Error;

/// Result of every call.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PcondStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidArgument = 2,
    InvalidExponent = 3,
    InvalidMesh = 4,
    InvalidField = 5,
    SolverFailure = 6,
    NotConverged = 7,
    UnresolvedProbe = 8,
    Reconstruction = 9,
    Scenario = 10,
    Io = 11,
    Panic = 12,
}

/// Kind of a conductivity value.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PcondConductivityKind {
    Finite = 0,
    Zero = 1,
    Infinite = 2,
}

/// Outcome of a support estimate.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PcondEstimateStatus {
    Conclusive = 0,
    BelowNoiseFloor = 1,
    MixedSigns = 2,
    NonMonotone = 3,
}

/// Triangulated domain.
pub struct PcondMesh(Mesh2D);

/// Per-triangle conductivity bound to the mesh it was created on.
pub struct PcondField {
    values: ConductivityField,
    num_triangles: usize,
}

/// Periodic Wolff profile for a fixed `p`.
pub struct PcondWave(WolffWave);

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_error(msg: String) {
    let c = CString::new(msg.replace('\0', " ")).unwrap_or_default();
    LAST_ERROR.with(|e| *e.borrow_mut() = Some(c));
}

fn status_of(err: &Error) -> PcondStatus {
    match err {
        Error::InvalidExponent(_) => PcondStatus::InvalidExponent,
        Error::InvalidMesh(_) => PcondStatus::InvalidMesh,
        Error::InvalidField(_) => PcondStatus::InvalidField,
        Error::InvalidArgument(_) | Error::Integration(_) => PcondStatus::InvalidArgument,
        Error::Solver(_) => PcondStatus::SolverFailure,
        Error::NotConverged(_) => PcondStatus::NotConverged,
        Error::UnresolvedProbe(_) => PcondStatus::UnresolvedProbe,
        Error::Reconstruction(_) => PcondStatus::Reconstruction,
        Error::Scenario(_) => PcondStatus::Scenario,
        Error::Io(_) | Error::Json(_) | Error::Csv(_) => PcondStatus::Io,
    }
}

struct Failure(PcondStatus, String);

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure(status_of(&e), e.to_string())
    }
}

fn null(name: &str) -> Failure {
    Failure(PcondStatus::NullPointer, format!("{name} is null"))
}

fn bad(msg: impl Into<String>) -> Failure {
    Failure(PcondStatus::InvalidArgument, msg.into())
}

fn guard(f: impl FnOnce() -> Result<(), Failure>) -> PcondStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => {
            LAST_ERROR.with(|e| *e.borrow_mut() = None);
            PcondStatus::Ok
        }
        Ok(Err(Failure(status, msg))) => {
            set_error(msg);
            status
        }
        Err(panic) => {
            let msg = panic
                .downcast_ref::<&str>()
                .map(|s| s.to_string())
                .or_else(|| panic.downcast_ref::<String>().cloned())
                .unwrap_or_else(|| "unknown panic".into());
            set_error(format!("internal panic: {msg}"));
            PcondStatus::Panic
        }
    }
}

unsafe fn as_ref<'a, T>(p: *const T, name: &str) -> Result<&'a T, Failure> {
    p.as_ref().ok_or_else(|| null(name))
}

unsafe fn slice<'a, T>(p: *const T, len: usize, name: &str) -> Result<&'a [T], Failure> {
    if len == 0 {
        return Ok(&[]);
    }
    if p.is_null() {
        return Err(null(name));
    }
    Ok(std::slice::from_raw_parts(p, len))
}

unsafe fn slice_mut<'a, T>(p: *mut T, len: usize, name: &str) -> Result<&'a mut [T], Failure> {
    if len == 0 {
        return Ok(&mut []);
    }
    if p.is_null() {
        return Err(null(name));
    }
    Ok(std::slice::from_raw_parts_mut(p, len))
}

unsafe fn write<T>(p: *mut T, value: T, name: &str) -> Result<(), Failure> {
    if p.is_null() {
        return Err(null(name));
    }
    p.write(value);
    Ok(())
}

fn conductivity(kind: PcondConductivityKind, value: f64) -> Result<Conductivity, Failure> {
    Ok(match kind {
        PcondConductivityKind::Finite => Conductivity::finite(value)?,
        PcondConductivityKind::Zero => Conductivity::Zero,
        PcondConductivityKind::Infinite => Conductivity::Infinite,
    })
}

fn field_for<'a>(mesh: &PcondMesh, field: &'a PcondField) -> Result<&'a ConductivityField, Failure> {
    if field.num_triangles != mesh.0.num_triangles() {
        return Err(bad("field was created for a different mesh"));
    }
    Ok(&field.values)
}

/// Message describing the last failed call on this thread, or NULL. The
/// pointer stays valid until the next call into the library on this thread.
#[no_mangle]
pub extern "C" fn pcond_last_error() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ref().map_or(ptr::null(), |c| c.as_ptr()))
}

/// Library version as a static NUL-terminated string.
#[no_mangle]
pub extern "C" fn pcond_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr().cast()
}

/// Uniform `nx × ny` grid on `[x0, x0 + width] × [y0, y0 + height]`.
///
/// # Safety
/// `out` must be a valid pointer to writable storage for one handle.
#[no_mangle]
pub unsafe extern "C" fn pcond_mesh_rect(
    x0: f64,
    y0: f64,
    nx: usize,
    ny: usize,
    width: f64,
    height: f64,
    out: *mut *mut PcondMesh,
) -> PcondStatus {
    guard(|| {
        let mesh = build_rect_mesh_at([x0, y0], nx, ny, width, height)?;
        write(out, Box::into_raw(Box::new(PcondMesh(mesh))), "out")
    })
}

/// # Safety
/// `mesh` must be NULL or a handle from `pcond_mesh_rect` not yet freed.
#[no_mangle]
pub unsafe extern "C" fn pcond_mesh_free(mesh: *mut PcondMesh) {
    if !mesh.is_null() {
        drop(Box::from_raw(mesh));
    }
}

/// Writes the vertex, triangle and boundary-vertex counts.
///
/// # Safety
/// `mesh` must be a live handle; output pointers must be writable.
#[no_mangle]
pub unsafe extern "C" fn pcond_mesh_sizes(
    mesh: *const PcondMesh,
    num_vertices: *mut usize,
    num_triangles: *mut usize,
    num_boundary: *mut usize,
) -> PcondStatus {
    guard(|| {
        let m = &as_ref(mesh, "mesh")?.0;
        write(num_vertices, m.num_vertices(), "num_vertices")?;
        write(num_triangles, m.num_triangles(), "num_triangles")?;
        write(num_boundary, m.boundary_vertices().len(), "num_boundary")
    })
}

/// Copies vertex coordinates as interleaved `x, y` pairs into `xy`, which
/// must hold `2 * num_vertices` doubles.
///
/// # Safety
/// `mesh` must be a live handle and `xy` must point to `len` writable doubles.
#[no_mangle]
pub unsafe extern "C" fn pcond_mesh_vertices(mesh: *const PcondMesh, xy: *mut f64, len: usize) -> PcondStatus {
    guard(|| {
        let m = &as_ref(mesh, "mesh")?.0;
        if len != 2 * m.num_vertices() {
            return Err(bad(format!("expected {} doubles, got {len}", 2 * m.num_vertices())));
        }
        let out = slice_mut(xy, len, "xy")?;
        for (dst, v) in out.chunks_exact_mut(2).zip(m.vertices()) {
            dst.copy_from_slice(v);
        }
        Ok(())
    })
}

/// Copies boundary vertex indices (the order boundary data must follow).
///
/// # Safety
/// `mesh` must be a live handle and `idx` must point to `len` writable slots.
#[no_mangle]
pub unsafe extern "C" fn pcond_mesh_boundary_vertices(
    mesh: *const PcondMesh,
    idx: *mut usize,
    len: usize,
) -> PcondStatus {
    guard(|| {
        let m = &as_ref(mesh, "mesh")?.0;
        if len != m.boundary_vertices().len() {
            return Err(bad(format!("expected {} slots, got {len}", m.boundary_vertices().len())));
        }
        slice_mut(idx, len, "idx")?.copy_from_slice(m.boundary_vertices());
        Ok(())
    })
}

/// Constant finite conductivity on every triangle of `mesh`.
///
/// # Safety
/// `mesh` must be a live handle and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn pcond_field_uniform(
    mesh: *const PcondMesh,
    value: f64,
    out: *mut *mut PcondField,
) -> PcondStatus {
    guard(|| {
        let m = &as_ref(mesh, "mesh")?.0;
        let values = ConductivityField::uniform(m, value)?;
        let field = PcondField { values, num_triangles: m.num_triangles() };
        write(out, Box::into_raw(Box::new(field)), "out")
    })
}

/// Sets every triangle whose centroid lies in the open disk to the value.
///
/// # Safety
/// `mesh` and `field` must be live handles, `field` created from `mesh`.
#[no_mangle]
pub unsafe extern "C" fn pcond_field_set_disk(
    field: *mut PcondField,
    mesh: *const PcondMesh,
    cx: f64,
    cy: f64,
    radius: f64,
    kind: PcondConductivityKind,
    value: f64,
) -> PcondStatus {
    guard(|| {
        let m = as_ref(mesh, "mesh")?;
        let f = field.as_mut().ok_or_else(|| null("field"))?;
        field_for(m, f)?;
        let c = conductivity(kind, value)?;
        f.values = f.values.clone().with_region(&m.0, |x| (x[0] - cx).hypot(x[1] - cy) < radius, c)?;
        Ok(())
    })
}

/// Sets every triangle whose centroid lies in the open box to the value.
///
/// # Safety
/// `mesh` and `field` must be live handles, `field` created from `mesh`.
#[no_mangle]
pub unsafe extern "C" fn pcond_field_set_box(
    field: *mut PcondField,
    mesh: *const PcondMesh,
    xmin: f64,
    ymin: f64,
    xmax: f64,
    ymax: f64,
    kind: PcondConductivityKind,
    value: f64,
) -> PcondStatus {
    guard(|| {
        let m = as_ref(mesh, "mesh")?;
        let f = field.as_mut().ok_or_else(|| null("field"))?;
        field_for(m, f)?;
        let c = conductivity(kind, value)?;
        let inside = |x: [f64; 2]| x[0] > xmin && x[0] < xmax && x[1] > ymin && x[1] < ymax;
        f.values = f.values.clone().with_region(&m.0, inside, c)?;
        Ok(())
    })
}

/// # Safety
/// `field` must be NULL or a live handle.
#[no_mangle]
pub unsafe extern "C" fn pcond_field_free(field: *mut PcondField) {
    if !field.is_null() {
        drop(Box::from_raw(field));
    }
}

unsafe fn trace(m: &Mesh2D, values: *const f64, len: usize, name: &str) -> Result<BoundaryTrace, Failure> {
    Ok(BoundaryTrace::new(m, slice(values, len, name)?.to_vec())?)
}

/// Solves the Dirichlet problem with boundary values `f` (one per boundary
/// vertex). Writes all vertex values and the energy.
///
/// # Safety
/// Handles must be live; `f` must hold `num_boundary` doubles and `u`
/// `num_vertices` writable doubles; `energy` may be NULL.
#[no_mangle]
pub unsafe extern "C" fn pcond_solve(
    mesh: *const PcondMesh,
    field: *const PcondField,
    p: f64,
    f: *const f64,
    num_boundary: usize,
    u: *mut f64,
    num_vertices: usize,
    energy: *mut f64,
) -> PcondStatus {
    guard(|| {
        let m = as_ref(mesh, "mesh")?;
        let sigma = field_for(m, as_ref(field, "field")?)?;
        if num_vertices != m.0.num_vertices() {
            return Err(bad(format!("u must hold {} doubles", m.0.num_vertices())));
        }
        let data = trace(&m.0, f, num_boundary, "f")?;
        let (sol, _) = pcond::solver::solve(&m.0, sigma, &data, &SolverConfig::new(p)?)?;
        slice_mut(u, num_vertices, "u")?.copy_from_slice(&sol.vertex_values);
        if !energy.is_null() {
            energy.write(sol.energy);
        }
        Ok(())
    })
}

/// Weak Dirichlet-to-Neumann pairing `⟨Λ f, g⟩`.
///
/// # Safety
/// Handles must be live; `f` and `g` must each hold `num_boundary` doubles.
#[no_mangle]
pub unsafe extern "C" fn pcond_dn_pairing(
    mesh: *const PcondMesh,
    field: *const PcondField,
    p: f64,
    f: *const f64,
    g: *const f64,
    num_boundary: usize,
    out: *mut f64,
) -> PcondStatus {
    guard(|| {
        let m = as_ref(mesh, "mesh")?;
        let sigma = field_for(m, as_ref(field, "field")?)?;
        let fd = trace(&m.0, f, num_boundary, "f")?;
        let gd = trace(&m.0, g, num_boundary, "g")?;
        let pairing = pcond::dnmap::weak_dn(&m.0, sigma, &fd, &gd, &SolverConfig::new(p)?)?;
        write(out, pairing.value, "out")
    })
}

/// Integrates the Wolff profile through `(w, w') = (a0, b0)`.
///
/// # Safety
/// `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn pcond_wave_new(p: f64, a0: f64, b0: f64, out: *mut *mut PcondWave) -> PcondStatus {
    guard(|| {
        let wave = integrate_wave(p, a0, b0)?;
        write(out, Box::into_raw(Box::new(PcondWave(wave))), "out")
    })
}

/// # Safety
/// `wave` must be a live handle; `period` writable.
#[no_mangle]
pub unsafe extern "C" fn pcond_wave_period(wave: *const PcondWave, period: *mut f64) -> PcondStatus {
    guard(|| write(period, as_ref(wave, "wave")?.0.period(), "period"))
}

/// `(w(s), w'(s))`.
///
/// # Safety
/// `wave` must be a live handle; `w` and `dw` writable.
#[no_mangle]
pub unsafe extern "C" fn pcond_wave_eval(wave: *const PcondWave, s: f64, w: *mut f64, dw: *mut f64) -> PcondStatus {
    guard(|| {
        let (a, b) = as_ref(wave, "wave")?.0.eval(s);
        write(w, a, "w")?;
        write(dw, b, "dw")
    })
}

/// # Safety
/// `wave` must be NULL or a live handle.
#[no_mangle]
pub unsafe extern "C" fn pcond_wave_free(wave: *mut PcondWave) {
    if !wave.is_null() {
        drop(Box::from_raw(wave));
    }
}

unsafe fn enclosure<'a>(
    mesh: *const PcondMesh,
    field: *const PcondField,
    wave: *const PcondWave,
) -> Result<Enclosure<'a>, Failure> {
    let m = as_ref(mesh, "mesh")?;
    let sigma = field_for(m, as_ref(field, "field")?)?;
    let w = &as_ref(wave, "wave")?.0;
    Ok(Enclosure::new(&m.0, sigma, w.clone(), SolverConfig::new(w.p())?)?)
}

/// Indicator value for direction `(rho_x, rho_y)` (normalised internally),
/// offset `t` and decay `tau`.
///
/// # Safety
/// Handles must be live; `out` writable.
#[no_mangle]
pub unsafe extern "C" fn pcond_indicator(
    mesh: *const PcondMesh,
    field: *const PcondField,
    wave: *const PcondWave,
    rho_x: f64,
    rho_y: f64,
    t: f64,
    tau: f64,
    out: *mut f64,
) -> PcondStatus {
    guard(|| {
        let enc = enclosure(mesh, field, wave)?;
        let n = rho_x.hypot(rho_y);
        if !(n > 0.0 && n.is_finite()) {
            return Err(bad("direction must be nonzero"));
        }
        let rho = [rho_x / n, rho_y / n];
        let probe = ProbeParams::new(rho, [-rho[1], rho[0]], t, tau)?;
        write(out, enc.indicator(&probe)?.value, "out")
    })
}

/// Support estimate along `(rho_x, rho_y)` from the increasing `tau` grid.
/// `h` and `h_outer` are NaN unless `status` is conclusive.
///
/// # Safety
/// Handles must be live; `taus` must hold `num_tau` doubles; outputs writable.
#[no_mangle]
pub unsafe extern "C" fn pcond_support_estimate(
    mesh: *const PcondMesh,
    field: *const PcondField,
    wave: *const PcondWave,
    rho_x: f64,
    rho_y: f64,
    taus: *const f64,
    num_tau: usize,
    status: *mut PcondEstimateStatus,
    h: *mut f64,
    h_outer: *mut f64,
) -> PcondStatus {
    guard(|| {
        let enc = enclosure(mesh, field, wave)?;
        let n = rho_x.hypot(rho_y);
        if !(n > 0.0 && n.is_finite()) {
            return Err(bad("direction must be nonzero"));
        }
        let est = enc.support_estimate([rho_x / n, rho_y / n], slice(taus, num_tau, "taus")?)?;
        let s = match est.status {
            EstimateStatus::Conclusive => PcondEstimateStatus::Conclusive,
            EstimateStatus::BelowNoiseFloor => PcondEstimateStatus::BelowNoiseFloor,
            EstimateStatus::MixedSigns => PcondEstimateStatus::MixedSigns,
            EstimateStatus::NonMonotone => PcondEstimateStatus::NonMonotone,
        };
        write(status, s, "status")?;
        write(h, est.h_est.unwrap_or(f64::NAN), "h")?;
        write(h_outer, est.h_outer.unwrap_or(f64::NAN), "h_outer")
    })
}

/// Runs a scenario file as the command-line tool does and writes its exit
/// code. A nonzero exit code still returns `Ok`; `error.json` or
/// `summary.json` in `out_dir` holds the details.
///
/// # Safety
/// `scenario` and `out_dir` must be NUL-terminated UTF-8 strings; `exit_code`
/// writable.
#[no_mangle]
pub unsafe extern "C" fn pcond_run_scenario(
    scenario: *const c_char,
    out_dir: *const c_char,
    exit_code: *mut i32,
) -> PcondStatus {
    guard(|| {
        let path = |p: *const c_char, name: &str| -> Result<String, Failure> {
            let s = CStr::from_ptr(as_ref(p, name)?);
            s.to_str().map(str::to_owned).map_err(|_| bad(format!("{name} is not UTF-8")))
        };
        let (scenario, out_dir) = (path(scenario, "scenario")?, path(out_dir, "out_dir")?);
        let (code, _) = pcond::cli::execute(Path::new(&scenario), Path::new(&out_dir));
        write(exit_code, code, "exit_code")
    })
}
