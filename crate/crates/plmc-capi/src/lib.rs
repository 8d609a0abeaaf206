//! C ABI over the projected Langevin sampling library.
//!
//! Bodies and potentials are opaque handles created and freed here; all
//! other data crosses the boundary as plain buffers the caller owns. Every
//! fallible call returns a [`PlmcStatus`]; on failure a thread-local message
//! is readable through [`plmc_last_error`] until the next failing call on
//! the same thread.
//!
//! The header `include/plmc.h` is regenerated by the build script.

use plmc::chains::{run_plmc, ChainConfig};
use plmc::geometry::ConvexBody;
use plmc::potentials::Potential;
use plmc::rng::GENERATOR_ID;
use plmc::theory;
use std::cell::RefCell;
use std::ffi::{c_char, c_int, CString};
use std::sync::OnceLock;

/// Call outcome. `PLMC_STATUS_INVALID_ARGUMENT` marks inputs the library
/// refused (null pointers, shape mismatches, parameters off their domain);
/// `PLMC_STATUS_RUNTIME_ERROR` marks failures during a computation that
/// started with valid inputs.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PlmcStatus {
    Ok = 0,
    RuntimeError = 1,
    InvalidArgument = 2,
}

/// Opaque convex body handle.
pub struct PlmcBody {
    inner: ConvexBody,
}

/// Opaque potential handle.
pub struct PlmcPotential {
    inner: Potential,
}

thread_local! {
    static LAST_ERROR: RefCell<CString> = RefCell::new(CString::default());
}

fn fail(status: PlmcStatus, message: impl AsRef<str>) -> PlmcStatus {
    let sanitized = message.as_ref().replace('\0', " ");
    LAST_ERROR.with(|slot| {
        *slot.borrow_mut() = CString::new(sanitized).unwrap_or_default();
    });
    status
}

fn invalid(message: impl AsRef<str>) -> PlmcStatus {
    fail(PlmcStatus::InvalidArgument, message)
}

/// Message of the last failing call on this thread, or an empty string.
/// The pointer stays valid until the next failing call on the same thread.
#[no_mangle]
pub extern "C" fn plmc_last_error() -> *const c_char {
    LAST_ERROR.with(|slot| slot.borrow().as_ptr())
}

/// Library version as a static string.
#[no_mangle]
pub extern "C" fn plmc_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr() as *const c_char
}

/// Identifier of the random number stream layout, for reproducibility
/// records. Static string.
#[no_mangle]
pub extern "C" fn plmc_generator_id() -> *const c_char {
    static ID: OnceLock<CString> = OnceLock::new();
    ID.get_or_init(|| CString::new(GENERATOR_ID).unwrap()).as_ptr()
}

unsafe fn slice_arg<'a>(ptr: *const f64, len: usize, name: &str) -> Result<&'a [f64], PlmcStatus> {
    if ptr.is_null() {
        return Err(invalid(format!("{name} is null")));
    }
    Ok(std::slice::from_raw_parts(ptr, len))
}

unsafe fn out_arg<'a, T>(ptr: *mut T, name: &str) -> Result<&'a mut T, PlmcStatus> {
    if ptr.is_null() {
        return Err(invalid(format!("{name} is null")));
    }
    Ok(&mut *ptr)
}

unsafe fn body_arg<'a>(ptr: *const PlmcBody) -> Result<&'a ConvexBody, PlmcStatus> {
    if ptr.is_null() {
        return Err(invalid("body handle is null"));
    }
    Ok(&(*ptr).inner)
}

unsafe fn potential_arg<'a>(ptr: *const PlmcPotential) -> Result<&'a Potential, PlmcStatus> {
    if ptr.is_null() {
        return Err(invalid("potential handle is null"));
    }
    Ok(&(*ptr).inner)
}

fn emit_body(body: ConvexBody, out: &mut *mut PlmcBody) -> PlmcStatus {
    *out = Box::into_raw(Box::new(PlmcBody { inner: body }));
    PlmcStatus::Ok
}

fn emit_potential(potential: Potential, out: &mut *mut PlmcPotential) -> PlmcStatus {
    *out = Box::into_raw(Box::new(PlmcPotential { inner: potential }));
    PlmcStatus::Ok
}

macro_rules! try_ffi {
    ($e:expr) => {
        match $e {
            Ok(v) => v,
            Err(status) => return status,
        }
    };
}

macro_rules! try_domain {
    ($e:expr, $status:expr) => {
        match $e {
            Ok(v) => v,
            Err(e) => return fail($status, e.to_string()),
        }
    };
}

/// Creates the unconstrained body of the given dimension.
///
/// # Safety
/// `out` must be a valid pointer to a `PlmcBody*`.
#[no_mangle]
pub unsafe extern "C" fn plmc_body_whole_space(
    dim: usize,
    out: *mut *mut PlmcBody,
) -> PlmcStatus {
    let out = try_ffi!(out_arg(out, "out"));
    let body = try_domain!(ConvexBody::whole_space(dim), PlmcStatus::InvalidArgument);
    emit_body(body, out)
}

/// Creates a Euclidean ball.
///
/// # Safety
/// `center` must point to `dim` doubles; `out` must be a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn plmc_body_ball(
    center: *const f64,
    dim: usize,
    radius: f64,
    out: *mut *mut PlmcBody,
) -> PlmcStatus {
    let out = try_ffi!(out_arg(out, "out"));
    let center = try_ffi!(slice_arg(center, dim, "center"));
    let body = try_domain!(
        ConvexBody::ball(center.to_vec(), radius),
        PlmcStatus::InvalidArgument
    );
    emit_body(body, out)
}

/// Creates an axis-aligned box with the given corner bounds.
///
/// # Safety
/// `lower` and `upper` must point to `dim` doubles; `out` must be valid.
#[no_mangle]
pub unsafe extern "C" fn plmc_body_box(
    lower: *const f64,
    upper: *const f64,
    dim: usize,
    out: *mut *mut PlmcBody,
) -> PlmcStatus {
    let out = try_ffi!(out_arg(out, "out"));
    let lower = try_ffi!(slice_arg(lower, dim, "lower"));
    let upper = try_ffi!(slice_arg(upper, dim, "upper"));
    let body = try_domain!(
        ConvexBody::axis_box(lower.to_vec(), upper.to_vec()),
        PlmcStatus::InvalidArgument
    );
    emit_body(body, out)
}

/// Creates an intersection of halfspaces `normals[i] . x <= offsets[i]`.
/// `normals` is row-major `count x dim`; `interior` must satisfy every
/// constraint strictly.
///
/// # Safety
/// `normals` must point to `count * dim` doubles, `offsets` to `count`,
/// `interior` to `dim`; `out` must be valid.
#[no_mangle]
pub unsafe extern "C" fn plmc_body_halfspaces(
    normals: *const f64,
    offsets: *const f64,
    count: usize,
    dim: usize,
    interior: *const f64,
    out: *mut *mut PlmcBody,
) -> PlmcStatus {
    let out = try_ffi!(out_arg(out, "out"));
    let normals = try_ffi!(slice_arg(normals, count * dim, "normals"));
    let offsets = try_ffi!(slice_arg(offsets, count, "offsets"));
    let interior = try_ffi!(slice_arg(interior, dim, "interior"));
    let rows = normals.chunks(dim).map(|c| c.to_vec()).collect();
    let body = try_domain!(
        ConvexBody::halfspace_intersection(rows, offsets.to_vec(), interior.to_vec()),
        PlmcStatus::InvalidArgument
    );
    emit_body(body, out)
}

/// Frees a body handle. Null is a no-op.
///
/// # Safety
/// `body` must be null or a pointer returned by a `plmc_body_*` constructor,
/// not freed before.
#[no_mangle]
pub unsafe extern "C" fn plmc_body_free(body: *mut PlmcBody) {
    if !body.is_null() {
        drop(Box::from_raw(body));
    }
}

/// Writes the body's dimension.
///
/// # Safety
/// `body` must be a live handle; `out` must be valid.
#[no_mangle]
pub unsafe extern "C" fn plmc_body_dim(body: *const PlmcBody, out: *mut usize) -> PlmcStatus {
    let body = try_ffi!(body_arg(body));
    let out = try_ffi!(out_arg(out, "out"));
    *out = body.dim();
    PlmcStatus::Ok
}

/// Projects `x` onto the body, writing the `dim` coordinates to `out`.
///
/// # Safety
/// `x` and `out` must point to `dim` doubles; `body` must be a live handle.
#[no_mangle]
pub unsafe extern "C" fn plmc_body_project(
    body: *const PlmcBody,
    x: *const f64,
    dim: usize,
    out: *mut f64,
) -> PlmcStatus {
    let body = try_ffi!(body_arg(body));
    let x = try_ffi!(slice_arg(x, dim, "x"));
    if out.is_null() {
        return invalid("out is null");
    }
    if dim != body.dim() {
        return invalid(format!("x has dimension {dim}, body has {}", body.dim()));
    }
    let projected = try_domain!(
        body.project(x, plmc::geometry::DEFAULT_PROJECTION_TOL),
        PlmcStatus::RuntimeError
    );
    std::ptr::copy_nonoverlapping(projected.as_ptr(), out, dim);
    PlmcStatus::Ok
}

/// Writes 1 to `out` when `x` lies in the body within `tol`, else 0.
///
/// # Safety
/// `x` must point to `dim` doubles; `body` must be live; `out` valid.
#[no_mangle]
pub unsafe extern "C" fn plmc_body_contains(
    body: *const PlmcBody,
    x: *const f64,
    dim: usize,
    tol: f64,
    out: *mut c_int,
) -> PlmcStatus {
    let body = try_ffi!(body_arg(body));
    let x = try_ffi!(slice_arg(x, dim, "x"));
    let out = try_ffi!(out_arg(out, "out"));
    if dim != body.dim() {
        return invalid(format!("x has dimension {dim}, body has {}", body.dim()));
    }
    let inside = try_domain!(body.contains(x, tol), PlmcStatus::RuntimeError);
    *out = inside as c_int;
    PlmcStatus::Ok
}

/// Writes the distance from `x` to the body's boundary (infinity for the
/// unconstrained body). Fails when `x` is outside.
///
/// # Safety
/// `x` must point to `dim` doubles; `body` must be live; `out` valid.
#[no_mangle]
pub unsafe extern "C" fn plmc_body_boundary_distance(
    body: *const PlmcBody,
    x: *const f64,
    dim: usize,
    out: *mut f64,
) -> PlmcStatus {
    let body = try_ffi!(body_arg(body));
    let x = try_ffi!(slice_arg(x, dim, "x"));
    let out = try_ffi!(out_arg(out, "out"));
    if dim != body.dim() {
        return invalid(format!("x has dimension {dim}, body has {}", body.dim()));
    }
    *out = try_domain!(body.boundary_distance(x), PlmcStatus::RuntimeError);
    PlmcStatus::Ok
}

/// Creates the zero potential.
///
/// # Safety
/// `out` must be a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn plmc_potential_zero(
    dim: usize,
    out: *mut *mut PlmcPotential,
) -> PlmcStatus {
    let out = try_ffi!(out_arg(out, "out"));
    let p = try_domain!(Potential::zero(dim), PlmcStatus::InvalidArgument);
    emit_potential(p, out)
}

/// Creates the linear potential `c . x`.
///
/// # Safety
/// `c` must point to `dim` doubles; `out` must be valid.
#[no_mangle]
pub unsafe extern "C" fn plmc_potential_linear(
    c: *const f64,
    dim: usize,
    out: *mut *mut PlmcPotential,
) -> PlmcStatus {
    let out = try_ffi!(out_arg(out, "out"));
    let c = try_ffi!(slice_arg(c, dim, "c"));
    let p = try_domain!(Potential::linear(c.to_vec()), PlmcStatus::InvalidArgument);
    emit_potential(p, out)
}

/// Creates `max_i (a_i . x + b_i)`. `pieces` is row-major `count x (dim+1)`,
/// each row the slope `a_i` followed by the intercept `b_i`.
///
/// # Safety
/// `pieces` must point to `count * (dim + 1)` doubles; `out` must be valid.
#[no_mangle]
pub unsafe extern "C" fn plmc_potential_affine_max(
    pieces: *const f64,
    count: usize,
    dim: usize,
    out: *mut *mut PlmcPotential,
) -> PlmcStatus {
    let out = try_ffi!(out_arg(out, "out"));
    if dim == 0 {
        return invalid("dim must be positive");
    }
    let flat = try_ffi!(slice_arg(pieces, count * (dim + 1), "pieces"));
    let rows = flat
        .chunks(dim + 1)
        .map(|row| (row[..dim].to_vec(), row[dim]))
        .collect();
    let p = try_domain!(Potential::affine_max(rows), PlmcStatus::InvalidArgument);
    emit_potential(p, out)
}

/// Creates `slope * |x - center|`.
///
/// # Safety
/// `center` must point to `dim` doubles; `out` must be valid.
#[no_mangle]
pub unsafe extern "C" fn plmc_potential_scaled_norm(
    center: *const f64,
    dim: usize,
    slope: f64,
    out: *mut *mut PlmcPotential,
) -> PlmcStatus {
    let out = try_ffi!(out_arg(out, "out"));
    let center = try_ffi!(slice_arg(center, dim, "center"));
    let p = try_domain!(
        Potential::scaled_norm(center.to_vec(), slope),
        PlmcStatus::InvalidArgument
    );
    emit_potential(p, out)
}

/// Creates `(alpha/2) |x|^2`.
///
/// # Safety
/// `out` must be a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn plmc_potential_quadratic(
    dim: usize,
    alpha: f64,
    out: *mut *mut PlmcPotential,
) -> PlmcStatus {
    let out = try_ffi!(out_arg(out, "out"));
    let p = try_domain!(Potential::quadratic(dim, alpha), PlmcStatus::InvalidArgument);
    emit_potential(p, out)
}

/// Pins the potential's infimum over the intended body, making downstream
/// normalizations exact.
///
/// # Safety
/// `potential` must be a live handle.
#[no_mangle]
pub unsafe extern "C" fn plmc_potential_set_known_infimum(
    potential: *mut PlmcPotential,
    value: f64,
) -> PlmcStatus {
    if potential.is_null() {
        return invalid("potential handle is null");
    }
    if !value.is_finite() {
        return invalid(format!("known infimum {value} must be finite"));
    }
    (*potential).inner.known_infimum = Some(value);
    PlmcStatus::Ok
}

/// Frees a potential handle. Null is a no-op.
///
/// # Safety
/// `potential` must be null or a pointer returned by a `plmc_potential_*`
/// constructor, not freed before.
#[no_mangle]
pub unsafe extern "C" fn plmc_potential_free(potential: *mut PlmcPotential) {
    if !potential.is_null() {
        drop(Box::from_raw(potential));
    }
}

/// Evaluates the potential at `x`.
///
/// # Safety
/// `x` must point to `dim` doubles; `potential` must be live; `out` valid.
#[no_mangle]
pub unsafe extern "C" fn plmc_potential_value(
    potential: *const PlmcPotential,
    x: *const f64,
    dim: usize,
    out: *mut f64,
) -> PlmcStatus {
    let p = try_ffi!(potential_arg(potential));
    let x = try_ffi!(slice_arg(x, dim, "x"));
    let out = try_ffi!(out_arg(out, "out"));
    if dim != p.dim() {
        return invalid(format!("x has dimension {dim}, potential has {}", p.dim()));
    }
    *out = try_domain!(p.value(x), PlmcStatus::RuntimeError);
    PlmcStatus::Ok
}

/// Writes the minimum-norm subgradient of the potential at `x` into `out`
/// (`dim` doubles).
///
/// # Safety
/// `x` and `out` must point to `dim` doubles; `potential` must be live.
#[no_mangle]
pub unsafe extern "C" fn plmc_potential_subgradient(
    potential: *const PlmcPotential,
    x: *const f64,
    dim: usize,
    out: *mut f64,
) -> PlmcStatus {
    let p = try_ffi!(potential_arg(potential));
    let x = try_ffi!(slice_arg(x, dim, "x"));
    if out.is_null() {
        return invalid("out is null");
    }
    if dim != p.dim() {
        return invalid(format!("x has dimension {dim}, potential has {}", p.dim()));
    }
    let g = try_domain!(p.min_norm_subgradient(x), PlmcStatus::RuntimeError);
    std::ptr::copy_nonoverlapping(g.as_ptr(), out, dim);
    PlmcStatus::Ok
}

/// Writes the potential's Lipschitz constant over the body.
///
/// # Safety
/// `potential` and `body` must be live handles; `out` must be valid.
#[no_mangle]
pub unsafe extern "C" fn plmc_potential_lipschitz(
    potential: *const PlmcPotential,
    body: *const PlmcBody,
    out: *mut f64,
) -> PlmcStatus {
    let p = try_ffi!(potential_arg(potential));
    let body = try_ffi!(body_arg(body));
    let out = try_ffi!(out_arg(out, "out"));
    *out = try_domain!(p.lipschitz_constant(body), PlmcStatus::RuntimeError);
    PlmcStatus::Ok
}

/// Runs the projected sampler for `steps` steps from `x0` and writes the
/// final point to `out_final` (`dim` doubles). Deterministic in
/// `(seed, replica_id)`. Fails with `PLMC_STATUS_INVALID_ARGUMENT` when the
/// start is outside the body or `eta >= n / L^2`.
///
/// # Safety
/// `x0` and `out_final` must point to `dim` doubles; handles must be live.
#[no_mangle]
#[allow(clippy::too_many_arguments)]
pub unsafe extern "C" fn plmc_run(
    body: *const PlmcBody,
    potential: *const PlmcPotential,
    x0: *const f64,
    dim: usize,
    eta: f64,
    steps: u64,
    seed: u64,
    replica_id: u64,
    out_final: *mut f64,
) -> PlmcStatus {
    let body = try_ffi!(body_arg(body));
    let potential = try_ffi!(potential_arg(potential));
    let x0 = try_ffi!(slice_arg(x0, dim, "x0"));
    if out_final.is_null() {
        return invalid("out_final is null");
    }
    if dim != body.dim() {
        return invalid(format!("x0 has dimension {dim}, body has {}", body.dim()));
    }
    let cfg = try_domain!(
        ChainConfig::new(
            body.clone(),
            potential.clone(),
            x0.to_vec(),
            eta,
            steps,
            seed,
            replica_id,
        ),
        PlmcStatus::InvalidArgument
    );
    let trajectory = try_domain!(run_plmc(&cfg, 0), PlmcStatus::RuntimeError);
    std::ptr::copy_nonoverlapping(trajectory.final_point.as_ptr(), out_final, dim);
    PlmcStatus::Ok
}

/// Writes the per-step discretization bound on `(1/n) W2^2` between the
/// sampler after `k` steps of size `eta` and the reflected diffusion at time
/// `k eta`.
///
/// # Safety
/// `out` must be a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn plmc_discretization_bound(
    n: usize,
    k: u64,
    eta: f64,
    l: f64,
    sigma0: f64,
    r0: f64,
    out: *mut f64,
) -> PlmcStatus {
    let out = try_ffi!(out_arg(out, "out"));
    let b = try_domain!(
        theory::discretization_bound(n, k, eta, l, sigma0, r0),
        PlmcStatus::InvalidArgument
    );
    *out = b.rhs;
    PlmcStatus::Ok
}

/// Writes the `(1/n) W2^2` mixing bound after `k` steps of size `eta` for a
/// target with log-Sobolev constant `c_ls`.
///
/// # Safety
/// `out` must be a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn plmc_logsob_bound(
    n: usize,
    k: u64,
    eta: f64,
    c_ls: f64,
    r0: f64,
    sigma0: f64,
    l: f64,
    out: *mut f64,
) -> PlmcStatus {
    let out = try_ffi!(out_arg(out, "out"));
    let d = try_domain!(
        theory::discretization_bound(n, k, eta, l, sigma0, r0),
        PlmcStatus::InvalidArgument
    );
    let b = try_domain!(
        theory::logsob_bound(k, eta, d.a, c_ls, n, r0, sigma0, l),
        PlmcStatus::InvalidArgument
    );
    *out = b.rhs;
    PlmcStatus::Ok
}

/// Computes the step size and iteration count reaching `(1/n) W2^2 <= eps`
/// under a log-Sobolev constant, writing them to `out_eta` and `out_k`.
/// Fails when more than `max_steps` iterations would be needed.
///
/// # Safety
/// `out_eta` and `out_k` must be valid pointers.
#[no_mangle]
#[allow(clippy::too_many_arguments)]
pub unsafe extern "C" fn plmc_schedule(
    n: usize,
    l: f64,
    r0: f64,
    sigma0: f64,
    c_ls: f64,
    eps: f64,
    max_steps: u64,
    out_eta: *mut f64,
    out_k: *mut u64,
) -> PlmcStatus {
    let out_eta = try_ffi!(out_arg(out_eta, "out_eta"));
    let out_k = try_ffi!(out_arg(out_k, "out_k"));
    let s = try_domain!(
        theory::schedule_logsob(n, l, r0, sigma0, c_ls, eps, max_steps),
        PlmcStatus::RuntimeError
    );
    *out_eta = s.eta;
    *out_k = s.k;
    PlmcStatus::Ok
}
