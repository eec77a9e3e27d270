//! C ABI over the circle-rope index pipeline.
//!
//! Sequences are exposed as opaque `CrSequence` handles created by
//! [`cr_sequence_new`] and released with [`cr_sequence_free`]. Every
//! fallible call returns a [`CrStatus`]; on failure the message is kept
//! per thread and can be read with [`cr_last_error_message`].

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use circle_rope::geometry::{cip_stages, dual_frame_fusion, CipConfig, GridSpec, RadiusStrategy};
use circle_rope::metrics::{distance_matrix_with, ptd, DistanceConvention};
use circle_rope::schemes::{parse_layout, IndexedSequence, Modality, SchemeKind, SequenceLayout};
use circle_rope::Error;

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CrStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidArgument = 2,
    Layout = 3,
    MissingModality = 4,
    DegenerateRadius = 5,
    BufferTooSmall = 6,
    OutOfRange = 7,
    Panic = 8,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CrScheme {
    Hard = 0,
    Unordered = 1,
    Spatial = 2,
    Circle = 3,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CrRadiusKind {
    Fixed = 0,
    Auto = 1,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CrStage {
    Centered = 0,
    Circle2d = 1,
    Projected = 2,
    Fused = 3,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CrModality {
    Text = 0,
    Image = 1,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CrConvention {
    Scalar = 0,
    Planar = 1,
    Euclidean = 2,
}

/// Projection and fusion parameters. `radius_value` is R for a fixed
/// radius and k for an automatic one.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CrCipConfig {
    pub alpha: f64,
    pub radius_kind: CrRadiusKind,
    pub radius_value: f64,
    pub beta: f64,
    pub text_direction: [f64; 3],
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CrToken {
    pub modality: CrModality,
    pub segment_id: usize,
    pub coords: [f64; 3],
}

/// Opaque handle to an indexed sequence.
pub struct CrSequence {
    seq: IndexedSequence,
}

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_error(msg: String) {
    let c = CString::new(msg.replace('\0', " ")).unwrap_or_default();
    LAST_ERROR.with(|e| *e.borrow_mut() = Some(c));
}

fn fail(status: CrStatus, msg: impl Into<String>) -> CrStatus {
    set_error(msg.into());
    status
}

fn status_of(e: &Error) -> CrStatus {
    match e {
        Error::Layout { .. } | Error::InvalidGrid { .. } => CrStatus::Layout,
        Error::MissingModality => CrStatus::MissingModality,
        Error::DegenerateRadius => CrStatus::DegenerateRadius,
        _ => CrStatus::InvalidArgument,
    }
}

fn from_error(e: Error) -> CrStatus {
    fail(status_of(&e), e.to_string())
}

fn guard(f: impl FnOnce() -> CrStatus) -> CrStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(status) => status,
        Err(_) => fail(CrStatus::Panic, "internal panic"),
    }
}

impl From<CrCipConfig> for CipConfig {
    fn from(c: CrCipConfig) -> Self {
        let radius = match c.radius_kind {
            CrRadiusKind::Fixed => RadiusStrategy::Fixed(c.radius_value),
            CrRadiusKind::Auto => RadiusStrategy::Auto(c.radius_value),
        };
        CipConfig { alpha: c.alpha, radius, beta: c.beta, text_direction: c.text_direction }
    }
}

impl From<CipConfig> for CrCipConfig {
    fn from(c: CipConfig) -> Self {
        let (radius_kind, radius_value) = match c.radius {
            RadiusStrategy::Fixed(r) => (CrRadiusKind::Fixed, r),
            RadiusStrategy::Auto(k) => (CrRadiusKind::Auto, k),
        };
        CrCipConfig { alpha: c.alpha, radius_kind, radius_value, beta: c.beta, text_direction: c.text_direction }
    }
}

/// Message for the last failed call on this thread, or NULL. The pointer
/// stays valid until the next failing call on the same thread.
#[no_mangle]
pub extern "C" fn cr_last_error_message() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ref().map_or(ptr::null(), |c| c.as_ptr()))
}

/// NUL-terminated crate version. Static storage.
#[no_mangle]
pub extern "C" fn cr_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr().cast()
}

/// Writes the default configuration (alpha 0.5, fixed radius 10, beta 0.1,
/// text direction (1,1,1)).
///
/// # Safety
/// `out` must be NULL or valid for writes.
#[no_mangle]
pub unsafe extern "C" fn cr_config_default(out: *mut CrCipConfig) -> CrStatus {
    if out.is_null() {
        return fail(CrStatus::NullPointer, "out is null");
    }
    // SAFETY: checked non-null; caller guarantees validity.
    unsafe { out.write(CipConfig::default().into()) };
    CrStatus::Ok
}

/// Builds the indices of a layout such as `"i3x3,t5"`. Only the circle
/// scheme reads `config`; NULL selects the default configuration.
///
/// # Safety
/// `layout` must be a NUL-terminated string, `config` NULL or a valid
/// pointer, `out` valid for writes. Release the handle with
/// [`cr_sequence_free`].
#[no_mangle]
pub unsafe extern "C" fn cr_sequence_new(
    layout: *const c_char,
    scheme: CrScheme,
    config: *const CrCipConfig,
    out: *mut *mut CrSequence,
) -> CrStatus {
    guard(|| {
        if layout.is_null() || out.is_null() {
            return fail(CrStatus::NullPointer, "layout and out must be non-null");
        }
        // SAFETY: checked non-null; caller guarantees NUL termination.
        let layout = match unsafe { CStr::from_ptr(layout) }.to_str() {
            Ok(s) => s,
            Err(_) => return fail(CrStatus::Layout, "layout is not UTF-8"),
        };
        let config: CipConfig = if config.is_null() {
            CipConfig::default()
        } else {
            // SAFETY: checked non-null.
            unsafe { *config }.into()
        };
        let kind = match scheme {
            CrScheme::Hard => SchemeKind::Hard,
            CrScheme::Unordered => SchemeKind::Unordered,
            CrScheme::Spatial => SchemeKind::Spatial,
            CrScheme::Circle => SchemeKind::Circle,
        };
        let seq = parse_layout(layout)
            .and_then(|segments| SequenceLayout::new(segments, kind.with_config(config)))
            .and_then(|l| l.assign());
        match seq {
            Ok(seq) => {
                let handle = Box::into_raw(Box::new(CrSequence { seq }));
                // SAFETY: checked non-null.
                unsafe { out.write(handle) };
                CrStatus::Ok
            }
            Err(e) => from_error(e),
        }
    })
}

/// # Safety
/// `seq` must be NULL or a handle from [`cr_sequence_new`] not yet freed.
#[no_mangle]
pub unsafe extern "C" fn cr_sequence_free(seq: *mut CrSequence) {
    if !seq.is_null() {
        // SAFETY: caller guarantees the handle came from Box::into_raw.
        drop(unsafe { Box::from_raw(seq) });
    }
}

/// Number of tokens, or 0 for a NULL handle.
///
/// # Safety
/// `seq` must be NULL or a live handle.
#[no_mangle]
pub unsafe extern "C" fn cr_sequence_len(seq: *const CrSequence) -> usize {
    // SAFETY: caller guarantees the handle is live.
    unsafe { seq.as_ref() }.map_or(0, |s| s.seq.len())
}

/// # Safety
/// `seq` must be a live handle and `out` valid for writes.
#[no_mangle]
pub unsafe extern "C" fn cr_sequence_token(seq: *const CrSequence, index: usize, out: *mut CrToken) -> CrStatus {
    // SAFETY: caller guarantees the handle is live.
    let Some(seq) = (unsafe { seq.as_ref() }) else {
        return fail(CrStatus::NullPointer, "seq is null");
    };
    if out.is_null() {
        return fail(CrStatus::NullPointer, "out is null");
    }
    let Some(tok) = seq.seq.tokens.get(index) else {
        return fail(CrStatus::OutOfRange, format!("token {index} out of range (len {})", seq.seq.len()));
    };
    let modality = match tok.modality {
        Modality::Text => CrModality::Text,
        Modality::Image => CrModality::Image,
    };
    // SAFETY: checked non-null.
    unsafe { out.write(CrToken { modality, segment_id: tok.segment_id, coords: tok.index.coords }) };
    CrStatus::Ok
}

/// PTD of the sequence under its scheme's default distance convention.
/// `out_convention` may be NULL.
///
/// # Safety
/// `seq` must be a live handle, `out_ptd` valid for writes and
/// `out_convention` NULL or valid for writes.
#[no_mangle]
pub unsafe extern "C" fn cr_sequence_ptd(
    seq: *const CrSequence,
    out_ptd: *mut f64,
    out_convention: *mut CrConvention,
) -> CrStatus {
    guard(|| {
        // SAFETY: caller guarantees the handle is live.
        let Some(seq) = (unsafe { seq.as_ref() }) else {
            return fail(CrStatus::NullPointer, "seq is null");
        };
        if out_ptd.is_null() {
            return fail(CrStatus::NullPointer, "out_ptd is null");
        }
        let convention = DistanceConvention::for_scheme(seq.seq.scheme);
        match distance_matrix_with(&seq.seq, convention) {
            Ok(m) => {
                // SAFETY: checked non-null.
                unsafe { out_ptd.write(ptd(&m)) };
                if !out_convention.is_null() {
                    let c = match convention {
                        DistanceConvention::Scalar => CrConvention::Scalar,
                        DistanceConvention::Planar => CrConvention::Planar,
                        DistanceConvention::Euclidean => CrConvention::Euclidean,
                    };
                    // SAFETY: checked non-null.
                    unsafe { out_convention.write(c) };
                }
                CrStatus::Ok
            }
            Err(e) => from_error(e),
        }
    })
}

/// Writes one projection stage of a `width x height` grid as packed
/// `x, y, z` triples in raster order. `*out_points` always receives the
/// number of points; when `capacity` (in points) is too small nothing is
/// written to `out_xyz` and `CR_STATUS_BUFFER_TOO_SMALL` is returned.
///
/// # Safety
/// `config` must be NULL (defaults) or valid, `out_points` valid for
/// writes, and `out_xyz` valid for `3 * capacity` doubles when
/// `capacity > 0`.
#[no_mangle]
pub unsafe extern "C" fn cr_cip_project(
    width: usize,
    height: usize,
    config: *const CrCipConfig,
    stage: CrStage,
    out_xyz: *mut f64,
    capacity: usize,
    out_points: *mut usize,
) -> CrStatus {
    guard(|| {
        if out_points.is_null() {
            return fail(CrStatus::NullPointer, "out_points is null");
        }
        let config: CipConfig = if config.is_null() {
            CipConfig::default()
        } else {
            // SAFETY: checked non-null.
            unsafe { *config }.into()
        };
        let points = GridSpec::new(width, height).and_then(|grid| {
            let stages = cip_stages(grid, &config)?;
            Ok(match stage {
                CrStage::Centered => stages.centered,
                CrStage::Circle2d => stages.circle,
                CrStage::Projected => stages.projected,
                CrStage::Fused => dual_frame_fusion(&stages.projected, &stages.centered, config.beta)?,
            })
        });
        let points = match points {
            Ok(p) => p,
            Err(e) => return from_error(e),
        };
        // SAFETY: checked non-null.
        unsafe { out_points.write(points.len()) };
        if capacity < points.len() {
            return fail(CrStatus::BufferTooSmall, format!("need {} points, capacity {capacity}", points.len()));
        }
        if out_xyz.is_null() {
            return fail(CrStatus::NullPointer, "out_xyz is null");
        }
        // SAFETY: caller guarantees 3 * capacity doubles; we write 3 * len <= that.
        let buf = unsafe { std::slice::from_raw_parts_mut(out_xyz, 3 * points.len()) };
        for (dst, p) in buf.chunks_exact_mut(3).zip(&points) {
            dst.copy_from_slice(&p.coords);
        }
        CrStatus::Ok
    })
}
