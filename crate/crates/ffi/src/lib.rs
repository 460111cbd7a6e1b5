//! C ABI over the `kqi` crate.
//!
//! Graphs and score tables are opaque heap handles released with the
//! matching `*_free` function. Every fallible call returns a [`KqiStatus`];
//! on failure [`kqi_last_error_message`] describes the error for the
//! calling thread. Outputs are written only on success.

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::path::Path;
use std::ptr;

use kqi::sim::{bootstrap_percolation, generate_ba, ActivationConfig, ArrivalSchedule, AttachmentKernel, BaConfig};
use kqi::{CitationGraph, DecaySpec, KqiError, SnapshotSpec};

#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum KqiStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidArgument = 2,
    Io = 3,
    Malformed = 4,
    Cycle = 5,
    InvalidGraph = 6,
    WrongState = 7,
    UnknownNode = 8,
    Domain = 9,
    Panic = 10,
}

/// Attachment weight used by the simulator.
#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum KqiKernel {
    Citations = 0,
    TotalDegree = 1,
}

/// Opaque citation graph.
pub struct KqiGraph {
    inner: CitationGraph,
}

/// Opaque per-node KQI and volume table, indexed like its graph.
pub struct KqiScores {
    kqi: Vec<f64>,
    volume: Vec<f64>,
    total: f64,
    total_weight: f64,
}

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_error(msg: String) {
    let c = CString::new(msg.replace('\0', " ")).expect("nul bytes removed");
    LAST_ERROR.with(|e| *e.borrow_mut() = Some(c));
}

fn status_of(e: &KqiError) -> KqiStatus {
    use KqiError::*;
    match e {
        Io { .. } => KqiStatus::Io,
        MalformedLine { .. } | Serialize(_) => KqiStatus::Malformed,
        Cycle { .. } => KqiStatus::Cycle,
        DuplicateEdge { .. } | SelfLoop(_) | ReservedId(_) | InvalidWeight { .. } | ZeroInStrength(_)
        | MissingYear(_) => KqiStatus::InvalidGraph,
        AlreadyAugmented | NotAugmented | MismatchedTable { .. } => KqiStatus::WrongState,
        UnknownNode(_) => KqiStatus::UnknownNode,
        InvalidConfig(_) | InvalidDecay(_) | ReferenceTimeTooEarly { .. } | UnknownGroupKind(_) => {
            KqiStatus::InvalidArgument
        }
        _ => KqiStatus::Domain,
    }
}

struct Fail(KqiStatus, String);

impl From<KqiError> for Fail {
    fn from(e: KqiError) -> Self {
        Fail(status_of(&e), e.to_string())
    }
}

fn null(what: &str) -> Fail {
    Fail(KqiStatus::NullPointer, format!("{what} is null"))
}

fn guard(f: impl FnOnce() -> Result<(), Fail>) -> KqiStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => KqiStatus::Ok,
        Ok(Err(Fail(status, msg))) => {
            set_error(msg);
            status
        }
        Err(_) => {
            set_error("internal panic".into());
            KqiStatus::Panic
        }
    }
}

unsafe fn path<'a>(p: *const c_char, what: &str) -> Result<&'a Path, Fail> {
    if p.is_null() {
        return Err(null(what));
    }
    CStr::from_ptr(p)
        .to_str()
        .map(Path::new)
        .map_err(|_| Fail(KqiStatus::InvalidArgument, format!("{what} is not UTF-8")))
}

unsafe fn graph_mut<'a>(g: *mut KqiGraph) -> Result<&'a mut KqiGraph, Fail> {
    g.as_mut().ok_or_else(|| null("graph"))
}

unsafe fn graph_ref<'a>(g: *const KqiGraph) -> Result<&'a KqiGraph, Fail> {
    g.as_ref().ok_or_else(|| null("graph"))
}

unsafe fn put<T>(out: *mut T, value: T, what: &str) -> Result<(), Fail> {
    if out.is_null() {
        return Err(null(what));
    }
    out.write(value);
    Ok(())
}

fn boxed(g: CitationGraph) -> *mut KqiGraph {
    Box::into_raw(Box::new(KqiGraph { inner: g }))
}

/// Message for the last failed call on this thread, or null. The pointer
/// stays valid until the next failing call on the same thread.
#[no_mangle]
pub extern "C" fn kqi_last_error_message() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ref().map_or(ptr::null(), |c| c.as_ptr()))
}

/// Loads a graph from an edge file and an optional (nullable) node file.
///
/// # Safety
/// Paths must be null or valid NUL-terminated strings; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn kqi_graph_load(
    edge_path: *const c_char,
    node_path: *const c_char,
    out: *mut *mut KqiGraph,
) -> KqiStatus {
    guard(|| {
        let edges = path(edge_path, "edge path")?;
        let nodes = if node_path.is_null() { None } else { Some(path(node_path, "node path")?) };
        if out.is_null() {
            return Err(null("out"));
        }
        let g = kqi::io::load_graph(edges, nodes)?;
        put(out, boxed(g), "out")
    })
}

/// Writes the graph (super root excluded) to an edge file and a node file.
///
/// # Safety
/// `g` must be a live handle; paths must be valid NUL-terminated strings.
#[no_mangle]
pub unsafe extern "C" fn kqi_graph_export(
    g: *const KqiGraph,
    edge_path: *const c_char,
    node_path: *const c_char,
) -> KqiStatus {
    guard(|| {
        let g = graph_ref(g)?;
        kqi::io::export_graph(&g.inner, path(edge_path, "edge path")?, path(node_path, "node path")?)?;
        Ok(())
    })
}

/// Adds the super root in place. `count_root_weight` controls whether its
/// edges count toward the total weight.
///
/// # Safety
/// `g` must be a live handle.
#[no_mangle]
pub unsafe extern "C" fn kqi_graph_augment(g: *mut KqiGraph, count_root_weight: bool) -> KqiStatus {
    guard(|| {
        let g = graph_mut(g)?;
        g.inner = g.inner.augment_super_root_with(count_root_weight)?;
        Ok(())
    })
}

/// Reweights edges in place by `exp(-lambda * (reference_year - year(citing)))`.
///
/// # Safety
/// `g` must be a live handle.
#[no_mangle]
pub unsafe extern "C" fn kqi_graph_decay(g: *mut KqiGraph, lambda: f64, reference_year: i32) -> KqiStatus {
    guard(|| {
        let g = graph_mut(g)?;
        g.inner = g.inner.apply_decay(&DecaySpec {
            lambda,
            reference_time: reference_year,
        })?;
        Ok(())
    })
}

/// Keeps only papers published up to `year`, in place.
///
/// # Safety
/// `g` must be a live handle.
#[no_mangle]
pub unsafe extern "C" fn kqi_graph_snapshot(g: *mut KqiGraph, year: i32) -> KqiStatus {
    guard(|| {
        let g = graph_mut(g)?;
        g.inner = g.inner.snapshot_at(&SnapshotSpec { cutoff_year: year })?;
        Ok(())
    })
}

/// Node count, including the super root when present.
///
/// # Safety
/// `g` must be a live handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn kqi_graph_node_count(g: *const KqiGraph, out: *mut usize) -> KqiStatus {
    guard(|| put(out, graph_ref(g)?.inner.node_count(), "out"))
}

/// Edge count, including super-root edges when present.
///
/// # Safety
/// `g` must be a live handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn kqi_graph_edge_count(g: *const KqiGraph, out: *mut usize) -> KqiStatus {
    guard(|| put(out, graph_ref(g)?.inner.edge_count(), "out"))
}

/// Index of a node id.
///
/// # Safety
/// `g` must be a live handle; `id` a valid NUL-terminated string; `out` writable.
#[no_mangle]
pub unsafe extern "C" fn kqi_graph_index_of(g: *const KqiGraph, id: *const c_char, out: *mut usize) -> KqiStatus {
    guard(|| {
        let g = graph_ref(g)?;
        if id.is_null() {
            return Err(null("id"));
        }
        let id = CStr::from_ptr(id).to_string_lossy();
        let v = g.inner.index_of(&id).ok_or_else(|| KqiError::UnknownNode(id.into_owned()))?;
        put(out, v, "out")
    })
}

/// Copies the id of node `index` into `buf` (NUL-terminated, truncated to
/// `len`). `needed`, if non-null, receives the full length plus one.
///
/// # Safety
/// `g` must be a live handle; `buf` must have room for `len` bytes.
#[no_mangle]
pub unsafe extern "C" fn kqi_graph_node_id(
    g: *const KqiGraph,
    index: usize,
    buf: *mut c_char,
    len: usize,
    needed: *mut usize,
) -> KqiStatus {
    guard(|| {
        let g = graph_ref(g)?;
        if index >= g.inner.node_count() {
            return Err(Fail(KqiStatus::InvalidArgument, format!("index {index} out of range")));
        }
        let id = g.inner.id(index).as_bytes();
        if !needed.is_null() {
            needed.write(id.len() + 1);
        }
        if len > 0 {
            if buf.is_null() {
                return Err(null("buf"));
            }
            let n = id.len().min(len - 1);
            ptr::copy_nonoverlapping(id.as_ptr().cast::<c_char>(), buf, n);
            buf.add(n).write(0);
        }
        Ok(())
    })
}

/// Computes volumes and KQI for an augmented graph.
///
/// # Safety
/// `g` must be a live handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn kqi_compute(g: *const KqiGraph, out: *mut *mut KqiScores) -> KqiStatus {
    guard(|| {
        let g = graph_ref(g)?;
        if out.is_null() {
            return Err(null("out"));
        }
        let (vt, kt) = kqi::compute_kqi(&g.inner)?;
        let scores = KqiScores {
            kqi: kt.scores().to_vec(),
            volume: vt.volumes().to_vec(),
            total: kt.total(),
            total_weight: vt.total_weight(),
        };
        put(out, Box::into_raw(Box::new(scores)), "out")
    })
}

/// Number of entries; equals the graph's node count.
///
/// # Safety
/// `t` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn kqi_scores_len(t: *const KqiScores) -> usize {
    t.as_ref().map_or(0, |t| t.kqi.len())
}

/// KQI and volume of node `index`; either output may be null.
///
/// # Safety
/// `t` must be a live handle.
#[no_mangle]
pub unsafe extern "C" fn kqi_scores_get(
    t: *const KqiScores,
    index: usize,
    kqi: *mut f64,
    volume: *mut f64,
) -> KqiStatus {
    guard(|| {
        let t = t.as_ref().ok_or_else(|| null("scores"))?;
        if index >= t.kqi.len() {
            return Err(Fail(KqiStatus::InvalidArgument, format!("index {index} out of range")));
        }
        if !kqi.is_null() {
            kqi.write(t.kqi[index]);
        }
        if !volume.is_null() {
            volume.write(t.volume[index]);
        }
        Ok(())
    })
}

/// Total KQI over real nodes and the total edge weight used.
///
/// # Safety
/// `t` must be a live handle; outputs may be null.
#[no_mangle]
pub unsafe extern "C" fn kqi_scores_totals(t: *const KqiScores, total_kqi: *mut f64, total_weight: *mut f64) -> KqiStatus {
    guard(|| {
        let t = t.as_ref().ok_or_else(|| null("scores"))?;
        if !total_kqi.is_null() {
            total_kqi.write(t.total);
        }
        if !total_weight.is_null() {
            total_weight.write(t.total_weight);
        }
        Ok(())
    })
}

/// Copies up to `len` KQI values into `buf`; returns the count copied.
///
/// # Safety
/// `t` must be a live handle; `buf` must have room for `len` doubles.
#[no_mangle]
pub unsafe extern "C" fn kqi_scores_copy(t: *const KqiScores, buf: *mut f64, len: usize) -> usize {
    match (t.as_ref(), buf.is_null()) {
        (Some(t), false) => {
            let n = len.min(t.kqi.len());
            ptr::copy_nonoverlapping(t.kqi.as_ptr(), buf, n);
            n
        }
        _ => 0,
    }
}

unsafe fn simulate(cfg: BaConfig, out: *mut *mut KqiGraph) -> Result<(), Fail> {
    if out.is_null() {
        return Err(null("out"));
    }
    let g = generate_ba(&cfg)?;
    put(out, boxed(g), "out")
}

fn kernel(k: KqiKernel) -> AttachmentKernel {
    match k {
        KqiKernel::Citations => AttachmentKernel::Citations,
        KqiKernel::TotalDegree => AttachmentKernel::TotalDegree,
    }
}

/// Preferential-attachment graph under the standard schedule, sized to
/// about `total` nodes after `steps` steps.
///
/// # Safety
/// `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn kqi_generate_ba_standard(
    m: usize,
    steps: u32,
    total: f64,
    seed: u64,
    kernel_kind: KqiKernel,
    out: *mut *mut KqiGraph,
) -> KqiStatus {
    guard(|| {
        let cfg = BaConfig {
            m,
            schedule: ArrivalSchedule::standard_with_total(m, steps, total),
            seed,
            steps,
            kernel: kernel(kernel_kind),
        };
        simulate(cfg, out)
    })
}

/// Preferential-attachment graph with explicit per-step arrivals.
///
/// # Safety
/// `arrivals` must point to `steps` integers; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn kqi_generate_ba_custom(
    m: usize,
    arrivals: *const u64,
    steps: u32,
    seed: u64,
    kernel_kind: KqiKernel,
    out: *mut *mut KqiGraph,
) -> KqiStatus {
    guard(|| {
        if arrivals.is_null() && steps > 0 {
            return Err(null("arrivals"));
        }
        let counts = if steps == 0 {
            Vec::new()
        } else {
            std::slice::from_raw_parts(arrivals, steps as usize).to_vec()
        };
        let cfg = BaConfig {
            m,
            schedule: ArrivalSchedule::Custom { arrivals: counts },
            seed,
            steps,
            kernel: kernel(kernel_kind),
        };
        simulate(cfg, out)
    })
}

/// Bootstrap percolation; either output may be null.
///
/// # Safety
/// `g` must be a live handle.
#[no_mangle]
pub unsafe extern "C" fn kqi_percolate(
    g: *const KqiGraph,
    a: u32,
    seed_fraction: f64,
    rng_seed: u64,
    active_fraction: *mut f64,
    rounds: *mut usize,
) -> KqiStatus {
    guard(|| {
        let g = graph_ref(g)?;
        let r = bootstrap_percolation(&g.inner, &ActivationConfig { a, seed_fraction, rng_seed })?;
        if !active_fraction.is_null() {
            active_fraction.write(r.active_fraction);
        }
        if !rounds.is_null() {
            rounds.write(r.rounds);
        }
        Ok(())
    })
}

/// Releases a graph handle; null is ignored.
///
/// # Safety
/// `g` must be null or a handle not yet freed.
#[no_mangle]
pub unsafe extern "C" fn kqi_graph_free(g: *mut KqiGraph) {
    if !g.is_null() {
        drop(Box::from_raw(g));
    }
}

/// Releases a score handle; null is ignored.
///
/// # Safety
/// `t` must be null or a handle not yet freed.
#[no_mangle]
pub unsafe extern "C" fn kqi_scores_free(t: *mut KqiScores) {
    if !t.is_null() {
        drop(Box::from_raw(t));
    }
}
