//! Python bindings for the W3ID library.
//!
//! Exposes the main types and operations: generation, splitting, dual-key
//! verification, quad chains, QR rendering, and the resolver registry.
//! Timestamps cross the boundary in their 20-digit wire form.

use std::sync::OnceLock;

use pyo3::exceptions::{PyKeyError, PyRuntimeError, PyValueError};
use pyo3::prelude::*;

use w3id_core::{CanonicalObject, MonotonicIssuer, Timestamp, ValidationPolicy, W3idError};

fn to_py_err(err: W3idError) -> PyErr {
    match err {
        W3idError::NotFound(_) => PyKeyError::new_err(err.to_string()),
        W3idError::Storage(_) | W3idError::ClockUnavailable(_) => {
            PyRuntimeError::new_err(err.to_string())
        }
        _ => PyValueError::new_err(err.to_string()),
    }
}

fn global_issuer() -> &'static MonotonicIssuer {
    static ISSUER: OnceLock<MonotonicIssuer> = OnceLock::new();
    ISSUER.get_or_init(MonotonicIssuer::system)
}

fn parse_timestamp(raw: &str) -> PyResult<Timestamp> {
    Timestamp::parse(raw).map_err(to_py_err)
}

fn parse_policy(raw: &str) -> PyResult<ValidationPolicy> {
    match raw {
        "all" => Ok(ValidationPolicy::AllFour),
        "three" => Ok(ValidationPolicy::ThreeConsecutive),
        other => Err(PyValueError::new_err(format!(
            "unknown policy {other:?}, expected 'all' or 'three'"
        ))),
    }
}

fn parse_ec(raw: &str) -> PyResult<w3id_core::EcLevel> {
    raw.parse().map_err(to_py_err)
}

/// One issued identifier with the timestamp that produced it.
#[pyclass(name = "IdRecord", frozen, skip_from_py_object)]
#[derive(Clone)]
struct PyIdRecord {
    inner: w3id_core::IdRecord,
}

#[pymethods]
impl PyIdRecord {
    #[getter]
    fn w3id(&self) -> &str {
        &self.inner.w3id
    }

    #[getter]
    fn timestamp(&self) -> String {
        self.inner.timestamp.format()
    }

    #[getter]
    fn version(&self) -> u32 {
        self.inner.version
    }

    /// True iff the identifier recomputes from this record's timestamp
    /// and the given bytes.
    fn matches(&self, data: &[u8]) -> PyResult<bool> {
        w3id_core::recompute_matches(&self.inner, &CanonicalObject::ingest(data)).map_err(to_py_err)
    }

    /// The single-line sidecar JSON form.
    fn to_json(&self) -> String {
        self.inner.to_json()
    }

    #[staticmethod]
    fn from_json(raw: &str) -> PyResult<Self> {
        Ok(PyIdRecord { inner: w3id_core::IdRecord::from_json(raw).map_err(to_py_err)? })
    }

    fn __repr__(&self) -> String {
        format!("IdRecord(w3id='{}', timestamp='{}')", self.inner.w3id, self.inner.timestamp)
    }

    fn __eq__(&self, other: &PyIdRecord) -> bool {
        self.inner == other.inner
    }
}

/// The public/private halves of an identifier.
#[pyclass(name = "KeyPair", frozen)]
struct PyKeyPair {
    inner: w3id_core::KeyPair,
}

#[pymethods]
impl PyKeyPair {
    #[getter]
    fn public_key(&self) -> &str {
        self.inner.public_key()
    }

    #[getter]
    fn private_key(&self) -> &str {
        self.inner.private_key()
    }

    /// Reassemble the full 64-character identifier.
    fn w3id(&self) -> String {
        self.inner.w3id()
    }

    fn __repr__(&self) -> String {
        format!("KeyPair(public_key='{}', private_key=...)", self.inner.public_key())
    }
}

/// Validation outcome of a chain against an object.
#[pyclass(name = "ChainReport", frozen)]
struct PyChainReport {
    inner: w3id_core::ChainReport,
}

#[pymethods]
impl PyChainReport {
    #[getter]
    fn per_record_match(&self) -> Vec<bool> {
        self.inner.per_record_match.to_vec()
    }

    #[getter]
    fn causality_ok(&self) -> bool {
        self.inner.causality_ok
    }

    #[getter]
    fn accepted(&self) -> bool {
        self.inner.accepted
    }

    #[getter]
    fn policy(&self) -> String {
        self.inner.policy.to_string()
    }

    fn __repr__(&self) -> String {
        format!(
            "ChainReport(accepted={}, causality_ok={}, per_record_match={:?})",
            self.inner.accepted, self.inner.causality_ok, self.inner.per_record_match
        )
    }
}

/// Four records over one object with strictly increasing timestamps.
#[pyclass(name = "QuadChain", frozen)]
struct PyQuadChain {
    inner: w3id_core::QuadChain,
}

#[pymethods]
impl PyQuadChain {
    #[getter]
    fn records(&self) -> Vec<PyIdRecord> {
        self.inner.records().iter().map(|r| PyIdRecord { inner: r.clone() }).collect()
    }

    /// JSON array of the four sidecar records.
    fn to_json(&self) -> String {
        self.inner.to_json()
    }

    #[staticmethod]
    fn from_json(raw: &str) -> PyResult<Self> {
        Ok(PyQuadChain { inner: w3id_core::QuadChain::from_json(raw).map_err(to_py_err)? })
    }

    /// Validate against object bytes. `policy` is `'all'` or `'three'`.
    #[pyo3(signature = (data, policy = "all"))]
    fn validate(&self, data: &[u8], policy: &str) -> PyResult<PyChainReport> {
        let policy = parse_policy(policy)?;
        let report =
            w3id_core::validate_chain(&self.inner, &CanonicalObject::ingest(data), policy)
                .map_err(to_py_err)?;
        Ok(PyChainReport { inner: report })
    }
}

/// Resolver entry stored for a registered identifier.
#[pyclass(name = "RegistryRecord", frozen)]
struct PyRegistryRecord {
    inner: w3id_core::RegistryRecord,
}

#[pymethods]
impl PyRegistryRecord {
    #[getter]
    fn public_key(&self) -> &str {
        &self.inner.public_key
    }

    #[getter]
    fn private_digest(&self) -> &str {
        &self.inner.private_digest
    }

    #[getter]
    fn timestamp(&self) -> String {
        self.inner.timestamp.format()
    }

    #[getter]
    fn content_digest(&self) -> &str {
        &self.inner.content_digest
    }

    #[getter]
    fn platform(&self) -> &str {
        &self.inner.platform
    }

    #[getter]
    fn location_uri(&self) -> &str {
        &self.inner.location_uri
    }

    #[getter]
    fn created_at(&self) -> String {
        self.inner.created_at.format()
    }

    fn __repr__(&self) -> String {
        format!(
            "RegistryRecord(public_key='{}', platform='{}')",
            self.inner.public_key, self.inner.platform
        )
    }
}

/// Durable resolver backed by an append-only record log.
#[pyclass(name = "Registry")]
struct PyRegistry {
    inner: w3id_core::Registry,
}

#[pymethods]
impl PyRegistry {
    #[new]
    fn new(path: &str) -> PyResult<Self> {
        Ok(PyRegistry { inner: w3id_core::Registry::open(path).map_err(to_py_err)? })
    }

    /// Verify the record against the bytes, then store a resolver entry.
    /// The private half is digested and never persisted raw.
    #[pyo3(signature = (record, data, platform = "", location_uri = ""))]
    fn register(
        &self,
        record: &PyIdRecord,
        data: &[u8],
        platform: &str,
        location_uri: &str,
    ) -> PyResult<PyRegistryRecord> {
        let stored = self
            .inner
            .register(
                &record.inner,
                &CanonicalObject::ingest(data),
                platform,
                location_uri,
                &w3id_core::SystemClock,
            )
            .map_err(to_py_err)?;
        Ok(PyRegistryRecord { inner: stored })
    }

    fn resolve(&self, public_key: &str) -> PyResult<PyRegistryRecord> {
        Ok(PyRegistryRecord { inner: self.inner.resolve(public_key).map_err(to_py_err)? })
    }

    /// Check a presented private key (or full hash) against the stored
    /// digest.
    fn authenticate(&self, public_key: &str, presented: &str) -> PyResult<bool> {
        self.inner.authenticate(public_key, presented).map_err(to_py_err)
    }

    /// Public keys registered for this content digest, oldest first.
    fn find_duplicates(&self, content_digest: &str) -> PyResult<Vec<String>> {
        self.inner.find_duplicates(content_digest).map_err(to_py_err)
    }

    fn __len__(&self) -> usize {
        self.inner.len()
    }
}

/// Generate an identifier for `data`. With no timestamp a process-wide
/// monotonic issuer guarantees a fresh, strictly increasing instant.
#[pyfunction]
#[pyo3(signature = (data, timestamp = None))]
fn generate(data: &[u8], timestamp: Option<&str>) -> PyResult<PyIdRecord> {
    let obj = CanonicalObject::ingest(data);
    let record = match timestamp {
        Some(raw) => w3id_core::generate(&parse_timestamp(raw)?, &obj),
        None => w3id_core::generate_now(&obj, global_issuer()).map_err(to_py_err)?,
    };
    Ok(PyIdRecord { inner: record })
}

/// Generate four records over `data` with strictly increasing timestamps.
#[pyfunction]
fn generate_chain(data: &[u8]) -> PyResult<PyQuadChain> {
    let chain = w3id_core::generate_chain(&CanonicalObject::ingest(data), global_issuer())
        .map_err(to_py_err)?;
    Ok(PyQuadChain { inner: chain })
}

/// Split a 64-character identifier into its public and private halves.
#[pyfunction]
fn split(w3id: &str) -> PyResult<PyKeyPair> {
    Ok(PyKeyPair { inner: w3id_core::split(w3id).map_err(to_py_err)? })
}

/// True iff the public half of the identifier recomputed from
/// `(timestamp, data)` equals `public_key`.
#[pyfunction]
fn public_verify(data: &[u8], timestamp: &str, public_key: &str) -> PyResult<bool> {
    w3id_core::public_verify(&CanonicalObject::ingest(data), &parse_timestamp(timestamp)?, public_key)
        .map_err(to_py_err)
}

/// Constant-time comparison of a presented private key (or full hash)
/// against the reference private half.
#[pyfunction]
fn private_authenticate(presented: &str, reference_private: &str) -> PyResult<bool> {
    w3id_core::private_authenticate(presented, reference_private).map_err(to_py_err)
}

/// SHA-256 of the bytes alone (no timestamp): the duplicate-detection key.
#[pyfunction]
fn content_digest(data: &[u8]) -> String {
    CanonicalObject::ingest(data).content_digest()
}

/// Lowercase hex rendering of the bytes.
#[pyfunction]
fn to_hex(data: &[u8]) -> String {
    CanonicalObject::ingest(data).to_hex()
}

/// Current UTC time in the 20-digit wire form.
#[pyfunction]
fn now_timestamp() -> PyResult<String> {
    Ok(w3id_core::now_utc(&w3id_core::SystemClock).map_err(to_py_err)?.format())
}

/// Render an identifier as QR ASCII art (two characters per module).
#[pyfunction]
#[pyo3(signature = (w3id, ec = "M"))]
fn render_qr_ascii(w3id: &str, ec: &str) -> PyResult<String> {
    Ok(w3id_core::render_qr(w3id, parse_ec(ec)?).map_err(to_py_err)?.to_ascii())
}

/// Render an identifier as a grayscale PNG and return the encoded bytes.
#[pyfunction]
#[pyo3(signature = (w3id, ec = "M", scale = 8))]
fn render_qr_png(py: Python<'_>, w3id: &str, ec: &str, scale: u32) -> PyResult<Py<pyo3::types::PyBytes>> {
    let png = w3id_core::render_qr(w3id, parse_ec(ec)?).map_err(to_py_err)?.to_png(scale);
    Ok(pyo3::types::PyBytes::new(py, &png).into())
}

#[pymodule]
fn w3id(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<PyIdRecord>()?;
    m.add_class::<PyKeyPair>()?;
    m.add_class::<PyQuadChain>()?;
    m.add_class::<PyChainReport>()?;
    m.add_class::<PyRegistry>()?;
    m.add_class::<PyRegistryRecord>()?;
    m.add_function(wrap_pyfunction!(generate, m)?)?;
    m.add_function(wrap_pyfunction!(generate_chain, m)?)?;
    m.add_function(wrap_pyfunction!(split, m)?)?;
    m.add_function(wrap_pyfunction!(public_verify, m)?)?;
    m.add_function(wrap_pyfunction!(private_authenticate, m)?)?;
    m.add_function(wrap_pyfunction!(content_digest, m)?)?;
    m.add_function(wrap_pyfunction!(to_hex, m)?)?;
    m.add_function(wrap_pyfunction!(now_timestamp, m)?)?;
    m.add_function(wrap_pyfunction!(render_qr_ascii, m)?)?;
    m.add_function(wrap_pyfunction!(render_qr_png, m)?)?;
    Ok(())
}
