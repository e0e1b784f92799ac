use pyo3::exceptions::{PyKeyError, PyValueError};
use pyo3::prelude::*;

use surfglue::braidcheck::{self, BraidWord};
use surfglue::catalog::CatalogError;
use surfglue::coexistence;
use surfglue::gluer::{Bounds, Gluer, GluerError, Status, SurfaceClass};

type ShapeRow = (Vec<String>, Vec<String>, Option<String>);
type VerdictRow = (String, Option<String>, Option<String>, Option<String>);

fn catalog_err(e: CatalogError) -> PyErr {
    match e {
        CatalogError::NotFound { .. } => PyKeyError::new_err(e.to_string()),
        other => PyValueError::new_err(other.to_string()),
    }
}

fn gluer_err(e: GluerError) -> PyErr {
    match e {
        GluerError::Catalog(c) => catalog_err(c),
        other => PyValueError::new_err(other.to_string()),
    }
}

/// Piece kinds and rule tables.
#[pyclass(name = "Catalog", frozen)]
struct PyCatalog {
    inner: surfglue::Catalog,
}

#[pymethods]
impl PyCatalog {
    /// The shipped catalog, or one parsed from a JSON string.
    #[new]
    #[pyo3(signature = (json=None))]
    fn new(json: Option<&str>) -> PyResult<Self> {
        let inner = match json {
            Some(text) => surfglue::Catalog::from_json(text).map_err(catalog_err)?,
            None => surfglue::Catalog::builtin(),
        };
        Ok(PyCatalog { inner })
    }

    fn kinds(&self) -> Vec<String> {
        self.inner.kinds().iter().map(|k| k.name.clone()).collect()
    }

    /// (genus, boundary circles, knot punctures, euler characteristic)
    fn kind(&self, name: &str) -> PyResult<(u32, u32, u32, i64)> {
        let k = self.inner.lookup_kind(name).map_err(catalog_err)?;
        Ok((k.genus, k.boundary_count, k.knot_punctures, k.euler_char()))
    }

    fn patterns(&self, name: &str) -> PyResult<Vec<Vec<Vec<u32>>>> {
        let ps = self.inner.boundary_patterns(name).map_err(catalog_err)?;
        Ok(ps.iter().map(|p| p.to_labels()).collect())
    }

    fn can_coexist(&self, x: &str, y: &str) -> PyResult<bool> {
        coexistence::can_coexist(&self.inner, x, y).map_err(catalog_err)
    }

    fn to_json(&self) -> String {
        self.inner.to_json()
    }

    /// Accepted shapes as (side_a, side_b, label) with label None when the
    /// normalization table has no entry.
    #[pyo3(signature = (genus, punctures, max_pieces=4, max_circles=8))]
    fn enumerate(
        &self,
        py: Python<'_>,
        genus: u32,
        punctures: u32,
        max_pieces: usize,
        max_circles: u32,
    ) -> PyResult<Vec<ShapeRow>> {
        let target = SurfaceClass { genus, punctures };
        let bounds = Bounds { max_pieces_per_side: max_pieces, max_total_circles: max_circles };
        let e = py
            .detach(|| Gluer::new(&self.inner).enumerate(target, bounds))
            .map_err(gluer_err)?;
        Ok(e.accepted
            .iter()
            .map(|a| {
                let (x, y) = a.shape.names(&self.inner);
                (x, y, a.label.map(|l| l.as_str().to_string()))
            })
            .collect())
    }

    /// Verdict for one shape: (status, label, reason, citation).
    fn check(
        &self,
        side1: Vec<String>,
        side2: Vec<String>,
        genus: u32,
        punctures: u32,
    ) -> PyResult<VerdictRow> {
        let s1: Vec<&str> = side1.iter().map(String::as_str).collect();
        let s2: Vec<&str> = side2.iter().map(String::as_str).collect();
        let v = Gluer::new(&self.inner)
            .check_names(&s1, &s2, SurfaceClass { genus, punctures })
            .map_err(gluer_err)?;
        let status = if v.status == Status::Accepted { "accepted" } else { "rejected" };
        Ok((
            status.to_string(),
            v.label.map(|l| l.as_str().to_string()),
            v.reason.map(|r| r.as_str().to_string()),
            v.citation,
        ))
    }
}

fn word(strands: u32, letters: Vec<i32>) -> PyResult<BraidWord> {
    BraidWord::new(strands, letters).map_err(|e| PyValueError::new_err(e.to_string()))
}

#[pyfunction]
fn braid_is_trivial(strands: u32, letters: Vec<i32>) -> PyResult<bool> {
    braidcheck::try_is_trivial(&word(strands, letters)?).map_err(|e| PyValueError::new_err(e.to_string()))
}

#[pyfunction]
fn braid_permutation(strands: u32, letters: Vec<i32>) -> PyResult<Vec<u32>> {
    Ok(braidcheck::permutation(&word(strands, letters)?))
}

#[pyfunction]
fn braid_free_reduce(strands: u32, letters: Vec<i32>) -> PyResult<Vec<i32>> {
    Ok(braidcheck::free_reduce(&word(strands, letters)?).letters().to_vec())
}

/// Run the command-line interface; returns (exit status, stdout, stderr).
#[pyfunction]
fn run_cli(args: Vec<String>) -> (u8, String, String) {
    let out = surfglue::cli::run(std::iter::once("surfglue".to_string()).chain(args));
    (out.code, out.stdout, out.stderr)
}

#[pymodule]
fn surfglue_py(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<PyCatalog>()?;
    m.add_function(wrap_pyfunction!(braid_is_trivial, m)?)?;
    m.add_function(wrap_pyfunction!(braid_permutation, m)?)?;
    m.add_function(wrap_pyfunction!(braid_free_reduce, m)?)?;
    m.add_function(wrap_pyfunction!(run_cli, m)?)?;
    Ok(())
}
