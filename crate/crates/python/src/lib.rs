use std::collections::BTreeMap;
use std::sync::Arc;

use pyo3::create_exception;
use pyo3::exceptions::{PyException, PyValueError};
use pyo3::prelude::*;

use icelattice::derived::{theta, WindowedAisle};
use icelattice::iceseq::{enumerate_full_sequences, is_ice, is_narrow, narrow_iff_ice_scan, IceSequence};
use icelattice::{BoundQuiverAlgebra, DerivedCalc, Error, IndCatalog, Subcat, SubcatCalc, TorsLattice};

create_exception!(icelattice, Falsified, PyException, "A checked mathematical statement failed.");
create_exception!(icelattice, ResourceLimit, PyException, "An enumeration exceeded its size cap.");

fn py_err(e: Error) -> PyErr {
    match e {
        Error::Falsification(msg) => Falsified::new_err(msg),
        Error::CapExceeded(_) | Error::IncompleteCatalog(_) => ResourceLimit::new_err(e.to_string()),
        other => PyValueError::new_err(other.to_string()),
    }
}

trait IntoPyResult<T> {
    fn py(self) -> PyResult<T>;
}

impl<T> IntoPyResult<T> for icelattice::Result<T> {
    fn py(self) -> PyResult<T> {
        self.map_err(py_err)
    }
}

/// A bound quiver algebra together with its catalog of indecomposables.
///
/// Subcategories are passed and returned as lists of module labels such as
/// `["2", "21", "321"]`.
#[pyclass(module = "icelattice", frozen)]
struct Algebra {
    calc: Arc<SubcatCalc>,
}

impl Algebra {
    fn cat(&self) -> &IndCatalog {
        self.calc.catalog()
    }

    fn subcat(&self, labels: Vec<String>) -> PyResult<Subcat> {
        Subcat::parse(self.cat(), &labels.join(",")).py()
    }

    fn labels(&self, s: Subcat) -> Vec<String> {
        s.labels(self.cat())
    }

    fn member(&self, label: &str) -> PyResult<usize> {
        self.cat()
            .index_of(label)
            .ok_or_else(|| PyValueError::new_err(format!("`{label}` is not an indecomposable")))
    }

    fn sequence(&self, lo: i32, entries: Vec<Vec<String>>) -> PyResult<IceSequence> {
        let entries = entries.into_iter().map(|e| self.subcat(e)).collect::<PyResult<Vec<_>>>()?;
        IceSequence::full_sequence(self.cat(), lo, entries).py()
    }
}

#[pymethods]
impl Algebra {
    /// Loads a builtin (`lineA:n`, `paperNakayama`) or an algebra JSON file.
    #[new]
    fn new(source: &str) -> PyResult<Self> {
        let alg = Arc::new(BoundQuiverAlgebra::load(source).py()?);
        let cat = Arc::new(IndCatalog::build(alg).py()?);
        Ok(Algebra { calc: Arc::new(SubcatCalc::new(cat).py()?) })
    }

    #[getter]
    fn name(&self) -> String {
        self.cat().algebra().name().to_string()
    }

    #[getter]
    fn dim(&self) -> usize {
        self.cat().algebra().dim()
    }

    #[getter]
    fn is_hereditary(&self) -> bool {
        self.cat().algebra().is_hereditary()
    }

    fn indecomposables(&self) -> Vec<String> {
        self.cat().labels().to_vec()
    }

    fn dimension_vector(&self, label: &str) -> PyResult<Vec<usize>> {
        Ok(self.cat().member(self.member(label)?).dims().to_vec())
    }

    fn hom(&self, m: &str, n: &str) -> PyResult<usize> {
        Ok(self.cat().hom(self.member(m)?, self.member(n)?))
    }

    fn ext(&self, m: &str, n: &str) -> PyResult<usize> {
        Ok(self.cat().ext(self.member(m)?, self.member(n)?))
    }

    fn fac(&self, labels: Vec<String>) -> PyResult<Vec<String>> {
        Ok(self.labels(self.calc.fac_closure(self.subcat(labels)?)))
    }

    fn is_torsion_class(&self, labels: Vec<String>) -> PyResult<bool> {
        self.calc.is_torsion_class(self.subcat(labels)?).py()
    }

    fn is_wide(&self, labels: Vec<String>) -> PyResult<bool> {
        self.calc.is_wide(self.subcat(labels)?).py()
    }

    fn is_ice_closed(&self, labels: Vec<String>) -> PyResult<bool> {
        self.calc.is_ice_closed(self.subcat(labels)?).py()
    }

    fn alpha(&self, labels: Vec<String>) -> PyResult<Vec<String>> {
        Ok(self.labels(self.calc.alpha(self.subcat(labels)?).py()?))
    }

    fn torsion_lattice(&self) -> PyResult<Lattice> {
        Ok(Lattice { inner: Arc::new(TorsLattice::build(self.calc.clone()).py()?) })
    }

    /// Whether the sequence with entries `C(lo), C(lo+1), ...` (everything
    /// below, zero above) is an ICE sequence, and whether it is narrow.
    fn check_sequence(&self, lo: i32, entries: Vec<Vec<String>>) -> PyResult<(bool, bool)> {
        let seq = self.sequence(lo, entries)?;
        Ok((is_ice(&self.calc, &seq).py()?, is_narrow(&self.calc, &seq).py()?))
    }

    /// Full ICE sequences `C(1), ..., C(n)` with `C(0)` everything.
    fn ice_sequences(&self, n: usize) -> PyResult<Vec<Vec<Vec<String>>>> {
        let seqs = enumerate_full_sequences(&self.calc, n).py()?;
        Ok(seqs.iter().map(|s| s.entries().iter().map(|&e| self.labels(e)).collect()).collect())
    }

    /// Counts from the exhaustive narrow/ICE comparison on a window.
    fn narrow_iff_ice(&self, window: usize) -> PyResult<BTreeMap<String, usize>> {
        let r = narrow_iff_ice_scan(&self.calc, window).py()?;
        Ok(BTreeMap::from([
            ("tuples".to_string(), r.tuples),
            ("decreasing".to_string(), r.decreasing),
            ("narrow".to_string(), r.narrow),
            ("ice".to_string(), r.ice),
            ("disagreements".to_string(), r.disagreements.len()),
        ]))
    }

    /// The aisle of the full ICE sequence with entries `C(lo), ..., C(0)`.
    fn aisle(&self, lo: i32, entries: Vec<Vec<String>>) -> PyResult<Aisle> {
        let seq = self.sequence(lo, entries)?;
        let aisle = theta(self.cat(), &seq, lo).py()?;
        Ok(Aisle { calc: self.calc.clone(), inner: aisle })
    }

    fn __repr__(&self) -> String {
        format!("Algebra({:?}, indecomposables={})", self.name(), self.cat().len())
    }
}

/// The lattice of torsion classes.
#[pyclass(module = "icelattice", frozen, name = "TorsLattice")]
struct Lattice {
    inner: Arc<TorsLattice>,
}

impl Lattice {
    fn labels(&self, s: Subcat) -> Vec<String> {
        s.labels(self.inner.calc().catalog())
    }
}

#[pymethods]
impl Lattice {
    fn __len__(&self) -> usize {
        self.inner.len()
    }

    fn elements(&self) -> Vec<Vec<String>> {
        self.inner.elements().iter().map(|&s| self.labels(s)).collect()
    }

    /// Pairs `(i, j)` of element indices with `j` a lower cover of `i`.
    fn covers(&self) -> Vec<(usize, usize)> {
        self.inner.covers().to_vec()
    }

    fn hasse_dot(&self) -> String {
        self.inner.hasse_dot()
    }

    fn to_json(&self) -> String {
        self.inner.to_json().to_string()
    }

    /// Checks every wide interval against the torsion lattice of its heart
    /// and returns how many were checked.
    fn check_wide_intervals(&self) -> PyResult<usize> {
        let mut checked = 0;
        for w in self.inner.intervals() {
            if self.inner.is_wide_interval(&w).py()? {
                self.inner.interval_tors_iso_check(&w).py()?;
                checked += 1;
            }
        }
        Ok(checked)
    }

    /// Decreasing sequences of maximal meet intervals as `(lower, upper)` pairs.
    fn mmi_sequences(&self, n: usize) -> PyResult<Vec<Vec<(Vec<String>, Vec<String>)>>> {
        let chains = self.inner.enumerate_mmi_sequences(n).py()?;
        Ok(chains
            .iter()
            .map(|c| c.iter().map(|i| (self.labels(i.lower), self.labels(i.upper))).collect())
            .collect())
    }
}

/// An aisle in the bounded derived category, given by one layer per degree.
#[pyclass(module = "icelattice", frozen)]
struct Aisle {
    calc: Arc<SubcatCalc>,
    inner: WindowedAisle,
}

#[pymethods]
impl Aisle {
    #[getter]
    fn window(&self) -> (i32, i32) {
        (self.inner.lo(), self.inner.hi())
    }

    fn layer(&self, k: i32) -> Vec<String> {
        self.inner.layer(k).labels(self.calc.catalog())
    }

    fn coaisle_layer(&self, k: i32) -> Vec<String> {
        self.inner.coaisle_layer(self.calc.catalog(), k).labels(self.calc.catalog())
    }

    /// Runs the orthogonality and approximation checks; raises on hard errors.
    fn is_t_structure(&self) -> PyResult<bool> {
        let derived = DerivedCalc::new(self.calc.clone()).py()?;
        Ok(derived.verify_t_structure(&self.inner).py()?.passes())
    }

    fn to_json(&self) -> String {
        self.inner.to_json(self.calc.catalog()).to_string()
    }

    fn to_dot(&self) -> String {
        self.inner.to_dot(self.calc.catalog())
    }
}

#[pymodule]
#[pyo3(name = "icelattice")]
fn icelattice_py(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<Algebra>()?;
    m.add_class::<Lattice>()?;
    m.add_class::<Aisle>()?;
    m.add("Falsified", m.py().get_type_bound::<Falsified>())?;
    m.add("ResourceLimit", m.py().get_type_bound::<ResourceLimit>())?;
    Ok(())
}
