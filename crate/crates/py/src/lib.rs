use pyo3::prelude::*;

#[pymodule]
fn gdlm_py(_m: &Bound<'_, PyModule>) -> PyResult<()> {
    Ok(())
}
