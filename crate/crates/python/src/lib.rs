//! Python bindings: load theories, replay proofs, print instances.

use pyo3::create_exception;
use pyo3::exceptions::PyException;
use pyo3::prelude::*;
use pyo3::types::PyDict;

use dlogic::kernel::{self, Options, Verdict};
use dlogic::parser::{parse_construct, render, Alphabet, Bindings};
use dlogic::stdlib;
use dlogic::Error;

create_exception!(dlogic_py, DlogicError, PyException);

fn err(e: Error) -> PyErr {
    DlogicError::new_err(e.to_string())
}

fn alphabet(unicode: bool) -> Alphabet {
    if unicode {
        Alphabet::Unicode
    } else {
        Alphabet::Ascii
    }
}

/// A theory. Loading text replaces it with the extended theory, or leaves
/// it unchanged and raises `DlogicError`.
#[pyclass(module = "dlogic_py")]
struct Theory {
    inner: kernel::Theory,
}

#[pymethods]
impl Theory {
    #[new]
    #[pyo3(signature = (stdlib = true, max_atoms = 16, allow_asserted = false))]
    fn new(stdlib: bool, max_atoms: usize, allow_asserted: bool) -> PyResult<Self> {
        let th = kernel::Theory::new(Options {
            max_atoms,
            allow_asserted,
        });
        let inner = if stdlib {
            stdlib::load_builtin(&th).map_err(err)?
        } else {
            th
        };
        Ok(Theory { inner })
    }

    /// Loads declarations and returns one (kind, name, verdict) per declaration.
    #[pyo3(signature = (text, origin = ""))]
    fn load(&mut self, text: &str, origin: &str) -> PyResult<Vec<(String, String, String)>> {
        let (reports, r) = self.inner.load_source(text, origin);
        self.inner = r.map_err(err)?;
        Ok(reports
            .into_iter()
            .map(|r| (r.kind.to_string(), r.name, r.verdict.word().to_string()))
            .collect())
    }

    /// The replay trace of a theorem's proof, one line per step.
    fn trace(&self, name: &str) -> PyResult<Vec<String>> {
        let rec = self
            .inner
            .theorems()
            .get(name)
            .ok_or_else(|| DlogicError::new_err(format!("no theorem named {name}")))?;
        let Some(script) = &rec.script else {
            return Ok(vec![]);
        };
        let premises = match &rec.status {
            kernel::Status::Rule { premises } => premises.as_slice(),
            _ => &[],
        };
        let r = kernel::replay_rule(&self.inner, premises, &rec.statement, script);
        Ok(r.trace.iter().map(|l| l.to_string()).collect())
    }

    fn axioms(&self) -> Vec<String> {
        self.inner
            .nonlogical_axioms()
            .keys()
            .map(|k| k.to_string())
            .collect()
    }

    /// Theorem names with their status: proved, derived rule or asserted.
    fn theorems(&self) -> Vec<(String, String)> {
        self.inner
            .theorems()
            .values()
            .map(|t| {
                let v = match t.status {
                    kernel::Status::Proved => Verdict::Proved,
                    kernel::Status::Rule { .. } => Verdict::Rule,
                    kernel::Status::Asserted => Verdict::Asserted,
                };
                (t.name.to_string(), v.word().to_string())
            })
            .collect()
    }

    /// Parses a construct and prints it back.
    #[pyo3(signature = (text, unicode = false))]
    fn parse(&self, text: &str, unicode: bool) -> PyResult<String> {
        let c = parse_construct(text, self.inner.context(), None).map_err(err)?;
        Ok(render(&c, alphabet(unicode)))
    }

    /// Whether the propositional skeleton of a formula is a tautology.
    fn is_tautology(&self, formula: &str) -> PyResult<bool> {
        let c = parse_construct(formula, self.inner.context(), None).map_err(err)?;
        kernel::is_tautology(&c, self.inner.options().max_atoms).map_err(err)
    }

    /// An instance of a loaded axiom or theorem; `bindings` maps its
    /// syntactic variables to construct texts.
    #[pyo3(signature = (name, bindings, unicode = false))]
    fn instantiate(
        &self,
        name: &str,
        bindings: &Bound<'_, PyDict>,
        unicode: bool,
    ) -> PyResult<String> {
        let statement = match self.inner.nonlogical_axioms().get(name) {
            Some(a) => a.clone(),
            None => match self.inner.theorems().get(name) {
                Some(t) => t.statement.clone(),
                None => {
                    return Err(DlogicError::new_err(format!(
                        "no axiom or theorem named {name}"
                    )))
                }
            },
        };
        let vocab = self.inner.vocabulary();
        let mut b: Bindings = Vec::new();
        for (k, v) in bindings.iter() {
            let k: String = k.extract()?;
            let v: String = v.extract()?;
            let mode = vocab
                .synvar(&k)
                .ok_or_else(|| DlogicError::new_err(format!("{k} is not a syntactic variable")))?;
            b.push((
                k.as_str().into(),
                parse_construct(&v, self.inner.context(), Some(mode)).map_err(err)?,
            ));
        }
        let inst = kernel::instantiate_schema(&statement, &b, vocab).map_err(err)?;
        Ok(render(&inst, alphabet(unicode)))
    }
}

/// Runs the command line with `args` (without the program name) and returns
/// (exit status, standard output, standard error).
#[pyfunction]
fn run(args: Vec<String>) -> (i32, String, String) {
    let mut out = Vec::new();
    let mut errs = Vec::new();
    let argv = std::iter::once("dlogic".to_string()).chain(args);
    let code = dlogic::cli::run(argv, &mut out, &mut errs);
    (
        code,
        String::from_utf8_lossy(&out).into_owned(),
        String::from_utf8_lossy(&errs).into_owned(),
    )
}

#[pymodule]
fn dlogic_py(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<Theory>()?;
    m.add_function(wrap_pyfunction!(run, m)?)?;
    m.add("DlogicError", m.py().get_type::<DlogicError>())?;
    Ok(())
}
