//! The bundled theories and the manifest that orders them.

use std::path::Path;

use crate::error::Error;
use crate::kernel::{Report, Theory};

const FILES: [(&str, &str); 5] = [
    ("logic.dlog", include_str!("../../../stdlib/logic.dlog")),
    ("zfc.dlog", include_str!("../../../stdlib/zfc.dlog")),
    ("relfun.dlog", include_str!("../../../stdlib/relfun.dlog")),
    ("rel_oo.dlog", include_str!("../../../stdlib/rel_oo.dlog")),
    ("groups.dlog", include_str!("../../../stdlib/groups.dlog")),
];

const MANIFEST: &str = include_str!("../../../stdlib/manifest");

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ManifestEntry {
    pub path: String,
    pub declarations: usize,
    /// Nonlogical axioms the file must declare, in order. Empty means none.
    pub axioms: Vec<String>,
}

/// Files to load in order. One line per file: path, declaration count,
/// axiom names. `#` starts a comment.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Manifest {
    pub entries: Vec<ManifestEntry>,
}

impl Manifest {
    pub fn parse(text: &str) -> Result<Manifest, Error> {
        let mut entries = Vec::new();
        for (i, line) in text.lines().enumerate() {
            let line = line.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let mut words = line.split_whitespace();
            let path = words.next().expect("nonempty line").to_string();
            let declarations = words.next().and_then(|w| w.parse().ok()).ok_or_else(|| {
                Error::Manifest(format!("line {}: expected a declaration count", i + 1))
            })?;
            entries.push(ManifestEntry {
                path,
                declarations,
                axioms: words.map(str::to_string).collect(),
            });
        }
        Ok(Manifest { entries })
    }

    /// The manifest of the bundled files.
    pub fn builtin() -> Manifest {
        Manifest::parse(MANIFEST).expect("bundled manifest")
    }

    /// The entries before the first one whose file name is in `names`.
    pub fn prefix_before(&self, names: &[&str]) -> Manifest {
        let file_name = |p: &str| {
            Path::new(p)
                .file_name()
                .map(|n| n.to_string_lossy().into_owned())
        };
        let wanted: Vec<Option<String>> = names.iter().map(|n| file_name(n)).collect();
        let entries = self
            .entries
            .iter()
            .take_while(|e| !wanted.contains(&file_name(&e.path)))
            .cloned()
            .collect();
        Manifest { entries }
    }
}

/// The text of a bundled file.
pub fn builtin_source(name: &str) -> Option<&'static str> {
    FILES.iter().find(|(n, _)| *n == name).map(|(_, s)| *s)
}

/// The reports of each loaded file, by path.
pub type FileReports = Vec<(String, Vec<Report>)>;

/// Loads the files of a manifest in order, checking the declaration counts
/// and axiom names. `source` reads a file named by the manifest.
pub fn load_stdlib(
    th: &Theory,
    manifest: &Manifest,
    mut source: impl FnMut(&str) -> Result<String, Error>,
) -> Result<(Theory, FileReports), Error> {
    let mut th = th.clone();
    let mut all = Vec::new();
    for e in &manifest.entries {
        let text = source(&e.path)?;
        let (reports, r) = th.load_source(&text, &e.path);
        th = r?;
        if reports.len() != e.declarations {
            return Err(Error::Manifest(format!(
                "{} has {} declarations, the manifest says {}",
                e.path,
                reports.len(),
                e.declarations
            )));
        }
        let axioms: Vec<&str> = reports
            .iter()
            .filter(|r| r.kind == "axiom")
            .map(|r| r.name.as_str())
            .collect();
        if !e.axioms.is_empty() && axioms != e.axioms {
            return Err(Error::Manifest(format!(
                "{} declares the axioms {}, the manifest says {}",
                e.path,
                axioms.join(" "),
                e.axioms.join(" ")
            )));
        }
        all.push((e.path.clone(), reports));
    }
    Ok((th, all))
}

/// Loads the bundled files.
pub fn load_builtin(th: &Theory) -> Result<Theory, Error> {
    load_stdlib(th, &Manifest::builtin(), |p| {
        builtin_source(p)
            .map(str::to_string)
            .ok_or_else(|| Error::Manifest(format!("no bundled file {p}")))
    })
    .map(|r| r.0)
}

/// Loads the files of `dir/manifest`.
pub fn load_dir(th: &Theory, dir: &Path) -> Result<Theory, Error> {
    let (m, _) = read_dir_manifest(dir)?;
    load_stdlib(th, &m, |p| read(&dir.join(p))).map(|r| r.0)
}

/// The manifest of a directory.
pub fn read_dir_manifest(dir: &Path) -> Result<(Manifest, std::path::PathBuf), Error> {
    let path = dir.join("manifest");
    Ok((Manifest::parse(&read(&path)?)?, path))
}

pub fn read(path: &Path) -> Result<String, Error> {
    std::fs::read_to_string(path).map_err(|e| Error::Io {
        path: path.display().to_string(),
        msg: e.to_string(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::kernel::Options;

    #[test]
    fn manifest_lines() {
        let m = Manifest::parse("# c\na.dlog 3 X Y\n\nb.dlog 0\n").unwrap();
        assert_eq!(m.entries.len(), 2);
        assert_eq!(m.entries[0].axioms, vec!["X", "Y"]);
        assert!(Manifest::parse("a.dlog x").is_err());
        let p = Manifest::builtin().prefix_before(&["some/dir/relfun.dlog"]);
        assert_eq!(
            p.entries
                .iter()
                .map(|e| e.path.as_str())
                .collect::<Vec<_>>(),
            ["logic.dlog", "zfc.dlog"]
        );
    }

    #[test]
    fn bundled_files_load() {
        let th = load_builtin(&Theory::new(Options::default())).unwrap();
        assert_eq!(th.nonlogical_axioms().len(), 9);
    }

    #[test]
    fn count_mismatch_is_reported() {
        let m = Manifest::parse("logic.dlog 38").unwrap();
        let r = load_stdlib(&Theory::new(Options::default()), &m, |p| {
            Ok(builtin_source(p).unwrap().into())
        });
        assert!(matches!(r, Err(Error::Manifest(_))));
    }
}
