//! Backend descriptions: qubit count, directed CNOT coupling map, basis gates.
//!
//! Coupling maps use the brace syntax `{0: [1, 2], 1: [2]}` where `a: [b]`
//! means a CNOT with `a` as control and `b` as target is available.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::path::Path;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::gates::GateName;
use crate::linalg::MAX_QUBITS;

pub const IBMQX2_COUPLING: &str = "{0: [1, 2], 1: [2], 3: [2, 4], 4: [2]}";
pub const IBMQX4_COUPLING: &str = "{1: [0], 2: [0, 1, 4], 3: [2, 4]}";

pub const BUILTIN_NAMES: [&str; 3] = ["ibmqx2", "ibmqx4", "custom"];

/// Gates every backend must offer.
pub const REQUIRED_BASIS: [GateName; 12] = [
    GateName::Id,
    GateName::X,
    GateName::Z,
    GateName::H,
    GateName::S,
    GateName::Sdg,
    GateName::T,
    GateName::Tdg,
    GateName::U1,
    GateName::U2,
    GateName::U3,
    GateName::Cx,
];

#[derive(Debug, Error, Clone, PartialEq)]
pub enum TopologyError {
    #[error("unknown backend `{0}`")]
    UnknownBackend(String),
    #[error("coupling map syntax error at column {column}: {message}")]
    Syntax { column: usize, message: String },
    #[error("qubit {index} out of range for {n_qubits}-qubit backend")]
    IndexOutOfRange { index: usize, n_qubits: usize },
    #[error("self-loop on qubit {0}")]
    SelfLoop(usize),
    #[error("control qubit {0} listed twice")]
    DuplicateControl(usize),
    #[error("backend qubit count {0} outside 1..={MAX_QUBITS}")]
    BadQubitCount(usize),
    #[error("basis is missing required gate `{0}`")]
    MissingBasisGate(GateName),
    #[error("unknown gate `{0}` in basis")]
    UnknownBasisGate(String),
    #[error("cannot read backend file: {0}")]
    Io(String),
    #[error("malformed backend file: {0}")]
    Config(String),
}

/// Directed CNOT adjacency: control → sorted, deduplicated targets.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct CouplingMap(BTreeMap<usize, Vec<usize>>);

impl CouplingMap {
    pub fn new(edges: impl IntoIterator<Item = (usize, usize)>) -> Self {
        let mut map: BTreeMap<usize, Vec<usize>> = BTreeMap::new();
        for (c, t) in edges {
            map.entry(c).or_default().push(t);
        }
        for targets in map.values_mut() {
            targets.sort_unstable();
            targets.dedup();
        }
        Self(map)
    }

    /// All ordered pairs among `n` qubits, both directions.
    pub fn fully_connected(n: usize) -> Self {
        Self::new((0..n).flat_map(|c| (0..n).filter(move |&t| t != c).map(move |t| (c, t))))
    }

    pub fn targets(&self, control: usize) -> &[usize] {
        self.0.get(&control).map(Vec::as_slice).unwrap_or(&[])
    }

    pub fn contains(&self, control: usize, target: usize) -> bool {
        self.targets(control).binary_search(&target).is_ok()
    }

    pub fn edges(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        self.0.iter().flat_map(|(&c, ts)| ts.iter().map(move |&t| (c, t)))
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    fn max_index(&self) -> Option<usize> {
        self.edges().map(|(c, t)| c.max(t)).max()
    }
}

/// Canonical form: keys ascending, targets ascending, `", "` separators.
impl fmt::Display for CouplingMap {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("{")?;
        for (i, (c, targets)) in self.0.iter().enumerate() {
            if i > 0 {
                f.write_str(", ")?;
            }
            write!(f, "{c}: [")?;
            for (j, t) in targets.iter().enumerate() {
                if j > 0 {
                    f.write_str(", ")?;
                }
                write!(f, "{t}")?;
            }
            f.write_str("]")?;
        }
        f.write_str("}")
    }
}

struct MapParser<'a> {
    bytes: &'a [u8],
    pos: usize,
}

impl<'a> MapParser<'a> {
    fn error(&self, message: impl Into<String>) -> TopologyError {
        TopologyError::Syntax {
            column: self.pos + 1,
            message: message.into(),
        }
    }

    fn skip_ws(&mut self) {
        while self.pos < self.bytes.len() && self.bytes[self.pos].is_ascii_whitespace() {
            self.pos += 1;
        }
    }

    fn peek(&mut self) -> Option<u8> {
        self.skip_ws();
        self.bytes.get(self.pos).copied()
    }

    fn expect(&mut self, ch: u8) -> Result<(), TopologyError> {
        match self.peek() {
            Some(b) if b == ch => {
                self.pos += 1;
                Ok(())
            }
            Some(b) => Err(self.error(format!("expected `{}`, found `{}`", ch as char, b as char))),
            None => Err(self.error(format!("expected `{}`, found end of input", ch as char))),
        }
    }

    fn integer(&mut self) -> Result<usize, TopologyError> {
        self.skip_ws();
        let start = self.pos;
        while self.pos < self.bytes.len() && self.bytes[self.pos].is_ascii_digit() {
            self.pos += 1;
        }
        if start == self.pos {
            return Err(self.error("expected qubit index"));
        }
        std::str::from_utf8(&self.bytes[start..self.pos])
            .ok()
            .and_then(|s| s.parse().ok())
            .ok_or_else(|| TopologyError::Syntax {
                column: start + 1,
                message: "qubit index too large".into(),
            })
    }

    /// `{` [entry (`,` entry)*] `}` with entry = int `:` `[` [int (`,` int)*] `]`.
    fn parse(&mut self) -> Result<Vec<(usize, Vec<usize>)>, TopologyError> {
        self.expect(b'{')?;
        let mut entries = Vec::new();
        if self.peek() == Some(b'}') {
            self.pos += 1;
        } else {
            loop {
                let control = self.integer()?;
                self.expect(b':')?;
                self.expect(b'[')?;
                let mut targets = Vec::new();
                if self.peek() == Some(b']') {
                    self.pos += 1;
                } else {
                    loop {
                        targets.push(self.integer()?);
                        match self.peek() {
                            Some(b',') => self.pos += 1,
                            Some(b']') => {
                                self.pos += 1;
                                break;
                            }
                            _ => return Err(self.error("expected `,` or `]`")),
                        }
                    }
                }
                entries.push((control, targets));
                match self.peek() {
                    Some(b',') => self.pos += 1,
                    Some(b'}') => {
                        self.pos += 1;
                        break;
                    }
                    _ => return Err(self.error("expected `,` or `}`")),
                }
            }
        }
        if self.peek().is_some() {
            return Err(self.error("trailing input after `}`"));
        }
        Ok(entries)
    }
}

/// Parses the brace syntax, optionally prefixed by `coupling_map =`.
pub fn parse_coupling_map(text: &str, n_qubits: usize) -> Result<CouplingMap, TopologyError> {
    let trimmed = text.trim_start();
    let offset = text.len() - trimmed.len();
    let body_start = match trimmed.strip_prefix("coupling_map") {
        Some(rest) => {
            let rest = rest.trim_start();
            if !rest.starts_with('=') {
                return Err(TopologyError::Syntax {
                    column: text.len() - rest.len() + 1,
                    message: "expected `=`".into(),
                });
            }
            text.len() - rest.len() + 1
        }
        None => offset,
    };
    let mut parser = MapParser {
        bytes: text.as_bytes(),
        pos: body_start,
    };
    let entries = parser.parse()?;
    let mut seen = BTreeSet::new();
    let mut edges = Vec::new();
    for (control, targets) in entries {
        if !seen.insert(control) {
            return Err(TopologyError::DuplicateControl(control));
        }
        for target in targets {
            for index in [control, target] {
                if index >= n_qubits {
                    return Err(TopologyError::IndexOutOfRange { index, n_qubits });
                }
            }
            if control == target {
                return Err(TopologyError::SelfLoop(control));
            }
            edges.push((control, target));
        }
    }
    Ok(CouplingMap::new(edges))
}

/// An emulated machine.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct BackendTopology {
    name: String,
    n_qubits: usize,
    coupling: CouplingMap,
    basis: BTreeSet<GateName>,
}

impl BackendTopology {
    pub fn new(
        name: impl Into<String>,
        n_qubits: usize,
        coupling: CouplingMap,
        basis: BTreeSet<GateName>,
    ) -> Result<Self, TopologyError> {
        if !(1..=MAX_QUBITS).contains(&n_qubits) {
            return Err(TopologyError::BadQubitCount(n_qubits));
        }
        if let Some(index) = coupling.max_index().filter(|&i| i >= n_qubits) {
            return Err(TopologyError::IndexOutOfRange { index, n_qubits });
        }
        if let Some((c, _)) = coupling.edges().find(|(c, t)| c == t) {
            return Err(TopologyError::SelfLoop(c));
        }
        if let Some(g) = REQUIRED_BASIS.into_iter().find(|g| !basis.contains(g)) {
            return Err(TopologyError::MissingBasisGate(g));
        }
        Ok(Self {
            name: name.into(),
            n_qubits,
            coupling,
            basis,
        })
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn n_qubits(&self) -> usize {
        self.n_qubits
    }

    pub fn coupling(&self) -> &CouplingMap {
        &self.coupling
    }

    pub fn basis(&self) -> &BTreeSet<GateName> {
        &self.basis
    }

    pub fn supports(&self, gate: GateName) -> bool {
        self.basis.contains(&gate)
    }

    /// Drops an optional gate from the basis. Required gates cannot be removed.
    pub fn remove_basis_gate(&mut self, gate: GateName) -> Result<(), TopologyError> {
        if REQUIRED_BASIS.contains(&gate) {
            return Err(TopologyError::MissingBasisGate(gate));
        }
        self.basis.remove(&gate);
        Ok(())
    }

    pub fn cnot_allowed(&self, control: usize, target: usize) -> Result<bool, TopologyError> {
        for index in [control, target] {
            if index >= self.n_qubits {
                return Err(TopologyError::IndexOutOfRange {
                    index,
                    n_qubits: self.n_qubits,
                });
            }
        }
        Ok(self.coupling.contains(control, target))
    }

    /// Loads a topology from a TOML file with `name`, `n_qubits`, `coupling`, `basis`.
    pub fn from_file(path: impl AsRef<Path>) -> Result<Self, TopologyError> {
        let text = std::fs::read_to_string(path.as_ref())
            .map_err(|e| TopologyError::Io(format!("{}: {e}", path.as_ref().display())))?;
        Self::from_toml(&text)
    }

    pub fn from_toml(text: &str) -> Result<Self, TopologyError> {
        let file: TopologyFile =
            toml::from_str(text).map_err(|e| TopologyError::Config(e.to_string()))?;
        let coupling = parse_coupling_map(&file.coupling, file.n_qubits)?;
        let basis = match file.basis {
            Some(names) => names
                .iter()
                .map(|n| n.parse().map_err(|_| TopologyError::UnknownBasisGate(n.clone())))
                .collect::<Result<_, _>>()?,
            None => full_basis(),
        };
        Self::new(file.name, file.n_qubits, coupling, basis)
    }

    pub fn to_toml(&self) -> String {
        let file = TopologyFile {
            name: self.name.clone(),
            n_qubits: self.n_qubits,
            coupling: self.coupling.to_string(),
            basis: Some(self.basis.iter().map(|g| g.as_str().to_string()).collect()),
        };
        toml::to_string(&file).expect("topology serializes")
    }
}

#[derive(Serialize, Deserialize)]
struct TopologyFile {
    name: String,
    n_qubits: usize,
    coupling: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    basis: Option<Vec<String>>,
}

fn full_basis() -> BTreeSet<GateName> {
    GateName::ALL.into_iter().collect()
}

/// The built-in backends: `ibmqx2`, `ibmqx4`, and the fully connected `custom`.
pub fn builtin(name: &str) -> Result<BackendTopology, TopologyError> {
    let coupling = match name {
        "ibmqx2" => parse_coupling_map(IBMQX2_COUPLING, 5)?,
        "ibmqx4" => parse_coupling_map(IBMQX4_COUPLING, 5)?,
        "custom" => CouplingMap::fully_connected(5),
        other => return Err(TopologyError::UnknownBackend(other.to_string())),
    };
    BackendTopology::new(name, 5, coupling, full_basis())
}

pub fn builtins() -> Vec<BackendTopology> {
    BUILTIN_NAMES
        .iter()
        .map(|n| builtin(n).expect("builtin backend"))
        .collect()
}

/// Resolves a `--backend` value: a builtin name, a path to a TOML file, or
/// the stem of `<name>.toml` inside `search_dir`.
pub fn resolve(spec: &str, search_dir: Option<&Path>) -> Result<BackendTopology, TopologyError> {
    let path = Path::new(spec);
    if !BUILTIN_NAMES.contains(&spec) && path.is_file() {
        return BackendTopology::from_file(path);
    }
    resolve_name(spec, search_dir)
}

/// Like [`resolve`] but never treats `name` as a path, so it is safe for
/// names received over the network.
pub fn resolve_name(name: &str, search_dir: Option<&Path>) -> Result<BackendTopology, TopologyError> {
    if BUILTIN_NAMES.contains(&name) {
        return builtin(name);
    }
    let plain = !name.is_empty() && name.chars().all(|c| c.is_ascii_alphanumeric() || c == '_' || c == '-');
    if let (true, Some(dir)) = (plain, search_dir) {
        let candidate = dir.join(format!("{name}.toml"));
        if candidate.is_file() {
            return BackendTopology::from_file(candidate);
        }
    }
    Err(TopologyError::UnknownBackend(name.to_string()))
}

/// Builtins followed by every loadable `*.toml` in `search_dir`, by file name.
pub fn available(search_dir: Option<&Path>) -> Vec<BackendTopology> {
    let mut out = builtins();
    let Some(dir) = search_dir else { return out };
    let Ok(entries) = std::fs::read_dir(dir) else { return out };
    let mut paths: Vec<_> = entries
        .filter_map(|e| e.ok().map(|e| e.path()))
        .filter(|p| p.extension().is_some_and(|x| x == "toml"))
        .collect();
    paths.sort();
    for p in paths {
        match BackendTopology::from_file(&p) {
            Ok(t) => out.push(t),
            Err(e) => log::warn!("skipping {}: {e}", p.display()),
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn builtin_maps() {
        let qx2 = builtin("ibmqx2").unwrap();
        assert_eq!(qx2.coupling().targets(0), &[1, 2]);
        assert_eq!(qx2.coupling().to_string(), IBMQX2_COUPLING);
        let qx4 = builtin("ibmqx4").unwrap();
        assert_eq!(qx4.coupling().targets(2), &[0, 1, 4]);
        assert_eq!(qx4.coupling().to_string(), IBMQX4_COUPLING);
        let custom = builtin("custom").unwrap();
        for c in 0..5 {
            for t in 0..5 {
                if c != t {
                    assert!(custom.cnot_allowed(c, t).unwrap());
                }
            }
        }
        assert_eq!(builtin("ibmqx5"), Err(TopologyError::UnknownBackend("ibmqx5".into())));
    }

    #[test]
    fn cnot_direction() {
        let qx2 = builtin("ibmqx2").unwrap();
        let qx4 = builtin("ibmqx4").unwrap();
        assert!(qx2.cnot_allowed(0, 2).unwrap());
        assert!(!qx4.cnot_allowed(0, 2).unwrap());
        assert!(qx4.cnot_allowed(2, 0).unwrap());
        assert!(!qx2.cnot_allowed(2, 0).unwrap());
        assert!(matches!(qx2.cnot_allowed(5, 0), Err(TopologyError::IndexOutOfRange { index: 5, .. })));
    }

    #[test]
    fn directed_arrows_never_both_ways() {
        for name in ["ibmqx2", "ibmqx4"] {
            let topo = builtin(name).unwrap();
            for a in 0..5 {
                for b in 0..5 {
                    assert!(
                        !(topo.cnot_allowed(a, b).unwrap() && topo.cnot_allowed(b, a).unwrap()),
                        "{name}: {a}<->{b}"
                    );
                }
            }
        }
    }

    #[test]
    fn parse_examples() {
        let m = parse_coupling_map("{1: [0], 2: [0, 1, 4], 3: [2, 4]}", 5).unwrap();
        assert_eq!(m, builtin("ibmqx4").unwrap().coupling().clone());
        let empty = parse_coupling_map("{}", 5).unwrap();
        assert!(empty.is_empty());
        assert_eq!(parse_coupling_map("{0: [0]}", 5), Err(TopologyError::SelfLoop(0)));
        let prefixed = parse_coupling_map("coupling_map = {0: [1, 2], 1: [2], 3: [2, 4], 4: [2]}", 5);
        assert_eq!(prefixed.unwrap().to_string(), IBMQX2_COUPLING);
    }

    #[test]
    fn parse_errors_carry_position() {
        assert_eq!(
            parse_coupling_map("{0: [1, x]}", 5),
            Err(TopologyError::Syntax {
                column: 9,
                message: "expected qubit index".into()
            })
        );
        assert!(matches!(parse_coupling_map("{0: [1]", 5), Err(TopologyError::Syntax { column: 8, .. })));
        assert!(matches!(parse_coupling_map("{0: [1]} x", 5), Err(TopologyError::Syntax { .. })));
        assert_eq!(
            parse_coupling_map("{0: [7]}", 5),
            Err(TopologyError::IndexOutOfRange { index: 7, n_qubits: 5 })
        );
        assert_eq!(
            parse_coupling_map("{0: [1], 0: [2]}", 5),
            Err(TopologyError::DuplicateControl(0))
        );
    }

    #[test]
    fn canonical_printing_is_idempotent() {
        let messy = "{ 3:[4,2],0 : [2 , 1, 1], 1: [] }";
        let once = parse_coupling_map(messy, 5).unwrap().to_string();
        assert_eq!(once, "{0: [1, 2], 3: [2, 4]}");
        assert_eq!(parse_coupling_map(&once, 5).unwrap().to_string(), once);
    }

    #[test]
    fn toml_round_trip() {
        let qx4 = builtin("ibmqx4").unwrap();
        let text = qx4.to_toml();
        assert_eq!(BackendTopology::from_toml(&text).unwrap(), qx4);

        let minimal = "name = \"line3\"\nn_qubits = 3\ncoupling = \"{0: [1], 1: [2]}\"\n";
        let line = BackendTopology::from_toml(minimal).unwrap();
        assert!(line.cnot_allowed(1, 2).unwrap());
        assert!(line.supports(GateName::Y));

        let missing = "name = \"bad\"\nn_qubits = 2\ncoupling = \"{}\"\nbasis = [\"h\"]\n";
        assert!(matches!(
            BackendTopology::from_toml(missing),
            Err(TopologyError::MissingBasisGate(_))
        ));
    }

    #[test]
    fn resolves_names_paths_and_search_dir() {
        let dir = tempfile::tempdir().unwrap();
        let ring = BackendTopology::new(
            "ring3",
            3,
            parse_coupling_map("{0: [1], 1: [2], 2: [0]}", 3).unwrap(),
            full_basis(),
        )
        .unwrap();
        let path = dir.path().join("ring3.toml");
        std::fs::write(&path, ring.to_toml()).unwrap();
        std::fs::write(dir.path().join("broken.toml"), "name = 1").unwrap();

        assert_eq!(resolve("ibmqx4", None).unwrap().name(), "ibmqx4");
        assert_eq!(resolve(path.to_str().unwrap(), None).unwrap(), ring);
        assert_eq!(resolve("ring3", Some(dir.path())).unwrap(), ring);
        assert_eq!(resolve_name("ring3", Some(dir.path())).unwrap(), ring);
        assert!(resolve_name(path.to_str().unwrap(), None).is_err());
        assert!(resolve_name("../ring3", Some(dir.path())).is_err());
        assert_eq!(
            resolve("ring3", None).unwrap_err(),
            TopologyError::UnknownBackend("ring3".into())
        );
        let names: Vec<String> = available(Some(dir.path())).iter().map(|t| t.name().to_string()).collect();
        assert_eq!(names, ["ibmqx2", "ibmqx4", "custom", "ring3"]);
    }
}
