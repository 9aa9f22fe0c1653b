//! On-disk formats: the `PLNT` binary observation container, the textual
//! edge list, signal vectors and hypertree class tables.
//!
//! # `PLNT` container, version 1 (all integers little endian)
//!
//! | offset | size | field                                           |
//! |--------|------|-------------------------------------------------|
//! | 0      | 4    | magic `PLNT`                                    |
//! | 4      | 2    | format version, currently 1                     |
//! | 6      | 1    | kind: 0 hypergraph, 1 tensor                    |
//! | 7      | 1    | noise mode: 0 noise-reduced, 1 symmetrized      |
//! | 8      | 4    | `n`                                             |
//! | 12     | 4    | `r`                                             |
//! | 16     | 8    | slot count (`C(n,r)` or `C(n+r-1,r)`)           |
//! | 24     | ...  | payload                                         |
//! | end-8  | 8    | FNV-1a 64 checksum of every preceding byte      |
//!
//! Hypergraph payload: one bit per `r`-subset in colex rank order, packed
//! least significant bit first into `ceil(count/8)` bytes. Tensor payload:
//! `count` `f64` values in multiset colex rank order.
//!
//! # Edge list
//!
//! ```text
//! # planted edge-list v1
//! # kind=hypergraph n=6 r=2
//! 0 3 1
//! 1 4 1
//! ```
//!
//! One line per present edge (hypergraphs) or per stored multiset
//! (tensors): sorted vertex indices then the value. Lines starting with `#`
//! after the header are comments. A tensor header also carries
//! `mode=reduced|symmetrized`.
//!
//! # Signal file
//!
//! `# planted signal v1 n=<n>` followed by one value per line.
//!
//! # Class table
//!
//! ```text
//! # planted class-table v1 ell=1 r=2 count=1
//! <hex key> <aut> <edges>
//! ```
//!
//! Edges are written as vertex lists joined by `-`, separated by `;`, for
//! the representative rooted at vertex 0.

use std::fs;
use std::io::{BufRead, BufReader, Read, Write};
use std::path::Path;

use anyhow::{anyhow, bail, ensure, Context, Result};
use num_bigint::BigUint;
use planted_core::combin::{MultisetIndex, SubsetIndex};
use planted_core::hypertrees::{
    automorphism_count, canonical_key, incidence_tree, RootedHypertree, TreeClass, TreeClassTable,
};
use planted_core::models::{Hypergraph, NoiseMode, Observation, Signal, SymTensor};

pub const MAGIC: &[u8; 4] = b"PLNT";
pub const VERSION: u16 = 1;
const HEADER_LEN: usize = 24;

fn fnv1a(bytes: &[u8]) -> u64 {
    let mut h: u64 = 0xcbf2_9ce4_8422_2325;
    for &b in bytes {
        h ^= b as u64;
        h = h.wrapping_mul(0x0000_0100_0000_01b3);
    }
    h
}

fn mode_byte(mode: NoiseMode) -> u8 {
    match mode {
        NoiseMode::NoiseReduced => 0,
        NoiseMode::Symmetrized => 1,
    }
}

/// Serializes an observation into a `PLNT` container.
pub fn encode_observation(obs: &Observation) -> Vec<u8> {
    let mut out = Vec::new();
    out.extend_from_slice(MAGIC);
    out.extend_from_slice(&VERSION.to_le_bytes());
    match obs {
        Observation::Hypergraph(h) => {
            let count = h.num_slots();
            out.push(0);
            out.push(0);
            out.extend_from_slice(&(h.n() as u32).to_le_bytes());
            out.extend_from_slice(&(h.r() as u32).to_le_bytes());
            out.extend_from_slice(&(count as u64).to_le_bytes());
            let mut bytes = vec![0u8; count.div_ceil(8)];
            for rank in 0..count {
                if h.get_rank(rank) {
                    bytes[rank / 8] |= 1 << (rank % 8);
                }
            }
            out.extend_from_slice(&bytes);
        }
        Observation::Tensor(t) => {
            out.push(1);
            out.push(mode_byte(t.mode));
            out.extend_from_slice(&(t.n() as u32).to_le_bytes());
            out.extend_from_slice(&(t.r() as u32).to_le_bytes());
            out.extend_from_slice(&(t.values.len() as u64).to_le_bytes());
            for v in &t.values {
                out.extend_from_slice(&v.to_le_bytes());
            }
        }
    }
    let sum = fnv1a(&out);
    out.extend_from_slice(&sum.to_le_bytes());
    out
}

fn le_u32(b: &[u8]) -> u32 {
    u32::from_le_bytes(b.try_into().expect("4 bytes"))
}

fn le_u64(b: &[u8]) -> u64 {
    u64::from_le_bytes(b.try_into().expect("8 bytes"))
}

/// Parses a `PLNT` container, checking magic, version, sizes and checksum.
pub fn decode_observation(bytes: &[u8]) -> Result<Observation> {
    ensure!(bytes.len() >= HEADER_LEN + 8, "container too short ({} bytes)", bytes.len());
    ensure!(&bytes[0..4] == MAGIC, "bad magic");
    let version = u16::from_le_bytes([bytes[4], bytes[5]]);
    ensure!(version == VERSION, "unsupported container version {version}");
    let body = &bytes[..bytes.len() - 8];
    let stored = le_u64(&bytes[bytes.len() - 8..]);
    ensure!(fnv1a(body) == stored, "checksum mismatch");
    let (kind, mode) = (bytes[6], bytes[7]);
    let n = le_u32(&bytes[8..12]) as usize;
    let r = le_u32(&bytes[12..16]) as usize;
    let count = le_u64(&bytes[16..24]) as usize;
    ensure!(r >= 1 && n >= r, "invalid shape n={n} r={r}");
    let payload = &body[HEADER_LEN..];
    match kind {
        0 => {
            let index = SubsetIndex::new(n, r);
            ensure!(count == index.len(), "slot count {count} != C({n},{r})");
            ensure!(payload.len() == count.div_ceil(8), "hypergraph payload has wrong length");
            let mut h = Hypergraph::empty(n, r);
            for rank in 0..count {
                if payload[rank / 8] >> (rank % 8) & 1 == 1 {
                    h.set_rank(rank, true);
                }
            }
            Ok(Observation::Hypergraph(h))
        }
        1 => {
            let mode = match mode {
                0 => NoiseMode::NoiseReduced,
                1 => NoiseMode::Symmetrized,
                m => bail!("unknown noise mode {m}"),
            };
            let index = MultisetIndex::new(n, r);
            ensure!(count == index.len(), "slot count {count} != C({n}+{r}-1,{r})");
            ensure!(payload.len() == 8 * count, "tensor payload has wrong length");
            let mut t = SymTensor::zeros(n, r, mode);
            for (v, chunk) in t.values.iter_mut().zip(payload.chunks_exact(8)) {
                *v = f64::from_le_bytes(chunk.try_into().expect("8 bytes"));
            }
            Ok(Observation::Tensor(t))
        }
        k => bail!("unknown observation kind {k}"),
    }
}

fn header_fields(line: &str, prefix: &str) -> Result<Vec<(String, String)>> {
    let rest = line
        .strip_prefix(prefix)
        .ok_or_else(|| anyhow!("expected header `{prefix}`, got `{line}`"))?;
    rest.split_whitespace()
        .map(|kv| {
            let (k, v) = kv.split_once('=').ok_or_else(|| anyhow!("bad header field `{kv}`"))?;
            Ok((k.to_string(), v.to_string()))
        })
        .collect()
}

fn field<'a>(fields: &'a [(String, String)], key: &str) -> Result<&'a str> {
    fields
        .iter()
        .find(|(k, _)| k == key)
        .map(|(_, v)| v.as_str())
        .ok_or_else(|| anyhow!("header is missing `{key}`"))
}

/// Textual edge list.
pub fn write_edge_list(obs: &Observation, mut w: impl Write) -> Result<()> {
    writeln!(w, "# planted edge-list v1")?;
    match obs {
        Observation::Hypergraph(h) => {
            writeln!(w, "# kind=hypergraph n={} r={}", h.n(), h.r())?;
            for rank in 0..h.num_slots() {
                if h.get_rank(rank) {
                    let e = h.index().unrank(rank);
                    writeln!(w, "{} 1", join(&e, " "))?;
                }
            }
        }
        Observation::Tensor(t) => {
            let mode = match t.mode {
                NoiseMode::NoiseReduced => "reduced",
                NoiseMode::Symmetrized => "symmetrized",
            };
            writeln!(w, "# kind=tensor n={} r={} mode={mode}", t.n(), t.r())?;
            for (rank, v) in t.values.iter().enumerate() {
                let e = t.index().unrank(rank);
                writeln!(w, "{} {v:?}", join(&e, " "))?;
            }
        }
    }
    Ok(())
}

fn join(e: &[usize], sep: &str) -> String {
    e.iter().map(|v| v.to_string()).collect::<Vec<_>>().join(sep)
}

pub fn read_edge_list(r: impl Read) -> Result<Observation> {
    let mut lines = BufReader::new(r).lines();
    let first = lines.next().ok_or_else(|| anyhow!("empty edge list"))??;
    ensure!(first.trim() == "# planted edge-list v1", "not a planted edge list");
    let second = lines.next().ok_or_else(|| anyhow!("missing edge-list header"))??;
    let fields = header_fields(second.trim(), "# ")?;
    let n: usize = field(&fields, "n")?.parse()?;
    let r: usize = field(&fields, "r")?.parse()?;
    ensure!(r >= 1 && n >= r, "invalid shape n={n} r={r}");
    let kind = field(&fields, "kind")?;
    let mut obs = match kind {
        "hypergraph" => Observation::Hypergraph(Hypergraph::empty(n, r)),
        "tensor" => {
            let mode = match field(&fields, "mode")? {
                "reduced" => NoiseMode::NoiseReduced,
                "symmetrized" => NoiseMode::Symmetrized,
                m => bail!("unknown mode `{m}`"),
            };
            Observation::Tensor(SymTensor::zeros(n, r, mode))
        }
        k => bail!("unknown kind `{k}`"),
    };
    for (lineno, line) in lines.enumerate() {
        let line = line?;
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let parts: Vec<&str> = line.split_whitespace().collect();
        ensure!(parts.len() == r + 1, "line {}: expected {} fields", lineno + 3, r + 1);
        let e: Vec<usize> = parts[..r]
            .iter()
            .map(|p| p.parse::<usize>())
            .collect::<std::result::Result<_, _>>()
            .with_context(|| format!("line {}", lineno + 3))?;
        ensure!(e.windows(2).all(|w| w[0] <= w[1]), "line {}: vertices not sorted", lineno + 3);
        ensure!(e.iter().all(|&v| v < n), "line {}: vertex out of range", lineno + 3);
        let value: f64 = parts[r].parse().with_context(|| format!("line {}", lineno + 3))?;
        match &mut obs {
            Observation::Hypergraph(h) => {
                ensure!(e.windows(2).all(|w| w[0] < w[1]), "line {}: repeated vertex", lineno + 3);
                ensure!(value == 0.0 || value == 1.0, "line {}: hypergraph value must be 0 or 1", lineno + 3);
                h.set_edge(&e, value == 1.0);
            }
            Observation::Tensor(t) => t.set(&e, value),
        }
    }
    Ok(obs)
}

pub fn write_signal(signal: &Signal, mut w: impl Write) -> Result<()> {
    writeln!(w, "# planted signal v1 n={}", signal.theta.len())?;
    for v in &signal.theta {
        writeln!(w, "{v:?}")?;
    }
    Ok(())
}

pub fn read_signal(r: impl Read) -> Result<Signal> {
    let mut lines = BufReader::new(r).lines();
    let first = lines.next().ok_or_else(|| anyhow!("empty signal file"))??;
    let fields = header_fields(first.trim(), "# planted signal v1")?;
    let n: usize = field(&fields, "n")?.parse()?;
    let mut theta = Vec::with_capacity(n);
    for line in lines {
        let line = line?;
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        theta.push(line.parse::<f64>()?);
    }
    ensure!(theta.len() == n, "signal has {} entries, header says {n}", theta.len());
    Ok(Signal { theta })
}

fn hex(bytes: &[u8]) -> String {
    bytes.iter().map(|b| format!("{b:02x}")).collect()
}

fn unhex(s: &str) -> Result<Vec<u8>> {
    ensure!(s.len() % 2 == 0, "odd-length hex key");
    (0..s.len())
        .step_by(2)
        .map(|i| u8::from_str_radix(&s[i..i + 2], 16).map_err(Into::into))
        .collect()
}

pub fn write_class_table(table: &TreeClassTable, mut w: impl Write) -> Result<()> {
    writeln!(
        w,
        "# planted class-table v1 ell={} r={} count={}",
        table.ell,
        table.r,
        table.len()
    )?;
    for c in &table.classes {
        let edges: Vec<String> = c.tree.edges.iter().map(|e| join(e, "-")).collect();
        writeln!(w, "{} {} {}", hex(&c.key), c.aut, edges.join(";"))?;
    }
    Ok(())
}

/// Reads a class table and re-derives every key and `|Aut|` from the edges.
pub fn read_class_table(r: impl Read) -> Result<TreeClassTable> {
    let mut lines = BufReader::new(r).lines();
    let first = lines.next().ok_or_else(|| anyhow!("empty class table"))??;
    let fields = header_fields(first.trim(), "# planted class-table v1")?;
    let ell: usize = field(&fields, "ell")?.parse()?;
    let r: usize = field(&fields, "r")?.parse()?;
    let count: usize = field(&fields, "count")?.parse()?;
    let k = planted_core::hypertrees::total_vertices(ell, r);
    let mut classes = Vec::with_capacity(count);
    for line in lines {
        let line = line?;
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let parts: Vec<&str> = line.split_whitespace().collect();
        ensure!(parts.len() == 3, "class line needs key, aut and edges");
        let key = unhex(parts[0])?;
        let aut: BigUint = parts[1].parse().map_err(|e| anyhow!("bad |Aut|: {e}"))?;
        let edges: Vec<Vec<usize>> = parts[2]
            .split(';')
            .map(|e| e.split('-').map(|v| v.parse::<usize>()).collect::<std::result::Result<_, _>>())
            .collect::<std::result::Result<_, _>>()?;
        let tree = RootedHypertree::new(r, k, Some(0), edges).map_err(|e| anyhow!("{e}"))?;
        let derived = canonical_key(&tree).map_err(|e| anyhow!("{e}"))?;
        ensure!(derived == key, "stored key does not match the representative");
        let inc = incidence_tree(&tree).map_err(|e| anyhow!("{e}"))?;
        ensure!(automorphism_count(&inc) == aut, "stored |Aut| does not match the representative");
        classes.push(TreeClass { tree, aut, key });
    }
    ensure!(classes.len() == count, "expected {count} classes, found {}", classes.len());
    Ok(TreeClassTable { ell, r, classes })
}

/// Loads an observation, choosing the format from the leading bytes.
pub fn load_observation(path: &Path) -> Result<Observation> {
    let bytes = fs::read(path).with_context(|| format!("reading {}", path.display()))?;
    if bytes.starts_with(MAGIC) {
        decode_observation(&bytes)
    } else {
        read_edge_list(&bytes[..])
    }
}

/// Writes a `PLNT` container, or an edge list when the extension is `.txt`.
pub fn save_observation(obs: &Observation, path: &Path) -> Result<()> {
    if path.extension().is_some_and(|e| e == "txt") {
        let mut f = fs::File::create(path)?;
        write_edge_list(obs, &mut f)?;
        f.flush()?;
    } else {
        fs::write(path, encode_observation(obs))?;
    }
    Ok(())
}
