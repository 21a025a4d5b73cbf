//! Triple-file parsing and binary graph snapshots.
//!
//! Triple files are UTF-8, one `subject<TAB>relation<TAB>object` record per
//! line. Lines starting with `#` and blank lines are skipped.
//!
//! Snapshot layout (little endian):
//!
//! ```text
//! magic    8 bytes  "KGRSNAP1"
//! n_ent    u64, then n_ent  x (u32 byte length, UTF-8 name)
//! n_rel    u64, then n_rel  x (u32 byte length, UTF-8 name)
//! n_trip   u64, then n_trip x (u32 subject, u32 relation, u32 object)
//! ```

use std::io::{BufRead, Read, Write};

use byteorder::{LittleEndian, ReadBytesExt, WriteBytesExt};

use super::graph::{GraphBuilder, KnowledgeGraph};
use super::vocab::Vocabulary;
use super::KgError;

pub const SNAPSHOT_MAGIC: &[u8; 8] = b"KGRSNAP1";

pub fn read_triples<R: BufRead>(reader: R, inverse_edges: bool) -> Result<KnowledgeGraph, KgError> {
    let mut builder = GraphBuilder::new().with_inverse_edges(inverse_edges);
    for (idx, line) in reader.lines().enumerate() {
        let line = line?;
        let line = line.strip_suffix('\r').unwrap_or(&line);
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let mut fields = line.split('\t');
        match (fields.next(), fields.next(), fields.next(), fields.next()) {
            (Some(s), Some(r), Some(o), None) => {
                builder.add(s, r, o);
            }
            _ => {
                return Err(KgError::Parse {
                    line: idx + 1,
                    message: format!(
                        "expected 3 tab-separated fields, found {}",
                        line.split('\t').count()
                    ),
                })
            }
        }
    }
    Ok(builder.build())
}

pub fn write_triples<W: Write>(g: &KnowledgeGraph, mut out: W) -> Result<(), KgError> {
    let v = g.vocab();
    for t in g.triples() {
        writeln!(
            out,
            "{}\t{}\t{}",
            v.entity_name(t.subject).unwrap(),
            v.relation_name(t.relation).unwrap(),
            v.entity_name(t.object).unwrap()
        )?;
    }
    Ok(())
}

pub fn write_snapshot<W: Write>(g: &KnowledgeGraph, mut out: W) -> Result<(), KgError> {
    out.write_all(SNAPSHOT_MAGIC)?;
    for table in [g.vocab().entities(), g.vocab().relations()] {
        out.write_u64::<LittleEndian>(table.len() as u64)?;
        for (_, name) in table.iter() {
            out.write_u32::<LittleEndian>(name.len() as u32)?;
            out.write_all(name.as_bytes())?;
        }
    }
    out.write_u64::<LittleEndian>(g.num_triples() as u64)?;
    for t in g.triples() {
        out.write_u32::<LittleEndian>(t.subject.0)?;
        out.write_u32::<LittleEndian>(t.relation.0)?;
        out.write_u32::<LittleEndian>(t.object.0)?;
    }
    out.flush()?;
    Ok(())
}

pub fn read_snapshot<R: Read>(mut input: R) -> Result<KnowledgeGraph, KgError> {
    let mut magic = [0u8; 8];
    input.read_exact(&mut magic)?;
    if &magic != SNAPSHOT_MAGIC {
        return Err(KgError::Snapshot("bad magic".into()));
    }
    let mut vocab = Vocabulary::new();
    let n_entities = read_names(&mut input, |name| {
        vocab.intern_entity(name);
    })?;
    let n_relations = read_names(&mut input, |name| {
        vocab.intern_relation(name);
    })?;
    if vocab.num_entities() != n_entities || vocab.num_relations() != n_relations {
        return Err(KgError::Snapshot("duplicate names in vocabulary".into()));
    }
    let n_triples = input.read_u64::<LittleEndian>()? as usize;
    let mut raw = Vec::with_capacity(n_triples);
    for _ in 0..n_triples {
        let s = input.read_u32::<LittleEndian>()?;
        let r = input.read_u32::<LittleEndian>()?;
        let o = input.read_u32::<LittleEndian>()?;
        if s as usize >= n_entities || o as usize >= n_entities || r as usize >= n_relations {
            return Err(KgError::Snapshot(format!("triple ({s}, {r}, {o}) out of range")));
        }
        raw.push((s, r, o));
    }
    Ok(KnowledgeGraph::from_sorted_parts(vocab, raw))
}

fn read_names<R: Read>(input: &mut R, mut sink: impl FnMut(&str)) -> Result<usize, KgError> {
    let n = input.read_u64::<LittleEndian>()? as usize;
    let mut buf = Vec::new();
    for _ in 0..n {
        let len = input.read_u32::<LittleEndian>()? as usize;
        buf.resize(len, 0);
        input.read_exact(&mut buf)?;
        let name = std::str::from_utf8(&buf).map_err(|e| KgError::Snapshot(e.to_string()))?;
        sink(name);
    }
    Ok(n)
}
