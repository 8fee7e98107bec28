//! Text and binary serialisations of a [`Field`].
//!
//! Text: a header `# lattice-field v1 radius=<n> mode=<dirichlet|periodic>`
//! followed by one value per line in linear site order, 17 significant digits.
//!
//! Binary: magic `LCFIELD1`, little-endian `u32` radius, `u8` mode
//! (0 = dirichlet, 1 = periodic), then `(2n+1)³` little-endian `f64`.

use std::fmt::Write as _;
use std::fs;
use std::io::{self, BufRead, Read, Write};
use std::path::Path;

use crate::error::{Error, Result};
use crate::lattice::{BoundaryMode, Field, LatticeBox};

pub const FIELD_MAGIC: &[u8; 8] = b"LCFIELD1";
const TEXT_HEADER: &str = "# lattice-field v1";

pub fn write_text<W: Write>(field: &Field, mut out: W) -> Result<()> {
    let lattice = field.lattice();
    let mut buf = String::with_capacity(field.values().len() * 25 + 64);
    writeln!(
        buf,
        "{TEXT_HEADER} radius={} mode={}",
        lattice.radius(),
        lattice.mode()
    )
    .unwrap();
    for v in field.values() {
        writeln!(buf, "{v:.16e}").unwrap();
    }
    out.write_all(buf.as_bytes())?;
    Ok(())
}

pub fn read_text<R: BufRead>(input: R) -> Result<Field> {
    let mut lines = input.lines();
    let header = lines
        .next()
        .ok_or_else(|| Error::Format("empty field file".into()))??;
    let rest = header
        .strip_prefix(TEXT_HEADER)
        .ok_or_else(|| Error::Format(format!("bad header: {header}")))?;
    let mut radius = None;
    let mut mode = None;
    for tok in rest.split_whitespace() {
        if let Some(r) = tok.strip_prefix("radius=") {
            radius = r.parse::<usize>().ok();
        } else if let Some(m) = tok.strip_prefix("mode=") {
            mode = BoundaryMode::parse(m);
        }
    }
    let (radius, mode) = match (radius, mode) {
        (Some(r), Some(m)) => (r, m),
        _ => return Err(Error::Format(format!("bad header: {header}"))),
    };
    let lattice = LatticeBox::new(radius, mode);
    let mut values = Vec::with_capacity(lattice.site_count());
    for (lineno, line) in lines.enumerate() {
        let line = line?;
        let t = line.trim();
        if t.is_empty() {
            continue;
        }
        let v = t
            .parse::<f64>()
            .map_err(|e| Error::Format(format!("line {}: {e}", lineno + 2)))?;
        values.push(v);
    }
    Field::from_values(lattice, values)
}

pub fn write_binary<W: Write>(field: &Field, mut out: W) -> Result<()> {
    let lattice = field.lattice();
    let radius = u32::try_from(lattice.radius())
        .map_err(|_| Error::Format("radius does not fit in u32".into()))?;
    let mut buf = Vec::with_capacity(13 + 8 * field.values().len());
    buf.extend_from_slice(FIELD_MAGIC);
    buf.extend_from_slice(&radius.to_le_bytes());
    buf.push(match lattice.mode() {
        BoundaryMode::Dirichlet => 0,
        BoundaryMode::Periodic => 1,
    });
    for v in field.values() {
        buf.extend_from_slice(&v.to_le_bytes());
    }
    out.write_all(&buf)?;
    Ok(())
}

pub fn read_binary<R: Read>(mut input: R) -> Result<Field> {
    let mut head = [0u8; 13];
    input.read_exact(&mut head)?;
    if &head[..8] != FIELD_MAGIC {
        return Err(Error::Format("bad field magic".into()));
    }
    let radius = u32::from_le_bytes(head[8..12].try_into().unwrap()) as usize;
    let mode = match head[12] {
        0 => BoundaryMode::Dirichlet,
        1 => BoundaryMode::Periodic,
        m => return Err(Error::Format(format!("unknown boundary mode tag {m}"))),
    };
    let lattice = LatticeBox::new(radius, mode);
    let mut raw = Vec::new();
    input.read_to_end(&mut raw)?;
    if raw.len() != 8 * lattice.site_count() {
        return Err(Error::Format(format!(
            "expected {} payload bytes, found {}",
            8 * lattice.site_count(),
            raw.len()
        )));
    }
    let values = raw
        .chunks_exact(8)
        .map(|c| f64::from_le_bytes(c.try_into().unwrap()))
        .collect();
    Field::from_values(lattice, values)
}

/// Reads either format, sniffing the binary magic.
pub fn load(path: &Path) -> Result<Field> {
    let bytes = fs::read(path)?;
    if bytes.starts_with(FIELD_MAGIC) {
        read_binary(&bytes[..])
    } else {
        read_text(io::Cursor::new(bytes))
    }
}

pub fn save_text(field: &Field, path: &Path) -> Result<()> {
    let f = fs::File::create(path)?;
    write_text(field, io::BufWriter::new(f))
}

pub fn save_binary(field: &Field, path: &Path) -> Result<()> {
    let f = fs::File::create(path)?;
    write_binary(field, io::BufWriter::new(f))
}
