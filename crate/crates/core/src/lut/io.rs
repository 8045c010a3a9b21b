//! Binary and CSV serialization of compressed LUTs.
//!
//! Binary layout, all little-endian:
//!
//! ```text
//! magic      8 bytes  "METLDLUT"
//! version    u32
//! T, e, Q, K u32 x 4
//! norm       u8       0 normalized, 1 paper-literal
//! grid       u8 + f64 policy code and parameter
//! name       u32 length + UTF-8 bytes
//! esn0_db    f64
//! grid       Q x f64
//! centroids  K x Q x f64, row major
//! index map  T x e x u32, row major
//! ```

use std::io::{Read, Write};

use byteorder::{LittleEndian, ReadBytesExt, WriteBytesExt};

use super::{CompressedLut, GridPolicy, LutError, NormalizationMode};

pub const LUT_MAGIC: &[u8; 8] = b"METLDLUT";
pub const LUT_VERSION: u32 = 1;

/// Upper bound on any stored array, to reject absurd headers before allocating.
const MAX_ELEMENTS: u64 = 1 << 28;

pub fn write_lut<W: Write>(lut: &CompressedLut, mut out: W) -> Result<(), LutError> {
    out.write_all(LUT_MAGIC)?;
    out.write_u32::<LittleEndian>(LUT_VERSION)?;
    for v in [lut.iterations, lut.edge_types, lut.levels(), lut.clusters()] {
        out.write_u32::<LittleEndian>(v as u32)?;
    }
    out.write_u8(lut.normalization.code())?;
    let (code, param) = lut.grid_policy.code();
    out.write_u8(code)?;
    out.write_f64::<LittleEndian>(param)?;
    out.write_u32::<LittleEndian>(lut.source_name.len() as u32)?;
    out.write_all(lut.source_name.as_bytes())?;
    out.write_f64::<LittleEndian>(lut.channel_esn0_db)?;
    for &g in &lut.grid {
        out.write_f64::<LittleEndian>(g)?;
    }
    for &c in &lut.cluster_rows {
        out.write_f64::<LittleEndian>(c)?;
    }
    for &i in &lut.index_map {
        out.write_u32::<LittleEndian>(i)?;
    }
    Ok(())
}

fn truncated(e: std::io::Error, what: &str) -> LutError {
    if e.kind() == std::io::ErrorKind::UnexpectedEof {
        LutError::Dimensions(format!("file truncated while reading {what}"))
    } else {
        LutError::Io(e)
    }
}

fn read_f64s<R: Read>(input: &mut R, n: usize, what: &str) -> Result<Vec<f64>, LutError> {
    (0..n).map(|_| input.read_f64::<LittleEndian>().map_err(|e| truncated(e, what))).collect()
}

pub fn read_lut<R: Read>(mut input: R) -> Result<CompressedLut, LutError> {
    let mut magic = [0u8; 8];
    input.read_exact(&mut magic).map_err(|e| truncated(e, "magic"))?;
    if &magic != LUT_MAGIC {
        return Err(LutError::Magic);
    }
    let version = input.read_u32::<LittleEndian>().map_err(|e| truncated(e, "version"))?;
    if version != LUT_VERSION {
        return Err(LutError::Version(version));
    }
    let mut dims = [0usize; 4];
    for d in &mut dims {
        *d = input.read_u32::<LittleEndian>().map_err(|e| truncated(e, "header"))? as usize;
    }
    let [t, e, q, k] = dims;
    if t == 0 || e == 0 || q == 0 || k == 0 {
        return Err(LutError::Dimensions(format!("T={t}, e={e}, Q={q}, K={k} must all be positive")));
    }
    if (k as u64) * (q as u64) > MAX_ELEMENTS || (t as u64) * (e as u64) > MAX_ELEMENTS {
        return Err(LutError::Dimensions(format!("T={t}, e={e}, Q={q}, K={k} too large")));
    }
    if k > t * e {
        return Err(LutError::Dimensions(format!("K={k} exceeds T*e={}", t * e)));
    }
    let norm_code = input.read_u8().map_err(|e| truncated(e, "header"))?;
    let normalization = NormalizationMode::from_code(norm_code)
        .ok_or_else(|| LutError::Dimensions(format!("unknown normalization code {norm_code}")))?;
    let grid_code = input.read_u8().map_err(|e| truncated(e, "header"))?;
    let grid_param = input.read_f64::<LittleEndian>().map_err(|e| truncated(e, "header"))?;
    let grid_policy = GridPolicy::from_code(grid_code, grid_param)
        .ok_or_else(|| LutError::Dimensions(format!("unknown grid policy code {grid_code}")))?;
    let name_len = input.read_u32::<LittleEndian>().map_err(|e| truncated(e, "header"))? as usize;
    if name_len > 1 << 16 {
        return Err(LutError::Dimensions(format!("source name length {name_len}")));
    }
    let mut name = vec![0u8; name_len];
    input.read_exact(&mut name).map_err(|e| truncated(e, "source name"))?;
    let source_name =
        String::from_utf8(name).map_err(|_| LutError::Dimensions("source name is not UTF-8".into()))?;
    let channel_esn0_db = input.read_f64::<LittleEndian>().map_err(|e| truncated(e, "header"))?;

    let grid = read_f64s(&mut input, q, "grid")?;
    if grid.iter().any(|g| !g.is_finite() || *g < 0.0) || grid.windows(2).any(|w| w[0] > w[1]) {
        return Err(LutError::Dimensions("grid must be finite, nonnegative and sorted".into()));
    }
    let cluster_rows = read_f64s(&mut input, k * q, "centroid rows")?;
    for (n, &c) in cluster_rows.iter().enumerate() {
        if !(0.0..=1.0).contains(&c) {
            return Err(LutError::OutOfRange { value: c, location: format!("cluster {} level {}", n / q, n % q) });
        }
    }
    let mut index_map = Vec::with_capacity(t * e);
    for _ in 0..t * e {
        let i = input.read_u32::<LittleEndian>().map_err(|e| truncated(e, "index map"))?;
        if i as usize >= k {
            return Err(LutError::Dimensions(format!("index {i} outside 0..{k}")));
        }
        index_map.push(i);
    }
    let mut rest = [0u8; 1];
    if input.read(&mut rest)? != 0 {
        return Err(LutError::Dimensions("trailing bytes after index map".into()));
    }
    Ok(CompressedLut {
        iterations: t,
        edge_types: e,
        grid,
        cluster_rows,
        index_map,
        normalization,
        grid_policy,
        source_name,
        channel_esn0_db,
    })
}

/// Human-readable export: `#` metadata lines, then one row per `(t, i)` with
/// the cluster index and the reconstructed coefficients.
pub fn write_lut_csv<W: Write>(lut: &CompressedLut, mut out: W) -> Result<(), LutError> {
    writeln!(out, "# source: {}", lut.source_name)?;
    writeln!(out, "# esn0_db: {}", lut.channel_esn0_db)?;
    writeln!(out, "# normalization: {:?}", lut.normalization)?;
    writeln!(out, "# grid_policy: {:?}", lut.grid_policy)?;
    writeln!(out, "# clusters: {}", lut.clusters())?;
    let grid: Vec<String> = lut.grid.iter().map(f64::to_string).collect();
    writeln!(out, "# grid: {}", grid.join(";"))?;
    let cols: Vec<String> = (1..=lut.levels()).map(|q| format!("c{q}")).collect();
    writeln!(out, "t,edge_type,cluster,{}", cols.join(","))?;
    for t in 1..=lut.iterations {
        for i in 1..=lut.edge_types {
            let cluster = lut.index_map[(t - 1) * lut.edge_types + (i - 1)];
            let vals: Vec<String> = lut.row(t, i).iter().map(f64::to_string).collect();
            writeln!(out, "{t},{i},{cluster},{}", vals.join(","))?;
        }
    }
    Ok(())
}
