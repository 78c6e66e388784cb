//! Binary container and CSV export for sampled fields.
//!
//! A container is the magic `TFZAKFLD`, a little-endian `u64` header length,
//! a JSON [`FieldHeader`] and the samples as little-endian `(re, im)` pairs in
//! row-major order.

use std::collections::BTreeMap;
use std::fs::File;
use std::io::{BufReader, BufWriter, Read, Write};
use std::path::Path;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::experiments::fmt_f64;
use crate::field::{Axis, SampledField, Window};
use crate::geometry::OrderedBasis;
use crate::transforms::{StftOptions, ZakField};

pub const MAGIC: &[u8; 8] = b"TFZAKFLD";
pub const FORMAT_VERSION: u32 = 1;
// Guards against reading garbage as a header length.
const MAX_HEADER: u64 = 1 << 24;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum FieldKind {
    Signal,
    Stft,
    Zak,
    ZakStft,
    Other,
}

/// Sample encoding. `Complex128` stores two `f64`s per sample and is the
/// default; `Complex64` stores two `f32`s.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Precision {
    #[default]
    Complex128,
    Complex64,
}

impl Precision {
    fn bytes(self) -> usize {
        match self {
            Precision::Complex128 => 16,
            Precision::Complex64 => 8,
        }
    }
}

/// Where a transform output came from.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Provenance {
    pub transform: String,
    #[serde(default)]
    pub window: Option<Window>,
    #[serde(default)]
    pub basis: Option<OrderedBasis>,
    /// Largest lattice index (or box half-width) summed over.
    #[serde(default)]
    pub truncation_radius: Option<f64>,
    #[serde(default)]
    pub extra: BTreeMap<String, serde_json::Value>,
}

impl Provenance {
    pub fn stft(phi: &Window, opts: &StftOptions) -> Self {
        let mut extra = BTreeMap::new();
        extra.insert("stft".into(), serde_json::to_value(opts).expect("options serialize"));
        Self { transform: "stft".into(), window: Some(phi.clone()), extra, ..Default::default() }
    }

    pub fn zak(z: &ZakField) -> Self {
        let radius = z.lattice_lo.iter().chain(&z.lattice_hi).map(|k| k.unsigned_abs()).max().unwrap_or(0);
        let mut extra = BTreeMap::new();
        let layout = ZakLayout {
            x_cells: z.x_cells,
            xi_cells: z.xi_cells,
            x_per_cell: z.x_per_cell,
            xi_per_cell: z.xi_per_cell,
            lattice_lo: z.lattice_lo.clone(),
            lattice_hi: z.lattice_hi.clone(),
            boundary_mass: z.boundary_mass,
        };
        extra.insert("zak".into(), serde_json::to_value(layout).expect("layout serializes"));
        Self {
            transform: "zak".into(),
            window: None,
            basis: Some(z.basis.clone()),
            truncation_radius: Some(radius as f64),
            extra,
        }
    }
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct ZakLayout {
    x_cells: usize,
    xi_cells: usize,
    x_per_cell: usize,
    xi_per_cell: usize,
    lattice_lo: Vec<i64>,
    lattice_hi: Vec<i64>,
    boundary_mass: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FieldHeader {
    pub version: u32,
    pub kind: FieldKind,
    pub dims: Vec<usize>,
    pub axes: Vec<Axis>,
    /// Basis the axes are coordinates in, if any.
    #[serde(default)]
    pub basis: Option<OrderedBasis>,
    #[serde(default)]
    pub precision: Precision,
    #[serde(default)]
    pub provenance: Option<Provenance>,
}

impl FieldHeader {
    pub fn for_field(f: &SampledField, kind: FieldKind) -> Self {
        Self {
            version: FORMAT_VERSION,
            kind,
            dims: f.shape(),
            axes: f.axes().to_vec(),
            basis: f.basis().cloned(),
            precision: Precision::default(),
            provenance: None,
        }
    }

    pub fn with_provenance(mut self, p: Provenance) -> Self {
        self.provenance = Some(p);
        self
    }

    pub fn with_precision(mut self, p: Precision) -> Self {
        self.precision = p;
        self
    }
}

/// Writes `f` with `header`; the header's grid fields are taken from `f`.
pub fn write_field<W: Write>(mut w: W, f: &SampledField, header: &FieldHeader) -> Result<()> {
    let mut header = header.clone();
    header.dims = f.shape();
    header.axes = f.axes().to_vec();
    header.basis = f.basis().cloned();
    let json = serde_json::to_vec(&header)?;
    w.write_all(MAGIC)?;
    w.write_all(&(json.len() as u64).to_le_bytes())?;
    w.write_all(&json)?;
    let mut buf = Vec::with_capacity(f.len() * header.precision.bytes());
    for v in f.values() {
        match header.precision {
            Precision::Complex128 => {
                buf.extend_from_slice(&v.re.to_le_bytes());
                buf.extend_from_slice(&v.im.to_le_bytes());
            }
            Precision::Complex64 => {
                buf.extend_from_slice(&(v.re as f32).to_le_bytes());
                buf.extend_from_slice(&(v.im as f32).to_le_bytes());
            }
        }
    }
    w.write_all(&buf)?;
    w.flush()?;
    Ok(())
}

pub fn read_field<R: Read>(mut r: R) -> Result<(FieldHeader, SampledField)> {
    let mut magic = [0u8; 8];
    r.read_exact(&mut magic)?;
    if &magic != MAGIC {
        return Err(Error::Serialization("not a field container".into()));
    }
    let mut len = [0u8; 8];
    r.read_exact(&mut len)?;
    let len = u64::from_le_bytes(len);
    if len > MAX_HEADER {
        return Err(Error::Serialization(format!("header length {len} is implausible")));
    }
    let mut json = vec![0u8; len as usize];
    r.read_exact(&mut json)?;
    let header: FieldHeader = serde_json::from_slice(&json)?;
    if header.version != FORMAT_VERSION {
        return Err(Error::Serialization(format!("unsupported container version {}", header.version)));
    }
    if header.dims != header.axes.iter().map(|a| a.count).collect::<Vec<_>>() {
        return Err(Error::Serialization("dims disagree with the axes".into()));
    }
    let n: usize = header.dims.iter().product();
    let mut payload = vec![0u8; n * header.precision.bytes()];
    r.read_exact(&mut payload)?;
    let mut rest = [0u8; 1];
    if r.read(&mut rest)? != 0 {
        return Err(Error::Serialization("trailing bytes after the payload".into()));
    }
    let values: Vec<Complex64> = match header.precision {
        Precision::Complex128 => payload
            .chunks_exact(16)
            .map(|c| {
                Complex64::new(
                    f64::from_le_bytes(c[..8].try_into().unwrap()),
                    f64::from_le_bytes(c[8..].try_into().unwrap()),
                )
            })
            .collect(),
        Precision::Complex64 => payload
            .chunks_exact(8)
            .map(|c| {
                Complex64::new(
                    f32::from_le_bytes(c[..4].try_into().unwrap()) as f64,
                    f32::from_le_bytes(c[4..].try_into().unwrap()) as f64,
                )
            })
            .collect(),
    };
    let mut f = SampledField::new(header.axes.clone(), values)?;
    if let Some(b) = &header.basis {
        f = f.with_basis(b.clone())?;
    }
    Ok((header, f))
}

pub fn save_field(path: impl AsRef<Path>, f: &SampledField, header: &FieldHeader) -> Result<()> {
    write_field(BufWriter::new(File::create(path)?), f, header)
}

pub fn load_field(path: impl AsRef<Path>) -> Result<(FieldHeader, SampledField)> {
    read_field(BufReader::new(File::open(path)?))
}

pub fn write_zak<W: Write>(w: W, z: &ZakField, precision: Precision) -> Result<()> {
    let h = FieldHeader::for_field(&z.field, FieldKind::Zak).with_provenance(Provenance::zak(z)).with_precision(precision);
    write_field(w, &z.field, &h)
}

/// Reads a container written by [`write_zak`].
pub fn read_zak<R: Read>(r: R) -> Result<ZakField> {
    let (h, field) = read_field(r)?;
    let p = h.provenance.filter(|_| h.kind == FieldKind::Zak).ok_or_else(|| Error::Serialization("not a Zak container".into()))?;
    let layout: ZakLayout = serde_json::from_value(
        p.extra.get("zak").cloned().ok_or_else(|| Error::Serialization("missing Zak layout".into()))?,
    )?;
    let basis = p.basis.ok_or_else(|| Error::Serialization("missing Zak basis".into()))?;
    Ok(ZakField {
        field,
        basis,
        x_cells: layout.x_cells,
        xi_cells: layout.xi_cells,
        x_per_cell: layout.x_per_cell,
        xi_per_cell: layout.xi_per_cell,
        lattice_lo: layout.lattice_lo,
        lattice_hi: layout.lattice_hi,
        boundary_mass: layout.boundary_mass,
    })
}

/// CSV with columns `i0.., x0.., re, im`. The `x` columns are grid
/// coordinates (basis coordinates when the field carries a basis).
pub fn write_csv<W: Write>(w: W, f: &SampledField) -> Result<()> {
    let mut w = BufWriter::new(w);
    let d = f.dim();
    let mut cols: Vec<String> = (0..d).map(|k| format!("i{k}")).collect();
    cols.extend((0..d).map(|k| format!("x{k}")));
    cols.extend(["re".to_string(), "im".to_string()]);
    writeln!(w, "{}", cols.join(","))?;
    for (i, v) in f.values().iter().enumerate() {
        let idx = f.multi_index(i);
        let x = f.point(i);
        let mut row: Vec<String> = idx.iter().map(|j| j.to_string()).collect();
        row.extend(x.iter().map(|&c| fmt_f64(c)));
        row.push(fmt_f64(v.re));
        row.push(fmt_f64(v.im));
        writeln!(w, "{}", row.join(","))?;
    }
    w.flush()?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::sample;
    use crate::transforms::{stft_with, zak};

    fn field() -> SampledField {
        sample(|x| Complex64::from_polar((-x[0] * x[0] / 2.0).exp(), 0.7 * x[0]), &[-10.0], &[10.0], 1.0 / 8.0).unwrap()
    }

    #[test]
    fn round_trip_is_bit_exact() {
        let f = field();
        let h = FieldHeader::for_field(&f, FieldKind::Signal);
        let mut buf = Vec::new();
        write_field(&mut buf, &f, &h).unwrap();
        assert_eq!(buf.len(), 16 + serde_json::to_vec(&h).unwrap().len() + 16 * f.len());
        let (h2, g) = read_field(buf.as_slice()).unwrap();
        assert_eq!(h2, h);
        assert_eq!(g, f);
    }

    #[test]
    fn single_precision_round_trip() {
        let f = field();
        let h = FieldHeader::for_field(&f, FieldKind::Signal).with_precision(Precision::Complex64);
        let mut buf = Vec::new();
        write_field(&mut buf, &f, &h).unwrap();
        let (_, g) = read_field(buf.as_slice()).unwrap();
        let err = f.values().iter().zip(g.values()).map(|(a, b)| (a - b).norm()).fold(0.0, f64::max);
        assert!(err > 0.0 && err < 1e-7);
    }

    #[test]
    fn zak_round_trip_keeps_layout_and_basis() {
        let basis = OrderedBasis::diagonal(&[2.0]).unwrap();
        let f = sample(|x| Complex64::new((-x[0] * x[0] / 2.0).exp(), 0.0), &[-8.0], &[8.0], 1.0 / 16.0).unwrap();
        let z = zak(&f, &basis).unwrap();
        let mut buf = Vec::new();
        write_zak(&mut buf, &z, Precision::Complex128).unwrap();
        let back = read_zak(buf.as_slice()).unwrap();
        assert_eq!(back, z);
        assert!(back.quasi_periodicity_defect() <= 1e-9);
    }

    #[test]
    fn stft_provenance_is_recorded() {
        let f = field();
        let phi = Window::standard(1);
        let opts = StftOptions { x_stride: 4, ..Default::default() };
        let v = stft_with(&f, &phi, &opts).unwrap();
        let h = FieldHeader::for_field(&v, FieldKind::Stft).with_provenance(Provenance::stft(&phi, &opts));
        let mut buf = Vec::new();
        write_field(&mut buf, &v, &h).unwrap();
        let (h2, _) = read_field(buf.as_slice()).unwrap();
        let p = h2.provenance.unwrap();
        assert_eq!(p.window, Some(phi));
        assert_eq!(p.extra["stft"]["x_stride"], 4);
    }

    #[test]
    fn corrupt_input_is_rejected() {
        let f = field();
        let mut buf = Vec::new();
        write_field(&mut buf, &f, &FieldHeader::for_field(&f, FieldKind::Signal)).unwrap();
        assert!(read_field(&buf[..buf.len() - 1]).is_err());
        let mut extra = buf.clone();
        extra.push(0);
        assert!(read_field(extra.as_slice()).is_err());
        buf[0] = b'X';
        assert!(read_field(buf.as_slice()).is_err());
    }

    #[test]
    fn csv_has_index_and_coordinate_columns() {
        let f = sample(|x| Complex64::new(x[0], x[1]), &[0.0, 0.0], &[1.0, 1.0], 0.5).unwrap();
        let mut out = Vec::new();
        write_csv(&mut out, &f).unwrap();
        let text = String::from_utf8(out).unwrap();
        let lines: Vec<&str> = text.lines().collect();
        assert_eq!(lines[0], "i0,i1,x0,x1,re,im");
        assert_eq!(lines.len(), 5);
        assert_eq!(lines[2], "0,1,0.0,0.5,0.0,0.5");
    }
}
