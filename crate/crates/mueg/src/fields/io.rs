//! `MUEG-FIELD 1` text files.
//!
//! ```text
//! MUEG-FIELD 1
//! dim 3 components 1
//! <origin, d numbers>
//! <spacing, d numbers>
//! <counts, d integers>
//! <one point per line, x fastest: c reals, or c (re, im) pairs>
//! ```

use std::fmt::Write as _;
use std::path::Path;

use num_complex::Complex64;

use super::{GridSpec, ScalarField, VectorField};
use crate::{Error, Result};

pub const MAGIC: &str = "MUEG-FIELD 1";

/// Raw contents of a field file.
#[derive(Clone, Debug, PartialEq)]
pub struct FieldData {
    pub grid: GridSpec,
    pub components: usize,
    pub complex: bool,
    /// Point-major: `components` reals (or `2 * components` for complex) per point.
    pub data: Vec<f64>,
}

impl FieldData {
    fn width(&self) -> usize {
        self.components * if self.complex { 2 } else { 1 }
    }

    pub fn to_text(&self) -> String {
        let g = &self.grid;
        let d = g.dim;
        let mut s = String::new();
        let _ = writeln!(s, "{MAGIC}");
        let _ = writeln!(s, "dim {d} components {}", self.components);
        let join = |xs: &[f64]| xs.iter().map(|x| format!("{x:.16e}")).collect::<Vec<_>>().join(" ");
        let _ = writeln!(s, "{}", join(&g.origin[..d]));
        let _ = writeln!(s, "{}", join(&g.spacing[..d]));
        let _ = writeln!(s, "{}", g.counts[..d].iter().map(|c| c.to_string()).collect::<Vec<_>>().join(" "));
        for row in self.data.chunks(self.width()) {
            let _ = writeln!(s, "{}", join(row));
        }
        s
    }

    pub fn parse(text: &str) -> Result<FieldData> {
        let mut lines = text.lines().enumerate().map(|(i, l)| (i + 1, l.trim()));
        let mut next = |what: &str| -> Result<(usize, &str)> {
            for (n, l) in lines.by_ref() {
                if !l.is_empty() {
                    return Ok((n, l));
                }
            }
            Err(Error::parse(0, format!("unexpected end of file, expected {what}")))
        };
        let (n, magic) = next("header")?;
        if magic != MAGIC {
            return Err(Error::parse(n, format!("expected '{MAGIC}', found '{magic}'")));
        }
        let (n, shape) = next("shape line")?;
        let toks: Vec<&str> = shape.split_whitespace().collect();
        if toks.len() != 4 || toks[0] != "dim" || toks[2] != "components" {
            return Err(Error::parse(n, "expected 'dim <d> components <c>'"));
        }
        let dim: usize = toks[1].parse().map_err(|_| Error::parse(n, "bad dimension"))?;
        let components: usize = toks[3].parse().map_err(|_| Error::parse(n, "bad component count"))?;
        if !(1..=3).contains(&dim) || components == 0 {
            return Err(Error::parse(n, "dimension must be 1-3 and components positive"));
        }
        let floats = |n: usize, l: &str, k: usize| -> Result<Vec<f64>> {
            let v: Vec<f64> = l
                .split_whitespace()
                .map(|t| t.parse::<f64>().map_err(|_| Error::parse(n, format!("bad number '{t}'"))))
                .collect::<Result<_>>()?;
            if v.len() != k {
                return Err(Error::parse(n, format!("expected {k} values, found {}", v.len())));
            }
            Ok(v)
        };
        let (n, l) = next("origin")?;
        let origin = floats(n, l, dim)?;
        let (n, l) = next("spacing")?;
        let spacing = floats(n, l, dim)?;
        let (n, l) = next("counts")?;
        let counts: Vec<usize> = l
            .split_whitespace()
            .map(|t| t.parse::<usize>().map_err(|_| Error::parse(n, format!("bad count '{t}'"))))
            .collect::<Result<_>>()?;
        if counts.len() != dim {
            return Err(Error::parse(n, format!("expected {dim} counts")));
        }
        let grid = GridSpec::new(dim, &origin, &spacing, &counts).map_err(|e| Error::parse(n, e.to_string()))?;
        let npts = grid.len();
        let mut data = Vec::with_capacity(npts * components);
        let mut complex = None;
        let mut seen = 0;
        for (n, l) in lines {
            if l.is_empty() {
                continue;
            }
            let k = l.split_whitespace().count();
            let is_c = match complex {
                Some(c) => c,
                None => {
                    let c = if k == components {
                        false
                    } else if k == 2 * components {
                        true
                    } else {
                        return Err(Error::parse(n, format!("expected {components} or {} values", 2 * components)));
                    };
                    complex = Some(c);
                    c
                }
            };
            let width = if is_c { 2 * components } else { components };
            data.extend(floats(n, l, width)?);
            seen += 1;
            if seen > npts {
                return Err(Error::parse(n, format!("more than {npts} value lines")));
            }
        }
        if seen != npts {
            return Err(Error::parse(0, format!("expected {npts} value lines, found {seen}")));
        }
        Ok(FieldData { grid, components, complex: complex.unwrap_or(false), data })
    }

    pub fn read(path: &Path) -> Result<FieldData> {
        let text = std::fs::read_to_string(path)?;
        Self::parse(&text)
    }

    pub fn write(&self, path: &Path) -> Result<()> {
        std::fs::write(path, self.to_text())?;
        Ok(())
    }

    pub fn from_scalar(f: &ScalarField<f64>) -> FieldData {
        FieldData { grid: f.grid.clone(), components: 1, complex: false, data: f.values.clone() }
    }

    pub fn from_complex(f: &ScalarField<Complex64>) -> FieldData {
        let data = f.values.iter().flat_map(|z| [z.re, z.im]).collect();
        FieldData { grid: f.grid.clone(), components: 1, complex: true, data }
    }

    pub fn from_vector(f: &VectorField<f64>) -> FieldData {
        let d = f.grid.dim;
        let data = f.values.iter().flat_map(|v| v[..d].to_vec()).collect();
        FieldData { grid: f.grid.clone(), components: d, complex: false, data }
    }

    pub fn to_scalar(&self) -> Result<ScalarField<f64>> {
        if self.components != 1 || self.complex {
            return Err(Error::invalid("expected a real scalar field"));
        }
        ScalarField::new(self.grid.clone(), self.data.clone())
    }

    pub fn to_complex(&self) -> Result<ScalarField<Complex64>> {
        if self.components != 1 {
            return Err(Error::invalid("expected a scalar field"));
        }
        let values = if self.complex {
            self.data.chunks(2).map(|c| Complex64::new(c[0], c[1])).collect()
        } else {
            self.data.iter().map(|&x| Complex64::new(x, 0.0)).collect()
        };
        ScalarField::new(self.grid.clone(), values)
    }

    pub fn to_vector(&self) -> Result<VectorField<f64>> {
        if self.complex || self.components != self.grid.dim {
            return Err(Error::invalid("expected a real vector field with dim components"));
        }
        let d = self.components;
        let values = self
            .data
            .chunks(d)
            .map(|c| {
                let mut v = [0.0; 3];
                v[..d].copy_from_slice(c);
                v
            })
            .collect();
        VectorField::new(self.grid.clone(), values)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn roundtrip_is_exact() {
        let g = GridSpec::new(2, &[-1.0, 0.5], &[0.1, 0.3], &[4, 5]).unwrap();
        let f = ScalarField::from_fn(&g, |p| (p[0] * 3.1).sin() / 7.0 + p[1]);
        let d = FieldData::from_scalar(&f);
        let back = FieldData::parse(&d.to_text()).unwrap();
        assert_eq!(back, d);
        let c = ScalarField::from_fn(&g, |p| Complex64::new(p[0], -p[1] / 3.0));
        let back = FieldData::parse(&FieldData::from_complex(&c).to_text()).unwrap();
        assert!(back.complex);
        assert_eq!(back.to_complex().unwrap().values, c.values);
    }

    #[test]
    fn malformed_lines_report_line_numbers() {
        let bad = "MUEG-FIELD 1\ndim 1 components 1\n0.0\n0.1\n4\n1\n2\nx\n4\n";
        match FieldData::parse(bad) {
            Err(Error::Parse { line, .. }) => assert_eq!(line, 8),
            other => panic!("{other:?}"),
        }
        match FieldData::parse("MUEG-FIELD 2\n") {
            Err(Error::Parse { line, .. }) => assert_eq!(line, 1),
            other => panic!("{other:?}"),
        }
    }
}
