//! CSV vertex dumps: one row per vertex, `set,step,vertex,x1,..,xn`. An
//! empty set is a single row with blank vertex and coordinate fields. Lines
//! starting with `#` are summaries.

use std::io::Write;

use crate::error::{Error, Result};
use crate::geometry::{Polytope, Vector};
use crate::tolerance::Tolerances;

/// Formats like `{}` but without a negative zero.
pub fn num(v: f64) -> String {
    if v == 0.0 {
        "0".into()
    } else {
        v.to_string()
    }
}

pub struct SetWriter<W: Write> {
    inner: Option<csv::Writer<W>>,
    dim: usize,
}

fn csv_writer<W: Write>(out: W) -> csv::Writer<W> {
    csv::WriterBuilder::new().flexible(true).from_writer(out)
}

impl<W: Write> SetWriter<W> {
    pub fn new(out: W, dim: usize) -> Result<Self> {
        let mut inner = csv_writer(out);
        let mut header = vec!["set".to_string(), "step".into(), "vertex".into()];
        header.extend((1..=dim).map(|j| format!("x{j}")));
        inner.write_record(&header).map_err(csv_err)?;
        Ok(Self { inner: Some(inner), dim })
    }

    fn writer(&mut self) -> &mut csv::Writer<W> {
        self.inner.as_mut().expect("writer present between calls")
    }

    pub fn write_set(&mut self, label: &str, step: usize, p: &Polytope, tol: &Tolerances) -> Result<()> {
        let vs = p.vertices(tol)?;
        if vs.is_empty() {
            let mut row = vec![label.to_string(), step.to_string(), String::new()];
            row.extend(std::iter::repeat(String::new()).take(self.dim));
            return self.writer().write_record(&row).map_err(csv_err);
        }
        for (k, v) in vs.iter().enumerate() {
            let mut row = vec![label.to_string(), step.to_string(), k.to_string()];
            row.extend(v.iter().map(|&c| num(c)));
            self.writer().write_record(&row).map_err(csv_err)?;
        }
        Ok(())
    }

    /// Writes a `# ...` summary line after the pending rows.
    pub fn comment(&mut self, text: &str) -> Result<()> {
        let mut out = self.take()?;
        writeln!(out, "# {text}").map_err(io_err)?;
        self.inner = Some(csv_writer(out));
        Ok(())
    }

    fn take(&mut self) -> Result<W> {
        let w = self.inner.take().expect("writer present between calls");
        w.into_inner().map_err(|e| io_err(e.into_error()))
    }

    pub fn finish(mut self) -> Result<W> {
        self.take()
    }
}

#[derive(Clone, Debug)]
pub struct DumpedSet {
    pub label: String,
    pub step: usize,
    pub set: Polytope,
}

/// Reads a dump back, rebuilding each set as the hull of its vertices.
pub fn parse_dump(text: &str, tol: &Tolerances) -> Result<Vec<DumpedSet>> {
    let mut rd = csv::ReaderBuilder::new()
        .comment(Some(b'#'))
        .flexible(true)
        .from_reader(text.as_bytes());
    let dim = rd.headers().map_err(csv_err)?.len().saturating_sub(3);
    let mut groups: Vec<(String, usize, Vec<Vector>, bool)> = Vec::new();
    for rec in rd.records() {
        let rec = rec.map_err(csv_err)?;
        let line = rec.position().map_or(0, |p| p.line());
        let bad = |what: &str| Error::Parse(format!("line {line}: {what}"));
        if rec.len() != dim + 3 {
            return Err(bad("wrong number of fields"));
        }
        let label = rec[0].to_string();
        let step: usize = rec[1].parse().map_err(|_| bad("step is not an integer"))?;
        let is_empty = rec[2].is_empty();
        let point = if is_empty {
            None
        } else {
            let xs: std::result::Result<Vec<f64>, _> = (3..dim + 3).map(|j| rec[j].parse::<f64>()).collect();
            Some(Vector::from_vec(xs.map_err(|_| bad("bad coordinate"))?))
        };
        let same = groups.last().is_some_and(|(l, s, _, _)| *l == label && *s == step);
        if !same {
            groups.push((label, step, Vec::new(), is_empty));
        }
        let g = groups.last_mut().expect("pushed above");
        if g.3 != is_empty {
            return Err(bad("empty marker mixed with vertices"));
        }
        g.2.extend(point);
    }
    groups
        .into_iter()
        .map(|(label, step, pts, empty)| {
            let set = if empty {
                Polytope::empty(dim)
            } else {
                Polytope::from_vertices(dim, &pts, tol)?
            };
            Ok(DumpedSet { label, step, set })
        })
        .collect()
}

fn csv_err(e: csv::Error) -> Error {
    Error::Parse(format!("csv: {e}"))
}

fn io_err(e: std::io::Error) -> Error {
    Error::Parse(format!("output: {e}"))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn round_trip_with_empty_and_degenerate_sets() {
        let t = Tolerances::default();
        let seg = Polytope::from_vertices(
            2,
            &[Vector::from_column_slice(&[0.5, 1.0]), Vector::from_column_slice(&[-0.5, -1.0])],
            &t,
        )
        .unwrap();
        let sets = [Polytope::unit_box(2, 1.0), seg, Polytope::empty(2), Polytope::origin(2)];
        let mut w = SetWriter::new(Vec::new(), 2).unwrap();
        for (i, s) in sets.iter().enumerate() {
            w.write_set("C", i, s, &t).unwrap();
        }
        w.comment("C steps=4").unwrap();
        let text = String::from_utf8(w.finish().unwrap()).unwrap();
        assert!(text.starts_with("set,step,vertex,x1,x2\nC,0,0,-1,-1\n"));
        assert!(text.contains("C,2,,,\n") && text.ends_with("# C steps=4\n"));
        let back = parse_dump(&text, &t).unwrap();
        assert_eq!(back.len(), 4);
        for (b, s) in back.iter().zip(&sets) {
            assert!(b.set.set_equal(s, &t).unwrap());
        }
        assert!(back[2].set.known_empty());
    }

    #[test]
    fn bad_rows_are_rejected() {
        let t = Tolerances::default();
        assert!(parse_dump("set,step,vertex,x1\nC,zero,0,1\n", &t).is_err());
        assert!(parse_dump("set,step,vertex,x1\nC,0,0,abc\n", &t).is_err());
    }

    #[test]
    fn negative_zero_is_printed_as_zero() {
        assert_eq!(num(-0.0), "0");
        assert_eq!(num(-0.25), "-0.25");
    }
}
