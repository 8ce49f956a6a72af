//! Output formats: nodal field dumps, the iteration log and the phase summary.

use std::fmt::Write as _;
use std::io::{self, BufRead, Write};
use std::path::Path;

use gltr_core::homotopy::{IterationRecord, PhaseSummary, Termination};
use gltr_core::mesh::{MeshCG1, Rect};

/// Column order of `iterations.csv`.
pub const CSV_COLUMNS: [&str; 13] = [
    "n",
    "eps",
    "delta",
    "cvxflag",
    "accepted",
    "j_value",
    "gl_energy",
    "total",
    "ared",
    "pred",
    "ratio",
    "nonbinary_fraction",
    "wall_time",
];

/// First line holds `nx ny x_min x_max y_min y_max`, then one value per node
/// in mesh order.
pub fn write_field<W: Write>(mut out: W, mesh: &MeshCG1, values: &[f64]) -> io::Result<()> {
    if values.len() != mesh.n_nodes() {
        return Err(io::Error::new(
            io::ErrorKind::InvalidInput,
            format!("{} values for {} nodes", values.len(), mesh.n_nodes()),
        ));
    }
    let b = mesh.bounds;
    writeln!(
        out,
        "{} {} {} {} {} {}",
        mesh.nx, mesh.ny, b.x_min, b.x_max, b.y_min, b.y_max
    )?;
    for v in values {
        writeln!(out, "{v}")?;
    }
    out.flush()
}

pub fn save_field(path: &Path, mesh: &MeshCG1, values: &[f64]) -> io::Result<()> {
    write_field(io::BufWriter::new(std::fs::File::create(path)?), mesh, values)
}

#[derive(Debug, Clone, PartialEq)]
pub struct FieldDump {
    pub nx: usize,
    pub ny: usize,
    pub bounds: Rect,
    pub values: Vec<f64>,
}

pub fn read_field<R: BufRead>(input: R) -> io::Result<FieldDump> {
    let bad = |msg: String| io::Error::new(io::ErrorKind::InvalidData, msg);
    let mut lines = input.lines();
    let header = lines.next().ok_or_else(|| bad("empty field file".into()))??;
    let parts: Vec<&str> = header.split_whitespace().collect();
    if parts.len() != 6 {
        return Err(bad(format!("header has {} entries, expected 6", parts.len())));
    }
    let int = |s: &str| s.parse::<usize>().map_err(|e| bad(format!("{s}: {e}")));
    let float = |s: &str| s.parse::<f64>().map_err(|e| bad(format!("{s}: {e}")));
    let (nx, ny) = (int(parts[0])?, int(parts[1])?);
    let bounds = Rect::new(float(parts[2])?, float(parts[3])?, float(parts[4])?, float(parts[5])?);
    let values = lines
        .filter(|l| l.as_ref().map_or(true, |s| !s.trim().is_empty()))
        .map(|l| float(l?.trim()))
        .collect::<io::Result<Vec<f64>>>()?;
    if values.len() != (nx + 1) * (ny + 1) {
        return Err(bad(format!("{} values for a {nx}x{ny} grid", values.len())));
    }
    Ok(FieldDump { nx, ny, bounds, values })
}

fn flag(b: bool) -> &'static str {
    if b {
        "1"
    } else {
        "0"
    }
}

/// Writes the header row and one row per record.
pub fn write_iterations<W: Write>(out: W, records: &[IterationRecord], record_wall_time: bool) -> io::Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(CSV_COLUMNS)?;
    for r in records {
        let wall = if record_wall_time { r.wall_time } else { 0.0 };
        w.write_record([
            r.n.to_string(),
            r.eps.to_string(),
            r.delta.to_string(),
            flag(r.cvxflag).to_string(),
            flag(r.accepted).to_string(),
            r.j_value.to_string(),
            r.gl_energy.to_string(),
            r.total.to_string(),
            r.ared.to_string(),
            r.pred.to_string(),
            r.ratio.to_string(),
            r.nonbinary_fraction.to_string(),
            wall.to_string(),
        ])?;
    }
    w.flush()
}

/// Per-phase table: ε, iterations, accepted steps, initial and final
/// instationarity surrogate, nonbinary fraction of the last accepted
/// iterate, total objective at phase end.
pub fn format_summary(phases: &[PhaseSummary], termination: Option<Termination>) -> String {
    let mut s = String::new();
    let _ = writeln!(
        s,
        "{:>12} {:>6} {:>9} {:>14} {:>14} {:>11} {:>14}",
        "eps", "iters", "accepted", "initial_pred", "final_pred", "nonbinary", "total"
    );
    for p in phases {
        let nbf = p
            .final_nonbinary_fraction
            .map_or_else(|| "-".to_string(), |v| format!("{v:.4}"));
        let _ = writeln!(
            s,
            "{:>12.4e} {:>6} {:>9} {:>14.6e} {:>14.6e} {:>11} {:>14.8e}",
            p.eps, p.iterations, p.accepted, p.initial_surrogate, p.final_surrogate, nbf, p.final_total
        );
    }
    let _ = match termination {
        Some(t) => writeln!(s, "termination: {t}"),
        None => writeln!(s, "termination: aborted"),
    };
    s
}

#[cfg(test)]
mod tests {
    use super::*;

    fn record(n: usize) -> IterationRecord {
        IterationRecord {
            n,
            eps: 0.2,
            delta: 0.75,
            cvxflag: true,
            accepted: n.is_multiple_of(2),
            j_value: 1.5e-3,
            gl_energy: 2.25,
            total: 3.75e-3,
            ared: 1e-4,
            pred: 2e-4,
            ratio: 0.5,
            nonbinary_fraction: 0.125,
            wall_time: 3.5,
        }
    }

    #[test]
    fn iteration_log_matches_golden_output() {
        let mut buf = Vec::new();
        let mut r1 = record(1);
        r1.pred = 0.0;
        r1.ratio = f64::NAN;
        write_iterations(&mut buf, &[record(0), r1], false).unwrap();
        let golden = "\
n,eps,delta,cvxflag,accepted,j_value,gl_energy,total,ared,pred,ratio,nonbinary_fraction,wall_time
0,0.2,0.75,1,1,0.0015,2.25,0.00375,0.0001,0.0002,0.5,0.125,0
1,0.2,0.75,1,0,0.0015,2.25,0.00375,0.0001,0,NaN,0.125,0
";
        assert_eq!(String::from_utf8(buf).unwrap(), golden);
    }

    #[test]
    fn wall_time_is_written_only_on_request() {
        let mut buf = Vec::new();
        write_iterations(&mut buf, &[record(0)], true).unwrap();
        assert!(String::from_utf8(buf).unwrap().trim_end().ends_with(",3.5"));
    }

    #[test]
    fn field_round_trips() {
        let mesh = MeshCG1::build(Rect::new(-1.0, 1.0, -1.0, 2.0), 3, 2).unwrap();
        let values = mesh.interpolate(|x, y| 0.1 * x + y / 3.0);
        let mut buf = Vec::new();
        write_field(&mut buf, &mesh, &values).unwrap();
        let text = String::from_utf8(buf.clone()).unwrap();
        assert_eq!(text.lines().next(), Some("3 2 -1 1 -1 2"));
        let dump = read_field(buf.as_slice()).unwrap();
        assert_eq!((dump.nx, dump.ny, dump.bounds), (3, 2, mesh.bounds));
        assert_eq!(dump.values, values);
    }

    #[test]
    fn truncated_field_is_rejected() {
        assert!(read_field("2 2 0 1 0 1\n0.5\n".as_bytes()).is_err());
        assert!(read_field("".as_bytes()).is_err());
    }

    #[test]
    fn summary_lists_every_phase() {
        let p = PhaseSummary {
            eps: 1.0,
            iterations: 10,
            accepted: 4,
            initial_surrogate: 0.12,
            final_surrogate: 3e-3,
            final_nonbinary_fraction: None,
            final_total: 0.5,
        };
        let s = format_summary(&[p, PhaseSummary { eps: 0.2, ..p }], Some(Termination::NoProgress));
        assert_eq!(s.lines().count(), 4);
        assert!(s.lines().nth(1).unwrap().contains(" - "));
    }
}
