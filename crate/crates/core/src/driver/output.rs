use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};

use crate::error::{Error, Result};
use crate::mesh::Grid;
use crate::scalar::Real;
use crate::thermo::State;

/// One row of `diagnostics.csv`.
#[derive(Debug, Clone, PartialEq)]
pub struct DiagnosticRecord {
    pub t: f64,
    pub theta_prime_min: f64,
    pub theta_prime_max: f64,
    pub w_min: f64,
    pub w_max: f64,
    pub front_location: Option<f64>,
    pub mu_av: f64,
    pub total_mass: f64,
    pub pressure_iterations: usize,
    pub enthalpy_iterations: usize,
    pub filter_iterations: usize,
}

pub const DIAGNOSTICS_HEADER: [&str; 8] =
    ["t", "theta_prime_min", "theta_prime_max", "w_min", "w_max", "front_location", "mu_av", "total_mass"];

/// `snapshot_t<seconds>.vtk`, with the time printed in its shortest form.
pub fn snapshot_file_name(t: f64) -> String {
    format!("snapshot_t{t}.vtk")
}

/// Writes the diagnostics table. An absent front is an empty cell.
pub fn write_diagnostics(series: &[DiagnosticRecord], path: &Path) -> Result<()> {
    let mut w = csv::WriterBuilder::new().terminator(csv::Terminator::Any(b'\n')).from_path(path)?;
    w.write_record(DIAGNOSTICS_HEADER)?;
    for r in series {
        let front = r.front_location.map(|f| f.to_string()).unwrap_or_default();
        w.write_record([
            r.t.to_string(),
            r.theta_prime_min.to_string(),
            r.theta_prime_max.to_string(),
            r.w_min.to_string(),
            r.w_max.to_string(),
            front,
            r.mu_av.to_string(),
            r.total_mass.to_string(),
        ])?;
    }
    w.flush()?;
    Ok(())
}

/// Reads a table written by [`write_diagnostics`]. Iteration counts are
/// not stored and come back as zero.
pub fn read_diagnostics(path: &Path) -> Result<Vec<DiagnosticRecord>> {
    let mut r = csv::Reader::from_path(path)?;
    let mut out = Vec::new();
    for row in r.records() {
        let row = row?;
        let num = |i: usize| -> Result<f64> {
            row[i].parse().map_err(|_| Error::Contract(format!("bad number `{}` in {}", &row[i], path.display())))
        };
        out.push(DiagnosticRecord {
            t: num(0)?,
            theta_prime_min: num(1)?,
            theta_prime_max: num(2)?,
            w_min: num(3)?,
            w_max: num(4)?,
            front_location: if row[5].is_empty() { None } else { Some(num(5)?) },
            mu_av: num(6)?,
            total_mass: num(7)?,
            pressure_iterations: 0,
            enthalpy_iterations: 0,
            filter_iterations: 0,
        });
    }
    Ok(out)
}

/// Legacy VTK text file with the cell fields of `state`.
pub fn write_snapshot<T: Real>(state: &State<T>, theta_prime: &[T], grid: &Grid<T>, t: T, path: &Path) -> Result<()> {
    let n = grid.n_cells();
    grid.check_len("state", state.n_cells())?;
    grid.check_len("theta_prime", theta_prime.len())?;
    let mut w = BufWriter::new(File::create(path)?);
    let (x0, z0) = (grid.x0, grid.z0);
    writeln!(w, "# vtk DataFile Version 3.0")?;
    writeln!(w, "efr-atmos t = {t}")?;
    writeln!(w, "ASCII")?;
    writeln!(w, "DATASET STRUCTURED_POINTS")?;
    writeln!(w, "DIMENSIONS {} {} 2", grid.nx + 1, grid.nz + 1)?;
    writeln!(w, "ORIGIN {} {} 0", x0.as_f64(), z0.as_f64())?;
    writeln!(w, "SPACING {} {} {}", grid.dx.as_f64(), grid.dz.as_f64(), grid.dx.as_f64())?;
    writeln!(w, "CELL_DATA {n}")?;
    let fields: [(&str, &[T]); 8] = [
        ("rho", &state.rho),
        ("u", &state.u.x),
        ("w", &state.u.z),
        ("p", &state.p),
        ("p_prime", &state.p_prime),
        ("h", &state.h),
        ("T", &state.t),
        ("theta_prime", theta_prime),
    ];
    for (name, data) in fields {
        writeln!(w, "SCALARS {name} double 1")?;
        writeln!(w, "LOOKUP_TABLE default")?;
        for v in data {
            writeln!(w, "{:.16e}", v.as_f64())?;
        }
    }
    w.flush()?;
    Ok(())
}

/// Reads one named array back from a snapshot written by [`write_snapshot`].
pub fn read_snapshot_field(path: &Path, name: &str) -> Result<Vec<f64>> {
    let text = std::fs::read_to_string(path)?;
    let n: usize = text
        .lines()
        .find_map(|l| l.strip_prefix("CELL_DATA "))
        .and_then(|s| s.trim().parse().ok())
        .ok_or_else(|| Error::Contract(format!("{} has no CELL_DATA header", path.display())))?;
    let header = format!("SCALARS {name} ");
    let mut lines = text.lines().skip_while(|l| !l.starts_with(&header));
    if lines.next().is_none() {
        return Err(Error::Contract(format!("{} has no array `{name}`", path.display())));
    }
    lines
        .skip(1)
        .take(n)
        .map(|l| l.trim().parse().map_err(|_| Error::Contract(format!("bad value `{l}` in `{name}`"))))
        .collect()
}

/// Output locations of one run.
#[derive(Debug, Clone)]
pub struct OutputDir {
    pub root: PathBuf,
}

impl OutputDir {
    pub fn create(root: impl Into<PathBuf>) -> Result<Self> {
        let root = root.into();
        std::fs::create_dir_all(&root)?;
        Ok(Self { root })
    }

    pub fn diagnostics(&self) -> PathBuf {
        self.root.join("diagnostics.csv")
    }

    pub fn manifest(&self) -> PathBuf {
        self.root.join("manifest.txt")
    }

    pub fn snapshot(&self, t: f64) -> PathBuf {
        self.root.join(snapshot_file_name(t))
    }
}
