use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::{Path, PathBuf};

use serde::Serialize;
use serde_json::ser::{Formatter, PrettyFormatter};

use crate::error::{Error, Result};
use crate::evolution::TrajectoryRecord;
use crate::verification::StabilizationReport;

use super::config::ScenarioConfig;

/// Decimal float with 17 significant digits.
pub fn fmt_f64(v: f64) -> String {
    format!("{v:.16e}")
}

/// Pretty JSON with every float written by [`fmt_f64`] (`null` if not finite).
struct FixedDigits<'a>(PrettyFormatter<'a>);

impl Formatter for FixedDigits<'_> {
    fn write_f64<W: ?Sized + Write>(&mut self, writer: &mut W, value: f64) -> io::Result<()> {
        if value.is_finite() {
            writer.write_all(fmt_f64(value).as_bytes())
        } else {
            writer.write_all(b"null")
        }
    }

    fn write_f32<W: ?Sized + Write>(&mut self, writer: &mut W, value: f32) -> io::Result<()> {
        self.write_f64(writer, value as f64)
    }

    fn begin_array<W: ?Sized + Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.0.begin_array(w)
    }

    fn end_array<W: ?Sized + Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.0.end_array(w)
    }

    fn begin_array_value<W: ?Sized + Write>(&mut self, w: &mut W, first: bool) -> io::Result<()> {
        self.0.begin_array_value(w, first)
    }

    fn end_array_value<W: ?Sized + Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.0.end_array_value(w)
    }

    fn begin_object<W: ?Sized + Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.0.begin_object(w)
    }

    fn end_object<W: ?Sized + Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.0.end_object(w)
    }

    fn begin_object_key<W: ?Sized + Write>(&mut self, w: &mut W, first: bool) -> io::Result<()> {
        self.0.begin_object_key(w, first)
    }

    fn begin_object_value<W: ?Sized + Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.0.begin_object_value(w)
    }

    fn end_object_value<W: ?Sized + Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.0.end_object_value(w)
    }
}

pub fn to_json_string<T: Serialize>(value: &T) -> String {
    let mut buf = Vec::new();
    let mut ser =
        serde_json::Serializer::with_formatter(&mut buf, FixedDigits(PrettyFormatter::new()));
    value
        .serialize(&mut ser)
        .expect("in-memory JSON serialization cannot fail");
    buf.push(b'\n');
    String::from_utf8(buf).expect("serde_json emits UTF-8")
}

#[derive(Serialize)]
struct RunMeta<'a> {
    config: &'a ScenarioConfig,
    h: f64,
    tau: f64,
    experimental: bool,
}

pub const OUTPUT_FILES: [&str; 5] = [
    "energy.csv",
    "snapshots.csv",
    "contacts.csv",
    "impacts.json",
    "run_meta.json",
];

/// Writes the CSV/JSON outputs of a run into `dir` and returns their paths.
pub fn write_outputs(
    record: &TrajectoryRecord,
    report: &StabilizationReport,
    config: &ScenarioConfig,
    dir: &Path,
) -> Result<Vec<PathBuf>> {
    std::fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
    let n = record.n_steps();
    let grid = *record.ops().grid();
    let stride = config.output.stride.max(1);

    let mut paths = Vec::new();
    let mut emit = |name: &str, fill: &dyn Fn(&mut dyn Write) -> io::Result<()>| -> Result<()> {
        let path = dir.join(name);
        let file = File::create(&path).map_err(|e| Error::io(&path, e))?;
        let mut w = BufWriter::new(file);
        fill(&mut w)
            .and_then(|_| w.flush())
            .map_err(|e| Error::io(&path, e))?;
        paths.push(path);
        Ok(())
    };

    emit("energy.csv", &|w| {
        writeln!(w, "t,E,kinetic,seminorm_sq")?;
        for i in 0..=n {
            let e = record.energy(i);
            writeln!(
                w,
                "{},{},{},{}",
                fmt_f64(record.time(i as isize)),
                fmt_f64(e.total()),
                fmt_f64(e.kinetic),
                fmt_f64(e.seminorm_sq)
            )?;
        }
        Ok(())
    })?;

    emit("snapshots.csv", &|w| {
        writeln!(w, "t,x,u,v")?;
        let nodes = grid.nodes();
        for i in (0..=n).filter(|i| i % stride == 0 || *i == n) {
            let t = fmt_f64(record.time(i as isize));
            let (u, v) = (record.snapshot(i as isize), record.velocity(i));
            for (j, x) in nodes.iter().enumerate() {
                writeln!(
                    w,
                    "{t},{},{},{}",
                    fmt_f64(*x),
                    fmt_f64(u.at_node(j)),
                    fmt_f64(v.at_node(j))
                )?;
            }
        }
        Ok(())
    })?;

    emit("contacts.csv", &|w| {
        writeln!(w, "t,j_min,j_max")?;
        for i in 0..=n {
            let c = record.contacts(i);
            if let (Some(lo), Some(hi)) = (c.iter().min(), c.iter().max()) {
                writeln!(w, "{},{lo},{hi}", fmt_f64(record.time(i as isize)))?;
            }
        }
        Ok(())
    })?;

    emit("impacts.json", &|w| {
        w.write_all(to_json_string(report).as_bytes())
    })?;

    let meta = RunMeta {
        config,
        h: grid.h(),
        tau: record.tau(),
        experimental: config.is_experimental(),
    };
    emit("run_meta.json", &|w| {
        w.write_all(to_json_string(&meta).as_bytes())
    })?;

    Ok(paths)
}
