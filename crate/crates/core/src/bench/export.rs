use std::io::{Read, Write};
use std::path::Path;

use super::{BenchError, EntropyRecord, ExperimentRecord};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ExportFormat {
    Csv,
    Json,
}

impl ExportFormat {
    /// From a file extension; CSV unless it is `.json`.
    pub fn from_path(path: &Path) -> ExportFormat {
        match path.extension().and_then(|e| e.to_str()) {
            Some("json") => ExportFormat::Json,
            _ => ExportFormat::Csv,
        }
    }
}

pub fn write_records_csv<W: Write>(records: &[ExperimentRecord], w: W) -> Result<(), BenchError> {
    let mut out = csv::Writer::from_writer(w);
    for r in records {
        out.serialize(r)?;
    }
    out.flush()?;
    Ok(())
}

pub fn read_records_csv<R: Read>(r: R) -> Result<Vec<ExperimentRecord>, BenchError> {
    csv::Reader::from_reader(r)
        .deserialize()
        .collect::<Result<_, _>>()
        .map_err(Into::into)
}

pub fn write_records_json<W: Write>(records: &[ExperimentRecord], mut w: W) -> Result<(), BenchError> {
    serde_json::to_writer_pretty(&mut w, records)?;
    writeln!(w)?;
    Ok(())
}

pub fn export_records(records: &[ExperimentRecord], path: &Path) -> Result<(), BenchError> {
    let f = std::io::BufWriter::new(std::fs::File::create(path)?);
    match ExportFormat::from_path(path) {
        ExportFormat::Csv => write_records_csv(records, f),
        ExportFormat::Json => write_records_json(records, f),
    }
}

pub fn import_records(path: &Path) -> Result<Vec<ExperimentRecord>, BenchError> {
    let f = std::io::BufReader::new(std::fs::File::open(path)?);
    match ExportFormat::from_path(path) {
        ExportFormat::Csv => read_records_csv(f),
        ExportFormat::Json => Ok(serde_json::from_reader(f)?),
    }
}

pub fn write_entropy_csv<W: Write>(records: &[EntropyRecord], w: W) -> Result<(), BenchError> {
    let mut out = csv::Writer::from_writer(w);
    for r in records {
        out.serialize(r)?;
    }
    out.flush()?;
    Ok(())
}

pub fn read_entropy_csv<R: Read>(r: R) -> Result<Vec<EntropyRecord>, BenchError> {
    csv::Reader::from_reader(r)
        .deserialize()
        .collect::<Result<_, _>>()
        .map_err(Into::into)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bench::Role;
    use crate::machine::RunStatus;
    use crate::problems::Problem;

    fn sample() -> Vec<ExperimentRecord> {
        vec![ExperimentRecord {
            problem: Problem::Rotation,
            role: Role::SingleTapeVerifier,
            n: 16,
            cert_bits: 4,
            instance_id: 2,
            seed: 99,
            steps: 12345,
            verdict: RunStatus::FuelExhausted,
            fuel: 20000,
        }]
    }

    #[test]
    fn csv_layout_and_round_trip() {
        let mut buf = Vec::new();
        write_records_csv(&sample(), &mut buf).unwrap();
        let text = String::from_utf8(buf.clone()).unwrap();
        assert_eq!(
            text,
            "problem,role,n,cert_bits,instance_id,seed,steps,verdict,fuel\n\
             rotation,single-tape-verifier,16,4,2,99,12345,fuel-exhausted,20000\n"
        );
        assert_eq!(read_records_csv(&buf[..]).unwrap(), sample());
    }

    #[test]
    fn json_round_trip() {
        let dir = tempfile::tempdir().unwrap();
        let p = dir.path().join("r.json");
        export_records(&sample(), &p).unwrap();
        assert_eq!(import_records(&p).unwrap(), sample());
        let c = dir.path().join("r.csv");
        export_records(&sample(), &c).unwrap();
        assert_eq!(import_records(&c).unwrap(), sample());
    }
}
