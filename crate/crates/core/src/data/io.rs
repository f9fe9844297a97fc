//! JSON Lines files: a header object followed by one record per sample.

use std::io::{BufRead, Write};

use nalgebra::DVector;
use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::SwitchingWord;

use super::{DataPair, DataPairSet, OutputTrajectories, Provenance, SampleSet};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct TrajectoryHeader {
    pub n: usize,
    #[serde(rename = "M")]
    pub modes: usize,
    pub p: usize,
    #[serde(rename = "T")]
    pub horizon: usize,
    #[serde(rename = "N")]
    pub count: usize,
    pub seed: u64,
}

#[derive(Serialize, Deserialize)]
struct TrajectoryRecord {
    i: usize,
    #[serde(default)]
    x0: Option<Vec<f64>>,
    #[serde(default)]
    word: Option<Vec<usize>>,
    y: Vec<Vec<f64>>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct PairHeader {
    pub k: usize,
    pub p: usize,
    #[serde(rename = "T")]
    pub horizon: usize,
    #[serde(rename = "N")]
    pub count: usize,
    pub seed: u64,
}

#[derive(Serialize, Deserialize)]
struct PairRecord {
    v: Vec<f64>,
    z: Vec<f64>,
}

fn write_line<W: Write, T: Serialize>(w: &mut W, value: &T) -> Result<()> {
    serde_json::to_writer(&mut *w, value)?;
    w.write_all(b"\n")?;
    Ok(())
}

/// Non-blank lines with their 1-based line numbers.
fn lines<R: BufRead>(r: R) -> impl Iterator<Item = Result<(usize, String)>> {
    r.lines()
        .enumerate()
        .map(|(i, l)| l.map(|l| (i + 1, l)).map_err(Error::from))
        .filter(|l| !matches!(l, Ok((_, s)) if s.trim().is_empty()))
}

fn parse<T: DeserializeOwned>(line_no: usize, text: &str) -> Result<T> {
    serde_json::from_str(text).map_err(|e| Error::Format(format!("line {line_no}: {e}")))
}

/// Writes the sample set. Provenance is emitted when present, `null` otherwise.
pub fn write_trajectories<W: Write>(mut w: W, set: &SampleSet) -> Result<()> {
    let out = set.outputs();
    write_line(
        &mut w,
        &TrajectoryHeader {
            n: set.n,
            modes: set.modes,
            p: out.p(),
            horizon: out.horizon(),
            count: out.len(),
            seed: out.seed(),
        },
    )?;
    for (i, traj) in out.iter().enumerate() {
        let prov = set.provenance().map(|p| &p[i]);
        write_line(
            &mut w,
            &TrajectoryRecord {
                i,
                x0: prov.map(|p| p.x0.as_slice().to_vec()),
                word: prov.map(|p| p.word.0.clone()),
                y: traj.iter().map(|v| v.as_slice().to_vec()).collect(),
            },
        )?;
    }
    w.flush()?;
    Ok(())
}

/// Reads a trajectory file. Provenance is kept only when every record has
/// both `x0` and `word`; a file mixing present and null provenance is rejected.
pub fn read_trajectories<R: BufRead>(r: R) -> Result<SampleSet> {
    let mut it = lines(r);
    let (line_no, text) = it.next().ok_or_else(|| Error::Format("empty trajectory file".into()))??;
    let header: TrajectoryHeader = parse(line_no, &text)?;
    let mut y = Vec::with_capacity(header.count);
    let mut prov = Vec::with_capacity(header.count);
    let mut with_prov = 0usize;
    for line in it {
        let (line_no, text) = line?;
        let rec: TrajectoryRecord = parse(line_no, &text)?;
        if rec.i != y.len() {
            return Err(Error::Format(format!("line {line_no}: record index {} out of order", rec.i)));
        }
        y.push(rec.y.into_iter().map(DVector::from_vec).collect::<Vec<_>>());
        match (rec.x0, rec.word) {
            (Some(x0), Some(word)) => {
                with_prov += 1;
                prov.push(Provenance {
                    x0: DVector::from_vec(x0),
                    word: SwitchingWord(word),
                });
            }
            (None, None) => {}
            _ => return Err(Error::Format(format!("line {line_no}: x0 and word must both be present or both null"))),
        }
    }
    if y.len() != header.count {
        return Err(Error::Format(format!("header declares N = {} but file has {} records", header.count, y.len())));
    }
    let provenance = match with_prov {
        0 => None,
        m if m == y.len() => Some(prov),
        _ => return Err(Error::Format("provenance present on some records but not others".into())),
    };
    let outputs = OutputTrajectories::new(header.p, header.horizon, header.seed, y)?;
    SampleSet::new(header.n, header.modes, outputs, provenance)
}

pub fn write_pairs<W: Write>(mut w: W, pairs: &DataPairSet) -> Result<()> {
    write_line(
        &mut w,
        &PairHeader {
            k: pairs.k,
            p: pairs.p,
            horizon: pairs.horizon,
            count: pairs.len(),
            seed: pairs.seed,
        },
    )?;
    for d in &pairs.pairs {
        write_line(
            &mut w,
            &PairRecord {
                v: d.v.as_slice().to_vec(),
                z: d.z.as_slice().to_vec(),
            },
        )?;
    }
    w.flush()?;
    Ok(())
}

pub fn read_pairs<R: BufRead>(r: R) -> Result<DataPairSet> {
    let mut it = lines(r);
    let (line_no, text) = it.next().ok_or_else(|| Error::Format("empty pair file".into()))??;
    let header: PairHeader = parse(line_no, &text)?;
    if header.k == 0 || header.k >= header.horizon {
        return Err(Error::Format(format!("pair header has k = {} with T = {}", header.k, header.horizon)));
    }
    let kp = header.k * header.p;
    let mut pairs = Vec::with_capacity(header.count);
    for line in it {
        let (line_no, text) = line?;
        let rec: PairRecord = parse(line_no, &text)?;
        if rec.v.len() != kp || rec.z.len() != kp {
            return Err(Error::Format(format!("line {line_no}: windows must have length kp = {kp}")));
        }
        if rec.v.iter().chain(&rec.z).any(|x| !x.is_finite()) {
            return Err(Error::Format(format!("line {line_no}: non-finite entry")));
        }
        pairs.push(DataPair {
            v: DVector::from_vec(rec.v),
            z: DVector::from_vec(rec.z),
        });
    }
    if pairs.len() != header.count {
        return Err(Error::Format(format!("header declares N = {} but file has {} pairs", header.count, pairs.len())));
    }
    Ok(DataPairSet {
        k: header.k,
        p: header.p,
        horizon: header.horizon,
        seed: header.seed,
        pairs,
    })
}
