//! Problem-spec JSON: schema, parsing, and validation with field paths.

use num::rational::BigRational;
use num::traits::{One, Signed};
use serde::Deserialize;

use orbit_core::jordan::{BlockVector, JordanBlock, JordanSystem, Segment};
use orbit_core::property_p::{PropertyPOperator, PropertyPTail, TailKind, TailOperator};
use orbit_core::scalar::{parse_rational, Scalar};
use orbit_core::Mode;

/// A spec problem: malformed JSON, bad shapes, unparsable rationals.
/// `path` points at the offending field.
#[derive(Debug)]
pub struct SpecError {
    pub path: String,
    pub message: String,
}

impl std::fmt::Display for SpecError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{}: {}", self.path, self.message)
    }
}

impl std::error::Error for SpecError {}

fn err(path: impl Into<String>, message: impl Into<String>) -> SpecError {
    SpecError {
        path: path.into(),
        message: message.into(),
    }
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawSpec {
    #[serde(default)]
    scalar_mode: Option<String>,
    blocks: Vec<RawBlock>,
    x: Vec<Vec<RawCoord>>,
    c: Vec<Vec<RawCoord>>,
    #[serde(default)]
    tail: Option<RawTail>,
    #[serde(default)]
    horizon: Option<usize>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawBlock {
    lambda: RawCoord,
    size: usize,
}

/// A complex number literal: "3/7", ["re","im"], or {"re": ..., "im": ...}.
#[derive(Deserialize)]
#[serde(untagged)]
enum RawCoord {
    Bare(String),
    Pair([String; 2]),
    Object {
        re: String,
        #[serde(default)]
        im: Option<String>,
    },
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawTail {
    r: String,
    #[serde(rename = "N")]
    n: usize,
    #[serde(default)]
    truncation: Option<usize>,
    kind: RawTailKind,
    #[serde(default)]
    x_tail: Option<Vec<RawCoord>>,
    #[serde(default)]
    c_tail: Option<Vec<RawCoord>>,
}

#[derive(Deserialize)]
enum RawTailKind {
    #[serde(rename = "diagonal")]
    Diagonal(Vec<String>),
    #[serde(rename = "shift")]
    Shift(Vec<String>),
}

pub const DEFAULT_HORIZON: usize = 1000;
pub const DEFAULT_TRUNCATION: usize = 512;

/// A parsed and validated problem.
pub struct LoadedProblem {
    pub mode: Mode,
    pub system: JordanSystem,
    pub operator: Option<PropertyPOperator>,
    pub horizon: usize,
}

fn parse_coord(raw: &RawCoord, path: &str, mode: Mode) -> Result<Scalar, SpecError> {
    let (re_str, im_str) = match raw {
        RawCoord::Bare(s) => (s.as_str(), "0"),
        RawCoord::Pair([re, im]) => (re.as_str(), im.as_str()),
        RawCoord::Object { re, im } => (re.as_str(), im.as_deref().unwrap_or("0")),
    };
    let re = parse_rational(re_str).map_err(|e| err(format!("{path}.re"), e.to_string()))?;
    let im = parse_rational(im_str).map_err(|e| err(format!("{path}.im"), e.to_string()))?;
    let exact = Scalar::exact(re, im);
    Ok(match mode {
        Mode::Exact => exact,
        Mode::Float => exact.to_float(),
    })
}

fn parse_segments(
    raw: &[Vec<RawCoord>],
    blocks: &[JordanBlock],
    name: &str,
    mode: Mode,
) -> Result<Vec<Segment>, SpecError> {
    if raw.len() != blocks.len() {
        return Err(err(
            name,
            format!("expected {} per-block coordinate lists, got {}", blocks.len(), raw.len()),
        ));
    }
    raw.iter()
        .zip(blocks)
        .enumerate()
        .map(|(i, (seg, block))| {
            if seg.len() != block.size {
                return Err(err(
                    format!("{name}[{i}]"),
                    format!("expected {} coordinates (block size), got {}", block.size, seg.len()),
                ));
            }
            seg.iter()
                .enumerate()
                .map(|(q, coord)| parse_coord(coord, &format!("{name}[{i}][{q}]"), mode))
                .collect()
        })
        .collect()
}

fn parse_positive_rational(s: &str, path: &str) -> Result<BigRational, SpecError> {
    let r = parse_rational(s).map_err(|e| err(path, e.to_string()))?;
    if r.is_negative() || r >= BigRational::one() {
        return Err(err(path, format!("must lie in [0, 1), got {s}")));
    }
    Ok(r)
}

/// Parse and validate a problem spec from JSON text.
pub fn load_spec(input: &str) -> Result<LoadedProblem, SpecError> {
    let de = &mut serde_json::Deserializer::from_str(input);
    let raw: RawSpec = serde_path_to_error::deserialize(de)
        .map_err(|e| err(e.path().to_string(), e.inner().to_string()))?;

    let mode = match raw.scalar_mode.as_deref() {
        None | Some("exact") => Mode::Exact,
        Some("float") => Mode::Float,
        Some(other) => {
            return Err(err("scalar_mode", format!("expected \"exact\" or \"float\", got {other:?}")))
        }
    };

    if raw.blocks.is_empty() {
        return Err(err("blocks", "at least one Jordan block is required"));
    }
    let blocks: Vec<JordanBlock> = raw
        .blocks
        .iter()
        .enumerate()
        .map(|(i, b)| {
            if b.size < 1 {
                return Err(err(format!("blocks[{i}].size"), "block size must be >= 1"));
            }
            let lambda = parse_coord(&b.lambda, &format!("blocks[{i}].lambda"), mode)?;
            Ok(JordanBlock::new(lambda, b.size))
        })
        .collect::<Result<_, _>>()?;

    let x = BlockVector {
        segments: parse_segments(&raw.x, &blocks, "x", mode)?,
    };
    let c = BlockVector {
        segments: parse_segments(&raw.c, &blocks, "c", mode)?,
    };
    let system = JordanSystem::new(blocks, c, x)
        .map_err(|e| err("blocks", e.to_string()))?;

    let operator = match &raw.tail {
        None => None,
        Some(tail) => Some(load_tail(tail, &system, mode)?),
    };

    Ok(LoadedProblem {
        mode,
        system,
        operator,
        horizon: raw.horizon.unwrap_or(DEFAULT_HORIZON),
    })
}

fn load_tail(
    raw: &RawTail,
    system: &JordanSystem,
    mode: Mode,
) -> Result<PropertyPOperator, SpecError> {
    let truncation = raw.truncation.unwrap_or(DEFAULT_TRUNCATION);
    if truncation < 1 {
        return Err(err("tail.truncation", "must be >= 1"));
    }
    let r = parse_positive_rational(&raw.r, "tail.r")?;
    if raw.n < 1 {
        return Err(err("tail.N", "must be >= 1"));
    }
    let parse_weights = |list: &[String], path: &str| -> Result<Vec<Scalar>, SpecError> {
        if list.is_empty() {
            return Err(err(path, "needs at least one weight"));
        }
        list.iter()
            .enumerate()
            .map(|(i, s)| {
                let v = parse_rational(s).map_err(|e| err(format!("{path}[{i}]"), e.to_string()))?;
                let exact = Scalar::from_rational(v);
                Ok(match mode {
                    Mode::Exact => exact,
                    Mode::Float => exact.to_float(),
                })
            })
            .collect()
    };
    let kind = match &raw.kind {
        RawTailKind::Diagonal(f) => TailKind::Diagonal(parse_weights(f, "tail.kind.diagonal")?),
        RawTailKind::Shift(w) => TailKind::Shift(parse_weights(w, "tail.kind.shift")?),
    };
    let parse_tail_vector = |raw: &Option<Vec<RawCoord>>, name: &str| -> Result<Vec<Scalar>, SpecError> {
        let mut out = vec![Scalar::zero(); truncation];
        if let Some(coords) = raw {
            if coords.len() > truncation {
                return Err(err(
                    name,
                    format!("has {} coordinates but the truncation is {truncation}", coords.len()),
                ));
            }
            for (q, coord) in coords.iter().enumerate() {
                out[q] = parse_coord(coord, &format!("{name}[{q}]"), mode)?;
            }
        }
        if mode == Mode::Float {
            for v in &mut out {
                *v = v.to_float();
            }
        }
        Ok(out)
    };
    let tail = PropertyPTail {
        r,
        n_start: raw.n,
        op: TailOperator { kind, truncation },
        c: parse_tail_vector(&raw.c_tail, "tail.c_tail")?,
        x: parse_tail_vector(&raw.x_tail, "tail.x_tail")?,
    };
    PropertyPOperator::new(system.clone(), tail).map_err(|e| err("tail", e.to_string()))
}
