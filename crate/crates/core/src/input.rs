//! JSON input format.
//!
//! ```json
//! {"algebras": [
//!   {"kind": "matrix_blocks", "label": "A",
//!    "blocks": [{"size": 2, "weights": ["2/3", "1/3"]}]},
//!   {"kind": "diffuse_abelian", "label": "L"}
//! ]}
//! ```

use serde::Deserialize;
use thiserror::Error;

use crate::algebra::{AlgebraError, MatrixBlock, StateAlgebra};
use crate::rational::{parse_rational, ParseRationalError};

#[derive(Debug, Error)]
pub enum InputError {
    #[error("malformed input: {0}")]
    Json(#[from] serde_json::Error),
    #[error("algebra {algebra}, block {block}: {source}")]
    Weight {
        algebra: usize,
        block: usize,
        source: ParseRationalError,
    },
    #[error("invalid algebra {label}: {source}")]
    Invalid { label: String, source: AlgebraError },
    #[error("expected {expected} algebras, found {found}")]
    Count { expected: String, found: usize },
}

impl InputError {
    /// Parse failures as opposed to well-formed but invalid content.
    pub fn is_parse_error(&self) -> bool {
        matches!(self, InputError::Json(_) | InputError::Weight { .. })
    }
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct InputFile {
    algebras: Vec<AlgebraSpec>,
}

#[derive(Debug, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
enum AlgebraSpec {
    MatrixBlocks {
        #[serde(default)]
        label: Option<String>,
        blocks: Vec<BlockSpec>,
    },
    DiffuseAbelian {
        #[serde(default)]
        label: Option<String>,
    },
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct BlockSpec {
    size: usize,
    weights: Vec<String>,
}

/// Parses and validates every algebra in the document.
pub fn parse_algebras(text: &str) -> Result<Vec<StateAlgebra>, InputError> {
    let file: InputFile = serde_json::from_str(text)?;
    let mut out = Vec::with_capacity(file.algebras.len());
    for (i, spec) in file.algebras.into_iter().enumerate() {
        let algebra = match spec {
            AlgebraSpec::DiffuseAbelian { label } => {
                StateAlgebra::diffuse_abelian(label.unwrap_or_else(|| format!("A{}", i + 1)))
            }
            AlgebraSpec::MatrixBlocks { label, blocks } => {
                let mut parsed = Vec::with_capacity(blocks.len());
                for (k, b) in blocks.into_iter().enumerate() {
                    let weights = b
                        .weights
                        .iter()
                        .map(|w| parse_rational(w))
                        .collect::<Result<Vec<_>, _>>()
                        .map_err(|source| InputError::Weight {
                            algebra: i,
                            block: k,
                            source,
                        })?;
                    parsed.push(MatrixBlock {
                        size: b.size,
                        weights,
                    });
                }
                StateAlgebra::matrix_blocks(label.unwrap_or_else(|| format!("A{}", i + 1)), parsed)
            }
        };
        algebra.validate().map_err(|source| InputError::Invalid {
            label: algebra.label.clone(),
            source,
        })?;
        out.push(algebra);
    }
    Ok(out)
}

/// Like [`parse_algebras`] but requires exactly two algebras.
pub fn parse_pair(text: &str) -> Result<(StateAlgebra, StateAlgebra), InputError> {
    let mut v = parse_algebras(text)?;
    if v.len() != 2 {
        return Err(InputError::Count {
            expected: "exactly 2".into(),
            found: v.len(),
        });
    }
    let b = v.pop().expect("two entries");
    let a = v.pop().expect("two entries");
    Ok((a, b))
}
