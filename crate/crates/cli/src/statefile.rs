//! Versioned JSON state files.
//!
//! ```json
//! {"schema_version": "1", "n": 4, "kind": "pure", "parity": "odd",
//!  "data": [[1, 0.7071067811865476, 0.0], [14, 0.7071067811865476, 0.0]]}
//! ```
//!
//! Pure data is a list of `[bitmask, re, im]` (bit `k` set means mode `k` is
//! occupied, amplitude of `c†_{j1} ... c†_{jm} |0>` with ascending `j`).
//! Mixed data is the dense `2^n x 2^n` matrix in row-major order as
//! `[re, im]` pairs.

use std::fmt;
use std::path::Path;

use fermi_ent::{CMatrix, FockState, MixedState, Parity, C64};
use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::failure::Failure;

pub const SCHEMA_VERSION: &str = "1";
const MAX_MODES: usize = 12;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Kind {
    Pure,
    Mixed,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ParityTag {
    Even,
    Odd,
    Mixed,
}

impl From<Parity> for ParityTag {
    fn from(p: Parity) -> Self {
        match p {
            Parity::Even => ParityTag::Even,
            Parity::Odd => ParityTag::Odd,
            Parity::Mixed => ParityTag::Mixed,
        }
    }
}

impl fmt::Display for ParityTag {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            ParityTag::Even => "even",
            ParityTag::Odd => "odd",
            ParityTag::Mixed => "mixed",
        })
    }
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct StateFile {
    pub schema_version: String,
    pub n: usize,
    pub kind: Kind,
    pub parity: ParityTag,
    pub data: Value,
}

#[derive(Clone, Debug)]
pub enum Loaded {
    Pure(FockState),
    Mixed(MixedState),
}

impl Loaded {
    pub fn n(&self) -> usize {
        match self {
            Loaded::Pure(s) => s.n(),
            Loaded::Mixed(r) => r.n(),
        }
    }

    pub fn parity(&self) -> Parity {
        match self {
            Loaded::Pure(s) => s.parity(),
            Loaded::Mixed(r) => r.sector(),
        }
    }
}

impl StateFile {
    pub fn from_pure(state: &FockState) -> Self {
        let data = state
            .amplitudes()
            .iter()
            .enumerate()
            .filter(|(_, z)| z.norm_sqr() > 0.0)
            .map(|(mask, z)| serde_json::json!([mask, z.re, z.im]))
            .collect();
        StateFile {
            schema_version: SCHEMA_VERSION.into(),
            n: state.n(),
            kind: Kind::Pure,
            parity: state.parity().into(),
            data: Value::Array(data),
        }
    }

    #[cfg(test)]
    pub fn from_mixed(rho: &MixedState) -> Self {
        let m = rho.matrix();
        let data = (0..m.nrows())
            .flat_map(|i| (0..m.ncols()).map(move |j| (i, j)))
            .map(|(i, j)| serde_json::json!([m[(i, j)].re, m[(i, j)].im]))
            .collect();
        StateFile {
            schema_version: SCHEMA_VERSION.into(),
            n: rho.n(),
            kind: Kind::Mixed,
            parity: rho.sector().into(),
            data: Value::Array(data),
        }
    }

    pub fn parse(text: &str) -> Result<Self, Failure> {
        let file: StateFile =
            serde_json::from_str(text).map_err(|e| Failure::schema(format!("malformed state file: {e}")))?;
        if file.schema_version != SCHEMA_VERSION {
            return Err(Failure::schema(format!(
                "unsupported schema_version {:?} (expected {SCHEMA_VERSION:?})",
                file.schema_version
            )));
        }
        if file.n == 0 || file.n > MAX_MODES {
            return Err(Failure::schema(format!("n = {} outside 1..={MAX_MODES}", file.n)));
        }
        Ok(file)
    }

    pub fn read(path: &Path) -> Result<Self, Failure> {
        let text =
            std::fs::read_to_string(path).map_err(|e| Failure::io(format!("cannot read {}: {e}", path.display())))?;
        Self::parse(&text)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("state files always serialize")
    }

    /// Build the state, enforcing the module invariants and the declared parity.
    pub fn load(&self) -> Result<Loaded, Failure> {
        let dim = 1usize << self.n;
        let loaded = match self.kind {
            Kind::Pure => {
                let entries: Vec<(u64, f64, f64)> = serde_json::from_value(self.data.clone())
                    .map_err(|e| Failure::schema(format!("pure data must be [bitmask, re, im] triples: {e}")))?;
                let mut amps = vec![C64::new(0.0, 0.0); dim];
                for (mask, re, im) in entries {
                    let mask = mask as usize;
                    if mask >= dim {
                        return Err(Failure::schema(format!("bitmask {mask} out of range for n = {}", self.n)));
                    }
                    amps[mask] += C64::new(re, im);
                }
                let state = FockState::from_amplitudes(self.n, amps)?;
                state.ensure_normalized()?;
                Loaded::Pure(state)
            }
            Kind::Mixed => {
                let entries: Vec<(f64, f64)> = serde_json::from_value(self.data.clone())
                    .map_err(|e| Failure::schema(format!("mixed data must be [re, im] pairs: {e}")))?;
                if entries.len() != dim * dim {
                    return Err(Failure::schema(format!(
                        "mixed data has {} entries, expected {} for n = {}",
                        entries.len(),
                        dim * dim,
                        self.n
                    )));
                }
                let values: Vec<C64> = entries.into_iter().map(|(re, im)| C64::new(re, im)).collect();
                Loaded::Mixed(MixedState::new(self.n, CMatrix::from_row_slice(dim, dim, &values))?)
            }
        };
        let actual = ParityTag::from(loaded.parity());
        if actual != self.parity {
            return Err(Failure::invariant(format!(
                "declared parity {} but the state has parity {actual}",
                self.parity
            )));
        }
        Ok(loaded)
    }
}
