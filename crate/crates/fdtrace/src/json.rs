//! JSON encodings for every value the command line reads or writes.
//!
//! Complex numbers are `[re, im]` pairs of IEEE doubles throughout; matrices
//! are row-major lists of rows. Round-tripping JSON → memory → JSON is exact
//! for double-representable values.

use std::collections::HashMap;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::dualspace::DualFunctional;
use crate::error::{Error, Result};
use crate::functionals::{Functional, TracialFunctional};
use crate::groupoid::{FiniteGroupoid, TwoCocycle};
use crate::ktrace::K0Class;
use crate::matalg::{BlockAlgebra, CMatrix, Element};

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct AlgebraJson {
    pub blocks: Vec<usize>,
}

pub type ComplexJson = [f64; 2];
pub type MatrixJson = Vec<Vec<ComplexJson>>;

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ElementJson {
    pub algebra: AlgebraJson,
    pub blocks: Vec<MatrixJson>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct TracialJson {
    pub algebra: AlgebraJson,
    pub weights: Vec<f64>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct FunctionalJson {
    pub algebra: AlgebraJson,
    pub duals: Vec<MatrixJson>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct K0ClassJson {
    pub algebra: AlgebraJson,
    pub ranks: Vec<i64>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct DualJson {
    pub algebra: AlgebraJson,
    pub coords: Vec<f64>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct PolytopeJson {
    pub hyperplane: Vec<f64>,
    pub vertices: Vec<Vec<f64>>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ArrowJson {
    pub id: serde_json::Value,
    pub src: serde_json::Value,
    pub rng: serde_json::Value,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct CocycleEntryJson {
    pub pair: [serde_json::Value; 2],
    pub value: ComplexJson,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct GroupoidJson {
    pub units: Vec<serde_json::Value>,
    pub arrows: Vec<ArrowJson>,
    /// Triples `[a, b, ab]`, exhaustive over composable pairs.
    pub compose: Vec<[serde_json::Value; 3]>,
    pub inv: Vec<[serde_json::Value; 2]>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub cocycle: Option<Vec<CocycleEntryJson>>,
}

fn id_string(v: &serde_json::Value) -> Result<String> {
    match v {
        serde_json::Value::String(s) => Ok(s.clone()),
        serde_json::Value::Number(n) => Ok(n.to_string()),
        other => Err(Error::Json(format!(
            "ids must be strings or numbers, got {other}"
        ))),
    }
}

impl AlgebraJson {
    pub fn to_algebra(&self) -> Result<BlockAlgebra> {
        BlockAlgebra::new(self.blocks.clone())
    }

    pub fn from_algebra(a: &BlockAlgebra) -> Self {
        AlgebraJson {
            blocks: a.block_dims().to_vec(),
        }
    }
}

fn matrix_to_json(m: &CMatrix) -> MatrixJson {
    (0..m.nrows())
        .map(|i| (0..m.ncols()).map(|j| [m[(i, j)].re, m[(i, j)].im]).collect())
        .collect()
}

fn matrix_from_json(rows: &MatrixJson, n: usize, what: &str) -> Result<CMatrix> {
    if rows.len() != n || rows.iter().any(|r| r.len() != n) {
        return Err(Error::Json(format!("{what}: expected a {n}x{n} matrix")));
    }
    Ok(CMatrix::from_fn(n, n, |i, j| {
        Complex64::new(rows[i][j][0], rows[i][j][1])
    }))
}

impl ElementJson {
    pub fn to_element(&self) -> Result<Element> {
        let algebra = self.algebra.to_algebra()?;
        if self.blocks.len() != algebra.num_blocks() {
            return Err(Error::Json("element block count mismatch".into()));
        }
        let blocks = self
            .blocks
            .iter()
            .zip(algebra.block_dims())
            .enumerate()
            .map(|(i, (rows, &n))| matrix_from_json(rows, n, &format!("block {i}")))
            .collect::<Result<Vec<_>>>()?;
        Element::new(algebra, blocks)
    }

    pub fn from_element(e: &Element) -> Self {
        ElementJson {
            algebra: AlgebraJson::from_algebra(e.parent()),
            blocks: e.blocks().iter().map(matrix_to_json).collect(),
        }
    }
}

impl TracialJson {
    pub fn to_tracial(&self) -> Result<TracialFunctional> {
        TracialFunctional::new(self.algebra.to_algebra()?, self.weights.clone())
    }

    pub fn from_tracial(t: &TracialFunctional) -> Self {
        TracialJson {
            algebra: AlgebraJson::from_algebra(t.parent()),
            weights: t.weights().to_vec(),
        }
    }
}

impl FunctionalJson {
    pub fn to_functional(&self) -> Result<Functional> {
        let algebra = self.algebra.to_algebra()?;
        if self.duals.len() != algebra.num_blocks() {
            return Err(Error::Json("functional dual count mismatch".into()));
        }
        let duals = self
            .duals
            .iter()
            .zip(algebra.block_dims())
            .enumerate()
            .map(|(i, (rows, &n))| matrix_from_json(rows, n, &format!("dual {i}")))
            .collect::<Result<Vec<_>>>()?;
        Functional::new(algebra, duals)
    }

    pub fn from_functional(f: &Functional) -> Self {
        FunctionalJson {
            algebra: AlgebraJson::from_algebra(f.parent()),
            duals: f.duals().iter().map(matrix_to_json).collect(),
        }
    }
}

impl K0ClassJson {
    pub fn to_class(&self) -> Result<K0Class> {
        K0Class::new(self.algebra.to_algebra()?, self.ranks.clone())
    }

    pub fn from_class(c: &K0Class) -> Self {
        K0ClassJson {
            algebra: AlgebraJson::from_algebra(c.parent()),
            ranks: c.ranks().to_vec(),
        }
    }
}

impl DualJson {
    pub fn to_dual(&self) -> Result<DualFunctional> {
        DualFunctional::new(self.algebra.to_algebra()?, self.coords.clone())
    }

    pub fn from_dual(d: &DualFunctional) -> Self {
        DualJson {
            algebra: AlgebraJson::from_algebra(d.parent()),
            coords: d.coords().to_vec(),
        }
    }
}

impl GroupoidJson {
    pub fn to_groupoid(&self) -> Result<(FiniteGroupoid, TwoCocycle)> {
        let unit_ids = self
            .units
            .iter()
            .map(id_string)
            .collect::<Result<Vec<_>>>()?;
        let arrow_ids = self
            .arrows
            .iter()
            .map(|a| id_string(&a.id))
            .collect::<Result<Vec<_>>>()?;
        let unit_index: HashMap<&str, usize> = unit_ids
            .iter()
            .enumerate()
            .map(|(i, s)| (s.as_str(), i))
            .collect();
        let arrow_index: HashMap<&str, usize> = arrow_ids
            .iter()
            .enumerate()
            .map(|(i, s)| (s.as_str(), i))
            .collect();
        let lookup_unit = |v: &serde_json::Value| -> Result<usize> {
            let s = id_string(v)?;
            unit_index
                .get(s.as_str())
                .copied()
                .ok_or_else(|| Error::Json(format!("unknown unit id {s}")))
        };
        let lookup_arrow = |v: &serde_json::Value| -> Result<usize> {
            let s = id_string(v)?;
            arrow_index
                .get(s.as_str())
                .copied()
                .ok_or_else(|| Error::Json(format!("unknown arrow id {s}")))
        };
        let src = self
            .arrows
            .iter()
            .map(|a| lookup_unit(&a.src))
            .collect::<Result<Vec<_>>>()?;
        let rng = self
            .arrows
            .iter()
            .map(|a| lookup_unit(&a.rng))
            .collect::<Result<Vec<_>>>()?;
        let mut compose = HashMap::new();
        for [a, b, ab] in &self.compose {
            compose.insert((lookup_arrow(a)?, lookup_arrow(b)?), lookup_arrow(ab)?);
        }
        let mut inv = vec![usize::MAX; arrow_ids.len()];
        for [a, ai] in &self.inv {
            inv[lookup_arrow(a)?] = lookup_arrow(ai)?;
        }
        if let Some(missing) = inv.iter().position(|&v| v == usize::MAX) {
            return Err(Error::Json(format!(
                "missing inverse entry for arrow {}",
                arrow_ids[missing]
            )));
        }
        let cocycle = match &self.cocycle {
            None => TwoCocycle::trivial(),
            Some(entries) => {
                let mut values = HashMap::new();
                for e in entries {
                    values.insert(
                        (lookup_arrow(&e.pair[0])?, lookup_arrow(&e.pair[1])?),
                        Complex64::new(e.value[0], e.value[1]),
                    );
                }
                TwoCocycle::from_values(values)
            }
        };
        let groupoid = FiniteGroupoid::from_raw(unit_ids, arrow_ids, src, rng, compose, inv)?;
        Ok((groupoid, cocycle))
    }

    pub fn from_groupoid(g: &FiniteGroupoid, sigma: &TwoCocycle) -> Self {
        let s = |v: &str| serde_json::Value::String(v.to_string());
        let mut compose: Vec<[serde_json::Value; 3]> = Vec::new();
        for a in 0..g.num_arrows() {
            for b in 0..g.num_arrows() {
                if let Some(ab) = g.compose(a, b) {
                    compose.push([
                        s(&g.arrow_ids()[a]),
                        s(&g.arrow_ids()[b]),
                        s(&g.arrow_ids()[ab]),
                    ]);
                }
            }
        }
        let mut cocycle_entries: Vec<CocycleEntryJson> = sigma
            .values()
            .iter()
            .map(|(&(a, b), v)| CocycleEntryJson {
                pair: [s(&g.arrow_ids()[a]), s(&g.arrow_ids()[b])],
                value: [v.re, v.im],
            })
            .collect();
        cocycle_entries.sort_by(|x, y| format!("{:?}", x.pair).cmp(&format!("{:?}", y.pair)));
        GroupoidJson {
            units: g.unit_ids().iter().map(|u| s(u)).collect(),
            arrows: (0..g.num_arrows())
                .map(|a| ArrowJson {
                    id: s(&g.arrow_ids()[a]),
                    src: s(&g.unit_ids()[g.src(a)]),
                    rng: s(&g.unit_ids()[g.rng(a)]),
                })
                .collect(),
            compose,
            inv: (0..g.num_arrows())
                .map(|a| [s(&g.arrow_ids()[a]), s(&g.arrow_ids()[g.inv(a)])])
                .collect(),
            cocycle: if cocycle_entries.is_empty() {
                None
            } else {
                Some(cocycle_entries)
            },
        }
    }
}
