//! Problem and solution documents. Complex numbers are `[re, im]` pairs.

use bidisk_pick::extremal3::MONOMIALS;
use bidisk_pick::hyperbolic::normalize_problem;
use bidisk_pick::{
    BidiskPoint, CVec3, HermMat3, PickData3, RationalInner2, SolveReport, SolverConfig, C64,
};
use serde::{Deserialize, Serialize};
use serde_json::{Map, Value};

use crate::CliError;

pub type Pair = [f64; 2];

pub fn pair(z: C64) -> Pair {
    [z.re, z.im]
}

pub fn complex(p: Pair) -> C64 {
    C64::new(p[0], p[1])
}

fn bad(field: impl Into<String>, msg: impl std::fmt::Display) -> CliError {
    CliError::Input(format!("{}: {msg}", field.into()))
}

fn numbers(v: &Value, field: &str, len: usize) -> Result<Vec<f64>, CliError> {
    let arr = v
        .as_array()
        .ok_or_else(|| bad(field, format!("expected an array of {len} numbers")))?;
    if arr.len() != len {
        return Err(bad(
            field,
            format!("expected {len} numbers, found {}", arr.len()),
        ));
    }
    arr.iter()
        .enumerate()
        .map(|(k, x)| {
            x.as_f64()
                .filter(|x| x.is_finite())
                .ok_or_else(|| bad(format!("{field}[{k}]"), "expected a finite number"))
        })
        .collect()
}

fn triple<'a>(obj: &'a Map<String, Value>, field: &str) -> Result<&'a Vec<Value>, CliError> {
    let v = obj.get(field).ok_or_else(|| bad(field, "missing"))?;
    let arr = v
        .as_array()
        .ok_or_else(|| bad(field, "expected an array of 3 entries"))?;
    if arr.len() != 3 {
        return Err(bad(
            field,
            format!("expected 3 entries, found {}", arr.len()),
        ));
    }
    Ok(arr)
}

/// A parsed problem document.
#[derive(Clone, Debug)]
pub struct ProblemFile {
    pub data: PickData3,
    /// Overrides from the document's `config` object, if any.
    pub config: Option<Value>,
}

impl ProblemFile {
    pub fn parse(text: &str) -> Result<Self, CliError> {
        let root: Value = serde_json::from_str(text)
            .map_err(|e| CliError::Input(format!("not valid JSON: {e}")))?;
        let obj = root.as_object().ok_or_else(|| {
            CliError::Input("expected a JSON object with fields points and targets".into())
        })?;
        for key in obj.keys() {
            if !matches!(key.as_str(), "points" | "targets" | "config" | "expected") {
                return Err(bad(key.as_str(), "unknown field"));
            }
        }
        let mut nodes = Vec::with_capacity(3);
        for (i, p) in triple(obj, "points")?.iter().enumerate() {
            let field = format!("points[{i}]");
            let x = numbers(p, &field, 4)?;
            let node = BidiskPoint::new(C64::new(x[0], x[1]), C64::new(x[2], x[3]))
                .map_err(|e| bad(&field, e))?;
            nodes.push(node);
        }
        let mut targets = Vec::with_capacity(3);
        for (i, w) in triple(obj, "targets")?.iter().enumerate() {
            let x = numbers(w, &format!("targets[{i}]"), 2)?;
            targets.push(C64::new(x[0], x[1]));
        }
        let data = PickData3::new(
            [nodes[0], nodes[1], nodes[2]],
            [targets[0], targets[1], targets[2]],
        )
        .map_err(|e| bad("targets", e))?;
        let config = match obj.get("config") {
            None | Some(Value::Null) => None,
            Some(v @ Value::Object(_)) => {
                serde_json::from_value::<SolverConfig>(v.clone()).map_err(|e| bad("config", e))?;
                Some(v.clone())
            }
            Some(_) => return Err(bad("config", "expected an object")),
        };
        Ok(Self { data, config })
    }

    pub fn to_value(data: &PickData3) -> Value {
        let points: Vec<[f64; 4]> = data
            .nodes()
            .iter()
            .map(|p| [p.z1.re, p.z1.im, p.z2.re, p.z2.im])
            .collect();
        let targets: Vec<Pair> = data.targets().iter().map(|&w| pair(w)).collect();
        serde_json::json!({ "points": points, "targets": targets })
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PhiFile {
    pub num: [Pair; 4],
    pub den: [Pair; 4],
    pub monomials: [String; 4],
}

impl PhiFile {
    pub fn from_phi(phi: &RationalInner2) -> Self {
        Self {
            num: phi.num.map(pair),
            den: phi.den.map(pair),
            monomials: MONOMIALS.map(String::from),
        }
    }

    pub fn to_phi(&self) -> Result<RationalInner2, CliError> {
        if self.monomials != MONOMIALS.map(String::from) {
            return Err(bad("phi.monomials", format!("expected {MONOMIALS:?}")));
        }
        RationalInner2::new(self.num.map(complex), self.den.map(complex))
            .map_err(|e| bad("phi.den", e))
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ClassificationFile {
    pub kind: String,
    /// 1-based node pair for a two-point extremal classification.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub nodes: Option<[usize; 2]>,
    pub details: String,
}

impl ClassificationFile {
    pub fn new(c: &bidisk_pick::Classification) -> Self {
        use bidisk_pick::ClassKind;
        let (kind, nodes) = match c.kind {
            ClassKind::Degenerate1 => ("Degenerate1", None),
            ClassKind::Degenerate2 => ("Degenerate2", None),
            ClassKind::TwoPointExtremal(i, j) => ("TwoPointExtremal", Some([i + 1, j + 1])),
            ClassKind::NonDegenerateCandidate => ("NonDegenerateCandidate", None),
        };
        Self {
            kind: kind.into(),
            nodes,
            details: c.details.clone(),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Residuals {
    pub decomposition: f64,
    pub interpolation: f64,
    pub torus_deviation: f64,
    pub rank_one_ratio: f64,
    pub reduced_system: f64,
    pub kernel_sigma_min: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SolutionFile {
    pub t_star: f64,
    /// Targets of the extremal problem that `phi` solves.
    pub scaled_targets: [Pair; 3],
    pub a: [Pair; 3],
    pub b: [Pair; 3],
    pub gamma: [[Pair; 3]; 3],
    pub delta: [[Pair; 3]; 3],
    pub phi: PhiFile,
    pub residuals: Residuals,
    pub classification: ClassificationFile,
}

fn matrix(m: &HermMat3) -> [[Pair; 3]; 3] {
    std::array::from_fn(|i| std::array::from_fn(|j| pair(m.get(i, j))))
}

fn vector(v: &CVec3) -> [Pair; 3] {
    std::array::from_fn(|i| pair(v[i]))
}

impl SolutionFile {
    pub fn from_report(r: &SolveReport) -> Self {
        let d = &r.diagnostics;
        Self {
            t_star: r.t_star,
            scaled_targets: r.scaled_data.targets().map(pair),
            a: vector(&r.pair.a),
            b: vector(&r.pair.b),
            gamma: matrix(&r.pair.gamma),
            delta: matrix(&r.pair.delta),
            phi: PhiFile::from_phi(&r.phi),
            residuals: Residuals {
                decomposition: d.decomposition_residual,
                interpolation: d.interpolation_residual,
                torus_deviation: d.torus_deviation,
                rank_one_ratio: r.pair.rank_one_ratio(),
                reduced_system: d.reduced_residual.iter().fold(0.0, |m, v| m.max(v.abs())),
                kernel_sigma_min: d.kernel.sigma_min,
            },
            classification: ClassificationFile::new(&r.classification),
        }
    }

    pub fn parse(text: &str) -> Result<Self, CliError> {
        serde_json::from_str(text).map_err(|e| CliError::Input(format!("solution file: {e}")))
    }

    pub fn gamma(&self) -> Result<HermMat3, CliError> {
        hermitian(&self.gamma, "gamma")
    }

    pub fn delta(&self) -> Result<HermMat3, CliError> {
        hermitian(&self.delta, "delta")
    }

    pub fn a(&self) -> CVec3 {
        CVec3::new(complex(self.a[0]), complex(self.a[1]), complex(self.a[2]))
    }

    pub fn b(&self) -> CVec3 {
        CVec3::new(complex(self.b[0]), complex(self.b[1]), complex(self.b[2]))
    }
}

fn hermitian(m: &[[Pair; 3]; 3], field: &str) -> Result<HermMat3, CliError> {
    let c = bidisk_pick::CMat3::from_fn(|i, j| complex(m[i][j]));
    let scale = c.frobenius_norm().max(1.0);
    HermMat3::new(c, 1e-12 * scale).map_err(|e| bad(field, e))
}

/// The targets of the extremal problem at scale t: w₁ is kept and the
/// others are moved along the ray from w₁ in the disk geometry, ŵ = m⁻¹(t·m(w))
/// with m the automorphism taking w₁ to 0.
pub fn scaled_targets(data: &PickData3, t: f64) -> [C64; 3] {
    let (direction, frame) = normalize_problem(data);
    let mut out = direction.targets().map(|w| frame.restore_target(w * t));
    out[0] = data.targets()[0];
    out
}
