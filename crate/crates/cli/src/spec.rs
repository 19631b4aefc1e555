//! Input schema. Indices in the file are 1-based.

use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::CliError;

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SpaceSpecFile {
    #[serde(default)]
    pub group: Option<GroupSpec>,
    #[serde(default)]
    pub isotropy: Vec<PieceSpec>,
    #[serde(default)]
    pub metric: MetricSpec,
    #[serde(default)]
    pub task: Option<TaskName>,
    #[serde(default)]
    pub params: TaskParams,
    #[serde(default)]
    pub tolerances: ToleranceSpec,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GroupSpec {
    pub family: String,
    #[serde(default)]
    pub n: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum BlockFamilySpec {
    Su,
    Sp,
    So,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", deny_unknown_fields)]
pub enum PieceSpec {
    Block {
        family: BlockFamilySpec,
        indices: Vec<usize>,
    },
    Circle {
        weights: Vec<i64>,
    },
    Sp1Block {
        index: usize,
    },
    RootSu2 {
        root: Vec<i64>,
    },
    Explicit {
        matrices: Vec<Vec<Vec<f64>>>,
    },
}

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
#[serde(rename_all = "snake_case", deny_unknown_fields)]
pub enum TermsSpec {
    Random { count: usize },
    Summands,
}

fn default_seed() -> u64 {
    1
}
fn default_spread() -> f64 {
    0.25
}
fn default_epsilon() -> f64 {
    0.1
}
fn default_terms() -> TermsSpec {
    TermsSpec::Random { count: 3 }
}
fn default_phi() -> Vec<f64> {
    vec![1.0, 0.0, 0.2]
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum MetricSpec {
    Riemannian {
        #[serde(default = "default_spread")]
        spread: f64,
        #[serde(default = "default_seed")]
        seed: u64,
        #[serde(default)]
        q: Option<Vec<Vec<f64>>>,
    },
    AlphaBeta {
        /// Coefficients of the even profile, constant term first.
        #[serde(default = "default_phi")]
        phi: Vec<f64>,
        #[serde(default)]
        v0: Option<VectorSpec>,
        #[serde(default = "default_spread")]
        spread: f64,
        #[serde(default = "default_seed")]
        seed: u64,
    },
    QuarticPerturbed {
        #[serde(default = "default_epsilon")]
        epsilon: f64,
        #[serde(default = "default_terms")]
        terms: TermsSpec,
        #[serde(default = "default_spread")]
        spread: f64,
        #[serde(default = "default_seed")]
        seed: u64,
    },
}

impl Default for MetricSpec {
    fn default() -> Self {
        MetricSpec::QuarticPerturbed {
            epsilon: default_epsilon(),
            terms: default_terms(),
            spread: default_spread(),
            seed: default_seed(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum TaskName {
    CheckSpace,
    Curvature,
    FindFlat,
    VerifyExample,
    Speeds,
}

impl TaskName {
    pub fn as_str(self) -> &'static str {
        match self {
            TaskName::CheckSpace => "check-space",
            TaskName::Curvature => "curvature",
            TaskName::FindFlat => "find-flat",
            TaskName::VerifyExample => "verify-example",
            TaskName::Speeds => "speeds",
        }
    }
}

/// A vector of m, either `a x_α + b y_α` on a root plane of g lying in m
/// or raw m-coordinates.
#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
#[serde(rename_all = "snake_case", deny_unknown_fields)]
pub enum VectorSpec {
    RootPlane { root: Vec<i64>, coords: [f64; 2] },
    Raw(Vec<f64>),
}

/// `exp(angle Σ w_k T_k)` on the standard torus.
#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
#[serde(deny_unknown_fields)]
pub struct TorusElementSpec {
    pub weights: Vec<f64>,
    pub angle: f64,
}

#[derive(Debug, Clone, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TaskParams {
    #[serde(default)]
    pub weights: Option<Vec<i64>>,
    #[serde(default)]
    pub u: Option<VectorSpec>,
    #[serde(default)]
    pub v: Option<VectorSpec>,
    #[serde(default)]
    pub example_id: Option<u8>,
    #[serde(default)]
    pub p: Option<i64>,
    #[serde(default)]
    pub q: Option<i64>,
    #[serde(default)]
    pub budget: Option<usize>,
    #[serde(default)]
    pub seed: Option<u64>,
    #[serde(default)]
    pub involution: Option<TorusElementSpec>,
    #[serde(default)]
    pub samples: Option<usize>,
    #[serde(default)]
    pub order: Option<RootOrderSpec>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum RootOrderSpec {
    Canonical,
    Conventional,
}

#[derive(Debug, Clone, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ToleranceSpec {
    #[serde(default)]
    pub algebra: Option<f64>,
    #[serde(default)]
    pub cluster: Option<f64>,
    #[serde(default)]
    pub precondition: Option<f64>,
    #[serde(default)]
    pub zero_flag: Option<f64>,
    #[serde(default)]
    pub degenerate: Option<f64>,
    #[serde(default)]
    pub closure: Option<f64>,
    #[serde(default)]
    pub kernel: Option<f64>,
}

impl ToleranceSpec {
    pub fn resolve(&self) -> Result<flagcurv::Tolerances, CliError> {
        let mut t = flagcurv::Tolerances::default();
        let fields: [(&str, Option<f64>, &mut f64); 7] = [
            ("algebra", self.algebra, &mut t.algebra),
            ("cluster", self.cluster, &mut t.cluster),
            ("precondition", self.precondition, &mut t.precondition),
            ("zero_flag", self.zero_flag, &mut t.zero_flag),
            ("degenerate", self.degenerate, &mut t.degenerate),
            ("closure", self.closure, &mut t.closure),
            ("kernel", self.kernel, &mut t.kernel),
        ];
        for (name, value, slot) in fields {
            if let Some(v) = value {
                if !(v.is_finite() && v > 0.0) {
                    return Err(CliError::input(
                        format!("/tolerances/{name}"),
                        format!("must be a positive number (got {v})"),
                    ));
                }
                *slot = v;
            }
        }
        Ok(t)
    }
}

/// Serde path (`a.b[0].c`) to a JSON pointer (`/a/b/0/c`).
fn pointer(path: &serde_path_to_error::Path) -> String {
    use serde_path_to_error::Segment;
    let mut out = String::new();
    for seg in path.iter() {
        out.push('/');
        match seg {
            Segment::Seq { index } => out.push_str(&index.to_string()),
            Segment::Map { key } => out.push_str(&key.replace('~', "~0").replace('/', "~1")),
            Segment::Enum { variant } => out.push_str(variant),
            Segment::Unknown => out.push('?'),
        }
    }
    out
}

pub fn parse_str(text: &str) -> Result<SpaceSpecFile, CliError> {
    let de = &mut serde_json::Deserializer::from_str(text);
    serde_path_to_error::deserialize(de).map_err(|e| {
        let ptr = pointer(e.path());
        CliError::input(ptr, e.into_inner().to_string())
    })
}

pub fn parse_space_spec(path: &Path) -> Result<SpaceSpecFile, CliError> {
    let text = std::fs::read_to_string(path).map_err(|e| CliError::Io {
        path: path.display().to_string(),
        message: e.to_string(),
    })?;
    parse_str(&text)
}
