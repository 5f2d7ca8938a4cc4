use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Names a symmetric cone (equivalently, its Euclidean Jordan algebra).
///
/// `Spin(n)` is the Jordan spin algebra on `R^n` whose cone of squares is the
/// Lorentz cone `{(s, v) : |v| <= s}` with `v` of length `n - 1`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ConeDescriptor {
    Orthant(usize),
    Spin(usize),
    Sym(usize),
    Product(Vec<ConeDescriptor>),
}

impl ConeDescriptor {
    pub fn orthant(n: usize) -> Self {
        ConeDescriptor::Orthant(n)
    }

    pub fn spin(n: usize) -> Self {
        ConeDescriptor::Spin(n)
    }

    pub fn sym(n: usize) -> Self {
        ConeDescriptor::Sym(n)
    }

    pub fn product(components: Vec<ConeDescriptor>) -> Self {
        ConeDescriptor::Product(components)
    }

    /// Checks the size constraints of every component.
    pub fn validate(&self) -> Result<()> {
        match self {
            ConeDescriptor::Orthant(n) | ConeDescriptor::Sym(n) if *n == 0 => Err(
                Error::InvalidDescriptor(format!("{self} must have positive size")),
            ),
            ConeDescriptor::Spin(n) if *n < 2 => Err(Error::InvalidDescriptor(format!(
                "{self}: spin algebras need dimension >= 2"
            ))),
            ConeDescriptor::Product(parts) if parts.is_empty() => Err(Error::InvalidDescriptor(
                "product of zero cones".to_string(),
            )),
            ConeDescriptor::Product(parts) => parts.iter().try_for_each(|p| p.validate()),
            _ => Ok(()),
        }
    }

    /// Rank of the algebra: the number of elements in any Jordan frame.
    pub fn rank(&self) -> usize {
        match self {
            ConeDescriptor::Orthant(n) | ConeDescriptor::Sym(n) => *n,
            ConeDescriptor::Spin(_) => 2,
            ConeDescriptor::Product(parts) => parts.iter().map(|p| p.rank()).sum(),
        }
    }

    /// Number of independent real coordinates.
    pub fn ambient_dim(&self) -> usize {
        match self {
            ConeDescriptor::Orthant(n) | ConeDescriptor::Spin(n) => *n,
            ConeDescriptor::Sym(n) => n * (n + 1) / 2,
            ConeDescriptor::Product(parts) => parts.iter().map(|p| p.ambient_dim()).sum(),
        }
    }

    /// The simple (non-product) components in depth-first order.
    pub fn leaves(&self) -> Vec<&ConeDescriptor> {
        let mut out = Vec::new();
        self.collect_leaves(&mut out);
        out
    }

    fn collect_leaves<'a>(&'a self, out: &mut Vec<&'a ConeDescriptor>) {
        match self {
            ConeDescriptor::Product(parts) => parts.iter().for_each(|p| p.collect_leaves(out)),
            leaf => out.push(leaf),
        }
    }
}

impl fmt::Display for ConeDescriptor {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ConeDescriptor::Orthant(n) => write!(f, "orthant({n})"),
            ConeDescriptor::Spin(n) => write!(f, "spin({n})"),
            ConeDescriptor::Sym(n) => write!(f, "sym({n})"),
            ConeDescriptor::Product(parts) => {
                write!(f, "product[")?;
                for (i, p) in parts.iter().enumerate() {
                    if i > 0 {
                        write!(f, ", ")?;
                    }
                    write!(f, "{p}")?;
                }
                write!(f, "]")
            }
        }
    }
}
