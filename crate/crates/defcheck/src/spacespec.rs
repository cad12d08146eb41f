//! Space specification strings of the form `pg:<n>:<q>` / `ag:<n>:<q>`.

use std::fmt;

use anyhow::{bail, Context, Result};
use finite_geometry::{Kind, Space, DEFAULT_LINE_CAP};
use line_graph::ModelKind;

/// A parsed space request: projective or affine, dimension, field order.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SpaceSpec {
    pub kind: Kind,
    pub n: u32,
    pub q: u32,
}

impl SpaceSpec {
    pub fn parse(text: &str) -> Result<SpaceSpec> {
        let parts: Vec<&str> = text.split(':').collect();
        if parts.len() != 3 {
            bail!("space spec `{text}` is not of the form pg:<n>:<q> or ag:<n>:<q>");
        }
        let kind = Kind::from_tag(parts[0])
            .with_context(|| format!("space spec `{text}`: unknown kind `{}`", parts[0]))?;
        let n: u32 = parts[1]
            .parse()
            .with_context(|| format!("space spec `{text}`: bad dimension `{}`", parts[1]))?;
        let q: u32 = parts[2]
            .parse()
            .with_context(|| format!("space spec `{text}`: bad field order `{}`", parts[2]))?;
        Ok(SpaceSpec { kind, n, q })
    }

    pub fn model_kind(&self) -> ModelKind {
        ModelKind::from_tag(self.kind.tag()).expect("kind tags coincide")
    }

    /// Build the space, enforcing the default line cap unless lifted.
    pub fn build(&self, allow_large: bool) -> Result<Space> {
        let cap = if allow_large { u16::MAX as u64 } else { DEFAULT_LINE_CAP };
        Space::build_with_cap(self.kind, self.n, self.q, cap)
            .with_context(|| format!("building {self}"))
    }
}

impl fmt::Display for SpaceSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}:{}", self.kind.tag(), self.n, self.q)
    }
}
