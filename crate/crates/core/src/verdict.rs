//! Deciding whether the canonical class γ_G vanishes, with a replayable witness.

use serde::Serialize;
use thiserror::Error;

use crate::group::{GroupError, GroupSpec};
use crate::massey::{Massey, MasseyError};
use crate::ring::{NamedMonomial, TateRing};
use crate::scalars::Field;
use crate::secondary::{
    coboundary_obstruction, q8_core, triples_by_total_degree, triples_in_window, Obstruction, ObstructionRow, Secondary,
    SecondaryError,
};

use std::sync::Arc;

#[derive(Debug, Error)]
pub enum VerdictError {
    #[error(transparent)]
    Group(#[from] GroupError),
    #[error(transparent)]
    Secondary(#[from] SecondaryError),
    #[error(transparent)]
    Massey(#[from] MasseyError),
    #[error(transparent)]
    Ring(#[from] crate::ring::RingError),
    #[error("{0}")]
    Unsupported(String),
}

#[derive(Clone, Debug, Serialize)]
pub struct VerdictOptions {
    /// Certification window for homotopies and m-tables.
    pub window: (i64, i64),
    /// Bound on |a| + |b| + |c| for abelian m-tables of rank ≥ 3.
    pub bound: i64,
}

impl Default for VerdictOptions {
    fn default() -> Self {
        VerdictOptions { window: (-8, 8), bound: 6 }
    }
}

#[derive(Clone, Debug, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Witness {
    /// Every f2 pair certified, and m vanishes on every listed triple.
    Trivial { pairs: usize, d_condition: bool, normalized: bool, ideal_maps: Option<bool>, triples: usize, nonzero_entries: usize },
    /// A Massey product that does not contain zero.
    Massey { triple: [String; 3], representative: String, indeterminacy_dim: usize, contains_zero: bool },
    /// The linear system m = dg on the sector has no solution.
    Coboundary { certificate: Vec<(ObstructionRow, String)>, rows: usize },
}

#[derive(Clone, Debug, Serialize)]
pub struct GammaVerdict {
    pub group: String,
    pub field: String,
    pub trivial: bool,
    pub witness: Witness,
    pub options: VerdictOptions,
}

impl GammaVerdict {
    /// Whether the witness actually certifies the verdict.
    pub fn certified(&self) -> bool {
        match &self.witness {
            Witness::Trivial { d_condition, normalized, ideal_maps, nonzero_entries, .. } => {
                self.trivial && *d_condition && *normalized && ideal_maps.unwrap_or(true) && *nonzero_entries == 0
            }
            Witness::Massey { contains_zero, .. } => !self.trivial && !contains_zero,
            Witness::Coboundary { certificate, .. } => !self.trivial && !certificate.is_empty(),
        }
    }
}

pub fn gamma_verdict(group: &GroupSpec, field: Option<Arc<Field>>, opts: &VerdictOptions) -> Result<GammaVerdict, VerdictError> {
    let field = match field {
        Some(f) => f,
        None => group.default_field()?,
    };
    let ring = group.ring(&field)?;
    let witness = match group {
        GroupSpec::Q8 => q8_witness(&ring, opts)?,
        GroupSpec::Abelian(ms) => {
            if let Some(i) = ms.iter().position(|&m| m == 3) {
                let u = if ms.len() == 1 { "x".to_string() } else { format!("u{}", i + 1) };
                massey_witness(&ring, opts, [&u, &u, &u])?
            } else if ms.len() == 2 {
                let w = massey_witness(&ring, opts, ["v2", "phi(0,1)", "v1"])?;
                match w {
                    Witness::Massey { contains_zero: true, .. } => massey_witness(&ring, opts, ["v1", "phi(1,0)", "v2"])?,
                    w => w,
                }
            } else {
                trivial_witness(&ring, ms.len(), opts)?
            }
        }
    };
    Ok(GammaVerdict {
        group: group.to_string(),
        field: field.to_string(),
        trivial: matches!(witness, Witness::Trivial { .. }),
        witness,
        options: opts.clone(),
    })
}

fn q8_witness(ring: &Arc<TateRing>, opts: &VerdictOptions) -> Result<Witness, VerdictError> {
    let sec = Secondary::new(ring.clone(), opts.window)?;
    let table = sec.q8_table()?;
    match coboundary_obstruction(ring, &table, &q8_core())? {
        Obstruction::Inconsistent { certificate, rows } => Ok(Witness::Coboundary { certificate, rows: rows.len() }),
        Obstruction::Consistent { .. } => Err(VerdictError::Unsupported("the Q8 table turned out to be a coboundary".into())),
    }
}

fn massey_witness(ring: &Arc<TateRing>, opts: &VerdictOptions, names: [&str; 3]) -> Result<Witness, VerdictError> {
    let [a, b, c] = names.map(|n| ring.parse(n));
    let r = Massey::new(ring.clone(), opts.window).triple(&a?, &b?, &c?)?;
    Ok(Witness::Massey {
        triple: names.map(String::from),
        representative: ring.render(&r.representative.entries[0][0]),
        indeterminacy_dim: r.indeterminacy_dim,
        contains_zero: r.contains_zero,
    })
}

fn trivial_witness(ring: &Arc<TateRing>, rank: usize, opts: &VerdictOptions) -> Result<Witness, VerdictError> {
    let sec = Secondary::new(ring.clone(), opts.window)?;
    let triples: Vec<(NamedMonomial, NamedMonomial, NamedMonomial)> = if rank == 1 {
        triples_in_window(ring, opts.window)?
    } else {
        triples_by_total_degree(ring, opts.bound)?
    };
    let table = sec.table(&triples, true)?;
    let pairs = sec.stored_pairs();
    let mut d_condition = true;
    let mut normalized = true;
    let mut ideal = true;
    for (b, c) in &pairs {
        d_condition &= sec.satisfies_d_condition(b, c)?;
        let f = sec.f2(b, c)?;
        normalized &= ring.class_of(&f)?.is_zero();
        if rank > 1 {
            ideal &= sec.is_imap(b, c)?;
        }
    }
    Ok(Witness::Trivial {
        pairs: pairs.len(),
        d_condition,
        normalized,
        ideal_maps: (rank > 1).then_some(ideal),
        triples: triples.len(),
        nonzero_entries: table.nonzero().count(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn verdict(g: &str) -> GammaVerdict {
        let opts = VerdictOptions { window: (-8, 8), bound: 3 };
        gamma_verdict(&GroupSpec::parse(g).unwrap(), None, &opts).unwrap()
    }

    #[test]
    fn dispatches_each_regime() {
        for (g, trivial) in [("C9", true), ("C3", false), ("C3xC3", false), ("C4xC2", false), ("C2xC2xC2", true), ("Q8", false)] {
            let v = verdict(g);
            assert_eq!(v.trivial, trivial, "{g}");
            assert!(v.certified(), "{g}: {:?}", v.witness);
        }
        assert!(matches!(verdict("C3xC3").witness, Witness::Massey { ref triple, .. } if triple[0] == "u1"));
        assert!(matches!(verdict("Q8").witness, Witness::Coboundary { .. }));
    }
}
