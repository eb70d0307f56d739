//! Group specifications such as `Q8`, `C4`, `C2xC2xC2` or `Z/4xZ/2`.

use std::fmt;
use std::sync::Arc;

use serde::Serialize;
use thiserror::Error;

use crate::algebra::{Algebra, AlgebraError};
use crate::resolution::{Resolution, ResolutionError};
use crate::ring::{RingError, TateRing};
use crate::scalars::{Field, FieldError};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum GroupError {
    #[error("cannot parse group spec `{0}`")]
    Parse(String),
    #[error("unsupported group `{0}`: {1}")]
    Unsupported(String, String),
    #[error(transparent)]
    Field(#[from] FieldError),
    #[error(transparent)]
    Algebra(#[from] AlgebraError),
    #[error(transparent)]
    Resolution(#[from] ResolutionError),
    #[error(transparent)]
    Ring(#[from] RingError),
}

#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize)]
pub enum GroupSpec {
    Q8,
    /// Z/m_1 × … × Z/m_r in the given factor order.
    Abelian(Vec<u32>),
}

fn prime_of(m: u32) -> Option<u32> {
    let p = (2..=m).find(|d| m % d == 0)?;
    let mut t = m;
    while t % p == 0 {
        t /= p;
    }
    (t == 1).then_some(p)
}

impl GroupSpec {
    pub fn parse(s: &str) -> Result<GroupSpec, GroupError> {
        let t: String = s.chars().filter(|c| !c.is_whitespace()).collect();
        if t.eq_ignore_ascii_case("q8") {
            return Ok(GroupSpec::Q8);
        }
        let mut ms = Vec::new();
        for part in t.split(['x', 'X', '×', '*']) {
            let digits = part
                .strip_prefix("Z/")
                .or_else(|| part.strip_prefix('C'))
                .or_else(|| part.strip_prefix('Z'))
                .ok_or_else(|| GroupError::Parse(s.into()))?;
            let m: u32 = digits.parse().map_err(|_| GroupError::Parse(s.into()))?;
            ms.push(m);
        }
        let spec = GroupSpec::Abelian(ms);
        spec.prime().map_err(|e| if let GroupError::Unsupported(_, why) = e { GroupError::Unsupported(s.into(), why) } else { e })?;
        Ok(spec)
    }

    /// The prime p with G a p-group.
    pub fn prime(&self) -> Result<u32, GroupError> {
        match self {
            GroupSpec::Q8 => Ok(2),
            GroupSpec::Abelian(ms) => {
                let mut primes = ms.iter().map(|&m| prime_of(m).ok_or_else(|| GroupError::Unsupported(self.to_string(), format!("{m} is not a prime power"))));
                let p = primes.next().ok_or_else(|| GroupError::Parse(self.to_string()))??;
                for q in primes {
                    if q? != p {
                        return Err(GroupError::Unsupported(self.to_string(), "not a p-group".into()));
                    }
                }
                Ok(p)
            }
        }
    }

    pub fn rank(&self) -> usize {
        match self {
            GroupSpec::Q8 => 2,
            GroupSpec::Abelian(ms) => ms.len(),
        }
    }

    pub fn resolution(&self, field: &Arc<Field>) -> Result<Arc<Resolution>, GroupError> {
        let p = self.prime()?;
        if field.characteristic() != p {
            return Err(GroupError::Unsupported(self.to_string(), format!("field characteristic must be {p}")));
        }
        Ok(match self {
            GroupSpec::Q8 => Resolution::q8(Algebra::quaternion(field.clone())?)?,
            GroupSpec::Abelian(ms) => Resolution::for_algebra(Algebra::truncated_polynomial(field.clone(), ms)?),
        })
    }

    pub fn ring(&self, field: &Arc<Field>) -> Result<Arc<TateRing>, GroupError> {
        Ok(Arc::new(TateRing::new(&self.resolution(field)?)?))
    }

    /// The prime field of the group's characteristic.
    pub fn default_field(&self) -> Result<Arc<Field>, GroupError> {
        Ok(Field::prime(self.prime()?)?)
    }
}

impl fmt::Display for GroupSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            GroupSpec::Q8 => write!(f, "Q8"),
            GroupSpec::Abelian(ms) => {
                let parts: Vec<String> = ms.iter().map(|m| format!("C{m}")).collect();
                write!(f, "{}", parts.join("x"))
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_specs() {
        assert_eq!(GroupSpec::parse("Q8").unwrap(), GroupSpec::Q8);
        assert_eq!(GroupSpec::parse("C2xC2xC2").unwrap(), GroupSpec::Abelian(vec![2, 2, 2]));
        assert_eq!(GroupSpec::parse("Z/4 x Z/2").unwrap(), GroupSpec::Abelian(vec![4, 2]));
        assert_eq!(GroupSpec::parse("C3xC9").unwrap().prime().unwrap(), 3);
        assert!(matches!(GroupSpec::parse("C6"), Err(GroupError::Unsupported(..))));
        assert!(matches!(GroupSpec::parse("C2xC3"), Err(GroupError::Unsupported(..))));
        assert!(matches!(GroupSpec::parse("D8"), Err(GroupError::Parse(_))));
        assert_eq!(GroupSpec::parse("C4xC2").unwrap().to_string(), "C4xC2");
    }

    #[test]
    fn rejects_wrong_characteristic() {
        let g = GroupSpec::parse("C4").unwrap();
        assert!(g.ring(&Field::prime(3).unwrap()).is_err());
        assert!(g.ring(&Field::parse("4").unwrap()).is_ok());
    }
}
