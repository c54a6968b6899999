//! Busemann values `B_∞(γ_n⁻¹ i, i) = ln(a_n² + c_n²)` along families `γ_n`.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::hyperbolic::MoebiusMap;
use crate::precision::ExtMoebius;
use crate::schottky::{index_sequence, make_generator, IndexSequence};

/// Which group a family member is known to belong to.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum GroupFamily {
    /// A word in the sequence generators `h_{p_k}`.
    Gamma,
    /// Uses some `h_m` with `m` outside the index sequence, so only
    /// membership in `⟨h_m : m ≥ 1⟩` is known.
    Extended,
}

/// Reading of the second index in `γ_n = h_{p_n} h_{p_n²}`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum SecondIndex {
    /// The raw integer `(p_n)²`.
    RawSquare,
    /// The sequence entry `p_{n²}`.
    SequenceSquare,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FamilyMember {
    /// 1-based position `n` in the family.
    pub n: usize,
    pub first: u64,
    pub second: Option<u64>,
    pub family: GroupFamily,
    #[serde(skip)]
    pub map: MoebiusMap,
}

impl FamilyMember {
    pub fn label(&self) -> String {
        match self.second {
            Some(q) => format!("h{}*h{q}", self.first),
            None => format!("h{}", self.first),
        }
    }

    /// The same element evaluated in extended precision.
    pub fn extended(&self, delta: f64, bits: usize) -> Result<ExtMoebius> {
        let h = ExtMoebius::generator(self.first, delta, bits)?;
        match self.second {
            Some(q) => Ok(h.compose(&ExtMoebius::generator(q, delta, bits)?)),
            None => Ok(h),
        }
    }
}

/// `h_{p_n}` for every entry of the sequence.
pub fn generator_family(sequence: &IndexSequence) -> Vec<FamilyMember> {
    sequence
        .entries()
        .iter()
        .enumerate()
        .map(|(k, &p)| FamilyMember {
            n: k + 1,
            first: p,
            second: None,
            family: GroupFamily::Gamma,
            map: make_generator(p, sequence.delta()).expect("index ≥ 1").to_map(),
        })
        .collect()
}

/// `γ_n = h_{p_n} h_q` for the chosen reading of `q`.
///
/// Members whose second index does not fit in `u64` end the family; at
/// least one member is required.
pub fn pair_family(sequence: &IndexSequence, second: SecondIndex) -> Result<Vec<FamilyMember>> {
    let delta = sequence.delta();
    let mut out = Vec::new();
    for (k, &p) in sequence.entries().iter().enumerate() {
        let n = k + 1;
        let q = match second {
            SecondIndex::RawSquare => p.checked_mul(p),
            SecondIndex::SequenceSquare => {
                index_sequence(delta, n * n).ok().map(|s| s.last())
            }
        };
        let Some(q) = q else { break };
        let family = match second {
            SecondIndex::SequenceSquare => GroupFamily::Gamma,
            SecondIndex::RawSquare if sequence.contains(q) => GroupFamily::Gamma,
            SecondIndex::RawSquare => GroupFamily::Extended,
        };
        let map = make_generator(p, delta)?
            .to_map()
            .compose(&make_generator(q, delta)?.to_map());
        out.push(FamilyMember {
            n,
            first: p,
            second: Some(q),
            family,
            map,
        });
    }
    if out.is_empty() {
        return Err(Error::CapacityExceeded(
            "no member of the two-letter family fits in u64".into(),
        ));
    }
    Ok(out)
}

/// Busemann values along a family with the last value as the limit estimate.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BusemannLimit {
    /// `−ln Im(γ_n⁻¹(i))`
    pub values: Vec<f64>,
    /// `γ_n(∞) = a_n/c_n`
    pub endpoints: Vec<f64>,
    pub limit: f64,
    /// `|v_n − v_{n−1}|`, zero for a single member.
    pub error_bar: f64,
}

fn assemble(values: Vec<f64>, endpoints: Vec<f64>) -> BusemannLimit {
    let limit = *values.last().expect("non-empty family");
    let error_bar = match values.len() {
        0 | 1 => 0.0,
        n => (values[n - 1] - values[n - 2]).abs(),
    };
    BusemannLimit {
        values,
        endpoints,
        limit,
        error_bar,
    }
}

/// Rejects empty families and members fixing `∞`.
pub fn busemann_limit(family: &[MoebiusMap]) -> Result<BusemannLimit> {
    if family.is_empty() {
        return Err(Error::InvalidFamily("empty family".into()));
    }
    let mut values = Vec::with_capacity(family.len());
    let mut endpoints = Vec::with_capacity(family.len());
    for (k, m) in family.iter().enumerate() {
        if m.c() == 0.0 {
            return Err(Error::InvalidFamily(format!("member {} fixes ∞", k + 1)));
        }
        values.push(m.a().hypot(m.c()).ln() * 2.0);
        endpoints.push(m.a() / m.c());
    }
    Ok(assemble(values, endpoints))
}

/// [`busemann_limit`] with every value computed in extended precision.
pub fn busemann_limit_extended(family: &[ExtMoebius]) -> Result<BusemannLimit> {
    if family.is_empty() {
        return Err(Error::InvalidFamily("empty family".into()));
    }
    let mut values = Vec::with_capacity(family.len());
    let mut endpoints = Vec::with_capacity(family.len());
    for (k, m) in family.iter().enumerate() {
        let end = m
            .image_of_infinity()
            .ok_or_else(|| Error::InvalidFamily(format!("member {} fixes ∞", k + 1)))?;
        values.push(m.busemann_value());
        endpoints.push(end);
    }
    Ok(assemble(values, endpoints))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::schottky::SurfaceParameter;

    fn seq(count: usize) -> IndexSequence {
        index_sequence(&SurfaceParameter::new(3.0).unwrap(), count).unwrap()
    }

    #[test]
    fn generator_limit_approaches_two_ln_delta() {
        let fam: Vec<_> = generator_family(&seq(10)).into_iter().map(|m| m.map).collect();
        let lim = busemann_limit(&fam).unwrap();
        assert!((lim.values[0] - 14.69f64.ln()).abs() < 1e-14);
        assert!(lim.values.windows(2).all(|w| w[1] < w[0]));
        assert!((lim.limit - 2.0 * 3f64.ln()).abs() < 2e-3);
        assert!(lim.endpoints.windows(2).all(|w| w[1] > w[0]));
    }

    #[test]
    fn raw_square_family_limit() {
        let fam = pair_family(&seq(10), SecondIndex::RawSquare).unwrap();
        assert_eq!(fam[0].second, Some(4));
        assert_eq!(fam[0].family, GroupFamily::Extended);
        assert_eq!(fam[0].label(), "h2*h4");
        let maps: Vec<_> = fam.iter().map(|m| m.map).collect();
        let lim = busemann_limit(&maps).unwrap();
        assert!((lim.limit - 2.0 * 12f64.ln()).abs() < 1e-2);
        let ext: Vec<_> = fam.iter().map(|m| m.extended(3.0, 192).unwrap()).collect();
        let lim_ext = busemann_limit_extended(&ext).unwrap();
        for (a, b) in lim.values.iter().zip(&lim_ext.values) {
            assert!((a - b).abs() < 1e-9);
        }
    }

    #[test]
    fn sequence_square_family_is_short_and_in_gamma() {
        let fam = pair_family(&seq(10), SecondIndex::SequenceSquare).unwrap();
        assert!(fam.len() < 10);
        assert_eq!(fam[1].second, Some(seq(4).last()));
        assert!(fam.iter().all(|m| m.family == GroupFamily::Gamma));
    }

    #[test]
    fn identity_is_rejected() {
        assert!(matches!(
            busemann_limit(&[MoebiusMap::IDENTITY]),
            Err(Error::InvalidFamily(_))
        ));
        assert!(busemann_limit(&[]).is_err());
        assert!(busemann_limit_extended(&[ExtMoebius::identity(128)]).is_err());
    }
}
