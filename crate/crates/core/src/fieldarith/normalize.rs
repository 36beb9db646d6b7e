use std::collections::HashMap;
use std::sync::Arc;

use super::element::{adjoin_partner, adjoin_sqrt_inner, FieldElement};
use super::tower::{RootKind, TowerLevel, MAX_TOWER_DEPTH};
use super::FieldError;

/// Hermitian inner product `sum conj(a_i) b_i`.
pub fn inner_product(a: &[FieldElement], b: &[FieldElement]) -> Result<FieldElement, FieldError> {
    assert_eq!(a.len(), b.len());
    let mut acc: Option<FieldElement> = None;
    for (x, y) in a.iter().zip(b) {
        let t = x.conj()?.checked_mul(y)?;
        acc = Some(match acc {
            None => t,
            Some(s) => s.checked_add(&t)?,
        });
    }
    acc.ok_or(FieldError::ZeroVector)
}

fn common_level(v: &[FieldElement]) -> Result<Arc<TowerLevel>, FieldError> {
    let mut level = v[0].level().clone();
    for x in &v[1..] {
        level = TowerLevel::common(&level, x.level()).ok_or(FieldError::IncompatibleTowers)?;
    }
    Ok(level)
}

/// Adds conjugation partners for every non-real radical that lacks one.
pub fn with_conjugation(level: &Arc<TowerLevel>) -> Result<Arc<TowerLevel>, FieldError> {
    let mut lvl = level.clone();
    for j in 0..level.depth() {
        let nonreal = matches!(lvl.kind(j), RootKind::UpperHalf | RootKind::LowerHalf);
        if nonreal && lvl.partner(j).is_none() {
            if lvl.depth() >= MAX_TOWER_DEPTH {
                return Err(FieldError::TowerTooDeep(MAX_TOWER_DEPTH));
            }
            lvl = adjoin_partner(&lvl, j)?;
        }
    }
    Ok(lvl)
}

/// Scales `v` to unit norm, adjoining the square root of its norm when the
/// root is not already rational. A vector of norm one is returned as is.
pub fn normalize_vector(
    v: &[FieldElement],
) -> Result<(Vec<FieldElement>, Arc<TowerLevel>), FieldError> {
    normalize_vector_cached(v, &mut NormCache::default())
}

/// Remembers the extension built for each (level, norm) so vectors that share
/// both also share the adjoined level.
#[derive(Default)]
pub struct NormCache {
    map: HashMap<(usize, String), (Arc<TowerLevel>, FieldElement)>,
}

pub fn normalize_vector_cached(
    v: &[FieldElement],
    cache: &mut NormCache,
) -> Result<(Vec<FieldElement>, Arc<TowerLevel>), FieldError> {
    if v.is_empty() {
        return Err(FieldError::ZeroVector);
    }
    let base = common_level(v)?;
    let level = with_conjugation(&base)?;
    let lifted: Vec<FieldElement> = v
        .iter()
        .map(|x| x.lift_to(&level))
        .collect::<Result<_, _>>()?;
    let n = inner_product(&lifted, &lifted)?;
    if n.is_zero() {
        return Err(FieldError::ZeroVector);
    }
    if n.is_one() {
        let same: Vec<FieldElement> = v
            .iter()
            .map(|x| x.lift_to(&base))
            .collect::<Result<_, _>>()?;
        return Ok((same, base));
    }
    let key = (Arc::as_ptr(&level) as usize, n.to_compact());
    let (top, scale) = match cache.map.get(&key) {
        Some(hit) => hit.clone(),
        None => {
            // the norm of a nonzero vector is a positive real
            let s = adjoin_sqrt_inner(&level, &n, Some(RootKind::PositiveReal), MAX_TOWER_DEPTH)?;
            let scale = s.root.checked_mul(&n.lift_to(&s.level)?.inv()?)?;
            // s.level keeps its parent alive, so the address in the key stays unique
            cache.map.insert(key, (s.level.clone(), scale.clone()));
            (s.level, scale)
        }
    };
    let w = lifted
        .iter()
        .map(|x| x.lift_to(&top)?.checked_mul(&scale))
        .collect::<Result<Vec<_>, _>>()?;
    Ok((w, top))
}
