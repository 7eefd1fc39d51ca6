//! Prime spectra as finite topological spaces.
//!
//! For a finite ring every prime is maximal and the spectrum is discrete; for
//! a number field there is exactly one point. Points carry their ideal's
//! element set as identity so charts can mention them stably across
//! serialization. The Zariski topology is generated by the distinguished
//! opens D(f) and stored explicitly.

use std::collections::BTreeSet;
use std::sync::Arc;

use crate::error::{RingError, TopologyError};
use crate::ring::{
    enumerate_ideals, is_prime_ideal, Coords, HomMap, Ideal, Ring, RingElement, RingHom, RingId,
    RingIso,
};
use crate::topology::{OpenSet, PointId, TopSpace};
use crate::Homeo;

/// A prime of a spectrum: the explicit ideal for finite rings, or the zero
/// ideal of a number field.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum SpecPoint {
    FiniteIdeal(Ideal),
    NumberFieldZero,
}

impl SpecPoint {
    pub fn label(&self) -> PointId {
        match self {
            SpecPoint::FiniteIdeal(i) => PointId::new(i.point_label()),
            SpecPoint::NumberFieldZero => PointId::new("p{0}"),
        }
    }
}

/// The prime spectrum of a ring with its Zariski topology.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SpecSpace {
    pub ring: RingId,
    pub points: Vec<SpecPoint>,
    pub space: TopSpace,
}

impl SpecSpace {
    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    /// Index of the prime with the given ideal element set.
    pub fn index_of_ideal(&self, elements: &BTreeSet<Coords>) -> Option<usize> {
        self.points.iter().position(|p| match p {
            SpecPoint::FiniteIdeal(i) => &i.elements == elements,
            SpecPoint::NumberFieldZero => false,
        })
    }

    pub fn index_of_label(&self, label: &PointId) -> Option<usize> {
        self.space.point_index(label)
    }
}

/// Compute the spectrum of a ring.
pub fn spec(ring: &Ring) -> Result<SpecSpace, RingError> {
    match ring.number_field() {
        Some(_) => {
            let pt = SpecPoint::NumberFieldZero;
            let space = TopSpace::discrete(vec![pt.label()]);
            Ok(SpecSpace {
                ring: ring.id().clone(),
                points: vec![pt],
                space,
            })
        }
        None => {
            let ideals = enumerate_ideals(ring)?;
            let primes: Vec<Ideal> = ideals
                .into_iter()
                .filter(|i| is_prime_ideal(ring, i))
                .collect();
            let points: Vec<SpecPoint> = primes.into_iter().map(SpecPoint::FiniteIdeal).collect();
            let labels: Vec<PointId> = points.iter().map(|p| p.label()).collect();
            // topology generated by the distinguished opens
            let mut generators: Vec<OpenSet> = Vec::new();
            for f in ring.elements() {
                generators.push(distinguished_open_of(&points, &f));
            }
            let space = TopSpace::new(labels, generators);
            Ok(SpecSpace {
                ring: ring.id().clone(),
                points,
                space,
            })
        }
    }
}

fn distinguished_open_of(points: &[SpecPoint], f: &RingElement) -> OpenSet {
    points
        .iter()
        .enumerate()
        .filter(|(_, p)| match p {
            SpecPoint::FiniteIdeal(i) => match f.coords() {
                Some(c) => !i.contains(c),
                None => true,
            },
            // the zero ideal of a field contains only 0
            SpecPoint::NumberFieldZero => {
                !matches!(&f.value, crate::ring::ElemValue::Nf(v) if v.iter().all(num::Zero::is_zero))
            }
        })
        .map(|(i, _)| i)
        .collect()
}

/// D(f): the primes not containing f.
pub fn distinguished_open(spectrum: &SpecSpace, f: &RingElement) -> OpenSet {
    distinguished_open_of(&spectrum.points, f)
}

/// The least element of the ring whose distinguished open equals the target,
/// if one exists. For finite rings every open subset is a D(f).
pub fn least_element_cutting(
    ring: &Ring,
    spectrum: &SpecSpace,
    target: &OpenSet,
) -> Option<RingElement> {
    if let Some(nf) = ring.number_field() {
        let full: OpenSet = (0..spectrum.len()).collect();
        if target == &full {
            return Some(RingElement {
                ring: ring.id().clone(),
                value: crate::ring::ElemValue::Nf(nf.one()),
            });
        }
        if target.is_empty() {
            return Some(RingElement {
                ring: ring.id().clone(),
                value: crate::ring::ElemValue::Nf(nf.zero()),
            });
        }
        return None;
    }
    ring.elements()
        .into_iter()
        .find(|f| &distinguished_open(spectrum, f) == target)
}

/// The contravariant homeomorphism induced by a ring isomorphism:
/// spec(B) → spec(A) by P ↦ σ⁻¹(P).
pub fn spec_functor(
    dom: &Ring,
    cod: &Ring,
    iso: &RingIso,
    spec_dom: &SpecSpace,
    spec_cod: &SpecSpace,
) -> Result<Homeo, TopologyError> {
    debug_assert_eq!(&spec_dom.ring, iso.domain());
    debug_assert_eq!(&spec_cod.ring, iso.range());
    let forward = match &iso.inverse.map {
        HomMap::FiniteTable(_) => {
            let mut fwd = Vec::with_capacity(spec_cod.len());
            for p in &spec_cod.points {
                let SpecPoint::FiniteIdeal(q) = p else {
                    return Err(TopologyError::NotHomeomorphism {
                        reason: "mixed spectrum kinds".into(),
                    });
                };
                // σ⁻¹(Q) computed by pushing Q through the inverse map
                let preimage: BTreeSet<Coords> = q
                    .elements
                    .iter()
                    .map(|c| {
                        let e = RingElement::finite(cod.id().clone(), c.clone());
                        let img = iso
                            .inverse
                            .apply(cod, dom, &e)
                            .expect("verified iso applies");
                        img.coords().unwrap().clone()
                    })
                    .collect();
                let idx = spec_dom.index_of_ideal(&preimage).ok_or_else(|| {
                    TopologyError::NotHomeomorphism {
                        reason: "preimage of a prime is not a listed prime".into(),
                    }
                })?;
                fwd.push(idx);
            }
            fwd
        }
        HomMap::NumberFieldGen { .. } => vec![0],
    };
    Homeo::new(spec_cod.space.clone(), spec_dom.space.clone(), forward)
}

/// The canonical homeomorphism spec(A_f) ≅ D(f) ⊆ spec(A): a prime Q of the
/// localization corresponds to its preimage under the canonical map a ↦ ea.
pub fn localization_spec_homeo(
    parent: &Arc<Ring>,
    parent_spec: &SpecSpace,
    loc: &Arc<Ring>,
    loc_hom: &RingHom,
    loc_spec: &SpecSpace,
) -> Result<(OpenSet, Homeo), TopologyError> {
    if loc.same_ring(parent) {
        // unit localization: D(f) is everything
        let full = parent_spec.space.full();
        let h = Homeo::identity(&parent_spec.space);
        return Ok((full, h));
    }
    let mut d_set = OpenSet::new();
    let mut image_points = Vec::with_capacity(loc_spec.len());
    for q in &loc_spec.points {
        let SpecPoint::FiniteIdeal(qi) = q else {
            return Err(TopologyError::NotHomeomorphism {
                reason: "number fields localize to themselves".into(),
            });
        };
        // preimage {a ∈ A : ea ∈ Q}
        let mut pre = BTreeSet::new();
        for a in parent.elements() {
            let img = loc_hom
                .apply(parent, loc, &a)
                .expect("localization map total");
            if qi.contains(img.coords().unwrap()) {
                pre.insert(a.coords().unwrap().clone());
            }
        }
        let idx = parent_spec.index_of_ideal(&pre).ok_or_else(|| {
            TopologyError::NotHomeomorphism {
                reason: "localization prime does not pull back to a prime".into(),
            }
        })?;
        d_set.insert(idx);
        image_points.push(idx);
    }
    let sub = parent_spec.space.subspace(&d_set);
    // renumber the image indices into the subspace
    let order: Vec<usize> = d_set.iter().copied().collect();
    let forward: Vec<usize> = image_points
        .iter()
        .map(|i| order.iter().position(|j| j == i).unwrap())
        .collect();
    let h = Homeo::new(loc_spec.space.clone(), sub, forward)?;
    Ok((d_set, h))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ring::{iso_search, localize, make_ring, RingPresentation};
    use crate::topology::{disjoint_union, is_homeomorphic_bruteforce};
    use num::bigint::BigInt;
    use num::rational::BigRational;

    fn z(n: u64) -> Arc<Ring> {
        make_ring(&RingPresentation::zmod(format!("Z{n}"), n)).unwrap()
    }

    fn rat(n: i64) -> BigRational {
        BigRational::from_integer(BigInt::from(n))
    }

    #[test]
    fn spec_z6_two_points_discrete() {
        // brute-force primality filter on the 4 ideals of Z/6
        let r = z(6);
        let s = spec(&r).unwrap();
        assert_eq!(s.len(), 2);
        assert!(s.space.is_discrete());
        let labels: Vec<String> = s.space.points().iter().map(|p| p.to_string()).collect();
        assert_eq!(labels, vec!["p{0,3}", "p{0,2,4}"]);
    }

    #[test]
    fn spec_z4_one_point() {
        // (0) is not prime since 2·2 = 0
        let r = z(4);
        let s = spec(&r).unwrap();
        assert_eq!(s.len(), 1);
        let labels: Vec<String> = s.space.points().iter().map(|p| p.to_string()).collect();
        assert_eq!(labels, vec!["p{0,2}"]);
    }

    #[test]
    fn spec_number_field_single_point() {
        let k = make_ring(&RingPresentation::number_field(
            "k",
            vec![rat(-2), rat(0), rat(0), rat(1)],
            false,
        ))
        .unwrap();
        let s = spec(&k).unwrap();
        assert_eq!(s.len(), 1);
    }

    #[test]
    fn spec_zero_ring_is_empty() {
        let r = z(4);
        let two = r.element(vec![2]).unwrap();
        let (zero_ring, _) = localize(&r, &two).unwrap();
        assert_eq!(zero_ring.size(), Some(1));
        let s = spec(&zero_ring).unwrap();
        assert!(s.is_empty());
    }

    #[test]
    fn distinguished_opens_of_z6() {
        let r = z(6);
        let s = spec(&r).unwrap();
        let d1 = distinguished_open(&s, &r.one());
        assert_eq!(d1.len(), 2, "D(1) is everything");
        let d0 = distinguished_open(&s, &r.zero());
        assert!(d0.is_empty(), "D(0) is empty");
        let two = r.element(vec![2]).unwrap();
        let d2 = distinguished_open(&s, &two);
        // 2 ∈ (2) = {0,2,4}, 2 ∉ (3) = {0,3}
        let idx3 = s
            .index_of_ideal(&BTreeSet::from([vec![0u64], vec![3u64]]))
            .unwrap();
        assert_eq!(d2, OpenSet::from([idx3]));
    }

    #[test]
    fn spec_functor_identity() {
        let r = z(6);
        let s = spec(&r).unwrap();
        let id = RingIso::identity(&r);
        let h = spec_functor(&r, &r, &id, &s, &s).unwrap();
        assert_eq!(h.forward, vec![0, 1]);
    }

    #[test]
    fn spec_functor_reverses_composition() {
        let a = z(6);
        let b = make_ring(&RingPresentation::zmod("Z6b", 6)).unwrap();
        let c = make_ring(&RingPresentation::zmod("Z6c", 6)).unwrap();
        let sa = spec(&a).unwrap();
        let sb = spec(&b).unwrap();
        let sc = spec(&c).unwrap();
        let ab = &iso_search(&a, &b, &[]).unwrap()[0];
        let bc = &iso_search(&b, &c, &[]).unwrap()[0];
        let ac = RingIso {
            forward: ab.forward.compose(&bc.forward, &a, &b, &c).unwrap(),
            inverse: bc.inverse.compose(&ab.inverse, &c, &b, &a).unwrap(),
        };
        let h_ab = spec_functor(&a, &b, ab, &sa, &sb).unwrap();
        let h_bc = spec_functor(&b, &c, bc, &sb, &sc).unwrap();
        let h_ac = spec_functor(&a, &c, &ac, &sa, &sc).unwrap();
        // spec(δ∘σ) = spec(σ) ∘ spec(δ)
        let composed = h_bc.compose(&h_ab).unwrap();
        assert_eq!(h_ac.forward, composed.forward);
    }

    #[test]
    fn localization_spec_matches_distinguished_open() {
        for n in [4u64, 6, 8, 9, 12] {
            let r = z(n);
            let s = spec(&r).unwrap();
            for f in r.elements() {
                if r.is_zero(&f) {
                    continue;
                }
                let (loc, hom) = localize(&r, &f).unwrap();
                let ls = spec(&loc).unwrap();
                let (d_set, h) = localization_spec_homeo(&r, &s, &loc, &hom, &ls).unwrap();
                assert_eq!(d_set, distinguished_open(&s, &f), "Z{n} at {f}");
                // independence: brute-force search agrees a homeomorphism exists
                let sub = s.space.subspace(&d_set);
                assert!(is_homeomorphic_bruteforce(&ls.space, &sub)
                    .unwrap()
                    .is_some());
                let _ = h;
            }
        }
    }

    #[test]
    fn product_spectrum_is_disjoint_union() {
        let p = RingPresentation::product(
            "Z2xZ3",
            vec![
                RingPresentation::zmod("Z2", 2),
                RingPresentation::zmod("Z3", 3),
            ],
        );
        let prod = make_ring(&p).unwrap();
        let sp = spec(&prod).unwrap();
        let s2 = spec(&z(2)).unwrap();
        let s3 = spec(&z(3)).unwrap();
        let du = disjoint_union(&[("l".into(), &s2.space), ("r".into(), &s3.space)]);
        assert!(is_homeomorphic_bruteforce(&sp.space, &du)
            .unwrap()
            .is_some());
    }

    #[test]
    fn spec_discrete_for_all_stock_rings() {
        for n in 2u64..=12 {
            let r = z(n);
            let s = spec(&r).unwrap();
            assert!(s.space.is_discrete(), "spec(Z{n}) discrete");
        }
    }

    #[test]
    fn every_open_subset_is_distinguished() {
        for n in [6u64, 12] {
            let r = z(n);
            let s = spec(&r).unwrap();
            for o in s.space.opens() {
                assert!(
                    least_element_cutting(&r, &s, o).is_some(),
                    "every open of spec(Z{n}) is a D(f)"
                );
            }
        }
    }
}
