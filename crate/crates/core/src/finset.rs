//! Finite sets with total functions: the backend with trivial symmetry.

use crate::backend::{
    Backend, BackendError, BackendTag, Congruence, Factorization, FinMorphism, FinObject,
    FinitenessReport, Product,
};

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct FinSet;

impl FinSet {
    fn check(&self, x: &FinObject) -> Result<(), BackendError> {
        if x.symmetry().is_trivial() {
            Ok(())
        } else {
            Err(BackendError::Mismatch {
                expected: "set".into(),
                found: x.symmetry().describe(),
            })
        }
    }
}

impl Backend for FinSet {
    type Object = FinObject;
    type Morphism = FinMorphism;

    fn tag(&self) -> BackendTag {
        BackendTag::Set
    }

    fn product(&self, x: &FinObject, y: &FinObject) -> Result<Product<FinObject, FinMorphism>, BackendError> {
        self.check(x)?;
        self.check(y)?;
        crate::backend::finite_ops::product(x, y)
    }

    fn image_factorization(
        &self,
        f: &FinMorphism,
    ) -> Result<Factorization<FinObject, FinMorphism>, BackendError> {
        self.check(f.source())?;
        crate::backend::finite_ops::image_factorization(f)
    }

    fn quotient(&self, x: &FinObject, c: &Congruence) -> Result<(FinObject, FinMorphism), BackendError> {
        self.check(x)?;
        crate::backend::finite_ops::quotient(x, c)
    }

    /// All finiteness notions coincide with cardinality here.
    fn finiteness(&self, x: &FinObject) -> FinitenessReport {
        FinitenessReport {
            dk_finite: true,
            decomposition_finite: true,
            orbit_count: x.len(),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn finiteness_is_cardinality() {
        let x = FinObject::set(["x", "y", "z"]).unwrap();
        assert_eq!(
            FinSet.finiteness(&x),
            FinitenessReport {
                dk_finite: true,
                decomposition_finite: true,
                orbit_count: 3
            }
        );
    }

    #[test]
    fn identity_factorization() {
        let x = FinObject::set(["p", "q"]).unwrap();
        let id = FinMorphism::identity(&x);
        let fac = FinSet.image_factorization(&id).unwrap();
        assert_eq!(fac.mid, x);
        assert_eq!(fac.epi, id);
        assert_eq!(fac.mono, id);
    }

    #[test]
    fn discrete_and_full_quotients() {
        let x = FinObject::set(["p", "q", "r"]).unwrap();
        let (q, _) = FinSet.quotient(&x, &Congruence::discrete(3)).unwrap();
        assert_eq!(q, x);
        let (q, proj) = FinSet.quotient(&x, &Congruence::full(3)).unwrap();
        assert_eq!(q.len(), 1);
        assert!(proj.is_surjective());
    }
}
