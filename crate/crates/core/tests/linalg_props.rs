use dwidth::gf::{hull, intersect, rank_of, rref, FVector, FieldSpec, Subspace};
use proptest::prelude::*;

const D: usize = 5;

fn field(q: u64) -> FieldSpec {
    FieldSpec::from_order(q).unwrap()
}

fn vectors(q: u32, max: usize) -> impl Strategy<Value = Vec<FVector>> {
    prop::collection::vec(prop::collection::vec(0..q, D).prop_map(FVector::new), 0..max)
}

fn span(rows: &[FVector], f: &FieldSpec) -> Subspace {
    rref(rows, D, f).unwrap()
}

proptest! {
    #[test]
    fn dimension_formula(q in prop::sample::select(vec![2u64, 3, 4, 5]), seed_a in vectors(5, 5), seed_b in vectors(5, 5)) {
        let f = field(q);
        let reduce = |v: &[FVector]| -> Vec<FVector> {
            v.iter().map(|x| FVector::new(x.entries().iter().map(|&e| e % q as u32).collect())).collect()
        };
        let (a, b) = (span(&reduce(&seed_a), &f), span(&reduce(&seed_b), &f));
        let h = hull(&a, &b, &f).unwrap();
        let i = intersect(&a, &b, &f).unwrap();
        prop_assert_eq!(h.dim() + i.dim(), a.dim() + b.dim());
        prop_assert!(i.is_subspace_of(&a, &f).unwrap());
        prop_assert!(i.is_subspace_of(&b, &f).unwrap());
        prop_assert!(a.is_subspace_of(&h, &f).unwrap());
        prop_assert!(b.is_subspace_of(&h, &f).unwrap());
        prop_assert_eq!(&h, &hull(&b, &a, &f).unwrap());
        prop_assert_eq!(&i, &intersect(&b, &a, &f).unwrap());
    }

    #[test]
    fn canonical_bases(rows in vectors(3, 6)) {
        let f = field(3);
        let s = span(&rows, &f);
        prop_assert_eq!(&span(&s.basis(), &f), &s);
        prop_assert_eq!(rank_of(rows.iter(), D, &f), s.dim());
        for r in &rows {
            prop_assert!(s.contains(r, &f).unwrap());
        }
        // reordering the generators does not change the canonical form
        let mut rev = rows.clone();
        rev.reverse();
        prop_assert_eq!(&span(&rev, &f), &s);
    }

    #[test]
    fn binary_matches_generic_path(rows in vectors(2, 6)) {
        // GF(2) uses packed rows; GF(4) restricted to {0, 1} has the same
        // linear dependencies among 0/1 vectors
        let s2 = span(&rows, &field(2));
        let s4 = span(&rows, &field(4));
        prop_assert_eq!(s2.dim(), s4.dim());
    }
}
