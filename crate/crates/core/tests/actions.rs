use std::collections::BTreeMap;

use coarse_clt::actions::{ActionSpec, IsometricAction};
use coarse_clt::fixtures;
use coarse_clt::{Group, GroupSpec, Word};
use proptest::prelude::*;

#[derive(Clone, Copy)]
struct C(f64, f64);

impl C {
    fn add(self, o: C) -> C {
        C(self.0 + o.0, self.1 + o.1)
    }
    fn mul(self, o: C) -> C {
        C(self.0 * o.0 - self.1 * o.1, self.0 * o.1 + self.1 * o.0)
    }
    fn div(self, o: C) -> C {
        let d = o.0 * o.0 + o.1 * o.1;
        C((self.0 * o.0 + self.1 * o.1) / d, (self.1 * o.0 - self.0 * o.1) / d)
    }
}

/// Hyperbolic distance from `i` to `g·i`, with `g` applied as a composition of
/// Möbius maps.
fn mobius_displacement(mats: &[[f64; 4]], word: &[u16]) -> f64 {
    let mut z = C(0.0, 1.0);
    for &x in word.iter().rev() {
        let m = mats[x as usize];
        let num = C(m[0], 0.0).mul(z).add(C(m[1], 0.0));
        let den = C(m[2], 0.0).mul(z).add(C(m[3], 0.0));
        z = num.div(den);
    }
    let dx = z.0;
    let dy = z.1 - 1.0;
    (1.0 + (dx * dx + dy * dy) / (2.0 * z.1)).acosh()
}

fn sanov_mats() -> Vec<[f64; 4]> {
    // a, A, b, B
    vec![
        [1.0, 2.0, 0.0, 1.0],
        [1.0, -2.0, 0.0, 1.0],
        [1.0, 0.0, 2.0, 1.0],
        [1.0, 0.0, -2.0, 1.0],
    ]
}

fn reduced_word(max: usize) -> impl Strategy<Value = Word> {
    prop::collection::vec(0u16..4, 0..=max).prop_map(|w| {
        let mut out: Word = Vec::new();
        for x in w {
            if out.last() == Some(&(x ^ 1)) {
                out.pop();
            } else {
                out.push(x);
            }
        }
        out
    })
}

fn actions() -> Vec<IsometricAction> {
    let f2 = Group::free(2).unwrap();
    let sanov = Group::new(fixtures::sanov_group()).unwrap();
    vec![
        IsometricAction::new(&ActionSpec::CayleyTree, &f2).unwrap(),
        IsometricAction::new(&ActionSpec::hyperplane("a"), &f2).unwrap(),
        IsometricAction::new(&ActionSpec::matrix(), &sanov).unwrap(),
        IsometricAction::new(&abelianization(), &f2).unwrap(),
    ]
}

fn abelianization() -> ActionSpec {
    ActionSpec::HomomorphismWordMetric {
        map: BTreeMap::from([("a".into(), "a".into()), ("b".into(), "b".into())]),
        target: GroupSpec::Raag {
            generators: vec!["a".into(), "b".into()],
            commuting: vec![["a".into(), "b".into()]],
        },
        delta: None,
    }
}

#[test]
fn matrix_action_matches_mobius_oracle() {
    let g = Group::new(fixtures::sanov_group()).unwrap();
    let a = IsometricAction::new(&ActionSpec::matrix(), &g).unwrap();
    for w in ["a", "b", "a b", "a B a b", "b b A", "a b A B a a b"] {
        let word = g.parse_word(w).unwrap();
        let d = a.displacement(&word).unwrap();
        let o = mobius_displacement(&sanov_mats(), &word);
        assert!((d - o).abs() < 1e-9 * o.max(1.0), "{w}: {d} vs {o}");
    }
}

#[test]
fn matrix_action_survives_long_words() {
    let g = Group::new(fixtures::sanov_group()).unwrap();
    let a = IsometricAction::new(&ActionSpec::matrix(), &g).unwrap();
    let w: Word = (0..4000).map(|i| if i % 2 == 0 { 0 } else { 2 }).collect();
    let d = a.displacement(&w).unwrap();
    let tau = a.translation_length(&g.parse_word("a b").unwrap()).unwrap().value;
    // (ab)^2000 moves the basepoint by about 2000·τ(ab).
    assert!(d.is_finite());
    assert!((d / 2000.0 - tau).abs() < 0.01, "{d} {tau}");
}

#[test]
fn abelianization_distance() {
    let f2 = Group::free(2).unwrap();
    let a = IsometricAction::new(&abelianization(), &f2).unwrap();
    for (w, d) in [("a b A", 1.0), ("a a b a", 4.0), ("a b A B", 0.0), ("B B a", 3.0)] {
        assert_eq!(a.displacement(&f2.parse_word(w).unwrap()).unwrap(), d, "{w}");
    }
    let t = a.translation_length(&f2.parse_word("a b").unwrap()).unwrap();
    assert!((t.value - 2.0).abs() < 1e-12);
    assert!(t.certificate.unwrap().monotone);
}

#[test]
fn tree_translation_is_cyclic_length() {
    let f2 = Group::free(2).unwrap();
    let a = IsometricAction::new(&ActionSpec::CayleyTree, &f2).unwrap();
    let w = f2.parse_word("a b a A B A").unwrap();
    assert_eq!(a.translation_length(&w).unwrap().value, 0.0);
    let w = f2.parse_word("b a b B").unwrap();
    assert_eq!(a.translation_length(&w).unwrap().value, 2.0);
}

#[test]
fn hyperplane_counts_letter_in_reduced_word() {
    let f2 = Group::free(2).unwrap();
    let a = IsometricAction::new(&ActionSpec::hyperplane("a"), &f2).unwrap();
    assert_eq!(a.displacement(&f2.parse_word("a b A b a").unwrap()).unwrap(), 3.0);
    assert_eq!(a.translation_length(&f2.parse_word("a b A").unwrap()).unwrap().value, 0.0);
}

#[test]
fn invalid_matrices_are_rejected() {
    let spec = GroupSpec::Matrix {
        generators: vec![coarse_clt::group::MatrixGenerator {
            name: "a".into(),
            matrix: [1.0, 1.0, 1.0, 1.0].map(coarse_clt::group::Scalar::Number),
        }],
    };
    let g = Group::new(spec).unwrap();
    assert!(IsometricAction::new(&ActionSpec::matrix(), &g).is_err());
    let free = Group::free(2).unwrap();
    assert!(IsometricAction::new(&ActionSpec::hyperplane("q"), &free).is_err());
}

proptest! {
    #[test]
    fn displacement_is_symmetric(w in reduced_word(14)) {
        for a in actions() {
            let inv = a.group().inverse_word(&w).unwrap();
            let (d, e) = (a.displacement(&w).unwrap(), a.displacement(&inv).unwrap());
            prop_assert!((d - e).abs() < 1e-9 * d.max(1.0), "{}: {} vs {}", a.spec(), d, e);
        }
    }

    #[test]
    fn triangle_inequality(g in reduced_word(10), h in reduced_word(10)) {
        for a in actions() {
            let gh = a.group().concat(&[&g, &h]);
            let lhs = a.displacement(&gh).unwrap();
            let rhs = a.displacement(&g).unwrap() + a.displacement(&h).unwrap();
            prop_assert!(lhs <= rhs + 1e-9 * rhs.max(1.0), "{}", a.spec());
        }
    }

    #[test]
    fn gromov_product_is_bounded(g in reduced_word(10), h in reduced_word(10)) {
        for a in actions() {
            let p = a.gromov_product(&g, &h).unwrap();
            let m = a.displacement(&g).unwrap().min(a.displacement(&h).unwrap());
            prop_assert!(p >= 0.0 && p <= m + 1e-9 * m.max(1.0));
        }
    }

    #[test]
    fn translation_length_is_conjugacy_invariant(g in reduced_word(8), h in reduced_word(6)) {
        for a in actions().into_iter().take(3) {
            let hi = a.group().inverse_word(&h).unwrap();
            let c = a.group().concat(&[&h, &g, &hi]);
            let t = a.translation_length(&g).unwrap().value;
            let s = a.translation_length(&c).unwrap().value;
            prop_assert!((t - s).abs() < 1e-7 * t.max(1.0), "{}: {} vs {}", a.spec(), t, s);
            prop_assert!(t <= a.displacement(&g).unwrap() + 1e-9 * t.max(1.0));
        }
    }

    #[test]
    fn matrix_displacement_matches_oracle(w in reduced_word(12)) {
        let g = Group::new(fixtures::sanov_group()).unwrap();
        let a = IsometricAction::new(&ActionSpec::matrix(), &g).unwrap();
        let d = a.displacement(&w).unwrap();
        let o = mobius_displacement(&sanov_mats(), &w);
        prop_assert!((d - o).abs() < 1e-7 * o.max(1.0), "{} vs {}", d, o);
    }
}
