//! Form arithmetic checked against oracles that share no code with the
//! library's composition and reduction routines.

use imagclass::classgroup::reduced_forms;
use imagclass::quadform::QuadForm;
use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::ToPrimitive;
use proptest::prelude::*;

type Triple = (i64, i64, i64);

fn triple(f: &QuadForm) -> Triple {
    (
        f.a().to_i64().unwrap(),
        f.b().to_i64().unwrap(),
        f.c().to_i64().unwrap(),
    )
}

fn form((a, b, c): Triple) -> QuadForm {
    QuadForm::new(a, b, c).unwrap()
}

/// Substitutes `(x, y) -> (px + qy, rx + sy)`.
fn act((a, b, c): Triple, [p, q, r, s]: [i64; 4]) -> Triple {
    (
        a * p * p + b * p * r + c * r * r,
        2 * a * p * q + b * (p * s + q * r) + 2 * c * r * s,
        a * q * q + b * q * s + c * s * s,
    )
}

/// Reduced forms of `delta` by scanning every `(A, B)` pair.
fn brute_reduced(delta: i64) -> Vec<Triple> {
    let mut out = Vec::new();
    let mut a = 1;
    while 3 * a * a <= -delta {
        for b in (1 - a)..=a {
            let num = b * b - delta;
            if num % (4 * a) != 0 {
                continue;
            }
            let c = num / (4 * a);
            if c < a || (c == a && b < 0) || a.gcd(&b).gcd(&c) != 1 {
                continue;
            }
            out.push((a, b, c));
        }
        a += 1;
    }
    out.sort();
    out
}

/// Dirichlet composition: move `g` to an equivalent form whose leading
/// coefficient makes the pair concordant, then solve for the united `B`
/// by direct search.
fn dirichlet_compose(f: Triple, g: Triple, delta: i64) -> Triple {
    let (a1, b1, _) = f;
    for x in 0i64..20 {
        for y in -20i64..20 {
            if x.gcd(&y) != 1 {
                continue;
            }
            let e = x.extended_gcd(&y);
            // x * e.x + y * e.y = 1, so [[x, -e.y], [y, e.x]] has det 1.
            let m = [x, -e.y, y, e.x];
            let g2 = act(g, m);
            let (a2, b2, _) = g2;
            if a2 <= 0 || a1.gcd(&a2).gcd(&((b1 + b2) / 2)) != 1 {
                continue;
            }
            let modulus = 4 * a1 * a2;
            for big_b in 0..2 * a1 * a2 {
                if (big_b - b1).rem_euclid(2 * a1) == 0
                    && (big_b - b2).rem_euclid(2 * a2) == 0
                    && (big_b * big_b - delta).rem_euclid(modulus) == 0
                {
                    let c = (big_b * big_b - delta) / modulus;
                    return triple(&form((a1 * a2, big_b, c)).reduce());
                }
            }
            panic!("no united B for {f:?} * {g:?}");
        }
    }
    panic!("no concordant representative for {g:?}");
}

fn discriminants(limit: i64) -> impl Iterator<Item = i64> {
    (3..=limit).map(|d| -d).filter(|d| d.rem_euclid(4) <= 1)
}

#[test]
fn reduced_form_listing_matches_scan() {
    for delta in discriminants(3000) {
        let listed: Vec<Triple> = reduced_forms(&BigInt::from(delta))
            .unwrap()
            .iter()
            .map(triple)
            .collect();
        assert_eq!(listed, brute_reduced(delta), "Δ = {delta}");
    }
}

#[test]
fn composition_matches_dirichlet() {
    for delta in discriminants(800) {
        let forms = brute_reduced(delta);
        for &f in &forms {
            for &g in &forms {
                let got = triple(&form(f).compose(&form(g)).unwrap());
                assert_eq!(got, dirichlet_compose(f, g, delta), "Δ = {delta}: {f:?} * {g:?}");
            }
        }
    }
}

#[test]
fn group_axioms_up_to_2000() {
    for delta in discriminants(2000) {
        let forms = brute_reduced(delta);
        let idx = |t: &Triple| forms.binary_search(t).expect("closure: product is a reduced form");
        let qf: Vec<QuadForm> = forms.iter().map(|&t| form(t)).collect();
        let h = forms.len();
        let mut table = vec![vec![0usize; h]; h];
        for i in 0..h {
            for j in 0..h {
                table[i][j] = idx(&triple(&qf[i].compose(&qf[j]).unwrap()));
            }
        }
        let id = idx(&triple(&QuadForm::principal(&BigInt::from(delta)).unwrap()));
        for i in 0..h {
            assert_eq!(table[i][id], i, "identity, Δ = {delta}");
            assert_eq!(table[id][i], i, "identity, Δ = {delta}");
            let inv = idx(&triple(&qf[i].inverse()));
            assert_eq!(table[i][inv], id, "inverse, Δ = {delta}");
            for j in 0..h {
                assert_eq!(table[i][j], table[j][i], "commutativity, Δ = {delta}");
                for k in 0..h {
                    assert_eq!(
                        table[table[i][j]][k], table[i][table[j][k]],
                        "associativity, Δ = {delta}"
                    );
                }
            }
        }
    }
}

#[test]
fn reduced_leading_coefficient_bound() {
    for delta in discriminants(5000) {
        for f in reduced_forms(&BigInt::from(delta)).unwrap() {
            let a = f.a().to_i64().unwrap();
            assert!(3 * a * a <= -delta);
            assert!(f.is_reduced());
        }
    }
}

fn sl2() -> impl Strategy<Value = [i64; 4]> {
    (-30i64..30, -30i64..30)
        .prop_filter("coprime", |(x, y)| x.gcd(y) == 1)
        .prop_map(|(x, y)| {
            let e = x.extended_gcd(&y);
            [x, -e.y, y, e.x]
        })
}

fn reduced_form() -> impl Strategy<Value = Triple> {
    (3i64..5000)
        .prop_map(|d| -d)
        .prop_filter("discriminant", |d| d.rem_euclid(4) <= 1)
        .prop_flat_map(|d| {
            let forms = brute_reduced(d);
            (0..forms.len()).prop_map(move |i| forms[i])
        })
}

proptest! {
    #[test]
    fn reduction_inverts_sl2_action(g in reduced_form(), m in sl2(), m2 in sl2()) {
        let moved = act(act(g, m), m2);
        prop_assert_eq!(triple(&form(moved).reduce()), g);
        prop_assert_eq!(form(moved).discriminant(), form(g).discriminant());
        let once = form(moved).reduce();
        prop_assert_eq!(once.reduce(), once);
    }

    #[test]
    fn composition_is_class_invariant(f in reduced_form(), m in sl2(), m2 in sl2()) {
        let delta = form(f).discriminant().to_i64().unwrap();
        let forms = brute_reduced(delta);
        let g = forms[forms.len() / 2];
        let direct = form(f).compose(&form(g)).unwrap();
        let moved = form(act(f, m)).compose(&form(act(g, m2))).unwrap();
        prop_assert_eq!(direct, moved);
    }

    #[test]
    fn identity_and_inverse(f in reduced_form(), m in sl2()) {
        let f = form(act(f, m));
        let id = QuadForm::principal(&f.discriminant()).unwrap();
        prop_assert_eq!(f.compose(&id).unwrap(), f.reduce());
        prop_assert_eq!(f.compose(&f.inverse()).unwrap(), id);
    }

    #[test]
    fn power_laws(f in reduced_form(), m in 0u64..40, k in 0u64..40) {
        let f = form(f);
        let lhs = f.power(m + k);
        let rhs = f.power(m).compose(&f.power(k)).unwrap();
        prop_assert_eq!(lhs, rhs);
        let mut acc = QuadForm::principal(&f.discriminant()).unwrap();
        for _ in 0..m {
            acc = acc.compose(&f).unwrap();
        }
        prop_assert_eq!(f.power(m), acc);
    }
}
