use num_bigint::BigUint;
use proptest::prelude::*;
use tspace_core::binom::{binom_mod_p, case_table, fines_app, prime_power, Case, DigitVector};

/// Pascal rows as exact big integers.
fn exact_rows(max: usize) -> Vec<Vec<BigUint>> {
    let mut rows: Vec<Vec<BigUint>> = vec![vec![BigUint::from(1u32)]];
    for m in 1..=max {
        let prev = &rows[m - 1];
        let mut row = vec![BigUint::from(1u32); m + 1];
        for n in 1..m {
            row[n] = &prev[n - 1] + &prev[n];
        }
        rows.push(row);
    }
    rows
}

#[test]
fn lucas_matches_exact_binomials() {
    let rows = exact_rows(300);
    let mut cases = 0u64;
    for p in [2u64, 3, 5, 7, 11] {
        let bp = BigUint::from(p);
        for (m, row) in rows.iter().enumerate() {
            for (n, c) in row.iter().enumerate() {
                let want: u64 = (c % &bp).try_into().unwrap();
                assert_eq!(binom_mod_p(m as u64, n as u64, p).unwrap(), want, "C({m},{n}) mod {p}");
                cases += 1;
            }
        }
    }
    assert!(cases > 226_000);
}

#[test]
fn fines_app_matches_full_binomial() {
    for q in [2u64, 3, 4, 5, 7, 8, 9] {
        let (p, _) = prime_power(q).unwrap();
        for t in 0..q {
            for r in 0..q {
                for j in 0..q {
                    for i in 0..q {
                        assert_eq!(
                            fines_app(t, r, j, i, q).unwrap(),
                            binom_mod_p(t * q + r, j * q + i, p).unwrap()
                        );
                    }
                }
            }
        }
    }
}

#[test]
fn closed_forms_match_on_every_admissible_input() {
    for q in [3u64, 4, 5, 7, 8, 9] {
        for case in Case::ALL {
            let rows = case_table(case, q).unwrap();
            let bad: Vec<_> = rows.iter().filter(|r| !r.matches()).collect();
            assert!(bad.is_empty(), "case {case}, q={q}: {bad:?}");
        }
        assert!(!case_table(Case::II, q).unwrap().is_empty());
    }
}

#[test]
fn sign_symmetry() {
    for p in [2u64, 3, 5, 7, 11, 13] {
        for r in 1..p {
            for t in 0..r {
                let sign = |k: u64| if k.is_multiple_of(2) { 1 } else { p - 1 };
                let lhs = sign(t + 1) * binom_mod_p(r, t + 1, p).unwrap() % p * (t + 1) % p;
                let lhs = (p - lhs) % p;
                let rhs = sign(t) * binom_mod_p(r, t, p).unwrap() % p * (r - t) % p;
                assert_eq!(lhs, rhs, "p={p} r={r} t={t}");
            }
        }
    }
}

proptest! {
    #[test]
    fn digits_reassemble(v in any::<u32>(), base in 2u64..40) {
        let d = DigitVector::new(v as u64, base);
        prop_assert!(d.digits.iter().all(|&x| x < base));
        prop_assert_eq!(d.value(), v as u64);
    }

    #[test]
    fn pascal_rule_mod_p(m in 1u64..5000, n in 1u64..5000, pi in 0usize..5) {
        let p = [2u64, 3, 5, 7, 11][pi];
        let lhs = binom_mod_p(m, n, p).unwrap();
        let rhs = (binom_mod_p(m - 1, n - 1, p).unwrap() + binom_mod_p(m - 1, n, p).unwrap()) % p;
        prop_assert_eq!(lhs, rhs);
    }
}
