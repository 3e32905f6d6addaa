use gerth_core::arith::factorize;
use gerth_core::fields::{enumerate_conductors, fields_for_conductor, local_character_eval, Conductor, ConductorStream};
use gerth_core::CubeRootValue;

/// `f = 9^a · l_1 ⋯ l_t` with `a ∈ {0, 1}` and distinct `l_i ≡ 1 (mod 3)`.
fn admissible_by_trial_division(f: u64) -> Option<Vec<u64>> {
    if f < 7 {
        return None;
    }
    let fac = factorize(f);
    fac.iter()
        .all(|&(p, e)| if p == 3 { e == 2 } else { p % 3 == 1 && e == 1 })
        .then(|| fac.iter().map(|&(p, _)| p).collect())
}

#[test]
fn stream_matches_trial_division_to_ten_thousand() {
    let expected: Vec<(u64, Vec<u64>)> =
        (1..=10_000).filter_map(|f| admissible_by_trial_division(f).map(|ps| (f, ps))).collect();
    let got: Vec<(u64, Vec<u64>)> =
        enumerate_conductors(10_000).map(|c| (c.value(), c.ramified_primes().to_vec())).collect();
    assert_eq!(got, expected);
}

#[test]
fn field_count_to_ten_thousand() {
    let by_formula: usize = (1..=10_000)
        .filter_map(admissible_by_trial_division)
        .map(|ps| 1usize << (ps.len() - 1))
        .sum();
    let enumerated: usize = enumerate_conductors(10_000).map(|c| fields_for_conductor(&c).len()).sum();
    assert_eq!(enumerated, by_formula);
    assert_eq!(enumerated, 1592);
}

#[test]
fn segments_join_cleanly() {
    let whole: Vec<u64> = ConductorStream::new(60_000, 200_000).map(|c| c.value()).collect();
    let mut pieces: Vec<u64> = ConductorStream::new(60_000, 131_071).map(|c| c.value()).collect();
    pieces.extend(ConductorStream::new(131_072, 200_000).map(|c| c.value()));
    assert_eq!(whole, pieces);
}

#[test]
fn small_conductors() {
    let v: Vec<u64> = enumerate_conductors(100).map(|c| c.value()).collect();
    assert_eq!(v, [7, 9, 13, 19, 31, 37, 43, 61, 63, 67, 73, 79, 91, 97]);
    assert!(Conductor::new(27).is_err());
    assert!(Conductor::new(21).is_err());
    assert!(Conductor::new(3).is_err());
}

#[test]
fn characters_are_cubic_and_multiplicative() {
    for c in enumerate_conductors(2_000) {
        for k in fields_for_conductor(&c) {
            for &l in c.ramified_primes() {
                let m = if l == 3 { 9 } else { l };
                for x in 1..m {
                    let vx = local_character_eval(&k, l, x).unwrap();
                    if x % l == 0 {
                        assert_eq!(vx, CubeRootValue::Zero);
                        continue;
                    }
                    assert_eq!(vx.pow(3), CubeRootValue::ONE);
                    let y = (x * 2) % m;
                    if y % l != 0 {
                        assert_eq!(local_character_eval(&k, l, y).unwrap(), vx * local_character_eval(&k, l, 2).unwrap());
                    }
                }
            }
        }
    }
}
