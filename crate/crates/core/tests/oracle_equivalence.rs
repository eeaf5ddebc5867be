use involution_occ::exact::{average_exact, s2_exact, sum_mk_exact, vector_count};
use involution_occ::experiments::Bijection;
use involution_occ::oracle::oracle_report;
use involution_occ::Involution;
use num_bigint::BigInt;

fn conjugate(psi: &Involution, sigma: &Bijection) -> Involution {
    let m = psi.m();
    let mut inv = vec![0; m];
    for y in 0..m {
        inv[sigma.apply(y)] = y;
    }
    let map = (0..m).map(|y| sigma.apply(psi.apply(inv[y]))).collect();
    Involution::validate(m, map).unwrap()
}

#[test]
fn closed_forms_match_enumeration() {
    for m in [2usize, 4, 6, 8] {
        for f in (0..=m).step_by(2) {
            let psi = Involution::canonical(m, f).unwrap();
            let report = oracle_report(&psi, m).unwrap();
            assert_eq!(BigInt::from(report.total_vectors), vector_count(m));
            assert!(report.check_totals());
            for row in &report.per_k {
                assert_eq!(sum_mk_exact(m, f, row.k).unwrap(), BigInt::from(row.sum_mk), "m={m} f={f} k={}", row.k);
                assert_eq!(s2_exact(m, f, row.k).unwrap(), BigInt::from(row.sum_mk_sq), "m={m} f={f} k={}", row.k);
            }
        }
    }
}

#[test]
fn statistics_depend_only_on_fixed_count() {
    for f in [0usize, 2, 4, 6] {
        let canonical = oracle_report(&Involution::canonical(6, f).unwrap(), 6).unwrap();
        for seed in 0..5 {
            let psi = conjugate(&Involution::canonical(6, f).unwrap(), &Bijection::random(6, seed));
            assert_eq!(psi.fixed_count(), f);
            let report = oracle_report(&psi, 6).unwrap();
            assert_eq!(report.per_k, canonical.per_k, "f={f} seed={seed}");
        }
    }
}

#[test]
fn average_is_normalized_sum() {
    let psi = Involution::canonical(6, 2).unwrap();
    let report = oracle_report(&psi, 6).unwrap();
    for row in &report.per_k {
        let a = average_exact(6, 2, row.k).unwrap();
        let want = num_rational::BigRational::new(BigInt::from(row.sum_mk), BigInt::from(report.total_vectors * 6));
        assert_eq!(a, want);
    }
}
