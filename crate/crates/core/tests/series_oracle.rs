use kdvgrav::gelfand_dickey::GdTable;
use kdvgrav::genus::closed_form_series;
use kdvgrav::series::{check_kdv, check_puncture, reconstruct_df, solve_string};

#[test]
fn oracle_matches_closed_forms() {
    let mut table = GdTable::new();
    for genus in 0..=3 {
        for degree in [0, 3, 8] {
            let sol = solve_string(&mut table, &[0, 2], degree, genus).unwrap();
            let closed = closed_form_series(degree, genus, 2);
            assert_eq!(
                sol.u.first_mismatch(&closed).unwrap(),
                None,
                "G={genus} D={degree}"
            );
        }
    }
}

#[test]
fn flow_puncture_and_free_energy_matrix() {
    let mut table = GdTable::new();
    for vars in [&[0, 1][..], &[0, 2], &[0, 3], &[0, 1, 2]] {
        for (degree, genus) in [(4, 1), (5, 2)] {
            let sol = solve_string(&mut table, vars, degree, genus).unwrap();
            assert!(sol.residual_check(&table).unwrap().passed);
            for &n in vars {
                let c = check_kdv(&mut table, &sol, n).unwrap();
                assert!(c.passed, "{vars:?} D={degree} G={genus}: {c}");
            }
            let c = check_puncture(&mut table, &sol).unwrap();
            assert!(c.passed, "{vars:?}: {c}");
            let c = reconstruct_df(&mut table, &sol)
                .unwrap()
                .check(&sol)
                .unwrap();
            assert!(c.passed, "{vars:?}: {c}");
        }
    }
}
