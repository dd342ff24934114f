use nalgebra::{dmatrix, DMatrix, DVector};
use sourcebf::simulator::*;
use sourcebf::stats::{MeanVector, RngStream, SpdMatrix};

#[test]
fn group_means_have_between_plus_within_over_m_covariance() {
    let params = TrueParams::new(
        MeanVector::zeros(2),
        SpdMatrix::identity(2),
        MeanVector::from_slice(&[1.0, 2.0]).unwrap(),
        SpdMatrix::new(dmatrix![1.0, 0.4; 0.4, 0.7]).unwrap(),
        SpdMatrix::new(dmatrix![0.5, 0.1; 0.1, 0.3]).unwrap(),
    )
    .unwrap();
    let design = DesignSpec {
        sources: 500,
        ..DesignSpec::default()
    };
    // 4000 groups in all: the sampling sd of each entry is under 3% of its value.
    let means: Vec<DVector<f64>> = (0..8)
        .flat_map(|stream| {
            let e = simulate_evidence(&params, &design, &mut RngStream::new(99, stream)).unwrap();
            e.alternative_features()
                .iter()
                .map(|g| g.iter().fold(DVector::zeros(2), |a, y| a + y.as_vector()) / g.len() as f64)
                .collect::<Vec<_>>()
        })
        .collect();
    let n = means.len() as f64;
    let grand = means.iter().fold(DVector::zeros(2), |a, m| a + m) / n;
    let cov = means
        .iter()
        .fold(DMatrix::zeros(2, 2), |a, m| a + (m - &grand) * (m - &grand).transpose())
        / (n - 1.0);
    let target = params.sigma_b.matrix() + params.sigma_w.matrix() / 5.0;
    for (i, j) in [(0, 0), (1, 1), (1, 0)] {
        let tol = 0.1 * target[(i, j)].abs().max(0.1 * target[(i, i)]);
        assert!((cov[(i, j)] - target[(i, j)]).abs() < tol, "({i},{j}): {} vs {}", cov[(i, j)], target[(i, j)]);
    }
}

#[test]
fn study_rows_are_sorted_complete_and_reproducible() {
    let mcmc = sourcebf::samplers::McmcSettings {
        iterations: 1_500,
        burn_in: 300,
        ..study_default_mcmc()
    };
    let run = || convergence_study(&TrueParams::study_default(), &DesignSpec::default(), &[5, 12], 3, &mcmc, 11).unwrap();
    let rows = run();
    assert_eq!(rows.len(), 6);
    let keys: Vec<(usize, usize)> = rows.iter().map(|r| (r.n, r.replicate)).collect();
    assert_eq!(keys, vec![(5, 0), (5, 1), (5, 2), (12, 0), (12, 1), (12, 2)]);
    assert!(rows.iter().all(|r| r.gap >= 0.0 && r.gap == (r.log_v_full - r.log_v_plugin).abs()));
    assert_eq!(rows, run());
    let mut csv = Vec::new();
    write_convergence_csv(&rows, &mut csv).unwrap();
    let text = String::from_utf8(csv).unwrap();
    assert!(text.starts_with("n,replicate,log_v_full,log_v_plugin,gap\n"));
    assert_eq!(text.lines().count(), 7);
}

#[test]
fn evidence_favours_prosecution_under_m_p() {
    let mcmc = sourcebf::samplers::McmcSettings {
        iterations: 3_000,
        burn_in: 500,
        ..study_default_mcmc()
    };
    let rows = convergence_study(&TrueParams::study_default(), &DesignSpec::default(), &[20], 21, &mcmc, 5).unwrap();
    let mut logs: Vec<f64> = rows.iter().map(|r| r.log_v_full).collect();
    logs.sort_by(f64::total_cmp);
    assert!(logs[10] > 0.0, "median log V_full {}", logs[10]);
}
