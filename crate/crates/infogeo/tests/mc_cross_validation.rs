//! Monte-Carlo vs jet-derivative cross-validation: the expectation form
//! of the Fisher metric and skewness tensor against the Hessian and third
//! derivative of the potential, within 4 standard errors at 10⁶ samples.

use infogeo::curvature::{fisher_metric, skewness_tensor};
use infogeo::mc::{fisher_metric_mc, skewness_tensor_mc};
use infogeo::models::{model_by_name, MODEL_NAMES};

const SAMPLES: usize = 1_000_000;
const POINTS: usize = 10;

#[test]
fn fisher_mc_within_four_standard_errors() {
    for name in MODEL_NAMES {
        let m = model_by_name(name).unwrap();
        // keep the heavyweight n = 9 model at fewer points; same contract
        let points = if m.dim >= 9 { 3 } else { POINTS };
        for (pi, theta) in m.sample_domain_points(points, 0xF1).iter().enumerate() {
            let exact = fisher_metric(&m, theta).unwrap();
            let mc = fisher_metric_mc(&m, theta, SAMPLES, 0xF2 + pi as u64).unwrap();
            for i in 0..m.dim {
                for j in 0..m.dim {
                    let err = (mc.estimate[(i, j)] - exact[(i, j)]).abs();
                    let se = mc.std_error[(i, j)].max(1e-12);
                    assert!(
                        err <= 4.0 * se,
                        "{name} g[{i}{j}] at point {pi}: {:.3} se",
                        err / se
                    );
                }
            }
        }
    }
}

#[test]
fn skewness_mc_within_four_standard_errors() {
    for name in MODEL_NAMES {
        let m = model_by_name(name).unwrap();
        let points = if m.dim >= 9 { 2 } else { POINTS };
        for (pi, theta) in m.sample_domain_points(points, 0xF3).iter().enumerate() {
            let exact = skewness_tensor(&m, theta).unwrap();
            let mc = skewness_tensor_mc(&m, theta, SAMPLES, 0xF4 + pi as u64).unwrap();
            for i in 0..m.dim {
                for j in 0..m.dim {
                    for k in 0..m.dim {
                        let err = (mc.estimate[(i, j, k)] - exact[(i, j, k)]).abs();
                        let se = mc.std_error[(i, j, k)].max(1e-12);
                        assert!(
                            err <= 4.0 * se,
                            "{name} T[{i}{j}{k}] at point {pi}: {:.3} se",
                            err / se
                        );
                    }
                }
            }
        }
    }
}

#[test]
fn normal1_standard_point_mc_targets() {
    // at (μ=0, σ=1) the metric is [[1,0],[0,2]]
    let m = model_by_name("normal-1").unwrap();
    let mc = fisher_metric_mc(&m, &[0.0, -0.5], SAMPLES, 0xF5).unwrap();
    let target = [[1.0, 0.0], [0.0, 2.0]];
    for i in 0..2 {
        for j in 0..2 {
            let err = (mc.estimate[(i, j)] - target[i][j]).abs();
            assert!(err <= 4.0 * mc.std_error[(i, j)].max(1e-12));
        }
    }
}

#[test]
fn mc_requires_a_sampler() {
    use infogeo::report::{resolve_model, ModelSpec};
    let spec = ModelSpec::Inline(infogeo::report::InlineModel {
        name: "quad".into(),
        dimension: 2,
        potential: "0.5*(t1*t1 + t2*t2)".into(),
        bounds: vec![],
        constraints: vec![],
        simply_connected: true,
        admits_kaehler: false,
        point_box: vec![],
    });
    let m = resolve_model(&spec).unwrap();
    assert!(matches!(
        fisher_metric_mc(&m, &[0.1, 0.2], 100, 1),
        Err(infogeo::Error::SamplerUnavailable(_))
    ));
}
