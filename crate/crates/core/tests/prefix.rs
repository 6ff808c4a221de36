use edrvfl::dataset::synthetic::gaussian_blobs;
use edrvfl::network::{predict, predict_prefix, train};
use edrvfl::{Dataset, Error, HyperParams};

fn setup() -> (Dataset, ndarray::Array2<f64>) {
    let s = gaussian_blobs(120, 5, 3, 1.2, 21);
    let test = gaussian_blobs(60, 5, 3, 1.2, 22).features;
    (Dataset::fit(&s), test)
}

fn variants() -> Vec<HyperParams> {
    let base = HyperParams { n: 15, l_max: 10, seed: 9, ..Default::default() };
    vec![
        base.clone(),
        HyperParams { omega_r: 0.6, ..base.clone() },
        HyperParams { p: 0.3, ..base.clone() },
        HyperParams { omega_r: 0.6, p: 0.3, ..base },
    ]
}

#[test]
fn prefix_equals_shallower_training() {
    let (ds, test) = setup();
    for hp in variants() {
        let deep = train(&ds, &hp).unwrap().model;
        for depth in [1, 3, 5, 9] {
            let shallow = train(&ds, &HyperParams { l_max: depth, ..hp.clone() }).unwrap().model;
            let (want, _) = predict(&shallow, test.view()).unwrap();
            assert_eq!(predict_prefix(&deep, test.view(), depth).unwrap(), want, "depth {depth}, {hp:?}");
            for (a, b) in deep.layers.iter().zip(&shallow.layers) {
                assert_eq!(a, b);
            }
        }
    }
}

#[test]
fn prefix_ignores_deeper_layers() {
    let (ds, test) = setup();
    let hp = &variants()[3];
    let mut model = train(&ds, hp).unwrap().model;
    let before = predict_prefix(&model, test.view(), 5).unwrap();
    for layer in &mut model.layers[5..] {
        layer.beta.mapv_inplace(|v| -3.0 * v + 1.0);
        layer.w.mapv_inplace(|v| v * 7.0);
    }
    assert_eq!(predict_prefix(&model, test.view(), 5).unwrap(), before);
    let (full, _) = predict(&model, test.view()).unwrap();
    assert_eq!(predict_prefix(&model, test.view(), 10).unwrap(), full);
}

#[test]
fn prefix_depth_bounds() {
    let (ds, test) = setup();
    let model = train(&ds, &HyperParams { n: 8, l_max: 4, ..Default::default() }).unwrap().model;
    assert!(matches!(
        predict_prefix(&model, test.view(), 0),
        Err(Error::DepthOutOfRange { depth: 0, layers: 4 })
    ));
    assert!(matches!(predict_prefix(&model, test.view(), 5), Err(Error::DepthOutOfRange { .. })));
}
