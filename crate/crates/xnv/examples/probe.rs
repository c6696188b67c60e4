//! Temporary: per-gamma test error for SSSL_M vs KRR on one split.

use ndarray::{Array1, Array2, ArrayView2};
use rand::prelude::*;
use rand_chacha::ChaCha20Rng;
use xnv::{evaluate, fit_krr, fit_sssl_m, make_split, synth_rkhs, KernelSpec, Task};

fn select_rows(x: ArrayView2<'_, f64>, rows: &[usize]) -> Array2<f64> {
    let mut out = Array2::zeros((rows.len(), x.ncols()));
    for (i, &r) in rows.iter().enumerate() {
        out.row_mut(i).assign(&x.row(r));
    }
    out
}

fn main() {
    let sigma = 0.15;
    let spec = KernelSpec::new(sigma).unwrap();
    let data = synth_rkhs(spec, 2000, 10, 50, 0.1, 424242).unwrap();
    let plan = make_split(2000, 100, 0.2, 1001).unwrap();
    let pool = plan.pool();
    let x_pool = select_rows(data.dataset.x.view(), &pool);
    let y_l = Array1::from_shape_fn(plan.labeled.len(), |i| data.dataset.y[plan.labeled[i]]);
    let x_test = select_rows(data.dataset.x.view(), &plan.test);
    let y_test = Array1::from_shape_fn(plan.test.len(), |i| data.dataset.y[plan.test[i]]);
    let labeled: Vec<usize> = (0..plan.labeled.len()).collect();
    let x_l = select_rows(x_pool.view(), &labeled);

    println!("gamma     sssl_m50   sssl_m200  krr");
    for gamma in [1e-6, 1e-5, 1e-4, 1e-3, 1e-2, 1e-1, 1.0] {
        let mut rng = ChaCha20Rng::seed_from_u64(5);
        let sssl50 = fit_sssl_m(spec, x_pool.view(), &labeled, y_l.view(), 50, gamma, &mut rng, true)
            .unwrap().predict(x_test.view()).unwrap();
        let mut rng = ChaCha20Rng::seed_from_u64(5);
        let sssl200 = fit_sssl_m(spec, x_pool.view(), &labeled, y_l.view(), 200, gamma, &mut rng, true)
            .unwrap().predict(x_test.view()).unwrap();
        let krr = fit_krr(spec, x_l.view(), y_l.view(), gamma, true)
            .unwrap().predict(x_test.view()).unwrap();
        println!(
            "{:8.0e}  {:9.4}  {:9.4}  {:9.4}",
            gamma,
            evaluate(sssl50.view(), y_test.view(), Task::Regression).unwrap(),
            evaluate(sssl200.view(), y_test.view(), Task::Regression).unwrap(),
            evaluate(krr.view(), y_test.view(), Task::Regression).unwrap(),
        );
    }
}
