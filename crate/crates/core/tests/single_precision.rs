use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use sgdg::inference::{run_chain, ChainConfig, PriorSpec};
use sgdg::linalg::{CholFactor, Matrix, UnitUpper};
use sgdg::sgdg::{mean_vector, reparam_forward, reparam_inverse, sample_sgdg, sgdg_log_density};
use sgdg::{Graph, SgdgParams32, SgdgParams64};

fn chain<T: sgdg::Scalar>() -> sgdg::sgdg::SgdgParams<T> {
    let g = Graph::chain(3).unwrap();
    let mut l = UnitUpper::on_graph(&g);
    l.set(0, 1, T::lit(-0.5)).unwrap();
    l.set(1, 2, T::lit(0.7)).unwrap();
    let f = CholFactor::new(l, vec![T::lit(1.0), T::lit(2.0), T::lit(0.5)]).unwrap();
    sgdg::sgdg::SgdgParams::new(
        vec![T::lit(0.3), T::lit(-1.0), T::lit(2.0)],
        f,
        vec![T::lit(1.5), T::lit(-2.0), T::lit(0.5)],
        g,
    )
    .unwrap()
}

#[test]
fn f32_density_tracks_f64() {
    let (a, b): (SgdgParams32, SgdgParams64) = (chain(), chain());
    for x in [[0.0, 0.0, 0.0], [1.0, -2.0, 2.5], [-1.5, 0.5, 3.0]] {
        let xf: Vec<f32> = x.iter().map(|&v| v as f32).collect();
        let lf = sgdg_log_density(&a, &xf) as f64;
        let ld = sgdg_log_density(&b, &x);
        assert!((lf - ld).abs() < 1e-4 * (1.0 + ld.abs()), "{lf} vs {ld}");
    }
    let back = reparam_inverse(&reparam_forward(&a)).unwrap();
    for (p, q) in a.alpha().iter().zip(back.alpha()) {
        assert!((p - q).abs() < 1e-5);
    }
}

#[test]
fn f32_sampler_and_chain_run() {
    let p: SgdgParams32 = chain();
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    let draws = sample_sgdg(&p, &mut rng, 50_000);
    let m = mean_vector(&p);
    for i in 0..3 {
        let mc = draws.iter().map(|x| x[i] as f64).sum::<f64>() / draws.len() as f64;
        assert!((mc - m[i] as f64).abs() < 0.05, "{mc} vs {}", m[i]);
    }
    let data = Matrix::from_fn(200, 3, |j, i| draws[j][i]);
    let t = run_chain(&data, p.graph(), &PriorSpec::<f32>::noninformative(), &ChainConfig::new(2000, 4)).unwrap();
    assert!(t.draws.iter().all(|d| d.omega2.iter().all(|w| w.is_finite() && *w > 0.0)));
    let l12 = t.draws.iter().map(|d| d.l.get(0, 1) as f64).sum::<f64>() / t.len() as f64;
    assert!((l12 + 0.5).abs() < 0.3, "{l12}");
}
