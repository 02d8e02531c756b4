use mstnpi_core::engine::EngineState;
use mstnpi_core::model::*;
use std::time::Instant;

fn run(jz: f64, chi: f64) -> Vec<f64> {
    let model = SpinChainModel::ising(7, 1.0, jz).unwrap();
    let cfg = SimulationConfig {
        model, bath: None,
        dt: 0.25, n_steps: 40, memory: 1, cutoff: chi, max_dim: None,
        initial_state: InitialStateSpec::AllUp,
        observables: vec![Observable { site: 4, kind: SpinObservable::Sz }],
        renormalize: false, fock_levels: None,
    };
    let mut eng = EngineState::from_config(&cfg).unwrap();
    eng.run().unwrap();
    eng.records().iter().map(|r| r.values[0].re).collect()
}

fn main() {
    for chi in [1e-11f64, 1e-13] {
        let t0 = Instant::now();
        let p = run(0.8, chi);
        let m = run(-0.8, chi);
        let dev = p.iter().zip(&m).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max);
        println!("P=7 bare +-Jz chi={chi:.0e}: max dev {dev:.3e} ({:.0}s for both)", t0.elapsed().as_secs_f64());
    }
    // criterion 11 calibration: P=3 J=0 with bath vs P=1, chi=1e-14
    let bath = BathModel::ohmic(0.25, 5.0, 1.0).unwrap();
    let mk = |p: usize| SimulationConfig {
        model: SpinChainModel::new(p, 0.0, 1.0, 0.0, 0.0, 0.0).unwrap(),
        bath: Some(bath.clone()),
        dt: 0.25, n_steps: 6, memory: 3, cutoff: 1e-14, max_dim: None,
        initial_state: InitialStateSpec::AllUp,
        observables: vec![Observable { site: 1, kind: SpinObservable::Sz }],
        renormalize: false, fock_levels: None,
    };
    let mut e3 = EngineState::from_config(&mk(3)).unwrap();
    e3.run().unwrap();
    let mut e1 = EngineState::from_config(&mk(1)).unwrap();
    e1.run().unwrap();
    let dev = e3.records().iter().zip(e1.records())
        .map(|(a, b)| (a.values[0] - b.values[0]).norm()).fold(0.0f64, f64::max);
    let maxbond = e3.records().iter().map(|r| r.max_bond).max().unwrap();
    println!("C11 chi=1e-14: P=3 vs P=1 dev {dev:.3e}, max bond {maxbond}");
}
