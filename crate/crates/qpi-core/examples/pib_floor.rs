use qpi_core::loss::{LossKind, LossSpec, SampleBatch};
use qpi_core::metrics::eval_grid_1d;
use qpi_core::potential::ClosedForm1D;
use qpi_core::{Jet3, SystemSpec};

fn main() {
    let spec = SystemSpec::particle_in_box(1).unwrap();
    let pib = spec.pib().unwrap();
    let xs = eval_grid_1d(&spec, 256);
    let mut batch = SampleBatch::new(1);
    for &x in &xs {
        batch.push(&[x]);
    }
    let wave = {
        let p = pib.clone();
        ClosedForm1D(move |x| p.psi_jet(x))
    };
    let pot = ClosedForm1D(|x| Jet3::new(10.0 * x * x, 20.0 * x, 20.0, 0.0));
    let loss = LossSpec::new(LossKind::SupervisedPib);
    let v = qpi_core::loss::supervised_pib_loss(&pot, &wave, &spec, &batch, &loss).unwrap();
    println!(
        "grid-256 box oracle loss = {v:.10e} over {} pts",
        batch.len()
    );
}
