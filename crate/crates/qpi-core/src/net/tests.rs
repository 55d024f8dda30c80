use super::*;
use crate::rng::Rng;

fn random_net(seed: u64) -> Mlp {
    Mlp::init(MlpConfig::new(1), seed).unwrap()
}

fn random_net_2d(seed: u64) -> Mlp {
    Mlp::init(MlpConfig::new(2), seed).unwrap()
}

fn zero_net(config: MlpConfig) -> Mlp {
    let n = config.n_params();
    Mlp {
        config,
        params: vec![0.0; n],
    }
}

#[test]
fn zero_weights_with_sigmoid_scale() {
    let mut cfg = MlpConfig::new(1);
    cfg.final_activation = FinalActivation::Sigmoid;
    cfg.final_scale = Some(12.5);
    let net = zero_net(cfg);
    for &x in &[-4.0, 0.0, 3.3] {
        assert_eq!(net.forward(&[x]).unwrap(), 6.25);
    }
}

#[test]
fn zero_weights_without_activation() {
    let net = zero_net(MlpConfig::new(1));
    assert_eq!(net.forward(&[1.7]).unwrap(), 0.0);
    let net2 = zero_net(MlpConfig::new(2));
    let d = net2
        .forward_dual2(Dual2D::var_x(0.3), Dual2D::var_y(0.8))
        .unwrap();
    assert_eq!((d.v, d.dx, d.dy), (0.0, 0.0, 0.0));
}

#[test]
fn forward_matches_jet_value() {
    let net = random_net(7);
    let mut rng = Rng::new(8);
    for _ in 0..20 {
        let x = rng.range(-3.0, 3.0);
        let f = net.forward(&[x]).unwrap();
        let j = net.forward_jet(Jet3::variable(x)).unwrap();
        assert!((f - j.c0).abs() <= 1e-14);
    }
}

#[test]
fn shape_mismatch_is_rejected() {
    let net = random_net(1);
    assert!(net.forward(&[0.1, 0.2]).is_err());
    assert!(net
        .forward_dual2(Dual2D::var_x(0.0), Dual2D::var_y(0.0))
        .is_err());
    let net2 = random_net_2d(1);
    assert!(net2.forward_jet(Jet3::variable(0.0)).is_err());
}

#[test]
fn jet_derivatives_match_finite_differences() {
    let mut rng = Rng::new(21);
    for trial in 0..50 {
        let net = random_net(1000 + trial);
        let x = rng.range(-2.0, 2.0);
        let j = net.forward_jet(Jet3::variable(x)).unwrap();
        let f = |x: f64| net.forward(&[x]).unwrap();

        let h = 1e-4;
        let d1 = (f(x + h) - f(x - h)) / (2.0 * h);
        assert!(
            (j.c1 - d1).abs() / d1.abs().max(1e-3) < 1e-6,
            "c1 {} vs {}",
            j.c1,
            d1
        );

        let h = 1e-3;
        let d2 = (f(x + h) - 2.0 * f(x) + f(x - h)) / (h * h);
        assert!(
            (j.c2 - d2).abs() / d2.abs().max(1e-2) < 1e-5,
            "c2 {} vs {}",
            j.c2,
            d2
        );

        let h = 1e-2;
        let d3 =
            (f(x + 2.0 * h) - 2.0 * f(x + h) + 2.0 * f(x - h) - f(x - 2.0 * h)) / (2.0 * h * h * h);
        assert!(
            (j.c3 - d3).abs() / d3.abs().max(1e-1) < 1e-3,
            "c3 {} vs {}",
            j.c3,
            d3
        );
    }
}

#[test]
fn jet_output_truncates_at_fourth_order() {
    let net = random_net(42);
    let x = 0.31;
    let j = net.forward_jet(Jet3::variable(x)).unwrap();
    let err = |h: f64| (net.forward(&[x + h]).unwrap() - j.taylor_eval(h)).abs();
    let e1 = err(0.04);
    let e2 = err(0.02);
    assert!(e1 / e2 >= 15.0, "expected ~16x reduction, got {}", e1 / e2);
}

#[test]
fn dual2_gradient_matches_finite_differences() {
    let net = random_net_2d(5);
    let mut rng = Rng::new(6);
    for _ in 0..20 {
        let (x, y) = (rng.range(-1.0, 1.0), rng.range(-1.0, 1.0));
        let d = net
            .forward_dual2(Dual2D::var_x(x), Dual2D::var_y(y))
            .unwrap();
        let h = 1e-5;
        let fx =
            (net.forward(&[x + h, y]).unwrap() - net.forward(&[x - h, y]).unwrap()) / (2.0 * h);
        let fy =
            (net.forward(&[x, y + h]).unwrap() - net.forward(&[x, y - h]).unwrap()) / (2.0 * h);
        assert!((d.dx - fx).abs() / fx.abs().max(1e-3) < 1e-6);
        assert!((d.dy - fy).abs() / fy.abs().max(1e-3) < 1e-6);
    }
}

#[test]
fn input_symmetric_weights_give_symmetric_gradient() {
    let mut net = random_net_2d(9);
    // Make the first layer treat both inputs identically.
    for i in 0..HIDDEN[0] {
        net.params[2 * i + 1] = net.params[2 * i];
    }
    for &a in &[0.0, 0.4, -0.9] {
        let d = net
            .forward_dual2(Dual2D::var_x(a), Dual2D::var_y(a))
            .unwrap();
        assert!((d.dx - d.dy).abs() < 1e-14);
    }
}

fn directional_check<T: JetScalar>(
    net: &Mlp,
    eval: impl Fn(&Mlp) -> (f64, Vec<f64>),
    rng: &mut Rng,
    tol: f64,
) {
    let _ = std::marker::PhantomData::<T>;
    let (_, grad) = eval(net);
    let eps = 1e-5;
    for _ in 0..20 {
        let dir: Vec<f64> = (0..net.n_params()).map(|_| rng.range(-1.0, 1.0)).collect();
        let norm = dir.iter().map(|d| d * d).sum::<f64>().sqrt();
        let dir: Vec<f64> = dir.iter().map(|d| d / norm).collect();
        let mut plus = net.clone();
        let mut minus = net.clone();
        for (i, d) in dir.iter().enumerate() {
            plus.params[i] += eps * d;
            minus.params[i] -= eps * d;
        }
        let (lp, _) = eval(&plus);
        let (lm, _) = eval(&minus);
        let fd = (lp - lm) / (2.0 * eps);
        let gd: f64 = grad.iter().zip(dir.iter()).map(|(g, d)| g * d).sum();
        assert!(
            (fd - gd).abs() / fd.abs().max(1e-6) < tol,
            "directional derivative {fd} vs g.d {gd}"
        );
    }
}

#[test]
fn parameter_gradient_of_value_functional() {
    // L = U(x0)^2 through the scalar trace.
    let x0 = 0.6;
    let eval = |net: &Mlp| {
        let pb = net.traced_scalar(&[x0]).unwrap();
        let u = pb.output();
        let mut grad = vec![0.0; net.n_params()];
        pb.accumulate(2.0 * u, &mut grad);
        (u * u, grad)
    };
    let mut rng = Rng::new(33);
    directional_check::<f64>(&random_net(12), eval, &mut rng, 1e-5);
}

#[test]
fn parameter_gradient_of_derivative_functional() {
    // L = U'(x0)^2 exercises the adjoint of the jet's first-order slot.
    let x0 = -0.8;
    let eval = |net: &Mlp| {
        let pb = net.traced_jet(Jet3::variable(x0)).unwrap();
        let j = pb.output();
        let mut grad = vec![0.0; net.n_params()];
        pb.accumulate(Jet3::new(0.0, 2.0 * j.c1, 0.0, 0.0), &mut grad);
        (j.c1 * j.c1, grad)
    };
    let mut rng = Rng::new(34);
    directional_check::<Jet3>(&random_net(13), eval, &mut rng, 1e-5);
}

#[test]
fn parameter_gradient_of_third_derivative_functional() {
    let x0 = 0.2;
    let eval = |net: &Mlp| {
        let pb = net.traced_jet(Jet3::variable(x0)).unwrap();
        let j = pb.output();
        let mut grad = vec![0.0; net.n_params()];
        pb.accumulate(Jet3::new(0.0, 0.0, 0.0, 2.0 * j.c3), &mut grad);
        (j.c3 * j.c3, grad)
    };
    let mut rng = Rng::new(35);
    directional_check::<Jet3>(&random_net(14), eval, &mut rng, 1e-5);
}

#[test]
fn parameter_gradient_of_dual2_functional() {
    let (x0, y0) = (0.3, 0.7);
    let eval = |net: &Mlp| {
        let pb = net
            .traced_dual2(Dual2D::var_x(x0), Dual2D::var_y(y0))
            .unwrap();
        let d = pb.output();
        let mut grad = vec![0.0; net.n_params()];
        pb.accumulate(Dual2D::new(0.0, 2.0 * d.dx, 2.0 * d.dy), &mut grad);
        (d.dx * d.dx + d.dy * d.dy, grad)
    };
    let mut rng = Rng::new(36);
    directional_check::<Dual2D>(&random_net_2d(15), eval, &mut rng, 1e-5);
}

#[test]
fn bias_only_network_gradients() {
    // All weights zero, biases set: the output is a function of biases
    // alone; weight gradients must still match finite differences.
    let mut net = zero_net(MlpConfig::new(1));
    let off_b4 = net.n_params() - 1;
    net.params[off_b4] = 0.4; // final bias -> U = 0.4 everywhere
    let x0 = 0.9;
    let pb = net.traced_scalar(&[x0]).unwrap();
    let u = pb.output();
    assert_eq!(u, 0.4);
    let mut grad = vec![0.0; net.n_params()];
    pb.accumulate(2.0 * u, &mut grad);
    assert!(
        (grad[off_b4] - 2.0 * 0.4).abs() < 1e-14,
        "bias path must be live"
    );
    // Spots of the weight-path gradient against finite differences.
    let mut rng = Rng::new(77);
    let eps = 1e-6;
    for _ in 0..30 {
        let i = rng.below(net.n_params());
        let mut plus = net.clone();
        plus.params[i] += eps;
        let mut minus = net.clone();
        minus.params[i] -= eps;
        let fd = (plus.forward(&[x0]).unwrap().powi(2) - minus.forward(&[x0]).unwrap().powi(2))
            / (2.0 * eps);
        assert!(
            (grad[i] - fd).abs() < 1e-8,
            "param {i}: {} vs {fd}",
            grad[i]
        );
    }
}

#[test]
fn constant_functional_has_zero_gradient() {
    let net = random_net(50);
    let pb = net.traced_jet(Jet3::variable(0.1)).unwrap();
    let mut grad = vec![0.0; net.n_params()];
    pb.accumulate(Jet3::ZERO, &mut grad);
    assert!(grad.iter().all(|&g| g == 0.0));
}

#[test]
fn residual_skip_changes_outputs() {
    let with_skip = random_net(3);
    let mut without = with_skip.clone();
    without.config.residual_skip = false;
    let x = 0.5;
    let a = with_skip.forward(&[x]).unwrap();
    let b = without.forward(&[x]).unwrap();
    assert!(
        (a - b).abs() > 1e-6,
        "skip connection appears dead: {a} vs {b}"
    );
}

#[test]
fn initialization_is_deterministic() {
    let a = random_net(123);
    let b = random_net(123);
    assert_eq!(a.params, b.params);
    assert_eq!(
        a.forward(&[0.77]).unwrap().to_bits(),
        b.forward(&[0.77]).unwrap().to_bits()
    );
    let c = random_net(124);
    assert_ne!(a.params, c.params);
}

#[test]
fn initialization_respects_per_layer_bounds() {
    let net = random_net(5);
    let off = net.config.offsets();
    for l in 0..4 {
        let (fan_in, fan_out) = net.config.shapes()[l];
        let w_bound = (6.0 / (fan_in + fan_out) as f64).sqrt();
        for w in &net.params[off[2 * l]..off[2 * l] + fan_in * fan_out] {
            assert!(w.abs() <= w_bound);
        }
        let b_bound = 1.0 / (fan_in as f64).sqrt();
        let biases = &net.params[off[2 * l + 1]..off[2 * l + 1] + fan_out];
        assert!(biases.iter().all(|b| b.abs() <= b_bound));
        assert!(biases.iter().any(|&b| b != 0.0), "bias draws must be live");
    }
}

#[test]
fn checkpoint_round_trips_bit_exactly() {
    let mut cfg = MlpConfig::new(2);
    cfg.final_activation = FinalActivation::Sigmoid;
    cfg.final_scale = Some(10.0);
    let net = Mlp::init(cfg, 88).unwrap();
    let bytes = net.to_bytes();
    let back = Mlp::from_bytes(&bytes).unwrap();
    assert_eq!(net, back);
    assert_eq!(net.params_checksum(), back.params_checksum());
}

#[test]
fn checkpoint_rejects_corruption() {
    let net = random_net(1);
    let mut bytes = net.to_bytes();
    bytes[0] = b'X';
    assert!(Mlp::from_bytes(&bytes).is_err());
    let bytes = net.to_bytes();
    assert!(Mlp::from_bytes(&bytes[..bytes.len() - 9]).is_err());
    assert!(Mlp::from_bytes(&bytes[..20]).is_err());
}
