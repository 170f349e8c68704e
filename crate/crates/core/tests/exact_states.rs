use boxdelta::exact_states::{self, bifurcation, ExactState, Family};

fn assert_close(got: f64, want: f64, tol: f64, what: &str) {
    assert!((got - want).abs() < tol, "{what}: got {got}, want {want}");
}

/// Five-point second derivative: checks the stationary equation
/// `-psi'' + etaN psi^3 = mu psi` independently of the closed forms.
fn gpe_residual(state: &ExactState) -> f64 {
    let s = state.sampler().unwrap();
    let h = 1e-3;
    let mut worst: f64 = 0.0;
    let mut scale: f64 = 0.0;
    for i in 0..200 {
        let x = -1.0 + (i as f64 + 0.5) / 100.0;
        if x.abs() < 3.0 * h || 1.0 - x.abs() < 3.0 * h {
            continue;
        }
        let f = |t: f64| s.eval(t);
        let d2 = (-f(x + 2.0 * h) + 16.0 * f(x + h) - 30.0 * f(x) + 16.0 * f(x - h) - f(x - 2.0 * h)) / (12.0 * h * h);
        let psi = f(x);
        worst = worst.max((-d2 + state.eta_n * psi.powi(3) - state.mu * psi).abs());
        scale = scale.max((state.mu * psi).abs());
    }
    worst / scale
}

#[test]
fn antisymmetric_repulsive_reference_values() {
    let s = exact_states::solve_antisym_repulsive(10.0, 10.0, 1).unwrap();
    assert_close(s.left.m, 0.3793868, 1e-6, "m");
    assert_close(s.mu, 17.15897, 1e-4, "mu");
    assert_eq!(s.node_count, 1);
    let s2 = exact_states::solve_antisym_repulsive(10.0, 10.0, 2).unwrap();
    assert_close(s2.left.m, 0.1172277, 1e-6, "m");
    assert_close(s2.mu, 46.92088, 1e-4, "mu");
    assert_eq!(s2.node_count, 3);
    assert_eq!(s.eval(0.0), 0.0);
}

#[test]
fn symmetric_reference_values() {
    let r1 = exact_states::solve_sym_repulsive(10.0, 10.0, 1).unwrap();
    assert_close(r1.left.k, 3.0672543, 1e-6, "k");
    assert_close(r1.left.m, 0.4332271, 1e-6, "m");
    assert_close(r1.mu, 13.48387, 1e-4, "mu");
    let r2 = exact_states::solve_sym_repulsive(10.0, 10.0, 2).unwrap();
    assert_close(r2.left.k, 5.6802245, 1e-6, "k");
    assert_close(r2.mu, 36.76977, 1e-4, "mu");
    let a1 = exact_states::solve_sym_attractive(10.0, -10.0, 1).unwrap();
    assert_close(a1.left.k, 3.0845961, 1e-6, "k");
    assert_close(a1.left.m, 0.4901740, 1e-6, "m");
    assert_close(a1.mu, 0.186984, 1e-5, "mu");
    let a2 = exact_states::solve_sym_attractive(10.0, -10.0, 2).unwrap();
    assert_close(a2.left.k, 5.6509511, 1e-6, "k");
    assert_close(a2.mu, 22.60249, 1e-4, "mu");
    for s in [&r1, &r2, &a1, &a2] {
        assert!(s.max_residual() < 1e-10, "{:?}", s.residuals());
        assert!(gpe_residual(s) < 1e-6, "{}", gpe_residual(s));
    }
}

#[test]
fn thresholds_at_gamma_10() {
    let att = bifurcation(Family::SymAtt, 10.0, 1).unwrap();
    assert_close(att.eta_n, -2.073699, 1e-5, "attractive threshold");
    let rep = bifurcation(Family::AntisymRep, 10.0, 1).unwrap();
    assert_close(rep.eta_n, 2.338863, 1e-5, "repulsive threshold");
}

#[test]
fn asymmetric_attractive_reference_values() {
    let s = exact_states::solve_asym_attractive(10.0, -6.0, None).unwrap();
    eprintln!("{s:?}");
    assert_close(s.mu, -0.1057, 1e-3, "mu");
    assert_close(s.left.k, 3.40438, 1e-4, "kL");
    assert_close(s.right.k, 1.03808, 1e-4, "kR");
    assert!(s.max_residual() < 1e-10);
    assert!(gpe_residual(&s) < 1e-6);
}

#[test]
fn asymmetric_repulsive_reference_values() {
    let s = exact_states::solve_asym_repulsive(10.0, 10.0, None).unwrap();
    eprintln!("{s:?}");
    assert_close(s.mu, 20.662, 1e-3, "mu");
    assert!(s.max_residual() < 1e-10);
    assert!(gpe_residual(&s) < 1e-6);
}
