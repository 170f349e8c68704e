use boxdelta::exact_states::{self, Family};
use boxdelta::stability::{
    bdg_spectrum, coalescence_gamma, instability_thresholds, BdgOptions, Classification, CoalescencePolicy,
};

fn opts(basis_size: usize) -> BdgOptions {
    BdgOptions {
        basis_size,
        ..Default::default()
    }
}

#[test]
fn symmetric_ground_state_threshold_at_gamma_10() {
    let t = instability_thresholds(Family::SymAtt, 10.0, -0.5, -4.0, 0.25, 1, &opts(6), 0.01).unwrap();
    assert_eq!(t.len(), 1, "{t:?}");
    assert!((t[0].eta_n + 2.07).abs() < 0.05, "{t:?}");
    assert_eq!(t[0].after, Classification::NonOscillatoryUnstable);
}

#[test]
fn symmetric_repulsive_ground_state_stays_stable() {
    let t = instability_thresholds(Family::SymRep, 10.0, 0.5, 20.0, 0.5, 1, &opts(6), 0.05).unwrap();
    assert!(t.is_empty(), "{t:?}");
}

#[test]
fn antisymmetric_threshold_at_gamma_10() {
    let t = instability_thresholds(Family::AntisymRep, 10.0, 0.5, 5.0, 0.25, 1, &opts(6), 0.01).unwrap();
    assert_eq!(t.len(), 1, "{t:?}");
    assert!((t[0].eta_n - 2.34).abs() < 0.05, "{t:?}");
}

#[test]
fn antisymmetric_onsets_at_gamma_1() {
    let att = instability_thresholds(Family::AntisymAtt, 1.0, -1.0, -10.0, 0.5, 1, &opts(12), 0.05).unwrap();
    eprintln!("{att:?}");
    assert_eq!(att[0].after, Classification::OscillatoryUnstable);
    assert!((att[0].eta_n + 7.6).abs() < 0.3);
    let rep = instability_thresholds(Family::AntisymRep, 1.0, 1.0, 16.0, 0.5, 1, &opts(12), 0.05).unwrap();
    eprintln!("{rep:?}");
    assert_eq!(rep[0].after, Classification::NonOscillatoryUnstable);
    assert!((rep[0].eta_n - 13.5).abs() < 0.5);
    let s = exact_states::solve_antisym_attractive(1.0, att[0].eta_n - 0.05, 1).unwrap();
    let f = bdg_spectrum(&s, 12).unwrap().frequencies();
    eprintln!("{:?}", &f[..3]);
    assert!((f[0].re.abs() - 10.4).abs() < 0.3);
}

#[test]
fn coalescence_barrier_strength() {
    let t = std::time::Instant::now();
    let g = coalescence_gamma(&CoalescencePolicy::default()).unwrap();
    eprintln!("gamma* = {g} in {:?}", t.elapsed());
    assert!((g - 5.94).abs() < 0.1);
}
