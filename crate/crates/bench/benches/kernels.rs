use std::f64::consts::{FRAC_PI_2, PI};

use becreg_core::atomdata::{AtomSpecies, InternalState};
use becreg_core::couplings::ho_mode_couplings;
use becreg_core::gates::{josephson_meanfield, sample_times, MeanFieldState, TwoModeParams};
use becreg_core::hubbard::{build_hamiltonian, sqrtswap_effective, Drives, FockBasis, Propagator};
use becreg_core::modes::{solve_thomas_fermi, solve_wannier};
use becreg_core::noise::{loss_probability, LossMode};
use becreg_core::optics::{Axis, TrapConfig};
use criterion::{black_box, criterion_group, criterion_main, Criterion};

const TWO_PI: f64 = 2.0 * PI;

fn loss(c: &mut Criterion) {
    c.bench_function("loss_probability N=7e5 m=1000", |b| {
        b.iter(|| loss_probability(black_box(700_000), black_box(1000), black_box(700), LossMode::Full).unwrap())
    });
}

fn fock(c: &mut Criterion) {
    let u = [[0.05; 3], [0.05, 1000.0, 0.05], [0.05; 3]];
    let drives = Drives::single_site(2.0, 2.0, 0.0, 999.95);
    let basis = FockBasis::new(20, 2, 1).unwrap();
    c.bench_function("build_hamiltonian two-site N=20", |b| {
        b.iter(|| build_hamiltonian(black_box(&basis), &u, &drives).unwrap())
    });
    let h = build_hamiltonian(&basis, &u, &drives).unwrap();
    c.bench_function("propagator two-site N=20", |b| b.iter(|| Propagator::new(black_box(&h.matrix)).unwrap()));
}

fn meanfield(c: &mut Criterion) {
    let p = TwoModeParams { j: -113.0, lambda: 1e-3, bias: 0.0 };
    let init = MeanFieldState::new(-0.6, FRAC_PI_2);
    let times = sample_times(0.03, 2000);
    c.bench_function("josephson_meanfield 2000 samples", |b| {
        b.iter(|| josephson_meanfield(black_box(&p), init, &times).unwrap())
    });
}

fn modes(c: &mut Criterion) {
    let trap = TrapConfig::reference();
    let spec = trap.lattice_spec(Axis::X, &InternalState::ket1()).unwrap();
    let rb = AtomSpecies::rubidium87();
    c.bench_function("solve_wannier reference lattice", |b| {
        b.iter(|| solve_wannier(black_box(spec.depth), spec.k_eff, rb.mass).unwrap())
    });

    let w = solve_wannier(spec.depth, spec.k_eff, rb.mass).unwrap();
    let omega = TWO_PI * 100.0;
    let tf = solve_thomas_fermi(7e5, &rb, 0, omega).unwrap();
    let s = [4.5 * w.spacing; 3];
    let sites = [s, s.map(|x| -x)];
    let cutoff = 200;
    let table = ho_mode_couplings(&w, sites, TWO_PI * 11.2e3, omega, rb.mass, cutoff, &tf, rb.contact_coupling(0, 2)).unwrap();
    let mut group = c.benchmark_group("mode sum");
    group.sample_size(10);
    group.bench_function("ho_mode_couplings Q=200", |b| {
        b.iter(|| ho_mode_couplings(&w, black_box(sites), TWO_PI * 11.2e3, omega, rb.mass, cutoff, &tf, rb.contact_coupling(0, 2)).unwrap())
    });
    group.bench_function("sqrtswap_effective Q=200", |b| {
        b.iter(|| sqrtswap_effective(black_box(&table), 17288.0, 17288.0, cutoff).unwrap())
    });
    group.finish();
}

criterion_group!(kernels, loss, fock, meanfield, modes);
criterion_main!(kernels);
