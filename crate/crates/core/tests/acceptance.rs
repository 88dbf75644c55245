//! Acceptance suite: one line per criterion, nonzero exit if any fails.
//!
//! Run with `cargo test -p xpcomm --test acceptance`.

mod common;

use std::f64::consts::PI;
use std::process::ExitCode;

use num_complex::Complex64;
use proptest::strategy::{Strategy, ValueTree};
use proptest::test_runner::{Config, TestRunner};

use xpcomm::bench::{parse_bench, render_bench, BenchDocument, DESK_DEFAULT_BENCH};
use xpcomm::elements::{apply_axis_flip, lens_fourier_transform, run_pipeline, ElementPipeline, OpticalElement};
use xpcomm::interferometer::{phase_sweep, port_switch_check, run_interferometer, uniform_phases, InterferometerSpec};
use xpcomm::wigner::{negativity_metrics, wigner_compare, wigner_transform, WignerMap, WignerOptions};
use xpcomm::{gaussian_input, BenchParams, ComplexField, GridSpec};

struct Line {
    label: String,
    passed: bool,
}

struct Criterion {
    parts: Vec<(String, bool)>,
}

impl Criterion {
    fn new() -> Self {
        Criterion { parts: Vec::new() }
    }

    fn at_most(&mut self, what: &str, measured: f64, limit: f64) {
        self.parts
            .push((format!("{what} {measured:.3e} <= {limit:.0e}"), measured <= limit));
    }

    fn at_least(&mut self, what: &str, measured: f64, limit: f64) {
        self.parts
            .push((format!("{what} {measured:.6} >= {limit}"), measured >= limit));
    }

    fn holds(&mut self, what: String, ok: bool) {
        self.parts.push((what, ok));
    }

    fn finish(self, n: usize, title: &str) -> Line {
        let passed = self.parts.iter().all(|p| p.1);
        let details: Vec<String> = self
            .parts
            .iter()
            .map(|(d, ok)| if *ok { d.clone() } else { format!("{d} [FAILED]") })
            .collect();
        Line {
            label: format!("criterion {n} ({title}): {}", details.join("; ")),
            passed,
        }
    }
}

fn setup() -> (BenchParams, ComplexField) {
    let p = BenchParams::desk_default();
    let psi = gaussian_input(GridSpec::desk_default(), p.w).unwrap();
    (p, psi)
}

/// `(i C g(x)) psi` for a real profile `g`, times the fixed `-i` that the
/// momentum bench's lens pair contributes.
fn closed_form(psi: &ComplexField, c: f64, g: impl Fn(f64) -> f64) -> ComplexField {
    psi.map(|x, s| s * Complex64::new(0.0, c * g(x)) * Complex64::new(0.0, -1.0))
}

fn criterion_1() -> Line {
    let (p, psi) = setup();
    let c = p.dimensionless_c();
    let mut crit = Criterion::new();
    crit.at_most("|C - 0.028294|", (c - 0.028294).abs(), 1e-6);
    let out = run_interferometer(&psi, &InterferometerSpec::standard(&p, PI)).unwrap();
    crit.at_least("fidelity", out.d1.fidelity(&psi).unwrap(), 0.9999);
    let target = psi.scaled(Complex64::new(c / 2.0, 0.0));
    crit.at_most("L2 vs (C/2) psi", out.d1.relative_l2_up_to_phase(&target).unwrap(), 1e-3);
    crit.finish(1, "commutator identity")
}

fn criterion_2() -> Line {
    let (p, psi) = setup();
    let c = p.dimensionless_c();
    let w2 = p.w * p.w;
    let x = OpticalElement::PositionBench { l: p.l };
    let pb = OpticalElement::MomentumBench { lambda: p.lambda, f: p.f, l: p.l };
    // temporal order: x~ p~ applies the momentum bench first
    let xp = run_pipeline(&psi, &ElementPipeline::new(vec![pb.clone(), x.clone()])).unwrap().field;
    let px = run_pipeline(&psi, &ElementPipeline::new(vec![x, pb])).unwrap().field;
    let mut crit = Criterion::new();
    let xp_oracle = closed_form(&psi, c, |x| 2.0 * x * x / w2);
    let px_oracle = closed_form(&psi, c, |x| 2.0 * x * x / w2 - 1.0);
    crit.at_most("x~p~ L2", xp.relative_l2(&xp_oracle).unwrap(), 1e-4);
    crit.at_most("p~x~ L2", px.relative_l2(&px_oracle).unwrap(), 1e-4);
    let diff = xp.combine(Complex64::new(1.0, 0.0), &px, Complex64::new(-1.0, 0.0)).unwrap();
    crit.at_most("[x~,p~] L2", diff.relative_l2(&closed_form(&psi, c, |_| 1.0)).unwrap(), 1e-4);
    crit.finish(2, "operator closed forms")
}

fn local_extrema(v: &[f64], floor: f64) -> (Vec<usize>, Vec<usize>) {
    let mut maxima = Vec::new();
    let mut minima = Vec::new();
    for i in 1..v.len() - 1 {
        if v[i] > v[i - 1] && v[i] >= v[i + 1] && v[i] >= floor {
            maxima.push(i);
        }
        if v[i] < v[i - 1] && v[i] <= v[i + 1] {
            minima.push(i);
        }
    }
    (maxima, minima)
}

fn near(x: f64, target: f64, tol: f64) -> bool {
    (x - target).abs() <= tol
}

fn criterion_3() -> Line {
    let (p, psi) = setup();
    let g = *psi.grid();
    let dx = g.spacing();
    let out = run_interferometer(&psi, &InterferometerSpec::standard(&p, 0.0)).unwrap();
    let profile: Vec<f64> = out.d1.samples().iter().map(|s| s.norm_sqr()).collect();
    let peak = profile.iter().cloned().fold(0.0, f64::max);
    // zeros: interior minima inside the beam, well below the peak
    let (_, minima) = local_extrema(&profile, 0.0);
    let zeros: Vec<f64> = minima
        .into_iter()
        .filter(|&i| g.x(i).abs() < p.w && profile[i] < 1e-3 * peak)
        .map(|i| g.x(i))
        .collect();
    let mut crit = Criterion::new();
    let expected = p.w / 2.0;
    crit.holds(
        format!("zeros at {:?} mm", zeros.iter().map(|z| z * 1e3).collect::<Vec<_>>()),
        zeros.len() == 2 && near(zeros[0], -expected, dx) && near(zeros[1], expected, dx),
    );
    // shape against the analytic profile, both scaled to unit peak
    let w2 = p.w * p.w;
    let analytic: Vec<f64> = (0..g.n_points())
        .map(|i| {
            let x = g.x(i);
            (4.0 * x * x / w2 - 1.0).powi(2) * (-2.0 * x * x / w2).exp()
        })
        .collect();
    let apeak = analytic.iter().cloned().fold(0.0, f64::max);
    let shape = profile
        .iter()
        .zip(&analytic)
        .map(|(a, b)| (a / peak - b / apeak).abs())
        .fold(0.0, f64::max);
    crit.at_most("max profile deviation", shape, 1e-2);
    crit.finish(3, "anti-commutator structure")
}

fn wigner_of(f: &ComplexField) -> WignerMap {
    wigner_transform(&f.normalize().unwrap(), WignerOptions { x_stride: 4, k_bins: 512 }).unwrap()
}

fn criterion_4() -> Line {
    let (p, psi) = setup();
    let spec = InterferometerSpec::standard(&p, PI);
    let commutator = run_interferometer(&psi, &spec).unwrap().d1;
    let anti = run_interferometer(&psi, &spec.with_phase(0.0)).unwrap().d1;
    let (wi, wc, wa) = (wigner_of(&psi), wigner_of(&commutator), wigner_of(&anti));
    let mut crit = Criterion::new();
    crit.at_most("compare(commutator, input)", wigner_compare(&wc, &wi).unwrap(), 1e-3);
    crit.at_most("input negative volume", negativity_metrics(&wi).negative_volume, 1e-6);
    let m = negativity_metrics(&wa);
    crit.holds(format!("anti min W {:.4e} < 0", m.min_value), m.min_value < 0.0);
    crit.at_least("anti |min W| / max W", m.min_value.abs() / m.max_value, 0.05);
    crit.holds(
        format!("anti negative volume {:.4} > 0.01", m.negative_volume),
        m.negative_volume > 0.01,
    );
    crit.finish(4, "Wigner maps")
}

fn momentum_density(field: &ComplexField, k: f64) -> f64 {
    let g = field.grid();
    let sum: Complex64 = field
        .samples()
        .iter()
        .enumerate()
        .map(|(i, s)| s * Complex64::from_polar(1.0, -k * g.x(i)))
        .sum();
    (sum * g.spacing()).norm_sqr() / (2.0 * PI)
}

fn criterion_5() -> Line {
    let (p, psi) = setup();
    let mut crit = Criterion::new();

    let once = lens_fourier_transform(&psi, p.lambda, p.f).unwrap();
    crit.at_most("Parseval", (once.norm_sq() / psi.norm_sq() - 1.0).abs(), 1e-9);
    let twice = lens_fourier_transform(&once, p.lambda, p.f).unwrap();
    // the second transform lands on a grid of the input's size
    let twice = ComplexField::from_samples(*psi.grid(), twice.into_samples()).unwrap();
    let flipped = apply_axis_flip(&psi);
    crit.at_most("double transform deficit", 1.0 - twice.fidelity(&flipped).unwrap(), 1e-9);

    // an asymmetric, chirped state exercises odd and imaginary parts
    let bumpy = gaussian_input(*psi.grid(), 0.4e-3)
        .unwrap()
        .map(|x, s| s * Complex64::from_polar(1.0 + 0.3 * (x / 0.3e-3).tanh(), 2e6 * x * x))
        .normalize()
        .unwrap();
    let mut marginal: f64 = 0.0;
    let mut purity: f64 = 0.0;
    for state in [psi.clone(), bumpy.clone()] {
        let map = wigner_transform(&state, WignerOptions::default()).unwrap();
        let pos: f64 = map
            .position_marginal()
            .iter()
            .zip(state.samples())
            .map(|(v, s)| (v - s.norm_sqr()).abs())
            .sum::<f64>()
            * map.dx();
        let mom: f64 = map
            .momentum_marginal()
            .iter()
            .zip(&map.k_axis)
            .map(|(v, &k)| (v - momentum_density(&state, k)).abs())
            .sum::<f64>()
            * map.dk();
        marginal = marginal.max(pos).max(mom);
        purity = purity.max((map.purity() - 1.0).abs());
    }
    crit.at_most("marginals L1", marginal, 1e-6);
    crit.at_most("|purity - 1|", purity, 1e-4);

    let spec = InterferometerSpec::standard(&p, PI / 3.0);
    let (a, b) = (Complex64::new(0.6, -0.2), Complex64::new(-0.3, 0.7));
    let mixed = psi.combine(a, &bumpy, b).unwrap();
    let out_mixed = run_interferometer(&mixed, &spec).unwrap();
    let (oa, ob) = (run_interferometer(&psi, &spec).unwrap(), run_interferometer(&bumpy, &spec).unwrap());
    let lin1 = oa.d1.combine(a, &ob.d1, b).unwrap();
    let lin2 = oa.d2.combine(a, &ob.d2, b).unwrap();
    let linearity = out_mixed.d1.relative_l2(&lin1).unwrap().max(out_mixed.d2.relative_l2(&lin2).unwrap());
    crit.at_most("linearity", linearity, 1e-10);

    let switch = port_switch_check(&psi, &spec).unwrap();
    crit.at_most("port switch", switch.max_deviation, 1e-12);
    crit.finish(5, "numerical hygiene")
}

fn criterion_6() -> Line {
    let mut crit = Criterion::new();
    let mut runner = TestRunner::new(Config::default());
    let strategy = common::document();
    let mut round_trip_failures = 0;
    for _ in 0..1000 {
        let doc = strategy.new_tree(&mut runner).unwrap().current();
        if parse_bench(&render_bench(&doc)).ok() != Some(doc) {
            round_trip_failures += 1;
        }
    }
    crit.holds(format!("round trip 1000 docs, {round_trip_failures} failures"), round_trip_failures == 0);

    let bytes = proptest::collection::vec(proptest::num::u8::ANY, 0..256);
    let mut panics = 0;
    for _ in 0..10_000 {
        let input = bytes.new_tree(&mut runner).unwrap().current();
        let text = String::from_utf8_lossy(&input).into_owned();
        if std::panic::catch_unwind(|| parse_bench(&text)).is_err() {
            panics += 1;
        }
    }
    crit.holds(format!("totality 10000 byte strings, {panics} panics"), panics == 0);
    crit.holds(
        "default file equals built-in".into(),
        parse_bench(DESK_DEFAULT_BENCH).ok() == Some(BenchDocument::desk_default()),
    );
    crit.finish(6, "parser")
}

fn criterion_7() -> Line {
    let (p, psi) = setup();
    let g = *psi.grid();
    let dx = g.spacing();
    let phases = uniform_phases(64);
    let map = phase_sweep(&psi, &InterferometerSpec::standard(&p, PI), &phases).unwrap();
    let mut crit = Criterion::new();
    crit.holds(
        format!("map {}x{}", map.phase_count(), map.x_axis.len()),
        map.phase_count() == 64 && map.x_axis.len() == 4096,
    );

    let column = |k: usize| {
        let v = map.profile(k);
        let peak = v.iter().cloned().fold(0.0, f64::max);
        local_extrema(v, 1e-3 * peak).0.into_iter().map(|i| g.x(i)).collect::<Vec<f64>>()
    };
    assert_eq!(phases[32], PI);
    let at_pi = column(32);
    crit.holds(
        format!("phi=pi maxima {:?} mm", at_pi.iter().map(|x| x * 1e3).collect::<Vec<_>>()),
        at_pi.len() == 1 && near(at_pi[0], 0.0, dx),
    );
    // analytic maxima of (4u - 1)^2 exp(-2u), u = x^2/w^2: u = 0 and u = 5/4
    let side = p.w * 5f64.sqrt() / 2.0;
    let at_zero = column(0);
    crit.holds(
        format!("phi=0 maxima {:?} mm", at_zero.iter().map(|x| x * 1e3).collect::<Vec<_>>()),
        at_zero.len() == 3
            && near(at_zero[0], -side, dx)
            && near(at_zero[1], 0.0, dx)
            && near(at_zero[2], side, dx),
    );
    crit.finish(7, "probability map structure")
}

fn main() -> ExitCode {
    let criteria: [fn() -> Line; 7] = [
        criterion_1,
        criterion_2,
        criterion_3,
        criterion_4,
        criterion_5,
        criterion_6,
        criterion_7,
    ];
    let mut failed = 0;
    for run in criteria {
        let line = run();
        println!("{} {}", if line.passed { "PASS" } else { "FAIL" }, line.label);
        if !line.passed {
            failed += 1;
        }
    }
    println!("{} of 7 criteria passed", 7 - failed);
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
