use evostab::certifier::{
    certify_delay_on_base, certify_global, certify_integro, check_prop31, delay_base, resolvent_sup_grid,
    CertifyOptions, GridSpec,
};
use evostab::kernel::{ExpTerm, Kernel};
use evostab::law::{LawExpr, SecondOrderLaw};
use evostab::spatial::SpatialC;
use evostab::time_domain::{
    memory_quadrature, simulate, solve_wave_frequency, SimulationOptions, Source, Trajectory, WaveModel,
};

fn damped(n: usize) -> SecondOrderLaw {
    SecondOrderLaw::new(LawExpr::identity(n), LawExpr::scalar(0.2, n), 5.0).unwrap()
}

fn kernel() -> Kernel {
    Kernel::single(0.5, 1.0, 0.25).unwrap()
}

fn opts(delta: Option<f64>) -> CertifyOptions {
    CertifyOptions {
        delta,
        grid: GridSpec::coarse(),
        growth_bound: false,
    }
}

fn dense_grid() -> GridSpec {
    GridSpec {
        re_points: 7,
        im_dense_points: 97,
        im_log_points: 40,
        ..GridSpec::default()
    }
}

#[test]
fn first_order_solution_solves_second_order_equation() {
    let n = 8;
    let c = SpatialC::dirichlet_1d(n).unwrap();
    let (_, sys) = certify_global(&damped(n), &c, &opts(None)).unwrap();
    let dt = 0.005;
    let len = 1 << 13;
    let f = Source::bump(0.0, 1.0, 1.0, n).unwrap().sample(n, dt, len);
    let sol = solve_wave_frequency(&sys, &f, None, 0.5).unwrap();
    let k = c.stiffness().map(|z| z.re);
    let (mut res2, mut f2) = (0.0, 0.0);
    for i in 1..sol.u.len() - 1 {
        let acc: Vec<f64> = (0..n)
            .map(|j| (sol.du.sample(i + 1)[j] - sol.du.sample(i - 1)[j]) / (2.0 * dt))
            .collect();
        let u = nalgebra::DVector::from_column_slice(sol.u.sample(i));
        let ku = &k * &u;
        for j in 0..n {
            let r = acc[j] + 0.2 * sol.du.sample(i)[j] + ku[j] - f.sample(i)[j];
            res2 += r * r;
            f2 += f.sample(i)[j].powi(2);
        }
    }
    let rel = (res2 / f2).sqrt();
    assert!(rel <= 1e-2, "second-order residual {rel}");
}

#[test]
fn certified_bounds_dominate_denser_grids() {
    let c = SpatialC::dirichlet_1d(6).unwrap();
    let (cert, sys) = certify_global(&damped(6), &c, &opts(None)).unwrap();
    let sup = resolvent_sup_grid(&sys.law, sys.a.matrix(), cert.rho1, &dense_grid()).unwrap();
    assert!(sup.sup <= cert.resolvent_bound * (1.0 + 1e-6), "{} > {}", sup.sup, cert.resolvent_bound);

    let (ic, isys) = certify_integro(&kernel(), &c, &opts(Some(0.125))).unwrap();
    let cert = ic.certificate;
    let sup = resolvent_sup_grid(&isys.law, isys.a.matrix(), cert.rho1, &dense_grid()).unwrap();
    assert!(sup.sup <= cert.resolvent_bound * (1.0 + 1e-6), "{} > {}", sup.sup, cert.resolvent_bound);
}

#[test]
fn shrinking_the_rate_keeps_certificates() {
    let c = SpatialC::dirichlet_1d(6).unwrap();
    let (ic, sys) = certify_integro(&kernel(), &c, &opts(Some(0.125))).unwrap();
    let cert = ic.certificate;
    let tail = cert.check.positivity.tail.unwrap();
    for f in [0.9, 0.5, 0.1] {
        let p = check_prop31(&sys.law, &sys.a, cert.delta, f * cert.rho1, Some((tail, "lemma")), &GridSpec::coarse()).unwrap();
        assert!(p.resolvent_bound.is_finite());
    }
    let (dc, dsys) = certify_global(&damped(6), &c, &opts(None)).unwrap();
    for f in [0.9, 0.5, 0.1] {
        let tail = dc.check.positivity.tail;
        check_prop31(&dsys.law, &dsys.a, 0.0, f * dc.rho1, tail.map(|t| (t, "lemma")), &GridSpec::coarse()).unwrap();
    }
}

#[test]
fn perturbation_margin_dominates_perturbed_resolvent() {
    let c = SpatialC::dirichlet_1d(6).unwrap();
    let k2 = Kernel::exp_sum(vec![ExpTerm::new(0.3, 1.2), ExpTerm::new(0.1, 0.8)], 0.25).unwrap();
    let scenarios = [(kernel(), 1.0, 0.5), (kernel(), 0.5, 0.9), (k2, 2.0, 0.7)];
    for (k, h, frac) in scenarios {
        let base = delay_base(&k, &c, &opts(Some(0.1))).unwrap();
        let (probe, _) = certify_delay_on_base(&base, &k, 0.0, h, &c).unwrap();
        let kappa = frac * probe.kappa0;
        let (cert, sys) = certify_delay_on_base(&base, &k, kappa, h, &c).unwrap();
        assert!(cert.certified, "{:?}", cert.failure);
        let bound = cert.resolvent_bound.unwrap();
        let rho1 = base.base.certificate.rho1;
        let sup = resolvent_sup_grid(&sys.law, sys.a.matrix(), rho1, &GridSpec::coarse()).unwrap();
        assert!(sup.sup <= bound, "h = {h}: {} > {bound}", sup.sup);
    }
}

fn sampled_bump(n: usize, dt: f64, len: usize, t0: f64, t1: f64, amp: f64) -> Trajectory {
    Source::bump(t0, t1, amp, n).unwrap().sample(n, dt, len)
}

fn add(a: &Trajectory, b: &Trajectory) -> Trajectory {
    let data = a.data().iter().zip(b.data()).map(|(x, y)| x + y).collect();
    Trajectory::from_data(a.t0, a.dt, a.dim(), data).unwrap()
}

#[test]
fn time_stepping_is_causal() {
    let n = 6;
    let c = SpatialC::dirichlet_1d(n).unwrap();
    let dt = 0.01;
    let len = 2001;
    let a_idx = 600; // agree on [0, 6]
    let f1 = sampled_bump(n, dt, len, 0.0, 1.0, 1.0);
    let f2 = add(&f1, &sampled_bump(n, dt, len, 6.5, 7.5, 3.0));
    let models = [
        WaveModel::new(&c).unwrap().with_scalar_damping(0.2).unwrap(),
        WaveModel::new(&c).unwrap().with_memory(&kernel()).unwrap().with_delay(0.3, 1.0).unwrap(),
    ];
    for model in &models {
        let o = SimulationOptions::new(20.0, dt);
        let r1 = simulate(model, &Source::Sampled(f1.clone()), &o).unwrap();
        let r2 = simulate(model, &Source::Sampled(f2.clone()), &o).unwrap();
        let d = r1.u.truncated(a_idx + 1).max_abs_diff(&r2.u.truncated(a_idx + 1)).unwrap();
        assert!(d <= 1e-10, "{d}");
        let later = r1.u.max_abs_diff(&r2.u).unwrap();
        assert!(later > 1e-3, "the later source has no effect");
    }
}

#[test]
fn frequency_route_is_causal_up_to_wrap() {
    let n = 6;
    let c = SpatialC::dirichlet_1d(n).unwrap();
    let (_, sys) = certify_global(&damped(n), &c, &opts(None)).unwrap();
    let dt = 0.01;
    let len = 1 << 12;
    let f1 = sampled_bump(n, dt, len, 0.0, 1.0, 1.0);
    let f2 = add(&f1, &sampled_bump(n, dt, len, 6.5, 7.5, 3.0));
    let s1 = solve_wave_frequency(&sys, &f1, None, 0.5).unwrap();
    let s2 = solve_wave_frequency(&sys, &f2, None, 0.5).unwrap();
    let peak = s1.u.data().iter().fold(0.0f64, |m, v| m.max(v.abs()));
    let d = s1.u.truncated(601).max_abs_diff(&s2.u.truncated(601)).unwrap();
    assert!(d <= 1e-3 * peak, "{d}");
}

#[test]
fn memory_states_match_direct_quadrature() {
    let n = 5;
    let c = SpatialC::dirichlet_1d(n).unwrap();
    let k = Kernel::exp_sum(vec![ExpTerm::new(0.4, 1.0), ExpTerm::new(0.2, 3.0)], 0.25).unwrap();
    let model = WaveModel::new(&c).unwrap().with_memory(&k).unwrap();
    let run = simulate(&model, &Source::bump(0.0, 1.0, 1.0, n).unwrap(), &SimulationOptions::new(6.0, 1e-3)).unwrap();
    let mem = run.memory.as_ref().unwrap();
    let scale = mem.data().iter().fold(0.0f64, |m, v| m.max(v.abs()));
    for i in [500, 1000, 2500, 4000, 6000] {
        let direct = memory_quadrature(&k, &c, &run.u, i).unwrap();
        for (a, b) in mem.sample(i).iter().zip(&direct) {
            assert!((a - b).abs() <= 1e-4 * scale, "step {i}: {a} vs {b}");
        }
    }
}
