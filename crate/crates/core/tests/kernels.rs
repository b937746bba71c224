use imtm::mathcore::{cholesky, mvn_logpdf, Matrix, RngStream};
use imtm::proposals::{AnchoredRw, Context, DiscreteGaussian, GaussianRw, Kernel, MixtureRw, Proposal, RayProposal};
use imtm::SpdMatrix64;
use proptest::prelude::*;
use statrs::distribution::{ChiSquared, ContinuousCDF};

fn spd(a: f64, b: f64, c: f64) -> SpdMatrix64 {
    SpdMatrix64::new(Matrix::from_rows(&[vec![a, c], vec![c, b]]).unwrap()).unwrap()
}

// Chi-square of 10^5 draws against the density integrated over a grid of
// cells, with a single catch-all cell for everything outside the box.
fn grid_fit(kernel: &Kernel<f64>, ctx: &Context<'_, f64>, center: [f64; 2], half: f64, cells: usize, seed: u64) -> f64 {
    let draws = 100_000;
    let width = 2.0 * half / cells as f64;
    let mut rng = RngStream::new(seed, 0);
    let mut counts = vec![0usize; cells * cells + 1];
    for _ in 0..draws {
        let y = kernel.sample(&mut rng, ctx);
        let i = ((y[0] - center[0] + half) / width).floor();
        let j = ((y[1] - center[1] + half) / width).floor();
        let inside = (0.0..cells as f64).contains(&i) && (0.0..cells as f64).contains(&j);
        let slot = if inside { i as usize * cells + j as usize } else { cells * cells };
        counts[slot] += 1;
    }
    let sub = 6;
    let h = width / sub as f64;
    let mut probs = vec![0.0; cells * cells + 1];
    for i in 0..cells {
        for j in 0..cells {
            let mut p = 0.0;
            for a in 0..sub {
                for b in 0..sub {
                    let y = [
                        center[0] - half + i as f64 * width + (a as f64 + 0.5) * h,
                        center[1] - half + j as f64 * width + (b as f64 + 0.5) * h,
                    ];
                    p += kernel.log_density(&y, ctx).unwrap().exp() * h * h;
                }
            }
            probs[i * cells + j] = p;
        }
    }
    probs[cells * cells] = (1.0 - probs[..cells * cells].iter().sum::<f64>()).max(0.0);
    let (mut chi2, mut used) = (0.0, 0usize);
    for (&o, &p) in counts.iter().zip(&probs) {
        let e = p * draws as f64;
        if e >= 5.0 {
            chi2 += (o as f64 - e).powi(2) / e;
            used += 1;
        }
    }
    1.0 - ChiSquared::new((used - 1) as f64).unwrap().cdf(chi2)
}

#[test]
fn continuous_kernels_pass_grid_goodness_of_fit() {
    let x = [1.0, -2.0];
    let snapshot = vec![x.to_vec(), vec![4.0, 4.0]];
    let single = Context::single(&x);
    let anchored = Context::population(&x, &snapshot, 0).with_anchor(Some(1));
    let cases: Vec<(&str, Kernel<f64>, &Context<'_, f64>, [f64; 2], f64)> = vec![
        ("gaussian", GaussianRw::new(spd(1.0, 2.0, 0.6)).into(), &single, [1.0, -2.0], 5.0),
        (
            "mixture",
            MixtureRw::new(vec![0.25; 4], [0.1, 1.0, 5.0, 10.0].iter().map(|&v| SpdMatrix64::scaled_identity(2, v)).collect())
                .unwrap()
                .into(),
            &single,
            [1.0, -2.0],
            10.0,
        ),
        ("anchored", AnchoredRw::new(spd(0.5, 0.1, 0.0)).into(), &anchored, [4.0, 4.0], 3.0),
    ];
    for (seed, (name, kernel, ctx, center, half)) in cases.into_iter().enumerate() {
        let p = grid_fit(&kernel, ctx, center, half, 12, seed as u64);
        assert!(p > 1e-3, "{name}: chi-square p = {p}");
    }
}

#[test]
fn discrete_kernel_in_two_dimensions_fits_product_law() {
    let k = DiscreteGaussian::new(1.5, 0.0).unwrap();
    let x = [0.0, 0.0];
    let ctx = Context::single(&x);
    let mut rng = RngStream::new(9, 0);
    let r = k.reach();
    let side = (2 * r + 1) as usize;
    let mut counts = vec![0usize; side * side];
    let draws = 100_000;
    for _ in 0..draws {
        let y = k.sample(&mut rng, &ctx);
        counts[(y[0] as i64 + r) as usize * side + (y[1] as i64 + r) as usize] += 1;
    }
    let (mut chi2, mut used) = (0.0, 0usize);
    for i in 0..side {
        for j in 0..side {
            let y = [(i as i64 - r) as f64, (j as i64 - r) as f64];
            let e = k.log_density(&y, &ctx).unwrap().exp() * draws as f64;
            if e >= 5.0 {
                chi2 += (counts[i * side + j] as f64 - e).powi(2) / e;
                used += 1;
            }
        }
    }
    let p = 1.0 - ChiSquared::new((used - 1) as f64).unwrap().cdf(chi2);
    assert!(p > 1e-3, "chi-square p = {p}");
}

#[test]
fn mvn_density_integrates_to_one() {
    let cov = spd(1.0, 0.5, 0.3);
    let mean = [0.5, -1.0];
    let (s0, s1) = (1.0f64, 0.5f64.sqrt());
    let n = 600;
    let (h0, h1) = (12.0 * s0 / n as f64, 12.0 * s1 / n as f64);
    let mut total = 0.0;
    for i in 0..n {
        for j in 0..n {
            let x = [
                mean[0] - 6.0 * s0 + (i as f64 + 0.5) * h0,
                mean[1] - 6.0 * s1 + (j as f64 + 0.5) * h1,
            ];
            total += mvn_logpdf(&x, &mean, &cov).unwrap().exp() * h0 * h1;
        }
    }
    assert!((total - 1.0).abs() < 1e-3, "integral {total}");
}

fn random_spd(rng: &mut RngStream, d: usize) -> Matrix<f64> {
    use rand::Rng;
    let a = Matrix::new(d, d, (0..d * d).map(|_| rng.random::<f64>() - 0.5).collect()).unwrap();
    let mut m = a.matmul(&a.transpose()).unwrap();
    m = m.add(&Matrix::identity(d).scale(0.1)).unwrap();
    m
}

#[test]
fn cholesky_round_trips_random_spd_matrices() {
    let mut rng = RngStream::new(21, 0);
    for t in 0..100 {
        let d = 1 + t % 20;
        let m = random_spd(&mut rng, d);
        let l = cholesky(&m).unwrap();
        let back = l.matmul(&l.transpose()).unwrap();
        let err = back.sub(&m).unwrap().frobenius_norm() / m.frobenius_norm();
        assert!(err < 1e-10, "d = {d}: relative error {err}");
    }
}

fn kernels() -> Vec<Kernel<f64>> {
    vec![
        GaussianRw::new(spd(1.0, 2.0, 0.6)).into(),
        MixtureRw::new(vec![0.5, 0.5], vec![SpdMatrix64::scaled_identity(2, 0.1), SpdMatrix64::scaled_identity(2, 50.0)])
            .unwrap()
            .into(),
        DiscreteGaussian::new(1.2, 1.0).unwrap().into(),
        DiscreteGaussian::new(0.8, 0.0).unwrap().into(),
    ]
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(1000))]

    #[test]
    fn positivity_is_symmetric(
        x in prop::array::uniform2(-20i32..20),
        y in prop::array::uniform2(-20i32..20),
        jitter in prop::array::uniform2(-0.5f64..0.5),
    ) {
        let x = [x[0] as f64, x[1] as f64];
        let lattice = [y[0] as f64, y[1] as f64];
        let off = [lattice[0] + jitter[0], lattice[1] + jitter[1]];
        for k in kernels() {
            for y in [lattice, off] {
                let fwd = k.log_density(&y, &Context::single(&x)).unwrap();
                let back = k.log_density(&x, &Context::single(&y)).unwrap();
                prop_assert_eq!(fwd > f64::NEG_INFINITY, back > f64::NEG_INFINITY, "{:?} {:?} -> {:?}", k, x, y);
            }
        }
    }

    #[test]
    fn ray_positivity_is_symmetric(angle in 0.0f64..std::f64::consts::TAU, r in -30.0f64..30.0, x in prop::array::uniform2(-10.0f64..10.0)) {
        let k = RayProposal::new(vec![angle.cos(), angle.sin()], 2.0).unwrap();
        let y = [x[0] + r * angle.cos(), x[1] + r * angle.sin()];
        let fwd = k.log_density(&y, &Context::single(&x)).unwrap();
        let back = k.log_density(&x, &Context::single(&y)).unwrap();
        prop_assert!(fwd.is_finite() && back.is_finite());
        prop_assert!((fwd - back).abs() < 1e-9);
    }

    #[test]
    fn anchored_density_ignores_current(c in prop::array::uniform2(-10.0f64..10.0), d in prop::array::uniform2(-10.0f64..10.0)) {
        let k = AnchoredRw::isotropic(2, 1.5);
        let snapshot = vec![c.to_vec(), vec![3.0, -1.0]];
        let y = [2.0, 0.0];
        let a = k.log_density(&y, &Context::population(&c, &snapshot, 0).with_anchor(Some(1))).unwrap();
        let b = k.log_density(&y, &Context::population(&d, &snapshot, 0).with_anchor(Some(1))).unwrap();
        prop_assert_eq!(a, b);
    }
}
