//! Acceptance gate. Runs every criterion, prints one PASS/FAIL line each and
//! exits nonzero if any fails.

use std::f64::consts::PI;
use std::process::Command;
use std::time::{Duration, Instant};

use gasurf::estimators::{
    area_estimate_balanced, area_estimate_naive, balanced_mean_bivector, balanced_numerator,
    balanced_numerator_via_triangles, generalized_balanced_bivector, jacobian_estimate, loglog_fit,
    mean_bivector_naive, EstimatorOptions,
};
use gasurf::ga::{self, Multivector};
use gasurf::geom::{self, OrientedTriangle2, Point2, Vertex};
use gasurf::partition::{
    refine_midpoint, schwarz_fourth_point, schwarz_lantern_partition, schwarz_local_triangle, triangulate, Polygon2,
};
use gasurf::surfaces::{self, make_affine, make_cylinder, PlaneTransform, Surface};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

const OPTS: EstimatorOptions = EstimatorOptions { relaxed_kappa: None };

struct Outcome {
    passed: bool,
    detail: String,
}

fn outcome(passed: bool, detail: impl Into<String>) -> Outcome {
    Outcome { passed, detail: detail.into() }
}

fn doublings(lo: u64, hi: u64) -> Vec<u64> {
    std::iter::successors(Some(lo), |m| Some(m * 2)).take_while(|&m| m <= hi).collect()
}

fn within_time(limit: Duration, start: Instant) -> (bool, String) {
    let el = start.elapsed();
    (el <= limit, format!("{:.3}s/{}s", el.as_secs_f64(), limit.as_secs()))
}

fn h23(value: f64) -> Multivector {
    Multivector::blade(3, ga::bivector_mask(2, 3), value).unwrap()
}

fn schwarz_balanced() -> Outcome {
    let start = Instant::now();
    let s = make_cylinder(1.0).unwrap();
    let mut ok = true;
    let mut worst_rel = 0.0f64;
    let mut fits = Vec::new();
    for k in 1..=3u32 {
        let ms = doublings(4, 256);
        let mut errs = Vec::new();
        for &m in &ms {
            let t = schwarz_local_triangle(m, m.pow(k)).unwrap();
            let b = balanced_mean_bivector(&s, &t, Vertex::A, &OPTS).unwrap().value;
            let expect = (m as f64 / PI) * (PI / m as f64).sin();
            let reference = h23(expect);
            for (got, want) in b.coeffs().iter().zip(reference.coeffs()) {
                let rel = (got - want).abs() / expect;
                worst_rel = worst_rel.max(rel);
                ok &= rel <= 1e-12;
            }
            errs.push(ga::norm(&(&b - &h23(1.0))));
        }
        let xs: Vec<f64> = ms.iter().map(|&m| m as f64).collect();
        let (p, r2) = loglog_fit(&xs, &errs).unwrap();
        ok &= (p + 2.0).abs() <= 0.05 && r2 >= 0.999;
        fits.push(format!("n=m^{k}: slope {p:.4} R2 {r2:.6}"));
    }
    let (fast, t) = within_time(Duration::from_secs(1), start);
    outcome(ok && fast, format!("max componentwise rel {worst_rel:.2e}; {}; {t}", fits.join(", ")))
}

fn schwarz_naive() -> Outcome {
    let start = Instant::now();
    let s = make_cylinder(1.0).unwrap();
    let naive = |m: u64, n: u64| mean_bivector_naive(&s, &schwarz_local_triangle(m, n).unwrap()).unwrap();

    let e_mm = ga::norm(&(&naive(256, 256) - &h23(1.0)));
    let a = e_mm <= 5e-3;

    let c12 = naive(256, 256 * 256).bivector_coeff(1, 2);
    let target = 2.0 * PI * PI;
    let b = (c12 - target).abs() <= 0.01 * target;

    let coeffs: Vec<f64> = doublings(16, 256).iter().map(|&m| naive(m, m * m * m).bivector_coeff(1, 2)).collect();
    let min_ratio = coeffs.windows(2).map(|w| w[1] / w[0]).fold(f64::INFINITY, f64::min);
    let c = min_ratio >= 1.9;

    let (fast, t) = within_time(Duration::from_secs(1), start);
    outcome(
        a && b && c && fast,
        format!(
            "(m,m) |est-h23| at 256 = {e_mm:.4e} [{}]; (m,m^2) e12 at 256 = {c12:.6} vs 2pi^2 = {target:.6} [{}]; \
             (m,m^3) min growth per doubling {min_ratio:.4} [{}]; {t}",
            if a { "ok" } else { "miss" },
            if b { "ok" } else { "miss" },
            if c { "ok" } else { "miss" },
        ),
    )
}

fn fourth_point() -> Outcome {
    let s = make_cylinder(1.0).unwrap();
    let (t, d) = schwarz_fourth_point(256, 256).unwrap();
    let g = generalized_balanced_bivector(&s, &t, d, &OPTS).unwrap();
    let err = ga::norm(&(&g.value - &h23(1.0)));
    outcome(err <= 1e-2, format!("error at m=n=256 = {err:.4e}, balance ratio {:.3}", g.ratio))
}

fn cylinder_area() -> Outcome {
    let start = Instant::now();
    let s = make_cylinder(1.0).unwrap();
    let poly = Polygon2::rectangle(0.0, 0.0, PI / 2.0, 1.0).unwrap();
    let mut p = triangulate(&poly).unwrap();
    let (mut hs, mut errs) = (Vec::new(), Vec::new());
    for k in 0..=6 {
        if k > 0 {
            p = refine_midpoint(&p);
        }
        hs.push(p.mesh_norm());
        errs.push((area_estimate_balanced(&s, &p, &OPTS).unwrap() - PI / 2.0).abs());
    }
    let monotone = errs.windows(2).all(|w| w[1] < w[0]);
    let last = *errs.last().unwrap();
    let (order, _) = loglog_fit(&hs, &errs).unwrap();
    let (fast, t) = within_time(Duration::from_secs(10), start);
    outcome(
        monotone && last <= 1e-3 && order >= 0.9 && fast,
        format!("errors monotone {monotone}, final {last:.3e}, observed order {order:.3}; {t}"),
    )
}

/// Inscribed area of the lantern from one up-triangle, with vertices placed
/// on the cylinder by hand.
fn lantern_closed_form(m: u64, n: u64, height: f64, rho: f64) -> f64 {
    let (w, dy) = (2.0 * PI / m as f64, height / n as f64);
    let on_cyl = |x: f64, y: f64| [rho * x.cos(), rho * x.sin(), y];
    let apex = on_cyl(0.5 * w, dy);
    let (p, q) = (on_cyl(0.0, 0.0), on_cyl(w, 0.0));
    let e1 = [p[0] - apex[0], p[1] - apex[1], p[2] - apex[2]];
    let e2 = [q[0] - apex[0], q[1] - apex[1], q[2] - apex[2]];
    let cross = [
        e1[1] * e2[2] - e1[2] * e2[1],
        e1[2] * e2[0] - e1[0] * e2[2],
        e1[0] * e2[1] - e1[1] * e2[0],
    ];
    let one = 0.5 * (cross[0].powi(2) + cross[1].powi(2) + cross[2].powi(2)).sqrt();
    2.0 * (m * n) as f64 * one
}

fn lantern() -> Outcome {
    let start = Instant::now();
    let (rho, height) = (1.0, 1.0);
    let s = make_cylinder(rho).unwrap();
    let reference = 2.0 * PI * height * rho;
    let mut prev_naive = f64::NEG_INFINITY;
    let mut increasing = true;
    let mut matches_oracle = true;
    let mut balanced_ok = true;
    let mut lines = Vec::new();
    for m in [4u64, 8, 16, 32] {
        let n = m * m * m;
        let p = schwarz_lantern_partition(m, n, height).unwrap();
        let naive = area_estimate_naive(&s, &p).unwrap();
        let bal = area_estimate_balanced(&s, &p, &OPTS).unwrap();
        let oracle = lantern_closed_form(m, n, height, rho);
        // second, algebraic form of the same oracle
        let alt = 2.0 * (m * n) as f64 * rho * (PI / m as f64).sin()
            * ((height / n as f64).powi(2) + (rho * (1.0 - (PI / m as f64).cos())).powi(2)).sqrt();
        assert!((oracle - alt).abs() <= 1e-12 * alt);
        increasing &= naive > prev_naive;
        prev_naive = naive;
        matches_oracle &= (naive - oracle).abs() <= 1e-9 * oracle && naive > reference;
        let rel = (bal - reference).abs() / reference;
        balanced_ok &= rel <= 0.01;
        lines.push(format!("m={m}: naive {naive:.4} oracle {oracle:.4} balanced rel {rel:.4e}"));
    }
    let (fast, t) = within_time(Duration::from_secs(30), start);
    outcome(
        increasing && matches_oracle && balanced_ok && fast,
        format!(
            "naive increasing {increasing}, naive = oracle > 2pi h rho {matches_oracle}, balanced within 1% {balanced_ok}; {}; {t}",
            lines.join("; ")
        ),
    )
}

fn random_triangle(rng: &mut ChaCha8Rng) -> OrientedTriangle2 {
    loop {
        let mut p = || Point2::new(rng.random_range(-3.0..3.0), rng.random_range(-3.0..3.0));
        let t = OrientedTriangle2::new(p(), p(), p());
        let d = t.diameter();
        if d > 1e-2 && t.area() > 1e-2 * d * d {
            return t;
        }
    }
}

fn affine_exactness() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(0x5eed_0006);
    let mut worst_j = 0.0f64;
    let mut worst_b = 0.0f64;
    for _ in 0..1000 {
        let t = random_triangle(&mut rng);
        let v = geom::balanced_vertex_choice(&t).unwrap();

        let a: [f64; 4] = std::array::from_fn(|_| rng.random_range(-2.0..2.0));
        let det = a[0] * a[3] - a[1] * a[2];
        let off = Point2::new(rng.random_range(-5.0..5.0), rng.random_range(-5.0..5.0));
        let f = PlaneTransform::affine([[a[0], a[1]], [a[2], a[3]]], off);
        let est = jacobian_estimate(&f, &t, v, &OPTS).unwrap();
        let scale = a.iter().fold(0.0f64, |s, x| s.max(x.abs())).powi(2);
        worst_j = worst_j.max((est - det).abs() / scale);

        let dim = rng.random_range(2..=5usize);
        let mut vecr = || (0..dim).map(|_| rng.random_range(-2.0..2.0)).collect::<Vec<f64>>();
        let (o, d1, d2) = (vecr(), vecr(), vecr());
        let s = make_affine(&o, &d1, &d2).unwrap();
        let b = balanced_mean_bivector(&s, &t, v, &OPTS).unwrap().value;
        let mut num = 0.0f64;
        let mut den = 0.0f64;
        for (j, k) in ga::bivector_pairs(dim) {
            let want = d1[j - 1] * d2[k - 1] - d1[k - 1] * d2[j - 1];
            num += (b.bivector_coeff(j, k) - want).powi(2);
            den += want * want;
        }
        let scale = d1.iter().chain(&d2).fold(0.0f64, |s, x| s.max(x.abs())).powi(2);
        worst_b = worst_b.max(num.sqrt() / den.sqrt().max(scale));
    }
    outcome(
        worst_j <= 1e-11 && worst_b <= 1e-11,
        format!("1000 cases: worst jacobian rel {worst_j:.2e}, worst bivector rel {worst_b:.2e}"),
    )
}

fn ga_axioms() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(0x5eed_0007);
    let gp = |a: &Multivector, b: &Multivector| ga::geometric_product(a, b).unwrap();

    let mut anti = true;
    for n in 1..=8 {
        for i in 1..=n {
            for j in 1..=n {
                if i == j {
                    continue;
                }
                let (ei, ej) = (Multivector::basis_vector(n, i).unwrap(), Multivector::basis_vector(n, j).unwrap());
                anti &= (gp(&ei, &ej) + gp(&ej, &ei)).coeffs().iter().all(|&c| c == 0.0);
            }
        }
    }

    let mut worst_assoc = 0.0f64;
    for _ in 0..1000 {
        let n = rng.random_range(1..=5usize);
        let mut r = || {
            Multivector::from_coeffs(n, (0..1 << n).map(|_| rng.random_range(-1.0..1.0)).collect()).unwrap()
        };
        let (a, b, c) = (r(), r(), r());
        let d = ga::norm(&(&gp(&gp(&a, &b), &c) - &gp(&a, &gp(&b, &c))));
        worst_assoc = worst_assoc.max(d / (ga::norm(&a) * ga::norm(&b) * ga::norm(&c) + 1.0));
    }

    let mut norm_ok = true;
    for _ in 0..10_000 {
        let mut r = || Multivector::vector(&[rng.random_range(-5.0..5.0), rng.random_range(-5.0..5.0)]).unwrap();
        let (x, y) = (r(), r());
        norm_ok &= ga::norm(&ga::outer_product(&x, &y).unwrap()) <= ga::norm(&x) * ga::norm(&y);
    }

    let mut inv_ok = true;
    for n in 1..=8usize {
        let sign = if (n * (n - 1) / 2) % 2 == 0 { 1.0 } else { -1.0 };
        let expect = ga::pseudo_unit(n).unwrap().scale(sign);
        let inv = ga::pseudo_unit_inverse(n).unwrap();
        inv_ok &= inv == expect;
        inv_ok &= gp(&ga::pseudo_unit(n).unwrap(), &inv) == Multivector::scalar(n, 1.0).unwrap();
    }

    outcome(
        anti && worst_assoc <= 1e-10 && norm_ok && inv_ok,
        format!(
            "anticommutation exact {anti}; associativity worst {worst_assoc:.2e}; norm inequality {norm_ok}; pseudo-unit inverse signs {inv_ok}"
        ),
    )
}

fn graph_identity() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(0x5eed_0008);
    type Grad = fn(f64, f64) -> (f64, f64);
    let cases: [(&str, Grad); 4] = [
        ("0", |_, _| (0.0, 0.0)),
        ("u", |_, _| (1.0, 0.0)),
        ("u^2 + v^2", |u, v| (2.0 * u, 2.0 * v)),
        ("sin(u)*cos(v)", |u, v| (u.cos() * v.cos(), -u.sin() * v.sin())),
    ];
    let mut worst = 0.0f64;
    for (psi, grad) in cases {
        let s = surfaces::parse_surface(&format!("graph({psi})")).unwrap();
        for _ in 0..100 {
            let (u, v) = (rng.random_range(-3.0..3.0), rng.random_range(-3.0..3.0));
            let got = ga::norm(&s.tangent_bivector(Point2::new(u, v)).unwrap());
            let (gu, gv) = grad(u, v);
            let want = (1.0 + gu * gu + gv * gv).sqrt();
            worst = worst.max((got - want).abs() / want);
        }
    }
    outcome(worst <= 1e-9, format!("400 points, worst rel {worst:.2e}"))
}

fn random_surface(rng: &mut ChaCha8Rng) -> Surface {
    let k: [f64; 6] = std::array::from_fn(|_| rng.random_range(-1.5..1.5));
    let spec = format!(
        "custom(u + ({})*v^2, ({})*sin(({})*u) + v, ({})*u*v + ({})*cos(v) + ({})*u^2)",
        k[0], k[1], k[2], k[3], k[4], k[5]
    );
    surfaces::parse_surface(&spec).unwrap()
}

fn identity_checks() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(0x5eed_0009);
    let mut worst_expansion = 0.0f64;
    let mut worst_means = 0.0f64;
    for _ in 0..1000 {
        let s = random_surface(&mut rng);
        let t = random_triangle(&mut rng);
        let v = geom::balanced_vertex_choice(&t).unwrap();
        let md = geom::mirror_vertex(&t, v).unwrap();

        let lhs = balanced_numerator(&s, &md).unwrap();
        let rhs = balanced_numerator_via_triangles(&s, &md).unwrap();
        worst_expansion = worst_expansion.max(ga::norm(&(&lhs - &rhs)) / ga::norm(&lhs).max(1e-300));

        let b = balanced_mean_bivector(&s, &t, v, &OPTS).unwrap().value;
        let n1 = mean_bivector_naive(&s, &t).unwrap();
        let n2 = mean_bivector_naive(&s, &md.reflected_triangle()).unwrap();
        let mean = (n1 + n2).scale(0.5);
        worst_means = worst_means.max(ga::norm(&(&b - &mean)) / ga::norm(&b).max(1e-300));
    }
    outcome(
        worst_expansion <= 1e-10 && worst_means <= 1e-10,
        format!("1000 pairs: expansion worst rel {worst_expansion:.2e}, mean-of-means worst rel {worst_means:.2e}"),
    )
}

fn determinism() -> Outcome {
    let exe = env!("CARGO_BIN_EXE_gasurf");
    let run = |extra: &[&str]| {
        let out = Command::new(exe).arg("schwarz-demo").args(extra).output().expect("spawn gasurf");
        assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
        out.stdout
    };
    let first = run(&[]);
    let second = run(&[]);
    let threaded = run(&["--threads", "4"]);
    let same = first == second && first == threaded;
    outcome(
        same && !first.is_empty(),
        format!("{} bytes; repeat identical {}; --threads 4 identical {}", first.len(), first == second, first == threaded),
    )
}

type Criterion = (&'static str, fn() -> Outcome);

fn main() {
    let criteria: [Criterion; 10] = [
        ("schwarz balanced exactness", schwarz_balanced),
        ("schwarz naive regimes", schwarz_naive),
        ("non-mirror fourth point", fourth_point),
        ("cylinder area sums", cylinder_area),
        ("lantern stress", lantern),
        ("affine exactness", affine_exactness),
        ("GA axioms", ga_axioms),
        ("graph identity", graph_identity),
        ("identity cross-checks", identity_checks),
        ("determinism", determinism),
    ];
    let mut failed = 0;
    for (i, (name, run)) in criteria.iter().enumerate() {
        let o = run();
        if !o.passed {
            failed += 1;
        }
        println!("criterion {:>2} {:<28} {}  {}", i + 1, name, if o.passed { "PASS" } else { "FAIL" }, o.detail);
    }
    println!("acceptance: {} passed, {} failed", criteria.len() - failed, failed);
    if failed > 0 {
        std::process::exit(1);
    }
}
