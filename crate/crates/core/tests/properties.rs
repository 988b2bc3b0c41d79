use manin_toric::counting::{count_points, zeta_from_counts, zeta_partial, HeightMode};
use manin_toric::euler::{euler_constant, EulerConfig};
use manin_toric::generators::{generators_with_check, minimal_generators};
use manin_toric::geometry::lp::iota_lp;
use manin_toric::geometry::newton::{diagonal_face_check, NewtonPolyhedron};
use manin_toric::manin::{manin_constant, ManinConfig};
use manin_toric::polynomial::GeneralizedPolynomial;
use manin_toric::problem::{gf2_rank, hypersurface_weight, toric_weight, ProblemFile, ToricProblem, Variety};
use manin_toric::quadrature::QuadConfig;
use manin_toric::rational::{format_q, Q};
use manin_toric::volume::{sargos_constant, volume_constant};
use manin_toric::Error;
use num_bigint::BigInt;
use num_traits::{One, Zero};
use proptest::prelude::*;

fn q(n: i64) -> Q {
    Q::from_integer(BigInt::from(n))
}

fn qv(v: &[u32]) -> Vec<Q> {
    v.iter().map(|&x| q(x as i64)).collect()
}

/// Relation matrices with one or two rows summing to zero.
fn toric_problem() -> impl Strategy<Value = ToricProblem> {
    (3usize..=5).prop_flat_map(|m| {
        prop::collection::vec(prop::collection::vec(-3i64..=3, m - 1), 1..=2).prop_filter_map("valid", move |rows| {
            let full: Vec<Vec<i64>> = rows
                .into_iter()
                .map(|mut r| {
                    let s: i64 = r.iter().sum();
                    r.push(-s);
                    r
                })
                .collect();
            if full.iter().flatten().any(|x| x.abs() > 6) {
                return None;
            }
            ToricProblem::new(m, full).ok()
        })
    })
}

/// Homogeneous polynomials with a pure power of every variable plus some
/// mixed monomials.
fn elliptic_homogeneous(n: usize, d: i64) -> impl Strategy<Value = GeneralizedPolynomial> {
    let pure = prop::collection::vec(1i64..=10, n);
    let mixed = prop::collection::vec((prop::collection::vec(0i64..=d, n), 1i64..=10), 0..=2);
    (pure, mixed).prop_map(move |(pure, mixed)| {
        let mut terms: Vec<(Vec<Q>, Q)> = pure
            .iter()
            .enumerate()
            .map(|(i, &b)| ((0..n).map(|j| if i == j { q(d) } else { q(0) }).collect(), q(b)))
            .collect();
        for (e, b) in mixed {
            let s: i64 = e.iter().sum();
            if s == d && e.iter().filter(|&&x| x > 0).count() > 1 {
                terms.push((e.iter().map(|&x| q(x)).collect(), q(b)));
            }
        }
        GeneralizedPolynomial::new(n, terms).unwrap()
    })
}

fn brute_sign_count(p: &ToricProblem) -> u64 {
    let m = p.ncoords;
    let mut ok = 0u64;
    for mask in 0u64..(1 << m) {
        let keeps = p.matrix.iter().all(|row| {
            let sign: i64 = row.iter().enumerate().map(|(j, &a)| if mask >> j & 1 == 1 { a } else { 0 }).sum();
            sign % 2 == 0
        });
        if keeps {
            ok += 1;
        }
    }
    ok / 2
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn weights_are_characteristic(p in toric_problem(), nu in prop::collection::vec(0u32..6, 5)) {
        let spec = toric_weight(&p);
        let nu = &nu[..p.ncoords];
        prop_assert_eq!(spec.weight(&vec![0; p.ncoords]), 1);
        prop_assert!(spec.weight(nu) <= 1);
    }

    #[test]
    fn hypersurface_weights_are_characteristic(a in prop::collection::vec(1u64..5, 2..4), nu in prop::collection::vec(0u32..9, 3)) {
        let spec = hypersurface_weight(&a).unwrap();
        prop_assert_eq!(spec.weight(&vec![0; a.len()]), 1);
        prop_assert!(spec.weight(&nu[..a.len()]) <= 1);
    }

    #[test]
    fn sign_count_matches_brute_force_and_gf2(p in toric_problem()) {
        let sc = p.sign_count().unwrap().value;
        prop_assert_eq!(sc, brute_sign_count(&p));
        prop_assert_eq!((1u64 << p.n()) % sc, 0);
        let odd: Vec<u64> = p.matrix.iter()
            .map(|r| r.iter().enumerate().fold(0u64, |acc, (j, &a)| acc | (((a & 1) as u64) << j)))
            .collect();
        prop_assert_eq!(sc, 1u64 << (p.ncoords - 1 - gf2_rank(&odd)));
    }

    #[test]
    fn even_columns_keep_every_sign(p in toric_problem()) {
        let doubled = ToricProblem::new(p.ncoords, p.matrix.iter().map(|r| r.iter().map(|x| 2 * x).collect()).collect()).unwrap();
        prop_assert_eq!(doubled.sign_count().unwrap().value, 1u64 << p.n());
    }

    #[test]
    fn restriction_preserves_degree(p in elliptic_homogeneous(3, 2), a in prop::collection::vec(1u64..4, 2)) {
        let r = p.restrict_to_hypersurface(&a).unwrap();
        prop_assert_eq!(r.top_degree(), p.top_degree());
        prop_assert!(r.is_homogeneous());
    }

    #[test]
    fn ellipticity_witness_is_a_lower_bound(p in elliptic_homogeneous(3, 3), pts in prop::collection::vec(prop::collection::vec(0.0f64..1.0, 3), 64)) {
        let kappa = p.ellipticity_witness().unwrap();
        prop_assert!(kappa > 0.0);
        for x in pts {
            let s: f64 = x.iter().sum();
            if s < 1e-9 { continue; }
            let y: Vec<f64> = x.iter().map(|v| v / s).collect();
            prop_assert!(p.eval(&y) >= kappa);
        }
    }

    #[test]
    fn generators_form_a_closed_antichain(p in toric_problem()) {
        let spec = toric_weight(&p);
        let cap = 8;
        let gens = match minimal_generators(&spec, cap, 1 << 26) {
            Ok(g) => g,
            Err(Error::CapTooSmall { .. }) => return Ok(()),
            Err(e) => return Err(TestCaseError::fail(e.to_string())),
        };
        for (i, a) in gens.iter().enumerate() {
            for (j, b) in gens.iter().enumerate() {
                if i != j {
                    prop_assert!(!a.iter().zip(b).all(|(x, y)| x <= y));
                }
            }
        }
        // every support point up to the cap dominates a generator
        let n = p.ncoords;
        let mut nu = vec![0u32; n];
        loop {
            let total: u32 = nu.iter().sum();
            if total > 0 && total <= cap && spec.weight(&nu) != 0 {
                prop_assert!(gens.iter().any(|g| g.iter().zip(&nu).all(|(x, y)| x <= y)), "{:?}", nu);
            }
            let mut k = 0;
            while k < n {
                nu[k] += 1;
                if nu[k] <= cap { break; }
                nu[k] = 0;
                k += 1;
            }
            if k == n { break; }
        }
        if let Ok(bigger) = minimal_generators(&spec, 2 * cap, 1 << 26) {
            let e = NewtonPolyhedron::from_lattice(&bigger).unwrap();
            for g in &gens {
                prop_assert!(e.contains(&qv(g)));
            }
        }
    }

    #[test]
    fn diagonal_face_invariants(p in toric_problem()) {
        let spec = toric_weight(&p);
        let Ok(set) = generators_with_check(&spec, Some(12), 1 << 26) else { return Ok(()) };
        let Ok(e) = set.polyhedron() else { return Ok(()) };
        let Ok(df) = e.diagonal_face() else { return Ok(()) };
        prop_assert_eq!(&df.iota * &df.t0, Q::one());
        prop_assert!(df.rho >= 1);
        for g in &set.points {
            let v: Q = df.c.iter().zip(g).map(|(c, &x)| c * q(x as i64)).sum();
            prop_assert!(v >= Q::one());
        }
        prop_assert_eq!(&e.support_face(&df.c).unwrap(), &df.face);
        if df.compact {
            prop_assert!(df.c.iter().all(|x| *x > Q::zero()));
        }
        let lp = iota_lp(&e.points).unwrap();
        prop_assert_eq!(&lp.value, &df.iota);
        for g in &set.points {
            let v: Q = lp.c.iter().zip(g).map(|(c, &x)| c * q(x as i64)).sum();
            prop_assert!(v >= Q::one());
        }
    }

    #[test]
    fn problem_json_roundtrip(p in toric_problem(), poly in elliptic_homogeneous(3, 2)) {
        let pf = ProblemFile { matrix: Some(p.matrix.clone()), hypersurface: None, ambient_dimension: None, polynomial: None };
        let back = ProblemFile::from_json(&pf.to_json()).unwrap();
        prop_assert_eq!(&back, &pf);
        prop_assert_eq!(back.variety().unwrap(), Variety::Toric(p));
        let with_poly = ProblemFile {
            matrix: None,
            hypersurface: Some(vec![1, 1]),
            ambient_dimension: None,
            polynomial: Some(manin_toric::problem::PolynomialFile { monomials: poly.monomials.clone() }),
        };
        let back = ProblemFile::from_json(&with_poly.to_json()).unwrap();
        prop_assert_eq!(back.polynomial().unwrap().unwrap(), poly);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(12))]

    #[test]
    fn sargos_is_permutation_invariant(p in elliptic_homogeneous(3, 2), perm in Just(vec![2usize, 0, 1])) {
        let cfg = QuadConfig::default();
        let a = sargos_constant(&p, &cfg).unwrap();
        let terms = p.monomials.iter().map(|m| (perm.iter().map(|&i| m.exponents[i].clone()).collect(), m.coefficient.clone())).collect();
        let pp = GeneralizedPolynomial::new(3, terms).unwrap();
        let b = sargos_constant(&pp, &cfg).unwrap();
        prop_assert!((a.value - b.value).abs() <= 10.0 * (a.error + b.error) + 1e-8 * a.value, "{} vs {}", a.value, b.value);
    }

    #[test]
    fn coefficient_scaling(p in elliptic_homogeneous(2, 2), s in 1i64..6) {
        let cfg = QuadConfig::default();
        let a = sargos_constant(&p, &cfg).unwrap();
        let scaled = GeneralizedPolynomial::new(2, p.monomials.iter().map(|m| (m.exponents.clone(), &m.coefficient * q(s))).collect()).unwrap();
        let b = sargos_constant(&scaled, &cfg).unwrap();
        let sigma0: f64 = a.sigma0.split('/').map(|x| x.parse::<f64>().unwrap()).reduce(|x, y| x / y).unwrap();
        let expect = a.value * (s as f64).powf(-sigma0);
        prop_assert!((b.value - expect).abs() <= 1e-7 * expect, "{} vs {}", b.value, expect);
    }

    #[test]
    fn repetition_order_invariance(seed in 0u64..1000) {
        let pts = vec![vec![q(2), q(0), q(1)], vec![q(0), q(2), q(1)], vec![q(1), q(1), q(2)]];
        let mult = vec![1u32, 2, 1];
        let b = vec![q(1), q(3), q(2)];
        let mut order: Vec<usize> = (0..3).collect();
        let k = (seed % 6) as usize;
        order.rotate_left(k % 3);
        if k >= 3 { order.swap(0, 1); }
        let cfg = QuadConfig::default();
        let base = volume_constant(&pts, &mult, &b, &cfg).unwrap();
        let re = volume_constant(
            &order.iter().map(|&i| pts[i].clone()).collect::<Vec<_>>(),
            &order.iter().map(|&i| mult[i]).collect::<Vec<_>>(),
            &b,
            &cfg,
        ).unwrap();
        prop_assert!((base.value - re.value).abs() <= 1e-9 * base.value, "{} vs {}", base.value, re.value);
    }

    #[test]
    fn hypersurface_counter_agrees_with_generic(a in prop::collection::vec(1u64..4, 2..=3), t in 2.0f64..40.0, sup in any::<bool>()) {
        let generic = Variety::Toric(ToricProblem::hypersurface(&a).unwrap());
        let fast = Variety::Hypersurface(a.clone());
        let n = a.len() + 1;
        let p = GeneralizedPolynomial::diagonal(n, 2);
        let (mode, poly) = if sup { (HeightMode::SupNorm, None) } else { (HeightMode::Polynomial, Some(&p)) };
        let x = count_points(&generic, poly, t, mode, 1e9).unwrap();
        let y = count_points(&fast, poly, t, mode, 1e9).unwrap();
        prop_assert_eq!(x.n, y.n);
    }

    #[test]
    fn counts_are_monotone_and_sandwiched(t in 2.0f64..60.0, b in prop::collection::vec(1i64..5, 3)) {
        let v = Variety::Hypersurface(vec![1, 1]);
        let p = GeneralizedPolynomial::new(3, (0..3).map(|i| ((0..3).map(|j| q(if i == j { 2 } else { 0 })).collect(), q(b[i]))).collect()).unwrap();
        let now = count_points(&v, Some(&p), t, HeightMode::Polynomial, 1e9).unwrap().n;
        let later = count_points(&v, Some(&p), t * 1.1, HeightMode::Polynomial, 1e9).unwrap().n;
        prop_assert!(now <= later);
        // κ max^d <= P(m) <= (Σ b) max^d with κ = min b
        let kappa = *b.iter().min().unwrap() as f64;
        let upper = b.iter().sum::<i64>() as f64;
        let sup = |s: f64| if s < 1.0 { 0 } else { count_points(&v, None, s, HeightMode::SupNorm, 1e9).unwrap().n };
        prop_assert!(sup(t / upper.sqrt() * (1.0 - 1e-12)) <= now);
        prop_assert!(now <= sup(t / kappa.sqrt() * (1.0 + 1e-12)));
    }

    #[test]
    fn stieltjes_sums_match_direct_sums(cut in 5u32..60, s in 1.2f64..3.0) {
        let v = Variety::Hypersurface(vec![1, 1]);
        let counts: Vec<_> = (1..=cut).map(|t| count_points(&v, None, t as f64, HeightMode::SupNorm, 1e9).unwrap()).collect();
        let (lower, upper) = zeta_from_counts(&counts, s);
        let z = zeta_partial(&v, None, &[s], cut as f64, HeightMode::SupNorm, 1.0, 1, 1e9).unwrap();
        let direct = z.probes[0].partial;
        // integer sup heights sit exactly on the grid
        prop_assert!((direct - lower).abs() <= 1e-12 * direct, "{direct} vs {lower}");
        prop_assert!(upper >= direct);
    }
}

#[test]
fn sign_scaling_multiplies_counts() {
    let base = ToricProblem::new(3, vec![vec![1, 1, -2]]).unwrap();
    let other = ToricProblem::new(3, vec![vec![2, 2, -4]]).unwrap();
    let x = count_points(&Variety::Toric(base.clone()), None, 50.0, HeightMode::SupNorm, 1e9).unwrap();
    let y = count_points(&Variety::Toric(other.clone()), None, 50.0, HeightMode::SupNorm, 1e9).unwrap();
    assert_eq!(x.primitive, y.primitive);
    assert_eq!(y.n * base.sign_count().unwrap().value, x.n * other.sign_count().unwrap().value);
}

#[test]
fn supporting_faces_meet_diagonal() {
    let gens = vec![vec![3, 0, 1], vec![0, 2, 2], vec![1, 1, 1], vec![4, 4, 0]];
    let e = NewtonPolyhedron::from_lattice(&gens).unwrap();
    let df = e.diagonal_face().unwrap();
    for f in &e.facets {
        if let Ok(o) = diagonal_face_check(&e, &f.normal_q(), &df.iota) {
            assert!(o.consistent());
        }
    }
}

#[test]
fn euler_product_choice_independence() {
    let p = ToricProblem::new(3, vec![vec![1, 1, -2]]).unwrap();
    let spec = toric_weight(&p);
    let gens = vec![vec![2, 0, 1], vec![0, 2, 1]];
    let cfg = EulerConfig { prime_cutoff: 20_000, ..Default::default() };
    let c1 = vec![Q::new(1.into(), 3.into()); 3];
    let c2 = vec![Q::new(1.into(), 4.into()), Q::new(1.into(), 4.into()), Q::new(1.into(), 2.into())];
    let a = euler_constant(&spec, &c1, 2, &gens, &cfg).unwrap();
    let b = euler_constant(&spec, &c2, 2, &gens, &cfg).unwrap();
    assert!(a.value > 0.0 && b.value > 0.0);
    assert!((a.value - b.value).abs() <= a.error + b.error + 1e-12, "{} vs {}", a.value, b.value);
}

#[test]
fn euler_error_does_not_grow_with_cutoff() {
    let spec = hypersurface_weight(&[1, 1]).unwrap();
    let gens = vec![vec![2, 0], vec![0, 2]];
    let c = vec![Q::new(1.into(), 2.into()); 2];
    let mut last = f64::INFINITY;
    for cut in [500u64, 1000, 2000, 4000, 8000] {
        let r = euler_constant(&spec, &c, 2, &gens, &EulerConfig { prime_cutoff: cut, ..Default::default() }).unwrap();
        assert!(r.value > 0.0);
        assert!(r.error <= last * (1.0 + 1e-12), "{cut}: {} > {last}", r.error);
        last = r.error;
    }
}

#[test]
fn reports_are_thread_count_independent() {
    let p = GeneralizedPolynomial::parse("X1^2+X2^2+X3^2", None).unwrap();
    let v = Variety::Hypersurface(vec![1, 1]);
    let cfg = ManinConfig { euler: EulerConfig { prime_cutoff: 3000, ..Default::default() }, ..Default::default() };
    let run = |threads: usize| {
        let pool = rayon::ThreadPoolBuilder::new().num_threads(threads).build().unwrap();
        pool.install(|| {
            let c = count_points(&v, Some(&p), 400.0, HeightMode::Polynomial, 1e9).unwrap();
            let z = zeta_partial(&v, Some(&p), &[1.5, 1.1], 400.0, HeightMode::Polynomial, 1.0, 1, 1e9).unwrap();
            let m = manin_constant(&v, Some(&p), HeightMode::Polynomial, &cfg).unwrap();
            serde_json::to_string(&(c, z, m)).unwrap()
        })
    };
    let one = run(1);
    assert_eq!(one, run(4));
    assert_eq!(one, run(8));
    assert!(!one.contains("elapsed"));
    let _ = format_q(&q(1));
}
