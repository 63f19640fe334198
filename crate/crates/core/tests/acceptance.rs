//! Acceptance gate: one line per criterion, non-zero exit if any fails.

use std::f64::consts::PI;
use std::process::ExitCode;

use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};

use topophase::dipole::force_residual;
use topophase::fieldlab::{FieldDescriptor, FieldKind, VectorField};
use topophase::phase::{curl_cross_identity, dynamical_phase, line_phase, phase_vector_field};
use topophase::relkit::{
    boost_spin, duality_map, field_tensor, four_fields, reduced_lagrangian, reduction_gap, rel_lagrangian,
    rel_lagrangian_parts, spin_route_check, FourVector, Kinematics, LorentzBoost, INDUCED_ENERGY_FACTOR,
};
use topophase::scenario::path::{arc_points, circle_points};
use topophase::scenario::ParticleProperties;
use topophase::topocheck::{classify, Classification};
use topophase::veccalc::{FdOrder, FdParams, Rotation};
use topophase::{Path, Scenario, Vec3};

const ALPHA: f64 = 1e-3;
const LAMBDA: f64 = 2.0;
const B0: f64 = 3.0;

type Outcome = Result<String, String>;

fn wire_fields() -> (VectorField, VectorField) {
    let e = FieldDescriptor::new(FieldKind::LineChargeE, &[("lambda", LAMBDA)]).build().unwrap();
    let b = FieldDescriptor::uniform(Vec3::new(0.0, 0.0, B0)).build().unwrap();
    (e, b)
}

fn closed(name: &str, points: Vec<Vec3>) -> Path {
    Path::new(name, points, true, 0.01).unwrap()
}

fn arm(name: &str, r: f64, to: f64) -> Path {
    Path::new(name, arc_points(Vec3::ZERO, r, 0.0, to, 256), false, 0.01).unwrap()
}

fn wire_scenario(paths: Vec<Path>) -> Scenario {
    let (e, b) = wire_fields();
    Scenario::new(ParticleProperties::polarisable(1.0, ALPHA), e, b, paths)
}

fn unit_loop() -> Path {
    closed("loop", circle_points(Vec3::ZERO, 1.0, 256))
}

fn loop_phase(s: &Scenario, p: &Path) -> f64 {
    line_phase(&phase_vector_field(s).unwrap(), p, 1e-10).unwrap().value
}

fn ensure(ok: bool, msg: String) -> Outcome {
    if ok {
        Ok(msg)
    } else {
        Err(msg)
    }
}

fn random_vec(rng: &mut StdRng, r: f64) -> Vec3 {
    Vec3::new(rng.gen_range(-r..r), rng.gen_range(-r..r), rng.gen_range(-r..r))
}

fn random_velocity(rng: &mut StdRng) -> Vec3 {
    loop {
        let v = random_vec(rng, 1.0);
        if v.norm() < 0.99 {
            return v;
        }
    }
}

fn random_unit(rng: &mut StdRng) -> Vec3 {
    loop {
        if let Some(u) = random_vec(rng, 1.0).normalized() {
            return u;
        }
    }
}

/// 1. Winding-integral reproduction.
fn winding_integral() -> Outcome {
    let ellipse = (0..256)
        .map(|k| {
            let t = 2.0 * PI * k as f64 / 256.0;
            Vec3::new(2.0 * t.cos(), t.sin(), 0.0)
        })
        .collect();
    let mut square = Vec::new();
    let corners = [(1.5, -1.5), (1.5, 1.5), (-1.5, 1.5), (-1.5, -1.5)];
    for i in 0..4 {
        let (a, b) = (corners[i], corners[(i + 1) % 4]);
        for k in 0..64 {
            let t = k as f64 / 64.0;
            square.push(Vec3::new(a.0 + (b.0 - a.0) * t, a.1 + (b.1 - a.1) * t, 0.0));
        }
    }
    let loops = [unit_loop(), closed("ellipse", ellipse), closed("square", square)];
    let s = wire_scenario(loops.to_vec());
    let phases: Vec<f64> = loops.iter().map(|p| loop_phase(&s, p)).collect();
    let expected = ALPHA * LAMBDA * B0;
    let mut spread = 0.0f64;
    for a in &phases {
        for b in &phases {
            spread = spread.max((a - b).abs());
        }
    }
    let off = closed("off", circle_points(Vec3::new(3.0, 0.0, 0.0), 1.0, 256));
    let outside = loop_phase(&s, &off);
    let worst = phases.iter().map(|p| (p - expected).abs()).fold(0.0, f64::max);
    ensure(
        spread < 1e-8 && worst < 1e-8 && outside.abs() < 1e-8,
        format!("phases {phases:?} vs {expected:e}; pairwise spread {spread:.1e}; non-enclosing {outside:.1e}"),
    )
}

fn catalog_pairs(rng: &mut StdRng) -> (Vec<(String, VectorField)>, Vec<(String, VectorField)>) {
    let mut linear = || {
        let mut m = [[0.0; 3]; 3];
        for row in &mut m {
            for c in row.iter_mut() {
                *c = rng.gen_range(-1.0..1.0);
            }
        }
        FieldDescriptor::linear(m)
    };
    let axis = Vec3::new(0.3, -0.2, 1.0).normalized().unwrap();
    let es = vec![
        FieldDescriptor::uniform(Vec3::new(0.4, -1.0, 0.7)),
        FieldDescriptor::new(FieldKind::LineChargeE, &[("lambda", 1.3)]).with_axis(Vec3::new(0.1, 0.2, 0.0), axis),
        FieldDescriptor::new(FieldKind::PointChargeE, &[("charge", 2.0)]).with_axis(Vec3::new(0.0, 0.3, -0.2), Vec3::Z),
        linear(),
    ];
    let bs = vec![
        FieldDescriptor::uniform(Vec3::new(-0.5, 0.2, 1.5)),
        FieldDescriptor::new(FieldKind::CurrentWireB, &[("current", 1.7)]).with_axis(Vec3::new(-0.3, 0.0, 0.0), Vec3::Y),
        FieldDescriptor::new(FieldKind::MonopoleLineB, &[("density", 0.9)]).with_axis(Vec3::ZERO, Vec3::X),
        FieldDescriptor::new(FieldKind::SolenoidB, &[("b0", 1.2), ("radius", 1.0)]).with_axis(Vec3::ZERO, Vec3::Z),
        FieldDescriptor::new(FieldKind::PointMonopoleB, &[("charge", -1.5)]).with_axis(Vec3::new(0.2, 0.0, 0.4), Vec3::Z),
        linear(),
    ];
    let build = |ds: Vec<FieldDescriptor>| ds.into_iter().map(|d| (d.kind.name().to_string(), d.build().unwrap())).collect();
    (build(es), build(bs))
}

/// 2. Curl identity versus finite differences, and the sign-swapped variant.
fn curl_identity() -> Outcome {
    let mut rng = StdRng::seed_from_u64(2);
    let (es, bs) = catalog_pairs(&mut rng);
    let p = FdParams::with_order(FdOrder::Fourth);
    let (mut worst, mut advecting, mut variant_failures) = (0.0f64, 0usize, 0usize);
    let mut variant_matches = Vec::new();
    for (en, e) in &es {
        for (bn, b) in &bs {
            let mut n = 0;
            while n < 100 {
                let x = random_vec(&mut rng, 3.0);
                if e.singular_distance(x).min(b.singular_distance(x)) < 0.5 {
                    continue;
                }
                n += 1;
                let id = curl_cross_identity(e, b, x, &p).map_err(|err| format!("{en}/{bn} at {x}: {err}"))?;
                worst = worst.max((id.identity_value - id.fd_value).norm());
                if id.advection().norm() > 1e-6 {
                    advecting += 1;
                    if (id.paper_variant - id.fd_value).norm() > 1e-6 {
                        variant_failures += 1;
                    } else {
                        variant_matches.push(format!("{en}/{bn}@{x}"));
                    }
                }
            }
        }
    }
    let pairs = es.len() * bs.len();
    ensure(
        worst < 1e-6 && variant_failures == advecting && advecting > 0,
        format!(
            "{pairs} pairs x 100 points: max |identity - fd| {worst:.1e}; swapped-sign variant fails at {variant_failures}/{advecting} advecting points{}",
            if variant_matches.is_empty() { String::new() } else { format!(" (matches: {variant_matches:?})") }
        ),
    )
}

/// 3. Tensor, four-vector and closed-form Lagrangians; boost invariance.
fn relativistic_triple() -> Outcome {
    let mut rng = StdRng::seed_from_u64(3);
    let (mut worst, mut worst_boost) = (0.0f64, 0.0f64);
    for _ in 0..1000 {
        let (e, b) = (random_vec(&mut rng, 3.0), random_vec(&mut rng, 3.0));
        let k = Kinematics::new(random_velocity(&mut rng)).unwrap();
        let alpha = rng.gen_range(0.01..5.0);
        let parts = rel_lagrangian_parts(e, b, &k, alpha);
        worst = worst.max(parts.max_discrepancy() / parts.scale);
        rel_lagrangian(e, b, &k, alpha).map_err(|err| err.to_string())?;

        let boost = LorentzBoost::new(random_velocity(&mut rng)).unwrap();
        let f = boost.apply_tensor(&field_tensor(e, b));
        let kb = Kinematics::from_four_velocity(&boost.apply(&k.u)).unwrap();
        let moved = rel_lagrangian_parts(f.electric(), f.magnetic(), &kb, alpha);
        worst_boost = worst_boost.max((moved.tensor - parts.tensor).abs() / parts.scale.max(moved.scale));
    }
    ensure(
        worst <= 1e-12 && worst_boost <= 1e-10,
        format!("1000 samples: max relative disagreement {worst:.1e}; boosted frame {worst_boost:.1e}"),
    )
}

/// 4. Reduction gap scales as v²/(1 − v²).
fn reduction_gap_scaling() -> Outcome {
    let mut rng = StdRng::seed_from_u64(4);
    let (mut worst, mut worst_direct) = (0.0f64, 0.0f64);
    for _ in 0..1000 {
        let e = random_vec(&mut rng, 3.0);
        let b = random_vec(&mut rng, 3.0);
        // Velocity normal to E.
        let raw = random_velocity(&mut rng);
        let e_hat = e.normalized().unwrap();
        let v = raw - e_hat * raw.dot(e_hat);
        let k = Kinematics::new(v).unwrap();
        let alpha = rng.gen_range(0.01..5.0);
        let l_red = reduced_lagrangian(e, b, &k, alpha);
        let gap = reduction_gap(e, b, &k, alpha);
        let v2 = v.norm_squared();
        let expected = v2 / (1.0 - v2);
        worst = worst.max(((gap / l_red) - expected).abs() / expected);
        // Independently from the tensor contraction.
        let direct = rel_lagrangian_parts(e, b, &k, alpha).tensor - l_red;
        let scale = rel_lagrangian_parts(e, b, &k, alpha).scale;
        worst_direct = worst_direct.max((direct - gap).abs() / scale);
    }
    let e = Vec3::new(1.0, 0.0, 0.0);
    let g = |v: f64| reduction_gap(e, Vec3::ZERO, &Kinematics::new(Vec3::new(0.0, v, 0.0)).unwrap(), 1.0);
    let ratio = g(0.01) / g(0.001);
    ensure(
        worst <= 1e-12 && worst_direct <= 1e-12 && (ratio - 100.01).abs() <= 0.01,
        format!(
            "max |gap/L_red - v^2/(1-v^2)| relative {worst:.1e}; tensor-route gap agreement {worst_direct:.1e}; gap(0.01)/gap(0.001) = {ratio:.6}"
        ),
    )
}

/// 5. Induced substitution into the spin Lagrangian.
fn spin_route() -> Outcome {
    let mut rng = StdRng::seed_from_u64(5);
    let (mut worst, mut bare) = (0.0f64, (f64::INFINITY, 0.0f64));
    for _ in 0..1000 {
        let (e, b) = (random_vec(&mut rng, 3.0), random_vec(&mut rng, 3.0));
        let k = Kinematics::new(random_velocity(&mut rng)).unwrap();
        let alpha = rng.gen_range(0.01..5.0);
        let r = spin_route_check(e, b, &k, alpha).map_err(|err| err.to_string())?;
        let scale = rel_lagrangian_parts(e, b, &k, alpha).scale;
        worst = worst.max((r.via_spin - r.via_tensor).abs() / scale);
        bare = (bare.0.min(r.bare_ratio), bare.1.max(r.bare_ratio));
    }
    ensure(
        worst <= 1e-12,
        format!(
            "max |via_spin - via_tensor| relative {worst:.1e} with induced-energy factor {INDUCED_ENERGY_FACTOR}; without it the ratio is {:.12}..{:.12}",
            bare.0, bare.1
        ),
    )
}

/// 6. Duality is an involution on phases; the AC dual gives χλB₀.
fn duality() -> Outcome {
    let ellipse = closed(
        "ellipse",
        (0..128).map(|k| {
            let t = 2.0 * PI * k as f64 / 128.0;
            Vec3::new(1.5 * t.cos(), 0.7 * t.sin(), 0.0)
        }).collect(),
    );
    let s = wire_scenario(vec![unit_loop(), ellipse, arm("upper", 1.0, PI)]);
    let dual = duality_map(&s).map_err(|e| e.to_string())?;
    let twice = duality_map(&dual).map_err(|e| e.to_string())?;
    let mut worst = 0.0f64;
    for p in &s.paths {
        worst = worst.max((loop_phase(&s, p) - loop_phase(&twice, p)).abs());
    }
    let ac = loop_phase(&dual, &dual.paths[0]);
    let expected = dual.particle.chi * LAMBDA * B0;
    ensure(
        worst <= 1e-12 && (ac - expected).abs() < 1e-9 && dual.particle.chi == ALPHA,
        format!("double dual phase drift {worst:.1e}; AC loop phase {ac:e} vs chi*lambda*B0 = {expected:e}"),
    )
}

/// 7. Classification of the four reference scenarios.
fn classification() -> Outcome {
    let wire = wire_scenario(vec![unit_loop(), arm("upper", 1.0, PI), arm("lower", 1.0, -PI)]);
    let c_wire = classify(&wire).map_err(|e| e.to_string())?.classification;

    let uniform = Scenario::new(
        ParticleProperties::polarisable(1.0, ALPHA),
        FieldDescriptor::uniform(Vec3::X).build().unwrap(),
        FieldDescriptor::uniform(Vec3::new(0.0, 0.0, B0)).build().unwrap(),
        vec![unit_loop()],
    );
    let c_uniform = classify(&uniform).map_err(|e| e.to_string())?.classification;

    let tilt = Rotation::from_axis_angle(Vec3::X, 0.3).unwrap();
    let tilted = wire_scenario(vec![unit_loop().rotated(&tilt)]);
    let r_tilted = classify(&tilted).map_err(|e| e.to_string())?;

    let unequal = wire_scenario(vec![unit_loop(), arm("upper", 1.0, PI), arm("lower", 2.0, -PI)]);
    let r_unequal = classify(&unequal).map_err(|e| e.to_string())?;
    let d1 = dynamical_phase(&unequal, &unequal.paths[1], 1e-12).unwrap().value;
    let d2 = dynamical_phase(&unequal, &unequal.paths[2], 1e-12).unwrap().value;
    let ratio = d1 / d2;

    ensure(
        c_wire == Classification::Topological
            && c_uniform == Classification::Trivial
            && !r_tilted.v_perp_b.pass
            && r_tilted.classification != Classification::Topological
            && r_unequal.classification == Classification::DynamicalContaminated
            && (ratio - 2.0).abs() < 1e-6,
        format!(
            "wire {c_wire}; uniform {c_uniform}; tilted {} (v_perp_B max |cos| {:.3}); unequal arms {} with dynamical ratio {ratio:.9}",
            r_tilted.classification, r_tilted.v_perp_b.value, r_unequal.classification
        ),
    )
}

/// 8. Force-free motion on the coaxial loop; the polarisation force is ∇U.
fn force_free() -> Outcome {
    let s = wire_scenario(vec![unit_loop()]);
    let path = &s.paths[0];
    let p = FdParams::with_order(FdOrder::Fourth);
    let (mut magnus, mut grad_err) = (0.0f64, 0.0f64);
    for u in path.sample_parameters(64) {
        let x = path.point(u);
        let f = force_residual(&s, x, path.velocity(u), &p).map_err(|e| e.to_string())?;
        magnus = magnus.max(f.magnus.norm());
        let r = x.x.hypot(x.y);
        let expected = ALPHA * LAMBDA * LAMBDA / (4.0 * PI * PI * r.powi(3));
        grad_err = grad_err.max((f.potential_grad.norm() - expected).abs() / expected);
    }
    ensure(
        magnus < 1e-8 && grad_err < 1e-6,
        format!("64 points: max |v x curl T| {magnus:.1e}; max relative |grad U| error {grad_err:.1e}"),
    )
}

/// 9. Four-vector kinematics.
fn kinematics() -> Outcome {
    let mut rng = StdRng::seed_from_u64(9);
    let mut worst = 0.0f64;
    for _ in 0..1000 {
        let k = Kinematics::new(random_velocity(&mut rng)).unwrap();
        let s = boost_spin(random_unit(&mut rng), &k);
        let ff = four_fields(random_vec(&mut rng, 3.0), random_vec(&mut rng, 3.0), &k);
        let residuals = [
            k.u.dot(&k.u) - 1.0,
            s.dot(&s) + 1.0,
            s.dot(&k.u),
            ff.e4.dot(&k.u),
            ff.b4.dot(&k.u),
        ];
        worst = residuals.iter().fold(worst, |w, r| w.max(r.abs()));
    }
    let b = boost_spin(Vec3::X, &Kinematics::new(Vec3::new(0.6, 0.0, 0.0)).unwrap());
    let target = FourVector::new(0.75, 1.25, 0.0, 0.0);
    let example = (b - target).0.iter().fold(0.0f64, |w, c| w.max(c.abs()));
    ensure(
        worst <= 1e-10 && example <= 1e-12,
        format!("1000 boosts: max invariant residual {worst:.1e}; boost_spin(0.6 x, x) = {:?}", b.0),
    )
}

fn main() -> ExitCode {
    let criteria: [(&str, fn() -> Outcome); 9] = [
        ("winding integral", winding_integral),
        ("curl identity", curl_identity),
        ("relativistic consistency", relativistic_triple),
        ("reduction gap", reduction_gap_scaling),
        ("spin route", spin_route),
        ("duality involution", duality),
        ("topology classification", classification),
        ("force-free certification", force_free),
        ("four-vector kinematics", kinematics),
    ];
    let mut failed = 0;
    for (i, (name, check)) in criteria.iter().enumerate() {
        let outcome = std::panic::catch_unwind(check).unwrap_or_else(|_| Err("panicked".to_string()));
        match outcome {
            Ok(msg) => println!("PASS {}. {name}: {msg}", i + 1),
            Err(msg) => {
                failed += 1;
                println!("FAIL {}. {name}: {msg}", i + 1);
            }
        }
    }
    println!("acceptance: {} of {} criteria passed", criteria.len() - failed, criteria.len());
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
