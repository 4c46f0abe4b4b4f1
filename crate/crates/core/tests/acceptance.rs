//! One line per acceptance criterion. Criteria 1-9 are hard gates and fail
//! the target; 10 is reported only; 11 and 12 need `QJET_DATASET` pointing at
//! a converted JSONL file or QJET1 cache.

use std::f64::consts::PI;
use std::process::ExitCode;
use std::time::Instant;

use num_complex::Complex64;
use rand::seq::IndexedRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use qjet::classical::{egnn_layer, GraphBatch, GraphLayer};
use qjet::data::{build_dataset, engineer_features, particle_mass, synth_jets, DatasetConfig, DatasetSplit, FeaturedJet, RawParticle, NUM_FEATURES};
use qjet::metrics::roc_auc;
use qjet::model::{cross_entropy, Model, ModelKind, ModelSpec};
use qjet::nn::ParamStore;
use qjet::quantum::{amplitude_sum, cayley, coupling_hamiltonian, coupling_hamiltonian_literal, layer_unitary, product_state, transverse_hamiltonian};
use qjet::tensor::{Activation, CMatrix, Graph};
use qjet::train::{train_model, TrainConfig};

enum Gate {
    Hard,
    Soft,
}

enum Outcome {
    Pass(String),
    Fail(String),
    Skip(String),
}

fn check(ok: bool, detail: String) -> Outcome {
    if ok {
        Outcome::Pass(detail)
    } else {
        Outcome::Fail(detail)
    }
}

fn random_symmetric(rng: &mut ChaCha8Rng, n: usize) -> Vec<f64> {
    let mut a = vec![0.0; n * n];
    for i in 0..n {
        for j in i + 1..n {
            let v = rng.random_range(0.0..3.0);
            a[i * n + j] = v;
            a[j * n + i] = v;
        }
    }
    a
}

/// `(1/4) Σ_{j<k} a_jk (I − Z_j Z_k)` from explicit Kronecker products.
fn reduced_oracle(a: &[f64], n: usize) -> CMatrix {
    let dim = 1 << n;
    let z = CMatrix::diag(&[Complex64::new(1.0, 0.0), Complex64::new(-1.0, 0.0)]);
    let eye2 = CMatrix::identity(2);
    let mut h = CMatrix::zeros(dim, dim);
    for j in 0..n {
        for k in j + 1..n {
            let zz = (0..n).fold(CMatrix::identity(1), |acc, q| acc.kron(if q == j || q == k { &z } else { &eye2 }));
            let term = CMatrix::identity(dim).sub(&zz).unwrap().scale(Complex64::new(0.25 * a[j * n + k], 0.0));
            h = h.add(&term).unwrap();
        }
    }
    h
}

fn criterion_1() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    let mut worst: f64 = 0.0;
    for n in [2, 3] {
        for _ in 0..100 {
            let a = random_symmetric(&mut rng, n);
            let oracle = reduced_oracle(&a, n);
            worst = worst.max(coupling_hamiltonian_literal(&a, n).unwrap().max_abs_diff(&oracle));
            worst = worst.max(coupling_hamiltonian(&a, n).unwrap().max_abs_diff(&oracle));
        }
    }
    check(worst <= 1e-12, format!("max entry error {worst:.1e} over 200 random couplings"))
}

fn random_jet(rng: &mut ChaCha8Rng, n: usize, label: u8) -> FeaturedJet {
    let h = (0..n).map(|_| std::array::from_fn(|_| rng.random_range(-1.0..1.0))).collect();
    let x: Vec<[f64; 2]> = (0..n).map(|_| [rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0)]).collect();
    let mut a = vec![0.0; n * n];
    for i in 0..n {
        for j in 0..n {
            a[i * n + j] = (x[i][0] - x[j][0]).hypot(x[i][1] - x[j][1]);
        }
    }
    FeaturedJet { h, x, a, label }
}

fn criterion_2() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    let mut store = ParamStore::new();
    let layer = GraphLayer::new(&mut store, &mut rng, "l", NUM_FEATURES, 10, true, Activation::Softplus);
    let jet = random_jet(&mut rng, 3, 0);
    let run = |x: &[[f64; 2]]| {
        let g = Graph::new();
        let p = store.bind(&g);
        let moved = FeaturedJet { x: x.to_vec(), ..jet.clone() };
        let batch = GraphBatch::new(&g, &[&moved]).unwrap();
        let (h, x) = egnn_layer(&p, &layer, &batch.h, &batch.x, &batch).unwrap();
        (h.values(), x.values())
    };
    let (h0, x0) = run(&jet.x);
    let (mut dh, mut dx): (f64, f64) = (0.0, 0.0);
    for _ in 0..200 {
        let t: f64 = rng.random_range(-PI..PI);
        let (c, s) = (t.cos(), t.sin());
        let shift = [rng.random_range(-5.0..5.0), rng.random_range(-5.0..5.0)];
        let g = |p: [f64; 2]| [c * p[0] - s * p[1] + shift[0], s * p[0] + c * p[1] + shift[1]];
        let moved: Vec<[f64; 2]> = jet.x.iter().map(|&p| g(p)).collect();
        let (h1, x1) = run(&moved);
        dh = dh.max(h0.iter().zip(&h1).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max));
        for (i, row) in x1.chunks_exact(2).enumerate() {
            let want = g([x0[2 * i], x0[2 * i + 1]]);
            dx = dx.max((row[0] - want[0]).abs()).max((row[1] - want[1]).abs());
        }
    }
    check(dh <= 1e-9 && dx <= 1e-9, format!("200 rotations+translations: feature drift {dh:.1e}, coordinate error {dx:.1e}"))
}

fn criterion_3() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let mut worst: f64 = 0.0;
    let mut cases = 0;
    for _ in 0..50 {
        for k in 1..=4 {
            let factors: Vec<[Complex64; 2]> =
                (0..k).map(|_| std::array::from_fn(|_| Complex64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0)))).collect();
            // Σ over the product state is Π (a_i + b_i), independent of order.
            let oracle = factors.iter().fold(Complex64::new(1.0, 0.0), |acc, v| acc * (v[0] + v[1]));
            for perm in permutations(k) {
                let ordered: Vec<[Complex64; 2]> = perm.iter().map(|&i| factors[i]).collect();
                worst = worst.max((amplitude_sum(&product_state(&ordered)) - oracle).norm());
                cases += 1;
            }
        }
    }
    check(worst <= 1e-12, format!("{cases} permuted products: max deviation {worst:.1e}"))
}

fn permutations(k: usize) -> Vec<Vec<usize>> {
    if k == 0 {
        return vec![vec![]];
    }
    let mut out = Vec::new();
    for p in permutations(k - 1) {
        for pos in 0..=p.len() {
            let mut q = p.clone();
            q.insert(pos, k - 1);
            out.push(q);
        }
    }
    out
}

fn criterion_4() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    let mut defect: f64 = 0.0;
    let h_t = transverse_hamiltonian(3);
    for _ in 0..100 {
        let g = Graph::new();
        let a = random_symmetric(&mut rng, 3);
        let h_c = g.matrix_constant(&coupling_hamiltonian(&a, 3).unwrap());
        let h_t = g.matrix_constant(&h_t);
        let u = layer_unitary(&g.scalar(rng.random_range(-2.0..2.0)), &g.scalar(rng.random_range(-2.0..2.0)), &h_c, &h_t).unwrap();
        defect = defect.max(u.to_matrix().unitarity_defect());
        let re: Vec<f64> = (0..64).map(|_| rng.random_range(-1.0..1.0)).collect();
        let im: Vec<f64> = (0..64).map(|_| rng.random_range(-1.0..1.0)).collect();
        let c = cayley(&g.complex_constant(&[8, 8], re, im).unwrap()).unwrap();
        defect = defect.max(c.to_matrix().unitarity_defect());
    }
    let mut norm_err: f64 = 0.0;
    for kind in [ModelKind::Qgnn, ModelKind::Eqgnn] {
        for seed in 0..10 {
            let model = Model::new(ModelSpec::default_for(kind), seed).unwrap();
            let q = model.quantum().unwrap();
            let jet = random_jet(&mut rng, 3, 0);
            let g = Graph::new();
            let p = model.params.bind(&g);
            for psi in q.evolve(&p, &jet).unwrap() {
                let n2: f64 = psi.values().iter().map(|z| z.norm_sqr()).sum();
                norm_err = norm_err.max((n2.sqrt() - 1.0).abs());
            }
        }
    }
    check(
        defect <= 1e-10 && norm_err <= 1e-10,
        format!("max ‖U†U − I‖_F {defect:.1e} over 200 unitaries; max |‖ψ‖ − 1| {norm_err:.1e} across 6 layers"),
    )
}

fn mean_loss(model: &Model, jets: &[FeaturedJet]) -> f64 {
    let labels: Vec<u8> = jets.iter().map(|j| j.label).collect();
    cross_entropy(&model.predict(jets).unwrap(), &labels)
}

/// Compares every gradient entry with a central difference of step 1e-6.
///
/// Each entry must agree to 1e-4 relative, plus the rounding bound of the
/// difference quotient itself, `4 ε |L| / h`: with `|L| ≈ 7` that is about
/// 6e-9, which exceeds 1e-4 of the smallest gradients. Returns the worst
/// relative error among entries above that bound's resolution, the entries
/// that miss the bare 1e-4 test, the entries that fail with the allowance,
/// and the entry count.
fn gradient_check(kind: ModelKind, jets: &[FeaturedJet]) -> (f64, usize, usize, usize) {
    const STEP: f64 = 1e-6;
    let mut model = Model::new(ModelSpec::default_for(kind), 5).unwrap();
    let refs: Vec<&FeaturedJet> = jets.iter().collect();
    let out = model.loss_and_grad(&refs).unwrap();
    let rounding = 4.0 * f64::EPSILON * out.loss.abs() / STEP;
    let base = model.params.flat();
    let (mut worst, mut strict_misses, mut bad) = (0.0f64, 0, 0);
    for (k, &a) in out.grad.iter().enumerate() {
        let mut v = base.clone();
        v[k] = base[k] + STEP;
        model.params.set_flat(&v).unwrap();
        let plus = mean_loss(&model, jets);
        v[k] = base[k] - STEP;
        model.params.set_flat(&v).unwrap();
        let minus = mean_loss(&model, jets);
        let numeric = (plus - minus) / (2.0 * STEP);
        let scale = a.abs().max(numeric.abs());
        let err = (a - numeric).abs();
        if scale * 1e-4 >= rounding {
            worst = worst.max(err / scale);
        }
        if err > 1e-4 * scale {
            strict_misses += 1;
        }
        if err > 1e-4 * scale + rounding {
            bad += 1;
        }
    }
    model.params.set_flat(&base).unwrap();
    (worst, strict_misses, bad, out.grad.len())
}

fn criterion_5() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let jets: Vec<FeaturedJet> = (0..3).map(|k| random_jet(&mut rng, 3, (k % 2) as u8)).collect();
    let mut parts = Vec::new();
    let mut ok = true;
    for kind in ModelKind::ALL {
        let (worst, strict, bad, n) = gradient_check(kind, &jets);
        ok &= bad == 0;
        parts.push(format!("{kind} {n} entries, worst rel {worst:.1e}, {strict} miss bare 1e-4 (all within rounding), {bad} failing"));
    }
    check(ok, parts.join("; "))
}

fn mann_whitney(scores: &[f64], labels: &[u8]) -> f64 {
    let (mut wins, mut pairs) = (0.0, 0.0);
    for (i, &si) in scores.iter().enumerate() {
        for (j, &sj) in scores.iter().enumerate() {
            if labels[i] == 1 && labels[j] == 0 {
                pairs += 1.0;
                wins += if si > sj { 1.0 } else if si == sj { 0.5 } else { 0.0 };
            }
        }
    }
    wins / pairs
}

fn criterion_6() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(6);
    let mut worst: f64 = 0.0;
    for _ in 0..100 {
        let n = rng.random_range(2..300);
        let mut labels: Vec<u8> = (0..n).map(|_| rng.random_range(0..=1)).collect();
        labels[0] = 0;
        labels[1] = 1;
        // coarse grid so ties occur
        let scores: Vec<f64> = (0..n).map(|_| rng.random_range(0..20) as f64 / 19.0).collect();
        worst = worst.max((roc_auc(&scores, &labels).unwrap().1 - mann_whitney(&scores, &labels)).abs());
    }
    let hand = roc_auc(&[0.8, 0.4, 0.6, 0.2], &[1, 1, 0, 0]).unwrap().1;
    check(worst <= 1e-12 && hand == 0.75, format!("max |trapezoid − pairwise| {worst:.1e} over 100 sets; hand case {hand}"))
}

fn criterion_7() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let mut worst: f64 = 0.0;
    for kind in [ModelKind::Gnn, ModelKind::Egnn] {
        for seed in 0..5 {
            let model = Model::new(ModelSpec::default_for(kind), seed).unwrap();
            let jets: Vec<FeaturedJet> = (0..4).map(|_| random_jet(&mut rng, 3, 0)).collect();
            let base = model.predict(&jets).unwrap();
            for perm in permutations(3) {
                let moved: Vec<FeaturedJet> = jets.iter().map(|j| j.permuted(&perm)).collect();
                for (a, b) in base.iter().zip(model.predict(&moved).unwrap()) {
                    worst = worst.max((a[0] - b[0]).abs()).max((a[1] - b[1]).abs());
                }
            }
        }
    }
    check(worst <= 1e-12, format!("max logit change {worst:.1e} over all node permutations"))
}

fn criterion_8() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    let species = [22, 11, -11, 13, 111, 211, -211, 130, 310, 321, -321, 2112, 2212, -2212];
    let mut worst: f64 = 0.0;
    for _ in 0..10_000 {
        let pdg_id = *species.choose(&mut rng).unwrap();
        let p = RawParticle { pt: 10f64.powf(rng.random_range(-2.0..3.0)), y: rng.random_range(-4.0..4.0), phi: rng.random_range(-PI..PI), pdg_id };
        let f = engineer_features(&p).unwrap();
        let m = particle_mass(pdg_id).unwrap();
        let (e, px, py, pz) = (f[4], f[5], f[6], f[7]);
        let rel = (e * e - (px * px + py * py + pz * pz) - m * m).abs() / (e * e);
        worst = worst.max(rel);
    }
    check(worst <= 1e-9, format!("max |E² − |p|² − m²| / E² = {worst:.1e} over 10000 particles"))
}

fn small_split(seed: u64) -> DatasetSplit {
    let cfg = DatasetConfig { n_train: 48, n_val: 16, n_test: 16, ..DatasetConfig::default() };
    build_dataset(&synth_jets(120, seed), &cfg).unwrap().0
}

fn criterion_9() -> Outcome {
    let data = small_split(9);
    let mut parts = Vec::new();
    let mut ok = true;
    for kind in ModelKind::ALL {
        let cfg = TrainConfig { epochs: 2, checkpoint_start: 1, batch_size: 8, ..TrainConfig::default_for(kind) };
        let run = || {
            let mut m = Model::new(ModelSpec::default_for(kind), 11).unwrap();
            let r = train_model(&mut m, &data, &cfg).unwrap();
            (r.without_timing(), m.params.flat())
        };
        let (r1, w1) = run();
        let (r2, w2) = run();
        let same = serde_json::to_string(&r1).unwrap() == serde_json::to_string(&r2).unwrap()
            && r1 == r2
            && w1.iter().zip(&w2).all(|(a, b)| a.to_bits() == b.to_bits());
        ok &= same;
        parts.push(format!("{kind} {}", if same { "identical" } else { "DIFFERS" }));
    }
    check(ok, parts.join(", "))
}

/// Mean node features plus mean edge weight, fitted by full-batch gradient
/// descent on the logistic loss.
fn logistic_baseline(data: &DatasetSplit) -> f64 {
    let feats = |j: &FeaturedJet| -> Vec<f64> {
        let n = j.n_nodes() as f64;
        let mut v: Vec<f64> = (0..NUM_FEATURES).map(|c| j.h.iter().map(|r| r[c]).sum::<f64>() / n).collect();
        v.push(j.a.iter().sum::<f64>() / (n * (n - 1.0)));
        v.push(1.0);
        v
    };
    let train: Vec<(Vec<f64>, f64)> = data.train.iter().map(|j| (feats(j), j.label as f64)).collect();
    let mut w = vec![0.0; NUM_FEATURES + 2];
    for _ in 0..3000 {
        let mut grad = vec![0.0; w.len()];
        for (x, y) in &train {
            let z: f64 = x.iter().zip(&w).map(|(a, b)| a * b).sum();
            let p = 1.0 / (1.0 + (-z).exp());
            for (g, xi) in grad.iter_mut().zip(x) {
                *g += (p - y) * xi / train.len() as f64;
            }
        }
        for (wi, g) in w.iter_mut().zip(&grad) {
            *wi -= 2.0 * g;
        }
    }
    let scores: Vec<f64> = data.test.iter().map(|j| feats(j).iter().zip(&w).map(|(a, b)| a * b).sum()).collect();
    let labels: Vec<u8> = data.test.iter().map(|j| j.label).collect();
    roc_auc(&scores, &labels).unwrap().1
}

fn criterion_10() -> Outcome {
    let cfg = DatasetConfig { n_train: 1600, n_val: 200, n_test: 200, ..DatasetConfig::default() };
    let data = build_dataset(&synth_jets(2000, 10), &cfg).unwrap().0;
    let baseline = logistic_baseline(&data);
    let mut parts = vec![format!("logistic baseline {baseline:.3}")];
    let mut ok = baseline > 0.85;
    for kind in ModelKind::ALL {
        let mut m = Model::new(ModelSpec::default_for(kind), 0).unwrap();
        let t0 = Instant::now();
        let report = train_model(&mut m, &data, &TrainConfig::default_for(kind)).unwrap();
        let auc = report.test.auc.unwrap_or(f64::NAN);
        ok &= auc >= 0.9;
        parts.push(format!("{kind} {auc:.3} ({:.0}s)", t0.elapsed().as_secs_f64()));
    }
    check(ok, parts.join(", "))
}

/// Reference test AUC (%) and train accuracy (%) at |Θ| ≈ 5100.
fn reference(kind: ModelKind) -> (f64, f64) {
    match kind {
        ModelKind::Gnn => (63.36, 74.25),
        ModelKind::Egnn => (67.88, 73.66),
        ModelKind::Qgnn => (61.43, 74.00),
        ModelKind::Eqgnn => (75.17, 74.42),
    }
}

struct FullScale {
    /// `[model][seed]` test AUC and final-epoch train accuracy.
    runs: Vec<(ModelKind, Vec<(f64, f64)>)>,
}

fn full_scale_runs(path: &str) -> Result<FullScale, String> {
    let cfg = DatasetConfig::default();
    let data = match qjet::runner::load_jets(std::path::Path::new(path)).map_err(|e| e.to_string())? {
        qjet::runner::LoadedJets::Raw(raw) => build_dataset(&raw, &cfg).map_err(|e| e.to_string())?.0,
        qjet::runner::LoadedJets::Cached { jets, scale } => qjet::data::split_featured(jets, &cfg, scale).map_err(|e| e.to_string())?,
    };
    let mut runs = Vec::new();
    for kind in ModelKind::ALL {
        let mut per_seed = Vec::new();
        for seed in 0..3u64 {
            let mut m = Model::new(ModelSpec::default_for(kind), seed).map_err(|e| e.to_string())?;
            let train = TrainConfig { shuffle_seed: seed ^ 0x9e37_79b9_7f4a_7c15, ..TrainConfig::default_for(kind) };
            let r = train_model(&mut m, &data, &train).map_err(|e| e.to_string())?;
            per_seed.push((100.0 * r.test.auc.unwrap_or(f64::NAN), 100.0 * r.history.last().unwrap().train_acc));
        }
        runs.push((kind, per_seed));
    }
    Ok(FullScale { runs })
}

fn criterion_11(full: &Option<Result<FullScale, String>>) -> Outcome {
    let full = match full {
        None => return Outcome::Skip("set QJET_DATASET to a converted dataset to run".into()),
        Some(Err(e)) => return Outcome::Fail(format!("could not run: {e}")),
        Some(Ok(f)) => f,
    };
    let mean = |k: ModelKind| {
        let r = &full.runs.iter().find(|(m, _)| *m == k).unwrap().1;
        r.iter().map(|x| x.0).sum::<f64>() / r.len() as f64
    };
    let seeds_where = |a: ModelKind, b: ModelKind| {
        let ra = &full.runs.iter().find(|(m, _)| *m == a).unwrap().1;
        let rb = &full.runs.iter().find(|(m, _)| *m == b).unwrap().1;
        ra.iter().zip(rb).filter(|(x, y)| x.0 > y.0).count()
    };
    let mut ok = true;
    let mut parts = Vec::new();
    for kind in ModelKind::ALL {
        let m = mean(kind);
        ok &= (m - reference(kind).0).abs() <= 7.0;
        parts.push(format!("{kind} {m:.2}"));
    }
    let (eg, eq) = (seeds_where(ModelKind::Egnn, ModelKind::Gnn), seeds_where(ModelKind::Eqgnn, ModelKind::Qgnn));
    ok &= eg >= 2 && eq >= 2;
    parts.push(format!("EGNN>GNN in {eg}/3 seeds, EQGNN>QGNN in {eq}/3"));
    check(ok, parts.join(", "))
}

fn criterion_12(full: &Option<Result<FullScale, String>>) -> Outcome {
    let full = match full {
        None => return Outcome::Skip("set QJET_DATASET to a converted dataset to run".into()),
        Some(Err(e)) => return Outcome::Fail(format!("could not run: {e}")),
        Some(Ok(f)) => f,
    };
    let mut ok = true;
    let mut parts = Vec::new();
    for (kind, runs) in &full.runs {
        let acc = runs.iter().map(|x| x.1).sum::<f64>() / runs.len() as f64;
        ok &= (acc - reference(*kind).1).abs() <= 5.0 && (65.0..=83.0).contains(&acc);
        parts.push(format!("{kind} train acc {acc:.2}%"));
    }
    check(ok, parts.join(", "))
}

fn main() -> ExitCode {
    let start = Instant::now();
    let mut hard_failures = 0;
    let mut report = |id: usize, name: &str, gate: Gate, outcome: Outcome| {
        let tag = match gate {
            Gate::Hard => "hard",
            Gate::Soft => "soft",
        };
        let (status, detail) = match outcome {
            Outcome::Pass(d) => ("PASS", d),
            Outcome::Fail(d) => {
                if matches!(gate, Gate::Hard) {
                    hard_failures += 1;
                }
                ("FAIL", d)
            }
            Outcome::Skip(d) => ("SKIP", d),
        };
        println!("criterion {id:>2} [{tag}] {status}  {name}: {detail}");
    };

    report(1, "coupling Hamiltonian identity", Gate::Hard, criterion_1());
    report(2, "EGNN layer SE(2) equivariance", Gate::Hard, criterion_2());
    report(3, "Kronecker amplitude-sum permutation invariance", Gate::Hard, criterion_3());
    report(4, "unitarity and state norm", Gate::Hard, criterion_4());
    report(5, "gradient fidelity", Gate::Hard, criterion_5());
    report(6, "AUC oracle", Gate::Hard, criterion_6());
    report(7, "classical permutation invariance", Gate::Hard, criterion_7());
    report(8, "mass-shell identity", Gate::Hard, criterion_8());
    report(9, "determinism", Gate::Hard, criterion_9());
    let hard_time = start.elapsed().as_secs_f64();
    report(10, "synthetic separability", Gate::Soft, criterion_10());
    let full = std::env::var("QJET_DATASET").ok().map(|p| full_scale_runs(&p));
    report(11, "full-scale test AUC", Gate::Soft, criterion_11(&full));
    report(12, "full-scale train accuracy", Gate::Soft, criterion_12(&full));
    println!("hard gates took {hard_time:.1}s, total {:.1}s", start.elapsed().as_secs_f64());

    if hard_failures == 0 {
        ExitCode::SUCCESS
    } else {
        println!("{hard_failures} hard gate(s) failed");
        ExitCode::FAILURE
    }
}
