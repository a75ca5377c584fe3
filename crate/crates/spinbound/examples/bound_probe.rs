//! Scratch probe: solve timing and bound quality for the dense path.

use spinbound::config::RelaxationConfig;
use spinbound::model::{ModelFamily, ModelSpec};
use spinbound::sdp::Relaxation;
use std::time::Instant;

fn solve(tag: &str, model: &ModelSpec, cfg: &RelaxationConfig) {
    let t0 = Instant::now();
    let relax = Relaxation::build(model, cfg).expect("build");
    let tb = t0.elapsed().as_secs_f64();
    let dims: Vec<usize> = relax.blocks().iter().map(|b| b.dim()).collect();
    let maxdim = dims.iter().copied().max().unwrap_or(0);
    let t1 = Instant::now();
    match relax.energy_lower_bound() {
        Ok(sol) => {
            let n = model.lattice().site_count() as f64;
            println!(
                "{tag}: vars {} blocks {} maxdim {} eqs {} | build {:.1}s solve {:.1}s iters {} | obj {:.7} cert {:.7} per-spin {:.7} | status {:?} rp {:.2e} rd {:.2e} mineig {:.2e}",
                relax.variables(),
                dims.len(),
                maxdim,
                relax.equalities().len(),
                tb,
                t1.elapsed().as_secs_f64(),
                sol.iterations,
                sol.objective,
                sol.certified,
                sol.certified / n,
                sol.status,
                sol.primal_residual,
                sol.dual_residual,
                sol.min_block_eig,
            );
        }
        Err(e) => println!(
            "{tag}: vars {} blocks {} maxdim {} | build {:.1}s solve {:.1}s | ERROR {e}",
            relax.variables(),
            dims.len(),
            maxdim,
            tb,
            t1.elapsed().as_secs_f64()
        ),
    }
}

fn main() {
    let args: Vec<String> = std::env::args().collect();
    let which = args.get(1).map(String::as_str).unwrap_or("all");

    if which == "chain8" || which == "all" {
        let model = ModelSpec::new(ModelFamily::Chain, 8, 0.0).unwrap();
        let mut unred = RelaxationConfig::default_for(&model);
        unred.translations = false;
        unred.point_group = false;
        unred.axis_permutations = false;
        unred.xi_zero = false;
        unred.eta_zero = false;
        unred.optimality = false;
        unred.commutators = spinbound::config::CommutatorSet::None;
        unred.rdm = vec![];
        solve("ch8-unreduced", &model, &unred);
        let mut red = unred.clone();
        red.translations = true;
        red.point_group = true;
        red.axis_permutations = true;
        red.xi_zero = true;
        red.eta_zero = true;
        solve("ch8-reduced", &model, &red);
    }

    if which == "sq4" || which == "all" {
        let model = ModelSpec::new(ModelFamily::Square, 4, 0.0).unwrap();
        let mut plain = RelaxationConfig::default_for(&model);
        plain.degree = 3;
        plain.rdm = vec![];
        plain.optimality = false;
        plain.commutators = spinbound::config::CommutatorSet::None;
        solve("sq4-d3-plain", &model, &plain);
    }

    if which == "sq4rdm" || which == "all" {
        let model = ModelSpec::new(ModelFamily::Square, 4, 0.0).unwrap();
        let mut cfg = RelaxationConfig::default_for(&model);
        cfg.degree = 3;
        cfg.rdm = vec![2, 3, 4];
        cfg.optimality = false;
        cfg.commutators = spinbound::config::CommutatorSet::None;
        solve("sq4-d3-rdm", &model, &cfg);
    }

    if which == "sq4full" || which == "all" {
        let model = ModelSpec::new(ModelFamily::Square, 4, 0.0).unwrap();
        let mut cfg = RelaxationConfig::full(&model);
        cfg.degree = 3;
        solve("sq4-d3-full", &model, &cfg);
    }

    if which == "sq2check" {
        let model = ModelSpec::new(ModelFamily::Square, 2, 0.0).unwrap();
        let gs = spinbound::oracle::diagonalize(&model).expect("ed");
        for d in [2u32, 3] {
            let mut cfg = RelaxationConfig::full(&model);
            cfg.degree = d;
            let relax = Relaxation::build(&model, &cfg).expect("build");
            let vals = gs.moment_values(relax.interner()).expect("moments");
            let pc = relax.check_point(&vals).expect("check");
            println!(
                "sq2-d{d}-full: blocks {} eqs {} | min_eig {:.3e} max_eq {:.3e} | ED e/spin {:.7}",
                relax.blocks().len(),
                relax.equalities().len(),
                pc.min_block_eig,
                pc.max_equality_residual,
                gs.energy_per_spin()
            );
            for b in relax.blocks() {
                let ev = b
                    .eval_dense(&vals)
                    .self_adjoint_eigenvalues(faer::Side::Lower)
                    .unwrap()[0];
                if ev < -1e-9 {
                    println!("  BAD block {} dim {} mineig {:.3e}", b.label(), b.dim(), ev);
                }
            }
            solve(&format!("sq2-d{d}-full-solve"), &model, &cfg);
        }
    }

    if which == "sq4d2opt" {
        let model = ModelSpec::new(ModelFamily::Square, 4, 0.0).unwrap();
        let mut cfg = RelaxationConfig::default_for(&model);
        cfg.degree = 2;
        cfg.rdm = vec![];
        cfg.optimality = true;
        cfg.commutators = spinbound::config::CommutatorSet::None;
        solve("sq4-d2-opt", &model, &cfg);
    }
}
