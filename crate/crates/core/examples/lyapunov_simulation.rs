//! Lyapunov exponents of random CO(p, q) cocycles and their pairing.

use resonance_lab::lyapsim::{self, CocycleModel, SamplerSpec};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    for (p, q) in [(1, 2), (2, 2), (2, 3)] {
        let model = CocycleModel::new(p, q, SamplerSpec::default(), 1)?;
        let est = lyapsim::estimate_exponents(&model, 100_000, 1)?;
        let rep = lyapsim::check_pairing(&est, 5e-2)?;
        let ex: Vec<String> = est.exponents.iter().map(|x| format!("{x:.4}")).collect();
        println!("CO({p},{q}): exponents [{}], chi_hat {:.4}", ex.join(", "), est.chi_hat);
        println!(
            "  max |l_j + l_(n+1-j) - chi_hat| = {:.2e}, determinant residual {:.2e}, pass {}",
            rep.max_exponent_pair_residual(),
            rep.determinant_residual,
            rep.pass
        );
    }

    let model = CocycleModel::new(2, 3, SamplerSpec::default(), 9)?;
    let step = lyapsim::sample_step(&model, &mut model.rng());
    let g = step.matrix(model.n());
    println!("one sampled step: defect of g^T J g = lambda J is {:.1e}", lyapsim::co_defect(&g, 2, 3));
    Ok(())
}
