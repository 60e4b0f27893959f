//! Classifies matrix sequences for uniform Lyapunov regularity.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use resonance_lab::lyapsim;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let tol = 1e-2;
    let scalar = lyapsim::scalar_family(2, 200);
    let split = lyapsim::split_family(200);
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let perturbed = lyapsim::perturb(&scalar, 10.0, &mut rng);
    for (name, seq) in [("scalar", &scalar), ("split", &split), ("perturbed", &perturbed)] {
        let rep = lyapsim::classify_uniform_regularity(seq, tol)?;
        println!(
            "{name:<9} {:?}  (det slope {:.4}, norm slope {:.4})",
            rep.verdict, rep.chi_det, rep.top_exponent
        );
    }
    Ok(())
}
