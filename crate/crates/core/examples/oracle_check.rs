//! The population recursion against the full resonator-qubit propagation.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use namr_cool::oracle::{jc_unitary, kick_oracle};
use namr_cool::{apply_kick, build_kick_map, PhononDistribution};

fn main() -> namr_cool::Result<()> {
    let n_max = 40;
    let u = jc_unitary(1.0, 0.7, n_max);
    let unitarity = (u.adjoint() * &u - nalgebra::DMatrix::identity(u.nrows(), u.ncols())).norm();
    println!("|U^dagger U - 1| = {unitarity:.2e} on {} states", u.nrows());

    let mut rng = ChaCha8Rng::seed_from_u64(1);
    let mut worst = 0.0f64;
    for _ in 0..100 {
        let dist =
            PhononDistribution::from_weights((0..=n_max).map(|_| rng.random::<f64>()).collect())?;
        let theta = rng.random_range(0.0..std::f64::consts::TAU);
        let p_e = [0.0, 0.3, 1.0][rng.random_range(0..3)];
        let fast = apply_kick(&dist, &build_kick_map(1.0, theta, p_e, n_max)?)?.value;
        let slow = kick_oracle(&dist, 1.0, theta, p_e)?.value;
        worst = worst.max(fast.max_abs_diff(&slow));
    }
    println!("largest deviation over 100 random kicks: {worst:.2e}");
    Ok(())
}
