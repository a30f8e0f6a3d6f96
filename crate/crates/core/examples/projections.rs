//! The three projections used by the solver on small random matrices.

use nalgebra::DMatrix;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rpop::monomial::enumerate_basis;
use rpop::projection::{project_consistency_nonneg, project_face_psd, project_psd, FaceProjector};
use rpop::relax::ConsistencyBlocks;
use rpop::rng::standard_normal_matrix;

fn main() -> rpop::Result<()> {
    let mut rng = ChaCha8Rng::seed_from_u64(7);

    // degree-2 basis in 2 variables: (x0^2, x0 w1, x0 w2, w1^2, w1 w2, w2^2) as a 6 x 6 Gram matrix
    let basis = enumerate_basis(2, 2)?;
    let blocks = ConsistencyBlocks::new(&basis)?;
    let g = standard_normal_matrix(&mut rng, 6, 6);
    let g = (&g + g.transpose()) * 0.5;
    let p = project_consistency_nonneg(&g, &blocks, true, true);
    println!(
        "{} consistency blocks over {} entries",
        blocks.num_blocks(),
        36
    );
    println!("block-mean projection (nonnegative, normalized) = {p}");

    let x = project_psd(&g)?;
    let eig = x.clone().symmetric_eigen().eigenvalues;
    println!("psd projection eigenvalues: {:.4}", eig.transpose());

    // the face {X psd : a^T X = 0} for a = (-1, 1, 1, 0)
    let a = DMatrix::from_row_slice(1, 4, &[-1.0, 1.0, 1.0, 0.0]);
    let fp = FaceProjector::new(&a)?;
    let h = standard_normal_matrix(&mut rng, 4, 4);
    let h = (&h + h.transpose()) * 0.5;
    let y = project_face_psd(&h, &fp)?;
    println!("facial projection = {y}");
    println!("|A Y| = {:.2e}", (&a * &y).norm());
    Ok(())
}
