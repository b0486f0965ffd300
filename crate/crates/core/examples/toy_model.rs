//! Runs the two-region toy problem and prints the selected coefficients.

use nalgebra::DVector;
use opkernel::{
    gaussian_weights, graph_laplacian, multistart_solve, within_view_embed, InnerObjective,
    InputPoint, KernelConfig, LossKind, ProblemInputs, ProblemSpec, SolveConfig, SpaceDims,
};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let coords = [
        ([0.5377, 0.3978], 1u8),
        ([0.6342, -0.4584], 2),
        ([0.3273, 0.3923], 1),
        ([0.3472, 0.4305], 1),
        ([0.6724, -0.7962], 2),
        ([0.8174, -0.3601], 2),
    ];
    let points: Vec<InputPoint> = coords
        .iter()
        .map(|(c, r)| InputPoint::in_region(c.to_vec(), *r))
        .collect();
    let dims = SpaceDims::square(vec![1, 2, 1, 1, 2, 2])?;
    let w = gaussian_weights(&points, 0.1, None)?;
    let m = within_view_embed(&graph_laplacian(&w, false)?, &dims)?;
    let spec = ProblemSpec::new(ProblemInputs {
        points,
        labels: vec![
            DVector::from_vec(vec![1.2108]),
            DVector::from_vec(vec![1.6636, 4.3843]),
        ],
        dims,
        combinations: None,
        regularizer: m,
        gamma_a: 0.25,
        gamma_i: 10.0,
        kernel: KernelConfig::toy(0.1, 10.0),
        loss: LossKind::ExponentialLeastSquares,
    })?;
    for inner in [InnerObjective::PaperResidual, InnerObjective::Functional] {
        let cfg = SolveConfig {
            inner,
            ..SolveConfig::default()
        };
        let report = multistart_solve(&spec, &cfg)?;
        println!(
            "{inner:?}: I = {:.10}, |H|_inf = {:.3e}, delta = {:.6}, admissible {}/{}",
            report.objective,
            report.resid_paper_inf,
            report.delta,
            report.admissible_count,
            report.starts_run,
        );
        let a: Vec<String> = report
            .best_a
            .to_vec()
            .iter()
            .map(|x| format!("{x:.4}"))
            .collect();
        println!("  a = ({})", a.join(", "));
    }
    Ok(())
}
