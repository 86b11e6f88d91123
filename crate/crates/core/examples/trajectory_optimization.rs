//! Annealing the stops of a UAV anchor that localizes three ground targets
//! by ranging, under speed, energy and dwell constraints.

use gasloc::geometry::Vec3;
use gasloc::trajopt::{
    evaluate_trajectory, optimize_trajectory, AnnealConfig, Constraints, EnergyModel, Objective, SearchBox,
    TrajOptProblem,
};

fn main() -> gasloc::Result<()> {
    let problem = TrajOptProblem {
        objective: Objective::RangeCrlb { sigma_m: 2.0 },
        targets: vec![
            (Vec3::new(100.0, 100.0, 0.0), 1.0),
            (Vec3::new(400.0, 150.0, 0.0), 1.0),
            (Vec3::new(250.0, 400.0, 0.0), 2.0),
        ],
        constraints: Constraints {
            max_speed_mps: 15.0,
            max_turn_rate_rad_s: None,
            energy: EnergyModel { hover_power_w: 180.0, move_cost_j_per_m: 20.0 },
            energy_budget_j: Some(150_000.0),
            min_waypoints: 4,
            max_waypoints: 4,
            min_dwell_s: 10.0,
            coverage_radius_m: Some(400.0),
        },
        bounds: SearchBox { min: Vec3::new(0.0, 0.0, 30.0), max: Vec3::new(500.0, 500.0, 120.0) },
        total_dwell_s: 240.0,
        reference_dwell_s: 60.0,
    };
    let cfg = AnnealConfig { iterations: 2000, chains: 2, seed: 4, ..Default::default() };
    let result = optimize_trajectory(&problem, &cfg)?;
    println!(
        "objective {:.4} m^2 after {} evaluations (start {:.4})",
        result.evaluation.objective,
        result.evaluations,
        result.trace.first().copied().unwrap_or(f64::NAN)
    );
    for (p, dwell) in &result.stops {
        println!("  stop ({:6.1}, {:6.1}, {:5.1}) for {dwell:.1} s", p.x, p.y, p.z);
    }
    let again = evaluate_trajectory(&problem, &result.trajectory)?;
    println!("energy {:.0} J, feasible on re-check: {}", again.energy_j, again.feasible());
    Ok(())
}
