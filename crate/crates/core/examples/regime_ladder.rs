//! Prints the regime bands of an equal-stimulus sweep.
//!
//! `cargo run --release --example regime_ladder -- laing-chow 0 1.2 0.05 4000`

use rivalry_core::experiments::{find_regime_bands, grid, run_sweep, SweepAxis, SweepSpec};
use rivalry_core::model::{ModelInstance, ModelKind};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let args: Vec<String> = std::env::args().skip(1).collect();
    if args.len() != 5 {
        return Err("usage: regime_ladder <model> <lo> <hi> <step> <duration_ms>".into());
    }
    let kind: ModelKind = args[0].parse()?;
    let values = grid(args[1].parse()?, args[2].parse()?, args[3].parse()?)?;
    let mut spec = SweepSpec::new(ModelInstance::default_for(kind), SweepAxis::EqualStimulus, values);
    spec.set_duration(args[4].parse()?);
    let result = run_sweep(&spec)?;
    for row in &result.rows {
        let a = &row.aggregate;
        println!("{:>8.4}  {:<18} mean_duration={:?}", row.param, a.regime.to_string(), a.mean_duration);
    }
    for band in find_regime_bands(&result) {
        println!("{:?} [{}, {}] rows={}", band.regime, band.lo, band.hi, band.rows());
    }
    Ok(())
}
