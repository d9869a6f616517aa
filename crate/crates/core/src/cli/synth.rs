use std::io::Write;

use super::{open_output, write_failed, CliError, SynthArgs, SynthRecord};
use crate::triangulate::{instance_seeds, synth_instance};

pub(super) fn cmd_synth(a: &SynthArgs, out: &mut dyn Write) -> Result<(), CliError> {
    if !(a.noise >= 0.0 && a.noise.is_finite()) {
        return Err(CliError::InvalidArgument(format!("--noise must be finite and >= 0, got {}", a.noise)));
    }
    let mut w = open_output(&a.out, out)?;
    for seed in instance_seeds(a.seed, a.n) {
        let rec = SynthRecord::from(&synth_instance(seed, a.noise));
        let line = serde_json::to_string(&rec).expect("synthetic data is finite");
        writeln!(w, "{line}").map_err(write_failed(&a.out))?;
    }
    w.flush().map_err(write_failed(&a.out))
}
