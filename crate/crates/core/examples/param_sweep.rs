//! Model sizes the sweep picks for each target parameter count.

use qjet::model::{ModelKind, ModelSpec};
use qjet::runner::{nearest_spec, SWEEP_TARGETS};

fn main() {
    println!("{:<6} {:>6} {:>6}  config", "model", "target", "|Θ|");
    for kind in ModelKind::ALL {
        let base = ModelSpec::default_for(kind);
        for target in SWEEP_TARGETS {
            let s = nearest_spec(&base, target);
            let shape = if kind.is_quantum() {
                format!("encoder {} decoder {}", s.encoder_hidden, s.decoder_hidden)
            } else {
                format!("N_h {} P {}", s.hidden, s.layers)
            };
            println!("{:<6} {:>6} {:>6}  {shape}", kind.as_str(), target, s.param_count());
        }
    }
}
