//! Drive a full run from a TOML document, as the binary does.
use zkwave::driver::*;

const CONFIG: &str = r#"
seed = 3

[lattice]
dim = 2
size = 8

[model]
lambda = 0.2

[time]
t_final = 0.5
dt = 0.05

[ensemble]
members = 16
"#;

fn main() -> zkwave::Result<()> {
    let mut cfg = parse_config(CONFIG, Command::Simulate)?;
    cfg.output.dir = std::env::temp_dir().join("zkwave-run");
    println!("config digest {}", cfg.digest());
    let outcome = run(&cfg, Some(1))?;
    for s in &outcome.stages {
        println!("stage {:<10} {:.3} s", s.name, s.seconds);
    }
    println!("files: {}", outcome.files.join(", "));
    Ok(())
}
