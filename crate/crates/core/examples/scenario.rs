//! Run a multi-step scenario through the command-line engine and print the
//! JSON report and CSV table it produces.

use reilly::cli::{run_steps, Scenario};

const SCENARIO: &str = r#"
geometry = "flat-disk"
phi = "0"
v = "1"

[[steps]]
command = "audit heintze-karcher"
m = 2

[[steps]]
command = "audit minkowski"
m = 4

[[steps]]
command = "eig wentzell"
beta = 1
exact = 2

[[steps]]
command = "verify-reilly"
f = "x^2 + y"
v = "1 + x^2/4"
phi = "sin(x)/5"
levels = 3
"#;

fn main() -> reilly::Result<()> {
    let scenario = Scenario::from_toml(SCENARIO)?;
    let report = run_steps(&scenario.expand(&Scenario::default()));
    eprint!("{}", report.summary());
    println!("{}", report.to_json());
    println!("{}", report.audit_csv());
    println!("exit code {}", report.exit_code());
    Ok(())
}
