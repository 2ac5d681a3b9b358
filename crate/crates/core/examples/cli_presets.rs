//! Runs the command-line front end in-process: the seasonal time-change
//! preset written to a CSV file.

fn main() {
    let out = std::env::temp_dir().join("ou-x-fig6.csv");
    let code = ou_crossing::cli::run([
        "ou-x",
        "presets",
        "fig6",
        "--points",
        "11",
        "--out",
        out.to_str().unwrap(),
    ]);
    println!("exit code {code}");
    print!("{}", std::fs::read_to_string(&out).unwrap_or_default());
}
