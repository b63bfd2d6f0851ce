//! Driving the command-line front end in process.

use binocoll::cli::dispatch;

fn main() {
    let mut out = Vec::new();
    let mut err = Vec::new();
    for argv in [
        vec!["binocoll", "search", "--max-value", "3003", "--format", "text"],
        vec!["binocoll", "lemma", "check22", "--n", "500000", "--k", "588", "--format", "text"],
        vec!["binocoll", "sieve", "neighbors", "--x", "1000000", "--format", "jsonl"],
    ] {
        out.clear();
        err.clear();
        let code = dispatch(argv.clone(), &mut out, &mut err);
        println!("$ {}  -> exit {code}", argv[1..].join(" "));
        print!("{}", String::from_utf8_lossy(&out));
    }
}
