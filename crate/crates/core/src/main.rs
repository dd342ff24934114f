use clap::Parser;

use sourcebf::cli::{run, Cli};

fn main() {
    match run(Cli::parse()) {
        Ok(out) => print!("{out}"),
        Err(e) => {
            let category = e.category();
            eprintln!("error ({category:?}): {e}");
            std::process::exit(category.exit_code());
        }
    }
}
