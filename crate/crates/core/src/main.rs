fn main() {
    let (code, out) = betadyn::cli::run(std::env::args_os());
    if code != 1 {
        print!("{out}");
    } else {
        eprint!("{out}");
    }
    std::process::exit(code);
}
