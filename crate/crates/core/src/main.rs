fn main() {
    let (code, out, err) = clubs::cli::run(std::env::args_os());
    print!("{out}");
    eprint!("{err}");
    std::process::exit(code);
}
