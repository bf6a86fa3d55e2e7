fn main() {
    let code = agmloop::cli::run(std::env::args_os());
    std::process::exit(code);
}
