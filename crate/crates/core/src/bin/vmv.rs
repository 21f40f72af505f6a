fn main() {
    let argv: Vec<String> = std::env::args().collect();
    std::process::exit(vmv::harness::cli::run(&argv));
}
