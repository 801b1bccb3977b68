fn main() {
    std::process::exit(photon_box::harness::run(std::env::args_os()));
}
