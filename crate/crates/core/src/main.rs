fn main() {
    std::process::exit(fracwave::scenario_io::run_cli(std::env::args_os()));
}
