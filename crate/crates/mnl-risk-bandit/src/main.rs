fn main() {
    std::process::exit(mnl_risk_bandit::cli::run());
}
