// fedloc-gen: writes a deterministic synthetic RSS survey in the 520-WAP
// CSV layout, for running the experiment pipeline where no real survey is
// available.

#include <CLI11.hpp>

#include <iostream>

#include "fedloc/synth.hpp"

int main(int argc, char** argv) {
  CLI::App app{"Synthetic RSS fingerprint corpus generator"};
  std::string out = "synthetic_rss.csv";
  fedloc::SynthConfig cfg;
  app.add_option("--out", out, "Output CSV path")->capture_default_str();
  app.add_option("--samples", cfg.samples, "Number of rows")->capture_default_str();
  app.add_option("--seed", cfg.seed, "Generator seed")->capture_default_str();
  app.add_option("--shadow-sigma", cfg.shadow_sigma_db, "Shadowing stddev (dB)")
      ->capture_default_str();
  app.add_option("--miss-rate", cfg.miss_rate, "Chance a detectable beacon is missed")
      ->capture_default_str();
  CLI11_PARSE(app, argc, argv);

  try {
    const auto records = fedloc::generate_records(cfg);
    fedloc::write_csv(out, records);
    std::cout << "wrote " << records.size() << " rows to " << out << "\n";
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
