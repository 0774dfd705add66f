// Prints exact and approximate clamped-sum error probabilities next to a
// short Monte Carlo run for both decoders.

#include <cstdio>
#include <vector>

#include "lapwm/lapwm.hpp"

int main() {
  using namespace lapwm;
  const double a = 1.0;
  const double lambda1 = 4.0;
  const std::vector<std::size_t> ns{15, 30, 60, 120};

  std::printf("%8s %5s %14s %14s\n", "snr_db", "N", "perr_exact", "perr_approx");
  for (double snr : {0.0, 5.0, 10.0}) {
    for (const ErrorReport& r : error_reports(a, lambda1, g_from_snr_db(snr), ns))
      std::printf("%8.1f %5zu %14.6e %14.6e\n", snr, r.n, r.p_exact, r.p_approx);
  }

  SweepConfig cfg;
  cfg.snr_db = {0.0, 5.0, 10.0};
  cfg.n = {120};
  cfg.a = a;
  cfg.host_scale = lambda1;
  cfg.trials = 20000;
  std::printf("\n%8s %12s %10s %10s\n", "snr_db", "decoder", "ber", "ci95");
  for (const BerRecord& r : run_ber_sweep(cfg))
    std::printf("%8.1f %12s %10.5f %10.5f\n", r.snr_db, to_string(r.decoder).data(), r.ber,
                r.ci95_halfwidth);
}
