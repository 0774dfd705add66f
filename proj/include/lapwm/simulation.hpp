#pragma once

// Monte Carlo bit-error-rate sweeps and theory-vs-simulation tables.
//
// Work is cut into fixed-size chunks of trials. Chunk c of cell (snr i, n j,
// decoder d) draws from an engine seeded with hash(seed, i, j, d, c), and
// error counts are summed in chunk order, so results do not depend on how
// many worker threads run the chunks.

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <ostream>
#include <string>
#include <thread>
#include <vector>

#include "lapwm/error_analysis.hpp"
#include "lapwm/errors.hpp"
#include "lapwm/laplace_model.hpp"
#include "lapwm/random.hpp"
#include "lapwm/watermark_codec.hpp"

namespace lapwm {

struct SweepConfig {
  std::vector<double> snr_db{0.0};
  std::vector<std::size_t> n{120};
  double a = 1.0;
  double host_scale = 1.0;
  std::uint64_t trials = 100000;
  std::uint64_t seed = 1;
  std::vector<DecoderKind> decoders{DecoderKind::Optimum, DecoderKind::Suboptimum};
  unsigned threads = 0;  ///< 0: hardware concurrency
  std::uint64_t chunk_trials = 4096;

  void validate() const {
    if (snr_db.empty()) throw ConfigError("SNR list must not be empty");
    if (n.empty()) throw ConfigError("N list must not be empty");
    for (std::size_t v : n)
      if (v < 1) throw ConfigError("N must be >= 1");
    for (double s : snr_db)
      if (!std::isfinite(s)) throw ConfigError("SNR values must be finite");
    if (trials < 1) throw ConfigError("trials must be >= 1");
    if (!(a >= 0.0) || !std::isfinite(a)) throw ConfigError("a must be >= 0");
    if (!(host_scale > 0.0)) throw ConfigError("host scale must be > 0");
    if (decoders.empty()) throw ConfigError("at least one decoder is required");
    if (chunk_trials < 1) throw ConfigError("chunk size must be >= 1");
  }
};

struct BerRecord {
  double snr_db = 0.0;
  std::size_t n = 0;
  DecoderKind decoder = DecoderKind::Optimum;
  double ber = 0.0;
  std::uint64_t trials = 0;
  double ci95_halfwidth = 0.0;
  std::uint64_t seed = 0;
};

/// Normal-approximation 95% half-width of a binomial proportion.
inline double ci95_halfwidth(double p, std::uint64_t trials) noexcept {
  return 1.96 * std::sqrt(std::max(p * (1.0 - p), 0.0) / static_cast<double>(trials));
}

namespace detail {

/// Counts decoding errors over `trials` random-bit transmissions.
inline std::uint64_t simulate_errors(double a, double host_scale, double g, std::size_t n,
                                     DecoderKind kind, std::uint64_t trials, std::uint64_t seed) {
  Engine eng(seed);
  const LaplaceParams host(0.0, host_scale);
  const LaplaceParams noise(0.0, g * host_scale);
  std::vector<double> y(n);
  std::uint64_t errors = 0;
  const bool informative = a > 0.0;
  const LlrEvaluator llr(DecoderParams{host_scale, g, informative ? a : 1.0});
  for (std::uint64_t t = 0; t < trials; ++t) {
    const Bit sent = (eng() >> 63) != 0 ? Bit::One : Bit::Zero;
    const double shift = sent == Bit::One ? a : -a;
    for (std::size_t i = 0; i < n; ++i)
      y[i] = laplace_draw(eng, host) + shift + laplace_draw(eng, noise);
    Bit got = Bit::One;  // a = 0: both statistics are identically 0, a tie
    if (informative)
      got = kind == DecoderKind::Optimum ? decode_optimum(y, llr) : decode_suboptimum(y, a);
    errors += got != sent ? 1 : 0;
  }
  return errors;
}

template <class Job>
void run_parallel(std::size_t jobs, unsigned threads, Job&& job) {
  unsigned workers = threads != 0 ? threads : std::max(1u, std::thread::hardware_concurrency());
  workers = static_cast<unsigned>(std::min<std::size_t>(workers, std::max<std::size_t>(jobs, 1)));
  std::atomic<std::size_t> next{0};
  auto body = [&] {
    for (std::size_t i = next++; i < jobs; i = next++) job(i);
  };
  if (workers <= 1) {
    body();
    return;
  }
  std::vector<std::jthread> pool;
  pool.reserve(workers);
  for (unsigned w = 0; w < workers; ++w) pool.emplace_back(body);
}

}  // namespace detail

/// One Monte Carlo cell: BER of `kind` at the given SNR and N.
struct CellSpec {
  double snr_db;
  std::size_t n;
  DecoderKind decoder;
  std::size_t snr_index;
  std::size_t n_index;
};

inline std::vector<BerRecord> run_cells(const SweepConfig& cfg, const std::vector<CellSpec>& cells) {
  cfg.validate();
  const std::uint64_t chunks = (cfg.trials + cfg.chunk_trials - 1) / cfg.chunk_trials;
  std::vector<std::uint64_t> counts(cells.size() * chunks, 0);
  detail::run_parallel(counts.size(), cfg.threads, [&](std::size_t job) {
    const CellSpec& cell = cells[job / chunks];
    const std::uint64_t chunk = job % chunks;
    const std::uint64_t begin = chunk * cfg.chunk_trials;
    const std::uint64_t count = std::min(cfg.chunk_trials, cfg.trials - begin);
    const std::uint64_t seed =
        hash_words({cfg.seed, cell.snr_index, cell.n_index,
                    static_cast<std::uint64_t>(cell.decoder), chunk});
    counts[job] = detail::simulate_errors(cfg.a, cfg.host_scale, g_from_snr_db(cell.snr_db), cell.n,
                                          cell.decoder, count, seed);
  });
  std::vector<BerRecord> out;
  out.reserve(cells.size());
  for (std::size_t c = 0; c < cells.size(); ++c) {
    std::uint64_t errors = 0;
    for (std::uint64_t k = 0; k < chunks; ++k) errors += counts[c * chunks + k];
    const double ber = static_cast<double>(errors) / static_cast<double>(cfg.trials);
    out.push_back({cells[c].snr_db, cells[c].n, cells[c].decoder, ber, cfg.trials,
                   ci95_halfwidth(ber, cfg.trials), cfg.seed});
  }
  return out;
}

/// Every (snr, n, decoder) cell, in that nesting order.
inline std::vector<BerRecord> run_ber_sweep(const SweepConfig& cfg) {
  cfg.validate();
  std::vector<CellSpec> cells;
  for (std::size_t i = 0; i < cfg.snr_db.size(); ++i)
    for (std::size_t j = 0; j < cfg.n.size(); ++j)
      for (DecoderKind d : cfg.decoders) cells.push_back({cfg.snr_db[i], cfg.n[j], d, i, j});
  return run_cells(cfg, cells);
}

inline constexpr const char* kBerCsvHeader = "snr_db,n,decoder,ber,trials,ci95_halfwidth,seed";

inline std::string format_real(double v) {
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.10g", v);
  return buf;
}

inline void write_ber_csv(const std::vector<BerRecord>& records, std::ostream& out) {
  out << kBerCsvHeader << '\n';
  for (const BerRecord& r : records)
    out << format_real(r.snr_db) << ',' << r.n << ',' << to_string(r.decoder) << ','
        << format_real(r.ber) << ',' << r.trials << ',' << format_real(r.ci95_halfwidth) << ','
        << r.seed << '\n';
}

// ---------------------------------------------------------------------------
// Theory vs simulation

/// Ratio band in which the closed-form approximation is considered to agree
/// with the exact convolution.
inline constexpr double kApproxEnvelope = 5.0;

struct TheoryRecord {
  double snr_db = 0.0;
  std::size_t n = 0;
  ErrorReport report;
  BerRecord mc;
  double approx_ratio = 0.0;  ///< perr_approx / perr_exact
  bool approx_in_envelope = false;
  /// |mc - exact| <= 3 * half-width, half-width evaluated at the exact p.
  bool mc_agrees = false;
};

inline constexpr const char* kTheoryCsvHeader =
    "snr_db,n,p_atom,perr_approx,perr_exact,tie_mass,mc_ber,trials,ci95_halfwidth,"
    "approx_exact_ratio,approx_in_envelope,mc_within_3ci";

/// Compares perr_approx, perr_exact and simulated clamped-sum BER for every
/// (snr, n) cell. `cfg.decoders` is ignored.
inline std::vector<TheoryRecord> run_theory(const SweepConfig& cfg, int k = kDefaultStepExponent) {
  cfg.validate();
  if (!(cfg.a > 0.0)) throw ConfigError("theory needs a > 0");
  std::vector<CellSpec> cells;
  for (std::size_t i = 0; i < cfg.snr_db.size(); ++i)
    for (std::size_t j = 0; j < cfg.n.size(); ++j)
      cells.push_back({cfg.snr_db[i], cfg.n[j], DecoderKind::Suboptimum, i, j});
  const auto mc = run_cells(cfg, cells);

  std::vector<TheoryRecord> out;
  out.reserve(cells.size());
  for (std::size_t i = 0; i < cfg.snr_db.size(); ++i) {
    const auto reports =
        error_reports(cfg.a, cfg.host_scale, g_from_snr_db(cfg.snr_db[i]), cfg.n, k);
    for (std::size_t j = 0; j < cfg.n.size(); ++j) {
      TheoryRecord r;
      r.snr_db = cfg.snr_db[i];
      r.n = cfg.n[j];
      r.report = reports[j];
      r.mc = mc[i * cfg.n.size() + j];
      r.approx_ratio = r.report.p_approx / r.report.p_exact;
      r.approx_in_envelope =
          r.approx_ratio >= 1.0 / kApproxEnvelope && r.approx_ratio <= kApproxEnvelope;
      const double half = ci95_halfwidth(r.report.p_exact, r.mc.trials);
      r.mc_agrees = std::abs(r.mc.ber - r.report.p_exact) <= 3.0 * half;
      out.push_back(r);
    }
  }
  return out;
}

inline void write_theory_csv(const std::vector<TheoryRecord>& records, std::ostream& out) {
  out << kTheoryCsvHeader << '\n';
  for (const TheoryRecord& r : records)
    out << format_real(r.snr_db) << ',' << r.n << ',' << format_real(r.report.p_atom_P) << ','
        << format_real(r.report.p_approx) << ',' << format_real(r.report.p_exact) << ','
        << format_real(r.report.tie_mass) << ',' << format_real(r.mc.ber) << ',' << r.mc.trials
        << ',' << format_real(r.mc.ci95_halfwidth) << ',' << format_real(r.approx_ratio) << ','
        << (r.approx_in_envelope ? 1 : 0) << ',' << (r.mc_agrees ? 1 : 0) << '\n';
}

}  // namespace lapwm
