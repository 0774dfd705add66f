// lapwm: Monte Carlo BER sweeps, theory tables and Y4M watermark embedding.
//
// Exit codes: 0 success, 1 parse/format error, 2 capacity/config error.

#include <cstdint>
#include <fstream>
#include <iostream>
#include <memory>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "lapwm/lapwm.hpp"
#include "lapwm/payload_json.hpp"

namespace {

using namespace lapwm;

constexpr int kExitFormat = 1;
constexpr int kExitConfig = 2;

/// "a,b,c" or "start:stop:step" (inclusive) or a mix of both.
std::vector<double> parse_real_list(const std::string& text) {
  std::vector<double> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    if (item.empty()) continue;
    std::size_t colon = item.find(':');
    if (colon == std::string::npos) {
      out.push_back(std::stod(item));
      continue;
    }
    const std::size_t colon2 = item.find(':', colon + 1);
    if (colon2 == std::string::npos) throw ConfigError("range must be start:stop:step");
    const double start = std::stod(item.substr(0, colon));
    const double stop = std::stod(item.substr(colon + 1, colon2 - colon - 1));
    const double step = std::stod(item.substr(colon2 + 1));
    if (!(step > 0.0)) throw ConfigError("range step must be > 0");
    for (std::size_t i = 0;; ++i) {
      const double v = start + static_cast<double>(i) * step;
      if (v > stop + 1e-9 * step) break;
      out.push_back(v);
    }
  }
  if (out.empty()) throw ConfigError("empty list: " + text);
  return out;
}

std::vector<std::size_t> parse_size_list(const std::string& text) {
  std::vector<std::size_t> out;
  for (double v : parse_real_list(text)) {
    if (v < 1.0 || v != std::floor(v)) throw ConfigError("N values must be positive integers");
    out.push_back(static_cast<std::size_t>(v));
  }
  return out;
}

std::vector<DecoderKind> parse_decoders(const std::string& text) {
  if (text == "optimum") return {DecoderKind::Optimum};
  if (text == "suboptimum") return {DecoderKind::Suboptimum};
  if (text == "both") return {DecoderKind::Optimum, DecoderKind::Suboptimum};
  throw ConfigError("decoder must be optimum, suboptimum or both");
}

/// Writes to the named file, or stdout for "" / "-".
class Output {
 public:
  explicit Output(const std::string& path) {
    if (!path.empty() && path != "-") {
      file_ = std::make_unique<std::ofstream>(path, std::ios::binary);
      if (!*file_) throw FormatError("cannot open output file " + path);
    }
  }
  std::ostream& stream() { return file_ ? *file_ : std::cout; }

 private:
  std::unique_ptr<std::ofstream> file_;
};

Video load_video(const std::string& path, int width, int height) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw FormatError("cannot open input file " + path);
  if (width > 0 || height > 0) return read_raw_i420(in, width, height);
  return read_y4m(in);
}

bool ends_with(const std::string& s, const std::string& suffix) {
  return s.size() >= suffix.size() && s.compare(s.size() - suffix.size(), suffix.size(), suffix) == 0;
}

struct SimOptions {
  std::string snr = "-5:15:2.5";
  std::string n = "120";
  double a = 1.0;
  double lambda1 = 1.0;
  std::uint64_t trials = 100000;
  std::uint64_t seed = 1;
  std::string decoder = "both";
  unsigned threads = 0;
  int k = kDefaultStepExponent;
  std::string out;

  SweepConfig sweep() const {
    SweepConfig cfg;
    cfg.snr_db = parse_real_list(snr);
    cfg.n = parse_size_list(n);
    cfg.a = a;
    cfg.host_scale = lambda1;
    cfg.trials = trials;
    cfg.seed = seed;
    cfg.decoders = parse_decoders(decoder);
    cfg.threads = threads;
    return cfg;
  }
};

void add_sim_options(CLI::App* cmd, SimOptions& o, bool with_decoder) {
  cmd->add_option("--snr", o.snr,
                  "SNR values in dB, SNR = -20 log10(g) with g = noise scale / host scale; "
                  "comma list and/or start:stop:step")
      ->capture_default_str();
  cmd->add_option("--n", o.n, "spreading lengths N (list or range)")->capture_default_str();
  cmd->add_option("--a", o.a, "watermark strength a")->capture_default_str();
  cmd->add_option("--lambda1", o.lambda1, "host Laplace scale")->capture_default_str();
  cmd->add_option("--trials", o.trials, "Monte Carlo trials per cell")->capture_default_str();
  cmd->add_option("--seed", o.seed, "64-bit seed")->capture_default_str();
  cmd->add_option("--threads", o.threads, "worker threads (0 = all cores); results do not depend on it")
      ->capture_default_str();
  cmd->add_option("--out", o.out, "CSV output file (default stdout)");
  if (with_decoder)
    cmd->add_option("--decoder", o.decoder, "optimum, suboptimum or both")->capture_default_str();
  else
    cmd->add_option("--k", o.k, "lattice refinement: step = a / 2^k")->capture_default_str();
}

struct VideoOptions {
  std::string in;
  std::string out;
  std::string test;
  std::string map;
  std::string key = "lapwm";
  double a = 4.0;
  std::size_t n = 120;
  std::string bits;
  std::optional<std::size_t> bits_per_frame;
  std::uint64_t seed = 1;
  std::string decoder = "optimum";
  double snr = 20.0;
  std::optional<double> lambda1;
  int width = 0;
  int height = 0;
  std::vector<int> positions{10, 11, 12, 13, 14, 15};

  EmbedConfig embed_config() const { return EmbedConfig{a, n, key}; }
  CoeffPool pool() const { return CoeffPool{positions}; }
};

void add_geometry(CLI::App* cmd, VideoOptions& o) {
  cmd->add_option("--width", o.width, "raw I420 input width (input is then headerless)");
  cmd->add_option("--height", o.height, "raw I420 input height");
}

int run_embed(const VideoOptions& o) {
  const Video video = load_video(o.in, o.width, o.height);
  const EmbedConfig cfg = o.embed_config();
  const CoeffPool pool = o.pool();
  pool.validate();
  cfg.validate();
  const std::size_t capacity = frame_capacity(
      static_cast<std::size_t>(video.width / 4) * static_cast<std::size_t>(video.height / 4), pool, cfg.spread_n);

  std::vector<Bit> fixed;
  if (!o.bits.empty()) fixed = bits_from_string(o.bits);
  const std::size_t per_frame = !o.bits.empty() ? fixed.size() : o.bits_per_frame.value_or(capacity);
  if (per_frame > capacity)
    throw CapacityError("payload of " + std::to_string(per_frame) +
                            " bits per frame exceeds frame capacity of " + std::to_string(capacity) +
                            " bits",
                        capacity);

  Video marked = video;
  std::vector<PayloadMap> maps;
  Engine eng = make_engine(SeedToken(o.seed));
  for (VideoFrame& frame : marked.frames) {
    std::vector<Bit> bits = fixed;
    if (o.bits.empty())
      for (std::size_t i = 0; i < per_frame; ++i) bits.push_back((eng() >> 63) != 0 ? Bit::One : Bit::Zero);
    auto [plane, map] = embed_frame(frame.luma, bits, cfg, pool);
    frame.luma = std::move(plane);
    maps.push_back(std::move(map));
  }

  {
    std::ofstream out(o.out, std::ios::binary);
    if (!out) throw FormatError("cannot open output file " + o.out);
    if (ends_with(o.out, ".yuv"))
      write_raw(marked, out);
    else
      write_y4m(marked, out);
  }
  const std::string map_path = o.map.empty() ? o.out + ".map.json" : o.map;
  std::ofstream map_out(map_path);
  if (!map_out) throw FormatError("cannot open payload map " + map_path);
  write_payload_maps(maps, map_out);
  std::cerr << "embedded " << per_frame << " bits/frame in " << marked.frames.size()
            << " frames (capacity " << capacity << "), payload map " << map_path << '\n';
  return 0;
}

int run_extract(const VideoOptions& o) {
  const Video video = load_video(o.in, o.width, o.height);
  std::vector<PayloadMap> maps;
  if (!o.map.empty()) {
    std::ifstream in(o.map);
    if (!in) throw FormatError("cannot open payload map " + o.map);
    maps = read_payload_maps(in);
    if (maps.size() != video.frames.size())
      throw FormatError("payload map describes " + std::to_string(maps.size()) + " frames, video has " +
                        std::to_string(video.frames.size()));
  }
  const auto decoders = parse_decoders(o.decoder);
  if (decoders.size() != 1) throw ConfigError("extract needs exactly one decoder");
  const DecoderKind kind = decoders.front();
  const CoeffPool pool = o.pool();

  std::cout << "frame,bits,errors\n";
  std::size_t total_bits = 0;
  std::size_t total_errors = 0;
  for (std::size_t f = 0; f < video.frames.size(); ++f) {
    const FramePlane& plane = video.frames[f].luma;
    const CoeffPool frame_pool = maps.empty() ? pool : CoeffPool{maps[f].positions};
    const double a = maps.empty() ? o.a : maps[f].config.strength_a;
    const double lambda1 =
        o.lambda1.value_or(estimate_laplace(pool_coefficients(plane, frame_pool)).scale());
    const DecoderParams decoder{lambda1, g_from_snr_db(o.snr), a};
    std::vector<Bit> bits;
    if (!maps.empty()) {
      bits = extract_frame(plane, maps[f], decoder, kind);
    } else {
      const std::size_t count = o.bits_per_frame.value_or(frame_capacity(plane.block_count(), pool, o.n));
      bits = extract_frame(plane, o.embed_config(), pool, count, decoder, kind);
    }
    std::size_t errors = 0;
    if (!maps.empty())
      for (std::size_t i = 0; i < bits.size(); ++i) errors += bits[i] != maps[f].bits[i] ? 1 : 0;
    std::cout << f << ',' << bits_to_string(bits) << ',' << (maps.empty() ? std::string("") : std::to_string(errors))
              << '\n';
    total_bits += bits.size();
    total_errors += errors;
  }
  if (!maps.empty())
    std::cout << "# ber," << format_real(total_bits ? static_cast<double>(total_errors) / total_bits : 0.0)
              << ",bits," << total_bits << ",errors," << total_errors << '\n';
  return 0;
}

int run_metrics(const VideoOptions& o) {
  const Video ref = load_video(o.in, o.width, o.height);
  const Video test = load_video(o.test, o.width, o.height);
  if (ref.frames.size() != test.frames.size())
    throw FormatError("videos have different frame counts");
  std::vector<PayloadMap> maps;
  if (!o.map.empty()) {
    std::ifstream in(o.map);
    if (!in) throw FormatError("cannot open payload map " + o.map);
    maps = read_payload_maps(in);
  }
  Output out(o.out);
  out.stream() << "frame,psnr_db,predicted_psnr_db\n";
  for (std::size_t f = 0; f < ref.frames.size(); ++f) {
    out.stream() << f << ',' << format_real(psnr(ref.frames[f].luma, test.frames[f].luma)) << ',';
    if (f < maps.size())
      out.stream() << format_real(predicted_psnr(maps[f].config, maps[f].bits.size(),
                                                 ref.frames[f].luma.pixel_count()));
    out.stream() << '\n';
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Additive DCT-domain watermarking under Laplacian host and noise"};
  app.require_subcommand(1);

  SimOptions sweep_opts;
  auto* sweep = app.add_subcommand("ber-sweep", "Monte Carlo BER per (SNR, N, decoder) as CSV");
  add_sim_options(sweep, sweep_opts, true);

  SimOptions theory_opts;
  theory_opts.snr = "0,5,10";
  theory_opts.n = "8,20,60";
  auto* theory = app.add_subcommand(
      "theory", "approximate vs exact clamped-sum error probability vs Monte Carlo, as CSV");
  add_sim_options(theory, theory_opts, false);

  VideoOptions embed_opts;
  auto* embed = app.add_subcommand("embed", "embed a payload into every frame of a Y4M clip");
  embed->add_option("--in", embed_opts.in, "input Y4M (or raw I420 with --width/--height)")->required();
  embed->add_option("--out", embed_opts.out, "watermarked output (.y4m, or .yuv for raw)")->required();
  embed->add_option("--map", embed_opts.map, "payload map sidecar (default <out>.map.json)");
  embed->add_option("--key", embed_opts.key, "selection key")->capture_default_str();
  embed->add_option("--a", embed_opts.a, "watermark strength a")->capture_default_str();
  embed->add_option("--n", embed_opts.n, "coefficients per bit N")->capture_default_str();
  embed->add_option("--bits", embed_opts.bits, "payload bit string, repeated in every frame");
  embed->add_option("--bits-per-frame", embed_opts.bits_per_frame, "random payload size (default: capacity)");
  embed->add_option("--seed", embed_opts.seed, "seed for random payloads")->capture_default_str();
  embed->add_option("--positions", embed_opts.positions, "zig-zag pool positions")->delimiter(',');
  add_geometry(embed, embed_opts);

  VideoOptions extract_opts;
  auto* extract = app.add_subcommand("extract", "decode payload bits; report BER against a payload map");
  extract->add_option("--in", extract_opts.in, "watermarked video")->required();
  extract->add_option("--map", extract_opts.map, "payload map: group layout and reference bits");
  extract->add_option("--key", extract_opts.key, "selection key (without --map)")->capture_default_str();
  extract->add_option("--a", extract_opts.a, "watermark strength a (without --map)")->capture_default_str();
  extract->add_option("--n", extract_opts.n, "coefficients per bit N (without --map)")->capture_default_str();
  extract->add_option("--bits-per-frame", extract_opts.bits_per_frame, "bits per frame (without --map)");
  extract->add_option("--decoder", extract_opts.decoder, "optimum or suboptimum")->capture_default_str();
  extract->add_option("--snr", extract_opts.snr, "assumed channel SNR in dB (optimum decoder)")->capture_default_str();
  extract->add_option("--lambda1", extract_opts.lambda1, "host scale (default: estimated per frame)");
  extract->add_option("--positions", extract_opts.positions, "zig-zag pool positions")->delimiter(',');
  add_geometry(extract, extract_opts);

  VideoOptions metrics_opts;
  auto* metrics = app.add_subcommand("metrics", "per-frame PSNR and predicted PSNR as CSV");
  metrics->add_option("--in", metrics_opts.in, "original video")->required();
  metrics->add_option("--test", metrics_opts.test, "watermarked video")->required();
  metrics->add_option("--map", metrics_opts.map, "payload map for predicted PSNR");
  metrics->add_option("--out", metrics_opts.out, "CSV output file (default stdout)");
  add_geometry(metrics, metrics_opts);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitFormat;
  }

  try {
    if (*sweep) {
      const auto records = run_ber_sweep(sweep_opts.sweep());
      Output out(sweep_opts.out);
      write_ber_csv(records, out.stream());
    } else if (*theory) {
      const auto records = run_theory(theory_opts.sweep(), theory_opts.k);
      Output out(theory_opts.out);
      write_theory_csv(records, out.stream());
      for (const auto& r : records)
        if (!r.approx_in_envelope)
          std::cerr << "warning: snr " << format_real(r.snr_db) << " dB, N " << r.n
                    << ": approximation/exact ratio " << format_real(r.approx_ratio)
                    << " outside [1/" << kApproxEnvelope << ", " << kApproxEnvelope << "]\n";
    } else if (*embed) {
      return run_embed(embed_opts);
    } else if (*extract) {
      return run_extract(extract_opts);
    } else if (*metrics) {
      return run_metrics(metrics_opts);
    }
  } catch (const CapacityError& e) {
    std::cerr << "capacity error: " << e.what() << '\n';
    return kExitConfig;
  } catch (const ConfigError& e) {
    std::cerr << "configuration error: " << e.what() << '\n';
    return kExitConfig;
  } catch (const FormatError& e) {
    std::cerr << "format error: " << e.what() << '\n';
    return kExitFormat;
  } catch (const std::logic_error& e) {
    std::cerr << "parse error: " << e.what() << '\n';
    return kExitFormat;
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitConfig;
  }
  return 0;
}
