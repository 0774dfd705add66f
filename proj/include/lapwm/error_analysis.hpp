#pragma once

// Error probability of the clamped-sum decoder.
//
// Under H0 one clamped observation z = l(x + n - a, a) has a mixed law: an atom
// of mass 1/2 at -a, an atom of mass P at +a and a continuous part on (-a, a)
// with density f_y(z + a). The decision statistic Z is the n-fold sum, whose
// law is computed here by exact lattice convolution.

#include <cmath>
#include <cstdint>
#include <limits>
#include <map>
#include <span>
#include <string>
#include <vector>

#include "lapwm/errors.hpp"
#include "lapwm/laplace_model.hpp"

namespace lapwm {

/// Point mass at lattice index `index` (position index * step).
struct Atom {
  std::int64_t index = 0;
  double mass = 0.0;
};

/// Atoms on a lattice of step h plus a piecewise-constant density. Density
/// cell j covers [(origin + j) h, (origin + j + 1) h) and stores the average
/// density over that cell, so cell mass is density[j] * h.
class MixedPdf {
 public:
  MixedPdf() = default;
  MixedPdf(double step, std::vector<Atom> atoms, std::int64_t origin, std::vector<double> density)
      : step_(step), atoms_(std::move(atoms)), origin_(origin), density_(std::move(density)) {
    if (!(step > 0.0)) throw ConfigError("MixedPdf step must be > 0");
    normalize_atoms();
  }

  double step() const noexcept { return step_; }
  std::span<const Atom> atoms() const noexcept { return atoms_; }
  std::int64_t origin() const noexcept { return origin_; }
  std::span<const double> density() const noexcept { return density_; }

  double atom_position(const Atom& at) const noexcept { return static_cast<double>(at.index) * step_; }
  double cell_left(std::size_t j) const noexcept {
    return static_cast<double>(origin_ + static_cast<std::int64_t>(j)) * step_;
  }

  /// Mass of the atom at `index`, 0 if absent.
  double atom_mass_at(std::int64_t index) const noexcept {
    for (const Atom& at : atoms_)
      if (at.index == index) return at.mass;
    return 0.0;
  }

  double atom_mass() const noexcept {
    double m = 0.0;
    for (const Atom& at : atoms_) m += at.mass;
    return m;
  }

  double continuous_mass() const noexcept {
    double m = 0.0;
    for (double d : density_) m += d;
    return m * step_;
  }

  double total_mass() const noexcept { return atom_mass() + continuous_mass(); }

  double mean() const noexcept {
    double m = 0.0;
    for (const Atom& at : atoms_) m += atom_position(at) * at.mass;
    double c = 0.0;
    for (std::size_t j = 0; j < density_.size(); ++j)
      c += (static_cast<double>(origin_ + static_cast<std::int64_t>(j)) + 0.5) * density_[j];
    return m + c * step_ * step_;
  }

  /// P(Z >= index * h), atoms at the threshold included.
  double mass_at_or_above(std::int64_t index) const noexcept {
    double m = 0.0;
    for (const Atom& at : atoms_)
      if (at.index >= index) m += at.mass;
    double c = 0.0;
    for (std::size_t j = 0; j < density_.size(); ++j)
      if (origin_ + static_cast<std::int64_t>(j) >= index) c += density_[j];
    return m + c * step_;
  }

  /// P(Z > index * h): the atom at the threshold is excluded.
  double mass_above(std::int64_t index) const noexcept {
    return mass_at_or_above(index) - atom_mass_at(index);
  }

  /// Largest |position| carrying mass.
  double support_bound() const noexcept {
    double b = 0.0;
    for (const Atom& at : atoms_) b = std::max(b, std::abs(atom_position(at)));
    if (!density_.empty()) {
      b = std::max(b, std::abs(cell_left(0)));
      b = std::max(b, std::abs(cell_left(density_.size())));
    }
    return b;
  }

 private:
  void normalize_atoms() {
    std::map<std::int64_t, double> merged;
    for (const Atom& at : atoms_) {
      if (at.mass < 0.0) throw ConfigError("atom mass must be >= 0");
      merged[at.index] += at.mass;
    }
    atoms_.clear();
    for (auto [idx, mass] : merged) atoms_.push_back({idx, mass});
  }

  double step_ = 1.0;
  std::vector<Atom> atoms_;
  std::int64_t origin_ = 0;
  std::vector<double> density_;
};

/// Upper bound on the number of density cells any convolution may produce.
inline constexpr std::size_t kMaxDensityCells = std::size_t{1} << 26;

/// Default lattice refinement: h = a / 2^8.
inline constexpr int kDefaultStepExponent = 8;

/// P(z = +a | H0) = P(x + n > 2a) for host scale lambda1 and noise scale g * lambda1.
inline double prob_P(double a, double host_scale, double g) {
  if (!(a > 0.0)) throw ConfigError("strength a must be > 0");
  if (!(host_scale > 0.0) || !(g > 0.0)) throw ConfigError("scales must be > 0");
  return sum_tail(2.0 * a, host_scale, g * host_scale);
}

/// Law of one clamped observation under H0, on the lattice h = a / 2^k.
inline MixedPdf z_pdf_h0(double a, double host_scale, double g, int k = kDefaultStepExponent) {
  if (k < 4 || k > 24) throw ConfigError("step exponent k must lie in [4, 24]");
  if (!(a > 0.0)) throw ConfigError("strength a must be > 0");
  const LaplaceSum law(host_scale, g * host_scale);
  const std::int64_t half = std::int64_t{1} << k;
  const double h = std::ldexp(a, -k);

  std::vector<Atom> atoms{{-half, 0.5}, {half, law.tail(2.0 * a)}};
  // Cell j of z covers y = z + a in [j h, (j + 1) h); store exact cell averages.
  std::vector<double> density(static_cast<std::size_t>(2 * half));
  double upper = law.tail(0.0);
  for (std::size_t j = 0; j < density.size(); ++j) {
    const double lower = law.tail(static_cast<double>(j + 1) * h);
    density[j] = std::max(upper - lower, 0.0) / h;
    upper = lower;
  }
  return MixedPdf(h, std::move(atoms), -half, std::move(density));
}

namespace detail {

// Values this small only cost time (subnormal arithmetic) and carry no mass
// that matters at double precision.
inline constexpr double kDensityFloor = 1e-280;

inline void add_shifted(std::vector<double>& out, std::int64_t out_origin,
                        std::span<const double> src, std::int64_t src_origin, double weight) {
  double* dst = out.data() + (src_origin - out_origin);
  for (std::size_t j = 0; j < src.size(); ++j) dst[j] += weight * src[j];
}

}  // namespace detail

/// Law of the sum of independent variables with laws x and y (same step).
inline MixedPdf convolve(const MixedPdf& x, const MixedPdf& y) {
  if (x.step() != y.step()) throw ConfigError("convolution requires identical lattice steps");
  const double h = x.step();

  std::vector<Atom> atoms;
  atoms.reserve(x.atoms().size() * y.atoms().size());
  for (const Atom& ax : x.atoms())
    for (const Atom& ay : y.atoms()) atoms.push_back({ax.index + ay.index, ax.mass * ay.mass});

  const auto dx = x.density();
  const auto dy = y.density();
  std::int64_t lo = std::numeric_limits<std::int64_t>::max();
  std::int64_t hi = std::numeric_limits<std::int64_t>::min();
  auto extend = [&](std::int64_t from, std::size_t len) {
    if (len == 0) return;
    lo = std::min(lo, from);
    hi = std::max(hi, from + static_cast<std::int64_t>(len));
  };
  if (!dx.empty() && !dy.empty()) extend(x.origin() + y.origin(), dx.size() + dy.size());
  for (const Atom& ax : x.atoms()) extend(ax.index + y.origin(), dy.size());
  for (const Atom& ay : y.atoms()) extend(ay.index + x.origin(), dx.size());

  if (lo > hi) return MixedPdf(h, std::move(atoms), 0, {});
  const auto cells = static_cast<std::size_t>(hi - lo);
  if (cells > kMaxDensityCells)
    throw ResourceError("convolution grid of " + std::to_string(cells) +
                        " cells exceeds the limit; lower the step exponent k");

  std::vector<double> out(cells, 0.0);
  if (!dx.empty() && !dy.empty()) {
    // Two uniform cells i, j convolve to a triangle spread evenly over cells
    // i + j and i + j + 1 (in units of h, relative to the summed origins).
    std::vector<double> raw(dx.size() + dy.size() - 1, 0.0);
    for (std::size_t i = 0; i < dx.size(); ++i) {
      const double p = dx[i];
      if (p == 0.0) continue;
      double* r = raw.data() + i;
      for (std::size_t j = 0; j < dy.size(); ++j) r[j] += p * dy[j];
    }
    double* dst = out.data() + (x.origin() + y.origin() - lo);
    const double w = 0.5 * h;
    for (std::size_t m = 0; m < raw.size(); ++m) {
      dst[m] += w * raw[m];
      dst[m + 1] += w * raw[m];
    }
  }
  for (const Atom& ax : x.atoms())
    if (!dy.empty()) detail::add_shifted(out, lo, dy, ax.index + y.origin(), ax.mass);
  for (const Atom& ay : y.atoms())
    if (!dx.empty()) detail::add_shifted(out, lo, dx, ay.index + x.origin(), ay.mass);

  for (double& v : out)
    if (v < detail::kDensityFloor) v = 0.0;
  return MixedPdf(h, std::move(atoms), lo, std::move(out));
}

/// n-fold self-convolution. `visit(m, law)` is called for every partial sum
/// m = 1..n, which lets callers read several n from one pass.
template <class Visitor>
void convolve_series(const MixedPdf& base, std::size_t n, Visitor&& visit) {
  if (n < 1) throw ConfigError("convolution count n must be >= 1");
  MixedPdf acc = base;
  visit(std::size_t{1}, static_cast<const MixedPdf&>(acc));
  for (std::size_t m = 2; m <= n; ++m) {
    acc = convolve(acc, base);
    visit(m, static_cast<const MixedPdf&>(acc));
  }
}

inline MixedPdf convolve_n(const MixedPdf& base, std::size_t n) {
  MixedPdf result;
  convolve_series(base, n, [&](std::size_t m, const MixedPdf& law) {
    if (m == n) result = law;
  });
  return result;
}

struct ErrorReport {
  double p_exact = 0.0;   ///< P(Z >= 0 | H0): decoder error with ties decided as bit 1
  double p_strict = 0.0;  ///< P(Z > 0 | H0)
  double tie_mass = 0.0;  ///< P(Z == 0 | H0)
  double p_approx = 0.0;  ///< closed-form approximation
  double p_atom_P = 0.0;  ///< P(z = +a | H0)
  std::size_t n = 0;
  double snr_db = 0.0;
  double a = 0.0;
};

/// (1 / (1 + 2P))^N * sum_{i = floor(N/2) + 1}^{N} C(N, i) P^{N - i}, in log space.
inline double perr_approx(double p_atom, std::size_t n) {
  if (!(p_atom > 0.0 && p_atom < 0.5)) throw ConfigError("P must lie in (0, 0.5)");
  if (n < 1) throw ConfigError("N must be >= 1");
  const double nn = static_cast<double>(n);
  const double log_p = std::log(p_atom);
  const double lg_n1 = std::lgamma(nn + 1.0);
  std::vector<double> terms;
  terms.reserve(n / 2 + 1);
  for (std::size_t i = n / 2 + 1; i <= n; ++i) {
    const double ii = static_cast<double>(i);
    terms.push_back(lg_n1 - std::lgamma(ii + 1.0) - std::lgamma(nn - ii + 1.0) + (nn - ii) * log_p);
  }
  const double peak = *std::max_element(terms.begin(), terms.end());
  double acc = 0.0;
  for (double t : terms) acc += std::exp(t - peak);
  const double log_result = -nn * std::log1p(2.0 * p_atom) + peak + std::log(acc);
  return std::clamp(std::exp(log_result), 0.0, 1.0);
}

namespace detail {

inline ErrorReport make_report(const MixedPdf& law, std::size_t n, double a, double p_atom,
                               double g) {
  ErrorReport r;
  r.p_exact = std::clamp(law.mass_at_or_above(0), 0.0, 1.0);
  r.tie_mass = law.atom_mass_at(0);
  r.p_strict = std::clamp(r.p_exact - r.tie_mass, 0.0, 1.0);
  r.p_atom_P = p_atom;
  r.p_approx = (p_atom > 0.0 && p_atom < 0.5) ? perr_approx(p_atom, n)
                                               : std::numeric_limits<double>::quiet_NaN();
  r.n = n;
  r.snr_db = snr_db(g);
  r.a = a;
  return r;
}

}  // namespace detail

/// Reports for several spreading lengths from a single convolution pass.
inline std::vector<ErrorReport> error_reports(double a, double host_scale, double g,
                                              std::span<const std::size_t> ns,
                                              int k = kDefaultStepExponent) {
  std::vector<ErrorReport> out(ns.size());
  if (ns.empty()) return out;
  std::size_t n_max = 0;
  for (std::size_t n : ns) {
    if (n < 1) throw ConfigError("N must be >= 1");
    n_max = std::max(n_max, n);
  }
  const double p_atom = prob_P(a, host_scale, g);
  const MixedPdf base = z_pdf_h0(a, host_scale, g, k);
  convolve_series(base, n_max, [&](std::size_t m, const MixedPdf& law) {
    for (std::size_t i = 0; i < ns.size(); ++i)
      if (ns[i] == m) out[i] = detail::make_report(law, m, a, p_atom, g);
  });
  return out;
}

inline ErrorReport error_report(double a, double host_scale, double g, std::size_t n,
                                int k = kDefaultStepExponent) {
  const std::size_t ns[] = {n};
  return error_reports(a, host_scale, g, ns, k).front();
}

/// Exact error probability of the clamped-sum decoder (ties count as errors
/// under H0, matching the decoders' tie rule). Symmetric in the sent bit.
inline double perr_exact(double a, double host_scale, double g, std::size_t n,
                         int k = kDefaultStepExponent) {
  return error_report(a, host_scale, g, n, k).p_exact;
}

}  // namespace lapwm
