#include <cmath>
#include <random>

#include <gtest/gtest.h>

#include "lapwm/error_analysis.hpp"
#include "oracles.hpp"

using namespace lapwm;

namespace {

// Closed form of P(z = +a | H0) under the scale reading, g != 1.
double closed_form_P(double a, double l1, double g) {
  return 0.5 * g / (g * g - 1.0) * (g * std::exp(-2 * a / (g * l1)) - std::exp(-2 * a / l1) / g);
}

// P(z1 + z2 >= 0 | H0) for two clamped observations by enumeration of the
// atom/continuous cases, continuous-continuous by nested quadrature.
double brute_force_two(double a, double l1, double g) {
  const double l2 = g * l1;
  auto f = [&](double y) { return oracle::closed_form_sum_pdf(y, l1, l2); };
  const double P = oracle::sum_tail(2 * a, l1, l2);
  const double cont = 0.5 - P;
  double result = P * P + 2 * 0.5 * P + 2 * P * cont;
  const double cc = oracle::integrate(
      [&](double z1) {
        const double lo = std::max(-z1, -a);
        if (lo >= a) return 0.0;
        return f(z1 + a) * oracle::integrate([&](double z2) { return f(z2 + a); }, lo, a);
      },
      -a, a);
  return result + cc;
}

}  // namespace

TEST(ProbP, Examples) {
  const double q = oracle::sum_tail(2.0, 1.0, 0.5);
  EXPECT_NEAR(prob_P(1.0, 1.0, 0.5), q, 1e-12);
  EXPECT_NEAR(prob_P(1.0, 1.0, 0.5), 0.08717, 5e-6);
  EXPECT_NEAR(prob_P(1.0, 1.0, 1.0), std::exp(-2.0), 1e-15);
  EXPECT_NEAR(prob_P(1.0, 1.0, 1.0), oracle::sum_tail(2.0, 1.0, 1.0), 1e-12);
  EXPECT_LT(prob_P(1000.0, 1.0, 0.5), 1e-300);
  EXPECT_THROW(prob_P(0.0, 1.0, 1.0), ConfigError);
}

TEST(ProbP, MatchesClosedFormAndQuadrature) {
  std::mt19937_64 rng(21);
  std::uniform_real_distribution<double> ua(0.05, 3.0), ul(0.2, 3.0), ug(0.2, 5.0);
  for (int i = 0; i < 100; ++i) {
    const double a = ua(rng), l1 = ul(rng), g = ug(rng);
    const double p = prob_P(a, l1, g);
    EXPECT_GT(p, 0.0);
    EXPECT_LT(p, 0.5);
    EXPECT_NEAR(p, oracle::sum_tail(2 * a, l1, g * l1), 1e-10);
    if (std::abs(g - 1.0) > 1e-3) EXPECT_NEAR(p, closed_form_P(a, l1, g), 1e-12);
  }
}

TEST(ZPdfH0, Structure) {
  const double a = 1.0, P = prob_P(1.0, 1.0, 0.5);
  const MixedPdf z = z_pdf_h0(a, 1.0, 0.5, 8);
  EXPECT_EQ(z.step(), 1.0 / 256);
  ASSERT_EQ(z.atoms().size(), 2u);
  EXPECT_EQ(z.atom_position(z.atoms()[0]), -1.0);
  EXPECT_EQ(z.atoms()[0].mass, 0.5);
  EXPECT_EQ(z.atom_position(z.atoms()[1]), 1.0);
  EXPECT_DOUBLE_EQ(z.atoms()[1].mass, P);
  EXPECT_NEAR(z.total_mass(), 1.0, 1e-6);
  EXPECT_NEAR(z.continuous_mass(), 0.5 - P, 1e-6);
  EXPECT_EQ(z.density().size(), 512u);
  for (double d : z.density()) EXPECT_GE(d, 0.0);
  EXPECT_EQ(z.support_bound(), 1.0);
}

TEST(ZPdfH0, CellAveragesTrackTheDensity) {
  const MixedPdf z = z_pdf_h0(0.7, 1.2, 2.0, 10);
  const LaplaceSum law(1.2, 2.4);
  for (std::size_t j = 0; j < z.density().size(); j += 37) {
    const double mid = z.cell_left(j) + 0.5 * z.step();
    EXPECT_NEAR(z.density()[j], law.pdf(mid + 0.7), 1e-6);
  }
}

TEST(ZPdfH0, Errors) {
  EXPECT_THROW(z_pdf_h0(1.0, 1.0, 1.0, 3), ConfigError);
  EXPECT_THROW(z_pdf_h0(-1.0, 1.0, 1.0, 8), ConfigError);
}

TEST(ZPdfH0, MeanMatchesQuadrature) {
  const double a = 1.0, l1 = 1.0, g = 0.5;
  const double P = prob_P(a, l1, g);
  const double cont = oracle::integrate(
      [&](double z) { return z * oracle::closed_form_sum_pdf(z + a, l1, g * l1); }, -a, a);
  EXPECT_NEAR(z_pdf_h0(a, l1, g).mean(), -0.5 * a + P * a + cont, 1e-5);
}

TEST(Convolve, IdentityAndAtomPairs) {
  const MixedPdf base = z_pdf_h0(1.0, 1.0, 0.5, 6);
  const MixedPdf one = convolve_n(base, 1);
  EXPECT_EQ(one.origin(), base.origin());
  EXPECT_EQ(std::vector<double>(one.density().begin(), one.density().end()),
            std::vector<double>(base.density().begin(), base.density().end()));

  const double P = base.atoms()[1].mass;
  const MixedPdf two = convolve_n(base, 2);
  const std::int64_t unit = 1 << 6;
  EXPECT_DOUBLE_EQ(two.atom_mass_at(-2 * unit), 0.25);
  EXPECT_DOUBLE_EQ(two.atom_mass_at(2 * unit), P * P);
  EXPECT_DOUBLE_EQ(two.atom_mass_at(0), 2 * 0.5 * P);
  EXPECT_EQ(two.atoms().size(), 3u);
}

TEST(Convolve, MeanIsAdditive) {
  const MixedPdf base = z_pdf_h0(1.0, 1.0, 0.5);
  EXPECT_NEAR(convolve_n(base, 3).mean(), 3 * base.mean(), 1e-6);
}

TEST(Convolve, MassConservedUpTo256) {
  const MixedPdf base = z_pdf_h0(1.0, 1.0, 0.5);
  double worst = 0.0;
  convolve_series(base, 256, [&](std::size_t, const MixedPdf& law) {
    worst = std::max(worst, std::abs(law.total_mass() - 1.0));
  });
  EXPECT_LT(worst, 1e-5);
}

TEST(Convolve, Errors) {
  const MixedPdf a = z_pdf_h0(1.0, 1.0, 0.5, 6);
  const MixedPdf b = z_pdf_h0(1.0, 1.0, 0.5, 7);
  EXPECT_THROW(convolve(a, b), ConfigError);
  EXPECT_THROW(convolve_n(a, 0), ConfigError);
  const MixedPdf wide(1.0, {{0, 0.5}, {std::int64_t{1} << 28, 0.5}}, 0, std::vector<double>(4, 0.0));
  EXPECT_THROW(convolve(wide, wide), ResourceError);
}

TEST(PerrExact, SaturationRegime) { EXPECT_LT(perr_exact(20.0, 1.0, 0.5, 4), 1e-6); }

TEST(PerrExact, SingleObservationIsATail) {
  // P(z >= 0 | H0) = P(x + n - a >= 0).
  for (auto [a, l1, g] : {std::tuple{1.0, 1.0, 0.5}, std::tuple{0.3, 2.0, 1.0}, std::tuple{2.0, 0.5, 3.0}})
    EXPECT_NEAR(perr_exact(a, l1, g, 1), sum_tail(a, l1, g * l1), 1e-8);
}

TEST(PerrExact, TwoObservationsMatchEnumeration) {
  for (auto [a, l1, g] : {std::tuple{1.0, 1.0, 0.5}, std::tuple{0.5, 1.0, 2.0}}) {
    const double ref = brute_force_two(a, l1, g);
    EXPECT_NEAR(perr_exact(a, l1, g, 2, 10), ref, 2e-6) << a << ' ' << g;
  }
}

TEST(PerrExact, GridRefinementConverges) {
  const double coarse = perr_exact(1.0, 1.0, 0.5, 20, 6);
  const double fine = perr_exact(1.0, 1.0, 0.5, 20, 9);
  EXPECT_NEAR(coarse, fine, 1e-3 * fine);
}

TEST(PerrExact, MonotoneInN) {
  std::vector<std::size_t> ns;
  for (std::size_t n = 4; n <= 128; n += 4) ns.push_back(n);
  const auto reports = error_reports(1.0, 1.0, g_from_snr_db(6.0), ns);
  for (std::size_t i = 1; i < reports.size(); ++i) EXPECT_LE(reports[i].p_exact, reports[i - 1].p_exact) << ns[i];
}

TEST(PerrExact, MonotoneInStrengthAndN) {
  const std::vector<double> as{0.25, 0.5, 1.0, 2.0, 4.0};
  const std::vector<std::size_t> ns{4, 8, 16, 32, 64};
  std::vector<std::vector<double>> grid;
  for (double a : as) {
    std::vector<double> row;
    for (const auto& r : error_reports(a, 1.0, 0.5, ns, 6)) row.push_back(r.p_exact);
    grid.push_back(row);
  }
  for (std::size_t i = 0; i < as.size(); ++i)
    for (std::size_t j = 0; j < ns.size(); ++j) {
      if (i > 0) EXPECT_LE(grid[i][j], grid[i - 1][j]);
      if (j > 0) EXPECT_LE(grid[i][j], grid[i][j - 1]);
    }
}

TEST(ErrorReport, TieMassSeparated) {
  const ErrorReport r = error_report(1.0, 1.0, 1.0, 8);
  EXPECT_GT(r.tie_mass, 0.0);
  EXPECT_NEAR(r.p_exact - r.p_strict, r.tie_mass, 1e-15);
  EXPECT_EQ(r.n, 8u);
  EXPECT_NEAR(r.snr_db, 0.0, 1e-12);
  EXPECT_EQ(error_report(1.0, 1.0, 1.0, 7).tie_mass, 0.0);
}

TEST(PerrApprox, Examples) {
  EXPECT_NEAR(perr_approx(0.25, 2), 4.0 / 9.0, 1e-14);
  for (double P : {0.01, 0.2, 0.49}) EXPECT_NEAR(perr_approx(P, 1), 1.0 / (1.0 + 2 * P), 1e-14);
  const double P = 0.1;
  EXPECT_NEAR(perr_approx(P, 3), (3 * P + 1) / std::pow(1 + 2 * P, 3), 1e-14);
  EXPECT_THROW(perr_approx(0.0, 4), ConfigError);
  EXPECT_THROW(perr_approx(0.5, 4), ConfigError);
  EXPECT_THROW(perr_approx(0.2, 0), ConfigError);
}

TEST(PerrApprox, LargeNStaysFinite) {
  const double v = perr_approx(0.1, 5000);
  EXPECT_TRUE(std::isfinite(v));
  EXPECT_GE(v, 0.0);
  EXPECT_LE(v, 1.0);
  // Against the direct sum for a moderate N.
  const std::size_t n = 40;
  double direct = 0.0;
  for (std::size_t i = n / 2 + 1; i <= n; ++i)
    direct += std::exp(std::lgamma(n + 1.0) - std::lgamma(i + 1.0) - std::lgamma(n - i + 1.0)) *
              std::pow(0.1, static_cast<double>(n - i));
  EXPECT_NEAR(perr_approx(0.1, n), direct / std::pow(1.2, 40.0), 1e-12);
}
