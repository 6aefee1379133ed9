#include <gtest/gtest.h>

#include <cmath>
#include <numeric>
#include <numbers>

#include "oracles.hpp"
#include "powerlawst/crosstalk.hpp"

using namespace powerlawst;

TEST(PairBound, Examples) {
  EXPECT_DOUBLE_EQ(pair_interaction_bound(1, 1, 3.0, 2), 1.0);
  EXPECT_DOUBLE_EQ(pair_interaction_bound(2, 4, 3.0, 2), 0.25);
  EXPECT_NEAR(pair_interaction_bound(3, 6, 6.0, 3), std::pow(0.5, 6), 1e-15);
  EXPECT_THROW(pair_interaction_bound(2, 1.5, 3.0, 2), DomainError);
}

TEST(ShellSum, MatchesEnumerationInsideTable) {
  for (int d = 1; d <= 3; ++d) {
    for (double alpha : {d + 0.5, d + 1.0, 2.0 * d + 0.7}) {
      const auto& sums = LatticeShellSum::cached(alpha, d);
      for (double K : {1.0, 1.5, 2.0, std::sqrt(5.0), 7.3, 20.0}) {
        EXPECT_NEAR(sums.partial(K), oracle::same_color_sum(1, 1, K, alpha, d), 1e-12 * sums.partial(K))
            << "d=" << d << " alpha=" << alpha << " K=" << K;
      }
      EXPECT_EQ(sums.partial(0.99), 0.0);
    }
  }
}

TEST(ShellSum, TailBeyondTable) {
  const auto& s2 = LatticeShellSum::cached(3.0, 2);
  const double K = 1500.0;
  ASSERT_GT(K, s2.table_radius());
  EXPECT_NEAR(s2.partial(K), oracle::same_color_sum(1, 1, K, 3.0, 2), 1e-6 * s2.partial(K));
  const auto& s1 = LatticeShellSum::cached(2.0, 1);
  EXPECT_NEAR(s1.total(), std::numbers::pi * std::numbers::pi / 3.0, 1e-9);
  EXPECT_NEAR(s1.partial(1e6), std::numbers::pi * std::numbers::pi / 3.0 - 2e-6, 1e-9);
}

TEST(CrosstalkNorm, FirstShell) {
  // Just past R only the 2d nearest same-color blocks contribute, each at the pair bound.
  for (int d = 1; d <= 3; ++d) {
    const double L = 2, R = 5;
    const auto n = crosstalk_norm(L, R, R * 1.01, d + 1.0, d);
    EXPECT_NEAR(n.value, 2.0 * d * pair_interaction_bound(L, R, d + 1.0, d), 1e-14);
  }
}

TEST(CrosstalkNorm, ZetaTwoIn1D) {
  const auto n = crosstalk_norm(1, 1, 1e7, 2.0, 1);
  EXPECT_NEAR(n.value, std::numbers::pi * std::numbers::pi / 3.0, 1e-6);
  EXPECT_NEAR(n.bound_constant, std::numbers::pi * std::numbers::pi / 3.0, 1e-9);
  EXPECT_FALSE(n.divergent);
}

TEST(CrosstalkNorm, MatchesBruteForce) {
  for (double L : {1.0, 3.0}) {
    for (double R : {3.0, 6.5}) {
      for (double r : {10.0, 47.0, 200.0}) {
        const auto n = crosstalk_norm(L, R, r, 3.0, 2);
        EXPECT_NEAR(n.value, oracle::same_color_sum(L, R, r, 3.0, 2), 1e-12 * n.value);
      }
    }
  }
}

TEST(CrosstalkNorm, BoundedByClosedForm) {
  double prev = 0.0;
  for (double r = 10; r < 1e6; r *= 1.7) {
    const auto n = crosstalk_norm(2, 4, r, 3.0, 2);
    const double unit = std::pow(2.0, 4) / std::pow(4.0, 3);
    EXPECT_LE(n.value, n.closed_form_bound * (1 + 1e-12));
    EXPECT_GE(n.value, prev);
    EXPECT_NEAR(n.closed_form_bound / unit, n.bound_constant, 1e-12 * n.bound_constant);
    prev = n.value;
  }
}

TEST(CrosstalkNorm, DivergentRegimeFlagged) {
  const auto a = crosstalk_norm(1, 2, 100, 2.0, 2);
  const auto b = crosstalk_norm(1, 2, 10000, 2.0, 2);
  EXPECT_TRUE(a.divergent);
  EXPECT_GT(b.value, a.value * 1.5);
  EXPECT_TRUE(std::isinf(a.closed_form_bound));
}

TEST(CrosstalkNorm, PreconditionsAndEmptyRegion) {
  EXPECT_THROW(crosstalk_norm(2, 1, 10, 3.0, 2), DomainError);
  EXPECT_THROW(crosstalk_norm(0.5, 1, 10, 3.0, 2), DomainError);
  EXPECT_EQ(crosstalk_norm(2, 8, 5, 3.0, 2).value, 0.0);
}

TEST(EpsLevel, ConventionRatioIsN) {
  for (double n : {1.0, 4.0, 9.0, 37.0}) {
    const double pub = eps_level(5, n, 2000, 3.0, 2, Convention::kPublished);
    const double dra = eps_level(5, n, 2000, 3.0, 2, Convention::kDraft);
    EXPECT_NEAR(pub / dra, n, 1e-12 * n);
  }
  EXPECT_THROW(eps_level(5, 0.5, 100, 3.0, 2, Convention::kDraft), DomainError);
}

TEST(EpsLevel, SixthPowerIn3DHasNoLengthDependence) {
  // Draft, alpha = 6 = 2d: L^6 / R^6 = 1/n^2 per neighbour; the remaining L dependence is t_GHZ.
  const double n = 8;
  for (double L : {2.0, 5.0, 40.0}) {
    const double e = eps_level(L, n, 3.0 * std::cbrt(n) * L, 6.0, 3, Convention::kDraft);
    const double per_neighbour = e / (t_ghz(L, 6.0, 3) * LatticeShellSum::cached(6.0, 3).partial(3.0));
    EXPECT_NEAR(per_neighbour, 1.0 / (n * n), 1e-15);
  }
}

TEST(EpsLevel, CriticalExponentPublished) {
  // alpha = 2d with the untruncated constant: eps = c exp(gamma sqrt(log L)) / n^(alpha/d - 1).
  const double c = LatticeShellSum::cached(4.0, 2).total();
  const double gamma = 3 * std::sqrt(2.0);
  for (double L : {3.0, 30.0, 300.0}) {
    for (double n : {2.0, 9.0}) {
      const double e = eps_level(L, n, 1e9, 4.0, 2, Convention::kPublished, NormModel::kClosedFormBound);
      EXPECT_NEAR(e, c * std::exp(gamma * std::sqrt(std::log(L))) / n, 1e-10 * e);
    }
  }
}

TEST(Levels, DoublyExponentialCount) {
  for (double r0 : {2.0, 3.0, 10.0}) {
    for (double r : {50.0, 1e3, 1e6, 1e12}) {
      const double lambda = 4.0 / 3.0;
      const auto levels = level_lengths(r, r0, 3.0, 2, LevelSchedule::kDoublyExponential);
      // Direct iteration of L -> L^lambda.
      int count = 0;
      for (double L = r0; L < r; L = std::pow(L, lambda)) ++count;
      EXPECT_EQ(static_cast<int>(levels.size()), count + 1);
      EXPECT_EQ(levels.back(), r);
      const double closed = std::ceil((std::log(std::log(r)) - std::log(std::log(r0))) / std::log(lambda));
      EXPECT_LE(std::abs(count - closed), 1.0);
    }
  }
}

TEST(Levels, SchedulesAndDefaults) {
  EXPECT_EQ(resolve_schedule(3.0, 2, Convention::kPublished, LevelSchedule::kAuto), LevelSchedule::kDoublyExponential);
  EXPECT_EQ(resolve_schedule(4.0, 2, Convention::kDraft, LevelSchedule::kAuto), LevelSchedule::kGeometric);
  EXPECT_EQ(resolve_schedule(5.0, 2, Convention::kPublished, LevelSchedule::kAuto), LevelSchedule::kGeometric);
  EXPECT_EQ(resolve_schedule(5.0, 2, Convention::kDraft, LevelSchedule::kAuto), LevelSchedule::kSquaring);
  EXPECT_EQ(level_lengths(100, 2, 5.0, 2, LevelSchedule::kSquaring), (std::vector<double>{2, 4, 16, 100}));
  EXPECT_EQ(level_lengths(20, 2, 5.0, 2, LevelSchedule::kGeometric, 3.0), (std::vector<double>{2, 6, 18, 20}));
  EXPECT_THROW(level_lengths(20, 2, 5.0, 2, LevelSchedule::kDoublyExponential), DomainError);
  EXPECT_THROW(level_lengths(2, 2, 3.0, 2, LevelSchedule::kGeometric), DomainError);
}

TEST(Total, SumsLevels) {
  const auto b = total_crosstalk(1e4, 2, 9, 3.0, 2, Convention::kPublished);
  double s = 0.0;
  for (const auto& [L, e] : b.per_level) s += e;
  EXPECT_DOUBLE_EQ(b.total, s);
  EXPECT_EQ(b.i_max, static_cast<int>(b.per_level.size()) - 1);
  EXPECT_GT(b.analytic_bound, 0.0);
  EXPECT_THROW(total_crosstalk(1e4, 2, 9, 2.0, 2, Convention::kPublished), DomainError);
}

TEST(Total, ConventionBridge) {
  for (double alpha : {3.0, 4.0, 5.0}) {
    CrosstalkOptions opt;
    opt.schedule = alpha < 4.0 ? LevelSchedule::kDoublyExponential : LevelSchedule::kGeometric;
    const auto pub = total_crosstalk(5e4, 2, 7, alpha, 2, Convention::kPublished, opt);
    const auto dra = total_crosstalk(5e4, 2, 7, alpha, 2, Convention::kDraft, opt);
    EXPECT_NEAR(pub.total, 7 * dra.total, 1e-12 * pub.total);
  }
}

TEST(Total, MonotoneSweeps) {
  for (auto conv : {Convention::kPublished, Convention::kDraft}) {
    for (double alpha : {2.5, 3.0, 3.5, 4.0, 5.0, 6.0}) {
      for (auto norm : {NormModel::kLatticeSum, NormModel::kClosedFormBound}) {
        CrosstalkOptions opt;
        opt.norm = norm;
        double prev = std::numeric_limits<double>::infinity();
        for (double n = 1; n <= 1 << 20; n *= 2) {
          const double t = total_crosstalk(1e5, 2, n, alpha, 2, conv, opt).total;
          if (prev > 0.0) {
            EXPECT_LT(t, prev) << "alpha " << alpha << " n " << n;
          } else {
            EXPECT_EQ(t, 0.0);
          }
          prev = t;
        }
        // Squaring levels under the closed-form norm: the truncated last level shrinks as it grows.
        if (conv == Convention::kDraft && alpha > 4.0 && norm == NormModel::kClosedFormBound) continue;
        prev = 0.0;
        for (double r = 8; r <= 1e7; r *= 2) {
          const double t = total_crosstalk(r, 2, 4, alpha, 2, conv, opt).total;
          // Geometric levels make the total a step function of r.
          EXPECT_GE(t, prev) << "alpha " << alpha << " r " << r;
          prev = t;
        }
      }
    }
  }
}

TEST(Total, BoundDecaysAsColorPower) {
  // Closed-form norm, alpha = 3, d = 2: every level scales as n * n^(-alpha/d) = n^(-1/2).
  double prev = total_crosstalk(1e4, 2, 1, 3.0, 2, Convention::kPublished, {NormModel::kClosedFormBound}).total;
  for (double n = 10; n < 1e15; n *= 10) {
    const double t = total_crosstalk(1e4, 2, n, 3.0, 2, Convention::kPublished, {NormModel::kClosedFormBound}).total;
    EXPECT_NEAR(t / prev, 1.0 / std::sqrt(10.0), 1e-12) << n;
    prev = t;
  }
}

TEST(Total, FastDecayGrowsLikeLogR) {
  // alpha = 5, d = 2: geometric levels each contribute a bounded amount, so total / ln r levels off.
  std::vector<double> ratios;
  for (double r = 1e4; r <= 1e8; r *= 3) {
    ratios.push_back(total_crosstalk(r, 2, 4, 5.0, 2, Convention::kPublished).total / std::log(r));
  }
  const double mean = std::accumulate(ratios.begin(), ratios.end(), 0.0) / double(ratios.size());
  for (double q : ratios) EXPECT_NEAR(q, mean, 0.1 * mean);
}

TEST(Colors, SmallestSufficientCount) {
  for (auto conv : {Convention::kPublished, Convention::kDraft}) {
    for (double r : {1e3, 1e4}) {
      const auto req = colors_required(r, 2, 0.5, 3.0, 2, conv);
      EXPECT_FALSE(req.saturated);
      EXPECT_LE(req.total_at_n, 0.5);
      EXPECT_DOUBLE_EQ(total_crosstalk(r, 2, double(req.n), 3.0, 2, conv).total, req.total_at_n);
      if (req.n > 1) EXPECT_GT(total_crosstalk(r, 2, double(req.n - 1), 3.0, 2, conv).total, 0.5);
    }
  }
  EXPECT_THROW(colors_required(1e3, 2, 0.0, 3.0, 2, Convention::kPublished), DomainError);
}

TEST(Colors, AnalyticClasses) {
  const auto fast = analytic_color_class(5.0, 2, Convention::kPublished);
  EXPECT_EQ(fast.kind, ScalingKind::kPolylog);
  EXPECT_NEAR(fast.exponent, 2.0 / 3.0, 1e-12);
  const auto mid = analytic_color_class(3.0, 2, Convention::kPublished);
  EXPECT_EQ(mid.kind, ScalingKind::kPower);
  EXPECT_NEAR(mid.exponent, 2.0, 1e-12);
  EXPECT_NEAR(analytic_color_class(3.0, 2, Convention::kDraft).exponent, 2.0 / 3.0, 1e-12);
  EXPECT_EQ(analytic_color_class(4.0, 2, Convention::kPublished).kind, ScalingKind::kStretchedExponential);
}

TEST(Pulses, SmallColorCounts) {
  EXPECT_EQ(pulse_count(5).total, 16u);
  EXPECT_EQ(pulse_count(5).per_color, (std::vector<std::uint64_t>{0, 2, 4, 8, 16}));
  EXPECT_EQ(pulse_count(25).total, std::uint64_t{1} << 24);
  EXPECT_EQ(pulse_count(25).total, 16777216u);
  EXPECT_EQ(pulse_count(13).total, 4096u);
  EXPECT_NEAR(pulse_total_estimate(25.0 / 2.0), 2896.3, 0.1);
  EXPECT_EQ(pulse_count(1).total, 0u);
  EXPECT_EQ(pulse_count(2).total, 2u);
  EXPECT_THROW(pulse_count(0), DomainError);
  EXPECT_THROW(pulse_count(64), DomainError);
}

TEST(Pulses, Identities) {
  for (int n = 2; n <= 63; ++n) {
    const auto p = pulse_count(n);
    EXPECT_EQ(p.total, std::uint64_t{1} << (n - 1));
    // 2 + sum_{i=3}^{n} 2^(i-1) telescopes to 2^n - 2.
    EXPECT_EQ(p.sum_over_colors, (std::uint64_t{1} << n) - 2) << n;
    EXPECT_EQ(p.per_color.back(), p.total);
  }
}
