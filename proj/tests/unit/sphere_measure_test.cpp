#include "waistlab/sphere_measure.hpp"

#include <boost/math/distributions/chi_squared.hpp>
#include <boost/math/special_functions/beta.hpp>
#include <boost/math/special_functions/gamma.hpp>
#include <gtest/gtest.h>

using namespace waistlab;

TEST(SpecialFunctions, IbetaMatchesBoost) {
  for (double a : {0.5, 1.0, 1.5, 3.0, 12.5, 30.0}) {
    for (double b : {0.5, 1.0, 2.0, 7.5, 29.0}) {
      for (double x : {1e-8, 0.01, 0.2, 0.5, 0.77, 0.999}) {
        double want = boost::math::ibeta(a, b, x);
        EXPECT_NEAR(special::ibeta(a, b, x), want, 1e-13 + 1e-12 * want) << a << " " << b << " " << x;
      }
    }
  }
}

TEST(SpecialFunctions, GammaMatchesBoost) {
  for (double a : {0.5, 1.0, 2.5, 10.0}) {
    for (double x : {1e-6, 0.3, 1.0, 4.0, 25.0, 80.0}) {
      EXPECT_NEAR(special::gamma_p(a, x), boost::math::gamma_p(a, x), 1e-13);
      double q = boost::math::gamma_q(a, x);
      EXPECT_NEAR(special::gamma_q(a, x), q, 1e-13 + 1e-10 * q);
    }
  }
}

TEST(SigmaExact, Anchors) {
  EXPECT_NEAR(sigma_exact(2, 1, kPi / 6), 0.5, 1e-12);
  EXPECT_NEAR(sigma_exact(3, 1, std::asin(0.5)), 0.25, 1e-12);
  EXPECT_EQ(sigma_exact(5, 4, kPi / 2), 1.0);
  EXPECT_NEAR(sigma_exact(1, 0, kPi / 4), 0.5, 1e-12);
}

TEST(SigmaExact, MatchesBetaCdfOracle) {
  for (int m = 1; m <= 40; m += 3) {
    for (int j = 0; j < m; j += 2) {
      for (double th : {0.1, 0.7, 1.3}) {
        double s = std::sin(th);
        double want = boost::math::ibeta(0.5 * (m - j), 0.5 * (j + 1), s * s);
        EXPECT_NEAR(sigma_exact(m, j, th), want, 1e-12);
      }
    }
  }
}

TEST(SigmaExact, DomainErrors) {
  EXPECT_THROW(sigma_exact(3, 3, 0.2), DomainError);
  EXPECT_THROW(sigma_exact(3, -1, 0.2), DomainError);
  EXPECT_THROW(sigma_exact(3, 1, 0.0), DomainError);
  EXPECT_THROW(sigma_exact(3, 1, 1.6), DomainError);
  EXPECT_THROW(sigma_exact(0, 0, 0.3), DomainError);
}

TEST(SigmaExact, MonotoneInThetaJAndM) {
  for (int m = 2; m <= 25; ++m) {
    for (int j = 0; j < m; ++j) {
      double prev = 0.0;
      for (int i = 1; i <= 20; ++i) {
        double th = i * (kPi / 2) / 20;
        double v = sigma_exact(m, j, th);
        EXPECT_GE(v, prev);
        if (i < 20 && v < 1.0) EXPECT_GT(v, prev);
        prev = v;
        if (j + 1 < m && i < 20 && v < 1.0) EXPECT_LT(v, sigma_exact(m, j + 1, th));
        EXPECT_LE(sigma_exact(m + 1, j, th), v + 1e-15);
      }
    }
  }
}

TEST(SigmaExact, ComplementIdentity) {
  for (int m = 1; m <= 60; ++m) {
    for (int j = 0; j < m; ++j) {
      for (double th : {0.05, 0.4, 0.785, 1.2, 1.55}) {
        EXPECT_NEAR(sigma_exact(m, j, th) + sigma_exact(m, m - j - 1, kPi / 2 - th), 1.0, 1e-12);
      }
    }
  }
}

TEST(SigmaMc, Examples) {
  Estimate a = sigma_mc({2, 1, kPi / 6}, 1000000, 3);
  EXPECT_NEAR(a.value, 0.5, 3 * a.standard_error);
  Estimate b = sigma_mc({1, 0, kPi / 4}, 1000000, 4);
  EXPECT_NEAR(b.value, 0.5, 3 * b.standard_error);
  Estimate c = sigma_mc({1, 0, kPi / 4}, 1000000, 4);
  EXPECT_EQ(b.value, c.value);
  EXPECT_THROW(sigma_mc({2, 1, 0.3}, 0, 1), DomainError);
}

TEST(SigmaLipLower, Examples) {
  EXPECT_NEAR(sigma_lip_lower(3, 2, kPi / 6), 0.0625, 1e-12);
  EXPECT_NEAR(sigma_lip_lower(3, 2, kPi / 2), 1.0, 1e-15);
  EXPECT_THROW(sigma_lip_lower(3, 3, 0.2), DomainError);
  EXPECT_THROW(sigma_lip_lower(3, 0, 0.2), DomainError);
  for (int n = 2; n <= 50; ++n) {
    for (int k = 1; k < n; ++k) {
      for (double th : {0.05, 0.5, 1.1}) EXPECT_LE(sigma_lip_lower(n, k, th), sigma_exact(n, k, th));
    }
  }
}

TEST(CapBounds, Arithmetic) {
  BoundConstants c;
  c.c_small = 0.1;
  c.C_big = 2.0;
  CapBounds b = cap_bounds(8, 2, 0.25, c);
  EXPECT_NEAR(b.lower, 3.90625e-7, 1e-20);
  EXPECT_NEAR(b.upper, 0.5, 1e-15);
  EXPECT_NEAR(b.lower_compl, 0.5, 1e-15);
  EXPECT_NEAR(b.upper_compl, 1.0 - 0.025 * 0.025, 1e-15);
}

TEST(CapBounds, SandwichWithLooseConstants) {
  BoundConstants c;
  c.c_small = 0.01;
  c.C_big = 30.0;
  CapBounds b = cap_bounds(8, 2, 0.25, c);
  double exact = sigma_exact(7, 5, std::asin(std::sqrt(0.015625)));
  EXPECT_LE(b.lower, exact);
  EXPECT_LE(exact, b.upper);
}

TEST(CapBounds, DomainErrors) {
  EXPECT_THROW(cap_bounds(8, 1, 0.25), DomainError);
  EXPECT_THROW(cap_bounds(8, 9, 0.25), DomainError);
  EXPECT_THROW(cap_bounds(8, 2, 0.5), DomainError);
  EXPECT_THROW(cap_bounds(8, 2, 0.0), DomainError);
  BoundConstants bad;
  bad.c_small = -1;
  EXPECT_THROW(cap_bounds(8, 2, 0.25, bad), DomainError);
}

TEST(CapBounds, FrozenDefaultsHoldOnGrid) {
  for (int k = 2; k <= 20; ++k) {
    for (int n = k + 1; n <= 100; n += 3) {
      for (int i = 0; i <= 12; ++i) {
        double eps = 0.01 + 0.04 * i;
        CapBounds b = cap_bounds(n, k, eps);
        double d = sigma_exact(n - 1, n - k - 1, cap_angle(n, k, eps));
        double c = sigma_exact(n - 1, k - 1, cap_angle_complement(n, k, eps));
        EXPECT_LE(b.lower, d);
        EXPECT_LE(d, b.upper);
        EXPECT_LE(b.lower_compl, c);
        EXPECT_LE(c, b.upper_compl);
        EXPECT_NEAR(c + d, 1.0, 1e-12);
      }
    }
  }
}

TEST(LipBounds, Arithmetic) {
  BoundConstants c;
  c.c_small = 0.05;
  c.C_big = 10.0;
  LipBounds b = lip_bounds(16, 4, 0.1, c);
  EXPECT_NEAR(b.bound_i, std::pow(0.005, 32), 1e-80);
  EXPECT_EQ(b.bound_ii, 0.0);
  c.C_big = 20.0;
  EXPECT_EQ(lip_bounds(16, 4, 0.1, c).bound_ii, 0.0);
  c.c_small = 0.01;
  EXPECT_LE(lip_bounds(16, 4, 0.1, c).bound_i, sigma_lip_lower(15, 11, std::asin(std::sqrt(0.0025))));
}

TEST(ChiSquare, MatchesBoostAndAnchors) {
  EXPECT_NEAR(chisq_cdf(2, 2.0), 1.0 - std::exp(-1.0), 1e-12);
  EXPECT_NEAR(chisq_cdf(1, 1.0), std::erf(1.0 / std::sqrt(2.0)), 1e-12);
  EXPECT_EQ(chisq_cdf(5, 0.0), 0.0);
  EXPECT_THROW(chisq_cdf(2, -1.0), DomainError);
  EXPECT_THROW(chisq_cdf(0, 1.0), DomainError);
  for (int k = 1; k <= 30; ++k) {
    boost::math::chi_squared_distribution<double> d(k);
    double prev = -1.0;
    for (double x : {0.01, 0.5, 2.0, 7.0, 20.0, 60.0}) {
      double v = chisq_cdf(k, x);
      EXPECT_NEAR(v, boost::math::cdf(d, x), 1e-12);
      EXPECT_NEAR(chisq_sf(k, x), boost::math::cdf(boost::math::complement(d, x)), 1e-12);
      EXPECT_GT(v, prev);
      prev = v;
    }
  }
  EXPECT_NEAR(chisq_cdf(3, 1e4), 1.0, 1e-15);
}

TEST(GaussianFact, Examples) {
  BoundConstants c;
  c.c_small = 0.3;
  auto r = gaussian_fact_check(1, 2.0, 0.1, c);
  EXPECT_NEAR(r.tail_probability, 0.0455, 1e-4);
  EXPECT_TRUE(r.tail_ok);
  c.c_small = 0.1;
  c.C_big = 2.0;
  auto s = gaussian_fact_check(3, 2.0, 0.2, c);
  EXPECT_NEAR(s.smallball_lower, 8e-6, 1e-18);
  EXPECT_NEAR(s.smallball_upper, 0.064, 1e-15);
  EXPECT_TRUE(s.smallball_ok);
  EXPECT_THROW(gaussian_fact_check(3, 1.5, 0.2), DomainError);
  EXPECT_THROW(gaussian_fact_check(3, 2.0, 0.0), DomainError);
}

TEST(GaussianFact, SmallEpsLimit) {
  auto r = gaussian_fact_check(4, 2.0, 1e-6);
  EXPECT_LT(r.smallball_probability, 1e-20);
  EXPECT_LT(r.smallball_upper, 1e-20);
  EXPECT_TRUE(r.smallball_ok);
}

TEST(GaussianFact, FrozenDefaultsOnGrid) {
  for (int k = 1; k <= 20; ++k) {
    for (double M : {2.0, 3.0, 4.0}) {
      for (int i = 1; i <= 10; ++i) {
        auto r = gaussian_fact_check(k, M, 0.05 * i);
        EXPECT_TRUE(r.tail_ok) << k << " " << M;
        EXPECT_TRUE(r.smallball_ok) << k << " " << 0.05 * i;
      }
    }
  }
}
