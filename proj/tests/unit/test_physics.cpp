#include <cmath>
#include <stdexcept>
#include <vector>

#include "atomcount/physics.hpp"
#include "doctest.h"

using namespace atomcount;

namespace {

// brute-force normalization oracle, independent of the log-space code path
std::vector<double> steady_state_direct(double y, int n) {
  std::vector<double> w(static_cast<std::size_t>(n) + 1);
  double fact = 1.0;
  for (int k = 0; k <= n; ++k) {
    if (k > 0) fact *= k;
    w[static_cast<std::size_t>(k)] = fact * fact * std::pow(y, k);
  }
  double s = 0.0;
  for (double x : w) s += x;
  for (double& x : w) x /= s;
  return w;
}

}  // namespace

TEST_CASE("coupling profile") {
  CavityParams p;

  // antinode, on axis: full g0
  CHECK(coupling_at(p, 0.0, p.lambda0 / 4.0) == doctest::Approx(24e6).epsilon(1e-12));
  // node
  CHECK(coupling_at(p, 0.0, 0.0) == doctest::Approx(0.0).epsilon(1e-9));
  // one waist off axis: g0 e^-2
  CHECK(coupling_at(p, p.w0, p.lambda0 / 4.0) ==
        doctest::Approx(3248046.797678705).epsilon(1e-12));
  // transition strength factor scales linearly
  CHECK(coupling_at(p, 0.0, p.lambda0 / 4.0, 0.5) ==
        doctest::Approx(12e6).epsilon(1e-12));

  // periodic in z, even in rho, never exceeds g0 |G|
  for (int i = 0; i < 40; ++i) {
    double z = -2.1e-6 + 1.07e-7 * i;
    double rho = 3.3e-6 * (i % 7);
    double g = coupling_at(p, rho, z);
    CHECK(coupling_at(p, rho, z + p.lambda0) == doctest::Approx(g).epsilon(1e-9));
    CHECK(coupling_at(p, -rho, z) == doctest::Approx(g).epsilon(1e-12));
    CHECK(std::abs(g) <= p.g0 * (1.0 + 1e-12));
  }
}

TEST_CASE("cooperativity and suppression") {
  CavityParams p;
  CHECK(cooperativity(p, p.g0) == doctest::Approx(26.37362637362637).epsilon(1e-12));
  CHECK(suppression_factor(p) == doctest::Approx(2782.2726723825613).epsilon(1e-12));
  // suppression grows with the square of the cooperativity
  CHECK(cooperativity(p, 0.5 * p.g0) ==
        doctest::Approx(0.25 * 26.37362637362637).epsilon(1e-12));
}

TEST_CASE("critical photon and atom numbers") {
  CavityParams p;
  auto [n0, N0] = critical_numbers(p);
  CHECK(n0 == doctest::Approx(0.005868055555555556).epsilon(1e-12));
  CHECK(N0 == doctest::Approx(0.037916666666666675).epsilon(1e-12));
  // two significant figures against the quoted working values
  CHECK(std::abs(n0 - 0.0057) / 0.0057 < 0.05);
  CHECK(std::abs(N0 - 0.037) / 0.037 < 0.05);
  CHECK(n0 < 1.0);
  CHECK(N0 < 1.0);
  CHECK(p.strong_coupling());
}

TEST_CASE("intensity hierarchy") {
  double i1 = 1.0 / 2782.2726723825613;
  CHECK(intensity_level(0, i1) == 1.0);
  CHECK(intensity_level(1, i1) == doctest::Approx(3.5941840277777795e-4).epsilon(1e-12));
  CHECK(std::abs(intensity_level(1, i1) - 3.6e-4) / 3.6e-4 < 0.05);
  CHECK(intensity_level(2, i1) == doctest::Approx(i1 / 4.0).epsilon(1e-12));
  CHECK(intensity_level(3, i1) == doctest::Approx(i1 / 9.0).epsilon(1e-12));
  CHECK_THROWS_AS(intensity_level(-1, i1), std::invalid_argument);
  CHECK_THROWS_AS(intensity_level(1, -0.1), std::invalid_argument);
}

TEST_CASE("steady state closed form") {
  ManifoldModel m{0.5, 20};
  auto p1 = steady_state_distribution(m, 1);
  CHECK(p1[0] == doctest::Approx(2.0 / 3.0).epsilon(1e-12));
  CHECK(p1[1] == doctest::Approx(1.0 / 3.0).epsilon(1e-12));

  auto p2 = steady_state_distribution(m, 2);
  CHECK(p2[0] == doctest::Approx(0.4).epsilon(1e-12));
  CHECK(p2[1] == doctest::Approx(0.2).epsilon(1e-12));
  CHECK(p2[2] == doctest::Approx(0.4).epsilon(1e-12));

  CHECK(plateau_prediction(m, 3) == doctest::Approx(1.0 / 7.0).epsilon(1e-12));

  // empty manifold is a point mass
  auto p0 = steady_state_distribution(m, 0);
  CHECK(p0.size() == 1);
  CHECK(p0[0] == doctest::Approx(1.0).epsilon(1e-15));

  ManifoldModel weak{0.1, 20};
  CHECK(plateau_prediction(weak, 6) == doctest::Approx(0.5274261603375526).epsilon(1e-12));
}

TEST_CASE("steady state properties") {
  for (double y : {0.1, 0.5, 1.0, 2.0}) {
    ManifoldModel m{y, 20};
    double prev_p0 = 2.0;
    for (int n = 0; n <= 20; ++n) {
      auto p = steady_state_distribution(m, n);
      CHECK(p.size() == static_cast<std::size_t>(n) + 1);
      double sum = 0.0;
      for (double x : p) {
        CHECK(x >= 0.0);
        sum += x;
      }
      CHECK(sum == doctest::Approx(1.0).epsilon(1e-12));

      // matches the direct normalization oracle
      auto ref = steady_state_direct(y, n);
      for (int k = 0; k <= n; ++k)
        CHECK(p[static_cast<std::size_t>(k)] ==
              doctest::Approx(ref[static_cast<std::size_t>(k)]).epsilon(1e-10));

      // plateau heights fall as atoms are added
      CHECK(p[0] < prev_p0);
      prev_p0 = p[0];

      // detailed balance: p_{k-1} gamma_01 = p_k gamma_10 / k^2
      for (int k = 1; k <= n; ++k) {
        double lhs = p[static_cast<std::size_t>(k - 1)] * y;
        double rhs = p[static_cast<std::size_t>(k)] / (static_cast<double>(k) * k);
        CHECK(lhs == doctest::Approx(rhs).epsilon(1e-10));
      }
    }
  }
}

TEST_CASE("parameter validation") {
  CavityParams p;
  p.g0 = -1.0;
  CHECK_THROWS_AS(p.validate(), std::invalid_argument);

  ManifoldModel m{0.5, 20};
  CHECK_THROWS_AS(steady_state_distribution(m, -1), std::invalid_argument);
  CHECK_THROWS_AS(steady_state_distribution(m, 21), std::invalid_argument);
  ManifoldModel bad{-0.5, 20};
  CHECK_THROWS_AS(bad.validate(), std::invalid_argument);
}
