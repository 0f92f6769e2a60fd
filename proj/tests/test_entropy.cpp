#include <cmath>

#include "doctest.h"
#include "helpers.hpp"

using namespace liclab;

namespace {

// Sums the discrete masses over integer grid [-half, half] for a single
// channel, accumulating in double.
double logistic_grid_sum(float mu, float log_s, int half) {
  double total = 0.0;
  for (int k = -half; k <= half; ++k) {
    Tensor y = Tensor::from_data({1, 1, 1, 1}, {static_cast<float>(k)});
    FactorizedEntropyParams p{Tensor::from_data({1}, {mu}),
                              Tensor::from_data({1}, {log_s})};
    total += likelihood_factorized(y, p).data()[0];
  }
  return total;
}

double gaussian_grid_sum(float sigma, int half) {
  double total = 0.0;
  for (int k = -half; k <= half; ++k) {
    Tensor y = Tensor::from_data({1}, {static_cast<float>(k)});
    Tensor s = Tensor::from_data({1}, {sigma});
    total += likelihood_gaussian(y, s).data()[0];
  }
  return total;
}

}  // namespace

TEST_CASE("logistic mass at the mode") {
  // CDF(0.5) - CDF(-0.5) for unit-scale logistic = 2/(1+e^-0.5) - 1
  Tensor y = Tensor::from_data({1, 1, 1, 1}, {0.0f});
  FactorizedEntropyParams p{Tensor::from_data({1}, {0.0f}),
                            Tensor::from_data({1}, {0.0f})};
  const double expect = 2.0 / (1.0 + std::exp(-0.5)) - 1.0;
  CHECK(likelihood_factorized(y, p).data()[0] ==
        doctest::Approx(expect).epsilon(1e-5));
  CHECK(expect == doctest::Approx(0.2449).epsilon(1e-3));
}

TEST_CASE("logistic tail hits the likelihood floor") {
  Tensor y = Tensor::from_data({1, 1, 1, 1}, {1e6f});
  FactorizedEntropyParams p{Tensor::from_data({1}, {0.0f}),
                            Tensor::from_data({1}, {0.0f})};
  CHECK(likelihood_factorized(y, p).data()[0] == kLikelihoodFloor);
}

TEST_CASE("logistic masses sum to one over the integer grid") {
  CHECK(logistic_grid_sum(0.0f, 0.0f, 20) == doctest::Approx(1.0).epsilon(1e-6));
  Rng rng(42);
  for (int i = 0; i < 10; ++i) {
    const float mu = rng.uniform(-3.0f, 3.0f);
    const float log_s = rng.uniform(-1.5f, 1.0f);
    CAPTURE(mu);
    CAPTURE(log_s);
    CHECK(std::fabs(logistic_grid_sum(mu, log_s, 40) - 1.0) < 1e-5);
  }
}

TEST_CASE("gaussian mass at zero") {
  Tensor y = Tensor::from_data({1}, {0.0f});
  Tensor s = Tensor::from_data({1}, {1.0f});
  CHECK(likelihood_gaussian(y, s).data()[0] ==
        doctest::Approx(0.3829).epsilon(1e-3));
}

TEST_CASE("gaussian sigma clamps at sigma_min") {
  Tensor y = Tensor::from_data({1}, {0.0f});
  Tensor tiny = Tensor::from_data({1}, {1e-6f});
  Tensor at_min = Tensor::from_data({1}, {0.11f});
  CHECK(likelihood_gaussian(y, tiny).data()[0] ==
        likelihood_gaussian(y, at_min).data()[0]);
}

TEST_CASE("negative sigma is an error") {
  Tensor y = Tensor::from_data({1}, {0.0f});
  Tensor s = Tensor::from_data({1}, {-0.5f});
  CHECK_THROWS_AS((void)likelihood_gaussian(y, s), Error);
}

TEST_CASE("gaussian masses sum to one over the integer grid") {
  CHECK(std::fabs(gaussian_grid_sum(2.0f, 30) - 1.0) < 1e-6);
  Rng rng(43);
  for (int i = 0; i < 10; ++i) {
    const float sigma = rng.uniform(0.05f, 4.0f);
    CAPTURE(sigma);
    CHECK(std::fabs(gaussian_grid_sum(sigma, 40) - 1.0) < 1e-5);
  }
}

TEST_CASE("mode holds the maximum mass") {
  FactorizedEntropyParams p{Tensor::from_data({1}, {1.4f}),
                            Tensor::from_data({1}, {-0.3f})};
  double best = -1.0;
  int best_k = -100;
  for (int k = -10; k <= 10; ++k) {
    Tensor y = Tensor::from_data({1, 1, 1, 1}, {static_cast<float>(k)});
    const double m = likelihood_factorized(y, p).data()[0];
    if (m > best) {
      best = m;
      best_k = k;
    }
  }
  CHECK(best_k == 1);  // nearest integer to mu = 1.4
}

TEST_CASE("bpp arithmetic") {
  // 4096 symbols at p=0.5 over a 64x64 image: one bit per pixel
  Tensor p_half = Tensor::full({4096}, 0.5f);
  CHECK(bpp_from_likelihoods({p_half}, 64 * 64).item() ==
        doctest::Approx(1.0).epsilon(1e-6));

  Tensor certain = Tensor::full({128}, 1.0f);
  CHECK(bpp_from_likelihoods({certain}, 64 * 64).item() ==
        doctest::Approx(0.0));

  Tensor y = Tensor::full({1024}, 0.25f);
  Tensor z = Tensor::full({64}, 0.5f);
  CHECK(bpp_from_likelihoods({y, z}, 4096).item() ==
        doctest::Approx(0.515625).epsilon(1e-6));
}

TEST_CASE("bpp input validation") {
  Tensor p = Tensor::full({8}, 0.5f);
  CHECK_THROWS_AS((void)bpp_from_likelihoods({p}, 0), Error);
  CHECK_THROWS_AS((void)bpp_from_likelihoods({}, 64), Error);
}

TEST_CASE("entropy parameters carry analytic gradients") {
  Rng rng(77);
  Tensor y = testutil::random_tensor({1, 2, 3, 3}, rng, -3.0f, 3.0f);
  // keep y away from half-integers so finite differences see a smooth mass
  for (auto& v : y.data()) v = std::round(v) + 0.2f;

  Tensor mu0 = testutil::random_tensor({2}, rng, -0.5f, 0.5f);
  Tensor ls0 = testutil::random_tensor({2}, rng, -0.5f, 0.5f);
  auto f_mu = [&](const Tensor& m) {
    return sum(liclab::log(logistic_mass(y, m, ls0)));
  };
  CHECK(finite_difference_check(f_mu, mu0, 1e-3).max_rel_error <= 1e-3f);
  auto f_ls = [&](const Tensor& ls) {
    return sum(liclab::log(logistic_mass(y, mu0, ls)));
  };
  CHECK(finite_difference_check(f_ls, mu0, 1e-3).max_rel_error <= 1e-3f);
  auto f_y = [&](const Tensor& t) {
    return sum(liclab::log(logistic_mass(t, mu0, ls0)));
  };
  CHECK(finite_difference_check(f_y, y, 1e-3).max_rel_error <= 1e-3f);

  // sigma well below |y| keeps d(mass)/d(sigma) away from its stationary
  // point, where a relative finite-difference comparison is meaningless
  Tensor sig = testutil::random_tensor({2, 5}, rng, 0.3f, 0.7f);
  Tensor yg = testutil::random_tensor({2, 5}, rng, 1.2f, 2.5f);
  auto f_sig = [&](const Tensor& s) {
    return sum(liclab::log(gaussian_mass(yg, s, 0.11f)));
  };
  CHECK(finite_difference_check(f_sig, sig, 1e-3).max_rel_error <= 1e-3f);
  auto f_yg = [&](const Tensor& t) {
    return sum(liclab::log(gaussian_mass(t, sig, 0.11f)));
  };
  CHECK(finite_difference_check(f_yg, yg, 1e-3).max_rel_error <= 1e-3f);
}
