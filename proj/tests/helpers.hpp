#pragma once

#include <unistd.h>

#include <filesystem>
#include <string>

#include "degwave/assembly.hpp"
#include "degwave/coefficients.hpp"

namespace testutil {

// a = x^{1/2}, b = 0.1 x, d = x^{1/4}: the running example every module doc
// refers to.  All hypothesis checks pass for small lambda.
inline degwave::CoefficientProfile reference_profile(double lambda = 0.0, double beta = 1.0) {
  return degwave::CoefficientProfile::power_law(0.5, 0.1, 1.0, 0.25, lambda, beta);
}

// mu = 0: eta == 1, sigma = x^alpha.  Every weighted integral has a closed
// form, so these profiles anchor the hand-computed oracles.
inline degwave::CoefficientProfile driftfree_profile(double alpha, double gamma,
                                                     double lambda = 0.0, double beta = 1.0) {
  return degwave::CoefficientProfile::power_law(alpha, 0.0, 1.0, gamma, lambda, beta);
}

struct Assembled {
  degwave::CoefficientProfile profile;
  degwave::WeightPair weights;
  degwave::OperatorMatrices matrices;
};

// q <= 0 means "grade by the profile"
inline Assembled assembled(const degwave::CoefficientProfile& p, int n, double q = 0.0) {
  Assembled out{p, degwave::feller_weight(p), {}};
  const degwave::Mesh mesh = q > 0.0 ? degwave::build_mesh(n, q) : degwave::build_mesh(n, p);
  out.matrices = degwave::assemble(p, out.weights, mesh);
  return out;
}

// unique scratch directory for artifact-producing tests
class TempDir {
public:
  explicit TempDir(const std::string& tag) {
    base_ = std::filesystem::temp_directory_path() /
            ("degwave-test-" + tag + "-" + std::to_string(::getpid()));
    std::filesystem::create_directories(base_);
  }
  ~TempDir() {
    std::error_code ec;
    std::filesystem::remove_all(base_, ec);
  }
  const std::filesystem::path& path() const { return base_; }
  std::string str(const std::string& leaf = "") const {
    return leaf.empty() ? base_.string() : (base_ / leaf).string();
  }

private:
  std::filesystem::path base_;
};

}  // namespace testutil
