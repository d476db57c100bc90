#pragma once

#include "kat/world.hpp"

#include <random>
#include <stdexcept>
#include <vector>

namespace kat {

class EscapeError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct EscapeSettings {
  int n = 256;
  double mu = 0.86;    // m, mean probe length
  double sigma = 0.29; // m

  void validate() const;
};

struct EscapeDirection {
  Vec3 dir = Vec3::UnitX();
  int support = 0;  // surviving samples
};

/// Length-weighted mean of random directions that agree with d_nar and whose
/// translated pose stays collision-free. Throws EscapeError when no sample
/// survives or the weighted sum vanishes.
EscapeDirection escape_direction(const Configuration& c_nar, const Vec3& d_nar, const Scene& scene,
                                 const RobotBody& robot, const EscapeSettings& settings,
                                 std::mt19937_64& rng);

/// Weighted combination step: sum of lengths[i] * dirs[i] over entries not
/// blocked, normalized. Throws EscapeError as escape_direction() does.
EscapeDirection weighted_escape(const std::vector<Vec3>& dirs, const std::vector<double>& lengths,
                                const std::vector<char>& blocked);

/// Normal draw restricted to positive values (rejection).
double positive_normal(double mu, double sigma, std::mt19937_64& rng);

}  // namespace kat
