#include "kat/escape.hpp"

#include "kat/batch.hpp"

#include <cmath>
#include <vector>

namespace kat {

void EscapeSettings::validate() const {
  if (n < 8) throw std::invalid_argument("escape sample count must be at least 8");
  if (!(mu > 0.0)) throw std::invalid_argument("escape mu must be positive");
  if (!(sigma >= 0.0)) throw std::invalid_argument("escape sigma must be non-negative");
}

double positive_normal(double mu, double sigma, std::mt19937_64& rng) {
  if (sigma == 0.0) return mu;
  std::normal_distribution<double> normal(mu, sigma);
  for (;;) {
    const double t = normal(rng);
    if (t > 0.0) return t;
  }
}

EscapeDirection escape_direction(const Configuration& c_nar, const Vec3& d_nar, const Scene& scene,
                                 const RobotBody& robot, const EscapeSettings& settings,
                                 std::mt19937_64& rng) {
  settings.validate();
  std::vector<Vec3> dirs;
  std::vector<double> lengths;
  std::vector<Configuration> moved;
  for (int i = 0; i < settings.n; ++i) {
    const Vec3 d = random_unit_vector(rng);
    if (d.dot(d_nar) <= 0.0) continue;
    const double t = positive_normal(settings.mu, settings.sigma, rng);
    dirs.push_back(d);
    lengths.push_back(t);
    moved.push_back(c_nar.translated(t * d));
  }
  return weighted_escape(dirs, lengths, collision_flags(moved, scene, robot));
}

EscapeDirection weighted_escape(const std::vector<Vec3>& dirs, const std::vector<double>& lengths,
                                const std::vector<char>& blocked) {
  if (dirs.size() != lengths.size() || dirs.size() != blocked.size()) {
    throw std::invalid_argument("weighted_escape: size mismatch");
  }
  EscapeDirection out;
  Vec3 sum = Vec3::Zero();
  for (std::size_t i = 0; i < dirs.size(); ++i) {
    if (blocked[i]) continue;
    sum += lengths[i] * dirs[i];
    ++out.support;
  }
  if (out.support == 0) throw EscapeError("escape_direction: every sampled direction is blocked");
  const double norm = sum.norm();
  if (!(norm > 1e-12)) throw EscapeError("escape_direction: weighted direction sum vanishes");
  out.dir = sum / norm;
  return out;
}

}  // namespace kat
