#pragma once

#include <stdexcept>
#include <string>

#include <Eigen/Dense>

namespace ctr {

using Eigen::MatrixXd;
using Eigen::Vector2d;
using Eigen::VectorXd;

// Domain error with a machine-readable kind, e.g. "infeasible-start",
// "numerical-failure", "degenerate-region", "plant-diverged".
class Error : public std::runtime_error {
 public:
  Error(std::string kind, const std::string& what)
      : std::runtime_error(kind + ": " + what), kind_(std::move(kind)) {}
  const std::string& kind() const { return kind_; }

 private:
  std::string kind_;
};

inline Vector2d perp(const Vector2d& v) { return Vector2d(-v.y(), v.x()); }

}  // namespace ctr
