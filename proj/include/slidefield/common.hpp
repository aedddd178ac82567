#pragma once

#include <cstdint>
#include <functional>
#include <stdexcept>
#include <string>

#include <Eigen/Dense>

namespace slidefield {

using Vec = Eigen::VectorXd;
using Mat = Eigen::MatrixXd;

/// Autonomous vector field on R^n.
using VectorField = std::function<Vec(const Vec&)>;

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Argument outside the domain of a law or off the surface.
class DomainError : public Error {
 public:
  using Error::Error;
};

/// Malformed configuration or command-line input.
class ConfigError : public Error {
 public:
  using Error::Error;
};

/// Splits x = (x~, x_n) and returns x~.
inline Vec tangential_part(const Vec& x) { return x.head(x.size() - 1); }

/// Joins x~ and x_n.
inline Vec join(const Vec& head, double last) {
  Vec out(head.size() + 1);
  out.head(head.size()) = head;
  out(head.size()) = last;
  return out;
}

/// |lhs - rhs| / max(1, |lhs|, |rhs|)
inline double relative_violation(const Vec& lhs, const Vec& rhs) {
  const double scale = std::max({1.0, lhs.norm(), rhs.norm()});
  return (lhs - rhs).norm() / scale;
}

}  // namespace slidefield
