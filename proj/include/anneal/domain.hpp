#ifndef ANNEAL_DOMAIN_HPP
#define ANNEAL_DOMAIN_HPP

#include <cstddef>
#include <functional>
#include <stdexcept>
#include <string>
#include <vector>

#include "anneal/rng.hpp"

namespace anneal {

// Thrown when user-supplied criterion code returns a value outside [0, 1].
// Clamping would silently invalidate every downstream guarantee, so the run
// aborts instead.
class CriterionRangeError : public std::runtime_error {
 public:
  explicit CriterionRangeError(const std::string& what) : std::runtime_error(what) {}
};

class Point {
 public:
  explicit Point(std::vector<double> coords);

  std::size_t dim() const { return coords_.size(); }
  double operator[](std::size_t i) const { return coords_[i]; }
  const std::vector<double>& coords() const { return coords_; }

 private:
  std::vector<double> coords_;
};

// Axis-aligned box in R^N with strictly positive, finite volume. Boxes keep
// volume, containment and uniform sampling exact; arbitrary bounded sets are
// out of scope.
class BoundedDomain {
 public:
  BoundedDomain(std::vector<double> lower, std::vector<double> upper);

  std::size_t dim() const { return lower_.size(); }
  double lower(std::size_t i) const { return lower_[i]; }
  double upper(std::size_t i) const { return upper_[i]; }
  double volume() const { return volume_; }

  bool contains(const std::vector<double>& coords) const;
  bool contains(const Point& p) const { return contains(p.coords()); }

  // Validating constructor for points; throws std::invalid_argument when the
  // coordinates fall outside the box.
  Point make_point(std::vector<double> coords) const;

  // Exact uniform draw; consumes one uniform per dimension.
  Point uniform_point(CounterRng& rng) const;

 private:
  std::vector<double> lower_;
  std::vector<double> upper_;
  double volume_;
};

// Criterion evaluated exactly at a point. Every value must lie in [0, 1];
// violations abort with CriterionRangeError. Evaluation must be repeatable
// and side-effect free, so criteria can be shared across concurrent chains.
class DeterministicCriterion {
 public:
  using Fn = std::function<double(const Point&)>;

  explicit DeterministicCriterion(Fn fn, std::string name = "criterion");

  double eval(const Point& p) const;
  const std::string& name() const { return name_; }

 private:
  Fn fn_;
  std::string name_;
};

// Criterion known only through single conditional draws g(x, theta) with
// x ~ p_x(.|theta). Each draw must lie in [0, 1]; the implied criterion value
// is the expectation of a draw. Only the single-draw interface is exposed.
class ExpectedValueCriterion {
 public:
  using SampleFn = std::function<double(const Point&, CounterRng&)>;

  explicit ExpectedValueCriterion(SampleFn fn, std::string name = "criterion");

  double sample(const Point& p, CounterRng& rng) const;
  const std::string& name() const { return name_; }

 private:
  SampleFn fn_;
  std::string name_;
};

// Affine rescaling of a bounded raw criterion onto [0, 1]. Maximizers are
// preserved. The caller asserts raw values stay inside [known_lower,
// known_upper]; violations surface as CriterionRangeError on evaluation.
DeterministicCriterion scale_criterion(std::function<double(const Point&)> raw,
                                       double known_lower, double known_upper,
                                       std::string name = "scaled");

// Monte Carlo mean of n draws; reporting only, never part of a kernel's
// acceptance decision.
double estimate_expected_value(const ExpectedValueCriterion& c, const Point& p,
                               std::size_t n, CounterRng& rng);

}  // namespace anneal

#endif  // ANNEAL_DOMAIN_HPP
