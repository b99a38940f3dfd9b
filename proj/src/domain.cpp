#include "anneal/domain.hpp"

#include <cmath>
#include <sstream>
#include <utility>

namespace anneal {

Point::Point(std::vector<double> coords) : coords_(std::move(coords)) {
  if (coords_.empty()) throw std::invalid_argument("Point: dimension must be >= 1");
}

BoundedDomain::BoundedDomain(std::vector<double> lower, std::vector<double> upper)
    : lower_(std::move(lower)), upper_(std::move(upper)) {
  if (lower_.empty() || lower_.size() != upper_.size())
    throw std::invalid_argument("BoundedDomain: bounds must be non-empty and of equal length");
  volume_ = 1.0;
  for (std::size_t i = 0; i < lower_.size(); ++i) {
    if (!std::isfinite(lower_[i]) || !std::isfinite(upper_[i]))
      throw std::invalid_argument("BoundedDomain: bounds must be finite");
    if (!(lower_[i] < upper_[i]))
      throw std::invalid_argument("BoundedDomain: lower[i] < upper[i] required for every axis");
    volume_ *= upper_[i] - lower_[i];
  }
  if (!(volume_ > 0.0) || !std::isfinite(volume_))
    throw std::invalid_argument("BoundedDomain: volume must be finite and positive");
}

bool BoundedDomain::contains(const std::vector<double>& coords) const {
  if (coords.size() != lower_.size()) return false;
  for (std::size_t i = 0; i < coords.size(); ++i) {
    if (!(coords[i] >= lower_[i] && coords[i] <= upper_[i])) return false;
  }
  return true;
}

Point BoundedDomain::make_point(std::vector<double> coords) const {
  if (!contains(coords)) throw std::invalid_argument("make_point: coordinates outside the domain");
  return Point(std::move(coords));
}

Point BoundedDomain::uniform_point(CounterRng& rng) const {
  std::vector<double> c(dim());
  for (std::size_t i = 0; i < dim(); ++i) c[i] = rng.uniform(lower_[i], upper_[i]);
  return Point(std::move(c));
}

namespace {

double checked_unit_value(double v, const std::string& name, const char* what) {
  if (!(v >= 0.0 && v <= 1.0)) {
    std::ostringstream os;
    os << name << ": " << what << " " << v << " outside [0, 1]; aborting (values are never clamped)";
    throw CriterionRangeError(os.str());
  }
  return v;
}

}  // namespace

DeterministicCriterion::DeterministicCriterion(Fn fn, std::string name)
    : fn_(std::move(fn)), name_(std::move(name)) {
  if (!fn_) throw std::invalid_argument("DeterministicCriterion: null function");
}

double DeterministicCriterion::eval(const Point& p) const {
  return checked_unit_value(fn_(p), name_, "criterion value");
}

ExpectedValueCriterion::ExpectedValueCriterion(SampleFn fn, std::string name)
    : fn_(std::move(fn)), name_(std::move(name)) {
  if (!fn_) throw std::invalid_argument("ExpectedValueCriterion: null sampler");
}

double ExpectedValueCriterion::sample(const Point& p, CounterRng& rng) const {
  return checked_unit_value(fn_(p, rng), name_, "conditional draw");
}

DeterministicCriterion scale_criterion(std::function<double(const Point&)> raw,
                                       double known_lower, double known_upper,
                                       std::string name) {
  if (!(known_lower < known_upper))
    throw std::invalid_argument("scale_criterion: known_lower < known_upper required");
  const double span = known_upper - known_lower;
  return DeterministicCriterion(
      [raw = std::move(raw), known_lower, span](const Point& p) {
        return (raw(p) - known_lower) / span;
      },
      std::move(name));
}

double estimate_expected_value(const ExpectedValueCriterion& c, const Point& p,
                               std::size_t n, CounterRng& rng) {
  if (n == 0) throw std::invalid_argument("estimate_expected_value: n >= 1 required");
  double sum = 0.0;
  for (std::size_t i = 0; i < n; ++i) sum += c.sample(p, rng);
  return sum / static_cast<double>(n);
}

}  // namespace anneal
