#ifndef ANNEAL_REGISTRY_HPP
#define ANNEAL_REGISTRY_HPP

#include <optional>
#include <string>
#include <vector>

#include "anneal/domain.hpp"

namespace anneal {

// Named test function with a documented closed form and known maximizer set.
// Entries carrying a conditional sampler are driven by the stored-product
// kernel; their exact criterion stays available as ground truth for oracles
// and reporting.
struct RegistryEntry {
  std::string name;
  std::string description;
  BoundedDomain domain;
  DeterministicCriterion criterion;
  std::optional<ExpectedValueCriterion> sampler;
  double max_value;
  std::vector<std::vector<double>> maximizers;  // representative points
};

const RegistryEntry& find_function(const std::string& name);  // throws on unknown names
std::vector<std::string> function_names();

}  // namespace anneal

#endif  // ANNEAL_REGISTRY_HPP
