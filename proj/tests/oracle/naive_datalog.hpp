#pragma once

#include <map>
#include <random>
#include <set>
#include <string>
#include <vector>

#include "ethoscan/rules.hpp"

// Reference evaluator used only by tests. It recomputes strata on its own,
// re-runs every rule of a stratum until nothing changes, and joins bodies by
// plain nested loops, so it shares no code path with the production engine.
namespace oracle {

using Relations = std::map<std::string, std::set<ethoscan::rules::Tuple>>;

Relations naive_evaluate(const std::vector<ethoscan::rules::Rule>& rules,
                         const ethoscan::rules::Database& base);

/// Drops empty relations so results from both evaluators compare directly.
Relations normalized(const std::map<std::string, std::set<ethoscan::rules::Tuple>>& r);

struct RandomProgram {
  std::vector<ethoscan::rules::Rule> rules;
  ethoscan::rules::Database base;
  size_t facts = 0;
};

/// Stratified program with at most `max_rules` rules over at most `max_facts`
/// base facts; uses positive recursion, negation and comparison builtins.
RandomProgram random_program(std::mt19937_64& rng, size_t max_rules = 8, size_t max_facts = 30);

}  // namespace oracle
