#pragma once

#include <algorithm>
#include <string>
#include <utility>
#include <vector>

namespace tropmoduli {

struct Violation {
  std::string rule;    // e.g. "AXIOM(5)", "BALANCING", "FAMILY(2)"
  std::string where;   // object the rule failed on
  std::string detail;  // witness
};

struct ValidationReport {
  std::vector<Violation> violations;

  bool ok() const { return violations.empty(); }

  void add(std::string rule, std::string where, std::string detail) {
    violations.push_back({std::move(rule), std::move(where), std::move(detail)});
  }

  void merge(const ValidationReport& other, const std::string& prefix = {}) {
    for (const auto& v : other.violations) violations.push_back({prefix + v.rule, v.where, v.detail});
  }

  bool has(const std::string& rule) const {
    return std::any_of(violations.begin(), violations.end(), [&](const Violation& v) { return v.rule == rule; });
  }

  std::size_t count(const std::string& rule) const {
    return static_cast<std::size_t>(
        std::count_if(violations.begin(), violations.end(), [&](const Violation& v) { return v.rule == rule; }));
  }
};

}  // namespace tropmoduli
