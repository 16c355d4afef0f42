#pragma once

#include <string>
#include <utility>
#include <vector>

namespace qattract {

/// Outcome of a sampled verification.
struct Report {
  std::string check;
  bool pass = false;
  double worst_margin = 0.0;  // smallest sampled margin; negative means violated
  long samples = 0;
  long violations = 0;
  long excluded = 0;
  std::string note;
  std::vector<std::pair<std::string, double>> params;

  void param(std::string key, double value) { params.emplace_back(std::move(key), value); }
};

}  // namespace qattract
