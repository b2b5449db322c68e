#pragma once

#include <string>
#include <vector>

namespace specindex {

struct ResidualItem {
  std::string name;
  double residual = 0.0;
  double tolerance = 0.0;

  bool passed() const { return residual < tolerance; }
};

/// Itemized outcome of an identity sweep. Items keep insertion order so
/// reports serialize deterministically.
struct ResidualReport {
  std::vector<ResidualItem> items;

  void add(std::string name, double residual, double tolerance) {
    items.push_back({std::move(name), residual, tolerance});
  }

  bool all_passed() const {
    for (const auto& item : items) {
      if (!item.passed()) return false;
    }
    return true;
  }

  double worst(const std::string& name) const {
    double w = 0.0;
    for (const auto& item : items) {
      if (item.name == name && item.residual > w) w = item.residual;
    }
    return w;
  }
};

}  // namespace specindex
