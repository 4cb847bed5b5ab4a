#pragma once

#include <string>
#include <vector>

namespace evopref {

// A point in [0,1]^m objective space (maximization everywhere).
using ObjectiveVector = std::vector<double>;

bool in_unit_range(const ObjectiveVector& f);

// Weighted sum with the default scalarization weights when none given.
double weighted_sum(const ObjectiveVector& f, const std::vector<double>& w);

std::string to_string(const ObjectiveVector& f);

}  // namespace evopref
