#include "evopref/types.hpp"

#include <cstdio>
#include <stdexcept>

namespace evopref {

bool in_unit_range(const ObjectiveVector& f) {
    for (double x : f)
        if (!(x >= 0.0 && x <= 1.0))
            return false;
    return true;
}

double weighted_sum(const ObjectiveVector& f, const std::vector<double>& w) {
    if (f.size() != w.size())
        throw std::invalid_argument("weights and objectives differ in length");
    double s = 0.0;
    for (std::size_t j = 0; j < f.size(); ++j)
        s += w[j] * f[j];
    return s;
}

std::string to_string(const ObjectiveVector& f) {
    std::string out = "(";
    char buf[32];
    for (std::size_t j = 0; j < f.size(); ++j) {
        std::snprintf(buf, sizeof(buf), "%.4f", f[j]);
        out += buf;
        if (j + 1 < f.size())
            out += ", ";
    }
    out += ")";
    return out;
}

}  // namespace evopref
