#include "rsb/system_table.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "rsb/errors.hpp"

namespace rsb {

SystemTable::SystemTable(int size, bool retain_raw)
    : size_(size),
      retain_raw_(retain_raw),
      count_(size, 0),
      cross_count_(size, 0),
      shift_(size, 0.0),
      sum_(size, 0.0),
      raw_(retain_raw ? size : 0) {
    if (size < 1) throw ConfigError("SystemTable: size must be >= 1");
    const auto s = static_cast<std::size_t>(size);
    if (s * (s + 1) / 2 > (std::size_t{1} << 31))
        throw ResourceError("SystemTable: too many systems for pairwise statistics");
    cross_.assign(s * (s + 1) / 2, 0.0);
}

std::size_t SystemTable::tri(int a, int b) const {
    const auto sa = static_cast<std::size_t>(a), s = static_cast<std::size_t>(size_);
    return sa * (2 * s - sa + 1) / 2 + static_cast<std::size_t>(b - a);
}

void SystemTable::append(std::span<const int> systems, std::span<const double> values, bool with_cross) {
    if (values.size() < systems.size()) throw DomainError("SystemTable::append: too few values");
    scratch_.resize(systems.size());
    for (std::size_t p = 0; p < systems.size(); ++p) {
        const int q = systems[p];
        const double x = values[p];
        if (!std::isfinite(x)) throw DataError("non-finite sample for system " + std::to_string(q));
        if (count_[q] == 0) shift_[q] = x;
        const double d = x - shift_[q];
        scratch_[p] = d;
        sum_[q] += d;
        ++count_[q];
        if (retain_raw_) raw_[q].push_back(x);
    }
    if (!with_cross) return;
    for (std::size_t p = 0; p < systems.size(); ++p) {
        const int a = systems[p];
        if (p > 0 && systems[p - 1] >= a) throw DomainError("SystemTable::append: systems must be increasing");
        ++cross_count_[a];
        double* row = cross_.data() + tri(a, a) - a;  // row[b] is the (a,b) entry for b >= a
        const double da = scratch_[p];
        for (std::size_t r = p; r < systems.size(); ++r) row[systems[r]] += da * scratch_[r];
    }
}

double SystemTable::mean(int q) const {
    if (count_[q] == 0) throw DegenerateSampleError("SystemTable::mean: no observations");
    return shift_[q] + sum_[q] / static_cast<double>(count_[q]);
}

double SystemTable::mean_diff(int a, int b) const {
    if (count_[a] == 0 || count_[b] == 0) throw DegenerateSampleError("SystemTable::mean_diff: no observations");
    if (count_[a] == count_[b]) {
        return (shift_[a] - shift_[b]) + (sum_[a] - sum_[b]) / static_cast<double>(count_[a]);
    }
    return (shift_[a] - shift_[b]) + (sum_[a] / static_cast<double>(count_[a]) - sum_[b] / static_cast<double>(count_[b]));
}

double SystemTable::diff_variance(int a, int b) const {
    const std::uint64_t n = count_[a];
    if (count_[b] != n) throw DomainError("SystemTable::diff_variance: systems have different counts");
    if (cross_count_[a] != n || cross_count_[b] != n)
        throw DomainError("SystemTable::diff_variance: cross-products not maintained for this pair");
    if (n < 2) throw DegenerateSampleError("SystemTable::diff_variance: n < 2");
    if (a == b) return 0.0;
    const int lo = std::min(a, b), hi = std::max(a, b);
    const double qaa = cross_[tri(a, a)], qbb = cross_[tri(b, b)], qab = cross_[tri(lo, hi)];
    const double ds = sum_[a] - sum_[b];
    const double nn = static_cast<double>(n);
    const double ss = qaa + qbb - 2.0 * qab - ds * ds / nn;
    return std::max(0.0, ss / (nn - 1.0));
}

}  // namespace rsb
