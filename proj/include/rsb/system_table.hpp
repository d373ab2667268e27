#pragma once

#include <cstdint>
#include <span>
#include <vector>

namespace rsb {

// Running statistics for a set of systems observed on common replication
// indices. Each system stores its first observation as a shift; sums and
// cross-products are kept on shifted values, so differences of means and
// paired variances are unaffected by a common offset (exactly, when the data
// and offset are dyadic).
//
// Cross-products are accumulated only between systems appended in the same
// call. Paired variance queries require both systems to share a count, which
// holds for systems that have survived together.
class SystemTable {
public:
    explicit SystemTable(int size, bool retain_raw = false);

    int size() const { return size_; }

    // One replication for each listed system. If `with_cross` is false only the
    // per-system sums are updated (later variance queries on these systems
    // throw).
    void append(std::span<const int> systems, std::span<const double> values, bool with_cross = true);

    std::uint64_t count(int q) const { return count_[q]; }
    double mean(int q) const;
    // mean(a) - mean(b), computed as (shift_a - shift_b) + (sum_a - sum_b)/n.
    double mean_diff(int a, int b) const;
    // Variance of X_a - X_b over the shared replications; clamped at >= 0.
    double diff_variance(int a, int b) const;

    bool retains_raw() const { return retain_raw_; }
    const std::vector<double>& raw(int q) const { return raw_[q]; }

private:
    std::size_t tri(int a, int b) const;  // a <= b

    int size_;
    bool retain_raw_;
    std::vector<std::uint64_t> count_;
    std::vector<std::uint64_t> cross_count_;  // replications with cross-products, per system
    std::vector<double> shift_;
    std::vector<double> sum_;
    std::vector<double> cross_;  // packed upper triangle including diagonal
    std::vector<std::vector<double>> raw_;
    std::vector<double> scratch_;
};

}  // namespace rsb
