#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "rsb/sampler.hpp"

namespace rsb {

// Dense row-major k x m matrix.
struct Matrix {
    int rows = 0;
    int cols = 0;
    std::vector<double> data;

    Matrix() = default;
    Matrix(int r, int c, double fill = 0.0) : rows(r), cols(c), data(static_cast<std::size_t>(r) * c, fill) {}
    double& operator()(int i, int j) { return data[static_cast<std::size_t>(i) * cols + j]; }
    double operator()(int i, int j) const { return data[static_cast<std::size_t>(i) * cols + j]; }
};

enum class MeansConfig { sc, mdm, mixed };
enum class VarianceConfig { ev, iv, dv };

MeansConfig means_config_from_name(const std::string& s);
VarianceConfig variance_config_from_name(const std::string& s);
const char* means_config_name(MeansConfig c);
const char* variance_config_name(VarianceConfig c);

// Slippage: first row 0, other rows 0.5.
Matrix sc_means(int k, int m);
// 0.5(i-1) - 0.2(j-1), 1-based.
Matrix mdm_means(int k, int m);
// Column 1 as MDM; columns >= 2 sit 0.2 below column 1.
Matrix mixed_means(int k, int m);
Matrix variance_config(VarianceConfig kind, int k, int m);

struct MeanVarianceConfig {
    Matrix means;
    Matrix variances;
    std::string means_label;
    std::string vars_label;
};

// Builds and checks the ordering assumption: rows non-increasing in j and the
// first column uniquely minimized at row 1.
MeanVarianceConfig make_config(MeansConfig mc, VarianceConfig vc, int k, int m);
void check_ordering(const Matrix& means);

// Row maxima (worst-case means) and the alternatives within delta of the best.
std::vector<double> worst_case_means(const Matrix& means);
std::vector<char> good_set_from_means(const std::vector<double>& worst, double delta);

// Independent normal outputs N(mu_ij, sigma2_ij). Replication r of system
// (i,j) is the inverse normal CDF of a Philox uniform at counter r on stream
// i*m+j (stream i under common random numbers). Safe for concurrent draws.
class NormalBenchSampler final : public Sampler {
public:
    NormalBenchSampler(MeanVarianceConfig config, std::uint64_t seed, bool crn = false);

    int alternatives() const override { return config_.means.rows; }
    int scenarios() const override { return config_.means.cols; }
    void draw(std::uint64_t rep, std::span<const SystemId> systems, std::span<double> out) override;

    const MeanVarianceConfig& config() const { return config_; }

private:
    MeanVarianceConfig config_;
    std::vector<double> sd_;
    std::uint64_t seed_;
    bool crn_;
};

}  // namespace rsb
