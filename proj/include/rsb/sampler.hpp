#pragma once

#include <cstdint>
#include <functional>
#include <memory>
#include <span>
#include <string>
#include <vector>

namespace rsb {

// System (i,j): alternative i under scenario j. Indices are 0-based.
struct SystemId {
    int alt = 0;
    int scen = 0;
    friend bool operator==(const SystemId&, const SystemId&) = default;
};

// Source of simulation outputs for a k x m grid of systems.
//
// Contract: draw() is random-access in the replication index. Asking twice for
// replication r of system (i,j) yields the same value, whatever else was asked
// for in between. Different replications are independent. Procedures rely on
// this to replay earlier replications and to keep per-system streams unaffected
// by eliminations.
//
// Unless an implementation says otherwise, one instance must not be used from
// several threads at once.
class Sampler {
public:
    virtual ~Sampler() = default;

    virtual int alternatives() const = 0;
    virtual int scenarios() const = 0;

    // out[q] <- replication `rep` of systems[q].
    virtual void draw(std::uint64_t rep, std::span<const SystemId> systems, std::span<double> out) = 0;

    int systems() const { return alternatives() * scenarios(); }
    int flat(SystemId id) const { return id.alt * scenarios() + id.scen; }
};

// Pre-recorded outputs: data[i*m + j][r]. Asking past the recorded length
// throws DataError. Safe for concurrent draws.
class RecordedSampler final : public Sampler {
public:
    RecordedSampler(int k, int m, std::vector<std::vector<double>> data);

    int alternatives() const override { return k_; }
    int scenarios() const override { return m_; }
    void draw(std::uint64_t rep, std::span<const SystemId> systems, std::span<double> out) override;

    std::size_t recorded_length() const;
    const std::vector<double>& series(SystemId id) const { return data_[flat(id)]; }

private:
    int k_, m_;
    std::vector<std::vector<double>> data_;
};

// Bootstrap from a fixed pool per system; replication r of system q picks
// pool index floor(u * size) with u a counter-based uniform keyed by (seed, q, r).
// The true mean of system q is exactly the pool average. Safe for concurrent draws.
class ResamplingSampler final : public Sampler {
public:
    ResamplingSampler(int k, int m, std::shared_ptr<const std::vector<std::vector<double>>> pools,
                      std::uint64_t seed);

    int alternatives() const override { return k_; }
    int scenarios() const override { return m_; }
    void draw(std::uint64_t rep, std::span<const SystemId> systems, std::span<double> out) override;

    double pool_mean(SystemId id) const;

private:
    int k_, m_;
    std::shared_ptr<const std::vector<std::vector<double>>> pools_;
    std::uint64_t seed_;
};

// Adapts a per-system generator fn(rep, id). The function must itself honour the
// random-access contract.
class FunctionSampler final : public Sampler {
public:
    using Fn = std::function<double(std::uint64_t rep, SystemId id)>;

    FunctionSampler(int k, int m, Fn fn) : k_(k), m_(m), fn_(std::move(fn)) {}

    int alternatives() const override { return k_; }
    int scenarios() const override { return m_; }
    void draw(std::uint64_t rep, std::span<const SystemId> systems, std::span<double> out) override;

private:
    int k_, m_;
    Fn fn_;
};

// Drives an external simulator over pipes. For each replication the tool
// writes the replication index (0-based) and a newline to the child's stdin;
// the child answers with one line of k*m whitespace-separated reals in
// row-major (i,j) order. Rows are cached, so repeated requests for the same
// replication are answered locally.
class ExecSampler final : public Sampler {
public:
    ExecSampler(int k, int m, const std::string& command);
    ~ExecSampler() override;
    ExecSampler(const ExecSampler&) = delete;
    ExecSampler& operator=(const ExecSampler&) = delete;

    int alternatives() const override { return k_; }
    int scenarios() const override { return m_; }
    void draw(std::uint64_t rep, std::span<const SystemId> systems, std::span<double> out) override;

private:
    const std::vector<double>& row(std::uint64_t rep);

    int k_, m_;
    int pid_ = -1;
    int to_child_ = -1;
    int from_child_ = -1;
    std::string buffer_;
    std::vector<std::vector<double>> cache_;
};

}  // namespace rsb
