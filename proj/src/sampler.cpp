#include "rsb/sampler.hpp"

#include <cerrno>
#include <cmath>
#include <csignal>
#include <cstring>
#include <sstream>

#include <sys/wait.h>
#include <unistd.h>

#include "rsb/errors.hpp"
#include "rsb/rng.hpp"

namespace rsb {

namespace {

void check_shape(std::span<const SystemId> systems, std::span<double> out, int k, int m) {
    if (out.size() < systems.size()) throw DomainError("draw: output buffer too small");
    for (const auto& id : systems) {
        if (id.alt < 0 || id.alt >= k || id.scen < 0 || id.scen >= m)
            throw DomainError("draw: system index out of range");
    }
}

}  // namespace

RecordedSampler::RecordedSampler(int k, int m, std::vector<std::vector<double>> data)
    : k_(k), m_(m), data_(std::move(data)) {
    if (k < 1 || m < 1) throw ConfigError("RecordedSampler: k and m must be >= 1");
    if (data_.size() != static_cast<std::size_t>(k) * m)
        throw DataError("RecordedSampler: expected k*m series");
    const std::size_t len = data_.front().size();
    for (const auto& s : data_) {
        if (s.size() != len) throw DataError("RecordedSampler: misaligned replication counts across systems");
        for (double v : s) {
            if (!std::isfinite(v)) throw DataError("RecordedSampler: non-finite value");
        }
    }
}

std::size_t RecordedSampler::recorded_length() const { return data_.front().size(); }

void RecordedSampler::draw(std::uint64_t rep, std::span<const SystemId> systems, std::span<double> out) {
    check_shape(systems, out, k_, m_);
    if (rep >= recorded_length())
        throw DataError("recorded samples exhausted at replication " + std::to_string(rep + 1));
    for (std::size_t q = 0; q < systems.size(); ++q) out[q] = data_[flat(systems[q])][rep];
}

ResamplingSampler::ResamplingSampler(int k, int m, std::shared_ptr<const std::vector<std::vector<double>>> pools,
                                     std::uint64_t seed)
    : k_(k), m_(m), pools_(std::move(pools)), seed_(seed) {
    if (!pools_ || pools_->size() != static_cast<std::size_t>(k) * m)
        throw ConfigError("ResamplingSampler: expected k*m pools");
    for (const auto& p : *pools_) {
        if (p.empty()) throw ConfigError("ResamplingSampler: empty pool");
    }
}

void ResamplingSampler::draw(std::uint64_t rep, std::span<const SystemId> systems, std::span<double> out) {
    check_shape(systems, out, k_, m_);
    for (std::size_t q = 0; q < systems.size(); ++q) {
        const auto& pool = (*pools_)[flat(systems[q])];
        const double u = counter_uniform(seed_, static_cast<std::uint64_t>(flat(systems[q])), rep);
        auto idx = static_cast<std::size_t>(u * static_cast<double>(pool.size()));
        if (idx >= pool.size()) idx = pool.size() - 1;
        out[q] = pool[idx];
    }
}

double ResamplingSampler::pool_mean(SystemId id) const {
    const auto& pool = (*pools_)[flat(id)];
    double s = 0.0;
    for (double v : pool) s += v;
    return s / static_cast<double>(pool.size());
}

void FunctionSampler::draw(std::uint64_t rep, std::span<const SystemId> systems, std::span<double> out) {
    check_shape(systems, out, k_, m_);
    for (std::size_t q = 0; q < systems.size(); ++q) out[q] = fn_(rep, systems[q]);
}

// ---------------------------------------------------------------------------

ExecSampler::ExecSampler(int k, int m, const std::string& command) : k_(k), m_(m) {
    if (k < 1 || m < 1) throw ConfigError("ExecSampler: k and m must be >= 1");
    int in_pipe[2], out_pipe[2];
    if (pipe(in_pipe) != 0 || pipe(out_pipe) != 0) throw Error("ExecSampler: pipe() failed");
    pid_ = fork();
    if (pid_ < 0) throw Error("ExecSampler: fork() failed");
    if (pid_ == 0) {
        dup2(in_pipe[0], STDIN_FILENO);
        dup2(out_pipe[1], STDOUT_FILENO);
        close(in_pipe[0]);
        close(in_pipe[1]);
        close(out_pipe[0]);
        close(out_pipe[1]);
        execl("/bin/sh", "sh", "-c", command.c_str(), static_cast<char*>(nullptr));
        _exit(127);
    }
    close(in_pipe[0]);
    close(out_pipe[1]);
    to_child_ = in_pipe[1];
    from_child_ = out_pipe[0];
    std::signal(SIGPIPE, SIG_IGN);
}

ExecSampler::~ExecSampler() {
    if (to_child_ >= 0) close(to_child_);
    if (from_child_ >= 0) close(from_child_);
    if (pid_ > 0) {
        int status = 0;
        waitpid(pid_, &status, 0);
    }
}

const std::vector<double>& ExecSampler::row(std::uint64_t rep) {
    if (rep < cache_.size()) return cache_[rep];
    while (cache_.size() <= rep) {
        const std::string req = std::to_string(cache_.size()) + "\n";
        if (write(to_child_, req.data(), req.size()) != static_cast<ssize_t>(req.size()))
            throw DataError("external sampler: failed to send request");
        std::size_t nl;
        while ((nl = buffer_.find('\n')) == std::string::npos) {
            char chunk[4096];
            const ssize_t got = read(from_child_, chunk, sizeof chunk);
            if (got < 0 && errno == EINTR) continue;
            if (got <= 0) throw DataError("external sampler: child closed its output");
            buffer_.append(chunk, static_cast<std::size_t>(got));
        }
        std::istringstream line(buffer_.substr(0, nl));
        buffer_.erase(0, nl + 1);
        std::vector<double> values;
        double v;
        while (line >> v) values.push_back(v);
        if (values.size() != static_cast<std::size_t>(k_) * m_)
            throw DataError("external sampler: expected " + std::to_string(k_ * m_) + " values, got " +
                            std::to_string(values.size()));
        for (double x : values) {
            if (!std::isfinite(x)) throw DataError("external sampler: non-finite value");
        }
        cache_.push_back(std::move(values));
    }
    return cache_[rep];
}

void ExecSampler::draw(std::uint64_t rep, std::span<const SystemId> systems, std::span<double> out) {
    check_shape(systems, out, k_, m_);
    const auto& r = row(rep);
    for (std::size_t q = 0; q < systems.size(); ++q) out[q] = r[flat(systems[q])];
}

}  // namespace rsb
