// Shared utilities: errors, enumeration budgets, hashing, streaming
// log-sum-exp, and a deterministic parallel map over index ranges.
#pragma once

#include <atomic>
#include <cmath>
#include <cstdint>
#include <functional>
#include <limits>
#include <stdexcept>
#include <string>
#include <thread>
#include <vector>

namespace gibbslab {

inline constexpr const char* kVersion = "gibbslab 0.1.0";

// Hard cap on exhaustive enumerations: at most 2^24 states.
inline constexpr int kEnumBudgetBits = 24;

class BudgetExceeded : public std::runtime_error {
public:
    explicit BudgetExceeded(const std::string& what) : std::runtime_error(what) {}
};

class ValidationError : public std::invalid_argument {
public:
    explicit ValidationError(const std::string& what) : std::invalid_argument(what) {}
};

// Throws unless alphabet^sites stays within the enumeration budget.
inline void require_enum_budget(int alphabet, long long sites, const std::string& where,
                                int budget_bits = kEnumBudgetBits) {
    const double bits = static_cast<double>(sites) * std::log2(static_cast<double>(alphabet));
    if (bits > budget_bits) {
        throw BudgetExceeded(where + ": enumeration needs " + std::to_string(bits) +
                             " bits of states, budget is 2^" + std::to_string(budget_bits));
    }
}

inline std::uint64_t ipow(std::uint64_t base, unsigned exp) {
    std::uint64_t r = 1;
    for (unsigned i = 0; i < exp; ++i) r *= base;
    return r;
}

// FNV-1a, used for stable content hashes (patterns, configs, models).
inline std::uint64_t fnv1a(const void* data, std::size_t len, std::uint64_t seed = 0xcbf29ce484222325ull) {
    const auto* p = static_cast<const unsigned char*>(data);
    std::uint64_t h = seed;
    for (std::size_t i = 0; i < len; ++i) {
        h ^= p[i];
        h *= 0x100000001b3ull;
    }
    return h;
}

inline std::uint64_t fnv1a_str(const std::string& s, std::uint64_t seed = 0xcbf29ce484222325ull) {
    return fnv1a(s.data(), s.size(), seed);
}

// Streaming log(sum exp(x_i)) accumulator; safe for values around -1e308.
class LogSumExp {
public:
    void add(double x) {
        if (x == -std::numeric_limits<double>::infinity()) return;
        if (x > max_) {
            if (count_ > 0) sum_ *= std::exp(max_ - x);
            max_ = x;
        }
        sum_ += std::exp(x - max_);
        ++count_;
    }
    // Merge keeps the result independent of how work was partitioned.
    void merge(const LogSumExp& other) {
        if (other.count_ == 0) return;
        if (count_ == 0) {
            *this = other;
            return;
        }
        if (other.max_ > max_) {
            sum_ = sum_ * std::exp(max_ - other.max_) + other.sum_;
            max_ = other.max_;
        } else {
            sum_ += other.sum_ * std::exp(other.max_ - max_);
        }
        count_ += other.count_;
    }
    double value() const {
        if (count_ == 0) return -std::numeric_limits<double>::infinity();
        return max_ + std::log(sum_);
    }
    long long count() const { return count_; }

private:
    double max_ = -std::numeric_limits<double>::infinity();
    double sum_ = 0.0;
    long long count_ = 0;
};

// Kahan-compensated sum; the reduce step of experiment accumulators.
class CompensatedSum {
public:
    void add(double x) {
        const double y = x - c_;
        const double t = s_ + y;
        c_ = (t - s_) - y;
        s_ = t;
    }
    double value() const { return s_; }

private:
    double s_ = 0.0;
    double c_ = 0.0;
};

inline unsigned default_workers() {
    unsigned n = std::thread::hardware_concurrency();
    return n == 0 ? 1 : n;
}

// Runs fn(i) for i in [0, count). Work is split into fixed chunks keyed by
// index, so per-index results cannot depend on the worker count; callers
// must write into preallocated per-index slots and reduce sequentially.
inline void parallel_for(long long count, unsigned workers, const std::function<void(long long)>& fn) {
    if (count <= 0) return;
    if (workers <= 1 || count == 1) {
        for (long long i = 0; i < count; ++i) fn(i);
        return;
    }
    std::vector<std::thread> pool;
    std::atomic<long long> next{0};
    auto run = [&]() {
        for (;;) {
            const long long i = next.fetch_add(1);
            if (i >= count) return;
            fn(i);
        }
    };
    const unsigned n = static_cast<unsigned>(std::min<long long>(workers, count));
    pool.reserve(n);
    for (unsigned w = 0; w < n; ++w) pool.emplace_back(run);
    for (auto& t : pool) t.join();
}

}  // namespace gibbslab
