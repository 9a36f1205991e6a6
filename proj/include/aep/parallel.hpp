#pragma once

// OpenMP sweep kernels. Every kernel has a serial reference path selected by
// Exec::serial; the parallel path must produce bit-identical merged output.

#include <cmath>
#include <cstddef>
#include <cstdint>
#include <exception>
#include <limits>
#include <mutex>
#include <vector>

#include <omp.h>

namespace aep {

enum class Exec { serial, parallel };

/// splitmix64 finalizer; per-sample streams are seeded with derive_seed(base, i).
constexpr std::uint64_t derive_seed(std::uint64_t base, std::uint64_t index) {
    std::uint64_t z = base + 0x9e3779b97f4a7c15ULL * (index + 1);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

struct SweepStats {
    std::size_t samples = 0;
    double worst = std::numeric_limits<double>::infinity();
    std::size_t worst_index = 0;
    std::size_t violations = 0;

    [[nodiscard]] bool passed() const { return violations == 0; }
};

namespace detail {

inline void fold(SweepStats &acc, std::size_t i, double slack, double tolerance) {
    ++acc.samples;
    if (std::isnan(slack) || slack < -tolerance) ++acc.violations;
    if (slack < acc.worst || (slack == acc.worst && i < acc.worst_index)) {
        acc.worst = slack;
        acc.worst_index = i;
    }
}

inline void merge(SweepStats &acc, const SweepStats &part) {
    acc.samples += part.samples;
    acc.violations += part.violations;
    if (part.samples == 0) return;
    if (part.worst < acc.worst || (part.worst == acc.worst && part.worst_index < acc.worst_index)) {
        acc.worst = part.worst;
        acc.worst_index = part.worst_index;
    }
}

// Keeps the exception thrown at the lowest index so that parallel and serial
// runs fail identically.
class FirstError {
  public:
    void capture(std::size_t i) {
        std::lock_guard lock(mutex_);
        if (!error_ || i < index_) {
            error_ = std::current_exception();
            index_ = i;
        }
    }
    void rethrow() const {
        if (error_) std::rethrow_exception(error_);
    }

  private:
    std::mutex mutex_;
    std::exception_ptr error_;
    std::size_t index_ = 0;
};

}  // namespace detail

/// Minimum-slack reduction over samples 0..count-1. A sample violates when its
/// slack is NaN or below -tolerance. Ties on the minimum go to the lower index.
template <class F>
SweepStats sweep_min(std::size_t count, double tolerance, F &&slack_of, Exec exec = Exec::parallel) {
    SweepStats total;
    if (exec == Exec::serial) {
        for (std::size_t i = 0; i < count; ++i) detail::fold(total, i, slack_of(i), tolerance);
        return total;
    }
    detail::FirstError err;
#pragma omp parallel
    {
        SweepStats local;
#pragma omp for schedule(dynamic, 8) nowait
        for (std::int64_t s = 0; s < static_cast<std::int64_t>(count); ++s) {
            const auto i = static_cast<std::size_t>(s);
            try {
                detail::fold(local, i, slack_of(i), tolerance);
            } catch (...) {
                err.capture(i);
            }
        }
#pragma omp critical(aep_sweep_merge)
        detail::merge(total, local);
    }
    err.rethrow();
    return total;
}

/// Evaluates fn(i) for every index and returns results in index order.
template <class T, class F>
std::vector<T> map_indexed(std::size_t count, F &&fn, Exec exec = Exec::parallel) {
    std::vector<T> out(count);
    if (exec == Exec::serial) {
        for (std::size_t i = 0; i < count; ++i) out[i] = fn(i);
        return out;
    }
    detail::FirstError err;
#pragma omp parallel for schedule(dynamic, 1)
    for (std::int64_t s = 0; s < static_cast<std::int64_t>(count); ++s) {
        const auto i = static_cast<std::size_t>(s);
        try {
            out[i] = fn(i);
        } catch (...) {
            err.capture(i);
        }
    }
    err.rethrow();
    return out;
}

inline void set_thread_count(int jobs) {
    if (jobs > 0) omp_set_num_threads(jobs);
}

}  // namespace aep
