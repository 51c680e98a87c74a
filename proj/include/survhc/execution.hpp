#pragma once

#include <cstddef>
#include <cstdint>
#include <exception>
#include <limits>
#include <string>

#ifdef _OPENMP
#include <omp.h>
#endif

#include "survhc/error.hpp"

namespace survhc {

/// How replicate loops run. `serial` is the reference path kept for tests;
/// `threads == 0` means the OpenMP default.
struct Execution {
    bool serial = false;
    int threads = 0;

    static Execution reference() { return Execution{true, 1}; }
    static Execution parallel(int threads = 0) { return Execution{false, threads}; }
};

/// A replicate body threw. `index` is the lowest failing replicate.
class ReplicateError : public Error {
public:
    ReplicateError(std::size_t index, const std::string& what)
        : Error("replicate " + std::to_string(index) + ": " + what), index_(index) {}
    std::size_t index() const noexcept { return index_; }

private:
    std::size_t index_;
};

/// Calls body(i) for i in [0, n). Bodies must write only to slot i of
/// preallocated output so results do not depend on the schedule.
template <class Body>
void for_each_index(std::size_t n, const Execution& exec, Body&& body) {
    std::size_t failed = std::numeric_limits<std::size_t>::max();
    std::string message;
    auto guarded = [&](std::size_t i) {
        try {
            body(i);
        } catch (const std::exception& e) {
#ifdef _OPENMP
#pragma omp critical(survhc_replicate_error)
#endif
            if (i < failed) {
                failed = i;
                message = e.what();
            }
        }
    };
#ifdef _OPENMP
    if (!exec.serial) {
        const int threads = exec.threads > 0 ? exec.threads : omp_get_max_threads();
        const auto count = static_cast<std::int64_t>(n);
#pragma omp parallel for schedule(dynamic, 8) num_threads(threads)
        for (std::int64_t i = 0; i < count; ++i) guarded(static_cast<std::size_t>(i));
    } else
#endif
    {
        for (std::size_t i = 0; i < n; ++i) guarded(i);
    }
    if (failed != std::numeric_limits<std::size_t>::max()) throw ReplicateError(failed, message);
}

}  // namespace survhc
