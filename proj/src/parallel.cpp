#include "neglectnet/parallel.hpp"

#include <algorithm>
#include <atomic>
#include <cstdlib>
#include <exception>
#include <string>
#include <thread>
#include <vector>

namespace neglectnet::inline NEGLECTNET_PRECISION {
namespace {

int env_threads()
{
    const unsigned hw = std::max(1u, std::thread::hardware_concurrency());
    if (const char* v = std::getenv("NEGLECTNET_THREADS")) {
        try {
            const int n = std::stoi(v);
            if (n >= 1) return std::min<int>(n, static_cast<int>(hw));
        } catch (...) {
        }
    }
    return static_cast<int>(hw);
}

std::atomic<int> g_override{0};

}  // namespace

int intra_op_threads()
{
    static const int from_env = env_threads();
    const int o = g_override.load();
    return o > 0 ? o : from_env;
}

void set_intra_op_threads(int n) { g_override.store(std::max(0, n)); }

void parallel_for(int64_t n, int64_t min_chunk, const std::function<void(int64_t, int64_t)>& fn)
{
    if (n <= 0) return;
    const int64_t max_workers = std::max<int64_t>(1, n / std::max<int64_t>(1, min_chunk));
    const int64_t workers = std::min<int64_t>(intra_op_threads(), max_workers);
    if (workers <= 1) {
        fn(0, n);
        return;
    }
    std::vector<std::thread> pool;
    pool.reserve(static_cast<size_t>(workers - 1));
    std::vector<std::exception_ptr> errors(static_cast<size_t>(workers));
    const int64_t chunk = (n + workers - 1) / workers;
    for (int64_t w = 1; w < workers; ++w) {
        const int64_t b = w * chunk;
        const int64_t e = std::min(n, b + chunk);
        if (b < e)
            pool.emplace_back([&fn, &errors, w, b, e] {
                try {
                    fn(b, e);
                } catch (...) {
                    errors[static_cast<size_t>(w)] = std::current_exception();
                }
            });
    }
    try {
        fn(0, std::min(n, chunk));
    } catch (...) {
        errors[0] = std::current_exception();
    }
    for (auto& t : pool) t.join();
    for (auto& e : errors)
        if (e) std::rethrow_exception(e);
}

}  // namespace neglectnet
