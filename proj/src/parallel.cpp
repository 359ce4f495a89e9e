#include "shapegeo/parallel.hpp"

#include <algorithm>
#include <cstdlib>
#include <exception>
#include <string>
#include <thread>
#include <vector>

namespace shapegeo {

int thread_count()
{
    if (const char* env = std::getenv("SHAPEGEO_THREADS")) {
        try {
            const int n = std::stoi(env);
            if (n >= 1) return n;
        } catch (const std::exception&) {
            // fall through to the hardware default
        }
    }
    return std::max(1u, std::thread::hardware_concurrency());
}

void parallel_for(int n, const std::function<void(int)>& body, int min_per_thread)
{
    if (n <= 0) return;
    const int workers = std::min(thread_count(), std::max(1, n / std::max(1, min_per_thread)));
    if (workers <= 1) {
        for (int i = 0; i < n; ++i) body(i);
        return;
    }

    std::vector<std::exception_ptr> errors(n);
    {
        std::vector<std::jthread> pool;
        pool.reserve(workers);
        for (int w = 0; w < workers; ++w) {
            const int begin = static_cast<int>(static_cast<long>(n) * w / workers);
            const int end = static_cast<int>(static_cast<long>(n) * (w + 1) / workers);
            pool.emplace_back([&, begin, end] {
                for (int i = begin; i < end; ++i) {
                    try {
                        body(i);
                    } catch (...) {
                        errors[i] = std::current_exception();
                        return;
                    }
                }
            });
        }
    }
    for (auto& e : errors) {
        if (e) std::rethrow_exception(e);
    }
}

} // namespace shapegeo
