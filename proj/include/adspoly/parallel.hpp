#pragma once

#include <cstdlib>
#include <exception>
#include <mutex>
#include <thread>
#include <vector>

namespace adspoly {

// ADSPOLY_THREADS caps the worker count; default is the hardware count.
inline int thread_cap() {
    int n = int(std::thread::hardware_concurrency());
    if (const char* e = std::getenv("ADSPOLY_THREADS")) {
        const int v = std::atoi(e);
        if (v > 0) n = v;
    }
    return n > 0 ? n : 1;
}

// Runs body(i) for i in [0, count); the first exception is rethrown.
template <class Body>
void parallel_for(int count, Body&& body) {
    const int workers = std::min(thread_cap(), count);
    if (workers <= 1) {
        for (int i = 0; i < count; ++i) body(i);
        return;
    }
    std::exception_ptr err;
    std::mutex mu;
    int next = 0;
    auto run = [&] {
        while (true) {
            int i;
            {
                std::lock_guard lk(mu);
                if (next >= count || err) return;
                i = next++;
            }
            try {
                body(i);
            } catch (...) {
                std::lock_guard lk(mu);
                if (!err) err = std::current_exception();
            }
        }
    };
    std::vector<std::thread> pool;
    for (int t = 0; t < workers; ++t) pool.emplace_back(run);
    for (auto& t : pool) t.join();
    if (err) std::rethrow_exception(err);
}

}  // namespace adspoly
