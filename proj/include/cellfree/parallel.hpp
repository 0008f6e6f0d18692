// cellfree-dl: distributed precoding simulator for cell-free massive MIMO downlink
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
// http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.
// ------------------------------------------------------------------------

#ifndef CELLFREE_PARALLEL_HPP
#define CELLFREE_PARALLEL_HPP

#include <atomic>
#include <cstdlib>
#include <exception>
#include <functional>
#include <mutex>
#include <string>
#include <thread>
#include <vector>

namespace cellfree
{

/// Runs fn(i) for i in [0, n) on up to n_threads workers pulling indices from
/// a shared counter. Work items must write only to their own output slot; the
/// caller merges slots in index order afterwards, which keeps results
/// independent of the scheduling.
inline void parallel_for_index(int n, int n_threads, const std::function<void(int)> &fn)
{
    if (n <= 0)
        return;
    if (n_threads <= 1 || n == 1)
    {
        for (int i = 0; i < n; ++i)
            fn(i);
        return;
    }
    n_threads = std::min(n_threads, n);
    std::atomic<int> next{0};
    std::exception_ptr error;
    std::mutex error_mutex;
    auto worker = [&]() {
        for (;;)
        {
            const int i = next.fetch_add(1);
            if (i >= n)
                return;
            try
            {
                fn(i);
            }
            catch (...)
            {
                std::lock_guard<std::mutex> lock(error_mutex);
                if (!error)
                    error = std::current_exception();
                return;
            }
        }
    };
    std::vector<std::thread> threads;
    threads.reserve(static_cast<size_t>(n_threads));
    for (int t = 0; t < n_threads; ++t)
        threads.emplace_back(worker);
    for (auto &t : threads)
        t.join();
    if (error)
        std::rethrow_exception(error);
}

/// Thread count policy: CELLFREE_THREADS env var wins, else the requested
/// value, else hardware concurrency.
inline int resolve_thread_count(int requested = 0)
{
    if (const char *env = std::getenv("CELLFREE_THREADS"))
    {
        const int v = std::atoi(env);
        if (v > 0)
            return v;
    }
    if (requested > 0)
        return requested;
    const unsigned hw = std::thread::hardware_concurrency();
    return hw > 0 ? static_cast<int>(hw) : 1;
}

} // namespace cellfree

#endif // CELLFREE_PARALLEL_HPP
