#include "uniformize/parallel.hpp"

#include <algorithm>
#include <cstdlib>
#include <string>

namespace uniformize {

int worker_count() {
    int workers = static_cast<int>(std::thread::hardware_concurrency());
    if (workers < 1) workers = 1;
    if (const char* cap = std::getenv("UNIFORMIZE_THREADS")) {
        try {
            const int limit = std::stoi(cap);
            if (limit >= 1) workers = std::min(workers, limit);
        } catch (...) {
            // unparsable values fall back to hardware concurrency
        }
    }
    return workers;
}

} // namespace uniformize
