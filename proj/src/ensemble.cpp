#include "mvlab/ensemble.hpp"

#include <cstdlib>
#include <string>

namespace mvlab {

int resolve_workers(int requested) {
    if (requested > 0) return requested;
    if (const char* env = std::getenv("PARALLELISM")) {
        try {
            const int n = std::stoi(env);
            if (n > 0) return n;
        } catch (...) {
            // fall through to hardware default
        }
    }
    const unsigned hw = std::thread::hardware_concurrency();
    return hw > 0 ? static_cast<int>(hw) : 1;
}

}  // namespace mvlab
