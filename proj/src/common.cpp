#include "cvembem/common.hpp"

#include <cstdlib>
#include <string>

#ifdef _OPENMP
#include <omp.h>
#endif

namespace cvembem {

int configure_threads(int requested)
{
    int n = requested;
    if (n <= 0) {
        if (const char* env = std::getenv("CVEMBEM_THREADS")) {
            try {
                n = std::stoi(env);
            } catch (const std::exception&) {
                n = 0;
            }
        }
    }
#ifdef _OPENMP
    if (n > 0) omp_set_num_threads(n);
    return omp_get_max_threads();
#else
    return 1;
#endif
}

} // namespace cvembem
