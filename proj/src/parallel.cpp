#include "nn2poly/parallel.hpp"

#ifdef NN2POLY_HAVE_OPENMP
#include <omp.h>
#endif

namespace nn2poly {

int max_threads() noexcept {
#ifdef NN2POLY_HAVE_OPENMP
    return omp_get_max_threads();
#else
    return 1;
#endif
}

}  // namespace nn2poly
