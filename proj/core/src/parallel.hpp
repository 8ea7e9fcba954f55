#pragma once

// Voxel loops whose iterations write disjoint outputs. Reductions are never
// parallelized so results stay bitwise reproducible.
#if defined(_OPENMP)
#define SEGREG_PARALLEL_FOR _Pragma("omp parallel for schedule(static)")
#else
#define SEGREG_PARALLEL_FOR
#endif
