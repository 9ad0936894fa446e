#pragma once

#include <functional>
#include <ostream>
#include <string>
#include <vector>

#include "crdm/grid.hpp"
#include "crdm/kernels.hpp"
#include "crdm/measure.hpp"

namespace crdm {

/// %.17g: every double round-trips.
std::string format_double(double v);

/// Header `x,y,z,value`.
void write_scalar_field_csv(std::ostream& os, const GridSpec& grid,
                            const std::function<double(const Vec3&)>& f);
/// Header `x,y,z,vx,vy,vz`.
void write_vector_field_csv(std::ostream& os, const GridSpec& grid,
                            const std::function<Vec3(const Vec3&)>& f);
/// Header `rx,ry,rz,sx,sy,sz,re,im`.
void write_kernel_samples_csv(std::ostream& os, const RdmKernel& kernel,
                              const std::vector<PointPair>& pairs);
/// Header `index,eigenvalue`.
void write_spectrum_csv(std::ostream& os, const std::vector<double>& eigenvalues);
/// Header `epsilon,value,abs_error`; the real part of the averaged value.
void write_averaging_csv(std::ostream& os, const AveragingProbe& probe);

}  // namespace crdm
