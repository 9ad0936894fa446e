#include "crdm/csv.hpp"

#include <cstdio>

namespace crdm {

std::string format_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

void write_scalar_field_csv(std::ostream& os, const GridSpec& grid,
                            const std::function<double(const Vec3&)>& f) {
  os << "x,y,z,value\n";
  for (std::size_t i = 0; i < grid.size(); ++i) {
    const Vec3 r = grid.node(i);
    os << format_double(r[0]) << ',' << format_double(r[1]) << ',' << format_double(r[2]) << ','
       << format_double(f(r)) << '\n';
  }
}

void write_vector_field_csv(std::ostream& os, const GridSpec& grid,
                            const std::function<Vec3(const Vec3&)>& f) {
  os << "x,y,z,vx,vy,vz\n";
  for (std::size_t i = 0; i < grid.size(); ++i) {
    const Vec3 r = grid.node(i);
    const Vec3 v = f(r);
    os << format_double(r[0]) << ',' << format_double(r[1]) << ',' << format_double(r[2]) << ','
       << format_double(v[0]) << ',' << format_double(v[1]) << ',' << format_double(v[2]) << '\n';
  }
}

void write_kernel_samples_csv(std::ostream& os, const RdmKernel& kernel,
                              const std::vector<PointPair>& pairs) {
  os << "rx,ry,rz,sx,sy,sz,re,im\n";
  for (const auto& [r, s] : pairs) {
    const Complex k = kernel(r, s);
    os << format_double(r[0]) << ',' << format_double(r[1]) << ',' << format_double(r[2]) << ','
       << format_double(s[0]) << ',' << format_double(s[1]) << ',' << format_double(s[2]) << ','
       << format_double(k.real()) << ',' << format_double(k.imag()) << '\n';
  }
}

void write_spectrum_csv(std::ostream& os, const std::vector<double>& eigenvalues) {
  os << "index,eigenvalue\n";
  for (std::size_t i = 0; i < eigenvalues.size(); ++i) {
    os << i << ',' << format_double(eigenvalues[i]) << '\n';
  }
}

void write_averaging_csv(std::ostream& os, const AveragingProbe& probe) {
  os << "epsilon,value,abs_error\n";
  for (const auto& row : probe.rows) {
    os << format_double(row.epsilon) << ',' << format_double(row.value.real()) << ','
       << format_double(row.abs_error) << '\n';
  }
}

}  // namespace crdm
