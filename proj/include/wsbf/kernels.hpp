#ifndef WSBF_KERNELS_HPP
#define WSBF_KERNELS_HPP

#include <cstddef>
#include <span>
#include <string>

namespace wsbf::kernels {

// Hot arithmetic loops shared by the learners and the metrics. Every kernel
// has a scalar reference implementation and an AVX2+FMA variant; the active
// backend is picked once at startup from CPUID and can be forced for
// equivalence testing. SIMD variants may reassociate the reduction, so
// cross-backend agreement is to ~1e-12 relative, not bitwise.

enum class Backend { Scalar, Avx2 };

/// Currently active backend.
Backend active_backend();

/// Force a backend (tests); throws ContractError if unsupported on this CPU.
void force_backend(Backend b);

/// Re-run CPU detection and select the default backend.
void reset_backend();

std::string backend_name(Backend b);

/// sum_i a[i] * b[i]
double dot(std::span<const double> a, std::span<const double> b);

/// sum_i x[i]
double sum(std::span<const double> x);

/// sum_i |a[i] - b[i]|  (the MAE numerator)
double sum_abs_diff(std::span<const double> a, std::span<const double> b);

/// sum_i (a[i] - b[i])^2  (squared Euclidean distance, RBF kernels)
double squared_distance(std::span<const double> a, std::span<const double> b);

/// y[i] += alpha * x[i]
void axpy(double alpha, std::span<const double> x, std::span<double> y);

// Scalar reference implementations, exposed for the equivalence tests.
namespace scalar {
double dot(std::span<const double> a, std::span<const double> b);
double sum(std::span<const double> x);
double sum_abs_diff(std::span<const double> a, std::span<const double> b);
double squared_distance(std::span<const double> a, std::span<const double> b);
void axpy(double alpha, std::span<const double> x, std::span<double> y);
} // namespace scalar

} // namespace wsbf::kernels

#endif // WSBF_KERNELS_HPP
