#include "mrelax/fft.hpp"

#include <fftw3.h>

#include <cstring>
#include <map>
#include <mutex>
#include <stdexcept>

namespace mrelax {
namespace {

struct PlanPair {
  fftw_plan fwd = nullptr;
  fftw_plan inv = nullptr;
};

// FFTW_UNALIGNED keeps the plans valid for arbitrary caller buffers;
// FFTW_ESTIMATE keeps planning deterministic run to run.
PlanPair make_plans(std::size_t n) {
  std::vector<double> real(n);
  std::vector<std::complex<double>> cplx(n / 2 + 1);
  auto* c = reinterpret_cast<fftw_complex*>(cplx.data());
  PlanPair p;
  const unsigned flags = FFTW_ESTIMATE | FFTW_UNALIGNED;
  p.fwd = fftw_plan_dft_r2c_1d(static_cast<int>(n), real.data(), c, flags);
  p.inv = fftw_plan_dft_c2r_1d(static_cast<int>(n), c, real.data(), flags);
  if (!p.fwd || !p.inv) throw std::runtime_error("fftw plan creation failed");
  return p;
}

const PlanPair& plans_for(std::size_t n) {
  static std::mutex mtx;
  static std::map<std::size_t, PlanPair> cache;
  std::lock_guard<std::mutex> lock(mtx);
  auto it = cache.find(n);
  if (it == cache.end()) it = cache.emplace(n, make_plans(n)).first;
  return it->second;
}

thread_local std::vector<std::complex<double>> tl_scratch;

}  // namespace

void rfft(std::span<const double> in, std::span<std::complex<double>> out) {
  const std::size_t n = in.size();
  if (out.size() != spectrum_size(n)) throw std::invalid_argument("rfft: bad spectrum size");
  const PlanPair& p = plans_for(n);
  // r2c does not modify its input, but the API wants a non-const pointer.
  fftw_execute_dft_r2c(p.fwd, const_cast<double*>(in.data()),
                       reinterpret_cast<fftw_complex*>(out.data()));
  const double scale = 1.0 / static_cast<double>(n);
  for (auto& c : out) c *= scale;
}

void irfft(std::span<const std::complex<double>> in, std::span<double> out) {
  const std::size_t n = out.size();
  if (in.size() != spectrum_size(n)) throw std::invalid_argument("irfft: bad spectrum size");
  const PlanPair& p = plans_for(n);
  // c2r destroys its input, so run it on a thread-local copy.
  tl_scratch.assign(in.begin(), in.end());
  fftw_execute_dft_c2r(p.inv, reinterpret_cast<fftw_complex*>(tl_scratch.data()), out.data());
}

}  // namespace mrelax
