#include <atomic>
#include <cstdlib>
#include <string>

#include "tfcl/error.hpp"
#include "kernels_internal.hpp"

namespace tfcl::simd {
namespace {

bool cpu_has(Isa isa) noexcept {
  switch (isa) {
    case Isa::scalar:
      return true;
    case Isa::avx2:
#if defined(TFCL_HAVE_AVX2_KERNELS) && (defined(__GNUC__) || defined(__clang__))
      __builtin_cpu_init();
      return __builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma");
#else
      return false;
#endif
    case Isa::neon:
#if defined(TFCL_HAVE_NEON_KERNELS)
      return true;
#else
      return false;
#endif
  }
  return false;
}

const KernelTable* initial_table() noexcept {
  if (const char* env = std::getenv("TFCL_ISA"); env != nullptr && *env != '\0') {
    try {
      if (const KernelTable* t = kernels_for(parse_isa(env))) return t;
    } catch (const Error&) {
      // unknown name: fall through to auto-detection
    }
  }
  for (Isa isa : {Isa::avx2, Isa::neon})
    if (const KernelTable* t = kernels_for(isa)) return t;
  return &scalar_kernels();
}

std::atomic<const KernelTable*>& active_slot() noexcept {
  static std::atomic<const KernelTable*> slot{initial_table()};
  return slot;
}

}  // namespace

std::string_view to_string(Isa isa) noexcept {
  switch (isa) {
    case Isa::scalar: return "scalar";
    case Isa::avx2: return "avx2";
    case Isa::neon: return "neon";
  }
  return "unknown";
}

Isa parse_isa(std::string_view name) {
  if (name == "scalar") return Isa::scalar;
  if (name == "avx2") return Isa::avx2;
  if (name == "neon") return Isa::neon;
  fail(ErrorKind::invalid_argument, "unknown ISA '" + std::string(name) + "'");
}

const KernelTable* kernels_for(Isa isa) noexcept {
  if (!cpu_has(isa)) return nullptr;
  switch (isa) {
    case Isa::scalar:
      return &scalar_kernels();
    case Isa::avx2:
#if defined(TFCL_HAVE_AVX2_KERNELS)
      return &detail::avx2_table();
#else
      return nullptr;
#endif
    case Isa::neon:
#if defined(TFCL_HAVE_NEON_KERNELS)
      return &detail::neon_table();
#else
      return nullptr;
#endif
  }
  return nullptr;
}

std::vector<Isa> available_isas() {
  std::vector<Isa> out;
  for (Isa isa : {Isa::scalar, Isa::avx2, Isa::neon})
    if (kernels_for(isa) != nullptr) out.push_back(isa);
  return out;
}

const KernelTable& active_kernels() noexcept {
  return *active_slot().load(std::memory_order_acquire);
}

void select_isa(Isa isa) {
  const KernelTable* table = kernels_for(isa);
  if (table == nullptr)
    fail(ErrorKind::invalid_argument,
         "ISA '" + std::string(to_string(isa)) + "' is not available on this machine");
  active_slot().store(table, std::memory_order_release);
}

}  // namespace tfcl::simd
