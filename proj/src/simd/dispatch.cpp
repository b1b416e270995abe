#include <atomic>
#include <cstdlib>
#include <stdexcept>
#include <string>

#include "ranger21/simd/kernels.hpp"

namespace ranger21::simd {
namespace {

bool cpu_has(Backend b) {
    switch (b) {
        case Backend::Scalar:
            return true;
        case Backend::Avx2:
#if defined(RANGER21_HAVE_AVX2) && (defined(__GNUC__) || defined(__clang__))
            return __builtin_cpu_supports("avx2");
#else
            return false;
#endif
        case Backend::Neon:
#if defined(RANGER21_HAVE_NEON)
            return true;
#else
            return false;
#endif
    }
    return false;
}

Backend widest_available() {
    if (cpu_has(Backend::Avx2)) {
        return Backend::Avx2;
    }
    if (cpu_has(Backend::Neon)) {
        return Backend::Neon;
    }
    return Backend::Scalar;
}

Backend initial_backend() {
    if (const char* env = std::getenv("RANGER21_SIMD"); env != nullptr && *env != '\0') {
        const Backend requested = parse_backend(env);
        if (!cpu_has(requested)) {
            throw std::invalid_argument("RANGER21_SIMD=" + std::string(env) +
                                        " is not supported on this machine");
        }
        return requested;
    }
    return widest_available();
}

std::atomic<const KernelTable*>& active_slot() {
    static std::atomic<const KernelTable*> slot{kernels_for(initial_backend())};
    return slot;
}

}  // namespace

std::string_view backend_name(Backend b) {
    switch (b) {
        case Backend::Scalar:
            return "scalar";
        case Backend::Avx2:
            return "avx2";
        case Backend::Neon:
            return "neon";
    }
    return "unknown";
}

Backend parse_backend(std::string_view name) {
    if (name == "scalar") {
        return Backend::Scalar;
    }
    if (name == "avx2") {
        return Backend::Avx2;
    }
    if (name == "neon") {
        return Backend::Neon;
    }
    throw std::invalid_argument("unknown SIMD backend '" + std::string(name) +
                                "' (expected scalar, avx2 or neon)");
}

const KernelTable* kernels_for(Backend b) {
    if (!cpu_has(b)) {
        return nullptr;
    }
    switch (b) {
        case Backend::Scalar:
            return &detail::scalar_table();
#if defined(RANGER21_HAVE_AVX2)
        case Backend::Avx2:
            return &detail::avx2_table();
#endif
#if defined(RANGER21_HAVE_NEON)
        case Backend::Neon:
            return &detail::neon_table();
#endif
        default:
            return nullptr;
    }
}

std::vector<Backend> available_backends() {
    std::vector<Backend> out;
    for (Backend b : {Backend::Scalar, Backend::Avx2, Backend::Neon}) {
        if (kernels_for(b) != nullptr) {
            out.push_back(b);
        }
    }
    return out;
}

const KernelTable& kernels() { return *active_slot().load(std::memory_order_acquire); }

void set_backend(Backend b) {
    const KernelTable* table = kernels_for(b);
    if (table == nullptr) {
        throw std::invalid_argument("SIMD backend '" + std::string(backend_name(b)) +
                                    "' is not available on this machine");
    }
    active_slot().store(table, std::memory_order_release);
}

Backend active_backend() { return kernels().backend; }

}  // namespace ranger21::simd
