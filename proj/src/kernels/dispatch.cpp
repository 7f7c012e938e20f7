#include <cstdlib>
#include <string>
#include <string_view>

#include "kernel_sets.hpp"
#include "moonlab/errors.hpp"

namespace moonlab::kernels {

std::string_view to_string(Isa isa) {
    switch (isa) {
        case Isa::Scalar: return "scalar";
        case Isa::Avx2: return "avx2";
    }
    return "unknown";
}

namespace {

bool cpu_has_avx2() {
#if defined(MOONLAB_WITH_AVX2) && (defined(__GNUC__) || defined(__clang__))
    return __builtin_cpu_supports("avx2");
#else
    return false;
#endif
}

const KernelSet& pick_default() {
    if (const char* forced = std::getenv("MOONLAB_KERNEL"); forced != nullptr && *forced != '\0') {
        const std::string_view name(forced);
        if (name == "scalar") return scalar_kernels();
        if (name == "avx2") return kernels_for(Isa::Avx2);
        throw ValidationError("MOONLAB_KERNEL", "unknown kernel set '" + std::string(name) + "'");
    }
    return kernels_for(available_isas().back());
}

}  // namespace

std::vector<Isa> available_isas() {
    std::vector<Isa> isas{Isa::Scalar};
    if (cpu_has_avx2()) isas.push_back(Isa::Avx2);
    return isas;
}

const KernelSet& kernels_for(Isa isa) {
    switch (isa) {
        case Isa::Scalar: return scalar_kernels();
        case Isa::Avx2:
#if defined(MOONLAB_WITH_AVX2)
            if (cpu_has_avx2()) return detail::avx2_kernels();
#endif
            break;
    }
    throw UnsupportedError("kernel set '" + std::string(to_string(isa)) + "' is not available on this host");
}

const KernelSet& active_kernels() {
    static const KernelSet& chosen = pick_default();
    return chosen;
}

}  // namespace moonlab::kernels
