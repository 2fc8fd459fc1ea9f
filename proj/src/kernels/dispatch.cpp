#include "rencontre/kernels/kernels.hpp"

#include <cstdlib>
#include <cstring>

namespace rencontre::kernels {

const KernelSet& active_kernels() {
    static const KernelSet* selected = [] {
        const char* force = std::getenv("RENCONTRE_KERNEL");
        if (force && std::strcmp(force, "scalar") == 0)
            return &scalar_kernels();
        const KernelSet* avx2 = avx2_kernels();
        if (force && std::strcmp(force, "avx2") == 0 && avx2)
            return avx2;
        return avx2 ? avx2 : &scalar_kernels();
    }();
    return *selected;
}

} // namespace rencontre::kernels
