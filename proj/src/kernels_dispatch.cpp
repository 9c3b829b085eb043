#include "satguide/kernels.hpp"

#include <cstdlib>
#include <cstring>

namespace satguide::kernels {

const Ops& ops() {
    static const Ops* selected = [] {
        const char* env = std::getenv("SATGUIDE_KERNELS");
        if (env && std::strcmp(env, "scalar") == 0) return &scalar_ops();
        const Ops* avx2 = avx2_ops();
        if (env && std::strcmp(env, "avx2") == 0 && avx2) return avx2;
        return avx2 ? avx2 : &scalar_ops();
    }();
    return *selected;
}

} // namespace satguide::kernels
