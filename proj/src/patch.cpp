#include "symreg/patch.hpp"

#include <cmath>

#include "symreg/errors.hpp"

namespace symreg {

Patch3D::Patch3D(int w_, int h_, int d_) : w(w_), h(h_), d(d_) {
    if (w <= 0 || h <= 0 || d <= 0) throw DimensionError("Patch3D: dims must be positive");
    voxels.assign(static_cast<std::size_t>(w) * static_cast<std::size_t>(h) * static_cast<std::size_t>(d),
                  0.0f);
}

bool Patch3D::all_finite() const {
    for (float x : voxels) {
        if (!std::isfinite(x)) return false;
    }
    return true;
}

Patch3D lateral_flip(const Patch3D& p) {
    Patch3D out(p.w, p.h, p.d);
    for (int z = 0; z < p.d; ++z) {
        for (int y = 0; y < p.h; ++y) {
            for (int x = 0; x < p.w; ++x) out.at(p.w - 1 - x, y, z) = p.at(x, y, z);
        }
    }
    return out;
}

}  // namespace symreg
