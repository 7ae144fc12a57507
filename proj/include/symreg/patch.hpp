#pragma once

#include <cstddef>
#include <vector>

namespace symreg {

/// One 3D intensity patch. Voxels are stored W-fastest (flat index
/// w + W*(h + H*d)), matching the on-disk little-endian float32 layout.
struct Patch3D {
    int w = 0, h = 0, d = 0;
    std::vector<float> voxels;

    Patch3D() = default;
    Patch3D(int w_, int h_, int d_);

    std::size_t size() const { return voxels.size(); }
    std::size_t index(int x, int y, int z) const {
        return static_cast<std::size_t>(x) +
               static_cast<std::size_t>(w) *
                   (static_cast<std::size_t>(y) + static_cast<std::size_t>(h) * static_cast<std::size_t>(z));
    }
    float at(int x, int y, int z) const { return voxels[index(x, y, z)]; }
    float& at(int x, int y, int z) { return voxels[index(x, y, z)]; }

    bool all_finite() const;
};

/// Reverses the lateral (W) axis only.
Patch3D lateral_flip(const Patch3D& p);

struct PairedSample {
    Patch3D x_r, x_l;
    double y_r = 0.0, y_l = 0.0;
};

}  // namespace symreg
