#pragma once

#include <array>
#include <cstdint>
#include <string>
#include <vector>

#include "symreg/patch.hpp"

namespace symreg {

/// Generator settings. A latent severity s ~ U[y_min, y_max] drives both
/// targets (y = clamp(s + N(0, sigma_pair))); each patch is background noise
/// plus a Gaussian blob whose peak contrast grows affinely with its side's
/// target. The blob center jitters independently per rendering so each side
/// carries its own nuisance variation. The right patch is the lateral mirror
/// of an independently re-noised rendering. sigma_pair's default solves the
/// variance ratio for a right/left correlation near 0.93.
struct GenConfig {
    int n_samples = 860;
    std::array<int, 3> dims{16, 16, 8};
    double y_min = 0.44;
    double y_max = 6.84;
    double sigma_pair = 0.507;
    double blob_radius = 2.2;
    double blob_contrast = 2.0;
    double blob_jitter_sd = 1.0;
    double noise_sd = 1.4;
    std::uint64_t seed = 42;
};

enum class Split : std::uint8_t { train = 0, val = 1, test = 2 };

const char* split_name(Split s);

struct Dataset {
    GenConfig cfg;  // provenance echo
    std::vector<PairedSample> samples;
    std::vector<Split> split;  // same length as samples

    std::size_t size() const { return samples.size(); }
    std::vector<std::size_t> indices_of(Split s) const;
    double y_span() const { return cfg.y_max - cfg.y_min; }
};

/// Blob center in the canonical (left) frame, in voxel coordinates.
std::array<double, 3> blob_center(const GenConfig& cfg);

/// Deterministic per (cfg, seed); per-sample RNG streams derive from
/// (seed, index).
Dataset gen_dataset(const GenConfig& cfg);

/// Seeded-shuffle split into train/val/test. Fractions must sum to 1
/// (within 1e-9); counts use largest-remainder apportionment.
void assign_split(Dataset& ds, std::array<double, 3> fractions, std::uint64_t seed);
void assign_split_counts(Dataset& ds, std::array<int, 3> counts, std::uint64_t seed);

// Dataset file: magic "SYMREGD1", little-endian u64 header length, JSON
// header (counts, dims, y range, generator config, split assignment), then
// per sample the right and left voxel blobs (float32 LE, W fastest) and
// finally the target table (float64 LE pairs).
void save_dataset(const Dataset& ds, const std::string& path);
Dataset load_dataset(const std::string& path);

}  // namespace symreg
