#pragma once
/// On-disk cache of grid band energies, keyed by the potential hash, basis cutoff, grid and
/// band count. Eigenvectors are not stored: solve_full() regenerates them deterministically.
///
/// File layout (little-endian): "BLOCHEIG", u32 version, u64 potential hash, i32 cutoff,
/// i32 n_per_axis, u8 shifted, i32 nbands, u64 nk, then nk * nbands doubles (row-major).

#include <filesystem>
#include <optional>

#include "bloch/bz.hpp"

namespace bloch {

inline constexpr std::uint32_t kCacheVersion = 1;

/// Deterministic file name for a (potential, basis, grid, nbands) key inside `dir`.
std::filesystem::path cache_path(const std::filesystem::path& dir, const FourierPotential& pot,
                                 const PlaneWaveBasis& basis, const BZGrid& grid, int nbands);

/// Writes atomically (temporary file + rename). Throws std::runtime_error on I/O failure.
void save_bands(const GridBands& bands, const std::filesystem::path& file);

/// Returns the cached bands when the file exists and its header matches the key exactly;
/// std::nullopt for a missing, stale or truncated file.
std::optional<GridBands> load_bands(const std::filesystem::path& file, const FourierPotential& pot,
                                    const PlaneWaveBasis& basis, const BZGrid& grid, int nbands);

/// Cache lookup, falling back to GridBands::compute (and storing the result). An empty `dir`
/// disables caching. `hit` reports whether the cache was used.
GridBands load_or_compute(const std::filesystem::path& dir, const FourierPotential& pot, const PlaneWaveBasis& basis,
                          const BZGrid& grid, int nbands = 0, int threads = 1, bool* hit = nullptr);

}  // namespace bloch
