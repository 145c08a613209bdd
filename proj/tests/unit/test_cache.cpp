#include <filesystem>
#include <fstream>
#include <random>

#include "bloch/cache.hpp"
#include "bloch/potential.hpp"
#include "doctest.h"

using namespace bloch;
namespace fs = std::filesystem;

namespace {

struct TempDir {
    fs::path path;
    TempDir() {
        std::random_device rd;
        path = fs::temp_directory_path() / ("bloch-cache-test-" + std::to_string(rd()));
        fs::create_directories(path);
    }
    ~TempDir() { fs::remove_all(path); }
};

}  // namespace

TEST_SUITE("cache") {

TEST_CASE("warm cache reproduces cold results bit for bit") {
    TempDir dir;
    const auto pot = named_potential("cosine3d", 2.0);
    const PlaneWaveBasis basis(1);
    const BZGrid grid(5, true);
    bool hit = true;
    const auto cold = load_or_compute(dir.path, pot, basis, grid, 6, 1, &hit);
    CHECK_FALSE(hit);
    const auto warm = load_or_compute(dir.path, pot, basis, grid, 6, 1, &hit);
    CHECK(hit);
    CHECK(warm.energies() == cold.energies());
    CHECK(warm.nbands() == 6);
    CHECK(warm.band_max(5) == cold.band_max(5));
    const auto direct = GridBands::compute(pot, basis, grid, 6);
    CHECK(direct.energies() == cold.energies());
}

TEST_CASE("file names separate the keys") {
    const auto pot = named_potential("cosine3d", 2.0);
    const PlaneWaveBasis basis(1);
    const auto a = cache_path("d", pot, basis, BZGrid(5, true), 6);
    CHECK(a == cache_path("d", pot, basis, BZGrid(5, true), 6));
    CHECK(a != cache_path("d", pot, basis, BZGrid(5, false), 6));
    CHECK(a != cache_path("d", pot, basis, BZGrid(6, true), 6));
    CHECK(a != cache_path("d", pot, basis, BZGrid(5, true), 7));
    CHECK(a != cache_path("d", pot, PlaneWaveBasis(2), BZGrid(5, true), 6));
    CHECK(a != cache_path("d", named_potential("cosine3d", 1.0), basis, BZGrid(5, true), 6));
}

TEST_CASE("stale, truncated or missing files are rejected") {
    TempDir dir;
    const auto pot = named_potential("cosine3d", 2.0);
    const PlaneWaveBasis basis(1);
    const BZGrid grid(4);
    const auto bands = GridBands::compute(pot, basis, grid, 4);
    const fs::path file = dir.path / "bands.bin";
    save_bands(bands, file);
    CHECK(load_bands(file, pot, basis, grid, 4).has_value());
    CHECK_FALSE(load_bands(file, named_potential("cosine3d", 2.5), basis, grid, 4).has_value());
    CHECK_FALSE(load_bands(file, pot, PlaneWaveBasis(2), grid, 4).has_value());
    CHECK_FALSE(load_bands(file, pot, basis, BZGrid(4, true), 4).has_value());
    CHECK_FALSE(load_bands(file, pot, basis, grid, 5).has_value());
    CHECK_FALSE(load_bands(dir.path / "missing.bin", pot, basis, grid, 4).has_value());

    fs::resize_file(file, fs::file_size(file) - 8);
    CHECK_FALSE(load_bands(file, pot, basis, grid, 4).has_value());

    save_bands(bands, file);
    {
        std::fstream f(file, std::ios::in | std::ios::out | std::ios::binary);
        f.seekp(8);
        const char bumped = static_cast<char>(kCacheVersion + 1);
        f.write(&bumped, 1);
    }
    CHECK_FALSE(load_bands(file, pot, basis, grid, 4).has_value());

    // a stale file is silently recomputed and overwritten
    bool hit = true;
    const auto again = load_or_compute(dir.path, pot, basis, grid, 4, 1, &hit);
    CHECK_FALSE(hit);
    CHECK(again.energies() == bands.energies());
}

TEST_CASE("an empty directory disables caching") {
    bool hit = true;
    const auto b = load_or_compute("", FourierPotential{}, PlaneWaveBasis(0), BZGrid(3), 0, 1, &hit);
    CHECK_FALSE(hit);
    CHECK(b.nk() == 27);
}

}
