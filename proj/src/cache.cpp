#include "bloch/cache.hpp"

#include <bit>
#include <cstring>
#include <fstream>
#include <iomanip>
#include <sstream>
#include <stdexcept>

namespace bloch {

namespace {

constexpr char kMagic[8] = {'B', 'L', 'O', 'C', 'H', 'E', 'I', 'G'};

template <class U>
void put(std::string& buf, U v) {
    for (std::size_t i = 0; i < sizeof(U); ++i) buf.push_back(static_cast<char>((v >> (8 * i)) & 0xff));
}

template <class U>
bool get(std::istream& in, U& v) {
    unsigned char b[sizeof(U)];
    if (!in.read(reinterpret_cast<char*>(b), sizeof(U))) return false;
    v = 0;
    for (std::size_t i = 0; i < sizeof(U); ++i) v |= static_cast<U>(b[i]) << (8 * i);
    return true;
}

int effective_nbands(const PlaneWaveBasis& basis, int nbands) {
    return nbands <= 0 ? basis.dimension() : std::min(nbands, basis.dimension());
}

}  // namespace

std::filesystem::path cache_path(const std::filesystem::path& dir, const FourierPotential& pot,
                                 const PlaneWaveBasis& basis, const BZGrid& grid, int nbands) {
    std::ostringstream name;
    name << "bands-" << std::hex << std::setw(16) << std::setfill('0') << pot.hash() << std::dec << "-c"
         << basis.cutoff() << "-n" << grid.n() << (grid.shifted() ? "s" : "g") << "-b"
         << effective_nbands(basis, nbands) << ".bin";
    return dir / name.str();
}

void save_bands(const GridBands& bands, const std::filesystem::path& file) {
    std::string buf(kMagic, kMagic + 8);
    put<std::uint32_t>(buf, kCacheVersion);
    put<std::uint64_t>(buf, bands.potential().hash());
    put<std::uint32_t>(buf, static_cast<std::uint32_t>(bands.basis().cutoff()));
    put<std::uint32_t>(buf, static_cast<std::uint32_t>(bands.grid().n()));
    put<std::uint8_t>(buf, bands.grid().shifted() ? 1 : 0);
    put<std::uint32_t>(buf, static_cast<std::uint32_t>(bands.nbands()));
    put<std::uint64_t>(buf, bands.nk());
    buf.reserve(buf.size() + 8 * bands.energies().size());
    for (double e : bands.energies()) put<std::uint64_t>(buf, std::bit_cast<std::uint64_t>(e));

    std::filesystem::path tmp = file;
    tmp += ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) throw std::runtime_error("cannot write cache file " + tmp.string());
        out.write(buf.data(), static_cast<std::streamsize>(buf.size()));
        if (!out) throw std::runtime_error("short write to cache file " + tmp.string());
    }
    std::filesystem::rename(tmp, file);
}

std::optional<GridBands> load_bands(const std::filesystem::path& file, const FourierPotential& pot,
                                    const PlaneWaveBasis& basis, const BZGrid& grid, int nbands) {
    std::ifstream in(file, std::ios::binary);
    if (!in) return std::nullopt;
    char magic[8];
    if (!in.read(magic, 8) || std::memcmp(magic, kMagic, 8) != 0) return std::nullopt;
    std::uint32_t version, cutoff, n, nb;
    std::uint64_t hash, nk;
    std::uint8_t shifted;
    if (!get(in, version) || !get(in, hash) || !get(in, cutoff) || !get(in, n) || !get(in, shifted) || !get(in, nb) ||
        !get(in, nk))
        return std::nullopt;
    const int want_nb = effective_nbands(basis, nbands);
    if (version != kCacheVersion || hash != pot.hash() || static_cast<int>(cutoff) != basis.cutoff() ||
        static_cast<int>(n) != grid.n() || (shifted != 0) != grid.shifted() || static_cast<int>(nb) != want_nb ||
        nk != grid.size())
        return std::nullopt;
    std::vector<double> e(nk * nb);
    for (double& x : e) {
        std::uint64_t bits;
        if (!get(in, bits)) return std::nullopt;
        x = std::bit_cast<double>(bits);
    }
    return GridBands(pot, basis, grid, want_nb, std::move(e));
}

GridBands load_or_compute(const std::filesystem::path& dir, const FourierPotential& pot, const PlaneWaveBasis& basis,
                          const BZGrid& grid, int nbands, int threads, bool* hit) {
    if (hit) *hit = false;
    if (dir.empty()) return GridBands::compute(pot, basis, grid, nbands, threads);
    const std::filesystem::path file = cache_path(dir, pot, basis, grid, nbands);
    if (auto cached = load_bands(file, pot, basis, grid, nbands)) {
        if (hit) *hit = true;
        return std::move(*cached);
    }
    GridBands bands = GridBands::compute(pot, basis, grid, nbands, threads);
    std::filesystem::create_directories(dir);
    save_bands(bands, file);
    return bands;
}

}  // namespace bloch
