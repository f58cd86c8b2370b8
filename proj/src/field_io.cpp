#include "cfrg/field_io.hpp"

#include <bit>
#include <cstdint>
#include <cstring>
#include <fstream>

namespace cfrg {

static_assert(std::endian::native == std::endian::little,
              "field dumps are little-endian; big-endian hosts are unsupported");

namespace {

constexpr char kMagic[4] = {'C', 'F', 'R', 'G'};
constexpr std::uint32_t kVersion = 1;

void write_header(std::ofstream& out, const Lattice& lat, std::uint32_t ncomp) {
    out.write(kMagic, 4);
    const std::uint32_t version = kVersion;
    const std::uint32_t n = static_cast<std::uint32_t>(lat.n);
    const double length = lat.length;
    out.write(reinterpret_cast<const char*>(&version), sizeof(version));
    out.write(reinterpret_cast<const char*>(&n), sizeof(n));
    out.write(reinterpret_cast<const char*>(&length), sizeof(length));
    out.write(reinterpret_cast<const char*>(&ncomp), sizeof(ncomp));
}

struct Header {
    Lattice lat;
    std::uint32_t ncomp = 0;
};

Header read_header(std::ifstream& in, const std::filesystem::path& path) {
    char magic[4] = {};
    std::uint32_t version = 0, n = 0, ncomp = 0;
    double length = 0.0;
    in.read(magic, 4);
    in.read(reinterpret_cast<char*>(&version), sizeof(version));
    in.read(reinterpret_cast<char*>(&n), sizeof(n));
    in.read(reinterpret_cast<char*>(&length), sizeof(length));
    in.read(reinterpret_cast<char*>(&ncomp), sizeof(ncomp));
    if (!in || std::memcmp(magic, kMagic, 4) != 0)
        throw IoError("field load: bad magic in " + path.string());
    if (version != kVersion)
        throw IoError("field load: unsupported version in " + path.string());
    Header h;
    try {
        h.lat = Lattice(static_cast<int>(n), length);
    } catch (const ValidationError& e) {
        throw IoError("field load: invalid lattice in " + path.string() + ": " + e.what());
    }
    h.ncomp = ncomp;
    return h;
}

void write_values(const std::vector<double>& v, const Lattice& lat, std::uint32_t ncomp,
                  const std::filesystem::path& path) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw IoError("field dump: cannot open " + path.string());
    write_header(out, lat, ncomp);
    out.write(reinterpret_cast<const char*>(v.data()),
              static_cast<std::streamsize>(v.size() * sizeof(double)));
    if (!out) throw IoError("field dump: write failed for " + path.string());
}

void read_values(std::ifstream& in, std::vector<double>& v, const std::filesystem::path& path) {
    in.read(reinterpret_cast<char*>(v.data()),
            static_cast<std::streamsize>(v.size() * sizeof(double)));
    if (!in) throw IoError("field load: truncated data in " + path.string());
}

} // namespace

void dump_field(const ScalarField& f, const std::filesystem::path& path) {
    write_values(f.values(), f.lattice(), 1, path);
}

void dump_field(const SymTensorField& f, const std::filesystem::path& path) {
    write_values(f.values(), f.lattice(), 6, path);
}

ScalarField load_scalar_field(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("field load: cannot open " + path.string());
    Header h = read_header(in, path);
    if (h.ncomp != 1)
        throw IoError("field load: expected 1 component in " + path.string());
    ScalarField f(h.lat);
    read_values(in, f.values(), path);
    return f;
}

SymTensorField load_tensor_field(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("field load: cannot open " + path.string());
    Header h = read_header(in, path);
    if (h.ncomp != 6)
        throw IoError("field load: expected 6 components in " + path.string());
    SymTensorField f(h.lat);
    read_values(in, f.values(), path);
    return f;
}

void write_csv_slice(const ScalarField& f, int i3, const std::filesystem::path& path) {
    const Lattice& lat = f.lattice();
    if (i3 < 0 || i3 >= lat.n)
        throw ValidationError("write_csv_slice: plane index out of range");
    std::ofstream out(path, std::ios::trunc);
    if (!out) throw IoError("csv slice: cannot open " + path.string());
    out << "plane," << i3 << "\n";
    out.precision(17);
    for (int i2 = 0; i2 < lat.n; ++i2) {
        for (int i1 = 0; i1 < lat.n; ++i1) {
            if (i1) out << ',';
            out << f(i1, i2, i3);
        }
        out << "\n";
    }
    if (!out) throw IoError("csv slice: write failed for " + path.string());
}

} // namespace cfrg
