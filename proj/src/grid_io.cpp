#include "oscbound/grid_io.hpp"

#include "oscbound/error.hpp"

#include <bit>
#include <cstring>
#include <fstream>
#include <iterator>

namespace oscbound {
namespace {

static_assert(std::endian::native == std::endian::little ||
                  std::endian::native == std::endian::big,
              "mixed-endian platforms are not supported");

template <typename T>
void put(std::vector<std::uint8_t>& out, T value) {
    std::uint8_t raw[sizeof(T)];
    std::memcpy(raw, &value, sizeof(T));
    if constexpr (std::endian::native == std::endian::big) {
        for (std::size_t i = sizeof(T); i-- > 0;) out.push_back(raw[i]);
    } else {
        out.insert(out.end(), raw, raw + sizeof(T));
    }
}

class Reader {
public:
    explicit Reader(const std::vector<std::uint8_t>& bytes) : bytes_(bytes) {}

    template <typename T>
    T get(ErrorCode on_short, const char* what) {
        if (bytes_.size() - pos_ < sizeof(T)) {
            throw Error(on_short, std::string(to_string(on_short)) + ": missing " + what);
        }
        std::uint8_t raw[sizeof(T)];
        if constexpr (std::endian::native == std::endian::big) {
            for (std::size_t i = 0; i < sizeof(T); ++i) raw[i] = bytes_[pos_ + sizeof(T) - 1 - i];
        } else {
            std::memcpy(raw, bytes_.data() + pos_, sizeof(T));
        }
        pos_ += sizeof(T);
        T value;
        std::memcpy(&value, raw, sizeof(T));
        return value;
    }

    std::size_t remaining() const { return bytes_.size() - pos_; }

private:
    const std::vector<std::uint8_t>& bytes_;
    std::size_t pos_ = 0;
};

}  // namespace

std::vector<std::uint8_t> encode_grid(const GridFunction& f) {
    std::vector<std::uint8_t> out;
    out.reserve(16 + 12 * f.dim() + 8 + 8 * f.size());
    out.insert(out.end(), std::begin(kGridMagic), std::end(kGridMagic));
    put<std::uint32_t>(out, kGridVersion);
    put<std::uint32_t>(out, static_cast<std::uint32_t>(f.dim()));
    for (auto e : f.extents()) put<std::uint32_t>(out, static_cast<std::uint32_t>(e));
    put<double>(out, f.cell_size());
    for (double o : f.origin()) put<double>(out, o);
    for (double v : f.values()) put<double>(out, v);
    return out;
}

GridFunction decode_grid(const std::vector<std::uint8_t>& bytes,
                         std::optional<std::size_t> expected_dim) {
    if (bytes.size() < 4 || std::memcmp(bytes.data(), kGridMagic, 4) != 0) {
        throw Error(ErrorCode::BadMagic, "bad magic: not an OSCG grid file");
    }
    std::vector<std::uint8_t> rest(bytes.begin() + 4, bytes.end());
    Reader in(rest);
    const auto version = in.get<std::uint32_t>(ErrorCode::TruncatedPayload, "version");
    if (version != kGridVersion) {
        throw Error(ErrorCode::UnsupportedVersion,
                    "unsupported OSCG version " + std::to_string(version));
    }
    const auto n = in.get<std::uint32_t>(ErrorCode::TruncatedPayload, "dimension");
    if (n == 0 || n > kMaxDim) {
        throw Error(ErrorCode::DimensionMismatch,
                    "dimension mismatch: header declares n=" + std::to_string(n));
    }
    if (expected_dim && *expected_dim != n) {
        throw Error(ErrorCode::DimensionMismatch,
                    "dimension mismatch: expected " + std::to_string(*expected_dim) +
                        ", file has " + std::to_string(n));
    }
    std::vector<std::size_t> extents(n);
    std::size_t count = 1;
    for (auto& e : extents) {
        e = in.get<std::uint32_t>(ErrorCode::TruncatedPayload, "extents");
        if (e == 0) throw Error(ErrorCode::DimensionMismatch, "dimension mismatch: zero extent");
        count *= e;
    }
    const double h = in.get<double>(ErrorCode::TruncatedPayload, "cell size");
    std::vector<double> origin(n);
    for (auto& o : origin) o = in.get<double>(ErrorCode::TruncatedPayload, "origin");
    if (in.remaining() < count * sizeof(double)) {
        throw Error(ErrorCode::TruncatedPayload,
                    "truncated payload: header declares " + std::to_string(count) +
                        " cells but only " + std::to_string(in.remaining() / sizeof(double)) +
                        " values follow");
    }
    if (in.remaining() > count * sizeof(double)) {
        throw Error(ErrorCode::DimensionMismatch,
                    "dimension mismatch: payload is longer than the declared extents");
    }
    std::vector<double> values(count);
    for (auto& v : values) v = in.get<double>(ErrorCode::TruncatedPayload, "values");
    return GridFunction(std::move(extents), h, std::move(origin), std::move(values));
}

void save_grid(const GridFunction& f, const std::filesystem::path& path) {
    const auto bytes = encode_grid(f);
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw Error(ErrorCode::Io, "cannot open " + path.string() + " for writing");
    out.write(reinterpret_cast<const char*>(bytes.data()),
              static_cast<std::streamsize>(bytes.size()));
    if (!out) throw Error(ErrorCode::Io, "write failed: " + path.string());
}

GridFunction load_grid(const std::filesystem::path& path, std::optional<std::size_t> expected_dim) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error(ErrorCode::Io, "cannot open " + path.string());
    std::vector<std::uint8_t> bytes((std::istreambuf_iterator<char>(in)),
                                    std::istreambuf_iterator<char>());
    return decode_grid(bytes, expected_dim);
}

}  // namespace oscbound
